//! Seedable, portable random number generation.
//!
//! Benchmark instances must be reproducible bit for bit from `(n, kind,
//! seed)` on any platform, so everything here is frozen: the generator is
//! xoshiro256++ seeded through SplitMix64, uniform doubles take the top 53
//! bits, and normal deviates use the Marsaglia polar method. The natural log
//! inside the polar method is computed with a fixed polynomial instead of
//! libm, because libm's last-bit behaviour differs across platforms.

/// xoshiro256++ (Blackman and Vigna), state seeded via SplitMix64.
#[derive(Debug, Clone)]
pub struct Xoshiro256PlusPlus {
    state: [u64; 4],
}

fn splitmix64(x: &mut u64) -> u64 {
    *x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Xoshiro256PlusPlus {
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut x = seed;
        let mut state = [0u64; 4];
        for word in &mut state {
            *word = splitmix64(&mut x);
        }
        if state == [0; 4] {
            state[0] = 1;
        }
        Self { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform double in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal deviate, Marsaglia polar method.
    ///
    /// The paired deviate is discarded so each call consumes a
    /// self-contained stretch of the stream.
    pub fn next_normal(&mut self) -> f64 {
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                return u * (-2.0 * portable_ln(s) / s).sqrt();
            }
        }
    }

    /// Uniform integer in `[0, bound)`, bias-free (Lemire with rejection).
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let m = u128::from(self.next_u64()) * u128::from(bound);
            if m as u64 >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// Uniform integer in `[0, bound)` for 128-bit bounds.
    pub fn next_u128_below(&mut self, bound: u128) -> u128 {
        assert!(bound > 0);
        // Largest multiple of `bound` minus one; the modulo below is
        // unbiased for accepted draws.
        let zone = u128::MAX - (u128::MAX - bound + 1) % bound;
        loop {
            let x = (u128::from(self.next_u64()) << 64) | u128::from(self.next_u64());
            if x <= zone {
                return x % bound;
            }
        }
    }
}

/// Natural log via exponent extraction plus an atanh series.
///
/// All operations are IEEE adds/multiplies/divides, so results are identical
/// on every platform. Accuracy is around 1 ulp over normal doubles, which is
/// far below the statistical noise of anything sampled from it.
pub fn portable_ln(x: f64) -> f64 {
    assert!(x > 0.0 && x.is_finite());
    const LN2: f64 = core::f64::consts::LN_2;
    let bits = x.to_bits();
    let mut exponent = ((bits >> 52) & 0x7FF) as i64 - 1023;
    let mut mantissa = f64::from_bits((bits & 0x000F_FFFF_FFFF_FFFF) | 0x3FF0_0000_0000_0000);
    if exponent == -1023 {
        // Subnormal: renormalize.
        let normalized = x * (1u64 << 54) as f64;
        let nbits = normalized.to_bits();
        exponent = ((nbits >> 52) & 0x7FF) as i64 - 1023 - 54;
        mantissa = f64::from_bits((nbits & 0x000F_FFFF_FFFF_FFFF) | 0x3FF0_0000_0000_0000);
    }
    // Map mantissa into [sqrt(1/2), sqrt(2)) so |t| stays small.
    if mantissa > core::f64::consts::SQRT_2 {
        mantissa *= 0.5;
        exponent += 1;
    }
    let t = (mantissa - 1.0) / (mantissa + 1.0);
    let t2 = t * t;
    // ln(m) = 2 * (t + t^3/3 + t^5/5 + ...); |t| <= 0.172 so eleven terms
    // are past double precision.
    let series = t2 / 21.0 + 1.0 / 19.0;
    let series = series * t2 + 1.0 / 17.0;
    let series = series * t2 + 1.0 / 15.0;
    let series = series * t2 + 1.0 / 13.0;
    let series = series * t2 + 1.0 / 11.0;
    let series = series * t2 + 1.0 / 9.0;
    let series = series * t2 + 1.0 / 7.0;
    let series = series * t2 + 1.0 / 5.0;
    let series = series * t2 + 1.0 / 3.0;
    let series = series * t2 + 1.0;
    exponent as f64 * LN2 + 2.0 * t * series
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_stream() {
        let mut a = Xoshiro256PlusPlus::seed_from_u64(42);
        let mut b = Xoshiro256PlusPlus::seed_from_u64(42);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn different_seeds_differ() {
        let mut a = Xoshiro256PlusPlus::seed_from_u64(1);
        let mut b = Xoshiro256PlusPlus::seed_from_u64(2);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(7);
        for _ in 0..10_000 {
            let x = rng.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn portable_ln_matches_std() {
        let probes = [
            1e-300,
            1e-10,
            0.1,
            0.5,
            0.9999,
            1.0,
            1.0001,
            2.0,
            core::f64::consts::E,
            10.0,
            1e10,
            1e300,
        ];
        for &x in &probes {
            let got = portable_ln(x);
            let want = x.ln();
            let tol = 1e-14 * want.abs().max(1.0);
            assert!((got - want).abs() <= tol, "ln({x}): got {got}, std {want}");
        }
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        for _ in 0..10_000 {
            let x = rng.next_f64() + 1e-12;
            let got = portable_ln(x);
            let want = x.ln();
            assert!((got - want).abs() <= 1e-14 * want.abs().max(1.0));
        }
    }

    #[test]
    fn normal_moments() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(123);
        let k = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..k {
            let z = rng.next_normal();
            sum += z;
            sum_sq += z * z;
        }
        let mean = sum / k as f64;
        let var = sum_sq / k as f64 - mean * mean;
        // 5 standard errors for each moment.
        assert!(mean.abs() < 5.0 / (k as f64).sqrt(), "mean {mean}");
        assert!(
            (var - 1.0).abs() < 5.0 * (2.0 / k as f64).sqrt(),
            "var {var}"
        );
    }

    #[test]
    fn bounded_draws_cover_range() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(9);
        let mut seen = [false; 10];
        for _ in 0..1000 {
            seen[rng.next_below(10) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
        for _ in 0..1000 {
            assert!(rng.next_u128_below(1u128 << 90) < (1u128 << 90));
        }
    }
}
