/// Compensated (Kahan-Neumaier) accumulator.
///
/// Sums over a value list have up to `2^n - 1` terms, where naive f64
/// accumulation loses digits; the compensation term recovers them.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[cfg(test)]
mod tests {
    use super::KahanSum;

    #[test]
    fn recovers_cancellation() {
        let mut k = KahanSum::new();
        k.add(1e16);
        k.add(1.0);
        k.add(-1e16);
        assert_eq!(k.value(), 1.0);
    }

    #[test]
    fn matches_exact_small_sum() {
        let mut k = KahanSum::new();
        for i in 1..=1000 {
            k.add(i as f64);
        }
        assert_eq!(k.value(), 500500.0);
    }
}
