/// Krichevsky–Trofimov sequential estimator for a binary source.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct KtCounter {
    pub ones: u64,
    pub zeros: u64,
}

impl KtCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Predictive probability of a one: `(ones + ½) / (ones + zeros + 1)`.
    pub fn predict(&self) -> f64 {
        (self.ones as f64 + 0.5) / ((self.ones + self.zeros) as f64 + 1.0)
    }

    pub fn update(&mut self, ones: u64, zeros: u64) {
        self.ones += ones;
        self.zeros += zeros;
    }

    pub fn push(&mut self, bit: bool) {
        if bit {
            self.ones += 1;
        } else {
            self.zeros += 1;
        }
    }
}

pub fn kt_predict(counter: &KtCounter) -> f64 {
    counter.predict()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predictions() {
        assert_eq!(KtCounter::new().predict(), 0.5);
        let c = KtCounter { ones: 3, zeros: 1 };
        assert!((kt_predict(&c) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn stays_inside_unit_interval() {
        for ones in [0u64, 1, 10, 1_000_000] {
            for zeros in [0u64, 1, 10, 1_000_000] {
                let p = KtCounter { ones, zeros }.predict();
                assert!(p > 0.0 && p < 1.0);
            }
        }
    }
}
