//! Streaming mean/variance with deterministic merging.

/// Welford accumulator; merges use Chan's pairwise update.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Summary {
    pub count: u64,
    pub mean: f64,
    m2: f64,
    /// Number of nonzero observations.
    pub nonzero: u64,
}

impl Summary {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        if x != 0.0 {
            self.nonzero += 1;
        }
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Summary) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        self.mean += delta * nb / n;
        self.m2 += other.m2 + delta * delta * na * nb / n;
        self.count += other.count;
        self.nonzero += other.nonzero;
    }

    /// Unbiased sample variance; 0 for fewer than two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }

    /// Per-sample relative error `std / mean`; `None` unless the mean is
    /// positive.
    pub fn relative_error(&self) -> Option<f64> {
        (self.mean > 0.0).then(|| self.std_dev() / self.mean)
    }
}

impl FromIterator<f64> for Summary {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Summary::default();
        for x in iter {
            s.push(x);
        }
        s
    }
}

/// `|m₁ − m₂| / √(se₁² + se₂²)`.
pub fn combined_z_score(a: &Summary, b: &Summary) -> f64 {
    let se = (a.std_error().powi(2) + b.std_error().powi(2)).sqrt();
    (a.mean - b.mean).abs() / se
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_two_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1 - 3.0).collect();
        let s: Summary = xs.iter().copied().collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((s.mean - mean).abs() < 1e-12);
        assert!((s.variance() - var).abs() < 1e-10);

        let mut left: Summary = xs[..313].iter().copied().collect();
        let right: Summary = xs[313..].iter().copied().collect();
        left.merge(&right);
        assert!((left.mean - mean).abs() < 1e-12);
        assert!((left.variance() - var).abs() < 1e-10);
        assert_eq!(left.count, 1000);
    }

    #[test]
    fn zero_mean_has_no_relative_error() {
        let s: Summary = std::iter::repeat(0.0).take(100).collect();
        assert_eq!(s.relative_error(), None);
        assert_eq!(s.nonzero, 0);
    }

    #[test]
    fn bernoulli_relative_error() {
        // 1 success in 100: std/mean = sqrt((1-p) n/(n-1) / p)
        let s: Summary = (0..100).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
        let expected = (0.99f64 * 100.0 / 99.0 / 0.01).sqrt();
        assert!((s.relative_error().unwrap() - expected).abs() < 1e-9);
    }
}
