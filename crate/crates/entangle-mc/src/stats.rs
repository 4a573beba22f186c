//! Small statistical helpers shared by the estimators and the test suites.

/// Streaming first and second moments with exact, order-fixed merging.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: u64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.sum / self.n as f64
        }
    }

    /// Population variance ⟨x²⟩ - ⟨x⟩², clamped at zero.
    pub fn variance(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        let mean = self.mean();
        (self.sum_sq / self.n as f64 - mean * mean).max(0.0)
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            return f64::NAN;
        }
        (self.variance() / self.n as f64).sqrt()
    }
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).expect("finite samples"));
    ys.sort_by(|p, q| p.partial_cmp(q).expect("finite samples"));

    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = xs[i];
        let y = ys[j];
        let t = x.min(y);
        while i < n && xs[i] <= t {
            i += 1;
        }
        while j < m && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
pub fn one_sample_ks(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(!samples.is_empty());
    let mut xs = samples.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).expect("finite samples"));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (k, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - k as f64 / n).abs());
        d = d.max(((k + 1) as f64 / n - f).abs());
    }
    d
}

/// Two-sample KS critical value at the 1% level (asymptotic form).
pub fn ks_critical_1pct(n: usize, m: usize) -> f64 {
    // c(α) = sqrt(-ln(α/2) / 2) with α = 0.01.
    const C: f64 = 1.6276236115189503;
    C * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// One-sample KS critical value at the 1% level (asymptotic form).
pub fn ks_one_sample_critical_1pct(n: usize) -> f64 {
    const C: f64 = 1.6276236115189503;
    C / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_basics() {
        let mut m = Moments::new();
        for x in [1.0, 2.0, 3.0, 4.0] {
            m.push(x);
        }
        assert_eq!(m.count(), 4);
        assert!((m.mean() - 2.5).abs() < 1e-15);
        assert!((m.variance() - 1.25).abs() < 1e-15);

        let mut a = Moments::new();
        let mut b = Moments::new();
        for x in [1.0, 2.0] {
            a.push(x);
        }
        for x in [3.0, 4.0] {
            b.push(x);
        }
        a.merge(&b);
        assert_eq!(a, m);
    }

    #[test]
    fn ks_statistic_on_known_samples() {
        let a = [0.1, 0.2, 0.3];
        let b = [0.1, 0.2, 0.3];
        assert_eq!(two_sample_ks(&a, &b), 0.0);

        let a = [0.0, 0.1, 0.2];
        let b = [0.5, 0.6, 0.7];
        assert_eq!(two_sample_ks(&a, &b), 1.0);

        // Uniform samples against the uniform CDF stay below the 1% critical
        // value (fixed construction, no randomness).
        let xs: Vec<f64> = (0..1000).map(|k| (k as f64 + 0.5) / 1000.0).collect();
        let d = one_sample_ks(&xs, |x| x.clamp(0.0, 1.0));
        assert!(d < ks_one_sample_critical_1pct(1000));
    }
}
