//! Histogram and conditional-curve accumulators with exact merging.

use crate::stats::Moments;

/// Fixed binning of a closed interval. The upper edge is inclusive so that a
/// value exactly at `hi` lands in the last bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinSpec {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl BinSpec {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        assert!(bins >= 1, "bin count must be positive");
        assert!(hi > lo, "empty bin range");
        Self { lo, hi, bins }
    }

    /// Unit interval for entanglement axes.
    pub fn unit(bins: usize) -> Self {
        Self::new(0.0, 1.0, bins)
    }

    /// [-1, 1] for entanglement-change axes.
    pub fn symmetric_unit(bins: usize) -> Self {
        Self::new(-1.0, 1.0, bins)
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins as f64
    }

    /// Bin index of a value; recorded values must be in range, anything else
    /// aborts (it indicates a measure bug upstream).
    pub fn index(&self, x: f64) -> usize {
        assert!(
            x >= self.lo && x <= self.hi,
            "value {x} outside histogram range [{}, {}]",
            self.lo,
            self.hi
        );
        let raw = ((x - self.lo) / self.width()) as usize;
        raw.min(self.bins - 1)
    }

    pub fn center(&self, bin: usize) -> f64 {
        self.lo + (bin as f64 + 0.5) * self.width()
    }

    pub fn edges(&self, bin: usize) -> (f64, f64) {
        (
            self.lo + bin as f64 * self.width(),
            self.lo + (bin as f64 + 1.0) * self.width(),
        )
    }
}

/// Empirical density over a fixed binning; counts are exact integers.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    spec: BinSpec,
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn new(spec: BinSpec) -> Self {
        Self {
            spec,
            counts: vec![0; spec.bins],
            total: 0,
        }
    }

    pub fn spec(&self) -> BinSpec {
        self.spec
    }

    pub fn record(&mut self, x: f64) {
        self.counts[self.spec.index(x)] += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &Histogram) {
        assert_eq!(self.spec, other.spec, "merging incompatible histograms");
        for (a, b) in self.counts.iter_mut().zip(other.counts.iter()) {
            *a += b;
        }
        self.total += other.total;
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Normalized density: counts / (total · bin width). Zero when empty.
    pub fn density(&self, bin: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.counts[bin] as f64 / (self.total as f64 * self.spec.width())
        }
    }

    /// Probability mass of the bin containing `x`.
    pub fn mass_in_bin_containing(&self, x: f64) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.counts[self.spec.index(x)] as f64 / self.total as f64
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,count,density\n");
        for bin in 0..self.spec.bins {
            let (lo, hi) = self.spec.edges(bin);
            out.push_str(&format!(
                "{lo},{hi},{},{}\n",
                self.counts[bin],
                self.density(bin)
            ));
        }
        out
    }
}

/// Binned conditional mean and variance of y over a binned x axis.
///
/// Per-bin sums and squared sums are kept separately so shard merging is a
/// plain componentwise addition in a fixed order. Empty bins stay explicit
/// gaps (`NaN` in the CSV); nothing is interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalCurve {
    spec: BinSpec,
    counts: Vec<u64>,
    sums: Vec<f64>,
    sq_sums: Vec<f64>,
}

impl ConditionalCurve {
    pub fn new(spec: BinSpec) -> Self {
        Self {
            spec,
            counts: vec![0; spec.bins],
            sums: vec![0.0; spec.bins],
            sq_sums: vec![0.0; spec.bins],
        }
    }

    pub fn spec(&self) -> BinSpec {
        self.spec
    }

    pub fn record(&mut self, x: f64, y: f64) {
        let bin = self.spec.index(x);
        self.counts[bin] += 1;
        self.sums[bin] += y;
        self.sq_sums[bin] += y * y;
    }

    pub fn merge(&mut self, other: &ConditionalCurve) {
        assert_eq!(self.spec, other.spec, "merging incompatible curves");
        for bin in 0..self.spec.bins {
            self.counts[bin] += other.counts[bin];
            self.sums[bin] += other.sums[bin];
            self.sq_sums[bin] += other.sq_sums[bin];
        }
    }

    pub fn bins(&self) -> usize {
        self.spec.bins
    }

    pub fn bin_center(&self, bin: usize) -> f64 {
        self.spec.center(bin)
    }

    pub fn count(&self, bin: usize) -> u64 {
        self.counts[bin]
    }

    pub fn mean(&self, bin: usize) -> Option<f64> {
        (self.counts[bin] > 0).then(|| self.sums[bin] / self.counts[bin] as f64)
    }

    pub fn second_moment(&self, bin: usize) -> Option<f64> {
        (self.counts[bin] > 0).then(|| self.sq_sums[bin] / self.counts[bin] as f64)
    }

    /// Population variance ⟨y²⟩ - ⟨y⟩² per bin, clamped at zero.
    pub fn variance(&self, bin: usize) -> Option<f64> {
        let mean = self.mean(bin)?;
        let second = self.second_moment(bin)?;
        Some((second - mean * mean).max(0.0))
    }

    /// Largest per-bin mean and its bin center, over non-empty bins.
    pub fn max_mean(&self) -> Option<(f64, f64)> {
        let mut best: Option<(f64, f64)> = None;
        for bin in 0..self.spec.bins {
            if let Some(m) = self.mean(bin) {
                if best.map_or(true, |(_, bm)| m > bm) {
                    best = Some((self.bin_center(bin), m));
                }
            }
        }
        best
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_center,count,mean,second_moment,variance\n");
        for bin in 0..self.spec.bins {
            let center = self.bin_center(bin);
            let count = self.counts[bin];
            let mean = self.mean(bin).unwrap_or(f64::NAN);
            let second = self.second_moment(bin).unwrap_or(f64::NAN);
            let variance = self.variance(bin).unwrap_or(f64::NAN);
            out.push_str(&format!("{center},{count},{mean},{second},{variance}\n"));
        }
        out
    }
}

/// One row of the scalar summary CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarStat {
    pub name: String,
    pub value: f64,
    pub stderr: f64,
    pub n: u64,
}

impl ScalarStat {
    pub fn from_moments(name: impl Into<String>, moments: &Moments) -> Self {
        Self {
            name: name.into(),
            value: moments.mean(),
            stderr: moments.stderr(),
            n: moments.count(),
        }
    }

    pub fn plain(name: impl Into<String>, value: f64, n: u64) -> Self {
        Self {
            name: name.into(),
            value,
            stderr: f64::NAN,
            n,
        }
    }
}

pub fn summary_csv(stats: &[ScalarStat]) -> String {
    let mut out = String::from("name,value,stderr,n\n");
    for s in stats {
        out.push_str(&format!("{},{},{},{}\n", s.name, s.value, s.stderr, s.n));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_indexing_covers_edges() {
        let spec = BinSpec::symmetric_unit(100);
        assert_eq!(spec.index(-1.0), 0);
        assert_eq!(spec.index(1.0), 99);
        assert_eq!(spec.index(0.0), 50);
        assert!((spec.width() - 0.02).abs() < 1e-15);
    }

    #[test]
    #[should_panic(expected = "outside histogram range")]
    fn out_of_range_aborts() {
        BinSpec::unit(10).index(1.5);
    }

    #[test]
    fn histogram_normalizes() {
        let mut h = Histogram::new(BinSpec::unit(4));
        for x in [0.1, 0.3, 0.6, 0.9, 0.95] {
            h.record(x);
        }
        let integral: f64 = (0..4).map(|b| h.density(b) * h.spec().width()).sum();
        assert!((integral - 1.0).abs() < 1e-9);
        assert_eq!(h.total(), 5);

        let empty = Histogram::new(BinSpec::unit(4));
        assert_eq!(empty.total(), 0);
        assert_eq!(empty.density(0), 0.0);
    }

    #[test]
    fn histogram_merge_is_exact() {
        let spec = BinSpec::unit(10);
        let mut a = Histogram::new(spec);
        let mut b = Histogram::new(spec);
        let mut whole = Histogram::new(spec);
        for k in 0..100 {
            let x = (k as f64 + 0.5) / 100.0;
            whole.record(x);
            if k % 2 == 0 {
                a.record(x);
            } else {
                b.record(x);
            }
        }
        a.merge(&b);
        assert_eq!(a, whole);
    }

    #[test]
    fn curve_statistics() {
        let mut c = ConditionalCurve::new(BinSpec::unit(2));
        c.record(0.1, 1.0);
        c.record(0.2, 3.0);
        assert_eq!(c.count(0), 2);
        assert_eq!(c.mean(0), Some(2.0));
        assert_eq!(c.second_moment(0), Some(5.0));
        assert_eq!(c.variance(0), Some(1.0));
        assert_eq!(c.mean(1), None);

        let csv = c.to_csv();
        assert!(csv.lines().nth(2).unwrap().contains("NaN"));
    }
}
