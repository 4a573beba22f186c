//! Measure-correct random generation of two-qubit states.
//!
//! Mixed states are drawn from the product measure on the state space: the
//! eigenbasis comes from the Haar measure on U(4), the eigenvalue vector from
//! the normalized Lebesgue measure on the 3-simplex, independently. Pure
//! states are Fubini-Study distributed (normalized complex Gaussian vectors).
//!
//! Haar unitaries are built from a Ginibre matrix by column orthogonalization.
//! Modified Gram-Schmidt produces the unique QR factor whose triangular
//! diagonal is real positive, which is exactly the phase convention required
//! for the result to be Haar distributed; a plain QR without that convention
//! is biased.

use std::fmt;

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use thiserror::Error;

use crate::matrix::{Matrix4, DIM};
use crate::measures::{concurrence, entanglement_of_formation, participation_ratio};
use crate::state::{DensityMatrix, PureState};

/// Default cap on rejection attempts per accepted sample.
pub const DEFAULT_REJECTION_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("rejection budget exhausted after {attempts} attempts for band {band}")]
    RejectionBudgetExceeded { attempts: u64, band: String },
}

/// Which ensemble a state is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    /// Fubini-Study pure states.
    Pure,
    /// All states (pure and mixed) under the product measure.
    All,
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ensemble::Pure => write!(f, "pure"),
            Ensemble::All => write!(f, "all"),
        }
    }
}

impl std::str::FromStr for Ensemble {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pure" => Ok(Ensemble::Pure),
            "all" => Ok(Ensemble::All),
            other => Err(format!("unknown ensemble {other:?}; expected pure or all")),
        }
    }
}

/// Seeded, stream-separated random source.
///
/// Identical (seed, stream_id) pairs reproduce the identical sample sequence
/// bit for bit; distinct stream ids give statistically independent streams,
/// which is how the estimators shard work without sharing generator state.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// Point on the eigenvalue simplex: four weights in [0, 1] summing to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexPoint {
    weights: [f64; DIM],
}

impl SimplexPoint {
    pub fn weights(&self) -> [f64; DIM] {
        self.weights
    }

    /// 1 / Σ w², the participation ratio of any state with this spectrum.
    pub fn participation_ratio(&self) -> f64 {
        1.0 / self.weights.iter().map(|w| w * w).sum::<f64>()
    }
}

fn complex_gaussian(rng: &mut RngStream) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Haar-distributed unitary on U(4).
pub fn haar_unitary(rng: &mut RngStream) -> Matrix4 {
    let mut m = Matrix4::from_fn(|_, _| Complex64::new(0.0, 0.0));
    for j in 0..DIM {
        for i in 0..DIM {
            m.set(i, j, complex_gaussian(rng));
        }
    }
    // Column-wise modified Gram-Schmidt, two passes per column; the implicit
    // R diagonal is the (real positive) column norm.
    for j in 0..DIM {
        for _ in 0..2 {
            for k in 0..j {
                let mut proj = Complex64::new(0.0, 0.0);
                for i in 0..DIM {
                    proj += m.get(i, k).conj() * m.get(i, j);
                }
                for i in 0..DIM {
                    let v = m.get(i, j) - proj * m.get(i, k);
                    m.set(i, j, v);
                }
            }
        }
        let norm: f64 = (0..DIM)
            .map(|i| m.get(i, j).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(norm > 0.0, "degenerate Ginibre column");
        let inv = 1.0 / norm;
        for i in 0..DIM {
            m.set(i, j, m.get(i, j) * inv);
        }
    }
    m
}

/// Uniform point on the 3-simplex: four iid standard exponentials, normalized
/// (a Dirichlet(1,1,1,1) draw, which is the normalized Lebesgue measure).
pub fn uniform_simplex(rng: &mut RngStream) -> SimplexPoint {
    let mut weights = [0.0f64; DIM];
    let mut total = 0.0;
    for w in &mut weights {
        let e: f64 = Exp1.sample(rng);
        *w = e;
        total += e;
    }
    for w in &mut weights {
        *w /= total;
    }
    SimplexPoint { weights }
}

// ρ = Σ_k w_k u_k u_k† over the columns of the sampled basis. The spectrum is
// deliberately not cached: every state, sampled or gate-rotated, goes through
// the same eigensolver path, which keeps e.g. identity-gate ΔE exactly zero.
fn assemble_mixed(weights: SimplexPoint, basis: Matrix4) -> DensityMatrix {
    let mut matrix = Matrix4::zero();
    for k in 0..DIM {
        let w = weights.weights[k];
        for i in 0..DIM {
            for j in 0..DIM {
                // The outer product u u† is formed before the real scaling so
                // that (i,j) and (j,i) stay exact conjugates bit for bit.
                let term = (basis.get(i, k) * basis.get(j, k).conj()) * w;
                matrix.set(i, j, matrix.get(i, j) + term);
            }
        }
    }
    DensityMatrix::from_valid(matrix)
}

/// One draw from the product measure over all (pure and mixed) states.
///
/// The simplex point is drawn before the unitary; conditioned sampling relies
/// on that order to pre-screen spectra cheaply.
pub fn sample_mixed(rng: &mut RngStream) -> DensityMatrix {
    let weights = uniform_simplex(rng);
    let basis = haar_unitary(rng);
    assemble_mixed(weights, basis)
}

/// One Fubini-Study draw: a normalized complex Gaussian 4-vector.
pub fn sample_pure(rng: &mut RngStream) -> PureState {
    let amplitudes = [
        complex_gaussian(rng),
        complex_gaussian(rng),
        complex_gaussian(rng),
        complex_gaussian(rng),
    ];
    PureState::normalized(amplitudes).expect("Gaussian vector has positive norm")
}

/// A draw from `ensemble`, returned as a density matrix either way.
pub fn sample_state(rng: &mut RngStream, ensemble: Ensemble) -> DensityMatrix {
    match ensemble {
        Ensemble::Pure => DensityMatrix::from_pure(&sample_pure(rng)),
        Ensemble::All => sample_mixed(rng),
    }
}

/// Acceptance window for conditioned sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Band {
    /// Exactly separable: concurrence 0 after clamping. The separable set has
    /// positive measure, so exact conditioning is feasible.
    EntanglementZero,
    /// Entanglement of formation within [lo, hi].
    Entanglement { lo: f64, hi: f64 },
    /// Participation ratio within [lo, hi].
    Participation { lo: f64, hi: f64 },
}

impl Band {
    pub fn entanglement_window(center: f64, half_width: f64) -> Self {
        Band::Entanglement {
            lo: center - half_width,
            hi: center + half_width,
        }
    }

    pub fn participation_window(center: f64, half_width: f64) -> Self {
        Band::Participation {
            lo: center - half_width,
            hi: center + half_width,
        }
    }

    /// Parses "E=0", "E in [a,b]" or "R in [a,b]".
    pub fn parse(input: &str) -> Result<Self, String> {
        let s = input.trim();
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.eq_ignore_ascii_case("e=0") {
            return Ok(Band::EntanglementZero);
        }
        let lower = compact.to_ascii_lowercase();
        for (prefix, participation) in [("ein[", false), ("rin[", true)] {
            if let Some(rest) = lower.strip_prefix(prefix) {
                let body = rest
                    .strip_suffix(']')
                    .ok_or_else(|| format!("band {s:?} is missing the closing bracket"))?;
                let mut parts = body.splitn(2, ',');
                let lo = parts
                    .next()
                    .and_then(|t| t.parse::<f64>().ok())
                    .ok_or_else(|| format!("band {s:?} has a bad lower bound"))?;
                let hi = parts
                    .next()
                    .and_then(|t| t.parse::<f64>().ok())
                    .ok_or_else(|| format!("band {s:?} has a bad upper bound"))?;
                if !(lo <= hi) {
                    return Err(format!("band {s:?} has lo > hi"));
                }
                return Ok(if participation {
                    Band::Participation { lo, hi }
                } else {
                    Band::Entanglement { lo, hi }
                });
            }
        }
        Err(format!(
            "bad band {s:?}; expected \"E=0\", \"E in [a,b]\" or \"R in [a,b]\""
        ))
    }

    /// Whether a state satisfies this band.
    pub fn matches(&self, rho: &DensityMatrix) -> bool {
        match *self {
            Band::EntanglementZero => concurrence(rho).value() == 0.0,
            Band::Entanglement { lo, hi } => {
                let e = entanglement_of_formation(rho).value();
                lo <= e && e <= hi
            }
            Band::Participation { lo, hi } => {
                let r = participation_ratio(rho);
                lo <= r && r <= hi
            }
        }
    }

    /// Filename-friendly tag, e.g. "e0", "e_0p095_0p105", "r_1p39_1p41".
    pub fn slug(&self) -> String {
        fn num(x: f64) -> String {
            format!("{x:.3}").replace('-', "m").replace('.', "p")
        }
        match *self {
            Band::EntanglementZero => "e0".into(),
            Band::Entanglement { lo, hi } => format!("e_{}_{}", num(lo), num(hi)),
            Band::Participation { lo, hi } => format!("r_{}_{}", num(lo), num(hi)),
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Band::EntanglementZero => write!(f, "E=0"),
            Band::Entanglement { lo, hi } => write!(f, "E in [{lo},{hi}]"),
            Band::Participation { lo, hi } => write!(f, "R in [{lo},{hi}]"),
        }
    }
}

/// Rejection sampling from the unconditioned ensemble until `band` holds.
///
/// Participation bands on the all-states ensemble are pre-screened on the
/// eigenvalue simplex before the Haar unitary is drawn; the final verdict is
/// always evaluated on the assembled state.
pub fn sample_conditioned(
    rng: &mut RngStream,
    ensemble: Ensemble,
    band: &Band,
    budget: u64,
) -> Result<DensityMatrix, SampleError> {
    for _ in 0..budget {
        let rho = match (ensemble, band) {
            (Ensemble::All, Band::Participation { lo, hi }) => {
                let weights = uniform_simplex(rng);
                let r = weights.participation_ratio();
                if r < lo - 1e-9 || r > hi + 1e-9 {
                    continue;
                }
                assemble_mixed(weights, haar_unitary(rng))
            }
            _ => sample_state(rng, ensemble),
        };
        if band.matches(&rho) {
            return Ok(rho);
        }
    }
    Err(SampleError::RejectionBudgetExceeded {
        attempts: budget,
        band: band.to_string(),
    })
}
