//! Validated two-qubit state types.
//!
//! The basis is fixed once for the whole crate as |00>, |01>, |10>, |11>,
//! first label = first (control) qubit. All matrices in the crate are
//! expressed in this ordering; the gate block structure depends on it.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use thiserror::Error;

use crate::matrix::{hermitian_eigen, Matrix4, Spectrum4, DIM, HERMITICITY_TOL, PSD_CLAMP_FLOOR};

/// Norm tolerance enforced on `PureState` construction.
pub const NORM_TOL: f64 = 1e-12;

/// Trace tolerance enforced on `DensityMatrix` validation.
pub const TRACE_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("state vector is not normalized (|norm² - 1| = {deviation:.3e})")]
    NotNormalized { deviation: f64 },
    #[error("state vector has zero norm")]
    ZeroNorm,
    #[error("invalid state: not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("invalid state: trace = {trace} instead of 1")]
    TraceNotOne { trace: f64 },
    #[error("invalid state: negative eigenvalue {min_eigenvalue:.3e}")]
    NegativeEigenvalue { min_eigenvalue: f64 },
}

/// Normalized pure state, amplitudes in the fixed product-basis order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    amplitudes: [Complex64; DIM],
}

impl PureState {
    /// Wraps amplitudes that are already normalized to [`NORM_TOL`].
    pub fn new(amplitudes: [Complex64; DIM]) -> Result<Self, StateError> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let deviation = (norm_sq - 1.0).abs();
        if deviation > NORM_TOL {
            return Err(StateError::NotNormalized { deviation });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(amplitudes: [Complex64; DIM]) -> Result<Self, StateError> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(StateError::ZeroNorm);
        }
        let inv = 1.0 / norm_sq.sqrt();
        let mut out = amplitudes;
        for a in &mut out {
            *a *= inv;
        }
        Ok(Self { amplitudes: out })
    }

    /// Real-coefficient state from (a, b, c, d); renormalizes.
    pub fn real(coeffs: [f64; DIM]) -> Result<Self, StateError> {
        Self::normalized(coeffs.map(|x| Complex64::new(x, 0.0)))
    }

    /// Computational basis state |index> for index in 0..4.
    pub fn basis(index: usize) -> Self {
        let mut amplitudes = [Complex64::new(0.0, 0.0); DIM];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64; DIM] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Validated density matrix: Hermitian, unit trace, PSD within tolerance.
///
/// The spectrum is computed lazily on first use and cached; states are
/// immutable after construction, so the cache never invalidates.
pub struct DensityMatrix {
    matrix: Matrix4,
    spectrum: OnceLock<Spectrum4>,
}

impl Clone for DensityMatrix {
    fn clone(&self) -> Self {
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(*s);
        }
        Self {
            matrix: self.matrix,
            spectrum,
        }
    }
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityMatrix")
            .field("matrix", &self.matrix)
            .finish()
    }
}

impl PartialEq for DensityMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl DensityMatrix {
    /// Validates a raw matrix against the Hermiticity, trace and PSD
    /// invariants; the spectrum computed for the PSD check is cached.
    pub fn validate(matrix: Matrix4) -> Result<Self, StateError> {
        let deviation = matrix.hermiticity_deviation();
        if deviation > HERMITICITY_TOL {
            return Err(StateError::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(StateError::TraceNotOne { trace: trace.re });
        }
        let spectrum =
            hermitian_eigen(&matrix).expect("hermiticity was checked above");
        let min = spectrum.min_eigenvalue();
        if min < PSD_CLAMP_FLOOR {
            return Err(StateError::NegativeEigenvalue {
                min_eigenvalue: min,
            });
        }
        let cell = OnceLock::new();
        let _ = cell.set(spectrum);
        Ok(Self {
            matrix,
            spectrum: cell,
        })
    }

    /// Rank-1 projector |psi><psi|.
    pub fn from_pure(psi: &PureState) -> Self {
        let a = psi.amplitudes();
        let matrix = Matrix4::from_fn(|i, j| a[i] * a[j].conj());
        Self::from_valid(matrix)
    }

    // Constructor for matrices valid by construction (unitary conjugation,
    // outer products of normalized vectors, spectral assembly).
    pub(crate) fn from_valid(matrix: Matrix4) -> Self {
        debug_assert!(matrix.hermiticity_deviation() <= HERMITICITY_TOL);
        debug_assert!((matrix.trace().re - 1.0).abs() <= TRACE_TOL);
        Self {
            matrix,
            spectrum: OnceLock::new(),
        }
    }

    pub fn matrix(&self) -> &Matrix4 {
        &self.matrix
    }

    pub fn spectrum(&self) -> &Spectrum4 {
        self.spectrum.get_or_init(|| {
            hermitian_eigen(&self.matrix)
                .expect("density matrix invariant guarantees Hermiticity")
        })
    }

    /// Eigenvalues with round-off negatives clamped to zero.
    pub fn eigenvalues(&self) -> [f64; DIM] {
        self.spectrum().eigenvalues_clamped()
    }

    /// Hermitian square root, built from the cached spectrum.
    pub fn sqrt_matrix(&self) -> Matrix4 {
        self.spectrum()
            .apply_fn(|x| if x > 0.0 { x.sqrt() } else { 0.0 })
    }

    /// Tr ρ², evaluated entrywise (exact for Hermitian input).
    pub fn purity(&self) -> f64 {
        self.matrix.frobenius_sq()
    }

    /// Transpose of the second qubit's indices:
    /// entry ((i,j),(k,l)) -> ((i,l),(k,j)).
    ///
    /// The result stays Hermitian with unit trace but need not be PSD, so it
    /// is returned as a raw matrix.
    pub fn partial_transpose(&self) -> Matrix4 {
        partial_transpose_matrix(&self.matrix)
    }

    /// One-line serialization: 32 comma-separated floats, the re,im pairs of
    /// the 16 entries in row-major order.
    pub fn to_line(&self) -> String {
        let mut fields = Vec::with_capacity(2 * DIM * DIM);
        for i in 0..DIM {
            for j in 0..DIM {
                let z = self.matrix.get(i, j);
                fields.push(format!("{}", z.re));
                fields.push(format!("{}", z.im));
            }
        }
        fields.join(",")
    }
}

/// The second-qubit transpose as a pure index permutation on a raw matrix.
pub fn partial_transpose_matrix(m: &Matrix4) -> Matrix4 {
    Matrix4::from_fn(|row, col| {
        let (i, j) = (row / 2, row % 2);
        let (k, l) = (col / 2, col % 2);
        m.get(2 * i + l, 2 * k + j)
    })
}

/// Location of the first bad token in a state file.
#[derive(Debug, Error)]
#[error("{message} at line {line}, column {column}")]
pub struct StateParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Parses the one-line state serialization out of a text blob.
///
/// Blank lines and `#` comment lines are skipped; exactly one content line is
/// expected, carrying 32 comma-separated floats (16 re,im pairs, row-major).
/// Returns the raw matrix; validation is the caller's decision.
pub fn parse_state_text(text: &str) -> Result<Matrix4, StateParseError> {
    let mut content: Option<(usize, &str)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if content.is_some() {
            return Err(StateParseError {
                line: idx + 1,
                column: 1,
                message: "unexpected extra content line".into(),
            });
        }
        content = Some((idx + 1, raw));
    }
    let (line_no, line) = content.ok_or(StateParseError {
        line: 1,
        column: 1,
        message: "no state line found".into(),
    })?;

    let mut values = [0.0f64; 2 * DIM * DIM];
    let mut count = 0usize;
    let mut column = 1usize;
    for token in line.split(',') {
        if count >= values.len() {
            return Err(StateParseError {
                line: line_no,
                column,
                message: format!("expected {} fields, found more", values.len()),
            });
        }
        match token.trim().parse::<f64>() {
            Ok(v) => values[count] = v,
            Err(_) => {
                return Err(StateParseError {
                    line: line_no,
                    column,
                    message: format!("bad float {:?}", token.trim()),
                });
            }
        }
        count += 1;
        column += token.len() + 1;
    }
    if count < values.len() {
        return Err(StateParseError {
            line: line_no,
            column,
            message: format!("expected {} fields, found {count}", values.len()),
        });
    }

    Ok(Matrix4::from_fn(|i, j| {
        let k = 2 * (DIM * i + j);
        Complex64::new(values[k], values[k + 1])
    }))
}
