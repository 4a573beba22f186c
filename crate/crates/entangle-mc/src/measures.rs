//! Scalar functionals of a two-qubit state.
//!
//! Concurrence follows the spin-flip construction: with
//! ρ̃ = (σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y), the quantities λ_i are the square roots,
//! in decreasing order, of the eigenvalues of ρρ̃, and
//! C = max(0, λ₁ − λ₂ − λ₃ − λ₄). The matrix ρρ̃ is not Hermitian, so we
//! diagonalize the Hermitian PSD matrix M = √ρ ρ̃ √ρ instead; it shares the
//! nonzero spectrum of ρρ̃ and keeps the whole pipeline on the same Jacobi
//! kernel.
//!
//! Entanglement of formation is E = h((1 + √(1 − C²))/2) with h the binary
//! entropy in bits; the von Neumann entropy is reported in nats.

use thiserror::Error;

use crate::matrix::{hermitian_eigen, Matrix4, DIM, PSD_CLAMP_FLOOR};
use crate::state::DensityMatrix;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("argument {value} is outside [0, 1]")]
    OutsideUnitInterval { value: f64 },
    #[error("moment order must be positive, got {q}")]
    NonPositiveOrder { q: f64 },
}

/// An entanglement-valued scalar, clamped to [0, 1] at round-off boundaries.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EntanglementValue(f64);

impl EntanglementValue {
    pub fn new_clamped(raw: f64) -> Self {
        Self(raw.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

// Sign pattern of σ_y ⊗ σ_y along the anti-diagonal.
const FLIP_SIGN: [f64; DIM] = [-1.0, 1.0, 1.0, -1.0];

/// Spin-flipped matrix ρ̃ = (σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y), taken in the fixed
/// product basis.
///
/// Componentwise this is ρ̃_ij = s_i s_j conj(ρ_{3-i,3-j}) with
/// s = (-1, 1, 1, -1), which avoids two matrix products per call.
pub fn spin_flip(rho: &DensityMatrix) -> Matrix4 {
    let m = rho.matrix();
    Matrix4::from_fn(|i, j| m.get(DIM - 1 - i, DIM - 1 - j).conj() * (FLIP_SIGN[i] * FLIP_SIGN[j]))
}

// Eigenvalues of M below this fraction of the leading one are round-off in
// the null space. Taking their square roots would inject ~sqrt(eps) ≈ 1e-8
// of noise into C, so they are zeroed first.
const NULL_SPACE_REL_CLAMP: f64 = 1e-13;

/// Wootters concurrence C ∈ [0, 1].
///
/// Panics if the auxiliary matrix M = √ρ ρ̃ √ρ develops an eigenvalue below
/// the PSD floor; that indicates an invalid state escaped validation, not
/// data noise.
pub fn concurrence(rho: &DensityMatrix) -> EntanglementValue {
    let root = rho.sqrt_matrix();
    let flipped = spin_flip(rho);
    let m = &(&root * &flipped) * &root;
    let spectrum = hermitian_eigen(&m)
        .expect("M = sqrt(rho) rho~ sqrt(rho) is Hermitian by construction");

    let eigenvalues = spectrum.eigenvalues();
    let floor = eigenvalues[0].max(0.0) * NULL_SPACE_REL_CLAMP;
    let mut lambdas = [0.0f64; DIM];
    for (slot, &ev) in eigenvalues.iter().enumerate() {
        assert!(
            ev >= PSD_CLAMP_FLOOR,
            "internal invariant violation: concurrence auxiliary eigenvalue {ev:e}"
        );
        lambdas[slot] = if ev <= floor { 0.0 } else { ev.sqrt() };
    }
    // Already in decreasing order.
    let c = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    EntanglementValue::new_clamped(c)
}

/// Binary entropy h(x) = -x log₂ x - (1-x) log₂ (1-x), with 0 log 0 = 0.
pub fn binary_entropy(x: f64) -> Result<f64, MeasureError> {
    if !(-1e-12..=1.0 + 1e-12).contains(&x) {
        return Err(MeasureError::OutsideUnitInterval { value: x });
    }
    Ok(binary_entropy_unchecked(x.clamp(0.0, 1.0)))
}

fn binary_entropy_unchecked(x: f64) -> f64 {
    let mut h = 0.0;
    if x > 0.0 {
        h -= x * x.log2();
    }
    if x < 1.0 {
        h -= (1.0 - x) * (1.0 - x).log2();
    }
    h
}

/// Entanglement of formation as a function of concurrence alone.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    let x = (1.0 + (1.0 - c * c).max(0.0).sqrt()) / 2.0;
    binary_entropy_unchecked(x).clamp(0.0, 1.0)
}

/// Entanglement of formation E[ρ] ∈ [0, 1], in ebits.
pub fn entanglement_of_formation(rho: &DensityMatrix) -> EntanglementValue {
    EntanglementValue::new_clamped(eof_from_concurrence(concurrence(rho).value()))
}

/// Participation ratio R = 1 / Tr ρ²; 1 for pure states, 4 for I/4.
pub fn participation_ratio(rho: &DensityMatrix) -> f64 {
    1.0 / rho.purity()
}

/// Von Neumann entropy S₁ = -Tr ρ ln ρ in nats, from the eigenvalue spectrum.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

/// Moment ω_q = Tr ρ^q for q > 0; ω₁ = 1 and ω₂ = 1/R.
pub fn q_moment(rho: &DensityMatrix, q: f64) -> Result<f64, MeasureError> {
    if !(q > 0.0) {
        return Err(MeasureError::NonPositiveOrder { q });
    }
    Ok(rho
        .eigenvalues()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p.powf(q))
        .sum())
}

/// Positivity of the partial transpose; for two qubits this decides
/// separability exactly.
pub fn is_ppt_separable(rho: &DensityMatrix) -> bool {
    let pt = rho.partial_transpose();
    let spectrum = hermitian_eigen(&pt).expect("partial transpose stays Hermitian");
    spectrum.min_eigenvalue() >= PSD_CLAMP_FLOOR
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::kron2;
    use crate::state::PureState;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell() -> DensityMatrix {
        DensityMatrix::from_pure(&PureState::real([1.0, 0.0, 0.0, 1.0]).unwrap())
    }

    fn maximally_mixed() -> DensityMatrix {
        DensityMatrix::validate(Matrix4::identity().scale(0.25)).unwrap()
    }

    // Reference route through the explicit (σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y) product.
    fn spin_flip_by_products(rho: &DensityMatrix) -> Matrix4 {
        let y = [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]];
        let yy = kron2(&y, &y);
        &(&yy * &rho.matrix().conjugate()) * &yy
    }

    #[test]
    fn spin_flip_examples() {
        let mixed = maximally_mixed();
        assert!(spin_flip(&mixed).max_abs_diff(mixed.matrix()) < 1e-15);

        let zero = DensityMatrix::from_pure(&PureState::basis(0));
        let flipped = spin_flip(&zero);
        assert!(flipped.max_abs_diff(&Matrix4::diag_real([0.0, 0.0, 0.0, 1.0])) < 1e-15);

        let bell = bell();
        assert!(spin_flip(&bell).max_abs_diff(bell.matrix()) < 1e-15);
    }

    #[test]
    fn spin_flip_matches_product_construction() {
        let mut rng = crate::sampling::RngStream::new(5, 0);
        for _ in 0..100 {
            let rho = crate::sampling::sample_mixed(&mut rng);
            let fast = spin_flip(&rho);
            let slow = spin_flip_by_products(&rho);
            assert!(fast.max_abs_diff(&slow) < 1e-14);
            assert!((fast.trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn concurrence_of_named_states() {
        assert!((concurrence(&bell()).value() - 1.0).abs() < 1e-10);

        let product = DensityMatrix::from_pure(&PureState::real([1.0, 0.0, 1.0, 0.0]).unwrap());
        assert!(concurrence(&product).value() < 1e-10);

        let balanced = DensityMatrix::from_pure(&PureState::real([0.5, 0.5, 0.5, 0.5]).unwrap());
        assert!(concurrence(&balanced).value() < 1e-10);
    }

    #[test]
    fn concurrence_of_werner_mix() {
        // x Bell + (1 - x) I/4 at x = 1/2 has C = (3x - 1)/2 = 1/4.
        let x = 0.5;
        let m = &bell().matrix().scale(x) + &Matrix4::identity().scale((1.0 - x) * 0.25);
        let rho = DensityMatrix::validate(m).unwrap();
        let ours = concurrence(&rho).value();
        assert!((ours - 0.25).abs() < 1e-10, "got {ours}");

        // Brute-force route: eigenvalues of the non-Hermitian product ρρ̃.
        let prod = rho.matrix() * &spin_flip(&rho);
        let na = nalgebra::Matrix4::from_fn(|i, j| prod.get(i, j));
        let eigs = na.eigenvalues().expect("spectrum exists");
        let mut lambdas: Vec<f64> = eigs
            .iter()
            .map(|z| {
                assert!(z.im.abs() < 1e-9);
                z.re.max(0.0).sqrt()
            })
            .collect();
        lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let reference = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0);
        assert!((ours - reference).abs() < 1e-9);
    }

    #[test]
    fn binary_entropy_edges() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.2).is_err());
    }

    #[test]
    fn formation_from_concurrence() {
        assert!((entanglement_of_formation(&bell()).value() - 1.0).abs() < 1e-10);
        assert!(entanglement_of_formation(&maximally_mixed()).value() < 1e-12);

        // Frozen from a high-precision evaluation of h((1 + sqrt(3)/2)/2).
        let expected = 0.35457890266526987;
        assert!((eof_from_concurrence(0.5) - expected).abs() < 1e-12);
    }

    #[test]
    fn formation_increases_with_concurrence() {
        let mut prev = -1.0;
        for k in 0..=100 {
            let c = k as f64 / 100.0;
            let e = eof_from_concurrence(c);
            assert!(e > prev || (k == 0 && e == 0.0), "not increasing at C = {c}");
            prev = e;
        }
        assert_eq!(eof_from_concurrence(0.0), 0.0);
        assert_eq!(eof_from_concurrence(1.0), 1.0);
    }

    #[test]
    fn participation_ratio_examples() {
        assert!((participation_ratio(&bell()) - 1.0).abs() < 1e-10);
        assert!((participation_ratio(&maximally_mixed()) - 4.0).abs() < 1e-10);
        let half = DensityMatrix::validate(Matrix4::diag_real([0.5, 0.5, 0.0, 0.0])).unwrap();
        assert!((participation_ratio(&half) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_examples() {
        assert!(von_neumann_entropy(&bell()).abs() < 1e-9);
        assert!((von_neumann_entropy(&maximally_mixed()) - 4.0f64.ln()).abs() < 1e-12);
        let half = DensityMatrix::validate(Matrix4::diag_real([0.5, 0.5, 0.0, 0.0])).unwrap();
        assert!((von_neumann_entropy(&half) - 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn q_moment_examples() {
        assert!((q_moment(&maximally_mixed(), 2.0).unwrap() - 0.25).abs() < 1e-12);
        assert!((q_moment(&bell(), 3.7).unwrap() - 1.0).abs() < 1e-9);
        let half = DensityMatrix::validate(Matrix4::diag_real([0.5, 0.5, 0.0, 0.0])).unwrap();
        assert!((q_moment(&half, 3.0).unwrap() - 0.25).abs() < 1e-12);
        assert!(q_moment(&half, 0.0).is_err());
        assert!(q_moment(&half, -1.0).is_err());
    }

    #[test]
    fn ppt_examples() {
        assert!(is_ppt_separable(&maximally_mixed()));
        assert!(!is_ppt_separable(&bell()));
    }

    proptest! {
        #[test]
        fn q2_moment_inverts_participation_ratio(seed in any::<u64>()) {
            let rho = crate::sampling::sample_mixed(
                &mut crate::sampling::RngStream::new(seed, 2),
            );
            let product = q_moment(&rho, 2.0).unwrap() * participation_ratio(&rho);
            prop_assert!((product - 1.0).abs() < 1e-12);
        }

        #[test]
        fn spin_flip_is_an_involution(seed in any::<u64>()) {
            let rho = crate::sampling::sample_mixed(
                &mut crate::sampling::RngStream::new(seed, 3),
            );
            let once = spin_flip(&rho);
            let wrapped = DensityMatrix::from_valid(once);
            let twice = spin_flip(&wrapped);
            prop_assert!(twice.max_abs_diff(rho.matrix()) < 1e-15);
        }
    }
}
