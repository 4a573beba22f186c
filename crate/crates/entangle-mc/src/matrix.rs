//! Fixed-dimension complex matrix kernel.
//!
//! Every state, gate and measure in this crate lives in a four-dimensional
//! Hilbert space, so the linear algebra is specialized to 4x4 matrices of
//! `Complex64`. The Hermitian eigensolver is a cyclic Jacobi iteration, which
//! at this size is fast, branch-light and accurate to round-off.

use std::ops::{Add, Index, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Dimension of the two-qubit Hilbert space.
pub const DIM: usize = 4;

/// Max entrywise deviation from `h == adjoint(h)` accepted as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Eigenvalues of a nominally PSD matrix above this floor are clamped to zero.
pub const PSD_CLAMP_FLOOR: f64 = -1e-10;

/// Eigenvalues below this make a nominally PSD input a hard error.
pub const PSD_HARD_FLOOR: f64 = -1e-8;

// Convergence threshold on the Frobenius norm of the off-diagonal part.
const JACOBI_OFF_NORM_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 40;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("matrix is not Hermitian (max |h - h†| entry = {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue = {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
}

/// Dense 4x4 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix4 {
    entries: [[Complex64; DIM]; DIM],
}

impl Matrix4 {
    pub fn zero() -> Self {
        Self {
            entries: [[Complex64::new(0.0, 0.0); DIM]; DIM],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..DIM {
            m.entries[i][i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: [[Complex64; DIM]; DIM]) -> Self {
        Self { entries: rows }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                m.entries[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn diag_real(d: [f64; DIM]) -> Self {
        Self::from_fn(|i, j| {
            if i == j {
                Complex64::new(d[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i][j] = v;
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.entries[j][i].conj())
    }

    pub fn conjugate(&self) -> Self {
        Self::from_fn(|i, j| self.entries[i][j].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.entries[j][i])
    }

    pub fn trace(&self) -> Complex64 {
        (0..DIM).map(|i| self.entries[i][i]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_fn(|i, j| self.entries[i][j] * s)
    }

    /// Sum of |m_ij|^2. For Hermitian m this equals trace(m^2).
    pub fn frobenius_sq(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// Max entrywise deviation from the adjoint; zero for exactly Hermitian input.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                let d = (self.entries[i][j] - self.entries[j][i].conj()).norm();
                dev = dev.max(d);
            }
        }
        dev
    }

    /// Average with the adjoint; the result is Hermitian to the last bit.
    pub fn hermitized(&self) -> Self {
        Self::from_fn(|i, j| (self.entries[i][j] + self.entries[j][i].conj()) * 0.5)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                dev = dev.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        dev
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for Matrix4 {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i][j]
    }
}

impl Mul for &Matrix4 {
    type Output = Matrix4;

    fn mul(self, rhs: &Matrix4) -> Matrix4 {
        let mut out = Matrix4::zero();
        for i in 0..DIM {
            for k in 0..DIM {
                let a = self.entries[i][k];
                for j in 0..DIM {
                    out.entries[i][j] += a * rhs.entries[k][j];
                }
            }
        }
        out
    }
}

impl Mul for Matrix4 {
    type Output = Matrix4;

    fn mul(self, rhs: Matrix4) -> Matrix4 {
        &self * &rhs
    }
}

impl Add for &Matrix4 {
    type Output = Matrix4;

    fn add(self, rhs: &Matrix4) -> Matrix4 {
        Matrix4::from_fn(|i, j| self.entries[i][j] + rhs.entries[i][j])
    }
}

impl Sub for &Matrix4 {
    type Output = Matrix4;

    fn sub(self, rhs: &Matrix4) -> Matrix4 {
        Matrix4::from_fn(|i, j| self.entries[i][j] - rhs.entries[i][j])
    }
}

/// Kronecker product of two 2x2 blocks, in the |00>, |01>, |10>, |11> ordering.
pub fn kron2(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> Matrix4 {
    Matrix4::from_fn(|i, j| a[i / 2][j / 2] * b[i % 2][j % 2])
}

/// Matrix product as a named operation.
pub fn matmul(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    a * b
}

/// Eigendecomposition of a Hermitian 4x4 matrix.
///
/// Eigenvalues are sorted in decreasing order; `eigenvectors` holds the
/// matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum4 {
    eigenvalues: [f64; DIM],
    eigenvectors: Matrix4,
}

impl Spectrum4 {
    pub fn eigenvalues(&self) -> [f64; DIM] {
        self.eigenvalues
    }

    /// Eigenvalues with round-off negatives (above the PSD floor) set to zero.
    pub fn eigenvalues_clamped(&self) -> [f64; DIM] {
        let mut ev = self.eigenvalues;
        for e in &mut ev {
            if *e < 0.0 {
                *e = 0.0;
            }
        }
        ev
    }

    pub fn eigenvectors(&self) -> &Matrix4 {
        &self.eigenvectors
    }

    /// Rebuild V Λ V†.
    pub fn reconstruct(&self) -> Matrix4 {
        self.apply_fn(|x| x)
    }

    /// V f(Λ) V† for a real function of the eigenvalues.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> Matrix4 {
        let v = &self.eigenvectors;
        let mut out = Matrix4::zero();
        for k in 0..DIM {
            let fk = f(self.eigenvalues[k]);
            if fk == 0.0 {
                continue;
            }
            for i in 0..DIM {
                let vik = v.get(i, k) * fk;
                for j in 0..DIM {
                    let t = vik * v.get(j, k).conj();
                    out.set(i, j, out.get(i, j) + t);
                }
            }
        }
        out
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[DIM - 1]
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Fails with `NotHermitian` when the input deviates from its adjoint by more
/// than [`HERMITICITY_TOL`]; the iteration itself runs on the exactly
/// Hermitized input.
pub fn hermitian_eigen(h: &Matrix4) -> Result<Spectrum4, MatrixError> {
    let deviation = h.hermiticity_deviation();
    if deviation > HERMITICITY_TOL {
        return Err(MatrixError::NotHermitian { deviation });
    }
    let mut a = h.hermitized();
    let mut v = Matrix4::identity();

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off_sq = 0.0;
        for i in 0..DIM {
            for j in (i + 1)..DIM {
                off_sq += a.get(i, j).norm_sqr();
            }
        }
        if (2.0 * off_sq).sqrt() < JACOBI_OFF_NORM_TOL {
            break;
        }
        for p in 0..DIM - 1 {
            for q in (p + 1)..DIM {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut pairs: [(f64, usize); DIM] = [(0.0, 0); DIM];
    for (k, pair) in pairs.iter_mut().enumerate() {
        *pair = (a.get(k, k).re, k);
    }
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).expect("finite eigenvalues"));

    let mut eigenvalues = [0.0; DIM];
    let mut eigenvectors = Matrix4::zero();
    for (slot, (val, col)) in pairs.iter().enumerate() {
        eigenvalues[slot] = *val;
        for i in 0..DIM {
            eigenvectors.set(i, slot, v.get(i, *col));
        }
    }

    Ok(Spectrum4 {
        eigenvalues,
        eigenvectors,
    })
}

// One complex Jacobi rotation zeroing the (p, q) entry of the Hermitian
// working matrix `a`, accumulated into `v`.
//
// The pivot is factored as a_pq = r e^{iφ}; the phase is absorbed into the
// q-column so the remaining 2x2 problem is real symmetric, then the classic
// tangent-based rotation applies.
fn jacobi_rotate(a: &mut Matrix4, v: &mut Matrix4, p: usize, q: usize) {
    let apq = a.get(p, q);
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;

    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Column rotation R: R[p][p] = c, R[p][q] = s,
    // R[q][p] = -s conj(phase)... with the phase folded into column q.
    let sp = phase.conj() * s; // s e^{-iφ}
    let cp = phase.conj() * c; // c e^{-iφ}

    // a <- a R
    for k in 0..DIM {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * c - akq * sp);
        a.set(k, q, akp * s + akq * cp);
    }
    // a <- R† a
    for k in 0..DIM {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, apk * c - aqk * sp.conj());
        a.set(q, k, apk * s + aqk * cp.conj());
    }
    // v <- v R
    for k in 0..DIM {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * c - vkq * sp);
        v.set(k, q, vkp * s + vkq * cp);
    }

    // The pivot is zero analytically; force it to keep the off-norm honest.
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    let dpp = a.get(p, p);
    let dqq = a.get(q, q);
    a.set(p, p, Complex64::new(dpp.re, 0.0));
    a.set(q, q, Complex64::new(dqq.re, 0.0));
}

/// Hermitian square root of a PSD matrix.
///
/// Round-off negatives above [`PSD_HARD_FLOOR`] are clamped to zero before
/// the square root; anything below is a `NotPsd` error.
pub fn psd_sqrt(p: &Matrix4) -> Result<Matrix4, MatrixError> {
    let spectrum = hermitian_eigen(p)?;
    let min = spectrum.min_eigenvalue();
    if min < PSD_HARD_FLOOR {
        return Err(MatrixError::NotPsd {
            min_eigenvalue: min,
        });
    }
    let root = spectrum.apply_fn(|x| if x > 0.0 { x.sqrt() } else { 0.0 });
    Ok(root.hermitized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sigma_y() -> [[Complex64; 2]; 2] {
        [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]
    }

    fn cnot_matrix() -> Matrix4 {
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        Matrix4::from_rows([[l, o, o, o], [o, l, o, o], [o, o, o, l], [o, o, l, o]])
    }

    fn random_hermitian(rng: &mut StdRng) -> Matrix4 {
        let g = Matrix4::from_fn(|_, _| {
            c(
                StandardNormal.sample(rng),
                StandardNormal.sample(rng),
            )
        });
        g.hermitized()
    }

    fn random_psd(rng: &mut StdRng) -> Matrix4 {
        let g = Matrix4::from_fn(|_, _| {
            c(
                StandardNormal.sample(rng),
                StandardNormal.sample(rng),
            )
        });
        let p = &g * &g.adjoint();
        let t = p.trace().re;
        p.scale(1.0 / t)
    }

    #[test]
    fn matmul_identity_cases() {
        let i = Matrix4::identity();
        assert_eq!(&i * &i, i);

        let yy = kron2(&sigma_y(), &sigma_y());
        assert!((&yy * &yy).max_abs_diff(&i) < 1e-15);

        let cnot = cnot_matrix();
        assert!((&cnot * &cnot).max_abs_diff(&i) < 1e-15);
    }

    #[test]
    fn adjoint_cases() {
        let i = Matrix4::identity();
        assert_eq!(i.adjoint(), i);

        let d = Matrix4::from_fn(|i, j| match (i, j) {
            (0, 0) => c(0.0, 1.0),
            (1, 1) => c(0.0, -1.0),
            (2, 2) | (3, 3) => c(1.0, 0.0),
            _ => c(0.0, 0.0),
        });
        let da = d.adjoint();
        assert_eq!(da.get(0, 0), c(0.0, -1.0));
        assert_eq!(da.get(1, 1), c(0.0, 1.0));
        assert_eq!(da.get(2, 2), c(1.0, 0.0));

        let mut rng = StdRng::seed_from_u64(11);
        let h = random_hermitian(&mut rng);
        assert!(h.adjoint().max_abs_diff(&h) < 1e-15);
        assert_eq!(h.adjoint().adjoint(), h);
    }

    #[test]
    fn eigen_diagonal_and_projector() {
        let d = Matrix4::diag_real([0.4, 0.3, 0.2, 0.1]);
        let s = hermitian_eigen(&d).unwrap();
        assert_eq!(s.eigenvalues(), [0.4, 0.3, 0.2, 0.1]);

        let quarter = Matrix4::identity().scale(0.25);
        let s = hermitian_eigen(&quarter).unwrap();
        for e in s.eigenvalues() {
            assert!((e - 0.25).abs() < 1e-14);
        }

        // Bell projector (|00> + |11>)/sqrt(2): rank one.
        let mut bell = Matrix4::zero();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell.set(i, j, c(0.5, 0.0));
        }
        let s = hermitian_eigen(&bell).unwrap();
        let ev = s.eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-12);
        for e in &ev[1..] {
            assert!(e.abs() < 1e-12);
        }
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let mut m = Matrix4::identity();
        m.set(0, 1, c(0.5, 0.0));
        assert!(matches!(
            hermitian_eigen(&m),
            Err(MatrixError::NotHermitian { .. })
        ));
    }

    #[test]
    fn eigen_reconstruction_and_ordering() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..1000 {
            let h = random_hermitian(&mut rng);
            let s = hermitian_eigen(&h).unwrap();
            assert!(s.reconstruct().max_abs_diff(&h) < 1e-9);
            let ev = s.eigenvalues();
            for k in 0..DIM - 1 {
                assert!(ev[k] >= ev[k + 1]);
            }
            let trace_sum: f64 = ev.iter().sum();
            assert!((trace_sum - h.trace().re).abs() < 1e-9);
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let h = random_hermitian(&mut rng);
            let v = *hermitian_eigen(&h).unwrap().eigenvectors();
            let gram = &v.adjoint() * &v;
            assert!(gram.max_abs_diff(&Matrix4::identity()) < 1e-10);
        }
    }

    #[test]
    fn eigenvalues_match_reference_solver() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..200 {
            let h = random_hermitian(&mut rng);
            let na = nalgebra::Matrix4::from_fn(|i, j| h.get(i, j));
            let mut reference: Vec<f64> = nalgebra::SymmetricEigen::new(na)
                .eigenvalues
                .iter()
                .copied()
                .collect();
            reference.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let ours = hermitian_eigen(&h).unwrap().eigenvalues();
            for (a, b) in ours.iter().zip(reference.iter()) {
                assert!((a - b).abs() < 1e-9, "ours {a} vs reference {b}");
            }
        }
    }

    #[test]
    fn psd_sqrt_diagonal_cases() {
        let i = Matrix4::identity();
        assert!(psd_sqrt(&i).unwrap().max_abs_diff(&i) < 1e-12);

        let p = Matrix4::diag_real([0.8, 0.2, 0.0, 0.0]);
        let r = psd_sqrt(&p).unwrap();
        let expected = Matrix4::diag_real([
            (4.0f64 / 5.0).sqrt(),
            (1.0f64 / 5.0).sqrt(),
            0.0,
            0.0,
        ]);
        assert!(r.max_abs_diff(&expected) < 1e-12);

        // Rank-1 projector is its own square root.
        let mut proj = Matrix4::zero();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            proj.set(i, j, c(0.5, 0.0));
        }
        assert!(psd_sqrt(&proj).unwrap().max_abs_diff(&proj) < 1e-10);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..1000 {
            let p = random_psd(&mut rng);
            let r = psd_sqrt(&p).unwrap();
            assert!((&r * &r).max_abs_diff(&p) < 1e-9);
            assert!(r.hermiticity_deviation() < 1e-12);
        }
    }

    #[test]
    fn psd_sqrt_rejects_indefinite() {
        let m = Matrix4::diag_real([0.6, 0.5, -0.1, 0.0]);
        assert!(matches!(psd_sqrt(&m), Err(MatrixError::NotPsd { .. })));
    }
}
