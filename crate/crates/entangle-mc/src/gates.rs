//! Two-qubit gates and their action on states.
//!
//! Both gate families are block diagonal in the fixed basis: the upper 2x2
//! block is the identity, the lower block is NOT for the controlled-NOT gate
//! and a plane rotation for the θ family. The first qubit is the control.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::matrix::{Matrix4, DIM};
use crate::measures::{entanglement_of_formation, EntanglementValue};
use crate::state::{DensityMatrix, PureState};

/// Max entrywise deviation from U U† = I accepted at construction.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum GateError {
    #[error("matrix is not unitary (max |UU† - I| entry = {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("unknown gate {input:?}; expected \"cnot\", \"identity\" or \"theta:<angle>\"")]
    UnknownGate { input: String },
    #[error("bad angle {input:?}; expected radians or a rational multiple of pi like \"pi/4\"")]
    BadAngle { input: String },
}

/// Symbolic tag carried alongside the gate matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateLabel {
    Identity,
    Cnot,
    Theta(f64),
    Custom,
}

impl fmt::Display for GateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateLabel::Identity => write!(f, "identity"),
            GateLabel::Cnot => write!(f, "cnot"),
            GateLabel::Theta(t) => write!(f, "theta:{t}"),
            GateLabel::Custom => write!(f, "custom"),
        }
    }
}

/// A unitary acting on the two-qubit state space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    matrix: Matrix4,
    label: GateLabel,
}

/// Change of entanglement produced by one gate application, with both
/// endpoints kept so conditional statistics need no recomputation.
#[derive(Debug, Clone, Copy)]
pub struct DeltaE {
    pub e_initial: EntanglementValue,
    pub e_final: EntanglementValue,
    pub delta: f64,
}

impl Gate {
    pub fn identity() -> Self {
        Self {
            matrix: Matrix4::identity(),
            label: GateLabel::Identity,
        }
    }

    /// Controlled-NOT: |e₁⟩|e₂⟩ -> |e₁⟩|e₁ ⊕ e₂⟩.
    pub fn cnot() -> Self {
        let mut m = Matrix4::identity();
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        m.set(2, 2, o);
        m.set(3, 3, o);
        m.set(2, 3, l);
        m.set(3, 2, l);
        Self {
            matrix: m,
            label: GateLabel::Cnot,
        }
    }

    /// Rotation-block gate: lower block (cos θ, sin θ; -sin θ, cos θ).
    pub fn u_theta(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let mut m = Matrix4::identity();
        m.set(2, 2, Complex64::new(c, 0.0));
        m.set(2, 3, Complex64::new(s, 0.0));
        m.set(3, 2, Complex64::new(-s, 0.0));
        m.set(3, 3, Complex64::new(c, 0.0));
        Self {
            matrix: m,
            label: GateLabel::Theta(theta),
        }
    }

    /// Wraps an arbitrary matrix after checking unitarity.
    pub fn custom(matrix: Matrix4) -> Result<Self, GateError> {
        let deviation = (&matrix * &matrix.adjoint()).max_abs_diff(&Matrix4::identity());
        if deviation > UNITARITY_TOL {
            return Err(GateError::NotUnitary { deviation });
        }
        Ok(Self {
            matrix,
            label: GateLabel::Custom,
        })
    }

    pub fn matrix(&self) -> &Matrix4 {
        &self.matrix
    }

    pub fn label(&self) -> GateLabel {
        self.label
    }

    /// Filename-friendly tag: "cnot", "identity", "theta_0p7854".
    pub fn slug(&self) -> String {
        match self.label {
            GateLabel::Identity => "identity".into(),
            GateLabel::Cnot => "cnot".into(),
            GateLabel::Custom => "custom".into(),
            GateLabel::Theta(t) => {
                format!("theta_{:.4}", t).replace('-', "m").replace('.', "p")
            }
        }
    }

    /// ρ' = U ρ U†.
    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        let u = &self.matrix;
        let rotated = &(u * rho.matrix()) * &u.adjoint();
        DensityMatrix::from_valid(rotated.hermitized())
    }

    /// |ψ'⟩ = U |ψ⟩.
    pub fn apply_to_pure(&self, psi: &PureState) -> PureState {
        let a = psi.amplitudes();
        let mut out = [Complex64::new(0.0, 0.0); DIM];
        for (i, slot) in out.iter_mut().enumerate() {
            for (j, amp) in a.iter().enumerate() {
                *slot += self.matrix.get(i, j) * amp;
            }
        }
        PureState::new(out).expect("unitaries preserve the norm")
    }

    /// Entanglement of formation before and after this gate.
    pub fn delta_e(&self, rho: &DensityMatrix) -> DeltaE {
        let e_initial = entanglement_of_formation(rho);
        let e_final = entanglement_of_formation(&self.apply(rho));
        DeltaE {
            e_initial,
            e_final,
            delta: e_final.value() - e_initial.value(),
        }
    }
}

/// Parses the gate grammar used by the CLI and config files:
/// "cnot", "identity", or "theta:<angle>" where the angle is plain radians
/// or a rational multiple of pi such as "pi", "-pi/2", "3pi/4", "0.5pi".
pub fn parse_gate(input: &str) -> Result<Gate, GateError> {
    let s = input.trim();
    match s.to_ascii_lowercase().as_str() {
        "cnot" => return Ok(Gate::cnot()),
        "identity" | "id" => return Ok(Gate::identity()),
        _ => {}
    }
    if let Some(angle_str) = s.strip_prefix("theta:") {
        let theta = parse_angle(angle_str).ok_or_else(|| GateError::BadAngle {
            input: angle_str.to_string(),
        })?;
        return Ok(Gate::u_theta(theta));
    }
    Err(GateError::UnknownGate {
        input: s.to_string(),
    })
}

fn parse_angle(input: &str) -> Option<f64> {
    let s = input.trim().to_ascii_lowercase();
    if s.is_empty() {
        return None;
    }
    if let Some(pos) = s.find("pi") {
        let (head, tail) = (&s[..pos], &s[pos + 2..]);
        let coefficient = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse::<f64>().ok()?,
        };
        let denominator = match tail.strip_prefix('/') {
            None if tail.is_empty() => 1.0,
            None => return None,
            Some(d) => {
                let d = d.parse::<f64>().ok()?;
                if d == 0.0 {
                    return None;
                }
                d
            }
        };
        let theta = coefficient * PI / denominator;
        return theta.is_finite().then_some(theta);
    }
    s.parse::<f64>().ok().filter(|t| t.is_finite())
}
