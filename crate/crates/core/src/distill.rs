//! Ancilla preparation from a channel's Choi state.
//!
//! The channel acts on half of `|Φ⟩`, a two-qubit Pauli parity `½(𝕀 ± σ_j⊗σ_k)`
//! is measured and postselected, local Cliffords rotate `σ_j⊗σ_k` to `Z⊗Z`, and
//! a controlled-NOT (control on the untouched qubit) moves the surviving
//! coherence onto that qubit. The second qubit is then discarded.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{partial_trace_second, Channel};
use crate::error::{Error, Result};
use crate::qcore::{hadamard_matrix, kron, phase_matrix, Mat2, Mat4, Pauli, MATRIX_TOL};

/// Probabilities below this make postselection meaningless.
pub const MIN_SUCCESS_PROB: f64 = 1e-12;

/// The postselected outcome `½(𝕀 + sign · σ_j⊗σ_k)`; `j` acts on the untouched qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParityMeasurement {
    pub j: Pauli,
    pub k: Pauli,
    pub sign: i8,
}

impl ParityMeasurement {
    pub fn new(j: Pauli, k: Pauli, sign: i8) -> Result<Self> {
        if j == Pauli::I || k == Pauli::I {
            return Err(Error::IdentityPauli);
        }
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidParameter(format!("sign must be ±1, got {sign}")));
        }
        Ok(Self { j, k, sign })
    }

    /// Even `Z⊗Z` parity.
    pub fn even_zz() -> Self {
        Self {
            j: Pauli::Z,
            k: Pauli::Z,
            sign: 1,
        }
    }

    pub fn opposite(self) -> Self {
        Self {
            sign: -self.sign,
            ..self
        }
    }

    pub fn projector(&self) -> Mat4 {
        let pp = kron(&self.j.matrix(), &self.k.matrix());
        (Mat4::identity() + pp * Complex64::new(self.sign as f64, 0.0)) * Complex64::new(0.5, 0.0)
    }
}

impl fmt::Display for ParityMeasurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign > 0 { '+' } else { '-' };
        write!(f, "½(I {s} {}{})", self.j, self.k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OctahedronPosition {
    Inside,
    Boundary,
    Outside,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AncillaReport {
    pub measurement: ParityMeasurement,
    pub bloch: [f64; 3],
    pub success_prob: f64,
    /// `|x| + |y| + |z| − 1`; positive outside the stabilizer octahedron.
    pub octahedron_margin: f64,
    pub position: OctahedronPosition,
}

/// Position relative to `|x| + |y| + |z| ≤ 1`, with the signed margin.
pub fn octahedron_check(bloch: [f64; 3]) -> (OctahedronPosition, f64) {
    let margin = bloch.iter().map(|x| x.abs()).sum::<f64>() - 1.0;
    let pos = if margin > MATRIX_TOL {
        OctahedronPosition::Outside
    } else if margin < -MATRIX_TOL {
        OctahedronPosition::Inside
    } else {
        OctahedronPosition::Boundary
    };
    (pos, margin)
}

/// Clifford `C` with `C σ C† = Z`.
fn to_z(p: Pauli) -> Mat2 {
    match p {
        Pauli::X => hadamard_matrix(),
        Pauli::Y => hadamard_matrix() * phase_matrix().adjoint(),
        _ => Mat2::identity(),
    }
}

fn cnot() -> Mat4 {
    let one = Complex64::new(1.0, 0.0);
    let mut m = Mat4::zeros();
    m[(0, 0)] = one;
    m[(1, 1)] = one;
    m[(2, 3)] = one;
    m[(3, 2)] = one;
    m
}

pub fn bloch_vector(rho: &Mat2) -> [f64; 3] {
    [Pauli::X, Pauli::Y, Pauli::Z].map(|p| (rho * p.matrix()).trace().re)
}

/// Runs the circuit on an explicit two-qubit state (normally a Choi state).
pub fn prepare_ancilla_from_state(state: &Mat4, m: ParityMeasurement) -> Result<AncillaReport> {
    let pi = m.projector();
    let projected = pi * state * pi;
    let prob = projected.trace().re;
    if !(prob > MIN_SUCCESS_PROB) {
        return Err(Error::ZeroProbability(prob));
    }
    let u = cnot() * kron(&to_z(m.j), &to_z(m.k));
    let decoded = u * projected * u.adjoint() / Complex64::new(prob, 0.0);
    let rho = partial_trace_second(&decoded);
    let bloch = bloch_vector(&rho);
    let (position, octahedron_margin) = octahedron_check(bloch);
    Ok(AncillaReport {
        measurement: m,
        bloch,
        success_prob: prob.min(1.0),
        octahedron_margin,
        position,
    })
}

pub fn prepare_ancilla(channel: &Channel, m: ParityMeasurement) -> Result<AncillaReport> {
    prepare_ancilla_from_state(channel.choi().matrix(), m)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    use super::*;
    use crate::channels::{make_dephased_phase_gate, DephasedPhaseGate};
    use crate::qcore::pauli_matrix;

    fn close(a: [f64; 3], b: [f64; 3]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn conjugations_reach_z() {
        for p in Pauli::NON_IDENTITY {
            let c = to_z(p);
            let image = c * pauli_matrix(p) * c.adjoint();
            assert!(crate::qcore::max_abs_diff(&image, &Pauli::Z.matrix()) < MATRIX_TOL);
        }
    }

    #[test]
    fn identity_channel_gives_plus_state() {
        let r = prepare_ancilla(&Channel::identity(), ParityMeasurement::even_zz()).unwrap();
        assert!((r.success_prob - 1.0).abs() < 1e-12);
        assert!(close(r.bloch, [1.0, 0.0, 0.0]));
        assert_eq!(r.position, OctahedronPosition::Boundary);
        assert!(matches!(
            prepare_ancilla(&Channel::identity(), ParityMeasurement::even_zz().opposite()),
            Err(Error::ZeroProbability(_))
        ));
    }

    #[test]
    fn noiseless_pi_over_eight_gate_gives_h_type_state() {
        let ch = make_dephased_phase_gate(DephasedPhaseGate {
            theta: FRAC_PI_4,
            s: 0.0,
        })
        .unwrap();
        let r = prepare_ancilla(&ch, ParityMeasurement::even_zz()).unwrap();
        assert!(close(r.bloch, [FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]));
        assert!((r.octahedron_margin - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        assert_eq!(r.position, OctahedronPosition::Outside);
    }

    #[test]
    fn totally_depolarizing_channel_is_useless() {
        let r = prepare_ancilla(&Channel::totally_depolarizing(), ParityMeasurement::even_zz())
            .unwrap();
        assert!((r.success_prob - 0.5).abs() < 1e-12);
        assert!(r.bloch[0].abs() < 1e-12 && r.bloch[1].abs() < 1e-12);
        assert!(r.octahedron_margin <= 0.0);
    }

    #[test]
    fn octahedron_examples() {
        assert_eq!(octahedron_check([0.0; 3]), (OctahedronPosition::Inside, -1.0));
        assert_eq!(octahedron_check([1.0, 0.0, 0.0]).0, OctahedronPosition::Boundary);
        let (pos, m) = octahedron_check([FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]);
        assert_eq!(pos, OctahedronPosition::Outside);
        assert!((m - (2f64.sqrt() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn measurement_validation() {
        assert!(matches!(
            ParityMeasurement::new(Pauli::I, Pauli::Z, 1),
            Err(Error::IdentityPauli)
        ));
        assert!(ParityMeasurement::new(Pauli::X, Pauli::Z, 0).is_err());
        let m = ParityMeasurement::new(Pauli::X, Pauli::Y, -1).unwrap();
        let p = m.projector();
        assert!(crate::qcore::max_abs_diff(&(p * p), &p) < MATRIX_TOL);
        assert!((p.trace().re - 2.0).abs() < MATRIX_TOL);
    }
}
