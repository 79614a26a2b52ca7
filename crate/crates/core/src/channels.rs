//! Single-qubit channels in Kraus and Choi form, plus the noisy phase-gate
//! families used throughout the toolkit.

use std::collections::BTreeMap;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{
    self, clifford_by_name, kron, max_abs_diff, min_eigenvalue, phase_gate, phi_plus, projector,
    CgTable, CliffordElement, Mat2, Mat4, Pauli, TwoQubitState, STATE_TOL,
};

/// Eigenvalues of a Choi matrix at or below this are dropped when extracting Kraus operators.
pub const KRAUS_EIGEN_CUTOFF: f64 = 1e-12;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// A completely positive, trace-preserving single-qubit map stored as Kraus operators.
#[derive(Clone, Debug)]
pub struct Channel {
    kraus: Vec<Mat2>,
}

impl Channel {
    pub fn new(kraus: Vec<Mat2>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidParameter(
                "a channel needs at least one Kraus operator".into(),
            ));
        }
        let deviation = trace_preservation_error(&kraus);
        if !(deviation <= STATE_TOL) {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(Self { kraus })
    }

    pub fn identity() -> Self {
        Self {
            kraus: vec![Mat2::identity()],
        }
    }

    pub fn unitary(u: Mat2) -> Result<Self> {
        Self::new(vec![u])
    }

    /// `ρ ↦ 𝕀/2`.
    pub fn totally_depolarizing() -> Self {
        Self {
            kraus: Pauli::ALL.iter().map(|p| p.matrix() * re(0.5)).collect(),
        }
    }

    pub fn kraus(&self) -> &[Mat2] {
        &self.kraus
    }

    /// `U ∘ 𝓔`: the unitary acts after the channel.
    pub fn then_unitary(&self, u: &Mat2) -> Channel {
        Channel {
            kraus: self.kraus.iter().map(|k| u * k).collect(),
        }
    }

    /// `𝓔 ∘ U`: the unitary acts before the channel.
    pub fn after_unitary(&self, u: &Mat2) -> Channel {
        Channel {
            kraus: self.kraus.iter().map(|k| k * u).collect(),
        }
    }

    pub fn choi(&self) -> ChoiState {
        ChoiState {
            state: TwoQubitState::new(choi_matrix(&self.kraus))
                .expect("Choi matrix of a valid channel is a state"),
        }
    }

    pub fn cg_table(&self) -> CgTable {
        choi_to_cg(&self.choi())
    }

    /// `Σ E ρ E†` without validating `ρ`.
    pub fn apply_unchecked(&self, rho: &Mat2) -> Mat2 {
        self.kraus
            .iter()
            .fold(Mat2::zeros(), |acc, k| acc + k * rho * k.adjoint())
    }

    /// `‖𝓔(𝕀) − 𝕀‖_max ≤ tol`.
    pub fn is_unital(&self, tol: f64) -> bool {
        max_abs_diff(&self.apply_unchecked(&Mat2::identity()), &Mat2::identity()) <= tol
    }
}

fn trace_preservation_error(kraus: &[Mat2]) -> f64 {
    let sum = kraus
        .iter()
        .fold(Mat2::zeros(), |acc, k| acc + k.adjoint() * k);
    max_abs_diff(&sum, &Mat2::identity())
}

fn choi_matrix(kraus: &[Mat2]) -> Mat4 {
    let phi = projector(&phi_plus());
    kraus.iter().fold(Mat4::zeros(), |acc, k| {
        let lifted = kron(&Mat2::identity(), k);
        acc + lifted * phi * lifted.adjoint()
    })
}

/// The state `(𝕀 ⊗ 𝓔)[|Φ⟩⟨Φ|]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiState {
    state: TwoQubitState,
}

impl ChoiState {
    /// Validates complete positivity and trace preservation of a Choi matrix.
    pub fn new(matrix: Mat4) -> Result<Self> {
        let min = min_eigenvalue(&matrix);
        if min < -STATE_TOL {
            return Err(Error::NotCompletelyPositive {
                min_eigenvalue: min,
            });
        }
        let state = TwoQubitState::new(matrix)?;
        let reduced = partial_trace_second(state.matrix());
        let deviation = max_abs_diff(&reduced, &(Mat2::identity() * re(0.5)));
        if deviation > STATE_TOL {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(Self { state })
    }

    pub fn state(&self) -> &TwoQubitState {
        &self.state
    }

    pub fn matrix(&self) -> &Mat4 {
        self.state.matrix()
    }
}

/// Traces out the second tensor factor.
pub fn partial_trace_second(m: &Mat4) -> Mat2 {
    Mat2::from_fn(|i, j| m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)])
}

/// Traces out the first tensor factor.
pub fn partial_trace_first(m: &Mat4) -> Mat2 {
    Mat2::from_fn(|i, j| m[(i, j)] + m[(i + 2, j + 2)])
}

pub fn kraus_to_choi(kraus: &[Mat2]) -> Result<ChoiState> {
    Channel::new(kraus.to_vec()).map(|c| c.choi())
}

pub fn choi_to_cg(choi: &ChoiState) -> CgTable {
    qcore::cg_table(choi.state())
}

/// Kraus operators from the eigendecomposition of a Choi matrix.
///
/// An eigenvector `v` with eigenvalue `λ` gives `E[b][a] = √(2λ) · v[2a + b]`.
pub fn choi_to_kraus(choi: &ChoiState) -> Result<Channel> {
    let eig = SymmetricEigen::new(*choi.matrix());
    let kraus = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > KRAUS_EIGEN_CUTOFF)
        .map(|(k, &l)| {
            let v = eig.eigenvectors.column(k);
            let scale = re((2.0 * l).sqrt());
            Mat2::from_fn(|b, a| v[2 * a + b] * scale)
        })
        .collect();
    Channel::new(kraus)
}

/// `Σ E_i ρ E_i†` for a valid density matrix.
pub fn apply(channel: &Channel, rho: &Mat2) -> Result<Mat2> {
    qcore::validate_qubit_density(rho)?;
    Ok(channel.apply_unchecked(rho))
}

/// A probabilistic mixture of unitaries.
#[derive(Clone, Debug)]
pub struct UnitalMixture {
    terms: Vec<(f64, Mat2)>,
}

impl UnitalMixture {
    pub fn new(terms: Vec<(f64, Mat2)>) -> Result<Self> {
        check_weights(terms.iter().map(|(p, _)| *p))?;
        for (_, u) in &terms {
            let dev = max_abs_diff(&(u.adjoint() * u), &Mat2::identity());
            if dev > STATE_TOL {
                return Err(Error::InvalidParameter(format!(
                    "mixture term is not unitary (deviation {dev:.3e})"
                )));
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[(f64, Mat2)] {
        &self.terms
    }

    pub fn to_channel(&self) -> Channel {
        Channel {
            kraus: self
                .terms
                .iter()
                .filter(|(p, _)| *p > 0.0)
                .map(|(p, u)| u * re(p.sqrt()))
                .collect(),
        }
    }
}

fn check_weights(weights: impl Iterator<Item = f64>) -> Result<()> {
    let mut sum = 0.0;
    let mut count = 0;
    for w in weights {
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::InvalidWeights(format!("weight {w} is negative or not finite")));
        }
        sum += w;
        count += 1;
    }
    if count == 0 {
        return Err(Error::InvalidWeights("no terms".into()));
    }
    if (sum - 1.0).abs() > qcore::MATRIX_TOL {
        return Err(Error::InvalidWeights(format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}

/// Phase gate `U_z(θ)` under Gaussian dephasing of strength `s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DephasedPhaseGate {
    pub theta: f64,
    pub s: f64,
}

impl DephasedPhaseGate {
    /// Coherence damping factor `e^{−s²/2}`.
    pub fn damping(&self) -> f64 {
        (-self.s * self.s / 2.0).exp()
    }

    /// Equivalent phase-flip probability `p = (1 − e^{−s²/2})/2`.
    pub fn noise_rate(&self) -> f64 {
        (1.0 - self.damping()) / 2.0
    }

    /// Dephasing strength for a given phase-flip probability `p ∈ [0, ½)`.
    pub fn strength_for_noise_rate(p: f64) -> f64 {
        (-2.0 * (1.0 - 2.0 * p).ln()).sqrt()
    }

    fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() {
            return Err(Error::InvalidParameter("theta must be finite".into()));
        }
        if !(self.s >= 0.0) || !self.s.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dephasing strength s = {} must be finite and non-negative",
                self.s
            )));
        }
        Ok(())
    }
}

pub fn make_dephased_phase_gate(spec: DephasedPhaseGate) -> Result<Channel> {
    spec.validate()?;
    let e = spec.damping();
    let phase = Complex64::from_polar(1.0, spec.theta);
    let zero = Complex64::new(0.0, 0.0);
    let one = re(1.0);
    let e0 = Mat2::new(one, zero, zero, phase) * re(((1.0 + e) / 2.0).sqrt());
    let e1 = Mat2::new(one, zero, zero, -phase) * re(((1.0 - e) / 2.0).sqrt());
    Channel::new(vec![e0, e1])
}

/// The same channel written as `(1−p) U ρ U† + p (ZU) ρ (ZU)†`.
pub fn make_dephased_phase_gate_pauli_form(spec: DephasedPhaseGate) -> Result<Channel> {
    spec.validate()?;
    let p = spec.noise_rate();
    let u = phase_gate(spec.theta);
    let z = Pauli::Z.matrix();
    Channel::new(vec![u * re((1.0 - p).sqrt()), z * u * re(p.sqrt())])
}

/// Phase gate `U_z(θ)` followed by depolarizing noise of probability `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepolarizedPhaseGate {
    pub theta: f64,
    pub p: f64,
}

pub fn make_depolarized_phase_gate(spec: DepolarizedPhaseGate) -> Result<Channel> {
    if !spec.theta.is_finite() {
        return Err(Error::InvalidParameter("theta must be finite".into()));
    }
    if !(0.0..=1.0).contains(&spec.p) {
        return Err(Error::InvalidParameter(format!(
            "depolarizing probability p = {} outside [0, 1]",
            spec.p
        )));
    }
    let mut kraus = Vec::with_capacity(5);
    if spec.p < 1.0 {
        kraus.push(phase_gate(spec.theta) * re((1.0 - spec.p).sqrt()));
    }
    if spec.p > 0.0 {
        let w = re((spec.p / 4.0).sqrt());
        kraus.extend(Pauli::ALL.iter().map(|q| q.matrix() * w));
    }
    Channel::new(kraus)
}

/// `ρ ↦ Σ p_i C_i ρ C_i†`.
pub fn make_clifford_mixture(weights: &[(&CliffordElement, f64)]) -> Result<Channel> {
    check_weights(weights.iter().map(|(_, w)| *w))?;
    let kraus = weights
        .iter()
        .filter(|(_, w)| *w > 0.0)
        .map(|(c, w)| c.matrix() * re(w.sqrt()))
        .collect();
    Channel::new(kraus)
}

/// Random CP-TP channel with `kraus_count` operators from a Gaussian isometry.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, kraus_count: usize) -> Channel {
    assert!(kraus_count >= 1);
    let mut g: Vec<Mat2> = (0..kraus_count)
        .map(|_| {
            Mat2::from_fn(|_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            })
        })
        .collect();
    let gram = g.iter().fold(Mat2::zeros(), |acc, k| acc + k.adjoint() * k);
    let eig = SymmetricEigen::new(gram);
    let inv_sqrt = eig.eigenvectors
        * Mat2::from_diagonal(&eig.eigenvalues.map(|l| re(1.0 / l.sqrt())))
        * eig.eigenvectors.adjoint();
    for k in g.iter_mut() {
        *k *= inv_sqrt;
    }
    Channel { kraus: g }
}

/// Haar-random single-qubit unitary from a uniform point on the 3-sphere.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [a, b, c, d] = v.map(|x| x / n);
    Mat2::new(
        Complex64::new(a, -d),
        Complex64::new(-c, -b),
        Complex64::new(c, -b),
        Complex64::new(a, d),
    )
}

/// Random mixture of `terms` Haar-random unitaries with Dirichlet-like weights.
pub fn random_unital_channel<R: Rng + ?Sized>(rng: &mut R, terms: usize) -> Channel {
    let raw: Vec<f64> = (0..terms).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = raw.iter().sum();
    UnitalMixture {
        terms: raw
            .iter()
            .map(|w| (w / total, random_unitary(rng)))
            .collect(),
    }
    .to_channel()
}

/// JSON description of a channel.
///
/// Either explicit Kraus operators, each a row-major list of four `[re, im]`
/// pairs, or one of the named families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Family(FamilySpec),
    Kraus { kraus: Vec<Vec<[f64; 2]>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    DephasedPhase { theta: f64, s: f64 },
    DepolarizedPhase { theta: f64, p: f64 },
    /// Weights keyed by Clifford name (`I`, `H`, `S`, `HS`, ...).
    CliffordMixture { weights: BTreeMap<String, f64> },
}

impl ChannelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_channel(channel: &Channel) -> Self {
        ChannelSpec::Kraus {
            kraus: channel
                .kraus()
                .iter()
                .map(|k| {
                    // nalgebra stores column-major; emit row-major.
                    (0..4).map(|i| [k[(i / 2, i % 2)].re, k[(i / 2, i % 2)].im]).collect()
                })
                .collect(),
        }
    }

    pub fn build(&self) -> Result<Channel> {
        match self {
            ChannelSpec::Kraus { kraus } => {
                let ops = kraus
                    .iter()
                    .map(|m| {
                        if m.len() != 4 {
                            return Err(Error::DimensionMismatch {
                                expected: 4,
                                found: m.len(),
                            });
                        }
                        Ok(Mat2::from_fn(|i, j| {
                            let [a, b] = m[2 * i + j];
                            Complex64::new(a, b)
                        }))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Channel::new(ops)
            }
            ChannelSpec::Family(FamilySpec::DephasedPhase { theta, s }) => {
                make_dephased_phase_gate(DephasedPhaseGate { theta: *theta, s: *s })
            }
            ChannelSpec::Family(FamilySpec::DepolarizedPhase { theta, p }) => {
                make_depolarized_phase_gate(DepolarizedPhaseGate { theta: *theta, p: *p })
            }
            ChannelSpec::Family(FamilySpec::CliffordMixture { weights }) => {
                let terms = weights
                    .iter()
                    .map(|(name, w)| {
                        clifford_by_name(name)
                            .map(|c| (c, *w))
                            .ok_or_else(|| {
                                Error::InvalidParameter(format!("unknown Clifford element {name:?}"))
                            })
                    })
                    .collect::<Result<Vec<_>>>()?;
                make_clifford_mixture(&terms)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::qcore::{clifford_group, CgTable};

    fn table(entries: [[f64; 4]; 4]) -> CgTable {
        CgTable::new(entries)
    }

    fn v_h() -> CgTable {
        table([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ])
    }

    fn v_s() -> CgTable {
        table([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ])
    }

    fn dephasing_closed_form(theta: f64, s: f64) -> CgTable {
        let e = (-s * s / 2.0).exp();
        let (sn, cs) = theta.sin_cos();
        table([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, e * cs, e * sn, 0.0],
            [0.0, e * sn, -e * cs, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ])
    }

    fn chsh_value(t: &CgTable) -> f64 {
        use Pauli::*;
        t.expectation(X, X) + t.expectation(X, Y) + t.expectation(Y, X) - t.expectation(Y, Y)
    }

    #[test]
    fn identity_choi_is_phi() {
        let choi = kraus_to_choi(&[Mat2::identity()]).unwrap();
        assert!(max_abs_diff(choi.matrix(), &projector(&phi_plus())) < 1e-14);
        let t = choi_to_cg(&choi);
        assert!((t.expectation(Pauli::X, Pauli::X) - 1.0).abs() < 1e-14);
        assert!((t.expectation(Pauli::Y, Pauli::Y) + 1.0).abs() < 1e-14);
        assert!((t.expectation(Pauli::Z, Pauli::Z) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hadamard_and_phase_vertices() {
        let h = clifford_by_name("H").unwrap();
        let s = clifford_by_name("S").unwrap();
        let th = Channel::unitary(*h.matrix()).unwrap().cg_table();
        let ts = Channel::unitary(*s.matrix()).unwrap().cg_table();
        assert!(th.max_abs_diff(&v_h()) < 1e-12);
        assert!(ts.max_abs_diff(&v_s()) < 1e-12);
    }

    #[test]
    fn rejects_non_trace_preserving() {
        let half = Mat2::identity() * re(0.5);
        assert!(matches!(
            kraus_to_choi(&[half]),
            Err(Error::NotTracePreserving { .. })
        ));
        assert!(Channel::new(vec![]).is_err());
    }

    #[test]
    fn choi_validation() {
        let mut bad = projector(&phi_plus());
        bad[(0, 0)] -= re(0.2);
        bad[(3, 3)] += re(0.2);
        assert!(ChoiState::new(bad).is_err());
        // A state whose first marginal is not maximally mixed is not a Choi state.
        let mut prod = Mat4::zeros();
        prod[(0, 0)] = re(1.0);
        assert!(matches!(
            ChoiState::new(prod),
            Err(Error::NotTracePreserving { .. })
        ));
    }

    #[test]
    fn total_depolarizing_table_is_trivial() {
        let t = Channel::totally_depolarizing().cg_table();
        assert!(t.max_abs_diff(&table([
            [1.0, 0.0, 0.0, 0.0],
            [0.0; 4],
            [0.0; 4],
            [0.0; 4]
        ])) < 1e-14);
        let dp = make_depolarized_phase_gate(DepolarizedPhaseGate { theta: FRAC_PI_4, p: 1.0 })
            .unwrap();
        let rho = Mat2::new(re(0.7), Complex64::new(0.1, 0.2), Complex64::new(0.1, -0.2), re(0.3));
        let out = apply(&dp, &rho).unwrap();
        assert!(max_abs_diff(&out, &(Mat2::identity() * re(0.5))) < 1e-14);
    }

    #[test]
    fn apply_identity_and_dephasing() {
        let rho = Mat2::new(re(0.6), Complex64::new(0.2, 0.1), Complex64::new(0.2, -0.1), re(0.4));
        assert!(max_abs_diff(&apply(&Channel::identity(), &rho).unwrap(), &rho) < 1e-15);
        let spec = DephasedPhaseGate { theta: 0.9, s: 0.7 };
        let out = apply(&make_dephased_phase_gate(spec).unwrap(), &rho).unwrap();
        let factor = spec.damping();
        assert!((out[(0, 0)] - rho[(0, 0)]).norm() < 1e-14);
        assert!((out[(1, 1)] - rho[(1, 1)]).norm() < 1e-14);
        let want01 = rho[(0, 1)] * Complex64::from_polar(factor, -spec.theta);
        let want10 = rho[(1, 0)] * Complex64::from_polar(factor, spec.theta);
        assert!((out[(0, 1)] - want01).norm() < 1e-14);
        assert!((out[(1, 0)] - want10).norm() < 1e-14);
        assert!((out.trace() - re(1.0)).norm() < 1e-10);
    }

    #[test]
    fn apply_rejects_invalid_density() {
        let bad = Mat2::new(re(1.2), re(0.0), re(0.0), re(-0.2));
        assert!(apply(&Channel::identity(), &bad).is_err());
    }

    #[test]
    fn dephased_limits() {
        let id = make_dephased_phase_gate(DephasedPhaseGate { theta: 0.0, s: 0.0 }).unwrap();
        assert!(id.cg_table().max_abs_diff(&Channel::identity().cg_table()) < 1e-14);
        let g = make_dephased_phase_gate(DephasedPhaseGate { theta: FRAC_PI_4, s: 0.0 }).unwrap();
        let u = Channel::unitary(phase_gate(FRAC_PI_4)).unwrap();
        assert!(max_abs_diff(g.choi().matrix(), u.choi().matrix()) < 1e-14);
        assert!(make_dephased_phase_gate(DephasedPhaseGate { theta: 0.0, s: -0.1 }).is_err());
    }

    #[test]
    fn dephased_boundary_has_chsh_two() {
        // e^{-s²/2} = 1/√2  ⇔  s² = ln 2.
        let s = 2f64.ln().sqrt();
        let g = make_dephased_phase_gate(DephasedPhaseGate { theta: FRAC_PI_4, s }).unwrap();
        assert!((chsh_value(&g.cg_table()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn depolarized_examples() {
        let u = make_depolarized_phase_gate(DepolarizedPhaseGate { theta: FRAC_PI_4, p: 0.0 })
            .unwrap();
        assert_eq!(u.kraus().len(), 1);
        let half = make_depolarized_phase_gate(DepolarizedPhaseGate { theta: FRAC_PI_4, p: 0.5 })
            .unwrap();
        let v = chsh_value(&half.cg_table());
        assert!((v - SQRT_2).abs() < 1e-12);
        assert!(v < 2.0);
        assert!(make_depolarized_phase_gate(DepolarizedPhaseGate { theta: 0.0, p: 1.5 }).is_err());
        assert!(make_depolarized_phase_gate(DepolarizedPhaseGate { theta: 0.0, p: -0.1 }).is_err());
    }

    #[test]
    fn depolarized_scales_correlation_block() {
        for p in [0.1, 0.35, 0.8] {
            let noisy = make_depolarized_phase_gate(DepolarizedPhaseGate { theta: 0.3, p })
                .unwrap()
                .cg_table();
            let clean = Channel::unitary(phase_gate(0.3)).unwrap().cg_table();
            assert!((noisy.entries[0][0] - 1.0).abs() < 1e-14);
            for r in 1..4 {
                for c in 1..4 {
                    assert!((noisy.entries[r][c] - (1.0 - p) * clean.entries[r][c]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn clifford_mixtures() {
        let g = clifford_group();
        let id = make_clifford_mixture(&[(&g[0], 1.0)]).unwrap();
        assert!(max_abs_diff(id.choi().matrix(), Channel::identity().choi().matrix()) < 1e-14);

        let h = clifford_by_name("H").unwrap();
        let s = clifford_by_name("S").unwrap();
        let useless =
            make_clifford_mixture(&[(h, 1.0 / 3.0), (s, 0.25), (&g[0], 5.0 / 12.0)]).unwrap();
        let want = v_h().entries;
        let ws = v_s().entries;
        let wi = Channel::identity().cg_table().entries;
        let t = useless.cg_table();
        for r in 0..4 {
            for c in 0..4 {
                let w = want[r][c] / 3.0 + ws[r][c] / 4.0 + wi[r][c] * 5.0 / 12.0;
                assert!((t.entries[r][c] - w).abs() < 1e-12);
            }
        }

        assert!(make_clifford_mixture(&[(h, 0.5), (s, 0.6)]).is_err());
        assert!(make_clifford_mixture(&[(h, 1.2), (s, -0.2)]).is_err());
    }

    #[test]
    fn uniform_clifford_twirl_is_total_depolarization() {
        let g = clifford_group();
        let terms: Vec<_> = g.iter().map(|c| (c, 1.0 / 24.0)).collect();
        let twirl = make_clifford_mixture(&terms).unwrap();
        // Direct summation on a few inputs.
        for rho in [
            Mat2::new(re(1.0), re(0.0), re(0.0), re(0.0)),
            Mat2::new(re(0.5), re(0.5), re(0.5), re(0.5)),
            Mat2::new(re(0.5), Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.5), re(0.5)),
        ] {
            let mut acc = Mat2::zeros();
            for c in g {
                acc += c.matrix() * rho * c.matrix().adjoint() * re(1.0 / 24.0);
            }
            assert!(max_abs_diff(&acc, &(Mat2::identity() * re(0.5))) < 1e-14);
            assert!(max_abs_diff(&apply(&twirl, &rho).unwrap(), &acc) < 1e-14);
        }
    }

    #[test]
    fn physical_and_pauli_forms_agree() {
        for i in 0..20 {
            for j in 0..10 {
                let spec = DephasedPhaseGate {
                    theta: -3.0 + 0.31 * i as f64,
                    s: 0.25 * j as f64,
                };
                let a = make_dephased_phase_gate(spec).unwrap().choi();
                let b = make_dephased_phase_gate_pauli_form(spec).unwrap().choi();
                assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn dephasing_matches_closed_form() {
        for i in 0..20 {
            for j in 0..20 {
                let theta = -3.1 + 0.32 * i as f64;
                let s = 0.15 * j as f64;
                let t = make_dephased_phase_gate(DephasedPhaseGate { theta, s })
                    .unwrap()
                    .cg_table();
                assert!(t.max_abs_diff(&dephasing_closed_form(theta, s)) < 1e-12);
            }
        }
    }

    #[test]
    fn choi_roundtrip_on_random_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 1..=4 {
            for _ in 0..25 {
                let ch = random_channel(&mut rng, k);
                let choi = ch.choi();
                let back = choi_to_kraus(&choi).unwrap();
                assert!(max_abs_diff(back.choi().matrix(), choi.matrix()) < 1e-9);
                ChoiState::new(*choi.matrix()).unwrap();
            }
        }
    }

    #[test]
    fn unital_channels_have_vanishing_locals() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for terms in 1..6 {
            for _ in 0..20 {
                let ch = random_unital_channel(&mut rng, terms);
                assert!(ch.is_unital(1e-12));
                for l in ch.cg_table().locals() {
                    assert!(l.abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn clifford_post_composition_rotates_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let ch = random_channel(&mut rng, 3);
            let t = ch.cg_table();
            for c in clifford_group() {
                let composed = ch.then_unitary(c.matrix()).cg_table();
                let id = clifford_group()[0].rotation4();
                let want = t.transform(&c.rotation4(), &id);
                assert!(composed.max_abs_diff(&want) < 1e-12, "{}", c.name());
            }
        }
    }

    #[test]
    fn spec_json_roundtrip() {
        let s = ChannelSpec::from_json(r#"{"family":"dephased_phase","theta":0.5,"s":0.1}"#)
            .unwrap();
        assert_eq!(
            s,
            ChannelSpec::Family(FamilySpec::DephasedPhase { theta: 0.5, s: 0.1 })
        );
        let ch = s.build().unwrap();
        let again = ChannelSpec::from_channel(&ch);
        let text = serde_json::to_string(&again).unwrap();
        let rebuilt = ChannelSpec::from_json(&text).unwrap().build().unwrap();
        assert!(max_abs_diff(rebuilt.choi().matrix(), ch.choi().matrix()) < 1e-15);

        let mix = ChannelSpec::from_json(
            r#"{"family":"clifford_mixture","weights":{"H":0.25,"S":0.25,"I":0.5}}"#,
        )
        .unwrap();
        mix.build().unwrap();
        let bad = ChannelSpec::from_json(r#"{"kraus":[[[0.5,0],[0,0],[0,0],[0.5,0]]]}"#).unwrap();
        assert!(bad.build().is_err());
        assert!(ChannelSpec::from_json(r#"{"family":"nope"}"#).is_err());
    }
}
