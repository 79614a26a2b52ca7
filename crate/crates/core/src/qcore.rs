//! Pauli and single-qubit Clifford algebra, two-qubit states and their
//! Pauli expectation tables.
//!
//! Table convention: `entries[r][c] = Tr(ρ · σ_c ⊗ σ_r)` with indices
//! `0..4 ↔ I, X, Y, Z`. The column index is the first tensor factor (the
//! untouched half of the entangled pair), the row index is the second factor
//! (the half the channel acts on). Row 1 therefore reads `IX XX YX ZX`.

use std::fmt;
use std::sync::OnceLock;

use nalgebra::{DMatrix, Matrix2, Matrix4, SMatrix, SymmetricEigen, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat2 = Matrix2<Complex64>;
pub type Mat4 = Matrix4<Complex64>;
pub type Ket4 = Vector4<Complex64>;

/// Tolerance for matrix-level identities.
pub const MATRIX_TOL: f64 = 1e-12;
/// Tolerance for validating physical states and channels.
pub const STATE_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I_UNIT: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Pauli {
        Pauli::ALL[i]
    }

    pub fn matrix(self) -> Mat2 {
        pauli_matrix(self)
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

pub fn pauli_matrix(label: Pauli) -> Mat2 {
    match label {
        Pauli::I => Mat2::new(ONE, ZERO, ZERO, ONE),
        Pauli::X => Mat2::new(ZERO, ONE, ONE, ZERO),
        Pauli::Y => Mat2::new(ZERO, -I_UNIT, I_UNIT, ZERO),
        Pauli::Z => Mat2::new(ONE, ZERO, ZERO, -ONE),
    }
}

pub fn hadamard_matrix() -> Mat2 {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Mat2::new(h, h, h, -h)
}

pub fn phase_matrix() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, I_UNIT)
}

/// `U_z(θ) = diag(1, e^{iθ})`.
pub fn phase_gate(theta: f64) -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, Complex64::from_polar(1.0, theta))
}

pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff<const N: usize>(
    a: &SMatrix<Complex64, N, N>,
    b: &SMatrix<Complex64, N, N>,
) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// A Pauli operator with a ±1 sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedPauli {
    pub sign: i8,
    pub pauli: Pauli,
}

/// A single-qubit Clifford gate modulo global phase.
///
/// Identity is carried by the signed conjugation action on `X, Y, Z`; the
/// matrix is an arbitrary representative.
#[derive(Clone, Debug)]
pub struct CliffordElement {
    name: String,
    matrix: Mat2,
    action: [SignedPauli; 3],
}

impl PartialEq for CliffordElement {
    fn eq(&self, other: &Self) -> bool {
        self.action == other.action
    }
}

impl Eq for CliffordElement {}

impl std::hash::Hash for CliffordElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.action.hash(state);
    }
}

impl CliffordElement {
    /// Builds an element from a unitary, checking that it normalizes the Pauli group.
    pub fn from_matrix(name: impl Into<String>, matrix: Mat2) -> Option<Self> {
        let action = signed_action_from_matrix(&matrix)?;
        Some(Self {
            name: name.into(),
            matrix,
            action,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn signed_action(&self) -> &[SignedPauli; 3] {
        &self.action
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &CliffordElement) -> CliffordElement {
        let name = match (self.name.as_str(), other.name.as_str()) {
            ("I", n) => n.to_string(),
            (n, "I") => n.to_string(),
            (a, b) => format!("{a}{b}"),
        };
        let action = std::array::from_fn(|j| {
            let inner = other.action[j];
            let outer = self.action[inner.pauli.index() - 1];
            SignedPauli {
                sign: inner.sign * outer.sign,
                pauli: outer.pauli,
            }
        });
        CliffordElement {
            name,
            matrix: self.matrix * other.matrix,
            action,
        }
    }

    pub fn inverse(&self) -> CliffordElement {
        let mut action = [SignedPauli {
            sign: 1,
            pauli: Pauli::I,
        }; 3];
        for (j, sp) in self.action.iter().enumerate() {
            action[sp.pauli.index() - 1] = SignedPauli {
                sign: sp.sign,
                pauli: Pauli::NON_IDENTITY[j],
            };
        }
        CliffordElement {
            name: format!("({})^-1", self.name),
            matrix: self.matrix.adjoint(),
            action,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.action
            .iter()
            .zip(Pauli::NON_IDENTITY)
            .all(|(sp, p)| sp.sign == 1 && sp.pauli == p)
    }

    /// 3×3 signed permutation `R` with `R[k][j] = s` when `C σ_j C† = s σ_k`.
    pub fn rotation(&self) -> [[i64; 3]; 3] {
        let mut r = [[0i64; 3]; 3];
        for (j, sp) in self.action.iter().enumerate() {
            r[sp.pauli.index() - 1][j] = sp.sign as i64;
        }
        r
    }

    /// `1 ⊕ R`, acting on the Pauli index of an expectation table.
    pub fn rotation4(&self) -> [[i64; 4]; 4] {
        let r = self.rotation();
        let mut out = [[0i64; 4]; 4];
        out[0][0] = 1;
        for k in 0..3 {
            for j in 0..3 {
                out[k + 1][j + 1] = r[k][j];
            }
        }
        out
    }
}

impl fmt::Display for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Computes the conjugation action of `m` on X, Y, Z, or `None` if `m` is not Clifford.
pub fn signed_action_from_matrix(m: &Mat2) -> Option<[SignedPauli; 3]> {
    let mut action = [SignedPauli {
        sign: 1,
        pauli: Pauli::I,
    }; 3];
    for (j, p) in Pauli::NON_IDENTITY.iter().enumerate() {
        let conj = m * p.matrix() * m.adjoint();
        let hit = Pauli::NON_IDENTITY.iter().find_map(|q| {
            [1i8, -1].into_iter().find_map(|s| {
                let target = q.matrix() * Complex64::new(s as f64, 0.0);
                (max_abs_diff(&conj, &target) < MATRIX_TOL).then_some(SignedPauli {
                    sign: s,
                    pauli: *q,
                })
            })
        })?;
        action[j] = hit;
    }
    Some(action)
}

/// Closure of `{H, S}` under composition, in breadth-first discovery order.
///
/// Names are words in `H` and `S` read as matrix products.
pub fn enumerate_clifford_group() -> Vec<CliffordElement> {
    let identity = CliffordElement::from_matrix("I", pauli_matrix(Pauli::I)).unwrap();
    let generators = [
        CliffordElement::from_matrix("H", hadamard_matrix()).unwrap(),
        CliffordElement::from_matrix("S", phase_matrix()).unwrap(),
    ];
    let mut group = vec![identity];
    let mut frontier = 0;
    while frontier < group.len() {
        let current = group[frontier].clone();
        for g in &generators {
            let next = g.compose(&current);
            if !group.contains(&next) {
                group.push(next);
            }
        }
        frontier += 1;
    }
    group
}

/// The 24 group elements, computed once.
pub fn clifford_group() -> &'static [CliffordElement] {
    static GROUP: OnceLock<Vec<CliffordElement>> = OnceLock::new();
    GROUP.get_or_init(enumerate_clifford_group)
}

pub fn clifford_by_name(name: &str) -> Option<&'static CliffordElement> {
    clifford_group().iter().find(|c| c.name() == name)
}

/// Index into [`clifford_group`] of the element with the same action.
pub fn clifford_index(c: &CliffordElement) -> usize {
    clifford_group()
        .iter()
        .position(|g| g == c)
        .expect("every Clifford element is in the enumerated group")
}

pub fn conjugation_action(c: &CliffordElement, p: Pauli) -> Result<SignedPauli> {
    match p {
        Pauli::I => Err(Error::IdentityPauli),
        _ => Ok(c.action[p.index() - 1]),
    }
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn phi_plus() -> Ket4 {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Ket4::new(h, ZERO, ZERO, h)
}

pub fn projector(psi: &Ket4) -> Mat4 {
    psi * psi.adjoint()
}

fn check_density(m: DMatrix<Complex64>) -> Result<()> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidState("non-finite entry".into()));
    }
    let herm = m
        .iter()
        .zip(m.adjoint().iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if herm > STATE_TOL {
        return Err(Error::InvalidState(format!(
            "not Hermitian (deviation {herm:.3e})"
        )));
    }
    let tr = m.trace();
    if (tr - ONE).norm() > STATE_TOL {
        return Err(Error::InvalidState(format!(
            "trace {:.6} + {:.6}i is not 1",
            tr.re, tr.im
        )));
    }
    let min = min_eigenvalue_dyn(m);
    if min < -STATE_TOL {
        return Err(Error::InvalidState(format!(
            "negative eigenvalue {min:.3e}"
        )));
    }
    Ok(())
}

fn min_eigenvalue_dyn(m: DMatrix<Complex64>) -> f64 {
    let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Smallest eigenvalue of a Hermitian matrix (the Hermitian part is used).
pub fn min_eigenvalue<const N: usize>(m: &SMatrix<Complex64, N, N>) -> f64 {
    min_eigenvalue_dyn(DMatrix::from_column_slice(N, N, m.as_slice()))
}

/// Validates a single-qubit density matrix.
pub fn validate_qubit_density(rho: &Mat2) -> Result<()> {
    check_density(DMatrix::from_column_slice(2, 2, rho.as_slice()))
}

/// A two-qubit density matrix (Hermitian, unit trace, positive semidefinite).
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState {
    matrix: Mat4,
}

impl TwoQubitState {
    pub fn new(matrix: Mat4) -> Result<Self> {
        check_density(DMatrix::from_column_slice(4, 4, matrix.as_slice()))?;
        Ok(Self { matrix })
    }

    pub fn from_pure(psi: &Ket4) -> Result<Self> {
        Self::new(projector(psi))
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: Mat4::identity() * Complex64::new(0.25, 0.0),
        }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    pub fn cg_table(&self) -> CgTable {
        cg_table(self)
    }
}

/// 4×4 table of two-qubit Pauli expectation values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CgTable {
    pub entries: [[f64; 4]; 4],
}

impl CgTable {
    pub fn new(entries: [[f64; 4]; 4]) -> Self {
        Self { entries }
    }

    /// Table of an arbitrary 4×4 matrix; rejects matrices whose trace is not 1.
    pub fn from_density(m: &Mat4) -> Result<Self> {
        let tr = m.trace();
        if (tr - ONE).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "trace {:.6} + {:.6}i is not 1",
                tr.re, tr.im
            )));
        }
        Ok(table_of(m))
    }

    /// `Tr(ρ σ_first ⊗ σ_second)`.
    pub fn expectation(&self, first: Pauli, second: Pauli) -> f64 {
        self.entries[second.index()][first.index()]
    }

    /// The 15 coordinates (row-major, skipping the constant `II` entry).
    pub fn coords(&self) -> [f64; 15] {
        let mut out = [0.0; 15];
        for (k, v) in self.entries.iter().flatten().skip(1).enumerate() {
            out[k] = *v;
        }
        out
    }

    pub fn from_coords(coords: &[f64; 15]) -> Self {
        let mut entries = [[0.0; 4]; 4];
        entries[0][0] = 1.0;
        for (k, v) in coords.iter().enumerate() {
            entries[(k + 1) / 4][(k + 1) % 4] = *v;
        }
        Self { entries }
    }

    /// The six single-party entries `XI, YI, ZI, IX, IY, IZ`.
    pub fn locals(&self) -> [f64; 6] {
        let e = &self.entries;
        [e[0][1], e[0][2], e[0][3], e[1][0], e[2][0], e[3][0]]
    }

    pub fn max_abs_diff(&self, other: &CgTable) -> f64 {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `L · T · Rᵀ` for integer 4×4 transforms (signed permutations in practice).
    pub fn transform(&self, left: &[[i64; 4]; 4], right: &[[i64; 4]; 4]) -> CgTable {
        let mut out = [[0.0; 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                let mut acc = 0.0;
                for i in 0..4 {
                    for j in 0..4 {
                        acc += left[r][i] as f64 * self.entries[i][j] * right[c][j] as f64;
                    }
                }
                *v = acc;
            }
        }
        CgTable { entries: out }
    }
}

fn table_of(m: &Mat4) -> CgTable {
    let mut entries = [[0.0; 4]; 4];
    for r in Pauli::ALL {
        for c in Pauli::ALL {
            let op = kron(&c.matrix(), &r.matrix());
            entries[r.index()][c.index()] = (m * op).trace().re;
        }
    }
    CgTable { entries }
}

pub fn cg_table(state: &TwoQubitState) -> CgTable {
    table_of(&state.matrix)
}

/// Rebuilds `ρ = ¼ Σ T[r][c] σ_c ⊗ σ_r` from a table.
pub fn density_from_table(t: &CgTable) -> Mat4 {
    let mut m = Mat4::zeros();
    for r in Pauli::ALL {
        for c in Pauli::ALL {
            let w = t.entries[r.index()][c.index()] * 0.25;
            m += kron(&c.matrix(), &r.matrix()) * Complex64::new(w, 0.0);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn pauli_matrices() {
        assert_eq!(pauli_matrix(Pauli::I), Mat2::identity());
        assert_eq!(pauli_matrix(Pauli::Z), Mat2::new(c(1.0), c(0.0), c(0.0), c(-1.0)));
        for p in Pauli::ALL {
            let m = p.matrix();
            assert!(max_abs_diff(&(m * m), &Mat2::identity()) < MATRIX_TOL);
            assert!(max_abs_diff(&m, &m.adjoint()) < MATRIX_TOL);
        }
        for p in Pauli::NON_IDENTITY {
            assert!(p.matrix().trace().norm() < MATRIX_TOL);
        }
    }

    #[test]
    fn group_has_24_elements_and_pauli_subgroup() {
        let g = enumerate_clifford_group();
        assert_eq!(g.len(), 24);
        assert!(g[0].is_identity());
        let paulis: Vec<_> = g
            .iter()
            .filter(|e| {
                e.signed_action()
                    .iter()
                    .zip(Pauli::NON_IDENTITY)
                    .all(|(sp, p)| sp.pauli == p)
            })
            .collect();
        assert_eq!(paulis.len(), 4);
        for a in &paulis {
            for b in &paulis {
                assert!(paulis.contains(&&a.compose(b)));
            }
        }
    }

    #[test]
    fn hadamard_is_involution() {
        let h = clifford_by_name("H").unwrap();
        assert!(h.compose(h).is_identity());
    }

    #[test]
    fn known_conjugations() {
        let h = clifford_by_name("H").unwrap();
        let s = clifford_by_name("S").unwrap();
        let id = &clifford_group()[0];
        assert_eq!(
            conjugation_action(h, Pauli::X).unwrap(),
            SignedPauli { sign: 1, pauli: Pauli::Z }
        );
        assert_eq!(
            conjugation_action(s, Pauli::X).unwrap(),
            SignedPauli { sign: 1, pauli: Pauli::Y }
        );
        assert_eq!(
            conjugation_action(id, Pauli::Z).unwrap(),
            SignedPauli { sign: 1, pauli: Pauli::Z }
        );
        assert!(matches!(
            conjugation_action(h, Pauli::I),
            Err(Error::IdentityPauli)
        ));
    }

    #[test]
    fn group_axioms_exhaustive() {
        let g = clifford_group();
        for a in g {
            assert!(g.iter().any(|b| a.compose(b).is_identity()));
            assert!(a.inverse().compose(a).is_identity());
            for b in g {
                let ab = a.compose(b);
                assert!(g.contains(&ab));
                let direct = signed_action_from_matrix(ab.matrix()).unwrap();
                assert_eq!(&direct, ab.signed_action());
            }
        }
    }

    #[test]
    fn actions_are_rotations() {
        for e in clifford_group() {
            let r = e.rotation();
            let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
                - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
                + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
            assert_eq!(det, 1, "{}", e.name());
            for p in Pauli::NON_IDENTITY {
                let sp = conjugation_action(e, p).unwrap();
                let conj = e.matrix() * p.matrix() * e.matrix().adjoint();
                let want = sp.pauli.matrix() * c(sp.sign as f64);
                assert!(max_abs_diff(&conj, &want) < MATRIX_TOL);
            }
        }
    }

    #[test]
    fn phi_table() {
        let t = TwoQubitState::from_pure(&phi_plus()).unwrap().cg_table();
        let mut want = [[0.0; 4]; 4];
        want[0][0] = 1.0;
        want[1][1] = 1.0;
        want[2][2] = -1.0;
        want[3][3] = 1.0;
        assert!(t.max_abs_diff(&CgTable::new(want)) < MATRIX_TOL);
    }

    #[test]
    fn maximally_mixed_has_no_correlations() {
        let t = TwoQubitState::maximally_mixed().cg_table();
        for (k, v) in t.entries.iter().flatten().enumerate() {
            let want = if k == 0 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < MATRIX_TOL);
        }
    }

    #[test]
    fn rejects_non_unit_trace() {
        let m = Mat4::identity() * c(0.5);
        assert!(matches!(CgTable::from_density(&m), Err(Error::InvalidState(_))));
        assert!(TwoQubitState::new(m).is_err());
    }

    #[test]
    fn table_roundtrip_through_density() {
        let t = TwoQubitState::from_pure(&phi_plus()).unwrap().cg_table();
        let back = CgTable::from_density(&density_from_table(&t)).unwrap();
        assert!(t.max_abs_diff(&back) < MATRIX_TOL);
        let coords = t.coords();
        assert!(CgTable::from_coords(&coords).max_abs_diff(&t) < MATRIX_TOL);
    }

    #[test]
    fn table_is_linear_in_state() {
        let a = projector(&phi_plus());
        let b = Mat4::identity() * c(0.25);
        for alpha in [0.0, 0.3, 0.75, 1.0] {
            let mix = TwoQubitState::new(a * c(alpha) + b * c(1.0 - alpha)).unwrap();
            let ta = CgTable::from_density(&a).unwrap();
            let tb = CgTable::from_density(&b).unwrap();
            let t = mix.cg_table();
            for r in 0..4 {
                for cc in 0..4 {
                    let want = alpha * ta.entries[r][cc] + (1.0 - alpha) * tb.entries[r][cc];
                    assert!((t.entries[r][cc] - want).abs() < MATRIX_TOL);
                }
            }
        }
    }
}
