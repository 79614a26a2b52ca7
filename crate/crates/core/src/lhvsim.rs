//! Shared-randomness models of stabilizer correlations.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{lp_membership, RationalVector, SeparationCertificate};
use crate::polytopes::{lhv_polytope, LocalConfigBits};
use crate::qcore::{hadamard_matrix, kron, phase_matrix, CgTable, Ket4, Mat2, Mat4, TwoQubitState};

/// Identifier of the sampling generator, stored with every sampled table.
pub const GENERATOR_ID: &str = "chacha8";
const CHUNK: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SharedBits {
    pub r1: bool,
    pub r2: bool,
    pub r3: bool,
}

impl SharedBits {
    /// `index = r1 + 2 r2 + 4 r3`.
    pub fn from_index(index: usize) -> Self {
        Self {
            r1: index & 1 == 1,
            r2: index & 2 == 2,
            r3: index & 4 == 4,
        }
    }

    pub fn index(self) -> usize {
        self.r1 as usize + 2 * self.r2 as usize + 4 * self.r3 as usize
    }

    pub fn all() -> impl Iterator<Item = SharedBits> {
        (0..8).map(Self::from_index)
    }
}

/// Deterministic ±1 outputs for each party (0 = first, 1 = second), each
/// direction `X, Y, Z`, and each of the 8 shared-bit assignments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LhvRuleSet {
    pub name: String,
    pub outputs: [[[i8; 8]; 3]; 2],
}

fn pm(bit: bool) -> i8 {
    if bit {
        -1
    } else {
        1
    }
}

impl LhvRuleSet {
    pub fn from_fn(name: impl Into<String>, f: impl Fn(usize, usize, SharedBits) -> i8) -> Self {
        let mut outputs = [[[0i8; 8]; 3]; 2];
        for (party, dirs) in outputs.iter_mut().enumerate() {
            for (dir, out) in dirs.iter_mut().enumerate() {
                for bits in SharedBits::all() {
                    out[bits.index()] = f(party, dir, bits);
                }
            }
        }
        Self {
            name: name.into(),
            outputs,
        }
    }

    /// Output for `party`, Pauli index `pauli ∈ 0..4` (0 = no measurement, always +1).
    pub fn output(&self, party: usize, pauli: usize, bits: SharedBits) -> i8 {
        if pauli == 0 {
            1
        } else {
            self.outputs[party][pauli - 1][bits.index()]
        }
    }
}

/// X: both output `(−1)^{r1}`. Y: first `(−1)^{r2}`, second `(−1)^{r2+1}`. Z: both `(−1)^{r3}`.
pub fn phi_ruleset() -> LhvRuleSet {
    LhvRuleSet::from_fn("phi", |party, dir, b| match dir {
        0 => pm(b.r1),
        1 => pm(b.r2 ^ (party == 1)),
        _ => pm(b.r3),
    })
}

/// Outputs fixed by a local configuration, ignoring the shared bits.
pub fn constant_ruleset(bits: LocalConfigBits) -> LhvRuleSet {
    let first = [bits.a, bits.b, bits.c];
    let second = [bits.d, bits.e, bits.f];
    LhvRuleSet::from_fn("constant", move |party, dir, _| {
        pm(if party == 0 { first[dir] } else { second[dir] })
    })
}

/// A table with exact rational entries, same layout as [`CgTable`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalTable(pub [[BigRational; 4]; 4]);

impl RationalTable {
    pub fn to_cg(&self) -> CgTable {
        CgTable::new(self.0.clone().map(|row| row.map(|q| q.to_f64().unwrap_or(f64::NAN))))
    }

    pub fn coords(&self) -> RationalVector {
        RationalVector::new(self.0.iter().flatten().skip(1).cloned().collect())
    }

    /// Rounds a float table whose entries are (numerically) integers.
    pub fn from_integral(t: &CgTable, tol: f64) -> Result<Self> {
        let mut out: [[BigRational; 4]; 4] = Default::default();
        for r in 0..4 {
            for c in 0..4 {
                let x = t.entries[r][c];
                if (x - x.round()).abs() > tol {
                    return Err(Error::InvalidState(format!("entry {x} is not integral")));
                }
                out[r][c] = BigRational::from_integer(BigInt::from(x.round() as i64));
            }
        }
        Ok(Self(out))
    }
}

/// Exact averages over all 8 shared-bit assignments.
pub fn exact_table(rules: &LhvRuleSet) -> RationalTable {
    let mut out: [[BigRational; 4]; 4] = Default::default();
    for r in 0..4 {
        for c in 0..4 {
            let sum: i64 = SharedBits::all()
                .map(|b| (rules.output(0, c, b) * rules.output(1, r, b)) as i64)
                .sum();
            out[r][c] = BigRational::new(BigInt::from(sum), BigInt::from(8));
        }
    }
    RationalTable(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledTable {
    pub ruleset: String,
    pub table: CgTable,
    pub samples: u64,
    pub seed: u64,
    pub generator: String,
}

/// Empirical table from `n` fresh shared-bit draws per entry.
///
/// Each `(entry, chunk)` pair has its own ChaCha8 stream, so the result does not
/// depend on thread scheduling.
pub fn sample_table(rules: &LhvRuleSet, n: u64, seed: u64) -> Result<SampledTable> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    let chunks = n.div_ceil(CHUNK);
    let mut entries = [[1.0; 4]; 4];
    let sums: Vec<i64> = (1..16u64)
        .into_par_iter()
        .map(|cell| {
            let (r, c) = ((cell / 4) as usize, (cell % 4) as usize);
            (0..chunks)
                .into_par_iter()
                .map(|chunk| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(cell << 32 | chunk);
                    let len = CHUNK.min(n - chunk * CHUNK);
                    (0..len)
                        .map(|_| {
                            let b = SharedBits::from_index((rng.next_u32() & 7) as usize);
                            (rules.output(0, c, b) * rules.output(1, r, b)) as i64
                        })
                        .sum::<i64>()
                })
                .sum()
        })
        .collect();
    for (cell, s) in (1..16usize).zip(sums) {
        entries[cell / 4][cell % 4] = s as f64 / n as f64;
    }
    Ok(SampledTable {
        ruleset: rules.name.clone(),
        table: CgTable::new(entries),
        samples: n,
        seed,
        generator: GENERATOR_ID.into(),
    })
}

fn canonical_key(psi: &Ket4) -> Vec<i64> {
    let lead = psi
        .iter()
        .find(|z| z.norm() > 1e-9)
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = lead.conj() / lead.norm();
    psi.iter()
        .flat_map(|z| {
            let w = z * phase;
            [(w.re * 1e6).round() as i64, (w.im * 1e6).round() as i64]
        })
        .collect()
}

/// The 60 two-qubit pure stabilizer states: the orbit of `|00⟩` under
/// `H`, `S` on either qubit and a controlled-NOT.
pub fn stabilizer_states() -> Vec<Ket4> {
    let id = Mat2::identity();
    let mut cnot = Mat4::zeros();
    for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        cnot[(i, j)] = Complex64::new(1.0, 0.0);
    }
    let gens = [
        kron(&hadamard_matrix(), &id),
        kron(&id, &hadamard_matrix()),
        kron(&phase_matrix(), &id),
        kron(&id, &phase_matrix()),
        cnot,
    ];
    let start = Ket4::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    );
    let mut seen = BTreeSet::from([canonical_key(&start)]);
    let mut states = vec![start];
    let mut frontier = 0;
    while frontier < states.len() {
        let psi = states[frontier];
        frontier += 1;
        for g in &gens {
            let next = g * psi;
            if seen.insert(canonical_key(&next)) {
                states.push(next);
            }
        }
    }
    states
}

/// Exact tables of the 60 stabilizer states (all entries are 0 or ±1).
pub fn stabilizer_state_tables() -> Result<Vec<RationalTable>> {
    stabilizer_states()
        .iter()
        .map(|psi| {
            let t = TwoQubitState::from_pure(psi)?.cg_table();
            RationalTable::from_integral(&t, 1e-9)
        })
        .collect()
}

/// LP membership certificate in the LHV polytope for each stabilizer-state table.
pub fn stabilizer_membership() -> Result<Vec<(RationalTable, SeparationCertificate)>> {
    let vp = &lhv_polytope().vpolytope;
    stabilizer_state_tables()?
        .into_par_iter()
        .map(|t| {
            let cert = lp_membership(&t.coords(), vp)?;
            Ok((t, cert))
        })
        .collect()
}

/// Largest `|sampled − exact|` over the 16 entries.
pub fn max_deviation(sampled: &CgTable, exact: &RationalTable) -> f64 {
    sampled.max_abs_diff(&exact.to_cg())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytopes::{int_table_coords, lhv_vertex};
    use crate::qcore::{phi_plus, Pauli};

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn phi_rules_reproduce_phi_plus() {
        let t = exact_table(&phi_ruleset());
        let e = |a: Pauli, b: Pauli| t.0[b.index()][a.index()].clone();
        assert_eq!(e(Pauli::X, Pauli::X), q(1));
        assert_eq!(e(Pauli::Y, Pauli::Y), q(-1));
        assert_eq!(e(Pauli::Z, Pauli::Z), q(1));
        assert_eq!(e(Pauli::X, Pauli::Y), q(0));
        let phi = TwoQubitState::from_pure(&phi_plus()).unwrap().cg_table();
        assert!(t.to_cg().max_abs_diff(&phi) < 1e-12);
    }

    #[test]
    fn constant_rules_give_vertices() {
        for mask in [0u8, 1, 22, 63] {
            let bits = LocalConfigBits::from_mask(mask);
            let t = exact_table(&constant_ruleset(bits));
            assert_eq!(t.coords(), int_table_coords(&lhv_vertex(bits)));
        }
    }

    #[test]
    fn sampling_is_deterministic_and_validated() {
        let rules = phi_ruleset();
        let a = sample_table(&rules, 200_000, 7).unwrap();
        let b = sample_table(&rules, 200_000, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.generator, "chacha8");
        assert!(sample_table(&rules, 0, 7).is_err());
        let one = sample_table(&rules, 1, 3).unwrap();
        assert!(one.table.entries.iter().flatten().all(|x| x.abs() == 1.0));
    }

    #[test]
    fn sixty_stabilizer_states() {
        let states = stabilizer_states();
        assert_eq!(states.len(), 60);
        let tables = stabilizer_state_tables().unwrap();
        let phi = exact_table(&phi_ruleset());
        assert!(tables.contains(&phi));
    }
}
