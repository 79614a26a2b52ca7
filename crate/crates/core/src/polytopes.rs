//! The LHV and Clifford polytopes, their facets and facet classes.
//!
//! Facets are 4×4 integer matrices `F` in the expectation-table layout; a table
//! `T` satisfies the facet when `F·T = Σ F[r][c] T[r][c] ≥ 0`, with `F[0][0]`
//! playing the role of the constant term.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{
    facet_enumeration, facet_enumeration_cached, CacheStatus, HPolytope, HullCache, Inequality,
    RationalVector, VPolytope,
};
use crate::qcore::{clifford_group, CgTable, CliffordElement};

pub type IntTable = [[i64; 4]; 4];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FacetClass {
    Triv,
    I2222,
    I3322,
    Alpha,
    Beta,
}

impl FacetClass {
    pub fn label(self) -> &'static str {
        match self {
            FacetClass::Triv => "TRIV",
            FacetClass::I2222 => "I2222",
            FacetClass::I3322 => "I3322",
            FacetClass::Alpha => "ALPHA",
            FacetClass::Beta => "BETA",
        }
    }
}

impl fmt::Display for FacetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PolytopeKind {
    Lhv,
    Clifford,
}

impl PolytopeKind {
    pub fn label(self) -> &'static str {
        match self {
            PolytopeKind::Lhv => "LHV",
            PolytopeKind::Clifford => "CLIFFORD",
        }
    }

    fn file_stem(self) -> &'static str {
        match self {
            PolytopeKind::Lhv => "lhv",
            PolytopeKind::Clifford => "clifford",
        }
    }

    /// Facet classes and their expected sizes.
    pub fn expected_census(self) -> BTreeMap<FacetClass, usize> {
        match self {
            PolytopeKind::Lhv => [
                (FacetClass::Triv, 36),
                (FacetClass::I2222, 72),
                (FacetClass::I3322, 576),
            ]
            .into(),
            PolytopeKind::Clifford => [(FacetClass::Alpha, 48), (FacetClass::Beta, 72)].into(),
        }
    }
}

impl fmt::Display for PolytopeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `2 − XX − XY − YX + YY ≥ 0`.
pub const CANONICAL_I2222: IntTable = [[2, 0, 0, 0], [0, -1, -1, 0], [0, -1, 1, 0], [0, 0, 0, 0]];
pub const CANONICAL_TRIV: IntTable = [[1, -1, 0, 0], [-1, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]];
pub const CANONICAL_I3322: IntTable = [[4, -1, -1, 0], [-1, 1, 1, -1], [-1, 1, 1, 1], [0, -1, 1, 0]];
pub const CANONICAL_ALPHA: IntTable = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 1, 0, 0], [0, 1, 0, 0]];
pub const CANONICAL_BETA: IntTable = [[1, 0, 0, 0], [0, -1, -1, 0], [0, -1, 1, 0], [0, 0, 0, 1]];

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Facet {
    pub coeffs: IntTable,
    #[serde(rename = "class")]
    pub klass: FacetClass,
    pub polytope: PolytopeKind,
}

impl Facet {
    pub fn new(coeffs: IntTable, polytope: PolytopeKind) -> Result<Self> {
        let klass = classify_facet(&coeffs, polytope)?;
        Ok(Self {
            coeffs,
            klass,
            polytope,
        })
    }

    /// `F·T` for a floating-point table.
    pub fn value(&self, table: &CgTable) -> f64 {
        frobenius(&self.coeffs, table)
    }

    pub fn value_int(&self, table: &IntTable) -> i64 {
        let mut acc = 0;
        for r in 0..4 {
            for c in 0..4 {
                acc += self.coeffs[r][c] * table[r][c];
            }
        }
        acc
    }

    /// The facet as an inequality on the 15 table coordinates.
    pub fn to_inequality(&self) -> Inequality {
        let normal = self
            .coeffs
            .iter()
            .flatten()
            .skip(1)
            .map(|&x| BigInt::from(x))
            .collect();
        Inequality {
            offset: BigInt::from(self.coeffs[0][0]),
            normal,
        }
    }

    /// The image `L F Rᵀ` under the table map `T ↦ L T Rᵀ` (orthogonal `L`, `R`).
    pub fn transformed(&self, left: &IntTable, right: &IntTable) -> IntTable {
        conjugate(&self.coeffs, left, right)
    }
}

pub fn frobenius(coeffs: &IntTable, table: &CgTable) -> f64 {
    let mut acc = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            acc += coeffs[r][c] as f64 * table.entries[r][c];
        }
    }
    acc
}

/// Exact `F·T` on a rational table given by its 15 coordinates.
pub fn frobenius_exact(coeffs: &IntTable, coords: &RationalVector) -> BigRational {
    let mut acc = BigRational::from_integer(BigInt::from(coeffs[0][0]));
    for (k, q) in coords.coords().iter().enumerate() {
        let f = coeffs[(k + 1) / 4][(k + 1) % 4];
        if f != 0 {
            acc += q * BigRational::from_integer(BigInt::from(f));
        }
    }
    acc
}

fn matmul(a: &IntTable, b: &IntTable) -> IntTable {
    let mut out = [[0; 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = (0..4).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

pub fn transpose(a: &IntTable) -> IntTable {
    let mut out = [[0; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[c][r] = a[r][c];
        }
    }
    out
}

/// `L A Rᵀ`.
pub fn conjugate(a: &IntTable, left: &IntTable, right: &IntTable) -> IntTable {
    matmul(&matmul(left, a), &transpose(right))
}

/// All 48 signed permutations of `X, Y, Z`, as `1 ⊕ P`.
pub fn signed_relabelings() -> Vec<IntTable> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(48);
    for perm in PERMS {
        for signs in 0..8 {
            let mut m = [[0; 4]; 4];
            m[0][0] = 1;
            for (j, &k) in perm.iter().enumerate() {
                m[k + 1][j + 1] = if signs >> j & 1 == 1 { -1 } else { 1 };
            }
            out.push(m);
        }
    }
    out
}

/// The six bits of a deterministic local configuration: `a, b, c` for the
/// first party's `X, Y, Z` outcomes and `d, e, f` for the second party's.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LocalConfigBits {
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
    pub e: bool,
    pub f: bool,
}

impl LocalConfigBits {
    /// Bit `i` of `mask` is `a, b, c, d, e, f` for `i = 0..6`.
    pub fn from_mask(mask: u8) -> Self {
        let bit = |i: u8| mask >> i & 1 == 1;
        Self {
            a: bit(0),
            b: bit(1),
            c: bit(2),
            d: bit(3),
            e: bit(4),
            f: bit(5),
        }
    }

    pub fn all() -> impl Iterator<Item = LocalConfigBits> {
        (0u8..64).map(Self::from_mask)
    }
}

pub fn lhv_vertex(bits: LocalConfigBits) -> IntTable {
    let sign = |b: bool| if b { -1 } else { 1 };
    let cols = [1, sign(bits.a), sign(bits.b), sign(bits.c)];
    let rows = [1, sign(bits.d), sign(bits.e), sign(bits.f)];
    let mut t = [[0; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            t[r][c] = rows[r] * cols[c];
        }
    }
    t
}

/// Table of the Choi state of the identity channel.
pub const IDENTITY_TABLE: IntTable = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]];

/// Table of the Choi state of `ρ ↦ C ρ C†`.
pub fn clifford_vertex(c: &CliffordElement) -> IntTable {
    matmul(&c.rotation4(), &IDENTITY_TABLE)
}

/// The 24 Clifford vertices, in group enumeration order.
pub fn clifford_vertices() -> Vec<IntTable> {
    clifford_group().iter().map(clifford_vertex).collect()
}

pub fn int_table_to_cg(t: &IntTable) -> CgTable {
    let mut entries = [[0.0; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            entries[r][c] = t[r][c] as f64;
        }
    }
    CgTable::new(entries)
}

pub fn int_table_coords(t: &IntTable) -> RationalVector {
    RationalVector::from_integers(t.iter().flatten().skip(1).copied())
}

fn is_unit(x: i64) -> bool {
    x == 1 || x == -1
}

/// Class label from the structural signature of a facet matrix.
pub fn classify_facet(f: &IntTable, polytope: PolytopeKind) -> Result<FacetClass> {
    let unrecognized = || Error::UnrecognizedFacet(format!("{polytope}: {f:?}"));
    let row_locals: Vec<usize> = (1..4).filter(|&c| f[0][c] != 0).collect();
    let col_locals: Vec<usize> = (1..4).filter(|&r| f[r][0] != 0).collect();
    let mut corr: Vec<(usize, usize)> = Vec::new();
    for r in 1..4 {
        for c in 1..4 {
            if f[r][c] != 0 {
                corr.push((r, c));
            }
        }
    }
    let all_units = (0..4)
        .flat_map(|r| (0..4).map(move |c| (r, c)))
        .filter(|&rc| rc != (0, 0))
        .all(|(r, c)| f[r][c] == 0 || is_unit(f[r][c]));
    if !all_units {
        return Err(unrecognized());
    }
    let is_chsh_block = |cells: &[(usize, usize)]| {
        let mut rows: Vec<usize> = cells.iter().map(|x| x.0).collect();
        let mut cols: Vec<usize> = cells.iter().map(|x| x.1).collect();
        rows.sort();
        rows.dedup();
        cols.sort();
        cols.dedup();
        cells.len() == 4
            && rows.len() == 2
            && cols.len() == 2
            && cells.iter().map(|&(r, c)| f[r][c]).product::<i64>() == -1
    };
    let locals = row_locals.len() + col_locals.len();
    let class = match (polytope, f[0][0]) {
        (PolytopeKind::Lhv, 1) => {
            let ok = row_locals.len() == 1
                && col_locals.len() == 1
                && corr == [(col_locals[0], row_locals[0])];
            ok.then_some(FacetClass::Triv)
        }
        (PolytopeKind::Lhv, 2) => (locals == 0 && is_chsh_block(&corr)).then_some(FacetClass::I2222),
        (PolytopeKind::Lhv, 4) => {
            let ok = row_locals.len() == 2 && col_locals.len() == 2 && corr.len() == 8;
            ok.then_some(FacetClass::I3322)
        }
        (PolytopeKind::Clifford, 1) if locals == 0 => {
            let same_row = corr.len() == 3 && corr.iter().all(|x| x.0 == corr[0].0);
            let same_col = corr.len() == 3 && corr.iter().all(|x| x.1 == corr[0].1);
            if same_row || same_col {
                Some(FacetClass::Alpha)
            } else if corr.len() == 5 {
                (0..5)
                    .find(|&i| {
                        let (sr, sc) = corr[i];
                        let block: Vec<(usize, usize)> =
                            corr.iter().copied().filter(|&x| x != corr[i]).collect();
                        is_chsh_block(&block)
                            && block.iter().all(|&(r, c)| r != sr && c != sc)
                    })
                    .map(|_| FacetClass::Beta)
            } else {
                None
            }
        }
        _ => None,
    };
    class.ok_or_else(unrecognized)
}

/// A fully enumerated polytope with classified facets.
#[derive(Clone, Debug)]
pub struct BuiltPolytope {
    pub kind: PolytopeKind,
    pub vertex_tables: Vec<IntTable>,
    pub vpolytope: VPolytope,
    pub hpolytope: HPolytope,
    pub facets: Vec<Facet>,
    pub cache_status: Option<CacheStatus>,
}

impl BuiltPolytope {
    pub fn census(&self) -> BTreeMap<FacetClass, usize> {
        let mut out = BTreeMap::new();
        for f in &self.facets {
            *out.entry(f.klass).or_insert(0) += 1;
        }
        out
    }

    pub fn census_matches(&self) -> bool {
        self.census() == self.kind.expected_census()
    }

    pub fn facets_of(&self, class: FacetClass) -> impl Iterator<Item = &Facet> {
        self.facets.iter().filter(move |f| f.klass == class)
    }

    pub fn contains_coeffs(&self, coeffs: &IntTable) -> bool {
        self.facets.iter().any(|f| f.coeffs == *coeffs)
    }
}

fn vertex_tables(kind: PolytopeKind) -> Vec<IntTable> {
    match kind {
        PolytopeKind::Lhv => LocalConfigBits::all().map(lhv_vertex).collect(),
        PolytopeKind::Clifford => clifford_vertices(),
    }
}

fn inequality_to_table(ineq: &Inequality) -> Result<IntTable> {
    let mut t = [[0; 4]; 4];
    let to_i64 = |x: &BigInt| {
        x.to_i64()
            .ok_or_else(|| Error::Inconsistent(format!("facet coefficient {x} overflows")))
    };
    t[0][0] = to_i64(&ineq.offset)?;
    for (k, x) in ineq.normal.iter().enumerate() {
        t[(k + 1) / 4][(k + 1) % 4] = to_i64(x)?;
    }
    Ok(t)
}

/// Enumerates and classifies a polytope, optionally through the on-disk cache.
pub fn build_polytope(kind: PolytopeKind, cache: Option<&HullCache>) -> Result<BuiltPolytope> {
    let tables = vertex_tables(kind);
    let vpolytope = VPolytope::new(tables.iter().map(int_table_coords).collect())?;
    let (hpolytope, cache_status) = match cache {
        Some(c) => {
            let (h, s) = facet_enumeration_cached(&vpolytope, c, kind.file_stem())?;
            (h, Some(s))
        }
        None => (facet_enumeration(&vpolytope)?, None),
    };
    let mut facets = hpolytope
        .facets
        .iter()
        .map(|ineq| Facet::new(inequality_to_table(ineq)?, kind))
        .collect::<Result<Vec<_>>>()?;
    facets.sort();
    Ok(BuiltPolytope {
        kind,
        vertex_tables: tables,
        vpolytope,
        hpolytope,
        facets,
        cache_status,
    })
}

pub fn build_lhv_polytope() -> Result<BuiltPolytope> {
    build_polytope(PolytopeKind::Lhv, None)
}

pub fn build_clifford_polytope() -> Result<BuiltPolytope> {
    build_polytope(PolytopeKind::Clifford, None)
}

static LHV: OnceLock<BuiltPolytope> = OnceLock::new();
static CLIFFORD: OnceLock<BuiltPolytope> = OnceLock::new();

/// Process-wide LHV polytope, enumerated on first use.
pub fn lhv_polytope() -> &'static BuiltPolytope {
    LHV.get_or_init(|| build_lhv_polytope().expect("LHV enumeration"))
}

/// Process-wide Clifford polytope, enumerated on first use.
pub fn clifford_polytope() -> &'static BuiltPolytope {
    CLIFFORD.get_or_init(|| build_clifford_polytope().expect("Clifford enumeration"))
}

pub fn polytope(kind: PolytopeKind) -> &'static BuiltPolytope {
    match kind {
        PolytopeKind::Lhv => lhv_polytope(),
        PolytopeKind::Clifford => clifford_polytope(),
    }
}

/// Canonical JSON dump of a classified facet list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetDump {
    pub polytope: PolytopeKind,
    pub vertex_hash: String,
    pub affine_dim: usize,
    pub census: BTreeMap<FacetClass, usize>,
    pub facets: Vec<Facet>,
}

impl FacetDump {
    pub fn from_built(built: &BuiltPolytope) -> Self {
        Self {
            polytope: built.kind,
            vertex_hash: crate::geometry::content_hash(&built.vpolytope),
            affine_dim: built.hpolytope.affine_dim,
            census: built.census(),
            facets: built.facets.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// SHA-256 of the canonical JSON text.
    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.to_json()?.as_bytes())))
    }

    pub fn path_in(dir: &Path, kind: PolytopeKind) -> PathBuf {
        dir.join(format!("{}_facets.json", kind.file_stem()))
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = Self::path_in(dir, self.polytope);
        fs::write(&path, self.to_json()?)?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}
