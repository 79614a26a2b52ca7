//! Facet violation tests, the CHSH/β pairing, UQC verdicts and threshold scans.

use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::channels::{
    make_dephased_phase_gate, make_depolarized_phase_gate, Channel, DephasedPhaseGate,
    DepolarizedPhaseGate,
};
use crate::distill::{prepare_ancilla, AncillaReport, ParityMeasurement};
use crate::error::{Error, Result};
use crate::geometry::{lp_membership, RationalVector, RationalWeight, SeparationCertificate};
use crate::polytopes::{
    clifford_polytope, lhv_polytope, Facet, FacetClass, IntTable, PolytopeKind,
};
use crate::qcore::{clifford_group, CgTable, Pauli};

/// Facet values below `−VIOLATION_TOL` count as violations.
pub const VIOLATION_TOL: f64 = 1e-12;
/// Precision used to rationalize table entries before an LP.
pub const DEFAULT_LP_PRECISION: f64 = 1e-12;
pub const DEFAULT_THRESHOLD_TOL: f64 = 1e-9;
pub const MAX_BISECTION_STEPS: usize = 60;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub facet: Facet,
    pub value: f64,
    pub violated: bool,
    /// `−value` when violated, otherwise 0.
    pub margin: f64,
}

impl ViolationReport {
    pub fn new(facet: &Facet, table: &CgTable) -> Self {
        let value = evaluate_facet(facet, table);
        let violated = value < -VIOLATION_TOL;
        Self {
            facet: facet.clone(),
            value,
            violated,
            margin: if violated { -value } else { 0.0 },
        }
    }
}

pub fn evaluate_facet(f: &Facet, t: &CgTable) -> f64 {
    f.value(t)
}

/// One report per facet of `class`, in canonical facet order.
pub fn scan_class(table: &CgTable, class: FacetClass) -> Vec<ViolationReport> {
    let p = match class {
        FacetClass::Alpha | FacetClass::Beta => clifford_polytope(),
        _ => lhv_polytope(),
    };
    p.facets_of(class)
        .map(|f| ViolationReport::new(f, table))
        .collect()
}

pub fn chsh_scan_table(table: &CgTable) -> Vec<ViolationReport> {
    scan_class(table, FacetClass::I2222)
}

/// The 72 CHSH facets evaluated on the channel's table.
pub fn chsh_scan(channel: &Channel) -> Vec<ViolationReport> {
    chsh_scan_table(&channel.cg_table())
}

fn most_violated(reports: Vec<ViolationReport>) -> Option<ViolationReport> {
    reports
        .into_iter()
        .filter(|r| r.violated)
        .min_by(|a, b| a.value.total_cmp(&b.value))
}

/// Smallest value over a facet class (the most negative one is the strongest violation).
pub fn min_value(table: &CgTable, class: FacetClass) -> f64 {
    scan_class(table, class)
        .iter()
        .map(|r| r.value)
        .fold(f64::INFINITY, f64::min)
}

/// `f2222 − fβ` when it is `1` at the constant term and a single `±1` elsewhere.
fn pairing_position(f2222: &IntTable, beta: &IntTable) -> Option<(usize, usize)> {
    let mut pos = None;
    for r in 0..4 {
        for c in 0..4 {
            let d = f2222[r][c] - beta[r][c];
            match (r, c, d) {
                (0, 0, 1) => {}
                (0, 0, _) => return None,
                (_, _, 0) => {}
                (_, _, -1 | 1) if f2222[r][c] == 0 && pos.is_none() => pos = Some((r, c)),
                _ => return None,
            }
        }
    }
    pos
}

/// The unique β facet that agrees with a CHSH facet except at one position.
pub fn chsh_beta_partner(f2222: &Facet) -> Result<Facet> {
    if f2222.klass != FacetClass::I2222 {
        return Err(Error::InvalidParameter(format!(
            "expected an I2222 facet, got {}",
            f2222.klass
        )));
    }
    let mut matches = clifford_polytope()
        .facets_of(FacetClass::Beta)
        .filter(|b| pairing_position(&f2222.coeffs, &b.coeffs).is_some());
    let first = matches
        .next()
        .ok_or_else(|| Error::Inconsistent(format!("no β partner for {:?}", f2222.coeffs)))?;
    if matches.next().is_some() {
        return Err(Error::Inconsistent(format!(
            "several β partners for {:?}",
            f2222.coeffs
        )));
    }
    Ok(first.clone())
}

/// All CHSH/β pairs; fails unless the pairing is a bijection.
pub fn chsh_beta_pairing() -> Result<Vec<(Facet, Facet)>> {
    let pairs = lhv_polytope()
        .facets_of(FacetClass::I2222)
        .map(|f| chsh_beta_partner(f).map(|b| (f.clone(), b)))
        .collect::<Result<Vec<_>>>()?;
    let mut betas: Vec<&IntTable> = pairs.iter().map(|(_, b)| &b.coeffs).collect();
    betas.sort();
    betas.dedup();
    let total = clifford_polytope().facets_of(FacetClass::Beta).count();
    if betas.len() != pairs.len() || betas.len() != total {
        return Err(Error::Inconsistent(format!(
            "pairing covers {} of {total} β facets with {} CHSH facets",
            betas.len(),
            pairs.len()
        )));
    }
    Ok(pairs)
}

/// `f2222 − fβ` for a pair.
pub fn difference_matrix(f2222: &Facet, beta: &Facet) -> IntTable {
    let mut d = [[0; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            d[r][c] = f2222.coeffs[r][c] - beta.coeffs[r][c];
        }
    }
    d
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedViolation {
    pub chsh: ViolationReport,
    pub beta: ViolationReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingCheck {
    /// Every violated CHSH facet has a β partner violated at least as much.
    pub holds: bool,
    pub pairs: Vec<PairedViolation>,
    pub most_violated_beta: Option<ViolationReport>,
}

pub fn verify_pairing_table(table: &CgTable) -> Result<PairingCheck> {
    let mut pairs = Vec::new();
    for chsh in chsh_scan_table(table).into_iter().filter(|r| r.violated) {
        let beta = ViolationReport::new(&chsh_beta_partner(&chsh.facet)?, table);
        pairs.push(PairedViolation { chsh, beta });
    }
    let holds = pairs
        .iter()
        .all(|p| p.beta.violated && p.beta.value <= p.chsh.value + VIOLATION_TOL);
    Ok(PairingCheck {
        holds,
        pairs,
        most_violated_beta: most_violated(scan_class(table, FacetClass::Beta)),
    })
}

pub fn verify_pairing(channel: &Channel) -> Result<PairingCheck> {
    verify_pairing_table(&channel.cg_table())
}

/// `Π = ½(𝕀 ± σ_j⊗σ_k)` read off the entry of a β facet outside its CHSH block.
pub fn recommend_measurement(beta: &Facet) -> Result<ParityMeasurement> {
    if beta.klass != FacetClass::Beta {
        return Err(Error::InvalidParameter(format!(
            "expected a BETA facet, got {}",
            beta.klass
        )));
    }
    let cells: Vec<(usize, usize)> = (1..4)
        .flat_map(|r| (1..4).map(move |c| (r, c)))
        .filter(|&(r, c)| beta.coeffs[r][c] != 0)
        .collect();
    let singleton = cells
        .iter()
        .find(|&&(r, c)| cells.iter().all(|&(r2, c2)| (r2, c2) == (r, c) || (r2 != r && c2 != c)))
        .ok_or_else(|| Error::UnrecognizedFacet(format!("{:?}", beta.coeffs)))?;
    let (r, c) = *singleton;
    ParityMeasurement::new(
        Pauli::from_index(c),
        Pauli::from_index(r),
        beta.coeffs[r][c].signum() as i8,
    )
}

/// `zeroed = ½ Σ terms` with four CHSH facets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition3322 {
    pub zeroed: IntTable,
    pub terms: Vec<Facet>,
}

impl Decomposition3322 {
    /// Exact integer check of `2 · zeroed = Σ terms`.
    pub fn verify(&self) -> bool {
        let mut sum = [[0i64; 4]; 4];
        for t in &self.terms {
            if t.klass != FacetClass::I2222 {
                return false;
            }
            for r in 0..4 {
                for c in 0..4 {
                    sum[r][c] += t.coeffs[r][c];
                }
            }
        }
        self.terms.len() == 4
            && (0..4).all(|r| (0..4).all(|c| sum[r][c] == 2 * self.zeroed[r][c]))
    }
}

pub fn zero_locals(f: &IntTable) -> IntTable {
    let mut z = *f;
    for i in 1..4 {
        z[0][i] = 0;
        z[i][0] = 0;
    }
    z
}

/// Writes an `I3322` facet with its local terms dropped as half a sum of four CHSH facets.
pub fn decompose_3322(f: &Facet) -> Result<Decomposition3322> {
    if f.klass != FacetClass::I3322 {
        return Err(Error::InvalidParameter(format!(
            "expected an I3322 facet, got {}",
            f.klass
        )));
    }
    let zeroed = zero_locals(&f.coeffs);
    let mut target = zeroed;
    target.iter_mut().flatten().for_each(|x| *x *= 2);
    let compatible = |g: &Facet| {
        (1..4).all(|r| {
            (1..4).all(|c| g.coeffs[r][c] == 0 || g.coeffs[r][c] == zeroed[r][c])
        })
    };
    let candidates: Vec<&Facet> = lhv_polytope()
        .facets_of(FacetClass::I2222)
        .filter(|g| compatible(g))
        .collect();

    fn search<'a>(
        candidates: &[&'a Facet],
        start: usize,
        remaining: &mut IntTable,
        chosen: &mut Vec<&'a Facet>,
    ) -> bool {
        if chosen.len() == 4 {
            return remaining.iter().flatten().all(|&x| x == 0);
        }
        for i in start..candidates.len() {
            let g = candidates[i];
            let fits = (0..4).all(|r| {
                (0..4).all(|c| {
                    let left = remaining[r][c] - g.coeffs[r][c];
                    left == 0 || left.signum() == remaining[r][c].signum()
                })
            });
            if !fits {
                continue;
            }
            for r in 0..4 {
                for c in 0..4 {
                    remaining[r][c] -= g.coeffs[r][c];
                }
            }
            chosen.push(g);
            if search(candidates, i, remaining, chosen) {
                return true;
            }
            chosen.pop();
            for r in 0..4 {
                for c in 0..4 {
                    remaining[r][c] += g.coeffs[r][c];
                }
            }
        }
        false
    }

    let mut chosen = Vec::new();
    if !search(&candidates, 0, &mut target, &mut chosen) {
        return Err(Error::Inconsistent(format!(
            "no CHSH decomposition for {:?}",
            f.coeffs
        )));
    }
    let d = Decomposition3322 {
        zeroed,
        terms: chosen.into_iter().cloned().collect(),
    };
    debug_assert!(d.verify());
    Ok(d)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedWeight {
    pub gate: String,
    pub weight: RationalWeight,
    pub approx: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum UqcVerdict {
    /// A convex combination of Clifford gates; useless for UQC.
    CliffordMixture {
        weights: Vec<NamedWeight>,
        certificate: SeparationCertificate,
    },
    BetaViolation {
        report: ViolationReport,
        measurement: ParityMeasurement,
        certificate: SeparationCertificate,
    },
    /// Outside the Clifford polytope without a violated β facet; no UQC claim is made.
    OutsideUndetected {
        most_violated: Option<ViolationReport>,
        certificate: SeparationCertificate,
    },
}

impl UqcVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            UqcVerdict::CliffordMixture { .. } => "CLIFFORD_MIXTURE",
            UqcVerdict::BetaViolation { .. } => "BETA_VIOLATION",
            UqcVerdict::OutsideUndetected { .. } => "OUTSIDE_UNDETECTED",
        }
    }

    pub fn certificate(&self) -> &SeparationCertificate {
        match self {
            UqcVerdict::CliffordMixture { certificate, .. }
            | UqcVerdict::BetaViolation { certificate, .. }
            | UqcVerdict::OutsideUndetected { certificate, .. } => certificate,
        }
    }
}

impl fmt::Display for UqcVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn table_point(table: &CgTable, precision: f64) -> RationalVector {
    RationalVector::from_f64(&table.coords(), precision)
}

/// Exact membership of a rational table in the Clifford polytope.
pub fn clifford_membership(point: &RationalVector) -> Result<SeparationCertificate> {
    lp_membership(point, &clifford_polytope().vpolytope)
}

pub fn uqc_witness_table(table: &CgTable, precision: f64) -> Result<UqcVerdict> {
    let point = table_point(table, precision);
    let certificate = clifford_membership(&point)?;
    let group = clifford_group();
    match &certificate {
        SeparationCertificate::Inside { weights } => {
            let weights = weights
                .iter()
                .map(|(i, w)| NamedWeight {
                    gate: group[*i].name().to_string(),
                    approx: w.0.to_f64().unwrap_or(f64::NAN),
                    weight: w.clone(),
                })
                .collect();
            Ok(UqcVerdict::CliffordMixture {
                weights,
                certificate,
            })
        }
        SeparationCertificate::Outside { .. } => {
            match most_violated(scan_class(table, FacetClass::Beta)) {
                Some(report) => Ok(UqcVerdict::BetaViolation {
                    measurement: recommend_measurement(&report.facet)?,
                    report,
                    certificate,
                }),
                None => Ok(UqcVerdict::OutsideUndetected {
                    most_violated: most_violated(scan_class(table, FacetClass::Alpha)),
                    certificate,
                }),
            }
        }
    }
}

pub fn uqc_witness(channel: &Channel) -> Result<UqcVerdict> {
    uqc_witness_table(&channel.cg_table(), DEFAULT_LP_PRECISION)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    DephasedPhase,
    DepolarizedPhase,
}

impl Family {
    pub fn parameter_name(self) -> &'static str {
        match self {
            Family::DephasedPhase => "s",
            Family::DepolarizedPhase => "p",
        }
    }

    pub fn default_range(self) -> (f64, f64) {
        match self {
            Family::DephasedPhase => (0.0, 3.0),
            Family::DepolarizedPhase => (0.0, 1.0),
        }
    }

    pub fn channel(self, theta: f64, param: f64) -> Result<Channel> {
        match self {
            Family::DephasedPhase => make_dephased_phase_gate(DephasedPhaseGate { theta, s: param }),
            Family::DepolarizedPhase => {
                make_depolarized_phase_gate(DepolarizedPhaseGate { theta, p: param })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Criterion {
    Chsh,
    Beta,
    Membership,
}

impl Criterion {
    pub fn label(self) -> &'static str {
        match self {
            Criterion::Chsh => "CHSH",
            Criterion::Beta => "BETA",
            Criterion::Membership => "MEMBERSHIP",
        }
    }

    /// True when the table is flagged: a violated facet, or outside the Clifford polytope.
    pub fn flags(self, table: &CgTable) -> Result<bool> {
        Ok(match self {
            Criterion::Chsh => min_value(table, FacetClass::I2222) < -VIOLATION_TOL,
            Criterion::Beta => min_value(table, FacetClass::Beta) < -VIOLATION_TOL,
            Criterion::Membership => {
                !clifford_membership(&table_point(table, DEFAULT_LP_PRECISION))?.is_inside()
            }
        })
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub family: Family,
    pub theta: f64,
    pub criterion: Criterion,
    pub parameter: String,
    /// Midpoint of the final bracket.
    pub critical_value: f64,
    pub bracket: (f64, f64),
    pub bracket_width: f64,
    pub flagged_below: bool,
    /// Phase-flip probability at the critical point (dephased family only).
    pub noise_rate: Option<f64>,
}

/// Bisects the family parameter until the criterion's flip is bracketed within `tol`.
pub fn threshold_scan(
    family: Family,
    theta: f64,
    criterion: Criterion,
    tol: f64,
    range: Option<(f64, f64)>,
) -> Result<ThresholdResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let (mut lo, mut hi) = range.unwrap_or_else(|| family.default_range());
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!("empty range [{lo}, {hi}]")));
    }
    let flag = |x: f64| family.channel(theta, x).and_then(|ch| criterion.flags(&ch.cg_table()));
    let flag_lo = flag(lo)?;
    if flag_lo == flag(hi)? {
        return Err(Error::NoSignChange {
            criterion: criterion.label().into(),
            lo,
            hi,
        });
    }
    for _ in 0..MAX_BISECTION_STEPS {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if flag(mid)? == flag_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let critical = 0.5 * (lo + hi);
    Ok(ThresholdResult {
        family,
        theta,
        criterion,
        parameter: family.parameter_name().into(),
        critical_value: critical,
        bracket: (lo, hi),
        bracket_width: hi - lo,
        flagged_below: flag_lo,
        noise_rate: (family == Family::DephasedPhase)
            .then(|| DephasedPhaseGate { theta, s: critical }.noise_rate()),
    })
}

/// One grid point of a family sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: f64,
    /// `−min` over CHSH facets; positive when violated.
    pub chsh_margin: f64,
    pub beta_margin: f64,
    pub outside_clifford: bool,
}

pub fn sweep(family: Family, theta: f64, params: &[f64]) -> Result<Vec<SweepRow>> {
    params
        .iter()
        .map(|&x| {
            let t = family.channel(theta, x)?.cg_table();
            Ok(SweepRow {
                parameter: x,
                chsh_margin: -min_value(&t, FacetClass::I2222),
                beta_margin: -min_value(&t, FacetClass::Beta),
                outside_clifford: Criterion::Membership.flags(&t)?,
            })
        })
        .collect()
}

pub fn sweep_csv(param_name: &str, rows: &[SweepRow]) -> String {
    let mut out = format!("{param_name},chsh_margin,beta_margin,outside_clifford\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.parameter, r.chsh_margin, r.beta_margin, r.outside_clifford
        ));
    }
    out
}

/// The full per-channel pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub table: CgTable,
    pub unital: bool,
    pub chsh_violations: Vec<ViolationReport>,
    pub pairing: PairingCheck,
    pub verdict: UqcVerdict,
    pub ancilla: Option<AncillaReport>,
}

pub fn analyze_channel(channel: &Channel, precision: f64) -> Result<AnalysisReport> {
    let table = channel.cg_table();
    let verdict = uqc_witness_table(&table, precision)?;
    let ancilla = match &verdict {
        UqcVerdict::BetaViolation { measurement, .. } => {
            Some(prepare_ancilla(channel, *measurement)?)
        }
        _ => None,
    };
    Ok(AnalysisReport {
        unital: channel.is_unital(crate::qcore::STATE_TOL),
        chsh_violations: chsh_scan_table(&table)
            .into_iter()
            .filter(|r| r.violated)
            .collect(),
        pairing: verify_pairing_table(&table)?,
        verdict,
        ancilla,
        table,
    })
}

/// Polytope the facet class belongs to.
pub fn class_polytope(class: FacetClass) -> PolytopeKind {
    match class {
        FacetClass::Alpha | FacetClass::Beta => PolytopeKind::Clifford,
        _ => PolytopeKind::Lhv,
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    use super::*;
    use crate::polytopes::{CANONICAL_BETA, CANONICAL_I2222, CANONICAL_I3322};

    fn facet(coeffs: IntTable, kind: PolytopeKind) -> Facet {
        Facet::new(coeffs, kind).unwrap()
    }

    #[test]
    fn canonical_values() {
        let chsh = facet(CANONICAL_I2222, PolytopeKind::Lhv);
        assert!(evaluate_facet(&chsh, &Channel::identity().cg_table()).abs() < 1e-12);
        let t = Family::DephasedPhase.channel(FRAC_PI_4, 0.0).unwrap().cg_table();
        assert!((evaluate_facet(&chsh, &t) - (2.0 - 2.0 * SQRT_2)).abs() < 1e-12);
    }

    #[test]
    fn canonical_pair() {
        let chsh = facet(CANONICAL_I2222, PolytopeKind::Lhv);
        let beta = chsh_beta_partner(&chsh).unwrap();
        assert_eq!(beta.coeffs, CANONICAL_BETA);
        let d = difference_matrix(&chsh, &beta);
        let mut want = [[0; 4]; 4];
        want[0][0] = 1;
        want[3][3] = -1;
        assert_eq!(d, want);
        assert_eq!(
            recommend_measurement(&beta).unwrap(),
            ParityMeasurement::even_zz()
        );
        assert!(recommend_measurement(&chsh).is_err());
    }

    #[test]
    fn pairing_is_a_bijection() {
        assert_eq!(chsh_beta_pairing().unwrap().len(), 72);
    }

    #[test]
    fn worked_example_decomposes() {
        let f = facet(CANONICAL_I3322, PolytopeKind::Lhv);
        let d = decompose_3322(&f).unwrap();
        assert!(d.verify());
        assert_eq!(
            d.zeroed,
            [[4, 0, 0, 0], [0, 1, 1, -1], [0, 1, 1, 1], [0, -1, 1, 0]]
        );
    }

    #[test]
    fn identity_has_no_violation() {
        assert!(chsh_scan(&Channel::identity()).iter().all(|r| !r.violated));
        let check = verify_pairing(&Channel::identity()).unwrap();
        assert!(check.holds && check.pairs.is_empty());
    }

    #[test]
    fn clifford_mixture_verdict_recovers_weights() {
        let h = crate::qcore::clifford_by_name("H").unwrap();
        let s = crate::qcore::clifford_by_name("S").unwrap();
        let id = &clifford_group()[0];
        let ch = crate::channels::make_clifford_mixture(&[
            (h, 1.0 / 3.0),
            (s, 0.25),
            (id, 5.0 / 12.0),
        ])
        .unwrap();
        match uqc_witness(&ch).unwrap() {
            UqcVerdict::CliffordMixture { weights, .. } => {
                let mut got: Vec<(String, String)> = weights
                    .iter()
                    .map(|w| (w.gate.clone(), w.weight.0.to_string()))
                    .collect();
                got.sort();
                let mut want = vec![
                    ("H".to_string(), "1/3".to_string()),
                    ("S".to_string(), "1/4".to_string()),
                    ("I".to_string(), "5/12".to_string()),
                ];
                want.sort();
                assert_eq!(got, want);
            }
            v => panic!("unexpected verdict {v}"),
        }
    }

    #[test]
    fn magic_gate_verdicts() {
        let ch = Family::DephasedPhase.channel(FRAC_PI_4, 0.0).unwrap();
        assert!(matches!(uqc_witness(&ch).unwrap(), UqcVerdict::BetaViolation { .. }));
        let ch = Family::DepolarizedPhase.channel(FRAC_PI_4, 0.35).unwrap();
        assert!(chsh_scan(&ch).iter().all(|r| !r.violated));
        let v = uqc_witness(&ch).unwrap();
        assert!(matches!(v, UqcVerdict::BetaViolation { .. }), "{v}");
    }

    #[test]
    fn threshold_errors() {
        assert!(matches!(
            threshold_scan(Family::DephasedPhase, FRAC_PI_4, Criterion::Chsh, 1e-9, Some((0.0, 0.5))),
            Err(Error::NoSignChange { .. })
        ));
        assert!(threshold_scan(Family::DephasedPhase, FRAC_PI_4, Criterion::Chsh, 0.0, None).is_err());
        assert!(threshold_scan(Family::DephasedPhase, FRAC_PI_4, Criterion::Chsh, 1e-9, Some((1.0, 1.0))).is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = sweep(Family::DepolarizedPhase, FRAC_PI_4, &[0.0, 0.5]).unwrap();
        let csv = sweep_csv("p", &rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "p,chsh_margin,beta_margin,outside_clifford");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].ends_with("true"));
        assert!(lines[2].ends_with("false"));
    }
}
