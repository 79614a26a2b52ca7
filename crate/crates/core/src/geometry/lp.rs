//! Exact convex-hull membership by phase-one simplex.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{Inequality, RationalVector, VPolytope};
use crate::error::{Error, Result};

/// Proof that a point is inside or outside `conv(V)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SeparationCertificate {
    /// Convex weights on vertex indices reproducing the point.
    Inside { weights: Vec<(usize, RationalWeight)> },
    /// Valid on every vertex, strictly negative at the point.
    Outside { separator: Inequality },
}

/// A rational weight serialized as a string such as `"3/8"`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RationalWeight(pub BigRational);

impl Serialize for RationalWeight {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for RationalWeight {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse::<BigRational>()
            .map(RationalWeight)
            .map_err(serde::de::Error::custom)
    }
}

impl SeparationCertificate {
    pub fn is_inside(&self) -> bool {
        matches!(self, Self::Inside { .. })
    }

    pub fn separator(&self) -> Option<&Inequality> {
        match self {
            Self::Outside { separator } => Some(separator),
            Self::Inside { .. } => None,
        }
    }

    /// Re-checks the certificate exactly against `point` and `vp`.
    pub fn verify(&self, point: &RationalVector, vp: &VPolytope) -> bool {
        match self {
            Self::Inside { weights } => {
                let mut sum = BigRational::zero();
                let mut acc = vec![BigRational::zero(); point.dim()];
                for (i, RationalWeight(w)) in weights {
                    let Some(v) = vp.vertices().get(*i) else {
                        return false;
                    };
                    if w.is_negative() {
                        return false;
                    }
                    sum += w;
                    for (a, x) in acc.iter_mut().zip(v.coords()) {
                        *a += w * x;
                    }
                }
                sum.is_one() && acc == point.coords()
            }
            Self::Outside { separator } => {
                separator.evaluate(point).is_negative()
                    && vp
                        .vertices()
                        .iter()
                        .all(|v| !separator.evaluate(v).is_negative())
            }
        }
    }
}

struct Tableau {
    /// Constraint rows followed by the reduced-cost row; last column is the rhs.
    rows: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        self.rows[r].iter_mut().for_each(|x| *x *= &inv);
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }
}

/// Decides whether `point ∈ conv(V)` exactly and returns a checkable certificate.
pub fn lp_membership(point: &RationalVector, vp: &VPolytope) -> Result<SeparationCertificate> {
    let d = vp.dim();
    if point.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: point.dim(),
        });
    }
    let n = vp.len();
    let m = d + 1;
    let width = n + m + 1;

    // Row 0: Σλ = 1. Row 1+j: Σλ v_j = x_j. Rows are flipped so the rhs is nonnegative.
    let mut flips = vec![false; m];
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let mut row = vec![BigRational::zero(); width];
        for (k, v) in vp.vertices().iter().enumerate() {
            row[k] = if i == 0 {
                BigRational::one()
            } else {
                v.coords()[i - 1].clone()
            };
        }
        row[n + i] = BigRational::one();
        row[width - 1] = if i == 0 {
            BigRational::one()
        } else {
            point.coords()[i - 1].clone()
        };
        if row[width - 1].is_negative() {
            flips[i] = true;
            for k in (0..n).chain(std::iter::once(width - 1)) {
                row[k] = -row[k].clone();
            }
        }
        rows.push(row);
    }
    let mut cost = vec![BigRational::zero(); width];
    for row in &rows {
        for k in 0..n {
            cost[k] -= &row[k];
        }
        cost[width - 1] -= &row[width - 1];
    }
    rows.push(cost);
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
    };

    // Bland's rule; artificial columns never re-enter.
    loop {
        let Some(c) = (0..n).find(|&k| t.rows[m][k].is_negative()) else {
            break;
        };
        let mut best: Option<(usize, BigRational)> = None;
        for r in 0..m {
            let a = &t.rows[r][c];
            if !a.is_positive() {
                continue;
            }
            let ratio = &t.rows[r][width - 1] / a;
            let better = match &best {
                None => true,
                Some((br, bv)) => ratio < *bv || (ratio == *bv && t.basis[r] < t.basis[*br]),
            };
            if better {
                best = Some((r, ratio));
            }
        }
        let (r, _) = best.ok_or_else(|| Error::Inconsistent("phase-one LP unbounded".into()))?;
        t.pivot(r, c);
    }

    let objective = -t.rows[m][width - 1].clone();
    if objective.is_zero() {
        let mut weights: Vec<(usize, RationalWeight)> = t
            .basis
            .iter()
            .enumerate()
            .filter(|&(r, &b)| b < n && !t.rows[r][width - 1].is_zero())
            .map(|(r, &b)| (b, RationalWeight(t.rows[r][width - 1].clone())))
            .collect();
        weights.sort();
        return Ok(SeparationCertificate::Inside { weights });
    }

    // Dual of phase one: u_i = 1 − (reduced cost of artificial i), then undo the flips.
    let y: Vec<BigRational> = (0..m)
        .map(|i| {
            let u = BigRational::one() - &t.rows[m][n + i];
            if flips[i] {
                -u
            } else {
                u
            }
        })
        .collect();
    let normal: Vec<BigRational> = y[1..].iter().map(|v| -v.clone()).collect();
    let separator = Inequality::from_rational(&normal, &-y[0].clone());
    let cert = SeparationCertificate::Outside { separator };
    if !cert.verify(point, vp) {
        return Err(Error::BadCertificate(
            "phase-one dual does not separate".into(),
        ));
    }
    Ok(cert)
}
