//! Double description method over the integers.
//!
//! Facets of `conv(V)` are the extreme rays of the homogenized cone
//! `{(b, a) : b + a·v ≥ 0 for all v ∈ V}`. Constraints are inserted one at a
//! time in a fixed lexicographic order; adjacency of rays is decided
//! combinatorially from their zero sets.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::hull::affine_hull;
use super::linalg::invert;
use super::{make_primitive, primitive_integer_row, HPolytope, Inequality, RationalVector, VPolytope};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
struct ZeroSet(Vec<u64>);

impl ZeroSet {
    fn new(len: usize) -> Self {
        Self(vec![0; len.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn intersect(&self, other: &ZeroSet) -> ZeroSet {
        ZeroSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn contains_all(&self, other: &ZeroSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

#[derive(Clone, Debug)]
struct Ray {
    coords: Vec<BigInt>,
    zeros: ZeroSet,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| {
        if x.is_zero() || y.is_zero() {
            acc
        } else {
            acc + x * y
        }
    })
}

fn to_rational(row: &[BigInt]) -> Vec<BigRational> {
    row.iter()
        .map(|x| BigRational::from_integer(x.clone()))
        .collect()
}

/// Greedily picks linearly independent rows in order until `dim` are found.
fn independent_rows(constraints: &[Vec<BigInt>], dim: usize) -> Vec<usize> {
    let mut echelon: Vec<(usize, Vec<BigRational>)> = Vec::new();
    let mut chosen = Vec::new();
    for (i, row) in constraints.iter().enumerate() {
        let mut cand = to_rational(row);
        for (pc, basis) in &echelon {
            if !cand[*pc].is_zero() {
                let f = cand[*pc].clone();
                for (x, y) in cand.iter_mut().zip(basis) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(pc) = cand.iter().position(|x| !x.is_zero()) {
            let inv = cand[pc].recip();
            cand.iter_mut().for_each(|x| *x *= &inv);
            echelon.push((pc, cand));
            chosen.push(i);
            if chosen.len() == dim {
                break;
            }
        }
    }
    chosen
}

/// Extreme rays of the pointed cone `{x : row · x ≥ 0 for every row}`.
///
/// Rays are returned as primitive integer vectors in sorted order.
pub fn extreme_rays(constraints: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>> {
    let dim = constraints
        .first()
        .map(|r| r.len())
        .ok_or_else(|| Error::Degenerate("no constraints".into()))?;
    if let Some(bad) = constraints.iter().find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    let m = constraints.len();
    let basis = independent_rows(constraints, dim);
    if basis.len() < dim {
        return Err(Error::Degenerate(format!(
            "cone is not pointed (constraint rank {} < {dim})",
            basis.len()
        )));
    }

    let b: Vec<Vec<BigRational>> = basis.iter().map(|&i| to_rational(&constraints[i])).collect();
    let inv = invert(&b).ok_or_else(|| Error::Degenerate("singular basis".into()))?;
    let mut rays: Vec<Ray> = (0..dim)
        .map(|k| {
            let column: Vec<BigRational> = inv.iter().map(|row| row[k].clone()).collect();
            let mut zeros = ZeroSet::new(m);
            for (j, &row) in basis.iter().enumerate() {
                if j != k {
                    zeros.insert(row);
                }
            }
            Ray {
                coords: primitive_integer_row(&column),
                zeros,
            }
        })
        .collect();

    let mut in_basis = vec![false; m];
    basis.iter().for_each(|&i| in_basis[i] = true);

    for (h, row) in constraints.iter().enumerate() {
        if in_basis[h] {
            continue;
        }
        let values: Vec<BigInt> = rays.iter().map(|r| dot(row, &r.coords)).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        if neg.is_empty() {
            for (r, v) in rays.iter_mut().zip(&values) {
                if v.is_zero() {
                    r.zeros.insert(h);
                }
            }
            continue;
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();

        let created: Vec<Ray> = pos
            .par_iter()
            .flat_map_iter(|&p| {
                let rays = &rays;
                let values = &values;
                neg.iter().filter_map(move |&n| {
                    let common = rays[p].zeros.intersect(&rays[n].zeros);
                    if common.count() + 2 < dim {
                        return None;
                    }
                    let blocked = rays
                        .iter()
                        .enumerate()
                        .any(|(k, r)| k != p && k != n && r.zeros.contains_all(&common));
                    if blocked {
                        return None;
                    }
                    let vp = &values[p];
                    let vn = -&values[n];
                    let mut coords: Vec<BigInt> = rays[p]
                        .coords
                        .iter()
                        .zip(&rays[n].coords)
                        .map(|(a, b)| vp * b + &vn * a)
                        .collect();
                    make_primitive(&mut coords);
                    let mut zeros = common;
                    zeros.insert(h);
                    Some(Ray { coords, zeros })
                })
            })
            .collect();

        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + created.len());
        for (mut r, v) in rays.into_iter().zip(values) {
            if v.is_zero() {
                r.zeros.insert(h);
                next.push(r);
            } else if v.is_positive() {
                next.push(r);
            }
        }
        next.extend(created);
        rays = next;
    }

    let mut out: Vec<Vec<BigInt>> = rays.into_iter().map(|r| r.coords).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Complete irredundant facet list of `conv(V)`.
///
/// Lower-dimensional inputs are enumerated in the pivot coordinates of their
/// affine hull; facet normals are lifted back with zeros elsewhere and the
/// hull equations are reported as equalities.
pub fn facet_enumeration(vp: &VPolytope) -> Result<HPolytope> {
    let hull = affine_hull(vp);
    if hull.dim == 0 {
        return Err(Error::Degenerate("all points are equal".into()));
    }
    let mut order: Vec<&RationalVector> = vp.vertices().iter().collect();
    order.sort();
    let rows: Vec<Vec<BigInt>> = order
        .iter()
        .map(|v| {
            let mut row = Vec::with_capacity(hull.dim + 1);
            row.push(BigRational::one());
            row.extend(hull.project(v));
            primitive_integer_row(&row)
        })
        .collect();
    let rays = extreme_rays(&rows)?;
    let n = vp.dim();
    let mut facets: Vec<Inequality> = rays
        .into_iter()
        .map(|ray| {
            let mut normal = vec![BigInt::zero(); n];
            for (&p, c) in hull.pivots.iter().zip(&ray[1..]) {
                normal[p] = c.clone();
            }
            Inequality {
                offset: ray[0].clone(),
                normal,
            }
        })
        .collect();
    facets.sort();
    Ok(HPolytope {
        ambient_dim: n,
        affine_dim: hull.dim,
        facets,
        equalities: hull.equalities(),
        hull,
    })
}

/// Vertices of a bounded H-polytope (sorted), computed inside its affine hull.
pub fn vertex_enumeration(hp: &HPolytope) -> Result<Vec<RationalVector>> {
    let hull = &hp.hull;
    let k = hull.dim;
    let x0 = hull.offset.coords();
    let mut rows: Vec<Vec<BigInt>> = hp
        .facets
        .iter()
        .map(|f| {
            let a: Vec<BigRational> = f
                .normal
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect();
            let along: Vec<BigRational> = hull
                .basis
                .iter()
                .map(|b| {
                    a.iter()
                        .zip(b.coords())
                        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
                })
                .collect();
            let mut offset = BigRational::from_integer(f.offset.clone());
            offset += a.iter().zip(x0).fold(BigRational::zero(), |acc, (x, y)| acc + x * y);
            for (c, &p) in along.iter().zip(&hull.pivots) {
                offset -= c * &x0[p];
            }
            let mut row = vec![offset];
            row.extend(along);
            primitive_integer_row(&row)
        })
        .collect();
    let mut t_row = vec![BigInt::zero(); k + 1];
    t_row[0] = BigInt::one();
    rows.push(t_row);
    let rays = extreme_rays(&rows)?;
    let mut vertices = rays
        .into_iter()
        .map(|ray| {
            if !ray[0].is_positive() {
                return Err(Error::Degenerate("polyhedron is unbounded".into()));
            }
            let t = BigRational::from_integer(ray[0].clone());
            let y: Vec<BigRational> = ray[1..]
                .iter()
                .map(|c| BigRational::from_integer(c.clone()) / &t)
                .collect();
            Ok(hull.lift(&y))
        })
        .collect::<Result<Vec<_>>>()?;
    vertices.sort();
    Ok(vertices)
}
