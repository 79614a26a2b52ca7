use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::linalg::rref;
use super::{Inequality, RationalVector, VPolytope};

/// Affine hull `offset + span(basis)` of a point set.
///
/// `basis` is in reduced row echelon form; `pivots[i]` is the coordinate in
/// which `basis[i]` has its leading one. Projecting onto the pivot
/// coordinates is a bijection from the hull to `ℚ^dim`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineHull {
    pub dim: usize,
    pub offset: RationalVector,
    pub basis: Vec<RationalVector>,
    pub pivots: Vec<usize>,
}

impl AffineHull {
    pub fn ambient_dim(&self) -> usize {
        self.offset.dim()
    }

    /// Pivot coordinates of a point (meaningful for points on the hull).
    pub fn project(&self, x: &RationalVector) -> Vec<BigRational> {
        self.pivots.iter().map(|&p| x.coords()[p].clone()).collect()
    }

    /// The hull point whose pivot coordinates are `y`.
    pub fn lift(&self, y: &[BigRational]) -> RationalVector {
        let mut x: Vec<BigRational> = self.offset.coords().to_vec();
        for ((b, &p), yi) in self.basis.iter().zip(&self.pivots).zip(y) {
            let t = yi - &self.offset.coords()[p];
            for (xj, bj) in x.iter_mut().zip(b.coords()) {
                *xj += &t * bj;
            }
        }
        RationalVector::new(x)
    }

    pub fn contains(&self, x: &RationalVector) -> bool {
        self.lift(&self.project(x)) == *x
    }

    /// One equation per non-pivot coordinate, each vanishing exactly on the hull.
    pub fn equalities(&self) -> Vec<Inequality> {
        let n = self.ambient_dim();
        let off = self.offset.coords();
        (0..n)
            .filter(|j| !self.pivots.contains(j))
            .map(|j| {
                // x_j − Σ_i b_i[j] x_{p_i} − (x0_j − Σ_i b_i[j] x0_{p_i}) = 0
                let mut normal = vec![BigRational::from_integer(0.into()); n];
                normal[j] = BigRational::from_integer(1.into());
                let mut offset = -off[j].clone();
                for (b, &p) in self.basis.iter().zip(&self.pivots) {
                    let c = &b.coords()[j];
                    normal[p] -= c;
                    offset += c * &off[p];
                }
                let mut e = Inequality::from_rational(&normal, &offset);
                if e.normal.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
                    e.offset = -e.offset;
                    e.normal.iter_mut().for_each(|x| *x = -x.clone());
                }
                e
            })
            .collect()
    }
}

pub fn affine_hull(vp: &VPolytope) -> AffineHull {
    let v0 = &vp.vertices()[0];
    let mut rows: Vec<Vec<BigRational>> = vp.vertices()[1..]
        .iter()
        .map(|v| {
            v.coords()
                .iter()
                .zip(v0.coords())
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    let pivots = rref(&mut rows);
    AffineHull {
        dim: pivots.len(),
        offset: v0.clone(),
        basis: rows.into_iter().map(RationalVector::new).collect(),
        pivots,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> VPolytope {
        let mut v = Vec::new();
        for mask in 0..8 {
            v.push(RationalVector::from_integers(
                (0..3).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }),
            ));
        }
        VPolytope::new(v).unwrap()
    }

    #[test]
    fn single_point_has_dimension_zero() {
        let vp = VPolytope::new(vec![RationalVector::from_integers([3, 4])]).unwrap();
        let h = affine_hull(&vp);
        assert_eq!(h.dim, 0);
        assert_eq!(h.equalities().len(), 2);
    }

    #[test]
    fn cube_is_full_dimensional() {
        let h = affine_hull(&cube());
        assert_eq!(h.dim, 3);
        assert!(h.equalities().is_empty());
    }

    #[test]
    fn planar_points_in_space() {
        // Points on x + y + z = 1.
        let pts = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [2, -1, 0]];
        let vp = VPolytope::new(pts.iter().map(|p| RationalVector::from_integers(*p)).collect())
            .unwrap();
        let h = affine_hull(&vp);
        assert_eq!(h.dim, 2);
        let eqs = h.equalities();
        assert_eq!(eqs.len(), 1);
        for v in vp.vertices() {
            assert!(eqs[0].evaluate(v).is_zero());
            assert!(h.contains(v));
            assert_eq!(h.lift(&h.project(v)), *v);
        }
        assert!(!h.contains(&RationalVector::from_integers([0, 0, 0])));
    }
}
