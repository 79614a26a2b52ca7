//! Exact rational convex geometry.
//!
//! Everything here runs on arbitrary-precision integers and rationals; the
//! only floating-point entry point is [`rationalize`], which converts a float
//! to a nearby rational before anything else happens.

mod cache;
mod dd;
mod hull;
mod linalg;
mod lp;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cache::{content_hash, facet_enumeration_cached, CacheStatus, HullCache};
pub use dd::{extreme_rays, facet_enumeration, vertex_enumeration};
pub use hull::{affine_hull, AffineHull};
pub use lp::{lp_membership, RationalWeight, SeparationCertificate};

/// A point with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(Vec<BigRational>);

impl RationalVector {
    pub fn new(coords: Vec<BigRational>) -> Self {
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![BigRational::zero(); dim])
    }

    pub fn from_integers<I: Into<BigInt>>(coords: impl IntoIterator<Item = I>) -> Self {
        Self(
            coords
                .into_iter()
                .map(|c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    /// Rationalizes each float to within `tol` (continued fractions).
    pub fn from_f64(coords: &[f64], tol: f64) -> Self {
        Self(coords.iter().map(|&x| rationalize(x, tol)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<BigRational> {
        self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn dot(&self, other: &RationalVector) -> BigRational {
        self.0
            .iter()
            .zip(&other.0)
            .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, q) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{q}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for RationalVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.0.iter().map(|q| q.to_string()).collect();
        strings.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(d)?;
        strings
            .iter()
            .map(|s| s.parse::<BigRational>().map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(RationalVector)
    }
}

/// Best rational approximation of `x` within `tol`, from continued-fraction convergents.
///
/// Falls back to the exact binary value of `x` if no convergent gets within `tol`.
pub fn rationalize(x: f64, tol: f64) -> BigRational {
    assert!(x.is_finite(), "cannot rationalize {x}");
    let exact = BigRational::from_float(x).expect("finite float");
    let tol_q = BigRational::from_float(tol.abs()).expect("finite tolerance");
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut rest = exact.clone();
    for _ in 0..64 {
        let a = rest.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        let approx = BigRational::new(p2.clone(), q2.clone());
        if (&approx - &exact).abs() <= tol_q {
            return approx;
        }
        let frac = &rest - BigRational::from_integer(a);
        if frac.is_zero() {
            return approx;
        }
        rest = frac.recip();
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    exact
}

fn rational_string<S: serde::Serializer>(q: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn parse_bigint<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
    String::deserialize(d)?
        .parse::<BigInt>()
        .map_err(serde::de::Error::custom)
}

fn bigint_vec_string<S: serde::Serializer>(
    v: &[BigInt],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let strings: Vec<String> = v.iter().map(|q| q.to_string()).collect();
    strings.serialize(s)
}

fn parse_bigint_vec<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Vec<BigInt>, D::Error> {
    Vec::<String>::deserialize(d)?
        .iter()
        .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
        .collect()
}

/// `normal · x + offset ≥ 0` (or `= 0` for equality constraints), primitive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Inequality {
    #[serde(serialize_with = "rational_string", deserialize_with = "parse_bigint")]
    pub offset: BigInt,
    #[serde(
        serialize_with = "bigint_vec_string",
        deserialize_with = "parse_bigint_vec"
    )]
    pub normal: Vec<BigInt>,
}

impl Inequality {
    /// Scales a rational inequality by a positive factor to primitive integers.
    pub fn from_rational(normal: &[BigRational], offset: &BigRational) -> Self {
        let mut all: Vec<BigRational> = Vec::with_capacity(normal.len() + 1);
        all.push(offset.clone());
        all.extend(normal.iter().cloned());
        let ints = primitive_integer_row(&all);
        Self {
            offset: ints[0].clone(),
            normal: ints[1..].to_vec(),
        }
    }

    pub fn from_integers(normal: Vec<BigInt>, offset: BigInt) -> Self {
        let mut all = Vec::with_capacity(normal.len() + 1);
        all.push(offset);
        all.extend(normal);
        make_primitive(&mut all);
        let offset = all.remove(0);
        Self {
            offset,
            normal: all,
        }
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn evaluate(&self, point: &RationalVector) -> BigRational {
        self.normal
            .iter()
            .zip(point.coords())
            .fold(BigRational::from_integer(self.offset.clone()), |acc, (a, x)| {
                acc + x * a
            })
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> f64 {
        self.normal
            .iter()
            .zip(point)
            .fold(self.offset.to_f64().unwrap_or(f64::NAN), |acc, (a, x)| {
                acc + a.to_f64().unwrap_or(f64::NAN) * x
            })
    }
}

/// Divides an integer row by the gcd of its entries (sign preserved).
pub(crate) fn make_primitive(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x = &*x / &g;
        }
    }
}

/// Multiplies a rational row by the lcm of its denominators, then makes it primitive.
pub(crate) fn primitive_integer_row(row: &[BigRational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let mut ints: Vec<BigInt> = row
        .iter()
        .map(|q| q.numer() * (&lcm / q.denom()))
        .collect();
    make_primitive(&mut ints);
    ints
}

/// Vertex description: a finite, duplicate-free point set of common dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VPolytope {
    vertices: Vec<RationalVector>,
}

impl VPolytope {
    pub fn new(vertices: Vec<RationalVector>) -> Result<Self> {
        let first = vertices
            .first()
            .ok_or_else(|| Error::Degenerate("empty vertex set".into()))?;
        let dim = first.dim();
        for v in &vertices {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.dim(),
                });
            }
        }
        let mut sorted: Vec<&RationalVector> = vertices.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("duplicate vertex".into()));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[RationalVector] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn centroid(&self) -> RationalVector {
        let n = BigRational::from_integer(BigInt::from(self.vertices.len()));
        let mut acc = vec![BigRational::zero(); self.dim()];
        for v in &self.vertices {
            for (a, x) in acc.iter_mut().zip(v.coords()) {
                *a += x;
            }
        }
        RationalVector(acc.into_iter().map(|a| a / &n).collect())
    }
}

/// Facet description of a polytope, with its affine hull.
///
/// Facets are sorted, primitive and oriented so that the polytope is on the
/// `≥ 0` side. Facet normals vanish outside the hull's pivot coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HPolytope {
    pub ambient_dim: usize,
    pub affine_dim: usize,
    pub facets: Vec<Inequality>,
    /// Hull equations `normal · x + offset = 0`.
    pub equalities: Vec<Inequality>,
    pub hull: AffineHull,
}

impl HPolytope {
    /// True when the point satisfies every facet and every equality.
    pub fn contains(&self, point: &RationalVector) -> bool {
        self.equalities.iter().all(|e| e.evaluate(point).is_zero())
            && self
                .facets
                .iter()
                .all(|f| !f.evaluate(point).is_negative())
    }

    /// Indices of vertices on which `facet` is tight.
    pub fn tight_vertices(facet: &Inequality, vp: &VPolytope) -> Vec<usize> {
        vp.vertices()
            .iter()
            .enumerate()
            .filter(|(_, v)| facet.evaluate(v).is_zero())
            .map(|(i, _)| i)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rationalize_recovers_simple_fractions() {
        assert_eq!(rationalize(1.0 / 3.0, 1e-12), q(1, 3));
        assert_eq!(rationalize(-0.25, 1e-12), q(-1, 4));
        assert_eq!(rationalize(5.0 / 12.0, 1e-12), q(5, 12));
        assert_eq!(rationalize(0.0, 1e-12), q(0, 1));
        assert_eq!(rationalize(1.0 - 1e-17, 1e-12), q(1, 1));
        let r = rationalize(std::f64::consts::FRAC_1_SQRT_2, 1e-12);
        assert!((r.to_f64().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-12);
    }

    #[test]
    fn primitive_rows() {
        let ineq = Inequality::from_rational(&[q(1, 2), q(-3, 4)], &q(3, 2));
        assert_eq!(ineq.offset, BigInt::from(6));
        assert_eq!(ineq.normal, vec![BigInt::from(2), BigInt::from(-3)]);
        let ineq = Inequality::from_integers(vec![4.into(), (-2).into()], 6.into());
        assert_eq!(ineq.offset, BigInt::from(3));
        assert_eq!(ineq.normal, vec![BigInt::from(2), BigInt::from(-1)]);
    }

    #[test]
    fn vpolytope_validation() {
        assert!(VPolytope::new(vec![]).is_err());
        let a = RationalVector::from_integers([1, 2]);
        let b = RationalVector::from_integers([1, 2, 3]);
        assert!(matches!(
            VPolytope::new(vec![a.clone(), b]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(VPolytope::new(vec![a.clone(), a]).is_err());
    }

    #[test]
    fn rational_vector_serde() {
        let v = RationalVector::new(vec![q(1, 3), q(-2, 1)]);
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(text, r#"["1/3","-2"]"#);
        let back: RationalVector = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
    }
}
