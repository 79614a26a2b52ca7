use std::collections::BTreeSet;

use bellwitness::geometry::{affine_hull, RationalVector, VPolytope};
use bellwitness::polytopes::{
    clifford_polytope, conjugate, lhv_polytope, signed_relabelings, transpose, BuiltPolytope,
    FacetClass, IntTable, CANONICAL_ALPHA, CANONICAL_BETA, CANONICAL_I2222, CANONICAL_I3322,
    CANONICAL_TRIV,
};
use bellwitness::qcore::clifford_group;

fn rotations() -> Vec<IntTable> {
    clifford_group().iter().map(|c| c.rotation4()).collect()
}

/// Facet set closed under `F ↦ L F Rᵀ` and transposition, class preserved.
fn assert_closed(p: &BuiltPolytope, relabelings: &[IntTable]) {
    let set: BTreeSet<(IntTable, FacetClass)> =
        p.facets.iter().map(|f| (f.coeffs, f.klass)).collect();
    for f in &p.facets {
        for l in relabelings {
            for r in relabelings {
                let g = conjugate(&f.coeffs, l, r);
                assert!(set.contains(&(g, f.klass)), "{:?} -> {:?}", f.coeffs, g);
            }
        }
        assert!(set.contains(&(transpose(&f.coeffs), f.klass)));
    }
}

fn present_up_to_symmetry(p: &BuiltPolytope, canonical: &IntTable) -> bool {
    let rel = signed_relabelings();
    rel.iter()
        .any(|l| rel.iter().any(|r| p.contains_coeffs(&conjugate(canonical, l, r))))
}

/// Every facet is tight on `affine_dim` affinely independent vertices.
fn assert_tight(p: &BuiltPolytope) {
    let dim = p.hpolytope.affine_dim;
    for f in &p.facets {
        let tight: Vec<RationalVector> = p
            .vertex_tables
            .iter()
            .filter(|t| f.value_int(t) == 0)
            .map(bellwitness::polytopes::int_table_coords)
            .collect();
        let hull = affine_hull(&VPolytope::new(tight).unwrap());
        assert_eq!(hull.dim, dim - 1, "{:?}", f.coeffs);
    }
}

#[test]
fn lhv_census_and_canonical_members() {
    let p = lhv_polytope();
    assert_eq!(p.hpolytope.affine_dim, 15);
    assert_eq!(p.facets.len(), 684);
    assert!(p.census_matches(), "{:?}", p.census());
    assert!(p.contains_coeffs(&CANONICAL_I2222));
    assert!(p.contains_coeffs(&CANONICAL_TRIV));
    assert!(present_up_to_symmetry(p, &CANONICAL_I3322));
}

#[test]
fn clifford_census_and_canonical_members() {
    let p = clifford_polytope();
    assert_eq!(p.facets.len(), 120);
    assert!(p.census_matches(), "{:?}", p.census());
    assert!(p.contains_coeffs(&CANONICAL_BETA));
    assert!(present_up_to_symmetry(p, &CANONICAL_ALPHA));
    assert!(present_up_to_symmetry(p, &transpose(&CANONICAL_ALPHA)));
    assert!(p.facets.iter().all(|f| f.coeffs[0][1..].iter().all(|&x| x == 0)));
}

#[test]
fn vertices_satisfy_all_facets() {
    for p in [lhv_polytope(), clifford_polytope()] {
        for f in &p.facets {
            assert!(p.vertex_tables.iter().all(|t| f.value_int(t) >= 0));
        }
    }
}

#[test]
fn facets_are_tight() {
    assert_tight(lhv_polytope());
    assert_tight(clifford_polytope());
}

#[test]
fn facet_classes_are_symmetry_orbits() {
    assert_closed(clifford_polytope(), &rotations());
    assert_closed(lhv_polytope(), &signed_relabelings());
}

#[test]
fn clifford_vertices_admit_lhv_models() {
    let lhv = lhv_polytope();
    for v in &clifford_polytope().vertex_tables {
        assert!(lhv.facets.iter().all(|f| f.value_int(v) >= 0));
    }
}
