mod common;

use common::*;
use conevol::classification::classify;
use conevol::polytope::{
    affine_rank, hull_vertices, irredundant_facets, ku_halfspaces, pscc_halfspaces, pscc_vertices,
    structure_predicates, PolytopeRep,
};
use proptest::prelude::*;

fn rows(rep: &PolytopeRep) -> Vec<(Vec<f64>, f64)> {
    rep.halfspaces.iter().map(|h| (h.a.clone(), h.rhs)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hull_forms_agree(u in normal_set_strategy(3, 6)) {
        let c = classify(&u).unwrap();
        let rep = ku_halfspaces(&u, &c);
        let enumerated = enumerate_vertices(&rows(&rep), u.len());
        prop_assert!(same_point_set(&enumerated, &hull_vertices(&u, &c), 1e-9));
    }

    #[test]
    fn pscc_forms_agree(u in normal_set_strategy(3, 6)) {
        let rep = pscc_halfspaces(&u);
        let enumerated = enumerate_vertices(&rows(&rep), u.len());
        prop_assert!(same_point_set(&enumerated, &pscc_vertices(&u), 1e-9));
    }

    #[test]
    fn pscc_inside_hull(u in normal_set_strategy(3, 10)) {
        let c = classify(&u).unwrap();
        let ku = ku_halfspaces(&u, &c);
        for v in pscc_vertices(&u) {
            prop_assert!(ku.contains(&v, 1e-12));
        }
        let p = structure_predicates(&c);
        prop_assert_eq!(p.equals_hypersimplex, c.square.is_empty());
        if p.equals_pscc {
            prop_assert!(same_point_set(&hull_vertices(&u, &c), &pscc_vertices(&u), 0.0));
        }
    }

    #[test]
    fn hull_vertices_are_extreme(u in normal_set_strategy(3, 10)) {
        let c = classify(&u).unwrap();
        let rep = ku_halfspaces(&u, &c);
        for v in &rep.vertices {
            prop_assert!(rep.contains(v, 1e-12));
            prop_assert_eq!(rep.active_rank(v), u.len());
        }
        prop_assert_eq!(rep.dim, affine_rank(&rep.vertices, 1e-9));
    }

    #[test]
    fn facet_reduction_is_idempotent(u in normal_set_strategy(3, 8)) {
        let c = classify(&u).unwrap();
        let rep = ku_halfspaces(&u, &c);
        let f = irredundant_facets(&rep).unwrap();
        prop_assert!(f.halfspaces.len() <= rep.halfspaces.len());
        prop_assert!(f.halfspaces.len() >= f.dim + 1);
        prop_assert_eq!(irredundant_facets(&f).unwrap(), f.clone());
        // dropping redundant rows leaves the vertex set unchanged
        if rep.dim + 1 == u.len() {
            let enumerated = enumerate_vertices(&rows(&f), u.len());
            prop_assert!(same_point_set(&enumerated, &rep.vertices, 1e-9));
        }
    }
}
