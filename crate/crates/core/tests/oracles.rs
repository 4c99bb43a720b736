mod common;

use cmvf::complex::{relative_homology, RelativeChainComplex};
use cmvf::dynamics::{essential_solution_through, inv};
use cmvf::snf::{invariant_factors, SparseMatrix};
use common::*;
use num_bigint::BigInt;
use rand::Rng;

#[test]
fn inv_matches_cycle_enumeration() {
    for seed in 0..60 {
        let f = random_case(seed, 8);
        let space = f.space();
        let mut r = rng(seed);
        for _ in 0..25 {
            let p = r.gen_range(0.3..1.0);
            let a = random_subset(space, &mut r, p);
            let fast = inv(&f, &a);
            assert_eq!(fast, inv_oracle(&f, &a), "seed {seed}: {:?}", names(&f, &a));
            for x in a.iter() {
                let lasso = essential_solution_through(&f, &a, x);
                assert_eq!(lasso.is_some(), fast.contains(x));
                if let Some(l) = lasso {
                    assert!(l.is_essential(&f) && l.contains(x) && l.cells(&f).is_subset(&a));
                }
            }
        }
    }
}

#[test]
fn flow_matches_definition() {
    for seed in 0..40 {
        let f = random_case(seed, 12);
        let space = f.space();
        for x in space.ids() {
            let pi = f.pi_v(x);
            assert_eq!(pi, space.set_of(pi_oracle(&f, x)));
            for y in space.ids() {
                assert_eq!(pi.contains(y), f.pi_v_inverse(&space.singleton(y)).contains(x));
            }
        }
    }
}

#[test]
fn v_hull_matches_intersection_of_supersets() {
    for seed in 0..40 {
        let f = random_case(seed, 10);
        let mut r = rng(seed + 1000);
        for _ in 0..5 {
            let s = random_subset(f.space(), &mut r, 0.25);
            assert_eq!(f.v_hull(&s), v_hull_oracle(&f, &s), "seed {seed}");
        }
    }
}

#[test]
fn topology_matches_brute_force() {
    for seed in 0..40 {
        let space = cmvf::cli::random_space(seed, 10);
        let mut r = rng(seed + 2000);
        for _ in 0..10 {
            let s = random_subset(&space, &mut r, 0.5);
            assert_eq!(space.interior(&s), interior_oracle(&space, &s));
            assert_eq!(space.is_locally_closed(&s), is_convex_oracle(&space, &s));
        }
    }
}

#[test]
fn smith_form_matches_determinantal_divisors() {
    let mut r = rng(7);
    for _ in 0..300 {
        let rows = r.gen_range(1..=4);
        let cols = r.gen_range(1..=4);
        let dense: Vec<Vec<i64>> = (0..rows)
            .map(|_| (0..cols).map(|_| if r.gen_bool(0.4) { 0 } else { r.gen_range(-6..=6) }).collect())
            .collect();
        let mut m = SparseMatrix::new(rows, cols);
        for (i, row) in dense.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.entries.push((i, j, v));
                }
            }
        }
        let got: Vec<BigInt> = invariant_factors(&m).into_iter().map(BigInt::from).collect();
        assert_eq!(got, invariant_factors_oracle(&dense), "{dense:?}");
    }
}

#[test]
fn homology_matches_field_coefficients() {
    for seed in 0..40 {
        let space = cmvf::cli::random_space(seed, 10);
        let mut r = rng(seed + 3000);
        for _ in 0..5 {
            let a = space.closure(&random_subset(&space, &mut r, 0.5));
            let b = space.closure(&random_subset(&space, &mut r, 0.3)).intersection(&a);
            let sig = relative_homology(&space, &a, &b).unwrap();
            assert!(signature_matches_oracle(&space, &a, &b, &sig), "seed {seed}: {sig:?}");
        }
    }
}

#[test]
fn projective_plane_torsion() {
    // minimal 6-vertex triangulation
    let faces = ["abd", "abf", "ace", "acf", "ade", "bce", "bcd", "bef", "cdf", "def"];
    let simplices: Vec<Vec<String>> = faces.iter().map(|f| f.chars().map(String::from).collect()).collect();
    let space = cmvf::FiniteSpace::from_simplicial_complex(&simplices).unwrap();
    let sig = relative_homology(&space, &space.full_set(), &space.empty_set()).unwrap();
    assert_eq!(sig.betti, vec![1, 0]);
    assert_eq!(sig.torsion, vec![vec![], vec![2]]);
    assert!(signature_matches_oracle(&space, &space.full_set(), &space.empty_set(), &sig));
}

#[test]
fn boundary_of_boundary_vanishes() {
    for seed in 0..30 {
        let space = cmvf::cli::random_space(seed, 12);
        let mut r = rng(seed + 4000);
        let a = space.closure(&random_subset(&space, &mut r, 0.6));
        let b = space.closure(&random_subset(&space, &mut r, 0.2)).intersection(&a);
        let cx = RelativeChainComplex::build(&space, &a, &b).unwrap();
        for k in 2..cx.boundaries.len() {
            let product = cx.boundaries[k - 1].mul_dense(&cx.boundaries[k]);
            assert!(product.iter().flatten().all(|&v| v == 0), "seed {seed} dim {k}");
            assert_eq!(cx.boundaries[k - 1].to_dense().len(), cx.rank(k - 2));
        }
    }
}
