//! Seeded generators for spaces and multivector fields.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mvf::MultivectorField;
use crate::space::{CellId, FiniteSpace};

/// Random poset on `n` points: each pair `i < j` is related with probability `density`.
pub fn random_poset(rng: &mut impl Rng, n: usize, density: f64) -> FiniteSpace {
    let names: Vec<String> = (0..n).map(|i| format!("p{i:02}")).collect();
    let mut relations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                relations.push((names[i].clone(), names[j].clone()));
            }
        }
    }
    // the index order is a linear extension, so no cycles are possible
    FiniteSpace::from_cover_relations(&names, &relations).expect("acyclic by construction")
}

/// Random simplicial complex on at most six vertices with at most `max_cells` faces.
pub fn random_simplicial(rng: &mut impl Rng, max_cells: usize) -> FiniteSpace {
    let vertices = ["a", "b", "c", "d", "e", "f"];
    let max_cells = max_cells.max(1);
    let mut faces: BTreeSet<Vec<&str>> = BTreeSet::new();
    let mut simplices: Vec<Vec<&str>> = Vec::new();
    for _ in 0..12 {
        let size = rng.gen_range(1..=3);
        let mut simplex: Vec<&str> = vertices.choose_multiple(rng, size).copied().collect();
        simplex.sort_unstable();
        let mut added = faces.clone();
        for mask in 1u32..(1 << simplex.len()) {
            added.insert((0..simplex.len()).filter(|i| mask & (1 << i) != 0).map(|i| simplex[i]).collect());
        }
        if added.len() <= max_cells {
            faces = added;
            simplices.push(simplex);
        }
    }
    if simplices.is_empty() {
        simplices.push(vec![vertices[0]]);
    }
    FiniteSpace::from_simplicial_complex(&simplices).expect("valid simplices")
}

/// A random poset or simplicial complex with at most `max_cells` cells.
pub fn random_space(seed: u64, max_cells: usize) -> FiniteSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if rng.gen_bool(0.5) {
        random_simplicial(&mut rng, max_cells)
    } else {
        let n = rng.gen_range(1..=max_cells.max(1));
        let density = rng.gen_range(0.15..0.6);
        random_poset(&mut rng, n, density)
    }
}

/// Random multivector field: parts grow from a random seed cell through
/// cover-adjacent cells while they stay convex, stopping at each step with
/// probability `bias`. `bias = 1` gives the all-singleton field.
pub fn random_field(space: Arc<FiniteSpace>, seed: u64, bias: f64) -> MultivectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bias = bias.clamp(0.0, 1.0);
    let mut unassigned = space.full_set();
    let mut parts = Vec::new();
    while !unassigned.is_empty() {
        let pool: Vec<CellId> = unassigned.iter().collect();
        let start = *pool.choose(&mut rng).expect("nonempty");
        let mut part = space.singleton(start);
        unassigned.remove(start);
        while !rng.gen_bool(bias) {
            let candidates: Vec<CellId> = unassigned
                .iter()
                .filter(|&y| part.iter().any(|x| space.lower_covers(x).chain(space.upper_covers(x)).any(|z| z == y)))
                .filter(|&y| {
                    let mut grown = part.clone();
                    grown.insert(y);
                    space.is_locally_closed(&grown)
                })
                .collect();
            let Some(&y) = candidates.choose(&mut rng) else { break };
            part.insert(y);
            unassigned.remove(y);
        }
        parts.push(part);
    }
    MultivectorField::new(space, parts).expect("generated parts are convex and partition the space")
}
