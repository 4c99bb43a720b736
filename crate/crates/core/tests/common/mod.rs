//! Shared fixtures and brute-force oracles for the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::path::PathBuf;
use std::sync::Arc;

use cmvf::cli::format::{parse_field, parse_poset, parse_simplicial};
use cmvf::cli::{random_field, random_space};
use cmvf::morse::restrict_to_invariant_part;
use cmvf::{CellId, CellSet, FiniteSpace, HomologySignature, MultivectorField};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn strip_field() -> MultivectorField {
    let space = Arc::new(parse_simplicial(&read_fixture("strip.simplices")).unwrap());
    parse_field(space, &read_fixture("strip.mvf")).unwrap().unwrap()
}

pub fn poset_field(stem: &str) -> MultivectorField {
    let space = Arc::new(parse_poset(&read_fixture(&format!("{stem}.poset"))).unwrap());
    parse_field(space, &read_fixture(&format!("{stem}.mvf"))).unwrap().unwrap()
}

pub fn names(field: &MultivectorField, set: &CellSet) -> Vec<String> {
    field.space().names(set)
}

pub fn set(field: &MultivectorField, cells: &[&str]) -> CellSet {
    field.space().set_from_names(cells).unwrap()
}

/// Random field on a random space, with the bias drawn from the seed as well.
pub fn random_case(seed: u64, max_cells: usize) -> MultivectorField {
    let space = Arc::new(random_space(seed, max_cells));
    let bias = [0.2, 0.35, 0.5, 0.7][(seed % 4) as usize];
    random_field(space, seed.wrapping_mul(0x9e37_79b9).wrapping_add(1), bias)
}

/// Random field restricted to its invariant part.
pub fn invariant_case(seed: u64, max_cells: usize) -> MultivectorField {
    restrict_to_invariant_part(&random_case(seed, max_cells)).unwrap().field
}

pub fn random_subset(space: &FiniteSpace, rng: &mut impl Rng, p: f64) -> CellSet {
    space.set_of(space.ids().filter(|_| rng.gen_bool(p)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Π(x)` straight from the definition `[x] ∪ cl x`.
pub fn pi_oracle(field: &MultivectorField, x: CellId) -> Vec<CellId> {
    let space = field.space();
    space.ids().filter(|&y| space.leq(y, x) || field.multivector_of(y) == field.multivector_of(x)).collect()
}

/// `Inv A` by enumerating every simple cycle of `G_V` inside `A`.
///
/// A cell is invariant iff it lies on a path from an essential cycle to an
/// essential cycle, where a cycle is essential when it meets a critical
/// multivector or visits two multivectors.
pub fn inv_oracle(field: &MultivectorField, a: &CellSet) -> CellSet {
    let space = field.space();
    let cells: Vec<CellId> = a.iter().collect();
    let n = cells.len();
    let mut adj = vec![vec![false; n]; n];
    for (i, &x) in cells.iter().enumerate() {
        let succ = pi_oracle(field, x);
        for (j, y) in cells.iter().enumerate() {
            adj[i][j] = succ.contains(y);
        }
    }
    let mut on_essential = vec![false; n];
    for start in 0..n {
        let mut path = vec![start];
        let mut used = vec![false; n];
        used[start] = true;
        simple_cycles(field, &cells, &adj, start, &mut path, &mut used, &mut on_essential);
    }
    let mut reach = adj.clone();
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    space.set_of(
        (0..n)
            .filter(|&x| {
                (0..n).any(|e| on_essential[e] && reach[e][x]) && (0..n).any(|e| on_essential[e] && reach[x][e])
            })
            .map(|i| cells[i]),
    )
}

fn simple_cycles(
    field: &MultivectorField,
    cells: &[CellId],
    adj: &[Vec<bool>],
    start: usize,
    path: &mut Vec<usize>,
    used: &mut [bool],
    on_essential: &mut [bool],
) {
    let last = *path.last().unwrap();
    for next in start..cells.len() {
        if !adj[last][next] {
            continue;
        }
        if next == start {
            let classes: std::collections::BTreeSet<usize> =
                path.iter().map(|&i| field.multivector_of(cells[i])).collect();
            let essential = classes.len() > 1 || classes.iter().any(|&v| field.is_critical(v));
            if essential {
                for &i in path.iter() {
                    on_essential[i] = true;
                }
            }
        } else if !used[next] {
            used[next] = true;
            path.push(next);
            simple_cycles(field, cells, adj, start, path, used, on_essential);
            path.pop();
            used[next] = false;
        }
    }
}

/// Smallest V-compatible locally closed superset, as the intersection of all of them.
pub fn v_hull_oracle(field: &MultivectorField, s: &CellSet) -> CellSet {
    let space = field.space();
    let mvs = field.multivectors();
    let forced: Vec<usize> = (0..mvs.len()).filter(|&i| !mvs[i].is_disjoint(s)).collect();
    let free: Vec<usize> = (0..mvs.len()).filter(|i| !forced.contains(i)).collect();
    let mut hull = space.full_set();
    for mask in 0u64..(1 << free.len()) {
        let mut t = space.empty_set();
        for &i in forced.iter() {
            t.union_with(&mvs[i]);
        }
        for (bit, &i) in free.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                t.union_with(&mvs[i]);
            }
        }
        if is_convex_oracle(space, &t) {
            hull = hull.intersection(&t);
        }
    }
    hull
}

/// No `x < y < z` with `x, z` in the set and `y` outside.
pub fn is_convex_oracle(space: &FiniteSpace, s: &CellSet) -> bool {
    s.iter().all(|x| s.iter().all(|z| space.ids().all(|y| !(space.lt(x, y) && space.lt(y, z)) || s.contains(y))))
}

/// Union of all open (up-closed) subsets of `s`.
pub fn interior_oracle(space: &FiniteSpace, s: &CellSet) -> CellSet {
    let cells: Vec<CellId> = s.iter().collect();
    let mut out = space.empty_set();
    for mask in 0u64..(1 << cells.len()) {
        let sub = space.set_of((0..cells.len()).filter(|i| mask & (1 << i) != 0).map(|i| cells[i]));
        let open = sub.iter().all(|x| space.ids().all(|y| !space.leq(x, y) || sub.contains(y)));
        if open {
            out.union_with(&sub);
        }
    }
    out
}

fn all_chains(space: &FiniteSpace, a: &CellSet) -> Vec<Vec<CellId>> {
    fn extend(space: &FiniteSpace, a: &CellSet, chain: &mut Vec<CellId>, out: &mut Vec<Vec<CellId>>) {
        out.push(chain.clone());
        let last = *chain.last().unwrap();
        for y in a.iter() {
            if space.lt(last, y) {
                chain.push(y);
                extend(space, a, chain, out);
                chain.pop();
            }
        }
    }
    let mut out = Vec::new();
    for x in a.iter() {
        extend(space, a, &mut vec![x], &mut out);
    }
    out
}

fn rank_mod(mut m: Vec<Vec<i64>>, p: i64) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    for row in m.iter_mut() {
        for v in row.iter_mut() {
            *v = v.rem_euclid(p);
        }
    }
    let inv = |x: i64| -> i64 {
        let (mut result, mut base, mut e) = (1i64, x % p, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        result
    };
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..rows).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, r);
        let iv = inv(m[rank][c]);
        for r in 0..rows {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c] * iv % p;
                for k in 0..cols {
                    m[r][k] = (m[r][k] - f * m[rank][k]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Betti numbers of `H(K(A), K(B); F_p)` from dense boundary matrices.
pub fn relative_betti_mod(space: &FiniteSpace, a: &CellSet, b: &CellSet, p: i64) -> Vec<usize> {
    let mut by_dim: Vec<Vec<Vec<CellId>>> = Vec::new();
    for chain in all_chains(space, a) {
        if chain.iter().all(|&c| b.contains(c)) {
            continue;
        }
        let k = chain.len() - 1;
        if by_dim.len() <= k {
            by_dim.resize(k + 1, Vec::new());
        }
        by_dim[k].push(chain);
    }
    let ranks: Vec<usize> = (0..by_dim.len())
        .map(|k| {
            if k == 0 {
                return 0;
            }
            let m: Vec<Vec<i64>> = by_dim[k - 1]
                .iter()
                .map(|face| {
                    by_dim[k]
                        .iter()
                        .map(|s| {
                            (0..s.len())
                                .find(|&skip| {
                                    let f: Vec<CellId> =
                                        s.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, &c)| c).collect();
                                    f == *face
                                })
                                .map_or(0, |skip| if skip % 2 == 0 { 1 } else { -1 })
                        })
                        .collect()
                })
                .collect();
            rank_mod(m, p)
        })
        .collect();
    let mut betti: Vec<usize> =
        (0..by_dim.len()).map(|k| by_dim[k].len() - ranks[k] - ranks.get(k + 1).copied().unwrap_or(0)).collect();
    while betti.last() == Some(&0) {
        betti.pop();
    }
    betti
}

/// Checks an integral signature against ranks over `F_p` for a large prime
/// (free part) and over `F_2` (universal coefficients: each even torsion
/// coefficient in degree `k` adds one to degrees `k` and `k + 1`).
pub fn signature_matches_oracle(space: &FiniteSpace, a: &CellSet, b: &CellSet, sig: &HomologySignature) -> bool {
    let at = |v: &[usize], k: usize| v.get(k).copied().unwrap_or(0);
    let rational = relative_betti_mod(space, a, b, 1_000_000_007);
    let binary = relative_betti_mod(space, a, b, 2);
    let even = |k: usize| sig.torsion.get(k).map_or(0, |t| t.iter().filter(|&&o| o % 2 == 0).count());
    let top = rational.len().max(binary.len()).max(sig.betti.len()) + 1;
    (0..top).all(|k| {
        let below = if k == 0 { 0 } else { even(k - 1) };
        at(&rational, k) == sig.betti(k) && at(&binary, k) == sig.betti(k) + even(k) + below
    })
}

fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    (0..n)
        .map(|c| {
            let minor: Vec<Vec<BigInt>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| v.clone()).collect())
                .collect();
            let term = &m[0][c] * det(&minor);
            if c % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}

/// Invariant factors `d_k / d_{k-1}` from the determinantal divisors
/// (gcd of all `k × k` minors) of a small dense matrix.
pub fn invariant_factors_oracle(m: &[Vec<i64>]) -> Vec<BigInt> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut divisors = vec![BigInt::from(1)];
    for k in 1..=rows.min(cols) {
        let mut g = BigInt::zero();
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<BigInt>> =
                    rs.iter().map(|&r| cs.iter().map(|&c| BigInt::from(m[r][c])).collect()).collect();
                g = g.gcd(&det(&minor));
            }
        }
        if g.is_zero() {
            break;
        }
        divisors.push(g.abs());
    }
    divisors.windows(2).map(|w| &w[1] / &w[0]).collect()
}
