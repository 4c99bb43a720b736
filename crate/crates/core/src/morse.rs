//! Morse decompositions, attractors and repellers, the Conley-Morse graph,
//! and the Morse equation and inequalities.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::complex::{divide_by_one_plus_t, poincare_polynomial, HomologyError, PoincarePolynomial};
use crate::conley::{conley_index, isolation_failure, ConleyError, IndexPair, IsolationFailure};
use crate::dynamics::{cells_between, essential_sccs, inv, push_forward, shortest_path, EssentialScc};
use crate::mvf::{FieldError, MultivectorField};
use crate::space::{CellId, CellSet, IndexPoset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorseError {
    #[error("space is not invariant ({} of {} cells lie in the invariant part)", .invariant_part.len(), .space_len)]
    SpaceNotInvariant { invariant_part: CellSet, space_len: usize },
    #[error("Morse sets #{0} and #{1} overlap")]
    Overlap(usize, usize),
    #[error("Morse set #{index} is not isolated invariant: {failure}")]
    NotIsolatedInvariant { index: usize, failure: IsolationFailure },
    #[error("an essential periodic solution is not contained in a single Morse set")]
    RecurrenceAcrossSets { cycle: Vec<CellId> },
    #[error("an essential solution leaves Morse set #{index} and returns to it")]
    ReturnToSameSet { index: usize },
    #[error("connections between Morse sets form a cycle through #{0}")]
    OrderCycle(usize),
    #[error("unknown Morse set index {0}")]
    UnknownIndex(usize),
    #[error("index set is not a down set")]
    NotADownSet,
    #[error("index set is not convex")]
    NotConvex,
    #[error("set is not an attractor")]
    NotAttractor,
    #[error("set is not a repeller")]
    NotRepeller,
    #[error("internal assertion failed: {0}")]
    InternalAssertion(String),
    #[error(transparent)]
    Conley(#[from] ConleyError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Morse sets indexed `0..n` with the order `p ≤ q` iff some path runs from
/// `M_q` to `M_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseDecomposition {
    sets: Vec<CellSet>,
    order: IndexPoset,
}

impl MorseDecomposition {
    pub fn sets(&self) -> &[CellSet] {
        &self.sets
    }

    pub fn set(&self, p: usize) -> &CellSet {
        &self.sets[p]
    }

    pub fn order(&self) -> &IndexPoset {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    fn check_indices(&self, indices: &BTreeSet<usize>) -> Result<(), MorseError> {
        match indices.iter().find(|&&p| p >= self.len()) {
            Some(&p) => Err(MorseError::UnknownIndex(p)),
            None => Ok(()),
        }
    }
}

fn require_invariant(field: &MultivectorField) -> Result<(), MorseError> {
    let all = field.space().full_set();
    let invariant_part = inv(field, &all);
    if invariant_part != all {
        return Err(MorseError::SpaceNotInvariant { invariant_part, space_len: all.len() });
    }
    Ok(())
}

fn reachability_order(field: &MultivectorField, sets: &[CellSet]) -> IndexPoset {
    let all = field.space().full_set();
    let reached: Vec<CellSet> = sets.iter().map(|m| push_forward(field, m, &all)).collect();
    IndexPoset::from_fn(sets.len(), |p, q| !reached[q].is_disjoint(&sets[p]))
}

/// The essential strongly connected components of `G_V`, ordered by reachability.
pub fn minimal_morse_decomposition(field: &MultivectorField) -> Result<MorseDecomposition, MorseError> {
    require_invariant(field)?;
    let sets: Vec<CellSet> = essential_sccs(field, &field.space().full_set()).into_iter().map(|s| s.cells).collect();
    let order = reachability_order(field, &sets);
    if !order.is_antisymmetric() {
        return Err(MorseError::InternalAssertion("reachability between distinct components is cyclic".into()));
    }
    Ok(MorseDecomposition { sets, order })
}

/// Checks that `sets` is a Morse decomposition of the (invariant) space and
/// returns it with the coarsest order its connections force.
///
/// Every essential periodic solution must stay in one set, and no essential
/// solution may leave a set and come back to it, directly or through others.
pub fn validate_decomposition(field: &MultivectorField, sets: Vec<CellSet>) -> Result<MorseDecomposition, MorseError> {
    require_invariant(field)?;
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if !sets[i].is_disjoint(&sets[j]) {
                return Err(MorseError::Overlap(i, j));
            }
        }
    }
    for (index, m) in sets.iter().enumerate() {
        if let Some(failure) = isolation_failure(field, m) {
            return Err(MorseError::NotIsolatedInvariant { index, failure });
        }
    }
    let space = field.space();
    let owner = |x: CellId| sets.iter().position(|m| m.contains(x));
    let components: Vec<EssentialScc> = essential_sccs(field, &space.full_set());
    let mut cores = vec![space.empty_set(); sets.len()];
    for scc in &components {
        let first = scc.cells.first().expect("components are nonempty");
        let home = owner(first);
        match home {
            Some(h) if scc.cells.is_subset(&sets[h]) => cores[h].union_with(&scc.cells),
            _ => return Err(MorseError::RecurrenceAcrossSets { cycle: crossing_cycle(field, scc, &owner) }),
        }
    }
    for (index, core) in cores.iter().enumerate() {
        if !core.is_empty() && !cells_between(field, core, core).is_subset(&sets[index]) {
            return Err(MorseError::ReturnToSameSet { index });
        }
    }
    let order = reachability_order(field, &cores);
    if !order.is_antisymmetric() {
        let n = sets.len();
        let p = (0..n).find(|&p| (0..n).any(|q| p != q && order.leq(p, q) && order.leq(q, p))).unwrap();
        return Err(MorseError::OrderCycle(p));
    }
    Ok(MorseDecomposition { sets, order })
}

/// A closed walk in `scc` that visits two different owners (or an unowned cell).
fn crossing_cycle(
    field: &MultivectorField,
    scc: &EssentialScc,
    owner: &impl Fn(CellId) -> Option<usize>,
) -> Vec<CellId> {
    let g = field.digraph();
    for u in scc.cells.iter() {
        for &v in g.successors(u) {
            if scc.cells.contains(v) && (owner(u) != owner(v) || owner(u).is_none()) {
                let back = shortest_path(field, &scc.cells, &[v], |x| x == u).expect("strongly connected");
                let mut cycle = vec![u];
                cycle.extend(&back[..back.len() - 1]);
                return cycle;
            }
        }
    }
    unreachable!("component is not contained in one set but no crossing step exists")
}

/// `M(I)`: union of the connection sets `C(M_i, M_j)` for `i, j ∈ I`.
pub fn morse_set(
    field: &MultivectorField,
    dec: &MorseDecomposition,
    indices: &BTreeSet<usize>,
) -> Result<CellSet, MorseError> {
    dec.check_indices(indices)?;
    let mut out = field.space().empty_set();
    for &i in indices {
        for &j in indices {
            if dec.order.leq(j, i) {
                out.union_with(&cells_between(field, &dec.sets[i], &dec.sets[j]));
            }
        }
    }
    if let Some(f) = isolation_failure(field, &out) {
        return Err(MorseError::InternalAssertion(format!("M(I) is not isolated invariant: {f}")));
    }
    Ok(out)
}

/// Attractor: invariant with `Π(A) = A`.
pub fn is_attractor(field: &MultivectorField, a: &CellSet) -> bool {
    field.pi_v_set(a) == *a && inv(field, a) == *a
}

/// Repeller: invariant with `Π⁻¹(R) = R`.
pub fn is_repeller(field: &MultivectorField, r: &CellSet) -> bool {
    field.pi_v_inverse(r) == *r && inv(field, r) == *r
}

/// Closed, V-compatible and invariant.
pub fn is_attractor_topological(field: &MultivectorField, a: &CellSet) -> bool {
    field.space().is_closed(a) && field.is_v_compatible(a) && inv(field, a) == *a
}

/// Open, V-compatible and invariant.
pub fn is_repeller_topological(field: &MultivectorField, r: &CellSet) -> bool {
    field.space().is_open(r) && field.is_v_compatible(r) && inv(field, r) == *r
}

/// `M(I)` for a down set `I`, which is an attractor.
pub fn attractor_of_down_set(
    field: &MultivectorField,
    dec: &MorseDecomposition,
    indices: &BTreeSet<usize>,
) -> Result<CellSet, MorseError> {
    dec.check_indices(indices)?;
    if !dec.order.is_down_set(indices) {
        return Err(MorseError::NotADownSet);
    }
    let a = morse_set(field, dec, indices)?;
    if field.pi_v_set(&a) != a {
        return Err(MorseError::InternalAssertion("M(I) of a down set is not forward invariant".into()));
    }
    Ok(a)
}

/// `A★ = Inv(X \ A)`.
pub fn dual_repeller(field: &MultivectorField, a: &CellSet) -> Result<CellSet, MorseError> {
    require_invariant(field)?;
    if !is_attractor(field, a) {
        return Err(MorseError::NotAttractor);
    }
    let r = inv(field, &field.space().full_set().difference(a));
    if !is_repeller(field, &r) {
        return Err(MorseError::InternalAssertion("dual of an attractor is not a repeller".into()));
    }
    Ok(r)
}

/// `R★ = Inv(X \ R)`.
pub fn dual_attractor(field: &MultivectorField, r: &CellSet) -> Result<CellSet, MorseError> {
    require_invariant(field)?;
    if !is_repeller(field, r) {
        return Err(MorseError::NotRepeller);
    }
    let a = inv(field, &field.space().full_set().difference(r));
    if !is_attractor(field, &a) {
        return Err(MorseError::InternalAssertion("dual of a repeller is not an attractor".into()));
    }
    Ok(a)
}

/// `(M(I≤), M(I<))`, an index pair for `M(I)` when `I` is convex.
pub fn index_pair_for_convex(
    field: &MultivectorField,
    dec: &MorseDecomposition,
    indices: &BTreeSet<usize>,
) -> Result<IndexPair, MorseError> {
    dec.check_indices(indices)?;
    if !dec.order.is_convex(indices) {
        return Err(MorseError::NotConvex);
    }
    let (down, strict) = dec.order.down_sets(indices);
    let p1 = morse_set(field, dec, &down)?;
    let p2 = morse_set(field, dec, &strict)?;
    let s = morse_set(field, dec, indices)?;
    Ok(IndexPair::validate(field, p1, p2, s)?)
}

/// Poincaré polynomial of each Morse set's Conley index.
pub fn morse_polynomials(
    field: &MultivectorField,
    dec: &MorseDecomposition,
) -> Result<Vec<PoincarePolynomial>, MorseError> {
    dec.sets.iter().map(|m| Ok(conley_index(field, m)?.polynomial)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorseEquationReport {
    /// `Σ p_{M_i}`
    pub lhs: Vec<u64>,
    /// `p_X`
    pub px: Vec<u64>,
    /// `(lhs - px) / (1 + t)`
    pub q: Vec<i64>,
    pub remainder: i64,
    pub q_nonnegative: bool,
}

impl MorseEquationReport {
    pub fn holds(&self) -> bool {
        self.remainder == 0 && self.q_nonnegative
    }
}

/// `Σ p_{M_i}(t) = p_X(t) + (1 + t) q(t)`.
pub fn morse_equation(field: &MultivectorField, dec: &MorseDecomposition) -> Result<MorseEquationReport, MorseError> {
    let lhs = morse_polynomials(field, dec)?.iter().fold(PoincarePolynomial::zero(), |acc, p| acc.add(p));
    let px = poincare_polynomial(field.space(), &field.space().full_set())?;
    let len = lhs.coeffs().len().max(px.coeffs().len());
    let diff: Vec<i64> = (0..len).map(|k| lhs.coeff(k) as i64 - px.coeff(k) as i64).collect();
    let (q, remainder) = divide_by_one_plus_t(&diff);
    let q_nonnegative = q.iter().all(|&c| c >= 0);
    Ok(MorseEquationReport { lhs: lhs.coeffs().to_vec(), px: px.coeffs().to_vec(), q, remainder, q_nonnegative })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Inequality {
    pub k: usize,
    pub lhs: i64,
    pub rhs: i64,
    pub margin: i64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorseInequalityReport {
    /// `m_k = Σ_r β_k(M_r)`
    pub m: Vec<u64>,
    /// `β_k(X)`
    pub beta: Vec<u64>,
    /// `m_k - m_{k-1} + ... ± m_0 ≥ β_k - β_{k-1} + ... ± β_0`
    pub strong: Vec<Inequality>,
    /// `m_k ≥ β_k`
    pub weak: Vec<Inequality>,
}

impl MorseInequalityReport {
    pub fn holds(&self) -> bool {
        self.strong.iter().chain(&self.weak).all(|i| i.holds)
    }
}

pub fn morse_inequalities(
    field: &MultivectorField,
    dec: &MorseDecomposition,
) -> Result<MorseInequalityReport, MorseError> {
    let sum = morse_polynomials(field, dec)?.iter().fold(PoincarePolynomial::zero(), |acc, p| acc.add(p));
    let px = poincare_polynomial(field.space(), &field.space().full_set())?;
    let top = sum.coeffs().len().max(px.coeffs().len());
    let m: Vec<u64> = (0..top).map(|k| sum.coeff(k)).collect();
    let beta: Vec<u64> = (0..top).map(|k| px.coeff(k)).collect();
    let row = |k: usize, lhs: i64, rhs: i64| Inequality { k, lhs, rhs, margin: lhs - rhs, holds: lhs >= rhs };
    let alternating = |v: &[u64], k: usize| -> i64 {
        (0..=k).map(|j| if (k - j).is_multiple_of(2) { v[j] as i64 } else { -(v[j] as i64) }).sum()
    };
    let strong = (0..top).map(|k| row(k, alternating(&m, k), alternating(&beta, k))).collect();
    let weak = (0..top).map(|k| row(k, m[k] as i64, beta[k] as i64)).collect();
    Ok(MorseInequalityReport { m, beta, strong, weak })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Attractor,
    Repeller,
    Saddle,
    /// Both an attractor and a repeller.
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphNode {
    pub index: usize,
    pub cells: Vec<String>,
    pub polynomial: PoincarePolynomial,
    pub role: Role,
}

/// Morse sets labelled with Poincaré polynomials; edges `(q, p)` run from
/// the higher set to the lower one and are transitively reduced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConleyMorseGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<(usize, usize)>,
}

pub fn role_of(field: &MultivectorField, m: &CellSet) -> Role {
    match (is_attractor(field, m), is_repeller(field, m)) {
        (true, true) => Role::Other,
        (true, false) => Role::Attractor,
        (false, true) => Role::Repeller,
        (false, false) => Role::Saddle,
    }
}

pub fn conley_morse_graph(field: &MultivectorField, dec: &MorseDecomposition) -> Result<ConleyMorseGraph, MorseError> {
    let polys = morse_polynomials(field, dec)?;
    let nodes = dec
        .sets
        .iter()
        .zip(polys)
        .enumerate()
        .map(|(index, (m, polynomial))| GraphNode {
            index,
            cells: field.space().names(m),
            polynomial,
            role: role_of(field, m),
        })
        .collect();
    let mut edges: Vec<(usize, usize)> = dec.order.hasse_edges().into_iter().map(|(p, q)| (q, p)).collect();
    edges.sort_unstable();
    Ok(ConleyMorseGraph { nodes, edges })
}

impl ConleyMorseGraph {
    /// Graphviz rendering; nodes are numbered from 1.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph conley_morse {\n");
        for n in &self.nodes {
            out.push_str(&format!("  M{0} [label=\"M{0}: {1}\"];\n", n.index + 1, n.polynomial));
        }
        for &(q, p) in &self.edges {
            out.push_str(&format!("  M{} -> M{};\n", q + 1, p + 1));
        }
        out.push_str("}\n");
        out
    }
}

/// Result of shrinking a field to its invariant part.
#[derive(Debug, Clone)]
pub struct InvariantRestriction {
    pub field: MultivectorField,
    /// Cell `i` of the restricted space is `embedding[i]` of the original.
    pub embedding: Vec<CellId>,
    /// Number of restriction steps performed (0 when already invariant).
    pub rounds: usize,
}

/// Replaces the space by its invariant part, repeating until the induced
/// field is invariant (criticality is recomputed in each subspace).
pub fn restrict_to_invariant_part(field: &MultivectorField) -> Result<InvariantRestriction, MorseError> {
    let mut current = field.clone();
    let mut embedding: Vec<CellId> = field.space().ids().collect();
    let mut rounds = 0;
    loop {
        let all = current.space().full_set();
        let part = inv(&current, &all);
        if part == all {
            return Ok(InvariantRestriction { field: current, embedding, rounds });
        }
        let (next, map) = current.restrict(&part)?;
        embedding = map.iter().map(|&c| embedding[c.index()]).collect();
        current = next;
        rounds += 1;
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::space::FiniteSpace;

    fn triangle_field() -> MultivectorField {
        let space = Arc::new(FiniteSpace::from_simplicial_complex(&[vec!["A", "B", "C"]]).unwrap());
        MultivectorField::from_names(space, &[vec!["A", "AC"], vec!["B", "AB"], vec!["C", "BC"], vec!["ABC"]]).unwrap()
    }

    #[test]
    fn attractor_repeller_on_triangle() {
        let f = triangle_field();
        let s = f.space();
        let dec = minimal_morse_decomposition(&f).unwrap();
        assert_eq!(dec.len(), 2);
        assert!(dec.order().lt(0, 1));
        let ring = dec.set(0).clone();
        assert!(is_attractor(&f, &ring));
        assert!(is_repeller(&f, dec.set(1)));
        assert_eq!(dual_repeller(&f, &ring).unwrap(), *dec.set(1));
        assert_eq!(dual_attractor(&f, dec.set(1)).unwrap(), ring);
        assert!(dual_repeller(&f, &s.full_set()).unwrap().is_empty());
        let eq = morse_equation(&f, &dec).unwrap();
        // (1 + t) + t^2 = 1 + (1 + t) t
        assert_eq!(eq.q, vec![0, 1]);
        assert!(eq.holds());
        let pair = index_pair_for_convex(&f, &dec, &BTreeSet::from([1])).unwrap();
        assert_eq!(pair.p1, s.full_set());
        assert_eq!(pair.p2, ring);
        let g = conley_morse_graph(&f, &dec).unwrap();
        assert_eq!(g.edges, vec![(1, 0)]);
        assert_eq!(g.nodes[0].role, Role::Attractor);
        assert_eq!(g.nodes[1].role, Role::Repeller);
        assert!(g.to_dot().contains("M2 -> M1;"));
    }

    #[test]
    fn index_errors() {
        let f = triangle_field();
        let dec = minimal_morse_decomposition(&f).unwrap();
        assert_eq!(morse_set(&f, &dec, &BTreeSet::from([7])), Err(MorseError::UnknownIndex(7)));
        assert_eq!(attractor_of_down_set(&f, &dec, &BTreeSet::from([1])), Err(MorseError::NotADownSet));
        assert_eq!(dual_repeller(&f, dec.set(1)), Err(MorseError::NotAttractor));
    }

    #[test]
    fn non_invariant_space_is_restricted() {
        // a single regular vector {A, AB} on an edge: nothing is invariant except B
        let space = Arc::new(FiniteSpace::from_simplicial_complex(&[vec!["A", "B"]]).unwrap());
        let f = MultivectorField::from_names(space, &[vec!["A", "AB"], vec!["B"]]).unwrap();
        assert!(matches!(minimal_morse_decomposition(&f), Err(MorseError::SpaceNotInvariant { .. })));
        let r = restrict_to_invariant_part(&f).unwrap();
        assert_eq!(r.rounds, 1);
        assert_eq!(r.field.space().len(), 1);
        assert_eq!(f.space().name(r.embedding[0]), "B");
        assert_eq!(minimal_morse_decomposition(&r.field).unwrap().len(), 1);
    }
}
