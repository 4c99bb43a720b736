//! Solutions of the combinatorial flow: strongly connected components,
//! invariant parts, reachability, limit sets and connection sets.
//!
//! Essential full solutions are represented as lassos (a backward cycle, a
//! stem, a forward cycle). In a finite digraph every question asked here
//! about essential solutions depends only on their ultimate images, which
//! are cycles, so nothing is lost.
//!
//! The invariant part of `A` is computed as the set of cells lying on a path
//! inside `A` from an essential strongly connected component of `G_V|A` to
//! another (or the same) one.

use std::collections::VecDeque;

use thiserror::Error;

use crate::mvf::MultivectorField;
use crate::space::{CellId, CellSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynamicsError {
    #[error("invalid lasso: {0}")]
    InvalidLasso(String),
    #[error("lasso is not an essential solution")]
    NotEssential,
    #[error("set is not a minimal Morse set (an essential strongly connected component of the flow)")]
    NotMinimalMorseSet,
}

/// A strongly connected component of `G_V` restricted to some set, carrying
/// the data that decides whether it supports an essential solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EssentialScc {
    pub cells: CellSet,
    pub meets_critical: bool,
    pub multivector_count: usize,
}

impl EssentialScc {
    pub fn is_essential(&self) -> bool {
        self.meets_critical || self.multivector_count >= 2
    }
}

/// All strongly connected components of `G_V` restricted to `within`,
/// ordered by their smallest cell. Iterative Tarjan.
pub fn strongly_connected_components(field: &MultivectorField, within: &CellSet) -> Vec<CellSet> {
    let space = field.space();
    let g = field.digraph();
    let n = space.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next = 0usize;
    let mut components = Vec::new();

    for root in within.iter() {
        if index[root.index()] != UNSEEN {
            continue;
        }
        // (vertex, position in its successor list)
        let mut frames: Vec<(usize, usize)> = vec![(root.index(), 0)];
        index[root.index()] = next;
        low[root.index()] = next;
        next += 1;
        stack.push(root.index());
        on_stack[root.index()] = true;

        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            let succ = g.successors(CellId(v));
            if *pos < succ.len() {
                let w = succ[*pos].index();
                *pos += 1;
                if !within.contains(CellId(w)) {
                    continue;
                }
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = space.empty_set();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp.insert(CellId(w));
                    if w == v {
                        break;
                    }
                }
                components.push(comp);
            }
        }
    }
    components.sort_by_key(|c| c.first());
    components
}

fn classify(field: &MultivectorField, cells: CellSet) -> EssentialScc {
    let mut classes: Vec<usize> = cells.iter().map(|x| field.multivector_of(x)).collect();
    classes.sort_unstable();
    classes.dedup();
    let meets_critical = classes.iter().any(|&v| field.is_critical(v));
    EssentialScc { cells, meets_critical, multivector_count: classes.len() }
}

/// Strongly connected components of `G_V|A` that admit an essential solution.
pub fn essential_sccs(field: &MultivectorField, within: &CellSet) -> Vec<EssentialScc> {
    strongly_connected_components(field, within)
        .into_iter()
        .map(|c| classify(field, c))
        .filter(EssentialScc::is_essential)
        .collect()
}

fn reach(field: &MultivectorField, from: &CellSet, within: &CellSet, forward: bool) -> CellSet {
    let g = field.digraph();
    let mut seen = from.intersection(within);
    let mut queue: VecDeque<CellId> = seen.iter().collect();
    while let Some(x) = queue.pop_front() {
        let next = if forward { g.successors(x) } else { g.predecessors(x) };
        for &y in next {
            if within.contains(y) && seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Cells of `B` reachable by a path in `B` starting in `A ∩ B`.
pub fn push_forward(field: &MultivectorField, a: &CellSet, b: &CellSet) -> CellSet {
    reach(field, a, b, true)
}

/// Cells of `B` from which a path in `B` reaches `A ∩ B`.
pub fn pull_back(field: &MultivectorField, a: &CellSet, b: &CellSet) -> CellSet {
    reach(field, a, b, false)
}

/// Invariant part: cells of `A` through which an essential solution in `A` passes.
pub fn inv(field: &MultivectorField, a: &CellSet) -> CellSet {
    let mut seeds = field.space().empty_set();
    for scc in essential_sccs(field, a) {
        seeds.union_with(&scc.cells);
    }
    push_forward(field, &seeds, a).intersection(&pull_back(field, &seeds, a))
}

/// `{ x | src reaches x and x reaches tgt }` in the whole digraph.
pub(crate) fn cells_between(field: &MultivectorField, src: &CellSet, tgt: &CellSet) -> CellSet {
    let all = field.space().full_set();
    push_forward(field, src, &all).intersection(&pull_back(field, tgt, &all))
}

/// Connection set `C(source, target)` between two minimal Morse sets.
pub fn connection_set(field: &MultivectorField, source: &CellSet, target: &CellSet) -> Result<CellSet, DynamicsError> {
    let minimal = essential_sccs(field, &field.space().full_set());
    for s in [source, target] {
        if !minimal.iter().any(|m| m.cells == *s) {
            return Err(DynamicsError::NotMinimalMorseSet);
        }
    }
    Ok(cells_between(field, source, target))
}

/// Eventually periodic full solution `...bc bc stem fc fc...`.
///
/// `backward_cycle` and `forward_cycle` are closed walks (the last cell steps
/// back to the first); the last backward cell steps into the stem, and the
/// last stem cell into the first forward cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    backward_cycle: Vec<CellId>,
    stem: Vec<CellId>,
    forward_cycle: Vec<CellId>,
}

impl Lasso {
    pub fn new(
        field: &MultivectorField,
        backward_cycle: Vec<CellId>,
        stem: Vec<CellId>,
        forward_cycle: Vec<CellId>,
    ) -> Result<Self, DynamicsError> {
        if backward_cycle.is_empty() || forward_cycle.is_empty() {
            return Err(DynamicsError::InvalidLasso("cycles must be nonempty".into()));
        }
        let n = field.space().len();
        if backward_cycle.iter().chain(&stem).chain(&forward_cycle).any(|x| x.index() >= n) {
            return Err(DynamicsError::InvalidLasso("cell out of range".into()));
        }
        let g = field.digraph();
        let check = |walk: &[CellId], what: &str| -> Result<(), DynamicsError> {
            for w in walk.windows(2) {
                if !g.has_edge(w[0], w[1]) {
                    return Err(DynamicsError::InvalidLasso(format!(
                        "{what}: no step {} -> {}",
                        field.space().name(w[0]),
                        field.space().name(w[1])
                    )));
                }
            }
            Ok(())
        };
        let close = |c: &[CellId]| [c[c.len() - 1], c[0]];
        check(&backward_cycle, "backward cycle")?;
        check(&close(&backward_cycle), "backward cycle")?;
        check(&forward_cycle, "forward cycle")?;
        check(&close(&forward_cycle), "forward cycle")?;
        let mut spine = vec![*backward_cycle.last().unwrap()];
        spine.extend(&stem);
        spine.push(forward_cycle[0]);
        check(&spine, "stem")?;
        Ok(Lasso { backward_cycle, stem, forward_cycle })
    }

    /// Periodic solution running around one cycle forever.
    pub fn periodic(field: &MultivectorField, cycle: Vec<CellId>) -> Result<Self, DynamicsError> {
        Lasso::new(field, cycle.clone(), Vec::new(), cycle)
    }

    pub fn backward_cycle(&self) -> &[CellId] {
        &self.backward_cycle
    }

    pub fn stem(&self) -> &[CellId] {
        &self.stem
    }

    pub fn forward_cycle(&self) -> &[CellId] {
        &self.forward_cycle
    }

    /// The image of the solution.
    pub fn cells(&self, field: &MultivectorField) -> CellSet {
        field.space().set_of(self.backward_cycle.iter().chain(&self.stem).chain(&self.forward_cycle).copied())
    }

    pub fn contains(&self, x: CellId) -> bool {
        self.backward_cycle.contains(&x) || self.stem.contains(&x) || self.forward_cycle.contains(&x)
    }

    pub fn is_essential(&self, field: &MultivectorField) -> bool {
        cycle_is_essential(field, &self.backward_cycle) && cycle_is_essential(field, &self.forward_cycle)
    }

    /// The same solution with time reversed; a solution of the opposite field.
    pub fn reversed(&self) -> Lasso {
        let rev = |v: &[CellId]| v.iter().rev().copied().collect::<Vec<_>>();
        Lasso {
            backward_cycle: rev(&self.forward_cycle),
            stem: rev(&self.stem),
            forward_cycle: rev(&self.backward_cycle),
        }
    }
}

/// A periodic walk is essential iff it meets two multivectors or stays in a
/// critical one.
pub fn cycle_is_essential(field: &MultivectorField, cycle: &[CellId]) -> bool {
    let Some(&first) = cycle.first() else { return false };
    let v = field.multivector_of(first);
    cycle.iter().any(|&x| field.multivector_of(x) != v) || field.is_critical(v)
}

/// α-limit set: V-hull of the backward ultimate image.
pub fn alpha_limit(field: &MultivectorField, lasso: &Lasso) -> Result<CellSet, DynamicsError> {
    if !lasso.is_essential(field) {
        return Err(DynamicsError::NotEssential);
    }
    Ok(field.v_hull(&field.space().set_of(lasso.backward_cycle.iter().copied())))
}

/// ω-limit set: V-hull of the forward ultimate image.
pub fn omega_limit(field: &MultivectorField, lasso: &Lasso) -> Result<CellSet, DynamicsError> {
    if !lasso.is_essential(field) {
        return Err(DynamicsError::NotEssential);
    }
    Ok(field.v_hull(&field.space().set_of(lasso.forward_cycle.iter().copied())))
}

/// Shortest walk inside `within` from any source to a cell satisfying `goal`.
pub(crate) fn shortest_path(
    field: &MultivectorField,
    within: &CellSet,
    sources: &[CellId],
    goal: impl Fn(CellId) -> bool,
) -> Option<Vec<CellId>> {
    let n = field.space().len();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in sources {
        if within.contains(s) && !seen[s.index()] {
            seen[s.index()] = true;
            queue.push_back(s);
        }
    }
    while let Some(x) = queue.pop_front() {
        if goal(x) {
            let mut path = vec![x];
            let mut cur = x.index();
            while let Some(p) = parent[cur] {
                path.push(CellId(p));
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        for &y in field.digraph().successors(x) {
            if within.contains(y) && !seen[y.index()] {
                seen[y.index()] = true;
                parent[y.index()] = Some(x.index());
                queue.push_back(y);
            }
        }
    }
    None
}

/// An essential closed walk inside the essential component `scc` that
/// starts at `start`; the closing step back to `start` is implicit.
pub fn essential_cycle_through(field: &MultivectorField, scc: &EssentialScc, start: CellId) -> Vec<CellId> {
    let cells = &scc.cells;
    let home = field.multivector_of(start);
    if scc.multivector_count == 1 {
        // inside a single critical multivector: the self-loop will do
        return vec![start];
    }
    // walk to a cell of another multivector, then come home
    let out = shortest_path(field, cells, &[start], |x| field.multivector_of(x) != home)
        .expect("component meets two multivectors");
    let back = shortest_path(field, cells, &[*out.last().unwrap()], |x| x == start).expect("strongly connected");
    let mut cycle = out;
    cycle.extend(&back[1..back.len() - 1]);
    cycle
}

/// An essential solution in `A` through `x`, if `x ∈ Inv A`.
pub fn essential_solution_through(field: &MultivectorField, a: &CellSet, x: CellId) -> Option<Lasso> {
    if !a.contains(x) {
        return None;
    }
    let sccs = essential_sccs(field, a);
    let mut seeds = field.space().empty_set();
    for s in &sccs {
        seeds.union_with(&s.cells);
    }
    let sources: Vec<CellId> = seeds.iter().collect();
    let to_x = shortest_path(field, a, &sources, |y| y == x)?;
    let from_x = shortest_path(field, a, &[x], |y| seeds.contains(y))?;
    let entry = to_x[0];
    let exit = *from_x.last().unwrap();
    let scc_of = |c: CellId| sccs.iter().find(|s| s.cells.contains(c)).expect("seed lies in a component");

    let mut backward = essential_cycle_through(field, scc_of(entry), entry);
    backward.rotate_left(1);
    let forward = essential_cycle_through(field, scc_of(exit), exit);
    let mut spine = to_x;
    spine.extend(&from_x[1..]);
    let stem = if spine.len() > 2 { spine[1..spine.len() - 1].to_vec() } else { Vec::new() };
    Some(Lasso::new(field, backward, stem, forward).expect("constructed from digraph walks"))
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
    fn components_of_triangle_field() {
        let f = triangle_field();
        let s = f.space();
        let ess = essential_sccs(&f, &s.full_set());
        assert_eq!(ess.len(), 2);
        assert_eq!(ess[0].cells, s.set_from_names(&["A", "B", "C", "AB", "AC", "BC"]).unwrap());
        assert_eq!(ess[0].multivector_count, 3);
        assert!(!ess[0].meets_critical);
        assert_eq!(ess[1].cells, s.set_from_names(&["ABC"]).unwrap());
        assert!(essential_sccs(&f, &s.set_from_names(&["A", "AC"]).unwrap()).is_empty());
        assert_eq!(inv(&f, &s.full_set()), s.full_set());
        assert!(inv(&f, &s.set_from_names(&["A", "AC"]).unwrap()).is_empty());
    }

    #[test]
    fn lasso_validation() {
        let f = triangle_field();
        let s = f.space();
        let id = |n: &str| s.id(n).unwrap();
        assert!(Lasso::new(&f, vec![], vec![], vec![id("A")]).is_err());
        // A cannot step up to ABC
        assert!(Lasso::new(&f, vec![id("A")], vec![], vec![id("ABC")]).is_err());
        let l = Lasso::new(&f, vec![id("ABC")], vec![id("AB")], vec![id("B"), id("AB")]).unwrap();
        // {B, AB} is one regular multivector
        assert!(!l.is_essential(&f));
        assert_eq!(alpha_limit(&f, &l), Err(DynamicsError::NotEssential));
        let constant = Lasso::periodic(&f, vec![id("ABC")]).unwrap();
        assert!(constant.is_essential(&f));
        assert_eq!(omega_limit(&f, &constant).unwrap(), s.singleton(id("ABC")));
    }

    #[test]
    fn witnesses_are_valid_lassos() {
        let f = triangle_field();
        let s = f.space();
        for x in s.ids() {
            let l = essential_solution_through(&f, &s.full_set(), x).unwrap();
            assert!(l.contains(x));
            assert!(l.is_essential(&f));
        }
        assert!(essential_solution_through(&f, &s.set_from_names(&["A", "AC"]).unwrap(), s.id("A").unwrap()).is_none());
    }

    #[test]
    fn connections() {
        let f = triangle_field();
        let s = f.space();
        let ring = s.set_from_names(&["A", "B", "C", "AB", "AC", "BC"]).unwrap();
        let top = s.set_from_names(&["ABC"]).unwrap();
        assert_eq!(connection_set(&f, &top, &ring).unwrap(), s.full_set());
        assert!(connection_set(&f, &ring, &top).unwrap().is_empty());
        assert_eq!(connection_set(&f, &ring, &ring).unwrap(), ring);
        assert_eq!(
            connection_set(&f, &s.set_from_names(&["A"]).unwrap(), &ring),
            Err(DynamicsError::NotMinimalMorseSet)
        );
    }
}
