//! Combinatorial multivector fields and their flow `Π(x) = [x] ∪ cl x`.

use std::sync::Arc;

use thiserror::Error;

use crate::complex::{index_signature, HomologyError, HomologySignature};
use crate::space::{CellId, CellSet, FiniteSpace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("multivector #{0} is empty")]
    EmptyMultivector(usize),
    #[error("multivector {{{}}} is not locally closed: {} < {} < {} with {} missing", .part.join(", "), .witness.0, .witness.1, .witness.2, .witness.1)]
    NotLocallyClosed { part: Vec<String>, witness: (String, String, String) },
    #[error("multivectors do not partition the space (missing: [{}], duplicated: [{}])", .missing.join(", "), .duplicated.join(", "))]
    NotAPartition { missing: Vec<String>, duplicated: Vec<String> },
    #[error("cell set does not belong to this space")]
    ForeignSet,
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

/// The digraph `G_V`: an arrow `x -> y` whenever `y ∈ Π(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowDigraph {
    succ: Vec<Vec<CellId>>,
    pred: Vec<Vec<CellId>>,
}

impl FlowDigraph {
    fn from_successors(succ: Vec<Vec<CellId>>) -> Self {
        let mut pred = vec![Vec::new(); succ.len()];
        for (x, targets) in succ.iter().enumerate() {
            for &y in targets {
                pred[y.0].push(CellId(x));
            }
        }
        FlowDigraph { succ, pred }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn successors(&self, x: CellId) -> &[CellId] {
        &self.succ[x.0]
    }

    pub fn predecessors(&self, x: CellId) -> &[CellId] {
        &self.pred[x.0]
    }

    pub fn has_edge(&self, x: CellId, y: CellId) -> bool {
        self.succ[x.0].binary_search(&y).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (CellId, CellId)> + '_ {
        self.succ.iter().enumerate().flat_map(|(x, ys)| ys.iter().map(move |&y| (CellId(x), y)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn transpose(&self) -> FlowDigraph {
        FlowDigraph { succ: self.pred.clone(), pred: self.succ.clone() }
    }
}

/// A partition of a finite space into locally closed multivectors.
///
/// Multivectors are numbered by the canonical index of their smallest cell.
/// Criticality (`H(cl V, mo V) ≠ 0`) is computed once, at construction.
#[derive(Debug, Clone)]
pub struct MultivectorField {
    space: Arc<FiniteSpace>,
    multivectors: Vec<CellSet>,
    assignment: Vec<usize>,
    signatures: Vec<HomologySignature>,
    digraph: FlowDigraph,
}

impl PartialEq for MultivectorField {
    fn eq(&self, other: &Self) -> bool {
        *self.space == *other.space && self.assignment == other.assignment && self.signatures == other.signatures
    }
}

impl MultivectorField {
    pub fn new(space: Arc<FiniteSpace>, parts: Vec<CellSet>) -> Result<Self, FieldError> {
        if parts.iter().any(|p| !space.owns(p)) {
            return Err(FieldError::ForeignSet);
        }
        if let Some(i) = parts.iter().position(CellSet::is_empty) {
            return Err(FieldError::EmptyMultivector(i));
        }
        let mut count = vec![0usize; space.len()];
        for part in &parts {
            for x in part.iter() {
                count[x.0] += 1;
            }
        }
        let missing: Vec<String> = space.ids().filter(|x| count[x.0] == 0).map(|x| space.name(x).to_string()).collect();
        let duplicated: Vec<String> =
            space.ids().filter(|x| count[x.0] > 1).map(|x| space.name(x).to_string()).collect();
        if !missing.is_empty() || !duplicated.is_empty() {
            return Err(FieldError::NotAPartition { missing, duplicated });
        }
        for part in &parts {
            if let Some((x, y, z)) = space.convexity_witness(part) {
                return Err(FieldError::NotLocallyClosed {
                    part: space.names(part),
                    witness: (space.name(x).into(), space.name(y).into(), space.name(z).into()),
                });
            }
        }

        let mut multivectors = parts;
        multivectors.sort_by_key(|p| p.first());
        let mut assignment = vec![0; space.len()];
        for (i, part) in multivectors.iter().enumerate() {
            for x in part.iter() {
                assignment[x.0] = i;
            }
        }
        let signatures = multivectors.iter().map(|v| index_signature(&space, v)).collect::<Result<Vec<_>, _>>()?;
        let succ = space
            .ids()
            .map(|x| {
                let mut s = multivectors[assignment[x.0]].union(&space.down_set(x));
                s.insert(x);
                s.iter().collect()
            })
            .collect();
        Ok(MultivectorField {
            space,
            multivectors,
            assignment,
            signatures,
            digraph: FlowDigraph::from_successors(succ),
        })
    }

    /// Builds the field from lists of cell names.
    pub fn from_names<S: AsRef<str>>(space: Arc<FiniteSpace>, parts: &[Vec<S>]) -> Result<Self, crate::Error> {
        let sets = parts.iter().map(|p| space.set_from_names(p)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(space, sets)?)
    }

    /// Every cell its own multivector.
    pub fn singletons(space: Arc<FiniteSpace>) -> Result<Self, FieldError> {
        let parts = space.ids().map(|x| space.singleton(x)).collect();
        Self::new(space, parts)
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<FiniteSpace> {
        &self.space
    }

    pub fn multivectors(&self) -> &[CellSet] {
        &self.multivectors
    }

    pub fn len(&self) -> usize {
        self.multivectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multivectors.is_empty()
    }

    /// Index of the multivector `[x]`.
    pub fn multivector_of(&self, x: CellId) -> usize {
        self.assignment[x.0]
    }

    /// The multivector `[x]` containing `x`.
    pub fn class(&self, x: CellId) -> &CellSet {
        &self.multivectors[self.assignment[x.0]]
    }

    pub fn is_critical(&self, multivector: usize) -> bool {
        !self.signatures[multivector].is_trivial()
    }

    pub fn is_critical_cell(&self, x: CellId) -> bool {
        self.is_critical(self.assignment[x.0])
    }

    pub fn critical_count(&self) -> usize {
        (0..self.len()).filter(|&i| self.is_critical(i)).count()
    }

    /// `H(cl V, mo V)` of one multivector.
    pub fn signature(&self, multivector: usize) -> &HomologySignature {
        &self.signatures[multivector]
    }

    pub fn digraph(&self) -> &FlowDigraph {
        &self.digraph
    }

    pub fn pi_v(&self, x: CellId) -> CellSet {
        self.space.set_of(self.digraph.successors(x).iter().copied())
    }

    pub fn pi_v_set(&self, set: &CellSet) -> CellSet {
        let mut out = self.space.empty_set();
        for x in set.iter() {
            for &y in self.digraph.successors(x) {
                out.insert(y);
            }
        }
        out
    }

    /// Large preimage `{ y | Π(y) ∩ S ≠ ∅ }`, assembled as `⋃ [x] ∪ opn x`.
    pub fn pi_v_inverse(&self, set: &CellSet) -> CellSet {
        let mut out = self.space.empty_set();
        for x in set.iter() {
            out.union_with(self.class(x));
            out.union_with(&self.space.up_set(x));
        }
        out
    }

    pub fn is_v_compatible(&self, set: &CellSet) -> bool {
        self.multivectors.iter().all(|v| v.is_disjoint(set) || v.is_subset(set))
    }

    /// Smallest V-compatible, locally closed superset of `set`.
    pub fn v_hull(&self, set: &CellSet) -> CellSet {
        let mut hull = set.clone();
        loop {
            let mut next = hull.clone();
            for x in hull.iter() {
                next.union_with(self.class(x));
            }
            next = self.space.closure(&next).intersection(&self.space.open_hull(&next));
            if next == hull {
                return hull;
            }
            hull = next;
        }
    }

    /// The same partition over the opposite space, criticality recomputed.
    pub fn opposite(&self) -> MultivectorField {
        let op = Arc::new(self.space.opposite());
        MultivectorField::new(op, self.multivectors.clone()).expect("a partition stays valid in the opposite space")
    }

    /// Field induced on a locally closed subspace `Y`; the second component
    /// maps cells of the subspace back to this space.
    pub fn restrict(&self, y: &CellSet) -> Result<(MultivectorField, Vec<CellId>), FieldError> {
        if !self.space.owns(y) {
            return Err(FieldError::ForeignSet);
        }
        if let Some((a, b, c)) = self.space.convexity_witness(y) {
            return Err(FieldError::NotLocallyClosed {
                part: self.space.names(y),
                witness: (self.space.name(a).into(), self.space.name(b).into(), self.space.name(c).into()),
            });
        }
        let (sub, map) = self.space.subspace(y);
        let mut back = vec![None; self.space.len()];
        for (i, &x) in map.iter().enumerate() {
            back[x.0] = Some(CellId(i));
        }
        let parts: Vec<CellSet> = self
            .multivectors
            .iter()
            .map(|v| sub.set_of(v.iter().filter_map(|x| back[x.0])))
            .filter(|p| !p.is_empty())
            .collect();
        let field = MultivectorField::new(Arc::new(sub), parts)?;
        Ok((field, map))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_field() -> MultivectorField {
        let space = Arc::new(FiniteSpace::from_simplicial_complex(&[vec!["A", "B", "C"]]).unwrap());
        MultivectorField::from_names(space, &[vec!["A", "AC"], vec!["B", "AB"], vec!["C", "BC"], vec!["ABC"]]).unwrap()
    }

    #[test]
    fn validation_errors() {
        let space = Arc::new(FiniteSpace::from_simplicial_complex(&[vec!["A", "B", "C"]]).unwrap());
        let err = MultivectorField::from_names(space.clone(), &[vec!["A", "ABC"], vec!["B", "C", "AB", "AC", "BC"]]);
        match err {
            Err(crate::Error::Field(FieldError::NotLocallyClosed { witness, .. })) => {
                assert_eq!(witness.0, "A");
                assert_eq!(witness.2, "ABC");
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = MultivectorField::from_names(space.clone(), &[vec!["A", "B", "C", "AB", "AC", "BC"]]).unwrap_err();
        assert_eq!(
            err,
            crate::Error::Field(FieldError::NotAPartition { missing: vec!["ABC".into()], duplicated: vec![] })
        );
        let parts = vec![space.empty_set(), space.full_set()];
        assert_eq!(MultivectorField::new(space, parts).unwrap_err(), FieldError::EmptyMultivector(0));
    }

    #[test]
    fn flow_of_triangle_field() {
        let f = triangle_field();
        let s = f.space();
        let abc = s.id("ABC").unwrap();
        assert_eq!(f.pi_v(abc), s.full_set());
        let a = s.id("A").unwrap();
        assert_eq!(f.pi_v(a), s.set_from_names(&["A", "AC"]).unwrap());
        for x in s.ids() {
            assert!(f.digraph().has_edge(x, x));
            assert!(s.down_set(x).is_subset(&f.pi_v(x)));
        }
        assert_eq!(f.critical_count(), 1);
        assert!(f.is_critical(f.multivector_of(abc)));
    }

    #[test]
    fn inverse_matches_large_preimage() {
        let f = triangle_field();
        let s = f.space();
        for y in s.ids() {
            let target = s.singleton(y);
            let brute = s.set_of(s.ids().filter(|&x| f.pi_v(x).contains(y)));
            assert_eq!(f.pi_v_inverse(&target), brute);
        }
        assert!(f.pi_v_inverse(&s.empty_set()).is_empty());
        assert_eq!(f.pi_v_inverse(&s.full_set()), s.full_set());
    }

    #[test]
    fn opposite_transposes_the_digraph() {
        let f = triangle_field();
        let op = f.opposite();
        assert_eq!(*op.digraph(), f.digraph().transpose());
        assert_eq!(op.opposite(), f);
    }

    #[test]
    fn hull_and_restriction() {
        let f = triangle_field();
        let s = f.space();
        let a = s.set_from_names(&["A"]).unwrap();
        assert_eq!(f.v_hull(&a), s.set_from_names(&["A", "AC"]).unwrap());
        assert!(f.is_v_compatible(&s.set_from_names(&["A", "AC", "ABC"]).unwrap()));
        assert!(!f.is_v_compatible(&a));
        let (same, _) = f.restrict(&s.full_set()).unwrap();
        assert_eq!(same, f);
        let ring = s.set_from_names(&["A", "B", "C", "AB", "AC", "BC"]).unwrap();
        let (sub, map) = f.restrict(&ring).unwrap();
        assert_eq!(sub.len(), 3);
        assert_eq!(map.len(), 6);
        let one = s.set_from_names(&["ABC"]).unwrap();
        assert_eq!(f.restrict(&one).unwrap().0.len(), 1);
    }
}
