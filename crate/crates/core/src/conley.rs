//! Isolated invariant sets, index pairs and the homology Conley index.

use thiserror::Error;

use crate::complex::{divide_by_one_plus_t, relative_homology, HomologyError, HomologySignature, PoincarePolynomial};
use crate::dynamics::{inv, pull_back, push_forward};
use crate::mvf::MultivectorField;
use crate::space::{CellId, CellSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConleyError {
    #[error("not an isolated invariant set: {0}")]
    NotIsolatedInvariant(IsolationFailure),
    #[error("invalid index pair: {0}")]
    InvalidIndexPair(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

/// Which leg of the characterization "V-compatible, locally closed and
/// invariant" fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsolationFailure {
    /// `[cell]` meets the set without being contained in it.
    NotVCompatible { cell: CellId },
    /// `lower < middle < upper` with `middle` missing.
    NotLocallyClosed { lower: CellId, middle: CellId, upper: CellId },
    /// Cells without an essential solution inside the set.
    NotInvariant { outside_inv: CellSet },
}

impl std::fmt::Display for IsolationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IsolationFailure::NotVCompatible { cell } => write!(f, "not V-compatible at cell #{}", cell.index()),
            IsolationFailure::NotLocallyClosed { middle, .. } => {
                write!(f, "not locally closed (missing cell #{})", middle.index())
            }
            IsolationFailure::NotInvariant { outside_inv } => {
                write!(f, "not invariant ({} cells carry no essential solution)", outside_inv.len())
            }
        }
    }
}

/// First failing leg of the isolated-invariance characterization, if any.
pub fn isolation_failure(field: &MultivectorField, set: &CellSet) -> Option<IsolationFailure> {
    let space = field.space();
    if let Some(cell) = set.iter().find(|&x| !field.class(x).is_subset(set)) {
        return Some(IsolationFailure::NotVCompatible { cell });
    }
    if let Some((lower, middle, upper)) = space.convexity_witness(set) {
        return Some(IsolationFailure::NotLocallyClosed { lower, middle, upper });
    }
    let invariant = inv(field, set);
    if invariant != *set {
        return Some(IsolationFailure::NotInvariant { outside_inv: set.difference(&invariant) });
    }
    None
}

pub fn is_isolated_invariant(field: &MultivectorField, set: &CellSet) -> bool {
    isolation_failure(field, set).is_none()
}

fn require_isolated(field: &MultivectorField, set: &CellSet) -> Result<(), ConleyError> {
    match isolation_failure(field, set) {
        Some(f) => Err(ConleyError::NotIsolatedInvariant(f)),
        None => Ok(()),
    }
}

/// Does the closed set `n` isolate `s`? Paths in `n` with endpoints in `s`
/// must stay in `s`, and `Π(s) ⊆ n`.
pub fn isolates(field: &MultivectorField, n: &CellSet, s: &CellSet) -> bool {
    let space = field.space();
    space.is_closed(n)
        && s.is_subset(n)
        && field.pi_v_set(s).is_subset(n)
        && push_forward(field, s, n).intersection(&pull_back(field, s, n)).is_subset(s)
}

/// A validated index pair `(P1, P2)` for the isolated invariant set `for_set`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexPair {
    pub p1: CellSet,
    pub p2: CellSet,
    pub for_set: CellSet,
    pub saturated: bool,
}

impl IndexPair {
    /// Checks closedness, nesting and the three index-pair axioms by enumeration.
    pub fn validate(field: &MultivectorField, p1: CellSet, p2: CellSet, for_set: CellSet) -> Result<Self, ConleyError> {
        let space = field.space();
        let bad = |msg: String| Err(ConleyError::InvalidIndexPair(msg));
        if !space.is_closed(&p1) || !space.is_closed(&p2) {
            return bad("P1 and P2 must be closed".into());
        }
        if !p2.is_subset(&p1) {
            return bad("P2 is not contained in P1".into());
        }
        // positive invariance of P2 relative to P1
        for x in p2.iter() {
            if let Some(y) = field.pi_v(x).intersection(&p1).difference(&p2).first() {
                return bad(format!("{} -> {} leaves P2 inside P1", space.name(x), space.name(y)));
            }
        }
        // every exit from P1 passes through P2
        for x in p1.difference(&p2).iter() {
            if !field.pi_v(x).is_subset(&p1) {
                return bad(format!("{} exits P1 outside P2", space.name(x)));
            }
        }
        if inv(field, &p1.difference(&p2)) != for_set {
            return bad("invariant part of P1 \\ P2 differs from S".into());
        }
        let saturated = p1.difference(&p2) == for_set;
        Ok(IndexPair { p1, p2, for_set, saturated })
    }

    pub fn signature(&self, field: &MultivectorField) -> Result<HomologySignature, HomologyError> {
        relative_homology(field.space(), &self.p1, &self.p2)
    }
}

/// `(cl S, mo S)`, the smallest saturated index pair.
pub fn minimal_index_pair(field: &MultivectorField, s: &CellSet) -> Result<IndexPair, ConleyError> {
    require_isolated(field, s)?;
    let space = field.space();
    IndexPair::validate(field, space.closure(s), space.mouth(s), s.clone())
}

/// Cells of `P1` with no path inside `P1` into `S`.
pub fn p_hat(field: &MultivectorField, pair: &IndexPair) -> CellSet {
    pair.p1.difference(&pull_back(field, &pair.for_set, &pair.p1))
}

/// `(S ∪ P̂, P2)`.
pub fn star_pair(field: &MultivectorField, pair: &IndexPair) -> Result<IndexPair, ConleyError> {
    let hat = p_hat(field, pair);
    IndexPair::validate(field, pair.for_set.union(&hat), pair.p2.clone(), pair.for_set.clone())
}

/// `(S ∪ P̂, P̂)`, a saturated pair.
pub fn star_star_pair(field: &MultivectorField, pair: &IndexPair) -> Result<IndexPair, ConleyError> {
    let hat = p_hat(field, pair);
    IndexPair::validate(field, pair.for_set.union(&hat), hat, pair.for_set.clone())
}

/// Homology Conley index with its Poincaré polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConleyIndex {
    pub signature: HomologySignature,
    pub polynomial: PoincarePolynomial,
}

/// `Con(S) = H(cl S, mo S)`; `Con(∅)` is trivial.
pub fn conley_index(field: &MultivectorField, s: &CellSet) -> Result<ConleyIndex, ConleyError> {
    let pair = minimal_index_pair(field, s)?;
    let signature = pair.signature(field)?;
    let polynomial = signature.poincare();
    Ok(ConleyIndex { signature, polynomial })
}

/// `Con(S1 ∪ S2) = Con(S1) ⊕ Con(S2)` for closure-disjoint isolated invariant sets.
pub fn check_additivity(field: &MultivectorField, s1: &CellSet, s2: &CellSet) -> Result<bool, ConleyError> {
    let space = field.space();
    let s = s1.union(s2);
    if !space.closure(s1).is_disjoint(s2) || !s1.is_disjoint(&space.closure(s2)) {
        return Err(ConleyError::PreconditionViolated("closures of the parts meet the other part".into()));
    }
    for part in [s1, s2, &s] {
        if !is_isolated_invariant(field, part) {
            return Err(ConleyError::PreconditionViolated("a part is not isolated invariant".into()));
        }
    }
    let whole = conley_index(field, &s)?.signature;
    let sum = conley_index(field, s1)?.signature.direct_sum(&conley_index(field, s2)?.signature);
    Ok(whole == sum)
}

/// `q(t)` in `p_S(t) + p_{P2}(t) = p_{P1}(t) + (1 + t) q(t)`, or `None` if the
/// division leaves a remainder.
pub fn poincare_equation_quotient(field: &MultivectorField, pair: &IndexPair) -> Result<Option<Vec<i64>>, ConleyError> {
    let space = field.space();
    let empty = space.empty_set();
    let ps = pair.signature(field)?.poincare().to_signed();
    let p2 = relative_homology(space, &pair.p2, &empty)?.poincare().to_signed();
    let p1 = relative_homology(space, &pair.p1, &empty)?.poincare().to_signed();
    let len = ps.len().max(p1.len()).max(p2.len());
    let at = |v: &[i64], k: usize| v.get(k).copied().unwrap_or(0);
    let diff: Vec<i64> = (0..len).map(|k| at(&ps, k) + at(&p2, k) - at(&p1, k)).collect();
    let (q, rem) = divide_by_one_plus_t(&diff);
    Ok((rem == 0).then_some(q))
}
