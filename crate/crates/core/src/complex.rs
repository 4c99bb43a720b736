//! Order complexes and integer relative homology.
//!
//! The homology of a pair of subsets `B ⊆ A` of a finite space is computed as
//! the simplicial homology of the pair of order complexes `(K(A), K(B))`:
//! chains of `K(A)` that do not lie in `K(B)` span the relative chain groups,
//! and boundary faces landing in `K(B)` are dropped.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::snf::{invariant_factors, SparseMatrix};
use crate::space::{CellId, CellSet, FiniteSpace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("subspace pair is not nested (B is not a subset of A)")]
    NotNested,
    #[error("set is not locally closed")]
    NotLocallyClosed,
    #[error("torsion coefficient {0} does not fit in 64 bits")]
    TorsionOverflow(BigUint),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// Simplices of an order complex (strictly increasing chains), graded by
/// dimension and listed in lexicographic order of cell ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OrderComplex {
    simplices: Vec<Vec<Vec<CellId>>>,
}

impl OrderComplex {
    /// `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.len().checked_sub(1)
    }

    pub fn simplices(&self, dim: usize) -> &[Vec<CellId>] {
        self.simplices.get(dim).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.simplices.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<CellId>> {
        self.simplices.iter().flatten()
    }
}

/// All nonempty chains `x0 < x1 < ... < xk` of cells in `set`.
pub fn order_complex(space: &FiniteSpace, set: &CellSet) -> OrderComplex {
    let mut simplices: Vec<Vec<Vec<CellId>>> = Vec::new();
    let mut chain = Vec::new();
    for x in set.iter() {
        extend_chains(space, set, x, &mut chain, &mut simplices);
    }
    OrderComplex { simplices }
}

fn extend_chains(
    space: &FiniteSpace,
    set: &CellSet,
    top: CellId,
    chain: &mut Vec<CellId>,
    out: &mut Vec<Vec<Vec<CellId>>>,
) {
    chain.push(top);
    let dim = chain.len() - 1;
    if out.len() <= dim {
        out.resize_with(dim + 1, Vec::new);
    }
    out[dim].push(chain.clone());
    let above = space.up_bits(top);
    for y in set.iter() {
        if y != top && above.contains(y.index()) {
            extend_chains(space, set, y, chain, out);
        }
    }
    chain.pop();
}

/// Relative chain complex of `(K(A), K(B))` with its boundary matrices.
#[derive(Debug, Clone)]
pub struct RelativeChainComplex {
    /// Basis chains per dimension.
    pub bases: Vec<Vec<Vec<CellId>>>,
    /// `boundaries[k]` maps dimension `k` to dimension `k - 1`; `boundaries[0]` is zero.
    pub boundaries: Vec<SparseMatrix>,
}

impl RelativeChainComplex {
    pub fn build(space: &FiniteSpace, a: &CellSet, b: &CellSet) -> Result<Self, HomologyError> {
        if !b.is_subset(a) {
            return Err(HomologyError::NotNested);
        }
        let full = order_complex(space, a);
        let in_b = |chain: &[CellId]| chain.iter().all(|&c| b.contains(c));
        let bases: Vec<Vec<Vec<CellId>>> = (0..full.simplices.len())
            .map(|k| full.simplices(k).iter().filter(|s| !in_b(s)).cloned().collect())
            .collect();
        let mut bases = bases;
        while bases.last().is_some_and(Vec::is_empty) {
            bases.pop();
        }
        let positions: Vec<HashMap<&[CellId], usize>> =
            bases.iter().map(|basis| basis.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect()).collect();

        let mut boundaries = Vec::with_capacity(bases.len());
        for k in 0..bases.len() {
            if k == 0 {
                boundaries.push(SparseMatrix::new(0, bases[0].len()));
                continue;
            }
            let mut m = SparseMatrix::new(bases[k - 1].len(), bases[k].len());
            for (col, simplex) in bases[k].iter().enumerate() {
                for skip in 0..simplex.len() {
                    let face: Vec<CellId> =
                        simplex.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, &c)| c).collect();
                    if let Some(&row) = positions[k - 1].get(face.as_slice()) {
                        let sign = if skip % 2 == 0 { 1 } else { -1 };
                        m.entries.push((row, col, sign));
                    }
                }
            }
            boundaries.push(m);
        }
        Ok(RelativeChainComplex { bases, boundaries })
    }

    pub fn rank(&self, dim: usize) -> usize {
        self.bases.get(dim).map_or(0, Vec::len)
    }

    /// Homology from the Smith normal forms of the boundary matrices.
    pub fn homology(&self) -> Result<HomologySignature, HomologyError> {
        let top = self.bases.len();
        let factors: Vec<Vec<BigUint>> = self.boundaries.iter().map(invariant_factors).collect();
        let rank_of = |k: usize| factors.get(k).map_or(0, Vec::len);
        let mut betti = Vec::with_capacity(top);
        let mut torsion = Vec::with_capacity(top);
        for k in 0..top {
            let outgoing = if k == 0 { 0 } else { rank_of(k) };
            betti.push(self.rank(k) - outgoing - rank_of(k + 1));
            let mut tors = Vec::new();
            if let Some(next) = factors.get(k + 1) {
                for f in next.iter().filter(|f| !f.is_one()) {
                    tors.push(u64::try_from(f).map_err(|_| HomologyError::TorsionOverflow(f.clone()))?);
                }
            }
            torsion.push(tors);
        }
        Ok(HomologySignature::new(betti, torsion))
    }
}

/// Betti numbers and torsion coefficients of a relative homology group.
///
/// Both vectors are trimmed to the highest degree carrying nonzero homology,
/// so equal groups have equal signatures.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct HomologySignature {
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<u64>>,
}

impl HomologySignature {
    pub fn new(mut betti: Vec<usize>, mut torsion: Vec<Vec<u64>>) -> Self {
        let len = betti.len().max(torsion.len());
        betti.resize(len, 0);
        torsion.resize(len, Vec::new());
        while betti.last() == Some(&0) && torsion.last().is_some_and(Vec::is_empty) {
            betti.pop();
            torsion.pop();
        }
        for t in &mut torsion {
            t.sort_unstable();
        }
        HomologySignature { betti, torsion }
    }

    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn is_trivial(&self) -> bool {
        self.betti.is_empty()
    }

    pub fn betti(&self, degree: usize) -> usize {
        self.betti.get(degree).copied().unwrap_or(0)
    }

    pub fn has_torsion(&self) -> bool {
        self.torsion.iter().any(|t| !t.is_empty())
    }

    /// Signature of the direct sum of the two groups.
    pub fn direct_sum(&self, other: &HomologySignature) -> HomologySignature {
        let len = self.betti.len().max(other.betti.len());
        let betti = (0..len).map(|k| self.betti(k) + other.betti(k)).collect();
        let torsion = (0..len)
            .map(|k| {
                // factors of a sum are regrouped, not concatenated
                let mut all: Vec<u64> = self.torsion.get(k).into_iter().flatten().copied().collect();
                all.extend(other.torsion.get(k).into_iter().flatten().copied());
                normalize_torsion(all)
            })
            .collect();
        HomologySignature::new(betti, torsion)
    }

    pub fn poincare(&self) -> PoincarePolynomial {
        PoincarePolynomial::new(self.betti.iter().map(|&b| b as u64).collect())
    }
}

/// Re-express a finite abelian group given by cyclic orders as its invariant
/// factors (each dividing the next).
pub fn normalize_torsion(orders: Vec<u64>) -> Vec<u64> {
    // prime-power decomposition, then regroup largest powers together
    let mut powers: HashMap<u64, Vec<u64>> = HashMap::new();
    for mut n in orders.into_iter().filter(|&n| n > 1) {
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                let mut q = 1;
                while n % p == 0 {
                    n /= p;
                    q *= p;
                }
                powers.entry(p).or_default().push(q);
            }
            p += 1;
        }
        if n > 1 {
            powers.entry(n).or_default().push(n);
        }
    }
    let width = powers.values().map(Vec::len).max().unwrap_or(0);
    let mut factors = vec![1u64; width];
    for list in powers.values_mut() {
        list.sort_unstable_by(|a, b| b.cmp(a));
        for (i, q) in list.iter().enumerate() {
            factors[width - 1 - i] *= q;
        }
    }
    factors
}

/// Poincaré polynomial: coefficient `k` is the `k`-th Betti number.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PoincarePolynomial {
    coeffs: Vec<u64>,
}

impl PoincarePolynomial {
    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PoincarePolynomial { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> u64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &PoincarePolynomial) -> PoincarePolynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        PoincarePolynomial::new((0..len).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn to_signed(&self) -> Vec<i64> {
        self.coeffs.iter().map(|&c| c as i64).collect()
    }
}

impl fmt::Display for PoincarePolynomial {
    /// Ascending powers, e.g. `1 + t`, `t^2`, `2 + 3t + 2t^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_polynomial(&self.to_signed()))
    }
}

/// Renders integer coefficients (ascending powers of `t`).
pub fn format_polynomial(coeffs: &[i64]) -> String {
    let mut terms: Vec<String> = Vec::new();
    for (k, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mag = c.unsigned_abs();
        let body = match (k, mag) {
            (0, m) => m.to_string(),
            (1, 1) => "t".to_string(),
            (1, m) => format!("{m}t"),
            (k, 1) => format!("t^{k}"),
            (k, m) => format!("{m}t^{k}"),
        };
        if terms.is_empty() {
            terms.push(if c < 0 { format!("-{body}") } else { body });
        } else {
            terms.push(format!("{} {body}", if c < 0 { "-" } else { "+" }));
        }
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" ")
    }
}

/// Divides by `1 + t`; returns `(quotient, remainder)` with the remainder a constant.
pub fn divide_by_one_plus_t(coeffs: &[i64]) -> (Vec<i64>, i64) {
    let mut c: Vec<i64> = coeffs.to_vec();
    while c.last() == Some(&0) {
        c.pop();
    }
    if c.is_empty() {
        return (Vec::new(), 0);
    }
    let n = c.len() - 1;
    let mut q = vec![0i64; n];
    // from the top: c_n = q_{n-1}, c_k = q_k + q_{k-1}
    for k in (1..=n).rev() {
        let carry = if k < n { q[k] } else { 0 };
        q[k - 1] = c[k] - carry;
    }
    let rem = c[0] - q.first().copied().unwrap_or(0);
    while q.last() == Some(&0) {
        q.pop();
    }
    (q, rem)
}

/// `H(K(A), K(B))` over the integers.
pub fn relative_homology(space: &FiniteSpace, a: &CellSet, b: &CellSet) -> Result<HomologySignature, HomologyError> {
    RelativeChainComplex::build(space, a, b)?.homology()
}

/// Homology signature of the pair `(cl S, mo S)`.
pub fn index_signature(space: &FiniteSpace, set: &CellSet) -> Result<HomologySignature, HomologyError> {
    if !space.is_locally_closed(set) {
        return Err(HomologyError::NotLocallyClosed);
    }
    relative_homology(space, &space.closure(set), &space.mouth(set))
}

/// Poincaré polynomial of a locally closed set, `p_S = p(cl S, mo S)`.
pub fn poincare_polynomial(space: &FiniteSpace, set: &CellSet) -> Result<PoincarePolynomial, HomologyError> {
    Ok(index_signature(space, set)?.poincare())
}

/// Compares `H(A, B)` and `H(C, D)` for closed pairs with `A \ B = C \ D`.
pub fn excision_check(
    space: &FiniteSpace,
    a: &CellSet,
    b: &CellSet,
    c: &CellSet,
    d: &CellSet,
) -> Result<bool, HomologyError> {
    for (name, s) in [("A", a), ("B", b), ("C", c), ("D", d)] {
        if !space.is_closed(s) {
            return Err(HomologyError::PreconditionViolated(format!("{name} is not closed")));
        }
    }
    if !b.is_subset(a) || !d.is_subset(c) {
        return Err(HomologyError::PreconditionViolated("pairs are not nested".into()));
    }
    if a.difference(b) != c.difference(d) {
        return Err(HomologyError::PreconditionViolated("A \\ B differs from C \\ D".into()));
    }
    Ok(relative_homology(space, a, b)? == relative_homology(space, c, d)?)
}
