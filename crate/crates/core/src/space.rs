//! Finite T0 spaces represented as finite posets.
//!
//! A finite T0 topology and a partial order on the same finite set determine
//! each other: closed sets are the down sets, open sets are the up sets. Every
//! query in this module is phrased in terms of the order, which is stored
//! twice: once as the Hasse (cover) digraph and once as per-cell reflexive
//! down-sets and up-sets kept as bitsets.
//!
//! Cells are kept in a canonical order (ascending dimension, a missing
//! dimension counting as 0, then by name). Every iteration, report and matrix
//! built on top of a space follows that order.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use fixedbitset::FixedBitSet;
use thiserror::Error;

static NEXT_UNIVERSE: AtomicU64 = AtomicU64::new(1);

fn fresh_universe() -> u64 {
    NEXT_UNIVERSE.fetch_add(1, Ordering::Relaxed)
}

/// Dense handle of a cell: its position in the canonical ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId(pub(crate) usize);

impl CellId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub name: String,
    pub dim: Option<usize>,
    /// Sorted vertex names when the space is the face poset of a simplicial complex.
    pub vertices: Option<Vec<String>>,
}

impl Cell {
    fn sort_key(&self) -> (usize, &str) {
        (self.dim.unwrap_or(0), self.name.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("duplicate cell name `{0}`")]
    DuplicateName(String),
    #[error("unknown cell name `{0}`")]
    UnknownName(String),
    #[error("order relation contains a cycle: {}", .0.join(" < "))]
    CycleDetected(Vec<String>),
    #[error("simplex with an empty vertex list")]
    EmptyVertexList,
}

/// A subset of the cells of one space.
///
/// Sets remember the cell universe they were created in. A space and its
/// opposite share a universe; subspaces get a fresh one. Combining sets from
/// different universes is a programming error and panics.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CellSet {
    universe: u64,
    bits: FixedBitSet,
}

impl CellSet {
    fn new(universe: u64, len: usize) -> Self {
        CellSet { universe, bits: FixedBitSet::with_capacity(len) }
    }

    fn check(&self, other: &CellSet) {
        assert_eq!(self.universe, other.universe, "cell sets belong to different spaces");
    }

    pub fn contains(&self, id: CellId) -> bool {
        self.bits.contains(id.0)
    }

    pub fn insert(&mut self, id: CellId) -> bool {
        let present = self.bits.contains(id.0);
        self.bits.insert(id.0);
        !present
    }

    pub fn remove(&mut self, id: CellId) {
        self.bits.set(id.0, false);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    /// Members in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = CellId> + '_ {
        self.bits.ones().map(CellId)
    }

    pub fn first(&self) -> Option<CellId> {
        self.bits.ones().next().map(CellId)
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        self.check(other);
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        out
    }

    pub fn union_with(&mut self, other: &CellSet) {
        self.check(other);
        self.bits.union_with(&other.bits);
    }

    pub fn intersection(&self, other: &CellSet) -> CellSet {
        self.check(other);
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        out
    }

    pub fn difference(&self, other: &CellSet) -> CellSet {
        self.check(other);
        let mut out = self.clone();
        out.bits.difference_with(&other.bits);
        out
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.check(other);
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &CellSet) -> bool {
        self.check(other);
        self.bits.is_disjoint(&other.bits)
    }

    pub fn same_universe(&self, other: &CellSet) -> bool {
        self.universe == other.universe
    }
}

impl fmt::Debug for CellSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.bits.ones()).finish()
    }
}

/// Immutable finite T0 space.
#[derive(Clone)]
pub struct FiniteSpace {
    universe: u64,
    cells: Vec<Cell>,
    by_name: HashMap<String, usize>,
    lower_covers: Vec<Vec<usize>>,
    upper_covers: Vec<Vec<usize>>,
    down: Vec<FixedBitSet>,
    up: Vec<FixedBitSet>,
}

impl PartialEq for FiniteSpace {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells && self.down == other.down
    }
}

impl Eq for FiniteSpace {}

impl fmt::Debug for FiniteSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteSpace")
            .field("cells", &self.cells.iter().map(|c| &c.name).collect::<Vec<_>>())
            .field("covers", &self.cover_pairs_named())
            .finish()
    }
}

impl FiniteSpace {
    /// Builds a space from cell names and pairs `(lower, upper)`.
    ///
    /// The pairs need not be covers; the order is their reflexive-transitive
    /// closure and the Hasse diagram is recomputed from it.
    pub fn from_cover_relations<N, L, U>(names: &[N], covers: &[(L, U)]) -> Result<Self, SpaceError>
    where
        N: AsRef<str>,
        L: AsRef<str>,
        U: AsRef<str>,
    {
        let cells = names.iter().map(|n| Cell { name: n.as_ref().to_string(), dim: None, vertices: None }).collect();
        Self::from_named_relations(cells, covers)
    }

    /// Like [`FiniteSpace::from_cover_relations`] but with explicit cell records.
    pub fn from_named_relations<L, U>(cells: Vec<Cell>, covers: &[(L, U)]) -> Result<Self, SpaceError>
    where
        L: AsRef<str>,
        U: AsRef<str>,
    {
        let mut index = HashMap::with_capacity(cells.len());
        for (i, c) in cells.iter().enumerate() {
            if index.insert(c.name.clone(), i).is_some() {
                return Err(SpaceError::DuplicateName(c.name.clone()));
            }
        }
        let lookup = |name: &str| index.get(name).copied().ok_or_else(|| SpaceError::UnknownName(name.to_string()));
        let mut relations = Vec::with_capacity(covers.len());
        for (lo, hi) in covers {
            relations.push((lookup(lo.as_ref())?, lookup(hi.as_ref())?));
        }
        Self::build(cells, &relations)
    }

    /// Face poset of the simplicial complex generated by `simplices`.
    ///
    /// Every nonempty face of every listed simplex becomes a cell named by the
    /// concatenation of its sorted vertex names.
    pub fn from_simplicial_complex<S: AsRef<str>>(simplices: &[Vec<S>]) -> Result<Self, SpaceError> {
        let mut faces: BTreeSet<Vec<String>> = BTreeSet::new();
        for simplex in simplices {
            let mut verts: Vec<String> = simplex.iter().map(|v| v.as_ref().to_string()).collect();
            if verts.is_empty() {
                return Err(SpaceError::EmptyVertexList);
            }
            verts.sort();
            verts.dedup();
            if faces.contains(&verts) {
                continue;
            }
            let n = verts.len();
            // all nonempty subsets; simplices here are small
            for mask in 1u64..(1u64 << n) {
                let face: Vec<String> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| verts[i].clone()).collect();
                faces.insert(face);
            }
        }
        let faces: Vec<Vec<String>> = faces.into_iter().collect();
        let cells: Vec<Cell> = faces
            .iter()
            .map(|f| Cell { name: f.concat(), dim: Some(f.len() - 1), vertices: Some(f.clone()) })
            .collect();
        let position: HashMap<&[String], usize> = faces.iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect();
        let mut relations = Vec::new();
        for (i, f) in faces.iter().enumerate() {
            if f.len() < 2 {
                continue;
            }
            for skip in 0..f.len() {
                let facet: Vec<String> =
                    f.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, v)| v.clone()).collect();
                relations.push((position[facet.as_slice()], i));
            }
        }
        let mut seen = HashMap::new();
        for c in &cells {
            if seen.insert(c.name.as_str(), ()).is_some() {
                return Err(SpaceError::DuplicateName(c.name.clone()));
            }
        }
        Self::build(cells, &relations)
    }

    /// Core constructor; `relations` index into `cells` as given.
    fn build(cells: Vec<Cell>, relations: &[(usize, usize)]) -> Result<Self, SpaceError> {
        let n = cells.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| cells[a].sort_key().cmp(&cells[b].sort_key()));
        let mut new_of = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            new_of[old] = new;
        }
        let cells: Vec<Cell> = order.iter().map(|&old| cells[old].clone()).collect();

        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(lo, hi) in relations {
            let (lo, hi) = (new_of[lo], new_of[hi]);
            if lo == hi {
                continue;
            }
            preds[hi].push(lo);
            succs[lo].push(hi);
        }

        let topo = topological_order(&preds, &succs)
            .map_err(|cycle| SpaceError::CycleDetected(cycle.iter().map(|&i| cells[i].name.clone()).collect()))?;

        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for &v in &topo {
            let mut set = FixedBitSet::with_capacity(n);
            set.insert(v);
            for &u in &preds[v] {
                set.union_with(&down[u]);
            }
            down[v] = set;
        }
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (v, d) in down.iter().enumerate() {
            for u in d.ones() {
                up[u].insert(v);
            }
        }

        let mut lower_covers = vec![Vec::new(); n];
        let mut upper_covers = vec![Vec::new(); n];
        for v in 0..n {
            let mut strict = down[v].clone();
            strict.set(v, false);
            let mut covered = FixedBitSet::with_capacity(n);
            for d in strict.ones() {
                let mut below_d = down[d].clone();
                below_d.set(d, false);
                covered.union_with(&below_d);
            }
            for c in strict.ones() {
                if !covered.contains(c) {
                    lower_covers[v].push(c);
                    upper_covers[c].push(v);
                }
            }
        }

        let by_name = cells.iter().enumerate().map(|(i, c)| (c.name.clone(), i)).collect();
        Ok(FiniteSpace { universe: fresh_universe(), cells, by_name, lower_covers, upper_covers, down, up })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, id: CellId) -> &Cell {
        &self.cells[id.0]
    }

    pub fn name(&self, id: CellId) -> &str {
        &self.cells[id.0].name
    }

    pub fn ids(&self) -> impl Iterator<Item = CellId> {
        (0..self.cells.len()).map(CellId)
    }

    pub fn id(&self, name: &str) -> Option<CellId> {
        self.by_name.get(name).copied().map(CellId)
    }

    pub fn lookup(&self, name: &str) -> Result<CellId, SpaceError> {
        self.id(name).ok_or_else(|| SpaceError::UnknownName(name.to_string()))
    }

    /// Highest recorded cell dimension, if any cell carries one.
    pub fn max_dim(&self) -> Option<usize> {
        self.cells.iter().filter_map(|c| c.dim).max()
    }

    pub fn is_simplicial(&self) -> bool {
        !self.cells.is_empty() && self.cells.iter().all(|c| c.vertices.is_some())
    }

    pub fn empty_set(&self) -> CellSet {
        CellSet::new(self.universe, self.len())
    }

    pub fn full_set(&self) -> CellSet {
        let mut s = self.empty_set();
        s.bits.insert_range(..);
        s
    }

    pub fn singleton(&self, id: CellId) -> CellSet {
        let mut s = self.empty_set();
        s.insert(id);
        s
    }

    pub fn set_of<I: IntoIterator<Item = CellId>>(&self, ids: I) -> CellSet {
        let mut s = self.empty_set();
        for id in ids {
            s.insert(id);
        }
        s
    }

    pub fn set_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<CellSet, SpaceError> {
        let mut s = self.empty_set();
        for n in names {
            s.insert(self.lookup(n.as_ref())?);
        }
        Ok(s)
    }

    pub fn names(&self, set: &CellSet) -> Vec<String> {
        self.check(set);
        set.iter().map(|id| self.name(id).to_string()).collect()
    }

    /// True when `set` was created in this space (or its opposite).
    pub fn owns(&self, set: &CellSet) -> bool {
        set.universe == self.universe
    }

    fn check(&self, set: &CellSet) {
        assert_eq!(set.universe, self.universe, "cell set belongs to a different space");
    }

    pub fn leq(&self, a: CellId, b: CellId) -> bool {
        self.down[b.0].contains(a.0)
    }

    pub fn lt(&self, a: CellId, b: CellId) -> bool {
        a != b && self.leq(a, b)
    }

    /// Reflexive down-set of one cell.
    pub fn down_set(&self, id: CellId) -> CellSet {
        CellSet { universe: self.universe, bits: self.down[id.0].clone() }
    }

    /// Reflexive up-set of one cell.
    pub fn up_set(&self, id: CellId) -> CellSet {
        CellSet { universe: self.universe, bits: self.up[id.0].clone() }
    }

    pub(crate) fn up_bits(&self, id: CellId) -> &FixedBitSet {
        &self.up[id.0]
    }

    pub fn lower_covers(&self, id: CellId) -> impl Iterator<Item = CellId> + '_ {
        self.lower_covers[id.0].iter().map(|&i| CellId(i))
    }

    pub fn upper_covers(&self, id: CellId) -> impl Iterator<Item = CellId> + '_ {
        self.upper_covers[id.0].iter().map(|&i| CellId(i))
    }

    /// Hasse diagram as `(lower, upper)` pairs in canonical order.
    pub fn cover_pairs(&self) -> Vec<(CellId, CellId)> {
        let mut out = Vec::new();
        for hi in 0..self.len() {
            for &lo in &self.lower_covers[hi] {
                out.push((CellId(lo), CellId(hi)));
            }
        }
        out.sort();
        out
    }

    fn cover_pairs_named(&self) -> Vec<(String, String)> {
        self.cover_pairs().into_iter().map(|(a, b)| (self.name(a).to_string(), self.name(b).to_string())).collect()
    }

    /// Down-closure: `cl S = { x | x <= a for some a in S }`.
    pub fn closure(&self, set: &CellSet) -> CellSet {
        self.check(set);
        let mut out = self.empty_set();
        for a in set.bits.ones() {
            out.bits.union_with(&self.down[a]);
        }
        out
    }

    /// Up-closure, the smallest open set containing `set`.
    pub fn open_hull(&self, set: &CellSet) -> CellSet {
        self.check(set);
        let mut out = self.empty_set();
        for a in set.bits.ones() {
            out.bits.union_with(&self.up[a]);
        }
        out
    }

    pub fn mouth(&self, set: &CellSet) -> CellSet {
        self.closure(set).difference(set)
    }

    /// Largest open subset of `set`.
    pub fn interior(&self, set: &CellSet) -> CellSet {
        self.check(set);
        let mut out = self.empty_set();
        for a in set.bits.ones() {
            if self.up[a].is_subset(&set.bits) {
                out.bits.insert(a);
            }
        }
        out
    }

    pub fn is_closed(&self, set: &CellSet) -> bool {
        self.check(set);
        set.bits.ones().all(|a| self.down[a].is_subset(&set.bits))
    }

    pub fn is_open(&self, set: &CellSet) -> bool {
        self.check(set);
        set.bits.ones().all(|a| self.up[a].is_subset(&set.bits))
    }

    /// Local closedness, tested as order-convexity: `cl S ∩ opn S = S`.
    pub fn is_locally_closed(&self, set: &CellSet) -> bool {
        self.closure(set).intersection(&self.open_hull(set)) == *set
    }

    /// A triple `x < y < z` with `x, z` in `set` and `y` outside, if one exists.
    pub fn convexity_witness(&self, set: &CellSet) -> Option<(CellId, CellId, CellId)> {
        let gap = self.closure(set).intersection(&self.open_hull(set)).difference(set);
        let y = gap.first()?;
        let x = set.iter().find(|&x| self.leq(x, y))?;
        let z = set.iter().find(|&z| self.leq(y, z))?;
        Some((x, y, z))
    }

    /// Same cells with the order reversed; closed and open sets trade places.
    pub fn opposite(&self) -> FiniteSpace {
        FiniteSpace {
            universe: self.universe,
            cells: self.cells.clone(),
            by_name: self.by_name.clone(),
            lower_covers: self.upper_covers.clone(),
            upper_covers: self.lower_covers.clone(),
            down: self.up.clone(),
            up: self.down.clone(),
        }
    }

    /// Subspace on `set` with the induced order, plus the map from new cell
    /// ids to ids in `self`.
    pub fn subspace(&self, set: &CellSet) -> (FiniteSpace, Vec<CellId>) {
        self.check(set);
        let members: Vec<usize> = set.bits.ones().collect();
        let cells: Vec<Cell> = members.iter().map(|&i| self.cells[i].clone()).collect();
        let mut relations = Vec::new();
        for (ni, &i) in members.iter().enumerate() {
            for (nj, &j) in members.iter().enumerate() {
                if i != j && self.down[j].contains(i) {
                    relations.push((ni, nj));
                }
            }
        }
        let sub = Self::build(cells, &relations).expect("induced order of a poset is a poset");
        // canonical order of a subset is preserved, so new index k maps to members[k]
        let map = members.into_iter().map(CellId).collect();
        (sub, map)
    }
}

/// Kahn's algorithm; on failure returns one cycle listed from lower to upper.
fn topological_order(preds: &[Vec<usize>], succs: &[Vec<usize>]) -> Result<Vec<usize>, Vec<usize>> {
    let n = preds.len();
    let mut indeg: Vec<usize> = preds.iter().map(Vec::len).collect();
    let mut stack: Vec<usize> = (0..n).rev().filter(|&v| indeg[v] == 0).collect();
    let mut out = Vec::with_capacity(n);
    while let Some(v) = stack.pop() {
        out.push(v);
        for &w in &succs[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                stack.push(w);
            }
        }
    }
    if out.len() == n {
        return Ok(out);
    }
    // every leftover vertex has a leftover predecessor; walk back until a repeat
    let start = (0..n).find(|&v| indeg[v] > 0).expect("leftover vertex");
    let mut walk = vec![start];
    let mut pos = HashMap::new();
    pos.insert(start, 0usize);
    let mut v = start;
    loop {
        let p = *preds[v].iter().find(|&&p| indeg[p] > 0).expect("leftover predecessor");
        if let Some(&at) = pos.get(&p) {
            let mut cycle: Vec<usize> = walk[at..].to_vec();
            cycle.reverse();
            cycle.push(cycle[0]);
            return Err(cycle);
        }
        pos.insert(p, walk.len());
        walk.push(p);
        v = p;
    }
}

/// A finite poset on the indices `0..n`, used for index sets of Morse
/// decompositions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexPoset {
    below: Vec<FixedBitSet>,
}

impl IndexPoset {
    /// `leq(p, q)` must be a partial order; reflexivity is added.
    pub fn from_fn(n: usize, leq: impl Fn(usize, usize) -> bool) -> Self {
        let below = (0..n)
            .map(|q| {
                let mut set = FixedBitSet::with_capacity(n);
                for p in 0..n {
                    if p == q || leq(p, q) {
                        set.insert(p);
                    }
                }
                set
            })
            .collect();
        IndexPoset { below }
    }

    pub fn len(&self) -> usize {
        self.below.len()
    }

    pub fn is_empty(&self) -> bool {
        self.below.is_empty()
    }

    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.below[q].contains(p)
    }

    pub fn lt(&self, p: usize, q: usize) -> bool {
        p != q && self.leq(p, q)
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|p| (p + 1..n).all(|q| !(self.leq(p, q) && self.leq(q, p))))
    }

    pub fn is_down_set(&self, set: &BTreeSet<usize>) -> bool {
        set.iter().all(|&q| self.below[q].ones().all(|p| set.contains(&p)))
    }

    pub fn is_convex(&self, set: &BTreeSet<usize>) -> bool {
        let (down, _) = self.down_sets(set);
        let n = self.len();
        down.iter().all(|&r| set.contains(&r) || !(0..n).any(|q| set.contains(&q) && self.leq(q, r)))
    }

    /// `(I≤, I<)`: the down-closure of `set` and its part outside `set`.
    pub fn down_sets(&self, set: &BTreeSet<usize>) -> (BTreeSet<usize>, BTreeSet<usize>) {
        let mut down = BTreeSet::new();
        for &q in set {
            down.extend(self.below[q].ones());
        }
        let strict = down.difference(set).copied().collect();
        (down, strict)
    }

    /// Cover pairs `(lower, upper)`, i.e. the transitive reduction.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for q in 0..n {
            for p in self.below[q].ones() {
                if p == q {
                    continue;
                }
                let between = (0..n).any(|r| r != p && r != q && self.lt(p, r) && self.lt(r, q));
                if !between {
                    out.push((p, q));
                }
            }
        }
        out
    }
}

/// `(I≤, I<)` for an index set `I` of a finite poset.
pub fn down_set_of_indices(poset: &IndexPoset, set: &BTreeSet<usize>) -> (BTreeSet<usize>, BTreeSet<usize>) {
    poset.down_sets(set)
}
