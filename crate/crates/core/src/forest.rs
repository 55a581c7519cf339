//! Weighted forests and their exact determinant theory.
//!
//! A weighted forest is an acyclic graph with an arbitrary-precision integer
//! weight on every vertex. To a forest `Γ` we attach the matrix `Q(Γ)` with
//! `-a_v` on the diagonal and `-1` for every edge; `d(Γ)` is its determinant.
//! All arithmetic here is exact.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque vertex identifier, stable for the lifetime of a session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Normalized unordered pair of vertex ids.
pub fn edge_key(p: VertexId, q: VertexId) -> (VertexId, VertexId) {
    if p <= q {
        (p, q)
    } else {
        (q, p)
    }
}

/// An acyclic graph with integer vertex weights. Immutable in spirit: the
/// removal operations return new values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedForest {
    vertices: BTreeMap<VertexId, BigInt>,
    edges: BTreeSet<(VertexId, VertexId)>,
}

impl WeightedForest {
    pub fn new() -> Self {
        WeightedForest {
            vertices: BTreeMap::new(),
            edges: BTreeSet::new(),
        }
    }

    /// Builds a forest from explicit vertex and edge lists.
    /// Panics if an edge references a missing vertex, repeats, or closes a cycle.
    pub fn from_parts(
        vertices: impl IntoIterator<Item = (VertexId, BigInt)>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Self {
        let mut f = WeightedForest::new();
        for (v, w) in vertices {
            f.add_vertex(v, w);
        }
        for (p, q) in edges {
            f.add_edge(p, q);
        }
        f
    }

    pub fn add_vertex(&mut self, v: VertexId, weight: BigInt) {
        assert!(
            self.vertices.insert(v, weight).is_none(),
            "duplicate vertex {v}"
        );
    }

    pub fn add_edge(&mut self, p: VertexId, q: VertexId) {
        assert!(p != q, "self-loop at {p}");
        assert!(self.vertices.contains_key(&p), "unknown endpoint {p}");
        assert!(self.vertices.contains_key(&q), "unknown endpoint {q}");
        assert!(
            !self.connected(p, q),
            "edge ({p},{q}) would close a cycle or duplicate an edge"
        );
        self.edges.insert(edge_key(p, q));
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn weight(&self, v: VertexId) -> Option<&BigInt> {
        self.vertices.get(&v)
    }

    pub fn set_weight(&mut self, v: VertexId, w: BigInt) {
        assert!(self.vertices.contains_key(&v), "unknown vertex {v}");
        self.vertices.insert(v, w);
    }

    pub fn has_edge(&self, p: VertexId, q: VertexId) -> bool {
        self.edges.contains(&edge_key(p, q))
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, &BigInt)> + '_ {
        self.vertices.iter().map(|(v, w)| (*v, w))
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.keys().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.neighbors(v).count()
    }

    fn connected(&self, p: VertexId, q: VertexId) -> bool {
        let adj = self.adjacency();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(p);
        queue.push_back(p);
        while let Some(v) = queue.pop_front() {
            if v == q {
                return true;
            }
            for &n in adj.get(&v).map(|v| v.as_slice()).unwrap_or(&[]) {
                if seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        false
    }

    fn adjacency(&self) -> BTreeMap<VertexId, Vec<VertexId>> {
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> =
            self.vertices.keys().map(|&v| (v, Vec::new())).collect();
        for &(a, b) in &self.edges {
            adj.get_mut(&a).unwrap().push(b);
            adj.get_mut(&b).unwrap().push(a);
        }
        adj
    }

    /// Returns `Γ_S`: this forest with every vertex of `subset` (and all
    /// incident edges) removed.
    pub fn remove_vertices(&self, subset: &BTreeSet<VertexId>) -> Result<WeightedForest> {
        for v in subset {
            if !self.vertices.contains_key(v) {
                return Err(Error::UnknownVertex(*v));
            }
        }
        let vertices = self
            .vertices
            .iter()
            .filter(|(v, _)| !subset.contains(v))
            .map(|(v, w)| (*v, w.clone()))
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| !subset.contains(a) && !subset.contains(b))
            .copied()
            .collect();
        Ok(WeightedForest { vertices, edges })
    }

    /// Convenience for removing a single vertex (`Γ_P`).
    pub fn remove_vertex(&self, v: VertexId) -> Result<WeightedForest> {
        self.remove_vertices(&BTreeSet::from([v]))
    }

    /// Returns `Γ_PQ`: this forest with the edge `(p,q)` removed. Vertices and
    /// weights are unchanged.
    pub fn remove_edge(&self, p: VertexId, q: VertexId) -> Result<WeightedForest> {
        if !self.has_edge(p, q) {
            return Err(Error::NotAnEdge(p, q));
        }
        let mut out = self.clone();
        out.edges.remove(&edge_key(p, q));
        Ok(out)
    }

    /// Labels each vertex with the index of its connected component.
    pub fn component_labels(&self) -> BTreeMap<VertexId, usize> {
        let adj = self.adjacency();
        let mut labels = BTreeMap::new();
        let mut next = 0usize;
        for &v in self.vertices.keys() {
            if labels.contains_key(&v) {
                continue;
            }
            let mut queue = VecDeque::from([v]);
            labels.insert(v, next);
            while let Some(u) = queue.pop_front() {
                for &n in &adj[&u] {
                    if let std::collections::btree_map::Entry::Vacant(e) = labels.entry(n) {
                        e.insert(next);
                        queue.push_back(n);
                    }
                }
            }
            next += 1;
        }
        labels
    }

    pub fn gram_matrix(&self) -> GramMatrix {
        let order: Vec<VertexId> = self.vertices.keys().copied().collect();
        let n = order.len();
        let mut entries = vec![vec![BigInt::zero(); n]; n];
        for (i, v) in order.iter().enumerate() {
            entries[i][i] = -self.vertices[v].clone();
        }
        for &(a, b) in &self.edges {
            let i = order.binary_search(&a).unwrap();
            let j = order.binary_search(&b).unwrap();
            entries[i][j] = -BigInt::one();
            entries[j][i] = -BigInt::one();
        }
        GramMatrix { order, entries }
    }
}

impl Default for WeightedForest {
    fn default() -> Self {
        Self::new()
    }
}

/// The matrix `Q(Γ)` under an explicit vertex ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramMatrix {
    pub order: Vec<VertexId>,
    pub entries: Vec<Vec<BigInt>>,
}

/// Exact inertia of `Q(Γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub n_positive: usize,
    pub n_zero: usize,
    pub n_negative: usize,
}

/// Determinant of `Q(Γ)` by the disjoint-edge-subset (matchings) expansion:
/// `d(Γ) = Σ_S (-1)^|S| Π_{v ∉ Supp(S)} (-a_v)`.
///
/// Exponential-time oracle; intended for small forests (≤ ~16 vertices).
pub fn det_matchings(forest: &WeightedForest) -> BigInt {
    let edges: Vec<(VertexId, VertexId)> = forest.edges().collect();
    let mut used: BTreeSet<VertexId> = BTreeSet::new();
    fn go(
        forest: &WeightedForest,
        edges: &[(VertexId, VertexId)],
        idx: usize,
        used: &mut BTreeSet<VertexId>,
        sign: bool,
    ) -> BigInt {
        if idx == edges.len() {
            let mut prod = BigInt::one();
            for (v, w) in forest.vertices() {
                if !used.contains(&v) {
                    prod *= -w.clone();
                }
            }
            return if sign { -prod } else { prod };
        }
        // skip this edge
        let mut total = go(forest, edges, idx + 1, used, sign);
        let (a, b) = edges[idx];
        if !used.contains(&a) && !used.contains(&b) {
            used.insert(a);
            used.insert(b);
            total += go(forest, edges, idx + 1, used, !sign);
            used.remove(&a);
            used.remove(&b);
        }
        total
    }
    go(forest, &edges, 0, &mut used, false)
}

/// Determinant of `Q(Γ)` by the vertex-expansion recursion on each tree
/// component. Division-free, exact, linear number of big-integer products.
///
/// For a subtree rooted at `v` with children `c_i`:
/// `f(v) = -a_v · Π f(c_i) - Σ_i g(c_i) · Π_{j≠i} f(c_j)` and
/// `g(v) = Π f(c_i)`, where `f` is the subtree determinant and `g` the
/// determinant with the subtree root removed.
pub fn det_fast(forest: &WeightedForest) -> BigInt {
    let adj = forest.adjacency();
    let mut visited: BTreeSet<VertexId> = BTreeSet::new();
    let mut total = BigInt::one();
    for root in forest.vertex_ids() {
        if !visited.insert(root) {
            continue;
        }
        let (f, _) = subtree_dets(forest, &adj, root, None, &mut visited);
        total *= f;
    }
    total
}

fn subtree_dets(
    forest: &WeightedForest,
    adj: &BTreeMap<VertexId, Vec<VertexId>>,
    v: VertexId,
    parent: Option<VertexId>,
    visited: &mut BTreeSet<VertexId>,
) -> (BigInt, BigInt) {
    let mut child_f = Vec::new();
    let mut child_g = Vec::new();
    for &c in &adj[&v] {
        if Some(c) == parent {
            continue;
        }
        visited.insert(c);
        let (f, g) = subtree_dets(forest, adj, c, Some(v), visited);
        child_f.push(f);
        child_g.push(g);
    }
    let k = child_f.len();
    // prefix/suffix products of the child f-values
    let mut prefix = vec![BigInt::one(); k + 1];
    for i in 0..k {
        prefix[i + 1] = &prefix[i] * &child_f[i];
    }
    let mut suffix = vec![BigInt::one(); k + 1];
    for i in (0..k).rev() {
        suffix[i] = &suffix[i + 1] * &child_f[i];
    }
    let g = prefix[k].clone();
    let mut f = -forest.weight(v).unwrap().clone() * &g;
    for i in 0..k {
        f -= &child_g[i] * &prefix[i] * &suffix[i + 1];
    }
    (f, g)
}

/// Exact inertia of `Q(Γ)` by symmetric leaf elimination over rationals.
///
/// A leaf with nonzero pivot is eliminated against its neighbor; a leaf with a
/// zero pivot together with its neighbor forms a hyperbolic pair (one positive,
/// one negative eigenvalue) whose congruence elimination leaves the rest of the
/// graph untouched.
pub fn signature(forest: &WeightedForest) -> Signature {
    let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> = forest
        .vertex_ids()
        .map(|v| (v, forest.neighbors(v).collect()))
        .collect();
    let mut diag: BTreeMap<VertexId, BigRational> = forest
        .vertices()
        .map(|(v, w)| (v, BigRational::from_integer(-w.clone())))
        .collect();
    let mut sig = Signature {
        n_positive: 0,
        n_zero: 0,
        n_negative: 0,
    };
    while let Some((&v, _)) = adj.iter().find(|(_, ns)| ns.len() <= 1) {
        let ns = adj.remove(&v).unwrap();
        let q = diag.remove(&v).unwrap();
        match ns.iter().next() {
            None => {
                if q.is_zero() {
                    sig.n_zero += 1;
                } else if q.is_positive() {
                    sig.n_positive += 1;
                } else {
                    sig.n_negative += 1;
                }
            }
            Some(&u) => {
                adj.get_mut(&u).unwrap().remove(&v);
                if q.is_zero() {
                    // hyperbolic pair: drop both v and u
                    sig.n_positive += 1;
                    sig.n_negative += 1;
                    let uns = adj.remove(&u).unwrap();
                    diag.remove(&u);
                    for w in uns {
                        adj.get_mut(&w).unwrap().remove(&u);
                    }
                } else {
                    if q.is_positive() {
                        sig.n_positive += 1;
                    } else {
                        sig.n_negative += 1;
                    }
                    let du = diag.get_mut(&u).unwrap();
                    *du -= q.recip();
                }
            }
        }
    }
    debug_assert!(adj.is_empty());
    sig
}
