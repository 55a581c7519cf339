//! Rooted blow-up histories with incrementally maintained label systems.
//!
//! A [`BlowupState`] starts from the projective-plane seed (a single curve of
//! self-intersection 1) and evolves by the two elementary moves: blowing up a
//! point on a curve (vertex blow-up) or a point of intersection of two curves
//! (edge blow-up). Four label systems ride along: self-intersection weights,
//! the augmented-canonical-class labels `b`, the determinant labels `d_P` /
//! `d_PQ` (frozen at creation), and the pullback multiplicities `u`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::{det_fast, edge_key, VertexId, WeightedForest};
use crate::linalg::solve_exact;

/// One atomic blow-up step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum BlowupOp {
    Vertex { target: VertexId },
    Edge { p: VertexId, q: VertexId },
}

/// Applied history entry. Edge entries carry the destroyed edge's frozen
/// label so the step can be undone exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum HistoryEntry {
    Vertex {
        target: VertexId,
    },
    Edge {
        p: VertexId,
        q: VertexId,
        #[serde(with = "crate::serde_support::bigint_dec")]
        retired_label: BigInt,
    },
}

impl HistoryEntry {
    pub fn op(&self) -> BlowupOp {
        match self {
            HistoryEntry::Vertex { target } => BlowupOp::Vertex { target: *target },
            HistoryEntry::Edge { p, q, .. } => BlowupOp::Edge { p: *p, q: *q },
        }
    }
}

/// Per-vertex labels beyond the weight (which lives in the forest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexLabels {
    /// Coefficient in the augmented canonical class.
    pub kbar: BigInt,
    /// Determinant of the forest with this vertex removed, frozen at creation.
    pub det_label: BigInt,
    /// Multiplicity in the total transform of the line at infinity.
    pub mult: BigInt,
    pub creation_index: u32,
    /// Empty for the root, one id for a vertex blow-up, two for an edge blow-up.
    pub parents: Vec<VertexId>,
}

/// Immutable rooted blow-up state; every operation returns a new value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupState {
    forest: WeightedForest,
    root: VertexId,
    labels: BTreeMap<VertexId, VertexLabels>,
    edge_labels: BTreeMap<(VertexId, VertexId), BigInt>,
    history: Vec<HistoryEntry>,
    total_det: BigInt,
}

/// Snapshot of every label of a state, for display and serialization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelReport {
    pub root: VertexId,
    pub vertices: Vec<VertexRow>,
    pub edges: Vec<EdgeRow>,
    pub total_det: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexRow {
    pub id: VertexId,
    pub weight: BigInt,
    pub kbar: BigInt,
    pub det_label: BigInt,
    pub mult: BigInt,
    /// `2·d_P + d'_P`; absent for the root.
    pub l: Option<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRow {
    pub p: VertexId,
    pub q: VertexId,
    pub det_label: BigInt,
}

/// The single-vertex state of the projective plane: weight 1, `b = -2`,
/// `d_P = 1`, `u = 1`, total determinant -1.
pub fn seed_p2() -> BlowupState {
    let root = VertexId(0);
    let mut forest = WeightedForest::new();
    forest.add_vertex(root, BigInt::one());
    let labels = BTreeMap::from([(
        root,
        VertexLabels {
            kbar: BigInt::from(-2),
            det_label: BigInt::one(),
            mult: BigInt::one(),
            creation_index: 0,
            parents: Vec::new(),
        },
    )]);
    BlowupState {
        forest,
        root,
        labels,
        edge_labels: BTreeMap::new(),
        history: Vec::new(),
        total_det: BigInt::from(-1),
    }
}

impl BlowupState {
    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn forest(&self) -> &WeightedForest {
        &self.forest
    }

    pub fn labels(&self, v: VertexId) -> Option<&VertexLabels> {
        self.labels.get(&v)
    }

    pub fn kbar(&self, v: VertexId) -> Option<&BigInt> {
        self.labels.get(&v).map(|l| &l.kbar)
    }

    pub fn det_label(&self, v: VertexId) -> Option<&BigInt> {
        self.labels.get(&v).map(|l| &l.det_label)
    }

    pub fn mult(&self, v: VertexId) -> Option<&BigInt> {
        self.labels.get(&v).map(|l| &l.mult)
    }

    pub fn edge_label(&self, p: VertexId, q: VertexId) -> Option<&BigInt> {
        self.edge_labels.get(&edge_key(p, q))
    }

    pub fn edge_labels(&self) -> impl Iterator<Item = (VertexId, VertexId, &BigInt)> + '_ {
        self.edge_labels.iter().map(|(&(p, q), d)| (p, q, d))
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    pub fn total_det(&self) -> &BigInt {
        &self.total_det
    }

    pub fn depth(&self) -> usize {
        self.history.len()
    }

    pub fn ops(&self) -> Vec<BlowupOp> {
        self.history.iter().map(|e| e.op()).collect()
    }

    fn next_id(&self) -> VertexId {
        VertexId(self.forest.len() as u32)
    }

    fn require_vertex(&self, v: VertexId) -> Result<()> {
        if self.labels.contains_key(&v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    /// Blows up a point on the curve `p`.
    pub fn blow_up_vertex(&self, p: VertexId) -> Result<BlowupState> {
        self.require_vertex(p)?;
        let mut next = self.clone();
        let r = self.next_id();
        let d = &self.total_det;
        let dp = self.det_label(p).unwrap().clone();

        next.forest.add_vertex(r, BigInt::from(-1));
        let wp = next.forest.weight(p).unwrap() - BigInt::one();
        next.forest.set_weight(p, wp);
        next.forest.add_edge(p, r);

        let new_label = &dp + d;
        next.labels.insert(
            r,
            VertexLabels {
                kbar: self.kbar(p).unwrap() + BigInt::one(),
                det_label: new_label.clone(),
                mult: self.mult(p).unwrap().clone(),
                creation_index: r.0,
                parents: vec![p],
            },
        );
        next.edge_labels.insert(edge_key(p, r), new_label);
        next.history.push(HistoryEntry::Vertex { target: p });
        Ok(next)
    }

    /// Blows up the point of intersection of `p` and `q`.
    pub fn blow_up_edge(&self, p: VertexId, q: VertexId) -> Result<BlowupState> {
        let key = edge_key(p, q);
        if !self.edge_labels.contains_key(&key) {
            return Err(Error::NotAnEdge(p, q));
        }
        let mut next = self.clone();
        let r = self.next_id();
        let d = &self.total_det;
        let dp = self.det_label(p).unwrap().clone();
        let dq = self.det_label(q).unwrap().clone();
        let dpq = next.edge_labels.remove(&key).unwrap();

        next.forest = next.forest.remove_edge(p, q)?;
        next.forest.add_vertex(r, BigInt::from(-1));
        let wp = next.forest.weight(p).unwrap() - BigInt::one();
        next.forest.set_weight(p, wp);
        let wq = next.forest.weight(q).unwrap() - BigInt::one();
        next.forest.set_weight(q, wq);
        next.forest.add_edge(p, r);
        next.forest.add_edge(q, r);

        next.labels.insert(
            r,
            VertexLabels {
                kbar: self.kbar(p).unwrap() + self.kbar(q).unwrap(),
                det_label: BigInt::from(2) * &dpq + &dp + &dq - d,
                mult: self.mult(p).unwrap() + self.mult(q).unwrap(),
                creation_index: r.0,
                parents: {
                    let mut ps = vec![p, q];
                    ps.sort();
                    ps
                },
            },
        );
        next.edge_labels.insert(edge_key(p, r), &dp + &dpq);
        next.edge_labels.insert(edge_key(q, r), &dq + &dpq);
        next.history.push(HistoryEntry::Edge {
            p: key.0,
            q: key.1,
            retired_label: dpq,
        });
        Ok(next)
    }

    pub fn apply(&self, op: BlowupOp) -> Result<BlowupState> {
        match op {
            BlowupOp::Vertex { target } => self.blow_up_vertex(target),
            BlowupOp::Edge { p, q } => self.blow_up_edge(p, q),
        }
    }

    /// Replays an op sequence from the seed.
    pub fn replay(ops: &[BlowupOp]) -> Result<BlowupState> {
        let mut state = seed_p2();
        for &op in ops {
            state = state.apply(op)?;
        }
        Ok(state)
    }

    /// Undoes the most recent blow-up. Restores the previous state exactly,
    /// including the destroyed edge label after an edge blow-up.
    pub fn blow_down(&self) -> Result<BlowupState> {
        let entry = self
            .history
            .last()
            .ok_or_else(|| Error::CannotBlowDown("the seed has no history".into()))?
            .clone();
        let r = VertexId(self.forest.len() as u32 - 1);
        if self.forest.weight(r) != Some(&BigInt::from(-1)) {
            return Err(Error::CannotBlowDown(format!(
                "vertex {r} no longer has weight -1"
            )));
        }
        if !self.is_final(r)? {
            return Err(Error::CannotBlowDown(format!("vertex {r} is a parent")));
        }
        let mut prev = self.clone();
        prev.history.pop();
        prev.labels.remove(&r);
        match entry {
            HistoryEntry::Vertex { target } => {
                prev.edge_labels.remove(&edge_key(target, r));
                prev.forest = prev.forest.remove_vertex(r)?;
                let w = prev.forest.weight(target).unwrap() + BigInt::one();
                prev.forest.set_weight(target, w);
            }
            HistoryEntry::Edge {
                p,
                q,
                retired_label,
            } => {
                prev.edge_labels.remove(&edge_key(p, r));
                prev.edge_labels.remove(&edge_key(q, r));
                prev.forest = prev.forest.remove_vertex(r)?;
                let wp = prev.forest.weight(p).unwrap() + BigInt::one();
                prev.forest.set_weight(p, wp);
                let wq = prev.forest.weight(q).unwrap() + BigInt::one();
                prev.forest.set_weight(q, wq);
                prev.forest.add_edge(p, q);
                prev.edge_labels.insert(edge_key(p, q), retired_label);
            }
        }
        Ok(prev)
    }

    /// A curve is final iff it is not a parent of any curve.
    pub fn is_final(&self, p: VertexId) -> Result<bool> {
        self.require_vertex(p)?;
        Ok(!self.labels.values().any(|l| l.parents.contains(&p)))
    }

    /// The label-based finality criteria. `None` when neither applies
    /// (labels other than `b = 1` and `b >= 2`).
    pub fn final_by_labels(&self, p: VertexId) -> Result<Option<bool>> {
        self.require_vertex(p)?;
        let b = self.kbar(p).unwrap();
        let mut neighbor_labels: Vec<BigInt> = self
            .forest
            .neighbors(p)
            .map(|n| self.kbar(n).unwrap().clone())
            .collect();
        neighbor_labels.sort();
        if *b >= BigInt::from(2) {
            Ok(Some(neighbor_labels.iter().all(|nb| nb < b)))
        } else if *b == BigInt::one() {
            let zero = BigInt::zero();
            let one = BigInt::one();
            let ok = neighbor_labels == [zero.clone()] || neighbor_labels == [zero, one];
            Ok(Some(ok))
        } else {
            Ok(None)
        }
    }

    /// Transitive closure of parenthood. Empty exactly for the root.
    pub fn ancestors(&self, p: VertexId) -> Result<BTreeSet<VertexId>> {
        self.require_vertex(p)?;
        let mut out = BTreeSet::new();
        let mut stack: Vec<VertexId> = self.labels[&p].parents.clone();
        while let Some(v) = stack.pop() {
            if out.insert(v) {
                stack.extend(self.labels[&v].parents.iter().copied());
            }
        }
        Ok(out)
    }

    /// `d'_P`: determinant of the forest with both the root and `p` removed.
    pub fn d_prime(&self, p: VertexId) -> Result<BigInt> {
        self.require_vertex(p)?;
        let removed = self
            .forest
            .remove_vertices(&BTreeSet::from([self.root, p]))?;
        Ok(det_fast(&removed))
    }

    /// Snapshot of the maintained labels.
    pub fn report(&self) -> LabelReport {
        let vertices = self
            .labels
            .iter()
            .map(|(&id, l)| VertexRow {
                id,
                weight: self.forest.weight(id).unwrap().clone(),
                kbar: l.kbar.clone(),
                det_label: l.det_label.clone(),
                mult: l.mult.clone(),
                l: if id == self.root {
                    None
                } else {
                    Some(BigInt::from(2) * &l.det_label + self.d_prime(id).unwrap())
                },
            })
            .collect();
        let edges = self
            .edge_labels
            .iter()
            .map(|(&(p, q), d)| EdgeRow {
                p,
                q,
                det_label: d.clone(),
            })
            .collect();
        LabelReport {
            root: self.root,
            vertices,
            edges,
            total_det: self.total_det.clone(),
        }
    }

    /// Recomputes every label from the bare weighted forest: determinants by
    /// removal, `b` from the adjunction linear system and `u` from the
    /// pullback linear system, both solved exactly over the rationals.
    ///
    /// Panics if a solution is non-integral or the pullback normalization is
    /// off; that would mean the engine itself is broken.
    pub fn recompute_from_scratch(&self) -> LabelReport {
        let order: Vec<VertexId> = self.forest.vertex_ids().collect();
        let n = order.len();
        let index: BTreeMap<VertexId, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();

        // intersection matrix: weights on the diagonal, +1 for edges
        let mut m = vec![vec![BigInt::zero(); n]; n];
        for (i, &v) in order.iter().enumerate() {
            m[i][i] = self.forest.weight(v).unwrap().clone();
        }
        for (p, q) in self.forest.edges() {
            m[index[&p]][index[&q]] = BigInt::one();
            m[index[&q]][index[&p]] = BigInt::one();
        }

        let adjunction_rhs: Vec<BigInt> = order
            .iter()
            .map(|&v| BigInt::from(self.forest.degree(v) as i64) - BigInt::from(2))
            .collect();
        let mut pullback_rhs = vec![BigInt::zero(); n];
        pullback_rhs[index[&self.root]] = BigInt::one();

        let solutions = solve_exact(&m, &[adjunction_rhs, pullback_rhs])
            .expect("intersection matrix of a blow-up state is nonsingular");
        let kbar: Vec<BigInt> = solutions[0]
            .iter()
            .map(|x| {
                assert!(x.is_integer(), "adjunction system has a non-integral solution");
                x.to_integer()
            })
            .collect();
        let mult: Vec<BigInt> = solutions[1]
            .iter()
            .map(|x| {
                assert!(x.is_integer(), "pullback system has a non-integral solution");
                x.to_integer()
            })
            .collect();
        assert!(
            mult[index[&self.root]].is_one(),
            "pullback multiplicity of the root must be 1"
        );

        let total_det = det_fast(&self.forest);
        let vertices = order
            .iter()
            .map(|&v| {
                let det_label = det_fast(&self.forest.remove_vertex(v).unwrap());
                let l = if v == self.root {
                    None
                } else {
                    let d_prime = det_fast(
                        &self
                            .forest
                            .remove_vertices(&BTreeSet::from([self.root, v]))
                            .unwrap(),
                    );
                    Some(BigInt::from(2) * &det_label + d_prime)
                };
                VertexRow {
                    id: v,
                    weight: self.forest.weight(v).unwrap().clone(),
                    kbar: kbar[index[&v]].clone(),
                    det_label,
                    mult: mult[index[&v]].clone(),
                    l,
                }
            })
            .collect();
        let edges = self
            .forest
            .edges()
            .map(|(p, q)| EdgeRow {
                p,
                q,
                det_label: det_fast(&self.forest.remove_edge(p, q).unwrap()),
            })
            .collect();
        LabelReport {
            root: self.root,
            vertices,
            edges,
            total_det,
        }
    }

    /// Compares the maintained labels against a full from-scratch
    /// recomputation. Names the first mismatching label on failure.
    pub fn verify_labels(&self) -> Result<()> {
        let maintained = self.report();
        let fresh = self.recompute_from_scratch();
        if maintained != fresh {
            for (a, b) in maintained.vertices.iter().zip(&fresh.vertices) {
                for (name, x, y) in [
                    ("w", &a.weight, &b.weight),
                    ("b", &a.kbar, &b.kbar),
                    ("d", &a.det_label, &b.det_label),
                    ("u", &a.mult, &b.mult),
                ] {
                    if x != y {
                        return Err(Error::StateVerification(format!(
                            "vertex {}: {name} is {x}, recomputed {y}",
                            a.id
                        )));
                    }
                }
            }
            for (a, b) in maintained.edges.iter().zip(&fresh.edges) {
                if a.det_label != b.det_label {
                    return Err(Error::StateVerification(format!(
                        "edge ({},{}): d is {}, recomputed {}",
                        a.p, a.q, a.det_label, b.det_label
                    )));
                }
            }
            return Err(Error::StateVerification(format!(
                "total determinant is {}, recomputed {}",
                maintained.total_det, fresh.total_det
            )));
        }
        if !(-&self.total_det).is_one() {
            return Err(Error::StateVerification(format!(
                "total determinant is {}, expected -1",
                self.total_det
            )));
        }
        Ok(())
    }

    /// True iff `p` and `q` lie in different components of the forest with the
    /// root removed (the root is on the tree path between them).
    pub fn separated_by_root(&self, p: VertexId, q: VertexId) -> Result<bool> {
        self.require_vertex(p)?;
        self.require_vertex(q)?;
        if p == self.root || q == self.root || p == q {
            return Ok(false);
        }
        let without_root = self.forest.remove_vertex(self.root)?;
        let comps = without_root.component_labels();
        Ok(comps[&p] != comps[&q])
    }
}

/// Reconstructs a state from raw parts. Used by deserialization; the caller
/// is expected to run [`BlowupState::verify_labels`] afterwards.
pub fn state_from_parts(
    forest: WeightedForest,
    root: VertexId,
    labels: BTreeMap<VertexId, VertexLabels>,
    edge_labels: BTreeMap<(VertexId, VertexId), BigInt>,
    history: Vec<HistoryEntry>,
    total_det: BigInt,
) -> BlowupState {
    BlowupState {
        forest,
        root,
        labels,
        edge_labels,
        history,
        total_det,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn i(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn seed_labels() {
        let s = seed_p2();
        let r = s.root();
        assert_eq!(s.forest().weight(r), Some(&i(1)));
        assert_eq!(s.kbar(r), Some(&i(-2)));
        assert_eq!(s.det_label(r), Some(&i(1)));
        assert_eq!(s.mult(r), Some(&i(1)));
        assert_eq!(s.total_det(), &i(-1));
        let report = s.report();
        assert_eq!(report.vertices.len(), 1);
        assert!(report.edges.is_empty());
        assert_eq!(det_fast(s.forest()), i(-1));
    }

    #[test]
    fn first_vertex_blowup() {
        let s = seed_p2().blow_up_vertex(VertexId(0)).unwrap();
        assert_eq!(s.forest().weight(VertexId(0)), Some(&i(0)));
        assert_eq!(s.forest().weight(VertexId(1)), Some(&i(-1)));
        assert_eq!(s.kbar(VertexId(0)), Some(&i(-2)));
        assert_eq!(s.kbar(VertexId(1)), Some(&i(-1)));
        assert_eq!(s.det_label(VertexId(1)), Some(&i(0)));
        assert_eq!(s.edge_label(VertexId(0), VertexId(1)), Some(&i(0)));
        assert_eq!(s.mult(VertexId(1)), Some(&i(1)));
    }

    #[test]
    fn example_5_1_chain() {
        // seed -> blow up root -> blow up the new vertex
        let s = seed_p2()
            .blow_up_vertex(VertexId(0))
            .unwrap()
            .blow_up_vertex(VertexId(1))
            .unwrap();
        let w: Vec<i64> = (0..3)
            .map(|k| s.forest().weight(VertexId(k)).unwrap().to_i64().unwrap())
            .collect();
        assert_eq!(w, [0, -2, -1]);
        let b: Vec<i64> = (0..3).map(|k| s.kbar(VertexId(k)).unwrap().to_i64().unwrap()).collect();
        assert_eq!(b, [-2, -1, 0]);
        let d: Vec<i64> = (0..3)
            .map(|k| s.det_label(VertexId(k)).unwrap().to_i64().unwrap())
            .collect();
        assert_eq!(d, [1, 0, -1]);
        assert_eq!(s.edge_label(VertexId(0), VertexId(1)), Some(&i(0)));
        assert_eq!(s.edge_label(VertexId(1), VertexId(2)), Some(&i(-1)));
        assert_eq!(s.total_det(), &i(-1));
        // multiplicity identity on the last vertex: u^2 = d_P + d'_P
        assert_eq!(s.mult(VertexId(2)), Some(&i(1)));
        assert_eq!(s.d_prime(VertexId(2)).unwrap(), i(2));
    }

    #[test]
    fn edge_blowup_chain() {
        // seed -> blow up root -> blow up the edge (0,1)
        let s = seed_p2()
            .blow_up_vertex(VertexId(0))
            .unwrap()
            .blow_up_edge(VertexId(0), VertexId(1))
            .unwrap();
        let w: Vec<i64> = (0..3)
            .map(|k| s.forest().weight(VertexId(k)).unwrap().to_i64().unwrap())
            .collect();
        assert_eq!(w, [-1, -2, -1]);
        let b: Vec<i64> = (0..3).map(|k| s.kbar(VertexId(k)).unwrap().to_i64().unwrap()).collect();
        assert_eq!(b, [-2, -1, -3]);
        // d_R = 2*0 + 1 + 0 - (-1) = 2
        assert_eq!(s.det_label(VertexId(2)), Some(&i(2)));
        assert_eq!(s.edge_label(VertexId(0), VertexId(2)), Some(&i(1)));
        assert_eq!(s.edge_label(VertexId(1), VertexId(2)), Some(&i(0)));
        // u_R = 1 + 1; and indeed u^2 = d_P + d'_P: 4 = 2 + 2
        assert_eq!(s.mult(VertexId(2)), Some(&i(2)));
        assert_eq!(s.d_prime(VertexId(2)).unwrap(), i(2));
        assert!(!s.forest().has_edge(VertexId(0), VertexId(1)));
    }

    #[test]
    fn blow_down_round_trips() {
        let s1 = seed_p2().blow_up_vertex(VertexId(0)).unwrap();
        let s2 = s1.blow_up_vertex(VertexId(1)).unwrap();
        assert_eq!(s2.blow_down().unwrap(), s1);
        let s3 = s1.blow_up_edge(VertexId(0), VertexId(1)).unwrap();
        assert_eq!(s3.blow_down().unwrap(), s1);
        assert!(seed_p2().blow_down().is_err());
    }

    #[test]
    fn finality() {
        let s = seed_p2()
            .blow_up_vertex(VertexId(0))
            .unwrap()
            .blow_up_edge(VertexId(0), VertexId(1))
            .unwrap();
        assert!(s.is_final(VertexId(2)).unwrap());
        // both endpoints of the blown-up edge are parents of the new vertex
        assert!(!s.is_final(VertexId(0)).unwrap());
        assert!(!s.is_final(VertexId(1)).unwrap());
        assert!(s.is_final(VertexId(99)).is_err());
    }

    #[test]
    fn final_by_labels_cases() {
        // b = 1 vertex with a single 0 neighbor: the two-step chain extended by
        // blowing up its last vertex (b = 0 + 1 = 1).
        let s = seed_p2()
            .blow_up_vertex(VertexId(0))
            .unwrap()
            .blow_up_vertex(VertexId(1))
            .unwrap()
            .blow_up_vertex(VertexId(2))
            .unwrap();
        assert_eq!(s.kbar(VertexId(3)), Some(&BigInt::one()));
        assert_eq!(s.final_by_labels(VertexId(3)).unwrap(), Some(true));
        // negative labels are out of the propositions' range
        assert_eq!(s.final_by_labels(VertexId(0)).unwrap(), None);
    }

    #[test]
    fn ancestors_closure() {
        let s = seed_p2()
            .blow_up_vertex(VertexId(0))
            .unwrap()
            .blow_up_vertex(VertexId(1))
            .unwrap();
        assert!(s.ancestors(VertexId(0)).unwrap().is_empty());
        let a = s.ancestors(VertexId(2)).unwrap();
        assert_eq!(a, BTreeSet::from([VertexId(0), VertexId(1)]));
    }

    #[test]
    fn recompute_matches_maintained() {
        let s = seed_p2()
            .blow_up_vertex(VertexId(0))
            .unwrap()
            .blow_up_edge(VertexId(0), VertexId(1))
            .unwrap()
            .blow_up_vertex(VertexId(0))
            .unwrap();
        s.verify_labels().unwrap();
    }

    #[test]
    fn separation_by_root() {
        // root adjacent to 2 and 3; 1 hangs off 2
        let s = seed_p2()
            .blow_up_vertex(VertexId(0))
            .unwrap()
            .blow_up_edge(VertexId(0), VertexId(1))
            .unwrap()
            .blow_up_vertex(VertexId(0))
            .unwrap();
        assert!(s.separated_by_root(VertexId(2), VertexId(3)).unwrap());
        assert!(s.separated_by_root(VertexId(1), VertexId(3)).unwrap());
        assert!(!s.separated_by_root(VertexId(1), VertexId(2)).unwrap());
    }
}
