//! Serialization: state files, graph export, and the label table display.
//!
//! State files are JSON with every integer as decimal text. Derived labels
//! are stored redundantly and re-verified on load, so a file doubles as a
//! golden fixture and a corruption detector.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::engine::{
    state_from_parts, BlowupState, HistoryEntry, LabelReport, VertexLabels,
};
use crate::error::{Error, Result};
use crate::forest::{edge_key, VertexId, WeightedForest};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub schema: u32,
    pub root: u32,
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<EdgeEntry>,
    pub history: Vec<HistoryEntry>,
    pub total_det: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexEntry {
    pub id: u32,
    pub w: String,
    pub b: String,
    pub d: String,
    pub u: String,
    pub creation_index: u32,
    pub parents: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub p: u32,
    pub q: u32,
    pub d: String,
}

impl StateFile {
    pub fn from_state(state: &BlowupState) -> StateFile {
        let vertices = state
            .forest()
            .vertex_ids()
            .map(|v| {
                let l = state.labels(v).unwrap();
                VertexEntry {
                    id: v.0,
                    w: state.forest().weight(v).unwrap().to_string(),
                    b: l.kbar.to_string(),
                    d: l.det_label.to_string(),
                    u: l.mult.to_string(),
                    creation_index: l.creation_index,
                    parents: l.parents.iter().map(|p| p.0).collect(),
                }
            })
            .collect();
        let edges = state
            .edge_labels()
            .map(|(p, q, d)| EdgeEntry {
                p: p.0,
                q: q.0,
                d: d.to_string(),
            })
            .collect();
        StateFile {
            schema: SCHEMA_VERSION,
            root: state.root().0,
            vertices,
            edges,
            history: state.history().to_vec(),
            total_det: state.total_det().to_string(),
        }
    }

    /// Reconstructs the state and verifies every stored label against a full
    /// from-scratch recomputation; any mismatch rejects the file.
    pub fn into_state(self) -> Result<BlowupState> {
        let state = self.build_unverified()?;
        state.verify_labels()?;
        Ok(state)
    }

    fn build_unverified(self) -> Result<BlowupState> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::MalformedState(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        let parse = |field: &str, s: &str| -> Result<BigInt> {
            BigInt::from_str(s)
                .map_err(|e| Error::MalformedState(format!("field `{field}`: bad integer `{s}`: {e}")))
        };
        let mut forest = WeightedForest::new();
        let mut labels = BTreeMap::new();
        let mut ids = BTreeSet::new();
        for v in &self.vertices {
            if !ids.insert(v.id) {
                return Err(Error::MalformedState(format!("duplicate vertex id {}", v.id)));
            }
        }
        if !ids.contains(&self.root) {
            return Err(Error::MalformedState(format!(
                "root {} is not a listed vertex",
                self.root
            )));
        }
        for v in &self.vertices {
            forest.add_vertex(VertexId(v.id), parse("w", &v.w)?);
            for p in &v.parents {
                if !ids.contains(p) {
                    return Err(Error::MalformedState(format!(
                        "vertex {}: unknown parent {p}",
                        v.id
                    )));
                }
            }
            labels.insert(
                VertexId(v.id),
                VertexLabels {
                    kbar: parse("b", &v.b)?,
                    det_label: parse("d", &v.d)?,
                    mult: parse("u", &v.u)?,
                    creation_index: v.creation_index,
                    parents: v.parents.iter().map(|&p| VertexId(p)).collect(),
                },
            );
        }
        let mut edge_labels = BTreeMap::new();
        for e in &self.edges {
            if !ids.contains(&e.p) || !ids.contains(&e.q) || e.p == e.q {
                return Err(Error::MalformedState(format!("bad edge ({}, {})", e.p, e.q)));
            }
            let key = edge_key(VertexId(e.p), VertexId(e.q));
            if edge_labels.contains_key(&key) {
                return Err(Error::MalformedState(format!(
                    "duplicate edge ({}, {})",
                    e.p, e.q
                )));
            }
            if forest.has_edge(key.0, key.1) {
                return Err(Error::MalformedState(format!(
                    "duplicate edge ({}, {})",
                    e.p, e.q
                )));
            }
            // acyclicity guard: adding an edge between already-connected
            // vertices would close a cycle
            let connected = {
                let comps = forest.component_labels();
                comps[&key.0] == comps[&key.1]
            };
            if connected {
                return Err(Error::MalformedState(format!(
                    "edge ({}, {}) closes a cycle",
                    e.p, e.q
                )));
            }
            forest.add_edge(key.0, key.1);
            edge_labels.insert(key, parse("edge d", &e.d)?);
        }
        let total_det = parse("total_det", &self.total_det)?;
        Ok(state_from_parts(
            forest,
            VertexId(self.root),
            labels,
            edge_labels,
            self.history,
            total_det,
        ))
    }
}

/// Canonical textual form of a state file. Loading then re-saving is
/// byte-identical.
pub fn save_state(state: &BlowupState) -> String {
    let mut s = serde_json::to_string_pretty(&StateFile::from_state(state)).unwrap();
    s.push('\n');
    s
}

pub fn load_state(text: &str) -> Result<BlowupState> {
    let file: StateFile =
        serde_json::from_str(text).map_err(|e| Error::MalformedState(e.to_string()))?;
    file.into_state()
}

/// Graphviz DOT export: one node per vertex annotated with all labels, one
/// edge per live edge annotated with its determinant label.
pub fn export_dot(state: &BlowupState) -> String {
    let mut out = String::from("graph blowup {\n");
    for v in state.forest().vertex_ids() {
        let l = state.labels(v).unwrap();
        out.push_str(&format!(
            "  v{} [label=\"{}: w={}, b={}, d={}, u={}\"{}];\n",
            v.0,
            v.0,
            state.forest().weight(v).unwrap(),
            l.kbar,
            l.det_label,
            l.mult,
            if v == state.root() { ", shape=box" } else { "" },
        ));
    }
    for (p, q, d) in state.edge_labels() {
        out.push_str(&format!("  v{} -- v{} [label=\"d={}\"];\n", p.0, q.0, d));
    }
    out.push_str("}\n");
    out
}

/// Returns the vertices in path order when the forest is a single path
/// (including the one-vertex case), oriented so the endpoint sequence is
/// lexicographically smallest by vertex id.
fn path_order(state: &BlowupState) -> Option<Vec<VertexId>> {
    let forest = state.forest();
    let n = forest.len();
    if n == 0 {
        return Some(Vec::new());
    }
    if forest.edge_count() + 1 != n {
        return None; // disconnected
    }
    if n == 1 {
        return Some(forest.vertex_ids().collect());
    }
    let ends: Vec<VertexId> = forest
        .vertex_ids()
        .filter(|&v| forest.degree(v) == 1)
        .collect();
    if ends.len() != 2 || forest.vertex_ids().any(|v| forest.degree(v) > 2) {
        return None;
    }
    let walk = |start: VertexId| {
        let mut order = vec![start];
        let mut prev = None;
        let mut cur = start;
        while let Some(next) = forest.neighbors(cur).find(|&x| Some(x) != prev) {
            order.push(next);
            prev = Some(cur);
            cur = next;
        }
        order
    };
    let a = walk(ends[0]);
    let b = walk(ends[1]);
    Some(if a <= b { a } else { b })
}

/// The three-row label display: determinant row (vertex determinants with
/// edge determinants between them), `b` row, weight row. Falls back to a
/// per-vertex table when the tree is not a path.
pub fn render_labels(state: &BlowupState) -> String {
    match path_order(state) {
        Some(order) if !order.is_empty() => render_path(state, &order),
        _ => render_table(state, &state.report()),
    }
}

fn render_path(state: &BlowupState, order: &[VertexId]) -> String {
    // columns alternate vertex, edge, vertex, ...
    let mut det_row = Vec::new();
    let mut b_row = Vec::new();
    let mut w_row = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        if i > 0 {
            let d = state.edge_label(order[i - 1], v).unwrap();
            det_row.push(format!("_{d}"));
            b_row.push(String::new());
            w_row.push(String::new());
        }
        det_row.push(state.det_label(v).unwrap().to_string());
        b_row.push(state.kbar(v).unwrap().to_string());
        w_row.push(state.forest().weight(v).unwrap().to_string());
    }
    let widths: Vec<usize> = (0..det_row.len())
        .map(|i| det_row[i].len().max(b_row[i].len()).max(w_row[i].len()))
        .collect();
    let line = |prefix: &str, cells: &[String]| {
        let mut s = String::from(prefix);
        for (cell, w) in cells.iter().zip(&widths) {
            s.push_str(&format!("  {cell:>w$}", w = w));
        }
        s.push('\n');
        s
    };
    let mut out = String::new();
    out.push_str(&line("d:", &det_row));
    out.push_str(&line("b:", &b_row));
    out.push_str(&line("w:", &w_row));
    out.push_str(&format!("total d = {}\n", state.total_det()));
    out
}

fn render_table(_state: &BlowupState, report: &LabelReport) -> String {
    let mut out = String::new();
    out.push_str("  id         w         b         d         u         l\n");
    for row in &report.vertices {
        out.push_str(&format!(
            "{:>4}{:>10}{:>10}{:>10}{:>10}{:>10}\n",
            row.id.0,
            row.weight.to_string(),
            row.kbar.to_string(),
            row.det_label.to_string(),
            row.mult.to_string(),
            row.l.as_ref().map_or("-".to_string(), |x| x.to_string()),
        ));
    }
    out.push_str("edges:\n");
    for e in &report.edges {
        out.push_str(&format!("  {} -- {}  d={}\n", e.p.0, e.q.0, e.det_label));
    }
    out.push_str(&format!("total d = {}\n", report.total_det));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::{example_5_1_ops, worked_example_ops};
    use crate::engine::seed_p2;

    #[test]
    fn save_load_roundtrip_is_byte_identical() {
        let state = BlowupState::replay(&worked_example_ops()).unwrap();
        let text = save_state(&state);
        let loaded = load_state(&text).unwrap();
        assert_eq!(loaded, state);
        assert_eq!(save_state(&loaded), text);
    }

    #[test]
    fn corrupted_label_is_rejected() {
        let state = BlowupState::replay(&example_5_1_ops()).unwrap();
        let mut file = StateFile::from_state(&state);
        file.vertices[1].d = "99".into();
        let err = file.into_state().unwrap_err();
        assert!(matches!(err, Error::StateVerification(_)), "{err}");
        assert!(err.to_string().contains("d is 99"));
    }

    #[test]
    fn malformed_file_is_rejected() {
        assert!(matches!(
            load_state("{"),
            Err(Error::MalformedState(_))
        ));
        let state = seed_p2();
        let mut file = StateFile::from_state(&state);
        file.root = 9;
        assert!(matches!(file.into_state(), Err(Error::MalformedState(_))));
    }

    #[test]
    fn cycle_in_file_is_rejected() {
        let state = BlowupState::replay(&example_5_1_ops()).unwrap();
        let mut file = StateFile::from_state(&state);
        file.edges.push(EdgeEntry {
            p: 0,
            q: 2,
            d: "0".into(),
        });
        let err = file.into_state().unwrap_err();
        assert!(err.to_string().contains("cycle"));
    }

    #[test]
    fn labels_display_for_example_chain() {
        let state = BlowupState::replay(&example_5_1_ops()).unwrap();
        let text = render_labels(&state);
        assert_eq!(
            text,
            "d:   1  _0   0  _-1  -1\n\
             b:  -2      -1        0\n\
             w:   0      -2       -1\n\
             total d = -1\n"
        );
    }

    #[test]
    fn labels_display_for_branched_tree_lists_vertices() {
        let state = BlowupState::replay(&worked_example_ops()).unwrap();
        let text = render_labels(&state);
        assert!(text.contains("id"));
        assert!(text.contains("edges:"));
        assert_eq!(text.matches(" -- ").count(), state.forest().edge_count());
    }

    #[test]
    fn dot_export_counts() {
        let state = BlowupState::replay(&worked_example_ops()).unwrap();
        let dot = export_dot(&state);
        assert_eq!(dot.matches("[label=\"").count(), 11 + 10);
        assert_eq!(dot.matches(" -- ").count(), 10);
    }
}
