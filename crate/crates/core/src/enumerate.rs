//! Canonical enumeration of reachable blow-up trees.
//!
//! States are deduplicated by the canonical form of the rooted weighted tree
//! (shape, root, weights). Every other label is a function of those three, so
//! the key determines the full label set.

use std::collections::HashSet;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{seed_p2, BlowupOp, BlowupState};
use crate::error::{Error, Result};
use crate::forest::VertexId;

/// Canonical byte encoding of (tree shape, root, vertex weights).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(pub Vec<u8>);

impl CanonicalKey {
    pub fn as_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Rooted canonical form: each subtree encodes as `(` weight `;` sorted child
/// encodings `)`. Two states get equal keys iff a root-preserving,
/// weight-preserving tree isomorphism relates their forests.
pub fn canonical_key(state: &BlowupState) -> CanonicalKey {
    fn encode(state: &BlowupState, v: VertexId, parent: Option<VertexId>) -> Vec<u8> {
        let mut children: Vec<Vec<u8>> = state
            .forest()
            .neighbors(v)
            .filter(|&n| Some(n) != parent)
            .map(|n| encode(state, n, Some(v)))
            .collect();
        children.sort();
        let mut out = Vec::new();
        out.push(b'(');
        out.extend_from_slice(state.forest().weight(v).unwrap().to_string().as_bytes());
        out.push(b';');
        for c in children {
            out.extend_from_slice(&c);
        }
        out.push(b')');
        out
    }
    CanonicalKey(encode(state, state.root(), None))
}

/// Which label a filter atom constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    Weight,
    Kbar,
    DetLabel,
    Mult,
    L,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl Comparator {
    fn holds(self, lhs: &BigInt, rhs: &BigInt) -> bool {
        match self {
            Comparator::Lt => lhs < rhs,
            Comparator::Le => lhs <= rhs,
            Comparator::Eq => lhs == rhs,
            Comparator::Ne => lhs != rhs,
            Comparator::Ge => lhs >= rhs,
            Comparator::Gt => lhs > rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantifier {
    Some,
    All,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterAtom {
    pub quantifier: Quantifier,
    pub label: LabelKind,
    pub comparator: Comparator,
    #[serde(with = "crate::serde_support::bigint_dec")]
    pub value: BigInt,
}

/// Conjunction of atomic label constraints, evaluable on any state without
/// history access.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FilterSpec {
    pub atoms: Vec<FilterAtom>,
}

impl FilterSpec {
    pub fn accept_all() -> Self {
        FilterSpec::default()
    }

    /// Parses expressions like `some d = -1 & all b >= -9`.
    /// Labels: `w`, `b`, `d`, `u`, `l`; quantifiers `some` / `all`;
    /// comparators `< <= = != >= >`.
    pub fn parse(expr: &str) -> Result<FilterSpec> {
        let mut atoms = Vec::new();
        for clause in expr.split('&') {
            let clause = clause.trim();
            if clause.is_empty() {
                continue;
            }
            let parts: Vec<&str> = clause.split_whitespace().collect();
            if parts.len() != 4 {
                return Err(Error::BadFilter(format!(
                    "`{clause}`: expected `<some|all> <w|b|d|u|l> <cmp> <int>`"
                )));
            }
            let quantifier = match parts[0] {
                "some" => Quantifier::Some,
                "all" => Quantifier::All,
                other => return Err(Error::BadFilter(format!("unknown quantifier `{other}`"))),
            };
            let label = match parts[1] {
                "w" => LabelKind::Weight,
                "b" => LabelKind::Kbar,
                "d" => LabelKind::DetLabel,
                "u" => LabelKind::Mult,
                "l" => LabelKind::L,
                other => return Err(Error::BadFilter(format!("unknown label `{other}`"))),
            };
            let comparator = match parts[2] {
                "<" => Comparator::Lt,
                "<=" => Comparator::Le,
                "=" | "==" => Comparator::Eq,
                "!=" => Comparator::Ne,
                ">=" => Comparator::Ge,
                ">" => Comparator::Gt,
                other => return Err(Error::BadFilter(format!("unknown comparator `{other}`"))),
            };
            let value = parts[3]
                .parse::<BigInt>()
                .map_err(|e| Error::BadFilter(format!("bad integer `{}`: {e}", parts[3])))?;
            atoms.push(FilterAtom {
                quantifier,
                label,
                comparator,
                value,
            });
        }
        Ok(FilterSpec { atoms })
    }

    pub fn matches(&self, state: &BlowupState) -> bool {
        self.atoms.iter().all(|atom| {
            // `l` is undefined at the root: such a vertex never satisfies an
            // existential atom and never fails a universal one
            let mut values = state.forest().vertex_ids().map(|v| match atom.label {
                LabelKind::Weight => Some(state.forest().weight(v).unwrap().clone()),
                LabelKind::Kbar => Some(state.kbar(v).unwrap().clone()),
                LabelKind::DetLabel => Some(state.det_label(v).unwrap().clone()),
                LabelKind::Mult => Some(state.mult(v).unwrap().clone()),
                LabelKind::L => (v != state.root()).then(|| {
                    BigInt::from(2) * state.det_label(v).unwrap() + state.d_prime(v).unwrap()
                }),
            });
            match atom.quantifier {
                Quantifier::Some => {
                    values.any(|x| x.is_some_and(|x| atom.comparator.holds(&x, &atom.value)))
                }
                Quantifier::All => {
                    values.all(|x| x.is_none_or(|x| atom.comparator.holds(&x, &atom.value)))
                }
            }
        })
    }
}

/// One canonical class discovered by the enumeration.
#[derive(Debug, Clone)]
pub struct ClassEntry {
    pub key: CanonicalKey,
    /// A state realizing the class with a minimal-length history.
    pub witness: BlowupState,
    pub depth: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EnumerateOptions {
    pub parallel: bool,
    /// Abort cleanly when a BFS level exceeds this many states.
    pub frontier_cap: Option<usize>,
}

/// Breadth-first enumeration of canonical classes reachable from the seed,
/// emitting each class once with a minimal-depth witness. The filter applies
/// at emission only; the search itself is unfiltered.
pub fn enumerate_states(
    max_depth: usize,
    filter: &FilterSpec,
    options: EnumerateOptions,
) -> Result<Vec<ClassEntry>> {
    let mut out = Vec::new();
    visit_classes(max_depth, options, |key, state, depth| {
        if filter.matches(state) {
            out.push(ClassEntry {
                key: key.clone(),
                witness: state.clone(),
                depth,
            });
        }
    })?;
    Ok(out)
}

/// Core BFS with canonical dedupe. Classes are visited level by level, in
/// canonical key order within a level, identically in serial and parallel
/// mode.
pub fn visit_classes(
    max_depth: usize,
    options: EnumerateOptions,
    mut visit: impl FnMut(&CanonicalKey, &BlowupState, usize),
) -> Result<()> {
    let seed = seed_p2();
    let seed_key = canonical_key(&seed);
    let mut seen: HashSet<CanonicalKey> = HashSet::from([seed_key.clone()]);
    visit(&seed_key, &seed, 0);
    let mut frontier = vec![seed];
    for depth in 1..=max_depth {
        if frontier.is_empty() {
            break;
        }
        let expanded: Vec<(CanonicalKey, BlowupState)> = if options.parallel {
            frontier
                .par_iter()
                .flat_map_iter(expand_one)
                .collect()
        } else {
            frontier.iter().flat_map(expand_one).collect()
        };
        let mut fresh: Vec<(CanonicalKey, BlowupState)> = Vec::new();
        let mut batch: HashSet<CanonicalKey> = HashSet::new();
        for (key, state) in expanded {
            if !seen.contains(&key) && batch.insert(key.clone()) {
                fresh.push((key, state));
            }
        }
        fresh.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(cap) = options.frontier_cap {
            if fresh.len() > cap {
                return Err(Error::FrontierCapExceeded {
                    cap,
                    depth,
                    size: fresh.len(),
                });
            }
        }
        let mut next = Vec::with_capacity(fresh.len());
        for (key, state) in fresh {
            visit(&key, &state, depth);
            seen.insert(key);
            next.push(state);
        }
        frontier = next;
    }
    Ok(())
}

fn expand_one(state: &BlowupState) -> Vec<(CanonicalKey, BlowupState)> {
    let mut out = Vec::new();
    for v in state.forest().vertex_ids() {
        let child = state.blow_up_vertex(v).unwrap();
        out.push((canonical_key(&child), child));
    }
    for (p, q) in state.forest().edges() {
        let child = state.blow_up_edge(p, q).unwrap();
        out.push((canonical_key(&child), child));
    }
    out
}

const WITNESS_CAP: usize = 5;

/// Census of canonical classes containing a vertex with determinant label `a`
/// and `b`-label `b`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CensusReport {
    pub a: i64,
    pub b: i64,
    pub max_depth: usize,
    pub classes_scanned: usize,
    pub count: usize,
    pub min_depth: Option<usize>,
    /// Replayable histories for the first few matching classes.
    pub witnesses: Vec<Vec<BlowupOp>>,
    pub witnesses_truncated: bool,
}

pub fn census(a: i64, b: i64, max_depth: usize, options: EnumerateOptions) -> Result<CensusReport> {
    let a_big = BigInt::from(a);
    let b_big = BigInt::from(b);
    let mut report = CensusReport {
        a,
        b,
        max_depth,
        classes_scanned: 0,
        count: 0,
        min_depth: None,
        witnesses: Vec::new(),
        witnesses_truncated: false,
    };
    visit_classes(max_depth, options, |_, state, depth| {
        report.classes_scanned += 1;
        let hit = state
            .forest()
            .vertex_ids()
            .any(|v| state.det_label(v) == Some(&a_big) && state.kbar(v) == Some(&b_big));
        if hit {
            report.count += 1;
            report.min_depth = Some(report.min_depth.map_or(depth, |d| d.min(depth)));
            if report.witnesses.len() < WITNESS_CAP {
                report.witnesses.push(state.ops());
            } else {
                report.witnesses_truncated = true;
            }
        }
    })?;
    Ok(report)
}
