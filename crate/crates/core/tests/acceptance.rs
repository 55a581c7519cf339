//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Oracles here are written independently of the library code they judge:
//! the determinant oracle is a memoized cofactor expansion over the dense
//! matrix, and the depth-3 class count comes from a from-scratch exhaustive
//! search with its own canonical encoding.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use blowup_calculus::checks::{
    discriminate_lemma_5_9, example_5_1_ops, right_edge_chain_ops, run_check, worked_example_ops,
    worked_example_spine, HistorySampler,
};
use blowup_calculus::engine::seed_p2;
use blowup_calculus::enumerate::{
    enumerate_states, visit_classes, CanonicalKey, EnumerateOptions, FilterSpec,
};
use blowup_calculus::io::{load_state, save_state};
use blowup_calculus::forest::{det_fast, det_matchings, signature};
use blowup_calculus::{BlowupState, VertexId, WeightedForest};

fn pass(n: u32, what: &str) {
    println!("criterion {n} ({what}): pass");
}

fn ints(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

#[test]
fn criterion_01_worked_example() {
    let t0 = Instant::now();
    let state = BlowupState::replay(&worked_example_ops()).unwrap();
    assert_eq!(state.forest().len(), 11);
    let spine = worked_example_spine();
    let kbar: Vec<BigInt> = spine.iter().map(|&v| state.kbar(v).unwrap().clone()).collect();
    assert_eq!(kbar, ints(&[0, -1, -2, -1, -2, -1, 0]));
    let weights: Vec<BigInt> = spine
        .iter()
        .map(|&v| state.forest().weight(v).unwrap().clone())
        .collect();
    assert_eq!(weights, ints(&[-3, -2, -1, -4, -1, -2, -4]));
    for t in [7u32, 8, 9, 10].map(VertexId) {
        assert_eq!(state.kbar(t), Some(&BigInt::one()), "tip {t}");
        assert_eq!(state.forest().weight(t), Some(&BigInt::from(-1)), "tip {t}");
        assert_eq!(state.forest().degree(t), 1, "tip {t}");
    }
    assert_eq!(state.total_det(), &BigInt::from(-1));
    assert!(t0.elapsed().as_secs() < 1, "took {:?}", t0.elapsed());
    pass(1, "golden worked example");
}

#[test]
fn criterion_02_two_step_chain() {
    let state = BlowupState::replay(&example_5_1_ops()).unwrap();
    let chain = [0u32, 1, 2].map(VertexId);
    let row = |f: &dyn Fn(VertexId) -> BigInt| -> Vec<BigInt> {
        chain.iter().map(|&v| f(v)).collect()
    };
    assert_eq!(row(&|v| state.det_label(v).unwrap().clone()), ints(&[1, 0, -1]));
    assert_eq!(row(&|v| state.kbar(v).unwrap().clone()), ints(&[-2, -1, 0]));
    assert_eq!(
        row(&|v| state.forest().weight(v).unwrap().clone()),
        ints(&[0, -2, -1])
    );
    assert_eq!(state.edge_label(chain[0], chain[1]), Some(&BigInt::zero()));
    assert_eq!(state.edge_label(chain[1], chain[2]), Some(&BigInt::from(-1)));
    pass(2, "golden two-step chain");
}

#[test]
fn criterion_03_proof_chain_and_k_chains() {
    // base chain: seed → vertex blow-up → edge blow-up
    let state = BlowupState::replay(&right_edge_chain_ops(0)).unwrap();
    let chain = [0u32, 2, 1].map(VertexId);
    let dets: Vec<BigInt> = chain.iter().map(|&v| state.det_label(v).unwrap().clone()).collect();
    assert_eq!(dets, ints(&[1, 2, 0]));
    let kbar: Vec<BigInt> = chain.iter().map(|&v| state.kbar(v).unwrap().clone()).collect();
    assert_eq!(kbar, ints(&[-2, -3, -1]));
    let weights: Vec<BigInt> = chain
        .iter()
        .map(|&v| state.forest().weight(v).unwrap().clone())
        .collect();
    assert_eq!(weights, ints(&[-1, -1, -2]));
    assert_eq!(state.edge_label(chain[0], chain[1]), Some(&BigInt::one()));
    assert_eq!(state.edge_label(chain[1], chain[2]), Some(&BigInt::zero()));

    for k in 1..=8usize {
        let s = BlowupState::replay(&right_edge_chain_ops(k)).unwrap();
        let mut order = vec![VertexId(0)];
        order.extend((0..=k).map(|j| VertexId(2 + j as u32)));
        order.push(VertexId(1));
        let dets: Vec<BigInt> = order.iter().map(|&v| s.det_label(v).unwrap().clone()).collect();
        let mut want: Vec<BigInt> = (1..=k as i64 + 2).map(BigInt::from).collect();
        want.push(BigInt::zero());
        assert_eq!(dets, want, "k = {k}");
        assert_eq!(s.total_det(), &BigInt::from(-1), "k = {k}");
    }
    pass(3, "golden proof chain, k = 1..8");
}

/// Memoized cofactor expansion along the first live row, keyed by the set of
/// remaining columns. Independent of both library determinant algorithms.
fn det_cofactor(m: &[Vec<BigInt>]) -> BigInt {
    fn go(
        m: &[Vec<BigInt>],
        cols: u32,
        memo: &mut std::collections::HashMap<u32, BigInt>,
    ) -> BigInt {
        if cols == 0 {
            return BigInt::one();
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        // expand along the row whose index equals the number of already
        // removed columns, so (row set, col set) stays square
        let row = m.len() - cols.count_ones() as usize;
        let mut acc = BigInt::zero();
        let mut sign = BigInt::one();
        for j in 0..m.len() {
            if cols & (1 << j) == 0 {
                continue;
            }
            if !m[row][j].is_zero() {
                acc += &sign * &m[row][j] * go(m, cols & !(1 << j), memo);
            }
            sign = -sign;
        }
        memo.insert(cols, acc.clone());
        acc
    }
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    go(m, (1u32 << n) - 1, &mut Default::default())
}

fn random_forest(rng: &mut StdRng, max_vertices: usize, weight_bound: i64) -> WeightedForest {
    let n = rng.gen_range(0..=max_vertices);
    let mut forest = WeightedForest::new();
    for i in 0..n {
        forest.add_vertex(
            VertexId(i as u32),
            BigInt::from(rng.gen_range(-weight_bound..=weight_bound)),
        );
        // attach to a random earlier vertex, or start a new component
        if i > 0 && rng.gen_bool(0.8) {
            let j = rng.gen_range(0..i);
            forest.add_edge(VertexId(j as u32), VertexId(i as u32));
        }
    }
    forest
}

#[test]
fn criterion_04_determinant_oracles() {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(4);
    for trial in 0..10_000 {
        let forest = random_forest(&mut rng, 10, 6);
        let fast = det_fast(&forest);
        assert_eq!(fast, det_matchings(&forest), "trial {trial}: {forest:?}");
        let gram = forest.gram_matrix();
        assert_eq!(fast, det_cofactor(&gram.entries), "trial {trial}: {forest:?}");
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    pass(4, "determinant oracle equivalence, 10000 forests");
}

#[test]
fn criterion_05_lemma_suite() {
    let names = [
        "lemma_5_2", "lemma_5_3", "lemma_5_4", "lemma_5_5", "lemma_5_6", "lemma_5_7",
        "lemma_5_8", "lemma_5_10", "thm_5_2", "thm_5_3", "prop_2_3", "adjunction",
        "label_freeze", "blowdown_roundtrip",
    ];
    for (vw, ew) in [(8, 1), (1, 8)] {
        for name in names {
            let mut sampler = HistorySampler::new(5, 12).with_mix(vw, ew);
            if name == "thm_5_2" {
                sampler = sampler.forbid_zero_kbar();
            }
            let report = run_check(name, &sampler, 10_000).unwrap();
            assert!(
                report.passed(),
                "{name} (mix {vw}:{ew}) failed: {:?}",
                report.failures.first()
            );
        }
    }
    pass(5, "lemma suite, 10000 trials, both op mixes");
}

#[test]
fn criterion_06_two_sided_formula_discrimination() {
    let report = discriminate_lemma_5_9(4, 6);
    assert_eq!(report.squared_mismatches, 0, "{}", report.verdict);
    assert!(report.linear_mismatches > 0, "{}", report.verdict);
    let inst = report.smallest_separating_instance.as_ref().unwrap();
    assert_eq!(inst.history.len(), 3);
    assert_eq!(inst.oracle, BigInt::from(4));
    assert_eq!(inst.squared_value, BigInt::from(4));
    assert_eq!(inst.linear_value, BigInt::from(2));
    let again = discriminate_lemma_5_9(4, 6);
    assert_eq!(
        serde_json::to_string(&report).unwrap(),
        serde_json::to_string(&again).unwrap()
    );
    pass(6, "two-sided determinant formula discrimination");
}

#[test]
fn criterion_07_signature_sweep() {
    let mut classes = 0u64;
    visit_classes(8, EnumerateOptions { parallel: true, frontier_cap: None }, |_, state, _| {
        classes += 1;
        let sig = signature(state.forest());
        assert_eq!(
            (sig.n_negative, sig.n_zero),
            (1, 0),
            "state {:?}",
            state.ops()
        );
    })
    .unwrap();
    assert_eq!(classes, 27_244);
    pass(7, "signature sweep over all classes to depth 8");
}

/// From-scratch canonical form for the depth-3 cross-check: a nested-list
/// text rendering of the rooted tree with sorted child blocks.
fn naive_canon(state: &BlowupState) -> String {
    fn enc(state: &BlowupState, v: VertexId, parent: Option<VertexId>) -> String {
        let mut kids: Vec<String> = state
            .forest()
            .neighbors(v)
            .filter(|&c| Some(c) != parent)
            .map(|c| enc(state, c, Some(v)))
            .collect();
        kids.sort();
        format!("{}[{}]", state.forest().weight(v).unwrap(), kids.join(","))
    }
    enc(state, state.root(), None)
}

#[test]
fn criterion_08_class_counts() {
    let all = FilterSpec::default();
    let serial = EnumerateOptions { parallel: false, frontier_cap: None };
    let parallel = EnumerateOptions { parallel: true, frontier_cap: None };
    for depth in 0..=3usize {
        let classes = enumerate_states(depth, &all, serial).unwrap();
        let new_at: Vec<usize> = (0..=depth)
            .map(|d| classes.iter().filter(|c| c.depth == d).count())
            .collect();
        assert_eq!(new_at, [1usize, 1, 3, 10][..=depth]);

        // cross-check with an exhaustive search that shares no enumeration code
        let mut states = vec![seed_p2()];
        let mut seen = BTreeSet::new();
        seen.insert(naive_canon(&states[0]));
        for _ in 0..depth {
            let mut next = Vec::new();
            for s in &states {
                for v in s.forest().vertex_ids() {
                    next.push(s.blow_up_vertex(v).unwrap());
                }
                for (p, q) in s.forest().edges() {
                    next.push(s.blow_up_edge(p, q).unwrap());
                }
            }
            for s in &next {
                seen.insert(naive_canon(s));
            }
            states = next;
        }
        assert_eq!(seen.len(), classes.len(), "depth {depth}");

        let par = enumerate_states(depth, &all, parallel).unwrap();
        let keys = |cs: &[blowup_calculus::enumerate::ClassEntry]| -> Vec<CanonicalKey> {
            cs.iter().map(|c| c.key.clone()).collect()
        };
        assert_eq!(keys(&classes), keys(&par), "depth {depth}");
    }
    pass(8, "class counts 1/1/3/10, parallel = serial");
}

#[test]
fn criterion_09_census_sanity() {
    let options = EnumerateOptions { parallel: true, frontier_cap: None };
    let cases = [(-1i64, 0i64, 2usize, 1usize), (1, -2, 0, 1), (2, -3, 2, 1)];
    for (a, b, depth, at_least) in cases {
        let report = blowup_calculus::enumerate::census(a, b, depth, options).unwrap();
        assert!(report.count >= at_least, "census({a}, {b}, {depth}) = {}", report.count);
        assert!(!report.witnesses.is_empty());
        for ops in &report.witnesses {
            let state = BlowupState::replay(ops).unwrap();
            let hit = state.forest().vertex_ids().any(|v| {
                state.det_label(v) == Some(&BigInt::from(a))
                    && state.kbar(v) == Some(&BigInt::from(b))
            });
            assert!(hit, "witness {ops:?} does not exhibit ({a}, {b})");
        }
    }
    // exactly one class within depth 0 carries the seed labels
    assert_eq!(
        blowup_calculus::enumerate::census(1, -2, 0, options).unwrap().count,
        1
    );
    pass(9, "census sanity with replayable witnesses");
}

#[test]
fn criterion_10_round_trips() {
    let sampler = HistorySampler::new(10, 10);
    let mut rng = StdRng::seed_from_u64(10);
    let mut states_done = 0;
    let mut ops_done = 0;
    for trial in 0.. {
        if states_done >= 1000 && ops_done >= 1000 {
            break;
        }
        let state = BlowupState::replay(&sampler.sample(trial)).unwrap();
        if states_done < 1000 {
            let text = save_state(&state);
            let loaded = load_state(&text).unwrap();
            assert_eq!(loaded, state);
            assert_eq!(save_state(&loaded), text, "trial {trial}");
            states_done += 1;
        }
        if ops_done < 1000 {
            let vs: Vec<VertexId> = state.forest().vertex_ids().collect();
            let es: Vec<(VertexId, VertexId)> = state.forest().edges().collect();
            let up = if es.is_empty() || rng.gen_bool(0.5) {
                state.blow_up_vertex(vs[rng.gen_range(0..vs.len())]).unwrap()
            } else {
                let (p, q) = es[rng.gen_range(0..es.len())];
                state.blow_up_edge(p, q).unwrap()
            };
            assert_eq!(up.blow_down().unwrap(), state, "trial {trial}");
            ops_done += 1;
        }
    }
    pass(10, "state-file and blow-down round trips, 1000 each");
}

#[test]
fn state_files_use_only_decimal_text_integers() {
    let state = BlowupState::replay(&worked_example_ops()).unwrap();
    let json: serde_json::Value = serde_json::from_str(&save_state(&state)).unwrap();
    fn no_big_numbers(v: &serde_json::Value) {
        match v {
            serde_json::Value::Number(n) => {
                // only small structural ints (ids, schema) appear as numbers
                assert!(n.as_u64().is_some() && n.as_u64().unwrap() < 1 << 32);
            }
            serde_json::Value::Array(xs) => xs.iter().for_each(no_big_numbers),
            serde_json::Value::Object(m) => m.values().for_each(no_big_numbers),
            _ => {}
        }
    }
    no_big_numbers(&json);
}
