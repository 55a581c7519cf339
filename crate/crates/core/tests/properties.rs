//! Property-based invariants over randomly generated forests and histories.

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use blowup_calculus::engine::seed_p2;
use blowup_calculus::forest::{det_fast, det_matchings, signature};
use blowup_calculus::io::{load_state, save_state};
use blowup_calculus::{BlowupState, VertexId, WeightedForest};

/// Random forest from a parent table: `parents[i] = None` starts a new
/// component, `Some(j)` attaches vertex i+1 to vertex (j mod i+1).
fn build_forest(weights: &[i64], parents: &[Option<u32>]) -> WeightedForest {
    let mut forest = WeightedForest::new();
    for (i, &w) in weights.iter().enumerate() {
        forest.add_vertex(VertexId(i as u32), BigInt::from(w));
        if i > 0 {
            if let Some(j) = parents[i - 1] {
                forest.add_edge(VertexId(j % i as u32), VertexId(i as u32));
            }
        }
    }
    forest
}

/// Random history from a step table: each step picks a vertex blow-up on
/// vertex (v mod n) or an edge blow-up on the (e mod edge count)-th edge.
fn build_history(steps: &[(bool, u32)]) -> BlowupState {
    let mut state = seed_p2();
    for &(vertex_kind, idx) in steps {
        let n = state.forest().len() as u32;
        let edges: Vec<(VertexId, VertexId)> = state.forest().edges().collect();
        state = if vertex_kind || edges.is_empty() {
            state.blow_up_vertex(VertexId(idx % n)).unwrap()
        } else {
            let (p, q) = edges[idx as usize % edges.len()];
            state.blow_up_edge(p, q).unwrap()
        };
    }
    state
}

proptest! {
    #[test]
    fn determinants_agree(
        weights in prop::collection::vec(-50i64..=50, 0..9),
        parents in prop::collection::vec(prop::option::of(any::<u32>()), 8),
    ) {
        let forest = build_forest(&weights, &parents);
        prop_assert_eq!(det_fast(&forest), det_matchings(&forest));
    }

    #[test]
    fn signature_counts_det_sign(
        weights in prop::collection::vec(-6i64..=6, 0..9),
        parents in prop::collection::vec(prop::option::of(any::<u32>()), 8),
    ) {
        let forest = build_forest(&weights, &parents);
        let sig = signature(&forest);
        let n = forest.len();
        prop_assert_eq!(sig.n_positive + sig.n_zero + sig.n_negative, n);
        let det_q = det_fast(&forest);
        prop_assert_eq!(sig.n_zero == 0, !det_q.is_zero());
        if sig.n_zero == 0 {
            // Sylvester: sign of the determinant is (-1)^{n_negative}
            prop_assert_eq!(det_q.sign() == num_bigint::Sign::Minus, sig.n_negative % 2 == 1);
        }
    }

    #[test]
    fn histories_keep_core_invariants(
        steps in prop::collection::vec((any::<bool>(), any::<u32>()), 0..8),
    ) {
        let state = build_history(&steps);
        prop_assert_eq!(state.total_det(), &BigInt::from(-1));
        prop_assert!(state.verify_labels().is_ok());
        let sig = signature(state.forest());
        prop_assert_eq!((sig.n_negative, sig.n_zero), (1, 0));
    }

    #[test]
    fn save_load_identity(
        steps in prop::collection::vec((any::<bool>(), any::<u32>()), 0..8),
    ) {
        let state = build_history(&steps);
        let text = save_state(&state);
        let loaded = load_state(&text).unwrap();
        prop_assert_eq!(&loaded, &state);
        prop_assert_eq!(save_state(&loaded), text);
    }

    #[test]
    fn blow_down_inverts_any_step(
        steps in prop::collection::vec((any::<bool>(), any::<u32>()), 1..8),
    ) {
        let state = build_history(&steps);
        let parent = build_history(&steps[..steps.len() - 1]);
        prop_assert_eq!(state.blow_down().unwrap(), parent);
    }
}
