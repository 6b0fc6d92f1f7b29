mod common;

use common::{alpha, arb_graph, exact};
use proptest::prelude::*;
use struction::blowup::{cyclic_blow_up, BlowupConfig};
use struction::io::{format_graph, parse_graph_str};
use struction::reduce::{apply_simple, reduce, ReduceConfig, Rule};
use struction::solver::{components, local_search, solve, upper_bound, SolverConfig};
use struction::struction::StructionResult;
use struction::{apply_struction, brute_force_mwis, verify_lift, Graph, Preset, StructionVariant, TransformLog, VertexId};

#[derive(Debug, Clone)]
enum Op {
    AddVertex(u64),
    RemoveVertex(u32),
    AddEdge(u32, u32),
    RemoveEdge(u32, u32),
}

fn arb_op() -> impl Strategy<Value = Op> {
    prop_oneof![
        (1u64..10).prop_map(Op::AddVertex),
        (0u32..16).prop_map(Op::RemoveVertex),
        (0u32..16, 0u32..16).prop_map(|(a, b)| Op::AddEdge(a, b)),
        (0u32..16, 0u32..16).prop_map(|(a, b)| Op::RemoveEdge(a, b)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn oracles_agree(g in arb_graph(16, 50)) {
        let (a, witness) = brute_force_mwis(&g).unwrap();
        let (b, other) = exact(&g);
        prop_assert_eq!(a, b);
        prop_assert!(verify_lift(&g, &witness, a));
        prop_assert!(verify_lift(&g, &other, b));
    }

    #[test]
    fn graph_stays_consistent(ops in proptest::collection::vec(arb_op(), 0..60)) {
        let mut g = Graph::new(&[1, 2, 3]).unwrap();
        for op in ops {
            let _ = match op {
                Op::AddVertex(w) => { g.add_vertex(w); Ok(()) }
                Op::RemoveVertex(v) => g.remove_vertex(VertexId(v)),
                Op::AddEdge(a, b) => g.add_edge(VertexId(a), VertexId(b)),
                Op::RemoveEdge(a, b) => g.remove_edge(VertexId(a), VertexId(b)),
            };
            prop_assert_eq!(g.validate(), Ok(()));
        }
        for u in g.vertices() {
            for &x in g.neighbors(u) {
                prop_assert!(g.is_adjacent(x, u));
            }
        }
    }

    #[test]
    fn struction_identity(g in arb_graph(10, 9), variant_ix in 0usize..4) {
        let variant = StructionVariant::ALL[variant_ix];
        let a = alpha(&g);
        for v in g.active_vertices() {
            let mut h = g.clone();
            let mut log = TransformLog::new();
            let Ok(StructionResult::Applied(out)) = apply_struction(&mut h, v, variant, usize::MAX, &mut log) else {
                continue;
            };
            prop_assert_eq!(out.offset_delta, g.weight(v));
            prop_assert_eq!(h.validate(), Ok(()));
            let (b, sol) = exact(&h);
            prop_assert_eq!(a, b + log.offset(), "{} at {:?}", variant, v);
            let lifted = log.lift(&h, &sol).unwrap();
            prop_assert!(verify_lift(&g, &lifted, a));
        }
    }

    #[test]
    fn lifting_any_independent_set_stays_independent(g in arb_graph(9, 9), variant_ix in 0usize..4, seed in 0u64..100) {
        let variant = StructionVariant::ALL[variant_ix];
        for v in g.active_vertices() {
            let mut h = g.clone();
            let mut log = TransformLog::new();
            if !matches!(apply_struction(&mut h, v, variant, usize::MAX, &mut log), Ok(StructionResult::Applied(_))) {
                continue;
            }
            let (w, sol) = local_search(&h, 3, seed);
            let lifted = log.lift(&h, &sol).unwrap();
            prop_assert!(g.is_independent(&lifted));
            prop_assert!(g.set_weight_sum(&lifted) >= w + log.offset());
        }
    }

    #[test]
    fn simple_rules_are_safe(g in arb_graph(10, 9), rule_ix in 0usize..6) {
        let rule = Rule::SIMPLE[rule_ix];
        let a = alpha(&g);
        for v in g.active_vertices() {
            let mut h = g.clone();
            let mut log = TransformLog::new();
            if !apply_simple(rule, &mut h, &mut log, v).is_applied() {
                continue;
            }
            let (b, sol) = brute_force_mwis(&h).unwrap();
            prop_assert_eq!(a, b + log.offset(), "{} at {:?}", rule, v);
            prop_assert!(verify_lift(&g, &log.lift(&h, &sol).unwrap(), a));
        }
    }

    #[test]
    fn reduce_round_trip(g in arb_graph(14, 20)) {
        let a = alpha(&g);
        let k = reduce(g.clone(), &ReduceConfig::default());
        prop_assert_eq!(k.kernel.validate(), Ok(()));
        let (b, sol) = brute_force_mwis(&k.kernel).unwrap();
        prop_assert_eq!(a, b + k.offset);
        prop_assert!(verify_lift(&g, &k.lift(&sol).unwrap(), a));
        if k.stats.plateau_budget_left > 0 {
            prop_assert_eq!(struction::reduce::find_applicable(&k.kernel, &ReduceConfig::default()), None);
        }
    }

    #[test]
    fn cyclic_round_trip(g in arb_graph(14, 20), strong in any::<bool>()) {
        let a = alpha(&g);
        let cfg = if strong { BlowupConfig::new(64, 2048, 512) } else { BlowupConfig::new(25, 512, 64) };
        let r = cyclic_blow_up(g.clone(), &cfg);
        let k = &r.kernel;
        prop_assert!(k.kernel.num_vertices() <= r.stats.initial_kernel_n);
        let plain = reduce(g.clone(), &cfg.reduce);
        prop_assert_eq!(r.stats.initial_kernel_n, plain.kernel.num_vertices());
        prop_assert_eq!(k.log.offset(), k.offset);
        let (b, sol) = brute_force_mwis(&k.kernel).unwrap();
        prop_assert_eq!(a, b + k.offset);
        prop_assert!(verify_lift(&g, &k.lift(&sol).unwrap(), a));
    }

    #[test]
    fn degree_two_graphs_vanish(weights in proptest::collection::vec(1u64..200, 1..40), cycle in any::<bool>()) {
        let n = weights.len() as u32;
        let mut edges: Vec<(u32, u32)> = (1..n).map(|i| (i - 1, i)).collect();
        if cycle && n >= 3 {
            edges.push((n - 1, 0));
        }
        let g = Graph::from_edges(&weights, &edges);
        let k = reduce(g.clone(), &ReduceConfig::default());
        prop_assert!(k.kernel.is_empty());
        let sol = k.lift(&[]).unwrap();
        prop_assert!(verify_lift(&g, &sol, k.offset));
    }

    #[test]
    fn solve_matches_oracle(g in arb_graph(16, 200), preset_ix in 0usize..3) {
        let cfg = SolverConfig::with_preset(Preset::ALL[preset_ix]);
        let r = solve(&g, &cfg).unwrap();
        prop_assert_eq!(r.weight, alpha(&g));
        prop_assert!(verify_lift(&g, &r.solution, r.weight));
    }

    #[test]
    fn bounds_sandwich(g in arb_graph(14, 50), seed in any::<u64>()) {
        let a = alpha(&g);
        let (lw, ls) = local_search(&g, 20, seed);
        prop_assert!(verify_lift(&g, &ls, lw));
        prop_assert!(lw <= a);
        prop_assert!(a <= upper_bound(&g));
    }

    #[test]
    fn components_add_up(g in arb_graph(14, 30)) {
        let comps = components(&g);
        let total: u64 = comps.iter().map(|c| alpha(&c.graph)).sum();
        prop_assert_eq!(total, alpha(&g));
        let covered: usize = comps.iter().map(|c| c.graph.num_vertices()).sum();
        prop_assert_eq!(covered, g.num_vertices());
    }

    #[test]
    fn log_codec_round_trip(g in arb_graph(12, 20)) {
        let r = cyclic_blow_up(g, &BlowupConfig::new(5, 64, 64));
        let mut buf = Vec::new();
        r.kernel.log.write_to(&mut buf).unwrap();
        let back = TransformLog::read_from(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(back, r.kernel.log);
    }

    #[test]
    fn metis_round_trip(g in arb_graph(12, 1000)) {
        let (text, _) = format_graph(&g);
        let back: Graph = parse_graph_str(&text).unwrap();
        prop_assert_eq!(back, g);
    }
}
