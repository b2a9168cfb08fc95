use petgraph::algo::connected_components;
use petgraph::graph::UnGraph;
use proptest::prelude::*;

use henson_core::adversary::{ColorChaser, ConstantSet, Delayed, FiniteSet, GreedyCopier, Roster, Strategy as Adversary};
use henson_core::color::Color;
use henson_core::construction::{run, TargetCatalog};
use henson_core::folkman::partition_ramsey_check;
use henson_core::graph::{connect_order, is_connect_order, is_in_t_n, FiniteGraph};
use henson_core::graph6::{decode_graph6, encode_graph6};
use henson_core::presentation::Presentation;
use henson_core::trace::{coloring_from_text, coloring_to_text, Trace};
use henson_core::verify::{injury_bound_holds, injury_counts, verify_trace};

#[derive(Debug, Clone)]
enum Spec {
    Constant(Vec<usize>),
    Finite(Vec<usize>),
    Chaser(Color),
    Copier(Color, Option<usize>),
}

fn color() -> impl Strategy<Value = Color> {
    prop_oneof![Just(Color::Red), Just(Color::Blue)]
}

fn spec() -> impl Strategy<Value = (Spec, Option<usize>)> {
    let base = prop_oneof![
        prop::collection::vec(0usize..300, 0..12).prop_map(Spec::Constant),
        prop::collection::vec(0usize..300, 0..12).prop_map(Spec::Finite),
        color().prop_map(Spec::Chaser),
        (color(), prop::option::of(1usize..60)).prop_map(|(c, l)| Spec::Copier(c, l)),
    ];
    (base, prop::option::of(0usize..150))
}

fn roster(specs: &[(Spec, Option<usize>)]) -> Roster {
    let strategies = specs
        .iter()
        .map(|(s, wake)| {
            let base: Box<dyn Adversary> = match s {
                Spec::Constant(e) => Box::new(ConstantSet::new(e.clone())),
                Spec::Finite(e) => Box::new(FiniteSet::new(e.clone())),
                Spec::Chaser(c) => Box::new(ColorChaser::new(*c)),
                Spec::Copier(c, l) => Box::new(GreedyCopier::new(*c, *l)),
            };
            match wake {
                Some(w) => Box::new(Delayed::new(*w, base)) as Box<dyn Adversary>,
                None => base,
            }
        })
        .collect();
    Roster::from_strategies(3, strategies).unwrap()
}

fn arbitrary_graph(max: usize) -> impl Strategy<Value = FiniteGraph> {
    (0..=max).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2).prop_map(move |bits| {
            let mut k = 0;
            FiniteGraph::from_fn(n, |_, _| {
                k += 1;
                bits[k - 1]
            })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_rosters_verify(specs in prop::collection::vec(spec(), 0..5), stages in 0usize..400) {
        let r = roster(&specs);
        let out = run(3, &r, stages).unwrap();
        prop_assert_eq!(out.coloring.len(), stages + 1);
        let mut p = Presentation::new(3).unwrap();
        let report = verify_trace(&out.trace, &out.coloring, &mut p, &r);
        prop_assert!(report.all_passed(), "{}", report);
        prop_assert!(injury_bound_holds(&out.trace));
        for c in injury_counts(&out.trace) {
            prop_assert!(c.injuries <= c.stronger_acquisitions);
        }

        let text = out.trace.to_jsonl();
        prop_assert_eq!(Trace::from_jsonl(&text).unwrap(), out.trace.clone());
        let coloring = coloring_to_text(&out.coloring);
        prop_assert_eq!(coloring_from_text(&coloring).unwrap(), out.coloring.clone());
        let again = run(3, &roster(&specs), stages).unwrap();
        prop_assert_eq!(again.trace.to_jsonl(), text);
    }

    #[test]
    fn restrictions_stay_clique_free(n in 3usize..6, m in 0usize..120) {
        let mut p = Presentation::new(n).unwrap();
        prop_assert!(!p.restriction(m).contains_clique(n));
    }

    #[test]
    fn extensions_are_witnesses(
        n in 3usize..5,
        a in prop::collection::btree_set(0usize..12, 0..3),
        b in prop::collection::btree_set(0usize..12, 0..3),
        bound in 0usize..40,
    ) {
        let mut p = Presentation::new(n).unwrap();
        let a: Vec<usize> = a.into_iter().collect();
        let b: Vec<usize> = b.into_iter().filter(|v| !a.contains(v)).collect();
        p.ensure_stage(12);
        let a_has_clique = n == 3 && a.iter().any(|&u| a.iter().any(|&v| u < v && p.adjacent(u, v)))
            || n == 4 && a.len() == 3 && p.restriction(12).induced(&a).edge_count() == 3;
        prop_assume!(!a_has_clique);
        let x = p.find_extension(&a, &b, bound).unwrap();
        prop_assert!(x > bound && !a.contains(&x) && !b.contains(&x));
        for &v in &a {
            prop_assert!(p.adjacent(v, x));
        }
        for &v in &b {
            prop_assert!(!p.adjacent(v, x));
        }
    }

    #[test]
    fn graph6_round_trips(g in arbitrary_graph(70)) {
        prop_assert_eq!(decode_graph6(&encode_graph6(&g).unwrap()).unwrap(), g);
    }

    #[test]
    fn connectivity_matches_petgraph(g in arbitrary_graph(12)) {
        let mut pg = UnGraph::<(), ()>::with_capacity(g.vertex_count(), g.edge_count());
        let nodes: Vec<_> = (0..g.vertex_count()).map(|_| pg.add_node(())).collect();
        for (a, b) in g.edges() {
            pg.add_edge(nodes[a], nodes[b], ());
        }
        prop_assert_eq!(g.is_connected(), connected_components(&pg) <= 1);
        if g.is_connected() && !g.is_empty() {
            let order = connect_order(&g).unwrap();
            prop_assert!(is_connect_order(&g, &order));
            prop_assert!(is_connect_order(&g.permuted(&order), &(0..g.vertex_count()).collect::<Vec<_>>()));
        }
    }
}

#[test]
fn small_targets_obstruct_every_partition() {
    let mut catalog = TargetCatalog::new(3);
    for parts in 1..=3 {
        let g = catalog.graph(parts).unwrap().clone();
        assert!(g.vertex_count() <= 11);
        assert!(is_in_t_n(&g, 3));
        assert!(is_connect_order(&g, &(0..g.vertex_count()).collect::<Vec<_>>()));
        assert!(partition_ramsey_check(&g, 3, parts));
        if parts > 1 {
            assert!(!partition_ramsey_check(&g, 3, parts + 1));
        }
    }
}
