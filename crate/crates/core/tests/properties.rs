use std::collections::BTreeSet;
use std::time::Duration;

use bmcp::greedy::greedy_construct;
use bmcp::instgen::{gen_grouped_traced, gen_uniform, generate, GenParams};
use bmcp::vdls::{BranchPick, BranchPool, InitStrategy, Termination, TreeSearch};
use bmcp::{evaluate, exact_opt, run_vdls, Instance, NeighbourGraph, SearchConfig, Solution};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(max_n: usize, max_m: usize) -> impl Strategy<Value = Instance> {
    (1..=max_n, 1..=max_m).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(0i64..20, n),
            prop::collection::vec(0i64..20, m),
            prop::collection::vec(prop::collection::btree_set(0..m, 0..=m), n),
            0u32..=100,
        )
            .prop_map(|(c, w, cov, pct)| {
                let total: i64 = c.iter().sum();
                let budget = total * pct as i64 / 100;
                Instance::new(budget, c, w, cov.into_iter().map(|s| s.into_iter().collect()).collect())
                    .unwrap()
            })
    })
}

fn search_config(depth: usize, width: usize, seed: u64) -> SearchConfig {
    SearchConfig {
        max_depth: depth,
        max_width: width,
        cutoff: Duration::from_secs(5),
        seed,
        ..SearchConfig::default()
    }
}

fn pairwise_gamma(inst: &Instance) -> Vec<Vec<usize>> {
    (0..inst.n())
        .map(|i| {
            let a: BTreeSet<_> = inst.cover(i).iter().collect();
            (0..inst.n())
                .filter(|&p| p != i && inst.cover(p).iter().any(|j| a.contains(j)))
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn incremental_matches_scratch(
        inst in instance(20, 20),
        flips in prop::collection::vec(any::<prop::sample::Index>(), 0..1000),
    ) {
        let mut sol = Solution::empty(&inst);
        for ix in flips {
            let i = ix.index(inst.n());
            let before = sol.weight();
            let adding = !sol.contains(i);
            sol.flip(&inst, i);
            if adding {
                prop_assert!(sol.weight() >= before);
            } else {
                prop_assert!(sol.weight() <= before);
            }
        }
        prop_assert_eq!((sol.weight(), sol.cost()), evaluate(&inst, &sol.items()));
    }

    #[test]
    fn gamma_matches_pairwise(inst in instance(50, 30)) {
        let graph = NeighbourGraph::build(&inst);
        let expected = pairwise_gamma(&inst);
        for i in 0..inst.n() {
            prop_assert_eq!(graph.neighbours(i), expected[i].as_slice());
            prop_assert!(!graph.neighbours(i).contains(&i));
            for &p in graph.neighbours(i) {
                prop_assert!(graph.neighbours(p).contains(&i));
            }
        }
    }

    #[test]
    fn tree_search_bounds_and_restores(
        inst in instance(12, 12),
        depth in 1usize..5,
        width in 1usize..5,
        pool_all in any::<bool>(),
        random_pick in any::<bool>(),
        seed in any::<u64>(),
        members in prop::collection::vec(any::<bool>(), 12),
    ) {
        let mut cfg = search_config(depth, width, seed);
        if pool_all {
            cfg.branch_pool = BranchPool::AllItems;
        }
        if random_pick {
            cfg.branch_pick = BranchPick::RandomK;
        }
        let graph = NeighbourGraph::build(&inst);
        let mut start = Solution::empty(&inst);
        for i in 0..inst.n() {
            if members[i] && start.flip_feasible(&inst, i) {
                start.flip(&inst, i);
            }
        }
        let limit: u64 = (0..=depth as u32).map(|l| (width as u64).pow(l)).sum();
        for root in (0..inst.n()).filter(|&r| start.flip_feasible(&inst, r)) {
            let mut tree = TreeSearch::new(&inst, &graph, &cfg, ChaCha8Rng::seed_from_u64(seed));
            let mut sol = start.clone();
            let found = tree.search_from_root(&mut sol, start.weight(), root);
            prop_assert!(tree.nodes_expanded() <= limit);
            if found {
                let (w, c) = evaluate(&inst, &sol.items());
                prop_assert!(w > start.weight());
                prop_assert_eq!((w, c), (sol.weight(), sol.cost()));
                prop_assert!(c <= inst.budget());
            } else {
                prop_assert_eq!(&sol, &start);
            }
        }
    }

    #[test]
    fn runs_are_feasible_improving_and_deterministic(
        inst in instance(12, 12),
        seed in any::<u64>(),
        init in prop::sample::select(vec![InitStrategy::Greedy, InitStrategy::Empty, InitStrategy::Random]),
        random_pick in any::<bool>(),
    ) {
        let mut cfg = SearchConfig { init, ..search_config(8, 7, seed) };
        if random_pick {
            cfg.branch_pick = BranchPick::RandomK;
        }
        let graph = NeighbourGraph::build(&inst);
        let (sol, report) = run_vdls(&inst, &graph, &cfg);
        let (w, c) = evaluate(&inst, &sol.items());
        prop_assert_eq!((w, c), (report.best_weight, report.best_cost));
        prop_assert!(c <= inst.budget());
        prop_assert!(w >= report.initial_weight);
        prop_assert_eq!(report.terminated_by, Termination::Stagnation);

        let (again, second) = run_vdls(&inst, &graph, &cfg);
        prop_assert_eq!(sol, again);
        prop_assert_eq!(
            (report.best_weight, report.best_cost, report.initial_weight, report.root_iterations, report.improvements, report.nodes_expanded),
            (second.best_weight, second.best_cost, second.initial_weight, second.root_iterations, second.improvements, second.nodes_expanded)
        );
    }

    #[test]
    fn depth_two_full_width_has_no_improving_pair_left(inst in instance(10, 10), seed in any::<u64>()) {
        let cfg = SearchConfig {
            branch_pool: BranchPool::AllItems,
            ..search_config(2, inst.n(), seed)
        };
        let graph = NeighbourGraph::build(&inst);
        let (sol, report) = run_vdls(&inst, &graph, &cfg);
        prop_assert_eq!(report.terminated_by, Termination::Stagnation);
        for r in 0..inst.n() {
            if !sol.flip_feasible(&inst, r) {
                continue;
            }
            let one = sol.flipped(&inst, r);
            prop_assert!(one.weight() <= sol.weight(), "single flip {} improves", r);
            for a in (0..inst.n()).filter(|&a| a != r && one.flip_feasible(&inst, a)) {
                let two = one.flipped(&inst, a);
                prop_assert!(two.weight() <= sol.weight(), "pair {} {} improves", r, a);
            }
        }
    }

    #[test]
    fn oracle_dominates_heuristics(inst in instance(12, 12), seed in any::<u64>()) {
        let opt = exact_opt(&inst, u64::MAX);
        prop_assert!(opt.exact);
        let greedy = greedy_construct(&inst);
        prop_assert!(greedy.weight() >= 0);
        prop_assert!(opt.weight >= greedy.weight());
        let floor = (1.0 - (-1.0f64).exp()) / 2.0 * opt.weight as f64;
        prop_assert!(greedy.weight() as f64 >= floor - 1e-9);
        let graph = NeighbourGraph::build(&inst);
        let (sol, _) = run_vdls(&inst, &graph, &search_config(8, 7, seed));
        prop_assert!(opt.weight >= sol.weight());
    }
}

#[test]
fn generators_are_deterministic_and_round_trip() {
    for p in [
        GenParams::uniform(60, 80, 0.1, 500, 3),
        GenParams {
            groups: 5,
            ..GenParams::grouped(60, 80, 0.3, 500, 3)
        },
    ] {
        let a = generate(&p).unwrap();
        assert_eq!(a, generate(&p).unwrap());
        assert_ne!(a, generate(&GenParams { seed: 4, ..p.clone() }).unwrap());
        assert_eq!(Instance::parse_text(&a.to_text()).unwrap(), a);
        let json = serde_json::to_string(&a.to_file()).unwrap();
        assert_eq!(Instance::from_json(&json).unwrap(), a);
    }
}

#[test]
fn uniform_edge_count_matches_occupancy() {
    let p = GenParams::uniform(400, 500, 0.08, 1000, 11);
    let inst = gen_uniform(&p).unwrap();
    let cells = (p.n * p.m) as f64;
    let expected = cells * (1.0 - (-p.density).exp());
    let got = inst.edge_count() as f64;
    assert!((got - expected).abs() <= 0.05 * expected, "{got} vs {expected}");
}

#[test]
fn single_repeat_grouped_is_block_diagonal() {
    let p = GenParams {
        groups: 7,
        repeats: 1,
        ..GenParams::grouped(100, 90, 0.4, 1000, 5)
    };
    let (inst, draws) = gen_grouped_traced(&p).unwrap();
    let mut item_group = vec![None; p.n];
    let mut element_group = vec![None; p.m];
    for d in &draws {
        assert_eq!(*item_group[d.item].get_or_insert(d.group), d.group);
        assert_eq!(*element_group[d.element].get_or_insert(d.group), d.group);
    }
    let drawn: BTreeSet<_> = draws.iter().map(|d| (d.item, d.element)).collect();
    for i in 0..inst.n() {
        for &j in inst.cover(i) {
            assert!(drawn.contains(&(i, j)));
            assert_eq!(item_group[i], element_group[j]);
        }
    }
}
