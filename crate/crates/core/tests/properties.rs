use isingcw_core::numeric::log_sum_exp;
use isingcw_core::partition::{CliqueProduct, PerCliqueMethod};
use isingcw_core::*;
use proptest::prelude::*;

fn model_strategy(max_n: usize, lo: f64, hi: f64) -> impl Strategy<Value = IsingModel> {
    (1..=max_n)
        .prop_flat_map(move |n| {
            let pairs = n * (n - 1) / 2;
            (
                Just(n),
                prop::collection::vec(lo..hi, n),
                prop::collection::vec(prop::option::weighted(0.5, lo..hi), pairs),
            )
        })
        .prop_map(|(n, thresholds, maybe)| {
            let mut edges = Vec::new();
            let mut idx = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if let Some(w) = maybe[idx] {
                        edges.push((i, j, w));
                    }
                    idx += 1;
                }
            }
            IsingModel::from_weighted_edges(n, thresholds, &edges).unwrap()
        })
}

fn spec_strategy(n: usize) -> impl Strategy<Value = InterventionSpec> {
    prop::collection::vec(prop::option::weighted(0.3, any::<bool>()), n).prop_map(|slots| {
        let mut spec = InterventionSpec::new();
        for (v, s) in slots.into_iter().enumerate() {
            if let Some(on) = s {
                spec.set(v, on);
            }
        }
        spec
    })
}

fn with_spec(max_n: usize) -> impl Strategy<Value = (IsingModel, InterventionSpec)> {
    model_strategy(max_n, -2.0, 2.0).prop_flat_map(|m| {
        let n = m.node_count();
        (Just(m), spec_strategy(n))
    })
}

fn brute_log_z(m: &IsingModel) -> f64 {
    let n = m.node_count();
    let lws: Vec<f64> = (0..1u64 << n).map(|mask| m.log_weight_mask(mask)).collect();
    log_sum_exp(&lws)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn maximal_cliques_cover_and_are_maximal(m in model_strategy(10, -1.0, 1.0)) {
        let g = m.graph();
        let cliques = g.maximal_cliques();
        let mut covered = vec![false; g.node_count()];
        for c in cliques.iter() {
            prop_assert!(g.is_clique(c));
            prop_assert!(c.windows(2).all(|w| w[0] < w[1]));
            for v in c {
                covered[*v] = true;
            }
            for outside in (0..g.node_count()).filter(|v| !c.contains(v)) {
                prop_assert!(!c.iter().all(|&u| g.has_edge(u, outside)), "clique {:?} extends by {}", c, outside);
            }
        }
        prop_assert!(covered.iter().all(|&c| c));
        for &(i, j) in g.edges() {
            prop_assert!(cliques.iter().any(|c| c.contains(&i) && c.contains(&j)));
        }
        let mut sorted = cliques.cliques().to_vec();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.as_slice(), cliques.cliques());
    }

    #[test]
    fn components_partition_remaining_nodes(m in model_strategy(10, -1.0, 1.0), picks in prop::collection::vec(any::<bool>(), 10)) {
        let g = m.graph();
        let removed: Vec<usize> = (0..g.node_count()).filter(|&v| picks[v]).collect();
        let comps = g.components_after_removal(&removed);
        let mut label = vec![usize::MAX; g.node_count()];
        for (c, comp) in comps.iter().enumerate() {
            for &v in comp {
                prop_assert!(!removed.contains(&v));
                prop_assert_eq!(label[v], usize::MAX);
                label[v] = c;
            }
        }
        prop_assert_eq!(label.iter().filter(|&&l| l == usize::MAX).count(), removed.len());
        for &(i, j) in g.edges() {
            if label[i] != usize::MAX && label[j] != usize::MAX {
                prop_assert_eq!(label[i], label[j]);
            }
        }
        prop_assert_eq!(g.is_cutset(&removed), comps.len() >= 2);
    }

    #[test]
    fn clique_potentials_factorize(m in model_strategy(9, -2.0, 2.0), mask in any::<u64>()) {
        let n = m.node_count();
        let x = Configuration::from_index(mask & ((1u64 << n) - 1), n);
        let asg = CliquePotentialAssignment::new(m.graph());
        let mut total = 0.0;
        for (c, nodes) in asg.cliques().iter().enumerate() {
            let xc: Vec<u8> = nodes.iter().map(|&v| x.get(v) as u8).collect();
            total += clique_log_weight(&m, &asg, c, &xc).unwrap();
        }
        prop_assert!((total - m.log_weight(&x).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn exact_matches_naive_sum(m in model_strategy(10, -2.0, 2.0)) {
        let z = exact_partition(&m, DEFAULT_CAP).unwrap().log_value;
        prop_assert!((z - brute_log_z(&m)).abs() < 1e-10);
    }

    #[test]
    fn engines_are_permutation_invariant(m in model_strategy(8, -2.0, 2.0), seed in any::<u64>()) {
        let n = m.node_count();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let p = m.relabel(&perm).unwrap();
        prop_assert!((exact_partition(&m, 25).unwrap().log_value - exact_partition(&p, 25).unwrap().log_value).abs() < 1e-10);
        prop_assert!((inner_approximation(&m).log_value - inner_approximation(&p).log_value).abs() < 1e-10);
        prop_assert!((pairwise_product(&m).log_value - pairwise_product(&p).log_value).abs() < 1e-10);
    }

    #[test]
    fn inner_is_a_lower_bound_for_attractive_models(m in model_strategy(10, 0.0, 2.0)) {
        let inner = inner_approximation(&m).log_value;
        let exact = exact_partition(&m, DEFAULT_CAP).unwrap().log_value;
        prop_assert!(inner <= exact + 1e-12);
        if m.weights().iter().any(|&w| w > 0.0) {
            prop_assert!(inner < exact);
        }
    }

    #[test]
    fn conditional_normalizer_matches_oracle((m, iv) in with_spec(10)) {
        let fast = conditional_normalizer(&m, &iv, Inference::exact()).unwrap().log_value;
        let slow = exact_conditional_partition(&m, &iv, DEFAULT_CAP).unwrap().log_value;
        prop_assert!((fast - slow).abs() < 1e-10);
    }

    #[test]
    fn exact_clique_product_is_exact_when_free_parts_are_disjoint((m, iv) in with_spec(8)) {
        let asg = CliquePotentialAssignment::new(m.graph());
        let free_of = |c: &Vec<usize>| c.iter().copied().filter(|&v| !iv.contains(v)).collect::<Vec<_>>();
        let free: Vec<Vec<usize>> = asg.cliques().iter().map(free_of).collect();
        let disjoint = free.iter().enumerate().all(|(a, fa)| free[a + 1..].iter().all(|fb| fa.iter().all(|v| !fb.contains(v))));
        prop_assume!(disjoint);
        let CliqueProduct { estimate, .. } =
            clique_product_partition(&m, &asg, &iv, PerCliqueMethod::Exact, ThetaOneRule::FreeEdges, 25).unwrap();
        let truth = exact_conditional_partition(&m, &iv, 25).unwrap().log_value;
        prop_assert!((estimate.log_value - truth).abs() < 1e-10);
    }

    #[test]
    fn homogeneous_cliques_are_exact_under_curie_weiss(
        k in 2usize..=12,
        theta0 in -2.0f64..2.0,
        theta1 in -2.0f64..2.0,
        clamp in prop::collection::vec(prop::option::weighted(0.3, any::<bool>()), 12),
    ) {
        let m = IsingModel::homogeneous(Graph::complete(k).unwrap(), theta0, theta1).unwrap();
        let mut iv = InterventionSpec::new();
        for (v, c) in clamp.iter().take(k).enumerate() {
            if let Some(on) = c {
                iv.set(v, *on);
            }
        }
        let cw = conditional_normalizer(&m, &iv, Inference::curie_weiss()).unwrap().log_value;
        let truth = exact_conditional_partition(&m, &iv, 25).unwrap().log_value;
        prop_assert!(rel_close(cw.exp(), truth.exp(), 1e-10));
    }

    #[test]
    fn markov_locality((m, iv) in with_spec(9)) {
        // free nodes with no free neighbours are independent of the rest
        let reduced = apply_intervention(&m, &iv).unwrap();
        let table = marginals(&m, &iv, Inference::exact()).unwrap();
        for (local, &v) in reduced.free.iter().enumerate() {
            if reduced.model.graph().degree(local) == 0 {
                let p = table.get(v).unwrap();
                let expected = 1.0 / (1.0 + (-reduced.model.threshold(local)).exp());
                prop_assert!((p - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn marginals_match_brute_force((m, iv) in with_spec(9)) {
        let n = m.node_count();
        let table = marginals(&m, &iv, Inference::exact()).unwrap();
        let consistent = |mask: u64| iv.iter().all(|(v, on)| (mask >> v & 1 == 1) == on);
        let mut z = 0.0;
        let mut on = vec![0.0; n];
        for mask in (0..1u64 << n).filter(|&mk| consistent(mk)) {
            let w = m.log_weight_mask(mask).exp();
            z += w;
            for (v, acc) in on.iter_mut().enumerate() {
                if mask >> v & 1 == 1 {
                    *acc += w;
                }
            }
        }
        prop_assert_eq!(table.entries.len(), n - iv.len());
        for &(v, p) in &table.entries {
            prop_assert!((p - on[v] / z).abs() < 1e-10);
        }
    }

    #[test]
    fn ranking_is_permutation_equivariant(m in model_strategy(7, -1.5, 1.5), value in any::<bool>()) {
        let n = m.node_count();
        let perm: Vec<usize> = (0..n).rev().collect();
        let p = m.relabel(&perm).unwrap();
        let a = rank_interventions(&m, value, ImpactMetric::L1MarginalShift, Inference::exact()).unwrap();
        let b = rank_interventions(&p, value, ImpactMetric::L1MarginalShift, Inference::exact()).unwrap();
        for (v, &pv) in perm.iter().enumerate() {
            let ia = a.impact_of(v).unwrap();
            let ib = b.impact_of(pv).unwrap();
            prop_assert!((ia - ib).abs() < 1e-10);
        }
    }
}

#[test]
fn relabel_direction() {
    // relabel sends node v to perm[v]
    let m = IsingModel::from_weighted_edges(3, vec![1.0, 2.0, 3.0], &[(0, 1, 0.5)]).unwrap();
    let p = m.relabel(&[2, 0, 1]).unwrap();
    assert_eq!(p.thresholds(), &[2.0, 3.0, 1.0]);
    assert_eq!(p.weight(2, 0), Some(0.5));
}

#[test]
fn star_center_ranks_first() {
    let g = Graph::new(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
    let m = IsingModel::homogeneous(g, -0.5, 1.0).unwrap();
    for metric in [ImpactMetric::L1MarginalShift, ImpactMetric::ExpectedSumShift] {
        for value in [false, true] {
            let r = rank_interventions(&m, value, metric, Inference::exact()).unwrap();
            assert_eq!(r.entries[0].node, 0, "{metric:?} value={value}");
        }
    }
}

#[test]
fn large_parameters_stay_finite() {
    let m = IsingModel::homogeneous(Graph::complete(10).unwrap(), 500.0, 500.0).unwrap();
    let exact = exact_partition(&m, 25).unwrap().log_value;
    let cw = curie_weiss_partition(&CurieWeissParams::clique(10, 500.0, 500.0)).log_value;
    assert!(exact.is_finite() && cw.is_finite());
    assert!(rel_close(exact, cw, 1e-12));
    let table = marginals(&m, &InterventionSpec::single(3, false), Inference::curie_weiss()).unwrap();
    assert!(table.entries.iter().all(|(_, p)| p.is_finite()));
    let neg = IsingModel::homogeneous(Graph::complete(10).unwrap(), -500.0, -500.0).unwrap();
    assert!(exact_partition(&neg, 25).unwrap().log_value.abs() < 1e-12);
}
