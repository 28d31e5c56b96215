//! Sampler behaviour: determinism, estimator equivalence, proposal ratios
//! and small exact chains.

use std::sync::Arc;

use ccm_core::sampler::{chain_seed, tnt_log_q_ratio, Chain, StepOutcome};
use ccm_core::{
    run, run_chains, CardinalityEstimator, CcmSpec, ClassDistribution, EnumerationTable, Graph,
    PropertySpec, SamplerConfig,
};

fn poisson_edges(n: usize, lambda: f64) -> CcmSpec {
    CcmSpec::new(n, vec![PropertySpec::Edges], vec![ClassDistribution::poisson(vec![lambda]).unwrap()], None).unwrap()
}

fn short(seed: u64) -> SamplerConfig {
    SamplerConfig {
        burnin: 2000,
        interval: 20,
        sample_size: 300,
        seed,
        ..Default::default()
    }
}

#[test]
fn same_seed_same_trace() {
    let spec = poisson_edges(20, 30.0);
    let a = run(&spec, &short(5)).unwrap();
    let b = run(&spec, &short(5)).unwrap();
    assert_eq!(a.stats, b.stats);
    assert_eq!(a.acceptance, b.acceptance);
    assert_eq!(a.final_state.fingerprint(), b.final_state.fingerprint());
    let c = run(&spec, &short(6)).unwrap();
    assert_ne!(a.stats, c.stats);
}

#[test]
fn first_chain_reproduces_a_single_run() {
    let spec = poisson_edges(20, 30.0);
    let chains = run_chains(&spec, &short(5), 3).unwrap();
    assert_eq!(chains.len(), 3);
    assert_eq!(chains[0].stats, run(&spec, &short(5)).unwrap().stats);
    assert_ne!(chains[1].stats, chains[2].stats);
    assert_eq!(chain_seed(5, 0), 5);
    assert_ne!(chain_seed(5, 1), chain_seed(5, 2));
}

#[test]
fn oracle_and_closed_form_give_the_same_chain() {
    let analytic = poisson_edges(5, 4.5);
    let table = EnumerationTable::enumerate(5, &[PropertySpec::Edges], None).unwrap();
    let oracle = analytic
        .clone()
        .with_cardinality(CardinalityEstimator::OracleTable(Arc::new(table)))
        .unwrap();
    let a = run(&analytic, &short(8)).unwrap();
    let b = run(&oracle, &short(8)).unwrap();
    assert_eq!(a.stats, b.stats);
}

#[test]
fn proposal_ratio_matches_pool_probabilities() {
    assert!((tnt_log_q_ratio(0, 6, true) - 3f64.ln()).abs() < 1e-12);
    assert!((tnt_log_q_ratio(2, 6, true) - (4.0f64 / 3.0).ln()).abs() < 1e-12);
    for dyads in [1u64, 6, 45] {
        for m in 0..dyads {
            let forward = tnt_log_q_ratio(m, dyads, true);
            let back = tnt_log_q_ratio(m + 1, dyads, false);
            assert!((forward + back).abs() < 1e-12, "m = {m}, M = {dyads}");
        }
    }
}

/// Two nodes, one dyad: the chain alternates between the empty and the
/// single-edge graph with exactly computable acceptance.
#[test]
fn single_dyad_chain_has_exact_occupancy() {
    let p1 = 0.3;
    let spec = CcmSpec::new(2, vec![PropertySpec::Edges], vec![ClassDistribution::non_parametric(vec![1.0 - p1, p1]).unwrap()], None).unwrap();
    let mut chain = Chain::new(&spec, Graph::empty(2).unwrap(), 17).unwrap();
    let steps = 400_000;
    let mut occupied = 0u64;
    for _ in 0..steps {
        match chain.step().unwrap() {
            StepOutcome::OutOfSupport => panic!("both states are supported"),
            StepOutcome::Accepted | StepOutcome::Rejected => {}
        }
        occupied += chain.graph().edge_count() as u64;
    }
    let freq = occupied as f64 / steps as f64;
    assert!((freq - p1).abs() < 0.01, "edge occupancy {freq}");
    chain.verify_cache().unwrap();
}

#[test]
fn degree_cap_moves_are_rejected_not_errors() {
    let spec = CcmSpec::new(
        12,
        vec![PropertySpec::DegreeDist { max_degree: 2 }],
        vec![ClassDistribution::dirmult(vec![1.0, 1.0, 1.0], 12).unwrap()],
        None,
    )
    .unwrap();
    let out = run(&spec, &short(3)).unwrap();
    assert!(out.acceptance.auto_rejected > 0);
    assert!(out.final_state.max_degree() <= 2);
    for row in &out.stats {
        assert_eq!(row.iter().sum::<f64>(), 12.0);
    }
}

#[test]
fn initial_graph_outside_support_is_reported() {
    let spec = CcmSpec::new(
        6,
        vec![PropertySpec::DegreeDist { max_degree: 1 }],
        vec![ClassDistribution::dirmult(vec![1.0, 1.0], 6).unwrap()],
        None,
    )
    .unwrap();
    let star = Graph::from_edges(6, [(0, 1), (0, 2)]).unwrap();
    let cfg = SamplerConfig {
        initial_graph: Some(star),
        use_initial: true,
        ..short(1)
    };
    let e = run(&spec, &cfg).unwrap_err();
    assert!(e.to_string().contains("degree"), "{e}");
}
