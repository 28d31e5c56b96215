//! Product estimators against exact enumeration.

use ccm_core::cardinality::{block_capacities, log_ratio_degmixing, log_ratio_edges, log_ratio_mixing, JointDegreeSummary, DegreeSummary};
use ccm_core::{EnumerationTable, Graph, PropertySpec};

fn dyads(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

#[test]
fn edge_ratios_are_exact() {
    for n in 2..=7usize {
        let table = EnumerationTable::enumerate(n, &[PropertySpec::Edges], None).unwrap();
        let m = (n * (n - 1) / 2) as i64;
        for k in 0..m {
            let exact = table.log_ratio(&[k], &[k + 1]);
            let closed = log_ratio_edges(k as u64, k as u64 + 1, n as u64).unwrap();
            assert!((exact - closed).abs() < 1e-10, "n = {n}, k = {k}: {exact} vs {closed}");
        }
    }
}

#[test]
fn mixing_ratios_are_exact() {
    let labels = vec![0u32, 0, 1, 1, 1, 2];
    let spec = PropertySpec::Mixing { groups: 3 };
    let table = EnumerationTable::enumerate(6, std::slice::from_ref(&spec), Some(&labels)).unwrap();
    let capacities = block_capacities(&[2, 3, 1]);
    let mut checked = 0;
    for key in table.entries().keys() {
        for (block, &cap) in capacities.iter().enumerate() {
            let mut up = key.clone();
            up[block] += 1;
            if table.size(&up).is_none() {
                continue;
            }
            let exact = table.log_ratio(key, &up);
            let closed = log_ratio_mixing(key[block] as u64, 1, cap).unwrap();
            assert!((exact - closed).abs() < 1e-10, "{key:?} block {block}: {exact} vs {closed}");
            checked += 1;
        }
    }
    assert!(checked > 20);
}

/// The stub-matching estimate is approximate; at n = 7 its log-ratio error
/// over single toggles stays within a fixed envelope.
#[test]
fn degmixing_ratio_error_is_bounded() {
    let n = 7;
    let spec = PropertySpec::DegMixing { max_degree: 3 };
    let table = EnumerationTable::enumerate(n, std::slice::from_ref(&spec), None).unwrap();
    let pairs = dyads(n);
    let summary = |g: &Graph| {
        let jdm = spec.evaluate_counts(g).unwrap().iter().map(|&c| c as u64).collect();
        let degrees = DegreeSummary::of_graph(g);
        JointDegreeSummary::new(3, jdm, degrees).unwrap()
    };
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for mask in (0u32..1 << pairs.len()).step_by(7) {
        let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &d)| d);
        let mut g = Graph::from_edges(n, edges).unwrap();
        if g.max_degree() > 3 {
            continue;
        }
        let from = spec.evaluate_counts(&g).unwrap();
        let before = summary(&g);
        let (u, v) = pairs[mask as usize % pairs.len()];
        g.toggle_nodes(u, v).unwrap();
        if g.max_degree() > 3 {
            continue;
        }
        let to = spec.evaluate_counts(&g).unwrap();
        let estimate = log_ratio_degmixing(&before, &summary(&g));
        let exact = table.log_ratio(&from, &to);
        assert!(estimate.is_finite() && exact.is_finite());
        worst = worst.max((estimate - exact).abs());
        count += 1;
    }
    assert!(count > 1000);
    assert!(worst < 2.5, "max degmixing log-ratio error {worst}");
}

#[test]
fn enumeration_totals_cover_all_graphs() {
    for n in 2..=6usize {
        let table = EnumerationTable::enumerate(n, &[PropertySpec::DegreeDist { max_degree: 3 }], None).unwrap();
        let expected = num_bigint::BigUint::from(1u8) << (n * (n - 1) / 2);
        assert_eq!(table.total(), expected);
    }
}
