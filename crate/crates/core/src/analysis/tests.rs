use super::*;
use crate::discovery::{discover, DiscoverConfig, FoundAt, Provenance};
use crate::dsl::tests::{ARMS_RACE, TWO_STOCK};
use crate::dsl::{parse_model, Digraph, Edge, GraphNode};
use crate::scoring::score_all;
use crate::sim::{simulate, RunSpec};
use alloc::string::ToString;

struct Scored {
    model: Model,
    run: RunResult,
    series: LinkScoreSeries,
    catalog: LoopCatalog,
}

fn scored(src: &str) -> Scored {
    let model = parse_model(src).unwrap().model;
    let run = simulate(&model, &model.run_spec).unwrap();
    let series = score_all(&model, &run);
    let catalog = discover(&series, &DiscoverConfig::default()).catalog;
    Scored {
        model,
        run,
        series,
        catalog,
    }
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn record(cycle: &[&str]) -> LoopRecord {
    LoopRecord {
        cycle: names(cycle),
        discovery_score: 0.0,
        found_at: FoundAt::Static,
    }
}

#[test]
fn two_stock_loop_scores() {
    let s = scored(TWO_STOCK);
    let long = loop_score_series(&record(&["Flow_1", "Stock_1", "Flow_2", "Stock_2"]), &s.series).unwrap();
    assert!(long.iter().all(|&v| v == 0.0));

    let minor_1 = loop_score_series(&record(&["Flow_1", "Stock_1"]), &s.series).unwrap();
    // Flow_1 follows Stock_1 until Stock_2 passes 50 at step 6
    assert_eq!(minor_1, vec![0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let minor_2 = loop_score_series(&record(&["Flow_2", "Stock_2"]), &s.series).unwrap();
    assert_eq!(minor_2, vec![0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
}

#[test]
fn missing_edge_is_an_error() {
    let s = scored(TWO_STOCK);
    assert_eq!(
        loop_score_series(&record(&["Stock_1", "Stock_2"]), &s.series),
        Err(AnalysisError::MissingEdge {
            src: "Stock_1".into(),
            dst: "Stock_2".into()
        })
    );
}

#[test]
fn relative_scores_normalize() {
    let r = relative_scores(&[vec![0.0, 2.0, -1.0], vec![0.0, 2.0, 0.0], vec![0.0, -4.0, 0.0]]);
    assert_eq!(r[0], vec![0.0, 0.25, 1.0]);
    assert_eq!(r[1], vec![0.0, 0.25, 0.0]);
    assert_eq!(r[2], vec![0.0, 0.5, 0.0]);

    let huge = relative_scores(&[vec![1e300], vec![1e300]]);
    assert_eq!(huge, vec![vec![0.5], vec![0.5]]);
    assert!(relative_scores(&[]).is_empty());
}

#[test]
fn two_stock_ranking_drops_the_long_loop() {
    let s = scored(TWO_STOCK);
    let ranked = rank_and_filter(&s.catalog, &s.series, 0.001, None).unwrap();
    let cycles: Vec<&[String]> = ranked.iter().map(|p| p.record.cycle.as_slice()).collect();
    assert_eq!(
        cycles,
        vec![names(&["Flow_2", "Stock_2"]), names(&["Flow_1", "Stock_1"])]
    );
    assert!((ranked[0].avg_contribution - 0.7).abs() < 1e-12);
    assert!((ranked[1].avg_contribution - 0.3).abs() < 1e-12);

    let all = rank_and_filter(&s.catalog, &s.series, 0.0, None).unwrap();
    assert_eq!(all.len(), 3);
    assert_eq!(all[2].note, Some(NEVER_ACTIVE));
    assert_eq!(all[2].polarity, Polarity::Mixed);
    assert_eq!(rank_and_filter(&s.catalog, &s.series, 0.0, Some(1)).unwrap().len(), 1);
}

#[test]
fn arms_race_polarities() {
    let s = scored(ARMS_RACE);
    let profiles = profile_catalog(&s.catalog, &s.series).unwrap();
    assert_eq!(profiles.len(), 8);
    for p in &profiles {
        let expected = if p.record.len() == 2 {
            Polarity::Balancing
        } else {
            Polarity::Reinforcing
        };
        assert_eq!(p.polarity, expected, "{:?}", p.record.cycle);
        assert_eq!(p.note, None);
    }
}

#[test]
fn arms_race_steady_state_gains() {
    let s = scored(ARMS_RACE);
    let mut pairwise = Vec::new();
    let mut three_party = Vec::new();
    for r in s.catalog.records() {
        let gain = steady_state_gain(&s.model, &s.run, &r.cycle, 0).unwrap();
        match r.len() {
            2 => assert!((gain + 1.0).abs() < 1e-12),
            6 => pairwise.push(gain),
            9 => three_party.push(gain),
            _ => unreachable!(),
        }
    }
    pairwise.sort_by(f64::total_cmp);
    three_party.sort_by(f64::total_cmp);
    for (got, want) in pairwise.iter().zip([0.99, 0.99, 1.0]) {
        assert!((got - want).abs() < 1e-12, "{got}");
    }
    for (got, want) in three_party.iter().zip([0.81, 1.21]) {
        assert!((got - want).abs() < 1e-12, "{got}");
    }
    assert!(pairwise.iter().all(|&g| g <= 1.0 + 1e-12));
}

#[test]
fn steady_state_gain_needs_self_adjustment() {
    let s = scored(TWO_STOCK);
    // Flow_1 = Stock_1/DT: the stock feeds itself, adjustment rate -1
    let gain = steady_state_gain(&s.model, &s.run, &names(&["Flow_1", "Stock_1"]), 0).unwrap();
    assert_eq!(gain, -1.0);
    let m = parse_model("FLOW f = 1\nSTOCK s = 0 { inflow: f }\nAUX a = s")
        .unwrap()
        .model;
    let run = simulate(&m, &RunSpec::new(0.0, 2.0, 1.0).unwrap()).unwrap();
    assert_eq!(
        steady_state_gain(&m, &run, &names(&["f", "s"]), 0),
        Err(AnalysisError::NoSelfAdjustment("s".into()))
    );
}

#[test]
fn common_segments_wrap_around() {
    let four: Vec<String> = (0..22).map(|i| alloc::format!("v{i}")).collect();
    // drops two consecutive variables from the middle
    let eight: Vec<String> = four
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != 15 && *i != 16)
        .map(|(_, v)| v.clone())
        .collect();
    assert!((common_segment_ratio(&four, &eight) - 20.0 / 22.0).abs() < 1e-12);

    let rotated = names(&["c", "a", "b"]);
    assert_eq!(common_segment_ratio(&names(&["a", "b", "c"]), &rotated), 1.0);
    assert_eq!(common_segment_ratio(&names(&["a", "b"]), &names(&["x", "y"])), 0.0);
    assert_eq!(common_segment_ratio(&names(&["a"]), &names(&["a"])), 1.0);
}

fn static_series(nodes: &[&str], edges: &[(&str, &str, f64)]) -> LinkScoreSeries {
    let idx = |n: &str| nodes.iter().position(|m| *m == n).unwrap();
    let graph = Digraph {
        nodes: nodes
            .iter()
            .map(|n| GraphNode {
                name: n.to_string(),
                kind: VarKind::Stock,
            })
            .collect(),
        edges: edges
            .iter()
            .map(|e| Edge {
                src: idx(e.0),
                dst: idx(e.1),
            })
            .collect(),
    };
    let weights: Vec<f64> = edges.iter().map(|e| e.2).collect();
    LinkScoreSeries::constant(graph, &weights)
}

#[test]
fn comparing_catalogs() {
    let series = static_series(
        &["a", "b", "c", "d"],
        &[
            ("a", "b", 10.0),
            ("b", "c", 10.0),
            ("c", "a", 10.0),
            ("a", "d", 100.0),
            ("d", "c", 0.1),
            ("c", "b", 10.0),
        ],
    );
    let mut reference = LoopCatalog::new(Provenance::Exhaustive);
    for c in [&["a", "b", "c"][..], &["a", "d", "c"], &["b", "c"]] {
        reference.insert(c, 0.0, FoundAt::Static).unwrap();
    }
    let same = compare_catalogs(&reference, &reference, &series, 3, 0.6).unwrap();
    assert_eq!(same.intersection, 3);
    assert!(same.top.iter().all(|t| t.present));
    assert!(same.near_misses.is_empty());

    let mut heuristic = LoopCatalog::new(Provenance::StrongestPath);
    heuristic.insert(&["a", "d", "c"], 100.0, FoundAt::Static).unwrap();
    let report = compare_catalogs(&reference, &heuristic, &series, 1, 0.6).unwrap();
    assert_eq!(
        (report.reference_size, report.candidate_size, report.intersection),
        (3, 1, 1)
    );
    assert_eq!(report.top.len(), 1);
    assert_eq!(report.top[0].cycle, names(&["a", "b", "c"]));
    assert!(!report.top[0].present);
    // a-b-c and a-d-c share the segment "c a"; b-c shares only "c"
    assert_eq!(report.near_misses.len(), 1);
    assert_eq!(report.near_misses[0].missing, names(&["a", "b", "c"]));
    assert_eq!(report.near_misses[0].closest, names(&["a", "d", "c"]));
    assert!((report.near_misses[0].ratio - 2.0 / 3.0).abs() < 1e-12);
    let strict = compare_catalogs(&reference, &heuristic, &series, 1, 0.7).unwrap();
    assert!(strict.near_misses.is_empty());
}

#[test]
fn compare_rejects_foreign_loops() {
    let s = scored(TWO_STOCK);
    let mut other = LoopCatalog::new(Provenance::StrongestPath);
    other.insert(&["x", "y"], 1.0, FoundAt::Static).unwrap();
    assert!(compare_catalogs(&s.catalog, &other, &s.series, 5, 0.6).is_err());
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn relative_scores_sum_to_one_or_zero(
            scores in proptest::collection::vec(
                proptest::collection::vec(prop_oneof![Just(0.0), -1e6f64..1e6], 12),
                1..6,
            )
        ) {
            let r = relative_scores(&scores);
            for k in 0..12 {
                let sum: f64 = r.iter().map(|l| l[k]).sum();
                let active = scores.iter().any(|l| l[k] != 0.0);
                let expected = if active { 1.0 } else { 0.0 };
                prop_assert!((sum - expected).abs() <= 1e-12);
                prop_assert!(r.iter().all(|l| (0.0..=1.0).contains(&l[k])));
            }
        }

        #[test]
        fn polarity_follows_constant_edge_signs(signs in proptest::collection::vec(any::<bool>(), 1..6), mags in proptest::collection::vec(0.1f64..2.0, 6)) {
            let product: f64 = signs.iter().map(|&s| if s { 1.0 } else { -1.0 }).product();
            let series: Vec<f64> = mags.iter().map(|m| {
                signs.iter().map(|&s| if s { *m } else { -*m }).product()
            }).collect();
            let expected = if product > 0.0 { Polarity::Reinforcing } else { Polarity::Balancing };
            prop_assert_eq!(classify_polarity(&series), Some(expected));
        }
    }
}
