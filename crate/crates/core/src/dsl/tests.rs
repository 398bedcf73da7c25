use super::*;
use alloc::string::ToString;
use alloc::vec::Vec;

pub(crate) const TWO_STOCK: &str = include_str!("../../../feedscope/fixtures/twostock.sdm");
pub(crate) const ARMS_RACE: &str = include_str!("../../../feedscope/fixtures/armsrace.sdm");

fn edge_names(g: &Digraph) -> Vec<(&str, &str)> {
    g.edges.iter().map(|e| (g.name(e.src), g.name(e.dst))).collect()
}

#[test]
fn two_stock_model_parses() {
    let m = parse_model(TWO_STOCK).unwrap().model;
    assert_eq!(m.variables.len(), 4);
    assert_eq!(m.run_spec, RunSpec::new(1.0, 11.0, 1.0).unwrap());
    let g = dependency_graph(&m);
    assert_eq!(g.edges.len(), 6);
    let mut edges = edge_names(&g);
    edges.sort();
    let mut expected = alloc::vec![
        ("Stock_1", "Flow_1"),
        ("Stock_2", "Flow_1"),
        ("Stock_1", "Flow_2"),
        ("Stock_2", "Flow_2"),
        ("Flow_1", "Stock_1"),
        ("Flow_2", "Stock_2"),
    ];
    expected.sort();
    assert_eq!(edges, expected);
    assert!(validate(&m).is_empty());
}

#[test]
fn edge_order_follows_declaration_then_first_occurrence() {
    let m = parse_model(TWO_STOCK).unwrap().model;
    let g = dependency_graph(&m);
    assert_eq!(
        edge_names(&g),
        alloc::vec![
            ("Stock_2", "Flow_1"),
            ("Stock_1", "Flow_1"),
            ("Stock_1", "Flow_2"),
            ("Stock_2", "Flow_2"),
            ("Flow_1", "Stock_1"),
            ("Flow_2", "Stock_2"),
        ]
    );
    assert_eq!(g, dependency_graph(&m));
}

#[test]
fn lone_constant() {
    let m = parse_model("CONST c = 5").unwrap().model;
    assert_eq!(m.variables.len(), 1);
    assert!(dependency_graph(&m).edges.is_empty());
    assert_eq!(m.run_spec, RunSpec::default());
}

#[test]
fn unresolved_reference_is_reported() {
    let err = parse_model("FLOW f = g + 1").unwrap_err();
    assert_eq!(err.len(), 1);
    assert_eq!(err[0].message, "unresolved reference g");
    assert_eq!(err[0].span, Span::new(1, 10));
}

#[test]
fn duplicate_names_are_errors() {
    let err = parse_model("CONST a = 1\nAUX a = 2").unwrap_err();
    assert!(err[0].message.starts_with("duplicate name a"));
    assert_eq!(err[0].span.line, 2);
}

#[test]
fn unattached_flow_is_a_warning() {
    let p = parse_model("FLOW f = 1").unwrap();
    assert_eq!(p.warnings.len(), 1);
    assert_eq!(p.warnings[0].severity, Severity::Warning);
}

#[test]
fn stock_wiring_must_name_flows() {
    let err = parse_model("AUX a = 1\nSTOCK s = 0 { inflow: a }").unwrap_err();
    assert!(err[0].message.contains("not a FLOW"), "{}", err[0]);
    let err = parse_model("STOCK s = 0 { outflow: nothing }").unwrap_err();
    assert!(err[0].message.contains("unresolved reference nothing"));
}

#[test]
fn syntax_errors_are_located_and_recovered() {
    let err = parse_model("AUX a = (1 + \nAUX b = 1 1\nAUX c = 2").unwrap_err();
    assert_eq!(err.len(), 2);
    assert_eq!(err[0].span.line, 1);
    assert_eq!(err[1].span, Span::new(2, 11));
}

#[test]
fn keywords_cannot_name_variables() {
    let err = parse_model("AUX time = 1").unwrap_err();
    assert!(err[0].message.contains("reserved"));
}

#[test]
fn bad_run_spec() {
    let err = parse_model("SPEC START = 0 STOP = 1 DT = 0.3").unwrap_err();
    assert!(err[0].message.contains("whole number"));
    let err = parse_model("SPEC START = 2 STOP = 1 DT = 1").unwrap_err();
    assert!(err[0].message.contains("greater"));
}

#[test]
fn precedence_and_associativity() {
    let m = parse_model("AUX a = 1 - 2 - 3 * 4 / 5\nAUX b = -2 * 3").unwrap().model;
    assert_eq!(m.variables[0].expr.to_string(), "1 - 2 - 3 * 4 / 5");
    match &m.variables[0].expr.kind {
        ExprKind::Binary(BinOp::Sub, lhs, _) => {
            assert!(matches!(lhs.kind, ExprKind::Binary(BinOp::Sub, ..)))
        }
        other => panic!("unexpected {other:?}"),
    }
    match &m.variables[1].expr.kind {
        ExprKind::Binary(BinOp::Mul, lhs, _) => assert!(matches!(lhs.kind, ExprKind::Neg(_))),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn printing_round_trips() {
    let src = "SPEC START = 0 STOP = 10 DT = 0.25\n\
               CONST k = 0.5\n\
               AUX a = (1 - (2 - 3)) * -(k + 1)\n\
               AUX b = IF (a > 1) = (k < 2) THEN MIN(a, k, 3) ELSE ABS(-a)\n\
               AUX c = NOT (a AND b) OR (IF a THEN 1 ELSE 2) + TIME * DT\n\
               FLOW f = c / 2\n\
               STOCK s = k * 2 { inflow: f outflow: g }\n\
               FLOW g = s * 0.1";
    let m = parse_model(src).unwrap().model;
    let printed = m.to_string();
    let again = parse_model(&printed).unwrap().model;
    assert_eq!(m, again, "{printed}");
    assert_eq!(printed, again.to_string());
}

#[test]
fn algebraic_loop_names_every_member() {
    let m = parse_model("AUX a = b\nAUX b = a").unwrap().model;
    let d = validate(&m);
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].message, "algebraic loop: a, b");
    assert!(!every_cycle_has_stock(&m));
}

#[test]
fn self_reference_is_invalid() {
    let m = parse_model("AUX a = a + 1").unwrap().model;
    assert!(validate(&m)[0].message.contains("refers to itself"));
}

#[test]
fn constants_and_initial_values_are_restricted() {
    let m = parse_model("AUX a = 1\nCONST c = a").unwrap().model;
    assert!(validate(&m)[0].message.contains("only refer to constants"));
    let m = parse_model("STOCK s = t {}\nSTOCK t = s {}").unwrap().model;
    assert!(validate(&m)[0].message.starts_with("circular stock initial values"));
    let m = parse_model("AUX a = 1\nSTOCK s = a {}").unwrap().model;
    assert!(!validate(&m).is_empty());
}

#[test]
fn arms_race_is_valid() {
    let m = parse_model(ARMS_RACE).unwrap().model;
    assert!(validate(&m).is_empty());
    assert!(every_cycle_has_stock(&m));
    let g = dependency_graph(&m);
    for (stock, own) in [("A", "adjust_A"), ("B", "adjust_B"), ("C", "adjust_C")] {
        let s = g.node_index(stock).unwrap();
        let mut targets: Vec<&str> = g.edges.iter().filter(|e| e.src == s).map(|e| g.name(e.dst)).collect();
        targets.sort();
        let mut expected: Vec<&str> = ["target_A", "target_B", "target_C"]
            .into_iter()
            .filter(|t| !t.ends_with(stock))
            .collect();
        expected.push(own);
        expected.sort();
        assert_eq!(targets, expected);
    }
}

#[test]
fn single_stock_with_constant_inflow() {
    let m = parse_model("CONST r = 2\nFLOW f = r\nSTOCK s = 0 { inflow: f }")
        .unwrap()
        .model;
    let g = dependency_graph(&m);
    assert_eq!(edge_names(&g), alloc::vec![("r", "f"), ("f", "s")]);
}

mod props {
    use super::*;
    use alloc::format;
    use alloc::string::String;
    use proptest::prelude::*;

    fn leaf() -> impl Strategy<Value = String> {
        prop_oneof![
            (0u32..1000).prop_map(|n| format!("{n}")),
            (0u32..100).prop_map(|n| format!("{}.{}", n, n % 7)),
            prop_oneof![Just("x"), Just("y"), Just("DT"), Just("TIME")].prop_map(String::from),
        ]
    }

    fn expr_text() -> impl Strategy<Value = String> {
        leaf().prop_recursive(4, 32, 3, |inner| {
            prop_oneof![
                (
                    inner.clone(),
                    prop::sample::select(alloc::vec!["+", "-", "*", "/", "AND", "OR"]),
                    inner.clone()
                )
                    .prop_map(|(a, op, b)| format!("{a} {op} {b}")),
                (
                    inner.clone(),
                    prop::sample::select(alloc::vec!["<", ">=", "<>", "="]),
                    inner.clone()
                )
                    .prop_map(|(a, op, b)| format!("(({a}) {op} ({b}))")),
                inner.clone().prop_map(|a| format!("-({a})")),
                inner.clone().prop_map(|a| format!("NOT {a}")),
                (inner.clone(), inner.clone(), inner.clone())
                    .prop_map(|(c, t, e)| format!("(IF {c} THEN {t} ELSE {e})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("MAX({a}, {b})")),
                inner.prop_map(|a| format!("ABS(({a}))")),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_then_parse_is_identity(body in expr_text()) {
            let src = format!("CONST x = 1\nCONST y = 2\nAUX z = {body}");
            let m = parse_model(&src).unwrap().model;
            let again = parse_model(&m.to_string()).unwrap().model;
            prop_assert_eq!(&m, &again);
        }

        #[test]
        fn dependency_graph_is_pure(body in expr_text()) {
            let src = format!("CONST x = 1\nCONST y = 2\nFLOW z = {body}\nSTOCK s = 0 {{ inflow: z }}");
            let m = parse_model(&src).unwrap().model;
            prop_assert_eq!(dependency_graph(&m), dependency_graph(&m));
        }
    }
}
