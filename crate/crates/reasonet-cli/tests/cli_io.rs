//! I/O-layer tests: spec round-trips, dataset ingestion, DOT rendering and
//! the CLI exit-code contract.

use std::process::Command;

use reasonet_cli::dataset::load_dataset_csv;
use reasonet_cli::dot::emit_dot;
use reasonet_cli::spec::{build_network, load_spec, network_to_doc, save_spec};
use reasonet_core::hln::{empirical_means, BooleanStatistic};
use reasonet_core::logic::formula_tensor;
use reasonet_core::{Connective, Expression, Tensor, TensorNetwork, Variable};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_reasonet"))
}

fn var(name: &str, dim: usize) -> Variable {
    Variable::new(name, dim)
}

const FIXTURE_SPEC: &str = r#"{
  "variables": {"A": 2, "B": 3},
  "cores": {
    "f0": {"expression": ["and", ["or", "X_0", "X_1"], ["not", "X_2"]]},
    "id": {"dense": {"colors": ["A", "A2"], "shape": [2, 2], "values": [1, 0, 0, 1]}},
    "sp": {"sparse": {"colors": ["A", "B"], "shape": [2, 3],
            "terms": [{"value": 2.0, "position": {"A": 1, "B": 0}},
                      {"value": 0.5, "position": {"B": 2}}]}},
    "ev": {"evidence": {"atom": "X_0", "truth": true}}
  }
}"#;

#[test]
fn spec_round_trip_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("fixture.json");
    let p2 = dir.path().join("resaved.json");
    std::fs::write(&p1, FIXTURE_SPEC).unwrap();
    let (net1, _) = load_spec(&p1).unwrap();
    save_spec(&net1, &p2).unwrap();
    let (net2, _) = load_spec(&p2).unwrap();
    assert_eq!(net1.len(), net2.len());
    for (name, core) in net1.iter() {
        let other = net2.core(name).expect("core survives the round trip");
        assert_eq!(
            core.dense_coords(),
            other.dense_coords(),
            "core '{name}' changed across save/load"
        );
    }
}

#[test]
fn dense_identity_core_loads_as_delta() {
    let doc = serde_json::from_str(FIXTURE_SPEC).unwrap();
    let (net, _) = build_network(&doc).unwrap();
    let id = net.core("id").unwrap();
    let delta = Tensor::delta(vec![var("A", 2), var("A2", 2)]).unwrap();
    assert_eq!(id.dense_coords(), delta.dense_coords());
}

#[test]
fn sparse_core_equals_its_dense_sum() {
    let doc = serde_json::from_str(FIXTURE_SPEC).unwrap();
    let (net, _) = build_network(&doc).unwrap();
    let sp = net.core("sp").unwrap();
    // 2·e_1⊗e_0 plus 0.5·(broadcast over A)⊗e_2, row-major over (A, B).
    assert_eq!(sp.dense_coords(), vec![0.0, 0.0, 0.5, 2.0, 0.0, 0.5]);
}

#[test]
fn sparse_model_enumeration_matches_the_formula_tensor() {
    // The three models of (X_0 ∨ X_1) ∧ ¬X_2 as elementary one-hot terms sum
    // to the dense formula tensor.
    let spec = r#"{
      "cores": {"cp": {"sparse": {"colors": ["X_0", "X_1", "X_2"], "shape": [2, 2, 2],
        "terms": [{"value": 1, "position": {"X_0": 1, "X_1": 0, "X_2": 0}},
                  {"value": 1, "position": {"X_0": 0, "X_1": 1, "X_2": 0}},
                  {"value": 1, "position": {"X_0": 1, "X_1": 1, "X_2": 0}}]}}}
    }"#;
    let doc = serde_json::from_str(spec).unwrap();
    let (net, _) = build_network(&doc).unwrap();
    let f = Expression::apply(
        Connective::And,
        vec![
            Expression::apply(
                Connective::Or,
                vec![Expression::atom("X_0"), Expression::atom("X_1")],
            )
            .unwrap(),
            Expression::not(Expression::atom("X_2")),
        ],
    )
    .unwrap();
    let dense = formula_tensor(&f).unwrap();
    assert_eq!(net.core("cp").unwrap().dense_coords(), dense.dense_coords());
}

#[test]
fn expression_atoms_auto_declare_at_dim_two() {
    let doc = serde_json::from_str(r#"{"cores": {"f": {"expression": ["not", "Q"]}}}"#).unwrap();
    let (net, _) = build_network(&doc).unwrap();
    assert_eq!(net.variable("Q").unwrap().dim(), 2);
}

#[test]
fn conflicting_core_dimension_is_rejected() {
    let doc = serde_json::from_str(
        r#"{"variables": {"A": 3},
            "cores": {"d": {"dense": {"colors": ["A"], "shape": [2], "values": [1, 0]}}}}"#,
    )
    .unwrap();
    let err = build_network(&doc).unwrap_err();
    assert_eq!(err.code, 65, "dimension conflict is a parse error");
}

#[test]
fn dataset_columns_bind_by_header_name() {
    let dir = tempfile::tempdir().unwrap();
    let straight = dir.path().join("a.csv");
    let shuffled = dir.path().join("b.csv");
    std::fs::write(&straight, "A1,A2,F\n1,0,1\n0,1,0\n1,0,0\n").unwrap();
    std::fs::write(&shuffled, "F,A1,A2\n1,1,0\n0,0,1\n0,1,0\n").unwrap();
    let t = BooleanStatistic::new(vec![
        (
            "f0".into(),
            Expression::apply(
                Connective::Xor,
                vec![Expression::atom("A1"), Expression::atom("A2")],
            )
            .unwrap(),
        ),
        (
            "f1".into(),
            Expression::apply(
                Connective::Implies,
                vec![Expression::atom("F"), Expression::atom("A1")],
            )
            .unwrap(),
        ),
    ])
    .unwrap();
    let mu1 = empirical_means(&t, &load_dataset_csv(&straight).unwrap()).unwrap();
    let mu2 = empirical_means(&t, &load_dataset_csv(&shuffled).unwrap()).unwrap();
    assert_eq!(mu1, mu2, "column order must not matter");
}

#[test]
fn empty_dataset_body_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("empty.csv");
    std::fs::write(&p, "A1,A2\n").unwrap();
    assert_eq!(load_dataset_csv(&p).unwrap_err().code, 65);
}

#[test]
fn non_binary_dataset_cell_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    std::fs::write(&p, "A1,A2\n1,2\n").unwrap();
    assert_eq!(load_dataset_csv(&p).unwrap_err().code, 65);
}

#[test]
fn dot_renders_the_bipartite_factor_graph() {
    let core = Tensor::ones(vec![var("X", 2), var("Y", 2)]);
    let net = TensorNetwork::from_cores([("c", core)]).unwrap();
    let dot = emit_dot(&net);
    assert_eq!(dot.matches("shape=box").count(), 1);
    assert_eq!(dot.matches("shape=ellipse").count(), 2);
    assert_eq!(dot.matches(" -- ").count(), 2);

    let empty = emit_dot(&TensorNetwork::new());
    assert_eq!(empty, "graph factor {\n}\n");

    // The student network: 3 core nodes, 5 variable nodes.
    let e0 = Tensor::ones(vec![var("G", 2), var("D", 2), var("I", 2)]);
    let e1 = Tensor::ones(vec![var("I", 2), var("S", 2)]);
    let e2 = Tensor::ones(vec![var("L", 2), var("G", 2)]);
    let student = TensorNetwork::from_cores([("e0", e0), ("e1", e1), ("e2", e2)]).unwrap();
    let dot = emit_dot(&student);
    assert_eq!(dot.matches("shape=box").count(), 3);
    assert_eq!(dot.matches("shape=ellipse").count(), 5);
    assert_eq!(dot.matches(" -- ").count(), 7);
}

#[test]
fn entail_exit_codes_follow_the_answer() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("f0.json");
    std::fs::write(
        &spec,
        r#"{"cores": {"f0": {"expression": ["and", ["or", "X_0", "X_1"], ["not", "X_2"]]}}}"#,
    )
    .unwrap();
    let yes = bin()
        .args(["entail", "--spec"])
        .arg(&spec)
        .args(["--query", r#"["or", "X_0", "X_1"]"#])
        .output()
        .unwrap();
    assert_eq!(yes.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&yes.stdout).trim(), "yes");

    let no = bin()
        .args(["entail", "--spec"])
        .arg(&spec)
        .args(["--query", "X_0"])
        .output()
        .unwrap();
    assert_eq!(no.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&no.stdout).trim(), "no");
}

#[test]
fn usage_and_parse_errors_use_sysexits_codes() {
    let usage = bin().args(["entail", "--no-such-flag"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(64));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let parse = bin().args(["count-models", "--spec"]).arg(&bad).output().unwrap();
    assert_eq!(parse.status.code(), Some(65));
}

#[test]
fn inconsistent_sudoku_board_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let board = dir.path().join("bad.board");
    std::fs::write(&board, "1 1 . .\n. . . .\n. . . .\n. . . .\n").unwrap();
    let out = bin()
        .args(["solve-sudoku", "--n", "2", "--board"])
        .arg(&board)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "duplicate givens must exit 2: {out:?}");
}

#[test]
fn underdetermined_sudoku_board_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let board = dir.path().join("open.board");
    std::fs::write(&board, ". . . .\n. . . .\n. . . .\n. . . .\n").unwrap();
    let out = bin()
        .args(["solve-sudoku", "--n", "2", "--board"])
        .arg(&board)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().all(|l| l.split(' ').all(|t| t == ".")), "board stays open");
}

#[test]
fn contract_writes_a_tensor_document() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("net.json");
    let out_path = dir.path().join("result.json");
    std::fs::write(
        &spec,
        r#"{"cores": {
          "a": {"dense": {"colors": ["X", "Y"], "shape": [2, 2], "values": [1, 2, 3, 4]}},
          "b": {"dense": {"colors": ["Y"], "shape": [2], "values": [1, 1]}}}}"#,
    )
    .unwrap();
    let out = bin()
        .args(["contract", "--spec"])
        .arg(&spec)
        .args(["--open", "X", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["colors"], serde_json::json!(["X"]));
    assert_eq!(doc["values"], serde_json::json!([3.0, 7.0]));
}

#[test]
fn cli_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("net.json");
    std::fs::write(
        &spec,
        r#"{"cores": {
          "e0": {"dense": {"colors": ["G", "D"], "shape": [2, 2], "values": [0.3, 0.7, 0.6, 0.4]}},
          "e1": {"dense": {"colors": ["D", "S"], "shape": [2, 2], "values": [0.1, 0.9, 0.5, 0.5]}}}}"#,
    )
    .unwrap();
    let run = || {
        bin()
            .args(["propagate", "--spec"])
            .arg(&spec)
            .args(["--mode", "tree", "--marginals", "e0,e1"])
            .output()
            .unwrap()
    };
    let first = run();
    let second = run();
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout, "identical inputs, identical stdout");
}

#[test]
fn saved_specs_resave_identically() {
    // load(save(load(x))) = load(x), comparing at the document level.
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("fixture.json");
    let p2 = dir.path().join("once.json");
    let p3 = dir.path().join("twice.json");
    std::fs::write(&p1, FIXTURE_SPEC).unwrap();
    let (net1, _) = load_spec(&p1).unwrap();
    save_spec(&net1, &p2).unwrap();
    let (net2, _) = load_spec(&p2).unwrap();
    save_spec(&net2, &p3).unwrap();
    assert_eq!(
        std::fs::read_to_string(&p2).unwrap(),
        std::fs::read_to_string(&p3).unwrap(),
        "resaving a saved spec must be byte-identical"
    );
    let d1 = serde_json::to_string(&network_to_doc(&net1)).unwrap();
    let d2 = serde_json::to_string(&network_to_doc(&net2)).unwrap();
    assert_eq!(d1, d2);
}
