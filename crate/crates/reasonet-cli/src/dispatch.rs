//! The `reasonet` command-line surface: spec-driven contraction, model
//! counting, entailment, propagation, Sudoku solving, training and
//! entailment over hybrid networks, and DOT rendering.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::Value;

use reasonet_core::hln::{
    amm_train, empirical_means, probabilistic_entails, BooleanStatistic, HybridParams,
};
use reasonet_core::logic::{build_sudoku_network, formula_tensor_over, sudoku_atoms, COUNT_INT_TOL, ENTAILMENT_TOL};
use reasonet_core::propagation::{
    constraint_propagation, deduce_atoms, directed_bp, directed_outputs, local_marginal,
    tree_bp, Deduction, DirectedNetwork, PropagationResult,
};
use reasonet_core::tensor::Tensor;
use reasonet_core::{Error, Expression, TensorNetwork, Variable};

use crate::board::{parse_board, render_board};
use crate::dataset::load_dataset_csv;
use crate::dot::emit_dot;
use crate::error::{CliError, EXIT_USAGE};
use crate::spec::{load_spec_doc, parse_expression, save_tensor, tensor_to_value, Roles};

#[derive(Parser)]
#[command(name = "reasonet", about = "Tensor-network reasoning engine", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Contract a network onto open variables.
    Contract {
        /// Network spec (JSON).
        #[arg(long)]
        spec: PathBuf,
        /// Comma-separated open variable names (may be empty).
        #[arg(long, default_value = "")]
        open: String,
        /// Write the resulting tensor document here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count the models of a boolean network.
    CountModels {
        /// Network spec (JSON).
        #[arg(long)]
        spec: PathBuf,
    },
    /// Decide whether a network entails a query formula.
    Entail {
        /// Network spec (JSON).
        #[arg(long)]
        spec: PathBuf,
        /// Query as a nested-list expression or a bare atom.
        #[arg(long)]
        query: String,
    },
    /// Run message passing over a network.
    Propagate {
        /// Network spec (JSON).
        #[arg(long)]
        spec: PathBuf,
        /// Propagation mode.
        #[arg(long, value_parser = ["tree", "directed", "constraint"])]
        mode: String,
        /// Comma-separated core names whose local marginals to print
        /// (tree mode).
        #[arg(long)]
        marginals: Option<String>,
    },
    /// Solve a Sudoku board by constraint propagation.
    SolveSudoku {
        /// Block size n (board is n²×n²).
        #[arg(long)]
        n: usize,
        /// Board file: n²×n² tokens, digits 1..=n² or "." blanks.
        #[arg(long)]
        board: PathBuf,
    },
    /// Train a hybrid logic network by alternating moment matching.
    TrainHln {
        /// Formulas document (JSON).
        #[arg(long)]
        formulas: PathBuf,
        /// Dataset CSV with a header of atom names.
        #[arg(long)]
        data: PathBuf,
        /// Convergence tolerance on the largest parameter change.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Maximum number of sweeps.
        #[arg(long, default_value_t = 100)]
        max_iters: usize,
    },
    /// Decide probabilistic entailment for a hybrid logic network.
    ProbEntail {
        /// Formulas document (JSON).
        #[arg(long)]
        formulas: PathBuf,
        /// Parameters document (JSON).
        #[arg(long)]
        params: PathBuf,
        /// Query as a nested-list expression or a bare atom.
        #[arg(long)]
        query: String,
    },
    /// Render the factor graph in DOT syntax.
    Draw {
        /// Network spec (JSON).
        #[arg(long)]
        spec: PathBuf,
        /// Output DOT file.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses argv and runs the selected command, returning the process exit
/// status.
pub fn cli_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

fn run(cmd: Cmd) -> Result<i32, CliError> {
    match cmd {
        Cmd::Contract { spec, open, out } => contract(&spec, &open, out.as_deref()),
        Cmd::CountModels { spec } => count_models(&spec),
        Cmd::Entail { spec, query } => entail(&spec, &query),
        Cmd::Propagate { spec, mode, marginals } => propagate(&spec, &mode, marginals.as_deref()),
        Cmd::SolveSudoku { n, board } => solve_sudoku(n, &board),
        Cmd::TrainHln { formulas, data, tol, max_iters } => {
            train_hln(&formulas, &data, tol, max_iters)
        }
        Cmd::ProbEntail { formulas, params, query } => prob_entail(&formulas, &params, &query),
        Cmd::Draw { spec, out } => draw(&spec, &out),
    }
}

/// Parses a query: JSON nested list, or a bare atom name.
fn parse_query(query: &str) -> Result<Expression, CliError> {
    match serde_json::from_str::<Value>(query) {
        Ok(v) => parse_expression(&v),
        Err(_) => {
            if query.chars().all(|c| c.is_alphanumeric() || c == '_') && !query.is_empty() {
                Ok(Expression::atom(query))
            } else {
                Err(CliError::usage(format!("cannot parse query '{query}'")))
            }
        }
    }
}

fn fmt_f(v: f64) -> String {
    // Shortest representation that round-trips the exact binary value.
    format!("{v:?}")
}

fn contract(
    spec: &std::path::Path,
    open: &str,
    out: Option<&std::path::Path>,
) -> Result<i32, CliError> {
    let (doc, net, _) = load_spec_doc(spec)?;
    let mut open_vars: Vec<Variable> = Vec::new();
    for name in open.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let v = net
            .variable(name)
            .or_else(|| doc.variables.get(name).map(|&d| Variable::new(name, d)))
            .ok_or_else(|| CliError::usage(format!("unknown open variable '{name}'")))?;
        open_vars.push(v);
    }
    let result = net.contract(&open_vars).map_err(CliError::from)?;
    match out {
        Some(path) => {
            save_tensor(&result, path)?;
        }
        None => {
            println!(
                "{}",
                serde_json::to_string_pretty(&tensor_to_value(&result)).expect("serializes")
            );
        }
    }
    Ok(0)
}

fn count_models(spec: &std::path::Path) -> Result<i32, CliError> {
    let (doc, net, _) = load_spec_doc(spec)?;
    let mut z = net.partition_function().map_err(CliError::from)?;
    // Declared variables no core mentions are free: each multiplies the count
    // by its dimension.
    for (name, &dim) in &doc.variables {
        if net.variable(name).is_none() {
            z *= dim as f64;
        }
    }
    if (z - z.round()).abs() > COUNT_INT_TOL || z < -COUNT_INT_TOL {
        return Err(CliError::parse(format!("network mass {z} is not a model count")));
    }
    println!("{}", z.round() as u64);
    Ok(0)
}

fn entail(spec: &std::path::Path, query: &str) -> Result<i32, CliError> {
    let (_, net, _) = load_spec_doc(spec)?;
    let q = parse_query(query)?;
    for atom in q.atoms() {
        if let Some(v) = net.variable(&atom) {
            if v.dim() != 2 {
                return Err(CliError::parse(format!(
                    "query atom '{atom}' has dim {}, expected 2",
                    v.dim()
                )));
            }
        }
    }
    // Z with the negated query attached vanishes iff every model of the
    // network satisfies the query.
    let neg = formula_tensor_over(&q, &q.atoms())
        .map_err(CliError::from)?
        .map(|c| 1.0 - c);
    let mut extended = TensorNetwork::new();
    for (name, core) in net.iter() {
        extended.insert(name, core.clone()).map_err(CliError::from)?;
    }
    extended.insert("__neg_query", neg).map_err(CliError::from)?;
    let z = extended.partition_function().map_err(CliError::from)?;
    if z.abs() < ENTAILMENT_TOL {
        println!("yes");
        Ok(0)
    } else {
        println!("no");
        Ok(1)
    }
}

fn print_messages(result: &PropagationResult) {
    let mut msgs: Vec<(&str, &str, &Tensor)> = result
        .store
        .iter()
        .map(|m| (m.from.as_str(), m.to.as_str(), &m.payload))
        .collect();
    msgs.sort_by_key(|(f, t, _)| (f.to_string(), t.to_string()));
    for (from, to, payload) in msgs {
        let legs = payload.leg_names().join(",");
        let values: Vec<String> = payload.dense_coords().iter().map(|&c| fmt_f(c)).collect();
        println!("message {from} -> {to} [{legs}]: {}", values.join(" "));
    }
}

fn propagate(
    spec: &std::path::Path,
    mode: &str,
    marginals: Option<&str>,
) -> Result<i32, CliError> {
    let (_, net, roles) = load_spec_doc(spec)?;
    match mode {
        "tree" => {
            let result = tree_bp(&net).map_err(CliError::from)?;
            println!("messages: {}", result.messages_sent);
            print_messages(&result);
            if let Some(cores) = marginals {
                for core in cores.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let m = local_marginal(&net, core, &result).map_err(CliError::from)?;
                    let values: Vec<String> =
                        m.dense_coords().iter().map(|&c| fmt_f(c)).collect();
                    println!("marginal {core} [{}]: {}", m.leg_names().join(","), values.join(" "));
                }
            }
            Ok(0)
        }
        "directed" => {
            let missing: Vec<&str> = net
                .core_names()
                .filter(|n| !roles.contains_key(*n))
                .collect();
            if !missing.is_empty() {
                return Err(CliError::parse(format!(
                    "directed mode needs in/out roles on every core; missing: {}",
                    missing.join(", ")
                )));
            }
            let full_roles: Roles = roles;
            let dnet = DirectedNetwork { net, roles: full_roles };
            let result = directed_bp(&dnet).map_err(CliError::from)?;
            println!("messages: {}", result.messages_sent);
            print_messages(&result);
            for (leg, state) in directed_outputs(&dnet, &result).map_err(CliError::from)? {
                println!("output {leg} = {state}");
            }
            Ok(0)
        }
        "constraint" => {
            let result = constraint_propagation(&net).map_err(CliError::from)?;
            println!("updates: {}", result.messages_sent);
            println!("support changes: {}", result.support_changes);
            print_messages(&result);
            let atoms: Vec<String> = {
                let mut a: Vec<String> = net
                    .variables()
                    .into_iter()
                    .filter(|v| v.dim() == 2)
                    .map(|v| v.name().to_string())
                    .collect();
                a.sort_unstable();
                a
            };
            match deduce_atoms(&net, &atoms, &result) {
                Ok(deduced) => {
                    for (atom, d) in deduced {
                        let label = match d {
                            Deduction::True => "true",
                            Deduction::False => "false",
                            Deduction::Unknown => "unknown",
                        };
                        println!("atom {atom}: {label}");
                    }
                    Ok(0)
                }
                Err(Error::Inconsistency(msg)) => Err(CliError::inconsistent(msg)),
                Err(e) => Err(CliError::from(e)),
            }
        }
        other => Err(CliError::usage(format!("unknown mode '{other}'"))),
    }
}

fn solve_sudoku(n: usize, board: &std::path::Path) -> Result<i32, CliError> {
    if n == 0 {
        return Err(CliError::usage("n must be at least 1"));
    }
    let text = std::fs::read_to_string(board)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", board.display())))?;
    let givens = parse_board(&text, n)?;
    let net = build_sudoku_network(n, &givens).map_err(CliError::from)?;
    let result = constraint_propagation(&net).map_err(CliError::from)?;
    let atoms = sudoku_atoms(n);
    match deduce_atoms(&net, &atoms, &result) {
        Ok(deduced) => {
            let (text, complete) = render_board(n, &deduced);
            print!("{text}");
            Ok(if complete { 0 } else { 1 })
        }
        Err(Error::Inconsistency(msg)) => Err(CliError::inconsistent(msg)),
        Err(e) => Err(CliError::from(e)),
    }
}

/// Reads a formulas document: `{"formulas": [{"name": …, "expression": …}]}`.
fn load_statistic(path: &std::path::Path) -> Result<BooleanStatistic, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let list = doc
        .get("formulas")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::parse(format!("{}: missing \"formulas\" list", path.display())))?;
    let mut formulas = Vec::new();
    for (k, item) in list.iter().enumerate() {
        let name = item
            .get("name")
            .and_then(Value::as_str)
            .map(str::to_string)
            .unwrap_or_else(|| format!("f{k}"));
        let expr = item
            .get("expression")
            .ok_or_else(|| CliError::parse(format!("formula '{name}' has no expression")))?;
        formulas.push((name, parse_expression(expr)?));
    }
    BooleanStatistic::new(formulas).map_err(CliError::from)
}

fn train_hln(
    formulas: &std::path::Path,
    data: &std::path::Path,
    tol: f64,
    max_iters: usize,
) -> Result<i32, CliError> {
    let t = load_statistic(formulas)?;
    let dataset = load_dataset_csv(data)?;
    let mu = empirical_means(&t, &dataset).map_err(CliError::from)?;
    let outcome =
        amm_train(&t, &mu, Some(dataset.len()), max_iters, tol).map_err(CliError::from)?;
    let hard_targets: BTreeMap<String, u8> = outcome
        .params
        .hard_targets
        .iter()
        .map(|(&l, &y)| (l.to_string(), u8::from(y)))
        .collect();
    let doc = serde_json::json!({
        "mu": mu,
        "hard_set": outcome.params.hard_set.iter().copied().collect::<Vec<usize>>(),
        "hard_targets": hard_targets,
        "theta": outcome.params.theta,
        "converged": outcome.converged,
        "sweeps": outcome.sweeps,
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
    Ok(0)
}

/// Reads a parameters document: `{"hard_targets": {"0": true}, "theta": […]}`.
fn load_params(path: &std::path::Path, p: usize) -> Result<HybridParams, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let theta: Vec<f64> = match doc.get("theta") {
        Some(v) => serde_json::from_value(v.clone())
            .map_err(|e| CliError::parse(format!("bad theta: {e}")))?,
        None => vec![0.0; p],
    };
    let mut hard_set = BTreeSet::new();
    let mut hard_targets = BTreeMap::new();
    if let Some(map) = doc.get("hard_targets").and_then(Value::as_object) {
        for (k, v) in map {
            let l: usize = k
                .parse()
                .map_err(|_| CliError::parse(format!("bad hard index '{k}'")))?;
            let y = match v {
                Value::Bool(b) => *b,
                Value::Number(n) if n.as_u64() == Some(0) => false,
                Value::Number(n) if n.as_u64() == Some(1) => true,
                other => return Err(CliError::parse(format!("bad hard target {other}"))),
            };
            hard_set.insert(l);
            hard_targets.insert(l, y);
        }
    }
    Ok(HybridParams { hard_set, hard_targets, theta })
}

fn prob_entail(
    formulas: &std::path::Path,
    params: &std::path::Path,
    query: &str,
) -> Result<i32, CliError> {
    let t = load_statistic(formulas)?;
    let p = load_params(params, t.len())?;
    let q = parse_query(query)?;
    if probabilistic_entails(&t, &p, &q).map_err(CliError::from)? {
        println!("yes");
        Ok(0)
    } else {
        println!("no");
        Ok(1)
    }
}

fn draw(spec: &std::path::Path, out: &std::path::Path) -> Result<i32, CliError> {
    let (_, net, _) = load_spec_doc(spec)?;
    std::fs::write(out, emit_dot(&net))
        .map_err(|e| CliError::parse(format!("cannot write {}: {e}", out.display())))?;
    Ok(0)
}
