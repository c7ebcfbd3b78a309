//! Propositional formulas as boolean tensors.
//!
//! A formula is identified with the boolean tensor over its atoms whose
//! coordinate is 1 exactly at the models. Model counting is a full
//! contraction, a knowledge base contracts to the conjunction of its formulas,
//! and entailment is the vanishing of the contraction against the negated
//! query. The Sudoku knowledge-base builder produces the exactly-one
//! constraint networks in CP form together with start evidence.

use std::collections::BTreeMap;

use indexmap::IndexMap;

use crate::encoding::{exactly_one_cp, Connective, DecompositionGraph};
use crate::error::{Error, Result};
use crate::network::TensorNetwork;
use crate::tensor::{index_space, Tensor, Variable};

/// Slack for deciding that a provably-integer boolean contraction is zero.
/// Half a count is the maximal safe tolerance.
pub const ENTAILMENT_TOL: f64 = 0.5;

/// Tolerance within which a model count must sit next to an integer.
pub const COUNT_INT_TOL: f64 = 1e-6;

/// A propositional expression: an atom or a connective applied to
/// subexpressions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expression {
    /// A named atomic proposition (dimension 2).
    Atom(String),
    /// A connective applied to argument expressions.
    App(Connective, Vec<Expression>),
}

impl Expression {
    /// Atom constructor.
    pub fn atom(name: impl Into<String>) -> Self {
        Self::Atom(name.into())
    }

    /// Applies a connective, checking its arity.
    pub fn apply(connective: Connective, args: Vec<Expression>) -> Result<Self> {
        connective.check_arity(args.len())?;
        Ok(Self::App(connective, args))
    }

    /// Negation helper.
    pub fn not(e: Expression) -> Self {
        Self::App(Connective::Not, vec![e])
    }

    /// The atoms of the expression, first occurrence order, deduplicated.
    pub fn atoms(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<String>) {
        match self {
            Self::Atom(a) => {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
            Self::App(_, args) => {
                for e in args {
                    e.collect_atoms(out);
                }
            }
        }
    }

    /// Evaluates the expression under a truth assignment of its atoms.
    pub fn evaluate(&self, assignment: &BTreeMap<String, bool>) -> Result<bool> {
        match self {
            Self::Atom(a) => assignment
                .get(a)
                .copied()
                .ok_or_else(|| Error::Index(format!("assignment misses atom '{a}'"))),
            Self::App(c, args) => {
                let vals: Vec<bool> =
                    args.iter().map(|e| e.evaluate(assignment)).collect::<Result<_>>()?;
                Ok(c.evaluate(&vals))
            }
        }
    }
}

/// The boolean tensor of a formula over its atoms (first-occurrence order).
pub fn formula_tensor(e: &Expression) -> Result<Tensor> {
    let atoms = e.atoms();
    formula_tensor_over(e, &atoms)
}

/// The boolean tensor of a formula over an explicit atom order, which must
/// cover the expression's atoms (extra atoms broadcast trivially).
pub fn formula_tensor_over(e: &Expression, atoms: &[String]) -> Result<Tensor> {
    for a in e.atoms() {
        if !atoms.contains(&a) {
            return Err(Error::Index(format!("atom order misses '{a}'")));
        }
    }
    let legs: Vec<Variable> = atoms.iter().map(|a| Variable::new(a.clone(), 2)).collect();
    let mut coords = vec![0.0; 1 << atoms.len()];
    for (offset, idx) in index_space(&legs).enumerate() {
        let assignment: BTreeMap<String, bool> =
            atoms.iter().zip(&idx).map(|(a, &i)| (a.clone(), i == 1)).collect();
        if e.evaluate(&assignment)? {
            coords[offset] = 1.0;
        }
    }
    Tensor::from_dense(legs, coords)
}

/// Builds the syntactic decomposition graph of an expression: one hyperedge
/// per connective occurrence, atoms as input nodes, internal head variables
/// named `<name>_<k>_cV` and the overall head `<name>_cV`. Compiling the graph
/// and contracting with the head activated (one-hot at 1) yields the formula
/// tensor.
pub fn syntactic_decomposition(e: &Expression, name: &str) -> Result<(DecompositionGraph, String)> {
    let mut g = DecompositionGraph::new();
    for a in e.atoms() {
        g.add_node(a, 2)?;
    }
    let head = format!("{name}_cV");
    let mut counter = 0usize;
    let top = build_edges(e, name, &head, &mut counter, &mut g, true)?;
    Ok((g, top))
}

/// Recursively adds decomposition edges; returns the node carrying the
/// subexpression's value.
fn build_edges(
    e: &Expression,
    name: &str,
    head: &str,
    counter: &mut usize,
    g: &mut DecompositionGraph,
    top: bool,
) -> Result<String> {
    match e {
        Expression::Atom(a) => {
            if top {
                // A bare atom still gets an identity edge so the graph has a
                // distinct head node.
                g.add_node(head, 2)?;
                let table = crate::encoding::FunctionTable::tabulate(vec![2], vec![2], |i| i.to_vec())?;
                g.add_edge(format!("{name}_id"), vec![a.clone()], vec![head.to_string()], table)?;
                Ok(head.to_string())
            } else {
                Ok(a.clone())
            }
        }
        Expression::App(c, args) => {
            let arg_nodes: Vec<String> = args
                .iter()
                .map(|sub| build_edges(sub, name, head, counter, g, false))
                .collect::<Result<_>>()?;
            let out = if top {
                head.to_string()
            } else {
                let n = format!("{name}_{counter}_cV");
                *counter += 1;
                n
            };
            g.add_node(&out, 2)?;
            let edge_name = format!("{name}_e{}", g.edges().len());
            g.add_edge(edge_name, arg_nodes, vec![out.clone()], c.table(args.len())?)?;
            Ok(out)
        }
    }
}

/// A named set of formulas with optional boolean evidence on atoms.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    formulas: IndexMap<String, Expression>,
    evidence: BTreeMap<String, bool>,
    declared_atoms: Vec<String>,
}

impl KnowledgeBase {
    /// Creates an empty knowledge base.
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a named formula; duplicate names are rejected (formulas are
    /// deduplicated by name, conjunction being idempotent).
    pub fn add_formula(&mut self, name: impl Into<String>, e: Expression) -> Result<()> {
        let name = name.into();
        if self.formulas.contains_key(&name) {
            return Err(Error::Input(format!("duplicate formula name '{name}'")));
        }
        self.formulas.insert(name, e);
        Ok(())
    }

    /// Sets evidence on an atom.
    pub fn add_evidence(&mut self, atom: impl Into<String>, truth: bool) -> Result<()> {
        let atom = atom.into();
        if let Some(&prev) = self.evidence.get(&atom) {
            if prev != truth {
                return Err(Error::Input(format!("conflicting evidence on atom '{atom}'")));
            }
        }
        self.evidence.insert(atom, truth);
        Ok(())
    }

    /// Declares an atom that may appear in no formula (it still spans two
    /// states in model counts).
    pub fn declare_atom(&mut self, atom: impl Into<String>) {
        let atom = atom.into();
        if !self.declared_atoms.contains(&atom) {
            self.declared_atoms.push(atom);
        }
    }

    /// The formulas in insertion order.
    pub fn formulas(&self) -> impl Iterator<Item = (&str, &Expression)> {
        self.formulas.iter().map(|(n, e)| (n.as_str(), e))
    }

    /// The evidence map.
    pub fn evidence(&self) -> &BTreeMap<String, bool> {
        &self.evidence
    }

    /// All atoms of the knowledge base: formula atoms, evidence atoms and
    /// declared atoms, first occurrence order.
    pub fn atoms(&self) -> Vec<String> {
        let mut out = Vec::new();
        for e in self.formulas.values() {
            for a in e.atoms() {
                if !out.contains(&a) {
                    out.push(a);
                }
            }
        }
        for a in self.evidence.keys() {
            if !out.contains(a) {
                out.push(a.clone());
            }
        }
        for a in &self.declared_atoms {
            if !out.contains(a) {
                out.push(a.clone());
            }
        }
        out
    }

    /// The knowledge-base network: one formula tensor per formula plus one-hot
    /// evidence vectors. Its contraction onto the atoms is the conjunction
    /// tensor.
    pub fn network(&self) -> Result<TensorNetwork> {
        let mut net = TensorNetwork::new();
        for (name, e) in &self.formulas {
            net.insert(name.clone(), formula_tensor(e)?)?;
        }
        for (atom, &truth) in &self.evidence {
            let t = Tensor::one_hot(Variable::new(atom.clone(), 2), usize::from(truth))?;
            net.insert(format!("ev_{atom}"), t)?;
        }
        Ok(net)
    }

    /// Counts the models of the knowledge base over all of its atoms.
    pub fn count_models(&self) -> Result<u64> {
        let net = self.network()?;
        let raw = net.partition_function()?;
        // Atoms constrained by nothing double the count each.
        let mentioned: Vec<Variable> = net.variables();
        let free = self
            .atoms()
            .iter()
            .filter(|a| !mentioned.iter().any(|v| v.name() == a.as_str()))
            .count();
        let total = raw * (1u64 << free) as f64;
        let rounded = total.round();
        if (total - rounded).abs() > COUNT_INT_TOL {
            return Err(Error::Inconsistency(format!(
                "model count {total} is not integral within {COUNT_INT_TOL}"
            )));
        }
        Ok(rounded as u64)
    }

    /// Decides whether the knowledge base entails the formula: true iff the
    /// contraction against the negated query vanishes.
    pub fn entails(&self, f: &Expression) -> Result<bool> {
        let mut net = self.network()?;
        let ft = formula_tensor(f)?;
        let neg = Tensor::ones(ft.legs().to_vec()).sub(&ft)?;
        net.insert("__neg_query", neg)?;
        let count = net.partition_function()?;
        Ok(count.abs() < ENTAILMENT_TOL)
    }
}

/// Naming scheme for Sudoku atoms: `X_<r0>_<r1>_<c0>_<c1>_<i>` states that the
/// cell in block-row r0, row r1, block-column c0, column c1 holds number i
/// (all indices 0-based).
pub fn sudoku_atom(n: usize, cell: (usize, usize, usize, usize), i: usize) -> String {
    let _ = n;
    let (r0, r1, c0, c1) = cell;
    format!("X_{r0}_{r1}_{c0}_{c1}_{i}")
}

/// Builds the n²×n² Sudoku constraint network in CP form: for every cell, row,
/// column and square an exactly-one constraint over its n² member atoms
/// (4·n⁴ constraints, 4·n⁶ CP cores), plus one vector per atom — the one-hot
/// `e_1` for start entries, the trivial ones vector otherwise (n⁶ more cores).
///
/// Start entries are `(r0, r1, c0, c1, i)` tuples, 0-based.
pub fn build_sudoku_network(
    n: usize,
    start: &[(usize, usize, usize, usize, usize)],
) -> Result<TensorNetwork> {
    if n < 1 {
        return Err(Error::Input("sudoku block size must be >= 1".into()));
    }
    let nn = n * n;
    let mut given: BTreeMap<(usize, usize, usize, usize), usize> = BTreeMap::new();
    for &(r0, r1, c0, c1, i) in start {
        if r0 >= n || r1 >= n || c0 >= n || c1 >= n || i >= nn {
            return Err(Error::Input(format!(
                "start entry ({r0},{r1},{c0},{c1},{i}) out of range for n={n}"
            )));
        }
        if let Some(&prev) = given.get(&(r0, r1, c0, c1)) {
            if prev != i {
                return Err(Error::Input(format!(
                    "two numbers for one cell ({r0},{r1},{c0},{c1})"
                )));
            }
        }
        given.insert((r0, r1, c0, c1), i);
    }

    let atom = |r0: usize, r1: usize, c0: usize, c1: usize, i: usize| {
        Variable::new(sudoku_atom(n, (r0, r1, c0, c1), i), 2)
    };
    let mut net = TensorNetwork::new();

    // Index pairs (a0, a1) in lexicographic order, used as the member order of
    // each constraint.
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|a0| (0..n).map(move |a1| (a0, a1))).collect();

    // Position: each cell holds exactly one number (member order: i ascending).
    for &(r0, r1) in &pairs {
        for &(c0, c1) in &pairs {
            let vars: Vec<Variable> = (0..nn).map(|i| atom(r0, r1, c0, c1, i)).collect();
            let sub = exactly_one_cp(&vars, &format!("pos_{r0}_{r1}_{c0}_{c1}"))?;
            for (name, t) in sub.iter() {
                net.insert(name.to_string(), t.clone())?;
            }
        }
    }
    // Row: each number appears exactly once per row (member order: (c0,c1)).
    for &(r0, r1) in &pairs {
        for i in 0..nn {
            let vars: Vec<Variable> =
                pairs.iter().map(|&(c0, c1)| atom(r0, r1, c0, c1, i)).collect();
            let sub = exactly_one_cp(&vars, &format!("row_{r0}_{r1}_{i}"))?;
            for (name, t) in sub.iter() {
                net.insert(name.to_string(), t.clone())?;
            }
        }
    }
    // Column: each number appears exactly once per column (member order:
    // (r0,r1)).
    for &(c0, c1) in &pairs {
        for i in 0..nn {
            let vars: Vec<Variable> =
                pairs.iter().map(|&(r0, r1)| atom(r0, r1, c0, c1, i)).collect();
            let sub = exactly_one_cp(&vars, &format!("col_{c0}_{c1}_{i}"))?;
            for (name, t) in sub.iter() {
                net.insert(name.to_string(), t.clone())?;
            }
        }
    }
    // Square: each number appears exactly once per block (member order:
    // (r1,c1)).
    for r0 in 0..n {
        for c0 in 0..n {
            for i in 0..nn {
                let vars: Vec<Variable> =
                    pairs.iter().map(|&(r1, c1)| atom(r0, r1, c0, c1, i)).collect();
                let sub = exactly_one_cp(&vars, &format!("sq_{r0}_{c0}_{i}"))?;
                for (name, t) in sub.iter() {
                    net.insert(name.to_string(), t.clone())?;
                }
            }
        }
    }
    // Evidence / trivial vectors, one per atom.
    for &(r0, r1) in &pairs {
        for &(c0, c1) in &pairs {
            for i in 0..nn {
                let v = atom(r0, r1, c0, c1, i);
                let t = match given.get(&(r0, r1, c0, c1)) {
                    Some(&g) if g == i => Tensor::one_hot(v.clone(), 1)?,
                    _ => Tensor::ones(vec![v.clone()]),
                };
                net.insert(format!("ev_{}", v.name()), t)?;
            }
        }
    }
    Ok(net)
}

/// All Sudoku atom names for block size n, lexicographic in
/// (r0, r1, c0, c1, i).
pub fn sudoku_atoms(n: usize) -> Vec<String> {
    let nn = n * n;
    let mut out = Vec::new();
    for r0 in 0..n {
        for r1 in 0..n {
            for c0 in 0..n {
                for c1 in 0..n {
                    for i in 0..nn {
                        out.push(sudoku_atom(n, (r0, r1, c0, c1), i));
                    }
                }
            }
        }
    }
    out
}
