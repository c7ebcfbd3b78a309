//! Basis encodings of finite functions and decomposition hypergraphs.
//!
//! A finite function between state sets is represented by a [`FunctionTable`]
//! and encoded as a boolean tensor ([`basis_encode`]) pairing each input tuple
//! with the one-hot of its output tuple. Directed acyclic hypergraphs whose
//! hyperedges carry such functions ([`DecompositionGraph`]) compile to tensor
//! networks of basis encodings whose contraction recovers the encoding of the
//! composite function. Builders for the m-adic adder and the two low-rank
//! formats (CP and tensor-train) of the exactly-one constraint live here too.

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::network::TensorNetwork;
use crate::tensor::{index_space, Tensor, Variable};

/// A bijective labelling of a leg space: one opaque label per index tuple, in
/// row-major order of the given variables.
#[derive(Debug, Clone)]
pub struct EnumerationMap {
    vars: Vec<Variable>,
    elements: Vec<String>,
}

impl EnumerationMap {
    /// Creates an enumeration map; `elements` must have one distinct label per
    /// index tuple.
    pub fn new(vars: Vec<Variable>, elements: Vec<String>) -> Result<Self> {
        let n: usize = vars.iter().map(Variable::dim).product();
        if elements.len() != n {
            return Err(Error::Dimension(format!(
                "enumeration needs {n} elements, got {}",
                elements.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &elements {
            if !seen.insert(e) {
                return Err(Error::Input(format!("duplicate enumeration label '{e}'")));
            }
        }
        Ok(Self { vars, elements })
    }

    /// The enumerated variables.
    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    /// Label of an index tuple.
    pub fn label(&self, idx: &[usize]) -> Result<&str> {
        let mut offset = 0usize;
        let mut stride = 1usize;
        for (v, &i) in self.vars.iter().zip(idx).rev() {
            if i >= v.dim() {
                return Err(Error::Index(format!("index {i} out of range for '{}'", v.name())));
            }
            offset += i * stride;
            stride *= v.dim();
        }
        Ok(&self.elements[offset])
    }

    /// Index tuple of a label.
    pub fn index_of(&self, label: &str) -> Result<Vec<usize>> {
        let pos = self
            .elements
            .iter()
            .position(|e| e == label)
            .ok_or_else(|| Error::Index(format!("unknown label '{label}'")))?;
        let mut idx = vec![0usize; self.vars.len()];
        let mut rem = pos;
        for k in (0..self.vars.len()).rev() {
            idx[k] = rem % self.vars[k].dim();
            rem /= self.vars[k].dim();
        }
        Ok(idx)
    }
}

/// A total finite function from input state tuples to output state tuples,
/// tabulated row-major over the input space.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionTable {
    in_dims: Vec<usize>,
    out_dims: Vec<usize>,
    rows: Vec<Vec<usize>>,
}

impl FunctionTable {
    /// Creates a table; `rows` holds one output tuple per input tuple in
    /// row-major input order.
    pub fn new(in_dims: Vec<usize>, out_dims: Vec<usize>, rows: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = in_dims.iter().product();
        if rows.len() != n {
            return Err(Error::Dimension(format!("table needs {n} rows, got {}", rows.len())));
        }
        for row in &rows {
            if row.len() != out_dims.len() {
                return Err(Error::Dimension(format!(
                    "output tuple length {} does not match {} output dims",
                    row.len(),
                    out_dims.len()
                )));
            }
            for (s, &d) in row.iter().zip(&out_dims) {
                if *s >= d {
                    return Err(Error::Index(format!("output state {s} out of range (dim {d})")));
                }
            }
        }
        Ok(Self { in_dims, out_dims, rows })
    }

    /// Builds a table by evaluating `f` on every input tuple.
    pub fn tabulate(
        in_dims: Vec<usize>,
        out_dims: Vec<usize>,
        f: impl Fn(&[usize]) -> Vec<usize>,
    ) -> Result<Self> {
        let vars: Vec<Variable> = in_dims
            .iter()
            .enumerate()
            .map(|(k, &d)| Variable::new(format!("_in{k}"), d))
            .collect();
        let rows: Vec<Vec<usize>> = index_space(&vars).map(|idx| f(&idx)).collect();
        Self::new(in_dims, out_dims, rows)
    }

    /// Input dimensions.
    pub fn in_dims(&self) -> &[usize] {
        &self.in_dims
    }

    /// Output dimensions.
    pub fn out_dims(&self) -> &[usize] {
        &self.out_dims
    }

    /// Evaluates the table on an input tuple.
    pub fn evaluate(&self, input: &[usize]) -> Result<&[usize]> {
        if input.len() != self.in_dims.len() {
            return Err(Error::Index(format!(
                "input tuple length {} does not match {} input dims",
                input.len(),
                self.in_dims.len()
            )));
        }
        let mut offset = 0usize;
        for (k, (&i, &d)) in input.iter().zip(&self.in_dims).enumerate() {
            if i >= d {
                return Err(Error::Index(format!("input state {i} out of range at slot {k} (dim {d})")));
            }
            offset = offset * d + i;
        }
        Ok(&self.rows[offset])
    }
}

/// Basis encoding of a finite function: the boolean tensor over
/// `out_vars ∪ in_vars` with coordinate 1 iff the out-tuple equals the
/// function value of the in-tuple. Every in-slice is a one-hot over the out
/// variables.
pub fn basis_encode(
    table: &FunctionTable,
    in_vars: &[Variable],
    out_vars: &[Variable],
) -> Result<Tensor> {
    let in_dims: Vec<usize> = in_vars.iter().map(Variable::dim).collect();
    let out_dims: Vec<usize> = out_vars.iter().map(Variable::dim).collect();
    if in_dims != table.in_dims || out_dims != table.out_dims {
        return Err(Error::Dimension(format!(
            "variable dims (in {:?}, out {:?}) do not match table dims (in {:?}, out {:?})",
            in_dims, out_dims, table.in_dims, table.out_dims
        )));
    }
    let mut legs: Vec<Variable> = out_vars.to_vec();
    legs.extend(in_vars.iter().cloned());
    let mut t = Tensor::zeros(legs.clone());
    let coords_len = t.len();
    let mut coords = vec![0.0; coords_len];
    // Row-major offset of (out, in) = out_offset * |in-space| + in_offset.
    let in_size: usize = in_dims.iter().product();
    for (in_offset, in_idx) in index_space(in_vars).enumerate() {
        let out_idx = table.evaluate(&in_idx)?;
        let mut out_offset = 0usize;
        for (&i, &d) in out_idx.iter().zip(&table.out_dims) {
            out_offset = out_offset * d + i;
        }
        coords[out_offset * in_size + in_offset] = 1.0;
    }
    t = Tensor::from_dense(legs, coords)?;
    Ok(t)
}

/// The logical connectives available to the expression grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connective {
    /// Unary negation.
    Not,
    /// N-ary conjunction (arity ≥ 2).
    And,
    /// N-ary disjunction (arity ≥ 2).
    Or,
    /// N-ary parity — true iff an odd number of arguments hold (arity ≥ 2).
    Xor,
    /// Binary implication.
    Implies,
    /// N-ary exclusive choice — true iff exactly one argument holds
    /// (arity ≥ 2).
    ExactlyOne,
}

impl Connective {
    /// Parses a connective keyword.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "not" => Ok(Self::Not),
            "and" => Ok(Self::And),
            "or" => Ok(Self::Or),
            "xor" => Ok(Self::Xor),
            "implies" => Ok(Self::Implies),
            "exactly-one" => Ok(Self::ExactlyOne),
            other => Err(Error::Parse(format!("unknown connective '{other}'"))),
        }
    }

    /// The keyword of the connective.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Not => "not",
            Self::And => "and",
            Self::Or => "or",
            Self::Xor => "xor",
            Self::Implies => "implies",
            Self::ExactlyOne => "exactly-one",
        }
    }

    /// Checks the arity and evaluates the boolean function.
    pub fn check_arity(&self, arity: usize) -> Result<()> {
        let ok = match self {
            Self::Not => arity == 1,
            Self::Implies => arity == 2,
            Self::And | Self::Or | Self::Xor | Self::ExactlyOne => arity >= 2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Arity(format!("connective '{}' cannot take {arity} arguments", self.name())))
        }
    }

    /// Evaluates the connective on boolean arguments.
    pub fn evaluate(&self, args: &[bool]) -> bool {
        match self {
            Self::Not => !args[0],
            Self::And => args.iter().all(|&b| b),
            Self::Or => args.iter().any(|&b| b),
            Self::Xor => args.iter().filter(|&&b| b).count() % 2 == 1,
            Self::Implies => !args[0] || args[1],
            Self::ExactlyOne => args.iter().filter(|&&b| b).count() == 1,
        }
    }

    /// The connective as a [`FunctionTable`] from `arity` booleans to one
    /// boolean. Exactly-one as a monolithic table is capped at arity 8; larger
    /// arities must use the CP/TT network builders.
    pub fn table(&self, arity: usize) -> Result<FunctionTable> {
        self.check_arity(arity)?;
        if *self == Self::ExactlyOne && arity > 8 {
            return Err(Error::Arity(
                "monolithic exactly-one is capped at arity 8; use exactly_one_cp/exactly_one_tt"
                    .into(),
            ));
        }
        FunctionTable::tabulate(vec![2; arity], vec![2], |idx| {
            let args: Vec<bool> = idx.iter().map(|&i| i == 1).collect();
            vec![usize::from(self.evaluate(&args))]
        })
    }
}

/// Basis encoding of a connective with the given head variable and arguments.
pub fn connective_encoding_over(
    connective: Connective,
    head: &Variable,
    args: &[Variable],
) -> Result<Tensor> {
    let table = connective.table(args.len())?;
    basis_encode(&table, args, std::slice::from_ref(head))
}

/// Basis encoding of a connective with default variable names: arguments
/// `X_0..X_{arity-1}` and head `Y`, all of dimension 2.
pub fn connective_encoding(connective: Connective, arity: usize) -> Result<Tensor> {
    let args: Vec<Variable> = (0..arity).map(|k| Variable::new(format!("X_{k}"), 2)).collect();
    connective_encoding_over(connective, &Variable::new("Y", 2), &args)
}

/// One function-decorated hyperedge of a decomposition graph.
#[derive(Debug, Clone)]
pub struct Hyperedge {
    /// Edge (and compiled core) name.
    pub name: String,
    /// Ordered input node names.
    pub in_nodes: Vec<String>,
    /// Ordered output node names (nonempty).
    pub out_nodes: Vec<String>,
    /// The finite function carried by the edge.
    pub table: FunctionTable,
}

/// A directed acyclic hypergraph of finite-set nodes with function-decorated
/// hyperedges. Every node appears at most once as an outgoing node; nodes
/// never produced by an edge are the graph inputs, produced nodes never
/// consumed are the outputs.
#[derive(Debug, Clone, Default)]
pub struct DecompositionGraph {
    nodes: IndexMap<String, Variable>,
    edges: Vec<Hyperedge>,
}

impl DecompositionGraph {
    /// Creates an empty graph.
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a node with the given dimension.
    pub fn add_node(&mut self, name: impl Into<String>, dim: usize) -> Result<()> {
        let name = name.into();
        if self.nodes.contains_key(&name) {
            return Err(Error::Structure(format!("duplicate node '{name}'")));
        }
        self.nodes.insert(name.clone(), Variable::new(name, dim));
        Ok(())
    }

    /// Adds a function-decorated hyperedge. Checks node existence, dimension
    /// agreement with the table, the at-most-once-outgoing rule, and acyclicity.
    pub fn add_edge(
        &mut self,
        name: impl Into<String>,
        in_nodes: Vec<String>,
        out_nodes: Vec<String>,
        table: FunctionTable,
    ) -> Result<()> {
        let name = name.into();
        if self.edges.iter().any(|e| e.name == name) {
            return Err(Error::Structure(format!("duplicate edge '{name}'")));
        }
        if out_nodes.is_empty() {
            return Err(Error::Structure(format!("edge '{name}' has no outgoing node")));
        }
        for n in in_nodes.iter().chain(&out_nodes) {
            if !self.nodes.contains_key(n) {
                return Err(Error::Structure(format!("edge '{name}' references unknown node '{n}'")));
            }
        }
        let in_dims: Vec<usize> = in_nodes.iter().map(|n| self.nodes[n].dim()).collect();
        let out_dims: Vec<usize> = out_nodes.iter().map(|n| self.nodes[n].dim()).collect();
        if in_dims != table.in_dims() || out_dims != table.out_dims() {
            return Err(Error::Dimension(format!(
                "edge '{name}' table dims do not match node dims"
            )));
        }
        for n in &out_nodes {
            if self.edges.iter().any(|e| e.out_nodes.contains(n)) {
                return Err(Error::Structure(format!(
                    "node '{n}' already outgoing of another edge"
                )));
            }
        }
        self.edges.push(Hyperedge { name, in_nodes, out_nodes, table });
        if self.topological_edge_order().is_err() {
            let bad = self.edges.pop().expect("just pushed");
            return Err(Error::Structure(format!("edge '{}' would create a cycle", bad.name)));
        }
        Ok(())
    }

    /// The declared nodes in insertion order.
    pub fn nodes(&self) -> impl Iterator<Item = &Variable> {
        self.nodes.values()
    }

    /// Looks up a node variable.
    pub fn node(&self, name: &str) -> Option<&Variable> {
        self.nodes.get(name)
    }

    /// The hyperedges in insertion order.
    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    /// Input nodes: never outgoing of any edge, in declaration order.
    pub fn input_nodes(&self) -> Vec<&Variable> {
        self.nodes
            .values()
            .filter(|v| !self.edges.iter().any(|e| e.out_nodes.contains(&v.name().to_string())))
            .collect()
    }

    /// Output nodes: outgoing of some edge and never consumed, in declaration
    /// order.
    pub fn output_nodes(&self) -> Vec<&Variable> {
        self.nodes
            .values()
            .filter(|v| {
                let name = v.name().to_string();
                self.edges.iter().any(|e| e.out_nodes.contains(&name))
                    && !self.edges.iter().any(|e| e.in_nodes.contains(&name))
            })
            .collect()
    }

    /// Edges sorted so every edge appears after the producers of its inputs.
    /// Fails on a cycle.
    pub fn topological_edge_order(&self) -> Result<Vec<usize>> {
        let producer: IndexMap<&str, usize> = self
            .edges
            .iter()
            .enumerate()
            .flat_map(|(i, e)| e.out_nodes.iter().map(move |n| (n.as_str(), i)))
            .collect();
        let mut order = Vec::new();
        let mut state = vec![0u8; self.edges.len()]; // 0 new, 1 visiting, 2 done
        fn visit(
            i: usize,
            edges: &[Hyperedge],
            producer: &IndexMap<&str, usize>,
            state: &mut [u8],
            order: &mut Vec<usize>,
        ) -> Result<()> {
            match state[i] {
                2 => return Ok(()),
                1 => return Err(Error::Structure("decomposition graph has a cycle".into())),
                _ => {}
            }
            state[i] = 1;
            for n in &edges[i].in_nodes {
                if let Some(&p) = producer.get(n.as_str()) {
                    visit(p, edges, producer, state, order)?;
                }
            }
            state[i] = 2;
            order.push(i);
            Ok(())
        }
        for i in 0..self.edges.len() {
            visit(i, &self.edges, &producer, &mut state, &mut order)?;
        }
        Ok(order)
    }

    /// Evaluates the composite function by direct recursive table evaluation.
    /// `inputs` lists states of the input nodes in declaration order; the
    /// result lists states of the output nodes in declaration order.
    pub fn evaluate_composition(&self, inputs: &[usize]) -> Result<Vec<usize>> {
        let input_nodes = self.input_nodes();
        if inputs.len() != input_nodes.len() {
            return Err(Error::Index(format!(
                "expected {} input states, got {}",
                input_nodes.len(),
                inputs.len()
            )));
        }
        let mut values: IndexMap<String, usize> = IndexMap::new();
        for (v, &s) in input_nodes.iter().zip(inputs) {
            if s >= v.dim() {
                return Err(Error::Index(format!(
                    "input state {s} out of range for '{}' (dim {})",
                    v.name(),
                    v.dim()
                )));
            }
            values.insert(v.name().to_string(), s);
        }
        for i in self.topological_edge_order()? {
            let e = &self.edges[i];
            let in_states: Vec<usize> = e.in_nodes.iter().map(|n| values[n]).collect();
            let out_states = e.table.evaluate(&in_states)?.to_vec();
            for (n, s) in e.out_nodes.iter().zip(out_states) {
                values.insert(n.clone(), s);
            }
        }
        Ok(self.output_nodes().iter().map(|v| values[v.name()]).collect())
    }

    /// Compiles the graph to a tensor network with one basis-encoding core per
    /// hyperedge (core name = edge name). Contracting the result with the
    /// inputs and outputs open equals the basis encoding of the composite
    /// function.
    pub fn compile(&self) -> Result<TensorNetwork> {
        self.topological_edge_order()?;
        let mut net = TensorNetwork::new();
        for e in &self.edges {
            let in_vars: Vec<Variable> = e.in_nodes.iter().map(|n| self.nodes[n].clone()).collect();
            let out_vars: Vec<Variable> =
                e.out_nodes.iter().map(|n| self.nodes[n].clone()).collect();
            net.insert(e.name.clone(), basis_encode(&e.table, &in_vars, &out_vars)?)?;
        }
        Ok(net)
    }

    /// In/out leg names per edge, as needed by directed belief propagation.
    pub fn edge_roles(&self) -> IndexMap<String, (Vec<String>, Vec<String>)> {
        self.edges
            .iter()
            .map(|e| (e.name.clone(), (e.in_nodes.clone(), e.out_nodes.clone())))
            .collect()
    }
}

/// Builds the m-adic adder graph: two little-endian `d`-digit inputs
/// `I_0..I_{d-1}` and `J_0..J_{d-1}` (dimension m), `d−1` carry nodes
/// `Z_0..Z_{d-2}` (dimension 2), and `d+1` output digits `O_0..O_d` (the top
/// digit of dimension 2). Edge k carries the local summation
/// `(z+i+j) mod m, (z+i+j) div m`; the first edge has no carry input.
pub fn build_madic_adder(m: usize, d: usize) -> Result<DecompositionGraph> {
    if m < 2 {
        return Err(Error::Input(format!("madic base must be >= 2, got {m}")));
    }
    if d < 1 {
        return Err(Error::Input(format!("madic digit count must be >= 1, got {d}")));
    }
    let mut g = DecompositionGraph::new();
    for k in 0..d {
        g.add_node(format!("I_{k}"), m)?;
        g.add_node(format!("J_{k}"), m)?;
    }
    for k in 0..d.saturating_sub(1) {
        g.add_node(format!("Z_{k}"), 2)?;
    }
    for k in 0..d {
        g.add_node(format!("O_{k}"), m)?;
    }
    g.add_node(format!("O_{d}"), 2)?;
    for k in 0..d {
        let (in_nodes, in_dims): (Vec<String>, Vec<usize>) = if k == 0 {
            (vec![format!("I_0"), format!("J_0")], vec![m, m])
        } else {
            (vec![format!("Z_{}", k - 1), format!("I_{k}"), format!("J_{k}")], vec![2, m, m])
        };
        let (out_nodes, out_dims): (Vec<String>, Vec<usize>) = if k == d - 1 {
            (vec![format!("O_{k}"), format!("O_{d}")], vec![m, 2])
        } else {
            (vec![format!("O_{k}"), format!("Z_{k}")], vec![m, 2])
        };
        let table = FunctionTable::tabulate(in_dims.clone(), out_dims, move |idx| {
            let total: usize = idx.iter().sum();
            vec![total % m, total / m]
        })?;
        g.add_edge(format!("sum_{k}"), in_nodes, out_nodes, table)?;
    }
    Ok(g)
}

/// The monolithic exactly-one boolean tensor over the given variables: 1 iff
/// precisely one variable is in state 1. Capped at 8 variables; use the CP/TT
/// builders beyond that.
pub fn exactly_one_dense(vars: &[Variable]) -> Result<Tensor> {
    if vars.is_empty() {
        return Err(Error::Arity("exactly-one needs at least one variable".into()));
    }
    if vars.len() > 8 {
        return Err(Error::Arity(
            "monolithic exactly-one is capped at 8 variables; use exactly_one_cp/exactly_one_tt"
                .into(),
        ));
    }
    if let Some(v) = vars.iter().find(|v| v.dim() != 2) {
        return Err(Error::Dimension(format!("exactly-one variable '{}' must have dim 2", v.name())));
    }
    let mut t = Tensor::zeros(vars.to_vec());
    let n = t.len();
    let mut coords = vec![0.0; n];
    for (offset, idx) in index_space(vars).enumerate() {
        if idx.iter().filter(|&&i| i == 1).count() == 1 {
            coords[offset] = 1.0;
        }
    }
    t = Tensor::from_dense(vars.to_vec(), coords)?;
    Ok(t)
}

/// CP decomposition of the exactly-one constraint: `d` matrix cores
/// `T_k[X_k, I] = e_0 ⊗ 1 + (e_1 − e_0) ⊗ e_k` over one hidden variable `I`
/// of dimension `d` (named `<prefix>_dV`). Contracting over the hidden
/// variable yields the exactly-one tensor.
pub fn exactly_one_cp(vars: &[Variable], prefix: &str) -> Result<TensorNetwork> {
    if vars.is_empty() {
        return Err(Error::Arity("exactly-one needs at least one variable".into()));
    }
    if let Some(v) = vars.iter().find(|v| v.dim() != 2) {
        return Err(Error::Dimension(format!("exactly-one variable '{}' must have dim 2", v.name())));
    }
    let d = vars.len();
    let hidden = Variable::new(format!("{prefix}_dV"), d);
    let mut net = TensorNetwork::new();
    for (k, x) in vars.iter().enumerate() {
        // Row-major over (X_k, I): T[0,i] = 1 for i != k, T[1,i] = [i == k].
        let mut coords = vec![0.0; 2 * d];
        for i in 0..d {
            coords[i] = if i == k { 0.0 } else { 1.0 };
            coords[d + i] = if i == k { 1.0 } else { 0.0 };
        }
        let t = Tensor::from_dense(vec![x.clone(), hidden.clone()], coords)?;
        net.insert(format!("{prefix}_{k}"), t)?;
    }
    Ok(net)
}

/// Tensor-train decomposition of the exactly-one constraint with `d−1` hidden
/// bond variables of dimension 2 (named `<prefix>_b<k>_dV`). Bond `k` holds
/// whether one of the first `k+1` variables is already true. Needs `d ≥ 2`;
/// a single variable is just the one-hot `e_1`.
pub fn exactly_one_tt(vars: &[Variable], prefix: &str) -> Result<TensorNetwork> {
    if vars.len() < 2 {
        return Err(Error::Structure(
            "tensor-train exactly-one needs at least 2 variables; use a one-hot for d = 1".into(),
        ));
    }
    if let Some(v) = vars.iter().find(|v| v.dim() != 2) {
        return Err(Error::Dimension(format!("exactly-one variable '{}' must have dim 2", v.name())));
    }
    let d = vars.len();
    let bond = |k: usize| Variable::new(format!("{prefix}_b{k}_dV"), 2);
    let mut net = TensorNetwork::new();
    // First core over (X_0, B_0): the bond copies X_0.
    let first = Tensor::from_dense(vec![vars[0].clone(), bond(0)], vec![1.0, 0.0, 0.0, 1.0])?;
    net.insert(format!("{prefix}_0"), first)?;
    // Middle cores over (B_{k-1}, X_k, B_k): X_k = 0 copies the bond; X_k = 1
    // requires no earlier true variable and raises the bond.
    for k in 1..d - 1 {
        let mut coords = vec![0.0; 8];
        // Row-major over (B_{k-1}, X_k, B_k).
        coords[0] = 1.0; // b=0, x=0 -> b'=0
        coords[3] = 1.0; // b=0, x=1 -> b'=1
        coords[5] = 1.0; // b=1, x=0 -> b'=1
        let t = Tensor::from_dense(vec![bond(k - 1), vars[k].clone(), bond(k)], coords)?;
        net.insert(format!("{prefix}_{k}"), t)?;
    }
    // Last core over (B_{d-2}, X_{d-1}): exactly one overall iff the bond and
    // the last variable disagree.
    let last = Tensor::from_dense(vec![bond(d - 2), vars[d - 1].clone()], vec![0.0, 1.0, 1.0, 0.0])?;
    net.insert(format!("{prefix}_{}", d - 1), last)?;
    Ok(net)
}
