//! The JSON network-spec document: declared variables plus cores given as
//! expressions, dense/sparse coordinate lists, or evidence one-hots.

use std::collections::BTreeMap;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use reasonet_core::logic::formula_tensor_over;
use reasonet_core::tensor::{ElementaryTerm, Tensor, Variable};
use reasonet_core::{Connective, Expression, TensorNetwork};

use crate::error::CliError;

/// A parsed spec document before network construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkSpecDoc {
    /// Declared variable dimensions.
    #[serde(default)]
    pub variables: BTreeMap<String, usize>,
    /// Core definitions by name.
    pub cores: BTreeMap<String, CoreSpec>,
}

/// One core: exactly one of the four payload variants, plus optional
/// input/output leg roles for directed propagation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoreSpec {
    /// Nested-list boolean expression, e.g. `["and", ["or", "X_0", "X_1"], ["not", "X_2"]]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expression: Option<Value>,
    /// Dense coordinates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dense: Option<DenseSpec>,
    /// Sparse sum of elementary terms.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sparse: Option<SparseSpec>,
    /// One-hot evidence on a binary atom.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<EvidenceSpec>,
    /// Input legs for directed propagation.
    #[serde(rename = "in", skip_serializing_if = "Option::is_none")]
    pub in_legs: Option<Vec<String>>,
    /// Output legs for directed propagation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_legs: Option<Vec<String>>,
}

/// Dense payload: leg names, their dimensions, and row-major values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DenseSpec {
    /// Leg names in declaration order.
    pub colors: Vec<String>,
    /// Leg dimensions matching `colors`.
    pub shape: Vec<usize>,
    /// Row-major coordinates.
    pub values: Vec<f64>,
}

/// Sparse payload: leg names, dimensions, and weighted partial assignments.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SparseSpec {
    /// Leg names in declaration order.
    pub colors: Vec<String>,
    /// Leg dimensions matching `colors`.
    pub shape: Vec<usize>,
    /// Elementary terms; positions may omit legs (broadcast).
    pub terms: Vec<TermSpec>,
}

/// One weighted partial assignment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermSpec {
    /// Term weight.
    pub value: f64,
    /// Fixed states by leg name.
    pub position: BTreeMap<String, usize>,
}

/// Evidence payload: a binary atom pinned to a truth value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvidenceSpec {
    /// Atom name.
    pub atom: String,
    /// Required truth value.
    pub truth: bool,
}

/// Parses a nested-list JSON value into an expression: strings are atoms,
/// arrays are `[connective, arg, …]`.
pub fn parse_expression(v: &Value) -> Result<Expression, CliError> {
    match v {
        Value::String(s) => Ok(Expression::atom(s.clone())),
        Value::Array(items) => {
            let head = items
                .first()
                .and_then(Value::as_str)
                .ok_or_else(|| CliError::parse("expression list must start with a connective name"))?;
            let connective = Connective::parse(head)
                .map_err(|e| CliError::parse(format!("bad connective '{head}': {e}")))?;
            let args: Vec<Expression> =
                items[1..].iter().map(parse_expression).collect::<Result<_, _>>()?;
            Expression::apply(connective, args)
                .map_err(|e| CliError::parse(format!("bad expression: {e}")))
        }
        other => Err(CliError::parse(format!("expression must be a string or list, got {other}"))),
    }
}

/// Serializes an expression back into the nested-list form.
pub fn expression_to_value(e: &Expression) -> Value {
    match e {
        Expression::Atom(a) => Value::String(a.clone()),
        Expression::App(c, args) => {
            let mut items = vec![Value::String(c.name().to_string())];
            items.extend(args.iter().map(expression_to_value));
            Value::Array(items)
        }
    }
}

/// Per-core (input legs, output legs) roles for directed propagation; cores
/// without declared roles are absent.
pub type Roles = IndexMap<String, (Vec<String>, Vec<String>)>;

/// Builds the tensor network (and any declared directed roles) from a parsed
/// document.
pub fn build_network(doc: &NetworkSpecDoc) -> Result<(TensorNetwork, Roles), CliError> {
    let mut declared = doc.variables.clone();
    // Auto-declare expression and evidence atoms at dimension 2.
    for core in doc.cores.values() {
        if let Some(v) = &core.expression {
            for a in parse_expression(v)?.atoms() {
                declared.entry(a).or_insert(2);
            }
        }
        if let Some(ev) = &core.evidence {
            declared.entry(ev.atom.clone()).or_insert(2);
        }
    }

    let mut net = TensorNetwork::new();
    for (name, core) in &doc.cores {
        let variants = usize::from(core.expression.is_some())
            + usize::from(core.dense.is_some())
            + usize::from(core.sparse.is_some())
            + usize::from(core.evidence.is_some());
        if variants != 1 {
            return Err(CliError::parse(format!(
                "core '{name}' must have exactly one of expression/dense/sparse/evidence"
            )));
        }
        let tensor = if let Some(v) = &core.expression {
            let e = parse_expression(v)?;
            for a in e.atoms() {
                if declared[&a] != 2 {
                    return Err(CliError::parse(format!(
                        "core '{name}': atom '{a}' must have dim 2, declared {}",
                        declared[&a]
                    )));
                }
            }
            formula_tensor_over(&e, &e.atoms())
                .map_err(|err| CliError::parse(format!("core '{name}': {err}")))?
        } else if let Some(d) = &core.dense {
            let legs = spec_legs(name, &d.colors, &d.shape, &declared)?;
            Tensor::from_dense(legs, d.values.clone())
                .map_err(|err| CliError::parse(format!("core '{name}': {err}")))?
        } else if let Some(s) = &core.sparse {
            let legs = spec_legs(name, &s.colors, &s.shape, &declared)?;
            let terms: Vec<ElementaryTerm> = s
                .terms
                .iter()
                .map(|t| ElementaryTerm { value: t.value, position: t.position.clone() })
                .collect();
            Tensor::from_sparse(legs, terms)
                .map_err(|err| CliError::parse(format!("core '{name}': {err}")))?
        } else {
            let ev = core.evidence.as_ref().expect("one variant present");
            let dim = declared[&ev.atom];
            if dim != 2 {
                return Err(CliError::parse(format!(
                    "core '{name}': evidence atom '{}' must have dim 2, declared {dim}",
                    ev.atom
                )));
            }
            let v = Variable::new(ev.atom.clone(), 2);
            Tensor::one_hot(v, usize::from(ev.truth))
                .map_err(|err| CliError::parse(format!("core '{name}': {err}")))?
        };
        net.insert(name, tensor)
            .map_err(|err| CliError::parse(format!("core '{name}': {err}")))?;
    }

    let mut roles = Roles::new();
    for (name, core) in &doc.cores {
        if core.in_legs.is_some() || core.out_legs.is_some() {
            roles.insert(
                name.clone(),
                (
                    core.in_legs.clone().unwrap_or_default(),
                    core.out_legs.clone().unwrap_or_default(),
                ),
            );
        }
    }
    Ok((net, roles))
}

fn spec_legs(
    core: &str,
    colors: &[String],
    shape: &[usize],
    declared: &BTreeMap<String, usize>,
) -> Result<Vec<Variable>, CliError> {
    if colors.len() != shape.len() {
        return Err(CliError::parse(format!(
            "core '{core}': {} colors for {} shape entries",
            colors.len(),
            shape.len()
        )));
    }
    colors
        .iter()
        .zip(shape)
        .map(|(c, &d)| {
            if let Some(&dd) = declared.get(c) {
                if dd != d {
                    return Err(CliError::parse(format!(
                        "core '{core}': variable '{c}' declared with dim {dd}, core uses {d}"
                    )));
                }
            }
            Ok(Variable::new(c.clone(), d))
        })
        .collect()
}

/// Loads a spec document from a JSON file and builds the network.
pub fn load_spec(path: impl AsRef<Path>) -> Result<(TensorNetwork, Roles), CliError> {
    let (_, net, roles) = load_spec_doc(path)?;
    Ok((net, roles))
}

/// Like [`load_spec`] but also returns the parsed document (for access to
/// declared-but-unused variables).
pub fn load_spec_doc(
    path: impl AsRef<Path>,
) -> Result<(NetworkSpecDoc, TensorNetwork, Roles), CliError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    let doc: NetworkSpecDoc = serde_json::from_str(&text)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let (net, roles) = build_network(&doc)?;
    Ok((doc, net, roles))
}

/// Serializes a network back into a spec document with dense cores.
pub fn network_to_doc(net: &TensorNetwork) -> NetworkSpecDoc {
    let variables: BTreeMap<String, usize> =
        net.variables().into_iter().map(|v| (v.name().to_string(), v.dim())).collect();
    let cores: BTreeMap<String, CoreSpec> = net
        .iter()
        .map(|(name, t)| {
            (
                name.to_string(),
                CoreSpec {
                    expression: None,
                    dense: Some(DenseSpec {
                        colors: t.leg_names().iter().map(|s| s.to_string()).collect(),
                        shape: t.legs().iter().map(Variable::dim).collect(),
                        values: t.dense_coords(),
                    }),
                    sparse: None,
                    evidence: None,
                    in_legs: None,
                    out_legs: None,
                },
            )
        })
        .collect();
    NetworkSpecDoc { variables, cores }
}

/// Saves a network as a dense spec document.
pub fn save_spec(net: &TensorNetwork, path: impl AsRef<Path>) -> Result<(), CliError> {
    let doc = network_to_doc(net);
    let text = serde_json::to_string_pretty(&doc).expect("document serializes");
    std::fs::write(path.as_ref(), text + "\n")
        .map_err(|e| CliError::parse(format!("cannot write {}: {e}", path.as_ref().display())))
}

/// The JSON document of one tensor (colors, shape, row-major values).
pub fn tensor_to_value(t: &Tensor) -> Value {
    serde_json::json!({
        "colors": t.leg_names(),
        "shape": t.legs().iter().map(Variable::dim).collect::<Vec<_>>(),
        "values": t.dense_coords(),
    })
}

/// Saves a tensor document to a JSON file.
pub fn save_tensor(t: &Tensor, path: impl AsRef<Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&tensor_to_value(t)).expect("document serializes");
    std::fs::write(path.as_ref(), text + "\n")
        .map_err(|e| CliError::parse(format!("cannot write {}: {e}", path.as_ref().display())))
}
