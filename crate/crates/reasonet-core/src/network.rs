//! Tensor networks and their contraction.
//!
//! A [`TensorNetwork`] is an associative map core-name → [`Tensor`] over a
//! shared variable registry; the hypergraph is implied by the leg sets.
//! Contraction sums over all assignments of closed variables the product of
//! all core coordinates, leaving the requested open variables as result axes.

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::tensor::{Tensor, Variable};

/// A named collection of tensors sharing a variable registry.
#[derive(Debug, Clone, Default)]
pub struct TensorNetwork {
    cores: IndexMap<String, Tensor>,
}

/// A message between two cores of a network: a tensor over (a subset of) the
/// shared variables of the ordered pair.
#[derive(Debug, Clone)]
pub struct Message {
    /// Sending core name.
    pub from: String,
    /// Receiving core name.
    pub to: String,
    /// Tensor over the shared variables of the two cores.
    pub payload: Tensor,
}

impl TensorNetwork {
    /// Creates an empty network.
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a core, checking name uniqueness and dimension consistency of
    /// shared variables.
    pub fn insert(&mut self, name: impl Into<String>, tensor: Tensor) -> Result<()> {
        let name = name.into();
        if self.cores.contains_key(&name) {
            return Err(Error::Structure(format!("duplicate core name '{name}'")));
        }
        for leg in tensor.legs() {
            if let Some(existing) = self.variable(leg.name()) {
                if existing.dim() != leg.dim() {
                    return Err(Error::Dimension(format!(
                        "variable '{}' has dims {} and {} across cores",
                        leg.name(),
                        existing.dim(),
                        leg.dim()
                    )));
                }
            }
        }
        self.cores.insert(name, tensor);
        Ok(())
    }

    /// Builds a network from (name, tensor) pairs.
    pub fn from_cores<I, S>(cores: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Tensor)>,
        S: Into<String>,
    {
        let mut net = Self::new();
        for (name, t) in cores {
            net.insert(name, t)?;
        }
        Ok(net)
    }

    /// Core names in insertion order.
    pub fn core_names(&self) -> impl Iterator<Item = &str> {
        self.cores.keys().map(String::as_str)
    }

    /// Looks up a core by name.
    pub fn core(&self, name: &str) -> Option<&Tensor> {
        self.cores.get(name)
    }

    /// Number of cores.
    pub fn len(&self) -> usize {
        self.cores.len()
    }

    /// True iff the network holds no cores.
    pub fn is_empty(&self) -> bool {
        self.cores.is_empty()
    }

    /// Iterates over (name, tensor) pairs in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor)> {
        self.cores.iter().map(|(n, t)| (n.as_str(), t))
    }

    /// The variable registry: every leg appearing in some core, first
    /// occurrence wins the position.
    pub fn variables(&self) -> Vec<Variable> {
        let mut vars: Vec<Variable> = Vec::new();
        for t in self.cores.values() {
            for leg in t.legs() {
                if !vars.iter().any(|v| v.name() == leg.name()) {
                    vars.push(leg.clone());
                }
            }
        }
        vars
    }

    /// Looks up a variable in the registry.
    pub fn variable(&self, name: &str) -> Option<Variable> {
        self.cores
            .values()
            .flat_map(|t| t.legs())
            .find(|v| v.name() == name)
            .cloned()
    }

    /// Names of cores whose legs include the given variable.
    pub fn cores_with_variable(&self, var: &str) -> Vec<&str> {
        self.cores
            .iter()
            .filter(|(_, t)| t.leg(var).is_some())
            .map(|(n, _)| n.as_str())
            .collect()
    }

    /// Contracts the network onto the given open variables using the greedy
    /// pairwise path. See [`contract_with_order`](Self::contract_with_order)
    /// for the explicit-order hook.
    pub fn contract(&self, open: &[Variable]) -> Result<Tensor> {
        self.contract_with_order(open, None)
    }

    /// Contracts the network onto `open`, optionally folding cores in the
    /// explicitly given name order instead of the greedy pairwise schedule.
    ///
    /// Open variables appearing in no core contribute a trivial all-ones
    /// factor; an empty network with an empty open set contracts to the
    /// scalar 1.
    pub fn contract_with_order(&self, open: &[Variable], order: Option<&[String]>) -> Result<Tensor> {
        for v in open {
            if let Some(w) = self.variable(v.name()) {
                if w.dim() != v.dim() {
                    return Err(Error::Dimension(format!(
                        "open variable '{}' declared with dim {} but registered with {}",
                        v.name(),
                        v.dim(),
                        w.dim()
                    )));
                }
            }
        }
        let open_names: Vec<&str> = open.iter().map(Variable::name).collect();
        let mut pool: Vec<Tensor> = match order {
            None => self.cores.values().cloned().collect(),
            Some(names) => {
                if names.len() != self.cores.len() {
                    return Err(Error::Structure(format!(
                        "explicit order lists {} cores, network has {}",
                        names.len(),
                        self.cores.len()
                    )));
                }
                let mut pool = Vec::with_capacity(names.len());
                for n in names {
                    let t = self
                        .cores
                        .get(n)
                        .ok_or_else(|| Error::Structure(format!("unknown core '{n}' in order")))?;
                    pool.push(t.clone());
                }
                pool
            }
        };

        let result = match order {
            Some(_) => fold_in_sequence(&mut pool, &open_names)?,
            None => {
                let weight = pin_determined_vars(&mut pool, &open_names);
                let t = greedy_contract(&mut pool, &open_names)?;
                if weight == 1.0 {
                    t
                } else {
                    t.scale(weight)
                }
            }
        };

        // Sum out anything not requested open, then append explicit
        // ones-factors for open variables the network never mentioned.
        let mut result = result.project_onto(
            &result
                .legs()
                .iter()
                .filter(|v| open_names.contains(&v.name()))
                .cloned()
                .collect::<Vec<_>>(),
        );
        for v in open {
            if result.leg(v.name()).is_none() {
                result = result.multiply(&Tensor::ones(vec![v.clone()]))?;
            }
        }
        result.transpose_to(open)
    }

    /// The partition function: the full contraction as a scalar.
    pub fn partition_function(&self) -> Result<f64> {
        self.contract(&[])?.scalar_value()
    }

    /// The normalization of the network with respect to out- and in-variables:
    /// the contraction onto `out ∪ in`, each in-slice divided by its total
    /// mass over the out-variables. Zero-mass slices become the uniform tensor
    /// `1/(Π out dims)`; with an empty in-set the whole tensor is divided by
    /// the partition function (uniform if that is zero).
    pub fn normalize(&self, out: &[Variable], input: &[Variable]) -> Result<Tensor> {
        for v in out {
            if input.iter().any(|w| w.name() == v.name()) {
                return Err(Error::Dimension(format!(
                    "variable '{}' cannot be both out and in",
                    v.name()
                )));
            }
        }
        let mut all: Vec<Variable> = out.to_vec();
        all.extend(input.iter().cloned());
        let joint = self.contract(&all)?;
        Ok(normalize_tensor(&joint, out, input))
    }
}

/// Slice-normalizes a tensor over `out` given `input`; see
/// [`TensorNetwork::normalize`]. The tensor must carry exactly `out ∪ input`
/// as legs.
pub fn normalize_tensor(joint: &Tensor, out: &[Variable], input: &[Variable]) -> Tensor {
    // Order legs as input-then-out so each in-slice is a contiguous block.
    let mut order: Vec<Variable> = input.to_vec();
    order.extend(out.iter().cloned());
    let t = joint
        .transpose_to(&order)
        .expect("normalize_tensor: legs must equal out ∪ input");
    let out_size: usize = out.iter().map(Variable::dim).product();
    let uniform = 1.0 / out_size as f64;
    let mut coords = t.dense_coords();
    for slice in coords.chunks_mut(out_size) {
        let mass: f64 = slice.iter().sum();
        if mass == 0.0 {
            slice.fill(uniform);
        } else {
            for c in slice.iter_mut() {
                *c /= mass;
            }
        }
    }
    let normalized = Tensor::from_dense(order, coords).expect("shape preserved");
    // Present the result with out-legs first, matching the declared order.
    let mut final_order: Vec<Variable> = out.to_vec();
    final_order.extend(input.iter().cloned());
    normalized.transpose_to(&final_order).expect("permutation of own legs")
}

/// Folds the pool left-to-right, eliminating closed variables as soon as they
/// no longer occur in any remaining tensor.
fn fold_in_sequence(pool: &mut Vec<Tensor>, open: &[&str]) -> Result<Tensor> {
    if pool.is_empty() {
        return Ok(Tensor::scalar(1.0));
    }
    while pool.len() > 1 {
        let b = pool.remove(1);
        let a = pool.remove(0);
        let merged = a.multiply(&b)?;
        pool.insert(0, eliminate_dead_vars(merged, pool, open));
    }
    Ok(pool.pop().expect("pool nonempty"))
}

/// Absorbs single-leg one-hot cores over closed variables by slicing every
/// other core at the determined state; returns the accumulated scalar weight.
/// Exact: a closed variable pinned to one nonzero state contributes only that
/// state's slice to the sum. Cascades, so evidence-heavy networks shrink
/// before the greedy schedule runs.
fn pin_determined_vars(pool: &mut Vec<Tensor>, open: &[&str]) -> f64 {
    let mut weight = 1.0;
    loop {
        let found = pool.iter().position(|t| {
            t.legs().len() == 1
                && !open.contains(&t.legs()[0].name())
                && t.dense_coords().iter().filter(|&&c| c != 0.0).count() == 1
        });
        let Some(i) = found else { return weight };
        let t = pool.swap_remove(i);
        let name = t.legs()[0].name().to_string();
        let coords = t.dense_coords();
        let state = coords.iter().position(|&c| c != 0.0).expect("one nonzero");
        weight *= coords[state];
        for u in pool.iter_mut() {
            if u.leg(&name).is_some() {
                *u = u.fix_leg(&name, state).expect("leg present");
            }
        }
    }
}

/// Greedy pairwise contraction: repeatedly merges the pair whose intermediate
/// tensor (after eliminating dead variables) would be smallest.
fn greedy_contract(pool: &mut Vec<Tensor>, open: &[&str]) -> Result<Tensor> {
    if pool.is_empty() {
        return Ok(Tensor::scalar(1.0));
    }
    // Pre-shrink each core: variables private to a single core and not open
    // can be summed out immediately.
    let mut counts: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    for t in pool.iter() {
        for v in t.legs() {
            *counts.entry(v.name().to_string()).or_insert(0) += 1;
        }
    }
    for t in pool.iter_mut() {
        let keep: Vec<Variable> = t
            .legs()
            .iter()
            .filter(|v| counts[v.name()] > 1 || open.contains(&v.name()))
            .cloned()
            .collect();
        if keep.len() < t.legs().len() {
            *t = t.project_onto(&keep);
        }
    }
    while pool.len() > 1 {
        // How often each variable occurs across the pool; a variable can be
        // summed out of a merged pair iff it occurs nowhere else and is not
        // open.
        let mut counts: std::collections::HashMap<&str, usize> = std::collections::HashMap::new();
        for t in pool.iter() {
            for v in t.legs() {
                *counts.entry(v.name()).or_insert(0) += 1;
            }
        }
        let (mut best_i, mut best_j, mut best_size) = (0usize, 1usize, usize::MAX);
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                let size = merged_size(&pool[i], &pool[j], &counts, open);
                if size < best_size {
                    (best_i, best_j, best_size) = (i, j, size);
                }
            }
        }
        let b = pool.remove(best_j);
        let a = pool.remove(best_i);
        let merged = a.multiply(&b)?;
        let merged = eliminate_dead_vars(merged, pool, open);
        pool.push(merged);
    }
    Ok(pool.pop().expect("pool nonempty"))
}

/// Size of the intermediate produced by merging `a` and `b`, after eliminating
/// variables that occur nowhere else and are not open. `counts` holds the
/// occurrence count of each variable across the whole pool (including a, b).
fn merged_size(
    a: &Tensor,
    b: &Tensor,
    counts: &std::collections::HashMap<&str, usize>,
    open: &[&str],
) -> usize {
    let mut size = 1usize;
    let union = a
        .legs()
        .iter()
        .chain(b.legs().iter().filter(|v| a.leg(v.name()).is_none()));
    for v in union {
        let in_pair = [a, b].iter().filter(|t| t.leg(v.name()).is_some()).count();
        let elsewhere = counts.get(v.name()).copied().unwrap_or(0) > in_pair;
        if elsewhere || open.contains(&v.name()) {
            size = size.saturating_mul(v.dim());
        }
    }
    size
}

/// Sums out every leg of `t` that is neither open nor present in any tensor of
/// `rest`.
fn eliminate_dead_vars(t: Tensor, rest: &[Tensor], open: &[&str]) -> Tensor {
    let keep: Vec<Variable> = t
        .legs()
        .iter()
        .filter(|v| {
            open.contains(&v.name()) || rest.iter().any(|u| u.leg(v.name()).is_some())
        })
        .cloned()
        .collect();
    if keep.len() == t.legs().len() {
        t
    } else {
        t.project_onto(&keep)
    }
}
