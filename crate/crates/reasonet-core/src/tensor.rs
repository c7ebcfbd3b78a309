//! Variable-decorated tensors.
//!
//! A [`Tensor`] is a real-valued multiway array whose axes carry named
//! categorical variables ([`Variable`]). Coordinates are stored either densely
//! (flat row-major over the declared leg order) or sparsely as a sum of
//! elementary terms `(value, partial assignment)`, mirroring a CP-style sum of
//! one-hot products. All operations are pure; tensors are immutable after
//! construction.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Absolute tolerance for general coordinate equality checks.
pub const EQ_TOL: f64 = 1e-9;

/// Absolute threshold below which a coordinate counts as zero for support
/// (nonzero-indicator) purposes. Legitimate zeros in this system are exact
/// zeros produced by boolean algebra, so this is deliberately tight.
pub const ZERO_TOL: f64 = 1e-12;

/// A named categorical variable with a finite number of states.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    name: String,
    dim: usize,
}

impl Variable {
    /// Creates a variable; `dim` must be at least 1.
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        assert!(dim >= 1, "variable dimension must be >= 1");
        Self { name: name.into(), dim }
    }

    /// The variable's name.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// The number of states.
    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// One elementary term of a sparse tensor: a value times a product of one-hot
/// vectors at the given positions; legs absent from the map are trivial
/// (all-ones) factors.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryTerm {
    /// Scalar weight of the term.
    pub value: f64,
    /// Partial assignment leg-name → state.
    pub position: BTreeMap<String, usize>,
}

/// Coordinate storage of a tensor.
#[derive(Debug, Clone, PartialEq)]
pub enum Storage {
    /// Flat row-major coordinates over the declared leg order.
    Dense(Vec<f64>),
    /// Sum of elementary `(value, partial assignment)` terms.
    Sparse(Vec<ElementaryTerm>),
}

/// A real-valued multiway array with named categorical legs.
#[derive(Debug, Clone)]
pub struct Tensor {
    legs: Vec<Variable>,
    storage: Storage,
}

/// Computes row-major strides for the given leg dimensions.
fn strides(legs: &[Variable]) -> Vec<usize> {
    let mut s = vec![1usize; legs.len()];
    for k in (0..legs.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * legs[k + 1].dim();
    }
    s
}

fn check_distinct_legs(legs: &[Variable]) -> Result<()> {
    for (i, a) in legs.iter().enumerate() {
        for b in &legs[i + 1..] {
            if a.name() == b.name() {
                return Err(Error::Dimension(format!(
                    "duplicate leg name '{}' within one tensor",
                    a.name()
                )));
            }
        }
    }
    Ok(())
}

impl Tensor {
    /// Creates a dense tensor from flat row-major coordinates.
    pub fn from_dense(legs: Vec<Variable>, coords: Vec<f64>) -> Result<Self> {
        check_distinct_legs(&legs)?;
        let expected: usize = legs.iter().map(Variable::dim).product();
        if coords.len() != expected {
            return Err(Error::Dimension(format!(
                "expected {expected} coordinates for legs {:?}, got {}",
                legs.iter().map(Variable::name).collect::<Vec<_>>(),
                coords.len()
            )));
        }
        Ok(Self { legs, storage: Storage::Dense(coords) })
    }

    /// Creates a sparse tensor from elementary terms. Positions must reference
    /// declared legs and stay within their dimensions.
    pub fn from_sparse(legs: Vec<Variable>, terms: Vec<ElementaryTerm>) -> Result<Self> {
        check_distinct_legs(&legs)?;
        for term in &terms {
            for (name, &state) in &term.position {
                let leg = legs
                    .iter()
                    .find(|v| v.name() == name)
                    .ok_or_else(|| Error::Index(format!("sparse term references unknown leg '{name}'")))?;
                if state >= leg.dim() {
                    return Err(Error::Index(format!(
                        "sparse term state {state} out of range for leg '{name}' (dim {})",
                        leg.dim()
                    )));
                }
            }
        }
        Ok(Self { legs, storage: Storage::Sparse(terms) })
    }

    /// The scalar tensor (no legs) with the given value.
    pub fn scalar(value: f64) -> Self {
        Self { legs: Vec::new(), storage: Storage::Dense(vec![value]) }
    }

    /// All-zero dense tensor over the given legs.
    pub fn zeros(legs: Vec<Variable>) -> Self {
        let n: usize = legs.iter().map(Variable::dim).product();
        Self { legs, storage: Storage::Dense(vec![0.0; n]) }
    }

    /// All-ones dense tensor over the given legs (the trivial tensor).
    pub fn ones(legs: Vec<Variable>) -> Self {
        let n: usize = legs.iter().map(Variable::dim).product();
        Self { legs, storage: Storage::Dense(vec![1.0; n]) }
    }

    /// One-hot encoding of a state: the basis vector `e_state` over `var`.
    pub fn one_hot(var: Variable, state: usize) -> Result<Self> {
        if state >= var.dim() {
            return Err(Error::Index(format!(
                "state {state} out of range for variable '{}' (dim {})",
                var.name(),
                var.dim()
            )));
        }
        let mut coords = vec![0.0; var.dim()];
        coords[state] = 1.0;
        Ok(Self { legs: vec![var], storage: Storage::Dense(coords) })
    }

    /// Delta tensor over the given variables: coordinate 1 iff all indices
    /// agree. For a single variable this is the all-ones vector. All
    /// dimensions must be equal.
    pub fn delta(vars: Vec<Variable>) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::Dimension("delta tensor needs at least one variable".into()));
        }
        let d = vars[0].dim();
        if vars.iter().any(|v| v.dim() != d) {
            return Err(Error::Dimension(format!(
                "delta tensor requires equal dims, got {:?}",
                vars.iter().map(Variable::dim).collect::<Vec<_>>()
            )));
        }
        check_distinct_legs(&vars)?;
        let mut t = Tensor::zeros(vars.clone());
        let strd = strides(&vars);
        if let Storage::Dense(coords) = &mut t.storage {
            for i in 0..d {
                let offset: usize = strd.iter().map(|s| s * i).sum();
                coords[offset] = 1.0;
            }
        }
        Ok(t)
    }

    /// The ordered legs of the tensor.
    pub fn legs(&self) -> &[Variable] {
        &self.legs
    }

    /// Leg names in declared order.
    pub fn leg_names(&self) -> Vec<&str> {
        self.legs.iter().map(Variable::name).collect()
    }

    /// Looks up a leg by name.
    pub fn leg(&self, name: &str) -> Option<&Variable> {
        self.legs.iter().find(|v| v.name() == name)
    }

    /// Raw storage (dense coordinates or sparse terms).
    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    /// Total number of coordinates (product of leg dims).
    pub fn len(&self) -> usize {
        self.legs.iter().map(Variable::dim).product()
    }

    /// True iff the tensor is a scalar (no legs).
    pub fn is_empty(&self) -> bool {
        self.legs.is_empty()
    }

    /// Dense row-major coordinates, materializing sparse storage on demand.
    pub fn dense_coords(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Dense(c) => c.clone(),
            Storage::Sparse(terms) => {
                let mut coords = vec![0.0; self.len()];
                let strd = strides(&self.legs);
                // Each term adds its value on the sub-grid fixed by its
                // partial assignment; free legs range over all states.
                for term in terms {
                    let mut fixed_offset = 0usize;
                    let mut free_legs: Vec<usize> = Vec::new();
                    for (k, leg) in self.legs.iter().enumerate() {
                        match term.position.get(leg.name()) {
                            Some(&s) => fixed_offset += strd[k] * s,
                            None => free_legs.push(k),
                        }
                    }
                    let free_vars: Vec<Variable> =
                        free_legs.iter().map(|&k| self.legs[k].clone()).collect();
                    for idx in index_space(&free_vars) {
                        let offset: usize = fixed_offset
                            + free_legs
                                .iter()
                                .zip(&idx)
                                .map(|(&k, &i)| strd[k] * i)
                                .sum::<usize>();
                        coords[offset] += term.value;
                    }
                }
                coords
            }
        }
    }

    /// Converts to dense storage.
    pub fn to_dense(&self) -> Tensor {
        Tensor { legs: self.legs.clone(), storage: Storage::Dense(self.dense_coords()) }
    }

    /// Converts to sparse storage with one full-assignment term per nonzero
    /// coordinate.
    pub fn to_sparse(&self) -> Tensor {
        let coords = self.dense_coords();
        let mut terms = Vec::new();
        for (offset, &v) in coords.iter().enumerate() {
            if v != 0.0 {
                let idx = self.unravel(offset);
                let position = self
                    .legs
                    .iter()
                    .zip(&idx)
                    .map(|(leg, &i)| (leg.name().to_string(), i))
                    .collect();
                terms.push(ElementaryTerm { value: v, position });
            }
        }
        Tensor { legs: self.legs.clone(), storage: Storage::Sparse(terms) }
    }

    /// Converts a flat offset into a multi-index over the legs.
    pub fn unravel(&self, mut offset: usize) -> Vec<usize> {
        let strd = strides(&self.legs);
        let mut idx = vec![0usize; self.legs.len()];
        for (k, s) in strd.iter().enumerate() {
            idx[k] = offset / s;
            offset %= s;
        }
        idx
    }

    /// The coordinate addressed by a full assignment leg-name → state.
    pub fn coordinate(&self, assignment: &BTreeMap<String, usize>) -> Result<f64> {
        let strd = strides(&self.legs);
        let mut offset = 0usize;
        for (k, leg) in self.legs.iter().enumerate() {
            let state = *assignment.get(leg.name()).ok_or_else(|| {
                Error::Index(format!("assignment misses leg '{}'", leg.name()))
            })?;
            if state >= leg.dim() {
                return Err(Error::Index(format!(
                    "state {state} out of range for leg '{}' (dim {})",
                    leg.name(),
                    leg.dim()
                )));
            }
            offset += strd[k] * state;
        }
        Ok(self.dense_coords()[offset])
    }

    /// The coordinate at a positional multi-index over the declared leg order.
    pub fn at(&self, idx: &[usize]) -> f64 {
        let strd = strides(&self.legs);
        let offset: usize = strd.iter().zip(idx).map(|(s, &i)| s * i).sum();
        self.dense_coords()[offset]
    }

    /// True iff every coordinate lies in {0, 1} (within [`EQ_TOL`]).
    pub fn is_boolean(&self) -> bool {
        self.dense_coords()
            .iter()
            .all(|&c| (c - 0.0).abs() <= EQ_TOL || (c - 1.0).abs() <= EQ_TOL)
    }

    /// True iff every coordinate is ≥ 0 (within [`EQ_TOL`]).
    pub fn is_non_negative(&self) -> bool {
        self.dense_coords().iter().all(|&c| c >= -EQ_TOL)
    }

    /// Boolean tensor flagging coordinates with |value| above [`ZERO_TOL`].
    pub fn nonzero_indicator(&self) -> Tensor {
        let coords = self
            .dense_coords()
            .iter()
            .map(|&c| if c.abs() > ZERO_TOL { 1.0 } else { 0.0 })
            .collect();
        Tensor { legs: self.legs.clone(), storage: Storage::Dense(coords) }
    }

    /// Coordinatewise map.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor {
        let coords = self.dense_coords().iter().map(|&c| f(c)).collect();
        Tensor { legs: self.legs.clone(), storage: Storage::Dense(coords) }
    }

    /// Sum of all coordinates.
    pub fn total(&self) -> f64 {
        self.dense_coords().iter().sum()
    }

    /// The scalar value of a leg-free tensor.
    pub fn scalar_value(&self) -> Result<f64> {
        if !self.legs.is_empty() {
            return Err(Error::Dimension(format!(
                "tensor with legs {:?} is not a scalar",
                self.leg_names()
            )));
        }
        Ok(self.dense_coords()[0])
    }

    /// Sums out the named variables, keeping the remaining legs in order.
    pub fn sum_out(&self, vars: &[&str]) -> Tensor {
        let keep: Vec<Variable> = self
            .legs
            .iter()
            .filter(|v| !vars.contains(&v.name()))
            .cloned()
            .collect();
        self.project_onto(&keep)
    }

    /// Fixes the named leg to one state: the slice with that leg removed.
    pub fn fix_leg(&self, name: &str, state: usize) -> Result<Tensor> {
        let pos = self
            .legs
            .iter()
            .position(|v| v.name() == name)
            .ok_or_else(|| Error::Index(format!("unknown leg '{name}'")))?;
        if state >= self.legs[pos].dim() {
            return Err(Error::Index(format!(
                "state {state} out of range for leg '{name}' (dim {})",
                self.legs[pos].dim()
            )));
        }
        let keep: Vec<Variable> =
            self.legs.iter().filter(|v| v.name() != name).cloned().collect();
        let coords = self.dense_coords();
        let in_strd = strides(&self.legs);
        let n_out: usize = keep.iter().map(Variable::dim).product();
        let mut out = Vec::with_capacity(n_out);
        for (offset, &v) in coords.iter().enumerate() {
            if (offset / in_strd[pos]) % self.legs[pos].dim() == state {
                out.push(v);
            }
        }
        Ok(Tensor { legs: keep, storage: Storage::Dense(out) })
    }

    /// Contracts this tensor down to the given legs (summing out all others).
    /// The output legs must be a subset of this tensor's legs and define the
    /// output order.
    pub fn project_onto(&self, keep: &[Variable]) -> Tensor {
        let coords = self.dense_coords();
        let out_strd = strides(keep);
        let n_out: usize = keep.iter().map(Variable::dim).product();
        let mut out = vec![0.0; n_out];
        // For each input offset, find the output offset by reading off the
        // kept legs' states.
        let in_strd = strides(&self.legs);
        let kept_pos: Vec<Option<usize>> = self
            .legs
            .iter()
            .map(|v| keep.iter().position(|w| w.name() == v.name()))
            .collect();
        for (offset, &v) in coords.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let mut rem = offset;
            let mut out_offset = 0usize;
            for (k, s) in in_strd.iter().enumerate() {
                let i = rem / s;
                rem %= s;
                if let Some(p) = kept_pos[k] {
                    out_offset += out_strd[p] * i;
                }
            }
            out[out_offset] += v;
        }
        Tensor { legs: keep.to_vec(), storage: Storage::Dense(out) }
    }

    /// Reorders legs to the given order (a permutation of the current legs).
    pub fn transpose_to(&self, order: &[Variable]) -> Result<Tensor> {
        if order.len() != self.legs.len() {
            return Err(Error::Dimension("transpose order must list all legs".into()));
        }
        for v in order {
            if self.leg(v.name()).is_none() {
                return Err(Error::Dimension(format!("unknown leg '{}' in transpose", v.name())));
            }
        }
        Ok(self.project_onto(order))
    }

    /// Pairwise product over the union of legs (shared legs are matched by
    /// name; disjoint legs yield the tensor product).
    pub fn multiply(&self, other: &Tensor) -> Result<Tensor> {
        // Union legs: self's legs first, then other's legs not shared.
        let mut legs = self.legs.clone();
        for v in &other.legs {
            match self.leg(v.name()) {
                Some(w) if w.dim() != v.dim() => {
                    return Err(Error::Dimension(format!(
                        "variable '{}' has dims {} and {}",
                        v.name(),
                        w.dim(),
                        v.dim()
                    )));
                }
                Some(_) => {}
                None => legs.push(v.clone()),
            }
        }
        let a = self.dense_coords();
        let b = other.dense_coords();
        let strd = strides(&legs);
        // Per-union-leg stride contribution into each operand.
        let a_strd = operand_strides(&legs, &self.legs);
        let b_strd = operand_strides(&legs, &other.legs);
        let n: usize = legs.iter().map(Variable::dim).product();
        let mut out = vec![0.0; n];
        for (offset, slot) in out.iter_mut().enumerate() {
            let mut rem = offset;
            let mut ao = 0usize;
            let mut bo = 0usize;
            for (k, s) in strd.iter().enumerate() {
                let i = rem / s;
                rem %= s;
                ao += a_strd[k] * i;
                bo += b_strd[k] * i;
            }
            *slot = a[ao] * b[bo];
        }
        Ok(Tensor { legs, storage: Storage::Dense(out) })
    }

    /// Coordinatewise sum; legs must agree up to order.
    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        let other = other.transpose_to(&self.legs)?;
        let a = self.dense_coords();
        let b = other.dense_coords();
        let coords = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        Ok(Tensor { legs: self.legs.clone(), storage: Storage::Dense(coords) })
    }

    /// Coordinatewise difference; legs must agree up to order.
    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        let other = other.transpose_to(&self.legs)?;
        let a = self.dense_coords();
        let b = other.dense_coords();
        let coords = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        Ok(Tensor { legs: self.legs.clone(), storage: Storage::Dense(coords) })
    }

    /// Scales every coordinate.
    pub fn scale(&self, factor: f64) -> Tensor {
        self.map(|c| c * factor)
    }

    /// Maximum absolute coordinate difference against another tensor with the
    /// same legs (up to order).
    pub fn max_abs_diff(&self, other: &Tensor) -> Result<f64> {
        let other = other.transpose_to(&self.legs)?;
        let a = self.dense_coords();
        let b = other.dense_coords();
        Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
    }

    /// True iff the two tensors agree coordinatewise within `tol` (legs
    /// matched by name, order-insensitive).
    pub fn approx_eq(&self, other: &Tensor, tol: f64) -> bool {
        self.max_abs_diff(other).map(|d| d <= tol).unwrap_or(false)
    }

    /// Iterates over all full multi-indices of this tensor's leg space.
    pub fn index_space(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        index_space(&self.legs)
    }
}

/// For each union leg, the stride it contributes in the operand (0 when the
/// operand does not carry the leg).
fn operand_strides(union: &[Variable], operand: &[Variable]) -> Vec<usize> {
    let op_strd = strides(operand);
    union
        .iter()
        .map(|v| {
            operand
                .iter()
                .position(|w| w.name() == v.name())
                .map(|p| op_strd[p])
                .unwrap_or(0)
        })
        .collect()
}

/// Iterates over the Cartesian index space of the given legs in row-major
/// order.
pub fn index_space(legs: &[Variable]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let dims: Vec<usize> = legs.iter().map(Variable::dim).collect();
    let n: usize = dims.iter().product();
    (0..n).map(move |mut offset| {
        let mut idx = vec![0usize; dims.len()];
        for k in (0..dims.len()).rev() {
            idx[k] = offset % dims[k];
            offset /= dims[k];
        }
        idx
    })
}
