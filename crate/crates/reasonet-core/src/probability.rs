//! Distributions, independence, Markov networks and exponential families.
//!
//! A [`Distribution`] is a non-negative tensor of total mass one. Marginals
//! are contractions, conditionals are normalizations, and (conditional)
//! independence is the factorization of (sliced) marginals into tensor
//! products. Markov networks are normalized contractions of non-negative
//! cores; exponential families are built from basis encodings of statistics
//! with elementary exponential activations.

use std::collections::{HashSet, VecDeque};

use crate::encoding::{basis_encode, FunctionTable};
use crate::error::{Error, Result};
use crate::network::{normalize_tensor, TensorNetwork};
use crate::tensor::{index_space, Tensor, Variable, EQ_TOL};

/// Default tolerance for independence tests; looser than general equality
/// because it compares products of normalized quantities.
pub const INDEPENDENCE_TOL: f64 = 1e-7;

/// A probability distribution: a tensor with non-negative coordinates and
/// total mass 1 (within [`EQ_TOL`]).
#[derive(Debug, Clone)]
pub struct Distribution {
    tensor: Tensor,
}

impl Distribution {
    /// Validates and wraps a tensor as a distribution.
    pub fn from_tensor(tensor: Tensor) -> Result<Self> {
        if !tensor.is_non_negative() {
            return Err(Error::Input("distribution has a negative coordinate".into()));
        }
        let mass = tensor.total();
        if (mass - 1.0).abs() > EQ_TOL {
            return Err(Error::Input(format!("distribution mass {mass} is not 1")));
        }
        Ok(Self { tensor })
    }

    /// The underlying tensor.
    pub fn tensor(&self) -> &Tensor {
        &self.tensor
    }

    /// The variables of the distribution.
    pub fn variables(&self) -> &[Variable] {
        self.tensor.legs()
    }

    /// The marginal distribution over `keep`: the contraction over the
    /// complement.
    pub fn marginal(&self, keep: &[Variable]) -> Result<Distribution> {
        for v in keep {
            if self.tensor.leg(v.name()).is_none() {
                return Err(Error::Dimension(format!("unknown variable '{}'", v.name())));
            }
        }
        Ok(Distribution { tensor: self.tensor.project_onto(keep) })
    }

    /// The conditional tensor of `target` given `given`: the normalization of
    /// the joint with out = target, in = given. Zero-mass given-slices become
    /// uniform.
    pub fn conditional(&self, target: &[Variable], given: &[Variable]) -> Result<Tensor> {
        for t in target {
            if given.iter().any(|g| g.name() == t.name()) {
                return Err(Error::Dimension(format!(
                    "variable '{}' cannot be both target and given",
                    t.name()
                )));
            }
        }
        let mut all: Vec<Variable> = target.to_vec();
        all.extend(given.iter().cloned());
        let joint = self.tensor.project_onto(&all);
        Ok(normalize_tensor(&joint, target, given))
    }

    /// Tests independence of `a` and `b`: the joint marginal must equal the
    /// tensor product of the single marginals within `tol` coordinatewise.
    pub fn is_independent(&self, a: &[Variable], b: &[Variable], tol: f64) -> Result<bool> {
        if a.iter().any(|v| b.iter().any(|w| w.name() == v.name())) {
            return Err(Error::Dimension("independence sets must be disjoint".into()));
        }
        if a.is_empty() || b.is_empty() {
            return Ok(true);
        }
        let mut ab: Vec<Variable> = a.to_vec();
        ab.extend(b.iter().cloned());
        let joint = self.marginal(&ab)?;
        let pa = self.marginal(a)?;
        let pb = self.marginal(b)?;
        let product = pa.tensor.multiply(&pb.tensor)?;
        Ok(joint.tensor.approx_eq(&product, tol))
    }

    /// Tests conditional independence of `a` and `b` given `c`: every c-slice
    /// of the conditional of `a ∪ b` must factor into the product of the
    /// conditionals of `a` and `b`.
    pub fn is_cond_independent(
        &self,
        a: &[Variable],
        b: &[Variable],
        c: &[Variable],
        tol: f64,
    ) -> Result<bool> {
        for v in a {
            if b.iter().chain(c).any(|w| w.name() == v.name()) {
                return Err(Error::Dimension("conditional independence sets must be disjoint".into()));
            }
        }
        for v in b {
            if c.iter().any(|w| w.name() == v.name()) {
                return Err(Error::Dimension("conditional independence sets must be disjoint".into()));
            }
        }
        if a.is_empty() || b.is_empty() {
            return Ok(true);
        }
        let mut ab: Vec<Variable> = a.to_vec();
        ab.extend(b.iter().cloned());
        let cond_ab = self.conditional(&ab, c)?;
        let cond_a = self.conditional(a, c)?;
        let cond_b = self.conditional(b, c)?;
        let product = cond_a.multiply(&cond_b)?;
        Ok(cond_ab.approx_eq(&product, tol))
    }
}

/// Tests whether `c` separates `a` from `b` in the hypergraph given by the
/// hyperedges' node sets: every path of consecutively co-membered nodes from
/// `a` to `b` must meet `c`. Computed by breadth-first search blocked at `c`.
pub fn separates(edges: &[Vec<String>], a: &[String], b: &[String], c: &[String]) -> bool {
    let blocked: HashSet<&str> = c.iter().map(String::as_str).collect();
    let targets: HashSet<&str> = b.iter().map(String::as_str).collect();
    let mut seen: HashSet<&str> = HashSet::new();
    let mut queue: VecDeque<&str> = VecDeque::new();
    for n in a {
        if blocked.contains(n.as_str()) {
            continue;
        }
        if targets.contains(n.as_str()) {
            return false;
        }
        if seen.insert(n) {
            queue.push_back(n);
        }
    }
    while let Some(n) = queue.pop_front() {
        for e in edges {
            if !e.iter().any(|m| m == n) {
                continue;
            }
            for m in e {
                if blocked.contains(m.as_str()) || !seen.insert(m) {
                    continue;
                }
                if targets.contains(m.as_str()) {
                    return false;
                }
                queue.push_back(m);
            }
        }
    }
    true
}

/// The hyperedge structure of a tensor network: each core's leg-name set.
pub fn network_hypergraph(net: &TensorNetwork) -> Vec<Vec<String>> {
    net.iter()
        .map(|(_, t)| t.legs().iter().map(|v| v.name().to_string()).collect())
        .collect()
}

/// The Markov distribution of a network of non-negative cores: the full
/// contraction divided by the partition function. A vanishing partition
/// function is a degenerate-network error.
pub fn markov_distribution(net: &TensorNetwork) -> Result<Distribution> {
    let vars = net.variables();
    let joint = net.contract(&vars)?;
    let z = joint.total();
    if z == 0.0 {
        return Err(Error::Degenerate("partition function is zero".into()));
    }
    Distribution::from_tensor(joint.scale(1.0 / z))
}

/// One statistic of an exponential family: a real-valued function on the
/// state space of its variables, tabulated row-major.
#[derive(Debug, Clone)]
pub struct Statistic {
    /// Name; the head variable is `<name>_cV`, the computation core
    /// `<name>_cC` and the activation core `<name>_aC`.
    pub name: String,
    /// The variables the statistic reads.
    pub vars: Vec<Variable>,
    /// Raw statistic value per input tuple (row-major).
    pub values: Vec<f64>,
}

impl Statistic {
    /// The ascending enumeration of distinct image values.
    pub fn image(&self) -> Vec<f64> {
        let mut img: Vec<f64> = Vec::new();
        for &v in &self.values {
            if !img.iter().any(|&w| w == v) {
                img.push(v);
            }
        }
        img.sort_by(|x, y| x.partial_cmp(y).expect("statistic values must be comparable"));
        img
    }

    /// The head variable: one state per distinct image value, in ascending
    /// image order.
    pub fn head(&self) -> Variable {
        Variable::new(format!("{}_cV", self.name), self.image().len())
    }

    /// The statistic as a finite function from input tuples to head states.
    pub fn table(&self) -> Result<FunctionTable> {
        let image = self.image();
        let in_dims: Vec<usize> = self.vars.iter().map(Variable::dim).collect();
        let expected: usize = in_dims.iter().product();
        if self.values.len() != expected {
            return Err(Error::Dimension(format!(
                "statistic '{}' needs {expected} values, got {}",
                self.name,
                self.values.len()
            )));
        }
        let rows: Vec<Vec<usize>> = self
            .values
            .iter()
            .map(|v| vec![image.iter().position(|w| w == v).expect("value in image")])
            .collect();
        FunctionTable::new(in_dims, vec![image.len()], rows)
    }
}

/// An exponential family: statistics with canonical parameters and a base
/// measure.
#[derive(Debug, Clone)]
pub struct ExponentialFamilySpec {
    /// The statistics t_ℓ.
    pub statistics: Vec<Statistic>,
    /// Optional base measure ν over (a subset of) the variables; all-ones when
    /// absent.
    pub base_measure: Option<Tensor>,
    /// Canonical parameters, one per statistic.
    pub theta: Vec<f64>,
}

/// Builds the family member's network: per statistic the basis-encoding core
/// `<name>_cC`, the activation vector `<name>_aC` with coordinates
/// `exp(θ_ℓ · I_ℓ(y))` over the head variable, plus the base measure `nu_aC`.
/// The normalized contraction over the statistic variables is the member
/// distribution.
pub fn exponential_family_member(spec: &ExponentialFamilySpec) -> Result<TensorNetwork> {
    if spec.theta.len() != spec.statistics.len() {
        return Err(Error::Dimension(format!(
            "{} parameters for {} statistics",
            spec.theta.len(),
            spec.statistics.len()
        )));
    }
    let mut net = TensorNetwork::new();
    let mut all_vars: Vec<Variable> = Vec::new();
    for (stat, &theta) in spec.statistics.iter().zip(&spec.theta) {
        let head = stat.head();
        let table = stat.table()?;
        let enc = basis_encode(&table, &stat.vars, std::slice::from_ref(&head))?;
        net.insert(format!("{}_cC", stat.name), enc)?;
        let image = stat.image();
        let act: Vec<f64> = image.iter().map(|&v| (theta * v).exp()).collect();
        net.insert(format!("{}_aC", stat.name), Tensor::from_dense(vec![head], act)?)?;
        for v in &stat.vars {
            if !all_vars.iter().any(|w| w.name() == v.name()) {
                all_vars.push(v.clone());
            }
        }
    }
    match &spec.base_measure {
        Some(nu) => net.insert("nu_aC", nu.clone())?,
        None => net.insert("nu_aC", Tensor::ones(all_vars))?,
    }
    Ok(net)
}

/// The member distribution over the given variables (heads summed out).
pub fn exponential_family_distribution(
    spec: &ExponentialFamilySpec,
    vars: &[Variable],
) -> Result<Distribution> {
    let net = exponential_family_member(spec)?;
    let joint = net.contract(vars)?;
    let z = joint.total();
    if z == 0.0 {
        return Err(Error::Degenerate("family member has zero mass".into()));
    }
    Distribution::from_tensor(joint.scale(1.0 / z))
}

/// Convenience: the head-count statistic over `d` binary variables named by
/// `names`, with raw value = number of ones.
pub fn head_count_statistic(name: &str, vars: Vec<Variable>) -> Statistic {
    let values: Vec<f64> = index_space(&vars)
        .map(|idx| idx.iter().filter(|&&i| i == 1).count() as f64)
        .collect();
    Statistic { name: name.to_string(), vars, values }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(name: &str, dim: usize) -> Variable {
        Variable::new(name, dim)
    }

    fn coin_product(z: f64) -> Distribution {
        let coords = vec![
            (1.0 - z) * (1.0 - z),
            (1.0 - z) * z,
            z * (1.0 - z),
            z * z,
        ];
        Distribution::from_tensor(
            Tensor::from_dense(vec![var("X0", 2), var("X1", 2)], coords).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn coin_marginal_is_bernoulli() {
        let p = coin_product(0.3);
        let m = p.marginal(&[var("X0", 2)]).unwrap();
        assert!(m.tensor().approx_eq(
            &Tensor::from_dense(vec![var("X0", 2)], vec![0.7, 0.3]).unwrap(),
            1e-12
        ));
    }

    #[test]
    fn marginal_over_all_legs_is_identity() {
        let p = coin_product(0.3);
        let m = p.marginal(&[var("X0", 2), var("X1", 2)]).unwrap();
        assert!(m.tensor().approx_eq(p.tensor(), 0.0));
    }

    #[test]
    fn uniform_conditional_columns() {
        let p = Distribution::from_tensor(
            Tensor::from_dense(vec![var("X0", 2), var("X1", 2)], vec![0.25; 4]).unwrap(),
        )
        .unwrap();
        let c = p.conditional(&[var("X0", 2)], &[var("X1", 2)]).unwrap();
        assert_eq!(c.dense_coords(), vec![0.5, 0.5, 0.5, 0.5]);
    }

    #[test]
    fn bayes_consistency_on_random_joint() {
        // conditional times marginal of given recovers the joint.
        let coords = vec![0.05, 0.1, 0.15, 0.2, 0.08, 0.12, 0.18, 0.12];
        let legs = vec![var("A", 2), var("B", 2), var("C", 2)];
        let p = Distribution::from_tensor(Tensor::from_dense(legs, coords).unwrap()).unwrap();
        let cond = p.conditional(&[var("A", 2), var("B", 2)], &[var("C", 2)]).unwrap();
        let pc = p.marginal(&[var("C", 2)]).unwrap();
        let joint = cond.multiply(pc.tensor()).unwrap();
        assert!(joint.approx_eq(p.tensor(), 1e-9));
    }

    #[test]
    fn iid_coins_are_independent() {
        let p = coin_product(0.3);
        assert!(p.is_independent(&[var("X0", 2)], &[var("X1", 2)], INDEPENDENCE_TOL).unwrap());
    }

    #[test]
    fn correlated_pair_is_dependent() {
        let half_delta = Tensor::delta(vec![var("X0", 2), var("X1", 2)]).unwrap().scale(0.5);
        let p = Distribution::from_tensor(half_delta).unwrap();
        assert!(!p.is_independent(&[var("X0", 2)], &[var("X1", 2)], INDEPENDENCE_TOL).unwrap());
    }

    #[test]
    fn empty_set_is_vacuously_independent() {
        let p = coin_product(0.5);
        assert!(p.is_independent(&[var("X0", 2)], &[], INDEPENDENCE_TOL).unwrap());
    }

    #[test]
    fn chain_is_conditionally_independent_given_middle() {
        // A - B - C with random positive pair factors.
        let f = Tensor::from_dense(vec![var("A", 2), var("B", 2)], vec![0.9, 0.4, 0.3, 1.2])
            .unwrap();
        let g = Tensor::from_dense(vec![var("B", 2), var("C", 2)], vec![0.7, 1.1, 0.5, 0.8])
            .unwrap();
        let net = TensorNetwork::from_cores([("f", f), ("g", g)]).unwrap();
        let p = markov_distribution(&net).unwrap();
        assert!(p
            .is_cond_independent(&[var("A", 2)], &[var("C", 2)], &[var("B", 2)], INDEPENDENCE_TOL)
            .unwrap());
        // Unconditionally A and C are dependent through B.
        assert!(!p.is_independent(&[var("A", 2)], &[var("C", 2)], INDEPENDENCE_TOL).unwrap());
    }

    #[test]
    fn coupled_three_tensor_is_not_conditionally_independent() {
        let coords: Vec<f64> = vec![0.11, 0.07, 0.05, 0.13, 0.09, 0.17, 0.23, 0.15];
        let legs = vec![var("A", 2), var("B", 2), var("C", 2)];
        let p = Distribution::from_tensor(Tensor::from_dense(legs, coords).unwrap()).unwrap();
        assert!(!p
            .is_cond_independent(&[var("A", 2)], &[var("C", 2)], &[var("B", 2)], INDEPENDENCE_TOL)
            .unwrap());
    }

    #[test]
    fn student_hypergraph_separation() {
        // e0 = {G, D, I}, e1 = {I, S}, e2 = {L, G}.
        let edges: Vec<Vec<String>> = vec![
            vec!["G".into(), "D".into(), "I".into()],
            vec!["I".into(), "S".into()],
            vec!["L".into(), "G".into()],
        ];
        assert!(separates(
            &edges,
            &["L".into()],
            &["D".into(), "I".into(), "S".into()],
            &["G".into()]
        ));
        assert!(!separates(&edges, &["L".into()], &["D".into()], &[]));
    }

    #[test]
    fn single_hyperedge_is_inseparable() {
        let edges: Vec<Vec<String>> = vec![vec!["a".into(), "b".into(), "x".into()]];
        assert!(!separates(&edges, &["a".into()], &["b".into()], &["x".into()]));
    }

    #[test]
    fn elementary_hypergraph_separated_by_empty_set() {
        let edges: Vec<Vec<String>> = vec![vec!["a".into()], vec!["b".into()], vec!["c".into()]];
        assert!(separates(&edges, &["a".into()], &["b".into()], &[]));
    }

    #[test]
    fn markov_single_core_is_its_normalization() {
        let t = Tensor::from_dense(vec![var("X", 2)], vec![1.0, 3.0]).unwrap();
        let net = TensorNetwork::from_cores([("t", t)]).unwrap();
        let p = markov_distribution(&net).unwrap();
        assert!(p
            .tensor()
            .approx_eq(&Tensor::from_dense(vec![var("X", 2)], vec![0.25, 0.75]).unwrap(), 1e-12));
    }

    #[test]
    fn markov_disjoint_cores_give_product_distribution() {
        let a = Tensor::from_dense(vec![var("X", 2)], vec![1.0, 1.0]).unwrap();
        let b = Tensor::from_dense(vec![var("Y", 2)], vec![1.0, 3.0]).unwrap();
        let net = TensorNetwork::from_cores([("a", a), ("b", b)]).unwrap();
        let p = markov_distribution(&net).unwrap();
        assert!(p
            .is_independent(&[var("X", 2)], &[var("Y", 2)], INDEPENDENCE_TOL)
            .unwrap());
    }

    #[test]
    fn markov_zero_partition_function_is_degenerate() {
        let t = Tensor::zeros(vec![var("X", 2)]);
        let net = TensorNetwork::from_cores([("t", t)]).unwrap();
        assert!(matches!(markov_distribution(&net), Err(Error::Degenerate(_))));
    }

    #[test]
    fn coin_toss_family_reproduces_the_product_matrix() {
        for z in [0.2f64, 0.5, 0.9] {
            let theta = (z / (1.0 - z)).ln();
            let stat = head_count_statistic("plus", vec![var("X0", 2), var("X1", 2)]);
            let spec = ExponentialFamilySpec {
                statistics: vec![stat],
                base_measure: None,
                theta: vec![theta],
            };
            let p =
                exponential_family_distribution(&spec, &[var("X0", 2), var("X1", 2)]).unwrap();
            assert!(p.tensor().approx_eq(coin_product(z).tensor(), 1e-12), "z = {z}");
            // Partition function of the unnormalized member is 1/(1-z)^2.
            let net = exponential_family_member(&spec).unwrap();
            let zf = net.partition_function().unwrap();
            assert!((zf - 1.0 / ((1.0 - z) * (1.0 - z))).abs() < 1e-9, "z = {z}");
        }
    }

    #[test]
    fn zero_theta_family_is_uniform() {
        let stat = head_count_statistic("plus", vec![var("X0", 2), var("X1", 2)]);
        let spec =
            ExponentialFamilySpec { statistics: vec![stat], base_measure: None, theta: vec![0.0] };
        let p = exponential_family_distribution(&spec, &[var("X0", 2), var("X1", 2)]).unwrap();
        assert!(p.tensor().approx_eq(
            &Tensor::from_dense(vec![var("X0", 2), var("X1", 2)], vec![0.25; 4]).unwrap(),
            1e-12
        ));
    }

    #[test]
    fn activation_coordinates_are_exponential_in_the_image() {
        let theta = 0.7;
        let stat = head_count_statistic("plus", vec![var("X0", 2), var("X1", 2)]);
        let spec = ExponentialFamilySpec {
            statistics: vec![stat],
            base_measure: None,
            theta: vec![theta],
        };
        let net = exponential_family_member(&spec).unwrap();
        let act = net.core("plus_aC").unwrap();
        for k in 0..3 {
            assert!((act.at(&[k]) - (theta * k as f64).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn order_statistic_family_equals_elementary_product() {
        // Per-variable indicator statistics with ν = 1 factor into ⊗[1, e^θ].
        let theta = [0.4, -0.9];
        let stats: Vec<Statistic> = (0..2)
            .map(|k| Statistic {
                name: format!("t{k}"),
                vars: vec![var(&format!("X{k}"), 2)],
                values: vec![0.0, 1.0],
            })
            .collect();
        let spec = ExponentialFamilySpec {
            statistics: stats,
            base_measure: None,
            theta: theta.to_vec(),
        };
        let net = exponential_family_member(&spec).unwrap();
        let joint = net.contract(&[var("X0", 2), var("X1", 2)]).unwrap();
        let e0 = Tensor::from_dense(vec![var("X0", 2)], vec![1.0, theta[0].exp()]).unwrap();
        let e1 = Tensor::from_dense(vec![var("X1", 2)], vec![1.0, theta[1].exp()]).unwrap();
        let product = e0.multiply(&e1).unwrap();
        assert!(joint.approx_eq(&product, 1e-12));
    }
}
