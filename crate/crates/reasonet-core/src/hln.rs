//! Hybrid logic networks: boolean statistics with per-formula head
//! activations that are either hard (one-hot constraints) or soft
//! (exponential weights), plus likelihood evaluation, alternating
//! moment-matching training and probabilistic entailment.

use std::collections::{BTreeMap, BTreeSet};

use crate::encoding::{basis_encode, FunctionTable};
use crate::error::{Error, Result};
use crate::logic::Expression;
use crate::network::TensorNetwork;
use crate::probability::Distribution;
use crate::tensor::{index_space, Tensor, Variable};

/// An ordered sequence of named boolean formulas over shared atoms. Formula
/// `ℓ` gets the head variable `<name>_cV`, the computation core `<name>_cC`
/// and the activation core `<name>_aC`.
#[derive(Debug, Clone)]
pub struct BooleanStatistic {
    formulas: Vec<(String, Expression)>,
    atoms: Vec<String>,
}

impl BooleanStatistic {
    /// Builds a statistic from named formulas; names must be distinct. The
    /// atom order is the sorted union of the formulas' atoms.
    pub fn new(formulas: Vec<(String, Expression)>) -> Result<Self> {
        let mut names = BTreeSet::new();
        let mut atoms = BTreeSet::new();
        for (name, e) in &formulas {
            if !names.insert(name.clone()) {
                return Err(Error::Input(format!("duplicate formula name '{name}'")));
            }
            atoms.extend(e.atoms());
        }
        Ok(Self { formulas, atoms: atoms.into_iter().collect() })
    }

    /// Number of formulas.
    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    /// True iff there are no formulas.
    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    /// The named formulas in order.
    pub fn formulas(&self) -> &[(String, Expression)] {
        &self.formulas
    }

    /// The sorted union of the formulas' atoms.
    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    /// The atoms as binary variables.
    pub fn atom_variables(&self) -> Vec<Variable> {
        self.atoms.iter().map(|a| Variable::new(a.clone(), 2)).collect()
    }

    /// The head variable of formula `l`.
    pub fn head(&self, l: usize) -> Variable {
        Variable::new(format!("{}_cV", self.formulas[l].0), 2)
    }

    /// Evaluates all formulas under a truth assignment of the atoms.
    pub fn evaluate(&self, assignment: &BTreeMap<String, bool>) -> Result<Vec<bool>> {
        self.formulas.iter().map(|(_, e)| e.evaluate(assignment)).collect()
    }
}

/// The canonical parameters of a hybrid logic network: a hard subset of
/// formula indices with boolean targets, and a soft parameter vector that is
/// zero on the hard subset.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridParams {
    /// Indices of hard-constrained formulas.
    pub hard_set: BTreeSet<usize>,
    /// Required truth value per hard index.
    pub hard_targets: BTreeMap<usize, bool>,
    /// Soft parameters, one per formula; zero on the hard set.
    pub theta: Vec<f64>,
}

impl HybridParams {
    /// All-soft parameters.
    pub fn soft(theta: Vec<f64>) -> Self {
        Self { hard_set: BTreeSet::new(), hard_targets: BTreeMap::new(), theta }
    }

    /// Checks the invariants against a statistic of `p` formulas.
    pub fn validate(&self, p: usize) -> Result<()> {
        if self.theta.len() != p {
            return Err(Error::Dimension(format!(
                "{} parameters for {p} formulas",
                self.theta.len()
            )));
        }
        let target_keys: BTreeSet<usize> = self.hard_targets.keys().copied().collect();
        if target_keys != self.hard_set {
            return Err(Error::Input("hard targets must cover exactly the hard set".into()));
        }
        for &l in &self.hard_set {
            if l >= p {
                return Err(Error::Index(format!("hard index {l} out of range for p = {p}")));
            }
            if self.theta[l] != 0.0 {
                return Err(Error::Input(format!("theta[{l}] must be zero on the hard set")));
            }
        }
        Ok(())
    }

    /// The head activation vector of formula `l`: a one-hot on hard indices,
    /// `[1, e^θ]` elsewhere.
    pub fn activation(&self, l: usize) -> [f64; 2] {
        match self.hard_targets.get(&l) {
            Some(true) => [0.0, 1.0],
            Some(false) => [1.0, 0.0],
            None => [1.0, self.theta[l].exp()],
        }
    }
}

/// The formula as a finite boolean function over its own atoms.
fn formula_table(e: &Expression, atoms: &[String]) -> Result<FunctionTable> {
    let vars: Vec<Variable> = atoms.iter().map(|a| Variable::new(a.clone(), 2)).collect();
    let mut rows = Vec::with_capacity(1 << atoms.len());
    for idx in index_space(&vars) {
        let assignment: BTreeMap<String, bool> =
            atoms.iter().zip(&idx).map(|(a, &i)| (a.clone(), i == 1)).collect();
        rows.push(vec![usize::from(e.evaluate(&assignment)?)]);
    }
    FunctionTable::new(vec![2; atoms.len()], vec![2], rows)
}

/// Builds the hybrid logic network: one basis-encoding computation core and
/// one activation vector per formula. The normalized contraction over the
/// atoms is the network's distribution.
pub fn hln_network(t: &BooleanStatistic, params: &HybridParams) -> Result<TensorNetwork> {
    params.validate(t.len())?;
    let mut net = TensorNetwork::new();
    for (l, (name, e)) in t.formulas().iter().enumerate() {
        let atoms = e.atoms();
        let in_vars: Vec<Variable> = atoms.iter().map(|a| Variable::new(a.clone(), 2)).collect();
        let head = t.head(l);
        let table = formula_table(e, &atoms)?;
        let enc = basis_encode(&table, &in_vars, std::slice::from_ref(&head))?;
        net.insert(format!("{name}_cC"), enc)?;
        let act = params.activation(l);
        net.insert(format!("{name}_aC"), Tensor::from_dense(vec![head], act.to_vec())?)?;
    }
    Ok(net)
}

/// The network's distribution over the statistic's atoms (heads summed out).
pub fn hln_distribution(t: &BooleanStatistic, params: &HybridParams) -> Result<Distribution> {
    let net = hln_network(t, params)?;
    let joint = net.contract(&t.atom_variables())?;
    let z = joint.total();
    if z == 0.0 {
        return Err(Error::Degenerate("hybrid network has zero mass".into()));
    }
    Distribution::from_tensor(joint.scale(1.0 / z))
}

/// Recovers canonical parameters from raw non-negative head vectors: `[a, 0]`
/// is hard with target 0, `[0, b]` hard with target 1, and a strictly positive
/// `[a, b]` is soft with `θ = ln(b/a)` (the overall scale is not stored).
pub fn canonicalize_activation(vectors: &[[f64; 2]]) -> Result<HybridParams> {
    let mut params = HybridParams::soft(vec![0.0; vectors.len()]);
    for (l, &[a, b]) in vectors.iter().enumerate() {
        if a < 0.0 || b < 0.0 {
            return Err(Error::Input(format!(
                "activation vector {l} has a negative coordinate"
            )));
        }
        match (a == 0.0, b == 0.0) {
            (true, true) => {
                return Err(Error::DegenerateActivation(format!(
                    "activation vector {l} is all-zero"
                )))
            }
            (true, false) => {
                params.hard_set.insert(l);
                params.hard_targets.insert(l, true);
            }
            (false, true) => {
                params.hard_set.insert(l);
                params.hard_targets.insert(l, false);
            }
            (false, false) => params.theta[l] = (b / a).ln(),
        }
    }
    Ok(params)
}

/// A dataset of boolean atom assignments with a bound column order.
#[derive(Debug, Clone)]
pub struct Dataset {
    atoms: Vec<String>,
    rows: Vec<Vec<bool>>,
}

impl Dataset {
    /// Builds a dataset; needs at least one row and consistent row lengths.
    pub fn new(atoms: Vec<String>, rows: Vec<Vec<bool>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Input("dataset needs at least one row".into()));
        }
        for (j, row) in rows.iter().enumerate() {
            if row.len() != atoms.len() {
                return Err(Error::Dimension(format!(
                    "row {j} has {} entries for {} columns",
                    row.len(),
                    atoms.len()
                )));
            }
        }
        Ok(Self { atoms, rows })
    }

    /// Column names in order.
    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// True iff there are no rows (never, by construction).
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Row `j` as an assignment map.
    pub fn assignment(&self, j: usize) -> BTreeMap<String, bool> {
        self.atoms.iter().cloned().zip(self.rows[j].iter().copied()).collect()
    }
}

/// The empirical mean vector: the satisfaction rate of each formula over the
/// dataset rows. Every statistic atom must be a dataset column.
pub fn empirical_means(t: &BooleanStatistic, data: &Dataset) -> Result<Vec<f64>> {
    for a in t.atoms() {
        if !data.atoms().contains(a) {
            return Err(Error::Input(format!("dataset misses column '{a}'")));
        }
    }
    let n = data.len() as f64;
    let mut mu = vec![0.0; t.len()];
    for j in 0..data.len() {
        let assignment = data.assignment(j);
        for (l, sat) in t.evaluate(&assignment)?.iter().enumerate() {
            if *sat {
                mu[l] += 1.0;
            }
        }
    }
    Ok(mu.into_iter().map(|c| c / n).collect())
}

/// The negative log likelihood per sample: `ln Z − ⟨μ, θ⟩` with `Z` the
/// contraction of the activation-weighted network. Zero mass (contradictory
/// hard constraints) yields positive infinity.
pub fn nll(t: &BooleanStatistic, params: &HybridParams, mu: &[f64]) -> Result<f64> {
    if mu.len() != t.len() {
        return Err(Error::Dimension(format!("{} means for {} formulas", mu.len(), t.len())));
    }
    let z = hln_network(t, params)?.partition_function()?;
    if z == 0.0 {
        return Ok(f64::INFINITY);
    }
    let inner: f64 = mu.iter().zip(&params.theta).map(|(m, th)| m * th).sum();
    Ok(z.ln() - inner)
}

/// The held-out head vector `D(Y_ℓ)`: the contraction of the network with
/// formula `l`'s activation removed, onto that formula's head.
pub fn holdout_head_contraction(
    t: &BooleanStatistic,
    params: &HybridParams,
    l: usize,
) -> Result<[f64; 2]> {
    params.validate(t.len())?;
    let full = hln_network(t, params)?;
    let mut net = TensorNetwork::new();
    let held_out = format!("{}_aC", t.formulas()[l].0);
    for (name, core) in full.iter() {
        if name != held_out {
            net.insert(name, core.clone())?;
        }
    }
    let d = net.contract(std::slice::from_ref(&t.head(l)))?;
    let coords = d.dense_coords();
    Ok([coords[0], coords[1]])
}

/// The outcome of alternating moment matching.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// The trained parameters.
    pub params: HybridParams,
    /// True iff a sweep changed every coordinate by less than the tolerance.
    pub converged: bool,
    /// Number of sweeps that changed some coordinate by at least the
    /// tolerance.
    pub sweeps: usize,
}

/// Alternating moment matching: formulas with an extreme empirical mean
/// become hard constraints (threshold `1/(2N)` when the dataset size `n` is
/// known, `1e-12` otherwise); the soft coordinates are updated in ascending
/// order by `θ_ℓ = ln[(μ_ℓ/(1−μ_ℓ)) · D(Y_ℓ=0)/D(Y_ℓ=1)]` until the largest
/// change drops below `tol` or `max_iters` sweeps have run.
pub fn amm_train(
    t: &BooleanStatistic,
    mu: &[f64],
    n: Option<usize>,
    max_iters: usize,
    tol: f64,
) -> Result<TrainOutcome> {
    if mu.len() != t.len() {
        return Err(Error::Dimension(format!("{} means for {} formulas", mu.len(), t.len())));
    }
    for (l, &m) in mu.iter().enumerate() {
        if !(0.0..=1.0).contains(&m) {
            return Err(Error::Input(format!("mean {l} = {m} is outside [0, 1]")));
        }
    }
    let threshold = n.map_or(1e-12, |n| 1.0 / (2.0 * n as f64));
    let mut params = HybridParams::soft(vec![0.0; t.len()]);
    for (l, &m) in mu.iter().enumerate() {
        if m < threshold {
            params.hard_set.insert(l);
            params.hard_targets.insert(l, false);
        } else if m > 1.0 - threshold {
            params.hard_set.insert(l);
            params.hard_targets.insert(l, true);
        }
    }
    let soft: Vec<usize> = (0..t.len()).filter(|l| !params.hard_set.contains(l)).collect();

    let mut converged = soft.is_empty();
    let mut sweeps = 0usize;
    for _ in 0..max_iters {
        if converged {
            break;
        }
        let mut max_delta = 0.0f64;
        for &l in &soft {
            let [d0, d1] = holdout_head_contraction(t, &params, l)?;
            if d0 == 0.0 || d1 == 0.0 {
                return Err(Error::NonRepresentableMoment(format!(
                    "formula {l}: held-out head vector [{d0}, {d1}] has a zero side"
                )));
            }
            let new = ((mu[l] / (1.0 - mu[l])) * (d0 / d1)).ln();
            max_delta = max_delta.max((new - params.theta[l]).abs());
            params.theta[l] = new;
        }
        if max_delta < tol {
            converged = true;
        } else {
            sweeps += 1;
        }
    }
    Ok(TrainOutcome { params, converged, sweeps })
}

/// Probabilistic entailment: `⟨P, f⟩ = 1`, decided by checking that the
/// signed conjunction of the hard formulas logically entails `f`.
pub fn probabilistic_entails(
    t: &BooleanStatistic,
    params: &HybridParams,
    f: &Expression,
) -> Result<bool> {
    params.validate(t.len())?;
    let mut atoms: BTreeSet<String> = t.atoms().iter().cloned().collect();
    atoms.extend(f.atoms());
    let atoms: Vec<String> = atoms.into_iter().collect();
    let vars: Vec<Variable> = atoms.iter().map(|a| Variable::new(a.clone(), 2)).collect();
    for idx in index_space(&vars) {
        let assignment: BTreeMap<String, bool> =
            atoms.iter().zip(&idx).map(|(a, &i)| (a.clone(), i == 1)).collect();
        let hard_holds = params.hard_set.iter().try_fold(true, |acc, &l| {
            let sat = t.formulas()[l].1.evaluate(&assignment)?;
            Ok::<bool, Error>(acc && sat == params.hard_targets[&l])
        })?;
        if hard_holds && !f.evaluate(&assignment)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::Connective;
    use crate::probability::{
        exponential_family_distribution, ExponentialFamilySpec, Statistic,
    };

    fn xor(a: &str, b: &str) -> Expression {
        Expression::apply(
            Connective::Xor,
            vec![Expression::atom(a), Expression::atom(b)],
        )
        .unwrap()
    }

    fn implies(a: &str, b: &str) -> Expression {
        Expression::apply(
            Connective::Implies,
            vec![Expression::atom(a), Expression::atom(b)],
        )
        .unwrap()
    }

    /// The accounting statistic: f0 = A1 ⊕ A2, f1 = F ⇒ A1.
    fn accounting() -> BooleanStatistic {
        BooleanStatistic::new(vec![
            ("f0".into(), xor("A1", "A2")),
            ("f1".into(), implies("F", "A1")),
        ])
        .unwrap()
    }

    fn accounting_params(theta: f64) -> HybridParams {
        HybridParams {
            hard_set: [0].into(),
            hard_targets: [(0, true)].into(),
            theta: vec![0.0, theta],
        }
    }

    /// 20 rows over columns (A1, A2, F): (1,0,0)×5, (1,0,1)×8, (0,1,0)×5,
    /// (0,1,1)×2.
    fn accounting_dataset() -> Dataset {
        let mut rows = Vec::new();
        rows.extend(std::iter::repeat(vec![true, false, false]).take(5));
        rows.extend(std::iter::repeat(vec![true, false, true]).take(8));
        rows.extend(std::iter::repeat(vec![false, true, false]).take(5));
        rows.extend(std::iter::repeat(vec![false, true, true]).take(2));
        Dataset::new(vec!["A1".into(), "A2".into(), "F".into()], rows).unwrap()
    }

    #[test]
    fn accounting_network_matches_displayed_distribution() {
        for theta in [3.0f64.ln(), 0.7] {
            let t = accounting();
            let dist = hln_distribution(&t, &accounting_params(theta)).unwrap();
            let z = 1.0 + 3.0 * theta.exp();
            let joint = dist
                .tensor()
                .transpose_to(&[
                    Variable::new("A1", 2),
                    Variable::new("A2", 2),
                    Variable::new("F", 2),
                ])
                .unwrap();
            for a1 in 0..2 {
                for a2 in 0..2 {
                    for f in 0..2 {
                        let xor = (a1 ^ a2) == 1;
                        let imp = f == 0 || a1 == 1;
                        let expect = if !xor {
                            0.0
                        } else if imp {
                            theta.exp() / z
                        } else {
                            1.0 / z
                        };
                        let got = joint.at(&[a1, a2, f]);
                        assert!(
                            (got - expect).abs() <= 1e-12,
                            "coordinate ({a1},{a2},{f}): got {got}, expected {expect}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn all_soft_zero_theta_is_uniform() {
        let t = accounting();
        let dist = hln_distribution(&t, &HybridParams::soft(vec![0.0, 0.0])).unwrap();
        for &c in &dist.tensor().dense_coords() {
            assert!((c - 1.0 / 8.0).abs() <= 1e-12, "non-uniform coordinate {c}");
        }
    }

    #[test]
    fn all_hard_statistic_is_the_normalized_model_indicator() {
        let t = accounting();
        let params = HybridParams {
            hard_set: [0, 1].into(),
            hard_targets: [(0, true), (1, true)].into(),
            theta: vec![0.0, 0.0],
        };
        let dist = hln_distribution(&t, &params).unwrap();
        // Joint models of A1⊕A2 and F⇒A1 over (A1, A2, F):
        // (0,1,0), (1,0,0), (1,0,1) — uniform weight 1/3 each.
        let joint = dist
            .tensor()
            .transpose_to(&[
                Variable::new("A1", 2),
                Variable::new("A2", 2),
                Variable::new("F", 2),
            ])
            .unwrap();
        for (cell, expect) in [
            ([0, 1, 0], 1.0 / 3.0),
            ([1, 0, 0], 1.0 / 3.0),
            ([1, 0, 1], 1.0 / 3.0),
            ([1, 1, 0], 0.0),
            ([0, 1, 1], 0.0),
        ] {
            assert!((joint.at(&cell) - expect).abs() <= 1e-12, "cell {cell:?}");
        }
    }

    #[test]
    fn canonicalization_recovers_hard_and_soft_cases() {
        let theta = 0.42f64;
        let params =
            canonicalize_activation(&[[0.0, 1.0], [1.0, theta.exp()]]).unwrap();
        assert_eq!(params.hard_set, [0].into());
        assert_eq!(params.hard_targets[&0], true);
        assert!((params.theta[1] - theta).abs() <= 1e-12);
        assert_eq!(params.theta[0], 0.0);

        let params = canonicalize_activation(&[[2.0, 2.0]]).unwrap();
        assert!(params.hard_set.is_empty());
        assert_eq!(params.theta, vec![0.0]);

        let params = canonicalize_activation(&[[1.0, 3.0]]).unwrap();
        assert!((params.theta[0] - 3.0f64.ln()).abs() <= 1e-12);
    }

    #[test]
    fn all_zero_activation_vector_is_degenerate() {
        assert!(matches!(
            canonicalize_activation(&[[1.0, 2.0], [0.0, 0.0]]),
            Err(Error::DegenerateActivation(_))
        ));
        assert!(matches!(
            canonicalize_activation(&[[-1.0, 2.0]]),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn canonicalization_round_trips_as_a_distribution() {
        // Raw head vectors, their canonicalized parameters, and both resulting
        // normalized distributions must agree: the scale is absorbed.
        let t = accounting();
        let raw = [[0.0, 2.5], [0.4, 1.2]];
        let params = canonicalize_activation(&raw).unwrap();
        let canonical = hln_distribution(&t, &params).unwrap();

        let canonical_net = hln_network(&t, &params).unwrap();
        let mut net = TensorNetwork::new();
        for (name, core) in canonical_net.iter() {
            let replacement = t.formulas().iter().enumerate().find_map(|(l, (f, _))| {
                (name == format!("{f}_aC")).then(|| {
                    Tensor::from_dense(vec![t.head(l)], raw[l].to_vec()).unwrap()
                })
            });
            net.insert(name, replacement.unwrap_or_else(|| core.clone())).unwrap();
        }
        let joint = net.contract(&t.atom_variables()).unwrap();
        let direct = joint.scale(1.0 / joint.total());
        assert!(
            canonical.tensor().approx_eq(&direct, 1e-12),
            "canonicalized and raw activations disagree as distributions"
        );
    }

    #[test]
    fn accounting_dataset_means_are_one_and_nine_tenths() {
        let mu = empirical_means(&accounting(), &accounting_dataset()).unwrap();
        assert!((mu[0] - 1.0).abs() <= 1e-15, "mu_0 = {}", mu[0]);
        assert!((mu[1] - 0.9).abs() <= 1e-15, "mu_1 = {}", mu[1]);
    }

    #[test]
    fn single_row_means_equal_the_statistic_at_that_row() {
        let t = accounting();
        let data = Dataset::new(
            vec!["A1".into(), "A2".into(), "F".into()],
            vec![vec![true, false, true]],
        )
        .unwrap();
        assert_eq!(empirical_means(&t, &data).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn missing_dataset_column_is_an_input_error() {
        let t = accounting();
        let data =
            Dataset::new(vec!["A1".into(), "A2".into()], vec![vec![true, false]]).unwrap();
        assert!(matches!(empirical_means(&t, &data), Err(Error::Input(_))));
    }

    #[test]
    fn uniform_nll_is_the_log_state_count() {
        let t = accounting();
        let v = nll(&t, &HybridParams::soft(vec![0.0, 0.0]), &[0.5, 0.5]).unwrap();
        assert!((v - (8.0f64).ln()).abs() <= 1e-12, "nll = {v}");
    }

    #[test]
    fn contradictory_hard_constraint_gives_infinite_nll() {
        let taut = Expression::apply(
            Connective::Or,
            vec![Expression::atom("X"), Expression::not(Expression::atom("X"))],
        )
        .unwrap();
        let t = BooleanStatistic::new(vec![("f".into(), taut)]).unwrap();
        let satisfied = HybridParams {
            hard_set: [0].into(),
            hard_targets: [(0, true)].into(),
            theta: vec![0.0],
        };
        assert!(nll(&t, &satisfied, &[1.0]).unwrap().is_finite());
        let flipped = HybridParams {
            hard_set: [0].into(),
            hard_targets: [(0, false)].into(),
            theta: vec![0.0],
        };
        assert_eq!(nll(&t, &flipped, &[1.0]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn nll_is_stationary_at_the_accounting_optimum() {
        // Finite-difference derivative in the soft coordinate vanishes at
        // θ = ln 3 with μ = (1, 0.9).
        let t = accounting();
        let mu = [1.0, 0.9];
        let h = 1e-5;
        let at = |theta: f64| nll(&t, &accounting_params(theta), &mu).unwrap();
        let slope = (at(3.0f64.ln() + h) - at(3.0f64.ln() - h)) / (2.0 * h);
        assert!(slope.abs() <= 1e-8, "slope = {slope}");
        // Away from the optimum the derivative is visibly nonzero.
        let slope = (at(0.1 + h) - at(0.1 - h)) / (2.0 * h);
        assert!(slope.abs() > 1e-3, "slope = {slope}");
    }

    #[test]
    fn accounting_training_recovers_log_three_in_one_sweep() {
        let t = accounting();
        let outcome = amm_train(&t, &[1.0, 0.9], Some(20), 100, 1e-9).unwrap();
        assert!(outcome.converged, "training did not converge");
        assert_eq!(outcome.sweeps, 1);
        assert_eq!(outcome.params.hard_set, [0].into());
        assert_eq!(outcome.params.hard_targets[&0], true);
        assert!(
            (outcome.params.theta[1] - 3.0f64.ln()).abs() <= 1e-9,
            "theta_1 = {}",
            outcome.params.theta[1]
        );
    }

    #[test]
    fn accounting_holdout_head_vector_is_one_three() {
        let t = accounting();
        let params = HybridParams {
            hard_set: [0].into(),
            hard_targets: [(0, true)].into(),
            theta: vec![0.0, 0.0],
        };
        assert_eq!(holdout_head_contraction(&t, &params, 1).unwrap(), [1.0, 3.0]);
    }

    #[test]
    fn symmetric_single_formula_trains_to_zero() {
        let t = BooleanStatistic::new(vec![("f".into(), Expression::atom("X"))]).unwrap();
        let outcome = amm_train(&t, &[0.5], None, 100, 1e-9).unwrap();
        assert!(outcome.converged);
        assert!(outcome.params.theta[0].abs() <= 1e-12);
    }

    #[test]
    fn tautology_with_interior_mean_is_non_representable() {
        let taut = Expression::apply(
            Connective::Or,
            vec![Expression::atom("X"), Expression::not(Expression::atom("X"))],
        )
        .unwrap();
        let t = BooleanStatistic::new(vec![("f".into(), taut)]).unwrap();
        assert!(matches!(
            amm_train(&t, &[0.5], None, 100, 1e-9),
            Err(Error::NonRepresentableMoment(_))
        ));
    }

    #[test]
    fn converged_training_matches_model_moments() {
        // Two overlapping soft formulas: at convergence the model expectation
        // of each formula equals its empirical mean.
        let and01 = Expression::apply(
            Connective::And,
            vec![Expression::atom("X0"), Expression::atom("X1")],
        )
        .unwrap();
        let or02 = Expression::apply(
            Connective::Or,
            vec![Expression::atom("X0"), Expression::atom("X2")],
        )
        .unwrap();
        let t = BooleanStatistic::new(vec![("g0".into(), and01), ("g1".into(), or02)]).unwrap();
        let mu = [0.3, 0.6];
        let outcome = amm_train(&t, &mu, None, 100, 1e-9).unwrap();
        assert!(outcome.converged, "training did not converge");
        let dist = hln_distribution(&t, &outcome.params).unwrap();
        let atoms: Vec<String> = t.atoms().to_vec();
        let vars = t.atom_variables();
        let joint = dist.tensor().transpose_to(&vars).unwrap();
        for (l, (_, e)) in t.formulas().iter().enumerate() {
            let mut expect = 0.0;
            for (offset, idx) in index_space(&vars).enumerate() {
                let assignment: BTreeMap<String, bool> =
                    atoms.iter().zip(&idx).map(|(a, &i)| (a.clone(), i == 1)).collect();
                if e.evaluate(&assignment).unwrap() {
                    expect += joint.dense_coords()[offset];
                }
            }
            assert!(
                (expect - mu[l]).abs() <= 1e-8,
                "formula {l}: model moment {expect} vs mean {}",
                mu[l]
            );
        }
    }

    #[test]
    fn accounting_entails_the_de_morgan_clause() {
        let t = accounting();
        let clause = Expression::apply(
            Connective::Or,
            vec![
                Expression::not(Expression::atom("A1")),
                Expression::not(Expression::atom("A2")),
                Expression::not(Expression::atom("F")),
            ],
        )
        .unwrap();
        let params = accounting_params(3.0f64.ln());
        assert!(probabilistic_entails(&t, &params, &clause).unwrap());
        // The reduction agrees with the direct expectation ⟨P, f⟩ = 1.
        let dist = hln_distribution(&t, &params).unwrap();
        let vars = t.atom_variables();
        let joint = dist.tensor().transpose_to(&vars).unwrap();
        let mut expect = 0.0;
        for (offset, idx) in index_space(&vars).enumerate() {
            let assignment: BTreeMap<String, bool> = t
                .atoms()
                .iter()
                .zip(&idx)
                .map(|(a, &i)| (a.clone(), i == 1))
                .collect();
            if clause.evaluate(&assignment).unwrap() {
                expect += joint.dense_coords()[offset];
            }
        }
        assert!((expect - 1.0).abs() <= 1e-9, "direct expectation {expect}");
    }

    #[test]
    fn every_network_entails_a_tautology() {
        let t = accounting();
        let taut = Expression::apply(
            Connective::Or,
            vec![Expression::atom("A1"), Expression::not(Expression::atom("A1"))],
        )
        .unwrap();
        assert!(probabilistic_entails(&t, &accounting_params(0.3), &taut).unwrap());
    }

    #[test]
    fn full_support_network_entails_only_tautologies() {
        let t = accounting();
        let params = HybridParams::soft(vec![0.5, -0.2]);
        assert!(!probabilistic_entails(&t, &params, &Expression::atom("A1")).unwrap());
    }

    #[test]
    fn all_soft_network_is_an_exponential_family_member() {
        let t = BooleanStatistic::new(vec![
            ("g0".into(), xor("X0", "X1")),
            (
                "g1".into(),
                Expression::apply(
                    Connective::And,
                    vec![Expression::atom("X1"), Expression::atom("X2")],
                )
                .unwrap(),
            ),
        ])
        .unwrap();
        let theta = vec![0.3, -0.2];
        let hln = hln_distribution(&t, &HybridParams::soft(theta.clone())).unwrap();

        let statistics: Vec<Statistic> = t
            .formulas()
            .iter()
            .map(|(name, e)| {
                let atoms = e.atoms();
                let vars: Vec<Variable> =
                    atoms.iter().map(|a| Variable::new(a.clone(), 2)).collect();
                let values: Vec<f64> = index_space(&vars)
                    .map(|idx| {
                        let assignment: BTreeMap<String, bool> = atoms
                            .iter()
                            .zip(&idx)
                            .map(|(a, &i)| (a.clone(), i == 1))
                            .collect();
                        f64::from(u8::from(e.evaluate(&assignment).unwrap()))
                    })
                    .collect();
                Statistic { name: name.clone(), vars, values }
            })
            .collect();
        let spec = ExponentialFamilySpec { statistics, base_measure: None, theta };
        let fam = exponential_family_distribution(&spec, &t.atom_variables()).unwrap();
        assert!(
            hln.tensor().approx_eq(fam.tensor(), 1e-12),
            "all-soft network differs from the exponential family member"
        );
    }
}
