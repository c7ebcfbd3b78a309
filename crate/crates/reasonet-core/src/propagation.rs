//! Message passing: tree belief propagation, directed belief propagation and
//! constraint propagation.
//!
//! All three algorithms share a message store keyed by ordered core pairs and
//! a FIFO scheduler. Tree propagation sends each direction exactly once and
//! yields exact local marginals; directed propagation pushes one-hot function
//! values through a compiled decomposition graph; constraint propagation
//! iterates nonzero-support indicators over boolean networks to a sound
//! fixpoint.

use std::collections::{BTreeMap, HashSet, VecDeque};

use indexmap::IndexMap;

use crate::encoding::DecompositionGraph;
use crate::error::{Error, Result};
use crate::network::{Message, TensorNetwork};
use crate::tensor::{Tensor, Variable};

/// Messages keyed by (from, to) core names.
#[derive(Debug, Clone, Default)]
pub struct MessageStore {
    messages: IndexMap<(String, String), Message>,
}

impl MessageStore {
    /// The message sent from `from` to `to`, if any.
    pub fn get(&self, from: &str, to: &str) -> Option<&Message> {
        self.messages.get(&(from.to_string(), to.to_string()))
    }

    /// All messages in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &Message> {
        self.messages.values()
    }

    /// All messages into the given core.
    pub fn incoming<'a>(&'a self, to: &'a str) -> impl Iterator<Item = &'a Message> + 'a {
        self.messages.values().filter(move |m| m.to == to)
    }

    /// Number of stored messages.
    pub fn len(&self) -> usize {
        self.messages.len()
    }

    /// True iff no message has been stored.
    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    fn put(&mut self, msg: Message) {
        self.messages.insert((msg.from.clone(), msg.to.clone()), msg);
    }
}

/// Result of a propagation run.
#[derive(Debug, Clone)]
pub struct PropagationResult {
    /// The final message store.
    pub store: MessageStore,
    /// Total messages computed (constraint mode counts recomputations).
    pub messages_sent: usize,
    /// Scheduler iterations.
    pub epochs: usize,
    /// Support-shrink events (constraint mode only).
    pub support_changes: usize,
}

/// Shared variables of two cores, in the first core's leg order.
fn shared_legs(net: &TensorNetwork, a: &str, b: &str) -> Vec<Variable> {
    let ta = net.core(a).expect("core exists");
    let tb = net.core(b).expect("core exists");
    ta.legs().iter().filter(|v| tb.leg(v.name()).is_some()).cloned().collect()
}

/// Contracts one core together with a set of incoming messages onto the given
/// open variables.
fn contract_with_messages(
    net: &TensorNetwork,
    core: &str,
    messages: &[&Message],
    open: &[Variable],
) -> Result<Tensor> {
    let mut local = TensorNetwork::new();
    local.insert(core, net.core(core).expect("core exists").clone())?;
    for (k, m) in messages.iter().enumerate() {
        local.insert(format!("__msg_{k}"), m.payload.clone())?;
    }
    local.contract(open)
}

/// The undirected core-adjacency edges: unordered pairs of distinct cores with
/// intersecting legs, in insertion order.
fn adjacency(net: &TensorNetwork) -> Vec<(String, String)> {
    let names: Vec<String> = net.core_names().map(str::to_string).collect();
    let mut edges = Vec::new();
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            if !shared_legs(net, &names[i], &names[j]).is_empty() {
                edges.push((names[i].clone(), names[j].clone()));
            }
        }
    }
    edges
}

/// Runs tree belief propagation. The core-adjacency graph must be a forest;
/// each of the `|E→|` directions is sent exactly once, and every final message
/// equals the contraction of its pre-edge set.
pub fn tree_bp(net: &TensorNetwork) -> Result<PropagationResult> {
    let edges = adjacency(net);
    // Cycle check by union-find over core names.
    let names: Vec<String> = net.core_names().map(str::to_string).collect();
    let mut parent: BTreeMap<&str, String> = names.iter().map(|n| (n.as_str(), n.clone())).collect();
    fn find(parent: &mut BTreeMap<&str, String>, mut x: String) -> String {
        while parent[x.as_str()] != x {
            x = parent[x.as_str()].clone();
        }
        x
    }
    for (a, b) in &edges {
        let ra = find(&mut parent, a.clone());
        let rb = find(&mut parent, b.clone());
        if ra == rb {
            return Err(Error::Structure(
                "core-adjacency graph has a cycle; tree propagation needs a forest".into(),
            ));
        }
        let slot = parent.iter_mut().find(|(k, _)| **k == ra).expect("root present");
        *slot.1 = rb;
    }

    // Both directions of every adjacency edge.
    let directions: Vec<(String, String)> = edges
        .iter()
        .flat_map(|(a, b)| [(a.clone(), b.clone()), (b.clone(), a.clone())])
        .collect();
    let neighbors = |c: &str| -> Vec<String> {
        edges
            .iter()
            .filter_map(|(a, b)| {
                if a == c {
                    Some(b.clone())
                } else if b == c {
                    Some(a.clone())
                } else {
                    None
                }
            })
            .collect()
    };

    let mut store = MessageStore::default();
    let mut sent: HashSet<(String, String)> = HashSet::new();
    let mut epochs = 0usize;
    while sent.len() < directions.len() {
        epochs += 1;
        let mut progressed = false;
        for (from, to) in &directions {
            if sent.contains(&(from.clone(), to.clone())) {
                continue;
            }
            // Ready when all other neighbors of the sender have delivered.
            let ready = neighbors(from)
                .iter()
                .filter(|w| *w != to)
                .all(|w| sent.contains(&(w.clone(), from.clone())));
            if !ready {
                continue;
            }
            let incoming: Vec<&Message> =
                store.iter().filter(|m| m.to == *from && m.from != *to).collect();
            let open = shared_legs(net, from, to);
            let payload = contract_with_messages(net, from, &incoming, &open)?;
            store.put(Message { from: from.clone(), to: to.clone(), payload });
            sent.insert((from.clone(), to.clone()));
            progressed = true;
        }
        if !progressed {
            return Err(Error::State("tree propagation stalled".into()));
        }
    }
    let messages_sent = store.len();
    Ok(PropagationResult { store, messages_sent, epochs, support_changes: 0 })
}

/// The local marginal of a core after [`tree_bp`]: the contraction of the core
/// with all its incoming messages onto the core's legs. Equals the contraction
/// of the whole network onto those legs.
pub fn local_marginal(net: &TensorNetwork, core: &str, result: &PropagationResult) -> Result<Tensor> {
    let t = net
        .core(core)
        .ok_or_else(|| Error::State(format!("unknown core '{core}'")))?;
    let incoming: Vec<&Message> = result.store.incoming(core).collect();
    contract_with_messages(net, core, &incoming, t.legs())
}

/// A tensor network with a per-core partition of legs into inputs and outputs,
/// as required by directed belief propagation.
#[derive(Debug, Clone)]
pub struct DirectedNetwork {
    /// The underlying network.
    pub net: TensorNetwork,
    /// Per core: (input leg names, output leg names).
    pub roles: IndexMap<String, (Vec<String>, Vec<String>)>,
}

impl DirectedNetwork {
    /// Compiles a decomposition graph and attaches one-hot evidence cores
    /// (`ev_<node>`) for the given input node states.
    pub fn from_graph(g: &DecompositionGraph, inputs: &BTreeMap<String, usize>) -> Result<Self> {
        let mut net = g.compile()?;
        let mut roles = g.edge_roles();
        for (node, &state) in inputs {
            let v = g
                .node(node)
                .ok_or_else(|| Error::Index(format!("unknown input node '{node}'")))?;
            net.insert(format!("ev_{node}"), Tensor::one_hot(v.clone(), state)?)?;
            roles.insert(format!("ev_{node}"), (Vec::new(), vec![node.clone()]));
        }
        Ok(Self { net, roles })
    }

    fn in_legs(&self, core: &str) -> &[String] {
        &self.roles[core].0
    }

    fn out_legs(&self, core: &str) -> &[String] {
        &self.roles[core].1
    }
}

/// Runs directed belief propagation over a network with in/out leg roles.
/// Directions run from a producer to a consumer of its outputs; each message
/// is the contraction of the sender with its received inputs onto the shared
/// produced-consumed legs. With one-hot evidence on every graph input, every
/// message is a tensor product of one-hots of node-function values.
pub fn directed_bp(dnet: &DirectedNetwork) -> Result<PropagationResult> {
    let names: Vec<String> = dnet.net.core_names().map(str::to_string).collect();
    for n in &names {
        if !dnet.roles.contains_key(n) {
            return Err(Error::State(format!("core '{n}' has no in/out role")));
        }
    }
    // Directed message directions per the in/out leg sets.
    let mut directions: Vec<(String, String)> = Vec::new();
    for e0 in &names {
        for e1 in &names {
            if e0 == e1 {
                continue;
            }
            let e0_in: HashSet<&str> = dnet.in_legs(e0).iter().map(String::as_str).collect();
            let e0_out: HashSet<&str> = dnet.out_legs(e0).iter().map(String::as_str).collect();
            let e1_in: HashSet<&str> = dnet.in_legs(e1).iter().map(String::as_str).collect();
            let e1_out: HashSet<&str> = dnet.out_legs(e1).iter().map(String::as_str).collect();
            let cond = e0_in.is_disjoint(&e1_in.union(&e1_out).copied().collect())
                && e1_out.is_disjoint(&e0_in.union(&e0_out).copied().collect())
                && !e0_out.is_disjoint(&e1_in);
            if cond {
                directions.push((e0.clone(), e1.clone()));
            }
        }
    }

    let mut store = MessageStore::default();
    let mut sent: HashSet<(String, String)> = HashSet::new();
    let mut epochs = 0usize;
    loop {
        epochs += 1;
        let mut progressed = false;
        for (from, to) in &directions {
            if sent.contains(&(from.clone(), to.clone())) {
                continue;
            }
            // Ready when every input leg of the sender is covered by a
            // received message.
            let covered = |leg: &str| {
                store.incoming(from).any(|m| m.payload.leg(leg).is_some())
            };
            if !dnet.in_legs(from).iter().all(|l| covered(l)) {
                continue;
            }
            let incoming: Vec<&Message> = store.incoming(from).collect();
            let open: Vec<Variable> = dnet
                .out_legs(from)
                .iter()
                .filter(|l| dnet.in_legs(to).contains(l))
                .map(|l| dnet.net.variable(l).expect("leg registered"))
                .collect();
            let payload = contract_with_messages(&dnet.net, from, &incoming, &open)?;
            store.put(Message { from: from.clone(), to: to.clone(), payload });
            sent.insert((from.clone(), to.clone()));
            progressed = true;
        }
        if sent.len() == directions.len() {
            break;
        }
        if !progressed {
            return Err(Error::State(
                "directed propagation stalled; missing input evidence".into(),
            ));
        }
    }
    // Every core's input legs must have been fed, including sinks that send
    // nothing themselves.
    for name in &names {
        for leg in dnet.in_legs(name) {
            if !store.incoming(name).any(|m| m.payload.leg(leg).is_some()) {
                return Err(Error::State(format!(
                    "input leg '{leg}' of core '{name}' received no message; missing evidence"
                )));
            }
        }
    }
    let messages_sent = store.len();
    Ok(PropagationResult { store, messages_sent, epochs, support_changes: 0 })
}

/// Reads the final one-hot values of the graph outputs after [`directed_bp`]:
/// each sink leg's local contraction must be a one-hot up to scale.
pub fn directed_outputs(
    dnet: &DirectedNetwork,
    result: &PropagationResult,
) -> Result<BTreeMap<String, usize>> {
    let mut out = BTreeMap::new();
    for (core, (_, outs)) in &dnet.roles {
        for leg in outs {
            let consumed = dnet
                .roles
                .iter()
                .any(|(other, (ins, _))| other != core && ins.contains(leg));
            if consumed {
                continue;
            }
            let v = dnet.net.variable(leg).expect("leg registered");
            let incoming: Vec<&Message> = result.store.incoming(core).collect();
            let local = contract_with_messages(&dnet.net, core, &incoming, &[v.clone()])?;
            let support = local.nonzero_indicator();
            let states: Vec<usize> = support
                .dense_coords()
                .iter()
                .enumerate()
                .filter(|(_, &c)| c == 1.0)
                .map(|(i, _)| i)
                .collect();
            match states.as_slice() {
                [s] => {
                    out.insert(leg.clone(), *s);
                }
                [] => {
                    return Err(Error::State(format!("output '{leg}' has empty support")));
                }
                _ => {
                    return Err(Error::State(format!(
                        "output '{leg}' is not determined to a single state"
                    )));
                }
            }
        }
    }
    Ok(out)
}

/// Runs constraint propagation over a network of boolean cores. Messages start
/// as all-ones over the shared legs of every ordered intersecting pair; each
/// update replaces a message by the nonzero indicator of the sender's local
/// contraction, and a support change re-queues all directions leaving the
/// receiver. Terminates because supports only shrink; every final message
/// dominates the nonzero indicator of the true marginal.
pub fn constraint_propagation(net: &TensorNetwork) -> Result<PropagationResult> {
    for (name, t) in net.iter() {
        if !t.is_boolean() {
            return Err(Error::Input(format!("core '{name}' is not boolean")));
        }
    }
    let edges = adjacency(net);
    let directions: Vec<(String, String)> = edges
        .iter()
        .flat_map(|(a, b)| [(a.clone(), b.clone()), (b.clone(), a.clone())])
        .collect();
    // Outgoing directions per core, precomputed for re-queuing.
    let mut outgoing: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (k, (from, _)) in directions.iter().enumerate() {
        outgoing.entry(from).or_default().push(k);
    }

    let mut store = MessageStore::default();
    for (from, to) in &directions {
        let open = shared_legs(net, from, to);
        store.put(Message { from: from.clone(), to: to.clone(), payload: Tensor::ones(open) });
    }

    let mut queue: VecDeque<usize> = (0..directions.len()).collect();
    let mut queued: HashSet<usize> = queue.iter().copied().collect();
    let mut epochs = 0usize;
    let mut messages_sent = 0usize;
    let mut support_changes = 0usize;
    while let Some(k) = queue.pop_front() {
        queued.remove(&k);
        epochs += 1;
        let (from, to) = &directions[k];
        let incoming: Vec<&Message> =
            store.iter().filter(|m| m.to == *from && m.from != *to).collect();
        let open = shared_legs(net, from, to);
        let local = contract_with_messages(net, from, &incoming, &open)?;
        let new = local.nonzero_indicator();
        messages_sent += 1;
        let old = &store.get(from, to).expect("initialized").payload;
        if !new.approx_eq(old, 0.0) {
            support_changes += 1;
            store.put(Message { from: from.clone(), to: to.clone(), payload: new });
            if let Some(outs) = outgoing.get(to.as_str()) {
                for &j in outs {
                    if queued.insert(j) {
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    Ok(PropagationResult { store, messages_sent, epochs, support_changes })
}

/// Truth status of an atom after constraint propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deduction {
    /// The atom's aggregated support is {1}.
    True,
    /// The atom's aggregated support is {0}.
    False,
    /// Both states remain possible.
    Unknown,
}

/// Aggregates per-atom supports after [`constraint_propagation`]: for each
/// atom, the intersection over all cores containing it of the support of the
/// core's local contraction onto the atom. An empty support means the network
/// is unsatisfiable. Sound but not complete: a decided value never contradicts
/// true entailment.
pub fn deduce_atoms(
    net: &TensorNetwork,
    atoms: &[String],
    result: &PropagationResult,
) -> Result<BTreeMap<String, Deduction>> {
    let mut out = BTreeMap::new();
    for atom in atoms {
        let v = net
            .variable(atom)
            .ok_or_else(|| Error::Index(format!("unknown atom '{atom}'")))?;
        let mut support = vec![1.0; v.dim()];
        for core in net.cores_with_variable(atom) {
            let incoming: Vec<&Message> = result.store.incoming(core).collect();
            let local = contract_with_messages(net, core, &incoming, &[v.clone()])?;
            for (s, c) in support.iter_mut().zip(local.nonzero_indicator().dense_coords()) {
                *s *= c;
            }
        }
        let states: Vec<usize> = support
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 1.0)
            .map(|(i, _)| i)
            .collect();
        let deduction = match states.as_slice() {
            [] => {
                return Err(Error::Inconsistency(format!(
                    "atom '{atom}' has empty support; the network is unsatisfiable"
                )))
            }
            [1] => Deduction::True,
            [0] => Deduction::False,
            _ => Deduction::Unknown,
        };
        out.insert(atom.clone(), deduction);
    }
    Ok(out)
}
