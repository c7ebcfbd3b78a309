//! DOT rendering of a network as a bipartite factor graph: box nodes for
//! cores, ellipse nodes for variables, one edge per leg.

use reasonet_core::TensorNetwork;

/// Emits the factor graph in DOT syntax. Output is deterministic: cores and
/// variables appear in lexicographic order. Core-name suffixes (`_cC`, `_aC`)
/// and variable suffixes (`_dV`, `_cV`) carry role information when the
/// builders assigned them.
pub fn emit_dot(net: &TensorNetwork) -> String {
    let mut out = String::from("graph factor {\n");
    let mut cores: Vec<&str> = net.core_names().collect();
    cores.sort_unstable();
    for name in &cores {
        out.push_str(&format!("  \"{name}\" [shape=box];\n"));
    }
    let mut vars: Vec<String> =
        net.variables().into_iter().map(|v| v.name().to_string()).collect();
    vars.sort_unstable();
    for v in &vars {
        out.push_str(&format!("  \"{v}\" [shape=ellipse];\n"));
    }
    for name in &cores {
        let t = net.core(name).expect("core exists");
        let mut legs: Vec<&str> = t.leg_names();
        legs.sort_unstable();
        for leg in legs {
            out.push_str(&format!("  \"{name}\" -- \"{leg}\";\n"));
        }
    }
    out.push_str("}\n");
    out
}
