//! DOT diagrams of the μ relation.
//!
//! Node ids are raw bit strings. Labels repeat the bits with a `*` after
//! every excited coordinate. Stable states get a double border; the root,
//! when given, a thick one, and only its reach set is drawn. Only proper
//! steps are drawn as edges.

use std::fmt::Write;

use crate::error::Result;
use crate::field::VectorField;
use crate::nonautonomous::ClosedField;
use crate::relations::{mu_successors, reach};
use crate::state::{check_width, State};

/// Diagram of an autonomous field.
pub fn emit_dot(g: &VectorField, root: Option<State>) -> Result<String> {
    render(g, root, None)
}

/// Diagram of a closed field; labels separate state and input parts by `|`.
pub fn emit_closed_dot(c: &ClosedField, root: Option<State>) -> Result<String> {
    render(c.view(), root, Some(c.state_width()))
}

fn render(g: &VectorField, root: Option<State>, split: Option<usize>) -> Result<String> {
    let nodes: Vec<State> = match root {
        Some(r) => {
            check_width(g.width(), r.width())?;
            reach(g, r)?.into_iter().collect()
        }
        None => g.states().collect(),
    };
    let mut out = String::from("digraph mu {\n");
    for &u in &nodes {
        let excited = g.excitation_set(u)?;
        let mut label = String::new();
        for c in 0..u.width() {
            if split == Some(c) {
                label.push('|');
            }
            label.push(if u.get(c) { '1' } else { '0' });
            if excited.contains(c) {
                label.push('*');
            }
        }
        write!(out, "  \"{u}\" [label=\"{label}\"").expect("string write");
        if excited.is_empty() {
            out.push_str(", peripheries=2");
        }
        if root == Some(u) {
            out.push_str(", penwidth=2");
        }
        out.push_str("];\n");
    }
    for &u in &nodes {
        for v in mu_successors(g, u)? {
            if v != u {
                writeln!(out, "  \"{u}\" -> \"{v}\";").expect("string write");
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}
