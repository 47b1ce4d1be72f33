//! The unbounded gate delay successor relation μ, reachability, and the
//! fairness emptiness check that stands in for quantifying over infinite
//! paths.
//!
//! `w μ w'` holds when every coordinate on which `w` and `w'` differ is
//! excited in `w`: any subset of the excited coordinates may switch in one
//! step. μ is reflexive; the graphs built here store only the proper
//! (non-identity) steps.
//!
//! A fair path is one on which no coordinate stays excited forever without
//! switching. For each coordinate `i` and value `a` let
//! `F(i,a) = { u : u_i != a or g_i(u) = u_i }`; a path is fair iff it visits
//! every `F(i,a)` infinitely often. A fair path with infinitely many state
//! changes therefore exists iff some non-trivial strongly connected
//! component of the proper-step graph meets all `2n` targets.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::state::{check_width, State};

/// Every μ-successor of `w`, in ascending state order. Contains `w` and `g(w)`.
pub fn mu_successors(g: &VectorField, w: State) -> Result<BTreeSet<State>> {
    let excited = g.excitation_set(w)?;
    Ok(excited.subsets().into_iter().map(|s| w.flip_set(s)).collect())
}

/// μ-successors in witness order: flip sets switching lower-numbered
/// coordinates are visited first.
pub(crate) fn successors_flip_order(g: &VectorField, w: State) -> Vec<State> {
    g.excited(w)
        .subsets()
        .into_iter()
        .map(|s| w.flip_set(s))
        .collect()
}

pub fn is_mu_step(g: &VectorField, w: State, next: State) -> Result<bool> {
    let excited = g.excitation_set(w)?;
    Ok(w.diff(&next)?.is_subset(&excited))
}

/// The states reachable from `w` (always including `w`).
pub fn reach(g: &VectorField, w: State) -> Result<BTreeSet<State>> {
    Ok(reach_graph(g, w)?.nodes().iter().copied().collect())
}

/// The states from which `target` is reachable, by reverse search over the
/// whole state space.
pub fn coreach(g: &VectorField, target: State) -> Result<BTreeSet<State>> {
    check_width(g.width(), target.width())?;
    let size = 1usize << g.width();
    let mut preds: Vec<Vec<u32>> = vec![Vec::new(); size];
    for x in g.states() {
        for y in successors_flip_order(g, x) {
            if y != x {
                preds[y.value() as usize].push(x.value());
            }
        }
    }
    let mut seen = vec![false; size];
    seen[target.value() as usize] = true;
    let mut queue = VecDeque::from([target.value()]);
    while let Some(y) = queue.pop_front() {
        for &x in &preds[y as usize] {
            if !seen[x as usize] {
                seen[x as usize] = true;
                queue.push_back(x);
            }
        }
    }
    Ok(g.states().filter(|s| seen[s.value() as usize]).collect())
}

/// The reachable part of the μ-graph from a root, with proper edges only.
#[derive(Clone, Debug)]
pub struct ReachGraph {
    root: State,
    freeze: Option<(usize, bool)>,
    nodes: Vec<State>,
    index: HashMap<State, usize>,
    succ: Vec<Vec<usize>>,
}

pub fn reach_graph(g: &VectorField, w: State) -> Result<ReachGraph> {
    check_width(g.width(), w.width())?;
    Ok(ReachGraph::explore(g, w, None))
}

/// Reach graph from `u` using only steps that leave coordinate `coord`
/// (0-based) at `value`.
pub fn frozen_reach(g: &VectorField, u: State, coord: usize, value: bool) -> Result<ReachGraph> {
    check_width(g.width(), u.width())?;
    if coord >= g.width() {
        return Err(Error::Precondition(format!(
            "coordinate {} out of range 1..={}",
            coord + 1,
            g.width()
        )));
    }
    if u.get(coord) != value {
        return Err(Error::Precondition(format!(
            "state {u} has coordinate {} = {}, not {}",
            coord + 1,
            u.get(coord) as u8,
            value as u8
        )));
    }
    Ok(ReachGraph::explore(g, u, Some((coord, value))))
}

impl ReachGraph {
    fn explore(g: &VectorField, root: State, freeze: Option<(usize, bool)>) -> Self {
        let mut order = vec![root];
        let mut seen: HashMap<State, usize> = HashMap::from([(root, 0)]);
        let mut raw_succ: Vec<Vec<State>> = Vec::new();
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            head += 1;
            let mut out = Vec::new();
            for y in successors_flip_order(g, x) {
                if y == x {
                    continue;
                }
                if let Some((c, _)) = freeze {
                    if y.get(c) != x.get(c) {
                        continue;
                    }
                }
                out.push(y);
                if let std::collections::hash_map::Entry::Vacant(slot) = seen.entry(y) {
                    slot.insert(order.len());
                    order.push(y);
                }
            }
            raw_succ.push(out);
        }

        let mut nodes = order.clone();
        nodes.sort();
        let index: HashMap<State, usize> =
            nodes.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut succ = vec![Vec::new(); nodes.len()];
        for (x, outs) in order.iter().zip(raw_succ) {
            let mut targets: Vec<usize> = outs.iter().map(|y| index[y]).collect();
            targets.sort_unstable();
            succ[index[x]] = targets;
        }
        Self {
            root,
            freeze,
            nodes,
            index,
            succ,
        }
    }

    pub fn root(&self) -> State {
        self.root
    }

    /// The coordinate and value held fixed, for graphs from [`frozen_reach`].
    pub fn freeze(&self) -> Option<(usize, bool)> {
        self.freeze
    }

    /// Reachable states in ascending order.
    pub fn nodes(&self) -> &[State] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, s: State) -> bool {
        self.index.contains_key(&s)
    }

    pub(crate) fn index_of(&self, s: State) -> Option<usize> {
        self.index.get(&s).copied()
    }

    pub(crate) fn succ_indices(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    /// Proper successors of a node, ascending.
    pub fn successors(&self, s: State) -> Vec<State> {
        match self.index_of(s) {
            Some(i) => self.succ[i].iter().map(|&j| self.nodes[j]).collect(),
            None => Vec::new(),
        }
    }

    /// Proper edges, ordered by source then target.
    pub fn edges(&self) -> Vec<(State, State)> {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(i, outs)| outs.iter().map(move |&j| (self.nodes[i], self.nodes[j])))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    /// Stable states of `g` among the nodes, ascending.
    pub fn stable_nodes(&self, g: &VectorField) -> Vec<State> {
        self.nodes
            .iter()
            .copied()
            .filter(|&s| g.image(s) == s)
            .collect()
    }

    /// Nodes reachable from `from` inside this graph, as an index mask.
    pub(crate) fn reachable_mask(&self, from: usize, avoid: Option<usize>) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.succ[x] {
                if Some(y) == avoid || seen[y] {
                    continue;
                }
                seen[y] = true;
                queue.push_back(y);
            }
        }
        seen
    }

    /// Nodes of this graph from which `target` is reachable inside it.
    pub(crate) fn coreach_mask(&self, target: usize) -> Vec<bool> {
        let mut preds = vec![Vec::new(); self.len()];
        for (x, outs) in self.succ.iter().enumerate() {
            for &y in outs {
                preds[y].push(x);
            }
        }
        let mut seen = vec![false; self.len()];
        seen[target] = true;
        let mut queue = VecDeque::from([target]);
        while let Some(y) = queue.pop_front() {
            for &x in &preds[y] {
                if !seen[x] {
                    seen[x] = true;
                    queue.push_back(x);
                }
            }
        }
        seen
    }

    /// A shortest proper walk between two nodes (inclusive), if one exists.
    pub fn shortest_walk(&self, from: State, to: State) -> Option<Vec<State>> {
        let (src, dst) = (self.index_of(from)?, self.index_of(to)?);
        let mut parent = vec![usize::MAX; self.len()];
        parent[src] = src;
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            if x == dst {
                break;
            }
            for &y in &self.succ[x] {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if parent[dst] == usize::MAX {
            return None;
        }
        let mut walk = vec![self.nodes[dst]];
        let mut x = dst;
        while x != src {
            x = parent[x];
            walk.push(self.nodes[x]);
        }
        walk.reverse();
        Some(walk)
    }
}

/// One strongly connected component of the proper-step graph.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Scc {
    /// Members, ascending.
    pub states: Vec<State>,
    /// A singleton with no proper cycle. Proper edges never loop, so every
    /// singleton is trivial.
    pub trivial: bool,
}

/// Strongly connected components, ordered by their least member.
pub fn proper_sccs(graph: &ReachGraph) -> Vec<Scc> {
    let components = tarjan(graph);
    let mut sccs: Vec<Scc> = components
        .into_iter()
        .map(|mut members| {
            members.sort_unstable();
            Scc {
                trivial: members.len() == 1,
                states: members.into_iter().map(|i| graph.nodes[i]).collect(),
            }
        })
        .collect();
    sccs.sort_by_key(|c| c.states[0]);
    sccs
}

/// Iterative Tarjan over node indices.
fn tarjan(graph: &ReachGraph) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = graph.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next_index = 0;

    for start in 0..n {
        if index[start] != UNVISITED {
            continue;
        }
        // (node, position in its successor list)
        let mut call: Vec<(usize, usize)> = vec![(start, 0)];
        index[start] = next_index;
        low[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = graph.succ[v].get(*pos) {
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                out.push(component);
            }
        }
    }
    out
}

/// A non-trivial SCC meeting every fairness target: the recurrent part of a
/// fair path that never converges.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SccWitness {
    pub states: Vec<State>,
}

impl SccWitness {
    /// Re-checks the fairness intersection property against `g`.
    pub fn is_fair(&self, g: &VectorField) -> bool {
        meets_all_targets(g, &self.states)
    }
}

/// For every coordinate `j` and value `a`, some member `u` has
/// `not (u_j = a and j excited in u)`.
pub(crate) fn meets_all_targets(g: &VectorField, members: &[State]) -> bool {
    (0..g.width()).all(|j| {
        [false, true].into_iter().all(|a| {
            members
                .iter()
                .any(|&u| !(u.get(j) == a && g.excited(u).contains(j)))
        })
    })
}

/// The first non-trivial SCC of `graph` that meets all fairness targets.
///
/// For a graph from [`frozen_reach`] the held coordinate never changes, so
/// its target for the held value reduces to "`g_i` agrees with the held value".
pub fn accepting_scc(g: &VectorField, graph: &ReachGraph) -> Option<SccWitness> {
    if let Some((c, b)) = graph.freeze() {
        debug_assert!(graph.nodes().iter().all(|s| s.get(c) == b));
    }
    proper_sccs(graph)
        .into_iter()
        .filter(|scc| !scc.trivial)
        .find(|scc| meets_all_targets(g, &scc.states))
        .map(|scc| SccWitness { states: scc.states })
}
