//! Brute-force path semantics used as a referee for the graph-based
//! decision procedures.
//!
//! Infinite fair paths are represented as lassos: a finite prefix followed
//! either by a stable parking state or by a proper cycle whose support
//! passes the fairness test. Nothing here calls into the relations or
//! properties modules' algorithms; the μ relation, reach sets, cycle
//! supports and every verdict are recomputed from the truth table.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::field::{OrbitSummary, VectorField};
use crate::properties::{
    Escape, HazardCause, PropertyReport, SensitivityCause, TcgrBranch, Verdict, Witness,
};
use crate::relations::SccWitness;
use crate::state::{check_width, CoordSet, State};

/// Largest reach set the oracle will enumerate.
pub const MAX_ORACLE_NODES: usize = 16;

/// A finite μ-walk. Identity steps are allowed.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Walk {
    pub states: Vec<State>,
}

impl Walk {
    pub fn new(states: Vec<State>) -> Self {
        Self { states }
    }

    /// Fails unless every consecutive pair is a μ-step of `g`.
    pub fn validate(&self, g: &VectorField) -> Result<()> {
        let t = Table::new(g);
        for s in &self.states {
            check_width(g.width(), s.width())?;
        }
        for (k, pair) in self.states.windows(2).enumerate() {
            if !t.step(pair[0].value(), pair[1].value()) {
                return Err(Error::MalformedWalk(format!(
                    "{} -> {} at index {k} is not a step",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(())
    }
}

/// What a lasso does forever after its prefix.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Tail {
    /// Stays at a stable state.
    Park(State),
    /// Repeats a closed walk of proper steps; the last state steps to the first.
    Cycle(Vec<State>),
}

/// `prefix` followed by `tail`; the lasso starts at the first prefix state,
/// or at the tail's first state when the prefix is empty.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Lasso {
    pub prefix: Vec<State>,
    pub tail: Tail,
}

impl Lasso {
    pub fn origin(&self) -> State {
        match (self.prefix.first(), &self.tail) {
            (Some(&s), _) => s,
            (None, Tail::Park(s)) => *s,
            (None, Tail::Cycle(c)) => c[0],
        }
    }

    pub fn is_parking(&self) -> bool {
        matches!(self.tail, Tail::Park(_))
    }

    /// The first `len` states of the infinite behavior.
    pub fn unroll(&self, len: usize) -> Vec<State> {
        let repeat: &[State] = match &self.tail {
            Tail::Park(s) => std::slice::from_ref(s),
            Tail::Cycle(c) => c,
        };
        self.prefix
            .iter()
            .chain(repeat.iter().cycle())
            .take(len)
            .copied()
            .collect()
    }

    /// States visited infinitely often.
    pub fn support(&self) -> Vec<State> {
        let mut out = match &self.tail {
            Tail::Park(s) => vec![*s],
            Tail::Cycle(c) => c.clone(),
        };
        out.sort();
        out.dedup();
        out
    }
}

/// Truth-table view with the μ relation computed on raw values.
struct Table<'a> {
    n: usize,
    t: &'a [u32],
}

impl<'a> Table<'a> {
    fn new(g: &'a VectorField) -> Self {
        Self {
            n: g.width(),
            t: g.table(),
        }
    }

    fn excited(&self, u: u32) -> u32 {
        u ^ self.t[u as usize]
    }

    fn stable(&self, u: u32) -> bool {
        self.t[u as usize] == u
    }

    /// `u μ v`: `v` differs from `u` only on coordinates excited in `u`.
    fn step(&self, u: u32, v: u32) -> bool {
        (u ^ v) & !self.excited(u) == 0
    }

    fn state(&self, u: u32) -> State {
        State::new(u, self.n).expect("value within width")
    }

    fn space(&self) -> std::ops::Range<u32> {
        0..(1u32 << self.n)
    }

    /// Fixpoint of the step relation, optionally holding one bit fixed.
    fn reach(&self, w: u32, hold: u32) -> Vec<u32> {
        let mut set = BTreeSet::from([w]);
        loop {
            let grown: BTreeSet<u32> = set
                .iter()
                .flat_map(|&x| {
                    self.space()
                        .filter(move |&y| self.step(x, y) && (x ^ y) & hold == 0)
                })
                .collect();
            if grown.len() == set.len() {
                return set.into_iter().collect();
            }
            set = grown;
        }
    }

    /// Fairness of a recurrent set: for each coordinate and value, some
    /// member does not have that coordinate excited at that value.
    fn fair(&self, support: &[u32]) -> bool {
        (0..self.n).all(|c| {
            let bit = 1u32 << c;
            [0, bit].iter().all(|&a| {
                support
                    .iter()
                    .any(|&u| !(u & bit == a && self.excited(u) & bit != 0))
            })
        })
    }

    fn strongly_connected(&self, support: &[u32]) -> bool {
        let inside = |x: u32| support.contains(&x);
        let sweep = |forward: bool| {
            let mut seen = BTreeSet::from([support[0]]);
            let mut queue = VecDeque::from([support[0]]);
            while let Some(x) = queue.pop_front() {
                for &y in support {
                    let edge = if forward { self.step(x, y) } else { self.step(y, x) };
                    if x != y && edge && inside(y) && seen.insert(y) {
                        queue.push_back(y);
                    }
                }
            }
            seen.len() == support.len()
        };
        sweep(true) && sweep(false)
    }

    /// Every fair, strongly connected support `S ⊆ region` with
    /// `2 <= |S| <= bound`, ascending by mask.
    fn fair_supports(&self, region: &[u32], bound: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        for mask in 1u32..(1u32 << region.len()) {
            let size = mask.count_ones() as usize;
            if size < 2 || size > bound {
                continue;
            }
            let members: Vec<u32> = (0..region.len())
                .filter(|&k| mask & (1 << k) != 0)
                .map(|k| region[k])
                .collect();
            if self.strongly_connected(&members) && self.fair(&members) {
                out.push(members);
            }
        }
        out
    }

    /// Shortest walk `from ⇝ to` over proper steps inside `region`,
    /// expanding successors in ascending order.
    fn shortest(&self, region: &[u32], from: u32, to: u32) -> Option<Vec<u32>> {
        let mut parent = std::collections::BTreeMap::from([(from, from)]);
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            if x == to {
                let mut path = vec![x];
                let mut cur = x;
                while parent[&cur] != cur {
                    cur = parent[&cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &y in region {
                if y != x && self.step(x, y) && !parent.contains_key(&y) {
                    parent.insert(y, x);
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// Shortest walks from `from` to every state of `region` it reaches.
    fn shortest_from(&self, region: &[u32], from: u32) -> std::collections::BTreeMap<u32, Vec<u32>> {
        let mut paths = std::collections::BTreeMap::from([(from, vec![from])]);
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            for &y in region {
                if y != x && self.step(x, y) && !paths.contains_key(&y) {
                    let mut path = paths[&x].clone();
                    path.push(y);
                    paths.insert(y, path);
                    queue.push_back(y);
                }
            }
        }
        paths
    }

    /// A closed walk from the least member through every induced edge.
    fn covering_cycle(&self, support: &[u32]) -> Vec<u32> {
        let start = support[0];
        let mut walk = vec![start];
        for &a in support {
            for &b in support {
                if a != b && self.step(a, b) {
                    let here = *walk.last().expect("nonempty");
                    let to_a = self.shortest(support, here, a).expect("strongly connected");
                    walk.extend_from_slice(&to_a[1..]);
                    walk.push(b);
                }
            }
        }
        let here = *walk.last().expect("nonempty");
        let back = self.shortest(support, here, start).expect("strongly connected");
        walk.extend_from_slice(&back[1..]);
        walk.pop();
        walk
    }

    fn orbit(&self, w: u32) -> OrbitSummary {
        let mut seq = vec![w];
        loop {
            let next = self.t[*seq.last().expect("nonempty") as usize];
            if let Some(first) = seq.iter().position(|&x| x == next) {
                return OrbitSummary {
                    transient_len: first,
                    period: seq.len() - first,
                    milestones: seq.iter().map(|&x| self.state(x)).collect(),
                };
            }
            seq.push(next);
        }
    }
}

fn guard(region_len: usize) -> Result<()> {
    if region_len > MAX_ORACLE_NODES {
        return Err(Error::ResourceLimit {
            what: "reach set size",
            found: region_len,
            limit: MAX_ORACLE_NODES,
        });
    }
    Ok(())
}

/// `w, g(w), g²(w), …`: every excited coordinate switches at the next step.
pub fn full_update_walk(g: &VectorField, w: State, steps: usize) -> Result<Walk> {
    check_width(g.width(), w.width())?;
    let mut states = vec![w];
    for _ in 0..steps {
        let last = *states.last().expect("nonempty");
        states.push(g.apply(last)?);
    }
    Ok(Walk::new(states))
}

/// Validates a lasso's structure and decides fairness of its behavior.
pub fn is_fair_lasso(g: &VectorField, lasso: &Lasso) -> Result<bool> {
    let t = Table::new(g);
    let mut all: Vec<State> = lasso.prefix.clone();
    match &lasso.tail {
        Tail::Park(s) => all.push(*s),
        Tail::Cycle(c) => all.extend(c.iter().copied()),
    }
    for s in &all {
        check_width(g.width(), s.width())?;
    }
    Walk::new(lasso.prefix.clone())
        .validate(g)
        .map_err(|e| Error::MalformedLasso(e.to_string()))?;
    let entry = match &lasso.tail {
        Tail::Park(s) => *s,
        Tail::Cycle(c) => *c.first().ok_or_else(|| Error::MalformedLasso("empty cycle".into()))?,
    };
    if let Some(last) = lasso.prefix.last() {
        if !t.step(last.value(), entry.value()) {
            return Err(Error::MalformedLasso(format!("{last} does not step to {entry}")));
        }
    }
    match &lasso.tail {
        Tail::Park(s) => {
            if !t.stable(s.value()) {
                return Err(Error::MalformedLasso(format!("parking state {s} is not stable")));
            }
            Ok(true)
        }
        Tail::Cycle(c) => {
            if c.len() < 2 {
                return Err(Error::MalformedLasso("a cycle needs two states".into()));
            }
            for k in 0..c.len() {
                let (a, b) = (c[k], c[(k + 1) % c.len()]);
                if a == b || !t.step(a.value(), b.value()) {
                    return Err(Error::MalformedLasso(format!("{a} -> {b} is not a proper step")));
                }
            }
            let support: Vec<u32> = lasso.support().iter().map(|s| s.value()).collect();
            Ok(t.fair(&support))
        }
    }
}

/// A deterministic catalog of fair lassos from `w`.
///
/// For every tail target (each reachable stable state, and each fair
/// strongly connected support of at most `cycle_bound` states), the catalog
/// holds the lasso whose prefix is a shortest walk to the target, and for
/// every proper step `u -> u'` inside the reach set one lasso whose prefix
/// runs through that step first. Every reachable state and every proper
/// step therefore occurs on some catalogued fair behavior.
pub fn enumerate_lassos(g: &VectorField, w: State, cycle_bound: Option<usize>) -> Result<Vec<Lasso>> {
    check_width(g.width(), w.width())?;
    let t = Table::new(g);
    let region = t.reach(w.value(), 0);
    guard(region.len())?;
    let bound = cycle_bound.unwrap_or(region.len());
    let tails = tail_targets(&t, &region, bound);

    let paths: std::collections::BTreeMap<u32, _> = region
        .iter()
        .map(|&u| (u, t.shortest_from(&region, u)))
        .collect();
    let walk = |from: u32, to: u32| paths[&from].get(&to).cloned();
    let to_states = |path: &[u32]| -> Vec<State> { path.iter().map(|&x| t.state(x)).collect() };

    let mut catalog = BTreeSet::new();
    for (entry, tail) in &tails {
        let direct = walk(w.value(), *entry).expect("entry in reach");
        catalog.insert(Lasso {
            prefix: to_states(&direct[..direct.len() - 1]),
            tail: tail.clone(),
        });
        for &u in &region {
            for &v in &region {
                if u == v || !t.step(u, v) {
                    continue;
                }
                let Some(back) = walk(v, *entry) else {
                    continue;
                };
                let mut path = walk(w.value(), u).expect("edge source in reach");
                path.extend_from_slice(&back);
                path.pop();
                catalog.insert(Lasso {
                    prefix: to_states(&path),
                    tail: tail.clone(),
                });
            }
        }
    }
    Ok(catalog.into_iter().collect())
}

/// Parking states and fair cycles, each with its entry state.
fn tail_targets(t: &Table<'_>, region: &[u32], bound: usize) -> Vec<(u32, Tail)> {
    let mut tails: Vec<(u32, Tail)> = region
        .iter()
        .filter(|&&u| t.stable(u))
        .map(|&u| (u, Tail::Park(t.state(u))))
        .collect();
    for support in t.fair_supports(region, bound) {
        let cycle = t.covering_cycle(&support);
        tails.push((cycle[0], Tail::Cycle(cycle.iter().map(|&x| t.state(x)).collect())));
    }
    tails
}

/// When the field is constant on the reach set, every catalogued behavior
/// is also a fair behavior of the globally constant field with that value.
pub fn constant_field_admits_lassos(g: &VectorField, w: State, lassos: &[Lasso]) -> Result<bool> {
    let t = Table::new(g);
    let region = t.reach(w.value(), 0);
    let target = t.t[w.value() as usize];
    if region.iter().any(|&u| t.t[u as usize] != target) {
        return Err(Error::Precondition("field is not constant on the reach set".into()));
    }
    let constant = VectorField::constant(t.state(target))?;
    for lasso in lassos {
        match is_fair_lasso(&constant, lasso) {
            Ok(true) => {}
            Ok(false) | Err(Error::MalformedLasso(_)) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

/// Recomputes every verdict from lassos and brute-force search.
pub fn oracle_classify(g: &VectorField, w: State) -> Result<PropertyReport> {
    check_width(g.width(), w.width())?;
    let t = Table::new(g);
    let region = t.reach(w.value(), 0);
    guard(region.len())?;
    let wv = w.value();
    let tails = tail_targets(&t, &region, region.len());

    let limits: Vec<State> = tails
        .iter()
        .filter_map(|(_, tail)| match tail {
            Tail::Park(s) => Some(*s),
            Tail::Cycle(_) => None,
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let oscillation = tails.iter().find_map(|(_, tail)| match tail {
        Tail::Cycle(c) => {
            let mut states = c.clone();
            states.sort();
            states.dedup();
            Some(SccWitness { states })
        }
        Tail::Park(_) => None,
    });
    let convergent = oscillation.is_none();
    let di = convergent && limits.len() == 1;
    let limit = di.then(|| limits[0]);

    let non_monotone = non_monotone_walk(&t, &region, wv);
    let monotone = non_monotone.is_none();
    let hf = di && monotone;

    let image = t.t[wv as usize];
    let odd_image = region.iter().copied().find(|&u| t.t[u as usize] != image);
    let thf = odd_image.is_none();

    let sm_witness = semi_modularity_violation(&t, &region);
    let wsm_witness = weak_semi_modularity_violation(&t, &region);
    let tcgr_violation = milestone_product_violation(&t, &region, wv);
    let orbit = t.orbit(wv);
    let tc = tcgr_violation.is_none();
    let sbc = (0..orbit.transient_len + orbit.period).all(|j| {
        (orbit.at(j).value() ^ orbit.at(j + 1).value()).count_ones() <= 1
    });

    let mut delay_causes = Vec::new();
    if !convergent {
        delay_causes.push(SensitivityCause::Oscillation);
    }
    if limits.len() >= 2 {
        delay_causes.push(SensitivityCause::MultipleLimits);
    }
    let mut hazard_causes = Vec::new();
    if !monotone {
        hazard_causes.push(HazardCause::NonMonotonous);
    }
    if limits.len() >= 2 {
        hazard_causes.push(HazardCause::MultipleLimits);
    }

    let verdict = |holds: bool, witness: Witness| {
        if holds {
            Verdict::pass()
        } else {
            Verdict::fail(witness)
        }
    };
    let limits_witness = match &oscillation {
        Some(scc) => Witness::Oscillation(scc.clone()),
        None => Witness::Limits(limits.clone()),
    };
    let hazard_witness = match &non_monotone {
        Some((coord, walk)) => Witness::NonMonotone {
            coord: *coord,
            walk: walk.iter().map(|&x| t.state(x)).collect(),
        },
        None => limits_witness.clone(),
    };

    Ok(PropertyReport {
        state: w,
        stable: t.stable(wv),
        excited: g.excitation_set(w)?,
        reach_size: region.len(),
        stable_reachable: limits.clone(),
        limit,
        delay_insensitive: verdict(di, limits_witness),
        hazard_free: verdict(hf, hazard_witness),
        trivially_hazard_free: verdict(
            thf,
            Witness::DifferentImages {
                first: w,
                second: t.state(odd_image.unwrap_or(wv)),
            },
        ),
        trivial_target: thf.then(|| t.state(image)),
        semi_modular: verdict_of(sm_witness),
        weakly_semi_modular: verdict_of(wsm_witness),
        tcgr: verdict(tc, Witness::Unmatched(t.state(tcgr_violation.unwrap_or(wv)))),
        tcgr_branch: tc.then(|| TcgrBranch::for_orbit(&orbit)),
        single_bit_change: sbc,
        delay_sensitivity_causes: delay_causes,
        hazard_causes,
        hazardous_transition: match (limit, hf) {
            (Some(l), false) => Some((w, l)),
            _ => None,
        },
        orbit,
    })
}

fn verdict_of(witness: Option<Witness>) -> Verdict {
    match witness {
        Some(w) => Verdict::fail(w),
        None => Verdict::pass(),
    }
}

/// A walk on which some coordinate switches twice, by search over
/// (state, per-coordinate switch counts capped at 2), walks of length at
/// most `3·|reach|`.
fn non_monotone_walk(t: &Table<'_>, region: &[u32], w: u32) -> Option<(usize, Vec<u32>)> {
    let n = t.n;
    let cap = 3 * region.len();
    let bump = |counts: &[u8], x: u32, y: u32| -> Vec<u8> {
        let mut next = counts.to_vec();
        for (c, count) in next.iter_mut().enumerate() {
            if (x ^ y) & (1 << c) != 0 {
                *count = (*count + 1).min(2);
            }
        }
        next
    };
    let start = (w, vec![0u8; n]);
    let mut parent = std::collections::BTreeMap::from([(start.clone(), None)]);
    let mut frontier = vec![start];
    for _ in 0..cap {
        let mut next_frontier = Vec::new();
        for (x, counts) in &frontier {
            for &y in region {
                if y == *x || !t.step(*x, y) {
                    continue;
                }
                let key = (y, bump(counts, *x, y));
                if parent.contains_key(&key) {
                    continue;
                }
                parent.insert(key.clone(), Some((*x, counts.clone())));
                if let Some(bit) = key.1.iter().position(|&k| k == 2) {
                    let mut walk = vec![y];
                    let mut cur = key.clone();
                    while let Some(Some(prev)) = parent.get(&cur) {
                        walk.push(prev.0);
                        cur = prev.clone();
                    }
                    walk.reverse();
                    // bit position `bit` is coordinate `n - 1 - bit`
                    return Some((n - 1 - bit, walk));
                }
                next_frontier.push(key);
            }
        }
        frontier = next_frontier;
    }
    None
}

fn semi_modularity_violation(t: &Table<'_>, region: &[u32]) -> Option<Witness> {
    for &u in region {
        for v in t.space() {
            if !t.step(u, v) {
                continue;
            }
            let lost = t.excited(u) & !(u ^ v) & !t.excited(v);
            if lost != 0 {
                let bit = 31 - lost.leading_zeros() as usize;
                return Some(Witness::Disabled {
                    from: t.state(u),
                    to: t.state(v),
                    coord: t.n - 1 - bit,
                });
            }
        }
    }
    None
}

/// Some excited coordinate can be held at its value forever by a fair path.
fn weak_semi_modularity_violation(t: &Table<'_>, region: &[u32]) -> Option<Witness> {
    for &u in region {
        for bit in (0..t.n).rev() {
            let hold = 1u32 << bit;
            if t.excited(u) & hold == 0 {
                continue;
            }
            let frozen = t.reach(u, hold);
            let escape = frozen
                .iter()
                .find(|&&x| t.stable(x))
                .map(|&x| Escape::Stable(t.state(x)))
                .or_else(|| {
                    t.fair_supports(&frozen, frozen.len())
                        .into_iter()
                        .next()
                        .map(|s| {
                            Escape::Cycle(SccWitness {
                                states: s.iter().map(|&x| t.state(x)).collect(),
                            })
                        })
                });
            if let Some(escape) = escape {
                return Some(Witness::Escape {
                    from: t.state(u),
                    coord: t.n - 1 - bit,
                    escape,
                });
            }
        }
    }
    None
}

/// Walks from `w` tracking the current milestone level `j` (the number of
/// iterates `g^m(w)` met in order); a state visited at level `j` must have
/// image `g^{j+1}(w)`. Levels past the transient are taken modulo the
/// period; a stabilized orbit stops advancing.
fn milestone_product_violation(t: &Table<'_>, region: &[u32], w: u32) -> Option<u32> {
    let orbit = t.orbit(w);
    let (j0, p) = (orbit.transient_len, orbit.period);
    let iterate = |j: usize| orbit.at(j).value();
    let normalize = |j: usize| if j >= j0 + p { j0 + (j - j0) % p } else { j };
    let advance = |j: usize, y: u32| {
        let target = iterate(j + 1);
        if y == target && target != iterate(j) {
            normalize(j + 1)
        } else {
            j
        }
    };
    let mut seen = BTreeSet::from([(w, 0usize)]);
    let mut queue = VecDeque::from([(w, 0usize)]);
    while let Some((x, j)) = queue.pop_front() {
        if t.t[x as usize] != iterate(j + 1) {
            return Some(x);
        }
        for &y in region {
            if t.step(x, y) {
                let key = (y, advance(j, y));
                if seen.insert(key) {
                    queue.push_back(key);
                }
            }
        }
    }
    None
}

/// Milestone indices of a walk: `k_0 = 0` and each least `k_{m+1} > k_m`
/// with `w^{k_{m+1}} = g^{m+1}(w)`; none past a stabilized orbit.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MilestoneDecomposition {
    pub indices: Vec<usize>,
    /// Iterate-level transient length `J`.
    pub transient_len: usize,
    /// Iterate-level period `P`.
    pub period: usize,
    /// Distinct states before index `k_J` (all of them if `k_J` is not reached).
    pub transient: Vec<State>,
    /// Distinct states from index `k_J` on.
    pub permanent: Vec<State>,
}

impl MilestoneDecomposition {
    /// First `m` at which `w^{k_J + m} != w^{k_{J+P} + m}`, if both
    /// milestones occur and the offsets stay inside the walk.
    pub fn alignment_failure(&self, walk: &Walk) -> Option<usize> {
        let start = *self.indices.get(self.transient_len)?;
        let later = *self.indices.get(self.transient_len + self.period)?;
        (0..walk.states.len().saturating_sub(later))
            .find(|&m| walk.states[start + m] != walk.states[later + m])
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MilestoneOutcome {
    /// The field violates TCGR at the walk's origin.
    NotApplicable(String),
    Decomposed(MilestoneDecomposition),
    /// The walk breaks constancy or monotonicity at `index`.
    Violation { index: usize, details: String },
}

pub fn milestone_decomposition(g: &VectorField, walk: &Walk) -> Result<MilestoneOutcome> {
    walk.validate(g)?;
    let Some(&origin) = walk.states.first() else {
        return Err(Error::MalformedWalk("empty walk".into()));
    };
    let t = Table::new(g);
    let w = origin.value();
    let region = t.reach(w, 0);
    if let Some(bad) = milestone_product_violation(&t, &region, w) {
        return Ok(MilestoneOutcome::NotApplicable(format!(
            "condition of good running fails at {origin} (state {})",
            t.state(bad)
        )));
    }
    let orbit = t.orbit(w);
    let values: Vec<u32> = walk.states.iter().map(|s| s.value()).collect();

    let mut indices = vec![0usize];
    let mut level = 0usize;
    for (k, &x) in values.iter().enumerate() {
        let (here, next) = (orbit.at(level).value(), orbit.at(level + 1).value());
        if k > 0 && x == next && next != here {
            indices.push(k);
            level += 1;
        }
        let target = orbit.at(level + 1).value();
        if t.t[x as usize] != target {
            return Ok(MilestoneOutcome::Violation {
                index: k,
                details: format!(
                    "image of {} should be {} inside segment {level}",
                    t.state(x),
                    t.state(target)
                ),
            });
        }
    }

    for (m, pair) in indices.windows(2).enumerate() {
        let segment = &values[pair[0]..=pair[1]];
        for bit in 0..t.n {
            let switches = segment
                .windows(2)
                .filter(|s| (s[0] ^ s[1]) & (1 << bit) != 0)
                .count();
            if switches > 1 {
                return Ok(MilestoneOutcome::Violation {
                    index: pair[0],
                    details: format!("coordinate {} switches twice in segment {m}", t.n - bit),
                });
            }
        }
    }

    let split = indices.get(orbit.transient_len).copied().unwrap_or(values.len());
    let distinct = |part: &[State]| -> Vec<State> {
        part.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
    };
    Ok(MilestoneOutcome::Decomposed(MilestoneDecomposition {
        transient: distinct(&walk.states[..split]),
        permanent: distinct(&walk.states[split..]),
        indices,
        transient_len: orbit.transient_len,
        period: orbit.period,
    }))
}

/// Excitation set, recomputed from the table.
pub fn oracle_excited(g: &VectorField, u: State) -> Result<CoordSet> {
    check_width(g.width(), u.width())?;
    let t = Table::new(g);
    let coords: Vec<usize> = (0..t.n)
        .filter(|&c| t.excited(u.value()) & (1 << (t.n - 1 - c)) != 0)
        .collect();
    Ok(CoordSet::from_coords(t.n, &coords))
}
