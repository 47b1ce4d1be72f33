//! Decision procedures for delay-insensitivity, hazard-freedom (trivial and
//! non-trivial), semi-modularity (strong and weak) and the technical
//! condition of good running (TCGR), each with witnesses.
//!
//! Every property with two known characterizations is computed both ways;
//! disagreement is reported as a [`Defect`]. Path-quantified properties are
//! decided on finite structure, using two facts:
//!
//! * every finite μ-walk extends to a fair path by switching all excited
//!   coordinates at each later step (`w^{t+1} = g(w^t)`);
//! * a fair path that never converges has its recurrent states inside one
//!   strongly connected component meeting every fairness target
//!   (see [`crate::relations::accepting_scc`]).

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{OrbitSummary, VectorField};
use crate::relations::{
    accepting_scc, frozen_reach, reach_graph, successors_flip_order, ReachGraph, SccWitness,
};
use crate::state::{check_width, CoordSet, State};

/// A law the analyzer asserts on every instance it classifies.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    DelayInsensitivityCharacterizations,
    HazardFreedomCharacterizations,
    SemiModularityCharacterizations,
    TcgrCharacterizations,
    TcgrBranchMatchesOrbit,
    MonotoneImpliesConvergent,
    HazardFreeImpliesDelayInsensitive,
    TriviallyHazardFreeImpliesHazardFree,
    TrivialTargetIsReachableEquilibrium,
    SemiModularImpliesWeaklySemiModular,
    TriviallyHazardFreeImpliesSemiModular,
    HazardFreeImpliesWeaklySemiModular,
    TcgrImpliesSemiModular,
    TcgrStabilizingImpliesDelayInsensitive,
    TcgrShortOrbitIffTriviallyHazardFree,
    LimitIsUniqueStableState,
    OracleAgreement,
    InputCoordinatesConstant,
    AutonomousConsistency,
    FundamentalFirstMoves,
    TrivialFundamentalMode,
    FundamentalModeFlags,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = serde_json::to_value(self).expect("law serializes");
        f.write_str(text.as_str().unwrap_or("unknown"))
    }
}

/// A violated law on a concrete instance.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Defect {
    pub law: Law,
    pub state: State,
    pub details: String,
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated at {}: {}", self.law, self.state, self.details)
    }
}

impl std::error::Error for Defect {}

impl Defect {
    fn new(law: Law, state: State, details: impl Into<String>) -> Self {
        Self {
            law,
            state,
            details: details.into(),
        }
    }
}

fn defect(law: Law, state: State, details: impl Into<String>) -> Error {
    Error::Defect(Box::new(Defect::new(law, state, details)))
}

/// How a frozen coordinate avoids ever computing its excited value.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Escape {
    /// A stable state reachable with the coordinate held.
    Stable(State),
    /// A fair cycle reachable with the coordinate held.
    Cycle(SccWitness),
}

/// Evidence attached to a failed verdict. Coordinates are 0-based.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Witness {
    /// Recurrent set of a fair path that never converges.
    Oscillation(SccWitness),
    /// Two or more reachable equilibria.
    Limits(Vec<State>),
    /// A μ-walk on which `coord` goes `a`, then `!a`, then `a`.
    NonMonotone { coord: usize, walk: Vec<State> },
    /// Two reachable states with different images.
    DifferentImages { first: State, second: State },
    /// `coord` is excited in `from`, unchanged by the step, disabled in `to`.
    Disabled { from: State, to: State, coord: usize },
    /// From `from`, a fair path keeps excited `coord` at its value forever.
    Escape {
        from: State,
        coord: usize,
        escape: Escape,
    },
    /// `from μ to`, `to != g(from)`, yet `g(to) != g(from)`.
    Transition { from: State, to: State },
    /// A state present on one side of a set identity but not the other.
    Unmatched(State),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn pass() -> Self {
        Self {
            holds: true,
            witness: None,
        }
    }

    pub fn fail(witness: Witness) -> Self {
        Self {
            holds: false,
            witness: Some(witness),
        }
    }

    fn from_witness(witness: Option<Witness>) -> Self {
        match witness {
            Some(w) => Self::fail(w),
            None => Self::pass(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum SensitivityCause {
    Oscillation,
    MultipleLimits,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum HazardCause {
    NonMonotonous,
    MultipleLimits,
}

/// Which of the exclusive orbit situations certified TCGR.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum TcgrBranch {
    /// `w` is stable.
    Stable,
    /// The iterates stabilize after `p >= 1` strict steps.
    Stabilizing { p: usize },
    /// The iterates never stabilize.
    Periodic,
}

impl TcgrBranch {
    pub fn label(&self) -> &'static str {
        match self {
            TcgrBranch::Stable => "b1",
            TcgrBranch::Stabilizing { .. } => "b2",
            TcgrBranch::Periodic => "b3",
        }
    }

    pub fn for_orbit(orbit: &OrbitSummary) -> Self {
        match (orbit.transient_len, orbit.period) {
            (0, 1) => TcgrBranch::Stable,
            (p, 1) => TcgrBranch::Stabilizing { p },
            _ => TcgrBranch::Periodic,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DelayInsensitivity {
    pub verdict: Verdict,
    pub causes: Vec<SensitivityCause>,
    pub limit: Option<State>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HazardFreedom {
    pub verdict: Verdict,
    pub causes: Vec<HazardCause>,
    /// `(w, limit)` when the transfer is delay-insensitive but hazardous.
    pub hazardous_transition: Option<(State, State)>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TrivialHazardFreedom {
    pub verdict: Verdict,
    /// The constant value of `g` on the reachable set.
    pub target: Option<State>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Tcgr {
    pub verdict: Verdict,
    pub branch: Option<TcgrBranch>,
}

/// All verdicts for one state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PropertyReport {
    pub state: State,
    pub stable: bool,
    pub excited: CoordSet,
    pub reach_size: usize,
    pub stable_reachable: Vec<State>,
    pub limit: Option<State>,
    pub delay_insensitive: Verdict,
    pub hazard_free: Verdict,
    pub trivially_hazard_free: Verdict,
    pub trivial_target: Option<State>,
    pub semi_modular: Verdict,
    pub weakly_semi_modular: Verdict,
    pub tcgr: Verdict,
    pub tcgr_branch: Option<TcgrBranch>,
    pub single_bit_change: bool,
    pub delay_sensitivity_causes: Vec<SensitivityCause>,
    pub hazard_causes: Vec<HazardCause>,
    pub hazardous_transition: Option<(State, State)>,
    pub orbit: OrbitSummary,
}

impl PropertyReport {
    /// Field-by-field comparison of everything except witnesses.
    pub fn verdict_differences(&self, other: &PropertyReport) -> Vec<String> {
        let mut out = Vec::new();
        macro_rules! cmp {
            ($name:literal, $a:expr, $b:expr) => {
                if $a != $b {
                    out.push(format!("{}: {:?} vs {:?}", $name, $a, $b));
                }
            };
        }
        cmp!("state", self.state, other.state);
        cmp!("stable", self.stable, other.stable);
        cmp!("excited", self.excited, other.excited);
        cmp!("reach_size", self.reach_size, other.reach_size);
        cmp!("stable_reachable", &self.stable_reachable, &other.stable_reachable);
        cmp!("limit", self.limit, other.limit);
        cmp!("delay_insensitive", self.delay_insensitive.holds, other.delay_insensitive.holds);
        cmp!("hazard_free", self.hazard_free.holds, other.hazard_free.holds);
        cmp!(
            "trivially_hazard_free",
            self.trivially_hazard_free.holds,
            other.trivially_hazard_free.holds
        );
        cmp!("trivial_target", self.trivial_target, other.trivial_target);
        cmp!("semi_modular", self.semi_modular.holds, other.semi_modular.holds);
        cmp!(
            "weakly_semi_modular",
            self.weakly_semi_modular.holds,
            other.weakly_semi_modular.holds
        );
        cmp!("tcgr", self.tcgr.holds, other.tcgr.holds);
        cmp!("tcgr_branch", self.tcgr_branch, other.tcgr_branch);
        cmp!("single_bit_change", self.single_bit_change, other.single_bit_change);
        cmp!(
            "delay_sensitivity_causes",
            &self.delay_sensitivity_causes,
            &other.delay_sensitivity_causes
        );
        cmp!("hazard_causes", &self.hazard_causes, &other.hazard_causes);
        cmp!("hazardous_transition", self.hazardous_transition, other.hazardous_transition);
        cmp!("orbit", &self.orbit, &other.orbit);
        out
    }
}

/// Knobs for [`classify_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct ClassifyOptions {
    /// Evaluate weak semi-modularity only over the first `k` coordinates.
    pub wsm_coords: Option<usize>,
}

/// Per-instance working set: the reach graph and its equilibria.
struct Context<'a> {
    g: &'a VectorField,
    w: State,
    graph: ReachGraph,
    stable: Vec<State>,
}

impl<'a> Context<'a> {
    fn new(g: &'a VectorField, w: State) -> Result<Self> {
        check_width(g.width(), w.width())?;
        let graph = reach_graph(g, w)?;
        let stable = graph.stable_nodes(g);
        Ok(Self { g, w, graph, stable })
    }

    fn convergent(&self) -> Verdict {
        Verdict::from_witness(accepting_scc(self.g, &self.graph).map(Witness::Oscillation))
    }

    /// Shortest walk on which some coordinate switches twice, found by
    /// search over (state, phase) where the phase counts how many of the
    /// values `a`, `!a`, `a` have been seen in order.
    fn monotone(&self) -> Verdict {
        let n = self.graph.len();
        let root = self.graph.index_of(self.w).expect("root in graph");
        for coord in 0..self.g.width() {
            for a in [false, true] {
                let advance = |phase: usize, x: usize| -> usize {
                    let v = self.graph.nodes()[x].get(coord);
                    match phase {
                        0 if v == a => 1,
                        1 if v != a => 2,
                        2 if v == a => 3,
                        p => p,
                    }
                };
                let key = |x: usize, p: usize| x * 4 + p;
                let mut parent = vec![usize::MAX; n * 4];
                let start = key(root, advance(0, root));
                parent[start] = start;
                let mut queue = VecDeque::from([start]);
                let mut hit = None;
                while let Some(k) = queue.pop_front() {
                    let (x, p) = (k / 4, k % 4);
                    if p == 3 {
                        hit = Some(k);
                        break;
                    }
                    for &y in self.graph.succ_indices(x) {
                        let next = key(y, advance(p, y));
                        if parent[next] == usize::MAX {
                            parent[next] = k;
                            queue.push_back(next);
                        }
                    }
                }
                if let Some(mut k) = hit {
                    let mut walk = vec![self.graph.nodes()[k / 4]];
                    while parent[k] != k {
                        k = parent[k];
                        walk.push(self.graph.nodes()[k / 4]);
                    }
                    walk.reverse();
                    return Verdict::fail(Witness::NonMonotone { coord, walk });
                }
            }
        }
        Verdict::pass()
    }

    /// Stable states `s` with every reachable state able to reach `s`.
    fn universal_sinks(&self) -> Vec<State> {
        self.stable
            .iter()
            .copied()
            .filter(|&s| {
                let target = self.graph.index_of(s).expect("stable node in graph");
                self.graph.coreach_mask(target).iter().all(|&b| b)
            })
            .collect()
    }

    fn limits_witness(&self) -> Witness {
        Witness::Limits(self.stable.clone())
    }

    fn trivially_hazard_free(&self) -> TrivialHazardFreedom {
        let target = self.g.image(self.w);
        match self
            .graph
            .nodes()
            .iter()
            .find(|&&u| self.g.image(u) != target)
        {
            Some(&second) => TrivialHazardFreedom {
                verdict: Verdict::fail(Witness::DifferentImages {
                    first: self.w,
                    second,
                }),
                target: None,
            },
            None => TrivialHazardFreedom {
                verdict: Verdict::pass(),
                target: Some(target),
            },
        }
    }

    /// An excited coordinate never becomes disabled by a step that leaves it
    /// unchanged, over every μ-step from every reachable state.
    fn semi_modular_steps(&self) -> Verdict {
        for &u in self.graph.nodes() {
            let excited = self.g.excited(u);
            for next in successors_flip_order(self.g, u) {
                let after = self.g.excited(next);
                for i in excited.iter() {
                    if next.get(i) == u.get(i) && !after.contains(i) {
                        return Verdict::fail(Witness::Disabled {
                            from: u,
                            to: next,
                            coord: i,
                        });
                    }
                }
            }
        }
        Verdict::pass()
    }

    /// Switching one enabled coordinate never disables another.
    fn semi_modular_pairwise(&self) -> Verdict {
        for &u in self.graph.nodes() {
            let excited = self.g.excited(u);
            for j in excited.iter() {
                let next = u.flip(j);
                let after = self.g.excited(next);
                for i in excited.iter().filter(|&i| i != j) {
                    if !after.contains(i) {
                        return Verdict::fail(Witness::Disabled {
                            from: u,
                            to: next,
                            coord: i,
                        });
                    }
                }
            }
        }
        Verdict::pass()
    }

    fn weakly_semi_modular(&self, coords: usize) -> Result<Verdict> {
        for &u in self.graph.nodes() {
            for i in self.g.excited(u).iter().filter(|&i| i < coords) {
                let frozen = frozen_reach(self.g, u, i, u.get(i))?;
                let escape = match frozen.stable_nodes(self.g).first() {
                    Some(&s) => Some(Escape::Stable(s)),
                    None => accepting_scc(self.g, &frozen).map(Escape::Cycle),
                };
                if let Some(escape) = escape {
                    return Ok(Verdict::fail(Witness::Escape {
                        from: u,
                        coord: i,
                        escape,
                    }));
                }
            }
        }
        Ok(Verdict::pass())
    }

    /// During any partial transition the target stays put:
    /// `u μ u'` and `u' != g(u)` imply `g(u') = g(u)`.
    fn tcgr_direct(&self) -> Verdict {
        for &u in self.graph.nodes() {
            let target = self.g.image(u);
            for next in successors_flip_order(self.g, u) {
                if next != target && self.g.image(next) != target {
                    return Verdict::fail(Witness::Transition { from: u, to: next });
                }
            }
        }
        Verdict::pass()
    }

    /// The orbit form: for each `j`, `g` equals `g^{j+1}(w)` on every state
    /// visited between the milestones `g^j(w)` and `g^{j+1}(w)`, i.e. every
    /// state reachable from `g^j(w)` without passing through `g^{j+1}(w)`.
    /// Milestone pairs repeat with the orbit's period, so `j < J + P`
    /// covers all of them.
    fn tcgr_orbit(&self, orbit: &OrbitSummary) -> (bool, TcgrBranch) {
        let branch = TcgrBranch::for_orbit(orbit);
        if branch == TcgrBranch::Stable {
            return (true, branch);
        }
        let holds = (0..orbit.transient_len + orbit.period).all(|j| {
            let (from, target) = (orbit.at(j), orbit.at(j + 1));
            if from == target {
                return true;
            }
            let src = self.graph.index_of(from).expect("iterates are reachable");
            let avoid = self.graph.index_of(target);
            self.graph
                .reachable_mask(src, avoid)
                .iter()
                .enumerate()
                .filter(|&(x, &seen)| seen && Some(x) != avoid)
                .all(|(x, _)| self.g.image(self.graph.nodes()[x]) == target)
        });
        (holds, branch)
    }
}

/// Reachable stable states, ascending.
pub fn stable_reach(g: &VectorField, w: State) -> Result<Vec<State>> {
    Ok(Context::new(g, w)?.stable)
}

/// Whether every fair path from `w` converges.
pub fn all_paths_convergent(g: &VectorField, w: State) -> Result<Verdict> {
    Ok(Context::new(g, w)?.convergent())
}

/// Whether every fair path from `w` is coordinatewise monotonous.
pub fn all_paths_monotonous(g: &VectorField, w: State) -> Result<Verdict> {
    Ok(Context::new(g, w)?.monotone())
}

pub fn delay_insensitive(g: &VectorField, w: State) -> Result<DelayInsensitivity> {
    let ctx = Context::new(g, w)?;
    let convergent = ctx.convergent();
    delay_insensitivity_from(&ctx, &convergent)
}

fn delay_insensitivity_from(ctx: &Context<'_>, convergent: &Verdict) -> Result<DelayInsensitivity> {
    let by_count = convergent.holds && ctx.stable.len() == 1;
    let sinks = ctx.universal_sinks();
    let by_coreach = convergent.holds && sinks.len() == 1;
    if by_count != by_coreach || (by_count && sinks[0] != ctx.stable[0]) {
        return Err(defect(
            Law::DelayInsensitivityCharacterizations,
            ctx.w,
            format!("unique-equilibrium form {by_count}, common-sink form {by_coreach}"),
        ));
    }
    let mut causes = Vec::new();
    if !convergent.holds {
        causes.push(SensitivityCause::Oscillation);
    }
    if ctx.stable.len() >= 2 {
        causes.push(SensitivityCause::MultipleLimits);
    }
    let verdict = if by_count {
        Verdict::pass()
    } else if let Some(w) = &convergent.witness {
        Verdict::fail(w.clone())
    } else {
        Verdict::fail(ctx.limits_witness())
    };
    Ok(DelayInsensitivity {
        verdict,
        causes,
        limit: by_count.then(|| ctx.stable[0]),
    })
}

pub fn hazard_free(g: &VectorField, w: State) -> Result<HazardFreedom> {
    let ctx = Context::new(g, w)?;
    let monotone = ctx.monotone();
    let convergent = ctx.convergent();
    let di = delay_insensitivity_from(&ctx, &convergent)?;
    hazard_freedom_from(&ctx, &monotone, &di)
}

fn hazard_freedom_from(
    ctx: &Context<'_>,
    monotone: &Verdict,
    di: &DelayInsensitivity,
) -> Result<HazardFreedom> {
    let by_count = monotone.holds && ctx.stable.len() == 1;
    let by_coreach = monotone.holds && ctx.universal_sinks().len() == 1;
    if by_count != by_coreach {
        return Err(defect(
            Law::HazardFreedomCharacterizations,
            ctx.w,
            format!("unique-equilibrium form {by_count}, common-sink form {by_coreach}"),
        ));
    }
    let mut causes = Vec::new();
    if !monotone.holds {
        causes.push(HazardCause::NonMonotonous);
    }
    if ctx.stable.len() >= 2 {
        causes.push(HazardCause::MultipleLimits);
    }
    let verdict = if by_count {
        Verdict::pass()
    } else if let Some(w) = &monotone.witness {
        Verdict::fail(w.clone())
    } else {
        Verdict::fail(ctx.limits_witness())
    };
    let hazardous_transition = match (di.limit, by_count) {
        (Some(limit), false) => Some((ctx.w, limit)),
        _ => None,
    };
    Ok(HazardFreedom {
        verdict,
        causes,
        hazardous_transition,
    })
}

pub fn trivially_hazard_free(g: &VectorField, w: State) -> Result<TrivialHazardFreedom> {
    Ok(Context::new(g, w)?.trivially_hazard_free())
}

pub fn semi_modular(g: &VectorField, w: State) -> Result<Verdict> {
    let ctx = Context::new(g, w)?;
    semi_modularity_from(&ctx)
}

fn semi_modularity_from(ctx: &Context<'_>) -> Result<Verdict> {
    let steps = ctx.semi_modular_steps();
    let pairwise = ctx.semi_modular_pairwise();
    if steps.holds != pairwise.holds {
        return Err(defect(
            Law::SemiModularityCharacterizations,
            ctx.w,
            format!("step form {}, pairwise form {}", steps.holds, pairwise.holds),
        ));
    }
    Ok(pairwise)
}

pub fn weakly_semi_modular(g: &VectorField, w: State) -> Result<Verdict> {
    Context::new(g, w)?.weakly_semi_modular(g.width())
}

pub fn tcgr(g: &VectorField, w: State) -> Result<Tcgr> {
    let ctx = Context::new(g, w)?;
    let orbit = g.orbit_summary(w)?;
    tcgr_from(&ctx, &orbit)
}

fn tcgr_from(ctx: &Context<'_>, orbit: &OrbitSummary) -> Result<Tcgr> {
    let direct = ctx.tcgr_direct();
    let (by_orbit, branch) = ctx.tcgr_orbit(orbit);
    if direct.holds != by_orbit {
        return Err(defect(
            Law::TcgrCharacterizations,
            ctx.w,
            format!("direct form {}, orbit form {by_orbit}", direct.holds),
        ));
    }
    Ok(Tcgr {
        branch: direct.holds.then_some(branch),
        verdict: direct,
    })
}

/// Consecutive iterates differ on at most one coordinate.
pub fn single_bit_change(g: &VectorField, w: State) -> Result<bool> {
    Ok(single_bit_change_from(&g.orbit_summary(w)?))
}

fn single_bit_change_from(orbit: &OrbitSummary) -> bool {
    (0..orbit.transient_len + orbit.period).all(|j| {
        orbit
            .at(j)
            .hamming(&orbit.at(j + 1))
            .expect("iterates share a width")
            <= 1
    })
}

/// Both forms of every property that has two, computed independently.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Characterizations {
    /// Convergent with exactly one reachable equilibrium.
    pub di_unique_equilibrium: bool,
    /// Convergent with exactly one equilibrium reachable from every reachable state.
    pub di_common_sink: bool,
    pub hf_unique_equilibrium: bool,
    pub hf_common_sink: bool,
    /// No μ-step disables an excited coordinate it leaves unchanged.
    pub sm_steps: bool,
    /// Switching one excited coordinate never disables another.
    pub sm_pairwise: bool,
    /// Partial transitions keep the target fixed.
    pub tcgr_direct: bool,
    /// Milestone regions of the iterate orbit have constant image.
    pub tcgr_orbit: bool,
    pub tcgr_branch: TcgrBranch,
}

pub fn characterizations(g: &VectorField, w: State) -> Result<Characterizations> {
    let ctx = Context::new(g, w)?;
    let orbit = g.orbit_summary(w)?;
    let convergent = ctx.convergent().holds;
    let monotone = ctx.monotone().holds;
    let sinks = ctx.universal_sinks().len();
    let (tcgr_orbit, tcgr_branch) = ctx.tcgr_orbit(&orbit);
    Ok(Characterizations {
        di_unique_equilibrium: convergent && ctx.stable.len() == 1,
        di_common_sink: convergent && sinks == 1,
        hf_unique_equilibrium: monotone && ctx.stable.len() == 1,
        hf_common_sink: monotone && sinks == 1,
        sm_steps: ctx.semi_modular_steps().holds,
        sm_pairwise: ctx.semi_modular_pairwise().holds,
        tcgr_direct: ctx.tcgr_direct().holds,
        tcgr_orbit,
        tcgr_branch,
    })
}

/// Classifies `w` under `g` and checks the implication lattice.
pub fn classify(g: &VectorField, w: State) -> Result<PropertyReport> {
    classify_with(g, w, ClassifyOptions::default())
}

pub fn classify_with(g: &VectorField, w: State, options: ClassifyOptions) -> Result<PropertyReport> {
    let report = evaluate(g, w, options)?;
    if let Some(first) = lattice_violations(g, &report).into_iter().next() {
        return Err(Error::Defect(Box::new(first)));
    }
    Ok(report)
}

/// Builds the report, failing only on characterization disagreements.
pub(crate) fn evaluate(g: &VectorField, w: State, options: ClassifyOptions) -> Result<PropertyReport> {
    let ctx = Context::new(g, w)?;
    let orbit = g.orbit_summary(w)?;
    let convergent = ctx.convergent();
    let monotone = ctx.monotone();
    let di = delay_insensitivity_from(&ctx, &convergent)?;
    let hf = hazard_freedom_from(&ctx, &monotone, &di)?;
    let thf = ctx.trivially_hazard_free();
    let sm = semi_modularity_from(&ctx)?;
    let wsm = ctx.weakly_semi_modular(options.wsm_coords.unwrap_or(g.width()).min(g.width()))?;
    let tc = tcgr_from(&ctx, &orbit)?;

    if monotone.holds && !convergent.holds {
        return Err(defect(
            Law::MonotoneImpliesConvergent,
            w,
            "monotone paths yet an oscillation exists",
        ));
    }

    Ok(PropertyReport {
        state: w,
        stable: g.image(w) == w,
        excited: g.excited(w),
        reach_size: ctx.graph.len(),
        stable_reachable: ctx.stable.clone(),
        limit: di.limit,
        delay_insensitive: di.verdict,
        hazard_free: hf.verdict,
        trivially_hazard_free: thf.verdict,
        trivial_target: thf.target,
        semi_modular: sm,
        weakly_semi_modular: wsm,
        tcgr: tc.verdict,
        tcgr_branch: tc.branch,
        single_bit_change: single_bit_change_from(&orbit),
        delay_sensitivity_causes: di.causes,
        hazard_causes: hf.causes,
        hazardous_transition: hf.hazardous_transition,
        orbit,
    })
}

/// Every implication between the properties, checked on one report.
pub fn lattice_violations(g: &VectorField, r: &PropertyReport) -> Vec<Defect> {
    let w = r.state;
    let mut out = Vec::new();
    let mut check = |ok: bool, law: Law, details: &str| {
        if !ok {
            out.push(Defect::new(law, w, details));
        }
    };
    let di = r.delay_insensitive.holds;
    let hf = r.hazard_free.holds;
    let thf = r.trivially_hazard_free.holds;
    let sm = r.semi_modular.holds;
    let wsm = r.weakly_semi_modular.holds;
    let tc = r.tcgr.holds;

    check(!hf || di, Law::HazardFreeImpliesDelayInsensitive, "hazard-free but delay-sensitive");
    check(!thf || hf, Law::TriviallyHazardFreeImpliesHazardFree, "trivially hazard-free but hazardous");
    if let Some(t) = r.trivial_target {
        check(
            r.stable_reachable == [t],
            Law::TrivialTargetIsReachableEquilibrium,
            "constant image is not the unique reachable equilibrium",
        );
    }
    check(!sm || wsm, Law::SemiModularImpliesWeaklySemiModular, "semi-modular but not weakly");
    check(!thf || sm, Law::TriviallyHazardFreeImpliesSemiModular, "trivially hazard-free but not semi-modular");
    check(!hf || wsm, Law::HazardFreeImpliesWeaklySemiModular, "hazard-free but not weakly semi-modular");
    check(!tc || sm, Law::TcgrImpliesSemiModular, "tcgr but not semi-modular");
    if tc && r.orbit.stabilizes() {
        check(
            di && r.limit == r.orbit.limit(),
            Law::TcgrStabilizingImpliesDelayInsensitive,
            "tcgr with stabilizing iterates but the limit differs",
        );
    }
    let short_orbit = r.orbit.at(1) == w || r.orbit.at(2) == r.orbit.at(1);
    check(
        (tc && short_orbit) == thf,
        Law::TcgrShortOrbitIffTriviallyHazardFree,
        "tcgr with g(w)=w or g(g(w))=g(w) disagrees with trivial hazard-freedom",
    );
    if di {
        check(
            r.stable_reachable.len() == 1 && r.limit == Some(r.stable_reachable[0]),
            Law::LimitIsUniqueStableState,
            "delay-insensitive limit is not the unique reachable equilibrium",
        );
    }
    check(
        r.delay_sensitivity_causes.is_empty() == di && r.hazard_causes.is_empty() == hf,
        Law::DelayInsensitivityCharacterizations,
        "cause sets disagree with verdicts",
    );
    if let Some(branch) = r.tcgr_branch {
        check(
            branch == TcgrBranch::for_orbit(&r.orbit),
            Law::TcgrBranchMatchesOrbit,
            "reported branch disagrees with the orbit",
        );
    }
    check(
        r.stable == (g.image(w) == w) && r.reach_size >= 1,
        Law::LimitIsUniqueStableState,
        "stability flag inconsistent",
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::fixtures::*;
    use crate::relations::is_mu_step;

    #[test]
    fn stable_reach_examples() {
        let id = VectorField::identity(2).unwrap();
        assert_eq!(stable_reach(&id, s("10")).unwrap(), [s("10")]);
        assert!(stable_reach(&not(), s("0")).unwrap().is_empty());
        assert_eq!(
            stable_reach(&race(), s("00")).unwrap(),
            [s("01"), s("10"), s("11")]
        );
    }

    #[test]
    fn convergence_examples() {
        assert!(all_paths_convergent(&const11(), s("00")).unwrap().holds);
        let osc = all_paths_convergent(&not(), s("0")).unwrap();
        match osc.witness {
            Some(Witness::Oscillation(scc)) => assert_eq!(scc.states, [s("0"), s("1")]),
            other => panic!("unexpected {other:?}"),
        }
        assert!(all_paths_convergent(&VectorField::identity(1).unwrap(), s("1")).unwrap().holds);
    }

    #[test]
    fn monotonicity_examples() {
        assert!(all_paths_monotonous(&const11(), s("00")).unwrap().holds);
        let m = all_paths_monotonous(&not(), s("0")).unwrap();
        assert_eq!(
            m.witness,
            Some(Witness::NonMonotone {
                coord: 0,
                walk: vec![s("0"), s("1"), s("0")]
            })
        );
        assert!(all_paths_monotonous(&VectorField::identity(2).unwrap(), s("01")).unwrap().holds);
    }

    #[test]
    fn delay_insensitivity_examples() {
        let c = delay_insensitive(&const11(), s("00")).unwrap();
        assert!(c.verdict.holds);
        assert_eq!(c.limit, Some(s("11")));

        let n = delay_insensitive(&not(), s("0")).unwrap();
        assert!(!n.verdict.holds);
        assert_eq!(n.causes, [SensitivityCause::Oscillation]);

        let r = delay_insensitive(&race(), s("00")).unwrap();
        assert_eq!(r.causes, [SensitivityCause::MultipleLimits]);
        assert_eq!(
            r.verdict.witness,
            Some(Witness::Limits(vec![s("01"), s("10"), s("11")]))
        );
    }

    #[test]
    fn hazard_freedom_examples() {
        assert!(hazard_free(&const11(), s("00")).unwrap().verdict.holds);
        let r = hazard_free(&race(), s("00")).unwrap();
        assert_eq!(r.causes, [HazardCause::MultipleLimits]);
        assert!(r.hazardous_transition.is_none());
        assert!(hazard_free(&VectorField::identity(2).unwrap(), s("11")).unwrap().verdict.holds);
    }

    #[test]
    fn hazardous_transition_is_labelled() {
        // 10 settles at 00 on every path; via 11 coordinate 2 rises and falls.
        let g = VectorField::from_table(2, vec![0b00, 0b00, 0b01, 0b00]).unwrap();
        let di = delay_insensitive(&g, s("10")).unwrap();
        assert_eq!(di.limit, Some(s("00")));
        let hf = hazard_free(&g, s("10")).unwrap();
        assert!(!hf.verdict.holds);
        assert_eq!(hf.causes, [HazardCause::NonMonotonous]);
        assert_eq!(hf.hazardous_transition, Some((s("10"), s("00"))));
    }

    #[test]
    fn trivial_hazard_freedom_examples() {
        let c = trivially_hazard_free(&const11(), s("00")).unwrap();
        assert!(c.verdict.holds);
        assert_eq!(c.target, Some(s("11")));
        let id = trivially_hazard_free(&VectorField::identity(2).unwrap(), s("01")).unwrap();
        assert_eq!(id.target, Some(s("01")));
        let n = trivially_hazard_free(&not(), s("0")).unwrap();
        assert_eq!(
            n.verdict.witness,
            Some(Witness::DifferentImages {
                first: s("0"),
                second: s("1")
            })
        );
    }

    #[test]
    fn semi_modularity_examples() {
        assert!(semi_modular(&not(), s("0")).unwrap().holds);
        assert_eq!(
            semi_modular(&race(), s("00")).unwrap().witness,
            Some(Witness::Disabled {
                from: s("00"),
                to: s("10"),
                coord: 1
            })
        );
        assert!(semi_modular(&const11(), s("00")).unwrap().holds);
    }

    #[test]
    fn weak_semi_modularity_examples() {
        assert!(weakly_semi_modular(&not(), s("0")).unwrap().holds);
        assert_eq!(
            weakly_semi_modular(&race(), s("00")).unwrap().witness,
            Some(Witness::Escape {
                from: s("00"),
                coord: 0,
                escape: Escape::Stable(s("01"))
            })
        );
        assert!(weakly_semi_modular(&const11(), s("00")).unwrap().holds);
    }

    #[test]
    fn tcgr_examples() {
        let id = tcgr(&VectorField::identity(2).unwrap(), s("00")).unwrap();
        assert_eq!(id.branch, Some(TcgrBranch::Stable));
        let n = tcgr(&not(), s("0")).unwrap();
        assert!(n.verdict.holds);
        assert_eq!(n.branch, Some(TcgrBranch::Periodic));
        let r = tcgr(&race(), s("00")).unwrap();
        assert_eq!(
            r.verdict.witness,
            Some(Witness::Transition {
                from: s("00"),
                to: s("10")
            })
        );
        let c = tcgr(&const11(), s("00")).unwrap();
        assert_eq!(c.branch, Some(TcgrBranch::Stabilizing { p: 1 }));
    }

    #[test]
    fn single_bit_change_examples() {
        assert!(single_bit_change(&not(), s("0")).unwrap());
        assert!(!single_bit_change(&const11(), s("00")).unwrap());
        assert!(single_bit_change(&VectorField::identity(3).unwrap(), s("101")).unwrap());
    }

    #[test]
    fn both_forms_on_fixtures() {
        let n = characterizations(&not(), s("0")).unwrap();
        assert!(n.tcgr_direct && n.tcgr_orbit && n.sm_steps && n.sm_pairwise);
        assert!(!n.di_unique_equilibrium && !n.di_common_sink);
        let r = characterizations(&race(), s("00")).unwrap();
        assert!(!r.tcgr_direct && !r.tcgr_orbit && !r.sm_steps && !r.sm_pairwise);
    }

    #[test]
    fn gray_cycle_satisfies_tcgr_by_both_forms() {
        // 00 -> 01 -> 11 -> 10 -> 00, one excited coordinate everywhere.
        let g = VectorField::from_table(2, vec![0b01, 0b11, 0b00, 0b10]).unwrap();
        let t = tcgr(&g, s("00")).unwrap();
        assert!(t.verdict.holds);
        assert_eq!(t.branch, Some(TcgrBranch::Periodic));
        assert!(single_bit_change(&g, s("00")).unwrap());
    }

    #[test]
    fn classify_fixtures() {
        let id = classify(&VectorField::identity(2).unwrap(), s("10")).unwrap();
        assert!(id.delay_insensitive.holds && id.hazard_free.holds && id.trivially_hazard_free.holds);
        assert!(id.semi_modular.holds && id.weakly_semi_modular.holds && id.tcgr.holds);
        assert_eq!(id.limit, Some(s("10")));
        assert_eq!(id.tcgr_branch, Some(TcgrBranch::Stable));

        let n = classify(&not(), s("0")).unwrap();
        assert!(n.tcgr.holds && n.semi_modular.holds && n.weakly_semi_modular.holds);
        assert!(!n.delay_insensitive.holds && !n.hazard_free.holds && !n.trivially_hazard_free.holds);
        assert_eq!(n.delay_sensitivity_causes, [SensitivityCause::Oscillation]);
        assert_eq!((n.orbit.transient_len, n.orbit.period), (0, 2));

        let r = classify(&race(), s("00")).unwrap();
        assert!(!r.delay_insensitive.holds && !r.hazard_free.holds && !r.trivially_hazard_free.holds);
        assert!(!r.semi_modular.holds && !r.weakly_semi_modular.holds && !r.tcgr.holds);
        assert!(!r.single_bit_change);
        assert_eq!(r.hazard_causes, [HazardCause::MultipleLimits]);
    }

    fn replay_walk(g: &VectorField, walk: &[State]) -> bool {
        walk.windows(2).all(|p| is_mu_step(g, p[0], p[1]).unwrap())
    }

    #[test]
    fn lattice_and_witnesses_exhaustive_small() {
        for n in 1..=2 {
            for g in all_fields(n) {
                for w in g.states() {
                    let r = classify(&g, w).unwrap_or_else(|e| panic!("{g:?} at {w}: {e}"));
                    for verdict in [
                        &r.delay_insensitive,
                        &r.hazard_free,
                        &r.trivially_hazard_free,
                        &r.semi_modular,
                        &r.weakly_semi_modular,
                        &r.tcgr,
                    ] {
                        assert_eq!(verdict.holds, verdict.witness.is_none());
                        match &verdict.witness {
                            Some(Witness::NonMonotone { coord, walk }) => {
                                assert!(replay_walk(&g, walk));
                                assert_eq!(walk[0], w);
                                let values: Vec<bool> = walk.iter().map(|s| s.get(*coord)).collect();
                                let switches = values.windows(2).filter(|p| p[0] != p[1]).count();
                                assert!(switches >= 2);
                            }
                            Some(Witness::Oscillation(scc)) => assert!(scc.is_fair(&g)),
                            Some(Witness::Disabled { from, to, coord }) => {
                                assert!(is_mu_step(&g, *from, *to).unwrap());
                                assert!(g.excitation_set(*from).unwrap().contains(*coord));
                                assert!(!g.excitation_set(*to).unwrap().contains(*coord));
                            }
                            Some(Witness::Transition { from, to }) => {
                                assert!(is_mu_step(&g, *from, *to).unwrap());
                                assert_ne!(g.apply(*to).unwrap(), g.apply(*from).unwrap());
                            }
                            _ => {}
                        }
                    }
                    if let Some(limit) = r.limit {
                        assert!(r.stable_reachable.contains(&limit));
                    }
                }
            }
        }
    }
}
