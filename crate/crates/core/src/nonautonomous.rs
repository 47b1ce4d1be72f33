//! Parameterized fields closed over a target input.
//!
//! `f^ṽ(w, v) = (f(w, v), ṽ)` is an ordinary vector field of width `n + m`
//! whose input coordinates are constants. Every autonomous analysis applies
//! to it unchanged; results are then qualified by the fundamental-mode
//! hypothesis `f(w, v) = w`.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::field::{ParamVectorField, VectorField};
use crate::properties::{
    classify_with, evaluate, lattice_violations, ClassifyOptions, Defect, Law, PropertyReport,
    Verdict, Witness,
};
use crate::relations::{mu_successors, reach, reach_graph};
use crate::state::{check_width, InputVector, State, TotalState};

/// `f` closed over the input `ṽ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedField {
    base: ParamVectorField,
    target: InputVector,
    view: VectorField,
}

impl ClosedField {
    pub fn base(&self) -> &ParamVectorField {
        &self.base
    }

    pub fn target(&self) -> InputVector {
        self.target
    }

    /// The autonomous field of width `n + m`.
    pub fn view(&self) -> &VectorField {
        &self.view
    }

    pub fn state_width(&self) -> usize {
        self.base.state_width()
    }

    pub fn input_width(&self) -> usize {
        self.base.input_width()
    }

    /// Splits a view state into its state and input parts.
    pub fn split(&self, z: State) -> Result<TotalState> {
        TotalState::from_joined(z, self.state_width())
    }
}

pub fn close_field(f: &ParamVectorField, target: InputVector) -> Result<ClosedField> {
    check_width(f.input_width(), target.width())?;
    let n = f.state_width();
    let view = VectorField::from_fn(n + f.input_width(), |z| {
        let total = TotalState::from_joined(z, n).expect("view width is n + m");
        let w = f.apply(total).expect("widths checked");
        w.concat(&target).expect("width bounded by construction")
    })?;
    Ok(ClosedField {
        base: f.clone(),
        target,
        view,
    })
}

/// The fundamental-mode hypothesis `f(w, v) = w`.
pub fn state_stable(f: &ParamVectorField, z: TotalState) -> Result<bool> {
    Ok(f.apply(z)? == z.w)
}

/// Property flags restricted to the fundamental mode.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct FundamentalMode {
    pub delay_insensitive: bool,
    pub hazard_free: bool,
    pub trivially_hazard_free: bool,
    pub semi_modular: bool,
    pub weakly_semi_modular: bool,
    pub tcgr: bool,
}

impl FundamentalMode {
    fn qualify(report: &PropertyReport, stable: bool) -> Self {
        Self {
            delay_insensitive: stable && report.delay_insensitive.holds,
            hazard_free: stable && report.hazard_free.holds,
            trivially_hazard_free: stable && report.trivially_hazard_free.holds,
            semi_modular: stable && report.semi_modular.holds,
            weakly_semi_modular: stable && report.weakly_semi_modular.holds,
            tcgr: stable && report.tcgr.holds,
        }
    }

    fn flags(&self) -> [bool; 6] {
        [
            self.delay_insensitive,
            self.hazard_free,
            self.trivially_hazard_free,
            self.semi_modular,
            self.weakly_semi_modular,
            self.tcgr,
        ]
    }
}

/// A report over the closed field, with the fundamental-mode qualification.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModeQualifiedReport {
    pub param: InputVector,
    pub state_width: usize,
    pub report: PropertyReport,
    pub state_stable: bool,
    pub fundamental_mode: FundamentalMode,
}

fn options_for(f: &ParamVectorField) -> ClassifyOptions {
    ClassifyOptions {
        wsm_coords: Some(f.state_width()),
    }
}

pub fn classify_param(
    f: &ParamVectorField,
    z: TotalState,
    target: InputVector,
) -> Result<ModeQualifiedReport> {
    let closed = close_field(f, target)?;
    let stable = state_stable(f, z)?;
    let report = classify_with(closed.view(), z.joined(), options_for(f))?;
    Ok(ModeQualifiedReport {
        param: target,
        state_width: f.state_width(),
        fundamental_mode: FundamentalMode::qualify(&report, stable),
        state_stable: stable,
        report,
    })
}

/// Outcome of a check that only applies under a hypothesis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Check {
    NotApplicable(String),
    Checked(Verdict),
}

impl Check {
    /// True unless the check applied and failed.
    pub fn passes(&self) -> bool {
        match self {
            Check::NotApplicable(_) => true,
            Check::Checked(v) => v.holds,
        }
    }
}

/// With `f(z) = w`, the state part is at rest, so every first move changes
/// inputs only.
pub fn fundamental_first_moves(
    f: &ParamVectorField,
    z: TotalState,
    target: InputVector,
) -> Result<Check> {
    if !state_stable(f, z)? {
        return Ok(Check::NotApplicable(format!("f({z}) differs from {}", z.w)));
    }
    let closed = close_field(f, target)?;
    let start = z.joined();
    for next in mu_successors(closed.view(), start)? {
        if next != start && closed.split(next)?.w != z.w {
            return Ok(Check::Checked(Verdict::fail(Witness::Transition {
                from: start,
                to: next,
            })));
        }
    }
    Ok(Check::Checked(Verdict::pass()))
}

/// With `ṽ = v`, reach in the closed field is reach of `f(·, v)` with the
/// input attached.
pub fn autonomous_consistency(f: &ParamVectorField, z: TotalState) -> Result<Verdict> {
    let closed = close_field(f, z.v)?;
    let closed_reach = reach(closed.view(), z.joined())?;
    let g_v = f.with_input(z.v)?;
    let lifted: BTreeSet<State> = reach(&g_v, z.w)?
        .into_iter()
        .map(|w| w.concat(&z.v))
        .collect::<Result<_>>()?;
    match closed_reach.symmetric_difference(&lifted).next() {
        Some(&odd) => Ok(Verdict::fail(Witness::Unmatched(odd))),
        None => Ok(Verdict::pass()),
    }
}

/// Consequences of trivial hazard-freedom in the fundamental mode: the
/// state part never moves and each reachable step flips an input.
pub fn trivhf_fm_checks(
    f: &ParamVectorField,
    z: TotalState,
    target: InputVector,
) -> Result<Check> {
    let qualified = classify_param(f, z, target)?;
    trivhf_from(f, z, &qualified)
}

fn trivhf_from(f: &ParamVectorField, z: TotalState, q: &ModeQualifiedReport) -> Result<Check> {
    if !q.fundamental_mode.trivially_hazard_free {
        return Ok(Check::NotApplicable(
            "not trivially hazard-free in the fundamental mode".into(),
        ));
    }
    let closed = close_field(f, q.param)?;
    let limit = q.report.trivial_target.expect("trivial target present when it holds");
    if closed.split(limit)?.w != z.w {
        return Ok(Check::Checked(Verdict::fail(Witness::Unmatched(limit))));
    }
    let graph = reach_graph(closed.view(), z.joined())?;
    for (from, to) in graph.edges() {
        let (a, b) = (closed.split(from)?, closed.split(to)?);
        if a.v == b.v {
            return Ok(Check::Checked(Verdict::fail(Witness::Transition { from, to })));
        }
    }
    Ok(Check::Checked(Verdict::pass()))
}

/// Every law on one `(f, z, ṽ)`: the autonomous lattice on the closed field
/// plus the fundamental-mode consequences.
pub fn mode_violations(
    f: &ParamVectorField,
    z: TotalState,
    target: InputVector,
) -> Result<Vec<Defect>> {
    let closed = close_field(f, target)?;
    let joined = z.joined();
    let mut out = Vec::new();
    let mut push = |law: Law, details: String| {
        out.push(Defect {
            law,
            state: joined,
            details,
        })
    };

    let n = f.state_width();
    for u in closed.view().states() {
        if closed.split(closed.view().apply(u)?)?.v != target {
            push(Law::InputCoordinatesConstant, format!("input part moves at {u}"));
            break;
        }
        let total = closed.split(u)?;
        if closed.view().apply(u)?.split(n)?.0 != f.apply(total)? {
            push(Law::InputCoordinatesConstant, format!("state part differs from f at {u}"));
            break;
        }
    }
    if !autonomous_consistency(f, z)?.holds {
        push(Law::AutonomousConsistency, "reach sets differ".into());
    }
    if !fundamental_first_moves(f, z, target)?.passes() {
        push(Law::FundamentalFirstMoves, "a first move changes the state part".into());
    }

    let report = match evaluate(closed.view(), joined, options_for(f)) {
        Ok(r) => r,
        Err(crate::Error::Defect(d)) => {
            out.push(*d);
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    out.extend(lattice_violations(closed.view(), &report));

    let stable = state_stable(f, z)?;
    let q = ModeQualifiedReport {
        param: target,
        state_width: n,
        fundamental_mode: FundamentalMode::qualify(&report, stable),
        state_stable: stable,
        report,
    };
    let props = [
        q.report.delay_insensitive.holds,
        q.report.hazard_free.holds,
        q.report.trivially_hazard_free.holds,
        q.report.semi_modular.holds,
        q.report.weakly_semi_modular.holds,
        q.report.tcgr.holds,
    ];
    let consistent = q
        .fundamental_mode
        .flags()
        .iter()
        .zip(props)
        .all(|(&fm, p)| fm == (p && stable));
    if !consistent {
        out.push(Defect {
            law: Law::FundamentalModeFlags,
            state: joined,
            details: "flag differs from property and stability".into(),
        });
    }
    if !trivhf_from(f, z, &q)?.passes() {
        out.push(Defect {
            law: Law::TrivialFundamentalMode,
            state: joined,
            details: "state part moves or an edge keeps the inputs".into(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::fixtures::*;

    fn z(w: &str, v: &str) -> TotalState {
        TotalState::new(s(w), s(v))
    }

    #[test]
    fn buffer_closure() {
        let c = close_field(&buf(), s("1")).unwrap();
        assert_eq!(c.view().apply(s("00")).unwrap(), s("01"));
        assert_eq!(c.view().apply(s("01")).unwrap(), s("11"));
        for u in c.view().states() {
            assert!(c.view().apply(u).unwrap().get(1));
        }
        assert!(close_field(&buf(), s("10")).is_err());
    }

    #[test]
    fn stability_hypothesis() {
        assert!(state_stable(&buf(), z("0", "0")).unwrap());
        assert!(!state_stable(&buf(), z("0", "1")).unwrap());
    }

    #[test]
    fn buffer_reports() {
        let r = classify_param(&buf(), z("0", "0"), s("1")).unwrap();
        let p = &r.report;
        assert!(p.delay_insensitive.holds && p.hazard_free.holds && p.semi_modular.holds);
        assert!(p.weakly_semi_modular.holds && p.tcgr.holds && p.single_bit_change);
        assert_eq!(p.limit, Some(s("11")));
        let fm = r.fundamental_mode;
        assert!(fm.delay_insensitive && fm.hazard_free && fm.semi_modular && fm.weakly_semi_modular && fm.tcgr);
        assert_eq!(p.reach_size, 3);

        let rest = classify_param(&buf(), z("0", "0"), s("0")).unwrap();
        assert!(rest.report.trivially_hazard_free.holds);
        assert_eq!(rest.report.trivial_target, Some(s("00")));
        assert!(rest.fundamental_mode.trivially_hazard_free);

        let moving = classify_param(&buf(), z("1", "0"), s("0")).unwrap();
        assert!(moving.report.delay_insensitive.holds);
        assert_eq!(moving.report.limit, Some(s("00")));
        assert!(!moving.state_stable && !moving.fundamental_mode.delay_insensitive);
    }

    #[test]
    fn first_moves() {
        assert_eq!(
            fundamental_first_moves(&buf(), z("0", "0"), s("1")).unwrap(),
            Check::Checked(Verdict::pass())
        );
        assert!(matches!(
            fundamental_first_moves(&buf(), z("0", "1"), s("1")).unwrap(),
            Check::NotApplicable(_)
        ));
        let closed_not = ParamVectorField::autonomous(&VectorField::identity(1).unwrap());
        assert_eq!(
            fundamental_first_moves(&closed_not, z("1", ""), State::empty()).unwrap(),
            Check::Checked(Verdict::pass())
        );
    }

    #[test]
    fn autonomous_consistency_examples() {
        assert!(autonomous_consistency(&buf(), z("0", "0")).unwrap().holds);
        assert!(autonomous_consistency(&buf(), z("0", "1")).unwrap().holds);
        let c = close_field(&buf(), s("1")).unwrap();
        let r: Vec<String> = reach(c.view(), s("01")).unwrap().iter().map(|s| s.to_string()).collect();
        assert_eq!(r, ["01", "11"]);
    }

    #[test]
    fn trivial_fundamental_mode() {
        assert_eq!(
            trivhf_fm_checks(&buf(), z("0", "0"), s("0")).unwrap(),
            Check::Checked(Verdict::pass())
        );
        let constf = ParamVectorField::from_fn(2, 1, |_| s("10")).unwrap();
        assert_eq!(
            trivhf_fm_checks(&constf, z("10", "0"), s("1")).unwrap(),
            Check::Checked(Verdict::pass())
        );
        assert!(matches!(
            trivhf_fm_checks(&buf(), z("0", "0"), s("1")).unwrap(),
            Check::NotApplicable(_)
        ));
    }

    #[test]
    fn all_laws_small_exhaustive() {
        // every f with n = m = 1, every total state and target
        for code in 0u32..16 {
            let table: Vec<u32> = (0..4).map(|i| (code >> i) & 1).collect();
            let f = ParamVectorField::from_table(1, 1, table).unwrap();
            for w in ["0", "1"] {
                for v in ["0", "1"] {
                    for t in ["0", "1"] {
                        let found = mode_violations(&f, z(w, v), s(t)).unwrap();
                        assert!(found.is_empty(), "{f:?} {w}{v} -> {t}: {found:?}");
                    }
                }
            }
        }
    }
}
