//! Machine-readable and text reports.
//!
//! Coordinates are 1-based and state sets are in ascending order. The tcgr
//! branch is `"b1"`, `"b2"` or `"b3"`; for `"b2"` the number of strict steps
//! `p` equals `orbit.transient_len`.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::OrbitSummary;
use crate::nonautonomous::{FundamentalMode, ModeQualifiedReport};
use crate::properties::{
    Escape, HazardCause, PropertyReport, SensitivityCause, TcgrBranch, Verdict, Witness,
};
use crate::relations::SccWitness;
use crate::state::{CoordSet, InputVector, State};

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub state: State,
    pub stable: bool,
    pub excited: Vec<usize>,
    pub reach_size: usize,
    pub stable_reachable: Vec<State>,
    pub limit: Option<State>,
    pub properties: PropertiesDoc,
    pub causes: CausesDoc,
    pub orbit: OrbitSummary,
    pub witnesses: WitnessesDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<InputVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_stable: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fundamental_mode: Option<FundamentalModeDoc>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertiesDoc {
    pub delay_insensitive: bool,
    pub hazard_free: bool,
    pub trivially_hazard_free: bool,
    pub semi_modular: bool,
    pub weakly_semi_modular: bool,
    pub tcgr: TcgrDoc,
    pub single_bit_change: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TcgrDoc {
    pub holds: bool,
    pub branch: Option<String>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CausesDoc {
    pub delay_sensitivity: Vec<SensitivityCause>,
    pub hazard: Vec<HazardCause>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessesDoc {
    pub delay_insensitive: Option<WitnessDoc>,
    pub hazard_free: Option<WitnessDoc>,
    pub trivially_hazard_free: Option<WitnessDoc>,
    pub semi_modular: Option<WitnessDoc>,
    pub weakly_semi_modular: Option<WitnessDoc>,
    pub tcgr: Option<WitnessDoc>,
    /// The constant image on the reach set, when trivially hazard-free.
    pub trivial_target: Option<State>,
    pub hazardous_transition: Option<TransitionDoc>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: State,
    pub to: State,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WitnessDoc {
    Oscillation {
        states: Vec<State>,
    },
    MultipleLimits {
        states: Vec<State>,
    },
    NonMonotonous {
        coordinate: usize,
        walk: Vec<State>,
    },
    DifferentImages {
        first: State,
        second: State,
    },
    Disabled {
        from: State,
        to: State,
        coordinate: usize,
    },
    Escape {
        from: State,
        coordinate: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stable: Option<State>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cycle: Option<Vec<State>>,
    },
    Transition {
        from: State,
        to: State,
    },
    Unmatched {
        state: State,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FundamentalModeDoc {
    pub delay_insensitive: bool,
    pub hazard_free: bool,
    pub trivially_hazard_free: bool,
    pub semi_modular: bool,
    pub weakly_semi_modular: bool,
    pub tcgr: bool,
}

impl WitnessDoc {
    fn from_witness(w: &Witness) -> Self {
        match w {
            Witness::Oscillation(scc) => WitnessDoc::Oscillation {
                states: scc.states.clone(),
            },
            Witness::Limits(states) => WitnessDoc::MultipleLimits {
                states: states.clone(),
            },
            Witness::NonMonotone { coord, walk } => WitnessDoc::NonMonotonous {
                coordinate: coord + 1,
                walk: walk.clone(),
            },
            Witness::DifferentImages { first, second } => WitnessDoc::DifferentImages {
                first: *first,
                second: *second,
            },
            Witness::Disabled { from, to, coord } => WitnessDoc::Disabled {
                from: *from,
                to: *to,
                coordinate: coord + 1,
            },
            Witness::Escape { from, coord, escape } => {
                let (stable, cycle) = match escape {
                    Escape::Stable(s) => (Some(*s), None),
                    Escape::Cycle(c) => (None, Some(c.states.clone())),
                };
                WitnessDoc::Escape {
                    from: *from,
                    coordinate: coord + 1,
                    stable,
                    cycle,
                }
            }
            Witness::Transition { from, to } => WitnessDoc::Transition {
                from: *from,
                to: *to,
            },
            Witness::Unmatched(state) => WitnessDoc::Unmatched { state: *state },
        }
    }

    fn to_witness(&self) -> Result<Witness> {
        let coord = |c: usize| {
            c.checked_sub(1)
                .ok_or_else(|| Error::Model("coordinates are 1-based".into()))
        };
        Ok(match self {
            WitnessDoc::Oscillation { states } => Witness::Oscillation(SccWitness {
                states: states.clone(),
            }),
            WitnessDoc::MultipleLimits { states } => Witness::Limits(states.clone()),
            WitnessDoc::NonMonotonous { coordinate, walk } => Witness::NonMonotone {
                coord: coord(*coordinate)?,
                walk: walk.clone(),
            },
            WitnessDoc::DifferentImages { first, second } => Witness::DifferentImages {
                first: *first,
                second: *second,
            },
            WitnessDoc::Disabled { from, to, coordinate } => Witness::Disabled {
                from: *from,
                to: *to,
                coord: coord(*coordinate)?,
            },
            WitnessDoc::Escape {
                from,
                coordinate,
                stable,
                cycle,
            } => {
                let escape = match (stable, cycle) {
                    (Some(s), None) => Escape::Stable(*s),
                    (None, Some(c)) => Escape::Cycle(SccWitness { states: c.clone() }),
                    _ => return Err(Error::Model("escape needs exactly one of stable, cycle".into())),
                };
                Witness::Escape {
                    from: *from,
                    coord: coord(*coordinate)?,
                    escape,
                }
            }
            WitnessDoc::Transition { from, to } => Witness::Transition { from: *from, to: *to },
            WitnessDoc::Unmatched { state } => Witness::Unmatched(*state),
        })
    }
}

fn witness_of(v: &Verdict) -> Option<WitnessDoc> {
    v.witness.as_ref().map(WitnessDoc::from_witness)
}

fn verdict_of(holds: bool, doc: &Option<WitnessDoc>) -> Result<Verdict> {
    let witness = doc.as_ref().map(WitnessDoc::to_witness).transpose()?;
    if holds != witness.is_none() {
        return Err(Error::Model("a witness is present exactly when a property fails".into()));
    }
    Ok(Verdict { holds, witness })
}

impl ReportDocument {
    pub fn from_report(r: &PropertyReport) -> Self {
        Self {
            state: r.state,
            stable: r.stable,
            excited: r.excited.one_based(),
            reach_size: r.reach_size,
            stable_reachable: r.stable_reachable.clone(),
            limit: r.limit,
            properties: PropertiesDoc {
                delay_insensitive: r.delay_insensitive.holds,
                hazard_free: r.hazard_free.holds,
                trivially_hazard_free: r.trivially_hazard_free.holds,
                semi_modular: r.semi_modular.holds,
                weakly_semi_modular: r.weakly_semi_modular.holds,
                tcgr: TcgrDoc {
                    holds: r.tcgr.holds,
                    branch: r.tcgr_branch.map(|b| b.label().to_string()),
                },
                single_bit_change: r.single_bit_change,
            },
            causes: CausesDoc {
                delay_sensitivity: r.delay_sensitivity_causes.clone(),
                hazard: r.hazard_causes.clone(),
            },
            orbit: r.orbit.clone(),
            witnesses: WitnessesDoc {
                delay_insensitive: witness_of(&r.delay_insensitive),
                hazard_free: witness_of(&r.hazard_free),
                trivially_hazard_free: witness_of(&r.trivially_hazard_free),
                semi_modular: witness_of(&r.semi_modular),
                weakly_semi_modular: witness_of(&r.weakly_semi_modular),
                tcgr: witness_of(&r.tcgr),
                trivial_target: r.trivial_target,
                hazardous_transition: r
                    .hazardous_transition
                    .map(|(from, to)| TransitionDoc { from, to }),
            },
            param: None,
            state_stable: None,
            fundamental_mode: None,
        }
    }

    pub fn from_mode_report(q: &ModeQualifiedReport) -> Self {
        let fm = q.fundamental_mode;
        Self {
            param: Some(q.param),
            state_stable: Some(q.state_stable),
            fundamental_mode: Some(FundamentalModeDoc {
                delay_insensitive: fm.delay_insensitive,
                hazard_free: fm.hazard_free,
                trivially_hazard_free: fm.trivially_hazard_free,
                semi_modular: fm.semi_modular,
                weakly_semi_modular: fm.weakly_semi_modular,
                tcgr: fm.tcgr,
            }),
            ..Self::from_report(&q.report)
        }
    }

    /// Rebuilds the analysis report.
    pub fn to_report(&self) -> Result<PropertyReport> {
        let p = &self.properties;
        let w = &self.witnesses;
        let width = self.state.width();
        if let Some(&bad) = self.excited.iter().find(|&&c| c == 0 || c > width) {
            return Err(Error::Model(format!("excited coordinate {bad} out of range")));
        }
        let excited: Vec<usize> = self.excited.iter().map(|c| c - 1).collect();
        let branch = match p.tcgr.branch.as_deref() {
            None => None,
            Some("b1") => Some(TcgrBranch::Stable),
            Some("b2") => Some(TcgrBranch::Stabilizing {
                p: self.orbit.transient_len,
            }),
            Some("b3") => Some(TcgrBranch::Periodic),
            Some(other) => return Err(Error::Model(format!("unknown tcgr branch {other:?}"))),
        };
        Ok(PropertyReport {
            state: self.state,
            stable: self.stable,
            excited: CoordSet::from_coords(width, &excited),
            reach_size: self.reach_size,
            stable_reachable: self.stable_reachable.clone(),
            limit: self.limit,
            delay_insensitive: verdict_of(p.delay_insensitive, &w.delay_insensitive)?,
            hazard_free: verdict_of(p.hazard_free, &w.hazard_free)?,
            trivially_hazard_free: verdict_of(p.trivially_hazard_free, &w.trivially_hazard_free)?,
            trivial_target: w.trivial_target,
            semi_modular: verdict_of(p.semi_modular, &w.semi_modular)?,
            weakly_semi_modular: verdict_of(p.weakly_semi_modular, &w.weakly_semi_modular)?,
            tcgr: verdict_of(p.tcgr.holds, &w.tcgr)?,
            tcgr_branch: branch,
            single_bit_change: p.single_bit_change,
            delay_sensitivity_causes: self.causes.delay_sensitivity.clone(),
            hazard_causes: self.causes.hazard.clone(),
            hazardous_transition: w.hazardous_transition.map(|t| (t.from, t.to)),
            orbit: self.orbit.clone(),
        })
    }

    /// Rebuilds a closed-field report; fails on autonomous documents.
    pub fn to_mode_report(&self) -> Result<ModeQualifiedReport> {
        let (Some(param), Some(state_stable), Some(fm)) =
            (self.param, self.state_stable, self.fundamental_mode)
        else {
            return Err(Error::Model("not a closed-field report".into()));
        };
        let state_width = self
            .state
            .width()
            .checked_sub(param.width())
            .ok_or_else(|| Error::Model("parameter wider than state".into()))?;
        Ok(ModeQualifiedReport {
            param,
            state_width,
            report: self.to_report()?,
            state_stable,
            fundamental_mode: FundamentalMode {
                delay_insensitive: fm.delay_insensitive,
                hazard_free: fm.hazard_free,
                trivially_hazard_free: fm.trivially_hazard_free,
                semi_modular: fm.semi_modular,
                weakly_semi_modular: fm.weakly_semi_modular,
                tcgr: fm.tcgr,
            },
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))
    }
}

pub fn report_json(r: &PropertyReport) -> String {
    ReportDocument::from_report(r).to_json()
}

pub fn mode_report_json(q: &ModeQualifiedReport) -> String {
    ReportDocument::from_mode_report(q).to_json()
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    if items.is_empty() {
        "-".into()
    } else {
        items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
    }
}

fn name<T: Serialize>(value: &T) -> String {
    serde_json::to_value(value)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Fixed-layout summary. `split` shows total states as `w|v`.
pub fn report_text(doc: &ReportDocument) -> String {
    let split = doc
        .param
        .map(|p| doc.state.width() - p.width());
    let show = |s: &State| match split {
        Some(n) => {
            let (w, v) = s.split(n).expect("width checked");
            format!("{w}|{v}")
        }
        None => s.to_string(),
    };
    let shown = |items: &[State]| join(&items.iter().map(show).collect::<Vec<_>>());
    let p = &doc.properties;
    let mut out = String::new();
    let mut line = |key: &str, value: String| {
        writeln!(out, "{key:<24}{value}").expect("string write");
    };
    line("state", show(&doc.state));
    if let Some(param) = doc.param {
        line("param", param.to_string());
        line("state_stable", yes(doc.state_stable.unwrap_or(false)).into());
    }
    line("stable", yes(doc.stable).into());
    line("excited", join(&doc.excited));
    line("reach_size", doc.reach_size.to_string());
    line("stable_reachable", shown(&doc.stable_reachable));
    line("limit", doc.limit.as_ref().map(show).unwrap_or_else(|| "-".into()));
    let causes = |c: Vec<String>| {
        if c.is_empty() {
            String::new()
        } else {
            format!(" ({})", c.join(", "))
        }
    };
    line(
        "delay_insensitive",
        format!(
            "{}{}",
            yes(p.delay_insensitive),
            causes(doc.causes.delay_sensitivity.iter().map(name).collect())
        ),
    );
    line(
        "hazard_free",
        format!(
            "{}{}",
            yes(p.hazard_free),
            causes(doc.causes.hazard.iter().map(name).collect())
        ),
    );
    line("trivially_hazard_free", yes(p.trivially_hazard_free).into());
    line("semi_modular", yes(p.semi_modular).into());
    line("weakly_semi_modular", yes(p.weakly_semi_modular).into());
    line(
        "tcgr",
        match &p.tcgr.branch {
            Some(b) => format!("{} ({b})", yes(p.tcgr.holds)),
            None => yes(p.tcgr.holds).into(),
        },
    );
    line("single_bit_change", yes(p.single_bit_change).into());
    if let Some(t) = doc.witnesses.hazardous_transition {
        line("hazardous_transition", format!("{} -> {}", show(&t.from), show(&t.to)));
    }
    line(
        "orbit",
        format!(
            "J={} P={}: {}",
            doc.orbit.transient_len,
            doc.orbit.period,
            shown(&doc.orbit.milestones)
        ),
    );
    if let Some(fm) = doc.fundamental_mode {
        let held: Vec<&str> = [
            ("delay_insensitive", fm.delay_insensitive),
            ("hazard_free", fm.hazard_free),
            ("trivially_hazard_free", fm.trivially_hazard_free),
            ("semi_modular", fm.semi_modular),
            ("weakly_semi_modular", fm.weakly_semi_modular),
            ("tcgr", fm.tcgr),
        ]
        .iter()
        .filter(|(_, b)| *b)
        .map(|(k, _)| *k)
        .collect();
        line("fundamental_mode", join(&held));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::fixtures::*;
    use crate::field::VectorField;
    use crate::nonautonomous::classify_param;
    use crate::properties::classify;
    use crate::state::TotalState;

    fn json(r: &PropertyReport) -> serde_json::Value {
        serde_json::from_str(&report_json(r)).unwrap()
    }

    #[test]
    fn key_order_is_fixed() {
        let text = report_json(&classify(&race(), s("00")).unwrap());
        let keys = [
            "\"state\"",
            "\"stable\"",
            "\"excited\"",
            "\"reach_size\"",
            "\"stable_reachable\"",
            "\"limit\"",
            "\"properties\"",
            "\"causes\"",
            "\"orbit\"",
            "\"witnesses\"",
        ];
        let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|p| p[0] < p[1]));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v.as_object().unwrap().len(), keys.len());
    }

    #[test]
    fn fixture_reports() {
        let n = json(&classify(&not(), s("0")).unwrap());
        assert_eq!(n["properties"]["tcgr"]["branch"], "b3");
        assert_eq!(n["causes"]["delay_sensitivity"], serde_json::json!(["oscillation"]));

        let id = json(&classify(&VectorField::identity(2).unwrap(), s("10")).unwrap());
        assert_eq!(id["limit"], "10");
        assert_eq!(id["causes"]["delay_sensitivity"], serde_json::json!([]));
        assert_eq!(id["causes"]["hazard"], serde_json::json!([]));

        let r = json(&classify(&race(), s("00")).unwrap());
        assert_eq!(r["causes"]["delay_sensitivity"], serde_json::json!(["multiple_limits"]));
        assert_eq!(r["excited"], serde_json::json!([1, 2]));
        assert_eq!(
            r["witnesses"]["semi_modular"],
            serde_json::json!({"kind": "disabled", "from": "00", "to": "10", "coordinate": 2})
        );
        assert_eq!(
            r["witnesses"]["weakly_semi_modular"],
            serde_json::json!({"kind": "escape", "from": "00", "coordinate": 1, "stable": "01"})
        );
    }

    #[test]
    fn reports_round_trip() {
        for n in 1..=2 {
            for g in all_fields(n) {
                for w in g.states() {
                    let r = classify(&g, w).unwrap();
                    let doc = ReportDocument::from_json(&report_json(&r)).unwrap();
                    assert_eq!(doc.to_report().unwrap(), r);
                }
            }
        }
        let q = classify_param(&buf(), TotalState::new(s("0"), s("0")), s("1")).unwrap();
        let doc = ReportDocument::from_json(&mode_report_json(&q)).unwrap();
        assert_eq!(doc.to_mode_report().unwrap(), q);
        assert!(mode_report_json(&q).contains("\"fundamental_mode\""));
    }

    #[test]
    fn text_layout() {
        let doc = ReportDocument::from_report(&classify(&const11(), s("00")).unwrap());
        let text = report_text(&doc);
        assert!(text.contains("limit                   11\n"));
        assert!(text.contains("tcgr                    yes (b2)\n"));
        assert!(text.contains("orbit                   J=1 P=1: 00 11\n"));
        let q = classify_param(&buf(), TotalState::new(s("0"), s("0")), s("1")).unwrap();
        let text = report_text(&ReportDocument::from_mode_report(&q));
        assert!(text.contains("state                   0|0\n"));
        assert!(text.contains("limit                   1|1\n"));
    }
}
