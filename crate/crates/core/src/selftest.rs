//! Executable suites over the implication lattice, the characterization
//! equivalences, oracle agreement and the closed-field laws.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{ParamVectorField, VectorField};
use crate::io::model::ModelDocument;
use crate::nonautonomous::mode_violations;
use crate::oracle::{constant_field_admits_lassos, enumerate_lassos, oracle_classify};
use crate::properties::{classify, evaluate, lattice_violations, ClassifyOptions, Defect, Law, PropertyReport};
use crate::state::{State, TotalState};

/// Widest field the oracle is asked to referee.
pub const MAX_ORACLE_WIDTH: usize = 4;
/// Widest field sampled by the randomized suite.
pub const MAX_RANDOM_WIDTH: usize = 12;

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Violation {
    pub field: ModelDocument,
    pub state: State,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param: Option<State>,
    pub law: Law,
    pub details: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub cases_run: usize,
    pub violations: Vec<Violation>,
    pub seed: Option<u64>,
    /// Number of cases where each property (or combination) holds.
    pub tallies: BTreeMap<String, usize>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SuiteResult {
    fn new(suite: impl Into<String>, seed: Option<u64>) -> Self {
        Self {
            suite: suite.into(),
            cases_run: 0,
            violations: Vec::new(),
            seed,
            tallies: BTreeMap::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} cases, {} violations",
            self.suite,
            self.cases_run,
            self.violations.len()
        )
    }

    fn tally(&mut self, r: &PropertyReport) {
        let flags = [
            ("delay_insensitive", r.delay_insensitive.holds),
            ("hazard_free", r.hazard_free.holds),
            ("trivially_hazard_free", r.trivially_hazard_free.holds),
            ("semi_modular", r.semi_modular.holds),
            ("weakly_semi_modular", r.weakly_semi_modular.holds),
            ("tcgr", r.tcgr.holds),
            ("single_bit_change", r.single_bit_change),
            ("tcgr_and_not_delay_insensitive", r.tcgr.holds && !r.delay_insensitive.holds),
        ];
        for (key, holds) in flags {
            *self.tallies.entry(key.to_string()).or_default() += holds as usize;
        }
    }

    fn record(&mut self, field: &ModelDocument, param: Option<State>, defects: Vec<Defect>) {
        self.violations.extend(defects.into_iter().map(|d| Violation {
            field: field.clone(),
            state: d.state,
            param,
            law: d.law,
            details: d.details,
        }));
    }
}

/// Every law on one autonomous instance, optionally against the oracle.
pub fn check_case(g: &VectorField, w: State, with_oracle: bool) -> Result<(Option<PropertyReport>, Vec<Defect>)> {
    let report = match evaluate(g, w, ClassifyOptions::default()) {
        Ok(r) => r,
        Err(Error::Defect(d)) => return Ok((None, vec![*d])),
        Err(e) => return Err(e),
    };
    let mut defects = lattice_violations(g, &report);
    if with_oracle {
        let reference = oracle_classify(g, w)?;
        let diffs = report.verdict_differences(&reference);
        if !diffs.is_empty() {
            defects.push(Defect {
                law: Law::OracleAgreement,
                state: w,
                details: diffs.join("; "),
            });
        }
        if report.trivially_hazard_free.holds {
            let lassos = enumerate_lassos(g, w, None)?;
            if !constant_field_admits_lassos(g, w, &lassos)? {
                defects.push(Defect {
                    law: Law::OracleAgreement,
                    state: w,
                    details: "a behavior is not a behavior of the constant field".into(),
                });
            }
        }
    }
    Ok((Some(report), defects))
}

fn run_case(result: &mut SuiteResult, g: &VectorField, w: State, with_oracle: bool) -> Result<()> {
    let (report, defects) = check_case(g, w, with_oracle)?;
    result.cases_run += 1;
    if let Some(r) = &report {
        result.tally(r);
    }
    if !defects.is_empty() {
        result.record(&ModelDocument::from_autonomous(g), None, defects);
    }
    Ok(())
}

/// Every field of width `n` at every state, with oracle agreement.
pub fn exhaustive_lattice(n: usize) -> Result<SuiteResult> {
    if !(1..=2).contains(&n) {
        return Err(Error::Precondition(format!("exhaustive suite needs n in 1..=2, got {n}")));
    }
    let start = Instant::now();
    let mut result = SuiteResult::new(format!("exhaustive n={n}"), None);
    for g in all_fields(n) {
        for w in g.states() {
            run_case(&mut result, &g, w, true)?;
        }
    }
    result.elapsed = start.elapsed();
    Ok(result)
}

/// All `(2^n)^(2^n)` fields of width `n`, in table order.
pub fn all_fields(n: usize) -> impl Iterator<Item = VectorField> {
    let size = 1usize << n;
    let count = 1u64 << (n * size);
    (0..count).map(move |code| {
        let table = (0..size)
            .map(|i| ((code >> (i * n)) & ((1 << n) - 1)) as u32)
            .collect();
        VectorField::from_table(n, table).expect("table in range")
    })
}

fn random_field(rng: &mut ChaCha8Rng, n: usize, m: usize) -> ParamVectorField {
    let table = (0..1u32 << (n + m)).map(|_| rng.gen_range(0..1u32 << n)).collect();
    ParamVectorField::from_table(n, m, table).expect("table in range")
}

fn random_state(rng: &mut ChaCha8Rng, width: usize) -> State {
    State::new(rng.gen_range(0..1u32 << width), width).expect("value in range")
}

/// Seeded uniform sampling of fields and start states.
pub fn randomized_suite(n: usize, samples: usize, seed: u64, with_oracle: bool) -> Result<SuiteResult> {
    let limit = if with_oracle { MAX_ORACLE_WIDTH } else { MAX_RANDOM_WIDTH };
    if n == 0 || n > limit {
        return Err(Error::Precondition(format!("randomized suite needs n in 1..={limit}, got {n}")));
    }
    let start = Instant::now();
    let label = if with_oracle { "oracle" } else { "random" };
    let mut result = SuiteResult::new(format!("{label} n={n}"), Some(seed));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let g = random_field(&mut rng, n, 0).as_autonomous().expect("m = 0");
        let w = random_state(&mut rng, n);
        run_case(&mut result, &g, w, with_oracle)?;
    }
    result.elapsed = start.elapsed();
    Ok(result)
}

/// Seeded closed-field laws: each sample draws `f` and `z` and checks
/// every target input.
pub fn nonautonomous_suite(n: usize, m: usize, samples: usize, seed: u64) -> Result<SuiteResult> {
    if n == 0 || m == 0 || n + m > MAX_RANDOM_WIDTH {
        return Err(Error::Precondition(format!("closed-field suite needs n, m >= 1, n + m <= {MAX_RANDOM_WIDTH}")));
    }
    let start = Instant::now();
    let mut result = SuiteResult::new(format!("closed n={n} m={m}"), Some(seed));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let f = random_field(&mut rng, n, m);
        let z = TotalState::new(random_state(&mut rng, n), random_state(&mut rng, m));
        for t in 0..1u32 << m {
            let target = State::new(t, m)?;
            let defects = mode_violations(&f, z, target)?;
            result.cases_run += 1;
            if !defects.is_empty() {
                result.record(&ModelDocument::from_field(&f), Some(target), defects);
            }
        }
    }
    result.elapsed = start.elapsed();
    Ok(result)
}

/// A strict separation between two properties.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationKind {
    DelayInsensitiveNotHazardFree,
    HazardFreeNotSemiModular,
    WeaklySemiModularNotSemiModular,
    TcgrNotDelayInsensitive,
    TcgrNotSingleBitChange,
}

impl SeparationKind {
    pub const ALL: [SeparationKind; 5] = [
        SeparationKind::DelayInsensitiveNotHazardFree,
        SeparationKind::HazardFreeNotSemiModular,
        SeparationKind::WeaklySemiModularNotSemiModular,
        SeparationKind::TcgrNotDelayInsensitive,
        SeparationKind::TcgrNotSingleBitChange,
    ];

    pub fn holds(&self, r: &PropertyReport) -> bool {
        match self {
            SeparationKind::DelayInsensitiveNotHazardFree => r.delay_insensitive.holds && !r.hazard_free.holds,
            SeparationKind::HazardFreeNotSemiModular => r.hazard_free.holds && !r.semi_modular.holds,
            SeparationKind::WeaklySemiModularNotSemiModular => {
                r.weakly_semi_modular.holds && !r.semi_modular.holds
            }
            SeparationKind::TcgrNotDelayInsensitive => r.tcgr.holds && !r.delay_insensitive.holds,
            SeparationKind::TcgrNotSingleBitChange => r.tcgr.holds && !r.single_bit_change,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationWitness {
    pub kind: SeparationKind,
    pub n: usize,
    pub state: State,
    pub model: ModelDocument,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    pub seed: u64,
    pub witnesses: Vec<SeparationWitness>,
    /// Separations with no witness within the search budget.
    pub missing: Vec<SeparationKind>,
}

/// Looks for a witness of each separation: exhaustively at widths 1 and 2
/// (smallest field first), then by seeded sampling at widths 3 and up to
/// `max_n`, at most `budget` samples per width.
pub fn separation_search(max_n: usize, budget: usize, seed: u64) -> Result<SeparationReport> {
    let mut found: BTreeMap<usize, SeparationWitness> = BTreeMap::new();
    let consider = |g: &VectorField, w: State, found: &mut BTreeMap<usize, SeparationWitness>| -> Result<bool> {
        let r = classify(g, w)?;
        for (k, kind) in SeparationKind::ALL.iter().enumerate() {
            if !found.contains_key(&k) && kind.holds(&r) {
                found.insert(
                    k,
                    SeparationWitness {
                        kind: *kind,
                        n: g.width(),
                        state: w,
                        model: ModelDocument::from_autonomous(g),
                    },
                );
            }
        }
        Ok(found.len() == SeparationKind::ALL.len())
    };
    'search: {
        for n in 1..=max_n.min(2) {
            for g in all_fields(n) {
                for w in g.states() {
                    if consider(&g, w, &mut found)? {
                        break 'search;
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for n in 3..=max_n {
            for _ in 0..budget {
                let g = random_field(&mut rng, n, 0).as_autonomous().expect("m = 0");
                let w = random_state(&mut rng, n);
                if consider(&g, w, &mut found)? {
                    break 'search;
                }
            }
        }
    }
    let missing = SeparationKind::ALL
        .iter()
        .enumerate()
        .filter(|(k, _)| !found.contains_key(k))
        .map(|(_, kind)| *kind)
        .collect();
    Ok(SeparationReport {
        seed,
        witnesses: found.into_values().collect(),
        missing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_one_exhaustive() {
        let r = exhaustive_lattice(1).unwrap();
        assert_eq!(r.cases_run, 8);
        assert!(r.passed(), "{:?}", r.violations);
        assert_eq!(r.tallies["tcgr_and_not_delay_insensitive"], 2);
        assert!(exhaustive_lattice(3).is_err());
    }

    #[test]
    fn field_enumeration_counts() {
        assert_eq!(all_fields(1).count(), 4);
        assert_eq!(all_fields(2).count(), 256);
    }

    #[test]
    fn randomized_is_deterministic() {
        let a = randomized_suite(3, 50, 9, false).unwrap();
        let b = randomized_suite(3, 50, 9, false).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.passed());
        assert!(randomized_suite(5, 1, 0, true).is_err());
    }

    #[test]
    fn closed_suite_small() {
        let r = nonautonomous_suite(1, 1, 40, 3).unwrap();
        assert_eq!(r.cases_run, 80);
        assert!(r.passed(), "{:?}", r.violations);
    }

    #[test]
    fn separations_at_small_widths() {
        let s = separation_search(2, 0, 0).unwrap();
        let tcgr_not_di = s
            .witnesses
            .iter()
            .find(|w| w.kind == SeparationKind::TcgrNotDelayInsensitive)
            .unwrap();
        assert_eq!(tcgr_not_di.n, 1);
        assert_eq!(tcgr_not_di.state.to_string(), "0");
        let sbc = s
            .witnesses
            .iter()
            .find(|w| w.kind == SeparationKind::TcgrNotSingleBitChange)
            .unwrap();
        assert_eq!(sbc.n, 2);
    }
}
