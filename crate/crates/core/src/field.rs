//! Vector fields (generator functions) and their iterates.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{check_width, CoordSet, InputVector, State, TotalState, MAX_WIDTH};

/// A total map `{0,1}^n -> {0,1}^n`, stored as an explicit table indexed by
/// the packed state value.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct VectorField {
    n: usize,
    table: Vec<u32>,
}

impl VectorField {
    /// Builds a field from its table; `table[x]` is the packed image of the
    /// state whose packed value is `x`.
    pub fn from_table(n: usize, table: Vec<u32>) -> Result<Self> {
        if n == 0 || n > MAX_WIDTH {
            return Err(Error::WidthOutOfRange { width: n, max: MAX_WIDTH });
        }
        if table.len() != 1usize << n {
            return Err(Error::Model(format!(
                "table has {} rows, expected {}",
                table.len(),
                1usize << n
            )));
        }
        if let Some(&bad) = table.iter().find(|&&y| y >> n != 0) {
            return Err(Error::ValueTooWide { bits: bad, width: n });
        }
        Ok(Self { n, table })
    }

    pub fn from_fn(n: usize, map: impl Fn(State) -> State) -> Result<Self> {
        if n == 0 || n > MAX_WIDTH {
            return Err(Error::WidthOutOfRange { width: n, max: MAX_WIDTH });
        }
        let mut table = Vec::with_capacity(1 << n);
        for x in 0..(1u32 << n) {
            let image = map(State::from_raw(x, n));
            check_width(n, image.width())?;
            table.push(image.value());
        }
        Ok(Self { n, table })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, |w| w)
    }

    pub fn constant(target: State) -> Result<Self> {
        Self::from_fn(target.width(), |_| target)
    }

    pub fn width(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    /// All `2^n` states in ascending order.
    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        (0..(1u32 << self.n)).map(move |x| State::from_raw(x, self.n))
    }

    pub(crate) fn image(&self, w: State) -> State {
        State::from_raw(self.table[w.value() as usize], self.n)
    }

    pub(crate) fn excited(&self, w: State) -> CoordSet {
        CoordSet::from_mask(self.table[w.value() as usize] ^ w.value(), self.n)
    }

    /// `g(w)`.
    pub fn apply(&self, w: State) -> Result<State> {
        check_width(self.n, w.width())?;
        Ok(self.image(w))
    }

    /// The coordinates `i` with `g_i(w) != w_i`.
    pub fn excitation_set(&self, w: State) -> Result<CoordSet> {
        check_width(self.n, w.width())?;
        Ok(self.excited(w))
    }

    pub fn is_stable(&self, w: State) -> Result<bool> {
        Ok(self.apply(w)? == w)
    }

    /// `g^j(w)`, with `g^0(w) = w`.
    pub fn iterate(&self, w: State, j: usize) -> Result<State> {
        check_width(self.n, w.width())?;
        let mut x = w;
        for _ in 0..j {
            let next = self.image(x);
            if next == x {
                break;
            }
            x = next;
        }
        Ok(x)
    }

    /// Least transient length and period of the iterate sequence from `w`.
    pub fn orbit_summary(&self, w: State) -> Result<OrbitSummary> {
        check_width(self.n, w.width())?;
        let mut first_seen: HashMap<State, usize> = HashMap::new();
        let mut milestones = Vec::new();
        let mut x = w;
        loop {
            if let Some(&j) = first_seen.get(&x) {
                let period = milestones.len() - j;
                return Ok(OrbitSummary {
                    transient_len: j,
                    period,
                    milestones,
                });
            }
            first_seen.insert(x, milestones.len());
            milestones.push(x);
            x = self.image(x);
        }
    }
}

/// Eventually periodic structure of `w, g(w), g^2(w), ...`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct OrbitSummary {
    /// Least `J` with `g^J(w) = g^{J+P}(w)` for some `P >= 1`.
    pub transient_len: usize,
    /// Least such `P` for that `J`.
    pub period: usize,
    /// `g^0(w), ..., g^{J+P-1}(w)`.
    pub milestones: Vec<State>,
}

impl OrbitSummary {
    pub fn stabilizes(&self) -> bool {
        self.period == 1
    }

    /// `g^m(w)` for any `m`, read off the stored prefix.
    pub fn at(&self, m: usize) -> State {
        if m < self.milestones.len() {
            self.milestones[m]
        } else {
            self.milestones[self.transient_len + (m - self.transient_len) % self.period]
        }
    }

    /// The stable limit of the iterates, when they stabilize.
    pub fn limit(&self) -> Option<State> {
        self.stabilizes()
            .then(|| self.milestones[self.transient_len])
    }
}

/// A vector field with one parameter: `f : {0,1}^n x {0,1}^m -> {0,1}^n`.
///
/// The table is indexed by the packed total state, state bits first.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ParamVectorField {
    n: usize,
    m: usize,
    table: Vec<u32>,
}

impl ParamVectorField {
    pub fn from_table(n: usize, m: usize, table: Vec<u32>) -> Result<Self> {
        if n == 0 || n + m > MAX_WIDTH {
            return Err(Error::WidthOutOfRange {
                width: n + m,
                max: MAX_WIDTH,
            });
        }
        if table.len() != 1usize << (n + m) {
            return Err(Error::Model(format!(
                "table has {} rows, expected {}",
                table.len(),
                1usize << (n + m)
            )));
        }
        if let Some(&bad) = table.iter().find(|&&y| y >> n != 0) {
            return Err(Error::ValueTooWide { bits: bad, width: n });
        }
        Ok(Self { n, m, table })
    }

    pub fn from_fn(n: usize, m: usize, map: impl Fn(TotalState) -> State) -> Result<Self> {
        if n == 0 || n + m > MAX_WIDTH {
            return Err(Error::WidthOutOfRange {
                width: n + m,
                max: MAX_WIDTH,
            });
        }
        let mut table = Vec::with_capacity(1 << (n + m));
        for z in 0..(1u32 << (n + m)) {
            let total = TotalState::from_joined(State::from_raw(z, n + m), n)?;
            let image = map(total);
            check_width(n, image.width())?;
            table.push(image.value());
        }
        Ok(Self { n, m, table })
    }

    /// An autonomous field viewed as a parameterized one with `m = 0`.
    pub fn autonomous(g: &VectorField) -> Self {
        Self {
            n: g.width(),
            m: 0,
            table: g.table().to_vec(),
        }
    }

    pub fn state_width(&self) -> usize {
        self.n
    }

    pub fn input_width(&self) -> usize {
        self.m
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn apply(&self, z: TotalState) -> Result<State> {
        check_width(self.n, z.w.width())?;
        check_width(self.m, z.v.width())?;
        Ok(State::from_raw(
            self.table[z.joined().value() as usize],
            self.n,
        ))
    }

    /// The autonomous field `w -> f(w, v)` for a fixed input.
    pub fn with_input(&self, v: InputVector) -> Result<VectorField> {
        check_width(self.m, v.width())?;
        VectorField::from_fn(self.n, |w| {
            State::from_raw(
                self.table[TotalState::new(w, v).joined().value() as usize],
                self.n,
            )
        })
    }

    /// With `m = 0` this is the same map as a [`VectorField`].
    pub fn as_autonomous(&self) -> Option<VectorField> {
        (self.m == 0).then(|| VectorField {
            n: self.n,
            table: self.table.clone(),
        })
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn excitation_examples() {
        let id = VectorField::identity(2).unwrap();
        assert!(id.excitation_set(s("01")).unwrap().is_empty());
        assert_eq!(not().excitation_set(s("0")).unwrap().one_based(), [1]);
        assert_eq!(const11().excitation_set(s("00")).unwrap().one_based(), [1, 2]);
        assert!(matches!(
            not().excitation_set(s("00")),
            Err(Error::WidthMismatch { .. })
        ));
    }

    #[test]
    fn stability_examples() {
        assert!(VectorField::identity(3).unwrap().is_stable(s("101")).unwrap());
        assert!(!not().is_stable(s("0")).unwrap());
        assert!(const11().is_stable(s("11")).unwrap());
    }

    #[test]
    fn iterate_examples() {
        assert_eq!(race().iterate(s("00"), 0).unwrap(), s("00"));
        assert_eq!(not().iterate(s("0"), 2).unwrap(), s("0"));
        assert_eq!(not().iterate(s("0"), 3).unwrap(), s("1"));
        assert_eq!(const11().iterate(s("00"), 5).unwrap(), s("11"));
    }

    #[test]
    fn orbit_examples() {
        let id = VectorField::identity(2).unwrap().orbit_summary(s("10")).unwrap();
        assert_eq!((id.transient_len, id.period), (0, 1));
        assert_eq!(id.milestones, [s("10")]);

        let osc = not().orbit_summary(s("0")).unwrap();
        assert_eq!((osc.transient_len, osc.period), (0, 2));
        assert_eq!(osc.milestones, [s("0"), s("1")]);
        assert!(!osc.stabilizes());

        let c = const11().orbit_summary(s("00")).unwrap();
        assert_eq!((c.transient_len, c.period), (1, 1));
        assert!(c.stabilizes());
        assert_eq!(c.limit(), Some(s("11")));
    }

    #[test]
    fn buffer_input_views() {
        let f = buf();
        assert_eq!(f.apply(TotalState::new(s("0"), s("1"))).unwrap(), s("1"));
        assert_eq!(f.with_input(s("0")).unwrap().table(), &[0, 0]);
        assert!(f.as_autonomous().is_none());
    }

    fn arb_field(max_n: usize) -> impl Strategy<Value = (VectorField, State)> {
        (1..=max_n).prop_flat_map(|n| {
            let size = 1usize << n;
            (
                proptest::collection::vec(0u32..size as u32, size),
                0u32..size as u32,
            )
                .prop_map(move |(table, w)| {
                    (
                        VectorField::from_table(n, table).unwrap(),
                        State::new(w, n).unwrap(),
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn stable_iff_nothing_excited((g, w) in arb_field(5)) {
            prop_assert_eq!(g.is_stable(w).unwrap(), g.excitation_set(w).unwrap().is_empty());
        }

        #[test]
        fn iterate_is_repeated_apply((g, w) in arb_field(5), j in 0usize..40) {
            let next = g.apply(g.iterate(w, j).unwrap()).unwrap();
            prop_assert_eq!(g.iterate(w, j + 1).unwrap(), next);
        }

        #[test]
        fn orbit_is_least_and_periodic((g, w) in arb_field(4)) {
            let orbit = g.orbit_summary(w).unwrap();
            let (j, p) = (orbit.transient_len, orbit.period);
            prop_assert_eq!(g.iterate(w, j).unwrap(), g.iterate(w, j + p).unwrap());
            for jj in 0..=j {
                for pp in 1..=(if jj == j { p - 1 } else { 1 << g.width() }) {
                    prop_assert_ne!(g.iterate(w, jj).unwrap(), g.iterate(w, jj + pp).unwrap());
                }
            }
            for m in j..j + 3 * p + 5 {
                prop_assert_eq!(g.iterate(w, m).unwrap(), orbit.at(m));
            }
        }
    }
}
