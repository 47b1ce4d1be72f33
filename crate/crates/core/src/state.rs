//! Bit-vector states, input vectors and total states.
//!
//! A [`State`] of width `n` stores coordinate 1 in the most significant of its
//! `n` bits, so the numeric value of the packed word is exactly the value of
//! the bit string read left to right. Sorting states by that value gives the
//! global state order used for every emitted set.
//!
//! Coordinates are 0-based in this API; text and JSON output is 1-based.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported width of a state (and of a total state `n + m`).
pub const MAX_WIDTH: usize = 24;

/// A vector over `{0,1}` of fixed width.
///
/// Width 0 is permitted so that the same type can carry an empty input
/// vector; vector fields themselves require width at least 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    width: u8,
    bits: u32,
}

/// An input (control) vector. Same representation as a state.
pub type InputVector = State;

impl State {
    /// Builds a state from its packed value. `bits` must fit in `width` bits.
    pub fn new(bits: u32, width: usize) -> Result<Self> {
        if width > MAX_WIDTH {
            return Err(Error::WidthOutOfRange { width, max: MAX_WIDTH });
        }
        if width < 32 && bits >> width != 0 {
            return Err(Error::ValueTooWide { bits, width });
        }
        Ok(Self {
            width: width as u8,
            bits,
        })
    }

    /// Unchecked constructor for internal loops over `0..2^width`.
    pub(crate) fn from_raw(bits: u32, width: usize) -> Self {
        debug_assert!(width <= MAX_WIDTH && (bits >> width) == 0);
        Self {
            width: width as u8,
            bits,
        }
    }

    pub fn zeros(width: usize) -> Result<Self> {
        Self::new(0, width)
    }

    /// The empty vector (width 0).
    pub fn empty() -> Self {
        Self { width: 0, bits: 0 }
    }

    pub fn from_bools(values: &[bool]) -> Result<Self> {
        let width = values.len();
        let mut bits = 0u32;
        for &b in values {
            bits = (bits << 1) | b as u32;
        }
        Self::new(bits, width)
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    /// Packed value; coordinate 1 is the most significant bit.
    pub fn value(&self) -> u32 {
        self.bits
    }

    /// Mask of bit positions for the given 0-based coordinate.
    pub(crate) fn coord_mask(width: usize, coord: usize) -> u32 {
        debug_assert!(coord < width);
        1 << (width - 1 - coord)
    }

    pub fn get(&self, coord: usize) -> bool {
        assert!(coord < self.width(), "coordinate {coord} out of range");
        self.bits & Self::coord_mask(self.width(), coord) != 0
    }

    pub fn with(&self, coord: usize, value: bool) -> Self {
        let mask = Self::coord_mask(self.width(), coord);
        let bits = if value { self.bits | mask } else { self.bits & !mask };
        Self { bits, ..*self }
    }

    pub fn flip(&self, coord: usize) -> Self {
        Self {
            bits: self.bits ^ Self::coord_mask(self.width(), coord),
            ..*self
        }
    }

    /// Flips every coordinate in `set`.
    pub fn flip_set(&self, set: CoordSet) -> Self {
        debug_assert_eq!(set.width(), self.width());
        Self {
            bits: self.bits ^ set.mask,
            ..*self
        }
    }

    pub fn bools(&self) -> Vec<bool> {
        (0..self.width()).map(|c| self.get(c)).collect()
    }

    /// The set of coordinates on which `self` and `other` differ.
    pub fn diff(&self, other: &State) -> Result<CoordSet> {
        check_width(self.width(), other.width())?;
        Ok(CoordSet {
            width: self.width,
            mask: self.bits ^ other.bits,
        })
    }

    /// Number of coordinates where the two states differ.
    pub fn hamming(&self, other: &State) -> Result<usize> {
        Ok(self.diff(other)?.len())
    }

    /// Concatenation: `self` bits followed by `tail` bits.
    pub fn concat(&self, tail: &State) -> Result<State> {
        let width = self.width() + tail.width();
        if width > MAX_WIDTH {
            return Err(Error::WidthOutOfRange { width, max: MAX_WIDTH });
        }
        Ok(State::from_raw(
            (self.bits << tail.width()) | tail.bits,
            width,
        ))
    }

    /// Splits into the first `head` coordinates and the rest.
    pub fn split(&self, head: usize) -> Result<(State, State)> {
        if head > self.width() {
            return Err(Error::WidthMismatch {
                expected: head,
                found: self.width(),
            });
        }
        let tail = self.width() - head;
        let low = if tail == 0 { 0 } else { self.bits & ((1u32 << tail) - 1) };
        Ok((
            State::from_raw(self.bits >> tail, head),
            State::from_raw(low, tail),
        ))
    }
}

pub(crate) fn check_width(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::WidthMismatch { expected, found })
    }
}

impl FromStr for State {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut values = Vec::with_capacity(text.len());
        for (pos, ch) in text.chars().enumerate() {
            match ch {
                '0' => values.push(false),
                '1' => values.push(true),
                _ => {
                    return Err(Error::BadBit {
                        text: text.to_string(),
                        pos,
                        ch,
                    })
                }
            }
        }
        Self::from_bools(&values)
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in 0..self.width() {
            f.write_str(if self.get(c) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "State({self})")
    }
}

impl Serialize for State {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for State {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A set of coordinates of a fixed width, aligned with [`State`] bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoordSet {
    width: u8,
    mask: u32,
}

impl CoordSet {
    pub fn empty(width: usize) -> Self {
        Self {
            width: width as u8,
            mask: 0,
        }
    }

    pub(crate) fn from_mask(mask: u32, width: usize) -> Self {
        Self {
            width: width as u8,
            mask,
        }
    }

    pub fn from_coords(width: usize, coords: &[usize]) -> Self {
        let mut set = Self::empty(width);
        for &c in coords {
            set.mask |= State::coord_mask(width, c);
        }
        set
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, coord: usize) -> bool {
        coord < self.width() && self.mask & State::coord_mask(self.width(), coord) != 0
    }

    pub fn is_subset(&self, other: &CoordSet) -> bool {
        self.mask & !other.mask == 0
    }

    /// 0-based coordinates in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.width()).filter(move |&c| self.contains(c))
    }

    /// 1-based coordinates, the form used in reports.
    pub fn one_based(&self) -> Vec<usize> {
        self.iter().map(|c| c + 1).collect()
    }

    /// Every subset, ordered so that sets switching lower-numbered
    /// coordinates come first: the subset's rank is the binary number in
    /// which coordinate 1 is the least significant digit.
    ///
    /// This is the order in which witness searches visit μ-successors.
    pub fn subsets(&self) -> Vec<CoordSet> {
        let coords: Vec<usize> = self.iter().collect();
        let k = coords.len();
        (0u32..(1u32 << k))
            .map(|rank| {
                let mut mask = 0;
                for (pos, &c) in coords.iter().enumerate() {
                    if rank & (1 << pos) != 0 {
                        mask |= State::coord_mask(self.width(), c);
                    }
                }
                CoordSet {
                    width: self.width,
                    mask,
                }
            })
            .collect()
    }
}

impl fmt::Debug for CoordSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.one_based()).finish()
    }
}

/// An extended (total) state `z = (w, v)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct TotalState {
    pub w: State,
    pub v: InputVector,
}

impl TotalState {
    pub fn new(w: State, v: InputVector) -> Self {
        Self { w, v }
    }

    /// The total state seen as one state of width `n + m`.
    pub fn joined(&self) -> State {
        self.w
            .concat(&self.v)
            .expect("total state width is bounded by construction")
    }

    /// Splits a width-`n + m` state into its state and input parts.
    pub fn from_joined(z: State, n: usize) -> Result<Self> {
        let (w, v) = z.split(n)?;
        Ok(Self { w, v })
    }
}

impl fmt::Display for TotalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.w, self.v)
    }
}
