use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cube faces in facelet-numbering order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Face {
    U,
    R,
    F,
    D,
    L,
    B,
}

impl Face {
    pub const ALL: [Face; 6] = [Face::U, Face::R, Face::F, Face::D, Face::L, Face::B];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Face> {
        Self::ALL.get(i).copied()
    }

    pub fn letter(self) -> char {
        ['U', 'R', 'F', 'D', 'L', 'B'][self.index()]
    }

    pub fn from_letter(c: char) -> Option<Face> {
        Self::ALL.iter().copied().find(|f| f.letter() == c)
    }

    /// Outward normal in (x = right, y = up, z = front) coordinates.
    pub(crate) fn normal(self) -> [i8; 3] {
        match self {
            Face::U => [0, 1, 0],
            Face::R => [1, 0, 0],
            Face::F => [0, 0, 1],
            Face::D => [0, -1, 0],
            Face::L => [-1, 0, 0],
            Face::B => [0, 0, -1],
        }
    }

    pub fn opposite(self) -> Face {
        match self {
            Face::U => Face::D,
            Face::R => Face::L,
            Face::F => Face::B,
            Face::D => Face::U,
            Face::L => Face::R,
            Face::B => Face::F,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Power {
    /// Clockwise quarter turn, seen from the face.
    Quarter,
    Half,
    /// Counter-clockwise quarter turn.
    Inverse,
}

impl Power {
    pub const ALL: [Power; 3] = [Power::Quarter, Power::Half, Power::Inverse];

    pub fn inverse(self) -> Power {
        match self {
            Power::Quarter => Power::Inverse,
            Power::Half => Power::Half,
            Power::Inverse => Power::Quarter,
        }
    }

    /// Number of clockwise quarter turns.
    pub fn quarters(self) -> usize {
        match self {
            Power::Quarter => 1,
            Power::Half => 2,
            Power::Inverse => 3,
        }
    }
}

/// A single layer turn. `layer` counts from the named face, 1 being the
/// outer layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Move {
    pub face: Face,
    pub layer: u8,
    pub power: Power,
}

impl Move {
    pub const fn new(face: Face, layer: u8, power: Power) -> Self {
        Move { face, layer, power }
    }

    pub const fn outer(face: Face, power: Power) -> Self {
        Move { face, layer: 1, power }
    }

    pub fn inverse(self) -> Move {
        Move { power: self.power.inverse(), ..self }
    }

    /// Same face and layer, so the two turns would merge.
    pub fn same_face_layer(self, other: Move) -> bool {
        self.face == other.face && self.layer == other.layer
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.layer > 1 {
            write!(f, "{}", self.layer)?;
        }
        write!(f, "{}", self.face.letter())?;
        match self.power {
            Power::Quarter => Ok(()),
            Power::Half => f.write_str("2"),
            Power::Inverse => f.write_str("'"),
        }
    }
}

impl FromStr for Move {
    type Err = Error;

    /// Singmaster notation: `U`, `U'`, `U2`, and `2U` / `2U'` / `2U2` for
    /// the second layer.
    fn from_str(s: &str) -> Result<Move> {
        let bad = || Error::BadMove(s.to_string());
        let s = s.trim();
        let digits = s.chars().take_while(|c| c.is_ascii_digit()).count();
        let layer: u8 = if digits == 0 { 1 } else { s[..digits].parse().map_err(|_| bad())? };
        if layer == 0 {
            return Err(bad());
        }
        let mut rest = s[digits..].chars();
        let face = rest.next().and_then(Face::from_letter).ok_or_else(bad)?;
        let power = match rest.as_str() {
            "" => Power::Quarter,
            "2" | "2'" => Power::Half,
            "'" => Power::Inverse,
            _ => return Err(bad()),
        };
        Ok(Move { face, layer, power })
    }
}

/// Ordered list of moves, applied left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoveSequence(pub Vec<Move>);

impl MoveSequence {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Move> {
        self.0.iter()
    }

    /// The sequence that undoes this one.
    pub fn inverse(&self) -> MoveSequence {
        MoveSequence(self.0.iter().rev().map(|m| m.inverse()).collect())
    }

    pub fn repeat(&self, times: usize) -> MoveSequence {
        MoveSequence(self.0.repeat(times))
    }
}

impl From<Vec<Move>> for MoveSequence {
    fn from(v: Vec<Move>) -> Self {
        Self(v)
    }
}

impl<'a> IntoIterator for &'a MoveSequence {
    type Item = &'a Move;
    type IntoIter = std::slice::Iter<'a, Move>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for MoveSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromStr for MoveSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split_whitespace().map(str::parse).collect::<Result<Vec<_>>>().map(MoveSequence)
    }
}
