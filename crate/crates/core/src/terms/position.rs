use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// A position: a sequence of 1-based argument indices; the root is empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(Vec<u32>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: u32) -> Position {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    /// `p.q`
    pub fn concat(&self, q: &Position) -> Position {
        let mut v = self.0.clone();
        v.extend_from_slice(&q.0);
        Position(v)
    }

    pub fn is_prefix_of(&self, q: &Position) -> bool {
        q.0.starts_with(&self.0)
    }

    /// Disjoint positions: neither is a prefix of the other.
    pub fn parallel(&self, q: &Position) -> bool {
        !self.is_prefix_of(q) && !q.is_prefix_of(self)
    }
}

impl From<Vec<u32>> for Position {
    fn from(v: Vec<u32>) -> Self {
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join("."))
    }
}

impl FromStr for Position {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Ok(Position::root());
        }
        s.split('.')
            .map(|part| match part.parse::<u32>() {
                Ok(n) if n >= 1 => Ok(n),
                _ => Err(Error::InvalidPosition(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Position)
    }
}

impl serde::Serialize for Position {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
