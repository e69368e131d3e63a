use serde::{Deserialize, Serialize};

/// Outcome of a numerical predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    True,
    False,
    Inconclusive,
}

impl Status {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Status::True
        } else {
            Status::False
        }
    }

    /// Decide `value > 0` with a dead band of half-width `band`.
    pub fn from_margin(value: f64, band: f64) -> Self {
        if value > band {
            Status::True
        } else if value < -band {
            Status::False
        } else {
            Status::Inconclusive
        }
    }

    pub fn is_true(self) -> bool {
        self == Status::True
    }

    pub fn is_false(self) -> bool {
        self == Status::False
    }

    pub fn is_decided(self) -> bool {
        self != Status::Inconclusive
    }

    /// Logical and; `False` dominates `Inconclusive`.
    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::False, _) | (_, Status::False) => Status::False,
            (Status::True, Status::True) => Status::True,
            _ => Status::Inconclusive,
        }
    }

    pub fn not(self) -> Status {
        match self {
            Status::True => Status::False,
            Status::False => Status::True,
            Status::Inconclusive => Status::Inconclusive,
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::True => "true",
            Status::False => "false",
            Status::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}
