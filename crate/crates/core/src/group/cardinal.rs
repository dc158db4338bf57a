use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul};

/// A finite multiplicity or the countable infinity `ω`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cardinal {
    Fin(u64),
    Omega,
}

impl Cardinal {
    pub const ZERO: Cardinal = Cardinal::Fin(0);

    pub fn is_zero(self) -> bool {
        self == Cardinal::ZERO
    }

    pub fn is_infinite(self) -> bool {
        self == Cardinal::Omega
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Cardinal::Fin(k) => Some(k),
            Cardinal::Omega => None,
        }
    }

    /// Whether index `i` addresses an existing copy.
    pub fn admits_index(self, i: u64) -> bool {
        match self {
            Cardinal::Fin(k) => i < k,
            Cardinal::Omega => true,
        }
    }
}

impl Default for Cardinal {
    fn default() -> Self {
        Cardinal::ZERO
    }
}

impl From<u64> for Cardinal {
    fn from(k: u64) -> Self {
        Cardinal::Fin(k)
    }
}

impl Add for Cardinal {
    type Output = Cardinal;
    fn add(self, rhs: Cardinal) -> Cardinal {
        match (self, rhs) {
            (Cardinal::Fin(a), Cardinal::Fin(b)) => {
                Cardinal::Fin(a.checked_add(b).expect("multiplicity overflow"))
            }
            _ => Cardinal::Omega,
        }
    }
}

impl Mul for Cardinal {
    type Output = Cardinal;
    fn mul(self, rhs: Cardinal) -> Cardinal {
        match (self, rhs) {
            (Cardinal::Fin(0), _) | (_, Cardinal::Fin(0)) => Cardinal::ZERO,
            (Cardinal::Fin(a), Cardinal::Fin(b)) => {
                Cardinal::Fin(a.checked_mul(b).expect("multiplicity overflow"))
            }
            _ => Cardinal::Omega,
        }
    }
}

impl fmt::Display for Cardinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinal::Fin(k) => write!(f, "{k}"),
            Cardinal::Omega => write!(f, "w"),
        }
    }
}

impl Serialize for Cardinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cardinal::Fin(k) => s.serialize_u64(*k),
            Cardinal::Omega => s.serialize_str("w"),
        }
    }
}

impl<'de> Deserialize<'de> for Cardinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(k) => Ok(Cardinal::Fin(k)),
            Raw::Text(t) if t == "w" || t == "omega" => Ok(Cardinal::Omega),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad cardinal {t:?}"))),
        }
    }
}
