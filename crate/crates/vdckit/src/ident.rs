//! Structural identifiers.
//!
//! Everything in the toolkit — objects, tight and loose morphisms, cells —
//! is named by an [`Ident`]: a finite tree of atoms, naturals and lists.
//! Identifiers from table-backed structures are usually atoms; identifiers
//! of derived structures (monads, modules, exponential cells, ...) are
//! lists built from the identifiers of their components, so equality and
//! ordering are structural and deterministic.

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ident {
    Atom(String),
    Nat(u64),
    List(Vec<Ident>),
}

impl Ident {
    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Ident::Atom(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Ident::Nat(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Ident]> {
        match self {
            Ident::List(xs) => Some(xs),
            _ => None,
        }
    }

    /// For `List([Atom(tag), rest...])` returns `(tag, rest)`.
    pub fn untag(&self) -> Option<(&str, &[Ident])> {
        match self {
            Ident::List(xs) => match xs.split_first() {
                Some((Ident::Atom(t), rest)) => Some((t, rest)),
                _ => None,
            },
            _ => None,
        }
    }
}

pub fn atom(s: impl Into<String>) -> Ident {
    Ident::Atom(s.into())
}

pub fn nat(n: usize) -> Ident {
    Ident::Nat(n as u64)
}

pub fn list(xs: Vec<Ident>) -> Ident {
    Ident::List(xs)
}

/// `List([Atom(tag), parts...])`, the conventional shape for derived names.
pub fn tagged(tag: &str, parts: Vec<Ident>) -> Ident {
    let mut xs = Vec::with_capacity(parts.len() + 1);
    xs.push(atom(tag));
    xs.extend(parts);
    Ident::List(xs)
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ident::Atom(s) => write!(f, "{s}"),
            Ident::Nat(n) => write!(f, "{n}"),
            Ident::List(xs) => {
                write!(f, "[")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
        }
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// JSON encoding: atoms are strings, naturals are numbers, lists are arrays.
impl Serialize for Ident {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Ident::Atom(s) => serializer.serialize_str(s),
            Ident::Nat(n) => serializer.serialize_u64(*n),
            Ident::List(xs) => {
                let mut seq = serializer.serialize_seq(Some(xs.len()))?;
                for x in xs {
                    seq.serialize_element(x)?;
                }
                seq.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Ident {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Ident;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a string, non-negative integer, or array identifier")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Ident, E> {
                Ok(Ident::Atom(v.to_owned()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Ident, E> {
                Ok(Ident::Nat(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Ident, E> {
                if v < 0 {
                    Err(E::custom("negative identifier"))
                } else {
                    Ok(Ident::Nat(v as u64))
                }
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Ident, A::Error> {
                let mut xs = Vec::new();
                while let Some(x) = seq.next_element()? {
                    xs.push(x);
                }
                Ok(Ident::List(xs))
            }
        }
        deserializer.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_structural() {
        assert!(atom("a") < atom("b"));
        assert!(atom("z") < Ident::Nat(0));
        assert!(nat(1) < list(vec![]));
        assert!(list(vec![nat(0)]) < list(vec![nat(0), nat(0)]));
    }

    #[test]
    fn json_round_trip() {
        let x = tagged("sp", vec![nat(2), nat(1), list(vec![nat(0), nat(0)])]);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"["sp",2,1,[0,0]]"#);
        let y: Ident = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }
}
