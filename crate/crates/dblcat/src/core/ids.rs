/*! Identifier newtypes for objects, morphisms, and squares.

Identifiers are plain strings. Equality of structures is identity of
identifiers; isomorphism is a separate search. Constructions derive new
identifiers from old ones (pairs, tagged unions), and [`paired`] is the one
shared convention for that.
*/

use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! define_id {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            /// View the identifier as a string slice.
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }

        impl From<&$name> for $name {
            fn from(s: &$name) -> Self {
                s.clone()
            }
        }
    };
}

define_id! {
    /// Identifier of an object.
    ObId
}

define_id! {
    /// Identifier of a morphism in a category, horizontal or vertical.
    MorId
}

define_id! {
    /// Identifier of a square in a double category or derivation scheme.
    SqId
}

/// The shared convention for identifiers of pairs: `(a,b)`.
pub fn paired(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_order_and_display() {
        let a: ObId = "a".into();
        let b: ObId = "b".into();
        assert!(a < b);
        assert_eq!(a.to_string(), "a");
        assert_eq!(paired("x", "y"), "(x,y)");
    }

    #[test]
    fn ids_serialize_transparently() {
        let f: MorId = "f".into();
        assert_eq!(serde_json::to_string(&f).unwrap(), "\"f\"");
        let back: MorId = serde_json::from_str("\"f\"").unwrap();
        assert_eq!(back, f);
    }
}
