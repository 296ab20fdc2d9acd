/*! Resource budgets for potentially explosive computations.

Free constructions, closures, and searches can blow up on small inputs.
Every such operation takes a [`Budget`] and returns a [`BudgetExceeded`]
error instead of running away. Budgets never change answers: a computation
that finishes within budget computes the same result under a larger one.
*/

use std::fmt;

use thiserror::Error;

/// Default bound on cells in a single subdivision or arrangement.
pub const DEFAULT_MAX_CELLS: usize = 256;
/// Default bound on the length of composites in free categories.
pub const DEFAULT_MAX_PATH: usize = 24;
/// Default bound on materialized squares (and morphism classes) in closures.
pub const DEFAULT_MAX_SQUARES: usize = 20_000;

/// Environment variable overriding [`DEFAULT_MAX_CELLS`].
pub const ENV_MAX_CELLS: &str = "DBLCAT_MAX_CELLS";
/// Environment variable overriding [`DEFAULT_MAX_PATH`].
pub const ENV_MAX_PATH: &str = "DBLCAT_MAX_PATH";
/// Environment variable overriding [`DEFAULT_MAX_SQUARES`].
pub const ENV_MAX_SQUARES: &str = "DBLCAT_MAX_SQUARES";

/// The resource a budget bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resource {
    /// Cells of a subdivision or arrangement.
    Cells,
    /// Length of a composite path of generators.
    Path,
    /// Materialized squares or morphism classes in a closure.
    Squares,
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resource::Cells => write!(f, "cells"),
            Resource::Path => write!(f, "path length"),
            Resource::Squares => write!(f, "squares"),
        }
    }
}

/// A computation hit its resource bound before finishing.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("budget exceeded: {resource} limit {limit} reached{}", context.as_deref().map(|c| format!(" while {c}")).unwrap_or_default())]
pub struct BudgetExceeded {
    /// Which bound was hit.
    pub resource: Resource,
    /// The bound in force.
    pub limit: usize,
    /// What the computation was doing, for error messages.
    pub context: Option<String>,
}

/// Bounds for free constructions, closures, and searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Most cells allowed in one subdivision or arrangement.
    pub max_cells: usize,
    /// Longest composite of generators materialized in a free category.
    pub max_path: usize,
    /// Most squares (or morphism classes) materialized in a closure.
    pub max_squares: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_cells: DEFAULT_MAX_CELLS,
            max_path: DEFAULT_MAX_PATH,
            max_squares: DEFAULT_MAX_SQUARES,
        }
    }
}

impl Budget {
    /// The built-in defaults, with any environment overrides applied.
    ///
    /// Reads `DBLCAT_MAX_CELLS`, `DBLCAT_MAX_PATH`, and `DBLCAT_MAX_SQUARES`;
    /// unset or unparsable variables fall back to the built-in values.
    pub fn from_env() -> Self {
        fn read(var: &str, fallback: usize) -> usize {
            std::env::var(var)
                .ok()
                .and_then(|v| v.parse().ok())
                .unwrap_or(fallback)
        }
        Budget {
            max_cells: read(ENV_MAX_CELLS, DEFAULT_MAX_CELLS),
            max_path: read(ENV_MAX_PATH, DEFAULT_MAX_PATH),
            max_squares: read(ENV_MAX_SQUARES, DEFAULT_MAX_SQUARES),
        }
    }

    /// Fail if `n` cells exceed the cell bound.
    pub fn charge_cells(&self, n: usize, context: &str) -> Result<(), BudgetExceeded> {
        if n > self.max_cells {
            Err(BudgetExceeded {
                resource: Resource::Cells,
                limit: self.max_cells,
                context: Some(context.to_string()),
            })
        } else {
            Ok(())
        }
    }

    /// Fail if a path of length `n` exceeds the path bound.
    pub fn charge_path(&self, n: usize, context: &str) -> Result<(), BudgetExceeded> {
        if n > self.max_path {
            Err(BudgetExceeded {
                resource: Resource::Path,
                limit: self.max_path,
                context: Some(context.to_string()),
            })
        } else {
            Ok(())
        }
    }

    /// Fail if `n` materialized squares or classes exceed the square bound.
    pub fn charge_squares(&self, n: usize, context: &str) -> Result<(), BudgetExceeded> {
        if n > self.max_squares {
            Err(BudgetExceeded {
                resource: Resource::Squares,
                limit: self.max_squares,
                context: Some(context.to_string()),
            })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_positive() {
        let b = Budget::default();
        assert!(b.max_cells > 0 && b.max_path > 0 && b.max_squares > 0);
    }

    #[test]
    fn charge_reports_resource_and_limit() {
        let b = Budget { max_cells: 4, max_path: 2, max_squares: 8 };
        assert!(b.charge_cells(4, "gluing").is_ok());
        let err = b.charge_cells(5, "gluing").unwrap_err();
        assert_eq!(err.resource, Resource::Cells);
        assert_eq!(err.limit, 4);
        let msg = err.to_string();
        assert!(msg.contains("cells") && msg.contains('4') && msg.contains("gluing"));
    }
}
