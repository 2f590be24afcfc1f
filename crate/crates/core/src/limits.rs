//! Enumeration budgets and the three-valued verdict used when a budget blocks a decision.

use serde::Serialize;

use crate::error::{GgtError, Result};

/// Size caps for exhaustive searches. `uniform` replaces every cap when set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    pub end: usize,
    pub aut: usize,
    pub tspace: usize,
    pub topology: usize,
    pub powerset_end: usize,
    pub powerset: usize,
    pub hom: usize,
    pub maps: usize,
    /// Largest member set whose submonoids or subgroups are enumerated.
    pub substructures: usize,
    pub uniform: Option<usize>,
}

/// Topology enumeration never goes past this many points.
pub const TOPOLOGY_CEILING: usize = 5;

impl Default for Budget {
    fn default() -> Self {
        Budget {
            end: 8,
            aut: 10,
            tspace: 12,
            topology: 4,
            powerset_end: 3,
            powerset: 4,
            hom: 3,
            maps: 1 << 20,
            substructures: 24,
            uniform: None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Cap {
    End,
    Aut,
    TSpace,
    Topology,
    PowersetEnd,
    Powerset,
    Hom,
    Maps,
    Substructures,
}

impl Budget {
    pub fn uniform(n: usize) -> Self {
        Budget {
            uniform: Some(n),
            ..Budget::default()
        }
    }

    /// Reads `GGT_BUDGET`; a malformed value is a usage error.
    pub fn from_env() -> Result<Self> {
        match std::env::var("GGT_BUDGET") {
            Ok(v) => v
                .trim()
                .parse()
                .map(Budget::uniform)
                .map_err(|_| GgtError::usage(format!("GGT_BUDGET must be a number, got {v:?}"))),
            Err(_) => Ok(Budget::default()),
        }
    }

    pub fn limit(&self, cap: Cap) -> usize {
        let base = match cap {
            Cap::End => self.end,
            Cap::Aut => self.aut,
            Cap::TSpace => self.tspace,
            Cap::Topology => self.topology,
            Cap::PowersetEnd => self.powerset_end,
            Cap::Powerset => self.powerset,
            Cap::Hom => self.hom,
            Cap::Maps => self.maps,
            Cap::Substructures => self.substructures,
        };
        let v = match (cap, self.uniform) {
            (Cap::Maps | Cap::Substructures, Some(u)) => base.max(u),
            (_, Some(u)) => u,
            _ => base,
        };
        match cap {
            Cap::Topology => v.min(TOPOLOGY_CEILING),
            _ => v,
        }
    }

    /// Errors with the exceeded bound when `actual` is above the cap.
    pub fn check(&self, cap: Cap, what: &str, actual: usize) -> Result<()> {
        let limit = self.limit(cap);
        if actual > limit {
            Err(GgtError::budget(what, limit, actual))
        } else {
            Ok(())
        }
    }

    pub fn allows(&self, cap: Cap, actual: usize) -> bool {
        actual <= self.limit(cap)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tri {
    True,
    False,
    Indeterminate,
}

impl Tri {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }

    pub fn is_true(self) -> bool {
        self == Tri::True
    }

    pub fn decided(self) -> Option<bool> {
        match self {
            Tri::True => Some(true),
            Tri::False => Some(false),
            Tri::Indeterminate => None,
        }
    }
}
