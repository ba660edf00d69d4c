//! Budgeted searches on Kneser graphs: independence number, chromatic bounds,
//! a randomized search for large EKR sets outside the extremal families, and
//! incidence counts around heavy solids.
//!
//! All searches split their work into a fixed set of independent pieces, so
//! results do not depend on the number of threads. Only the wall-clock limit
//! can make two runs differ.

mod chromatic;
mod falsifier;
mod incidence;
mod mis;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::FamilyError;
use crate::geometry::GeometryError;
use crate::kneser::KneserError;

pub use chromatic::{chromatic_bounds, dsatur, greedy_clique, kneser_chromatic_bounds, Certificate, ChromaticReport};
pub use falsifier::{hm_falsifier, FalsifierReport};
pub use incidence::{
    heaviest_solid_on_plane, heavy_solid_check, lines_through_meeting, HeavySolid, HeavySolidInstance, HypothesisCheck,
};
pub use mis::{independence_number, kneser_independence_number, known_seeds, MisReport};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Graph(#[from] KneserError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
    #[error("unsupported flag type: {0}")]
    UnsupportedType(String),
    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),
    #[error("seed set is not independent: vertices {0} and {1} are adjacent")]
    DependentSeed(u32, u32),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Limits shared by all searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Branch-and-bound nodes, or restarts for the falsifier.
    pub max_nodes: u64,
    pub max_seconds: f64,
    pub threads: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 1_000_000,
            max_seconds: 600.0,
            threads: 1,
            seed: 0,
        }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.max_nodes == 0 {
            return Err(SearchError::InvalidBudget("max_nodes must be positive".into()));
        }
        if self.max_seconds.is_nan() || self.max_seconds <= 0.0 {
            return Err(SearchError::InvalidBudget("max_seconds must be positive".into()));
        }
        if self.threads == 0 {
            return Err(SearchError::InvalidBudget("threads must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn deadline(&self, start: Instant) -> Instant {
        start + Duration::from_secs_f64(self.max_seconds.min(1e9))
    }

    pub(crate) fn pool(&self) -> Result<rayon::ThreadPool, SearchError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| SearchError::ThreadPool(e.to_string()))
    }
}
