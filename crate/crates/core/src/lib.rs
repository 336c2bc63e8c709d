//! High-order forward-backward envelopes (HiFBE), splitting maps (HiFBS) and
//! the associated descent iteration (HiFBA) for composite objectives
//! `φ = f + g` with a Hölder-continuous `∇f`.
//!
//! For an order `p > 1` and parameter `γ > 0`,
//!
//! ```text
//! T(x)    = argmin_y  f(x) + <∇f(x), y - x> + g(y) + ‖x - y‖^p / (pγ)
//! φ_γ(x)  = the optimal value of the same problem
//! ```
//!
//! One-dimensional subproblems are solved globally on a bracketed grid with
//! golden-section refinement; a registry of closed forms covers `g ≡ 0`,
//! interval indicators and the `p = 2` forward-backward composition.

pub mod algo;
pub mod analysis;
pub mod catalog;
pub mod envelope;
pub mod error;
pub mod ext;
pub mod fmt;
pub mod golden;
pub mod holder;
pub mod inner;
pub mod linalg;
pub mod oracle;
pub mod prox;
pub mod rng;

pub use algo::{hifba_run, hifba_step, scaled_gradient_check, HifbaTrace, ScaledCheck, StopReason, TraceRecord};
pub use catalog::{problem_catalog_get, CATALOG_IDS};
pub use envelope::{
    candidate_gradient, fd_gradient, forward_value_closed_form, hifbe, hifbs, home, residual, EnvelopeEval,
    GradientReport,
};
pub use error::{Error, Result};
pub use ext::ExtReal;
pub use holder::{estimate_holder_constant, DomainBox};
pub use inner::{model_value, solve_subproblem, EnvelopeConfig, SubproblemSolution};
pub use oracle::{composite_value, CompositeProblem, NonsmoothKind, NonsmoothOracle, SmoothOracle};
pub use prox::{prox_registry_lookup, soft_threshold, AnalyticSolver};
