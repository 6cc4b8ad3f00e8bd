//! Numerical verification engine for the geometry of statistical manifolds
//! and their lightlike hypersurfaces.
//!
//! The crate builds explicit coordinate models of semi-Riemannian metrics,
//! dual connection pairs, almost contact structures, and lightlike
//! hypersurfaces, and evaluates a catalog of tensor identities at seeded
//! sample points, reporting the residual of every identity instead of
//! assuming it.
//!
//! Layering, bottom to top:
//!
//! * [`expr`] — a tiny closed-form scalar expression language with
//!   forward-mode dual-number evaluation (exact first derivatives).
//! * [`geometry`] — charts, vector fields, one-forms, metrics, and the
//!   pointwise calculus (directional derivatives, Lie brackets).
//! * [`connection`] — affine connections as Christoffel coefficient fields;
//!   Levi-Civita construction, dual connections, difference tensors.
//! * [`contact`] — almost contact metric structures and the Sasakian /
//!   Sasakian-statistical residual suites.
//! * [`lightlike`] — the lightlike hypersurface pipeline: radical, screen,
//!   transversal, Gauss–Weingarten objects for a dual pair, and the
//!   induced-object identity suites.
//! * [`ssi`] — screen semi-invariant structure (U, W, u, w, induced f-structure)
//!   and the associated identity and integrability suites.
//! * [`fixtures`] — the registry of built-in model manifolds plus a
//!   declarative fixture file format.
//! * [`report`] — residual report data model with deterministic JSON output.
//! * [`suites`] — maps suite names to the row catalogs above.

pub mod connection;
pub mod contact;
pub mod expr;
pub mod fixtures;
pub mod geometry;
pub mod lightlike;
pub mod report;
pub mod ssi;
pub mod suites;

mod cache;
mod linalg;

pub use expr::{Dual, Expr};
pub use geometry::{Chart, Metric, OneForm, Sampler, Tensor11, VectorField};
pub use report::{CheckReport, CheckRow, RowStatus, RunConfig};

/// Library error type shared by every layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("domain error in `{context}`: {message}")]
    Domain { context: String, message: String },

    #[error("singular metric at {point:?}: |det| = {det:.3e} below threshold {threshold:.1e}")]
    SingularMetric {
        point: Vec<f64>,
        det: f64,
        threshold: f64,
    },

    #[error("hypersurface is not lightlike at {point:?}: singular values {singular_values:?}")]
    NotLightlike {
        point: Vec<f64>,
        singular_values: Vec<f64>,
    },

    #[error(
        "induced metric degeneracy {deficiency} exceeds 1 at {point:?}: singular values {singular_values:?}"
    )]
    DegeneracyTooHigh {
        deficiency: usize,
        point: Vec<f64>,
        singular_values: Vec<f64>,
    },

    #[error("screen frame is singular at {point:?}: |det| = {det:.3e}")]
    SingularScreen { point: Vec<f64>, det: f64 },

    #[error("no real solution for the transversal at {point:?}: quadratic {a}t^2 + {b}t + {c} = 0")]
    TransversalQuadratic {
        point: Vec<f64>,
        a: f64,
        b: f64,
        c: f64,
    },

    #[error("decomposition failure: {message} (residual {residual:.3e} at {point:?})")]
    Decomposition {
        message: String,
        residual: f64,
        point: Vec<f64>,
    },

    #[error("screen semi-invariance violated: {message} (residual {residual:.3e} at {point:?})")]
    NotScreenSemiInvariant {
        message: String,
        residual: f64,
        point: Vec<f64>,
    },

    #[error("fixture `{fixture}` cannot run suite `{suite}`: {message}")]
    Configuration {
        fixture: String,
        suite: String,
        message: String,
    },

    #[error("fixture schema error: {0}")]
    Schema(String),

    #[error("unknown fixture `{name}`; available: {available:?}")]
    UnknownFixture { name: String, available: Vec<String> },

    #[error("bootstrap validation failed for `{fixture}`: {message} (residual {residual:.3e} at {point:?})")]
    Bootstrap {
        fixture: String,
        message: String,
        residual: f64,
        point: Vec<f64>,
    },

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
