//! Unified-transform solver for the initial-boundary value problem of
//! u_y + (u_xxx - 3i(u u_x)_x - 3u^2 u_x)/2 = 0 for x >= 0, y in [0, L].

pub mod contour;
pub mod data;
pub mod direct;
pub mod error;
pub mod field;
pub mod formats;
pub mod lax_pair;
pub mod linalg;
mod ode;
pub mod spectral;
pub mod quadrature;
pub mod rhp;
pub mod reconstruction;
pub mod oracle;
pub mod pipeline;

pub use contour::{build_contour, classify, theta, Contour, Location, Phase, Sector, SpectralPoint};
pub use data::{BoundaryData, InitialData, SampledBoundary, SampledInitial, StepData, ZeroInitial};
pub use direct::{compute_ab, compute_big_ab, oracle_ab_piecewise_constant, AbRoute, EigenfunctionTrace, TraceKind};
pub use error::{Error, Result, Severity};
pub use field::{Axis, BoundaryProfiles, FieldGrid, Profile};
pub use formats::{read_field, read_profile, read_table, write_atomic, Report};
pub use linalg::{Matrix2, C64};
pub use ode::IntegratorOptions;
pub use oracle::{compatibility_check, evolve, evolve_fn, extract_traces, manufactured_study, ConvergenceLevel, CornerReport, Manufactured, OracleParams, OracleRun, Scheme, Traces};
pub use reconstruction::{reconstruct_boundary, reconstruct_h_l, reconstruct_u, BoundaryFormula, ReconstructionField};
