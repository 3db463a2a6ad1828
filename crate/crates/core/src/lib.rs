//! Numerical engine for G₂-structures on seven-dimensional Lie groups with
//! left-invariant data.
//!
//! The layers build on each other:
//!
//! * [`exterior_algebra`]: packed alternating forms, wedge, interior
//!   product, Hodge star and metric contractions in dimension seven;
//! * [`lie_geometry`]: Chevalley–Eilenberg differential, Levi-Civita
//!   connection, curvature and first-order operators (div, curl, ∘);
//! * [`g2_structure`]: positive 3-forms, induced metric, representation
//!   projectors and the maps `i_φ`, `i_ψ`;
//! * [`torsion`]: full torsion tensor, its components and identity suites;
//! * [`laplacian_flows`]: Hodge Laplacians, Laplacian flow and coflows as
//!   ODEs in the 35 coefficients of φ, with monitors and cross-checks.

pub mod error;
pub mod exterior_algebra;
pub mod g2_structure;
pub mod laplacian_flows;
pub mod lie_geometry;
pub mod presets;
pub mod torsion;

pub use error::{Error, Result};
pub use exterior_algebra::{
    form_inner, hodge_star, raise_lower, AltForm, IndexMove, Matrix7, Metric7, Orientation, Tensor, Vector7, DIM,
};
pub use g2_structure::{
    contraction_constants, i_phi, i_psi, metric_from_phi, project_2form, project_3form, project_4form,
    standard_phi, standard_psi, G2Structure, TypeDecomposition,
};
pub use laplacian_flows::{
    flow_rhs, hitchin_volume, integrate, laplacian_direct, laplacian_phi_decomposed, FlowKind, FlowSpec,
    FlowTrace, HaltReason, MonitorRecord,
};
pub use lie_geometry::{ce_differential, curvature, levi_civita, ConnectionData, CurvatureData, LieAlgebraData};
pub use presets::Preset;
pub use torsion::{coclosed_identity_suite, identity_suite, Geometry, ResidualReport, TorsionData};
