//! Desk-scale singular spaces: warped-product cones and spindles over
//! homogeneous links, their curvature, and conformal changes.

pub mod conformal;
pub mod curvature;
pub mod link;
pub mod space;
pub mod strata;
pub mod warp;

pub use conformal::{
    conformal_scal, cylinder_quotient, cylinder_transform, delta_normalization, normalize_tip, window_quotient,
    CylinderPicture, NormalizationResult, XiMap,
};
pub use curvature::{conic_coefficients, default_window, CurvatureExpansion};
pub use link::{LinkSpec, SpectrumEntry};
pub use space::{scal_profile, ConeSpace};
pub use strata::{admissibility, admissibility_with_tol, local_yamabe_model, Admissibility, LocalModel, ModelKind, StratumData};
pub use warp::{SampledWarp, Stencil, Tip, WarpJet, WarpProfile};
