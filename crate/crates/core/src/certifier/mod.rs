//! Rigorous checks behind the existence of a flat embedded torus near the
//! pup tent: integer separation certificates for robust embedding, the
//! crude second-derivative bound, and the inverse-function chain.

pub mod bounds;
pub mod bundle;
pub mod ift;
pub mod scaled;
pub mod separation;

pub use bounds::{
    crude_bound_certificate, eval_g_bounds, g_values, vector_bounds_check, CrudeBoundReport,
    GBoundsReport, VectorBoundsReport,
};
pub use bundle::{
    build_bundle, format_bundle, parse_bundle, verify_bundle, CertificateBundle, IftFooter,
    VerifyReport,
};
pub use ift::{ift_certificate, ift_from_parts, ChainLink, ExistenceCertificate};
pub use scaled::{
    scale_to_integers, scale_to_integers_with, ScaledIntegerConfig, DEFAULT_SCALE_EXP,
};
pub use separation::{
    certify_robust_embedding, find_separation_disjoint, find_separation_shared, relevant_pairs,
    replay, verify_certificate, SeparationCertificate, SeparationKind, SeparationParams,
};
