//! Combinatorial torus triangulations and the 7-vertex hull prover.

pub mod hull_lemma;
pub mod patterns;
pub mod triangulation;

pub use hull_lemma::{proof_log, prove_hull_lemma, HullLemmaReport, PatternOutcome, Stage};
pub use patterns::{
    classify_triangles, conclusion_check, enumerate_patterns, filter_internal_degree,
    vertex_cycle_rule, EdgePattern, TriangleClassification,
};
pub use triangulation::{Edge, Triangulation, PUP_TENT_SYMMETRY};

pub fn moebius_triangulation() -> Triangulation {
    Triangulation::moebius()
}

pub fn best8_triangulation() -> Triangulation {
    Triangulation::best8()
}
