//! Computer-assisted half of the 7-vertex argument: every pattern that
//! survives the degree filter and the Cycle Rule at all seven vertices has a
//! vertex whose whole star is external.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::patterns::{
    conclusion_check, enumerate_patterns, passes_degree_filter, vertex_cycle_rule, EdgePattern,
    K7_VERTICES,
};
use super::triangulation::Triangulation;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    /// Some vertex has more than 3 internal edges.
    Degree,
    /// The Cycle Rule fails at this vertex (first failing vertex reported).
    CycleRule(usize),
    Survivor,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Stage::Degree => write!(f, "degree"),
            Stage::CycleRule(q) => write!(f, "cycle:{q}"),
            Stage::Survivor => write!(f, "survivor"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternOutcome {
    pub id: usize,
    pub pattern: EdgePattern,
    pub stage: Stage,
    pub witness: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullLemmaReport {
    pub total_patterns: usize,
    pub after_degree_filter: usize,
    pub survivors: Vec<EdgePattern>,
    pub survivor_witness: Vec<usize>,
    pub automorphism_group_order: usize,
    /// Survivors are exactly the normalised members of one automorphism orbit.
    pub survivors_form_one_orbit: bool,
    #[serde(skip)]
    pub outcomes: Vec<PatternOutcome>,
}

pub fn classify_pattern(t: &Triangulation, p: &EdgePattern) -> Stage {
    if !passes_degree_filter(p) {
        return Stage::Degree;
    }
    match (0..K7_VERTICES).find(|&q| !vertex_cycle_rule(t, p, q)) {
        Some(q) => Stage::CycleRule(q),
        None => Stage::Survivor,
    }
}

/// Enumerate, filter, apply the Cycle Rule, and check the conclusion.
///
/// Patterns are processed data-parallel; results are collected in canonical
/// order, so the report does not depend on the thread count.
pub fn prove_hull_lemma() -> Result<HullLemmaReport> {
    let t = Triangulation::moebius();
    let patterns = enumerate_patterns();
    let outcomes: Vec<PatternOutcome> = patterns
        .into_par_iter()
        .enumerate()
        .map(|(id, pattern)| {
            let stage = classify_pattern(&t, &pattern);
            let witness = match stage {
                Stage::Survivor => conclusion_check(&t, &pattern),
                _ => None,
            };
            PatternOutcome {
                id,
                pattern,
                stage,
                witness,
            }
        })
        .collect();

    let after_degree_filter = outcomes.iter().filter(|o| o.stage != Stage::Degree).count();
    let mut survivors = Vec::new();
    let mut survivor_witness = Vec::new();
    for o in outcomes.iter().filter(|o| o.stage == Stage::Survivor) {
        let w = o.witness.ok_or_else(|| {
            Error::InternalInconsistency(format!(
                "survivor {} ({}) has no witness vertex",
                o.id, o.pattern
            ))
        })?;
        survivors.push(o.pattern.clone());
        survivor_witness.push(w);
    }

    let automorphisms = t.automorphisms();
    let survivors_form_one_orbit = match survivors.first() {
        Some(first) => {
            let mut orbit: Vec<EdgePattern> = automorphisms
                .iter()
                .map(|perm| first.relabel(perm))
                .filter(EdgePattern::contains_normalizing_edge)
                .collect();
            orbit.sort();
            orbit.dedup();
            orbit == survivors
        }
        None => false,
    };

    Ok(HullLemmaReport {
        total_patterns: outcomes.len(),
        after_degree_filter,
        survivors,
        survivor_witness,
        automorphism_group_order: automorphisms.len(),
        survivors_form_one_orbit,
        outcomes,
    })
}

/// Line-oriented proof log: `<id> <6 edges> <stage> [w=<vertex>]` per
/// pattern, then a summary block.
pub fn proof_log(report: &HullLemmaReport) -> String {
    let mut out = String::with_capacity(report.outcomes.len() * 40);
    for o in &report.outcomes {
        out.push_str(&format!("{:05} {} {}", o.id, o.pattern, o.stage));
        if let Some(w) = o.witness {
            out.push_str(&format!(" w={w}"));
        }
        out.push('\n');
    }
    out.push_str("# summary\n");
    out.push_str(&format!("total_patterns {}\n", report.total_patterns));
    out.push_str(&format!(
        "after_degree_filter {}\n",
        report.after_degree_filter
    ));
    out.push_str(&format!("survivors {}\n", report.survivors.len()));
    for (p, w) in report.survivors.iter().zip(&report.survivor_witness) {
        out.push_str(&format!("survivor {p} witness {w}\n"));
    }
    out.push_str(&format!(
        "automorphism_group_order {}\n",
        report.automorphism_group_order
    ));
    out.push_str(&format!(
        "survivors_form_one_orbit {}\n",
        report.survivors_form_one_orbit
    ));
    out
}
