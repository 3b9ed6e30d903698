//! Batch front end: parse a JSON job, run one library operation, emit a deterministic report.

pub mod dispatch;
pub mod job;
pub mod report;

use std::time::Instant;

use crate::dispatch::dispatch;
use crate::job::{parse_job, Params};
use crate::report::Report;

/// Overrides applied on top of the job file's parameters.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub length_bound: Option<usize>,
    pub degree_bound: Option<u32>,
    pub budget: Option<usize>,
}

impl Overrides {
    fn apply(&self, p: &mut Params) {
        if let Some(s) = self.seed {
            p.seed = s;
        }
        if let Some(l) = self.length_bound {
            p.length_bound = l;
        }
        if let Some(d) = self.degree_bound {
            p.degree_bound = d;
        }
        if let Some(b) = self.budget {
            p.budget = b;
        }
    }
}

fn error_kind(e: &exalg::error::Error) -> &'static str {
    use exalg::error::Error::*;
    match e {
        NonDominant(_) => "non_dominant",
        GroupMismatch => "group_mismatch",
        RankMismatch { .. } => "rank_mismatch",
        NotAVirtualCharacter => "not_a_virtual_character",
        VirtualCharacter => "virtual_character",
        InfiniteOrder { .. } => "infinite_order",
        NotRootAutomorphism => "not_root_automorphism",
        IncompatibleAutomorphism(_) => "incompatible_automorphism",
        NotPhiFixed => "not_phi_fixed",
        IntertwinerInconsistent { .. } => "intertwiner_inconsistent",
        DimensionMismatch { .. } => "dimension_mismatch",
        NonInvertible(_) => "non_invertible",
        RelatorViolation(_) => "relator_violation",
        InvalidInput(_) => "invalid_input",
        Internal(_) => "internal",
    }
}

/// Parses and runs a job document; never panics on bad input.
pub fn run_job(text: &str, overrides: &Overrides, wall_clock: bool) -> Report {
    let start = Instant::now();
    let mut job = match parse_job(text) {
        Ok(j) => j,
        Err(e) => {
            let command = serde_json::from_str::<serde_json::Value>(text)
                .ok()
                .and_then(|v| v.get("command").and_then(|c| c.as_str()).map(str::to_string))
                .unwrap_or_default();
            return Report::failure(&command, None, "schema", e.message, Some(e.path));
        }
    };
    overrides.apply(&mut job.params);
    let mut report = match dispatch(&job) {
        Ok(outcome) => Report::success(&job.command, job.params, outcome),
        Err(e) => Report::failure(&job.command, Some(job.params), error_kind(&e), e.to_string(), None),
    };
    if wall_clock {
        report.timing = Some(serde_json::json!({ "elapsed_ms": start.elapsed().as_millis() as u64 }));
    }
    report
}
