//! Batch front end for `ovfree-core`: job files in, JSON reports and tables out.

pub mod job;
pub mod json;
pub mod run;
pub mod suites;
pub mod table;

pub use job::{parse_spec, to_json, Job, JobSpec, SpecErrors};
pub use run::{exit_code, run, Outcome};

/// The report as printed: pretty JSON with sorted keys and a final newline.
pub fn render_json(report: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("JSON values serialize");
    s.push('\n');
    s
}
