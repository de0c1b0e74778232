use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use super::TrajectoryRecord;

/// One row per step with the belief expanded into `belief_1..belief_n`.
pub fn trajectory_csv(record: &TrajectoryRecord) -> String {
    let n = record
        .steps
        .first()
        .map_or(record.final_belief.len(), |s| s.belief.len());
    let mut out = String::from("step,true_state,action,observation");
    for i in 1..=n {
        let _ = write!(out, ",belief_{i}");
    }
    out.push_str(",stage_cost,discounted_cumulative\n");
    for s in &record.steps {
        let _ = write!(
            out,
            "{},{},{},{}",
            s.step, s.true_state, s.action, s.observation
        );
        for b in &s.belief {
            let _ = write!(out, ",{b}");
        }
        let _ = writeln!(out, ",{},{}", s.stage_cost, s.discounted_cumulative);
    }
    out
}

pub fn write_trajectory_csv(record: &TrajectoryRecord, path: impl AsRef<Path>) -> io::Result<()> {
    fs::write(path, trajectory_csv(record))
}
