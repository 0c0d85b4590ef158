use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::model::{Instance, Placement, Schedule, Time};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementRecord {
    pub job: usize,
    pub op: usize,
    pub machine: usize,
    pub start: Time,
    pub end: Time,
    pub setup: Time,
}

/// Schedule file written by `solve` (JSON, see `docs/output.md`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleDocument {
    pub instance: String,
    pub method: String,
    pub makespan: Time,
    pub placements: Vec<PlacementRecord>,
}

impl ScheduleDocument {
    pub fn new(instance_path: &str, method: &str, instance: &Instance, schedule: &Schedule) -> Self {
        let placements = schedule
            .placements()
            .iter()
            .map(|p| {
                let op = instance.op(p.global_id);
                PlacementRecord {
                    job: op.job_id,
                    op: op.op_index,
                    machine: p.machine,
                    start: p.start,
                    end: p.end,
                    setup: p.setup_applied,
                }
            })
            .collect();
        ScheduleDocument {
            instance: instance_path.to_string(),
            method: method.to_string(),
            makespan: schedule.makespan(),
            placements,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serialises") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Rebuilds the schedule against its instance; fails on unknown `(job, op)` pairs.
    pub fn to_schedule(&self, instance: &Instance) -> Result<Schedule, String> {
        let placements = self
            .placements
            .iter()
            .map(|r| {
                let op = instance
                    .op_at(r.job, r.op)
                    .ok_or_else(|| format!("operation {}.{} does not exist", r.job, r.op))?;
                Ok(Placement {
                    global_id: op.global_id,
                    machine: r.machine,
                    start: r.start,
                    end: r.end,
                    setup_applied: r.setup,
                })
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(Schedule::new(placements))
    }
}

fn job_glyph(job: usize) -> char {
    char::from_digit((job % 36) as u32, 36).expect("base-36 digit")
}

/// Text Gantt chart: one row per machine, one character per time unit.
/// Operations show their job id in base 36, setups `~`, idle time `.`.
pub fn gantt(instance: &Instance, schedule: &Schedule) -> String {
    let width = schedule.makespan() as usize;
    let label = format!("M{}", instance.machine_count().saturating_sub(1)).len();
    let mut out = String::new();
    for machine in 0..instance.machine_count() {
        let mut row = vec!['.'; width];
        for p in schedule.machine_sequence(machine) {
            let setup_from = p.start.saturating_sub(p.setup_applied) as usize;
            for cell in &mut row[setup_from..p.start as usize] {
                *cell = '~';
            }
            let glyph = job_glyph(instance.op(p.global_id).job_id);
            for cell in &mut row[p.start as usize..p.end as usize] {
                *cell = glyph;
            }
        }
        let name = format!("M{machine}");
        writeln!(out, "{name:<label$} |{}|", row.into_iter().collect::<String>()).unwrap();
    }
    out
}
