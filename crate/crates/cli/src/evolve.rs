use anyhow::Result;
use edgesheet::dynamics::{diagnostics, evolve, DynamicsError, SimulationConfig, TerminalEvent, Trajectory};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::output::{num, opt_num, CsvTable, Run};
use crate::{Common, Usage};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSpec {
    pub schema_version: u32,
    pub simulation: SimulationConfig,
}

fn snapshots_csv(tr: &Trajectory) -> Vec<u8> {
    let n = tr.snapshots[0].spacetime_dim();
    let mut header = vec!["t".to_string(), "sigma_index".into()];
    header.extend((0..n).map(|mu| format!("x{mu}")));
    header.extend((0..n).map(|mu| format!("v{mu}")));
    let mut table = CsvTable::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for s in &tr.snapshots {
        for k in 0..s.grid_points() {
            let mut row = vec![num(s.time), k.to_string()];
            row.extend(s.positions.row(k).iter().map(|&x| num(x)));
            row.extend(s.velocities.row(k).iter().map(|&x| num(x)));
            table.row(row);
        }
    }
    table.into_bytes()
}

fn endpoints_csv(tr: &Trajectory) -> Vec<u8> {
    let n = tr.snapshots[0].spacetime_dim();
    let mut header = vec!["t".to_string(), "end".into(), "proper_time".into()];
    header.extend((0..n).map(|mu| format!("x{mu}")));
    header.extend((0..n).map(|mu| format!("u{mu}")));
    header.extend((0..n).map(|mu| format!("eta{mu}")));
    let mut table = CsvTable::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for s in &tr.snapshots {
        for (end, ep) in s.endpoints.iter().enumerate() {
            let mut row = vec![num(s.time), if end == 0 { "left" } else { "right" }.to_string(), num(ep.proper_time)];
            for v in [&ep.position, &ep.four_velocity, &ep.eta] {
                row.extend(v.iter().map(|&x| num(x)));
            }
            table.row(row);
        }
    }
    table.into_bytes()
}

fn diagnostics_csv(tr: &Trajectory) -> Vec<u8> {
    let mut table = CsvTable::new(&[
        "t",
        "constraint_cross",
        "constraint_sum",
        "energy",
        "angular_momentum",
        "accel_left",
        "accel_right",
        "angle_left",
        "angle_right",
        "expected_left",
        "expected_right",
    ]);
    for s in &tr.snapshots {
        let d = diagnostics(s);
        let [l, r] = &d.endpoints;
        table.row([
            num(d.time),
            num(d.constraint_norms.0),
            num(d.constraint_norms.1),
            num(d.total_energy),
            num(d.angular_momentum),
            opt_num(l.acceleration),
            opt_num(r.acceleration),
            opt_num(l.angle),
            opt_num(r.angle),
            num(l.expected),
            num(r.expected),
        ]);
    }
    table.into_bytes()
}

/// Returns whether the run ended without a numerical failure.
pub fn run(spec: EvolveSpec, common: &Common) -> Result<bool> {
    let config = spec.simulation.clone();
    config.validate().map_err(|e| Usage(e.to_string()))?;
    let mut out = Run::start(&common.out_dir, common.force, "evolve", json!({ "command": "evolve", "spec": spec }))?;
    let tr = match evolve(&config) {
        Ok(tr) => tr,
        Err(e @ DynamicsError::InvalidConfig(_)) => return Err(Usage(e.to_string()).into()),
        Err(e) => return Err(e.into()),
    };
    out.write("snapshots.csv", &snapshots_csv(&tr))?;
    out.write("endpoints.csv", &endpoints_csv(&tr))?;
    out.write("diagnostics.csv", &diagnostics_csv(&tr))?;
    let last = tr.last();
    let first = diagnostics(&tr.snapshots[0]);
    let end = diagnostics(last);
    let summary = json!({
        "steps": tr.steps,
        "final_time": last.time,
        "energy_drift": (end.total_energy - first.total_energy).abs() / first.total_energy.abs(),
    });
    out.finish(serde_json::to_value(&tr.event)?, summary)?;
    match tr.event {
        TerminalEvent::ConstraintBlowup { time, norm } => {
            eprintln!("constraint blowup at t = {time}: norm {norm:e}");
            Ok(false)
        }
        TerminalEvent::EndpointCollision { time, .. } => {
            eprintln!("endpoints collided at t = {time}");
            Ok(true)
        }
        TerminalEvent::Completed => Ok(true),
    }
}
