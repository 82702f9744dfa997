use anyhow::Result;
use edgesheet::boundary::{boundary_data, edge_equation_residual};
use edgesheet::catalog::{helicoid, planar_hole, sign_change};
use edgesheet::dynamics::rotating_orbit_omega;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::output::{num, CsvTable, Run, SCHEMA_VERSION};
use crate::{Common, Usage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScanKind {
    /// Edge residual of the planar hole against its radius.
    Hole,
    /// Rotating-orbit angular velocity against mu0 / mub.
    Orbit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub schema_version: u32,
    pub kind: ScanKind,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    #[serde(default = "one")]
    pub mu0: f64,
    #[serde(default = "two")]
    pub mub: f64,
    /// Orbit radius (orbit scans).
    #[serde(default = "one")]
    pub radius: f64,
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

pub struct ScanFlags {
    pub kind: ScanKind,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub mu0: Option<f64>,
    pub mub: Option<f64>,
    pub radius: Option<f64>,
}

impl ScanSpec {
    pub fn from_flags(f: ScanFlags) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: f.kind,
            from: f.from,
            to: f.to,
            steps: f.steps,
            mu0: f.mu0.unwrap_or_else(one),
            mub: f.mub.unwrap_or_else(two),
            radius: f.radius.unwrap_or_else(one),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.from.is_finite() && self.to.is_finite() && self.from < self.to && self.steps >= 2;
        if !ok {
            return Err(Usage(format!(
                "empty scan range: need from < to and steps >= 2 (from = {}, to = {}, steps = {})",
                self.from, self.to, self.steps
            ))
            .into());
        }
        if !(self.mu0 > 0.0 && self.mub > 0.0 && self.radius > 0.0) {
            return Err(Usage("mu0, mub and radius must be positive".into()).into());
        }
        Ok(())
    }

    fn parameter(&self, i: usize) -> f64 {
        self.from + (self.to - self.from) * i as f64 / (self.steps - 1) as f64
    }
}

/// One scan point: named values, or the failure message.
type Point = std::result::Result<Vec<f64>, String>;

fn hole_point(spec: &ScanSpec, rho: f64) -> Point {
    let entry = planar_hole(rho, spec.mu0, spec.mub).map_err(|e| e.to_string())?;
    let bd = boundary_data(entry.boundaries[0].boundary.as_ref(), &[0.0]).map_err(|e| e.to_string())?;
    Ok(vec![bd.edge_trace, edge_equation_residual(&bd, spec.mu0, spec.mub)])
}

fn orbit_point(spec: &ScanSpec, q: f64) -> Point {
    let r = spec.radius;
    let omega = rotating_orbit_omega(q, 1.0, r).map_err(|e| e.to_string())?;
    let entry = helicoid(omega, r, spec.mu0).map_err(|e| e.to_string())?;
    let (mu0, mub) = entry.tensions().ok_or("orbit entry has no tensions")?;
    let cb = &entry.boundaries[0];
    let bd = boundary_data(cb.boundary.as_ref(), &cb.domain.at(&[0.5])).map_err(|e| e.to_string())?;
    Ok(vec![omega, omega * r, edge_equation_residual(&bd, mu0, mub)])
}

/// Returns whether every point succeeded.
pub fn run(spec: ScanSpec, common: &Common) -> Result<bool> {
    spec.validate()?;
    let mut out = Run::start(&common.out_dir, common.force, "scan", json!({ "command": "scan", "spec": spec }))?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(common.threads.unwrap_or(0)).build()?;
    let params: Vec<f64> = (0..spec.steps).map(|i| spec.parameter(i)).collect();
    let points: Vec<Point> = pool.install(|| {
        params
            .par_iter()
            .map(|&p| match spec.kind {
                ScanKind::Hole => hole_point(&spec, p),
                ScanKind::Orbit => orbit_point(&spec, p),
            })
            .collect()
    });

    let columns: &[&str] = match spec.kind {
        ScanKind::Hole => &["rho", "edge_trace", "edge_residual"],
        ScanKind::Orbit => &["mu0_over_mub", "omega", "omega_r", "edge_residual"],
    };
    let mut header = columns.to_vec();
    header.push("status");
    let mut table = CsvTable::new(&header);
    let mut failures = 0;
    for (p, point) in params.iter().zip(&points) {
        let mut row = vec![num(*p)];
        match point {
            Ok(values) => {
                row.extend(values.iter().map(|&v| num(v)));
                row.push("ok".into());
            }
            Err(msg) => {
                failures += 1;
                row.extend(std::iter::repeat_n(String::new(), columns.len() - 1));
                row.push(format!("failed: {msg}"));
            }
        }
        table.row(row);
    }
    out.write("scan.csv", &table.into_bytes())?;

    let good: Vec<(f64, &Vec<f64>)> =
        params.iter().zip(&points).filter_map(|(&p, r)| r.as_ref().ok().map(|v| (p, v))).collect();
    let summary = match spec.kind {
        ScanKind::Hole => {
            let samples: Vec<(f64, f64)> = good.iter().map(|(p, v)| (*p, v[1])).collect();
            let bracket = sign_change(&samples);
            if let Some((lo, hi)) = bracket {
                println!("edge residual changes sign in [{lo}, {hi}]");
            }
            json!({ "failures": failures, "critical_radius": spec.mub / spec.mu0, "sign_change": bracket })
        }
        ScanKind::Orbit => {
            let monotone = good.windows(2).all(|w| w[1].1[0] > w[0].1[0]);
            let max_speed = good.iter().map(|(_, v)| v[1]).fold(f64::NAN, f64::max);
            json!({ "failures": failures, "omega_monotone": monotone, "max_omega_r": max_speed })
        }
    };
    out.finish(json!({ "event": if failures == 0 { "completed" } else { "point_failures" } }), summary)?;
    Ok(failures == 0)
}

