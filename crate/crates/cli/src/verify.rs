use anyhow::Result;
use edgesheet::boundary::{boundary_condition_residual, boundary_laplacian_residuals};
use edgesheet::catalog::{check_expectations, parse_entry, CatalogEntry, KNOWN_IDS};
use edgesheet::integrability::{
    boundary_integrability_residuals, direct_embedding_residuals, worldsheet_integrability_residuals,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::output::{num, CsvTable, Run, SCHEMA_VERSION};
use crate::{Common, Usage};

/// Samples per axis for catalog expectations.
const EXPECTATION_GRID: usize = 5;
/// Samples per axis for integrability residuals.
const RESIDUAL_GRID: usize = 3;
const FORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    pub schema_version: u32,
    pub entries: Vec<String>,
    /// Tolerance on integrability residuals.
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    1e-6
}

impl VerifySpec {
    pub fn from_flags(entries: Vec<String>, tol: Option<f64>) -> Self {
        let entries = if entries.is_empty() {
            KNOWN_IDS.iter().map(|(id, _)| id.to_string()).collect()
        } else {
            entries
        };
        Self { schema_version: SCHEMA_VERSION, entries, tol: tol.unwrap_or_else(default_tol) }
    }
}

struct Row {
    entry: String,
    quantity: String,
    value: f64,
    expected: f64,
    residual: f64,
    pass: bool,
}

fn residual_row(entry: &str, quantity: String, value: f64, tol: f64) -> Row {
    Row { entry: entry.into(), quantity, value, expected: 0.0, residual: value.abs(), pass: value.abs() <= tol }
}

fn rows_for(selector: &str, entry: &CatalogEntry, tol: f64) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for ev in check_expectations(entry, EXPECTATION_GRID)? {
        rows.push(Row {
            entry: selector.into(),
            quantity: ev.expectation.quantity.name(),
            value: ev.worst_value,
            expected: ev.expectation.value,
            residual: ev.max_deviation,
            pass: ev.passed(),
        });
    }

    let emb = entry.embedding.as_ref();
    let (mut gauss, mut codazzi, mut ricci) = (0.0f64, 0.0f64, None::<f64>);
    for p in entry.domain.grid(RESIDUAL_GRID) {
        let r = worldsheet_integrability_residuals(emb, &p)?;
        gauss = gauss.max(r.gauss);
        codazzi = codazzi.max(r.codazzi);
        if let Some(v) = r.ricci {
            ricci = Some(ricci.unwrap_or(0.0).max(v));
        }
    }
    rows.push(residual_row(selector, "worldsheet.gauss".into(), gauss, tol));
    rows.push(residual_row(selector, "worldsheet.codazzi".into(), codazzi, tol));
    if let Some(v) = ricci {
        rows.push(residual_row(selector, "worldsheet.ricci".into(), v, tol));
    }

    let (mu0, mub) = entry.tensions().unwrap_or((1.0, 1.0));
    for (b, cb) in entry.boundaries.iter().enumerate() {
        let bnd = cb.boundary.as_ref();
        let mut worst = [0.0f64; 8];
        for u in cb.domain.grid(RESIDUAL_GRID) {
            let e = boundary_integrability_residuals(bnd, &u)?;
            let d = direct_embedding_residuals(bnd, &u)?;
            let form = (boundary_condition_residual(bnd, &u)? + boundary_laplacian_residuals(bnd, &u, mu0, mub)?.normal).amax();
            let values = [e.gauss, e.codazzi, d.gauss, d.codazzi, d.ricci, d.twist_tangential, d.twist_mixed, form];
            for (w, v) in worst.iter_mut().zip(values) {
                *w = w.max(v);
            }
        }
        let names = ["edge.gauss", "edge.codazzi", "direct.gauss", "direct.codazzi", "direct.ricci", "direct.twist_tangential", "direct.twist_mixed"];
        for (name, v) in names.iter().zip(worst) {
            rows.push(residual_row(selector, format!("{name}[{b}]"), v, tol));
        }
        rows.push(residual_row(selector, format!("form_equivalence[{b}]"), worst[7], FORM_TOL));
    }
    Ok(rows)
}

/// Returns whether every residual passed.
pub fn run(spec: VerifySpec, common: &Common) -> Result<bool> {
    if !(spec.tol > 0.0) {
        return Err(Usage(format!("tol must be positive, got {}", spec.tol)).into());
    }
    let mut entries = Vec::new();
    for selector in &spec.entries {
        let entry = parse_entry(selector).map_err(|e| Usage(format!("{selector}: {e}")))?;
        entries.push((selector.clone(), entry));
    }
    let mut run = Run::start(&common.out_dir, common.force, "verify", config_value(&spec))?;

    let mut table = CsvTable::new(&["entry", "quantity", "value", "expected", "residual", "pass"]);
    let mut failed = Vec::new();
    for (selector, entry) in &entries {
        for row in rows_for(selector, entry, spec.tol)? {
            if !row.pass {
                failed.push(format!("{} {}", row.entry, row.quantity));
            }
            table.row([
                row.entry,
                row.quantity,
                num(row.value),
                num(row.expected),
                num(row.residual),
                row.pass.to_string(),
            ]);
        }
    }
    run.write("verify.csv", &table.into_bytes())?;
    for f in &failed {
        eprintln!("failed: {f}");
    }
    let status = if failed.is_empty() { "passed" } else { "failed" };
    run.finish(json!({ "event": status }), json!({ "failed": failed }))?;
    Ok(failed.is_empty())
}

fn config_value(spec: &VerifySpec) -> Value {
    json!({ "command": "verify", "spec": spec })
}
