//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{collapsing_error, endpoint_law, orbit_drifts, random_deformation, run, COLLAPSING, ROTATING};
use edgesheet::boundary::{boundary_condition_residual, boundary_data, boundary_laplacian_residuals, edge_equation_residual};
use edgesheet::catalog::*;
use edgesheet::dynamics::{rotating_orbit_omega, InitialData};
use edgesheet::geometry::local_geometry;
use edgesheet::integrability::*;
use edgesheet::variation::{first_variation_analytic, first_variation_fd, total_action, VariationProblem};
use edgesheet::BoundaryEmbedding;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn edge_samples(entry: &CatalogEntry, n: usize) -> Vec<(&dyn BoundaryEmbedding, Vec<f64>)> {
    entry
        .boundaries
        .iter()
        .flat_map(|cb| cb.domain.grid(n).into_iter().map(move |u| (cb.boundary.as_ref() as &dyn BoundaryEmbedding, u)))
        .collect()
}

fn extremality() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for entry in [helicoid(0.5, 1.0, 1.0).unwrap(), plane()] {
        for p in entry.domain.grid(10) {
            worst = worst.max(local_geometry(entry.embedding.as_ref(), &p, None).unwrap().traces().amax());
            count += 1;
        }
    }
    outcome(worst < 1e-9 && count == 200, format!("max |K^i| = {worst:.2e} over {count} points"))
}

fn edge_law() -> Outcome {
    let orbit = helicoid(0.5, 1.0, 1.0).unwrap();
    let hole = planar_hole(2.0, 1.0, 2.0).unwrap();
    let mut worst: f64 = 0.0;
    for entry in [&orbit, &hole] {
        let (mu0, mub) = entry.tensions().unwrap();
        for (bnd, u) in edge_samples(entry, 50) {
            worst = worst.max(edge_equation_residual(&boundary_data(bnd, &u).unwrap(), mu0, mub).abs());
        }
    }
    let ratio = orbit.tensions().map(|(a, b)| a / b).unwrap();
    outcome(worst < 1e-9 && (ratio - 1.0 / 3.0).abs() < 1e-12, format!("max |mu_b k + mu_0| = {worst:.2e}"))
}

fn boundary_conditions() -> Outcome {
    let mut helix: f64 = 0.0;
    for (bnd, u) in edge_samples(&helicoid(0.5, 1.0, 1.0).unwrap(), 50) {
        helix = helix.max(boundary_condition_residual(bnd, &u).unwrap().amax());
    }
    let mut flat: f64 = 0.0;
    for entry in [plane(), collapsing_string(1.0, 1.0, 1.0).unwrap(), planar_hole(2.0, 1.0, 2.0).unwrap(), static_hole(2.0, 1.0, 2.0).unwrap()] {
        for (bnd, u) in edge_samples(&entry, 10) {
            flat = flat.max(boundary_condition_residual(bnd, &u).unwrap().amax());
        }
    }
    outcome(helix < 1e-9 && flat == 0.0, format!("helicoid {helix:.2e}, flat sheets {flat:.1e}"))
}

fn form_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut edges = 0;
    for (id, _) in KNOWN_IDS {
        let entry = parse_entry(id).unwrap();
        let (mu0, mub) = entry.tensions().unwrap_or((1.0, 1.0));
        edges += entry.boundaries.len();
        for (bnd, u) in edge_samples(&entry, 7) {
            let proj = boundary_condition_residual(bnd, &u).unwrap();
            let lap = boundary_laplacian_residuals(bnd, &u, mu0, mub).unwrap();
            worst = worst.max((proj + lap.normal).amax());
        }
    }
    outcome(worst < 1e-8, format!("max |projection - Laplacian form| = {worst:.2e} on {edges} edges"))
}

fn integrability() -> Outcome {
    // residuals at the default step, order measured above the roundoff floor
    let h = INTEGRABILITY_STEP;
    let (hc, hf) = (2e-3, 1e-3);
    let mut worst: f64 = 0.0;
    let mut min_order = f64::INFINITY;
    let mut order = |coarse: f64, fine: f64| {
        if let Some(o) = convergence_order(coarse, fine) {
            min_order = min_order.min(o);
        }
    };
    let entries = [plane(), sphere(2.0).unwrap(), torus(1.0, 0.5).unwrap(), helicoid(0.5, 1.0, 1.0).unwrap(), planar_hole(2.0, 1.0, 2.0).unwrap()];
    for entry in &entries {
        let emb = entry.embedding.as_ref();
        for p in entry.domain.grid(4) {
            worst = worst.max(worldsheet_integrability_residuals_with(emb, &p, h, None).unwrap().max());
            let c = worldsheet_integrability_residuals_with(emb, &p, hc, None).unwrap();
            let f = worldsheet_integrability_residuals_with(emb, &p, hf, None).unwrap();
            order(c.gauss, f.gauss);
            order(c.codazzi, f.codazzi);
            if let (Some(a), Some(b)) = (c.ricci, f.ricci) {
                order(a, b);
            }
        }
        for (bnd, u) in edge_samples(entry, 4) {
            worst = worst.max(boundary_integrability_residuals_with(bnd, &u, h).unwrap().max());
            worst = worst.max(direct_embedding_residuals_with(bnd, &u, h, None).unwrap().max());
            let c = boundary_integrability_residuals_with(bnd, &u, hc).unwrap();
            let f = boundary_integrability_residuals_with(bnd, &u, hf).unwrap();
            order(c.gauss, f.gauss);
            order(c.codazzi, f.codazzi);
            let c = direct_embedding_residuals_with(bnd, &u, hc, None).unwrap();
            let f = direct_embedding_residuals_with(bnd, &u, hf, None).unwrap();
            for (a, b) in [(c.gauss, f.gauss), (c.codazzi, f.codazzi), (c.ricci, f.ricci), (c.twist_tangential, f.twist_tangential), (c.twist_mixed, f.twist_mixed)] {
                order(a, b);
            }
        }
    }
    let shown = if min_order.is_finite() { format!("{min_order:.2}") } else { "n/a".into() };
    outcome(worst < 1e-6 && !(min_order < 1.8), format!("max residual {worst:.2e} at h = {h:e}, min order {shown} ({hc:e} -> {hf:e})"))
}

fn variational_identities() -> Outcome {
    let eps = 1e-3;
    let tol = f64::max(1e-6, 10.0 * eps * eps);
    let configs = [
        ("plane", plane(), 1.0, 0.5, vec![128, 500]),
        ("helicoid", helicoid(0.5, 1.0, 1.0).unwrap(), 1.0, 3.0, vec![256, 500]),
        ("hole", planar_hole(1.0, 1.0, 2.0).unwrap(), 1.0, 2.0, vec![500, 128]),
    ];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut stationary = true;
    let mut largest: f64 = 0.0;
    let mut qtol = f64::INFINITY;
    for (name, entry, mu0, mub, points) in configs {
        let pr = VariationProblem::from_entry(&entry, mu0, mub, points.clone()).unwrap();
        for seed in 0..5 {
            let d = random_deformation(&pr, 100 * count as u64 + seed);
            let fd = first_variation_fd(&pr, &d, eps).unwrap();
            let an = first_variation_analytic(&pr, &d).unwrap();
            worst = worst.max((fd - an).abs());
            count += 1;
            if name == "helicoid" {
                // quadrature error estimate: the action at half resolution
                let half = VariationProblem::from_entry(&entry, mu0, mub, points.iter().map(|n| n / 2).collect()).unwrap();
                qtol = (total_action(&pr).unwrap() - total_action(&half).unwrap()).abs();
                stationary &= an.abs() < qtol;
                largest = largest.max(an.abs());
            }
        }
    }
    outcome(worst < tol && stationary && count >= 15, format!("max |FD - analytic| = {worst:.2e} (tol {tol:.0e}, {count} deformations), orbit |dS| <= {largest:.1e} vs quadrature {qtol:.1e}"))
}

fn endpoint_law_in_dynamics() -> Outcome {
    let period = InitialData::parse(ROTATING).unwrap().period().unwrap();
    let (m1, a1, n1) = endpoint_law(&run(ROTATING, 200, 3.0 * period, 10));
    let (m2, a2, n2) = endpoint_law(&run(COLLAPSING, 200, 0.65, 1));
    let (mag, angle) = (m1.max(m2), a1.max(a2));
    outcome(mag < 1e-3 && angle < 1e-3 && n1 > 0 && n2 > 0, format!("max ||a| - mu0/mu_b| = {mag:.2e}, max angle to -eta = {angle:.2e} rad"))
}

fn collapsing_trajectory() -> Outcome {
    let coarse = collapsing_error(&run(COLLAPSING, 200, 0.65, 1), 0.5);
    let fine = collapsing_error(&run(COLLAPSING, 400, 0.65, 1), 0.5);
    let ratio = coarse / fine;
    outcome(coarse < 1e-3 && ratio >= 3.0, format!("relative error {coarse:.2e} (M=200), {fine:.2e} (M=400), reduction {ratio:.1}x"))
}

fn orbit_persistence() -> Outcome {
    let period = InitialData::parse(ROTATING).unwrap().period().unwrap();
    let tr = run(ROTATING, 200, 3.0 * period, 10);
    let (dr, de) = orbit_drifts(&tr, 1.0);
    let per_rev = dr / 3.0;
    outcome(dr < 0.01 && de < 1e-3, format!("radius drift {dr:.2e} over 3 periods ({per_rev:.1e}/rev), energy drift {de:.2e}"))
}

fn critical_radius() -> Outcome {
    let samples = hole_scan(1.0, 4.0, 31, 1.0, 2.0).unwrap();
    match sign_change(&samples) {
        Some((lo, hi)) => {
            let cell = 3.0 / 30.0;
            let ok = lo <= 2.0 && 2.0 <= hi && hi - lo <= cell + 1e-12;
            outcome(ok, format!("sign change in [{lo:.3}, {hi:.3}], rho* = 2"))
        }
        None => outcome(false, "no sign change".into()),
    }
}

fn orbit_limits() -> Outcome {
    let mut below = true;
    for i in 0..=120 {
        let q = 10f64.powf(-6.0 + 0.1 * i as f64);
        for r in [0.1, 1.0, 10.0] {
            below &= r * rotating_orbit_omega(q, 1.0, r).unwrap() < 1.0;
        }
    }
    let gap = 1.0 - rotating_orbit_omega(1e6, 1.0, 1.0).unwrap();
    outcome(below && gap < 1e-6, format!("omega R < 1 on 363 samples, 1 - omega R = {gap:.2e} at mu0/mu_b = 1e6"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 11] = [
        ("extremality", extremality, Duration::from_secs(1)),
        ("edge law", edge_law, Duration::from_secs(1)),
        ("boundary conditions", boundary_conditions, Duration::from_secs(1)),
        ("form equivalence", form_equivalence, Duration::from_secs(1)),
        ("integrability", integrability, Duration::from_secs(30)),
        ("variational identities", variational_identities, Duration::from_secs(60)),
        ("endpoint law", endpoint_law_in_dynamics, Duration::from_secs(60)),
        ("collapsing trajectory", collapsing_trajectory, Duration::from_secs(60)),
        ("orbit persistence", orbit_persistence, Duration::from_secs(120)),
        ("critical radius", critical_radius, Duration::from_secs(10)),
        ("orbit limits", orbit_limits, Duration::from_secs(1)),
    ];
    let mut failures = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let passed = out.passed && elapsed <= *budget;
        failures += usize::from(!passed);
        println!(
            "{:>2}. {:<24} {}  {}  [{:.2}s / {}s]",
            i + 1,
            name,
            if passed { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
