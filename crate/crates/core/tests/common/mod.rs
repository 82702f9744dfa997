#![allow(dead_code)]

use edgesheet::variation::{DeformationField, End, FourierMode, VariationProblem};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn modes(rng: &mut StdRng, components: usize, periodic: &[bool]) -> Vec<FourierMode> {
    (0..6)
        .map(|_| FourierMode {
            component: rng.gen_range(0..components),
            amplitude: 0.2 * (rng.gen::<f64>() - 0.5),
            cycles: periodic.iter().map(|&p| if p { rng.gen_range(0..3) as f64 } else { 1.5 * rng.gen::<f64>() }).collect(),
            phase: 2.0 * std::f64::consts::PI * rng.gen::<f64>(),
        })
        .collect()
}

/// Smooth random displacement plus random shifts of every edge.
pub fn random_deformation(problem: &VariationProblem, seed: u64) -> DeformationField {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = problem.embedding.spacetime_dim();
    let bulk = modes(&mut rng, n, &problem.periodic);
    let mut def = DeformationField::fourier(problem.window(), n, bulk);
    for end in [End::Lower, End::Upper] {
        if problem.boundary(end).is_some() {
            def = def.with_shift_modes(end, modes(&mut rng, 1, &problem.periodic));
        }
    }
    def
}

use edgesheet::catalog::collapsing_endpoint;
use edgesheet::dynamics::{diagnostics, evolve_from, InitialData, Trajectory};

pub const COLLAPSING: &str = "collapsing_string:a=1,x0=1,mub=1";
pub const ROTATING: &str = "helicoid:omega=0.5,R=1,mu0=1";

pub fn run(selector: &str, m: usize, duration: f64, stride: usize) -> Trajectory {
    let init = InitialData::parse(selector).unwrap().state(m).unwrap();
    evolve_from(init, duration, 0.5, 1e-4, stride)
}

/// Largest relative deviation of the right end from the closed-form
/// hyperbolic worldline over snapshots with endpoint time `X^0 <= t_max`.
pub fn collapsing_error(tr: &Trajectory, t_max: f64) -> f64 {
    tr.snapshots
        .iter()
        .map(|s| &s.endpoints[1].position)
        .take_while(|p| p[0] <= t_max)
        .map(|p| {
            let x = collapsing_endpoint(1.0, 1.0, p[0]);
            ((p[1] - x) / x).abs()
        })
        .fold(0.0, f64::max)
}

/// Worst `| |a| - mu0/m |` and worst angle between `a` and `-eta` over a
/// trajectory and both ends.
pub fn endpoint_law(tr: &Trajectory) -> (f64, f64, usize) {
    let (mut mag, mut angle, mut samples) = (0.0f64, 0.0f64, 0);
    for s in &tr.snapshots {
        for e in diagnostics(s).endpoints {
            if let (Some(a), Some(th)) = (e.acceleration, e.angle) {
                mag = mag.max((a - e.expected).abs());
                angle = angle.max(th);
                samples += 1;
            }
        }
    }
    (mag, angle, samples)
}

/// Worst relative radius deviation of both ends from `radius` and worst
/// relative energy drift.
pub fn orbit_drifts(tr: &Trajectory, radius: f64) -> (f64, f64) {
    let e0 = diagnostics(&tr.snapshots[0]).total_energy;
    let (mut dr, mut de) = (0.0f64, 0.0f64);
    for s in &tr.snapshots {
        for e in &s.endpoints {
            let r = e.position[1].hypot(e.position[2]);
            dr = dr.max((r - radius).abs() / radius);
        }
        de = de.max(((diagnostics(s).total_energy - e0) / e0).abs());
    }
    (dr, de)
}
