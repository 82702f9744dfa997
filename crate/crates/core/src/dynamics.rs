//! A Nambu-Goto string with massive endpoints in flat Minkowski space.
//!
//! The interior is evolved in conformal gauge, `X_tt = X_ss` with
//! `X_t . X_s = 0` and `X_t^2 + X_s^2 = 0`, by the leapfrog scheme in
//! kick-drift-kick form. The coordinate time `t` is the worldsheet time, not
//! `X^0`. Each end is a boundary node carrying its own four-velocity `u` and
//! proper time, advanced by RK4 in `t`:
//!
//! ```text
//! dX/dt = lambda u,   du/dt = -(mu_0 / m) lambda eta,   dtau/dt = lambda
//! ```
//!
//! where `lambda eta` is the outward one-sided `sigma` derivative made
//! orthogonal to `u` (so `lambda = |X_s|` on a conformal solution). During a
//! step the interior nodes follow `X + h X_t + h^2 X_ss / 2`, which coincides
//! with the leapfrog drift at the end of the step.

use std::f64::consts::PI;

use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{orbit_ratio, parse_entry};
use crate::error::GeometryError;

/// Smallest grid accepted.
pub const MIN_GRID_POINTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("conformal constraints blew up at t = {time}: norm {norm:e} exceeds {limit:e}")]
    ConstraintBlowup { time: f64, norm: f64, limit: f64 },
    #[error("endpoints collided at t = {time}: separation {separation:e} below {threshold:e}")]
    EndpointCollision { time: f64, separation: f64, threshold: f64 },
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type DynamicsResult<T> = std::result::Result<T, DynamicsError>;

/// `eta_{mu nu} a^mu b^nu` with signature `(-, +, ..., +)`.
pub fn minkowski_dot(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    -a[0] * b[0] + (1..a.len()).map(|k| a[k] * b[k]).sum::<f64>()
}

fn dot(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    minkowski_dot(a.view(), b.view())
}

/// `sqrt(|v . v|)`.
fn norm(v: &Array1<f64>) -> f64 {
    dot(v, v).abs().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tensions {
    pub mu0: f64,
    pub mub_left: f64,
    pub mub_right: f64,
}

/// Endpoint proper acceleration measured by a central difference of `u`
/// over `tau`, together with the outward normal at the same level.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredAcceleration {
    pub time: f64,
    pub acceleration: Array1<f64>,
    pub eta: Array1<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndpointState {
    pub position: Array1<f64>,
    pub four_velocity: Array1<f64>,
    pub proper_time: f64,
    /// Outward unit normal at the current level.
    pub eta: Array1<f64>,
    /// `(u, tau, eta, t)` one step back.
    previous: Option<(Array1<f64>, f64, Array1<f64>, f64)>,
    /// Acceleration centred on the previous level.
    pub acceleration: Option<MeasuredAcceleration>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StringState {
    pub time: f64,
    pub sigma_spacing: f64,
    /// `X^mu(sigma_k)`, M x N.
    pub positions: Array2<f64>,
    /// `X^mu_t(sigma_k)`, M x N.
    pub velocities: Array2<f64>,
    /// Left (`sigma` smallest) and right ends.
    pub endpoints: [EndpointState; 2],
    pub tensions: Tensions,
    /// Initial `|X_s|` at the ends, the length scale of the collision test.
    pub initial_scale: f64,
}

impl StringState {
    pub fn grid_points(&self) -> usize {
        self.positions.nrows()
    }

    pub fn spacetime_dim(&self) -> usize {
        self.positions.ncols()
    }

    fn mass(&self, end: usize) -> f64 {
        if end == 0 {
            self.tensions.mub_left
        } else {
            self.tensions.mub_right
        }
    }

    /// Build a state from node positions and velocities; the ends take their
    /// four-velocity from the node velocity.
    pub fn new(
        positions: Array2<f64>,
        velocities: Array2<f64>,
        sigma_spacing: f64,
        tensions: Tensions,
    ) -> DynamicsResult<Self> {
        let m = positions.nrows();
        if m < 3 || velocities.dim() != positions.dim() {
            return Err(DynamicsError::InvalidConfig("positions and velocities must be matching M x N arrays, M >= 3".into()));
        }
        if !(tensions.mu0 >= 0.0 && tensions.mub_left > 0.0 && tensions.mub_right > 0.0) {
            return Err(DynamicsError::InvalidConfig(format!("tensions must satisfy mu0 >= 0, mub > 0: {tensions:?}")));
        }
        let mut ends = Vec::with_capacity(2);
        let mut scale = 0.0;
        for (end, node) in [(0, 0), (1, m - 1)] {
            let v = velocities.row(node).to_owned();
            let vv = dot(&v, &v);
            if !(vv < 0.0) {
                return Err(DynamicsError::InvalidConfig(format!("endpoint {end} velocity is not timelike")));
            }
            let mut u = v / (-vv).sqrt();
            if u[0] < 0.0 {
                u = -u;
            }
            let tangent = outward_derivative(&positions, end, positions.row(node).to_owned(), sigma_spacing);
            let (eta, lambda) = normal_against(&tangent, &u);
            scale += 0.5 * lambda;
            ends.push(EndpointState {
                position: positions.row(node).to_owned(),
                four_velocity: u,
                proper_time: 0.0,
                eta,
                previous: None,
                acceleration: None,
            });
        }
        let right = ends.pop().expect("two ends");
        let left = ends.pop().expect("two ends");
        Ok(Self {
            time: 0.0,
            sigma_spacing,
            positions,
            velocities,
            endpoints: [left, right],
            tensions,
            initial_scale: scale,
        })
    }

    /// Spatial distance between the two ends.
    pub fn endpoint_separation(&self) -> f64 {
        let a = &self.endpoints[0].position;
        let b = &self.endpoints[1].position;
        (1..a.len()).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt()
    }

    /// Negate all velocities and four-velocities (the equations are invariant
    /// under `t -> -t` with this substitution).
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        out.velocities.mapv_inplace(|v| -v);
        for e in &mut out.endpoints {
            e.four_velocity.mapv_inplace(|v| -v);
            e.previous = None;
            e.acceleration = None;
        }
        out
    }
}

/// Outward one-sided second-order `sigma` derivative at an end, with the end
/// node replaced by `end_position`.
fn outward_derivative(positions: &Array2<f64>, end: usize, end_position: Array1<f64>, ds: f64) -> Array1<f64> {
    let m = positions.nrows();
    if end == 0 {
        // outward is -sigma
        -(&end_position * (-3.0) + &(positions.row(1).to_owned() * 4.0) - &positions.row(2)) / (2.0 * ds)
    } else {
        (&end_position * 3.0 - &(positions.row(m - 2).to_owned() * 4.0) + &positions.row(m - 3)) / (2.0 * ds)
    }
}

/// Part of `t` orthogonal to the unit timelike `u`, normalized: `(eta, |t_perp|)`.
fn normal_against(t: &Array1<f64>, u: &Array1<f64>) -> (Array1<f64>, f64) {
    let perp = t + &(u * dot(t, u));
    let lambda = norm(&perp);
    (perp / lambda, lambda)
}

/// Renormalize to `u . u = -1`, future or past pointing as given.
fn unit_timelike(u: &Array1<f64>) -> Array1<f64> {
    u / (-dot(u, u)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub grid_points: usize,
    /// `dt / d sigma`.
    #[serde(default = "default_dt_fraction")]
    pub dt_fraction: f64,
    /// Worldsheet time to evolve for.
    pub duration: f64,
    #[serde(default = "default_constraint_tol")]
    pub constraint_tol: f64,
    #[serde(default = "default_output_stride")]
    pub output_stride: usize,
    /// Catalog-style selector, e.g. `helicoid:omega=0.5,R=1,mu0=1` or
    /// `collapsing_string:a=1,x0=1,mub=1`.
    pub initial_data: String,
}

fn default_dt_fraction() -> f64 {
    0.5
}

fn default_constraint_tol() -> f64 {
    1e-4
}

fn default_output_stride() -> usize {
    10
}

impl SimulationConfig {
    pub fn new(grid_points: usize, duration: f64, initial_data: impl Into<String>) -> Self {
        Self {
            grid_points,
            dt_fraction: default_dt_fraction(),
            duration,
            constraint_tol: default_constraint_tol(),
            output_stride: default_output_stride(),
            initial_data: initial_data.into(),
        }
    }

    pub fn validate(&self) -> DynamicsResult<()> {
        let bad = |m: String| Err(DynamicsError::InvalidConfig(m));
        if self.grid_points < MIN_GRID_POINTS {
            return bad(format!("grid_points = {} is below the minimum {MIN_GRID_POINTS}", self.grid_points));
        }
        if !(self.dt_fraction > 0.0 && self.dt_fraction <= 1.0) {
            return bad(format!("dt_fraction = {} violates 0 < dt/dsigma <= 1", self.dt_fraction));
        }
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return bad(format!("duration = {} must be finite and non-negative", self.duration));
        }
        if !(self.constraint_tol > 0.0) {
            return bad(format!("constraint_tol = {} must be positive", self.constraint_tol));
        }
        if self.output_stride == 0 {
            return bad("output_stride must be at least 1".into());
        }
        InitialData::parse(&self.initial_data)?;
        Ok(())
    }
}

/// Initial data families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    /// Rigid rotation at angular velocity `omega` with ends at radius `radius`.
    RotatingOrbit { omega: f64, radius: f64, mu0: f64, mub: f64 },
    /// Straight string at rest between `x = -x0` and `x = x0`.
    Collapsing { x0: f64, mu0: f64, mub: f64 },
}

impl InitialData {
    /// From a catalog selector (`helicoid:...` or `collapsing_string:...`).
    pub fn parse(selector: &str) -> DynamicsResult<Self> {
        let entry = parse_entry(selector)?;
        let p = |k: &str| entry.parameter(k).ok_or_else(|| DynamicsError::InvalidConfig(format!("missing parameter {k}")));
        let name = selector.split(':').next().unwrap_or_default().trim();
        match name {
            "helicoid" => {
                let (omega, radius, mu0) = (p("omega")?, p("R")?, p("mu0")?);
                if omega <= 0.0 {
                    return Err(DynamicsError::InvalidConfig("a rotating orbit needs omega > 0".into()));
                }
                Ok(Self::RotatingOrbit { omega, radius, mu0, mub: mu0 / orbit_ratio(omega, radius) })
            }
            "collapsing_string" => Ok(Self::Collapsing { x0: p("x0")?, mu0: p("mu0")?, mub: p("mub")? }),
            other => Err(DynamicsError::InvalidConfig(format!("no initial data for catalog entry {other:?}"))),
        }
    }

    pub fn tensions(&self) -> Tensions {
        let (mu0, mub) = match *self {
            Self::RotatingOrbit { mu0, mub, .. } | Self::Collapsing { mu0, mub, .. } => (mu0, mub),
        };
        Tensions { mu0, mub_left: mub, mub_right: mub }
    }

    /// Grid state with `m` nodes in 2+1 dimensions.
    pub fn state(&self, m: usize) -> DynamicsResult<StringState> {
        match *self {
            Self::RotatingOrbit { omega, radius, .. } => {
                let sr = (omega * radius).asin() / omega;
                let ds = 2.0 * sr / (m - 1) as f64;
                let mut x = Array2::zeros((m, 3));
                let mut v = Array2::zeros((m, 3));
                for k in 0..m {
                    let s = -sr + k as f64 * ds;
                    let r = (omega * s).sin() / omega;
                    x[[k, 1]] = r;
                    v[[k, 0]] = 1.0;
                    v[[k, 2]] = omega * r;
                }
                StringState::new(x, v, ds, self.tensions())
            }
            Self::Collapsing { x0, .. } => {
                let ds = 2.0 * x0 / (m - 1) as f64;
                let mut x = Array2::zeros((m, 3));
                let mut v = Array2::zeros((m, 3));
                for k in 0..m {
                    x[[k, 1]] = -x0 + k as f64 * ds;
                    v[[k, 0]] = 1.0;
                }
                StringState::new(x, v, ds, self.tensions())
            }
        }
    }

    /// Worldsheet time of one revolution (rotating orbit only).
    pub fn period(&self) -> Option<f64> {
        match *self {
            Self::RotatingOrbit { omega, .. } => Some(2.0 * PI / omega),
            Self::Collapsing { .. } => None,
        }
    }
}

/// Positive root of `omega^2 R / (1 - omega^2 R^2) = mu0 / mub`.
pub fn rotating_orbit_omega(mu0: f64, mub: f64, radius: f64) -> crate::error::Result<f64> {
    if !(mu0 > 0.0 && mub > 0.0 && radius > 0.0) {
        return Err(GeometryError::InvalidParameters(format!(
            "orbit needs mu0, mub, R > 0 (mu0 = {mu0}, mub = {mub}, R = {radius})"
        )));
    }
    let q = mu0 / mub;
    Ok((q / (radius * (1.0 + q * radius))).sqrt())
}

/// `sigma` derivative at interior nodes (central) and ends (one-sided).
fn sigma_derivative(x: &Array2<f64>, ds: f64) -> Array2<f64> {
    let m = x.nrows();
    let mut out = Array2::zeros(x.dim());
    for k in 1..m - 1 {
        let d = (&x.row(k + 1) - &x.row(k - 1)) / (2.0 * ds);
        out.row_mut(k).assign(&d);
    }
    let left = (&x.row(0) * (-3.0) + &x.row(1) * 4.0 - &x.row(2)) / (2.0 * ds);
    let right = (&x.row(m - 1) * 3.0 - &x.row(m - 2) * 4.0 + &x.row(m - 3)) / (2.0 * ds);
    out.row_mut(0).assign(&left);
    out.row_mut(m - 1).assign(&right);
    out
}

/// `X_ss` at interior nodes; zero at the ends.
fn interior_acceleration(x: &Array2<f64>, ds: f64) -> Array2<f64> {
    let m = x.nrows();
    let mut a = Array2::zeros(x.dim());
    let inv = 1.0 / (ds * ds);
    for k in 1..m - 1 {
        let row = (&x.row(k + 1) - &(x.row(k).to_owned() * 2.0) + &x.row(k - 1)) * inv;
        a.row_mut(k).assign(&row);
    }
    a
}

/// Largest `|X_t . X_s|` and `|X_t^2 + X_s^2|` over interior nodes.
pub fn constraint_norms(state: &StringState) -> (f64, f64) {
    let xs = sigma_derivative(&state.positions, state.sigma_spacing);
    let m = state.grid_points();
    let mut worst = (0.0f64, 0.0f64);
    for k in 1..m - 1 {
        let v = state.velocities.row(k);
        let s = xs.row(k);
        worst.0 = worst.0.max(minkowski_dot(v, s).abs());
        worst.1 = worst.1.max((minkowski_dot(v, v) + minkowski_dot(s, s)).abs());
    }
    worst
}

#[derive(Clone)]
struct EndODE {
    x: Array1<f64>,
    u: Array1<f64>,
    tau: f64,
}

/// Advance the state by `dt`.
pub fn step_by(state: &StringState, dt: f64, constraint_tol: f64) -> DynamicsResult<StringState> {
    let ds = state.sigma_spacing;
    let m = state.grid_points();
    let mu0 = state.tensions.mu0;

    // kick and drift the interior
    let acc = interior_acceleration(&state.positions, ds);
    let half = &state.velocities + &(&acc * (0.5 * dt));
    let mut new_x = &state.positions + &(&half * dt);

    // ends by RK4 with interior nodes moving along their drift
    let mut new_ends = Vec::with_capacity(2);
    for end in 0..2 {
        let node = if end == 0 { 0 } else { m - 1 };
        let ep = &state.endpoints[end];
        let ratio = mu0 / state.mass(end);
        let rhs = |y: &EndODE, c: f64| -> (Array1<f64>, Array1<f64>, f64) {
            let mut grid = state.positions.clone();
            for k in [1, 2, m - 3, m - 2] {
                let h = c * dt;
                let row = &state.positions.row(k) + &(&state.velocities.row(k) * h) + &(&acc.row(k) * (0.5 * h * h));
                grid.row_mut(k).assign(&row);
            }
            let tangent = outward_derivative(&grid, end, y.x.clone(), ds);
            let u = unit_timelike(&y.u);
            let perp = &tangent + &(&u * dot(&tangent, &u));
            let lambda = norm(&perp);
            (&u * lambda, perp * (-ratio), lambda)
        };
        let y0 = EndODE { x: ep.position.clone(), u: ep.four_velocity.clone(), tau: ep.proper_time };
        let advance = |y: &EndODE, k: &(Array1<f64>, Array1<f64>, f64), h: f64| EndODE {
            x: &y.x + &(&k.0 * h),
            u: &y.u + &(&k.1 * h),
            tau: y.tau + k.2 * h,
        };
        let k1 = rhs(&y0, 0.0);
        let k2 = rhs(&advance(&y0, &k1, 0.5 * dt), 0.5);
        let k3 = rhs(&advance(&y0, &k2, 0.5 * dt), 0.5);
        let k4 = rhs(&advance(&y0, &k3, dt), 1.0);
        let x = &y0.x + &((&k1.0 + &(&k2.0 * 2.0) + &(&k3.0 * 2.0) + &k4.0) * (dt / 6.0));
        let u = &y0.u + &((&k1.1 + &(&k2.1 * 2.0) + &(&k3.1 * 2.0) + &k4.1) * (dt / 6.0));
        let tau = y0.tau + (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2) * dt / 6.0;
        let u = unit_timelike(&u);
        new_x.row_mut(node).assign(&x);
        new_ends.push((x, u, tau));
    }

    // second kick, then end velocities from the four-velocity
    let acc = interior_acceleration(&new_x, ds);
    let mut new_v = &half + &(&acc * (0.5 * dt));
    let mut endpoints = state.endpoints.clone();
    for (end, (x, u, tau)) in new_ends.into_iter().enumerate() {
        let node = if end == 0 { 0 } else { m - 1 };
        let tangent = outward_derivative(&new_x, end, x.clone(), ds);
        let (eta, lambda) = normal_against(&tangent, &u);
        new_v.row_mut(node).assign(&(&u * lambda));
        let ep = &mut endpoints[end];
        let old = (ep.four_velocity.clone(), ep.proper_time, ep.eta.clone(), state.time);
        ep.acceleration = ep.previous.as_ref().map(|(u_prev, tau_prev, _, _)| MeasuredAcceleration {
            time: state.time,
            acceleration: (&u - u_prev) / (tau - tau_prev),
            eta: old.2.clone(),
        });
        ep.previous = Some(old);
        ep.position = x;
        ep.four_velocity = u;
        ep.proper_time = tau;
        ep.eta = eta;
    }

    let next = StringState { time: state.time + dt, positions: new_x, velocities: new_v, endpoints, ..state.clone() };
    let (c1, c2) = constraint_norms(&next);
    let limit = 100.0 * constraint_tol;
    if !(c1.max(c2) <= limit) {
        return Err(DynamicsError::ConstraintBlowup { time: next.time, norm: c1.max(c2), limit });
    }
    let threshold = 2.0 * ds * next.initial_scale;
    let separation = next.endpoint_separation();
    if separation < threshold {
        return Err(DynamicsError::EndpointCollision { time: next.time, separation, threshold });
    }
    Ok(next)
}

/// One step of size `dt_fraction * d sigma`.
pub fn step(state: &StringState, config: &SimulationConfig) -> DynamicsResult<StringState> {
    step_by(state, config.dt_fraction * state.sigma_spacing, config.constraint_tol)
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TerminalEvent {
    Completed,
    EndpointCollision { time: f64, separation: f64 },
    ConstraintBlowup { time: f64, norm: f64 },
}

impl TerminalEvent {
    pub fn name(&self) -> &'static str {
        match self {
            TerminalEvent::Completed => "completed",
            TerminalEvent::EndpointCollision { .. } => "endpoint_collision",
            TerminalEvent::ConstraintBlowup { .. } => "constraint_blowup",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<StringState>,
    pub event: TerminalEvent,
    pub steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &StringState {
        self.snapshots.last().expect("a trajectory has at least its initial state")
    }
}

/// Evolve `state` for `duration`, snapshotting every `stride` steps and at the
/// end. Terminal events stop the run and are reported, not returned as errors.
pub fn evolve_from(
    state: StringState,
    duration: f64,
    dt_fraction: f64,
    constraint_tol: f64,
    stride: usize,
) -> Trajectory {
    let dt = dt_fraction * state.sigma_spacing;
    let t_end = state.time + duration;
    let mut snapshots = vec![state.clone()];
    let mut current = state;
    let mut steps = 0;
    let mut event = TerminalEvent::Completed;
    while current.time < t_end - 1e-12 * dt {
        let h = dt.min(t_end - current.time);
        match step_by(&current, h, constraint_tol) {
            Ok(next) => {
                current = next;
                steps += 1;
                if steps % stride == 0 {
                    snapshots.push(current.clone());
                }
            }
            Err(DynamicsError::EndpointCollision { time, separation, .. }) => {
                event = TerminalEvent::EndpointCollision { time, separation };
                break;
            }
            Err(DynamicsError::ConstraintBlowup { time, norm, .. }) => {
                event = TerminalEvent::ConstraintBlowup { time, norm };
                break;
            }
            Err(e) => unreachable!("step only reports terminal events: {e}"),
        }
    }
    if steps % stride != 0 {
        snapshots.push(current);
    }
    Trajectory { snapshots, event, steps }
}

/// Validate `config`, build its initial data and evolve.
pub fn evolve(config: &SimulationConfig) -> DynamicsResult<Trajectory> {
    config.validate()?;
    let init = InitialData::parse(&config.initial_data)?.state(config.grid_points)?;
    Ok(evolve_from(init, config.duration, config.dt_fraction, config.constraint_tol, config.output_stride))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointDiagnostics {
    /// `|a|`, `None` until two steps have been taken.
    pub acceleration: Option<f64>,
    /// Angle between `a` and `-eta` in radians.
    pub angle: Option<f64>,
    /// Expected `mu_0 / m`.
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub time: f64,
    /// `(max |X_t . X_s|, max |X_t^2 + X_s^2|)`.
    pub constraint_norms: (f64, f64),
    pub total_energy: f64,
    /// `L^{12}`, the angular momentum in the first spatial plane.
    pub angular_momentum: f64,
    pub endpoints: [EndpointDiagnostics; 2],
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1]))
}

fn endpoint_diagnostics(ep: &EndpointState, expected: f64) -> EndpointDiagnostics {
    let Some(meas) = &ep.acceleration else {
        return EndpointDiagnostics { acceleration: None, angle: None, expected };
    };
    let a = &meas.acceleration;
    let u = &ep.previous.as_ref().expect("measured acceleration implies a previous level").0;
    let along = -dot(a, &meas.eta);
    let r = a + &(&meas.eta * along);
    let r = &r + &(u * dot(&r, u));
    EndpointDiagnostics { acceleration: Some(norm(a)), angle: Some(norm(&r).atan2(along)), expected }
}

/// Conserved charges, constraints and endpoint acceleration checks.
pub fn diagnostics(state: &StringState) -> Diagnostics {
    let t = &state.tensions;
    let v = &state.velocities;
    let x = &state.positions;
    let m = state.grid_points();
    let ds = state.sigma_spacing;
    let energy_density: Vec<f64> = (0..m).map(|k| v[[k, 0]]).collect();
    let mut energy = t.mu0 * trapezoid(&energy_density, ds);
    let mut angular = 0.0;
    if state.spacetime_dim() >= 3 {
        let l_density: Vec<f64> = (0..m).map(|k| x[[k, 1]] * v[[k, 2]] - x[[k, 2]] * v[[k, 1]]).collect();
        angular = t.mu0 * trapezoid(&l_density, ds);
    }
    for (end, ep) in state.endpoints.iter().enumerate() {
        let mass = state.mass(end);
        energy += mass * ep.four_velocity[0];
        if state.spacetime_dim() >= 3 {
            let (p, u) = (&ep.position, &ep.four_velocity);
            angular += mass * (p[1] * u[2] - p[2] * u[1]);
        }
    }
    Diagnostics {
        time: state.time,
        constraint_norms: constraint_norms(state),
        total_energy: energy,
        angular_momentum: angular,
        endpoints: [
            endpoint_diagnostics(&state.endpoints[0], t.mu0 / t.mub_left),
            endpoint_diagnostics(&state.endpoints[1], t.mu0 / t.mub_right),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_omega_solves_relation() {
        let w = rotating_orbit_omega(1.0, 3.0, 1.0).unwrap();
        assert!((w - 0.5).abs() < 1e-15);
        assert!((orbit_ratio(w, 1.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rotating_initial_data_satisfies_constraints() {
        let s = InitialData::parse("helicoid:omega=0.5,R=1,mu0=1").unwrap().state(200).unwrap();
        let (a, b) = constraint_norms(&s);
        assert!(a < 1e-12 && b < 1e-5, "{a} {b}");
        let r = s.endpoints[1].position[1];
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_grid_is_rejected() {
        let c = SimulationConfig::new(8, 1.0, "collapsing_string:a=1,x0=1,mub=1");
        assert!(matches!(c.validate(), Err(DynamicsError::InvalidConfig(_))));
    }
}
