//! Area actions of a worldsheet with a massive edge and their first variation.
//!
//! `S = S_0 + S_b`, `S_0 = -mu_0 int sqrt|gamma|`, `S_b = -mu_b oint sqrt|h|`.
//! Deformations are a spacetime displacement field `V(xi)` (so `Phi_a =
//! g(e_a, V)`, `Phi_i = g(n_i, V)`) plus an optional shift of each edge along
//! the coordinate normal to it, `delta chi = psi d_axis`. The analytic first
//! variation is
//!
//! ```text
//! dS = -mu_0 int sqrt|gamma| K^i Phi_i
//!      - oint sqrt|h| [ (mu_0 + mu_b k)(eta.Phi + Psi) + mu_b H^{ab} K_ab^i Phi_i ]
//! ```
//!
//! with `Psi = psi (gamma eta)_axis`. Tangential divergences on the edge are
//! dropped: every deformation is windowed to vanish on the temporal caps.
//!
//! All integrals use the tensor-product midpoint rule; cells are evaluated in
//! parallel and summed pairwise in a fixed order.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{boundary_data, BoundaryEmbedding};
use crate::catalog::{CatalogEntry, ParameterBox};
use crate::embedding::Embedding;
use crate::error::{GeometryError, Result};
use crate::geometry::{invert_symmetric, local_geometry};

/// Fewest quadrature points accepted along any axis.
pub const MIN_QUADRATURE_POINTS: usize = 8;

/// Fraction of an axis over which deformations are tapered to zero.
pub const TAPER_FRACTION: f64 = 0.1;

/// Midpoint grid over a coordinate box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub domain: ParameterBox,
    pub points: Vec<usize>,
}

impl Quadrature {
    pub fn new(domain: ParameterBox, points: Vec<usize>) -> Result<Self> {
        if points.len() != domain.dim() {
            return Err(GeometryError::DimensionMismatch(format!(
                "{} quadrature sizes for a {}-dimensional domain",
                points.len(),
                domain.dim()
            )));
        }
        if let Some(&n) = points.iter().find(|&&n| n < MIN_QUADRATURE_POINTS) {
            return Err(GeometryError::InvalidParameters(format!(
                "quadrature needs at least {MIN_QUADRATURE_POINTS} points per axis, got {n}"
            )));
        }
        for k in 0..domain.dim() {
            if !(domain.extent(k) > 0.0) {
                return Err(GeometryError::InvalidParameters(format!("empty quadrature extent along axis {k}")));
            }
        }
        Ok(Self { domain, points })
    }

    pub fn total(&self) -> usize {
        self.points.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.domain.dim()).map(|k| self.domain.extent(k) / self.points[k] as f64).product()
    }

    /// Fractional midpoint coordinates of cell `idx` (row-major).
    pub fn fractions(&self, mut idx: usize) -> Vec<f64> {
        let d = self.points.len();
        let mut f = vec![0.0; d];
        for k in (0..d).rev() {
            let n = self.points[k];
            f[k] = ((idx % n) as f64 + 0.5) / n as f64;
            idx /= n;
        }
        f
    }

    pub fn node(&self, idx: usize) -> Vec<f64> {
        self.domain.at(&self.fractions(idx))
    }

    /// The grid with `axis` removed.
    pub fn without_axis(&self, axis: usize) -> Quadrature {
        let mut lower = self.domain.lower.clone();
        let mut upper = self.domain.upper.clone();
        let mut points = self.points.clone();
        lower.remove(axis);
        upper.remove(axis);
        points.remove(axis);
        Quadrature { domain: ParameterBox::new(lower, upper), points }
    }

    /// `sum f(node) * cell volume`, summed pairwise in grid order.
    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        let values: Vec<f64> =
            (0..self.total()).into_par_iter().map(|idx| f(&self.node(idx))).collect::<Result<Vec<_>>>()?;
        Ok(pairwise_sum(&values) * self.cell_volume())
    }
}

/// Recursive pairwise summation; the result depends only on the order of
/// `values`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// Tensions and quadrature of an action evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionConfig {
    pub mu0: f64,
    pub mub: f64,
    pub quadrature: Quadrature,
}

impl ActionConfig {
    pub fn new(mu0: f64, mub: f64, quadrature: Quadrature) -> Result<Self> {
        if !(mu0 >= 0.0 && mub >= 0.0) {
            return Err(GeometryError::InvalidParameters(format!("tensions must be non-negative (mu0 = {mu0}, mub = {mub})")));
        }
        Ok(Self { mu0, mub, quadrature })
    }
}

fn volume_element(tangents: &DMatrix<f64>, metric: &DMatrix<f64>) -> Result<f64> {
    let det = (tangents.transpose() * metric * tangents).determinant();
    if det == 0.0 || !det.is_finite() {
        return Err(GeometryError::DegenerateMetric { det, threshold: 0.0 });
    }
    Ok(det.abs().sqrt())
}

/// `-mu_0 int sqrt|gamma|` over `config.quadrature`.
pub fn dng_action(embedding: &dyn Embedding, config: &ActionConfig) -> Result<f64> {
    let bg = embedding.background();
    let area = config.quadrature.integrate(|xi| {
        let x = embedding.position(xi);
        volume_element(&embedding.d_position(xi), &bg.metric_at(x.as_slice()))
    })?;
    Ok(-config.mu0 * area)
}

/// `-mu_b oint sqrt|h|` with the quadrature taken over the edge parameters.
pub fn edge_action(bnd: &dyn BoundaryEmbedding, config: &ActionConfig) -> Result<f64> {
    let parent = bnd.parent();
    let bg = parent.background();
    let length = config.quadrature.integrate(|u| {
        let chi = bnd.chi(u);
        let x = parent.position(chi.as_slice());
        let t = parent.d_position(chi.as_slice()) * bnd.d_chi(u);
        volume_element(&t, &bg.metric_at(x.as_slice()))
    })?;
    Ok(-config.mub * length)
}

/// Smooth cutoff making deformations vanish at the temporal caps and at ends
/// of the domain that are not material edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub domain: ParameterBox,
    /// `(lower end tapered, upper end tapered)` per axis.
    pub taper: Vec<(bool, bool)>,
}

/// Cosine taper `(1 - cos(pi q)) / 2` in the warped coordinate
/// `q = x - sin(2 pi x) / (2 pi)`, `x = f / TAPER_FRACTION`. The warp makes
/// the first three derivatives vanish at both ends of the ramp, which keeps
/// the midpoint rule at high order across the junctions.
fn taper(f: f64) -> (f64, f64) {
    use std::f64::consts::PI;
    if f >= TAPER_FRACTION {
        (1.0, 0.0)
    } else if f <= 0.0 {
        (0.0, 0.0)
    } else {
        let x = f / TAPER_FRACTION;
        let q = x - (2.0 * PI * x).sin() / (2.0 * PI);
        let dq = 1.0 - (2.0 * PI * x).cos();
        (0.5 * (1.0 - (PI * q).cos()), 0.5 * PI * (PI * q).sin() * dq / TAPER_FRACTION)
    }
}

impl Window {
    pub fn none(domain: ParameterBox) -> Self {
        let d = domain.dim();
        Self { domain, taper: vec![(false, false); d] }
    }

    /// Value and coordinate gradient at `xi`.
    pub fn value(&self, xi: &[f64]) -> (f64, DVector<f64>) {
        let d = self.domain.dim();
        let mut factors = vec![(1.0, 0.0); d];
        for k in 0..d {
            let ext = self.domain.extent(k);
            let (lo, hi) = self.taper[k];
            let mut w = (1.0, 0.0);
            if lo {
                let (v, dv) = taper((xi[k] - self.domain.lower[k]) / ext);
                w = (w.0 * v, w.1 * v + w.0 * dv / ext);
            }
            if hi {
                let (v, dv) = taper((self.domain.upper[k] - xi[k]) / ext);
                w = (w.0 * v, w.1 * v - w.0 * dv / ext);
            }
            factors[k] = w;
        }
        let value: f64 = factors.iter().map(|f| f.0).product();
        let grad = DVector::from_fn(d, |k, _| {
            (0..d).map(|j| if j == k { factors[j].1 } else { factors[j].0 }).product()
        });
        (value, grad)
    }
}

/// One cosine mode `A cos(sum_k 2 pi c_k (xi_k - lower_k) / extent_k + phase)`.
///
/// Integer `cycles` along periodic axes keep the mode periodic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub component: usize,
    pub amplitude: f64,
    pub cycles: Vec<f64>,
    pub phase: f64,
}

impl FourierMode {
    fn eval(&self, domain: &ParameterBox, xi: &[f64]) -> (f64, DVector<f64>) {
        let d = domain.dim();
        let rate: Vec<f64> = (0..d).map(|k| 2.0 * std::f64::consts::PI * self.cycles[k] / domain.extent(k)).collect();
        let arg: f64 = self.phase + (0..d).map(|k| rate[k] * (xi[k] - domain.lower[k])).sum::<f64>();
        let (s, c) = arg.sin_cos();
        (self.amplitude * c, DVector::from_fn(d, |k, _| -self.amplitude * s * rate[k]))
    }
}

type VectorField = Arc<dyn Fn(&[f64]) -> (DVector<f64>, DMatrix<f64>) + Send + Sync>;
type ScalarField = Arc<dyn Fn(&[f64]) -> (f64, DVector<f64>) + Send + Sync>;

/// Which end of the edge axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Lower,
    Upper,
}

/// A windowed deformation of the embedding and of its edges.
///
/// The raw displacement returns `(V^mu, V^mu_{,a})`; edge shifts return
/// `(psi, psi_{,a})` as functions of worldsheet coordinates on the face (the
/// component along the edge axis is ignored).
#[derive(Clone)]
pub struct DeformationField {
    window: Window,
    displacement: VectorField,
    lower_shift: Option<ScalarField>,
    upper_shift: Option<ScalarField>,
    scale: f64,
}

impl std::fmt::Debug for DeformationField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DeformationField")
            .field("window", &self.window)
            .field("lower_shift", &self.lower_shift.is_some())
            .field("upper_shift", &self.upper_shift.is_some())
            .field("scale", &self.scale)
            .finish()
    }
}

impl DeformationField {
    pub fn new(
        window: Window,
        displacement: impl Fn(&[f64]) -> (DVector<f64>, DMatrix<f64>) + Send + Sync + 'static,
    ) -> Self {
        Self { window, displacement: Arc::new(displacement), lower_shift: None, upper_shift: None, scale: 1.0 }
    }

    pub fn zero(window: Window, spacetime_dim: usize) -> Self {
        let d = window.domain.dim();
        Self::new(window, move |_| (DVector::zeros(spacetime_dim), DMatrix::zeros(spacetime_dim, d)))
    }

    /// Sum of cosine modes, one spacetime component each.
    pub fn fourier(window: Window, spacetime_dim: usize, modes: Vec<FourierMode>) -> Self {
        let domain = window.domain.clone();
        let d = domain.dim();
        Self::new(window, move |xi| {
            let mut v = DVector::zeros(spacetime_dim);
            let mut j = DMatrix::zeros(spacetime_dim, d);
            for m in &modes {
                let (val, grad) = m.eval(&domain, xi);
                v[m.component] += val;
                for k in 0..d {
                    j[(m.component, k)] += grad[k];
                }
            }
            (v, j)
        })
    }

    pub fn with_shift(
        mut self,
        end: End,
        shift: impl Fn(&[f64]) -> (f64, DVector<f64>) + Send + Sync + 'static,
    ) -> Self {
        match end {
            End::Lower => self.lower_shift = Some(Arc::new(shift)),
            End::Upper => self.upper_shift = Some(Arc::new(shift)),
        }
        self
    }

    /// Edge shift as a sum of cosine modes (`component` is ignored).
    pub fn with_shift_modes(self, end: End, modes: Vec<FourierMode>) -> Self {
        let domain = self.window.domain.clone();
        self.with_shift(end, move |xi| {
            let mut v = 0.0;
            let mut g = DVector::zeros(domain.dim());
            for m in &modes {
                let (val, grad) = m.eval(&domain, xi);
                v += val;
                g += grad;
            }
            (v, g)
        })
    }

    /// The same deformation multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.scale *= factor;
        out
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Windowed `(V^mu, V^mu_{,a})` at `xi`.
    pub fn displacement(&self, xi: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let (v, j) = (self.displacement)(xi);
        let (w, dw) = self.window.value(xi);
        let jac = (j * w + &v * dw.transpose()) * self.scale;
        (v * (w * self.scale), jac)
    }

    /// Windowed `(psi, psi_{,a})` at the face point `xi`, zero if the end has
    /// no shift.
    pub fn shift(&self, end: End, xi: &[f64]) -> (f64, DVector<f64>) {
        let f = match end {
            End::Lower => &self.lower_shift,
            End::Upper => &self.upper_shift,
        };
        match f {
            None => (0.0, DVector::zeros(xi.len())),
            Some(f) => {
                let (p, dp) = f(xi);
                let (w, dw) = self.window.value(xi);
                (p * w * self.scale, (dp * w + dw * p) * self.scale)
            }
        }
    }

    /// `(Phi^a, Phi_i)` at `xi`: worldsheet components (index raised) and
    /// normal components in the default normal frame.
    pub fn components(&self, embedding: &dyn Embedding, xi: &[f64]) -> Result<(DVector<f64>, DVector<f64>)> {
        let frame = crate::geometry::frame(embedding, xi)?;
        let (v, _) = self.displacement(xi);
        let g = &frame.ambient_metric;
        let lowered = frame.tangents.transpose() * g * &v;
        let normal = frame.normals.transpose() * g * &v;
        Ok((&frame.induced_metric_inverse * lowered, normal))
    }
}

/// A worldsheet on a coordinate box whose material edges are the faces
/// `xi^edge_axis = lower / upper`.
#[derive(Clone)]
pub struct VariationProblem {
    pub embedding: Arc<dyn Embedding>,
    pub config: ActionConfig,
    pub edge_axis: usize,
    pub lower: Option<Arc<dyn BoundaryEmbedding>>,
    pub upper: Option<Arc<dyn BoundaryEmbedding>>,
    pub periodic: Vec<bool>,
}

impl VariationProblem {
    /// Problem on the entry's domain with the given tensions and grid sizes.
    /// Every boundary of the entry must be a face of its domain along one
    /// common axis.
    pub fn from_entry(entry: &CatalogEntry, mu0: f64, mub: f64, points: Vec<usize>) -> Result<Self> {
        let quadrature = Quadrature::new(entry.domain.clone(), points)?;
        let config = ActionConfig::new(mu0, mub, quadrature)?;
        let mut edge_axis = None;
        let mut lower: Option<Arc<dyn BoundaryEmbedding>> = None;
        let mut upper: Option<Arc<dyn BoundaryEmbedding>> = None;
        for b in &entry.boundaries {
            let (axis, value) = b.face.ok_or_else(|| {
                GeometryError::InvalidParameters(format!("boundary {} is not a coordinate face", b.name))
            })?;
            if edge_axis.is_some_and(|a| a != axis) {
                return Err(GeometryError::InvalidParameters("edges lie on different coordinate axes".into()));
            }
            edge_axis = Some(axis);
            let bnd: Arc<dyn BoundaryEmbedding> = b.boundary.clone();
            if value == entry.domain.lower[axis] {
                lower = Some(bnd);
            } else if value == entry.domain.upper[axis] {
                upper = Some(bnd);
            } else {
                return Err(GeometryError::InvalidParameters(format!("boundary {} is inside the domain", b.name)));
            }
        }
        Ok(Self {
            embedding: entry.embedding.clone(),
            config,
            edge_axis: edge_axis.unwrap_or(0),
            lower,
            upper,
            periodic: entry.periodic.clone(),
        })
    }

    pub fn domain(&self) -> &ParameterBox {
        &self.config.quadrature.domain
    }

    pub fn boundary(&self, end: End) -> Option<&Arc<dyn BoundaryEmbedding>> {
        match end {
            End::Lower => self.lower.as_ref(),
            End::Upper => self.upper.as_ref(),
        }
    }

    /// Window vanishing at every end that is neither periodic nor an edge.
    pub fn window(&self) -> Window {
        let d = self.domain().dim();
        let taper = (0..d)
            .map(|k| {
                if self.periodic[k] {
                    (false, false)
                } else if k == self.edge_axis {
                    (self.lower.is_none(), self.upper.is_none())
                } else {
                    (true, true)
                }
            })
            .collect();
        Window { domain: self.domain().clone(), taper }
    }

    /// Deformation with this problem's window.
    pub fn deformation(
        &self,
        displacement: impl Fn(&[f64]) -> (DVector<f64>, DMatrix<f64>) + Send + Sync + 'static,
    ) -> DeformationField {
        DeformationField::new(self.window(), displacement)
    }

    fn face_point(&self, end: End, u: &[f64]) -> Vec<f64> {
        let value = match end {
            End::Lower => self.domain().lower[self.edge_axis],
            End::Upper => self.domain().upper[self.edge_axis],
        };
        let mut xi = u.to_vec();
        xi.insert(self.edge_axis, value);
        xi
    }

    fn ends(&self) -> impl Iterator<Item = (End, &Arc<dyn BoundaryEmbedding>)> {
        [(End::Lower, self.lower.as_ref()), (End::Upper, self.upper.as_ref())]
            .into_iter()
            .filter_map(|(e, b)| b.map(|b| (e, b)))
    }
}

/// Total action `S_0 + S_b` of the undeformed problem.
pub fn total_action(problem: &VariationProblem) -> Result<f64> {
    deformed_action(problem, &DeformationField::zero(problem.window(), problem.embedding.spacetime_dim()), 0.0)
}

/// `S(X + eps V, chi + eps delta chi)`.
///
/// The bulk is integrated in coordinates `(w, s)`, `s in [0, 1]`, with
/// `xi^axis = lo(w) + s (hi(w) - lo(w))` so that the shifted edges stay on
/// grid faces.
pub fn deformed_action(problem: &VariationProblem, deformation: &DeformationField, eps: f64) -> Result<f64> {
    let emb = problem.embedding.as_ref();
    let bg = emb.background();
    let axis = problem.edge_axis;
    let domain = problem.domain();
    let (lo0, hi0) = (domain.lower[axis], domain.upper[axis]);
    let d = domain.dim();

    let edge_value = |end: End, xi_face: &[f64]| -> (f64, DVector<f64>) {
        let base = if end == End::Lower { lo0 } else { hi0 };
        if problem.boundary(end).is_none() {
            return (base, DVector::zeros(d));
        }
        let (p, dp) = deformation.shift(end, xi_face);
        (base + eps * p, dp * eps)
    };
    let metric_at = |xi: &[f64]| -> (DVector<f64>, DMatrix<f64>) {
        let (v, jv) = deformation.displacement(xi);
        let y = emb.position(xi) + v * eps;
        let j = emb.d_position(xi) + jv * eps;
        (y, j)
    };

    let mut reference = domain.clone();
    reference.lower[axis] = 0.0;
    reference.upper[axis] = 1.0;
    let grid = Quadrature { domain: reference, points: problem.config.quadrature.points.clone() };
    let area = grid.integrate(|p| {
        let s = p[axis];
        let mut face = p.to_vec();
        face[axis] = lo0;
        let (lo, dlo) = edge_value(End::Lower, &face);
        face[axis] = hi0;
        let (hi, dhi) = edge_value(End::Upper, &face);
        let mut xi = p.to_vec();
        xi[axis] = lo + s * (hi - lo);
        let (y, j) = metric_at(&xi);
        let mut t = j.clone();
        for k in 0..d {
            if k == axis {
                t.set_column(k, &(j.column(axis) * (hi - lo)));
            } else {
                let ds = dlo[k] + s * (dhi[k] - dlo[k]);
                t.set_column(k, &(j.column(k) + j.column(axis) * ds));
            }
        }
        volume_element(&t, &bg.metric_at(y.as_slice()))
    })?;

    let edge_grid = problem.config.quadrature.without_axis(axis);
    let mut length = 0.0;
    for (end, _) in problem.ends() {
        length += edge_grid.integrate(|u| {
            let mut xi = problem.face_point(end, u);
            let (value, dv) = edge_value(end, &xi);
            xi[axis] = value;
            let (y, j) = metric_at(&xi);
            let cols: Vec<DVector<f64>> =
                (0..d).filter(|&k| k != axis).map(|k| j.column(k) + j.column(axis) * dv[k]).collect();
            volume_element(&DMatrix::from_columns(&cols), &bg.metric_at(y.as_slice()))
        })?;
    }
    Ok(-problem.config.mu0 * area - problem.config.mub * length)
}

/// Central difference `[S(eps) - S(-eps)] / (2 eps)`.
pub fn first_variation_fd(problem: &VariationProblem, deformation: &DeformationField, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(GeometryError::InvalidParameters(format!("finite-difference step must be positive, got {eps}")));
    }
    let plus = deformed_action(problem, deformation, eps)?;
    let minus = deformed_action(problem, deformation, -eps)?;
    Ok((plus - minus) / (2.0 * eps))
}

/// Richardson combination of the central differences at `eps` and `eps / 2`.
pub fn first_variation_richardson(problem: &VariationProblem, deformation: &DeformationField, eps: f64) -> Result<f64> {
    let coarse = first_variation_fd(problem, deformation, eps)?;
    let fine = first_variation_fd(problem, deformation, 0.5 * eps)?;
    Ok(fine + (fine - coarse) / 3.0)
}

/// The two pieces of the analytic first variation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticVariation {
    /// `-mu_0 int sqrt|gamma| K^i Phi_i`.
    pub bulk: f64,
    /// Everything on the edges.
    pub edge: f64,
}

impl AnalyticVariation {
    pub fn total(&self) -> f64 {
        self.bulk + self.edge
    }
}

/// `D_a e_b` as columns indexed `a * D + b`, and the pieces needed for
/// projections.
struct PointGeometry {
    tangents: DMatrix<f64>,
    metric: DMatrix<f64>,
    gamma_inv: DMatrix<f64>,
    hessian: Vec<DVector<f64>>,
    sqrt_gamma: f64,
}

fn point_geometry(emb: &dyn Embedding, xi: &[f64]) -> Result<PointGeometry> {
    let bg = emb.background();
    let x = emb.position(xi);
    let e = emb.d_position(xi);
    let metric = bg.metric_at(x.as_slice());
    let gamma = e.transpose() * &metric * &e;
    let gamma_inv = invert_symmetric(&gamma)?;
    let xx = emb.dd_position(xi);
    let (n, d) = e.shape();
    let gam = if bg.is_flat_cartesian() { None } else { Some(bg.christoffels_at(x.as_slice())) };
    let mut hessian = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut v = DVector::from_fn(n, |mu, _| xx[[mu, a, b]]);
            if let Some(gam) = &gam {
                for mu in 0..n {
                    for al in 0..n {
                        for be in 0..n {
                            v[mu] += gam[[mu, al, be]] * e[(al, a)] * e[(be, b)];
                        }
                    }
                }
            }
            hessian.push(v);
        }
    }
    Ok(PointGeometry { sqrt_gamma: gamma.determinant().abs().sqrt(), tangents: e, metric, gamma_inv, hessian })
}

impl PointGeometry {
    /// Normal part of `v`.
    fn perp(&self, v: &DVector<f64>) -> DVector<f64> {
        let lowered = self.tangents.transpose() * &self.metric * v;
        v - &self.tangents * (&self.gamma_inv * lowered)
    }

    /// `P^{ab} K_ab^i Phi_i = -P^{ab} g(D_a e_b, V_perp)`.
    fn contract(&self, p: &DMatrix<f64>, v_perp: &DVector<f64>) -> f64 {
        let d = p.nrows();
        let gv = &self.metric * v_perp;
        let mut s = 0.0;
        for a in 0..d {
            for b in 0..d {
                s -= p[(a, b)] * self.hessian[a * d + b].dot(&gv);
            }
        }
        s
    }
}

/// Analytic first variation split into bulk and edge parts.
pub fn first_variation_terms(problem: &VariationProblem, deformation: &DeformationField) -> Result<AnalyticVariation> {
    let emb = problem.embedding.as_ref();
    let (mu0, mub) = (problem.config.mu0, problem.config.mub);
    let bulk = problem.config.quadrature.integrate(|xi| {
        let pg = point_geometry(emb, xi)?;
        let (v, _) = deformation.displacement(xi);
        Ok(pg.sqrt_gamma * pg.contract(&pg.gamma_inv, &pg.perp(&v)))
    })?;

    let axis = problem.edge_axis;
    let edge_grid = problem.config.quadrature.without_axis(axis);
    let mut edge = 0.0;
    for (end, bnd) in problem.ends() {
        edge += edge_grid.integrate(|u| {
            let xi = problem.face_point(end, u);
            let bd = boundary_data(bnd.as_ref(), u)?;
            let pg = point_geometry(emb, &xi)?;
            let (v, _) = deformation.displacement(&xi);
            let (psi, _) = deformation.shift(end, &xi);
            let big_psi = psi * (bd.gamma() * &bd.normal_in_m)[axis];
            let eta_phi = (bd.spacetime_normal.transpose() * &pg.metric * &v)[(0, 0)];
            let hk_phi = pg.contract(&bd.projector, &pg.perp(&v));
            let sqrt_h = bd.boundary_metric.determinant().abs().sqrt();
            Ok(sqrt_h * ((mu0 + mub * bd.edge_trace) * (eta_phi + big_psi) + mub * hk_phi))
        })?;
    }
    Ok(AnalyticVariation { bulk: -mu0 * bulk, edge: -edge })
}

/// Analytic first variation of `S_0 + S_b`.
pub fn first_variation_analytic(problem: &VariationProblem, deformation: &DeformationField) -> Result<f64> {
    Ok(first_variation_terms(problem, deformation)?.total())
}

/// `delta gamma_ab = 2 K_ab^i Phi_i + nabla_a Phi_b + nabla_b Phi_a` at `xi`.
pub fn metric_variation(embedding: &dyn Embedding, xi: &[f64], deformation: &DeformationField) -> Result<DMatrix<f64>> {
    let local = local_geometry(embedding, xi, None)?;
    let frame = &local.frame;
    let g = &frame.ambient_metric;
    let (v, jv) = deformation.displacement(xi);
    let d = frame.dim();
    let n = v.len();
    let phi_normal = frame.normals.transpose() * g * &v;
    let phi_lower = frame.tangents.transpose() * g * &v;
    let mut dphi = DMatrix::zeros(d, d);
    for a in 0..d {
        // D_a V
        let dv = jv.column(a).into_owned() + local.connection_term(a, &v);
        for b in 0..d {
            let deb = DVector::from_fn(n, |mu, _| local.covariant_hessian[[mu, a, b]]);
            let partial = (dv.transpose() * g * frame.tangent(b))[(0, 0)] + (v.transpose() * g * &deb)[(0, 0)];
            let gamma_term: f64 = (0..d).map(|c| local.connection[[a, b, c]] * phi_lower[c]).sum();
            dphi[(a, b)] = partial - gamma_term;
        }
    }
    let mut out = DMatrix::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            let k: f64 = (0..phi_normal.len()).map(|i| local.extrinsic[[a, b, i]] * phi_normal[i]).sum();
            out[(a, b)] = 2.0 * k + dphi[(a, b)] + dphi[(b, a)];
        }
    }
    Ok(out)
}
