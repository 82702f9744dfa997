//! Geometry of the edge worldsheet: embedded in the parent worldsheet, and
//! directly in spacetime.
//!
//! The boundary normal `eta` is always the *outward* unit normal of the
//! material region, chosen with the help of an explicit orientation hint. With
//! that orientation the edge equation reads `mu_b k + mu_0 = 0` and the
//! proper acceleration of a string endpoint is `-(mu_0 / mu_b) eta`.
//!
//! Because `h^{AB}` is negative along a timelike edge, the boundary Laplacian
//! of the embedding functions is `D^A D_A X = -h^{AB} K^I_AB n_I`, so that on a
//! solution `eta . [D^A D_A X + Gamma H] = -k = +mu_0 / mu_b` and
//! `n_i . [D^A D_A X + Gamma H] = -H^{ab} K_ab^i`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use ndarray::Array3;

use crate::embedding::{fd_hessian_from_jacobian, fd_jacobian, Embedding, DEFAULT_FD_STEP};
use crate::error::{GeometryError, Result};
use crate::geometry::{invert_symmetric, local_geometry, LocalGeometry, NormalGauge, FRAME_FD_STEP};

/// Map `xi^a = chi^a(u^A)` of the edge into the parent worldsheet.
pub trait BoundaryEmbedding: Send + Sync {
    fn parent(&self) -> &dyn Embedding;
    /// D - 1.
    fn boundary_dim(&self) -> usize;
    fn chi(&self, u: &[f64]) -> DVector<f64>;
    /// `chi^a_{,A}`, D x (D - 1).
    fn d_chi(&self, u: &[f64]) -> DMatrix<f64>;
    /// `chi^a_{,AB}`, indexed `[a, A, B]`.
    fn dd_chi(&self, u: &[f64]) -> Array3<f64>;
    /// A worldsheet vector with positive inner product against the outward
    /// normal at `u`.
    fn orientation_hint(&self, u: &[f64]) -> DVector<f64>;
}

type ChiFn = Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;
type DChiFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
type DdChiFn = Arc<dyn Fn(&[f64]) -> Array3<f64> + Send + Sync>;

/// Boundary embedding assembled from closures.
#[derive(Clone)]
pub struct FnBoundary {
    parent: Arc<dyn Embedding>,
    dim: usize,
    chi: ChiFn,
    d_chi: Option<DChiFn>,
    dd_chi: Option<DdChiFn>,
    hint: ChiFn,
}

impl FnBoundary {
    pub fn new(
        parent: Arc<dyn Embedding>,
        chi: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static,
        hint: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        let dim = parent.worldsheet_dim() - 1;
        Self { parent, dim, chi: Arc::new(chi), d_chi: None, dd_chi: None, hint: Arc::new(hint) }
    }

    pub fn with_derivatives(
        mut self,
        d_chi: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
        dd_chi: impl Fn(&[f64]) -> Array3<f64> + Send + Sync + 'static,
    ) -> Self {
        self.d_chi = Some(Arc::new(d_chi));
        self.dd_chi = Some(Arc::new(dd_chi));
        self
    }

    /// The face `xi^axis = value` of a coordinate box, parametrized by the
    /// remaining coordinates in order. `outward` is +1 when the material lies
    /// at smaller values of `xi^axis`, -1 otherwise.
    pub fn coordinate_face(parent: Arc<dyn Embedding>, axis: usize, value: f64, outward: f64) -> Self {
        let d = parent.worldsheet_dim();
        let insert = move |u: &[f64]| {
            let mut xi = Vec::with_capacity(d);
            xi.extend_from_slice(&u[..axis]);
            xi.push(value);
            xi.extend_from_slice(&u[axis..]);
            DVector::from_vec(xi)
        };
        let d_chi = move |_u: &[f64]| {
            let mut m = DMatrix::zeros(d, d - 1);
            for col in 0..d - 1 {
                let row = if col < axis { col } else { col + 1 };
                m[(row, col)] = 1.0;
            }
            m
        };
        let hint = move |_u: &[f64]| {
            let mut v = DVector::zeros(d);
            v[axis] = outward.signum();
            v
        };
        Self::new(parent, insert, hint).with_derivatives(d_chi, move |_u: &[f64]| Array3::zeros((d, d - 1, d - 1)))
    }

    pub fn parent_arc(&self) -> Arc<dyn Embedding> {
        self.parent.clone()
    }
}

impl BoundaryEmbedding for FnBoundary {
    fn parent(&self) -> &dyn Embedding {
        self.parent.as_ref()
    }

    fn boundary_dim(&self) -> usize {
        self.dim
    }

    fn chi(&self, u: &[f64]) -> DVector<f64> {
        (self.chi)(u)
    }

    fn d_chi(&self, u: &[f64]) -> DMatrix<f64> {
        match &self.d_chi {
            Some(f) => f(u),
            None => fd_jacobian(&*self.chi, u, DEFAULT_FD_STEP),
        }
    }

    fn dd_chi(&self, u: &[f64]) -> Array3<f64> {
        match &self.dd_chi {
            Some(f) => f(u),
            None => {
                let chi = self.chi.clone();
                let jac = move |p: &[f64]| fd_jacobian(&*chi, p, DEFAULT_FD_STEP);
                fd_hessian_from_jacobian(&jac, u, 1e-4)
            }
        }
    }

    fn orientation_hint(&self, u: &[f64]) -> DVector<f64> {
        (self.hint)(u)
    }
}

/// Geometry of the edge as a hypersurface of the worldsheet.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub point: Vec<f64>,
    pub chi: DVector<f64>,
    /// `epsilon^a_A`, D x (D - 1).
    pub tangents_in_m: DMatrix<f64>,
    /// `eta^a`, outward.
    pub normal_in_m: DVector<f64>,
    /// `h_AB`.
    pub boundary_metric: DMatrix<f64>,
    pub boundary_metric_inverse: DMatrix<f64>,
    /// `k_AB = -gamma(eta, nabla_A epsilon_B)`.
    pub edge_curvature: DMatrix<f64>,
    /// `k = h^{AB} k_AB`.
    pub edge_trace: f64,
    /// `H^{ab} = h^{AB} epsilon^a_A epsilon^b_B`.
    pub projector: DMatrix<f64>,
    /// `eta^mu = e^mu_a eta^a`.
    pub spacetime_normal: DVector<f64>,
    /// `nabla_A epsilon^a_B`, indexed `[a, A, B]`.
    pub tangent_derivatives: Array3<f64>,
    /// Boundary connection `gamma_AB^C`, indexed `[A, B, C]`.
    pub boundary_connection: Array3<f64>,
    /// Parent geometry at `chi(point)`.
    pub parent: LocalGeometry,
}

impl BoundaryData {
    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.parent.frame.induced_metric
    }

    /// Spacetime tangents `e^mu_A = e^mu_a epsilon^a_A`.
    pub fn spacetime_tangents(&self) -> DMatrix<f64> {
        &self.parent.frame.tangents * &self.tangents_in_m
    }

    /// `(idempotence, trace, completeness, eta orthonormality)` defects.
    pub fn projector_defects(&self) -> (f64, f64, f64, f64) {
        let gamma = self.gamma();
        let h = &self.projector;
        let idem = (h * gamma * h - h).amax();
        let trace = ((h.transpose() * gamma).trace() - self.tangents_in_m.ncols() as f64).abs();
        let eta = &self.normal_in_m;
        let complete = (h + eta * eta.transpose() - &self.parent.frame.induced_metric_inverse).amax();
        let ortho = (self.tangents_in_m.transpose() * gamma * eta)
            .amax()
            .max(((eta.transpose() * gamma * eta)[(0, 0)] - 1.0).abs());
        (idem, trace, complete, ortho)
    }
}

pub fn boundary_data(bnd: &dyn BoundaryEmbedding, point: &[f64]) -> Result<BoundaryData> {
    let hint = bnd.orientation_hint(point);
    boundary_data_with_hint(bnd, point, &hint, None)
}

/// Boundary geometry with an explicit orientation hint and, optionally, the
/// normal gauge to use for the parent frame.
pub fn boundary_data_with_hint(
    bnd: &dyn BoundaryEmbedding,
    point: &[f64],
    orientation_hint: &DVector<f64>,
    gauge: Option<&NormalGauge>,
) -> Result<BoundaryData> {
    let parent = bnd.parent();
    let d = parent.worldsheet_dim();
    if point.len() != bnd.boundary_dim() || bnd.boundary_dim() + 1 != d {
        return Err(GeometryError::DimensionMismatch(format!(
            "boundary point has {} coordinates, expected {}",
            point.len(),
            d - 1
        )));
    }
    let chi = bnd.chi(point);
    let local = local_geometry(parent, chi.as_slice(), gauge)?;
    let eps = bnd.d_chi(point);
    let ddchi = bnd.dd_chi(point);
    let gamma = &local.frame.induced_metric;
    let gamma_inv = &local.frame.induced_metric_inverse;
    let h = eps.transpose() * gamma * &eps;
    let h_inv = invert_symmetric(&h)?;

    // normal covector: Euclidean complement of the columns of epsilon
    let q = eps.clone().qr().q();
    let mut nu = DVector::zeros(d);
    for k in 0..d {
        let mut cand = DVector::zeros(d);
        cand[k] = 1.0;
        cand -= &q * (q.transpose() * &cand);
        if cand.norm() > nu.norm() {
            nu = cand;
        }
    }
    let nu = nu.normalize();
    let eta_raw = gamma_inv * &nu;
    let norm2 = nu.dot(&eta_raw);
    let scale = nu.norm_squared() * gamma_inv.amax();
    if !(norm2 > 1e-10 * scale) {
        return Err(GeometryError::NullBoundary { norm: norm2 / scale });
    }
    let mut eta = eta_raw / norm2.sqrt();
    if (eta.transpose() * gamma * orientation_hint)[(0, 0)] < 0.0 {
        eta = -eta;
    }

    let db = d - 1;
    let conn = &local.connection;
    let mut grad = Array3::zeros((d, db, db));
    for a in 0..d {
        for aa in 0..db {
            for bb in 0..db {
                let mut s = ddchi[[a, aa, bb]];
                for b in 0..d {
                    for c in 0..d {
                        s += conn[[b, c, a]] * eps[(b, aa)] * eps[(c, bb)];
                    }
                }
                grad[[a, aa, bb]] = s;
            }
        }
    }
    let g_eta = gamma * &eta;
    let g_eps = gamma * &eps;
    let mut k_ab = DMatrix::zeros(db, db);
    let mut lowered = Array3::zeros((db, db, db));
    for aa in 0..db {
        for bb in 0..db {
            k_ab[(aa, bb)] = -(0..d).map(|a| g_eta[a] * grad[[a, aa, bb]]).sum::<f64>();
            for cc in 0..db {
                lowered[[aa, bb, cc]] = (0..d).map(|a| g_eps[(a, cc)] * grad[[a, aa, bb]]).sum::<f64>();
            }
        }
    }
    let k_ab = (&k_ab + k_ab.transpose()) * 0.5;
    let mut bconn = Array3::zeros((db, db, db));
    for aa in 0..db {
        for bb in 0..db {
            for cc in 0..db {
                bconn[[aa, bb, cc]] = (0..db).map(|dd| h_inv[(cc, dd)] * lowered[[aa, bb, dd]]).sum::<f64>();
            }
        }
    }
    let edge_trace = (&h_inv.transpose() * &k_ab).trace();
    let projector = &eps * &h_inv * eps.transpose();
    let spacetime_normal = &local.frame.tangents * &eta;
    Ok(BoundaryData {
        point: point.to_vec(),
        chi,
        tangents_in_m: eps,
        normal_in_m: eta,
        boundary_metric: h,
        boundary_metric_inverse: h_inv,
        edge_curvature: k_ab,
        edge_trace,
        projector,
        spacetime_normal,
        tangent_derivatives: grad,
        boundary_connection: bconn,
        parent: local,
    })
}

/// `mu_b k + mu_0`: zero exactly when the edge equation holds.
pub fn edge_equation_residual(bd: &BoundaryData, mu0: f64, mub: f64) -> f64 {
    mub * bd.edge_trace + mu0
}

fn projected_curvature(bd: &BoundaryData) -> DVector<f64> {
    let k = &bd.parent.extrinsic;
    let (d, _, c) = k.dim();
    DVector::from_fn(c, |i, _| {
        let mut s = 0.0;
        for a in 0..d {
            for b in 0..d {
                s += bd.projector[(a, b)] * k[[a, b, i]];
            }
        }
        s
    })
}

/// `H^{ab} K_ab^i` on the edge, one entry per worldsheet normal.
pub fn boundary_condition_residual(bnd: &dyn BoundaryEmbedding, point: &[f64]) -> Result<DVector<f64>> {
    Ok(projected_curvature(&boundary_data(bnd, point)?))
}

/// `D^A D_A X^mu + Gamma^mu_{alpha beta} H^{alpha beta}` assembled from the
/// composed map `X o chi` by the chain rule.
pub fn boundary_laplacian_of_embedding(bnd: &dyn BoundaryEmbedding, bd: &BoundaryData) -> DVector<f64> {
    let parent = bnd.parent();
    let frame = &bd.parent.frame;
    let e = &frame.tangents;
    let n = e.nrows();
    let d = e.ncols();
    let db = d - 1;
    let xx = parent.dd_position(bd.chi.as_slice());
    let ddchi = bnd.dd_chi(&bd.point);
    let eps = &bd.tangents_in_m;
    let e_b = e * eps;
    let hi = &bd.boundary_metric_inverse;
    let mut out = DVector::zeros(n);
    for mu in 0..n {
        let mut s = 0.0;
        for aa in 0..db {
            for bb in 0..db {
                let mut second = 0.0;
                for a in 0..d {
                    second += e[(mu, a)] * ddchi[[a, aa, bb]];
                    for b in 0..d {
                        second += xx[[mu, a, b]] * eps[(a, aa)] * eps[(b, bb)];
                    }
                }
                let corr: f64 = (0..db).map(|cc| bd.boundary_connection[[aa, bb, cc]] * e_b[(mu, cc)]).sum();
                s += hi[(aa, bb)] * (second - corr);
            }
        }
        out[mu] = s;
    }
    if !parent.background().is_flat_cartesian() {
        let gam = &bd.parent.christoffels;
        let h_sp = e * &bd.projector * e.transpose();
        for mu in 0..n {
            let mut s = 0.0;
            for al in 0..n {
                for be in 0..n {
                    s += gam[[mu, al, be]] * h_sp[(al, be)];
                }
            }
            out[mu] += s;
        }
    }
    out
}

/// The boundary conditions and the edge equation written through the
/// boundary Laplacian of the embedding functions.
#[derive(Debug, Clone)]
pub struct LaplacianResiduals {
    /// `n^i_mu L^mu`; equals `-H^{ab} K_ab^i`.
    pub normal: DVector<f64>,
    /// `eta_mu L^mu - mu_0 / mu_b`.
    pub eta: f64,
    /// `L^mu - (mu_0 / mu_b) eta^mu`.
    pub combined: DVector<f64>,
}

pub fn boundary_laplacian_residuals(
    bnd: &dyn BoundaryEmbedding,
    point: &[f64],
    mu0: f64,
    mub: f64,
) -> Result<LaplacianResiduals> {
    if !(mub > 0.0) {
        return Err(GeometryError::InvalidParameters(format!("edge tension must be positive, got {mub}")));
    }
    let bd = boundary_data(bnd, point)?;
    let lap = boundary_laplacian_of_embedding(bnd, &bd);
    let frame = &bd.parent.frame;
    let gl = &frame.ambient_metric * &lap;
    let normal = frame.normals.transpose() * &gl;
    let ratio = mu0 / mub;
    let eta = bd.spacetime_normal.dot(&gl) - ratio;
    let combined = lap - &bd.spacetime_normal * ratio;
    Ok(LaplacianResiduals { normal, eta, combined })
}

/// A scalar field on the worldsheet with coordinate derivatives.
pub trait WorldsheetScalar {
    fn value(&self, xi: &[f64]) -> f64;
    fn gradient(&self, xi: &[f64]) -> DVector<f64>;
    fn hessian(&self, xi: &[f64]) -> DMatrix<f64>;
}

/// `Delta psi - [D^A D_A psi + eta^a eta^b nabla_a nabla_b psi + k eta^a nabla_a psi]`.
pub fn laplacian_decomposition_residual(
    bnd: &dyn BoundaryEmbedding,
    point: &[f64],
    field: &dyn WorldsheetScalar,
) -> Result<f64> {
    let bd = boundary_data(bnd, point)?;
    let xi = bd.chi.as_slice();
    let grad = field.gradient(xi);
    let hess = field.hessian(xi);
    let d = grad.len();
    let db = d - 1;
    let conn = &bd.parent.connection;
    let cov = DMatrix::from_fn(d, d, |a, b| hess[(a, b)] - (0..d).map(|c| conn[[a, b, c]] * grad[c]).sum::<f64>());
    let gi = &bd.parent.frame.induced_metric_inverse;
    let laplacian = (gi * &cov).trace();

    let eps = &bd.tangents_in_m;
    let ddchi = bnd.dd_chi(point);
    let hi = &bd.boundary_metric_inverse;
    let first = eps.transpose() * &grad;
    let mut boundary_lap = 0.0;
    for aa in 0..db {
        for bb in 0..db {
            let mut second = (eps.column(aa).transpose() * &hess * eps.column(bb))[(0, 0)];
            second += (0..d).map(|a| grad[a] * ddchi[[a, aa, bb]]).sum::<f64>();
            let corr: f64 = (0..db).map(|cc| bd.boundary_connection[[aa, bb, cc]] * first[cc]).sum();
            boundary_lap += hi[(aa, bb)] * (second - corr);
        }
    }
    let eta = &bd.normal_in_m;
    let normal_second = (eta.transpose() * &cov * eta)[(0, 0)];
    let normal_first = bd.edge_trace * eta.dot(&grad);
    Ok(laplacian - (boundary_lap + normal_second + normal_first))
}

/// Geometry of the edge embedded directly in spacetime, in the adapted
/// normal basis `n^I = {eta, n^i}` (index 0 is `eta`).
#[derive(Debug, Clone)]
pub struct AdaptedEdgeData {
    /// `e^mu_A`.
    pub spacetime_tangents: DMatrix<f64>,
    /// `n^mu_I`, N x (N - D + 1), column 0 is `eta^mu`.
    pub adapted_normals: DMatrix<f64>,
    /// `K_AB^I`, `[A, B, I]`.
    pub edge_extrinsic: Array3<f64>,
    /// `omega_A^{IJ} = g(D_A n^I, n^J)`, `[A, I, J]`.
    pub edge_twist: Array3<f64>,
    /// `gamma_AB^C` from the direct embedding, `[A, B, C]`.
    pub connection: Array3<f64>,
    pub boundary: BoundaryData,
}

/// Largest violations of the inheritance relations between the direct and the
/// hierarchical description of the edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InheritanceDefects {
    /// `K^i_AB - eps^a_A eps^b_B K^i_ab`.
    pub projected_curvature: f64,
    /// `K^0_AB - k_AB`.
    pub edge_curvature: f64,
    /// `omega_{A ij} - eps^a_A omega_{a ij}`.
    pub normal_twist: f64,
    /// `omega_{A i0} - eta^a eps^b_A K_{ab i}`.
    pub mixed_twist: f64,
    /// `omega_A^{IJ} + omega_A^{JI}`.
    pub antisymmetry: f64,
}

impl InheritanceDefects {
    pub fn max(&self) -> f64 {
        self.projected_curvature
            .max(self.edge_curvature)
            .max(self.normal_twist)
            .max(self.mixed_twist)
            .max(self.antisymmetry)
    }
}

/// Direct spacetime geometry of the edge at `point` using the parent normal
/// gauge `gauge` (or the default gauge at `chi(point)`).
pub fn adapted_edge_data_in_gauge(
    bnd: &dyn BoundaryEmbedding,
    point: &[f64],
    gauge: Option<&NormalGauge>,
    step: f64,
) -> Result<AdaptedEdgeData> {
    let hint = bnd.orientation_hint(point);
    let bd = boundary_data_with_hint(bnd, point, &hint, gauge)?;
    let gauge = bd.parent.frame.gauge.clone();
    let parent = bnd.parent();
    let frame = &bd.parent.frame;
    let e = &frame.tangents;
    let n = e.nrows();
    let db = bnd.boundary_dim();
    let c = frame.codim();
    let e_b = bd.spacetime_tangents();
    let adapted = adapted_normals(&bd);

    let (k_edge, connection) = edge_extrinsic_direct(bnd, &bd);
    let flat = parent.background().is_flat_cartesian();
    let g_adapted = &frame.ambient_metric * &adapted;

    // twist from differences of the adapted frame along the edge
    let mut twist = Array3::zeros((db, c + 1, c + 1));
    let mut p = point.to_vec();
    for aa in 0..db {
        p[aa] = point[aa] + step;
        let plus = adapted_frame_at(bnd, &p, &gauge)?;
        p[aa] = point[aa] - step;
        let minus = adapted_frame_at(bnd, &p, &gauge)?;
        p[aa] = point[aa];
        for i in 0..=c {
            let mut dn: DVector<f64> = (plus.column(i) - minus.column(i)) / (2.0 * step);
            if !flat {
                let gam = &bd.parent.christoffels;
                let ni = adapted.column(i);
                for mu in 0..n {
                    let mut s = 0.0;
                    for al in 0..n {
                        for be in 0..n {
                            s += gam[[mu, al, be]] * e_b[(al, aa)] * ni[be];
                        }
                    }
                    dn[mu] += s;
                }
            }
            for j in 0..=c {
                twist[[aa, i, j]] = g_adapted.column(j).dot(&dn);
            }
        }
    }
    Ok(AdaptedEdgeData {
        spacetime_tangents: e_b,
        adapted_normals: adapted,
        edge_extrinsic: k_edge,
        edge_twist: twist,
        connection,
        boundary: bd,
    })
}

/// `K_AB^I` (adapted basis, index 0 is `eta`) and the connection
/// `gamma_AB^C` of the edge, computed from the composed map `X o chi`.
pub fn edge_extrinsic_direct(bnd: &dyn BoundaryEmbedding, bd: &BoundaryData) -> (Array3<f64>, Array3<f64>) {
    let parent = bnd.parent();
    let frame = &bd.parent.frame;
    let e = &frame.tangents;
    let n = e.nrows();
    let db = bnd.boundary_dim();
    let c = frame.codim();
    let e_b = bd.spacetime_tangents();
    let adapted = adapted_normals(bd);
    let point = bd.point.as_slice();
    let xx = parent.dd_position(bd.chi.as_slice());
    let ddchi = bnd.dd_chi(point);
    let eps = &bd.tangents_in_m;
    let d = e.ncols();
    let flat = parent.background().is_flat_cartesian();
    let g = &frame.ambient_metric;
    let g_adapted = g * &adapted;
    let g_eb = g * &e_b;
    let mut k_edge = Array3::zeros((db, db, c + 1));
    let mut lowered = Array3::zeros((db, db, db));
    for aa in 0..db {
        for bb in 0..db {
            let mut de = DVector::zeros(n);
            for mu in 0..n {
                let mut s = 0.0;
                for a in 0..d {
                    s += e[(mu, a)] * ddchi[[a, aa, bb]];
                    for b in 0..d {
                        s += xx[[mu, a, b]] * eps[(a, aa)] * eps[(b, bb)];
                    }
                }
                de[mu] = s;
            }
            if !flat {
                let gam = &bd.parent.christoffels;
                for mu in 0..n {
                    let mut s = 0.0;
                    for al in 0..n {
                        for be in 0..n {
                            s += gam[[mu, al, be]] * e_b[(al, aa)] * e_b[(be, bb)];
                        }
                    }
                    de[mu] += s;
                }
            }
            for i in 0..=c {
                k_edge[[aa, bb, i]] = -g_adapted.column(i).dot(&de);
            }
            for cc in 0..db {
                lowered[[aa, bb, cc]] = g_eb.column(cc).dot(&de);
            }
        }
    }
    let hi = &bd.boundary_metric_inverse;
    let mut connection = Array3::zeros((db, db, db));
    for aa in 0..db {
        for bb in 0..db {
            for cc in 0..db {
                connection[[aa, bb, cc]] = (0..db).map(|k| hi[(cc, k)] * lowered[[aa, bb, k]]).sum::<f64>();
            }
        }
    }

    (k_edge, connection)
}

pub fn adapted_edge_data(bnd: &dyn BoundaryEmbedding, point: &[f64]) -> Result<AdaptedEdgeData> {
    adapted_edge_data_in_gauge(bnd, point, None, FRAME_FD_STEP)
}

/// `{eta, n^i}` as columns.
pub fn adapted_normals(bd: &BoundaryData) -> DMatrix<f64> {
    let normals = &bd.parent.frame.normals;
    let (n, c) = normals.shape();
    let mut out = DMatrix::zeros(n, c + 1);
    out.set_column(0, &bd.spacetime_normal);
    for i in 0..c {
        out.set_column(i + 1, &normals.column(i));
    }
    out
}

pub(crate) fn adapted_frame_at(bnd: &dyn BoundaryEmbedding, u: &[f64], gauge: &NormalGauge) -> Result<DMatrix<f64>> {
    let hint = bnd.orientation_hint(u);
    let bd = boundary_data_with_hint(bnd, u, &hint, Some(gauge))?;
    Ok(adapted_normals(&bd))
}

impl AdaptedEdgeData {
    /// Compares the direct description with the one inherited from the
    /// worldsheet. `worldsheet_twist` is `omega_a^{ij}` at `chi(point)` in the
    /// same gauge, indexed `[a, i, j]`.
    pub fn inheritance_defects(&self, worldsheet_twist: &Array3<f64>) -> InheritanceDefects {
        let bd = &self.boundary;
        let k = &bd.parent.extrinsic;
        let (d, _, c) = k.dim();
        let db = d - 1;
        let eps = &bd.tangents_in_m;
        let eta = &bd.normal_in_m;
        let mut out = InheritanceDefects {
            projected_curvature: 0.0,
            edge_curvature: 0.0,
            normal_twist: 0.0,
            mixed_twist: 0.0,
            antisymmetry: 0.0,
        };
        for aa in 0..db {
            for bb in 0..db {
                for i in 0..c {
                    let mut proj = 0.0;
                    for a in 0..d {
                        for b in 0..d {
                            proj += eps[(a, aa)] * eps[(b, bb)] * k[[a, b, i]];
                        }
                    }
                    out.projected_curvature =
                        out.projected_curvature.max((self.edge_extrinsic[[aa, bb, i + 1]] - proj).abs());
                }
                out.edge_curvature = out
                    .edge_curvature
                    .max((self.edge_extrinsic[[aa, bb, 0]] - bd.edge_curvature[(aa, bb)]).abs());
            }
            for i in 0..c {
                for j in 0..c {
                    let inherited: f64 = (0..d).map(|a| eps[(a, aa)] * worldsheet_twist[[a, i, j]]).sum();
                    out.normal_twist = out.normal_twist.max((self.edge_twist[[aa, i + 1, j + 1]] - inherited).abs());
                }
                let mut mixed = 0.0;
                for a in 0..d {
                    for b in 0..d {
                        mixed += eta[a] * eps[(b, aa)] * k[[a, b, i]];
                    }
                }
                out.mixed_twist = out.mixed_twist.max((self.edge_twist[[aa, i + 1, 0]] - mixed).abs());
            }
            for i in 0..=c {
                for j in 0..=c {
                    out.antisymmetry =
                        out.antisymmetry.max((self.edge_twist[[aa, i, j]] + self.edge_twist[[aa, j, i]]).abs());
                }
            }
        }
        out
    }
}

/// Convenience: checks every inheritance relation against `tol`, computing the
/// worldsheet twist in the same gauge.
pub fn check_inheritance(bnd: &dyn BoundaryEmbedding, point: &[f64], tol: f64) -> Result<InheritanceDefects> {
    let data = adapted_edge_data(bnd, point)?;
    let gauge = data.boundary.parent.frame.gauge.clone();
    let curv = crate::geometry::extrinsic_curvature_with(
        bnd.parent(),
        data.boundary.chi.as_slice(),
        Some(&gauge),
    )?;
    let defects = data.inheritance_defects(&curv.twist);
    if defects.max() > tol {
        return Err(GeometryError::GaugeFailure(format!(
            "inheritance relations violated: {defects:?} (tolerance {tol:e})"
        )));
    }
    Ok(defects)
}
