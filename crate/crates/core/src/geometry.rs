//! Intrinsic and extrinsic geometry of an embedded worldsheet.
//!
//! Conventions (all numerical values in the crate follow these):
//!
//! * `K_ab^i = -g(n^i, D_a e_b)` with `D_a e_b = X_{,ab} + Gamma X_{,a} X_{,b}`.
//! * The Gauss-Weingarten equations read `D_a e_b = gamma_ab^c e_c - K_ab^i n_i`
//!   and `D_a n_i = K_ab,i e^b + omega_a,i^j n_j`, so
//!   `omega_a^{ij} = g(D_a n^i, n^j)`.
//! * Normals are fixed by Gram-Schmidt over the background coordinate axes in
//!   ascending order, skipping axes (nearly) spanned by the tangents, with the
//!   first non-negligible component of each normal made positive. The twist
//!   depends on this choice; `K_ab^i` only through a constant rotation.
//!
//! | surface | normal | `K_ab` | trace |
//! |---|---|---|---|
//! | sphere of radius r, outward normal | `X/r` | `gamma_ab / r` | `+2/r` |
//! | circle of radius rho in the plane, `eta` toward the centre | `-r_hat` | `k_uu = -rho` | `k = -1/rho` |
//! | helicoid edge at sigma = R, `eta = +d_sigma` | - | `k_tt = omega^2 R` | `-omega^2 R/(1-omega^2 R^2)` |

use nalgebra::{DMatrix, DVector};
use ndarray::{Array3, Array4};

use crate::background::{BackgroundMetric, Signature};
use crate::embedding::Embedding;
use crate::error::{GeometryError, Result};

/// Step used for finite differences of frame fields (twist potential).
pub const FRAME_FD_STEP: f64 = 1e-5;

/// Relative squared-norm below which a projected coordinate axis is rejected
/// as a Gram-Schmidt seed.
const SEED_ACCEPT: f64 = 1e-3;

/// Deterministic choice of the normal frame gauge.
///
/// `seeds` are the coordinate axes fed to Gram-Schmidt and `signs` the
/// orientation applied to each resulting vector. A gauge determined at one
/// point can be reused at nearby points to obtain a smooth local frame field.
/// An optional constant rotation `n'_i = R_ij n_j` is applied last.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalGauge {
    pub seeds: Vec<usize>,
    pub signs: Vec<f64>,
    pub rotation: Option<DMatrix<f64>>,
}

impl NormalGauge {
    pub fn with_rotation(mut self, rotation: DMatrix<f64>) -> Self {
        self.rotation = Some(rotation);
        self
    }
}

/// Tangents, normals and the induced metric at a worldsheet point.
#[derive(Debug, Clone)]
pub struct Frame {
    pub point: Vec<f64>,
    pub position: DVector<f64>,
    /// `e^mu_a`, N x D.
    pub tangents: DMatrix<f64>,
    /// `n^mu_i`, N x (N - D).
    pub normals: DMatrix<f64>,
    pub induced_metric: DMatrix<f64>,
    pub induced_metric_inverse: DMatrix<f64>,
    /// `g_{mu nu}` at the embedded point.
    pub ambient_metric: DMatrix<f64>,
    pub gauge: NormalGauge,
}

impl Frame {
    /// Background inner product at this point.
    pub fn g(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (u.transpose() * &self.ambient_metric * v)[(0, 0)]
    }

    pub fn tangent(&self, a: usize) -> DVector<f64> {
        self.tangents.column(a).into_owned()
    }

    pub fn normal(&self, i: usize) -> DVector<f64> {
        self.normals.column(i).into_owned()
    }

    pub fn dim(&self) -> usize {
        self.tangents.ncols()
    }

    pub fn codim(&self) -> usize {
        self.normals.ncols()
    }

    /// Largest deviations from `g(e_a, n_i) = 0` and `g(n_i, n_j) = delta_ij`.
    pub fn orthonormality_defect(&self) -> (f64, f64) {
        let g = &self.ambient_metric;
        let en = self.tangents.transpose() * g * &self.normals;
        let nn = self.normals.transpose() * g * &self.normals - DMatrix::identity(self.codim(), self.codim());
        (en.amax(), nn.amax())
    }
}

/// `e^mu_a = X^mu_{,a}` at `point`.
pub fn tangent_basis(embedding: &dyn Embedding, point: &[f64]) -> Result<DMatrix<f64>> {
    check_point(embedding, point)?;
    let e = embedding.d_position(point);
    let d = embedding.worldsheet_dim();
    let rank = numerical_rank(&e);
    if rank < d {
        return Err(GeometryError::DegenerateImmersion { rank, expected: d });
    }
    Ok(e)
}

/// `gamma_ab = g(e_a, e_b)` at `point`.
pub fn induced_metric(embedding: &dyn Embedding, point: &[f64]) -> Result<DMatrix<f64>> {
    let e = tangent_basis(embedding, point)?;
    let x = embedding.position(point);
    let g = embedding.background().metric_at(x.as_slice());
    let gamma = e.transpose() * &g * &e;
    check_metric(&gamma, &e, embedding.background().signature())?;
    Ok(gamma)
}

/// Unit normals in the default gauge.
pub fn normal_frame(embedding: &dyn Embedding, point: &[f64]) -> Result<DMatrix<f64>> {
    Ok(frame(embedding, point)?.normals)
}

/// Full frame in the default (automatically seeded) gauge.
pub fn frame(embedding: &dyn Embedding, point: &[f64]) -> Result<Frame> {
    build_frame(embedding, point, None)
}

/// Frame with normals built from a previously determined gauge.
pub fn frame_in_gauge(embedding: &dyn Embedding, point: &[f64], gauge: &NormalGauge) -> Result<Frame> {
    build_frame(embedding, point, Some(gauge))
}

fn build_frame(embedding: &dyn Embedding, point: &[f64], gauge: Option<&NormalGauge>) -> Result<Frame> {
    let e = tangent_basis(embedding, point)?;
    let x = embedding.position(point);
    let g = embedding.background().metric_at(x.as_slice());
    let gamma = e.transpose() * &g * &e;
    check_metric(&gamma, &e, embedding.background().signature())?;
    let gamma_inv = invert_symmetric(&gamma)?;
    let codim = embedding.codimension();
    let (normals, gauge) = match gauge {
        None => auto_normals(&e, &gamma_inv, &g, codim)?,
        Some(gauge) => (seeded_normals(&e, &gamma_inv, &g, gauge)?, gauge.clone()),
    };
    Ok(Frame {
        point: point.to_vec(),
        position: x,
        tangents: e,
        normals,
        induced_metric: gamma,
        induced_metric_inverse: gamma_inv,
        ambient_metric: g,
        gauge,
    })
}

fn check_point(embedding: &dyn Embedding, point: &[f64]) -> Result<()> {
    if point.len() != embedding.worldsheet_dim() {
        return Err(GeometryError::DimensionMismatch(format!(
            "point has {} coordinates, worldsheet dimension is {}",
            point.len(),
            embedding.worldsheet_dim()
        )));
    }
    if point.iter().any(|c| !c.is_finite()) {
        return Err(GeometryError::InvalidParameters("non-finite worldsheet point".into()));
    }
    Ok(())
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.max();
    if !(max > 0.0) {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-10 * max).count()
}

fn check_metric(gamma: &DMatrix<f64>, tangents: &DMatrix<f64>, signature: Signature) -> Result<()> {
    let scale: f64 = tangents.column_iter().map(|c| c.norm_squared()).product();
    let threshold = 1e-12 * scale;
    let det = gamma.determinant();
    if !(det.abs() >= threshold) {
        return Err(GeometryError::DegenerateMetric { det, threshold });
    }
    let eig = gamma.clone().symmetric_eigenvalues();
    let negative = eig.iter().filter(|&&l| l < 0.0).count();
    let expected = match signature {
        Signature::Lorentzian => 1,
        Signature::Euclidean => 0,
    };
    if negative != expected {
        return Err(GeometryError::SignatureMismatch { negative });
    }
    Ok(())
}

pub(crate) fn invert_symmetric(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let inv = m
        .clone()
        .try_inverse()
        .ok_or(GeometryError::DegenerateMetric { det: m.determinant(), threshold: 0.0 })?;
    Ok((&inv + inv.transpose()) * 0.5)
}

/// Removes the tangential part of `v` and its components along `normals`.
fn project_out(
    v: &mut DVector<f64>,
    tangents: &DMatrix<f64>,
    gamma_inv: &DMatrix<f64>,
    g: &DMatrix<f64>,
    normals: &[DVector<f64>],
) {
    // two sweeps keep the result orthogonal to round-off
    for _ in 0..2 {
        let coeff = gamma_inv * (tangents.transpose() * (g * &*v));
        *v -= tangents * coeff;
        for n in normals {
            let c = (n.transpose() * g * &*v)[(0, 0)];
            *v -= n * c;
        }
    }
}

fn orient(v: &DVector<f64>) -> f64 {
    let max = v.amax();
    v.iter()
        .find(|c| c.abs() > 1e-12 * max)
        .map(|c| if *c < 0.0 { -1.0 } else { 1.0 })
        .unwrap_or(1.0)
}

fn auto_normals(
    tangents: &DMatrix<f64>,
    gamma_inv: &DMatrix<f64>,
    g: &DMatrix<f64>,
    codim: usize,
) -> Result<(DMatrix<f64>, NormalGauge)> {
    let n_dim = tangents.nrows();
    let attempt = |greedy: bool| -> Option<(Vec<DVector<f64>>, Vec<usize>)> {
        let mut normals: Vec<DVector<f64>> = Vec::with_capacity(codim);
        let mut seeds = Vec::with_capacity(codim);
        let mut remaining: Vec<usize> = (0..n_dim).collect();
        while normals.len() < codim {
            let mut best: Option<(usize, DVector<f64>, f64)> = None;
            for (pos, &k) in remaining.iter().enumerate() {
                let mut v = DVector::zeros(n_dim);
                v[k] = 1.0;
                project_out(&mut v, tangents, gamma_inv, g, &normals);
                let norm2 = (v.transpose() * g * &v)[(0, 0)];
                let rel = norm2 / g[(k, k)].abs();
                if !greedy {
                    if rel > SEED_ACCEPT {
                        best = Some((pos, v, norm2));
                        break;
                    }
                } else if rel > 1e-10 && best.as_ref().map_or(true, |b| norm2 > b.2) {
                    best = Some((pos, v, norm2));
                }
            }
            let (pos, v, norm2) = best?;
            seeds.push(remaining.remove(pos));
            normals.push(v / norm2.sqrt());
        }
        Some((normals, seeds))
    };
    let (normals, seeds) = attempt(false)
        .or_else(|| attempt(true))
        .ok_or_else(|| GeometryError::GaugeFailure("no coordinate axis completes the normal frame".into()))?;
    let signs: Vec<f64> = normals.iter().map(orient).collect();
    let mut out = DMatrix::zeros(n_dim, codim);
    for (i, (n, s)) in normals.iter().zip(&signs).enumerate() {
        out.set_column(i, &(n * *s));
    }
    Ok((out, NormalGauge { seeds, signs, rotation: None }))
}

fn seeded_normals(
    tangents: &DMatrix<f64>,
    gamma_inv: &DMatrix<f64>,
    g: &DMatrix<f64>,
    gauge: &NormalGauge,
) -> Result<DMatrix<f64>> {
    let n_dim = tangents.nrows();
    let mut normals: Vec<DVector<f64>> = Vec::with_capacity(gauge.seeds.len());
    for &k in &gauge.seeds {
        let mut v = DVector::zeros(n_dim);
        v[k] = 1.0;
        project_out(&mut v, tangents, gamma_inv, g, &normals);
        let norm2 = (v.transpose() * g * &v)[(0, 0)];
        if !(norm2 > 1e-12 * g[(k, k)].abs()) {
            return Err(GeometryError::GaugeFailure(format!("seed axis {k} degenerates")));
        }
        normals.push(v / norm2.sqrt());
    }
    let mut out = DMatrix::zeros(n_dim, normals.len());
    for (i, (n, s)) in normals.iter().zip(&gauge.signs).enumerate() {
        out.set_column(i, &(n * *s));
    }
    if let Some(r) = &gauge.rotation {
        out = &out * r.transpose();
    }
    Ok(out)
}

/// Frame plus everything that follows from first and second derivatives of
/// the embedding at a single point (no differentiation of frame fields).
#[derive(Debug, Clone)]
pub struct LocalGeometry {
    pub frame: Frame,
    /// `D_a e^mu_b`, indexed `[mu, a, b]`.
    pub covariant_hessian: Array3<f64>,
    /// `K_ab^i`, indexed `[a, b, i]`.
    pub extrinsic: Array3<f64>,
    /// `gamma_ab^c`, indexed `[a, b, c]`.
    pub connection: Array3<f64>,
    /// `Gamma^mu_{alpha beta}` of the background at the point.
    pub christoffels: Array3<f64>,
}

impl LocalGeometry {
    /// `K^i = gamma^{ab} K_ab^i`.
    pub fn traces(&self) -> DVector<f64> {
        let gi = &self.frame.induced_metric_inverse;
        let (d, _, c) = self.extrinsic.dim();
        DVector::from_fn(c, |i, _| {
            let mut s = 0.0;
            for a in 0..d {
                for b in 0..d {
                    s += gi[(a, b)] * self.extrinsic[[a, b, i]];
                }
            }
            s
        })
    }

    /// `Gamma^mu_{alpha beta} X^alpha_{,a} v^beta`: connection correction for
    /// differentiating a spacetime vector `v` along `e_a`.
    pub fn connection_term(&self, a: usize, v: &DVector<f64>) -> DVector<f64> {
        let n = v.len();
        let e = &self.frame.tangents;
        DVector::from_fn(n, |mu, _| {
            let mut s = 0.0;
            for al in 0..n {
                for be in 0..n {
                    s += self.christoffels[[mu, al, be]] * e[(al, a)] * v[be];
                }
            }
            s
        })
    }
}

pub fn local_geometry(embedding: &dyn Embedding, point: &[f64], gauge: Option<&NormalGauge>) -> Result<LocalGeometry> {
    let frame = build_frame(embedding, point, gauge)?;
    let bg = embedding.background();
    let christoffels = bg.christoffels_at(frame.position.as_slice());
    let xx = embedding.dd_position(point);
    let (n, d, c) = (frame.tangents.nrows(), frame.dim(), frame.codim());
    let e = &frame.tangents;
    let mut dd = xx;
    if !bg.is_flat_cartesian() {
        for mu in 0..n {
            for a in 0..d {
                for b in 0..d {
                    let mut s = 0.0;
                    for al in 0..n {
                        for be in 0..n {
                            s += christoffels[[mu, al, be]] * e[(al, a)] * e[(be, b)];
                        }
                    }
                    dd[[mu, a, b]] += s;
                }
            }
        }
    }
    let g = &frame.ambient_metric;
    let gn = g * &frame.normals; // lowered normals, N x C
    let ge = g * e;
    let mut extrinsic = Array3::zeros((d, d, c));
    let mut lowered = Array3::zeros((d, d, d)); // g(e_d, D_a e_b) as [a, b, d]
    for a in 0..d {
        for b in a..d {
            for i in 0..c {
                let mut s = 0.0;
                for mu in 0..n {
                    s += gn[(mu, i)] * dd[[mu, a, b]];
                }
                extrinsic[[a, b, i]] = -s;
                extrinsic[[b, a, i]] = -s;
            }
            for k in 0..d {
                let mut s = 0.0;
                for mu in 0..n {
                    s += ge[(mu, k)] * dd[[mu, a, b]];
                }
                lowered[[a, b, k]] = s;
                lowered[[b, a, k]] = s;
            }
        }
    }
    let gi = &frame.induced_metric_inverse;
    let mut connection = Array3::zeros((d, d, d));
    for a in 0..d {
        for b in 0..d {
            for cc in 0..d {
                connection[[a, b, cc]] = (0..d).map(|k| gi[(cc, k)] * lowered[[a, b, k]]).sum();
            }
        }
    }
    Ok(LocalGeometry { frame, covariant_hessian: dd, extrinsic, connection, christoffels })
}

/// Extrinsic curvature, its traces, the twist potential and the worldsheet
/// connection at a point.
#[derive(Debug, Clone)]
pub struct CurvatureData {
    /// `K_ab^i`, `[a, b, i]`.
    pub extrinsic: Array3<f64>,
    /// `K^i`.
    pub traces: DVector<f64>,
    /// `omega_a^{ij}`, `[a, i, j]`, antisymmetric in `i, j`. Gauge dependent.
    pub twist: Array3<f64>,
    /// `gamma_ab^c`, `[a, b, c]`.
    pub worldsheet_connection: Array3<f64>,
    pub frame: Frame,
}

pub fn extrinsic_curvature(embedding: &dyn Embedding, point: &[f64]) -> Result<CurvatureData> {
    extrinsic_curvature_with(embedding, point, None)
}

pub fn extrinsic_curvature_with(
    embedding: &dyn Embedding,
    point: &[f64],
    gauge: Option<&NormalGauge>,
) -> Result<CurvatureData> {
    let local = local_geometry(embedding, point, gauge)?;
    let twist = local.twist();
    let traces = local.traces();
    Ok(CurvatureData {
        extrinsic: local.extrinsic,
        traces,
        twist,
        worldsheet_connection: local.connection,
        frame: local.frame,
    })
}

/// `D_a n^mu_i` from central differences of the frame in the gauge of `local`,
/// indexed `[mu, a, i]`.
pub fn normal_derivatives(embedding: &dyn Embedding, local: &LocalGeometry, step: f64) -> Result<Array3<f64>> {
    let frame = &local.frame;
    let (n, d, c) = (frame.tangents.nrows(), frame.dim(), frame.codim());
    let mut out = Array3::zeros((n, d, c));
    let mut p = frame.point.clone();
    for a in 0..d {
        p[a] = frame.point[a] + step;
        let fp = frame_in_gauge(embedding, &p, &frame.gauge)?;
        p[a] = frame.point[a] - step;
        let fm = frame_in_gauge(embedding, &p, &frame.gauge)?;
        p[a] = frame.point[a];
        for i in 0..c {
            let mut dn = (fp.normal(i) - fm.normal(i)) / (2.0 * step);
            dn += local.connection_term(a, &frame.normal(i));
            for mu in 0..n {
                out[[mu, a, i]] = dn[mu];
            }
        }
    }
    Ok(out)
}

impl LocalGeometry {
    /// `omega_a^{ij}` in the gauge of this frame, `[a, i, j]`.
    ///
    /// The normals are Gram-Schmidt images of constant coordinate vectors, so
    /// their derivatives follow from `K_ab^i` and the seeds without any
    /// differencing: for `j > k`,
    /// `g(D_a n_k, n_j) = (K_ab,j c_k^b - sum_{l<k} alpha_lk omega_a,lj
    /// + g(n_j, Gamma(e_a, s_k))) / N_k`
    /// with `s_k = c_k^b e_b + sum_l alpha_lk n_l + N_k n_k`.
    pub fn twist(&self) -> Array3<f64> {
        let frame = &self.frame;
        let (n, d, c) = (frame.tangents.nrows(), frame.dim(), frame.codim());
        let mut twist = Array3::zeros((d, c, c));
        if c < 2 {
            return twist;
        }
        let gauge = &frame.gauge;
        let mut plain = frame.normals.clone();
        if let Some(r) = &gauge.rotation {
            plain = &plain * r;
        }
        for (i, s) in gauge.signs.iter().enumerate() {
            plain.column_mut(i).scale_mut(*s);
        }
        let g = &frame.ambient_metric;
        let gn = g * &plain;
        let ge = g * &frame.tangents;
        let gi = &frame.induced_metric_inverse;
        let flat = self.christoffels.iter().all(|v| *v == 0.0);
        // K_ab,j in the plain (unsigned, unrotated) frame
        let mut kp = Array3::zeros((d, d, c));
        {
            let gpn = g * &plain;
            for a in 0..d {
                for b in 0..d {
                    for j in 0..c {
                        kp[[a, b, j]] = -(0..n).map(|mu| gpn[(mu, j)] * self.covariant_hessian[[mu, a, b]]).sum::<f64>();
                    }
                }
            }
        }
        for (k, &axis) in gauge.seeds.iter().enumerate() {
            let cvec: DVector<f64> = gi * DVector::from_fn(d, |b, _| ge[(axis, b)]);
            let alpha: Vec<f64> = (0..k).map(|l| gn[(axis, l)]).collect();
            let norm = gn[(axis, k)];
            let mut seed = DVector::zeros(n);
            seed[axis] = 1.0;
            for a in 0..d {
                let gamma_term = if flat { DVector::zeros(n) } else { self.connection_term(a, &seed) };
                for j in (k + 1)..c {
                    let mut v: f64 = (0..d).map(|b| kp[[a, b, j]] * cvec[b]).sum();
                    for (l, al) in alpha.iter().enumerate() {
                        v -= al * twist[[a, l, j]];
                    }
                    if !flat {
                        v += gn.column(j).dot(&gamma_term);
                    }
                    v /= norm;
                    twist[[a, k, j]] = v;
                    twist[[a, j, k]] = -v;
                }
            }
        }
        for a in 0..d {
            let mut w = DMatrix::from_fn(c, c, |i, j| twist[[a, i, j]] * gauge.signs[i] * gauge.signs[j]);
            if let Some(r) = &gauge.rotation {
                w = r * w * r.transpose();
            }
            for i in 0..c {
                for j in 0..c {
                    twist[[a, i, j]] = w[(i, j)];
                }
            }
        }
        twist
    }
}

/// Max-norm residuals of the Gauss and Weingarten equations, with the frame
/// derivatives taken by central differences of step `step`.
pub fn gauss_weingarten_residual(embedding: &dyn Embedding, point: &[f64], step: f64) -> Result<(f64, f64)> {
    let local = local_geometry(embedding, point, None)?;
    let frame = &local.frame;
    let (n, d, c) = (frame.tangents.nrows(), frame.dim(), frame.codim());
    let twist = local.twist();
    let dn = normal_derivatives(embedding, &local, step)?;
    let gi = &frame.induced_metric_inverse;
    let mut gauss: f64 = 0.0;
    let mut p = frame.point.clone();
    for a in 0..d {
        p[a] = frame.point[a] + step;
        let ep = embedding.d_position(&p);
        p[a] = frame.point[a] - step;
        let em = embedding.d_position(&p);
        p[a] = frame.point[a];
        for b in 0..d {
            let mut de = (ep.column(b) - em.column(b)) / (2.0 * step);
            de += local.connection_term(a, &frame.tangent(b));
            for cc in 0..d {
                de -= frame.tangent(cc) * local.connection[[a, b, cc]];
            }
            for i in 0..c {
                de += frame.normal(i) * local.extrinsic[[a, b, i]];
            }
            gauss = gauss.max(de.amax());
        }
    }
    let mut weingarten: f64 = 0.0;
    for a in 0..d {
        for i in 0..c {
            let mut r = DVector::from_fn(n, |mu, _| dn[[mu, a, i]]);
            for b in 0..d {
                let k_up: f64 = (0..d).map(|e| local.extrinsic[[a, e, i]] * gi[(e, b)]).sum();
                r -= frame.tangent(b) * k_up;
            }
            for j in 0..c {
                r -= frame.normal(j) * twist[[a, i, j]];
            }
            weingarten = weingarten.max(r.amax());
        }
    }
    Ok((gauss, weingarten))
}

/// `R_{mu nu rho sigma} = g_{mu lambda} R^lambda_{nu rho sigma}`.
pub fn lowered_riemann(background: &dyn BackgroundMetric, x: &[f64]) -> Array4<f64> {
    let n = background.dimension();
    let r = background.riemann_at(x);
    if background.is_flat_cartesian() {
        return r;
    }
    let g = background.metric_at(x);
    let mut out = Array4::zeros((n, n, n, n));
    for m in 0..n {
        for nu in 0..n {
            for rho in 0..n {
                for s in 0..n {
                    out[[m, nu, rho, s]] = (0..n).map(|l| g[(m, l)] * r[[l, nu, rho, s]]).sum();
                }
            }
        }
    }
    out
}

/// Full contraction `R(v0, v1, v2, v3)` of a lowered Riemann tensor.
pub fn contract_riemann(r: &Array4<f64>, v: [&DVector<f64>; 4]) -> f64 {
    let n = v[0].len();
    let mut s = 0.0;
    for m in 0..n {
        if v[0][m] == 0.0 {
            continue;
        }
        for nu in 0..n {
            for rho in 0..n {
                for sg in 0..n {
                    s += r[[m, nu, rho, sg]] * v[0][m] * v[1][nu] * v[2][rho] * v[3][sg];
                }
            }
        }
    }
    s
}
