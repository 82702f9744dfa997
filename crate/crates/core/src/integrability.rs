//! Gauss-Codazzi, Codazzi-Mainardi and Ricci residuals at the three embedding
//! levels: worldsheet in spacetime, edge in worldsheet, edge in spacetime.
//!
//! Intrinsic curvature comes from central differences of the Levi-Civita
//! connection, `Omega` from central differences of the twist. Frames at the
//! stencil points are built in the gauge of the centre point.
//!
//! Conventions: `R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce
//! Gamma^e_db - Gamma^a_de Gamma^e_cb` (positive on a sphere), and
//! `Omega_ab = d_a A_b - d_b A_a + [A_a, A_b]` with `(A_a)_ij = omega_a,ji`.
//! Residuals:
//!
//! * Gauss: `R_abcd - (K_ac.K_bd - K_ad.K_bc) - R(e_a, e_b, e_c, e_d)`
//! * Codazzi: `~nabla_a K_bc,j - ~nabla_b K_ac,j + R(n_j, e_c, e_a, e_b)`,
//!   `~nabla_a K_bc,j = nabla_a K_bc,j + K_bc^i omega_a,ij`
//! * Ricci: `Omega_ab,ij - K_a^c_i K_bc,j + K_b^c_i K_ac,j + R(n_j, n_i, e_a, e_b)`
//!
//! Norms are Euclidean over normal-frame indices and maximal over tangential
//! ones, so a constant rotation of the normal frame leaves them unchanged.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array3, Array4};

use crate::boundary::{
    adapted_normals, boundary_data_with_hint, edge_extrinsic_direct, BoundaryData, BoundaryEmbedding,
};
use crate::embedding::Embedding;
use crate::error::Result;
use crate::geometry::{contract_riemann, invert_symmetric, local_geometry, lowered_riemann, LocalGeometry, NormalGauge};

/// Default step for differentiating connections and frames.
pub const INTEGRABILITY_STEP: f64 = 1e-4;

/// Residuals below this are treated as converged when measuring an order.
pub const ORDER_FLOOR: f64 = 1e-11;

/// All curvature tensors at a point of the worldsheet (and of the edge when
/// one is given).
#[derive(Debug, Clone)]
pub struct CurvatureTensors {
    /// `R_{mu nu rho sigma}` (lowered).
    pub ambient_riemann: Array4<f64>,
    /// `R^a_bcd`.
    pub worldsheet_riemann: Array4<f64>,
    /// `R^A_BCD` of the edge.
    pub boundary_riemann: Option<Array4<f64>>,
    /// `Omega_ab,ij`.
    pub twist_curvature: Array4<f64>,
    /// `Omega_AB,IJ`, adapted index 0 is `eta`.
    pub adapted_twist_curvature: Option<Array4<f64>>,
}

/// `gamma_ab^c` from first and second derivatives only, `[a, b, c]`.
pub fn worldsheet_christoffels(embedding: &dyn Embedding, point: &[f64]) -> Result<Array3<f64>> {
    let e = crate::geometry::tangent_basis(embedding, point)?;
    let x = embedding.position(point);
    let bg = embedding.background();
    let g = bg.metric_at(x.as_slice());
    let gamma = e.transpose() * &g * &e;
    let gi = invert_symmetric(&gamma)?;
    let xx = embedding.dd_position(point);
    let (n, d) = e.shape();
    let gam = if bg.is_flat_cartesian() { None } else { Some(bg.christoffels_at(x.as_slice())) };
    let ge = &g * &e;
    let mut lowered = Array3::zeros((d, d, d));
    for a in 0..d {
        for b in 0..d {
            let mut de = DVector::from_fn(n, |mu, _| xx[[mu, a, b]]);
            if let Some(gam) = &gam {
                for mu in 0..n {
                    for al in 0..n {
                        for be in 0..n {
                            de[mu] += gam[[mu, al, be]] * e[(al, a)] * e[(be, b)];
                        }
                    }
                }
            }
            for k in 0..d {
                lowered[[a, b, k]] = ge.column(k).dot(&de);
            }
        }
    }
    let mut out = Array3::zeros((d, d, d));
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                out[[a, b, c]] = (0..d).map(|k| gi[(c, k)] * lowered[[a, b, k]]).sum();
            }
        }
    }
    Ok(out)
}

/// Central differences of an array-valued function along every coordinate.
fn differentiate<F>(f: F, x: &[f64], step: f64) -> Result<Vec<Array3<f64>>>
where
    F: Fn(&[f64]) -> Result<Array3<f64>>,
{
    let mut p = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        p[k] = x[k] + step;
        let plus = f(&p)?;
        p[k] = x[k] - step;
        let minus = f(&p)?;
        p[k] = x[k];
        out.push((plus - minus) / (2.0 * step));
    }
    Ok(out)
}

/// Riemann tensor `R^a_bcd` of a connection given as `conn[a, b, c] =
/// Gamma^c_ab` at `x`, with derivatives of the connection `dconn[k]`.
fn riemann_from_connection(conn: &Array3<f64>, dconn: &[Array3<f64>]) -> Array4<f64> {
    let d = conn.dim().0;
    let mut r = Array4::zeros((d, d, d, d));
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for dd in 0..d {
                    // Gamma^a_db = conn[d, b, a]
                    let mut v = dconn[c][[dd, b, a]] - dconn[dd][[c, b, a]];
                    for e in 0..d {
                        v += conn[[c, e, a]] * conn[[dd, b, e]] - conn[[dd, e, a]] * conn[[c, b, e]];
                    }
                    r[[a, b, c, dd]] = v;
                }
            }
        }
    }
    r
}

fn lower_first(r: &Array4<f64>, metric: &DMatrix<f64>) -> Array4<f64> {
    let d = r.dim().0;
    let mut out = Array4::zeros((d, d, d, d));
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for dd in 0..d {
                    out[[a, b, c, dd]] = (0..d).map(|e| metric[(a, e)] * r[[e, b, c, dd]]).sum();
                }
            }
        }
    }
    out
}

/// `R^a_bcd` of the induced metric at `point`.
pub fn worldsheet_riemann(embedding: &dyn Embedding, point: &[f64]) -> Result<Array4<f64>> {
    worldsheet_riemann_with(embedding, point, INTEGRABILITY_STEP)
}

pub fn worldsheet_riemann_with(embedding: &dyn Embedding, point: &[f64], step: f64) -> Result<Array4<f64>> {
    let conn = worldsheet_christoffels(embedding, point)?;
    let dconn = differentiate(|p| worldsheet_christoffels(embedding, p), point, step)?;
    Ok(riemann_from_connection(&conn, &dconn))
}

/// `gamma^{bd} R^a_bad`; `2 / r^2` on a sphere of radius `r`.
pub fn scalar_curvature(embedding: &dyn Embedding, point: &[f64]) -> Result<f64> {
    let r = worldsheet_riemann(embedding, point)?;
    let gi = crate::geometry::frame(embedding, point)?.induced_metric_inverse;
    let d = gi.nrows();
    let mut s = 0.0;
    for a in 0..d {
        for b in 0..d {
            for dd in 0..d {
                s += gi[(b, dd)] * r[[a, b, a, dd]];
            }
        }
    }
    Ok(s)
}

/// `Omega_ab,ij` from the twist `omega` and its derivatives.
fn twist_curvature(omega: &Array3<f64>, domega: &[Array3<f64>]) -> Array4<f64> {
    let (d, c, _) = omega.dim();
    let mut out = Array4::zeros((d, d, c, c));
    for a in 0..d {
        for b in 0..d {
            for i in 0..c {
                for j in 0..c {
                    let mut v = -domega[a][[b, i, j]] + domega[b][[a, i, j]];
                    for k in 0..c {
                        v += omega[[a, i, k]] * omega[[b, k, j]] - omega[[b, i, k]] * omega[[a, k, j]];
                    }
                    out[[a, b, i, j]] = v;
                }
            }
        }
    }
    out
}

/// Gauss residual of a submanifold with intrinsic `R_abcd` (lowered),
/// extrinsic curvature `k[a, b, i]` (orthonormal spacelike normals) and
/// projected ambient curvature.
fn gauss_residual(intrinsic: &Array4<f64>, k: &Array3<f64>, ambient: impl Fn(usize, usize, usize, usize) -> f64) -> f64 {
    let (d, _, c) = k.dim();
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            for cc in 0..d {
                for dd in 0..d {
                    let kk: f64 = (0..c).map(|i| k[[a, cc, i]] * k[[b, dd, i]] - k[[a, dd, i]] * k[[b, cc, i]]).sum();
                    let r = intrinsic[[a, b, cc, dd]] - kk - ambient(a, b, cc, dd);
                    worst = worst.max(r.abs());
                }
            }
        }
    }
    worst
}

/// Codazzi residual given `K`, its coordinate derivatives, the Levi-Civita
/// connection, the twist and the projected ambient term `R(n_j, e_c, e_a, e_b)`.
fn codazzi_residual(
    k: &Array3<f64>,
    dk: &[Array3<f64>],
    conn: &Array3<f64>,
    omega: &Array3<f64>,
    ambient: impl Fn(usize, usize, usize, usize) -> f64,
) -> f64 {
    let (d, _, c) = k.dim();
    let cov = |a: usize, b: usize, cc: usize, j: usize| {
        let mut v = dk[a][[b, cc, j]];
        for e in 0..d {
            v -= conn[[a, b, e]] * k[[e, cc, j]] + conn[[a, cc, e]] * k[[b, e, j]];
        }
        for i in 0..c {
            v += k[[b, cc, i]] * omega[[a, i, j]];
        }
        v
    };
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            for cc in 0..d {
                let norm: f64 = (0..c)
                    .map(|j| {
                        let r = cov(a, b, cc, j) - cov(b, a, cc, j) + ambient(j, cc, a, b);
                        r * r
                    })
                    .sum::<f64>()
                    .sqrt();
                worst = worst.max(norm);
            }
        }
    }
    worst
}

/// Ricci residual; `ambient(i, j, a, b) = R(n_j, n_i, e_a, e_b)`.
fn ricci_residual(
    omega_curv: &Array4<f64>,
    k: &Array3<f64>,
    metric_inverse: &DMatrix<f64>,
    ambient: impl Fn(usize, usize, usize, usize) -> f64,
) -> f64 {
    let (d, _, c) = k.dim();
    let raised = |a: usize, e: usize, i: usize| (0..d).map(|f| metric_inverse[(e, f)] * k[[a, f, i]]).sum::<f64>();
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            let mut norm = 0.0;
            for i in 0..c {
                for j in 0..c {
                    let mut r = omega_curv[[a, b, i, j]] + ambient(i, j, a, b);
                    for e in 0..d {
                        r -= raised(a, e, i) * k[[b, e, j]] - raised(b, e, i) * k[[a, e, j]];
                    }
                    norm += r * r;
                }
            }
            worst = worst.max(norm.sqrt());
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldsheetResiduals {
    pub gauss: f64,
    pub codazzi: f64,
    /// `None` in co-dimension one.
    pub ricci: Option<f64>,
}

impl WorldsheetResiduals {
    pub fn max(&self) -> f64 {
        self.gauss.max(self.codazzi).max(self.ricci.unwrap_or(0.0))
    }
}

pub fn worldsheet_integrability_residuals(embedding: &dyn Embedding, point: &[f64]) -> Result<WorldsheetResiduals> {
    worldsheet_integrability_residuals_with(embedding, point, INTEGRABILITY_STEP, None)
}

/// Worldsheet residuals with an explicit step and, optionally, normal gauge.
pub fn worldsheet_integrability_residuals_with(
    embedding: &dyn Embedding,
    point: &[f64],
    step: f64,
    gauge: Option<&NormalGauge>,
) -> Result<WorldsheetResiduals> {
    let local = local_geometry(embedding, point, gauge)?;
    let gauge = local.frame.gauge.clone();
    let frame = &local.frame;
    let c = frame.codim();
    let riemann = lower_first(&worldsheet_riemann_with(embedding, point, step)?, &frame.induced_metric);
    let amb = lowered_riemann(embedding.background(), frame.position.as_slice());
    let flat = amb.iter().all(|v| *v == 0.0);
    let e = |a: usize| frame.tangent(a);
    let nrm = |i: usize| frame.normal(i);
    let contract = |v: [DVector<f64>; 4]| if flat { 0.0 } else { contract_riemann(&amb, [&v[0], &v[1], &v[2], &v[3]]) };

    let gauss = gauss_residual(&riemann, &local.extrinsic, |a, b, cc, d| contract([e(a), e(b), e(cc), e(d)]));
    let dk = differentiate(|p| Ok(local_geometry(embedding, p, Some(&gauge))?.extrinsic), point, step)?;
    let omega = local.twist();
    let codazzi = codazzi_residual(&local.extrinsic, &dk, &local.connection, &omega, |j, cc, a, b| {
        contract([nrm(j), e(cc), e(a), e(b)])
    });
    let ricci = if c < 2 {
        None
    } else {
        let domega = differentiate(|p| Ok(local_geometry(embedding, p, Some(&gauge))?.twist()), point, step)?;
        let curv = twist_curvature(&omega, &domega);
        Some(ricci_residual(&curv, &local.extrinsic, &frame.induced_metric_inverse, |i, j, a, b| {
            contract([nrm(j), nrm(i), e(a), e(b)])
        }))
    };
    Ok(WorldsheetResiduals { gauss, codazzi, ricci })
}

fn boundary_at(
    bnd: &dyn BoundaryEmbedding,
    u: &[f64],
    gauge: Option<&NormalGauge>,
) -> Result<BoundaryData> {
    let hint = bnd.orientation_hint(u);
    boundary_data_with_hint(bnd, u, &hint, gauge)
}

/// `R^A_BCD` of the edge metric `h_AB`.
pub fn boundary_riemann(bnd: &dyn BoundaryEmbedding, u: &[f64], step: f64) -> Result<Array4<f64>> {
    let bd = boundary_at(bnd, u, None)?;
    let gauge = bd.parent.frame.gauge.clone();
    let dconn = differentiate(|p| Ok(boundary_at(bnd, p, Some(&gauge))?.boundary_connection), u, step)?;
    Ok(riemann_from_connection(&bd.boundary_connection, &dconn))
}

/// Residuals of the edge as a hypersurface of the worldsheet. The Ricci
/// family is vacuous there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryResiduals {
    pub gauss: f64,
    pub codazzi: f64,
}

impl BoundaryResiduals {
    pub fn max(&self) -> f64 {
        self.gauss.max(self.codazzi)
    }
}

pub fn boundary_integrability_residuals(bnd: &dyn BoundaryEmbedding, u: &[f64]) -> Result<BoundaryResiduals> {
    boundary_integrability_residuals_with(bnd, u, INTEGRABILITY_STEP)
}

pub fn boundary_integrability_residuals_with(
    bnd: &dyn BoundaryEmbedding,
    u: &[f64],
    step: f64,
) -> Result<BoundaryResiduals> {
    let bd = boundary_at(bnd, u, None)?;
    let gauge = bd.parent.frame.gauge.clone();
    let db = bnd.boundary_dim();
    let parent = bnd.parent();
    let ws = lower_first(
        &worldsheet_riemann_with(parent, bd.chi.as_slice(), step)?,
        &bd.parent.frame.induced_metric,
    );
    let eps = &bd.tangents_in_m;
    let eta = &bd.normal_in_m;
    let proj = |v: [&DVector<f64>; 4]| contract_riemann(&ws, v);
    let cols: Vec<DVector<f64>> = (0..db).map(|a| eps.column(a).into_owned()).collect();

    let dconn = differentiate(|p| Ok(boundary_at(bnd, p, Some(&gauge))?.boundary_connection), u, step)?;
    let intrinsic = lower_first(&riemann_from_connection(&bd.boundary_connection, &dconn), &bd.boundary_metric);
    let k = Array3::from_shape_fn((db, db, 1), |(a, b, _)| bd.edge_curvature[(a, b)]);
    let gauss = gauss_residual(&intrinsic, &k, |a, b, c, d| proj([&cols[a], &cols[b], &cols[c], &cols[d]]));

    let dk = differentiate(
        |p| {
            let b = boundary_at(bnd, p, Some(&gauge))?;
            Ok(Array3::from_shape_fn((db, db, 1), |(x, y, _)| b.edge_curvature[(x, y)]))
        },
        u,
        step,
    )?;
    let omega = Array3::zeros((db, 1, 1));
    let codazzi =
        codazzi_residual(&k, &dk, &bd.boundary_connection, &omega, |_, c, a, b| proj([eta, &cols[c], &cols[a], &cols[b]]));
    Ok(BoundaryResiduals { gauss, codazzi })
}

/// Residuals of the edge embedded directly in spacetime, together with the
/// two twist-consistency relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectResiduals {
    pub gauss: f64,
    pub codazzi: f64,
    pub ricci: f64,
    /// `Omega_AB,ij - eps^a_A eps^b_B Omega_ab,ij + (omega_A,i0 omega_B,j0 -
    /// omega_B,i0 omega_A,j0)`.
    pub twist_tangential: f64,
    /// The same relation without the last term; differs from
    /// `twist_tangential` whenever the edge bends along two directions that
    /// both carry worldsheet curvature.
    pub twist_tangential_uncorrected: f64,
    /// `Omega_AB,i0 - (K_AC,i k_B^C - K_BC,i k_A^C) + R(eta, n_i, e_A, e_B)`.
    pub twist_mixed: f64,
}

impl DirectResiduals {
    /// Largest residual of the relations that must hold.
    pub fn max(&self) -> f64 {
        self.gauss.max(self.codazzi).max(self.ricci).max(self.twist_tangential).max(self.twist_mixed)
    }
}

/// Edge twist `omega_A^{IJ}` assembled from `D_A n^I = eps^a_A D_a n^I`.
fn edge_twist(bd: &BoundaryData, worldsheet_twist: &Array3<f64>) -> Array3<f64> {
    let k = &bd.parent.extrinsic;
    let (d, _, c) = k.dim();
    let db = d - 1;
    let eps = &bd.tangents_in_m;
    let eta = &bd.normal_in_m;
    let mut out = Array3::zeros((db, c + 1, c + 1));
    for aa in 0..db {
        for i in 0..c {
            let mut mixed = 0.0;
            for a in 0..d {
                for b in 0..d {
                    mixed += eps[(a, aa)] * eta[b] * k[[a, b, i]];
                }
            }
            out[[aa, i + 1, 0]] = mixed;
            out[[aa, 0, i + 1]] = -mixed;
            for j in 0..c {
                out[[aa, i + 1, j + 1]] = (0..d).map(|a| eps[(a, aa)] * worldsheet_twist[[a, i, j]]).sum::<f64>();
            }
        }
    }
    out
}

struct EdgeSnapshot {
    bd: BoundaryData,
    local: LocalGeometry,
    k: Array3<f64>,
    connection: Array3<f64>,
    omega: Array3<f64>,
}

fn edge_snapshot(bnd: &dyn BoundaryEmbedding, u: &[f64], gauge: Option<&NormalGauge>) -> Result<EdgeSnapshot> {
    let bd = boundary_at(bnd, u, gauge)?;
    let (k, connection) = edge_extrinsic_direct(bnd, &bd);
    let local = bd.parent.clone();
    let omega = edge_twist(&bd, &local.twist());
    Ok(EdgeSnapshot { bd, local, k, connection, omega })
}

pub fn direct_embedding_residuals(bnd: &dyn BoundaryEmbedding, u: &[f64]) -> Result<DirectResiduals> {
    direct_embedding_residuals_with(bnd, u, INTEGRABILITY_STEP, None)
}

pub fn direct_embedding_residuals_with(
    bnd: &dyn BoundaryEmbedding,
    u: &[f64],
    step: f64,
    gauge: Option<&NormalGauge>,
) -> Result<DirectResiduals> {
    let snap = edge_snapshot(bnd, u, gauge)?;
    let gauge = snap.bd.parent.frame.gauge.clone();
    let parent = bnd.parent();
    let db = bnd.boundary_dim();
    let c = snap.local.frame.codim();
    let frame = &snap.local.frame;
    let e_b = snap.bd.spacetime_tangents();
    let adapted = adapted_normals(&snap.bd);
    let amb = lowered_riemann(parent.background(), frame.position.as_slice());
    let flat = amb.iter().all(|v| *v == 0.0);
    let t = |a: usize| e_b.column(a).into_owned();
    let nn = |i: usize| adapted.column(i).into_owned();
    let contract = |v: [DVector<f64>; 4]| if flat { 0.0 } else { contract_riemann(&amb, [&v[0], &v[1], &v[2], &v[3]]) };

    let dconn = differentiate(|p| Ok(edge_snapshot(bnd, p, Some(&gauge))?.connection), u, step)?;
    let intrinsic = lower_first(&riemann_from_connection(&snap.connection, &dconn), &snap.bd.boundary_metric);
    let gauss = gauss_residual(&intrinsic, &snap.k, |a, b, cc, d| contract([t(a), t(b), t(cc), t(d)]));

    let dk = differentiate(|p| Ok(edge_snapshot(bnd, p, Some(&gauge))?.k), u, step)?;
    let codazzi =
        codazzi_residual(&snap.k, &dk, &snap.connection, &snap.omega, |j, cc, a, b| contract([nn(j), t(cc), t(a), t(b)]));

    let domega = differentiate(|p| Ok(edge_snapshot(bnd, p, Some(&gauge))?.omega), u, step)?;
    let curv = twist_curvature(&snap.omega, &domega);
    let hi = &snap.bd.boundary_metric_inverse;
    let ricci = ricci_residual(&curv, &snap.k, hi, |i, j, a, b| contract([nn(j), nn(i), t(a), t(b)]));

    // worldsheet Omega at chi(u), same gauge
    let chi = snap.bd.chi.clone();
    let ws_domega =
        differentiate(|p| Ok(local_geometry(parent, p, Some(&gauge))?.twist()), chi.as_slice(), step)?;
    let ws_curv = twist_curvature(&snap.local.twist(), &ws_domega);
    let eps = &snap.bd.tangents_in_m;
    let d = eps.nrows();
    let om = &snap.omega;
    let mut twist_tangential: f64 = 0.0;
    let mut twist_uncorrected: f64 = 0.0;
    let mut twist_mixed: f64 = 0.0;
    for aa in 0..db {
        for bb in 0..db {
            let mut norm = 0.0;
            let mut norm_unc = 0.0;
            for i in 0..c {
                for j in 0..c {
                    let mut pulled = 0.0;
                    for a in 0..d {
                        for b in 0..d {
                            pulled += eps[(a, aa)] * eps[(b, bb)] * ws_curv[[a, b, i, j]];
                        }
                    }
                    let unc = curv[[aa, bb, i + 1, j + 1]] - pulled;
                    let corr = om[[aa, i + 1, 0]] * om[[bb, j + 1, 0]] - om[[bb, i + 1, 0]] * om[[aa, j + 1, 0]];
                    norm += (unc + corr).powi(2);
                    norm_unc += unc * unc;
                }
            }
            twist_tangential = twist_tangential.max(norm.sqrt());
            twist_uncorrected = twist_uncorrected.max(norm_unc.sqrt());

            let mut mixed_norm = 0.0;
            for i in 0..c {
                let mut rhs = 0.0;
                for cc in 0..db {
                    for dd in 0..db {
                        rhs += hi[(cc, dd)]
                            * (snap.k[[aa, cc, i + 1]] * snap.bd.edge_curvature[(bb, dd)]
                                - snap.k[[bb, cc, i + 1]] * snap.bd.edge_curvature[(aa, dd)]);
                    }
                }
                let r = curv[[aa, bb, i + 1, 0]] - rhs + contract([nn(0), nn(i + 1), t(aa), t(bb)]);
                mixed_norm += r * r;
            }
            twist_mixed = twist_mixed.max(mixed_norm.sqrt());
        }
    }
    Ok(DirectResiduals {
        gauss,
        codazzi,
        ricci,
        twist_tangential,
        twist_tangential_uncorrected: twist_uncorrected,
        twist_mixed,
    })
}

/// All curvature tensors at a worldsheet point.
pub fn curvature_tensors(embedding: &dyn Embedding, point: &[f64], step: f64) -> Result<CurvatureTensors> {
    let local = local_geometry(embedding, point, None)?;
    let gauge = local.frame.gauge.clone();
    let domega = differentiate(|p| Ok(local_geometry(embedding, p, Some(&gauge))?.twist()), point, step)?;
    Ok(CurvatureTensors {
        ambient_riemann: lowered_riemann(embedding.background(), local.frame.position.as_slice()),
        worldsheet_riemann: worldsheet_riemann_with(embedding, point, step)?,
        boundary_riemann: None,
        twist_curvature: twist_curvature(&local.twist(), &domega),
        adapted_twist_curvature: None,
    })
}

/// All curvature tensors at the edge point `u`, worldsheet quantities taken at
/// `chi(u)`.
pub fn edge_curvature_tensors(bnd: &dyn BoundaryEmbedding, u: &[f64], step: f64) -> Result<CurvatureTensors> {
    let snap = edge_snapshot(bnd, u, None)?;
    let gauge = snap.bd.parent.frame.gauge.clone();
    let mut out = curvature_tensors(bnd.parent(), snap.bd.chi.as_slice(), step)?;
    out.boundary_riemann = Some(boundary_riemann(bnd, u, step)?);
    let domega = differentiate(|p| Ok(edge_snapshot(bnd, p, Some(&gauge))?.omega), u, step)?;
    out.adapted_twist_curvature = Some(twist_curvature(&snap.omega, &domega));
    Ok(out)
}

/// Observed order `log2(coarse / fine)` of a residual under step halving;
/// `None` when both are already below [`ORDER_FLOOR`].
pub fn convergence_order(coarse: f64, fine: f64) -> Option<f64> {
    if coarse < ORDER_FLOOR && fine < ORDER_FLOOR {
        None
    } else {
        Some((coarse / fine).log2())
    }
}
