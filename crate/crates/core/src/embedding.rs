//! Parametric embeddings of a worldsheet into a background.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use ndarray::Array3;

use crate::background::BackgroundMetric;

/// Default step for central differences of the position map.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Step used when second derivatives must be formed from positions alone.
///
/// A second difference at `1e-5` would be dominated by round-off (`eps / h^2`),
/// so the pure-position fallback uses this larger step instead.
pub const SECOND_DIFFERENCE_STEP: f64 = 1e-4;

/// A map `X^mu(xi^a)` from worldsheet coordinates into a background.
pub trait Embedding: Send + Sync {
    /// Worldsheet dimension D.
    fn worldsheet_dim(&self) -> usize;
    fn background(&self) -> &dyn BackgroundMetric;
    fn position(&self, xi: &[f64]) -> DVector<f64>;
    /// `X^mu_{,a}` as an N x D matrix.
    fn d_position(&self, xi: &[f64]) -> DMatrix<f64>;
    /// `X^mu_{,ab}` indexed `[mu, a, b]`.
    fn dd_position(&self, xi: &[f64]) -> Array3<f64>;

    fn spacetime_dim(&self) -> usize {
        self.background().dimension()
    }

    fn codimension(&self) -> usize {
        self.spacetime_dim() - self.worldsheet_dim()
    }
}

pub type PositionFn = Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
pub type HessianFn = Arc<dyn Fn(&[f64]) -> Array3<f64> + Send + Sync>;

/// Embedding assembled from closures.
///
/// Missing derivative callbacks fall back to central differences of the
/// position map.
#[derive(Clone)]
pub struct FnEmbedding {
    dim: usize,
    background: Arc<dyn BackgroundMetric>,
    position: PositionFn,
    jacobian: Option<JacobianFn>,
    hessian: Option<HessianFn>,
    step: f64,
}

impl FnEmbedding {
    pub fn new(
        dim: usize,
        background: Arc<dyn BackgroundMetric>,
        position: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            background,
            position: Arc::new(position),
            jacobian: None,
            hessian: None,
            step: DEFAULT_FD_STEP,
        }
    }

    pub fn with_jacobian(mut self, f: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(f));
        self
    }

    pub fn with_hessian(mut self, f: impl Fn(&[f64]) -> Array3<f64> + Send + Sync + 'static) -> Self {
        self.hessian = Some(Arc::new(f));
        self
    }

    /// Step for the finite-difference fallbacks.
    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.jacobian.is_some() && self.hessian.is_some()
    }
}

impl Embedding for FnEmbedding {
    fn worldsheet_dim(&self) -> usize {
        self.dim
    }

    fn background(&self) -> &dyn BackgroundMetric {
        self.background.as_ref()
    }

    fn position(&self, xi: &[f64]) -> DVector<f64> {
        (self.position)(xi)
    }

    fn d_position(&self, xi: &[f64]) -> DMatrix<f64> {
        match &self.jacobian {
            Some(f) => f(xi),
            None => fd_jacobian(&*self.position, xi, self.step),
        }
    }

    fn dd_position(&self, xi: &[f64]) -> Array3<f64> {
        if let Some(f) = &self.hessian {
            return f(xi);
        }
        match &self.jacobian {
            Some(jac) => fd_hessian_from_jacobian(&**jac, xi, self.step),
            None => fd_hessian(&*self.position, xi, self.step.max(SECOND_DIFFERENCE_STEP)),
        }
    }
}

/// Central-difference Jacobian of a vector map.
pub fn fd_jacobian(f: &dyn Fn(&[f64]) -> DVector<f64>, x: &[f64], h: f64) -> DMatrix<f64> {
    let d = x.len();
    let n = f(x).len();
    let mut out = DMatrix::zeros(n, d);
    let mut p = x.to_vec();
    for a in 0..d {
        p[a] = x[a] + h;
        let fp = f(&p);
        p[a] = x[a] - h;
        let fm = f(&p);
        p[a] = x[a];
        out.set_column(a, &((fp - fm) / (2.0 * h)));
    }
    out
}

/// Second derivatives from central differences of an analytic Jacobian.
pub fn fd_hessian_from_jacobian(jac: &dyn Fn(&[f64]) -> DMatrix<f64>, x: &[f64], h: f64) -> Array3<f64> {
    let d = x.len();
    let n = jac(x).nrows();
    let mut out = Array3::zeros((n, d, d));
    let mut p = x.to_vec();
    for b in 0..d {
        p[b] = x[b] + h;
        let jp = jac(&p);
        p[b] = x[b] - h;
        let jm = jac(&p);
        p[b] = x[b];
        for mu in 0..n {
            for a in 0..d {
                out[[mu, a, b]] = (jp[(mu, a)] - jm[(mu, a)]) / (2.0 * h);
            }
        }
    }
    symmetrize_last_two(&mut out);
    out
}

/// Second derivatives from second differences of the position map.
pub fn fd_hessian(f: &dyn Fn(&[f64]) -> DVector<f64>, x: &[f64], h: f64) -> Array3<f64> {
    let d = x.len();
    let f0 = f(x);
    let n = f0.len();
    let mut out = Array3::zeros((n, d, d));
    let mut p = x.to_vec();
    for a in 0..d {
        p[a] = x[a] + h;
        let fp = f(&p);
        p[a] = x[a] - h;
        let fm = f(&p);
        p[a] = x[a];
        for mu in 0..n {
            out[[mu, a, a]] = (fp[mu] - 2.0 * f0[mu] + fm[mu]) / (h * h);
        }
        for b in (a + 1)..d {
            let mut eval = |sa: f64, sb: f64| {
                p[a] = x[a] + sa * h;
                p[b] = x[b] + sb * h;
                let v = f(&p);
                p[a] = x[a];
                p[b] = x[b];
                v
            };
            let fpp = eval(1.0, 1.0);
            let fpm = eval(1.0, -1.0);
            let fmp = eval(-1.0, 1.0);
            let fmm = eval(-1.0, -1.0);
            for mu in 0..n {
                let v = (fpp[mu] - fpm[mu] - fmp[mu] + fmm[mu]) / (4.0 * h * h);
                out[[mu, a, b]] = v;
                out[[mu, b, a]] = v;
            }
        }
    }
    out
}

fn symmetrize_last_two(t: &mut Array3<f64>) {
    let (n, d, _) = t.dim();
    for mu in 0..n {
        for a in 0..d {
            for b in (a + 1)..d {
                let v = 0.5 * (t[[mu, a, b]] + t[[mu, b, a]]);
                t[[mu, a, b]] = v;
                t[[mu, b, a]] = v;
            }
        }
    }
}

/// The composition of an embedding with a translation/scaling of its own
/// parameters is occasionally handy in tests; this one just shifts the
/// position by `eps * field(xi)`.
pub struct Displaced<'a> {
    pub base: &'a dyn Embedding,
    pub field: &'a (dyn Fn(&[f64]) -> DVector<f64> + Send + Sync),
    pub eps: f64,
    pub step: f64,
}

impl Embedding for Displaced<'_> {
    fn worldsheet_dim(&self) -> usize {
        self.base.worldsheet_dim()
    }

    fn background(&self) -> &dyn BackgroundMetric {
        self.base.background()
    }

    fn position(&self, xi: &[f64]) -> DVector<f64> {
        self.base.position(xi) + self.eps * (self.field)(xi)
    }

    fn d_position(&self, xi: &[f64]) -> DMatrix<f64> {
        self.base.d_position(xi) + self.eps * fd_jacobian(self.field, xi, self.step)
    }

    fn dd_position(&self, xi: &[f64]) -> Array3<f64> {
        self.base.dd_position(xi) + self.eps * fd_hessian(self.field, xi, self.step.max(SECOND_DIFFERENCE_STEP))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::Flat;

    fn sphere_position(xi: &[f64]) -> DVector<f64> {
        let (t, p) = (xi[0], xi[1]);
        DVector::from_vec(vec![2.0 * t.sin() * p.cos(), 2.0 * t.sin() * p.sin(), 2.0 * t.cos()])
    }

    #[test]
    fn fd_jacobian_matches_closed_form() {
        let e = FnEmbedding::new(2, Arc::new(Flat::euclidean(3)), sphere_position);
        let j = e.d_position(&[std::f64::consts::FRAC_PI_2, 0.0]);
        assert!((j[(2, 0)] + 2.0).abs() < 1e-9);
        assert!((j[(1, 1)] - 2.0).abs() < 1e-9);
        assert!(j[(0, 0)].abs() < 1e-9);
    }

    #[test]
    fn fd_hessian_symmetric_and_close() {
        let e = FnEmbedding::new(2, Arc::new(Flat::euclidean(3)), sphere_position);
        let xi = [0.7, 0.3];
        let h = e.dd_position(&xi);
        for mu in 0..3 {
            assert_eq!(h[[mu, 0, 1]], h[[mu, 1, 0]]);
        }
        // X_{,theta theta} = -X
        let x = sphere_position(&xi);
        for mu in 0..3 {
            assert!((h[[mu, 0, 0]] + x[mu]).abs() < 1e-6);
        }
    }
}
