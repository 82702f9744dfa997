//! Background spacetimes.
//!
//! The kernel only needs the metric, its Christoffel symbols and (for the
//! integrability residuals) the Riemann tensor at a point. Built-in backgrounds
//! are flat; anything else must implement [`BackgroundMetric`] and supply all
//! three analytically.

use nalgebra::DMatrix;
use ndarray::{Array3, Array4};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Signature {
    /// (-, +, ..., +) with x^0 the time coordinate.
    Lorentzian,
    Euclidean,
}

pub trait BackgroundMetric: Send + Sync {
    fn dimension(&self) -> usize;
    fn signature(&self) -> Signature;
    /// g_{mu nu} at `x`.
    fn metric_at(&self, x: &[f64]) -> DMatrix<f64>;
    /// Gamma^mu_{alpha beta} at `x`, indexed `[mu, alpha, beta]`.
    fn christoffels_at(&self, x: &[f64]) -> Array3<f64>;
    /// R^mu_{nu rho sigma} at `x`, indexed `[mu, nu, rho, sigma]`, with
    /// `R^mu_{nu rho sigma} V^nu = [D_rho, D_sigma] V^mu`.
    fn riemann_at(&self, x: &[f64]) -> Array4<f64>;
    /// True when the Christoffel symbols vanish identically.
    fn is_flat_cartesian(&self) -> bool {
        false
    }
}

/// Minkowski or Euclidean space in Cartesian coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flat {
    dim: usize,
    signature: Signature,
}

impl Flat {
    pub fn minkowski(dim: usize) -> Self {
        assert!(dim >= 2, "Minkowski space needs at least one spatial dimension");
        Self { dim, signature: Signature::Lorentzian }
    }

    pub fn euclidean(dim: usize) -> Self {
        assert!(dim >= 1);
        Self { dim, signature: Signature::Euclidean }
    }

    /// Diagonal entries of the metric.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|mu| match (self.signature, mu) {
                (Signature::Lorentzian, 0) => -1.0,
                _ => 1.0,
            })
            .collect()
    }
}

impl BackgroundMetric for Flat {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn signature(&self) -> Signature {
        self.signature
    }

    fn metric_at(&self, _x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.diagonal()))
    }

    fn christoffels_at(&self, _x: &[f64]) -> Array3<f64> {
        Array3::zeros((self.dim, self.dim, self.dim))
    }

    fn riemann_at(&self, _x: &[f64]) -> Array4<f64> {
        Array4::zeros((self.dim, self.dim, self.dim, self.dim))
    }

    fn is_flat_cartesian(&self) -> bool {
        true
    }
}

/// Euclidean 3-space in cylindrical coordinates (r, phi, z).
///
/// Flat, but with non-vanishing Christoffel symbols; useful for checking that
/// the connection terms in the kernel are wired correctly.
#[derive(Debug, Clone, Copy, Default)]
pub struct Cylindrical;

impl BackgroundMetric for Cylindrical {
    fn dimension(&self) -> usize {
        3
    }

    fn signature(&self) -> Signature {
        Signature::Euclidean
    }

    fn metric_at(&self, x: &[f64]) -> DMatrix<f64> {
        let r = x[0];
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, r * r, 1.0]))
    }

    fn christoffels_at(&self, x: &[f64]) -> Array3<f64> {
        let r = x[0];
        let mut g = Array3::zeros((3, 3, 3));
        g[[0, 1, 1]] = -r;
        g[[1, 0, 1]] = 1.0 / r;
        g[[1, 1, 0]] = 1.0 / r;
        g
    }

    fn riemann_at(&self, _x: &[f64]) -> Array4<f64> {
        Array4::zeros((3, 3, 3, 3))
    }
}
