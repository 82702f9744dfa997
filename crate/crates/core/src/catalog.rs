//! Closed-form worldsheets with edges, packaged with the geometric facts they
//! are known to satisfy.
//!
//! Entries are addressable by a short string such as
//! `helicoid:omega=0.5,R=1` (see [`parse_entry`]). Every embedding and boundary
//! here carries analytic first and second derivatives.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use ndarray::Array3;
use serde::{Deserialize, Serialize};

use crate::background::Flat;
use crate::boundary::{boundary_condition_residual, boundary_data, FnBoundary};
use crate::embedding::{Embedding, FnEmbedding};
use crate::error::{GeometryError, Result};
use crate::geometry::local_geometry;
use crate::integrability::scalar_curvature;

/// Where a catalog expectation comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Stated in the source material.
    Paper,
    /// True by inspection (flat or linear cases).
    Trivial,
    /// Worked out in closed form for this entry.
    Derived,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Paper => "paper",
            Provenance::Trivial => "trivial",
            Provenance::Derived => "derived",
        }
    }
}

/// A scalar that can be evaluated on an entry at a sample point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `sqrt(sum_i (K^i)^2)`.
    MeanCurvature,
    /// `sqrt(K_ab^i K^ab_i)`, sign-indefinite on Lorentzian sheets so taken as
    /// the root of the absolute value.
    ExtrinsicNorm,
    /// Worldsheet scalar curvature.
    ScalarCurvature,
    /// Edge trace `k` on boundary `b`.
    EdgeTrace(usize),
    /// `mu_b k + mu_0` on boundary `b`.
    EdgeResidual(usize),
    /// `|H^{ab} K_ab^i|` on boundary `b`.
    BoundaryCondition(usize),
}

impl Quantity {
    pub fn name(&self) -> String {
        match self {
            Quantity::MeanCurvature => "mean_curvature".into(),
            Quantity::ExtrinsicNorm => "extrinsic_norm".into(),
            Quantity::ScalarCurvature => "scalar_curvature".into(),
            Quantity::EdgeTrace(b) => format!("edge_trace[{b}]"),
            Quantity::EdgeResidual(b) => format!("edge_residual[{b}]"),
            Quantity::BoundaryCondition(b) => format!("boundary_condition[{b}]"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub quantity: Quantity,
    pub value: f64,
    pub tolerance: f64,
    pub provenance: Provenance,
}

/// Axis-aligned box of coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ParameterBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len());
        Self { lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    /// Point at fractional position `f` (each component in `[0, 1]`).
    pub fn at(&self, f: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|k| self.lower[k] + f[k] * self.extent(k)).collect()
    }

    /// Cell midpoints of a tensor grid with `n` cells per axis, in row-major
    /// order.
    pub fn grid(&self, n: usize) -> Vec<Vec<f64>> {
        let d = self.dim();
        let total = n.pow(d as u32);
        (0..total)
            .map(|mut idx| {
                let mut f = vec![0.0; d];
                for k in (0..d).rev() {
                    f[k] = ((idx % n) as f64 + 0.5) / n as f64;
                    idx /= n;
                }
                self.at(&f)
            })
            .collect()
    }
}

/// One edge of an entry.
#[derive(Clone)]
pub struct CatalogBoundary {
    pub name: String,
    pub boundary: Arc<FnBoundary>,
    /// Parameter range of `u`.
    pub domain: ParameterBox,
    /// `(axis, value)` when the edge is a coordinate face of `domain`.
    pub face: Option<(usize, f64)>,
}

#[derive(Clone)]
pub struct CatalogEntry {
    pub id: String,
    pub embedding: Arc<dyn Embedding>,
    /// Worldsheet coordinate range used for sampling and quadrature.
    pub domain: ParameterBox,
    /// Axes along which the embedding is periodic over `domain`.
    pub periodic: Vec<bool>,
    pub boundaries: Vec<CatalogBoundary>,
    pub parameters: BTreeMap<String, f64>,
    pub expected: Vec<Expectation>,
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("id", &self.id)
            .field("parameters", &self.parameters)
            .field("boundaries", &self.boundaries.iter().map(|b| &b.name).collect::<Vec<_>>())
            .finish()
    }
}

impl CatalogEntry {
    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.parameters.get(name).copied()
    }

    /// Bulk and edge tensions, if the entry carries them.
    pub fn tensions(&self) -> Option<(f64, f64)> {
        Some((self.parameter("mu0")?, self.parameter("mub")?))
    }

    /// The hole is in equilibrium exactly when `rho = mu_b / mu_0`.
    pub fn is_equilibrium(&self) -> Option<bool> {
        let rho = self.parameter("rho")?;
        let (mu0, mub) = self.tensions()?;
        Some((rho * mu0 - mub).abs() <= 1e-12 * mub.max(1.0))
    }
}

type Hess = Array3<f64>;

fn vec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

fn cols(n: usize, columns: &[&[f64]]) -> DMatrix<f64> {
    DMatrix::from_fn(n, columns.len(), |mu, a| columns[a][mu])
}

/// Hessian from the upper triangle `[(a, b, column)]`.
fn hess(n: usize, d: usize, entries: &[(usize, usize, &[f64])]) -> Hess {
    let mut h = Array3::zeros((n, d, d));
    for (a, b, c) in entries {
        for mu in 0..n {
            h[[mu, *a, *b]] = c[mu];
            h[[mu, *b, *a]] = c[mu];
        }
    }
    h
}

fn face(parent: &Arc<dyn Embedding>, name: &str, axis: usize, value: f64, outward: f64, domain: ParameterBox) -> CatalogBoundary {
    CatalogBoundary {
        name: name.into(),
        boundary: Arc::new(FnBoundary::coordinate_face(parent.clone(), axis, value, outward)),
        domain,
        face: Some((axis, value)),
    }
}

fn expect(quantity: Quantity, value: f64, tolerance: f64, provenance: Provenance) -> Expectation {
    Expectation { quantity, value, tolerance, provenance }
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// `X = (t, sigma, 0)` in 3d Minkowski space, `t in [0, 1]`, edges at
/// `sigma = +-1`.
pub fn plane() -> CatalogEntry {
    let emb: Arc<dyn Embedding> = Arc::new(
        FnEmbedding::new(2, Arc::new(Flat::minkowski(3)), |x| vec(&[x[0], x[1], 0.0]))
            .with_jacobian(|_| cols(3, &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]))
            .with_hessian(|_| Array3::zeros((3, 2, 2))),
    );
    let time = ParameterBox::new(vec![0.0], vec![1.0]);
    let boundaries = vec![
        face(&emb, "sigma=-1", 1, -1.0, -1.0, time.clone()),
        face(&emb, "sigma=+1", 1, 1.0, 1.0, time),
    ];
    let mut expected = vec![
        expect(Quantity::MeanCurvature, 0.0, 1e-12, Provenance::Trivial),
        expect(Quantity::ExtrinsicNorm, 0.0, 1e-12, Provenance::Trivial),
        expect(Quantity::ScalarCurvature, 0.0, 1e-9, Provenance::Trivial),
    ];
    for b in 0..2 {
        expected.push(expect(Quantity::EdgeTrace(b), 0.0, 1e-12, Provenance::Trivial));
        expected.push(expect(Quantity::BoundaryCondition(b), 0.0, 0.0, Provenance::Paper));
    }
    CatalogEntry {
        id: "plane".into(),
        embedding: emb,
        domain: ParameterBox::new(vec![0.0, -1.0], vec![1.0, 1.0]),
        periodic: vec![false, false],
        boundaries,
        parameters: BTreeMap::new(),
        expected,
    }
}

/// Round sphere of radius `r` in Euclidean 3-space, coordinates `(theta, phi)`.
pub fn sphere(r: f64) -> Result<CatalogEntry> {
    if !(r > 0.0) {
        return Err(GeometryError::InvalidParameters(format!("sphere radius must be positive, got {r}")));
    }
    let pos = move |x: &[f64]| {
        let (st, ct, sp, cp) = (x[0].sin(), x[0].cos(), x[1].sin(), x[1].cos());
        vec(&[r * st * cp, r * st * sp, r * ct])
    };
    let emb: Arc<dyn Embedding> = Arc::new(
        FnEmbedding::new(2, Arc::new(Flat::euclidean(3)), pos)
            .with_jacobian(move |x| {
                let (st, ct, sp, cp) = (x[0].sin(), x[0].cos(), x[1].sin(), x[1].cos());
                cols(3, &[&[r * ct * cp, r * ct * sp, -r * st], &[-r * st * sp, r * st * cp, 0.0]])
            })
            .with_hessian(move |x| {
                let (st, ct, sp, cp) = (x[0].sin(), x[0].cos(), x[1].sin(), x[1].cos());
                hess(
                    3,
                    2,
                    &[
                        (0, 0, &[-r * st * cp, -r * st * sp, -r * ct]),
                        (0, 1, &[-r * ct * sp, r * ct * cp, 0.0]),
                        (1, 1, &[-r * st * cp, -r * st * sp, 0.0]),
                    ],
                )
            }),
    );
    Ok(CatalogEntry {
        id: format!("sphere:r={r}"),
        embedding: emb,
        domain: ParameterBox::new(vec![0.3, 0.0], vec![PI - 0.3, 2.0 * PI]),
        periodic: vec![false, true],
        boundaries: vec![],
        parameters: params(&[("r", r)]),
        expected: vec![
            expect(Quantity::MeanCurvature, 2.0 / r, 1e-9, Provenance::Derived),
            expect(Quantity::ExtrinsicNorm, 2f64.sqrt() / r, 1e-9, Provenance::Derived),
            expect(Quantity::ScalarCurvature, 2.0 / (r * r), 1e-6, Provenance::Derived),
        ],
    })
}

/// Flat torus `(a cos u, a sin u, b cos v, b sin v)` in Euclidean 4-space.
pub fn torus(a: f64, b: f64) -> Result<CatalogEntry> {
    if !(a > 0.0 && b > 0.0) {
        return Err(GeometryError::InvalidParameters(format!("torus radii must be positive, got {a}, {b}")));
    }
    let emb: Arc<dyn Embedding> = Arc::new(
        FnEmbedding::new(2, Arc::new(Flat::euclidean(4)), move |x| {
            vec(&[a * x[0].cos(), a * x[0].sin(), b * x[1].cos(), b * x[1].sin()])
        })
        .with_jacobian(move |x| {
            cols(4, &[&[-a * x[0].sin(), a * x[0].cos(), 0.0, 0.0], &[0.0, 0.0, -b * x[1].sin(), b * x[1].cos()]])
        })
        .with_hessian(move |x| {
            hess(
                4,
                2,
                &[
                    (0, 0, &[-a * x[0].cos(), -a * x[0].sin(), 0.0, 0.0]),
                    (1, 1, &[0.0, 0.0, -b * x[1].cos(), -b * x[1].sin()]),
                ],
            )
        }),
    );
    let k = (1.0 / (a * a) + 1.0 / (b * b)).sqrt();
    Ok(CatalogEntry {
        id: format!("torus:a={a},b={b}"),
        embedding: emb,
        domain: ParameterBox::new(vec![0.0, 0.0], vec![2.0 * PI, 2.0 * PI]),
        periodic: vec![true, true],
        boundaries: vec![],
        parameters: params(&[("a", a), ("b", b)]),
        expected: vec![
            expect(Quantity::MeanCurvature, k, 1e-9, Provenance::Derived),
            expect(Quantity::ExtrinsicNorm, k, 1e-9, Provenance::Derived),
            expect(Quantity::ScalarCurvature, 0.0, 1e-6, Provenance::Derived),
        ],
    })
}

/// `omega^2 R / (1 - omega^2 R^2)`, the ratio `mu_0 / mu_b` that makes a
/// rigidly rotating edge at radius `R` a solution.
pub fn orbit_ratio(omega: f64, r: f64) -> f64 {
    omega * omega * r / (1.0 - omega * omega * r * r)
}

/// Rigidly rotating string: `X = (t, sigma cos wt, sigma sin wt)` in 3d
/// Minkowski space, `sigma in [-R, R]`, with massive ends at `sigma = +-R`.
///
/// The edge tension is set so that the edge law holds for bulk tension `mu0`.
pub fn helicoid(omega: f64, r: f64, mu0: f64) -> Result<CatalogEntry> {
    if !(omega >= 0.0 && r > 0.0 && omega * r < 1.0 && mu0 > 0.0) {
        return Err(GeometryError::InvalidParameters(format!(
            "helicoid needs omega >= 0, R > 0, omega R < 1 and mu0 > 0 (omega = {omega}, R = {r}, mu0 = {mu0})"
        )));
    }
    let w = omega;
    let emb: Arc<dyn Embedding> = Arc::new(
        FnEmbedding::new(2, Arc::new(Flat::minkowski(3)), move |x| {
            let (t, s) = (x[0], x[1]);
            vec(&[t, s * (w * t).cos(), s * (w * t).sin()])
        })
        .with_jacobian(move |x| {
            let (t, s) = (x[0], x[1]);
            let (sn, cs) = (w * t).sin_cos();
            cols(3, &[&[1.0, -s * w * sn, s * w * cs], &[0.0, cs, sn]])
        })
        .with_hessian(move |x| {
            let (t, s) = (x[0], x[1]);
            let (sn, cs) = (w * t).sin_cos();
            hess(3, 2, &[(0, 0, &[0.0, -s * w * w * cs, -s * w * w * sn]), (0, 1, &[0.0, -w * sn, w * cs])])
        }),
    );
    let period = if w > 0.0 { 2.0 * PI / w } else { 1.0 };
    let time = ParameterBox::new(vec![0.0], vec![period]);
    let boundaries = vec![
        face(&emb, "sigma=-R", 1, -r, -1.0, time.clone()),
        face(&emb, "sigma=+R", 1, r, 1.0, time),
    ];
    let k = -w * w * r / (1.0 - w * w * r * r);
    let mut parameters = params(&[("omega", w), ("R", r), ("mu0", mu0)]);
    let mut expected = vec![expect(Quantity::MeanCurvature, 0.0, 1e-9, Provenance::Paper)];
    for b in 0..2 {
        expected.push(expect(Quantity::EdgeTrace(b), k, 1e-9, Provenance::Derived));
        expected.push(expect(Quantity::BoundaryCondition(b), 0.0, 1e-9, Provenance::Paper));
    }
    if w > 0.0 {
        let mub = mu0 / orbit_ratio(w, r);
        parameters.insert("mub".into(), mub);
        for b in 0..2 {
            expected.push(expect(Quantity::EdgeResidual(b), 0.0, 1e-9, Provenance::Derived));
        }
    }
    Ok(CatalogEntry {
        id: format!("helicoid:omega={w},R={r}"),
        embedding: emb,
        domain: ParameterBox::new(vec![0.0, -r], vec![period, r]),
        periodic: vec![false, false],
        boundaries,
        parameters,
        expected,
    })
}

/// Endpoint of the collapsing string: `x(t) = x0 - (sqrt(1 + a^2 t^2) - 1) / a`.
pub fn collapsing_endpoint(a: f64, x0: f64, t: f64) -> f64 {
    x0 - ((1.0 + a * a * t * t).sqrt() - 1.0) / a
}

/// `dx/dt` of [`collapsing_endpoint`].
pub fn collapsing_endpoint_velocity(a: f64, t: f64) -> f64 {
    -a * t / (1.0 + a * a * t * t).sqrt()
}

/// Time at which the two ends of the collapsing string meet.
pub fn collapse_time(a: f64, x0: f64) -> f64 {
    ((a * x0 + 1.0).powi(2) - 1.0).sqrt() / a
}

/// Straight string released from rest between `x = -x0` and `x = x0`, ends of
/// proper acceleration `a = mu0 / mub`. Parametrized as `X = (t, s x(t), 0)`,
/// `s in [-1, 1]`, in 3d Minkowski space, up to 90% of the collapse time.
pub fn collapsing_string(a: f64, x0: f64, mub: f64) -> Result<CatalogEntry> {
    if !(a > 0.0 && x0 > 0.0 && mub > 0.0) {
        return Err(GeometryError::InvalidParameters(format!(
            "collapsing string needs a, x0, mub > 0 (a = {a}, x0 = {x0}, mub = {mub})"
        )));
    }
    let x = move |t: f64| collapsing_endpoint(a, x0, t);
    let xd = move |t: f64| collapsing_endpoint_velocity(a, t);
    let xdd = move |t: f64| -a / (1.0 + a * a * t * t).powf(1.5);
    let emb: Arc<dyn Embedding> = Arc::new(
        FnEmbedding::new(2, Arc::new(Flat::minkowski(3)), move |p| vec(&[p[0], p[1] * x(p[0]), 0.0]))
            .with_jacobian(move |p| cols(3, &[&[1.0, p[1] * xd(p[0]), 0.0], &[0.0, x(p[0]), 0.0]]))
            .with_hessian(move |p| {
                hess(3, 2, &[(0, 0, &[0.0, p[1] * xdd(p[0]), 0.0]), (0, 1, &[0.0, xd(p[0]), 0.0])])
            }),
    );
    let t_end = 0.9 * collapse_time(a, x0);
    let time = ParameterBox::new(vec![0.0], vec![t_end]);
    let boundaries = vec![face(&emb, "left", 1, -1.0, -1.0, time.clone()), face(&emb, "right", 1, 1.0, 1.0, time)];
    let mut expected = vec![
        expect(Quantity::MeanCurvature, 0.0, 1e-12, Provenance::Trivial),
        expect(Quantity::ExtrinsicNorm, 0.0, 1e-12, Provenance::Trivial),
    ];
    for b in 0..2 {
        expected.push(expect(Quantity::EdgeTrace(b), -a, 1e-9, Provenance::Derived));
        expected.push(expect(Quantity::EdgeResidual(b), 0.0, 1e-9, Provenance::Derived));
        expected.push(expect(Quantity::BoundaryCondition(b), 0.0, 0.0, Provenance::Paper));
    }
    Ok(CatalogEntry {
        id: format!("collapsing_string:a={a},x0={x0}"),
        embedding: emb,
        domain: ParameterBox::new(vec![0.0, -1.0], vec![t_end, 1.0]),
        periodic: vec![false, false],
        boundaries,
        parameters: params(&[("a", a), ("x0", x0), ("mu0", a * mub), ("mub", mub)]),
        expected,
    })
}

/// Plane with a circular hole of radius `rho`, in polar coordinates
/// `(r, theta)` in Euclidean 3-space, material at `r in [rho, 3 rho]`.
pub fn planar_hole(rho: f64, mu0: f64, mub: f64) -> Result<CatalogEntry> {
    check_hole(rho, mu0, mub)?;
    let emb: Arc<dyn Embedding> = Arc::new(
        FnEmbedding::new(2, Arc::new(Flat::euclidean(3)), |p| {
            let (s, c) = p[1].sin_cos();
            vec(&[p[0] * c, p[0] * s, 0.0])
        })
        .with_jacobian(|p| {
            let (s, c) = p[1].sin_cos();
            cols(3, &[&[c, s, 0.0], &[-p[0] * s, p[0] * c, 0.0]])
        })
        .with_hessian(|p| {
            let (s, c) = p[1].sin_cos();
            hess(3, 2, &[(0, 1, &[-s, c, 0.0]), (1, 1, &[-p[0] * c, -p[0] * s, 0.0])])
        }),
    );
    let boundaries = vec![face(&emb, "r=rho", 0, rho, -1.0, ParameterBox::new(vec![0.0], vec![2.0 * PI]))];
    Ok(CatalogEntry {
        id: format!("hole:rho={rho},mu0={mu0},mub={mub}"),
        embedding: emb,
        domain: ParameterBox::new(vec![rho, 0.0], vec![3.0 * rho, 2.0 * PI]),
        periodic: vec![false, true],
        boundaries,
        parameters: params(&[("rho", rho), ("mu0", mu0), ("mub", mub)]),
        expected: hole_expectations(rho, mu0, mub),
    })
}

/// The static membrane with a hole, `X = (t, r cos theta, r sin theta, 0)` in
/// 4d Minkowski space, coordinates `(t, r, theta)`, `t in [0, 1]`.
pub fn static_hole(rho: f64, mu0: f64, mub: f64) -> Result<CatalogEntry> {
    check_hole(rho, mu0, mub)?;
    let emb: Arc<dyn Embedding> = Arc::new(
        FnEmbedding::new(3, Arc::new(Flat::minkowski(4)), |p| {
            let (s, c) = p[2].sin_cos();
            vec(&[p[0], p[1] * c, p[1] * s, 0.0])
        })
        .with_jacobian(|p| {
            let (s, c) = p[2].sin_cos();
            cols(4, &[&[1.0, 0.0, 0.0, 0.0], &[0.0, c, s, 0.0], &[0.0, -p[1] * s, p[1] * c, 0.0]])
        })
        .with_hessian(|p| {
            let (s, c) = p[2].sin_cos();
            hess(4, 3, &[(1, 2, &[0.0, -s, c, 0.0]), (2, 2, &[0.0, -p[1] * c, -p[1] * s, 0.0])])
        }),
    );
    let boundaries =
        vec![face(&emb, "r=rho", 1, rho, -1.0, ParameterBox::new(vec![0.0, 0.0], vec![1.0, 2.0 * PI]))];
    Ok(CatalogEntry {
        id: format!("static_hole:rho={rho},mu0={mu0},mub={mub}"),
        embedding: emb,
        domain: ParameterBox::new(vec![0.0, rho, 0.0], vec![1.0, 3.0 * rho, 2.0 * PI]),
        periodic: vec![false, false, true],
        boundaries,
        parameters: params(&[("rho", rho), ("mu0", mu0), ("mub", mub)]),
        expected: hole_expectations(rho, mu0, mub),
    })
}

fn check_hole(rho: f64, mu0: f64, mub: f64) -> Result<()> {
    if !(rho > 0.0 && mu0 >= 0.0 && mub > 0.0) {
        return Err(GeometryError::InvalidParameters(format!(
            "hole needs rho > 0, mu0 >= 0, mub > 0 (rho = {rho}, mu0 = {mu0}, mub = {mub})"
        )));
    }
    Ok(())
}

fn hole_expectations(rho: f64, mu0: f64, mub: f64) -> Vec<Expectation> {
    vec![
        expect(Quantity::MeanCurvature, 0.0, 1e-12, Provenance::Trivial),
        expect(Quantity::ExtrinsicNorm, 0.0, 1e-12, Provenance::Trivial),
        expect(Quantity::ScalarCurvature, 0.0, 1e-6, Provenance::Trivial),
        expect(Quantity::EdgeTrace(0), -1.0 / rho, 1e-9, Provenance::Derived),
        expect(Quantity::EdgeResidual(0), mu0 - mub / rho, 1e-9, Provenance::Derived),
        expect(Quantity::BoundaryCondition(0), 0.0, 0.0, Provenance::Paper),
    ]
}

/// Plane, sphere of radius 2 and a flat torus in Euclidean 4-space.
pub fn reference_surfaces() -> Vec<CatalogEntry> {
    vec![plane(), sphere(2.0).expect("valid radius"), torus(1.0, 0.5).expect("valid radii")]
}

/// Identifiers understood by [`parse_entry`], with their parameters and
/// defaults.
pub const KNOWN_IDS: &[(&str, &str)] = &[
    ("plane", ""),
    ("sphere", "r=2"),
    ("torus", "a=1,b=0.5"),
    ("helicoid", "omega=0.5,R=1,mu0=1"),
    ("collapsing_string", "a=1,x0=1,mub=1"),
    ("hole", "rho=2,mu0=1,mub=2"),
    ("static_hole", "rho=2,mu0=1,mub=2"),
];

/// Builds an entry from `name[:key=value,...]`.
pub fn parse_entry(spec: &str) -> Result<CatalogEntry> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n.trim(), r),
        None => (spec.trim(), ""),
    };
    let defaults = KNOWN_IDS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, d)| *d)
        .ok_or_else(|| GeometryError::InvalidParameters(format!("unknown catalog id '{name}'")))?;
    let mut values = parse_pairs(defaults)?;
    let given = parse_pairs(rest)?;
    for (k, v) in given {
        if !values.contains_key(&k) {
            return Err(GeometryError::InvalidParameters(format!("'{name}' has no parameter '{k}'")));
        }
        values.insert(k, v);
    }
    let p = |k: &str| values[k];
    match name {
        "plane" => Ok(plane()),
        "sphere" => sphere(p("r")),
        "torus" => torus(p("a"), p("b")),
        "helicoid" => helicoid(p("omega"), p("R"), p("mu0")),
        "collapsing_string" => collapsing_string(p("a"), p("x0"), p("mub")),
        "hole" => planar_hole(p("rho"), p("mu0"), p("mub")),
        "static_hole" => static_hole(p("rho"), p("mu0"), p("mub")),
        _ => unreachable!(),
    }
}

fn parse_pairs(s: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| GeometryError::InvalidParameters(format!("expected key=value, got '{item}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| GeometryError::InvalidParameters(format!("'{}' is not a number", v.trim())))?;
        if !v.is_finite() {
            return Err(GeometryError::InvalidParameters(format!("parameter '{k}' is not finite")));
        }
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

/// Result of checking one expectation over a sample set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub expectation: Expectation,
    /// Value at the sample with the largest deviation.
    pub worst_value: f64,
    pub max_deviation: f64,
}

impl Evaluation {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.expectation.tolerance
    }
}

/// Evaluates `quantity` at a worldsheet point (or a boundary point `u` for
/// edge quantities).
pub fn evaluate_quantity(entry: &CatalogEntry, quantity: Quantity, point: &[f64]) -> Result<f64> {
    let boundary = |b: usize| {
        entry
            .boundaries
            .get(b)
            .ok_or_else(|| GeometryError::InvalidParameters(format!("{} has no boundary {b}", entry.id)))
    };
    match quantity {
        Quantity::MeanCurvature => Ok(local_geometry(entry.embedding.as_ref(), point, None)?.traces().norm()),
        Quantity::ExtrinsicNorm => {
            let local = local_geometry(entry.embedding.as_ref(), point, None)?;
            let gi = &local.frame.induced_metric_inverse;
            let (d, _, c) = local.extrinsic.dim();
            let mut s = 0.0;
            for i in 0..c {
                let k = DMatrix::from_fn(d, d, |a, b| local.extrinsic[[a, b, i]]);
                s += (gi * &k * gi * &k).trace();
            }
            Ok(s.abs().sqrt())
        }
        Quantity::ScalarCurvature => scalar_curvature(entry.embedding.as_ref(), point),
        Quantity::EdgeTrace(b) => Ok(boundary_data(boundary(b)?.boundary.as_ref(), point)?.edge_trace),
        Quantity::EdgeResidual(b) => {
            let (mu0, mub) = entry
                .tensions()
                .ok_or_else(|| GeometryError::InvalidParameters(format!("{} carries no tensions", entry.id)))?;
            let bd = boundary_data(boundary(b)?.boundary.as_ref(), point)?;
            Ok(crate::boundary::edge_equation_residual(&bd, mu0, mub))
        }
        Quantity::BoundaryCondition(b) => Ok(boundary_condition_residual(boundary(b)?.boundary.as_ref(), point)?.norm()),
    }
}

/// Sample points for `quantity`: an `n^D` grid of the worldsheet domain or of
/// the boundary parameter domain.
pub fn sample_points(entry: &CatalogEntry, quantity: Quantity, n: usize) -> Vec<Vec<f64>> {
    match quantity {
        Quantity::EdgeTrace(b) | Quantity::EdgeResidual(b) | Quantity::BoundaryCondition(b) => {
            entry.boundaries.get(b).map(|cb| cb.domain.grid(n)).unwrap_or_default()
        }
        _ => entry.domain.grid(n),
    }
}

/// Checks every expectation of `entry` on an `n`-per-axis sample grid.
pub fn check_expectations(entry: &CatalogEntry, n: usize) -> Result<Vec<Evaluation>> {
    entry
        .expected
        .iter()
        .map(|exp| {
            let mut worst = Evaluation { expectation: *exp, worst_value: exp.value, max_deviation: 0.0 };
            for p in sample_points(entry, exp.quantity, n) {
                let v = evaluate_quantity(entry, exp.quantity, &p)?;
                let dev = (v - exp.value).abs();
                if !(dev <= worst.max_deviation) {
                    worst.max_deviation = dev;
                    worst.worst_value = v;
                }
            }
            Ok(worst)
        })
        .collect()
}

/// `mu_b k + mu_0` on the edge of [`planar_hole`] for `steps` radii evenly
/// spaced over `[from, to]`, as `(rho, residual)`.
pub fn hole_scan(from: f64, to: f64, steps: usize, mu0: f64, mub: f64) -> Result<Vec<(f64, f64)>> {
    if !(steps >= 2 && from.is_finite() && to.is_finite() && from < to) {
        return Err(GeometryError::InvalidParameters(format!(
            "scan needs from < to and at least 2 points (from = {from}, to = {to}, steps = {steps})"
        )));
    }
    (0..steps)
        .map(|i| {
            let rho = from + (to - from) * i as f64 / (steps - 1) as f64;
            let entry = planar_hole(rho, mu0, mub)?;
            let bd = boundary_data(entry.boundaries[0].boundary.as_ref(), &[0.0])?;
            Ok((rho, crate::boundary::edge_equation_residual(&bd, mu0, mub)))
        })
        .collect()
}

/// First pair of neighbouring samples across which the value changes sign
/// (a zero counts as the positive side).
pub fn sign_change(samples: &[(f64, f64)]) -> Option<(f64, f64)> {
    samples.windows(2).find(|w| (w[0].1 < 0.0) != (w[1].1 < 0.0)).map(|w| (w[0].0, w[1].0))
}
