use std::f64::consts::PI;
use std::sync::Arc;

use approx::assert_abs_diff_eq;
use edgesheet::boundary::*;
use edgesheet::catalog::{collapsing_string, helicoid, parse_entry, planar_hole, plane, static_hole, CatalogEntry};
use edgesheet::{FnBoundary, GeometryError};
use nalgebra::{DMatrix, DVector};
use ndarray::Array3;

fn edge_points(entry: &CatalogEntry, b: usize, n: usize) -> Vec<Vec<f64>> {
    entry.boundaries[b].domain.grid(n)
}

fn all_boundary_entries() -> Vec<CatalogEntry> {
    vec![
        plane(),
        helicoid(0.5, 1.0, 1.0).unwrap(),
        collapsing_string(1.0, 1.0, 1.0).unwrap(),
        planar_hole(2.0, 1.0, 2.0).unwrap(),
        planar_hole(1.0, 1.0, 2.0).unwrap(),
        static_hole(2.0, 1.0, 2.0).unwrap(),
    ]
}

#[test]
fn edge_traces() {
    let p = plane();
    for b in 0..2 {
        for u in edge_points(&p, b, 5) {
            assert_eq!(boundary_data(p.boundaries[b].boundary.as_ref(), &u).unwrap().edge_trace, 0.0);
        }
    }
    let hole = planar_hole(2.0, 1.0, 2.0).unwrap();
    for u in edge_points(&hole, 0, 9) {
        let k = boundary_data(hole.boundaries[0].boundary.as_ref(), &u).unwrap().edge_trace;
        assert_abs_diff_eq!(k, -0.5, epsilon = 1e-14);
    }
    let h = helicoid(0.5, 1.0, 1.0).unwrap();
    for b in 0..2 {
        for u in edge_points(&h, b, 9) {
            let k = boundary_data(h.boundaries[b].boundary.as_ref(), &u).unwrap().edge_trace;
            assert_abs_diff_eq!(k, -1.0 / 3.0, epsilon = 1e-14);
        }
    }
}

#[test]
fn hole_normal_points_into_the_hole() {
    let hole = planar_hole(2.0, 1.0, 2.0).unwrap();
    let bd = boundary_data(hole.boundaries[0].boundary.as_ref(), &[0.3]).unwrap();
    let radial = DVector::from_vec(vec![0.3f64.cos(), 0.3f64.sin(), 0.0]);
    assert_abs_diff_eq!(bd.spacetime_normal.dot(&radial), -1.0, epsilon = 1e-14);
}

#[test]
fn edge_equation_residuals() {
    let h = helicoid(0.5, 1.0, 1.0).unwrap();
    let bd = boundary_data(h.boundaries[1].boundary.as_ref(), &[0.4]).unwrap();
    assert_abs_diff_eq!(edge_equation_residual(&bd, 1.0, 3.0), 0.0, epsilon = 1e-14);

    let hole = planar_hole(2.0, 1.0, 2.0).unwrap();
    let bd = boundary_data(hole.boundaries[0].boundary.as_ref(), &[1.0]).unwrap();
    assert_abs_diff_eq!(edge_equation_residual(&bd, 1.0, 2.0), 0.0, epsilon = 1e-14);

    let p = plane();
    let bd = boundary_data(p.boundaries[0].boundary.as_ref(), &[0.5]).unwrap();
    assert_eq!(edge_equation_residual(&bd, 1.0, 1.0), 1.0);
}

#[test]
fn boundary_conditions_vanish_on_flat_sheets() {
    for entry in [plane(), collapsing_string(1.0, 1.0, 1.0).unwrap(), planar_hole(2.0, 1.0, 2.0).unwrap()] {
        for (b, cb) in entry.boundaries.iter().enumerate() {
            for u in edge_points(&entry, b, 7) {
                let r = boundary_condition_residual(cb.boundary.as_ref(), &u).unwrap();
                assert!(r.iter().all(|&x| x == 0.0), "{} {r}", entry.id);
            }
        }
    }
}

#[test]
fn boundary_conditions_hold_on_rigid_rotation() {
    let h = helicoid(0.5, 1.0, 1.0).unwrap();
    for b in 0..2 {
        for u in edge_points(&h, b, 11) {
            let r = boundary_condition_residual(h.boundaries[b].boundary.as_ref(), &u).unwrap();
            assert!(r.amax() < 1e-14, "{r}");
        }
    }
}

fn wobbling_edge() -> FnBoundary {
    let h = helicoid(0.5, 1.0, 1.0).unwrap();
    FnBoundary::new(
        h.embedding.clone(),
        |u: &[f64]| DVector::from_vec(vec![u[0], 1.0 + 0.1 * u[0].sin()]),
        |_u: &[f64]| DVector::from_vec(vec![0.0, 1.0]),
    )
}

/// `|H^{ab} K_ab|` on the edge `sigma = 1 + 0.1 sin t` of the `omega = 0.5`
/// helicoid: only `K_{t sigma} = -omega / sqrt(1 - omega^2 sigma^2)` is nonzero.
fn wobbling_residual(t: f64) -> f64 {
    let w = 0.5;
    let (s, ds) = (1.0 + 0.1 * t.sin(), 0.1 * t.cos());
    let k = w / (1.0 - w * w * s * s).sqrt();
    let h = -(1.0 - w * w * s * s) + ds * ds;
    (2.0 * ds * k / h).abs()
}

#[test]
fn boundary_conditions_fail_on_wobbling_edge() {
    for t in [0.0, 0.3, 1.0, 2.0, 4.0] {
        let r = boundary_condition_residual(&wobbling_edge(), &[t]).unwrap();
        assert!(r[0].abs() > 1e-3, "{r}");
        assert_abs_diff_eq!(r[0].abs(), wobbling_residual(t), epsilon = 1e-6);
    }
    // the edge is momentarily at constant radius
    let r = boundary_condition_residual(&wobbling_edge(), &[PI / 2.0]).unwrap();
    assert!(r[0].abs() < 1e-12);
}

#[test]
fn laplacian_form_on_solutions() {
    let p = plane();
    let r = boundary_laplacian_residuals(p.boundaries[1].boundary.as_ref(), &[0.5], 0.0, 1.0).unwrap();
    assert!(r.normal.amax() == 0.0 && r.eta == 0.0 && r.combined.amax() == 0.0);

    let h = helicoid(0.5, 1.0, 1.0).unwrap();
    for b in 0..2 {
        for u in edge_points(&h, b, 5) {
            let r = boundary_laplacian_residuals(h.boundaries[b].boundary.as_ref(), &u, 1.0, 3.0).unwrap();
            assert!(r.normal.amax() < 1e-6 && r.eta.abs() < 1e-6 && r.combined.amax() < 1e-6, "{r:?}");
        }
    }
    let hole = planar_hole(2.0, 1.0, 2.0).unwrap();
    for u in edge_points(&hole, 0, 5) {
        let r = boundary_laplacian_residuals(hole.boundaries[0].boundary.as_ref(), &u, 1.0, 2.0).unwrap();
        assert!(r.normal.amax() < 1e-6 && r.eta.abs() < 1e-6 && r.combined.amax() < 1e-6, "{r:?}");
    }
}

#[test]
fn laplacian_form_agrees_with_projection_form() {
    let mut bnds: Vec<Arc<dyn BoundaryEmbedding>> = vec![Arc::new(wobbling_edge())];
    for entry in all_boundary_entries() {
        for cb in &entry.boundaries {
            bnds.push(cb.boundary.clone());
        }
    }
    for bnd in &bnds {
        for u in [[0.1], [0.9], [2.0]] {
            let u: Vec<f64> = if bnd.boundary_dim() == 2 { vec![u[0] / 3.0, u[0]] } else { u.to_vec() };
            let proj = boundary_condition_residual(bnd.as_ref(), &u).unwrap();
            let lap = boundary_laplacian_residuals(bnd.as_ref(), &u, 1.0, 2.0).unwrap();
            assert!((&proj + &lap.normal).amax() < 1e-8, "{proj} vs {}", lap.normal);
        }
    }
}

#[test]
fn wobbling_edge_violates_laplacian_form_too() {
    let r = boundary_laplacian_residuals(&wobbling_edge(), &[0.3], 1.0, 3.0).unwrap();
    assert!(r.normal.amax() > 1e-3);
}

#[test]
fn edge_tension_must_be_positive() {
    let p = plane();
    let r = boundary_laplacian_residuals(p.boundaries[0].boundary.as_ref(), &[0.5], 1.0, 0.0);
    assert!(matches!(r, Err(GeometryError::InvalidParameters(_))));
}

struct Scalar<F: Fn(&[f64]) -> (f64, DVector<f64>, DMatrix<f64>)>(F);

impl<F: Fn(&[f64]) -> (f64, DVector<f64>, DMatrix<f64>)> WorldsheetScalar for Scalar<F> {
    fn value(&self, xi: &[f64]) -> f64 {
        (self.0)(xi).0
    }
    fn gradient(&self, xi: &[f64]) -> DVector<f64> {
        (self.0)(xi).1
    }
    fn hessian(&self, xi: &[f64]) -> DMatrix<f64> {
        (self.0)(xi).2
    }
}

#[test]
fn laplacian_decomposition() {
    let constant = Scalar(|_: &[f64]| (2.5, DVector::zeros(2), DMatrix::zeros(2, 2)));
    let linear = Scalar(|x: &[f64]| (x[0], DVector::from_vec(vec![1.0, 0.0]), DMatrix::zeros(2, 2)));
    // y^2 with y = r sin(theta)
    let y2 = Scalar(|x: &[f64]| {
        let (r, (s, c)) = (x[0], x[1].sin_cos());
        let grad = DVector::from_vec(vec![2.0 * r * s * s, 2.0 * r * r * s * c]);
        let hess = DMatrix::from_row_slice(2, 2, &[2.0 * s * s, 4.0 * r * s * c, 4.0 * r * s * c, 2.0 * r * r * (c * c - s * s)]);
        (r * r * s * s, grad, hess)
    });
    let p = plane();
    let hole = planar_hole(2.0, 1.0, 2.0).unwrap();
    for u in [[0.2], [0.7]] {
        let pb = p.boundaries[0].boundary.as_ref();
        assert_eq!(laplacian_decomposition_residual(pb, &u, &constant).unwrap(), 0.0);
        assert_eq!(laplacian_decomposition_residual(pb, &u, &linear).unwrap(), 0.0);
    }
    for u in edge_points(&hole, 0, 8) {
        let r = laplacian_decomposition_residual(hole.boundaries[0].boundary.as_ref(), &u, &y2).unwrap();
        assert!(r.abs() < 1e-6, "{r:e} at {u:?}");
    }
    assert_abs_diff_eq!(y2.value(&[2.0, PI / 2.0]), 4.0, epsilon = 1e-14);
}

#[test]
fn projector_identities() {
    for entry in all_boundary_entries() {
        for (b, cb) in entry.boundaries.iter().enumerate() {
            for u in edge_points(&entry, b, 3) {
                let bd = boundary_data(cb.boundary.as_ref(), &u).unwrap();
                let (idem, trace, complete, ortho) = bd.projector_defects();
                assert!(idem.max(trace).max(complete).max(ortho) < 1e-12, "{}", entry.id);
                let h = &bd.projector;
                assert!((h - h.transpose()).amax() < 1e-14);
                let eta_contracted = h * bd.gamma() * &bd.normal_in_m;
                assert!(eta_contracted.amax() < 1e-12);
            }
        }
    }
}

#[test]
fn inheritance_on_catalog_edges() {
    for entry in all_boundary_entries() {
        for (b, cb) in entry.boundaries.iter().enumerate() {
            for u in edge_points(&entry, b, 3) {
                let d = check_inheritance(cb.boundary.as_ref(), &u, 1e-8).unwrap();
                assert!(d.max() < 1e-8, "{}: {d:?}", entry.id);
            }
        }
    }
}

#[test]
fn adapted_data_on_straight_and_rotating_edges() {
    let p = plane();
    let a = adapted_edge_data(p.boundaries[1].boundary.as_ref(), &[0.5]).unwrap();
    assert!(a.edge_extrinsic.iter().all(|&k| k.abs() < 1e-14));

    let h = helicoid(0.5, 1.0, 1.0).unwrap();
    let a = adapted_edge_data(h.boundaries[1].boundary.as_ref(), &[0.8]).unwrap();
    let bd = &a.boundary;
    // single edge direction: k_00 h^00 = k
    let k00 = a.edge_extrinsic[[0, 0, 0]];
    assert_abs_diff_eq!(k00 * bd.boundary_metric_inverse[(0, 0)], -1.0 / 3.0, epsilon = 1e-12);
    let proj: f64 = (0..2)
        .flat_map(|x| (0..2).map(move |y| (x, y)))
        .map(|(x, y)| bd.tangents_in_m[(x, 0)] * bd.tangents_in_m[(y, 0)] * bd.parent.extrinsic[[x, y, 0]])
        .sum();
    assert_abs_diff_eq!(a.edge_extrinsic[[0, 0, 1]], proj, epsilon = 1e-12);
    let w = &a.edge_twist;
    for i in 0..2 {
        for j in 0..2 {
            assert_abs_diff_eq!(w[[0, i, j]], -w[[0, j, i]], epsilon = 1e-10);
        }
    }
}

#[test]
fn adapted_normals_are_orthonormal_and_normal_to_the_edge() {
    let entry = static_hole(2.0, 1.0, 2.0).unwrap();
    let a = adapted_edge_data(entry.boundaries[0].boundary.as_ref(), &[0.4, 1.2]).unwrap();
    let g = &a.boundary.parent.frame.ambient_metric;
    let n = &a.adapted_normals;
    let nn = n.transpose() * g * n;
    assert!((nn - DMatrix::identity(n.ncols(), n.ncols())).amax() < 1e-12);
    assert!((a.spacetime_tangents.transpose() * g * n).amax() < 1e-12);
    assert_abs_diff_eq!(n.column(0).into_owned(), a.boundary.spacetime_normal.clone(), epsilon = 1e-14);
}

#[test]
fn lightlike_edge_is_rejected() {
    let p = plane();
    let bnd = FnBoundary::new(
        p.embedding.clone(),
        |u: &[f64]| DVector::from_vec(vec![u[0], u[0]]),
        |_u: &[f64]| DVector::from_vec(vec![0.0, 1.0]),
    )
    .with_derivatives(
        |_u: &[f64]| DMatrix::from_column_slice(2, 1, &[1.0, 1.0]),
        |_u: &[f64]| Array3::zeros((2, 1, 1)),
    );
    assert!(boundary_data(&bnd, &[0.3]).is_err());
}

#[test]
fn parsed_entries_match_constructors() {
    let a = parse_entry("hole:rho=2,mu0=1,mub=2").unwrap();
    let b = planar_hole(2.0, 1.0, 2.0).unwrap();
    let ka = boundary_data(a.boundaries[0].boundary.as_ref(), &[0.5]).unwrap().edge_trace;
    let kb = boundary_data(b.boundaries[0].boundary.as_ref(), &[0.5]).unwrap().edge_trace;
    assert_eq!(ka, kb);
    assert_eq!(a.embedding.spacetime_dim(), 3);
}
