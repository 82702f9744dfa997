mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use approx::assert_abs_diff_eq;
use edgesheet::catalog::{helicoid, planar_hole, plane, sphere, ParameterBox};
use edgesheet::geometry::induced_metric;
use edgesheet::variation::*;
use edgesheet::{Flat, FnEmbedding};
use nalgebra::{DMatrix, DVector};

fn config(domain: ParameterBox, points: Vec<usize>, mu0: f64, mub: f64) -> ActionConfig {
    ActionConfig::new(mu0, mub, Quadrature::new(domain, points).unwrap()).unwrap()
}

/// `-integral_0^1 sqrt(1 - w^2 s^2) ds`.
fn helicoid_area(w: f64) -> f64 {
    -(0.5 * (1.0 - w * w).sqrt() + (w.asin()) / (2.0 * w))
}

#[test]
fn bulk_actions() {
    let p = plane();
    let cfg = config(ParameterBox::new(vec![0.0, 0.0], vec![1.0, 2.0]), vec![8, 8], 1.0, 0.0);
    assert_abs_diff_eq!(dng_action(p.embedding.as_ref(), &cfg).unwrap(), -2.0, epsilon = 1e-14);

    let h = helicoid(0.5, 1.0, 1.0).unwrap();
    let cfg = config(ParameterBox::new(vec![0.0, 0.0], vec![1.0, 1.0]), vec![8, 400], 1.0, 0.0);
    let s = dng_action(h.embedding.as_ref(), &cfg).unwrap();
    assert_abs_diff_eq!(s, helicoid_area(0.5), epsilon = 1e-6);
    assert_abs_diff_eq!(s, -0.956611, epsilon = 1e-6);

    let disk = FnEmbedding::new(2, Arc::new(Flat::euclidean(3)), |x: &[f64]| {
        DVector::from_vec(vec![x[0] * x[1].cos(), x[0] * x[1].sin(), 0.0])
    });
    let cfg = config(ParameterBox::new(vec![0.0, 0.0], vec![1.0, 2.0 * PI]), vec![64, 64], 1.0, 0.0);
    assert_abs_diff_eq!(dng_action(&disk, &cfg).unwrap(), -PI, epsilon = 1e-9);
}

#[test]
fn bulk_action_converges_at_second_order() {
    let h = helicoid(0.5, 1.0, 1.0).unwrap();
    let err = |n: usize| {
        let cfg = config(ParameterBox::new(vec![0.0, 0.0], vec![1.0, 1.0]), vec![8, n], 1.0, 0.0);
        (dng_action(h.embedding.as_ref(), &cfg).unwrap() - helicoid_area(0.5)).abs()
    };
    let ratio = err(16) / err(32);
    assert!(ratio > 3.5 && ratio < 4.5, "{ratio}");
}

#[test]
fn edge_actions() {
    let hole = planar_hole(2.0, 1.0, 2.0).unwrap();
    let cfg = config(ParameterBox::new(vec![0.0], vec![2.0 * PI]), vec![16], 0.0, 1.0);
    assert_abs_diff_eq!(edge_action(hole.boundaries[0].boundary.as_ref(), &cfg).unwrap(), -4.0 * PI, epsilon = 1e-12);

    let p = plane();
    let cfg = config(ParameterBox::new(vec![0.0], vec![1.0]), vec![8], 0.0, 1.0);
    assert_abs_diff_eq!(edge_action(p.boundaries[1].boundary.as_ref(), &cfg).unwrap(), -1.0, epsilon = 1e-14);

    let h = helicoid(0.5, 1.0, 1.0).unwrap();
    assert_abs_diff_eq!(edge_action(h.boundaries[1].boundary.as_ref(), &cfg).unwrap(), -0.75f64.sqrt(), epsilon = 1e-14);
}

#[test]
fn quadrature_validation() {
    let b = ParameterBox::new(vec![0.0, 0.0], vec![1.0, 1.0]);
    assert!(Quadrature::new(b.clone(), vec![4, 16]).is_err());
    assert!(Quadrature::new(b.clone(), vec![16]).is_err());
    assert!(Quadrature::new(ParameterBox::new(vec![0.0], vec![0.0]), vec![16]).is_err());
    assert!(ActionConfig::new(-1.0, 0.0, Quadrature::new(b, vec![8, 8]).unwrap()).is_err());
}

#[test]
fn metric_variation_on_flat_sheet() {
    let p = plane();
    let window = Window::none(p.domain.clone());
    let bump = DeformationField::new(window.clone(), |x: &[f64]| {
        let f = (-x[0] * x[0] - x[1] * x[1]).exp();
        let v = DVector::from_vec(vec![0.0, 0.0, f]);
        let j = DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 0.0, 0.0, -2.0 * x[0] * f, -2.0 * x[1] * f]);
        (v, j)
    });
    let dg = metric_variation(p.embedding.as_ref(), &[0.3, 0.2], &bump).unwrap();
    assert!(dg.amax() < 1e-14, "{dg}");

    let stretch = DeformationField::new(window, |x: &[f64]| {
        let v = DVector::from_vec(vec![0.0, x[1], 0.0]);
        let j = DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        (v, j)
    });
    let dg = metric_variation(p.embedding.as_ref(), &[0.3, 0.2], &stretch).unwrap();
    assert_abs_diff_eq!(dg, DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 2.0]), epsilon = 1e-14);
}

#[test]
fn metric_variation_of_inflated_sphere() {
    let s = sphere(2.0).unwrap();
    let outward = DeformationField::new(Window::none(s.domain.clone()), |x: &[f64]| {
        let (st, ct, sp, cp) = (x[0].sin(), x[0].cos(), x[1].sin(), x[1].cos());
        let v = DVector::from_vec(vec![st * cp, st * sp, ct]);
        let j = DMatrix::from_row_slice(3, 2, &[ct * cp, -st * sp, ct * sp, st * cp, -st, 0.0]);
        (v, j)
    });
    let h = 1e-4;
    for p in [[1.0, 0.5], [2.0, 4.0]] {
        let dg = metric_variation(s.embedding.as_ref(), &p, &outward).unwrap();
        let g = induced_metric(s.embedding.as_ref(), &p).unwrap();
        let plus = induced_metric(sphere(2.0 + h).unwrap().embedding.as_ref(), &p).unwrap();
        let minus = induced_metric(sphere(2.0 - h).unwrap().embedding.as_ref(), &p).unwrap();
        let fd = (plus - minus) / (2.0 * h);
        assert_abs_diff_eq!(dg, fd, epsilon = 1e-7);
        assert_abs_diff_eq!(dg, g * (2.0 / 2.0), epsilon = 1e-12);
    }
}

#[test]
fn zero_deformation_gives_exactly_zero() {
    let pr = VariationProblem::from_entry(&plane(), 1.0, 0.5, vec![16, 16]).unwrap();
    let zero = DeformationField::zero(pr.window(), 3);
    assert_eq!(first_variation_fd(&pr, &zero, 1e-3).unwrap(), 0.0);
    assert_eq!(first_variation_analytic(&pr, &zero).unwrap(), 0.0);
}

#[test]
fn analytic_variation_is_linear() {
    let pr = VariationProblem::from_entry(&helicoid(0.5, 1.0, 1.0).unwrap(), 1.0, 3.0, vec![32, 32]).unwrap();
    let d = common::random_deformation(&pr, 3);
    let one = first_variation_analytic(&pr, &d).unwrap();
    let two = first_variation_analytic(&pr, &d.scaled(2.0)).unwrap();
    assert_abs_diff_eq!(two, 2.0 * one, epsilon = 1e-14 * one.abs().max(1.0));
    let neg = first_variation_analytic(&pr, &d.scaled(-1.0)).unwrap();
    assert_abs_diff_eq!(neg, -one, epsilon = 1e-15);
}

#[test]
fn pulling_a_free_edge_outward() {
    // Phi_b = c eta_b on the upper edge of a flat strip, massless edges
    let c = 0.3;
    let pr = VariationProblem::from_entry(&plane(), 1.0, 0.0, vec![200, 16]).unwrap();
    let def = pr.deformation(move |x: &[f64]| {
        let v = DVector::from_vec(vec![0.0, c * (x[1] + 1.0) / 2.0, 0.0]);
        let j = DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 0.0, c / 2.0, 0.0, 0.0]);
        (v, j)
    });
    // the temporal window averages to 0.9 over t in [0, 1]
    let expected = -1.0 * c * 0.9;
    let analytic = first_variation_terms(&pr, &def).unwrap();
    assert_abs_diff_eq!(analytic.bulk, 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!(analytic.edge, expected, epsilon = 1e-8);
    assert_abs_diff_eq!(first_variation_fd(&pr, &def, 1e-3).unwrap(), expected, epsilon = 1e-8);
}

#[test]
fn normal_deformation_of_flat_strip_is_stationary() {
    let pr = VariationProblem::from_entry(&plane(), 1.0, 1.0, vec![64, 64]).unwrap();
    let def = pr.deformation(|x: &[f64]| {
        let f = (3.0 * x[0]).sin() * (2.0 * x[1]).cos();
        let v = DVector::from_vec(vec![0.0, 0.0, f]);
        let j = DMatrix::from_row_slice(
            3,
            2,
            &[0.0, 0.0, 0.0, 0.0, 3.0 * (3.0 * x[0]).cos() * (2.0 * x[1]).cos(), -2.0 * (3.0 * x[0]).sin() * (2.0 * x[1]).sin()],
        );
        (v, j)
    });
    assert_abs_diff_eq!(first_variation_analytic(&pr, &def).unwrap(), 0.0, epsilon = 1e-14);
    // second order in eps only
    assert!(first_variation_fd(&pr, &def, 1e-3).unwrap().abs() < 1e-6);
}

#[test]
fn interior_reparametrization_does_not_change_the_action() {
    let pr = VariationProblem::from_entry(&helicoid(0.5, 1.0, 1.0).unwrap(), 1.0, 3.0, vec![256, 128]).unwrap();
    let emb = pr.embedding.clone();
    // V = f(sigma) e_sigma with f vanishing at both edges
    let def = pr.deformation(move |x: &[f64]| {
        let e = emb.d_position(x);
        let de = emb.dd_position(x);
        let f = 0.3 * (1.0 - x[1] * x[1]).powi(2);
        let df = -1.2 * x[1] * (1.0 - x[1] * x[1]);
        let v = e.column(1) * f;
        let j = DMatrix::from_fn(3, 2, |mu, a| f * de[[mu, 1, a]] + if a == 1 { df * e[(mu, 1)] } else { 0.0 });
        (v.into_owned(), j)
    });
    let analytic = first_variation_analytic(&pr, &def).unwrap();
    assert!(analytic.abs() < 1e-12, "{analytic:e}");
    let fd = first_variation_richardson(&pr, &def, 1e-2).unwrap();
    assert!(fd.abs() < 1e-6, "{fd:e}");
}

#[test]
fn shifting_a_hole_edge_matches_area_bookkeeping() {
    // rho = 1, mu0 = 1, mub = 2: enlarging the hole by c changes the action by -2 pi c
    let c = 0.05;
    let pr = VariationProblem::from_entry(&planar_hole(1.0, 1.0, 2.0).unwrap(), 1.0, 2.0, vec![64, 32]).unwrap();
    let def = DeformationField::zero(pr.window(), 3).with_shift(End::Lower, move |_| (c, DVector::zeros(2)));
    let expected = -2.0 * PI * c;
    assert_abs_diff_eq!(first_variation_analytic(&pr, &def).unwrap(), expected, epsilon = 1e-12);
    assert_abs_diff_eq!(first_variation_richardson(&pr, &def, 1e-2).unwrap(), expected, epsilon = 1e-9);
}

#[test]
fn random_deformation_on_a_strip() {
    let pr = VariationProblem::from_entry(&plane(), 1.0, 0.5, vec![128, 500]).unwrap();
    let def = common::random_deformation(&pr, 11);
    let eps = 1e-3;
    let fd = first_variation_fd(&pr, &def, eps).unwrap();
    let an = first_variation_analytic(&pr, &def).unwrap();
    assert!((fd - an).abs() < f64::max(1e-6, 10.0 * eps * eps), "fd {fd:e} analytic {an:e}");
}

#[test]
fn rotating_solution_is_stationary() {
    let pr = VariationProblem::from_entry(&helicoid(0.5, 1.0, 1.0).unwrap(), 1.0, 3.0, vec![64, 64]).unwrap();
    for seed in 0..3 {
        let def = common::random_deformation(&pr, seed);
        let terms = first_variation_terms(&pr, &def).unwrap();
        assert!(terms.bulk.abs() < 1e-12 && terms.edge.abs() < 1e-12, "{terms:?}");
    }
}

#[test]
fn fd_needs_positive_step() {
    let pr = VariationProblem::from_entry(&plane(), 1.0, 0.5, vec![16, 16]).unwrap();
    let zero = DeformationField::zero(pr.window(), 3);
    assert!(first_variation_fd(&pr, &zero, 0.0).is_err());
}
