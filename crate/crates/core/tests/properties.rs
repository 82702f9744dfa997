mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use edgesheet::background::Cylindrical;
use edgesheet::boundary::{boundary_data, edge_equation_residual};
use edgesheet::catalog::{helicoid, orbit_ratio, parse_entry, planar_hole, sphere, static_hole, torus, CatalogEntry};
use edgesheet::dynamics::{minkowski_dot, rotating_orbit_omega, step_by, InitialData};
use edgesheet::geometry::{extrinsic_curvature, frame};
use edgesheet::variation::{first_variation_analytic, pairwise_sum, VariationProblem, Window};
use edgesheet::{BackgroundMetric, BoundaryEmbedding, Flat, FnEmbedding};
use nalgebra::DVector;
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = f64> {
    0.0..1.0f64
}

fn entries() -> Vec<CatalogEntry> {
    vec![
        sphere(2.0).unwrap(),
        torus(1.0, 0.5).unwrap(),
        helicoid(0.5, 1.0, 1.0).unwrap(),
        helicoid(0.8, 1.1, 2.0).unwrap(),
        planar_hole(1.5, 1.0, 2.0).unwrap(),
        static_hole(1.5, 1.0, 2.0).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn background_connection_symmetry(r in 0.2..5.0f64, phi in 0.0..6.3f64, z in -2.0..2.0f64) {
        let x = [r, phi, z];
        let g = Cylindrical.metric_at(&x);
        prop_assert!((g.clone() - g.transpose()).amax() == 0.0);
        let c = Cylindrical.christoffels_at(&x);
        for m in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    prop_assert!((c[[m, a, b]] - c[[m, b, a]]).abs() < 1e-15);
                }
            }
        }
        let flat = Flat::minkowski(4);
        prop_assert!(flat.christoffels_at(&[r, phi, z, 0.0]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn frame_and_curvature_invariants(which in 0usize..6, f0 in unit(), f1 in unit(), f2 in unit()) {
        let entry = &entries()[which];
        let p = entry.domain.at(&[f0, f1, f2][..entry.domain.dim()]);
        let emb = entry.embedding.as_ref();
        let dd = emb.dd_position(&p);
        let d = entry.domain.dim();
        for mu in 0..emb.spacetime_dim() {
            for a in 0..d {
                for b in 0..d {
                    prop_assert_eq!(dd[[mu, a, b]], dd[[mu, b, a]]);
                }
            }
        }
        let fr = frame(emb, &p).unwrap();
        let (en, nn) = fr.orthonormality_defect();
        prop_assert!(en < 1e-12 && nn < 1e-12);
        let det = fr.induced_metric.determinant();
        match emb.background().signature() {
            edgesheet::Signature::Lorentzian => prop_assert!(det < 0.0),
            edgesheet::Signature::Euclidean => prop_assert!(det > 0.0),
        }
        let c = extrinsic_curvature(emb, &p).unwrap();
        let (_, _, codim) = c.extrinsic.dim();
        for a in 0..d {
            for b in 0..d {
                for i in 0..codim {
                    prop_assert!((c.extrinsic[[a, b, i]] - c.extrinsic[[b, a, i]]).abs() < 1e-12);
                }
                for e in 0..d {
                    prop_assert!((c.worldsheet_connection[[a, b, e]] - c.worldsheet_connection[[b, a, e]]).abs() < 1e-12);
                }
            }
            for i in 0..codim {
                for j in 0..codim {
                    prop_assert!((c.twist[[a, i, j]] + c.twist[[a, j, i]]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sphere_in_curvilinear_coordinates(theta in 0.3..2.8f64, phi in 0.0..6.0f64) {
        let emb = FnEmbedding::new(2, Arc::new(Cylindrical), |x: &[f64]| {
            DVector::from_vec(vec![2.0 * x[0].sin(), x[1], 2.0 * x[0].cos()])
        }).with_step(1e-4);
        let c = extrinsic_curvature(&emb, &[theta, phi]).unwrap();
        prop_assert!((c.traces[0].abs() - 1.0).abs() < 1e-5, "K = {}", c.traces[0]);
    }

    #[test]
    fn boundary_invariants(which in 0usize..6, f0 in unit(), f1 in unit()) {
        let entry = &entries()[which];
        for cb in &entry.boundaries {
            let u = cb.domain.at(&[f0, f1][..cb.domain.dim()]);
            let bd = boundary_data(cb.boundary.as_ref(), &u).unwrap();
            let (idem, trace, complete, ortho) = bd.projector_defects();
            prop_assert!(idem.max(trace).max(complete).max(ortho) < 1e-12);
            prop_assert!((bd.projector.clone() - bd.projector.transpose()).amax() < 1e-14);
            let k = &bd.edge_curvature;
            prop_assert!((k.clone() - k.transpose()).amax() < 1e-12);
            let trace = (&bd.boundary_metric_inverse * k).trace();
            prop_assert!((trace - bd.edge_trace).abs() < 1e-12);
            // eta points away from the material
            let hint = cb.boundary.orientation_hint(&u);
            prop_assert!((hint.transpose() * bd.gamma() * &bd.normal_in_m)[(0, 0)] > 0.0);
        }
    }

    #[test]
    fn helicoid_edge_trace_closed_form(w in 0.05..1.0f64, r in 0.2..3.0f64, mu0 in 0.1..5.0f64, f in unit()) {
        prop_assume!(w * r < 0.97);
        let h = helicoid(w, r, mu0).unwrap();
        let mub = h.parameter("mub").unwrap();
        for cb in &h.boundaries {
            let bd = boundary_data(cb.boundary.as_ref(), &cb.domain.at(&[f])).unwrap();
            let k = -w * w * r / (1.0 - w * w * r * r);
            prop_assert!((bd.edge_trace - k).abs() < 1e-10 * (1.0 + k.abs()));
            prop_assert!(edge_equation_residual(&bd, mu0, mub).abs() < 1e-10 * mu0.max(1.0));
        }
    }

    #[test]
    fn hole_residual_sign(rho in 0.1..10.0f64, mu0 in 0.1..5.0f64, mub in 0.1..5.0f64) {
        let e = planar_hole(rho, mu0, mub).unwrap();
        let bd = boundary_data(e.boundaries[0].boundary.as_ref(), &[1.0]).unwrap();
        let res = edge_equation_residual(&bd, mu0, mub);
        prop_assert!((res - (mu0 - mub / rho)).abs() < 1e-12 * (mu0 + mub / rho));
    }

    #[test]
    fn orbit_relation_properties(q in 1e-4..1e4f64, r in 0.1..10.0f64, bump in 1.01..3.0f64) {
        let w = rotating_orbit_omega(q, 1.0, r).unwrap();
        prop_assert!(w > 0.0 && w * r < 1.0);
        prop_assert!((orbit_ratio(w, r) - q).abs() < 1e-9 * q);
        let w2 = rotating_orbit_omega(q * bump, 1.0, r).unwrap();
        prop_assert!(w2 > w);
    }

    #[test]
    fn pairwise_sum_matches_naive(values in proptest::collection::vec(-1e3..1e3f64, 0..500)) {
        let naive: f64 = values.iter().sum();
        prop_assert!((pairwise_sum(&values) - naive).abs() < 1e-9);
    }

    #[test]
    fn window_is_bounded(f0 in unit(), f1 in unit()) {
        let e = helicoid(0.5, 1.0, 1.0).unwrap();
        let w = Window { domain: e.domain.clone(), taper: vec![(true, true), (true, false)] };
        let (v, _) = w.value(&e.domain.at(&[f0, f1]));
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn sphere_selector_round_trip(r in 0.01..100.0f64) {
        let e = parse_entry(&format!("sphere:r={r}")).unwrap();
        prop_assert_eq!(e.parameter("r"), Some(r));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn analytic_variation_is_linear(seed in 0u64..1000, scale in -3.0..3.0f64) {
        let pr = VariationProblem::from_entry(&planar_hole(1.0, 1.0, 2.0).unwrap(), 1.0, 2.0, vec![16, 16]).unwrap();
        let d = common::random_deformation(&pr, seed);
        let one = first_variation_analytic(&pr, &d).unwrap();
        let many = first_variation_analytic(&pr, &d.scaled(scale)).unwrap();
        prop_assert!((many - scale * one).abs() < 1e-12 * (1.0 + one.abs()));
    }

    #[test]
    fn endpoint_four_velocity_stays_normalized(m in 16usize..80, steps in 1usize..40) {
        let init = InitialData::parse(common::ROTATING).unwrap();
        let mut s = init.state(m).unwrap();
        for _ in 0..steps {
            s = step_by(&s, 0.5 * s.sigma_spacing, 1.0).unwrap();
        }
        for e in &s.endpoints {
            let uu = minkowski_dot(e.four_velocity.view(), e.four_velocity.view());
            prop_assert!((uu + 1.0).abs() < 1e-12);
            prop_assert!(e.four_velocity[0] > 0.0);
            prop_assert!(minkowski_dot(e.eta.view(), e.four_velocity.view()).abs() < 1e-12);
        }
        prop_assert!(s.time > 0.0 && s.time < 2.0 * PI);
    }
}
