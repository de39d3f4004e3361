//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line. Tolerances and runtime budgets are pinned here and
//! deliberately not configurable.

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use kkdirac::clifford::{
    build_gamma_0_3, build_gamma_1_2, lift_to_6d, lorentz_generators, so_closure_residuals,
    verify_generator_blocks,
};
use kkdirac::exact::CRat;
use kkdirac::exterior::{Coframe, Form, FrameKind, FrameVector};
use kkdirac::geometry::{
    assemble_kk, solve_levi_civita, spacetime_chart, verify_connection_decomposition,
    verify_hodge_decomposition, verify_interior_decomposition, verify_structure_equation,
    GaugePotential, KKGeometry, SpacetimeModel, SphereModel,
};
use kkdirac::matrix::ExprMat;
use kkdirac::reduction::{
    extract_eigenvalue, gauge_covariance_check, mass_spectrum, reduce_equations, verify_reduction,
    AnsatzSpinor6, ReductionContext, SphereMode, TermTag,
};
use kkdirac::symexpr::{Chart, ScalarExpr};

fn criterion(n: usize, name: &str, budget: Option<Duration>, body: impl FnOnce()) {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed();
    let within = budget.map(|b| elapsed < b).unwrap_or(true);
    let pass = outcome.is_ok() && within;
    println!(
        "acceptance criterion {n} ({name}): {} [{elapsed:.2?}]",
        if pass { "PASS" } else { "FAIL" }
    );
    if let Err(p) = outcome {
        resume_unwind(p);
    }
    assert!(within, "criterion {n} exceeded its {budget:?} budget: {elapsed:?}");
}

fn random_gauge_geometry(seed: u64) -> KKGeometry {
    assemble_kk(
        SpacetimeModel::flat(),
        SphereModel::unit().unwrap(),
        GaugePotential::random_polynomial(spacetime_chart(), seed),
    )
    .unwrap()
}

fn free_geometry() -> KKGeometry {
    assemble_kk(
        SpacetimeModel::flat(),
        SphereModel::unit().unwrap(),
        GaugePotential::zero(spacetime_chart()),
    )
    .unwrap()
}

#[test]
fn criterion_1_exact_clifford_suite() {
    criterion(1, "exact Clifford suite", Some(Duration::from_secs(1)), || {
        let g3 = build_gamma_1_2();
        let gs = build_gamma_0_3();
        let g6 = lift_to_6d(&g3, &gs).unwrap();
        for (name, rep) in [("Cl(1,2)", &g3), ("Cl(3,0)", &gs), ("Cl(1,5)", &g6)] {
            for ((a, b), res) in rep.clifford_residuals() {
                assert!(res.is_zero(), "{name} anticommutator ({a},{b})");
            }
        }
    });
}

#[test]
fn criterion_2_exact_generator_blocks() {
    criterion(2, "exact generator blocks", Some(Duration::from_secs(5)), || {
        let g3 = build_gamma_1_2();
        let gs = build_gamma_0_3();
        let g6 = lift_to_6d(&g3, &gs).unwrap();
        let sig6 = lorentz_generators(&g6);
        let blocks = verify_generator_blocks(&sig6, &g3, &gs);
        assert_eq!(blocks.len(), 15);
        for c in blocks {
            assert!(c.pass, "{}", c.name);
        }
        for ((a, b, c, d), res) in so_closure_residuals(&sig6) {
            assert!(res.is_zero(), "so(1,5) closure on ({a},{b},{c},{d})");
        }
    });
}

#[test]
fn criterion_3_structure_equation() {
    criterion(3, "structure equation", Some(Duration::from_secs(30)), || {
        let geom = random_gauge_geometry(42);
        let omega = solve_levi_civita(&geom.coframe).unwrap();
        let check = verify_structure_equation(&geom.coframe, &omega, 42, 30, 1e-9).unwrap();
        assert!(check.pass, "max residual {:.3e}", check.max_residual);
    });
}

#[test]
fn criterion_4_decompositions() {
    criterion(4, "decomposition suite", None, || {
        let geom = random_gauge_geometry(42);
        let omega = solve_levi_civita(&geom.coframe).unwrap();
        for c in verify_connection_decomposition(&geom, &omega, 42, 30, 1e-9).unwrap() {
            assert!(c.pass, "{}: {:.3e}", c.name, c.max_residual);
        }
        let c = verify_interior_decomposition(&geom, 42, 1e-10).unwrap();
        assert!(c.pass, "{}: {:.3e}", c.name, c.max_residual);
        for c in verify_hodge_decomposition(&geom, 42, 30, 1e-10).unwrap() {
            assert!(c.pass, "{}: {:.3e}", c.name, c.max_residual);
        }
        assert!(
            geom.sphere.lambda_spread < 1e-10,
            "lambda spread {:.3e}",
            geom.sphere.lambda_spread
        );
    });
}

#[test]
fn criterion_5_reduction_soundness() {
    criterion(5, "reduction soundness", Some(Duration::from_secs(120)), || {
        for (gauge_seed, ansatz_seed, sample_seed) in [(42, 5, 42), (7, 6, 7), (2026, 7, 2026)] {
            let ctx = ReductionContext::new(random_gauge_geometry(gauge_seed)).unwrap();
            let ansatz = AnsatzSpinor6::random(&ctx.geom, ansatz_seed);
            let mass = ScalarExpr::rat(3, 2);
            let check = verify_reduction(&ctx, &ansatz, &mass, sample_seed, 30, 1e-9).unwrap();
            assert!(
                check.pass,
                "gauge seed {gauge_seed}: max residual {:.3e}",
                check.max_residual
            );
        }
    });
}

#[test]
fn criterion_6_eigenstate_and_free_limit() {
    criterion(6, "eigenstate and free limit", None, || {
        let geom = free_geometry();
        let ansatz = AnsatzSpinor6::random(&geom, 5);

        // the section columns carry a single constant eigenvalue
        let mut values = Vec::new();
        for j in 0..2 {
            let fit = extract_eigenvalue(&ansatz.section_column(j), &geom.sphere.coframe, 42, 30, 1e-9)
                .unwrap();
            assert!(fit.spread < 1e-9, "spread {:.3e}", fit.spread);
            values.push(fit.value);
        }
        assert!((values[0] - values[1]).norm() < 1e-12);

        // free limit: the term structure collapses symbolically
        let ctx = ReductionContext::new(geom).unwrap();
        let system =
            reduce_equations(&ctx, &ansatz, &ScalarExpr::from_int(2), &SphereMode::Operator)
                .unwrap();
        for eq in &system.equations {
            assert_eq!(eq.tags(), vec![TermTag::SpacetimeDirac, TermTag::SphereDirac]);
        }

        // exact spectrum M +/- m for rational inputs, and the m = 0 case
        let spectrum = mass_spectrum(&CRat::from_int(2), &CRat::rat(3, 4)).unwrap();
        assert_eq!(spectrum.eigenvalues, [CRat::rat(11, 4), CRat::rat(5, 4)]);
        assert!(!spectrum.negative_branch);
        let diagonal = mass_spectrum(&CRat::from_int(2), &CRat::from_int(0)).unwrap();
        assert_eq!(diagonal.eigenvalues, [CRat::from_int(2), CRat::from_int(2)]);
    });
}

#[test]
fn criterion_7_gauge_covariance() {
    criterion(7, "gauge covariance", None, || {
        let st = SpacetimeModel::flat();
        let gauge = GaugePotential::random_polynomial(spacetime_chart(), 42);
        let check =
            gauge_covariance_check(&st, &gauge, &ScalarExpr::from_int(1), 42, 5, 20, 1e-9).unwrap();
        assert!(check.pass, "max residual {:.3e}", check.max_residual);
    });
}

fn hodge_sign_law(signature: Vec<i8>) {
    let n = signature.len();
    let coords: Vec<(String, f64, f64)> = (0..n).map(|k| (format!("q{k}"), -1.0, 1.0)).collect();
    let coord_refs: Vec<(&str, f64, f64)> =
        coords.iter().map(|(s, a, b)| (s.as_str(), *a, *b)).collect();
    let chart = Arc::new(Chart::new("law", &coord_refs));
    let det_sign: i64 = signature.iter().map(|&s| s as i64).product();
    let cf = Coframe::new(
        chart.clone(),
        ExprMat::identity(n),
        signature,
        (0..n as u8).collect(),
    )
    .unwrap();
    for mask in 0u32..(1 << n) {
        let tuple: Vec<u8> = (0..n as u8).filter(|i| mask & (1 << i) != 0).collect();
        let p = tuple.len();
        let mut f = Form::zero(chart.clone(), FrameKind::Orthonormal, p, (1, 1));
        f.accumulate(&tuple, ExprMat::scalar(ScalarExpr::one()));
        let ss = f.hodge(&cf).unwrap().hodge(&cf).unwrap();
        let sign = if (p * (n - p)) % 2 == 0 { 1 } else { -1 } * det_sign;
        let expect = f.scale(&ScalarExpr::from_int(sign));
        assert!(
            ss.sub(&expect).unwrap().simplified().is_empty(),
            "double hodge on {tuple:?}, n = {n}"
        );
    }
}

#[test]
fn criterion_8_calculus_properties() {
    criterion(8, "calculus property suite", None, || {
        let chart = Arc::new(Chart::new(
            "c3",
            &[("x", -1.0, 1.0), ("y", -1.0, 1.0), ("z", -1.0, 1.0)],
        ));
        let dx = |i: u8| Form::basis_one_form(chart.clone(), FrameKind::Coordinate, i);
        let x = ScalarExpr::coord("x");
        let y = ScalarExpr::coord("y");
        let z = ScalarExpr::coord("z");

        // d^2 = 0 on a generic function and a generic 1-form
        let f0 = Form::from_block(
            chart.clone(),
            FrameKind::Coordinate,
            ExprMat::scalar(x.clone().sin() * y.clone() + z.clone()),
        );
        assert!(f0.d().unwrap().d().unwrap().simplified().is_empty());
        let f1 = dx(0)
            .scale(&(y.clone().cos() * z.clone()))
            .add(&dx(2).scale(&(x.clone() * x.clone())))
            .unwrap();
        assert!(f1.d().unwrap().d().unwrap().simplified().is_empty());

        // graded Leibniz for d on a pair of 1-forms
        let a = dx(0).scale(&y.clone().sin());
        let b = dx(1).scale(&(z.clone() * x.clone()));
        let lhs = a.wedge(&b).unwrap().d().unwrap();
        let rhs = a
            .d()
            .unwrap()
            .wedge(&b)
            .unwrap()
            .sub(&a.wedge(&b.d().unwrap()).unwrap())
            .unwrap();
        assert!(lhs.sub(&rhs).unwrap().simplified().is_empty());

        // graded Leibniz for the interior product
        let cf = Coframe::new(
            chart.clone(),
            ExprMat::identity(3),
            vec![1, 1, 1],
            vec![0, 1, 2],
        )
        .unwrap();
        let v = FrameVector::new(
            chart.clone(),
            FrameKind::Orthonormal,
            vec![z.clone(), x.clone().cos(), ScalarExpr::from_int(3)],
        );
        let a = cf.basis(0).scale(&y.clone());
        let b = cf
            .basis(1)
            .scale(&z.clone().sin())
            .add(&cf.basis(2).scale(&x.clone()))
            .unwrap();
        let lhs = a.wedge(&b).unwrap().interior(&v).unwrap();
        let rhs = a
            .interior(&v)
            .unwrap()
            .wedge(&b)
            .unwrap()
            .sub(&a.wedge(&b.interior(&v).unwrap()).unwrap())
            .unwrap();
        assert!(lhs.sub(&rhs).unwrap().simplified().is_empty());

        // double-Hodge sign law over every basis form, n = 3 and n = 6
        hodge_sign_law(vec![-1, 1, 1]);
        hodge_sign_law(vec![1, 1, 1]);
        hodge_sign_law(vec![-1, 1, 1, 1, 1, 1]);
    });
}
