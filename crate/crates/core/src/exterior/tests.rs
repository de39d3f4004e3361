use std::sync::Arc;

use num::complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::matrix::ExprMat;
use crate::perm::perm_sign;
use crate::symexpr::{Chart, ScalarExpr};

fn chart3() -> Arc<Chart> {
    Arc::new(Chart::new(
        "c3",
        &[("x", -1.0, 1.0), ("y", -1.0, 1.0), ("z", -1.0, 1.0)],
    ))
}

fn dx(chart: &Arc<Chart>, i: u8) -> Form {
    Form::basis_one_form(chart.clone(), FrameKind::Coordinate, i)
}

fn scalar_form(chart: &Arc<Chart>, e: ScalarExpr) -> Form {
    Form::from_block(chart.clone(), FrameKind::Coordinate, ExprMat::scalar(e))
}

#[test]
fn wedge_of_basis_with_itself_vanishes() {
    let c = chart3();
    let a = dx(&c, 0);
    let w = a.wedge(&a).unwrap();
    assert!(w.is_empty());
}

#[test]
fn wedge_antisymmetry_on_scalar_one_forms() {
    let c = chart3();
    let a = dx(&c, 0).scale(&ScalarExpr::coord("x"));
    let b = dx(&c, 1).scale(&ScalarExpr::coord("y"));
    let ab = a.wedge(&b).unwrap();
    let ba = b.wedge(&a).unwrap();
    let sum = ab.add(&ba).unwrap().simplified();
    assert!(sum.is_empty());
}

#[test]
fn insert_normalizes_tuple_order_with_sign() {
    let c = chart3();
    let mut f = Form::zero(c.clone(), FrameKind::Coordinate, 2, (1, 1));
    f.accumulate(&[1, 0], ExprMat::scalar(ScalarExpr::one()));
    let block = f.component(&[0, 1]).expect("stored on sorted tuple");
    assert_eq!(block.get(0, 0), &ScalarExpr::from_int(-1));
}

#[test]
fn degree_above_dimension_collapses_to_zero() {
    let c = chart3();
    let vol = dx(&c, 0).wedge(&dx(&c, 1)).unwrap().wedge(&dx(&c, 2)).unwrap();
    let over = vol.wedge(&dx(&c, 0)).unwrap();
    assert!(over.is_empty());
}

/// Triple wedge of generic scalar 1-forms against the permutation
/// expansion sum_{perm} sign * a_i b_j c_k evaluated numerically.
#[test]
fn triple_wedge_matches_permutation_oracle() {
    let c = chart3();
    let coeffs = |k: i64| -> Vec<ScalarExpr> {
        vec![
            ScalarExpr::coord("x") + ScalarExpr::from_int(k),
            ScalarExpr::coord("y") * ScalarExpr::coord("x") + ScalarExpr::from_int(2 * k),
            ScalarExpr::coord("z").sin() + ScalarExpr::rat(k, 3),
        ]
    };
    let one_form = |cs: &[ScalarExpr]| {
        let mut f = Form::zero(c.clone(), FrameKind::Coordinate, 1, (1, 1));
        for (i, e) in cs.iter().enumerate() {
            f.accumulate(&[i as u8], ExprMat::scalar(e.clone()));
        }
        f
    };
    let (a, b, g) = (coeffs(1), coeffs(5), coeffs(-2));
    let w = one_form(&a)
        .wedge(&one_form(&b))
        .unwrap()
        .wedge(&one_form(&g))
        .unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let p = c.sample_point(&mut rng);
        let ev = |e: &ScalarExpr| e.eval(&p).unwrap();
        let mut oracle = Complex64::new(0.0, 0.0);
        for i in 0..3u8 {
            for j in 0..3u8 {
                for k in 0..3u8 {
                    let s = perm_sign(&[i, j, k]);
                    if s == 0 {
                        continue;
                    }
                    oracle += Complex64::new(s as f64, 0.0)
                        * ev(&a[i as usize])
                        * ev(&b[j as usize])
                        * ev(&g[k as usize]);
                }
            }
        }
        let got = w.component(&[0, 1, 2]).unwrap().eval(&p).unwrap().get(0, 0);
        assert!((got - oracle).norm() < 1e-12, "{got} vs {oracle}");
    }
}

#[test]
fn exterior_derivative_of_x_dy() {
    let c = chart3();
    let f = dx(&c, 1).scale(&ScalarExpr::coord("x"));
    let df = f.d().unwrap();
    let expect = dx(&c, 0).wedge(&dx(&c, 1)).unwrap();
    assert!(df.sub(&expect).unwrap().simplified().is_empty());
}

#[test]
fn d_squared_vanishes_symbolically() {
    let c = chart3();
    // mixed trig/polynomial coefficients across degrees 0 and 1
    let f0 = scalar_form(&c, ScalarExpr::coord("x").sin() * ScalarExpr::coord("y"));
    assert!(f0.d().unwrap().d().unwrap().simplified().is_empty());

    let mut f1 = Form::zero(c.clone(), FrameKind::Coordinate, 1, (1, 1));
    f1.accumulate(
        &[0],
        ExprMat::scalar(ScalarExpr::coord("y").cos() * ScalarExpr::coord("z")),
    );
    f1.accumulate(
        &[2],
        ExprMat::scalar(ScalarExpr::coord("x") * ScalarExpr::coord("x")),
    );
    assert!(f1.d().unwrap().d().unwrap().simplified().is_empty());
}

#[test]
fn d_satisfies_graded_leibniz() {
    let c = chart3();
    let a = dx(&c, 0).scale(&(ScalarExpr::coord("y").sin()));
    let b = dx(&c, 1).scale(&(ScalarExpr::coord("z") * ScalarExpr::coord("x")));
    let lhs = a.wedge(&b).unwrap().d().unwrap();
    // d(a ∧ b) = da ∧ b - a ∧ db for 1-forms a
    let rhs = a
        .d()
        .unwrap()
        .wedge(&b)
        .unwrap()
        .sub(&a.wedge(&b.d().unwrap()).unwrap())
        .unwrap();
    assert!(lhs.sub(&rhs).unwrap().simplified().is_empty());
}

fn euclid3() -> (Arc<Chart>, Coframe) {
    let c = chart3();
    let cf = Coframe::new(
        c.clone(),
        ExprMat::identity(3),
        vec![1, 1, 1],
        vec![0, 1, 2],
    )
    .unwrap();
    (c, cf)
}

#[test]
fn interior_is_nilpotent() {
    let (c, cf) = euclid3();
    let x = FrameVector::new(
        c.clone(),
        FrameKind::Orthonormal,
        vec![
            ScalarExpr::coord("x"),
            ScalarExpr::from_int(2),
            ScalarExpr::coord("y").sin(),
        ],
    );
    let vol = cf.volume();
    let once = vol.interior(&x).unwrap();
    let twice = once.interior(&x).unwrap().simplified();
    assert!(twice.is_empty());
}

#[test]
fn interior_pairs_frame_vectors_with_coframe() {
    let (_, cf) = euclid3();
    for a in 0..3 {
        for b in 0..3 {
            let pairing = cf.basis(b).interior(&cf.frame_vector(a)).unwrap();
            let val = pairing
                .component(&[])
                .map(|m| m.get(0, 0).clone())
                .unwrap_or_else(ScalarExpr::zero);
            let expect = if a == b {
                ScalarExpr::one()
            } else {
                ScalarExpr::zero()
            };
            assert_eq!(crate::symexpr::simplify(&val), crate::symexpr::simplify(&expect));
        }
    }
}

#[test]
fn interior_expands_two_form_with_signs() {
    let (c, cf) = euclid3();
    let x = FrameVector::new(
        c.clone(),
        FrameKind::Orthonormal,
        vec![
            ScalarExpr::coord("x"),
            ScalarExpr::coord("y"),
            ScalarExpr::zero(),
        ],
    );
    // ι_X (e0 ∧ e1) = X^0 e1 - X^1 e0
    let two = cf.basis(0).wedge(&cf.basis(1)).unwrap();
    let got = two.interior(&x).unwrap().simplified();
    let mut expect = Form::zero(c, FrameKind::Orthonormal, 1, (1, 1));
    expect.accumulate(&[1], ExprMat::scalar(ScalarExpr::coord("x")));
    expect.accumulate(&[0], ExprMat::scalar(-ScalarExpr::coord("y")));
    assert!(got.sub(&expect).unwrap().simplified().is_empty());
}

#[test]
fn interior_antiderivation_numeric() {
    let (c, cf) = euclid3();
    let x = FrameVector::new(
        c.clone(),
        FrameKind::Orthonormal,
        vec![
            ScalarExpr::coord("z"),
            ScalarExpr::coord("x").cos(),
            ScalarExpr::from_int(3),
        ],
    );
    let a = cf.basis(0).scale(&ScalarExpr::coord("y"));
    let b = cf
        .basis(1)
        .scale(&ScalarExpr::coord("z").sin())
        .add(&cf.basis(2).scale(&ScalarExpr::coord("x")))
        .unwrap();
    let lhs = a.wedge(&b).unwrap().interior(&x).unwrap();
    let rhs = a
        .interior(&x)
        .unwrap()
        .wedge(&b)
        .unwrap()
        .sub(&a.wedge(&b.interior(&x).unwrap()).unwrap())
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..8 {
        let p = c.sample_point(&mut rng);
        assert!(lhs.residual_at(&rhs, &p).unwrap() < 1e-12);
    }
}

#[test]
fn hodge_of_one_is_volume() {
    let (c, cf) = euclid3();
    let one = Form::from_block(
        c.clone(),
        FrameKind::Orthonormal,
        ExprMat::scalar(ScalarExpr::one()),
    );
    let star = one.hodge(&cf).unwrap();
    assert!(star.sub(&cf.volume()).unwrap().simplified().is_empty());
}

fn hodge_sign_law(signature: Vec<i8>) {
    let n = signature.len();
    let coords: Vec<(String, f64, f64)> = (0..n)
        .map(|k| (format!("q{k}"), -1.0, 1.0))
        .collect();
    let coord_refs: Vec<(&str, f64, f64)> =
        coords.iter().map(|(s, a, b)| (s.as_str(), *a, *b)).collect();
    let c = Arc::new(Chart::new("law", &coord_refs));
    let det_sign: i64 = signature.iter().map(|&s| s as i64).product();
    let cf = Coframe::new(
        c.clone(),
        ExprMat::identity(n),
        signature,
        (0..n as u8).collect(),
    )
    .unwrap();
    // every strictly increasing basis tuple of every degree
    for mask in 0u32..(1 << n) {
        let tuple: Vec<u8> = (0..n as u8).filter(|i| mask & (1 << i) != 0).collect();
        let p = tuple.len();
        let mut f = Form::zero(c.clone(), FrameKind::Orthonormal, p, (1, 1));
        f.accumulate(&tuple, ExprMat::scalar(ScalarExpr::one()));
        let ss = f.hodge(&cf).unwrap().hodge(&cf).unwrap();
        let sign = if (p * (n - p)) % 2 == 0 { 1 } else { -1 } * det_sign;
        let expect = f.scale(&ScalarExpr::from_int(sign));
        assert!(
            ss.sub(&expect).unwrap().simplified().is_empty(),
            "double hodge law fails on {tuple:?} with n={n}"
        );
    }
}

#[test]
fn double_hodge_sign_law_dimension_three() {
    hodge_sign_law(vec![1, 1, 1]);
    hodge_sign_law(vec![-1, 1, 1]);
}

#[test]
fn double_hodge_sign_law_dimension_six() {
    hodge_sign_law(vec![-1, 1, 1, 1, 1, 1]);
}

#[test]
fn hodge_against_epsilon_contraction_oracle() {
    // *(e^a) on Lorentzian 3-space, checked against the index formula
    // (*e^a)_{bc} = eta^{aa} eps_{abc} with eps_{012} = +1.
    let c = chart3();
    let sig = vec![-1i8, 1, 1];
    let cf = Coframe::new(c.clone(), ExprMat::identity(3), sig.clone(), vec![0, 1, 2]).unwrap();
    for a in 0..3u8 {
        let star = cf.basis(a as usize).hodge(&cf).unwrap();
        for b in 0..3u8 {
            for cc in (b + 1)..3u8 {
                let got = star
                    .component(&[b, cc])
                    .map(|m| m.get(0, 0).clone())
                    .unwrap_or_else(ScalarExpr::zero);
                let eps = crate::perm::eps3(a as usize, b as usize, cc as usize) as i64
                    * sig[a as usize] as i64;
                assert_eq!(
                    crate::symexpr::simplify(&got),
                    crate::symexpr::simplify(&ScalarExpr::from_int(eps))
                );
            }
        }
    }
}

fn curved_coframe() -> (Arc<Chart>, Coframe) {
    let c = Arc::new(Chart::new(
        "half",
        &[("th", 0.2, 2.8), ("ph", 0.1, 6.0), ("ps", 0.1, 12.0)],
    ));
    let th = ScalarExpr::coord("th");
    let mut v = ExprMat::identity(3);
    v.set(1, 1, th.clone().sin());
    v.set(2, 1, th.clone().cos());
    v.set(2, 2, ScalarExpr::one());
    let cf = Coframe::new(c.clone(), v, vec![1, 1, 1], vec![0, 1, 2]).unwrap();
    (c, cf)
}

#[test]
fn symbolic_inverse_matches_numeric_inverse() {
    let (c, cf) = curved_coframe();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let p = c.sample_point(&mut rng);
        let v = cf.vielbein.eval(&p).unwrap();
        let w = cf.inverse.eval(&p).unwrap();
        // product must be the identity at every sample point
        for r in 0..3 {
            for s in 0..3 {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..3 {
                    acc += v.get(r, k) * w.get(k, s);
                }
                let expect = if r == s { 1.0 } else { 0.0 };
                assert!((acc - Complex64::new(expect, 0.0)).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn frame_change_round_trip() {
    let (c, cf) = curved_coframe();
    let mut f = Form::zero(c.clone(), FrameKind::Coordinate, 2, (1, 1));
    f.accumulate(
        &[0, 1],
        ExprMat::scalar(ScalarExpr::coord("ps") * ScalarExpr::coord("th").cos()),
    );
    f.accumulate(&[1, 2], ExprMat::scalar(ScalarExpr::coord("ph")));
    let back = f
        .to_orthonormal(&cf)
        .unwrap()
        .to_coordinate(&cf)
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        let p = c.sample_point(&mut rng);
        assert!(back.residual_at(&f, &p).unwrap() < 1e-10);
    }
}

#[test]
fn exterior_derivative_rejects_orthonormal_components() {
    let (_, cf) = euclid3();
    let e0 = cf.basis(0);
    assert!(e0.d().is_err());
}

#[test]
fn matrix_valued_wedge_keeps_block_order() {
    // with 2x2 blocks A dx0 and B dx1, (A dx0) ∧ (B dx1) carries AB, and
    // (B dx1) ∧ (A dx0) carries -BA, which differ when [A,B] != 0
    let c = chart3();
    let mut a = ExprMat::zeros(2, 2);
    a.set(0, 1, ScalarExpr::one());
    let mut b = ExprMat::zeros(2, 2);
    b.set(1, 0, ScalarExpr::one());
    let mut fa = Form::zero(c.clone(), FrameKind::Coordinate, 1, (2, 2));
    fa.accumulate(&[0], a.clone());
    let mut fb = Form::zero(c.clone(), FrameKind::Coordinate, 1, (2, 2));
    fb.accumulate(&[1], b.clone());
    let ab = fa.wedge(&fb).unwrap();
    let ba = fb.wedge(&fa).unwrap();
    let got_ab = ab.component(&[0, 1]).unwrap();
    let got_ba = ba.component(&[0, 1]).unwrap();
    assert_eq!(got_ab.simplified(), a.mul(&b).unwrap().simplified());
    assert_eq!(
        got_ba.simplified(),
        b.mul(&a).unwrap().scale(&ScalarExpr::from_int(-1)).simplified()
    );
    assert_ne!(got_ab.simplified(), got_ba.scale(&ScalarExpr::from_int(-1)).simplified());
}

#[test]
fn embed_shifts_indices_into_product_chart() {
    let c = chart3();
    let other = Arc::new(Chart::new("t", &[("t", -1.0, 1.0)]));
    let product = Arc::new(other.product(&c, "prod"));
    let f = dx(&c, 1).scale(&ScalarExpr::coord("y"));
    let emb = f.embed(product.clone(), 1).unwrap();
    assert!(emb.component(&[2]).is_some());
    assert_eq!(emb.chart.name(), "prod");
}

#[test]
fn determinant_of_curved_vielbein() {
    let (_, cf) = curved_coframe();
    let det = sym_det(&cf.vielbein).unwrap();
    let expect = crate::symexpr::simplify(&ScalarExpr::coord("th").sin());
    assert_eq!(crate::symexpr::simplify(&det), expect);
}
