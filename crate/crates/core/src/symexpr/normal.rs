//! Sum-of-products normal form.
//!
//! Expressions expand into a polynomial over atoms (coordinates, sin/cos
//! of canonicalized arguments, and reciprocals of composite bases), with
//! the single rewrite sin^2 u -> 1 - cos^2 u applied until no square of a
//! sine remains. Zero recognition is cancellation in this normal form;
//! identities it misses are caught numerically by the verification
//! harness instead.

use std::collections::BTreeMap;

use super::expr::ScalarExpr;
use crate::exact::CRat;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Atom {
    Coord(String),
    Sin(ScalarExpr),
    Cos(ScalarExpr),
    /// Reciprocal of a composite (multi-term) canonical base.
    Recip(ScalarExpr),
}

type Monomial = BTreeMap<Atom, i32>;
type Poly = BTreeMap<Monomial, CRat>;

fn poly_zero() -> Poly {
    Poly::new()
}

fn poly_const(c: CRat) -> Poly {
    let mut p = Poly::new();
    if !c.is_zero() {
        p.insert(Monomial::new(), c);
    }
    p
}

fn poly_atom(a: Atom, exp: i32) -> Poly {
    let mut m = Monomial::new();
    if exp != 0 {
        m.insert(a, exp);
    }
    let mut p = Poly::new();
    p.insert(m, CRat::one());
    p
}

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    for (m, c) in b {
        let entry = out.entry(m.clone()).or_insert_with(CRat::zero);
        *entry = &*entry + c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = a.clone();
    for (atom, e) in b {
        let entry = out.entry(atom.clone()).or_insert(0);
        *entry += e;
    }
    out.retain(|_, e| *e != 0);
    out
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m = mono_mul(ma, mb);
            let entry = out.entry(m).or_insert_with(CRat::zero);
            *entry = &*entry + &(ca * cb);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn poly_pow(p: &Poly, n: u32) -> Poly {
    let mut acc = poly_const(CRat::one());
    let mut base = p.clone();
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            acc = poly_mul(&acc, &base);
        }
        k >>= 1;
        if k > 0 {
            base = poly_mul(&base, &base);
        }
    }
    acc
}

fn to_poly(e: &ScalarExpr) -> Poly {
    match e {
        ScalarExpr::Const(c) => poly_const(c.clone()),
        ScalarExpr::Coord(name) => poly_atom(Atom::Coord(name.clone()), 1),
        ScalarExpr::Add(terms) => {
            let mut acc = poly_zero();
            for t in terms {
                acc = poly_add(&acc, &to_poly(t));
            }
            acc
        }
        ScalarExpr::Mul(factors) => {
            let mut acc = poly_const(CRat::one());
            for f in factors {
                if acc.is_empty() {
                    return acc;
                }
                acc = poly_mul(&acc, &to_poly(f));
            }
            acc
        }
        ScalarExpr::Pow(base, n) => {
            let p = to_poly(base);
            if *n == 0 {
                return poly_const(CRat::one());
            }
            if *n > 0 {
                return poly_pow(&p, *n as u32);
            }
            // Negative power. A single-monomial base inverts exactly;
            // a composite base becomes a reciprocal atom.
            if p.is_empty() {
                panic!("negative power of an expression that simplifies to zero");
            }
            if p.len() == 1 {
                let (m, c) = p.iter().next().unwrap();
                let cinv = c.pow(*n).expect("nonzero coefficient");
                let mut mono = Monomial::new();
                for (atom, exp) in m {
                    mono.insert(atom.clone(), exp * n);
                }
                mono.retain(|_, e| *e != 0);
                let mut out = Poly::new();
                out.insert(mono, cinv);
                return out;
            }
            let canon = to_tree(&p);
            poly_atom(Atom::Recip(canon), -n)
        }
        ScalarExpr::Sin(arg) => {
            let canon = to_tree(&rewrite_sin_squares(to_poly(arg)));
            if canon.is_zero() {
                return poly_zero();
            }
            poly_atom(Atom::Sin(canon), 1)
        }
        ScalarExpr::Cos(arg) => {
            let canon = to_tree(&rewrite_sin_squares(to_poly(arg)));
            if canon.is_zero() {
                return poly_const(CRat::one());
            }
            poly_atom(Atom::Cos(canon), 1)
        }
    }
}

/// Apply sin^2 u -> 1 - cos^2 u left-to-right until no monomial carries
/// a sine with exponent >= 2. Each pass lowers the total positive sine
/// degree, so this terminates.
fn rewrite_sin_squares(mut p: Poly) -> Poly {
    loop {
        let target = p.iter().find_map(|(m, c)| {
            m.iter().find_map(|(atom, exp)| match atom {
                Atom::Sin(u) if *exp >= 2 => Some((m.clone(), c.clone(), u.clone())),
                _ => None,
            })
        });
        let Some((mono, coeff, arg)) = target else {
            return p;
        };
        p.remove(&mono);
        let mut reduced = mono.clone();
        let e = reduced.get_mut(&Atom::Sin(arg.clone())).unwrap();
        *e -= 2;
        if *e == 0 {
            reduced.remove(&Atom::Sin(arg.clone()));
        }
        // sin^2 = 1 - cos^2
        let mut one_part = Poly::new();
        one_part.insert(reduced.clone(), coeff.clone());
        let mut cos_mono = reduced;
        let entry = cos_mono.entry(Atom::Cos(arg)).or_insert(0);
        *entry += 2;
        let mut cos_part = Poly::new();
        cos_part.insert(cos_mono, -&coeff);
        p = poly_add(&p, &poly_add(&one_part, &cos_part));
    }
}

fn atom_to_tree(a: &Atom, exp: i32) -> ScalarExpr {
    let base = match a {
        Atom::Coord(name) => ScalarExpr::coord(name),
        Atom::Sin(arg) => ScalarExpr::Sin(Box::new(arg.clone())),
        Atom::Cos(arg) => ScalarExpr::Cos(Box::new(arg.clone())),
        Atom::Recip(t) => {
            return ScalarExpr::Pow(Box::new(t.clone()), -exp);
        }
    };
    if exp == 1 {
        base
    } else {
        ScalarExpr::Pow(Box::new(base), exp)
    }
}

fn to_tree(p: &Poly) -> ScalarExpr {
    if p.is_empty() {
        return ScalarExpr::zero();
    }
    let mut terms = Vec::with_capacity(p.len());
    for (mono, coeff) in p {
        let mut factors = Vec::new();
        if mono.is_empty() || coeff != &CRat::one() {
            factors.push(ScalarExpr::constant(coeff.clone()));
        }
        for (atom, exp) in mono {
            factors.push(atom_to_tree(atom, *exp));
        }
        terms.push(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            ScalarExpr::Mul(factors)
        });
    }
    if terms.len() == 1 {
        terms.pop().unwrap()
    } else {
        ScalarExpr::Add(terms)
    }
}

/// Normal-form simplification. Evaluation is preserved at every point of
/// the validity box; sums that cancel term-by-term after expansion
/// collapse to the constant zero.
pub fn simplify(e: &ScalarExpr) -> ScalarExpr {
    to_tree(&rewrite_sin_squares(to_poly(e)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_pow_expands() {
        let x = ScalarExpr::coord("x");
        let e = (x.clone() + ScalarExpr::one()).pow(2)
            - (x.clone() * x.clone() + ScalarExpr::from_int(2) * x + ScalarExpr::one());
        assert!(simplify(&e).is_zero());
    }

    #[test]
    fn monomial_negative_power_inverts_exactly() {
        let th = ScalarExpr::coord("th");
        let e = (ScalarExpr::rat(2, 3) * th.clone().sin()).pow(-1)
            * th.clone().sin()
            * ScalarExpr::rat(2, 3);
        assert_eq!(simplify(&e), ScalarExpr::one());
    }

    #[test]
    fn composite_reciprocal_preserves_value() {
        // A reciprocal of a multi-term base stays an opaque atom; the
        // numeric evaluation oracle is the check that matters for it.
        let x = ScalarExpr::coord("x");
        let base = x.clone() + x.clone().sin();
        let e = base.clone().pow(-1) * base;
        let s = simplify(&e);
        let mut p = crate::symexpr::Point::new();
        p.insert("x".into(), 0.7);
        let v = s.eval(&p).unwrap();
        assert!((v - num::complex::Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sin_of_zero_vanishes() {
        let x = ScalarExpr::coord("x");
        let zero_arg = x.clone() - x;
        assert!(simplify(&zero_arg.clone().sin()).is_zero());
        assert_eq!(simplify(&zero_arg.cos()), ScalarExpr::one());
    }

    #[test]
    fn pythagorean_in_product_context() {
        let th = ScalarExpr::coord("th");
        let half = ScalarExpr::rat(1, 2) * th;
        let e = half.clone().sin().pow(2) * ScalarExpr::coord("x")
            + half.cos().pow(2) * ScalarExpr::coord("x")
            - ScalarExpr::coord("x");
        assert!(simplify(&e).is_zero());
    }
}
