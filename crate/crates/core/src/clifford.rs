//! Exact matrix representations of Clif(1,2), Clif(0,3) and Clif(1,5),
//! tensor-product lifting, Lorentz generators and SU(2) Euler elements.
//!
//! Generator indices follow the frame labels 0,1,2 on the spacetime,
//! 5,6,7 on the sphere and 0,1,2,5,6,7 on the product; internal storage
//! maps labels to consecutive positions.

use crate::error::{Error, Result};
use crate::exact::{CRat, ExactMat};
use crate::matrix::ExprMat;
use crate::perm::eps3;
use crate::symexpr::ScalarExpr;

/// Signature of a real quadratic space: t timelike (-) and s spacelike (+).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub t: usize,
    pub s: usize,
}

impl Signature {
    pub fn new(t: usize, s: usize) -> Self {
        assert!(t + s >= 1, "signature needs at least one direction");
        Signature { t, s }
    }

    pub fn n(&self) -> usize {
        self.t + self.s
    }
}

/// Pauli matrix by index 1..3.
pub fn pauli(i: usize) -> ExactMat {
    match i {
        1 => ExactMat::from_rows_scaled(&[&[(0, 0), (1, 0)], &[(1, 0), (0, 0)]], CRat::one()),
        2 => ExactMat::from_rows_scaled(&[&[(0, 0), (0, -1)], &[(0, 1), (0, 0)]], CRat::one()),
        3 => ExactMat::from_rows_scaled(&[&[(1, 0), (0, 0)], &[(0, 0), (-1, 0)]], CRat::one()),
        _ => panic!("pauli index must be 1..3"),
    }
}

/// An indexed family of gamma matrices satisfying the Clifford relation
/// {G_i, G_j} = 2 B_ij I exactly, together with its diagonal metric.
#[derive(Debug, Clone)]
pub struct GammaRep {
    pub signature: Signature,
    /// Frame labels in orientation order (0,1,2 / 5,6,7 / 0,1,2,5,6,7).
    pub labels: Vec<u8>,
    /// Diagonal metric entries per position, matching `labels`.
    pub metric: Vec<i8>,
    pub matrices: Vec<ExactMat>,
}

impl GammaRep {
    pub fn dim(&self) -> usize {
        self.matrices[0].rows
    }

    pub fn gamma(&self, position: usize) -> &ExactMat {
        &self.matrices[position]
    }

    pub fn position_of(&self, label: u8) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// All anticommutator residuals {G_i,G_j} - 2 B_ij I. Every entry must
    /// be the zero matrix for a valid representation.
    pub fn clifford_residuals(&self) -> Vec<((u8, u8), ExactMat)> {
        let n = self.matrices.len();
        let d = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                let anti = self.matrices[i]
                    .anticommutator(&self.matrices[j])
                    .expect("square matrices of equal dimension");
                let expected = if i == j {
                    ExactMat::identity(d).scale(&CRat::from_int(2 * self.metric[i] as i64))
                } else {
                    ExactMat::zeros(d, d)
                };
                out.push(((self.labels[i], self.labels[j]), anti.sub(&expected).unwrap()));
            }
        }
        out
    }

    pub fn satisfies_clifford(&self) -> bool {
        self.clifford_residuals().iter().all(|(_, r)| r.is_zero())
    }

    /// Test hook: replace one generator (used to exercise failure paths).
    pub fn with_replaced(&self, position: usize, m: ExactMat) -> GammaRep {
        let mut rep = self.clone();
        rep.matrices[position] = m;
        rep
    }
}

/// Gamma matrices of the (1,2) spacetime factor:
/// g0 = i s2, g1 = -s3, g2 = -s1, metric diag(-,+,+).
pub fn build_gamma_1_2() -> GammaRep {
    let g0 = pauli(2).scale(&CRat::i());
    let g1 = pauli(3).scale(&CRat::from_int(-1));
    let g2 = pauli(1).scale(&CRat::from_int(-1));
    GammaRep {
        signature: Signature::new(1, 2),
        labels: vec![0, 1, 2],
        metric: vec![-1, 1, 1],
        matrices: vec![g0, g1, g2],
    }
}

/// Gamma matrices of the sphere factor:
/// g5 = -t3, g6 = t1, g7 = t2, metric diag(+,+,+).
pub fn build_gamma_0_3() -> GammaRep {
    let g5 = pauli(3).scale(&CRat::from_int(-1));
    let g6 = pauli(1);
    let g7 = pauli(2);
    GammaRep {
        signature: Signature::new(0, 3),
        labels: vec![5, 6, 7],
        metric: vec![1, 1, 1],
        matrices: vec![g5, g6, g7],
    }
}

/// Lift to the product: G^a = r1 x I2 x g^a, G^alpha = r2 x g^alpha x I2.
pub fn lift_to_6d(g3: &GammaRep, g_s: &GammaRep) -> Result<GammaRep> {
    if g3.dim() != 2 || g_s.dim() != 2 {
        return Err(Error::DimensionMismatch(
            "6d lift expects two 2x2 factor representations".into(),
        ));
    }
    let rho1 = pauli(1);
    let rho2 = pauli(2);
    let id2 = ExactMat::identity(2);
    let mut matrices = Vec::with_capacity(6);
    let mut labels = Vec::new();
    let mut metric = Vec::new();
    for (pos, label) in g3.labels.iter().enumerate() {
        matrices.push(rho1.kron(&id2).kron(g3.gamma(pos)));
        labels.push(*label);
        metric.push(g3.metric[pos]);
    }
    for (pos, label) in g_s.labels.iter().enumerate() {
        matrices.push(rho2.kron(g_s.gamma(pos)).kron(&id2));
        labels.push(*label);
        metric.push(g_s.metric[pos]);
    }
    Ok(GammaRep {
        signature: Signature::new(1, 5),
        labels,
        metric,
        matrices,
    })
}

/// Lorentz generators S^{AB} = 1/4 [G^A, G^B], stored for A < B in
/// position order.
#[derive(Debug, Clone)]
pub struct SigmaSet {
    pub labels: Vec<u8>,
    pub metric: Vec<i8>,
    generators: Vec<Vec<Option<ExactMat>>>,
    dim: usize,
}

impl SigmaSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Generator by positions, antisymmetric in its arguments.
    pub fn get(&self, a: usize, b: usize) -> ExactMat {
        if a == b {
            return ExactMat::zeros(self.dim, self.dim);
        }
        if a < b {
            self.generators[a][b].clone().unwrap()
        } else {
            self.generators[b][a]
                .clone()
                .unwrap()
                .scale(&CRat::from_int(-1))
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }
}

pub fn lorentz_generators(g: &GammaRep) -> SigmaSet {
    let n = g.matrices.len();
    let d = g.dim();
    let quarter = CRat::rat(1, 4);
    let mut generators = vec![vec![None; n]; n];
    for a in 0..n {
        for b in (a + 1)..n {
            let comm = g.matrices[a].commutator(&g.matrices[b]).unwrap();
            generators[a][b] = Some(comm.scale(&quarter));
        }
    }
    SigmaSet {
        labels: g.labels.clone(),
        metric: g.metric.clone(),
        generators,
        dim: d,
    }
}

/// so(t,s) closure residuals:
/// [S^{AB}, S^{CD}] - (h^{BC} S^{AD} - h^{AC} S^{BD} - h^{BD} S^{AC} + h^{AD} S^{BC}).
pub fn so_closure_residuals(s: &SigmaSet) -> Vec<((u8, u8, u8, u8), ExactMat)> {
    let n = s.n();
    let h = |i: usize| CRat::from_int(s.metric[i] as i64);
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let lhs = s.get(a, b).commutator(&s.get(c, d)).unwrap();
                    let mut rhs = ExactMat::zeros(s.dim(), s.dim());
                    if b == c {
                        rhs = rhs.add(&s.get(a, d).scale(&h(b))).unwrap();
                    }
                    if a == c {
                        rhs = rhs.sub(&s.get(b, d).scale(&h(a))).unwrap();
                    }
                    if b == d {
                        rhs = rhs.sub(&s.get(a, c).scale(&h(b))).unwrap();
                    }
                    if a == d {
                        rhs = rhs.add(&s.get(b, c).scale(&h(a))).unwrap();
                    }
                    out.push((
                        (s.labels[a], s.labels[b], s.labels[c], s.labels[d]),
                        lhs.sub(&rhs).unwrap(),
                    ));
                }
            }
        }
    }
    out
}

/// One named exact check result.
#[derive(Debug, Clone)]
pub struct BlockCheck {
    pub name: String,
    pub pass: bool,
}

/// Verify the three block formulas for the lifted generators:
/// S^{ab} = I x I x s^{ab}, S^{a beta} = (i/2) r3 x g^beta x g^a,
/// S^{alpha beta} = I x s^{alpha beta} x I.
pub fn verify_generator_blocks(
    sigma6: &SigmaSet,
    g3: &GammaRep,
    g_s: &GammaRep,
) -> Vec<BlockCheck> {
    let id2 = ExactMat::identity(2);
    let rho3 = pauli(3);
    let s3 = lorentz_generators(g3);
    let ss = lorentz_generators(g_s);
    let half_i = CRat::imag_rat(1, 2);
    let mut checks = Vec::new();
    for a in 0..3 {
        for b in (a + 1)..3 {
            let expected = id2.kron(&id2).kron(&s3.get(a, b));
            let pass = sigma6.get(a, b) == expected;
            checks.push(BlockCheck {
                name: format!("Sigma^{{{}{}}} = I (x) I (x) sigma^{{{}{}}}",
                    sigma6.labels[a], sigma6.labels[b], g3.labels[a], g3.labels[b]),
                pass,
            });
        }
    }
    for a in 0..3 {
        for bi in 0..3 {
            let b6 = 3 + bi;
            let expected = rho3
                .kron(g_s.gamma(bi))
                .kron(g3.gamma(a))
                .scale(&half_i);
            let pass = sigma6.get(a, b6) == expected;
            checks.push(BlockCheck {
                name: format!(
                    "Sigma^{{{}{}}} = (i/2) rho3 (x) gamma^{} (x) gamma^{}",
                    sigma6.labels[a], sigma6.labels[b6], g_s.labels[bi], g3.labels[a]
                ),
                pass,
            });
        }
    }
    for ai in 0..3 {
        for bi in (ai + 1)..3 {
            let expected = id2.kron(&ss.get(ai, bi)).kron(&id2);
            let pass = sigma6.get(3 + ai, 3 + bi) == expected;
            checks.push(BlockCheck {
                name: format!(
                    "Sigma^{{{}{}}} = I (x) sigma^{{{}{}}} (x) I",
                    sigma6.labels[3 + ai], sigma6.labels[3 + bi], g_s.labels[ai], g_s.labels[bi]
                ),
                pass,
            });
        }
    }
    checks
}

/// Anti-hermitian su(2) basis aligned with the sphere gamma matrices:
/// X_alpha = (i/2) gamma^alpha. With the representation of
/// [`build_gamma_0_3`] this satisfies [X_a, X_b] = eps_ab^c X_c exactly.
pub fn su2_basis(g_s: &GammaRep) -> [ExactMat; 3] {
    let half_i = CRat::imag_rat(1, 2);
    [
        g_s.gamma(0).scale(&half_i),
        g_s.gamma(1).scale(&half_i),
        g_s.gamma(2).scale(&half_i),
    ]
}

/// An SU(2) element parametrized by Euler angles, with symbolic entries.
#[derive(Debug, Clone)]
pub struct SU2Element {
    pub theta: ScalarExpr,
    pub phi: ScalarExpr,
    pub psi: ScalarExpr,
    pub matrix: ExprMat,
}

fn exp_i_tau3_half(x: &ScalarExpr) -> ExprMat {
    // e^{(i/2) t3 x} = diag(cos(x/2) + i sin(x/2), cos(x/2) - i sin(x/2))
    let half = ScalarExpr::rat(1, 2) * x.clone();
    let c = half.clone().cos();
    let s = half.sin();
    let mut m = ExprMat::zeros(2, 2);
    m.set(0, 0, c.clone() + ScalarExpr::i() * s.clone());
    m.set(1, 1, c - ScalarExpr::i() * s);
    m
}

fn exp_i_tau2_half(x: &ScalarExpr) -> ExprMat {
    // e^{(i/2) t2 x} = [[cos(x/2), sin(x/2)], [-sin(x/2), cos(x/2)]]
    let half = ScalarExpr::rat(1, 2) * x.clone();
    let c = half.clone().cos();
    let s = half.sin();
    let mut m = ExprMat::zeros(2, 2);
    m.set(0, 0, c.clone());
    m.set(0, 1, s.clone());
    m.set(1, 0, -s);
    m.set(1, 1, c);
    m
}

/// Euler parametrization G(theta, phi, psi) =
/// e^{(i/2) t3 phi} e^{(i/2) t2 theta} e^{(i/2) t3 psi}.
pub fn su2_euler(theta: ScalarExpr, phi: ScalarExpr, psi: ScalarExpr) -> SU2Element {
    let m = exp_i_tau3_half(&phi)
        .mul(&exp_i_tau2_half(&theta))
        .unwrap()
        .mul(&exp_i_tau3_half(&psi))
        .unwrap()
        .simplified();
    SU2Element {
        theta,
        phi,
        psi,
        matrix: m,
    }
}

impl SU2Element {
    /// Group inverse; for a unitary element this is the conjugate
    /// transpose, which keeps the entries in closed form.
    pub fn inverse(&self) -> SU2Element {
        SU2Element {
            theta: -self.theta.clone(),
            phi: -self.psi.clone(),
            psi: -self.phi.clone(),
            matrix: self.matrix.dagger().simplified(),
        }
    }
}

/// Pauli product residuals s_i s_j - (d_ij I + i eps_ijk s_k).
pub fn pauli_product_residuals() -> Vec<((usize, usize), ExactMat)> {
    let id2 = ExactMat::identity(2);
    let mut out = Vec::new();
    for i in 1..=3 {
        for j in 1..=3 {
            let prod = pauli(i).mul(&pauli(j)).unwrap();
            let mut expected = if i == j {
                id2.clone()
            } else {
                ExactMat::zeros(2, 2)
            };
            for k in 1..=3 {
                let e = eps3(i - 1, j - 1, k - 1);
                if e != 0 {
                    expected = expected
                        .add(&pauli(k).scale(&CRat::imag_rat(e as i64, 1)))
                        .unwrap();
                }
            }
            out.push(((i, j), prod.sub(&expected).unwrap()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{Chart, Point};
    use num::complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gamma0_is_i_sigma2_explicitly() {
        let g = build_gamma_1_2();
        let expected =
            ExactMat::from_rows_scaled(&[&[(0, 0), (1, 0)], &[(-1, 0), (0, 0)]], CRat::one());
        assert_eq!(g.gamma(0), &expected);
    }

    #[test]
    fn gamma5_is_minus_tau3() {
        let g = build_gamma_0_3();
        let expected =
            ExactMat::from_rows_scaled(&[&[(-1, 0), (0, 0)], &[(0, 0), (1, 0)]], CRat::one());
        assert_eq!(g.gamma(0), &expected);
    }

    #[test]
    fn clifford_relation_spacetime() {
        let g = build_gamma_1_2();
        assert!(g.satisfies_clifford());
        // {g0,g0} = -2 I explicitly
        let anti = g.gamma(0).anticommutator(g.gamma(0)).unwrap();
        assert_eq!(anti, ExactMat::identity(2).scale(&CRat::from_int(-2)));
        let mixed = g.gamma(0).anticommutator(g.gamma(1)).unwrap();
        assert!(mixed.is_zero());
    }

    #[test]
    fn clifford_relation_sphere() {
        let g = build_gamma_0_3();
        assert!(g.satisfies_clifford());
        let anti = g.gamma(1).anticommutator(g.gamma(1)).unwrap();
        assert_eq!(anti, ExactMat::identity(2).scale(&CRat::from_int(2)));
        let mixed = g.gamma(1).anticommutator(g.gamma(2)).unwrap();
        assert!(mixed.is_zero());
    }

    #[test]
    fn lifted_rep_satisfies_clifford_exactly() {
        let g = lift_to_6d(&build_gamma_1_2(), &build_gamma_0_3()).unwrap();
        assert_eq!(g.dim(), 8);
        assert!(g.satisfies_clifford());
    }

    #[test]
    fn lifted_gamma0_matches_direct_kronecker() {
        let g3 = build_gamma_1_2();
        let gs = build_gamma_0_3();
        let g6 = lift_to_6d(&g3, &gs).unwrap();
        let direct = pauli(1).kron(&ExactMat::identity(2)).kron(&pauli(2).scale(&CRat::i()));
        assert_eq!(g6.gamma(0), &direct);
    }

    #[test]
    fn mixed_blocks_anticommute() {
        let g = lift_to_6d(&build_gamma_1_2(), &build_gamma_0_3()).unwrap();
        let anti = g.gamma(0).anticommutator(g.gamma(3)).unwrap();
        assert!(anti.is_zero());
    }

    #[test]
    fn sigma56_is_half_gamma5_gamma6() {
        let gs = build_gamma_0_3();
        let s = lorentz_generators(&gs);
        let expected = gs.gamma(0).mul(gs.gamma(1)).unwrap().scale(&CRat::rat(1, 2));
        assert_eq!(s.get(0, 1), expected);
    }

    #[test]
    fn sigma_antisymmetric_and_diagonal_zero() {
        let s = lorentz_generators(&build_gamma_1_2());
        assert!(s.get(1, 1).is_zero());
        assert_eq!(s.get(0, 1), s.get(1, 0).scale(&CRat::from_int(-1)));
    }

    #[test]
    fn so_closure_exact_for_all_reps() {
        for rep in [
            build_gamma_1_2(),
            build_gamma_0_3(),
            lift_to_6d(&build_gamma_1_2(), &build_gamma_0_3()).unwrap(),
        ] {
            let s = lorentz_generators(&rep);
            for (idx, r) in so_closure_residuals(&s) {
                assert!(r.is_zero(), "closure fails at {idx:?}");
            }
        }
    }

    #[test]
    fn generator_blocks_match_exactly() {
        let g3 = build_gamma_1_2();
        let gs = build_gamma_0_3();
        let g6 = lift_to_6d(&g3, &gs).unwrap();
        let s6 = lorentz_generators(&g6);
        let checks = verify_generator_blocks(&s6, &g3, &gs);
        assert_eq!(checks.len(), 15);
        for c in &checks {
            assert!(c.pass, "block formula failed: {}", c.name);
        }
    }

    #[test]
    fn pauli_product_identity_all_pairs() {
        for ((i, j), r) in pauli_product_residuals() {
            assert!(r.is_zero(), "pauli product fails at ({i},{j})");
        }
    }

    #[test]
    fn su2_basis_bracket_is_epsilon() {
        let gs = build_gamma_0_3();
        let x = su2_basis(&gs);
        for a in 0..3 {
            for b in 0..3 {
                let lhs = x[a].commutator(&x[b]).unwrap();
                let mut rhs = ExactMat::zeros(2, 2);
                for c in 0..3 {
                    let e = eps3(a, b, c);
                    if e != 0 {
                        rhs = rhs.add(&x[c].scale(&CRat::from_int(e as i64))).unwrap();
                    }
                }
                assert_eq!(lhs, rhs, "su(2) bracket fails at ({a},{b})");
            }
        }
    }

    #[test]
    fn euler_identity_element() {
        let g = su2_euler(ScalarExpr::zero(), ScalarExpr::zero(), ScalarExpr::zero());
        let m = g.matrix.simplified();
        assert_eq!(m, ExprMat::identity(2));
    }

    fn euler_chart() -> Chart {
        Chart::new(
            "euler",
            &[
                ("th", 0.0, std::f64::consts::PI),
                ("ph", 0.0, 2.0 * std::f64::consts::PI),
                ("ps", 0.0, 4.0 * std::f64::consts::PI),
            ],
        )
    }

    fn generic_euler() -> SU2Element {
        su2_euler(
            ScalarExpr::coord("th"),
            ScalarExpr::coord("ph"),
            ScalarExpr::coord("ps"),
        )
    }

    #[test]
    fn euler_determinant_is_one_numerically() {
        let g = generic_euler();
        let det = g.matrix.det2().unwrap();
        let chart = euler_chart();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p = chart.sample_point(&mut rng);
            let v = det.eval(&p).unwrap();
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn euler_unitary_numerically() {
        let g = generic_euler();
        let prod = g.matrix.mul(&g.matrix.dagger()).unwrap();
        let chart = euler_chart();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let p = chart.sample_point(&mut rng);
            let m = prod.eval(&p).unwrap();
            for r in 0..2 {
                for c in 0..2 {
                    let want = if r == c { 1.0 } else { 0.0 };
                    assert!((m.get(r, c) - Complex64::new(want, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn inverse_is_pointwise_matrix_inverse() {
        let g = generic_euler();
        let prod = g.matrix.mul(&g.inverse().matrix).unwrap();
        let chart = euler_chart();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let p = chart.sample_point(&mut rng);
        let m = prod.eval(&p).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((m.get(r, c) - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
        let _ = Point::new();
    }

    #[test]
    fn corrupted_rep_fails_clifford() {
        let g = build_gamma_1_2().with_replaced(0, pauli(1));
        assert!(!g.satisfies_clifford());
    }
}
