//! Dirac operators on the factors and the product, the reduced equation
//! system with tagged terms, the sphere eigenstate extraction, the mass
//! spectrum of the effective fields and the minimal-coupling operator
//! with its gauge-covariance check.

use num::complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::clifford::{
    build_gamma_0_3, build_gamma_1_2, lift_to_6d, lorentz_generators, GammaRep, SigmaSet,
};
use crate::error::{Error, Result};
use crate::exact::{CRat, ExactMat};
use crate::exterior::{Coframe, Form, FrameKind};
use crate::geometry::{
    base_volume_form, curvature, fiber_hodge_form, fiber_volume_form, random_poly,
    solve_levi_civita, ConnectionForms, CurvatureForms, GaugePotential, KKGeometry,
    SpacetimeModel, SPACETIME_SIGNATURE,
};
use crate::matrix::ExprMat;
use crate::perm::eps3;
use crate::report::ResidualCheck;
use crate::symexpr::{Chart, ScalarExpr};

/// Random two-component spinor with polynomial entries on a chart.
pub fn random_spinor(chart: &Chart, rng: &mut ChaCha8Rng, degree: u32) -> ExprMat {
    ExprMat::from_fn(2, 1, |_, _| random_poly(chart, rng, degree))
}

/// The six-dimensional spinor ansatz: an eta-doublet of sphere-section
/// columns tensored with spacetime spinors,
/// Psi = sum_{ij} eta^i (x) (section xi^j) (x) psi_{ij},
/// with slot order (eta, sphere, spacetime).
#[derive(Debug, Clone)]
pub struct AnsatzSpinor6 {
    /// 2x2 group-element section on the sphere chart.
    pub section: ExprMat,
    /// Human-readable name of the section choice, echoed in reports.
    pub section_name: String,
    /// psi[i][j] are 2x1 spinors on the spacetime chart.
    pub psi: [[ExprMat; 2]; 2],
}

impl AnsatzSpinor6 {
    pub fn new(section: ExprMat, section_name: &str, psi: [[ExprMat; 2]; 2]) -> Result<Self> {
        if section.shape() != (2, 2) {
            return Err(Error::ShapeMismatch("section must be 2x2".into()));
        }
        for row in &psi {
            for p in row {
                if p.shape() != (2, 1) {
                    return Err(Error::ShapeMismatch("spinor blocks must be 2x1".into()));
                }
            }
        }
        Ok(AnsatzSpinor6 {
            section,
            section_name: section_name.to_string(),
            psi,
        })
    }

    /// Seeded ansatz over the given geometry: the inverse Euler element
    /// as the sphere section and random polynomial spacetime spinors.
    pub fn random(geom: &KKGeometry, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chart = &geom.spacetime.chart;
        let mk = |rng: &mut ChaCha8Rng| random_spinor(chart, rng, 1);
        let psi = [
            [mk(&mut rng), mk(&mut rng)],
            [mk(&mut rng), mk(&mut rng)],
        ];
        AnsatzSpinor6 {
            section: geom.sphere.euler.inverse().matrix,
            section_name: "inverse-euler".to_string(),
            psi,
        }
    }

    /// Column j of the section: the 2x1 sphere spinor (section xi^j).
    pub fn section_column(&self, j: usize) -> ExprMat {
        ExprMat::from_fn(2, 1, |r, _| self.section.get(r, j).clone())
    }

    /// The assembled 8x1 column on the product chart.
    pub fn assembled(&self) -> ExprMat {
        let mut acc = ExprMat::zeros(8, 1);
        for i in 0..2 {
            let mut eta = ExprMat::zeros(2, 1);
            eta.set(i, 0, ScalarExpr::one());
            for j in 0..2 {
                let term = eta.kron(&self.section_column(j)).kron(&self.psi[i][j]);
                acc = acc.add(&term).expect("8x1 blocks");
            }
        }
        acc
    }
}

/// The factor Dirac operator (gamma^c * e_c) ^ (d + 1/2 omega_{ab}
/// sigma^{ab}) applied to a 2x1 spinor column, returned as the
/// coordinate-frame top form on the factor chart.
pub fn dirac_factor(
    col: &ExprMat,
    cf: &Coframe,
    omega: &ConnectionForms,
    gamma: &GammaRep,
    sigma: &SigmaSet,
) -> Result<Form> {
    let chart = cf.chart.clone();
    let psi0 = Form::from_block(chart.clone(), FrameKind::Coordinate, col.clone());
    let mut cov = psi0.d()?;
    for a in 0..cf.dim() {
        for b in (a + 1)..cf.dim() {
            let w = omega.get(a, b).to_coordinate(cf)?;
            if w.is_empty() {
                continue;
            }
            let rotated = ExprMat::from_exact(&sigma.get(a, b)).mul(col)?;
            if rotated.is_zero() {
                continue;
            }
            let block = Form::from_block(chart.clone(), FrameKind::Coordinate, rotated);
            cov = cov.add(&w.wedge(&block)?)?;
        }
    }
    let mut out = Form::zero(chart, FrameKind::Coordinate, cf.dim(), (2, 1));
    for c in 0..cf.dim() {
        let star_ec = cf.basis(c).hodge(cf)?.to_coordinate(cf)?;
        let term = star_ec
            .wedge(&cov)?
            .mat_mul_left(&ExprMat::from_exact(gamma.gamma(c)))?;
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Result of testing a sphere spinor against the sphere Dirac operator.
#[derive(Debug, Clone, Copy)]
pub struct EigenResult {
    /// Fitted eigenvalue in D-slash s = mu s star(1).
    pub value: Complex64,
    /// Largest deviation of any sampled component from the fit.
    pub spread: f64,
    /// Whether the fitted eigenvalue is numerically zero.
    pub zero_mode: bool,
}

/// Fit the eigenvalue of the sphere Dirac operator on a 2x1 sphere
/// spinor at seeded points. Errors with [`Error::NotAnEigenstate`] when
/// the residual spread exceeds `tol`.
pub fn extract_eigenvalue(
    col: &ExprMat,
    sphere_cf: &Coframe,
    seed: u64,
    samples: usize,
    tol: f64,
) -> Result<EigenResult> {
    let gs = build_gamma_0_3();
    let sigs = lorentz_generators(&gs);
    let omega = solve_levi_civita(sphere_cf)?;
    let lhs = dirac_factor(col, sphere_cf, &omega, &gs, &sigs)?;
    let vol = sphere_cf.volume().to_coordinate(sphere_cf)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<_> = (0..samples)
        .map(|_| sphere_cf.chart.sample_point(&mut rng))
        .collect();

    // least-squares fit of L_i = mu * (s_i v) over all rows and points
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0f64;
    let mut rows = Vec::new();
    let top: Vec<u8> = (0..sphere_cf.dim() as u8).collect();
    for p in &points {
        let l = lhs
            .component(&top)
            .map(|m| m.eval(p))
            .transpose()?
            .unwrap_or_else(|| crate::matrix::NumMat::zeros(2, 1));
        let s = col.eval(p)?;
        let v = vol
            .component(&top)
            .map(|m| m.eval(p))
            .transpose()?
            .map(|m| m.get(0, 0))
            .unwrap_or_else(|| Complex64::new(0.0, 0.0));
        for r in 0..2 {
            let rhs = s.get(r, 0) * v;
            num += rhs.conj() * l.get(r, 0);
            den += rhs.norm_sqr();
            rows.push((l.get(r, 0), rhs));
        }
    }
    if den < 1e-12 {
        return Err(Error::DimensionMismatch(
            "sphere spinor vanishes at every sampled point".into(),
        ));
    }
    let mu = num / den;
    let scale = rows.iter().map(|(_, r)| r.norm()).fold(0.0f64, f64::max);
    let spread = rows
        .iter()
        .map(|(l, r)| (l - mu * r).norm())
        .fold(0.0f64, f64::max)
        / scale.max(1e-12);
    if spread > tol {
        return Err(Error::NotAnEigenstate { spread });
    }
    Ok(EigenResult {
        value: mu,
        spread,
        zero_mode: mu.norm() < tol,
    })
}

/// Everything the reduction needs besides the ansatz: the geometry, the
/// gamma representations, the Lorentz generators, the factor and
/// product connections and the gauge curvature.
pub struct ReductionContext {
    pub geom: KKGeometry,
    pub g3: GammaRep,
    pub gs: GammaRep,
    pub g6: GammaRep,
    pub sig3: SigmaSet,
    pub sigs: SigmaSet,
    pub sig6: SigmaSet,
    pub st_omega: ConnectionForms,
    pub sph_omega: ConnectionForms,
    pub omega6: ConnectionForms,
    pub fc: CurvatureForms,
}

impl ReductionContext {
    pub fn new(geom: KKGeometry) -> Result<Self> {
        let g3 = build_gamma_1_2();
        let gs = build_gamma_0_3();
        let g6 = lift_to_6d(&g3, &gs)?;
        let sig3 = lorentz_generators(&g3);
        let sigs = lorentz_generators(&gs);
        let sig6 = lorentz_generators(&g6);
        let st_omega = solve_levi_civita(&geom.spacetime.coframe)?;
        let sph_omega = solve_levi_civita(&geom.sphere.coframe)?;
        let omega6 = solve_levi_civita(&geom.coframe)?;
        let fc = curvature(&geom.gauge, &geom.spacetime)?;
        Ok(ReductionContext {
            geom,
            g3,
            gs,
            g6,
            sig3,
            sigs,
            sig6,
            st_omega,
            sph_omega,
            omega6,
            fc,
        })
    }
}

/// Residual of the six-dimensional Dirac equation
/// #Gamma ^ D Psi - M #Psi on the assembled ansatz, as a product-chart
/// coordinate top form with 8x1 blocks.
pub fn dirac_6d_residual(
    ctx: &ReductionContext,
    ansatz: &AnsatzSpinor6,
    mass: &ScalarExpr,
) -> Result<Form> {
    let cf = &ctx.geom.coframe;
    let chart = ctx.geom.chart.clone();
    let psi = ansatz.assembled();
    let psi0 = Form::from_block(chart.clone(), FrameKind::Coordinate, psi.clone());

    let mut cov = psi0.d()?;
    for a in 0..6 {
        for b in (a + 1)..6 {
            let w = ctx.omega6.get(a, b).to_coordinate(cf)?;
            if w.is_empty() {
                continue;
            }
            let rotated = ExprMat::from_exact(&ctx.sig6.get(a, b)).mul(&psi)?;
            if rotated.is_zero() {
                continue;
            }
            let block = Form::from_block(chart.clone(), FrameKind::Coordinate, rotated);
            cov = cov.add(&w.wedge(&block)?)?;
        }
    }

    let mut lhs = Form::zero(chart.clone(), FrameKind::Coordinate, 6, (8, 1));
    for a in 0..6 {
        let star_ea = cf.basis(a).hodge(cf)?.to_coordinate(cf)?;
        let term = star_ea
            .wedge(&cov)?
            .mat_mul_left(&ExprMat::from_exact(ctx.g6.gamma(a)))?;
        lhs = lhs.add(&term)?;
    }

    let vol = cf.volume().to_coordinate(cf)?;
    let rhs = vol.mat_mul_left(&psi.scale(mass))?;
    lhs.sub(&rhs)
}

/// Whether the reduced equations keep the sphere Dirac operator or
/// substitute a fitted eigenvalue for it.
#[derive(Debug, Clone)]
pub enum SphereMode {
    Operator,
    Eigenvalue(ScalarExpr),
}

/// Origin of one term in a reduced equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermTag {
    SpacetimeDirac,
    CurvatureCoupling,
    GaugeStarDirac,
    MinimalCoupling,
    SphereDirac,
    EigenstateMass,
}

/// One tagged contribution: a product-chart coordinate top form with
/// 4x1 blocks in the (sphere, spacetime) slots.
#[derive(Debug, Clone)]
pub struct ReducedTerm {
    pub tag: TermTag,
    pub form: Form,
}

/// A reduced equation: tagged left-hand terms and the mass right-hand
/// side, all in one volume basis.
#[derive(Debug, Clone)]
pub struct ReducedEquation {
    pub terms: Vec<ReducedTerm>,
    pub rhs: Form,
}

impl ReducedEquation {
    pub fn residual(&self) -> Result<Form> {
        let mut acc = self.rhs.scale(&ScalarExpr::from_int(-1));
        for t in &self.terms {
            acc = acc.add(&t.form)?;
        }
        Ok(acc)
    }

    pub fn tags(&self) -> Vec<TermTag> {
        self.terms.iter().map(|t| t.tag).collect()
    }
}

/// The pair of reduced equations: index 0 couples psi_{2j} to M psi_{1j},
/// index 1 couples psi_{1j} to M psi_{2j}.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub equations: [ReducedEquation; 2],
}

fn sigma_curvature_matrix(ctx: &ReductionContext, alpha: usize) -> ExprMat {
    // sum over all a, b of F_{alpha a b} sigma^{ab} = 2 sum_{a<b}
    let mut acc = ExprMat::zeros(2, 2);
    for a in 0..3 {
        for b in (a + 1)..3 {
            let coeff = ScalarExpr::from_int(2) * ctx.fc.lowered(alpha, a, b);
            if coeff.is_zero() {
                continue;
            }
            acc = acc
                .add(&ExprMat::from_exact(&ctx.sig3.get(a, b)).scale(&coeff))
                .expect("2x2 blocks");
        }
    }
    acc
}

fn sigma_minimal_matrix(ctx: &ReductionContext, a: usize) -> ExprMat {
    // 1/4 eps_{alpha beta gamma} A_{gamma a} sigma^{alpha beta}, the
    // spacetime index of the gauge coefficient lowered by the metric
    let mut acc = ExprMat::zeros(2, 2);
    for gamma in 0..3 {
        let coeff = ScalarExpr::rat(SPACETIME_SIGNATURE[a] as i64, 2)
            * ctx.geom.gauge.comps[gamma][a].clone();
        if coeff.is_zero() {
            continue;
        }
        // sum over all alpha, beta of eps sigma^{alpha beta} = 2 sum_{<}
        for alpha in 0..3 {
            for beta in (alpha + 1)..3 {
                let eps = eps3(alpha, beta, gamma);
                if eps == 0 {
                    continue;
                }
                let c = coeff.clone() * ScalarExpr::from_int(eps as i64);
                acc = acc
                    .add(&ExprMat::from_exact(&ctx.sigs.get(alpha, beta)).scale(&c))
                    .expect("2x2 blocks");
            }
        }
    }
    acc
}

/// Sphere covariant derivative (d + 1/2 omega sigma) of a 2x1 sphere
/// spinor, embedded as a product-chart coordinate 1-form.
fn sphere_covariant(ctx: &ReductionContext, col: &ExprMat) -> Result<Form> {
    let cf = &ctx.geom.sphere.coframe;
    let chart = cf.chart.clone();
    let psi0 = Form::from_block(chart.clone(), FrameKind::Coordinate, col.clone());
    let mut cov = psi0.d()?;
    for a in 0..3 {
        for b in (a + 1)..3 {
            let w = ctx.sph_omega.get(a, b).to_coordinate(cf)?;
            if w.is_empty() {
                continue;
            }
            let rotated = ExprMat::from_exact(&ctx.sigs.get(a, b)).mul(col)?;
            if rotated.is_zero() {
                continue;
            }
            let block = Form::from_block(chart.clone(), FrameKind::Coordinate, rotated);
            cov = cov.add(&w.wedge(&block)?)?;
        }
    }
    cov.embed(ctx.geom.chart.clone(), 3)
}

/// Build the reduced system for the given ansatz and bulk mass.
pub fn reduce_equations(
    ctx: &ReductionContext,
    ansatz: &AnsatzSpinor6,
    mass: &ScalarExpr,
    mode: &SphereMode,
) -> Result<ReducedSystem> {
    let geom = &ctx.geom;
    let chart = geom.chart.clone();
    let st_vol = base_volume_form(geom)?;
    let sph_vol = fiber_volume_form(geom)?;
    let has_gauge = !geom.gauge.is_zero();

    // factor Dirac applications, embedded into the product chart
    let mut st_dirac = Vec::new();
    for i in 0..2 {
        let mut row = Vec::new();
        for j in 0..2 {
            let d = dirac_factor(
                &ansatz.psi[i][j],
                &geom.spacetime.coframe,
                &ctx.st_omega,
                &ctx.g3,
                &ctx.sig3,
            )?;
            row.push(d.embed(chart.clone(), 0)?);
        }
        st_dirac.push(row);
    }
    let gcol: Vec<ExprMat> = (0..2).map(|j| ansatz.section_column(j)).collect();
    let sph_dirac: Vec<Form> = match mode {
        SphereMode::Operator => {
            let mut v = Vec::new();
            for g in &gcol {
                let d = dirac_factor(
                    g,
                    &geom.sphere.coframe,
                    &ctx.sph_omega,
                    &ctx.gs,
                    &ctx.sigs,
                )?;
                v.push(d.embed(chart.clone(), 3)?);
            }
            v
        }
        SphereMode::Eigenvalue(mu) => {
            let mut v = Vec::new();
            for g in &gcol {
                let d = sph_vol.mat_mul_left(&g.scale(mu))?;
                v.push(d);
            }
            v
        }
    };
    let dsph: Vec<Form> = gcol
        .iter()
        .map(|g| sphere_covariant(ctx, g))
        .collect::<Result<_>>()?;

    let mut equations = Vec::with_capacity(2);
    for k in 0..2usize {
        // equation k = 0 carries psi_{2j} on the left, psi_{1j} on the
        // right; the sphere-sector signs flip between the two equations
        let used = 1 - k;
        let sgn = if k == 0 { 1i64 } else { -1 };
        let mut terms = Vec::new();

        // star(1) ^ (section xi^j) (x) D-slash psi
        let mut f = Form::zero(chart.clone(), FrameKind::Coordinate, 6, (4, 1));
        for j in 0..2 {
            let t = sph_vol.wedge(&st_dirac[used][j].kron_left(&gcol[j]))?;
            f = f.add(&t)?;
        }
        terms.push(ReducedTerm {
            tag: TermTag::SpacetimeDirac,
            form: f,
        });

        if has_gauge {
            // -/+ (i/4) F_{alpha a b} sigma^{ab} against gamma^alpha on
            // the sphere slot, on the full volume
            let coeff = ScalarExpr::constant(CRat::imag_rat(-sgn, 4));
            let mut block = ExprMat::zeros(4, 1);
            for j in 0..2 {
                for alpha in 0..3 {
                    let left = ExprMat::from_exact(ctx.gs.gamma(alpha)).mul(&gcol[j])?;
                    let right = sigma_curvature_matrix(ctx, alpha)
                        .mul(&ansatz.psi[used][j])?
                        .scale(&coeff);
                    block = block.add(&left.kron(&right))?;
                }
            }
            let f = sph_vol.wedge(&st_vol)?.mat_mul_left(&block)?;
            terms.push(ReducedTerm {
                tag: TermTag::CurvatureCoupling,
                form: f,
            });

            // (A^gamma_a star(e_gamma)) ^ (d + omega/2) section against
            // gamma^a psi
            let mut f = Form::zero(chart.clone(), FrameKind::Coordinate, 6, (4, 1));
            for a in 0..3 {
                let mut w = Form::zero(chart.clone(), FrameKind::Coordinate, 2, (1, 1));
                for gamma in 0..3 {
                    let c = ScalarExpr::from_int(SPACETIME_SIGNATURE[a] as i64)
                        * geom.gauge.comps[gamma][a].clone();
                    if c.is_zero() {
                        continue;
                    }
                    w = w.add(&fiber_hodge_form(geom, gamma)?.scale(&c))?;
                }
                if w.is_empty() {
                    continue;
                }
                for j in 0..2 {
                    let right = ExprMat::from_exact(ctx.g3.gamma(a)).mul(&ansatz.psi[used][j])?;
                    let t = st_vol.wedge(&w.wedge(&dsph[j])?.kron_right(&right))?;
                    f = f.add(&t)?;
                }
            }
            terms.push(ReducedTerm {
                tag: TermTag::GaugeStarDirac,
                form: f,
            });

            // 1/4 eps_{alpha beta gamma} A_{gamma a} sigma^{alpha beta}
            // section against gamma^a psi, on the full volume
            let mut block = ExprMat::zeros(4, 1);
            for a in 0..3 {
                let m = sigma_minimal_matrix(ctx, a);
                if m.is_zero() {
                    continue;
                }
                for j in 0..2 {
                    let left = m.mul(&gcol[j])?;
                    let right = ExprMat::from_exact(ctx.g3.gamma(a)).mul(&ansatz.psi[used][j])?;
                    block = block.add(&left.kron(&right))?;
                }
            }
            let f = st_vol.wedge(&sph_vol)?.mat_mul_left(&block)?;
            terms.push(ReducedTerm {
                tag: TermTag::MinimalCoupling,
                form: f,
            });
        }

        // +/- i sphere Dirac on the section against psi
        let coeff = ScalarExpr::constant(CRat::imag_rat(sgn, 1));
        let mut f = Form::zero(chart.clone(), FrameKind::Coordinate, 6, (4, 1));
        for j in 0..2 {
            let t = st_vol.wedge(&sph_dirac[j].kron_right(&ansatz.psi[used][j]))?;
            f = f.add(&t.scale(&coeff))?;
        }
        terms.push(ReducedTerm {
            tag: match mode {
                SphereMode::Operator => TermTag::SphereDirac,
                SphereMode::Eigenvalue(_) => TermTag::EigenstateMass,
            },
            form: f,
        });

        // M (section xi^j) (x) psi on the full volume
        let mut block = ExprMat::zeros(4, 1);
        for j in 0..2 {
            block = block.add(&gcol[j].kron(&ansatz.psi[k][j].scale(mass)))?;
        }
        let rhs = st_vol.wedge(&sph_vol)?.mat_mul_left(&block)?;

        equations.push(ReducedEquation { terms, rhs });
    }
    let eq1 = equations.pop().expect("two equations");
    let eq0 = equations.pop().expect("two equations");
    Ok(ReducedSystem {
        equations: [eq0, eq1],
    })
}

fn block_rows(m: &ExprMat, r0: usize, n: usize) -> ExprMat {
    ExprMat::from_fn(n, m.cols, |r, c| m.get(r0 + r, c).clone())
}

/// Restrict an 8x1-block form to four consecutive block rows.
fn restrict_rows(f: &Form, r0: usize) -> Form {
    let mut out = f.map_blocks(|b| block_rows(b, r0, 4));
    out.shape = (4, f.shape.1);
    out
}

/// Check that the tagged reduced equations reproduce the corresponding
/// eta-doublet blocks of the full six-dimensional residual at seeded
/// points.
pub fn verify_reduction(
    ctx: &ReductionContext,
    ansatz: &AnsatzSpinor6,
    mass: &ScalarExpr,
    seed: u64,
    samples: usize,
    tol: f64,
) -> Result<ResidualCheck> {
    let full = dirac_6d_residual(ctx, ansatz, mass)?;
    let system = reduce_equations(ctx, ansatz, mass, &SphereMode::Operator)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<_> = (0..samples)
        .map(|_| ctx.geom.chart.sample_point(&mut rng))
        .collect();
    let mut residuals = Vec::new();
    for k in 0..2 {
        let reduced = system.equations[k].residual()?;
        let block = restrict_rows(&full, 4 * k);
        let diff = reduced.sub(&block)?;
        for p in &points {
            residuals.push(diff.max_abs_at(p)?);
        }
    }
    Ok(ResidualCheck::from_residuals(
        "reduction-soundness",
        &residuals,
        tol,
    ))
}

/// Replace the sphere Dirac operator by the fitted eigenvalue of the
/// section, erroring when the section is not an eigenstate. Returns the
/// specialized system together with the fit.
pub fn specialize_eigenstate(
    ctx: &ReductionContext,
    ansatz: &AnsatzSpinor6,
    mass: &ScalarExpr,
    seed: u64,
    samples: usize,
    tol: f64,
) -> Result<(ReducedSystem, EigenResult)> {
    let mut fit: Option<EigenResult> = None;
    for j in 0..2 {
        let r = extract_eigenvalue(
            &ansatz.section_column(j),
            &ctx.geom.sphere.coframe,
            seed,
            samples,
            tol,
        )?;
        if let Some(prev) = fit {
            if (prev.value - r.value).norm() > tol {
                return Err(Error::NotAnEigenstate {
                    spread: (prev.value - r.value).norm(),
                });
            }
        }
        fit = Some(r);
    }
    let fit = fit.expect("two columns");
    let mu = ScalarExpr::constant(nearest_rational_complex(fit.value));
    let system = reduce_equations(ctx, ansatz, mass, &SphereMode::Eigenvalue(mu))?;
    Ok((system, fit))
}

/// Snap a numerically fitted eigenvalue to the nearest small-denominator
/// complex rational so the specialized system stays exact.
fn nearest_rational_complex(z: Complex64) -> CRat {
    let snap = |x: f64| -> (i64, i64) {
        let mut best = (0i64, 1i64);
        let mut err = f64::INFINITY;
        for den in 1..=16i64 {
            let num = (x * den as f64).round() as i64;
            let e = (x - num as f64 / den as f64).abs();
            if e < err - 1e-15 {
                err = e;
                best = (num, den);
            }
        }
        best
    };
    let (rn, rd) = snap(z.re);
    let (in_, id) = snap(z.im);
    &CRat::rat(rn, rd) + &CRat::imag_rat(in_, id)
}

/// The effective 2x2 mass matrix coupling the doublet (psi_1, psi_2)
/// and its exact spectrum.
#[derive(Debug, Clone)]
pub struct MassSpectrum {
    pub matrix: ExactMat,
    pub eigenvalues: [CRat; 2],
    /// Half-weight eigenvectors: psi_+/- = (psi_1 -/+ i psi_2) / 2.
    pub eigenvectors: [[CRat; 2]; 2],
    /// True when m > M, which drives one eigenvalue negative.
    pub negative_branch: bool,
}

/// Build the mass matrix [[M, i m], [-i m, M]] for real rational M and
/// m and diagonalize it exactly: eigenvalues M + m and M - m.
pub fn mass_spectrum(m_bulk: &CRat, m_sphere: &CRat) -> Result<MassSpectrum> {
    if !m_bulk.is_real() || !m_sphere.is_real() {
        return Err(Error::Config(
            "mass parameters must be real rationals".into(),
        ));
    }
    let mut matrix = ExactMat::zeros(2, 2);
    matrix.set(0, 0, m_bulk.clone());
    matrix.set(1, 1, m_bulk.clone());
    matrix.set(0, 1, &CRat::i() * m_sphere);
    matrix.set(1, 0, &(-&CRat::i()) * m_sphere);
    let plus = m_bulk + m_sphere;
    let minus = m_bulk - m_sphere;
    let half = CRat::rat(1, 2);
    let eigenvectors = [
        [half.clone(), &(-&CRat::i()) * &half],
        [half.clone(), &CRat::i() * &half],
    ];
    // exact eigen-equation check: matrix v = lambda v
    for (vec, lam) in eigenvectors.iter().zip([&plus, &minus]) {
        for r in 0..2 {
            let lhs = &(matrix.get(r, 0) * &vec[0]) + &(matrix.get(r, 1) * &vec[1]);
            let rhs = lam * &vec[r];
            if lhs != rhs {
                return Err(Error::DimensionMismatch(
                    "mass matrix eigen-equation failed".into(),
                ));
            }
        }
    }
    let negative_branch = m_sphere.re > m_bulk.re;
    Ok(MassSpectrum {
        matrix,
        eigenvalues: [plus, minus],
        eigenvectors,
        negative_branch,
    })
}

/// The effective four-component field on the spacetime:
/// Psi-tilde = sum_i (section xi^i) (x) psi_i with a spacetime-dependent
/// 2x2 iso-section.
#[derive(Debug, Clone)]
pub struct EffectiveField {
    pub section: ExprMat,
    pub psi: [ExprMat; 2],
}

impl EffectiveField {
    pub fn random(chart: &Chart, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let angles: Vec<ScalarExpr> = (0..3).map(|_| random_poly(chart, &mut rng, 1)).collect();
        let section =
            crate::clifford::su2_euler(angles[0].clone(), angles[1].clone(), angles[2].clone())
                .matrix;
        let psi = [
            random_spinor(chart, &mut rng, 1),
            random_spinor(chart, &mut rng, 1),
        ];
        EffectiveField { section, psi }
    }

    /// The assembled 4x1 column in the (iso, spinor) slot order.
    pub fn column(&self) -> ExprMat {
        let mut acc = ExprMat::zeros(4, 1);
        for i in 0..2 {
            let sec = ExprMat::from_fn(2, 1, |r, _| self.section.get(r, i).clone());
            acc = acc.add(&sec.kron(&self.psi[i])).expect("4x1 blocks");
        }
        acc
    }
}

/// The gauge potential as an su(2)-matrix-valued coordinate 1-form
/// A = A^alpha X_alpha on the spacetime chart.
pub fn gauge_matrix_form(gauge: &GaugePotential, st: &SpacetimeModel) -> Result<Form> {
    let x = crate::clifford::su2_basis(&build_gamma_0_3());
    let mut out = Form::zero(st.chart.clone(), FrameKind::Coordinate, 1, (2, 2));
    for alpha in 0..3 {
        let a = gauge.one_form(st, alpha);
        if a.is_empty() {
            continue;
        }
        let m = ExprMat::from_exact(&x[alpha]);
        out = out.add(&a.map_blocks(|b| m.scale(b.get(0, 0))).with_shape((2, 2)))?;
    }
    Ok(out)
}

/// Minimally coupled Dirac operator on the effective field:
/// (gamma^c * e_c) ^ [ (d + A) (x) I + I (x) (d + omega/2) ] applied to
/// an assembled 4x1 column.
pub fn minimal_dirac(
    st: &SpacetimeModel,
    st_omega: &ConnectionForms,
    g3: &GammaRep,
    sig3: &SigmaSet,
    amat: &Form,
    col: &ExprMat,
) -> Result<Form> {
    let cf = &st.coframe;
    let chart = st.chart.clone();
    let psi0 = Form::from_block(chart.clone(), FrameKind::Coordinate, col.clone());
    let mut cov = psi0.d()?;
    let id2 = ExprMat::identity(2);
    if !amat.is_empty() {
        let lifted = amat.kron_right(&id2);
        cov = cov.add(&lifted.wedge(&psi0)?)?;
    }
    for a in 0..3 {
        for b in (a + 1)..3 {
            let w = st_omega.get(a, b).to_coordinate(cf)?;
            if w.is_empty() {
                continue;
            }
            let rotated = id2
                .kron(&ExprMat::from_exact(&sig3.get(a, b)))
                .mul(col)?;
            if rotated.is_zero() {
                continue;
            }
            let block = Form::from_block(chart.clone(), FrameKind::Coordinate, rotated);
            cov = cov.add(&w.wedge(&block)?)?;
        }
    }
    let mut out = Form::zero(chart, FrameKind::Coordinate, 3, (4, 1));
    for c in 0..3 {
        let star_ec = cf.basis(c).hodge(cf)?.to_coordinate(cf)?;
        let gamma_c = id2.kron(&ExprMat::from_exact(g3.gamma(c)));
        out = out.add(&star_ec.wedge(&cov)?.mat_mul_left(&gamma_c)?)?;
    }
    Ok(out)
}

/// Factor-wise application of the same operator on an
/// [`EffectiveField`]: the covariant derivative acts on the iso-section
/// and the spacetime spinors separately and recombines by the Leibniz
/// rule. Serves as an independent oracle for [`minimal_dirac`].
pub fn minimal_dirac_split(
    st: &SpacetimeModel,
    st_omega: &ConnectionForms,
    g3: &GammaRep,
    sig3: &SigmaSet,
    amat: &Form,
    field: &EffectiveField,
) -> Result<Form> {
    let cf = &st.coframe;
    let chart = st.chart.clone();
    let id2 = ExprMat::identity(2);
    let mut cov = Form::zero(chart.clone(), FrameKind::Coordinate, 1, (4, 1));
    for i in 0..2 {
        let sec = ExprMat::from_fn(2, 1, |r, _| field.section.get(r, i).clone());
        let sec0 = Form::from_block(chart.clone(), FrameKind::Coordinate, sec.clone());
        // (d + A) on the iso slot, tensored with the untouched spinor
        let mut dsec = sec0.d()?;
        if !amat.is_empty() {
            dsec = dsec.add(&amat.wedge(&sec0)?)?;
        }
        cov = cov.add(&dsec.kron_right(&field.psi[i]))?;
        // iso slot untouched, (d + omega/2) on the spinor slot
        let psi0 = Form::from_block(chart.clone(), FrameKind::Coordinate, field.psi[i].clone());
        let mut dpsi = psi0.d()?;
        for a in 0..3 {
            for b in (a + 1)..3 {
                let w = st_omega.get(a, b).to_coordinate(cf)?;
                if w.is_empty() {
                    continue;
                }
                let rotated = ExprMat::from_exact(&sig3.get(a, b)).mul(&field.psi[i])?;
                if rotated.is_zero() {
                    continue;
                }
                let block = Form::from_block(chart.clone(), FrameKind::Coordinate, rotated);
                dpsi = dpsi.add(&w.wedge(&block)?)?;
            }
        }
        cov = cov.add(&dpsi.kron_left(&sec))?;
    }
    let mut out = Form::zero(chart, FrameKind::Coordinate, 3, (4, 1));
    for c in 0..3 {
        let star_ec = cf.basis(c).hodge(cf)?.to_coordinate(cf)?;
        let gamma_c = id2.kron(&ExprMat::from_exact(g3.gamma(c)));
        out = out.add(&star_ec.wedge(&cov)?.mat_mul_left(&gamma_c)?)?;
    }
    Ok(out)
}

/// Gauge-transformed potential U (A + d) U^{-1} = U A U^{-1} + U d(U^{-1}).
pub fn gauge_transform_potential(amat: &Form, u: &ExprMat) -> Result<Form> {
    let ui = u.dagger().simplified();
    let conjugated = amat.map_blocks(|b| {
        u.mul(b)
            .and_then(|m| m.mul(&ui))
            .expect("2x2 products")
    });
    let ui0 = Form::from_block(amat.chart.clone(), FrameKind::Coordinate, ui);
    let inhom = ui0.d()?.mat_mul_left(u)?;
    conjugated.with_shape((2, 2)).add(&inhom)
}

/// Residual form of the minimally coupled equation at fixed mass.
fn minimal_residual(
    st: &SpacetimeModel,
    st_omega: &ConnectionForms,
    g3: &GammaRep,
    sig3: &SigmaSet,
    amat: &Form,
    col: &ExprMat,
    mass: &ScalarExpr,
) -> Result<Form> {
    let lhs = minimal_dirac(st, st_omega, g3, sig3, amat, col)?;
    let vol = st.coframe.volume().to_coordinate(&st.coframe)?;
    let rhs = vol.mat_mul_left(&col.scale(mass))?;
    lhs.sub(&rhs)
}

/// Check gauge covariance of the minimally coupled operator: for seeded
/// spacetime-dependent U the transformed residual equals (U (x) I)
/// times the original one.
pub fn gauge_covariance_check(
    st: &SpacetimeModel,
    gauge: &GaugePotential,
    mass: &ScalarExpr,
    seed: u64,
    transforms: usize,
    samples: usize,
    tol: f64,
) -> Result<ResidualCheck> {
    let g3 = build_gamma_1_2();
    let sig3 = lorentz_generators(&g3);
    let st_omega = solve_levi_civita(&st.coframe)?;
    let amat = gauge_matrix_form(gauge, st)?;
    let id2 = ExprMat::identity(2);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut residuals = Vec::new();
    for t in 0..transforms {
        let field = EffectiveField::random(&st.chart, seed ^ (0xabcd + t as u64));
        let col = field.column();
        let base = minimal_residual(st, &st_omega, &g3, &sig3, &amat, &col, mass)?;

        let angles: Vec<ScalarExpr> =
            (0..3).map(|_| random_poly(&st.chart, &mut rng, 1)).collect();
        let u = crate::clifford::su2_euler(
            angles[0].clone(),
            angles[1].clone(),
            angles[2].clone(),
        )
        .matrix;
        let amat_t = gauge_transform_potential(&amat, &u)?;
        let col_t = u.kron(&id2).mul(&col)?;
        let transformed =
            minimal_residual(st, &st_omega, &g3, &sig3, &amat_t, &col_t, mass)?;

        let expected = base.mat_mul_left(&u.kron(&id2))?;
        let diff = transformed.sub(&expected)?;
        for _ in 0..samples {
            let p = st.chart.sample_point(&mut rng);
            residuals.push(diff.max_abs_at(&p)?);
        }
    }
    Ok(ResidualCheck::from_residuals(
        "gauge-covariance",
        &residuals,
        tol,
    ))
}
