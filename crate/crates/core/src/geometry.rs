//! Concrete geometry: the Lorentzian base, the unit three-sphere with
//! its left-invariant coframe, the gauge potential, the product
//! geometry, the algebraic torsion-free connection solver and the
//! decomposition identities relating the product quantities to the
//! factor ones.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::clifford::{build_gamma_0_3, su2_basis, su2_euler, SU2Element};
use crate::error::{Error, Result};
use crate::exterior::{Coframe, Form, FrameKind, FrameVector};
use crate::matrix::ExprMat;
use crate::perm::eps3;
use crate::report::ResidualCheck;
use crate::symexpr::{simplify, Chart, ScalarExpr};

pub fn spacetime_chart() -> Arc<Chart> {
    Arc::new(Chart::new(
        "spacetime",
        &[("x0", -1.0, 1.0), ("x1", -1.0, 1.0), ("x2", -1.0, 1.0)],
    ))
}

/// Euler-angle chart of the unit three-sphere. The box stays away from
/// the poles where the left-invariant coframe written in these
/// coordinates degenerates.
pub fn sphere_chart() -> Arc<Chart> {
    Arc::new(Chart::new(
        "sphere",
        &[("th", 0.0, PI), ("ph", 0.0, 2.0 * PI), ("ps", 0.0, 4.0 * PI)],
    ))
}

pub const SPACETIME_SIGNATURE: [i8; 3] = [-1, 1, 1];
pub const SPHERE_SIGNATURE: [i8; 3] = [1, 1, 1];
pub const PRODUCT_SIGNATURE: [i8; 6] = [-1, 1, 1, 1, 1, 1];
pub const SPACETIME_LABELS: [u8; 3] = [0, 1, 2];
pub const SPHERE_LABELS: [u8; 3] = [5, 6, 7];
pub const PRODUCT_LABELS: [u8; 6] = [0, 1, 2, 5, 6, 7];

#[derive(Debug, Clone)]
pub struct SpacetimeModel {
    pub chart: Arc<Chart>,
    pub coframe: Coframe,
    pub flat: bool,
}

impl SpacetimeModel {
    pub fn flat() -> Self {
        let chart = spacetime_chart();
        let coframe = Coframe::new(
            chart.clone(),
            ExprMat::identity(3),
            SPACETIME_SIGNATURE.to_vec(),
            SPACETIME_LABELS.to_vec(),
        )
        .expect("identity vielbein is invertible");
        SpacetimeModel {
            chart,
            coframe,
            flat: true,
        }
    }

    /// Custom vielbein hook for curved tests; rows are the coordinate
    /// components of e_a.
    pub fn custom(vielbein: ExprMat) -> Result<Self> {
        let chart = spacetime_chart();
        let flat = vielbein == ExprMat::identity(3);
        let coframe = Coframe::new(
            chart.clone(),
            vielbein,
            SPACETIME_SIGNATURE.to_vec(),
            SPACETIME_LABELS.to_vec(),
        )?;
        Ok(SpacetimeModel {
            chart,
            coframe,
            flat,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SphereModel {
    pub chart: Arc<Chart>,
    pub coframe: Coframe,
    /// Measured constant in de_a = lambda eps_abc e_b ^ e_c.
    pub lambda: f64,
    /// Largest deviation of the per-component fits from `lambda`.
    pub lambda_spread: f64,
    /// The Euler group element the coframe was derived from.
    pub euler: SU2Element,
}

fn trace(m: &ExprMat) -> ScalarExpr {
    let mut acc = ScalarExpr::zero();
    for k in 0..m.rows {
        acc = acc + m.get(k, k).clone();
    }
    acc
}

/// Coordinate components of the left-invariant coframe: expand
/// G^{-1} dG on the su(2) basis X_a and flip the sign, so that the
/// sphere's structure equation comes out with a positive constant.
fn maurer_cartan_vielbein(g: &SU2Element, chart: &Chart) -> ExprMat {
    let x = su2_basis(&build_gamma_0_3());
    let gi = g.matrix.dagger().simplified();
    let mut v = ExprMat::zeros(3, 3);
    for (m, coord) in chart.coords().iter().enumerate() {
        let dg = g.matrix.map(|e| e.diff(coord));
        let mc = gi.mul(&dg).expect("2x2 product");
        for alpha in 0..3 {
            // tr(X_a X_b) = -1/2 delta_ab, so the projection carries -2;
            // the extra sign is the orientation choice for e_a.
            let xa = ExprMat::from_exact(&x[alpha]);
            let comp = ScalarExpr::from_int(2) * trace(&mc.mul(&xa).expect("2x2 product"));
            v.set(alpha, m, simplify(&comp));
        }
    }
    v
}

/// Fit the single constant in de_a = lambda eps_abc e_b ^ e_c and its
/// spread over components and sample points.
fn measure_lambda(cf: &Coframe) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4d43);
    let points: Vec<_> = (0..20).map(|_| cf.chart.sample_point(&mut rng)).collect();
    let mut fits: Vec<f64> = Vec::new();
    for alpha in 0..3usize {
        let de = cf
            .basis_coordinate(alpha)
            .d()?
            .to_orthonormal(cf)?
            .simplified();
        for beta in 0..3u8 {
            for gamma in (beta + 1)..3u8 {
                let eps = eps3(alpha, beta as usize, gamma as usize);
                let comp = de.component(&[beta, gamma]);
                for p in &points {
                    let val = match comp {
                        Some(m) => {
                            let z = m.eval(p)?.get(0, 0);
                            if z.im.abs() > 1e-10 {
                                return Err(Error::DimensionMismatch(
                                    "structure components must be real".into(),
                                ));
                            }
                            z.re
                        }
                        None => 0.0,
                    };
                    if eps == 0 {
                        if val.abs() > 1e-10 {
                            return Err(Error::DimensionMismatch(format!(
                                "unexpected structure component {alpha}{beta}{gamma}"
                            )));
                        }
                    } else {
                        // de_a|_{bc} sums both index orders: 2 lambda eps
                        fits.push(val / (2.0 * eps as f64));
                    }
                }
            }
        }
    }
    let mean = fits.iter().sum::<f64>() / fits.len() as f64;
    let spread = fits
        .iter()
        .map(|f| (f - mean).abs())
        .fold(0.0f64, f64::max);
    Ok((mean, spread))
}

impl SphereModel {
    pub fn unit() -> Result<Self> {
        let chart = sphere_chart();
        let euler = su2_euler(
            ScalarExpr::coord("th"),
            ScalarExpr::coord("ph"),
            ScalarExpr::coord("ps"),
        );
        let vielbein = maurer_cartan_vielbein(&euler, &chart);
        let coframe = Coframe::new(
            chart.clone(),
            vielbein,
            SPHERE_SIGNATURE.to_vec(),
            SPHERE_LABELS.to_vec(),
        )?;
        let (lambda, lambda_spread) = measure_lambda(&coframe)?;
        if lambda_spread > 1e-10 {
            return Err(Error::DimensionMismatch(format!(
                "structure constant is not a single value (spread {lambda_spread:.3e})"
            )));
        }
        Ok(SphereModel {
            chart,
            coframe,
            lambda,
            lambda_spread,
            euler,
        })
    }
}

/// Gauge potential A_a = A_a^{ b} e_b with components on the spacetime
/// chart; the first index runs over the sphere frame labels.
#[derive(Debug, Clone)]
pub struct GaugePotential {
    pub chart: Arc<Chart>,
    /// comps[alpha][a] with alpha the sphere label index, a the
    /// spacetime frame index.
    pub comps: Vec<Vec<ScalarExpr>>,
}

impl GaugePotential {
    pub fn zero(chart: Arc<Chart>) -> Self {
        GaugePotential {
            chart,
            comps: vec![vec![ScalarExpr::zero(); 3]; 3],
        }
    }

    pub fn new(chart: Arc<Chart>, comps: Vec<Vec<ScalarExpr>>) -> Result<Self> {
        if comps.len() != 3 || comps.iter().any(|r| r.len() != 3) {
            return Err(Error::DimensionMismatch(
                "gauge potential needs a 3x3 component array".into(),
            ));
        }
        Ok(GaugePotential { chart, comps })
    }

    /// Seeded family for tests: degree <= 2 polynomials with small
    /// rational coefficients, so both dA and A ^ A are exercised.
    pub fn random_polynomial(chart: Arc<Chart>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let comps = (0..3)
            .map(|_| (0..3).map(|_| random_poly(&chart, &mut rng, 2)).collect())
            .collect();
        GaugePotential { chart, comps }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().flatten().all(|e| e.is_zero())
    }

    /// A_a as a coordinate-frame 1-form on the spacetime chart.
    pub fn one_form(&self, spacetime: &SpacetimeModel, alpha: usize) -> Form {
        let mut f = Form::zero(self.chart.clone(), FrameKind::Coordinate, 1, (1, 1));
        for a in 0..3 {
            if self.comps[alpha][a].is_zero() {
                continue;
            }
            for m in 0..3 {
                let e = spacetime.coframe.vielbein.get(a, m);
                if e.is_zero() {
                    continue;
                }
                f.accumulate(
                    &[m as u8],
                    ExprMat::scalar(self.comps[alpha][a].clone() * e.clone()),
                );
            }
        }
        f
    }
}

/// Random polynomial in the chart coordinates with rational
/// coefficients drawn from a seeded stream.
pub fn random_poly<R: Rng>(chart: &Chart, rng: &mut R, degree: u32) -> ScalarExpr {
    let coeff = |rng: &mut R| {
        let num = rng.gen_range(-3i64..=3);
        let den = rng.gen_range(1i64..=4);
        ScalarExpr::rat(num, den)
    };
    let mut acc = coeff(rng);
    if degree >= 1 {
        for c in chart.coords() {
            acc = acc + coeff(rng) * ScalarExpr::coord(c);
        }
    }
    if degree >= 2 {
        for (i, ci) in chart.coords().iter().enumerate() {
            for cj in chart.coords().iter().skip(i) {
                acc = acc + coeff(rng) * ScalarExpr::coord(ci) * ScalarExpr::coord(cj);
            }
        }
    }
    acc
}

/// The assembled product geometry.
#[derive(Debug, Clone)]
pub struct KKGeometry {
    pub spacetime: SpacetimeModel,
    pub sphere: SphereModel,
    pub gauge: GaugePotential,
    pub chart: Arc<Chart>,
    /// Six-dimensional coframe E_A on the product chart; rows 0..3 are
    /// the spacetime block, rows 3..6 the sphere block shifted by the
    /// gauge potential.
    pub coframe: Coframe,
}

pub fn assemble_kk(
    spacetime: SpacetimeModel,
    sphere: SphereModel,
    gauge: GaugePotential,
) -> Result<KKGeometry> {
    let chart = Arc::new(spacetime.chart.product(&sphere.chart, "product"));
    let s = &spacetime.coframe.vielbein;
    let p = &sphere.coframe.vielbein;
    let mut v = ExprMat::zeros(6, 6);
    for a in 0..3 {
        for m in 0..3 {
            v.set(a, m, s.get(a, m).clone());
        }
    }
    for alpha in 0..3 {
        for m in 0..3 {
            // E_alpha = e_alpha + A_alpha^{ a} e_a in coordinates
            let mut acc = ScalarExpr::zero();
            for a in 0..3 {
                acc = acc + gauge.comps[alpha][a].clone() * s.get(a, m).clone();
            }
            v.set(3 + alpha, m, simplify(&acc));
            v.set(3 + alpha, 3 + m, p.get(alpha, m).clone());
        }
    }
    // block triangular: inverse is [[S^-1, 0], [-P^-1 B S^-1, P^-1]]
    let s_inv = &spacetime.coframe.inverse;
    let p_inv = &sphere.coframe.inverse;
    let mut b = ExprMat::zeros(3, 3);
    for alpha in 0..3 {
        for m in 0..3 {
            b.set(alpha, m, v.get(3 + alpha, m).clone());
        }
    }
    let lower_left = p_inv
        .mul(&b)?
        .mul(s_inv)?
        .scale(&ScalarExpr::from_int(-1))
        .simplified();
    // the inverse is indexed [coordinate][frame] and stays block lower
    // triangular: dx^(sphere) needs both frame blocks, dx^(base) only one
    let mut inv = ExprMat::zeros(6, 6);
    for m in 0..3 {
        for a in 0..3 {
            inv.set(m, a, s_inv.get(m, a).clone());
            inv.set(3 + m, a, lower_left.get(m, a).clone());
            inv.set(3 + m, 3 + a, p_inv.get(m, a).clone());
        }
    }
    let coframe = Coframe::with_inverse(
        chart.clone(),
        v,
        inv,
        PRODUCT_SIGNATURE.to_vec(),
        PRODUCT_LABELS.to_vec(),
    )?;
    Ok(KKGeometry {
        spacetime,
        sphere,
        gauge,
        chart,
        coframe,
    })
}

/// Antisymmetric family of connection 1-forms in the orthonormal frame.
#[derive(Debug, Clone)]
pub struct ConnectionForms {
    pub dim: usize,
    chart: Arc<Chart>,
    upper: BTreeMap<(usize, usize), Form>,
}

impl ConnectionForms {
    /// Omega_{AB}; antisymmetry is structural.
    pub fn get(&self, a: usize, b: usize) -> Form {
        if a == b {
            return Form::zero(self.chart.clone(), FrameKind::Orthonormal, 1, (1, 1));
        }
        let (key, flip) = if a < b { ((a, b), false) } else { ((b, a), true) };
        let f = self.upper[&key].clone();
        if flip {
            f.scale(&ScalarExpr::from_int(-1))
        } else {
            f
        }
    }

    /// Omega_A^{ B} = eta^{BB} Omega_{AB} for the diagonal metric.
    pub fn mixed(&self, a: usize, b: usize, signature: &[i8]) -> Form {
        self.get(a, b)
            .scale(&ScalarExpr::from_int(signature[b] as i64))
    }
}

/// Solve the first structure equation algebraically:
/// Omega_{AB} = 1/2 [ -i_A dE_B + i_B dE_A + i_A i_B (dE_C) E^C ].
pub fn solve_levi_civita(cf: &Coframe) -> Result<ConnectionForms> {
    let n = cf.dim();
    let mut de = Vec::with_capacity(n);
    for a in 0..n {
        de.push(
            cf.basis_coordinate(a)
                .d()?
                .to_orthonormal(cf)?
                .simplified(),
        );
    }
    let vecs: Vec<FrameVector> = (0..n).map(|a| cf.frame_vector(a)).collect();
    let mut upper = BTreeMap::new();
    let half = ScalarExpr::rat(1, 2);
    for a in 0..n {
        for b in (a + 1)..n {
            // interior products come with the raised frame vectors, so
            // each one carries the diagonal metric entry of its index
            let eta_a = cf.signature[a] as i64;
            let eta_b = cf.signature[b] as i64;
            let mut acc = de[b]
                .interior(&vecs[a])?
                .scale(&ScalarExpr::from_int(-eta_a))
                .add(&de[a].interior(&vecs[b])?.scale(&ScalarExpr::from_int(eta_b)))?;
            for c in 0..n {
                // i_A i_B means B acts first
                let scalar = de[c].interior(&vecs[b])?.interior(&vecs[a])?;
                let coeff = scalar
                    .component(&[])
                    .map(|m| m.get(0, 0).clone())
                    .unwrap_or_else(ScalarExpr::zero);
                if coeff.is_zero() {
                    continue;
                }
                let eta = ScalarExpr::from_int(eta_a * eta_b * cf.signature[c] as i64);
                acc = acc.add(&cf.basis(c).scale(&(eta * coeff)))?;
            }
            upper.insert((a, b), acc.scale(&half).simplified());
        }
    }
    Ok(ConnectionForms {
        dim: n,
        chart: cf.chart.clone(),
        upper,
    })
}

/// Residuals of dE_A + Omega_A^{ B} ^ E_B at seeded points.
pub fn verify_structure_equation(
    cf: &Coframe,
    omega: &ConnectionForms,
    seed: u64,
    samples: usize,
    tol: f64,
) -> Result<ResidualCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<_> = (0..samples).map(|_| cf.chart.sample_point(&mut rng)).collect();
    let mut residuals = Vec::new();
    for a in 0..cf.dim() {
        let mut lhs = cf.basis_coordinate(a).d()?.to_orthonormal(cf)?;
        for b in 0..cf.dim() {
            let term = omega.mixed(a, b, &cf.signature).wedge(&cf.basis(b))?;
            lhs = lhs.add(&term)?;
        }
        let lhs = lhs.simplified();
        for p in &points {
            residuals.push(lhs.max_abs_at(p)?);
        }
    }
    Ok(ResidualCheck::from_residuals(
        "first-structure-equation",
        &residuals,
        tol,
    ))
}

/// SU(2) curvature F_a = dA_a + 1/2 eps_abc A_b ^ A_c on the spacetime
/// chart, with extracted orthonormal components F_a^{ bc}.
#[derive(Debug, Clone)]
pub struct CurvatureForms {
    /// Coordinate-frame 2-forms.
    pub forms: Vec<Form>,
    /// comps[alpha][b][c] = F_alpha^{ bc}, antisymmetric in (b, c).
    pub comps: Vec<Vec<Vec<ScalarExpr>>>,
}

pub fn curvature(gauge: &GaugePotential, spacetime: &SpacetimeModel) -> Result<CurvatureForms> {
    let mut forms = Vec::with_capacity(3);
    let a_forms: Vec<Form> = (0..3).map(|al| gauge.one_form(spacetime, al)).collect();
    for alpha in 0..3usize {
        let mut f = a_forms[alpha].d()?;
        for beta in 0..3usize {
            for gamma in 0..3usize {
                let eps = eps3(alpha, beta, gamma);
                if eps == 0 {
                    continue;
                }
                let quad = a_forms[beta]
                    .wedge(&a_forms[gamma])?
                    .scale(&ScalarExpr::rat(eps as i64, 2));
                f = f.add(&quad)?;
            }
        }
        forms.push(f.simplified());
    }
    let mut comps = vec![vec![vec![ScalarExpr::zero(); 3]; 3]; 3];
    for alpha in 0..3 {
        let on = forms[alpha].to_orthonormal(&spacetime.coframe)?.simplified();
        for b in 0..3u8 {
            for c in (b + 1)..3u8 {
                let val = on
                    .component(&[b, c])
                    .map(|m| m.get(0, 0).clone())
                    .unwrap_or_else(ScalarExpr::zero);
                comps[alpha][b as usize][c as usize] = val.clone();
                comps[alpha][c as usize][b as usize] = simplify(&-val);
            }
        }
    }
    Ok(CurvatureForms { forms, comps })
}

impl CurvatureForms {
    /// F_{a b c} with the spacetime indices lowered by the metric.
    pub fn lowered(&self, alpha: usize, a: usize, b: usize) -> ScalarExpr {
        let eta = SPACETIME_SIGNATURE[a] as i64 * SPACETIME_SIGNATURE[b] as i64;
        ScalarExpr::from_int(eta) * self.comps[alpha][a][b].clone()
    }
}

/// Bianchi identity for the gauge sector: dF_a + eps_a^{ bc} A_b ^ F_c.
pub fn bianchi_check(
    gauge: &GaugePotential,
    spacetime: &SpacetimeModel,
    fc: &CurvatureForms,
    seed: u64,
    samples: usize,
    tol: f64,
) -> Result<ResidualCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<_> = (0..samples)
        .map(|_| spacetime.chart.sample_point(&mut rng))
        .collect();
    let mut residuals = Vec::new();
    for alpha in 0..3usize {
        let mut lhs = fc.forms[alpha].d()?;
        for beta in 0..3usize {
            for gamma in 0..3usize {
                let eps = eps3(alpha, beta, gamma);
                if eps == 0 {
                    continue;
                }
                let term = gauge
                    .one_form(spacetime, beta)
                    .wedge(&fc.forms[gamma])?
                    .scale(&ScalarExpr::from_int(eps as i64));
                lhs = lhs.add(&term)?;
            }
        }
        let lhs = lhs.simplified();
        for p in &points {
            residuals.push(lhs.max_abs_at(p)?);
        }
    }
    Ok(ResidualCheck::from_residuals("gauge-bianchi", &residuals, tol))
}

fn embed_coord_form(f: &Form, geom: &KKGeometry, offset: usize) -> Result<Form> {
    f.embed(geom.chart.clone(), offset)
}

/// Spacetime 1-form e_a on the product chart, coordinate frame.
pub fn base_coframe_form(geom: &KKGeometry, a: usize) -> Result<Form> {
    embed_coord_form(&geom.spacetime.coframe.basis_coordinate(a), geom, 0)
}

/// Sphere 1-form e_a on the product chart, coordinate frame.
pub fn fiber_coframe_form(geom: &KKGeometry, alpha: usize) -> Result<Form> {
    embed_coord_form(&geom.sphere.coframe.basis_coordinate(alpha), geom, 3)
}

/// Gauge 1-form A_a on the product chart, coordinate frame.
pub fn gauge_form(geom: &KKGeometry, alpha: usize) -> Result<Form> {
    embed_coord_form(&geom.gauge.one_form(&geom.spacetime, alpha), geom, 0)
}

/// Check the three block formulas expressing the product connection
/// through the factor connections and the curvature.
pub fn verify_connection_decomposition(
    geom: &KKGeometry,
    omega: &ConnectionForms,
    seed: u64,
    samples: usize,
    tol: f64,
) -> Result<Vec<ResidualCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<_> = (0..samples)
        .map(|_| geom.chart.sample_point(&mut rng))
        .collect();
    let st_omega = solve_levi_civita(&geom.spacetime.coframe)?;
    let fc = curvature(&geom.gauge, &geom.spacetime)?;

    let to_coord = |f: &Form| -> Result<Form> { f.to_coordinate(&geom.coframe) };
    let mut checks = Vec::new();

    // base block: Omega_ab = omega_ab - 1/2 F^c_{ ab} (e_c + A_c)
    let mut residuals = Vec::new();
    for a in 0..3usize {
        for b in (a + 1)..3 {
            let lhs = to_coord(&omega.get(a, b))?;
            let mut rhs = embed_coord_form(
                &st_omega.get(a, b).to_coordinate(&geom.spacetime.coframe)?,
                geom,
                0,
            )?;
            for gamma in 0..3usize {
                let coeff = fc.lowered(gamma, a, b);
                if coeff.is_zero() {
                    continue;
                }
                let leg = fiber_coframe_form(geom, gamma)?.add(&gauge_form(geom, gamma)?)?;
                let coeff = ScalarExpr::rat(-1, 2) * coeff;
                rhs = rhs.add(&leg.scale(&coeff))?;
            }
            let diff = lhs.sub(&rhs)?.simplified();
            for p in &points {
                residuals.push(diff.max_abs_at(p)?);
            }
        }
    }
    checks.push(ResidualCheck::from_residuals(
        "connection-decomposition-base",
        &residuals,
        tol,
    ));

    // mixed block: Omega_{a beta} = -1/2 F_{beta a}^{ b} e_b
    let mut residuals = Vec::new();
    for a in 0..3usize {
        for beta in 0..3usize {
            let lhs = to_coord(&omega.get(a, 3 + beta))?;
            let mut rhs = Form::zero(geom.chart.clone(), FrameKind::Coordinate, 1, (1, 1));
            for b in 0..3usize {
                // F_{beta a}^{ b}: only the first spacetime index lowered
                let coeff = ScalarExpr::rat(-1, 2)
                    * ScalarExpr::from_int(SPACETIME_SIGNATURE[a] as i64)
                    * fc.comps[beta][a][b].clone();
                if coeff.is_zero() {
                    continue;
                }
                rhs = rhs.add(&base_coframe_form(geom, b)?.scale(&coeff))?;
            }
            let diff = lhs.sub(&rhs)?.simplified();
            for p in &points {
                residuals.push(diff.max_abs_at(p)?);
            }
        }
    }
    checks.push(ResidualCheck::from_residuals(
        "connection-decomposition-mixed",
        &residuals,
        tol,
    ));

    // fiber block: Omega_{alpha beta} = 1/2 eps_{alpha beta c} (e_c - A_c)
    let mut residuals = Vec::new();
    for alpha in 0..3usize {
        for beta in (alpha + 1)..3 {
            let lhs = to_coord(&omega.get(3 + alpha, 3 + beta))?;
            let mut rhs = Form::zero(geom.chart.clone(), FrameKind::Coordinate, 1, (1, 1));
            for gamma in 0..3usize {
                let eps = eps3(alpha, beta, gamma);
                if eps == 0 {
                    continue;
                }
                let leg = fiber_coframe_form(geom, gamma)?.sub(&gauge_form(geom, gamma)?)?;
                rhs = rhs.add(&leg.scale(&ScalarExpr::rat(eps as i64, 2)))?;
            }
            let diff = lhs.sub(&rhs)?.simplified();
            for p in &points {
                residuals.push(diff.max_abs_at(p)?);
            }
        }
    }
    checks.push(ResidualCheck::from_residuals(
        "connection-decomposition-fiber",
        &residuals,
        tol,
    ));
    Ok(checks)
}

/// Dual frame vector of E_A in product-chart coordinates.
pub fn product_frame_vector(geom: &KKGeometry, a: usize) -> FrameVector {
    geom.coframe.frame_vector_coordinate(a)
}

/// Factor frame vector X_a or X_alpha embedded into the product chart.
pub fn factor_frame_vector(geom: &KKGeometry, a: usize) -> FrameVector {
    let mut components = vec![ScalarExpr::zero(); 6];
    if a < 3 {
        let v = geom.spacetime.coframe.frame_vector_coordinate(a);
        components[..3].clone_from_slice(&v.components);
    } else {
        let v = geom.sphere.coframe.frame_vector_coordinate(a - 3);
        components[3..].clone_from_slice(&v.components);
    }
    FrameVector::new(geom.chart.clone(), FrameKind::Coordinate, components)
}

/// Check that interior products with the product frame vectors split
/// into the factor interior products shifted by the gauge potential.
pub fn verify_interior_decomposition(
    geom: &KKGeometry,
    seed: u64,
    tol: f64,
) -> Result<ResidualCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // decomposed vector fields: Y_a = X_a - A_c^{ a} X_c, Y_alpha = X_alpha
    let mut decomposed = Vec::new();
    for a in 0..6usize {
        let mut components = factor_frame_vector(geom, a).components;
        if a < 3 {
            for alpha in 0..3 {
                let coeff = geom.gauge.comps[alpha][a].clone();
                if coeff.is_zero() {
                    continue;
                }
                let xs = factor_frame_vector(geom, 3 + alpha);
                for (dst, src) in components.iter_mut().zip(xs.components.iter()) {
                    *dst = dst.clone() - coeff.clone() * src.clone();
                }
            }
        }
        decomposed.push(FrameVector::new(
            geom.chart.clone(),
            FrameKind::Coordinate,
            components,
        ));
    }

    // targets: all six basis 1-forms plus random 2-forms
    let mut targets: Vec<Form> = (0..6)
        .map(|b| geom.coframe.basis_coordinate(b))
        .collect();
    for _ in 0..10 {
        let mut two = Form::zero(geom.chart.clone(), FrameKind::Coordinate, 2, (1, 1));
        for i in 0..6u8 {
            for j in (i + 1)..6u8 {
                two.accumulate(
                    &[i, j],
                    ExprMat::scalar(random_poly(&geom.chart, &mut rng, 1)),
                );
            }
        }
        targets.push(two);
    }

    let points: Vec<_> = (0..20).map(|_| geom.chart.sample_point(&mut rng)).collect();
    let mut residuals = Vec::new();
    for a in 0..6usize {
        let full = product_frame_vector(geom, a);
        for t in &targets {
            let lhs = t.interior(&full)?;
            let rhs = t.interior(&decomposed[a])?;
            let diff = lhs.sub(&rhs)?;
            for p in &points {
                residuals.push(diff.max_abs_at(p)?);
            }
        }
    }
    Ok(ResidualCheck::from_residuals(
        "interior-decomposition",
        &residuals,
        tol,
    ))
}

/// Spacetime Hodge of e_a, as a product-chart coordinate form.
pub fn base_hodge_form(geom: &KKGeometry, a: usize) -> Result<Form> {
    let f = geom
        .spacetime
        .coframe
        .basis(a)
        .hodge(&geom.spacetime.coframe)?
        .to_coordinate(&geom.spacetime.coframe)?;
    embed_coord_form(&f, geom, 0)
}

/// Sphere Hodge of e_a, as a product-chart coordinate form.
pub fn fiber_hodge_form(geom: &KKGeometry, alpha: usize) -> Result<Form> {
    let f = geom
        .sphere
        .coframe
        .basis(alpha)
        .hodge(&geom.sphere.coframe)?
        .to_coordinate(&geom.sphere.coframe)?;
    embed_coord_form(&f, geom, 3)
}

/// Spacetime volume *1 on the product chart, coordinate frame.
pub fn base_volume_form(geom: &KKGeometry) -> Result<Form> {
    let f = geom
        .spacetime
        .coframe
        .volume()
        .to_coordinate(&geom.spacetime.coframe)?;
    embed_coord_form(&f, geom, 0)
}

/// Sphere volume on the product chart, coordinate frame.
pub fn fiber_volume_form(geom: &KKGeometry) -> Result<Form> {
    let f = geom
        .sphere
        .coframe
        .volume()
        .to_coordinate(&geom.sphere.coframe)?;
    embed_coord_form(&f, geom, 3)
}

/// Check the splitting of the product Hodge map on the basis 1-forms
/// and on the constant function.
pub fn verify_hodge_decomposition(
    geom: &KKGeometry,
    seed: u64,
    samples: usize,
    tol: f64,
) -> Result<Vec<ResidualCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<_> = (0..samples)
        .map(|_| geom.chart.sample_point(&mut rng))
        .collect();
    let mut checks = Vec::new();
    let cf = &geom.coframe;

    // #E_a = *e_a ^ star(1) + *1 ^ A_c^{ a} star(e_c)
    let mut residuals = Vec::new();
    for a in 0..3usize {
        let lhs = cf.basis(a).hodge(cf)?.to_coordinate(cf)?;
        let mut rhs = base_hodge_form(geom, a)?.wedge(&fiber_volume_form(geom)?)?;
        for gamma in 0..3usize {
            // the gauge coefficient enters with its spacetime index
            // lowered by the metric
            let coeff = ScalarExpr::from_int(SPACETIME_SIGNATURE[a] as i64)
                * geom.gauge.comps[gamma][a].clone();
            if coeff.is_zero() {
                continue;
            }
            let term = base_volume_form(geom)?
                .wedge(&fiber_hodge_form(geom, gamma)?)?
                .scale(&coeff);
            rhs = rhs.add(&term)?;
        }
        let diff = lhs.sub(&rhs)?.simplified();
        for p in &points {
            residuals.push(diff.max_abs_at(p)?);
        }
    }
    checks.push(ResidualCheck::from_residuals(
        "hodge-decomposition-base",
        &residuals,
        tol,
    ));

    // #E_alpha = -*1 ^ star(e_alpha)
    let mut residuals = Vec::new();
    for alpha in 0..3usize {
        let lhs = cf.basis(3 + alpha).hodge(cf)?.to_coordinate(cf)?;
        let rhs = base_volume_form(geom)?
            .wedge(&fiber_hodge_form(geom, alpha)?)?
            .scale(&ScalarExpr::from_int(-1));
        let diff = lhs.sub(&rhs)?.simplified();
        for p in &points {
            residuals.push(diff.max_abs_at(p)?);
        }
    }
    checks.push(ResidualCheck::from_residuals(
        "hodge-decomposition-fiber",
        &residuals,
        tol,
    ));

    // #1 = *1 ^ star(1)
    let mut residuals = Vec::new();
    {
        let one = Form::from_block(
            geom.chart.clone(),
            FrameKind::Orthonormal,
            ExprMat::scalar(ScalarExpr::one()),
        );
        let lhs = one.hodge(cf)?.to_coordinate(cf)?;
        let rhs = base_volume_form(geom)?.wedge(&fiber_volume_form(geom)?)?;
        let diff = lhs.sub(&rhs)?.simplified();
        for p in &points {
            residuals.push(diff.max_abs_at(p)?);
        }
    }
    checks.push(ResidualCheck::from_residuals(
        "hodge-decomposition-volume",
        &residuals,
        tol,
    ));
    Ok(checks)
}

/// Numeric check that the coframe is orthonormal for the declared
/// signature: g(X_A, X_B) at sampled points.
pub fn verify_metric_signature(geom: &KKGeometry, seed: u64, tol: f64) -> Result<ResidualCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<_> = (0..10).map(|_| geom.chart.sample_point(&mut rng)).collect();
    let v = &geom.coframe.vielbein;
    let inv = &geom.coframe.inverse;
    let mut residuals = Vec::new();
    for p in &points {
        let vn = v.eval(p)?;
        let wn = inv.eval(p)?;
        for a in 0..6 {
            for b in 0..6 {
                // g_{mn} X_A^m X_B^n with g from the coframe itself
                let mut acc = num::complex::Complex64::new(0.0, 0.0);
                for m in 0..6 {
                    for n in 0..6 {
                        let mut g = num::complex::Complex64::new(0.0, 0.0);
                        for c in 0..6 {
                            g += num::complex::Complex64::new(
                                PRODUCT_SIGNATURE[c] as f64,
                                0.0,
                            ) * vn.get(c, m)
                                * vn.get(c, n);
                        }
                        acc += g * wn.get(m, a) * wn.get(n, b);
                    }
                }
                let expect = if a == b { PRODUCT_SIGNATURE[a] as f64 } else { 0.0 };
                residuals.push((acc - num::complex::Complex64::new(expect, 0.0)).norm());
            }
        }
    }
    Ok(ResidualCheck::from_residuals(
        "bundle-metric-signature",
        &residuals,
        tol,
    ))
}
