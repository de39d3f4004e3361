//! Command-line front end: `verify clifford`, `verify geometry` and
//! `reduce`. Exit codes: 0 all checks pass, 1 a check failed, 2 the
//! config was malformed or the geometry could not be built.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kkdirac::clifford::{
    build_gamma_0_3, build_gamma_1_2, lift_to_6d, lorentz_generators, pauli,
    pauli_product_residuals, so_closure_residuals, verify_generator_blocks, GammaRep,
};
use kkdirac::config::{GeometryConfig, ReductionConfig};
use kkdirac::error::{Error, Result};
use kkdirac::exact::CRat;
use kkdirac::geometry::{
    bianchi_check, curvature, solve_levi_civita, verify_connection_decomposition,
    verify_hodge_decomposition, verify_interior_decomposition, verify_metric_signature,
    verify_structure_equation, KKGeometry,
};
use kkdirac::reduction::{
    gauge_covariance_check, mass_spectrum, reduce_equations, specialize_eigenstate,
    verify_reduction, AnsatzSpinor6, ReductionContext, SphereMode, TermTag,
};
use kkdirac::report::{Conventions, ExactCheck, Report, ResidualCheck, SpectrumBlock};
use kkdirac::symexpr::ScalarExpr;

#[derive(Parser)]
#[command(name = "kkdirac", version, about = "Clifford-algebra and Kaluza-Klein reduction checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a family of verification checks.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Reduce the six-dimensional Dirac equation and report residuals
    /// and the mass spectrum.
    Reduce {
        /// Geometry config (TOML).
        #[arg(long)]
        geometry: String,
        /// Reduction config (TOML).
        #[arg(long)]
        reduction: String,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Override the sampling seed from the reduction config.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand)]
enum VerifyTarget {
    /// Exact checks on the gamma representations and their generators.
    Clifford {
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Test hook: corrupt one gamma matrix so the checks fail.
        #[arg(long, hide = true)]
        corrupt_gamma: bool,
    },
    /// Numeric checks on the product geometry from a config file.
    Geometry {
        /// Geometry config (TOML).
        #[arg(long)]
        config: String,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Override the sampling seed from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn conventions(lambda: f64) -> Conventions {
    Conventions {
        spacetime_orientation: vec![0, 1, 2],
        sphere_orientation: vec![5, 6, 7],
        product_orientation: vec![0, 1, 2, 5, 6, 7],
        lambda,
        su2_basis: "X_alpha = (i/2) gamma^alpha".to_string(),
        sphere_section: "inverse-euler".to_string(),
        spinor_slots: "eta (x) sphere (x) spacetime".to_string(),
    }
}

fn push_pair_checks(report: &mut Report, rep: &GammaRep, rep_name: &str) {
    for ((a, b), res) in rep.clifford_residuals() {
        report.push_exact(ExactCheck {
            name: format!("{rep_name} anticommutator ({a},{b})"),
            pass: res.is_zero(),
        });
    }
}

fn cmd_verify_clifford(corrupt: bool) -> Result<Report> {
    let mut report = Report::new("verify clifford", 0);

    report.push_exact(ExactCheck {
        name: "pauli products".to_string(),
        pass: pauli_product_residuals().iter().all(|(_, r)| r.is_zero()),
    });

    let mut g3 = build_gamma_1_2();
    if corrupt {
        g3 = g3.with_replaced(0, pauli(1));
    }
    let gs = build_gamma_0_3();
    push_pair_checks(&mut report, &g3, "Cl(1,2)");
    push_pair_checks(&mut report, &gs, "Cl(3,0)");

    let g6 = lift_to_6d(&g3, &gs)?;
    push_pair_checks(&mut report, &g6, "Cl(1,5)");

    let sig6 = lorentz_generators(&g6);
    for c in verify_generator_blocks(&sig6, &g3, &gs) {
        report.push_exact(ExactCheck {
            name: c.name,
            pass: c.pass,
        });
    }

    for (name, sigmas) in [
        ("so(1,2)", lorentz_generators(&g3)),
        ("so(3)", lorentz_generators(&gs)),
        ("so(1,5)", sig6),
    ] {
        report.push_exact(ExactCheck {
            name: format!("{name} commutator closure"),
            pass: so_closure_residuals(&sigmas).iter().all(|(_, r)| r.is_zero()),
        });
    }

    Ok(report)
}

fn cmd_verify_geometry(cfg: &GeometryConfig, seed_override: Option<u64>) -> Result<Report> {
    let geom = cfg.build()?;
    let seed = seed_override.unwrap_or(cfg.checks.seed);
    let samples = cfg.checks.samples;
    let tol = cfg.checks.tolerance;
    let strict = cfg.checks.strict_tolerance;

    let mut report = Report::new("verify geometry", seed);
    report.conventions = Some(conventions(geom.sphere.lambda));
    report
        .observables
        .insert("lambda".to_string(), geom.sphere.lambda);
    report
        .observables
        .insert("lambda_spread".to_string(), geom.sphere.lambda_spread);

    report.push_residual(verify_metric_signature(&geom, seed, strict)?);

    let omega6 = solve_levi_civita(&geom.coframe)?;
    report.push_residual(verify_structure_equation(
        &geom.coframe,
        &omega6,
        seed,
        samples,
        tol,
    )?);
    for c in verify_connection_decomposition(&geom, &omega6, seed, samples, tol)? {
        report.push_residual(c);
    }
    report.push_residual(verify_interior_decomposition(&geom, seed, strict)?);
    for c in verify_hodge_decomposition(&geom, seed, samples, strict)? {
        report.push_residual(c);
    }
    let fc = curvature(&geom.gauge, &geom.spacetime)?;
    report.push_residual(bianchi_check(
        &geom.gauge,
        &geom.spacetime,
        &fc,
        seed,
        samples,
        tol,
    )?);

    Ok(report)
}

/// Snap a nonnegative float to the nearest rational with denominator at
/// most 16.
fn snap_rational(x: f64) -> CRat {
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
    CRat::rat(best.0, best.1)
}

fn sample_points(geom: &KKGeometry, seed: u64, n: usize) -> Vec<kkdirac::symexpr::Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| geom.chart.sample_point(&mut rng)).collect()
}

fn cmd_reduce(
    gcfg: &GeometryConfig,
    rcfg: &ReductionConfig,
    seed_override: Option<u64>,
) -> Result<Report> {
    let geom = gcfg.build()?;
    let r = &rcfg.reduction;
    let seed = seed_override.unwrap_or(r.seed);

    let mut report = Report::new("reduce", seed);
    report.conventions = Some(conventions(geom.sphere.lambda));

    let ctx = ReductionContext::new(geom)?;
    let bulk = rcfg.bulk_mass();
    let mass = ScalarExpr::constant(bulk.clone());

    // soundness: reduced equations against the full residual, one
    // seeded ansatz per instance
    let mut first_ansatz = None;
    for i in 0..r.instances {
        let ansatz = AnsatzSpinor6::random(&ctx.geom, r.ansatz_seed + i as u64);
        let mut check = verify_reduction(&ctx, &ansatz, &mass, seed + i as u64, r.samples, r.tolerance)?;
        check.name = format!("reduction-soundness-{i}");
        report.push_residual(check);
        if first_ansatz.is_none() {
            first_ansatz = Some(ansatz);
        }
    }
    let ansatz = first_ansatz.expect("instances is positive");

    let op_system = reduce_equations(&ctx, &ansatz, &mass, &SphereMode::Operator)?;

    // per-term magnitudes at a few seeded points
    let points = sample_points(&ctx.geom, seed, 5.min(r.samples));
    for (k, eq) in op_system.equations.iter().enumerate() {
        for term in &eq.terms {
            let mut max = 0.0f64;
            for p in &points {
                max = max.max(term.form.max_abs_at(p)?);
            }
            report
                .observables
                .insert(format!("eq{}.{:?}.max_abs", k + 1, term.tag), max);
        }
    }

    if ctx.geom.gauge.is_zero() {
        let free_tags = [TermTag::SpacetimeDirac, TermTag::SphereDirac];
        report.push_exact(ExactCheck {
            name: "free-limit term structure".to_string(),
            pass: op_system.equations.iter().all(|eq| eq.tags() == free_tags),
        });
    } else {
        report.push_residual(gauge_covariance_check(
            &ctx.geom.spacetime,
            &ctx.geom.gauge,
            &mass,
            seed,
            5,
            r.samples,
            r.tolerance,
        )?);
    }

    // sphere mass: extracted from the section or taken from the config
    let sphere_mass = match rcfg.explicit_sphere_mass() {
        Some(m) => Some((m, None)),
        None => match specialize_eigenstate(&ctx, &ansatz, &mass, seed, r.samples, r.tolerance) {
            Ok((spec_system, fit)) => {
                report
                    .observables
                    .insert("sphere_eigenvalue_re".to_string(), fit.value.re);
                report
                    .observables
                    .insert("sphere_eigenvalue_im".to_string(), fit.value.im);
                report
                    .observables
                    .insert("eigenstate_spread".to_string(), fit.spread);
                if fit.zero_mode {
                    report.warnings.push("section is a zero mode".to_string());
                }
                let mut residuals = Vec::new();
                for k in 0..2 {
                    let diff = spec_system.equations[k]
                        .residual()?
                        .sub(&op_system.equations[k].residual()?)?;
                    for p in &points {
                        residuals.push(diff.max_abs_at(p)?);
                    }
                }
                report.push_residual(ResidualCheck::from_residuals(
                    "eigenstate-specialization",
                    &residuals,
                    r.tolerance,
                ));
                Some((snap_rational(fit.value.norm()), Some(format!("{}", fit.value))))
            }
            Err(Error::NotAnEigenstate { spread }) => {
                report
                    .warnings
                    .push(format!("section is not an eigenstate (spread {spread:.3e})"));
                if r.strict_eigenstate {
                    report.push_exact(ExactCheck {
                        name: "sphere-section eigenstate".to_string(),
                        pass: false,
                    });
                }
                None
            }
            Err(e) => return Err(e),
        },
    };

    if let Some((m, extracted)) = sphere_mass {
        let spectrum = mass_spectrum(&bulk, &m)?;
        if spectrum.negative_branch {
            report
                .warnings
                .push("sphere mass exceeds the bulk mass: one eigenvalue is negative".to_string());
        }
        report.spectrum = Some(SpectrumBlock {
            bulk_mass: bulk.to_string(),
            sphere_mass: m.to_string(),
            extracted_eigenvalue: extracted,
            eigenvalues: spectrum.eigenvalues.iter().map(|e| e.to_string()).collect(),
            negative_mass_branch: spectrum.negative_branch,
        });
    }

    Ok(report)
}

fn emit(report: &Report, json: Option<&PathBuf>) -> Result<()> {
    print!("{}", report.render_text());
    if let Some(path) = json {
        std::fs::write(path, report.to_json())
            .map_err(|e| Error::Config(format!("cannot write `{}`: {e}", path.display())))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let (report, json) = match cli.command {
        Command::Verify {
            target: VerifyTarget::Clifford { json, corrupt_gamma },
        } => (cmd_verify_clifford(corrupt_gamma)?, json),
        Command::Verify {
            target: VerifyTarget::Geometry { config, json, seed },
        } => {
            let cfg = GeometryConfig::from_path(&config)?;
            (cmd_verify_geometry(&cfg, seed)?, json)
        }
        Command::Reduce {
            geometry,
            reduction,
            json,
            seed,
        } => {
            let gcfg = GeometryConfig::from_path(&geometry)?;
            let rcfg = ReductionConfig::from_path(&reduction)?;
            (cmd_reduce(&gcfg, &rcfg, seed)?, json)
        }
    };
    emit(&report, json.as_ref())?;
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
