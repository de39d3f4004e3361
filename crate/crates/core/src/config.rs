//! TOML configuration for the verification commands.
//!
//! Two config kinds exist: a geometry config (spacetime model, gauge
//! potential, sampling controls) and a reduction config (bulk mass,
//! sphere-mass mode, instance count, strictness). Symbolic entries are
//! written as s-expressions in the chart coordinates.

use std::path::PathBuf;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exact::CRat;
use crate::geometry::{
    assemble_kk, spacetime_chart, GaugePotential, KKGeometry, SpacetimeModel, SphereModel,
};
use crate::matrix::ExprMat;
use crate::symexpr::parse_sexpr;

/// Environment variable naming the default directory for config files.
pub const CONFIG_DIR_ENV: &str = "KKDIRAC_CONFIG_DIR";

/// Resolve a config path: used as given when it exists or is absolute,
/// otherwise looked up under the default config directory.
pub fn resolve_config_path(path: &str) -> PathBuf {
    let direct = PathBuf::from(path);
    if direct.is_absolute() || direct.exists() {
        return direct;
    }
    match std::env::var(CONFIG_DIR_ENV) {
        Ok(dir) if !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => direct,
    }
}

fn read_toml<T: serde::de::DeserializeOwned>(path: &str) -> Result<T> {
    let resolved = resolve_config_path(path);
    let text = std::fs::read_to_string(&resolved)
        .map_err(|e| Error::Config(format!("cannot read `{}`: {e}", resolved.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", resolved.display())))
}

fn check_tolerance(name: &str, tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 1e-3) {
        return Err(Error::Config(format!(
            "{name} must lie in (0, 1e-3), got {tol}"
        )));
    }
    Ok(())
}

fn check_positive(name: &str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Config(format!("{name} must be positive")));
    }
    Ok(())
}

/// Parse a rational literal `n` or `n/d`.
pub fn parse_rational(text: &str) -> Result<CRat> {
    let bad = || Error::Config(format!("`{text}` is not a rational literal"));
    let mut parts = text.trim().splitn(2, '/');
    let num: i64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    match parts.next() {
        None => Ok(CRat::from_int(num)),
        Some(d) => {
            let den: i64 = d.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            Ok(CRat::rat(num, den))
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacetimeSection {
    /// "flat" or "custom".
    #[serde(default = "default_model")]
    pub model: String,
    /// 3x3 array of s-expressions in x0, x1, x2 (custom model only).
    #[serde(default)]
    pub vielbein: Option<Vec<Vec<String>>>,
}

fn default_model() -> String {
    "flat".to_string()
}

impl Default for SpacetimeSection {
    fn default() -> Self {
        SpacetimeSection {
            model: default_model(),
            vielbein: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSection {
    /// "zero", "random" or "explicit".
    #[serde(default = "default_gauge_kind")]
    pub kind: String,
    /// Seed for the random polynomial family.
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// 3x3 array of s-expressions A_alpha^{ a} (explicit kind only),
    /// rows indexed by the sphere label, columns by the spacetime frame.
    #[serde(default)]
    pub comps: Option<Vec<Vec<String>>>,
}

fn default_gauge_kind() -> String {
    "zero".to_string()
}

fn default_seed() -> u64 {
    42
}

impl Default for GaugeSection {
    fn default() -> Self {
        GaugeSection {
            kind: default_gauge_kind(),
            seed: default_seed(),
            comps: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksSection {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Residual tolerance for the structure-equation class of checks.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Tighter tolerance for the interior/Hodge decomposition checks.
    #[serde(default = "default_strict_tolerance")]
    pub strict_tolerance: f64,
}

fn default_samples() -> usize {
    30
}

fn default_tolerance() -> f64 {
    1e-9
}

fn default_strict_tolerance() -> f64 {
    1e-10
}

impl Default for ChecksSection {
    fn default() -> Self {
        ChecksSection {
            seed: default_seed(),
            samples: default_samples(),
            tolerance: default_tolerance(),
            strict_tolerance: default_strict_tolerance(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(default)]
    pub spacetime: SpacetimeSection,
    #[serde(default)]
    pub gauge: GaugeSection,
    #[serde(default)]
    pub checks: ChecksSection,
}

fn parse_matrix(rows: &[Vec<String>], what: &str) -> Result<Vec<Vec<crate::symexpr::ScalarExpr>>> {
    if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
        return Err(Error::Config(format!("{what} must be a 3x3 array")));
    }
    rows.iter()
        .map(|r| r.iter().map(|s| parse_sexpr(s)).collect())
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Config(format!("{what}: {e}")))
}

impl GeometryConfig {
    pub fn from_path(path: &str) -> Result<Self> {
        let cfg: GeometryConfig = read_toml(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("checks.samples", self.checks.samples)?;
        check_tolerance("checks.tolerance", self.checks.tolerance)?;
        check_tolerance("checks.strict_tolerance", self.checks.strict_tolerance)?;
        match self.spacetime.model.as_str() {
            "flat" => {}
            "custom" => {
                if self.spacetime.vielbein.is_none() {
                    return Err(Error::Config(
                        "spacetime.model = \"custom\" needs spacetime.vielbein".into(),
                    ));
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown spacetime model `{other}` (expected \"flat\" or \"custom\")"
                )))
            }
        }
        match self.gauge.kind.as_str() {
            "zero" | "random" => {}
            "explicit" => {
                if self.gauge.comps.is_none() {
                    return Err(Error::Config(
                        "gauge.kind = \"explicit\" needs gauge.comps".into(),
                    ));
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown gauge kind `{other}` (expected \"zero\", \"random\" or \"explicit\")"
                )))
            }
        }
        Ok(())
    }

    pub fn build_spacetime(&self) -> Result<SpacetimeModel> {
        match self.spacetime.model.as_str() {
            "flat" => Ok(SpacetimeModel::flat()),
            _ => {
                let rows = parse_matrix(
                    self.spacetime.vielbein.as_ref().expect("validated"),
                    "spacetime.vielbein",
                )?;
                let v = ExprMat::from_fn(3, 3, |r, c| rows[r][c].clone());
                SpacetimeModel::custom(v).map_err(|e| Error::Config(e.to_string()))
            }
        }
    }

    pub fn build_gauge(&self) -> Result<GaugePotential> {
        let chart = spacetime_chart();
        match self.gauge.kind.as_str() {
            "zero" => Ok(GaugePotential::zero(chart)),
            "random" => Ok(GaugePotential::random_polynomial(chart, self.gauge.seed)),
            _ => {
                let rows = parse_matrix(self.gauge.comps.as_ref().expect("validated"), "gauge.comps")?;
                GaugePotential::new(chart, rows)
            }
        }
    }

    pub fn build(&self) -> Result<KKGeometry> {
        let spacetime = self.build_spacetime()?;
        let sphere = SphereModel::unit()?;
        let gauge = self.build_gauge()?;
        assemble_kk(spacetime, sphere, gauge)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionSection {
    /// Bulk mass M, a rational literal.
    #[serde(default = "default_bulk_mass")]
    pub bulk_mass: String,
    /// Sphere mass mode: "extract" or an explicit rational literal.
    #[serde(default = "default_sphere_mass")]
    pub sphere_mass: String,
    /// Error out (exit 1) when the section is not an eigenstate.
    #[serde(default = "default_strict")]
    pub strict_eigenstate: bool,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Seed base for the random spinor ansatz instances.
    #[serde(default = "default_ansatz_seed")]
    pub ansatz_seed: u64,
    /// Number of seeded ansatz instances for the soundness check.
    #[serde(default = "default_instances")]
    pub instances: usize,
}

fn default_bulk_mass() -> String {
    "2".to_string()
}

fn default_sphere_mass() -> String {
    "extract".to_string()
}

fn default_strict() -> bool {
    true
}

fn default_ansatz_seed() -> u64 {
    5
}

fn default_instances() -> usize {
    3
}

impl Default for ReductionSection {
    fn default() -> Self {
        ReductionSection {
            bulk_mass: default_bulk_mass(),
            sphere_mass: default_sphere_mass(),
            strict_eigenstate: default_strict(),
            seed: default_seed(),
            samples: default_samples(),
            tolerance: default_tolerance(),
            ansatz_seed: default_ansatz_seed(),
            instances: default_instances(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ReductionConfig {
    #[serde(default)]
    pub reduction: ReductionSection,
}

impl ReductionConfig {
    pub fn from_path(path: &str) -> Result<Self> {
        let cfg: ReductionConfig = read_toml(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.reduction;
        check_positive("reduction.samples", r.samples)?;
        check_positive("reduction.instances", r.instances)?;
        check_tolerance("reduction.tolerance", r.tolerance)?;
        let m = parse_rational(&r.bulk_mass)
            .map_err(|_| Error::Config(format!("reduction.bulk_mass `{}` is not rational", r.bulk_mass)))?;
        if !m.is_real() {
            return Err(Error::Config("reduction.bulk_mass must be real".into()));
        }
        if r.sphere_mass != "extract" {
            parse_rational(&r.sphere_mass).map_err(|_| {
                Error::Config(format!(
                    "reduction.sphere_mass must be \"extract\" or a rational, got `{}`",
                    r.sphere_mass
                ))
            })?;
        }
        Ok(())
    }

    pub fn bulk_mass(&self) -> CRat {
        parse_rational(&self.reduction.bulk_mass).expect("validated")
    }

    /// None means "extract from the sphere operator".
    pub fn explicit_sphere_mass(&self) -> Option<CRat> {
        if self.reduction.sphere_mass == "extract" {
            None
        } else {
            Some(parse_rational(&self.reduction.sphere_mass).expect("validated"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn default_geometry_config_builds_flat_zero_gauge() {
        let f = write_tmp("");
        let cfg = GeometryConfig::from_path(f.path().to_str().unwrap()).unwrap();
        let geom = cfg.build().unwrap();
        assert!(geom.spacetime.flat);
        assert!(geom.gauge.is_zero());
    }

    #[test]
    fn random_gauge_config_round_trips_seed() {
        let f = write_tmp("[gauge]\nkind = \"random\"\nseed = 7\n");
        let cfg = GeometryConfig::from_path(f.path().to_str().unwrap()).unwrap();
        assert_eq!(cfg.gauge.seed, 7);
        assert!(!cfg.build().unwrap().gauge.is_zero());
    }

    #[test]
    fn explicit_gauge_parses_sexprs() {
        let f = write_tmp(
            "[gauge]\nkind = \"explicit\"\ncomps = [[\"(mul (rat 1 3) x1)\", \"0\", \"0\"], [\"0\", \"0\", \"0\"], [\"0\", \"0\", \"0\"]]\n",
        );
        let cfg = GeometryConfig::from_path(f.path().to_str().unwrap()).unwrap();
        let gauge = cfg.build_gauge().unwrap();
        assert!(!gauge.is_zero());
    }

    #[test]
    fn singular_custom_vielbein_is_a_config_error() {
        let f = write_tmp(
            "[spacetime]\nmodel = \"custom\"\nvielbein = [[\"1\", \"0\", \"0\"], [\"1\", \"0\", \"0\"], [\"0\", \"0\", \"1\"]]\n",
        );
        let cfg = GeometryConfig::from_path(f.path().to_str().unwrap()).unwrap();
        assert!(cfg.build().is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let f = write_tmp("[checks]\nsampels = 10\n");
        assert!(GeometryConfig::from_path(f.path().to_str().unwrap()).is_err());
    }

    #[test]
    fn tolerance_bounds_are_enforced() {
        let f = write_tmp("[checks]\ntolerance = 0.5\n");
        assert!(GeometryConfig::from_path(f.path().to_str().unwrap()).is_err());
        let f = write_tmp("[checks]\nsamples = 0\n");
        assert!(GeometryConfig::from_path(f.path().to_str().unwrap()).is_err());
    }

    #[test]
    fn rational_literals_parse() {
        assert_eq!(parse_rational("2").unwrap(), CRat::from_int(2));
        assert_eq!(parse_rational("-3/4").unwrap(), CRat::rat(-3, 4));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn reduction_config_defaults_and_masses() {
        let f = write_tmp("[reduction]\nbulk_mass = \"3/2\"\n");
        let cfg = ReductionConfig::from_path(f.path().to_str().unwrap()).unwrap();
        assert_eq!(cfg.bulk_mass(), CRat::rat(3, 2));
        assert!(cfg.explicit_sphere_mass().is_none());
        let f = write_tmp("[reduction]\nsphere_mass = \"1/4\"\n");
        let cfg = ReductionConfig::from_path(f.path().to_str().unwrap()).unwrap();
        assert_eq!(cfg.explicit_sphere_mass(), Some(CRat::rat(1, 4)));
    }

    #[test]
    fn config_dir_env_resolves_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("g.toml"), "").unwrap();
        std::env::set_var(CONFIG_DIR_ENV, dir.path());
        let p = resolve_config_path("g.toml");
        assert_eq!(p, dir.path().join("g.toml"));
        std::env::remove_var(CONFIG_DIR_ENV);
    }
}
