//! Report schema shared by the verification commands.
//!
//! Reports are deterministic for a fixed config and seed: no timestamps,
//! maps are ordered, and floating-point values come from the same seeded
//! sample streams that the checks use.

use serde::Serialize;
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

/// The conventions every number in a report depends on.
#[derive(Debug, Clone, Serialize)]
pub struct Conventions {
    /// Orientation order of the spacetime frame labels.
    pub spacetime_orientation: Vec<u8>,
    /// Orientation order of the sphere frame labels.
    pub sphere_orientation: Vec<u8>,
    /// Orientation order of the product frame labels.
    pub product_orientation: Vec<u8>,
    /// Measured structure constant in de_a = lambda eps_abc e_b ^ e_c.
    pub lambda: f64,
    /// How the su(2) basis is built from the sphere gamma matrices.
    pub su2_basis: String,
    /// Which group-element section the sphere spinor uses.
    pub sphere_section: String,
    /// Reading applied to the ansatz's tensor slots.
    pub spinor_slots: String,
}

/// A numeric check driven by seeded sample points.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualCheck {
    pub name: String,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualCheck {
    pub fn from_residuals(name: &str, residuals: &[f64], tolerance: f64) -> Self {
        let max = residuals.iter().cloned().fold(0.0, f64::max);
        let mean = if residuals.is_empty() {
            0.0
        } else {
            residuals.iter().sum::<f64>() / residuals.len() as f64
        };
        ResidualCheck {
            name: name.to_string(),
            max_residual: max,
            mean_residual: mean,
            samples: residuals.len(),
            tolerance,
            pass: max < tolerance,
        }
    }
}

/// A check decided by exact arithmetic.
#[derive(Debug, Clone, Serialize)]
pub struct ExactCheck {
    pub name: String,
    pub pass: bool,
}

/// Mass spectrum block of the reduction report.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumBlock {
    /// Bulk mass M as an exact rational string.
    pub bulk_mass: String,
    /// Sphere mass m used in the matrix, exact rational string.
    pub sphere_mass: String,
    /// Raw sphere eigenvalue as extracted (complex, "re+imi" string).
    pub extracted_eigenvalue: Option<String>,
    pub eigenvalues: Vec<String>,
    /// True when m > M, the branch the source text excludes.
    pub negative_mass_branch: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub seed: u64,
    pub conventions: Option<Conventions>,
    pub residual_checks: Vec<ResidualCheck>,
    pub exact_checks: Vec<ExactCheck>,
    pub spectrum: Option<SpectrumBlock>,
    /// Free-form scalar observables (e.g. measured lambda spread).
    pub observables: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub pass: bool,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            seed,
            conventions: None,
            residual_checks: Vec::new(),
            exact_checks: Vec::new(),
            spectrum: None,
            observables: BTreeMap::new(),
            warnings: Vec::new(),
            pass: true,
        }
    }

    pub fn push_residual(&mut self, check: ResidualCheck) {
        self.pass &= check.pass;
        self.residual_checks.push(check);
    }

    pub fn push_exact(&mut self, check: ExactCheck) {
        self.pass &= check.pass;
        self.exact_checks.push(check);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per check, for terminal output.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.exact_checks {
            out.push_str(&format!(
                "{} {} (exact)\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name
            ));
        }
        for c in &self.residual_checks {
            out.push_str(&format!(
                "{} {} max {:.3e} mean {:.3e} over {} samples (tol {:.1e})\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.max_residual,
                c.mean_residual,
                c.samples,
                c.tolerance
            ));
        }
        for w in &self.warnings {
            out.push_str(&format!("WARN {w}\n"));
        }
        if let Some(s) = &self.spectrum {
            out.push_str(&format!(
                "spectrum: M = {}, m = {}, eigenvalues {{{}}}\n",
                s.bulk_mass,
                s.sphere_mass,
                s.eigenvalues.join(", ")
            ));
            if let Some(e) = &s.extracted_eigenvalue {
                out.push_str(&format!("extracted sphere eigenvalue: {e}\n"));
            }
        }
        out.push_str(if self.pass { "OVERALL PASS\n" } else { "OVERALL FAIL\n" });
        out
    }
}
