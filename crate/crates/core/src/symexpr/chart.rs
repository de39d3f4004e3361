use rand::Rng;
use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Coordinate assignment used for numeric evaluation.
pub type Point = BTreeMap<String, f64>;

/// A named coordinate chart with an open validity box per coordinate.
///
/// Sample points for numeric verification are drawn from the box shrunk
/// by 5% per side, which keeps Euler-angle evaluations away from the
/// poles where the coframe degenerates.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    name: String,
    coords: Vec<String>,
    bounds: Vec<(f64, f64)>,
}

impl Chart {
    pub fn new(name: &str, coords: &[(&str, f64, f64)]) -> Self {
        let names: Vec<String> = coords.iter().map(|(n, _, _)| n.to_string()).collect();
        {
            let mut sorted = names.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), names.len(), "coordinate symbols must be distinct");
        }
        let bounds: Vec<(f64, f64)> = coords.iter().map(|(_, lo, hi)| (*lo, *hi)).collect();
        for (lo, hi) in &bounds {
            assert!(lo < hi, "validity box must be nonempty");
        }
        Chart {
            name: name.to_string(),
            coords: names,
            bounds,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn coord(&self, idx: usize) -> &str {
        &self.coords[idx]
    }

    pub fn has_coord(&self, name: &str) -> bool {
        self.coords.iter().any(|c| c == name)
    }

    pub fn coord_index(&self, name: &str) -> Result<usize> {
        self.coords
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownCoordinate(name.to_string()))
    }

    /// Product chart: coordinates of `self` followed by those of `other`.
    pub fn product(&self, other: &Chart, name: &str) -> Chart {
        let mut coords = self.coords.clone();
        coords.extend(other.coords.iter().cloned());
        let mut bounds = self.bounds.clone();
        bounds.extend(other.bounds.iter().cloned());
        Chart {
            name: name.to_string(),
            coords,
            bounds,
        }
    }

    /// Draw a point from the validity box shrunk by 5% per side.
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> Point {
        let mut p = Point::new();
        for (name, (lo, hi)) in self.coords.iter().zip(self.bounds.iter()) {
            let margin = 0.05 * (hi - lo);
            p.insert(name.clone(), rng.gen_range((lo + margin)..(hi - margin)));
        }
        p
    }
}
