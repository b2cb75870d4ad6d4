//! Config file for the perturbed continuation runs.
//!
//! TOML with scalar geometry/solver fields and the boundary displacement
//! harmonics as `[[k, c, d]]` triples:
//!
//! ```toml
//! a = 1.0
//! b = 2.0
//! p = 3.0
//! m = 2
//! t = 0.05
//! steps = 5
//! n_r = 64
//! n_theta = 64
//! inner = []
//! outer = [[2, 0.1, 0.0]]
//! ```
//!
//! Command-line flags override any scalar field.

use crate::error::{Error, Result};
use crate::perturbed::{DeformationSpec, FourierTerm};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbConfig {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub m: usize,
    pub t: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_n_r")]
    pub n_r: usize,
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    /// Inner boundary displacement harmonics, each [k, c, d].
    #[serde(default)]
    pub inner: Vec<(u32, f64, f64)>,
    /// Outer boundary displacement harmonics, each [k, c, d].
    #[serde(default)]
    pub outer: Vec<(u32, f64, f64)>,
}

fn default_steps() -> usize {
    5
}
fn default_n_r() -> usize {
    64
}
fn default_n_theta() -> usize {
    64
}

impl PerturbConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn deformation(&self) -> DeformationSpec {
        let terms = |list: &[(u32, f64, f64)]| {
            list.iter()
                .map(|&(k, c, d)| FourierTerm { k, c, d })
                .collect()
        };
        DeformationSpec {
            inner: terms(&self.inner),
            outer: terms(&self.outer),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_with_defaults() {
        let text = r#"
            a = 1.0
            b = 2.0
            p = 3.0
            m = 2
            t = 0.05
            outer = [[2, 0.1, 0.0]]
        "#;
        let cfg: PerturbConfig = toml::from_str(text).unwrap();
        assert_eq!(cfg.steps, 5);
        assert_eq!((cfg.n_r, cfg.n_theta), (64, 64));
        assert!(cfg.inner.is_empty());
        let dspec = cfg.deformation();
        assert_eq!(dspec.outer.len(), 1);
        assert_eq!(dspec.outer[0].k, 2);
        assert_eq!(dspec.outer[0].c, 0.1);
    }

    #[test]
    fn integer_coefficients_parse_as_floats() {
        let text = "a = 1\nb = 2\np = 3\nm = 1\nt = 0\nouter = [[1, 1, 0]]";
        let cfg: PerturbConfig = toml::from_str(text).unwrap();
        assert_eq!(cfg.p, 3.0);
        assert_eq!(cfg.outer[0].1, 1.0);
    }

    #[test]
    fn malformed_files_surface_as_config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "a = [broken").unwrap();
        match PerturbConfig::load(&path) {
            Err(Error::Config(msg)) => assert!(msg.contains("bad.toml")),
            other => panic!("expected config error, got {other:?}"),
        }
        assert!(matches!(
            PerturbConfig::load(Path::new("/nonexistent/x.toml")),
            Err(Error::Config(_))
        ));
    }
}
