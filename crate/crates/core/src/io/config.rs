//! Geometry and run configuration read from TOML.
//!
//! ```toml
//! schema_version = 1
//!
//! [domain]
//! kind = "rect"          # or "disk"
//! alpha = 1.0            # rectangle (0, απ) × (0, π)
//!
//! [[cuts]]
//! kind = "segment"
//! start = [1.5707963267948966, 0.0]
//! end = [1.5707963267948966, 3.141592653589793]
//!
//! [grid]
//! n = 16                 # nodes per block direction
//! count = 6              # eigenpairs
//!
//! [tolerances]
//! eigen_residual = 1e-8
//! not_critical = 0.1
//!
//! [basis]
//! per_arc = 3
//! samples = 24
//!
//! [orientation]
//! kind = "bipartite"
//! ```
//!
//! A disk may list radial cuts (`kind = "radial"`, `theta`, `r0`, `r1`) or
//! give `[sectors] k = 6` for the equiangular radial partition. Unknown keys
//! are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::partition::{build_disk_partition, build_radial_partition, build_rect_partition, check_bipartite, Cut, OrientationRule, Partition, Segment};
use crate::tolerances::{EIGEN_RESIDUAL, NOT_CRITICAL};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub domain: DomainConfig,
    #[serde(default)]
    pub cuts: Vec<Cut>,
    #[serde(default)]
    pub sectors: Option<SectorsConfig>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default)]
    pub basis: BasisConfig,
    #[serde(default)]
    pub orientation: Option<OrientationRule>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum DomainKind {
    Rect,
    Disk,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub kind: DomainKind,
    #[serde(default)]
    pub alpha: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorsConfig {
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n: usize,
    pub count: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n: 16, count: 6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    /// Largest accepted `‖Av − λBv‖ / (1 + |λ|)`.
    pub eigen_residual: f64,
    /// Criticality residual above which the Hessian is refused.
    pub not_critical: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig { eigen_residual: EIGEN_RESIDUAL, not_critical: NOT_CRITICAL }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasisConfig {
    pub per_arc: usize,
    pub samples: usize,
}

impl Default for BasisConfig {
    fn default() -> Self {
        BasisConfig { per_arc: 3, samples: 24 }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version)));
        }
        match self.domain.kind {
            DomainKind::Rect => {
                if self.domain.alpha.is_none() {
                    return Err(Error::Config("domain.alpha is required for a rectangle".into()));
                }
                if self.sectors.is_some() {
                    return Err(Error::Config("sectors apply to the disk only".into()));
                }
                if self.cuts.iter().any(|c| matches!(c, Cut::Radial { .. })) {
                    return Err(Error::Config("radial cuts apply to the disk only".into()));
                }
            }
            DomainKind::Disk => {
                if self.domain.alpha.is_some() {
                    return Err(Error::Config("domain.alpha applies to the rectangle only".into()));
                }
                if self.sectors.is_some() && !self.cuts.is_empty() {
                    return Err(Error::Config("give either sectors or cuts, not both".into()));
                }
            }
        }
        if self.grid.count == 0 {
            return Err(Error::Config("grid.count must be positive".into()));
        }
        if !(self.tolerances.eigen_residual > 0.0 && self.tolerances.not_critical > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn partition(&self) -> Result<Partition> {
        match self.domain.kind {
            DomainKind::Rect => {
                let segments: Vec<Segment> = self.cuts.iter().map(Cut::segment).collect();
                build_rect_partition(self.domain.alpha.unwrap_or(1.0), &segments)
            }
            DomainKind::Disk => match &self.sectors {
                Some(s) => build_radial_partition(s.k),
                None => build_disk_partition(&self.cuts),
            },
        }
    }

    /// The configured rule, else `Bipartite` when the partition admits it,
    /// else left normals.
    pub fn orientation_rule(&self, p: &Partition) -> OrientationRule {
        match &self.orientation {
            Some(r) => r.clone(),
            None if check_bipartite(p).is_some() => OrientationRule::Bipartite,
            None => OrientationRule::LeftNormal,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CROSS: &str = r#"
schema_version = 1
[domain]
kind = "rect"
alpha = 1.0
[[cuts]]
kind = "segment"
start = [1.5707963267948966, 0.0]
end = [1.5707963267948966, 3.141592653589793]
[[cuts]]
kind = "segment"
start = [0.0, 1.5707963267948966]
end = [3.141592653589793, 1.5707963267948966]
"#;

    #[test]
    fn cross_config_round_trips() {
        let c = RunConfig::from_toml(CROSS).unwrap();
        assert_eq!(c.partition().unwrap().subdomains.len(), 4);
        assert_eq!(RunConfig::from_toml(&c.to_toml().unwrap()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_and_versions_are_rejected() {
        let typo = CROSS.replace("[domain]", "[domain]\nalhpa = 2.0");
        assert!(matches!(RunConfig::from_toml(&typo), Err(Error::Config(_))));
        let v2 = CROSS.replace("schema_version = 1", "schema_version = 2");
        assert!(matches!(RunConfig::from_toml(&v2), Err(Error::Config(_))));
    }

    #[test]
    fn sectors_build_radial_partitions() {
        let c = RunConfig::from_toml("schema_version = 1\n[domain]\nkind = \"disk\"\n[sectors]\nk = 5\n").unwrap();
        assert_eq!(c.partition().unwrap().subdomains.len(), 5);
    }
}
