//! Run configuration: a TOML file with defaults for every field, overridden by
//! command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eam::{EamTables, Precision};
use crate::engine::{EngineConfig, FabricModel};
use crate::error::{Error, Result};
use crate::mapping::CoreGrid;
use crate::system::{build_bcc_slab, AtomSystem, SlabSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    Reference,
    #[default]
    Wafer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SlabConfig {
    pub cells_x: usize,
    pub cells_y: usize,
    pub cells_z: usize,
    /// K
    pub temperature: f64,
    /// Å; `None` takes the potential's lattice constant.
    pub lattice_constant: Option<f64>,
}

impl Default for SlabConfig {
    fn default() -> Self {
        SlabConfig {
            cells_x: 6,
            cells_y: 6,
            cells_z: 6,
            temperature: 300.0,
            lattice_constant: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PathBuf,
    pub engine: EngineKind,
    pub slab: SlabConfig,
    pub seed: u64,
    pub grid_width: usize,
    pub grid_height: usize,
    pub cores_per_atom: usize,
    /// `None` uses `cores_per_atom - 1`.
    pub diagonal_spacing: Option<usize>,
    /// Å
    pub skin: f64,
    /// fs
    pub dt: f64,
    pub steps: usize,
    pub precision: Precision,
    pub remap_every: usize,
    pub remap_radius: Option<usize>,
    /// Å
    pub cell_width: Option<f64>,
    pub fabric: FabricModel,
    /// Rescale the fabric costs so the `k = 4` placement of this system costs
    /// this many cycles per step.
    pub calibrate_cycles: Option<f64>,
    /// Relative force tolerance for `verify`; `None` picks by precision.
    pub tolerance: Option<f64>,
    /// JSON-lines trajectory summary; stdout when unset.
    pub trajectory: Option<PathBuf>,
    pub xyz: Option<PathBuf>,
    /// Steps between XYZ frames; 0 disables snapshots.
    pub snapshot_stride: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let e = EngineConfig::default();
        RunConfig {
            potential: PathBuf::from("data/Ta.setfl"),
            engine: EngineKind::Wafer,
            slab: SlabConfig::default(),
            seed: 1,
            grid_width: CoreGrid::WSE_WIDTH,
            grid_height: CoreGrid::WSE_HEIGHT,
            cores_per_atom: 1,
            diagonal_spacing: None,
            skin: e.skin,
            dt: e.dt,
            steps: 100,
            precision: e.precision,
            remap_every: e.remap_every,
            remap_radius: e.remap_radius,
            cell_width: e.cell_width,
            fabric: FabricModel::default(),
            calibrate_cycles: None,
            tolerance: None,
            trajectory: None,
            xyz: None,
            snapshot_stride: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.slab.cells_x == 0 || self.slab.cells_y == 0 || self.slab.cells_z == 0 {
            return Err(Error::Config("slab needs at least one cell per axis".into()));
        }
        if !(self.slab.temperature >= 0.0) {
            return Err(Error::Config(format!("temperature must be >= 0, got {}", self.slab.temperature)));
        }
        if let Some(a) = self.slab.lattice_constant {
            if !(a > 0.0) {
                return Err(Error::Config(format!("lattice constant must be > 0, got {a}")));
            }
        }
        if !(self.skin > 0.0) {
            return Err(Error::Config(format!("skin must be > 0, got {}", self.skin)));
        }
        if !(self.dt >= 0.0) {
            return Err(Error::Config(format!("dt must be >= 0, got {}", self.dt)));
        }
        if let Some(w) = self.cell_width {
            if !(w > 0.0) {
                return Err(Error::Config(format!("cell width must be > 0, got {w}")));
            }
        }
        if self.remap_radius == Some(0) {
            return Err(Error::Config("remap radius must be >= 1".into()));
        }
        if let Some(t) = self.tolerance {
            if !(t >= 0.0) {
                return Err(Error::Config(format!("tolerance must be >= 0, got {t}")));
            }
        }
        self.fabric.validate()?;
        self.grid().map(|_| ())
    }

    pub fn grid(&self) -> Result<CoreGrid> {
        CoreGrid::new(self.grid_width, self.grid_height, self.cores_per_atom, self.diagonal_spacing)
    }

    pub fn engine_config(&self) -> EngineConfig {
        EngineConfig {
            skin: self.skin,
            dt: self.dt,
            precision: self.precision,
            remap_every: self.remap_every,
            remap_radius: self.remap_radius,
            cell_width: self.cell_width,
        }
    }

    pub fn load_potential(&self) -> Result<EamTables> {
        EamTables::load_setfl(&self.potential)
    }

    /// Default relative force tolerance for the precision mode.
    pub fn force_tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(match self.precision {
            Precision::Double => 1e-9,
            Precision::Single => 1e-4,
        })
    }

    pub fn slab_spec(&self, tables: &EamTables) -> SlabSpec {
        SlabSpec {
            cells_x: self.slab.cells_x,
            cells_y: self.slab.cells_y,
            cells_z: self.slab.cells_z,
            lattice_constant: self.slab.lattice_constant.unwrap_or(tables.lattice_constant),
            temperature: self.slab.temperature,
            seed: self.seed,
        }
    }

    pub fn build_system(&self, tables: &EamTables) -> Result<AtomSystem> {
        build_bcc_slab(&self.slab_spec(tables), &tables.element, tables.species_mass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_all_defaults() {
        assert_eq!(RunConfig::parse("", "t").unwrap(), RunConfig::default());
    }

    #[test]
    fn round_trips_through_toml() {
        let mut c = RunConfig {
            cores_per_atom: 4,
            precision: Precision::Single,
            ..RunConfig::default()
        };
        c.slab.cells_x = 10;
        c.fabric.cost_fixed = 12.5;
        assert_eq!(RunConfig::parse(&c.to_toml(), "t").unwrap(), c);
    }

    #[test]
    fn partial_tables_keep_defaults() {
        let c = RunConfig::parse("steps = 7\n[slab]\ncells_z = 2\n[fabric]\nclock_hz = 1e9\n", "t").unwrap();
        assert_eq!(c.steps, 7);
        assert_eq!(c.slab.cells_z, 2);
        assert_eq!(c.slab.cells_x, 6);
        assert_eq!(c.fabric.clock_hz, 1e9);
        assert_eq!(c.fabric.cost_fixed, FabricModel::default().cost_fixed);
    }

    #[test]
    fn bad_values_are_rejected() {
        assert!(RunConfig::parse("stepz = 3", "t").is_err());
        let c = RunConfig {
            skin: 0.0,
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
        let c = RunConfig {
            cores_per_atom: 0,
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
        assert!(RunConfig::default().validate().is_ok());
    }
}
