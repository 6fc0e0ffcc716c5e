//! Atom containers and builders: BCC slabs, random clusters, Maxwell–Boltzmann velocities.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::eam::MIN_SEPARATION;
use crate::error::{Error, Result};
use crate::units::{BOLTZMANN, MVV_TO_EV};

pub type Vec3 = [f64; 3];

/// Single-species atoms in an open (non-periodic) box.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSystem {
    pub element: String,
    pub positions: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
    pub forces: Vec<Vec3>,
    /// amu
    pub mass: f64,
    /// Extents of the region the atoms were built in; boundaries are open.
    pub box_extent: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlabSpec {
    pub cells_x: usize,
    pub cells_y: usize,
    pub cells_z: usize,
    pub lattice_constant: f64,
    pub temperature: f64,
    pub seed: u64,
}

impl Default for SlabSpec {
    fn default() -> Self {
        SlabSpec {
            cells_x: 6,
            cells_y: 6,
            cells_z: 6,
            lattice_constant: 0.0,
            temperature: 300.0,
            seed: 1,
        }
    }
}

impl AtomSystem {
    pub fn new(element: &str, positions: Vec<Vec3>, mass: f64, box_extent: Vec3) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::Domain(format!("mass must be > 0, got {mass}")));
        }
        if box_extent.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::Domain(format!("box extents must be > 0, got {box_extent:?}")));
        }
        let n = positions.len();
        Ok(Self {
            element: element.to_string(),
            positions,
            velocities: vec![[0.0; 3]; n],
            forces: vec![[0.0; 3]; n],
            mass,
            box_extent,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Smallest pair separation (brute force); `None` for fewer than two atoms.
    pub fn min_separation(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let r = distance(&self.positions[i], &self.positions[j]);
                best = Some(best.map_or(r, |b| b.min(r)));
            }
        }
        best
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if self.velocities.len() != n || self.forces.len() != n {
            return Err(Error::Domain("position, velocity and force arrays differ in length".into()));
        }
        if let Some(r) = self.min_separation() {
            if r <= MIN_SEPARATION {
                return Err(Error::Domain(format!("atoms closer than {MIN_SEPARATION} Å ({r})")));
            }
        }
        Ok(())
    }

    pub fn kinetic_energy(&self) -> f64 {
        let sum: f64 = self
            .velocities
            .iter()
            .map(|v| v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
            .sum();
        0.5 * self.mass * sum * MVV_TO_EV
    }

    /// Total linear momentum in amu·Å/fs.
    pub fn momentum(&self) -> Vec3 {
        let mut p = [0.0; 3];
        for v in &self.velocities {
            for d in 0..3 {
                p[d] += self.mass * v[d];
            }
        }
        p
    }

    /// Instantaneous temperature with the three centre-of-mass degrees removed.
    pub fn temperature(&self) -> f64 {
        if self.len() < 2 {
            return 0.0;
        }
        2.0 * self.kinetic_energy() / ((3 * self.len() - 3) as f64 * BOLTZMANN)
    }

    /// Draws Maxwell–Boltzmann velocities, removes net momentum, then rescales
    /// so the kinetic energy is exactly `(3N - 3) k_B T / 2`.
    ///
    /// Normal deviates come from `rand_distr::StandardNormal` fed by a
    /// ChaCha8 stream seeded with `seed`, three per atom in index order.
    pub fn init_velocities(&mut self, temperature: f64, seed: u64) -> Result<()> {
        if !(temperature >= 0.0) {
            return Err(Error::Domain(format!("temperature must be >= 0, got {temperature}")));
        }
        let n = self.len();
        if temperature == 0.0 {
            self.velocities = vec![[0.0; 3]; n];
            return Ok(());
        }
        if n < 2 {
            return Err(Error::Domain(
                "need at least 2 atoms to remove momentum at nonzero temperature".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = (BOLTZMANN * temperature / (self.mass * MVV_TO_EV)).sqrt();
        for v in self.velocities.iter_mut() {
            for c in v.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *c = sigma * z;
            }
        }
        let p = self.momentum();
        for v in self.velocities.iter_mut() {
            for d in 0..3 {
                v[d] -= p[d] / (self.mass * n as f64);
            }
        }
        let target = 0.5 * (3 * n - 3) as f64 * BOLTZMANN * temperature;
        let scale = (target / self.kinetic_energy()).sqrt();
        for v in self.velocities.iter_mut() {
            for c in v.iter_mut() {
                *c *= scale;
            }
        }
        Ok(())
    }

    /// Displaces every atom uniformly within `[-amplitude, amplitude]` per axis.
    pub fn perturb(&mut self, amplitude: f64, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for p in self.positions.iter_mut() {
            for c in p.iter_mut() {
                *c += rng.random_range(-amplitude..=amplitude);
            }
        }
    }

    pub fn to_xyz(&self, comment: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.len());
        let _ = writeln!(out, "{}", comment.replace('\n', " "));
        for p in &self.positions {
            let _ = writeln!(out, "{} {} {} {}", self.element, p[0], p[1], p[2]);
        }
        out
    }

    pub fn write_xyz(&self, path: impl AsRef<Path>, comment: &str) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_xyz(comment)).map_err(|e| Error::io(path, e))
    }

    /// Parses XYZ text; the box is the bounding extent of the coordinates.
    pub fn from_xyz(text: &str, mass: f64, origin: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let count: usize = lines
            .next()
            .and_then(|(_, l)| l.trim().parse().ok())
            .ok_or_else(|| Error::parse(origin, 1, "expected atom count"))?;
        lines.next().ok_or_else(|| Error::parse(origin, 2, "missing comment line"))?;
        let mut element = String::new();
        let mut positions = Vec::with_capacity(count);
        for (idx, line) in lines.take(count) {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 4 {
                return Err(Error::parse(origin, idx + 1, "expected element and 3 coordinates"));
            }
            element = fields[0].to_string();
            let mut p = [0.0; 3];
            for d in 0..3 {
                p[d] = fields[d + 1].parse().map_err(|_| {
                    Error::parse(origin, idx + 1, format!("bad coordinate {:?}", fields[d + 1]))
                })?;
            }
            positions.push(p);
        }
        if positions.len() != count {
            return Err(Error::parse(
                origin,
                positions.len() + 3,
                format!("expected {count} atoms, found {}", positions.len()),
            ));
        }
        let extent = bounding_extent(&positions);
        AtomSystem::new(&element, positions, mass, extent)
    }

    pub fn read_xyz(path: impl AsRef<Path>, mass: f64) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_xyz(&text, mass, &path.display().to_string())
    }
}

fn bounding_extent(positions: &[Vec3]) -> Vec3 {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in positions {
        for d in 0..3 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let mut extent = [1.0; 3];
    for d in 0..3 {
        if hi[d] > lo[d] {
            extent[d] = (hi[d] - lo[d]).max(1.0);
        }
    }
    extent
}

#[inline]
pub fn distance(a: &Vec3, b: &Vec3) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// Perfect BCC crystal of `cells_x * cells_y * cells_z` conventional cells, two
/// atoms per cell (corner and body centre), with velocities at `spec.temperature`.
pub fn build_bcc_slab(spec: &SlabSpec, element: &str, mass: f64) -> Result<AtomSystem> {
    if spec.cells_x == 0 || spec.cells_y == 0 || spec.cells_z == 0 {
        return Err(Error::Domain("slab needs at least one cell per axis".into()));
    }
    if !(spec.lattice_constant > 2.0 * MIN_SEPARATION) {
        return Err(Error::Domain(format!(
            "lattice constant {} is not physical",
            spec.lattice_constant
        )));
    }
    let a = spec.lattice_constant;
    let mut positions = Vec::with_capacity(2 * spec.cells_x * spec.cells_y * spec.cells_z);
    for k in 0..spec.cells_z {
        for j in 0..spec.cells_y {
            for i in 0..spec.cells_x {
                let corner = [i as f64 * a, j as f64 * a, k as f64 * a];
                positions.push(corner);
                positions.push([corner[0] + 0.5 * a, corner[1] + 0.5 * a, corner[2] + 0.5 * a]);
            }
        }
    }
    let extent = [
        spec.cells_x as f64 * a,
        spec.cells_y as f64 * a,
        spec.cells_z as f64 * a,
    ];
    let mut system = AtomSystem::new(element, positions, mass, extent)?;
    system.init_velocities(spec.temperature, spec.seed)?;
    Ok(system)
}

/// True when the slab is narrower than two cutoffs in x or y, where surface
/// atoms dominate.
pub fn slab_is_thin(spec: &SlabSpec, cutoff: f64) -> bool {
    let a = spec.lattice_constant;
    (spec.cells_x as f64 * a) < 2.0 * cutoff || (spec.cells_y as f64 * a) < 2.0 * cutoff
}

/// Uniform random atoms in a cube sized for `density` (atoms/Å³), rejecting
/// any draw closer than `min_separation` to an accepted atom.
pub fn random_cluster(
    n: usize,
    density: f64,
    min_separation: f64,
    mass: f64,
    seed: u64,
) -> Result<AtomSystem> {
    let side = (n.max(1) as f64 / density).cbrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions: Vec<Vec3> = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while positions.len() < n {
        attempts += 1;
        if attempts > 1000 * n.max(1) {
            return Err(Error::Domain(format!(
                "could not place {n} atoms at density {density} with separation {min_separation}"
            )));
        }
        let p = [
            rng.random_range(0.0..side),
            rng.random_range(0.0..side),
            rng.random_range(0.0..side),
        ];
        if positions.iter().all(|q| distance(&p, q) >= min_separation) {
            positions.push(p);
        }
    }
    AtomSystem::new("X", positions, mass, [side; 3])
}
