//! Serial oracle: direct and cell-list EAM forces, velocity Verlet.
//!
//! Single-threaded and in fixed summation order; this is what the mesh engine
//! is checked against.

use std::collections::HashMap;

use crate::eam::{EamTables, Precision};
use crate::error::{Error, Result};
use crate::eam::PairTerms;
use crate::kernel::{self, ForcePart, Message};
use crate::system::{AtomSystem, Vec3};
use crate::units::FORCE_TO_ACCEL;

#[derive(Debug, Clone, PartialEq)]
pub struct ForceResult {
    /// eV/Å
    pub forces: Vec<Vec3>,
    /// eV
    pub potential_energy: f64,
    pub per_atom_density: Vec<f64>,
    pub per_atom_energy: Vec<f64>,
}

impl ForceResult {
    pub fn net_force(&self) -> Vec3 {
        let mut s = [0.0; 3];
        for f in &self.forces {
            for d in 0..3 {
                s[d] += f[d];
            }
        }
        s
    }
}

/// Evaluates the EAM energy and forces over an explicit list of `(lo, hi)`
/// candidate pairs. Pairs beyond the cutoff contribute nothing; pairs that are
/// missing from the list are simply not seen.
pub fn evaluate_pairs(
    system: &AtomSystem,
    tables: &EamTables,
    pairs: &[(u32, u32)],
    precision: Precision,
) -> Result<ForceResult> {
    let n = system.len();
    let pos = &system.positions;
    let mut live: Vec<(u32, u32, kernel::PairGeometry, PairTerms)> = Vec::new();
    let mut rho_msgs = Vec::new();
    for &(lo, hi) in pairs {
        debug_assert!(lo < hi);
        let g = kernel::geometry(&pos[lo as usize], &pos[hi as usize], precision);
        if let Some(t) = kernel::pair_terms(tables, &g, precision)? {
            rho_msgs.push(Message { atom: lo, partner: hi, value: t.rho });
            rho_msgs.push(Message { atom: hi, partner: lo, value: t.rho });
            live.push((lo, hi, g, t));
        }
    }
    let density = kernel::reduce_scalar(n, &mut rho_msgs, precision);
    let embedding = kernel::embed_all(tables, &density, precision)?;

    let mut force_msgs = Vec::with_capacity(2 * live.len());
    for (lo, hi, g, t) in &live {
        let f = kernel::pair_force(t, g, embedding[*lo as usize].1, embedding[*hi as usize].1, precision);
        let half_phi = precision.round(0.5 * t.phi);
        force_msgs.push(Message {
            atom: *lo,
            partner: *hi,
            value: ForcePart { force: f, half_phi },
        });
        force_msgs.push(Message {
            atom: *hi,
            partner: *lo,
            value: ForcePart {
                force: [-f[0], -f[1], -f[2]],
                half_phi,
            },
        });
    }
    let (forces, pair_energy) = kernel::reduce_forces(n, &mut force_msgs, precision);
    let (per_atom_energy, potential_energy) = kernel::total_energy(&embedding, &pair_energy, precision);
    Ok(ForceResult {
        forces,
        potential_energy,
        per_atom_density: density,
        per_atom_energy,
    })
}

/// Direct double loop over all pairs.
pub fn compute_forces_bruteforce(system: &AtomSystem, tables: &EamTables) -> Result<ForceResult> {
    let mut pairs = Vec::new();
    let pos = &system.positions;
    for i in 0..system.len() {
        for j in i + 1..system.len() {
            let g = kernel::geometry(&pos[i], &pos[j], Precision::Double);
            if g.r < tables.cutoff {
                pairs.push((i as u32, j as u32));
            }
        }
    }
    evaluate_pairs(system, tables, &pairs, Precision::Double)
}

/// All `(lo, hi)` pairs closer than `reach`, found with a linked-cell search.
pub fn pairs_within(positions: &[Vec3], reach: f64) -> Vec<(u32, u32)> {
    if positions.is_empty() {
        return Vec::new();
    }
    let mut lo = [f64::INFINITY; 3];
    for p in positions {
        for d in 0..3 {
            lo[d] = lo[d].min(p[d]);
        }
    }
    let cell_of = |p: &Vec3| -> [i64; 3] {
        [
            ((p[0] - lo[0]) / reach).floor() as i64,
            ((p[1] - lo[1]) / reach).floor() as i64,
            ((p[2] - lo[2]) / reach).floor() as i64,
        ]
    };
    let mut cells: HashMap<[i64; 3], Vec<u32>> = HashMap::new();
    for (i, p) in positions.iter().enumerate() {
        cells.entry(cell_of(p)).or_default().push(i as u32);
    }
    let mut pairs = Vec::new();
    for (i, p) in positions.iter().enumerate() {
        let c = cell_of(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(members) = cells.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) else {
                        continue;
                    };
                    for &j in members {
                        if (j as usize) <= i {
                            continue;
                        }
                        let g = kernel::geometry(p, &positions[j as usize], Precision::Double);
                        if g.r < reach {
                            pairs.push((i as u32, j));
                        }
                    }
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Linked-cell neighbor search with `cutoff + skin` bins, then the same pair evaluation.
pub fn compute_forces_celllist(system: &AtomSystem, tables: &EamTables, skin: f64) -> Result<ForceResult> {
    if !(skin >= 0.0) {
        return Err(Error::Domain(format!("skin must be >= 0, got {skin}")));
    }
    let pairs = pairs_within(&system.positions, tables.cutoff + skin);
    evaluate_pairs(system, tables, &pairs, Precision::Double)
}

pub fn half_kick(system: &mut AtomSystem, forces: &[Vec3], dt: f64) {
    let factor = 0.5 * dt * FORCE_TO_ACCEL / system.mass;
    for (v, f) in system.velocities.iter_mut().zip(forces) {
        for d in 0..3 {
            v[d] += factor * f[d];
        }
    }
}

pub fn drift(system: &mut AtomSystem, dt: f64) {
    for (x, v) in system.positions.iter_mut().zip(&system.velocities) {
        for d in 0..3 {
            x[d] += dt * v[d];
        }
    }
}

/// One velocity Verlet step: half kick with `forces`, drift, re-evaluate with
/// `eval`, half kick with the new forces. Returns the new forces.
pub fn verlet_step<F>(system: &mut AtomSystem, forces: &ForceResult, dt: f64, mut eval: F) -> Result<ForceResult>
where
    F: FnMut(&AtomSystem) -> Result<ForceResult>,
{
    if !(dt >= 0.0) {
        return Err(Error::Domain(format!("timestep must be >= 0, got {dt}")));
    }
    half_kick(system, &forces.forces, dt);
    drift(system, dt);
    let next = eval(system)?;
    half_kick(system, &next.forces, dt);
    system.forces.clone_from(&next.forces);
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{TableGrid, TANTALUM};
    use crate::system::random_cluster;

    fn tantalum() -> EamTables {
        TANTALUM.tabulate(TableGrid::TANTALUM).unwrap()
    }

    fn dimer(r: f64) -> AtomSystem {
        AtomSystem::new("Ta", vec![[0.0; 3], [r, 0.0, 0.0]], 180.9479, [10.0; 3]).unwrap()
    }

    #[test]
    fn separated_pair_only_embeds_vacuum() {
        let t = tantalum();
        let res = compute_forces_bruteforce(&dimer(t.cutoff + 0.1), &t).unwrap();
        let f0 = t.embedding(0.0).unwrap().0;
        assert_eq!(res.potential_energy, 2.0 * f0);
        assert!(res.forces.iter().all(|f| *f == [0.0; 3]));
    }

    #[test]
    fn dimer_force_matches_finite_difference() {
        let t = tantalum();
        let r = 2.8;
        let h = 1e-5;
        let e = |r: f64| compute_forces_bruteforce(&dimer(r), &t).unwrap().potential_energy;
        let fd = -(e(r + h) - e(r - h)) / (2.0 * h);
        let f = compute_forces_bruteforce(&dimer(r), &t).unwrap().forces[1][0];
        assert!((f - fd).abs() <= 1e-6 * fd.abs(), "{f} vs {fd}");
    }

    #[test]
    fn coincident_atoms_are_rejected() {
        let t = tantalum();
        assert!(matches!(compute_forces_bruteforce(&dimer(0.05), &t), Err(Error::Domain(_))));
    }

    #[test]
    fn empty_system_is_vacuous() {
        let t = tantalum();
        let s = AtomSystem::new("Ta", vec![], 180.9, [1.0; 3]).unwrap();
        let res = compute_forces_celllist(&s, &t, 0.5).unwrap();
        assert_eq!(res.potential_energy, 0.0);
        assert!(res.forces.is_empty());
    }

    #[test]
    fn cell_list_matches_direct_loop() {
        let t = tantalum();
        for seed in 0..5 {
            let s = random_cluster(50, 0.05, 2.2, 180.9, seed).unwrap();
            let a = compute_forces_bruteforce(&s, &t).unwrap();
            for skin in [0.0, 0.5] {
                let b = compute_forces_celllist(&s, &t, skin).unwrap();
                assert!((a.potential_energy - b.potential_energy).abs() <= 1e-9 * a.potential_energy.abs());
                assert_eq!(a.forces, b.forces);
            }
        }
    }

    #[test]
    fn free_particles_drift() {
        let t = tantalum();
        let mut s = dimer(t.cutoff + 2.0);
        s.velocities = vec![[0.01, 0.0, -0.02], [0.0, 0.03, 0.0]];
        let f = compute_forces_bruteforce(&s, &t).unwrap();
        verlet_step(&mut s, &f, 2.0, |s| compute_forces_bruteforce(s, &t)).unwrap();
        assert_eq!(s.positions[0], [0.02, 0.0, -0.04]);
        assert_eq!(s.positions[1], [t.cutoff + 2.0, 0.06, 0.0]);
    }

    #[test]
    fn zero_timestep_is_identity() {
        let t = tantalum();
        let mut s = random_cluster(20, 0.05, 2.2, 180.9, 1).unwrap();
        s.init_velocities(300.0, 2).unwrap();
        let before = s.clone();
        let f = compute_forces_bruteforce(&s, &t).unwrap();
        verlet_step(&mut s, &f, 0.0, |s| compute_forces_bruteforce(s, &t)).unwrap();
        assert_eq!(s.positions, before.positions);
        assert_eq!(s.velocities, before.velocities);
    }

    #[test]
    fn dimer_at_equilibrium_stays_put() {
        let t = tantalum();
        let force = |r: f64| compute_forces_bruteforce(&dimer(r), &t).unwrap().forces[1][0];
        let (mut lo, mut hi) = (2.0, 3.5);
        assert!(force(lo) > 0.0 && force(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if force(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut s = dimer(lo);
        let start = s.positions.clone();
        let mut f = compute_forces_bruteforce(&s, &t).unwrap();
        for _ in 0..100 {
            f = verlet_step(&mut s, &f, 1.0, |s| compute_forces_bruteforce(s, &t)).unwrap();
        }
        for (a, b) in s.positions.iter().zip(&start) {
            assert!(crate::system::distance(a, b) < 1e-9);
        }
    }

    #[test]
    fn cold_slab_has_no_net_force() {
        use crate::system::{build_bcc_slab, SlabSpec};
        let t = tantalum();
        let spec = SlabSpec {
            cells_x: 4,
            cells_y: 4,
            cells_z: 4,
            lattice_constant: t.lattice_constant,
            temperature: 0.0,
            seed: 1,
        };
        let s = build_bcc_slab(&spec, "Ta", 180.9479).unwrap();
        let f = compute_forces_celllist(&s, &t, 0.5).unwrap();
        assert_eq!(s.momentum(), [0.0; 3]);
        for d in f.net_force() {
            assert!(d.abs() < 1e-10);
        }
    }
}
