//! Pair kernels and fixed-order reductions shared by both force engines.
//!
//! Every pair is evaluated as `(lo, hi)` with `lo < hi` and separation vector
//! `x_hi - x_lo`, and each atom sums its pair contributions in ascending partner
//! id. Any engine that routes the same pair values through these reductions
//! produces bit-identical densities, energies and forces.

use crate::eam::{EamTables, PairTerms, Precision};
use crate::error::Result;
use crate::system::Vec3;

#[derive(Debug, Clone, Copy)]
pub struct PairGeometry {
    /// `x_hi - x_lo`
    pub d: Vec3,
    pub r: f64,
}

#[inline]
pub fn geometry(lo: &Vec3, hi: &Vec3, p: Precision) -> PairGeometry {
    let d = [
        p.round(hi[0] - lo[0]),
        p.round(hi[1] - lo[1]),
        p.round(hi[2] - lo[2]),
    ];
    let r2 = p.round(p.round(p.round(d[0] * d[0]) + p.round(d[1] * d[1])) + p.round(d[2] * d[2]));
    PairGeometry { d, r: p.round(r2.sqrt()) }
}

/// Pair terms when the pair lies inside the cutoff.
#[inline]
pub fn pair_terms(tables: &EamTables, g: &PairGeometry, p: Precision) -> Result<Option<PairTerms>> {
    if g.r >= tables.cutoff {
        return Ok(None);
    }
    tables.pair_terms_in(g.r, p).map(Some)
}

/// Force on `lo` from the pair; the force on `hi` is its negation.
#[inline]
pub fn pair_force(t: &PairTerms, g: &PairGeometry, fp_lo: f64, fp_hi: f64, p: Precision) -> Vec3 {
    let du_dr = p.round(t.dphi_dr + p.round(p.round(fp_lo + fp_hi) * t.drho_dr));
    let scale = p.round(du_dr / g.r);
    [
        p.round(scale * g.d[0]),
        p.round(scale * g.d[1]),
        p.round(scale * g.d[2]),
    ]
}

/// A value sent to `atom` about its pair with `partner`.
#[derive(Debug, Clone, Copy)]
pub struct Message<T> {
    pub atom: u32,
    pub partner: u32,
    pub value: T,
}

/// Payload of the second exchange: force on `atom` and its half of the pair energy.
#[derive(Debug, Clone, Copy)]
pub struct ForcePart {
    pub force: Vec3,
    pub half_phi: f64,
}

fn sort_messages<T>(msgs: &mut [Message<T>]) {
    msgs.sort_unstable_by_key(|m| (m.atom, m.partner));
}

/// Per-atom sums of scalar messages in ascending partner order.
pub fn reduce_scalar(n: usize, msgs: &mut [Message<f64>], p: Precision) -> Vec<f64> {
    sort_messages(msgs);
    let mut out = vec![0.0; n];
    for m in msgs.iter() {
        let acc = &mut out[m.atom as usize];
        *acc = p.round(*acc + m.value);
    }
    out
}

/// Per-atom force and pair-energy sums in ascending partner order.
pub fn reduce_forces(n: usize, msgs: &mut [Message<ForcePart>], p: Precision) -> (Vec<Vec3>, Vec<f64>) {
    sort_messages(msgs);
    let mut forces = vec![[0.0; 3]; n];
    let mut pair_energy = vec![0.0; n];
    for m in msgs.iter() {
        let i = m.atom as usize;
        for (acc, f) in forces[i].iter_mut().zip(m.value.force) {
            *acc = p.round(*acc + f);
        }
        pair_energy[i] = p.round(pair_energy[i] + m.value.half_phi);
    }
    (forces, pair_energy)
}

/// Embedding energy and slope for every atom.
pub fn embed_all(tables: &EamTables, density: &[f64], p: Precision) -> Result<Vec<(f64, f64)>> {
    density.iter().map(|&rho| tables.embedding_in(rho, p)).collect()
}

/// Per-atom energies `F(rho_i) + sum_j phi_ij / 2` and their total, summed in atom order.
pub fn total_energy(embedding: &[(f64, f64)], pair_energy: &[f64], p: Precision) -> (Vec<f64>, f64) {
    let per_atom: Vec<f64> = embedding
        .iter()
        .zip(pair_energy)
        .map(|(&(f, _), &e)| p.round(f + e))
        .collect();
    let total = per_atom.iter().fold(0.0, |acc, &e| p.round(acc + e));
    (per_atom, total)
}
