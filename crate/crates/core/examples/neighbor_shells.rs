//! Loads a setfl file and counts BCC neighbor shells inside its cutoff.
//!
//! ```text
//! cargo run --example neighbor_shells -- data/W.setfl
//! ```

use meshmd::eam::EamTables;
use meshmd::system::{build_bcc_slab, distance, SlabSpec};

fn main() -> meshmd::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "data/Ta.setfl".into());
    let t = EamTables::load_setfl(&path)?;
    println!("{} ({}), cutoff {} A, a = {:.4} A", t.element, path, t.cutoff, t.lattice_constant);

    for r in [2.0, 2.5, 3.0, 3.5, 4.0, 5.0] {
        if r < t.cutoff {
            let p = t.pair_terms(r)?;
            println!("  r = {r:.1}: phi = {:+.5} eV  rho = {:.5}", p.phi, p.rho);
        }
    }

    let spec = SlabSpec {
        cells_x: 8,
        cells_y: 8,
        cells_z: 8,
        lattice_constant: t.lattice_constant,
        temperature: 0.0,
        seed: 1,
    };
    let s = build_bcc_slab(&spec, &t.element, t.species_mass)?;
    let centre = [4.0 * t.lattice_constant; 3];
    let i = (0..s.len())
        .min_by(|&a, &b| distance(&s.positions[a], &centre).total_cmp(&distance(&s.positions[b], &centre)))
        .unwrap();
    let mut d: Vec<f64> = (0..s.len())
        .filter(|&j| j != i)
        .map(|j| distance(&s.positions[i], &s.positions[j]))
        .filter(|&r| r < t.cutoff)
        .collect();
    d.sort_by(f64::total_cmp);
    println!("interior atom {i}: {} neighbors within the cutoff", d.len());
    let mut shell_start = 0;
    for k in 1..=d.len() {
        if k == d.len() || d[k] - d[shell_start] > 1e-6 {
            println!("  shell at {:.4} A: {} atoms", d[shell_start], k - shell_start);
            shell_start = k;
        }
    }
    Ok(())
}
