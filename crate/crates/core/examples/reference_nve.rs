//! NVE run of the 432-atom Ta slab with the serial cell-list engine.
//!
//! ```text
//! cargo run --release --example reference_nve -- 2000
//! ```

use meshmd::eam::EamTables;
use meshmd::reference::{compute_forces_celllist, verlet_step};
use meshmd::system::{build_bcc_slab, SlabSpec};

fn main() -> meshmd::Result<()> {
    let steps: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    let t = EamTables::load_setfl("data/Ta.setfl")?;
    let spec = SlabSpec {
        lattice_constant: t.lattice_constant,
        ..SlabSpec::default()
    };
    let mut s = build_bcc_slab(&spec, &t.element, t.species_mass)?;
    let skin = 0.5;
    let mut f = compute_forces_celllist(&s, &t, skin)?;
    let e0 = f.potential_energy + s.kinetic_energy();
    println!("{:>6} {:>14} {:>14} {:>10}", "step", "E_total (eV)", "dE/N (eV)", "T (K)");
    for step in 1..=steps {
        f = verlet_step(&mut s, &f, 1.0, |s| compute_forces_celllist(s, &t, skin))?;
        if step % (steps / 10).max(1) == 0 {
            let e = f.potential_energy + s.kinetic_energy();
            println!("{step:>6} {e:>14.6} {:>14.3e} {:>10.2}", (e - e0) / s.len() as f64, s.temperature());
        }
    }
    let p = s.momentum();
    println!("final momentum {:.3e} {:.3e} {:.3e}", p[0], p[1], p[2]);
    Ok(())
}
