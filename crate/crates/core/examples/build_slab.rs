//! Builds the 432-atom Ta benchmark slab at 300 K and writes it as XYZ.
//!
//! ```text
//! cargo run --example build_slab -- slab.xyz
//! ```

use meshmd::eam::EamTables;
use meshmd::system::{build_bcc_slab, slab_is_thin, SlabSpec};

fn main() -> meshmd::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "slab.xyz".into());
    let t = EamTables::load_setfl("data/Ta.setfl")?;
    let spec = SlabSpec {
        lattice_constant: t.lattice_constant,
        ..SlabSpec::default()
    };
    let s = build_bcc_slab(&spec, &t.element, t.species_mass)?;
    let p = s.momentum();
    println!("{} atoms, box {:.3?} A", s.len(), s.box_extent);
    println!("T = {:.3} K, |p| = {:.3e} amu A/fs", s.temperature(), (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt());
    if slab_is_thin(&spec, t.cutoff) {
        println!("note: slab is narrower than two cutoffs in x or y");
    }
    s.write_xyz(&out, "Ta BCC slab, 300 K")?;
    println!("wrote {out}");
    Ok(())
}
