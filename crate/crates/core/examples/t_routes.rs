//! T-shaped routes and neutral-territory pair workers for a small slab.
//!
//! ```text
//! cargo run --example t_routes
//! ```

use meshmd::eam::EamTables;
use meshmd::mapping::{project_and_place, Core, CoreGrid};
use meshmd::nt::{assign_all, assign_pair, audit_coverage, build_tshapes, dump_assignments, ArmReach};
use meshmd::system::{build_bcc_slab, SlabSpec};

fn main() -> meshmd::Result<()> {
    let reach = ArmReach {
        horizontal: 4,
        vertical: 4,
    };
    for (a, b) in [((3, 5), (3, 5)), ((3, 5), (7, 2)), ((3, 5), (6, 5))] {
        let w = assign_pair(Core::new(a.0, a.1), Core::new(b.0, b.1), reach)?;
        println!("owners {a:?} and {b:?} meet at {w}");
    }

    let t = EamTables::load_setfl("data/Ta.setfl")?;
    let spec = SlabSpec {
        cells_x: 3,
        cells_y: 3,
        cells_z: 2,
        lattice_constant: t.lattice_constant,
        temperature: 0.0,
        seed: 1,
    };
    let s = build_bcc_slab(&spec, &t.element, t.species_mass)?;
    let p = project_and_place(&s, CoreGrid::new(64, 64, 2, None)?, t.lattice_constant)?;
    let routes = build_tshapes(&p, &s.positions, t.cutoff + 0.5)?;
    print!("{}", routes.dump().lines().take(8).collect::<Vec<_>>().join("\n"));
    println!("\n...");
    let pairs = assign_all(&p, &routes, &s.positions, t.cutoff)?;
    print!("{}", dump_assignments(&pairs[..pairs.len().min(8)]));
    println!("{} pairs within the cutoff", pairs.len());
    let violations = audit_coverage(&p, &routes, &s.positions, t.cutoff);
    println!("coverage violations: {}", violations.len());
    Ok(())
}
