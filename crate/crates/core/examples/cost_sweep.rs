//! Calibrates the cycle model to 743 cycles for Ta at four cores per atom,
//! then sweeps k = 1..6 for Ta and W with the same coefficients.
//!
//! ```text
//! cargo run --release --example cost_sweep -- 16
//! ```

use meshmd::eam::EamTables;
use meshmd::engine::{estimate_cost, plan_stats, EngineConfig, FabricModel};
use meshmd::mapping::CoreGrid;
use meshmd::system::{build_bcc_slab, AtomSystem, SlabSpec};

fn slab(t: &EamTables, n: usize) -> meshmd::Result<AtomSystem> {
    let spec = SlabSpec {
        cells_x: n,
        cells_y: n,
        cells_z: 6,
        lattice_constant: t.lattice_constant,
        temperature: 0.0,
        seed: 1,
    };
    build_bcc_slab(&spec, &t.element, t.species_mass)
}

fn main() -> meshmd::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(16);
    let ta = EamTables::load_setfl("data/Ta.setfl")?;
    let w = EamTables::load_setfl("data/W.setfl")?;
    let cfg = EngineConfig::default();
    let (s_ta, s_w) = (slab(&ta, n)?, slab(&w, n)?);

    let anchor = plan_stats(&s_ta, &ta, CoreGrid::wse(4)?, &cfg)?;
    let fabric = FabricModel::default().calibrated(&anchor, 743.0)?;
    println!(
        "calibrated: {:.2} cycles/arrival, {:.2} cycles/interaction, {:.1} fixed",
        fabric.cost_per_arrival, fabric.cost_per_interaction, fabric.cost_fixed
    );
    println!("{:>3} {:>9} {:>8} {:>12} {:>8} {:>12}", "k", "N_max", "Ta cyc", "Ta steps/s", "W cyc", "W steps/s");
    for k in 1..=6 {
        let grid = CoreGrid::wse(k)?;
        let a = estimate_cost(&plan_stats(&s_ta, &ta, grid, &cfg)?, &fabric);
        let b = estimate_cost(&plan_stats(&s_w, &w, grid, &cfg)?, &fabric);
        println!(
            "{k:>3} {:>9} {:>8} {:>12.0} {:>8} {:>12.0}",
            grid.capacity(),
            a.total_cycles,
            a.steps_per_second,
            b.total_cycles,
            b.steps_per_second
        );
    }
    Ok(())
}
