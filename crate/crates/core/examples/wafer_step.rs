//! Runs the mesh engine at several cores-per-atom settings and checks that
//! forces and trajectories match the serial reference bit for bit.
//!
//! ```text
//! cargo run --release --example wafer_step -- 50
//! ```

use meshmd::eam::EamTables;
use meshmd::engine::{EngineConfig, FabricModel, WaferEngine};
use meshmd::mapping::CoreGrid;
use meshmd::reference::compute_forces_celllist;
use meshmd::system::{build_bcc_slab, SlabSpec};

fn main() -> meshmd::Result<()> {
    let steps: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let t = EamTables::load_setfl("data/Ta.setfl")?;
    let spec = SlabSpec {
        lattice_constant: t.lattice_constant,
        ..SlabSpec::default()
    };
    let s = build_bcc_slab(&spec, &t.element, t.species_mass)?;
    let oracle = compute_forces_celllist(&s, &t, 0.5)?;

    let mut finals = Vec::new();
    for k in [1, 2, 4] {
        let grid = CoreGrid::wse(k)?;
        let mut e = WaferEngine::new(s.clone(), t.clone(), grid, EngineConfig::default(), FabricModel::default())?;
        let same = e.forces().forces == oracle.forces;
        let st = e.plan().stats;
        let summary = e.run(steps)?;
        let last = summary.records.last().unwrap();
        println!(
            "k={k}: forces == reference: {same}, workers {}, max pairs/worker {}, E after {steps} steps {:.9} eV, {} cycles/step",
            st.workers, st.max_pairs, last.total_energy, last.total_cycles
        );
        finals.push(e.system().positions.clone());
    }
    println!("trajectories identical across k: {}", finals.windows(2).all(|w| w[0] == w[1]));
    Ok(())
}
