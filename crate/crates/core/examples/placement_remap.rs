//! Places the Ta slab on the core mesh, scrambles it, and remaps it back.
//!
//! ```text
//! cargo run --release --example placement_remap -- 4
//! ```

use meshmd::eam::EamTables;
use meshmd::mapping::{assignment_cost, greedy_remap, project_and_place, CoreGrid};
use meshmd::system::{build_bcc_slab, SlabSpec};

fn main() -> meshmd::Result<()> {
    let k: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let t = EamTables::load_setfl("data/Ta.setfl")?;
    let spec = SlabSpec {
        lattice_constant: t.lattice_constant,
        ..SlabSpec::default()
    };
    let mut s = build_bcc_slab(&spec, &t.element, t.species_mass)?;
    let grid = CoreGrid::wse(k)?;
    let mut p = project_and_place(&s, grid, t.lattice_constant)?;
    let l = *p.layout();
    println!(
        "k={k} h={} stride={} capacity={} cells={}x{} rect={}x{}",
        grid.diagonal_spacing,
        grid.stride(),
        grid.capacity(),
        l.cells_x,
        l.cells_y,
        l.rect_w,
        l.rect_h
    );
    for line in p.dump().lines().take(6) {
        println!("  {line}");
    }
    let b = p.locality_bound(&s.positions, t.cutoff + 0.5);
    println!("locality bound: {} columns, {} rows", b.horizontal, b.vertical);

    println!("cost after placement: {:.3} A^2", assignment_cost(&p, &s));
    s.perturb(1.5, 7);
    let radius = l.rect_w.max(l.rect_h);
    for round in 1.. {
        let out = greedy_remap(&mut p, &s, radius)?;
        println!(
            "round {round}: {:>4} swaps, cost {:.3} -> {:.3} A^2",
            out.swaps.len(),
            out.cost_before,
            out.cost_after
        );
        if out.swaps.is_empty() {
            break;
        }
    }
    println!("fixed point: {} beneficial swaps left", p.beneficial_swaps(&s, radius).len());
    Ok(())
}
