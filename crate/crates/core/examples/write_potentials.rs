//! Tabulates the bundled Ta and W potentials and writes them as setfl files.
//!
//! ```text
//! cargo run --example write_potentials -- [out_dir]
//! ```

use std::path::PathBuf;

use meshmd::analytic::{TableGrid, TANTALUM, TUNGSTEN};

fn main() -> meshmd::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"));
    std::fs::create_dir_all(&dir).map_err(|e| meshmd::Error::Io { path: dir.clone(), source: e })?;
    for (p, grid) in [(&TANTALUM, TableGrid::TANTALUM), (&TUNGSTEN, TableGrid::TUNGSTEN)] {
        let tables = p.tabulate(grid)?;
        let path = dir.join(format!("{}.setfl", p.element));
        tables.write_setfl(&path)?;
        println!(
            "{}: cutoff {} A, lattice constant {:.6} A -> {}",
            p.element,
            tables.cutoff,
            tables.lattice_constant,
            path.display()
        );
    }
    Ok(())
}
