use std::path::PathBuf;

use meshmd::analytic::{bcc_equilibrium_lattice, TableGrid, TANTALUM, TUNGSTEN};
use meshmd::eam::EamTables;

fn bundled(element: &str) -> (PathBuf, String) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../data/{element}.setfl"));
    let text = std::fs::read_to_string(&path).unwrap();
    (path, text)
}

#[test]
fn bundled_files_match_regenerated_tables() {
    for (p, grid) in [(&TANTALUM, TableGrid::TANTALUM), (&TUNGSTEN, TableGrid::TUNGSTEN)] {
        let (_, text) = bundled(p.element);
        assert_eq!(p.tabulate(grid).unwrap().to_setfl(), text, "{}", p.element);
    }
}

#[test]
fn cutoff_is_the_fifth_header_field() {
    for el in ["Ta", "W"] {
        let (path, text) = bundled(el);
        let field: f64 = text.lines().nth(4).unwrap().split_whitespace().nth(4).unwrap().parse().unwrap();
        assert_eq!(EamTables::load_setfl(&path).unwrap().cutoff, field);
    }
}

#[test]
fn header_lattice_constant_is_the_bcc_minimum() {
    for el in ["Ta", "W"] {
        let t = EamTables::load_setfl(bundled(el).0).unwrap();
        let a = bcc_equilibrium_lattice(&t, t.lattice_constant * 1.01).unwrap();
        assert!((a - t.lattice_constant).abs() < 1e-6, "{el}: {a} vs {}", t.lattice_constant);
    }
}
