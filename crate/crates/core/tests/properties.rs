use std::path::PathBuf;
use std::sync::OnceLock;

use proptest::prelude::*;

use meshmd::eam::{EamTables, Precision};
use meshmd::engine::{EngineConfig, FabricModel, WaferEngine};
use meshmd::mapping::{project_and_place, Core, CoreGrid};
use meshmd::nt::{assign_pair, ArmReach, TShape};
use meshmd::reference::{compute_forces_bruteforce, compute_forces_celllist};
use meshmd::system::random_cluster;

fn tantalum() -> &'static EamTables {
    static T: OnceLock<EamTables> = OnceLock::new();
    T.get_or_init(|| {
        EamTables::load_setfl(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/Ta.setfl")).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn net_force_vanishes(seed in 0u64..10_000, n in 2usize..120) {
        let t = tantalum();
        let s = random_cluster(n, 0.05, 2.2, t.species_mass, seed).unwrap();
        let f = compute_forces_bruteforce(&s, t).unwrap();
        let scale = f.forces.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
        for d in f.net_force() {
            prop_assert!(d.abs() < 1e-10 * scale * n as f64);
        }
    }

    #[test]
    fn forces_are_the_energy_gradient(seed in 0u64..10_000, n in 2usize..40, atom in 0usize..40, axis in 0usize..3) {
        let t = tantalum();
        let s = random_cluster(n, 0.05, 2.2, t.species_mass, seed).unwrap();
        let i = atom % n;
        let h = 1e-5;
        let energy = |dx: f64| {
            let mut s = s.clone();
            s.positions[i][axis] += dx;
            compute_forces_bruteforce(&s, t).unwrap().potential_energy
        };
        let numeric = -(energy(h) - energy(-h)) / (2.0 * h);
        let analytic = compute_forces_bruteforce(&s, t).unwrap().forces[i][axis];
        prop_assert!((numeric - analytic).abs() < 1e-5 * (1.0 + analytic.abs()), "{numeric} vs {analytic}");
    }

    #[test]
    fn cell_list_matches_brute_force(seed in 0u64..10_000, n in 1usize..200) {
        let t = tantalum();
        let s = random_cluster(n, 0.05, 2.2, t.species_mass, seed).unwrap();
        let a = compute_forces_bruteforce(&s, t).unwrap();
        let b = compute_forces_celllist(&s, t, 0.5).unwrap();
        prop_assert_eq!(a.forces, b.forces);
        prop_assert_eq!(a.potential_energy, b.potential_energy);
    }

    #[test]
    fn wafer_forces_are_independent_of_layout(
        seed in 0u64..10_000,
        n in 1usize..150,
        k in 1usize..7,
        h in 0usize..4,
        width in 2.0f64..5.0,
    ) {
        let t = tantalum();
        let s = random_cluster(n, 0.05, 2.2, t.species_mass, seed).unwrap();
        let oracle = compute_forces_bruteforce(&s, t).unwrap();
        let config = EngineConfig { cell_width: Some(width), ..EngineConfig::default() };
        let grid = CoreGrid::new(256, 256, k, Some(h)).unwrap();
        let e = WaferEngine::new(s, t.clone(), grid, config, FabricModel::default()).unwrap();
        prop_assert_eq!(&e.forces().forces, &oracle.forces);
        prop_assert_eq!(e.forces().potential_energy, oracle.potential_energy);
    }

    #[test]
    fn single_precision_stays_close(seed in 0u64..10_000, n in 2usize..100) {
        let t = tantalum();
        let s = random_cluster(n, 0.05, 2.2, t.species_mass, seed).unwrap();
        let oracle = compute_forces_bruteforce(&s, t).unwrap();
        let config = EngineConfig { precision: Precision::Single, ..EngineConfig::default() };
        let e = WaferEngine::new(s, t.clone(), CoreGrid::new(128, 128, 2, None).unwrap(), config, FabricModel::default()).unwrap();
        let scale = oracle.forces.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-3);
        for (a, b) in e.forces().forces.iter().flatten().zip(oracle.forces.iter().flatten()) {
            prop_assert!((a - b).abs() <= 1e-4 * scale);
        }
    }

    #[test]
    fn worker_lies_on_both_routes(
        ac in 0usize..40, ar in 0usize..40, bc in 0usize..40, br in 0usize..40,
        lh in 0usize..12, lv in 0usize..12,
    ) {
        let grid = CoreGrid::new(40, 40, 1, None).unwrap();
        let reach = ArmReach { horizontal: lh, vertical: lv };
        let (a, b) = (Core::new(ac, ar), Core::new(bc, br));
        match assign_pair(a, b, reach) {
            Ok(w) => {
                prop_assert_eq!(assign_pair(b, a, reach).unwrap(), w);
                prop_assert!(TShape::new(a, reach, &grid).contains(w));
                prop_assert!(TShape::new(b, reach, &grid).contains(w));
                let common = grid_cores(&grid)
                    .filter(|&c| TShape::new(a, reach, &grid).contains(c) && TShape::new(b, reach, &grid).contains(c))
                    .count();
                prop_assert!(common >= 1);
            }
            Err(_) => prop_assert!(ac.abs_diff(bc) > lh || ar.abs_diff(br) > lv),
        }
    }

    #[test]
    fn capacity_counts_owner_slots(w in 1usize..60, h in 1usize..60, k in 1usize..7, spacing in 0usize..6) {
        prop_assume!(k <= w);
        let grid = CoreGrid::new(w, h, k, Some(spacing)).unwrap();
        let slots = grid_cores(&grid).filter(|&c| grid.is_owner_slot(c)).count();
        prop_assert_eq!(grid.capacity(), slots);
    }

    #[test]
    fn placement_is_a_bijection(seed in 0u64..10_000, n in 0usize..300, k in 1usize..5) {
        let s = random_cluster(n, 0.05, 2.0, 1.0, seed).unwrap();
        let p = project_and_place(&s, CoreGrid::new(400, 400, k, None).unwrap(), 3.3).unwrap();
        let mut owners = p.owners();
        for (i, &o) in owners.iter().enumerate() {
            prop_assert!(p.grid().is_owner_slot(o));
            prop_assert_eq!(p.atom_at(o), Some(i));
            prop_assert_eq!(p.group(i).len(), k);
        }
        owners.sort();
        owners.dedup();
        prop_assert_eq!(owners.len(), n);
    }
}

fn grid_cores(grid: &CoreGrid) -> impl Iterator<Item = Core> + '_ {
    (0..grid.height).flat_map(move |r| (0..grid.width).map(move |c| Core::new(c, r)))
}

#[test]
fn setfl_round_trip_is_exact() {
    let t = tantalum();
    let back = EamTables::parse_setfl(&t.to_setfl(), "round trip").unwrap();
    assert_eq!(back.to_setfl(), t.to_setfl());
    for r in [1.7, 2.5, 2.8612, 3.3, 4.0] {
        assert_eq!(back.pair_terms(r).unwrap(), t.pair_terms(r).unwrap());
    }
}
