//! Neutral-territory routing: T-shaped multicast regions, unique pair workers,
//! and worker-side neighbor lists.
//!
//! Each owner core multicasts its atom west and east along its row and down
//! (towards larger row indices) along its column. A pair whose owners sit on
//! different rows meets at `(column of the upper owner, row of the lower
//! owner)`; a pair on one row meets at the western owner. On the diagonal
//! layout those meeting points fall on empty cores as often as on occupied
//! ones, which is where the multi-core-per-atom speedup comes from.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::eam::Precision;
use crate::error::{Error, Result};
use crate::kernel;
use crate::mapping::{Core, CoreGrid, LocalityBound, Placement};
use crate::reference::pairs_within;
use crate::system::Vec3;

/// Maximum column and row offsets between the owners of any two atoms that
/// can interact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArmReach {
    pub horizontal: usize,
    pub vertical: usize,
}

impl From<LocalityBound> for ArmReach {
    fn from(b: LocalityBound) -> Self {
        ArmReach {
            horizontal: b.horizontal,
            vertical: b.vertical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TShape {
    pub origin: Core,
    pub arm_west: usize,
    pub arm_east: usize,
    pub arm_down: usize,
    /// Some arm was shortened by the grid edge.
    pub clipped: bool,
}

impl TShape {
    pub fn new(origin: Core, reach: ArmReach, grid: &CoreGrid) -> Self {
        let arm_west = reach.horizontal.min(origin.col);
        let arm_east = reach.horizontal.min(grid.width - 1 - origin.col);
        let arm_down = reach.vertical.min(grid.height - 1 - origin.row);
        TShape {
            origin,
            arm_west,
            arm_east,
            arm_down,
            clipped: arm_west < reach.horizontal || arm_east < reach.horizontal || arm_down < reach.vertical,
        }
    }

    pub fn contains(&self, c: Core) -> bool {
        let o = self.origin;
        if c.row == o.row {
            c.col + self.arm_west >= o.col && c.col <= o.col + self.arm_east
        } else {
            c.col == o.col && c.row > o.row && c.row <= o.row + self.arm_down
        }
    }

    /// Every core the multicast reaches, the origin first.
    pub fn cores(&self) -> impl Iterator<Item = Core> + '_ {
        let o = self.origin;
        let west = (1..=self.arm_west).map(move |d| Core::new(o.col - d, o.row));
        let east = (1..=self.arm_east).map(move |d| Core::new(o.col + d, o.row));
        let down = (1..=self.arm_down).map(move |d| Core::new(o.col, o.row + d));
        std::iter::once(o).chain(west).chain(east).chain(down)
    }

    /// Links used by the multicast; each is traversed once.
    pub fn link_count(&self) -> usize {
        self.arm_west + self.arm_east + self.arm_down
    }

    /// Hops to the furthest reached core.
    pub fn depth(&self) -> usize {
        self.arm_west.max(self.arm_east).max(self.arm_down)
    }
}

/// The T shape of every atom for one placement.
#[derive(Debug, Clone)]
pub struct Routes {
    pub grid: CoreGrid,
    pub bound: LocalityBound,
    pub reach: ArmReach,
    /// Indexed by atom.
    pub shapes: Vec<TShape>,
}

/// Builds one T per atom with arms from the placement's locality bound at
/// `reach` (cutoff + skin).
pub fn build_tshapes(placement: &Placement, positions: &[Vec3], reach: f64) -> Result<Routes> {
    let grid = *placement.grid();
    let bound = placement.locality_bound(positions, reach);
    if bound.horizontal >= grid.width || bound.vertical >= grid.height {
        return Err(Error::Config(format!(
            "T arms ({} horizontal, {} vertical) do not fit the {}x{} grid",
            bound.horizontal, bound.vertical, grid.width, grid.height
        )));
    }
    let arms = ArmReach::from(bound);
    let shapes = (0..placement.len())
        .map(|a| TShape::new(placement.owner(a), arms, &grid))
        .collect();
    Ok(Routes {
        grid,
        bound,
        reach: arms,
        shapes,
    })
}

impl Routes {
    /// Shortens every arm by `cores`. Only useful for exercising coverage
    /// failures.
    pub fn trim_arms(&mut self, cores: usize) {
        for t in &mut self.shapes {
            t.arm_west = t.arm_west.saturating_sub(cores);
            t.arm_east = t.arm_east.saturating_sub(cores);
            t.arm_down = t.arm_down.saturating_sub(cores);
        }
    }

    /// Line-oriented dump: a header, then `T atom col row west east down clipped`.
    pub fn dump(&self) -> String {
        let mut s = format!(
            "# routes width={} height={} horizontal={} vertical={}\n",
            self.grid.width, self.grid.height, self.reach.horizontal, self.reach.vertical
        );
        for (a, t) in self.shapes.iter().enumerate() {
            writeln!(
                s,
                "T {a} {} {} {} {} {} {}",
                t.origin.col, t.origin.row, t.arm_west, t.arm_east, t.arm_down, t.clipped as u8
            )
            .unwrap();
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairAssignment {
    pub worker: Core,
    pub atom_a: u32,
    pub atom_b: u32,
}

/// The unique core that handles the pair owned by `a` and `b`.
pub fn assign_pair(a: Core, b: Core, reach: ArmReach) -> Result<Core> {
    if a.col.abs_diff(b.col) > reach.horizontal || a.row.abs_diff(b.row) > reach.vertical {
        return Err(Error::OutOfReach { a, b });
    }
    Ok(if a.row == b.row {
        if a.col <= b.col { a } else { b }
    } else if a.row < b.row {
        Core::new(a.col, b.row)
    } else {
        Core::new(b.col, a.row)
    })
}

/// Assignments for every pair closer than `within`.
pub fn assign_all(placement: &Placement, routes: &Routes, positions: &[Vec3], within: f64) -> Result<Vec<PairAssignment>> {
    pairs_within(positions, within)
        .into_iter()
        .map(|(a, b)| {
            let worker = assign_pair(placement.owner(a as usize), placement.owner(b as usize), routes.reach)?;
            Ok(PairAssignment {
                worker,
                atom_a: a,
                atom_b: b,
            })
        })
        .collect()
}

pub fn dump_assignments(pairs: &[PairAssignment]) -> String {
    let mut s = String::new();
    for p in pairs {
        writeln!(s, "P {} {} {} {}", p.atom_a, p.atom_b, p.worker.col, p.worker.row).unwrap();
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageViolation {
    pub atom_a: u32,
    pub atom_b: u32,
    pub worker: Option<Core>,
    pub reason: String,
}

/// Checks that every pair closer than `cutoff` has a worker inside both T
/// shapes.
pub fn audit_coverage(placement: &Placement, routes: &Routes, positions: &[Vec3], cutoff: f64) -> Vec<CoverageViolation> {
    let mut out = Vec::new();
    for (a, b) in pairs_within(positions, cutoff) {
        let (ca, cb) = (placement.owner(a as usize), placement.owner(b as usize));
        match assign_pair(ca, cb, routes.reach) {
            Err(e) => out.push(CoverageViolation {
                atom_a: a,
                atom_b: b,
                worker: None,
                reason: e.to_string(),
            }),
            Ok(w) => {
                let missing: Vec<u32> = [a, b]
                    .into_iter()
                    .filter(|&x| !routes.shapes[x as usize].contains(w))
                    .collect();
                if !missing.is_empty() {
                    out.push(CoverageViolation {
                        atom_a: a,
                        atom_b: b,
                        worker: Some(w),
                        reason: format!("worker {w} is outside the T of atom(s) {missing:?}"),
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NeighborList {
    /// Ordinal pairs into the worker's arrival stream.
    pub pairs: Vec<(u32, u32)>,
    /// Å
    pub skin: f64,
    /// Steps since the list was built.
    pub stale_counter: usize,
    /// Candidate pairs examined when the list was built.
    pub screened: usize,
}

/// Screens the arrival stream of `worker` (atom ids in arrival order, with
/// their owners) for the pairs it handles that lie closer than `reach`.
pub fn screen_candidates(
    worker: Core,
    arrivals: &[u32],
    owners: &[Core],
    positions: &[Vec3],
    arms: ArmReach,
    reach: f64,
    skin: f64,
) -> Result<NeighborList> {
    // Every pair handled here has an owner on the worker's row.
    let on_row: Vec<usize> = (0..arrivals.len())
        .filter(|&i| owners[arrivals[i] as usize].row == worker.row)
        .collect();
    let mut pairs = Vec::new();
    let mut screened = 0;
    for &i in &on_row {
        for j in 0..arrivals.len() {
            if j == i || (j < i && owners[arrivals[j] as usize].row == worker.row) {
                continue;
            }
            screened += 1;
            let (x, y) = (arrivals[i] as usize, arrivals[j] as usize);
            let (lo, hi) = if x < y { (x, y) } else { (y, x) };
            let g = kernel::geometry(&positions[lo], &positions[hi], Precision::Double);
            if g.r >= reach {
                continue;
            }
            if assign_pair(owners[x], owners[y], arms)? == worker {
                pairs.push((i.min(j) as u32, i.max(j) as u32));
            }
        }
    }
    pairs.sort_unstable();
    Ok(NeighborList {
        pairs,
        skin,
        stale_counter: 0,
        screened,
    })
}

/// True once any atom has moved more than half the skin since `last_build`.
pub fn needs_rebuild(positions: &[Vec3], last_build: &[Vec3], skin: f64) -> bool {
    if positions.len() != last_build.len() || !(skin > 0.0) {
        return true;
    }
    let limit = 0.25 * skin * skin;
    positions.iter().zip(last_build).any(|(p, q)| {
        let d = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
        d[0] * d[0] + d[1] * d[1] + d[2] * d[2] > limit
    })
}

/// Per-core arrival streams: for each reached core, the atoms whose T covers
/// it in ascending owner linear index.
pub fn arrival_streams(placement: &Placement, routes: &Routes) -> Vec<(Core, Vec<u32>)> {
    let grid = placement.grid();
    let mut order: Vec<u32> = (0..placement.len() as u32).collect();
    order.sort_by_key(|&a| grid.linear(placement.owner(a as usize)));
    let mut index: HashMap<Core, usize> = HashMap::new();
    let mut streams: Vec<(Core, Vec<u32>)> = Vec::new();
    for &a in &order {
        for c in routes.shapes[a as usize].cores() {
            let w = *index.entry(c).or_insert_with(|| {
                streams.push((c, Vec::new()));
                streams.len() - 1
            });
            streams[w].1.push(a);
        }
    }
    streams.sort_by_key(|(c, _)| grid.linear(*c));
    streams
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::project_and_place;
    use crate::system::{random_cluster, AtomSystem};

    fn t_set(t: &TShape) -> std::collections::BTreeSet<Core> {
        t.cores().collect()
    }

    #[test]
    fn worker_rules() {
        let r = ArmReach {
            horizontal: 4,
            vertical: 4,
        };
        let (a, b) = (Core::new(3, 5), Core::new(7, 2));
        assert_eq!(assign_pair(a, a, r).unwrap(), a);
        assert_eq!(assign_pair(a, b, r).unwrap(), Core::new(7, 5));
        assert_eq!(assign_pair(b, a, r).unwrap(), Core::new(7, 5));
        assert_eq!(assign_pair(a, Core::new(6, 5), r).unwrap(), a);
        assert!(matches!(assign_pair(a, Core::new(8, 5), r), Err(Error::OutOfReach { .. })));
    }

    #[test]
    fn t_intersection_is_the_worker() {
        let grid = CoreGrid::new(20, 20, 1, None).unwrap();
        let r = ArmReach {
            horizontal: 4,
            vertical: 4,
        };
        let ta = TShape::new(Core::new(3, 5), r, &grid);
        let tb = TShape::new(Core::new(7, 2), r, &grid);
        let both: Vec<Core> = t_set(&ta).intersection(&t_set(&tb)).copied().collect();
        assert_eq!(both, vec![Core::new(7, 5)]);
    }

    #[test]
    fn worker_lies_in_both_shapes_exhaustively() {
        let grid = CoreGrid::new(13, 13, 1, None).unwrap();
        let r = ArmReach {
            horizontal: 3,
            vertical: 2,
        };
        for a in 0..169 {
            for b in 0..169 {
                let (ca, cb) = (Core::new(a % 13, a / 13), Core::new(b % 13, b / 13));
                let Ok(w) = assign_pair(ca, cb, r) else {
                    continue;
                };
                assert!(TShape::new(ca, r, &grid).contains(w), "{ca} {cb}");
                assert!(TShape::new(cb, r, &grid).contains(w), "{ca} {cb}");
            }
        }
    }

    #[test]
    fn shape_geometry() {
        let grid = CoreGrid::new(10, 10, 1, None).unwrap();
        let r = ArmReach {
            horizontal: 3,
            vertical: 2,
        };
        let t = TShape::new(Core::new(5, 5), r, &grid);
        assert!(!t.clipped);
        assert_eq!(t.cores().count(), 1 + t.link_count());
        assert_eq!(t.link_count(), 8);
        let edge = TShape::new(Core::new(1, 9), r, &grid);
        assert!(edge.clipped);
        assert_eq!((edge.arm_west, edge.arm_east, edge.arm_down), (1, 3, 0));
        assert_eq!(t_set(&edge).len(), edge.cores().count());
    }

    #[test]
    fn rebuild_criterion() {
        let p = vec![[0.0; 3]; 3];
        assert!(!needs_rebuild(&p, &p, 0.5));
        let mut q = p.clone();
        q[1][0] = 0.5;
        assert!(needs_rebuild(&q, &p, 0.5));
        let q = vec![[0.125, 0.0, 0.0]; 3];
        assert!(!needs_rebuild(&q, &p, 0.5));
    }

    #[test]
    fn arms_that_outgrow_the_grid_are_rejected() {
        let s = random_cluster(40, 0.05, 2.0, 1.0, 2).unwrap();
        let p = project_and_place(&s, CoreGrid::new(40, 40, 1, None).unwrap(), 3.0).unwrap();
        assert!(build_tshapes(&p, &s.positions, 30.0).is_err());
    }

    #[test]
    fn screened_lists_cover_every_pair_once() {
        for seed in 0..4 {
            let s = random_cluster(80, 0.05, 2.2, 1.0, seed).unwrap();
            for (k, h) in [(1, 0), (2, 1), (3, 2), (4, 0)] {
                let grid = CoreGrid::new(300, 300, k, Some(h)).unwrap();
                let p = project_and_place(&s, grid, 3.0).unwrap();
                let reach = 4.6;
                let routes = build_tshapes(&p, &s.positions, reach).unwrap();
                assert!(audit_coverage(&p, &routes, &s.positions, reach).is_empty());
                let owners = p.owners();
                let mut found = Vec::new();
                for (core, arr) in arrival_streams(&p, &routes) {
                    let nl = screen_candidates(core, &arr, &owners, &s.positions, routes.reach, reach, 0.5).unwrap();
                    for (i, j) in nl.pairs {
                        let (a, b) = (arr[i as usize], arr[j as usize]);
                        found.push((a.min(b), a.max(b)));
                    }
                }
                found.sort_unstable();
                assert_eq!(found, pairs_within(&s.positions, reach));
            }
        }
    }

    #[test]
    fn trimmed_arms_break_coverage() {
        let s = random_cluster(60, 0.05, 2.2, 1.0, 7).unwrap();
        let p = project_and_place(&s, CoreGrid::new(100, 100, 1, None).unwrap(), 3.0).unwrap();
        let mut routes = build_tshapes(&p, &s.positions, 4.6).unwrap();
        routes.trim_arms(routes.reach.horizontal.max(routes.reach.vertical));
        assert!(!audit_coverage(&p, &routes, &s.positions, 4.1).is_empty());
    }

    #[test]
    fn dumps_have_one_line_per_item() {
        let s = AtomSystem::new("X", vec![[0.0; 3], [2.5, 0.0, 0.0]], 1.0, [3.0; 3]).unwrap();
        let p = project_and_place(&s, CoreGrid::new(10, 10, 1, None).unwrap(), 3.0).unwrap();
        let routes = build_tshapes(&p, &s.positions, 3.0).unwrap();
        assert_eq!(routes.dump().lines().count(), 3);
        let pairs = assign_all(&p, &routes, &s.positions, 3.0).unwrap();
        assert_eq!(dump_assignments(&pairs), "P 0 1 0 0\n");
    }
}
