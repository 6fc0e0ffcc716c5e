//! The mesh engine: two multicast exchanges per force evaluation, velocity
//! Verlet on the owners, periodic remapping, and a per-step cycle estimate.
//!
//! Cores are simulated in synchronous rounds. Exchange 1 multicasts positions
//! along the T routes; workers evaluate their neighbor-list pairs and return
//! density contributions to the owners, which evaluate `F'(rho)`. Exchange 2
//! multicasts `F'`; workers return equal and opposite pair forces. Owners sum
//! messages in ascending partner id, so the result matches the reference
//! engine bit for bit and does not depend on `k` or `h`.

use serde::{Deserialize, Serialize};

use crate::eam::{EamTables, PairTerms, Precision};
use crate::error::{Error, Result};
use crate::kernel::{self, ForcePart, Message, PairGeometry};
use crate::mapping::{greedy_remap, project_and_place, Core, CoreGrid, Placement, RemapOutcome};
use crate::nt::{arrival_streams, build_tshapes, needs_rebuild, screen_candidates, NeighborList, Routes};
use crate::reference::{drift, half_kick, ForceResult};
use crate::system::{AtomSystem, Vec3};

/// Cycle costs of the fabric and the per-core kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FabricModel {
    /// Cycles per router hop.
    pub hop_latency: f64,
    /// Cycles per atom delivered to the busiest worker. A core takes one word
    /// per cycle from its router, so arrivals serialize at the receiver.
    pub cost_per_arrival: f64,
    /// Cycles per pair interaction on the busiest worker.
    pub cost_per_interaction: f64,
    /// Cycles per step independent of the mapping.
    pub cost_fixed: f64,
    pub clock_hz: f64,
}

impl Default for FabricModel {
    fn default() -> Self {
        FabricModel {
            hop_latency: 1.0,
            cost_per_arrival: 75.0,
            cost_per_interaction: 62.0,
            cost_fixed: 495.0,
            clock_hz: 850e6,
        }
    }
}

impl FabricModel {
    pub fn validate(&self) -> Result<()> {
        let c = [self.hop_latency, self.cost_per_arrival, self.cost_per_interaction, self.cost_fixed];
        if c.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::Config(format!("fabric costs must be finite and >= 0: {self:?}")));
        }
        if !(self.clock_hz > 0.0) || !self.clock_hz.is_finite() {
            return Err(Error::Config(format!("clock_hz must be > 0, got {}", self.clock_hz)));
        }
        Ok(())
    }

    /// Scales the arrival, interaction and fixed costs together so that the
    /// configuration described by `anchor` costs `target_cycles` per step.
    /// Hop latency stays put.
    pub fn calibrated(&self, anchor: &NeighborStats, target_cycles: f64) -> Result<Self> {
        let hops = 2.0 * self.hop_latency * anchor.longest_route as f64;
        let scalable = 2.0 * self.cost_per_arrival * anchor.max_arrivals as f64
            + self.cost_per_interaction * anchor.max_pairs as f64
            + self.cost_fixed;
        if !(scalable > 0.0) || target_cycles <= hops {
            return Err(Error::Config(format!(
                "cannot calibrate to {target_cycles} cycles: {hops} hop cycles, {scalable} scalable"
            )));
        }
        let s = (target_cycles - hops) / scalable;
        Ok(FabricModel {
            cost_per_arrival: self.cost_per_arrival * s,
            cost_per_interaction: self.cost_per_interaction * s,
            cost_fixed: self.cost_fixed * s,
            ..*self
        })
    }
}

/// Worker-side load figures that drive the cost model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborStats {
    pub atoms: usize,
    /// Cores that receive at least one atom.
    pub workers: usize,
    /// Longest T arm, in hops.
    pub longest_route: usize,
    /// Most atoms delivered to one worker over a single incoming link (west,
    /// east or north), counting the worker's own atom on each.
    pub max_link_load: usize,
    pub max_arrivals: usize,
    /// Most neighbor-list pairs on one worker.
    pub max_pairs: usize,
    pub total_pairs: usize,
    /// Most candidate pairs screened by one worker at list build.
    pub max_screened: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepCostReport {
    pub comm_cycles: u64,
    pub compute_cycles: u64,
    pub fixed_cycles: u64,
    pub total_cycles: u64,
    pub steps_per_second: f64,
    /// Neighbor-list rebuild cycles averaged over the steps between rebuilds.
    /// Reported separately, not part of `total_cycles`.
    pub rebuild_cycles_amortized: f64,
}

/// Cycle estimate for one step. The slowest worker sets the pace, so every
/// term takes a maximum over cores.
pub fn estimate_cost(stats: &NeighborStats, fabric: &FabricModel) -> StepCostReport {
    let comm = 2.0
        * (fabric.hop_latency * stats.longest_route as f64 + fabric.cost_per_arrival * stats.max_arrivals as f64);
    let compute = fabric.cost_per_interaction * stats.max_pairs as f64;
    let (comm, compute, fixed) = (comm.round() as u64, compute.round() as u64, fabric.cost_fixed.round() as u64);
    let total = comm + compute + fixed;
    StepCostReport {
        comm_cycles: comm,
        compute_cycles: compute,
        fixed_cycles: fixed,
        total_cycles: total,
        steps_per_second: fabric.clock_hz / total as f64,
        rebuild_cycles_amortized: 0.0,
    }
}

#[derive(Debug, Clone)]
pub struct WorkerPlan {
    pub core: Core,
    /// Atom ids in arrival order.
    pub arrivals: Vec<u32>,
    pub list: NeighborList,
}

/// Dense core-to-worker lookup over the bounding box of all routes.
#[derive(Debug, Clone)]
struct WorkerIndex {
    col0: usize,
    row0: usize,
    width: usize,
    slots: Vec<u32>,
}

impl WorkerIndex {
    fn new(workers: &[WorkerPlan]) -> Self {
        let (mut c0, mut r0, mut c1, mut r1) = (usize::MAX, usize::MAX, 0, 0);
        for w in workers {
            c0 = c0.min(w.core.col);
            r0 = r0.min(w.core.row);
            c1 = c1.max(w.core.col);
            r1 = r1.max(w.core.row);
        }
        if workers.is_empty() {
            return WorkerIndex {
                col0: 0,
                row0: 0,
                width: 0,
                slots: Vec::new(),
            };
        }
        let width = c1 - c0 + 1;
        let mut slots = vec![u32::MAX; width * (r1 - r0 + 1)];
        for (i, w) in workers.iter().enumerate() {
            slots[(w.core.row - r0) * width + w.core.col - c0] = i as u32;
        }
        WorkerIndex {
            col0: c0,
            row0: r0,
            width,
            slots,
        }
    }

    fn get(&self, c: Core) -> Option<usize> {
        if c.col < self.col0 || c.row < self.row0 || c.col - self.col0 >= self.width {
            return None;
        }
        match self.slots.get((c.row - self.row0) * self.width + c.col - self.col0) {
            Some(&i) if i != u32::MAX => Some(i as usize),
            _ => None,
        }
    }
}

/// Routes, arrival schedules and neighbor lists for one placement and one
/// set of build positions.
#[derive(Debug, Clone)]
pub struct ExchangePlan {
    pub routes: Routes,
    pub workers: Vec<WorkerPlan>,
    pub stats: NeighborStats,
    /// Atoms in ascending owner linear index; the send schedule.
    send_order: Vec<u32>,
    index: WorkerIndex,
    built_positions: Vec<Vec3>,
    reach: f64,
}

impl ExchangePlan {
    /// `arm_trim` shortens every T arm after it is sized; zero in normal runs.
    pub fn build(placement: &Placement, positions: &[Vec3], cutoff: f64, skin: f64, arm_trim: usize) -> Result<Self> {
        let reach = cutoff + skin;
        let mut routes = build_tshapes(placement, positions, reach)?;
        if arm_trim > 0 {
            routes.trim_arms(arm_trim);
        }
        let owners = placement.owners();
        let mut workers = Vec::new();
        let mut stats = NeighborStats {
            atoms: placement.len(),
            longest_route: routes.shapes.iter().map(|t| t.depth()).max().unwrap_or(0),
            ..NeighborStats::default()
        };
        for (core, arrivals) in arrival_streams(placement, &routes) {
            let list = screen_candidates(core, &arrivals, &owners, positions, routes.reach, reach, skin)?;
            let (mut west, mut east, mut north, mut own) = (0, 0, 0, 0);
            for &a in &arrivals {
                let o = owners[a as usize];
                if o == core {
                    own += 1;
                } else if o.row == core.row {
                    if o.col < core.col { west += 1 } else { east += 1 }
                } else {
                    north += 1;
                }
            }
            stats.max_link_load = stats.max_link_load.max(own + west.max(east).max(north));
            stats.max_arrivals = stats.max_arrivals.max(arrivals.len());
            stats.max_pairs = stats.max_pairs.max(list.pairs.len());
            stats.max_screened = stats.max_screened.max(list.screened);
            stats.total_pairs += list.pairs.len();
            workers.push(WorkerPlan { core, arrivals, list });
        }
        stats.workers = workers.len();
        let grid = placement.grid();
        let mut send_order: Vec<u32> = (0..placement.len() as u32).collect();
        send_order.sort_by_key(|&a| grid.linear(owners[a as usize]));
        let index = WorkerIndex::new(&workers);
        Ok(ExchangePlan {
            routes,
            workers,
            stats,
            send_order,
            index,
            built_positions: positions.to_vec(),
            reach,
        })
    }

    pub fn built_positions(&self) -> &[Vec3] {
        &self.built_positions
    }

    pub fn reach(&self) -> f64 {
        self.reach
    }

    /// Delivers `values[atom]` along every atom's T and checks each worker's
    /// stream against its schedule.
    fn multicast<T: Copy>(&self, values: &[T]) -> Result<Vec<Vec<T>>> {
        let mut inbox: Vec<Vec<(u32, T)>> = self
            .workers
            .iter()
            .map(|w| Vec::with_capacity(w.arrivals.len()))
            .collect();
        for &a in &self.send_order {
            for c in self.routes.shapes[a as usize].cores() {
                let w = self
                    .index
                    .get(c)
                    .ok_or_else(|| Error::Consistency(format!("atom {a} routed to unscheduled core {c}")))?;
                inbox[w].push((a, values[a as usize]));
            }
        }
        inbox
            .into_iter()
            .zip(&self.workers)
            .map(|(got, w)| {
                if got.len() != w.arrivals.len() || got.iter().zip(&w.arrivals).any(|(g, &a)| g.0 != a) {
                    return Err(Error::Consistency(format!(
                        "core {} expected {} arrivals, received {}",
                        w.core,
                        w.arrivals.len(),
                        got.len()
                    )));
                }
                Ok(got.into_iter().map(|(_, v)| v).collect())
            })
            .collect()
    }

    /// Both exchanges for the current positions.
    pub fn evaluate(&self, system: &AtomSystem, tables: &EamTables, precision: Precision) -> Result<ForceResult> {
        let n = system.len();
        let received = self.multicast(&system.positions)?;

        struct Live {
            lo: u32,
            hi: u32,
            lo_slot: u32,
            hi_slot: u32,
            g: PairGeometry,
            t: PairTerms,
        }
        let mut live: Vec<Vec<Live>> = Vec::with_capacity(self.workers.len());
        let mut rho_msgs = Vec::new();
        for (w, pos) in self.workers.iter().zip(&received) {
            let mut mine = Vec::new();
            for &(i, j) in &w.list.pairs {
                let (x, y) = (w.arrivals[i as usize], w.arrivals[j as usize]);
                let (lo, hi, lo_slot, hi_slot) = if x < y { (x, y, i, j) } else { (y, x, j, i) };
                let g = kernel::geometry(&pos[lo_slot as usize], &pos[hi_slot as usize], precision);
                if let Some(t) = kernel::pair_terms(tables, &g, precision)? {
                    rho_msgs.push(Message { atom: lo, partner: hi, value: t.rho });
                    rho_msgs.push(Message { atom: hi, partner: lo, value: t.rho });
                    mine.push(Live { lo, hi, lo_slot, hi_slot, g, t });
                }
            }
            live.push(mine);
        }
        let density = kernel::reduce_scalar(n, &mut rho_msgs, precision);
        let embedding = kernel::embed_all(tables, &density, precision)?;

        let slopes: Vec<f64> = embedding.iter().map(|e| e.1).collect();
        let received = self.multicast(&slopes)?;
        let mut force_msgs = Vec::with_capacity(2 * rho_msgs.len());
        for (pairs, fp) in live.iter().zip(&received) {
            for p in pairs {
                let f = kernel::pair_force(&p.t, &p.g, fp[p.lo_slot as usize], fp[p.hi_slot as usize], precision);
                let half_phi = precision.round(0.5 * p.t.phi);
                force_msgs.push(Message {
                    atom: p.lo,
                    partner: p.hi,
                    value: ForcePart { force: f, half_phi },
                });
                force_msgs.push(Message {
                    atom: p.hi,
                    partner: p.lo,
                    value: ForcePart {
                        force: [-f[0], -f[1], -f[2]],
                        half_phi,
                    },
                });
            }
        }
        let (forces, pair_energy) = kernel::reduce_forces(n, &mut force_msgs, precision);
        let (per_atom_energy, potential_energy) = kernel::total_energy(&embedding, &pair_energy, precision);
        Ok(ForceResult {
            forces,
            potential_energy,
            per_atom_density: density,
            per_atom_energy,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    /// Å
    pub skin: f64,
    /// fs
    pub dt: f64,
    pub precision: Precision,
    /// Steps between greedy remaps; 0 disables remapping.
    pub remap_every: usize,
    /// Chebyshev exchange radius in cores; `None` uses the larger rectangle side.
    pub remap_radius: Option<usize>,
    /// Å; `None` uses the potential's lattice constant.
    pub cell_width: Option<f64>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            skin: 0.5,
            dt: 1.0,
            precision: Precision::Double,
            remap_every: 100,
            remap_radius: None,
            cell_width: None,
        }
    }
}

/// Cell width used when the config leaves it unset.
pub fn default_cell_width(tables: &EamTables) -> f64 {
    if tables.lattice_constant > 0.0 {
        tables.lattice_constant
    } else {
        3.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub step: usize,
    /// eV
    pub total_energy: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub total_cycles: u64,
    pub steps_per_second: f64,
}

#[derive(Debug, Clone)]
pub struct TrajectorySummary {
    /// One record per step, starting with the initial state.
    pub records: Vec<TrajectoryRecord>,
    pub remaps: Vec<RemapOutcome>,
    pub rebuilds: usize,
}

#[derive(Debug, Clone)]
pub struct WaferEngine {
    tables: EamTables,
    system: AtomSystem,
    placement: Placement,
    plan: ExchangePlan,
    forces: ForceResult,
    config: EngineConfig,
    fabric: FabricModel,
    step: usize,
    rebuilds: usize,
    last_rebuild_step: usize,
    rebuild_interval: f64,
    arm_trim: usize,
}

impl WaferEngine {
    pub fn new(
        system: AtomSystem,
        tables: EamTables,
        grid: CoreGrid,
        config: EngineConfig,
        fabric: FabricModel,
    ) -> Result<Self> {
        Self::with_arm_trim(system, tables, grid, config, fabric, 0)
    }

    /// Like [`WaferEngine::new`] with every T arm shortened by `arm_trim`
    /// cores, which breaks pair coverage on purpose.
    pub fn with_arm_trim(
        system: AtomSystem,
        tables: EamTables,
        grid: CoreGrid,
        config: EngineConfig,
        fabric: FabricModel,
        arm_trim: usize,
    ) -> Result<Self> {
        if !(config.skin > 0.0) {
            return Err(Error::Config(format!("skin must be > 0, got {}", config.skin)));
        }
        if !(config.dt >= 0.0) {
            return Err(Error::Config(format!("dt must be >= 0, got {}", config.dt)));
        }
        if config.remap_radius == Some(0) {
            return Err(Error::Config("remap radius must be >= 1".into()));
        }
        fabric.validate()?;
        system.validate()?;
        let cell_width = config.cell_width.unwrap_or_else(|| default_cell_width(&tables));
        let placement = project_and_place(&system, grid, cell_width)?;
        let plan = ExchangePlan::build(&placement, &system.positions, tables.cutoff, config.skin, arm_trim)?;
        let forces = plan.evaluate(&system, &tables, config.precision)?;
        let mut system = system;
        system.forces.clone_from(&forces.forces);
        Ok(WaferEngine {
            tables,
            system,
            placement,
            plan,
            forces,
            config,
            fabric,
            step: 0,
            rebuilds: 0,
            last_rebuild_step: 0,
            rebuild_interval: 0.0,
            arm_trim,
        })
    }

    pub fn system(&self) -> &AtomSystem {
        &self.system
    }

    pub fn forces(&self) -> &ForceResult {
        &self.forces
    }

    pub fn placement(&self) -> &Placement {
        &self.placement
    }

    pub fn plan(&self) -> &ExchangePlan {
        &self.plan
    }

    pub fn tables(&self) -> &EamTables {
        &self.tables
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn rebuilds(&self) -> usize {
        self.rebuilds
    }

    fn rebuild(&mut self) -> Result<()> {
        self.plan = ExchangePlan::build(
            &self.placement,
            &self.system.positions,
            self.tables.cutoff,
            self.config.skin,
            self.arm_trim,
        )?;
        Ok(())
    }

    fn record_rebuild(&mut self) {
        self.rebuilds += 1;
        self.rebuild_interval = (self.step - self.last_rebuild_step) as f64;
        self.last_rebuild_step = self.step;
    }

    pub fn cost_report(&self) -> StepCostReport {
        let mut r = estimate_cost(&self.plan.stats, &self.fabric);
        let interval = if self.rebuild_interval > 0.0 {
            self.rebuild_interval
        } else {
            self.step.saturating_sub(self.last_rebuild_step).max(1) as f64
        };
        r.rebuild_cycles_amortized = self.fabric.cost_per_interaction * self.plan.stats.max_screened as f64 / interval;
        r
    }

    /// One velocity Verlet step. Lists are rebuilt first when any atom has
    /// moved more than half the skin.
    pub fn step(&mut self) -> Result<StepCostReport> {
        let dt = self.config.dt;
        half_kick(&mut self.system, &self.forces.forces, dt);
        drift(&mut self.system, dt);
        self.step += 1;
        if needs_rebuild(&self.system.positions, self.plan.built_positions(), self.config.skin) {
            self.rebuild()?;
            self.record_rebuild();
        }
        self.forces = self.plan.evaluate(&self.system, &self.tables, self.config.precision)?;
        half_kick(&mut self.system, &self.forces.forces, dt);
        self.system.forces.clone_from(&self.forces.forces);
        for w in &mut self.plan.workers {
            w.list.stale_counter += 1;
        }
        Ok(self.cost_report())
    }

    /// One greedy remap round on the current positions, then fresh lists.
    pub fn remap(&mut self) -> Result<RemapOutcome> {
        let l = self.placement.layout();
        let radius = self.config.remap_radius.unwrap_or(l.rect_w.max(l.rect_h));
        let out = greedy_remap(&mut self.placement, &self.system, radius)?;
        if !out.swaps.is_empty() {
            self.rebuild()?;
            self.record_rebuild();
        }
        Ok(out)
    }

    pub fn record(&self) -> TrajectoryRecord {
        let kinetic = self.system.kinetic_energy();
        let potential = self.forces.potential_energy;
        let cost = self.cost_report();
        TrajectoryRecord {
            step: self.step,
            total_energy: kinetic + potential,
            kinetic,
            potential,
            total_cycles: cost.total_cycles,
            steps_per_second: cost.steps_per_second,
        }
    }

    /// Runs `steps` steps, remapping every `remap_every` of them.
    pub fn run(&mut self, steps: usize) -> Result<TrajectorySummary> {
        let mut records = vec![self.record()];
        let mut remaps = Vec::new();
        for _ in 0..steps {
            self.step()?;
            if self.config.remap_every > 0 && self.step.is_multiple_of(self.config.remap_every) {
                remaps.push(self.remap()?);
            }
            records.push(self.record());
        }
        Ok(TrajectorySummary {
            records,
            remaps,
            rebuilds: self.rebuilds,
        })
    }
}

/// Places `system` on `grid` and gathers neighbor statistics without running
/// any dynamics.
pub fn plan_stats(system: &AtomSystem, tables: &EamTables, grid: CoreGrid, config: &EngineConfig) -> Result<NeighborStats> {
    let cell_width = config.cell_width.unwrap_or_else(|| default_cell_width(tables));
    let placement = project_and_place(system, grid, cell_width)?;
    Ok(ExchangePlan::build(&placement, &system.positions, tables.cutoff, config.skin, 0)?.stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{TableGrid, TANTALUM};
    use crate::reference::compute_forces_bruteforce;
    use crate::system::random_cluster;

    fn tantalum() -> EamTables {
        TANTALUM.tabulate(TableGrid::TANTALUM).unwrap()
    }

    #[test]
    fn empty_model_costs_nothing() {
        let fabric = FabricModel {
            cost_fixed: 0.0,
            ..FabricModel::default()
        };
        let r = estimate_cost(&NeighborStats::default(), &fabric);
        assert_eq!(r.total_cycles, 0);
    }

    #[test]
    fn report_terms_add_up() {
        let stats = NeighborStats {
            longest_route: 8,
            max_arrivals: 9,
            max_pairs: 7,
            ..NeighborStats::default()
        };
        let r = estimate_cost(&stats, &FabricModel::default());
        assert_eq!(r.total_cycles, r.comm_cycles + r.compute_cycles + r.fixed_cycles);
        assert_eq!(r.comm_cycles, 2 * (8 + 75 * 9));
        assert_eq!(r.steps_per_second, 850e6 / r.total_cycles as f64);
    }

    #[test]
    fn calibration_hits_the_anchor() {
        let stats = NeighborStats {
            longest_route: 20,
            max_arrivals: 6,
            max_pairs: 4,
            ..NeighborStats::default()
        };
        let f = FabricModel::default().calibrated(&stats, 743.0).unwrap();
        let r = estimate_cost(&stats, &f);
        assert!((r.total_cycles as i64 - 743).abs() <= 1);
    }

    #[test]
    fn single_atom_drifts() {
        let t = tantalum();
        let mut s = AtomSystem::new("Ta", vec![[1.0, 2.0, 3.0]], 180.9479, [5.0; 3]).unwrap();
        s.velocities[0] = [0.01, 0.0, 0.0];
        let grid = CoreGrid::new(8, 8, 1, None).unwrap();
        let mut e = WaferEngine::new(s, t, grid, EngineConfig::default(), FabricModel::default()).unwrap();
        let r = e.step().unwrap();
        assert_eq!(e.forces().forces, vec![[0.0; 3]]);
        assert_eq!(e.system().positions[0], [1.01, 2.0, 3.0]);
        assert_eq!(r.compute_cycles, 0);
    }

    #[test]
    fn matches_the_direct_loop() {
        let t = tantalum();
        for seed in 0..3 {
            let s = random_cluster(60, 0.05, 2.2, 180.9479, seed).unwrap();
            let oracle = compute_forces_bruteforce(&s, &t).unwrap();
            for (k, h) in [(1, 0), (3, 1), (4, 2)] {
                let grid = CoreGrid::new(200, 200, k, Some(h)).unwrap();
                let e = WaferEngine::new(s.clone(), t.clone(), grid, EngineConfig::default(), FabricModel::default())
                    .unwrap();
                assert_eq!(e.forces().forces, oracle.forces);
                assert_eq!(e.forces().potential_energy, oracle.potential_energy);
            }
        }
    }

    #[test]
    fn trimmed_arms_lose_pairs() {
        let t = tantalum();
        let s = random_cluster(60, 0.05, 2.2, 180.9479, 5).unwrap();
        let oracle = compute_forces_bruteforce(&s, &t).unwrap();
        let grid = CoreGrid::new(100, 100, 1, None).unwrap();
        let e = WaferEngine::with_arm_trim(s, t, grid, EngineConfig::default(), FabricModel::default(), 2).unwrap();
        assert_ne!(e.forces().forces, oracle.forces);
    }
}
