//! Library side of the `meshmd` subcommands. Each function does the work and
//! returns a report; the binary only parses flags, prints, and picks the exit
//! code.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::{EngineKind, RunConfig};
use crate::eam::EamTables;
use crate::engine::{estimate_cost, plan_stats, TrajectoryRecord, WaferEngine};
use crate::error::{Error, Result};
use crate::mapping::{assignment_cost, greedy_remap, project_and_place, CoreGrid, RemapOutcome};
use crate::nt::{audit_coverage, CoverageViolation};
use crate::reference::{compute_forces_celllist, verlet_step};
use crate::system::AtomSystem;

/// Exit status for a run that completed.
pub const EXIT_OK: i32 = 0;
/// Exit status for a failed check or a runtime failure.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for bad flags, bad config, or unreadable inputs.
pub const EXIT_USAGE: i32 = 2;

/// Exit code for an error returned by one of the commands.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Io { .. } | Error::Parse { .. } | Error::Capacity { .. } | Error::LayoutDoesNotFit { .. } => {
            EXIT_USAGE
        }
        _ => EXIT_FAILURE,
    }
}

fn setup(cfg: &RunConfig) -> Result<(EamTables, AtomSystem)> {
    cfg.validate()?;
    let tables = cfg.load_potential()?;
    let system = cfg.build_system(&tables)?;
    Ok((tables, system))
}

fn fabric_for(cfg: &RunConfig, tables: &EamTables, system: &AtomSystem) -> Result<crate::engine::FabricModel> {
    match cfg.calibrate_cycles {
        None => Ok(cfg.fabric),
        Some(target) => {
            let anchor = CoreGrid::new(cfg.grid_width, cfg.grid_height, 4, None)?;
            let stats = plan_stats(system, tables, anchor, &cfg.engine_config())?;
            cfg.fabric.calibrated(&stats, target)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub atoms: usize,
    pub tolerance: f64,
    /// eV/Å
    pub max_abs_deviation: f64,
    /// Largest component deviation divided by the largest reference component.
    pub max_rel_deviation: f64,
    /// First atom whose force is outside tolerance.
    pub first_failing_atom: Option<usize>,
    /// eV
    pub energy_deviation: f64,
    #[serde(skip)]
    pub coverage_violations: Vec<CoverageViolation>,
    pub passed: bool,
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "atoms: {}", self.atoms)?;
        writeln!(f, "max |dF|: {:.3e} eV/A", self.max_abs_deviation)?;
        writeln!(f, "max relative dF: {:.3e} (tolerance {:.1e})", self.max_rel_deviation, self.tolerance)?;
        writeln!(f, "energy deviation: {:.3e} eV", self.energy_deviation)?;
        if let Some(a) = self.first_failing_atom {
            writeln!(f, "first failing atom: {a}")?;
        }
        if !self.coverage_violations.is_empty() {
            writeln!(f, "coverage violations: {}", self.coverage_violations.len())?;
            for v in self.coverage_violations.iter().take(5) {
                writeln!(f, "  pair ({}, {}): {}", v.atom_a, v.atom_b, v.reason)?;
            }
        }
        write!(f, "{}", if self.passed { "PASS" } else { "FAIL" })
    }
}

/// Runs the mesh engine and the cell-list reference on the configured slab
/// and compares forces. `arm_trim` shortens the T arms to provoke failures.
pub fn cmd_verify(cfg: &RunConfig, arm_trim: usize) -> Result<VerifyReport> {
    let (tables, system) = setup(cfg)?;
    let oracle = compute_forces_celllist(&system, &tables, cfg.skin)?;
    let engine = WaferEngine::with_arm_trim(
        system.clone(),
        tables.clone(),
        cfg.grid()?,
        cfg.engine_config(),
        cfg.fabric,
        arm_trim,
    )?;
    let violations = audit_coverage(engine.placement(), &engine.plan().routes, &system.positions, tables.cutoff);
    let got = &engine.forces().forces;
    let scale = oracle.forces.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = cfg.force_tolerance();
    let mut max_abs = 0.0f64;
    let mut first = None;
    for (i, (a, b)) in got.iter().zip(&oracle.forces).enumerate() {
        for d in 0..3 {
            let dev = (a[d] - b[d]).abs();
            max_abs = max_abs.max(dev);
            if first.is_none() && dev > tol * scale.max(f64::MIN_POSITIVE) {
                first = Some(i);
            }
        }
    }
    let max_rel = if scale > 0.0 { max_abs / scale } else { max_abs };
    Ok(VerifyReport {
        atoms: system.len(),
        tolerance: tol,
        max_abs_deviation: max_abs,
        max_rel_deviation: max_rel,
        first_failing_atom: first,
        energy_deviation: (engine.forces().potential_energy - oracle.potential_energy).abs(),
        passed: first.is_none() && violations.is_empty(),
        coverage_violations: violations,
    })
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub records: Vec<TrajectoryRecord>,
    pub remaps: Vec<RemapOutcome>,
    pub snapshots: usize,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

/// Integrates the configured slab and writes the JSON-lines trajectory
/// summary (to `out` when no trajectory path is configured) plus optional
/// XYZ frames.
pub fn cmd_run(cfg: &RunConfig, out: &mut dyn Write) -> Result<RunSummary> {
    let (tables, system) = setup(cfg)?;
    let mut xyz = cfg.xyz.as_deref().map(create).transpose()?;
    let stride = cfg.snapshot_stride;
    let mut snapshots = 0;
    let mut snap = |s: &AtomSystem, step: usize| -> Result<()> {
        if let (Some(w), true) = (xyz.as_mut(), stride > 0 && step.is_multiple_of(stride.max(1))) {
            let path = cfg.xyz.as_deref().unwrap();
            w.write_all(s.to_xyz(&format!("step {step}")).as_bytes())
                .map_err(|e| Error::io(path, e))?;
            snapshots += 1;
        }
        Ok(())
    };

    let (records, remaps) = match cfg.engine {
        EngineKind::Wafer => {
            let fabric = fabric_for(cfg, &tables, &system)?;
            let mut engine = WaferEngine::new(system, tables, cfg.grid()?, cfg.engine_config(), fabric)?;
            let mut records = vec![engine.record()];
            let mut remaps = Vec::new();
            snap(engine.system(), 0)?;
            for _ in 0..cfg.steps {
                engine.step()?;
                let step = engine.step_index();
                if cfg.remap_every > 0 && step.is_multiple_of(cfg.remap_every) {
                    remaps.push(engine.remap()?);
                }
                records.push(engine.record());
                snap(engine.system(), step)?;
            }
            (records, remaps)
        }
        EngineKind::Reference => {
            let mut system = system;
            let mut forces = compute_forces_celllist(&system, &tables, cfg.skin)?;
            let rec = |s: &AtomSystem, step: usize, pe: f64| {
                let ke = s.kinetic_energy();
                TrajectoryRecord {
                    step,
                    total_energy: ke + pe,
                    kinetic: ke,
                    potential: pe,
                    total_cycles: 0,
                    steps_per_second: 0.0,
                }
            };
            let mut records = vec![rec(&system, 0, forces.potential_energy)];
            snap(&system, 0)?;
            for step in 1..=cfg.steps {
                forces = verlet_step(&mut system, &forces, cfg.dt, |s| {
                    compute_forces_celllist(s, &tables, cfg.skin)
                })?;
                records.push(rec(&system, step, forces.potential_energy));
                snap(&system, step)?;
            }
            (records, Vec::new())
        }
    };
    if let (Some(w), Some(path)) = (xyz.as_mut(), cfg.xyz.as_deref()) {
        w.flush().map_err(|e| Error::io(path, e))?;
    }

    let mut lines = String::new();
    for r in &records {
        lines.push_str(&serde_json::to_string(r).expect("record serializes"));
        lines.push('\n');
    }
    match cfg.trajectory.as_deref() {
        Some(path) => {
            let mut w = create(path)?;
            w.write_all(lines.as_bytes())
                .and_then(|_| w.flush())
                .map_err(|e| Error::io(path, e))?;
        }
        None => out.write_all(lines.as_bytes()).map_err(|e| Error::io("<stdout>", e))?,
    }
    Ok(RunSummary {
        records,
        remaps,
        snapshots,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub h: Option<usize>,
    pub n_max: Option<usize>,
    pub total_cycles: Option<u64>,
    pub steps_per_second: Option<f64>,
    pub speedup_vs_k1: Option<f64>,
    /// `ok`, or `infeasible: <reason>`.
    pub status: String,
}

/// Cycle estimates for the configured slab at every `(k, h)`. An empty `hs`
/// uses the default spacing `k - 1` for each `k`.
pub fn cmd_sweep(cfg: &RunConfig, ks: &[usize], hs: &[usize]) -> Result<Vec<SweepRow>> {
    let (tables, system) = setup(cfg)?;
    let fabric = fabric_for(cfg, &tables, &system)?;
    let h_opts: Vec<Option<usize>> = if hs.is_empty() {
        vec![None]
    } else {
        hs.iter().map(|&h| Some(h)).collect()
    };
    let engine_cfg = cfg.engine_config();
    let mut rows = Vec::new();
    for &h in &h_opts {
        let mut baseline = None;
        let mut block = Vec::new();
        for &k in ks {
            let row = match CoreGrid::new(cfg.grid_width, cfg.grid_height, k, h)
                .and_then(|g| Ok((g, plan_stats(&system, &tables, g, &engine_cfg)?)))
            {
                Ok((g, stats)) => {
                    let cost = estimate_cost(&stats, &fabric);
                    if k == 1 {
                        baseline = Some(cost.steps_per_second);
                    }
                    SweepRow {
                        k,
                        h: Some(g.diagonal_spacing),
                        n_max: Some(g.capacity()),
                        total_cycles: Some(cost.total_cycles),
                        steps_per_second: Some(cost.steps_per_second),
                        speedup_vs_k1: None,
                        status: "ok".into(),
                    }
                }
                Err(e) => SweepRow {
                    k,
                    h: h.or(k.checked_sub(1)),
                    n_max: None,
                    total_cycles: None,
                    steps_per_second: None,
                    speedup_vs_k1: None,
                    status: format!("infeasible: {e}"),
                },
            };
            block.push(row);
        }
        for r in &mut block {
            if let (Some(b), Some(s)) = (baseline, r.steps_per_second) {
                r.speedup_vs_k1 = Some(s / b);
            }
        }
        rows.extend(block);
    }
    Ok(rows)
}

pub const SWEEP_HEADER: [&str; 7] = ["k", "h", "n_max", "total_cycles", "steps_per_second", "speedup_vs_k1", "status"];

pub fn write_sweep_csv(rows: &[SweepRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Config(format!("writing CSV: {e}"));
    w.write_record(SWEEP_HEADER).map_err(io)?;
    let opt = |v: Option<String>| v.unwrap_or_else(|| "infeasible".into());
    for r in rows {
        w.write_record([
            r.k.to_string(),
            r.h.map_or(String::new(), |h| h.to_string()),
            opt(r.n_max.map(|n| n.to_string())),
            opt(r.total_cycles.map(|c| c.to_string())),
            opt(r.steps_per_second.map(|s| format!("{s:.0}"))),
            r.speedup_vs_k1.map_or(String::new(), |s| format!("{s:.4}")),
            r.status.clone(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}

#[derive(Debug, Clone, Serialize)]
pub struct RemapDemo {
    pub atoms: usize,
    pub radius: usize,
    /// Å², right after placement
    pub cost_placed: f64,
    /// Å², after the perturbation
    pub cost_perturbed: f64,
    pub rounds: Vec<RemapRound>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RemapRound {
    pub swaps: usize,
    pub cost_before: f64,
    pub cost_after: f64,
}

/// Places the slab, displaces every atom by up to `amplitude` Å, then remaps
/// until no mutual beneficial swap remains or `max_rounds` is reached.
pub fn cmd_remap_demo(cfg: &RunConfig, amplitude: f64, max_rounds: usize) -> Result<RemapDemo> {
    let (tables, mut system) = setup(cfg)?;
    if !(amplitude >= 0.0) {
        return Err(Error::Config(format!("amplitude must be >= 0, got {amplitude}")));
    }
    let width = cfg.cell_width.unwrap_or_else(|| crate::engine::default_cell_width(&tables));
    let mut placement = project_and_place(&system, cfg.grid()?, width)?;
    let cost_placed = assignment_cost(&placement, &system);
    system.perturb(amplitude, cfg.seed.wrapping_add(1));
    let cost_perturbed = assignment_cost(&placement, &system);
    let l = placement.layout();
    let radius = cfg.remap_radius.unwrap_or(l.rect_w.max(l.rect_h));
    let mut rounds = Vec::new();
    for _ in 0..max_rounds {
        let out = greedy_remap(&mut placement, &system, radius)?;
        let done = out.swaps.is_empty();
        rounds.push(RemapRound {
            swaps: out.swaps.len(),
            cost_before: out.cost_before,
            cost_after: out.cost_after,
        });
        if done {
            break;
        }
    }
    Ok(RemapDemo {
        atoms: system.len(),
        radius,
        cost_placed,
        cost_perturbed,
        rounds,
    })
}
