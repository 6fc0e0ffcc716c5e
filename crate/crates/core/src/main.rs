use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use meshmd::cli::{self, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};
use meshmd::config::{EngineKind, RunConfig};
use meshmd::eam::Precision;
use meshmd::Result;

#[derive(Parser)]
#[command(name = "meshmd", version, about = "EAM molecular dynamics on a logical 2D core mesh")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare mesh-engine forces against the cell-list reference.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Shorten every T arm by this many cores (exercises coverage failures).
        #[arg(long, default_value_t = 0, hide = true)]
        trim_arms: usize,
    },
    /// Integrate the slab and write a JSON-lines trajectory summary.
    Run {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Cycle estimates over cores-per-atom and diagonal spacing, as CSV.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 4, 5, 6])]
        ks: Vec<usize>,
        /// Diagonal spacings; defaults to k - 1 for each k.
        #[arg(long, value_delimiter = ',')]
        hs: Vec<usize>,
        /// CSV path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Perturb a placed slab and remap it back to a fixed point.
    RemapDemo {
        #[command(flatten)]
        run: RunArgs,
        /// Å
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 50)]
        max_rounds: usize,
    },
}

/// Overrides for [`RunConfig`] fields; flags win over the config file.
#[derive(Args)]
struct RunArgs {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    potential: Option<PathBuf>,
    #[arg(long, value_enum)]
    engine: Option<EngineKind>,
    #[arg(long)]
    cells_x: Option<usize>,
    #[arg(long)]
    cells_y: Option<usize>,
    #[arg(long)]
    cells_z: Option<usize>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    lattice_constant: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid_width: Option<usize>,
    #[arg(long)]
    grid_height: Option<usize>,
    #[arg(long, short = 'k')]
    cores_per_atom: Option<usize>,
    #[arg(long)]
    diagonal_spacing: Option<usize>,
    #[arg(long)]
    skin: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_parser = parse_precision)]
    precision: Option<Precision>,
    #[arg(long)]
    remap_every: Option<usize>,
    #[arg(long)]
    remap_radius: Option<usize>,
    #[arg(long)]
    cell_width: Option<f64>,
    #[arg(long)]
    calibrate_cycles: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    trajectory: Option<PathBuf>,
    #[arg(long)]
    xyz: Option<PathBuf>,
    #[arg(long)]
    snapshot_stride: Option<usize>,
}

fn parse_precision(s: &str) -> std::result::Result<Precision, String> {
    match s {
        "double" => Ok(Precision::Double),
        "single" => Ok(Precision::Single),
        _ => Err(format!("expected `double` or `single`, got `{s}`")),
    }
}

impl RunArgs {
    fn resolve(self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident => $($target:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$field { c.$($target).+ = v; })*
            };
        }
        set!(
            potential => potential,
            engine => engine,
            cells_x => slab.cells_x,
            cells_y => slab.cells_y,
            cells_z => slab.cells_z,
            temperature => slab.temperature,
            seed => seed,
            grid_width => grid_width,
            grid_height => grid_height,
            cores_per_atom => cores_per_atom,
            skin => skin,
            dt => dt,
            steps => steps,
            precision => precision,
            remap_every => remap_every,
            snapshot_stride => snapshot_stride,
        );
        if self.lattice_constant.is_some() {
            c.slab.lattice_constant = self.lattice_constant;
        }
        if self.diagonal_spacing.is_some() {
            c.diagonal_spacing = self.diagonal_spacing;
        }
        if self.remap_radius.is_some() {
            c.remap_radius = self.remap_radius;
        }
        if self.cell_width.is_some() {
            c.cell_width = self.cell_width;
        }
        if self.calibrate_cycles.is_some() {
            c.calibrate_cycles = self.calibrate_cycles;
        }
        if self.tolerance.is_some() {
            c.tolerance = self.tolerance;
        }
        if self.trajectory.is_some() {
            c.trajectory = self.trajectory;
        }
        if self.xyz.is_some() {
            c.xyz = self.xyz;
        }
        Ok(c)
    }
}

fn execute(command: Command) -> Result<i32> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Verify { run, trim_arms } => {
            let report = cli::cmd_verify(&run.resolve()?, trim_arms)?;
            let _ = writeln!(out, "{report}");
            Ok(if report.passed { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Run { run } => {
            cli::cmd_run(&run.resolve()?, &mut out)?;
            Ok(EXIT_OK)
        }
        Command::Sweep { run, ks, hs, out: path } => {
            let rows = cli::cmd_sweep(&run.resolve()?, &ks, &hs)?;
            match path {
                Some(p) => {
                    let f = std::fs::File::create(&p).map_err(|e| meshmd::Error::Io { path: p, source: e })?;
                    cli::write_sweep_csv(&rows, f)?;
                }
                None => cli::write_sweep_csv(&rows, &mut out)?,
            }
            Ok(EXIT_OK)
        }
        Command::RemapDemo {
            run,
            amplitude,
            max_rounds,
        } => {
            let demo = cli::cmd_remap_demo(&run.resolve()?, amplitude, max_rounds)?;
            let _ = writeln!(out, "{}", serde_json::to_string(&demo).expect("demo serializes"));
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let parsed = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { EXIT_OK as u8 });
        }
    };
    match execute(parsed.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
