//! Batch front end: generate test-function snapshots, compute norms, run
//! check suites, and emit CSV/JSON reports.
//!
//! Exit codes: 0 on success / all checks passing, 1 on an assertion or
//! runtime failure, 2 on usage errors. `MODSCALE_THREADS` caps the worker
//! pool.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use modscale::adapted::octave_l2_mass;
use modscale::checks::{determinism_report, run_suite, CheckConfig, SUITES};
use modscale::function::SpectralFunction;
use modscale::norms::{NormReport, NormSpec};
use modscale::partition::PartitionOfUnity;
use modscale::schrodinger::{
    envelope_sweep_dual, envelope_sweep_fixed, space_time_probe, sweep_csv, ChirpQuad,
    SpaceTimeConfig,
};
use modscale::stft::{stft_mod_norm, Window};
use modscale::weights::{embedding_weight, lp_scaling_weight, morrey_weights, VectorWeight};
use modscale::{dilate_dyadic, synthesize, BoxRegion, GridSpec, SyntheticKind};

#[derive(Parser)]
#[command(name = "modscale", version, about = "Scaled modulation-space norms and check suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a named test function and write a binary snapshot.
    Gen(GenArgs),
    /// Compute a norm and print the report as JSON.
    Norm(NormArgs),
    /// Run a named check suite (or `all`, or `determinism`).
    Check(CheckArgs),
    /// Emit a propagator envelope sweep as CSV.
    Sweep(SweepArgs),
    /// Exploratory space-time experiment (no acceptance claim).
    Probe(ProbeArgs),
    /// Octave-restricted L2 masses of a named function (d = 1).
    Octaves(OctaveArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Gaussian,
    #[value(name = "cube-indicator")]
    CubeIndicator,
    #[value(name = "sinc-dual")]
    SincDual,
    #[value(name = "counterexample-g")]
    CounterexampleG,
    #[value(name = "random-bandlimited")]
    RandomBandlimited,
}

#[derive(Args)]
struct GridArgs {
    /// Dimension.
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Resolution exponent (frequency spacing 2^-a).
    #[arg(long, default_value_t = 6)]
    a: i64,
    /// Extent exponent (frequency box [-2^b, 2^b)).
    #[arg(long, default_value_t = 6)]
    b: i64,
}

impl GridArgs {
    fn grid(&self) -> anyhow::Result<GridSpec> {
        GridSpec::new(self.d, self.a, self.b).map_err(usage)
    }
}

#[derive(Args)]
struct FunctionArgs {
    /// Built-in kind, or a path to a snapshot file.
    input: String,
    #[command(flatten)]
    grid: GridArgs,
    /// Seed for random-bandlimited.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Support box lo:hi for random-bandlimited.
    #[arg(long, default_value = "-4:4", value_parser = parse_range, allow_hyphen_values = true)]
    band: (f64, f64),
    /// Dyadic pre-dilation applied to the function (power of two).
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    dilate: i64,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: f64 = lo.parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.parse().map_err(|e| format!("{e}"))?;
    if !(lo < hi) {
        return Err("expected lo < hi".into());
    }
    Ok((lo, hi))
}

fn usage(e: impl std::fmt::Display) -> anyhow::Error {
    anyhow!("usage: {e}")
}

impl FunctionArgs {
    fn kind(&self) -> Option<SyntheticKind> {
        match self.input.as_str() {
            "gaussian" => Some(SyntheticKind::Gaussian),
            "cube-indicator" => Some(SyntheticKind::CubeIndicator),
            "sinc-dual" => Some(SyntheticKind::SincDual),
            "counterexample-g" => Some(SyntheticKind::LogSingular),
            "random-bandlimited" => Some(SyntheticKind::RandomBandlimited {
                seed: self.seed,
                box_region: BoxRegion::cube(self.grid.d, self.band.0, self.band.1),
            }),
            "zero" => None,
            _ => None,
        }
    }

    /// The function and the grid to evaluate it on. Snapshot inputs carry
    /// their own grid.
    fn resolve(&self) -> anyhow::Result<(SpectralFunction, GridSpec)> {
        if self.input == "zero" {
            return Ok((SpectralFunction::zero(self.grid.d), self.grid.grid()?));
        }
        if let Some(kind) = self.kind() {
            let f = synthesize(kind, self.grid.d).map_err(usage)?;
            let f = if self.dilate != 0 { dilate_dyadic(&f, self.dilate) } else { f };
            return Ok((f, self.grid.grid()?));
        }
        let path = PathBuf::from(&self.input);
        if !path.exists() {
            bail!("usage: `{}` is neither a builtin kind nor a file", self.input);
        }
        let mut file = fs::File::open(&path).with_context(|| format!("open {path:?}"))?;
        let field = modscale::snapshot::read_field(&mut file)?;
        let grid = field.grid;
        Ok((field.into_function(), grid))
    }
}

#[derive(Args)]
struct GenArgs {
    /// Function kind.
    #[arg(value_enum)]
    kind: KindArg,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value = "-4:4", value_parser = parse_range, allow_hyphen_values = true)]
    band: (f64, f64),
    /// Output path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    Mod,
    Frak,
    Famalgam,
    #[value(name = "frak-famalgam")]
    FrakFamalgam,
    Fx,
    Wiener,
    Stft,
}

#[derive(Args)]
struct NormArgs {
    #[command(flatten)]
    function: FunctionArgs,
    /// Which norm to compute.
    #[arg(long, value_enum)]
    space: SpaceArg,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[arg(long, default_value_t = 2.0)]
    r: f64,
    /// Single scale for per-scale norms.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    j: i64,
    /// Scale window for aggregated norms.
    #[arg(long, default_value_t = -12, allow_negative_numbers = true)]
    j_min: i64,
    #[arg(long, default_value_t = 8, allow_negative_numbers = true)]
    j_max: i64,
    /// Weight: `wp:P`, `pp0:P:P0:Q`, `power:C:BPLUS:BMINUS`,
    /// `morrey:P:Q:first|second`, `one`, inline JSON, or a JSON file path.
    #[arg(long, default_value = "one")]
    weight: String,
    /// Write per-cell norms as CSV here (aggregated spaces only).
    #[arg(long)]
    per_cell_csv: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Suite name, `determinism`, or `all`.
    suite: String,
    /// JSON config overriding grid exponents, scale windows, tolerances.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Fixed,
    Dual,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    kind: SweepKind,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[arg(long, default_value_t = 6)]
    j_max: i64,
    #[arg(long, default_value_t = 4)]
    t_exp: i64,
    /// log2 frequency width of the swept gaussian.
    #[arg(long, default_value_t = 7)]
    width: i64,
    /// Output CSV path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long, default_value_t = 2.5)]
    p: f64,
    #[arg(long, default_value_t = 6.0)]
    q: f64,
    /// Ensemble size (seeded band-limited functions).
    #[arg(long, default_value_t = 6)]
    ensemble: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 2.0)]
    time_window: f64,
    #[arg(long, default_value_t = 64)]
    time_steps: usize,
}

#[derive(Args)]
struct OctaveArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[arg(long, default_value_t = -30, allow_negative_numbers = true)]
    j_min: i64,
    #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
    j_max: i64,
    #[arg(long, default_value_t = 512)]
    samples: usize,
}

fn parse_weight(spec: &str, d: usize) -> anyhow::Result<VectorWeight> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> anyhow::Result<f64> {
        s.parse::<f64>().map_err(|e| usage(format!("bad number `{s}`: {e}")))
    };
    match parts.as_slice() {
        ["one"] => Ok(VectorWeight::constant_one()),
        ["wp", p] => embedding_weight(num(p)?, d).map_err(usage),
        ["pp0", p, p0, q] => lp_scaling_weight(num(p)?, num(p0)?, num(q)?, d).map_err(usage),
        ["power", c, bp, bm] => VectorWeight::power(num(c)?, num(bp)?, num(bm)?).map_err(usage),
        ["morrey", p, q, which] => {
            let (first, second) = morrey_weights(num(p)?, num(q)?, d).map_err(usage)?;
            match *which {
                "first" => Ok(first),
                "second" => Ok(second),
                other => Err(usage(format!("morrey selector must be first|second, got {other}"))),
            }
        }
        _ if spec.trim_start().starts_with('{') => VectorWeight::from_json(spec).map_err(usage),
        [path] if PathBuf::from(path).exists() => {
            let text = fs::read_to_string(path)?;
            VectorWeight::from_json(&text).map_err(usage)
        }
        _ => Err(usage(format!("unrecognized weight spec `{spec}`"))),
    }
}

fn single_scale_report(j: i64, value: f64) -> NormReport {
    NormReport { value, per_j: vec![(j, value)], boundary_flag: false, per_cell: None }
}

fn cmd_gen(args: &GenArgs) -> anyhow::Result<()> {
    let kind = match args.kind {
        KindArg::Gaussian => SyntheticKind::Gaussian,
        KindArg::CubeIndicator => SyntheticKind::CubeIndicator,
        KindArg::SincDual => SyntheticKind::SincDual,
        KindArg::CounterexampleG => SyntheticKind::LogSingular,
        KindArg::RandomBandlimited => SyntheticKind::RandomBandlimited {
            seed: args.seed,
            box_region: BoxRegion::cube(args.grid.d, args.band.0, args.band.1),
        },
    };
    let grid = args.grid.grid()?;
    let f = synthesize(kind, args.grid.d).map_err(usage)?;
    let field = f.sample(&grid)?;
    let mut file = fs::File::create(&args.out).with_context(|| format!("create {:?}", args.out))?;
    modscale::snapshot::write_field(&mut file, &field)?;
    eprintln!("wrote {} samples to {:?}", field.values.len(), args.out);
    Ok(())
}

fn cmd_norm(args: &NormArgs) -> anyhow::Result<()> {
    let (f, grid) = args.function.resolve()?;
    let pou = PartitionOfUnity::new(grid.dim())?;
    let weight = parse_weight(&args.weight, grid.dim())?;
    let exponents_ok = [args.p, args.q, args.r].iter().all(|v| v.is_finite() && *v >= 1.0);
    if !exponents_ok {
        bail!("usage: exponents must be finite and >= 1 (got p={}, q={}, r={})", args.p, args.q, args.r);
    }
    let report = match args.space {
        SpaceArg::Mod => single_scale_report(
            args.j,
            modscale::mod_norm(&f, args.p, args.q, args.j, &pou, &grid)?,
        ),
        SpaceArg::Famalgam => single_scale_report(
            args.j,
            modscale::amalgam::famalgam_norm(&f, args.p, args.q, args.j, &pou, &grid)?,
        ),
        SpaceArg::Frak | SpaceArg::FrakFamalgam => {
            let mut spec =
                NormSpec::new(args.p, args.q, args.r, weight.clone(), args.j_min, args.j_max)
                    .map_err(usage)?;
            if args.per_cell_csv.is_some() {
                spec = spec.with_cells();
            }
            let adm = weight.is_admissible(args.p, args.q, grid.dim());
            if !adm.admissible {
                eprintln!(
                    "warning: weight is not admissible for (p, q) = ({}, {}) (margin {:.3e})",
                    args.p, args.q, adm.margin
                );
            }
            match args.space {
                SpaceArg::Frak => modscale::scaled_norm(&f, &spec, &pou, &grid)?,
                _ => modscale::amalgam::scaled_famalgam_norm(&f, &spec, &pou, &grid)?,
            }
        }
        SpaceArg::Fx => single_scale_report(
            0,
            modscale::amalgam::fx_norm(&f, args.p, args.q, args.j_min, args.j_max, &pou, &grid)?,
        ),
        SpaceArg::Wiener => single_scale_report(
            0,
            modscale::amalgam::wiener_amalgam_norm(&f, args.p, args.q, &pou, &grid)?,
        ),
        SpaceArg::Stft => single_scale_report(
            args.j,
            stft_mod_norm(&f, &Window::gaussian(grid.dim()), args.p, args.q, args.j, &grid)?,
        ),
    };
    if let Some(path) = &args.per_cell_csv {
        match report.per_cell_csv() {
            Some(csv) => fs::write(path, csv)?,
            None => bail!("usage: --per-cell-csv needs --space frak"),
        }
    }
    println!("{}", report.to_json());
    Ok(())
}

fn load_config(path: &Option<PathBuf>) -> anyhow::Result<CheckConfig> {
    match path {
        None => Ok(CheckConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("read {p:?}"))?;
            serde_json::from_str(&text).map_err(|e| usage(format!("bad config: {e}")))
        }
    }
}

fn cmd_check(args: &CheckArgs) -> anyhow::Result<bool> {
    let cfg = load_config(&args.config)?;
    let names: Vec<&str> = match args.suite.as_str() {
        "all" => SUITES.to_vec(),
        other => vec![other],
    };
    let mut all_pass = true;
    let stdout = std::io::stdout();
    for name in names {
        let report = if name == "determinism" {
            determinism_report(&cfg)?
        } else {
            run_suite(name, &cfg).map_err(|e| match e {
                modscale::Error::UnknownKind(_) => usage(format!("unknown suite `{name}`")),
                other => other.into(),
            })?
        };
        all_pass &= report.passed();
        let mut lock = stdout.lock();
        lock.write_all(report.render().as_bytes())?;
    }
    Ok(all_pass)
}

fn cmd_sweep(args: &SweepArgs) -> anyhow::Result<()> {
    let pou = PartitionOfUnity::new(1)?;
    let cq = ChirpQuad::default();
    let f = dilate_dyadic(&synthesize(SyntheticKind::Gaussian, 1)?, args.width);
    let j_list: Vec<i64> = (0..=args.j_max).collect();
    let t_list: Vec<f64> = (-args.t_exp..=args.t_exp).map(modscale::util::pow2).collect();
    let rows = match args.kind {
        SweepKind::Fixed => {
            envelope_sweep_fixed(&f, args.p, args.q, &j_list, &t_list, &pou, &cq)?
        }
        SweepKind::Dual => envelope_sweep_dual(&f, args.p, args.q, &j_list, &t_list, &pou, &cq)?,
    };
    let csv = sweep_csv(&rows);
    match &args.out {
        Some(path) => fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_probe(args: &ProbeArgs) -> anyhow::Result<()> {
    let grid = GridSpec::new(1, 9, 2)?;
    let ensemble: Vec<SpectralFunction> = (0..args.ensemble)
        .map(|i| {
            synthesize(
                SyntheticKind::RandomBandlimited {
                    seed: args.seed + i as u64,
                    box_region: BoxRegion::cube(1, -3.0, 3.0),
                },
                1,
            )
            .map_err(anyhow::Error::from)
        })
        .collect::<anyhow::Result<_>>()?;
    let cfg = SpaceTimeConfig {
        time_window: args.time_window,
        time_steps: args.time_steps,
        grid,
        j_min: -6,
        j_max: 6,
    };
    let rows = space_time_probe(&ensemble, args.p, args.q, &cfg).map_err(usage)?;
    println!("# exploratory space-time experiment; ratio evidence only, no bound asserted");
    println!("space_time,fx,scaled,st_over_fx,st_over_scaled");
    for r in rows {
        println!(
            "{:.10e},{:.10e},{:.10e},{:.6},{:.6}",
            r.space_time,
            r.fx,
            r.scaled,
            r.space_time / r.fx,
            r.space_time / r.scaled
        );
    }
    Ok(())
}

fn cmd_octaves(args: &OctaveArgs) -> anyhow::Result<()> {
    let (f, _) = args.function.resolve()?;
    println!("j,mass");
    for j in args.j_min..=args.j_max {
        let m = octave_l2_mass(&f, j, args.samples)?;
        println!("{j},{m:.10e}");
    }
    Ok(())
}

fn install_thread_pool() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("MODSCALE_THREADS") {
        let n: usize = v.parse().map_err(|e| usage(format!("MODSCALE_THREADS: {e}")))?;
        if n == 0 {
            return Err(usage("MODSCALE_THREADS must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| anyhow!("thread pool: {e}"))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = install_thread_pool() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let outcome = match &cli.command {
        Command::Gen(args) => cmd_gen(args).map(|()| true),
        Command::Norm(args) => cmd_norm(args).map(|()| true),
        Command::Check(args) => cmd_check(args),
        Command::Sweep(args) => cmd_sweep(args).map(|()| true),
        Command::Probe(args) => cmd_probe(args).map(|()| true),
        Command::Octaves(args) => cmd_octaves(args).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let msg = format!("{e:#}");
            eprintln!("error: {msg}");
            if msg.starts_with("usage:") {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
