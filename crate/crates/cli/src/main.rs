//! `qtherm`: thermalization traces, channel verification, phase-diagram
//! sweeps and non-Markovianity scans.
//!
//! Exit codes: 0 success, 1 usage or runtime error, 2 verification failure.
//! `QTHERM_THREADS` overrides the worker count of the sweep.

mod parse;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use qtherm_core::channel::{
    affine_from_params, ancilla_density, channel_from_unitary, choi_of, parametrized_unitary,
    AncillaState,
};
use qtherm_core::fourqubit::{run_sweep, Propagator, SweepConfig};
use qtherm_core::hamiltonian::{
    solve_thermal_params, thermal_ancilla, thermal_unitary, ThermalizerSpec,
};
use qtherm_core::master::{affine_from_master, thermalization_trace};
use qtherm_core::nonmarkov::{
    increasing_flags, nonmarkov_witness, trace_distance_series, uniform_grid, DephasingSpec,
};
use qtherm_core::report::{nonmarkov_csv, phase_ppm, sweep_csv, thermalize_csv};
use qtherm_core::thermo::TemperatureAssignment;
use qtherm_core::{BlochVector, ThermalParam};

use parse::OmegaArg;

const VERIFY_TOL: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(name = "qtherm", version, about = "Qubit thermalization toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form relaxation of a qubit toward its thermal state.
    Thermalize(ThermalizeArgs),
    /// Compare the master-equation channel with its ancilla simulation.
    ChannelVerify(VerifyArgs),
    /// Classify heating/cooling of two coupled qubits over a grid of bath parameters.
    PhaseDiagram(PhaseArgs),
    /// Trace distance under σz⊗σz dephasing and its increase intervals.
    Nonmarkov(NonmarkovArgs),
}

#[derive(Args, Debug)]
struct ThermalizeArgs {
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.5)]
    g: f64,
    #[arg(long = "t-max", default_value_t = 30.0)]
    t_max: f64,
    #[arg(long, default_value_t = 101)]
    samples: usize,
    /// Initial Bloch vector r1,r2,r3.
    #[arg(long, default_value = "0,0,1", value_parser = parse::bloch, allow_hyphen_values = true)]
    r0: BlochVector,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.5)]
    g: f64,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Perturb the ancilla state (negative control).
    #[arg(long, hide = true)]
    corrupt: bool,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum PropagatorArg {
    Integrated,
    TimeOrdered,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum AssignmentArg {
    Populations,
    Spectrum,
}

#[derive(Args, Debug)]
struct PhaseArgs {
    /// ket00, bell, pure:ψ,θ,φ (angles accept a `pi` suffix) or thermal:gA,gB.
    #[arg(long, default_value = "ket00")]
    init: String,
    #[arg(long, default_value_t = 1.0)]
    gamma1: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma2: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma3: f64,
    #[arg(long, default_value_t = 16)]
    grid: usize,
    #[arg(long = "g-min", default_value_t = 0.05)]
    g_min: f64,
    #[arg(long = "g-max", default_value_t = 0.95)]
    g_max: f64,
    #[arg(long = "t-final", default_value_t = 1000.0)]
    t_final: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a P6 image of the class grid.
    #[arg(long)]
    ppm: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "integrated")]
    propagator: PropagatorArg,
    /// Steps of the time-ordered product.
    #[arg(long, default_value_t = 100_000)]
    steps: usize,
    /// How a reduced state is assigned a thermal parameter.
    #[arg(long, value_enum, default_value = "populations")]
    assignment: AssignmentArg,
}

#[derive(Args, Debug)]
struct NonmarkovArgs {
    #[arg(long, allow_hyphen_values = true)]
    gz: f64,
    /// const:ω₀ or table:path.
    #[arg(long, default_value = "const:1", value_parser = parse::omega)]
    omega: OmegaArg,
    #[arg(long = "t-max", default_value_t = 3.2)]
    t_max: f64,
    /// Number of grid points on [0, t-max].
    #[arg(long, default_value_t = 3201)]
    grid: usize,
    #[arg(long, default_value = "1,0,0", value_parser = parse::bloch, allow_hyphen_values = true)]
    r0: BlochVector,
    #[arg(long, default_value = "-1,0,0", value_parser = parse::bloch, allow_hyphen_values = true)]
    s0: BlochVector,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Verification(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn usage(flag: &str, e: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("invalid value for {flag}: {e}"))
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("cannot write {}", p.display())),
        None => std::io::stdout()
            .write_all(bytes)
            .context("cannot write to stdout"),
    }
}

fn thermalize(a: ThermalizeArgs) -> Result<(), Failure> {
    let th = ThermalParam::new(a.g, a.gamma).map_err(|e| {
        if !(0.0..=1.0).contains(&a.g) || a.g.is_nan() {
            usage("--g", e)
        } else {
            usage("--gamma", e)
        }
    })?;
    if !(a.t_max >= 0.0 && a.t_max.is_finite()) {
        return Err(usage("--t-max", "must be a non-negative number"));
    }
    if a.samples == 0 {
        return Err(usage("--samples", "need at least one sample"));
    }
    if !a.r0.is_physical() {
        return Err(usage("--r0", "Bloch vector lies outside the unit ball"));
    }
    let trace = thermalization_trace(a.r0, &th, a.t_max, a.samples)
        .map_err(|e| Failure::Runtime(e.into()))?;
    write_output(a.out.as_deref(), thermalize_csv(&trace).as_bytes())?;
    Ok(())
}

fn channel_verify(a: VerifyArgs) -> Result<(), Failure> {
    let th = ThermalParam::new(a.g, a.gamma).map_err(|e| {
        if !(0.0..=1.0).contains(&a.g) || a.g.is_nan() {
            usage("--g", e)
        } else {
            usage("--gamma", e)
        }
    })?;
    if !(a.t >= 0.0 && a.t.is_finite()) {
        return Err(usage("--t", "must be a non-negative number"));
    }
    let run = || -> anyhow::Result<Vec<(String, f64)>> {
        let master = choi_of(&affine_from_master(&th, a.t)?);
        let mut ancilla = thermal_ancilla(a.g);
        if a.corrupt {
            ancilla = AncillaState {
                lambda: if a.g > 0.5 { a.g - 0.1 } else { a.g + 0.1 },
                ..ancilla
            };
        }
        let u = thermal_unitary(&ThermalizerSpec::canonical(a.gamma)?, a.t)?;
        let sim = channel_from_unitary(&u, &ancilla_density(&ancilla)?)?;
        let mut rows = vec![("thermalizer".to_string(), sim.choi().distance(&master))];
        for (k, p) in solve_thermal_params(a.gamma, a.g, a.t)?.iter().enumerate() {
            let sim =
                channel_from_unitary(&parametrized_unitary(p), &ancilla_density(&p.ancilla())?)?;
            let d = sim.choi().distance(&master);
            let formula = choi_of(&affine_from_params(p)).distance(&master);
            rows.push((format!("set{}", k + 1), d.max(formula)));
        }
        Ok(rows)
    };
    let rows = run()?;
    let mut worst = 0.0f64;
    for (name, d) in &rows {
        println!("{name} choi distance: {d:.6e}");
        worst = worst.max(*d);
    }
    if worst < VERIFY_TOL {
        println!("verified (tolerance {VERIFY_TOL:e})");
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "choi distance {worst:.6e} exceeds {VERIFY_TOL:e}"
        )))
    }
}

fn phase_diagram(a: PhaseArgs) -> Result<(), Failure> {
    let init = parse::init_state(&a.init).map_err(|e| usage("--init", e))?;
    for (flag, g) in [
        ("--gamma1", a.gamma1),
        ("--gamma2", a.gamma2),
        ("--gamma3", a.gamma3),
    ] {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(usage(flag, "must be a non-negative number"));
        }
    }
    if a.grid < 2 {
        return Err(usage("--grid", "need at least 2 points per axis"));
    }
    for (flag, g) in [("--g-min", a.g_min), ("--g-max", a.g_max)] {
        if !(g > 0.0 && g <= 1.0) {
            return Err(usage(flag, "must lie in (0, 1]"));
        }
    }
    if a.g_max < a.g_min {
        return Err(usage("--g-max", "must not be below --g-min"));
    }
    if !(a.t_final > 0.0 && a.t_final.is_finite()) {
        return Err(usage("--t-final", "must be positive"));
    }
    if a.steps == 0 {
        return Err(usage("--steps", "need at least one step"));
    }
    let cfg = SweepConfig {
        gamma1: a.gamma1,
        gamma2: a.gamma2,
        gamma3: a.gamma3,
        t_final: a.t_final,
        grid_n: a.grid,
        g1_range: (a.g_min, a.g_max),
        g2_range: (a.g_min, a.g_max),
        init,
        propagator: match a.propagator {
            PropagatorArg::Integrated => Propagator::Integrated,
            PropagatorArg::TimeOrdered => Propagator::TimeOrdered,
        },
        time_ordered_steps: a.steps,
        assignment: match a.assignment {
            AssignmentArg::Populations => TemperatureAssignment::Populations,
            AssignmentArg::Spectrum => TemperatureAssignment::Spectrum,
        },
        ..SweepConfig::default()
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let cells = run_sweep(&cfg).context("sweep failed")?;
    write_output(a.out.as_deref(), sweep_csv(&cells).as_bytes())?;
    if let Some(path) = a.ppm.as_deref() {
        let img = phase_ppm(&cells, cfg.grid_n).map_err(anyhow::Error::from)?;
        write_output(Some(path), &img)?;
    }
    Ok(())
}

fn nonmarkov(a: NonmarkovArgs) -> Result<(), Failure> {
    if a.gz.is_nan() || a.gz.abs() > 1.0 {
        return Err(usage("--gz", "must lie in [-1, 1]"));
    }
    let spec = match &a.omega {
        OmegaArg::Constant(w) => DephasingSpec::constant(*w, a.gz),
        OmegaArg::Table(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            let (times, values) = parse::omega_table(&text).map_err(|e| usage("--omega", e))?;
            DephasingSpec::table(times, values, a.gz)
        }
    }
    .map_err(|e| usage("--omega", e))?;
    let grid = uniform_grid(a.t_max, a.grid).map_err(|e| usage("--t-max/--grid", e))?;
    for (flag, v) in [("--r0", a.r0), ("--s0", a.s0)] {
        if !v.is_physical() {
            return Err(usage(flag, "Bloch vector lies outside the unit ball"));
        }
    }
    let distances =
        trace_distance_series(a.r0, a.s0, &spec, &grid).map_err(|e| usage("--omega", e))?;
    let flags = increasing_flags(&distances);
    let csv = nonmarkov_csv(&grid, &distances, &flags).map_err(anyhow::Error::from)?;
    write_output(a.out.as_deref(), csv.as_bytes())?;
    let intervals = nonmarkov_witness(a.r0, a.s0, &spec, &grid).map_err(anyhow::Error::from)?;
    let listed: Vec<String> = intervals
        .iter()
        .map(|(s, e)| format!("({s:.6}, {e:.6})"))
        .collect();
    let summary = format!("increasing intervals: [{}]", listed.join(", "));
    if a.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn configure_threads() {
    if let Some(n) = std::env::var("QTHERM_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    configure_threads();
    let result = match cli.command {
        Command::Thermalize(a) => thermalize(a),
        Command::ChannelVerify(a) => channel_verify(a),
        Command::PhaseDiagram(a) => phase_diagram(a),
        Command::Nonmarkov(a) => nonmarkov(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
