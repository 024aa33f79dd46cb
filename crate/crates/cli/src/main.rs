mod config;

use clap::{Parser, Subcommand};
use config::RunConfig;
use qnn_witness::compiler::{compile_schedule, verify_circuit, CompileOptions};
use qnn_witness::shots::sweep;
use qnn_witness::trainer::{bootstrap_chain, bootstrap_summary_csv, fit_chunks, random_schedule, train};
use qnn_witness::witness::WitnessRow;
use qnn_witness::{
    build_training_set, export_qasm, fixtures, make_pair_state, witness_value, Error, GateOp, Method, PairStateKind,
    Schedule, ShotConfig, TrainResult, TrainerConfig,
};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Trainable pairwise entanglement witness: propagate, compile, train and sample.
#[derive(Parser, Debug)]
#[command(name = "qnn-witness", version)]
struct Cli {
    /// JSON file with default option values; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print which command regenerates each published table and figure.
    #[arg(long)]
    list_repro: bool,
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Print witness values as CSV.
    Witness,
    /// Compare the compiled circuit against the propagators (JSON report).
    Verify,
    /// Train a schedule; writes schedule.json and rms_history.csv.
    Train,
    /// Train N = from..=n-qubits, each seeded by the previous size.
    Bootstrap,
    /// Compile a schedule to OpenQASM 2.0 and print gate counts.
    Compile,
    /// Finite-shot sweep; writes one CSV per state.
    Sample,
}

const REPRO: &[(&str, &str, &str)] = &[
    ("table1", "witness values for the four states, chunked and gate columns", "qnn-witness witness --schedule table2"),
    ("table2", "two-qubit trained schedule", "qnn-witness train --n-qubits 2 --out-dir out/table2"),
    ("table3", "seven-qubit schedule", "qnn-witness bootstrap --from 2 --n-qubits 7 --out-dir out/bootstrap4"),
    ("table4", "rms per register size, 4 and 8 chunks", "qnn-witness bootstrap --from 2 --n-qubits 7 --chunks 8 --out-dir out/bootstrap8"),
    ("fig1", "witness variance against shot count", "qnn-witness sample --state flat,c --out-dir out/fig1"),
    ("fig2", "95% confidence bands for Bell and P", "qnn-witness sample --state bell,p --out-dir out/fig2"),
    ("fig3", "tunneling per chunk against N", "qnn-witness bootstrap --from 2 --n-qubits 7 --out-dir out/bootstrap4"),
    ("fig4", "bias and coupling per chunk against N", "qnn-witness bootstrap --from 2 --n-qubits 7 --out-dir out/bootstrap4"),
    ("fig5", "bias per chunk, 4 against 8 chunks", "qnn-witness bootstrap --from 2 --n-qubits 7 --chunks 8 --out-dir out/bootstrap8"),
    ("gate-counts", "one- and two-qubit gate totals", "qnn-witness compile --schedule table2 --no-elide --out-dir out/compile"),
    ("validation", "gate sequence against chunked propagator", "qnn-witness verify --schedule table2"),
];

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn threshold(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::IndexOutOfRange { .. } | Error::DimensionMismatch { .. } | Error::CapExceeded { .. } => 3,
            Error::Diverged { .. } => 4,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::input(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

/// `println!` that tolerates a closed stdout.
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    if cli.list_repro {
        for (id, what, cmd) in REPRO {
            out!("{id:<12} {what}\n             {cmd}");
        }
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(Failure::input("no subcommand given (see --help)"));
    };
    let file = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    let opts = cli.run.merged_over(file);
    match command {
        Command::Witness => cmd_witness(&opts),
        Command::Verify => cmd_verify(&opts),
        Command::Train => cmd_train(&opts),
        Command::Bootstrap => cmd_bootstrap(&opts),
        Command::Compile => cmd_compile(&opts),
        Command::Sample => cmd_sample(&opts),
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("QNN_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::input(format!("QNN_THREADS must be a positive integer, got \"{value}\"")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::input(e.to_string()))
}

fn load_schedule(name: &str) -> CliResult<Schedule> {
    let text = match fixtures::by_name(name) {
        Some(text) => text.to_owned(),
        None => fs::read_to_string(name).map_err(|e| Failure::input(format!("{name}: {e}")))?,
    };
    Schedule::from_json(&text).map_err(|e| Failure::input(format!("{name}: {e}")))
}

/// Loads `--schedule` (default `fallback`) and applies `--n-qubits` / `--chunks`.
fn schedule_from(opts: &RunConfig, fallback: &str) -> CliResult<Schedule> {
    let mut s = load_schedule(opts.schedule.as_deref().unwrap_or(fallback))?;
    if let Some(n) = opts.n_qubits.filter(|n| *n != s.n_qubits()) {
        if !s.is_symmetric() {
            return Err(Failure {
                code: 3,
                message: format!("schedule has {} qubits and is not symmetric; cannot resize to {n}", s.n_qubits()),
            });
        }
        s = s.resized(n)?;
    }
    if let Some(c) = opts.chunks {
        s = fit_chunks(&s, c)?;
    }
    Ok(s)
}

fn parse_pair(opts: &RunConfig) -> CliResult<(usize, usize)> {
    let Some(text) = &opts.pair else {
        return Ok((0, 1));
    };
    let parts: Vec<_> = text.split(',').map(|p| p.trim().parse::<usize>()).collect();
    match parts.as_slice() {
        [Ok(i), Ok(j)] if i < j => Ok((*i, *j)),
        _ => Err(Failure::input(format!("pair must be \"i,j\" with i < j, got \"{text}\""))),
    }
}

fn parse_list<T>(text: Option<&str>, all: &[T]) -> CliResult<Vec<T>>
where
    T: std::str::FromStr<Err = Error> + Copy,
{
    match text {
        None | Some("all") => Ok(all.to_vec()),
        Some(t) => t.split(',').map(|p| p.trim().parse::<T>().map_err(Failure::from)).collect(),
    }
}

fn parse_shots(text: &str) -> CliResult<Vec<usize>> {
    let bad = || Failure::input(format!("shots must be N, a,b,c or start:stop:step, got \"{text}\""));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    if text.contains(':') {
        let parts = text.split(':').map(num).collect::<CliResult<Vec<_>>>()?;
        match parts.as_slice() {
            [start, stop, step] if *step > 0 && start <= stop => Ok((*start..=*stop).step_by(*step).collect()),
            _ => Err(bad()),
        }
    } else {
        text.split(',').map(num).collect()
    }
}

fn out_dir(opts: &RunConfig) -> CliResult<PathBuf> {
    let dir = opts.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn trainer_config(opts: &RunConfig) -> CliResult<TrainerConfig> {
    let d = TrainerConfig::default();
    let methods = parse_list(opts.method.as_deref(), &[d.method])?;
    let [method] = methods.as_slice() else {
        return Err(Failure::input("training needs a single method"));
    };
    let config = TrainerConfig {
        learning_rate: opts.learning_rate.unwrap_or(d.learning_rate),
        momentum: opts.momentum.unwrap_or(d.momentum),
        max_epochs: opts.max_epochs.unwrap_or(d.max_epochs),
        target_rms: opts.target_rms.unwrap_or(d.target_rms),
        gradient_step: opts.gradient_step.unwrap_or(d.gradient_step),
        chunk_count: opts.chunks.unwrap_or(d.chunk_count),
        seed: opts.seed.unwrap_or(d.seed),
        method: *method,
        ..d
    };
    config.validate()?;
    Ok(config)
}

fn cmd_witness(opts: &RunConfig) -> CliResult<()> {
    let s = schedule_from(opts, "table2")?;
    let pair = parse_pair(opts)?;
    let kinds = parse_list(opts.state.as_deref(), &PairStateKind::ALL)?;
    let methods = parse_list(opts.method.as_deref(), &[Method::Exact, Method::Chunked, Method::Gates])?;
    let mut rows = Vec::new();
    for kind in kinds {
        let psi = make_pair_state(kind, pair, s.n_qubits())?.into();
        for &method in &methods {
            let value = witness_value(&psi, pair, &s, method)?;
            rows.push(WitnessRow { kind, pair, method, value });
        }
    }
    out!("{}", WitnessRow::CSV_HEADER);
    for row in rows {
        out!("{}", row.to_csv());
    }
    Ok(())
}

fn cmd_verify(opts: &RunConfig) -> CliResult<()> {
    let s = schedule_from(opts, "table2")?;
    let mut circuit = compile_schedule(&s, &CompileOptions { elide: !opts.no_elide });
    if let Some(delta) = opts.perturb_angle {
        let op = circuit
            .ops_mut()
            .iter_mut()
            .find(|op| op.as_rotation().is_some())
            .ok_or_else(|| Failure::input("circuit has no rotation to perturb"))?;
        let (axis, qubit, angle) = op.as_rotation().expect("rotation");
        *op = GateOp::rotation(axis, qubit, angle + delta);
    }
    let report = verify_circuit(&s, &circuit)?;
    out!("{}", report.to_json());
    let worst = report
        .states
        .iter()
        .map(|d| d.gate_vs_chunked)
        .fold(report.frobenius_gate_vs_chunked, f64::max);
    if worst > 1e-9 {
        return Err(Failure::threshold(format!("gate circuit deviates from chunked propagator by {worst:.3e}")));
    }
    Ok(())
}

fn save_divergence(dir: &Path, e: Error) -> Failure {
    if let Error::Diverged { last_good, .. } = &e {
        let path = dir.join("last_good.json");
        if let Err(f) = write(&path, &last_good.to_json()) {
            return f;
        }
        eprintln!("last good schedule written to {}", path.display());
    }
    e.into()
}

fn write_training(dir: &Path, suffix: &str, result: &TrainResult) -> CliResult<()> {
    write(&dir.join(format!("schedule{suffix}.json")), &result.schedule.to_json())?;
    write(&dir.join(format!("rms_history{suffix}.csv")), &result.history_csv())
}

fn cmd_train(opts: &RunConfig) -> CliResult<()> {
    let config = trainer_config(opts)?;
    let dir = out_dir(opts)?;
    let init = match opts.schedule {
        Some(_) => schedule_from(opts, "table2")?,
        None => random_schedule(opts.n_qubits.unwrap_or(2), &config)?,
    };
    let set = build_training_set(init.n_qubits())?;
    let result = train(&init, &set, &config).map_err(|e| save_divergence(&dir, e))?;
    write_training(&dir, "", &result)?;
    out!(
        "n_qubits={} epochs={} initial_rms={:.6e} final_rms={:.6e} converged={}",
        init.n_qubits(),
        result.epochs_used,
        result.rms_history[0],
        result.final_rms(),
        result.converged
    );
    if !result.converged && config.max_epochs > 0 {
        return Err(Failure::threshold(format!(
            "rms {:.4e} above target {:.1e} after {} epochs",
            result.final_rms(),
            config.target_rms,
            result.epochs_used
        )));
    }
    Ok(())
}

fn cmd_bootstrap(opts: &RunConfig) -> CliResult<()> {
    let config = trainer_config(opts)?;
    let dir = out_dir(opts)?;
    let init = load_schedule(opts.schedule.as_deref().unwrap_or("table2"))?;
    let from = opts.from.unwrap_or(2);
    let to = opts.n_qubits.unwrap_or(7);
    let steps = bootstrap_chain(&init, from, to, &config).map_err(|e| save_divergence(&dir, e))?;
    for step in &steps {
        write_training(&dir, &format!("_n{}", step.n_qubits), &step.result)?;
        out!(
            "n_qubits={} epochs={} initial_rms={:.6e} final_rms={:.6e}",
            step.n_qubits,
            step.result.epochs_used,
            step.initial_rms,
            step.result.final_rms()
        );
    }
    write(&dir.join("summary.csv"), &bootstrap_summary_csv(&steps))?;
    if let Some(step) = steps.iter().find(|s| !s.result.converged) {
        return Err(Failure::threshold(format!(
            "N={} stopped at rms {:.4e} above target {:.1e}",
            step.n_qubits,
            step.result.final_rms(),
            config.target_rms
        )));
    }
    Ok(())
}

fn cmd_compile(opts: &RunConfig) -> CliResult<()> {
    let s = schedule_from(opts, "table2")?;
    let circuit = compile_schedule(&s, &CompileOptions { elide: !opts.no_elide });
    let path = out_dir(opts)?.join("circuit.qasm");
    write(&path, &export_qasm(&circuit))?;
    let (one, two) = circuit.gate_counts();
    out!("1q={one} 2q={two}");
    Ok(())
}

fn cmd_sample(opts: &RunConfig) -> CliResult<()> {
    let s = schedule_from(opts, "table2")?;
    let pair = parse_pair(opts)?;
    let kinds = parse_list(opts.state.as_deref(), &[PairStateKind::Bell])?;
    let d = ShotConfig::default();
    let config = ShotConfig {
        shot_counts: match &opts.shots {
            Some(text) => parse_shots(text)?,
            None => d.shot_counts,
        },
        iterations: opts.iterations.unwrap_or(d.iterations),
        confidence_level: opts.confidence_level.unwrap_or(d.confidence_level),
        seed: opts.seed.unwrap_or(d.seed),
    };
    config.validate()?;
    let dir = out_dir(opts)?;
    for kind in kinds {
        let stats = sweep(&s, kind, pair, &config)?;
        let path = dir.join(format!("shots_{}.csv", kind.name()));
        write(&path, &stats.to_csv())?;
        let last = stats.rows.last().expect("nonempty sweep");
        out!(
            "state={kind} shots={} mean={:.6e} ci=[{:.6e},{:.6e}] -> {}",
            last.shot_count,
            last.mean,
            last.ci_low,
            last.ci_high,
            path.display()
        );
    }
    Ok(())
}
