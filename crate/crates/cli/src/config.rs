use clap::Args;
use serde::Deserialize;
use std::path::PathBuf;

/// Options shared by every subcommand. The same struct is read from the
/// `--config` file; values given on the command line win.
#[derive(Args, Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Schedule JSON path or a bundled fixture name (table2, table3).
    #[arg(long, global = true)]
    pub schedule: Option<String>,
    /// Register size; symmetric schedules are resized to it.
    #[arg(long, global = true)]
    pub n_qubits: Option<usize>,
    /// Chunk count; must be a multiple of the schedule's own count.
    #[arg(long, global = true)]
    pub chunks: Option<usize>,
    /// Probed pair as "i,j".
    #[arg(long, global = true)]
    pub pair: Option<String>,
    /// State kind(s): bell, flat, c, p, comma separated or "all".
    #[arg(long, global = true)]
    pub state: Option<String>,
    /// Propagation method(s): exact, chunked, gates, comma separated or "all".
    #[arg(long, global = true)]
    pub method: Option<String>,
    /// Shot counts: "N", "a,b,c" or "start:stop:step".
    #[arg(long, global = true)]
    pub shots: Option<String>,
    /// Repetitions per shot count.
    #[arg(long, global = true)]
    pub iterations: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for written artifacts.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Keep zero-angle gates in compiled circuits.
    #[arg(long, global = true)]
    pub no_elide: bool,
    /// First register size of a bootstrap chain.
    #[arg(long, global = true)]
    pub from: Option<usize>,
    #[arg(long, global = true)]
    pub max_epochs: Option<usize>,
    #[arg(long, global = true)]
    pub learning_rate: Option<f64>,
    #[arg(long, global = true)]
    pub momentum: Option<f64>,
    #[arg(long, global = true)]
    pub target_rms: Option<f64>,
    #[arg(long, global = true)]
    pub gradient_step: Option<f64>,
    #[arg(long, global = true)]
    pub confidence_level: Option<f64>,
    /// Adds this angle to the first rotation of the compiled circuit before verifying.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub perturb_angle: Option<f64>,
}

impl RunConfig {
    /// Fills every unset field from `file`.
    pub fn merged_over(self, file: RunConfig) -> RunConfig {
        RunConfig {
            schedule: self.schedule.or(file.schedule),
            n_qubits: self.n_qubits.or(file.n_qubits),
            chunks: self.chunks.or(file.chunks),
            pair: self.pair.or(file.pair),
            state: self.state.or(file.state),
            method: self.method.or(file.method),
            shots: self.shots.or(file.shots),
            iterations: self.iterations.or(file.iterations),
            seed: self.seed.or(file.seed),
            out_dir: self.out_dir.or(file.out_dir),
            no_elide: self.no_elide || file.no_elide,
            from: self.from.or(file.from),
            max_epochs: self.max_epochs.or(file.max_epochs),
            learning_rate: self.learning_rate.or(file.learning_rate),
            momentum: self.momentum.or(file.momentum),
            target_rms: self.target_rms.or(file.target_rms),
            gradient_step: self.gradient_step.or(file.gradient_step),
            confidence_level: self.confidence_level.or(file.confidence_level),
            perturb_angle: self.perturb_angle.or(file.perturb_angle),
        }
    }
}
