//! Experiment settings from a flat `key = value` file, overridden by flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use pa_clt::asymptotics::Clock;
use pa_clt::stats::Centering;
use pa_clt::Params;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CenteringArg {
    /// Exact finite-time mean `E[N_k] / t`.
    Mean,
    /// Limiting proportion `p_k`.
    Pk,
}

impl From<CenteringArg> for Centering {
    fn from(c: CenteringArg) -> Self {
        match c {
            CenteringArg::Mean => Centering::ExactMean,
            CenteringArg::Pk => Centering::Theoretical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClockArg {
    /// Index `(k + δ)/(2m + δ)` per arrival.
    Draw,
    /// Index `m (k + δ)/(2m + δ)` per arrival.
    Vertex,
}

impl From<ClockArg> for Clock {
    fn from(c: ClockArg) -> Self {
        match c {
            ClockArg::Draw => Clock::Draw,
            ClockArg::Vertex => Clock::Vertex,
        }
    }
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to the subcommand's defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Edges per arriving vertex.
    #[arg(long)]
    pub m: Option<usize>,
    /// Affine shift of the attachment weights, greater than -m.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Final graph time s.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Number of replications.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Largest degree reported.
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub centering: Option<CenteringArg>,
    /// Covariance form used for theoretical values.
    #[arg(long, value_enum)]
    pub clock: Option<ClockArg>,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, env = "PA_CLT_WORKERS")]
    pub workers: Option<usize>,
    /// Output path prefix.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// File of `key = value` lines using the flag names as keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Resolved settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub m: usize,
    pub delta: f64,
    pub steps: usize,
    pub reps: usize,
    pub kmax: usize,
    pub seed: u64,
    pub centering: Centering,
    pub clock: Clock,
    pub workers: usize,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn params(&self) -> CliResult<Params> {
        Ok(Params::new(self.m, self.delta)?)
    }

    /// `prefix` + `suffix`, or `None` when no prefix was given.
    pub fn out_path(&self, suffix: &str) -> Option<PathBuf> {
        self.out.as_ref().map(|p| {
            let mut s = p.as_os_str().to_owned();
            s.push(suffix);
            PathBuf::from(s)
        })
    }

    fn validate(self) -> CliResult<Self> {
        self.params()?;
        if self.steps < 2 {
            return Err(CliError::Config(format!("steps must be at least 2, got {}", self.steps)));
        }
        if self.reps < 1 {
            return Err(CliError::Config("reps must be at least 1".into()));
        }
        if self.kmax < self.m {
            return Err(CliError::Config(format!("kmax = {} below m = {}", self.kmax, self.m)));
        }
        Ok(self)
    }
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", n + 1)))?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("line {}: unknown key `{key}`", n + 1)));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

const KEYS: [&str; 10] = ["m", "delta", "steps", "reps", "kmax", "seed", "centering", "clock", "workers", "out"];

fn read_config(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
    parse_config_text(&text)
}

fn from_file<T: FromStr>(file: &BTreeMap<String, String>, key: &str) -> CliResult<Option<T>> {
    file.get(key)
        .map(|v| v.parse::<T>().map_err(|_| CliError::Config(format!("bad value `{v}` for `{key}`"))))
        .transpose()
}

fn enum_from_file<T: ValueEnum>(file: &BTreeMap<String, String>, key: &str) -> CliResult<Option<T>> {
    file.get(key)
        .map(|v| T::from_str(v, true).map_err(|_| CliError::Config(format!("bad value `{v}` for `{key}`"))))
        .transpose()
}

impl CommonArgs {
    /// Flags over file over `defaults`.
    pub fn resolve(&self, defaults: ExperimentConfig) -> CliResult<ExperimentConfig> {
        let file = match &self.config {
            Some(path) => read_config(path)?,
            None => BTreeMap::new(),
        };
        let d = defaults;
        let config = ExperimentConfig {
            m: self.m.or(from_file(&file, "m")?).unwrap_or(d.m),
            delta: self.delta.or(from_file(&file, "delta")?).unwrap_or(d.delta),
            steps: self.steps.or(from_file(&file, "steps")?).unwrap_or(d.steps),
            reps: self.reps.or(from_file(&file, "reps")?).unwrap_or(d.reps),
            kmax: self.kmax.or(from_file(&file, "kmax")?).unwrap_or(d.kmax),
            seed: self.seed.or(from_file(&file, "seed")?).unwrap_or(d.seed),
            centering: self.centering.or(enum_from_file(&file, "centering")?).map(Into::into).unwrap_or(d.centering),
            clock: self.clock.or(enum_from_file(&file, "clock")?).map(Into::into).unwrap_or(d.clock),
            workers: self.workers.or(from_file(&file, "workers")?).unwrap_or(d.workers),
            out: self.out.clone().or(from_file(&file, "out")?).or(d.out),
        };
        config.validate()
    }

    /// Whether `m` or `delta` was set by a flag or the config file.
    pub fn names_parameters(&self) -> CliResult<bool> {
        if self.m.is_some() || self.delta.is_some() {
            return Ok(true);
        }
        Ok(match &self.config {
            Some(path) => {
                let file = read_config(path)?;
                file.contains_key("m") || file.contains_key("delta")
            }
            None => false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> ExperimentConfig {
        ExperimentConfig {
            m: 1,
            delta: 0.0,
            steps: 100,
            reps: 10,
            kmax: 10,
            seed: 1,
            centering: Centering::ExactMean,
            clock: Clock::Draw,
            workers: 0,
            out: None,
        }
    }

    #[test]
    fn parses_flat_file() {
        let f = parse_config_text("# run\nm = 2\ndelta=-1.5  # shift\n\nout = runs/a\n").unwrap();
        assert_eq!(f["m"], "2");
        assert_eq!(f["delta"], "-1.5");
        assert_eq!(f["out"], "runs/a");
        assert!(parse_config_text("m 2").is_err());
        assert!(parse_config_text("colour = red").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        std::fs::write(&path, "m = 3\ndelta = 2\ncentering = pk\nclock = vertex\n").unwrap();
        let args = CommonArgs { m: Some(2), config: Some(path), ..CommonArgs::default() };
        let c = args.resolve(defaults()).unwrap();
        assert_eq!((c.m, c.delta), (2, 2.0));
        assert_eq!(c.centering, Centering::Theoretical);
        assert_eq!(c.clock, Clock::Vertex);
        assert_eq!(c.steps, 100);
    }

    #[test]
    fn rejects_invalid() {
        let bad = |args: CommonArgs| args.resolve(defaults()).is_err();
        assert!(bad(CommonArgs { delta: Some(-1.0), ..CommonArgs::default() }));
        assert!(bad(CommonArgs { steps: Some(1), ..CommonArgs::default() }));
        assert!(bad(CommonArgs { reps: Some(0), ..CommonArgs::default() }));
        assert!(bad(CommonArgs { m: Some(4), kmax: Some(3), ..CommonArgs::default() }));
    }

    #[test]
    fn output_suffix() {
        let c = ExperimentConfig { out: Some(PathBuf::from("x/run")), ..defaults() };
        assert_eq!(c.out_path("_a.csv"), Some(PathBuf::from("x/run_a.csv")));
        assert_eq!(defaults().out_path("_a.csv"), None);
    }
}
