//! The four subcommands. Every CSV has one header row and floats with 17
//! significant digits.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use pa_clt::asymptotics::{pk, rz_matrix_exact, Clock};
use pa_clt::experiment::{run_covariance, CovarianceConfig};
use pa_clt::model::simulate;
use pa_clt::stats::CovarianceEstimate;
use pa_clt::verify::{default_grid, run_suite, CheckRow, Fault, VerifyConfig};
use pa_clt::{CovarianceMatrix, Params};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn sink(path: Option<&Path>) -> CliResult<csv::Writer<Box<dyn Write>>> {
    let out: Box<dyn Write> = match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.to_path_buf(), source: e })?;
            }
            Box::new(io::BufWriter::new(File::create(p).map_err(|e| CliError::Io { path: p.to_path_buf(), source: e })?))
        }
        None => Box::new(io::stdout().lock()),
    };
    Ok(csv::Writer::from_writer(out))
}

fn write_csv(path: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = sink(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|e| CliError::Io { path: path.map(Path::to_path_buf).unwrap_or_default(), source: e })?;
    Ok(())
}

/// `k,count,empirical_pmf,theoretical_pk` for one replication.
pub fn simulate_rows(c: &ExperimentConfig) -> CliResult<Vec<Vec<String>>> {
    let p = c.params()?;
    let state = simulate(&p, c.steps, c.seed)?;
    let t = state.completed_time() as f64;
    (p.m()..=c.kmax)
        .map(|k| {
            let n = state.count(k);
            Ok(vec![k.to_string(), n.to_string(), float(n as f64 / t), float(pk(&p, k)?)])
        })
        .collect()
}

pub fn cmd_simulate(c: &ExperimentConfig) -> CliResult<()> {
    let rows = simulate_rows(c)?;
    let path = c.out_path("_degrees.csv");
    write_csv(path.as_deref(), &["k", "count", "empirical_pmf", "theoretical_pk"], &rows)
}

fn theory(p: &Params, kmax: usize, clock: Clock) -> CovarianceMatrix<f64> {
    rz_matrix_exact(p, kmax, clock)
}

fn estimate(c: &ExperimentConfig, p: &Params, times: Vec<usize>, kmax: usize) -> CliResult<Vec<(usize, CovarianceEstimate)>> {
    let config = CovarianceConfig {
        params: p.clone(),
        times,
        reps: c.reps,
        kmax,
        master_seed: c.seed,
        centering: c.centering,
        workers: c.workers,
    };
    Ok(run_covariance(&config)?)
}

pub fn cmd_covariance(c: &ExperimentConfig) -> CliResult<()> {
    let p = c.params()?;
    let (_, est) = estimate(c, &p, vec![c.steps], c.kmax)?.remove(0);
    let th = theory(&p, c.kmax, c.clock);
    let mut empirical = Vec::new();
    let mut theoretical = Vec::new();
    let mut summary = Vec::new();
    let mut worst_diag = (0.0_f64, p.m());
    for r in p.m()..=c.kmax {
        for l in p.m()..=c.kmax {
            let (e, t, se) = (*est.covariance.get(r, l), *th.get(r, l), *est.stderr.get(r, l));
            let rel = (e - t) / t.abs();
            if r == l && rel.abs() > worst_diag.0 {
                worst_diag = (rel.abs(), r);
            }
            let (rs, ls) = (r.to_string(), l.to_string());
            empirical.push(vec![rs.clone(), ls.clone(), float(e), float(se)]);
            theoretical.push(vec![rs.clone(), ls.clone(), float(t)]);
            summary.push(vec![rs, ls, float(e), float(t), float(se), float(rel)]);
        }
    }
    if let Some(path) = c.out_path("_empirical.csv") {
        write_csv(Some(&path), &["r", "l", "empirical", "mc_stderr"], &empirical)?;
    }
    if let Some(path) = c.out_path("_theoretical.csv") {
        write_csv(Some(&path), &["r", "l", "theoretical"], &theoretical)?;
    }
    let path = c.out_path("_summary.csv");
    write_csv(path.as_deref(), &["r", "l", "empirical", "theoretical", "mc_stderr", "rel_dev"], &summary)?;
    eprintln!(
        "m={} delta={} s={} reps={}: largest diagonal deviation {:.2}% at r={}",
        p.m(),
        p.delta(),
        c.steps,
        est.n,
        100.0 * worst_diag.0,
        worst_diag.1
    );
    Ok(())
}

/// Curves sharing an `r` column; `None` cells are left empty.
struct Panel {
    name: &'static str,
    header: Vec<String>,
    rows: Vec<Vec<Option<f64>>>,
    kmax: usize,
    from: usize,
}

impl Panel {
    fn new(name: &'static str, from: usize, kmax: usize, labels: Vec<String>) -> Self {
        let mut header = vec!["r".to_string()];
        header.extend(labels);
        let width = header.len() - 1;
        Self { name, header, rows: vec![vec![None; width]; kmax - from + 1], kmax, from }
    }

    fn set(&mut self, r: usize, col: usize, v: f64) {
        self.rows[r - self.from][col] = Some(v);
    }

    fn write(&self, path: &Path) -> CliResult<()> {
        let rows: Vec<Vec<String>> = (self.from..=self.kmax)
            .map(|r| {
                let mut row = vec![r.to_string()];
                row.extend(self.rows[r - self.from].iter().map(|v| v.map(float).unwrap_or_default()));
                row
            })
            .collect();
        let header: Vec<&str> = self.header.iter().map(String::as_str).collect();
        write_csv(Some(path), &header, &rows)
    }
}

/// Times of the empirical curves of Figure 4.
pub const FIG4_TIMES: [usize; 3] = [100, 1000, 5000];

fn diagonal_panel(name: &'static str, sets: &[Params], labels: Vec<String>, kmax: usize, clock: Clock) -> Panel {
    let from = sets.iter().map(Params::m).min().unwrap_or(1);
    let mut panel = Panel::new(name, from, kmax, labels);
    for (col, p) in sets.iter().enumerate() {
        let rz = theory(p, kmax, clock);
        for r in p.m()..=kmax {
            panel.set(r, col, *rz.get(r, r));
        }
    }
    panel
}

fn column_panel(name: &'static str, sets: &[Params], labels: Vec<String>, kmax: usize, l: usize, clock: Clock) -> Panel {
    let from = sets.iter().map(Params::m).min().unwrap_or(1);
    let mut panel = Panel::new(name, from, kmax, labels);
    for (col, p) in sets.iter().enumerate() {
        let rz = theory(p, kmax.max(l), clock);
        for r in p.m()..=kmax {
            panel.set(r, col, *rz.get(r, l));
        }
    }
    panel
}

fn params(m: usize, delta: f64) -> CliResult<Params> {
    Ok(Params::new(m, delta)?)
}

/// Theory next to the empirical curves at [`FIG4_TIMES`].
fn empirical_panel(name: &'static str, c: &ExperimentConfig, p: &Params, l: Option<usize>) -> CliResult<Panel> {
    let kmax = c.kmax.max(l.unwrap_or(0));
    let rz = theory(p, kmax, c.clock);
    let mut labels = vec!["theory".to_string()];
    labels.extend(FIG4_TIMES.iter().map(|t| format!("t={t}")));
    let mut panel = Panel::new(name, p.m(), c.kmax, labels);
    let runs = estimate(c, p, FIG4_TIMES.to_vec(), kmax)?;
    for r in p.m()..=c.kmax {
        let col = l.unwrap_or(r);
        panel.set(r, 0, *rz.get(r, col));
        for (j, (_, est)) in runs.iter().enumerate() {
            panel.set(r, j + 1, *est.covariance.get(r, col));
        }
    }
    Ok(panel)
}

fn labels<T: std::fmt::Display>(name: &str, values: &[T]) -> Vec<String> {
    values.iter().map(|v| format!("{name}={v}")).collect()
}

/// Panels of one figure and whether each uses a logarithmic y axis.
fn figure_panels(which: u32, c: &ExperimentConfig) -> CliResult<Vec<(Panel, bool)>> {
    let k = c.kmax;
    Ok(match which {
        1 => {
            let left = [-0.5, 0.0, 1.0, 3.0, 5.0];
            let right = [-1.0, 0.0, 2.0, 6.0, 10.0];
            let ls = left.iter().map(|&d| params(1, d)).collect::<CliResult<Vec<_>>>()?;
            let rs = right.iter().map(|&d| params(2, d)).collect::<CliResult<Vec<_>>>()?;
            vec![
                (diagonal_panel("left", &ls, labels("delta", &left), k, c.clock), true),
                (diagonal_panel("right", &rs, labels("delta", &right), k, c.clock), true),
            ]
        }
        2 => {
            let sets = (1..=3).map(|m| params(m, 0.0)).collect::<CliResult<Vec<_>>>()?;
            vec![(diagonal_panel("main", &sets, labels("m", &[1, 2, 3]), k, c.clock), true)]
        }
        3 => {
            let sets = (1..=3).map(|m| params(m, 0.0)).collect::<CliResult<Vec<_>>>()?;
            vec![(column_panel("main", &sets, labels("m", &[1, 2, 3]), k, 5, c.clock), false)]
        }
        4 => vec![
            (empirical_panel("left", c, &params(1, 1.0)?, None)?, true),
            (empirical_panel("right", c, &params(2, 0.0)?, Some(5))?, false),
        ],
        other => return Err(CliError::UnknownFigure(other)),
    })
}

fn gnuplot_script(which: u32, prefix: &Path, panels: &[(Panel, bool)]) -> String {
    let base = prefix.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| format!("fig{which}"));
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset key autotitle columnhead\n");
    s.push_str(&format!(
        "set terminal pngcairo size {},450\nset output '{base}.png'\n",
        500 * panels.len()
    ));
    s.push_str(&format!("set multiplot layout 1,{}\nset xlabel 'r'\n", panels.len()));
    for (panel, log) in panels {
        s.push_str(if *log { "set logscale y\n" } else { "unset logscale y\n" });
        let file = format!("{base}_{}.csv", panel.name);
        let last = panel.header.len();
        if which == 4 {
            s.push_str(&format!(
                "plot '{file}' using 1:2 with lines lw 2, for [i=3:{last}] '{file}' using 1:i with points\n"
            ));
        } else {
            s.push_str(&format!("plot for [i=2:{last}] '{file}' using 1:i with linespoints\n"));
        }
    }
    s.push_str("unset multiplot\n");
    s
}

pub fn cmd_figures(which: u32, c: &ExperimentConfig) -> CliResult<Vec<PathBuf>> {
    if !(1..=4).contains(&which) {
        return Err(CliError::UnknownFigure(which));
    }
    let prefix = c.out.clone().unwrap_or_else(|| PathBuf::from(format!("fig{which}")));
    let panels = figure_panels(which, c)?;
    let with = |suffix: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    let mut written = Vec::new();
    for (panel, _) in &panels {
        let path = with(&format!("_{}.csv", panel.name));
        panel.write(&path)?;
        written.push(path);
    }
    let script = with(".gp");
    std::fs::write(&script, gnuplot_script(which, &prefix, &panels)).map_err(|e| CliError::Io { path: script.clone(), source: e })?;
    written.push(script);
    Ok(written)
}

/// Runs the suite; `Ok(false)` when some check failed.
pub fn cmd_verify(c: &ExperimentConfig, single: bool, fault: Option<Fault>) -> CliResult<bool> {
    let config = VerifyConfig {
        grid: if single { vec![c.params()?] } else { default_grid() },
        invariant_reps: c.reps,
        invariant_steps: c.steps,
        martingale_kmax: c.kmax,
        regvar_kmax: c.kmax,
        seed: c.seed,
        workers: c.workers,
        fault,
        ..VerifyConfig::default()
    };
    let rows = run_suite(&config)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r: &CheckRow| vec![r.check.to_string(), r.params.clone(), float(r.residual), r.status().to_string()])
        .collect();
    let path = c.out_path("_verify.csv");
    write_csv(path.as_deref(), &["check", "params", "residual", "status"], &table)?;
    let failed = rows.iter().filter(|r| !r.passed).count();
    eprintln!("{} checks, {failed} failed", rows.len());
    Ok(failed == 0)
}
