//! The `run` and `plot` commands.

use std::path::{Path, PathBuf};

use momab_core::{run_experiment, AggregateResult, RegretTrace, Suite};

use crate::manifest::{now, RunManifest, MANIFEST_FILE};
use crate::output::{read_summary, write_summary, write_traces, SUMMARY_FILE, TRACES_FILE};
use crate::plot::{render_svg, series_from_summary, Series};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub failed_trials: usize,
    pub plot: PathBuf,
}

pub fn plot_file_name(suite: Suite) -> String {
    format!("regret_{}.svg", suite.name())
}

fn y_label(suite: Suite) -> &'static str {
    match suite {
        Suite::Pareto => "cumulative Pareto regret",
        Suite::Nsw => "cumulative NSW regret",
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Writes the manifest, runs every trial, then emits CSVs and the plot.
pub fn execute(mut manifest: RunManifest) -> Result<RunOutcome, CliError> {
    let dir = manifest.out_dir.clone();
    create_dir(&dir)?;
    manifest.write(&dir.join(MANIFEST_FILE))?;
    log::info!(
        "running {} trials of {} algorithm(s) into {}",
        manifest.config.n_trials,
        manifest.algorithms.len(),
        dir.display()
    );

    let result = run_experiment(&manifest.config, &manifest.algorithms)?;
    let traces: Vec<RegretTrace> = result.results.iter().flat_map(|r| r.traces.iter().cloned()).collect();
    let aggregates: Vec<&AggregateResult> = result.results.iter().map(|r| &r.aggregate).collect();
    write_traces(&dir.join(TRACES_FILE), &traces)?;
    write_summary(&dir.join(SUMMARY_FILE), &aggregates)?;

    let series: Vec<Series> = aggregates.iter().map(|a| Series::from(*a)).collect();
    let plot = dir.join(plot_file_name(manifest.suite));
    write_text(
        &plot,
        &render_svg(&format!("{} suite", manifest.suite.name()), y_label(manifest.suite), &series),
    )?;

    let failed_trials = result.results.iter().map(|r| r.failures.len()).sum();
    manifest.finished_at = Some(now());
    manifest.write(&dir.join(MANIFEST_FILE))?;
    Ok(RunOutcome {
        out_dir: dir,
        failed_trials,
        plot,
    })
}

/// Re-renders a plot from an existing `summary.csv`.
pub fn replot(summary: &Path, out: &Path, title: &str) -> Result<(), CliError> {
    let rows = read_summary(summary)?;
    if rows.is_empty() {
        return Err(CliError::Parse(format!("{}: no data rows", summary.display())));
    }
    write_text(out, &render_svg(title, "cumulative regret", &series_from_summary(&rows)))
}
