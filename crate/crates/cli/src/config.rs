//! Flat kebab-case config files and command-line overrides.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use momab_core::config::default_record_every;
use momab_core::{AlgorithmId, Error as CoreError, ExperimentConfig, ExploreSchedule, Suite};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "MOMAB_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    Constant,
    InverseSqrt,
}

/// Every setting a run accepts. The same struct backs both the config file
/// (keys spelled like the long flags) and the flags themselves.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Settings {
    /// Experiment suite: pareto or nsw.
    #[arg(long, value_parser = parse_suite)]
    pub suite: Option<Suite>,
    #[arg(long)]
    pub n_agents: Option<usize>,
    #[arg(long)]
    pub n_arms: Option<usize>,
    /// Reward dimensions.
    #[arg(long)]
    pub dims: Option<usize>,
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long)]
    pub link_prob: Option<f64>,
    #[arg(long)]
    pub het_scale: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trace stride in rounds.
    #[arg(long)]
    pub record_every: Option<u64>,
    /// Comma-separated algorithm names; defaults to the whole suite.
    #[arg(long)]
    pub algorithms: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub explore_schedule: Option<ScheduleKind>,
    #[arg(long)]
    pub explore_alpha: Option<f64>,
    #[arg(long)]
    pub consensus_coeff: Option<f64>,
    #[arg(long)]
    pub elim_consensus_coeff: Option<f64>,
    #[arg(long)]
    pub solver_restarts: Option<usize>,
    #[arg(long)]
    pub solver_max_iters: Option<usize>,
    #[arg(long)]
    pub solver_tol: Option<f64>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: CoreError| e.to_string())
}

const KEYS: &[&str] = &[
    "suite",
    "n-agents",
    "n-arms",
    "dims",
    "horizon",
    "link-prob",
    "het-scale",
    "trials",
    "seed",
    "record-every",
    "algorithms",
    "out",
    "explore-schedule",
    "explore-alpha",
    "consensus-coeff",
    "elim-consensus-coeff",
    "solver-restarts",
    "solver-max-iters",
    "solver-tol",
];

impl Settings {
    /// Parses a flat JSON object. An empty file is an empty object.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        if text.trim().is_empty() {
            return Ok(Settings::default());
        }
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::ConfigSyntax(e.to_string()))?;
        let map = value
            .as_object()
            .ok_or_else(|| CliError::ConfigSyntax("top level must be a JSON object".into()))?;
        for (key, val) in map {
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::UnknownKey(key.clone()));
            }
            // Deserialize key by key so a type error names its key.
            let single = serde_json::Value::Object([(key.clone(), val.clone())].into_iter().collect());
            serde_json::from_value::<Settings>(single).map_err(|e| CliError::InvalidKey {
                key: key.clone(),
                reason: e.to_string(),
            })?;
        }
        serde_json::from_value(value).map_err(|e| CliError::ConfigSyntax(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_json(&text)
    }

    /// Values set in `over` win.
    pub fn overridden_by(self, over: &Settings) -> Settings {
        let o = over.clone();
        Settings {
            suite: o.suite.or(self.suite),
            n_agents: o.n_agents.or(self.n_agents),
            n_arms: o.n_arms.or(self.n_arms),
            dims: o.dims.or(self.dims),
            horizon: o.horizon.or(self.horizon),
            link_prob: o.link_prob.or(self.link_prob),
            het_scale: o.het_scale.or(self.het_scale),
            trials: o.trials.or(self.trials),
            seed: o.seed.or(self.seed),
            record_every: o.record_every.or(self.record_every),
            algorithms: o.algorithms.or(self.algorithms),
            out: o.out.or(self.out),
            explore_schedule: o.explore_schedule.or(self.explore_schedule),
            explore_alpha: o.explore_alpha.or(self.explore_alpha),
            consensus_coeff: o.consensus_coeff.or(self.consensus_coeff),
            elim_consensus_coeff: o.elim_consensus_coeff.or(self.elim_consensus_coeff),
            solver_restarts: o.solver_restarts.or(self.solver_restarts),
            solver_max_iters: o.solver_max_iters.or(self.solver_max_iters),
            solver_tol: o.solver_tol.or(self.solver_tol),
        }
    }
}

/// A validated run request.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub suite: Suite,
    pub config: ExperimentConfig,
    pub algorithms: Vec<AlgorithmId>,
    pub out: PathBuf,
}

/// Maps a core config field to the key a user would have typed.
pub fn key_for_field(field: &str) -> &str {
    match field {
        "n_agents" => "n-agents",
        "n_arms" => "n-arms",
        "n_dims" => "dims",
        "link_prob" => "link-prob",
        "het_scale" => "het-scale",
        "n_trials" => "trials",
        "record_every" => "record-every",
        "explore" => "explore-alpha",
        "consensus_coeff" => "consensus-coeff",
        "elim_consensus_coeff" => "elim-consensus-coeff",
        "solver_restarts" => "solver-restarts",
        "solver_max_iters" => "solver-max-iters",
        "solver_tol" => "solver-tol",
        other => other,
    }
}

pub fn parse_algorithms(list: &str, suite: Suite) -> Result<Vec<AlgorithmId>, CliError> {
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let id: AlgorithmId = name.parse().map_err(|e: CoreError| CliError::InvalidKey {
            key: "algorithms".into(),
            reason: e.to_string(),
        })?;
        if id.suite() != suite {
            return Err(CliError::InvalidKey {
                key: "algorithms".into(),
                reason: format!("{id} does not belong to the {} suite", suite.name()),
            });
        }
        if !out.contains(&id) {
            out.push(id);
        }
    }
    if out.is_empty() {
        return Err(CliError::InvalidKey {
            key: "algorithms".into(),
            reason: "no algorithm named".into(),
        });
    }
    Ok(out)
}

/// Builds the experiment from settings. `env_out` is the value of
/// [`OUT_ENV`], used when neither a flag nor the file names an output directory.
pub fn resolve(s: &Settings, env_out: Option<PathBuf>) -> Result<Resolved, CliError> {
    let suite = s.suite.ok_or(CliError::MissingKey("suite"))?;
    let mut c = match suite {
        Suite::Pareto => ExperimentConfig::pareto_suite(),
        Suite::Nsw => ExperimentConfig::nsw_suite(),
    };
    macro_rules! set {
        ($src:ident => $dst:ident) => {
            if let Some(v) = s.$src {
                c.$dst = v;
            }
        };
    }
    set!(n_agents => n_agents);
    set!(n_arms => n_arms);
    set!(dims => n_dims);
    set!(horizon => horizon);
    set!(link_prob => link_prob);
    set!(het_scale => het_scale);
    set!(trials => n_trials);
    set!(seed => master_seed);
    set!(consensus_coeff => consensus_coeff);
    set!(elim_consensus_coeff => elim_consensus_coeff);
    c.record_every = s.record_every.unwrap_or_else(|| default_record_every(c.horizon));
    if let Some(v) = s.solver_restarts {
        c.solver.restarts = v;
    }
    if let Some(v) = s.solver_max_iters {
        c.solver.max_iters = v;
    }
    if let Some(v) = s.solver_tol {
        c.solver.tol = v;
    }
    if s.explore_schedule.is_some() || s.explore_alpha.is_some() {
        let (kind, alpha) = match c.explore {
            ExploreSchedule::Constant(a) => (ScheduleKind::Constant, a),
            ExploreSchedule::InverseSqrt(a) => (ScheduleKind::InverseSqrt, a),
        };
        let alpha = s.explore_alpha.unwrap_or(alpha);
        c.explore = match s.explore_schedule.unwrap_or(kind) {
            ScheduleKind::Constant => ExploreSchedule::Constant(alpha),
            ScheduleKind::InverseSqrt => ExploreSchedule::InverseSqrt(alpha),
        };
    }
    c.validate().map_err(|e| match e {
        CoreError::InvalidConfig { field, reason } => CliError::InvalidKey {
            key: key_for_field(field).to_string(),
            reason,
        },
        other => CliError::Core(other),
    })?;
    let algorithms = match &s.algorithms {
        Some(list) => parse_algorithms(list, suite)?,
        None => suite.algorithms().to_vec(),
    };
    let out = s
        .out
        .clone()
        .or(env_out)
        .unwrap_or_else(|| PathBuf::from("runs").join(suite.name()));
    Ok(Resolved {
        suite,
        config: c,
        algorithms,
        out,
    })
}
