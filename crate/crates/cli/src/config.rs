//! Flag / JSON-config merging. Flags win over config keys, config keys over defaults.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Options shared by every subcommand. Each one may also appear as a key in `--config`.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Forcing cycle a_0,...,a_{p-1}.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Option<Vec<f64>>,
    /// Read the cycle from a_k, so the first step consumes a_k.
    #[arg(long)]
    pub start_index: Option<usize>,
    /// Initial pair x_prev:x_curr, i.e. (x_{-1}, x_0). Repeatable.
    #[arg(long = "init", value_name = "X_PREV:X_CURR")]
    #[serde(default)]
    pub init: Vec<String>,
    /// Factor initial value; sets x_0 = t0 x_prev e^{-x_prev}.
    #[arg(long)]
    pub t0: Option<f64>,
    /// x_{-1} used with --t0.
    #[arg(long)]
    pub xprev: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub max_period: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration path for simulate: direct or factored.
    #[arg(long)]
    pub path: Option<String>,
    /// Periods of the return map to search, e.g. 1,2,3.
    #[arg(long, value_delimiter = ',')]
    pub omega: Option<Vec<usize>>,
    /// Grid size of the periodic-point search.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Dense samples of f, f^2, f^3 written by map.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Scan axis for x_prev as lo:hi:count.
    #[arg(long, value_name = "LO:HI:COUNT")]
    pub xprev_range: Option<String>,
    /// Scan axis for x_curr as lo:hi:count.
    #[arg(long, value_name = "LO:HI:COUNT")]
    pub xcurr_range: Option<String>,
    /// Run only criteria whose key or number matches.
    #[arg(long)]
    pub only: Option<String>,
    /// Multiplies every verification tolerance.
    #[arg(long, hide = true)]
    pub tolerance_scale: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with the same keys as the flags (snake_case).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! prefer {
    ($flags:expr, $file:expr, $($field:ident),*) => {
        $( if $flags.$field.is_none() { $flags.$field = $file.$field; } )*
    };
}

impl Options {
    /// Fills unset flags from the config file, if one was given.
    pub fn merged(mut self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = load(&path)?;
        prefer!(
            self,
            file,
            a,
            start_index,
            t0,
            xprev,
            steps,
            burn_in,
            window,
            max_period,
            tol,
            path,
            omega,
            grid,
            samples,
            xprev_range,
            xcurr_range,
            only,
            tolerance_scale,
            seed,
            out
        );
        if self.init.is_empty() {
            self.init = file.init;
        }
        Ok(self)
    }
}

fn load(path: &Path) -> Result<Options, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!(
            "config {} line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

pub fn parse_pair(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("expected X_PREV:X_CURR, got '{s}'"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

pub fn parse_axis(s: &str) -> Result<Axis, CliError> {
    let bad = || CliError::Usage(format!("expected LO:HI:COUNT, got '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        return Err(bad());
    };
    Ok(Axis {
        lo: lo.trim().parse().map_err(|_| bad())?,
        hi: hi.trim().parse().map_err(|_| bad())?,
        count: count.trim().parse().map_err(|_| bad())?,
    })
}
