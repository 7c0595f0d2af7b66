//! Error-versus-n studies of the median rule.
//!
//! For each `n` in a grid, the expected absolute error is estimated as the
//! mean of `|I(f) - M_n(f)|` over `R` independent realizations. Realization
//! `r` runs the median rule with master seed `derive_seed(seed, r)`. A
//! least-squares fit of `log10(error)` against `log10(n)` gives the empirical
//! rate.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrands::{make_integrand, FunctionKind, TestFunctionSpec};
use crate::lattice::Integrand;
use crate::median::{integrate_median, integrate_median_tent, replicate_count, HChoice, MedianRuleConfig};
use crate::par;
use crate::rng::derive_seed;
use crate::sum::CompensatedSum;

pub const DEFAULT_ERROR_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub spec: TestFunctionSpec,
    pub n_grid: Vec<u64>,
    pub realizations: usize,
    pub master_seed: u64,
    pub tent: bool,
    pub h_choice: HChoice,
    pub error_floor: f64,
    /// Smallest `n` included in the regression.
    pub regression_min_n: u64,
}

impl ExperimentConfig {
    /// Defaults: `h = loglog`, floor `1e-13`, regression from `n >= 10` for
    /// `fac` and `n >= 100` otherwise, tent transform for `nonper`.
    pub fn new(spec: TestFunctionSpec, n_grid: Vec<u64>, realizations: usize, master_seed: u64) -> Result<Self> {
        let (tent, regression_min_n) = match spec.kind {
            FunctionKind::Fac { .. } => (false, 10),
            FunctionKind::NonPeriodic { .. } => (true, 100),
            _ => (false, 100),
        };
        let cfg = Self {
            spec,
            n_grid,
            realizations,
            master_seed,
            tent,
            h_choice: HChoice::LogLog,
            error_floor: DEFAULT_ERROR_FLOOR,
            regression_min_n,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.n_grid.is_empty() {
            return Err(Error::Config("n grid is empty".into()));
        }
        if self.n_grid[0] < 2 {
            return Err(Error::Config("grid values must be at least 2".into()));
        }
        if !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("n grid must be strictly ascending".into()));
        }
        if self.realizations == 0 {
            return Err(Error::Config("need at least one realization".into()));
        }
        if !(self.error_floor >= 0.0) {
            return Err(Error::Config(format!("invalid error floor {}", self.error_floor)));
        }
        Ok(())
    }
}

/// `count` integers spread logarithmically over `[lo, hi]`, rounded and deduplicated.
pub fn log_grid(lo: u64, hi: u64, count: usize) -> Result<Vec<u64>> {
    if lo < 2 || hi < lo || count == 0 {
        return Err(Error::Config(format!("invalid log grid {lo}..{hi} with {count} points")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut grid: Vec<u64> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as u64)
        .collect();
    grid.dedup();
    Ok(grid)
}

/// Parses `log:<lo>:<hi>:<count>` or a comma-separated list of values.
pub fn parse_grid(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::Config(format!("cannot parse grid {text:?}; use log:<lo>:<hi>:<count> or n1,n2,..."));
    if let Some(rest) = text.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo = parts[0].trim().parse().map_err(|_| bad())?;
        let hi = parts[1].trim().parse().map_err(|_| bad())?;
        let count = parts[2].trim().parse().map_err(|_| bad())?;
        log_grid(lo, hi, count)
    } else {
        text.split(',').map(|s| s.trim().parse::<u64>().map_err(|_| bad())).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub mean_abs_error: f64,
    /// Function evaluations summed over all realizations.
    pub total_evals: u64,
}

/// Mean absolute error of the median rule over `realizations` runs.
pub fn estimate_expected_error<I: Integrand + ?Sized>(
    f: &I,
    n: u64,
    realizations: usize,
    tent: bool,
    h_choice: &HChoice,
    seed: u64,
) -> Result<ErrorEstimate> {
    let truth = f
        .true_integral()
        .ok_or_else(|| Error::Config("integrand has no known integral".into()))?;
    if realizations == 0 {
        return Err(Error::Config("need at least one realization".into()));
    }
    let runs = par::try_map_indexed(realizations, |r| {
        let cfg = MedianRuleConfig::new(n, f.dim(), h_choice.clone(), derive_seed(seed, r as u64))?;
        let trace = if tent {
            integrate_median_tent(f, &cfg)?
        } else {
            integrate_median(f, &cfg)?
        };
        Ok(((truth - trace.estimate).norm(), trace.total_evals))
    })?;
    let sum: CompensatedSum = runs.iter().map(|r| r.0).collect();
    Ok(ErrorEstimate {
        mean_abs_error: sum.value() / realizations as f64,
        total_evals: runs.iter().map(|r| r.1).sum(),
    })
}

/// Least-squares line through `(log10 n, log10 error)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Fits `log10(error) = intercept + slope * log10(n)` on rows with positive error.
pub fn fit_rate(rows: &[(f64, f64)]) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(n, e)| *n > 0.0 && *e > 0.0 && e.is_finite())
        .map(|(n, e)| (n.log10(), e.log10()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientData { usable: pts.len() });
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData { usable: 1 });
    }
    let slope = sxy / sxx;
    Ok(RateFit {
        slope,
        intercept: my - slope * mx,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: u64,
    pub replicates: usize,
    pub mean_abs_error: f64,
    pub total_evals: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
    /// `None` when fewer than two rows qualified for the regression.
    pub fit: Option<RateFit>,
    /// Smallest and largest `n` used in the fit.
    pub regression_range: Option<(u64, u64)>,
    pub rows_used: usize,
}

impl RateTable {
    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,N_replicates,mean_abs_error,total_evals\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{:.16e},{}", r.n, r.replicates, r.mean_abs_error, r.total_evals);
        }
        match (self.fit, self.regression_range) {
            (Some(fit), Some((lo, hi))) => {
                let _ = writeln!(out, "# slope: {:.6}", fit.slope);
                let _ = writeln!(out, "# intercept_log10: {:.6}", fit.intercept);
                let _ = writeln!(out, "# regression_range: {lo}..{hi} ({} rows)", self.rows_used);
            }
            _ => {
                let _ = writeln!(out, "# slope: insufficient data ({} usable rows)", self.rows_used);
            }
        }
        out
    }
}

/// Rows entering the regression: `n >= min_n`, stopping before the first
/// such row whose error is at or below the floor.
pub fn regression_rows(rows: &[RateRow], min_n: u64, floor: f64) -> Vec<&RateRow> {
    rows.iter()
        .filter(|r| r.n >= min_n)
        .take_while(|r| r.mean_abs_error > floor)
        .collect()
}

pub fn run_convergence(config: &ExperimentConfig) -> Result<RateTable> {
    config.validate()?;
    let f = make_integrand(config.spec)?;
    let mut rows = Vec::with_capacity(config.n_grid.len());
    for &n in &config.n_grid {
        let est = estimate_expected_error(&f, n, config.realizations, config.tent, &config.h_choice, config.master_seed)?;
        rows.push(RateRow {
            n,
            replicates: replicate_count(n, &config.h_choice)?,
            mean_abs_error: est.mean_abs_error,
            total_evals: est.total_evals,
        });
    }
    let used = regression_rows(&rows, config.regression_min_n, config.error_floor);
    let points: Vec<(f64, f64)> = used.iter().map(|r| (r.n as f64, r.mean_abs_error)).collect();
    let (fit, regression_range) = match fit_rate(&points) {
        Ok(fit) => (Some(fit), Some((used[0].n, used[used.len() - 1].n))),
        Err(Error::InsufficientData { .. }) => (None, None),
        Err(e) => return Err(e),
    };
    let rows_used = used.len();
    Ok(RateTable {
        rows,
        fit,
        regression_range,
        rows_used,
    })
}

/// Writes the CSV to `path` and the configuration to `path` with a `.json` extension.
pub fn write_outputs(table: &RateTable, config: &ExperimentConfig, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, table.to_csv())?;
    let sidecar = serde_json::to_string_pretty(config).map_err(std::io::Error::other)?;
    std::fs::write(path.with_extension("json"), sidecar + "\n")
}
