//! Command-line front end: `primes`, `nodes`, `integrate`, `wce`, `convergence`.
//!
//! Settings may also come from `--config <file.toml|file.json>`: top-level
//! keys apply to every subcommand, a table named after the subcommand
//! overrides them, and explicit flags override both.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use median_lattice::experiment::{parse_grid, run_convergence, write_outputs, ExperimentConfig};
use median_lattice::korobov::{KorobovParams, WeightConfig};
use median_lattice::median::{integrate_median, integrate_median_tent, HChoice, MedianRuleConfig};
use median_lattice::wce::{wce_bruteforce, wce_exact};
use median_lattice::{make_integrand, par, primes_in_range, FunctionKind, LatticeRule, TestFunctionSpec};

#[derive(Parser, Debug)]
#[command(name = "medlat", version, about = "Median lattice rules for high-dimensional integration")]
struct Cli {
    /// Master seed for all random draws.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// TOML or JSON file with default settings; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (integrate: JSON trace; convergence: CSV plus a .json sidecar).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the primes in [ceil(n/2)+1, n], ascending.
    Primes {
        #[arg(long)]
        n: Option<u64>,
    },
    /// Print lattice nodes as exact fractions (k z_j mod p)/p.
    Nodes {
        #[arg(long)]
        p: Option<u64>,
        /// Generating vector, comma separated.
        #[arg(long)]
        z: Option<String>,
    },
    /// Run the median rule once on a test function.
    Integrate {
        #[command(flatten)]
        func: FunctionArgs,
        /// Budget parameter n.
        #[arg(long)]
        n: Option<u64>,
        /// Print the full replicate trace as JSON.
        #[arg(long)]
        trace: bool,
    },
    /// Worst-case error of a lattice rule in a weighted Korobov space.
    Wce {
        #[arg(long)]
        p: Option<u64>,
        /// Generating vector, comma separated.
        #[arg(long)]
        z: Option<String>,
        /// Smoothness alpha.
        #[arg(long)]
        alpha: Option<f64>,
        /// Product weights: const:<g>, pow:<beta>, or a comma-separated list.
        #[arg(long)]
        gamma: Option<String>,
        /// Also sum the dual lattice over the box max|h_j| <= H.
        #[arg(long)]
        brute: Option<u64>,
    },
    /// Estimate the expected error over an n grid and fit the rate.
    Convergence {
        #[command(flatten)]
        func: FunctionArgs,
        /// log:<lo>:<hi>:<count> or n1,n2,...
        #[arg(long)]
        grid: Option<String>,
        /// Number of independent realizations per grid point.
        #[arg(long = "R")]
        realizations: Option<usize>,
        /// Smallest n used in the regression.
        #[arg(long)]
        min_n: Option<u64>,
        /// Errors at or below this value end the regression range.
        #[arg(long)]
        floor: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct FunctionArgs {
    /// Test function: f1, f2, fac, nonper.
    #[arg(long = "fn")]
    function: Option<String>,
    /// Dimension.
    #[arg(long)]
    d: Option<usize>,
    /// Apply the tent transform to every node coordinate.
    #[arg(long)]
    tent: bool,
    /// Amplification function: loglog, loglog2, log, const:<c>.
    #[arg(long)]
    h: Option<String>,
    /// f1 decay exponent.
    #[arg(long)]
    c1: Option<f64>,
    /// f2 decay exponent.
    #[arg(long)]
    c2: Option<f64>,
    /// fac smoothness parameter a.
    #[arg(long)]
    a: Option<f64>,
    /// fac decay exponent c.
    #[arg(long)]
    c: Option<f64>,
    /// nonper factor base theta.
    #[arg(long)]
    theta: Option<f64>,
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<median_lattice::Error> for Failure {
    fn from(e: median_lattice::Error) -> Self {
        match e {
            median_lattice::Error::Config(m) => Failure::Usage(m),
            other => Failure::Compute(other.to_string()),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

/// Settings from the config file for one subcommand.
struct FileSettings(Map<String, Value>);

impl FileSettings {
    fn load(path: Option<&Path>, command: &str) -> Outcome<Self> {
        let Some(path) = path else {
            return Ok(Self(Map::new()));
        };
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        let root: Value = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("bad JSON config: {e}")))?,
            _ => {
                let t: toml::Value = toml::from_str(&text).map_err(|e| Failure::Usage(format!("bad TOML config: {e}")))?;
                serde_json::to_value(t).map_err(|e| Failure::Usage(e.to_string()))?
            }
        };
        let Value::Object(mut top) = root else {
            return Err(Failure::Usage("config file must be a table".into()));
        };
        let section = top.remove(command);
        top.retain(|_, v| !v.is_object());
        if let Some(Value::Object(sec)) = section {
            top.extend(sec);
        }
        Ok(Self(top))
    }

    fn get<T: DeserializeOwned>(&self, key: &str) -> Outcome<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| Failure::Usage(format!("config key {key:?}: {e}"))),
        }
    }

    /// Flag value if given, else the file value.
    fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Outcome<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    fn require<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Outcome<T> {
        self.pick(flag, key)?
            .ok_or_else(|| Failure::Usage(format!("missing required setting --{key}")))
    }
}

fn parse_vector(text: &str) -> Outcome<Vec<u64>> {
    text.split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|_| Failure::Usage(format!("bad generating vector {text:?}"))))
        .collect()
}

fn function_spec(args: &FunctionArgs, file: &FileSettings) -> Outcome<TestFunctionSpec> {
    let name: String = file.require(args.function.clone(), "fn")?;
    let d: usize = file.require(args.d, "d")?;
    let kind = match name.as_str() {
        "f1" => FunctionKind::F1 {
            c1: file.require(args.c1, "c1")?,
        },
        "f2" => FunctionKind::F2 {
            c2: file.require(args.c2, "c2")?,
        },
        "fac" => FunctionKind::Fac {
            a: file.require(args.a, "a")?,
            c: file.require(args.c, "c")?,
        },
        "nonper" => FunctionKind::NonPeriodic {
            theta: file.require(args.theta, "theta")?,
        },
        other => return Err(Failure::Usage(format!("unknown function {other:?}; use f1, f2, fac or nonper"))),
    };
    Ok(TestFunctionSpec::new(kind, d)?)
}

fn h_choice(args: &FunctionArgs, file: &FileSettings) -> Outcome<HChoice> {
    match file.pick(args.h.clone(), "h")? {
        Some(s) => Ok(s.parse::<HChoice>()?),
        None => Ok(HChoice::LogLog),
    }
}

fn tent_flag(args: &FunctionArgs, file: &FileSettings) -> Outcome<Option<bool>> {
    Ok(if args.tent { Some(true) } else { file.get("tent")? })
}

fn run(cli: &Cli) -> Outcome<String> {
    let name = match &cli.command {
        Command::Primes { .. } => "primes",
        Command::Nodes { .. } => "nodes",
        Command::Integrate { .. } => "integrate",
        Command::Wce { .. } => "wce",
        Command::Convergence { .. } => "convergence",
    };
    let file = FileSettings::load(cli.config.as_deref(), name)?;
    let seed: u64 = file.pick(cli.seed, "seed")?.unwrap_or(0);
    let out: Option<PathBuf> = file.pick(cli.out.clone(), "out")?;

    match &cli.command {
        Command::Primes { n } => {
            let n: u64 = file.require(*n, "n")?;
            let pool = primes_in_range(n)?;
            let text: Vec<String> = pool.primes().iter().map(u64::to_string).collect();
            Ok(text.join(" ") + "\n")
        }
        Command::Nodes { p, z } => {
            let p: u64 = file.require(*p, "p")?;
            let z = parse_vector(&file.require::<String>(z.clone(), "z")?)?;
            let rule = LatticeRule::new(p, z)?;
            let mut s = String::from("k");
            for j in 1..=rule.dim() {
                s.push_str(&format!(",x{j}"));
            }
            s.push('\n');
            for k in 0..p {
                s.push_str(&k.to_string());
                for r in rule.node_residues(k) {
                    s.push_str(&format!(",{r}/{p}"));
                }
                s.push('\n');
            }
            Ok(s)
        }
        Command::Integrate { func, n, trace } => {
            let spec = function_spec(func, &file)?;
            let n: u64 = file.require(*n, "n")?;
            let h = h_choice(func, &file)?;
            let tent = tent_flag(func, &file)?.unwrap_or(false);
            let show_trace = *trace || file.get::<bool>("trace")?.unwrap_or(false);
            let f = make_integrand(spec)?;
            let cfg = MedianRuleConfig::new(n, spec.d, h, seed)?;
            let result = if tent {
                integrate_median_tent(&f, &cfg)?
            } else {
                integrate_median(&f, &cfg)?
            };
            let doc = json!({
                "function": spec,
                "config": cfg,
                "tent": tent,
                "estimate": [result.estimate.re, result.estimate.im],
                "replicates": result.replicates.len(),
                "total_evals": result.total_evals,
                "trace": result.replicates,
            });
            if let Some(path) = &out {
                let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Compute(e.to_string()))?;
                std::fs::write(path, text + "\n").map_err(|e| Failure::Compute(format!("cannot write {}: {e}", path.display())))?;
            }
            if show_trace {
                Ok(serde_json::to_string_pretty(&doc).map_err(|e| Failure::Compute(e.to_string()))? + "\n")
            } else {
                Ok(format!(
                    "estimate: {} {}\nreplicates: {}\ntotal_evals: {}\n",
                    result.estimate.re,
                    result.estimate.im,
                    result.replicates.len(),
                    result.total_evals
                ))
            }
        }
        Command::Wce {
            p,
            z,
            alpha,
            gamma,
            brute,
        } => {
            let p: u64 = file.require(*p, "p")?;
            let z = parse_vector(&file.require::<String>(z.clone(), "z")?)?;
            let alpha: f64 = file.require(*alpha, "alpha")?;
            let gamma: String = file.pick(gamma.clone(), "gamma")?.unwrap_or_else(|| "const:1".into());
            let brute: Option<u64> = file.pick(*brute, "brute")?;
            let rule = LatticeRule::new(p, z)?;
            let weights = WeightConfig::parse_rule(&gamma)?.resolve(rule.dim())?;
            let params = KorobovParams::new(alpha, weights, rule.dim())?;
            let mut s = String::new();
            let kernel = match wce_exact(&rule, &params) {
                Ok(e) => {
                    s.push_str(&format!("wce_kernel: {e}\n"));
                    Some(e)
                }
                Err(median_lattice::Error::Domain(_)) if brute.is_some() => None,
                Err(e) => return Err(e.into()),
            };
            if let Some(h) = brute {
                let b = wce_bruteforce(&rule, &params, h)?;
                s.push_str(&format!("wce_bruteforce: {}\ntail_bound: {}\n", b.value, b.tail_bound));
                if let Some(k) = kernel {
                    s.push_str(&format!("difference: {}\n", (k - b.value).abs()));
                }
            }
            Ok(s)
        }
        Command::Convergence {
            func,
            grid,
            realizations,
            min_n,
            floor,
        } => {
            let spec = function_spec(func, &file)?;
            let grid = parse_grid(&file.require::<String>(grid.clone(), "grid")?)?;
            let r: usize = file.require(*realizations, "R")?;
            let mut cfg = ExperimentConfig::new(spec, grid, r, seed)?;
            if let Some(t) = tent_flag(func, &file)? {
                cfg.tent = t;
            }
            cfg.h_choice = h_choice(func, &file)?;
            if let Some(m) = file.pick(*min_n, "min_n")? {
                cfg.regression_min_n = m;
            }
            if let Some(fl) = file.pick(*floor, "floor")? {
                cfg.error_floor = fl;
            }
            cfg.validate()?;
            let table = run_convergence(&cfg)?;
            match &out {
                Some(path) => {
                    write_outputs(&table, &cfg, path).map_err(|e| Failure::Compute(format!("cannot write {}: {e}", path.display())))?;
                    let slope = table.slope().map_or_else(|| "insufficient data".to_string(), |s| format!("{s:.6}"));
                    eprintln!("wrote {} rows to {}; slope {slope}", table.rows.len(), path.display());
                    Ok(String::new())
                }
                None => Ok(table.to_csv()),
            }
        }
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
    let workers = cli.workers;
    if !par::is_parallel() && workers.is_some() {
        eprintln!("note: built without the parallel feature; --workers is ignored");
    }
    match par::with_workers(workers, || run(&cli)) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            eprintln!("run `medlat --help` for usage");
            ExitCode::from(1)
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
