//! The universal median lattice rule.
//!
//! `N = 2 ceil(h(n) log2 n) + 1` independent rank-1 lattice rules are drawn,
//! each with a prime uniform on `[ceil(n/2)+1, n]` and a generating vector
//! uniform on `{1..p-1}^d`; the estimate is the componentwise median of the
//! `N` lattice estimates. Replicate `k` draws from stream `(master_seed, k)`,
//! so traces do not depend on how replicates are scheduled.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{apply_rule_mapped, Integrand, LatticeRule};
use crate::par;
use crate::primes::{primes_in_range, sample_generator, sample_prime, PrimePool};
use crate::rng::SeededRng;

/// The slowly growing amplification function `h: N -> [1, inf)`.
#[derive(Clone, Default)]
pub enum HChoice {
    /// `max(1, ln ln n)`.
    #[default]
    LogLog,
    /// `max(1, log2 log2 n)`.
    LogLogBase2,
    /// `max(1, ln n)`.
    Log,
    /// A constant `c >= 1`.
    Constant(f64),
    Custom(Arc<dyn Fn(u64) -> f64 + Send + Sync>),
}

impl HChoice {
    pub fn eval(&self, n: u64) -> Result<f64> {
        let x = n as f64;
        let h = match self {
            HChoice::LogLog => x.ln().ln().max(1.0),
            HChoice::LogLogBase2 => x.log2().log2().max(1.0),
            HChoice::Log => x.ln().max(1.0),
            HChoice::Constant(c) => *c,
            HChoice::Custom(f) => f(n),
        };
        if h >= 1.0 && h.is_finite() {
            Ok(h)
        } else {
            Err(Error::Config(format!("h({n}) = {h} is not a finite value >= 1")))
        }
    }
}

impl fmt::Debug for HChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for HChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HChoice::LogLog => write!(f, "loglog"),
            HChoice::LogLogBase2 => write!(f, "loglog2"),
            HChoice::Log => write!(f, "log"),
            HChoice::Constant(c) => write!(f, "const:{c}"),
            HChoice::Custom(_) => write!(f, "custom"),
        }
    }
}

impl FromStr for HChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "loglog" => Ok(HChoice::LogLog),
            "loglog2" => Ok(HChoice::LogLogBase2),
            "log" => Ok(HChoice::Log),
            _ => {
                let c = s
                    .strip_prefix("const:")
                    .and_then(|c| c.parse::<f64>().ok())
                    .ok_or_else(|| Error::Config(format!("unknown h choice {s:?}; use loglog, loglog2, log or const:<c>")))?;
                if c >= 1.0 && c.is_finite() {
                    Ok(HChoice::Constant(c))
                } else {
                    Err(Error::Config(format!("constant h must be >= 1, got {c}")))
                }
            }
        }
    }
}

impl Serialize for HChoice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HChoice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `N = 2 ceil(h(n) log2 n) + 1`.
pub fn replicate_count(n: u64, h: &HChoice) -> Result<usize> {
    if n < 2 {
        return Err(Error::Domain(format!("n must be at least 2, got {n}")));
    }
    let half = (h.eval(n)? * (n as f64).log2()).ceil();
    Ok(2 * half as usize + 1)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MedianRuleConfig {
    pub n: u64,
    pub d: usize,
    pub h_choice: HChoice,
    pub master_seed: u64,
}

impl MedianRuleConfig {
    pub fn new(n: u64, d: usize, h_choice: HChoice, master_seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("n must be at least 2, got {n}")));
        }
        if d == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        Ok(Self {
            n,
            d,
            h_choice,
            master_seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replicate {
    pub p: u64,
    pub z: Vec<u64>,
    pub estimate: Complex64,
}

impl Replicate {
    pub fn rule(&self) -> LatticeRule {
        LatticeRule::new(self.p, self.z.clone()).expect("replicate holds a valid rule")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianRunTrace {
    pub replicates: Vec<Replicate>,
    pub estimate: Complex64,
    pub total_evals: u64,
}

impl MedianRunTrace {
    pub fn rules(&self) -> Vec<LatticeRule> {
        self.replicates.iter().map(Replicate::rule).collect()
    }
}

/// Median of an odd-length list by selection.
pub fn median_odd(values: &[f64]) -> Result<f64> {
    if values.is_empty() || values.len() % 2 == 0 {
        return Err(Error::Contract(format!(
            "median needs a nonempty odd-length list, got length {}",
            values.len()
        )));
    }
    let mut v = values.to_vec();
    let mid = v.len() / 2;
    let (_, m, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    Ok(*m)
}

/// Median of the real parts plus `i` times the median of the imaginary parts.
pub fn complex_median(values: &[Complex64]) -> Result<Complex64> {
    let re: Vec<f64> = values.iter().map(|c| c.re).collect();
    let im: Vec<f64> = values.iter().map(|c| c.im).collect();
    Ok(Complex64::new(median_odd(&re)?, median_odd(&im)?))
}

/// The tent map `1 - |2x - 1|`.
#[inline]
pub fn tent(x: f64) -> f64 {
    1.0 - (2.0 * x - 1.0).abs()
}

/// `x -> f(tent(x_1), ..., tent(x_d))`.
pub struct TentIntegrand<I>(pub I);

impl<I: Integrand> Integrand for TentIntegrand<I> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        let y: Vec<f64> = x.iter().map(|&t| tent(t)).collect();
        self.0.eval(&y)
    }

    fn true_integral(&self) -> Option<Complex64> {
        self.0.true_integral()
    }
}

/// Draws replicate `index`'s rule from stream `(seed, index)`.
pub fn draw_rule(pool: &PrimePool, d: usize, seed: u64, index: u64) -> Result<LatticeRule> {
    let mut rng = SeededRng::new(seed, index);
    let p = sample_prime(pool, &mut rng);
    let z = sample_generator(p, d, &mut rng)?;
    LatticeRule::new(p, z)
}

/// Evaluates `count` independent replicates and their median.
pub fn run_replicates<I: Integrand + ?Sized>(
    f: &I,
    pool: &PrimePool,
    count: usize,
    seed: u64,
    use_tent: bool,
) -> Result<MedianRunTrace> {
    let d = f.dim();
    let replicates = par::try_map_indexed(count, |k| {
        let rule = draw_rule(pool, d, seed, k as u64)?;
        let estimate = if use_tent {
            apply_rule_mapped(&rule, f, tent)
        } else {
            apply_rule_mapped(&rule, f, |x| x)
        }
        .map_err(|e| match e {
            Error::Evaluation { node, .. } => Error::Evaluation {
                node,
                replicate: Some(k),
            },
            other => other,
        })?;
        Ok(Replicate {
            p: rule.p(),
            z: rule.z().to_vec(),
            estimate,
        })
    })?;
    let estimates: Vec<Complex64> = replicates.iter().map(|r| r.estimate).collect();
    let estimate = complex_median(&estimates)?;
    let total_evals = replicates.iter().map(|r| r.p).sum();
    Ok(MedianRunTrace {
        replicates,
        estimate,
        total_evals,
    })
}

fn integrate_with<I: Integrand + ?Sized>(f: &I, config: &MedianRuleConfig, use_tent: bool) -> Result<MedianRunTrace> {
    if f.dim() != config.d {
        return Err(Error::Contract(format!(
            "integrand dimension {} differs from configured dimension {}",
            f.dim(),
            config.d
        )));
    }
    let pool = primes_in_range(config.n)?;
    let count = replicate_count(config.n, &config.h_choice)?;
    run_replicates(f, &pool, count, config.master_seed, use_tent)
}

/// The median rule `M_n(f)`.
pub fn integrate_median<I: Integrand + ?Sized>(f: &I, config: &MedianRuleConfig) -> Result<MedianRunTrace> {
    integrate_with(f, config, false)
}

/// `M_n(f o Phi)` with the tent map applied to every node coordinate.
pub fn integrate_median_tent<I: Integrand + ?Sized>(f: &I, config: &MedianRuleConfig) -> Result<MedianRunTrace> {
    integrate_with(f, config, true)
}
