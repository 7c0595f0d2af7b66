//! Weighted Korobov space quantities: smoothness and weights, the Fourier
//! decay function `r`, Riemann zeta, the weight sums `V_d` and `M_d`, and the
//! explicit worst-case error bound of the median rule.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::{CompensatedSum, ComplexSum};

/// Largest dimension for which subset enumeration is attempted.
pub const MAX_SUBSET_DIM: usize = 25;

const ZETA_CUTOFF: u32 = 100;
/// `B_{2j} / (2j)!` for `j = 1..=4`.
const ZETA_EM_COEFFS: [f64; 4] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
];

/// Riemann zeta function for real `s > 1`.
///
/// Euler–Maclaurin: the partial sum up to `k = 99`, the integral tail, the
/// half term and Bernoulli corrections through `B_8`.
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::Domain(format!("zeta requires a finite s > 1, got {s}")));
    }
    let n = f64::from(ZETA_CUTOFF);
    let mut acc: CompensatedSum = (1..ZETA_CUTOFF).rev().map(|k| f64::from(k).powf(-s)).collect();
    let n_pow = n.powf(-s);
    acc.add(n * n_pow / (s - 1.0));
    acc.add(0.5 * n_pow);
    // Rising factorial s (s+1) ... (s+2j-2) times n^{-s-2j+1}.
    let mut rising = s;
    let mut power = n_pow / n;
    for (j, c) in ZETA_EM_COEFFS.iter().enumerate() {
        if j > 0 {
            let m = 2.0 * j as f64;
            rising *= (s + m - 1.0) * (s + m);
            power /= n * n;
        }
        acc.add(c * rising * power);
    }
    Ok(acc.value())
}

/// Coordinate weights of a Korobov space. Coordinates are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WeightScheme {
    /// `gamma_u = prod_{j in u} gamma_j`, one entry per coordinate.
    Product(Vec<f64>),
    /// Explicit weights for the listed subsets; any other nonempty subset is
    /// unsupported rather than zero.
    General(BTreeMap<Vec<usize>, f64>),
}

fn check_weight(w: f64) -> Result<()> {
    if w > 0.0 && w <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("weights must lie in (0, 1], got {w}")))
    }
}

impl WeightScheme {
    /// Product weights `gamma_j = j^{-beta}` for `j = 1..=d`.
    pub fn power_rule(beta: f64, d: usize) -> Self {
        WeightScheme::Product((1..=d).map(|j| (j as f64).powf(-beta)).collect())
    }

    pub fn constant(gamma: f64, d: usize) -> Self {
        WeightScheme::Product(vec![gamma; d])
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            WeightScheme::Product(g) => {
                if g.len() != d {
                    return Err(Error::Config(format!(
                        "product weights have length {} but dimension is {d}",
                        g.len()
                    )));
                }
                g.iter().try_for_each(|&w| check_weight(w))
            }
            WeightScheme::General(map) => {
                for (u, &w) in map {
                    if u.is_empty() {
                        return Err(Error::Config("general weight keys must be nonempty subsets".into()));
                    }
                    if !u.windows(2).all(|p| p[0] < p[1]) {
                        return Err(Error::Config(format!("subset {u:?} must be strictly increasing")));
                    }
                    if u[0] < 1 || *u.last().unwrap() > d {
                        return Err(Error::Config(format!("subset {u:?} is not within 1..={d}")));
                    }
                    check_weight(w)?;
                }
                Ok(())
            }
        }
    }

    /// Weight of the (1-based, increasing) subset `u`; the empty set has weight 1.
    pub fn weight_of(&self, u: &[usize]) -> Result<f64> {
        if u.is_empty() {
            return Ok(1.0);
        }
        match self {
            WeightScheme::Product(g) => u
                .iter()
                .map(|&j| {
                    g.get(j.wrapping_sub(1))
                        .copied()
                        .ok_or_else(|| Error::Config(format!("no product weight for coordinate {j}")))
                })
                .product(),
            WeightScheme::General(map) => map
                .get(u)
                .copied()
                .ok_or_else(|| Error::Config(format!("no general weight for subset {u:?}"))),
        }
    }

    /// Every weight raised to `exponent` (the `gamma^{1/lambda}` family).
    pub fn powered(&self, exponent: f64) -> Self {
        match self {
            WeightScheme::Product(g) => WeightScheme::Product(g.iter().map(|w| w.powf(exponent)).collect()),
            WeightScheme::General(map) => {
                WeightScheme::General(map.iter().map(|(u, w)| (u.clone(), w.powf(exponent))).collect())
            }
        }
    }

    /// The general map induced by product weights over all nonempty subsets.
    pub fn to_general(&self, d: usize) -> Result<Self> {
        match self {
            WeightScheme::General(_) => Ok(self.clone()),
            WeightScheme::Product(g) => {
                if d > MAX_SUBSET_DIM {
                    return Err(Error::Size(format!("2^{d} subsets exceed the enumeration limit")));
                }
                if g.len() != d {
                    return Err(Error::Config(format!("product weights have length {} but d = {d}", g.len())));
                }
                let mut map = BTreeMap::new();
                for mask in 1u32..(1u32 << d) {
                    let u: Vec<usize> = (0..d).filter(|j| mask >> j & 1 == 1).map(|j| j + 1).collect();
                    let w = u.iter().map(|&j| g[j - 1]).product();
                    map.insert(u, w);
                }
                Ok(WeightScheme::General(map))
            }
        }
    }

    pub fn as_product(&self) -> Option<&[f64]> {
        match self {
            WeightScheme::Product(g) => Some(g),
            WeightScheme::General(_) => None,
        }
    }
}

/// Smoothness, weights and dimension of a weighted Korobov space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KorobovParams {
    alpha: f64,
    weights: WeightScheme,
    d: usize,
}

impl KorobovParams {
    pub fn new(alpha: f64, weights: WeightScheme, d: usize) -> Result<Self> {
        if !(alpha > 0.5) || !alpha.is_finite() {
            return Err(Error::Domain(format!("smoothness must exceed 1/2, got {alpha}")));
        }
        if d == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        weights.validate(d)?;
        Ok(Self { alpha, weights, d })
    }

    /// Product weights convenience constructor; the dimension is `gammas.len()`.
    pub fn product(alpha: f64, gammas: Vec<f64>) -> Result<Self> {
        let d = gammas.len();
        Self::new(alpha, WeightScheme::Product(gammas), d)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn weights(&self) -> &WeightScheme {
        &self.weights
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

/// `r(h) = gamma_{supp h}^{-1} prod_{j in supp h} |h_j|^alpha`, with `r(0) = 1`.
pub fn r_weight(h: &[i64], params: &KorobovParams) -> Result<f64> {
    if h.len() != params.d {
        return Err(Error::Contract(format!(
            "frequency has length {} but dimension is {}",
            h.len(),
            params.d
        )));
    }
    let support: Vec<usize> = h.iter().enumerate().filter(|(_, &x)| x != 0).map(|(j, _)| j + 1).collect();
    let gamma = params.weights.weight_of(&support)?;
    let prod: f64 = support.iter().map(|&j| (h[j - 1].unsigned_abs() as f64).powf(params.alpha)).product();
    Ok(prod / gamma)
}

/// `V_d(alpha, gamma) = sum_{h != 0} 1 / r(h)`.
pub fn v_d(alpha: f64, weights: &WeightScheme, d: usize) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!("V_d diverges for alpha <= 1, got {alpha}")));
    }
    let two_zeta = 2.0 * zeta(alpha)?;
    match weights {
        WeightScheme::Product(g) => {
            if g.len() != d {
                return Err(Error::Config(format!("product weights have length {} but d = {d}", g.len())));
            }
            // prod (1 + x_j) - 1, kept accurate when the product is close to 1.
            let log_prod: f64 = g.iter().map(|w| (w * two_zeta).ln_1p()).sum();
            Ok(log_prod.exp_m1())
        }
        WeightScheme::General(map) => {
            if d > MAX_SUBSET_DIM {
                return Err(Error::Size(format!("general weights in dimension {d} > {MAX_SUBSET_DIM}")));
            }
            let acc: CompensatedSum = map.iter().map(|(u, w)| w * two_zeta.powi(u.len() as i32)).collect();
            Ok(acc.value())
        }
    }
}

/// `M_d(alpha, gamma, lambda) = exp(2 zeta(alpha/lambda) (sum_j gamma_j^{1/alpha})^{alpha/lambda})`.
pub fn m_d_bound(alpha: f64, product_gammas: &[f64], lambda: f64) -> Result<f64> {
    if !(lambda >= 0.5 && lambda < alpha) {
        return Err(Error::Domain(format!("lambda must lie in [1/2, {alpha}), got {lambda}")));
    }
    let ratio = alpha / lambda;
    let s: f64 = product_gammas.iter().map(|g| g.powf(1.0 / alpha)).sum();
    Ok((2.0 * zeta(ratio)? * s.powf(ratio)).exp())
}

/// Minimizer of `(scale * V_d(alpha/lambda, gamma^{1/lambda}))^lambda` over lambda.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaOptimum {
    pub bound: f64,
    pub lambda: f64,
}

/// Gap kept below `alpha` at the right end of the lambda range.
pub const LAMBDA_EDGE: f64 = 1e-6;
const LAMBDA_GRID: usize = 256;
const LAMBDA_REL_TOL: f64 = 1e-9;

/// Logarithm of `(scale * V_d(alpha/lambda, gamma^{1/lambda}))^lambda`.
pub fn log_lambda_objective(params: &KorobovParams, scale: f64, lambda: f64) -> Result<f64> {
    let v = v_d(params.alpha / lambda, &params.weights.powered(1.0 / lambda), params.d)?;
    Ok(lambda * (scale.ln() + v.ln()))
}

/// Infimum over `lambda in [1/2, alpha)` of `(scale * V_d(alpha/lambda, gamma^{1/lambda}))^lambda`.
///
/// A 256-point grid on `[1/2, alpha - 1e-6]` locates the best sample, then a
/// golden-section search refines inside its neighbouring cells.
pub fn lambda_infimum(params: &KorobovParams, scale: f64) -> Result<LambdaOptimum> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Domain(format!("scale must be positive and finite, got {scale}")));
    }
    let lo = 0.5;
    let hi = params.alpha - LAMBDA_EDGE;
    if hi <= lo {
        return Err(Error::Domain(format!(
            "lambda range [1/2, alpha) is empty for alpha = {}",
            params.alpha
        )));
    }
    let objective = |lambda: f64| log_lambda_objective(params, scale, lambda);
    let step = (hi - lo) / (LAMBDA_GRID - 1) as f64;
    let grid = (0..LAMBDA_GRID).map(|i| if i + 1 == LAMBDA_GRID { hi } else { lo + step * i as f64 });
    let mut best = (lo, f64::INFINITY);
    let mut best_idx = 0;
    for (i, lambda) in grid.enumerate() {
        let g = objective(lambda)?;
        if g < best.1 {
            best = (lambda, g);
            best_idx = i;
        }
    }

    let mut a = lo + step * best_idx.saturating_sub(1) as f64;
    let mut b = (lo + step * (best_idx + 1) as f64).min(hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut gc = objective(c)?;
    let mut gd = objective(d)?;
    while (b - a) > LAMBDA_REL_TOL * 0.5 * (a + b) {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = objective(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = objective(d)?;
        }
    }
    for (lambda, g) in [(c, gc), (d, gd)] {
        if g < best.1 {
            best = (lambda, g);
        }
    }
    Ok(LambdaOptimum {
        bound: best.1.exp(),
        lambda: best.0,
    })
}

/// Explicit worst-case error bound that the realized median rule satisfies
/// with probability at least `1 - (4 tau (1 - tau))^{N/2} / 2`:
/// `inf_lambda (4 sqrt(2) / ((1 - tau) n) V_d(alpha/lambda, gamma^{1/lambda}))^lambda`.
pub fn det_error_bound(n: u64, params: &KorobovParams, tau: f64) -> Result<LambdaOptimum> {
    if n < 2 {
        return Err(Error::Domain(format!("n must be at least 2, got {n}")));
    }
    if !(tau > 0.5 && tau < 1.0) {
        return Err(Error::Domain(format!("tau must lie in (1/2, 1), got {tau}")));
    }
    lambda_infimum(params, 4.0 * SQRT_2 / ((1.0 - tau) * n as f64))
}

/// Markov-type bound met by at least `ceil(tau (p-1)^d)` generating vectors
/// modulo the prime `p`:
/// `inf_lambda (2 / ((1 - tau)(p - 1)) V_d(alpha/lambda, gamma^{1/lambda}))^lambda`.
pub fn good_vector_bound(p: u64, params: &KorobovParams, tau: f64) -> Result<LambdaOptimum> {
    if p < 2 {
        return Err(Error::Domain(format!("p must be at least 2, got {p}")));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Domain(format!("tau must lie in (0, 1), got {tau}")));
    }
    lambda_infimum(params, 2.0 / ((1.0 - tau) * (p - 1) as f64))
}

/// A trigonometric polynomial with finitely many nonzero Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    d: usize,
    terms: BTreeMap<Vec<i64>, Complex64>,
}

impl TrigPolynomial {
    /// Builds the polynomial; repeated frequencies have their coefficients added.
    pub fn new(d: usize, terms: impl IntoIterator<Item = (Vec<i64>, Complex64)>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        let mut map: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for (h, c) in terms {
            if h.len() != d {
                return Err(Error::Contract(format!("frequency {h:?} is not of length {d}")));
            }
            *map.entry(h).or_default() += c;
        }
        Ok(Self { d, terms: map })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], Complex64)> {
        self.terms.iter().map(|(h, c)| (h.as_slice(), *c))
    }

    pub fn coefficient(&self, h: &[i64]) -> Complex64 {
        self.terms.get(h).copied().unwrap_or_default()
    }

    /// The integral over the unit cube, i.e. the zero-frequency coefficient.
    pub fn mean(&self) -> Complex64 {
        self.coefficient(&vec![0; self.d])
    }

    /// `||f||^2 = sum_h r(h)^2 |f_hat(h)|^2`.
    pub fn norm_squared(&self, params: &KorobovParams) -> Result<f64> {
        if params.d() != self.d {
            return Err(Error::Contract("polynomial and space dimensions differ".into()));
        }
        let mut acc = CompensatedSum::new();
        for (h, c) in &self.terms {
            let r = r_weight(h, params)?;
            acc.add(r * r * c.norm_sqr());
        }
        Ok(acc.value())
    }

    pub fn norm(&self, params: &KorobovParams) -> Result<f64> {
        Ok(self.norm_squared(params)?.sqrt())
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let mut acc = ComplexSum::new();
        for (h, c) in &self.terms {
            let phase: f64 = h.iter().zip(x).map(|(&hj, &xj)| hj as f64 * xj).sum();
            acc.add(c * Complex64::from_polar(1.0, std::f64::consts::TAU * phase));
        }
        acc.value()
    }
}

/// Weight scheme as written in configuration files.
///
/// ```text
/// { "product": [1.0, 0.5, 0.25] }
/// { "power": 2.0 }                        # gamma_j = j^-2
/// { "constant": 0.5 }
/// { "general": [ { "subset": [1, 2], "value": 0.25 } ] }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightConfig {
    Product(Vec<f64>),
    Power(f64),
    Constant(f64),
    General(Vec<SubsetWeight>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetWeight {
    pub subset: Vec<usize>,
    pub value: f64,
}

impl WeightConfig {
    /// Parses the command-line shorthand: `const:<g>`, `pow:<beta>`, or a
    /// comma-separated list of product weights.
    pub fn parse_rule(text: &str) -> Result<Self> {
        let bad = |what: &str| Error::Config(format!("cannot parse weight rule {text:?}: {what}"));
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(&e.to_string()));
        if let Some(rest) = text.strip_prefix("const:") {
            Ok(WeightConfig::Constant(num(rest)?))
        } else if let Some(rest) = text.strip_prefix("pow:") {
            Ok(WeightConfig::Power(num(rest)?))
        } else {
            let values = text.split(',').map(num).collect::<Result<Vec<_>>>()?;
            Ok(WeightConfig::Product(values))
        }
    }

    /// The validated scheme for dimension `d`.
    pub fn resolve(&self, d: usize) -> Result<WeightScheme> {
        let scheme = match self {
            WeightConfig::Product(g) => WeightScheme::Product(g.clone()),
            WeightConfig::Power(beta) => WeightScheme::power_rule(*beta, d),
            WeightConfig::Constant(g) => WeightScheme::constant(*g, d),
            WeightConfig::General(list) => {
                let mut map = BTreeMap::new();
                for w in list {
                    let mut u = w.subset.clone();
                    u.sort_unstable();
                    if map.insert(u.clone(), w.value).is_some() {
                        return Err(Error::Config(format!("subset {u:?} listed twice")));
                    }
                }
                WeightScheme::General(map)
            }
        };
        scheme.validate(d)?;
        Ok(scheme)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn zeta_closed_forms() {
        assert!((zeta(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-13);
        assert!((zeta(4.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-13);
        assert!((zeta(6.0).unwrap() - PI.powi(6) / 945.0).abs() < 1e-13);
    }

    #[test]
    fn zeta_three_halves_against_direct_sum() {
        // Direct partial sum to K plus integral tail and half term; the next
        // correction is about s/12 K^{-s-1}.
        let s = 1.5;
        let k = 1_000_000u64;
        let mut acc: CompensatedSum = (1..k).rev().map(|i| (i as f64).powf(-s)).collect();
        let kf = k as f64;
        acc.add(kf.powf(1.0 - s) / (s - 1.0) + 0.5 * kf.powf(-s));
        let direct = acc.value();
        let z = zeta(s).unwrap();
        assert!((z - direct).abs() < 1e-9, "{z} vs {direct}");
        assert!((z - 2.612_375_348_685_488).abs() < 1e-12);
    }

    #[test]
    fn zeta_domain() {
        assert!(matches!(zeta(1.0), Err(Error::Domain(_))));
        assert!(matches!(zeta(0.5), Err(Error::Domain(_))));
        assert!(matches!(zeta(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn zeta_tail_sandwich() {
        // int_2^inf x^{-s} < zeta(s) - 1 < 2^{-s} + int_2^inf x^{-s}
        for i in 1..200 {
            let s = 1.0 + 0.05 * i as f64;
            let t = zeta(s).unwrap() - 1.0;
            let integral = 2f64.powf(1.0 - s) / (s - 1.0);
            assert!(t > integral && t < 2f64.powf(-s) + integral, "s = {s}");
        }
    }

    #[test]
    fn r_weight_examples() {
        let p = KorobovParams::product(1.0, vec![1.0, 0.5]).unwrap();
        assert_eq!(r_weight(&[0, 0], &p).unwrap(), 1.0);
        assert_eq!(r_weight(&[2, 3], &p).unwrap(), 12.0);
        assert_eq!(r_weight(&[0, 3], &p).unwrap(), 6.0);
        assert_eq!(r_weight(&[0, -3], &p).unwrap(), 6.0);
        assert!(matches!(r_weight(&[1], &p), Err(Error::Contract(_))));
    }

    #[test]
    fn r_weight_missing_general_key() {
        let mut map = BTreeMap::new();
        map.insert(vec![1], 0.5);
        let p = KorobovParams::new(2.0, WeightScheme::General(map), 2).unwrap();
        assert_eq!(r_weight(&[2, 0], &p).unwrap(), 8.0);
        assert!(matches!(r_weight(&[1, 1], &p), Err(Error::Config(_))));
    }

    #[test]
    fn params_validation() {
        assert!(KorobovParams::product(0.5, vec![1.0]).is_err());
        assert!(KorobovParams::product(1.0, vec![]).is_err());
        assert!(KorobovParams::product(1.0, vec![1.5]).is_err());
        assert!(KorobovParams::product(1.0, vec![0.0]).is_err());
        assert!(KorobovParams::new(1.0, WeightScheme::Product(vec![1.0]), 2).is_err());
        let mut map = BTreeMap::new();
        map.insert(vec![3], 0.5);
        assert!(KorobovParams::new(1.0, WeightScheme::General(map), 2).is_err());
        let mut map = BTreeMap::new();
        map.insert(vec![], 0.5);
        assert!(KorobovParams::new(1.0, WeightScheme::General(map), 2).is_err());
    }

    #[test]
    fn v_d_examples() {
        let v1 = v_d(2.0, &WeightScheme::Product(vec![1.0]), 1).unwrap();
        assert!((v1 - PI * PI / 3.0).abs() < 1e-12);
        let v2 = v_d(2.0, &WeightScheme::Product(vec![1.0, 1.0]), 2).unwrap();
        assert!(rel(v2, (1.0 + PI * PI / 3.0).powi(2) - 1.0) < 1e-13);
        assert!((v2 - 17.402_968_6).abs() < 1e-6);

        let mut map = BTreeMap::new();
        map.insert(vec![1], 1.0);
        map.insert(vec![2], 0.25);
        map.insert(vec![1, 2], 0.25);
        let vg = v_d(2.0, &WeightScheme::General(map), 2).unwrap();
        let tz = PI * PI / 3.0;
        assert!(rel(vg, tz + 0.25 * tz + 0.25 * tz * tz) < 1e-13);
        assert!((vg - 6.8181).abs() < 1e-4);
    }

    #[test]
    fn v_d_errors() {
        assert!(matches!(v_d(1.0, &WeightScheme::Product(vec![1.0]), 1), Err(Error::Domain(_))));
        let general = WeightScheme::General(BTreeMap::from([(vec![1], 1.0)]));
        assert!(matches!(v_d(2.0, &general, 26), Err(Error::Size(_))));
    }

    #[test]
    fn v_d_closed_form_matches_subset_enumeration() {
        for d in 1..=12 {
            for beta in [0.0, 1.0, 2.5] {
                let w = WeightScheme::power_rule(beta, d);
                let g = w.to_general(d).unwrap();
                for alpha in [1.1, 2.0, 3.7] {
                    let a = v_d(alpha, &w, d).unwrap();
                    let b = v_d(alpha, &g, d).unwrap();
                    assert!(rel(a, b) <= 1e-10, "d={d} beta={beta} alpha={alpha}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn m_d_examples() {
        let m = m_d_bound(2.0, &[1.0], 1.0).unwrap();
        assert!(rel(m, (PI * PI / 3.0).exp()) < 1e-13);
        assert!((m - 26.839_324_2).abs() < 1e-6);
        let tiny = m_d_bound(2.0, &[1e-300; 4], 1.0).unwrap();
        assert!((tiny - 1.0).abs() < 1e-12);
        assert!(matches!(m_d_bound(2.0, &[1.0], 2.0), Err(Error::Domain(_))));
        assert!(matches!(m_d_bound(2.0, &[1.0], 0.4), Err(Error::Domain(_))));
    }

    #[test]
    fn m_d_dominates_v_d() {
        for d in [1usize, 2, 5, 20] {
            for beta in [0.0, 1.0, 3.0] {
                let g = WeightScheme::power_rule(beta, d);
                let gammas = g.as_product().unwrap().to_vec();
                for alpha in [0.75, 1.0, 2.0, 3.5] {
                    for frac in [0.0, 0.3, 0.6, 0.9] {
                        let lambda = 0.5 + frac * (alpha - 0.5);
                        let v = v_d(alpha / lambda, &g.powered(1.0 / lambda), d).unwrap();
                        let m = m_d_bound(alpha, &gammas, lambda).unwrap();
                        assert!(v <= m * (1.0 + 1e-12), "d={d} beta={beta} alpha={alpha} lambda={lambda}");
                    }
                }
            }
        }
    }

    fn dense_grid_min(params: &KorobovParams, scale: f64, points: usize) -> f64 {
        let lo = 0.5;
        let hi = params.alpha() - LAMBDA_EDGE;
        (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .map(|l| log_lambda_objective(params, scale, l).unwrap())
            .fold(f64::INFINITY, f64::min)
            .exp()
    }

    #[test]
    fn det_error_bound_matches_dense_grid() {
        let params = KorobovParams::product(2.0, vec![1.0]).unwrap();
        let tau = 7.0 / 8.0;
        let opt = det_error_bound(1024, &params, tau).unwrap();
        let scale = 4.0 * SQRT_2 / ((1.0 - tau) * 1024.0);
        let oracle = dense_grid_min(&params, scale, 10_000);
        assert!(opt.bound <= oracle * (1.0 + 1e-12));
        assert!(rel(opt.bound, oracle) < 1e-6, "{} vs {oracle}", opt.bound);
        assert!(opt.lambda >= 0.5 && opt.lambda < 2.0);

        let later = det_error_bound(2048, &params, tau).unwrap();
        assert!(later.bound < opt.bound);
    }

    #[test]
    fn det_error_bound_domain() {
        let params = KorobovParams::product(2.0, vec![1.0]).unwrap();
        assert!(det_error_bound(1, &params, 0.75).is_err());
        assert!(det_error_bound(10, &params, 0.5).is_err());
        assert!(det_error_bound(10, &params, 1.0).is_err());
    }

    #[test]
    fn lambda_star_feasible_across_params() {
        for alpha in [0.6, 1.0, 1.5, 2.0, 3.0] {
            for d in [1usize, 3, 10] {
                let params = KorobovParams::new(alpha, WeightScheme::power_rule(2.0, d), d).unwrap();
                for n in [2u64, 100, 100_000, 1 << 40] {
                    let opt = det_error_bound(n, &params, 0.875).unwrap();
                    assert!(opt.lambda >= 0.5 && opt.lambda < alpha);
                    assert!(opt.bound.is_finite() && opt.bound > 0.0);
                }
            }
        }
    }

    #[test]
    fn general_weights_bound_agrees_with_product() {
        let w = WeightScheme::Product(vec![1.0, 0.5, 0.25]);
        let a = KorobovParams::new(2.0, w.clone(), 3).unwrap();
        let b = KorobovParams::new(2.0, w.to_general(3).unwrap(), 3).unwrap();
        let oa = det_error_bound(500, &a, 0.9).unwrap();
        let ob = det_error_bound(500, &b, 0.9).unwrap();
        assert!(rel(oa.bound, ob.bound) < 1e-9);
    }

    #[test]
    fn trig_polynomial_norm_and_mean() {
        let params = KorobovParams::product(1.0, vec![1.0, 0.5]).unwrap();
        let f = TrigPolynomial::new(
            2,
            vec![
                (vec![0, 0], Complex64::new(2.0, 0.0)),
                (vec![2, 3], Complex64::new(0.0, 1.0)),
                (vec![0, 3], Complex64::new(0.5, 0.5)),
                (vec![0, 3], Complex64::new(0.5, -0.5)),
            ],
        )
        .unwrap();
        assert_eq!(f.mean(), Complex64::new(2.0, 0.0));
        assert_eq!(f.coefficient(&[0, 3]), Complex64::new(1.0, 0.0));
        // 4 + 144 + 36
        assert!((f.norm_squared(&params).unwrap() - 184.0).abs() < 1e-12);
    }

    #[test]
    fn weight_config_forms() {
        assert_eq!(WeightConfig::parse_rule("const:1").unwrap().resolve(2).unwrap(), WeightScheme::Product(vec![1.0, 1.0]));
        assert_eq!(
            WeightConfig::parse_rule("pow:1").unwrap().resolve(2).unwrap(),
            WeightScheme::Product(vec![1.0, 0.5])
        );
        assert_eq!(
            WeightConfig::parse_rule("1,0.25").unwrap().resolve(2).unwrap(),
            WeightScheme::Product(vec![1.0, 0.25])
        );
        assert!(WeightConfig::parse_rule("const:x").is_err());
        assert!(WeightConfig::parse_rule("1,2").unwrap().resolve(2).is_err());

        let json = r#"{"general": [{"subset": [2, 1], "value": 0.25}, {"subset": [1], "value": 1.0}]}"#;
        let cfg: WeightConfig = serde_json::from_str(json).unwrap();
        let scheme = cfg.resolve(2).unwrap();
        assert_eq!(scheme.weight_of(&[1, 2]).unwrap(), 0.25);

        let toml_text = "power = 2.0\n";
        let cfg: WeightConfig = toml::from_str(toml_text).unwrap();
        assert_eq!(cfg, WeightConfig::Power(2.0));
    }
}
