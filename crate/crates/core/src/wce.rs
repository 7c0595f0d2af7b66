//! Worst-case errors of lattice rules in weighted Korobov spaces.
//!
//! Two independent routes compute `e(Q_p^z)^2 = sum_{h != 0, h.z = 0 mod p} r(h)^{-2}`:
//!
//! * [`wce_kernel`]: for integer smoothness and product weights, the
//!   reproducing-kernel trace `-1 + (1/p) sum_k prod_j (1 + gamma_j^2 omega({k z_j / p}))`
//!   with `omega(x) = (-1)^{alpha+1} (2 pi)^{2 alpha} B_{2 alpha}(x) / (2 alpha)!`.
//! * [`wce_bruteforce`]: the dual-lattice sum truncated to the box
//!   `max_j |h_j| <= H`, with a bound on the truncation defect.

use std::f64::consts::{SQRT_2, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::korobov::{good_vector_bound, r_weight, zeta, KorobovParams, WeightScheme};
use crate::lattice::{dual_indicator, LatticeRule};
use crate::median::median_odd;
use crate::par;
use crate::sum::CompensatedSum;

/// Work budget of the brute-force route: box points for general weights,
/// residue-class operations for product weights.
pub const BRUTE_FORCE_BUDGET: f64 = 1e8;

/// Bernoulli polynomial coefficients `(numerator, denominator)`, ascending powers.
const B2: [(i64, i64); 3] = [(1, 6), (-1, 1), (1, 1)];
const B4: [(i64, i64); 5] = [(-1, 30), (0, 1), (1, 1), (-2, 1), (1, 1)];
const B6: [(i64, i64); 7] = [(1, 42), (0, 1), (-1, 2), (0, 1), (5, 2), (-3, 1), (1, 1)];
const B8: [(i64, i64); 9] = [(-1, 30), (0, 1), (2, 3), (0, 1), (-7, 3), (0, 1), (14, 3), (-4, 1), (1, 1)];
const B10: [(i64, i64); 11] = [
    (5, 66),
    (0, 1),
    (-3, 2),
    (0, 1),
    (5, 1),
    (0, 1),
    (-7, 1),
    (0, 1),
    (15, 2),
    (-5, 1),
    (1, 1),
];

fn bernoulli_coeffs(degree: u32) -> Option<&'static [(i64, i64)]> {
    match degree {
        2 => Some(&B2),
        4 => Some(&B4),
        6 => Some(&B6),
        8 => Some(&B8),
        10 => Some(&B10),
        _ => None,
    }
}

/// Bernoulli polynomial `B_degree(x)` for even degree 2..=10.
pub fn bernoulli_poly(degree: u32, x: f64) -> Result<f64> {
    let coeffs =
        bernoulli_coeffs(degree).ok_or_else(|| Error::Domain(format!("Bernoulli polynomial of degree {degree} unsupported")))?;
    Ok(coeffs.iter().rev().fold(0.0, |acc, &(num, den)| acc * x + num as f64 / den as f64))
}

/// `omega_alpha(x) = sum_{h != 0} exp(2 pi i h x) / |h|^{2 alpha}` for `x in [0, 1]`.
pub fn kernel_omega(alpha: u32, x: f64) -> Result<f64> {
    if !(1..=5).contains(&alpha) {
        return Err(Error::Domain(format!("integer smoothness 1..=5 supported, got {alpha}")));
    }
    let two_alpha = 2 * alpha;
    let factorial: f64 = (1..=two_alpha).map(f64::from).product();
    let sign = if alpha % 2 == 1 { 1.0 } else { -1.0 };
    Ok(sign * TAU.powi(two_alpha as i32) * bernoulli_poly(two_alpha, x)? / factorial)
}

fn product_gammas_for(rule: &LatticeRule, gammas: &[f64]) -> Result<()> {
    if gammas.len() != rule.dim() {
        return Err(Error::Contract(format!(
            "{} weights for a rule of dimension {}",
            gammas.len(),
            rule.dim()
        )));
    }
    WeightScheme::Product(gammas.to_vec()).validate(rule.dim())
}

fn clamp_radicand(e2: f64) -> Result<f64> {
    if e2 >= 0.0 {
        Ok(e2.sqrt())
    } else if e2 >= -1e-12 {
        Ok(0.0)
    } else {
        Err(Error::Internal(format!("negative squared worst-case error {e2}")))
    }
}

/// Exact worst-case error for integer smoothness `alpha in 1..=5` and product weights.
pub fn wce_kernel(rule: &LatticeRule, alpha: u32, product_gammas: &[f64]) -> Result<f64> {
    product_gammas_for(rule, product_gammas)?;
    let p = rule.p();
    let pf = p as f64;
    let omega = (0..p).map(|r| kernel_omega(alpha, r as f64 / pf)).collect::<Result<Vec<f64>>>()?;
    let g2: Vec<f64> = product_gammas.iter().map(|g| g * g).collect();
    let z = rule.z();
    let mut residues = vec![0u64; z.len()];
    let mut acc = CompensatedSum::new();
    for _ in 0..p {
        let term: f64 = residues.iter().zip(&g2).map(|(&r, &g)| 1.0 + g * omega[r as usize]).product();
        acc.add(term);
        for (r, &zj) in residues.iter_mut().zip(z) {
            *r += zj;
            if *r >= p {
                *r -= p;
            }
        }
    }
    clamp_radicand(acc.value() / pf - 1.0)
}

/// Worst-case error of a rule for arbitrary parameters, when an exact route exists.
pub fn wce_exact(rule: &LatticeRule, params: &KorobovParams) -> Result<f64> {
    let alpha = integer_alpha(params.alpha())
        .ok_or_else(|| Error::Domain(format!("no exact kernel for alpha = {}", params.alpha())))?;
    let gammas = params
        .weights()
        .as_product()
        .ok_or_else(|| Error::Domain("exact kernel needs product weights".into()))?;
    wce_kernel(rule, alpha, gammas)
}

fn integer_alpha(alpha: f64) -> Option<u32> {
    let a = alpha.round();
    (a == alpha && (1.0..=5.0).contains(&a)).then_some(a as u32)
}

/// Result of the truncated dual-lattice sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BruteForceWce {
    /// Square root of the dual sum over `0 < max_j |h_j| <= H`.
    pub value: f64,
    /// Upper bound on `e - value` from frequencies outside the box.
    pub tail_bound: f64,
    /// Largest single dual term `1 / r(h)` inside the box.
    pub max_term: f64,
}

/// `sum_{k > H} k^{-s} <= H^{1-s} / (s - 1)`.
fn zeta_tail_bound(s: f64, h: u64) -> f64 {
    (h as f64).powf(1.0 - s) / (s - 1.0)
}

/// Truncated dual-lattice sum over the box `max_j |h_j| <= H`.
pub fn wce_bruteforce(rule: &LatticeRule, params: &KorobovParams, h_max: u64) -> Result<BruteForceWce> {
    if params.d() != rule.dim() {
        return Err(Error::Contract("rule and space dimensions differ".into()));
    }
    if h_max < rule.p() {
        return Err(Error::Domain(format!("box half-width {h_max} must be at least p = {}", rule.p())));
    }
    let d = rule.dim() as f64;
    let (work, what) = match params.weights() {
        WeightScheme::Product(_) => (d * (2.0 * h_max as f64 + (rule.p() as f64).powi(2)), "d(2H+p^2)"),
        WeightScheme::General(_) => ((2.0 * h_max as f64 + 1.0).powf(d), "(2H+1)^d"),
    };
    if work > BRUTE_FORCE_BUDGET {
        return Err(Error::Size(format!(
            "{what} = {work:.3e} exceeds the enumeration budget {BRUTE_FORCE_BUDGET:e}"
        )));
    }
    let (sum, max_sq) = match params.weights() {
        WeightScheme::Product(g) => residue_class_sum(rule, params.alpha(), g, h_max),
        WeightScheme::General(_) => box_enumeration(rule, params, h_max)?,
    };
    let tail_sq = truncation_tail(params, h_max)?;
    let value = sum.sqrt();
    Ok(BruteForceWce {
        value,
        tail_bound: (sum + tail_sq).sqrt() - value,
        max_term: max_sq.sqrt(),
    })
}

/// Bound on the squared-error contribution of frequencies outside the box.
fn truncation_tail(params: &KorobovParams, h_max: u64) -> Result<f64> {
    let s = 2.0 * params.alpha();
    let full = 2.0 * zeta(s)?;
    let tail = 2.0 * zeta_tail_bound(s, h_max);
    match params.weights() {
        WeightScheme::Product(g) => {
            let factors: Vec<f64> = g.iter().map(|w| 1.0 + w * w * full).collect();
            Ok((0..g.len())
                .map(|j| {
                    let others: f64 = factors.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, f)| f).product();
                    g[j] * g[j] * tail * others
                })
                .sum())
        }
        WeightScheme::General(map) => Ok(map
            .iter()
            .map(|(u, w)| w * w * u.len() as f64 * tail * full.powi(u.len() as i32 - 1))
            .sum()),
    }
}

/// Product-weight dual sum, grouping each coordinate's frequencies by the
/// residue `h_j z_j mod p` and combining coordinates by cyclic convolution.
/// Returns the sum and the largest single term.
fn residue_class_sum(rule: &LatticeRule, alpha: f64, gammas: &[f64], h_max: u64) -> (f64, f64) {
    let p = rule.p() as usize;
    // acc[r]: sum over h != 0 in the first j coordinates with h.z = r (mod p).
    let mut acc = vec![0.0f64; p];
    let mut acc_max = vec![0.0f64; p];
    for (&zj, &gj) in rule.z().iter().zip(gammas) {
        let g2 = gj * gj;
        let mut nonzero: Vec<CompensatedSum> = vec![CompensatedSum::new(); p];
        let mut nonzero_max = vec![0.0f64; p];
        let zj = zj as u128;
        for h in (1..=h_max).rev() {
            let w = g2 * (h as f64).powf(-2.0 * alpha);
            let r_pos = ((h as u128 * zj) % p as u128) as usize;
            let r_neg = (p - r_pos) % p;
            for r in [r_pos, r_neg] {
                nonzero[r].add(w);
                nonzero_max[r] = nonzero_max[r].max(w);
            }
        }
        let e: Vec<f64> = nonzero.iter().map(CompensatedSum::value).collect();
        // Distribution including h_j = 0 (weight 1 at residue 0).
        let mut full = e.clone();
        full[0] += 1.0;
        let mut full_max = nonzero_max.clone();
        full_max[0] = full_max[0].max(1.0);

        let mut next = vec![0.0f64; p];
        let mut next_max = vec![0.0f64; p];
        for r in 0..p {
            let mut s = CompensatedSum::new();
            let mut m = nonzero_max[r];
            s.add(e[r]);
            for a in 0..p {
                let b = (r + p - a) % p;
                s.add(acc[a] * full[b]);
                m = m.max(acc_max[a] * full_max[b]);
            }
            next[r] = s.value();
            next_max[r] = m;
        }
        acc = next;
        acc_max = next_max;
    }
    (acc[0], acc_max[0])
}

/// Direct enumeration of every frequency in the box, split by leading coordinate.
fn box_enumeration(rule: &LatticeRule, params: &KorobovParams, h_max: u64) -> Result<(f64, f64)> {
    let d = rule.dim();
    let h_max = h_max as i64;
    let width = (2 * h_max + 1) as usize;
    let parts = par::try_map_indexed(width, |lead| -> Result<(CompensatedSum, f64)> {
        let mut h = vec![-h_max; d];
        h[0] = lead as i64 - h_max;
        let mut acc = CompensatedSum::new();
        let mut max = 0.0f64;
        loop {
            if h.iter().any(|&x| x != 0) && dual_indicator(&h, rule)? {
                let r = r_weight(&h, params)?;
                let t = 1.0 / (r * r);
                acc.add(t);
                max = max.max(t);
            }
            // Odometer over coordinates 1..d.
            let mut j = 1;
            loop {
                if j >= d {
                    return Ok((acc, max));
                }
                if h[j] < h_max {
                    h[j] += 1;
                    break;
                }
                h[j] = -h_max;
                j += 1;
            }
        }
    })?;
    let mut total = CompensatedSum::new();
    let mut max = 0.0f64;
    for (s, m) in &parts {
        total.merge(s);
        max = max.max(*m);
    }
    Ok((total.value(), max))
}

/// `sqrt(2)` times the median of per-rule worst-case errors, an upper bound
/// on the worst-case error of the median of the rules.
///
/// Integer smoothness with product weights uses the exact kernel; otherwise
/// the truncated dual sum with half-width `max(fallback_h, p)` plus its tail
/// bound is used.
pub fn median_wce_bound(rules: &[LatticeRule], params: &KorobovParams, fallback_h: u64) -> Result<f64> {
    let errors = par::try_map_indexed(rules.len(), |i| rule_wce_upper(&rules[i], params, fallback_h))?;
    Ok(SQRT_2 * median_odd(&errors)?)
}

fn rule_wce_upper(rule: &LatticeRule, params: &KorobovParams, fallback_h: u64) -> Result<f64> {
    match wce_exact(rule, params) {
        Ok(e) => Ok(e),
        Err(Error::Domain(_)) => {
            let b = wce_bruteforce(rule, params, fallback_h.max(rule.p()))?;
            Ok(b.value + b.tail_bound)
        }
        Err(e) => Err(e),
    }
}

/// Census of generating vectors modulo `p` against the Markov-type bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoodVectorCensus {
    pub bound: f64,
    pub lambda: f64,
    pub good: u64,
    pub total: u64,
}

impl GoodVectorCensus {
    pub fn fraction(&self) -> f64 {
        self.good as f64 / self.total as f64
    }
}

/// Enumerates all `z in {1..p-1}^d` and counts those whose exact worst-case
/// error meets [`good_vector_bound`] at level `tau`.
pub fn good_vector_census(p: u64, params: &KorobovParams, tau: f64) -> Result<GoodVectorCensus> {
    let opt = good_vector_bound(p, params, tau)?;
    let d = params.d();
    let total = (p - 1)
        .checked_pow(d as u32)
        .filter(|&t| t as f64 <= BRUTE_FORCE_BUDGET)
        .ok_or_else(|| Error::Size(format!("(p-1)^d too large for p = {p}, d = {d}")))?;
    let flags = par::try_map_indexed(total as usize, |idx| {
        let mut rest = idx as u64;
        let z: Vec<u64> = (0..d)
            .map(|_| {
                let c = rest % (p - 1) + 1;
                rest /= p - 1;
                c
            })
            .collect();
        let rule = LatticeRule::new(p, z)?;
        Ok(wce_exact(&rule, params)? <= opt.bound)
    })?;
    Ok(GoodVectorCensus {
        bound: opt.bound,
        lambda: opt.lambda,
        good: flags.iter().filter(|&&g| g).count() as u64,
        total,
    })
}
