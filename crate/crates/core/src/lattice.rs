//! Rank-1 lattice rules `Q_p^z(f) = (1/p) sum_k f({k z / p})`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::ComplexSum;

/// A function on `[0,1]^d` with complex values.
pub trait Integrand: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64]) -> Complex64;

    /// Exact integral over the unit cube, when known.
    fn true_integral(&self) -> Option<Complex64> {
        None
    }
}

impl<T: Integrand + ?Sized> Integrand for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64]) -> Complex64 {
        (**self).eval(x)
    }
    fn true_integral(&self) -> Option<Complex64> {
        (**self).true_integral()
    }
}

impl Integrand for crate::korobov::TrigPolynomial {
    fn dim(&self) -> usize {
        self.dim()
    }
    fn eval(&self, x: &[f64]) -> Complex64 {
        self.eval(x)
    }
    fn true_integral(&self) -> Option<Complex64> {
        Some(self.mean())
    }
}

/// Integrand backed by a closure.
pub struct FnIntegrand<F> {
    dim: usize,
    f: F,
    integral: Option<Complex64>,
}

impl<F> FnIntegrand<F>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f, integral: None }
    }

    pub fn with_integral(mut self, value: Complex64) -> Self {
        self.integral = Some(value);
        self
    }
}

impl<F> Integrand for FnIntegrand<F>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> Complex64 {
        (self.f)(x)
    }
    fn true_integral(&self) -> Option<Complex64> {
        self.integral
    }
}

/// A prime modulus and a generating vector with entries in `1..=p-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeRule {
    p: u64,
    z: Vec<u64>,
}

impl LatticeRule {
    /// Checks `p >= 2` and `1 <= z_j <= p-1`. Primality is the caller's
    /// responsibility; see [`LatticeRule::new_prime`].
    pub fn new(p: u64, z: Vec<u64>) -> Result<Self> {
        if p < 2 {
            return Err(Error::Domain(format!("lattice modulus must be at least 2, got {p}")));
        }
        if p > crate::primes::MAX_N {
            return Err(Error::Domain(format!("lattice modulus {p} is too large")));
        }
        if z.is_empty() {
            return Err(Error::Domain("generating vector must be nonempty".into()));
        }
        if let Some(&bad) = z.iter().find(|&&c| c == 0 || c >= p) {
            return Err(Error::Domain(format!("generator entry {bad} not in 1..={}", p - 1)));
        }
        Ok(Self { p, z })
    }

    /// As [`LatticeRule::new`], additionally requiring `p` to be prime.
    pub fn new_prime(p: u64, z: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        Self::new(p, z)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn z(&self) -> &[u64] {
        &self.z
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    /// Integer residues `k z_j mod p` of node `k`.
    pub fn node_residues(&self, k: u64) -> Vec<u64> {
        self.z.iter().map(|&zj| mul_mod(k % self.p, zj, self.p)).collect()
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= p {
        if p % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

/// The `p` nodes in order `k = 0..p-1`; coordinate `j` of node `k` is
/// `((k z_j) mod p) / p`.
pub fn lattice_nodes(rule: &LatticeRule) -> Vec<Vec<f64>> {
    let p = rule.p as f64;
    (0..rule.p)
        .map(|k| rule.node_residues(k).into_iter().map(|r| r as f64 / p).collect())
        .collect()
}

/// Applies the rule to `f`, optionally mapping each node coordinate first.
pub(crate) fn apply_rule_mapped<I, M>(rule: &LatticeRule, f: &I, map: M) -> Result<Complex64>
where
    I: Integrand + ?Sized,
    M: Fn(f64) -> f64,
{
    if f.dim() != rule.dim() {
        return Err(Error::Contract(format!(
            "integrand dimension {} differs from rule dimension {}",
            f.dim(),
            rule.dim()
        )));
    }
    let p = rule.p;
    let pf = p as f64;
    let mut residues = vec![0u64; rule.dim()];
    let mut x = vec![0.0; rule.dim()];
    let mut acc = ComplexSum::new();
    for k in 0..p {
        for (xj, &rj) in x.iter_mut().zip(&residues) {
            *xj = map(rj as f64 / pf);
        }
        let v = f.eval(&x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Evaluation {
                node: k as usize,
                replicate: None,
            });
        }
        acc.add(v);
        // Next residues: (k+1) z_j mod p, by exact integer increments.
        for (rj, &zj) in residues.iter_mut().zip(&rule.z) {
            *rj += zj;
            if *rj >= p {
                *rj -= p;
            }
        }
    }
    Ok(acc.value() / pf)
}

/// `Q_p^z(f)`: the compensated mean of `f` over the lattice nodes.
pub fn apply_rule<I: Integrand + ?Sized>(rule: &LatticeRule, f: &I) -> Result<Complex64> {
    apply_rule_mapped(rule, f, |x| x)
}

/// Whether `h` lies in the dual lattice, `h . z = 0 (mod p)`.
pub fn dual_indicator(h: &[i64], rule: &LatticeRule) -> Result<bool> {
    if h.len() != rule.dim() {
        return Err(Error::Contract(format!(
            "frequency has length {} but rule dimension is {}",
            h.len(),
            rule.dim()
        )));
    }
    let p = i128::from(rule.p);
    let mut acc: i128 = 0;
    for (&hj, &zj) in h.iter().zip(&rule.z) {
        acc = (acc + i128::from(hj).rem_euclid(p) * i128::from(zj)) % p;
    }
    Ok(acc == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn character(h: i64) -> FnIntegrand<impl Fn(&[f64]) -> Complex64 + Sync> {
        FnIntegrand::new(1, move |x: &[f64]| Complex64::from_polar(1.0, TAU * h as f64 * x[0])).with_integral(Complex64::new(0.0, 0.0))
    }

    #[test]
    fn node_examples() {
        let r = LatticeRule::new(3, vec![1, 2]).unwrap();
        assert_eq!(
            lattice_nodes(&r),
            vec![vec![0.0, 0.0], vec![1.0 / 3.0, 2.0 / 3.0], vec![2.0 / 3.0, 1.0 / 3.0]]
        );
        let r = LatticeRule::new(5, vec![2]).unwrap();
        let got: Vec<f64> = lattice_nodes(&r).into_iter().map(|x| x[0]).collect();
        assert_eq!(got, vec![0.0, 0.4, 0.8, 0.2, 0.6]);
        let r = LatticeRule::new(2, vec![1, 1]).unwrap();
        assert_eq!(lattice_nodes(&r), vec![vec![0.0, 0.0], vec![0.5, 0.5]]);
    }

    #[test]
    fn rejects_bad_rules() {
        assert!(LatticeRule::new(1, vec![1]).is_err());
        assert!(LatticeRule::new(5, vec![0]).is_err());
        assert!(LatticeRule::new(5, vec![5]).is_err());
        assert!(LatticeRule::new(5, vec![]).is_err());
        assert!(LatticeRule::new_prime(9, vec![1]).is_err());
        assert!(LatticeRule::new_prime(7, vec![3]).is_ok());
    }

    #[test]
    fn constant_is_exact() {
        let r = LatticeRule::new(101, vec![3, 17, 44]).unwrap();
        let f = FnIntegrand::new(3, |_: &[f64]| Complex64::new(1.0, 0.0));
        assert_eq!(apply_rule(&r, &f).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn character_sums() {
        let r = LatticeRule::new(5, vec![2]).unwrap();
        assert!(apply_rule(&r, &character(1)).unwrap().norm() < 1e-15);
        let aliased = apply_rule(&r, &character(5)).unwrap();
        assert!((aliased - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn evaluation_error_carries_node() {
        let r = LatticeRule::new(5, vec![2]).unwrap();
        let f = FnIntegrand::new(1, |x: &[f64]| Complex64::new(1.0 / (x[0] - 0.8), 0.0));
        // 0.8 is node k = 2
        assert_eq!(apply_rule(&r, &f).unwrap_err(), Error::Evaluation { node: 2, replicate: None });
        let r2 = LatticeRule::new(5, vec![2, 1]).unwrap();
        assert!(matches!(apply_rule(&r2, &f), Err(Error::Contract(_))));
    }

    #[test]
    fn dual_examples() {
        let r = LatticeRule::new(5, vec![1, 2]).unwrap();
        assert!(dual_indicator(&[2, 4], &r).unwrap());
        assert!(dual_indicator(&[0, 0], &r).unwrap());
        assert!(!dual_indicator(&[1, 0], &r).unwrap());
        assert!(dual_indicator(&[-2, -4], &r).unwrap());
        assert!(dual_indicator(&[3, 1], &r).unwrap());
        let big = LatticeRule::new(999_999_937, vec![999_999_936, 999_999_936]).unwrap();
        assert!(dual_indicator(&[i64::MAX, -i64::MAX], &big).unwrap());
    }

    #[test]
    fn node_set_is_a_group() {
        for (p, z) in [(7u64, vec![1u64, 3]), (11, vec![2, 5, 7]), (13, vec![6, 6])] {
            let r = LatticeRule::new(p, z).unwrap();
            for a in 0..p {
                for b in 0..p {
                    let sum: Vec<u64> = r.node_residues(a).iter().zip(r.node_residues(b)).map(|(x, y)| (x + y) % p).collect();
                    assert_eq!(sum, r.node_residues((a + b) % p));
                }
            }
        }
    }

    #[test]
    fn large_modulus_nodes_are_exact() {
        let p = 9_999_991u64;
        let r = LatticeRule::new(p, vec![1_234_567, p - 1]).unwrap();
        let k = p - 3;
        let res = r.node_residues(k);
        assert_eq!(res[0], (u128::from(k) * 1_234_567u128 % u128::from(p)) as u64);
        assert_eq!(res[1], 3);
    }
}
