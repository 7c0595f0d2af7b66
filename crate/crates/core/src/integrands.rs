//! Product-form test functions with unit integral over `[0,1]^d`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Integrand;
use crate::quad;

/// Absolute tolerance used for the centering constant of `g_a`.
pub const G_MEAN_TOL: f64 = 1e-14;

/// `g_a(x) = |x - 1/2|^a exp(1 / ((2x - 1)^2 - 1))`, extended by 0 at the endpoints.
pub fn g_a_eval(a: f64, x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let t = 2.0 * x - 1.0;
    (x - 0.5).abs().powf(a) * (1.0 / (t * t - 1.0)).exp()
}

/// `int_0^1 g_a(t) dt`, as twice the integral over `[1/2, 1]`.
pub fn g_a_mean(a: f64, tol: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("g_a needs a > 0, got {a}")));
    }
    if !(tol >= G_MEAN_TOL) {
        return Err(Error::Domain(format!("tolerance must be at least {G_MEAN_TOL:e}, got {tol}")));
    }
    // Kink at 1/2, flat tail at 1.
    let breaks = [0.5, 0.625, 0.75, 0.875, 1.0];
    let half = quad::integrate(|x| g_a_eval(a, x), &breaks, 0.5 * tol, quad::DEFAULT_MAX_INTERVALS)?;
    Ok(2.0 * half.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionKind {
    /// `prod_j (1 + (|4 x_j - 2| - 1) / j^{c1})`.
    F1 { c1: f64 },
    /// `prod_j (1 + (x_j - 1/2)^2 sin(2 pi x_j - pi) / j^{c2})`.
    F2 { c2: f64 },
    /// `prod_j (1 + (g_a(x_j) - int g_a) / j^c)`.
    Fac { a: f64, c: f64 },
    /// `prod_j (1 + theta^j q(x_j) / 8)` with a degree-7 polynomial plus sine `q`.
    NonPeriodic { theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionSpec {
    pub kind: FunctionKind,
    pub d: usize,
}

impl TestFunctionSpec {
    pub fn new(kind: FunctionKind, d: usize) -> Result<Self> {
        let spec = Self { kind, d };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        let ok = match self.kind {
            FunctionKind::F1 { c1 } => c1 > 0.0,
            FunctionKind::F2 { c2 } => c2 > 0.0,
            FunctionKind::Fac { a, c } => a > 0.0 && c > a + 1.0,
            // |theta| < 1 is the tractable regime but is not required.
            FunctionKind::NonPeriodic { theta } => theta.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid test function parameters {:?}", self.kind)))
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FunctionKind::F1 { .. } => "f1",
            FunctionKind::F2 { .. } => "f2",
            FunctionKind::Fac { .. } => "fac",
            FunctionKind::NonPeriodic { .. } => "nonper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Tent,
    SineBump,
    Centered { a: f64, mean: f64 },
    Polynomial,
}

impl Shape {
    #[inline]
    fn eval(self, x: f64) -> f64 {
        match self {
            Shape::Tent => (4.0 * x - 2.0).abs() - 1.0,
            Shape::SineBump => {
                let u = x - 0.5;
                u * u * (TAU * x - PI).sin()
            }
            Shape::Centered { a, mean } => g_a_eval(a, x) - mean,
            Shape::Polynomial => {
                let x2 = x * x;
                let x3 = x2 * x;
                let x4 = x2 * x2;
                (31.0 - 84.0 * x2 + 8.0 * x3 + 70.0 * x4 - 28.0 * x4 * x2 + 8.0 * x4 * x3
                    - 16.0 * 1f64.cos()
                    - 16.0 * x.sin())
                    / 8.0
            }
        }
    }
}

/// A test function ready for evaluation: `prod_j (1 + scale_j * shape(x_j))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    spec: TestFunctionSpec,
    shape: Shape,
    scales: Vec<f64>,
}

impl TestFunction {
    pub fn spec(&self) -> &TestFunctionSpec {
        &self.spec
    }

    /// The `j`-th univariate factor (0-based `j`).
    pub fn factor(&self, j: usize, x: f64) -> f64 {
        1.0 + self.scales[j] * self.shape.eval(x)
    }

    /// Centering constant of `g_a` for `fac` functions.
    pub fn g_mean(&self) -> Option<f64> {
        match self.shape {
            Shape::Centered { mean, .. } => Some(mean),
            _ => None,
        }
    }

    pub fn eval_real(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.scales).map(|(&xj, &s)| 1.0 + s * self.shape.eval(xj)).product()
    }
}

impl Integrand for TestFunction {
    fn dim(&self) -> usize {
        self.spec.d
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        Complex64::new(self.eval_real(x), 0.0)
    }

    fn true_integral(&self) -> Option<Complex64> {
        Some(Complex64::new(1.0, 0.0))
    }
}

pub fn make_integrand(spec: TestFunctionSpec) -> Result<TestFunction> {
    spec.validate()?;
    let decay = |c: f64| (1..=spec.d).map(|j| (j as f64).powf(-c)).collect::<Vec<_>>();
    let (shape, scales) = match spec.kind {
        FunctionKind::F1 { c1 } => (Shape::Tent, decay(c1)),
        FunctionKind::F2 { c2 } => (Shape::SineBump, decay(c2)),
        FunctionKind::Fac { a, c } => (
            Shape::Centered {
                a,
                mean: g_a_mean(a, G_MEAN_TOL)?,
            },
            decay(c),
        ),
        FunctionKind::NonPeriodic { theta } => (Shape::Polynomial, (1..=spec.d).map(|j| theta.powi(j as i32)).collect()),
    };
    Ok(TestFunction { spec, shape, scales })
}

/// `|int_0^1 factor_j - 1|` for every coordinate `j`, by adaptive quadrature.
pub fn factor_mean_check(spec: TestFunctionSpec, tol: f64) -> Result<Vec<f64>> {
    let f = make_integrand(spec)?;
    let breaks = [0.0, 0.25, 0.5, 0.75, 1.0];
    (0..spec.d)
        .map(|j| {
            let r = quad::integrate(|x| f.factor(j, x), &breaks, tol, quad::DEFAULT_MAX_INTERVALS)?;
            Ok((r.value - 1.0).abs())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_a_examples() {
        for a in [0.1, 0.5, 1.0, 3.9] {
            assert_eq!(g_a_eval(a, 0.5), 0.0);
            assert_eq!(g_a_eval(a, 0.0), 0.0);
            assert_eq!(g_a_eval(a, 1.0), 0.0);
            assert!((g_a_eval(a, 0.3) - g_a_eval(a, 0.7)).abs() < 1e-16);
        }
        assert!((g_a_eval(1.0, 0.75) - 0.25 * (-4.0f64 / 3.0).exp()).abs() < 1e-16);
        assert!((g_a_eval(1.0, 0.75) - 0.065_899_284_5).abs() < 1e-10);
        // Continuous at the endpoints.
        assert!(g_a_eval(1.0, 1.0 - 1e-3) < 1e-100);
    }

    #[test]
    fn g_a_mean_decreases_in_a() {
        let m: Vec<f64> = [0.5, 1.0, 2.0].iter().map(|&a| g_a_mean(a, 1e-14).unwrap()).collect();
        assert!(m[0] > m[1] && m[1] > m[2]);
        assert!(g_a_mean(0.0, 1e-14).is_err());
        assert!(g_a_mean(1.0, 1e-15).is_err());
    }

    #[test]
    fn specs_validate() {
        assert!(TestFunctionSpec::new(FunctionKind::F1 { c1: 0.0 }, 3).is_err());
        assert!(TestFunctionSpec::new(FunctionKind::Fac { a: 1.0, c: 2.0 }, 3).is_err());
        assert!(TestFunctionSpec::new(FunctionKind::Fac { a: 1.0, c: 2.5 }, 3).is_ok());
        assert!(TestFunctionSpec::new(FunctionKind::NonPeriodic { theta: 1.5 }, 3).is_ok());
        assert!(TestFunctionSpec::new(FunctionKind::F2 { c2: 1.0 }, 0).is_err());
    }

    #[test]
    fn f1_point_values() {
        let f = make_integrand(TestFunctionSpec::new(FunctionKind::F1 { c1: 2.0 }, 4).unwrap()).unwrap();
        assert_eq!(f.eval_real(&[0.25, 0.75, 0.75, 0.25]), 1.0);
        let f1 = make_integrand(TestFunctionSpec::new(FunctionKind::F1 { c1: 3.3 }, 1).unwrap()).unwrap();
        assert_eq!(f1.eval_real(&[0.5]), 0.0);
        assert_eq!(f1.true_integral(), Some(Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn product_form_matches_factors() {
        let specs = [
            FunctionKind::F1 { c1: 2.0 },
            FunctionKind::F2 { c2: 3.0 },
            FunctionKind::Fac { a: 0.5, c: 2.0 },
            FunctionKind::NonPeriodic { theta: 0.7 },
        ];
        let x: Vec<f64> = (0..7).map(|j| (0.13 + 0.29 * j as f64) % 1.0).collect();
        for kind in specs {
            let f = make_integrand(TestFunctionSpec::new(kind, 7).unwrap()).unwrap();
            let naive: f64 = (0..7).map(|j| f.factor(j, x[j])).fold(1.0, |a, b| a * b);
            let v = f.eval_real(&x);
            assert!((v - naive).abs() <= 1e-15 * naive.abs(), "{kind:?}");
        }
    }

    #[test]
    fn factor_means() {
        let check = |kind, d, tol, bound| {
            let defects = factor_mean_check(TestFunctionSpec::new(kind, d).unwrap(), tol).unwrap();
            assert_eq!(defects.len(), d);
            assert!(defects.iter().all(|&e| e <= bound), "{kind:?}: {defects:?}");
        };
        check(FunctionKind::F2 { c2: 2.0 }, 3, 1e-14, 1e-12);
        check(FunctionKind::F1 { c1: 2.0 }, 3, 1e-14, 1e-12);
        check(FunctionKind::NonPeriodic { theta: 0.5 }, 2, 1e-13, 1e-10);
        check(FunctionKind::NonPeriodic { theta: 0.99 }, 5, 1e-13, 1e-10);
        check(FunctionKind::Fac { a: 1.0, c: 3.0 }, 3, 1e-14, 2e-14);
    }
}
