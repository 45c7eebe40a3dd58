use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::statistics::Statistics;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitKind {
    QuadraticThroughOrigin,
    CubicThroughOrigin,
    /// `s * x / ln x` with `s` pinned by the end point.
    AdjustedLog,
    /// `x / ln x + c` with `c` pinned by the end point.
    AdjustedLogShift,
}

/// A curve against a series, with residuals `actual - fitted`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub kind: FitKind,
    /// Polynomial coefficients from the highest power down to the constant
    /// term (always 0 for through-origin fits); for log curves, `[s]` or `[c]`.
    pub coefficients: Vec<f64>,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    pub error_mean: f64,
    /// Sample standard deviation of the residuals.
    pub error_stddev: f64,
}

impl FitResult {
    fn new(kind: FitKind, coefficients: Vec<f64>, actual: &[f64], fitted: Vec<f64>) -> Self {
        let residuals: Vec<f64> = actual.iter().zip(&fitted).map(|(a, f)| a - f).collect();
        Self {
            kind,
            coefficients,
            error_mean: (&residuals).mean(),
            error_stddev: (&residuals).std_dev(),
            fitted,
            residuals,
        }
    }

    /// Evaluate a polynomial fit at abscissa `i`.
    pub fn eval(&self, i: f64) -> f64 {
        self.coefficients.iter().fold(0.0, |acc, c| acc * i + c)
    }

    pub fn moments(&self) -> Moments {
        moments(&self.residuals)
    }
}

/// Least squares `sum_{k=1..=degree} c_k i^k` over `i = 1..=n`.
pub fn fit_through_origin(series: &[f64], degree: usize) -> Result<FitResult> {
    let kind = match degree {
        2 => FitKind::QuadraticThroughOrigin,
        3 => FitKind::CubicThroughOrigin,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "through-origin fits are quadratic or cubic, got degree {degree}"
            )))
        }
    };
    let n = series.len();
    if n < degree + 1 {
        return Err(Error::DegenerateFit {
            points: n,
            min: degree + 1,
        });
    }
    // Solve on u = i / n to keep the columns well scaled.
    let scale = n as f64;
    let design = DMatrix::from_fn(n, degree, |r, c| ((r + 1) as f64 / scale).powi(c as i32 + 1));
    let y = DVector::from_column_slice(series);
    let solved = design
        .clone()
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let fitted: Vec<f64> = (&design * &solved).iter().copied().collect();
    let mut coefficients: Vec<f64> = (0..degree)
        .rev()
        .map(|c| solved[c] / scale.powi(c as i32 + 1))
        .collect();
    coefficients.push(0.0);
    Ok(FitResult::new(kind, coefficients, series, fitted))
}

pub fn fit_quadratic(series: &[f64]) -> Result<FitResult> {
    fit_through_origin(series, 2)
}

pub fn fit_cubic(series: &[f64]) -> Result<FitResult> {
    fit_through_origin(series, 3)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub stddev: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// Sample mean and stddev with population skewness and excess kurtosis.
pub fn moments(values: &[f64]) -> Moments {
    let mean = values.mean();
    let n = values.len() as f64;
    let central = |p: i32| values.iter().map(|v| (v - mean).powi(p)).sum::<f64>() / n;
    let m2 = central(2);
    Moments {
        mean,
        stddev: values.std_dev(),
        skewness: central(3) / m2.powf(1.5),
        excess_kurtosis: central(4) / (m2 * m2) - 3.0,
    }
}

fn x_over_ln(x: u64) -> f64 {
    if x < 2 {
        0.0
    } else {
        x as f64 / (x as f64).ln()
    }
}

/// `s * x / ln x` for `x = 1..=x_max` (0 below 2), scaled so the last value is `pi_x`.
pub fn adjusted_log_curve(x_max: u64, pi_x: u64) -> Result<(f64, Vec<f64>)> {
    if x_max < 2 {
        return Err(Error::Domain {
            what: "x_max",
            value: x_max as f64,
            domain: "x_max >= 2",
        });
    }
    let s = pi_x as f64 / x_over_ln(x_max);
    let curve = (1..=x_max).map(|x| s * x_over_ln(x)).collect();
    Ok((s, curve))
}

/// Compare `actual[x - 1] = pi(x)` for `x = 1..=x_max` against the adjusted log curve.
pub fn adjusted_log_fit(actual: &[f64]) -> Result<FitResult> {
    let x_max = actual.len() as u64;
    let pi_x = *actual.last().ok_or(Error::DegenerateFit { points: 0, min: 2 })?;
    let (s, _) = adjusted_log_curve(x_max, 1)?;
    let s = s * pi_x;
    let fitted = (1..=x_max).map(|x| s * x_over_ln(x)).collect();
    Ok(FitResult::new(FitKind::AdjustedLog, vec![s], actual, fitted))
}

/// Same comparison with an additive rather than multiplicative adjustment.
pub fn adjusted_log_shift_fit(actual: &[f64]) -> Result<FitResult> {
    let x_max = actual.len() as u64;
    if x_max < 2 {
        return Err(Error::DegenerateFit {
            points: actual.len(),
            min: 2,
        });
    }
    let c = actual[actual.len() - 1] - x_over_ln(x_max);
    let fitted = (1..=x_max).map(|x| x_over_ln(x) + c).collect();
    Ok(FitResult::new(FitKind::AdjustedLogShift, vec![c], actual, fitted))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum VonKochForm {
    /// `sqrt(x) * ln x`
    #[default]
    SqrtTimesLog,
    /// `sqrt(x * ln x)`
    SqrtOfProduct,
}

pub fn von_koch_curve(x: u64, form: VonKochForm) -> Result<f64> {
    if x < 2 {
        return Err(Error::Domain {
            what: "x",
            value: x as f64,
            domain: "x >= 2",
        });
    }
    let xf = x as f64;
    Ok(match form {
        VonKochForm::SqrtTimesLog => xf.sqrt() * xf.ln(),
        VonKochForm::SqrtOfProduct => (xf * xf.ln()).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density_lab::ranking::{rank_range, Scorer, Widths};
    use crate::primality::{li_of, pi_of, sieve};
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_polynomials_fit_exactly() {
        let quad: Vec<f64> = (1..=50).map(|i| 0.5 * (i * i) as f64 - 3.0 * i as f64).collect();
        let f = fit_quadratic(&quad).unwrap();
        assert_abs_diff_eq!(f.coefficients[0], 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(f.coefficients[1], -3.0, epsilon = 1e-9);
        assert_eq!(f.coefficients[2], 0.0);
        assert!(f.residuals.iter().all(|r| r.abs() < 1e-8));
        let cubic: Vec<f64> = (1..=40).map(|i| {
            let i = i as f64;
            2e-3 * i * i * i + 0.25 * i * i + i
        }).collect();
        let f = fit_cubic(&cubic).unwrap();
        assert_abs_diff_eq!(f.eval(40.0), cubic[39], epsilon = 1e-8);
        assert_abs_diff_eq!(f.coefficients[0], 2e-3, epsilon = 1e-12);
        assert_eq!(f.eval(0.0), 0.0);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(fit_quadratic(&[1.0, 2.0]), Err(Error::DegenerateFit { .. })));
        assert!(matches!(fit_cubic(&[1.0, 2.0, 3.0]), Err(Error::DegenerateFit { .. })));
        assert!(fit_through_origin(&[1.0; 10], 4).is_err());
    }

    #[test]
    fn residuals_match_brute_normal_equations() {
        // Two-column normal equations solved by Cramer's rule.
        let ys: Vec<f64> = (1..=30).map(|i| ((i * 7919) % 31) as f64).collect();
        let (mut s4, mut s3, mut s2, mut y2, mut y1) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (k, y) in ys.iter().enumerate() {
            let i = (k + 1) as f64;
            s4 += i.powi(4);
            s3 += i.powi(3);
            s2 += i * i;
            y2 += y * i * i;
            y1 += y * i;
        }
        let det = s4 * s2 - s3 * s3;
        let a = (y2 * s2 - s3 * y1) / det;
        let b = (s4 * y1 - s3 * y2) / det;
        let f = fit_quadratic(&ys).unwrap();
        assert_abs_diff_eq!(f.coefficients[0], a, epsilon = 1e-10);
        assert_abs_diff_eq!(f.coefficients[1], b, epsilon = 1e-10);
    }

    #[test]
    fn quadratic_on_the_256_run() {
        let t = rank_range(256, Scorer::Bien { power: 1 }, Widths::new(8, 9)).unwrap();
        let f = fit_quadratic(&t.cumulative_series()).unwrap();
        assert!((f.error_stddev - 0.98).abs() <= 0.1, "{}", f.error_stddev);
        let m = f.moments();
        assert!(m.skewness.abs() < 1.0 && m.excess_kurtosis.abs() < 1.5, "{m:?}");
    }

    #[test]
    fn adjusted_log_hits_its_end_point() {
        let (s, curve) = adjusted_log_curve(256, 54).unwrap();
        assert_abs_diff_eq!(curve[255], 54.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s, 54.0 * 256f64.ln() / 256.0, epsilon = 1e-12);
        assert_eq!(curve[0], 0.0);
        assert!(adjusted_log_curve(1, 0).is_err());
        let table = sieve(257).unwrap();
        let actual: Vec<f64> = (1..=256).map(|x| pi_of(x, &table).unwrap() as f64).collect();
        let fit = adjusted_log_fit(&actual).unwrap();
        assert_abs_diff_eq!(fit.fitted[255], 54.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.residuals[255], 0.0, epsilon = 1e-12);
        let shift = adjusted_log_shift_fit(&actual).unwrap();
        assert_abs_diff_eq!(shift.residuals[255], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn von_koch_examples() {
        assert_abs_diff_eq!(
            von_koch_curve(256, VonKochForm::SqrtTimesLog).unwrap(),
            16.0 * 256f64.ln(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(von_koch_curve(256, VonKochForm::SqrtTimesLog).unwrap(), 88.72, epsilon = 0.005);
        assert!(von_koch_curve(1, VonKochForm::SqrtOfProduct).is_err());
        for form in [VonKochForm::SqrtTimesLog, VonKochForm::SqrtOfProduct] {
            let mut prev = 0.0;
            for x in 2..5000 {
                let v = von_koch_curve(x, form).unwrap();
                assert!(v > prev);
                prev = v;
            }
        }
    }

    #[test]
    fn von_koch_overlay_bounds_pi_minus_li() {
        let table = sieve(65_537).unwrap();
        for x in 2..=65_536u64 {
            let gap = (pi_of(x, &table).unwrap() as f64 - li_of(x as f64).unwrap()).abs();
            assert!(gap < von_koch_curve(x, VonKochForm::SqrtOfProduct).unwrap(), "{x}");
            if x >= 3 {
                assert!(gap < von_koch_curve(x, VonKochForm::SqrtTimesLog).unwrap(), "{x}");
            }
        }
    }
}
