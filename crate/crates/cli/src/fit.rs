//! Least-squares decay fits on log coordinates.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitModel {
    Exponential,
    Powerlaw,
}

/// `y = amplitude * exp(-rate * T)` or `y = amplitude * T^(-rate)`;
/// `r_squared` is measured on `ln y`, the coordinate actually fitted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub model: FitModel,
    pub amplitude: f64,
    pub rate: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, r^2)`.
pub fn linear_regression(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len();
    if n < 3 || n != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Some((a, b, r2))
}

fn fit(model: FitModel, t: &[f64], y: &[f64]) -> Option<FitResult> {
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let x: Vec<f64> = match model {
        FitModel::Exponential => t.to_vec(),
        FitModel::Powerlaw => t.iter().map(|v| v.ln()).collect(),
    };
    if ly.iter().chain(&x).any(|v| !v.is_finite()) {
        return None;
    }
    let (a, b, r_squared) = linear_regression(&x, &ly)?;
    Some(FitResult { model, amplitude: a.exp(), rate: -b, r_squared, points: t.len() })
}

pub fn fit_exponential(t: &[f64], y: &[f64]) -> Option<FitResult> {
    fit(FitModel::Exponential, t, y)
}

pub fn fit_power_law(t: &[f64], y: &[f64]) -> Option<FitResult> {
    fit(FitModel::Powerlaw, t, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exponential() {
        let t: Vec<f64> = (1..10).map(f64::from).collect();
        let y: Vec<f64> = t.iter().map(|v| 3.0 * (-0.7 * v).exp()).collect();
        let f = fit_exponential(&t, &y).unwrap();
        assert!((f.rate - 0.7).abs() < 1e-12 && (f.amplitude - 3.0).abs() < 1e-10);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!(fit_power_law(&t, &y).unwrap().r_squared < f.r_squared);
    }

    #[test]
    fn recovers_power_law() {
        let t: Vec<f64> = (0..12).map(|k| 10f64.powf(k as f64 / 4.0)).collect();
        let y: Vec<f64> = t.iter().map(|v| 0.5 * v.powf(-2.0)).collect();
        let f = fit_power_law(&t, &y).unwrap();
        assert!((f.rate - 2.0).abs() < 1e-12);
        assert!(fit_exponential(&t, &y).unwrap().r_squared < 0.9);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_exponential(&[1.0, 2.0], &[1.0, 0.5]).is_none());
        assert!(fit_exponential(&[1.0, 2.0, 3.0], &[1.0, 0.0, 0.5]).is_none());
        assert!(linear_regression(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_none());
    }
}
