//! Linear epsilon-insensitive support vector regression over a single time
//! feature, trained by full-batch subgradient descent.

use chrono::{DateTime, Utc};
use thiserror::Error;

use crate::vocab::SvrHyper;

pub const MIN_POINTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SvrError {
    #[error("regression needs at least {MIN_POINTS} points, got {0}")]
    TooFewPoints(usize),
    #[error("all timestamps are equal")]
    DegenerateTimeRange,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub iterations: usize,
    pub feature_spec: String,
    t_min_ms: i64,
    t_span_ms: f64,
    x_mean: f64,
    x_sd: f64,
    y_mean: f64,
    y_sd: f64,
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl RegressionModel {
    fn feature(&self, t: &DateTime<Utc>) -> f64 {
        let t_norm = (t.timestamp_millis() - self.t_min_ms) as f64 / self.t_span_ms;
        (t_norm - self.x_mean) / self.x_sd
    }

    pub fn predict(&self, t: &DateTime<Utc>) -> f64 {
        let z = self.weights[0] * self.feature(t) + self.bias;
        self.y_mean + self.y_sd * z
    }
}

/// Trains on `(t, y)` pairs. `t` is scaled to [0, 1] over the observed
/// range and then standardized, as is `y`; predictions are mapped back.
pub fn train_svr(points: &[(DateTime<Utc>, f64)], hyper: &SvrHyper) -> Result<RegressionModel, SvrError> {
    if points.len() < MIN_POINTS {
        return Err(SvrError::TooFewPoints(points.len()));
    }
    let t_min = points.iter().map(|p| p.0.timestamp_millis()).min().expect("nonempty");
    let t_max = points.iter().map(|p| p.0.timestamp_millis()).max().expect("nonempty");
    if t_min == t_max {
        return Err(SvrError::DegenerateTimeRange);
    }
    let span = (t_max - t_min) as f64;
    let t_norm: Vec<f64> = points
        .iter()
        .map(|p| (p.0.timestamp_millis() - t_min) as f64 / span)
        .collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (x_mean, x_sd) = mean_sd(&t_norm);
    let (y_mean, y_sd) = mean_sd(&ys);
    let mut model = RegressionModel {
        weights: vec![0.0],
        bias: 0.0,
        epsilon: hyper.epsilon,
        lambda: hyper.lambda,
        iterations: hyper.iterations,
        feature_spec: "x = standardize((t - tMin) / (tMax - tMin))".into(),
        t_min_ms: t_min,
        t_span_ms: span,
        x_mean,
        x_sd,
        y_mean,
        y_sd,
    };
    if y_sd == 0.0 {
        // constant series: the zero model predicts the mean exactly
        model.y_sd = 1.0;
        return Ok(model);
    }
    let x: Vec<f64> = t_norm.iter().map(|v| (v - x_mean) / x_sd).collect();
    let y: Vec<f64> = ys.iter().map(|v| (v - y_mean) / y_sd).collect();
    let n = x.len() as f64;
    let (mut w, mut b) = (0.0f64, 0.0f64);
    for step in 0..hyper.iterations {
        let (mut gw, mut gb) = (2.0 * hyper.lambda * w, 0.0);
        for (xi, yi) in x.iter().zip(&y) {
            let r = yi - (w * xi + b);
            if r.abs() > hyper.epsilon {
                gw -= r.signum() * xi / n;
                gb -= r.signum() / n;
            }
        }
        let eta = hyper.eta0 / (1.0 + step as f64);
        w -= eta * gw;
        b -= eta * gb;
    }
    model.weights = vec![w];
    model.bias = b;
    Ok(model)
}
