//! Least-squares extraction of transformer model parameters.
//!
//! Fits the leakage/magnetizing model (series leakage inductance, optional
//! series capacitance, shunt magnetizing inductance, ideal turns ratio) to a
//! sampled two-port chain-matrix response. Parameters are optimized in log
//! space so they stay positive, with a damped Gauss-Newton (Levenberg style)
//! iteration; the procedure is fully deterministic.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_traits::Float;

use crate::elements::TransformerModel;
use crate::linalg::solve_real;
use crate::twoport::TwoPortSpectrum;

/// Minimum number of frequency points the target must provide.
pub const MIN_POINTS: usize = 8;

/// Chain entries are made commensurate at this impedance level before
/// differencing: `b` is divided by it and `c` multiplied by it.
const ENTRY_SCALE_OHMS: f64 = 50.0;

/// Central-difference step on the log-space parameters.
const DIFF_STEP: f64 = 1e-6;

const MAX_ITERATIONS: usize = 200;

/// Sum-of-squares floor treated as an exact fit.
const SSQ_FLOOR: f64 = 1e-24;

/// Errors from fit setup.
#[derive(Debug, Clone, PartialEq)]
pub enum FitError {
    InsufficientData { needed: usize, got: usize },
    InvalidInitial(&'static str),
}

impl fmt::Display for FitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitError::InsufficientData { needed, got } => {
                write!(f, "fit needs at least {needed} frequency points, got {got}")
            }
            FitError::InvalidInitial(what) => write!(f, "invalid initial model: {what}"),
        }
    }
}

impl core::error::Error for FitError {}

/// Outcome of a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: TransformerModel,
    /// Root-mean-square of the scaled chain-entry differences at the fitted
    /// parameters.
    pub residual: f64,
    /// Same metric at the initial parameters.
    pub initial_residual: f64,
    /// Damped Gauss-Newton iterations spent.
    pub iterations: usize,
    /// False when the iteration budget or damping limit was exhausted first.
    pub converged: bool,
}

fn model_from(theta: &[f64], has_cap: bool) -> TransformerModel {
    TransformerModel {
        lm: theta[0].exp(),
        lk: theta[1].exp(),
        n: theta[2].exp(),
        series_cap: if has_cap { Some(theta[3].exp()) } else { None },
    }
}

fn residuals(theta: &[f64], has_cap: bool, target: &TwoPortSpectrum, out: &mut Vec<f64>) {
    out.clear();
    let model = model_from(theta, has_cap);
    for (f, want) in target.points() {
        let got = model
            .abcd(*f)
            .expect("fit parameters are positive by construction");
        for (diff, scale) in [
            (got.a - want.a, 1.0),
            (got.b - want.b, 1.0 / ENTRY_SCALE_OHMS),
            (got.c - want.c, ENTRY_SCALE_OHMS),
            (got.d - want.d, 1.0),
        ] {
            out.push(diff.re * scale);
            out.push(diff.im * scale);
        }
    }
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

fn rms(ssq: f64, m: usize) -> f64 {
    (ssq / m as f64).sqrt()
}

/// Fits the transformer model to `target`, starting from `initial`.
///
/// A series capacitor is fitted exactly when `initial` carries one. The
/// leakage inductance must be strictly positive in the initial model because
/// the optimizer works on its logarithm.
pub fn fit_transformer(
    target: &TwoPortSpectrum,
    initial: &TransformerModel,
) -> Result<FitResult, FitError> {
    if target.len() < MIN_POINTS {
        return Err(FitError::InsufficientData {
            needed: MIN_POINTS,
            got: target.len(),
        });
    }
    if !(initial.lm.is_finite() && initial.lm > 0.0) {
        return Err(FitError::InvalidInitial("magnetizing inductance must be > 0"));
    }
    if !(initial.lk.is_finite() && initial.lk > 0.0) {
        return Err(FitError::InvalidInitial(
            "leakage inductance must be > 0 to seed a log-space fit",
        ));
    }
    if !(initial.n.is_finite() && initial.n > 0.0) {
        return Err(FitError::InvalidInitial("turns ratio must be > 0"));
    }
    if let Some(c) = initial.series_cap {
        if !(c.is_finite() && c > 0.0) {
            return Err(FitError::InvalidInitial("series capacitance must be > 0"));
        }
    }

    let has_cap = initial.series_cap.is_some();
    let mut theta = vec![initial.lm.ln(), initial.lk.ln(), initial.n.ln()];
    if let Some(c) = initial.series_cap {
        theta.push(c.ln());
    }
    let p = theta.len();
    let m = target.len() * 8;

    let mut r = Vec::with_capacity(m);
    residuals(&theta, has_cap, target, &mut r);
    let mut ssq = sum_sq(&r);
    let initial_residual = rms(ssq, m);

    if ssq <= SSQ_FLOOR {
        return Ok(FitResult {
            model: model_from(&theta, has_cap),
            residual: rms(ssq, m),
            initial_residual,
            iterations: 0,
            converged: true,
        });
    }

    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    let mut probe = Vec::with_capacity(m);
    let mut columns: Vec<Vec<f64>> = vec![vec![0.0; m]; p];

    'outer: while iterations < MAX_ITERATIONS {
        iterations += 1;

        for (j, column) in columns.iter_mut().enumerate() {
            let mut plus = theta.clone();
            plus[j] += DIFF_STEP;
            residuals(&plus, has_cap, target, &mut probe);
            column.copy_from_slice(&probe);
            let mut minus = theta.clone();
            minus[j] -= DIFF_STEP;
            residuals(&minus, has_cap, target, &mut probe);
            for (c, low) in column.iter_mut().zip(&probe) {
                *c = (*c - low) / (2.0 * DIFF_STEP);
            }
        }

        let mut jtj = vec![vec![0.0; p]; p];
        let mut jtr = vec![0.0; p];
        for i in 0..p {
            for j in i..p {
                let dot: f64 = columns[i].iter().zip(&columns[j]).map(|(a, b)| a * b).sum();
                jtj[i][j] = dot;
                jtj[j][i] = dot;
            }
            jtr[i] = columns[i].iter().zip(&r).map(|(a, b)| a * b).sum();
        }

        loop {
            let mut damped = jtj.clone();
            for (i, row) in damped.iter_mut().enumerate() {
                row[i] += lambda;
            }
            let rhs: Vec<f64> = jtr.iter().map(|g| -g).collect();
            let step = solve_real(damped, rhs);

            let accepted = step.and_then(|delta| {
                let trial: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + d).collect();
                residuals(&trial, has_cap, target, &mut probe);
                let trial_ssq = sum_sq(&probe);
                if trial_ssq.is_finite() && trial_ssq < ssq {
                    Some((trial, trial_ssq))
                } else {
                    None
                }
            });

            match accepted {
                Some((trial, trial_ssq)) => {
                    let drop = (ssq - trial_ssq) / ssq;
                    theta = trial;
                    residuals(&theta, has_cap, target, &mut r);
                    ssq = trial_ssq;
                    lambda = (lambda / 10.0).max(1e-15);
                    if ssq <= SSQ_FLOOR || drop < 1e-10 {
                        converged = true;
                        break 'outer;
                    }
                    break;
                }
                None => {
                    lambda *= 10.0;
                    if lambda > 1e12 {
                        break 'outer;
                    }
                }
            }
        }
    }

    Ok(FitResult {
        model: model_from(&theta, has_cap),
        residual: rms(ssq, m),
        initial_residual,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twoport::Frequency;

    fn truth() -> TransformerModel {
        TransformerModel::new(331.57e-12, 331.57e-12, 1.0, Some(132.63e-15)).unwrap()
    }

    fn sample(model: &TransformerModel, points: usize) -> TwoPortSpectrum {
        let pts = (0..points)
            .map(|i| {
                let ghz = 22.8 + 2.4 * i as f64 / (points - 1) as f64;
                let f = Frequency::from_ghz(ghz).unwrap();
                (f, model.abcd(f).unwrap())
            })
            .collect();
        TwoPortSpectrum::new(pts).unwrap()
    }

    fn detuned(model: &TransformerModel, factor: f64) -> TransformerModel {
        TransformerModel {
            lm: model.lm * factor,
            lk: model.lk * factor,
            n: model.n * factor,
            series_cap: model.series_cap.map(|c| c * factor),
        }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn recovers_reference_model_from_detuned_guess() {
        let truth = truth();
        let target = sample(&truth, 64);
        let fit = fit_transformer(&target, &detuned(&truth, 0.8)).unwrap();
        assert!(fit.converged, "fit did not converge: {fit:?}");
        assert!(rel(fit.model.lm, truth.lm) < 1e-3);
        assert!(rel(fit.model.lk, truth.lk) < 1e-3);
        assert!(rel(fit.model.n, truth.n) < 1e-3);
        assert!(rel(fit.model.series_cap.unwrap(), truth.series_cap.unwrap()) < 1e-3);
        assert!(fit.residual < fit.initial_residual);
    }

    #[test]
    fn converges_without_a_series_capacitor() {
        let truth = TransformerModel::new(300e-12, 120e-12, 1.4, None).unwrap();
        let target = sample(&truth, 32);
        let fit = fit_transformer(&target, &detuned(&truth, 1.25)).unwrap();
        assert!(fit.converged);
        assert!(fit.model.series_cap.is_none());
        assert!(rel(fit.model.lm, truth.lm) < 1e-3);
        assert!(rel(fit.model.lk, truth.lk) < 1e-3);
        assert!(rel(fit.model.n, truth.n) < 1e-3);
    }

    #[test]
    fn exact_initial_guess_converges_without_iterating() {
        let truth = truth();
        let target = sample(&truth, 16);
        let fit = fit_transformer(&target, &truth).unwrap();
        assert!(fit.converged);
        assert_eq!(fit.iterations, 0);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn too_few_points_are_rejected() {
        let truth = truth();
        let target = sample(&truth, 7);
        assert_eq!(
            fit_transformer(&target, &truth),
            Err(FitError::InsufficientData { needed: 8, got: 7 })
        );
    }

    #[test]
    fn zero_leakage_initial_is_rejected() {
        let truth = truth();
        let target = sample(&truth, 16);
        let flat = TransformerModel::new(331.57e-12, 0.0, 1.0, None).unwrap();
        assert!(matches!(
            fit_transformer(&target, &flat),
            Err(FitError::InvalidInitial(_))
        ));
    }

    #[test]
    fn fitting_is_deterministic() {
        let truth = truth();
        let target = sample(&truth, 24);
        let first = fit_transformer(&target, &detuned(&truth, 0.8)).unwrap();
        let second = fit_transformer(&target, &detuned(&truth, 0.8)).unwrap();
        assert_eq!(first, second);
    }
}
