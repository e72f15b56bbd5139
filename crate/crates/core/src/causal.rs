//! Bivariate structural-VAR causal pipeline.
//!
//! Resamples irregular series onto a regular grid by cubic interpolation,
//! fits a VAR by least squares, runs an unmixing estimator on the residuals
//! and identifies the instantaneous feedback matrix `B0` from the estimated
//! mixing, under the condition that feedback loops do not blow up. For a
//! log-CO2/temperature system the implied equilibrium climate sensitivity is
//! `ln(2) * alpha`.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;
use crate::covstats::{SignalMatrix, Strategy};
use crate::error::{invalid, Error, Result};
use crate::jointdiag::DiagonalizerOptions;
use crate::separation::{choiica_fit, coroica_fit, SeparationConfig, SeparationModel};

/// Observations at strictly increasing, irregularly spaced times.
#[derive(Debug, Clone, PartialEq)]
pub struct IrregularSeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl IrregularSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(invalid("times and values must have equal length"));
        }
        if times.len() < 4 {
            return Err(invalid("cubic interpolation needs at least 4 points"));
        }
        if times.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(invalid("series contains non-finite entries"));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("times must be strictly increasing"));
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }
}

/// Natural cubic spline interpolant (zero second derivative at the ends).
#[derive(Debug, Clone)]
pub struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second_derivs: Vec<f64>,
}

impl CubicSpline {
    pub fn fit(series: &IrregularSeries) -> Self {
        let t = series.times();
        let y = series.values();
        let n = t.len();
        let h: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
        // tridiagonal system for the interior second derivatives
        let m = n - 2;
        let mut diag = alloc::vec![0.0f64; m];
        let mut off = alloc::vec![0.0f64; m];
        let mut rhs = alloc::vec![0.0f64; m];
        for i in 0..m {
            diag[i] = 2.0 * (h[i] + h[i + 1]);
            off[i] = h[i + 1];
            rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h[i + 1] - (y[i + 1] - y[i]) / h[i]);
        }
        // Thomas algorithm; subdiagonal equals h[i] for row i
        for i in 1..m {
            let w = h[i] / diag[i - 1];
            diag[i] -= w * off[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut second = alloc::vec![0.0f64; n];
        if m > 0 {
            second[m] = rhs[m - 1] / diag[m - 1];
            for i in (1..m).rev() {
                second[i] = (rhs[i - 1] - off[i - 1] * second[i + 1]) / diag[i - 1];
            }
        }
        Self { knots: t.to_vec(), values: y.to_vec(), second_derivs: second }
    }

    /// Evaluates the spline; `t` must lie inside the knot range.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let first = self.knots[0];
        let last = *self.knots.last().unwrap();
        if t < first || t > last {
            return Err(invalid(format!("t = {t} outside the interpolation range [{first}, {last}]")));
        }
        let i = match self.knots.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.knots.len() - 2),
            Err(i) => i - 1,
        };
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - t) / h;
        let b = (t - self.knots[i]) / h;
        Ok(a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.second_derivs[i] + (b * b * b - b) * self.second_derivs[i + 1])
                * h
                * h
                / 6.0)
    }
}

/// A series on a regular time grid `start, start + step, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularSeries {
    pub start: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl RegularSeries {
    pub fn time(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }
}

/// Resamples a series onto the regular grid anchored at its first
/// observation, without extrapolating beyond the last one.
pub fn cubic_resample(series: &IrregularSeries, step: f64) -> Result<RegularSeries> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(invalid("step must be positive"));
    }
    let spline = CubicSpline::fit(series);
    let values = eval_grid(&spline, series.start(), step, series.end())?;
    Ok(RegularSeries { start: series.start(), step, values })
}

fn eval_grid(spline: &CubicSpline, start: f64, step: f64, end: f64) -> Result<Vec<f64>> {
    if start > end {
        return Err(invalid("grid start lies beyond the series range"));
    }
    let span = end - start;
    let mut count = ((span / step) * (1.0 + 1e-12)).floor() as usize + 1;
    while start + step * (count - 1) as f64 > end {
        count -= 1;
    }
    (0..count)
        .map(|i| {
            // clamp away rounding overshoot at the right boundary
            let t = (start + step * i as f64).min(end);
            spline.eval(t)
        })
        .collect()
}

/// Least-squares vector autoregression fit.
#[derive(Debug, Clone, PartialEq)]
pub struct VarFit {
    pub order: usize,
    pub intercept: DVector<f64>,
    /// Coefficient matrices for lags `1..=order`.
    pub lag_coeffs: Vec<DMatrix<f64>>,
    /// Residuals, `d x (n - order)`, time-aligned with samples `order..n`.
    pub residuals: SignalMatrix,
}

/// Fits `x_t = c + sum_k B_k x_{t-k} + r_t` per equation by least squares
/// with intercept.
pub fn fit_var(x: &SignalMatrix, order: usize) -> Result<VarFit> {
    let d = x.channels();
    let n = x.samples();
    if n <= d * order + 10 {
        return Err(invalid(format!(
            "need more than {} samples to fit a VAR({order}) in dimension {d}",
            d * order + 10
        )));
    }
    let rows = n - order;
    let cols = 1 + d * order;
    let v = x.values();
    let mut z = DMatrix::zeros(rows, cols);
    let mut y = DMatrix::zeros(rows, d);
    for t in 0..rows {
        z[(t, 0)] = 1.0;
        for k in 1..=order {
            for c in 0..d {
                z[(t, 1 + (k - 1) * d + c)] = v[(c, order + t - k)];
            }
        }
        for c in 0..d {
            y[(t, c)] = v[(c, order + t)];
        }
    }
    let svd = z.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = smax * f64::EPSILON * rows.max(cols) as f64;
    if svd.rank(eps) < cols {
        return Err(invalid("rank-deficient regressor matrix"));
    }
    let beta = svd
        .solve(&y, eps)
        .map_err(|e| Error::Numerical(format!("least-squares solve failed: {e}")))?;
    let residuals = (&y - &z * &beta).transpose();
    let intercept = beta.row(0).transpose();
    let lag_coeffs: Vec<DMatrix<f64>> = (1..=order)
        .map(|k| DMatrix::from_fn(d, d, |r, c| beta[(1 + (k - 1) * d + c, r)]))
        .collect();
    Ok(VarFit { order, intercept, lag_coeffs, residuals: SignalMatrix::new(residuals)? })
}

/// One admissible instantaneous feedback matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct B0Candidate {
    /// `2 x 2` with zero diagonal.
    pub b0: DMatrix<f64>,
    /// Effect of the first component on the second, `b0[(1, 0)]`.
    pub alpha: f64,
    /// Effect of the second component on the first, `b0[(0, 1)]`.
    pub beta: f64,
    /// Spectral radius of `b0`; candidates are admissible below 1.
    pub spectral_radius: f64,
    /// Whether the mixing columns were swapped for this candidate.
    pub swapped: bool,
}

/// Outcome of the feedback identification.
#[derive(Debug, Clone, PartialEq)]
pub enum Identification {
    Unique(B0Candidate),
    /// Both column orders are admissible; the caller decides.
    Ambiguous(B0Candidate, B0Candidate),
}

impl Identification {
    /// The admissible candidate, preferring the smaller spectral radius when
    /// ambiguous.
    pub fn preferred(&self) -> &B0Candidate {
        match self {
            Identification::Unique(c) => c,
            Identification::Ambiguous(a, b) => {
                if a.spectral_radius <= b.spectral_radius {
                    a
                } else {
                    b
                }
            }
        }
    }
}

/// Identifies the instantaneous feedback matrix from a `2 x 2` mixing
/// estimate.
///
/// Both column orders of the mixing are tried; each candidate rescales the
/// implied unmixing to unit diagonal, giving `B0 = I - V` with zero diagonal.
/// A candidate is admissible when the feedback does not blow up, i.e. the
/// spectral radius of `B0` (here `sqrt(|alpha * beta|)`) is below one.
pub fn identify_b0(a_hat: &DMatrix<f64>) -> Result<Identification> {
    if a_hat.nrows() != 2 || a_hat.ncols() != 2 {
        return Err(invalid("feedback identification is implemented for the bivariate case"));
    }
    let w = a_hat
        .clone()
        .try_inverse()
        .ok_or_else(|| invalid("mixing estimate is singular"))?;
    let mut candidates = Vec::new();
    for swapped in [false, true] {
        // swapping mixing columns swaps unmixing rows
        let (top, bottom) = if swapped { (1, 0) } else { (0, 1) };
        let w00 = w[(top, 0)];
        let w11 = w[(bottom, 1)];
        if w00 == 0.0 || w11 == 0.0 {
            continue; // cannot rescale to unit diagonal
        }
        let beta = -w[(top, 1)] / w00;
        let alpha = -w[(bottom, 0)] / w11;
        let spectral_radius = (alpha * beta).abs().sqrt();
        if !spectral_radius.is_finite() || spectral_radius >= 1.0 {
            continue;
        }
        let b0 = DMatrix::from_row_slice(2, 2, &[0.0, beta, alpha, 0.0]);
        candidates.push(B0Candidate { b0, alpha, beta, spectral_radius, swapped });
    }
    match candidates.len() {
        0 => Err(Error::Unidentifiable(
            "no column order yields a feedback matrix with spectral radius below one".into(),
        )),
        1 => Ok(Identification::Unique(candidates.pop().unwrap())),
        _ => {
            let second = candidates.pop().unwrap();
            let first = candidates.pop().unwrap();
            Ok(Identification::Ambiguous(first, second))
        }
    }
}

/// Equilibrium climate sensitivity implied by the instantaneous effect of
/// log-CO2 on temperature.
pub fn ecs_from_alpha(alpha: f64) -> f64 {
    core::f64::consts::LN_2 * alpha
}

/// Which unmixing estimator runs on the VAR residuals.
#[derive(Debug, Clone, PartialEq)]
pub enum ResidualIca {
    /// Group-robust estimator on a single group, variance signal, with the
    /// given equal-block partition grid(s).
    Coroica { partition_lengths: Vec<usize>, strategy: Strategy, diag: DiagonalizerOptions },
    /// Blockwise covariance baseline with the given block length grid(s).
    Choiica { partition_lengths: Vec<usize>, diag: DiagonalizerOptions },
}

/// Full structural fit of a bivariate system.
#[derive(Debug, Clone, PartialEq)]
pub struct SvarFit {
    pub order: usize,
    pub intercept: DVector<f64>,
    pub lag_coeffs: Vec<DMatrix<f64>>,
    pub residuals: SignalMatrix,
    pub unmixing_model: SeparationModel,
    pub identification: Identification,
}

impl SvarFit {
    /// ECS of the preferred candidate.
    pub fn ecs(&self) -> f64 {
        ecs_from_alpha(self.identification.preferred().alpha)
    }
}

/// Runs the full pipeline: resample both series at `step` on their common
/// range, take the natural log of the CO2 series, fit a VAR of the given
/// order, unmix the residuals and identify the feedback matrix.
pub fn climate_pipeline(
    co2: &IrregularSeries,
    temp: &IrregularSeries,
    order: usize,
    ica: &ResidualIca,
    step: f64,
) -> Result<SvarFit> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(invalid("step must be positive"));
    }
    if co2.values().iter().any(|&v| v <= 0.0) {
        return Err(invalid("CO2 series must be strictly positive for the log transform"));
    }
    let start = co2.start().max(temp.start());
    let end = co2.end().min(temp.end());
    if start >= end {
        return Err(invalid("the two series have no common time range"));
    }
    let co2_grid = eval_grid(&CubicSpline::fit(co2), start, step, end)?;
    let temp_grid = eval_grid(&CubicSpline::fit(temp), start, step, end)?;
    let n = co2_grid.len();
    let mut data = DMatrix::zeros(2, n);
    for (i, (c, t)) in co2_grid.iter().zip(&temp_grid).enumerate() {
        if *c <= 0.0 {
            return Err(invalid(format!(
                "interpolated CO2 is non-positive at grid point {i}"
            )));
        }
        data[(0, i)] = c.ln();
        data[(1, i)] = *t;
    }
    let x = SignalMatrix::new(data)?;
    let var_fit = fit_var(&x, order)?;
    let model = match ica {
        ResidualIca::Coroica { partition_lengths, strategy, diag } => {
            let mut cfg = SeparationConfig::var(partition_lengths.clone());
            cfg.strategy = *strategy;
            cfg.diag = diag.clone();
            let labels = alloc::vec![0usize; var_fit.residuals.samples()];
            coroica_fit(&var_fit.residuals, &labels, &cfg)?
        }
        ResidualIca::Choiica { partition_lengths, diag } => {
            let mut cfg = SeparationConfig::var(partition_lengths.clone());
            cfg.diag = diag.clone();
            choiica_fit(&var_fit.residuals, &cfg)?
        }
    };
    let identification = identify_b0(model.mixing_estimate())?;
    Ok(SvarFit {
        order: var_fit.order,
        intercept: var_fit.intercept,
        lag_coeffs: var_fit.lag_coeffs,
        residuals: var_fit.residuals,
        unmixing_model: model,
        identification,
    })
}
