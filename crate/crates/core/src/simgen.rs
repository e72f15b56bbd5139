//! Seeded benchmark generators.
//!
//! Three generator families: block-wise shifting variance signals with
//! group-wise stationary confounding, GARCH-type signals with autoregressive
//! or iid confounding, and a bivariate structural VAR with instantaneous
//! feedback. All draws come from named ChaCha20 substreams of the instance
//! seed, so instances are bit-reproducible and individual ingredients
//! (mixing, sources, noise) consume independent streams.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;
use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::covstats::{GroupedPartition, SignalMatrix};
use crate::error::{invalid, Error, Result};
use crate::rng::substream;

// substream ids shared by the generators
const STREAM_MIXING: u64 = 0;
const STREAM_CONF_MIXING: u64 = 1;
const STREAM_GROUP_VARS: u64 = 2;
const STREAM_SUBSET_VARS: u64 = 3;
const STREAM_PARTITION: u64 = 4;
const STREAM_SOURCES: u64 = 5;
const STREAM_NOISE: u64 = 6;
const STREAM_LAG_COEFFS: u64 = 7;
const STREAM_SOURCE_BASE: u64 = 100;
const STREAM_NOISE_BASE: u64 = 10_000;

/// Block-wise shifting variance signals with group-wise stationary
/// confounding.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVarSpec {
    pub n: usize,
    pub d: usize,
    /// Number of groups; the confounding variance is constant within each.
    pub groups: usize,
    /// Subsets per group carrying independent signal variances.
    pub subsets_per_group: usize,
    /// Expected confounding variance; `0` disables confounding entirely,
    /// positive values must be at least `0.1`.
    pub confounding_strength: f64,
    /// Expected absolute difference of signal variances between subsets.
    pub signal_strength: f64,
    pub seed: u64,
}

impl BlockVarSpec {
    /// Paper-style defaults: 10 subsets per group.
    pub fn new(n: usize, d: usize, groups: usize, c1: f64, c2: f64, seed: u64) -> Self {
        Self {
            n,
            d,
            groups,
            subsets_per_group: 10,
            confounding_strength: c1,
            signal_strength: c2,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 || self.groups == 0 || self.subsets_per_group == 0 {
            return Err(invalid("dimension, groups and subsets must be positive"));
        }
        if self.n < 2 * self.groups * self.subsets_per_group {
            return Err(invalid(format!(
                "n = {} is too small for {} groups of {} subsets (need at least {})",
                self.n,
                self.groups,
                self.subsets_per_group,
                2 * self.groups * self.subsets_per_group
            )));
        }
        let c1 = self.confounding_strength;
        if !(c1 == 0.0 || c1 >= 0.1) || !c1.is_finite() {
            return Err(invalid(
                "confounding_strength must be 0 (no confounding) or at least 0.1",
            ));
        }
        if !(self.signal_strength >= 0.0) || !self.signal_strength.is_finite() {
            return Err(invalid("signal_strength must be nonnegative"));
        }
        Ok(())
    }
}

/// GARCH-type signal settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GarchSetting {
    /// Time-independent signal with changing variance.
    One,
    /// Varying time-dependence with constant variance.
    Two,
    /// Varying time-dependence with changing variance.
    Three,
}

impl GarchSetting {
    pub fn index(self) -> u8 {
        match self {
            GarchSetting::One => 1,
            GarchSetting::Two => 2,
            GarchSetting::Three => 3,
        }
    }

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(GarchSetting::One),
            2 => Ok(GarchSetting::Two),
            3 => Ok(GarchSetting::Three),
            _ => Err(invalid("setting must be 1, 2 or 3")),
        }
    }

    fn variance_params(self) -> [f64; 3] {
        match self {
            GarchSetting::One | GarchSetting::Three => [0.005, 0.026, 0.97],
            GarchSetting::Two => [1.0, 0.0, 0.0],
        }
    }

    fn has_time_dependence(self) -> bool {
        !matches!(self, GarchSetting::One)
    }
}

/// Confounding flavor for the GARCH generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    /// Stationary autoregressive noise of random order.
    Ar,
    /// iid standard normal noise.
    Iid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GarchSpec {
    pub setting: GarchSetting,
    pub noise: NoiseKind,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
}

impl GarchSpec {
    /// Default size: 200000 samples of a 6-dimensional process.
    pub fn new(setting: GarchSetting, noise: NoiseKind, seed: u64) -> Self {
        Self { setting, noise, n: 200_000, d: 6, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(invalid("dimension must be positive"));
        }
        if self.setting.has_time_dependence() && self.n < SEGMENTS {
            return Err(invalid(format!(
                "settings with varying time-dependence need at least {SEGMENTS} samples"
            )));
        }
        if self.n == 0 {
            return Err(invalid("n must be positive"));
        }
        Ok(())
    }
}

/// Number of coefficient redraws in the time-dependence settings.
const SEGMENTS: usize = 100;
/// Samples discarded before recording starts.
const BURN_IN: usize = 1_000;
const MAX_STABILITY_ATTEMPTS: usize = 100;

/// What produced an instance, echoed back with the realized parameters that
/// tests and scoring need.
#[derive(Debug, Clone, PartialEq)]
pub enum SimEcho {
    BlockVar {
        spec: BlockVarSpec,
        /// Realized confounding variance per group.
        group_noise_vars: Vec<f64>,
        /// Realized signal variance per group, subset and component. The
        /// draws are independent per component so the variance signals
        /// change independently across components.
        subset_signal_vars: Vec<Vec<Vec<f64>>>,
    },
    Garch {
        spec: GarchSpec,
        /// Realized AR noise order and coefficients per component (AR noise
        /// only).
        noise_params: Option<Vec<(usize, Vec<f64>)>>,
    },
}

/// A generated dataset together with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SimInstance {
    pub x: SignalMatrix,
    /// True mixing matrix `A`.
    pub mixing: DMatrix<f64>,
    /// True (unconfounded) sources, `d x n`.
    pub sources: DMatrix<f64>,
    /// Confounding in post-mixing form, so `x = mixing * sources + confounding`.
    pub confounding: DMatrix<f64>,
    pub group_labels: Vec<usize>,
    /// Ground-truth partition (block-variance generator only).
    pub partition: Option<GroupedPartition>,
    pub echo: SimEcho,
}

fn standard_normal_matrix(rng: &mut ChaCha20Rng, rows: usize, cols: usize, sd: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m[(r, c)] = sd * crate::rng::normal(rng);
        }
    }
    m
}

fn sample_uniform(rng: &mut ChaCha20Rng, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

/// Generates a block-wise shifting variance instance
/// `X_i = A (S_i + C H_i)` with per-group confounding variance and per-subset
/// signal variance.
pub fn gen_blockvar(spec: &BlockVarSpec) -> Result<SimInstance> {
    spec.validate()?;
    let (n, d) = (spec.n, spec.d);
    let b1 = 2.0 * spec.confounding_strength - 0.1;
    let b2 = 3.0 * spec.signal_strength + 0.1;

    let mixing = standard_normal_matrix(&mut substream(spec.seed, STREAM_MIXING), d, d, 1.0);
    let conf_mixing = standard_normal_matrix(
        &mut substream(spec.seed, STREAM_CONF_MIXING),
        d,
        d,
        (1.0 / d as f64).sqrt(),
    );

    // consecutive groups, remainder attached to the last one
    let base = n / spec.groups;
    let mut groups: Vec<Vec<usize>> = Vec::with_capacity(spec.groups);
    let mut at = 0;
    for g in 0..spec.groups {
        let len = if g + 1 == spec.groups { n - at } else { base };
        groups.push((at..at + len).collect());
        at += len;
    }
    let mut group_labels = alloc::vec![0usize; n];
    for (g, group) in groups.iter().enumerate() {
        for &i in group {
            group_labels[i] = g;
        }
    }

    let mut part_rng = substream(spec.seed, STREAM_PARTITION);
    let partitions: Vec<Vec<Vec<usize>>> = groups
        .iter()
        .map(|g| random_partition(g, spec.subsets_per_group, &mut part_rng))
        .collect();

    let mut group_rng = substream(spec.seed, STREAM_GROUP_VARS);
    let group_noise_vars: Vec<f64> = (0..spec.groups)
        .map(|_| sample_uniform(&mut group_rng, 0.1, b1))
        .collect();

    let mut subset_rng = substream(spec.seed, STREAM_SUBSET_VARS);
    let subset_signal_vars: Vec<Vec<Vec<f64>>> = partitions
        .iter()
        .map(|p| {
            p.iter()
                .map(|_| (0..d).map(|_| sample_uniform(&mut subset_rng, 0.1, b2)).collect())
                .collect()
        })
        .collect();

    let mut source_rng = substream(spec.seed, STREAM_SOURCES);
    let mut sources = DMatrix::zeros(d, n);
    for (g, partition) in partitions.iter().enumerate() {
        for (e, subset) in partition.iter().enumerate() {
            let sds: Vec<f64> = subset_signal_vars[g][e].iter().map(|v| v.sqrt()).collect();
            for &i in subset {
                for r in 0..d {
                    sources[(r, i)] = sds[r] * crate::rng::normal(&mut source_rng);
                }
            }
        }
    }

    let signal_part = &mixing * &sources;
    let confounding = if spec.confounding_strength == 0.0 {
        DMatrix::zeros(d, n)
    } else {
        let mut noise_rng = substream(spec.seed, STREAM_NOISE);
        let mut raw = DMatrix::zeros(d, n);
        for (g, group) in groups.iter().enumerate() {
            let sd = group_noise_vars[g].sqrt();
            for &i in group {
                for r in 0..d {
                    raw[(r, i)] = sd * crate::rng::normal(&mut noise_rng);
                }
            }
        }
        &mixing * (&conf_mixing * raw)
    };
    let x = SignalMatrix::new(&signal_part + &confounding)?;

    let partition = GroupedPartition::new(n, groups, partitions, alloc::vec![0])?;
    Ok(SimInstance {
        x,
        mixing,
        sources,
        confounding,
        group_labels,
        partition: Some(partition),
        echo: SimEcho::BlockVar {
            spec: spec.clone(),
            group_noise_vars,
            subset_signal_vars,
        },
    })
}

/// Uniformly random ordered partition of a group into `subsets` contiguous
/// runs with equal expected length, each at least `min(50, max(2, len/(2*subsets)))`
/// samples long.
fn random_partition(group: &[usize], subsets: usize, rng: &mut ChaCha20Rng) -> Vec<Vec<usize>> {
    let len = group.len();
    if subsets == 1 {
        return alloc::vec![group.to_vec()];
    }
    let min_len = 50.min(2.max(len / (2 * subsets)));
    let slack = len - subsets * min_len;
    // distinct sorted draws map to weakly increasing cut offsets in 0..=slack
    let pool = slack + subsets - 1;
    let mut candidates: Vec<usize> = (0..pool).collect();
    for k in 0..subsets - 1 {
        let j = rng.random_range(k..pool);
        candidates.swap(k, j);
    }
    let mut chosen: Vec<usize> = candidates[..subsets - 1].to_vec();
    chosen.sort_unstable();
    let mut lengths = Vec::with_capacity(subsets);
    let mut prev = 0;
    for (k, &c) in chosen.iter().enumerate() {
        let offset = c - k;
        lengths.push(min_len + offset - prev);
        prev = offset;
    }
    lengths.push(min_len + slack - prev);
    let mut parts = Vec::with_capacity(subsets);
    let mut at = 0;
    for l in lengths {
        parts.push(group[at..at + l].to_vec());
        at += l;
    }
    parts
}

/// Generates a GARCH-type instance `X = A S + A C H`.
pub fn gen_garch(spec: &GarchSpec) -> Result<SimInstance> {
    spec.validate()?;
    let (n, d) = (spec.n, spec.d);
    let mixing = standard_normal_matrix(&mut substream(spec.seed, STREAM_MIXING), d, d, 1.0);
    let conf_mixing = standard_normal_matrix(
        &mut substream(spec.seed, STREAM_CONF_MIXING),
        d,
        d,
        (1.0 / d as f64).sqrt(),
    );

    let mut sources = DMatrix::zeros(d, n);
    for j in 0..d {
        let mut rng = substream(spec.seed, STREAM_SOURCE_BASE + j as u64);
        let row = garch_source(spec.setting, n, &mut rng)?;
        sources.row_mut(j).copy_from(&DVector::from_vec(row).transpose());
    }

    let mut raw_noise = DMatrix::zeros(d, n);
    let mut noise_params = if matches!(spec.noise, NoiseKind::Ar) { Some(Vec::new()) } else { None };
    for j in 0..d {
        let mut rng = substream(spec.seed, STREAM_NOISE_BASE + j as u64);
        match spec.noise {
            NoiseKind::Iid => {
                for c in 0..n {
                    raw_noise[(j, c)] = crate::rng::normal(&mut rng);
                }
            }
            NoiseKind::Ar => {
                let order = rng.random_range(1..=10usize);
                let coeffs = stable_ar_coefficients(order, &mut rng)?;
                let mut history = alloc::vec![0.0f64; order];
                for c in 0..BURN_IN + n {
                    let mut value = 0.0;
                    for (k, &coef) in coeffs.iter().enumerate() {
                        value += coef * history[k];
                    }
                    value += crate::rng::normal(&mut rng);
                    history.rotate_right(1);
                    history[0] = value;
                    if c >= BURN_IN {
                        raw_noise[(j, c - BURN_IN)] = value;
                    }
                }
                noise_params.as_mut().unwrap().push((order, coeffs));
            }
        }
    }

    let signal_part = &mixing * &sources;
    let confounding = &mixing * (&conf_mixing * raw_noise);
    let x = SignalMatrix::new(&signal_part + &confounding)?;
    Ok(SimInstance {
        x,
        mixing,
        sources,
        confounding,
        group_labels: alloc::vec![0; n],
        partition: None,
        echo: SimEcho::Garch { spec: spec.clone(), noise_params },
    })
}

/// One GARCH-type source path of length `n` (after burn-in).
///
/// The conditional variance follows the GARCH recursion on the lagged
/// innovation `u = sigma * eps`; the autoregressive part (when present) is
/// driven by those innovations. For time-independent settings the innovation
/// is the series itself.
fn garch_source(setting: GarchSetting, n: usize, rng: &mut ChaCha20Rng) -> Result<Vec<f64>> {
    let [a1, a2, a3] = setting.variance_params();
    let mut var = if a2 + a3 < 1.0 { a1 / (1.0 - a2 - a3) } else { a1 };
    let mut history = alloc::vec![0.0f64; 10];
    let mut out = Vec::with_capacity(n);

    // per-segment autoregressive coefficients (empty when time-independent)
    let segment_len = if setting.has_time_dependence() { n / SEGMENTS } else { n };
    let segment_rem = if setting.has_time_dependence() { n % SEGMENTS } else { 0 };
    let mut coeffs: Vec<f64> = if setting.has_time_dependence() {
        stable_ar_coefficients(rng.random_range(1..=10usize), rng)?
    } else {
        Vec::new()
    };

    let mut produced = 0usize;
    let mut segment = 0usize;
    let mut segment_left =
        if setting.has_time_dependence() { segment_len + usize::from(segment_rem > 0) } else { n };
    for step in 0..BURN_IN + n {
        let mut value = 0.0;
        for (k, &coef) in coeffs.iter().enumerate() {
            value += coef * history[k];
        }
        let eps: f64 = crate::rng::normal(rng);
        let innovation = var.sqrt() * eps;
        value += innovation;
        if !value.is_finite() {
            return Err(Error::Numerical(format!("source path diverged at step {step}")));
        }
        var = a1 + a2 * innovation * innovation + a3 * var;
        history.rotate_right(1);
        history[0] = value;
        if step >= BURN_IN {
            out.push(value);
            produced += 1;
            if setting.has_time_dependence() && produced < n {
                segment_left -= 1;
                if segment_left == 0 {
                    segment += 1;
                    segment_left = segment_len + usize::from(segment < segment_rem);
                    coeffs = stable_ar_coefficients(rng.random_range(1..=10usize), rng)?;
                }
            }
        }
    }
    Ok(out)
}

/// Draws AR coefficients `c_i ~ N(0, 1/(i+1)^2)` until the recursion is
/// stable (all companion eigenvalues inside the unit circle).
fn stable_ar_coefficients(order: usize, rng: &mut ChaCha20Rng) -> Result<Vec<f64>> {
    for _ in 0..MAX_STABILITY_ATTEMPTS {
        let coeffs: Vec<f64> = (1..=order)
            .map(|i| crate::rng::normal(rng) / (i as f64 + 1.0))
            .collect();
        if ar_is_stable(&coeffs) {
            return Ok(coeffs);
        }
    }
    Err(Error::Numerical(format!(
        "no stable AR({order}) coefficients found in {MAX_STABILITY_ATTEMPTS} attempts"
    )))
}

fn ar_is_stable(coeffs: &[f64]) -> bool {
    spectral_radius_of_companion(&DMatrix::from_row_slice(1, coeffs.len(), coeffs)) < 1.0
}

/// Spectral radius of the companion matrix of the linear recursion
/// `x_t = sum_k M_k x_{t-k}`, with the `r x r` coefficient matrices passed
/// stacked side by side as one `r x (r*p)` matrix.
fn spectral_radius_of_companion(stacked: &DMatrix<f64>) -> f64 {
    let r = stacked.nrows();
    let dim = stacked.ncols();
    let mut companion = DMatrix::zeros(dim, dim);
    companion.view_mut((0, 0), (r, dim)).copy_from(stacked);
    if dim > r {
        companion.view_mut((r, 0), (dim - r, dim - r)).fill_with_identity();
    }
    companion
        .complex_eigenvalues()
        .iter()
        .fold(0.0f64, |acc, l| acc.max(l.norm_sqr().sqrt()))
}

/// Bivariate structural VAR with instantaneous feedback.
#[derive(Debug, Clone, PartialEq)]
pub struct SvarSpec {
    pub n: usize,
    /// Autoregressive order `p`.
    pub order: usize,
    /// Instantaneous effect of the first component on the second.
    pub alpha: f64,
    /// Instantaneous effect of the second component on the first.
    pub beta: f64,
    /// Standard deviation of the lag coefficient draws.
    pub lag_coeff_scale: f64,
    /// Expected absolute difference of shock variances between blocks.
    pub signal_strength: f64,
    /// Length of the constant-variance blocks in the shocks.
    pub signal_block_len: usize,
    /// Variance of the raw stationary confounder (0 disables it).
    pub confounding_strength: f64,
    pub seed: u64,
}

impl SvarSpec {
    pub fn new(n: usize, order: usize, alpha: f64, beta: f64, seed: u64) -> Self {
        Self {
            n,
            order,
            alpha,
            beta,
            lag_coeff_scale: 0.05,
            signal_strength: 1.0,
            signal_block_len: 500,
            confounding_strength: 0.3,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha * self.beta).abs().is_finite() || (self.alpha * self.beta).abs() >= 1.0 {
            return Err(invalid("|alpha * beta| must be smaller than 1"));
        }
        if self.signal_block_len < 2 {
            return Err(invalid("signal_block_len must be at least 2"));
        }
        if self.n < 2 * self.signal_block_len || self.n <= self.order {
            return Err(invalid("n is too small"));
        }
        if !(self.signal_strength >= 0.0) || !(self.confounding_strength >= 0.0) {
            return Err(invalid("strengths must be nonnegative"));
        }
        if !(self.lag_coeff_scale >= 0.0) {
            return Err(invalid("lag_coeff_scale must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvarInstance {
    pub x: SignalMatrix,
    /// Instantaneous feedback matrix with zero diagonal.
    pub b0: DMatrix<f64>,
    pub lag_coeffs: Vec<DMatrix<f64>>,
    /// Structural shocks `S + C H`, `2 x n`.
    pub structural_shocks: DMatrix<f64>,
    pub alpha: f64,
    pub beta: f64,
}

/// Generates from `x_t = B0 x_t + sum_k B_k x_{t-k} + (s_t + C h_t)` with
/// block-wise shifting shock variances and stationary confounding.
pub fn gen_svar(spec: &SvarSpec) -> Result<SvarInstance> {
    spec.validate()?;
    let n = spec.n;
    let b0 =
        DMatrix::from_row_slice(2, 2, &[0.0, spec.beta, spec.alpha, 0.0]);
    let g0 = (DMatrix::identity(2, 2) - &b0)
        .try_inverse()
        .ok_or_else(|| invalid("I - B0 is singular"))?;

    // stable reduced-form dynamics
    let mut lag_rng = substream(spec.seed, STREAM_LAG_COEFFS);
    let mut lag_coeffs: Vec<DMatrix<f64>> = Vec::new();
    if spec.order > 0 {
        let mut found = false;
        for _ in 0..MAX_STABILITY_ATTEMPTS {
            let draws: Vec<DMatrix<f64>> = (0..spec.order)
                .map(|_| standard_normal_matrix(&mut lag_rng, 2, 2, spec.lag_coeff_scale))
                .collect();
            let reduced: Vec<DMatrix<f64>> = draws.iter().map(|b| &g0 * b).collect();
            let stacked = DMatrix::from_fn(2, 2 * spec.order, |r, c| reduced[c / 2][(r, c % 2)]);
            if spectral_radius_of_companion(&stacked) < 0.95 {
                lag_coeffs = draws;
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::Numerical("no stable lag coefficients found".into()));
        }
    }

    let conf_mixing = standard_normal_matrix(
        &mut substream(spec.seed, STREAM_CONF_MIXING),
        2,
        2,
        (1.0 / 2.0f64).sqrt(),
    );

    // block-aligned burn-in keeps the emitted samples on block boundaries
    let burn = spec.signal_block_len * BURN_IN.div_ceil(spec.signal_block_len);
    let total = burn + n;
    let b2 = 3.0 * spec.signal_strength + 0.1;
    let mut var_rng = substream(spec.seed, STREAM_SUBSET_VARS);
    let mut source_rng = substream(spec.seed, STREAM_SOURCES);
    let mut sources = DMatrix::zeros(2, total);
    for r in 0..2 {
        let mut c = 0;
        while c < total {
            let sd = sample_uniform(&mut var_rng, 0.1, b2).sqrt();
            let end = (c + spec.signal_block_len).min(total);
            while c < end {
                sources[(r, c)] = sd * crate::rng::normal(&mut source_rng);
                c += 1;
            }
        }
    }
    let shocks = if spec.confounding_strength == 0.0 {
        sources.clone()
    } else {
        let sd = spec.confounding_strength.sqrt();
        let raw = standard_normal_matrix(&mut substream(spec.seed, STREAM_NOISE), 2, total, sd);
        &sources + &conf_mixing * raw
    };

    let mut x_full = DMatrix::zeros(2, total);
    for t in 0..total {
        let mut drive = shocks.column(t).clone_owned();
        for (k, bk) in lag_coeffs.iter().enumerate() {
            if t > k {
                drive += bk * x_full.column(t - k - 1);
            }
        }
        x_full.set_column(t, &(&g0 * drive));
    }
    let x = SignalMatrix::new(x_full.columns(burn, n).clone_owned())?;
    Ok(SvarInstance {
        x,
        b0,
        lag_coeffs,
        structural_shocks: shocks.columns(burn, n).clone_owned(),
        alpha: spec.alpha,
        beta: spec.beta,
    })
}
