//! Unmixing estimators: the confounding-robust group ICA and the baselines
//! it is compared against.
//!
//! All estimators are matrix-set recipes feeding the joint diagonalizer in
//! [`crate::jointdiag`]: the robust estimator diagonalizes within-group
//! covariance differences, the blockwise baseline diagonalizes raw block
//! covariances, SOBI diagonalizes lagged autocovariances of the whole series,
//! and random projections provide a scoring baseline.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::covstats::{
    build_block_covariances, build_matrix_set, GroupedPartition, MatrixSet, SignalMatrix, Strategy,
};
use crate::error::{invalid, Result};
use crate::jointdiag::{canonicalize_rows, inverse_or, uwedge, Diagonalizer, DiagonalizerOptions};
use crate::rng::substream;

/// Which kind of source non-stationarity the matrix set targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalKind {
    /// Changing variance: lag set `{0}`.
    Var,
    /// Changing time-dependence: positive lags only.
    Td,
    /// Both: lag 0 plus positive lags.
    VarAndTd,
}

/// How each group is partitioned into subgroups.
#[derive(Debug, Clone, PartialEq)]
pub enum PartitionPolicy {
    /// Split every group into contiguous blocks of the given length(s); with
    /// several lengths the difference matrices of all grids are pooled. A
    /// trailing remainder shorter than half the block length (or shorter than
    /// two samples) is merged into the last block, otherwise it stays its own
    /// block.
    EqualBlocks(Vec<usize>),
    /// Use the given partition as-is (takes precedence over group labels).
    Explicit(GroupedPartition),
}

/// Configuration shared by the group-robust estimator and the blockwise
/// baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationConfig {
    pub signal: SignalKind,
    /// The lag set. Must be `[0]` for `Var`, nonempty positive for `Td`, and
    /// `0` plus at least one positive lag for `VarAndTd`.
    pub lags: Vec<usize>,
    pub partition: PartitionPolicy,
    /// Which subgroup pairs are differenced (group-robust estimator only).
    pub strategy: Strategy,
    pub diag: DiagonalizerOptions,
}

impl SeparationConfig {
    /// Variance-signal configuration with equal blocks of the given lengths.
    pub fn var(block_lengths: Vec<usize>) -> Self {
        Self {
            signal: SignalKind::Var,
            lags: alloc::vec![0],
            partition: PartitionPolicy::EqualBlocks(block_lengths),
            strategy: Strategy::Neighbor,
            diag: DiagonalizerOptions::default(),
        }
    }

    /// Time-dependence configuration; `lags` must be positive.
    pub fn td(lags: Vec<usize>, block_lengths: Vec<usize>) -> Self {
        Self {
            signal: SignalKind::Td,
            lags,
            partition: PartitionPolicy::EqualBlocks(block_lengths),
            strategy: Strategy::Neighbor,
            diag: DiagonalizerOptions::default(),
        }
    }

    /// Hybrid configuration; lag 0 is prepended to the given positive lags.
    pub fn var_and_td(positive_lags: Vec<usize>, block_lengths: Vec<usize>) -> Self {
        let mut lags = alloc::vec![0];
        lags.extend(positive_lags);
        Self {
            signal: SignalKind::VarAndTd,
            lags,
            partition: PartitionPolicy::EqualBlocks(block_lengths),
            strategy: Strategy::Neighbor,
            diag: DiagonalizerOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lags.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("lags must be strictly increasing"));
        }
        match self.signal {
            SignalKind::Var => {
                if self.lags != [0] {
                    return Err(invalid("variance signal requires the lag set {0}"));
                }
            }
            SignalKind::Td => {
                if self.lags.is_empty() || self.lags[0] == 0 {
                    return Err(invalid(
                        "time-dependence signal requires a nonempty set of positive lags",
                    ));
                }
            }
            SignalKind::VarAndTd => {
                if self.lags.first() != Some(&0) || self.lags.len() < 2 {
                    return Err(invalid(
                        "hybrid signal requires lag 0 plus at least one positive lag",
                    ));
                }
            }
        }
        if let PartitionPolicy::EqualBlocks(lengths) = &self.partition {
            if lengths.is_empty() {
                return Err(invalid("at least one block length is required"));
            }
            if lengths.iter().any(|&l| l < 2) {
                return Err(invalid("block lengths must be at least 2"));
            }
        }
        Ok(())
    }
}

/// Which estimator produced a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Coroica,
    Choiica,
    Sobi,
    Random,
}

/// A fitted unmixing with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationModel {
    unmixing: DMatrix<f64>,
    mixing_estimate: DMatrix<f64>,
    pub method: MethodKind,
    pub converged: bool,
    pub iterations: usize,
    pub final_loss: f64,
}

impl SeparationModel {
    fn from_diagonalizer(method: MethodKind, diag: Diagonalizer) -> Result<Self> {
        let mixing_estimate = inverse_or(&diag.v, "estimated unmixing")?;
        Ok(Self {
            unmixing: diag.v,
            mixing_estimate,
            method,
            converged: diag.converged,
            iterations: diag.iterations,
            final_loss: diag.final_loss,
        })
    }

    /// The unmixing matrix; rows have unit norm.
    pub fn unmixing(&self) -> &DMatrix<f64> {
        &self.unmixing
    }

    /// Inverse of the unmixing, i.e. the mixing estimate.
    pub fn mixing_estimate(&self) -> &DMatrix<f64> {
        &self.mixing_estimate
    }

    /// Applies the unmixing to (possibly unseen) data.
    pub fn transform(&self, x: &SignalMatrix) -> Result<SignalMatrix> {
        if x.channels() != self.unmixing.ncols() {
            return Err(invalid(format!(
                "model unmixes {} channels but the signal has {}",
                self.unmixing.ncols(),
                x.channels()
            )));
        }
        SignalMatrix::new(&self.unmixing * x.values())
    }
}

/// Fits the group-robust estimator: builds the grouped partition, assembles
/// the covariance difference set for the configured strategy and lags, and
/// jointly diagonalizes it.
///
/// `group_labels` assigns every sample to a group; groups are processed in
/// ascending label order. With an explicit partition the labels are ignored.
pub fn coroica_fit(
    x: &SignalMatrix,
    group_labels: &[usize],
    cfg: &SeparationConfig,
) -> Result<SeparationModel> {
    cfg.validate()?;
    if group_labels.len() != x.samples() {
        return Err(invalid("need exactly one group label per sample"));
    }
    if x.channels() == 1 {
        return trivial_model(MethodKind::Coroica);
    }
    let sets = match &cfg.partition {
        PartitionPolicy::Explicit(gp) => {
            check_groups_nontrivial(gp)?;
            alloc::vec![build_matrix_set(x, gp, cfg.strategy)?]
        }
        PartitionPolicy::EqualBlocks(lengths) => {
            let groups = groups_from_labels(group_labels);
            let mut sets = Vec::with_capacity(lengths.len());
            for &len in lengths {
                let partitions: Vec<Vec<Vec<usize>>> =
                    groups.iter().map(|g| equal_blocks(g, len)).collect();
                let gp =
                    GroupedPartition::new(x.samples(), groups.clone(), partitions, cfg.lags.clone())?;
                check_groups_nontrivial(&gp)?;
                sets.push(build_matrix_set(x, &gp, cfg.strategy)?);
            }
            sets
        }
    };
    let set = MatrixSet::pooled(sets)?;
    let diag = uwedge(&set, &cfg.diag)?;
    SeparationModel::from_diagonalizer(MethodKind::Coroica, diag)
}

/// Fits the blockwise baseline: the whole series is treated as one group and
/// the raw per-block (auto-)covariances are diagonalized, without
/// differencing.
pub fn choiica_fit(x: &SignalMatrix, cfg: &SeparationConfig) -> Result<SeparationModel> {
    cfg.validate()?;
    if x.channels() == 1 {
        return trivial_model(MethodKind::Choiica);
    }
    let all: Vec<usize> = (0..x.samples()).collect();
    let blocks: Vec<Vec<usize>> = match &cfg.partition {
        PartitionPolicy::Explicit(gp) => gp.partitions().iter().flatten().cloned().collect(),
        PartitionPolicy::EqualBlocks(lengths) => {
            let mut blocks = Vec::new();
            for &len in lengths {
                blocks.extend(equal_blocks(&all, len));
            }
            blocks
        }
    };
    let set = build_block_covariances(x, &blocks, &cfg.lags)?;
    let diag = uwedge(&set, &cfg.diag)?;
    SeparationModel::from_diagonalizer(MethodKind::Choiica, diag)
}

/// Fits SOBI: jointly diagonalizes the autocovariances of the full series for
/// all lags `0..=max_lag`.
pub fn sobi_fit(
    x: &SignalMatrix,
    max_lag: usize,
    diag_opts: &DiagonalizerOptions,
) -> Result<SeparationModel> {
    if x.samples() <= max_lag + 2 {
        return Err(invalid(format!(
            "need more than {} samples for maximum lag {max_lag}",
            max_lag + 2
        )));
    }
    if x.channels() == 1 {
        return trivial_model(MethodKind::Sobi);
    }
    let all: Vec<usize> = (0..x.samples()).collect();
    let lags: Vec<usize> = (0..=max_lag).collect();
    let set = build_block_covariances(x, &[all], &lags)?;
    let diag = uwedge(&set, diag_opts)?;
    SeparationModel::from_diagonalizer(MethodKind::Sobi, diag)
}

/// A random row-normalized unmixing with iid standard-normal entries,
/// deterministic per seed. Used as a scoring baseline.
pub fn random_unmixing(d: usize, seed: u64) -> Result<SeparationModel> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let mut rng = substream(seed, 0);
    // row-major fill so the stream layout is documented and stable
    let mut v = DMatrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            v[(r, c)] = crate::rng::normal(&mut rng);
        }
    }
    for mut row in v.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    let mixing_estimate = inverse_or(&v, "random unmixing")?;
    Ok(SeparationModel {
        unmixing: v,
        mixing_estimate,
        method: MethodKind::Random,
        converged: true,
        iterations: 0,
        final_loss: 0.0,
    })
}

fn trivial_model(method: MethodKind) -> Result<SeparationModel> {
    Ok(SeparationModel {
        unmixing: DMatrix::identity(1, 1),
        mixing_estimate: DMatrix::identity(1, 1),
        method,
        converged: true,
        iterations: 0,
        final_loss: 0.0,
    })
}

/// Sample indices per group, groups ordered by ascending label.
pub fn groups_from_labels(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut unique: Vec<usize> = labels.to_vec();
    unique.sort_unstable();
    unique.dedup();
    let mut groups: Vec<Vec<usize>> = alloc::vec![Vec::new(); unique.len()];
    for (i, label) in labels.iter().enumerate() {
        let slot = unique.binary_search(label).unwrap();
        groups[slot].push(i);
    }
    groups
}

/// Splits ordered sample indices into contiguous blocks of `len` samples; see
/// [`PartitionPolicy::EqualBlocks`] for the remainder rule.
pub fn equal_blocks(indices: &[usize], len: usize) -> Vec<Vec<usize>> {
    let n = indices.len();
    let full = n / len;
    if full == 0 {
        return alloc::vec![indices.to_vec()];
    }
    let rem = n % len;
    let merge_rem = rem > 0 && (2 * rem < len || rem < 2);
    let mut blocks = Vec::with_capacity(full + 1);
    for b in 0..full {
        let mut block: Vec<usize> = indices[b * len..(b + 1) * len].to_vec();
        if merge_rem && b == full - 1 {
            block.extend_from_slice(&indices[full * len..]);
        }
        blocks.push(block);
    }
    if rem > 0 && !merge_rem {
        blocks.push(indices[full * len..].to_vec());
    }
    blocks
}

fn check_groups_nontrivial(gp: &GroupedPartition) -> Result<()> {
    for (gi, partition) in gp.partitions().iter().enumerate() {
        if partition.len() < 2 {
            return Err(invalid(format!(
                "partition too coarse: group {gi} has a single subgroup and yields no difference matrices"
            )));
        }
    }
    Ok(())
}

/// Sign-canonicalized copy of an unmixing matrix (largest-magnitude entry of
/// every row positive). Useful when comparing unmixings across fits.
pub fn canonicalized(v: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = v.clone();
    canonicalize_rows(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::md_index;
    use crate::rng::substream;
    use alloc::vec;
    use rand::Rng;

    #[test]
    fn equal_blocks_remainder_rules() {
        let idx: Vec<usize> = (0..10).collect();
        // remainder 1 of length 3: shorter than half, merged
        let blocks = equal_blocks(&idx, 3);
        assert_eq!(blocks.len(), 3);
        assert_eq!(blocks[2].len(), 4);
        // remainder 2 of length 4: exactly half, kept as its own block
        let blocks = equal_blocks(&idx, 4);
        assert_eq!(blocks.len(), 3);
        assert_eq!(blocks[2].len(), 2);
        // remainder 3 of length 7: shorter than half, merged
        let blocks = equal_blocks(&idx, 7);
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].len(), 10);
        // remainder 4 of length 7: at least half, kept
        let blocks = equal_blocks(&(0..11).collect::<Vec<_>>(), 7);
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[1].len(), 4);
        // remainder 1 always merged
        let blocks = equal_blocks(&(0..7).collect::<Vec<_>>(), 2);
        assert_eq!(blocks.len(), 3);
        assert_eq!(blocks[2].len(), 3);
        // group shorter than the block length stays one block
        let blocks = equal_blocks(&idx, 20);
        assert_eq!(blocks.len(), 1);
    }

    #[test]
    fn labels_are_grouped_in_ascending_order() {
        let groups = groups_from_labels(&[2, 0, 2, 0, 1]);
        assert_eq!(groups, vec![vec![1, 3], vec![4], vec![0, 2]]);
    }

    #[test]
    fn one_dimensional_input_gives_unit_model() {
        let x = SignalMatrix::new(DMatrix::from_row_slice(1, 8, &[1., 2., 3., 4., 5., 6., 7., 8.]))
            .unwrap();
        let cfg = SeparationConfig::var(vec![2]);
        let model = coroica_fit(&x, &[0; 8], &cfg).unwrap();
        assert_eq!(model.unmixing()[(0, 0)], 1.0);
        assert_eq!(model.mixing_estimate()[(0, 0)], 1.0);
    }

    #[test]
    fn transform_is_the_linear_map() {
        let model = random_unmixing(3, 9).unwrap();
        let zero = SignalMatrix::new(DMatrix::zeros(3, 5)).unwrap();
        // zero input stays zero
        assert_eq!(model.transform(&zero).unwrap().values().amax(), 0.0);
        let mut rng = substream(60, 0);
        let x = SignalMatrix::new(DMatrix::from_fn(3, 5, |_, _| crate::rng::normal(&mut rng)))
            .unwrap();
        let y = model.transform(&x).unwrap();
        assert_eq!(y.values(), &(model.unmixing() * x.values()));
        // dimension mismatch
        let bad = SignalMatrix::new(DMatrix::zeros(2, 5)).unwrap();
        assert!(model.transform(&bad).is_err());
    }

    #[test]
    fn inverse_consistency_of_returned_models() {
        let (x, labels, _a) = blockvar_like(4, 4_000, 4, 47);
        let cfg = SeparationConfig::var(vec![100]);
        let model = coroica_fit(&x, &labels, &cfg).unwrap();
        let residual = model.unmixing() * model.mixing_estimate() - DMatrix::identity(4, 4);
        assert!(residual.amax() < 1e-8, "residual {}", residual.amax());
    }

    /// Small blockwise-shifting-variance process mixed by a random matrix.
    fn blockvar_like(
        d: usize,
        n: usize,
        groups: usize,
        seed: u64,
    ) -> (SignalMatrix, Vec<usize>, DMatrix<f64>) {
        let mut rng = substream(seed, 0);
        let a = DMatrix::from_fn(d, d, |_, _| crate::rng::normal(&mut rng));
        let block = 100;
        let mut s = DMatrix::zeros(d, n);
        for r in 0..d {
            let mut scale = 1.0;
            for c in 0..n {
                if c % block == 0 {
                    scale = rng.random_range(0.1..3.0f64).sqrt();
                }
                s[(r, c)] = scale * crate::rng::normal(&mut rng);
            }
        }
        let x = SignalMatrix::new(&a * s).unwrap();
        let labels: Vec<usize> = (0..n).map(|i| i * groups / n).collect();
        (x, labels, a)
    }

    #[test]
    fn unmixing_recovers_blockwise_variance_mixing() {
        let (x, labels, a) = blockvar_like(4, 20_000, 4, 61);
        let cfg = SeparationConfig::var(vec![100]);
        let model = coroica_fit(&x, &labels, &cfg).unwrap();
        let md = md_index(model.unmixing(), &a).unwrap();
        assert!(md.value < 0.1, "md {}", md.value);
    }

    #[test]
    fn blockwise_baseline_recovers_exactly_diagonalizable_blocks() {
        // Hadamard-pattern rows give numerically exact diagonal block
        // covariances, so the baseline must recover the mixing to precision.
        let d = 4;
        let m = 8;
        let h8: [[f64; 8]; 4] = [
            [1., -1., 1., -1., 1., -1., 1., -1.],
            [1., 1., -1., -1., 1., 1., -1., -1.],
            [1., -1., -1., 1., 1., -1., -1., 1.],
            [1., 1., 1., 1., -1., -1., -1., -1.],
        ];
        let mut rng = substream(62, 0);
        let a = DMatrix::from_fn(d, d, |_, _| crate::rng::normal(&mut rng));
        let n_blocks = 6;
        let mut data = DMatrix::zeros(d, m * n_blocks);
        for b in 0..n_blocks {
            for r in 0..d {
                let scale: f64 = rng.random_range(0.2..2.0);
                for c in 0..m {
                    data[(r, b * m + c)] = scale.sqrt() * h8[r][c];
                }
            }
        }
        let x = SignalMatrix::new(&a * data).unwrap();
        let cfg = SeparationConfig::var(vec![m]);
        let model = choiica_fit(&x, &cfg).unwrap();
        let md = md_index(model.unmixing(), &a).unwrap();
        assert!(md.value < 1e-6, "md {}", md.value);
    }

    #[test]
    fn sobi_recovers_ar_sources_and_accepts_degenerate_lag() {
        let d = 3;
        let n = 100_000;
        let coeffs = [0.9, 0.2, -0.6];
        let mut rng = substream(63, 0);
        let mut s = DMatrix::zeros(d, n);
        for r in 0..d {
            let mut prev = 0.0;
            for c in 0..n {
                let eps: f64 = crate::rng::normal(&mut rng);
                let cur = coeffs[r] * prev + eps;
                s[(r, c)] = cur;
                prev = cur;
            }
        }
        let a = DMatrix::from_fn(d, d, |_, _| crate::rng::normal(&mut rng));
        let x = SignalMatrix::new(&a * s).unwrap();
        let model = sobi_fit(&x, 5, &DiagonalizerOptions::default()).unwrap();
        let md = md_index(model.unmixing(), &a).unwrap();
        assert!(md.value < 0.05, "md {}", md.value);

        // white noise carries no lag structure, so SOBI performs near chance
        let noise = SignalMatrix::new(DMatrix::from_fn(d, 20_000, |_, _| {
            crate::rng::normal(&mut rng)
        }))
        .unwrap();
        let mixed = SignalMatrix::new(&a * noise.values()).unwrap();
        let model = sobi_fit(&mixed, 5, &DiagonalizerOptions::default()).unwrap();
        let md = md_index(model.unmixing(), &a).unwrap();
        assert!(md.value > 0.3, "md {}", md.value);

        // max lag 0 degenerates to whitening but still returns a model
        let model = sobi_fit(&mixed, 0, &DiagonalizerOptions::default()).unwrap();
        assert_eq!(model.unmixing().nrows(), d);
    }

    #[test]
    fn random_unmixing_is_seed_deterministic_and_distinct() {
        let a = random_unmixing(22, 7).unwrap();
        let b = random_unmixing(22, 7).unwrap();
        assert_eq!(a.unmixing(), b.unmixing());
        let mut distinct = 0;
        let mut prev = random_unmixing(22, 0).unwrap();
        for seed in 1..100 {
            let cur = random_unmixing(22, seed).unwrap();
            if cur.unmixing() != prev.unmixing() {
                distinct += 1;
            }
            prev = cur;
        }
        assert_eq!(distinct, 99);
    }

    #[test]
    fn random_unmixing_scores_near_one_against_random_mixing() {
        let mut rng = substream(64, 0);
        let d = 16;
        let a = DMatrix::from_fn(d, d, |_, _| crate::rng::normal(&mut rng));
        let mut values = Vec::new();
        for seed in 0..50 {
            let v = random_unmixing(d, seed).unwrap();
            values.push(md_index(v.unmixing(), &a).unwrap().value);
        }
        let mean: f64 = values.iter().sum::<f64>() / values.len() as f64;
        assert!(mean > 0.75, "mean {mean}");
    }

    #[test]
    fn fit_is_scale_invariant() {
        let (x, labels, a) = blockvar_like(4, 8_000, 4, 65);
        let cfg = SeparationConfig::var(vec![100]);
        let base = coroica_fit(&x, &labels, &cfg).unwrap();
        let scaled_x = SignalMatrix::new(x.values() * 2.0).unwrap();
        let scaled = coroica_fit(&scaled_x, &labels, &cfg).unwrap();
        let md_base = md_index(base.unmixing(), &a).unwrap().value;
        let md_scaled = md_index(scaled.unmixing(), &a).unwrap().value;
        assert!((md_base - md_scaled).abs() < 1e-10);
    }

    #[test]
    fn group_order_changes_v_only_by_permutation() {
        let (x, labels, _a) = blockvar_like(4, 8_000, 2, 66);
        let cfg = SeparationConfig::var(vec![100]);
        let m1 = coroica_fit(&x, &labels, &cfg).unwrap();
        // swap the two groups' data blocks and labels
        let half = 4_000;
        let mut swapped = DMatrix::zeros(4, 8_000);
        swapped.columns_mut(0, half).copy_from(&x.values().columns(half, half));
        swapped.columns_mut(half, half).copy_from(&x.values().columns(0, half));
        let xs = SignalMatrix::new(swapped).unwrap();
        let m2 = coroica_fit(&xs, &labels, &cfg).unwrap();
        assert!(m1.converged && m2.converged);
        let rel = m1.unmixing() * m2.mixing_estimate();
        let md = md_index(&rel, &DMatrix::identity(4, 4)).unwrap();
        assert!(md.value < 1e-4, "md {}", md.value);
    }

    #[test]
    fn too_coarse_partitions_are_rejected() {
        let (x, labels, _a) = blockvar_like(3, 600, 3, 67);
        // block length equal to the whole group: single subgroup per group
        let cfg = SeparationConfig::var(vec![200]);
        let err = coroica_fit(&x, &labels, &cfg).unwrap_err();
        assert!(alloc::string::ToString::to_string(&err).contains("too coarse"));
    }

    #[test]
    fn config_validation_rejects_inconsistent_lag_sets() {
        let mut cfg = SeparationConfig::var(vec![10]);
        cfg.lags = vec![0, 1];
        assert!(cfg.validate().is_err());
        let mut cfg = SeparationConfig::td(vec![1, 2], vec![10]);
        cfg.lags = vec![0, 1];
        assert!(cfg.validate().is_err());
        let mut cfg = SeparationConfig::var_and_td(vec![1], vec![10]);
        cfg.lags = vec![1, 2];
        assert!(cfg.validate().is_err());
        let cfg = SeparationConfig::var(vec![]);
        assert!(cfg.validate().is_err());
        let cfg = SeparationConfig::var(vec![1]);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn multi_grid_pools_difference_matrices() {
        let (x, labels, a) = blockvar_like(4, 8_000, 4, 68);
        let mut cfg = SeparationConfig::var(vec![100, 200]);
        cfg.strategy = Strategy::Neighbor;
        let model = coroica_fit(&x, &labels, &cfg).unwrap();
        let md = md_index(model.unmixing(), &a).unwrap();
        assert!(md.value < 0.15, "md {}", md.value);
    }
}
