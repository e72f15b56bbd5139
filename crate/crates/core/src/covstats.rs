//! Empirical (auto-)covariance estimation on signal blocks and construction
//! of the matrix sets handed to the joint diagonalizer.
//!
//! The central objects are difference matrices
//! `Cov_tau(X_e) - Cov_tau(X_f)` for subgroups `e`, `f` of the same group:
//! stationary within-group noise cancels in the difference while a
//! non-stationary source signal survives.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DMatrixView, DVector};

use crate::error::{invalid, Result};

/// A `d x n` real data matrix; rows are channels, columns are samples in
/// temporal order.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMatrix {
    values: DMatrix<f64>,
}

impl SignalMatrix {
    /// Wraps a data matrix, requiring at least one channel, at least one
    /// sample and finite entries.
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(invalid("signal matrix must have at least one row and one column"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("signal matrix contains non-finite entries"));
        }
        Ok(Self { values })
    }

    /// Number of channels `d`.
    pub fn channels(&self) -> usize {
        self.values.nrows()
    }

    /// Number of samples `n`.
    pub fn samples(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_values(self) -> DMatrix<f64> {
        self.values
    }

    /// Copies the columns listed in `indices` (in the given order) into a new
    /// matrix. Indices must be in range.
    pub fn gather_columns(&self, indices: &[usize]) -> DMatrix<f64> {
        self.values.select_columns(indices.iter())
    }
}

/// Group structure, per-group ordered partitions into subgroups, and the lag
/// set used when building difference matrices.
///
/// Groups are index sets into the sample axis; each group carries an ordered
/// partition whose order defines the neighbour relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupedPartition {
    samples: usize,
    groups: Vec<Vec<usize>>,
    partitions: Vec<Vec<Vec<usize>>>,
    lags: Vec<usize>,
}

impl GroupedPartition {
    /// Validates and constructs a grouped partition for `samples` samples.
    ///
    /// Requirements: the groups are disjoint and cover `0..samples`; each
    /// group's partition is disjoint and covers the group; every subgroup has
    /// at least two samples and strictly increasing indices; the lags are
    /// strictly increasing and every lag is smaller than the shortest
    /// subgroup.
    pub fn new(
        samples: usize,
        groups: Vec<Vec<usize>>,
        partitions: Vec<Vec<Vec<usize>>>,
        lags: Vec<usize>,
    ) -> Result<Self> {
        if groups.is_empty() {
            return Err(invalid("at least one group is required"));
        }
        if partitions.len() != groups.len() {
            return Err(invalid("need exactly one partition per group"));
        }
        let mut seen = alloc::vec![false; samples];
        for (gi, group) in groups.iter().enumerate() {
            check_strictly_increasing(group, samples, &format!("group {gi}"))?;
            for &i in group {
                if seen[i] {
                    return Err(invalid(format!("sample {i} appears in more than one group")));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(invalid("groups must cover every sample"));
        }
        let mut min_subgroup = usize::MAX;
        for (gi, (group, partition)) in groups.iter().zip(&partitions).enumerate() {
            if partition.is_empty() {
                return Err(invalid(format!("group {gi} has an empty partition")));
            }
            let mut in_group = alloc::vec![false; samples];
            for &i in group {
                in_group[i] = true;
            }
            let mut covered = 0usize;
            for (ei, subgroup) in partition.iter().enumerate() {
                check_strictly_increasing(subgroup, samples, &format!("subgroup {ei} of group {gi}"))?;
                if subgroup.len() < 2 {
                    return Err(invalid(format!(
                        "subgroup {ei} of group {gi} has fewer than 2 samples"
                    )));
                }
                for &i in subgroup {
                    if !in_group[i] {
                        return Err(invalid(format!(
                            "subgroup {ei} of group {gi} contains sample {i} outside the group"
                        )));
                    }
                    in_group[i] = false; // also catches duplicates across subgroups
                }
                covered += subgroup.len();
                min_subgroup = min_subgroup.min(subgroup.len());
            }
            if covered != group.len() {
                return Err(invalid(format!("partition of group {gi} does not cover the group")));
            }
        }
        if lags.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("lags must be strictly increasing"));
        }
        if let Some(&max_lag) = lags.last() {
            if max_lag >= min_subgroup {
                return Err(invalid(format!(
                    "lag {max_lag} is not smaller than the shortest subgroup ({min_subgroup} samples)"
                )));
            }
        }
        Ok(Self { samples, groups, partitions, lags })
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn partitions(&self) -> &[Vec<Vec<usize>>] {
        &self.partitions
    }

    pub fn lags(&self) -> &[usize] {
        &self.lags
    }
}

fn check_strictly_increasing(indices: &[usize], samples: usize, what: &str) -> Result<()> {
    if indices.is_empty() {
        return Err(invalid(format!("{what} is empty")));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid(format!("{what} must have strictly increasing sample indices")));
    }
    if *indices.last().unwrap() >= samples {
        return Err(invalid(format!("{what} references a sample index out of range")));
    }
    Ok(())
}

/// Which subgroup pairs of each partition are differenced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Every unordered pair of distinct subgroups.
    All,
    /// Each subgroup against the rest of its group.
    Complement,
    /// Each subgroup against the next one in partition order.
    Neighbor,
}

/// Where a matrix in a [`MatrixSet`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// `Cov_tau(X_e) - Cov_tau(X_f)` for subgroups `left`, `right` of `group`.
    PairDiff { group: usize, left: usize, right: usize, lag: usize },
    /// `Cov_tau(X_e) - Cov_tau(X_{g \ e})` for subgroup `subgroup` of `group`.
    ComplementDiff { group: usize, subgroup: usize, lag: usize },
    /// Raw `Cov_tau` of one block.
    Block { block: usize, lag: usize },
}

/// An ordered collection of symmetric `d x d` matrices to be jointly
/// diagonalized, with per-matrix provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSet {
    matrices: Vec<DMatrix<f64>>,
    provenance: Vec<Provenance>,
}

impl MatrixSet {
    /// Validates that the set is nonempty and that all matrices are square,
    /// share one dimension and are symmetric to within `1e-12` relative
    /// tolerance.
    pub fn new(matrices: Vec<DMatrix<f64>>, provenance: Vec<Provenance>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(invalid("matrix set must be nonempty"));
        }
        if provenance.len() != matrices.len() {
            return Err(invalid("need exactly one provenance entry per matrix"));
        }
        let dim = matrices[0].nrows();
        for (i, m) in matrices.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(invalid(format!("matrix {i} is not {dim}x{dim}")));
            }
            let scale = m.amax();
            let asym = (m - m.transpose()).amax();
            if asym > 1e-12 * scale {
                return Err(invalid(format!("matrix {i} is not symmetric")));
            }
        }
        Ok(Self { matrices, provenance })
    }

    /// Concatenates several sets of equal dimension, preserving order.
    pub fn pooled(sets: Vec<MatrixSet>) -> Result<Self> {
        let mut matrices = Vec::new();
        let mut provenance = Vec::new();
        for set in sets {
            matrices.extend(set.matrices);
            provenance.extend(set.provenance);
        }
        Self::new(matrices, provenance)
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn iter(&self) -> impl Iterator<Item = &DMatrix<f64>> {
        self.matrices.iter()
    }
}

/// Empirical (auto-)covariance of a data block at the given lag.
///
/// With block mean `m` and `m_cols` columns this is
/// `sym( (1/(m_cols - lag)) * sum_i (x_i - m)(x_{i-lag} - m)^T )`, so the
/// lag-0 case is the biased `1/m`-normalized covariance. The result is
/// symmetrized, which for lag 0 only removes floating-point asymmetry.
pub fn empirical_autocov(block: DMatrixView<'_, f64>, lag: usize) -> Result<DMatrix<f64>> {
    let m = block.ncols();
    if m < lag + 2 {
        return Err(invalid(format!(
            "block with {m} samples is too short for lag {lag} (need at least {})",
            lag + 2
        )));
    }
    let mean: DVector<f64> = block.column_mean();
    let mut centered = block.clone_owned();
    for mut col in centered.column_iter_mut() {
        col -= &mean;
    }
    let lead = centered.columns(lag, m - lag);
    let trail = centered.columns(0, m - lag);
    let mut cov = &lead * trail.transpose();
    cov /= (m - lag) as f64;
    let sym = (&cov + cov.transpose()) * 0.5;
    Ok(sym)
}

/// Builds the set of covariance difference matrices for a grouped partition.
///
/// For each group, each subgroup pair selected by `strategy` and each lag,
/// the emitted matrix is `empirical_autocov(X_e, lag) - empirical_autocov(X_f, lag)`.
/// Order is deterministic: groups in input order, then partition order, then
/// lag order.
pub fn build_matrix_set(
    x: &SignalMatrix,
    gp: &GroupedPartition,
    strategy: Strategy,
) -> Result<MatrixSet> {
    if gp.samples() != x.samples() {
        return Err(invalid(format!(
            "partition is for {} samples but the signal has {}",
            gp.samples(),
            x.samples()
        )));
    }
    let lags = gp.lags();
    if lags.is_empty() {
        return Err(invalid("lag set must be nonempty"));
    }
    let mut matrices = Vec::new();
    let mut provenance = Vec::new();
    for (gi, (group, partition)) in gp.groups().iter().zip(gp.partitions()).enumerate() {
        let covs = subgroup_covariances(x, partition, lags, &|ei| {
            format!("subgroup {ei} of group {gi}")
        })?;
        let k = partition.len();
        match strategy {
            Strategy::All => {
                for left in 0..k {
                    for right in (left + 1)..k {
                        for (li, _) in lags.iter().enumerate() {
                            matrices.push(&covs[left][li] - &covs[right][li]);
                            provenance.push(Provenance::PairDiff {
                                group: gi,
                                left,
                                right,
                                lag: lags[li],
                            });
                        }
                    }
                }
            }
            Strategy::Complement => {
                if k < 2 {
                    continue; // complement of the only subgroup is empty
                }
                for (ei, subgroup) in partition.iter().enumerate() {
                    let mut complement: Vec<usize> = group
                        .iter()
                        .copied()
                        .filter(|i| subgroup.binary_search(i).is_err())
                        .collect();
                    complement.sort_unstable();
                    let block = x.gather_columns(&complement);
                    for (li, &lag) in lags.iter().enumerate() {
                        let comp_cov = empirical_autocov(block.as_view(), lag).map_err(|_| {
                            invalid(format!(
                                "complement of subgroup {ei} of group {gi} is too short for lag {lag}"
                            ))
                        })?;
                        matrices.push(&covs[ei][li] - comp_cov);
                        provenance.push(Provenance::ComplementDiff { group: gi, subgroup: ei, lag });
                    }
                }
            }
            Strategy::Neighbor => {
                for left in 0..k.saturating_sub(1) {
                    for (li, &lag) in lags.iter().enumerate() {
                        matrices.push(&covs[left][li] - &covs[left + 1][li]);
                        provenance.push(Provenance::PairDiff {
                            group: gi,
                            left,
                            right: left + 1,
                            lag,
                        });
                    }
                }
            }
        }
    }
    if matrices.is_empty() {
        return Err(invalid(
            "the grouped partition yields no difference matrices (every partition has a single subgroup)",
        ));
    }
    MatrixSet::new(matrices, provenance)
}

/// Builds raw per-block (auto-)covariances, block order then lag order.
///
/// This is the matrix set diagonalized by the baselines: per-block
/// covariances for blockwise methods and, with a single block covering all
/// data, the lagged autocovariances used by SOBI.
pub fn build_block_covariances(
    x: &SignalMatrix,
    blocks: &[Vec<usize>],
    lags: &[usize],
) -> Result<MatrixSet> {
    if blocks.is_empty() {
        return Err(invalid("at least one block is required"));
    }
    if lags.is_empty() {
        return Err(invalid("lag set must be nonempty"));
    }
    if lags.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("lags must be strictly increasing"));
    }
    let mut matrices = Vec::new();
    let mut provenance = Vec::new();
    for (bi, block_idx) in blocks.iter().enumerate() {
        check_strictly_increasing(block_idx, x.samples(), &format!("block {bi}"))?;
        let block = x.gather_columns(block_idx);
        for &lag in lags {
            let cov = empirical_autocov(block.as_view(), lag).map_err(|_| {
                invalid(format!(
                    "block {bi} with {} samples is too short for lag {lag}",
                    block_idx.len()
                ))
            })?;
            matrices.push(cov);
            provenance.push(Provenance::Block { block: bi, lag });
        }
    }
    MatrixSet::new(matrices, provenance)
}

fn subgroup_covariances(
    x: &SignalMatrix,
    partition: &[Vec<usize>],
    lags: &[usize],
    describe: &dyn Fn(usize) -> String,
) -> Result<Vec<Vec<DMatrix<f64>>>> {
    let mut covs = Vec::with_capacity(partition.len());
    for (ei, subgroup) in partition.iter().enumerate() {
        let block = x.gather_columns(subgroup);
        let mut per_lag = Vec::with_capacity(lags.len());
        for &lag in lags {
            let cov = empirical_autocov(block.as_view(), lag).map_err(|_| {
                invalid(format!(
                    "{} with {} samples is too short for lag {lag}",
                    describe(ei),
                    subgroup.len()
                ))
            })?;
            per_lag.push(cov);
        }
        covs.push(per_lag);
    }
    Ok(covs)
}
