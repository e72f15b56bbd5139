//! Quality scores for recovered unmixings.
//!
//! With ground truth available the minimum-distance (MD) index measures how
//! far `V_hat * A` is from a rescaled permutation of the identity. Without
//! ground truth, the covariance instability score (CIS) matrix and its scalar
//! summary MCIS measure whether the recovered sources' variance signals stay
//! separated across a partition.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

use crate::covstats::{empirical_autocov, MatrixSet, SignalMatrix};
use crate::error::{invalid, Result};

/// Minimum-distance index in `[0, 1]` together with the minimizing
/// row-to-column assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct MdScore {
    pub value: f64,
    /// `optimal_permutation[row] = column` of `V_hat * A` matched to `row`.
    pub optimal_permutation: Vec<usize>,
}

/// Covariance instability score matrix for one group.
#[derive(Debug, Clone, PartialEq)]
pub struct CisMatrix {
    values: DMatrix<f64>,
    partition: Vec<Vec<usize>>,
}

impl CisMatrix {
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// The partition the score was computed on.
    pub fn partition(&self) -> &[Vec<usize>] {
        &self.partition
    }

    /// Square root of the mean off-diagonal entry.
    pub fn mcis(&self) -> f64 {
        let d = self.values.nrows();
        let mut sum = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    sum += self.values[(i, j)];
                }
            }
        }
        (sum / (d * (d - 1)) as f64).sqrt()
    }
}

/// Minimum-distance index between an estimated unmixing and a true mixing.
///
/// Computes `G = V_hat * A`, builds the cost matrix
/// `c[j][k] = 1 - G[j][k]^2 / ||G[j]||^2` and minimizes the row-to-column
/// assignment, which realizes the infimum over rescaled permutations in
/// closed form.
pub fn md_index(v_hat: &DMatrix<f64>, a: &DMatrix<f64>) -> Result<MdScore> {
    let d = check_md_input(v_hat, a)?;
    let g = v_hat * a;
    let cost = md_cost(&g)?;
    let assignment = min_cost_assignment(&cost);
    Ok(md_from_assignment(&cost, &assignment, d))
}

/// Exhaustive-permutation oracle for [`md_index`]; only feasible for small
/// dimensions.
pub fn md_index_bruteforce(v_hat: &DMatrix<f64>, a: &DMatrix<f64>) -> Result<MdScore> {
    let d = check_md_input(v_hat, a)?;
    if d > 8 {
        return Err(invalid("brute-force search is limited to dimension 8"));
    }
    let g = v_hat * a;
    let cost = md_cost(&g)?;
    let mut perm: Vec<usize> = (0..d).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    permute(&mut perm, 0, &mut |p| {
        let total = sorted_sum((0..d).map(|j| cost[(j, p[j])]));
        match &best {
            Some((b, _)) if *b <= total => {}
            _ => best = Some((total, p.to_vec())),
        }
    });
    let (_, assignment) = best.unwrap();
    Ok(md_from_assignment(&cost, &assignment, d))
}

fn check_md_input(v_hat: &DMatrix<f64>, a: &DMatrix<f64>) -> Result<usize> {
    let d = v_hat.nrows();
    if v_hat.ncols() != d || a.nrows() != d || a.ncols() != d {
        return Err(invalid("both matrices must be square with equal dimension"));
    }
    if d < 2 {
        return Err(invalid("minimum-distance index requires dimension at least 2"));
    }
    for (name, m) in [("estimated unmixing", v_hat), ("mixing", a)] {
        let det = m.clone().lu().determinant();
        if !det.is_finite() || det == 0.0 {
            return Err(invalid(format!("{name} matrix is singular")));
        }
    }
    Ok(d)
}

fn md_cost(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = g.nrows();
    let mut cost = DMatrix::zeros(d, d);
    for j in 0..d {
        let row_norm_sq: f64 = g.row(j).iter().map(|v| v * v).sum();
        if row_norm_sq == 0.0 {
            return Err(invalid("product of the inputs has a zero row"));
        }
        for k in 0..d {
            cost[(j, k)] = 1.0 - g[(j, k)] * g[(j, k)] / row_norm_sq;
        }
    }
    Ok(cost)
}

fn md_from_assignment(cost: &DMatrix<f64>, assignment: &[usize], d: usize) -> MdScore {
    let total = sorted_sum((0..d).map(|j| cost[(j, assignment[j])]));
    let value = (total / (d - 1) as f64).max(0.0).sqrt().min(1.0);
    MdScore { value, optimal_permutation: assignment.to_vec() }
}

/// Sums in ascending order so the result is invariant under reordering of the
/// addends (and hence under row/column permutations of the inputs).
fn sorted_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    v.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    v.iter().sum()
}

fn permute(perm: &mut Vec<usize>, at: usize, visit: &mut impl FnMut(&[usize])) {
    if at == perm.len() {
        visit(perm);
        return;
    }
    for i in at..perm.len() {
        perm.swap(at, i);
        permute(perm, at + 1, visit);
        perm.swap(at, i);
    }
}

/// Minimum-cost row-to-column assignment on a square cost matrix via the
/// O(n^3) shortest-augmenting-path algorithm with potentials. Ties resolve to
/// the lowest column index.
fn min_cost_assignment(cost: &DMatrix<f64>) -> Vec<usize> {
    let n = cost.nrows();
    // column j is matched to row col_row[j]; index n is a virtual column
    let mut col_row = alloc::vec![usize::MAX; n + 1];
    let mut u = alloc::vec![0.0f64; n];
    let mut v = alloc::vec![0.0f64; n + 1];
    for row in 0..n {
        let mut j0 = n;
        col_row[j0] = row;
        let mut min_slack = alloc::vec![f64::INFINITY; n + 1];
        let mut prev_col = alloc::vec![n; n + 1];
        let mut used = alloc::vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = col_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = n;
            for j in 0..n {
                if used[j] {
                    continue;
                }
                let slack = cost[(i0, j)] - u[i0] - v[j];
                if slack < min_slack[j] {
                    min_slack[j] = slack;
                    prev_col[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    if col_row[j] != usize::MAX {
                        u[col_row[j]] += delta;
                    }
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if col_row[j0] == usize::MAX {
                break;
            }
        }
        // augment along the stored path
        while j0 != n {
            let j1 = prev_col[j0];
            col_row[j0] = col_row[j1];
            j0 = j1;
        }
    }
    let mut assignment = alloc::vec![0usize; n];
    for j in 0..n {
        assignment[col_row[j]] = j;
    }
    assignment
}

/// Covariance instability score matrix of recovered sources over an ordered
/// partition of one group.
///
/// Each partition element (except the last, which has no right neighbour)
/// contributes the element-wise square of the neighbour covariance difference
/// normalized by the outer product of the per-component standard deviations
/// over the whole group.
pub fn cis_matrix(s_hat: &SignalMatrix, partition: &[Vec<usize>]) -> Result<CisMatrix> {
    if partition.len() < 2 {
        return Err(invalid("covariance instability needs at least two partition elements"));
    }
    let d = s_hat.channels();
    let mut union: Vec<usize> = partition.iter().flatten().copied().collect();
    union.sort_unstable();
    if union.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid("partition elements must be disjoint"));
    }
    if union.last().is_some_and(|&i| i >= s_hat.samples()) {
        return Err(invalid("partition references a sample index out of range"));
    }
    let group = s_hat.gather_columns(&union);
    let m = group.ncols() as f64;
    let mut sigma = DVector::zeros(d);
    for i in 0..d {
        let row = group.row(i);
        let mean = row.sum() / m;
        let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m;
        if var == 0.0 {
            return Err(invalid(format!("component {i} has zero variance on the group")));
        }
        sigma[i] = var.sqrt();
    }
    let covs: Vec<DMatrix<f64>> = partition
        .iter()
        .enumerate()
        .map(|(ei, e)| {
            let block = s_hat.gather_columns(e);
            empirical_autocov(block.as_view(), 0)
                .map_err(|_| invalid(format!("partition element {ei} is too short")))
        })
        .collect::<Result<_>>()?;
    let mut acc = DMatrix::zeros(d, d);
    let pairs = partition.len() - 1;
    for e in 0..pairs {
        for i in 0..d {
            for j in 0..d {
                let z = (covs[e][(i, j)] - covs[e + 1][(i, j)]) / (sigma[i] * sigma[j]);
                acc[(i, j)] += z * z;
            }
        }
    }
    acc /= pairs as f64;
    Ok(CisMatrix { values: acc, partition: partition.to_vec() })
}

/// Square root of the mean off-diagonal covariance instability.
pub fn mcis(s_hat: &SignalMatrix, partition: &[Vec<usize>]) -> Result<f64> {
    if s_hat.channels() < 2 {
        return Err(invalid("mean covariance instability requires at least two components"));
    }
    Ok(cis_matrix(s_hat, partition)?.mcis())
}

/// Sign-aligned sum `sum_M sign(v_j M v_j^T) M v_j^T` over the matrix set;
/// for a well-fit model this is proportional to the `j`-th mixing column.
pub fn activation_map(v: &DMatrix<f64>, set: &MatrixSet, j: usize) -> Result<DVector<f64>> {
    let d = set.dim();
    if v.nrows() != d || v.ncols() != d {
        return Err(invalid("unmixing matrix dimension does not match the matrix set"));
    }
    if j >= d {
        return Err(invalid(format!("component index {j} out of range for dimension {d}")));
    }
    let vj = v.row(j).transpose();
    let mut acc = DVector::zeros(d);
    for m in set.iter() {
        let mv = m * &vj;
        let quad = vj.dot(&mv);
        let sign = if quad > 0.0 {
            1.0
        } else if quad < 0.0 {
            -1.0
        } else {
            0.0
        };
        acc += mv * sign;
    }
    Ok(acc)
}
