//! L1-penalized least squares by cyclic coordinate descent.
//!
//! Solves
//!
//! ```text
//! min over (w, b) of  1/(2n) * sum_i (y_i - b - G_i . w)^2  +  lambda * |w|_1
//! ```
//!
//! with an unpenalized intercept `b`. Centering is handled internally: the
//! solver works on column-centered data where the optimal intercept is
//! implied, and reports `b = mean(y) - column_means(G) . w`.
//!
//! The iteration runs in covariance form. The Gram matrix and
//! feature-target products are computed once per problem, so each coordinate
//! update is O(m) regardless of the row count, which keeps repeated solves
//! over a regularization path cheap. Columns with zero variance carry no
//! signal and are pinned to weight zero.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Coordinate-change threshold below which a sweep counts as converged.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Sweep budget for a single solve.
pub const DEFAULT_MAX_SWEEPS: usize = 2000;

/// Default size of the automatic regularization grid.
pub const DEFAULT_GRID_SIZE: usize = 20;

/// Ratio between the largest and smallest grid value.
const GRID_SPAN: f64 = 1e-3;

/// The soft-thresholding operator `sign(z) * max(|z| - threshold, 0)`.
pub fn soft_threshold(z: f64, threshold: f64) -> f64 {
    if z > threshold {
        z - threshold
    } else if z < -threshold {
        z + threshold
    } else {
        0.0
    }
}

/// A fitted penalized regression.
#[derive(Clone, Debug)]
pub struct LassoSolution {
    pub weights: Array1<f64>,
    pub intercept: f64,
    pub lambda: f64,
    /// Coordinate sweeps actually executed.
    pub sweeps: usize,
    pub converged: bool,
}

/// Cross-validation outcome: the refit at the selected penalty plus the
/// per-grid-value held-out error that drove the choice.
#[derive(Clone, Debug)]
pub struct LassoCvResult {
    pub solution: LassoSolution,
    pub lambda_grid: Vec<f64>,
    pub cv_mse: Vec<f64>,
}

/// Centered sufficient statistics for one design/target pair.
struct GramProblem {
    gram: Array2<f64>,
    xty: Array1<f64>,
    col_means: Array1<f64>,
    y_mean: f64,
    n: f64,
}

impl GramProblem {
    fn new(design: ArrayView2<'_, f64>, targets: ArrayView1<'_, f64>) -> Result<Self> {
        let (n, _m) = design.dim();
        if n == 0 {
            return Err(Error::Empty { what: "design matrix" });
        }
        if n != targets.len() {
            return Err(Error::LengthMismatch {
                what: "design rows vs targets",
                left: n,
                right: targets.len(),
            });
        }
        let col_means = design.mean_axis(Axis(0)).unwrap();
        let y_mean = targets.mean().unwrap();
        let centered = &design - &col_means;
        let centered_y = &targets - y_mean;
        let gram = centered.t().dot(&centered);
        let xty = centered.t().dot(&centered_y);
        Ok(GramProblem {
            gram,
            xty,
            col_means,
            y_mean,
            n: n as f64,
        })
    }

    /// Largest penalty with a non-null solution: `max_j |<g_j, y>| / n` on
    /// centered data.
    fn lambda_max(&self) -> f64 {
        self.xty.iter().fold(0.0f64, |acc, v| acc.max(v.abs())) / self.n
    }

    /// Cyclic coordinate descent starting from (and mutating) `weights`.
    fn descend(&self, lambda: f64, weights: &mut Array1<f64>, tol: f64, max_sweeps: usize) -> (usize, bool) {
        let m = weights.len();
        for sweep in 1..=max_sweeps {
            let mut max_delta = 0.0f64;
            for j in 0..m {
                let gjj = self.gram[[j, j]];
                if gjj <= 0.0 {
                    // zero-variance column: no signal, pinned to zero
                    max_delta = max_delta.max(weights[j].abs());
                    weights[j] = 0.0;
                    continue;
                }
                let partial = self.xty[j] - self.gram.row(j).dot(&*weights) + gjj * weights[j];
                let updated = soft_threshold(partial / self.n, lambda) * self.n / gjj;
                max_delta = max_delta.max((updated - weights[j]).abs());
                weights[j] = updated;
            }
            if max_delta < tol {
                return (sweep, true);
            }
        }
        (max_sweeps, false)
    }

    fn intercept_for(&self, weights: &Array1<f64>) -> f64 {
        self.y_mean - self.col_means.dot(weights)
    }
}

fn validate_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(
            "lambda",
            format!("must be finite and >= 0, got {lambda}"),
        ));
    }
    Ok(())
}

/// Solve one penalized problem from a zero start.
pub fn lasso_fit(
    design: ArrayView2<'_, f64>,
    targets: ArrayView1<'_, f64>,
    lambda: f64,
    tol: f64,
    max_sweeps: usize,
) -> Result<LassoSolution> {
    validate_lambda(lambda)?;
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance", format!("must be > 0, got {tol}")));
    }
    let problem = GramProblem::new(design, targets)?;
    let mut weights = Array1::zeros(design.ncols());
    let (sweeps, converged) = problem.descend(lambda, &mut weights, tol, max_sweeps);
    let intercept = problem.intercept_for(&weights);
    Ok(LassoSolution {
        weights,
        intercept,
        lambda,
        sweeps,
        converged,
    })
}

/// Largest useful penalty for a problem; every `lambda >=` this value yields
/// the all-zero weight vector.
pub fn lambda_max(design: ArrayView2<'_, f64>, targets: ArrayView1<'_, f64>) -> Result<f64> {
    Ok(GramProblem::new(design, targets)?.lambda_max())
}

/// Log-spaced grid from `top` down to `top * 1e-3`.
///
/// Degenerates to `[0.0]` when `top` is zero (a design orthogonal to the
/// targets), where every penalty is equivalent.
pub fn default_lambda_grid(top: f64, size: usize) -> Vec<f64> {
    if size == 0 || !(top > 0.0) {
        return vec![0.0];
    }
    if size == 1 {
        return vec![top];
    }
    (0..size)
        .map(|i| top * GRID_SPAN.powf(i as f64 / (size - 1) as f64))
        .collect()
}

/// Objective value `1/(2n) * ||y - b - Gw||^2 + lambda * |w|_1` with the
/// intercept implied by `weights` (the centered optimum).
pub fn objective(
    design: ArrayView2<'_, f64>,
    targets: ArrayView1<'_, f64>,
    lambda: f64,
    weights: &Array1<f64>,
) -> Result<f64> {
    let problem = GramProblem::new(design, targets)?;
    let intercept = problem.intercept_for(weights);
    let n = design.nrows() as f64;
    let mut sse = 0.0;
    for (row, &y) in design.rows().into_iter().zip(targets.iter()) {
        let pred = intercept + row.dot(weights);
        sse += (y - pred).powi(2);
    }
    Ok(sse / (2.0 * n) + lambda * weights.iter().map(|w| w.abs()).sum::<f64>())
}

/// Largest violation of the subgradient optimality conditions.
///
/// For an exact solution this is zero: active coordinates satisfy
/// `<g_j, residual>/n = lambda * sign(w_j)` and inactive ones satisfy
/// `|<g_j, residual>|/n <= lambda`, all on centered data.
pub fn kkt_residual(
    design: ArrayView2<'_, f64>,
    targets: ArrayView1<'_, f64>,
    lambda: f64,
    weights: &Array1<f64>,
) -> Result<f64> {
    let problem = GramProblem::new(design, targets)?;
    let mut worst = 0.0f64;
    for j in 0..weights.len() {
        if problem.gram[[j, j]] <= 0.0 {
            continue;
        }
        let corr = (problem.xty[j] - problem.gram.row(j).dot(weights)) / problem.n;
        let violation = if weights[j] != 0.0 {
            (corr - lambda * weights[j].signum()).abs()
        } else {
            (corr.abs() - lambda).max(0.0)
        };
        worst = worst.max(violation);
    }
    Ok(worst)
}

/// Pick the penalty by k-fold cross-validation, then refit on all rows.
///
/// Rows are shuffled once with the supplied stream and split into contiguous
/// blocks, so fold membership is a pure function of the seed. The grid must
/// be positive and sorted descending; solves along it warm-start from the
/// previous penalty. The winner is the grid value with the smallest mean
/// held-out squared error, ties broken toward the stronger penalty.
pub fn lasso_cv(
    design: ArrayView2<'_, f64>,
    targets: ArrayView1<'_, f64>,
    folds: usize,
    lambda_grid: &[f64],
    rng: &mut RngStream,
    tol: f64,
    max_sweeps: usize,
) -> Result<LassoCvResult> {
    let n = design.nrows();
    if folds < 2 || folds > n {
        return Err(Error::invalid(
            "fold count",
            format!("must be between 2 and the row count ({n}), got {folds}"),
        ));
    }
    if lambda_grid.is_empty() {
        return Err(Error::Empty { what: "lambda grid" });
    }
    for pair in lambda_grid.windows(2) {
        if pair[1] > pair[0] {
            return Err(Error::invalid(
                "lambda grid",
                "must be sorted in descending order",
            ));
        }
    }
    if lambda_grid.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
        return Err(Error::invalid("lambda grid", "all values must be finite and > 0"));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut held_out_sse = vec![0.0f64; lambda_grid.len()];
    for fold in 0..folds {
        let start = fold * n / folds;
        let end = (fold + 1) * n / folds;
        let held: &[usize] = &order[start..end];
        let train: Vec<usize> = order[..start]
            .iter()
            .chain(&order[end..])
            .copied()
            .collect();

        let train_design = design.select(Axis(0), &train);
        let train_targets = targets.select(Axis(0), &train);
        let problem = GramProblem::new(train_design.view(), train_targets.view())?;

        let mut weights = Array1::zeros(design.ncols());
        for (gi, &lambda) in lambda_grid.iter().enumerate() {
            problem.descend(lambda, &mut weights, tol, max_sweeps);
            let intercept = problem.intercept_for(&weights);
            for &row in held {
                let pred = intercept + design.row(row).dot(&weights);
                held_out_sse[gi] += (targets[row] - pred).powi(2);
            }
        }
    }

    let cv_mse: Vec<f64> = held_out_sse.iter().map(|sse| sse / n as f64).collect();
    let mut best = 0usize;
    for (gi, &mse) in cv_mse.iter().enumerate() {
        if mse < cv_mse[best] {
            best = gi;
        }
    }

    let solution = lasso_fit(design, targets, lambda_grid[best], tol, max_sweeps)?;
    Ok(LassoCvResult {
        solution,
        lambda_grid: lambda_grid.to_vec(),
        cv_mse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamId;
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array};


    fn rng(seed: u64) -> RngStream {
        RngStream::new(seed, StreamId::folds(seed))
    }

    /// Random problem with standard normal entries.
    fn random_problem(seed: u64, n: usize, m: usize) -> (Array2<f64>, Array1<f64>) {
        use rand_distr::{Distribution, StandardNormal};
        let mut r = rng(seed);
        let design = Array::from_shape_fn((n, m), |_| StandardNormal.sample(&mut r));
        let targets = Array::from_shape_fn(n, |_| StandardNormal.sample(&mut r));
        (design, targets)
    }

    /// Least squares on centered data by Gaussian elimination with partial
    /// pivoting; an oracle independent of the coordinate descent path.
    fn normal_equations(design: &Array2<f64>, targets: &Array1<f64>) -> Array1<f64> {
        let means = design.mean_axis(Axis(0)).unwrap();
        let centered = design - &means;
        let y_mean = targets.mean().unwrap();
        let yc = targets - y_mean;
        let mut a = centered.t().dot(&centered);
        let mut b = centered.t().dot(&yc);
        let m = b.len();
        for col in 0..m {
            let pivot = (col..m)
                .max_by(|&i, &j| a[[i, col]].abs().total_cmp(&a[[j, col]].abs()))
                .unwrap();
            if pivot != col {
                for k in 0..m {
                    let tmp = a[[col, k]];
                    a[[col, k]] = a[[pivot, k]];
                    a[[pivot, k]] = tmp;
                }
                b.swap(col, pivot);
            }
            for row in col + 1..m {
                let factor = a[[row, col]] / a[[col, col]];
                for k in col..m {
                    a[[row, k]] -= factor * a[[col, k]];
                }
                b[row] -= factor * b[col];
            }
        }
        let mut w = Array1::zeros(m);
        for row in (0..m).rev() {
            let mut acc = b[row];
            for k in row + 1..m {
                acc -= a[[row, k]] * w[k];
            }
            w[row] = acc / a[[row, row]];
        }
        w
    }

    #[test]
    fn soft_threshold_matches_the_closed_form() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(1.0, 1.0), 0.0);
        assert_eq!(soft_threshold(-1.0, 1.0), 0.0);
        assert_eq!(soft_threshold(0.25, 0.0), 0.25);
    }

    #[test]
    fn penalty_at_lambda_max_yields_the_null_model() {
        let (design, targets) = random_problem(1, 40, 5);
        let top = lambda_max(design.view(), targets.view()).unwrap();
        for lambda in [top, top * 1.5] {
            let sol = lasso_fit(design.view(), targets.view(), lambda, 1e-12, 1000).unwrap();
            assert!(sol.weights.iter().all(|&w| w == 0.0), "weights {:?}", sol.weights);
            assert_abs_diff_eq!(sol.intercept, targets.mean().unwrap(), epsilon = 1e-12);
        }
        // just below the critical penalty at least one weight activates
        let sol = lasso_fit(design.view(), targets.view(), top * 0.99, 1e-12, 1000).unwrap();
        assert!(sol.weights.iter().any(|&w| w != 0.0));
    }

    #[test]
    fn univariate_solution_matches_the_closed_form() {
        // centered single column: w = S(<g,y>/n, lambda) / (<g,g>/n)
        let design = array![[1.0], [-1.0], [1.0], [-1.0]];
        let targets = array![2.0, -2.0, 2.0, -2.0];
        let sol = lasso_fit(design.view(), targets.view(), 1.0, 1e-12, 1000).unwrap();
        assert_abs_diff_eq!(sol.weights[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(sol.intercept, 0.0, epsilon = 1e-10);

        for seed in 0..20 {
            let (design, targets) = random_problem(100 + seed, 30, 1);
            let mean_g = design.column(0).mean().unwrap();
            let mean_y = targets.mean().unwrap();
            let gc: Vec<f64> = design.column(0).iter().map(|v| v - mean_g).collect();
            let yc: Vec<f64> = targets.iter().map(|v| v - mean_y).collect();
            let n = gc.len() as f64;
            let gy: f64 = gc.iter().zip(&yc).map(|(g, y)| g * y).sum::<f64>() / n;
            let gg: f64 = gc.iter().map(|g| g * g).sum::<f64>() / n;
            for lambda in [0.0, 0.05, 0.3] {
                let expected = soft_threshold(gy, lambda) / gg;
                let sol = lasso_fit(design.view(), targets.view(), lambda, 1e-13, 5000).unwrap();
                assert_abs_diff_eq!(sol.weights[0], expected, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn unpenalized_fit_matches_normal_equations() {
        let design = array![[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, -1.0]];
        let targets = array![1.0, -1.0, 0.5, 3.0];
        let oracle = normal_equations(&design, &targets);
        let sol = lasso_fit(design.view(), targets.view(), 0.0, 1e-13, 20000).unwrap();
        for j in 0..2 {
            assert_abs_diff_eq!(sol.weights[j], oracle[j], epsilon = 1e-8);
        }
        let implied = targets.mean().unwrap()
            - design.mean_axis(Axis(0)).unwrap().dot(&sol.weights);
        assert_abs_diff_eq!(sol.intercept, implied, epsilon = 1e-12);
    }

    #[test]
    fn zero_variance_columns_get_zero_weight() {
        let design = array![[1.0, 5.0], [2.0, 5.0], [3.0, 5.0], [4.0, 5.0]];
        let targets = array![2.0, 4.0, 6.0, 8.0];
        let sol = lasso_fit(design.view(), targets.view(), 0.0, 1e-12, 1000).unwrap();
        assert_eq!(sol.weights[1], 0.0);
        assert_abs_diff_eq!(sol.weights[0], 2.0, epsilon = 1e-9);
    }

    #[test]
    fn objective_never_increases_across_sweeps() {
        let (design, targets) = random_problem(7, 25, 6);
        for lambda in [0.0, 0.01, 0.1] {
            let mut previous = f64::INFINITY;
            for sweeps in 1..=15 {
                let sol = lasso_fit(design.view(), targets.view(), lambda, 1e-16, sweeps).unwrap();
                let value = objective(design.view(), targets.view(), lambda, &sol.weights).unwrap();
                assert!(
                    value <= previous + 1e-12,
                    "objective rose from {previous} to {value} at {sweeps} sweeps"
                );
                previous = value;
            }
        }
    }

    #[test]
    fn solutions_satisfy_the_stationarity_conditions() {
        for seed in 0..20 {
            let (design, targets) = random_problem(seed, 30, 5);
            let top = lambda_max(design.view(), targets.view()).unwrap();
            for lambda in [0.0, 0.01, 0.3 * top, 0.9 * top] {
                let sol = lasso_fit(design.view(), targets.view(), lambda, 1e-12, 50000).unwrap();
                assert!(sol.converged);
                let kkt = kkt_residual(design.view(), targets.view(), lambda, &sol.weights).unwrap();
                assert!(kkt < 1e-6, "seed {seed} lambda {lambda}: kkt {kkt}");
            }
        }
    }

    #[test]
    fn matches_coordinate_wise_grid_refinement() {
        // Independent oracle: per-coordinate argmin over a 1e-3-step grid,
        // cycled until no coordinate moves.
        for seed in [3, 4] {
            let (design, targets) = random_problem(seed, 12, 4);
            let lambda = 0.05;
            let mut w = Array1::zeros(4);
            loop {
                let mut moved = false;
                for j in 0..4 {
                    let mut best = objective(design.view(), targets.view(), lambda, &w).unwrap();
                    let mut best_v = w[j];
                    let center = w[j];
                    for step in -2000..=2000i32 {
                        let candidate = center + step as f64 * 1e-3;
                        let mut trial = w.clone();
                        trial[j] = candidate;
                        let value = objective(design.view(), targets.view(), lambda, &trial).unwrap();
                        if value < best {
                            best = value;
                            best_v = candidate;
                        }
                    }
                    if best_v != w[j] {
                        w[j] = best_v;
                        moved = true;
                    }
                }
                if !moved {
                    break;
                }
            }
            let sol = lasso_fit(design.view(), targets.view(), lambda, 1e-12, 50000).unwrap();
            for j in 0..4 {
                assert!(
                    (sol.weights[j] - w[j]).abs() < 2e-3,
                    "seed {seed} coordinate {j}: {} vs oracle {}",
                    sol.weights[j],
                    w[j]
                );
            }
        }
    }

    #[test]
    fn grid_is_log_spaced_and_descending() {
        let grid = default_lambda_grid(10.0, 20);
        assert_eq!(grid.len(), 20);
        assert_abs_diff_eq!(grid[0], 10.0);
        assert_abs_diff_eq!(grid[19], 0.01, epsilon = 1e-12);
        for pair in grid.windows(2) {
            assert!(pair[1] < pair[0]);
            // constant ratio between neighbors
            assert_abs_diff_eq!(pair[1] / pair[0], GRID_SPAN.powf(1.0 / 19.0), epsilon = 1e-12);
        }
        assert_eq!(default_lambda_grid(0.0, 20), vec![0.0]);
    }

    #[test]
    fn single_value_grid_forces_that_penalty() {
        let (design, targets) = random_problem(9, 30, 3);
        let result = lasso_cv(
            design.view(),
            targets.view(),
            5,
            &[0.5],
            &mut rng(1),
            1e-10,
            5000,
        )
        .unwrap();
        assert_eq!(result.solution.lambda, 0.5);
        assert_eq!(result.cv_mse.len(), 1);
    }

    #[test]
    fn cross_validation_recovers_a_planted_coefficient() {
        use rand_distr::{Distribution, Normal, StandardNormal};
        let mut r = rng(21);
        let n = 200;
        let design = Array::from_shape_fn((n, 3), |_| StandardNormal.sample(&mut r));
        let noise = Normal::new(0.0, 0.01).unwrap();
        let targets: Array1<f64> = design
            .rows()
            .into_iter()
            .map(|row| 3.0 * row[0] + noise.sample(&mut r))
            .collect();
        let top = lambda_max(design.view(), targets.view()).unwrap();
        let grid = default_lambda_grid(top, 20);
        let result = lasso_cv(
            design.view(),
            targets.view(),
            5,
            &grid,
            &mut rng(22),
            1e-10,
            5000,
        )
        .unwrap();
        let w = &result.solution.weights;
        assert!((w[0] - 3.0).abs() < 0.05, "w0 = {}", w[0]);
        assert!(w[1].abs() < 0.05 && w[2].abs() < 0.05, "spurious weights {w:?}");
    }

    #[test]
    fn leave_one_out_errors_match_a_closed_form_oracle() {
        // Univariate data, folds = n: every held-out error can be computed
        // from the 4-point closed form.
        let design = array![[0.0], [1.0], [2.0], [3.0], [4.0]];
        let targets = array![0.1, 1.9, 4.2, 5.8, 8.1];
        let grid = [1.0, 0.1, 0.01];
        let result = lasso_cv(
            design.view(),
            targets.view(),
            5,
            &grid,
            &mut rng(33),
            1e-13,
            20000,
        )
        .unwrap();

        let mut expected_sse = vec![0.0f64; grid.len()];
        for held in 0..5 {
            let keep: Vec<usize> = (0..5).filter(|&i| i != held).collect();
            let xs: Vec<f64> = keep.iter().map(|&i| design[[i, 0]]).collect();
            let ys: Vec<f64> = keep.iter().map(|&i| targets[i]).collect();
            let n = xs.len() as f64;
            let mx = xs.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            let gy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / n;
            let gg: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>() / n;
            for (gi, &lambda) in grid.iter().enumerate() {
                let w = soft_threshold(gy, lambda) / gg;
                let b = my - mx * w;
                let pred = b + w * design[[held, 0]];
                expected_sse[gi] += (targets[held] - pred).powi(2);
            }
        }
        for (gi, &sse) in expected_sse.iter().enumerate() {
            assert_abs_diff_eq!(result.cv_mse[gi], sse / 5.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn ties_go_to_the_stronger_penalty() {
        // A target orthogonal to the feature makes every penalty produce the
        // null model on each training fold, so all grid values tie exactly
        // and the first (largest) must win.
        let design = array![[1.0], [-1.0], [1.0], [-1.0]];
        let targets = array![1.0, 1.0, -1.0, -1.0];
        let result = lasso_cv(
            design.view(),
            targets.view(),
            2,
            &[2.0, 1.0, 0.5],
            &mut rng(5),
            1e-12,
            1000,
        )
        .unwrap();
        assert_eq!(result.solution.lambda, 2.0);
    }

    #[test]
    fn fold_counts_are_validated() {
        let (design, targets) = random_problem(2, 10, 2);
        for folds in [0, 1, 11] {
            let err = lasso_cv(
                design.view(),
                targets.view(),
                folds,
                &[0.1],
                &mut rng(0),
                1e-9,
                100,
            )
            .unwrap_err();
            assert!(matches!(err, Error::InvalidParameter { .. }), "{folds}");
        }
        let err = lasso_cv(
            design.view(),
            targets.view(),
            2,
            &[0.1, 0.5],
            &mut rng(0),
            1e-9,
            100,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { .. }), "ascending grid accepted");
    }

    #[test]
    fn fold_assignment_is_seed_deterministic() {
        let (design, targets) = random_problem(6, 60, 4);
        let grid = default_lambda_grid(lambda_max(design.view(), targets.view()).unwrap(), 10);
        let run = |seed| {
            lasso_cv(
                design.view(),
                targets.view(),
                5,
                &grid,
                &mut rng(seed),
                1e-10,
                2000,
            )
            .unwrap()
        };
        let a = run(40);
        let b = run(40);
        assert_eq!(a.solution.lambda, b.solution.lambda);
        assert_eq!(a.cv_mse, b.cv_mse);
        for j in 0..4 {
            assert_eq!(a.solution.weights[j].to_bits(), b.solution.weights[j].to_bits());
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn stationarity_holds_on_random_problems(seed in 0u64..500, lambda in 0.0f64..2.0) {
                let (design, targets) = random_problem(seed, 20, 3);
                let sol = lasso_fit(design.view(), targets.view(), lambda, 1e-12, 50000).unwrap();
                prop_assume!(sol.converged);
                let kkt = kkt_residual(design.view(), targets.view(), lambda, &sol.weights).unwrap();
                prop_assert!(kkt < 1e-6, "kkt {kkt}");
            }
        }
    }
}
