//! Minimum-variance portfolios over the long-only simplex.
//!
//! Solves `min x' S x` subject to `sum x = 1`, `x >= 0` and optionally
//! `mu' x = target` with a primal active-set method on the bound
//! constraints. Each iteration solves the equality-constrained subproblem
//! restricted to the free variables through its dense KKT system.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::Scalar;

/// Default KKT tolerance.
pub const DEFAULT_QP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution<T> {
    pub weights: Vec<T>,
    pub variance: T,
    pub ret: T,
    pub iterations: usize,
    /// Largest violation among stationarity on free variables and sign of
    /// bound multipliers.
    pub kkt_residual: T,
}

/// Minimum-variance weights with expected return at least `mu_p`.
pub fn solve_qp_min_variance<T: Scalar>(inst: &Instance<T>, mu_p: T, tol: T) -> Result<Vec<T>> {
    solve_qp(inst, mu_p, tol).map(|s| s.weights)
}

/// As [`solve_qp_min_variance`], with diagnostics.
pub fn solve_qp<T: Scalar>(inst: &Instance<T>, mu_p: T, tol: T) -> Result<QpSolution<T>> {
    let (lo, hi) = (inst.min_mean_return(), inst.max_mean_return());
    let slack = T::lit(1e-12) * (T::one() + lo.abs().max(hi.abs()));
    if !(mu_p >= lo - slack && mu_p <= hi + slack) {
        return Err(Error::Infeasible {
            target: mu_p.to_f64_lossy(),
            min: lo.to_f64_lossy(),
            max: hi.to_f64_lossy(),
        });
    }
    let gmv = global_min_variance(inst, tol)?;
    if gmv.ret >= mu_p {
        return Ok(gmv);
    }
    let start = two_asset_start(inst, mu_p.min(hi));
    solve_with_target(inst, mu_p.min(hi), start, tol)
}

/// Minimum-variance portfolio with no return requirement.
pub fn global_min_variance<T: Scalar>(inst: &Instance<T>, tol: T) -> Result<QpSolution<T>> {
    let n = inst.n();
    let start_asset = (0..n)
        .min_by(|&a, &b| {
            inst.cov(a, a)
                .partial_cmp(&inst.cov(b, b))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("instance has assets");
    let mut x = vec![T::zero(); n];
    x[start_asset] = T::one();
    ActiveSet::new(inst, None, tol).run(x).map(|(sol, _, _)| sol)
}

/// Minimum variance at exactly `mu' x = target`, starting from a feasible
/// `start`.
pub(crate) fn solve_with_target<T: Scalar>(
    inst: &Instance<T>,
    target: T,
    start: Vec<T>,
    tol: T,
) -> Result<QpSolution<T>> {
    let hi = inst.max_mean_return();
    if target >= hi - top_slack(hi) {
        return top_corner(inst, tol);
    }
    ActiveSet::new(inst, Some(target), tol)
        .run(start)
        .map(|(sol, _, _)| sol)
}

fn top_slack<T: Scalar>(hi: T) -> T {
    T::lit(1e-12) * (T::one() + hi.abs())
}

/// The largest attainable return is met only by mixes of the assets tied
/// at the top mean, so that end of the frontier is the minimum-variance mix
/// of those assets. Solving it directly avoids the degenerate vertex the
/// general iteration would stall on.
fn top_corner<T: Scalar>(inst: &Instance<T>, tol: T) -> Result<QpSolution<T>> {
    let n = inst.n();
    let hi = inst.max_mean_return();
    let slack = top_slack(hi);
    let tied: Vec<bool> = (0..n).map(|j| inst.mean_return(j) >= hi - slack).collect();
    let mut x = vec![T::zero(); n];
    x[argmax_mean(inst)] = T::one();
    let mut solver = ActiveSet::new(inst, None, tol);
    solver.allowed = tied.clone();
    let (sol, y_top, _) = solver.run(x)?;

    // any return multiplier at least this large makes the bound
    // multipliers of the lower-mean assets non-negative
    let g = solver.gradient(&sol.weights);
    let mut y_ret = T::zero();
    for j in (0..n).filter(|&j| !tied[j]) {
        y_ret = y_ret.max((y_top - g[j]) / (hi - inst.mean_return(j)));
    }
    let y_sum = y_top - y_ret * hi;
    let free: Vec<bool> = sol.weights.iter().map(|&w| w > T::zero()).collect();
    let kkt = kkt_residual(inst, &sol.weights, &g, &free, y_sum, y_ret);
    Ok(QpSolution {
        kkt_residual: kkt,
        ..sol
    })
}

/// Feasible point with return `target`: a mix of the lowest- and
/// highest-mean assets.
pub(crate) fn two_asset_start<T: Scalar>(inst: &Instance<T>, target: T) -> Vec<T> {
    let n = inst.n();
    let lo = (0..n)
        .min_by(|&a, &b| {
            inst.mean_return(a)
                .partial_cmp(&inst.mean_return(b))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("instance has assets");
    let hi = argmax_mean(inst);
    let mut x = vec![T::zero(); n];
    let span = inst.mean_return(hi) - inst.mean_return(lo);
    if span <= T::zero() {
        x[hi] = T::one();
        return x;
    }
    let theta = ((target - inst.mean_return(lo)) / span).max(T::zero()).min(T::one());
    x[hi] = theta;
    x[lo] += T::one() - theta;
    x
}

/// Highest-mean asset, lowest variance among ties.
pub(crate) fn argmax_mean<T: Scalar>(inst: &Instance<T>) -> usize {
    let hi = inst.max_mean_return();
    (0..inst.n())
        .filter(|&a| inst.mean_return(a) == hi)
        .min_by(|&a, &b| {
            inst.cov(a, a)
                .partial_cmp(&inst.cov(b, b))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("instance has assets")
}

struct ActiveSet<'a, T> {
    inst: &'a Instance<T>,
    target: Option<T>,
    tol: T,
    /// Variables that may leave zero.
    allowed: Vec<bool>,
}

impl<'a, T: Scalar> ActiveSet<'a, T> {
    fn new(inst: &'a Instance<T>, target: Option<T>, tol: T) -> Self {
        Self {
            inst,
            target,
            tol,
            allowed: vec![true; inst.n()],
        }
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        let n = self.inst.n();
        let two = T::lit(2.0);
        (0..n)
            .map(|i| {
                let mut s = T::zero();
                for (j, &xj) in x.iter().enumerate() {
                    if xj != T::zero() {
                        s += self.inst.cov(i, j) * xj;
                    }
                }
                two * s
            })
            .collect()
    }

    /// Whether the return row adds information on the free set.
    fn return_row_active(&self, free: &[usize]) -> bool {
        if self.target.is_none() {
            return false;
        }
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for &j in free {
            let m = self.inst.mean_return(j);
            lo = lo.min(m);
            hi = hi.max(m);
        }
        let scale = T::one() + lo.abs().max(hi.abs());
        hi - lo > T::lit(1e-12) * scale
    }

    /// Solves the KKT system on the free set. Returns the step on the free
    /// variables and the equality multipliers `(sum, return)`.
    fn subproblem(&self, free: &[usize], g: &[T]) -> Option<(Vec<T>, T, T)> {
        let with_ret = self.return_row_active(free);
        let f = free.len();
        let m = f + 1 + usize::from(with_ret);
        let two = T::lit(2.0);
        let mut base = vec![T::zero(); m * m];
        let mut rhs = vec![T::zero(); m];
        for (a, &i) in free.iter().enumerate() {
            for (b, &j) in free.iter().enumerate() {
                base[a * m + b] = two * self.inst.cov(i, j);
            }
            base[a * m + f] = T::one();
            base[f * m + a] = T::one();
            if with_ret {
                let mu = self.inst.mean_return(i);
                base[a * m + f + 1] = mu;
                base[(f + 1) * m + a] = mu;
            }
            rhs[a] = -g[i];
        }
        let trace: T = free.iter().map(|&i| self.inst.cov(i, i)).sum();
        let mut ridge = T::zero();
        for _ in 0..4 {
            let mut mat = base.clone();
            for a in 0..f {
                mat[a * m + a] += ridge;
            }
            if let Some(sol) = solve_dense(mat, rhs.clone(), m) {
                // [G A'; A 0][p; z] = [-g; 0]  =>  g = A'(-z) on the free set
                let p = sol[..f].to_vec();
                let y_sum = -sol[f];
                let y_ret = if with_ret { -sol[f + 1] } else { T::zero() };
                return Some((p, y_sum, y_ret));
            }
            ridge = if ridge == T::zero() {
                T::lit(1e-12) * (trace / T::from_usize_lossy(f.max(1)) + T::min_positive_value())
            } else {
                ridge * T::lit(1e3)
            };
        }
        None
    }

    /// Returns the solution with its sum and return multipliers.
    fn run(&self, mut x: Vec<T>) -> Result<(QpSolution<T>, T, T)> {
        let n = self.inst.n();
        let mut free: Vec<bool> = x.iter().map(|&v| v > T::zero()).collect();
        let max_iter = 20 * n + 200;
        let step_tol = T::lit(1e-11);
        let mut at_subproblem_min = false;
        // consecutive iterations without movement; past `n` the entering
        // variable is chosen by lowest index to rule out cycling
        let mut stalled = 0usize;

        for iteration in 1..=max_iter {
            let free_idx: Vec<usize> = (0..n).filter(|&j| free[j]).collect();
            let g = self.gradient(&x);
            let (p, y_sum, y_ret) = self.subproblem(&free_idx, &g).ok_or(Error::NotConverged {
                iterations: iteration,
                residual: f64::INFINITY,
            })?;
            let p_norm = p.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));

            if at_subproblem_min || p_norm <= step_tol {
                at_subproblem_min = false;
                // bound multipliers: lambda_j = g_j - y_sum - y_ret * mu_j
                let bland = stalled > n;
                let mut entering: Option<(usize, T)> = None;
                for j in (0..n).filter(|&j| !free[j] && self.allowed[j]) {
                    let lam = g[j] - y_sum - y_ret * self.inst.mean_return(j);
                    if lam >= -self.tol {
                        continue;
                    }
                    if entering.is_none_or(|(_, w)| lam < w) {
                        entering = Some((j, lam));
                    }
                    if bland {
                        break;
                    }
                }
                match entering {
                    Some((j, _)) => {
                        free[j] = true;
                        stalled += 1;
                        continue;
                    }
                    None => return Ok((self.finish(x, iteration, y_sum, y_ret, &free), y_sum, y_ret)),
                }
            }

            let mut alpha = T::one();
            let mut blocking = None;
            for (a, &j) in free_idx.iter().enumerate() {
                if p[a] < -step_tol {
                    let ratio = -x[j] / p[a];
                    if ratio < alpha {
                        alpha = ratio;
                        blocking = Some(j);
                    }
                }
            }
            for (a, &j) in free_idx.iter().enumerate() {
                x[j] += alpha * p[a];
                if x[j] < T::zero() {
                    x[j] = T::zero();
                }
            }
            if alpha > T::zero() {
                stalled = 0;
            } else {
                stalled += 1;
            }
            match blocking {
                Some(j) => {
                    x[j] = T::zero();
                    free[j] = false;
                }
                None => at_subproblem_min = true,
            }
        }
        let residual = self.residual(&x, &free);
        Err(Error::NotConverged {
            iterations: max_iter,
            residual: residual.to_f64_lossy(),
        })
    }

    fn residual(&self, x: &[T], free: &[bool]) -> T {
        let free_idx: Vec<usize> = (0..x.len()).filter(|&j| free[j]).collect();
        let g = self.gradient(x);
        match self.subproblem(&free_idx, &g) {
            Some((_, y_sum, y_ret)) => kkt_residual(self.inst, x, &g, free, y_sum, y_ret),
            None => T::infinity(),
        }
    }

    fn finish(&self, x: Vec<T>, iterations: usize, y_sum: T, y_ret: T, free: &[bool]) -> QpSolution<T> {
        let g = self.gradient(&x);
        let kkt = kkt_residual(self.inst, &x, &g, free, y_sum, y_ret);
        let (variance, ret) = moments(self.inst, &x);
        QpSolution {
            weights: x,
            variance,
            ret,
            iterations,
            kkt_residual: kkt,
        }
    }
}

fn kkt_residual<T: Scalar>(inst: &Instance<T>, x: &[T], g: &[T], free: &[bool], y_sum: T, y_ret: T) -> T {
    let mut worst = T::zero();
    for j in 0..x.len() {
        let lam = g[j] - y_sum - y_ret * inst.mean_return(j);
        let violation = if free[j] {
            // stationarity, or complementarity for a free variable at zero
            if x[j] > T::zero() {
                lam.abs()
            } else {
                (-lam).max(T::zero())
            }
        } else {
            (-lam).max(T::zero())
        };
        worst = worst.max(violation);
    }
    worst
}

/// Variance and expected return of a dense weight vector.
pub fn moments<T: Scalar>(inst: &Instance<T>, x: &[T]) -> (T, T) {
    let mut var = T::zero();
    let mut ret = T::zero();
    for (i, &xi) in x.iter().enumerate() {
        if xi == T::zero() {
            continue;
        }
        ret += inst.mean_return(i) * xi;
        let mut row = T::zero();
        for (j, &xj) in x.iter().enumerate() {
            if xj != T::zero() {
                row += inst.cov(i, j) * xj;
            }
        }
        var += xi * row;
    }
    (var, ret)
}

/// Gaussian elimination with partial pivoting; `None` on a (near-)singular
/// matrix.
fn solve_dense<T: Scalar>(mut a: Vec<T>, mut b: Vec<T>, m: usize) -> Option<Vec<T>> {
    let scale = a.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    if scale == T::zero() {
        return None;
    }
    let tiny = scale * T::epsilon() * T::lit(16.0);
    for col in 0..m {
        let pivot = (col..m).max_by(|&r, &s| {
            a[r * m + col]
                .abs()
                .partial_cmp(&a[s * m + col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot * m + col].abs() <= tiny {
            return None;
        }
        if pivot != col {
            for k in 0..m {
                a.swap(col * m + k, pivot * m + k);
            }
            b.swap(col, pivot);
        }
        let d = a[col * m + col];
        for r in (col + 1)..m {
            let factor = a[r * m + col] / d;
            if factor == T::zero() {
                continue;
            }
            for k in col..m {
                let v = a[col * m + k];
                a[r * m + k] -= factor * v;
            }
            let bv = b[col];
            b[r] -= factor * bv;
        }
    }
    let mut x = vec![T::zero(); m];
    for r in (0..m).rev() {
        let mut s = b[r];
        for k in (r + 1)..m {
            s -= a[r * m + k] * x[k];
        }
        x[r] = s / a[r * m + r];
    }
    Some(x)
}
