#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use tabu_portfolio::{parse_orlib, Constraints, Instance};

/// Benchmark files, in the order Hang Seng, DAX, FTSE, S&P, Nikkei.
pub const BENCHMARKS: [(&str, usize); 5] = [
    ("port1.txt", 31),
    ("port2.txt", 85),
    ("port3.txt", 89),
    ("port4.txt", 98),
    ("port5.txt", 225),
];

pub fn data_dir() -> PathBuf {
    std::env::var_os("TABU_PORTFOLIO_DATA")
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            // both crates that include this module sit two levels below the root
            let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
            manifest.ancestors().nth(2).unwrap_or(manifest).join("data")
        })
}

pub fn load_benchmark(file: &str) -> Result<Instance<f64>, String> {
    let path = data_dir().join(file);
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_orlib(&text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `A A' / m` for a random `n x m` factor, so the covariance is PSD and
/// singular whenever `m < n`. Volatilities land in the range of weekly
/// equity returns.
pub fn random_psd_instance(rng: &mut impl Rng, n: usize) -> Instance<f64> {
    let m = rng.gen_range(1..=n + 2);
    let a: Vec<f64> = (0..n * m).map(|_| rng.gen_range(-0.08..0.08)).collect();
    let mut cov = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..m).map(|t| a[i * m + t] * a[j * m + t]).sum::<f64>() / m as f64;
            cov[i * n + j] = s;
            cov[j * n + i] = s;
        }
    }
    for i in 0..n {
        cov[i * n + i] += 1e-6;
    }
    let means: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.005..0.02)).collect();
    Instance::from_covariance(&means, cov).expect("valid random instance")
}

pub fn variance(inst: &Instance<f64>, x: &[f64]) -> f64 {
    let n = inst.n();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += x[i] * x[j] * inst.cov(i, j);
        }
    }
    s
}

pub fn mean(inst: &Instance<f64>, x: &[f64]) -> f64 {
    (0..inst.n()).map(|i| x[i] * inst.mean_return(i)).sum()
}

/// Smallest variance over the simplex grid with spacing `1 / steps`,
/// subject to `mu' x >= target`, for every target at once. Targets with no
/// feasible grid point get `f64::INFINITY`.
pub fn grid_min_variance(inst: &Instance<f64>, targets: &[f64], steps: usize) -> Vec<f64> {
    let n = inst.n();
    let h = 1.0 / steps as f64;
    let cov: Vec<f64> = inst.covariance().to_vec();
    let mu: Vec<f64> = (0..n).map(|i| inst.mean_return(i)).collect();

    fn walk(
        pos: usize,
        left: usize,
        counts: &mut Vec<usize>,
        ctx: &(usize, f64, &[f64], &[f64], &[f64]),
        best: &mut Vec<f64>,
    ) {
        let (n, h, cov, mu, targets) = *ctx;
        if pos == n - 1 {
            counts[pos] = left;
            let x: Vec<f64> = counts.iter().map(|&c| c as f64 * h).collect();
            let ret: f64 = (0..n).map(|i| x[i] * mu[i]).sum();
            let mut var = 0.0;
            for i in 0..n {
                if x[i] == 0.0 {
                    continue;
                }
                let mut row = 0.0;
                for j in 0..n {
                    row += cov[i * n + j] * x[j];
                }
                var += x[i] * row;
            }
            for (b, &t) in best.iter_mut().zip(targets) {
                if ret >= t - 1e-12 && var < *b {
                    *b = var;
                }
            }
            return;
        }
        for c in 0..=left {
            counts[pos] = c;
            walk(pos + 1, left - c, counts, ctx, best);
        }
    }

    // split on the first coordinate for parallelism
    (0..=steps)
        .into_par_iter()
        .map(|first| {
            let mut best = vec![f64::INFINITY; targets.len()];
            let mut counts = vec![0usize; n];
            counts[0] = first;
            if n == 1 {
                if first == steps {
                    let ctx = (n, h, &cov[..], &mu[..], targets);
                    walk(0, steps, &mut counts, &ctx, &mut best);
                }
                return best;
            }
            let ctx = (n, h, &cov[..], &mu[..], targets);
            walk(1, steps - first, &mut counts, &ctx, &mut best);
            best
        })
        .reduce(
            || vec![f64::INFINITY; targets.len()],
            |a, b| a.iter().zip(&b).map(|(x, y)| x.min(*y)).collect(),
        )
}

/// Best objective over every pair of distinct assets with the first weight
/// on a grid of spacing `h`, both weights within `[epsilon, delta]`.
pub fn pair_grid_optimum(inst: &Instance<f64>, c: &Constraints<f64>, h: f64) -> f64 {
    let n = inst.n();
    let steps = (1.0 / h).round() as usize;
    let mut best = f64::INFINITY;
    for a in 0..n {
        for b in a + 1..n {
            for s in 0..=steps {
                let w = s as f64 * h;
                let u = 1.0 - w;
                if w < c.epsilon - 1e-12 || w > c.delta + 1e-12 || u < c.epsilon - 1e-12 || u > c.delta + 1e-12 {
                    continue;
                }
                let var = w * w * inst.cov(a, a) + 2.0 * w * u * inst.cov(a, b) + u * u * inst.cov(b, b);
                let ret = w * inst.mean_return(a) + u * inst.mean_return(b);
                let obj = c.lambda * var - (1.0 - c.lambda) * ret;
                best = best.min(obj);
            }
        }
    }
    best
}

/// A fixed five-asset universe with distinct risk/return profiles.
pub fn five_assets() -> Instance<f64> {
    let means = [0.010, 0.015, 0.020, 0.008, 0.025];
    let sds = [0.04, 0.05, 0.07, 0.03, 0.10];
    #[rustfmt::skip]
    let corr = vec![
        1.0, 0.3, 0.2, 0.1, 0.4,
        0.3, 1.0, 0.5, 0.0, 0.3,
        0.2, 0.5, 1.0, -0.2, 0.6,
        0.1, 0.0, -0.2, 1.0, 0.1,
        0.4, 0.3, 0.6, 0.1, 1.0,
    ];
    Instance::from_correlations(&means, &sds, corr).expect("valid fixed instance")
}

/// `n` assets with one-factor correlations.
pub fn synthetic_universe(seed: u64, n: usize) -> Instance<f64> {
    let mut r = rng(seed);
    let beta: Vec<f64> = (0..n).map(|_| r.gen_range(0.2..0.9)).collect();
    let sds: Vec<f64> = (0..n).map(|_| r.gen_range(0.02..0.08)).collect();
    let means: Vec<f64> = (0..n).map(|i| 0.002 + 0.1 * sds[i] * r.gen_range(0.3..1.2)).collect();
    let mut corr = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            corr[i * n + j] = if i == j { 1.0 } else { beta[i] * beta[j] };
        }
    }
    Instance::from_correlations(&means, &sds, corr).expect("valid synthetic instance")
}
