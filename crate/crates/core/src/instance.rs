//! Asset universes and the OR-Library `portN` benchmark format.
//!
//! A `portN` file is a stream of whitespace-separated decimal tokens: the
//! asset count `n`, then `n` pairs `(mean_return, std_dev)`, then triples
//! `(i, j, rho_ij)` with 1-based indices covering every unordered pair
//! including the diagonal. Line breaks carry no meaning.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const CORRELATION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssetStats<T> {
    pub index: usize,
    pub mean_return: T,
    pub std_dev: T,
}

/// Immutable asset universe: per-asset statistics plus the dense covariance
/// matrix. Shared read-only between concurrent solver runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T> {
    stats: Vec<AssetStats<T>>,
    correlation: Vec<T>,
    covariance: Vec<T>,
}

impl<T: Scalar> Instance<T> {
    /// Builds an instance from means, standard deviations and a dense
    /// row-major correlation matrix. Covariance is `rho_ij * s_i * s_j`
    /// off the diagonal and exactly `s_i^2` on it.
    pub fn from_correlations(means: &[T], std_devs: &[T], correlation: Vec<T>) -> Result<Self> {
        let n = means.len();
        if std_devs.len() != n {
            return Err(Error::InconsistentCount(format!(
                "{n} means but {} standard deviations",
                std_devs.len()
            )));
        }
        if n < 2 {
            return Err(Error::InvalidInstance(format!("need at least 2 assets, got {n}")));
        }
        if correlation.len() != n * n {
            return Err(Error::InconsistentCount(format!(
                "correlation matrix has {} entries, expected {}",
                correlation.len(),
                n * n
            )));
        }
        let mut stats = Vec::with_capacity(n);
        for (index, (&mean_return, &std_dev)) in means.iter().zip(std_devs).enumerate() {
            if !mean_return.is_finite() || !std_dev.is_finite() || std_dev < T::zero() {
                return Err(Error::InvalidInstance(format!(
                    "asset {index}: mean {mean_return}, std dev {std_dev}"
                )));
            }
            stats.push(AssetStats {
                index,
                mean_return,
                std_dev,
            });
        }
        let slack = T::lit(CORRELATION_SLACK);
        for i in 0..n {
            for j in 0..n {
                let rho = correlation[i * n + j];
                if i == j && (rho - T::one()).abs() > slack {
                    return Err(Error::DiagonalNotUnit {
                        i,
                        value: rho.to_f64_lossy(),
                        line: 0,
                    });
                }
                if !(rho.abs() <= T::one() + slack) {
                    return Err(Error::CorrelationOutOfRange {
                        i,
                        j,
                        value: rho.to_f64_lossy(),
                        line: 0,
                    });
                }
                if correlation[j * n + i] != rho {
                    return Err(Error::InvalidInstance(format!(
                        "correlation matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let mut covariance = vec![T::zero(); n * n];
        for i in 0..n {
            let si = stats[i].std_dev;
            covariance[i * n + i] = si * si;
            for j in (i + 1)..n {
                let c = correlation[i * n + j] * si * stats[j].std_dev;
                covariance[i * n + j] = c;
                covariance[j * n + i] = c;
            }
        }
        Ok(Self {
            stats,
            correlation,
            covariance,
        })
    }

    /// Builds an instance from means and a covariance matrix (row-major).
    /// Standard deviations and correlations are derived from it; a zero
    /// variance gets correlation 0 against every other asset.
    pub fn from_covariance(means: &[T], covariance: Vec<T>) -> Result<Self> {
        let n = means.len();
        if covariance.len() != n * n {
            return Err(Error::InconsistentCount(format!(
                "covariance matrix has {} entries, expected {}",
                covariance.len(),
                n * n
            )));
        }
        let mut std_devs = Vec::with_capacity(n);
        for i in 0..n {
            let v = covariance[i * n + i];
            if !(v >= T::zero()) {
                return Err(Error::InvalidInstance(format!("negative variance for asset {i}")));
            }
            std_devs.push(v.sqrt());
        }
        let mut correlation = vec![T::zero(); n * n];
        for i in 0..n {
            correlation[i * n + i] = T::one();
            for j in (i + 1)..n {
                let denom = std_devs[i] * std_devs[j];
                let rho = if denom > T::zero() {
                    let upper = covariance[i * n + j];
                    let lower = covariance[j * n + i];
                    if upper != lower {
                        return Err(Error::InvalidInstance(format!(
                            "covariance matrix is not symmetric at ({i}, {j})"
                        )));
                    }
                    (upper / denom).max(-T::one()).min(T::one())
                } else {
                    T::zero()
                };
                correlation[i * n + j] = rho;
                correlation[j * n + i] = rho;
            }
        }
        let mut inst = Self::from_correlations(means, &std_devs, correlation)?;
        // keep the caller's off-diagonal entries bit-for-bit
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    inst.covariance[i * n + j] = covariance[i * n + j];
                }
            }
        }
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.stats.len()
    }

    pub fn stats(&self) -> &[AssetStats<T>] {
        &self.stats
    }

    #[inline]
    pub fn mean_return(&self, i: usize) -> T {
        self.stats[i].mean_return
    }

    #[inline]
    pub fn std_dev(&self, i: usize) -> T {
        self.stats[i].std_dev
    }

    /// Checked covariance accessor.
    pub fn covariance_of(&self, i: usize, j: usize) -> Result<T> {
        let n = self.n();
        for index in [i, j] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, len: n });
            }
        }
        Ok(self.covariance[i * n + j])
    }

    /// Unchecked covariance lookup for hot loops; panics on a bad index.
    #[inline]
    pub fn cov(&self, i: usize, j: usize) -> T {
        self.covariance[i * self.n() + j]
    }

    /// Row-major `n x n` covariance matrix.
    pub fn covariance(&self) -> &[T] {
        &self.covariance
    }

    pub fn correlation(&self, i: usize, j: usize) -> T {
        self.correlation[i * self.n() + j]
    }

    pub fn max_mean_return(&self) -> T {
        self.stats.iter().map(|s| s.mean_return).fold(T::neg_infinity(), T::max)
    }

    pub fn min_mean_return(&self) -> T {
        self.stats.iter().map(|s| s.mean_return).fold(T::infinity(), T::min)
    }
}

struct Token<'a> {
    text: &'a str,
    line: usize,
    ordinal: usize,
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        for word in line.split_whitespace() {
            out.push(Token {
                text: word,
                line: line_no + 1,
                ordinal: out.len() + 1,
            });
        }
    }
    out
}

fn malformed(tok: &Token<'_>, reason: impl Into<String>) -> Error {
    Error::MalformedFile {
        line: tok.line,
        token: tok.ordinal,
        reason: reason.into(),
    }
}

fn parse_real<T: Scalar>(tok: &Token<'_>) -> Result<T> {
    let v: f64 = tok
        .text
        .parse()
        .map_err(|_| malformed(tok, format!("`{}` is not a number", tok.text)))?;
    if !v.is_finite() {
        return Err(malformed(tok, format!("`{}` is not finite", tok.text)));
    }
    Ok(T::lit(v))
}

fn parse_index(tok: &Token<'_>, n: usize) -> Result<usize> {
    let idx: usize = tok
        .text
        .parse()
        .map_err(|_| malformed(tok, format!("`{}` is not an asset index", tok.text)))?;
    if idx == 0 || idx > n {
        return Err(malformed(tok, format!("asset index {idx} outside 1..={n}")));
    }
    Ok(idx - 1)
}

/// Parses an OR-Library `portN` file.
pub fn parse_orlib<T: Scalar>(text: &str) -> Result<Instance<T>> {
    let tokens = tokenize(text);
    let first = tokens.first().ok_or(Error::MalformedFile {
        line: 1,
        token: 1,
        reason: "empty input".into(),
    })?;
    let n: usize = first
        .text
        .parse()
        .map_err(|_| malformed(first, format!("asset count `{}` is not an integer", first.text)))?;
    if n < 2 {
        return Err(Error::InvalidInstance(format!("need at least 2 assets, got {n}")));
    }

    let pairs = n * (n + 1) / 2;
    let needed = 1 + 2 * n + 3 * pairs;
    if tokens.len() < needed {
        return Err(Error::InconsistentCount(format!(
            "declared {n} assets needs {needed} tokens ({n} stat pairs, {pairs} correlation \
             triples) but the file has {}",
            tokens.len()
        )));
    }

    let mut means = Vec::with_capacity(n);
    let mut std_devs = Vec::with_capacity(n);
    for a in 0..n {
        let mean: T = parse_real(&tokens[1 + 2 * a])?;
        let sd_tok = &tokens[2 + 2 * a];
        let sd: T = parse_real(sd_tok)?;
        if sd < T::zero() {
            return Err(malformed(sd_tok, "negative standard deviation"));
        }
        means.push(mean);
        std_devs.push(sd);
    }

    let rest = &tokens[1 + 2 * n..];
    if !rest.len().is_multiple_of(3) {
        let tok = &rest[rest.len() - rest.len() % 3];
        return Err(malformed(tok, "trailing tokens do not form an (i, j, rho) triple"));
    }

    let slack = T::lit(CORRELATION_SLACK);
    let mut correlation: Vec<Option<T>> = vec![None; n * n];
    for triple in rest.chunks_exact(3) {
        let i = parse_index(&triple[0], n)?;
        let j = parse_index(&triple[1], n)?;
        let rho: T = parse_real(&triple[2])?;
        let line = triple[2].line;
        if rho.abs() > T::one() + slack {
            return Err(Error::CorrelationOutOfRange {
                i,
                j,
                value: rho.to_f64_lossy(),
                line,
            });
        }
        if i == j && (rho - T::one()).abs() > slack {
            return Err(Error::DiagonalNotUnit {
                i,
                value: rho.to_f64_lossy(),
                line,
            });
        }
        for (a, b) in [(i, j), (j, i)] {
            match correlation[a * n + b] {
                Some(prev) if prev != rho => {
                    return Err(Error::ConflictingCorrelation { i, j, line });
                }
                _ => correlation[a * n + b] = Some(rho),
            }
        }
    }

    let mut dense = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let rho = correlation[i * n + j].ok_or(Error::MissingCorrelation { i, j })?;
            dense.push(rho);
        }
    }
    Instance::from_correlations(&means, &std_devs, dense)
}

/// Serializes an instance in the `portN` layout: one stat pair per line,
/// then the upper triangle (including the diagonal) one triple per line.
/// Values use the shortest representation that parses back exactly.
pub fn write_orlib<T: Scalar>(inst: &Instance<T>) -> String {
    let n = inst.n();
    let mut out = String::new();
    let _ = writeln!(out, "{n}");
    for s in inst.stats() {
        let _ = writeln!(out, "{} {}", s.mean_return, s.std_dev);
    }
    for i in 0..n {
        for j in i..n {
            let _ = writeln!(out, "{} {} {}", i + 1, j + 1, inst.correlation(i, j));
        }
    }
    out
}
