//! Increase, Decrease and Swap moves over a portfolio.

use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::portfolio::{rescale_weights, Constraints, Portfolio};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    Increase,
    Decrease,
    Swap,
}

impl MoveKind {
    pub const ALL: [MoveKind; 3] = [MoveKind::Increase, MoveKind::Decrease, MoveKind::Swap];

    pub(crate) fn slot(self) -> usize {
        match self {
            MoveKind::Increase => 0,
            MoveKind::Decrease => 1,
            MoveKind::Swap => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MoveKind::Increase => "increase",
            MoveKind::Decrease => "decrease",
            MoveKind::Swap => "swap",
        }
    }
}

/// A move applied to a portfolio.
///
/// `target` is the increased or decreased asset, or the entering asset of a
/// Swap. `displaced` is the asset that left the portfolio, if any: the
/// minimum-weight asset for Swap, the decreased asset itself when a
/// Decrease pushed it below `epsilon`. `replacement` is the asset that
/// entered in that Decrease case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub kind: MoveKind,
    pub target: usize,
    pub displaced: Option<usize>,
    pub replacement: Option<usize>,
}

fn position(p: &Portfolio<impl Scalar>, asset: usize) -> Result<usize> {
    p.position_of(asset).ok_or(Error::AssetNotInPortfolio(asset))
}

/// Multiplies the weight of asset `i` by `1 + q` and rescales.
pub fn increase_move<T: Scalar>(p: &Portfolio<T>, i: usize, q: T, c: &Constraints<T>) -> Result<(Portfolio<T>, Move)> {
    let pos = position(p, i)?;
    let (assets, mut weights) = p.clone().into_parts();
    weights[pos] *= T::one() + q;
    rescale_weights(&mut weights, c.epsilon, c.delta)?;
    Ok((
        Portfolio::from_parts_unchecked(assets, weights),
        Move {
            kind: MoveKind::Increase,
            target: i,
            displaced: None,
            replacement: None,
        },
    ))
}

/// Multiplies the weight of asset `i` by `1 - q` and rescales.
///
/// If the new weight drops below `epsilon` (always the case for `q >= 1`),
/// `i` is replaced by an asset drawn uniformly from those not held, which
/// takes the raw weight `max(w_i * (1 - q), epsilon)` into the rescale.
pub fn decrease_move<T: Scalar, R: Rng + ?Sized>(
    p: &Portfolio<T>,
    i: usize,
    q: T,
    inst: &Instance<T>,
    c: &Constraints<T>,
    rng: &mut R,
) -> Result<(Portfolio<T>, Move)> {
    let pos = position(p, i)?;
    let (mut assets, mut weights) = p.clone().into_parts();
    let raw = weights[pos] * (T::one() - q);
    let mut mv = Move {
        kind: MoveKind::Decrease,
        target: i,
        displaced: None,
        replacement: None,
    };
    if raw < c.epsilon || raw <= T::zero() {
        let n = inst.n();
        let free = n.saturating_sub(assets.len());
        if free == 0 {
            return Err(Error::NoReplacementAvailable);
        }
        let pick = rng.gen_range(0..free);
        let mut held = vec![false; n];
        for &a in &assets {
            held[a] = true;
        }
        let j = (0..n)
            .filter(|&a| !held[a])
            .nth(pick)
            .expect("complement has `free` members");
        assets[pos] = j;
        weights[pos] = raw.max(c.epsilon).max(T::min_positive_value());
        mv.displaced = Some(i);
        mv.replacement = Some(j);
    } else {
        weights[pos] = raw;
    }
    rescale_weights(&mut weights, c.epsilon, c.delta)?;
    Ok((Portfolio::from_parts_unchecked(assets, weights), mv))
}

/// Position of the minimum-weight asset, ties to the lowest asset id.
pub fn min_weight_position<T: Scalar>(p: &Portfolio<T>) -> Option<usize> {
    let (assets, weights) = (p.assets(), p.weights());
    (0..p.len()).min_by(|&a, &b| {
        weights[a]
            .partial_cmp(&weights[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(assets[a].cmp(&assets[b]))
    })
}

/// Replaces the minimum-weight asset with `j`, keeping every weight.
pub fn swap_move<T: Scalar>(p: &Portfolio<T>, j: usize) -> Result<(Portfolio<T>, Move)> {
    if p.contains(j) {
        return Err(Error::AssetAlreadyInPortfolio(j));
    }
    let pos = min_weight_position(p).ok_or(Error::EmptyNeighborhood)?;
    Ok(swap_at(p, pos, j))
}

fn swap_at<T: Scalar>(p: &Portfolio<T>, pos: usize, j: usize) -> (Portfolio<T>, Move) {
    let (mut assets, weights) = p.clone().into_parts();
    let out = assets[pos];
    assets[pos] = j;
    (
        Portfolio::from_parts_unchecked(assets, weights),
        Move {
            kind: MoveKind::Swap,
            target: j,
            displaced: Some(out),
            replacement: None,
        },
    )
}

/// The neighborhood union: `k` Increase neighbors, then `k` Decrease
/// neighbors (both in portfolio order), then one Swap neighbor per
/// unheld asset in ascending id order. When every asset is held, Decrease
/// moves that would need a replacement are left out.
pub fn enumerate_neighbors<T: Scalar, R: Rng + ?Sized>(
    p: &Portfolio<T>,
    q: T,
    inst: &Instance<T>,
    c: &Constraints<T>,
    rng: &mut R,
) -> Result<Vec<(Portfolio<T>, Move)>> {
    let n = inst.n();
    let k = p.len();
    let mut out = Vec::with_capacity(2 * k + n.saturating_sub(k));
    for &a in p.assets() {
        out.push(increase_move(p, a, q, c)?);
    }
    for &a in p.assets() {
        match decrease_move(p, a, q, inst, c, rng) {
            Ok(nb) => out.push(nb),
            // every asset is held, so a decrease that needs a replacement
            // has no neighbor
            Err(Error::NoReplacementAvailable) => {}
            Err(e) => return Err(e),
        }
    }
    if let Some(pos) = min_weight_position(p) {
        let mut held = vec![false; n];
        for &a in p.assets() {
            held[a] = true;
        }
        for j in (0..n).filter(|&j| !held[j]) {
            out.push(swap_at(p, pos, j));
        }
    }
    Ok(out)
}
