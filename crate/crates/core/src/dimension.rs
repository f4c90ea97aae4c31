//! Box-counting dimension of point clouds and the similarity dimension of
//! contraction-ratio lists.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ifs::chaos::PointCloud;

/// A finite geometric schedule of grid resolutions: `eps_k = eps0 *
/// factor^-k` for `k = 0..levels`. Stands in for the eps -> 0 limit of the
/// box-counting definition.
#[derive(Clone, Copy, Debug)]
pub struct EpsSchedule {
    eps0: f64,
    factor: f64,
    levels: u32,
}

impl EpsSchedule {
    pub fn new(eps0: f64, factor: f64, levels: u32) -> Result<Self> {
        if !(eps0.is_finite() && eps0 > 0.0) {
            return Err(invalid("eps0 must be positive"));
        }
        if !(factor.is_finite() && factor > 1.0) {
            return Err(invalid("factor must exceed 1"));
        }
        if levels < 3 {
            return Err(invalid("a regression needs at least 3 levels"));
        }
        Ok(Self {
            eps0,
            factor,
            levels,
        })
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn epsilons(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.levels).map(|k| self.eps0 * self.factor.powi(-(k as i32)))
    }
}

/// Result of the log-log regression `log N = log lambda + d log(1/eps)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DimensionReport {
    /// Fitted slope: the dimension estimate.
    pub slope: f64,
    /// Fitted intercept: the log of the packing prefactor.
    pub intercept: f64,
    /// Coefficient of determination, or `None` when the counts carry no
    /// variation to explain (all levels equal).
    pub r_squared: Option<f64>,
    /// Largest two-point slope between consecutive levels.
    pub upper_est: f64,
    /// Smallest two-point slope between consecutive levels.
    pub lower_est: f64,
    /// The measured `(eps, count)` pairs, coarsest first.
    pub counts: Vec<(f64, u64)>,
}

impl DimensionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Number of occupied half-open grid cells of edge `epsilon`, with the grid
/// anchored at the min corner of the cloud's bounding box. A point exactly
/// on a cell boundary counts toward the higher cell, except that the
/// bounding box's max corner belongs to the last cell. No tolerance is
/// applied around boundaries: widening cells in either direction spills
/// points hugging a boundary into cells that should stay empty, which
/// biases the counts for sparse sets far more than the occasional honest
/// off-by-one cell does.
pub fn box_count(cloud: &PointCloud, epsilon: f64) -> Result<u64> {
    if cloud.is_empty() {
        return Err(invalid("cannot box-count an empty cloud"));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(invalid("epsilon must be positive"));
    }
    let (lo, hi) = cloud.bbox()?;
    let dim = cloud.dim();
    let mut jmax = [0i64; 2];
    for ax in 0..dim {
        let span = (hi[ax] - lo[ax]) / epsilon;
        jmax[ax] = ((span - 1e-9).ceil() as i64 - 1).max(0);
    }
    let mut cells: HashSet<[i64; 2]> = HashSet::new();
    for p in cloud.points() {
        let mut c = [0i64; 2];
        for ax in 0..dim {
            let j = ((p[ax] - lo[ax]) / epsilon).floor() as i64;
            c[ax] = j.clamp(0, jmax[ax]);
        }
        cells.insert(c);
    }
    Ok(cells.len() as u64)
}

/// Ordinary least-squares fit of `log N(eps)` against `log(1/eps)` over the
/// schedule. A cloud that occupies a single cell at every level yields the
/// degenerate report: slope 0 and undefined r squared.
pub fn box_dimension(cloud: &PointCloud, sched: &EpsSchedule) -> Result<DimensionReport> {
    let mut counts = Vec::with_capacity(sched.levels() as usize);
    for eps in sched.epsilons() {
        counts.push((eps, box_count(cloud, eps)?));
    }
    let xs: Vec<f64> = counts.iter().map(|(e, _)| -(e.ln())).collect();
    let ys: Vec<f64> = counts.iter().map(|(_, n)| (*n as f64).ln()).collect();
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_tot: f64 = ys.iter().map(|y| (y - ybar).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 {
        Some((1.0 - ss_res / ss_tot).clamp(0.0, 1.0))
    } else {
        None
    };
    let mut upper = f64::NEG_INFINITY;
    let mut lower = f64::INFINITY;
    for k in 0..xs.len() - 1 {
        let s = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
        upper = upper.max(s);
        lower = lower.min(s);
    }
    Ok(DimensionReport {
        slope,
        intercept,
        r_squared,
        upper_est: upper,
        lower_est: lower,
        counts,
    })
}

/// The unique `d` with `sum_i ratios[i]^d = 1`, found by bisection. The sum
/// is strictly decreasing in `d`, starts at the number of ratios (at least
/// 2), and falls below 1 once `d` is large enough; the bracket is shrunk to
/// width 1e-12, which leaves a residual well under 1e-10.
pub fn similarity_dimension(ratios: &[f64]) -> Result<f64> {
    if ratios.len() < 2 {
        return Err(invalid("at least two contraction ratios are required"));
    }
    for r in ratios {
        if !(r.is_finite() && *r > 0.0 && *r < 1.0) {
            return Err(invalid(format!(
                "contraction ratios must lie strictly in (0, 1), got {r}"
            )));
        }
    }
    let sum = |d: f64| ratios.iter().map(|r| r.powf(d)).sum::<f64>();
    let mut hi = 1.0;
    while sum(hi) > 1.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(invalid("similarity dimension bracket failed to close"));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if sum(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
