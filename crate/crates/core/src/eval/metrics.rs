use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::Sign;
use crate::scalar::Scalar;

/// Confusion counts with +1 as the positive class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fn_: usize,
    pub tn: usize,
    pub fp: usize,
}

impl Confusion {
    pub fn record(&mut self, truth: Sign, predicted: Sign) {
        match (truth, predicted) {
            (Sign::Positive, Sign::Positive) => self.tp += 1,
            (Sign::Positive, Sign::Negative) => self.fn_ += 1,
            (Sign::Negative, Sign::Negative) => self.tn += 1,
            (Sign::Negative, Sign::Positive) => self.fp += 1,
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Sign, Sign)>) -> Self {
        let mut c = Confusion::default();
        for (t, p) in pairs {
            c.record(t, p);
        }
        c
    }

    pub fn positives(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> usize {
        self.tn + self.fp
    }

    pub fn total(&self) -> usize {
        self.positives() + self.negatives()
    }
}

/// Mean of the per-class true-positive rates.
pub fn balanced_accuracy<T: Scalar>(c: &Confusion) -> Result<T> {
    if c.positives() == 0 || c.negatives() == 0 {
        return Err(Error::UndefinedMetric(format!(
            "balanced accuracy needs both classes (positives {}, negatives {})",
            c.positives(),
            c.negatives()
        )));
    }
    let tpr = T::from_count(c.tp) / T::from_count(c.positives());
    let tnr = T::from_count(c.tn) / T::from_count(c.negatives());
    Ok((tpr + tnr) / T::lit(2.0))
}

/// Kendall τ_b with tie correction, in O(n log n).
pub fn kendall_tau_b<T: Scalar, K: Ord + Copy>(xs: &[K], ys: &[K]) -> Result<T> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { expected: xs.len(), got: ys.len() });
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::TooFew { needed: 2, got: n });
    }
    let mut pairs: Vec<(K, K)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    pairs.sort_unstable();

    let tied_pairs = |run: usize| (run * (run - 1) / 2) as u128;
    let (mut ties_x, mut ties_xy) = (0u128, 0u128);
    let (mut run_x, mut run_xy) = (1usize, 1usize);
    for i in 1..n {
        if pairs[i].0 == pairs[i - 1].0 {
            run_x += 1;
            if pairs[i].1 == pairs[i - 1].1 {
                run_xy += 1;
            } else {
                ties_xy += tied_pairs(run_xy);
                run_xy = 1;
            }
        } else {
            ties_x += tied_pairs(run_x);
            ties_xy += tied_pairs(run_xy);
            run_x = 1;
            run_xy = 1;
        }
    }
    ties_x += tied_pairs(run_x);
    ties_xy += tied_pairs(run_xy);

    let mut ys_sorted: Vec<K> = pairs.iter().map(|p| p.1).collect();
    let mut buf = ys_sorted.clone();
    let swaps = merge_count(&mut ys_sorted, &mut buf);

    let mut ties_y = 0u128;
    let mut run_y = 1usize;
    for i in 1..n {
        if ys_sorted[i] == ys_sorted[i - 1] {
            run_y += 1;
        } else {
            ties_y += tied_pairs(run_y);
            run_y = 1;
        }
    }
    ties_y += tied_pairs(run_y);

    let n0 = tied_pairs(n);
    if ties_x == n0 || ties_y == n0 {
        return Err(Error::UndefinedMetric("Kendall τ_b of a constant sequence".into()));
    }
    // C − D = n0 − n1 − n2 + n3 − 2·swaps
    let numerator = n0 as i128 - ties_x as i128 - ties_y as i128 + ties_xy as i128 - 2 * swaps as i128;
    let denom = ((n0 - ties_x) as f64).sqrt() * ((n0 - ties_y) as f64).sqrt();
    Ok(T::lit(numerator as f64 / denom))
}

/// Stable merge sort returning the number of inversions.
fn merge_count<K: Ord + Copy>(xs: &mut [K], buf: &mut [K]) -> u128 {
    let n = xs.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut xs[..mid], &mut buf[..mid]) + merge_count(&mut xs[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if xs[j] < xs[i] {
            buf[k] = xs[j];
            swaps += (mid - i) as u128;
            j += 1;
        } else {
            buf[k] = xs[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&xs[i..mid]);
    k += mid - i;
    buf[k..].copy_from_slice(&xs[j..]);
    xs.copy_from_slice(&buf[..n]);
    swaps
}
