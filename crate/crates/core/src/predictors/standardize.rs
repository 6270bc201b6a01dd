use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Scalar;

/// Per-column centering and scaling fitted on training rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Standardizer<T: Scalar> {
    pub mean: Vec<T>,
    pub std: Vec<T>,
}

/// Population moments per column. Columns whose spread is at rounding level
/// get a zero std and transform to 0.
pub fn fit_standardizer<T: Scalar>(rows: &[Vec<T>]) -> Result<Standardizer<T>> {
    let first = rows.first().ok_or(Error::EmptyTrainingSet)?;
    let d = first.len();
    let n = T::from_count(rows.len());
    let mut mean = vec![T::zero(); d];
    for row in rows {
        if row.len() != d {
            return Err(Error::LengthMismatch { expected: d, got: row.len() });
        }
        for (m, &x) in mean.iter_mut().zip(row) {
            *m = *m + x;
        }
    }
    mean.iter_mut().for_each(|m| *m = *m / n);
    let mut var = vec![T::zero(); d];
    for row in rows {
        for ((s, &x), &m) in var.iter_mut().zip(row).zip(&mean) {
            *s = *s + (x - m) * (x - m);
        }
    }
    let guard = T::epsilon() * T::lit(64.0);
    let std = var
        .into_iter()
        .zip(&mean)
        .map(|(v, &m)| {
            let s = (v / n).sqrt();
            if s <= guard * m.abs().max(T::one()) {
                T::zero()
            } else {
                s
            }
        })
        .collect();
    Ok(Standardizer { mean, std })
}

impl<T: Scalar> Standardizer<T> {
    pub fn width(&self) -> usize {
        self.mean.len()
    }

    pub fn transform(&self, row: &[T]) -> Result<Vec<T>> {
        if row.len() != self.width() {
            return Err(Error::LengthMismatch { expected: self.width(), got: row.len() });
        }
        Ok(row
            .iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((&x, &m), &s)| if s == T::zero() { T::zero() } else { (x - m) / s })
            .collect())
    }

    pub fn transform_all(&self, rows: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
        rows.iter().map(|r| self.transform(r)).collect()
    }
}
