use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::Sign;
use crate::scalar::{dot, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams { lambda: 1e-4, epochs: 50, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassWeighting {
    /// `c_y = N / (2 N_y)`
    Balanced,
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ClassWeights<T: Scalar> {
    pub positive: T,
    pub negative: T,
}

impl<T: Scalar> ClassWeights<T> {
    pub fn of(&self, y: Sign) -> T {
        match y {
            Sign::Positive => self.positive,
            Sign::Negative => self.negative,
        }
    }

    fn compute(labels: &[Sign], weighting: ClassWeighting) -> Self {
        match weighting {
            ClassWeighting::Uniform => ClassWeights { positive: T::one(), negative: T::one() },
            ClassWeighting::Balanced => {
                let n = T::from_count(labels.len());
                let pos = T::from_count(labels.iter().filter(|s| s.is_positive()).count());
                let neg = n - pos;
                let two = T::lit(2.0);
                ClassWeights { positive: n / (two * pos), negative: n / (two * neg) }
            }
        }
    }
}

/// Linear decision function `w·x + b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LinearModel<T: Scalar> {
    pub weights: Vec<T>,
    pub bias: T,
    pub class_weights: ClassWeights<T>,
    pub params: SvmParams,
}

impl<T: Scalar> LinearModel<T> {
    pub fn margin(&self, row: &[T]) -> Result<T> {
        if row.len() != self.weights.len() {
            return Err(Error::LengthMismatch { expected: self.weights.len(), got: row.len() });
        }
        Ok(dot(&self.weights, row) + self.bias)
    }

    /// Sign of the margin; a zero margin goes to +1.
    pub fn predict(&self, row: &[T]) -> Result<Sign> {
        Ok(if self.margin(row)? >= T::zero() { Sign::Positive } else { Sign::Negative })
    }
}

/// `(λ/2)(‖w‖² + b²) + (1/N) Σ c_y max(0, 1 − y(w·x + b))`
pub fn svm_objective<T: Scalar>(
    weights: &[T],
    bias: T,
    rows: &[Vec<T>],
    labels: &[Sign],
    lambda: f64,
    class_weights: &ClassWeights<T>,
) -> T {
    let reg = T::lit(lambda / 2.0) * (dot(weights, weights) + bias * bias);
    let loss: T = rows
        .iter()
        .zip(labels)
        .map(|(x, &y)| {
            let yv = T::lit(y.value() as f64);
            class_weights.of(y) * (T::one() - yv * (dot(weights, x) + bias)).max(T::zero())
        })
        .sum();
    reg + loss / T::from_count(rows.len())
}

/// Class-weighted Pegasos: seeded shuffle each epoch, step `1/(λt)`, bias
/// carried as the weight of a constant feature. Returns the average of the
/// iterates over the second half of all steps.
pub fn train_svm<T: Scalar>(
    rows: &[Vec<T>],
    labels: &[Sign],
    params: &SvmParams,
    weighting: ClassWeighting,
) -> Result<LinearModel<T>> {
    if rows.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if rows.len() != labels.len() {
        return Err(Error::LengthMismatch { expected: rows.len(), got: labels.len() });
    }
    let d = rows[0].len();
    if let Some(bad) = rows.iter().find(|r| r.len() != d) {
        return Err(Error::LengthMismatch { expected: d, got: bad.len() });
    }
    let positives = labels.iter().filter(|s| s.is_positive()).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::DegenerateTraining("both classes must be present".into()));
    }
    if params.lambda.is_nan() || params.lambda <= 0.0 || params.epochs == 0 {
        return Err(Error::DegenerateTraining(format!(
            "need λ > 0 and at least one epoch, got λ = {} and {} epochs",
            params.lambda, params.epochs
        )));
    }

    let class_weights = ClassWeights::<T>::compute(labels, weighting);
    let lambda = T::lit(params.lambda);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut order: Vec<usize> = (0..rows.len()).collect();

    // z = (w, b)
    let mut z = vec![T::zero(); d + 1];
    let mut avg = vec![T::zero(); d + 1];
    let total_steps = params.epochs * rows.len();
    let average_from = total_steps / 2;
    let mut t = 0usize;
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let x = &rows[i];
            let y = labels[i];
            let yv = T::lit(y.value() as f64);
            let margin = yv * (dot(&z[..d], x) + z[d]);
            let tf = T::from_count(t);
            let eta = T::one() / (lambda * tf);
            let shrink = T::one() - T::one() / tf;
            z.iter_mut().for_each(|c| *c = *c * shrink);
            if margin < T::one() {
                let step = eta * class_weights.of(y) * yv;
                for (c, &xv) in z[..d].iter_mut().zip(x) {
                    *c = *c + step * xv;
                }
                z[d] = z[d] + step;
            }
            if t > average_from {
                for (a, &c) in avg.iter_mut().zip(&z) {
                    *a = *a + c;
                }
            }
        }
    }
    let count = T::from_count(total_steps - average_from);
    avg.iter_mut().for_each(|a| *a = *a / count);
    let bias = avg.pop().expect("bias slot");
    Ok(LinearModel { weights: avg, bias, class_weights, params: params.clone() })
}
