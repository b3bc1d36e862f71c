//! Reference classifier: linear-softmax or one-hidden-layer SiLU network,
//! trained by mini-batch Adam with a step learning-rate schedule.

mod adam;
mod ops;

pub use adam::AdamState;
pub use ops::{argmax, sigmoid, silu, silu_prime, softmax_in_place};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Hyperparameters for [`Classifier::fit`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig<T: Scalar = f64> {
    pub epochs: usize,
    pub batch_size: usize,
    pub base_lr: T,
    pub decay_factor: T,
    pub decay_start_epoch: usize,
    /// 0 trains a plain multinomial logistic regression.
    pub hidden_units: usize,
    pub beta1: T,
    pub beta2: T,
    pub epsilon: T,
}

impl<T: Scalar> Default for TrainConfig<T> {
    fn default() -> Self {
        TrainConfig {
            epochs: 200,
            batch_size: 32,
            base_lr: T::from_f64_lossy(1e-4),
            decay_factor: T::from_f64_lossy(0.96),
            decay_start_epoch: 50,
            hidden_units: 0,
            beta1: T::from_f64_lossy(0.9),
            beta2: T::from_f64_lossy(0.999),
            epsilon: T::from_f64_lossy(1e-8),
        }
    }
}

impl<T: Scalar> TrainConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::ConfigError("batch_size must be positive".into()));
        }
        if self.decay_start_epoch == 0 {
            return Err(Error::ConfigError(
                "decay_start_epoch must be positive".into(),
            ));
        }
        if !(self.base_lr > T::zero() && self.base_lr.is_finite()) {
            return Err(Error::ConfigError("base_lr must be positive".into()));
        }
        if !(self.decay_factor > T::zero() && self.decay_factor <= T::one()) {
            return Err(Error::ConfigError("decay_factor must be in (0,1]".into()));
        }
        for (name, v) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(v > T::zero() && v < T::one()) {
                return Err(Error::ConfigError(format!("{name} must be in (0,1)")));
            }
        }
        if !(self.epsilon > T::zero()) {
            return Err(Error::ConfigError("epsilon must be positive".into()));
        }
        Ok(())
    }

    /// Learning rate for a 1-based epoch: flat through `decay_start_epoch`,
    /// then multiplied by `decay_factor` once per subsequent epoch.
    pub fn lr_at_epoch(&self, epoch: usize) -> T {
        assert!(epoch >= 1, "epochs are 1-based");
        if epoch <= self.decay_start_epoch {
            self.base_lr
        } else {
            self.base_lr
                * self
                    .decay_factor
                    .powi((epoch - self.decay_start_epoch) as i32)
        }
    }
}

/// The contract the self-trainer consumes: seeded training plus row-wise
/// probability prediction.
pub trait Classifier<T: Scalar>: Sized {
    /// Trains from scratch; returns the model and its per-epoch loss trace.
    fn fit(ds: &LabeledDataset<T>, cfg: &TrainConfig<T>, seed: u64) -> Result<(Self, Vec<T>)>;

    /// Class-probability rows (each nonnegative, summing to 1) for a feature
    /// matrix whose column count matches the training dimension.
    fn predict_proba(&self, rows: &Matrix<T>) -> Result<Matrix<T>>;

    /// Hard labels: per-row argmax, ties resolving to the lowest class index.
    fn predict(&self, rows: &Matrix<T>) -> Result<Vec<usize>> {
        let probs = self.predict_proba(rows)?;
        Ok((0..probs.rows()).map(|i| argmax(probs.row(i))).collect())
    }
}

/// Softmax network with zero or one SiLU hidden layer. Parameters live in a
/// single flat vector: `[W1, b1, W2, b2]` with `W1: hidden×dim`,
/// `W2: classes×hidden` (or just `[W, b]`, `W: classes×dim`, when
/// `hidden_units = 0`), all row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpClassifier<T: Scalar = f64> {
    dim: usize,
    hidden_units: usize,
    classes: usize,
    params: Vec<T>,
}

fn param_count(dim: usize, hidden: usize, classes: usize) -> usize {
    if hidden == 0 {
        classes * dim + classes
    } else {
        hidden * dim + hidden + classes * hidden + classes
    }
}

fn fill_glorot<T: Scalar>(slice: &mut [T], fan_in: usize, fan_out: usize, rng: &mut ChaCha8Rng) {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    for p in slice {
        let u: f64 = rng.gen();
        *p = T::from_f64_lossy((2.0 * u - 1.0) * limit);
    }
}

impl<T: Scalar> MlpClassifier<T> {
    /// Glorot-uniform weights (±√(6/(fan_in+fan_out))), zero biases,
    /// deterministic in the seed.
    pub fn seeded_init(dim: usize, hidden_units: usize, classes: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::init_with_rng(dim, hidden_units, classes, &mut rng)
    }

    fn init_with_rng(
        dim: usize,
        hidden_units: usize,
        classes: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self> {
        if dim == 0 || classes < 2 {
            return Err(Error::ShapeError(format!(
                "need dim ≥ 1 and ≥ 2 classes, got dim {dim}, {classes} classes"
            )));
        }
        let mut params = vec![T::zero(); param_count(dim, hidden_units, classes)];
        if hidden_units == 0 {
            fill_glorot(&mut params[..classes * dim], dim, classes, rng);
        } else {
            fill_glorot(&mut params[..hidden_units * dim], dim, hidden_units, rng);
            let w2_start = hidden_units * dim + hidden_units;
            fill_glorot(
                &mut params[w2_start..w2_start + classes * hidden_units],
                hidden_units,
                classes,
                rng,
            );
        }
        Ok(MlpClassifier {
            dim,
            hidden_units,
            classes,
            params,
        })
    }

    /// Wraps an explicit parameter vector (layout documented on the type).
    pub fn from_params(
        dim: usize,
        hidden_units: usize,
        classes: usize,
        params: Vec<T>,
    ) -> Result<Self> {
        if dim == 0 || classes < 2 {
            return Err(Error::ShapeError(format!(
                "need dim ≥ 1 and ≥ 2 classes, got dim {dim}, {classes} classes"
            )));
        }
        let expect = param_count(dim, hidden_units, classes);
        if params.len() != expect {
            return Err(Error::ShapeError(format!(
                "expected {expect} parameters, got {}",
                params.len()
            )));
        }
        Ok(MlpClassifier {
            dim,
            hidden_units,
            classes,
            params,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hidden_units(&self) -> usize {
        self.hidden_units
    }

    pub fn n_classes(&self) -> usize {
        self.classes
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    /// (pre-activation, activation) of the hidden layer and the probability
    /// row for one input.
    fn forward_row(&self, x: &[T]) -> (Vec<T>, Vec<T>, Vec<T>) {
        let (d, h, l) = (self.dim, self.hidden_units, self.classes);
        if h == 0 {
            let w = &self.params[..l * d];
            let b = &self.params[l * d..];
            let mut logits: Vec<T> = (0..l)
                .map(|k| {
                    let mut z = b[k];
                    for j in 0..d {
                        z += w[k * d + j] * x[j];
                    }
                    z
                })
                .collect();
            softmax_in_place(&mut logits);
            (Vec::new(), Vec::new(), logits)
        } else {
            let w1 = &self.params[..h * d];
            let b1 = &self.params[h * d..h * d + h];
            let w2_start = h * d + h;
            let w2 = &self.params[w2_start..w2_start + l * h];
            let b2 = &self.params[w2_start + l * h..];
            let z1: Vec<T> = (0..h)
                .map(|u| {
                    let mut z = b1[u];
                    for j in 0..d {
                        z += w1[u * d + j] * x[j];
                    }
                    z
                })
                .collect();
            let a1: Vec<T> = z1.iter().map(|&z| silu(z)).collect();
            let mut logits: Vec<T> = (0..l)
                .map(|k| {
                    let mut z = b2[k];
                    for u in 0..h {
                        z += w2[k * h + u] * a1[u];
                    }
                    z
                })
                .collect();
            softmax_in_place(&mut logits);
            (z1, a1, logits)
        }
    }

    /// Mean cross-entropy over the batch and its gradient with respect to the
    /// flat parameter vector, evaluated at the current weights.
    pub fn loss_and_gradient(&self, features: &Matrix<T>, labels: &[usize]) -> Result<(T, Vec<T>)> {
        if features.cols() != self.dim {
            return Err(Error::ShapeError(format!(
                "batch has {} columns, model expects {}",
                features.cols(),
                self.dim
            )));
        }
        if features.rows() != labels.len() {
            return Err(Error::ShapeError(format!(
                "{} rows vs {} labels",
                features.rows(),
                labels.len()
            )));
        }
        if features.rows() == 0 {
            return Err(Error::EmptyDataset);
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= self.classes) {
            return Err(Error::LabelOutOfRange {
                label: bad,
                classes: self.classes,
            });
        }

        let (d, h, l) = (self.dim, self.hidden_units, self.classes);
        let inv_b = T::one() / T::from_usize(features.rows()).expect("batch size fits scalar");
        let mut grad = vec![T::zero(); self.params.len()];
        let mut loss = T::zero();

        for (i, &y) in labels.iter().enumerate() {
            let x = features.row(i);
            let (z1, a1, probs) = self.forward_row(x);
            loss -= probs[y].ln();

            // dL/dlogit = (p − onehot)/B for the batch mean.
            let dz2: Vec<T> = (0..l)
                .map(|k| {
                    let indicator = if k == y { T::one() } else { T::zero() };
                    (probs[k] - indicator) * inv_b
                })
                .collect();

            if h == 0 {
                let (gw, gb) = grad.split_at_mut(l * d);
                for k in 0..l {
                    for j in 0..d {
                        gw[k * d + j] += dz2[k] * x[j];
                    }
                    gb[k] += dz2[k];
                }
            } else {
                let w2_start = h * d + h;
                let w2 = &self.params[w2_start..w2_start + l * h];
                let mut da1 = vec![T::zero(); h];
                for k in 0..l {
                    for u in 0..h {
                        grad[w2_start + k * h + u] += dz2[k] * a1[u];
                        da1[u] += w2[k * h + u] * dz2[k];
                    }
                    grad[w2_start + l * h + k] += dz2[k];
                }
                for u in 0..h {
                    let dz1 = da1[u] * silu_prime(z1[u]);
                    for j in 0..d {
                        grad[u * d + j] += dz1 * x[j];
                    }
                    grad[h * d + u] += dz1;
                }
            }
        }
        Ok((loss * inv_b, grad))
    }

    /// Writes a versioned CSV weight dump: a header line
    /// `mlp-weights,1,<classes>,<dim>,<hidden_units>` then one parameter per
    /// line, rendered so reading back is bit-exact.
    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = format!(
            "mlp-weights,1,{},{},{}\n",
            self.classes, self.dim, self.hidden_units
        );
        for p in &self.params {
            out.push_str(&format!("{p:?}\n"));
        }
        std::fs::write(path, out).map_err(|e| Error::file_io(path, e))
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::file_io(path, e))?;
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("");
        let fields: Vec<&str> = header.split(',').collect();
        if fields.len() != 5 || fields[0] != "mlp-weights" || fields[1] != "1" {
            return Err(Error::ParseError(format!(
                "{}: expected header mlp-weights,1,<classes>,<dim>,<hidden>, got {header:?}",
                path.display()
            )));
        }
        let parse_count = |s: &str, what: &str| -> Result<usize> {
            s.parse().map_err(|_| {
                Error::ParseError(format!("{}: bad {what} {s:?}", path.display()))
            })
        };
        let classes = parse_count(fields[2], "class count")?;
        let dim = parse_count(fields[3], "dimension")?;
        let hidden_units = parse_count(fields[4], "hidden size")?;
        let params = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.trim().parse::<f64>().map(T::from_f64_lossy).map_err(|_| {
                    Error::ParseError(format!("{}: bad weight {l:?}", path.display()))
                })
            })
            .collect::<Result<Vec<T>>>()?;
        Self::from_params(dim, hidden_units, classes, params)
    }
}

impl<T: Scalar> Classifier<T> for MlpClassifier<T> {
    fn fit(ds: &LabeledDataset<T>, cfg: &TrainConfig<T>, seed: u64) -> Result<(Self, Vec<T>)> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut model = Self::init_with_rng(ds.dim(), cfg.hidden_units, ds.n_classes(), &mut rng)?;
        let mut adam = AdamState::new(model.params.len());
        let mut trace = Vec::with_capacity(cfg.epochs);
        let n = ds.len();
        let inv_n = T::one() / T::from_usize(n).expect("dataset size fits scalar");
        let mut order: Vec<usize> = (0..n).collect();

        for epoch in 1..=cfg.epochs {
            order.shuffle(&mut rng);
            let lr = cfg.lr_at_epoch(epoch);
            let mut loss_sum = T::zero();
            for chunk in order.chunks(cfg.batch_size) {
                let bx = ds.features().select_rows(chunk);
                let by: Vec<usize> = chunk.iter().map(|&i| ds.labels()[i]).collect();
                let (batch_loss, grad) = model.loss_and_gradient(&bx, &by)?;
                loss_sum += batch_loss * T::from_usize(chunk.len()).expect("chunk fits scalar");
                let delta = adam.adam_step(&grad, lr, cfg.beta1, cfg.beta2, cfg.epsilon);
                for (p, d) in model.params.iter_mut().zip(&delta) {
                    *p += *d;
                }
            }
            let epoch_loss = loss_sum * inv_n;
            if !epoch_loss.is_finite() {
                return Err(Error::DivergenceError { epoch });
            }
            trace.push(epoch_loss);
        }
        Ok((model, trace))
    }

    fn predict_proba(&self, rows: &Matrix<T>) -> Result<Matrix<T>> {
        if rows.cols() != self.dim {
            return Err(Error::ShapeError(format!(
                "input has {} columns, model expects {}",
                rows.cols(),
                self.dim
            )));
        }
        let mut out = Matrix::zeros(rows.rows(), self.classes);
        for i in 0..rows.rows() {
            let (_, _, probs) = self.forward_row(rows.row(i));
            out.row_mut(i).copy_from_slice(&probs);
        }
        Ok(out)
    }
}
