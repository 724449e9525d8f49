//! Scalar loss terms: classification cross-entropy, the two gate
//! regularizers, Sammon stress over pairwise distances, and the composite
//! totals used during training.

use serde::{Deserialize, Serialize};

use crate::gated_mlp::{apply_gates, GatedNetwork};
use crate::mat::{euclidean, RowMatrix};
use crate::num::{real, Real};

/// Multipliers and sizes that shape the composite training loss.
///
/// `subset_size == 0` means the structure term is evaluated on the full
/// batch; a positive value requests a fresh random row subset of that size
/// each iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossConfig<F> {
    pub alpha1: F,
    pub alpha2: F,
    pub beta: F,
    /// Target number of selected features.
    pub q: usize,
    /// Row-subset size for the structure term; 0 = full batch.
    pub subset_size: usize,
    /// Double the stress normalizer to read the pair sum over ordered pairs.
    pub ordered_pair_normalizer: bool,
}

impl<F: Real> LossConfig<F> {
    pub fn new(q: usize) -> Self {
        Self {
            alpha1: F::one(),
            alpha2: F::one(),
            beta: F::zero(),
            q,
            subset_size: 0,
            ordered_pair_normalizer: false,
        }
    }

    pub fn with_beta(mut self, beta: F) -> Self {
        self.beta = beta;
        self
    }
}

/// Per-term values of one composite-loss evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown<F> {
    pub e_class: F,
    pub e_select: F,
    pub e_q: F,
    pub e_struct: F,
    pub e_total: F,
}

impl<F: Real> LossBreakdown<F> {
    pub fn is_finite(&self) -> bool {
        self.e_total.is_finite()
    }
}

/// Probabilities below this floor are clamped before taking logs.
pub const LOG_FLOOR: f64 = 1e-12;

/// Mean negative log-probability of the true class.
pub fn cross_entropy<F: Real>(probabilities: &RowMatrix<F>, targets_onehot: &RowMatrix<F>) -> F {
    assert_eq!(probabilities.rows(), targets_onehot.rows());
    assert_eq!(probabilities.cols(), targets_onehot.cols());
    let n = probabilities.rows();
    assert!(n > 0, "cross_entropy on empty batch");
    let floor = real::<F>(LOG_FLOOR);
    let mut total = F::zero();
    for (p_row, t_row) in probabilities.iter_rows().zip(targets_onehot.iter_rows()) {
        for (&p, &t) in p_row.iter().zip(t_row) {
            if t > F::zero() {
                total -= t * p.max(floor).ln();
            }
        }
    }
    total / real::<F>(n as f64)
}

/// Polarization term `(1/P) sum a_j (1 - a_j)`: zero when every gate sits at
/// 0 or 1, maximal (0.25) when all gates are half-open.
pub fn select_regularizer<F: Real>(lambdas: &[F]) -> F {
    let p = lambdas.len();
    assert!(p > 0);
    let sum = lambdas
        .iter()
        .map(|&l| {
            let a = crate::gated_mlp::gate_activation(l);
            a * (F::one() - a)
        })
        .fold(F::zero(), |acc, v| acc + v);
    sum / real::<F>(p as f64)
}

/// Cardinality term `(1/Q^2) (sum a_j - Q)^2`, zero exactly when the gate
/// activations sum to the target count.
pub fn count_regularizer<F: Real>(lambdas: &[F], q: usize) -> F {
    assert!(q >= 1, "count_regularizer requires Q >= 1");
    let sum_a = lambdas
        .iter()
        .map(|&l| crate::gated_mlp::gate_activation(l))
        .fold(F::zero(), |acc, v| acc + v);
    let qf = real::<F>(q as f64);
    let d = sum_a - qf;
    d * d / (qf * qf)
}

/// Stress value plus the number of zero-distance pairs that had to be
/// skipped to avoid dividing by zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StressValue<F> {
    pub value: F,
    pub skipped_pairs: usize,
}

/// Sammon stress between the pairwise distances of `x` and `xhat`.
///
/// Row counts must match; column counts may differ (distances are taken in
/// each space separately). Pairs at zero distance in `x` are skipped and
/// counted instead of poisoning the sum.
pub fn sammon_stress<F: Real>(x: &RowMatrix<F>, xhat: &RowMatrix<F>) -> F {
    sammon_stress_detailed(x, xhat, false).value
}

pub fn sammon_stress_detailed<F: Real>(
    x: &RowMatrix<F>,
    xhat: &RowMatrix<F>,
    ordered_pair_normalizer: bool,
) -> StressValue<F> {
    assert_eq!(x.rows(), xhat.rows(), "row counts must match");
    let n = x.rows();
    assert!(n >= 2, "sammon_stress needs at least two rows");
    let mut denom = F::zero();
    let mut num = F::zero();
    let mut skipped = 0usize;
    for i in 0..n {
        for l in (i + 1)..n {
            let dx = euclidean(x.row(i), x.row(l));
            if dx <= F::zero() {
                skipped += 1;
                continue;
            }
            let dh = euclidean(xhat.row(i), xhat.row(l));
            let diff = dx - dh;
            denom += dx;
            num += diff * diff / dx;
        }
    }
    if skipped > 0 {
        log::warn!("sammon_stress skipped {skipped} zero-distance pairs");
    }
    if ordered_pair_normalizer {
        denom = denom + denom;
    }
    let value = if denom > F::zero() {
        num / denom
    } else {
        F::zero()
    };
    StressValue {
        value,
        skipped_pairs: skipped,
    }
}

/// Structure term of one iteration: Sammon stress restricted to the rows in
/// `subset`, with the reduced space given by the gated copy of those rows.
pub fn struct_loss<F: Real>(x: &RowMatrix<F>, lambdas: &[F], subset: &[usize]) -> F {
    assert!(subset.len() >= 2, "struct_loss needs at least two rows");
    assert_eq!(x.cols(), lambdas.len());
    let sub = x.select_rows(subset);
    let mut gated = sub.clone();
    for i in 0..gated.rows() {
        let g = apply_gates(sub.row(i), lambdas);
        gated.row_mut(i).copy_from_slice(&g);
    }
    sammon_stress(&sub, &gated)
}

/// Evaluates every term of the composite loss at the current parameters.
///
/// With `beta == 0` or fewer than two subset rows the structure term is
/// zero, recovering the classification-only objective.
pub fn total_loss<F: Real>(
    net: &GatedNetwork<F>,
    x: &RowMatrix<F>,
    targets_onehot: &RowMatrix<F>,
    config: &LossConfig<F>,
    subset: &[usize],
) -> LossBreakdown<F> {
    let (probs, _) = net.forward_batch(x);
    let e_class = cross_entropy(&probs, targets_onehot);
    let e_select = select_regularizer(net.lambdas());
    let e_q = count_regularizer(net.lambdas(), config.q);
    let e_struct = if config.beta > F::zero() && subset.len() >= 2 {
        let sub = x.select_rows(subset);
        let mut gated = sub.clone();
        for i in 0..gated.rows() {
            let g = apply_gates(sub.row(i), net.lambdas());
            gated.row_mut(i).copy_from_slice(&g);
        }
        sammon_stress_detailed(&sub, &gated, config.ordered_pair_normalizer).value
    } else {
        F::zero()
    };
    let e_total = e_class + config.beta * e_struct + config.alpha1 * e_select + config.alpha2 * e_q;
    LossBreakdown {
        e_class,
        e_select,
        e_q,
        e_struct,
        e_total,
    }
}
