//! The constrained weighted least-squares attribution solve and the exact
//! Shapley-value oracle it is tested against.

use crate::error::{Error, Result};
use crate::linalg::{solve_dense, Matrix};
use crate::scalar::Scalar;
use crate::shap::coalition::{Coalition, WeightedCoalition};

/// Diagonal regularizer added to the normal equations: large enough to keep
/// degenerate sampled systems solvable, small enough to stay far inside the
/// 1e-8 attribution tolerances.
const RIDGE: f64 = 1e-10;

/// Largest F the exact oracle will enumerate (2^12 model calls, 12! weights).
pub const EXACT_ORACLE_LIMIT: usize = 12;

/// Fits the additive surrogate g(z) = φ0 + Σ φ_j·z_j to the weighted
/// coalition evaluations, under the two exact constraints φ0 = `f_empty`
/// (the background output) and Σφ = `f_full` − `f_empty` (so g reproduces
/// the instance output). Interior coalitions enter as weighted rows; the
/// constraints eliminate φ0 and one φ, leaving an (F−1)-dimensional normal
/// system solved with a tiny ridge. Returns (φ0, φ).
pub fn solve_attribution<T: Scalar>(
    set: &[WeightedCoalition<T>],
    f_values: &[T],
    features: usize,
    f_empty: T,
    f_full: T,
) -> Result<(T, Vec<T>)> {
    if set.len() != f_values.len() {
        return Err(Error::ShapeError(format!(
            "{} coalitions but {} model evaluations",
            set.len(),
            f_values.len()
        )));
    }
    if features == 0 {
        return Err(Error::InvalidSpec("no features to attribute".into()));
    }
    let delta = f_full - f_empty;
    if features == 1 {
        // Both constraints pin the single attribution directly.
        return Ok((f_empty, vec![delta]));
    }

    let rows: Vec<(Coalition, T, T)> = set
        .iter()
        .zip(f_values)
        .filter(|(wc, _)| {
            wc.weight > T::zero() && !wc.coalition.is_empty_set() && !wc.coalition.is_full_set()
        })
        .map(|(wc, &f)| (wc.coalition, wc.weight, f))
        .collect();
    if rows.len() < features {
        return Err(Error::RankDeficient(format!(
            "{} weighted coalition rows for {features} features",
            rows.len()
        )));
    }

    // Free unknowns u_0..u_{F-2}; φ_{F−1} = Δ − Σu. Each coalition row z
    // contributes design entries a_j = z_j − z_{F−1} and target
    // y = f(z) − φ0 − Δ·z_{F−1}.
    let m = features - 1;
    let mut ata = Matrix::zeros(m, m);
    let mut atb = vec![T::zero(); m];
    let sign = |c: &Coalition, j: usize| {
        if c.contains(j) {
            T::one()
        } else {
            T::zero()
        }
    };
    for (c, w, f) in &rows {
        let last = sign(c, features - 1);
        let y = *f - f_empty - delta * last;
        for p in 0..m {
            let ap = sign(c, p) - last;
            if ap == T::zero() {
                continue;
            }
            atb[p] += *w * ap * y;
            for q in 0..m {
                let aq = sign(c, q) - last;
                if aq == T::zero() {
                    continue;
                }
                ata.set(p, q, ata.get(p, q) + *w * ap * aq);
            }
        }
    }
    let ridge = T::from_f64_lossy(RIDGE);
    for p in 0..m {
        ata.set(p, p, ata.get(p, p) + ridge);
    }
    let u = solve_dense(ata, atb)?;
    let mut phi = u;
    let used: T = phi.iter().copied().sum();
    phi.push(delta - used);
    Ok((f_empty, phi))
}

/// Exact Shapley values by subset enumeration:
/// φ_j = Σ_{S ∌ j} |S|!·(F−|S|−1)!/F! · (v(S∪{j}) − v(S)), where
/// `values[mask]` holds v for every one of the 2^F subsets.
pub fn exact_shapley_from_values<T: Scalar>(values: &[T], features: usize) -> Result<Vec<T>> {
    if features == 0 || features > EXACT_ORACLE_LIMIT {
        return Err(Error::BudgetExceeded(format!(
            "exact enumeration supports 1..={EXACT_ORACLE_LIMIT} features, got {features}"
        )));
    }
    if values.len() != 1 << features {
        return Err(Error::ShapeError(format!(
            "expected {} subset values, got {}",
            1usize << features,
            values.len()
        )));
    }
    let mut factorial = vec![1.0f64; features + 1];
    for i in 1..=features {
        factorial[i] = factorial[i - 1] * i as f64;
    }
    let order_weight: Vec<T> = (0..features)
        .map(|s| {
            T::from_f64_lossy(
                factorial[s] * factorial[features - s - 1] / factorial[features],
            )
        })
        .collect();
    let mut phi = vec![T::zero(); features];
    for (j, phi_j) in phi.iter_mut().enumerate() {
        let bit = 1usize << j;
        for mask in 0..1usize << features {
            if mask & bit != 0 {
                continue;
            }
            let s = mask.count_ones() as usize;
            *phi_j += order_weight[s] * (values[mask | bit] - values[mask]);
        }
    }
    Ok(phi)
}

/// Exact Shapley values of `model` at `x` against a single background row,
/// with one explained feature per dimension.
pub fn exact_shapley<T: Scalar>(
    model: impl Fn(&[T]) -> T,
    x: &[T],
    background: &[T],
) -> Result<Vec<T>> {
    if x.len() != background.len() {
        return Err(Error::ShapeError(format!(
            "instance has {} features, background {}",
            x.len(),
            background.len()
        )));
    }
    let features = x.len();
    if features == 0 || features > EXACT_ORACLE_LIMIT {
        return Err(Error::BudgetExceeded(format!(
            "exact enumeration supports 1..={EXACT_ORACLE_LIMIT} features, got {features}"
        )));
    }
    let mut values = Vec::with_capacity(1 << features);
    let mut row = vec![T::zero(); features];
    for mask in 0..1usize << features {
        for j in 0..features {
            row[j] = if mask >> j & 1 == 1 { x[j] } else { background[j] };
        }
        values.push(model(&row));
    }
    exact_shapley_from_values(&values, features)
}
