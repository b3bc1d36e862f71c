//! Bias-corrected adaptive-moment (Adam) parameter updates.

use crate::scalar::Scalar;

/// Optimizer accumulators: first moment `m`, second moment `v`, step count.
#[derive(Debug, Clone)]
pub struct AdamState<T: Scalar = f64> {
    m: Vec<T>,
    v: Vec<T>,
    t: u64,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(len: usize) -> Self {
        AdamState {
            m: vec![T::zero(); len],
            v: vec![T::zero(); len],
            t: 0,
        }
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Advances one step and returns the parameter delta
    /// `−lr·m̂/(√v̂ + ε)` with bias-corrected moments.
    pub fn adam_step(&mut self, grads: &[T], lr: T, beta1: T, beta2: T, epsilon: T) -> Vec<T> {
        assert_eq!(grads.len(), self.m.len(), "gradient shape mismatch");
        self.t += 1;
        let t = self.t as i32;
        let bias1 = T::one() - beta1.powi(t);
        let bias2 = T::one() - beta2.powi(t);
        let mut delta = Vec::with_capacity(grads.len());
        for (i, &g) in grads.iter().enumerate() {
            self.m[i] = beta1 * self.m[i] + (T::one() - beta1) * g;
            self.v[i] = beta2 * self.v[i] + (T::one() - beta2) * g * g;
            let m_hat = self.m[i] / bias1;
            let v_hat = self.v[i] / bias2;
            delta.push(-lr * m_hat / (v_hat.sqrt() + epsilon));
        }
        delta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LR: f64 = 0.001;
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    #[test]
    fn zero_gradient_gives_zero_delta() {
        let mut state = AdamState::<f64>::new(3);
        let delta = state.adam_step(&[0.0; 3], LR, B1, B2, EPS);
        assert_eq!(delta, [0.0, 0.0, 0.0]);
        assert_eq!(state.t(), 1);
    }

    #[test]
    fn first_unit_step_is_almost_minus_lr() {
        // m̂ = v̂ = 1 at t=1, so delta = −lr/(1 + ε).
        let mut state = AdamState::<f64>::new(1);
        let delta = state.adam_step(&[1.0], LR, B1, B2, EPS);
        assert!((delta[0] - (-0.000_999_999_990)).abs() < 1e-12, "{}", delta[0]);
    }

    #[test]
    fn second_unit_step_stays_negative_and_bounded() {
        let mut state = AdamState::<f64>::new(1);
        state.adam_step(&[1.0], LR, B1, B2, EPS);
        let delta2 = state.adam_step(&[1.0], LR, B1, B2, EPS);
        assert!(delta2[0] < 0.0);
        assert!(delta2[0].abs() < LR * 1.0001);
    }

    #[test]
    fn second_moment_stays_nonnegative() {
        let mut state = AdamState::<f64>::new(2);
        for g in [[1.0, -2.0], [-0.5, 0.25], [3.0, -1.0]] {
            state.adam_step(&g, LR, B1, B2, EPS);
            assert!(state.v.iter().all(|v| *v >= 0.0));
        }
        assert_eq!(state.t(), 3);
    }

    #[test]
    #[should_panic(expected = "gradient shape mismatch")]
    fn shape_mismatch_panics() {
        let mut state = AdamState::<f64>::new(2);
        state.adam_step(&[1.0], LR, B1, B2, EPS);
    }
}
