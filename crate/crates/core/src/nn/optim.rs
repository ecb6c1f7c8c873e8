//! Adam and the reduce-on-plateau learning-rate schedule.

use super::scalar::Scalar;
use super::{Grads, Network};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-7;

/// Per-parameter first/second moments plus the step counter. The learning
/// rate lives here and is adjusted externally by [`PlateauState`].
#[derive(Debug, Clone)]
pub struct AdamState<T: Scalar> {
    pub lr: f64,
    step: u64,
    m: Grads<T>,
    v: Grads<T>,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(net: &Network<T>, lr: f64) -> Self {
        Self {
            lr,
            step: 0,
            m: Grads::zeros_like(net),
            v: Grads::zeros_like(net),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

/// One bias-corrected Adam update over every trainable parameter.
pub fn adam_step<T: Scalar>(net: &mut Network<T>, grads: &Grads<T>, state: &mut AdamState<T>) {
    state.step += 1;
    let t = state.step;
    let c1 = 1.0 - ADAM_BETA1.powi(t as i32);
    let c2 = 1.0 - ADAM_BETA2.powi(t as i32);
    let lr = state.lr;
    let mut visit = |params: &mut [T], g: &[T], m: &mut [T], v: &mut [T]| {
        adam_update_slice(params, g, m, v, lr, c1, c2);
    };
    for (li, layer) in net.enc.iter_mut().enumerate() {
        visit(
            &mut layer.w.data,
            &grads.enc[li].dw,
            &mut state.m.enc[li].dw,
            &mut state.v.enc[li].dw,
        );
        visit(
            &mut layer.b,
            &grads.enc[li].db,
            &mut state.m.enc[li].db,
            &mut state.v.enc[li].db,
        );
    }
    for (li, layer) in net.dec.iter_mut().enumerate() {
        visit(
            &mut layer.w.data,
            &grads.dec[li].dw,
            &mut state.m.dec[li].dw,
            &mut state.v.dec[li].dw,
        );
        visit(
            &mut layer.b,
            &grads.dec[li].db,
            &mut state.m.dec[li].db,
            &mut state.v.dec[li].db,
        );
    }
}

/// The update rule itself, exposed for direct testing:
/// `m <- b1 m + (1-b1) g`, `v <- b2 v + (1-b2) g^2`,
/// `theta -= lr * (m/c1) / (sqrt(v/c2) + eps)`.
pub fn adam_update_slice<T: Scalar>(
    params: &mut [T],
    g: &[T],
    m: &mut [T],
    v: &mut [T],
    lr: f64,
    c1: f64,
    c2: f64,
) {
    let b1 = T::from_f64(ADAM_BETA1);
    let b1c = T::from_f64(1.0 - ADAM_BETA1);
    let b2 = T::from_f64(ADAM_BETA2);
    let b2c = T::from_f64(1.0 - ADAM_BETA2);
    let lr_t = T::from_f64(lr);
    let ic1 = T::from_f64(1.0 / c1);
    let ic2 = T::from_f64(1.0 / c2);
    let eps = T::from_f64(ADAM_EPS);
    for i in 0..params.len() {
        let gi = g[i];
        m[i] = b1 * m[i] + b1c * gi;
        v[i] = b2 * v[i] + b2c * gi * gi;
        let mhat = m[i] * ic1;
        let vhat = v[i] * ic2;
        params[i] = params[i] - lr_t * mhat / (vhat.sqrt() + eps);
    }
}

/// Reduce-on-plateau schedule: when the monitored loss fails to improve the
/// best seen value by more than `min_delta` for more than `patience`
/// consecutive epochs, the learning rate is multiplied by `factor`. The
/// learning rate never increases.
#[derive(Debug, Clone)]
pub struct PlateauState {
    pub lr: f64,
    best: f64,
    wait: u32,
    pub patience: u32,
    pub min_delta: f64,
    pub factor: f64,
}

impl PlateauState {
    pub fn new(lr: f64) -> Self {
        Self {
            lr,
            best: f64::INFINITY,
            wait: 0,
            patience: 1,
            min_delta: 0.01,
            factor: 0.1,
        }
    }

    /// Feeds one epoch loss; returns the learning rate to use next.
    pub fn update(&mut self, epoch_loss: f64) -> f64 {
        assert!(epoch_loss.is_finite(), "non-finite epoch loss");
        if epoch_loss < self.best - self.min_delta {
            self.best = epoch_loss;
            self.wait = 0;
        } else {
            self.wait += 1;
            if self.wait > self.patience {
                self.lr *= self.factor;
                self.wait = 0;
            }
        }
        self.lr
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step_scalar(theta: &mut f64, g: f64, m: &mut f64, v: &mut f64, lr: f64, t: u64) {
        let c1 = 1.0 - ADAM_BETA1.powi(t as i32);
        let c2 = 1.0 - ADAM_BETA2.powi(t as i32);
        let mut p = [*theta];
        let mut ms = [*m];
        let mut vs = [*v];
        adam_update_slice(&mut p, &[g], &mut ms, &mut vs, lr, c1, c2);
        *theta = p[0];
        *m = ms[0];
        *v = vs[0];
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let (mut theta, mut m, mut v) = (0.0f64, 0.0, 0.0);
        step_scalar(&mut theta, 1.0, &mut m, &mut v, 1e-4, 1);
        assert!((theta + 1e-4).abs() < 1e-10, "theta={theta}");
    }

    #[test]
    fn zero_gradient_leaves_parameter_unchanged() {
        let (mut theta, mut m, mut v) = (0.7f64, 0.0, 0.0);
        step_scalar(&mut theta, 0.0, &mut m, &mut v, 1e-4, 1);
        assert_eq!(theta, 0.7);
    }

    #[test]
    fn two_constant_steps_accumulate() {
        let (mut theta, mut m, mut v) = (0.0f64, 0.0, 0.0);
        step_scalar(&mut theta, 1.0, &mut m, &mut v, 1e-4, 1);
        step_scalar(&mut theta, 1.0, &mut m, &mut v, 1e-4, 2);
        assert!((theta + 2e-4).abs() < 1e-8, "theta={theta}");
    }

    #[test]
    fn plateau_steady_improvement_keeps_lr() {
        let mut s = PlateauState::new(1e-4);
        for loss in [1.0, 0.95, 0.90] {
            assert_eq!(s.update(loss), 1e-4);
        }
    }

    #[test]
    fn plateau_fires_after_second_stall() {
        let mut s = PlateauState::new(1e-4);
        assert_eq!(s.update(1.0), 1e-4);
        assert_eq!(s.update(0.995), 1e-4); // first non-improving epoch
        let lr = s.update(0.999); // second: reduction fires
        assert!((lr - 1e-5).abs() < 1e-18, "lr={lr}");
    }

    #[test]
    fn improvement_of_exactly_min_delta_does_not_count() {
        let mut s = PlateauState::new(1e-2);
        s.update(1.0);
        s.update(0.99); // exactly 0.01 better: no improvement under strict >
        let lr = s.update(0.98); // second stall (0.99 - 0.01 == 0.98, still not <)
        assert!((lr - 1e-3).abs() < 1e-15, "lr={lr}");
    }

    #[test]
    fn lr_never_increases() {
        let mut s = PlateauState::new(1.0);
        let mut last = 1.0;
        for i in 0..50 {
            let lr = s.update(1.0 + (i % 3) as f64 * 0.001);
            assert!(lr <= last);
            last = lr;
        }
    }
}
