use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPS: f64 = 1e-8;

/// ADAM moments plus the previous increment used by the optimistic step.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState<T: Real> {
    pub first_moment: Vec<T>,
    pub second_moment: Vec<T>,
    pub step_count: u64,
    pub prev_increment: Vec<T>,
}

impl<T: Real> OptimizerState<T> {
    pub fn new(len: usize) -> Self {
        Self {
            first_moment: vec![T::zero(); len],
            second_moment: vec![T::zero(); len],
            step_count: 0,
            prev_increment: vec![T::zero(); len],
        }
    }

    pub fn len(&self) -> usize {
        self.first_moment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first_moment.is_empty()
    }
}

/// Optimistic ADAM: `theta <- theta - 2 lr delta_t + lr delta_{t-1}`, where
/// `delta_t` is the bias-corrected ADAM increment for `gradient` (negated
/// when `ascent`).
pub fn optimistic_adam_step<T: Real>(
    params: &[T],
    gradient: &[T],
    state: &OptimizerState<T>,
    lr: T,
    ascent: bool,
) -> Result<(Vec<T>, OptimizerState<T>)> {
    let mut out = params.to_vec();
    let mut next = state.clone();
    optimistic_adam_in_place(&mut out, gradient, &mut next, lr, ascent)?;
    Ok((out, next))
}

pub(crate) fn optimistic_adam_in_place<T: Real>(
    params: &mut [T],
    gradient: &[T],
    state: &mut OptimizerState<T>,
    lr: T,
    ascent: bool,
) -> Result<()> {
    if params.len() != gradient.len() || params.len() != state.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} parameters, {} gradient entries, optimizer of size {}",
            params.len(),
            gradient.len(),
            state.len()
        )));
    }
    let (b1, b2, eps) = (lit::<T>(BETA1), lit::<T>(BETA2), lit::<T>(EPS));
    state.step_count += 1;
    let t = state.step_count as i32;
    let c1 = T::one() - b1.powi(t);
    let c2 = T::one() - b2.powi(t);
    let two = lit::<T>(2.0);
    for i in 0..params.len() {
        let g = if ascent { -gradient[i] } else { gradient[i] };
        state.first_moment[i] = b1 * state.first_moment[i] + (T::one() - b1) * g;
        state.second_moment[i] = b2 * state.second_moment[i] + (T::one() - b2) * g * g;
        let m_hat = state.first_moment[i] / c1;
        let v_hat = state.second_moment[i] / c2;
        let delta = m_hat / (v_hat.sqrt() + eps);
        params[i] = params[i] - two * lr * delta + lr * state.prev_increment[i];
        state.prev_increment[i] = delta;
    }
    Ok(())
}
