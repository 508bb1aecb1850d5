use crate::scalar::{lit, Real};

/// Parameter-shift gradient of an expectation value.
///
/// Component `j` is `[f(θ + π/2 e_j) − f(θ − π/2 e_j)] / 2`, exact when every
/// parameter drives a single rotation `exp(−iθσ/2)`.
pub fn param_shift_grad<T: Real, F>(mut eval: F, params: &[T]) -> Vec<T>
where
    F: FnMut(&[T]) -> T,
{
    let shift = T::FRAC_PI_2();
    let half = lit::<T>(0.5);
    let mut work = params.to_vec();
    (0..params.len())
        .map(|j| {
            work[j] = params[j] + shift;
            let plus = eval(&work);
            work[j] = params[j] - shift;
            let minus = eval(&work);
            work[j] = params[j];
            (plus - minus) * half
        })
        .collect()
}

/// Central finite-difference gradient; a reference for tests and diagnostics.
pub fn central_difference_grad<T: Real, F>(mut eval: F, params: &[T], step: T) -> Vec<T>
where
    F: FnMut(&[T]) -> T,
{
    let mut work = params.to_vec();
    (0..params.len())
        .map(|j| {
            work[j] = params[j] + step;
            let plus = eval(&work);
            work[j] = params[j] - step;
            let minus = eval(&work);
            work[j] = params[j];
            (plus - minus) / (step + step)
        })
        .collect()
}
