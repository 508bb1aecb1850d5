use num_complex::Complex;

use crate::error::{Error, Result};

/// Probability that `m`-bit phase estimation of `e^{2 pi i s}` outputs `b_prime`:
/// `|2^{-m} (1 - e^{i 2^m delta}) / (1 - e^{i delta})|^2`, `delta = 2 pi (s - b'/2^m)`.
pub fn phase_estimation_error(s: f64, m: usize, b_prime: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("phase s = {s} outside [0, 1)")));
    }
    if !(1..=52).contains(&m) {
        return Err(Error::InvalidArgument(format!("m = {m} outside 1..=52")));
    }
    let bins = 1u64 << m;
    if b_prime as u64 >= bins {
        return Err(Error::InvalidArgument(format!("outcome {b_prime} out of range for m = {m}")));
    }
    let delta = std::f64::consts::TAU * (s - b_prime as f64 / bins as f64);
    let one = Complex::new(1.0, 0.0);
    let den = one - Complex::from_polar(1.0, delta);
    if den.norm() < 1e-12 {
        return Ok(1.0);
    }
    let num = one - Complex::from_polar(1.0, bins as f64 * delta);
    Ok(((num / den) / bins as f64).norm_sqr().min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn representable_phase_is_exact() {
        assert_eq!(phase_estimation_error(0.25, 2, 1).unwrap(), 1.0);
        for b in [0, 2, 3] {
            assert!(phase_estimation_error(0.25, 2, b).unwrap() < 1e-20);
        }
        assert_eq!(phase_estimation_error(0.0, 3, 0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(phase_estimation_error(1.0, 2, 0).is_err());
        assert!(phase_estimation_error(0.5, 2, 4).is_err());
        assert!(phase_estimation_error(0.5, 0, 0).is_err());
    }

    #[test]
    fn normalized_and_peaked_at_nearest_outcome() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..1000 {
            let s: f64 = rng.random();
            let m = rng.random_range(1..=5);
            let bins = 1usize << m;
            let probs: Vec<f64> = (0..bins).map(|b| phase_estimation_error(s, m, b).unwrap()).collect();
            assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            let dist = |b: usize| {
                let d = (s - b as f64 / bins as f64).rem_euclid(1.0);
                d.min(1.0 - d)
            };
            let nearest = (0..bins).min_by(|&a, &b| dist(a).total_cmp(&dist(b))).unwrap();
            let best = (0..bins).max_by(|&a, &b| probs[a].total_cmp(&probs[b])).unwrap();
            assert!(
                best == nearest || (probs[best] - probs[nearest]).abs() < 1e-12,
                "s={s} m={m}"
            );
        }
    }
}
