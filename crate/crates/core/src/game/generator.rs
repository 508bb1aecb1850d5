use crate::channels::{correlated_table, correlated_table_mu_derivative, CorrelationModel, ProbTable};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Parametrization family of the fake channel.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorMode<T: Real> {
    /// Softmax over every entry of the table.
    FullSoftmax,
    /// Product of independent per-use softmaxes.
    FactorizedSoftmax,
    /// Correlated table with a known prior; only `mu` is learnt.
    MuOnly { prior: ProbTable<T> },
}

/// Generator parameters. The table is `q = e^{-beta} / Z`.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorParams<T: Real> {
    Full { betas: Vec<T> },
    Factorized { betas: Vec<[T; 4]> },
    MuOnly { mu_logit: T, prior: ProbTable<T> },
}

fn softmax_neg<T: Real>(betas: &[T]) -> Vec<T> {
    let lo = betas.iter().copied().fold(T::infinity(), T::min);
    let e: Vec<T> = betas.iter().map(|&b| (lo - b).exp()).collect();
    let z: T = e.iter().copied().sum();
    e.into_iter().map(|x| x / z).collect()
}

fn sigmoid<T: Real>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

impl<T: Real> GeneratorParams<T> {
    /// Uniform start for the softmax modes and `mu = 1/2` for `MuOnly`.
    ///
    /// `len` is the number of entries of the generated distribution.
    pub fn initial(mode: &GeneratorMode<T>, len: usize) -> Result<Self> {
        match mode {
            GeneratorMode::FullSoftmax => {
                if len < 2 {
                    return Err(Error::InvalidArgument(format!("distribution of length {len}")));
                }
                Ok(Self::Full {
                    betas: vec![T::zero(); len],
                })
            }
            GeneratorMode::FactorizedSoftmax => Ok(Self::Factorized {
                betas: vec![[T::zero(); 4]; crate::channels::table_uses(len)?],
            }),
            GeneratorMode::MuOnly { prior } => {
                if prior.n() != 1 {
                    return Err(Error::InvalidArgument("known prior must be single-use".into()));
                }
                crate::channels::table_uses(len)?;
                Ok(Self::MuOnly {
                    mu_logit: T::zero(),
                    prior: prior.clone(),
                })
            }
        }
    }

    /// Trainable parameters as a flat vector.
    pub fn params(&self) -> Vec<T> {
        match self {
            Self::Full { betas } => betas.clone(),
            Self::Factorized { betas } => betas.iter().flatten().copied().collect(),
            Self::MuOnly { mu_logit, .. } => vec![*mu_logit],
        }
    }

    pub fn set_params(&mut self, values: &[T]) -> Result<()> {
        let want = self.params().len();
        if values.len() != want {
            return Err(Error::DimensionMismatch(format!(
                "generator has {want} parameters, got {}",
                values.len()
            )));
        }
        match self {
            Self::Full { betas } => betas.copy_from_slice(values),
            Self::Factorized { betas } => {
                for (row, chunk) in betas.iter_mut().zip(values.chunks_exact(4)) {
                    row.copy_from_slice(chunk);
                }
            }
            Self::MuOnly { mu_logit, .. } => *mu_logit = values[0],
        }
        Ok(())
    }

    /// `sigmoid(mu_logit)` in `MuOnly` mode.
    pub fn mu(&self) -> Option<T> {
        match self {
            Self::MuOnly { mu_logit, .. } => Some(sigmoid(*mu_logit)),
            _ => None,
        }
    }

    /// Generated distribution over `len` entries.
    pub fn distribution(&self, len: usize) -> Result<Vec<T>> {
        match self {
            Self::Full { betas } => {
                if betas.len() != len {
                    return Err(Error::DimensionMismatch(format!(
                        "{} betas for {len} entries",
                        betas.len()
                    )));
                }
                Ok(softmax_neg(betas))
            }
            Self::Factorized { betas } => {
                let n = crate::channels::table_uses(len)?;
                if betas.len() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "{} factors for {n} uses",
                        betas.len()
                    )));
                }
                let mut probs = vec![T::one()];
                for row in betas {
                    let r = softmax_neg(row);
                    probs = probs.iter().flat_map(|&w| r.iter().map(move |&x| w * x)).collect();
                }
                Ok(probs)
            }
            Self::MuOnly { mu_logit, prior } => {
                let n = crate::channels::table_uses(len)?;
                let model = CorrelationModel::new(prior.clone(), sigmoid(*mu_logit))?;
                Ok(correlated_table(&model, n)?.into_probs())
            }
        }
    }
}

/// Fake Pauli table on `n` uses.
pub fn generator_table<T: Real>(gen: &GeneratorParams<T>, n: usize) -> Result<ProbTable<T>> {
    ProbTable::normalized(n, gen.distribution(1usize << (2 * n))?)
}

/// Gradient of the score `S = sum_k (p_k - q_k) s_k` with respect to the
/// generator parameters, given the branch scores `s_k`.
pub fn generator_gradient<T: Real>(gen: &GeneratorParams<T>, branch_scores: &[T]) -> Result<Vec<T>> {
    let len = branch_scores.len();
    let q = gen.distribution(len)?;
    let s_q: T = q.iter().zip(branch_scores).map(|(&a, &b)| a * b).sum();
    match gen {
        GeneratorParams::Full { .. } => Ok(q
            .iter()
            .zip(branch_scores)
            .map(|(&qj, &sj)| qj * (sj - s_q))
            .collect()),
        GeneratorParams::Factorized { betas } => {
            let n = betas.len();
            let mut grad = vec![T::zero(); 4 * n];
            for (k, (&qk, &sk)) in q.iter().zip(branch_scores).enumerate() {
                for i in 0..n {
                    let digit = (k >> (2 * (n - 1 - i))) & 3;
                    grad[4 * i + digit] += qk * sk;
                }
            }
            for (i, row) in betas.iter().enumerate() {
                for (a, r) in softmax_neg(row).into_iter().enumerate() {
                    grad[4 * i + a] -= r * s_q;
                }
            }
            Ok(grad)
        }
        GeneratorParams::MuOnly { mu_logit, prior } => {
            let n = crate::channels::table_uses(len)?;
            let mu = sigmoid(*mu_logit);
            let model = CorrelationModel::new(prior.clone(), mu)?;
            let dq = correlated_table_mu_derivative(&model, n)?;
            let d_sq: T = dq.iter().zip(branch_scores).map(|(&a, &b)| a * b).sum();
            Ok(vec![-d_sq * mu * (T::one() - mu)])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pqc::central_difference_grad;
    use crate::qsim::random::random_distribution;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn score(gen: &GeneratorParams<f64>, p: &[f64], s: &[f64]) -> f64 {
        let q = gen.distribution(p.len()).unwrap();
        p.iter().zip(&q).zip(s).map(|((a, b), c)| (a - b) * c).sum()
    }

    fn check_against_fd(gen: &GeneratorParams<f64>, rng: &mut ChaCha8Rng, len: usize) {
        let p: Vec<f64> = random_distribution(rng, len);
        let s: Vec<f64> = (0..len).map(|_| rng.random()).collect();
        let analytic = generator_gradient(gen, &s).unwrap();
        let mut probe = gen.clone();
        let fd = central_difference_grad(
            |x: &[f64]| {
                probe.set_params(x).unwrap();
                score(&probe, &p, &s)
            },
            &gen.params(),
            1e-5,
        );
        for (a, b) in analytic.iter().zip(&fd) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn equal_betas_give_uniform_table() {
        let g = GeneratorParams::Full { betas: vec![0.3f64; 16] };
        let t = generator_table(&g, 2).unwrap();
        assert!(t.probs().iter().all(|&p| (p - 1.0 / 16.0).abs() < 1e-15));
    }

    #[test]
    fn constant_shift_is_redundant() {
        let b = vec![0.1f64, -0.4, 1.2, 0.7];
        let g1 = GeneratorParams::Full { betas: b.clone() };
        let g2 = GeneratorParams::Full {
            betas: b.iter().map(|x| x + 3.0).collect(),
        };
        let (t1, t2) = (generator_table(&g1, 1).unwrap(), generator_table(&g2, 1).unwrap());
        for (a, c) in t1.probs().iter().zip(t2.probs()) {
            assert!((a - c).abs() < 1e-15);
        }
    }

    #[test]
    fn mu_only_delegates_to_correlation_law() {
        let prior = ProbTable::from_f64(1, &[0.55, 0.2, 0.15, 0.1]).unwrap();
        let g = GeneratorParams::MuOnly {
            mu_logit: 0.8,
            prior: prior.clone(),
        };
        let mu = 1.0 / (1.0 + (-0.8f64).exp());
        let want = correlated_table(&CorrelationModel::new(prior, mu).unwrap(), 3).unwrap();
        let got = generator_table(&g, 3).unwrap();
        for (a, b) in got.probs().iter().zip(want.probs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_scores_give_zero_gradient() {
        let g = GeneratorParams::Full {
            betas: vec![0.3f64, -0.2, 0.9, 0.0],
        };
        let grad = generator_gradient(&g, &[0.4; 4]).unwrap();
        assert!(grad.iter().all(|x| x.abs() < 1e-16));
    }

    #[test]
    fn one_hot_scores_on_uniform_generator() {
        let g = GeneratorParams::<f64>::initial(&GeneratorMode::FullSoftmax, 16).unwrap();
        let mut s = vec![0.0; 16];
        s[5] = 1.0;
        let grad = generator_gradient(&g, &s).unwrap();
        let u = 1.0 / 16.0;
        for (j, &x) in grad.iter().enumerate() {
            let want = if j == 5 { u * (1.0 - u) } else { -u * u };
            assert!((x - want).abs() < 1e-16);
        }
        assert!(grad.iter().sum::<f64>().abs() < 1e-16);
    }

    #[test]
    fn full_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for len in [4, 16] {
            let betas = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
            check_against_fd(&GeneratorParams::Full { betas }, &mut rng, len);
        }
    }

    #[test]
    fn factorized_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=3 {
            let betas = (0..n)
                .map(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
                .collect();
            check_against_fd(&GeneratorParams::Factorized { betas }, &mut rng, 1 << (2 * n));
        }
    }

    #[test]
    fn mu_only_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let prior = ProbTable::from_f64(1, &[0.55, 0.2, 0.15, 0.1]).unwrap();
        for n in 1..=3 {
            let g = GeneratorParams::MuOnly {
                mu_logit: rng.random_range(-2.0..2.0),
                prior: prior.clone(),
            };
            check_against_fd(&g, &mut rng, 1 << (2 * n));
        }
    }

    #[test]
    fn initial_tables() {
        let prior = ProbTable::from_f64(1, &[0.7, 0.1, 0.1, 0.1]).unwrap();
        let g = GeneratorParams::<f64>::initial(&GeneratorMode::MuOnly { prior }, 16).unwrap();
        assert_eq!(g.mu(), Some(0.5));
        let f = GeneratorParams::<f64>::initial(&GeneratorMode::FactorizedSoftmax, 16).unwrap();
        assert_eq!(f.params().len(), 8);
        assert!(GeneratorParams::<f64>::initial(&GeneratorMode::FactorizedSoftmax, 8).is_err());
        assert!(generator_table(&f, 1).is_err());
    }
}
