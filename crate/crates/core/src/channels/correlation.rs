use crate::error::{Error, Result};
use crate::scalar::Real;

use super::pauli::ProbTable;

/// Single-use prior plus a memory parameter `mu` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationModel<T: Real> {
    prior: ProbTable<T>,
    mu: T,
}

impl<T: Real> CorrelationModel<T> {
    pub fn new(prior: ProbTable<T>, mu: T) -> Result<Self> {
        if prior.n() != 1 {
            return Err(Error::InvalidArgument(format!(
                "prior must be a single-use table, got n = {}",
                prior.n()
            )));
        }
        if !(mu >= T::zero() && mu <= T::one()) {
            return Err(Error::InvalidArgument(format!("mu = {mu} outside [0, 1]")));
        }
        Ok(Self { prior, mu })
    }

    pub fn prior(&self) -> &ProbTable<T> {
        &self.prior
    }

    pub fn mu(&self) -> T {
        self.mu
    }
}

/// Markov-chain correlated table on `n` uses:
/// `p_{k1..kn} = p_{k1} prod_t [(1 - mu) p_{kt} + mu delta(kt, k_{t-1})]`.
pub fn correlated_table<T: Real>(model: &CorrelationModel<T>, n: usize) -> Result<ProbTable<T>> {
    if n < 1 {
        return Err(Error::InvalidArgument("need at least one channel use".into()));
    }
    let p = model.prior.probs();
    let mu = model.mu;
    let mut probs = p.to_vec();
    for _ in 1..n {
        let mut next = Vec::with_capacity(probs.len() * 4);
        for (idx, &w) in probs.iter().enumerate() {
            let last = idx & 3;
            for (k, &pk) in p.iter().enumerate() {
                let step = (T::one() - mu) * pk + if k == last { mu } else { T::zero() };
                next.push(w * step);
            }
        }
        probs = next;
    }
    ProbTable::normalized(n, probs)
}

/// Derivative of every entry of [`correlated_table`] with respect to `mu`.
pub fn correlated_table_mu_derivative<T: Real>(
    model: &CorrelationModel<T>,
    n: usize,
) -> Result<Vec<T>> {
    if n < 1 {
        return Err(Error::InvalidArgument("need at least one channel use".into()));
    }
    let p = model.prior.probs();
    let mu = model.mu;
    let mut value = p.to_vec();
    let mut deriv = vec![T::zero(); 4];
    for _ in 1..n {
        let mut nv = Vec::with_capacity(value.len() * 4);
        let mut nd = Vec::with_capacity(value.len() * 4);
        for (idx, (&w, &dw)) in value.iter().zip(&deriv).enumerate() {
            let last = idx & 3;
            for (k, &pk) in p.iter().enumerate() {
                let delta = if k == last { T::one() } else { T::zero() };
                let step = (T::one() - mu) * pk + mu * delta;
                nv.push(w * step);
                nd.push(dw * step + w * (delta - pk));
            }
        }
        value = nv;
        deriv = nd;
    }
    Ok(deriv)
}

/// Product table `q_{k1..kn} = prod_j q^{(j)}_{kj}`.
pub fn factorized_table<T: Real>(priors: &[ProbTable<T>]) -> Result<ProbTable<T>> {
    if priors.is_empty() {
        return Err(Error::InvalidArgument("no priors given".into()));
    }
    if let Some(bad) = priors.iter().find(|p| p.n() != 1) {
        return Err(Error::InvalidArgument(format!(
            "priors must be single-use tables, got n = {}",
            bad.n()
        )));
    }
    let mut probs = vec![T::one()];
    for prior in priors {
        probs = probs
            .iter()
            .flat_map(|&w| prior.probs().iter().map(move |&pk| w * pk))
            .collect();
    }
    ProbTable::normalized(priors.len(), probs)
}
