use num_complex::Complex;
use rand::Rng;

use super::config::{CorrelationKind, GameConfig};
use super::engine::{BranchOp, Comb};
use super::generator::{generator_table, GeneratorParams};
use crate::channels::{pauli_matrix, ProbTable};
use crate::error::{Error, Result};
use crate::pqc::{layered_ansatz, qcnn, ParamCircuit};
use crate::scalar::{cis, lit, Real};

/// What the channel slots of the comb apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Probe {
    /// Pauli `k_t` on system qubit `t`, all uses in one slot layer.
    Spatial { n: usize },
    /// Pauli `k_t` on the single system qubit at step `t`.
    Temporal { n: usize },
    /// `diag(1, e^{2 pi i b / 2^m})` on every one of `n` system qubits.
    Phase { m: usize, n: usize },
}

/// Wires and circuits of the discriminator.
///
/// Register order is system, ancillas, then the readout qubit `M`. The
/// preparation and any intermediate blocks act on system and ancillas; the
/// QCNN acts on all wires ordered `[M, system, ancillas]` so that `M` is
/// the qubit it keeps.
#[derive(Debug, Clone)]
pub struct DiscriminatorLayout {
    probe: Probe,
    system: Vec<usize>,
    ancilla: Vec<usize>,
    measure: usize,
    init: ParamCircuit,
    mids: Vec<ParamCircuit>,
    qcnn: ParamCircuit,
}

impl DiscriminatorLayout {
    pub fn new(config: &GameConfig) -> Result<Self> {
        config.validate()?;
        let probe = match config.correlation_kind {
            CorrelationKind::Spatial => Probe::Spatial { n: config.n_uses },
            CorrelationKind::Temporal => Probe::Temporal { n: config.n_uses },
        };
        Self::with_probe(config, probe)
    }

    pub(crate) fn with_probe(config: &GameConfig, probe: Probe) -> Result<Self> {
        let (nsys, nmid) = match probe {
            Probe::Spatial { n } => (n, 0),
            Probe::Temporal { n } => (1, n - 1),
            Probe::Phase { n, .. } => (n, 0),
        };
        let width = nsys + config.ancilla_count;
        if width < 2 {
            return Err(Error::InvalidConfig(
                "system and ancilla qubits together must number at least 2".into(),
            ));
        }
        Ok(Self {
            probe,
            system: (0..nsys).collect(),
            ancilla: (nsys..width).collect(),
            measure: width,
            init: layered_ansatz(width, config.init_depth)?,
            mids: (0..nmid)
                .map(|_| layered_ansatz(width, config.mid_depth))
                .collect::<Result<_>>()?,
            qcnn: qcnn(width + 1)?.1,
        })
    }

    pub(crate) fn probe(&self) -> Probe {
        self.probe
    }

    pub fn nqubits(&self) -> usize {
        self.measure + 1
    }

    pub fn system(&self) -> &[usize] {
        &self.system
    }

    pub fn ancilla(&self) -> &[usize] {
        &self.ancilla
    }

    pub fn measure(&self) -> usize {
        self.measure
    }

    pub fn init_params(&self) -> usize {
        self.init.nparams()
    }

    pub fn mid_params(&self) -> Vec<usize> {
        self.mids.iter().map(ParamCircuit::nparams).collect()
    }

    pub fn meas_params(&self) -> usize {
        self.qcnn.nparams()
    }

    pub fn nparams(&self) -> usize {
        self.init_params() + self.mid_params().iter().sum::<usize>() + self.meas_params()
    }

    /// Number of channel branches (`4^n` or `2^m`).
    pub fn nbranches(&self) -> usize {
        match self.probe {
            Probe::Spatial { n } | Probe::Temporal { n } => 1 << (2 * n),
            Probe::Phase { m, .. } => 1 << m,
        }
    }

    /// The circuits on the global register with parameters in the flat order
    /// `[init, mid.., meas]`.
    pub(crate) fn comb<T: Real>(&self) -> Result<Comb<T>> {
        let nq = self.nqubits();
        let total = self.nparams();
        let prep_wires: Vec<usize> = self.system.iter().chain(&self.ancilla).copied().collect();
        let mut qcnn_wires = vec![self.measure];
        qcnn_wires.extend(&prep_wires);
        let mut offset = 0;
        let mut circuits = vec![self.init.embed(&prep_wires, nq, offset, total)?];
        offset += self.init.nparams();
        let on = |q: usize| -> Vec<BranchOp<T>> {
            (0..4u8).map(|k| vec![(q, pauli_matrix::<T>(k))]).collect()
        };
        let mut slots = Vec::new();
        match self.probe {
            Probe::Spatial { n } => {
                for t in 0..n {
                    slots.push(on(self.system[t]));
                    if t + 1 < n {
                        circuits.push(ParamCircuit::new(nq, total));
                    }
                }
            }
            Probe::Temporal { n } => {
                for t in 0..n {
                    slots.push(on(self.system[0]));
                    if t + 1 < n {
                        let mid = &self.mids[t];
                        circuits.push(mid.embed(&prep_wires, nq, offset, total)?);
                        offset += mid.nparams();
                    }
                }
            }
            Probe::Phase { m, .. } => {
                let bins = 1usize << m;
                slots.push(
                    (0..bins)
                        .map(|b| {
                            let s: T = lit::<T>(b as f64) / lit(bins as f64);
                            let one = Complex::new(T::one(), T::zero());
                            let zero = Complex::new(T::zero(), T::zero());
                            let u = [[one, zero], [zero, cis(T::TAU() * s)]];
                            self.system.iter().map(|&q| (q, u)).collect()
                        })
                        .collect(),
                );
            }
        }
        circuits.push(self.qcnn.embed(&qcnn_wires, nq, offset, total)?);
        Ok(Comb::new(nq, total, self.measure, circuits, slots))
    }
}

/// Parameters of the preparation, intermediate and measurement circuits.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminatorParams<T: Real> {
    pub theta_init: Vec<T>,
    pub theta_mid: Vec<Vec<T>>,
    pub theta_meas: Vec<T>,
}

impl<T: Real> DiscriminatorParams<T> {
    pub fn zeros(layout: &DiscriminatorLayout) -> Self {
        Self {
            theta_init: vec![T::zero(); layout.init_params()],
            theta_mid: layout.mid_params().iter().map(|&k| vec![T::zero(); k]).collect(),
            theta_meas: vec![T::zero(); layout.meas_params()],
        }
    }

    /// Independent uniform angles in `[-pi, pi)`.
    pub fn random<R: Rng + ?Sized>(layout: &DiscriminatorLayout, rng: &mut R) -> Self {
        let flat: Vec<T> = (0..layout.nparams())
            .map(|_| lit(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)))
            .collect();
        Self::from_flat(layout, &flat).expect("length matches layout")
    }

    pub fn flatten(&self) -> Vec<T> {
        let mut out = self.theta_init.clone();
        for m in &self.theta_mid {
            out.extend_from_slice(m);
        }
        out.extend_from_slice(&self.theta_meas);
        out
    }

    pub fn from_flat(layout: &DiscriminatorLayout, flat: &[T]) -> Result<Self> {
        if flat.len() != layout.nparams() {
            return Err(Error::DimensionMismatch(format!(
                "discriminator has {} parameters, got {}",
                layout.nparams(),
                flat.len()
            )));
        }
        let (init, mut rest) = flat.split_at(layout.init_params());
        let mut theta_mid = Vec::new();
        for k in layout.mid_params() {
            let (m, r) = rest.split_at(k);
            theta_mid.push(m.to_vec());
            rest = r;
        }
        Ok(Self {
            theta_init: init.to_vec(),
            theta_mid,
            theta_meas: rest.to_vec(),
        })
    }

    pub fn check(&self, layout: &DiscriminatorLayout) -> Result<()> {
        let mids: Vec<usize> = self.theta_mid.iter().map(Vec::len).collect();
        if self.theta_init.len() != layout.init_params()
            || mids != layout.mid_params()
            || self.theta_meas.len() != layout.meas_params()
        {
            return Err(Error::DimensionMismatch(
                "discriminator parameters do not match the circuit layout".into(),
            ));
        }
        Ok(())
    }
}

/// Probability of outcome 1 on `M` for each Pauli branch `k`.
pub fn branch_scores<T: Real>(disc: &DiscriminatorParams<T>, config: &GameConfig) -> Result<Vec<T>> {
    let layout = DiscriminatorLayout::new(config)?;
    disc.check(&layout)?;
    Ok(layout.comb::<T>()?.branch_scores(&disc.flatten()))
}

/// `S = sum_k (p_k - q_k) s_k`.
pub fn score<T: Real>(
    disc: &DiscriminatorParams<T>,
    real_table: &ProbTable<T>,
    gen: &GeneratorParams<T>,
    config: &GameConfig,
) -> Result<T> {
    if real_table.n() != config.n_uses {
        return Err(Error::DimensionMismatch(format!(
            "target table for {} uses, config for {}",
            real_table.n(),
            config.n_uses
        )));
    }
    let q = generator_table(gen, config.n_uses)?;
    let s = branch_scores(disc, config)?;
    Ok(real_table
        .probs()
        .iter()
        .zip(q.probs())
        .zip(&s)
        .map(|((&p, &q), &s)| (p - q) * s)
        .sum())
}
