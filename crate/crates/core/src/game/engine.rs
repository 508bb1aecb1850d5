//! Exact score and parameter-shift gradient of a comb of circuits
//! interleaved with branching unitary slots.

use num_complex::Complex;

use crate::pqc::{rotation_matrix, Gate, GateKind, ParamCircuit};
use crate::qsim::kernels::{adjoint2, apply_1q, apply_cnot, bit_mask};
use crate::qsim::Mat2;
use crate::scalar::{cone, czero, creal, Real};

/// Single-qubit unitaries applied together in one branch of a slot.
pub(crate) type BranchOp<T> = Vec<(usize, Mat2<T>)>;

type Amps<T> = Vec<Complex<T>>;

/// `C_0, slot_1, C_1, .., slot_L, C_L` followed by a readout of `measure`.
///
/// Branch index is `prefix * B + b`, so the first slot is the most
/// significant digit.
#[derive(Debug, Clone)]
pub(crate) struct Comb<T: Real> {
    nqubits: usize,
    nparams: usize,
    measure: usize,
    circuits: Vec<ParamCircuit>,
    slots: Vec<Vec<BranchOp<T>>>,
}

/// Score, per-branch scores and (optionally) gradient at one parameter point.
#[derive(Debug, Clone)]
pub(crate) struct Evaluation<T: Real> {
    pub score: T,
    pub branch_scores: Vec<T>,
    pub gradient: Vec<T>,
}

impl<T: Real> Comb<T> {
    pub fn new(
        nqubits: usize,
        nparams: usize,
        measure: usize,
        circuits: Vec<ParamCircuit>,
        slots: Vec<Vec<BranchOp<T>>>,
    ) -> Self {
        assert_eq!(circuits.len(), slots.len() + 1);
        assert!(circuits.iter().all(|c| c.nqubits() == nqubits && c.nparams() == nparams));
        assert!(slots.iter().all(|s| !s.is_empty()));
        Self {
            nqubits,
            nparams,
            measure,
            circuits,
            slots,
        }
    }

    #[cfg(test)]
    pub fn parts(&self) -> (&[ParamCircuit], &[Vec<BranchOp<T>>], usize, usize) {
        (&self.circuits, &self.slots, self.nqubits, self.measure)
    }

    pub fn nbranches(&self) -> usize {
        self.slots.iter().map(Vec::len).product()
    }

    fn dim(&self) -> usize {
        1 << self.nqubits
    }

    /// States entering each circuit: `levels[t][prefix]` is the input of `C_t`.
    fn forward(&self, params: &[T]) -> Vec<Vec<Amps<T>>> {
        let mut zero = vec![czero::<T>(); self.dim()];
        zero[0] = cone();
        let mut levels = vec![vec![zero]];
        for (t, slot) in self.slots.iter().enumerate() {
            let mut next = Vec::with_capacity(levels[t].len() * slot.len());
            for state in &levels[t] {
                let mut s = state.clone();
                self.circuits[t].apply_in_place(params, &mut s);
                for op in slot {
                    let mut branch = s.clone();
                    for (q, g) in op {
                        apply_1q(&mut branch, self.nqubits, *q, g);
                    }
                    next.push(branch);
                }
            }
            levels.push(next);
        }
        levels
    }

    /// Probability of outcome 1 on the readout qubit for every branch.
    pub fn branch_scores(&self, params: &[T]) -> Vec<T> {
        self.evaluate(params, &vec![T::zero(); self.nbranches()], false)
            .branch_scores
    }

    /// `S = sum_k w_k s_k` and, when `with_gradient`, its exact gradient.
    ///
    /// Gradients use adjoint differentiation: for `R(theta) = exp(-i theta P / 2)`
    /// the shift-rule value `(f(theta + pi/2) - f(theta - pi/2)) / 2` equals
    /// `Im <lambda|P|psi>`, with `psi` the state after the gate and `lambda`
    /// the weighted readout pulled back to the same point. Backward vectors of
    /// branches sharing a prefix are summed before entering the shared circuit.
    pub fn evaluate(&self, params: &[T], weights: &[T], with_gradient: bool) -> Evaluation<T> {
        assert_eq!(params.len(), self.nparams);
        assert_eq!(weights.len(), self.nbranches());
        let nq = self.nqubits;
        let levels = self.forward(params);
        let last = self.circuits.last().expect("circuit");
        let mask = bit_mask(nq, self.measure);
        let finals: Vec<Amps<T>> = levels
            .last()
            .expect("levels")
            .iter()
            .map(|psi| {
                let mut out = psi.clone();
                last.apply_in_place(params, &mut out);
                out
            })
            .collect();
        let branch_scores: Vec<T> = finals
            .iter()
            .map(|psi| {
                psi.iter()
                    .enumerate()
                    .filter(|(i, _)| i & mask != 0)
                    .map(|(_, a)| a.norm_sqr())
                    .sum()
            })
            .collect();
        let score = weights.iter().zip(&branch_scores).map(|(&w, &s)| w * s).sum();
        let mut gradient = vec![T::zero(); self.nparams];
        if !with_gradient {
            return Evaluation {
                score,
                branch_scores,
                gradient,
            };
        }

        // lambda_k = w_k P_1 psi_k at the output, pulled back through C_L
        let mut lambdas: Vec<Amps<T>> = Vec::with_capacity(finals.len());
        for (psi, &w) in finals.into_iter().zip(weights) {
            let lam: Amps<T> = psi
                .iter()
                .enumerate()
                .map(|(i, a)| if i & mask != 0 { a * creal(w) } else { czero() })
                .collect();
            let mut pair = (psi, lam);
            if w != T::zero() {
                self.backward(last, params, &mut pair.0, &mut pair.1, &mut gradient);
            } else {
                for g in last.gates().iter().rev() {
                    apply_gate_adjoint(g, params, &mut pair.1, nq);
                }
            }
            lambdas.push(pair.1);
        }

        for t in (0..self.slots.len()).rev() {
            let slot = &self.slots[t];
            let b = slot.len();
            let circuit = &self.circuits[t];
            let mut next = Vec::with_capacity(levels[t].len());
            for (p, input) in levels[t].iter().enumerate() {
                let mut lam = vec![czero::<T>(); input.len()];
                for (j, op) in slot.iter().enumerate() {
                    let mut v = std::mem::take(&mut lambdas[p * b + j]);
                    for (q, g) in op {
                        apply_1q(&mut v, nq, *q, &adjoint2(g));
                    }
                    for (acc, x) in lam.iter_mut().zip(&v) {
                        *acc += x;
                    }
                }
                let mut psi = input.clone();
                circuit.apply_in_place(params, &mut psi);
                self.backward(circuit, params, &mut psi, &mut lam, &mut gradient);
                next.push(lam);
            }
            lambdas = next;
        }
        Evaluation {
            score,
            branch_scores,
            gradient,
        }
    }

    /// Walks `circuit` backwards from its output, accumulating gradient terms
    /// and leaving `psi` and `lam` at the circuit input.
    fn backward(
        &self,
        circuit: &ParamCircuit,
        params: &[T],
        psi: &mut [Complex<T>],
        lam: &mut [Complex<T>],
        gradient: &mut [T],
    ) {
        let nq = self.nqubits;
        for g in circuit.gates().iter().rev() {
            if let Some(p) = g.param_index() {
                gradient[p] += pauli_inner(lam, psi, nq, g.targets()[0], g.kind()).im;
            }
            apply_gate_adjoint(g, params, psi, nq);
            apply_gate_adjoint(g, params, lam, nq);
        }
    }
}

fn apply_gate_adjoint<T: Real>(g: &Gate, params: &[T], v: &mut [Complex<T>], nq: usize) {
    match g.kind() {
        GateKind::Cnot => apply_cnot(v, nq, g.targets()[0], g.targets()[1]),
        kind => {
            let m = rotation_matrix(kind, -params[g.param_index().expect("rotation")]);
            apply_1q(v, nq, g.targets()[0], &m);
        }
    }
}

/// `<lam| P_q |psi>` for the generator `P` of a rotation gate.
fn pauli_inner<T: Real>(
    lam: &[Complex<T>],
    psi: &[Complex<T>],
    nq: usize,
    qubit: usize,
    kind: GateKind,
) -> Complex<T> {
    let mask = bit_mask(nq, qubit);
    let i = Complex::new(T::zero(), T::one());
    let mut acc = czero::<T>();
    for a in (0..psi.len()).filter(|a| a & mask == 0) {
        let b = a | mask;
        let (l0, l1, p0, p1) = (lam[a].conj(), lam[b].conj(), psi[a], psi[b]);
        acc += match kind {
            GateKind::Rx => l0 * p1 + l1 * p0,
            GateKind::Ry => (l1 * p0 - l0 * p1) * i,
            GateKind::Rz => l0 * p0 - l1 * p1,
            GateKind::Cnot => unreachable!("CNOT has no parameter"),
        };
    }
    acc
}

