//! Training objectives, central finite-difference gradients and Adam.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fermiops::Circuit;
use crate::measure::{Bits, CircuitEvaluator, MeasurementQuery};
use crate::oracle::WeightedGraph;

pub const DEFAULT_FD_STEP: f64 = 1e-5;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;
/// Largest measured subsystem an enumerating objective accepts.
pub const MAX_SUPPORT_QUBITS: usize = 14;

/// Flat circuit parameters: gate order, then per-gate order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector(pub Vec<f64>);

impl ParameterVector {
    pub fn from_circuit(c: &Circuit) -> Self {
        Self(c.parameters())
    }

    pub fn write_to(&self, c: &mut Circuit) -> Result<()> {
        c.set_parameters(&self.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `K(u, v) = Σ_σ exp(-‖u − v‖² / (2σ))` over all `k`-bit strings.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfMixtureKernel {
    sigma_list: Vec<f64>,
    n_bits: usize,
    gram: Vec<f64>,
}

impl RbfMixtureKernel {
    pub fn new(sigma_list: Vec<f64>, n_bits: usize) -> Result<Self> {
        if sigma_list.is_empty() || sigma_list.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidObjective("kernel bandwidths must be positive"));
        }
        check_support(n_bits)?;
        let d = 1usize << n_bits;
        let mut gram = vec![0.0; d * d];
        for u in 0..d {
            for v in 0..d {
                // squared distance of bit vectors is the Hamming distance
                let dist = (u ^ v).count_ones() as f64;
                gram[u * d + v] = sigma_list.iter().map(|s| libm::exp(-dist / (2.0 * s))).sum();
            }
        }
        Ok(Self {
            sigma_list,
            n_bits,
            gram,
        })
    }

    pub fn sigma_list(&self) -> &[f64] {
        &self.sigma_list
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.gram[u * (1usize << self.n_bits) + v]
    }

    /// `dᵀ K d`.
    pub fn quadratic_form(&self, d: &[f64]) -> f64 {
        let n = d.len();
        let mut acc = 0.0;
        for u in 0..n {
            let row = &self.gram[u * n..(u + 1) * n];
            acc += d[u] * row.iter().zip(d).map(|(k, x)| k * x).sum::<f64>();
        }
        acc
    }
}

fn check_support(k: usize) -> Result<()> {
    if k > MAX_SUPPORT_QUBITS {
        return Err(Error::TooLarge {
            what: "enumerated outcome qubits",
            max: MAX_SUPPORT_QUBITS,
            got: k,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// `-p(y*|x*)`.
    NegProb(MeasurementQuery),
    /// `(p_data − p_model)ᵀ K (p_data − p_model)` over every outcome on `mask`.
    Mmd {
        x: Bits,
        mask: Bits,
        target: Vec<f64>,
        kernel: RbfMixtureKernel,
    },
    /// Normalized expectation of `-cut(y)` over every outcome on `mask`;
    /// graph node `i` is the `i`-th measured qubit.
    MaxcutExpectation { x: Bits, mask: Bits, graph: WeightedGraph },
}

impl Objective {
    pub fn neg_prob(q: MeasurementQuery) -> Self {
        Self::NegProb(q)
    }

    pub fn mmd(x: Bits, mask: Bits, target: Vec<f64>, kernel: RbfMixtureKernel) -> Result<Self> {
        let k = mask.count_ones();
        check_support(k)?;
        if mask.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: mask.len(),
            });
        }
        if kernel.n_bits() != k || target.len() != 1usize << k {
            return Err(Error::InvalidObjective("target and kernel must cover every outcome of the mask"));
        }
        Ok(Self::Mmd { x, mask, target, kernel })
    }

    pub fn maxcut(x: Bits, mask: Bits, graph: WeightedGraph) -> Result<Self> {
        let k = mask.count_ones();
        check_support(k)?;
        if mask.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: mask.len(),
            });
        }
        if graph.n_nodes() != k {
            return Err(Error::InvalidObjective("graph nodes must match measured qubits"));
        }
        Ok(Self::MaxcutExpectation { x, mask, graph })
    }

    /// Number of outcomes evaluated per call.
    pub fn support_size(&self) -> usize {
        match self {
            Self::NegProb(_) => 1,
            Self::Mmd { mask, .. } | Self::MaxcutExpectation { mask, .. } => 1usize << mask.count_ones(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            Self::NegProb(q) => q.n_qubits(),
            Self::Mmd { x, .. } | Self::MaxcutExpectation { x, .. } => x.len(),
        }
    }

    pub fn evaluate(&self, circuit: &Circuit) -> Result<f64> {
        if circuit.n_modes() != self.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: circuit.n_modes(),
                got: self.n_qubits(),
            });
        }
        let ev = CircuitEvaluator::new(circuit);
        self.evaluate_with(&ev)
    }

    pub fn evaluate_with(&self, ev: &CircuitEvaluator) -> Result<f64> {
        let loss = match self {
            Self::NegProb(q) => -ev.probability(q)?,
            Self::Mmd { x, mask, target, kernel } => {
                let model = ev.distribution(x, mask)?;
                let diff: Vec<f64> = target.iter().zip(&model).map(|(a, b)| a - b).collect();
                kernel.quadratic_form(&diff)
            }
            Self::MaxcutExpectation { x, mask, graph } => {
                let model = ev.distribution(x, mask)?;
                let k = graph.n_nodes();
                let mut num = 0.0;
                let mut den = 0.0;
                for (y, p) in model.iter().enumerate() {
                    let b = Bits::from_index(y, k);
                    num -= p * graph.cut_value(b.as_slice());
                    den += p;
                }
                num / den
            }
        };
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss);
        }
        Ok(loss)
    }
}

/// `(f(θ + h·e_p) − f(θ − h·e_p)) / 2h` for a single parameter `p`.
pub fn fd_component(obj: &Objective, circuit: &Circuit, p: usize, step: f64) -> Result<f64> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidStep);
    }
    let base = circuit.parameters();
    let mut shifted = circuit.clone();
    let mut theta = base.clone();
    theta[p] = base[p] + step;
    shifted.set_parameters(&theta)?;
    let plus = obj.evaluate(&shifted)?;
    theta[p] = base[p] - step;
    shifted.set_parameters(&theta)?;
    let minus = obj.evaluate(&shifted)?;
    Ok((plus - minus) / (2.0 * step))
}

/// Central-difference gradient, evaluated serially.
pub fn gradient_fd(obj: &Objective, circuit: &Circuit, step: f64) -> Result<ParameterVector> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidStep);
    }
    (0..circuit.parameter_count())
        .map(|p| fd_component(obj, circuit, p, step))
        .collect::<Result<Vec<_>>>()
        .map(ParameterVector)
}

/// Adam moments and hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamState {
    pub fn new(n_params: usize, lr: f64, beta1: f64) -> Self {
        Self {
            lr,
            beta1,
            beta2: ADAM_BETA2,
            epsilon: ADAM_EPSILON,
            step: 0,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
        }
    }
}

/// One bias-corrected Adam update of `params` in place.
pub fn adam_step(state: &mut AdamState, params: &mut ParameterVector, grad: &ParameterVector) -> Result<()> {
    if params.len() != state.m.len() || grad.len() != state.m.len() {
        return Err(Error::DimensionMismatch {
            expected: state.m.len(),
            got: if params.len() != state.m.len() { params.len() } else { grad.len() },
        });
    }
    state.step += 1;
    let t = state.step as i32;
    let c1 = 1.0 - libm::pow(state.beta1, t as f64);
    let c2 = 1.0 - libm::pow(state.beta2, t as f64);
    for ((theta, g), (m, v)) in params.0.iter_mut().zip(&grad.0).zip(state.m.iter_mut().zip(state.v.iter_mut())) {
        *m = state.beta1 * *m + (1.0 - state.beta1) * g;
        *v = state.beta2 * *v + (1.0 - state.beta2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *theta -= state.lr * m_hat / (libm::sqrt(v_hat) + state.epsilon);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub iters: usize,
    pub lr: f64,
    pub beta1: f64,
    pub seed: u64,
    /// Draw fresh `[0, π)` parameters from `seed` before training.
    pub randomize: bool,
    pub fd_step: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            iters: 100,
            lr: 0.1,
            beta1: 0.9,
            seed: 0,
            randomize: true,
            fd_step: DEFAULT_FD_STEP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainResult {
    pub circuit: Circuit,
    /// Loss before each update.
    pub losses: Vec<f64>,
    /// Loss after the last update.
    pub final_loss: f64,
}

/// Serial training loop; see [`train_with`].
pub fn train(obj: &Objective, circuit: &Circuit, opts: &TrainOptions) -> Result<TrainResult> {
    train_with(obj, circuit, opts, gradient_fd)
}

/// Adam on `obj` with a caller-supplied gradient routine.
pub fn train_with<G>(obj: &Objective, circuit: &Circuit, opts: &TrainOptions, mut gradient: G) -> Result<TrainResult>
where
    G: FnMut(&Objective, &Circuit, f64) -> Result<ParameterVector>,
{
    if opts.iters == 0 {
        return Err(Error::InvalidObjective("iters must be at least 1"));
    }
    let mut c = circuit.clone();
    if opts.randomize {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        c.randomize_parameters(&mut rng);
    }
    let mut params = ParameterVector::from_circuit(&c);
    let mut state = AdamState::new(params.len(), opts.lr, opts.beta1);
    let mut losses = Vec::with_capacity(opts.iters);
    for _ in 0..opts.iters {
        losses.push(obj.evaluate(&c)?);
        let g = gradient(obj, &c, opts.fd_step)?;
        adam_step(&mut state, &mut params, &g)?;
        params.write_to(&mut c)?;
    }
    let final_loss = obj.evaluate(&c)?;
    Ok(TrainResult {
        circuit: c,
        losses,
        final_loss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermiops::GateSpec;
    use crate::oracle::{exact_probability, maxcut_exhaustive};

    fn bits(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn kernel_structure() {
        let k = RbfMixtureKernel::new(vec![0.5, 1.0, 2.0], 3).unwrap();
        for u in 0..8 {
            assert!((k.get(u, u) - 3.0).abs() < 1e-15);
            for v in 0..8 {
                assert_eq!(k.get(u, v), k.get(v, u));
            }
        }
        let expect = libm::exp(-2.0 / 1.0) + libm::exp(-2.0 / 2.0) + libm::exp(-2.0 / 4.0);
        assert!((k.get(0b000, 0b011) - expect).abs() < 1e-15);
        assert!(RbfMixtureKernel::new(vec![], 2).is_err());
        assert!(RbfMixtureKernel::new(vec![-1.0], 2).is_err());
    }

    #[test]
    fn neg_prob_identity() {
        let c = Circuit::new(3);
        let obj = Objective::neg_prob(MeasurementQuery::full(bits("110"), bits("110")).unwrap());
        assert_eq!(obj.evaluate(&c).unwrap(), -1.0);
    }

    #[test]
    fn mmd_zero_on_match() {
        let c = Circuit::with_gates(3, vec![GateSpec::general(0, 2, [0.3, 0.1, 0.5, 0.2, 0.9, 0.4]).unwrap()]).unwrap();
        let x = bits("100");
        let mask = bits("111");
        let target = CircuitEvaluator::new(&c).distribution(&x, &mask).unwrap();
        let k = RbfMixtureKernel::new(vec![0.25, 1.0], 3).unwrap();
        let obj = Objective::mmd(x, mask, target, k).unwrap();
        assert!(obj.evaluate(&c).unwrap().abs() < 1e-15);
    }

    #[test]
    fn mmd_shape_checked() {
        let k = RbfMixtureKernel::new(vec![1.0], 2).unwrap();
        assert!(Objective::mmd(bits("10"), bits("10"), vec![0.5, 0.5], k).is_err());
    }

    #[test]
    fn maxcut_concentrated_on_optimum() {
        let g = WeightedGraph::new(2, vec![(0, 1, 1.5)]).unwrap();
        let (best, value) = maxcut_exhaustive(&g).unwrap();
        // identity circuit with x = best concentrates on best
        let obj = Objective::maxcut(best.clone(), bits("11"), g).unwrap();
        assert_eq!(obj.evaluate(&Circuit::new(2)).unwrap(), -value);
    }

    #[test]
    fn empty_mask_has_zero_gradient() {
        let c = Circuit::with_gates(2, vec![GateSpec::preserving(0, 1, [0.3, 0.2, 0.8, 0.1]).unwrap()]).unwrap();
        let obj = Objective::neg_prob(MeasurementQuery::new(bits("10"), bits("00"), Bits::zeros(0)).unwrap());
        let g = gradient_fd(&obj, &c, DEFAULT_FD_STEP).unwrap();
        assert!(g.0.iter().all(|&x| x == 0.0));
        assert_eq!(gradient_fd(&obj, &c, 0.0), Err(Error::InvalidStep));
    }

    #[test]
    fn hopping_gradient_matches_closed_form() {
        // x = 10 under hopping c: p(01) = sin²(c), so dp/dc = sin(2c)
        let cval = 0.37;
        let c = Circuit::with_gates(2, vec![GateSpec::preserving(0, 1, [0.0, 0.0, cval, 0.0]).unwrap()]).unwrap();
        let q = MeasurementQuery::full(bits("10"), bits("01")).unwrap();
        let p = exact_probability(&c, &q).unwrap();
        assert!((p - libm::pow(libm::sin(cval), 2.0)).abs() < 1e-12);
        let obj = Objective::neg_prob(q);
        let g = gradient_fd(&obj, &c, DEFAULT_FD_STEP).unwrap();
        assert!((g.0[2] + libm::sin(2.0 * cval)).abs() < 1e-6);
    }

    #[test]
    fn adam_zero_gradient() {
        let mut s = AdamState::new(2, 0.1, 0.9);
        let mut p = ParameterVector(vec![1.0, 2.0]);
        adam_step(&mut s, &mut p, &ParameterVector(vec![0.0, 0.0])).unwrap();
        assert_eq!(p.0, vec![1.0, 2.0]);
        assert_eq!(s.step, 1);
    }

    #[test]
    fn adam_first_step_magnitude() {
        let mut s = AdamState::new(3, 0.05, 0.9);
        let mut p = ParameterVector(vec![0.0; 3]);
        adam_step(&mut s, &mut p, &ParameterVector(vec![3.0, -0.2, 1e-3])).unwrap();
        for (x, sign) in p.0.iter().zip([-1.0, 1.0, -1.0]) {
            assert!((x - sign * 0.05).abs() < 1e-4);
        }
    }

    #[test]
    fn adam_quadratic_bowl() {
        let mut s = AdamState::new(2, 0.1, 0.9);
        let mut p = ParameterVector(vec![1.5, -2.0]);
        let f = |p: &ParameterVector| p.0.iter().map(|x| x * x).sum::<f64>();
        let mut trace = vec![f(&p)];
        for _ in 0..20 {
            let g = ParameterVector(p.0.iter().map(|x| 2.0 * x).collect());
            adam_step(&mut s, &mut p, &g).unwrap();
            trace.push(f(&p));
        }
        for w in trace[3..].windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn train_lr_zero_keeps_parameters() {
        let c = Circuit::with_gates(2, vec![GateSpec::preserving(0, 1, [0.3, 0.2, 0.8, 0.1]).unwrap()]).unwrap();
        let obj = Objective::neg_prob(MeasurementQuery::full(bits("10"), bits("01")).unwrap());
        let opts = TrainOptions {
            iters: 1,
            lr: 0.0,
            randomize: false,
            ..TrainOptions::default()
        };
        let r = train(&obj, &c, &opts).unwrap();
        assert_eq!(r.losses.len(), 1);
        assert_eq!(r.circuit.parameters(), c.parameters());
    }

    #[test]
    fn train_is_deterministic() {
        let c = Circuit::with_gates(3, vec![GateSpec::preserving(0, 1, [0.0; 4]).unwrap(), GateSpec::preserving(1, 2, [0.0; 4]).unwrap()]).unwrap();
        let obj = Objective::neg_prob(MeasurementQuery::full(bits("100"), bits("001")).unwrap());
        let opts = TrainOptions {
            iters: 5,
            seed: 9,
            ..TrainOptions::default()
        };
        assert_eq!(train(&obj, &c, &opts).unwrap(), train(&obj, &c, &opts).unwrap());
    }
}
