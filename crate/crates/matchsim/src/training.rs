//! Builders for the three training workflows and their final metrics.

use matchsim_core::fermiops::{nearest_neighbor_pairs, ModePair, PairFamily};
use matchsim_core::optimize::{train_with, Objective, RbfMixtureKernel, TrainOptions, TrainResult};
use matchsim_core::oracle::WeightedGraph;
use matchsim_core::{Bits, Circuit, CircuitEvaluator, MeasurementQuery, Result};

use crate::parallel::{gradient, Execution};
use crate::tasks::{Bitmap, Pdf};

pub const BORN_SIGMAS: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Memorize,
    Born,
    Maxcut,
}

/// Objective, starting circuit and default hyperparameters for one run.
#[derive(Debug, Clone)]
pub struct TaskSetup {
    pub task: Task,
    pub objective: Objective,
    pub circuit: Circuit,
    pub options: TrainOptions,
}

fn prefix_mask(k: usize, n: usize) -> Bits {
    Bits::new((0..n).map(|i| i < k).collect())
}

/// `x = y = pattern`, every qubit measured, one nearest-neighbor preserving layer.
pub fn memorize(pattern: &Bitmap) -> Result<TaskSetup> {
    let n = pattern.bits.len();
    let q = MeasurementQuery::full(pattern.bits.clone(), pattern.bits.clone())?;
    let circuit = Circuit::from_pairs(n, &nearest_neighbor_pairs(n), PairFamily::Preserving)?;
    Ok(TaskSetup {
        task: Task::Memorize,
        objective: Objective::neg_prob(q),
        circuit,
        options: TrainOptions {
            iters: 200,
            lr: 0.1,
            beta1: 0.5,
            ..TrainOptions::default()
        },
    })
}

/// `k` data qubits followed by `k` ancillas; every mode couples to the last
/// one through two layers of general gates.
pub fn born(target: &Pdf) -> Result<TaskSetup> {
    let k = target.n_bits;
    let n = 2 * k;
    let mask = prefix_mask(k, n);
    let kernel = RbfMixtureKernel::new(BORN_SIGMAS.to_vec(), k)?;
    let objective = Objective::mmd(mask.clone(), mask, target.probabilities.clone(), kernel)?;
    let pairs = (0..n - 1).map(|i| ModePair::new(i, n - 1)).collect::<Result<Vec<_>>>()?;
    let layer = [pairs.as_slice(), pairs.as_slice()].concat();
    let circuit = Circuit::from_pairs(n, &layer, PairFamily::General)?;
    Ok(TaskSetup {
        task: Task::Born,
        objective,
        circuit,
        options: TrainOptions {
            iters: 200,
            lr: 0.1,
            beta1: 0.5,
            ..TrainOptions::default()
        },
    })
}

/// One qubit per node plus as many ancillas, alternating input, measured on
/// the node qubits, one nearest-neighbor preserving layer.
pub fn maxcut(graph: &WeightedGraph) -> Result<TaskSetup> {
    let k = graph.n_nodes();
    let n = 2 * k;
    let objective = Objective::maxcut(Bits::alternating(n), prefix_mask(k, n), graph.clone())?;
    let circuit = Circuit::from_pairs(n, &nearest_neighbor_pairs(n), PairFamily::Preserving)?;
    Ok(TaskSetup {
        task: Task::Maxcut,
        objective,
        circuit,
        options: TrainOptions {
            iters: 40,
            lr: 0.05,
            beta1: 0.5,
            ..TrainOptions::default()
        },
    })
}

pub fn run(setup: &TaskSetup, mode: Execution) -> Result<TrainResult> {
    train_with(&setup.objective, &setup.circuit, &setup.options, |o, c, h| gradient(o, c, h, mode))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    Probability(f64),
    Mmd(f64),
    Cut {
        expected: f64,
        argmax: Bits,
        argmax_cut: f64,
    },
}

/// The headline number for a trained circuit.
pub fn metric(obj: &Objective, circuit: &Circuit) -> Result<Metric> {
    let ev = CircuitEvaluator::new(circuit);
    let loss = obj.evaluate_with(&ev)?;
    Ok(match obj {
        Objective::NegProb(_) => Metric::Probability(-loss),
        Objective::Mmd { .. } => Metric::Mmd(loss),
        Objective::MaxcutExpectation { x, mask, graph } => {
            let dist = ev.distribution(x, mask)?;
            let (best, _) = dist
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc });
            let argmax = Bits::from_index(best, graph.n_nodes());
            let argmax_cut = graph.cut_value(argmax.as_slice());
            Metric::Cut {
                expected: -loss,
                argmax,
                argmax_cut,
            }
        }
    })
}
