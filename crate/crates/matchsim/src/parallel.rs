//! Rayon-backed batch evaluation.
//!
//! Each parallel unit computes exactly what its serial counterpart computes,
//! so results are bit-identical to serial mode.

use matchsim_core::optimize::{fd_component, gradient_fd, Objective, ParameterVector};
use matchsim_core::{Circuit, CircuitEvaluator, MeasurementQuery, Result};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Serial,
}

impl Execution {
    pub fn from_serial_flag(serial: bool) -> Self {
        if serial {
            Self::Serial
        } else {
            Self::Parallel
        }
    }
}

pub fn probability_batch(ev: &CircuitEvaluator, queries: &[MeasurementQuery], mode: Execution) -> Result<Vec<f64>> {
    match mode {
        Execution::Serial => ev.probability_batch(queries),
        Execution::Parallel => queries.par_iter().map(|q| ev.probability(q)).collect(),
    }
}

pub fn gradient(obj: &Objective, circuit: &Circuit, step: f64, mode: Execution) -> Result<ParameterVector> {
    match mode {
        Execution::Serial => gradient_fd(obj, circuit, step),
        Execution::Parallel => (0..circuit.parameter_count())
            .into_par_iter()
            .map(|p| fd_component(obj, circuit, p, step))
            .collect::<Result<Vec<_>>>()
            .map(ParameterVector),
    }
}
