//! Wall-clock scaling of a single full-system probability.

use std::io::Write;
use std::time::Instant;

use matchsim_core::fermiops::{nearest_neighbor_pairs, PairFamily};
use matchsim_core::{Bits, Circuit, CircuitEvaluator, MeasurementQuery, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const CSV_HEADER: &str = "n_qubits,n_layers,wall_seconds_mean,wall_seconds_std,repetitions";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub wall_seconds_mean: f64,
    pub wall_seconds_std: f64,
    pub repetitions: usize,
}

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.9},{:.9},{}",
            self.n_qubits, self.n_layers, self.wall_seconds_mean, self.wall_seconds_std, self.repetitions
        )
    }
}

/// `layers` nearest-neighbor preserving layers with parameters seeded by `seed ^ n`.
pub fn bench_circuit(n: usize, layers: usize, seed: u64) -> Result<Circuit> {
    let pairs = nearest_neighbor_pairs(n);
    let all: Vec<_> = (0..layers).flat_map(|_| pairs.iter().copied()).collect();
    let mut c = Circuit::from_pairs(n, &all, PairFamily::Preserving)?;
    c.randomize_parameters(&mut ChaCha8Rng::seed_from_u64(seed ^ n as u64));
    Ok(c)
}

/// Times evaluator construction plus `p(y|x)` with `x = y = 1010…`.
pub fn time_once(c: &Circuit) -> Result<(f64, f64)> {
    let n = c.n_modes();
    let x = Bits::alternating(n);
    let q = MeasurementQuery::full(x.clone(), x)?;
    let start = Instant::now();
    let p = CircuitEvaluator::new(c).probability(&q)?;
    Ok((start.elapsed().as_secs_f64(), p))
}

pub fn bench_point(n: usize, layers: usize, reps: usize, seed: u64) -> Result<BenchRecord> {
    let c = bench_circuit(n, layers, seed)?;
    let times = (0..reps.max(1)).map(|_| time_once(&c).map(|t| t.0)).collect::<Result<Vec<_>>>()?;
    let (mean, std) = mean_std(&times);
    Ok(BenchRecord {
        n_qubits: n,
        n_layers: layers,
        wall_seconds_mean: mean,
        wall_seconds_std: std,
        repetitions: times.len(),
    })
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub fn write_csv<W: Write>(mut w: W, records: &[BenchRecord]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<_> = (1..6).map(|i| (i as f64 * 100.0, 3e-9 * (i as f64 * 100.0).powi(3))).collect();
        assert!((loglog_slope(&pts) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn statistics() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn small_point() {
        let r = bench_point(4, 1, 1, 0).unwrap();
        assert!(r.wall_seconds_mean > 0.0);
        assert_eq!(r.repetitions, 1);
        let mut out = Vec::new();
        write_csv(&mut out, &[r]).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        assert_eq!(text.lines().count(), 2);
    }
}
