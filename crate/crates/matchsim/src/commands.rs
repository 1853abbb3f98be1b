//! Subcommand implementations. Each writes its report to `out`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use matchsim_core::fermiops::pauli_decompose;
use matchsim_core::oracle::{exact_distribution, ORACLE_MAX_QUBITS};
use matchsim_core::{Bits, Circuit, CircuitEvaluator, Error as CoreError, MeasurementQuery};

use crate::bench::{bench_point, write_csv};
use crate::circuit_file::CircuitConfig;
use crate::error::{CliError, ParseError};
use crate::parallel::{probability_batch, Execution};
use crate::tasks::{parse_edges, parse_pbm, parse_pdf};
use crate::training::{self, Metric, Task};

pub type CliResult<T> = Result<T, CliError>;

/// Total-variation threshold for `compare`.
pub const COMPARE_TOLERANCE: f64 = 1e-9;

/// Twelve decimals, switching to scientific notation below `1e-3`.
pub fn format_number(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:.12e}")
    } else {
        format!("{x:.12}")
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn parsed<T>(path: &Path, r: Result<T, ParseError>) -> CliResult<T> {
    r.map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn io<T>(path: &Path, r: std::io::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::io(path, e))
}

pub fn load_circuit(path: &Path, seed: Option<u64>) -> CliResult<Circuit> {
    let cfg = parsed(path, CircuitConfig::parse(&read(path)?))?;
    Ok(cfg.build(seed)?)
}

pub fn parse_bits(what: &'static str, s: &str) -> CliResult<Bits> {
    s.parse().map_err(|e| CliError::Argument {
        what,
        message: format!("{e}"),
    })
}

fn out_err(e: std::io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

pub fn prob(out: &mut dyn Write, circuit: &Path, x: &str, y: &str, mask: Option<&str>, seed: Option<u64>) -> CliResult<()> {
    let c = load_circuit(circuit, seed)?;
    let x = parse_bits("--x", x)?;
    let y = parse_bits("--y", y)?;
    let mask = match mask {
        Some(m) => parse_bits("--mask", m)?,
        None => Bits::ones(x.len()),
    };
    // A full-length y is restricted to the measured positions.
    let y = if y.len() == mask.len() && y.len() != mask.count_ones() {
        Bits::new(mask.ones_positions().into_iter().map(|i| y.get(i)).collect())
    } else {
        y
    };
    let q = MeasurementQuery::new(x, mask, y)?;
    let p = CircuitEvaluator::new(&c).probability(&q)?;
    writeln!(out, "{}", format_number(p)).map_err(out_err)
}

pub fn compare(out: &mut dyn Write, circuit: &Path, x: &str, seed: Option<u64>, mode: Execution) -> CliResult<()> {
    let c = load_circuit(circuit, seed)?;
    let n = c.n_modes();
    if n > ORACLE_MAX_QUBITS {
        return Err(CoreError::TooLarge {
            what: "oracle qubits",
            max: ORACLE_MAX_QUBITS,
            got: n,
        }
        .into());
    }
    let x = parse_bits("--x", x)?;
    if x.len() != n {
        return Err(CoreError::DimensionMismatch { expected: n, got: x.len() }.into());
    }
    let exact = exact_distribution(&c, &x, &Bits::ones(n))?;
    let queries = (0..1usize << n)
        .map(|y| MeasurementQuery::full(x.clone(), Bits::from_index(y, n)))
        .collect::<Result<Vec<_>, _>>()?;
    let fermion = probability_batch(&CircuitEvaluator::new(&c), &queries, mode)?;
    writeln!(out, "outcome\tfermion\texact\tabs_diff").map_err(out_err)?;
    let mut tv = 0.0;
    for (y, (f, e)) in fermion.iter().zip(&exact).enumerate() {
        let d = (f - e).abs();
        tv += d;
        writeln!(out, "{}\t{}\t{}\t{}", Bits::from_index(y, n), format_number(*f), format_number(*e), format_number(d)).map_err(out_err)?;
    }
    writeln!(out, "TV\t{tv:.6e}").map_err(out_err)?;
    if tv < COMPARE_TOLERANCE {
        Ok(())
    } else {
        Err(CliError::Mismatch {
            tv,
            tolerance: COMPARE_TOLERANCE,
        })
    }
}

pub fn bench(out: &mut dyn Write, n_list: &[usize], layers: usize, reps: usize, seed: u64, csv: &Path) -> CliResult<()> {
    if let Some(&n) = n_list.iter().find(|&&n| n == 0 || n % 2 == 1) {
        return Err(CliError::Argument {
            what: "--n-list",
            message: format!("qubit counts must be positive and even, got {n}"),
        });
    }
    if reps == 0 {
        return Err(CliError::Argument {
            what: "--reps",
            message: "must be at least 1".into(),
        });
    }
    let mut records = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let r = bench_point(n, layers, reps, seed)?;
        writeln!(out, "{}", r.csv_row()).map_err(out_err)?;
        records.push(r);
    }
    let file = io(csv, fs::File::create(csv))?;
    io(csv, write_csv(std::io::BufWriter::new(file), &records))
}

pub struct TrainArgs<'a> {
    pub task: Task,
    pub input: &'a Path,
    pub iters: Option<usize>,
    pub lr: Option<f64>,
    pub beta1: Option<f64>,
    pub seed: u64,
    pub out: &'a Path,
    pub params_out: Option<&'a Path>,
    pub mode: Execution,
}

/// Where `train` writes the final circuit when no explicit path is given.
pub fn default_params_path(out: &Path) -> PathBuf {
    out.with_extension("circuit")
}

pub fn train(out: &mut dyn Write, a: &TrainArgs<'_>) -> CliResult<()> {
    let text = read(a.input)?;
    let mut setup = match a.task {
        Task::Memorize => training::memorize(&parsed(a.input, parse_pbm(&text))?)?,
        Task::Born => training::born(&parsed(a.input, parse_pdf(&text))?)?,
        Task::Maxcut => training::maxcut(&parsed(a.input, parse_edges(&text))?)?,
    };
    let o = &mut setup.options;
    o.seed = a.seed;
    o.iters = a.iters.unwrap_or(o.iters);
    o.lr = a.lr.unwrap_or(o.lr);
    o.beta1 = a.beta1.unwrap_or(o.beta1);
    if !(o.lr.is_finite() && o.lr >= 0.0) || !(0.0..1.0).contains(&o.beta1) {
        return Err(CliError::Argument {
            what: "--lr/--beta1",
            message: "lr must be finite and nonnegative, beta1 in [0, 1)".into(),
        });
    }
    let result = training::run(&setup, a.mode)?;

    let mut csv = String::from("iteration,loss\n");
    for (i, l) in result.losses.iter().chain(std::iter::once(&result.final_loss)).enumerate() {
        csv.push_str(&format!("{i},{l:e}\n"));
    }
    io(a.out, fs::write(a.out, csv))?;
    let params_path = a.params_out.map_or_else(|| default_params_path(a.out), Path::to_path_buf);
    let mut cfg = CircuitConfig::from_circuit(&result.circuit);
    cfg.seed = Some(a.seed);
    io(&params_path, fs::write(&params_path, cfg.to_text()))?;

    let w = |out: &mut dyn Write, k: &str, v: String| writeln!(out, "{k}\t{v}").map_err(out_err);
    w(out, "iterations", setup.options.iters.to_string())?;
    w(out, "final_loss", format_number(result.final_loss))?;
    match training::metric(&setup.objective, &result.circuit)? {
        Metric::Probability(p) => w(out, "probability", format_number(p))?,
        Metric::Mmd(m) => w(out, "mmd", format_number(m))?,
        Metric::Cut {
            expected,
            argmax,
            argmax_cut,
        } => {
            w(out, "expected_cut", format_number(expected))?;
            w(out, "argmax", argmax.to_string())?;
            w(out, "argmax_cut", format_number(argmax_cut))?;
        }
    }
    Ok(())
}

/// One `coefficient<TAB>string` line per term; sorted by string within each
/// gate, gates in circuit order.
pub fn pauli(out: &mut dyn Write, circuit: &Path, seed: Option<u64>) -> CliResult<()> {
    let c = load_circuit(circuit, seed)?;
    for g in c.gates() {
        let mut terms: Vec<(String, f64)> = pauli_decompose(g, c.n_modes())?
            .into_iter()
            .map(|t| (t.label(), t.coefficient))
            .collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        for (label, coef) in terms {
            writeln!(out, "{}\t{label}", format_number(coef)).map_err(out_err)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(1.0), "1.000000000000");
        assert_eq!(format_number(0.0), "0.000000000000");
        assert_eq!(format_number(-0.5), "-0.500000000000");
        assert_eq!(format_number(2.5e-7), "2.500000000000e-7");
    }

    #[test]
    fn params_path() {
        assert_eq!(default_params_path(Path::new("a/loss.csv")), PathBuf::from("a/loss.circuit"));
    }
}
