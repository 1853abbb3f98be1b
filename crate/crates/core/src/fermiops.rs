//! Gates, circuits and their Majorana rotation matrices.
//!
//! A gate acts on a pair of modes `(i, j)` (or, for a dense layer, on a set of
//! pairs) through a quadratic Hamiltonian `H = (i/4)·cᵀ A c`. The coefficient
//! matrix `A` touches only the Majoranas `2i, 2i+1, 2j, 2j+1` of each pair, so
//! the rotation `exp(-A·t)` is computed on that support and embedded.
//!
//! Parameter layouts:
//!
//! - `Preserving(a, b, c, d)`: `H = a·n_i + b·n_j + (c + i·d)·a†_i a_j + h.c.`
//!   (4 real parameters, conserves particle number).
//! - `General(a, b, c, d, e, f)`: the pair block of `A` on rows/columns
//!   `(2i, 2i+1, 2j, 2j+1)` is `[[0,e,a,b],[-e,0,c,d],[-a,-c,0,f],[-b,-d,-f,0]]`.
//! - `DenseLayer`: a list of general pair blocks summed into one Hamiltonian.
//!
//! Additive constants in the Hamiltonian only contribute a global phase and
//! are dropped everywhere, including in the Pauli export.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::skewlin::{canonical_decompose, RMatrix, SkewMatrix};

/// An ordered pair of modes `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModePair {
    i: usize,
    j: usize,
}

impl ModePair {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i >= j {
            return Err(Error::UnorderedPair { i, j });
        }
        Ok(Self { i, j })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    fn check(&self, n_modes: usize) -> Result<()> {
        if self.j >= n_modes {
            return Err(Error::ModeOutOfRange {
                index: self.j,
                n_modes,
            });
        }
        Ok(())
    }
}

/// One general pair block of a dense layer.
#[derive(Debug, Clone, PartialEq)]
pub struct PairBlock {
    pub pair: ModePair,
    pub params: [f64; 6],
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    Preserving { pair: ModePair, params: [f64; 4] },
    General { pair: ModePair, params: [f64; 6] },
    DenseLayer(Vec<PairBlock>),
}

/// A gate together with its evolution time.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub time: f64,
}

/// Maps preserving parameters `(a, b, c, d)` onto the general layout.
pub fn preserving_as_general(p: [f64; 4]) -> [f64; 6] {
    let [a, b, c, d] = p;
    [d, c, -c, d, a, b]
}

impl GateSpec {
    pub fn preserving(i: usize, j: usize, params: [f64; 4]) -> Result<Self> {
        Ok(Self {
            kind: GateKind::Preserving {
                pair: ModePair::new(i, j)?,
                params,
            },
            time: 1.0,
        })
    }

    pub fn general(i: usize, j: usize, params: [f64; 6]) -> Result<Self> {
        Ok(Self {
            kind: GateKind::General {
                pair: ModePair::new(i, j)?,
                params,
            },
            time: 1.0,
        })
    }

    pub fn dense_layer(blocks: Vec<PairBlock>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for b in &blocks {
            if !seen.insert(b.pair) {
                return Err(Error::DuplicatePair {
                    i: b.pair.i,
                    j: b.pair.j,
                });
            }
        }
        Ok(Self {
            kind: GateKind::DenseLayer(blocks),
            time: 1.0,
        })
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn validate(&self, n_modes: usize) -> Result<()> {
        if !self.time.is_finite() {
            return Err(Error::NonFiniteParameter);
        }
        match &self.kind {
            GateKind::Preserving { pair, params } => {
                pair.check(n_modes)?;
                check_finite(params)
            }
            GateKind::General { pair, params } => {
                pair.check(n_modes)?;
                check_finite(params)
            }
            GateKind::DenseLayer(blocks) => {
                let mut seen = BTreeSet::new();
                for b in blocks {
                    b.pair.check(n_modes)?;
                    check_finite(&b.params)?;
                    if !seen.insert(b.pair) {
                        return Err(Error::DuplicatePair {
                            i: b.pair.i,
                            j: b.pair.j,
                        });
                    }
                }
                Ok(())
            }
        }
    }

    /// Sorted modes the gate touches.
    pub fn modes(&self) -> Vec<usize> {
        let mut set = BTreeSet::new();
        match &self.kind {
            GateKind::Preserving { pair, .. } | GateKind::General { pair, .. } => {
                set.insert(pair.i);
                set.insert(pair.j);
            }
            GateKind::DenseLayer(blocks) => {
                for b in blocks {
                    set.insert(b.pair.i);
                    set.insert(b.pair.j);
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn parameter_count(&self) -> usize {
        match &self.kind {
            GateKind::Preserving { .. } => 4,
            GateKind::General { .. } => 6,
            GateKind::DenseLayer(blocks) => 6 * blocks.len(),
        }
    }

    pub fn parameters(&self) -> Vec<f64> {
        match &self.kind {
            GateKind::Preserving { params, .. } => params.to_vec(),
            GateKind::General { params, .. } => params.to_vec(),
            GateKind::DenseLayer(blocks) => blocks.iter().flat_map(|b| b.params).collect(),
        }
    }

    /// Overwrites the parameters from `values`, which must hold exactly
    /// [`parameter_count`](Self::parameter_count) numbers.
    pub fn set_parameters(&mut self, values: &[f64]) -> Result<()> {
        let expected = self.parameter_count();
        if values.len() != expected {
            return Err(Error::ParameterCount {
                expected,
                got: values.len(),
            });
        }
        match &mut self.kind {
            GateKind::Preserving { params, .. } => params.copy_from_slice(values),
            GateKind::General { params, .. } => params.copy_from_slice(values),
            GateKind::DenseLayer(blocks) => {
                for (b, chunk) in blocks.iter_mut().zip(values.chunks_exact(6)) {
                    b.params.copy_from_slice(chunk);
                }
            }
        }
        Ok(())
    }

    /// Upper-triangle entries `(k, l, A_kl)` with `k < l` in Majorana indices.
    /// Dense-layer blocks on different pairs may share entries; callers sum them.
    fn alpha_entries(&self) -> Vec<(usize, usize, f64)> {
        match &self.kind {
            GateKind::Preserving { pair, params } => general_entries(*pair, &preserving_as_general(*params)),
            GateKind::General { pair, params } => general_entries(*pair, params),
            GateKind::DenseLayer(blocks) => blocks.iter().flat_map(|b| general_entries(b.pair, &b.params)).collect(),
        }
    }
}

fn check_finite(p: &[f64]) -> Result<()> {
    if p.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteParameter)
    }
}

fn general_entries(pair: ModePair, p: &[f64; 6]) -> Vec<(usize, usize, f64)> {
    let (i, j) = (pair.i, pair.j);
    let [a, b, c, d, e, f] = *p;
    vec![
        (2 * i, 2 * i + 1, e),
        (2 * i, 2 * j, a),
        (2 * i, 2 * j + 1, b),
        (2 * i + 1, 2 * j, c),
        (2 * i + 1, 2 * j + 1, d),
        (2 * j, 2 * j + 1, f),
    ]
}

/// The `2N × 2N` coefficient matrix of the gate Hamiltonian.
pub fn assemble_alpha(gate: &GateSpec, n_modes: usize) -> Result<SkewMatrix> {
    gate.validate(n_modes)?;
    let n = 2 * n_modes;
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (k, l, v) in gate.alpha_entries() {
        a[(k, l)] += v;
        a[(l, k)] -= v;
    }
    Ok(SkewMatrix::from_skew_unchecked(a))
}

/// The gate's rotation restricted to the Majoranas of the modes it touches.
#[derive(Debug, Clone)]
pub struct GateBlock {
    /// Sorted modes; local Majorana `2m + s` is global `2·modes[m] + s`.
    pub modes: Vec<usize>,
    pub rotation: DMatrix<f64>,
}

impl GateBlock {
    pub fn new(gate: &GateSpec) -> Self {
        let modes = gate.modes();
        let local = |k: usize| {
            let m = modes.binary_search(&(k / 2)).expect("entry on gate support");
            2 * m + k % 2
        };
        let n = 2 * modes.len();
        let mut a = DMatrix::<f64>::zeros(n, n);
        for (k, l, v) in gate.alpha_entries() {
            let (lk, ll) = (local(k), local(l));
            a[(lk, ll)] += v;
            a[(ll, lk)] -= v;
        }
        let rotation = canonical_decompose(&SkewMatrix::from_skew_unchecked(a)).exp_neg(gate.time);
        Self { modes, rotation }
    }

    fn global_index(&self, local: usize) -> usize {
        2 * self.modes[local / 2] + local % 2
    }

    /// `R ← R · R_gate`; only the columns on the gate support change.
    pub fn right_multiply(&self, r: &mut DMatrix<f64>) {
        let s = self.rotation.nrows();
        let cols: Vec<usize> = (0..s).map(|l| self.global_index(l)).collect();
        let rows = r.nrows();
        let mut scratch = vec![0.0; s];
        for row in 0..rows {
            for (b, out) in scratch.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (a, &ca) in cols.iter().enumerate() {
                    acc += r[(row, ca)] * self.rotation[(a, b)];
                }
                *out = acc;
            }
            for (b, &cb) in cols.iter().enumerate() {
                r[(row, cb)] = scratch[b];
            }
        }
    }

    pub fn to_full(&self, n_modes: usize) -> RMatrix {
        let mut r = DMatrix::<f64>::identity(2 * n_modes, 2 * n_modes);
        let s = self.rotation.nrows();
        for a in 0..s {
            for b in 0..s {
                r[(self.global_index(a), self.global_index(b))] = self.rotation[(a, b)];
            }
        }
        RMatrix::from_matrix(r)
    }
}

/// `exp(-A·t)` for the gate, as a full `2N × 2N` matrix.
pub fn gate_r_matrix(gate: &GateSpec, n_modes: usize) -> Result<RMatrix> {
    gate.validate(n_modes)?;
    Ok(GateBlock::new(gate).to_full(n_modes))
}

/// A free-fermion circuit on `n_modes` modes. `gates[0]` acts first.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_modes: usize,
    gates: Vec<GateSpec>,
}

/// Which pair-gate family a layout helper fills in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairFamily {
    Preserving,
    General,
}

impl Circuit {
    pub fn new(n_modes: usize) -> Self {
        Self {
            n_modes,
            gates: Vec::new(),
        }
    }

    pub fn with_gates(n_modes: usize, gates: Vec<GateSpec>) -> Result<Self> {
        let mut c = Self::new(n_modes);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    /// Zero-parameter pair gates on `pairs`, in order.
    pub fn from_pairs(n_modes: usize, pairs: &[ModePair], family: PairFamily) -> Result<Self> {
        let gates = pairs
            .iter()
            .map(|p| match family {
                PairFamily::Preserving => GateSpec::preserving(p.i, p.j, [0.0; 4]),
                PairFamily::General => GateSpec::general(p.i, p.j, [0.0; 6]),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_gates(n_modes, gates)
    }

    pub fn push(&mut self, gate: GateSpec) -> Result<()> {
        gate.validate(self.n_modes)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn gates(&self) -> &[GateSpec] {
        &self.gates
    }

    pub fn parameter_count(&self) -> usize {
        self.gates.iter().map(GateSpec::parameter_count).sum()
    }

    /// Flat parameters in gate order, then per-gate order.
    pub fn parameters(&self) -> Vec<f64> {
        self.gates.iter().flat_map(GateSpec::parameters).collect()
    }

    pub fn set_parameters(&mut self, values: &[f64]) -> Result<()> {
        let expected = self.parameter_count();
        if values.len() != expected {
            return Err(Error::ParameterCount {
                expected,
                got: values.len(),
            });
        }
        check_finite(values)?;
        let mut offset = 0;
        for g in &mut self.gates {
            let k = g.parameter_count();
            g.set_parameters(&values[offset..offset + k])?;
            offset += k;
        }
        Ok(())
    }

    /// Draws every parameter uniformly from `[0, π)`.
    pub fn randomize_parameters<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let values: Vec<f64> = (0..self.parameter_count()).map(|_| PI * rng.random::<f64>()).collect();
        self.set_parameters(&values).expect("count matches");
    }
}

/// Nearest-neighbour pairs `(0,1), (1,2), …, (n-2, n-1)`.
pub fn nearest_neighbor_pairs(n_modes: usize) -> Vec<ModePair> {
    (1..n_modes).map(|j| ModePair { i: j - 1, j }).collect()
}

/// All pairs `i < j` in lexicographic order.
pub fn all_pairs(n_modes: usize) -> Vec<ModePair> {
    let mut out = Vec::new();
    for i in 0..n_modes {
        for j in i + 1..n_modes {
            out.push(ModePair { i, j });
        }
    }
    out
}

/// `R_total = R⁽¹⁾·R⁽²⁾·…·R⁽ᵐ⁾`, gate 1 being the first applied to the state.
pub fn circuit_r_matrix(circuit: &Circuit) -> RMatrix {
    let mut r = RMatrix::identity(circuit.n_modes);
    for g in &circuit.gates {
        GateBlock::new(g).right_multiply(r.as_matrix_mut());
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// `coefficient · ops[0] ⊗ ops[1] ⊗ …`, qubit 0 leftmost.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub ops: Vec<Pauli>,
}

impl PauliTerm {
    fn single(n: usize, q: usize, p: Pauli, coefficient: f64) -> Self {
        let mut ops = vec![Pauli::I; n];
        ops[q] = p;
        Self { coefficient, ops }
    }

    /// `coefficient · P_i (Z_{i+1} … Z_{j-1}) Q_j`.
    fn string(n: usize, pair: ModePair, first: Pauli, last: Pauli, coefficient: f64) -> Self {
        let mut ops = vec![Pauli::I; n];
        ops[pair.i] = first;
        for op in &mut ops[pair.i + 1..pair.j] {
            *op = Pauli::Z;
        }
        ops[pair.j] = last;
        Self { coefficient, ops }
    }

    pub fn label(&self) -> alloc::string::String {
        self.ops.iter().map(|p| p.as_char()).collect()
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t", self.coefficient)?;
        for p in &self.ops {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

/// Jordan–Wigner Pauli expansion of the gate Hamiltonian (constants dropped,
/// zero-coefficient terms omitted). Dense layers concatenate their blocks.
pub fn pauli_decompose(gate: &GateSpec, n_modes: usize) -> Result<Vec<PauliTerm>> {
    gate.validate(n_modes)?;
    let n = n_modes;
    let mut terms = Vec::new();
    match &gate.kind {
        GateKind::Preserving { pair, params } => {
            let [a, b, c, d] = *params;
            terms.push(PauliTerm::single(n, pair.i, Pauli::Z, -a / 2.0));
            terms.push(PauliTerm::single(n, pair.j, Pauli::Z, -b / 2.0));
            terms.push(PauliTerm::string(n, *pair, Pauli::X, Pauli::X, c / 2.0));
            terms.push(PauliTerm::string(n, *pair, Pauli::Y, Pauli::Y, c / 2.0));
            terms.push(PauliTerm::string(n, *pair, Pauli::Y, Pauli::X, d / 2.0));
            terms.push(PauliTerm::string(n, *pair, Pauli::X, Pauli::Y, -d / 2.0));
        }
        GateKind::General { pair, params } => general_terms(n, *pair, params, &mut terms),
        GateKind::DenseLayer(blocks) => {
            for b in blocks {
                general_terms(n, b.pair, &b.params, &mut terms);
            }
        }
    }
    terms.retain(|t| t.coefficient != 0.0);
    Ok(terms)
}

fn general_terms(n: usize, pair: ModePair, p: &[f64; 6], out: &mut Vec<PauliTerm>) {
    let [a, b, c, d, e, f] = *p;
    out.push(PauliTerm::single(n, pair.i, Pauli::Z, -e / 2.0));
    out.push(PauliTerm::single(n, pair.j, Pauli::Z, -f / 2.0));
    out.push(PauliTerm::string(n, pair, Pauli::X, Pauli::X, -c / 2.0));
    out.push(PauliTerm::string(n, pair, Pauli::Y, Pauli::Y, b / 2.0));
    out.push(PauliTerm::string(n, pair, Pauli::X, Pauli::Y, -d / 2.0));
    out.push(PauliTerm::string(n, pair, Pauli::Y, Pauli::X, a / 2.0));
}
