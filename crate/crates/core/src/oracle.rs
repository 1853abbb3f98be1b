//! Exact statevector reference for small systems, plus exhaustive MaxCut.
//!
//! Every gate is turned into its Jordan–Wigner Pauli Hamiltonian and applied
//! as `exp(-i·t·H)` through a Hermitian eigendecomposition. Qubits that only
//! carry `Z` factors in every term of a gate are treated as classical signs, so
//! a gate is exponentiated on the qubits where it actually flips bits.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fermiops::{pauli_decompose, Circuit, Pauli, PauliTerm};
use crate::measure::{Bits, MeasurementQuery};

pub const ORACLE_MAX_QUBITS: usize = 14;
pub const MAXCUT_MAX_NODES: usize = 20;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn check_size(n: usize) -> Result<()> {
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::TooLarge {
            what: "exact simulation qubit count",
            max: ORACLE_MAX_QUBITS,
            got: n,
        });
    }
    Ok(())
}

/// A dense `2^N × 2^N` complex operator, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    n_qubits: usize,
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseOperator {
    pub fn zeros(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            n_qubits,
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        let mut m = Self::zeros(n_qubits);
        for k in 0..m.dim {
            m.data[k * m.dim + k] = ONE;
        }
        m
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    fn add_at(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.dim + c] += v;
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.n_qubits);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.data[c * self.dim + r] = self.get(r, c).conj();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(self.n_qubits);
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    out.data[r * d + c] += a * rhs.data[k * d + c];
                }
            }
        }
        out
    }

    pub fn scaled_add(&mut self, s: Complex64, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|r| self.data[r * self.dim..(r + 1) * self.dim].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self.get(k, k)).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_residual(&self) -> f64 {
        self.adjoint().mul(self).max_abs_diff(&Self::identity(self.n_qubits))
    }

    /// `exp(-i·t·H)` for Hermitian `self`.
    pub fn exp_hermitian(&self, t: f64) -> Self {
        let data = exp_hermitian_raw(self.dim, &self.data, t);
        Self {
            n_qubits: self.n_qubits,
            dim: self.dim,
            data,
        }
    }
}

/// `exp(-i·t·H)` of a row-major Hermitian matrix via its eigendecomposition.
fn exp_hermitian_raw(dim: usize, h: &[Complex64], t: f64) -> Vec<Complex64> {
    let m = DMatrix::from_row_slice(dim, dim, h);
    let eig = SymmetricEigen::new(m);
    let v = &eig.eigenvectors;
    let phases: Vec<Complex64> = eig.eigenvalues.iter().map(|&l| Complex64::new(0.0, -l * t).exp()).collect();
    let mut out = vec![ZERO; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            let mut acc = ZERO;
            for k in 0..dim {
                acc += v[(r, k)] * phases[k] * v[(c, k)].conj();
            }
            out[r * dim + c] = acc;
        }
    }
    out
}

/// Action of a single Pauli on bit `b`: `(flips, phase)` with `P|b⟩ = phase·|b ⊕ flips⟩`.
fn pauli_action(p: Pauli, bit: bool) -> (bool, Complex64) {
    match (p, bit) {
        (Pauli::I, _) => (false, ONE),
        (Pauli::X, _) => (true, ONE),
        (Pauli::Y, false) => (true, I),
        (Pauli::Y, true) => (true, -I),
        (Pauli::Z, false) => (false, ONE),
        (Pauli::Z, true) => (false, -ONE),
    }
}

/// Applies a Pauli string (qubit 0 is the most significant bit) to basis
/// state `b` of an `n`-qubit register.
fn pauli_string_action(ops: &[Pauli], b: usize) -> (usize, Complex64) {
    let n = ops.len();
    let mut out = b;
    let mut phase = ONE;
    for (q, &p) in ops.iter().enumerate() {
        let shift = n - 1 - q;
        let (flip, ph) = pauli_action(p, (b >> shift) & 1 == 1);
        if flip {
            out ^= 1 << shift;
        }
        phase *= ph;
    }
    (out, phase)
}

/// `Σ coefficient · P` as a dense matrix.
pub fn pauli_to_dense(terms: &[PauliTerm], n: usize) -> Result<DenseOperator> {
    check_size(n)?;
    for t in terms {
        if t.ops.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: t.ops.len(),
            });
        }
    }
    let mut h = DenseOperator::zeros(n);
    for t in terms {
        for b in 0..h.dim {
            let (row, phase) = pauli_string_action(&t.ops, b);
            h.add_at(row, b, phase * t.coefficient);
        }
    }
    Ok(h)
}

/// Dense Majorana operator: `c_2i = Z…Z X_i`, `c_2i+1 = Z…Z Y_i`.
pub fn majorana_operator(k: usize, n: usize) -> Result<DenseOperator> {
    if k >= 2 * n {
        return Err(Error::ModeOutOfRange {
            index: k / 2,
            n_modes: n,
        });
    }
    let mut ops = vec![Pauli::I; n];
    for op in &mut ops[..k / 2] {
        *op = Pauli::Z;
    }
    ops[k / 2] = if k.is_multiple_of(2) { Pauli::X } else { Pauli::Y };
    pauli_to_dense(&[PauliTerm { coefficient: 1.0, ops }], n)
}

/// A gate Hamiltonian restricted to the qubits its terms flip.
struct ReducedGate {
    n: usize,
    /// Qubits carrying `X` or `Y` in some term, ascending.
    active: Vec<usize>,
    /// Per term: reduced Pauli string on `active`, coefficient, and the
    /// inactive qubits carrying `Z`.
    terms: Vec<(Vec<Pauli>, f64, Vec<usize>)>,
    time: f64,
}

impl ReducedGate {
    fn new(terms: &[PauliTerm], n: usize, time: f64) -> Self {
        let mut is_active = vec![false; n];
        for t in terms {
            for (q, p) in t.ops.iter().enumerate() {
                if matches!(p, Pauli::X | Pauli::Y) {
                    is_active[q] = true;
                }
            }
        }
        let active: Vec<usize> = (0..n).filter(|&q| is_active[q]).collect();
        let reduced = terms
            .iter()
            .map(|t| {
                let ops = active.iter().map(|&q| t.ops[q]).collect();
                let env = (0..n).filter(|&q| !is_active[q] && t.ops[q] == Pauli::Z).collect();
                (ops, t.coefficient, env)
            })
            .collect();
        Self {
            n,
            active,
            terms: reduced,
            time,
        }
    }

    fn bit(&self, b: usize, q: usize) -> bool {
        (b >> (self.n - 1 - q)) & 1 == 1
    }

    /// Term signs contributed by the inactive qubits of basis state `b`.
    fn signs(&self, b: usize) -> Vec<bool> {
        self.terms
            .iter()
            .map(|(_, _, env)| env.iter().filter(|&&q| self.bit(b, q)).count() % 2 == 1)
            .collect()
    }

    fn unitary_for(&self, signs: &[bool]) -> Vec<Complex64> {
        let k = self.active.len();
        let d = 1usize << k;
        let mut h = vec![ZERO; d * d];
        for ((ops, coef, _), &neg) in self.terms.iter().zip(signs) {
            let c = if neg { -coef } else { *coef };
            for s in 0..d {
                let (row, phase) = pauli_string_action(ops, s);
                h[row * d + s] += phase * c;
            }
        }
        exp_hermitian_raw(d, &h, self.time)
    }

    /// Basis index with the active qubits replaced by the bits of `s`.
    fn embed(&self, base: usize, s: usize) -> usize {
        let k = self.active.len();
        let mut b = base;
        for (idx, &q) in self.active.iter().enumerate() {
            let shift = self.n - 1 - q;
            if (s >> (k - 1 - idx)) & 1 == 1 {
                b |= 1 << shift;
            }
        }
        b
    }

    fn apply(&self, psi: &mut [Complex64]) {
        let k = self.active.len();
        let d = 1usize << k;
        let active_mask: usize = self.active.iter().map(|&q| 1usize << (self.n - 1 - q)).sum();
        let mut cache: BTreeMap<Vec<bool>, Vec<Complex64>> = BTreeMap::new();
        let mut idx = vec![0usize; d];
        let mut buf = vec![ZERO; d];
        for base in 0..psi.len() {
            if base & active_mask != 0 {
                continue;
            }
            let signs = self.signs(base);
            let u = cache.entry(signs).or_insert_with_key(|s| self.unitary_for(s));
            for s in 0..d {
                idx[s] = self.embed(base, s);
                buf[s] = psi[idx[s]];
            }
            for r in 0..d {
                psi[idx[r]] = u[r * d..(r + 1) * d].iter().zip(&buf).map(|(a, b)| a * b).sum();
            }
        }
    }
}

/// Applies `U = Π exp(-i·t_l·H_l)` (first gate first) to `psi` in place.
pub fn evolve_state(circuit: &Circuit, psi: &mut [Complex64]) -> Result<()> {
    let n = circuit.n_modes();
    check_size(n)?;
    if psi.len() != 1usize << n {
        return Err(Error::DimensionMismatch {
            expected: 1usize << n,
            got: psi.len(),
        });
    }
    for g in circuit.gates() {
        let terms = pauli_decompose(g, n)?;
        ReducedGate::new(&terms, n, g.time).apply(psi);
    }
    Ok(())
}

/// `U|x⟩`.
pub fn final_state(circuit: &Circuit, x: &Bits) -> Result<Vec<Complex64>> {
    let n = circuit.n_modes();
    check_size(n)?;
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let mut psi = vec![ZERO; 1usize << n];
    psi[x.to_index()] = ONE;
    evolve_state(circuit, &mut psi)?;
    Ok(psi)
}

/// Marginal distribution over the masked qubits, indexed by the outcome read
/// as a big-endian integer.
pub fn exact_distribution(circuit: &Circuit, x: &Bits, mask: &Bits) -> Result<Vec<f64>> {
    let n = circuit.n_modes();
    if mask.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: mask.len() });
    }
    let psi = final_state(circuit, x)?;
    let measured = mask.ones_positions();
    let k = measured.len();
    let mut dist = vec![0.0; 1usize << k];
    for (b, amp) in psi.iter().enumerate() {
        let y = measured
            .iter()
            .fold(0usize, |acc, &q| (acc << 1) | ((b >> (n - 1 - q)) & 1));
        dist[y] += amp.norm_sqr();
    }
    Ok(dist)
}

pub fn exact_probability(circuit: &Circuit, q: &MeasurementQuery) -> Result<f64> {
    let dist = exact_distribution(circuit, q.x(), q.mask())?;
    Ok(dist[q.y().to_index()])
}

/// The full circuit unitary, column `b` being `U|b⟩`.
pub fn circuit_unitary(circuit: &Circuit) -> Result<DenseOperator> {
    let n = circuit.n_modes();
    check_size(n)?;
    let mut u = DenseOperator::zeros(n);
    for b in 0..u.dim {
        let mut psi = vec![ZERO; u.dim];
        psi[b] = ONE;
        evolve_state(circuit, &mut psi)?;
        for (r, a) in psi.into_iter().enumerate() {
            u.data[r * u.dim + b] = a;
        }
    }
    Ok(u)
}

/// `U c_k U†` as a dense operator.
pub fn conjugated_majorana(u: &DenseOperator, k: usize) -> Result<DenseOperator> {
    let c = majorana_operator(k, u.n_qubits())?;
    Ok(u.mul(&c).mul(&u.adjoint()))
}

/// `C_kl = Tr(c_l · U c_k U†) / 2^N`, the Majorana-basis coefficients of the
/// conjugated operators, together with the largest imaginary part seen.
pub fn conjugation_matrix(circuit: &Circuit) -> Result<(DMatrix<f64>, f64)> {
    let n = circuit.n_modes();
    let u = circuit_unitary(circuit)?;
    let majoranas: Vec<DenseOperator> = (0..2 * n).map(|l| majorana_operator(l, n)).collect::<Result<_>>()?;
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    let mut worst_imag: f64 = 0.0;
    let norm = (1usize << n) as f64;
    for k in 0..2 * n {
        let conj = u.mul(&majoranas[k]).mul(&u.adjoint());
        for (l, cl) in majoranas.iter().enumerate() {
            let v = cl.mul(&conj).trace() / norm;
            out[(k, l)] = v.re;
            worst_imag = worst_imag.max(v.im.abs());
        }
    }
    Ok((out, worst_imag))
}

/// An undirected weighted graph without self loops or repeated edges.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n_nodes: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    pub fn new(n_nodes: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut seen = Vec::with_capacity(edges.len());
        for &(i, j, w) in &edges {
            if i == j {
                return Err(Error::InvalidGraph("self loop"));
            }
            if i >= n_nodes || j >= n_nodes {
                return Err(Error::InvalidGraph("node index out of range"));
            }
            if !w.is_finite() {
                return Err(Error::InvalidGraph("non-finite weight"));
            }
            let key = (i.min(j), i.max(j));
            if seen.contains(&key) {
                return Err(Error::InvalidGraph("duplicate edge"));
            }
            seen.push(key);
        }
        Ok(Self { n_nodes, edges })
    }

    /// Complete graph with weights drawn uniformly from `[0.1, 1)`.
    pub fn random_complete<R: Rng + ?Sized>(n_nodes: usize, rng: &mut R) -> Self {
        let mut edges = Vec::new();
        for i in 0..n_nodes {
            for j in i + 1..n_nodes {
                edges.push((i, j, rng.random_range(0.1..1.0)));
            }
        }
        Self { n_nodes, edges }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    /// `Σ w_ij` over edges whose endpoints differ in `bits`.
    pub fn cut_value(&self, bits: &[bool]) -> f64 {
        self.edges.iter().filter(|&&(i, j, _)| bits[i] != bits[j]).map(|e| e.2).sum()
    }
}

/// Best cut over all `2^n` assignments; the smallest binary value wins ties.
pub fn maxcut_exhaustive(g: &WeightedGraph) -> Result<(Bits, f64)> {
    let n = g.n_nodes;
    if n > MAXCUT_MAX_NODES {
        return Err(Error::TooLarge {
            what: "exhaustive MaxCut node count",
            max: MAXCUT_MAX_NODES,
            got: n,
        });
    }
    let mut best = Bits::zeros(n);
    let mut best_value = g.cut_value(best.as_slice());
    for v in 1..1usize << n {
        let b = Bits::from_index(v, n);
        let value = g.cut_value(b.as_slice());
        if value > best_value {
            best_value = value;
            best = b;
        }
    }
    Ok((best, best_value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermiops::{circuit_r_matrix, GateSpec, ModePair, PairBlock};
    use crate::measure::CircuitEvaluator;
    use core::f64::consts::FRAC_PI_4;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bits(s: &str) -> Bits {
        s.parse().unwrap()
    }

    fn term(coefficient: f64, s: &str) -> PauliTerm {
        PauliTerm {
            coefficient,
            ops: s.chars().map(|c| Pauli::from_char(c).unwrap()).collect(),
        }
    }

    #[test]
    fn z_on_single_qubit() {
        let h = pauli_to_dense(&[term(1.0, "Z")], 1).unwrap();
        assert_eq!(h.get(0, 0), ONE);
        assert_eq!(h.get(1, 1), -ONE);
        assert_eq!(h.get(0, 1), ZERO);
    }

    #[test]
    fn diagonal_sum() {
        let (a, b) = (0.3, 1.1);
        let h = pauli_to_dense(&[term(-a / 2.0, "ZI"), term(-b / 2.0, "IZ")], 2).unwrap();
        let expect = [-(a + b) / 2.0, (b - a) / 2.0, (a - b) / 2.0, (a + b) / 2.0];
        for (k, e) in expect.iter().enumerate() {
            assert!((h.get(k, k).re - e).abs() < 1e-15);
        }
    }

    #[test]
    fn y_matrix_convention() {
        let y = pauli_to_dense(&[term(1.0, "Y")], 1).unwrap();
        assert_eq!(y.get(0, 1), -I);
        assert_eq!(y.get(1, 0), I);
    }

    #[test]
    fn too_many_qubits() {
        assert!(matches!(pauli_to_dense(&[], 15), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn majoranas_anticommute() {
        let n = 3;
        let cs: Vec<_> = (0..2 * n).map(|k| majorana_operator(k, n).unwrap()).collect();
        for k in 0..2 * n {
            for l in 0..2 * n {
                let mut ac = cs[k].mul(&cs[l]);
                ac.scaled_add(ONE, &cs[l].mul(&cs[k]));
                let mut expect = DenseOperator::zeros(n);
                if k == l {
                    expect.scaled_add(Complex64::new(2.0, 0.0), &DenseOperator::identity(n));
                }
                assert!(ac.max_abs_diff(&expect) < 1e-15);
            }
        }
    }

    #[test]
    fn vacuum_pair_expectation_is_i() {
        let c0 = majorana_operator(0, 1).unwrap();
        let c1 = majorana_operator(1, 1).unwrap();
        assert_eq!(c0.mul(&c1).get(0, 0), I);
    }

    #[test]
    fn decomposed_gate_is_hermitian() {
        let g = GateSpec::general(0, 2, [0.3, -0.4, 1.2, 0.8, -0.1, 0.6]).unwrap();
        let h = pauli_to_dense(&pauli_decompose(&g, 3).unwrap(), 3).unwrap();
        assert!(h.hermiticity_residual() < 1e-12);
    }

    #[test]
    fn reduced_application_matches_dense_exponential() {
        let gates = [
            GateSpec::general(0, 3, [0.3, -0.4, 1.2, 0.8, -0.1, 0.6]).unwrap().with_time(0.7),
            GateSpec::preserving(1, 2, [0.5, 0.2, -0.9, 0.4]).unwrap(),
        ];
        for g in gates {
            let c = Circuit::with_gates(4, vec![g.clone()]).unwrap();
            let u = circuit_unitary(&c).unwrap();
            let h = pauli_to_dense(&pauli_decompose(&g, 4).unwrap(), 4).unwrap();
            assert!(u.max_abs_diff(&h.exp_hermitian(g.time)) < 1e-12);
            assert!(u.unitarity_residual() < 1e-12);
        }
    }

    #[test]
    fn identity_circuit_is_indicator() {
        let c = Circuit::new(3);
        let d = exact_distribution(&c, &bits("101"), &bits("111")).unwrap();
        for (y, p) in d.iter().enumerate() {
            assert_eq!(*p, if y == 0b101 { 1.0 } else { 0.0 });
        }
        let d = exact_distribution(&c, &bits("101"), &bits("000")).unwrap();
        assert_eq!(d, vec![1.0]);
    }

    #[test]
    fn hopping_quarter_turn() {
        let c = Circuit::with_gates(2, vec![GateSpec::preserving(0, 1, [0.0, 0.0, FRAC_PI_4, 0.0]).unwrap()]).unwrap();
        let exact = exact_distribution(&c, &bits("10"), &bits("11")).unwrap();
        assert!(exact[0b00].abs() < 1e-15 && exact[0b11].abs() < 1e-15);
        assert!((exact[0b01] + exact[0b10] - 1.0).abs() < 1e-14);
        let fast = CircuitEvaluator::new(&c).distribution(&bits("10"), &bits("11")).unwrap();
        for (a, b) in exact.iter().zip(&fast) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn conjugation_matches_r_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut c = Circuit::with_gates(
            3,
            vec![
                GateSpec::general(0, 2, [0.0; 6]).unwrap(),
                GateSpec::preserving(1, 2, [0.0; 4]).unwrap().with_time(0.6),
                GateSpec::dense_layer(vec![
                    PairBlock { pair: ModePair::new(0, 1).unwrap(), params: [0.0; 6] },
                    PairBlock { pair: ModePair::new(1, 2).unwrap(), params: [0.0; 6] },
                ])
                .unwrap(),
            ],
        )
        .unwrap();
        c.randomize_parameters(&mut rng);
        let (conj, imag) = conjugation_matrix(&c).unwrap();
        let r = circuit_r_matrix(&c);
        assert!(imag < 1e-12);
        for k in 0..6 {
            for l in 0..6 {
                assert!((conj[(k, l)] - r.get(k, l)).abs() < 1e-10, "({k},{l})");
            }
        }
    }

    #[test]
    fn maxcut_single_edge_tie_break() {
        let g = WeightedGraph::new(2, vec![(0, 1, 2.5)]).unwrap();
        let (b, v) = maxcut_exhaustive(&g).unwrap();
        assert_eq!(b, bits("01"));
        assert_eq!(v, 2.5);
    }

    #[test]
    fn maxcut_triangle() {
        let g = WeightedGraph::new(3, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        assert_eq!(maxcut_exhaustive(&g).unwrap(), (bits("001"), 2.0));
    }

    #[test]
    fn graph_validation() {
        assert!(WeightedGraph::new(3, vec![(1, 1, 1.0)]).is_err());
        assert!(WeightedGraph::new(3, vec![(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        assert!(WeightedGraph::new(3, vec![(0, 3, 1.0)]).is_err());
        let big = WeightedGraph::new(21, vec![]).unwrap();
        assert!(matches!(maxcut_exhaustive(&big), Err(Error::TooLarge { .. })));
    }

    /// Depth-first branch and bound over node assignments with node 0 fixed to 0.
    fn maxcut_branch_and_bound(g: &WeightedGraph) -> f64 {
        let n = g.n_nodes();
        let mut w = vec![vec![0.0; n]; n];
        for &(i, j, x) in g.edges() {
            w[i][j] += x;
            w[j][i] += x;
        }
        fn go(w: &[Vec<f64>], side: &mut Vec<bool>, current: f64, best: &mut f64) {
            let k = side.len();
            let n = w.len();
            if k == n {
                *best = best.max(current);
                return;
            }
            let remaining: f64 = (k..n).map(|a| (0..n).filter(|&b| b < a).map(|b| w[a][b].max(0.0)).sum::<f64>()).sum();
            if current + remaining <= *best {
                return;
            }
            for s in [false, true] {
                let gain: f64 = (0..k).filter(|&b| side[b] != s).map(|b| w[k][b]).sum();
                side.push(s);
                go(w, side, current + gain, best);
                side.pop();
            }
        }
        let mut best = f64::NEG_INFINITY;
        let mut side = vec![false];
        go(&w, &mut side, 0.0, &mut best);
        best
    }

    #[test]
    fn maxcut_matches_branch_and_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let g = WeightedGraph::random_complete(12, &mut rng);
        let (b, v) = maxcut_exhaustive(&g).unwrap();
        assert!((v - maxcut_branch_and_bound(&g)).abs() < 1e-12);
        assert!((g.cut_value(b.as_slice()) - v).abs() < 1e-15);
    }
}
