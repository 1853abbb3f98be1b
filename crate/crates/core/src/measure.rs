//! Measurement probabilities through Wick's theorem.
//!
//! For an input basis state `|x⟩ = c_{2p_1} … c_{2p_l} |0⟩` (up to sign) and
//! Z-basis projectors on the measured qubits,
//!
//! ```text
//! p(y|x) = ⟨0| c_{2p_l} … c_{2p_1} · Π_j (U† P_j U) · c_{2p_1} … c_{2p_l} |0⟩
//! ```
//!
//! where `U† a_j U = Σ_m T_jm c_m` turns every projector into a product of two
//! operators linear in the Majoranas: `a†a ↦ (T*_j, T_j)` for outcome 1 and
//! `a a† ↦ (T_j, T*_j)` for outcome 0. The vacuum expectation of the resulting
//! product of `2K` linear operators is the Pfaffian of
//! `M_ab = v_aᵀ G v_b` (`a < b`) with vacuum covariance `G = I + iΩ`,
//! `Ω = ⊕ [[0, 1], [-1, 0]]`, i.e. `⟨0|c_2i c_2i+1|0⟩ = i`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermiops::{circuit_r_matrix, Circuit};
use crate::skewlin::{pfaffian_in_place, ComplexSkewMatrix, RMatrix};

/// Tolerated imaginary part of the Pfaffian before a result is rejected.
pub const IMAGINARY_TOLERANCE: f64 = 1e-8;

/// `T` entries below this magnitude are dropped before the Gram products.
const GRAM_FLUSH: f64 = 1e-150;

/// A bitstring, index 0 leftmost.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![true; n])
    }

    /// `n`-bit big-endian encoding of `value` (bit 0 is the most significant).
    pub fn from_index(value: usize, n: usize) -> Self {
        Self((0..n).map(|q| (value >> (n - 1 - q)) & 1 == 1).collect())
    }

    pub fn to_index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    /// `1010…` of length `n`.
    pub fn alternating(n: usize) -> Self {
        Self((0..n).map(|q| q % 2 == 0).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    /// Positions of the set bits, ascending.
    pub fn ones_positions(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Error for a bitstring containing a character other than `0`/`1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitsParseError {
    pub position: usize,
    pub found: char,
}

impl fmt::Display for BitsParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid bit {:?} at position {}", self.found, self.position)
    }
}

impl FromStr for Bits {
    type Err = BitsParseError;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        s.chars()
            .enumerate()
            .map(|(position, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                found => Err(BitsParseError { position, found }),
            })
            .collect::<core::result::Result<Vec<_>, _>>()
            .map(Bits)
    }
}

impl From<&Bits> for String {
    fn from(b: &Bits) -> String {
        alloc::format!("{b}")
    }
}

/// Input `x`, measured-qubit mask and claimed outcome `y` (ordered by
/// ascending masked qubit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementQuery {
    x: Bits,
    mask: Bits,
    y: Bits,
}

impl MeasurementQuery {
    pub fn new(x: Bits, mask: Bits, y: Bits) -> Result<Self> {
        if mask.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: mask.len(),
            });
        }
        let ones = mask.count_ones();
        if ones != y.len() {
            return Err(Error::OutcomeLength {
                mask_ones: ones,
                outcome_len: y.len(),
            });
        }
        Ok(Self { x, mask, y })
    }

    /// All qubits measured.
    pub fn full(x: Bits, y: Bits) -> Result<Self> {
        let mask = Bits::ones(x.len());
        Self::new(x, mask, y)
    }

    pub fn x(&self) -> &Bits {
        &self.x
    }

    pub fn mask(&self) -> &Bits {
        &self.mask
    }

    pub fn y(&self) -> &Bits {
        &self.y
    }

    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    /// `(qubit, outcome)` for every measured qubit, ascending qubit.
    pub fn measured(&self) -> Vec<(usize, bool)> {
        self.mask.ones_positions().into_iter().zip(self.y.as_slice().iter().copied()).collect()
    }
}

/// `T_ij = ½ (R_{j,2i} + i·R_{j,2i+1})`, so that `U† a_i U = Σ_j T_ij c_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TMatrix {
    n_modes: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl TMatrix {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let k = i * 2 * self.n_modes + j;
        Complex64::new(self.re[k], self.im[k])
    }

    pub fn get_conj(&self, i: usize, j: usize) -> Complex64 {
        self.get(i, j).conj()
    }

    fn re_row(&self, i: usize) -> &[f64] {
        let w = 2 * self.n_modes;
        &self.re[i * w..(i + 1) * w]
    }

    fn im_row(&self, i: usize) -> &[f64] {
        let w = 2 * self.n_modes;
        &self.im[i * w..(i + 1) * w]
    }
}

pub fn build_t(r: &RMatrix) -> TMatrix {
    let n = r.n_modes();
    let w = 2 * n;
    let mut re = vec![0.0; n * w];
    let mut im = vec![0.0; n * w];
    let m = r.as_matrix();
    for i in 0..n {
        for j in 0..w {
            re[i * w + j] = 0.5 * m[(j, 2 * i)];
            im[i * w + j] = 0.5 * m[(j, 2 * i + 1)];
        }
    }
    TMatrix { n_modes: n, re, im }
}

/// One operator in the Wick product, as a coefficient vector over the `2N` Majoranas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorVector {
    /// The bare Majorana `c_k` (unit vector `e_k`).
    Majorana(usize),
    /// `U† a_j U`, coefficients `T_j·`.
    Annihilator(usize),
    /// `U† a†_j U`, coefficients `T*_j·`.
    Creator(usize),
}

/// The ordered operator sequence whose vacuum expectation is `p(y|x)`.
#[derive(Debug, Clone)]
pub struct WickSystem<'t> {
    t: &'t TMatrix,
    vectors: Vec<OperatorVector>,
}

impl<'t> WickSystem<'t> {
    pub fn vectors(&self) -> &[OperatorVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Dense coefficient vector of operator `a`.
    pub fn dense_vector(&self, a: usize) -> Vec<Complex64> {
        let w = 2 * self.t.n_modes;
        match self.vectors[a] {
            OperatorVector::Majorana(k) => {
                let mut v = vec![Complex64::new(0.0, 0.0); w];
                v[k] = Complex64::new(1.0, 0.0);
                v
            }
            OperatorVector::Annihilator(j) => (0..w).map(|m| self.t.get(j, m)).collect(),
            OperatorVector::Creator(j) => (0..w).map(|m| self.t.get_conj(j, m)).collect(),
        }
    }

    /// Vacuum covariance `G = I + iΩ`, row-major `2N × 2N`.
    pub fn covariance(&self) -> Vec<Complex64> {
        let w = 2 * self.t.n_modes;
        let mut g = vec![Complex64::new(0.0, 0.0); w * w];
        for k in 0..w {
            g[k * w + k] = Complex64::new(1.0, 0.0);
        }
        for i in 0..self.t.n_modes {
            g[(2 * i) * w + 2 * i + 1] = Complex64::new(0.0, 1.0);
            g[(2 * i + 1) * w + 2 * i] = Complex64::new(0.0, -1.0);
        }
        g
    }

    /// `M_ab = v_aᵀ G v_b` evaluated literally from dense vectors. `O(K²N²)`;
    /// reference path for tests.
    pub fn wick_matrix_dense(&self) -> ComplexSkewMatrix {
        let w = 2 * self.t.n_modes;
        let g = self.covariance();
        let dense: Vec<Vec<Complex64>> = (0..self.len()).map(|a| self.dense_vector(a)).collect();
        ComplexSkewMatrix::from_upper_fn(self.len(), |a, b| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..w {
                if dense[a][k] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for l in 0..w {
                    acc += dense[a][k] * g[k * w + l] * dense[b][l];
                }
            }
            acc
        })
        .expect("even length")
    }

    /// `M_ab = v_aᵀ G v_b` using the structure of the operator list.
    pub fn wick_matrix(&self) -> ComplexSkewMatrix {
        let rows = self.measured_rows();
        let gram = RowGram::new(self.t, &rows);
        self.wick_matrix_with(&gram)
    }

    fn measured_rows(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = self
            .vectors
            .iter()
            .filter_map(|v| match *v {
                OperatorVector::Annihilator(j) | OperatorVector::Creator(j) => Some(j),
                OperatorVector::Majorana(_) => None,
            })
            .collect();
        rows.sort_unstable();
        rows.dedup();
        rows
    }

    fn wick_matrix_with(&self, gram: &RowGram) -> ComplexSkewMatrix {
        ComplexSkewMatrix::from_upper_fn(self.len(), |a, b| gram.bilinear(self.t, self.vectors[a], self.vectors[b]))
            .expect("even length")
    }
}

/// Bilinear forms `αᵀ G β` between the rotated operators of a fixed set of rows.
struct RowGram {
    rows: Vec<usize>,
    /// `F·Fᵀ` with `F = [Re T_rows; Im T_rows]`.
    plain: Vec<f64>,
    /// `F·Ω·Fᵀ`.
    omega: Vec<f64>,
}

impl RowGram {
    fn new(t: &TMatrix, rows: &[usize]) -> Self {
        let k = rows.len();
        let w = 2 * t.n_modes;
        let h = 2 * k;
        let mut f = vec![0.0; h * w];
        for (s, &j) in rows.iter().enumerate() {
            f[s * w..(s + 1) * w].copy_from_slice(t.re_row(j));
            f[(k + s) * w..(k + s + 1) * w].copy_from_slice(t.im_row(j));
        }
        // |T_ij| ≤ ½, so this only drops values that would go subnormal in products
        for x in &mut f {
            if x.abs() < GRAM_FLUSH {
                *x = 0.0;
            }
        }
        // (F·Ω)[r][2i] = -F[r][2i+1], (F·Ω)[r][2i+1] = F[r][2i]
        let mut f_omega = vec![0.0; h * w];
        for r in 0..h {
            let src = &f[r * w..(r + 1) * w];
            let dst = &mut f_omega[r * w..(r + 1) * w];
            for i in 0..w / 2 {
                dst[2 * i] = -src[2 * i + 1];
                dst[2 * i + 1] = src[2 * i];
            }
        }
        let plain = gemm_abt(&f, &f, h, w);
        let omega = gemm_abt(&f_omega, &f, h, w);
        Self {
            rows: rows.to_vec(),
            plain,
            omega,
        }
    }

    fn slot(&self, j: usize) -> usize {
        self.rows.binary_search(&j).expect("row present in gram")
    }

    /// `(Re v, Im v)` at Majorana `m` for a dense operator.
    fn component(t: &TMatrix, v: OperatorVector, m: usize) -> Complex64 {
        match v {
            OperatorVector::Annihilator(j) => t.get(j, m),
            OperatorVector::Creator(j) => t.get_conj(j, m),
            OperatorVector::Majorana(_) => unreachable!(),
        }
    }

    /// `(Ωβ)_k`.
    fn omega_component(t: &TMatrix, v: OperatorVector, k: usize) -> Complex64 {
        if k.is_multiple_of(2) {
            Self::component(t, v, k + 1)
        } else {
            -Self::component(t, v, k - 1)
        }
    }

    fn bilinear(&self, t: &TMatrix, a: OperatorVector, b: OperatorVector) -> Complex64 {
        use OperatorVector::*;
        let i = Complex64::new(0.0, 1.0);
        match (a, b) {
            (Majorana(k), Majorana(l)) => {
                if k == l {
                    Complex64::new(1.0, 0.0)
                } else if k / 2 == l / 2 {
                    if k < l {
                        i
                    } else {
                        -i
                    }
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            // e_kᵀ G β = β_k + i (Ωβ)_k
            (Majorana(k), dense) => Self::component(t, dense, k) + i * Self::omega_component(t, dense, k),
            // αᵀ G e_l = α_l − i (Ωα)_l
            (dense, Majorana(l)) => Self::component(t, dense, l) - i * Self::omega_component(t, dense, l),
            (da, db) => {
                let (s, sa) = match da {
                    Annihilator(j) => (self.slot(j), 1.0),
                    Creator(j) => (self.slot(j), -1.0),
                    Majorana(_) => unreachable!(),
                };
                let (u, sb) = match db {
                    Annihilator(j) => (self.slot(j), 1.0),
                    Creator(j) => (self.slot(j), -1.0),
                    Majorana(_) => unreachable!(),
                };
                let k = self.rows.len();
                let h = 2 * k;
                let at = |m: &[f64], r: usize, c: usize| m[r * h + c];
                let rr = at(&self.plain, s, u);
                let ri = at(&self.plain, s, k + u);
                let ir = at(&self.plain, k + s, u);
                let ii = at(&self.plain, k + s, k + u);
                let orr = at(&self.omega, s, u);
                let ori = at(&self.omega, s, k + u);
                let oir = at(&self.omega, k + s, u);
                let oii = at(&self.omega, k + s, k + u);
                let re = rr - sa * sb * ii - (sb * ori + sa * oir);
                let im = sb * ri + sa * ir + orr - sa * sb * oii;
                Complex64::new(re, im)
            }
        }
    }
}

/// `A·Bᵀ` for row-major `A`, `B` of shape `h × w`.
fn gemm_abt(a: &[f64], b: &[f64], h: usize, w: usize) -> Vec<f64> {
    let mut c = vec![0.0; h * h];
    if h == 0 || w == 0 {
        return c;
    }
    // SAFETY: the slices hold h·w (inputs) and h·h (output) elements and the
    // strides describe exactly those row-major layouts.
    unsafe {
        matrixmultiply::dgemm(
            h,
            w,
            h,
            1.0,
            a.as_ptr(),
            w as isize,
            1,
            b.as_ptr(),
            1,
            w as isize,
            0.0,
            c.as_mut_ptr(),
            h as isize,
            1,
        );
    }
    c
}

/// Operator sequence for a query, measured qubits in ascending order.
pub fn build_wick_system<'t>(t: &'t TMatrix, q: &MeasurementQuery) -> Result<WickSystem<'t>> {
    let order: Vec<usize> = (0..q.y().len()).collect();
    build_wick_system_ordered(t, q, &order)
}

/// Like [`build_wick_system`] but visits the measured qubits in `order`
/// (a permutation of `0..k` over the ascending measured list). The projectors
/// commute, so the probability does not depend on it.
pub fn build_wick_system_ordered<'t>(t: &'t TMatrix, q: &MeasurementQuery, order: &[usize]) -> Result<WickSystem<'t>> {
    let n = t.n_modes();
    if q.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: q.n_qubits(),
        });
    }
    let measured = q.measured();
    if order.len() != measured.len() {
        return Err(Error::DimensionMismatch {
            expected: measured.len(),
            got: order.len(),
        });
    }
    let ones = q.x().ones_positions();
    let mut vectors = Vec::with_capacity(2 * (ones.len() + measured.len()));
    vectors.extend(ones.iter().rev().map(|&p| OperatorVector::Majorana(2 * p)));
    for &o in order {
        let (j, bit) = measured[o];
        if bit {
            vectors.push(OperatorVector::Creator(j));
            vectors.push(OperatorVector::Annihilator(j));
        } else {
            vectors.push(OperatorVector::Annihilator(j));
            vectors.push(OperatorVector::Creator(j));
        }
    }
    vectors.extend(ones.iter().map(|&p| OperatorVector::Majorana(2 * p)));
    Ok(WickSystem { t, vectors })
}

/// Checks the imaginary residual and clamps to `[0, 1]`.
pub fn finalize_probability(pf: Complex64) -> Result<f64> {
    if !pf.re.is_finite() || !pf.im.is_finite() || pf.im.abs() >= IMAGINARY_TOLERANCE {
        return Err(Error::ImaginaryResidual {
            real: pf.re,
            imag: pf.im,
        });
    }
    Ok(pf.re.clamp(0.0, 1.0))
}

/// A circuit prepared for repeated measurement: `R` and `T` are computed once
/// and shared read-only by every query.
#[derive(Debug, Clone)]
pub struct CircuitEvaluator {
    r: RMatrix,
    t: TMatrix,
}

impl CircuitEvaluator {
    pub fn new(circuit: &Circuit) -> Self {
        Self::from_r(circuit_r_matrix(circuit))
    }

    pub fn from_r(r: RMatrix) -> Self {
        let t = build_t(&r);
        Self { r, t }
    }

    pub fn n_modes(&self) -> usize {
        self.t.n_modes()
    }

    pub fn r(&self) -> &RMatrix {
        &self.r
    }

    pub fn t(&self) -> &TMatrix {
        &self.t
    }

    /// The un-clamped Pfaffian for `q`.
    pub fn raw_probability(&self, q: &MeasurementQuery) -> Result<Complex64> {
        let ws = build_wick_system(&self.t, q)?;
        if q.y().is_empty() {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let mut m = ws.wick_matrix();
        Ok(pfaffian_in_place(&mut m))
    }

    pub fn probability(&self, q: &MeasurementQuery) -> Result<f64> {
        finalize_probability(self.raw_probability(q)?)
    }

    /// Probabilities in input order.
    pub fn probability_batch(&self, queries: &[MeasurementQuery]) -> Result<Vec<f64>> {
        queries.iter().map(|q| self.probability(q)).collect()
    }

    /// `p(y|x)` for every outcome `y` on `mask`, indexed by `y` read as a
    /// big-endian integer.
    pub fn distribution(&self, x: &Bits, mask: &Bits) -> Result<Vec<f64>> {
        let k = mask.count_ones();
        let probe = MeasurementQuery::new(x.clone(), mask.clone(), Bits::zeros(k))?;
        if self.n_modes() != probe.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                got: probe.n_qubits(),
            });
        }
        if k == 0 {
            return Ok(vec![1.0]);
        }
        let gram = RowGram::new(&self.t, &mask.ones_positions());
        (0..1usize << k)
            .map(|idx| {
                let q = MeasurementQuery::new(x.clone(), mask.clone(), Bits::from_index(idx, k))?;
                let ws = build_wick_system(&self.t, &q)?;
                let mut m = ws.wick_matrix_with(&gram);
                finalize_probability(pfaffian_in_place(&mut m))
            })
            .collect()
    }
}

/// `p(y|x)` for a single query.
pub fn probability(circuit: &Circuit, q: &MeasurementQuery) -> Result<f64> {
    CircuitEvaluator::new(circuit).probability(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermiops::GateSpec;
    use crate::skewlin::pfaffian;
    use alloc::string::ToString;

    fn bits(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn bits_parse_and_index() {
        let b = bits("1011");
        assert_eq!(b.to_index(), 11);
        assert_eq!(Bits::from_index(11, 4), b);
        assert_eq!(b.to_string(), "1011");
        assert_eq!(b.ones_positions(), vec![0, 2, 3]);
        assert_eq!(Bits::alternating(5).to_string(), "10101");
        assert_eq!("10x".parse::<Bits>(), Err(BitsParseError { position: 2, found: 'x' }));
    }

    #[test]
    fn query_validation() {
        assert!(matches!(
            MeasurementQuery::new(bits("101"), bits("110"), bits("1")),
            Err(Error::OutcomeLength { mask_ones: 2, outcome_len: 1 })
        ));
        assert!(MeasurementQuery::new(bits("101"), bits("11"), bits("11")).is_err());
    }

    #[test]
    fn t_of_identity() {
        let t = build_t(&RMatrix::identity(3));
        for i in 0..3 {
            for j in 0..6 {
                let expect = if j == 2 * i {
                    Complex64::new(0.5, 0.0)
                } else if j == 2 * i + 1 {
                    Complex64::new(0.0, 0.5)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert_eq!(t.get(i, j), expect);
            }
        }
    }

    #[test]
    fn t_of_single_mode_rotation() {
        let th: f64 = 0.7;
        let r = RMatrix::from_matrix(nalgebra::DMatrix::from_row_slice(2, 2, &[th.cos(), -th.sin(), th.sin(), th.cos()]));
        let t = build_t(&r);
        assert!((t.get(0, 0) - Complex64::new(0.5 * th.cos(), -0.5 * th.sin())).norm() < 1e-16);
        assert!((t.get(0, 1) - Complex64::new(0.5 * th.sin(), 0.5 * th.cos())).norm() < 1e-16);
    }

    #[test]
    fn operator_sequences() {
        let t = build_t(&RMatrix::identity(2));
        let q = MeasurementQuery::new(bits("00"), bits("01"), bits("0")).unwrap();
        let ws = build_wick_system(&t, &q).unwrap();
        assert_eq!(ws.vectors(), &[OperatorVector::Annihilator(1), OperatorVector::Creator(1)]);

        let q = MeasurementQuery::new(bits("01"), bits("00"), Bits::zeros(0)).unwrap();
        let ws = build_wick_system(&t, &q).unwrap();
        assert_eq!(ws.vectors(), &[OperatorVector::Majorana(2), OperatorVector::Majorana(2)]);

        let q = MeasurementQuery::full(bits("10"), bits("10")).unwrap();
        let ws = build_wick_system(&t, &q).unwrap();
        use OperatorVector::*;
        assert_eq!(
            ws.vectors(),
            &[Majorana(0), Creator(0), Annihilator(0), Annihilator(1), Creator(1), Majorana(0)]
        );
    }

    #[test]
    fn vacuum_two_point_function() {
        // ⟨0|c_0 c_1|0⟩ = i for a single mode
        let t = build_t(&RMatrix::identity(1));
        let ws = WickSystem {
            t: &t,
            vectors: vec![OperatorVector::Majorana(0), OperatorVector::Majorana(1)],
        };
        assert_eq!(pfaffian(&ws.wick_matrix()), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn structured_wick_matrix_matches_dense() {
        let c = Circuit::with_gates(
            3,
            vec![
                GateSpec::general(0, 2, [0.3, -0.8, 1.1, 0.2, -0.5, 0.9]).unwrap(),
                GateSpec::preserving(1, 2, [0.4, 0.1, -0.7, 0.6]).unwrap(),
            ],
        )
        .unwrap();
        let ev = CircuitEvaluator::new(&c);
        let q = MeasurementQuery::new(bits("101"), bits("111"), bits("011")).unwrap();
        let ws = build_wick_system(ev.t(), &q).unwrap();
        let fast = ws.wick_matrix();
        let slow = ws.wick_matrix_dense();
        for a in 0..ws.len() {
            for b in 0..ws.len() {
                assert!((fast.get(a, b) - slow.get(a, b)).norm() < 1e-14, "{a} {b}");
            }
        }
    }

    #[test]
    fn identity_circuit_probabilities() {
        let c = Circuit::new(4);
        let ev = CircuitEvaluator::new(&c);
        let q = MeasurementQuery::full(bits("1010"), bits("1010")).unwrap();
        assert!((ev.probability(&q).unwrap() - 1.0).abs() < 1e-15);
        let q = MeasurementQuery::full(bits("1010"), bits("0110")).unwrap();
        assert!(ev.probability(&q).unwrap().abs() < 1e-15);
        let q = MeasurementQuery::new(bits("1010"), bits("0000"), Bits::zeros(0)).unwrap();
        assert_eq!(ev.probability(&q).unwrap(), 1.0);
    }

    #[test]
    fn imaginary_residual_rejected() {
        assert!(matches!(
            finalize_probability(Complex64::new(0.5, 1e-6)),
            Err(Error::ImaginaryResidual { .. })
        ));
        assert_eq!(finalize_probability(Complex64::new(1.0 + 1e-12, 1e-12)).unwrap(), 1.0);
        assert_eq!(finalize_probability(Complex64::new(-1e-13, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn batch_of_one_matches_single() {
        let c = Circuit::with_gates(2, vec![GateSpec::preserving(0, 1, [0.2, 0.4, 0.9, -0.3]).unwrap()]).unwrap();
        let ev = CircuitEvaluator::new(&c);
        let q = MeasurementQuery::full(bits("10"), bits("01")).unwrap();
        assert_eq!(ev.probability_batch(core::slice::from_ref(&q)).unwrap(), vec![ev.probability(&q).unwrap()]);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let ev = CircuitEvaluator::new(&Circuit::new(3));
        let q = MeasurementQuery::full(bits("10"), bits("10")).unwrap();
        assert!(matches!(ev.probability(&q), Err(Error::DimensionMismatch { .. })));
    }
}
