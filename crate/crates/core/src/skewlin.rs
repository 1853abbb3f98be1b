//! Dense kernels for skew-symmetric matrices.
//!
//! A real skew-symmetric `A` of size `2N` is brought to the canonical form
//! `A = Wᵀ · ⊕_j [[0, λ_j], [-λ_j, 0]] · W` with `W` orthogonal and
//! `λ_j ≥ 0`. The decomposition runs in two stages: an orthogonal Householder
//! reduction to skew-tridiagonal form, then a singular value decomposition of
//! the `N × N` bidiagonal block that the even/odd index split of a
//! skew-tridiagonal matrix exposes. Both stages are backward stable, so the
//! reconstruction error stays at the level of machine precision even for
//! repeated or vanishing `λ_j`.
//!
//! The complex Pfaffian uses skew-symmetric Gaussian elimination
//! (Parlett–Reid) with partial pivoting on packed lower-triangular storage.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Column magnitude below which the Pfaffian elimination declares the matrix
/// singular and returns an exact zero.
pub const PFAFFIAN_ZERO_PIVOT: f64 = 1e-14;

/// Entries of the normalized working matrix below this magnitude are set to zero.
pub const PFAFFIAN_FLUSH: f64 = 1e-150;

/// Largest dimension accepted by [`pfaffian_matching_oracle`].
pub const MATCHING_ORACLE_MAX_DIM: usize = 12;

/// Real `2N × 2N` skew-symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    entries: DMatrix<f64>,
}

impl SkewMatrix {
    /// Antisymmetrizes `m` as `(m - mᵀ) / 2`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows != cols || rows == 0 || rows % 2 != 0 {
            return Err(Error::BadShape { rows, cols });
        }
        let entries = DMatrix::from_fn(rows, cols, |k, l| 0.5 * (m[(k, l)] - m[(l, k)]));
        Ok(Self { entries })
    }

    pub fn from_row_slice(dim: usize, data: &[f64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, data))
    }

    pub fn zeros(n_modes: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(2 * n_modes, 2 * n_modes))
    }

    /// Builds the matrix from already skew entries without re-antisymmetrizing.
    /// Used internally where antisymmetry holds by construction.
    pub(crate) fn from_skew_unchecked(entries: DMatrix<f64>) -> Self {
        debug_assert!(entries.nrows() == entries.ncols() && entries.nrows().is_multiple_of(2));
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_modes(&self) -> usize {
        self.dim() / 2
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.entries[(k, l)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            entries: &self.entries * s,
        }
    }
}

/// Real orthogonal `2N × 2N` matrix describing how a circuit conjugates the
/// Majorana operators: `U c_k U† = Σ_l R_kl c_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix {
    entries: DMatrix<f64>,
}

impl RMatrix {
    pub fn identity(n_modes: usize) -> Self {
        Self {
            entries: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub(crate) fn from_matrix(entries: DMatrix<f64>) -> Self {
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_modes(&self) -> usize {
        self.dim() / 2
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.entries[(k, l)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub(crate) fn as_matrix_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.entries
    }

    /// `‖RᵀR − I‖_max`.
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.dim();
        let g = self.entries.transpose() * &self.entries;
        max_abs_diff(&g, &DMatrix::identity(n, n))
    }

    pub fn determinant(&self) -> f64 {
        self.entries.clone().determinant()
    }

    pub fn mul(&self, rhs: &RMatrix) -> RMatrix {
        RMatrix {
            entries: &self.entries * &rhs.entries,
        }
    }
}

/// Canonical block-diagonal decomposition `A = Wᵀ·D·W`.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    /// Orthogonal change of basis (rows are the canonical Majorana modes).
    pub w: DMatrix<f64>,
    /// Non-negative block values, descending.
    pub lambdas: Vec<f64>,
}

impl CanonicalForm {
    /// `⊕_j [[0, λ_j], [-λ_j, 0]]`.
    pub fn block_diagonal(&self) -> DMatrix<f64> {
        let n = 2 * self.lambdas.len();
        let mut d = DMatrix::zeros(n, n);
        for (j, &lam) in self.lambdas.iter().enumerate() {
            d[(2 * j, 2 * j + 1)] = lam;
            d[(2 * j + 1, 2 * j)] = -lam;
        }
        d
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.w.transpose() * self.block_diagonal() * &self.w
    }

    /// `exp(-A·t) = Wᵀ · ⊕_j Rot(λ_j t) · W` with `Rot(θ) = [[cos θ, -sin θ], [sin θ, cos θ]]`.
    pub fn exp_neg(&self, t: f64) -> DMatrix<f64> {
        let mut rot_w = self.w.clone();
        let n = self.w.ncols();
        for (j, &lam) in self.lambdas.iter().enumerate() {
            let (s, c) = (lam * t).sin_cos();
            for col in 0..n {
                let a = self.w[(2 * j, col)];
                let b = self.w[(2 * j + 1, col)];
                rot_w[(2 * j, col)] = c * a - s * b;
                rot_w[(2 * j + 1, col)] = s * a + c * b;
            }
        }
        self.w.transpose() * rot_w
    }
}

/// Canonical block-diagonal decomposition of a real skew-symmetric matrix.
///
/// Deterministic: `λ` is sorted descending, ties keep the order in which the
/// bidiagonal SVD reports them.
pub fn canonical_decompose(a: &SkewMatrix) -> CanonicalForm {
    let n = a.dim();
    let modes = n / 2;
    let amax = a.as_matrix().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if !amax.is_finite() {
        return CanonicalForm {
            w: DMatrix::from_element(n, n, f64::NAN),
            lambdas: vec![f64::NAN; modes],
        };
    }
    // Exact power-of-two rescaling keeps the reflectors and the SVD in range.
    let scale = if amax > 0.0 { pow2_at_least(amax) } else { 1.0 };
    let (t, q) = skew_tridiagonalize(&(a.as_matrix() / scale));

    // For a skew-tridiagonal T the even rows only couple to odd columns:
    // B[a][b] = T[2a][2b+1] is lower bidiagonal.
    let mut b = DMatrix::<f64>::zeros(modes, modes);
    for r in 0..modes {
        b[(r, r)] = t[(2 * r, 2 * r + 1)];
        if r > 0 {
            b[(r, r - 1)] = t[(2 * r, 2 * r - 1)];
        }
    }
    let svd = SVD::new(b, true, true);
    let u = svd.u.expect("svd computed with u");
    let v_t = svd.v_t.expect("svd computed with v_t");
    let sigma = svd.singular_values;

    let mut order: Vec<usize> = (0..modes).collect();
    order.sort_by(|&x, &y| sigma[y].partial_cmp(&sigma[x]).unwrap_or(core::cmp::Ordering::Equal));

    // Z maps the skew-tridiagonal basis to the canonical one: Z·T·Zᵀ = D.
    let mut z = DMatrix::<f64>::zeros(n, n);
    let mut lambdas = Vec::with_capacity(modes);
    for (j, &src) in order.iter().enumerate() {
        lambdas.push(sigma[src].max(0.0) * scale);
        for r in 0..modes {
            z[(2 * j, 2 * r)] = u[(r, src)];
            z[(2 * j + 1, 2 * r + 1)] = v_t[(src, r)];
        }
    }
    let w = z * q.transpose();
    CanonicalForm { w, lambdas }
}

/// Householder reduction `A = Q·T·Qᵀ` with `T` skew-tridiagonal.
fn skew_tridiagonalize(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut t = a.clone();
    let mut q = DMatrix::<f64>::identity(n, n);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut qv = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        let sigma = (k + 1..n).map(|i| t[(i, k)] * t[(i, k)]).sum::<f64>().sqrt();
        let tail = (k + 2..n).map(|i| t[(i, k)].abs()).fold(0.0, f64::max);
        if tail == 0.0 {
            continue;
        }
        let x0 = t[(k + 1, k)];
        let alpha = if x0 >= 0.0 { sigma } else { -sigma };
        v.iter_mut().for_each(|x| *x = 0.0);
        for i in k + 1..n {
            v[i] = t[(i, k)];
        }
        v[k + 1] += alpha;
        let vv: f64 = v[k + 1..].iter().map(|x| x * x).sum();
        let beta = 2.0 / vv;

        // P·T·P = T + v·pᵀ − p·vᵀ with p = β·T·v, since vᵀTv = 0.
        for i in 0..n {
            let mut s = 0.0;
            for j in k + 1..n {
                s += t[(i, j)] * v[j];
            }
            p[i] = beta * s;
        }
        for j in 0..n {
            for i in 0..n {
                t[(i, j)] += v[i] * p[j] - p[i] * v[j];
            }
        }
        for i in k + 2..n {
            t[(i, k)] = 0.0;
            t[(k, i)] = 0.0;
        }
        t[(k + 1, k)] = -alpha;
        t[(k, k + 1)] = alpha;

        // Q ← Q·P
        for i in 0..n {
            let mut s = 0.0;
            for j in k + 1..n {
                s += q[(i, j)] * v[j];
            }
            qv[i] = beta * s;
        }
        for j in k + 1..n {
            for i in 0..n {
                q[(i, j)] -= qv[i] * v[j];
            }
        }
    }
    for i in 0..n {
        t[(i, i)] = 0.0;
    }
    (t, q)
}

/// `exp(-A·t)` through the canonical form.
pub fn skew_exp(a: &SkewMatrix, t: f64) -> RMatrix {
    RMatrix::from_matrix(canonical_decompose(a).exp_neg(t))
}

/// Complex skew-symmetric matrix of even dimension (possibly zero), stored as
/// its strictly lower triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSkewMatrix {
    dim: usize,
    lower: Vec<Complex64>,
}

#[inline]
fn packed(i: usize, j: usize) -> usize {
    debug_assert!(j < i);
    i * (i - 1) / 2 + j
}

impl ComplexSkewMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if !dim.is_multiple_of(2) {
            return Err(Error::BadShape { rows: dim, cols: dim });
        }
        let len = dim * dim.saturating_sub(1) / 2;
        Ok(Self {
            dim,
            lower: vec![Complex64::new(0.0, 0.0); len],
        })
    }

    /// Builds the matrix from its upper triangle: `f(a, b)` is `M[a][b]` for `a < b`.
    pub fn from_upper_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 1..dim {
            for j in 0..i {
                m.lower[packed(i, j)] = -f(j, i);
            }
        }
        Ok(m)
    }

    /// Antisymmetrizes a dense row-major matrix as `(M − Mᵀ)/2`.
    pub fn from_row_slice(dim: usize, data: &[Complex64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Self::from_upper_fn(dim, |a, b| 0.5 * (data[a * dim + b] - data[b * dim + a]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> Complex64 {
        use core::cmp::Ordering::*;
        match a.cmp(&b) {
            Equal => Complex64::new(0.0, 0.0),
            Greater => self.lower[packed(a, b)],
            Less => -self.lower[packed(b, a)],
        }
    }

    /// Sets `M[a][b] = value` and `M[b][a] = -value`.
    pub fn set(&mut self, a: usize, b: usize, value: Complex64) {
        use core::cmp::Ordering::*;
        match a.cmp(&b) {
            Equal => {}
            Greater => self.lower[packed(a, b)] = value,
            Less => self.lower[packed(b, a)] = -value,
        }
    }


    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for a in 0..n {
            for b in 0..n {
                out[a * n + b] = self.get(a, b);
            }
        }
        out
    }

    /// Simultaneous row/column swap `a ↔ b`.
    pub fn swap_indices(&self, a: usize, b: usize) -> Self {
        let n = self.dim;
        let perm = |i: usize| {
            if i == a {
                b
            } else if i == b {
                a
            } else {
                i
            }
        };
        Self::from_upper_fn(n, |i, j| self.get(perm(i), perm(j))).expect("same dimension")
    }
}

/// Pfaffian by skew-symmetric elimination with partial pivoting.
///
/// Returns exactly zero when a pivot column is entirely below
/// [`PFAFFIAN_ZERO_PIVOT`] in magnitude. `Pf` of the empty matrix is 1.
pub fn pfaffian(m: &ComplexSkewMatrix) -> Complex64 {
    let mut work = m.clone();
    pfaffian_in_place(&mut work)
}

pub(crate) fn pfaffian_in_place(m: &mut ComplexSkewMatrix) -> Complex64 {
    let n = m.dim;
    let packed_len = m.lower.len();
    // Work on M / s with s a power of two bounding every entry, so the flush
    // threshold is relative and rescaling is exact.
    let max_abs = m.lower.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max);
    let s = if max_abs > 0.0 && max_abs.is_finite() { pow2_at_least(max_abs) } else { 1.0 };
    let inv_s = 1.0 / s;
    // split storage lets the rank-2 update vectorize
    let mut re: Vec<f64> = Vec::with_capacity(packed_len);
    let mut im: Vec<f64> = Vec::with_capacity(packed_len);
    for z in m.lower.iter() {
        re.push(flush(z.re * inv_s));
        im.push(flush(z.im * inv_s));
    }
    let mut pf = Complex64::new(1.0, 0.0);
    let mut tr = vec![0.0; n];
    let mut ti = vec![0.0; n];
    let mut ur = vec![0.0; n];
    let mut ui = vec![0.0; n];

    let mut k = 0;
    while k + 1 < n {
        // pivot search in column k below the diagonal
        let mut kp = k + 1;
        let mut best = 0.0;
        for i in k + 1..n {
            let p = packed(i, k);
            let v = re[p] * re[p] + im[p] * im[p];
            if v > best {
                best = v;
                kp = i;
            }
        }
        if best.sqrt() * s < PFAFFIAN_ZERO_PIVOT {
            return Complex64::new(0.0, 0.0);
        }
        if kp != k + 1 {
            swap_packed(&mut re, n, k + 1, kp);
            swap_packed(&mut im, n, k + 1, kp);
            pf = -pf;
        }
        let pp = packed(k + 1, k);
        let pivot = Complex64::new(re[pp], im[pp]);
        // Pf picks up M[k][k+1] = -M[k+1][k]
        pf *= -pivot * s;

        if k + 2 < n {
            let inv = 1.0 / pivot;
            for i in k + 2..n {
                let t = Complex64::new(re[packed(i, k)], im[packed(i, k)]) * inv;
                tr[i] = flush(t.re);
                ti[i] = flush(t.im);
                ur[i] = flush(re[packed(i, k + 1)]);
                ui[i] = flush(im[packed(i, k + 1)]);
            }
            for i in k + 3..n {
                let (a_r, a_i, b_r, b_i) = (tr[i], ti[i], ur[i], ui[i]);
                let lo = packed(i, k + 2);
                let len = i - k - 2;
                let row_r = &mut re[lo..lo + len];
                let row_i = &mut im[lo..lo + len];
                let (t_r, t_i) = (&tr[k + 2..i], &ti[k + 2..i]);
                let (u_r, u_i) = (&ur[k + 2..i], &ui[k + 2..i]);
                for j in 0..len {
                    // x += tau_i·u_j − u_i·tau_j
                    row_r[j] += a_r * u_r[j] - a_i * u_i[j] - b_r * t_r[j] + b_i * t_i[j];
                    row_i[j] += a_r * u_i[j] + a_i * u_r[j] - b_r * t_i[j] - b_i * t_r[j];
                }
            }
        }
        k += 2;
    }
    pf
}

/// Smallest power of two `≥ x` for finite positive `x`, capped at `2^1023`.
fn pow2_at_least(x: f64) -> f64 {
    let (m, e) = libm::frexp(x);
    let e = if m == 0.5 { e - 1 } else { e };
    libm::ldexp(1.0, e.min(1023))
}

/// Zeroes magnitudes below [`PFAFFIAN_FLUSH`]; keeps the elimination out of
/// subnormal arithmetic.
#[inline(always)]
fn flush(x: f64) -> f64 {
    if x.abs() < PFAFFIAN_FLUSH {
        0.0
    } else {
        x
    }
}

/// Symmetric permutation `p ↔ q` (p < q) of a packed strictly-lower skew matrix.
fn swap_packed<T: Copy + core::ops::Neg<Output = T>>(a: &mut [T], n: usize, p: usize, q: usize) {
    debug_assert!(p < q);
    for j in 0..p {
        a.swap(packed(p, j), packed(q, j));
    }
    for j in p + 1..q {
        let x = a[packed(j, p)];
        let y = a[packed(q, j)];
        a[packed(j, p)] = -y;
        a[packed(q, j)] = -x;
    }
    let x = &mut a[packed(q, p)];
    *x = -*x;
    for i in q + 1..n {
        a.swap(packed(i, p), packed(i, q));
    }
}

/// Pfaffian as the signed sum over perfect matchings, expanding along the
/// first row. Exponential cost; reference implementation for dimensions up to
/// [`MATCHING_ORACLE_MAX_DIM`].
pub fn pfaffian_matching_oracle(m: &ComplexSkewMatrix) -> Result<Complex64> {
    let n = m.dim();
    if n > MATCHING_ORACLE_MAX_DIM {
        return Err(Error::TooLarge {
            what: "matching-sum pfaffian",
            max: MATCHING_ORACLE_MAX_DIM,
            got: n,
        });
    }
    let idx: Vec<usize> = (0..n).collect();
    Ok(matching_sum(m, &idx))
}

fn matching_sum(m: &ComplexSkewMatrix, idx: &[usize]) -> Complex64 {
    if idx.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    let first = idx[0];
    let mut total = Complex64::new(0.0, 0.0);
    let mut rest: Vec<usize> = Vec::with_capacity(idx.len() - 2);
    for (pos, &partner) in idx.iter().enumerate().skip(1) {
        let entry = m.get(first, partner);
        if entry == Complex64::new(0.0, 0.0) {
            continue;
        }
        rest.clear();
        rest.extend(idx[1..].iter().copied().filter(|&x| x != partner));
        let sign = if pos % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * entry * matching_sum(m, &rest);
    }
    total
}

pub(crate) fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
