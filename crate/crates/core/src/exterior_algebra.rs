//! Frame-based multilinear algebra in dimension seven.
//!
//! Forms are stored packed: a degree-k form carries one coefficient per
//! strictly increasing index tuple, in lexicographic order. Coefficients are
//! the values of the form on frame vectors, with no factorial rescaling, so
//! that `(e¹∧e²)(e₁, e₂) = 1`.
//!
//! General tensors (connection coefficients, curvature, covariant
//! derivatives) live in the dense [`Tensor`] type, indexed row-major.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::{SMatrix, SVector};
use once_cell::sync::{Lazy, OnceCell};

use crate::error::{Error, Result};

pub const DIM: usize = 7;

pub type Matrix7 = SMatrix<f64, DIM, DIM>;
pub type Vector7 = SVector<f64, DIM>;

/// Binomial coefficients C(7, k).
pub const FORM_DIMS: [usize; DIM + 1] = [1, 7, 21, 35, 35, 21, 7, 1];

struct Tables {
    /// Index tuples of each degree, lexicographic.
    subsets: Vec<Vec<Vec<usize>>>,
    /// Packed slot of every bitmask (the degree is the popcount).
    slot: [usize; 1 << DIM],
    /// Per degree: (slot of complement, sign of (I, Iᶜ) as a permutation).
    complement: Vec<Vec<(usize, f64)>>,
    /// wedge[k][l]: (slot in a, slot in b, slot in a∧b, sign).
    wedge: Vec<Vec<Vec<(usize, usize, usize, f64)>>>,
    /// interior[k]: (slot in input, vector index, slot in output, sign).
    interior: Vec<Vec<(usize, usize, usize, f64)>>,
}

/// Sign of the permutation sorting the concatenation `a ++ b` of two disjoint
/// increasing index sets given as bitmasks.
fn merge_sign(a: u8, b: u8) -> f64 {
    let mut inversions = 0;
    for j in 0..DIM {
        if b & (1 << j) != 0 {
            inversions += (a >> (j + 1)).count_ones();
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn combinations(k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..DIM {
            cur.push(i);
            rec(i + 1, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, &mut Vec::new(), &mut out);
    out
}

fn mask_of(indices: &[usize]) -> u8 {
    indices.iter().fold(0u8, |m, &i| m | (1 << i))
}

static TABLES: Lazy<Tables> = Lazy::new(|| {
    let subsets: Vec<Vec<Vec<usize>>> = (0..=DIM).map(combinations).collect();
    let masks: Vec<Vec<u8>> = subsets
        .iter()
        .map(|s| s.iter().map(|t| mask_of(t)).collect())
        .collect();
    let mut slot = [0usize; 1 << DIM];
    for per_degree in &masks {
        for (i, &m) in per_degree.iter().enumerate() {
            slot[m as usize] = i;
        }
    }
    let full: u8 = (1 << DIM) - 1;
    let complement = masks
        .iter()
        .map(|per_degree| {
            per_degree
                .iter()
                .map(|&m| (slot[(full ^ m) as usize], merge_sign(m, full ^ m)))
                .collect()
        })
        .collect();
    let mut wedge = vec![vec![Vec::new(); DIM + 1]; DIM + 1];
    for k in 0..=DIM {
        for l in 0..=(DIM - k) {
            let mut entries = Vec::new();
            for (ia, &ma) in masks[k].iter().enumerate() {
                for (ib, &mb) in masks[l].iter().enumerate() {
                    if ma & mb == 0 {
                        entries.push((ia, ib, slot[(ma | mb) as usize], merge_sign(ma, mb)));
                    }
                }
            }
            wedge[k][l] = entries;
        }
    }
    let mut interior = vec![Vec::new(); DIM + 1];
    for k in 1..=DIM {
        for (i, &m) in masks[k].iter().enumerate() {
            for a in 0..DIM {
                if m & (1 << a) == 0 {
                    continue;
                }
                let rest = m & !(1 << a);
                // Moving index a to the front passes every smaller index.
                let sign = if (rest & ((1u8 << a) - 1)).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                interior[k].push((i, a, slot[rest as usize], sign));
            }
        }
    }
    Tables {
        subsets,
        slot,
        complement,
        wedge,
        interior,
    }
});

/// Index tuples of the packed slots of degree `k`, lexicographic.
pub fn basis_indices(k: usize) -> &'static [Vec<usize>] {
    &TABLES.subsets[k]
}

/// Sign of the permutation sorting `indices`, or `None` on a repeated index.
fn sort_sign(indices: &[usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 0..indices.len() {
        for j in (i + 1)..indices.len() {
            if indices[i] == indices[j] {
                return None;
            }
            if indices[i] > indices[j] {
                sign = -sign;
            }
        }
    }
    Some(sign)
}

/// Orientation of the frame relative to the form's preferred orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }
}

/// A degree-k alternating form with constant coefficients on the frame.
#[derive(Debug, Clone, PartialEq)]
pub struct AltForm {
    degree: usize,
    coeffs: Vec<f64>,
}

impl AltForm {
    pub fn zero(degree: usize) -> Self {
        assert!(degree <= DIM, "form degree {degree} exceeds {DIM}");
        Self {
            degree,
            coeffs: vec![0.0; FORM_DIMS[degree]],
        }
    }

    pub fn from_coeffs(degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if degree > DIM {
            return Err(Error::Degree(format!("degree {degree} exceeds {DIM}")));
        }
        if coeffs.len() != FORM_DIMS[degree] {
            return Err(Error::Degree(format!(
                "degree {degree} needs {} coefficients, got {}",
                FORM_DIMS[degree],
                coeffs.len()
            )));
        }
        Ok(Self { degree, coeffs })
    }

    /// `c · e^{i₁}∧…∧e^{i_k}`; indices may be unsorted, repeats give zero.
    pub fn term(c: f64, indices: &[usize]) -> Self {
        let mut out = Self::zero(indices.len());
        if let Some(sign) = sort_sign(indices) {
            assert!(indices.iter().all(|&i| i < DIM), "frame index out of range");
            out.coeffs[TABLES.slot[mask_of(indices) as usize]] = sign * c;
        }
        out
    }

    pub fn basis(indices: &[usize]) -> Self {
        Self::term(1.0, indices)
    }

    /// The 1-form with the given lowered components.
    pub fn from_covector(v: &Vector7) -> Self {
        Self {
            degree: 1,
            coeffs: v.iter().copied().collect(),
        }
    }

    /// The 2-form with components `m_{ij}`; only the upper triangle is read.
    pub fn from_skew_matrix(m: &Matrix7) -> Self {
        let coeffs = TABLES.subsets[2].iter().map(|ij| m[(ij[0], ij[1])]).collect();
        Self { degree: 2, coeffs }
    }

    pub fn volume() -> Self {
        Self {
            degree: DIM,
            coeffs: vec![1.0],
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Component `ω_{i₁…i_k}` for arbitrary (possibly unsorted) indices.
    pub fn component(&self, indices: &[usize]) -> f64 {
        assert_eq!(indices.len(), self.degree, "component index count");
        match sort_sign(indices) {
            Some(sign) => sign * self.coeffs[TABLES.slot[mask_of(indices) as usize]],
            None => 0.0,
        }
    }

    /// Coefficient of `e^{0…6}` for a top-degree form, else zero.
    pub fn top_coefficient(&self) -> f64 {
        if self.degree == DIM {
            self.coeffs[0]
        } else {
            0.0
        }
    }

    pub fn to_covector(&self) -> Vector7 {
        assert_eq!(self.degree, 1);
        Vector7::from_column_slice(&self.coeffs)
    }

    /// Components of a 2-form as an antisymmetric matrix.
    pub fn to_skew_matrix(&self) -> Matrix7 {
        assert_eq!(self.degree, 2);
        let mut m = Matrix7::zeros();
        for (ij, &v) in TABLES.subsets[2].iter().zip(&self.coeffs) {
            m[(ij[0], ij[1])] = v;
            m[(ij[1], ij[0])] = -v;
        }
        m
    }

    /// Fully antisymmetric dense expansion.
    pub fn to_dense(&self) -> Tensor {
        let mut t = Tensor::zeros(self.degree);
        if self.degree == 0 {
            t.data[0] = self.coeffs[0];
            return t;
        }
        let perms = permutations_with_sign(self.degree);
        let mut idx = vec![0usize; self.degree];
        for (sub, &v) in TABLES.subsets[self.degree].iter().zip(&self.coeffs) {
            if v == 0.0 {
                continue;
            }
            for (p, s) in &perms {
                for (slot, &pi) in idx.iter_mut().zip(p) {
                    *slot = sub[pi];
                }
                let off = t.offset(&idx);
                t.data[off] = s * v;
            }
        }
        t
    }

    /// Packs the strictly increasing components of a dense tensor. The input
    /// is assumed antisymmetric; use [`Tensor::antisymmetrize`] first if not.
    pub fn from_dense(t: &Tensor) -> Self {
        let coeffs = TABLES.subsets[t.rank]
            .iter()
            .map(|sub| t.get(sub))
            .collect();
        Self {
            degree: t.rank,
            coeffs,
        }
    }

    pub fn wedge(&self, other: &AltForm) -> Result<AltForm> {
        let (k, l) = (self.degree, other.degree);
        if k + l > DIM {
            return Err(Error::Degree(format!("wedge of degrees {k} and {l} exceeds {DIM}")));
        }
        let mut out = AltForm::zero(k + l);
        for &(ia, ib, io, s) in &TABLES.wedge[k][l] {
            out.coeffs[io] += s * self.coeffs[ia] * other.coeffs[ib];
        }
        Ok(out)
    }

    /// Interior product `u⌟ω`, with `(u⌟ω)_{i₂…i_k} = u^a ω_{a i₂…i_k}`.
    pub fn interior(&self, u: &Vector7) -> Result<AltForm> {
        if self.degree == 0 {
            return Err(Error::Degree("interior product of a 0-form".into()));
        }
        let mut out = AltForm::zero(self.degree - 1);
        for &(i, a, o, s) in &TABLES.interior[self.degree] {
            out.coeffs[o] += s * u[a] * self.coeffs[i];
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Euclidean norm of the packed coefficients (frame norm, not metric).
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: f64) -> AltForm {
        AltForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|v| c * v).collect(),
        }
    }

    /// `self += c · other`.
    pub fn axpy(&mut self, c: f64, other: &AltForm) {
        assert_eq!(self.degree, other.degree, "degree mismatch in axpy");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
    }
}

impl Add for &AltForm {
    type Output = AltForm;
    fn add(self, rhs: &AltForm) -> AltForm {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &AltForm {
    type Output = AltForm;
    fn sub(self, rhs: &AltForm) -> AltForm {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Add for AltForm {
    type Output = AltForm;
    fn add(mut self, rhs: AltForm) -> AltForm {
        self.axpy(1.0, &rhs);
        self
    }
}

impl Sub for AltForm {
    type Output = AltForm;
    fn sub(mut self, rhs: AltForm) -> AltForm {
        self.axpy(-1.0, &rhs);
        self
    }
}

impl AddAssign<&AltForm> for AltForm {
    fn add_assign(&mut self, rhs: &AltForm) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&AltForm> for AltForm {
    fn sub_assign(&mut self, rhs: &AltForm) {
        self.axpy(-1.0, rhs);
    }
}

impl Mul<&AltForm> for f64 {
    type Output = AltForm;
    fn mul(self, rhs: &AltForm) -> AltForm {
        rhs.scale(self)
    }
}

impl Mul<AltForm> for f64 {
    type Output = AltForm;
    fn mul(self, rhs: AltForm) -> AltForm {
        rhs.scale(self)
    }
}

impl Neg for AltForm {
    type Output = AltForm;
    fn neg(self) -> AltForm {
        self.scale(-1.0)
    }
}

fn permutations_with_sign(k: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut perms = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let s = sort_sign(&p).expect("permutation has no repeats");
            (p, s)
        })
        .collect()
}

/// Determinant of the submatrix `m[rows, cols]` by partial-pivot elimination.
fn minor(m: &Matrix7, rows: &[usize], cols: &[usize]) -> f64 {
    let k = rows.len();
    if k == 0 {
        return 1.0;
    }
    let mut a = [[0.0f64; DIM]; DIM];
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            a[i][j] = m[(r, c)];
        }
    }
    let mut det = 1.0;
    for col in 0..k {
        let mut piv = col;
        for r in (col + 1)..k {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for r in (col + 1)..k {
            let f = a[r][col] / a[col][col];
            for c in col..k {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    det
}

/// The k-th compound matrix (all k×k minors), row-major over packed slots.
fn compound(m: &Matrix7, k: usize) -> Vec<f64> {
    let subs = &TABLES.subsets[k];
    let n = subs.len();
    let mut out = vec![0.0; n * n];
    for (i, r) in subs.iter().enumerate() {
        for (j, c) in subs.iter().enumerate() {
            out[i * n + j] = minor(m, r, c);
        }
    }
    out
}

/// A Riemannian metric on the frame, with cached inverse and the compound
/// matrices of the inverse used to raise all indices of a packed form.
#[derive(Debug, Clone)]
pub struct Metric7 {
    g: Matrix7,
    inverse: Matrix7,
    volume_density: f64,
    raise: [OnceCell<Vec<f64>>; DIM + 1],
}

impl Metric7 {
    /// Validates symmetry (relative 1e-10, then symmetrised exactly) and
    /// positive-definiteness via Cholesky.
    pub fn new(g: Matrix7) -> Result<Self> {
        let scale = g.abs().max().max(1.0);
        let asym = (g - g.transpose()).abs().max();
        if !asym.is_finite() || asym > 1e-10 * scale {
            return Err(Error::Metric(format!("not symmetric (asymmetry {asym:e})")));
        }
        let g = 0.5 * (g + g.transpose());
        let chol = g
            .cholesky()
            .ok_or_else(|| Error::Metric("not positive definite".into()))?;
        let inverse = chol.inverse();
        let inverse = 0.5 * (inverse + inverse.transpose());
        let volume_density = chol.l().diagonal().product();
        Ok(Self {
            g,
            inverse,
            volume_density,
            raise: Default::default(),
        })
    }

    pub fn identity() -> Self {
        Self::new(Matrix7::identity()).expect("identity is a metric")
    }

    pub fn matrix(&self) -> &Matrix7 {
        &self.g
    }

    pub fn inverse(&self) -> &Matrix7 {
        &self.inverse
    }

    /// √det g.
    pub fn volume_density(&self) -> f64 {
        self.volume_density
    }

    /// The form with every index raised, `ω^{I} = Σ_J det(g⁻¹[I,J]) ω_J`,
    /// returned in the same packed layout.
    pub fn raise_form(&self, w: &AltForm) -> AltForm {
        let k = w.degree;
        let n = FORM_DIMS[k];
        let c = self.raise[k].get_or_init(|| compound(&self.inverse, k));
        let mut out = AltForm::zero(k);
        for i in 0..n {
            let row = &c[i * n..(i + 1) * n];
            out.coeffs[i] = row.iter().zip(&w.coeffs).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// Lowers an upper-index vector.
    pub fn flat(&self, x: &Vector7) -> Vector7 {
        self.g * x
    }

    /// Raises a lower-index covector.
    pub fn sharp(&self, x: &Vector7) -> Vector7 {
        self.inverse * x
    }

    /// Raises both indices of a lowered 2-tensor.
    pub fn raise_both(&self, t: &Matrix7) -> Matrix7 {
        self.inverse * t * self.inverse
    }

    /// `g^{ab} t_{ab}`.
    pub fn trace(&self, t: &Matrix7) -> f64 {
        self.inverse.component_mul(t).sum()
    }

    /// `g^{ac} g^{bd} s_{ab} t_{cd}`.
    pub fn inner2(&self, s: &Matrix7, t: &Matrix7) -> f64 {
        self.raise_both(s).component_mul(t).sum()
    }

    /// The matrix product `s g⁻¹ t` of two lowered 2-tensors.
    pub fn product(&self, s: &Matrix7, t: &Matrix7) -> Matrix7 {
        s * self.inverse * t
    }
}

/// `⟨a, b⟩_g` with all indices contracted by `g⁻¹`, no factorial weights;
/// `|φ₀|² = 7`.
pub fn form_inner(a: &AltForm, b: &AltForm, g: &Metric7) -> Result<f64> {
    if a.degree != b.degree {
        return Err(Error::Degree(format!(
            "inner product of degrees {} and {}",
            a.degree, b.degree
        )));
    }
    let up = g.raise_form(b);
    Ok(a.coeffs.iter().zip(&up.coeffs).map(|(x, y)| x * y).sum())
}

/// Hodge star, characterised by `a ∧ *b = ⟨a, b⟩ vol` with
/// `vol = ±√det g · e^{0…6}` according to `orientation`.
pub fn hodge_star(w: &AltForm, g: &Metric7, orientation: Orientation) -> AltForm {
    let up = g.raise_form(w);
    let scale = orientation.sign() * g.volume_density();
    let mut out = AltForm::zero(DIM - w.degree);
    for (i, &(o, s)) in TABLES.complement[w.degree].iter().enumerate() {
        out.coeffs[o] += scale * s * up.coeffs[i];
    }
    out
}

/// Dense real tensor of rank r on the 7-frame, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    rank: usize,
    data: Vec<f64>,
}

/// How `raise_lower` treats each index slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexMove {
    Keep,
    Raise,
    Lower,
}

impl Tensor {
    pub fn zeros(rank: usize) -> Self {
        Self {
            rank,
            data: vec![0.0; DIM.pow(rank as u32)],
        }
    }

    pub fn from_fn(rank: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Self::zeros(rank);
        let mut idx = vec![0usize; rank];
        for off in 0..t.data.len() {
            t.data[off] = f(&idx);
            for slot in (0..rank).rev() {
                idx[slot] += 1;
                if idx[slot] < DIM {
                    break;
                }
                idx[slot] = 0;
            }
        }
        t
    }

    pub fn from_data(rank: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), DIM.pow(rank as u32), "tensor data length");
        Self { rank, data }
    }

    pub fn from_matrix(m: &Matrix7) -> Self {
        Self::from_fn(2, |i| m[(i[0], i[1])])
    }

    pub fn from_vector(v: &Vector7) -> Self {
        Self::from_fn(1, |i| v[i[0]])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |o, &i| o * DIM + i)
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    #[inline]
    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn to_matrix(&self) -> Matrix7 {
        assert_eq!(self.rank, 2);
        Matrix7::from_fn(|i, j| self.data[i * DIM + j])
    }

    pub fn to_vector(&self) -> Vector7 {
        assert_eq!(self.rank, 1);
        Vector7::from_column_slice(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sum of squared components (frame norm, not metric).
    pub fn frame_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn scale(&self, c: f64) -> Tensor {
        Tensor {
            rank: self.rank,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    pub fn axpy(&mut self, c: f64, other: &Tensor) {
        assert_eq!(self.rank, other.rank, "rank mismatch in axpy");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    /// `out[…i…] = Σ_j m[i, j] t[…j…]` acting on the given axis.
    pub fn apply_matrix(&self, m: &Matrix7, axis: usize) -> Tensor {
        assert!(axis < self.rank);
        let inner = DIM.pow((self.rank - axis - 1) as u32);
        let outer = DIM.pow(axis as u32);
        let mut out = Tensor::zeros(self.rank);
        for o in 0..outer {
            for i in 0..DIM {
                for j in 0..DIM {
                    let mij = m[(i, j)];
                    if mij == 0.0 {
                        continue;
                    }
                    let dst = (o * DIM + i) * inner;
                    let src = (o * DIM + j) * inner;
                    for r in 0..inner {
                        out.data[dst + r] += mij * self.data[src + r];
                    }
                }
            }
        }
        out
    }

    /// Moves the given axis to position 0, keeping the others in order.
    pub fn move_axis_to_front(&self, axis: usize) -> Tensor {
        if axis == 0 {
            return self.clone();
        }
        let r = self.rank;
        let mut src = vec![0usize; r];
        Tensor::from_fn(r, |idx| {
            src[axis] = idx[0];
            let mut k = 1;
            for (s, slot) in src.iter_mut().enumerate() {
                if s != axis {
                    *slot = idx[k];
                    k += 1;
                }
            }
            self.get(&src)
        })
    }

    /// Full antisymmetrisation `t_{[i₁…i_k]}` (weight 1/k!).
    pub fn antisymmetrize(&self) -> Tensor {
        let perms = permutations_with_sign(self.rank);
        let norm = 1.0 / perms.len() as f64;
        let mut src = vec![0usize; self.rank];
        Tensor::from_fn(self.rank, |idx| {
            let mut acc = 0.0;
            for (p, s) in &perms {
                for (slot, &pi) in src.iter_mut().zip(p) {
                    *slot = idx[pi];
                }
                acc += s * self.get(&src);
            }
            norm * acc
        })
    }
}

impl Add for &Tensor {
    type Output = Tensor;
    fn add(self, rhs: &Tensor) -> Tensor {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &Tensor {
    type Output = Tensor;
    fn sub(self, rhs: &Tensor) -> Tensor {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

/// Musical isomorphisms applied slot by slot: `Raise` contracts with `g⁻¹`,
/// `Lower` with `g`.
pub fn raise_lower(t: &Tensor, g: &Metric7, spec: &[IndexMove]) -> Tensor {
    assert_eq!(spec.len(), t.rank, "index spec length must equal rank");
    let mut out = t.clone();
    for (axis, mv) in spec.iter().enumerate() {
        out = match mv {
            IndexMove::Keep => out,
            IndexMove::Raise => out.apply_matrix(g.inverse(), axis),
            IndexMove::Lower => out.apply_matrix(g.matrix(), axis),
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_slots_are_lexicographic() {
        assert_eq!(basis_indices(2)[0], vec![0, 1]);
        assert_eq!(basis_indices(2)[6], vec![1, 2]);
        assert_eq!(basis_indices(3).len(), 35);
        for k in 0..=DIM {
            for (i, sub) in basis_indices(k).iter().enumerate() {
                assert_eq!(TABLES.slot[mask_of(sub) as usize], i);
            }
        }
    }

    #[test]
    fn term_sign_and_repeats() {
        let a = AltForm::term(2.0, &[3, 1]);
        assert_eq!(a.component(&[1, 3]), -2.0);
        assert_eq!(a.component(&[3, 1]), 2.0);
        assert_eq!(AltForm::term(1.0, &[2, 2]).max_abs(), 0.0);
    }

    #[test]
    fn e1_wedge_e2() {
        let w = AltForm::basis(&[1]).wedge(&AltForm::basis(&[2])).unwrap();
        assert_eq!(w, AltForm::basis(&[1, 2]));
        let w = AltForm::basis(&[2]).wedge(&AltForm::basis(&[1])).unwrap();
        assert_eq!(w, AltForm::term(-1.0, &[1, 2]));
    }

    #[test]
    fn wedge_degree_overflow() {
        let a = AltForm::basis(&[0, 1, 2, 3]);
        assert!(matches!(a.wedge(&a), Err(Error::Degree(_))));
    }

    #[test]
    fn interior_basis() {
        let e1 = Vector7::from_fn(|i, _| if i == 1 { 1.0 } else { 0.0 });
        let w = AltForm::basis(&[1, 2]).interior(&e1).unwrap();
        assert_eq!(w, AltForm::basis(&[2]));
        let w = AltForm::basis(&[0, 1]).interior(&e1).unwrap();
        assert_eq!(w, AltForm::term(-1.0, &[0]));
        assert!(AltForm::zero(0).interior(&e1).is_err());
    }

    #[test]
    fn dense_round_trip() {
        let a = AltForm::term(1.5, &[0, 3, 5]) + AltForm::term(-2.0, &[1, 2, 6]);
        let d = a.to_dense();
        assert_eq!(d.get(&[5, 0, 3]), 1.5);
        assert_eq!(d.get(&[0, 5, 3]), -1.5);
        assert_eq!(AltForm::from_dense(&d), a);
        assert_eq!(AltForm::from_dense(&d.antisymmetrize()), a);
    }

    #[test]
    fn minors_match_nalgebra_determinant() {
        let m = Matrix7::from_fn(|i, j| ((i * 7 + j) as f64 * 0.37).sin() + if i == j { 3.0 } else { 0.0 });
        let all: Vec<usize> = (0..DIM).collect();
        assert!((minor(&m, &all, &all) - m.determinant()).abs() < 1e-10);
    }

    #[test]
    fn extreme_degree_stars() {
        let g = Metric7::identity();
        assert_eq!(hodge_star(&AltForm::term(1.0, &[]), &g, Orientation::Positive), AltForm::volume());
        assert_eq!(
            hodge_star(&AltForm::volume(), &g, Orientation::Positive),
            AltForm::term(1.0, &[])
        );
    }

    #[test]
    fn metric_rejects_indefinite() {
        let mut m = Matrix7::identity();
        m[(3, 3)] = -1.0;
        assert!(matches!(Metric7::new(m), Err(Error::Metric(_))));
    }
}
