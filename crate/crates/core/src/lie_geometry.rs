//! Left-invariant geometry computed from structure constants.
//!
//! Everything is expressed in a fixed frame `e₀ … e₆` of the Lie algebra.
//! Invariant tensors have constant coefficients, so covariant derivatives
//! reduce to algebraic contractions with the connection coefficients.
//!
//! Conventions:
//! * `[e_i, e_j] = c^k_{ij} e_k`, stored as `c[k][i][j]`.
//! * `∇_{e_x} e_y = Γ^k_{xy} e_k`, stored as `gamma[k][x][y]`.
//! * `Riem_{ijkl} = g(R(e_i, e_j) e_l, e_k)` with
//!   `R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_{[X,Y]}`, and `Ric_{jl} = g^{ik} Riem_{ijkl}`
//!   (positive on round spheres).

use crate::error::{Error, Result};
use crate::exterior_algebra::{
    basis_indices, hodge_star, AltForm, Matrix7, Metric7, Orientation, Tensor, Vector7, DIM,
    FORM_DIMS,
};

/// Structure constants of a seven-dimensional real Lie algebra together with
/// the matrices of its Chevalley–Eilenberg differential in every degree.
#[derive(Debug, Clone)]
pub struct LieAlgebraData {
    name: String,
    c: Tensor,
    jacobi_residual: f64,
    /// d_mats[k] maps packed k-forms to packed (k+1)-forms, row-major.
    d_mats: Vec<Vec<f64>>,
}

/// Tolerance for the Jacobi identity, relative to the squared size of `c`.
pub const JACOBI_TOL: f64 = 1e-12;

impl LieAlgebraData {
    /// Validates antisymmetry and the Jacobi identity.
    pub fn new(name: impl Into<String>, c: Tensor) -> Result<Self> {
        let alg = Self::new_unchecked(name, c)?;
        let scale = alg.c.max_abs().max(1.0);
        if alg.jacobi_residual > JACOBI_TOL * scale * scale {
            return Err(Error::InvalidAlgebra(format!(
                "{}: Jacobi residual {:e}",
                alg.name, alg.jacobi_residual
            )));
        }
        Ok(alg)
    }

    /// Accepts structure constants that violate Jacobi (still requires
    /// antisymmetry). Used to probe how d² reacts to a broken bracket.
    pub fn new_unchecked(name: impl Into<String>, c: Tensor) -> Result<Self> {
        let name = name.into();
        if c.rank() != 3 {
            return Err(Error::InvalidAlgebra(format!("{name}: structure constants need rank 3")));
        }
        let scale = c.max_abs().max(1.0);
        for k in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    if (c.get(&[k, i, j]) + c.get(&[k, j, i])).abs() > 1e-12 * scale {
                        return Err(Error::InvalidAlgebra(format!(
                            "{name}: c^{k}_{i}{j} is not antisymmetric in its lower indices"
                        )));
                    }
                }
            }
        }
        let jacobi_residual = jacobi_residual(&c);
        let d_mats = (0..DIM).map(|k| differential_matrix(&c, k)).collect();
        Ok(Self {
            name,
            c,
            jacobi_residual,
            d_mats,
        })
    }

    /// Builds the constants from `(i, j, k, value)` meaning `c^k_{ij} = value`;
    /// the `(j, i)` entry is filled in with the opposite sign. Repeated
    /// entries accumulate.
    pub fn from_brackets(name: impl Into<String>, brackets: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let mut c = Tensor::zeros(3);
        for &(i, j, k, v) in brackets {
            if i >= DIM || j >= DIM || k >= DIM {
                return Err(Error::InvalidAlgebra(format!("bracket index out of range in ({i}, {j}, {k})")));
            }
            if i == j {
                if v != 0.0 {
                    return Err(Error::InvalidAlgebra(format!("[e_{i}, e_{i}] must vanish")));
                }
                continue;
            }
            c.set(&[k, i, j], c.get(&[k, i, j]) + v);
            c.set(&[k, j, i], c.get(&[k, j, i]) - v);
        }
        Self::new(name, c)
    }

    pub fn abelian(name: impl Into<String>) -> Self {
        Self::new(name, Tensor::zeros(3)).expect("abelian algebra is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `c^k_{ij}` as `c[k][i][j]`.
    pub fn constants(&self) -> &Tensor {
        &self.c
    }

    /// `c^k_{ij}`.
    #[inline]
    pub fn c(&self, k: usize, i: usize, j: usize) -> f64 {
        self.c.get(&[k, i, j])
    }

    /// Maximum over `(i, j, k, n)` of `|Σ_cyc c^m_{ij} c^n_{mk}|`.
    pub fn jacobi_residual(&self) -> f64 {
        self.jacobi_residual
    }

    /// `c^k_{ik} = 0` for every `i` (within 1e-12).
    pub fn is_unimodular(&self) -> bool {
        let scale = self.c.max_abs().max(1.0);
        (0..DIM).all(|i| (0..DIM).map(|k| self.c(k, i, k)).sum::<f64>().abs() < 1e-12 * scale)
    }

    /// The exterior derivative without checking the Jacobi identity.
    pub fn d_unchecked(&self, w: &AltForm) -> AltForm {
        let k = w.degree();
        if k == DIM {
            return AltForm::zero(DIM);
        }
        let (rows, cols) = (FORM_DIMS[k + 1], FORM_DIMS[k]);
        let m = &self.d_mats[k];
        let x = w.coeffs();
        let coeffs = (0..rows)
            .map(|r| m[r * cols..(r + 1) * cols].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect();
        AltForm::from_coeffs(k + 1, coeffs).expect("d raises degree by one")
    }

    /// Matrix of `d` from packed k-forms to packed (k+1)-forms, row-major.
    pub fn differential_matrix(&self, k: usize) -> &[f64] {
        &self.d_mats[k]
    }
}

fn jacobi_residual(c: &Tensor) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                for n in 0..DIM {
                    let mut s = 0.0;
                    for m in 0..DIM {
                        s += c.get(&[m, i, j]) * c.get(&[n, m, k])
                            + c.get(&[m, j, k]) * c.get(&[n, m, i])
                            + c.get(&[m, k, i]) * c.get(&[n, m, j]);
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

/// `d` on basis k-forms by the Leibniz rule, starting from
/// `de^m = −Σ_{i<j} c^m_{ij} e^{ij}`, i.e. `(dω)(X, Y) = −ω([X, Y])`.
fn differential_matrix(c: &Tensor, k: usize) -> Vec<f64> {
    let (rows, cols) = (FORM_DIMS[k + 1], FORM_DIMS[k]);
    let de: Vec<AltForm> = (0..DIM)
        .map(|m| {
            let mut f = AltForm::zero(2);
            for (slot, ij) in basis_indices(2).iter().enumerate() {
                f.coeffs_mut()[slot] = -c.get(&[m, ij[0], ij[1]]);
            }
            f
        })
        .collect();
    let mut out = vec![0.0; rows * cols];
    for (col, idx) in basis_indices(k).iter().enumerate() {
        let mut acc = AltForm::zero(k + 1);
        for r in 0..k {
            let mut term = AltForm::term(1.0, &[]);
            for (s, &i) in idx.iter().enumerate() {
                let factor = if s == r { de[i].clone() } else { AltForm::basis(&[i]) };
                term = term.wedge(&factor).expect("degree stays within 7");
            }
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            acc.axpy(sign, &term);
        }
        for (row, &v) in acc.coeffs().iter().enumerate() {
            out[row * cols + col] = v;
        }
    }
    out
}

/// Chevalley–Eilenberg differential of an invariant form.
pub fn ce_differential(w: &AltForm, alg: &LieAlgebraData) -> Result<AltForm> {
    let scale = alg.c.max_abs().max(1.0);
    if alg.jacobi_residual > JACOBI_TOL * scale * scale {
        return Err(Error::InvalidAlgebra(format!(
            "{}: Jacobi residual {:e}",
            alg.name, alg.jacobi_residual
        )));
    }
    if w.degree() == DIM {
        return Err(Error::Degree("d of a 7-form".into()));
    }
    Ok(alg.d_unchecked(w))
}

/// `d* = (−1)^k * d *` on k-forms. On unimodular algebras this is the adjoint
/// of `d` for the frame-volume pairing.
pub fn hodge_codifferential(
    w: &AltForm,
    g: &Metric7,
    orientation: Orientation,
    alg: &LieAlgebraData,
) -> AltForm {
    let k = w.degree();
    if k == 0 {
        return AltForm::zero(0);
    }
    let inner = alg.d_unchecked(&hodge_star(w, g, orientation));
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    hodge_star(&inner, g, orientation).scale(sign)
}

/// Connection coefficients `Γ^k_{xy}` of an invariant affine connection.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionData {
    gamma: Tensor,
}

impl ConnectionData {
    pub fn from_gamma(gamma: Tensor) -> Self {
        assert_eq!(gamma.rank(), 3);
        Self { gamma }
    }

    /// `Γ^k_{xy}` as `gamma[k][x][y]`.
    pub fn gamma(&self) -> &Tensor {
        &self.gamma
    }

    /// `max |Γ^k_{ij} − Γ^k_{ji} − c^k_{ij}|`.
    pub fn torsion_residual(&self, alg: &LieAlgebraData) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    let r = self.gamma.get(&[k, i, j]) - self.gamma.get(&[k, j, i]) - alg.c(k, i, j);
                    worst = worst.max(r.abs());
                }
            }
        }
        worst
    }

    /// `max |∇g|`.
    pub fn metric_residual(&self, g: &Metric7) -> f64 {
        covariant_derivative(&Tensor::from_matrix(g.matrix()), &[Variance::Lower; 2], self).max_abs()
    }
}

/// Levi-Civita connection of an invariant metric via the Koszul formula
/// `2g(∇_X Y, Z) = g([X,Y],Z) − g([Y,Z],X) + g([Z,X],Y)`.
pub fn levi_civita(g: &Metric7, alg: &LieAlgebraData) -> ConnectionData {
    let gm = g.matrix();
    // cl[z][x][y] = g([e_x, e_y], e_z)
    let cl = alg.c.apply_matrix(gm, 0);
    let mut lowered = Tensor::zeros(3);
    for x in 0..DIM {
        for y in 0..DIM {
            for z in 0..DIM {
                let v = 0.5 * (cl.get(&[z, x, y]) - cl.get(&[x, y, z]) + cl.get(&[y, z, x]));
                lowered.set(&[z, x, y], v);
            }
        }
    }
    ConnectionData {
        gamma: lowered.apply_matrix(g.inverse(), 0),
    }
}

/// Index position of a tensor slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Lower,
    Upper,
}

/// `∇t` of an invariant tensor; the derivative index is placed first.
pub fn covariant_derivative(t: &Tensor, variance: &[Variance], conn: &ConnectionData) -> Tensor {
    let r = t.rank();
    assert_eq!(variance.len(), r, "one variance per tensor slot");
    let gamma = &conn.gamma;
    let block = t.data().len();
    let mut out = Tensor::zeros(r + 1);
    for (axis, v) in variance.iter().enumerate() {
        for a in 0..DIM {
            // Lower slot b: −Γ^m_{ab} t_{…m…}; upper slot b: +Γ^b_{am} t^{…m…}.
            let m = match v {
                Variance::Lower => Matrix7::from_fn(|b, m| -gamma.get(&[m, a, b])),
                Variance::Upper => Matrix7::from_fn(|b, m| gamma.get(&[b, a, m])),
            };
            let term = t.apply_matrix(&m, axis);
            let dst = &mut out.data_mut()[a * block..(a + 1) * block];
            for (d, s) in dst.iter_mut().zip(term.data()) {
                *d += s;
            }
        }
    }
    out
}

/// Riemann, Ricci, scalar curvature and the G₂-twisted `Ric*`.
#[derive(Debug, Clone)]
pub struct CurvatureData {
    pub riem: Tensor,
    pub ric: Matrix7,
    pub scal: f64,
    pub ric_star: Matrix7,
}

impl CurvatureData {
    /// `|Riem|²` with all indices contracted by the metric.
    pub fn riem_norm_sq(&self, g: &Metric7) -> f64 {
        let mut up = self.riem.clone();
        for axis in 0..4 {
            up = up.apply_matrix(g.inverse(), axis);
        }
        up.data().iter().zip(self.riem.data()).map(|(a, b)| a * b).sum()
    }

    /// Largest violation of the algebraic Riemann symmetries: skew in (ij),
    /// skew in (kl), pair symmetry and the first Bianchi identity.
    pub fn symmetry_residual(&self) -> f64 {
        let r = &self.riem;
        let mut worst: f64 = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    for l in 0..DIM {
                        let v = r.get(&[i, j, k, l]);
                        worst = worst
                            .max((v + r.get(&[j, i, k, l])).abs())
                            .max((v + r.get(&[i, j, l, k])).abs())
                            .max((v - r.get(&[k, l, i, j])).abs())
                            .max((v + r.get(&[j, k, i, l]) + r.get(&[k, i, j, l])).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Curvature of an invariant Levi-Civita connection.
pub fn curvature(conn: &ConnectionData, alg: &LieAlgebraData, g: &Metric7, phi: &AltForm) -> CurvatureData {
    let gamma = &conn.gamma;
    // rop[l][k][i][j] = e^l(R(e_i, e_j) e_k)
    let mut rop = Tensor::zeros(4);
    for l in 0..DIM {
        for k in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    let mut v = 0.0;
                    for m in 0..DIM {
                        v += gamma.get(&[m, j, k]) * gamma.get(&[l, i, m])
                            - gamma.get(&[m, i, k]) * gamma.get(&[l, j, m])
                            - alg.c(m, i, j) * gamma.get(&[l, m, k]);
                    }
                    rop.set(&[l, k, i, j], v);
                }
            }
        }
    }
    let lowered = rop.apply_matrix(g.matrix(), 0);
    // riem[i][j][k][l] = g(R(e_i,e_j)e_l, e_k) = lowered[k][l][i][j]
    let riem = Tensor::from_fn(4, |idx| lowered.get(&[idx[2], idx[3], idx[0], idx[1]]));
    let gi = g.inverse();
    let ric = Matrix7::from_fn(|j, l| {
        let mut s = 0.0;
        for i in 0..DIM {
            for k in 0..DIM {
                s += gi[(i, k)] * riem.get(&[i, j, k, l]);
            }
        }
        s
    });
    let scal = g.trace(&ric);
    let ric_star = ric_star(&riem, g, phi);
    CurvatureData {
        riem,
        ric,
        scal,
        ric_star,
    }
}

/// `(Ric*)_{ab} = Riem_{mnpq} φ^{mn}_a φ^{pq}_b`.
fn ric_star(riem: &Tensor, g: &Metric7, phi: &AltForm) -> Matrix7 {
    // pm[a][m][n] = φ_a^{mn}
    let pm = phi_mixed(phi, g);
    let mut tmp = vec![0.0; DIM * DIM * DIM];
    // tmp[a][p][q] = Riem_{mnpq} φ_a^{mn}
    for a in 0..DIM {
        for m in 0..DIM {
            for n in 0..DIM {
                let w = pm.get(&[a, m, n]);
                if w == 0.0 {
                    continue;
                }
                for p in 0..DIM {
                    for q in 0..DIM {
                        tmp[(a * DIM + p) * DIM + q] += w * riem.get(&[m, n, p, q]);
                    }
                }
            }
        }
    }
    Matrix7::from_fn(|a, b| {
        let mut s = 0.0;
        for p in 0..DIM {
            for q in 0..DIM {
                s += tmp[(a * DIM + p) * DIM + q] * pm.get(&[b, p, q]);
            }
        }
        s
    })
}

/// `φ_a^{mn}`: first index lowered, last two raised.
pub fn phi_mixed(phi: &AltForm, g: &Metric7) -> Tensor {
    phi.to_dense().apply_matrix(g.inverse(), 1).apply_matrix(g.inverse(), 2)
}

/// `div X = ∇_a X^a` for a vector field given with an upper index.
pub fn div_vector(x: &Vector7, conn: &ConnectionData) -> f64 {
    let d = covariant_derivative(&Tensor::from_vector(x), &[Variance::Upper], conn);
    (0..DIM).map(|a| d.get(&[a, a])).sum()
}

/// `(div β)_b = ∇^a β_{ab}` for a lowered 2-tensor; returns a covector.
pub fn div_tensor(beta: &Matrix7, conn: &ConnectionData, g: &Metric7) -> Vector7 {
    let d = covariant_derivative(&Tensor::from_matrix(beta), &[Variance::Lower; 2], conn);
    let gi = g.inverse();
    Vector7::from_fn(|b, _| {
        let mut s = 0.0;
        for m in 0..DIM {
            for a in 0..DIM {
                s += gi[(m, a)] * d.get(&[m, a, b]);
            }
        }
        s
    })
}

/// `(curl X)^a = ∇_b X_c φ^{abc}` for a vector field with an upper index;
/// returns a vector with an upper index.
pub fn curl_vector(x: &Vector7, conn: &ConnectionData, g: &Metric7, phi: &AltForm) -> Vector7 {
    let xl = g.flat(x);
    let d = covariant_derivative(&Tensor::from_vector(&xl), &[Variance::Lower], conn);
    let up = phi.to_dense().apply_matrix(g.inverse(), 0).apply_matrix(g.inverse(), 1).apply_matrix(g.inverse(), 2);
    Vector7::from_fn(|a, _| {
        let mut s = 0.0;
        for b in 0..DIM {
            for c in 0..DIM {
                s += d.get(&[b, c]) * up.get(&[a, b, c]);
            }
        }
        s
    })
}

/// `(curl β)_{ab} = ∇_m β_{na} φ_b^{mn}` for a lowered 2-tensor.
pub fn curl_tensor(beta: &Matrix7, conn: &ConnectionData, g: &Metric7, phi: &AltForm) -> Matrix7 {
    let d = covariant_derivative(&Tensor::from_matrix(beta), &[Variance::Lower; 2], conn);
    let pm = phi_mixed(phi, g);
    Matrix7::from_fn(|a, b| {
        let mut s = 0.0;
        for m in 0..DIM {
            for n in 0..DIM {
                s += d.get(&[m, n, a]) * pm.get(&[b, m, n]);
            }
        }
        s
    })
}

/// `(α∘β)_{ab} = φ_{amn} φ_{bpq} α^{mp} β^{nq}` for lowered 2-tensors.
pub fn circ_product(alpha: &Matrix7, beta: &Matrix7, g: &Metric7, phi: &AltForm) -> Matrix7 {
    let au = g.raise_both(alpha);
    let bu = g.raise_both(beta);
    let p = phi.to_dense();
    // w[a][p][n] = φ_{amn} α^{mp}
    let mut w = vec![0.0; DIM * DIM * DIM];
    for a in 0..DIM {
        for m in 0..DIM {
            for n in 0..DIM {
                let v = p.get(&[a, m, n]);
                if v == 0.0 {
                    continue;
                }
                for q in 0..DIM {
                    w[(a * DIM + q) * DIM + n] += v * au[(m, q)];
                }
            }
        }
    }
    Matrix7::from_fn(|a, b| {
        let mut s = 0.0;
        for pp in 0..DIM {
            for q in 0..DIM {
                let v = p.get(&[b, pp, q]);
                if v == 0.0 {
                    continue;
                }
                for n in 0..DIM {
                    s += w[(a * DIM + pp) * DIM + n] * v * bu[(n, q)];
                }
            }
        }
        s
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heisenberg() -> LieAlgebraData {
        LieAlgebraData::from_brackets("h7", &[(1, 2, 0, -1.0), (3, 4, 0, -1.0), (5, 6, 0, -1.0)]).unwrap()
    }

    #[test]
    fn one_form_differential_is_minus_bracket() {
        let alg = heisenberg();
        let d = ce_differential(&AltForm::basis(&[0]), &alg).unwrap();
        // de^0(e_1, e_2) = −e^0([e_1, e_2]) = −c^0_{12} = 1
        assert_eq!(d.component(&[1, 2]), 1.0);
        assert_eq!(d.component(&[3, 4]), 1.0);
    }

    #[test]
    fn broken_jacobi_is_rejected() {
        let mut c = Tensor::zeros(3);
        c.set(&[0, 1, 2], 1.0);
        c.set(&[0, 2, 1], -1.0);
        c.set(&[1, 0, 3], 1.0);
        c.set(&[1, 3, 0], -1.0);
        c.set(&[2, 3, 4], 1.0);
        c.set(&[2, 4, 3], -1.0);
        let r = LieAlgebraData::new("bad", c.clone());
        assert!(matches!(r, Err(Error::InvalidAlgebra(_))));
        let alg = LieAlgebraData::new_unchecked("bad", c).unwrap();
        assert!(alg.jacobi_residual() > 0.5);
        assert!(matches!(ce_differential(&AltForm::basis(&[0]), &alg), Err(Error::InvalidAlgebra(_))));
    }

    #[test]
    fn unimodularity() {
        assert!(heisenberg().is_unimodular());
        let solvable = LieAlgebraData::from_brackets("r", &[(0, 1, 1, 1.0)]).unwrap();
        assert!(!solvable.is_unimodular());
    }

    #[test]
    fn abelian_is_flat() {
        let alg = LieAlgebraData::abelian("flat");
        let g = Metric7::identity();
        let conn = levi_civita(&g, &alg);
        assert_eq!(conn.gamma().max_abs(), 0.0);
    }

    #[test]
    fn levi_civita_invariants_on_heisenberg() {
        let alg = heisenberg();
        let g = Metric7::new(Matrix7::from_fn(|i, j| if i == j { 1.0 + 0.1 * i as f64 } else { 0.05 })).unwrap();
        let conn = levi_civita(&g, &alg);
        assert!(conn.torsion_residual(&alg) < 1e-12);
        assert!(conn.metric_residual(&g) < 1e-12);
    }
}
