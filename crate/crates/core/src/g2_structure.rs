//! Positive 3-forms and the algebra of G₂-representations.
//!
//! The canonical structure, with 0-based frame indices and the sign
//! convention in which `φ₀` induces the identity metric and positive
//! orientation, is
//!
//! ```text
//! φ₀ = e⁰¹² + e⁰³⁴ + e⁰⁵⁶ + e¹³⁵ − e¹⁴⁶ − e²³⁶ − e²⁴⁵
//! ψ₀ = *φ₀ = e³⁴⁵⁶ + e¹²³⁴ + e¹²⁵⁶ + e⁰²⁴⁶ − e⁰¹³⁶ − e⁰¹⁴⁵ − e⁰²³⁵
//! ```
//!
//! The numerical constants appearing in contractions of `φ` and `ψ` with
//! themselves and in the projector extractions are not hard-coded: they are
//! computed once from `φ₀` by brute-force index summation (see
//! [`contraction_constants`]).

use nalgebra::SymmetricEigen;
use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::exterior_algebra::{form_inner, hodge_star, AltForm, Matrix7, Metric7, Orientation, Tensor, Vector7, DIM};

const PHI0_TERMS: [([usize; 3], f64); 7] = [
    ([0, 1, 2], 1.0),
    ([0, 3, 4], 1.0),
    ([0, 5, 6], 1.0),
    ([1, 3, 5], 1.0),
    ([1, 4, 6], -1.0),
    ([2, 3, 6], -1.0),
    ([2, 4, 5], -1.0),
];

const PSI0_TERMS: [([usize; 4], f64); 7] = [
    ([3, 4, 5, 6], 1.0),
    ([1, 2, 3, 4], 1.0),
    ([1, 2, 5, 6], 1.0),
    ([0, 2, 4, 6], 1.0),
    ([0, 1, 3, 6], -1.0),
    ([0, 1, 4, 5], -1.0),
    ([0, 2, 3, 5], -1.0),
];

/// The standard positive 3-form `φ₀`.
pub fn standard_phi() -> AltForm {
    let mut phi = AltForm::zero(3);
    for (idx, c) in PHI0_TERMS {
        phi += &AltForm::term(c, &idx);
    }
    phi
}

/// The dual 4-form `ψ₀` as an explicit coefficient list.
pub fn standard_psi() -> AltForm {
    let mut psi = AltForm::zero(4);
    for (idx, c) in PSI0_TERMS {
        psi += &AltForm::term(c, &idx);
    }
    psi
}

/// `B(e_i, e_j)`: the coefficient of `(e_i⌟φ)∧(e_j⌟φ)∧φ` on `e⁰¹²³⁴⁵⁶`.
pub fn b_form(phi: &AltForm) -> Matrix7 {
    let cols: Vec<AltForm> = (0..DIM)
        .map(|i| phi.interior(&Vector7::from_fn(|k, _| if k == i { 1.0 } else { 0.0 })).expect("degree 3"))
        .collect();
    let mut b = Matrix7::zeros();
    for i in 0..DIM {
        for j in i..DIM {
            let v = cols[i]
                .wedge(&cols[j])
                .and_then(|w| w.wedge(phi))
                .expect("2 + 2 + 3 = 7")
                .top_coefficient();
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    b
}

/// The value of `B(φ₀)` on the diagonal; fixes the normalisation so that
/// `φ₀` yields the identity metric.
static B_NORMALISATION: Lazy<f64> = Lazy::new(|| b_form(&standard_phi())[(0, 0)]);

/// Smallest admissible eigenvalue magnitude of the normalised `B`.
pub const POSITIVITY_TOL: f64 = 1e-12;

/// Metric, volume form and orientation induced by a 3-form:
/// `g = B̃ · det(B̃)^{−1/9}` with `B̃ = ±B/B(φ₀)₀₀`, the sign chosen to make `B̃`
/// positive definite and recorded as the orientation.
pub fn metric_from_phi(phi: &AltForm) -> Result<(Metric7, AltForm, Orientation)> {
    if phi.degree() != 3 {
        return Err(Error::Degree(format!("metric_from_phi needs a 3-form, got degree {}", phi.degree())));
    }
    if phi.coeffs().iter().any(|v| !v.is_finite()) {
        return Err(Error::NotPositive("non-finite coefficients".into()));
    }
    let mut b = b_form(phi) / *B_NORMALISATION;
    let eig = SymmetricEigen::new(b).eigenvalues;
    let (lo, hi) = (eig.min(), eig.max());
    let orientation = if lo > POSITIVITY_TOL {
        Orientation::Positive
    } else if hi < -POSITIVITY_TOL {
        b = -b;
        Orientation::Negative
    } else {
        return Err(Error::NotPositive(format!("B has eigenvalues in [{lo:e}, {hi:e}]")));
    };
    let det = b.determinant();
    let g = b * det.powf(-1.0 / 9.0);
    let metric = Metric7::new(g).map_err(|e| Error::NotPositive(e.to_string()))?;
    let vol = AltForm::volume().scale(orientation.sign() * metric.volume_density());
    Ok((metric, vol, orientation))
}

/// A positive 3-form with its induced metric, orientation, dual 4-form and
/// volume form.
#[derive(Debug, Clone)]
pub struct G2Structure {
    phi: AltForm,
    metric: Metric7,
    orientation: Orientation,
    psi: AltForm,
    vol: AltForm,
}

impl G2Structure {
    pub fn new(phi: AltForm) -> Result<Self> {
        let (metric, vol, orientation) = metric_from_phi(&phi)?;
        let psi = hodge_star(&phi, &metric, orientation);
        Ok(Self {
            phi,
            metric,
            orientation,
            psi,
            vol,
        })
    }

    pub fn standard() -> Self {
        Self::new(standard_phi()).expect("φ₀ is positive")
    }

    pub fn phi(&self) -> &AltForm {
        &self.phi
    }

    pub fn psi(&self) -> &AltForm {
        &self.psi
    }

    pub fn metric(&self) -> &Metric7 {
        &self.metric
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn vol(&self) -> &AltForm {
        &self.vol
    }

    pub fn star(&self, w: &AltForm) -> AltForm {
        hodge_star(w, &self.metric, self.orientation)
    }

    pub fn inner(&self, a: &AltForm, b: &AltForm) -> f64 {
        form_inner(a, b, &self.metric).expect("equal degrees")
    }

    /// `(|φ|² − 7, |ψ|² − 7, max|*ψ − φ|)`.
    pub fn self_check(&self) -> (f64, f64, f64) {
        let star_psi = self.star(&self.psi);
        (
            self.inner(&self.phi, &self.phi) - 7.0,
            self.inner(&self.psi, &self.psi) - 7.0,
            (&star_psi - &self.phi).max_abs(),
        )
    }
}

/// Constants of the contraction algebra, derived from `φ₀` by brute force.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ContractionConstants {
    /// `φ_{acd} φ_{bcd} = phi_phi · g_{ab}`.
    pub phi_phi: f64,
    /// `ψ_{acde} ψ_{bcde} = psi_psi · g_{ab}`.
    pub psi_psi: f64,
    /// `(u⌟φ)_{mn} φ^{mn}_a = pi7_two_form · u_a`.
    pub pi7_two_form: f64,
    /// `(X⌟ψ)_{mnp} ψ_d^{mnp} = pi7_three_form · X_d`.
    pub pi7_three_form: f64,
    /// For `h` traceless: `i_φ(h)_{amn} φ_b^{mn} = pi27_three_form · h_{ab}`.
    pub pi27_three_form: f64,
    /// `(X⌟ψ)_{amn} φ_b^{mn} = pi7_mixed · (X⌟φ)_{ab}`.
    pub pi7_mixed: f64,
    /// `i_φ(g) = i_phi_metric · φ`.
    pub i_phi_metric: f64,
}

fn brute_force_constants() -> ContractionConstants {
    let g = Metric7::identity();
    let phi = standard_phi();
    let psi = hodge_star(&phi, &g, Orientation::Positive);
    let p = phi.to_dense();
    let s = psi.to_dense();
    let mut pp = 0.0;
    let mut ss = 0.0;
    for a in 0..DIM {
        for c in 0..DIM {
            for d in 0..DIM {
                pp += p.get(&[a, c, d]).powi(2);
                for e in 0..DIM {
                    ss += s.get(&[a, c, d, e]).powi(2);
                }
            }
        }
    }
    let probe = Vector7::from_fn(|i, _| 0.3 + 0.1 * i as f64);
    let uphi = phi.interior(&probe).unwrap().to_dense();
    let upsi = psi.interior(&probe).unwrap().to_dense();
    let mut two = 0.0;
    let mut three = 0.0;
    for m in 0..DIM {
        for n in 0..DIM {
            two += uphi.get(&[m, n]) * p.get(&[m, n, 0]);
            for q in 0..DIM {
                three += upsi.get(&[m, n, q]) * s.get(&[0, m, n, q]);
            }
        }
    }
    let mut mixed = 0.0;
    for m in 0..DIM {
        for n in 0..DIM {
            mixed += upsi.get(&[0, m, n]) * p.get(&[1, m, n]);
        }
    }
    let traceless = Matrix7::from_fn(|i, j| match (i, j) {
        (0, 0) => 1.0,
        (1, 1) => -1.0,
        _ => 0.0,
    });
    let ih = i_phi_with(&traceless, &g, &phi).to_dense();
    let mut c27 = 0.0;
    for m in 0..DIM {
        for n in 0..DIM {
            c27 += ih.get(&[0, m, n]) * p.get(&[0, m, n]);
        }
    }
    let ig = i_phi_with(&Matrix7::identity(), &g, &phi);
    ContractionConstants {
        phi_phi: pp / DIM as f64,
        psi_psi: ss / DIM as f64,
        pi7_two_form: two / probe[0],
        pi7_three_form: three / probe[0],
        pi27_three_form: c27,
        pi7_mixed: mixed / uphi.get(&[0, 1]),
        i_phi_metric: form_inner(&ig, &phi, &g).unwrap() / form_inner(&phi, &phi, &g).unwrap(),
    }
}

static CONSTANTS: Lazy<ContractionConstants> = Lazy::new(brute_force_constants);

pub fn contraction_constants() -> &'static ContractionConstants {
    &CONSTANTS
}

fn i_phi_with(h: &Matrix7, g: &Metric7, phi: &AltForm) -> AltForm {
    // hm[d][a] = h^d_a
    let hm = g.inverse() * h;
    let p = phi.to_dense();
    let t = Tensor::from_fn(3, |i| {
        let (a, b, c) = (i[0], i[1], i[2]);
        let mut s = 0.0;
        for d in 0..DIM {
            s += hm[(d, a)] * p.get(&[b, c, d]) + hm[(d, b)] * p.get(&[c, a, d]) + hm[(d, c)] * p.get(&[a, b, d]);
        }
        s / 3.0
    });
    AltForm::from_dense(&t)
}

/// `i_φ(h)_{abc} = h^d_{[a} φ_{bc]d}` for a symmetric 2-tensor `h`.
pub fn i_phi(h: &Matrix7, g2: &G2Structure) -> AltForm {
    i_phi_with(h, &g2.metric, &g2.phi)
}

/// `i_ψ(h)_{abcd} = −h^e_{[a} ψ_{bcd]e}`.
pub fn i_psi(h: &Matrix7, g2: &G2Structure) -> AltForm {
    let hm = g2.metric.inverse() * h;
    let s = g2.psi.to_dense();
    let t = Tensor::from_fn(4, |i| {
        let mut v = 0.0;
        for e in 0..DIM {
            v += hm[(e, i[0])] * s.get(&[i[1], i[2], i[3], e]);
        }
        -v
    });
    AltForm::from_dense(&t.antisymmetrize())
}

/// `s_{amn} φ_b^{mn}` for a 3-form `s`.
fn phi_contraction(s: &AltForm, g2: &G2Structure) -> Matrix7 {
    let sd = s.to_dense();
    let pm = crate::lie_geometry::phi_mixed(&g2.phi, &g2.metric);
    Matrix7::from_fn(|a, b| {
        let mut v = 0.0;
        for m in 0..DIM {
            for n in 0..DIM {
                v += sd.get(&[a, m, n]) * pm.get(&[b, m, n]);
            }
        }
        v
    })
}

/// Splitting `b = x⌟φ + b₁₄` of a 2-form; `x` carries an upper index and
/// `b₁₄` is orthogonal to every `u⌟φ`.
pub fn project_2form(b: &AltForm, g2: &G2Structure) -> (Vector7, AltForm) {
    assert_eq!(b.degree(), 2);
    let bd = b.to_dense();
    let pm = crate::lie_geometry::phi_mixed(&g2.phi, &g2.metric);
    let lowered = Vector7::from_fn(|a, _| {
        let mut v = 0.0;
        for m in 0..DIM {
            for n in 0..DIM {
                v += bd.get(&[m, n]) * pm.get(&[a, m, n]);
            }
        }
        v / CONSTANTS.pi7_two_form
    });
    let x = g2.metric.sharp(&lowered);
    let b14 = b - &g2.phi.interior(&x).expect("degree 3");
    (x, b14)
}

/// Type decomposition `s = f·φ + x⌟ψ + i_φ(h₂₇)` of a 3-form (`x` upper,
/// `h₂₇` symmetric traceless and lowered). For a 4-form, the same fields
/// describe `c = f·ψ + x♭∧φ + *i_φ(h₂₇)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeDecomposition {
    pub f: f64,
    pub x: Vector7,
    pub h27: Matrix7,
}

impl TypeDecomposition {
    /// The symmetric `S` with `f·φ + i_φ(h₂₇) = 3 i_φ(S)`.
    pub fn symmetric_part_over_three(&self, g2: &G2Structure) -> Matrix7 {
        (self.h27 + g2.metric.matrix() * (self.f / CONSTANTS.i_phi_metric)) / 3.0
    }

    pub fn reassemble_3form(&self, g2: &G2Structure) -> AltForm {
        let mut s = g2.phi.scale(self.f);
        s += &g2.psi.interior(&self.x).expect("degree 4");
        s += &i_phi(&self.h27, g2);
        s
    }

    pub fn reassemble_4form(&self, g2: &G2Structure) -> AltForm {
        let mut c = g2.psi.scale(self.f);
        c += &AltForm::from_covector(&g2.metric.flat(&self.x)).wedge(&g2.phi).expect("1 + 3");
        c += &g2.star(&i_phi(&self.h27, g2));
        c
    }
}

pub fn project_3form(s: &AltForm, g2: &G2Structure) -> TypeDecomposition {
    assert_eq!(s.degree(), 3);
    let f = g2.inner(s, &g2.phi) / g2.inner(&g2.phi, &g2.phi);
    // x: contract with ψ_d^{mnp}; only the Λ³₇ part survives.
    let sd = s.to_dense();
    let psi_up = g2
        .psi
        .to_dense()
        .apply_matrix(g2.metric.inverse(), 1)
        .apply_matrix(g2.metric.inverse(), 2)
        .apply_matrix(g2.metric.inverse(), 3);
    let lowered = Vector7::from_fn(|d, _| {
        let mut v = 0.0;
        for m in 0..DIM {
            for n in 0..DIM {
                for p in 0..DIM {
                    v += sd.get(&[m, n, p]) * psi_up.get(&[d, m, n, p]);
                }
            }
        }
        v / CONSTANTS.pi7_three_form
    });
    let x = g2.metric.sharp(&lowered);
    // h27: the symmetric traceless part of s_{amn} φ_b^{mn}.
    let c = phi_contraction(s, g2);
    let sym = 0.5 * (c + c.transpose());
    let traceless = sym - g2.metric.matrix() * (g2.metric.trace(&sym) / DIM as f64);
    TypeDecomposition {
        f,
        x,
        h27: traceless / CONSTANTS.pi27_three_form,
    }
}

/// Decomposes `c = f·ψ + x♭∧φ + *i_φ(h₂₇)` by reducing to `*c`.
pub fn project_4form(c: &AltForm, g2: &G2Structure) -> TypeDecomposition {
    assert_eq!(c.degree(), 4);
    let mut d = project_3form(&g2.star(c), g2);
    // *(x♭∧φ) = −x⌟ψ
    d.x = -d.x;
    d
}

/// Writes a 3-form as `X⌟ψ + 3 i_φ(S)` with `S` symmetric.
pub fn split_3form(s: &AltForm, g2: &G2Structure) -> (Vector7, Matrix7) {
    let d = project_3form(s, g2);
    let sym = d.symmetric_part_over_three(g2);
    (d.x, sym)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_match_expected_values() {
        let c = contraction_constants();
        assert!((c.phi_phi - 6.0).abs() < 1e-14);
        assert!((c.psi_psi - 24.0).abs() < 1e-14);
        assert!((c.pi7_two_form - 6.0).abs() < 1e-14);
        assert!((c.pi7_three_form - 24.0).abs() < 1e-14);
        assert!((c.pi27_three_form - 4.0 / 3.0).abs() < 1e-14);
        assert!((c.pi7_mixed - 4.0).abs() < 1e-14);
        assert!((c.i_phi_metric - 1.0).abs() < 1e-14);
    }

    #[test]
    fn b_form_of_standard_is_six_identity() {
        let b = b_form(&standard_phi());
        assert!((b - Matrix7::identity() * 6.0).abs().max() < 1e-14);
    }

    #[test]
    fn reversed_phi_has_negative_orientation() {
        let g2 = G2Structure::new(standard_phi().scale(-1.0)).unwrap();
        assert_eq!(g2.orientation(), Orientation::Negative);
        assert!((g2.metric().matrix() - Matrix7::identity()).abs().max() < 1e-14);
    }
}
