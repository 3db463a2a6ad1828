//! Full torsion tensor, its irreducible components and the identity suites
//! relating torsion to curvature.
//!
//! `T` is determined by `∇_a φ_{bcd} = T_a^e ψ_{ebcd}` and stored fully
//! lowered. The components satisfy `T = ¼τ₀g − τ₁⌟φ + ½τ₂ − ⅓τ₃`.
//!
//! A handful of the torsion identities are stated here in the form that
//! holds for every G₂-structure; the commonly quoted versions of the
//! gradient-of-torsion, `Ric*`, and co-closed Ricci identities carry sign
//! slips that only cancel for symmetric or skew torsion (see the README).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior_algebra::{AltForm, Matrix7, Metric7, Tensor, Vector7, DIM};
use crate::g2_structure::{contraction_constants, i_phi, G2Structure};
use crate::lie_geometry::{
    covariant_derivative, curl_tensor, curvature, div_tensor, levi_civita, circ_product, ConnectionData,
    CurvatureData, LieAlgebraData, Variance,
};

/// Torsion classes detected from vanishing components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct TorsionClass {
    pub closed: bool,
    pub coclosed: bool,
    pub torsion_free: bool,
    pub nearly_parallel: bool,
    pub locally_conformally_parallel: bool,
}

/// Full torsion and its G₂-irreducible components.
#[derive(Debug, Clone)]
pub struct TorsionData {
    /// `T_{ab}`, fully lowered.
    pub t: Matrix7,
    pub tau0: f64,
    /// `τ₁` as a 1-form (lowered).
    pub tau1: Vector7,
    /// `τ₂ ∈ Λ²₁₄` as an antisymmetric matrix.
    pub tau2: Matrix7,
    /// `τ₃`, symmetric and traceless.
    pub tau3: Matrix7,
    pub class: TorsionClass,
}

/// Components `(τ₀, τ₁, τ₂, τ₃)` of a lowered 2-tensor.
pub fn torsion_components(t: &Matrix7, g2: &G2Structure) -> (f64, Vector7, Matrix7, Matrix7) {
    let g = g2.metric();
    let tr = g.trace(t);
    let tau0 = 4.0 * tr / DIM as f64;
    let tau1 = -t_hook_phi(t, g2) / contraction_constants().pi7_two_form;
    let t1phi = vector_hook_phi(&g.sharp(&tau1), g2);
    let skew = 0.5 * (t - t.transpose());
    let sym = 0.5 * (t + t.transpose());
    let tau2 = 2.0 * (skew + t1phi);
    let tau3 = -3.0 * (sym - g.matrix() * (tr / DIM as f64));
    (tau0, tau1, tau2, tau3)
}

/// `T = ¼τ₀g − τ₁⌟φ + ½τ₂ − ⅓τ₃`.
pub fn torsion_from_components(tau0: f64, tau1: &Vector7, tau2: &Matrix7, tau3: &Matrix7, g2: &G2Structure) -> Matrix7 {
    let g = g2.metric();
    g.matrix() * (0.25 * tau0) - vector_hook_phi(&g.sharp(tau1), g2) + tau2 * 0.5 - tau3 / 3.0
}

/// Metric norm of a lowered 2-tensor.
pub fn norm2(t: &Matrix7, g: &Metric7) -> f64 {
    g.inner2(t, t).max(0.0).sqrt()
}

/// Torsion-class flags: a component vanishes when its norm is below
/// `1e-10 · (1 + |T|)`.
pub fn torsion_class(data: &TorsionData, g2: &G2Structure) -> TorsionClass {
    classify(&data.t, data.tau0, &data.tau1, &data.tau2, &data.tau3, g2)
}

fn classify(t: &Matrix7, tau0: f64, tau1: &Vector7, tau2: &Matrix7, tau3: &Matrix7, g2: &G2Structure) -> TorsionClass {
    let g = g2.metric();
    let tol = 1e-10 * (1.0 + norm2(t, g));
    let z0 = tau0.abs() < tol;
    let z1 = g.sharp(tau1).dot(tau1).max(0.0).sqrt() < tol;
    let z2 = norm2(tau2, g) < tol;
    let z3 = norm2(tau3, g) < tol;
    TorsionClass {
        closed: z0 && z1 && z3,
        coclosed: z1 && z2,
        torsion_free: z0 && z1 && z2 && z3,
        nearly_parallel: !z0 && z1 && z2 && z3,
        locally_conformally_parallel: z0 && !z1 && z2 && z3,
    }
}

/// `(T⌟φ)_a = T^{mn} φ_{mna}`, lowered.
pub fn t_hook_phi(t: &Matrix7, g2: &G2Structure) -> Vector7 {
    let tu = g2.metric().raise_both(t);
    let p = g2.phi().to_dense();
    Vector7::from_fn(|a, _| {
        let mut s = 0.0;
        for m in 0..DIM {
            for n in 0..DIM {
                s += tu[(m, n)] * p.get(&[m, n, a]);
            }
        }
        s
    })
}

/// `(T⌟ψ)_{ab} = T^{mn} ψ_{mnab}`.
pub fn t_hook_psi(t: &Matrix7, g2: &G2Structure) -> Matrix7 {
    let tu = g2.metric().raise_both(t);
    let s = g2.psi().to_dense();
    Matrix7::from_fn(|a, b| {
        let mut v = 0.0;
        for m in 0..DIM {
            for n in 0..DIM {
                v += tu[(m, n)] * s.get(&[m, n, a, b]);
            }
        }
        v
    })
}

/// `(X⌟φ)_{ab} = X^c φ_{cab}` for an upper-index `X`.
pub fn vector_hook_phi(x: &Vector7, g2: &G2Structure) -> Matrix7 {
    g2.phi().interior(x).expect("degree 3").to_skew_matrix()
}

/// `ψ(S, T) = ψ_{abcd} S^{ab} T^{cd}`.
pub fn psi_pair(s: &Matrix7, t: &Matrix7, g2: &G2Structure) -> f64 {
    let su = g2.metric().raise_both(s);
    let tu = g2.metric().raise_both(t);
    let p = g2.psi().to_dense();
    let mut v = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            if su[(a, b)] == 0.0 {
                continue;
            }
            for c in 0..DIM {
                for d in 0..DIM {
                    v += p.get(&[a, b, c, d]) * su[(a, b)] * tu[(c, d)];
                }
            }
        }
    }
    v
}

/// Extracts `T` from `∇φ`: `∇_a φ_{bcd} ψ_f^{bcd} = κ T_{af}` with the
/// brute-force constant `κ` of the ψψ contraction.
pub fn full_torsion(g2: &G2Structure, conn: &ConnectionData) -> TorsionData {
    let grad_phi = covariant_derivative(&g2.phi().to_dense(), &[Variance::Lower; 3], conn);
    torsion_from_grad_phi(&grad_phi, g2)
}

fn torsion_from_grad_phi(grad_phi: &Tensor, g2: &G2Structure) -> TorsionData {
    let gi = g2.metric().inverse();
    let psi_up = g2.psi().to_dense().apply_matrix(gi, 1).apply_matrix(gi, 2).apply_matrix(gi, 3);
    let kappa = contraction_constants().psi_psi;
    let t = Matrix7::from_fn(|a, f| {
        let mut s = 0.0;
        for b in 0..DIM {
            for c in 0..DIM {
                for d in 0..DIM {
                    s += grad_phi.get(&[a, b, c, d]) * psi_up.get(&[f, b, c, d]);
                }
            }
        }
        s / kappa
    });
    let (tau0, tau1, tau2, tau3) = torsion_components(&t, g2);
    let class = classify(&t, tau0, &tau1, &tau2, &tau3, g2);
    TorsionData {
        t,
        tau0,
        tau1,
        tau2,
        tau3,
        class,
    }
}

/// Everything derived from a 3-form on a Lie algebra: structure, connection,
/// torsion, curvature and the covariant derivatives used by the suites.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub g2: G2Structure,
    pub conn: ConnectionData,
    pub torsion: TorsionData,
    pub curvature: CurvatureData,
    /// `∇_a φ_{bcd}`.
    pub grad_phi: Tensor,
    /// `∇_a T_{bc}`.
    pub grad_t: Tensor,
}

impl Geometry {
    pub fn new(phi: AltForm, alg: &LieAlgebraData) -> Result<Self> {
        let g2 = G2Structure::new(phi)?;
        Ok(Self::from_structure(g2, alg))
    }

    pub fn from_structure(g2: G2Structure, alg: &LieAlgebraData) -> Self {
        let conn = levi_civita(g2.metric(), alg);
        let grad_phi = covariant_derivative(&g2.phi().to_dense(), &[Variance::Lower; 3], &conn);
        let torsion = torsion_from_grad_phi(&grad_phi, &g2);
        let curvature = curvature(&conn, alg, g2.metric(), g2.phi());
        let grad_t = covariant_derivative(&Tensor::from_matrix(&torsion.t), &[Variance::Lower; 2], &conn);
        Self {
            g2,
            conn,
            torsion,
            curvature,
            grad_phi,
            grad_t,
        }
    }

    pub fn metric(&self) -> &Metric7 {
        self.g2.metric()
    }

    pub fn t(&self) -> &Matrix7 {
        &self.torsion.t
    }

    pub fn trace_t(&self) -> f64 {
        self.metric().trace(&self.torsion.t)
    }

    /// `|T|² = T_{ab} T^{ab}`.
    pub fn norm_t_sq(&self) -> f64 {
        self.metric().inner2(&self.torsion.t, &self.torsion.t)
    }

    /// `T g⁻¹ T`.
    pub fn t_squared(&self) -> Matrix7 {
        self.metric().product(&self.torsion.t, &self.torsion.t)
    }

    /// `|∇T|²` with all three indices contracted by the metric.
    pub fn grad_t_norm_sq(&self) -> f64 {
        let gi = self.metric().inverse();
        let up = self.grad_t.apply_matrix(gi, 0).apply_matrix(gi, 1).apply_matrix(gi, 2);
        up.data().iter().zip(self.grad_t.data()).map(|(a, b)| a * b).sum()
    }

    pub fn curl_t(&self) -> Matrix7 {
        curl_tensor(&self.torsion.t, &self.conn, self.metric(), self.g2.phi())
    }

    pub fn circ(&self, a: &Matrix7, b: &Matrix7) -> Matrix7 {
        circ_product(a, b, self.metric(), self.g2.phi())
    }

    /// `div T` as a covector.
    pub fn div_t(&self) -> Vector7 {
        div_tensor(&self.torsion.t, &self.conn, self.metric())
    }
}

/// One named residual with the tolerance it is judged against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Residual {
    pub fn passed(&self) -> bool {
        self.residual.is_finite() && self.residual < self.tolerance
    }
}

/// An ordered list of residuals.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ResidualReport {
    pub entries: Vec<Residual>,
}

impl ResidualReport {
    pub fn push(&mut self, name: &str, residual: f64, tolerance: f64) {
        self.entries.push(Residual {
            name: name.to_string(),
            residual,
            tolerance,
        });
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|r| r.name == name).map(|r| r.residual)
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, r| m.max(r.residual))
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(Residual::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Residual> {
        self.entries.iter().filter(|r| !r.passed())
    }

    pub fn extend(&mut self, other: ResidualReport) {
        self.entries.extend(other.entries);
    }
}

/// Tolerance for the exact torsion identities.
pub const IDENTITY_TOL: f64 = 1e-10;

fn max_abs_matrix(m: &Matrix7) -> f64 {
    m.abs().max()
}

fn sym(m: &Matrix7) -> Matrix7 {
    0.5 * (m + m.transpose())
}

fn skew(m: &Matrix7) -> Matrix7 {
    0.5 * (m - m.transpose())
}

/// Residual of `∇_a φ_{bcd} = T_a^e ψ_{ebcd}`.
pub fn grad_phi_residual(geo: &Geometry) -> f64 {
    let tm = geo.t() * geo.metric().inverse();
    // T_a^e ψ_{ebcd}: apply the matrix (T g⁻¹) to the first slot of ψ.
    let rhs = geo.g2.psi().to_dense().apply_matrix(&tm, 0);
    (&geo.grad_phi - &rhs).max_abs()
}

/// Residual of `∇_a ψ_{bcde} = −4 T_{a[b} φ_{cde]}`.
pub fn grad_psi_residual(geo: &Geometry) -> f64 {
    let grad_psi = covariant_derivative(&geo.g2.psi().to_dense(), &[Variance::Lower; 4], &geo.conn);
    let p = geo.g2.phi().to_dense();
    let t = geo.t();
    let mut worst: f64 = 0.0;
    for a in 0..DIM {
        let u = Tensor::from_fn(4, |i| t[(a, i[0])] * p.get(&[i[1], i[2], i[3]])).antisymmetrize();
        for (off, v) in u.data().iter().enumerate() {
            let lhs = grad_psi.data()[a * u.data().len() + off];
            worst = worst.max((lhs + 4.0 * v).abs());
        }
    }
    worst
}

/// Residuals of `dφ = τ₀ψ + 3τ₁∧φ + *i_φ(τ₃)` and `dψ = 4τ₁∧ψ + *τ₂`.
pub fn exterior_derivative_residuals(geo: &Geometry, alg: &LieAlgebraData) -> (f64, f64) {
    let g2 = &geo.g2;
    let tor = &geo.torsion;
    let t1 = AltForm::from_covector(&tor.tau1);
    let dphi = alg.d_unchecked(g2.phi());
    let dpsi = alg.d_unchecked(g2.psi());
    let mut rhs_phi = g2.psi().scale(tor.tau0);
    rhs_phi.axpy(3.0, &t1.wedge(g2.phi()).expect("1 + 3"));
    rhs_phi += &g2.star(&i_phi(&tor.tau3, g2));
    let mut rhs_psi = t1.wedge(g2.psi()).expect("1 + 4").scale(4.0);
    rhs_psi += &g2.star(&AltForm::from_skew_matrix(&tor.tau2));
    ((&dphi - &rhs_phi).max_abs(), (&dpsi - &rhs_psi).max_abs())
}

/// The general torsion identity suite, valid for every G₂-structure:
///
/// * defining relations for `∇φ` and `∇ψ`, and the `dφ`/`dψ` decompositions;
/// * integrability: `½Riem_{ij}^{bc}φ^a_{bc} = ∇_iT_j^a − ∇_jT_i^a + T_i^bT_j^cφ^a_{bc}`;
/// * `(∇_aT_{bc})ψ^{abc}_d = −(T⌟φ)^aT_{ad} − ((TT)⌟φ)_d + (Tr T)(T⌟φ)_d`;
/// * `d(Tr T) − div(Tᵗ) − (T⌟φ)⌟Tᵗ = 0` (the first term vanishes on invariant data);
/// * `Ric = −Sym(curl Tᵗ − ∇(T⌟φ) + T² − (Tr T)T)`;
/// * `¼Ric* = curl T + ½Tᵗ∘Tᵗ` and its skew part `Skew(curl T) = ½Skew(T∘T)`;
/// * `R = 2Tr(curl T) − ψ(T,T) − Tr(T²) + (Tr T)²` and `Tr Ric* = 2R`.
pub fn identity_suite(geo: &Geometry, alg: &LieAlgebraData) -> ResidualReport {
    let g = geo.metric();
    let gi = g.inverse();
    let t = geo.t();
    let tt = t.transpose();
    let tr_t = geo.trace_t();
    let t2 = geo.t_squared();
    let curv = &geo.curvature;
    let mut rep = ResidualReport::default();

    rep.push("grad_phi_torsion", grad_phi_residual(geo), IDENTITY_TOL);
    rep.push("grad_psi_torsion", grad_psi_residual(geo), IDENTITY_TOL);
    let (dphi, dpsi) = exterior_derivative_residuals(geo, alg);
    rep.push("d_phi_components", dphi, IDENTITY_TOL);
    rep.push("d_psi_components", dpsi, IDENTITY_TOL);

    // Integrability condition, free index a raised.
    let p = geo.g2.phi().to_dense();
    let pu = p.apply_matrix(gi, 0);
    let ru = curv.riem.apply_matrix(gi, 2).apply_matrix(gi, 3);
    let grad_tm = geo.grad_t.apply_matrix(gi, 2);
    let tm = t * gi;
    let mut integ: f64 = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            for a in 0..DIM {
                let mut lhs = 0.0;
                let mut quad = 0.0;
                for b in 0..DIM {
                    for c in 0..DIM {
                        let pabc = pu.get(&[a, b, c]);
                        lhs += ru.get(&[i, j, b, c]) * pabc;
                        quad += tm[(i, b)] * tm[(j, c)] * pabc;
                    }
                }
                let rhs = grad_tm.get(&[i, j, a]) - grad_tm.get(&[j, i, a]) + quad;
                integ = integ.max((0.5 * lhs - rhs).abs());
            }
        }
    }
    rep.push("integrability", integ, IDENTITY_TOL);

    // Gradient of torsion against ψ.
    let psi3 = geo.g2.psi().to_dense().apply_matrix(gi, 0).apply_matrix(gi, 1).apply_matrix(gi, 2);
    let tphi = t_hook_phi(t, &geo.g2);
    let tphi_up = g.sharp(&tphi);
    let t2phi = t_hook_phi(&t2, &geo.g2);
    let mut gt_psi: f64 = 0.0;
    for d in 0..DIM {
        let mut lhs = 0.0;
        for a in 0..DIM {
            for b in 0..DIM {
                for c in 0..DIM {
                    lhs += geo.grad_t.get(&[a, b, c]) * psi3.get(&[a, b, c, d]);
                }
            }
        }
        let tphi_t: f64 = (0..DIM).map(|a| tphi_up[a] * t[(a, d)]).sum();
        let rhs = -tphi_t - t2phi[d] + tr_t * tphi[d];
        gt_psi = gt_psi.max((lhs - rhs).abs());
    }
    rep.push("grad_torsion_psi", gt_psi, IDENTITY_TOL);

    // Divergence of the transpose.
    let div_tt = div_tensor(&tt, &geo.conn, g);
    let hook = tt.transpose() * tphi_up; // (T⌟φ)^a T_{da}
    rep.push("div_torsion_transpose", (-div_tt - hook).abs().max(), IDENTITY_TOL);

    // Ricci.
    let curl_tt = curl_tensor(&tt, &geo.conn, g, geo.g2.phi());
    let grad_tphi = covariant_derivative(&Tensor::from_vector(&tphi), &[Variance::Lower], &geo.conn).to_matrix();
    let ric_rhs = -sym(&(curl_tt - grad_tphi + t2 - t * tr_t));
    rep.push("ricci_torsion", max_abs_matrix(&(curv.ric - ric_rhs)), IDENTITY_TOL);

    // Ric* and its skew part.
    let curl_t = geo.curl_t();
    let circ_tt_t = geo.circ(&tt, &tt);
    rep.push(
        "ric_star_torsion",
        max_abs_matrix(&(curv.ric_star * 0.25 - curl_t - circ_tt_t * 0.5)),
        IDENTITY_TOL,
    );
    let circ_t = geo.circ(t, t);
    rep.push(
        "skew_curl_torsion",
        max_abs_matrix(&(skew(&curl_t) - skew(&circ_t) * 0.5)),
        IDENTITY_TOL,
    );

    // Scalar curvature.
    let scal_rhs = 2.0 * g.trace(&curl_t) - psi_pair(t, t, &geo.g2) - g.trace(&t2) + tr_t * tr_t;
    rep.push("scalar_torsion", (curv.scal - scal_rhs).abs(), IDENTITY_TOL);
    rep.push("ric_star_trace", (g.trace(&curv.ric_star) - 2.0 * curv.scal).abs(), IDENTITY_TOL);
    rep
}

/// Extra check for closed structures: `|T|² = −R`.
pub fn closed_scalar_residual(geo: &Geometry) -> f64 {
    (geo.norm_t_sq() + geo.curvature.scal).abs()
}

/// Tolerance on `|dψ|` for treating a structure as co-closed.
pub const COCLOSED_TOL: f64 = 1e-10;

/// Identities for co-closed structures (`T` symmetric):
///
/// * `div T = d(Tr T)`, which vanishes on invariant data;
/// * `curl T` symmetric;
/// * `Ric = −curl T − T² + (Tr T)T`;
/// * `¼Ric* = curl T + ½T∘T = −Ric + ½T∘T − T² + (Tr T)T`;
/// * `R = (Tr T)² − |T|²`.
pub fn coclosed_identity_suite(geo: &Geometry, alg: &LieAlgebraData) -> Result<ResidualReport> {
    let dpsi = alg.d_unchecked(geo.g2.psi()).max_abs();
    if dpsi > COCLOSED_TOL {
        return Err(Error::NotCoclosed(dpsi));
    }
    let g = geo.metric();
    let t = geo.t();
    let tr_t = geo.trace_t();
    let t2 = geo.t_squared();
    let curl_t = geo.curl_t();
    let circ = geo.circ(t, t);
    let curv = &geo.curvature;
    let mut rep = ResidualReport::default();
    rep.push("coclosed_div_torsion", geo.div_t().abs().max(), IDENTITY_TOL);
    rep.push("coclosed_curl_symmetric", max_abs_matrix(&skew(&curl_t)), IDENTITY_TOL);
    rep.push(
        "coclosed_ricci",
        max_abs_matrix(&(curv.ric - (-curl_t - t2 + t * tr_t))),
        IDENTITY_TOL,
    );
    rep.push(
        "coclosed_ric_star_curl",
        max_abs_matrix(&(curv.ric_star * 0.25 - curl_t - circ * 0.5)),
        IDENTITY_TOL,
    );
    rep.push(
        "coclosed_ric_star_ricci",
        max_abs_matrix(&(curv.ric_star * 0.25 - (-curv.ric + circ * 0.5 - t2 + t * tr_t))),
        IDENTITY_TOL,
    );
    rep.push(
        "coclosed_scalar",
        (curv.scal - (tr_t * tr_t - g.inner2(t, t))).abs(),
        IDENTITY_TOL,
    );
    Ok(rep)
}
