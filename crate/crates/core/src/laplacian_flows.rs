//! Hodge Laplacians of φ and ψ, the Laplacian-type flows as ODEs on the
//! 35 coefficients of an invariant 3-form, and the diagnostics run along
//! them.
//!
//! The evolved variable is always φ. Flows of ψ, `∂ψ = *(X⌟ψ) + 3*i_φ(s)`,
//! are converted to `∂φ = X⌟ψ + 3i_φ(h)` with `h = ¼(Tr s)g − s`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior_algebra::{AltForm, Matrix7, Tensor, Vector7, DIM, FORM_DIMS};
use crate::g2_structure::{i_phi, i_psi, split_3form, G2Structure};
use crate::lie_geometry::{
    covariant_derivative, curl_tensor, curl_vector, hodge_codifferential, levi_civita, LieAlgebraData, Variance,
};
use crate::torsion::{full_torsion, psi_pair, t_hook_phi, t_hook_psi, vector_hook_phi, Geometry, ResidualReport};

/// `Δw = dd*w + d*dw` on invariant forms.
pub fn laplacian_direct(w: &AltForm, g2: &G2Structure, alg: &LieAlgebraData) -> AltForm {
    let (g, o) = (g2.metric(), g2.orientation());
    let mut out = AltForm::zero(w.degree());
    if w.degree() > 0 {
        out += &alg.d_unchecked(&hodge_codifferential(w, g, o, alg));
    }
    if w.degree() < DIM {
        out += &hodge_codifferential(&alg.d_unchecked(w), g, o, alg);
    }
    out
}

/// `X⌟ψ + 3i_φ(h)` for an upper-index `X` and symmetric `h`.
pub fn assemble_3form(x: &Vector7, h: &Matrix7, g2: &G2Structure) -> AltForm {
    let mut s = g2.psi().interior(x).expect("degree 4");
    s.axpy(3.0, &i_phi(h, g2));
    s
}

/// `X = −div T` (upper index) and the symmetric part `h` of `Δφ`:
///
/// ```text
/// h = −¼Ric* + ⅙(R + 2|T|²)g − TᵗT − ½(T⌟φ)⊗(T⌟φ) + ¼T∘T + ¼Tᵗ∘Tᵗ − ½T∘Tᵗ
///     + Sym(T(T⌟ψ) − Tᵗ(T⌟ψ)) + ½ψ(T,T)g
/// ```
///
/// The last term is absent from the commonly quoted formula; without it the
/// decomposition fails whenever `ψ(T,T) ≠ 0`, e.g. on every closed
/// non-torsion-free structure.
pub fn laplacian_phi_decomposed(geo: &Geometry) -> (Vector7, Matrix7) {
    let g = geo.metric();
    let x = -g.sharp(&geo.div_t());
    (x, laplacian_h_without_psi_term(geo) + g.matrix() * (0.5 * psi_pair(geo.t(), geo.t(), &geo.g2)))
}

/// The `h` of the quoted formula, without the `½ψ(T,T)g` term.
pub fn laplacian_h_without_psi_term(geo: &Geometry) -> Matrix7 {
    let g = geo.metric();
    let t = geo.t();
    let tt = t.transpose();
    let curv = &geo.curvature;
    let tphi = t_hook_phi(t, &geo.g2);
    let tpsi = t_hook_psi(t, &geo.g2);
    let sym_part = g.product(t, &tpsi) - g.product(&tt, &tpsi);
    -curv.ric_star * 0.25 + g.matrix() * ((curv.scal + 2.0 * geo.norm_t_sq()) / 6.0)
        - g.product(&tt, t)
        - tphi * tphi.transpose() * 0.5
        + geo.circ(t, t) * 0.25
        + geo.circ(&tt, &tt) * 0.25
        - geo.circ(t, &tt) * 0.5
        + 0.5 * (sym_part + sym_part.transpose())
}

/// The two expressions for `s` in `Δφ = X⌟ψ + 3i_φ(s)` on a co-closed
/// structure, `(curl form, Ricci form)`:
///
/// ```text
/// s = −curl T + ⅙((Tr T)² + |T|²)g − T² − ½T∘T
///   = Ric − (Tr T)T − ½T∘T + ⅙(R + 2|T|²)g
/// ```
pub fn coclosed_s_forms(geo: &Geometry) -> (Matrix7, Matrix7) {
    let g = geo.metric();
    let t = geo.t();
    let tr = geo.trace_t();
    let n2 = geo.norm_t_sq();
    let circ = geo.circ(t, t);
    let curv = &geo.curvature;
    let s_curl = -geo.curl_t() + g.matrix() * ((tr * tr + n2) / 6.0) - geo.t_squared() - circ * 0.5;
    let s_ric = curv.ric - t * tr - circ * 0.5 + g.matrix() * ((curv.scal + 2.0 * n2) / 6.0);
    (s_curl, s_ric)
}

/// `(X, s)` for a co-closed structure, with `s` in its curl form.
pub fn laplacian_psi_coclosed(geo: &Geometry, alg: &LieAlgebraData) -> Result<(Vector7, Matrix7)> {
    let dpsi = alg.d_unchecked(geo.g2.psi()).max_abs();
    if dpsi > crate::torsion::COCLOSED_TOL {
        return Err(Error::NotCoclosed(dpsi));
    }
    let x = -geo.metric().sharp(&geo.div_t());
    Ok((x, coclosed_s_forms(geo).0))
}

/// Which flow to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    /// `∂φ = Δφ`.
    LaplacianFlow,
    /// `∂ψ = Δψ`.
    CoflowPlus,
    /// `∂ψ = −Δψ`.
    CoflowMinus,
    /// `∂ψ = Δψ + 2d((A − Tr T)φ)`.
    ModifiedCoflow,
    /// `∂φ = d*dφ`.
    DstarDExperiment,
}

impl FlowKind {
    pub fn is_psi_flow(self) -> bool {
        matches!(self, FlowKind::CoflowPlus | FlowKind::CoflowMinus | FlowKind::ModifiedCoflow)
    }

    pub fn all() -> [FlowKind; 5] {
        [
            FlowKind::LaplacianFlow,
            FlowKind::CoflowPlus,
            FlowKind::CoflowMinus,
            FlowKind::ModifiedCoflow,
            FlowKind::DstarDExperiment,
        ]
    }
}

pub const DEFAULT_A: f64 = 7.0;
pub const DEFAULT_HALTING_THRESHOLD: f64 = 1e6;

/// Parameters of one integration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSpec {
    pub kind: FlowKind,
    /// Constant of the modified coflow.
    #[serde(default = "default_a")]
    pub a: f64,
    pub dt: f64,
    pub t_max: f64,
    #[serde(default = "default_threshold")]
    pub halting_threshold: f64,
    #[serde(default = "default_stride")]
    pub monitor_stride: usize,
}

fn default_a() -> f64 {
    DEFAULT_A
}

fn default_threshold() -> f64 {
    DEFAULT_HALTING_THRESHOLD
}

fn default_stride() -> usize {
    1
}

impl FlowSpec {
    pub fn new(kind: FlowKind, dt: f64, t_max: f64) -> Self {
        Self {
            kind,
            a: DEFAULT_A,
            dt,
            t_max,
            halting_threshold: DEFAULT_HALTING_THRESHOLD,
            monitor_stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidSpec(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::InvalidSpec(format!("t_max must be positive, got {}", self.t_max)));
        }
        if !(self.halting_threshold > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "halting_threshold must be positive, got {}",
                self.halting_threshold
            )));
        }
        if self.monitor_stride == 0 {
            return Err(Error::InvalidSpec("monitor_stride must be at least 1".into()));
        }
        if !self.a.is_finite() {
            return Err(Error::InvalidSpec("A must be finite".into()));
        }
        Ok(())
    }

    /// Number of fixed steps to reach `t_max` (the last one is shortened if
    /// `t_max` is not a multiple of `dt`).
    pub fn step_count(&self) -> usize {
        let n = self.t_max / self.dt;
        let r = n.round();
        if (n - r).abs() < 1e-9 * n.max(1.0) {
            r as usize
        } else {
            n.ceil() as usize
        }
    }
}

/// Velocity of φ together with its type decomposition
/// `∂φ = X⌟ψ + 3i_φ(h)` and, for ψ-flows, the ψ-side 4-form.
#[derive(Debug, Clone)]
pub struct FlowVelocity {
    pub dphi: AltForm,
    pub x: Vector7,
    pub h: Matrix7,
    /// The form whose closedness is monitored: the ψ-side right-hand side
    /// for ψ-flows, the 3-form itself otherwise.
    pub generator: AltForm,
}

/// Right-hand side of a flow at a given structure.
pub fn flow_rhs(g2: &G2Structure, alg: &LieAlgebraData, spec: &FlowSpec) -> FlowVelocity {
    match spec.kind {
        FlowKind::LaplacianFlow | FlowKind::DstarDExperiment => {
            let rhs = if spec.kind == FlowKind::LaplacianFlow {
                laplacian_direct(g2.phi(), g2, alg)
            } else {
                hodge_codifferential(&alg.d_unchecked(g2.phi()), g2.metric(), g2.orientation(), alg)
            };
            let (x, h) = split_3form(&rhs, g2);
            FlowVelocity {
                dphi: rhs.clone(),
                x,
                h,
                generator: rhs,
            }
        }
        FlowKind::CoflowPlus | FlowKind::CoflowMinus | FlowKind::ModifiedCoflow => {
            let mut rhs4 = laplacian_direct(g2.psi(), g2, alg);
            if spec.kind == FlowKind::CoflowMinus {
                rhs4 = rhs4.scale(-1.0);
            }
            if spec.kind == FlowKind::ModifiedCoflow {
                // Tr T is constant on invariant data, so d((A − Tr T)φ) = (A − Tr T)dφ.
                let conn = levi_civita(g2.metric(), alg);
                let tr_t = g2.metric().trace(&full_torsion(g2, &conn).t);
                rhs4.axpy(2.0 * (spec.a - tr_t), &alg.d_unchecked(g2.phi()));
            }
            let (x, s) = split_3form(&g2.star(&rhs4), g2);
            let h = g2.metric().matrix() * (0.25 * g2.metric().trace(&s)) - s;
            FlowVelocity {
                dphi: assemble_3form(&x, &h, g2),
                x,
                h,
                generator: rhs4,
            }
        }
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltReason {
    TMax,
    PositivityLost,
    BlowUp,
}

impl HaltReason {
    pub fn as_str(self) -> &'static str {
        match self {
            HaltReason::TMax => "t_max",
            HaltReason::PositivityLost => "positivity_lost",
            HaltReason::BlowUp => "blow_up",
        }
    }
}

/// Flags from the Ricci-like condition monitor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RicciLikeFlags {
    /// `|h + Ric| / (1 + |T|)²`.
    pub metric_ratio: f64,
    pub metric_leading_order: CheckStatus,
    /// `|X + div T| / (1 + |T|)²`.
    pub vector_ratio: f64,
    pub vector_field_shape: CheckStatus,
    /// Coefficient of `∇(div T)` in `∂T/∂t − ΔT`, when measurable.
    pub grad_div_coefficient: Option<f64>,
    pub torsion_heat_type: CheckStatus,
}

/// Fitted constant for the quadratic-in-torsion bounds.
pub const RICCI_LIKE_CONSTANT: f64 = 10.0;

/// One sampled row of a flow trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorRecord {
    pub t: f64,
    pub volume: f64,
    pub trace_t: f64,
    pub norm_t_sq: f64,
    pub scalar: f64,
    pub norm_riem: f64,
    pub norm_grad_t: f64,
    pub theta: f64,
    pub dpsi_residual: f64,
    pub coclass_drift: f64,
    /// `|d(generator)|` of the right-hand side at this state.
    pub rhs_closedness: f64,
}

/// Result of an integration: sampled monitors, the sampled states and the
/// halting reason.
#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub spec: FlowSpec,
    pub records: Vec<MonitorRecord>,
    /// `(t, φ(t))` at every sampled step.
    pub states: Vec<(f64, AltForm)>,
    pub halt_reason: HaltReason,
    pub final_t: f64,
    pub steps: usize,
    pub final_phi: AltForm,
}

/// `V = (1/7) ∫ φ∧*φ`, i.e. the volume density on invariant data.
pub fn hitchin_volume(g2: &G2Structure) -> f64 {
    let top = g2.phi().wedge(g2.psi()).expect("3 + 4").top_coefficient();
    g2.orientation().sign() * top / DIM as f64
}

/// `Θ = (|Riem|² + |T|⁴ + |∇T|²)^{1/2}`.
pub fn blow_up_quantity(geo: &Geometry) -> f64 {
    let riem2 = geo.curvature.riem_norm_sq(geo.metric()).max(0.0);
    let t2 = geo.norm_t_sq().max(0.0);
    let gt2 = geo.grad_t_norm_sq().max(0.0);
    (riem2 + t2 * t2 + gt2).sqrt()
}

/// Metric norm of a form.
fn form_norm(w: &AltForm, g2: &G2Structure) -> f64 {
    g2.inner(w, w).max(0.0).sqrt()
}

/// Orthogonal projector (frame inner product) onto `image(d: Λ³ → Λ⁴)`.
pub struct ExactFormProjector {
    basis: DMatrix<f64>,
}

impl ExactFormProjector {
    pub fn new(alg: &LieAlgebraData) -> Self {
        let (rows, cols) = (FORM_DIMS[4], FORM_DIMS[3]);
        let d = DMatrix::from_row_slice(rows, cols, alg.differential_matrix(3));
        let svd = d.svd(true, false);
        let u = svd.u.expect("requested U");
        let smax = svd.singular_values.max();
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] > 1e-10 * smax.max(1.0))
            .collect();
        let mut basis = DMatrix::zeros(rows, keep.len());
        for (c, &i) in keep.iter().enumerate() {
            basis.set_column(c, &u.column(i));
        }
        Self { basis }
    }

    /// Dimension of the space of exact invariant 4-forms.
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// Frame norm of the component of `w` orthogonal to the exact forms.
    pub fn orthogonal_norm(&self, w: &AltForm) -> f64 {
        let v = DVector::from_column_slice(w.coeffs());
        let proj = &self.basis * (self.basis.transpose() * &v);
        (v - proj).norm()
    }
}

fn monitor(
    t: f64,
    geo: &Geometry,
    alg: &LieAlgebraData,
    spec: &FlowSpec,
    psi0: &AltForm,
    exact: &ExactFormProjector,
) -> MonitorRecord {
    let vel = flow_rhs(&geo.g2, alg, spec);
    let g2 = &geo.g2;
    let n2 = geo.norm_t_sq();
    MonitorRecord {
        t,
        volume: hitchin_volume(g2),
        trace_t: geo.trace_t(),
        norm_t_sq: n2,
        scalar: geo.curvature.scal,
        norm_riem: geo.curvature.riem_norm_sq(geo.metric()).max(0.0).sqrt(),
        norm_grad_t: geo.grad_t_norm_sq().max(0.0).sqrt(),
        theta: blow_up_quantity(geo),
        dpsi_residual: form_norm(&alg.d_unchecked(g2.psi()), g2),
        coclass_drift: exact.orthogonal_norm(&(g2.psi() - psi0)),
        rhs_closedness: form_norm(&alg.d_unchecked(&vel.generator), g2),
    }
}

fn rk4_step(phi: &AltForm, dt: f64, alg: &LieAlgebraData, spec: &FlowSpec) -> Result<AltForm> {
    let eval = |p: &AltForm| -> Result<AltForm> { Ok(flow_rhs(&G2Structure::new(p.clone())?, alg, spec).dphi) };
    let k1 = eval(phi)?;
    let mut p2 = phi.clone();
    p2.axpy(0.5 * dt, &k1);
    let k2 = eval(&p2)?;
    let mut p3 = phi.clone();
    p3.axpy(0.5 * dt, &k2);
    let k3 = eval(&p3)?;
    let mut p4 = phi.clone();
    p4.axpy(dt, &k3);
    let k4 = eval(&p4)?;
    let mut out = phi.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    Ok(out)
}

/// Classical fixed-step RK4 on the coefficients of φ, with geometry
/// recomputed from scratch at every stage. Θ is evaluated after every step;
/// monitors and states are sampled every `monitor_stride` steps and at the
/// final state.
pub fn integrate(initial: &AltForm, alg: &LieAlgebraData, spec: &FlowSpec) -> Result<FlowTrace> {
    spec.validate()?;
    let exact = ExactFormProjector::new(alg);
    let geo0 = Geometry::new(initial.clone(), alg)?;
    let psi0 = geo0.g2.psi().clone();
    let n = spec.step_count();
    let mut records = vec![monitor(0.0, &geo0, alg, spec, &psi0, &exact)];
    let mut states = vec![(0.0, initial.clone())];
    let mut phi = initial.clone();
    let mut t = 0.0;
    let mut halt = HaltReason::TMax;
    let mut steps = 0;
    if records[0].theta > spec.halting_threshold {
        halt = HaltReason::BlowUp;
    } else {
        for step in 1..=n {
            let h = if step == n { spec.t_max - t } else { spec.dt };
            let next = match rk4_step(&phi, h, alg, spec) {
                Ok(p) => p,
                Err(_) => {
                    halt = HaltReason::PositivityLost;
                    break;
                }
            };
            let geo = match Geometry::new(next.clone(), alg) {
                Ok(g) => g,
                Err(_) => {
                    halt = HaltReason::PositivityLost;
                    break;
                }
            };
            phi = next;
            t = if step == n { spec.t_max } else { step as f64 * spec.dt };
            steps = step;
            let theta = blow_up_quantity(&geo);
            let blow_up = !theta.is_finite() || theta > spec.halting_threshold;
            if step % spec.monitor_stride == 0 || step == n || blow_up {
                records.push(monitor(t, &geo, alg, spec, &psi0, &exact));
                states.push((t, phi.clone()));
            }
            if blow_up {
                halt = HaltReason::BlowUp;
                break;
            }
        }
    }
    Ok(FlowTrace {
        spec: spec.clone(),
        records,
        states,
        halt_reason: halt,
        final_t: t,
        steps,
        final_phi: phi,
    })
}

/// Observed order of accuracy from three runs at `dt`, `dt/2`, `dt/4`:
/// `log₂(|φ_dt − φ_{dt/2}| / |φ_{dt/2} − φ_{dt/4}|)`.
pub fn observed_order(initial: &AltForm, alg: &LieAlgebraData, spec: &FlowSpec) -> Result<f64> {
    let finals: Vec<AltForm> = [1.0, 0.5, 0.25]
        .iter()
        .map(|f| {
            let mut s = spec.clone();
            s.dt *= f;
            s.monitor_stride = usize::MAX;
            integrate(initial, alg, &s).map(|tr| tr.final_phi)
        })
        .collect::<Result<_>>()?;
    let e1 = (&finals[0] - &finals[1]).coeff_norm();
    let e2 = (&finals[1] - &finals[2]).coeff_norm();
    Ok((e1 / e2).log2())
}

/// Time derivative of `T` predicted by a velocity `(X, h)`:
/// `∂T = ∇X♭ − curl h + T g⁻¹ h − T g⁻¹ (X⌟φ)`.
pub fn torsion_velocity(geo: &Geometry, x: &Vector7, h: &Matrix7) -> Matrix7 {
    let g = geo.metric();
    let grad_x = covariant_derivative(&Tensor::from_vector(&g.flat(x)), &[Variance::Lower], &geo.conn).to_matrix();
    let curl_h = curl_tensor(h, &geo.conn, g, geo.g2.phi());
    grad_x - curl_h + g.product(geo.t(), h) - g.product(geo.t(), &vector_hook_phi(x, &geo.g2))
}

/// Central-difference check of the evolution of `g`, `vol`, `ψ` and `T`
/// along consecutive sampled states with uniform spacing. The derivative at
/// each interior sample uses the five-point stencil
/// `(−f₊₂ + 8f₊₁ − 8f₋₁ + f₋₂)/(12Δt)`, so the truncation error is `O(Δt⁴)`
/// and the residual is dominated by rounding. Residuals are maxima of
/// absolute component errors.
pub fn evolution_crosscheck(trace: &FlowTrace, alg: &LieAlgebraData) -> Result<ResidualReport> {
    const WEIGHTS: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
    let mut worst = [0.0f64; 4];
    let mut windows = 0;
    for w in trace.states.windows(5) {
        let dt = w[1].0 - w[0].0;
        if dt <= 0.0 || w.windows(2).any(|p| ((p[1].0 - p[0].0) - dt).abs() > 1e-9 * dt) {
            continue;
        }
        windows += 1;
        let geos: Vec<Geometry> = w.iter().map(|(_, p)| Geometry::new(p.clone(), alg)).collect::<Result<_>>()?;
        let gm = &geos[2];
        let vel = flow_rhs(&gm.g2, alg, &trace.spec);
        let (x, h) = (vel.x, vel.h);
        let inv = 1.0 / (12.0 * dt);

        let mut dg = Matrix7::zeros();
        let mut dvol = 0.0;
        let mut dpsi = AltForm::zero(4);
        let mut dtor = Matrix7::zeros();
        for (c, geo) in WEIGHTS.iter().zip(&geos) {
            dg += geo.metric().matrix() * (c * inv);
            dvol += c * inv * geo.metric().volume_density();
            dpsi.axpy(c * inv, geo.g2.psi());
            dtor += geo.t() * (c * inv);
        }

        worst[0] = worst[0].max((dg - h * 2.0).abs().max());

        let vol_rhs = gm.metric().trace(&h) * gm.metric().volume_density();
        worst[1] = worst[1].max((dvol - vol_rhs).abs());

        let mut psi_rhs = i_psi(&h, &gm.g2).scale(4.0);
        psi_rhs -= &AltForm::from_covector(&gm.metric().flat(&x)).wedge(gm.g2.phi()).expect("1 + 3");
        worst[2] = worst[2].max((&dpsi - &psi_rhs).max_abs());

        worst[3] = worst[3].max((dtor - torsion_velocity(gm, &x, &h)).abs().max());
    }
    if windows == 0 {
        return Err(Error::InvalidSpec(
            "evolution cross-check needs at least five uniformly spaced samples".into(),
        ));
    }
    let mut rep = ResidualReport::default();
    rep.push("metric_evolution", worst[0], EVOLUTION_TOL);
    rep.push("volume_evolution", worst[1], EVOLUTION_TOL);
    rep.push("psi_evolution", worst[2], EVOLUTION_TOL);
    rep.push("torsion_evolution", worst[3], EVOLUTION_TOL);
    Ok(rep)
}

/// Tolerance for the finite-difference evolution checks at `dt = 1e-4`.
pub const EVOLUTION_TOL: f64 = 1e-6;

/// Rough Laplacian `g^{ab}∇_a∇_b T` of the torsion.
pub fn rough_laplacian_t(geo: &Geometry) -> Matrix7 {
    let gi = geo.metric().inverse();
    let hess = covariant_derivative(&geo.grad_t, &[Variance::Lower; 3], &geo.conn);
    Matrix7::from_fn(|c, d| {
        let mut s = 0.0;
        for a in 0..DIM {
            for b in 0..DIM {
                s += gi[(a, b)] * hess.get(&[a, b, c, d]);
            }
        }
        s
    })
}

/// Runtime check of the Ricci-like conditions at a state:
///
/// 1. `|h + Ric| ≤ C(1 + |T|)²` (metric evolves by Ricci flow to leading order);
/// 2. `|X + div T| ≤ C(1 + |T|)²` (vector field has the admissible shape);
/// 3. `∂T/∂t − ΔT` carries no `∇(div T)` component. On invariant data
///    `div T` usually vanishes identically, and the check is then skipped.
///
/// `∂T/∂t` is evaluated from the velocity through the torsion evolution
/// equation.
pub fn ricci_like_monitor(geo: &Geometry, alg: &LieAlgebraData, spec: &FlowSpec) -> RicciLikeFlags {
    let vel = flow_rhs(&geo.g2, alg, spec);
    let g = geo.metric();
    let scale = (1.0 + geo.norm_t_sq().max(0.0).sqrt()).powi(2);
    let metric_ratio = crate::torsion::norm2(&(vel.h + geo.curvature.ric), g) / scale;
    let div_t = geo.div_t();
    let xv = g.flat(&vel.x) + div_t;
    let vector_ratio = g.sharp(&xv).dot(&xv).max(0.0).sqrt() / scale;
    let status = |ok: bool| if ok { CheckStatus::Pass } else { CheckStatus::Fail };
    let (grad_div_coefficient, torsion_heat_type) = if div_t.abs().max() < 1e-10 {
        (None, CheckStatus::Skipped)
    } else {
        let residual = torsion_velocity(geo, &vel.x, &vel.h) - rough_laplacian_t(geo);
        let gdiv = covariant_derivative(&Tensor::from_vector(&div_t), &[Variance::Lower], &geo.conn).to_matrix();
        let denom = g.inner2(&gdiv, &gdiv);
        if denom < 1e-20 {
            (None, CheckStatus::Skipped)
        } else {
            let k = g.inner2(&residual, &gdiv) / denom;
            (Some(k), status(k.abs() < 0.5))
        }
    };
    RicciLikeFlags {
        metric_ratio,
        metric_leading_order: status(metric_ratio <= RICCI_LIKE_CONSTANT * (1.0 + spec.a.abs())),
        vector_ratio,
        vector_field_shape: status(vector_ratio <= RICCI_LIKE_CONSTANT * (1.0 + spec.a.abs())),
        grad_div_coefficient,
        torsion_heat_type,
    }
}

/// `V(χ) = ¾∇Tr h − 2 curl X` for `χ = ψ_b − ψ_a` written at state `a` as
/// `χ = *(X⌟ψ + 3i_φ(h))`. On invariant data `Tr h` is constant, so the
/// gradient term vanishes. Returns an upper-index vector.
pub fn deturck_vector(a: &Geometry, b: &G2Structure) -> Vector7 {
    let chi = b.psi() - a.g2.psi();
    let (x, _h) = split_3form(&a.g2.star(&chi), &a.g2);
    -2.0 * curl_vector(&x, &a.conn, a.metric(), a.g2.phi())
}
