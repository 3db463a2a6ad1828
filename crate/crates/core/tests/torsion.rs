mod common;

use common::*;
use g2flow_core::presets::{self, almost_abelian_algebra, heisenberg_algebra};
use g2flow_core::torsion::{
    closed_scalar_residual, norm2, psi_pair, torsion_class, torsion_components, torsion_from_components,
};
use g2flow_core::{
    coclosed_identity_suite, identity_suite, project_2form, standard_phi, Error, G2Structure, Geometry, Matrix7,
};
use proptest::prelude::*;

#[test]
fn heisenberg_torsion_is_diagonal() {
    let p = presets::heisenberg7();
    let geo = Geometry::new(p.phi, &p.algebra).unwrap();
    let mut expected = Matrix7::identity() * 0.5;
    expected[(0, 0)] = -1.5;
    assert!(max_abs(&(geo.t() - expected)) < 1e-14);
    assert!((geo.trace_t() - 1.5).abs() < 1e-14);
    assert!((geo.norm_t_sq() - 3.75).abs() < 1e-14);
    assert!((geo.curvature.scal + 1.5).abs() < 1e-14);
}

#[test]
fn preset_torsion_classes() {
    let flat = presets::flat7();
    let c = Geometry::new(flat.phi, &flat.algebra).unwrap().torsion.class;
    assert!(c.torsion_free && c.closed && c.coclosed);

    let h = presets::heisenberg7();
    let c = Geometry::new(h.phi, &h.algebra).unwrap().torsion.class;
    assert!(c.coclosed && !c.closed && !c.torsion_free && !c.nearly_parallel);

    let aa = presets::almost_abelian_a();
    let geo = Geometry::new(aa.phi, &aa.algebra).unwrap();
    assert!(geo.torsion.class.closed && !geo.torsion.class.coclosed);
    // Closed: T = ½τ₂ is skew and ψ(τ₂, τ₂) = −2|τ₂|².
    assert!(max_abs(&(geo.t() + geo.t().transpose())) < 1e-14);
    let tau2 = geo.torsion.tau2;
    let n = geo.metric().inner2(&tau2, &tau2);
    assert!((psi_pair(&tau2, &tau2, &geo.g2) + 2.0 * n).abs() < 1e-12);
}

#[test]
fn coclosed_suite_rejects_non_coclosed() {
    let aa = presets::almost_abelian_a();
    let geo = Geometry::new(aa.phi, &aa.algebra).unwrap();
    assert!(matches!(coclosed_identity_suite(&geo, &aa.algebra), Err(Error::NotCoclosed(_))));
}

#[test]
fn identity_suite_on_presets() {
    for p in [presets::flat7(), presets::heisenberg7(), presets::almost_abelian_a()] {
        let geo = Geometry::new(p.phi.clone(), &p.algebra).unwrap();
        let rep = identity_suite(&geo, &p.algebra);
        assert!(rep.all_passed(), "{}: {:?}", p.name, rep.failures().collect::<Vec<_>>());
        assert_eq!(rep.entries.len(), 12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn identity_suite_on_generic_structures(alg in arb_algebra(), phi in arb_positive_phi()) {
        let geo = Geometry::new(phi, &alg).unwrap();
        let rep = identity_suite(&geo, &alg);
        for r in &rep.entries {
            prop_assert!(r.residual < 1e-10, "{} = {:e}", r.name, r.residual);
        }
        // Tr Ric* = 2R, and Ric* is the contraction of Riem with φφ.
        prop_assert!((geo.metric().trace(&geo.curvature.ric_star) - 2.0 * geo.curvature.scal).abs() < 1e-10);
    }

    #[test]
    fn torsion_components_round_trip(phi in arb_positive_phi(), t in arb_matrix(1.0)) {
        let g2 = G2Structure::new(phi).unwrap();
        let (t0, t1, t2, t3) = torsion_components(&t, &g2);
        let back = torsion_from_components(t0, &t1, &t2, &t3, &g2);
        prop_assert!(max_abs(&(back - t)) < 1e-10);
        // τ₂ is skew and of type Λ²₁₄; τ₃ is symmetric traceless.
        prop_assert!(max_abs(&(t2 + t2.transpose())) < 1e-12);
        let (x, _) = project_2form(&skew_form(&t2), &g2);
        prop_assert!(x.abs().max() < 1e-10);
        prop_assert!(max_abs(&(t3 - t3.transpose())) < 1e-12);
        prop_assert!(g2.metric().trace(&t3).abs() < 1e-10);
    }

    #[test]
    fn coclosed_suite_on_heisenberg_family(alg in arb_heisenberg()) {
        let geo = Geometry::new(standard_phi(), &alg).unwrap();
        let rep = coclosed_identity_suite(&geo, &alg).unwrap();
        for r in &rep.entries {
            prop_assert!(r.residual < 1e-10, "{} = {:e}", r.name, r.residual);
        }
        prop_assert!(geo.torsion.class.coclosed);
    }

    #[test]
    fn closed_structures_have_nonpositive_scalar(p in -1.5..1.5f64, q in -1.5..1.5f64) {
        // M = diag(p, p, q, q, −p−q, −p−q) keeps φ₀ closed.
        let r = -p - q;
        let mut m = [[0.0; 6]; 6];
        for (i, v) in [p, p, q, q, r, r].into_iter().enumerate() {
            m[i][i] = v;
        }
        let alg = almost_abelian_algebra("closed_family", m).unwrap();
        let geo = Geometry::new(standard_phi(), &alg).unwrap();
        prop_assert!(alg.d_unchecked(geo.g2.phi()).max_abs() < 1e-14);
        prop_assert!(geo.torsion.class.closed);
        prop_assert!(closed_scalar_residual(&geo) < 1e-10);
        prop_assert!(geo.curvature.scal <= 1e-12);
        prop_assert!((norm2(geo.t(), geo.metric()).powi(2) - geo.norm_t_sq()).abs() < 1e-10);
    }

    #[test]
    fn torsion_scales_inversely_with_phi(alg in arb_algebra(), phi in arb_positive_phi(), c in 0.5..2.0f64) {
        // φ ↦ c³φ gives g ↦ c²g and T ↦ cT (lowered), so |T|² ↦ |T|²/c².
        let a = Geometry::new(phi.clone(), &alg).unwrap();
        let b = Geometry::new(phi.scale(c.powi(3)), &alg).unwrap();
        prop_assert!(max_abs(&(b.t() - a.t() * c)) < 1e-10);
        prop_assert!((b.norm_t_sq() * c * c - a.norm_t_sq()).abs() < 1e-10);
        let cls = torsion_class(&b.torsion, &b.g2);
        prop_assert_eq!(cls, a.torsion.class);
    }
}

fn skew_form(m: &Matrix7) -> g2flow_core::AltForm {
    g2flow_core::AltForm::from_skew_matrix(m)
}

#[test]
fn heisenberg_weights_change_the_scalar() {
    let alg = heisenberg_algebra(2.0, 1.0, 1.0);
    let geo = Geometry::new(standard_phi(), &alg).unwrap();
    assert!((geo.curvature.scal + 3.0).abs() < 1e-12);
}
