//! Shared generators for the integration tests.
#![allow(dead_code)]

use g2flow_core::exterior_algebra::FORM_DIMS;
use g2flow_core::lie_geometry::LieAlgebraData;
use g2flow_core::presets::{almost_abelian_algebra, heisenberg_algebra};
use g2flow_core::{standard_phi, AltForm, Matrix7, Metric7, Vector7};
use proptest::prelude::*;

pub fn matrix(entries: &[f64]) -> Matrix7 {
    Matrix7::from_row_slice(entries)
}

/// Random matrix with entries in `[-scale, scale]`.
pub fn arb_matrix(scale: f64) -> impl Strategy<Value = Matrix7> {
    prop::collection::vec(-scale..scale, 49).prop_map(|v| matrix(&v))
}

/// `I + E` with small `E`: invertible with positive determinant.
pub fn arb_frame() -> impl Strategy<Value = Matrix7> {
    arb_matrix(0.08).prop_map(|e| Matrix7::identity() + e)
}

pub fn arb_vector() -> impl Strategy<Value = Vector7> {
    prop::collection::vec(-1.0..1.0f64, 7).prop_map(|v| Vector7::from_row_slice(&v))
}

pub fn arb_form(k: usize) -> impl Strategy<Value = AltForm> {
    prop::collection::vec(-1.0..1.0f64, FORM_DIMS[k]).prop_map(move |v| AltForm::from_coeffs(k, v).unwrap())
}

pub fn arb_symmetric() -> impl Strategy<Value = Matrix7> {
    arb_matrix(1.0).prop_map(|m| 0.5 * (m + m.transpose()))
}

/// A well-conditioned random metric `AᵀA`.
pub fn arb_metric() -> impl Strategy<Value = Metric7> {
    arb_matrix(0.3).prop_map(|e| {
        let a = Matrix7::identity() + e;
        Metric7::new(a.transpose() * a + Matrix7::identity() * 0.1).unwrap()
    })
}

/// `φ(A·, A·, A·)` for a frame change `A`.
pub fn transform_3form(phi: &AltForm, a: &Matrix7) -> AltForm {
    AltForm::from_dense(&phi.to_dense().apply_matrix(a, 0).apply_matrix(a, 1).apply_matrix(a, 2))
}

/// A generic positive 3-form: `φ₀` in a random frame.
pub fn arb_positive_phi() -> impl Strategy<Value = AltForm> {
    arb_frame().prop_map(|a| transform_3form(&standard_phi(), &a))
}

/// A random Heisenberg algebra with weights in `[0.3, 2]`.
pub fn arb_heisenberg() -> impl Strategy<Value = LieAlgebraData> {
    (0.3..2.0f64, 0.3..2.0f64, 0.3..2.0f64).prop_map(|(a, b, c)| heisenberg_algebra(a, b, c))
}

/// A random almost-abelian algebra `ℝ ⋉_M ℝ⁶`; traceless `M` when
/// `unimodular` is set.
pub fn arb_almost_abelian(unimodular: bool) -> impl Strategy<Value = LieAlgebraData> {
    prop::collection::vec(-1.0..1.0f64, 36).prop_map(move |v| {
        let mut m = [[0.0; 6]; 6];
        for (i, row) in m.iter_mut().enumerate() {
            row.copy_from_slice(&v[6 * i..6 * i + 6]);
        }
        if unimodular {
            let tr: f64 = (0..6).map(|i| m[i][i]).sum();
            for (i, row) in m.iter_mut().enumerate() {
                row[i] -= tr / 6.0;
            }
        }
        almost_abelian_algebra("random_almost_abelian", m).unwrap()
    })
}

/// Any of the random algebra families used in the tests.
pub fn arb_algebra() -> impl Strategy<Value = LieAlgebraData> {
    prop_oneof![arb_heisenberg(), arb_almost_abelian(true), arb_almost_abelian(false)]
}

/// Unimodular families only (where `d*` is the adjoint of `d`).
pub fn arb_unimodular_algebra() -> impl Strategy<Value = LieAlgebraData> {
    prop_oneof![arb_heisenberg(), arb_almost_abelian(true)]
}

/// Frame inner product of packed coefficients.
pub fn dot(a: &AltForm, b: &AltForm) -> f64 {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x * y).sum()
}

pub fn max_abs(m: &Matrix7) -> f64 {
    m.abs().max()
}
