//! Named left-invariant test structures.
//!
//! * `flat7`: the abelian algebra ℝ⁷ with `φ₀`. Torsion-free.
//! * `heisenberg7`: `[e₁,e₂] = [e₃,e₄] = [e₅,e₆] = −e₀`, so
//!   `de⁰ = e¹² + e³⁴ + e⁵⁶ =: ω`, with `φ₀`. Writing
//!   `ψ₀ = ½ω∧ω + e⁰∧ρ` with `ρ = e²⁴⁶ − e¹³⁶ − e¹⁴⁵ − e²³⁵`, every `eⁱ`
//!   with `i ≥ 1` is closed, so `dψ₀ = ω∧ρ`, which vanishes because `ρ` is
//!   primitive of type (3,0)+(0,3). Hence `φ₀` is co-closed. The general
//!   weights `(a, b, c)` give the same conclusion, and the nilpotent
//!   Heisenberg algebra is unimodular.
//! * `almost_abelian_a`: `ℝ ⋉_M ℝ⁶` with `[e₀, eᵢ] = Σⱼ M_{ji} eⱼ` and
//!   `M = diag(1, 1, −1, −1, 0, 0)`. `Tr M = 0` makes it unimodular; `φ₀` is
//!   closed but not co-closed, with skew torsion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior_algebra::{AltForm, Tensor, FORM_DIMS};
use crate::g2_structure::standard_phi;
use crate::lie_geometry::LieAlgebraData;

/// An algebra together with an initial 3-form.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: String,
    pub algebra: LieAlgebraData,
    pub phi: AltForm,
}

pub const PRESET_NAMES: [&str; 3] = ["flat7", "heisenberg7", "almost_abelian_a"];

pub fn flat7() -> Preset {
    Preset {
        name: "flat7".into(),
        algebra: LieAlgebraData::abelian("flat7"),
        phi: standard_phi(),
    }
}

/// Heisenberg algebra with `de⁰ = a e¹² + b e³⁴ + c e⁵⁶`.
pub fn heisenberg_algebra(a: f64, b: f64, c: f64) -> LieAlgebraData {
    LieAlgebraData::from_brackets("heisenberg7", &[(1, 2, 0, -a), (3, 4, 0, -b), (5, 6, 0, -c)])
        .expect("Heisenberg brackets satisfy Jacobi")
}

pub fn heisenberg7() -> Preset {
    Preset {
        name: "heisenberg7".into(),
        algebra: heisenberg_algebra(1.0, 1.0, 1.0),
        phi: standard_phi(),
    }
}

/// Almost-abelian algebra `ℝ ⋉_M ℝ⁶` (`m` is row-major, indices 1…6).
pub fn almost_abelian_algebra(name: &str, m: [[f64; 6]; 6]) -> Result<LieAlgebraData> {
    let mut c = Tensor::zeros(3);
    for (j, row) in m.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            c.set(&[j + 1, 0, i + 1], v);
            c.set(&[j + 1, i + 1, 0], -v);
        }
    }
    LieAlgebraData::new(name, c)
}

pub fn almost_abelian_a() -> Preset {
    let mut m = [[0.0; 6]; 6];
    m[0][0] = 1.0;
    m[1][1] = 1.0;
    m[2][2] = -1.0;
    m[3][3] = -1.0;
    Preset {
        name: "almost_abelian_a".into(),
        algebra: almost_abelian_algebra("almost_abelian_a", m).expect("valid almost-abelian algebra"),
        phi: standard_phi(),
    }
}

pub fn by_name(name: &str) -> Result<Preset> {
    match name {
        "flat7" => Ok(flat7()),
        "heisenberg7" => Ok(heisenberg7()),
        "almost_abelian_a" => Ok(almost_abelian_a()),
        other => Err(Error::InvalidSpec(format!(
            "unknown preset '{other}' (known: {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}

/// A preset given inline: bracket quadruples `(i, j, k, c^k_{ij})` and the
/// 35 packed coefficients of φ (defaulting to `φ₀`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InlinePreset {
    #[serde(default = "inline_name")]
    pub name: String,
    #[serde(default)]
    pub brackets: Vec<(usize, usize, usize, f64)>,
    #[serde(default)]
    pub phi: Option<Vec<f64>>,
}

fn inline_name() -> String {
    "inline".into()
}

impl InlinePreset {
    pub fn build(&self) -> Result<Preset> {
        let algebra = LieAlgebraData::from_brackets(self.name.clone(), &self.brackets)?;
        let phi = match &self.phi {
            Some(c) => AltForm::from_coeffs(3, c.clone())?,
            None => standard_phi(),
        };
        debug_assert_eq!(phi.coeffs().len(), FORM_DIMS[3]);
        Ok(Preset {
            name: self.name.clone(),
            algebra,
            phi,
        })
    }
}
