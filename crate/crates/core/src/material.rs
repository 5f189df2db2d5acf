//! Isotropic constitutive law for axisymmetric elasticity.
//!
//! Strain vectors are ordered `(ε_r, ε_z, γ_rz, ε_θ)` with engineering shear
//! `γ_rz = ∂u_r/∂z + ∂u_z/∂r`; stresses follow as `(σ_r, σ_z, τ_rz, σ_θ)`.

use nalgebra::{Matrix4, Vector4};

use crate::error::{Result, VemError};

pub type Strain = Vector4<f64>;
pub type Stress = Vector4<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrainComponent {
    Radial,
    Axial,
    Shear,
    Hoop,
}

impl StrainComponent {
    pub const ALL: [StrainComponent; 4] = [Self::Radial, Self::Axial, Self::Shear, Self::Hoop];

    pub const fn index(self) -> usize {
        match self {
            Self::Radial => 0,
            Self::Axial => 1,
            Self::Shear => 2,
            Self::Hoop => 3,
        }
    }

    pub const fn symbol(self) -> &'static str {
        match self {
            Self::Radial => "eps_r",
            Self::Axial => "eps_z",
            Self::Shear => "gamma_rz",
            Self::Hoop => "eps_theta",
        }
    }

    pub const fn description(self) -> &'static str {
        match self {
            Self::Radial => "Radial strain",
            Self::Axial => "Axial strain",
            Self::Shear => "Shear strain",
            Self::Hoop => "Hoop strain",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub lame_lambda: f64,
    pub lame_mu: f64,
}

impl Material {
    /// Isotropic material from Young's modulus and Poisson's ratio.
    pub fn new(youngs_modulus: f64, poisson_ratio: f64) -> Result<Self> {
        if !(youngs_modulus > 0.0) || !youngs_modulus.is_finite() {
            return Err(VemError::InvalidMaterial(format!(
                "Young's modulus must be positive, got {youngs_modulus}"
            )));
        }
        if !(poisson_ratio > -1.0 && poisson_ratio < 0.5) {
            return Err(VemError::InvalidMaterial(format!(
                "Poisson's ratio must lie in (-1, 0.5), got {poisson_ratio}"
            )));
        }
        let e = youngs_modulus;
        let nu = poisson_ratio;
        Ok(Self {
            youngs_modulus: e,
            poisson_ratio: nu,
            lame_lambda: e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)),
            lame_mu: e / (2.0 * (1.0 + nu)),
        })
    }

    /// Isotropic material from the Lamé constants.
    pub fn from_lame(lambda: f64, mu: f64) -> Result<Self> {
        if !(mu > 0.0) || !(lambda + 2.0 * mu > 0.0) || !lambda.is_finite() || !mu.is_finite() {
            return Err(VemError::InvalidMaterial(format!(
                "need mu > 0 and lambda + 2 mu > 0, got lambda = {lambda}, mu = {mu}"
            )));
        }
        let nu = lambda / (2.0 * (lambda + mu));
        if !(nu > -1.0 && nu < 0.5) {
            return Err(VemError::InvalidMaterial(format!(
                "Lamé constants give Poisson's ratio {nu} outside (-1, 0.5)"
            )));
        }
        Ok(Self {
            youngs_modulus: mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu),
            poisson_ratio: nu,
            lame_lambda: lambda,
            lame_mu: mu,
        })
    }

    pub fn constitutive_matrix(&self) -> ConstitutiveMatrix {
        ConstitutiveMatrix::from_lame(self.lame_lambda, self.lame_mu)
    }
}

/// The 4×4 matrix mapping `(ε_r, ε_z, γ_rz, ε_θ)` to `(σ_r, σ_z, τ_rz, σ_θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstitutiveMatrix(Matrix4<f64>);

impl ConstitutiveMatrix {
    pub fn from_lame(lambda: f64, mu: f64) -> Self {
        let d = lambda + 2.0 * mu;
        #[rustfmt::skip]
        let c = Matrix4::new(
            d,      lambda, 0.0, lambda,
            lambda, d,      0.0, lambda,
            0.0,    0.0,    mu,  0.0,
            lambda, lambda, 0.0, d,
        );
        Self(c)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn stress(&self, strain: &Strain) -> Stress {
        self.0 * strain
    }

    /// Stress of the unit strain field `e_p`, i.e. column p of C.
    pub fn basis_stress(&self, p: usize) -> Stress {
        self.0.column(p).into_owned()
    }
}
