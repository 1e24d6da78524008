//! Physical inputs and the field configuration.
//!
//! Units are natural (`ħ = c = 1`); every quantity is stored already in that
//! system. The electric field is `E = (λρ/2) ρ̂`, the magnetic field is zero,
//! and the quadrupole tensor has only the `(ρ, z)` off-diagonal pair set.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Cylindrical axis index into a [`QuadrupoleTensor`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Rho = 0,
    Phi = 1,
    Z = 2,
}

/// Laboratory inputs for one angular channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams<T> {
    pub mass: T,
    /// Quadrupole magnitude `M`.
    pub quadrupole: T,
    /// Field-gradient parameter `λ = λ₀/ε₀`, any sign.
    pub lambda: T,
    /// Linear confinement strength, any sign.
    pub eta: T,
    /// Axial wavenumber `k`.
    pub kz: T,
    /// Angular quantum number `l`.
    pub l: i32,
}

impl<T: Real> PhysicalParams<T> {
    pub fn new(mass: T, quadrupole: T, lambda: T, eta: T, kz: T, l: i32) -> Self {
        Self {
            mass,
            quadrupole,
            lambda,
            eta,
            kz,
            l,
        }
    }

    /// `|l|` as an unsigned integer.
    pub fn abs_l(&self) -> u32 {
        self.l.unsigned_abs()
    }

    /// The product `Mλ`.
    pub fn coupling(&self) -> T {
        self.quadrupole * self.lambda
    }

    /// The signed Coulomb-type strength `Mλl` multiplying `1/ρ` in the radial equation.
    pub fn coulomb_strength(&self) -> T {
        self.coupling() * T::lit(self.l as f64)
    }

    /// Constant energy shift `M²λ²/(8m)` from the squared effective potential.
    pub fn quadrupole_shift(&self) -> T {
        let c = self.coupling();
        c * c / (T::lit(8.0) * self.mass)
    }

    pub fn field(&self) -> FieldConfig<T> {
        FieldConfig::from_params(self)
    }
}

/// Symmetric traceless magnetic quadrupole tensor in cylindrical axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrupoleTensor<T> {
    pub entries: [[T; 3]; 3],
}

impl<T: Real> QuadrupoleTensor<T> {
    pub fn get(&self, i: Axis, j: Axis) -> T {
        self.entries[i as usize][j as usize]
    }

    pub fn trace(&self) -> T {
        self.entries[0][0] + self.entries[1][1] + self.entries[2][2]
    }

    pub fn transpose(&self) -> Self {
        let mut entries = self.entries;
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.entries[j][i];
            }
        }
        Self { entries }
    }

    /// `max |T_ij - T_ji|`.
    pub fn max_asymmetry(&self) -> T {
        let t = self.transpose();
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.entries[i][j] - t.entries[i][j]).abs());
            }
        }
        worst
    }
}

/// Builds the tensor with `M_ρz = M_zρ = -M` and every other entry zero.
pub fn make_quadrupole_tensor<T: Real>(magnitude: T) -> QuadrupoleTensor<T> {
    let mut entries = [[T::zero(); 3]; 3];
    entries[Axis::Rho as usize][Axis::Z as usize] = -magnitude;
    entries[Axis::Z as usize][Axis::Rho as usize] = -magnitude;
    QuadrupoleTensor { entries }
}

/// Field configuration: radial electric field linear in `ρ`, zero magnetic field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldConfig<T> {
    /// Coefficient `λ/2` in `E = (λ/2) ρ ρ̂`.
    pub electric_radial_coefficient: T,
    /// Magnetic field in `(ρ, φ, z)` components; identically zero here, so the
    /// `-M·B` interaction drops out of the Hamiltonian.
    pub magnetic_field: [T; 3],
}

impl<T: Real> FieldConfig<T> {
    pub fn from_params(params: &PhysicalParams<T>) -> Self {
        Self {
            electric_radial_coefficient: params.lambda / T::lit(2.0),
            magnetic_field: [T::zero(); 3],
        }
    }

    /// `E(ρ)` in `(ρ, φ, z)` components.
    pub fn electric_field(&self, rho: T) -> [T; 3] {
        [self.electric_radial_coefficient * rho, T::zero(), T::zero()]
    }
}

/// `M × E` in `(ρ, φ, z)` components, where the quadrupole vector acts as
/// `M_i = Σ_j M_ij ∂_j` on the field. For the linear radial field the only
/// nonvanishing derivative is `∂_ρ E_ρ = λ/2`.
pub fn effective_vector_potential_components<T: Real>(params: &PhysicalParams<T>) -> [T; 3] {
    let tensor = make_quadrupole_tensor(params.quadrupole);
    let d_rho_e_rho = params.field().electric_radial_coefficient;
    // (M_j E)_k = Σ_l T_jl ∂_l E_k, nonzero only for k = ρ, l = ρ.
    let m_acting = |j: Axis| tensor.get(j, Axis::Rho) * d_rho_e_rho;
    // (a × b) with b = (b_ρ, 0, 0): (0, a_z b_ρ, -a_φ b_ρ), here with b_ρ folded in.
    [T::zero(), m_acting(Axis::Z), -m_acting(Axis::Phi)]
}

/// Azimuthal component of the effective vector potential, `-Mλ/2`.
pub fn effective_vector_potential<T: Real>(params: &PhysicalParams<T>) -> T {
    effective_vector_potential_components(params)[Axis::Phi as usize]
}

/// Checks physical preconditions. With `require_coulomb` the Coulomb-type
/// term must be present (`l ≠ 0` and `Mλ ≠ 0`).
pub fn validate<T: Real>(params: PhysicalParams<T>, require_coulomb: bool) -> Result<PhysicalParams<T>> {
    for (name, v) in [
        ("mass", params.mass),
        ("quadrupole", params.quadrupole),
        ("lambda", params.lambda),
        ("eta", params.eta),
        ("kz", params.kz),
    ] {
        if !v.is_finite() {
            return Err(Error::NonFinite(name));
        }
    }
    if params.mass <= T::zero() {
        return Err(Error::NonPositiveMass(params.mass.as_f64()));
    }
    if require_coulomb {
        if params.l == 0 {
            return Err(Error::ZeroAngularMomentum);
        }
        if params.coupling() == T::zero() {
            return Err(Error::VanishingCoupling);
        }
    }
    Ok(params)
}
