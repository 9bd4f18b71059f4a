//! Qubit states, the g ↔ temperature map, thermal states and the pin map.
//!
//! Units: ħ = k_B = 1 and the qubit energy splitting is 1. The ground state is
//! |1⟩, so the thermal state at parameter `g` is ½ diag(1 − g, 1 + g) with
//! Bloch vector (0, 0, −g).

use crate::error::{check_param, Error, Result};
use crate::linalg::{pauli, ComplexMatrix, C64};

/// Slack allowed on |r| ≤ 1.
pub const BLOCH_TOL: f64 = 1e-12;
/// Tolerance for Hermiticity, unit trace and positivity of density matrices.
pub const DENSITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl BlochVector {
    pub const ORIGIN: Self = Self::new(0.0, 0.0, 0.0);

    pub const fn new(r1: f64, r2: f64, r3: f64) -> Self {
        Self { r1, r2, r3 }
    }

    pub fn from_array(r: [f64; 3]) -> Self {
        Self::new(r[0], r[1], r[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.r1, self.r2, self.r3]
    }

    pub fn norm(self) -> f64 {
        (self.r1 * self.r1 + self.r2 * self.r2 + self.r3 * self.r3).sqrt()
    }

    pub fn distance(self, other: Self) -> f64 {
        Self::new(self.r1 - other.r1, self.r2 - other.r2, self.r3 - other.r3).norm()
    }

    pub fn is_physical(self) -> bool {
        let n2 = self.r1 * self.r1 + self.r2 * self.r2 + self.r3 * self.r3;
        n2.is_finite() && n2 <= 1.0 + BLOCH_TOL
    }

    /// Bloch vector of the thermal state at parameter `g`.
    pub fn thermal(g: f64) -> Self {
        Self::new(0.0, 0.0, -g)
    }
}

/// Thermal bath parameter `g` together with the total emission rate γ.
///
/// γ₀ = gγ is the spontaneous emission rate and N = (1/g − 1)/2 the Planck
/// occupation; both are derived, so g = 0 (infinite temperature) is fine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalParam {
    g: f64,
    gamma: f64,
}

impl ThermalParam {
    pub fn new(g: f64, gamma: f64) -> Result<Self> {
        check_param("g", g, (0.0..=1.0).contains(&g), "must lie in [0, 1]")?;
        check_param(
            "gamma",
            gamma,
            gamma > 0.0 && gamma.is_finite(),
            "must be positive",
        )?;
        Ok(Self { g, gamma })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// γ₀ = gγ
    pub fn gamma0(&self) -> f64 {
        self.g * self.gamma
    }

    /// Planck occupation N = (1/g − 1)/2; infinite for g = 0.
    pub fn occupation(&self) -> f64 {
        if self.g == 0.0 {
            f64::INFINITY
        } else {
            (1.0 / self.g - 1.0) / 2.0
        }
    }

    /// Emission rate γ₀(N + 1) = γ(1 + g)/2.
    pub fn emission_rate(&self) -> f64 {
        self.gamma * (1.0 + self.g) / 2.0
    }

    /// Absorption rate γ₀N = γ(1 − g)/2.
    pub fn absorption_rate(&self) -> f64 {
        self.gamma * (1.0 - self.g) / 2.0
    }

    pub fn temperature(&self) -> f64 {
        temperature_from_g(self.g).expect("g validated on construction")
    }
}

pub fn bloch_to_density(r: BlochVector) -> Result<ComplexMatrix> {
    if !r.is_physical() {
        return Err(Error::InvalidDensity(format!(
            "Bloch vector {:?} has length {} > 1",
            r.to_array(),
            r.norm()
        )));
    }
    Ok(bloch_to_density_unchecked(r))
}

/// ½(I + r·σ) without the |r| ≤ 1 check; used for differences of states.
pub fn bloch_to_density_unchecked(r: BlochVector) -> ComplexMatrix {
    let half = 0.5;
    ComplexMatrix::from_rows([
        [
            C64::new(half * (1.0 + r.r3), 0.0),
            C64::new(half * r.r1, -half * r.r2),
        ],
        [
            C64::new(half * r.r1, half * r.r2),
            C64::new(half * (1.0 - r.r3), 0.0),
        ],
    ])
}

/// Checks Hermiticity, unit trace and positivity within [`DENSITY_TOL`].
pub fn validate_density(rho: &ComplexMatrix) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::InvalidDensity(format!(
            "not square ({}x{})",
            rho.rows(),
            rho.cols()
        )));
    }
    let dev = rho.hermitian_deviation();
    if dev > DENSITY_TOL {
        return Err(Error::InvalidDensity(format!(
            "not Hermitian (deviation {dev:e})"
        )));
    }
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TOL {
        return Err(Error::InvalidDensity(format!("trace is {tr}, expected 1")));
    }
    if !rho.is_psd(DENSITY_TOL) {
        return Err(Error::InvalidDensity("negative eigenvalue".into()));
    }
    Ok(())
}

/// rᵢ = Tr(σᵢ ρ) for a valid single-qubit density matrix.
pub fn density_to_bloch(rho: &ComplexMatrix) -> Result<BlochVector> {
    if rho.rows() != 2 || rho.cols() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "expected a 2x2 density matrix, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    validate_density(rho)?;
    Ok(bloch_components(rho))
}

/// Tr(σᵢ X) for any 2×2 matrix, real parts only.
pub(crate) fn bloch_components(x: &ComplexMatrix) -> BlochVector {
    BlochVector::new(
        2.0 * x[(0, 1)].re,
        -2.0 * x[(0, 1)].im,
        (x[(0, 0)] - x[(1, 1)]).re,
    )
}

/// g = tanh(1/(2T)); T = +∞ maps to 0, T = 0 to 1.
pub fn g_from_temperature(t: f64) -> Result<f64> {
    check_param(
        "T",
        t,
        t >= 0.0,
        "temperature must be non-negative (or +inf)",
    )?;
    if t == 0.0 {
        Ok(1.0)
    } else {
        Ok((0.5 / t).tanh())
    }
}

/// T = 1/(2 atanh g); g = 0 maps to +∞, g = 1 to 0.
pub fn temperature_from_g(g: f64) -> Result<f64> {
    check_param("g", g, (0.0..=1.0).contains(&g), "must lie in [0, 1]")?;
    Ok(signed_temperature(g))
}

/// Temperature for an effective g ∈ [−1, 1]. Inverted populations (g < 0)
/// give negative temperatures; g = −1 gives −0.
pub fn signed_temperature(g: f64) -> f64 {
    if g == 0.0 {
        f64::INFINITY
    } else if g >= 1.0 {
        0.0
    } else if g <= -1.0 {
        -0.0
    } else {
        0.5 / g.atanh()
    }
}

/// ½ diag(1 − g, 1 + g)
pub fn thermal_state(g: f64) -> Result<ComplexMatrix> {
    check_param("g", g, (0.0..=1.0).contains(&g), "must lie in [0, 1]")?;
    Ok(ComplexMatrix::from_real_diag(&[
        (1.0 - g) / 2.0,
        (1.0 + g) / 2.0,
    ]))
}

/// Pin-map population of |0⟩ whose output is the thermal state at `g`.
pub fn pin_p_for_g(g: f64) -> f64 {
    (1.0 - g) / 2.0
}

/// The pin map as a 4×4 superoperator acting on row-major vec(ρ).
pub fn pin_map_superoperator(p: f64) -> Result<ComplexMatrix> {
    check_param("p", p, (0.0..=1.0).contains(&p), "must lie in [0, 1]")?;
    let q = 1.0 - p;
    Ok(ComplexMatrix::from_real_rows([
        [p, 0.0, 0.0, p],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [q, 0.0, 0.0, q],
    ]))
}

/// Applies the pin map through its superoperator matrix; output is diag(p, 1 − p).
pub fn pin_map_apply(rho: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    let n = pin_map_superoperator(p)?;
    if rho.rows() != 2 || rho.cols() != 2 {
        return Err(Error::DimensionMismatch(
            "pin map acts on 2x2 matrices".into(),
        ));
    }
    validate_density(rho)?;
    let vec_rho = ComplexMatrix::from_vec(4, 1, rho.as_slice().to_vec());
    let out = n.matmul(&vec_rho);
    Ok(ComplexMatrix::from_vec(2, 2, out.as_slice().to_vec()))
}

/// Kraus operators {K₀₀, K₀₁, K₁₀, K₁₁} of the pin map.
pub fn pin_map_kraus(p: f64) -> Result<[ComplexMatrix; 4]> {
    check_param("p", p, (0.0..=1.0).contains(&p), "must lie in [0, 1]")?;
    let a = p.sqrt();
    let b = (1.0 - p).sqrt();
    Ok([
        ComplexMatrix::from_real_rows([[a, 0.0], [0.0, 0.0]]),
        ComplexMatrix::from_real_rows([[0.0, a], [0.0, 0.0]]),
        ComplexMatrix::from_real_rows([[0.0, 0.0], [b, 0.0]]),
        ComplexMatrix::from_real_rows([[0.0, 0.0], [0.0, b]]),
    ])
}

/// Σ K ρ K†
pub fn apply_kraus(kraus: &[ComplexMatrix], rho: &ComplexMatrix) -> ComplexMatrix {
    let n = kraus.first().map_or(rho.rows(), |k| k.rows());
    kraus.iter().fold(ComplexMatrix::zeros(n, n), |acc, k| {
        &acc + &rho.conjugate_by(k)
    })
}

/// How a (possibly non-thermal) qubit state is assigned an equivalent thermal parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TemperatureAssignment {
    /// g = −r₃: computational-basis populations. Negative values flag inversion.
    #[default]
    Populations,
    /// g = |r|: spectrum of ρ; blind to the orientation of the Bloch vector.
    Spectrum,
}

/// Equivalent thermal parameter and the transverse (coherence) residue √(r₁² + r₂²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveG {
    pub g: f64,
    pub coherence: f64,
}

pub fn effective_g(rho: &ComplexMatrix) -> Result<EffectiveG> {
    effective_g_with(rho, TemperatureAssignment::Populations)
}

pub fn effective_g_with(rho: &ComplexMatrix, mode: TemperatureAssignment) -> Result<EffectiveG> {
    let r = density_to_bloch(rho)?;
    Ok(effective_g_of_bloch(r, mode))
}

pub fn effective_g_of_bloch(r: BlochVector, mode: TemperatureAssignment) -> EffectiveG {
    let coherence = r.r1.hypot(r.r2);
    let g = match mode {
        TemperatureAssignment::Populations => -r.r3,
        TemperatureAssignment::Spectrum => r.norm(),
    };
    EffectiveG { g, coherence }
}

/// Maximally mixed qubit state I/2.
pub fn maximally_mixed() -> ComplexMatrix {
    pauli::identity().scale_real(0.5)
}
