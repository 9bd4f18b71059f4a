//! The quantum-optical master equation for a qubit in a bosonic thermal bath.
//!
//! dρ/dt = γ₀(N+1)(σ₋ρσ₊ − ½{σ₊σ₋, ρ}) + γ₀N(σ₊ρσ₋ − ½{σ₋σ₊, ρ})
//!
//! Free evolution is dropped; [`LindbladGenerator::with_free_hamiltonian`]
//! adds a −i[H₀, ρ] term when needed. The Bloch solution is closed form
//! ([`analytic_bloch`]); [`rk4_lindblad`] integrates the operator equation
//! directly and serves as an independent check.

use crate::error::{check_param, check_time, Error, Result};
use crate::linalg::{pauli, ComplexMatrix, C64, I};
use crate::thermo::{
    bloch_components, signed_temperature, validate_density, BlochVector, ThermalParam,
};

/// Qubit channel as an affine map r ↦ M r + C on Bloch vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineChannel {
    pub m: [[f64; 3]; 3],
    pub c: [f64; 3],
}

impl AffineChannel {
    pub const IDENTITY: Self = Self {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        c: [0.0; 3],
    };

    pub fn apply(&self, r: BlochVector) -> BlochVector {
        let v = r.to_array();
        let mut out = self.c;
        for (i, o) in out.iter_mut().enumerate() {
            *o += (0..3).map(|j| self.m[i][j] * v[j]).sum::<f64>();
        }
        BlochVector::from_array(out)
    }

    /// Linear extension of the channel to an arbitrary 2×2 operator.
    pub fn map_operator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let trace = x.trace();
        let comps: Vec<C64> = pauli::xyz().iter().map(|s| s.matmul(x).trace()).collect();
        let mut out = pauli::identity().scale(trace);
        for (i, sigma) in pauli::xyz().iter().enumerate() {
            let coeff = trace * self.c[i] + (0..3).map(|j| comps[j] * self.m[i][j]).sum::<C64>();
            out = &out + &sigma.scale(coeff);
        }
        out.scale_real(0.5)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..3 {
            d = d.max((self.c[i] - other.c[i]).abs());
            for j in 0..3 {
                d = d.max((self.m[i][j] - other.m[i][j]).abs());
            }
        }
        d
    }
}

/// Generalized amplitude damping parameters. `p` is `None` for B = 0, where
/// the channel is the identity and p is undetermined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GadParams {
    pub b: f64,
    pub p: Option<f64>,
}

/// Closed-form Bloch trajectory:
/// (r₁e^{−γt/2}, r₂e^{−γt/2}, (r₃ + g)e^{−γt} − g).
pub fn analytic_bloch(r0: BlochVector, th: &ThermalParam, t: f64) -> Result<BlochVector> {
    Ok(affine_from_master(th, t)?.apply(r0))
}

/// M = diag(e^{−γt/2}, e^{−γt/2}, e^{−γt}), C = (0, 0, g(e^{−γt} − 1)).
pub fn affine_from_master(th: &ThermalParam, t: f64) -> Result<AffineChannel> {
    check_time(t)?;
    let decay = (-th.gamma() * t).exp();
    let half = (-th.gamma() * t / 2.0).exp();
    Ok(AffineChannel {
        m: [[half, 0.0, 0.0], [0.0, half, 0.0], [0.0, 0.0, decay]],
        c: [0.0, 0.0, th.g() * (decay - 1.0)],
    })
}

/// Recognizes the GAD shape (diagonal M with M₁₁ = M₂₂ = √M₃₃, C = (0, 0, c))
/// and returns B = 1 − M₃₃ and p = (C₃/B + 1)/2.
pub fn gad_identify(ch: &AffineChannel) -> Result<GadParams> {
    const TOL: f64 = 1e-10;
    let m = &ch.m;
    let off_diag = [m[0][1], m[0][2], m[1][0], m[1][2], m[2][0], m[2][1]];
    if off_diag.iter().any(|x| x.abs() > TOL) {
        return Err(Error::NotGadShaped("M has off-diagonal entries".into()));
    }
    if ch.c[0].abs() > TOL || ch.c[1].abs() > TOL {
        return Err(Error::NotGadShaped("C has transverse components".into()));
    }
    let m33 = m[2][2];
    if !(-TOL..=1.0 + TOL).contains(&m33) {
        return Err(Error::NotGadShaped(format!("M33 = {m33} outside [0, 1]")));
    }
    let root = m33.max(0.0).sqrt();
    if (m[0][0] - root).abs() > TOL || (m[1][1] - root).abs() > TOL {
        return Err(Error::NotGadShaped(format!(
            "M11 = {}, M22 = {} but sqrt(M33) = {root}",
            m[0][0], m[1][1]
        )));
    }
    let b = (1.0 - m33).clamp(0.0, 1.0);
    if b <= TOL {
        return Ok(GadParams { b, p: None });
    }
    let p = (ch.c[2] / b + 1.0) / 2.0;
    if !(-TOL..=1.0 + TOL).contains(&p) {
        return Err(Error::NotGadShaped(format!("p = {p} outside [0, 1]")));
    }
    Ok(GadParams {
        b,
        p: Some(p.clamp(0.0, 1.0)),
    })
}

/// One sample of a thermalization run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalizationSample {
    pub t: f64,
    pub r: BlochVector,
    pub g_eff: f64,
    pub t_eff: f64,
    /// Trace norm of ρ(t) − ρ_th, i.e. the Bloch distance to (0, 0, −g).
    pub dist_to_thermal: f64,
}

/// Closed-form trajectory at `samples` uniform times on [0, t_max].
/// With t_max = 0 a single sample of the initial state is returned.
pub fn thermalization_trace(
    r0: BlochVector,
    th: &ThermalParam,
    t_max: f64,
    samples: usize,
) -> Result<Vec<ThermalizationSample>> {
    check_time(t_max)?;
    if !r0.is_physical() {
        return Err(Error::InvalidDensity(format!(
            "Bloch vector {r0:?} lies outside the ball"
        )));
    }
    check_param(
        "samples",
        samples as f64,
        samples >= 1,
        "need at least one sample",
    )?;
    let count = if t_max == 0.0 { 1 } else { samples };
    let target = BlochVector::thermal(th.g());
    (0..count)
        .map(|k| {
            let t = if count == 1 {
                0.0
            } else {
                t_max * k as f64 / (count - 1) as f64
            };
            let r = analytic_bloch(r0, th, t)?;
            let g_eff = -r.r3;
            Ok(ThermalizationSample {
                t,
                r,
                g_eff,
                t_eff: signed_temperature(g_eff),
                dist_to_thermal: r.distance(target),
            })
        })
        .collect()
}

/// Default RK4 step count: ⌈10⁴ γt⌉, at least 1 and at most 10⁶.
pub fn default_rk4_steps(gamma: f64, t: f64) -> usize {
    ((1e4 * gamma * t).ceil() as usize).clamp(1, 1_000_000)
}

/// The master-equation generator, optionally with a free Hamiltonian.
#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    down_rate: f64,
    up_rate: f64,
    free_hamiltonian: Option<ComplexMatrix>,
    sigma_minus: ComplexMatrix,
    sigma_plus: ComplexMatrix,
    /// σ₊σ₋ = |0⟩⟨0|
    n_excited: ComplexMatrix,
    /// σ₋σ₊ = |1⟩⟨1|
    n_ground: ComplexMatrix,
}

impl LindbladGenerator {
    pub fn new(th: &ThermalParam) -> Self {
        let sm = pauli::sigma_minus();
        let sp = pauli::sigma_plus();
        Self {
            down_rate: th.emission_rate(),
            up_rate: th.absorption_rate(),
            free_hamiltonian: None,
            n_excited: sp.matmul(&sm),
            n_ground: sm.matmul(&sp),
            sigma_minus: sm,
            sigma_plus: sp,
        }
    }

    pub fn with_free_hamiltonian(mut self, h0: ComplexMatrix) -> Result<Self> {
        if h0.rows() != 2 || !h0.is_hermitian(1e-12) {
            return Err(Error::NotHermitian {
                deviation: h0.hermitian_deviation(),
            });
        }
        self.free_hamiltonian = Some(h0);
        Ok(self)
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let dissipator = |l: &ComplexMatrix, ld: &ComplexMatrix, n: &ComplexMatrix| {
            let jump = l.matmul(rho).matmul(ld);
            let anti = &n.matmul(rho) + &rho.matmul(n);
            &jump - &anti.scale_real(0.5)
        };
        let down = dissipator(&self.sigma_minus, &self.sigma_plus, &self.n_excited);
        let up = dissipator(&self.sigma_plus, &self.sigma_minus, &self.n_ground);
        let mut out = &down.scale_real(self.down_rate) + &up.scale_real(self.up_rate);
        if let Some(h0) = &self.free_hamiltonian {
            out = &out + &h0.commutator(rho).scale(-I);
        }
        out
    }

    /// Fixed-step classical RK4 over [0, t].
    pub fn integrate(&self, rho0: &ComplexMatrix, t: f64, steps: usize) -> Result<ComplexMatrix> {
        check_time(t)?;
        check_param("steps", steps as f64, steps >= 1, "need at least one step")?;
        if t == 0.0 {
            return Ok(rho0.clone());
        }
        let h = t / steps as f64;
        let mut rho = rho0.clone();
        for _ in 0..steps {
            let k1 = self.apply(&rho);
            let k2 = self.apply(&(&rho + &k1.scale_real(h / 2.0)));
            let k3 = self.apply(&(&rho + &k2.scale_real(h / 2.0)));
            let k4 = self.apply(&(&rho + &k3.scale_real(h)));
            let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_real(2.0);
            rho = &rho + &incr.scale_real(h / 6.0);
            if !rho.is_finite() {
                return Err(Error::NonFinite("RK4 integration"));
            }
        }
        Ok(rho)
    }
}

/// RK4 integration of the master equation from a valid density matrix.
pub fn rk4_lindblad(
    rho0: &ComplexMatrix,
    th: &ThermalParam,
    t: f64,
    steps: usize,
) -> Result<ComplexMatrix> {
    if rho0.rows() != 2 || rho0.cols() != 2 {
        return Err(Error::DimensionMismatch(
            "master equation acts on a qubit".into(),
        ));
    }
    validate_density(rho0)?;
    LindbladGenerator::new(th).integrate(rho0, t, steps)
}

/// Bloch vector of an RK4-evolved state, without re-validating positivity.
pub fn rk4_bloch(r0: BlochVector, th: &ThermalParam, t: f64, steps: usize) -> Result<BlochVector> {
    let rho0 = crate::thermo::bloch_to_density(r0)?;
    Ok(bloch_components(&rk4_lindblad(&rho0, th, t, steps)?))
}
