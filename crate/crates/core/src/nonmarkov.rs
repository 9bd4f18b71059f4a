//! Qubit A coupled to a bath qubit B through H(t) = ω(t) σ_z ⊗ σ_z.
//!
//! With f(t) = ∫₀ᵗ ω, the joint unitary is cos f · I − i sin f · σ_z⊗σ_z and the
//! reduced dynamics of A keeps r_z fixed while the transverse part
//! r₁ − i r₂ is multiplied by cos 2f − i g_z sin 2f, where g_z is the bath's
//! Bloch z-component. The trace distance between two evolved states is then
//!
//! ```text
//! D(t) = √( Δr_z² + (Δr_x² + Δr_y²) · [cos²(2f) + g_z² sin²(2f)] )
//! ```
//!
//! and any interval where D grows witnesses non-Markovian dynamics.

use crate::error::{check_param, check_time, Error, Result};
use crate::linalg::{kron, partial_trace, pauli, ComplexMatrix, C64};
use crate::thermo::{bloch_to_density, BlochVector};

/// Increases of D below this are treated as flat.
pub const WITNESS_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Omega {
    Constant(f64),
    /// Samples of ω on a strictly increasing grid starting at t = 0,
    /// linearly interpolated.
    Table {
        times: Vec<f64>,
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DephasingSpec {
    pub omega: Omega,
    pub g_z: f64,
}

impl DephasingSpec {
    pub fn constant(omega0: f64, g_z: f64) -> Result<Self> {
        let spec = Self {
            omega: Omega::Constant(omega0),
            g_z,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn table(times: Vec<f64>, values: Vec<f64>, g_z: f64) -> Result<Self> {
        let spec = Self {
            omega: Omega::Table { times, values },
            g_z,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_param(
            "g_z",
            self.g_z,
            self.g_z.abs() <= 1.0,
            "must lie in [-1, 1]",
        )?;
        match &self.omega {
            Omega::Constant(w) => check_param("omega", *w, w.is_finite(), "must be finite"),
            Omega::Table { times, values } => {
                if times.len() != values.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "omega table has {} times but {} values",
                        times.len(),
                        values.len()
                    )));
                }
                if times.len() < 2 || times[0] != 0.0 {
                    return Err(Error::DegenerateGrid(
                        "omega table needs at least two points starting at t = 0".into(),
                    ));
                }
                if !times.windows(2).all(|w| w[1] > w[0]) || !times.iter().all(|t| t.is_finite()) {
                    return Err(Error::DegenerateGrid(
                        "omega table times must be strictly increasing".into(),
                    ));
                }
                if !values.iter().all(|v| v.is_finite()) {
                    return Err(Error::NonFinite("omega table values"));
                }
                Ok(())
            }
        }
    }

    fn table_end(&self) -> f64 {
        match &self.omega {
            Omega::Constant(_) => f64::INFINITY,
            Omega::Table { times, .. } => *times.last().unwrap(),
        }
    }

    fn check_in_range(&self, t: f64) -> Result<()> {
        check_time(t)?;
        check_param(
            "t",
            t,
            t <= self.table_end(),
            "beyond the end of the omega table",
        )
    }

    pub fn omega_at(&self, t: f64) -> Result<f64> {
        self.check_in_range(t)?;
        Ok(match &self.omega {
            Omega::Constant(w) => *w,
            Omega::Table { times, values } => {
                let k = segment(times, t);
                let s = (t - times[k]) / (times[k + 1] - times[k]);
                values[k] + s * (values[k + 1] - values[k])
            }
        })
    }
}

/// Index k with times[k] ≤ t ≤ times[k+1].
fn segment(times: &[f64], t: f64) -> usize {
    let k = times.partition_point(|&x| x <= t);
    k.saturating_sub(1).min(times.len() - 2)
}

/// f(t) = ∫₀ᵗ ω(τ) dτ (exact for the piecewise-linear table).
pub fn f_of_t(spec: &DephasingSpec, t: f64) -> Result<f64> {
    spec.validate()?;
    spec.check_in_range(t)?;
    Ok(match &spec.omega {
        Omega::Constant(w) => w * t,
        Omega::Table { times, values } => {
            let k = segment(times, t);
            let mut f = 0.0;
            for j in 0..k {
                f += 0.5 * (values[j] + values[j + 1]) * (times[j + 1] - times[j]);
            }
            let w_t = spec.omega_at(t)?;
            f + 0.5 * (values[k] + w_t) * (t - times[k])
        }
    })
}

/// cos 2f − i g_z sin 2f
pub fn transverse_factor(spec: &DephasingSpec, t: f64) -> Result<C64> {
    let f = f_of_t(spec, t)?;
    Ok(C64::new((2.0 * f).cos(), -spec.g_z * (2.0 * f).sin()))
}

/// Bath qubit state ½(I + g_z σ_z).
pub fn bath_density(g_z: f64) -> Result<ComplexMatrix> {
    bloch_to_density(BlochVector::new(0.0, 0.0, g_z))
}

pub fn joint_unitary(spec: &DephasingSpec, t: f64) -> Result<ComplexMatrix> {
    let f = f_of_t(spec, t)?;
    let zz = kron(&pauli::z(), &pauli::z());
    Ok(&ComplexMatrix::identity(4).scale_real(f.cos()) - &zz.scale(C64::new(0.0, f.sin())))
}

/// Closed-form Bloch vector of A at time t.
pub fn reduced_bloch_a(r0: BlochVector, spec: &DephasingSpec, t: f64) -> Result<BlochVector> {
    if !r0.is_physical() {
        return Err(Error::InvalidDensity(format!(
            "Bloch vector {r0:?} lies outside the ball"
        )));
    }
    let k = transverse_factor(spec, t)?;
    let w = C64::new(r0.r1, -r0.r2) * k;
    Ok(BlochVector::new(w.re, -w.im, r0.r3))
}

pub fn reduced_state_a(r0: BlochVector, spec: &DephasingSpec, t: f64) -> Result<ComplexMatrix> {
    bloch_to_density(reduced_bloch_a(r0, spec, t)?)
}

/// Tr_B[U (ρ_A ⊗ ρ_B) U†] by explicit joint evolution.
pub fn reduced_state_a_brute_force(
    r0: BlochVector,
    spec: &DephasingSpec,
    t: f64,
) -> Result<ComplexMatrix> {
    let joint = kron(&bloch_to_density(r0)?, &bath_density(spec.g_z)?);
    partial_trace(&joint.conjugate_by(&joint_unitary(spec, t)?), &[2, 2], &[0])
}

/// Trace norm of ρ_A(t) − σ_A(t), equal to the Bloch distance of the evolved vectors.
pub fn trace_distance_a(
    r0: BlochVector,
    s0: BlochVector,
    spec: &DephasingSpec,
    t: f64,
) -> Result<f64> {
    for v in [r0, s0] {
        if !v.is_physical() {
            return Err(Error::InvalidDensity(format!(
                "Bloch vector {v:?} lies outside the ball"
            )));
        }
    }
    let f = f_of_t(spec, t)?;
    let (c, s) = ((2.0 * f).cos(), (2.0 * f).sin());
    let dz = r0.r3 - s0.r3;
    let dt2 = (r0.r1 - s0.r1).powi(2) + (r0.r2 - s0.r2).powi(2);
    Ok((dz * dz + dt2 * (c * c + spec.g_z * spec.g_z * s * s)).sqrt())
}

fn validate_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.len() < 2 {
        return Err(Error::DegenerateGrid(
            "time grid needs at least two points".into(),
        ));
    }
    if !t_grid.iter().all(|t| t.is_finite() && *t >= 0.0) {
        return Err(Error::DegenerateGrid(
            "time grid must be finite and non-negative".into(),
        ));
    }
    if !t_grid.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::DegenerateGrid(
            "time grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

pub fn trace_distance_series(
    r0: BlochVector,
    s0: BlochVector,
    spec: &DephasingSpec,
    t_grid: &[f64],
) -> Result<Vec<f64>> {
    validate_grid(t_grid)?;
    t_grid
        .iter()
        .map(|&t| trace_distance_a(r0, s0, spec, t))
        .collect()
}

/// Flag per grid point: true when D grows from this point to the next.
/// The last point is always false.
pub fn increasing_flags(distances: &[f64]) -> Vec<bool> {
    let mut flags: Vec<bool> = distances
        .windows(2)
        .map(|w| w[1] - w[0] > WITNESS_THRESHOLD)
        .collect();
    flags.push(false);
    flags
}

/// Maximal grid intervals on which the trace distance strictly increases.
pub fn nonmarkov_witness(
    r0: BlochVector,
    s0: BlochVector,
    spec: &DephasingSpec,
    t_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let d = trace_distance_series(r0, s0, spec, t_grid)?;
    Ok(merge_intervals(t_grid, &increasing_flags(&d)))
}

fn merge_intervals(t_grid: &[f64], flags: &[bool]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut open: Option<usize> = None;
    for (k, &up) in flags.iter().enumerate() {
        match (up, open) {
            (true, None) => open = Some(k),
            (false, Some(start)) => {
                out.push((t_grid[start], t_grid[k]));
                open = None;
            }
            _ => {}
        }
    }
    out
}

/// `n` evenly spaced points on [0, t_max].
pub fn uniform_grid(t_max: f64, n: usize) -> Result<Vec<f64>> {
    check_param(
        "t_max",
        t_max,
        t_max > 0.0 && t_max.is_finite(),
        "must be positive",
    )?;
    if n < 2 {
        return Err(Error::DegenerateGrid(
            "need at least two grid points".into(),
        ));
    }
    Ok((0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect())
}
