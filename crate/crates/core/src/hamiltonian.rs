//! Thermalizing unitary U(t,0), its generator H_th(t) = i (dU/dt) U†, and
//! the parameter sets of the ancilla family that reproduce the master equation.
//!
//! With c = e^{−γt/2} and s = √(1 − e^{−γt}), the φ-variant unitary is
//!
//! ```text
//!     | c   0  0  is |
//!     | 0   1  0  0  |
//!     | 0   0  1  0  |
//!     | is  0  0  c  |
//! ```
//!
//! which equals exp(−iθ(t)·f̂·X) with X = |00⟩⟨11| + |11⟩⟨00|, θ(t) = arcsin s
//! and the negative branch of f. The ψ-variant rotates the {|01⟩, |10⟩} block
//! instead, coupling through |01⟩⟨10| + |10⟩⟨01|.

use std::f64::consts::PI;

use crate::channel::{affine_from_params, AncillaState, ChannelParams};
use crate::error::{check_param, check_time, Error, Result};
use crate::linalg::{exp_i_hermitian, ComplexMatrix, C64, I, ONE};
use crate::master::{affine_from_master, AffineChannel};
use crate::thermo::ThermalParam;

/// Start of every H-based integration; U on [0, ε] is taken in closed form.
pub const H_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    /// f(t) > 0: exp(−i∫H) has −i on the anti-diagonal.
    Positive,
    /// f(t) < 0: reproduces the +i anti-diagonal of the printed unitary.
    #[default]
    Negative,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// |φ⁺⟩⟨φ⁺| − |φ⁻⟩⟨φ⁻| = |00⟩⟨11| + |11⟩⟨00|
    #[default]
    Phi,
    /// |ψ⁺⟩⟨ψ⁺| − |ψ⁻⟩⟨ψ⁻| = |01⟩⟨10| + |10⟩⟨01|
    Psi,
}

impl Variant {
    /// Basis indices of the two-dimensional block the variant rotates.
    fn block(self) -> (usize, usize) {
        match self {
            Variant::Phi => (0, 3),
            Variant::Psi => (1, 2),
        }
    }

    /// The coupling operator on two qubits.
    pub fn coupling(self) -> ComplexMatrix {
        let (a, b) = self.block();
        let mut x = ComplexMatrix::zeros(4, 4);
        x[(a, b)] = ONE;
        x[(b, a)] = ONE;
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalizerSpec {
    gamma: f64,
    pub branch: Branch,
    pub variant: Variant,
}

impl ThermalizerSpec {
    pub fn new(gamma: f64, branch: Branch, variant: Variant) -> Result<Self> {
        check_param(
            "gamma",
            gamma,
            gamma > 0.0 && gamma.is_finite(),
            "must be positive",
        )?;
        Ok(Self {
            gamma,
            branch,
            variant,
        })
    }

    /// Negative branch, φ-variant.
    pub fn canonical(gamma: f64) -> Result<Self> {
        Self::new(gamma, Branch::default(), Variant::default())
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// f(t) = ±γ e^{−γt/2} / (2√(1 − e^{−γt})); diverges as t → 0⁺.
    pub fn coefficient(&self, t: f64) -> Result<f64> {
        check_param("t", t, t > 0.0, "H_th is singular at t = 0")?;
        Ok(self.branch.sign() * angle_rate(self.gamma, t))
    }
}

/// γ e^{−γt/2} / (2√(1 − e^{−γt})) for t > 0.
pub(crate) fn angle_rate(gamma: f64, t: f64) -> f64 {
    let x = gamma * t;
    gamma * (-x / 2.0).exp() / (2.0 * (-(-x).exp_m1()).sqrt())
}

/// θ(t) = arcsin √(1 − e^{−γt}), the antiderivative of |f| with θ(0) = 0.
/// Evaluated as atan2(√(1 − e^{−γt}), e^{−γt/2}) to stay accurate near π/2.
pub fn integrated_angle(gamma: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    check_param(
        "gamma",
        gamma,
        gamma >= 0.0 && gamma.is_finite(),
        "must be non-negative",
    )?;
    Ok((-(-gamma * t).exp_m1())
        .sqrt()
        .atan2((-gamma * t / 2.0).exp()))
}

pub fn thermal_unitary(spec: &ThermalizerSpec, t: f64) -> Result<ComplexMatrix> {
    check_time(t)?;
    let c = (-spec.gamma * t / 2.0).exp();
    let s = (-(-spec.gamma * t).exp_m1()).sqrt();
    let off = I * (-spec.branch.sign() * s);
    let (a, b) = spec.variant.block();
    let mut u = ComplexMatrix::identity(4);
    u[(a, a)] = C64::new(c, 0.0);
    u[(b, b)] = C64::new(c, 0.0);
    u[(a, b)] = off;
    u[(b, a)] = off;
    Ok(u)
}

/// H_th(t) = f(t) X for t > 0.
pub fn h_th(spec: &ThermalizerSpec, t: f64) -> Result<ComplexMatrix> {
    Ok(spec.variant.coupling().scale_real(spec.coefficient(t)?))
}

/// Time-ordered product of exp(−i H_th(tₖ) Δₖ) over [ε, t], composed with
/// the closed-form U(ε, 0).
///
/// The grid is uniform in √t, which keeps the 1/√t singularity of f at the
/// left end integrable by the midpoint rule; each factor uses the generic
/// Hermitian exponential.
pub fn reconstruct_unitary_from_h(
    spec: &ThermalizerSpec,
    t: f64,
    steps: usize,
) -> Result<ComplexMatrix> {
    check_time(t)?;
    check_param("steps", steps as f64, steps >= 1, "need at least one step")?;
    if t <= H_EPSILON {
        return thermal_unitary(spec, t);
    }
    let mut u = thermal_unitary(spec, H_EPSILON)?;
    let u0 = H_EPSILON.sqrt();
    let h = (t.sqrt() - u0) / steps as f64;
    for k in 0..steps {
        let mid = u0 + (k as f64 + 0.5) * h;
        let weight = 2.0 * mid * h;
        let step = exp_i_hermitian(&h_th(spec, mid * mid)?, weight)?;
        u = step.matmul(&u);
    }
    Ok(u)
}

/// i (U(t+Δ) − U(t−Δ)) / (2Δ) · U(t)†
pub fn finite_difference_generator(
    spec: &ThermalizerSpec,
    t: f64,
    dt: f64,
) -> Result<ComplexMatrix> {
    check_param("dt", dt, dt > 0.0 && dt < t, "need 0 < dt < t")?;
    let du = &thermal_unitary(spec, t + dt)? - &thermal_unitary(spec, t - dt)?;
    Ok(du
        .scale(I / (2.0 * dt))
        .matmul(&thermal_unitary(spec, t)?.dagger()))
}

/// The first parameter set: λ = g, cos α = cos δ = e^{−γt/2}, β = ξ = 0, η = 0.
pub fn set1_params(gamma: f64, g: f64, t: f64) -> Result<ChannelParams> {
    let th = ThermalParam::new(g, gamma)?;
    check_time(t)?;
    let a = integrated_angle(th.gamma(), t)?;
    ChannelParams::new(a, 0.0, a, 0.0, 0.0, g)
}

/// Ancilla state of the first parameter set: Bloch vector (0, 0, +g).
pub fn thermal_ancilla(g: f64) -> AncillaState {
    AncillaState {
        lambda: g,
        xi: 0.0,
        eta: 0.0,
    }
}

/// All parameter sets whose affine map equals the master-equation channel at
/// (γ, g, t): the closed-form first set followed by the second family, which
/// is found numerically.
pub fn solve_thermal_params(gamma: f64, g: f64, t: f64) -> Result<Vec<ChannelParams>> {
    let set1 = set1_params(gamma, g, t)?;
    let target = affine_from_master(&ThermalParam::new(g, gamma)?, t)?;
    let set2 = solve_second_family(&target, integrated_angle(gamma, t)?, g)?;
    Ok(vec![set1, set2])
}

const SOLVE_TOL: f64 = 1e-12;

/// Levenberg–Marquardt on (α, β, δ, ξ, λ) with η = 0, started on the side of
/// parameter space where sin α and sin δ have opposite signs.
fn solve_second_family(target: &AffineChannel, angle: f64, g: f64) -> Result<ChannelParams> {
    let seeds = [
        [
            angle + 0.2,
            0.15,
            -angle + 0.15,
            PI - 0.25,
            (g + 0.1).min(1.0),
        ],
        [angle + 0.05, -0.1, -angle - 0.1, PI + 0.2, g],
        [
            angle - 0.3,
            0.3,
            -angle + 0.4,
            PI - 0.6,
            (0.8 * g + 0.1).min(1.0),
        ],
    ];
    let mut best = f64::INFINITY;
    for seed in seeds {
        let (x, res) = levenberg_marquardt(target, seed);
        best = best.min(res);
        let second_family = x[0].sin() * x[2].sin() <= 1e-9;
        if res < SOLVE_TOL && second_family {
            return ChannelParams::new(
                wrap_angle(x[0]),
                wrap_angle(x[1]),
                wrap_angle(x[2]),
                0.0,
                wrap_angle(x[3]),
                x[4],
            );
        }
    }
    Err(Error::NoConvergence {
        what: "second parameter family solve",
        iterations: LM_MAX_ITER,
        residual: best,
    })
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

fn params_of(x: &[f64; 5]) -> ChannelParams {
    ChannelParams {
        alpha: x[0],
        beta: x[1],
        delta: x[2],
        eta: 0.0,
        xi: x[3],
        lambda: x[4],
    }
}

fn residual(target: &AffineChannel, x: &[f64; 5]) -> [f64; 12] {
    let ch = affine_from_params(&params_of(x));
    let mut r = [0.0; 12];
    for i in 0..3 {
        for j in 0..3 {
            r[3 * i + j] = ch.m[i][j] - target.m[i][j];
        }
        r[9 + i] = ch.c[i] - target.c[i];
    }
    r
}

fn max_abs(r: &[f64]) -> f64 {
    r.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

const LM_MAX_ITER: usize = 400;

fn levenberg_marquardt(target: &AffineChannel, mut x: [f64; 5]) -> ([f64; 5], f64) {
    let sq = |r: &[f64; 12]| r.iter().map(|v| v * v).sum::<f64>();
    let mut r = residual(target, &x);
    let mut cost = sq(&r);
    let mut mu = 1e-3;
    for _ in 0..LM_MAX_ITER {
        if max_abs(&r) < 1e-16 {
            break;
        }
        // Central-difference Jacobian, 12 x 5.
        let mut jac = [[0.0; 5]; 12];
        for k in 0..5 {
            let h = 1e-7;
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let (rp, rm) = (residual(target, &xp), residual(target, &xm));
            for i in 0..12 {
                jac[i][k] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let mut jtj = [[0.0; 5]; 5];
        let mut jtr = [0.0; 5];
        for a in 0..5 {
            for b in 0..5 {
                jtj[a][b] = (0..12).map(|i| jac[i][a] * jac[i][b]).sum();
            }
            jtr[a] = (0..12).map(|i| jac[i][a] * r[i]).sum();
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut lhs = jtj;
            for (a, row) in lhs.iter_mut().enumerate() {
                row[a] += mu * (jtj[a][a] + 1e-12);
            }
            let rhs = jtr.map(|v| -v);
            let Some(step) = solve5(lhs, rhs) else {
                mu *= 4.0;
                continue;
            };
            let mut trial = x;
            for k in 0..5 {
                trial[k] += step[k];
            }
            trial[4] = trial[4].clamp(0.0, 1.0);
            let r_trial = residual(target, &trial);
            let c_trial = sq(&r_trial);
            if c_trial < cost {
                x = trial;
                r = r_trial;
                cost = c_trial;
                mu = (mu / 3.0).max(1e-15);
                improved = true;
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    (x, max_abs(&r))
}

/// Gaussian elimination with partial pivoting.
fn solve5(mut a: [[f64; 5]; 5], mut b: [f64; 5]) -> Option<[f64; 5]> {
    for col in 0..5 {
        let piv = (col..5).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..5 {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (v, p) in a[row].iter_mut().zip(pivot_row).skip(col) {
                *v -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 5];
    for row in (0..5).rev() {
        let s: f64 = (row + 1..5).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
