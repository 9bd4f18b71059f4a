//! Two system qubits A, B, each coupled to its own bath qubit (A₁, B₁) by a
//! thermalizing Hamiltonian, with an A–B coupling of the same form.
//!
//! Qubit order is A₁ ⊗ A ⊗ B ⊗ B₁ (A₁ is the most significant bit). Every
//! pair term is c(t)·X with X = |00⟩⟨11| + |11⟩⟨00| on that pair, so the
//! time-integrated Hamiltonian is
//!
//! ```text
//! H̄(t) = θ₁(t) X_{A₁A} + θ₂(t) X_{BB₁} + θ₃(t) X_{AB},   θᵢ = arcsin √(1 − e^{−γᵢt})
//! ```
//!
//! The default propagator is exp(−iH̄(t)). When the rates differ the pair
//! terms do not commute at different times, so this is not the time-ordered
//! evolution; [`Propagator::TimeOrdered`] computes the latter for comparison.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{check_param, check_time, Error, Result};
use crate::hamiltonian::{angle_rate, integrated_angle, H_EPSILON};
use crate::linalg::{exp_i_hermitian, kron, kron_all, partial_trace, ComplexMatrix, C64, ONE};
use crate::thermo::{
    bloch_components, effective_g_of_bloch, signed_temperature, temperature_from_g, thermal_state,
    validate_density, TemperatureAssignment,
};

pub const DIM: usize = 16;
pub const QUBITS: [usize; 4] = [2, 2, 2, 2];
pub const QUBIT_A1: usize = 0;
pub const QUBIT_A: usize = 1;
pub const QUBIT_B: usize = 2;
pub const QUBIT_B1: usize = 3;

/// Adjacent pairs (first qubit index) carrying the three couplings.
const PAIR_A1A: usize = 0;
const PAIR_AB: usize = 1;
const PAIR_BB1: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Propagator {
    /// exp(−i ∫₀ᵗ H(s) ds)
    #[default]
    Integrated,
    /// Time-ordered product of short-time exponentials of H(s).
    TimeOrdered,
}

/// Initial state of the system pair AB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitStateSpec {
    Ket00,
    BellPhiPlus,
    /// cosψ|00⟩ + sinψ cosθ|01⟩ + sinψ sinθ cosφ|10⟩ + sinψ sinθ sinφ|11⟩
    Pure {
        psi: f64,
        theta: f64,
        phi: f64,
    },
    /// thermal_state(g_a) ⊗ thermal_state(g_b)
    ThermalPair {
        g_a: f64,
        g_b: f64,
    },
}

impl InitStateSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InitStateSpec::Ket00 | InitStateSpec::BellPhiPlus => Ok(()),
            InitStateSpec::Pure { psi, theta, phi } => {
                check_param("psi", psi, (0.0..=PI).contains(&psi), "must lie in [0, pi]")?;
                check_param(
                    "theta",
                    theta,
                    (0.0..=PI).contains(&theta),
                    "must lie in [0, pi]",
                )?;
                check_param(
                    "phi",
                    phi,
                    (0.0..=2.0 * PI).contains(&phi),
                    "must lie in [0, 2pi]",
                )
            }
            InitStateSpec::ThermalPair { g_a, g_b } => {
                check_param("gA", g_a, (0.0..=1.0).contains(&g_a), "must lie in [0, 1]")?;
                check_param("gB", g_b, (0.0..=1.0).contains(&g_b), "must lie in [0, 1]")
            }
        }
    }

    pub fn density(&self) -> Result<ComplexMatrix> {
        self.validate()?;
        Ok(match *self {
            InitStateSpec::Ket00 => ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0, 0.0]),
            InitStateSpec::BellPhiPlus => {
                let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                ComplexMatrix::projector(&[s, C64::new(0.0, 0.0), C64::new(0.0, 0.0), s])
            }
            InitStateSpec::Pure { psi, theta, phi } => {
                let amps = [
                    psi.cos(),
                    psi.sin() * theta.cos(),
                    psi.sin() * theta.sin() * phi.cos(),
                    psi.sin() * theta.sin() * phi.sin(),
                ]
                .map(|a| C64::new(a, 0.0));
                ComplexMatrix::projector(&amps)
            }
            InitStateSpec::ThermalPair { g_a, g_b } => {
                kron(&thermal_state(g_a)?, &thermal_state(g_b)?)
            }
        })
    }

    /// Invariant under exchanging A and B.
    pub fn is_swap_symmetric(&self) -> bool {
        match *self {
            InitStateSpec::Ket00 | InitStateSpec::BellPhiPlus => true,
            InitStateSpec::Pure { psi, theta, phi } => {
                // Amplitudes of |01⟩ and |10⟩ must agree.
                (psi.sin() * theta.cos() - psi.sin() * theta.sin() * phi.cos()).abs() < 1e-15
            }
            InitStateSpec::ThermalPair { g_a, g_b } => g_a == g_b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Rate of the A₁–A thermalizer.
    pub gamma1: f64,
    /// Rate of the B–B₁ thermalizer.
    pub gamma2: f64,
    /// Rate of the A–B coupling.
    pub gamma3: f64,
    pub t_final: f64,
    pub grid_n: usize,
    pub g1_range: (f64, f64),
    pub g2_range: (f64, f64),
    pub init: InitStateSpec,
    pub propagator: Propagator,
    pub time_ordered_steps: usize,
    /// Minimum change in g counted as heating or cooling.
    pub class_tol: f64,
    /// Coherence residue above which a final state is flagged anomalous.
    pub coherence_tol: f64,
    pub assignment: TemperatureAssignment,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            gamma1: 1.0,
            gamma2: 1.0,
            gamma3: 1.0,
            t_final: 1000.0,
            grid_n: 16,
            g1_range: (0.05, 0.95),
            g2_range: (0.05, 0.95),
            init: InitStateSpec::Ket00,
            propagator: Propagator::Integrated,
            time_ordered_steps: 100_000,
            class_tol: 1e-9,
            coherence_tol: 1e-6,
            assignment: TemperatureAssignment::Populations,
        }
    }
}

impl SweepConfig {
    /// Rates and time only; enough for building Hamiltonians and propagators.
    pub fn validate_dynamics(&self) -> Result<()> {
        for (name, g) in [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma3", self.gamma3),
        ] {
            check_param(name, g, g >= 0.0 && g.is_finite(), "must be non-negative")?;
        }
        check_param(
            "t_final",
            self.t_final,
            self.t_final > 0.0 && self.t_final.is_finite(),
            "must be positive",
        )?;
        check_param(
            "time_ordered_steps",
            self.time_ordered_steps as f64,
            self.time_ordered_steps >= 1,
            "need at least one step",
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_dynamics()?;
        check_param(
            "grid_n",
            self.grid_n as f64,
            self.grid_n >= 2,
            "need at least 2 points per axis",
        )?;
        for (lo_name, hi_name, (lo, hi)) in [
            ("g1_min", "g1_max", self.g1_range),
            ("g2_min", "g2_max", self.g2_range),
        ] {
            check_param(lo_name, lo, lo > 0.0 && lo <= 1.0, "must lie in (0, 1]")?;
            check_param(hi_name, hi, hi > 0.0 && hi <= 1.0, "must lie in (0, 1]")?;
            check_param(hi_name, hi, hi >= lo, "range upper bound below lower bound")?;
        }
        check_param(
            "class_tol",
            self.class_tol,
            self.class_tol >= 0.0,
            "must be non-negative",
        )?;
        check_param(
            "coherence_tol",
            self.coherence_tol,
            self.coherence_tol >= 0.0,
            "must be non-negative",
        )?;
        self.init.validate()
    }

    /// Same configuration with A and B (and their baths) exchanged.
    pub fn pair_swapped(&self) -> Self {
        let mut out = self.clone();
        std::mem::swap(&mut out.gamma1, &mut out.gamma2);
        std::mem::swap(&mut out.g1_range, &mut out.g2_range);
        out
    }
}

/// Evenly spaced grid points, both ends included.
pub fn grid_values((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| {
            if k == n - 1 {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// X = |00⟩⟨11| + |11⟩⟨00| on qubits (first, first + 1), identity elsewhere.
pub fn pair_coupling(first: usize) -> ComplexMatrix {
    assert!(first < 3, "pairs are (0,1), (1,2), (2,3)");
    let mask = pair_mask(first);
    let mut x = ComplexMatrix::zeros(DIM, DIM);
    for r in 0..DIM {
        if pair_bits_equal(r, first) {
            x[(r, r ^ mask)] = ONE;
        }
    }
    x
}

fn pair_mask(first: usize) -> usize {
    (1 << (3 - first)) | (1 << (2 - first))
}

fn pair_bits_equal(r: usize, first: usize) -> bool {
    ((r >> (3 - first)) & 1) == ((r >> (2 - first)) & 1)
}

/// Permutation exchanging A₁ ↔ B₁ and A ↔ B (reverses the qubit order).
pub fn pair_swap_permutation() -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(DIM, DIM);
    for r in 0..DIM {
        let rev = (0..4).fold(0, |acc, q| acc | (((r >> q) & 1) << (3 - q)));
        p[(rev, r)] = ONE;
    }
    p
}

/// (θ_{A₁A}, θ_{BB₁}, θ_{AB}) at time t.
pub fn coupling_angles(cfg: &SweepConfig, t: f64) -> Result<[f64; 3]> {
    Ok([
        integrated_angle(cfg.gamma1, t)?,
        integrated_angle(cfg.gamma2, t)?,
        integrated_angle(cfg.gamma3, t)?,
    ])
}

/// H̄(t) = ∫₀ᵗ H(s) ds
pub fn total_hbar(cfg: &SweepConfig, t: f64) -> Result<ComplexMatrix> {
    check_time(t)?;
    cfg.validate_dynamics()?;
    let [th1, th2, th3] = coupling_angles(cfg, t)?;
    let terms = [
        pair_coupling(PAIR_A1A).scale_real(th1),
        pair_coupling(PAIR_BB1).scale_real(th2),
        pair_coupling(PAIR_AB).scale_real(th3),
    ];
    Ok(terms
        .iter()
        .fold(ComplexMatrix::zeros(DIM, DIM), |acc, t| &acc + t))
}

/// H(s) = a(s) X_{A₁A} + b(s) X_{BB₁} + c(s) X_{AB} for s > 0.
pub fn total_h(cfg: &SweepConfig, s: f64) -> Result<ComplexMatrix> {
    check_param("t", s, s > 0.0, "H is singular at t = 0")?;
    let [a, b, c] = instantaneous_rates(cfg, s);
    let terms = [
        pair_coupling(PAIR_A1A).scale_real(a),
        pair_coupling(PAIR_BB1).scale_real(b),
        pair_coupling(PAIR_AB).scale_real(c),
    ];
    Ok(terms
        .iter()
        .fold(ComplexMatrix::zeros(DIM, DIM), |acc, t| &acc + t))
}

fn instantaneous_rates(cfg: &SweepConfig, s: f64) -> [f64; 3] {
    [cfg.gamma1, cfg.gamma2, cfg.gamma3].map(|g| if g == 0.0 { 0.0 } else { angle_rate(g, s) })
}

/// Evolution operator U(t, 0) for the configured propagator.
pub fn propagator(cfg: &SweepConfig, t: f64) -> Result<ComplexMatrix> {
    check_time(t)?;
    cfg.validate_dynamics()?;
    match cfg.propagator {
        Propagator::Integrated => exp_i_hermitian(&total_hbar(cfg, t)?, 1.0),
        Propagator::TimeOrdered => time_ordered_propagator(cfg, t, cfg.time_ordered_steps),
    }
}

/// Product of exp(−i H(sₖ) Δₖ) over [ε, t] on a grid uniform in √s,
/// composed with exp(−iH̄(ε)).
///
/// Each factor is a Taylor series applied through the sparse pair structure;
/// the per-step exponent norm is tiny, so the series is summed to round-off.
pub fn time_ordered_propagator(cfg: &SweepConfig, t: f64, steps: usize) -> Result<ComplexMatrix> {
    check_time(t)?;
    check_param("steps", steps as f64, steps >= 1, "need at least one step")?;
    let head = exp_i_hermitian(&total_hbar(cfg, t.min(H_EPSILON))?, 1.0)?;
    if t <= H_EPSILON {
        return Ok(head);
    }
    let u0 = H_EPSILON.sqrt();
    let h = (t.sqrt() - u0) / steps as f64;
    let mut u = head;
    for k in 0..steps {
        let mid = u0 + (k as f64 + 0.5) * h;
        let weight = 2.0 * mid * h;
        let coeffs = instantaneous_rates(cfg, mid * mid).map(|r| r * weight);
        u = apply_step_exponential(coeffs, &u);
        if !u.is_finite() {
            return Err(Error::NonFinite("time-ordered propagation"));
        }
    }
    Ok(u)
}

/// exp(−i (c₁X_{A₁A} + c₂X_{BB₁} + c₃X_{AB})) · m via its Taylor series.
fn apply_step_exponential(coeffs: [f64; 3], m: &ComplexMatrix) -> ComplexMatrix {
    let pairs = [
        (PAIR_A1A, coeffs[0]),
        (PAIR_BB1, coeffs[1]),
        (PAIR_AB, coeffs[2]),
    ];
    let apply_h = |x: &ComplexMatrix| -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(DIM, DIM);
        for &(first, c) in &pairs {
            if c == 0.0 {
                continue;
            }
            let mask = pair_mask(first);
            for r in 0..DIM {
                if !pair_bits_equal(r, first) {
                    continue;
                }
                let src = r ^ mask;
                for col in 0..DIM {
                    out[(r, col)] += x[(src, col)] * c;
                }
            }
        }
        out
    };
    let mut acc = m.clone();
    let mut term = m.clone();
    for k in 1..=40 {
        term = apply_h(&term).scale(C64::new(0.0, -1.0 / k as f64));
        acc = &acc + &term;
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    acc
}

/// ρ(t) = U ρ₀ U†
pub fn evolve(cfg: &SweepConfig, rho0: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if rho0.rows() != DIM || rho0.cols() != DIM {
        return Err(Error::DimensionMismatch(format!(
            "four-qubit state must be 16x16, got {}x{}",
            rho0.rows(),
            rho0.cols()
        )));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    Ok(rho0.conjugate_by(&propagator(cfg, t)?))
}

/// ½(I + g σ₃) for a bath qubit.
pub fn bath_state(g: f64) -> Result<ComplexMatrix> {
    check_param(
        "g",
        g,
        (0.0..=1.0).contains(&g),
        "bath parameter must lie in [0, 1]",
    )?;
    Ok(ComplexMatrix::from_real_diag(&[
        (1.0 + g) / 2.0,
        (1.0 - g) / 2.0,
    ]))
}

/// ρ_{A₁}(0) ⊗ ρ_{AB}(0) ⊗ ρ_{B₁}(0)
pub fn initial_state(cfg: &SweepConfig, g1: f64, g2: f64) -> Result<ComplexMatrix> {
    let ab = cfg.init.density()?;
    Ok(kron_all(&[&bath_state(g1)?, &ab, &bath_state(g2)?]))
}

/// Reduced state of one qubit (by index in A₁ ⊗ A ⊗ B ⊗ B₁).
pub fn reduce_to_qubit(rho: &ComplexMatrix, qubit: usize) -> Result<ComplexMatrix> {
    partial_trace(rho, &QUBITS, &[qubit])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseClass {
    BothCool,
    ACoolBHeat,
    AHeatBCool,
    BothHeat,
    Anomalous,
}

impl PhaseClass {
    pub const ALL: [PhaseClass; 5] = [
        PhaseClass::BothCool,
        PhaseClass::ACoolBHeat,
        PhaseClass::AHeatBCool,
        PhaseClass::BothHeat,
        PhaseClass::Anomalous,
    ];

    pub fn token(self) -> &'static str {
        match self {
            PhaseClass::BothCool => "both_cool",
            PhaseClass::ACoolBHeat => "a_cool_b_heat",
            PhaseClass::AHeatBCool => "a_heat_b_cool",
            PhaseClass::BothHeat => "both_heat",
            PhaseClass::Anomalous => "anomalous",
        }
    }

    /// Image color for phase-diagram output.
    pub fn rgb(self) -> [u8; 3] {
        match self {
            PhaseClass::BothCool => [0, 0, 255],
            PhaseClass::ACoolBHeat => [0, 255, 0],
            PhaseClass::AHeatBCool => [255, 255, 0],
            PhaseClass::BothHeat => [255, 0, 0],
            PhaseClass::Anomalous => [128, 128, 128],
        }
    }

    /// Label after exchanging the roles of A and B.
    pub fn swapped(self) -> Self {
        match self {
            PhaseClass::ACoolBHeat => PhaseClass::AHeatBCool,
            PhaseClass::AHeatBCool => PhaseClass::ACoolBHeat,
            other => other,
        }
    }
}

/// Direction of a qubit's change in effective g (higher g is colder).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Cooled,
    Heated,
    Unchanged,
}

impl Trend {
    fn of(g_init: f64, g_final: f64, tol: f64) -> Self {
        if g_final > g_init + tol {
            Trend::Cooled
        } else if g_final < g_init - tol {
            Trend::Heated
        } else {
            Trend::Unchanged
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCell {
    pub g1: f64,
    pub g2: f64,
    pub t_bath_a: f64,
    pub t_bath_b: f64,
    pub ga_init: f64,
    pub gb_init: f64,
    pub ga_final: f64,
    pub gb_final: f64,
    pub coher_a: f64,
    pub coher_b: f64,
    pub trend_a: Trend,
    pub trend_b: Trend,
    pub class: PhaseClass,
}

impl PhaseCell {
    /// Effective temperatures (signed; negative for inverted populations).
    pub fn final_temperatures(&self) -> (f64, f64) {
        (
            signed_temperature(self.ga_final),
            signed_temperature(self.gb_final),
        )
    }
}

/// Evolves one grid point to `t_final` and classifies the outcome.
pub fn classify_cell(cfg: &SweepConfig, g1: f64, g2: f64) -> Result<PhaseCell> {
    cfg.validate()?;
    let u = propagator(cfg, cfg.t_final)?;
    classify_with_propagator(cfg, &u, g1, g2)
}

fn classify_with_propagator(
    cfg: &SweepConfig,
    u: &ComplexMatrix,
    g1: f64,
    g2: f64,
) -> Result<PhaseCell> {
    check_param("g1", g1, g1 > 0.0 && g1 <= 1.0, "must lie in (0, 1]")?;
    check_param("g2", g2, g2 > 0.0 && g2 <= 1.0, "must lie in (0, 1]")?;
    let rho0 = initial_state(cfg, g1, g2)?;
    let rho = rho0.conjugate_by(u);
    let qubit_g = |state: &ComplexMatrix, q: usize| -> Result<_> {
        let reduced = reduce_to_qubit(state, q)?;
        validate_density(&reduced)?;
        Ok(effective_g_of_bloch(
            bloch_components(&reduced),
            cfg.assignment,
        ))
    };
    let a0 = qubit_g(&rho0, QUBIT_A)?;
    let b0 = qubit_g(&rho0, QUBIT_B)?;
    let a = qubit_g(&rho, QUBIT_A)?;
    let b = qubit_g(&rho, QUBIT_B)?;

    let trend_a = Trend::of(a0.g, a.g, cfg.class_tol);
    let trend_b = Trend::of(b0.g, b.g, cfg.class_tol);
    let anomalous = a.g < 0.0
        || b.g < 0.0
        || a.coherence > cfg.coherence_tol
        || b.coherence > cfg.coherence_tol;
    let class = if anomalous {
        PhaseClass::Anomalous
    } else {
        match (trend_a, trend_b) {
            (Trend::Cooled, Trend::Cooled) => PhaseClass::BothCool,
            (Trend::Cooled, Trend::Heated) => PhaseClass::ACoolBHeat,
            (Trend::Heated, Trend::Cooled) => PhaseClass::AHeatBCool,
            (Trend::Heated, Trend::Heated) => PhaseClass::BothHeat,
            // A qubit that neither heated nor cooled fits no phase.
            _ => PhaseClass::Anomalous,
        }
    };
    Ok(PhaseCell {
        g1,
        g2,
        t_bath_a: temperature_from_g(g1)?,
        t_bath_b: temperature_from_g(g2)?,
        ga_init: a0.g,
        gb_init: b0.g,
        ga_final: a.g,
        gb_final: b.g,
        coher_a: a.coherence,
        coher_b: b.coherence,
        trend_a,
        trend_b,
        class,
    })
}

/// Classifies every (g₁, g₂) grid point; g₁ is the outer (slow) index.
///
/// Cells run in parallel but the result order is fixed by the grid.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<PhaseCell>> {
    cfg.validate()?;
    let u = propagator(cfg, cfg.t_final)?;
    let g1s = grid_values(cfg.g1_range, cfg.grid_n);
    let g2s = grid_values(cfg.g2_range, cfg.grid_n);
    let n = cfg.grid_n;
    let results: Vec<Result<PhaseCell>> = (0..n * n)
        .into_par_iter()
        .map(|idx| classify_with_propagator(cfg, &u, g1s[idx / n], g2s[idx % n]))
        .collect();
    results
        .into_iter()
        .enumerate()
        .map(|(idx, r)| {
            r.map_err(|e| Error::CellFailed {
                row: idx / n,
                col: idx % n,
                source: Box::new(e),
            })
        })
        .collect()
}
