//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::Instant;

use common::{angle_by_quadrature, random_bloch};
use qtherm_core::channel::{
    affine_from_params, ancilla_density, channel_from_unitary, choi_of, parametrized_unitary,
    ChannelParams,
};
use qtherm_core::fourqubit::{
    pair_swap_permutation, run_sweep, total_hbar, InitStateSpec, PhaseCell, PhaseClass,
    SweepConfig, Trend,
};
use qtherm_core::hamiltonian::{
    finite_difference_generator, h_th, integrated_angle, reconstruct_unitary_from_h,
    thermal_ancilla, thermal_unitary, ThermalizerSpec,
};
use qtherm_core::linalg::{eig_hermitian, exp_i_hermitian, trace_norm};
use qtherm_core::master::{affine_from_master, analytic_bloch, gad_identify, rk4_lindblad};
use qtherm_core::nonmarkov::{
    nonmarkov_witness, reduced_state_a, trace_distance_a, uniform_grid, DephasingSpec,
};
use qtherm_core::report::sweep_csv;
use qtherm_core::thermo::{bloch_to_density, density_to_bloch, thermal_state};
use qtherm_core::{BlochVector, ThermalParam};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn report(n: u32, pass: bool, detail: String) {
    println!(
        "criterion {n}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} failed: {detail}");
}

fn reference_inits() -> [InitStateSpec; 6] {
    [
        InitStateSpec::Ket00,
        InitStateSpec::BellPhiPlus,
        InitStateSpec::Pure {
            psi: 0.248 * PI,
            theta: FRAC_PI_2,
            phi: FRAC_PI_2,
        },
        InitStateSpec::ThermalPair { g_a: 0.1, g_b: 0.1 },
        InitStateSpec::ThermalPair {
            g_a: 1.0 / 30.0,
            g_b: 1.0 / 30.0,
        },
        InitStateSpec::ThermalPair {
            g_a: 1.0 / 50.0,
            g_b: 1.0 / 50.0,
        },
    ]
}

fn class_grid(cells: &[PhaseCell]) -> Vec<PhaseClass> {
    cells.iter().map(|c| c.class).collect()
}

#[test]
fn criterion_01_master_equation_rk4_oracle() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let r0 = random_bloch(&mut rng);
        let rho0 = bloch_to_density(r0).unwrap();
        for g in [0.1, 0.5, 0.9] {
            let th = ThermalParam::new(g, 1.0).unwrap();
            for t in [0.5, 2.0, 10.0] {
                let steps = (1000.0 * t) as usize;
                let numeric =
                    density_to_bloch(&rk4_lindblad(&rho0, &th, t, steps).unwrap()).unwrap();
                let exact = analytic_bloch(r0, &th, t).unwrap();
                for (a, b) in numeric.to_array().iter().zip(exact.to_array()) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        worst < 1e-8 && secs < 5.0,
        format!("max error {worst:.3e}, {secs:.2} s"),
    );
}

#[test]
fn criterion_02_steady_state() {
    let mut rng = StdRng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for gamma in [0.5, 1.0, 2.0] {
        for g in [0.0, 0.1, 0.5, 0.9, 1.0] {
            let th = ThermalParam::new(g, gamma).unwrap();
            let target = thermal_state(g).unwrap();
            let t = 30.0 / gamma;
            for _ in 0..5 {
                let r0 = random_bloch(&mut rng);
                let analytic = bloch_to_density(analytic_bloch(r0, &th, t).unwrap()).unwrap();
                let numeric = rk4_lindblad(&bloch_to_density(r0).unwrap(), &th, t, 30_000).unwrap();
                for rho in [analytic, numeric] {
                    worst = worst.max(trace_norm(&(&rho - &target)).unwrap());
                }
            }
        }
    }
    report(
        2,
        worst < 1e-6,
        format!("max trace norm to thermal {worst:.3e}"),
    );
}

#[test]
fn criterion_03_unitary_ancilla_closure() {
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let mut angle = || rng.gen_range(-PI..PI);
        let p = ChannelParams::new(angle(), angle(), angle(), angle(), angle(), 0.0)
            .map(|mut p| {
                p.lambda = rng.gen_range(0.0..=1.0);
                p
            })
            .unwrap();
        let sim = channel_from_unitary(
            &parametrized_unitary(&p),
            &ancilla_density(&p.ancilla()).unwrap(),
        )
        .unwrap();
        worst = worst.max(sim.choi().distance(&choi_of(&affine_from_params(&p))));
    }
    report(3, worst < 1e-10, format!("max Choi distance {worst:.3e}"));
}

#[test]
fn criterion_04_simulation_equivalence() {
    let mut worst = 0.0f64;
    let spec = ThermalizerSpec::canonical(1.0).unwrap();
    for t in [0.1, 1.0, 5.0] {
        for g in [0.2, 0.7] {
            let master = affine_from_master(&ThermalParam::new(g, 1.0).unwrap(), t).unwrap();
            let sim = channel_from_unitary(
                &thermal_unitary(&spec, t).unwrap(),
                &ancilla_density(&thermal_ancilla(g)).unwrap(),
            )
            .unwrap();
            worst = worst.max(sim.choi().distance(&choi_of(&master)));
        }
    }
    report(4, worst < 1e-10, format!("max Choi distance {worst:.3e}"));
}

#[test]
fn criterion_05_thermalizing_hamiltonian() {
    let spec = ThermalizerSpec::canonical(1.0).unwrap();
    let mut fd = 0.0f64;
    for t in [0.5, 1.0, 2.0] {
        let numeric = finite_difference_generator(&spec, t, 1e-4).unwrap();
        fd = fd.max(numeric.max_abs_diff(&h_th(&spec, t).unwrap()));
    }
    let product = reconstruct_unitary_from_h(&spec, 2.0, 100_000).unwrap();
    let pi_err = product.max_abs_diff(&thermal_unitary(&spec, 2.0).unwrap());
    let mut quad = 0.0f64;
    for gamma in [0.5, 1.0, 2.0] {
        for t in [0.1, 0.5, 1.0, 2.0, 10.0] {
            quad = quad
                .max((angle_by_quadrature(gamma, t) - integrated_angle(gamma, t).unwrap()).abs());
        }
    }
    report(
        5,
        fd < 1e-5 && pi_err < 1e-5 && quad < 1e-9,
        format!("finite difference {fd:.3e}, product integral {pi_err:.3e}, quadrature {quad:.3e}"),
    );
}

#[test]
fn criterion_06_gad_identification() {
    let mut worst_b = 0.0f64;
    let mut worst_p = 0.0f64;
    let mut p_below_half = true;
    for gamma in [0.3, 1.0, 4.0] {
        for g in [0.05, 0.2, 0.5, 0.8, 1.0] {
            for t in [0.1, 1.0, 5.0] {
                let ch = affine_from_master(&ThermalParam::new(g, gamma).unwrap(), t).unwrap();
                let gad = gad_identify(&ch).unwrap();
                let p = gad.p.unwrap();
                worst_b = worst_b.max((gad.b - (1.0 - (-gamma * t).exp())).abs());
                worst_p = worst_p.max((p - (1.0 - g) / 2.0).abs());
                p_below_half &= p < 0.5;
            }
        }
    }
    report(
        6,
        worst_b < 1e-12 && worst_p < 1e-12 && p_below_half,
        format!("B error {worst_b:.3e}, p error {worst_p:.3e}, p < 1/2: {p_below_half}"),
    );
}

#[test]
fn criterion_07_four_qubit_structure() {
    let cfg = SweepConfig {
        gamma1: 0.7,
        gamma2: 1.3,
        gamma3: 0.4,
        ..SweepConfig::default()
    };
    let hbar = total_hbar(&cfg, 1.0).unwrap();
    let eig = eig_hermitian(&hbar).unwrap();
    let rank = eig.eigenvalues.iter().filter(|l| l.abs() > 1e-10).count();
    let u = exp_i_hermitian(&hbar, 1.0).unwrap();
    let unitarity = u.unitary_deviation();

    let swapped = total_hbar(&cfg.pair_swapped(), 1.0).unwrap();
    let spec_swapped = eig_hermitian(&swapped).unwrap().eigenvalues;
    let spectrum = eig
        .eigenvalues
        .iter()
        .zip(&spec_swapped)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let p = pair_swap_permutation();
    let conj = p.matmul(&hbar).matmul(&p.dagger()).max_abs_diff(&swapped);
    report(
        7,
        rank == 12 && unitarity < 1e-10 && spectrum < 1e-12 && conj < 1e-12,
        format!("rank {rank}, unitarity {unitarity:.3e}, swap spectrum {spectrum:.3e}, swap conjugation {conj:.3e}"),
    );
}

#[test]
fn criterion_08_decoupled_limit() {
    let mut worst = 0.0f64;
    for init in [
        InitStateSpec::Ket00,
        InitStateSpec::ThermalPair { g_a: 0.3, g_b: 0.8 },
        InitStateSpec::ThermalPair { g_a: 0.1, g_b: 0.1 },
    ] {
        let cfg = SweepConfig {
            gamma3: 0.0,
            t_final: 1000.0,
            grid_n: 6,
            init,
            ..SweepConfig::default()
        };
        for c in run_sweep(&cfg).unwrap() {
            worst = worst
                .max((c.ga_final - c.g1).abs())
                .max((c.gb_final - c.g2).abs());
        }
    }
    report(
        8,
        worst < 1e-6,
        format!("max |g_final - g_bath| {worst:.3e}"),
    );
}

#[test]
fn criterion_09_phase_existence() {
    let start = Instant::now();
    let cells = run_sweep(&SweepConfig::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let a_cool = cells.iter().filter(|c| c.trend_a == Trend::Cooled).count();
    let a_heat = cells.iter().filter(|c| c.trend_a == Trend::Heated).count();
    let mut both_cool_in = Vec::new();
    for init in reference_inits() {
        let cfg = SweepConfig {
            init,
            ..SweepConfig::default()
        };
        let n = run_sweep(&cfg)
            .unwrap()
            .iter()
            .filter(|c| c.class == PhaseClass::BothCool)
            .count();
        if n > 0 {
            both_cool_in.push(format!("{init:?}: {n}"));
        }
    }
    report(
        9,
        a_cool > 0 && a_heat > 0 && !both_cool_in.is_empty() && secs < 60.0,
        format!(
            "ket00: {a_cool} A-cooling and {a_heat} A-heating cells in {secs:.2} s; both_cool cells: [{}]",
            both_cool_in.join("; ")
        ),
    );
}

#[test]
fn criterion_10_determinism_and_symmetry() {
    let mut identical = true;
    let mut symmetric = true;
    for init in [
        InitStateSpec::Ket00,
        InitStateSpec::BellPhiPlus,
        InitStateSpec::ThermalPair { g_a: 0.1, g_b: 0.1 },
    ] {
        let cfg = SweepConfig {
            init,
            ..SweepConfig::default()
        };
        assert!(init.is_swap_symmetric());
        let first = run_sweep(&cfg).unwrap();
        let second = run_sweep(&cfg).unwrap();
        identical &= sweep_csv(&first).as_bytes() == sweep_csv(&second).as_bytes();
        let n = cfg.grid_n;
        let classes = class_grid(&first);
        for i in 0..n {
            for j in 0..n {
                symmetric &= classes[i * n + j] == classes[j * n + i].swapped();
            }
        }
    }
    report(
        10,
        identical && symmetric,
        format!("byte-identical: {identical}, mirror-symmetric: {symmetric}"),
    );
}

#[test]
fn criterion_11_non_markovianity() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let r0 = random_bloch(&mut rng);
        let s0 = random_bloch(&mut rng);
        let spec =
            DephasingSpec::constant(rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..=1.0)).unwrap();
        let t = rng.gen_range(0.0..10.0);
        let closed = trace_distance_a(r0, s0, &spec, t).unwrap();
        let diff =
            &reduced_state_a(r0, &spec, t).unwrap() - &reduced_state_a(s0, &spec, t).unwrap();
        worst = worst.max((closed - trace_norm(&diff).unwrap()).abs());
    }

    let grid = uniform_grid(3.2, 3201).unwrap();
    let step = grid[1] - grid[0];
    let r0 = BlochVector::new(1.0, 0.0, 0.0);
    let s0 = BlochVector::new(-1.0, 0.0, 0.0);
    let half = DephasingSpec::constant(1.0, 0.5).unwrap();
    let first = nonmarkov_witness(r0, s0, &half, &grid)
        .unwrap()
        .first()
        .copied();
    let located =
        first.is_some_and(|(a, b)| (a - FRAC_PI_4).abs() <= step && (b - FRAC_PI_2).abs() <= step);
    let mut none_at_unit = true;
    for gz in [1.0, -1.0] {
        let spec = DephasingSpec::constant(1.0, gz).unwrap();
        none_at_unit &= nonmarkov_witness(r0, s0, &spec, &grid).unwrap().is_empty();
    }
    report(
        11,
        worst < 1e-12 && located && none_at_unit,
        format!(
            "oracle error {worst:.3e}, first interval {first:?}, none at |g_z| = 1: {none_at_unit}"
        ),
    );
}

#[test]
fn criterion_12_saturation() {
    let mut identical = true;
    for init in reference_inits() {
        let at = |t_final| {
            class_grid(
                &run_sweep(&SweepConfig {
                    init,
                    t_final,
                    ..SweepConfig::default()
                })
                .unwrap(),
            )
        };
        identical &= at(1000.0) == at(2000.0);
    }
    report(
        12,
        identical,
        format!("classes identical at t = 1000 and 2000: {identical}"),
    );
}
