use proptest::prelude::*;
use qtherm_core::linalg::trace_norm;
use qtherm_core::nonmarkov::{
    f_of_t, nonmarkov_witness, reduced_state_a, reduced_state_a_brute_force, trace_distance_a,
    transverse_factor, uniform_grid, DephasingSpec,
};
use qtherm_core::BlochVector;

fn bloch() -> impl Strategy<Value = BlochVector> {
    (0.0f64..=1.0, -1.0f64..=1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, z, phi)| {
        let s = (1.0 - z * z).sqrt();
        BlochVector::new(r * s * phi.cos(), r * s * phi.sin(), r * z)
    })
}

fn spec() -> impl Strategy<Value = DephasingSpec> {
    (-3.0f64..3.0, -1.0f64..=1.0).prop_map(|(w, gz)| DephasingSpec::constant(w, gz).unwrap())
}

fn table_spec() -> impl Strategy<Value = DephasingSpec> {
    (prop::collection::vec(-2.0f64..2.0, 2..20), -1.0f64..=1.0).prop_map(|(values, gz)| {
        let times = (0..values.len()).map(|k| 0.5 * k as f64).collect();
        DephasingSpec::table(times, values, gz).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closed_form_matches_joint_evolution(r in bloch(), s in prop_oneof![spec(), table_spec()], u in 0.0f64..1.0) {
        let t = match &s.omega {
            qtherm_core::nonmarkov::Omega::Table { times, .. } => u * times.last().unwrap(),
            _ => 10.0 * u,
        };
        let closed = reduced_state_a(r, &s, t).unwrap();
        let brute = reduced_state_a_brute_force(r, &s, t).unwrap();
        prop_assert!(closed.max_abs_diff(&brute) < 1e-12);
    }

    #[test]
    fn distance_matches_trace_norm(r in bloch(), q in bloch(), s in spec(), t in 0.0f64..10.0) {
        let d = trace_distance_a(r, q, &s, t).unwrap();
        let diff = &reduced_state_a(r, &s, t).unwrap() - &reduced_state_a(q, &s, t).unwrap();
        prop_assert!((d - trace_norm(&diff).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn derivative_sign_follows_sin_4f(r in bloch(), q in bloch(), s in spec(), t in 0.05f64..10.0) {
        let h = 1e-5;
        let d2 = |t: f64| trace_distance_a(r, q, &s, t).unwrap().powi(2);
        let numeric = (d2(t + h) - d2(t - h)) / (2.0 * h);
        let f = f_of_t(&s, t).unwrap();
        let w = s.omega_at(t).unwrap();
        let transverse = (r.r1 - q.r1).powi(2) + (r.r2 - q.r2).powi(2);
        let predicted = -2.0 * (4.0 * f).sin() * w * (1.0 - s.g_z * s.g_z) * transverse;
        prop_assume!(predicted.abs() > 1e-4);
        prop_assert_eq!(numeric.signum(), predicted.signum());
        prop_assert!((numeric - predicted).abs() < 1e-6 * (1.0 + predicted.abs()));
    }

    #[test]
    fn unit_bath_polarization_freezes_distance(r in bloch(), q in bloch(), w in -3.0f64..3.0, sign in prop::bool::ANY) {
        let s = DephasingSpec::constant(w, if sign { 1.0 } else { -1.0 }).unwrap();
        let grid = uniform_grid(5.0, 501).unwrap();
        prop_assert!(nonmarkov_witness(r, q, &s, &grid).unwrap().is_empty());
    }
}

#[test]
fn no_convergence_to_a_fixed_state() {
    let s = DephasingSpec::constant(1.0, 0.5).unwrap();
    // |factor| oscillates between |g_z| and 1 forever.
    let late: Vec<f64> = (0..2000)
        .map(|k| {
            transverse_factor(&s, 1000.0 + 0.01 * k as f64)
                .unwrap()
                .norm()
        })
        .collect();
    let max = late.iter().cloned().fold(f64::MIN, f64::max);
    let min = late.iter().cloned().fold(f64::MAX, f64::min);
    assert!(max > 0.99 && min < 0.51);
}

#[test]
fn transverse_pairs_follow_abs_cos_2t() {
    let s = DephasingSpec::constant(1.0, 0.0).unwrap();
    let r = BlochVector::new(1.0, 0.0, 0.0);
    let q = BlochVector::new(-1.0, 0.0, 0.0);
    for k in 0..100 {
        let t = 0.05 * k as f64;
        let d = trace_distance_a(r, q, &s, t).unwrap();
        assert!((d - 2.0 * (2.0 * t).cos().abs()).abs() < 1e-12);
    }
}
