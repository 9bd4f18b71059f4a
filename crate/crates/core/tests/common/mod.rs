//! Oracles shared by the integration tests.
#![allow(dead_code)]

/// Adaptive Simpson on [a, b].
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rule(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = rule(f, a, fa, m, fm);
        let (rm, frm, right) = rule(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = rule(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

/// ∫₀ᵗ f(s) ds with s = u², which removes the 1/√s endpoint singularity.
pub fn angle_by_quadrature(gamma: f64, t: f64) -> f64 {
    let f = |u: f64| {
        if u == 0.0 {
            // limit of 2u · γe^{−γu²/2} / (2√(1 − e^{−γu²})) as u → 0
            return gamma.sqrt();
        }
        let s = u * u;
        2.0 * u * gamma * (-gamma * s / 2.0).exp() / (2.0 * (1.0 - (-gamma * s).exp()).sqrt())
    };
    simpson(&f, 0.0, t.sqrt(), 1e-13)
}

use qtherm_core::BlochVector;
use rand::Rng;

/// Uniform point in the Bloch ball.
pub fn random_bloch(rng: &mut impl Rng) -> BlochVector {
    loop {
        let v = [0; 3].map(|_| rng.gen_range(-1.0..1.0));
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return BlochVector::from_array(v);
        }
    }
}
