//! Value parsers for command-line literals.

use std::f64::consts::PI;
use std::path::PathBuf;

use qtherm_core::fourqubit::InitStateSpec;
use qtherm_core::BlochVector;

/// Number, optionally as a multiple or fraction of π:
/// `0.3`, `0.248pi`, `0.5π`, `pi`, `pi/2`, `-π/4`.
pub fn angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let value = if let Some(rest) = body.strip_prefix("pi").or_else(|| body.strip_prefix('π')) {
        if rest.is_empty() {
            PI
        } else if let Some(den) = rest.strip_prefix('/') {
            PI / number(den)?
        } else {
            return Err(format!("cannot parse angle `{s}`"));
        }
    } else if let Some(coef) = body.strip_suffix("pi").or_else(|| body.strip_suffix('π')) {
        number(coef.trim_end_matches('*'))? * PI
    } else {
        number(body)?
    };
    Ok(if neg { -value } else { value })
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse number `{s}`"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

pub fn bloch(s: &str) -> Result<BlochVector, String> {
    let parts: Vec<f64> = s.split(',').map(number).collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [r1, r2, r3] => Ok(BlochVector::new(*r1, *r2, *r3)),
        _ => Err(format!(
            "expected three comma-separated components, got `{s}`"
        )),
    }
}

/// `ket00`, `bell`, `pure:ψ,θ,φ` or `thermal:gA,gB`.
pub fn init_state(s: &str) -> Result<InitStateSpec, String> {
    let spec = match s.split_once(':') {
        None if s == "ket00" => InitStateSpec::Ket00,
        None if s == "bell" => InitStateSpec::BellPhiPlus,
        Some(("pure", args)) => {
            let v: Vec<f64> = args.split(',').map(angle).collect::<Result<_, _>>()?;
            let [psi, theta, phi] = v[..] else {
                return Err(format!("pure state needs three angles, got `{args}`"));
            };
            InitStateSpec::Pure { psi, theta, phi }
        }
        Some(("thermal", args)) => {
            let v: Vec<f64> = args.split(',').map(number).collect::<Result<_, _>>()?;
            let [g_a, g_b] = v[..] else {
                return Err(format!("thermal pair needs two values, got `{args}`"));
            };
            InitStateSpec::ThermalPair { g_a, g_b }
        }
        _ => {
            return Err(format!(
                "unknown initial state `{s}` (expected ket00, bell, pure:psi,theta,phi or thermal:gA,gB)"
            ))
        }
    };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

#[derive(Debug, Clone, PartialEq)]
pub enum OmegaArg {
    Constant(f64),
    Table(PathBuf),
}

/// `const:ω₀` or `table:path` (CSV rows `t,omega`, optional header).
pub fn omega(s: &str) -> Result<OmegaArg, String> {
    match s.split_once(':') {
        Some(("const", v)) => Ok(OmegaArg::Constant(number(v)?)),
        Some(("table", p)) if !p.is_empty() => Ok(OmegaArg::Table(PathBuf::from(p))),
        _ => Err(format!("expected const:<value> or table:<path>, got `{s}`")),
    }
}

pub fn omega_table(text: &str) -> Result<(Vec<f64>, Vec<f64>), String> {
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((t, w)) = line.split_once(',') else {
            return Err(format!("line {}: expected `t,omega`", k + 1));
        };
        match (number(t), number(w)) {
            (Ok(t), Ok(w)) => {
                times.push(t);
                values.push(w);
            }
            // A non-numeric first row is a header.
            _ if times.is_empty() && k == 0 => {}
            (Err(e), _) | (_, Err(e)) => return Err(format!("line {}: {e}", k + 1)),
        }
    }
    Ok((times, values))
}
