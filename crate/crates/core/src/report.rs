//! Text and image encodings of results. Numbers are written with 17
//! significant digits in scientific notation; lines end with `\n`.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::fourqubit::PhaseCell;
use crate::master::ThermalizationSample;

pub const THERMALIZE_HEADER: &str = "t,r1,r2,r3,g_eff,T_eff,trace_dist_to_thermal";
pub const SWEEP_HEADER: &str =
    "g1,g2,T_bath_A,T_bath_B,gA_init,gB_init,gA_final,gB_final,coherA,coherB,class";
pub const NONMARKOV_HEADER: &str = "t,trace_distance,increasing";

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_row(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

pub fn thermalize_csv(samples: &[ThermalizationSample]) -> String {
    let mut out = format!("{THERMALIZE_HEADER}\n");
    for s in samples {
        let nums = [
            s.t,
            s.r.r1,
            s.r.r2,
            s.r.r3,
            s.g_eff,
            s.t_eff,
            s.dist_to_thermal,
        ];
        push_row(&mut out, &nums.map(fmt_num));
    }
    out
}

pub fn sweep_csv(cells: &[PhaseCell]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for c in cells {
        let mut fields: Vec<String> = [
            c.g1, c.g2, c.t_bath_a, c.t_bath_b, c.ga_init, c.gb_init, c.ga_final, c.gb_final,
            c.coher_a, c.coher_b,
        ]
        .iter()
        .map(|&x| fmt_num(x))
        .collect();
        fields.push(c.class.token().to_string());
        push_row(&mut out, &fields);
    }
    out
}

pub fn nonmarkov_csv(times: &[f64], distances: &[f64], increasing: &[bool]) -> Result<String> {
    if times.len() != distances.len() || times.len() != increasing.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} times, {} distances, {} flags",
            times.len(),
            distances.len(),
            increasing.len()
        )));
    }
    let mut out = format!("{NONMARKOV_HEADER}\n");
    for ((t, d), up) in times.iter().zip(distances).zip(increasing) {
        let _ = writeln!(out, "{},{},{}", fmt_num(*t), fmt_num(*d), u8::from(*up));
    }
    Ok(out)
}

/// Binary P6 image of an n×n sweep in grid order (g₁ outer). Column index is
/// g₂; row 0 holds the largest g₁.
pub fn phase_ppm(cells: &[PhaseCell], n: usize) -> Result<Vec<u8>> {
    if n == 0 || cells.len() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "{} cells do not form a {n}x{n} grid",
            cells.len()
        )));
    }
    let mut out = format!("P6\n{n} {n}\n255\n").into_bytes();
    for row in 0..n {
        let g1_index = n - 1 - row;
        for col in 0..n {
            out.extend_from_slice(&cells[g1_index * n + col].class.rgb());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourqubit::{PhaseClass, Trend};
    use crate::master::thermalization_trace;
    use crate::thermo::{BlochVector, ThermalParam};

    fn cell(g1: f64, g2: f64, class: PhaseClass) -> PhaseCell {
        PhaseCell {
            g1,
            g2,
            t_bath_a: 1.0,
            t_bath_b: 1.0,
            ga_init: 0.0,
            gb_init: 0.0,
            ga_final: 0.0,
            gb_final: 0.0,
            coher_a: 0.0,
            coher_b: 0.0,
            trend_a: Trend::Unchanged,
            trend_b: Trend::Unchanged,
            class,
        }
    }

    #[test]
    fn number_format_has_17_digits() {
        assert_eq!(fmt_num(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_num(-1.0 / 3.0), "-3.3333333333333331e-1");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn thermalize_rows() {
        let th = ThermalParam::new(0.5, 1.0).unwrap();
        let s = thermalization_trace(BlochVector::new(0.0, 0.0, 1.0), &th, 30.0, 4).unwrap();
        let csv = thermalize_csv(&s);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], THERMALIZE_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(!csv.contains('\r'));
        let r3: f64 = lines[4].split(',').nth(3).unwrap().parse().unwrap();
        assert!((r3 + 0.5).abs() < 1e-12);
    }

    #[test]
    fn ppm_layout() {
        let cells = vec![
            cell(0.1, 0.1, PhaseClass::BothCool),
            cell(0.1, 0.9, PhaseClass::ACoolBHeat),
            cell(0.9, 0.1, PhaseClass::BothHeat),
            cell(0.9, 0.9, PhaseClass::Anomalous),
        ];
        let img = phase_ppm(&cells, 2).unwrap();
        let header = b"P6\n2 2\n255\n";
        assert_eq!(&img[..header.len()], header);
        assert_eq!(
            &img[header.len()..],
            &[255, 0, 0, 128, 128, 128, 0, 0, 255, 0, 255, 0]
        );
        assert!(phase_ppm(&cells, 3).is_err());
    }

    #[test]
    fn sweep_and_nonmarkov_csv() {
        let csv = sweep_csv(&[cell(0.5, 0.5, PhaseClass::BothHeat)]);
        assert!(csv.starts_with(SWEEP_HEADER));
        assert!(csv.ends_with(",both_heat\n"));
        let nm = nonmarkov_csv(&[0.0, 1.0], &[1.0, 0.5], &[false, false]).unwrap();
        assert_eq!(
            nm.lines().nth(1).unwrap(),
            "0.0000000000000000e0,1.0000000000000000e0,0"
        );
        assert!(nonmarkov_csv(&[0.0], &[], &[]).is_err());
    }
}
