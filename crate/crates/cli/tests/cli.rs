use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::PathBuf;
use std::process::{Command, Output};

fn qtherm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtherm"))
        .args(args)
        .env("QTHERM_THREADS", "2")
        .output()
        .expect("failed to run qtherm")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn field(line: &str, k: usize) -> f64 {
    line.split(',').nth(k).unwrap().parse().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qtherm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn thermalize_relaxes_to_thermal_state() {
    let o = qtherm(&[
        "thermalize",
        "--gamma",
        "1",
        "--g",
        "0.5",
        "--t-max",
        "30",
        "--samples",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "t,r1,r2,r3,g_eff,T_eff,trace_dist_to_thermal");
    assert_eq!(lines.len(), 5);
    assert!((field(lines[4], 3) + 0.5).abs() < 1e-10);
    assert!(field(lines[4], 6) < 1e-6);
}

#[test]
fn thermalize_at_t_zero_is_initial_state() {
    let o = qtherm(&["thermalize", "--t-max", "0", "--r0", "0.2,-0.1,0.3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(field(lines[1], 1), 0.2);
    assert_eq!(field(lines[1], 2), -0.1);
    assert_eq!(field(lines[1], 3), 0.3);
}

#[test]
fn invalid_flag_values_exit_one_and_name_the_flag() {
    let o = qtherm(&["thermalize", "--g", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--g"));
    let o = qtherm(&["phase-diagram", "--init", "ket11"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--init"));
    let o = qtherm(&["nonmarkov", "--gz", "1.2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--gz"));
    assert_eq!(qtherm(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(
        qtherm(&["thermalize", "--gamma", "abc"]).status.code(),
        Some(1)
    );
}

#[test]
fn unwritable_output_fails() {
    let o = qtherm(&["thermalize", "--out", "/nonexistent-dir/x.csv"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn channel_verify_passes_and_catches_corruption() {
    assert_eq!(qtherm(&["channel-verify"]).status.code(), Some(0));
    let o = qtherm(&["channel-verify", "--t", "0"]);
    assert_eq!(o.status.code(), Some(0));
    for line in stdout(&o).lines().filter(|l| l.contains("distance")) {
        let d: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
        assert!(d < 1e-14, "{line}");
    }
    let o = qtherm(&["channel-verify", "--corrupt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("thermalizer choi distance"));
}

#[test]
fn phase_diagram_degenerate_grid() {
    let o = qtherm(&[
        "phase-diagram",
        "--init",
        "ket00",
        "--grid",
        "2",
        "--g-min",
        "0.5",
        "--g-max",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "g1,g2,T_bath_A,T_bath_B,gA_init,gB_init,gA_final,gB_final,coherA,coherB,class"
    );
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| *l == lines[1]));
}

#[test]
fn bell_equals_pure_at_quarter_pi() {
    let bell = qtherm(&["phase-diagram", "--init", "bell", "--grid", "6"]);
    let pure = qtherm(&[
        "phase-diagram",
        "--init",
        "pure:0.25pi,0.5pi,0.5pi",
        "--grid",
        "6",
    ]);
    assert_eq!(bell.status.code(), Some(0));
    let (b, p) = (stdout(&bell), stdout(&pure));
    for (lb, lp) in b.lines().zip(p.lines()).skip(1) {
        assert_eq!(lb.rsplit(',').next(), lp.rsplit(',').next());
        for k in 0..10 {
            assert!((field(lb, k) - field(lp, k)).abs() < 1e-12);
        }
    }
}

#[test]
fn phase_diagram_output_is_deterministic_with_tokens_and_ppm() {
    let csv = scratch("sweep.csv");
    let ppm = scratch("sweep.ppm");
    let args = [
        "phase-diagram",
        "--init",
        "thermal:0.1,0.1",
        "--grid",
        "16",
        "--out",
        csv.to_str().unwrap(),
        "--ppm",
        ppm.to_str().unwrap(),
    ];
    assert_eq!(qtherm(&args).status.code(), Some(0));
    let first = std::fs::read(&csv).unwrap();
    let image = std::fs::read(&ppm).unwrap();
    assert_eq!(qtherm(&args).status.code(), Some(0));
    assert_eq!(first, std::fs::read(&csv).unwrap());
    assert_eq!(image, std::fs::read(&ppm).unwrap());

    let text = String::from_utf8(first).unwrap();
    assert!(!text.contains('\r'));
    let tokens = [
        "both_cool",
        "a_cool_b_heat",
        "a_heat_b_cool",
        "both_heat",
        "anomalous",
    ];
    assert!(text
        .lines()
        .skip(1)
        .all(|l| tokens.contains(&l.rsplit(',').next().unwrap())));
    assert_eq!(text.lines().count(), 257);

    let header = b"P6\n16 16\n255\n";
    assert_eq!(&image[..header.len()], header);
    assert_eq!(image.len(), header.len() + 16 * 16 * 3);
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_qtherm"))
            .args(["phase-diagram", "--init", "bell", "--grid", "8"])
            .env("QTHERM_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn time_ordered_propagator_flag() {
    let o = qtherm(&[
        "phase-diagram",
        "--grid",
        "2",
        "--t-final",
        "1",
        "--propagator",
        "time-ordered",
        "--steps",
        "2000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 5);
}

#[test]
fn nonmarkov_unit_polarization_never_increases() {
    let o = qtherm(&["nonmarkov", "--gz", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().skip(1).all(|l| l.ends_with(",0")));
    assert!(stderr(&o).contains("increasing intervals: []"));
}

#[test]
fn nonmarkov_first_interval() {
    let csv = scratch("nm.csv");
    let o = qtherm(&[
        "nonmarkov",
        "--gz",
        "0.5",
        "--omega",
        "const:1",
        "--t-max",
        "3.2",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<(f64, bool)> = text
        .lines()
        .skip(1)
        .map(|l| (field(l, 0), l.ends_with(",1")))
        .collect();
    let step = rows[1].0 - rows[0].0;
    let start = rows.iter().position(|r| r.1).unwrap();
    let end = start + rows[start..].iter().position(|r| !r.1).unwrap();
    assert!((rows[start].0 - FRAC_PI_4).abs() <= step);
    assert!((rows[end].0 - FRAC_PI_2).abs() <= step);
    assert!(stdout(&o).starts_with("increasing intervals: [(0.785"));
}

#[test]
fn nonmarkov_zero_polarization_is_abs_cos() {
    let o = qtherm(&[
        "nonmarkov",
        "--gz",
        "0",
        "--omega",
        "const:1",
        "--t-max",
        "3",
        "--grid",
        "31",
    ]);
    assert_eq!(o.status.code(), Some(0));
    for l in stdout(&o).lines().skip(1) {
        let (t, d) = (field(l, 0), field(l, 1));
        assert!((d - 2.0 * (2.0 * t).cos().abs()).abs() < 1e-12);
    }
}

#[test]
fn nonmarkov_omega_table() {
    let table = scratch("omega.csv");
    std::fs::write(&table, "t,omega\n0,1\n2,1\n4,1\n").unwrap();
    let spec = format!("table:{}", table.display());
    let from_table = qtherm(&[
        "nonmarkov",
        "--gz",
        "0.3",
        "--omega",
        &spec,
        "--t-max",
        "4",
        "--grid",
        "41",
    ]);
    let constant = qtherm(&[
        "nonmarkov",
        "--gz",
        "0.3",
        "--omega",
        "const:1",
        "--t-max",
        "4",
        "--grid",
        "41",
    ]);
    assert_eq!(from_table.status.code(), Some(0));
    assert_eq!(stdout(&from_table), stdout(&constant));
    let beyond = qtherm(&["nonmarkov", "--gz", "0.3", "--omega", &spec, "--t-max", "5"]);
    assert_eq!(beyond.status.code(), Some(1));
}
