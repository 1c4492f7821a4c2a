use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qcurrent"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

#[test]
fn sweep_output_is_byte_identical_across_runs_and_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("sectors_vs_tau.toml");
    let mut outputs = Vec::new();
    for jobs in ["1", "4", "4"] {
        let out = dir.path().join(format!("out{}.csv", outputs.len()));
        let status = run(&[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--jobs",
            jobs,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(
            status.status.success(),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        outputs.push(std::fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn header_records_version_command_and_seed() {
    let out = run(&["continuum-check", "--seed", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        format!("# qcurrent-cli {}", env!("CARGO_PKG_VERSION"))
    );
    assert_eq!(lines.next().unwrap(), "# command: continuum-check");
    assert_eq!(lines.next().unwrap(), "# seed: 5");
    assert!(lines.next().unwrap().starts_with("n,band_error"));
}

#[test]
fn invariants_exit_zero_and_fault_exits_one() {
    let ok = run(&["invariants"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8(ok.stdout)
        .unwrap()
        .contains("detailed balance"));
    let bad = run(&["invariants", "--fault", "rate-sign"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8(bad.stdout).unwrap();
    let line = text
        .lines()
        .find(|l| l.contains("detailed balance"))
        .unwrap();
    assert!(line.ends_with("FAIL"), "{line}");
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.toml");
    assert_eq!(
        run(&["sweep", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[model]\ntau = 0.1\n").unwrap();
    let out = run(&["steady", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let text = std::fs::read_to_string(config("negativity_vs_phase.toml")).unwrap();
    std::fs::write(&bad, text.replace("tau = 0.1", "tau = -1.0")).unwrap();
    assert_eq!(
        run(&["steady", "--config", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn numerical_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("evolve.toml")).unwrap();
    let bad = dir.path().join("unstable.toml");
    std::fs::write(
        &bad,
        text.replace("dt = 0.05", "dt = 20.0")
            .replace("t_max = 50.0", "t_max = 200.0"),
    )
    .unwrap();
    let out = run(&["evolve", "--config", bad.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn matrix_file_initial_state_is_read() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("rho.txt");
    let rows: Vec<String> = (0..9)
        .map(|i| {
            (0..9)
                .map(|j| {
                    if i == j {
                        format!("{} 0", 1.0 / 9.0)
                    } else {
                        "0 0".into()
                    }
                })
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    std::fs::write(&state, rows.join("\n")).unwrap();
    let text = std::fs::read_to_string(config("negativity_vs_phase.toml")).unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(
        &cfg,
        text.replace(
            "maximally-mixed",
            &format!("matrix-file:{}", state.display()),
        ),
    )
    .unwrap();
    let from_file = run(&["steady", "--config", cfg.to_str().unwrap()]);
    assert!(
        from_file.status.success(),
        "{}",
        String::from_utf8_lossy(&from_file.stderr)
    );
    let mixed = run(&[
        "steady",
        "--config",
        config("negativity_vs_phase.toml").to_str().unwrap(),
    ]);
    let body = |o: &Output| {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(body(&from_file), body(&mixed));
}
