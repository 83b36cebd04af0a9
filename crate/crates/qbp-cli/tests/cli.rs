//! End-to-end tests of the `qbp` binary.

use std::fs;
use std::process::Command;

fn qbp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qbp"))
}

#[test]
fn simulate_smoke_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let status = qbp()
        .args([
            "simulate", "--code", "planar", "-L", "7", "--decoder", "ewainit", "--alpha", "0.8",
            "--schedule", "parallel", "--p", "0.05", "--trials", "200", "--seed", "7", "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("code,name,L,N,K,decoder,schedule,alpha"));
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields[0], "planar");
    assert_eq!(fields[1], "planar-L7");
    assert_eq!(fields[2], "7");
    assert_eq!(fields[3], "85");
    assert_eq!(fields[4], "1");
    assert_eq!(fields[5], "ewainit");
    assert_eq!(fields[16], "200");
}

#[test]
fn simulate_grid_shape_matches_sweep() {
    // 3 lattice sizes x 8 p values -> 24 rows
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let status = qbp()
        .args([
            "simulate", "--code", "toric", "-L", "4,6,8", "--decoder", "ewainit", "--schedule",
            "serial", "--p", "0.02:0.16:0.02", "--trials", "5", "--seed", "1", "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 8);
}

#[test]
fn simulate_decodes_a_loaded_code_file() {
    let dir = tempfile::tempdir().unwrap();
    let code_path = dir.path().join("mycode.q4");
    fs::write(
        &code_path,
        "# ring of four Z checks\nQCODE4 4 4\n0:Z 1:Z\n1:Z 2:Z\n2:Z 3:Z\n3:Z 0:Z\n",
    )
    .unwrap();
    let out = dir.path().join("file.csv");
    let status = qbp()
        .args(["simulate", "--code"])
        .arg(format!("file:{}", code_path.display()))
        .args(["--decoder", "plain", "--p", "0.01", "--trials", "50", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("file,mycode,,4,1,plain"));
}

#[test]
fn simulate_rejects_bad_flags() {
    let status = qbp()
        .args([
            "simulate", "--code", "planar", "-L", "3", "--decoder", "nosuch", "--p", "0.05",
            "--trials", "10",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let status = qbp()
        .args([
            "simulate", "--code", "planar", "-L", "3", "--decoder", "plain", "--p",
            "0.05:0.01:0.01", "--trials", "10",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // missing code file
    let status = qbp()
        .args([
            "simulate", "--code", "file:/nonexistent.q4", "--decoder", "plain", "--p", "0.05",
            "--trials", "10",
        ])
        .status()
        .unwrap();
    assert_ne!(status.code(), Some(0));
}

#[test]
fn byte_identical_output_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let out = dir.path().join(format!("w{workers}.csv"));
        let json = dir.path().join(format!("w{workers}.json"));
        let status = qbp()
            .args([
                "simulate", "--code", "planar", "-L", "5", "--decoder", "ewainit", "--alpha",
                "0.8", "--p", "0.08,0.12", "--trials", "600", "--seed", "33", "--workers",
                workers, "--no-timing", "--out",
            ])
            .arg(&out)
            .arg("--json")
            .arg(&json)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push((fs::read(&out).unwrap(), fs::read(&json).unwrap()));
    }
    assert_eq!(outputs[0].0, outputs[1].0, "CSV bytes differ across workers");
    // JSON embeds the command line (worker flag differs); compare results only
    let parse = |bytes: &[u8]| -> serde_json::Value {
        serde_json::from_slice::<serde_json::Value>(bytes).unwrap()["results"].clone()
    };
    assert_eq!(parse(&outputs[0].1), parse(&outputs[1].1));
}

#[test]
fn trap_default_prints_table() {
    let output = qbp().args(["trap"]).output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    for name in ["LLR-BP4", "MBP", "BP-OTS", "EWAInit-BP", "AdaGrad-BP", "Momentum-BP"] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
    assert!(text.contains("no conv"));
    assert!(text.contains("iter="));
}

#[test]
fn trap_single_decoder_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let output = qbp()
        .args([
            "trap", "--decoder", "adagrad", "--alpha", "5", "--schedule", "parallel", "--trace",
        ])
        .arg(&trace)
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("iteration,qubit,q_x,q_y,q_z,decision"));
    // four qubits per iteration
    assert_eq!((text.lines().count() - 1) % 4, 0);
}

#[test]
fn trap_short_horizon_reports_oscillation() {
    let output = qbp()
        .args(["trap", "--decoder", "plain", "--schedule", "parallel", "--iter-max", "10"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("not converged in 10 iterations"), "{text}");
    assert!(text.contains("oscillation = 2"), "{text}");
}

#[test]
fn codeinfo_planar() {
    let output = qbp().args(["codeinfo", "--code", "planar", "-L", "3"]).output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("[[13, 1, ?]] valid"), "{text}");
}

#[test]
fn codeinfo_xzzx() {
    let output = qbp().args(["codeinfo", "--code", "xzzx", "-L", "4"]).output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("[[16, 2, ?]] valid"), "{text}");
    // odd lattices carry a single logical qubit on the periodic layout
    let output = qbp().args(["codeinfo", "--code", "xzzx", "-L", "5"]).output().unwrap();
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("[[25, 1, ?]] valid"), "{text}");
}

#[test]
fn codeinfo_invalid_file_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.q4");
    // two single-qubit checks that anticommute
    fs::write(&path, "QCODE4 2 2\n0:X 1:X\n0:Z 1:X\n").unwrap();
    let output = qbp()
        .args(["codeinfo", "--code"])
        .arg(format!("file:{}", path.display()))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("INVALID"), "{text}");
}
