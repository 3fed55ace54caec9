use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ramsey(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramsey"))
        .args(args)
        .env("RAMSEY_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn first_line(s: &str) -> &str {
    s.lines().next().unwrap_or("")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn resonant_ramsey_run_succeeds() {
    let o = ramsey(&["ramsey"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["p_analytic"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v["abs_diff"].as_f64().unwrap() < 1e-9);
}

#[test]
fn csv_headers_are_stable() {
    let cases: [(&[&str], &str); 5] = [
        (&["ramsey", "--format", "csv"], "p_analytic,p_oracle,abs_diff"),
        (&["scan", "--grid-count", "16"], "omega,p_ex,source"),
        (&["fwhm"], "source,center,width,contrast,grid_spacing"),
        (
            &["optimize", "--alphas", "1"],
            "alpha,lambda_multiplier,theta_branch,t_star,alpha_t,residual,status",
        ),
        (&["cpi"], "x,p_c,p_r"),
    ];
    for (args, header) in cases {
        let o = ramsey(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        assert_eq!(first_line(&stdout(&o)), header, "{args:?}");
    }
}

#[test]
fn invalid_parameters_exit_with_one() {
    for args in [
        &["ramsey", "--alpha", "-0.1"][..],
        &["ramsey", "--theta", "0.1", "--omega", "0.1"],
        &["ramsey", "-T", "0"],
        &["scan", "--grid-count", "1"],
        &["scan", "--source", "magic"],
        &["cpi", "--d", "9"],
        &["cpi", "--initial-reading", "2"],
        &["no-such-command"],
    ] {
        let o = ramsey(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn numerical_failures_exit_with_two() {
    let o = ramsey(&["fwhm", "--grid-min", "-0.01", "--grid-max", "0.01"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("not bracketed"));
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_ramsey"))
        .arg("ramsey")
        .env("RAMSEY_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_values_apply_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", "[ramsey]\nalpha = 0.1\nT = 10\nformat = \"csv\"\n");

    let o = ramsey(&["--config", &cfg, "ramsey"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let row: Vec<f64> = stdout(&o).lines().nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    let expected = 0.5 * (1.0 + (-1.0f64).exp());
    assert!((row[0] - expected).abs() < 1e-12, "{row:?}");

    let o = ramsey(&["--config", &cfg, "ramsey", "--alpha", "0"]);
    let row: Vec<f64> = stdout(&o).lines().nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert!((row[0] - 1.0).abs() < 1e-12, "{row:?}");
}

#[test]
fn config_errors_name_their_location() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "unknown.toml", "[ramsey]\nalpha = 0.1\nbogus = 3\n");
    let o = ramsey(&["--config", &unknown, "ramsey"]);
    assert_eq!(o.status.code(), Some(1));
    let msg = stderr(&o);
    assert!(msg.contains("line 3") && msg.contains("bogus"), "{msg}");

    let negative = write(dir.path(), "negative.toml", "[ramsey]\n\nalpha = -0.5\n");
    let o = ramsey(&["--config", &negative, "ramsey"]);
    assert_eq!(o.status.code(), Some(1));
    let msg = stderr(&o);
    assert!(msg.contains("negative.toml:3") && msg.contains("alpha"), "{msg}");

    let o = ramsey(&["--config", "/definitely/not/here.toml", "ramsey"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let csv = dir.path().join(format!("scan-{tag}.csv"));
        let svg = dir.path().join(format!("scan-{tag}.svg"));
        let o = ramsey(&[
            "scan",
            "--alpha",
            "0.05",
            "--source",
            "both",
            "--grid-count",
            "64",
            "--out",
            csv.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        (fs::read(csv).unwrap(), fs::read(svg).unwrap())
    };
    let a = run("a");
    let b = run("b");
    assert!(!a.0.is_empty() && !a.1.is_empty());
    assert_eq!(a, b);
}

#[test]
fn optimize_rows_follow_grid_order() {
    let o = ramsey(&["optimize", "--alphas", "1,2", "--lambdas", "0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let cells: Vec<(String, String)> = out
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_owned(), f[2].to_owned())
        })
        .collect();
    assert_eq!(
        cells,
        [("1.0", "+"), ("1.0", "-"), ("2.0", "+"), ("2.0", "-")]
            .map(|(a, b)| (a.to_owned(), b.to_owned()))
    );
    assert!(stderr(&o).contains("summary:"));
}

#[test]
fn cpi_json_reports_agreement() {
    let o = ramsey(&["cpi", "--d", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["max_abs_diff"].as_f64().unwrap() <= 1e-8);
    assert_eq!(v["p_c"].as_array().unwrap().len(), 4);
}
