use std::path::Path;
use std::process::{Command, Output};

fn carmichael(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carmichael"))
        .args(args)
        .env_remove("CARMICHAEL_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_reports_clauses() {
    let o = carmichael(&["verify", "561"]);
    assert_eq!(stdout(&o), "561 carmichael\n");
    assert_eq!(o.status.code(), Some(0));

    let o = carmichael(&["verify", "562"]);
    assert_eq!(
        stdout(&o),
        "562 not-carmichael (not square-free or fewer than 3 factors: 2·281)\n"
    );
    assert_eq!(o.status.code(), Some(1));

    let o = carmichael(&["verify", "561", "1105", "1791562810662585767521"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn verify_reads_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("numbers.txt");
    std::fs::write(&file, "# header\n561 3 11 17\n1105\n\n7\n").unwrap();
    let o = carmichael(&["verify", "--file", path(&file)]);
    assert_eq!(
        stdout(&o),
        "561 carmichael\n1105 carmichael\n7 not-carmichael (prime)\n"
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["verify"][..],
        &["verify", "1.5"],
        &["enumerate", "--limit", "abc", "--out", "x"],
        &[
            "enumerate",
            "--limit",
            "1e6",
            "--min-factors",
            "5",
            "--max-factors",
            "4",
            "--out",
            "/nonexistent/x",
        ],
        &["enumerate", "--limit", "1e6", "--jobs", "0", "--out", "x"],
        &["smallest", "--factors", "2"],
        &["oracle", "--limit", "1e9"],
    ] {
        let o = carmichael(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn oracle_count() {
    let o = carmichael(&["oracle", "--limit", "1e4"]);
    assert_eq!(stdout(&o), "count=7\n");
}

#[test]
fn enumerate_equals_oracle_bytewise() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("enum.txt");
    let b = dir.path().join("oracle.txt");
    let o = carmichael(&["enumerate", "--limit", "1e7", "--out", path(&a)]);
    assert_eq!(stdout(&o), "count=105 limit=10000000\n");
    let o = carmichael(&["oracle", "--limit", "1e7", "--out", path(&b)]);
    assert_eq!(stdout(&o), "count=105\n");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn output_independent_of_jobs_and_mode() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, extra) in [
        &["--jobs", "1"][..],
        &["--jobs", "4"],
        &["--jobs", "16"],
        &["--jobs", "3", "--mode", "basic"],
        &["--jobs", "2", "--mode", "last-prime"],
    ]
    .iter()
    .enumerate()
    {
        let out = dir.path().join(format!("c{i}.txt"));
        let mut args = vec!["enumerate", "--limit", "2.5e9", "--out", path(&out)];
        args.extend_from_slice(extra);
        let o = carmichael(&args);
        assert_eq!(o.status.code(), Some(0), "{extra:?}");
        files.push(std::fs::read(&out).unwrap());
    }
    assert!(files.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn jobs_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.txt");
    let o = Command::new(env!("CARGO_BIN_EXE_carmichael"))
        .args(["enumerate", "--limit", "1e6", "--out", path(&out)])
        .env("CARMICHAEL_JOBS", "2")
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "count=43 limit=1000000\n");
    let o = Command::new(env!("CARGO_BIN_EXE_carmichael"))
        .args(["enumerate", "--limit", "1e6", "--out", path(&out)])
        .env("CARMICHAEL_JOBS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn smallest_prints_record_line() {
    let o = carmichael(&["smallest", "--factors", "10"]);
    assert_eq!(
        stdout(&o),
        "1436697831295441 11 13 19 29 31 37 41 43 71 127\n"
    );
}

#[test]
fn gzip_catalog_feeds_stats() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("c.txt.gz");
    let o = carmichael(&["enumerate", "--limit", "1e8", "--out", path(&cat)]);
    assert_eq!(stdout(&o), "count=255 limit=100000000\n");
    let out = dir.path().join("tables");
    let o = carmichael(&[
        "stats",
        "--input",
        path(&cat),
        "--tables",
        "counts,counts_by_d,residues",
        "--mod",
        "5,12",
        "--out-dir",
        path(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let counts = std::fs::read_to_string(out.join("counts.csv")).unwrap();
    assert_eq!(
        counts,
        "x,count\n1000,1\n10000,7\n100000,16\n1000000,43\n10000000,105\n100000000,255\n"
    );
    let by_d = std::fs::read_to_string(out.join("counts_by_d.csv")).unwrap();
    assert_eq!(by_d.lines().next().unwrap(), "x,d3,d4,d5,total");
    assert_eq!(by_d.lines().last().unwrap(), "100000000,84,144,27,255");
    let residues = std::fs::read_to_string(out.join("residues.txt")).unwrap();
    assert!(residues.lines().next().unwrap().starts_with("m"));
    assert!(out.join("counts.txt").exists());
    assert!(!out.join("primes.csv").exists());

    let o = carmichael(&[
        "stats",
        "--input",
        path(&cat),
        "--checkpoints",
        "1e9",
        "--out-dir",
        path(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stats_rejects_corrupt_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("bad.txt");
    std::fs::write(&cat, "# limit 1000\n# factors 3..3\n561 3 11 18\n").unwrap();
    let o = carmichael(&[
        "stats",
        "--input",
        path(&cat),
        "--out-dir",
        path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("561"));
}

#[test]
fn output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = carmichael(&["enumerate", "--limit", "1e9", "--out", path(&out)]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a.txt"), run("b.txt"));
}
