use std::process::{Command, Output};

fn ffratios(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffratios"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column<'a>(csv: &'a str, name: &str) -> Vec<&'a str> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap()).collect()
}

#[test]
fn verify_fe_residuals_are_zero() {
    let o = ffratios(&["verify", "--q", "5", "--g", "2", "--checks", "fe"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(column(&out, "max_residual"), vec!["0.0"]);
    assert_eq!(column(&out, "cases"), vec!["2500"]);
}

#[test]
fn ratios_report_row() {
    let o = ffratios(&["ratios", "--q", "5", "--g", "2", "--alpha", "0.1", "--beta", "0.3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(column(&out, "statistic"), vec!["ratio"]);
    let rel: f64 = column(&out, "rel_err")[0].parse().unwrap();
    assert!(rel < 0.01, "{rel}");
    assert!(column(&out, "params")[0].contains("trunc_tol=1e-10"));
}

#[test]
fn trig_suite_within_bound() {
    let o = ffratios(&["boundslab", "--suite", "trig"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let diffs = column(&out, "diff");
    assert_eq!(diffs.len(), 120);
    assert!(diffs.iter().all(|d| d.parse::<f64>().unwrap().abs() <= 3.0));
}

#[test]
fn json_output_and_out_file() {
    let dir = std::env::temp_dir().join(format!("ffratios-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("primes.json");
    let o = ffratios(&["primes", "--q", "13", "--max-degree", "3", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"count\": \"728\""), "{text}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_file_is_merged_under_flags() {
    let dir = std::env::temp_dir().join(format!("ffratios-cfgt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "q = 13\ng = 1\nformat = csv\n").unwrap();
    let o = ffratios(&["primes", "--config", cfg.to_str().unwrap(), "--max-degree", "1"]);
    assert_eq!(stdout(&o), "q,degree,count\n13,1,13\n");
    let o = ffratios(&["primes", "--config", cfg.to_str().unwrap(), "--q", "5", "--max-degree", "1"]);
    assert_eq!(stdout(&o), "q,degree,count\n5,1,5\n");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    // usage errors
    assert_eq!(ffratios(&["verify", "--bogus"]).status.code(), Some(2));
    assert_eq!(ffratios(&["ratios", "--alpha", "0.1+", "--beta", "0.3"]).status.code(), Some(2));
    assert_eq!(ffratios(&["verify", "--mode", "sometimes"]).status.code(), Some(2));
    // precondition violations
    assert_eq!(ffratios(&["verify", "--q", "7", "--checks", "fe"]).status.code(), Some(1));
    let o = ffratios(&["lpoly", "--q", "5", "--D", "x^3+2*x^2+x"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    assert_eq!(ffratios(&["ratios", "--g", "1", "--alpha", "0.1", "--beta", "0.7"]).status.code(), Some(1));
    // a shift far below the window breaches the frozen negative-moment bound
    let o = ffratios(&["boundslab", "--suite", "scan", "--q", "5", "--genera", "2", "--beta", "0.001"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(ffratios(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_identical_across_thread_counts() {
    let runs: Vec<Vec<&str>> = vec![
        vec!["ratios", "--g", "3", "--alpha", "0.1", "--beta", "0.3", "--mode", "sample:3000", "--seed", "11"],
        vec!["twisted", "--g", "2", "--alpha", "0.1,-0.05", "--h", "x+1"],
        vec!["negmom", "--g", "2", "--beta", "0.2,0.3", "--t", "0.5"],
        vec!["boundslab", "--suite", "lb", "--g", "2"],
        vec!["verify", "--g", "2", "--checks", "rh,explicit", "--mode", "sample:500", "--seed", "4"],
    ];
    for args in runs {
        let outs: Vec<Vec<u8>> = ["1", "4", "8"]
            .iter()
            .map(|t| {
                let mut a = args.clone();
                a.extend(["--threads", t]);
                let o = ffratios(&a);
                assert_eq!(o.status.code(), Some(0), "{a:?}");
                o.stdout
            })
            .collect();
        assert_eq!(outs[0], outs[1], "{args:?}");
        assert_eq!(outs[0], outs[2], "{args:?}");
    }
}
