//! The `abret` binary: outputs, report stability and the exit-code contract.

use std::process::{Command, Output};

use abelian_returns::analysis::{Caveat, LengthRange, Verdict, Witness};
use abelian_returns::report::{Format, Outcome, Payload, Report, RunConfig, Tool};
use abelian_returns::StabilizationPolicy;
use serde_json::Value;

const TM: &str = "morphic:0>01,1>10:seed=0";
const FIB: &str = "cf:1,1,...";
const PERIOD_24: &str = "periodic:001101001011001100110011";

fn abret(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abret"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = abret(&all);
    (
        serde_json::from_slice(&out.stdout).expect("json report"),
        out.status.code().unwrap(),
    )
}

#[test]
fn generate_examples() {
    for (source, len, expected) in [
        (TM, "16", "0110100110010110"),
        ("periodic:01", "4", "0101"),
        ("cf:1,1,1,1,1,1,1,1", "13", "0100101001001"),
    ] {
        let out = abret(&["generate", "--source", source, "--length", len]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(stdout(&out), format!("{expected}\n"));
    }
}

#[test]
fn returns_examples() {
    let (report, code) = json(&["returns", "--source", TM, "--target", "01"]);
    assert_eq!(code, 0);
    let entry = &report["payload"]["entries"][0];
    let reps: Vec<&str> = entry["classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["representative"].as_str().unwrap())
        .collect();
    assert_eq!(reps, ["0", "1", "01"]);
    assert_eq!(entry["stable"], true);

    let (report, code) = json(&["returns", "--source", "periodic:01", "--target", "0"]);
    assert_eq!(code, 0);
    assert_eq!(
        report["payload"]["entries"][0]["classes"][0]["representative"],
        "01"
    );
}

#[test]
fn all_lengths_on_fibonacci() {
    let (report, code) = json(&["returns", "--source", FIB, "--all-lengths", "--max", "10"]);
    assert_eq!(code, 0);
    let entries = report["payload"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 20);
    for e in entries {
        let k = e["classes"].as_array().unwrap().len();
        assert!((2..=3).contains(&k), "{e}");
    }
}

#[test]
fn all_lengths_on_periodic_word_is_a_violation() {
    let out = abret(&[
        "returns",
        "--source",
        "periodic:01",
        "--all-lengths",
        "--max",
        "3",
        "--policy",
        "256,2,4096",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn never_recurring_target_is_a_caveat() {
    let out = abret(&[
        "returns",
        "--source",
        "periodic:01",
        "--target",
        "00",
        "--policy",
        "256,2,4096",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("never recurs"));
}

#[test]
fn lexarray_examples() {
    let out = abret(&["lexarray", "--word", "0101001"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let grid: Vec<&str> = text.lines().take(7).collect();
    assert_eq!(
        grid,
        ["0010101", "0100101", "0101001", "0101010", "1001010", "1010010", "1010100"]
    );
    assert!(text.contains("balanced: true"));
    assert!(text.contains("column shift identity: true"));

    let (report, _) = json(&["lexarray", "--p", "1", "--q", "2"]);
    assert_eq!(
        report["payload"]["array"]["rows"],
        serde_json::json!(["01", "10"])
    );
    assert_eq!(report["payload"]["columnShift"], true);

    let out = abret(&["lexarray", "--p", "2", "--q", "7", "--format", "csv"]);
    assert!(stdout(&out).starts_with("row,word\n0,0001001\n"));

    let out = abret(&["lexarray", "--word", "0011010"]);
    assert!(stdout(&out).contains("column shift identity: false"));

    let out = abret(&["lexarray", "--p", "2", "--q", "6"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_exit_codes_on_canonical_sources() {
    let (report, code) = json(&["verify", "--source", FIB, "--theorem", "all", "--max", "25"]);
    assert_eq!(code, 0);
    let verdicts = report["payload"]["verdicts"].as_array().unwrap();
    assert_eq!(verdicts.len(), 5);
    assert!(verdicts.iter().all(|v| v["holds"] == true));

    let (report, code) = json(&["verify", "--source", TM, "--theorem", "main", "--max", "10"]);
    assert_eq!(code, 1);
    let verdict = &report["payload"]["verdicts"][0];
    assert_eq!(verdict["holds"], false);
    assert_eq!(verdict["witnesses"][0]["length"], 3);

    let (report, code) = json(&[
        "verify",
        "--source",
        PERIOD_24,
        "--theorem",
        "periodicity",
        "--max",
        "24",
    ]);
    assert_eq!(code, 0);
    let notes = report["payload"]["verdicts"][0]["notes"]
        .as_array()
        .unwrap();
    assert!(notes.contains(&Value::from("detected period 24")));
    assert!(notes.contains(&Value::from("minimum abelian return count 2")));
}

#[test]
fn reports_are_byte_stable() {
    for format in ["json", "csv", "text"] {
        let args = [
            "verify",
            "--source",
            TM,
            "--theorem",
            "all",
            "--max",
            "6",
            "--format",
            format,
        ];
        let (a, b) = (abret(&args), abret(&args));
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{format}");
    }
}

#[test]
fn report_echoes_its_configuration() {
    let (report, _) = json(&[
        "returns",
        "--source",
        "cf:1,1,…",
        "--target",
        "010",
        "--policy",
        "512,4,65536",
    ]);
    let config = &report["config"];
    assert_eq!(config["command"], "returns");
    assert_eq!(config["source"], "cf:1,1,...");
    assert_eq!(config["target"], "010");
    assert_eq!(config["maxFactorLength"], 10);
    assert_eq!(
        config["policy"],
        serde_json::json!({"initial": 512, "growth": 4, "cap": 65536})
    );
    assert_eq!(report["tool"]["name"], "abret");
    assert_eq!(report["payload"]["kind"], "returns");
}

#[test]
fn csv_rows_per_return_class() {
    let out = abret(&[
        "returns", "--source", TM, "--target", "01", "--format", "csv",
    ]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("factor_length,class,class_representative,return_length,return_class,return_representative,occurrences,stable,prefix_used")
    );
    assert_eq!(lines.count(), 3);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("abret-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = abret(&[
        "generate",
        "--source",
        "periodic:01",
        "--length",
        "4",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["payload"]["word"], "0101");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn usage_and_parse_errors_exit_3() {
    let out = abret(&["generate", "--source", "cf:1,x", "--length", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte 5"));

    assert_eq!(abret(&["generate", "--length", "3"]).status.code(), Some(3));
    assert_eq!(abret(&["returns", "--source", TM]).status.code(), Some(3));
    assert_eq!(
        abret(&["verify", "--source", TM, "--policy", "10,1,100"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        abret(&["generate", "--source", TM, "--length", "1000000000"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(abret(&["bogus"]).status.code(), Some(3));
    assert_eq!(abret(&["--help"]).status.code(), Some(0));
}

fn verify_report(verdict: Verdict) -> Report {
    Report {
        tool: Tool::default(),
        config: RunConfig {
            command: "verify".into(),
            source: None,
            max_factor_length: 1,
            policy: StabilizationPolicy::default(),
            format: Format::Json,
            out: None,
            length: None,
            target: None,
            all_lengths: false,
            word: None,
            p: None,
            q: None,
            theorem: None,
        },
        payload: Payload::Verify {
            verdicts: vec![verdict],
        },
        duration: Default::default(),
    }
}

#[test]
fn verdict_outcomes() {
    let clean = Verdict {
        theorem: "main".into(),
        holds: true,
        checked_lengths: LengthRange { from: 1, to: 1 },
        witnesses: Vec::new(),
        caveats: Vec::new(),
        notes: Vec::new(),
    };
    assert_eq!(verify_report(clean.clone()).outcome(), Outcome::Clean);

    let mut caveat = clean.clone();
    caveat.caveats.push(Caveat {
        length: 1,
        factor: "0".parse().unwrap(),
        reason: "unstable".into(),
    });
    assert_eq!(verify_report(caveat.clone()).outcome().code(), 2);

    let mut violation = caveat;
    violation.holds = false;
    violation.witnesses.push(Witness {
        length: 1,
        factor: "0".parse().unwrap(),
        observed: "1 abelian return".into(),
    });
    assert_eq!(verify_report(violation).outcome().code(), 1);
}
