use std::process::{Command, Output};

use serde_json::Value;

fn pqbern(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pqbern"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn pq_table_values() {
    let o = pqbern(&["pq", "--n", "3", "--p", "1", "--q", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("k,pq_integer,pq_factorial,pq_binomial,node")
    );
    let last: Vec<&str> = lines.last().unwrap().split(',').collect();
    assert_eq!(last[0], "3");
    assert_eq!(last[1].parse::<f64>().unwrap(), 1.75);
    assert_eq!(last[2].parse::<f64>().unwrap(), 2.625);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(pqbern(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        pqbern(&["moments", "--n", "0", "--p", "0.9", "--q", "0.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        pqbern(&["pq", "--n", "3", "--p", "0.5", "--q", "0.9"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        pqbern(&["eval", "--f", "x +", "--n", "4", "--schedule", "i"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        pqbern(&["korovkin", "--f", "quad", "--grid", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(pqbern(&["--help"]).status.code(), Some(0));
}

#[test]
fn help_lists_columns() {
    let o = pqbern(&["korovkin", "--help"]);
    assert!(stdout(&o).contains("sup_error"));
}

#[test]
fn moments_agree_and_exit_zero() {
    for cmd in ["moments", "central-moments"] {
        let o = pqbern(&[cmd, "--n", "12", "--p", "0.9", "--q", "0.6"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}");
    }
}

#[test]
fn failed_certificate_exits_one_with_counterexample() {
    let o = pqbern(&[
        "certify",
        "--theorem",
        "complete-modulus",
        "--f",
        "quad",
        "--schedule",
        "i",
        "--degrees",
        "64",
        "--modulus-grid",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    assert!(
        row.starts_with("complete-modulus,quad,i,64,64,fail,"),
        "{row}"
    );
    assert!(row.contains("counterexample at (0.02, 0.84)"), "{row}");
}

#[test]
fn unmet_hypotheses_are_skipped_not_failed() {
    let o = pqbern(&[
        "certify",
        "--theorem",
        "c1,lipschitz",
        "--f",
        "vee",
        "--degrees",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows
        .iter()
        .all(|r| r.contains(",skip,") && r.contains("hypothesis not met")));
}

#[test]
fn json_mirrors_csv() {
    let args = ["korovkin", "--f", "ripple", "--degrees", "8,16"];
    let csv = stdout(&pqbern(&args));
    let mut json_args = args.to_vec();
    json_args.push("--json");
    let doc: Value = serde_json::from_str(&stdout(&pqbern(&json_args))).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["command"], "korovkin");
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let columns: Vec<&str> = doc["columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    assert_eq!(header, columns);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), csv.lines().count() - 1);
    let sup = columns.iter().position(|c| *c == "sup_error").unwrap();
    let first: f64 = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(sup)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(rows[0][sup].as_f64().unwrap(), first);
}

#[test]
fn out_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eval.csv");
    let args = [
        "eval",
        "--f",
        "sin(pi*x)*y",
        "--n",
        "10",
        "--schedule",
        "ii",
        "--grid",
        "4",
    ];
    let direct = pqbern(&args).stdout;
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let o = pqbern(&with_out);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct);
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let args = [
        "certify",
        "--f",
        "ripple",
        "--schedule",
        "ii",
        "--degrees",
        "8,16",
    ];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_pqbern"))
            .args(args)
            .env("PQB_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn voronovskaja_accepts_expressions_with_finite_differences() {
    let o = pqbern(&["voronovskaja", "--f", "x^2+y^2", "--degrees", "1024,2048"]);
    assert_eq!(o.status.code(), Some(0));
    let quad = pqbern(&["voronovskaja", "--f", "quad", "--degrees", "1024,2048"]);
    assert_eq!(quad.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), stdout(&quad).lines().count());
}

#[test]
fn selftest_passes() {
    let o = pqbern(&["selftest"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains(",fail,"));
    assert!(text.contains("documented"));
}
