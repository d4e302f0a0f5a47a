use std::fs;
use std::process::{Command, Output};

use noma_aloha::{mixed_ne, GameConfig, NESolution};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noma-aloha"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn solve_reports_interior_equilibrium() {
    let v = json(&["solve", "--w", "2.5", "--k", "2", "--format", "json"]);
    assert_eq!(v["regime"], "Interior");
    assert!((v["strategy"]["a"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    assert!((v["strategy"]["b"].as_f64().unwrap() - 0.6).abs() < 1e-12);
    assert_eq!(v["w_star"].as_f64().unwrap(), 3.0);
}

#[test]
fn solve_low_reward_stays_silent() {
    let v = json(&["solve", "--w", "0.5", "--k", "2", "--format", "json"]);
    assert_eq!(v["regime"], "NoTransmit");
    assert_eq!(v["strategy"]["a"].as_f64().unwrap(), 0.0);
    assert_eq!(v["strategy"]["b"].as_f64().unwrap(), 0.0);
    assert_eq!(v["p0"].as_f64().unwrap(), 1.0);
    assert_eq!(v["pure_equilibria"], serde_json::json!([["0", "0"]]));
}

#[test]
fn solve_five_users() {
    let v = json(&["solve", "--w", "10", "--k", "5", "--format", "json"]);
    assert!((v["strategy"]["a"].as_f64().unwrap() - 0.33126).abs() < 1e-5);
    assert!((v["strategy"]["b"].as_f64().unwrap() - 0.43766).abs() < 1e-5);
}

#[test]
fn solve_json_round_trips_into_solution() {
    let out = run(&["solve", "--w", "7.3", "--k", "4", "--cost-h", "3", "--cost-l", "1.5", "--format", "json"]);
    assert!(out.status.success());
    let parsed: NESolution = serde_json::from_slice(&out.stdout).unwrap();
    let game = GameConfig::with_costs(4, 7.3, 3.0, 1.5).unwrap();
    assert_eq!(parsed, mixed_ne(&game));
}

#[test]
fn solve_table_and_csv() {
    let table = stdout(&run(&["solve", "--w", "5"]));
    assert!(table.contains("FullTransmit"));
    let (header, rows) = csv_rows(&stdout(&run(&["solve", "--w", "5", "--format", "csv"])));
    assert_eq!(rows.len(), 1);
    let regime = header.iter().position(|h| h == "regime").unwrap();
    assert_eq!(rows[0][regime], "FullTransmit");
}

#[test]
fn optimize_reports_poa() {
    let v = json(&["optimize", "--w", "5", "--format", "json"]);
    assert!((v["strategy"]["a"].as_f64().unwrap() - 0.3).abs() < 1e-12);
    assert!((v["poa"].as_f64().unwrap() - 0.8).abs() < 1e-12);
    let v = json(&["optimize", "--w", "0.5", "--format", "json"]);
    assert!(v["poa"].is_null());
}

#[test]
fn verify_equilibrium_and_counterexample() {
    let v = json(&["verify", "--w", "10", "--k", "5", "--format", "json"]);
    assert_eq!(v["pass"], true);
    let v = json(&["verify", "--w", "10", "--a", "0.5", "--b", "0.5", "--format", "json"]);
    assert_eq!(v["pass"], false);
    assert!((v["support_spread"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(run(&["verify", "--w", "10", "--a", "0.5"]).status.code(), Some(2));
}

#[test]
fn simulate_explicit_zero_profile() {
    let v = json(&["simulate", "--profile", "explicit", "--a", "0", "--b", "0", "--slots", "1e4", "--format", "json"]);
    assert_eq!(v["mean_throughput"].as_f64().unwrap(), 0.0);
    assert!(v["mean_payoff_per_user"]
        .as_array()
        .unwrap()
        .iter()
        .all(|p| p.as_f64().unwrap() == 0.0));
    assert_eq!(v["throughput_pass"], true);
}

#[test]
fn simulate_equilibrium_profile() {
    let v = json(&["simulate", "--w", "10", "--k", "5", "--profile", "ne", "--slots", "2e4", "--seed", "3", "--format", "json"]);
    assert!(v["mean_payoff"].as_f64().unwrap().abs() < 0.05);
    assert_eq!(v["payoff_pass"], true);
    assert_eq!(v["seed_used"].as_u64().unwrap(), 3);

    let v = json(&["simulate", "--w", "1e6", "--k", "2", "--profile", "ne", "--slots", "1e5", "--format", "json"]);
    assert!((v["mean_throughput"].as_f64().unwrap() - 1.0).abs() < 0.01);
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--w", "4", "--k", "3", "--profile", "opt", "--slots", "5000", "--seed", "17", "--format", "json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn reward_sweep_grid_and_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("reward.csv");
    let out = run(&["sweep", "--var", "w", "--start", "0", "--stop", "10", "--step", "0.1", "--k", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&fs::read_to_string(&path).unwrap());
    assert_eq!(
        header,
        [
            "W", "K", "a_ne", "b_ne", "p0_ne", "regime", "ne_payoff", "a_opt", "b_opt",
            "opt_payoff", "poa", "analytic_throughput_at_ne"
        ]
    );
    assert_eq!(rows.len(), 101);
    for row in &rows {
        let w: f64 = row[0].parse().unwrap();
        let p0: f64 = row[4].parse().unwrap();
        if w >= 3.0 {
            assert!(p0 < 1e-12, "W={w} p0={p0}");
        }
        if w <= 1.0 {
            assert_eq!(row[10], "", "PoA undefined at W={w}");
        }
    }
}

#[test]
fn player_sweep_at_fixed_reward() {
    let (header, rows) = csv_rows(&stdout(&run(&["sweep", "--var", "k", "--w", "10", "--ks", "2..20"])));
    assert_eq!(rows.len(), 19);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let row = rows.iter().find(|r| r[col("K")] == "5").unwrap();
    let f = |name: &str| row[col(name)].parse::<f64>().unwrap();
    assert!((f("a_ne") - 0.331).abs() < 1e-3);
    assert!((f("b_ne") - 0.438).abs() < 1e-3);
    assert!((f("p0_ne") - 0.231).abs() < 1e-3);
}

#[test]
fn poa_approaches_one() {
    let text = stdout(&run(&["sweep", "--start", "10", "--stop", "1000", "--step", "110", "--columns", "W,poa"]));
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["W", "poa"]);
    let poas: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(poas.windows(2).all(|w| w[1] >= w[0]));
    assert!(*poas.last().unwrap() > 0.99);
}

#[test]
fn sweep_json_rows() {
    let v = json(&["sweep", "--var", "k", "--ks", "2,3", "--columns", "K,regime", "--format", "json"]);
    assert_eq!(v, serde_json::json!([{"K": 2, "regime": "FullTransmit"}, {"K": 3, "regime": "FullTransmit"}]));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    fs::write(&path, "# defaults\nw = 10\nk = 5\nformat = json\nslots = 1000\n").unwrap();
    let cfg = path.to_str().unwrap();

    let v = json(&["--config", cfg, "solve"]);
    assert_eq!(v["game"]["k"], 5);
    let v = json(&["solve", "--config", cfg, "--k", "2"]);
    assert_eq!(v["game"]["k"], 2);
    assert_eq!(v["game"]["w"].as_f64().unwrap(), 10.0);

    fs::write(&path, "bogus = 1\n").unwrap();
    assert_eq!(run(&["--config", cfg, "solve", "--w", "1"]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["solve", "--w", "1"]).status.code(), Some(0));
    assert_eq!(run(&["solve"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--w", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--step", "0"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--var", "k", "--ks", "1..3"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--slots", "0"]).status.code(), Some(2));
    assert_eq!(run(&["--config", "/nonexistent/cfg", "solve", "--w", "1"]).status.code(), Some(1));

    let out = run(&["sweep", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}
