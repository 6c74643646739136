use std::collections::BTreeSet;
use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use singular_moduli::algexpr::closed_form_registry;
use singular_moduli::modeq::identity_ids;

fn smod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = smod(&all);
    let text = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (value, out.status.code().unwrap())
}

fn residual_below(row: &Value, exponent: i32) -> bool {
    let r: f64 = row["residual"].as_str().unwrap().parse().unwrap();
    r < 10f64.powi(-exponent)
}

#[test]
fn alpha_one_is_one_half() {
    let (v, code) = json(&["alpha", "--n", "1", "--digits", "30"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "alpha");
    assert_eq!(v["digits"], 30);
    let value = v["results"][0]["value"].as_str().unwrap();
    assert_eq!(value, format!("0.5{}", "0".repeat(29)));
}

#[test]
fn identity_check_at_sixty_digits() {
    let (v, code) = json(&["verify", "--identity", "T3.1", "--q", "0.1", "--digits", "60"]);
    assert_eq!(code, 0);
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["pass"], true);
    assert!(residual_below(&rows[0], 50));
}

#[test]
fn closed_form_shows_both_values() {
    let (v, code) = json(&["closed-forms", "--label", "alpha_36", "--digits", "50"]);
    assert_eq!(code, 0);
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["residual"].is_null());
    assert!(residual_below(&rows[1], 42));
    assert_eq!(rows[0]["value"], rows[1]["value"]);
}

#[test]
fn json_output_is_deterministic() {
    let args = ["singular", "--n", "4", "--digits", "30", "--json"];
    let a = smod(&args);
    let b = smod(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_all_covers_every_registered_item() {
    let (v, code) = json(&["verify", "--all", "--digits", "40"]);
    assert_eq!(code, 0);
    let labels: Vec<&str> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            assert_eq!(r["pass"], true, "{r}");
            r["label"].as_str().unwrap()
        })
        .collect();
    for id in identity_ids() {
        let prefix = format!("{id} @ q=");
        assert_eq!(labels.iter().filter(|l| l.starts_with(&prefix)).count(), 5, "{id}");
    }
    let covered: BTreeSet<&str> = labels
        .iter()
        .filter_map(|l| l.strip_suffix(" (closed form)"))
        .collect();
    let registered: BTreeSet<&str> = closed_form_registry().labels().collect();
    assert_eq!(covered, registered);
}

#[test]
fn fixtures_pass_and_fail() {
    let shipped = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures/identities.txt");
    let (v, code) = json(&["verify", "--fixtures", shipped]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["results"].as_array().unwrap().len(), 6);

    let mut file = std::env::temp_dir();
    file.push(format!("smod-fixture-{}.txt", std::process::id()));
    let mut f = std::fs::File::create(&file).unwrap();
    // 30 digits cannot reach a 10^-80 residual
    writeln!(f, "T3.2 0.2 30 80\nT3.2 0.2 30 20").unwrap();
    let (v, code) = json(&["verify", "--fixtures", file.to_str().unwrap()]);
    std::fs::remove_file(&file).unwrap();
    assert_eq!(code, 1);
    assert_eq!(v["results"][0]["pass"], false);
    assert_eq!(v["results"][1]["pass"], true);
}

#[test]
fn continued_fraction_routes_agree() {
    let (cf, code) = json(&["cf", "--fn", "s1", "--q", "exp(-pi*sqrt(1))", "--digits", "40"]);
    assert_eq!(code, 0);
    let (product, _) = json(&["cf", "--fn", "s1", "--q", "e^-pi*sqrt(1)", "--route", "product", "--digits", "40"]);
    assert_eq!(cf["results"][0]["value"], product["results"][0]["value"]);
    assert!(residual_below(&cf["results"][0], 30));
}

#[test]
fn too_few_terms_is_a_failure_not_a_usage_error() {
    let out = smod(&["cf", "--fn", "s2", "--q", "0.5", "--terms", "8"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("converge"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["alpha", "--n", "1", "--digits", "5"][..],
        &["alpha"][..],
        &["alpha", "--n", "1", "--q", "0.1"][..],
        &["closed-forms", "--label", "nope"][..],
        &["verify", "--identity", "X9"][..],
        &["verify", "--q", "0.1"][..],
        &["theta", "--fn", "phi", "--q", "1.5"][..],
        &["theta", "--fn", "phi", "--q", "exp(pi)"][..],
        &["invariant", "--kind", "G", "--n", "-3"][..],
        &["frobnicate"][..],
    ] {
        let out = smod(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn tables_list_registered_items() {
    let (v, code) = json(&["table", "--set", "invariants", "--digits", "30"]);
    assert_eq!(code, 0);
    let labels: Vec<&str> = v["results"].as_array().unwrap().iter().map(|r| r["label"].as_str().unwrap()).collect();
    assert!(labels.contains(&"G_5") && labels.contains(&"G_7"));
    assert!(labels.contains(&"g_4 := 2^(1/8)"));
    let (v, code) = json(&["table", "--set", "section5", "--digits", "50"]);
    assert_eq!(code, 0);
    assert!(v["results"].as_array().unwrap().iter().any(|r| r["label"] == "g8_root16 (closed form)"));
}

#[test]
fn rational_n_is_noted() {
    let out = smod(&["invariant", "--kind", "g", "--n", "4/9", "--digits", "20"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("# n = 4/9 is not an integer"));
}
