use std::process::{Command, Output};

use serde_json::Value;

fn cpstar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpstar"))
        .args(args)
        .env_remove("CPSTAR_ORDER")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn mul_reduced_product_of_a_function_with_itself() {
    let out = cpstar(&["mul", "--lhs", "z0*zb0/x", "--rhs", "z0*zb0/x", "--order", "1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["coefficients"][0], "(z0^2*zb0^2)/x^2");
    // φ − φ² at the level −2μ = 1
    assert_eq!(v["coefficients"][1], "(z0*z1*zb0*zb1)/x^2");
}

#[test]
fn mul_wick_and_tilde_on_radials() {
    let w = json(&cpstar(&["mul", "--product", "wick", "--lhs", "x", "--rhs", "x", "--order", "2"]));
    assert_eq!(w["series"], "((1)*x^2) + l*((1)*x)");
    let t = json(&cpstar(&["mul", "--product", "tilde", "--lhs", "x", "--rhs", "x", "--order", "2"]));
    assert_eq!(t["series"], "((1)*x^2)");
    let d = json(&cpstar(&[
        "mul", "--product", "tilde", "--lhs", "x", "--rhs", "x", "--order", "2", "--d", "1,1",
    ]));
    assert_eq!(d["d"], serde_json::json!(["1", "1"]));
}

#[test]
fn order_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_cpstar"))
        .args(["mul", "--lhs", "1", "--rhs", "1"])
        .env("CPSTAR_ORDER", "3")
        .output()
        .unwrap();
    assert_eq!(json(&out)["coefficients"].as_array().unwrap().len(), 4);
    let out = cpstar(&["mul", "--lhs", "1", "--rhs", "1"]);
    assert_eq!(json(&out)["coefficients"].as_array().unwrap().len(), 7);
}

#[test]
fn bad_input_is_reported() {
    let out = cpstar(&["mul", "--lhs", "z2", "--rhs", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown variable 'z2'"));
    let out = cpstar(&["mul", "--lhs", "1", "--rhs", "1", "--mu", "1/2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = cpstar(&["mul", "--lhs", "1/z0", "--rhs", "1"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("position 2"));
}

#[test]
fn tables() {
    let a = json(&cpstar(&["table", "a-coeff", "--rmax", "2"]));
    assert_eq!(a["rows"][2], serde_json::json!(["1", "-3", "7"]));
    let k = json(&cpstar(&["table", "k-coeff", "--rmax", "3"]));
    assert_eq!(k["rows"][2], serde_json::json!(["1", "-3/2", "1/6"]));
    let tex = cpstar(&["table", "k-coeff", "--rmax", "2", "--format", "latex"]);
    assert!(String::from_utf8_lossy(&tex.stdout).contains("-1 & \\frac{1}{2}"));
}

#[test]
fn moreno_residuals_vanish() {
    let out = cpstar(&["moreno", "--rmax", "10", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["residuals"].as_array().unwrap().len(), 10);
    assert!(v["residuals"].as_array().unwrap().iter().all(|r| r == "0"));
    assert!(v["latex"].as_str().unwrap().contains("\\tilde k_{10}"));
}

#[test]
fn verify_suites_pass() {
    let out = cpstar(&["verify", "all", "--n", "1", "--mu", "-1/2", "--order", "4", "--seed", "42"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));

    let out = cpstar(&["verify", "moreno", "--rmax", "10"]);
    assert!(out.status.success());
    let recursion = json(&out)["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["name"].as_str().unwrap().starts_with("recursion residual"))
        .count();
    assert_eq!(recursion, 10);

    assert!(cpstar(&["verify", "su1n", "--n", "1", "--order", "3"]).status.success());
}

#[test]
fn verify_output_is_deterministic() {
    let args = ["verify", "lemma21", "--order", "3", "--seed", "7", "--cases", "2", "--format", "text"];
    let strip = |o: Output| {
        String::from_utf8(o.stdout)
            .unwrap()
            .lines()
            .filter(|l| l.starts_with("pass") || l.starts_with("FAIL"))
            .map(String::from)
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(cpstar(&args)), strip(cpstar(&args)));
}
