//! Browser bindings for the demo page: three interactive operations, each
//! taking strings in and returning a JSON string out.  All arithmetic stays
//! exact; the page only renders.

use seidel_core::data;
use seidel_core::descent::{asymptotic_valuation, descent_verdict, Outcome};
use seidel_core::morse::{complex_from_json, cycle_from_json, spectral_number};
use seidel_core::novikov::NovikovScalar;
use seidel_core::rat::{fmt_rat, parse_rat, rat_i64, Rat};
use seidel_core::seidel::seidel_from_table;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn err_json(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

/// Novikov scalar calculator: sum, product, valuations, and the inverse of
/// the first operand (truncated at the given floor).
#[wasm_bindgen]
pub fn novikov_eval(a_json: &str, b_json: &str, floor: &str) -> String {
    let parse = |t: &str| serde_json::from_str::<NovikovScalar>(t);
    let (a, b) = match (parse(a_json), parse(b_json)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return err_json(e),
    };
    let floor = match parse_rat(floor) {
        Ok(f) => f,
        Err(e) => return err_json(e),
    };
    let sum = a.add(&b);
    let prod = a.mul(&b);
    let inverse = if a.is_zero() {
        None
    } else if a.as_monomial().is_some() {
        a.invert().ok()
    } else {
        a.truncate(&floor).ok().and_then(|t| t.invert().ok())
    };
    json!({
        "nu_a": a.nu().to_string(),
        "nu_b": b.nu().to_string(),
        "sum": sum.to_string(),
        "product": prod.to_string(),
        "nu_product": prod.nu().to_string(),
        "inverse_a": inverse.as_ref().map(|i| i.to_string()),
        "inverse_check": inverse.map(|i| a.mul(&i).truncate(&floor)
            .map(|p| p.to_string()).unwrap_or_default()),
    })
    .to_string()
}

/// Blow-up explorer: builds the loop element of the chosen family at δ and
/// reports κ, the power valuations ν(S^k), the certified asymptotics, and
/// the descent verdicts.
#[wasm_bindgen]
pub fn blowup_explore(kind: &str, delta: &str, k_max: u32) -> String {
    let delta = match parse_rat(delta) {
        Ok(d) => d,
        Err(e) => return err_json(e),
    };
    let k_max = k_max.clamp(1, 200);
    let floor = rat_i64(-1000);
    let fibration = match kind {
        "cp2_line" => data::blowup_cp2_fibration(&delta),
        "t4_zero" => data::blowup_t4_fibration(&delta, &rat_i64(1), &rat_i64(1)),
        other => return err_json(format!("unknown family `{other}`")),
    };
    let f = match fibration {
        Ok(f) => f,
        Err(e) => return err_json(e),
    };
    let m = &f.fiber;
    let s = match seidel_from_table(&f, "γ") {
        Ok(s) => s,
        Err(e) => return err_json(e),
    };
    let (est, trace) = match asymptotic_valuation(&s.element, m, k_max, &floor) {
        Ok(x) => x,
        Err(e) => return err_json(e),
    };
    let (verdict, _) = match descent_verdict(&[s.clone()], m, k_max, &floor) {
        Ok(x) => x,
        Err(e) => return err_json(e),
    };
    let out = |o: Outcome| match o {
        Outcome::Descend => "descend",
        Outcome::NotDescend => "not_descend",
        Outcome::Undetermined => "undetermined",
    };
    let kappa = -&f.sigma0_u;
    let to_f64 = |r: &Rat| -> f64 {
        // display only: the engine itself never leaves exact arithmetic
        let n: f64 = r.numer().to_string().parse().unwrap_or(f64::NAN);
        let d: f64 = r.denom().to_string().parse().unwrap_or(f64::NAN);
        n / d
    };
    json!({
        "kappa": fmt_rat(&kappa),
        "element": s.element.render(m),
        "powers": trace.nus.iter().enumerate()
            .map(|(i, v)| json!({"k": i + 1, "nu": fmt_rat(v), "nu_float": to_f64(v)}))
            .collect::<Vec<_>>(),
        "estimate": {
            "lower": est.lower.as_ref().map(fmt_rat),
            "upper": fmt_rat(&est.upper),
            "exact": est.exact.as_ref().map(fmt_rat),
        },
        "certificate": trace.certificate,
        "spectral": out(verdict.spectral),
        "asymptotic": out(verdict.asymptotic),
        "witnesses": verdict.witnesses.iter()
            .map(|w| format!("{}: {}", w.loop_label, w.reason))
            .collect::<Vec<_>>(),
    })
    .to_string()
}

/// Morse spectral number of a cycle in a filtered complex (both as JSON).
#[wasm_bindgen]
pub fn morse_spectral(complex_json: &str, cycle_json: &str) -> String {
    let c = match complex_from_json(complex_json) {
        Ok(c) => c,
        Err(e) => return err_json(e),
    };
    let a = match cycle_from_json(cycle_json, &c) {
        Ok(a) => a,
        Err(e) => return err_json(e),
    };
    match spectral_number(&a, &c) {
        Ok(v) => json!({
            "value": fmt_rat(&v),
            "thresholds": c.thresholds().iter().map(fmt_rat).collect::<Vec<_>>(),
        })
        .to_string(),
        Err(e) => err_json(e),
    }
}
