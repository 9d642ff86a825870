//! wasm-bindgen exports for the static page in `www/`.
//!
//! Every export returns plain text so the page can drop it into a `<pre>`.

use std::fmt::Write;

use nmqc_core::bell::{format_float, BellGame, LhvSearch};
use nmqc_core::gf3::interpolate;
use nmqc_core::simulator::sample;
use nmqc_core::synthesis::{family_fn, family_table, synthesize};
use nmqc_core::{Error, NmqcProgram, Trit, TritFunction, TritVector};
use wasm_bindgen::prelude::*;

/// Largest n the page offers for the fₙ family.
pub const MAX_DEMO_FAMILY: usize = 6;
/// Largest arity accepted for typed-in truth tables.
pub const MAX_DEMO_ARITY: usize = 3;
pub const MAX_DEMO_SHOTS: u32 = 200_000;

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

/// fₙ with its program; for n ≤ 3 also the evaluation table and the
/// classical bound of its game.
#[wasm_bindgen]
pub fn family_report(n: usize) -> Result<String, JsError> {
    family_text(n).map_err(js)
}

pub fn family_text(n: usize) -> Result<String, Error> {
    if !(2..=MAX_DEMO_FAMILY).contains(&n) {
        return Err(Error::Domain(format!("choose n between 2 and {MAX_DEMO_FAMILY}")));
    }
    let (f, program) = family_fn(n)?;
    let mut out = String::new();
    let _ = writeln!(out, "program ({} qutrits):", program.width());
    out.push_str(&program.to_file_string());
    let _ = writeln!(out, "verified on all {} inputs: {}", f.table().len(), program.verify(&f)?.passed());
    if n <= 3 {
        let _ = writeln!(out, "\nx | f{n}(x) | ⊕x | exponent");
        for row in family_table(n)? {
            let _ = writeln!(out, "{} | {} | {} | {}", row.input, row.value, row.parity, row.cell());
        }
        let game = BellGame::uniform(f, program)?;
        let search = LhvSearch { fix_offsets: true, ..Default::default() };
        let bound = search.run(&game)?;
        let _ = writeln!(
            out,
            "\nclassical bound {} (witness {}), quantum value 1",
            nmqc_core::fmt_rational(&bound.value),
            bound.witness
        );
    }
    Ok(out)
}

/// Parses `3ⁿ` trit digits, optionally preceded by a line with `n`.
pub fn parse_table(text: &str) -> Result<TritFunction, Error> {
    let digits: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let n = (1..=MAX_DEMO_ARITY)
        .find(|&n| 3usize.pow(n as u32) == digits.len())
        .or_else(|| {
            (1..=MAX_DEMO_ARITY).find(|&n| {
                let s = n.to_string();
                digits.starts_with(&s) && digits.len() == s.len() + 3usize.pow(n as u32)
            })
        })
        .ok_or_else(|| Error::Domain(format!("expected 3, 9 or 27 trits, got {}", digits.len())))?;
    let body = &digits[digits.len() - 3usize.pow(n as u32)..];
    TritFunction::parse_file(&format!("{n}\n{body}\n"))
}

/// Synthesizes a program for a typed-in truth table.
#[wasm_bindgen]
pub fn synthesize_table(text: &str) -> Result<String, JsError> {
    synthesize_text(text).map_err(js)
}

pub fn synthesize_text(text: &str) -> Result<String, Error> {
    let f = parse_table(text)?;
    let poly = interpolate(&f);
    let program = synthesize(&f)?;
    let mut out = String::new();
    let _ = writeln!(out, "polynomial: {poly}");
    let _ = writeln!(
        out,
        "degree {} ({})",
        poly.degree(),
        if poly.lhv_computable() { "computable by local strategies" } else { "needs quantum correlations" }
    );
    let _ = writeln!(out, "\nprogram ({} qutrits, c = {}):", program.width(), program.post_trit());
    out.push_str(&program.to_file_string());
    let _ = writeln!(out, "verified: {}", program.verify(&f)?.passed());
    Ok(out)
}

/// Samples a program file at input `x`.
#[wasm_bindgen]
pub fn sample_program(program: &str, x: &str, shots: u32, seed: u32) -> Result<String, JsError> {
    sample_text(program, x, shots, seed).map_err(js)
}

pub fn sample_text(program: &str, x: &str, shots: u32, seed: u32) -> Result<String, Error> {
    if shots == 0 || shots > MAX_DEMO_SHOTS {
        return Err(Error::Domain(format!("shots must be between 1 and {MAX_DEMO_SHOTS}")));
    }
    let program = NmqcProgram::parse_file(program)?;
    let x: TritVector = x.parse()?;
    let samples = sample(&program, &x, u64::from(shots), u64::from(seed))?;
    let exact = program.run_deterministic(&x)?.distribution();
    let mut out = String::from("z | count | frequency | exact\n");
    let freq = samples.frequencies();
    for z in Trit::ALL {
        let k = z.value() as usize;
        let _ = writeln!(out, "{z} | {} | {} | {}", samples.counts[k], format_float(freq[k]), format_float(exact[k]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_two() {
        let text = family_text(2).unwrap();
        assert!(text.contains("(1,2) | 1 | 0 | α^{3+0}=α^3=ω^1"));
        assert!(text.contains("classical bound 2/3"));
        assert!(family_text(1).is_err());
    }

    #[test]
    fn typed_tables() {
        assert_eq!(parse_table("011 111 112").unwrap().arity(), 2);
        assert_eq!(parse_table("2\n011111112").unwrap().arity(), 2);
        assert!(parse_table("0111").is_err());
        let text = synthesize_text("011111112").unwrap();
        assert!(text.contains("degree 3"));
        assert!(text.contains("verified: true"));
    }

    #[test]
    fn sampling_text() {
        let text = sample_text("2 3 0\n1 0 | 1\n0 1 | 1\n2 2 | 1\n", "1,2", 100, 1).unwrap();
        assert!(text.contains("1 | 100 | 1 | 1"));
        assert!(sample_text("1 1 0\n1 | 1\n", "1", 0, 1).is_err());
    }
}
