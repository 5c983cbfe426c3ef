//! Synthetic benchmark families and their expectation sidecars.
//!
//! Every instance is a deterministic `.rsl` source plus a `key=value`
//! sidecar holding the expected BMC verdict and depth for the bound `kmax`,
//! and the expected k-induction verdict where it is known.

use std::fmt::Write;

use crate::oracle::{self, Limits, Outcome};
use crate::randprog;
use ibmc_core::frontend::{compile, CompileOptions};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expectation {
    /// `cex` or `safe`.
    pub verdict: String,
    /// Violation depth, or `kmax` for `safe`.
    pub depth: u32,
    pub kmax: u32,
    pub check_loop: Option<String>,
    /// Expected k-induction verdict name and depth.
    pub induction: Option<(String, u32)>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("unknown family `{0}`")]
    Unknown(String),
    #[error("{0}")]
    Params(String),
    #[error("sidecar line {0}: {1}")]
    Sidecar(usize, String),
}

impl Expectation {
    fn cex(depth: u32, kmax: u32) -> Expectation {
        Expectation {
            verdict: "cex".into(),
            depth,
            kmax,
            check_loop: None,
            induction: None,
        }
    }

    fn safe(kmax: u32) -> Expectation {
        Expectation {
            verdict: "safe".into(),
            depth: kmax,
            kmax,
            check_loop: None,
            induction: None,
        }
    }

    fn with_induction(mut self, verdict: &str, depth: u32) -> Expectation {
        self.induction = Some((verdict.into(), depth));
        self
    }

    pub fn to_sidecar(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "verdict={}", self.verdict);
        let _ = writeln!(s, "depth={}", self.depth);
        let _ = writeln!(s, "kmax={}", self.kmax);
        if let Some(l) = &self.check_loop {
            let _ = writeln!(s, "check_loop={l}");
        }
        if let Some((v, d)) = &self.induction {
            let _ = writeln!(s, "induction={v}");
            let _ = writeln!(s, "induction_depth={d}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Expectation, FamilyError> {
        let mut e = Expectation::safe(0);
        let mut ind: (Option<String>, Option<u32>) = (None, None);
        let mut seen_depth = false;
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: &str| FamilyError::Sidecar(no + 1, m.to_string());
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err("expected key=value"))?;
            let num = || {
                v.trim()
                    .parse::<u32>()
                    .map_err(|_| err("expected a number"))
            };
            match k.trim() {
                "verdict" => e.verdict = v.trim().to_string(),
                "depth" => {
                    e.depth = num()?;
                    seen_depth = true;
                }
                "kmax" => e.kmax = num()?,
                "check_loop" => e.check_loop = Some(v.trim().to_string()),
                "induction" => ind.0 = Some(v.trim().to_string()),
                "induction_depth" => ind.1 = Some(num()?),
                other => return Err(err(&format!("unknown key `{other}`"))),
            }
        }
        if !seen_depth {
            e.depth = e.kmax;
        }
        if let (Some(v), Some(d)) = ind {
            e.induction = Some((v, d));
        }
        Ok(e)
    }
}

pub struct Instance {
    /// File stem, e.g. `counter_20`.
    pub name: String,
    pub source: String,
    pub expect: Option<Expectation>,
}

fn param(params: &[u64], i: usize, default: Option<u64>, what: &str) -> Result<u64, FamilyError> {
    params
        .get(i)
        .copied()
        .or(default)
        .ok_or_else(|| FamilyError::Params(format!("missing parameter `{what}`")))
}

fn width_for(max: u64) -> u32 {
    if max < 256 {
        8
    } else if max < 65536 {
        16
    } else {
        32
    }
}

pub const FAMILIES: [&str; 7] = [
    "counter",
    "deadvars",
    "mul_guard",
    "array_chain",
    "multiloop",
    "induction",
    "random",
];

/// Instantiate a family. Parameters:
/// `counter(d)`, `deadvars(d, n_dead)`, `mul_guard(w, variant=0)`,
/// `array_chain(n)`, `multiloop(n_loops, d, kmax=6)`, `induction(k, n_side)`,
/// `random(seed)`.
pub fn generate(family: &str, params: &[u64]) -> Result<Instance, FamilyError> {
    let joined = params
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join("_");
    let name = format!("{family}_{joined}");
    let (source, expect) = match family {
        "counter" => counter(param(params, 0, None, "d")?)?,
        "deadvars" => deadvars(
            param(params, 0, None, "d")?,
            param(params, 1, None, "n_dead")?,
        )?,
        "mul_guard" => mul_guard(
            param(params, 0, None, "w")?,
            param(params, 1, Some(0), "variant")?,
        )?,
        "array_chain" => array_chain(param(params, 0, None, "n")?)?,
        "multiloop" => multiloop(
            param(params, 0, None, "n_loops")?,
            param(params, 1, None, "d")?,
            param(params, 2, Some(6), "kmax")?,
        )?,
        "induction" => induction(
            param(params, 0, None, "k")?,
            param(params, 1, Some(0), "n_side")?,
        )?,
        "random" => random(param(params, 0, None, "seed")?),
        other => return Err(FamilyError::Unknown(other.to_string())),
    };
    Ok(Instance {
        name,
        source,
        expect,
    })
}

type Generated = (String, Option<Expectation>);

/// `c` counts up by one per iteration; the assert fails when it reaches `d`.
fn counter(d: u64) -> Result<Generated, FamilyError> {
    if d == 0 || d > 60_000 {
        return Err(FamilyError::Params("counter: need 1 <= d <= 60000".into()));
    }
    let w = width_for(d);
    let src = format!("state u{w} c := 0;\nloop main {{\n  c := c + 1;\n  assert(c != {d});\n}}\n");
    let e = Expectation::cex(d as u32, d as u32).with_induction("cex", d as u32);
    Ok((src, Some(e)))
}

/// A bounded counter `x` that only moves on input 3 and resets above 100,
/// next to `n_dead` state variables that never influence the assert.
fn deadvars(d: u64, n_dead: u64) -> Result<Generated, FamilyError> {
    if d == 0 || d > 10_000 || n_dead > 10_000 {
        return Err(FamilyError::Params(
            "deadvars: need 1 <= d <= 10000, n_dead <= 10000".into(),
        ));
    }
    let mut src = String::from("input u8 t;\nstate u8 x := 0;\n");
    for i in 0..n_dead {
        let _ = writeln!(src, "state u8 dead{i} := {};", i % 256);
    }
    src.push_str("loop main {\n");
    for i in 0..n_dead {
        let prev = if i == 0 {
            String::from("t")
        } else {
            format!("dead{}", i - 1)
        };
        let _ = writeln!(
            src,
            "  dead{i} := (dead{i} ^ {prev}) + {};",
            (i * 7 + 1) % 256
        );
    }
    src.push_str("  if (t == 3) {\n    x := x + 1;\n  }\n  if (x > 100) {\n    x := 0;\n  }\n  assert(x <= 100);\n}\n");
    let e = Expectation::safe(d as u32).with_induction("proved", 1);
    Ok((src, Some(e)))
}

/// Multiplication properties for bitvector refinement.
/// Variant 0: a property on the low four bits of a product (safe, decided by
/// the first over-approximation). Variant 1: a product of two primes is
/// reachable (counterexample at depth 1). Variant 2: `a * b == 0` under
/// `b == 0` (safe, needs refinement to full width).
fn mul_guard(w: u64, variant: u64) -> Result<Generated, FamilyError> {
    if !(w == 8 || w == 16 || w == 32) {
        return Err(FamilyError::Params(
            "mul_guard: w must be 8, 16 or 32".into(),
        ));
    }
    let kmax = 4;
    let head = format!("input u{w} a;\ninput u{w} b;\nstate u{w} acc := 0;\n");
    let (body, e) = match variant {
        0 => (
            String::from(
                "  acc := acc + a * b;\n  assert(((a * b) as u4) == ((a as u4) * (b as u4)));\n",
            ),
            Expectation::safe(kmax),
        ),
        1 => {
            let n = match w {
                8 => 143,
                16 => 60491,
                _ => 4294049777u64,
            };
            (
                format!(
                    "  assume(a > 1);\n  assume(b > 1);\n  acc := a * b;\n  assert(acc != {n});\n"
                ),
                Expectation::cex(1, kmax),
            )
        }
        2 => (
            String::from("  assume(b == 0);\n  acc := acc + a;\n  assert(a * b == 0);\n"),
            Expectation::safe(kmax),
        ),
        _ => {
            return Err(FamilyError::Params(
                "mul_guard: variant must be 0, 1 or 2".into(),
            ))
        }
    };
    Ok((format!("{head}loop main {{\n{body}}}\n"), Some(e)))
}

/// Per-slot counters in a four-element array indexed by an input; a slot
/// reaches `n` after `n` hits.
fn array_chain(n: u64) -> Result<Generated, FamilyError> {
    if n == 0 || n > 255 {
        return Err(FamilyError::Params(
            "array_chain: need 1 <= n <= 255".into(),
        ));
    }
    let src = format!(
        "input u2 i;\nstate u8[4] a := 0;\nloop main {{\n  a[i] := a[i] + 1;\n  assert(a[i] != {n});\n}}\n"
    );
    Ok((src, Some(Expectation::cex(n as u32, n as u32))))
}

/// `n_loops` sequential loops; only the last has an assert, failing at its
/// iteration `d`. Earlier loops run `kmax` iterations each.
fn multiloop(n_loops: u64, d: u64, kmax: u64) -> Result<Generated, FamilyError> {
    if n_loops == 0 || n_loops > 50 || d == 0 || d > kmax || kmax > 1000 {
        return Err(FamilyError::Params(
            "multiloop: need 1 <= n_loops <= 50, 1 <= d <= kmax <= 1000".into(),
        ));
    }
    let mut src = String::from("input u1 t;\nstate u8 y := 0;\n");
    for l in 0..n_loops - 1 {
        let _ = writeln!(src, "state u8 x{l} := 0;");
    }
    for l in 0..n_loops - 1 {
        let _ = writeln!(
            src,
            "loop phase{l} {{\n  if (t == 1) {{\n    x{l} := x{l} + 1;\n  }}\n}}"
        );
    }
    let _ = writeln!(src, "loop last {{\n  y := y + 1;\n  assert(y != {d});\n}}");
    let depth = ((n_loops - 1) * kmax + d) as u32;
    let mut e = Expectation::cex(depth, kmax as u32);
    e.check_loop = Some(format!("main.{}", n_loops - 1));
    Ok((src, Some(e)))
}

/// A counter that wraps from 3 to 0 and must never equal `3 + k`. Unreachable
/// states `4 .. 3+k-1` lead to the bad value, so the property is exactly
/// `k`-inductive. `n_side` extra variables are updated alongside.
fn induction(k: u64, n_side: u64) -> Result<Generated, FamilyError> {
    if k == 0 || k > 200 || n_side > 1000 {
        return Err(FamilyError::Params(
            "induction: need 1 <= k <= 200, n_side <= 1000".into(),
        ));
    }
    let mut src = String::from("input u8 t;\nstate u8 x := 0;\n");
    for i in 0..n_side {
        let _ = writeln!(src, "state u8 side{i} := {};", i % 256);
    }
    src.push_str("loop main {\n");
    for i in 0..n_side {
        let _ = writeln!(src, "  side{i} := side{i} * t + (x as u8);");
    }
    let _ = write!(
        src,
        "  x := x + 1;\n  if (x == 4) {{\n    x := 0;\n  }}\n  assert(x != {});\n}}\n",
        3 + k
    );
    let kmax = (k + 2) as u32;
    let e = Expectation::safe(kmax).with_induction("proved", k as u32);
    Ok((src, Some(e)))
}

/// A random small program; the sidecar comes from the explicit-state oracle
/// when the state space is small enough.
fn random(seed: u64) -> Generated {
    let src = randprog::Gen::new(seed).program();
    let kmax = 8;
    let expect = compile(&src, CompileOptions::default())
        .ok()
        .and_then(|p| oracle::bmc(&p, 0, kmax, Limits::default()).ok())
        .map(|o| match o {
            Outcome::Violation { depth, .. } => Expectation::cex(depth, kmax),
            Outcome::Safe { .. } => Expectation::safe(kmax),
        });
    (src, expect)
}

/// The standard benchmark corpus used by `bench` and the acceptance suite.
pub fn standard_suite() -> Vec<(&'static str, Vec<u64>)> {
    let mut out = Vec::new();
    for d in [3, 20, 40, 80] {
        out.push(("counter", vec![d]));
    }
    for d in [10, 20, 40, 80] {
        out.push(("deadvars", vec![d, 50]));
    }
    for w in [8, 16] {
        for v in 0..3 {
            out.push(("mul_guard", vec![w, v]));
        }
    }
    for n in [2, 4, 6] {
        out.push(("array_chain", vec![n]));
    }
    for n in [2, 3] {
        for d in 1..=3 {
            out.push(("multiloop", vec![n, d]));
        }
    }
    for k in 1..=3 {
        out.push(("induction", vec![k, 8]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ibmc_core::frontend::{compile, CompileOptions};

    #[test]
    fn every_standard_instance_compiles() {
        for (f, p) in standard_suite() {
            let inst = generate(f, &p).unwrap();
            compile(&inst.source, CompileOptions::default())
                .unwrap_or_else(|e| panic!("{}: {e}\n{}", inst.name, inst.source));
            assert!(inst.expect.is_some());
        }
    }

    #[test]
    fn counter_three_is_the_counter_program() {
        let i = generate("counter", &[3]).unwrap();
        assert_eq!(i.name, "counter_3");
        assert!(i.source.contains("assert(c != 3)"));
        let e = i.expect.unwrap();
        assert_eq!((e.verdict.as_str(), e.depth), ("cex", 3));
    }

    #[test]
    fn sidecar_round_trip() {
        let e = generate("multiloop", &[2, 2]).unwrap().expect.unwrap();
        assert_eq!(e.depth, 8);
        assert_eq!(Expectation::parse(&e.to_sidecar()).unwrap(), e);
        let e = generate("induction", &[3, 2]).unwrap().expect.unwrap();
        assert_eq!(Expectation::parse(&e.to_sidecar()).unwrap(), e);
        assert!(Expectation::parse("verdict").is_err());
        assert!(Expectation::parse("colour=blue").is_err());
    }

    #[test]
    fn bad_parameters() {
        assert!(generate("counter", &[]).is_err());
        assert!(generate("mul_guard", &[12]).is_err());
        assert!(generate("nope", &[1]).is_err());
        assert!(generate("multiloop", &[2, 9, 4]).is_err());
    }

    #[test]
    fn expectations_agree_with_the_oracle() {
        for (f, p) in standard_suite() {
            let inst = generate(f, &p).unwrap();
            let e = inst.expect.unwrap();
            let prog = compile(&inst.source, CompileOptions::default()).unwrap();
            let target = e
                .check_loop
                .as_deref()
                .map(|l| prog.find_main_loop(l).unwrap())
                .unwrap_or(prog.main_loops.len() - 1);
            let lim = Limits {
                max_transitions: 1 << 20,
                ..Limits::default()
            };
            let Ok(o) = oracle::bmc(&prog, target, e.kmax, lim) else {
                continue;
            };
            let got = match o {
                Outcome::Violation { depth, .. } => ("cex", depth),
                Outcome::Safe { .. } => ("safe", e.kmax),
            };
            assert_eq!(got, (e.verdict.as_str(), e.depth), "{}", inst.name);
        }
    }
}
