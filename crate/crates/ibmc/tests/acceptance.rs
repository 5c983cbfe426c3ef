//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run all criteria with `cargo test -p ibmc --test acceptance`, or a subset
//! with `cargo test -p ibmc --test acceptance -- 3 5`.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use ibmc::families::{self, Expectation};
use ibmc::oracle::{self, Limits, Outcome};
use ibmc_core::bv::{BinOp, Ty};
use ibmc_core::cnf::{Encoder, EncoderOptions};
use ibmc_core::engine::NoHooks;
use ibmc_core::frontend::{compile, CompileOptions};
use ibmc_core::sat::{Lit, SolveOutcome, Solver, Var};
use ibmc_core::{Checker, Options, RunStats, TypedProgram, Verdict};
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

const RANDOM_PROGRAMS: u64 = 80;
const ORACLE_KMAX: u32 = 12;

struct Entry {
    name: String,
    prog: TypedProgram,
    kmax: u32,
    check_loop: Option<String>,
    expect: Option<Expectation>,
    /// `None` when the state space is too large for the oracle.
    oracle: Option<Outcome>,
}

impl Entry {
    fn target(&self) -> usize {
        match &self.check_loop {
            Some(l) => self.prog.find_main_loop(l).expect("known loop"),
            None => self.prog.main_loops.len() - 1,
        }
    }
}

fn corpus() -> Vec<Entry> {
    let mut specs = families::standard_suite();
    for seed in 0..RANDOM_PROGRAMS {
        specs.push(("random", vec![seed]));
    }
    specs
        .into_iter()
        .map(|(f, p)| {
            let inst = families::generate(f, &p).expect("valid family parameters");
            let prog = compile(&inst.source, CompileOptions::default())
                .unwrap_or_else(|e| panic!("{}: {e}", inst.name));
            let (kmax, check_loop) = match &inst.expect {
                Some(e) => (e.kmax, e.check_loop.clone()),
                None => (8, None),
            };
            let mut e = Entry {
                name: inst.name,
                prog,
                kmax,
                check_loop,
                expect: inst.expect,
                oracle: None,
            };
            if kmax <= ORACLE_KMAX {
                e.oracle = oracle::bmc(&e.prog, e.target(), kmax, Limits::default()).ok();
            }
            e
        })
        .collect()
}

fn options(e: &Entry, incremental: bool) -> Options {
    Options {
        incremental,
        unwind_max: Some(e.kmax),
        check_loop: e.check_loop.clone(),
        ..Options::default()
    }
}

fn run(p: &TypedProgram, o: Options) -> (Verdict, RunStats) {
    let mut c = Checker::new(p, o).expect("valid options");
    let v = c.run(&mut NoHooks);
    (v, c.stats)
}

fn key(v: &Verdict) -> (&'static str, Option<u32>) {
    (v.name(), v.depth())
}

/// Fastest of `n` runs in milliseconds, including compilation.
fn best_ms(src: &str, o: &Options, n: usize) -> (f64, Verdict) {
    let mut best = f64::MAX;
    let mut last = None;
    for _ in 0..n {
        let t = Instant::now();
        let p = compile(src, CompileOptions::default()).unwrap();
        let (v, _) = run(&p, o.clone());
        best = best.min(t.elapsed().as_secs_f64() * 1e3);
        last = Some(v);
    }
    (best, last.unwrap())
}

fn geo_mean(xs: &[f64]) -> f64 {
    (xs.iter().map(|x| x.ln()).sum::<f64>() / xs.len() as f64).exp()
}

type Check = Result<String, String>;

struct Ctx {
    corpus: Option<Vec<Entry>>,
    /// BMC verdicts of every corpus entry in every criterion-1 mode.
    verdicts: Option<Vec<Vec<(String, Verdict)>>>,
}

impl Ctx {
    fn corpus(&mut self) -> &Vec<Entry> {
        self.corpus.get_or_insert_with(corpus)
    }

    fn verdicts(&mut self) -> &Vec<Vec<(String, Verdict)>> {
        if self.verdicts.is_none() {
            let corpus = self.corpus.get_or_insert_with(corpus);
            let mut all = Vec::new();
            for e in corpus.iter() {
                let mut row = Vec::new();
                for inc in [false, true] {
                    for slice in [false, true] {
                        for refine in [false, true] {
                            let o = Options {
                                slice,
                                refine,
                                ..options(e, inc)
                            };
                            let label = format!(
                                "{}{}{}",
                                if inc { "i" } else { "ni" },
                                if slice { "+s" } else { "" },
                                if refine { "+r" } else { "" }
                            );
                            let t = Instant::now();
                            row.push((label, run(&e.prog, o).0));
                            let ms = t.elapsed().as_millis();
                            if std::env::var_os("ACCEPTANCE_VERBOSE").is_some() && ms > 1000 {
                                eprintln!("  {} {}: {ms} ms", e.name, row.last().unwrap().0);
                            }
                        }
                    }
                }
                all.push(row);
            }
            self.verdicts = Some(all);
        }
        self.verdicts.as_ref().unwrap()
    }
}

fn criterion_1(cx: &mut Ctx) -> Check {
    let t = Instant::now();
    let n = cx.corpus().len();
    let verdicts: Vec<Vec<(String, (&str, Option<u32>))>> = cx
        .verdicts()
        .iter()
        .map(|r| r.iter().map(|(l, v)| (l.clone(), key(v))).collect())
        .collect();
    let corpus = cx.corpus.as_ref().unwrap();
    let mut bad = Vec::new();
    for (e, row) in corpus.iter().zip(&verdicts) {
        let first = row[0].1;
        for (label, k) in row {
            if *k != first {
                bad.push(format!("{} {label}: {k:?} vs {first:?}", e.name));
            }
        }
        if let Some(x) = &e.expect {
            let want = (x.verdict.as_str(), Some(x.depth));
            let decided = first.0 == "safe" || first.0 == "cex";
            if decided && (first.0, first.1) != want {
                bad.push(format!("{}: {first:?}, sidecar says {want:?}", e.name));
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    if n < 100 {
        return Err(format!("corpus has only {n} programs"));
    }
    if !bad.is_empty() {
        return Err(format!("{} disagreements, e.g. {}", bad.len(), bad[0]));
    }
    if secs > 600.0 {
        return Err(format!("took {secs:.0}s"));
    }
    Ok(format!("{n} programs x 8 modes agree ({secs:.1}s)"))
}

fn criterion_2(cx: &mut Ctx) -> Check {
    let t = Instant::now();
    cx.verdicts();
    let corpus = cx.corpus.as_ref().unwrap();
    let verdicts = cx.verdicts.as_ref().unwrap();
    let (mut checked, mut traces) = (0, 0);
    let mut bad = Vec::new();
    for (e, row) in corpus.iter().zip(verdicts) {
        for (label, v) in row {
            if let Verdict::CounterexampleFound { depth, trace, .. } = v {
                traces += 1;
                match trace.replay(&e.prog) {
                    Some((d, asserts)) if d == *depth && !asserts.is_empty() => {
                        if let Some(Outcome::Violation { asserts: all, .. }) = &e.oracle {
                            if !asserts.iter().all(|a| all.contains(a)) {
                                bad.push(format!(
                                    "{} {label}: trace hits {asserts:?}, oracle {all:?}",
                                    e.name
                                ));
                            }
                        }
                    }
                    other => bad.push(format!("{} {label}: replay gives {other:?}", e.name)),
                }
            }
        }
        let Some(o) = &e.oracle else { continue };
        checked += 1;
        let want = match o {
            Outcome::Violation { depth, .. } => ("cex", Some(*depth)),
            Outcome::Safe { .. } => ("safe", Some(e.kmax)),
        };
        for (label, v) in row {
            if key(v) != want {
                bad.push(format!("{} {label}: {:?}, oracle {want:?}", e.name, key(v)));
            }
        }
    }
    if !bad.is_empty() {
        return Err(format!("{} problems, e.g. {}", bad.len(), bad[0]));
    }
    if checked == 0 {
        return Err("the oracle decided no program".into());
    }
    Ok(format!(
        "{checked} oracle-decided programs match, {traces} traces replay ({:.1}s)",
        t.elapsed().as_secs_f64()
    ))
}

fn speedup_series(family: &str, extra: &[u64]) -> Result<Vec<(u64, f64)>, String> {
    let mut out = Vec::new();
    for d in [20u64, 40, 80] {
        let mut params = vec![d];
        params.extend_from_slice(extra);
        let inst = families::generate(family, &params).unwrap();
        let e = inst.expect.unwrap();
        let mk = |incremental| Options {
            incremental,
            slice: true,
            unwind_max: Some(e.kmax),
            ..Options::default()
        };
        let reps = if d == 80 && family == "deadvars" {
            3
        } else {
            7
        };
        let (ni, v1) = best_ms(&inst.source, &mk(false), reps);
        let (i, v2) = best_ms(&inst.source, &mk(true), reps);
        if key(&v1) != key(&v2) {
            return Err(format!("{}: verdicts differ", inst.name));
        }
        out.push((d, ni / i));
    }
    Ok(out)
}

fn criterion_3(_: &mut Ctx) -> Check {
    let mut msg = Vec::new();
    let mut ok = true;
    for (f, extra) in [("counter", &[][..]), ("deadvars", &[50][..])] {
        let s = speedup_series(f, extra)?;
        let monotone = s.windows(2).all(|w| w[1].1 >= w[0].1);
        let at80 = s.last().unwrap().1;
        ok &= monotone && at80 >= 3.0;
        let parts: Vec<String> = s.iter().map(|(d, x)| format!("d={d} x{x:.2}")).collect();
        msg.push(format!("{f}: {}", parts.join(" ")));
    }
    let msg = msg.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_4(_: &mut Ctx) -> Check {
    let inst = families::generate("deadvars", &[50, 50]).unwrap();
    let p = compile(&inst.source, CompileOptions::default()).unwrap();
    let mk = |incremental| Options {
        incremental,
        slice: true,
        unwind_max: Some(50),
        ..Options::default()
    };
    let (v1, ni) = run(&p, mk(false));
    let (v2, i) = run(&p, mk(true));
    if key(&v1) != key(&v2) {
        return Err("verdicts differ".into());
    }
    let ratio = i.mean_clauses_per_solve() / ni.mean_clauses_per_solve();
    let msg = format!(
        "mean clauses per solve: i {:.0}, ni {:.0}, ratio {ratio:.3}",
        i.mean_clauses_per_solve(),
        ni.mean_clauses_per_solve()
    );
    if ratio <= 0.7 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_5(cx: &mut Ctx) -> Check {
    let ind = |incremental, kmax| Options {
        incremental,
        k_induction: true,
        unwind_max: Some(kmax),
        ..Options::default()
    };
    let programs = [
        (
            "state u8 x := 0; loop main { if (x < 5) { x := x + 1; } assert(x <= 5); }",
            1,
        ),
        (
            "state u8 x := 0; loop main { x := x + 1; if (x == 4) { x := 0; } assert(x != 5); }",
            2,
        ),
    ];
    for (src, k) in programs {
        let p = compile(src, CompileOptions::default()).unwrap();
        for inc in [false, true] {
            let (v, _) = run(&p, ind(inc, 10));
            if key(&v) != ("proved", Some(k)) {
                return Err(format!(
                    "expected proved@{k}, got {:?} for `{src}`",
                    key(&v)
                ));
            }
        }
    }

    // no Proved verdict where the oracle reaches a violation
    let mut proved = 0;
    let mut bad = Vec::new();
    for e in cx.corpus().iter().filter(|e| e.prog.main_loops.len() == 1) {
        let Some(o) = &e.oracle else { continue };
        for inc in [false, true] {
            let (v, _) = run(&e.prog, ind(inc, e.kmax));
            match (&v, o) {
                (Verdict::Proved(_), _) => {
                    proved += 1;
                    let unbounded = oracle::reachability(&e.prog, Limits::default());
                    let refuted = matches!(o, Outcome::Violation { .. })
                        || matches!(unbounded, Ok(Outcome::Violation { .. }));
                    if refuted {
                        bad.push(format!("{}: false proof", e.name));
                    }
                }
                (
                    Verdict::CounterexampleFound { depth, .. },
                    Outcome::Violation { depth: d, .. },
                ) if depth == d => {}
                (Verdict::CounterexampleFound { .. }, _) => {
                    bad.push(format!("{}: {:?} vs oracle {o:?}", e.name, key(&v)))
                }
                (_, Outcome::Violation { .. }) => {
                    bad.push(format!("{}: missed violation, got {:?}", e.name, key(&v)))
                }
                _ => {}
            }
        }
    }
    if !bad.is_empty() {
        return Err(format!("{} problems, e.g. {}", bad.len(), bad[0]));
    }

    let inst = families::generate("induction", &[3, 8]).unwrap();
    let kmax = inst.expect.as_ref().unwrap().kmax;
    let (ni, v1) = best_ms(&inst.source, &ind(false, kmax), 9);
    let (i, v2) = best_ms(&inst.source, &ind(true, kmax), 9);
    if key(&v1) != ("proved", Some(3)) || key(&v2) != ("proved", Some(3)) {
        return Err(format!("{}: {:?} / {:?}", inst.name, key(&v1), key(&v2)));
    }
    let msg = format!(
        "Proved(1), Proved(2); {proved} proofs on the corpus, none false; 3-round family x{:.2}",
        ni / i
    );
    if ni / i >= 1.5 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

type Cnf = Vec<Vec<i32>>;

fn random_cnf(rng: &mut SmallRng) -> (usize, Cnf) {
    let n = rng.gen_range(1..=20usize);
    let m = ((n as f64) * rng.gen_range(3.0..=5.0)).round() as usize;
    let len = 3usize.min(n);
    let cnf = (0..m)
        .map(|_| {
            let mut c: Vec<i32> = Vec::new();
            while c.len() < len {
                let v = rng.gen_range(1..=n as i32);
                if !c.iter().any(|x| x.abs() == v) {
                    c.push(if rng.gen_bool(0.5) { v } else { -v });
                }
            }
            c
        })
        .collect();
    (n, cnf)
}

/// Plain enumeration of all assignments as bit masks.
fn exhaustive_sat(n: usize, cnf: &Cnf) -> bool {
    (0u32..1 << n).any(|m| {
        cnf.iter().all(|c| {
            c.iter()
                .any(|&l| ((m >> (l.unsigned_abs() - 1)) & 1 == 1) == (l > 0))
        })
    })
}

fn load(n: usize, cnf: &Cnf) -> Solver {
    let mut s = Solver::new();
    for _ in 0..n {
        s.new_var();
    }
    for c in cnf {
        let ls: Vec<Lit> = c.iter().map(|&x| Lit::from_dimacs(x as i64)).collect();
        s.add_clause(&ls);
    }
    s
}

fn criterion_6(_: &mut Ctx) -> Check {
    let mut rng = SmallRng::seed_from_u64(0x5a7);
    let (mut sat, mut unsat, mut assumed) = (0, 0, 0);
    for i in 0..10_000 {
        let (n, cnf) = random_cnf(&mut rng);
        let want = exhaustive_sat(n, &cnf);
        let mut s = load(n, &cnf);
        let got = s.solve(&[]);
        if got.is_sat() != want {
            return Err(format!(
                "instance {i}: solver {}, oracle {want}",
                got.is_sat()
            ));
        }
        if want {
            let ok = cnf.iter().all(|c| {
                c.iter()
                    .any(|&x| s.model_value(Lit::from_dimacs(x as i64)) == Some(true))
            });
            if !ok {
                return Err(format!("instance {i}: model violates a clause"));
            }
            sat += 1;
        } else {
            unsat += 1;
        }
        // assumptions behave like unit clauses
        let v = rng.gen_range(1..=n as i32);
        let a = if rng.gen_bool(0.5) { v } else { -v };
        let mut with_unit = cnf.clone();
        with_unit.push(vec![a]);
        let want = exhaustive_sat(n, &with_unit);
        let got = s.solve(&[Lit::from_dimacs(a as i64)]);
        if got.is_sat() != want || load(n, &with_unit).solve(&[]).is_sat() != want {
            return Err(format!(
                "instance {i}: assumption {a} disagrees with its unit"
            ));
        }
        if let SolveOutcome::Unsat(core) = got {
            if core
                .iter()
                .any(|l| l.var() != Lit::from_dimacs(a as i64).var())
            {
                return Err(format!("instance {i}: core outside the assumptions"));
            }
        }
        assumed += 1;
    }
    let mut s = Solver::new();
    let p: Vec<Vec<Var>> = (0..4)
        .map(|_| (0..3).map(|_| s.new_var()).collect())
        .collect();
    for row in &p {
        s.add_clause(&row.iter().map(|v| v.pos()).collect::<Vec<_>>());
    }
    for h in 0..3 {
        for i in 0..4 {
            for j in i + 1..4 {
                s.add_clause(&[p[i][h].neg(), p[j][h].neg()]);
            }
        }
    }
    if !s.solve(&[]).is_unsat() {
        return Err("PHP(4,3) reported satisfiable".into());
    }
    Ok(format!(
        "10000 random CNFs ({sat} sat, {unsat} unsat), {assumed} assumption checks, PHP(4,3) unsat"
    ))
}

fn criterion_7(_: &mut Ctx) -> Check {
    let p = compile("loop main { }", CompileOptions::default()).unwrap();
    let fix = |enc: &Encoder, v: &[Lit], x: u64| -> Vec<Lit> {
        v.iter()
            .enumerate()
            .map(|(i, &l)| if (x >> i) & 1 == 1 { l } else { !l })
            .filter(|&l| enc.lit_const(l).is_none())
            .collect()
    };
    let mut count = 0u64;
    for (w, samples) in [(4u8, None), (8, Some(100_000usize))] {
        let mut circuits = Vec::new();
        for signed in [false, true] {
            let ty = if signed {
                Ty::signed(w)
            } else {
                Ty::unsigned(w)
            };
            for op in BinOp::ALL {
                let mut enc = Encoder::new(&p, Solver::new(), EncoderOptions::default());
                let a = enc.fresh_bv(w as u32);
                let b = enc.fresh_bv(w as u32);
                let r = enc.binary_bv(op, &a, &b, ty);
                circuits.push((op, ty, enc, a, b, r));
            }
        }
        let check = |c: &mut (BinOp, Ty, Encoder, Vec<Lit>, Vec<Lit>, Vec<Lit>), x: u64, y: u64| {
            let (op, ty, enc, a, b, r) = c;
            let mut asm = fix(enc, a, x);
            asm.extend(fix(enc, b, y));
            if !enc.solver.solve(&asm).is_sat() {
                return Err(format!("{op:?} {ty}: circuit unsatisfiable at {x}, {y}"));
            }
            let got = enc.model_bv(r);
            let want = oracle::binary(*op, x, y, *ty);
            if got != want {
                return Err(format!(
                    "{op:?} {ty} {x} {y}: circuit {got}, reference {want}"
                ));
            }
            Ok(())
        };
        match samples {
            None => {
                for c in &mut circuits {
                    for x in 0..1u64 << w {
                        for y in 0..1u64 << w {
                            check(c, x, y)?;
                            count += 1;
                        }
                    }
                }
            }
            Some(n) => {
                let mut rng = SmallRng::seed_from_u64(0xb17);
                for _ in 0..n {
                    let i = rng.gen_range(0..circuits.len());
                    let x = rng.gen_range(0..1u64 << w);
                    let y = match rng.gen_range(0..8) {
                        0 => 0,
                        1 => rng.gen_range(0..w as u64 + 2),
                        _ => rng.gen_range(0..1u64 << w),
                    };
                    check(&mut circuits[i], x, y)?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!(
        "{count} operator evaluations (all pairs at width 4, 100000 samples at width 8)"
    ))
}

fn criterion_8(_: &mut Ctx) -> Check {
    let mut fired = 0;
    let mut lines = Vec::new();
    for w in [8u64, 16] {
        for variant in 0..3 {
            let inst = families::generate("mul_guard", &[w, variant]).unwrap();
            let e = inst.expect.unwrap();
            let p = compile(&inst.source, CompileOptions::default()).unwrap();
            for inc in [false, true] {
                let mk = |refine| Options {
                    incremental: inc,
                    refine,
                    unwind_max: Some(e.kmax),
                    ..Options::default()
                };
                let (exact, _) = run(&p, mk(false));
                let (refined, st) = run(&p, mk(true));
                if key(&exact) != key(&refined) {
                    return Err(format!(
                        "{}: exact {:?}, refined {:?}",
                        inst.name,
                        key(&exact),
                        key(&refined)
                    ));
                }
                if key(&exact) != (e.verdict.as_str(), Some(e.depth)) {
                    return Err(format!(
                        "{}: {:?} contradicts the sidecar",
                        inst.name,
                        key(&exact)
                    ));
                }
                if e.verdict == "safe" && st.over_approx_unsat > 0 {
                    fired += 1;
                }
                if inc {
                    lines.push(format!("{} {}", inst.name, st.over_approx_unsat));
                }
            }
        }
    }
    let msg = format!(
        "refined = exact on 6 programs; over-approx UNSAT counts: {}",
        lines.join(", ")
    );
    if fired > 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_9(cx: &mut Ctx) -> Check {
    let mut speedups = Vec::new();
    for n in [2u64, 3] {
        for d in 1..=3 {
            let inst = families::generate("multiloop", &[n, d]).unwrap();
            let e = inst.expect.clone().unwrap();
            let p = compile(&inst.source, CompileOptions::default()).unwrap();
            let target = p.find_main_loop(e.check_loop.as_deref().unwrap()).unwrap();
            let want = match oracle::bmc(&p, target, e.kmax, Limits::default()) {
                Ok(Outcome::Violation { depth, .. }) => ("cex", Some(depth)),
                Ok(Outcome::Safe { .. }) => ("safe", Some(e.kmax)),
                Err(err) => return Err(format!("{}: {err}", inst.name)),
            };
            let mk = |incremental| Options {
                incremental,
                slice: true,
                unwind_max: Some(e.kmax),
                check_loop: e.check_loop.clone(),
                ..Options::default()
            };
            let (ni, v1) = best_ms(&inst.source, &mk(false), 9);
            let (i, v2) = best_ms(&inst.source, &mk(true), 9);
            for v in [&v1, &v2] {
                if key(v) != want {
                    return Err(format!("{}: {:?}, oracle {want:?}", inst.name, key(v)));
                }
            }
            speedups.push(ni / i);
        }
    }
    let _ = cx;
    let g = geo_mean(&speedups);
    let msg = format!("6 instances match the oracle; geometric mean speedup x{g:.2}");
    if g > 1.5 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() -> ExitCode {
    let only: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let criteria: [(u32, fn(&mut Ctx) -> Check); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut cx = Ctx {
        corpus: None,
        verdicts: None,
    };
    let mut results = BTreeMap::new();
    for (n, f) in criteria {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let r = f(&mut cx);
        match &r {
            Ok(m) => println!("criterion {n}: PASS  {m}"),
            Err(m) => println!("criterion {n}: FAIL  {m}"),
        }
        results.insert(n, r.is_ok());
    }
    if results.values().all(|ok| *ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
