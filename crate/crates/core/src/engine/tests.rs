use super::*;
use crate::frontend::{compile, CompileOptions};
use alloc::format;
use alloc::string::String;

fn prog(src: &str) -> TypedProgram {
    compile(src, CompileOptions::default()).unwrap()
}

fn opts(incremental: bool, kmax: u32) -> Options {
    Options {
        incremental,
        unwind_max: Some(kmax),
        ..Options::default()
    }
}

fn check(p: &TypedProgram, o: Options) -> (Verdict, RunStats) {
    let mut c = Checker::new(p, o).unwrap();
    let v = c.run(&mut NoHooks);
    (v, c.stats)
}

const COUNTER: &str = "state u8 c := 0; loop main { c := c + 1; assert(c != 3); }";

#[test]
fn counter_fails_at_three_in_both_modes() {
    let p = prog(COUNTER);
    for inc in [false, true] {
        let (v, _) = check(&p, opts(inc, 10));
        assert_eq!(v.depth(), Some(3), "{v:?}");
        let t = v.trace().unwrap();
        assert_eq!(t.steps.len(), 4);
        assert_eq!(t.violated_step, 3);
        assert_eq!(t.replay(&p), Some((3, alloc::vec![0])));
    }
}

#[test]
fn safe_program_takes_one_solve_per_depth() {
    let p = prog("state u8 c := 0; loop main { c := c + 1; assert(true); }");
    let (v, s) = check(&p, opts(true, 10));
    assert_eq!(v, Verdict::BoundedSafe(10));
    assert_eq!(s.property_solves, 11);
}

#[test]
fn initial_state_violation() {
    let p = prog("state u1 b := 1; loop main { assert(b == 0); }");
    let (v, _) = check(&p, opts(true, 5));
    // the assert is first evaluated in iteration 1
    assert_eq!(v.depth(), Some(1));
    let p = prog("state u1 b := 1; init { assert(b == 0); } loop main { }");
    let (v, _) = check(&p, opts(true, 5));
    assert_eq!(v.depth(), Some(0));
    assert_eq!(v.trace().unwrap().steps.len(), 1);
}

#[test]
fn input_needed_at_step_one() {
    let p =
        prog("input u8 t; state u8 s := 0; loop main { if (s == 0) { assert(t != 5); } s := 1; }");
    for inc in [false, true] {
        let (v, _) = check(&p, opts(inc, 4));
        let t = v.trace().unwrap();
        assert_eq!(t.violated_step, 1);
        assert_eq!(t.steps[1].inputs[0].1, crate::interp::Value::Scalar(5));
    }
}

#[test]
fn slicing_shrinks_the_formula() {
    let mut src = String::from("input u8 t; state u8 x := 0;");
    for i in 0..10 {
        src.push_str(&format!(" state u8 d{i} := {i};"));
    }
    src.push_str(" loop main {");
    for i in 0..10 {
        src.push_str(&format!(" d{i} := d{i} * t + {i};"));
    }
    src.push_str(" if (t == 3) { x := x + 1; } assert(x < 200); }");
    let p = prog(&src);
    let (v1, s1) = check(&p, opts(true, 6));
    let (v2, s2) = check(
        &p,
        Options {
            slice: true,
            ..opts(true, 6)
        },
    );
    assert_eq!(v1, v2);
    assert!(s2.final_clauses < s1.final_clauses);
}

fn induct(src: &str, incremental: bool) -> Verdict {
    let p = prog(src);
    check(
        &p,
        Options {
            k_induction: true,
            ..opts(incremental, 10)
        },
    )
    .0
}

#[test]
fn saturating_counter_is_one_inductive() {
    let src = "state u8 x := 0; loop main { if (x < 5) { x := x + 1; } assert(x <= 5); }";
    assert_eq!(induct(src, true), Verdict::Proved(1));
    assert_eq!(induct(src, false), Verdict::Proved(1));
}

#[test]
fn reset_counter_is_two_inductive() {
    let src = "state u8 x := 0; loop main { x := x + 1; if (x == 4) { x := 0; } assert(x != 5); }";
    assert_eq!(induct(src, true), Verdict::Proved(2));
    assert_eq!(induct(src, false), Verdict::Proved(2));
}

#[test]
fn induction_reports_base_case_failures() {
    let v = induct("init { assert(false); } loop main { }", true);
    assert_eq!(v.depth(), Some(0));
    assert!(v.trace().is_some());
    let v = induct(COUNTER, true);
    assert_eq!(v.depth(), Some(3));
}

#[test]
fn refinement_agrees_and_short_circuits() {
    // the property does not depend on the product
    let p = prog("input u16 a; input u16 b; state u16 m := 0; state u16 c := 0; loop main { m := a * b; c := c + 1; assert(c != 100); }");
    let (v, s) = check(
        &p,
        Options {
            refine: true,
            ..opts(true, 5)
        },
    );
    assert_eq!(v, Verdict::BoundedSafe(5));
    assert!(s.over_approx_unsat > 0);
    assert_eq!(s.refinements, 0);
}

#[test]
fn refinement_finds_genuine_bugs() {
    let p = prog("input u16 a; input u16 b; loop main { assume(a > 1); assume(b > 1); assert(a * b != 391); }");
    let (exact, _) = check(&p, opts(true, 3));
    let (refined, s) = check(
        &p,
        Options {
            refine: true,
            ..opts(true, 3)
        },
    );
    assert_eq!(exact.depth(), Some(1));
    assert_eq!(refined.depth(), Some(1));
    assert_eq!(refined.trace().unwrap().replay(&p).map(|r| r.0), Some(1));
    assert!(s.refinement_solves > 0);
}

#[test]
fn mul_by_zero_is_proved_after_refinement() {
    let p = prog("input u32 x; loop main { assert(x * 0 == 0); }");
    let (v, _) = check(
        &p,
        Options {
            refine: true,
            ..opts(true, 2)
        },
    );
    assert_eq!(v, Verdict::BoundedSafe(2));
}

#[test]
fn arrays_with_lazy_consistency() {
    let src = "input u3 i; input u8 v; state u8[8] a := nondet(); loop main { a[i] := v; assert(a[i] == v); }";
    let p = prog(src);
    for refine in [false, true] {
        let (v, _) = check(
            &p,
            Options {
                refine,
                ..opts(true, 3)
            },
        );
        assert_eq!(v, Verdict::BoundedSafe(3));
    }
    let src =
        "input u3 i; input u3 j; state u8[8] a := nondet(); loop main { assert(a[i] == a[j]); }";
    let p = prog(src);
    let (v, _) = check(
        &p,
        Options {
            refine: true,
            ..opts(true, 3)
        },
    );
    assert_eq!(v.depth(), Some(1));
    assert_eq!(v.trace().unwrap().replay(&p).map(|r| r.0), Some(1));
}

#[test]
fn two_loops_bug_in_second() {
    let src = "state u8 x := 0; state u8 y := 0; loop first { x := x + 1; } loop second { y := y + 1; assert(y != 2); }";
    let p = prog(src);
    for inc in [false, true] {
        let (v, _) = check(&p, opts(inc, 3));
        match &v {
            Verdict::CounterexampleFound {
                depth,
                loop_id,
                loop_depth,
                trace,
            } => {
                assert_eq!((*depth, loop_id.as_str(), *loop_depth), (5, "main.1", 2));
                assert_eq!(trace.replay(&p).map(|r| r.0), Some(5));
            }
            _ => panic!("{v:?}"),
        }
    }
}

#[test]
fn bug_in_first_loop_stops_early() {
    let src = "state u8 x := 0; loop first { x := x + 1; assert(x != 1); } loop second { assert(false); }";
    let p = prog(src);
    let (v, _) = check(&p, opts(true, 3));
    assert_eq!(v.depth(), Some(1));
    match v {
        Verdict::CounterexampleFound { loop_id, .. } => assert_eq!(loop_id, "main.0"),
        _ => unreachable!(),
    }
}

#[test]
fn stop_when_unsat_mode() {
    let p = prog(
        "input u1 t; state u8 x := 0; loop main { if (x < 2) { x := x + 1; assert(t == 0); } }",
    );
    let (v, _) = check(
        &p,
        Options {
            stop_when_unsat: true,
            ..opts(true, 10)
        },
    );
    // step 0 has no atom, so the first query is already unsatisfiable
    assert_eq!(v, Verdict::Unsat(0));
}

#[test]
fn contradictory_flags() {
    let p = prog(COUNTER);
    let o = Options {
        k_induction: true,
        stop_when_unsat: true,
        ..Options::default()
    };
    assert!(matches!(Checker::new(&p, o), Err(EngineError::Usage(_))));
}
