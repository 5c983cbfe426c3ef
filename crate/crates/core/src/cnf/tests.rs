use super::*;
use crate::bv::{eval_binary, BinOp, Ty};
use crate::frontend::{compile, CompileOptions};

fn empty() -> TypedProgram {
    compile("loop main { }", CompileOptions::default()).unwrap()
}

fn fix(e: &Encoder, v: &[Lit], x: u64) -> Vec<Lit> {
    v.iter()
        .enumerate()
        .map(|(i, &l)| if (x >> i) & 1 == 1 { l } else { !l })
        .filter(|&l| e.lit_const(l).is_none())
        .collect()
}

#[test]
fn every_operator_at_width_three() {
    let p = empty();
    for signed in [false, true] {
        let ty = if signed {
            Ty::signed(3)
        } else {
            Ty::unsigned(3)
        };
        for op in BinOp::ALL {
            let mut e = Encoder::new(&p, Solver::new(), EncoderOptions::default());
            let a = e.fresh_bv(3);
            let b = e.fresh_bv(3);
            let r = e.binary_bv(op, &a, &b, ty);
            for x in 0..8 {
                for y in 0..8 {
                    let mut asm = fix(&e, &a, x);
                    asm.extend(fix(&e, &b, y));
                    assert!(e.solver.solve(&asm).is_sat());
                    assert_eq!(
                        e.model_bv(&r),
                        eval_binary(op, x, y, ty),
                        "{op:?} {ty} {x} {y}"
                    );
                }
            }
        }
    }
}

#[test]
fn constants_fold_without_clauses() {
    let p = empty();
    let mut e = Encoder::new(&p, Solver::new(), EncoderOptions::default());
    let before = e.stats.clauses;
    let a = e.const_bv(6, 8);
    let b = e.const_bv(7, 8);
    let r = e.binary_bv(BinOp::Mul, &a, &b, Ty::unsigned(8));
    assert_eq!(e.bv_const_value(&r), Some(42));
    assert_eq!(e.stats.clauses, before);
}

#[test]
fn over_approximation_contains_exact_result() {
    let p = empty();
    let ty = Ty::unsigned(6);
    let mut e = Encoder::new(&p, Solver::new(), EncoderOptions::default());
    let a = e.fresh_bv(6);
    let b = e.fresh_bv(6);
    let tag = ApproxTag { eq: 0, node: 0 };
    let (r, beta) = e.encode_approx(tag, BinOp::Mul, ty, &a, &b, ApproxMode::Over(2));
    for (x, y) in [(5u64, 7u64), (63, 63), (12, 3)] {
        let mut asm = fix(&e, &a, x);
        asm.extend(fix(&e, &b, y));
        asm.extend(fix(&e, &r, eval_binary(BinOp::Mul, x, y, ty)));
        asm.push(!beta);
        assert!(e.solver.solve(&asm).is_sat());
    }
}

#[test]
fn under_approximation_is_exact_on_small_operands() {
    let p = empty();
    let ty = Ty::signed(6);
    let mut e = Encoder::new(&p, Solver::new(), EncoderOptions::default());
    let a = e.fresh_bv(6);
    let b = e.fresh_bv(6);
    let tag = ApproxTag { eq: 0, node: 0 };
    let (r, beta) = e.encode_approx(tag, BinOp::Div, ty, &a, &b, ApproxMode::Under(3));
    // -3 and 2 fit in three signed bits
    let (x, y) = (0b111101u64, 2u64);
    let mut asm = fix(&e, &a, x);
    asm.extend(fix(&e, &b, y));
    asm.push(!beta);
    assert!(e.solver.solve(&asm).is_sat());
    assert_eq!(e.model_bv(&r), eval_binary(BinOp::Div, x, y, ty));
    // 20 does not
    let mut asm = fix(&e, &a, 20);
    asm.push(!beta);
    assert!(e.solver.solve(&asm).is_unsat());
}
