//! Pretty-printing is a fixpoint of compile after one round.

mod common;

use common::Gen;
use ibmc_core::frontend::{compile, pretty_print, CompileOptions};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_compile_print_is_stable(seed in any::<u64>(), loops in 1usize..4) {
        let src = Gen::new(seed).loops(loops);
        let p1 = compile(&src, CompileOptions::default()).unwrap();
        let s1 = pretty_print(&p1);
        let p2 = compile(&s1, CompileOptions::default())
            .unwrap_or_else(|e| panic!("{e}\n{s1}"));
        let s2 = pretty_print(&p2);
        prop_assert_eq!(&s1, &s2);
        prop_assert_eq!(p1.asserts.len(), p2.asserts.len());
        prop_assert_eq!(p1.main_loops.len(), p2.main_loops.len());
    }
}

#[test]
fn bounded_loops_expand_in_order() {
    let src = "state u8 x := 0; loop main { for i in 0..3 { x := x * 2 + i; } assert(x != 4); }";
    let p = compile(src, CompileOptions::default()).unwrap();
    let text = pretty_print(&p);
    assert!(!text.contains("for "), "{text}");
    // x: 0 -> 0 -> 1 -> 4, so the assert fails in the first iteration
    let out = ibmc_core::interp::run(&p, &[0, 0], &mut ibmc_core::interp::ZeroEnv);
    assert_eq!(out.violation.map(|v| v.0), Some(1));
}

#[test]
fn unwinding_assertions_are_optional() {
    let src = "state u8 x := 0; loop main { for i in 0..2 { x := x + 1; } }";
    let with = compile(
        src,
        CompileOptions {
            unwinding_assertions: true,
            ..CompileOptions::default()
        },
    )
    .unwrap();
    let without = compile(
        src,
        CompileOptions {
            unwinding_assertions: false,
            ..CompileOptions::default()
        },
    )
    .unwrap();
    assert_eq!(with.asserts.len(), without.asserts.len() + 1);
    assert!(with.asserts.last().unwrap().unwinding);
    // the bound is exact, so the extra assert never fires
    let out = ibmc_core::interp::run(&with, &[0; 4], &mut ibmc_core::interp::ZeroEnv);
    assert_eq!(out.violation, None);
}
