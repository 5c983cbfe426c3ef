//! Every engine configuration agrees on random programs, and every
//! counterexample replays concretely.

mod common;

use std::collections::BTreeSet;

use common::Gen;
use ibmc_core::engine::NoHooks;
use ibmc_core::frontend::{compile, CompileOptions};
use ibmc_core::slicer::{full_slice, SliceState};
use ibmc_core::symex::{SsaName, SymexOptions, UnwindingSession};
use ibmc_core::{Checker, Options, TypedProgram, Verdict};

fn run(p: &TypedProgram, o: Options) -> Verdict {
    let mut c = Checker::new(p, o).unwrap();
    c.run(&mut NoHooks)
}

fn key(v: &Verdict) -> (&'static str, Option<u32>) {
    (v.name(), v.depth())
}

#[test]
fn incremental_slice_equals_full_slice() {
    for seed in 0..300u64 {
        let src = Gen::new(seed).loops(1 + (seed % 2) as usize);
        let p = compile(&src, CompileOptions::default()).unwrap();
        let mut s = UnwindingSession::for_loop(&p, 0, SymexOptions::default());
        let mut st = SliceState::new(true);
        let mut union = BTreeSet::new();
        let mut roots: Vec<SsaName> = Vec::new();
        for k in 0..6 {
            if k > 0 {
                s.unwind_step();
            }
            let frames = &s.frames()[st.seen_frames()..];
            let new_roots: Vec<SsaName> = frames
                .iter()
                .flat_map(|f| f.atoms.iter().map(|a| a.name))
                .collect();
            for id in st.slice_increment(frames, &new_roots) {
                assert!(union.insert(id), "equation {id} returned twice");
            }
            roots.extend(new_roots);
            assert_eq!(union, full_slice(s.frames(), &roots), "k={k}\n{src}");
            assert_eq!(&union, st.kept());
        }
    }
}

#[test]
fn bmc_configurations_agree() {
    let mut cex = 0;
    for seed in 0..120u64 {
        let src = Gen::new(seed).program();
        let p = compile(&src, CompileOptions::default()).unwrap();
        let base = Options {
            unwind_max: Some(4),
            seed,
            ..Options::default()
        };
        let reference = run(&p, base.clone());
        let variants = [
            Options {
                incremental: true,
                ..base.clone()
            },
            Options {
                incremental: true,
                slice: true,
                ..base.clone()
            },
            Options {
                slice: true,
                ..base.clone()
            },
            Options {
                incremental: true,
                refine: true,
                ..base.clone()
            },
            Options {
                incremental: true,
                constant_propagation: false,
                ..base.clone()
            },
            Options {
                incremental: true,
                sat_preprocessing: false,
                ..base.clone()
            },
            Options {
                incremental: true,
                compaction_threshold: 0.0,
                ..base.clone()
            },
        ];
        for (i, o) in variants.into_iter().enumerate() {
            let v = run(&p, o);
            assert_eq!(key(&v), key(&reference), "variant {i}\n{src}");
            if let Some(t) = v.trace() {
                assert_eq!(t.replay(&p).map(|r| r.0), v.depth(), "variant {i}\n{src}");
            }
        }
        if let Some(t) = reference.trace() {
            cex += 1;
            let (step, asserts) = t.replay(&p).unwrap();
            assert_eq!(Some(step), reference.depth());
            assert!(asserts.contains(&t.violated));
        }
    }
    // enough of both outcomes to mean something
    assert!(cex > 20 && cex < 110, "{cex}");
}

#[test]
fn multi_loop_configurations_agree() {
    for seed in 0..60u64 {
        let src = Gen::new(500 + seed).loops(2);
        let p = compile(&src, CompileOptions::default()).unwrap();
        for check_loop in ["l0", "l1"] {
            let base = Options {
                unwind_max: Some(3),
                check_loop: Some(check_loop.into()),
                ..Options::default()
            };
            let a = run(&p, base.clone());
            let b = run(
                &p,
                Options {
                    incremental: true,
                    ..base.clone()
                },
            );
            let c = run(
                &p,
                Options {
                    incremental: true,
                    slice: true,
                    ..base
                },
            );
            assert_eq!(key(&a), key(&b), "{check_loop}\n{src}");
            assert_eq!(key(&a), key(&c), "{check_loop}\n{src}");
            if let Some(t) = b.trace() {
                assert_eq!(t.replay(&p).map(|r| r.0), b.depth());
            }
        }
    }
}

#[test]
fn induction_modes_agree() {
    let mut proved = 0;
    for seed in 0..120u64 {
        let src = Gen::new(seed).program();
        let p = compile(&src, CompileOptions::default()).unwrap();
        let base = Options {
            unwind_max: Some(4),
            k_induction: true,
            ..Options::default()
        };
        let a = run(&p, base.clone());
        let b = run(
            &p,
            Options {
                incremental: true,
                ..base.clone()
            },
        );
        let c = run(
            &p,
            Options {
                incremental: true,
                slice: true,
                ..base
            },
        );
        assert_eq!(key(&a), key(&b), "{src}");
        assert_eq!(key(&a), key(&c), "{src}");
        if matches!(a, Verdict::Proved(_)) {
            proved += 1;
            // a proof implies no bounded counterexample
            let bmc = run(
                &p,
                Options {
                    unwind_max: Some(6),
                    incremental: true,
                    ..Options::default()
                },
            );
            assert_eq!(bmc.name(), "safe", "{src}");
        }
    }
    assert!(proved > 5, "{proved}");
}
