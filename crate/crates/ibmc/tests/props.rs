use ibmc::bench::{self, Mode, RunRecord};
use ibmc::dimacs::{self, Cnf};
use ibmc::families::Expectation;
use proptest::prelude::*;

fn cnf() -> impl Strategy<Value = Cnf> {
    (1usize..30).prop_flat_map(|n| {
        let lit = (1..=n as i64, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
        prop::collection::vec(prop::collection::vec(lit, 0..6), 0..40).prop_map(move |clauses| {
            Cnf {
                num_vars: n,
                clauses,
            }
        })
    })
}

fn mode() -> impl Strategy<Value = Mode> {
    any::<[bool; 5]>().prop_map(|b| Mode {
        incremental: b[0],
        slice: b[1],
        preprocess: b[2],
        refine: b[3],
        induction: b[4],
    })
}

fn record(name: String, mode: Mode, solved: bool, ms: f64) -> RunRecord {
    RunRecord {
        benchmark: name,
        mode,
        verdict: if solved { "safe" } else { "timeout" }.into(),
        depth: Some(1),
        wall_ms: ms,
        solve_ms: ms / 2.0,
        clauses: 0,
        vars: 0,
        solves: 1,
        peak_mem_kb: 0,
        summary: None,
        mismatch: None,
    }
}

proptest! {
    #[test]
    fn dimacs_write_then_parse(c in cnf(), comment in "[a-z =0-9]{0,20}") {
        let text = dimacs::write(&c, &[comment]);
        prop_assert_eq!(dimacs::parse(&text).unwrap(), c);
    }

    #[test]
    fn mode_names_round_trip(m in mode()) {
        prop_assert_eq!(m.to_string().parse::<Mode>().unwrap(), m);
    }

    #[test]
    fn sidecars_round_trip(
        cex in any::<bool>(),
        depth in 0u32..1000,
        kmax in 0u32..1000,
        lp in proptest::option::of("main\\.[0-9]"),
        ind in proptest::option::of((prop::sample::select(vec!["proved", "cex", "safe"]), 0u32..50)),
    ) {
        let e = Expectation {
            verdict: if cex { "cex" } else { "safe" }.into(),
            depth,
            kmax,
            check_loop: lp,
            induction: ind.map(|(v, d)| (v.to_string(), d)),
        };
        prop_assert_eq!(Expectation::parse(&e.to_sidecar()).unwrap(), e);
    }

    #[test]
    fn speedups_cover_exactly_the_common_solved_set(
        runs in prop::collection::vec((any::<bool>(), any::<bool>(), 0.01f64..1e4, 0.01f64..1e4), 1..30),
    ) {
        let (a, b): (Mode, Mode) = ("ni+s+p".parse().unwrap(), "i+s+p".parse().unwrap());
        let mut recs = Vec::new();
        for (i, (sa, sb, ta, tb)) in runs.iter().enumerate() {
            recs.push(record(format!("b{i:02}"), a, *sa, *ta));
            recs.push(record(format!("b{i:02}"), b, *sb, *tb));
        }
        let c = bench::compare(&recs, a, b);
        let both = runs.iter().filter(|r| r.0 && r.1).count();
        let one = runs.iter().filter(|r| r.0 != r.1).count();
        prop_assert_eq!(c.rows.len(), both);
        prop_assert_eq!(c.excluded.len(), one);
        if both > 0 {
            let g = c.geo_mean.unwrap();
            let lo = c.rows.iter().map(|r| r.3).fold(f64::MAX, f64::min);
            let hi = c.rows.iter().map(|r| r.3).fold(0.0, f64::max);
            prop_assert!(g >= lo * (1.0 - 1e-9) && g <= hi * (1.0 + 1e-9));
            prop_assert!(g <= c.arith_mean.unwrap() * (1.0 + 1e-9));
        }
        let same = bench::compare(&recs, b, b);
        if let Some(g) = same.geo_mean {
            prop_assert!((g - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn csv_has_one_row_per_record(n in 0usize..20) {
        let recs: Vec<RunRecord> = (0..n)
            .map(|i| record(format!("b{i}"), "i".parse().unwrap(), i % 2 == 0, i as f64))
            .collect();
        let csv = bench::to_csv(&recs);
        prop_assert_eq!(csv.lines().count(), n + 1);
        for line in csv.lines() {
            prop_assert_eq!(line.split(',').count(), 10);
        }
    }
}
