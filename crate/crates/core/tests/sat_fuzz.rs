//! Differential fuzzing of the CDCL solver against exhaustive search.

use ibmc_core::sat::{Lit, SolveOutcome, Solver, Var};
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

type Cnf = Vec<Vec<i32>>;

fn random_cnf(rng: &mut SmallRng) -> (usize, Cnf) {
    // 3-SAT; the clause ratio range straddles the phase transition
    let n = rng.gen_range(1..=20usize);
    let ratio = rng.gen_range(3.0..=5.0);
    let m = ((n as f64) * ratio).round() as usize;
    let cnf = (0..m)
        .map(|_| {
            let len = 3usize.min(n);
            let mut c: Vec<i32> = Vec::new();
            while c.len() < len {
                let v = rng.gen_range(1..=n as i32);
                if c.iter().any(|x| x.abs() == v) {
                    continue;
                }
                c.push(if rng.gen_bool(0.5) { v } else { -v });
            }
            c
        })
        .collect();
    (n, cnf)
}

/// Exhaustive search over all assignments, skipping subtrees in which some
/// clause is already falsified.
fn brute_force(n: usize, cnf: &Cnf) -> Option<Vec<bool>> {
    fn falsified(cnf: &Cnf, assign: &[Option<bool>]) -> bool {
        cnf.iter().any(|c| {
            c.iter().all(|&l| {
                let v = assign[l.unsigned_abs() as usize - 1];
                v == Some(l < 0)
            })
        })
    }
    fn go(i: usize, n: usize, cnf: &Cnf, assign: &mut Vec<Option<bool>>) -> bool {
        if falsified(cnf, assign) {
            return false;
        }
        if i == n {
            return true;
        }
        for b in [false, true] {
            assign[i] = Some(b);
            if go(i + 1, n, cnf, assign) {
                return true;
            }
        }
        assign[i] = None;
        false
    }
    let mut assign = vec![None; n];
    go(0, n, cnf, &mut assign).then(|| assign.iter().map(|x| x.unwrap()).collect())
}

fn lit(x: i32) -> Lit {
    Lit::from_dimacs(x as i64)
}

fn load(n: usize, cnf: &Cnf) -> Solver {
    let mut s = Solver::new();
    for _ in 0..n {
        s.new_var();
    }
    for c in cnf {
        let ls: Vec<Lit> = c.iter().map(|&x| lit(x)).collect();
        s.add_clause(&ls);
    }
    s
}

fn satisfies(s: &Solver, cnf: &Cnf) -> bool {
    cnf.iter()
        .all(|c| c.iter().any(|&x| s.model_value(lit(x)) == Some(true)))
}

#[test]
fn ten_thousand_random_instances() {
    let mut rng = SmallRng::seed_from_u64(6);
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..10_000 {
        let (n, cnf) = random_cnf(&mut rng);
        let want = brute_force(n, &cnf).is_some();
        let mut s = load(n, &cnf);
        let got = s.solve(&[]);
        assert_eq!(got.is_sat(), want, "{cnf:?}");
        if want {
            assert!(satisfies(&s, &cnf));
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    assert!(sat > 1000 && unsat > 1000, "{sat} {unsat}");
}

#[test]
fn assumptions_match_unit_clauses() {
    let mut rng = SmallRng::seed_from_u64(7);
    for _ in 0..10_000 {
        let (n, cnf) = random_cnf(&mut rng);
        let mut s = load(n, &cnf);
        // several assumption sets against the same solver
        for _ in 0..3 {
            let k = rng.gen_range(1..=3usize.min(n));
            let mut asm: Vec<i32> = Vec::new();
            while asm.len() < k {
                let v = rng.gen_range(1..=n as i32);
                if !asm.iter().any(|x| x.abs() == v) {
                    asm.push(if rng.gen_bool(0.5) { v } else { -v });
                }
            }
            let mut with_units = cnf.clone();
            with_units.extend(asm.iter().map(|&x| vec![x]));
            let want = brute_force(n, &with_units).is_some();
            let lits: Vec<Lit> = asm.iter().map(|&x| lit(x)).collect();
            match s.solve(&lits) {
                SolveOutcome::Sat => {
                    assert!(want);
                    assert!(satisfies(&s, &with_units));
                }
                SolveOutcome::Unsat(core) => {
                    assert!(!want);
                    // the core is a subset of the assumptions
                    assert!(core.iter().all(|l| lits.contains(l) || lits.contains(&!*l)));
                }
                SolveOutcome::Interrupted => unreachable!(),
            }
            let mut fresh = load(n, &with_units);
            assert_eq!(fresh.solve(&[]).is_sat(), want);
        }
    }
}

#[test]
fn pigeonhole_four_into_three() {
    let mut s = Solver::new();
    let p: Vec<Vec<Var>> = (0..4)
        .map(|_| (0..3).map(|_| s.new_var()).collect())
        .collect();
    for row in &p {
        let c: Vec<Lit> = row.iter().map(|v| v.pos()).collect();
        s.add_clause(&c);
    }
    for h in 0..3 {
        for i in 0..4 {
            for j in i + 1..4 {
                s.add_clause(&[p[i][h].neg(), p[j][h].neg()]);
            }
        }
    }
    assert!(s.solve(&[]).is_unsat());
}

#[test]
fn preprocessing_does_not_change_answers() {
    let mut rng = SmallRng::seed_from_u64(9);
    for _ in 0..2_000 {
        let (n, cnf) = random_cnf(&mut rng);
        let mut a = load(n, &cnf);
        let mut b = Solver::new();
        b.set_preprocessing(false).unwrap();
        for _ in 0..n {
            b.new_var();
        }
        for c in &cnf {
            let ls: Vec<Lit> = c.iter().map(|&x| lit(x)).collect();
            b.add_clause(&ls);
        }
        assert_eq!(a.solve(&[]).is_sat(), b.solve(&[]).is_sat());
    }
}
