//! DIMACS CNF reading and writing.

use std::fmt::Write;

use ibmc_core::sat::{Lit, Solver};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {0}: malformed problem line")]
    Header(usize),
    #[error("line {0}: `{1}` is not a literal")]
    Literal(usize, String),
    #[error("line {0}: literal {1} exceeds the declared {2} variables")]
    Range(usize, i64, usize),
    #[error("clause data before the problem line")]
    MissingHeader,
    #[error("unterminated last clause")]
    Unterminated,
}

/// Parse DIMACS CNF. Clauses may span lines; a `%` line ends the input (as in
/// the SATLIB benchmark files). The declared clause count is not enforced.
pub fn parse(text: &str) -> Result<Cnf, DimacsError> {
    let mut cnf = Cnf::default();
    let mut header = false;
    let mut cur: Vec<i64> = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let no = no + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let f: Vec<&str> = rest.split_whitespace().collect();
            if header || f.len() != 3 || f[0] != "cnf" {
                return Err(DimacsError::Header(no));
            }
            cnf.num_vars = f[1].parse().map_err(|_| DimacsError::Header(no))?;
            f[2].parse::<usize>().map_err(|_| DimacsError::Header(no))?;
            header = true;
            continue;
        }
        if !header {
            return Err(DimacsError::MissingHeader);
        }
        for tok in line.split_whitespace() {
            let x: i64 = tok
                .parse()
                .map_err(|_| DimacsError::Literal(no, tok.to_string()))?;
            if x == 0 {
                cnf.clauses.push(std::mem::take(&mut cur));
            } else if x.unsigned_abs() as usize > cnf.num_vars {
                return Err(DimacsError::Range(no, x, cnf.num_vars));
            } else {
                cur.push(x);
            }
        }
    }
    if !cur.is_empty() {
        return Err(DimacsError::Unterminated);
    }
    if !header && cnf.clauses.is_empty() {
        return Err(DimacsError::MissingHeader);
    }
    Ok(cnf)
}

pub fn write(cnf: &Cnf, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "c {c}");
    }
    let _ = writeln!(out, "p cnf {} {}", cnf.num_vars, cnf.clauses.len());
    for c in &cnf.clauses {
        for l in c {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    out
}

impl Cnf {
    /// Clause set of a solver that records its input clauses.
    pub fn from_recorded(solver: &Solver) -> Option<Cnf> {
        let rec = solver.recorded_clauses()?;
        Some(Cnf {
            num_vars: solver.num_vars(),
            clauses: rec
                .iter()
                .map(|c| c.iter().map(|l| l.to_dimacs()).collect())
                .collect(),
        })
    }

    pub fn load(&self, solver: &mut Solver) {
        while solver.num_vars() < self.num_vars {
            solver.new_var();
        }
        for c in &self.clauses {
            let lits: Vec<Lit> = c.iter().map(|&x| Lit::from_dimacs(x)).collect();
            solver.add_clause(&lits);
        }
    }
}
