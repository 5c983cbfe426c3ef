//! Random well-typed programs for differential tests.
#![allow(dead_code)]

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

#[derive(Clone, Copy)]
struct V {
    name: usize,
    ty: &'static str,
    width: u32,
}

const TYPES: [(&str, u32); 4] = [("u1", 1), ("u4", 4), ("u8", 8), ("i4", 4)];

pub struct Gen {
    rng: SmallRng,
    inputs: Vec<V>,
    states: Vec<V>,
    array: Option<(&'static str, u32)>,
    src: String,
    locals: usize,
    pub max_depth: u32,
}

fn name(v: V, input: bool) -> String {
    if input {
        format!("in{}", v.name)
    } else {
        format!("s{}", v.name)
    }
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen {
            rng: SmallRng::seed_from_u64(seed),
            inputs: Vec::new(),
            states: Vec::new(),
            array: None,
            src: String::new(),
            locals: 0,
            max_depth: 2,
        }
    }

    fn pick_ty(&mut self) -> (&'static str, u32) {
        TYPES[self.rng.gen_range(0..TYPES.len())]
    }

    fn literal(&mut self, ty: &str, width: u32) -> String {
        if ty.starts_with('i') && self.rng.gen_bool(0.3) {
            format!("-{}", self.rng.gen_range(1..=(1u64 << (width - 1))))
        } else if ty.starts_with('i') {
            self.rng.gen_range(0..(1u64 << (width - 1))).to_string()
        } else {
            self.rng.gen_range(0..=((1u64 << width) - 1)).to_string()
        }
    }

    /// Expression of the given type.
    fn expr(&mut self, ty: &'static str, width: u32, depth: u32) -> String {
        let leaf = depth == 0 || self.rng.gen_bool(0.35);
        if leaf {
            let cands: Vec<String> = self
                .inputs
                .iter()
                .filter(|v| v.ty == ty)
                .map(|v| name(*v, true))
                .chain(
                    self.states
                        .iter()
                        .filter(|v| v.ty == ty)
                        .map(|v| name(*v, false)),
                )
                .collect();
            if let Some((aty, _)) = self.array {
                if aty == ty && self.rng.gen_bool(0.15) {
                    let i = self.expr("u4", 4, 0);
                    return format!("arr[{i}]");
                }
            }
            if !cands.is_empty() && self.rng.gen_bool(0.7) {
                return cands[self.rng.gen_range(0..cands.len())].clone();
            }
            return self.literal(ty, width);
        }
        match self.rng.gen_range(0..10) {
            0 => {
                let c = self.cond(depth - 1);
                let a = self.expr(ty, width, depth - 1);
                let b = self.expr(ty, width, depth - 1);
                format!("({c} ? {a} : {b})")
            }
            1 => {
                // cast a variable; a bare literal would take the target type
                let vars: Vec<(String, &str)> = self
                    .inputs
                    .iter()
                    .map(|v| (name(*v, true), v.ty))
                    .chain(self.states.iter().map(|v| (name(*v, false), v.ty)))
                    .filter(|(_, t)| *t != ty)
                    .collect();
                if vars.is_empty() {
                    self.expr(ty, width, depth - 1)
                } else {
                    let (n, _) = &vars[self.rng.gen_range(0..vars.len())];
                    format!("({n} as {ty})")
                }
            }
            2 => {
                let a = self.expr(ty, width, depth - 1);
                let op = ["-", "~"][self.rng.gen_range(0..2)];
                format!("({op}{a})")
            }
            _ => {
                let ops = ["+", "-", "*", "/", "%", "&", "|", "^", "<<", ">>"];
                let op = ops[self.rng.gen_range(0..ops.len())];
                let a = self.expr(ty, width, depth - 1);
                let b = self.expr(ty, width, depth - 1);
                format!("({a} {op} {b})")
            }
        }
    }

    fn cond(&mut self, depth: u32) -> String {
        let (ty, w) = self.pick_ty();
        let a = self.expr(ty, w, depth);
        let b = self.expr(ty, w, depth);
        let ops = ["==", "!=", "<", "<=", ">", ">="];
        let op = ops[self.rng.gen_range(0..ops.len())];
        let c = format!("({a} {op} {b})");
        match self.rng.gen_range(0..6) {
            0 => format!("!{c}"),
            1 => {
                let d = self.cond(0);
                format!("({c} & {d})")
            }
            2 => {
                let d = self.cond(0);
                format!("({c} | {d})")
            }
            _ => c,
        }
    }

    fn stmts(&mut self, n: usize, depth: u32, out: &mut String, allow_assume: bool) {
        for _ in 0..n {
            let r = self.rng.gen_range(0..20);
            if r < 9 && !self.states.is_empty() {
                let v = self.states[self.rng.gen_range(0..self.states.len())];
                let e = if self.rng.gen_bool(0.1) {
                    String::from("nondet()")
                } else {
                    self.expr(v.ty, v.width, self.max_depth)
                };
                out.push_str(&format!("{} := {e}; ", name(v, false)));
            } else if r < 11 && self.array.is_some() {
                let (aty, aw) = self.array.unwrap();
                let i = self.expr("u4", 4, 1);
                let e = self.expr(aty, aw, 1);
                out.push_str(&format!("arr[{i}] := {e}; "));
            } else if r < 14 && depth > 0 {
                let c = self.cond(1);
                out.push_str(&format!("if ({c}) {{ "));
                let k = self.rng.gen_range(1..3);
                self.stmts(k, depth - 1, out, allow_assume);
                out.push('}');
                if self.rng.gen_bool(0.5) {
                    out.push_str(" else { ");
                    self.stmts(1, depth - 1, out, allow_assume);
                    out.push('}');
                }
                out.push(' ');
            } else if r < 15 && allow_assume {
                let c = self.cond(0);
                out.push_str(&format!("assume({c}); "));
            } else if r < 16 && depth > 0 {
                let (ty, w) = self.pick_ty();
                let l = self.locals;
                self.locals += 1;
                let e = self.expr(ty, w, 1);
                out.push_str(&format!("local {ty} tmp{l} := {e}; "));
                // locals are only used immediately, through a state copy
                if let Some(v) = self.states.iter().find(|v| v.ty == ty).copied() {
                    out.push_str(&format!("{} := tmp{l}; ", name(v, false)));
                }
            } else {
                let c = self.cond(1);
                out.push_str(&format!("assert({c}); "));
            }
        }
    }

    /// A random single-loop program.
    pub fn program(&mut self) -> String {
        self.loops(1)
    }

    /// A random program with `n` main loops.
    pub fn loops(&mut self, n: usize) -> String {
        let ni = self.rng.gen_range(0..3);
        for i in 0..ni {
            let (ty, width) = self.pick_ty();
            let v = V { name: i, ty, width };
            self.inputs.push(v);
            self.src
                .push_str(&format!("input {ty} {}; ", name(v, true)));
        }
        let ns = self.rng.gen_range(1..4);
        let mut decls = String::new();
        for i in 0..ns {
            let (ty, width) = self.pick_ty();
            let v = V { name: i, ty, width };
            let init = if self.rng.gen_bool(0.15) {
                String::from("nondet()")
            } else {
                // initializers may read earlier state only
                self.literal(ty, width)
            };
            decls.push_str(&format!("state {ty} {} := {init}; ", name(v, false)));
            self.states.push(v);
        }
        if self.rng.gen_bool(0.25) {
            let (ty, w) = [("u4", 4), ("u8", 8)][self.rng.gen_range(0..2)];
            self.array = Some((ty, w));
            let init = if self.rng.gen_bool(0.5) {
                String::from("nondet()")
            } else {
                self.literal(ty, w)
            };
            decls.push_str(&format!(
                "state {ty}[{}] arr := {init}; ",
                self.rng.gen_range(2..6)
            ));
        }
        self.src.push_str(&decls);
        if self.rng.gen_bool(0.3) {
            let mut body = String::new();
            let saved = std::mem::take(&mut self.inputs);
            self.stmts(2, 1, &mut body, false);
            self.inputs = saved;
            self.src.push_str(&format!("init {{ {body}}} "));
        }
        for l in 0..n {
            let mut body = String::new();
            let k = self.rng.gen_range(2..6);
            self.stmts(k, 2, &mut body, true);
            if self.rng.gen_bool(0.3) {
                let hi = self.rng.gen_range(0..4);
                let mut inner = String::new();
                self.stmts(1, 0, &mut inner, false);
                body.push_str(&format!("for j{l} in 0..{hi} {{ {inner}}} "));
            }
            self.src.push_str(&format!("loop l{l} {{ {body}}} "));
        }
        std::mem::take(&mut self.src)
    }
}
