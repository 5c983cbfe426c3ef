//! Counterexample traces: extraction from a model and concrete replay.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::job::Job;
use crate::bv::{format_value, Ty};
use crate::frontend::{AssertId, SiteId, TypedProgram, VarId};
use crate::interp::{Environment, Interpreter, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub step: u32,
    /// Main loop executing this step, `None` for the init step.
    pub main_loop: Option<usize>,
    /// Input values drawn in this step (empty at step 0).
    pub inputs: Vec<(VarId, Value)>,
    /// State at the end of the step.
    pub state: Vec<(VarId, Value)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    /// Values of `nondet()` calls, keyed by step and site.
    pub nondets: BTreeMap<(u32, SiteId), Value>,
    pub violated: AssertId,
    pub violated_step: u32,
}

fn render(v: &Value, ty: Ty) -> String {
    match v {
        Value::Scalar(x) => format_value(*x, ty),
        Value::Array(a) => {
            let parts: Vec<String> = a.iter().map(|x| format_value(*x, ty)).collect();
            let mut s = String::from("[");
            s.push_str(&parts.join(", "));
            s.push(']');
            s
        }
    }
}

impl Trace {
    /// Main loops executed at steps `1..`, for replay.
    pub fn schedule(&self) -> Vec<usize> {
        self.steps.iter().filter_map(|s| s.main_loop).collect()
    }

    /// One `step j: var=value ...` line per step, then the violated assert.
    pub fn to_text(&self, prog: &TypedProgram) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let _ = write!(out, "step {}:", s.step);
            for (v, val) in s.inputs.iter().chain(s.state.iter()) {
                let info = &prog.vars[*v];
                let _ = write!(out, " {}={}", info.name, render(val, info.ty));
            }
            out.push('\n');
        }
        let span = prog.asserts[self.violated as usize].span;
        let _ = writeln!(
            out,
            "violated: assert {} (line {}) at step {}",
            self.violated, span.line, self.violated_step
        );
        out
    }

    /// Replay in the concrete interpreter. Returns the violations of the
    /// first step that has any.
    pub fn replay(&self, prog: &TypedProgram) -> Option<(u32, Vec<AssertId>)> {
        let out = crate::interp::run(prog, &self.schedule(), &mut TraceEnv::new(self));
        out.violation
    }
}

/// Environment answering from a trace; anything missing is zero.
pub struct TraceEnv<'t> {
    inputs: BTreeMap<(u32, VarId), &'t Value>,
    trace: &'t Trace,
}

impl<'t> TraceEnv<'t> {
    pub fn new(trace: &'t Trace) -> TraceEnv<'t> {
        let mut inputs = BTreeMap::new();
        for s in &trace.steps {
            for (v, val) in &s.inputs {
                inputs.insert((s.step, *v), val);
            }
        }
        TraceEnv { inputs, trace }
    }
}

impl Environment for TraceEnv<'_> {
    fn input(&mut self, step: u32, var: VarId, _: Ty, len: Option<u32>) -> Value {
        self.inputs
            .get(&(step, var))
            .map(|v| (*v).clone())
            .unwrap_or_else(|| Value::zero(len))
    }

    fn nondet(&mut self, step: u32, site: SiteId, _: Ty, len: Option<u32>) -> Value {
        self.trace
            .nondets
            .get(&(step, site))
            .cloned()
            .unwrap_or_else(|| Value::zero(len))
    }
}

fn model_value(job: &Job, n: crate::symex::SsaName, len: Option<u32>) -> Value {
    match len {
        Some(l) => job
            .enc
            .model_array(n)
            .map(Value::Array)
            .unwrap_or_else(|| Value::zero(Some(l))),
        None => Value::Scalar(job.enc.model_name(n).unwrap_or(0)),
    }
}

/// Build the trace for a violation at step `k` from the solver model of
/// `job`. Inputs and nondets come from the model (0 where the formula does
/// not constrain them); states come from replaying those values.
pub(crate) fn extract(job: &Job, k: u32) -> Trace {
    let prog = job.session.program();
    let frames = &job.session.frames()[..=k as usize];
    let mut trace = Trace {
        steps: Vec::new(),
        nondets: BTreeMap::new(),
        violated: 0,
        violated_step: k,
    };
    for f in frames {
        for (site, n) in &f.nondets {
            let len = match n.base {
                crate::symex::Base::Var(v) => prog.vars[v].array_len,
                _ => None,
            };
            trace
                .nondets
                .insert((f.step, *site), model_value(job, *n, len));
        }
        let inputs = f
            .inputs
            .iter()
            .map(|(v, n)| (*v, model_value(job, *n, prog.vars[*v].array_len)))
            .collect();
        trace.steps.push(TraceStep {
            step: f.step,
            main_loop: f.main_loop,
            inputs,
            state: Vec::new(),
        });
    }
    // inputs that were never read still appear, as zero
    for s in trace.steps.iter_mut().skip(1) {
        for v in prog.input_vars() {
            if !s.inputs.iter().any(|(x, _)| *x == v) {
                s.inputs.push((v, Value::zero(prog.vars[v].array_len)));
            }
        }
        s.inputs.sort_by_key(|(v, _)| *v);
    }

    let mut env = TraceEnv::new(&trace);
    let mut it = Interpreter::new(prog);
    let mut states = Vec::new();
    let mut violations = Vec::new();
    let mut blocked_at = None;
    for (i, s) in trace.steps.iter().enumerate() {
        let r = match s.main_loop {
            None => it.run_init(&mut env),
            Some(l) => it.run_iteration(l, &mut env),
        };
        states.push(it.state());
        if r.blocked && blocked_at.is_none() {
            blocked_at = Some(i);
        }
        if i as u32 == k {
            violations = r.violations;
        } else {
            debug_assert!(r.violations.is_empty(), "replay violates before step {k}");
        }
    }
    drop(env);
    for (s, st) in trace.steps.iter_mut().zip(states) {
        s.state = st;
    }
    // an assume failing after the violated assert ends the replay early, so
    // the last state is only comparable if the step ran to completion
    for (f, s) in frames
        .iter()
        .zip(&trace.steps)
        .take(blocked_at.unwrap_or(frames.len()))
    {
        for (v, n) in &f.boundary {
            if !job.enc.is_encoded(*n) {
                continue;
            }
            let m = model_value(job, *n, prog.vars[*v].array_len);
            let r = &s.state.iter().find(|(x, _)| x == v).unwrap().1;
            debug_assert_eq!(
                &m, r,
                "model disagrees with replay on {}",
                prog.vars[*v].name
            );
        }
    }
    trace.violated = violations.first().copied().unwrap_or_else(|| {
        // fall back to the atom the model made true
        frames[k as usize]
            .atoms
            .iter()
            .find(|a| job.enc.model_name(a.name) == Some(1))
            .map(|a| a.assert)
            .expect("no violated assert in the model")
    });
    debug_assert!(
        !violations.is_empty(),
        "replay does not reach the violation"
    );
    trace
}
