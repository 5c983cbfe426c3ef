//! Machine-readable counterexample traces.

use ibmc_core::bv::{to_signed, Ty};
use ibmc_core::engine::Trace;
use ibmc_core::frontend::VarId;
use ibmc_core::interp::Value;
use ibmc_core::TypedProgram;
use serde_json::{json, Map, Value as Json};

fn scalar(x: u64, ty: Ty) -> Json {
    match ty {
        Ty::Bool => Json::Bool(x & 1 == 1),
        Ty::Bv { signed: true, .. } => json!(to_signed(x, ty.width())),
        Ty::Bv { .. } => json!(x),
    }
}

fn value(v: &Value, ty: Ty) -> Json {
    match v {
        Value::Scalar(x) => scalar(*x, ty),
        Value::Array(a) => Json::Array(a.iter().map(|x| scalar(*x, ty)).collect()),
    }
}

fn object(p: &TypedProgram, vals: &[(VarId, Value)]) -> Json {
    let mut m = Map::new();
    for (v, val) in vals {
        let info = &p.vars[*v];
        m.insert(info.name.clone(), value(val, info.ty));
    }
    Json::Object(m)
}

/// `[{step, inputs, state}, ..., {violated: {assert_id, step}}]`.
pub fn trace_json(p: &TypedProgram, t: &Trace) -> Json {
    let mut rows: Vec<Json> = t
        .steps
        .iter()
        .map(|s| {
            json!({
                "step": s.step,
                "inputs": object(p, &s.inputs),
                "state": object(p, &s.state),
            })
        })
        .collect();
    rows.push(json!({
        "violated": { "assert_id": t.violated, "step": t.violated_step }
    }));
    Json::Array(rows)
}
