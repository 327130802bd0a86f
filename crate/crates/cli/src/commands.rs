//! One function per subcommand. Each reads its inputs, runs the kernel and
//! returns the verdict as JSON; only input problems become errors.

use std::path::Path;

use ga_kernel_core::derivation::Derivation;
use ga_kernel_core::flow::{
    coaction_check, exp_series_of, find_slice, integrability_check, verify_flow, FlowCertificate, RationalFlow,
};
use ga_kernel_core::parser::files::{load_derivation, load_fan, load_flow};
use ga_kernel_core::parser::{parse_ratfunc, render, Mode};
use ga_kernel_core::toric::{
    enumerate_roots, regular_on_fan, semi_affine, Fan, HomogDeriv, LatticeVec, SemiAffineVerdict,
};
use serde_json::{json, Map, Value};

use crate::config::CliConfig;
use crate::CliError;

/// Seed of the sampled convexity test, fixed so output is reproducible.
const SAMPLE_SEED: u64 = 0;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn derivation(path: &Path) -> Result<Derivation, CliError> {
    load_derivation(&read(path)?).map_err(|e| CliError::input(path, e))
}

fn flow(path: &Path) -> Result<RationalFlow, CliError> {
    load_flow(&read(path)?).map_err(|e| CliError::input(path, e))
}

fn fan(path: &Path, config: &CliConfig) -> Result<Fan, CliError> {
    load_fan(&read(path)?, config.trust_fan).map_err(|e| CliError::input(path, e))
}

fn lattice_json(v: &LatticeVec) -> Value {
    Value::Array(
        v.coords()
            .iter()
            .map(|c| i64::try_from(c).map_or_else(|_| Value::String(c.to_string()), Value::from))
            .collect(),
    )
}

fn flow_json(f: &RationalFlow) -> Value {
    let names = f.context().names();
    let map: Map<String, Value> =
        names.iter().zip(f.values()).map(|(n, v)| (n.clone(), Value::String(render(&v)))).collect();
    Value::Object(map)
}

fn certificate_json(c: &FlowCertificate) -> Value {
    json!({ "ode": c.ode, "unit": c.unit })
}

pub fn exp(config: &CliConfig, path: &Path, expr: &str, order: Option<usize>) -> Result<Value, CliError> {
    let d = derivation(path)?;
    let f = parse_ratfunc(expr, d.context(), Mode::Plain).map_err(|e| CliError::Invalid(format!("`{expr}`: {e}")))?;
    let order = order.unwrap_or(config.series_order);
    let series = exp_series_of(&d, &f, order).map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok(Value::Array(series.iter().map(|c| Value::String(render(c))).collect()))
}

pub fn integrable(config: &CliConfig, path: &Path) -> Result<Value, CliError> {
    let d = derivation(path)?;
    let v = integrability_check(&d, config.detect_degree, config.series_order)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let slice = match &v.flow {
        Some(f) => find_slice(f).map_err(|e| CliError::Invalid(e.to_string()))?.map(|(_, s)| render(&s)),
        None => None,
    };
    Ok(json!({
        "status": v.status.as_str(),
        "flow": v.flow.as_ref().map(flow_json),
        "slice": slice,
        "certificate": v.certificate.as_ref().map(certificate_json),
        "detect_degree": v.detect_degree,
    }))
}

pub fn lnd(config: &CliConfig, path: &Path) -> Result<Value, CliError> {
    let d = derivation(path)?;
    let v = d.lnd_check(config.lnd_cap).map_err(|e| CliError::input(path, e))?;
    let degrees = v.degrees.as_ref().map(|ds| {
        let names = d.context().names();
        Value::Object(names.iter().zip(ds).map(|(n, &m)| (n.clone(), Value::from(m))).collect())
    });
    Ok(json!({ "status": v.status.as_str(), "degrees": degrees, "cap": v.cap }))
}

pub fn slice(path: &Path) -> Result<Value, CliError> {
    let f = flow(path)?;
    let found = find_slice(&f).map_err(|e| CliError::input(path, e))?;
    Ok(match found {
        Some((_, s)) => json!({ "slice": render(&s), "verified": true }),
        None => json!({ "slice": null, "verified": false }),
    })
}

pub fn flow_verify(flow_path: &Path, derivation_path: &Path) -> Result<Value, CliError> {
    let f = flow(flow_path)?;
    let d = derivation(derivation_path)?;
    if f.context() != d.context() {
        return Err(CliError::Invalid("flow and derivation declare different variables".into()));
    }
    let c = verify_flow(&d, &f).map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok(json!({ "certified": c.holds(), "certificate": certificate_json(&c) }))
}

pub fn coaction(path: &Path) -> Result<Value, CliError> {
    let f = flow(path)?;
    let ok = coaction_check(&f).map_err(|e| CliError::input(path, e))?;
    Ok(json!({ "coaction": ok }))
}

fn parse_lattice(name: &str, s: &str) -> Result<LatticeVec, CliError> {
    let coords = s
        .split(',')
        .map(|c| c.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Invalid(format!("{name}: expected comma-separated integers, got `{s}`")))?;
    Ok(LatticeVec::from_i64(&coords))
}

pub fn toric_check(config: &CliConfig, path: &Path, p: &str, e: &str) -> Result<Value, CliError> {
    let f = fan(path, config)?;
    let (p, e) = (parse_lattice("p", p)?, parse_lattice("e", e)?);
    for (name, v) in [("p", &p), ("e", &e)] {
        if v.rank() != f.rank() {
            return Err(CliError::Invalid(format!("{name} has rank {}, the fan has rank {}", v.rank(), f.rank())));
        }
    }
    let (h, changed) = HomogDeriv::normalized(p, e).map_err(|e| CliError::Invalid(e.to_string()))?;
    if changed {
        eprintln!("warning: p replaced by its primitive part {}", lattice_json(h.p()));
    }
    let v = regular_on_fan(&h, &f).map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok(json!({
        "integrable": v.integrable,
        "extends": v.extends,
        "lnd": v.lnd,
        "regular": v.regular_on_fan,
        "witness": v.witness_ray.as_ref().map(lattice_json),
        "case": v.case.map(|c| c.as_str()),
    }))
}

pub fn toric_roots(config: &CliConfig, path: &Path, bound: Option<i64>) -> Result<Value, CliError> {
    let f = fan(path, config)?;
    let bound = bound.unwrap_or(config.root_bound);
    let roots = enumerate_roots(&f, bound).map_err(|e| CliError::Invalid(e.to_string()))?;
    let roots: Vec<Value> =
        roots.iter().map(|r| json!({ "e": lattice_json(&r.e), "witness": lattice_json(&r.witness) })).collect();
    Ok(json!({ "roots": roots }))
}

pub fn toric_semiaffine(config: &CliConfig, path: &Path) -> Result<Value, CliError> {
    let f = fan(path, config)?;
    let v = semi_affine(&f, config.samples, SAMPLE_SEED);
    Ok(match v {
        SemiAffineVerdict::Probabilistic { samples, .. } => json!({ "status": v.as_str(), "samples": samples }),
        _ => json!({ "status": v.as_str() }),
    })
}

/// Renders for the output styles; both are deterministic.
pub fn render_output(value: &Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(value).expect("JSON values serialize")
    } else {
        value.to_string()
    }
}

