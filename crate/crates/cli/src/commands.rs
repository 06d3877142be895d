// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use bgpmv_core::checker::{expected_count, incremental_recheck, verify as run_verify, Witness};
use bgpmv_core::config::{diff_inputs, print_network, print_spec, RouteDoc};
use bgpmv_core::gen::full_mesh;
use bgpmv_core::model::Prefix;
use bgpmv_core::oracle::{
    check_property_fixpoint, compute_fixpoint_with, enumerate_valid_traces, reachable_events,
    FixpointOptions, PropertyVerdict, TraceLimits,
};
use bgpmv_core::{parse_network, parse_spec, Network, Route, Spec, VerificationReport};

use crate::{Format, GenArgs, IncrementalArgs, Inputs, OracleArgs, VerifyArgs};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(network: &Path, spec: &Path) -> Result<(Network, Spec)> {
    let net =
        parse_network(&read(network)?).with_context(|| format!("in {}", network.display()))?;
    let spec = parse_spec(&read(spec)?, &net).with_context(|| format!("in {}", spec.display()))?;
    Ok((net, spec))
}

fn load_inputs(i: &Inputs) -> Result<(Network, Spec)> {
    load(&i.network, &i.spec)
}

fn emit_report(r: &VerificationReport, net: &Network, format: Format) {
    match format {
        Format::Json => println!("{}", r.to_json()),
        Format::Text => print!("{}", r.to_text(Some(net))),
    }
}

pub fn verify(a: &VerifyArgs) -> Result<bool> {
    let (net, spec) = load_inputs(&a.inputs)?;
    let r = run_verify(&net, &spec.invariants, &spec.property, a.jobs as usize)?;
    emit_report(&r, &net, a.inputs.format);
    Ok(r.passed())
}

pub fn incremental(a: &IncrementalArgs) -> Result<bool> {
    let (net, spec) = load_inputs(&a.inputs)?;
    let prev_spec = a.prev_spec.as_ref().unwrap_or(&a.inputs.spec);
    let (old_net, old_spec) = load(&a.prev_network, prev_spec)?;
    let prev = VerificationReport::from_json(&read(&a.prev_report)?)
        .with_context(|| format!("in {}", a.prev_report.display()))?;
    let diff = diff_inputs(&old_net, &old_spec, &net, &spec);
    let r = incremental_recheck(
        &prev,
        &diff,
        &net,
        &spec.invariants,
        &spec.property,
        a.jobs as usize,
    )?;
    emit_report(&r, &net, a.inputs.format);
    if a.inputs.format == Format::Text {
        println!("{} obligations re-checked", r.rechecked);
    }
    Ok(r.passed())
}

#[derive(Serialize)]
struct TraceSummary {
    max_events: usize,
    seeds: usize,
    events: usize,
    longest_witness: usize,
    /// Valid traces of at most `enumerated_up_to` events, counted one by one.
    enumerated_up_to: usize,
    trace_count: usize,
    trace_count_capped: bool,
    violations: usize,
    disagreements: usize,
    agreement: bool,
}

const ENUMERATION_DEPTH: usize = 5;
const ENUMERATION_CAP: usize = 1_000_000;

fn default_seeds() -> Vec<Route> {
    vec![Route::new(Prefix::new(0, 0).expect("default route"))]
}

pub fn oracle(a: &OracleArgs) -> Result<bool> {
    let (net, spec) = load_inputs(&a.inputs)?;
    let prop = &spec.property;
    let opts = FixpointOptions {
        aspath_bound: a.aspath_bound.map(|b| b as usize),
        predicates: vec![prop.pred.clone()],
        ..FixpointOptions::default()
    };
    let mut fp = compute_fixpoint_with(&net, &opts)?;
    let verdict = check_property_fixpoint(&mut fp, prop)?;
    if let Some(path) = &a.dump {
        let text = serde_json::to_string_pretty(&fp.dump(true))?;
        fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    }
    let witness = match &verdict {
        PropertyVerdict::Holds => None,
        PropertyVerdict::Violated(w) => Some(w.clone()),
    };

    let traces = if a.traces {
        let seeds: Vec<Route> = match &a.seeds {
            Some(p) => serde_json::from_str::<Vec<RouteDoc>>(&read(p)?)
                .with_context(|| format!("in {}", p.display()))?
                .into_iter()
                .map(Route::from)
                .collect(),
            None => default_seeds(),
        };
        let reach = reachable_events(&net, &seeds, a.max_events, Some(TraceLimits::default()))?;
        let seeded = compute_fixpoint_with(
            &net,
            &FixpointOptions {
                seeds: Some(seeds.clone()),
                ..opts
            },
        )?;
        let violations = reach.violations(prop).len();
        let disagreements = reach.disagreements(&seeded).len();
        let longest = reach
            .events()
            .filter_map(|e| reach.depth(e))
            .max()
            .unwrap_or(0);
        // Full enumeration is exponential in the length; count short traces only.
        let upto = a.max_events.min(ENUMERATION_DEPTH);
        let trace_count = enumerate_valid_traces(&net, &seeds, upto, None)?
            .take(ENUMERATION_CAP + 1)
            .count();
        Some(TraceSummary {
            max_events: a.max_events,
            seeds: seeds.len(),
            events: reach.len(),
            longest_witness: longest,
            enumerated_up_to: upto,
            trace_count: trace_count.min(ENUMERATION_CAP),
            trace_count_capped: trace_count > ENUMERATION_CAP,
            violations,
            disagreements,
            // Trace violations must be a subset of what the fixpoint admits.
            agreement: disagreements == 0 && (witness.is_some() || violations == 0),
        })
    } else {
        None
    };

    let holds = witness.is_none();
    match a.inputs.format {
        Format::Json => {
            let out = json!({
                "command": "oracle",
                "verdict": if holds { "holds" } else { "violated" },
                "location": prop.location.to_string(),
                "property": prop.pred.to_string(),
                "aspath_bound": fp.aspath_bound,
                "iterations": fp.iterations,
                "witness": witness,
                "traces": traces,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Format::Text => print_oracle_text(
            prop,
            holds,
            witness.as_ref(),
            fp.aspath_bound,
            fp.iterations,
            traces.as_ref(),
        ),
    }
    let agree = traces.as_ref().map_or(true, |t| t.agreement);
    if !agree {
        log::error!("trace exploration disagrees with the fixpoint");
    }
    Ok(holds && agree)
}

fn print_oracle_text(
    prop: &bgpmv_core::NetworkProperty,
    holds: bool,
    witness: Option<&Witness>,
    bound: usize,
    rounds: usize,
    traces: Option<&TraceSummary>,
) {
    let word = if holds { "holds" } else { "violated" };
    println!("{word} at {}: {}", prop.location, prop.pred);
    println!("  fixpoint reached after {rounds} rounds, path bound {bound}");
    if let Some(w) = witness {
        println!("  witness: {w}");
    }
    if let Some(t) = traces {
        println!(
            "  traces: {} events occur in valid traces of at most {} events from {} seed(s); longest witness trace {} events",
            t.events, t.max_events, t.seeds, t.longest_witness
        );
        println!(
            "  valid traces of at most {} events: {}{}",
            t.enumerated_up_to,
            t.trace_count,
            if t.trace_count_capped { "+" } else { "" }
        );
        println!(
            "  violating events: {}, outside the fixpoint: {}",
            t.violations, t.disagreements
        );
        println!(
            "  agreement with the fixpoint: {}",
            if t.agreement { "confirmed" } else { "FAILED" }
        );
    }
}

pub fn gen(a: &GenArgs) -> Result<bool> {
    if a.n < 2 {
        bail!("a mesh needs at least 2 routers, got {}", a.n);
    }
    let m = full_mesh(a.n, a.seed)?;
    let net_path = a
        .network
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("mesh{}.network.json", a.n)));
    let spec_path = a
        .spec
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("mesh{}.spec.json", a.n)));
    fs::write(&net_path, print_network(&m.network))
        .with_context(|| format!("cannot write {}", net_path.display()))?;
    fs::write(&spec_path, print_spec(&m.spec, &m.network)?)
        .with_context(|| format!("cannot write {}", spec_path.display()))?;
    let topo = &m.network.topology;
    let obligations = expected_count(&m.network);
    match a.format {
        Format::Json => {
            let out = json!({
                "command": "gen",
                "n": a.n,
                "seed": a.seed,
                "network": net_path.display().to_string(),
                "spec": spec_path.display().to_string(),
                "routers": topo.routers.len(),
                "externals": topo.externals.len(),
                "edges": topo.edges.len(),
                "obligations": obligations,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Format::Text => {
            println!(
                "wrote {} and {}: {} routers, {} externals, {} directed edges, {} obligations",
                net_path.display(),
                spec_path.display(),
                topo.routers.len(),
                topo.externals.len(),
                topo.edges.len(),
                obligations
            );
        }
    }
    Ok(true)
}
