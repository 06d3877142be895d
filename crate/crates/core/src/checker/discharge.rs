// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;
use std::time::Instant;

use super::obligation::{Obligation, ObligationKind};
use super::report::{CheckResult, Failure, FailureCategory, Verdict, Witness};
use super::CheckerError;
use crate::model::{Constraint, MapOutcome, Route};
use crate::symbolic::{Encoding, Engine};

/// Discharges one obligation in a fresh engine.
pub fn discharge(ob: &Obligation, enc: &Arc<Encoding>) -> Result<CheckResult, CheckerError> {
    let start = Instant::now();
    let failure = match ob.kind {
        ObligationKind::Import | ObligationKind::Export => transfer_check(ob, enc)?,
        ObligationKind::Originate => originate_check(ob, enc)?,
        ObligationKind::Implication => implication_check(ob, enc)?,
    };
    Ok(CheckResult {
        id: ob.id.clone(),
        kind: ob.kind,
        edge: ob.edge.clone(),
        direction: ob.direction(),
        hypothesis_location: ob.hypothesis_location.clone(),
        goal_location: ob.goal_location.clone(),
        verdict: if failure.is_some() {
            Verdict::Fail
        } else {
            Verdict::Pass
        },
        failure,
        time_us: start.elapsed().as_micros() as u64,
    })
}

fn holds(c: &Constraint, r: &Route) -> Result<bool, CheckerError> {
    Ok(c.contains(r)?)
}

fn failure(
    ob: &Obligation,
    category: FailureCategory,
    pre: &Route,
    post: &Route,
    term: Option<usize>,
    enc: &Encoding,
) -> Failure {
    Failure {
        category,
        pre_witness: Witness::render(pre, enc),
        post_witness: Witness::render(post, enc),
        violated_location: ob.goal_location.clone(),
        violated_pred: ob.goal.to_string(),
        term,
    }
}

fn transfer_check(ob: &Obligation, enc: &Arc<Encoding>) -> Result<Option<Failure>, CheckerError> {
    let map = ob
        .map
        .as_ref()
        .ok_or_else(|| CheckerError::Inconsistent(format!("{} has no route map", ob.id)))?;
    let effects = ob.effect_refs();
    let mut eng = Engine::new(enc.clone());
    let hyp = eng.encode_constraint(&ob.hypothesis)?;
    let goal = eng.encode_constraint(&ob.goal)?;
    let tr = eng.transfer(map, &effects, &hyp)?;
    let Some(post) = eng.subset_witness(&tr.output, &goal) else {
        return Ok(None);
    };
    let ti = tr
        .terms
        .iter()
        .find(|t| eng.contains(&t.image, &post))
        .ok_or_else(|| {
            CheckerError::Inconsistent(format!("{}: witness has no source term", ob.id))
        })?;
    let pre_set = eng.preimage(&map.terms[ti.term], &effects, &ti.matched, &post)?;
    let pre = eng
        .witness(&pre_set)
        .ok_or_else(|| CheckerError::Inconsistent(format!("{}: empty pre-image", ob.id)))?;

    // Replay concretely; the symbolic answer must agree with the semantics.
    let (out, term) = match ob.apply(&pre) {
        MapOutcome::Accept { route, term } => (route, term),
        MapOutcome::Reject { .. } => {
            return Err(CheckerError::Inconsistent(format!(
                "{}: witness {pre} is rejected by the map",
                ob.id
            )))
        }
    };
    if !holds(&ob.hypothesis, &pre)? || holds(&ob.goal, &out)? {
        return Err(CheckerError::Inconsistent(format!(
            "{}: witness {pre} -> {out} does not violate the check",
            ob.id
        )));
    }
    Ok(Some(failure(
        ob,
        FailureCategory::LocalInvariant,
        &pre,
        &out,
        Some(term),
        enc,
    )))
}

fn originate_check(ob: &Obligation, enc: &Arc<Encoding>) -> Result<Option<Failure>, CheckerError> {
    for r in &ob.origin_routes {
        if !holds(&ob.goal, r)? {
            return Ok(Some(failure(
                ob,
                FailureCategory::LocalInvariant,
                r,
                r,
                None,
                enc,
            )));
        }
    }
    Ok(None)
}

fn implication_check(
    ob: &Obligation,
    enc: &Arc<Encoding>,
) -> Result<Option<Failure>, CheckerError> {
    let mut eng = Engine::new(enc.clone());
    let hyp = eng.encode_constraint(&ob.hypothesis)?;
    let goal = eng.encode_constraint(&ob.goal)?;
    let Some(r) = eng.subset_witness(&hyp, &goal) else {
        return Ok(None);
    };
    if !holds(&ob.hypothesis, &r)? || holds(&ob.goal, &r)? {
        return Err(CheckerError::Inconsistent(format!(
            "{}: witness {r} does not violate the implication",
            ob.id
        )));
    }
    Ok(Some(failure(
        ob,
        FailureCategory::Implication,
        &r,
        &r,
        None,
        enc,
    )))
}
