use rayon::prelude::*;

use crate::empirical::SupportModel;
use crate::error::Result;

use super::{
    enumerate_assignments, FeasibilityReport, GlobalAssignment, SlotLayout, Verdict, Witness,
};

/// Global assignments whose restriction to every context is possible.
pub fn consistent_assignments(support: &SupportModel) -> Result<Vec<GlobalAssignment>> {
    let sig = support.signature();
    let layout = SlotLayout::new(sig);
    let contexts = sig.contexts();
    let all: Vec<GlobalAssignment> = enumerate_assignments(sig)?.collect();
    Ok(all
        .into_par_iter()
        .filter(|a| {
            contexts
                .iter()
                .enumerate()
                .all(|(c, ctx)| support.is_possible(c, a.restrict(&layout, sig, ctx)))
        })
        .collect())
}

/// Possibilistic check. The first possible tuple (contexts, then tuples, in
/// lexicographic order) that no consistent assignment reproduces is the
/// witness; if no consistent assignment exists at all the model is strongly
/// contextual.
pub fn logical_contextuality(support: &SupportModel) -> Result<FeasibilityReport> {
    let sig = support.signature();
    let layout = SlotLayout::new(sig);
    let contexts = sig.contexts();
    let consistent = consistent_assignments(support)?;

    let mut covered: Vec<Vec<bool>> = (0..contexts.len())
        .map(|c| vec![false; support.possible(c).len()])
        .collect();
    for a in &consistent {
        for (c, ctx) in contexts.iter().enumerate() {
            covered[c][a.restrict(&layout, sig, ctx)] = true;
        }
    }

    let witness = contexts.iter().enumerate().find_map(|(c, ctx)| {
        let t = (0..covered[c].len()).find(|&t| support.is_possible(c, t) && !covered[c][t])?;
        let alphabets = sig.outcome_alphabets(ctx);
        let tuple = crate::qsim::unflatten(&alphabets, t)
            .iter()
            .zip(&alphabets)
            .map(|(&i, a)| a[i].clone())
            .collect();
        Some(Witness {
            context: sig.context_labels(ctx),
            tuple,
        })
    });

    let verdict = match (&witness, consistent.is_empty()) {
        (_, true) => Verdict::StronglyContextual,
        (Some(_), false) => Verdict::LogicallyContextual,
        (None, false) => Verdict::Local,
    };
    Ok(FeasibilityReport {
        signature: sig.clone(),
        verdict,
        witness,
        certificate: None,
        weights: None,
    })
}
