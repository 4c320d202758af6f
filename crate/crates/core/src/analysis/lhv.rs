use crate::empirical::{no_signalling_report, EmpiricalModel, Signature};
use crate::error::{Error, Result};

use super::simplex::{phase_one, PhaseOne};
use super::{
    enumerate_assignments, Certificate, CertificateTerm, FeasibilityReport, GlobalAssignment,
    SlotLayout, Verdict, WeightedAssignment,
};

/// Default LP tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Dense LP size (rows × columns) we are willing to build.
const MAX_TABLEAU_ENTRIES: usize = 50_000_000;

/// Row `(context, tuple)` in context order, then tuple order.
struct Rows {
    offsets: Vec<usize>,
    total: usize,
}

impl Rows {
    fn new(model: &EmpiricalModel) -> Self {
        let mut offsets = Vec::with_capacity(model.tables().len());
        let mut total = 0;
        for t in model.tables() {
            offsets.push(total);
            total += t.len();
        }
        Rows { offsets, total }
    }
}

/// Rows hit by each deterministic assignment (one per context).
fn vertex_rows(sig: &Signature, rows: &Rows, assignments: &[GlobalAssignment]) -> Vec<Vec<usize>> {
    let layout = SlotLayout::new(sig);
    let contexts = sig.contexts();
    assignments
        .iter()
        .map(|a| {
            contexts
                .iter()
                .enumerate()
                .map(|(c, ctx)| rows.offsets[c] + a.restrict(&layout, sig, ctx))
                .collect()
        })
        .collect()
}

/// Decides whether the model is a convex mixture of deterministic global
/// assignments. Zero table entries are equality constraints. Infeasible
/// models come with a functional whose bound is recomputed over every
/// assignment, independently of the simplex arithmetic.
pub fn lhv_feasibility(model: &EmpiricalModel, tol: f64) -> Result<FeasibilityReport> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tol} must be positive"
        )));
    }
    let ns = no_signalling_report(model, tol);
    if !ns.pass {
        return Err(Error::Signalling(ns.max_discrepancy));
    }
    let sig = model.signature();
    let assignments: Vec<GlobalAssignment> = enumerate_assignments(sig)?.collect();
    let rows = Rows::new(model);
    let columns = assignments.len();
    if rows.total.saturating_mul(columns + rows.total) > MAX_TABLEAU_ENTRIES {
        return Err(Error::SizeLimit {
            count: columns as u128,
            limit: (MAX_TABLEAU_ENTRIES / (rows.total + 1)) as u64,
        });
    }
    let hits = vertex_rows(sig, &rows, &assignments);

    let mut a = vec![vec![0.0; columns]; rows.total];
    for (j, hit) in hits.iter().enumerate() {
        for &r in hit {
            a[r][j] = 1.0;
        }
    }
    let b: Vec<f64> = model
        .tables()
        .iter()
        .flat_map(|t| t.probs().iter().copied())
        .collect();

    match phase_one(&a, &b, tol)? {
        PhaseOne::Feasible { x, .. } => {
            let mut synth = vec![0.0; rows.total];
            for (j, hit) in hits.iter().enumerate() {
                for &r in hit {
                    synth[r] += x[j];
                }
            }
            let residual = synth
                .iter()
                .zip(&b)
                .map(|(s, p)| (s - p).abs())
                .fold(0.0, f64::max);
            if residual > tol {
                return Err(Error::Numerical(format!(
                    "weights reproduce the model only to {residual:e}"
                )));
            }
            let weights = assignments
                .into_iter()
                .zip(x)
                .filter(|(_, w)| *w > 0.0)
                .map(|(assignment, weight)| WeightedAssignment { assignment, weight })
                .collect();
            Ok(FeasibilityReport {
                signature: sig.clone(),
                verdict: Verdict::Local,
                witness: None,
                certificate: None,
                weights: Some(weights),
            })
        }
        PhaseOne::Infeasible { y, .. } => {
            let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if scale == 0.0 {
                return Err(Error::Numerical("empty infeasibility certificate".into()));
            }
            let y: Vec<f64> = y.iter().map(|v| v / scale).collect();
            let certificate = verify_certificate(model, &hits, &rows, &y);
            if certificate.margin <= 10.0 * tol {
                return Err(Error::Numerical(format!(
                    "certificate margin {:e} is not above 10·tol",
                    certificate.margin
                )));
            }
            Ok(FeasibilityReport {
                signature: sig.clone(),
                verdict: Verdict::LhvInfeasible,
                witness: None,
                certificate: Some(certificate),
                weights: None,
            })
        }
    }
}

fn verify_certificate(
    model: &EmpiricalModel,
    hits: &[Vec<usize>],
    rows: &Rows,
    y: &[f64],
) -> Certificate {
    let classical_bound = hits
        .iter()
        .map(|hit| hit.iter().map(|&r| y[r]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let sig = model.signature();
    let mut model_value = 0.0;
    let mut terms = Vec::new();
    for (c, table) in model.tables().iter().enumerate() {
        let context = sig.context_labels(&sig.context(c));
        for t in 0..table.len() {
            let coefficient = y[rows.offsets[c] + t];
            model_value += coefficient * table.probs()[t];
            if coefficient != 0.0 {
                terms.push(CertificateTerm {
                    context: context.clone(),
                    tuple: table.tuple_labels(t),
                    coefficient,
                });
            }
        }
    }
    Certificate {
        terms,
        classical_bound,
        model_value,
        margin: model_value - classical_bound,
    }
}

/// Evaluates a certificate on an arbitrary model with the same signature.
pub fn certificate_value(model: &EmpiricalModel, certificate: &Certificate) -> Result<f64> {
    certificate.terms.iter().try_fold(0.0, |acc, term| {
        let p = model
            .table_for(&term.context)?
            .get(&term.tuple)
            .ok_or_else(|| Error::UnknownOutcome(term.tuple.join(",")))?;
        Ok(acc + term.coefficient * p)
    })
}

/// Largest value of the certificate over deterministic assignments.
pub fn certificate_classical_bound(sig: &Signature, certificate: &Certificate) -> Result<f64> {
    let layout = SlotLayout::new(sig);
    let indexed = certificate
        .terms
        .iter()
        .map(|t| {
            let ctx = sig.context_from_labels(&t.context)?;
            let alphabets = sig.outcome_alphabets(&ctx);
            let idx = t
                .tuple
                .iter()
                .zip(&alphabets)
                .map(|(l, a)| a.iter().position(|x| x == l))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::UnknownOutcome(t.tuple.join(",")))?;
            let flat = crate::qsim::flatten(&alphabets, &idx).expect("in range");
            Ok((ctx, flat, t.coefficient))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(enumerate_assignments(sig)?
        .map(|a| {
            indexed
                .iter()
                .filter(|(ctx, flat, _)| a.restrict(&layout, sig, ctx) == *flat)
                .map(|(_, _, c)| c)
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max))
}
