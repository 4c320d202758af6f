use std::collections::BTreeMap;

use crate::empirical::{Context, EmpiricalModel};
use crate::error::{Error, Result};

/// Maps outcome labels to ±1.
#[derive(Debug, Clone, PartialEq)]
pub struct SignMap(BTreeMap<String, f64>);

impl SignMap {
    pub fn new<S: Into<String>>(pairs: impl IntoIterator<Item = (S, f64)>) -> Self {
        SignMap(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    /// `0, + ↦ +1` and `1, - ↦ -1`.
    pub fn standard() -> Self {
        Self::new([("0", 1.0), ("+", 1.0), ("1", -1.0), ("-", -1.0)])
    }

    pub fn sign(&self, outcome: &str) -> Option<f64> {
        self.0.get(outcome).copied()
    }
}

impl Default for SignMap {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChshValue {
    /// `correlators[x][y] = E(x, y)`.
    pub correlators: [[f64; 2]; 2],
    pub value: f64,
    /// Setting pair carrying the minus sign in the maximizing combination.
    pub minus_at: (usize, usize),
}

/// `max |E00 + E01 + E10 + E11 - 2 E_xy|` over the four placements of the
/// minus sign. Other parties, if any, are held at their first setting and
/// summed out.
pub fn chsh_detail(
    model: &EmpiricalModel,
    party1: &str,
    party2: &str,
    signs: &SignMap,
) -> Result<ChshValue> {
    let sig = model.signature();
    let p1 = sig.party_index(party1)?;
    let p2 = sig.party_index(party2)?;
    if p1 == p2 {
        return Err(Error::InvalidParameter(
            "CHSH needs two distinct parties".into(),
        ));
    }
    for &p in &[p1, p2] {
        let party = &sig.parties[p];
        if party.settings.len() != 2 {
            return Err(Error::InvalidParameter(format!(
                "party `{}` must have exactly two settings",
                party.name
            )));
        }
        for s in &party.settings {
            if s.outcomes.len() != 2 {
                return Err(Error::NonBinaryOutcomes {
                    party: party.name.clone(),
                    setting: s.label.clone(),
                });
            }
        }
    }
    let mut correlators = [[0.0; 2]; 2];
    for (x, row) in correlators.iter_mut().enumerate() {
        for (y, e) in row.iter_mut().enumerate() {
            let mut ctx = vec![0; sig.num_parties()];
            ctx[p1] = x;
            ctx[p2] = y;
            let table = model.table(&Context(ctx))?.marginal(&[p1, p2]);
            for (labels, p) in table.iter() {
                let sign = |l: &str| {
                    signs.sign(l).ok_or_else(|| {
                        Error::InvalidParameter(format!("no sign for outcome `{l}`"))
                    })
                };
                *e += sign(&labels[0])? * sign(&labels[1])? * p;
            }
        }
    }
    let total: f64 = correlators.iter().flatten().sum();
    let mut best = (f64::NEG_INFINITY, (0, 0));
    for (x, row) in correlators.iter().enumerate() {
        for (y, e) in row.iter().enumerate() {
            let v = (total - 2.0 * e).abs();
            if v > best.0 {
                best = (v, (x, y));
            }
        }
    }
    Ok(ChshValue {
        correlators,
        value: best.0,
        minus_at: best.1,
    })
}

pub fn chsh(model: &EmpiricalModel, party1: &str, party2: &str, signs: &SignMap) -> Result<f64> {
    chsh_detail(model, party1, party2, signs).map(|c| c.value)
}
