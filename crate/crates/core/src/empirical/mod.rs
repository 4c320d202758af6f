//! Empirical models: one outcome table per context, where a context picks one
//! setting for every party. Contexts and outcome tuples are both indexed in
//! mixed radix, first party most significant, so iteration order is
//! lexicographic in the declared setting and outcome order.

mod json;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::qsim::{flatten, unflatten, OutcomeDistribution, TOL};

pub use json::{from_json, to_json, write_json_value, JSON_VERSION};

/// Default probability threshold separating possible from impossible events.
pub const DEFAULT_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SettingSignature {
    pub label: String,
    pub outcomes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartySignature {
    pub name: String,
    pub settings: Vec<SettingSignature>,
}

impl PartySignature {
    pub fn new<S: Into<String>>(name: S, settings: Vec<(S, Vec<S>)>) -> Self {
        PartySignature {
            name: name.into(),
            settings: settings
                .into_iter()
                .map(|(label, outcomes)| SettingSignature {
                    label: label.into(),
                    outcomes: outcomes.into_iter().map(Into::into).collect(),
                })
                .collect(),
        }
    }

    pub fn setting_index(&self, label: &str) -> Option<usize> {
        self.settings.iter().position(|s| s.label == label)
    }
}

/// Per-party setting labels and outcome alphabets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub parties: Vec<PartySignature>,
}

/// Setting index per party.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context(pub Vec<usize>);

impl Signature {
    pub fn new(parties: Vec<PartySignature>) -> Result<Self> {
        let sig = Signature { parties };
        sig.validate()?;
        Ok(sig)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        if self.parties.is_empty() {
            return bad("no parties".into());
        }
        for (i, p) in self.parties.iter().enumerate() {
            if self.parties[..i].iter().any(|q| q.name == p.name) {
                return bad(format!("duplicate party `{}`", p.name));
            }
            if p.settings.is_empty() {
                return bad(format!("party `{}` has no settings", p.name));
            }
            for (j, s) in p.settings.iter().enumerate() {
                if s.label.contains('|') {
                    return bad(format!("setting label `{}` contains `|`", s.label));
                }
                if p.settings[..j].iter().any(|t| t.label == s.label) {
                    return bad(format!("duplicate setting `{}` for `{}`", s.label, p.name));
                }
                if s.outcomes.is_empty() {
                    return bad(format!(
                        "setting `{}` of `{}` has no outcomes",
                        s.label, p.name
                    ));
                }
                for (k, o) in s.outcomes.iter().enumerate() {
                    if o.contains(',') {
                        return bad(format!("outcome label `{o}` contains `,`"));
                    }
                    if s.outcomes[..k].contains(o) {
                        return bad(format!("duplicate outcome `{o}`"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn num_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn party_index(&self, name: &str) -> Result<usize> {
        self.parties
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| Error::UnknownParty(name.to_string()))
    }

    fn setting_alphabets(&self) -> Vec<Vec<String>> {
        self.parties
            .iter()
            .map(|p| p.settings.iter().map(|s| s.label.clone()).collect())
            .collect()
    }

    pub fn num_contexts(&self) -> usize {
        self.parties.iter().map(|p| p.settings.len()).product()
    }

    pub fn context(&self, index: usize) -> Context {
        Context(unflatten(&self.setting_alphabets(), index))
    }

    pub fn context_position(&self, context: &Context) -> Option<usize> {
        flatten(&self.setting_alphabets(), &context.0)
    }

    /// All contexts in lexicographic order.
    pub fn contexts(&self) -> Vec<Context> {
        (0..self.num_contexts()).map(|i| self.context(i)).collect()
    }

    pub fn context_labels(&self, context: &Context) -> Vec<String> {
        context
            .0
            .iter()
            .zip(&self.parties)
            .map(|(&s, p)| p.settings[s].label.clone())
            .collect()
    }

    /// Setting labels joined with `|`, the key used in JSON tables.
    pub fn context_key(&self, context: &Context) -> String {
        self.context_labels(context).join("|")
    }

    pub fn context_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Context> {
        if labels.len() != self.parties.len() {
            return Err(Error::InvalidParameter(format!(
                "context needs {} settings, got {}",
                self.parties.len(),
                labels.len()
            )));
        }
        labels
            .iter()
            .zip(&self.parties)
            .map(|(l, p)| {
                p.setting_index(l.as_ref())
                    .ok_or_else(|| Error::UnknownSetting {
                        party: p.name.clone(),
                        setting: l.as_ref().to_string(),
                    })
            })
            .collect::<Result<Vec<_>>>()
            .map(Context)
    }

    pub fn outcome_alphabets(&self, context: &Context) -> Vec<Vec<String>> {
        context
            .0
            .iter()
            .zip(&self.parties)
            .map(|(&s, p)| p.settings[s].outcomes.clone())
            .collect()
    }

    pub fn outcome_index(&self, party: usize, setting: usize, label: &str) -> Option<usize> {
        self.parties[party].settings[setting]
            .outcomes
            .iter()
            .position(|o| o == label)
    }
}

/// Outcome table for every context plus free-form provenance strings.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalModel {
    signature: Signature,
    tables: Vec<OutcomeDistribution>,
    metadata: BTreeMap<String, String>,
}

impl EmpiricalModel {
    /// `tables` must be in context order and each must range over the
    /// outcome product of its context.
    pub fn new(
        signature: Signature,
        tables: Vec<OutcomeDistribution>,
        metadata: BTreeMap<String, String>,
    ) -> Result<Self> {
        signature.validate()?;
        if tables.len() != signature.num_contexts() {
            return Err(Error::InvalidModel(format!(
                "{} tables for {} contexts",
                tables.len(),
                signature.num_contexts()
            )));
        }
        for (i, t) in tables.iter().enumerate() {
            let ctx = signature.context(i);
            if t.alphabets() != signature.outcome_alphabets(&ctx).as_slice() {
                return Err(Error::InvalidModel(format!(
                    "table for context `{}` has the wrong outcome alphabets",
                    signature.context_key(&ctx)
                )));
            }
        }
        Ok(EmpiricalModel {
            signature,
            tables,
            metadata,
        })
    }

    /// Builds a model from raw probability vectors, one per context.
    pub fn from_fn<F>(signature: Signature, mut table: F) -> Result<Self>
    where
        F: FnMut(&Context) -> Vec<f64>,
    {
        let tables = signature
            .contexts()
            .iter()
            .map(|ctx| OutcomeDistribution::new(signature.outcome_alphabets(ctx), table(ctx)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(signature, tables, BTreeMap::new())
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn tables(&self) -> &[OutcomeDistribution] {
        &self.tables
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn with_metadata<K: Into<String>, V: Into<String>>(mut self, key: K, value: V) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn table(&self, context: &Context) -> Result<&OutcomeDistribution> {
        self.signature
            .context_position(context)
            .map(|i| &self.tables[i])
            .ok_or_else(|| Error::InvalidParameter(format!("context {:?} out of range", context.0)))
    }

    pub fn table_for<S: AsRef<str>>(&self, labels: &[S]) -> Result<&OutcomeDistribution> {
        let ctx = self.signature.context_from_labels(labels)?;
        self.table(&ctx)
    }

    /// The model consisting of the single given context.
    pub fn restrict_to_context(&self, context: &Context) -> Result<EmpiricalModel> {
        let table = self.table(context)?.clone();
        let parties = self
            .signature
            .parties
            .iter()
            .zip(&context.0)
            .map(|(p, &s)| PartySignature {
                name: p.name.clone(),
                settings: vec![p.settings[s].clone()],
            })
            .collect();
        let mut metadata = self.metadata.clone();
        metadata.insert(
            "restricted_to_context".into(),
            self.signature.context_key(context),
        );
        EmpiricalModel::new(Signature { parties }, vec![table], metadata)
    }
}

/// Outcome distribution of a subset of parties in one context, with
/// components in the order the party names are given.
pub fn marginalize<S: AsRef<str>>(
    model: &EmpiricalModel,
    context: &Context,
    parties: &[S],
) -> Result<OutcomeDistribution> {
    if parties.is_empty() {
        return Err(Error::InvalidParameter("empty party subset".into()));
    }
    let keep = parties
        .iter()
        .map(|p| model.signature.party_index(p.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(model.table(context)?.marginal(&keep))
}

/// Possibilistic shadow of an empirical model.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportModel {
    signature: Signature,
    possible: Vec<Vec<bool>>,
}

impl SupportModel {
    /// `possible[c][t]` flags outcome tuple `t` (flat index) in context `c`.
    pub fn new(signature: Signature, possible: Vec<Vec<bool>>) -> Result<Self> {
        signature.validate()?;
        if possible.len() != signature.num_contexts() {
            return Err(Error::InvalidModel(
                "one possible-set per context required".into(),
            ));
        }
        for (i, set) in possible.iter().enumerate() {
            let ctx = signature.context(i);
            let size: usize = signature
                .outcome_alphabets(&ctx)
                .iter()
                .map(Vec::len)
                .product();
            if set.len() != size {
                return Err(Error::InvalidModel(format!(
                    "possible-set for `{}` has {} entries, expected {size}",
                    signature.context_key(&ctx),
                    set.len()
                )));
            }
            if !set.iter().any(|&b| b) {
                return Err(Error::InvalidModel(format!(
                    "context `{}` has no possible outcome",
                    signature.context_key(&ctx)
                )));
            }
        }
        Ok(SupportModel {
            signature,
            possible,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn possible(&self, context: usize) -> &[bool] {
        &self.possible[context]
    }

    pub fn is_possible(&self, context: usize, tuple: usize) -> bool {
        self.possible[context][tuple]
    }

    /// Possible tuples of a context as outcome labels.
    pub fn possible_tuples(&self, context: &Context) -> Vec<Vec<String>> {
        let alphabets = self.signature.outcome_alphabets(context);
        let c = self
            .signature
            .context_position(context)
            .expect("valid context");
        self.possible[c]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(t, _)| {
                unflatten(&alphabets, t)
                    .iter()
                    .zip(&alphabets)
                    .map(|(&i, a)| a[i].clone())
                    .collect()
            })
            .collect()
    }
}

/// Tuples with probability above `epsilon`. Entries in `(1e-12, epsilon]`
/// are neither float noise nor clearly possible and are rejected.
pub fn support(model: &EmpiricalModel, epsilon: f64) -> Result<SupportModel> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} must be non-negative"
        )));
    }
    let mut possible = Vec::with_capacity(model.tables.len());
    for (i, t) in model.tables.iter().enumerate() {
        let key = || model.signature.context_key(&model.signature.context(i));
        if let Some(&p) = t.probs().iter().find(|&&p| p > TOL && p <= epsilon) {
            return Err(Error::EpsilonTooLarge {
                epsilon,
                reason: format!("entry {p:e} in context `{}` would be discarded", key()),
            });
        }
        let set: Vec<bool> = t.probs().iter().map(|&p| p > epsilon).collect();
        if !set.iter().any(|&b| b) {
            return Err(Error::EpsilonTooLarge {
                epsilon,
                reason: format!("context `{}` has no possible outcome", key()),
            });
        }
        possible.push(set);
    }
    Ok(SupportModel {
        signature: model.signature.clone(),
        possible,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetDiscrepancy {
    pub parties: Vec<String>,
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoSignallingReport {
    pub subsets: Vec<SubsetDiscrepancy>,
    pub max_discrepancy: f64,
    pub tol: f64,
    pub pass: bool,
}

/// For every proper nonempty party subset, the largest L∞ distance between
/// its marginals under different settings of the remaining parties.
pub fn no_signalling_report(model: &EmpiricalModel, tol: f64) -> NoSignallingReport {
    let sig = &model.signature;
    let n = sig.num_parties();
    let contexts = sig.contexts();
    let mut subsets = Vec::new();
    for mask in 1u32..(1u32 << n) - 1 {
        let keep: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
        let mut groups: BTreeMap<Vec<usize>, Vec<OutcomeDistribution>> = BTreeMap::new();
        for (i, ctx) in contexts.iter().enumerate() {
            let own: Vec<usize> = keep.iter().map(|&k| ctx.0[k]).collect();
            groups
                .entry(own)
                .or_default()
                .push(model.tables[i].marginal(&keep));
        }
        let mut worst: f64 = 0.0;
        for marginals in groups.values() {
            let first = &marginals[0];
            for t in 0..first.len() {
                let (lo, hi) = marginals.iter().fold((f64::MAX, f64::MIN), |(lo, hi), m| {
                    (lo.min(m.probs()[t]), hi.max(m.probs()[t]))
                });
                worst = worst.max(hi - lo);
            }
        }
        subsets.push(SubsetDiscrepancy {
            parties: keep.iter().map(|&k| sig.parties[k].name.clone()).collect(),
            discrepancy: worst,
        });
    }
    let max_discrepancy = subsets.iter().map(|s| s.discrepancy).fold(0.0, f64::max);
    NoSignallingReport {
        subsets,
        max_discrepancy,
        tol,
        pass: max_discrepancy <= tol,
    }
}
