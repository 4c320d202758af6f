use serde_json::{json, Map, Value};

use crate::empirical::{write_json_value, Signature, JSON_VERSION};

use super::GlobalAssignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Local,
    LogicallyContextual,
    StronglyContextual,
    LhvInfeasible,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Local => "local",
            Verdict::LogicallyContextual => "logically-contextual",
            Verdict::StronglyContextual => "strongly-contextual",
            Verdict::LhvInfeasible => "lhv-infeasible",
        }
    }

    pub fn is_nonclassical(&self) -> bool {
        *self != Verdict::Local
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A possible outcome tuple that no globally consistent assignment produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Setting label per party.
    pub context: Vec<String>,
    /// Outcome label per party.
    pub tuple: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateTerm {
    pub context: Vec<String>,
    pub tuple: Vec<String>,
    pub coefficient: f64,
}

/// Linear functional `Σ coefficient · p(tuple | context)` whose maximum over
/// deterministic assignments is `classical_bound`, evaluated on the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub terms: Vec<CertificateTerm>,
    pub classical_bound: f64,
    pub model_value: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedAssignment {
    pub assignment: GlobalAssignment,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub signature: Signature,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub certificate: Option<Certificate>,
    pub weights: Option<Vec<WeightedAssignment>>,
}

impl FeasibilityReport {
    pub fn to_json_value(&self, analysis: &str) -> Value {
        let mut obj = Map::new();
        obj.insert("version".into(), json!(JSON_VERSION));
        obj.insert("kind".into(), json!("feasibility-report"));
        obj.insert("analysis".into(), json!(analysis));
        obj.insert("verdict".into(), json!(self.verdict.as_str()));
        let parties: Vec<&str> = self
            .signature
            .parties
            .iter()
            .map(|p| p.name.as_str())
            .collect();
        if let Some(w) = &self.witness {
            obj.insert(
                "witness".into(),
                json!({
                    "context": labelled(&parties, &w.context),
                    "tuple": labelled(&parties, &w.tuple),
                }),
            );
        }
        if let Some(c) = &self.certificate {
            let terms: Vec<Value> = c
                .terms
                .iter()
                .map(|t| {
                    json!({
                        "context": t.context.join("|"),
                        "tuple": t.tuple.join(","),
                        "coefficient": t.coefficient,
                    })
                })
                .collect();
            obj.insert(
                "certificate".into(),
                json!({
                    "terms": terms,
                    "classical_bound": c.classical_bound,
                    "model_value": c.model_value,
                    "margin": c.margin,
                }),
            );
        }
        if let Some(ws) = &self.weights {
            let entries: Vec<Value> = ws
                .iter()
                .map(|w| {
                    let mut assignment = Map::new();
                    for (party, setting, outcome) in w.assignment.describe(&self.signature) {
                        assignment
                            .entry(party)
                            .or_insert_with(|| Value::Object(Map::new()))
                            .as_object_mut()
                            .expect("object")
                            .insert(setting, json!(outcome));
                    }
                    json!({"assignment": assignment, "weight": w.weight})
                })
                .collect();
            obj.insert("weights".into(), json!(entries));
        }
        Value::Object(obj)
    }

    pub fn to_json(&self, analysis: &str) -> String {
        write_json_value(&self.to_json_value(analysis))
    }
}

fn labelled(parties: &[&str], values: &[String]) -> Value {
    Value::Object(
        parties
            .iter()
            .zip(values)
            .map(|(p, v)| (p.to_string(), json!(v)))
            .collect(),
    )
}
