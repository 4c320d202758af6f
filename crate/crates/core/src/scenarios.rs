//! Measurement scenarios of the protocol, flattened to one multipartite state
//! with commuting measurements on disjoint subsystems.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::empirical::{Context, EmpiricalModel, PartySignature, SettingSignature, Signature};
use crate::error::{Error, Result};
use crate::pbr::{gamma_basis, preparation, xi_basis, ChoiceAmplitudes};
use crate::qsim::{
    c, joint_distribution, re, sample, OutcomeDistribution, ProjectiveMeasurement, StateVector,
    C64, RNG_ALGORITHM,
};

/// A named agent with one projective measurement per setting label.
#[derive(Debug, Clone, PartialEq)]
pub struct Party {
    pub name: String,
    pub settings: Vec<(String, ProjectiveMeasurement)>,
}

impl Party {
    pub fn new<S: Into<String>>(
        name: S,
        settings: Vec<(S, ProjectiveMeasurement)>,
    ) -> Result<Self> {
        let party = Party {
            name: name.into(),
            settings: settings.into_iter().map(|(l, m)| (l.into(), m)).collect(),
        };
        let Some((_, first)) = party.settings.first() else {
            return Err(Error::InvalidScenario(format!(
                "party `{}` has no settings",
                party.name
            )));
        };
        let mut own = first.subsystems().to_vec();
        own.sort();
        for (i, (label, m)) in party.settings.iter().enumerate() {
            if party.settings[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::InvalidScenario(format!(
                    "party `{}` repeats setting `{label}`",
                    party.name
                )));
            }
            let mut subs = m.subsystems().to_vec();
            subs.sort();
            if subs != own {
                return Err(Error::InvalidScenario(format!(
                    "setting `{label}` of `{}` acts on {subs:?}, not {own:?}",
                    party.name
                )));
            }
        }
        Ok(party)
    }

    pub fn subsystems(&self) -> &[String] {
        self.settings[0].1.subsystems()
    }
}

/// Shared state plus the parties measuring it.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    name: String,
    state: StateVector,
    parties: Vec<Party>,
    metadata: BTreeMap<String, String>,
}

impl Scenario {
    pub fn new<S: Into<String>>(name: S, state: StateVector, parties: Vec<Party>) -> Result<Self> {
        let mut seen: Vec<&String> = Vec::new();
        for p in &parties {
            if parties.iter().filter(|q| q.name == p.name).count() > 1 {
                return Err(Error::InvalidScenario(format!(
                    "duplicate party `{}`",
                    p.name
                )));
            }
            for s in p.subsystems() {
                if state.position(s).is_none() {
                    return Err(Error::UnknownSubsystem(s.clone()));
                }
                if seen.contains(&s) {
                    return Err(Error::OverlappingSubsystems(s.clone()));
                }
                seen.push(s);
            }
            if let Some((l, _)) = p.settings.iter().find(|(_, m)| !m.is_complete()) {
                return Err(Error::InvalidScenario(format!(
                    "setting `{l}` of `{}` is an incomplete measurement",
                    p.name
                )));
            }
        }
        if parties.is_empty() {
            return Err(Error::InvalidScenario("no parties".into()));
        }
        Ok(Scenario {
            name: name.into(),
            state,
            parties,
            metadata: BTreeMap::new(),
        })
    }

    pub fn with_metadata<K: Into<String>, V: Into<String>>(mut self, key: K, value: V) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn parties(&self) -> &[Party] {
        &self.parties
    }

    pub fn party(&self, name: &str) -> Result<&Party> {
        self.parties
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::UnknownParty(name.to_string()))
    }

    pub fn signature(&self) -> Signature {
        Signature {
            parties: self
                .parties
                .iter()
                .map(|p| PartySignature {
                    name: p.name.clone(),
                    settings: p
                        .settings
                        .iter()
                        .map(|(label, m)| SettingSignature {
                            label: label.clone(),
                            outcomes: m.outcome_labels(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    /// One measurement per party for the given context.
    pub fn measurements(&self, context: &Context) -> Vec<&ProjectiveMeasurement> {
        self.parties
            .iter()
            .zip(&context.0)
            .map(|(p, &s)| &p.settings[s].1)
            .collect()
    }
}

fn describe(z: C64) -> String {
    if z.im == 0.0 {
        format!("{:.16e}", z.re)
    } else {
        format!("{:.16e},{:.16e}", z.re, z.im)
    }
}

/// Charlie and Debbie measure the tokens `T_A`, `T_B` in Z (`x,y = 0`) or in
/// the decoding basis (`x,y = 1`); Wigner measures the labs `L_A ⊗ L_B` in
/// the computational basis (`z = 0`) or the entangled basis (`z = 1`).
pub fn main_scenario(choice_a: &ChoiceAmplitudes, choice_b: &ChoiceAmplitudes) -> Result<Scenario> {
    main_scenario_with(choice_a, choice_b, &xi_basis())
}

/// [`main_scenario`] with a caller-supplied `z = 1` measurement on `L_A ⊗ L_B`.
pub fn main_scenario_with(
    choice_a: &ChoiceAmplitudes,
    choice_b: &ChoiceAmplitudes,
    wigner_basis: &ProjectiveMeasurement,
) -> Result<Scenario> {
    let state =
        preparation(choice_a, "T_A", "L_A")?.tensor(&preparation(choice_b, "T_B", "L_B")?)?;
    let charlie = Party::new(
        "Charlie",
        vec![
            ("0", ProjectiveMeasurement::z("T_A")),
            ("1", gamma_basis(choice_a, "T_A")?),
        ],
    )?;
    let debbie = Party::new(
        "Debbie",
        vec![
            ("0", ProjectiveMeasurement::z("T_B")),
            ("1", gamma_basis(choice_b, "T_B")?),
        ],
    )?;
    let wigner = Party::new(
        "Wigner",
        vec![
            ("0", ProjectiveMeasurement::computational(&["L_A", "L_B"])?),
            ("1", wigner_basis.on(&["L_A", "L_B"])?),
        ],
    )?;
    Ok(Scenario::new("main", state, vec![charlie, debbie, wigner])?
        .with_metadata("alpha_a", describe(choice_a.alpha()))
        .with_metadata("beta_a", describe(choice_a.beta()))
        .with_metadata("alpha_b", describe(choice_b.alpha()))
        .with_metadata("beta_b", describe(choice_b.beta())))
}

/// Two-qubit scenario on `(1/√3)(|00⟩+|01⟩+|11⟩)` over `(A, S)`: Wigner
/// measures `A` in Z or X, Bob measures `S` in Z or X.
pub fn minimal_scenario() -> Scenario {
    let state = StateVector::from_real(["A", "S"], &[1.0, 1.0, 0.0, 1.0]).expect("valid state");
    let party = |name: &str, q: &str| {
        Party::new(
            name.to_string(),
            vec![
                ("0".to_string(), ProjectiveMeasurement::z(q)),
                ("1".to_string(), ProjectiveMeasurement::x(q)),
            ],
        )
        .expect("valid party")
    };
    Scenario::new(
        "minimal",
        state,
        vec![party("Wigner", "A"), party("Bob", "S")],
    )
    .expect("valid scenario")
}

/// Exact Born-rule table for every context.
pub fn generate_table(scenario: &Scenario) -> Result<EmpiricalModel> {
    let signature = scenario.signature();
    let tables = signature
        .contexts()
        .par_iter()
        .map(|ctx| joint_distribution(&scenario.state, &scenario.measurements(ctx)))
        .collect::<Result<Vec<_>>>()?;
    let mut metadata = scenario.metadata.clone();
    metadata.insert("scenario".into(), scenario.name.clone());
    metadata.insert("generator".into(), "born-rule".into());
    EmpiricalModel::new(signature, tables, metadata)
}

/// Distribution of the unconditioned parties in `context`, given fixed
/// outcomes `(party, outcome)` of the others.
pub fn conditional<S: AsRef<str>>(
    model: &EmpiricalModel,
    context: &Context,
    condition: &[(S, S)],
) -> Result<OutcomeDistribution> {
    let sig = model.signature();
    let fixed = condition
        .iter()
        .map(|(party, outcome)| {
            let k = sig.party_index(party.as_ref())?;
            let setting = *context
                .0
                .get(k)
                .ok_or_else(|| Error::InvalidParameter("context too short".into()))?;
            let v = sig
                .outcome_index(k, setting, outcome.as_ref())
                .ok_or_else(|| Error::UnknownOutcome(outcome.as_ref().to_string()))?;
            Ok((k, v))
        })
        .collect::<Result<Vec<_>>>()?;
    model.table(context)?.condition(&fixed)
}

/// Amplitudes reconstructed from sampled copies of a token/lab preparation.
#[derive(Debug, Clone, PartialEq)]
pub struct TomographyEstimate {
    pub alpha_hat: C64,
    pub beta_hat: C64,
    pub n_samples: u64,
    pub stderr: f64,
    /// Estimated `Re(alpha beta*)` and `Im(alpha beta*)`.
    pub cross: C64,
    pub seed: u64,
    pub rng: &'static str,
}

impl TomographyEstimate {
    pub fn p0_hat(&self) -> f64 {
        self.alpha_hat.norm_sqr()
    }

    pub fn choice(&self) -> Result<ChoiceAmplitudes> {
        ChoiceAmplitudes::new(self.alpha_hat, self.beta_hat)
    }
}

fn correlator(counts: &crate::qsim::SampleCounts) -> f64 {
    // Outcome index 0 is the +1 eigenvalue in every basis used here.
    let n = counts.shots as f64;
    counts
        .counts
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let sign = if (i >> 1) ^ (i & 1) == 0 { 1.0 } else { -1.0 };
            sign * k as f64
        })
        .sum::<f64>()
        / n
}

/// Estimates the choice amplitudes from `n` copies per basis: Z⊗Z gives
/// `|alpha|²`, X⊗X gives `2 Re(alpha beta*)` and X⊗Y gives `-2 Im(alpha beta*)`.
pub fn tomography(choice: &ChoiceAmplitudes, n: u64, seed: u64) -> Result<TomographyEstimate> {
    if n < 1000 {
        return Err(Error::InvalidParameter(format!(
            "tomography needs at least 1000 samples, got {n}"
        )));
    }
    let psi = preparation(choice, "T", "L")?;
    let stream = |k: u64| seed.wrapping_add(k.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let z = [ProjectiveMeasurement::z("T"), ProjectiveMeasurement::z("L")];
    let zz = sample(&psi, &[&z[0], &z[1]], n, stream(0))?;
    let xx = sample(
        &psi,
        &[
            &ProjectiveMeasurement::x("T"),
            &ProjectiveMeasurement::x("L"),
        ],
        n,
        stream(1),
    )?;
    let xy = sample(
        &psi,
        &[
            &ProjectiveMeasurement::x("T"),
            &ProjectiveMeasurement::y("L"),
        ],
        n,
        stream(2),
    )?;

    let token_zero = zz.count(&["0", "0"]).unwrap_or(0) + zz.count(&["0", "1"]).unwrap_or(0);
    let p0 = token_zero as f64 / n as f64;
    let cross = c(correlator(&xx) / 2.0, -correlator(&xy) / 2.0);
    let alpha_hat = re(p0.sqrt());
    let beta_mag = (1.0 - p0).max(0.0).sqrt();
    // beta* = cross / alpha, so arg(beta) = -arg(cross).
    let beta_hat = if beta_mag == 0.0 || cross.norm() == 0.0 {
        re(beta_mag)
    } else {
        C64::from_polar(beta_mag, -cross.arg())
    };
    Ok(TomographyEstimate {
        alpha_hat,
        beta_hat,
        n_samples: n,
        stderr: 1.0 / (n as f64).sqrt(),
        cross,
        seed,
        rng: RNG_ALGORITHM,
    })
}
