//! Dense state-vector engine for a handful of labeled qubits.
//!
//! Amplitudes are stored big-endian with respect to the label list: the first
//! label is the most significant bit of the basis index, so `|01⟩` on
//! `["A", "B"]` is index 1. Measurements are rank-one projective measurements
//! given by their outcome states; measuring a subset of the subsystems traces
//! out the rest.

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Equality tolerance used throughout the engine.
pub const TOL: f64 = 1e-12;

/// Probabilities in `[-NEGATIVE_CLAMP, 0)` are treated as float noise and set to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-15;

/// Tolerance on the total mass of a stored distribution.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Generator used by [`sample`], reported in output metadata.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.3, seed_from_u64)";

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Normalized pure state over named qubit subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    labels: Vec<String>,
    amps: Vec<C64>,
}

impl StateVector {
    /// Builds a normalized state from raw amplitudes.
    pub fn new<I, S>(labels: I, amps: Vec<C64>) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels = collect_labels(labels)?;
        let expected = 1usize << labels.len();
        if amps.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: amps.len(),
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(StateVector { labels, amps })
    }

    pub fn from_real<I, S>(labels: I, amps: &[f64]) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(labels, amps.iter().copied().map(re).collect())
    }

    /// Computational basis state `|index⟩`.
    pub fn basis<I, S>(labels: I, index: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels = collect_labels(labels)?;
        let dim = 1usize << labels.len();
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: index + 1,
            });
        }
        let mut amps = vec![C64::default(); dim];
        amps[index] = re(1.0);
        Ok(StateVector { labels, amps })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Product state; labels of `self` come first.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        if let Some(l) = self.labels.iter().find(|l| other.labels.contains(l)) {
            return Err(Error::LabelCollision(l.clone()));
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(StateVector { labels, amps })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.labels != other.labels {
            return Err(Error::LabelMismatch {
                left: self.labels.clone(),
                right: other.labels.clone(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        self.inner(other).map(|z| z.norm_sqr())
    }

    /// Same amplitudes under new subsystem names.
    pub fn relabel<I, S>(&self, labels: I) -> Result<StateVector>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels = collect_labels(labels)?;
        if labels.len() != self.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.labels.len(),
                got: 1 << labels.len(),
            });
        }
        Ok(StateVector {
            labels,
            amps: self.amps.clone(),
        })
    }

    /// Applies the bra `⟨bra|` on the named subsystems and returns the
    /// unnormalized vector on the remaining ones (in their original order).
    fn contract(&self, subsystems: &[String], bra: &[C64]) -> Result<StateVector> {
        let positions = subsystems
            .iter()
            .map(|s| {
                self.position(s)
                    .ok_or_else(|| Error::UnknownSubsystem(s.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let n = self.labels.len();
        let m = positions.len();
        let rest: Vec<usize> = (0..n).filter(|p| !positions.contains(p)).collect();
        let mut out = vec![C64::default(); 1 << rest.len()];
        for (full, amp) in self.amps.iter().enumerate() {
            if *amp == C64::default() {
                continue;
            }
            let bit = |p: usize| (full >> (n - 1 - p)) & 1;
            let j = positions
                .iter()
                .enumerate()
                .fold(0, |acc, (k, &p)| acc | bit(p) << (m - 1 - k));
            let r = rest
                .iter()
                .enumerate()
                .fold(0, |acc, (k, &p)| acc | bit(p) << (rest.len() - 1 - k));
            out[r] += bra[j].conj() * amp;
        }
        Ok(StateVector {
            labels: rest.iter().map(|&p| self.labels[p].clone()).collect(),
            amps: out,
        })
    }
}

fn collect_labels<I, S>(labels: I) -> Result<Vec<String>>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(labels)
}

pub fn make_state<I, S>(labels: I, amps: Vec<C64>) -> Result<StateVector>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    StateVector::new(labels, amps)
}

pub fn ket0(label: &str) -> StateVector {
    single(label, re(1.0), re(0.0))
}

pub fn ket1(label: &str) -> StateVector {
    single(label, re(0.0), re(1.0))
}

pub fn ket_plus(label: &str) -> StateVector {
    single(label, re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2))
}

pub fn ket_minus(label: &str) -> StateVector {
    single(label, re(FRAC_1_SQRT_2), re(-FRAC_1_SQRT_2))
}

pub fn ket_plus_i(label: &str) -> StateVector {
    single(label, re(FRAC_1_SQRT_2), c(0.0, FRAC_1_SQRT_2))
}

pub fn ket_minus_i(label: &str) -> StateVector {
    single(label, re(FRAC_1_SQRT_2), c(0.0, -FRAC_1_SQRT_2))
}

fn single(label: &str, a0: C64, a1: C64) -> StateVector {
    StateVector {
        labels: vec![label.to_string()],
        amps: vec![a0, a1],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub label: String,
    /// Projector state on the measured subsystems.
    pub state: StateVector,
}

/// Rank-one projective measurement on a fixed list of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    subsystems: Vec<String>,
    outcomes: Vec<MeasurementOutcome>,
    complete: bool,
}

impl ProjectiveMeasurement {
    /// Builds a measurement from labeled outcome vectors. Vectors are
    /// normalized; they must be pairwise orthogonal. The measurement is
    /// complete iff there are `2^k` outcomes on `k` subsystems.
    pub fn new<S: Into<String>>(subsystems: Vec<S>, outcomes: Vec<(S, Vec<C64>)>) -> Result<Self> {
        let subsystems = collect_labels(subsystems)?;
        let outcomes = outcomes
            .into_iter()
            .map(|(label, amps)| {
                Ok(MeasurementOutcome {
                    label: label.into(),
                    state: StateVector::new(subsystems.clone(), amps)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_outcomes(subsystems, outcomes)
    }

    fn from_outcomes(subsystems: Vec<String>, outcomes: Vec<MeasurementOutcome>) -> Result<Self> {
        let dim = 1usize << subsystems.len();
        if outcomes.is_empty() || outcomes.len() > dim {
            return Err(Error::InvalidMeasurement(format!(
                "{} outcomes on a {dim}-dimensional space",
                outcomes.len()
            )));
        }
        for (i, a) in outcomes.iter().enumerate() {
            for b in &outcomes[..i] {
                if a.label == b.label {
                    return Err(Error::InvalidMeasurement(format!(
                        "duplicate outcome label `{}`",
                        a.label
                    )));
                }
                let overlap = b.state.inner(&a.state)?.norm();
                if overlap > TOL {
                    return Err(Error::InvalidMeasurement(format!(
                        "outcomes `{}` and `{}` overlap by {overlap:e}",
                        b.label, a.label
                    )));
                }
            }
        }
        let complete = outcomes.len() == dim;
        Ok(ProjectiveMeasurement {
            subsystems,
            outcomes,
            complete,
        })
    }

    /// Z basis with outcomes `0`, `1`.
    pub fn z(label: &str) -> Self {
        Self::trusted(label, [("0", ket0(label)), ("1", ket1(label))])
    }

    /// X basis with outcomes `+`, `-`.
    pub fn x(label: &str) -> Self {
        Self::trusted(label, [("+", ket_plus(label)), ("-", ket_minus(label))])
    }

    /// Y basis with outcomes `+i`, `-i`.
    pub fn y(label: &str) -> Self {
        Self::trusted(
            label,
            [("+i", ket_plus_i(label)), ("-i", ket_minus_i(label))],
        )
    }

    fn trusted(label: &str, outcomes: [(&str, StateVector); 2]) -> Self {
        ProjectiveMeasurement {
            subsystems: vec![label.to_string()],
            outcomes: outcomes
                .into_iter()
                .map(|(l, state)| MeasurementOutcome {
                    label: l.to_string(),
                    state,
                })
                .collect(),
            complete: true,
        }
    }

    /// Joint computational basis; outcome `|ij…⟩` is labeled `(ij…)`.
    pub fn computational<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let labels = collect_labels(labels.iter().map(|s| s.as_ref().to_string()))?;
        let n = labels.len();
        let outcomes = (0..1usize << n)
            .map(|i| {
                let bits: String = (0..n)
                    .map(|p| {
                        if (i >> (n - 1 - p)) & 1 == 1 {
                            '1'
                        } else {
                            '0'
                        }
                    })
                    .collect();
                Ok(MeasurementOutcome {
                    label: format!("({bits})"),
                    state: StateVector::basis(labels.clone(), i)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProjectiveMeasurement {
            subsystems: labels,
            outcomes,
            complete: true,
        })
    }

    /// The same measurement acting on differently named subsystems.
    pub fn on<S: AsRef<str>>(&self, subsystems: &[S]) -> Result<Self> {
        let subsystems = collect_labels(subsystems.iter().map(|s| s.as_ref().to_string()))?;
        let outcomes = self
            .outcomes
            .iter()
            .map(|o| {
                Ok(MeasurementOutcome {
                    label: o.label.clone(),
                    state: o.state.relabel(subsystems.clone())?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProjectiveMeasurement {
            subsystems,
            outcomes,
            complete: self.complete,
        })
    }

    pub fn subsystems(&self) -> &[String] {
        &self.subsystems
    }

    pub fn outcomes(&self) -> &[MeasurementOutcome] {
        &self.outcomes
    }

    pub fn outcome_labels(&self) -> Vec<String> {
        self.outcomes.iter().map(|o| o.label.clone()).collect()
    }

    pub fn outcome(&self, label: &str) -> Option<&MeasurementOutcome> {
        self.outcomes.iter().find(|o| o.label == label)
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Largest deviation of `Σ|e_k⟩⟨e_k|` from the identity.
    pub fn completeness_error(&self) -> f64 {
        let dim = 1usize << self.subsystems.len();
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let sum: C64 = self
                    .outcomes
                    .iter()
                    .map(|o| o.state.amps[i] * o.state.amps[j].conj())
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((sum - target).norm());
            }
        }
        worst
    }
}

/// Probabilities over the product of per-component outcome alphabets,
/// indexed in mixed radix with the first component most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    alphabets: Vec<Vec<String>>,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(alphabets: Vec<Vec<String>>, probs: Vec<f64>) -> Result<Self> {
        let expected: usize = alphabets.iter().map(Vec::len).product();
        if probs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: probs.len(),
            });
        }
        let probs = probs
            .into_iter()
            .map(clamp_probability)
            .collect::<Result<Vec<_>>>()?;
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Numerical(format!(
                "distribution sums to {total}, not 1"
            )));
        }
        Ok(OutcomeDistribution { alphabets, probs })
    }

    pub fn alphabets(&self) -> &[Vec<String>] {
        &self.alphabets
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn arity(&self) -> usize {
        self.alphabets.len()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Outcome indices of the `flat`-th tuple.
    pub fn tuple_indices(&self, flat: usize) -> Vec<usize> {
        unflatten(&self.alphabets, flat)
    }

    pub fn tuple_labels(&self, flat: usize) -> Vec<String> {
        self.tuple_indices(flat)
            .iter()
            .zip(&self.alphabets)
            .map(|(&i, a)| a[i].clone())
            .collect()
    }

    pub fn flat_index(&self, indices: &[usize]) -> Option<usize> {
        flatten(&self.alphabets, indices)
    }

    pub fn prob_at(&self, indices: &[usize]) -> Option<f64> {
        self.flat_index(indices).map(|i| self.probs[i])
    }

    /// Probability of a tuple given by outcome labels.
    pub fn get<S: AsRef<str>>(&self, labels: &[S]) -> Option<f64> {
        if labels.len() != self.alphabets.len() {
            return None;
        }
        let indices = labels
            .iter()
            .zip(&self.alphabets)
            .map(|(l, a)| a.iter().position(|x| x == l.as_ref()))
            .collect::<Option<Vec<_>>>()?;
        self.prob_at(&indices)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<String>, f64)> + '_ {
        (0..self.probs.len()).map(move |i| (self.tuple_labels(i), self.probs[i]))
    }

    /// Distribution of the listed components, in the listed order.
    pub fn marginal(&self, keep: &[usize]) -> OutcomeDistribution {
        let alphabets: Vec<Vec<String>> = keep.iter().map(|&k| self.alphabets[k].clone()).collect();
        let mut probs = vec![0.0; alphabets.iter().map(Vec::len).product()];
        for (flat, p) in self.probs.iter().enumerate() {
            let idx = self.tuple_indices(flat);
            let sub: Vec<usize> = keep.iter().map(|&k| idx[k]).collect();
            probs[flatten(&alphabets, &sub).expect("in range")] += p;
        }
        OutcomeDistribution { alphabets, probs }
    }

    /// Conditions on fixed `(component, outcome index)` pairs and returns the
    /// distribution of the remaining components.
    pub fn condition(&self, fixed: &[(usize, usize)]) -> Result<OutcomeDistribution> {
        for &(k, v) in fixed {
            if k >= self.alphabets.len() || v >= self.alphabets[k].len() {
                return Err(Error::InvalidParameter(format!(
                    "condition ({k}, {v}) out of range"
                )));
            }
        }
        let rest: Vec<usize> = (0..self.alphabets.len())
            .filter(|k| !fixed.iter().any(|(f, _)| f == k))
            .collect();
        let alphabets: Vec<Vec<String>> = rest.iter().map(|&k| self.alphabets[k].clone()).collect();
        let mut probs = vec![0.0; alphabets.iter().map(Vec::len).product()];
        let mut mass = 0.0;
        for (flat, p) in self.probs.iter().enumerate() {
            let idx = self.tuple_indices(flat);
            if fixed.iter().all(|&(k, v)| idx[k] == v) {
                let sub: Vec<usize> = rest.iter().map(|&k| idx[k]).collect();
                probs[flatten(&alphabets, &sub).expect("in range")] += p;
                mass += p;
            }
        }
        if mass <= TOL {
            return Err(Error::ZeroConditioningEvent(mass));
        }
        probs.iter_mut().for_each(|p| *p /= mass);
        Ok(OutcomeDistribution { alphabets, probs })
    }
}

pub(crate) fn flatten(alphabets: &[Vec<String>], indices: &[usize]) -> Option<usize> {
    if indices.len() != alphabets.len() {
        return None;
    }
    let mut flat = 0;
    for (&i, a) in indices.iter().zip(alphabets) {
        if i >= a.len() {
            return None;
        }
        flat = flat * a.len() + i;
    }
    Some(flat)
}

pub(crate) fn unflatten(alphabets: &[Vec<String>], mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; alphabets.len()];
    for (k, a) in alphabets.iter().enumerate().rev() {
        idx[k] = flat % a.len();
        flat /= a.len();
    }
    idx
}

pub(crate) fn clamp_probability(p: f64) -> Result<f64> {
    if p.is_nan() || p < -NEGATIVE_CLAMP {
        return Err(Error::Numerical(format!("negative probability {p:e}")));
    }
    Ok(p.max(0.0))
}

fn check_measurements(state: &StateVector, measurements: &[&ProjectiveMeasurement]) -> Result<()> {
    let mut seen: Vec<&String> = Vec::new();
    for m in measurements {
        if !m.is_complete() {
            return Err(Error::IncompleteMeasurement(m.subsystems.clone()));
        }
        for s in &m.subsystems {
            if state.position(s).is_none() {
                return Err(Error::UnknownSubsystem(s.clone()));
            }
            if seen.contains(&s) {
                return Err(Error::OverlappingSubsystems(s.clone()));
            }
            seen.push(s);
        }
    }
    Ok(())
}

/// Born-rule distribution of jointly measuring disjoint subsystem sets.
/// Tuple components follow the order of `measurements`.
pub fn joint_distribution(
    state: &StateVector,
    measurements: &[&ProjectiveMeasurement],
) -> Result<OutcomeDistribution> {
    check_measurements(state, measurements)?;
    let alphabets: Vec<Vec<String>> = measurements.iter().map(|m| m.outcome_labels()).collect();
    let mut probs = Vec::with_capacity(alphabets.iter().map(Vec::len).product());
    branch(state, measurements, &mut probs)?;
    OutcomeDistribution::new(alphabets, probs)
}

fn branch(
    state: &StateVector,
    measurements: &[&ProjectiveMeasurement],
    out: &mut Vec<f64>,
) -> Result<()> {
    match measurements.split_first() {
        None => {
            out.push(clamp_probability(state.norm_sqr())?);
            Ok(())
        }
        Some((m, rest)) => {
            for o in &m.outcomes {
                let reduced = state.contract(&m.subsystems, &o.state.amps)?;
                branch(&reduced, rest, out)?;
            }
            Ok(())
        }
    }
}

/// Projects onto one outcome and returns the normalized state of the
/// unmeasured subsystems together with the outcome probability.
pub fn post_select(
    state: &StateVector,
    measurement: &ProjectiveMeasurement,
    outcome: &str,
) -> Result<(StateVector, f64)> {
    let o = measurement
        .outcome(outcome)
        .ok_or_else(|| Error::UnknownOutcome(outcome.to_string()))?;
    for s in &measurement.subsystems {
        if state.position(s).is_none() {
            return Err(Error::UnknownSubsystem(s.clone()));
        }
    }
    let reduced = state.contract(&measurement.subsystems, &o.state.amps)?;
    let probability = reduced.norm_sqr();
    if probability <= TOL {
        return Err(Error::ZeroProbabilityOutcome {
            label: outcome.to_string(),
            probability,
        });
    }
    let norm = probability.sqrt();
    let amps = reduced.amps.into_iter().map(|a| a / norm).collect();
    Ok((
        StateVector {
            labels: reduced.labels,
            amps,
        },
        probability,
    ))
}

/// Outcome counts from repeated independent measurement of fresh copies.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCounts {
    pub alphabets: Vec<Vec<String>>,
    pub counts: Vec<u64>,
    pub shots: u64,
    pub seed: u64,
    pub rng: &'static str,
}

impl SampleCounts {
    pub fn count<S: AsRef<str>>(&self, labels: &[S]) -> Option<u64> {
        let indices = labels
            .iter()
            .zip(&self.alphabets)
            .map(|(l, a)| a.iter().position(|x| x == l.as_ref()))
            .collect::<Option<Vec<_>>>()?;
        flatten(&self.alphabets, &indices).map(|i| self.counts[i])
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.shots as f64)
            .collect()
    }
}

/// Draws `shots` i.i.d. outcome tuples; deterministic for a given seed.
pub fn sample(
    state: &StateVector,
    measurements: &[&ProjectiveMeasurement],
    shots: u64,
    seed: u64,
) -> Result<SampleCounts> {
    if shots == 0 {
        return Err(Error::InvalidParameter(
            "sample count must be at least 1".into(),
        ));
    }
    let dist = joint_distribution(state, measurements)?;
    let index = WeightedIndex::new(dist.probs()).map_err(|e| Error::Numerical(e.to_string()))?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; dist.len()];
    for _ in 0..shots {
        counts[index.sample(&mut rng)] += 1;
    }
    Ok(SampleCounts {
        alphabets: dist.alphabets,
        counts,
        shots,
        seed,
        rng: RNG_ALGORITHM,
    })
}
