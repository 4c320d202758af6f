use crate::empirical::{Context, Signature};
use crate::error::{Error, Result};

/// Largest assignment space we are willing to enumerate.
pub const MAX_ASSIGNMENTS: u64 = 10_000_000;

/// One outcome for every (party, setting) pair, stored party-major in
/// signature order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlobalAssignment(pub Vec<usize>);

impl GlobalAssignment {
    /// Outcome index of `party` under `setting`.
    pub fn value(&self, layout: &SlotLayout, party: usize, setting: usize) -> usize {
        self.0[layout.offsets[party] + setting]
    }

    /// Flat outcome-tuple index of the restriction to `context`.
    pub fn restrict(&self, layout: &SlotLayout, sig: &Signature, context: &Context) -> usize {
        let mut flat = 0;
        for (party, &setting) in context.0.iter().enumerate() {
            let size = sig.parties[party].settings[setting].outcomes.len();
            flat = flat * size + self.value(layout, party, setting);
        }
        flat
    }

    /// Human-readable `Party[setting]=outcome` terms.
    pub fn describe(&self, sig: &Signature) -> Vec<(String, String, String)> {
        let layout = SlotLayout::new(sig);
        let mut out = Vec::new();
        for (k, p) in sig.parties.iter().enumerate() {
            for (s, setting) in p.settings.iter().enumerate() {
                out.push((
                    p.name.clone(),
                    setting.label.clone(),
                    setting.outcomes[self.value(&layout, k, s)].clone(),
                ));
            }
        }
        out
    }
}

/// Position of each party's first slot in a [`GlobalAssignment`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotLayout {
    offsets: Vec<usize>,
    radices: Vec<usize>,
}

impl SlotLayout {
    pub fn new(sig: &Signature) -> Self {
        let mut offsets = Vec::with_capacity(sig.parties.len());
        let mut radices = Vec::new();
        for p in &sig.parties {
            offsets.push(radices.len());
            radices.extend(p.settings.iter().map(|s| s.outcomes.len()));
        }
        SlotLayout { offsets, radices }
    }

    pub fn num_slots(&self) -> usize {
        self.radices.len()
    }

    pub fn count(&self) -> u128 {
        self.radices
            .iter()
            .fold(1u128, |acc, &r| acc.saturating_mul(r as u128))
    }
}

/// Lexicographic iterator over all global assignments.
#[derive(Debug, Clone)]
pub struct Assignments {
    layout: SlotLayout,
    next: Option<Vec<usize>>,
    remaining: usize,
}

impl Iterator for Assignments {
    type Item = GlobalAssignment;

    fn next(&mut self) -> Option<GlobalAssignment> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut carried = true;
        for k in (0..succ.len()).rev() {
            succ[k] += 1;
            if succ[k] < self.layout.radices[k] {
                carried = false;
                break;
            }
            succ[k] = 0;
        }
        if !carried {
            self.next = Some(succ);
        }
        self.remaining -= 1;
        Some(GlobalAssignment(current))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

impl ExactSizeIterator for Assignments {}

/// All `∏ |outcomes(party, setting)|` deterministic assignments.
pub fn enumerate_assignments(sig: &Signature) -> Result<Assignments> {
    let layout = SlotLayout::new(sig);
    let count = layout.count();
    if count > MAX_ASSIGNMENTS as u128 {
        return Err(Error::SizeLimit {
            count,
            limit: MAX_ASSIGNMENTS,
        });
    }
    Ok(Assignments {
        next: Some(vec![0; layout.num_slots()]),
        layout,
        remaining: count as usize,
    })
}
