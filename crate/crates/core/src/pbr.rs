//! The four-outcome antidistinguishing basis, the token/lab preparations and
//! the generalized decoding basis for unequal choice amplitudes.

use crate::error::{Error, Result};
use crate::qsim::{
    joint_distribution, ket0, ket1, ket_minus, ket_plus, re, OutcomeDistribution,
    ProjectiveMeasurement, StateVector, C64, TOL,
};

/// Outcome labels of the entangled basis, in order.
pub const XI_LABELS: [&str; 4] = ["xi1", "xi2", "xi3", "xi4"];

pub const GAMMA: &str = "Gamma";
pub const NOT_GAMMA: &str = "notGamma";

/// Amplitudes `alpha`, `beta` of the two choices, with the global phase fixed
/// so that `alpha` is real and non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChoiceAmplitudes {
    alpha: C64,
    beta: C64,
}

impl ChoiceAmplitudes {
    /// Accepts any pair with `|alpha|² + |beta|² = 1` (within 1e-12) and
    /// rotates away the phase of `alpha`.
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > TOL {
            return Err(Error::InvalidAmplitudes(norm));
        }
        let phase = if alpha.norm() > 0.0 {
            alpha.conj() / alpha.norm()
        } else {
            re(1.0)
        };
        Ok(ChoiceAmplitudes {
            alpha: re((alpha * phase).re.max(0.0)),
            beta: beta * phase,
        })
    }

    /// Real amplitudes `(sqrt(p0), sqrt(1 - p0))` for choice-0 probability `p0`.
    pub fn from_probability(p0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p0) {
            return Err(Error::InvalidAmplitudes(p0));
        }
        Self::new(re(p0.sqrt()), re((1.0 - p0).sqrt()))
    }

    /// Equal amplitudes `1/√2`.
    pub fn balanced() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ChoiceAmplitudes {
            alpha: re(h),
            beta: re(h),
        }
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    /// Probability of choosing 0.
    pub fn p0(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn is_degenerate(&self) -> bool {
        self.alpha.norm() <= TOL || self.beta.norm() <= TOL
    }
}

/// Entangled basis on two qubits; each element is orthogonal to exactly one
/// of `|00⟩, |0+⟩, |+0⟩, |++⟩` (in that order).
pub fn xi_basis_on(left: &str, right: &str) -> ProjectiveMeasurement {
    let pair = |a: StateVector, b: StateVector, c: StateVector, d: StateVector| {
        let first = a.tensor(&b).expect("distinct labels");
        let second = c.tensor(&d).expect("distinct labels");
        first
            .amps()
            .iter()
            .zip(second.amps())
            .map(|(x, y)| x + y)
            .collect::<Vec<C64>>()
    };
    let (l, r) = (left, right);
    let outcomes = vec![
        (XI_LABELS[0], pair(ket0(l), ket1(r), ket1(l), ket0(r))),
        (
            XI_LABELS[1],
            pair(ket0(l), ket_minus(r), ket1(l), ket_plus(r)),
        ),
        (
            XI_LABELS[2],
            pair(ket_plus(l), ket1(r), ket_minus(l), ket0(r)),
        ),
        (
            XI_LABELS[3],
            pair(ket_plus(l), ket_minus(r), ket_minus(l), ket_plus(r)),
        ),
    ];
    ProjectiveMeasurement::new(vec![l, r], outcomes).expect("xi basis is orthonormal")
}

/// The entangled basis on the two lab qubits `L_A`, `L_B`.
pub fn xi_basis() -> ProjectiveMeasurement {
    xi_basis_on("L_A", "L_B")
}

/// `alpha|00⟩ + beta|11⟩` on `(token, lab)`.
pub fn preparation(choice: &ChoiceAmplitudes, token: &str, lab: &str) -> Result<StateVector> {
    StateVector::new(
        [token, lab],
        vec![choice.alpha, re(0.0), re(0.0), choice.beta],
    )
}

/// Components `(gamma, delta)` of the decoding state, proportional to
/// `(1/alpha*, 1/beta*)` and normalized, so `gamma* alpha = delta* beta`.
pub fn gamma_components(choice: &ChoiceAmplitudes) -> Result<(C64, C64)> {
    if choice.is_degenerate() {
        return Err(Error::DegenerateChoice(choice.alpha.norm()));
    }
    let g = re(1.0) / choice.alpha.conj();
    let d = re(1.0) / choice.beta.conj();
    let norm = (g.norm_sqr() + d.norm_sqr()).sqrt();
    Ok((g / norm, d / norm))
}

/// Two-outcome basis `{Gamma, notGamma}` on `token`. Post-selecting `Gamma`
/// on [`preparation`] leaves the lab in `|+⟩`. For balanced real amplitudes
/// this is exactly the X basis, returned with its `+`/`-` labels.
pub fn gamma_basis(choice: &ChoiceAmplitudes, token: &str) -> Result<ProjectiveMeasurement> {
    let (g, d) = gamma_components(choice)?;
    let balanced = ChoiceAmplitudes::balanced();
    if (choice.alpha - balanced.alpha).norm() <= TOL && (choice.beta - balanced.beta).norm() <= TOL
    {
        return Ok(ProjectiveMeasurement::x(token));
    }
    ProjectiveMeasurement::new(
        vec![token],
        vec![(GAMMA, vec![g, d]), (NOT_GAMMA, vec![d.conj(), -g.conj()])],
    )
}

/// Label of the outcome of [`gamma_basis`] that heralds `|+⟩` on the lab.
pub fn gamma_outcome(basis: &ProjectiveMeasurement) -> &str {
    &basis.outcomes()[0].label
}

/// Distribution of the entangled-basis outcomes on a product of two
/// single-qubit preparations.
pub fn pbr_zero_table(left: &StateVector, right: &StateVector) -> Result<OutcomeDistribution> {
    pbr_table_with(&xi_basis_on("P", "Q"), left, right)
}

/// As [`pbr_zero_table`], with a caller-supplied basis on subsystems `P`, `Q`.
pub fn pbr_table_with(
    basis: &ProjectiveMeasurement,
    left: &StateVector,
    right: &StateVector,
) -> Result<OutcomeDistribution> {
    if left.num_qubits() != 1 || right.num_qubits() != 1 {
        return Err(Error::InvalidParameter(
            "preparations must be single-qubit states".into(),
        ));
    }
    let state = left.relabel(["P"])?.tensor(&right.relabel(["Q"])?)?;
    joint_distribution(&state, &[basis])
}
