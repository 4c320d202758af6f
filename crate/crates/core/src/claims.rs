//! Checklist of the protocol's quantitative claims, each recomputed from
//! scratch and compared with its expected value.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use crate::analysis::{chsh, lhv_feasibility, logical_contextuality, SignMap, Verdict};
use crate::empirical::{from_json, no_signalling_report, support, to_json, EmpiricalModel};
use crate::error::Result;
use crate::pbr::{
    gamma_basis, gamma_outcome, pbr_table_with, preparation, xi_basis, ChoiceAmplitudes,
};
use crate::qsim::{ket0, ket_plus, post_select, ProjectiveMeasurement, StateVector, C64, TOL};
use crate::scenarios::{
    conditional, generate_table, main_scenario_with, minimal_scenario, tomography,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    pub id: &'static str,
    pub description: &'static str,
    pub measured: String,
    pub expected: String,
    pub pass: bool,
    pub elapsed: Duration,
}

impl Claim {
    pub fn to_json_value(&self) -> Value {
        json!({
            "id": self.id,
            "description": self.description,
            "measured": self.measured,
            "expected": self.expected,
            "pass": self.pass,
        })
    }
}

/// Inputs of the checklist. The entangled basis is injectable so that a
/// corrupted basis can be shown to break the zero checks.
#[derive(Debug, Clone)]
pub struct ClaimConfig {
    pub xi_basis: ProjectiveMeasurement,
    pub epsilon: f64,
    pub tol: f64,
    pub generalization_pairs: usize,
    pub generalization_seed: u64,
    pub tomography_samples: u64,
    pub tomography_seeds: Vec<u64>,
    pub tomography_p0: Vec<f64>,
    pub tomography_tolerance: f64,
}

impl Default for ClaimConfig {
    fn default() -> Self {
        ClaimConfig {
            xi_basis: xi_basis(),
            epsilon: crate::empirical::DEFAULT_EPSILON,
            tol: crate::analysis::DEFAULT_TOL,
            generalization_pairs: 100,
            generalization_seed: 2024,
            tomography_samples: 1_000_000,
            tomography_seeds: (1..=10).collect(),
            tomography_p0: vec![0.5, 1.0 / 3.0, 0.81],
            tomography_tolerance: 5e-3,
        }
    }
}

/// Six significant digits, switching to exponent form for tiny or huge values.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-3..6).contains(&mag) {
        format!("{:.*}", (5 - mag).max(0) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

fn timed(
    id: &'static str,
    description: &'static str,
    f: impl FnOnce() -> Result<(bool, String, String)>,
) -> Claim {
    let start = Instant::now();
    let (pass, measured, expected) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}"), "no error".into()),
    };
    Claim {
        id,
        description,
        measured,
        expected,
        pass,
        elapsed: start.elapsed(),
    }
}

fn main_table(
    cfg: &ClaimConfig,
    a: &ChoiceAmplitudes,
    b: &ChoiceAmplitudes,
) -> Result<EmpiricalModel> {
    generate_table(&main_scenario_with(a, b, &cfg.xi_basis)?)
}

/// The four conditional zeros of Wigner's entangled measurement, keyed by
/// the outcome labels heralding `|+⟩` on each lab.
fn conditional_zeros(model: &EmpiricalModel, plus_a: &str, plus_b: &str) -> Result<[f64; 4]> {
    let sig = model.signature();
    let ctx = |l: [&str; 3]| sig.context_from_labels(&l);
    let w = |l, cond: [(&str, &str); 2], xi: &str| -> Result<f64> {
        Ok(conditional(model, &ctx(l)?, &cond)?
            .get(&[xi])
            .unwrap_or(f64::NAN))
    };
    Ok([
        w(["0", "0", "1"], [("Charlie", "0"), ("Debbie", "0")], "xi1")?,
        w(
            ["0", "1", "1"],
            [("Charlie", "0"), ("Debbie", plus_b)],
            "xi2",
        )?,
        w(
            ["1", "0", "1"],
            [("Charlie", plus_a), ("Debbie", "0")],
            "xi3",
        )?,
        w(
            ["1", "1", "1"],
            [("Charlie", plus_a), ("Debbie", plus_b)],
            "xi4",
        )?,
    ])
}

/// Random non-degenerate amplitudes with a uniformly random relative phase.
pub fn random_choices(count: usize, seed: u64) -> Vec<(ChoiceAmplitudes, ChoiceAmplitudes)> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut draw = || {
        let p0: f64 = rng.gen_range(0.01..0.99);
        let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        ChoiceAmplitudes::new(
            C64::new(p0.sqrt(), 0.0),
            C64::from_polar((1.0 - p0).sqrt(), phase),
        )
        .expect("normalized by construction")
    };
    (0..count).map(|_| (draw(), draw())).collect()
}

pub fn verify_claims(cfg: &ClaimConfig) -> Vec<Claim> {
    let h = ChoiceAmplitudes::balanced();
    let mut claims = Vec::new();

    claims.push(timed(
        "pbr-zeros",
        "each product of |0>,|+> misses exactly its paired entangled outcome; |00> gives (0, 1/4, 1/4, 1/2)",
        || {
            let basis = cfg.xi_basis.on(&["P", "Q"])?;
            let preps: [fn(&str) -> StateVector; 2] = [ket0, ket_plus];
            let mut worst: f64 = 0.0;
            for (i, l) in preps.iter().enumerate() {
                for (j, r) in preps.iter().enumerate() {
                    let d = pbr_table_with(&basis, &l("P"), &r("Q"))?;
                    worst = worst.max(d.probs()[2 * i + j]);
                }
            }
            let d00 = pbr_table_with(&basis, &ket0("P"), &ket0("Q"))?;
            let dev = d00
                .probs()
                .iter()
                .zip([0.0, 0.25, 0.25, 0.5])
                .map(|(p, e)| (p - e).abs())
                .fold(0.0, f64::max);
            Ok((
                worst <= TOL && dev <= TOL,
                format!("max paired prob {}, |00> deviation {}", sig6(worst), sig6(dev)),
                "both <= 1e-12".into(),
            ))
        },
    ));

    let main = main_table(cfg, &h, &h);
    let zero_ids: [(&str, &str); 4] = [
        ("zero-00-xi1", "P(c=0,d=0,w=xi1 | x=0,y=0,z=1) = 0"),
        ("zero-0plus-xi2", "P(w=xi2 | x=0,y=1,z=1, c=0,d=+) = 0"),
        ("zero-plus0-xi3", "P(w=xi3 | x=1,y=0,z=1, c=+,d=0) = 0"),
        ("zero-plusplus-xi4", "P(w=xi4 | x=1,y=1,z=1, c=+,d=+) = 0"),
    ];
    let zeros = main
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|m| conditional_zeros(m, "+", "+"));
    for (k, (id, description)) in zero_ids.into_iter().enumerate() {
        claims.push(timed(id, description, || {
            let v = zeros.clone()?[k];
            Ok((v <= TOL, sig6(v), "<= 1e-12".into()))
        }));
    }

    claims.push(timed(
        "reveal-positivity",
        "P(c=+,d=+,w=(00) | x=1,y=1,z=0) = 1/16",
        || {
            let m = main.clone()?;
            let v = m
                .table_for(&["1", "1", "0"])?
                .get(&["+", "+", "(00)"])
                .unwrap_or(f64::NAN);
            Ok(((v - 1.0 / 16.0).abs() <= TOL, sig6(v), "0.0625".into()))
        },
    ));

    claims.push(timed(
        "reveal-consistency",
        "P(c,d,w | x=0,y=0,z=0) vanishes unless w reveals (c,d)",
        || {
            let m = main.clone()?;
            let worst = m
                .table_for(&["0", "0", "0"])?
                .iter()
                .filter(|(l, _)| l[2] != format!("({}{})", l[0], l[1]))
                .map(|(_, p)| p)
                .fold(0.0, f64::max);
            Ok((worst <= TOL, sig6(worst), "<= 1e-12".into()))
        },
    ));

    claims.push(timed(
        "logical-contextuality",
        "support of the main table is logically contextual with witness (x=1,y=1,z=0), (+,+,(00))",
        || {
            let m = main.clone()?;
            let r = logical_contextuality(&support(&m, cfg.epsilon)?)?;
            let w = r
                .witness
                .as_ref()
                .map(|w| format!("({}), ({})", w.context.join(","), w.tuple.join(",")))
                .unwrap_or_else(|| "none".into());
            let expected = "(1,1,0), (+,+,(00))";
            Ok((
                r.verdict == Verdict::LogicallyContextual && w == expected,
                format!("{} {w}", r.verdict),
                format!("logically-contextual {expected}"),
            ))
        },
    ));

    claims.push(timed(
        "lhv-infeasible",
        "main table admits no global distribution; certificate margin > 1e-6",
        || {
            let m = main.clone()?;
            let r = lhv_feasibility(&m, cfg.tol)?;
            let margin = r.certificate.as_ref().map_or(f64::NAN, |c| c.margin);
            Ok((
                r.verdict == Verdict::LhvInfeasible && margin > 1e-6,
                format!("{} margin {}", r.verdict, sig6(margin)),
                "lhv-infeasible margin > 1e-6".into(),
            ))
        },
    ));

    claims.push(timed(
        "lhv-control",
        "the single context (x=0,y=0,z=0) on its own is local",
        || {
            let m = main.clone()?;
            let single =
                m.restrict_to_context(&m.signature().context_from_labels(&["0", "0", "0"])?)?;
            let r = lhv_feasibility(&single, cfg.tol)?;
            Ok((
                r.verdict == Verdict::Local,
                r.verdict.to_string(),
                "local".into(),
            ))
        },
    ));

    let minimal = generate_table(&minimal_scenario());
    claims.push(timed(
        "hardy-zeros",
        "minimal scenario: P(1,0|Z,Z) = P(0,-|Z,X) = P(-,1|X,Z) = 0",
        || {
            let m = minimal.clone()?;
            let worst = [
                m.table_for(&["0", "0"])?.get(&["1", "0"]),
                m.table_for(&["0", "1"])?.get(&["0", "-"]),
                m.table_for(&["1", "0"])?.get(&["-", "1"]),
            ]
            .iter()
            .map(|p| p.unwrap_or(f64::NAN))
            .fold(0.0, f64::max);
            Ok((worst <= TOL, sig6(worst), "<= 1e-12".into()))
        },
    ));

    claims.push(timed(
        "hardy-positive",
        "minimal scenario: P(-,-|X,X) = 1/12",
        || {
            let m = minimal.clone()?;
            let v = m
                .table_for(&["1", "1"])?
                .get(&["-", "-"])
                .unwrap_or(f64::NAN);
            Ok(((v - 1.0 / 12.0).abs() <= TOL, sig6(v), sig6(1.0 / 12.0)))
        },
    ));

    claims.push(timed(
        "minimal-chsh",
        "minimal scenario CHSH value is 7/3",
        || {
            let m = minimal.clone()?;
            let v = chsh(&m, "Wigner", "Bob", &SignMap::standard())?;
            Ok(((v - 7.0 / 3.0).abs() <= TOL, sig6(v), sig6(7.0 / 3.0)))
        },
    ));

    claims.push(timed(
        "minimal-nonclassical",
        "minimal scenario is lhv-infeasible and logically contextual with witness (1,1), (-,-)",
        || {
            let m = minimal.clone()?;
            let lhv = lhv_feasibility(&m, cfg.tol)?;
            let logical = logical_contextuality(&support(&m, cfg.epsilon)?)?;
            let w = logical
                .witness
                .as_ref()
                .map(|w| format!("({}), ({})", w.context.join(","), w.tuple.join(",")))
                .unwrap_or_else(|| "none".into());
            Ok((
                lhv.verdict == Verdict::LhvInfeasible
                    && logical.verdict == Verdict::LogicallyContextual
                    && w == "(1,1), (-,-)",
                format!("{}; {} {w}", lhv.verdict, logical.verdict),
                "lhv-infeasible; logically-contextual (1,1), (-,-)".into(),
            ))
        },
    ));

    claims.push(timed(
        "generalized-amplitudes",
        "random amplitudes: decoding outcome heralds |+> (fidelity 1 +- 1e-10) and the four zeros hold (<= 1e-12)",
        || {
            let mut worst_fid: f64 = 0.0;
            let mut worst_zero: f64 = 0.0;
            let pairs = random_choices(cfg.generalization_pairs, cfg.generalization_seed);
            for (a, b) in &pairs {
                for (choice, token, lab) in [(a, "T_A", "L_A"), (b, "T_B", "L_B")] {
                    let basis = gamma_basis(choice, token)?;
                    let (post, _) = post_select(&preparation(choice, token, lab)?, &basis, gamma_outcome(&basis))?;
                    worst_fid = worst_fid.max((post.fidelity(&ket_plus(lab))? - 1.0).abs());
                }
                let ga = gamma_basis(a, "T_A")?;
                let gb = gamma_basis(b, "T_B")?;
                let m = main_table(cfg, a, b)?;
                let z = conditional_zeros(&m, gamma_outcome(&ga), gamma_outcome(&gb))?;
                worst_zero = z.iter().fold(worst_zero, |w, &v| w.max(v));
            }
            Ok((
                worst_fid <= 1e-10 && worst_zero <= TOL,
                format!(
                    "{} pairs: fidelity deviation {}, max zero {}",
                    pairs.len(),
                    sig6(worst_fid),
                    sig6(worst_zero)
                ),
                "<= 1e-10 and <= 1e-12".into(),
            ))
        },
    ));

    claims.push(timed(
        "tomography",
        "estimated |alpha|^2 within 5e-3 for every probability and seed",
        || {
            let mut worst: f64 = 0.0;
            for &p0 in &cfg.tomography_p0 {
                let choice = ChoiceAmplitudes::from_probability(p0)?;
                for &seed in &cfg.tomography_seeds {
                    let e = tomography(&choice, cfg.tomography_samples, seed)?;
                    worst = worst.max((e.p0_hat() - p0).abs());
                }
            }
            Ok((
                worst <= cfg.tomography_tolerance,
                format!(
                    "max deviation {} over {} runs of n={}",
                    sig6(worst),
                    cfg.tomography_p0.len() * cfg.tomography_seeds.len(),
                    cfg.tomography_samples
                ),
                format!("<= {}", sig6(cfg.tomography_tolerance)),
            ))
        },
    ));

    claims.push(timed(
        "table-properties",
        "generated tables are normalized, no-signalling (<= 1e-9) and round-trip through JSON exactly",
        || {
            let mut models = vec![main.clone()?, minimal.clone()?];
            for (a, b) in random_choices(5, cfg.generalization_seed ^ 1) {
                models.push(main_table(cfg, &a, &b)?);
            }
            let mut worst_ns: f64 = 0.0;
            let mut worst_norm: f64 = 0.0;
            let mut round_trip = true;
            for m in &models {
                worst_ns = worst_ns.max(no_signalling_report(m, 1e-9).max_discrepancy);
                for t in m.tables() {
                    worst_norm = worst_norm.max((t.total() - 1.0).abs());
                }
                round_trip &= from_json(to_json(m).as_bytes()).as_ref() == Ok(m);
            }
            Ok((
                worst_ns <= 1e-9 && worst_norm <= TOL && round_trip,
                format!(
                    "signalling {}, normalization {}, round-trip {}",
                    sig6(worst_ns),
                    sig6(worst_norm),
                    if round_trip { "exact" } else { "broken" }
                ),
                "<= 1e-9, <= 1e-12, exact".into(),
            ))
        },
    ));

    claims
}

pub fn claims_to_json(claims: &[Claim]) -> Value {
    json!({
        "version": crate::empirical::JSON_VERSION,
        "kind": "claim-checklist",
        "pass": claims.iter().all(|c| c.pass),
        "claims": claims.iter().map(Claim::to_json_value).collect::<Vec<_>>(),
    })
}
