//! Runs one job against the library and packages the outcome.

use exalg::error::Error;
use exalg::excursion::{
    check_representation, excursion_value, hecke_value, span_fit, FitOutcome, SpanFitConfig,
};
use exalg::semisimplify::{frobenius_intertwiners, same_component, semisimplification, weight_partition};
use exalg::twisted::{
    equivariance_intertwiner, fixed_dominant_weights, levi_finiteness_check, normalize_automorphism,
    torus_twisted_basis, valuation_certificate, SampleConfig,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::job::{Input, JobSpec};

/// Result of a successful run. `negative` marks mathematical negatives (exit code 2).
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub verdict: String,
    pub negative: bool,
    pub result: Value,
    pub certificates: Vec<Value>,
}

fn to_value<T: Serialize>(x: &T) -> Result<Value, Error> {
    serde_json::to_value(x).map_err(|e| Error::Internal(format!("serialization: {e}")))
}

fn positive(verdict: impl Into<String>, result: Value) -> Outcome {
    Outcome { verdict: verdict.into(), negative: false, result, certificates: Vec::new() }
}

pub fn dispatch(job: &JobSpec) -> Result<Outcome, Error> {
    let p = &job.params;
    match &job.input {
        Input::TwistedBasis(i) => {
            let phi = i.automorphism.build(&i.group)?;
            let basis = torus_twisted_basis(&i.group, &phi)?;
            Ok(positive(
                format!("twisted-invariant characters form a lattice of rank {}", basis.len()),
                json!({ "automorphism": to_value(&phi)?, "basis": to_value(&basis)? }),
            ))
        }
        Input::FixedWeights(i) => {
            let raw = i.automorphism.build(&i.group)?;
            let phi = normalize_automorphism(&i.group, &raw)?;
            let weights = fixed_dominant_weights(&i.group, &phi, p.weight_bound);
            Ok(positive(
                format!("{} fixed dominant weights with entries bounded by {}", weights.len(), p.weight_bound),
                json!({ "normalized": to_value(&phi)?, "weights": to_value(&weights)? }),
            ))
        }
        Input::Intertwiner(i) => {
            let phi = i.automorphism.build(&i.group)?;
            let cfg = SampleConfig { seed: p.seed, ..SampleConfig::default() };
            match equivariance_intertwiner(&phi, &i.rep, &cfg) {
                Ok(it) => Ok(Outcome {
                    verdict: format!("intertwiner found (solution dimension {})", it.report.solution_dimension),
                    negative: false,
                    result: json!({ "rep": to_value(&it.rep)?, "alpha": to_value(&it.alpha)? }),
                    certificates: vec![to_value(&it.report)?],
                }),
                Err(Error::NotPhiFixed) => Ok(Outcome {
                    verdict: Error::NotPhiFixed.to_string(),
                    negative: true,
                    result: json!({ "rep": to_value(&i.rep)?, "alpha": null }),
                    certificates: Vec::new(),
                }),
                Err(e) => Err(e),
            }
        }
        Input::TwistedTrace(i) => {
            let phi = i.automorphism.build(&i.group)?;
            let cfg = SampleConfig { seed: p.seed, ..SampleConfig::default() };
            let it = equivariance_intertwiner(&phi, &i.rep, &cfg)?;
            let value = it.twisted_trace(&i.g)?;
            let mut result = json!({ "value": to_value(&value)? });
            let mut outcome = positive(format!("twisted trace {value}"), Value::Null);
            if let Some(h) = &i.h {
                let h_inv = h.inverse().ok_or_else(|| Error::NonInvertible("h".into()))?;
                let moved = &(h * &i.g) * &phi.apply(&h_inv)?;
                let other = it.twisted_trace(&moved)?;
                let invariant = other == value;
                result["moved_value"] = to_value(&other)?;
                result["invariant"] = Value::Bool(invariant);
                if !invariant {
                    outcome.verdict = format!("twisted trace {value} changed to {other}");
                    outcome.negative = true;
                }
            }
            outcome.result = result;
            outcome.certificates.push(to_value(&it.report)?);
            Ok(outcome)
        }
        Input::FinitenessStep1(i) => {
            let phi = i.automorphism.build(&i.group)?;
            let cert = valuation_certificate(&phi, &i.rep, &i.functional)?;
            let verdict = if cert.verified {
                format!("lambda0 {:?} is invariant, of multiplicity one and strictly minimal", cert.lambda0.0)
            } else {
                format!("certificate failed: {}", cert.failure.clone().unwrap_or_default())
            };
            Ok(Outcome { verdict, negative: !cert.verified, result: to_value(&cert)?, certificates: Vec::new() })
        }
        Input::FinitenessStep2(i) => {
            let r = levi_finiteness_check(&i.restriction, &i.ambient_action, &i.sub_action)?;
            let verdict = if r.finite {
                format!("finite cokernel of order {}", r.torsion.iter().product::<i64>())
            } else {
                format!("infinite cokernel (free rank {})", r.free_rank)
            };
            Ok(Outcome { verdict, negative: !r.finite, result: to_value(&r)?, certificates: Vec::new() })
        }
        Input::ExcursionEval(i) => {
            let point = check_representation(&i.group, i.images.clone())?;
            i.datum.validate(point.dim(), i.symmetry)?;
            let value = excursion_value(&i.datum, &point)?;
            Ok(positive(format!("excursion value {value}"), json!({ "value": to_value(&value)? })))
        }
        Input::HeckeEval(i) => {
            let point = check_representation(&i.group, i.images.clone())?;
            let value = hecke_value(&i.rep, &i.word, &point)?;
            Ok(positive(format!("Hecke value {value}"), json!({ "value": to_value(&value)? })))
        }
        Input::SpanFit(i) => {
            let cfg = SpanFitConfig {
                degree: p.degree_bound,
                budget: p.budget,
                seed: p.seed,
                sampler: i.sampler,
                ..SpanFitConfig::default()
            };
            let out = span_fit(&i.group, i.dim, &i.target, &i.generators, &cfg)?;
            let (verdict, negative, rendered) = match &out {
                FitOutcome::Fit { polynomial, verified_on, .. } => {
                    let names: Vec<String> = (1..=i.generators.len()).map(|k| format!("x{k}")).collect();
                    let text = polynomial.render(&names);
                    (format!("fit {text} (re-verified on {verified_on} fresh samples)"), false, Value::String(text))
                }
                FitOutcome::NotInSpan { degree, .. } => (format!("not in the span at degree {degree}"), true, Value::Null),
                FitOutcome::Inconclusive { reason, .. } => (format!("inconclusive: {reason}"), true, Value::Null),
            };
            let mut result = to_value(&out)?;
            result["rendered"] = rendered;
            Ok(Outcome { verdict, negative, result, certificates: Vec::new() })
        }
        Input::Semisimplify(i) => {
            let point = check_representation(&i.group, i.images.clone())?;
            let r = semisimplification(&point, p.length_bound)?;
            Ok(Outcome {
                verdict: format!("semisimplification with blocks {:?}", r.block_sizes),
                negative: false,
                certificates: vec![to_value(&r.certificate)?],
                result: json!({
                    "images": to_value(&r.point.images())?,
                    "block_sizes": r.block_sizes,
                    "base_change": to_value(&r.base_change)?,
                    "flag": to_value(&r.flag)?,
                    "radical_dimension": r.radical_dimension,
                }),
            })
        }
        Input::SameComponent(i) => {
            let a = check_representation(&i.group, i.left.clone())?;
            let b = check_representation(&i.group, i.right.clone())?;
            let r = same_component(&a, &b, p.length_bound)?;
            let verdict = match &r.witness {
                None => format!("same component up to word length {}", p.length_bound),
                Some(w) => format!("different components: word {} separates", i.group.format_word(w)),
            };
            Ok(Outcome {
                verdict,
                negative: !r.same,
                certificates: vec![to_value(&r.certificate)?],
                result: json!({
                    "same": r.same,
                    "witness": to_value(&r.witness)?,
                    "witness_charpolys": to_value(&r.witness_charpolys)?,
                }),
            })
        }
        Input::FrobeniusIntertwiners(i) => {
            let point = check_representation(&i.group, i.images.clone())?;
            let r = frobenius_intertwiners(&point, &i.endomorphism, p.seed)?;
            Ok(Outcome {
                verdict: r.verdict.clone(),
                negative: !r.nonempty,
                result: to_value(&r)?,
                certificates: Vec::new(),
            })
        }
        Input::WeightPartition(i) => {
            let r = weight_partition(&i.left, &i.right);
            let verdict = if r.equal {
                "equal weight by weight".to_string()
            } else {
                let bad: Vec<String> = r.weights.iter().filter(|g| !g.equal).map(|g| g.w.to_string()).collect();
                format!("unequal at weights {}", bad.join(", "))
            };
            Ok(Outcome { verdict, negative: !r.equal, result: to_value(&r)?, certificates: Vec::new() })
        }
    }
}
