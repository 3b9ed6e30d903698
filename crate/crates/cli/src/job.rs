//! Job files: a command name, a typed input payload and numeric parameters.

use std::fmt;

use exalg::excursion::{ExcursionDatum, FPGroup, FitTarget, GroupWord, PointSampler, Symmetry, TraceGenerator};
use exalg::lattice::{LatticeMap, RootDatum};
use exalg::matrix::QMatrix;
use exalg::rational::Q;
use exalg::semisimplify::EigenvalueRecord;
use exalg::tensor_word::TensorWord;
use exalg::twisted::{GroupAutomorphism, Theta};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const COMMANDS: [&str; 13] = [
    "twisted-basis",
    "fixed-weights",
    "intertwiner",
    "twisted-trace",
    "finiteness-step1",
    "finiteness-step2",
    "excursion-eval",
    "hecke-eval",
    "span-fit",
    "semisimplify",
    "same-component",
    "frobenius-intertwiners",
    "weight-partition",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Params {
    pub seed: u64,
    pub length_bound: usize,
    pub degree_bound: u32,
    pub budget: usize,
    pub weight_bound: i64,
}

impl Default for Params {
    fn default() -> Self {
        Params { seed: 0, length_bound: 6, degree_bound: 6, budget: 500, weight_bound: 3 }
    }
}

/// A schema violation or unknown command; `path` is a JSON pointer into the job document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JobError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for JobError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for JobError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJob {
    command: String,
    #[serde(default)]
    input: Value,
    seed: Option<u64>,
    length_bound: Option<usize>,
    degree_bound: Option<u32>,
    budget: Option<usize>,
    weight_bound: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaName {
    Identity,
    TransposeInverse,
    FactorPermutation,
    Lattice,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomorphismInput {
    pub theta: ThetaName,
    #[serde(default)]
    pub perm: Option<Vec<usize>>,
    #[serde(default)]
    pub torus_action: Option<LatticeMap>,
    #[serde(default)]
    pub h: Option<QMatrix>,
    #[serde(default)]
    pub lattice_action: Option<LatticeMap>,
}

impl AutomorphismInput {
    pub fn build(&self, group: &RootDatum) -> exalg::error::Result<GroupAutomorphism> {
        let missing = |what: &str| exalg::error::Error::InvalidInput(format!("theta needs '{what}'"));
        let theta = match self.theta {
            ThetaName::Identity => Theta::Identity,
            ThetaName::TransposeInverse => Theta::TransposeInverse,
            ThetaName::FactorPermutation => Theta::FactorPermutation(self.perm.clone().ok_or_else(|| missing("perm"))?),
            ThetaName::Lattice => Theta::Lattice(self.torus_action.clone().ok_or_else(|| missing("torus_action"))?),
        };
        GroupAutomorphism::new(group, theta, self.h.clone(), self.lattice_action.clone())
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupAutInput {
    pub group: RootDatum,
    pub automorphism: AutomorphismInput,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepInput {
    pub group: RootDatum,
    pub automorphism: AutomorphismInput,
    pub rep: TensorWord,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistedTraceInput {
    pub group: RootDatum,
    pub automorphism: AutomorphismInput,
    pub rep: TensorWord,
    pub g: QMatrix,
    /// Optional element for the invariance check `g ↦ h·g·φ(h)⁻¹`.
    #[serde(default)]
    pub h: Option<QMatrix>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Step1Input {
    pub group: RootDatum,
    pub automorphism: AutomorphismInput,
    pub rep: TensorWord,
    pub functional: Vec<Q>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Step2Input {
    pub restriction: LatticeMap,
    pub ambient_action: LatticeMap,
    pub sub_action: LatticeMap,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointInput {
    pub group: FPGroup,
    pub images: Vec<QMatrix>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcursionInput {
    pub group: FPGroup,
    pub images: Vec<QMatrix>,
    pub datum: ExcursionDatum,
    #[serde(default = "general")]
    pub symmetry: Symmetry,
}

fn general() -> Symmetry {
    Symmetry::General
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeckeInput {
    pub group: FPGroup,
    pub images: Vec<QMatrix>,
    pub rep: TensorWord,
    pub word: GroupWord,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanFitInput {
    pub group: FPGroup,
    pub dim: usize,
    #[serde(default = "general_sampler")]
    pub sampler: PointSampler,
    pub target: FitTarget,
    pub generators: Vec<TraceGenerator>,
}

fn general_sampler() -> PointSampler {
    PointSampler::General
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SameComponentInput {
    pub group: FPGroup,
    pub left: Vec<QMatrix>,
    pub right: Vec<QMatrix>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrobeniusInput {
    pub group: FPGroup,
    pub images: Vec<QMatrix>,
    /// Image of every generator under the group endomorphism.
    pub endomorphism: Vec<GroupWord>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightPartitionInput {
    pub left: Vec<EigenvalueRecord>,
    pub right: Vec<EigenvalueRecord>,
}

#[derive(Clone, Debug)]
pub enum Input {
    TwistedBasis(GroupAutInput),
    FixedWeights(GroupAutInput),
    Intertwiner(RepInput),
    TwistedTrace(TwistedTraceInput),
    FinitenessStep1(Step1Input),
    FinitenessStep2(Step2Input),
    ExcursionEval(ExcursionInput),
    HeckeEval(HeckeInput),
    SpanFit(SpanFitInput),
    Semisimplify(PointInput),
    SameComponent(SameComponentInput),
    FrobeniusIntertwiners(FrobeniusInput),
    WeightPartition(WeightPartitionInput),
}

#[derive(Clone, Debug)]
pub struct JobSpec {
    pub command: String,
    pub input: Input,
    pub params: Params,
}

fn pointer(prefix: &str, path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = prefix.to_string();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => {}
        }
    }
    out
}

fn typed<T: serde::de::DeserializeOwned>(value: Value) -> Result<T, JobError> {
    serde_path_to_error::deserialize(value).map_err(|e| JobError {
        path: pointer("/input", e.path()),
        message: e.inner().to_string(),
    })
}

/// Parses and validates a job document, filling parameter defaults.
pub fn parse_job(text: &str) -> Result<JobSpec, JobError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawJob = serde_path_to_error::deserialize(de).map_err(|e| JobError {
        path: pointer("", e.path()),
        message: e.inner().to_string(),
    })?;
    let d = Params::default();
    let params = Params {
        seed: raw.seed.unwrap_or(d.seed),
        length_bound: raw.length_bound.unwrap_or(d.length_bound),
        degree_bound: raw.degree_bound.unwrap_or(d.degree_bound),
        budget: raw.budget.unwrap_or(d.budget),
        weight_bound: raw.weight_bound.unwrap_or(d.weight_bound),
    };
    let v = raw.input;
    let input = match raw.command.as_str() {
        "twisted-basis" => Input::TwistedBasis(typed(v)?),
        "fixed-weights" => Input::FixedWeights(typed(v)?),
        "intertwiner" => Input::Intertwiner(typed(v)?),
        "twisted-trace" => Input::TwistedTrace(typed(v)?),
        "finiteness-step1" => Input::FinitenessStep1(typed(v)?),
        "finiteness-step2" => Input::FinitenessStep2(typed(v)?),
        "excursion-eval" => Input::ExcursionEval(typed(v)?),
        "hecke-eval" => Input::HeckeEval(typed(v)?),
        "span-fit" => Input::SpanFit(typed(v)?),
        "semisimplify" => Input::Semisimplify(typed(v)?),
        "same-component" => Input::SameComponent(typed(v)?),
        "frobenius-intertwiners" => Input::FrobeniusIntertwiners(typed(v)?),
        "weight-partition" => Input::WeightPartition(typed(v)?),
        other => {
            return Err(JobError {
                path: "/command".into(),
                message: format!("unknown command '{other}' (expected one of: {})", COMMANDS.join(", ")),
            })
        }
    };
    Ok(JobSpec { command: raw.command, input, params })
}
