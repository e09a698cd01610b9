//! JSON scenario files: named weights and operators plus an ordered task list.

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::algebra::{CRational, FourierPoly, Mat};
use crate::anomaly::CoefficientConvention;
use crate::symbol::{ClassicalSymbol, EigenvalueLaw, HomTerm, Weight, NEG_INF};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Testbed {
    pub dim: u32,
    pub rank: usize,
}

impl Default for Testbed {
    fn default() -> Self {
        Testbed { dim: 1, rank: 1 }
    }
}

/// `[freq, re_num, re_den, im_num, im_den]`.
pub type Coefficient = [i64; 5];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub degree: i64,
    #[serde(default)]
    pub plus: Vec<Coefficient>,
    #[serde(default)]
    pub minus: Vec<Coefficient>,
    /// Matrix entry `[row, col]` for rank > 1; absent means a multiple of the identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry: Option<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolSpec {
    Terms(Vec<TermSpec>),
    Full {
        terms: Vec<TermSpec>,
        /// Degrees below this are unknown; absent means the listed terms are exact.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        valid_down_to: Option<i64>,
    },
}

/// A rational written as an integer or as a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatSpec {
    Int(i64),
    Text(String),
}

impl RatSpec {
    pub fn to_rational(&self) -> Result<BigRational, HarnessError> {
        match self {
            RatSpec::Int(n) => Ok(crate::algebra::rat_int(*n)),
            RatSpec::Text(s) => s
                .trim()
                .parse::<BigRational>()
                .map_err(|_| HarnessError::Task(format!("not a rational: {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<SymbolSpec>,
    pub order: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalue_law: Option<Vec<RatSpec>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Residue,
    MellinResidue,
    WeightedTrace,
    ZetaGerm,
    CorrectionSum,
    WeightedCochain,
    CoboundaryAnomaly,
    CoboundaryCheck,
    FamilyDerivative,
    Interpolation,
    HeatTrace,
    JloValue,
    BJloCheck,
    DuhamelCheck,
    BasicformulaCheck,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Residue => "residue",
            TaskKind::MellinResidue => "mellin_residue",
            TaskKind::WeightedTrace => "weighted_trace",
            TaskKind::ZetaGerm => "zeta_germ",
            TaskKind::CorrectionSum => "correction_sum",
            TaskKind::WeightedCochain => "weighted_cochain",
            TaskKind::CoboundaryAnomaly => "coboundary_anomaly",
            TaskKind::CoboundaryCheck => "coboundary_check",
            TaskKind::FamilyDerivative => "family_derivative",
            TaskKind::Interpolation => "interpolation",
            TaskKind::HeatTrace => "heat_trace",
            TaskKind::JloValue => "jlo_value",
            TaskKind::BJloCheck => "b_jlo_check",
            TaskKind::DuhamelCheck => "duhamel_check",
            TaskKind::BasicformulaCheck => "basicformula_check",
        }
    }

    /// Allowed operator counts.
    fn arity_ok(self, n: usize) -> bool {
        match self {
            TaskKind::DuhamelCheck => n == 1,
            TaskKind::CoboundaryAnomaly | TaskKind::CoboundaryCheck => n >= 2 && n % 2 == 0,
            TaskKind::BJloCheck => n >= 2,
            _ => n >= 1,
        }
    }

    fn needs_weight(self) -> bool {
        !matches!(self, TaskKind::Residue | TaskKind::FamilyDerivative | TaskKind::Interpolation)
    }

    /// Kinds evaluated on the spectral side, which need a diagonal weight.
    fn needs_law(self) -> bool {
        matches!(
            self,
            TaskKind::WeightedTrace
                | TaskKind::ZetaGerm
                | TaskKind::WeightedCochain
                | TaskKind::CoboundaryCheck
                | TaskKind::HeatTrace
                | TaskKind::JloValue
                | TaskKind::BJloCheck
                | TaskKind::DuhamelCheck
                | TaskKind::BasicformulaCheck
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyTaskSpec {
    pub base: String,
    pub direction: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigen_direction: Option<Vec<RatSpec>>,
    pub t_range: [RatSpec; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub kind: TaskKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub args: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<CoefficientConvention>,
    /// Pass/fail needs a tolerance and either `expected` or a built-in deviation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// `[re, im]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra_shells: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyTaskSpec>,
    /// Family parameter for `family_derivative`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<RatSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub testbed: Testbed,
    #[serde(default)]
    pub weights: BTreeMap<String, WeightSpec>,
    #[serde(default)]
    pub operators: BTreeMap<String, SymbolSpec>,
    #[serde(default)]
    pub tasks: Vec<TaskSpec>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Scenario::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Builds every weight and operator and checks each task's names, arity and
    /// parameters.
    pub fn resolve(&self) -> Result<Resolved, HarnessError> {
        if self.testbed.dim != 1 {
            return Err(HarnessError::Task(format!("only dim = 1 is supported, got {}", self.testbed.dim)));
        }
        let rank = self.testbed.rank;
        if rank == 0 {
            return Err(HarnessError::Task("rank must be positive".into()));
        }
        let mut operators = BTreeMap::new();
        for (name, spec) in &self.operators {
            operators.insert(name.clone(), build_symbol(spec, rank).map_err(|e| named(name, e))?);
        }
        let mut weights = BTreeMap::new();
        for (name, spec) in &self.weights {
            weights.insert(name.clone(), build_weight(spec, rank).map_err(|e| named(name, e))?);
        }
        for (i, task) in self.tasks.iter().enumerate() {
            check_task(i, task, &operators, &weights)?;
        }
        Ok(Resolved {
            operators,
            weights,
            tasks: self.tasks.clone(),
        })
    }
}

fn named(name: &str, e: HarnessError) -> HarnessError {
    HarnessError::Task(format!("{name}: {e}"))
}

/// A scenario with every name resolved.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub operators: BTreeMap<String, ClassicalSymbol>,
    pub weights: BTreeMap<String, Weight>,
    pub tasks: Vec<TaskSpec>,
}

fn coefficient(c: &Coefficient) -> Result<(i64, CRational), HarnessError> {
    let [freq, rn, rd, inum, id] = *c;
    if rd == 0 || id == 0 {
        return Err(HarnessError::Task("zero denominator in coefficient".into()));
    }
    Ok((freq, CRational::from_parts(rn, rd, inum, id)))
}

fn fourier(list: &[Coefficient]) -> Result<FourierPoly, HarnessError> {
    let mut f = FourierPoly::zero();
    for c in list {
        let (m, v) = coefficient(c)?;
        f.add_term(m, &v);
    }
    Ok(f)
}

fn branch(rank: usize, entry: Option<[usize; 2]>, f: FourierPoly) -> Result<Mat<FourierPoly>, HarnessError> {
    match entry {
        None => Ok(Mat::scalar(rank, f)),
        Some([r, c]) if r < rank && c < rank => {
            let mut m = Mat::zeros(rank);
            m.set(r, c, f);
            Ok(m)
        }
        Some([r, c]) => Err(HarnessError::Task(format!("entry [{r}, {c}] outside rank {rank}"))),
    }
}

pub fn build_symbol(spec: &SymbolSpec, rank: usize) -> Result<ClassicalSymbol, HarnessError> {
    let (terms, floor) = match spec {
        SymbolSpec::Terms(t) => (t, None),
        SymbolSpec::Full { terms, valid_down_to } => (terms, *valid_down_to),
    };
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        out.push(HomTerm::new(
            t.degree,
            branch(rank, t.entry, fourier(&t.plus)?)?,
            branch(rank, t.entry, fourier(&t.minus)?)?,
        ));
    }
    Ok(ClassicalSymbol::from_terms(rank, out, floor.unwrap_or(NEG_INF))?)
}

fn law(coeffs: &[RatSpec]) -> Result<Vec<BigRational>, HarnessError> {
    coeffs.iter().map(RatSpec::to_rational).collect()
}

pub fn build_weight(spec: &WeightSpec, rank: usize) -> Result<Weight, HarnessError> {
    let law = match &spec.eigenvalue_law {
        Some(c) => Some(EigenvalueLaw::new(law(c)?)?),
        None => None,
    };
    let symbol = match (&spec.symbol, &law) {
        (Some(s), _) => build_symbol(s, rank)?,
        (None, Some(l)) => l.symbol(rank),
        (None, None) => return Err(HarnessError::Task("weight needs a symbol or an eigenvalue law".into())),
    };
    let w = Weight::new(symbol, law)?;
    if w.order() != spec.order {
        return Err(HarnessError::Task(format!("declared order {} but the symbol has order {}", spec.order, w.order())));
    }
    Ok(w)
}

pub fn build_direction_law(spec: &[RatSpec]) -> Result<EigenvalueLaw, HarnessError> {
    Ok(EigenvalueLaw::direction(law(spec)?))
}

fn positive(name: &str, v: Option<f64>) -> Result<(), HarnessError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(HarnessError::Task(format!("{name} must be positive, got {x}"))),
        _ => Ok(()),
    }
}

fn check_task(
    i: usize,
    task: &TaskSpec,
    operators: &BTreeMap<String, ClassicalSymbol>,
    weights: &BTreeMap<String, Weight>,
) -> Result<(), HarnessError> {
    let ctx = |msg: String| HarnessError::Task(format!("task {i} ({}): {msg}", task.kind.name()));
    for a in &task.args {
        if !operators.contains_key(a) {
            return Err(HarnessError::Resolution(format!("operator {a:?} in task {i}")));
        }
    }
    if !task.kind.arity_ok(task.args.len()) {
        return Err(ctx(format!("wrong number of operators: {}", task.args.len())));
    }
    match &task.weight {
        Some(w) => {
            let weight = weights
                .get(w)
                .ok_or_else(|| HarnessError::Resolution(format!("weight {w:?} in task {i}")))?;
            if task.kind.needs_law() && weight.law().is_none() {
                return Err(ctx(format!("weight {w:?} has no eigenvalue law")));
            }
        }
        None if task.kind.needs_weight() => return Err(ctx("missing weight".into())),
        None => {}
    }
    if let Some(f) = &task.family {
        if !weights.contains_key(&f.base) {
            return Err(HarnessError::Resolution(format!("weight {:?} in task {i}", f.base)));
        }
        if !operators.contains_key(&f.direction) {
            return Err(HarnessError::Resolution(format!("operator {:?} in task {i}", f.direction)));
        }
    } else if matches!(task.kind, TaskKind::FamilyDerivative | TaskKind::Interpolation) {
        return Err(ctx("missing family".into()));
    }
    if task.kind == TaskKind::FamilyDerivative && task.at.is_none() {
        return Err(ctx("missing family parameter `at`".into()));
    }
    positive("tolerance", task.tolerance).map_err(|e| ctx(e.to_string()))?;
    positive("t", task.t).map_err(|e| ctx(e.to_string()))?;
    positive("u", task.u).map_err(|e| ctx(e.to_string()))?;
    if let Some(g) = &task.t_grid {
        for t in g {
            positive("t_grid entry", Some(*t)).map_err(|e| ctx(e.to_string()))?;
        }
    }
    if matches!(task.kind, TaskKind::HeatTrace | TaskKind::JloValue | TaskKind::BJloCheck) && task.t.is_none() {
        return Err(ctx("missing t".into()));
    }
    if task.kind == TaskKind::DuhamelCheck && task.u.is_none() {
        return Err(ctx("missing u".into()));
    }
    if task.kind == TaskKind::BasicformulaCheck && task.t_grid.is_none() {
        return Err(ctx("missing t_grid".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "testbed": {"dim": 1, "rank": 1},
        "weights": {"Q": {"order": 2, "eigenvalue_law": [1, 0, 1]}},
        "operators": {
            "A": [{"degree": 0, "plus": [[1, 1, 1, 0, 1]], "minus": [[1, 1, 1, 0, 1]]}],
            "B": {"terms": [{"degree": 1, "plus": [[-1, 1, 1, 0, 1]], "minus": [[-1, 1, 1, 0, 1]]}]}
        },
        "tasks": [
            {"kind": "coboundary_anomaly", "args": ["A", "B"], "weight": "Q", "convention": "EXACT",
             "tolerance": 1e-9, "expected": [-1, 0]}
        ]
    }"#;

    #[test]
    fn parses_and_resolves() {
        let s = Scenario::parse(SAMPLE).unwrap();
        let r = s.resolve().unwrap();
        assert_eq!(r.operators["A"], ClassicalSymbol::multiplier(FourierPoly::monomial(1, CRational::from_int(1))));
        assert_eq!(r.weights["Q"], Weight::laplacian());
    }

    #[test]
    fn round_trip() {
        let s = Scenario::parse(SAMPLE).unwrap();
        assert_eq!(Scenario::parse(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn empty_scenario() {
        let s = Scenario::parse("{}").unwrap();
        assert!(s.tasks.is_empty());
        s.resolve().unwrap();
    }

    #[test]
    fn unknown_kind_is_a_parse_error() {
        let text = SAMPLE.replace("coboundary_anomaly", "coboundary_anomalie");
        assert!(matches!(Scenario::parse(&text), Err(HarnessError::Parse { .. })));
    }

    #[test]
    fn unknown_name_and_bad_arity() {
        let s = Scenario::parse(&SAMPLE.replace(r#"["A", "B"]"#, r#"["A", "C"]"#)).unwrap();
        assert!(matches!(s.resolve(), Err(HarnessError::Resolution(_))));
        let s = Scenario::parse(&SAMPLE.replace(r#"["A", "B"]"#, r#"["A", "B", "A"]"#)).unwrap();
        assert!(matches!(s.resolve(), Err(HarnessError::Task(_))));
        let s = Scenario::parse(&SAMPLE.replace("1e-9", "-1")).unwrap();
        assert!(matches!(s.resolve(), Err(HarnessError::Task(_))));
    }

    #[test]
    fn rational_law_entries() {
        let spec = WeightSpec {
            symbol: None,
            order: 2,
            eigenvalue_law: Some(vec![RatSpec::Text("3/2".into()), RatSpec::Int(0), RatSpec::Int(1)]),
        };
        let w = build_weight(&spec, 1).unwrap();
        assert_eq!(w.law().unwrap().coeffs()[0], crate::algebra::rat(3, 2));
        let bad = WeightSpec { order: 3, ..spec };
        assert!(build_weight(&bad, 1).is_err());
    }
}
