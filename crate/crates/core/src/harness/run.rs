//! Task execution and reports.

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::scenario::{build_direction_law, Resolved, Scenario, TaskKind, TaskSpec};
use super::HarnessError;
use crate::algebra::CRational;
use crate::anomaly::{
    coboundary_anomaly, correction_sum, family_derivative, hochschild_b, interpolation_difference, mellin_residue,
    weighted_cochain, CoefficientConvention, FamilySpec, Operand, OracleTrace, TermRow, TraceProvider,
};
use crate::oracle::checks::{b_jlo_check, basicformula_check, duhamel_check};
use crate::oracle::{heat_trace, jlo_value, zeta_trace_germ, SpectralOperator};
use crate::symbol::{compose, ClassicalSymbol, Weight};

const DEFAULT_RADIUS: i64 = 32;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaskReport {
    pub index: usize,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub args: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<CoefficientConvention>,
    /// `[re, im]`.
    pub value: Option<[f64; 2]>,
    pub exact_part: Option<String>,
    pub err: Option<f64>,
    pub deviation: Option<f64>,
    pub tolerance: Option<f64>,
    /// `deviation ≤ tolerance`; absent when either is missing, false on error.
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<TermRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
    pub millis: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub tasks: usize,
    pub passed: usize,
    pub failed: usize,
    pub unchecked: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub version: String,
    pub precision_bits: u32,
    pub summary: Summary,
    pub tasks: Vec<TaskReport>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report with timing fields zeroed, for determinism checks.
    pub fn without_timing(&self) -> Report {
        let mut r = self.clone();
        for t in &mut r.tasks {
            t.millis = 0;
        }
        r
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<(), HarnessError> {
        #[derive(Serialize)]
        struct Row<'a> {
            index: usize,
            kind: &'a str,
            label: &'a str,
            value_re: Option<f64>,
            value_im: Option<f64>,
            exact_part: &'a str,
            err: Option<f64>,
            deviation: Option<f64>,
            tolerance: Option<f64>,
            pass: Option<bool>,
            error: &'a str,
            millis: u128,
        }
        let mut w = csv::Writer::from_writer(out);
        for t in &self.tasks {
            w.serialize(Row {
                index: t.index,
                kind: &t.kind,
                label: t.label.as_deref().unwrap_or(""),
                value_re: t.value.map(|v| v[0]),
                value_im: t.value.map(|v| v[1]),
                exact_part: t.exact_part.as_deref().unwrap_or(""),
                err: t.err,
                deviation: t.deviation,
                tolerance: t.tolerance,
                pass: t.pass,
                error: t.error.as_deref().unwrap_or(""),
                millis: t.millis,
            })
            .map_err(|e| HarnessError::Task(format!("csv: {e}")))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }
}

/// Special-function working precision from `RES_LAB_PRECISION_BITS` (default 256).
pub fn precision_bits() -> Result<u32, HarnessError> {
    match std::env::var("RES_LAB_PRECISION_BITS") {
        Err(_) => Ok(256),
        Ok(s) => match s.trim().parse::<u32>() {
            Ok(b) if b >= 53 => Ok(b),
            _ => Err(HarnessError::Task(format!("RES_LAB_PRECISION_BITS must be an integer ≥ 53, got {s:?}"))),
        },
    }
}

#[derive(Default)]
struct Outcome {
    value: Option<Complex64>,
    exact: Option<CRational>,
    err: Option<f64>,
    deviation: Option<f64>,
    terms: Option<Vec<TermRow>>,
    details: Option<serde_json::Value>,
}

impl Outcome {
    fn exact(v: CRational, terms: Option<Vec<TermRow>>) -> Self {
        Outcome {
            value: Some(v.to_c64()),
            exact: Some(v),
            err: Some(0.0),
            terms,
            ..Default::default()
        }
    }

    fn approx(v: Complex64, err: f64) -> Self {
        Outcome {
            value: Some(v),
            err: Some(err),
            ..Default::default()
        }
    }
}

fn c2(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// `res(A₀⋯A_n)` from the exact symbol product, each partial product certified
/// just deep enough for the final degree −1.
fn product_residue(syms: &[ClassicalSymbol]) -> Result<CRational, HarnessError> {
    let orders: Vec<i64> = syms.iter().map(|s| s.order()).collect();
    let mut acc = syms[0].clone();
    for (i, s) in syms.iter().enumerate().skip(1) {
        let rest: i64 = orders[i + 1..].iter().sum();
        acc = compose(&acc, s, -2 - rest)?;
    }
    Ok(acc.residue()?)
}

fn family(task: &TaskSpec, r: &Resolved) -> Result<FamilySpec, HarnessError> {
    let f = task.family.as_ref().ok_or_else(|| HarnessError::Task("missing family".into()))?;
    let dir_law = match &f.eigen_direction {
        Some(l) => Some(build_direction_law(l)?),
        None => None,
    };
    Ok(FamilySpec::new(
        r.weights[&f.base].clone(),
        r.operators[&f.direction].clone(),
        dir_law,
        (f.t_range[0].to_rational()?, f.t_range[1].to_rational()?),
    )?)
}

fn execute(task: &TaskSpec, r: &Resolved, with_terms: bool) -> Result<Outcome, HarnessError> {
    let syms: Vec<ClassicalSymbol> = task.args.iter().map(|a| r.operators[a].clone()).collect();
    let weight: Option<&Weight> = task.weight.as_ref().map(|w| &r.weights[w]);
    let conv = task.convention.unwrap_or_default();
    let terms = |t: Vec<TermRow>| if with_terms { Some(t) } else { None };
    let radius = task.radius.unwrap_or(DEFAULT_RADIUS);
    let need_weight = || weight.ok_or_else(|| HarnessError::Task("missing weight".into()));
    let law = || {
        need_weight()?
            .law()
            .ok_or_else(|| HarnessError::Task("weight has no eigenvalue law".into()))
    };
    let mats = || -> Vec<SpectralOperator> { syms.iter().map(SpectralOperator::quantize).collect() };
    let product = || Operand::product(&syms.iter().cloned().map(Operand::new).collect::<Vec<_>>());
    Ok(match task.kind {
        TaskKind::Residue => Outcome::exact(product_residue(&syms)?, None),
        TaskKind::MellinResidue => Outcome::exact(mellin_residue(need_weight()?, &syms)?, None),
        TaskKind::WeightedTrace => {
            let (v, err) = OracleTrace.weighted_trace(need_weight()?, &product()?)?;
            Outcome::approx(v, err)
        }
        TaskKind::ZetaGerm => {
            let g = zeta_trace_germ(law()?, &product()?.matrix)?;
            let mut o = Outcome::approx(g.germ.const_, g.err);
            o.details = Some(json!({
                "pole": g.exact.pole.to_exact_string(),
                "rational": g.exact.rational.to_exact_string(),
                "gamma_coefficient": g.exact.gamma.to_exact_string(),
                "log_lead_coefficient": g.exact.log_lead.to_exact_string(),
                "float_part": c2(g.exact.float_part),
                "head_radius": g.head_radius,
                "depth": g.depth,
            }));
            o
        }
        TaskKind::CorrectionSum => {
            let ev = correction_sum(need_weight()?, &syms, conv, task.extra_shells.unwrap_or(0))?;
            Outcome::exact(ev.value, terms(ev.terms))
        }
        TaskKind::WeightedCochain => {
            let ops: Vec<Operand> = syms.iter().cloned().map(Operand::new).collect();
            let v = weighted_cochain(need_weight()?, &ops, &OracleTrace, conv)?;
            Outcome::approx(v.value, v.err)
        }
        TaskKind::CoboundaryAnomaly => {
            let ev = coboundary_anomaly(need_weight()?, &syms, conv, task.extra_shells.unwrap_or(0))?;
            Outcome::exact(ev.value, terms(ev.terms))
        }
        TaskKind::CoboundaryCheck => {
            let w = need_weight()?;
            let ev = coboundary_anomaly(w, &syms, conv, 0)?;
            let ops: Vec<Operand> = syms.iter().cloned().map(Operand::new).collect();
            let chi = |a: &[Operand]| weighted_cochain(w, a, &OracleTrace, conv);
            let b = hochschild_b(&chi, &ops, &|x: &Operand, y: &Operand| x.mul(y))?;
            let mut o = Outcome::exact(ev.value.clone(), terms(ev.terms));
            o.deviation = Some((ev.value.to_c64() - b.value).norm());
            o.err = Some(b.err);
            o.details = Some(json!({ "hochschild": c2(b.value), "hochschild_err": b.err }));
            o
        }
        TaskKind::FamilyDerivative => {
            let fam = family(task, r)?;
            let at = task.at.as_ref().ok_or_else(|| HarnessError::Task("missing at".into()))?.to_rational()?;
            let ev = family_derivative(&fam, &at, &syms, conv)?;
            Outcome::exact(ev.value, terms(ev.terms))
        }
        TaskKind::Interpolation => {
            let fam = family(task, r)?;
            let v = interpolation_difference(&fam, &syms, task.nodes.unwrap_or(8), conv)?;
            Outcome::approx(v.value, v.err)
        }
        TaskKind::HeatTrace => {
            let t = task.t.ok_or_else(|| HarnessError::Task("missing t".into()))?;
            let h = heat_trace(law()?, &product()?.matrix, t)?;
            Outcome::approx(h.value, h.err)
        }
        TaskKind::JloValue => {
            let t = task.t.ok_or_else(|| HarnessError::Task("missing t".into()))?;
            let h = jlo_value(law()?, &mats(), t, radius)?;
            Outcome::approx(h.value, h.err)
        }
        TaskKind::BJloCheck => {
            let t = task.t.ok_or_else(|| HarnessError::Task("missing t".into()))?;
            let rep = b_jlo_check(law()?, &mats(), t, radius)?;
            let mut o = Outcome::approx(rep.lhs, rep.err);
            o.deviation = Some(rep.deviation);
            o.details = Some(json!({ "rhs": c2(rep.rhs) }));
            o
        }
        TaskKind::DuhamelCheck => {
            let u = task.u.ok_or_else(|| HarnessError::Task("missing u".into()))?;
            let d = duhamel_check(law()?, &mats()[0], u, radius, task.nodes.unwrap_or(64))?;
            let mut o = Outcome::approx(Complex64::new(d, 0.0), 0.0);
            o.deviation = Some(d);
            o
        }
        TaskKind::BasicformulaCheck => {
            let grid = task.t_grid.clone().ok_or_else(|| HarnessError::Task("missing t_grid".into()))?;
            let rep = basicformula_check(law()?, &mats(), &grid, task.depth.unwrap_or(2), conv, radius)?;
            let rows: Vec<serde_json::Value> = rep
                .rows
                .iter()
                .map(|row| {
                    json!({
                        "t": row.t,
                        "jlo": c2(row.jlo),
                        "expansion": c2(row.expansion),
                        "residual": row.residual,
                        "heat_trace_identity": row.heat_trace_identity,
                    })
                })
                .collect();
            let mut o = Outcome {
                value: rep.slope.map(|s| Complex64::new(s, 0.0)),
                ..Default::default()
            };
            o.details = Some(json!({ "slope": rep.slope, "rows": rows }));
            o
        }
    })
}

fn uses_convention(kind: TaskKind) -> bool {
    matches!(
        kind,
        TaskKind::CorrectionSum
            | TaskKind::WeightedCochain
            | TaskKind::CoboundaryAnomaly
            | TaskKind::CoboundaryCheck
            | TaskKind::FamilyDerivative
            | TaskKind::Interpolation
            | TaskKind::BasicformulaCheck
    )
}

fn run_task(index: usize, task: &TaskSpec, r: &Resolved, with_terms: bool) -> TaskReport {
    let start = Instant::now();
    let result = execute(task, r, with_terms);
    let mut rep = TaskReport {
        index,
        kind: task.kind.name().to_string(),
        label: task.label.clone(),
        args: task.args.clone(),
        weight: task.weight.clone(),
        convention: uses_convention(task.kind).then(|| task.convention.unwrap_or_default()),
        value: None,
        exact_part: None,
        err: None,
        deviation: None,
        tolerance: task.tolerance,
        pass: None,
        error: None,
        terms: None,
        details: None,
        millis: 0,
    };
    match result {
        Ok(o) => {
            let deviation = match (task.expected, o.value) {
                (Some([re, im]), Some(v)) => Some((v - Complex64::new(re, im)).norm()),
                (Some(_), None) => Some(f64::INFINITY),
                (None, _) => o.deviation,
            };
            rep.value = o.value.map(c2);
            rep.exact_part = o.exact.map(|e| e.to_exact_string());
            rep.err = o.err;
            rep.deviation = deviation;
            rep.pass = match (deviation, task.tolerance) {
                (Some(d), Some(tol)) => Some(d <= tol),
                _ => None,
            };
            rep.terms = o.terms;
            rep.details = o.details;
        }
        Err(e) => {
            rep.error = Some(e.to_string());
            rep.pass = Some(false);
        }
    }
    rep.millis = start.elapsed().as_millis();
    rep
}

/// Runs all tasks (in parallel, reported in order). Task failures are recorded
/// per task; only an invalid scenario is an error.
pub fn run_scenario(scenario: &Scenario, with_terms: bool) -> Result<Report, HarnessError> {
    let resolved = scenario.resolve()?;
    let precision_bits = precision_bits()?;
    let tasks: Vec<TaskReport> = resolved
        .tasks
        .par_iter()
        .enumerate()
        .map(|(i, t)| run_task(i, t, &resolved, with_terms))
        .collect();
    let passed = tasks.iter().filter(|t| t.pass == Some(true)).count();
    let failed = tasks.iter().filter(|t| t.pass == Some(false)).count();
    Ok(Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        precision_bits,
        summary: Summary {
            tasks: tasks.len(),
            passed,
            failed,
            unchecked: tasks.len() - passed - failed,
        },
        tasks,
    })
}

pub fn run_scenario_file(path: &Path, with_terms: bool) -> Result<Report, HarnessError> {
    run_scenario(&Scenario::load(path)?, with_terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario() -> Scenario {
        Scenario::parse(
            r#"{
            "weights": {"Q": {"order": 2, "eigenvalue_law": [1, 0, 1]}},
            "operators": {
                "A": [{"degree": 0, "plus": [[1, 1, 1, 0, 1]], "minus": [[1, 1, 1, 0, 1]]}],
                "B": [{"degree": 1, "plus": [[-1, 1, 1, 0, 1]], "minus": [[-1, 1, 1, 0, 1]]}],
                "D": [{"degree": 1, "plus": [[0, 1, 1, 0, 1]], "minus": [[0, 1, 1, 0, 1]]}],
                "Qinv": {"terms": [{"degree": -2, "plus": [[0, 1, 1, 0, 1]], "minus": [[0, 1, 1, 0, 1]]},
                                   {"degree": -4, "plus": [[0, -1, 1, 0, 1]], "minus": [[0, -1, 1, 0, 1]]}],
                         "valid_down_to": -5}
            },
            "tasks": [
                {"kind": "coboundary_anomaly", "args": ["A", "B"], "weight": "Q", "tolerance": 1e-12, "expected": [-1, 0]},
                {"kind": "weighted_trace", "args": ["D"], "weight": "Q", "tolerance": 1e-9, "expected": [-1.1666666666666667, 0]},
                {"kind": "mellin_residue", "args": ["D", "Qinv"], "weight": "Q", "tolerance": 1e-12, "expected": [1, 0]},
                {"kind": "residue", "args": ["A", "B", "Qinv"]},
                {"kind": "coboundary_check", "args": ["A", "B"], "weight": "Q", "tolerance": 1e-7},
                {"kind": "heat_trace", "args": ["A"], "weight": "Q", "t": 0.5},
                {"kind": "jlo_value", "args": ["A", "B"], "weight": "Q", "t": 0.5, "radius": 8}
            ]
        }"#,
        )
        .unwrap()
    }

    #[test]
    fn runs_a_small_scenario() {
        let rep = run_scenario(&scenario(), true).unwrap();
        assert_eq!(rep.summary.tasks, 7);
        assert_eq!(rep.summary.failed, 0, "{}", rep.to_json());
        assert_eq!(rep.summary.passed, 4);
        assert_eq!(rep.tasks[0].exact_part.as_deref(), Some("-1"));
        assert!(rep.tasks[0].terms.is_some());
        // e^{ix}·e^{−ix}|ξ|·(1+ξ²)⁻¹ has residue 2
        assert_eq!(rep.tasks[3].exact_part.as_deref(), Some("2"));
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 8);
        assert!(text.starts_with("index,kind,label"));
    }

    #[test]
    fn task_errors_do_not_abort() {
        let mut s = scenario();
        // radius below the operator bandwidth sum
        s.tasks[6].radius = Some(1);
        let rep = run_scenario(&s, false).unwrap();
        assert!(rep.tasks[6].error.is_some());
        assert_eq!(rep.tasks[6].pass, Some(false));
        assert_eq!(rep.tasks[0].pass, Some(true));
    }

    #[test]
    fn empty_scenario_gives_empty_report() {
        let rep = run_scenario(&Scenario::parse("{}").unwrap(), false).unwrap();
        assert!(rep.tasks.is_empty());
        assert!(rep.all_passed());
    }

    #[test]
    fn report_is_deterministic_across_thread_counts() {
        let s = scenario();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_scenario(&s, true).unwrap().without_timing().to_json())
        };
        assert_eq!(run(1), run(4));
    }
}
