//! Fidelity evaluation over lists of cases, with order-stable parallelism.

use std::time::Instant;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fidelity::{
    closed_form_rect_fidelity, mfa_fidelity_params, oracle_mfa_fidelity, FidelityResult, Method,
};
use crate::pss::{expand_basis_element, expand_state, DenseBudget, PssState};
use crate::rdm::{diagram_params, superposition_params};
use crate::young::YoungDiagram;

#[derive(Clone, Debug, PartialEq)]
pub enum CaseShape {
    /// The rectangular diagram with `k` rows.
    Rectangle(usize),
    Diagram(YoungDiagram),
    State(PssState),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanCase {
    pub n: usize,
    pub d: usize,
    pub shape: CaseShape,
}

impl ScanCase {
    pub fn rectangle(n: usize, k: usize, d: usize) -> Self {
        Self {
            n,
            d,
            shape: CaseShape::Rectangle(k),
        }
    }

    pub fn diagram(y: YoungDiagram, d: usize) -> Self {
        Self {
            n: y.n(),
            d,
            shape: CaseShape::Diagram(y),
        }
    }

    pub fn state(psi: PssState) -> Self {
        Self {
            n: psi.n(),
            d: psi.d(),
            shape: CaseShape::State(psi),
        }
    }

    /// Text for the `k_or_diagram` column.
    pub fn label(&self) -> String {
        match &self.shape {
            CaseShape::Rectangle(k) => format!("k={k}"),
            CaseShape::Diagram(y) => y.to_string(),
            CaseShape::State(psi) => {
                let parts: Vec<String> = psi.support().map(|y| y.to_string()).collect();
                format!("state[{}]", parts.join("+"))
            }
        }
    }

    /// The basis diagram, when the case is a single one.
    pub fn basis_diagram(&self) -> Result<Option<YoungDiagram>> {
        Ok(match &self.shape {
            CaseShape::Rectangle(k) => Some(YoungDiagram::rectangle(self.n, *k)?),
            CaseShape::Diagram(y) => Some(y.clone()),
            CaseShape::State(_) => None,
        })
    }
}

/// Evaluate one method on one case.
pub fn evaluate(case: &ScanCase, method: Method, budget: DenseBudget) -> Result<FidelityResult> {
    let basis = case.basis_diagram()?;
    match method {
        Method::Oracle => {
            let dense = match (&case.shape, &basis) {
                (CaseShape::State(psi), _) => expand_state::<f64>(psi, budget)?,
                (_, Some(y)) => expand_basis_element::<f64>(y, case.d, budget)?,
                _ => unreachable!("non-state cases have a diagram"),
            };
            Ok(FidelityResult::new(oracle_mfa_fidelity(&dense, budget)?, method))
        }
        Method::Params => {
            let (p1, p2) = match (&case.shape, &basis) {
                (CaseShape::State(psi), _) => superposition_params(psi)?,
                (_, Some(y)) => {
                    let (p1, p2) = diagram_params(y, case.d)?;
                    (p1.map(|x| x.to_f64().unwrap_or(f64::NAN)), p2.to_f64())
                }
                _ => unreachable!("non-state cases have a diagram"),
            };
            Ok(FidelityResult::new(mfa_fidelity_params(&p1, &p2)?, method))
        }
        Method::ClosedForm => {
            let Some(k) = basis.as_ref().and_then(|y| y.rectangular_rows().map(|_| y.k())) else {
                return Err(Error::NotCovered("closed forms exist for rectangular basis diagrams only".into()));
            };
            let cf = closed_form_rect_fidelity(case.n, k, case.d)?;
            let exact = match cf.form.as_rational() {
                Some(r) if r.denom() == &num_bigint::BigInt::from(1) => r.numer().to_string(),
                Some(r) => format!("{}/{}", r.numer(), r.denom()),
                None => cf.form.to_string(),
            };
            Ok(FidelityResult {
                value: cf.value,
                method,
                clipped_mass: 0.0,
                exact: Some(exact),
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Value(FidelityResult),
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub n: usize,
    pub d: usize,
    pub label: String,
    pub method: Method,
    pub outcome: Outcome,
    pub runtime_ms: Option<f64>,
}

impl ScanRow {
    pub fn value(&self) -> Option<f64> {
        match &self.outcome {
            Outcome::Value(r) => Some(r.value),
            Outcome::Skipped(_) => None,
        }
    }
}

/// Skippable conditions become rows with a reason; anything else is a hard error.
fn skip_reason(err: &Error) -> Option<String> {
    match err {
        Error::Budget { .. } | Error::NotCovered(_) | Error::Domain(_) | Error::Inapplicable(_) => {
            Some(format!("skipped: {err}"))
        }
        _ => None,
    }
}

pub fn evaluate_case(case: &ScanCase, methods: &[Method], budget: DenseBudget, timing: bool) -> Result<Vec<ScanRow>> {
    methods
        .iter()
        .map(|&method| {
            let start = Instant::now();
            let result = evaluate(case, method, budget);
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            let outcome = match result {
                Ok(r) => Outcome::Value(r),
                Err(e) => Outcome::Skipped(skip_reason(&e).ok_or(e)?),
            };
            Ok(ScanRow {
                n: case.n,
                d: case.d,
                label: case.label(),
                method,
                outcome,
                runtime_ms: timing.then_some(elapsed),
            })
        })
        .collect()
}

/// Evaluate all cases in parallel on the current rayon pool; rows come back
/// in case order, then method order.
pub fn run_scan(cases: &[ScanCase], methods: &[Method], budget: DenseBudget, timing: bool) -> Result<Vec<ScanRow>> {
    let per_case: Vec<Result<Vec<ScanRow>>> = cases
        .par_iter()
        .map(|c| evaluate_case(c, methods, budget, timing))
        .collect();
    let mut rows = Vec::new();
    for r in per_case {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Rectangular cases `(n, k, d)` with `k | n` and `k ≤ d`. With `dense_only`
/// set, cases whose state vector exceeds `budget` are dropped; with
/// `covered_only`, cases without a closed form are dropped.
pub fn rectangular_cases(
    ns: &[usize],
    ks: &[usize],
    ds: &[usize],
    budget: DenseBudget,
    dense_only: bool,
    covered_only: bool,
) -> Vec<ScanCase> {
    let mut out = Vec::new();
    for &n in ns {
        for &k in ks {
            if k == 0 || n % k != 0 {
                continue;
            }
            for &d in ds {
                if k > d || (dense_only && !budget.fits(n, d)) {
                    continue;
                }
                if covered_only && crate::fidelity::rect_case(n, k, d).is_err() {
                    continue;
                }
                out.push(ScanCase::rectangle(n, k, d));
            }
        }
    }
    out
}

pub const CSV_HEADER: [&str; 8] = [
    "n",
    "d",
    "k_or_diagram",
    "method",
    "F",
    "exact_expr",
    "clipped_mass",
    "runtime_ms",
];

fn fields(row: &ScanRow) -> [String; 8] {
    let (f, exact, clipped) = match &row.outcome {
        Outcome::Value(r) => (
            r.value.to_string(),
            r.exact.clone().unwrap_or_default(),
            r.clipped_mass.to_string(),
        ),
        Outcome::Skipped(reason) => (String::new(), reason.clone(), String::new()),
    };
    [
        row.n.to_string(),
        row.d.to_string(),
        row.label.clone(),
        row.method.to_string(),
        f,
        exact,
        clipped,
        row.runtime_ms.map(|t| format!("{t:.3}")).unwrap_or_default(),
    ]
}

pub fn to_csv(rows: &[ScanRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for row in rows {
        w.write_record(fields(row)).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[derive(Serialize)]
struct JsonRow<'a> {
    n: usize,
    d: usize,
    k_or_diagram: &'a str,
    method: Method,
    #[serde(rename = "F")]
    value: Option<f64>,
    exact_expr: Option<&'a str>,
    clipped_mass: Option<f64>,
    runtime_ms: Option<f64>,
    skipped: Option<&'a str>,
}

pub fn to_json(rows: &[ScanRow]) -> Result<String> {
    let out: Vec<JsonRow<'_>> = rows
        .iter()
        .map(|row| {
            let (value, exact, clipped, skipped) = match &row.outcome {
                Outcome::Value(r) => (Some(r.value), r.exact.as_deref(), Some(r.clipped_mass), None),
                Outcome::Skipped(reason) => (None, None, None, Some(reason.as_str())),
            };
            JsonRow {
                n: row.n,
                d: row.d,
                k_or_diagram: &row.label,
                method: row.method,
                value,
                exact_expr: exact,
                clipped_mass: clipped,
                runtime_ms: row.runtime_ms,
                skipped,
            }
        })
        .collect();
    Ok(serde_json::to_string_pretty(&out)? + "\n")
}
