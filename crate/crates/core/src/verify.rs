//! The acceptance suite as library functions, shared by `pssmfa verify` and
//! the `acceptance` test target.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::minor_eigenvalues;
use crate::error::{Error, Result};
use crate::exact::rat_int;
use crate::fidelity::{
    asymptotic_rect_fidelity, closed_form_rect_fidelity, mfa_fidelity_params, oracle_mfa_fidelity, rect_case,
    RectCase,
};
use crate::pss::{expand_basis_element, expand_state, uniform_product_state, DenseBudget, PssState};
use crate::rdm::counting::{
    exhaustive_overlap_count, exhaustive_pair_count, overlap_count, overlap_count_as_printed, overlap_count_closed,
    rectangular_counts,
};
use crate::rdm::{
    a_single_diagram, a_superposition, diagram_params, exactly_normalized, partial_trace, rectangular_rho_params,
    rho1_params_from_dense, rho2_params_from_dense, site_defect, superposition_params, swap_defect, trace_second,
    EntryClass, Rho1Params, Rho2Params,
};
use crate::scan::{rectangular_cases, run_scan, to_csv, ScanCase};
use crate::sectors::SymmetricOperator;
use crate::young::{compatible, enumerate_diagrams, YoungDiagram};

/// Deliberate defects for checking that the suite notices them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Fault {
    /// Flip the sign of `B3` in the rectangular formulas.
    B3Sign,
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b3-sign" => Ok(Fault::B3Sign),
            other => Err(Error::Parse(format!("unknown fault '{other}' (expected b3-sign)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// Largest `dⁿ` for dense oracle cases.
    pub max_dense: usize,
    pub slack: f64,
    pub skip: Vec<u32>,
    pub fault: Option<Fault>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            max_dense: 1_000_000,
            slack: 0.02,
            skip: Vec::new(),
            fault: None,
        }
    }
}

impl VerifyConfig {
    fn budget(&self) -> DenseBudget {
        DenseBudget::new(self.max_dense)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub skipped: bool,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub cases: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    pub runtime_s: f64,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match (self.skipped, self.passed) {
            (true, _) => "SKIP",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        };
        write!(
            f,
            "{status} criterion {}: {} (cases {}, max deviation {:.3e}, tolerance {:.1e}, {:.1} s)",
            self.id, self.name, self.cases, self.max_deviation, self.tolerance, self.runtime_s
        )
    }
}

const MAX_LISTED: usize = 25;

struct Tally {
    id: u32,
    name: &'static str,
    tolerance: f64,
    max_deviation: f64,
    cases: usize,
    failed: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn new(id: u32, name: &'static str, tolerance: f64) -> Self {
        Self {
            id,
            name,
            tolerance,
            max_deviation: 0.0,
            cases: 0,
            failed: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Record `deviation` against the criterion tolerance.
    fn check(&mut self, label: impl FnOnce() -> String, deviation: f64) {
        self.check_with(label, deviation, self.tolerance);
    }

    fn check_with(&mut self, label: impl FnOnce() -> String, deviation: f64, tolerance: f64) {
        self.cases += 1;
        if deviation.is_finite() {
            self.max_deviation = self.max_deviation.max(deviation);
        }
        if !(deviation <= tolerance) {
            self.fail(format!("{}: deviation {deviation:.3e} > {tolerance:.1e}", label()));
        }
    }

    fn require(&mut self, label: impl FnOnce() -> String, ok: bool) {
        self.cases += 1;
        if !ok {
            self.fail(label());
        }
    }

    fn fail(&mut self, msg: String) {
        self.failed += 1;
        if self.failures.len() < MAX_LISTED {
            self.failures.push(msg);
        }
    }

    fn note(&mut self, msg: String) {
        if self.notes.len() < MAX_LISTED {
            self.notes.push(msg);
        }
    }

    fn finish(mut self) -> CriterionReport {
        if self.failed > self.failures.len() {
            self.failures.push(format!("... {} failures in total", self.failed));
        }
        CriterionReport {
            id: self.id,
            name: self.name,
            passed: self.failed == 0 && self.cases > 0,
            skipped: false,
            tolerance: self.tolerance,
            max_deviation: self.max_deviation,
            cases: self.cases,
            failures: self.failures,
            notes: self.notes,
            runtime_s: 0.0,
        }
    }
}

fn to_f(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn float_params(y: &YoungDiagram, d: usize) -> Result<(Rho1Params<f64>, Rho2Params<f64>)> {
    let (p1, p2) = diagram_params(y, d)?;
    Ok((p1.map(to_f), p2.to_f64()))
}

/// Rectangular cases with a closed form and `dⁿ ≤ max_dense`, `n ≤ 19`.
pub fn closed_form_cases(max_dense: usize) -> Vec<(usize, usize, usize)> {
    let budget = DenseBudget::new(max_dense);
    let mut out = Vec::new();
    for n in 2..=19usize {
        for k in (1..=n).filter(|k| n % k == 0) {
            let mut d = k;
            while budget.fits(n, d) {
                if rect_case(n, k, d).is_ok() {
                    out.push((n, k, d));
                }
                d += 1;
            }
        }
    }
    out
}

/// Reference values that every method must reproduce.
pub fn frozen_values() -> Vec<((usize, usize, usize), f64)> {
    vec![
        ((2, 1, 2), 0.25),
        ((4, 2, 3), 100.0 / 162.0),
        ((6, 2, 5), 0.32 + 0.16 * 3f64.sqrt()),
        ((2, 2, 2), 0.25),
        ((3, 3, 3), 1.0 / 3.0),
        ((4, 4, 4), 0.375),
    ]
}

struct RectTriple {
    case: (usize, usize, usize),
    oracle: Result<f64>,
    params: Result<f64>,
    closed: Result<f64>,
}

/// Triples shared by criteria 1 and 2, computed once per budget.
static TRIPLES: Mutex<Option<(usize, Arc<Vec<RectTriple>>)>> = Mutex::new(None);

fn rect_triples(cfg: &VerifyConfig) -> Arc<Vec<RectTriple>> {
    let mut cache = TRIPLES.lock().unwrap_or_else(|e| e.into_inner());
    if let Some((budget, triples)) = cache.as_ref() {
        if *budget == cfg.max_dense {
            return Arc::clone(triples);
        }
    }
    let triples = Arc::new(compute_triples(cfg));
    *cache = Some((cfg.max_dense, Arc::clone(&triples)));
    triples
}

fn compute_triples(cfg: &VerifyConfig) -> Vec<RectTriple> {
    let budget = cfg.budget();
    closed_form_cases(cfg.max_dense)
        .into_par_iter()
        .map(|(n, k, d)| {
            let y = YoungDiagram::rectangle(n, k).expect("divides");
            let oracle = expand_basis_element::<f64>(&y, d, budget)
                .and_then(|s| oracle_mfa_fidelity(&s, budget))
                .map(|u| u.value);
            let params = float_params(&y, d)
                .and_then(|(p1, p2)| mfa_fidelity_params(&p1, &p2))
                .map(|u| u.value);
            let closed = closed_form_rect_fidelity(n, k, d).map(|c| c.value);
            RectTriple {
                case: (n, k, d),
                oracle,
                params,
                closed,
            }
        })
        .collect()
}

fn value_or_fail(t: &mut Tally, case: (usize, usize, usize), what: &str, v: &Result<f64>) -> Option<f64> {
    match v {
        Ok(x) => Some(*x),
        Err(e) => {
            t.fail(format!("{case:?} {what}: {e}"));
            None
        }
    }
}

/// Criterion 1: closed forms against the oracle.
pub fn criterion_1(cfg: &VerifyConfig) -> CriterionReport {
    let mut t = Tally::new(1, "rectangular closed forms vs oracle", 1e-8);
    let triples = rect_triples(cfg);
    for tr in triples.iter() {
        let (Some(o), Some(c)) = (
            value_or_fail(&mut t, tr.case, "oracle", &tr.oracle),
            value_or_fail(&mut t, tr.case, "closed form", &tr.closed),
        ) else {
            continue;
        };
        t.check(|| format!("{:?} closed {c} vs oracle {o}", tr.case), (c - o).abs());
    }
    for (case, expected) in frozen_values() {
        if let Some(tr) = triples.iter().find(|tr| tr.case == case) {
            for (what, v) in [("oracle", &tr.oracle), ("closed form", &tr.closed)] {
                if let Ok(x) = v {
                    t.check(|| format!("{case:?} {what} {x} vs reference {expected}"), (x - expected).abs());
                }
            }
        } else {
            t.note(format!("{case:?} outside the dense budget"));
        }
    }
    t.finish()
}

/// Criterion 2: oracle, params path and closed form pairwise.
pub fn criterion_2(cfg: &VerifyConfig) -> CriterionReport {
    let mut t = Tally::new(2, "three-method agreement", 1e-8);
    for tr in rect_triples(cfg).iter() {
        let vals = [
            value_or_fail(&mut t, tr.case, "oracle", &tr.oracle),
            value_or_fail(&mut t, tr.case, "params", &tr.params),
            value_or_fail(&mut t, tr.case, "closed form", &tr.closed),
        ];
        let names = ["oracle", "params", "closed_form"];
        for i in 0..3 {
            for j in i + 1..3 {
                if let (Some(a), Some(b)) = (vals[i], vals[j]) {
                    t.check(|| format!("{:?} {} {a} vs {} {b}", tr.case, names[i], names[j]), (a - b).abs());
                }
            }
        }
    }
    t.finish()
}

/// Criterion 3: closed forms at `d = 10⁴` against the `d → ∞` limits,
/// relative 1% (absolute 0.01 where the limit is 0).
pub fn criterion_3(_cfg: &VerifyConfig) -> CriterionReport {
    let mut t = Tally::new(3, "asymptotic limits at d = 1e4", 0.01);
    let d = 10_000;
    for n in 2..=12usize {
        for k in (1..=n).filter(|&k| n % k == 0 && 2 * k <= n) {
            let limit = asymptotic_rect_fidelity(n, k, false).expect("valid");
            match closed_form_rect_fidelity(n, k, d) {
                Ok(cf) => {
                    let dev = if limit == 0.0 {
                        cf.value.abs()
                    } else {
                        (cf.value - limit).abs() / limit
                    };
                    t.check(|| format!("(n={n}, k={k}) F={} limit={limit}", cf.value), dev);
                }
                Err(e) => t.fail(format!("(n={n}, k={k}): {e}")),
            }
        }
    }
    t.note("the k < n/2 closed form approaches its limit as O(d^-1/2)".into());
    t.finish()
}

fn rdm_cases() -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = (2..=5).flat_map(|n| (1..=4).map(move |d| (n, d))).collect();
    out.extend((6..=8).flat_map(|n| (1..=3).map(move |d| (n, d))));
    out
}

fn with_fault(p: (Rho1Params<BigRational>, Rho2Params<BigRational>), fault: Option<Fault>) -> (Rho1Params<BigRational>, Rho2Params<BigRational>) {
    match fault {
        Some(Fault::B3Sign) => {
            let (p1, mut p2) = p;
            p2.b3 = -p2.b3;
            (p1, p2)
        }
        None => p,
    }
}

/// Criterion 4: structure of `ρ₁` and `ρ₂` for every basis diagram.
pub fn criterion_4(cfg: &VerifyConfig) -> CriterionReport {
    let mut t = Tally::new(4, "rdm structure", 1e-10);
    let budget = cfg.budget();
    for (n, d) in rdm_cases() {
        if !budget.fits(n, d) {
            t.note(format!("n={n} d={d} outside the dense budget"));
            continue;
        }
        for y in enumerate_diagrams(n, d).expect("n >= 1") {
            let label = |what: &str| format!("{y} d={d}: {what}");
            let outcome = structure_checks(&mut t, &y, d, budget, &label);
            if let Err(e) = outcome {
                t.fail(label(&e.to_string()));
            }
        }
        for k in (1..=d.min(n)).filter(|k| n % k == 0) {
            let rect = YoungDiagram::rectangle(n, k).expect("divides");
            match (rectangular_rho_params(n, k, d), diagram_params(&rect, d)) {
                (Ok(formula), Ok(counted)) => {
                    let formula = with_fault(formula, cfg.fault);
                    t.require(|| format!("rectangle n={n} k={k} d={d}: formulas differ from exact counts"), formula == counted);
                }
                (a, b) => t.fail(format!("rectangle n={n} k={k} d={d}: {:?} / {:?}", a.err(), b.err())),
            }
        }
    }
    t.finish()
}

fn structure_checks(
    t: &mut Tally,
    y: &YoungDiagram,
    d: usize,
    budget: DenseBudget,
    label: &dyn Fn(&str) -> String,
) -> Result<()> {
    let s = expand_basis_element::<f64>(y, d, budget)?;
    let rho1 = partial_trace(&s, 1, budget)?;
    let rho2 = partial_trace(&s, 2, budget)?;
    t.check(|| label("Tr rho1"), (rho1.trace_re() - 1.0).abs());
    t.check(|| label("Tr rho2"), (rho2.trace_re() - 1.0).abs());
    t.check(|| label("Tr_2 rho2 = rho1"), trace_second(&rho2, d).as_matrix().max_abs_diff(rho1.as_matrix()));
    let min_eig = rho2.eigenvalues()?.first().copied().unwrap_or(0.0);
    t.check(|| label(&format!("min eigenvalue {min_eig:e}")), (-min_eig).max(0.0));
    t.check(|| label("SWAP rho2 = rho2"), swap_defect(&rho2, d));
    t.check(|| label("site permutation invariance"), site_defect(&rho2, d));
    let (p1, _) = rho1_params_from_dense(&rho1, 1e-10)?;
    let (p2, _) = rho2_params_from_dense(&rho2, 1e-10)?;
    t.check(|| label("A = (d-2)B3 + 2Re B5"), (p2.induced_a() - p1.a).abs());
    t.check(|| label("d C_same + d(d-1) C_pair = 1"), (p2.trace() - 1.0).abs());
    if y.n() >= 2 {
        let (e1, e2) = diagram_params(y, d)?;
        t.require(|| label("exact A differs from (d-2)B3 + 2Re B5"), e2.induced_a() == e1.a);
        t.require(|| label("exact trace differs from 1"), exactly_normalized(&e2));
        let f2 = e2.to_f64();
        let dev = EntryClass::BASE
            .iter()
            .map(|&c| (f2.value(c) - p2.value(c)).norm())
            .fold((to_f(&e1.a) - p1.a).abs(), f64::max);
        t.check(|| label("counted params vs dense"), dev);
    }
    Ok(())
}

/// Criterion 5: overlap counts against exhaustive enumeration.
pub fn criterion_5(_cfg: &VerifyConfig) -> CriterionReport {
    let mut t = Tally::new(5, "overlap-count reconciliation", 0.0);
    let mut printed_mismatches = 0;
    for n in 2..=6usize {
        for d in 2..=5usize {
            for y in enumerate_diagrams(n, d).expect("n >= 1") {
                let pairs = [(0, 1), (1, 0), (d - 1, 0)];
                let oracle = exhaustive_overlap_count(&y, d, 0, 1).expect("valid sites");
                for &(i, j) in &pairs[1..] {
                    let other = exhaustive_overlap_count(&y, d, i, j).expect("valid sites");
                    t.require(|| format!("{y} d={d}: N_ij depends on the pair ({i},{j})"), other == oracle);
                }
                let rule = overlap_count(&y, d).expect("fits");
                t.require(|| format!("{y} d={d}: block-move count {rule} vs exhaustive {oracle}"), rule == oracle);
                let closed = overlap_count_closed(&y, d).expect("fits");
                t.require(|| format!("{y} d={d}: closed count {closed} vs exhaustive {oracle}"), closed == rat_int(&oracle));
                let printed = overlap_count_as_printed(&y, d).expect("fits");
                if printed != rat_int(&oracle) {
                    printed_mismatches += 1;
                    if printed_mismatches <= 10 {
                        t.note(format!("{y} d={d}: doubled cluster sum gives {printed}, exhaustive {oracle}"));
                    }
                }
            }
            for k in (1..=d.min(n)).filter(|k| n % k == 0) {
                rect_count_checks(&mut t, n, k, d);
            }
        }
    }
    let y21: YoungDiagram = "2,1".parse().expect("valid");
    let bench = exhaustive_overlap_count(&y21, 3, 0, 1).expect("valid");
    t.require(|| format!("[2,1] d=3 oracle is {bench}, expected 3"), bench == BigUint::from(3u32));
    t.note(format!("doubled cluster sum disagrees with enumeration in {printed_mismatches} cases"));
    t.finish()
}

fn rect_count_checks(t: &mut Tally, n: usize, k: usize, d: usize) {
    let rect = YoungDiagram::rectangle(n, k).expect("divides");
    let c = rectangular_counts(n, k, d).expect("valid");
    let classes: [(&str, &[usize], &[usize], &BigUint); 8] = [
        ("i,j", &[0], &[1], &c.i_j),
        ("ii,ii", &[0, 0], &[0, 0], &c.ii_ii),
        ("ij,ij", &[0, 1], &[0, 1], &c.ij_ij),
        ("ii,jj", &[0, 0], &[1, 1], &c.ii_jj),
        ("ij,ik", &[0, 1], &[0, 2], &c.ij_ik),
        ("ij,kl", &[0, 1], &[2, 3], &c.ij_kl),
        ("ii,ij", &[0, 0], &[0, 1], &c.ii_ij),
        ("ii,jk", &[0, 0], &[1, 2], &c.ii_jk),
    ];
    for (name, ket, bra, formula) in classes {
        if ket.iter().chain(bra).any(|&s| s >= d) {
            continue;
        }
        let oracle = exhaustive_pair_count(&rect, &rect, ket, bra, d).expect("valid");
        t.require(
            || format!("rectangle n={n} k={k} d={d}: N_{name} formula {formula} vs exhaustive {oracle}"),
            &oracle == formula,
        );
    }
}

/// Random valid parameters: accepted when every sector block of `ρ₂` is PSD.
pub fn sample_valid_params(rng: &mut ChaCha8Rng, d: usize) -> Rho2Params<f64> {
    loop {
        let df = d as f64;
        let c_pair = rng.gen_range(0.0..1.0) / (df * (df - 1.0));
        let c_same = (1.0 - df * (df - 1.0) * c_pair) / df;
        let mut u = || rng.gen_range(-1.0..1.0);
        let cross = (c_same * c_pair).sqrt() / df;
        let p = Rho2Params {
            d,
            b1: u() * c_pair / df,
            b2: Complex64::new(u() * cross, u() * cross),
            b3: u() * c_pair / df,
            b4: u() * c_same / df,
            b5: Complex64::new(u() * cross, u() * cross),
            c_pair,
            c_same,
        };
        let psd = SymmetricOperator::from_rho2(&p)
            .blocks()
            .iter()
            .all(|b| b.eigenvalues().iter().all(|&v| v >= 0.0));
        if psd {
            return p;
        }
    }
}

pub const SAMPLE_SEED: u64 = 0x5eed_0006;

/// Criterion 6: analytic pair-minor eigenvalues against the numeric spectrum.
pub fn criterion_6(_cfg: &VerifyConfig) -> CriterionReport {
    let mut t = Tally::new(6, "pair-minor eigenvalues", 1e-10);
    let record = |t: &mut Tally, label: String, p: &Rho2Params<f64>| match minor_eigenvalues(p) {
        Ok(r) => {
            t.check(|| format!("{label}: lambda1"), r.lambda1_deviation);
            t.check(|| format!("{label}: lambda2"), r.lambda2_deviation.unwrap_or(f64::INFINITY));
            t.check(|| format!("{label}: minor PSD"), (-r.positivity_margin).max(0.0));
        }
        Err(e) => t.fail(format!("{label}: {e}")),
    };
    for d in 4..=8usize {
        for n in 2..=12usize {
            for k in (1..=d.min(n)).filter(|k| n % k == 0) {
                let (_, p2) = rectangular_rho_params(n, k, d).expect("valid");
                record(&mut t, format!("rectangle n={n} k={k} d={d}"), &p2.to_f64());
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    for trial in 0..100 {
        let d = rng.gen_range(4..=8);
        let p = sample_valid_params(&mut rng, d);
        record(&mut t, format!("sample {trial} d={d}"), &p);
    }
    t.finish()
}

/// Diagrams of `n` blocks with no row of length 1.
pub fn no_isolated_diagrams(n: usize) -> Vec<YoungDiagram> {
    enumerate_diagrams(n, n)
        .expect("n >= 1")
        .into_iter()
        .filter(|y| !y.has_isolated_particles())
        .collect()
}

/// Criterion 7: the `F ≤ 1/2` regime on diagrams without isolated particles.
pub fn criterion_7(cfg: &VerifyConfig) -> CriterionReport {
    let mut t = Tally::new(7, "no-isolated-particle sweep", 1e-10);
    let f_cap = 0.5 + cfg.slack;
    let budget = cfg.budget();
    let diagrams: Vec<YoungDiagram> = (2..=8).flat_map(no_isolated_diagrams).collect();
    for d in [20usize, 30, 50] {
        for y in &diagrams {
            match (float_params(y, d), a_single_diagram(y, d)) {
                (Ok((p1, p2)), Ok(a)) => {
                    let f = mfa_fidelity_params(&p1, &p2).map(|u| u.value).unwrap_or(f64::NAN);
                    t.require(|| format!("{y} d={d}: F = {f} exceeds {f_cap}"), f <= f_cap);
                    let scaled = to_f(&a).abs() * (d * d) as f64;
                    t.require(|| format!("{y} d={d}: |A| d^2 = {scaled} exceeds 2k = {}", 2 * y.k()), scaled <= 2.0 * y.k() as f64);
                }
                (a, b) => t.fail(format!("{y} d={d}: {:?} / {:?}", a.err(), b.err())),
            }
        }
    }
    let amplitude_sets = [
        [Complex64::new(0.5f64.sqrt(), 0.0), Complex64::new(0.5f64.sqrt(), 0.0)],
        [Complex64::new(0.6, 0.0), Complex64::from_polar(0.8, std::f64::consts::FRAC_PI_3)],
    ];
    let mut pairs = 0;
    for n in 2..=8 {
        let ds = no_isolated_diagrams(n);
        for (i, y) in ds.iter().enumerate() {
            for z in &ds[i + 1..] {
                if !compatible(y, z).expect("distinct") {
                    continue;
                }
                pairs += 1;
                for amps in &amplitude_sets {
                    superposition_checks(&mut t, y, z, amps, budget, f_cap);
                }
            }
        }
    }
    t.note(format!("{pairs} compatible pairs"));
    t.finish()
}

fn superposition_checks(
    t: &mut Tally,
    y: &YoungDiagram,
    z: &YoungDiagram,
    amps: &[Complex64; 2],
    budget: DenseBudget,
    f_cap: f64,
) {
    let n = y.n();
    let make = |d: usize| PssState::new(n, d, vec![(y.clone(), amps[0]), (z.clone(), amps[1])]);
    for d in 2..=4usize {
        if y.k().max(z.k()) > d || !budget.fits(n, d) {
            continue;
        }
        let label = || format!("{y} + {z} d={d}");
        let result = make(d).and_then(|psi| {
            let dec = a_superposition(&psi)?;
            let s = expand_state::<f64>(&psi, budget)?;
            let (p1, _) = rho1_params_from_dense(&partial_trace(&s, 1, budget)?, 1e-10)?;
            Ok((dec, p1.a))
        });
        match result {
            Ok((dec, a)) => t.check(|| format!("{}: A decomposition {} vs dense {a}", label(), dec.total), (dec.total - a).abs()),
            Err(e) => t.fail(format!("{}: {e}", label())),
        }
    }
    let d = 50;
    match make(d).and_then(|psi| superposition_params(&psi)).and_then(|(p1, p2)| mfa_fidelity_params(&p1, &p2)) {
        Ok(u) => t.require(|| format!("{y} + {z} d={d}: F = {} exceeds {f_cap}", u.value), u.value <= f_cap),
        Err(e) => t.fail(format!("{y} + {z} d={d}: {e}")),
    }
}

/// Criterion 8: product-state limits.
pub fn criterion_8(cfg: &VerifyConfig) -> CriterionReport {
    let mut t = Tally::new(8, "product-state sanity", 1e-10);
    let budget = cfg.budget();
    match uniform_product_state::<f64>(3, 3, budget).and_then(|s| oracle_mfa_fidelity(&s, budget)) {
        Ok(u) => t.check(|| format!("uniform product n=3 d=3: oracle F = {}", u.value), (u.value - 1.0).abs()),
        Err(e) => t.fail(format!("uniform product oracle: {e}")),
    }
    match PssState::uniform(3, 3).and_then(|psi| superposition_params(&psi)).and_then(|(p1, p2)| mfa_fidelity_params(&p1, &p2)) {
        Ok(u) => t.check(|| format!("uniform product n=3 d=3: params F = {}", u.value), (u.value - 1.0).abs()),
        Err(e) => t.fail(format!("uniform product params: {e}")),
    }
    let y: YoungDiagram = "1,1".parse().expect("valid");
    let mut previous: Option<f64> = None;
    let mut first = None;
    for d in 10..=100usize {
        let f = match float_params(&y, d).and_then(|(p1, p2)| mfa_fidelity_params(&p1, &p2)) {
            Ok(u) => u.value,
            Err(e) => {
                t.fail(format!("[1,1] d={d}: {e}"));
                continue;
            }
        };
        if let Some(p) = previous {
            t.require(|| format!("[1,1]: F({d}) = {f} < F({}) = {p}", d - 1), f >= p);
        }
        t.require(|| format!("[1,1] d={d}: F = {f} above 1"), f <= 1.0 + 1e-9);
        first.get_or_insert(f);
        previous = Some(f);
    }
    if let (Some(a), Some(b)) = (first, previous) {
        t.note(format!("[1,1]: F(10) = {a}, F(100) = {b}"));
    }
    t.finish()
}

/// Criterion 9 (library part): scan output independent of the thread count.
pub fn criterion_9(cfg: &VerifyConfig) -> CriterionReport {
    let mut t = Tally::new(9, "scan determinism", 0.0);
    let budget = cfg.budget();
    let ns: Vec<usize> = (2..=19).collect();
    let ks: Vec<usize> = (1..=19).collect();
    let ds: Vec<usize> = (1..=1000).collect();
    let cases: Vec<ScanCase> = rectangular_cases(&ns, &ks, &ds, budget, true, true);
    let mut outputs: Vec<(usize, Result<String>)> = Vec::new();
    for threads in [1usize, 4, 8] {
        let out = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Domain(e.to_string()))
            .and_then(|pool| pool.install(|| run_scan(&cases, &crate::fidelity::Method::ALL, budget, false)))
            .and_then(|rows| to_csv(&rows));
        outputs.push((threads, out));
    }
    let reference = match &outputs[0].1 {
        Ok(s) => s.clone(),
        Err(e) => {
            t.fail(format!("scan failed: {e}"));
            return t.finish();
        }
    };
    for (threads, out) in &outputs[1..] {
        match out {
            Ok(s) => t.require(|| format!("{threads} threads differ from 1 thread"), *s == reference),
            Err(e) => t.fail(format!("{threads} threads: {e}")),
        }
    }
    t.note(format!("{} cases, {} bytes of CSV", cases.len(), reference.len()));
    t.finish()
}

pub const CRITERIA: [(u32, fn(&VerifyConfig) -> CriterionReport); 9] = [
    (1, criterion_1),
    (2, criterion_2),
    (3, criterion_3),
    (4, criterion_4),
    (5, criterion_5),
    (6, criterion_6),
    (7, criterion_7),
    (8, criterion_8),
    (9, criterion_9),
];

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub max_dense: usize,
    pub slack: f64,
    pub fault: Option<Fault>,
    pub criteria: Vec<CriterionReport>,
}

/// Run every criterion not listed in `cfg.skip`, calling `progress` after each.
pub fn run_all(cfg: &VerifyConfig, mut progress: impl FnMut(&CriterionReport)) -> VerifyReport {
    let mut criteria = Vec::new();
    for (id, run) in CRITERIA {
        let report = if cfg.skip.contains(&id) {
            skipped_report(id)
        } else {
            let start = Instant::now();
            let mut report = run(cfg);
            report.runtime_s = start.elapsed().as_secs_f64();
            report
        };
        progress(&report);
        criteria.push(report);
    }
    VerifyReport {
        passed: criteria.iter().all(|c| c.skipped || c.passed),
        max_dense: cfg.max_dense,
        slack: cfg.slack,
        fault: cfg.fault,
        criteria,
    }
}

fn skipped_report(id: u32) -> CriterionReport {
    let name = match id {
        1 => "rectangular closed forms vs oracle",
        2 => "three-method agreement",
        3 => "asymptotic limits at d = 1e4",
        4 => "rdm structure",
        5 => "overlap-count reconciliation",
        6 => "pair-minor eigenvalues",
        7 => "no-isolated-particle sweep",
        8 => "product-state sanity",
        _ => "scan determinism",
    };
    CriterionReport {
        id,
        name,
        passed: false,
        skipped: true,
        tolerance: 0.0,
        max_deviation: 0.0,
        cases: 0,
        failures: Vec::new(),
        notes: vec!["skipped on request".into()],
        runtime_s: 0.0,
    }
}

/// Whether the asymptotic regime of `(n, k)` is one criterion 3 covers.
pub fn asymptotic_case(n: usize, k: usize) -> Option<RectCase> {
    match rect_case(n, k, usize::MAX / 2).ok()? {
        RectCase::Square => None,
        c => Some(c),
    }
}
