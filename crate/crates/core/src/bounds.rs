//! Upper bounds on the MFA fidelity for states without isolated particles.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fidelity::mfa_fidelity_params;
use crate::linalg::{CMatrix, HermitianMatrix};
use crate::pss::PssState;
use crate::rdm::{a_superposition, superposition_params, ADecomposition, EntryClass, Rho1Params, Rho2Params};
use crate::scalar::{Real, Scalar};
use crate::sectors::pair_minor_spectrum;
use crate::young::{compatible, enumerate_diagrams, YoungDiagram};

/// Principal submatrix of `ρ₂` on `{|ij⟩ : i ≠ j}`, rows ordered lexicographically.
pub fn rho_pair_minor<T: Real>(p: &Rho2Params<T>) -> HermitianMatrix<T> {
    let d = p.d;
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let m = CMatrix::from_fn(pairs.len(), pairs.len(), |r, c| {
        let ((i, j), (k, l)) = (pairs[r], pairs[c]);
        p.value(EntryClass::classify(i, j, k, l))
    });
    HermitianMatrix::new(m, 1e-12).expect("pair classes are real")
}

#[derive(Clone, Debug, Serialize)]
pub struct MinorSpectrumReport {
    pub d: usize,
    pub lambda1: f64,
    /// Omitted for `d < 4`.
    pub lambda2: Option<f64>,
    /// Distance from each analytic value to the nearest numeric eigenvalue.
    pub lambda1_deviation: f64,
    pub lambda2_deviation: Option<f64>,
    pub spectrum: Vec<f64>,
    /// Smallest numeric eigenvalue.
    pub positivity_margin: f64,
}

fn nearest(spectrum: &[f64], x: f64) -> f64 {
    spectrum.iter().map(|v| (v - x).abs()).fold(f64::INFINITY, f64::min)
}

pub fn minor_eigenvalues(p: &Rho2Params<f64>) -> Result<MinorSpectrumReport> {
    let d = p.d;
    if d < 2 {
        return Err(Error::Domain("the pair minor needs d >= 2".into()));
    }
    let spectrum = rho_pair_minor(p).eigenvalues()?;
    let analytic = pair_minor_spectrum(p);
    let lambda1 = analytic[0].0;
    let lambda2 = (d >= 4).then(|| analytic[1].0);
    Ok(MinorSpectrumReport {
        d,
        lambda1,
        lambda2,
        lambda1_deviation: nearest(&spectrum, lambda1),
        lambda2_deviation: lambda2.map(|l| nearest(&spectrum, l)),
        positivity_margin: spectrum.first().copied().unwrap_or(0.0),
        spectrum,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BConstraint {
    pub name: &'static str,
    pub magnitude: f64,
    /// Expected decay exponent `α` in `|B| = O(d^{−α})`.
    pub exponent: f64,
    /// `|B| d^α`, bounded in `d` when the scaling holds.
    pub scaled: f64,
    /// `|B|² ≤ (diagonal)(diagonal)` for the 2×2 principal minor holding `B`.
    pub minor_holds: bool,
    pub minor_margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BConstraintReport {
    pub d: usize,
    pub entries: Vec<BConstraint>,
    /// `|B3| d^{5/2}`, the sharper scaling that follows once `A = O(d⁻²)`.
    pub b3_tight_scaled: f64,
    pub all_minors_hold: bool,
}

/// Principal 2×2 minor checks and decay diagnostics for the `B` constants.
/// Comparisons are made in `S`, so exact inputs give exact verdicts.
pub fn b_constraint_report<S: Scalar>(p: &Rho2Params<S>) -> BConstraintReport {
    let abs2 = |z: &Complex<S>| z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone();
    let real = |x: &S| Complex::new(x.clone(), S::zero());
    let d = p.d as f64;
    let rows: [(&'static str, Complex<S>, f64, &S, &S); 5] = [
        ("B1", real(&p.b1), 2.0, &p.c_pair, &p.c_pair),
        ("B2", p.b2.clone(), 1.5, &p.c_same, &p.c_pair),
        ("B3", real(&p.b3), 2.0, &p.c_pair, &p.c_pair),
        ("B4", real(&p.b4), 1.0, &p.c_same, &p.c_same),
        ("B5", p.b5.clone(), 1.5, &p.c_same, &p.c_pair),
    ];
    let entries: Vec<BConstraint> = rows
        .into_iter()
        .map(|(name, b, exponent, x, y)| {
            let lhs = abs2(&b);
            let rhs = x.clone() * y.clone();
            let magnitude = lhs.to_f64_lossy().sqrt();
            BConstraint {
                name,
                magnitude,
                exponent,
                scaled: magnitude * d.powf(exponent),
                minor_holds: lhs <= rhs,
                minor_margin: (rhs - lhs).to_f64_lossy(),
            }
        })
        .collect();
    BConstraintReport {
        d: p.d,
        b3_tight_scaled: p.b3.to_f64_lossy().abs() * d.powf(2.5),
        all_minors_hold: entries.iter().all(|e| e.minor_holds),
        entries,
    }
}

/// Hypothesis of the bound: `|A| ≤ c / d²` with `d ≥ d_min`. When
/// `a_coefficient` is unset, `c = 2 k_max` over the support. `dilution` is
/// the factor in the reported `d ≥ dilution · n √n` regime flag.
#[derive(Clone, Debug, Serialize)]
pub struct TheoremHypothesis {
    pub a_coefficient: Option<f64>,
    pub d_min: usize,
    pub dilution: f64,
}

impl Default for TheoremHypothesis {
    fn default() -> Self {
        Self {
            a_coefficient: None,
            d_min: 10,
            dilution: 10.0,
        }
    }
}

impl TheoremHypothesis {
    pub fn coefficient(&self, k_max: usize) -> f64 {
        self.a_coefficient.unwrap_or(2.0 * k_max as f64)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiagonalBound {
    pub bound: f64,
    pub cap: f64,
}

/// `(√c_same + d √(c_pair/2))²`, the value the diagonal constraints on `√M`
/// allow with the measured diagonals.
pub fn sqrt_m_diag_bound<T: Real>(
    p1: &Rho1Params<T>,
    p2: &Rho2Params<T>,
    a_coefficient: f64,
    d_min: usize,
) -> Result<DiagonalBound> {
    let d = p2.d;
    if d < d_min {
        return Err(Error::Inapplicable(format!("d = {d} is below d_min = {d_min}")));
    }
    let a = p1.a.to_f64_lossy().abs();
    let limit = a_coefficient / (d * d) as f64;
    if a > limit {
        return Err(Error::Inapplicable(format!("|A| = {a:e} exceeds {a_coefficient}/d^2 = {limit:e}")));
    }
    let cs = p2.c_same.to_f64_lossy().max(0.0);
    let cp = p2.c_pair.to_f64_lossy().max(0.0);
    let root = cs.sqrt() + d as f64 * (cp / 2.0).sqrt();
    Ok(DiagonalBound {
        bound: root * root,
        cap: 0.5,
    })
}

/// `(cos θ/√d + sin θ/√2)²`, with `d c_same = cos²θ`, `d(d−1) c_pair = sin²θ`
/// at large `d`.
pub fn theta_bound(theta: f64, d: usize) -> f64 {
    (theta.cos() / (d as f64).sqrt() + theta.sin() / 2f64.sqrt()).powi(2)
}

/// The same with `sin θ / 2`, as the parametrized bound is sometimes quoted.
pub fn theta_bound_as_printed(theta: f64, d: usize) -> f64 {
    (theta.cos() / (d as f64).sqrt() + theta.sin() / 2.0).powi(2)
}

#[derive(Clone, Debug, Serialize)]
pub struct Applicability {
    /// `d ≥ d_min`
    pub d_large: bool,
    /// `d ≥ dilution · n √n`
    pub d_dilute: bool,
    pub d_min: usize,
    pub dilution_threshold: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub d: usize,
    #[serde(rename = "A_total")]
    pub a_total: f64,
    #[serde(rename = "A_single_sum")]
    pub a_single_sum: f64,
    #[serde(rename = "A_cross_sum")]
    pub a_cross_sum: f64,
    pub decomposition: ADecomposition,
    /// Every diagram in the support is free of isolated particles.
    pub no_isolated_particles: bool,
    pub offending_diagrams: Vec<YoungDiagram>,
    pub k_max: usize,
    /// `c / d²`
    pub a_limit: f64,
    pub a_within_limit: bool,
    pub applicability: Applicability,
    pub asserted_bound: Option<f64>,
    pub measured_f: Option<f64>,
    pub diagonal_bound: Option<f64>,
    pub max_compatible: usize,
    pub sqrt_half_n: f64,
}

/// Evaluate every ingredient of the `F ≤ 1/2` argument for `ψ`.
pub fn theorem1_check(psi: &PssState, hyp: &TheoremHypothesis) -> Result<BoundReport> {
    let (n, d) = (psi.n(), psi.d());
    let decomposition = a_superposition(psi)?;
    let offending: Vec<YoungDiagram> = psi.support().filter(|y| y.has_isolated_particles()).cloned().collect();
    let k_max = psi.support().map(YoungDiagram::k).max().unwrap_or(0);
    let c = hyp.coefficient(k_max);
    let a_limit = c / (d * d) as f64;
    let a_within_limit = decomposition.total.abs() <= a_limit;
    let dilution_threshold = hyp.dilution * n as f64 * (n as f64).sqrt();
    let applicability = Applicability {
        d_large: d >= hyp.d_min,
        d_dilute: d as f64 >= dilution_threshold,
        d_min: hyp.d_min,
        dilution_threshold,
    };
    let (p1, p2) = superposition_params(psi)?;
    let measured_f = mfa_fidelity_params(&p1, &p2).ok().map(|u| u.value);
    let diagonal_bound = sqrt_m_diag_bound(&p1, &p2, c, hyp.d_min).ok().map(|b| b.bound);
    let applicable = offending.is_empty() && a_within_limit && applicability.d_large;
    let cc = compatibility_count_bound(n)?;
    Ok(BoundReport {
        n,
        d,
        a_total: decomposition.total,
        a_single_sum: decomposition.single_sum,
        a_cross_sum: decomposition.cross_sum,
        decomposition,
        no_isolated_particles: offending.is_empty(),
        offending_diagrams: offending,
        k_max,
        a_limit,
        a_within_limit,
        applicability,
        asserted_bound: applicable.then_some(0.5),
        measured_f,
        diagonal_bound,
        max_compatible: cc.max_count,
        sqrt_half_n: cc.sqrt_half_n,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CompatibilityCount {
    pub n: usize,
    pub max_count: usize,
    pub argmax: YoungDiagram,
    pub sqrt_half_n: f64,
}

/// Largest number of diagrams compatible with a single `y ∈ 𝒴(n, n)`.
pub fn compatibility_count_bound(n: usize) -> Result<CompatibilityCount> {
    if n < 2 {
        return Err(Error::Domain("compatibility counts need n >= 2".into()));
    }
    let all = enumerate_diagrams(n, n)?;
    let mut best: Option<(usize, &YoungDiagram)> = None;
    for y in &all {
        let mut count = 0;
        for z in &all {
            if z != y && compatible(y, z)? {
                count += 1;
            }
        }
        if best.is_none_or(|(c, _)| count > c) {
            best = Some((count, y));
        }
    }
    let (max_count, argmax) = best.expect("at least one diagram");
    Ok(CompatibilityCount {
        n,
        max_count,
        argmax: argmax.clone(),
        sqrt_half_n: (n as f64 / 2.0).sqrt(),
    })
}

/// Exact `B1`-inflated copy of `p` used to exercise the PSD diagnostics.
pub fn inflate_b1<S: Scalar>(p: &Rho2Params<S>, factor: S) -> Rho2Params<S> {
    let mut q = p.clone();
    q.b1 = q.b1 * factor;
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::pss::{expand_basis_element, DenseBudget};
    use crate::rdm::{diagram_params, partial_trace, rectangular_rho_params, rho2_params_from_dense};
    use num_complex::Complex64;
    use num_traits::ToPrimitive;

    fn y(s: &str) -> YoungDiagram {
        s.parse().unwrap()
    }

    fn float_params(shape: &str, d: usize) -> (Rho1Params<f64>, Rho2Params<f64>) {
        let (p1, p2) = diagram_params(&y(shape), d).unwrap();
        (p1.map(|x| x.to_f64().unwrap()), p2.to_f64())
    }

    #[test]
    fn minor_examples() {
        let mut p = Rho2Params::<f64>::zero(2);
        p.c_pair = 0.25;
        let m = rho_pair_minor(&p);
        assert_eq!(m.dim(), 2);
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(m[(r, c)].re, 0.25);
            }
        }
        let mut p = Rho2Params::<f64>::zero(3);
        p.c_pair = 0.1;
        let m = rho_pair_minor(&p);
        // |01⟩ couples only to itself and |10⟩
        assert_eq!((m[(0, 0)].re, m[(0, 2)].re, m[(0, 1)].re), (0.1, 0.1, 0.0));
        let (_, p2) = float_params("1,1,1", 4);
        let report = minor_eigenvalues(&p2).unwrap();
        assert!(report.positivity_margin > -1e-12);
    }

    #[test]
    fn lambda_examples() {
        let mut p = Rho2Params::<f64>::zero(4);
        p.c_pair = 0.07;
        let r = minor_eigenvalues(&p).unwrap();
        assert_eq!(r.lambda1, 0.14);
        assert_eq!(r.lambda2, Some(0.14));
        let (_, p2) = float_params("1,1,1", 5);
        let r = minor_eigenvalues(&p2).unwrap();
        assert!(r.lambda1_deviation < 1e-10 && r.lambda2_deviation.unwrap() < 1e-10);
        let r = minor_eigenvalues(&Rho2Params::<f64>::zero(3)).unwrap();
        assert!(r.lambda2.is_none());
    }

    #[test]
    fn lambdas_for_rectangles() {
        for n in 2..=8 {
            for k in (1..=n).filter(|k| n % k == 0) {
                for d in 4.max(k)..=8 {
                    let (_, p2) = rectangular_rho_params(n, k, d).unwrap();
                    let r = minor_eigenvalues(&p2.to_f64()).unwrap();
                    assert!(r.lambda1_deviation < 1e-10, "({n},{k},{d})");
                    assert!(r.lambda2_deviation.unwrap() < 1e-10, "({n},{k},{d})");
                }
            }
        }
    }

    #[test]
    fn b_constraints() {
        let (_, p2) = rectangular_rho_params(6, 3, 5).unwrap();
        let r = b_constraint_report(&p2);
        assert!(r.all_minors_hold);
        assert_eq!(r.entries[1].magnitude, 0.0);
        assert_eq!(r.entries[4].magnitude, 0.0);
        let (_, p2) = diagram_params(&y("1,1"), 4).unwrap();
        assert!(b_constraint_report(&p2).all_minors_hold);
        let bad = inflate_b1(&p2, rat(100, 1));
        let r = b_constraint_report(&bad);
        assert!(!r.all_minors_hold && !r.entries[0].minor_holds);
    }

    #[test]
    fn diag_bound_examples() {
        let d = 12;
        let p1 = Rho1Params { d, a: 0.0 };
        let mut p2 = Rho2Params::<f64>::zero(d);
        p2.c_same = 1.0 / d as f64;
        let b = sqrt_m_diag_bound(&p1, &p2, 1.0, 10).unwrap();
        assert!((b.bound - 1.0 / d as f64).abs() < 1e-15);
        for d in [100, 10_000, 1_000_000] {
            let mut p2 = Rho2Params::<f64>::zero(d);
            p2.c_pair = 1.0 / (d as f64 * (d as f64 - 1.0));
            let b = sqrt_m_diag_bound(&Rho1Params { d, a: 0.0 }, &p2, 1.0, 10).unwrap();
            assert!(b.bound > 0.5 && b.bound - 0.5 < 1.0 / d as f64, "{}", b.bound);
        }
        assert!(matches!(sqrt_m_diag_bound(&p1, &p2, 1.0, 20), Err(Error::Inapplicable(_))));
        let (p1, p2) = float_params("2,2", 20);
        let b = sqrt_m_diag_bound(&p1, &p2, 4.0, 10).unwrap();
        let f = mfa_fidelity_params(&p1, &p2).unwrap().value;
        assert!(b.bound >= f, "{} < {f}", b.bound);
    }

    #[test]
    fn theta_branches() {
        assert!((theta_bound(0.0, 9) - 1.0 / 9.0).abs() < 1e-15);
        assert!((theta_bound(std::f64::consts::FRAC_PI_2, 9) - 0.5).abs() < 1e-15);
        assert!((theta_bound_as_printed(std::f64::consts::FRAC_PI_2, 9) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn theorem_reports() {
        let psi = PssState::basis(&y("2,2"), 20).unwrap();
        let r = theorem1_check(&psi, &TheoremHypothesis::default()).unwrap();
        assert!(r.no_isolated_particles && r.a_within_limit);
        assert!(r.measured_f.unwrap() <= 0.52);
        assert!((r.a_total - r.a_single_sum - r.a_cross_sum).abs() < 1e-12);
        let psi = PssState::basis(&y("1,1"), 20).unwrap();
        let r = theorem1_check(&psi, &TheoremHypothesis::default()).unwrap();
        assert!(!r.no_isolated_particles && r.asserted_bound.is_none());
        let h = Complex64::new(0.5f64.sqrt(), 0.0);
        let psi = PssState::new(6, 30, vec![(y("2,2,2"), h), (y("3,3"), h)]).unwrap();
        let r = theorem1_check(&psi, &TheoremHypothesis::default()).unwrap();
        assert!(r.decomposition.cross.is_empty() && r.a_cross_sum == 0.0);
        let psi = PssState::new(4, 30, vec![(y("2,2"), h), (y("3,1"), h)]).unwrap();
        let r = theorem1_check(&psi, &TheoremHypothesis::default()).unwrap();
        assert_eq!(r.decomposition.cross.len(), 1);
        assert!(r.a_cross_sum != 0.0);
    }

    #[test]
    fn compatibility_counts() {
        assert_eq!(compatibility_count_bound(2).unwrap().max_count, 1);
        let c = compatibility_count_bound(3).unwrap();
        assert_eq!((c.max_count, c.argmax.to_string()), (2, "2,1".to_string()));
        assert!(compatibility_count_bound(8).unwrap().max_count >= 2);
    }

    #[test]
    fn minor_matches_dense_submatrix() {
        let s = expand_basis_element::<f64>(&y("2,1,1"), 4, DenseBudget::default()).unwrap();
        let dense = partial_trace(&s, 2, DenseBudget::default()).unwrap();
        let (p2, _) = rho2_params_from_dense(&dense, 1e-12).unwrap();
        let minor = rho_pair_minor(&p2);
        let pairs: Vec<usize> = (0..16).filter(|r| r / 4 != r % 4).collect();
        for (a, &r) in pairs.iter().enumerate() {
            for (b, &c) in pairs.iter().enumerate() {
                assert!((minor[(a, b)] - dense[(r, c)]).norm() < 1e-14);
            }
        }
    }
}
