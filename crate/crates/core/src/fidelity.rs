//! Uhlmann fidelity of the mean field approximation `ρ₂ ≈ ρ₁ ⊗ ρ₁`.
//!
//! Three independent routes are provided:
//!
//! * the oracle, which works on the dense `dⁿ` state vector and never uses
//!   the symmetry parameterization;
//! * the params path, which evaluates the fidelity from `(A, B₁…B₅, C)`
//!   sector by sector (or densely, for cross-checking);
//! * closed forms for rectangular diagrams.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{hermitian_eigenvalues, matrix_sqrt_psd, trace_sqrt, CMatrix, HermitianMatrix};
use crate::pss::{pow_u128, DenseBudget, DenseState};
use crate::rdm::{partial_trace, rho1_dense_from_params, rho2_dense_from_params, suffix_groups, Rho1Params, Rho2Params};
use crate::scalar::Real;
use crate::sectors::sector_mfa_fidelity;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Oracle,
    Params,
    ClosedForm,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Oracle, Method::Params, Method::ClosedForm];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Params => "params",
            Method::ClosedForm => "closed_form",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Method::Oracle),
            "params" => Ok(Method::Params),
            "closed" | "closed_form" => Ok(Method::ClosedForm),
            other => Err(Error::Parse(format!(
                "unknown method '{other}' (expected oracle, params, closed or all)"
            ))),
        }
    }
}

/// A fidelity value with the eigenvalue mass discarded as numerical noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Uhlmann<T> {
    pub value: T,
    pub clipped_mass: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityResult {
    #[serde(rename = "F")]
    pub value: f64,
    pub method: Method,
    pub clipped_mass: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<String>,
}

impl FidelityResult {
    pub fn new(u: Uhlmann<f64>, method: Method) -> Self {
        Self {
            value: u.value,
            method,
            clipped_mass: u.clipped_mass,
            exact: None,
        }
    }
}

const TRACE_TOL: f64 = 1e-9;

fn check_unit_trace<T: Real>(m: &HermitianMatrix<T>, name: &str) -> Result<()> {
    let tr = m.trace_re().to_f64_lossy();
    if (tr - 1.0).abs() > TRACE_TOL {
        return domain(format!("{name} has trace {tr}, expected 1"));
    }
    Ok(())
}

fn finish<T: Real>(values: &[T]) -> Result<Uhlmann<T>> {
    let (s, clipped) = trace_sqrt(values)?;
    Ok(Uhlmann {
        value: s * s,
        clipped_mass: clipped,
    })
}

/// `F(A, B) = [Tr √(√A B √A)]²` for unit-trace PSD matrices.
pub fn fidelity<T: Real>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>) -> Result<Uhlmann<T>> {
    if a.dim() != b.dim() {
        return domain(format!("dimension mismatch: {} vs {}", a.dim(), b.dim()));
    }
    check_unit_trace(a, "first argument")?;
    check_unit_trace(b, "second argument")?;
    let (root, clipped_a) = matrix_sqrt_psd(a)?;
    b.eigenvalues().and_then(|v| trace_sqrt(&v))?;
    let m = b.sandwich(&root);
    let mut u = finish(&m.eigenvalues()?)?;
    u.clipped_mass = u.clipped_mass + clipped_a;
    Ok(u)
}

/// `[Tr √M]²` with `M = √(ρ₁⊗ρ₁) ρ₂ √(ρ₁⊗ρ₁)` from dense matrices.
pub fn mfa_fidelity_dense<T: Real>(rho1: &HermitianMatrix<T>, rho2: &HermitianMatrix<T>) -> Result<Uhlmann<T>> {
    let d = rho1.dim();
    if rho2.dim() != d * d {
        return domain(format!("rho2 must be {0}x{0} for d = {d}", d * d));
    }
    check_unit_trace(rho1, "rho1")?;
    check_unit_trace(rho2, "rho2")?;
    let (root, clipped) = matrix_sqrt_psd(rho1)?;
    rho2.eigenvalues().and_then(|v| trace_sqrt(&v))?;
    let m = rho2.sandwich(&root.kron(&root));
    let mut u = finish(&m.eigenvalues()?)?;
    u.clipped_mass = u.clipped_mass + clipped;
    Ok(u)
}

/// Params path, evaluated on the site-permutation sectors in `O(1)` work.
pub fn mfa_fidelity_params<T: Real>(p1: &Rho1Params<T>, p2: &Rho2Params<T>) -> Result<Uhlmann<T>> {
    let (value, clipped_mass) = sector_mfa_fidelity(p1, p2)?;
    Ok(Uhlmann { value, clipped_mass })
}

/// Params path through the dense `d² × d²` reconstruction of `M`.
pub fn mfa_fidelity_params_dense<T: Real>(p1: &Rho1Params<T>, p2: &Rho2Params<T>) -> Result<Uhlmann<T>> {
    if p1.d != p2.d {
        return domain(format!("rho1 has d = {} but rho2 has d = {}", p1.d, p2.d));
    }
    mfa_fidelity_dense(&rho1_dense_from_params(p1), &rho2_dense_from_params(p2))
}

/// `ρ₁` either as a dense matrix or, when every off-diagonal entry equals
/// one real constant `c`, as `D + cJ`.
enum OneBody<'a, T: Real> {
    Dense(&'a HermitianMatrix<T>),
    DiagonalPlusConstant { diag: Vec<T>, c: T },
}

impl<'a, T: Real> OneBody<'a, T> {
    fn new(rho: &'a HermitianMatrix<T>) -> Self {
        let d = rho.dim();
        if d < 2 {
            return OneBody::Dense(rho);
        }
        let c = rho[(0, 1)];
        let tol = T::epsilon() * T::lit(16.0) * rho.as_matrix().max_abs();
        let constant = c.im.abs() <= tol
            && (0..d).all(|i| (0..d).all(|j| i == j || (rho[(i, j)] - Complex::from(c.re)).norm() <= tol));
        if constant {
            let diag = (0..d).map(|i| rho[(i, i)].re - c.re).collect();
            OneBody::DiagonalPlusConstant { diag, c: c.re }
        } else {
            OneBody::Dense(rho)
        }
    }
}

/// `w = (ρ₁ ⊗ ρ₁) v` for a sparse `v`, computed as `ρ₁ V ρ₁ᵀ` on the
/// `d × d` reshaping `V`.
struct DenseProduct<T: Real> {
    d: usize,
    half: Vec<Complex<T>>,
    w: Vec<Complex<T>>,
    touched: Vec<bool>,
}

impl<T: Real> DenseProduct<T> {
    fn new(d: usize) -> Self {
        Self {
            d,
            half: vec![Complex::zero(); d * d],
            w: vec![Complex::zero(); d * d],
            touched: vec![false; d],
        }
    }

    fn apply(&mut self, rho: &HermitianMatrix<T>, entries: &[(usize, Complex<T>)]) -> &[Complex<T>] {
        let d = self.d;
        self.half.iter_mut().for_each(|z| *z = Complex::zero());
        self.w.iter_mut().for_each(|z| *z = Complex::zero());
        self.touched.iter_mut().for_each(|t| *t = false);
        for &(y, v) in entries {
            let (y1, y2) = (y / d, y % d);
            self.touched[y1] = true;
            for x2 in 0..d {
                self.half[y1 * d + x2] = self.half[y1 * d + x2] + v * rho[(x2, y2)];
            }
        }
        for y1 in (0..d).filter(|&y1| self.touched[y1]) {
            for x1 in 0..d {
                let c = rho[(x1, y1)];
                if c.is_zero() {
                    continue;
                }
                for x2 in 0..d {
                    self.w[x1 * d + x2] = self.w[x1 * d + x2] + c * self.half[y1 * d + x2];
                }
            }
        }
        &self.w
    }
}

/// `K_{ab} = ψ_a† (ρ₁ ⊗ ρ₁) ψ_b` for the suffix groups, entries sorted by index.
fn suffix_gram<T: Real>(rho1: &HermitianMatrix<T>, groups: &[Vec<(usize, Complex<T>)>]) -> CMatrix<T> {
    let d = rho1.dim();
    let r = groups.len();
    let mut k = CMatrix::zeros(r, r);
    match OneBody::new(rho1) {
        OneBody::Dense(rho) => {
            let mut product = DenseProduct::new(d);
            for b in 0..r {
                let w = product.apply(rho, &groups[b]);
                for a in 0..=b {
                    let acc = groups[a].iter().fold(Complex::zero(), |acc, &(x, u)| acc + u.conj() * w[x]);
                    k[(a, b)] = acc;
                    k[(b, a)] = acc.conj();
                }
            }
        }
        OneBody::DiagonalPlusConstant { diag, c } => {
            // (D + cJ)⊗(D + cJ) v = (D⊗D) v + c D R + c D C + c² T, with R, C the
            // row and column sums of V and T its total.
            let c = Complex::from(c);
            let mut rows = vec![Complex::zero(); d];
            let mut cols = vec![Complex::zero(); d];
            for b in 0..r {
                let mut total = Complex::zero();
                for &(y, v) in &groups[b] {
                    rows[y / d] = rows[y / d] + v;
                    cols[y % d] = cols[y % d] + v;
                    total = total + v;
                }
                let spread = |x: usize| {
                    let (x1, x2) = (x / d, x % d);
                    c * (rows[x1] * diag[x1] + cols[x2] * diag[x2]) + c * c * total
                };
                for a in 0..=b {
                    let mut acc = Complex::zero();
                    let mut other = groups[b].iter().peekable();
                    for &(x, u) in &groups[a] {
                        let mut wx = spread(x);
                        while let Some(&&(y, v)) = other.peek() {
                            if y > x {
                                break;
                            }
                            if y == x {
                                wx = wx + v * (diag[x / d] * diag[x % d]);
                            }
                            other.next();
                        }
                        acc = acc + u.conj() * wx;
                    }
                    k[(a, b)] = acc;
                    k[(b, a)] = acc.conj();
                }
                for &(y, _) in &groups[b] {
                    rows[y / d] = Complex::zero();
                    cols[y % d] = Complex::zero();
                }
            }
        }
    }
    k
}

/// Oracle fidelity straight from the dense state vector.
///
/// Writing `ρ₂ = Σ_s ψ_s ψ_s†` over the traced-out suffixes `s`, `M` and the
/// Gram matrix `K_{st} = ψ_s† (ρ₁⊗ρ₁) ψ_t` share their nonzero spectrum, so
/// whichever of the two is smaller is diagonalized.
pub fn oracle_mfa_fidelity<T: Real>(state: &DenseState<T>, budget: DenseBudget) -> Result<Uhlmann<T>> {
    let (n, d) = (state.n(), state.d());
    if n < 2 {
        return domain("two-party reductions need n >= 2");
    }
    let rho1 = partial_trace(state, 1, budget)?;
    let groups = suffix_groups(state, 2);
    let r = groups.len();
    let dim = d * d;
    if r <= dim {
        budget.check("suffix Gram matrix", pow_u128(r, 2).unwrap_or(u128::MAX))?;
        let k = suffix_gram(&rho1, &groups);
        return finish(&hermitian_eigenvalues(&k)?);
    }
    budget.check("two-party matrix", pow_u128(dim, 2).unwrap_or(u128::MAX))?;
    let (root, clipped) = matrix_sqrt_psd(&rho1)?;
    let mut l = CMatrix::zeros(dim, dim);
    let mut column: Vec<Complex<T>> = vec![Complex::zero(); dim];
    for group in &groups {
        column.iter_mut().for_each(|c| *c = Complex::zero());
        for &(y, v) in group {
            for (x, c) in column.iter_mut().enumerate() {
                *c = *c + root[(x / d, y / d)] * root[(x % d, y % d)] * v;
            }
        }
        for x in 0..dim {
            if column[x].is_zero() {
                continue;
            }
            for y in 0..dim {
                l[(x, y)] = l[(x, y)] + column[x] * column[y].conj();
            }
        }
    }
    let mut u = finish(&hermitian_eigenvalues(&l)?)?;
    u.clipped_mass = u.clipped_mass + clipped;
    Ok(u)
}

/// `(a √r₁ + b √r₂)² / c` with nonnegative integers and square-free radicands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicalForm {
    pub a: BigUint,
    pub r1: BigUint,
    pub b: BigUint,
    pub r2: BigUint,
    pub c: BigUint,
}

/// Split `r` as `s² t` with `t` square-free.
fn square_part(r: &BigUint) -> (BigUint, BigUint) {
    if r.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    let mut rest = r.clone();
    let mut outer = BigUint::one();
    let mut p = BigUint::from(2u32);
    while &p * &p <= rest {
        let sq = &p * &p;
        while (&rest % &sq).is_zero() {
            rest /= &sq;
            outer *= &p;
        }
        p += 1u32;
    }
    (outer, rest)
}

impl RadicalForm {
    pub fn new(a: impl Into<BigUint>, r1: impl Into<BigUint>, b: impl Into<BigUint>, r2: impl Into<BigUint>, c: impl Into<BigUint>) -> Self {
        let (s1, t1) = square_part(&r1.into());
        let (s2, t2) = square_part(&r2.into());
        let (mut a, mut r1, mut b, mut r2) = (a.into() * s1, t1, b.into() * s2, t2);
        if a.is_zero() {
            r1 = BigUint::one();
        }
        if b.is_zero() {
            r2 = BigUint::one();
        }
        if r1 == r2 && !b.is_zero() {
            a += std::mem::take(&mut b);
            r2 = BigUint::one();
        }
        Self { a, r1, b, r2, c: c.into() }
    }

    pub fn value(&self) -> f64 {
        let f = |x: &BigUint| x.to_f64().unwrap_or(f64::NAN);
        let s = f(&self.a) * f(&self.r1).sqrt() + f(&self.b) * f(&self.r2).sqrt();
        s * s / f(&self.c)
    }

    /// The exact value when no irrational part survives.
    pub fn as_rational(&self) -> Option<BigRational> {
        let sq = |x: &BigUint, r: &BigUint| crate::exact::ratio(&(x * x * r), &self.c);
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => Some(sq(&self.a, &self.r1)),
            (true, false) => Some(sq(&self.b, &self.r2)),
            _ => None,
        }
    }
}

impl fmt::Display for RadicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |coef: &BigUint, r: &BigUint| -> Option<String> {
            match (coef.is_zero(), coef.is_one(), r.is_one()) {
                (true, _, _) => None,
                (_, _, true) => Some(coef.to_string()),
                (_, true, false) => Some(format!("sqrt({r})")),
                _ => Some(format!("{coef}*sqrt({r})")),
            }
        };
        let parts: Vec<String> = [term(&self.a, &self.r1), term(&self.b, &self.r2)].into_iter().flatten().collect();
        match parts.len() {
            0 => write!(f, "0"),
            _ => write!(f, "({})^2/{}", parts.join(" + "), self.c),
        }
    }
}

/// Which rectangular closed form applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RectCase {
    /// `k < n/2`
    BelowHalf,
    /// `k = n/2`
    Half,
    /// `k = n = d`
    Square,
}

pub fn rect_case(n: usize, k: usize, d: usize) -> Result<RectCase> {
    if n < 2 || k == 0 || n % k != 0 {
        return domain(format!(
            "rectangular diagram requires divisibility and n >= 2 (n = {n}, k = {k})"
        ));
    }
    if k > d {
        return domain(format!("k = {k} rows exceed d = {d} sites"));
    }
    match (2 * k).cmp(&n) {
        std::cmp::Ordering::Less => Ok(RectCase::BelowHalf),
        std::cmp::Ordering::Equal => Ok(RectCase::Half),
        std::cmp::Ordering::Greater if k == n && d == n => Ok(RectCase::Square),
        std::cmp::Ordering::Greater => Err(Error::NotCovered(format!(
            "no closed form for k = n = {n} at d = {d}; only d = n and the d -> infinity limit are known"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedForm {
    pub case: RectCase,
    pub form: RadicalForm,
    pub value: f64,
}

/// Closed-form MFA fidelity of the rectangular diagram `y(k)`.
pub fn closed_form_rect_fidelity(n: usize, k: usize, d: usize) -> Result<ClosedForm> {
    let case = rect_case(n, k, d)?;
    let big = |x: usize| BigUint::from(x);
    let form = match case {
        RectCase::BelowHalf => RadicalForm::new(
            1u32,
            big(d - 1) * big(n) * big(k - 1),
            1u32,
            big(2 * (n - k)),
            big(2 * d) * big(k) * big(n - 1),
        ),
        RectCase::Half => RadicalForm::new(
            1u32,
            big(2 + 2 * d - n),
            big(d + 1),
            big(d - 1) * big(n - 2),
            big(2) * big(d).pow(3) * big(n - 1),
        ),
        RectCase::Square => RadicalForm::new(1u32, big(d - 1), 0u32, 0u32, big(2 * d)),
    };
    let value = form.value();
    Ok(ClosedForm { case, form, value })
}

/// The `k < n/2` expression `((d−1)√(n(k−1)) + √(2d(n−k)))² / (2d²k(n−1))`
/// in the form it is commonly quoted. It disagrees with direct evaluation
/// (e.g. `0.5199` against `0.5971` at `n = 6, k = 2, d = 5`) and is kept for
/// comparison only.
pub fn as_printed_below_half(n: usize, k: usize, d: usize) -> Result<RadicalForm> {
    if rect_case(n, k, d)? != RectCase::BelowHalf {
        return domain("expression applies to k < n/2 only");
    }
    let big = |x: usize| BigUint::from(x);
    Ok(RadicalForm::new(
        big(d - 1),
        big(n) * big(k - 1),
        1u32,
        big(2 * d) * big(n - k),
        big(2) * big(d).pow(2) * big(k) * big(n - 1),
    ))
}

/// `d → ∞` limit. For `k = n` the two regimes differ: `d = n → ∞` gives
/// `1/2`, a fixed `n ≪ d` gives the product state and `1`.
pub fn asymptotic_rect_fidelity(n: usize, k: usize, dilute: bool) -> Result<f64> {
    if n < 2 || k == 0 || n % k != 0 {
        return domain(format!(
            "rectangular diagram requires divisibility and n >= 2 (n = {n}, k = {k})"
        ));
    }
    let (nf, kf) = (n as f64, k as f64);
    Ok(match (2 * k).cmp(&n) {
        std::cmp::Ordering::Less => nf * (kf - 1.0) / (2.0 * kf * (nf - 1.0)),
        std::cmp::Ordering::Equal => (nf - 2.0) / (2.0 * (nf - 1.0)),
        std::cmp::Ordering::Greater if dilute => 1.0,
        std::cmp::Ordering::Greater => 0.5,
    })
}
