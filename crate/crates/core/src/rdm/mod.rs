//! One- and two-party reduced density matrices of PSS states.
//!
//! Party and site symmetry force `ρ₁ = I/d + A (J − I)` and leave `ρ₂` with
//! seven independent entries. Entries are labelled by the pattern of equal
//! indices in `{ρ₂}_{ij,kl}` (row `ij`, column `kl`, distinct letters meaning
//! distinct sites):
//!
//! | name     | entries                              |
//! |----------|--------------------------------------|
//! | `c_same` | `ii,ii`                              |
//! | `c_pair` | `ij,ij` and `ij,ji`                  |
//! | `b1`     | `ij,kl`                              |
//! | `b2`     | `ii,kl` (conjugated at `kl,ii`)      |
//! | `b3`     | `ij,il`, `ij,li`, `ji,il`, `ji,li`   |
//! | `b4`     | `ii,kk`                              |
//! | `b5`     | `ii,il`, `ii,li` (conjugated below)  |
//!
//! Older write-ups label `c_pair` as `C₁` and `c_same` as `C₂` in one place
//! and the other way round in another; only the names above are used here.

pub mod counting;
pub mod params;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{CMatrix, HermitianMatrix};
use crate::pss::{pow_u128, DenseBudget, DenseState};
use crate::scalar::{Real, Scalar};

pub use params::{
    a_single_diagram, a_superposition, diagram_params, rectangular_rho_params, superposition_params,
    ADecomposition,
};

#[derive(Clone, Debug, PartialEq)]
pub struct Rho1Params<S: Scalar> {
    pub d: usize,
    /// Common off-diagonal element.
    pub a: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rho2Params<S: Scalar> {
    pub d: usize,
    pub b1: S,
    pub b2: Complex<S>,
    pub b3: S,
    pub b4: S,
    pub b5: Complex<S>,
    pub c_pair: S,
    pub c_same: S,
}

impl<S: Scalar> Rho1Params<S> {
    pub fn map<U: Scalar>(&self, f: impl Fn(&S) -> U) -> Rho1Params<U> {
        Rho1Params { d: self.d, a: f(&self.a) }
    }

    /// `(λ_uniform, λ_complement)`: eigenvalues on `Σ|i⟩` and on its complement.
    pub fn eigenvalues(&self) -> (S, S) {
        let d = S::from_count(self.d);
        let inv = S::one() / d.clone();
        let uniform = inv.clone() + (d - S::one()) * self.a.clone();
        (uniform, inv - self.a.clone())
    }
}

impl<S: Scalar> Rho2Params<S> {
    pub fn zero(d: usize) -> Self {
        Self {
            d,
            b1: S::zero(),
            b2: Complex::new(S::zero(), S::zero()),
            b3: S::zero(),
            b4: S::zero(),
            b5: Complex::new(S::zero(), S::zero()),
            c_pair: S::zero(),
            c_same: S::zero(),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&S) -> U) -> Rho2Params<U> {
        let fc = |z: &Complex<S>| Complex::new(f(&z.re), f(&z.im));
        Rho2Params {
            d: self.d,
            b1: f(&self.b1),
            b2: fc(&self.b2),
            b3: f(&self.b3),
            b4: f(&self.b4),
            b5: fc(&self.b5),
            c_pair: f(&self.c_pair),
            c_same: f(&self.c_same),
        }
    }

    pub fn to_f64(&self) -> Rho2Params<f64> {
        self.map(|x| x.to_f64_lossy())
    }

    /// The `ρ₁` off-diagonal implied by tracing out the second party,
    /// `(d − 2) b3 + 2 Re b5`.
    pub fn induced_a(&self) -> S {
        if self.d < 2 {
            return S::zero();
        }
        let two = S::from_count(2);
        S::from_count(self.d - 2) * self.b3.clone() + two * self.b5.re.clone()
    }

    /// `Tr ρ₂ = d c_same + d (d − 1) c_pair`.
    pub fn trace(&self) -> S {
        let d = S::from_count(self.d);
        d.clone() * self.c_same.clone() + d.clone() * (d - S::one()) * self.c_pair.clone()
    }

    pub fn value(&self, class: EntryClass) -> Complex<S> {
        let real = |x: &S| Complex::new(x.clone(), S::zero());
        match class {
            EntryClass::CSame => real(&self.c_same),
            EntryClass::CPair => real(&self.c_pair),
            EntryClass::B1 => real(&self.b1),
            EntryClass::B2 => self.b2.clone(),
            EntryClass::B2Conj => self.b2.conj(),
            EntryClass::B3 => real(&self.b3),
            EntryClass::B4 => real(&self.b4),
            EntryClass::B5 => self.b5.clone(),
            EntryClass::B5Conj => self.b5.conj(),
        }
    }
}

/// Symmetry class of a two-party matrix element `{ρ₂}_{ij,kl}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EntryClass {
    CSame,
    CPair,
    B1,
    B2,
    B2Conj,
    B3,
    B4,
    B5,
    B5Conj,
}

impl EntryClass {
    pub const BASE: [EntryClass; 7] = [
        EntryClass::CSame,
        EntryClass::CPair,
        EntryClass::B1,
        EntryClass::B2,
        EntryClass::B3,
        EntryClass::B4,
        EntryClass::B5,
    ];

    pub fn classify(i: usize, j: usize, k: usize, l: usize) -> Self {
        match (i == j, k == l) {
            (true, true) => {
                if i == k {
                    Self::CSame
                } else {
                    Self::B4
                }
            }
            (true, false) => {
                if i == k || i == l {
                    Self::B5
                } else {
                    Self::B2
                }
            }
            (false, true) => {
                if k == i || k == j {
                    Self::B5Conj
                } else {
                    Self::B2Conj
                }
            }
            (false, false) => {
                let shared = [k, l].iter().filter(|&&x| x == i || x == j).count();
                match shared {
                    2 => Self::CPair,
                    1 => Self::B3,
                    _ => Self::B1,
                }
            }
        }
    }

    /// Row and column index pair of a canonical element of the class.
    pub fn representative(self) -> ([usize; 2], [usize; 2]) {
        match self {
            Self::CSame => ([0, 0], [0, 0]),
            Self::CPair => ([0, 1], [0, 1]),
            Self::B1 => ([0, 1], [2, 3]),
            Self::B2 => ([0, 0], [1, 2]),
            Self::B2Conj => ([1, 2], [0, 0]),
            Self::B3 => ([0, 1], [0, 2]),
            Self::B4 => ([0, 0], [1, 1]),
            Self::B5 => ([0, 0], [0, 1]),
            Self::B5Conj => ([0, 1], [0, 0]),
        }
    }

    /// Number of distinct sites an element of the class involves.
    pub fn sites_needed(self) -> usize {
        let (r, c) = self.representative();
        r.iter().chain(&c).max().map_or(0, |m| m + 1)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::CSame => "C_same",
            Self::CPair => "C_pair",
            Self::B1 => "B1",
            Self::B2 | Self::B2Conj => "B2",
            Self::B3 => "B3",
            Self::B4 => "B4",
            Self::B5 | Self::B5Conj => "B5",
        }
    }
}

pub fn rho1_dense_from_params<T: Real>(p: &Rho1Params<T>) -> HermitianMatrix<T> {
    let d = p.d;
    let diag = T::one() / T::from_count(d);
    let m = CMatrix::from_fn(d, d, |i, j| Complex::new(if i == j { diag } else { p.a }, T::zero()));
    HermitianMatrix::new(m, HermitianMatrix::<T>::DEFAULT_TOL).expect("real symmetric")
}

pub fn rho2_dense_from_params<T: Real>(p: &Rho2Params<T>) -> HermitianMatrix<T> {
    let d = p.d;
    let m = CMatrix::from_fn(d * d, d * d, |r, c| {
        p.value(EntryClass::classify(r / d, r % d, c / d, c % d))
    });
    HermitianMatrix::new(m, 1e-12).expect("class placement is Hermitian")
}

fn pss_error<T: Real>(entry: String, expected: Complex<T>, found: Complex<T>) -> Error {
    Error::NotPss {
        entry,
        expected: expected.to_string(),
        found: found.to_string(),
        deviation: (expected - found).norm().to_f64_lossy(),
    }
}

/// Read `A` off a one-party reduction, checking the symmetric structure
/// within `tol`. Returns the parameters and the largest deviation seen.
pub fn rho1_params_from_dense<T: Real>(rho: &HermitianMatrix<T>, tol: f64) -> Result<(Rho1Params<T>, T)> {
    let d = rho.dim();
    let a = if d >= 2 { rho[(0, 1)].re } else { T::zero() };
    let diag = Complex::new(T::one() / T::from_count(d), T::zero());
    let off = Complex::new(a, T::zero());
    let mut worst = T::zero();
    for i in 0..d {
        for j in 0..d {
            let expected = if i == j { diag } else { off };
            let found = rho[(i, j)];
            let dev = (expected - found).norm();
            if dev > T::lit(tol) {
                return Err(pss_error(format!("rho1[{i}][{j}]"), expected, found));
            }
            worst = worst.max(dev);
        }
    }
    Ok((Rho1Params { d, a }, worst))
}

/// Read the seven constants off a two-party reduction and check every entry
/// against its class within `tol`.
pub fn rho2_params_from_dense<T: Real>(rho: &HermitianMatrix<T>, tol: f64) -> Result<(Rho2Params<T>, T)> {
    let dim = rho.dim();
    let d = (dim as f64).sqrt().round() as usize;
    if d * d != dim {
        return domain(format!("{dim} is not a square dimension"));
    }
    let at = |class: EntryClass| -> Complex<T> {
        if class.sites_needed() > d {
            return Complex::zero();
        }
        let (r, c) = class.representative();
        rho[(r[0] * d + r[1], c[0] * d + c[1])]
    };
    let p = Rho2Params {
        d,
        b1: at(EntryClass::B1).re,
        b2: at(EntryClass::B2),
        b3: at(EntryClass::B3).re,
        b4: at(EntryClass::B4).re,
        b5: at(EntryClass::B5),
        c_pair: at(EntryClass::CPair).re,
        c_same: at(EntryClass::CSame).re,
    };
    let mut worst = T::zero();
    for r in 0..dim {
        for c in 0..dim {
            let class = EntryClass::classify(r / d, r % d, c / d, c % d);
            let expected = p.value(class);
            let found = rho[(r, c)];
            let dev = (expected - found).norm();
            if dev > T::lit(tol) {
                let entry = format!("rho2[{}{}][{}{}] ({})", r / d, r % d, c / d, c % d, class.name());
                return Err(pss_error(entry, expected, found));
            }
            worst = worst.max(dev);
        }
    }
    Ok((p, worst))
}

/// Nonzero amplitudes grouped by the traced-out suffix, for a cut after
/// `keep` parties. Each group lists `(prefix index, amplitude)`.
pub fn suffix_groups<T: Real>(s: &DenseState<T>, keep: usize) -> Vec<Vec<(usize, Complex<T>)>> {
    let rest = s.d().pow((s.n() - keep) as u32);
    let mut groups: Vec<Vec<(usize, Complex<T>)>> = vec![Vec::new(); rest];
    for (idx, a) in s.amplitudes().iter().enumerate() {
        if !a.is_zero() {
            groups[idx % rest].push((idx / rest, *a));
        }
    }
    groups.retain(|g| !g.is_empty());
    groups
}

/// `Tr_{keep+1..n} |ψ⟩⟨ψ|` as a dense `d^keep × d^keep` matrix.
pub fn partial_trace<T: Real>(s: &DenseState<T>, keep: usize, budget: DenseBudget) -> Result<HermitianMatrix<T>> {
    if keep == 0 || keep > s.n() {
        return domain(format!("keep must be in 1..={} (got {keep})", s.n()));
    }
    let dim = s.d().pow(keep as u32);
    budget.check("reduced density matrix", pow_u128(dim, 2).unwrap_or(u128::MAX))?;
    let mut m = CMatrix::zeros(dim, dim);
    for group in suffix_groups(s, keep) {
        for &(a, x) in &group {
            for &(b, y) in &group {
                m[(a, b)] = m[(a, b)] + x * y.conj();
            }
        }
    }
    // Entries (a, b) and (b, a) are sums of exact conjugates in the same
    // order, so m is Hermitian to the bit.
    Ok(HermitianMatrix::assume_hermitian(m))
}

/// Trace out the second party of a two-party matrix.
pub fn trace_second<T: Real>(rho2: &HermitianMatrix<T>, d: usize) -> HermitianMatrix<T> {
    let m = CMatrix::from_fn(d, d, |i, j| {
        (0..d).fold(Complex::zero(), |acc, k| acc + rho2[(i * d + k, j * d + k)])
    });
    HermitianMatrix::symmetrized(m, 1e-12).expect("partial trace of Hermitian is Hermitian")
}

/// `max(‖SWAP ρ − ρ‖, ‖ρ SWAP − ρ‖)` entrywise.
pub fn swap_defect<T: Real>(rho2: &HermitianMatrix<T>, d: usize) -> T {
    let swap = |r: usize| (r % d) * d + r / d;
    let mut worst = T::zero();
    for r in 0..d * d {
        for c in 0..d * d {
            let x = rho2[(r, c)];
            worst = worst.max((rho2[(swap(r), c)] - x).norm());
            worst = worst.max((rho2[(r, swap(c))] - x).norm());
        }
    }
    worst
}

/// `max_ν ‖(P_ν ⊗ P_ν) ρ (P_ν ⊗ P_ν)† − ρ‖` over adjacent site transpositions.
pub fn site_defect<T: Real>(rho2: &HermitianMatrix<T>, d: usize) -> T {
    let mut worst = T::zero();
    for s in 0..d.saturating_sub(1) {
        let p = |x: usize| if x == s { s + 1 } else if x == s + 1 { s } else { x };
        let img = |r: usize| p(r / d) * d + p(r % d);
        for r in 0..d * d {
            for c in 0..d * d {
                worst = worst.max((rho2[(img(r), img(c))] - rho2[(r, c)]).norm());
            }
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexRationalJson {
    pub re: RationalJson,
    pub im: RationalJson,
}

/// Wire form of exact parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsJson {
    pub d: usize,
    #[serde(rename = "A")]
    pub a: RationalJson,
    #[serde(rename = "B1")]
    pub b1: RationalJson,
    #[serde(rename = "B2")]
    pub b2: ComplexRationalJson,
    #[serde(rename = "B3")]
    pub b3: RationalJson,
    #[serde(rename = "B4")]
    pub b4: RationalJson,
    #[serde(rename = "B5")]
    pub b5: ComplexRationalJson,
    #[serde(rename = "C_same")]
    pub c_same: RationalJson,
    #[serde(rename = "C_pair")]
    pub c_pair: RationalJson,
}

fn rat_json(r: &BigRational) -> RationalJson {
    RationalJson {
        num: r.numer().to_string(),
        den: r.denom().to_string(),
    }
}

fn rat_parse(r: &RationalJson) -> Result<BigRational> {
    let num = r.num.parse().map_err(|_| Error::Parse(format!("bad numerator '{}'", r.num)))?;
    let den: num_bigint::BigInt = r.den.parse().map_err(|_| Error::Parse(format!("bad denominator '{}'", r.den)))?;
    if den.is_zero() {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(BigRational::new(num, den))
}

fn complex_json(z: &Complex<BigRational>) -> ComplexRationalJson {
    ComplexRationalJson {
        re: rat_json(&z.re),
        im: rat_json(&z.im),
    }
}

impl ParamsJson {
    pub fn new(rho1: &Rho1Params<BigRational>, rho2: &Rho2Params<BigRational>) -> Self {
        Self {
            d: rho2.d,
            a: rat_json(&rho1.a),
            b1: rat_json(&rho2.b1),
            b2: complex_json(&rho2.b2),
            b3: rat_json(&rho2.b3),
            b4: rat_json(&rho2.b4),
            b5: complex_json(&rho2.b5),
            c_same: rat_json(&rho2.c_same),
            c_pair: rat_json(&rho2.c_pair),
        }
    }

    pub fn to_params(&self) -> Result<(Rho1Params<BigRational>, Rho2Params<BigRational>)> {
        let c = |z: &ComplexRationalJson| -> Result<Complex<BigRational>> {
            Ok(Complex::new(rat_parse(&z.re)?, rat_parse(&z.im)?))
        };
        Ok((
            Rho1Params {
                d: self.d,
                a: rat_parse(&self.a)?,
            },
            Rho2Params {
                d: self.d,
                b1: rat_parse(&self.b1)?,
                b2: c(&self.b2)?,
                b3: rat_parse(&self.b3)?,
                b4: rat_parse(&self.b4)?,
                b5: c(&self.b5)?,
                c_pair: rat_parse(&self.c_pair)?,
                c_same: rat_parse(&self.c_same)?,
            },
        ))
    }
}

/// Whether `rho2` has unit trace `d c_same + d(d−1) c_pair = 1` exactly.
pub fn exactly_normalized(rho2: &Rho2Params<BigRational>) -> bool {
    rho2.trace() == BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::pss::expand_basis_element;
    use crate::young::YoungDiagram;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn y(s: &str) -> YoungDiagram {
        s.parse().unwrap()
    }

    fn reduced(shape: &str, d: usize, keep: usize) -> HermitianMatrix<f64> {
        let s = expand_basis_element::<f64>(&y(shape), d, DenseBudget::default()).unwrap();
        partial_trace(&s, keep, DenseBudget::default()).unwrap()
    }

    #[test]
    fn classify_covers_all_patterns() {
        use EntryClass::*;
        assert_eq!(EntryClass::classify(0, 0, 0, 0), CSame);
        assert_eq!(EntryClass::classify(0, 1, 0, 1), CPair);
        assert_eq!(EntryClass::classify(0, 1, 1, 0), CPair);
        assert_eq!(EntryClass::classify(0, 1, 2, 3), B1);
        assert_eq!(EntryClass::classify(0, 0, 1, 2), B2);
        assert_eq!(EntryClass::classify(1, 2, 0, 0), B2Conj);
        for (k, l) in [(0, 2), (2, 0)] {
            assert_eq!(EntryClass::classify(0, 1, k, l), B3);
            assert_eq!(EntryClass::classify(1, 0, k, l), B3);
        }
        assert_eq!(EntryClass::classify(0, 0, 1, 1), B4);
        assert_eq!(EntryClass::classify(0, 0, 0, 1), B5);
        assert_eq!(EntryClass::classify(0, 0, 1, 0), B5);
        assert_eq!(EntryClass::classify(0, 1, 0, 0), B5Conj);
        for c in EntryClass::BASE {
            let (r, k) = c.representative();
            assert_eq!(EntryClass::classify(r[0], r[1], k[0], k[1]), c);
        }
    }

    #[test]
    fn partial_trace_examples() {
        for shape in ["1,1", "2"] {
            let r = reduced(shape, 2, 1);
            let half = CMatrix::<f64>::identity(2).scale(0.5);
            assert!(r.as_matrix().max_abs_diff(&half) < 1e-15);
        }
        let r2 = reduced("2,1", 3, 2);
        let (p, dev) = rho2_params_from_dense(&r2, 1e-10).unwrap();
        assert!(dev < 1e-15);
        let back = rho2_dense_from_params(&p);
        assert!(back.as_matrix().max_abs_diff(r2.as_matrix()) < 1e-15);
    }

    #[test]
    fn rho1_extraction_examples() {
        let half = HermitianMatrix::new(CMatrix::<f64>::identity(2).scale(0.5), 1e-13).unwrap();
        let (p, _) = rho1_params_from_dense(&half, 1e-10).unwrap();
        assert_eq!(p.a, 0.0);
        let (p, _) = rho1_params_from_dense(&reduced("2", 2, 1), 1e-10).unwrap();
        assert!(p.a.abs() < 1e-15);
        let (p, _) = rho1_params_from_dense(&reduced("1,1", 4, 1), 1e-10).unwrap();
        assert!((p.a - 1.0 / 6.0).abs() < 1e-15);
        // a non-PSS matrix is rejected with the offending entry
        let bad = HermitianMatrix::from_real_symmetric(2, &[0.7, 0.0, 0.0, 0.3]).unwrap();
        let err = rho1_params_from_dense(&bad, 1e-10).unwrap_err().to_string();
        assert!(err.contains("rho1[0][0]"), "{err}");
    }

    #[test]
    fn rho2_extraction_examples() {
        let (p, _) = rho2_params_from_dense(&reduced("2", 2, 2), 1e-10).unwrap();
        assert!((p.c_same - 0.5).abs() < 1e-15 && (p.b4 - 0.5).abs() < 1e-15);
        assert!(p.c_pair.abs() < 1e-15 && p.b1 == 0.0 && p.b3 == 0.0 && p.b5.norm() < 1e-15);
        let (p, _) = rho2_params_from_dense(&reduced("1,1", 4, 2), 1e-10).unwrap();
        assert!((p.c_pair - 1.0 / 12.0).abs() < 1e-15 && p.c_same.abs() < 1e-15);
        let (p, _) = rho2_params_from_dense(&reduced("2,1", 3, 2), 1e-10).unwrap();
        let (p1, _) = rho1_params_from_dense(&reduced("2,1", 3, 1), 1e-10).unwrap();
        assert!((p.induced_a() - p1.a).abs() < 1e-14);
        assert!((p.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dense_placement_examples() {
        let mut p = Rho2Params::<f64>::zero(2);
        p.c_pair = 0.25;
        p.c_same = 0.25;
        let m = rho2_dense_from_params(&p);
        for r in 0..4 {
            assert_eq!(m[(r, r)].re, 0.25);
        }
        assert_eq!(m[(1, 2)].re, 0.25);
        assert_eq!(m[(2, 1)].re, 0.25);
        assert_eq!(m[(0, 3)].re, 0.0);
        let mut q = Rho2Params::<f64>::zero(2);
        q.c_same = 0.5;
        q.b4 = 0.5;
        let m = rho2_dense_from_params(&q);
        assert_eq!((m[(0, 0)].re, m[(0, 3)].re, m[(3, 0)].re, m[(3, 3)].re), (0.5, 0.5, 0.5, 0.5));
        assert_eq!(m[(1, 1)].re, 0.0);
    }

    #[test]
    fn params_json_round_trip() {
        let mut r2 = Rho2Params::<BigRational>::zero(4);
        r2.c_pair = rat(1, 12);
        r2.b2 = Complex::new(rat(-1, 7), rat(3, 5));
        let r1 = Rho1Params { d: 4, a: rat(1, 6) };
        let j = ParamsJson::new(&r1, &r2);
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains(r#""A":{"num":"1","den":"6"}"#), "{text}");
        assert!(text.contains(r#""B2":{"re":{"num":"-1","den":"7"},"im":{"num":"3","den":"5"}}"#), "{text}");
        let back: ParamsJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_params().unwrap(), (r1, r2));
    }

    fn random_params(d: usize, raw: &[f64]) -> Rho2Params<f64> {
        Rho2Params {
            d,
            b1: raw[0],
            b2: Complex64::new(raw[1], raw[2]),
            b3: raw[3],
            b4: raw[4],
            b5: Complex64::new(raw[5], raw[6]),
            c_pair: raw[7],
            c_same: raw[8],
        }
    }

    proptest! {
        #[test]
        fn dense_round_trip(d in 1usize..7, raw in prop::collection::vec(-1.0f64..1.0, 9)) {
            let p = random_params(d, &raw);
            let m = rho2_dense_from_params(&p);
            let (q, dev) = rho2_params_from_dense(&m, 1e-12).unwrap();
            prop_assert_eq!(dev, 0.0);
            // classes that do not fit in d sites read back as zero
            let expected = rho2_dense_from_params(&q);
            prop_assert_eq!(expected.as_matrix(), m.as_matrix());
            prop_assert_eq!(swap_defect(&m, d), 0.0);
            prop_assert_eq!(site_defect(&m, d), 0.0);
        }
    }
}
