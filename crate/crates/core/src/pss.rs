//! PSS states in the Young-diagram basis and their dense expansions.
//!
//! Site and party labels are 0-based internally. A dense state over `n`
//! parties stores `dⁿ` amplitudes, indexed row-major with the first party
//! most significant.

use std::collections::BTreeSet;

use num_complex::{Complex, Complex64};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::Real;
use crate::young::{enumerate_diagrams, YoungDiagram};

/// Upper bound on the number of amplitudes (or matrix entries) a dense
/// computation may allocate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DenseBudget {
    pub max_entries: usize,
}

impl Default for DenseBudget {
    fn default() -> Self {
        Self {
            max_entries: 10_000_000,
        }
    }
}

impl DenseBudget {
    pub fn new(max_entries: usize) -> Self {
        Self { max_entries }
    }

    pub fn check(&self, what: &'static str, needed: u128) -> Result<()> {
        if needed > self.max_entries as u128 {
            return Err(Error::Budget {
                what,
                needed,
                limit: self.max_entries,
            });
        }
        Ok(())
    }

    /// Whether a `dⁿ` vector fits.
    pub fn fits(&self, n: usize, d: usize) -> bool {
        pow_u128(d, n).is_some_and(|v| v <= self.max_entries as u128)
    }
}

pub(crate) fn pow_u128(base: usize, exp: usize) -> Option<u128> {
    (base as u128).checked_pow(u32::try_from(exp).ok()?)
}

fn norm_tol<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(1e3))
}

/// A state vector in the computational basis of `(C^d)^{⊗n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState<T: Real> {
    n: usize,
    d: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> DenseState<T> {
    /// Wrap a unit vector of length `dⁿ`.
    pub fn new(n: usize, d: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        if n == 0 || d == 0 {
            return domain(format!("need n >= 1 and d >= 1 (got n = {n}, d = {d})"));
        }
        if pow_u128(d, n) != Some(amps.len() as u128) {
            return domain(format!("{} amplitudes given, expected {d}^{n}", amps.len()));
        }
        let s = Self { n, d, amps };
        let dev = (s.norm_sqr() - T::one()).abs();
        if dev > norm_tol::<T>() {
            return domain(format!("state is not normalized: |norm² - 1| = {dev}"));
        }
        Ok(s)
    }

    /// A single computational basis string.
    pub fn basis_string(n: usize, d: usize, sites: &[usize], budget: DenseBudget) -> Result<Self> {
        if sites.len() != n || sites.iter().any(|&s| s >= d) {
            return domain("basis string must have n entries, each below d");
        }
        let mut s = Self::zeros(n, d, budget)?;
        let idx = s.index_of(sites);
        s.amps[idx] = Complex::new(T::one(), T::zero());
        Ok(s)
    }

    fn zeros(n: usize, d: usize, budget: DenseBudget) -> Result<Self> {
        if n == 0 || d == 0 {
            return domain(format!("need n >= 1 and d >= 1 (got n = {n}, d = {d})"));
        }
        let dim = pow_u128(d, n).unwrap_or(u128::MAX);
        budget.check("dense state", dim)?;
        Ok(Self {
            n,
            d,
            amps: vec![Complex::zero(); dim as usize],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn index_of(&self, sites: &[usize]) -> usize {
        sites.iter().fold(0, |acc, &s| acc * self.d + s)
    }

    pub fn sites_of(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for slot in out.iter_mut().rev() {
            *slot = idx % self.d;
            idx /= self.d;
        }
        out
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!((self.n, self.d), (other.n, other.d));
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * *b)
    }
}

/// Call `f` on every string in the orbit of `y`, each exactly once.
///
/// Sites are first assigned row lengths (one representative per multiset),
/// then every arrangement of that multiset over the parties is produced, so
/// the work is proportional to the orbit size rather than `dⁿ`.
pub fn for_each_orbit_string(y: &YoungDiagram, d: usize, mut f: impl FnMut(&[usize])) {
    if y.k() > d {
        return;
    }
    let mut remaining = y.length_counts();
    let mut occupied: Vec<(usize, usize)> = Vec::with_capacity(y.k());
    let mut string = vec![0; y.n()];
    assign_sites(0, d, y.k(), &mut remaining, &mut occupied, &mut string, &mut f);
}

fn assign_sites(
    site: usize,
    d: usize,
    rows_left: usize,
    remaining: &mut [usize],
    occupied: &mut Vec<(usize, usize)>,
    string: &mut [usize],
    f: &mut impl FnMut(&[usize]),
) {
    if rows_left == 0 {
        let mut counts: Vec<(usize, usize)> = occupied.clone();
        arrange(0, &mut counts, string, f);
        return;
    }
    if d - site < rows_left {
        return;
    }
    for len in 1..remaining.len() {
        if remaining[len] > 0 {
            remaining[len] -= 1;
            occupied.push((site, len));
            assign_sites(site + 1, d, rows_left - 1, remaining, occupied, string, f);
            occupied.pop();
            remaining[len] += 1;
        }
    }
    assign_sites(site + 1, d, rows_left, remaining, occupied, string, f);
}

fn arrange(pos: usize, counts: &mut [(usize, usize)], string: &mut [usize], f: &mut impl FnMut(&[usize])) {
    if pos == string.len() {
        f(string);
        return;
    }
    for i in 0..counts.len() {
        if counts[i].1 > 0 {
            counts[i].1 -= 1;
            string[pos] = counts[i].0;
            arrange(pos + 1, counts, string, f);
            counts[i].1 += 1;
        }
    }
}

/// `|y⟩`: the equal-weight superposition over the orbit of `y`.
pub fn expand_basis_element<T: Real>(y: &YoungDiagram, d: usize, budget: DenseBudget) -> Result<DenseState<T>> {
    let a = y.normalization_constant(d)?;
    let mut s = DenseState::zeros(y.n(), d, budget)?;
    let amp = Complex::new(T::lit(crate::exact::sqrt_ratio_f64(&1u32.into(), &a)), T::zero());
    fill_orbit(&mut s, y, amp);
    Ok(s)
}

fn fill_orbit<T: Real>(s: &mut DenseState<T>, y: &YoungDiagram, amp: Complex<T>) {
    let d = s.d;
    let amps = &mut s.amps;
    for_each_orbit_string(y, d, |str_| {
        let idx = str_.iter().fold(0, |acc, &c| acc * d + c);
        amps[idx] = amp;
    });
}

/// `Σ_y a_y |y⟩` as a dense vector.
pub fn expand_state<T: Real>(psi: &PssState, budget: DenseBudget) -> Result<DenseState<T>> {
    let mut s = DenseState::zeros(psi.n, psi.d, budget)?;
    for (y, a) in &psi.amplitudes {
        let norm = crate::exact::sqrt_ratio_f64(&1u32.into(), &y.normalization_constant(psi.d)?);
        let amp = Complex::new(T::lit(a.re * norm), T::lit(a.im * norm));
        fill_orbit(&mut s, y, amp);
    }
    Ok(s)
}

/// `max_μ ‖U_μ s − s‖_∞` over adjacent party transpositions.
///
/// Adjacent transpositions generate `S_n`, so a zero result means full
/// party symmetry.
pub fn check_party_symmetry<T: Real>(s: &DenseState<T>) -> T {
    let (n, d) = (s.n, s.d);
    let mut worst = T::zero();
    let weights: Vec<usize> = (0..n).map(|p| d.pow((n - 1 - p) as u32)).collect();
    for p in 0..n.saturating_sub(1) {
        let (wp, wq) = (weights[p], weights[p + 1]);
        for (idx, a) in s.amps.iter().enumerate() {
            let dp = (idx / wp) % d;
            let dq = (idx / wq) % d;
            let swapped = idx + dq * wp + dp * wq - dp * wp - dq * wq;
            worst = worst.max((*a - s.amps[swapped]).norm());
        }
    }
    worst
}

/// `max_ν ‖V_ν^{⊗n} s − s‖_∞` over adjacent site transpositions, which generate `S_d`.
pub fn check_site_symmetry<T: Real>(s: &DenseState<T>) -> T {
    let d = s.d;
    let mut worst = T::zero();
    for site in 0..d.saturating_sub(1) {
        for (idx, a) in s.amps.iter().enumerate() {
            let image = s.sites_of(idx).into_iter().fold(0, |acc, c| {
                let c = if c == site {
                    site + 1
                } else if c == site + 1 {
                    site
                } else {
                    c
                };
                acc * d + c
            });
            worst = worst.max((*a - s.amps[image]).norm());
        }
    }
    worst
}

/// `(Σ_i |i⟩ / √d)^{⊗n}`.
pub fn uniform_product_state<T: Real>(n: usize, d: usize, budget: DenseBudget) -> Result<DenseState<T>> {
    let mut s = DenseState::zeros(n, d, budget)?;
    let amp = T::from_count(d).powi(-(n as i32)).sqrt();
    s.amps.fill(Complex::new(amp, T::zero()));
    Ok(s)
}

/// A normalized PSS state `Σ_y a_y |y⟩`, stored in canonical diagram order.
#[derive(Clone, Debug, PartialEq)]
pub struct PssState {
    n: usize,
    d: usize,
    amplitudes: Vec<(YoungDiagram, Complex64)>,
}

#[derive(Serialize, Deserialize)]
struct PssStateJson {
    n: usize,
    d: usize,
    amplitudes: Vec<AmplitudeJson>,
}

#[derive(Serialize, Deserialize)]
struct AmplitudeJson {
    diagram: YoungDiagram,
    re: f64,
    #[serde(default)]
    im: f64,
}

impl PssState {
    /// Requires unit norm within 1e-12 and keys in `𝒴(n, d)`.
    pub fn new(n: usize, d: usize, amplitudes: Vec<(YoungDiagram, Complex64)>) -> Result<Self> {
        let (state, factor) = Self::normalized(n, d, amplitudes)?;
        if (factor - 1.0).abs() > 1e-12 {
            return domain(format!(
                "amplitudes are not normalized (norm = {})",
                1.0 / factor
            ));
        }
        Ok(state)
    }

    /// Rescale to unit norm, returning the factor applied.
    pub fn normalized(n: usize, d: usize, mut amplitudes: Vec<(YoungDiagram, Complex64)>) -> Result<(Self, f64)> {
        if n == 0 || d == 0 {
            return domain(format!("need n >= 1 and d >= 1 (got n = {n}, d = {d})"));
        }
        let mut seen = BTreeSet::new();
        for (y, _) in &amplitudes {
            if y.n() != n {
                return domain(format!("diagram {y} has {} blocks, state has n = {n}", y.n()));
            }
            if y.k() > d {
                return domain(format!("diagram {y} has {} rows, state has d = {d}", y.k()));
            }
            if !seen.insert(y.clone()) {
                return domain(format!("diagram {y} listed twice"));
            }
        }
        let norm = amplitudes.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return domain("state has zero or non-finite norm");
        }
        let factor = 1.0 / norm;
        for (_, a) in amplitudes.iter_mut() {
            *a *= factor;
        }
        amplitudes.sort_by(|a, b| b.0.cmp(&a.0));
        Ok((Self { n, d, amplitudes }, factor))
    }

    pub fn basis(y: &YoungDiagram, d: usize) -> Result<Self> {
        Self::new(y.n(), d, vec![(y.clone(), Complex64::new(1.0, 0.0))])
    }

    /// Uniform superposition `(Σ_i |i⟩/√d)^{⊗n}` decomposed over diagrams:
    /// `a_y = √(𝒜_y / dⁿ)`.
    pub fn uniform(n: usize, d: usize) -> Result<Self> {
        let total = crate::pss::pow_u128(d, n).map(|v| v as f64).unwrap_or(f64::INFINITY);
        let amps = enumerate_diagrams(n, d)?
            .into_iter()
            .map(|y| {
                let a = crate::exact::sqrt_ratio_f64(&y.normalization_constant(d).expect("k <= d"), &1u32.into());
                (y, Complex64::new(a / total.sqrt(), 0.0))
            })
            .collect();
        Ok(Self::normalized(n, d, amps)?.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn amplitudes(&self) -> &[(YoungDiagram, Complex64)] {
        &self.amplitudes
    }

    pub fn amplitude(&self, y: &YoungDiagram) -> Complex64 {
        self.amplitudes
            .iter()
            .find(|(z, _)| z == y)
            .map_or(Complex64::zero(), |(_, a)| *a)
    }

    /// Diagrams with nonzero amplitude.
    pub fn support(&self) -> impl Iterator<Item = &YoungDiagram> {
        self.amplitudes.iter().filter(|(_, a)| !a.is_zero()).map(|(y, _)| y)
    }

    /// Whether every diagram in the support is free of isolated particles.
    pub fn without_isolated_particles(&self) -> bool {
        self.support().all(|y| !y.has_isolated_particles())
    }

    /// Parse the JSON form, normalizing; returns the factor applied.
    pub fn from_json(text: &str) -> Result<(Self, f64)> {
        let raw: PssStateJson = serde_json::from_str(text)?;
        let amps = raw
            .amplitudes
            .into_iter()
            .map(|a| (a.diagram, Complex64::new(a.re, a.im)))
            .collect();
        Self::normalized(raw.n, raw.d, amps)
    }

    pub fn to_json(&self) -> String {
        let raw = PssStateJson {
            n: self.n,
            d: self.d,
            amplitudes: self
                .amplitudes
                .iter()
                .map(|(y, a)| AmplitudeJson {
                    diagram: y.clone(),
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        };
        serde_json::to_string(&raw).expect("plain data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn y(s: &str) -> YoungDiagram {
        s.parse().unwrap()
    }

    fn dense(y_: &str, d: usize) -> DenseState<f64> {
        expand_basis_element(&y(y_), d, DenseBudget::default()).unwrap()
    }

    fn assert_amps(s: &DenseState<f64>, expected: &[f64]) {
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert!((a.re - e).abs() < 1e-15 && a.im == 0.0, "{a} vs {e}");
        }
    }

    #[test]
    fn basis_elements() {
        let h = 0.5f64.sqrt();
        assert_amps(&dense("1,1", 2), &[0.0, h, h, 0.0]);
        assert_amps(&dense("2", 2), &[h, 0.0, 0.0, h]);
        let s = dense("2,1", 3);
        let nz: Vec<_> = s.amplitudes().iter().filter(|a| !a.is_zero()).collect();
        assert_eq!(nz.len(), 18);
        assert!(nz.iter().all(|a| (a.re - 18f64.sqrt().recip()).abs() < 1e-15));
        assert!(expand_basis_element::<f64>(&y("3"), 10, DenseBudget::new(100)).is_err());
        assert!(matches!(
            expand_basis_element::<f64>(&y("3"), 10, DenseBudget::new(100)),
            Err(Error::Budget { limit: 100, .. })
        ));
    }

    #[test]
    fn orbit_strings_have_the_right_shape() {
        for (shape, d) in [("3,2,1,1", 5), ("2,2", 4), ("4", 3), ("1,1,1", 3)] {
            let dg = y(shape);
            let mut seen = BTreeSet::new();
            for_each_orbit_string(&dg, d, |s| {
                let mut counts = vec![0; d];
                for &c in s {
                    counts[c] += 1;
                }
                assert_eq!(YoungDiagram::from_unsorted(counts).unwrap(), dg);
                assert!(seen.insert(s.to_vec()));
            });
            assert_eq!(seen.len() as u64, u64::try_from(dg.normalization_constant(d).unwrap()).unwrap());
        }
    }

    #[test]
    fn superposition_examples() {
        let b = DenseBudget::default();
        let psi = PssState::basis(&y("2"), 2).unwrap();
        assert_eq!(expand_state::<f64>(&psi, b).unwrap(), dense("2", 2));
        let h = 0.5f64.sqrt();
        let psi = PssState::new(2, 2, vec![(y("2"), h.into()), (y("1,1"), h.into())]).unwrap();
        assert_amps(&expand_state(&psi, b).unwrap(), &[0.5, 0.5, 0.5, 0.5]);
        let psi = PssState::new(3, 3, vec![(y("3"), 0.6.into()), (y("2,1"), Complex64::new(0.0, 0.8))]).unwrap();
        let s: DenseState<f64> = expand_state(&psi, b).unwrap();
        assert_eq!(s.amplitudes().len(), 27);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn symmetry_checks() {
        let b = DenseBudget::default();
        let s = dense("2,1", 3);
        assert_eq!(check_party_symmetry(&s), 0.0);
        assert_eq!(check_site_symmetry(&s), 0.0);
        let raw = DenseState::<f64>::basis_string(2, 2, &[0, 1], b).unwrap();
        assert!(check_party_symmetry(&raw) > 0.5);
        assert!(check_site_symmetry(&raw) > 0.5);
    }

    #[test]
    fn uniform_products() {
        let b = DenseBudget::default();
        let s = uniform_product_state::<f64>(1, 2, b).unwrap();
        assert_amps(&s, &[0.5f64.sqrt(); 2]);
        assert_amps(&uniform_product_state(2, 2, b).unwrap(), &[0.5; 4]);
        let s = uniform_product_state::<f64>(3, 3, b).unwrap();
        assert_amps(&s, &[3f64.powf(-1.5); 27]);
    }

    #[test]
    fn basis_orthonormal() {
        for n in 1..=5 {
            for d in 1..=4 {
                let ds: Vec<_> = enumerate_diagrams(n, d)
                    .unwrap()
                    .iter()
                    .map(|y| expand_basis_element::<f64>(y, d, DenseBudget::default()).unwrap())
                    .collect();
                for (i, a) in ds.iter().enumerate() {
                    for (j, b) in ds.iter().enumerate() {
                        let ip = a.inner(b);
                        let expected = if i == j { 1.0 } else { 0.0 };
                        assert!((ip.re - expected).abs() < 1e-12 && ip.im.abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn uniform_state_decomposes_over_diagrams() {
        let b = DenseBudget::default();
        for (n, d) in [(3, 3), (4, 2), (2, 5), (5, 3)] {
            let direct = uniform_product_state::<f64>(n, d, b).unwrap();
            let mut rebuilt = vec![Complex64::zero(); direct.amplitudes().len()];
            for dg in enumerate_diagrams(n, d).unwrap() {
                let basis = expand_basis_element::<f64>(&dg, d, b).unwrap();
                let w = basis.inner(&direct);
                assert!(w.re >= 0.0 && w.im.abs() < 1e-14);
                for (r, a) in rebuilt.iter_mut().zip(basis.amplitudes()) {
                    *r += w * a;
                }
            }
            for (r, a) in rebuilt.iter().zip(direct.amplitudes()) {
                assert!((r - a).norm() < 1e-12);
            }
            let via_diagrams: DenseState<f64> = expand_state(&PssState::uniform(n, d).unwrap(), b).unwrap();
            for (r, a) in via_diagrams.amplitudes().iter().zip(direct.amplitudes()) {
                assert!((r - a).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn json_round_trip_and_normalization() {
        let text = r#"{"n":3,"d":3,"amplitudes":[{"diagram":"3","re":3.0,"im":0.0},{"diagram":"2,1","re":0.0,"im":4.0}]}"#;
        let (psi, factor) = PssState::from_json(text).unwrap();
        assert!((factor - 0.2).abs() < 1e-15);
        assert!((psi.amplitude(&y("2,1")) - Complex64::new(0.0, 0.8)).norm() < 1e-15);
        let back = PssState::from_json(&psi.to_json()).unwrap();
        assert_eq!(back.0, psi);
        assert!((back.1 - 1.0).abs() < 1e-15);
        let bad = r#"{"n":3,"d":2,"amplitudes":[{"diagram":"1,1,1","re":1.0,"im":0.0}]}"#;
        assert!(PssState::from_json(bad).is_err());
        let bad = r#"{"n":3,"d":3,"amplitudes":[{"diagram":"1,2","re":1.0,"im":0.0}]}"#;
        assert!(PssState::from_json(bad).is_err());
    }

    fn random_state(n: usize, d: usize, raw: &[(f64, f64)]) -> PssState {
        let ds = enumerate_diagrams(n, d).unwrap();
        let amps = ds
            .into_iter()
            .zip(raw.iter().cycle())
            .map(|(dg, &(re, im))| (dg, Complex64::new(re, im)))
            .collect();
        PssState::normalized(n, d, amps).unwrap().0
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]
        #[test]
        fn expansions_are_symmetric(n in 1usize..=5, d in 1usize..=4,
                                    raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..8)) {
            prop_assume!(raw.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3));
            let psi = random_state(n, d, &raw);
            let s: DenseState<f64> = expand_state(&psi, DenseBudget::default()).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-12);
            prop_assert!(check_party_symmetry(&s) <= 1e-12);
            prop_assert!(check_site_symmetry(&s) <= 1e-12);
        }
    }
}
