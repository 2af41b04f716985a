//! `ρ₁`/`ρ₂` parameters from counts, without building the `dⁿ` state.

use num_bigint::BigUint;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::counting::{cross_overlap_count, overlap_count, prefix_pair_count, rectangular_counts, weighted};
use super::{EntryClass, Rho1Params, Rho2Params};
use crate::error::{domain, Result};
use crate::exact::{rat, ratio};
use crate::pss::PssState;
use crate::young::{compatibility, YoungDiagram};
use crate::{ExactRho1, ExactRho2, Rho1, Rho2};

fn class_count(y: &YoungDiagram, z: &YoungDiagram, class: EntryClass, d: usize) -> Result<BigUint> {
    if class.sites_needed() > d {
        return Ok(BigUint::zero());
    }
    let (r, c) = class.representative();
    prefix_pair_count(y, z, &r, &c, d)
}

fn a_count(y: &YoungDiagram, z: &YoungDiagram, d: usize) -> Result<BigUint> {
    if d < 2 {
        return Ok(BigUint::zero());
    }
    prefix_pair_count(y, z, &[0], &[1], d)
}

fn check_basis(y: &YoungDiagram, d: usize) -> Result<BigUint> {
    if y.n() < 2 {
        return domain("two-party reductions need n >= 2");
    }
    y.normalization_constant(d)
}

/// Exact parameters of the normalized basis state `|y⟩` on `d` sites.
pub fn diagram_params(y: &YoungDiagram, d: usize) -> Result<(ExactRho1, ExactRho2)> {
    let norm = check_basis(y, d)?;
    let q = |count: BigUint| ratio(&count, &norm);
    let real = |class| -> Result<BigRational> { Ok(q(class_count(y, y, class, d)?)) };
    let cplx = |class| -> Result<Complex<BigRational>> { Ok(Complex::new(real(class)?, BigRational::zero())) };
    let rho2 = Rho2Params {
        d,
        b1: real(EntryClass::B1)?,
        b2: cplx(EntryClass::B2)?,
        b3: real(EntryClass::B3)?,
        b4: real(EntryClass::B4)?,
        b5: cplx(EntryClass::B5)?,
        c_pair: real(EntryClass::CPair)?,
        c_same: real(EntryClass::CSame)?,
    };
    let rho1 = Rho1Params { d, a: q(a_count(y, y, d)?) };
    Ok((rho1, rho2))
}

/// Parameters of a superposition `Σ a_y |y⟩`, summing the weighted counts
/// `a_y a_z* N_{yz} / √(𝒜_y 𝒜_z)` over all pairs in the support.
pub fn superposition_params(psi: &PssState) -> Result<(Rho1, Rho2)> {
    let d = psi.d();
    let terms: Vec<(&YoungDiagram, Complex64, BigUint)> = psi
        .amplitudes()
        .iter()
        .map(|(y, a)| Ok((y, *a, check_basis(y, d)?)))
        .collect::<Result<_>>()?;
    let mut acc = [Complex64::zero(); 7];
    let mut a_acc = Complex64::zero();
    for (y, ay, ny) in &terms {
        for (z, az, nz) in &terms {
            let w = ay * az.conj();
            for (slot, class) in acc.iter_mut().zip(EntryClass::BASE) {
                *slot += w * weighted(&class_count(y, z, class, d)?, ny, nz);
            }
            a_acc += w * weighted(&a_count(y, z, d)?, ny, nz);
        }
    }
    let [c_same, c_pair, b1, b2, b3, b4, b5] = acc;
    let rho2 = Rho2Params {
        d,
        b1: b1.re,
        b2,
        b3: b3.re,
        b4: b4.re,
        b5,
        c_pair: c_pair.re,
        c_same: c_same.re,
    };
    Ok((Rho1Params { d, a: a_acc.re }, rho2))
}

/// Exact parameters of the rectangular diagram with `k` rows of `n/k`.
pub fn rectangular_rho_params(n: usize, k: usize, d: usize) -> Result<(ExactRho1, ExactRho2)> {
    rectangular_counts(n, k, d)?;
    let (ni, ki, di) = (n as i64, k as i64, d as i64);
    let zero = BigRational::zero;
    let full = k == n;
    let a = if full && d >= 2 { rat(di - ni, di * (di - 1)) } else { zero() };
    let c_same = rat(ni - ki, di * ki * (ni - 1));
    let c_pair = if d >= 2 { rat(ni * (ki - 1), di * (di - 1) * ki * (ni - 1)) } else { zero() };
    let b4 = if 2 * k == n && d >= 2 {
        rat(2 * di - ni, 2 * di * (di - 1) * (ni - 1))
    } else {
        zero()
    };
    let b3 = if full && d >= 3 { rat(di - ni, di * (di - 1) * (di - 2)) } else { zero() };
    let b1 = if full && d >= 4 {
        rat((di - ni) * (di - ni - 1), di * (di - 1) * (di - 2) * (di - 3))
    } else {
        zero()
    };
    let czero = || Complex::new(zero(), zero());
    Ok((
        Rho1Params { d, a },
        Rho2Params {
            d,
            b1,
            b2: czero(),
            b3,
            b4,
            b5: czero(),
            c_pair,
            c_same,
        },
    ))
}

/// `A_y = 𝒩_{i,j}(y) / 𝒜_y`.
pub fn a_single_diagram(y: &YoungDiagram, d: usize) -> Result<BigRational> {
    let norm = check_basis(y, d)?;
    Ok(ratio(&overlap_count(y, d)?, &norm))
}

#[derive(Clone, Debug, Serialize)]
pub struct SingleTerm {
    pub diagram: YoungDiagram,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossTerm {
    pub y: YoungDiagram,
    pub z: YoungDiagram,
    pub count: String,
    pub value: f64,
}

/// `A` of a superposition split into diagonal terms `|a_y|² A_y` and
/// cross terms `2 Re(a_y a_z*) N_{yz}/√(𝒜_y 𝒜_z)` over compatible pairs.
#[derive(Clone, Debug, Serialize)]
pub struct ADecomposition {
    pub total: f64,
    pub single_sum: f64,
    pub cross_sum: f64,
    pub single: Vec<SingleTerm>,
    pub cross: Vec<CrossTerm>,
}

pub fn a_superposition(psi: &PssState) -> Result<ADecomposition> {
    let d = psi.d();
    let amps = psi.amplitudes();
    let mut single = Vec::new();
    for (y, a) in amps {
        let ay = a_single_diagram(y, d)?.to_f64().unwrap_or(f64::NAN);
        single.push(SingleTerm {
            diagram: y.clone(),
            value: a.norm_sqr() * ay,
        });
    }
    let mut cross = Vec::new();
    for (i, (y, ay)) in amps.iter().enumerate() {
        for (z, az) in &amps[i + 1..] {
            if compatibility(y, z)?.is_none() {
                continue;
            }
            let count = cross_overlap_count(y, z, d)?;
            let w = weighted(&count, &y.normalization_constant(d)?, &z.normalization_constant(d)?);
            cross.push(CrossTerm {
                y: y.clone(),
                z: z.clone(),
                count: count.to_string(),
                value: 2.0 * (ay * az.conj()).re * w,
            });
        }
    }
    let single_sum: f64 = single.iter().fold(0.0, |acc, t| acc + t.value);
    let cross_sum: f64 = cross.iter().fold(0.0, |acc, t| acc + t.value);
    Ok(ADecomposition {
        total: single_sum + cross_sum,
        single_sum,
        cross_sum,
        single,
        cross,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pss::{expand_basis_element, expand_state, DenseBudget};
    use crate::rdm::{exactly_normalized, partial_trace, rho1_params_from_dense, rho2_params_from_dense};
    use crate::young::enumerate_diagrams;

    fn y(s: &str) -> YoungDiagram {
        s.parse().unwrap()
    }

    #[test]
    fn single_diagram_params_match_dense() {
        for n in 2..=5 {
            for d in 1..=4 {
                for dg in enumerate_diagrams(n, d).unwrap() {
                    let (r1, r2) = diagram_params(&dg, d).unwrap();
                    assert!(exactly_normalized(&r2), "{dg} d={d}");
                    assert_eq!(r2.induced_a(), r1.a, "{dg} d={d}");
                    let s = expand_basis_element::<f64>(&dg, d, DenseBudget::default()).unwrap();
                    let dense2 = partial_trace(&s, 2, DenseBudget::default()).unwrap();
                    let (p2, _) = rho2_params_from_dense(&dense2, 1e-12).unwrap();
                    let f = r2.to_f64();
                    for c in EntryClass::BASE {
                        assert!((p2.value(c) - f.value(c)).norm() < 1e-14, "{dg} d={d} {}", c.name());
                    }
                    let dense1 = partial_trace(&s, 1, DenseBudget::default()).unwrap();
                    let (p1, _) = rho1_params_from_dense(&dense1, 1e-12).unwrap();
                    assert!((p1.a - r1.a.to_f64().unwrap()).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn rectangular_params_match_counting() {
        for n in 2..=8 {
            for k in (1..=n).filter(|k| n % k == 0) {
                for d in k..=7 {
                    let rect = YoungDiagram::rectangle(n, k).unwrap();
                    assert_eq!(
                        rectangular_rho_params(n, k, d).unwrap(),
                        diagram_params(&rect, d).unwrap(),
                        "n={n} k={k} d={d}"
                    );
                }
            }
        }
    }

    #[test]
    fn a_examples() {
        assert_eq!(a_single_diagram(&y("1,1"), 4).unwrap(), rat(1, 6));
        assert!(a_single_diagram(&y("2"), 2).unwrap().is_zero());
        assert!(a_single_diagram(&y("1"), 3).is_err());
    }

    #[test]
    fn superposition_matches_dense() {
        let amp = Complex64::new(0.6, 0.0);
        let bmp = Complex64::from_polar(0.8, std::f64::consts::FRAC_PI_3);
        for (a, b, d) in [("2,1", "3", 3), ("2,1", "1,1,1", 4), ("2,2", "3,1", 4), ("2,2", "4", 3)] {
            let psi = PssState::new(y(a).n(), d, vec![(y(a), amp), (y(b), bmp)]).unwrap();
            let (r1, r2) = superposition_params(&psi).unwrap();
            let s = expand_state::<f64>(&psi, DenseBudget::default()).unwrap();
            let (p2, _) = rho2_params_from_dense(&partial_trace(&s, 2, DenseBudget::default()).unwrap(), 1e-12).unwrap();
            for c in EntryClass::BASE {
                assert!((p2.value(c) - r2.value(c)).norm() < 1e-13, "{a}+{b} d={d} {}", c.name());
            }
            let (p1, _) = rho1_params_from_dense(&partial_trace(&s, 1, DenseBudget::default()).unwrap(), 1e-12).unwrap();
            assert!((p1.a - r1.a).abs() < 1e-13);
            let dec = a_superposition(&psi).unwrap();
            assert!((dec.total - p1.a).abs() < 1e-13, "{a}+{b} d={d}: {} vs {}", dec.total, p1.a);
            assert!((r2.trace() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn uniform_state_is_product() {
        let psi = PssState::uniform(3, 3).unwrap();
        let (r1, r2) = superposition_params(&psi).unwrap();
        assert!((r1.a - 1.0 / 3.0).abs() < 1e-14);
        assert!((r2.b3 - 1.0 / 9.0).abs() < 1e-14);
        assert!((r2.c_same - 1.0 / 9.0).abs() < 1e-14);
    }
}
