//! Site-permutation sectors of two-party operators.
//!
//! A swap-symmetric operator on `C^d ⊗ C^d` that commutes with every
//! `P ⊗ P` lives on `Sym²(C^d)`, spanned by `|ii⟩` ("diagonal") and
//! `(|ij⟩ + |ji⟩)/√2` ("pair"). Under site permutations this space splits
//! into the trivial sector (one copy, diagonal and pair parts), the standard
//! sector (`d − 1` copies, diagonal and pair parts) and the `[d−2, 2]`
//! sector (`d(d−3)/2` copies, pair part only). Such an operator is fixed by
//! seven numbers, and products of two of them act blockwise with blocks of
//! size at most 2. This gives fidelities in `O(1)` work for any `d`.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::NEG_TOL;
use crate::rdm::{Rho1Params, Rho2Params};
use crate::scalar::Real;

/// Matrix elements of an invariant operator on `Sym²(C^d)`, labelled by
/// how the two basis vectors overlap.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricOperator<T: Real> {
    pub d: usize,
    /// `⟨ii|X|ii⟩`
    pub dd_same: T,
    /// `⟨ii|X|kk⟩`
    pub dd_diff: T,
    /// `⟨ii|X|{il}⟩`
    pub dp_in: Complex<T>,
    /// `⟨ii|X|{kl}⟩`
    pub dp_out: Complex<T>,
    /// `⟨{ij}|X|{ij}⟩`
    pub pp_same: T,
    /// `⟨{ij}|X|{il}⟩`
    pub pp_one: T,
    /// `⟨{ij}|X|{kl}⟩`
    pub pp_none: T,
}

/// One irreducible block with its multiplicity. `matrix` is 1×1 or 2×2,
/// stored row-major; a 2×2 block is ordered (diagonal part, pair part).
#[derive(Clone, Debug, PartialEq)]
pub struct SectorBlock<T: Real> {
    pub multiplicity: usize,
    pub size: usize,
    pub matrix: [Complex<T>; 4],
}

impl<T: Real> SectorBlock<T> {
    fn one(multiplicity: usize, x: Complex<T>) -> Self {
        Self {
            multiplicity,
            size: 1,
            matrix: [x, Complex::zero(), Complex::zero(), Complex::zero()],
        }
    }

    fn two(multiplicity: usize, a: Complex<T>, b: Complex<T>, c: Complex<T>) -> Self {
        Self {
            multiplicity,
            size: 2,
            matrix: [a, b, b.conj(), c],
        }
    }

    fn product(&self, other: &Self) -> Self {
        let [a, b, c, d] = self.matrix;
        let [e, f, g, h] = other.matrix;
        let matrix = if self.size == 1 {
            [a * e, Complex::zero(), Complex::zero(), Complex::zero()]
        } else {
            [a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h]
        };
        Self {
            multiplicity: self.multiplicity,
            size: self.size,
            matrix,
        }
    }

    /// Eigenvalues of the (Hermitian) block.
    pub fn eigenvalues(&self) -> Vec<T> {
        let [a, b, _, d] = self.matrix;
        if self.size == 1 {
            return vec![a.re];
        }
        let two = T::lit(2.0);
        let half_tr = (a.re + d.re) / two;
        let gap = ((a.re - d.re) / two).hypot(b.norm());
        vec![half_tr - gap, half_tr + gap]
    }
}

impl<T: Real> SymmetricOperator<T> {
    pub fn from_rho2(p: &Rho2Params<T>) -> Self {
        let two = T::lit(2.0);
        let root2 = two.sqrt();
        Self {
            d: p.d,
            dd_same: p.c_same,
            dd_diff: p.b4,
            dp_in: p.b5 * root2,
            dp_out: p.b2 * root2,
            pp_same: two * p.c_pair,
            pp_one: two * p.b3,
            pp_none: two * p.b1,
        }
    }

    /// `√ρ₁ ⊗ √ρ₁` restricted to `Sym²`. `√ρ₁` has diagonal `p` and
    /// off-diagonal `q`, from the two eigenvalues of `ρ₁`.
    pub fn sqrt_product(p1: &Rho1Params<T>) -> Result<Self> {
        let (uniform, complement) = p1.eigenvalues();
        let root = |v: T| -> Result<T> {
            if v < -T::lit(NEG_TOL) {
                return Err(Error::NotPsd {
                    eigenvalue: v.to_f64_lossy(),
                });
            }
            Ok(v.max(T::zero()).sqrt())
        };
        let (su, sc) = (root(uniform)?, if p1.d > 1 { root(complement)? } else { T::zero() });
        let q = (su - sc) / T::from_count(p1.d);
        let p = sc + q;
        let root2 = T::lit(2.0).sqrt();
        let c = |x: T| Complex::new(x, T::zero());
        Ok(Self {
            d: p1.d,
            dd_same: p * p,
            dd_diff: q * q,
            dp_in: c(root2 * p * q),
            dp_out: c(root2 * q * q),
            pp_same: p * p + q * q,
            pp_one: p * q + q * q,
            pp_none: T::lit(2.0) * q * q,
        })
    }

    /// Irreducible blocks, trivial sector first.
    pub fn blocks(&self) -> Vec<SectorBlock<T>> {
        let d = self.d;
        let t = |x: usize| T::from_count(x);
        let c = |x: T| Complex::new(x, T::zero());
        let mut out = Vec::with_capacity(3);
        let dd_triv = self.dd_same + t(d - 1) * self.dd_diff;
        if d == 1 {
            out.push(SectorBlock::one(1, c(dd_triv)));
            return out;
        }
        let pp_triv = self.pp_same
            + t(2 * (d - 2)) * self.pp_one
            + t((d - 2) * d.saturating_sub(3)) / T::lit(2.0) * self.pp_none;
        let dp_triv = (self.dp_in + self.dp_out * (t(d - 2) / T::lit(2.0))) * t(2 * (d - 1)).sqrt();
        out.push(SectorBlock::two(1, c(dd_triv), dp_triv, c(pp_triv)));
        let dd_std = self.dd_same - self.dd_diff;
        if d == 2 {
            out.push(SectorBlock::one(1, c(dd_std)));
            return out;
        }
        // d − 4 and −(d − 3) are the standard-sector eigenvalues of the "share one" and "disjoint" pair graphs
        let pp_std = self.pp_same + (t(d) - T::lit(4.0)) * self.pp_one - t(d - 3) * self.pp_none;
        let dp_std = (self.dp_in - self.dp_out) * t(d - 2).sqrt();
        out.push(SectorBlock::two(d - 1, c(dd_std), dp_std, c(pp_std)));
        if d >= 4 {
            let pp_mixed = self.pp_same - T::lit(2.0) * self.pp_one + self.pp_none;
            out.push(SectorBlock::one(d * (d - 3) / 2, c(pp_mixed)));
        }
        out
    }
}

/// `[Tr √M]²` with `M = √(ρ₁⊗ρ₁) ρ₂ √(ρ₁⊗ρ₁)`, evaluated sector by sector.
/// Returns the fidelity and the discarded eigenvalue mass.
pub fn sector_mfa_fidelity<T: Real>(p1: &Rho1Params<T>, p2: &Rho2Params<T>) -> Result<(T, T)> {
    if p1.d != p2.d {
        return Err(Error::Domain(format!("rho1 has d = {} but rho2 has d = {}", p1.d, p2.d)));
    }
    let rho = SymmetricOperator::from_rho2(p2);
    let root = SymmetricOperator::sqrt_product(p1)?;
    let rho_blocks = rho.blocks();
    for b in &rho_blocks {
        for v in b.eigenvalues() {
            if v < -T::lit(NEG_TOL) {
                return Err(Error::NotPsd {
                    eigenvalue: v.to_f64_lossy(),
                });
            }
        }
    }
    let mut spectrum: Vec<(T, usize)> = Vec::new();
    for (r, s) in rho_blocks.iter().zip(root.blocks()) {
        let m = s.product(r).product(&s);
        spectrum.extend(m.eigenvalues().into_iter().map(|v| (v, m.multiplicity)));
    }
    let max = spectrum.iter().fold(T::zero(), |m, &(v, _)| m.max(v));
    let cutoff = T::lit(256.0) * T::epsilon() * max;
    let (mut sum, mut clipped) = (T::zero(), T::zero());
    for (v, mult) in spectrum {
        if v < -T::lit(NEG_TOL) {
            return Err(Error::NotPsd {
                eigenvalue: v.to_f64_lossy(),
            });
        }
        if v <= cutoff {
            clipped = clipped + T::from_count(mult) * v.abs();
        } else {
            sum = sum + T::from_count(mult) * v.sqrt();
        }
    }
    Ok((sum * sum, clipped))
}

/// The analytic spectrum of the restriction of `ρ₂` to the pair states
/// `|ij⟩`, `i ≠ j`: `2 c_pair + 4(d−2) b3 + (d−2)(d−3) b1` on the trivial
/// sector, `2 c_pair + 2(d−4) b3 − 2(d−3) b1` on the standard sector and
/// `2 c_pair − 4 b3 + 2 b1` on the `[d−2, 2]` sector, each with its
/// multiplicity. The antisymmetric pair states contribute zeros.
pub fn pair_minor_spectrum<T: Real>(p: &Rho2Params<T>) -> Vec<(T, usize)> {
    let d = p.d;
    if d < 2 {
        return Vec::new();
    }
    let t = |x: usize| T::from_count(x);
    let two = T::lit(2.0);
    let mut out = vec![(
        two * p.c_pair + t(4 * (d - 2)) * p.b3 + t((d - 2) * d.saturating_sub(3)) * p.b1,
        1,
    )];
    if d >= 3 {
        out.push((
            two * p.c_pair + two * (t(d) - T::lit(4.0)) * p.b3 - two * t(d - 3) * p.b1,
            d - 1,
        ));
    }
    if d >= 4 {
        out.push((two * p.c_pair - T::lit(4.0) * p.b3 + two * p.b1, d * (d - 3) / 2));
    }
    out.push((T::zero(), d * (d - 1) / 2));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::rdm::{rho1_dense_from_params, rho2_dense_from_params};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn dense_spectrum(op: &SymmetricOperator<f64>) -> Vec<f64> {
        // rebuild on the d² space from the block description and compare spectra
        let d = op.d;
        let mut p = Rho2Params::<f64>::zero(d);
        let r2 = 2f64.sqrt();
        p.c_same = op.dd_same;
        p.b4 = op.dd_diff;
        p.b5 = op.dp_in / r2;
        p.b2 = op.dp_out / r2;
        p.c_pair = op.pp_same / 2.0;
        p.b3 = op.pp_one / 2.0;
        p.b1 = op.pp_none / 2.0;
        rho2_dense_from_params(&p).eigenvalues().unwrap()
    }

    fn block_spectrum(op: &SymmetricOperator<f64>) -> Vec<f64> {
        let mut v: Vec<f64> = Vec::new();
        for b in op.blocks() {
            for e in b.eigenvalues() {
                v.extend(std::iter::repeat(e).take(b.multiplicity));
            }
        }
        v.extend(std::iter::repeat(0.0).take(op.d * (op.d - 1) / 2));
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    fn params(d: usize, raw: &[f64]) -> Rho2Params<f64> {
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

    #[test]
    fn sqrt_product_squares_to_product() {
        for d in 1..=5 {
            let p1 = Rho1Params { d, a: 0.03 };
            let s = SymmetricOperator::sqrt_product(&p1).unwrap();
            let s_dense = rho2_dense_from_params(&params(
                d,
                &[
                    s.pp_none / 2.0,
                    s.dp_out.re / 2f64.sqrt(),
                    0.0,
                    s.pp_one / 2.0,
                    s.dd_diff,
                    s.dp_in.re / 2f64.sqrt(),
                    0.0,
                    s.pp_same / 2.0,
                    s.dd_same,
                ],
            ));
            let r1 = rho1_dense_from_params(&p1);
            let product = r1.kron(&r1);
            // the class placement of S is its projection onto Sym², so compare with the projected product
            let proj = CMatrix::from_fn(d * d, d * d, |r, c| {
                let swap = if c == (r % d) * d + r / d { 0.5 } else { 0.0 };
                let id = if r == c { 0.5 } else { 0.0 };
                Complex64::new(id + swap, 0.0)
            });
            let sq = s_dense.as_matrix().matmul(s_dense.as_matrix());
            let rhs = proj.matmul(product.as_matrix()).matmul(&proj);
            assert!(sq.max_abs_diff(&rhs) < 1e-14, "d={d}");
        }
    }

    proptest! {
        #[test]
        fn blocks_reproduce_spectrum(d in 1usize..8, raw in prop::collection::vec(-1.0f64..1.0, 9)) {
            let p = params(d, &raw);
            let op = SymmetricOperator::from_rho2(&p);
            let a = block_spectrum(&op);
            let b = dense_spectrum(&op);
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-10, "{:?} vs {:?}", a, b);
            }
        }
    }
}
