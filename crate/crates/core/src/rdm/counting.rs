//! String counts behind reduced-density-matrix entries.
//!
//! For basis diagrams `y`, `z` and index prefixes `ket`, `bra` of equal
//! length, the count `N` is the number of suffixes `s` such that `ket·s`
//! lies in the orbit of `y` and `bra·s` in the orbit of `z`. Every entry of
//! `ρ₁` and `ρ₂` for a superposition is a weighted sum of such counts.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, Result};
use crate::exact::{binomial_signed, factorial, falling, rat_int, ratio};
use crate::young::{compatibility, YoungDiagram};

fn check_prefixes(y: &YoungDiagram, z: &YoungDiagram, ket: &[usize], bra: &[usize], d: usize) -> Result<()> {
    if y.n() != z.n() {
        return domain("diagrams must have the same number of blocks");
    }
    if ket.len() != bra.len() || ket.len() > y.n() {
        return domain("prefixes must have equal length, at most n");
    }
    if ket.iter().chain(bra).any(|&s| s >= d) {
        return domain(format!("prefix sites must be below d = {d}"));
    }
    Ok(())
}

fn shape_of(counts: &[usize]) -> Vec<usize> {
    let mut rows: Vec<usize> = counts.iter().copied().filter(|&c| c > 0).collect();
    rows.sort_unstable_by(|a, b| b.cmp(a));
    rows
}

/// Count by enumerating all `d^{n−len}` suffixes. Intended for small cases.
pub fn exhaustive_pair_count(
    y: &YoungDiagram,
    z: &YoungDiagram,
    ket: &[usize],
    bra: &[usize],
    d: usize,
) -> Result<BigUint> {
    check_prefixes(y, z, ket, bra, d)?;
    let len = y.n() - ket.len();
    let total = crate::pss::pow_u128(d, len).unwrap_or(u128::MAX);
    if total > 1 << 32 {
        return domain("exhaustive count too large");
    }
    let mut suffix = vec![0usize; len];
    let mut hits: u64 = 0;
    let mut ket_counts = vec![0usize; d];
    let mut bra_counts = vec![0usize; d];
    for _ in 0..total {
        ket_counts.fill(0);
        bra_counts.fill(0);
        for &s in ket {
            ket_counts[s] += 1;
        }
        for &s in bra {
            bra_counts[s] += 1;
        }
        for &s in &suffix {
            ket_counts[s] += 1;
            bra_counts[s] += 1;
        }
        if shape_of(&ket_counts) == y.rows() && shape_of(&bra_counts) == z.rows() {
            hits += 1;
        }
        for slot in suffix.iter_mut().rev() {
            *slot += 1;
            if *slot < d {
                break;
            }
            *slot = 0;
        }
    }
    Ok(BigUint::from(hits))
}

/// `𝒩_{i,j}` for sites `i ≠ j` by exhaustive enumeration.
pub fn exhaustive_overlap_count(y: &YoungDiagram, d: usize, i: usize, j: usize) -> Result<BigUint> {
    if i == j {
        return domain("overlap counts need distinct sites");
    }
    exhaustive_pair_count(y, y, &[i], &[j], d)
}

/// Row-length multiset `rows` minus `remove` (both as length → count tables),
/// or `None` if `remove` is not contained in `rows`.
fn subtract(rows: &[usize], remove: &[usize]) -> Option<Vec<usize>> {
    let mut out = rows.to_vec();
    for (len, &c) in remove.iter().enumerate() {
        if c == 0 {
            continue;
        }
        if len >= out.len() || out[len] < c {
            return None;
        }
        out[len] -= c;
    }
    Some(out)
}

/// Count by summing over how the suffix occupies the prefix sites.
///
/// With `t` distinct prefix sites, the suffix puts `m_e` particles on each
/// of them and the rest on the other `d − t` sites in some shape `λ`. Both
/// strings then have known shapes; `λ` must complete each to its diagram.
/// Each admissible `(m, λ)` contributes the number of ways to place
/// `λ` on the free sites times the multinomial number of orderings.
pub fn prefix_pair_count(
    y: &YoungDiagram,
    z: &YoungDiagram,
    ket: &[usize],
    bra: &[usize],
    d: usize,
) -> Result<BigUint> {
    check_prefixes(y, z, ket, bra, d)?;
    let mut sites: Vec<usize> = ket.iter().chain(bra).copied().collect();
    sites.sort_unstable();
    sites.dedup();
    let t = sites.len();
    let pos = |s: usize| sites.binary_search(&s).expect("listed");
    let mut cnt_ket = vec![0usize; t];
    let mut cnt_bra = vec![0usize; t];
    for &s in ket {
        cnt_ket[pos(s)] += 1;
    }
    for &s in bra {
        cnt_bra[pos(s)] += 1;
    }
    let len = y.n() - ket.len();
    let width = y.rows()[0].max(z.rows()[0]) + 1;
    let pad = |v: Vec<usize>| {
        let mut v = v;
        v.resize(width, 0);
        v
    };
    let y_counts = pad(y.length_counts());
    let z_counts = pad(z.length_counts());
    let len_fact = factorial(len);

    let mut total = BigUint::zero();
    let mut m = vec![0usize; t];
    loop {
        let used: usize = m.iter().sum();
        if used <= len {
            total += configuration_count(&m, &cnt_ket, &cnt_bra, &y_counts, &z_counts, d - t, len - used, &len_fact);
        }
        // odometer over m ∈ [0, len]^t
        let mut k = 0;
        while k < t {
            m[k] += 1;
            if m[k] <= len {
                break;
            }
            m[k] = 0;
            k += 1;
        }
        if k == t {
            break;
        }
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn configuration_count(
    m: &[usize],
    cnt_ket: &[usize],
    cnt_bra: &[usize],
    y_counts: &[usize],
    z_counts: &[usize],
    free_sites: usize,
    free_blocks: usize,
    len_fact: &BigUint,
) -> BigUint {
    let width = y_counts.len();
    let mut ket_rows = vec![0usize; width];
    let mut bra_rows = vec![0usize; width];
    for e in 0..m.len() {
        let (a, b) = (m[e] + cnt_ket[e], m[e] + cnt_bra[e]);
        if a >= width || b >= width {
            return BigUint::zero();
        }
        if a > 0 {
            ket_rows[a] += 1;
        }
        if b > 0 {
            bra_rows[b] += 1;
        }
    }
    let (Some(lambda), Some(lambda_z)) = (subtract(y_counts, &ket_rows), subtract(z_counts, &bra_rows)) else {
        return BigUint::zero();
    };
    if lambda != lambda_z {
        return BigUint::zero();
    }
    let rows: usize = lambda.iter().sum();
    let blocks: usize = lambda.iter().enumerate().map(|(len, c)| len * c).sum();
    if blocks != free_blocks || rows > free_sites {
        return BigUint::zero();
    }
    // choose which free sites carry which row lengths
    let mut placements = falling(free_sites, rows);
    for &c in &lambda {
        placements /= factorial(c);
    }
    // orderings of the suffix
    let mut denom = BigUint::one();
    for &me in m {
        denom *= factorial(me);
    }
    for (len, &c) in lambda.iter().enumerate() {
        denom *= factorial(len).pow(c as u32);
    }
    placements * (len_fact / denom)
}

/// Strings `s` of shape `w` in which site `i` holds `a` particles and site
/// `j ≠ i` holds `b`. These are the common suffixes of `i·s ∈ y` and
/// `j·s ∈ z` when `y` grows `w` at a row of length `a` and `z` grows it at
/// a row of length `b` (0 meaning a new row).
pub fn block_move_count(w: &YoungDiagram, a: usize, b: usize, d: usize) -> BigUint {
    if d < 2 {
        return BigUint::zero();
    }
    let mut counts = w.length_counts();
    for len in [a, b] {
        if len > 0 {
            if len >= counts.len() || counts[len] == 0 {
                return BigUint::zero();
            }
            counts[len] -= 1;
        }
    }
    let rest: usize = counts.iter().sum();
    let mut placements = falling(d - 2, rest);
    for &c in &counts {
        placements /= factorial(c);
    }
    let mut orderings = factorial(w.n());
    for &r in w.rows() {
        orderings /= factorial(r);
    }
    placements * orderings
}

/// `𝒩_{i,j}` for a single diagram: remove one block, then put it back
/// once at `i` and once at `j`.
pub fn overlap_count(y: &YoungDiagram, d: usize) -> Result<BigUint> {
    if y.k() > d {
        return domain(format!("diagram {y} has more than d = {d} rows"));
    }
    let mut total = BigUint::zero();
    for child in y.remove_block_children()? {
        let grown = grown_row_length(&child, y);
        total += block_move_count(&child, grown, grown, d);
    }
    Ok(total)
}

fn grown_row_length(child: &YoungDiagram, parent: &YoungDiagram) -> usize {
    parent
        .rows()
        .iter()
        .enumerate()
        .find(|&(i, &r)| child.rows().get(i).copied().unwrap_or(0) != r)
        .map(|(i, _)| child.rows().get(i).copied().unwrap_or(0))
        .expect("parent has one more block")
}

/// Closed form of [`overlap_count`] in run-length notation:
/// `(d−2)!(n−1)!/((d−k)! Π_y) · (δ(M₁−1) l₁ (d−k) + Σ_{q≥2} Δ(q,1) l_q l_{q−1} M_q)`.
pub fn overlap_count_closed(y: &YoungDiagram, d: usize) -> Result<BigRational> {
    run_formula(y, d, 1)
}

/// The same expression with the cluster sum doubled, as it is sometimes
/// quoted. It over-counts whenever adjacent clusters differ by one block.
pub fn overlap_count_as_printed(y: &YoungDiagram, d: usize) -> Result<BigRational> {
    run_formula(y, d, 2)
}

fn run_formula(y: &YoungDiagram, d: usize, cluster_weight: usize) -> Result<BigRational> {
    let (n, k) = (y.n(), y.k());
    if n < 2 {
        return domain("overlap counts need n >= 2");
    }
    if k > d {
        return domain(format!("diagram {y} has more than d = {d} rows"));
    }
    if d < 2 {
        return Ok(BigRational::zero());
    }
    let runs = y.runs();
    let bottom = runs.entries[0];
    let mut bracket = BigUint::zero();
    if bottom.length == 1 {
        bracket += BigUint::from(bottom.count * (d - k));
    }
    for q in 2..=runs.p() {
        if runs.step(q, 1) {
            let (hi, lo) = (runs.entries[q - 1], runs.entries[q - 2]);
            bracket += BigUint::from(cluster_weight * hi.count * lo.count * hi.length);
        }
    }
    // (d−2)!/(d−k)! as a ratio, valid for k = 1 too
    let sites = if k >= 2 {
        rat_int(&falling(d - 2, k - 2))
    } else {
        ratio(&BigUint::one(), &BigUint::from(d - 1))
    };
    Ok(sites * ratio(&(factorial(n - 1) * bracket), &y.pi()))
}

/// Cross-diagram overlap count for `i ≠ j`: strings `s` with `i·s ∈ y` and
/// `j·s ∈ z`. Nonzero only for compatible diagrams.
pub fn cross_overlap_count(y: &YoungDiagram, z: &YoungDiagram, d: usize) -> Result<BigUint> {
    Ok(match compatibility(y, z)? {
        Some(mv) => block_move_count(&mv.child, mv.len_in_child_y, mv.len_in_child_z, d),
        None => BigUint::zero(),
    })
}

/// The rectangular-diagram counts `𝒩` for every two-party class, with
/// `i, j, k, l` distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectangularCounts {
    pub i_j: BigUint,
    pub ii_ii: BigUint,
    pub ij_ij: BigUint,
    pub ii_jj: BigUint,
    pub ij_ik: BigUint,
    pub ij_kl: BigUint,
    pub ii_ij: BigUint,
    pub ii_jk: BigUint,
}

pub fn rectangular_counts(n: usize, k: usize, d: usize) -> Result<RectangularCounts> {
    if n < 2 || k == 0 || n % k != 0 {
        return domain(format!(
            "rectangular diagram requires divisibility and n >= 2 (n = {n}, k = {k})"
        ));
    }
    if k > d {
        return domain(format!("k = {k} rows exceed d = {d} sites"));
    }
    let rows = n / k;
    let full = k == n;
    let nm2 = factorial(n - 2);
    let when = |cond: bool, v: BigUint| if cond { v } else { BigUint::zero() };
    // falling factorials stand in for (d-a)!/(d-b)!; they vanish when a class needs more sites than exist
    let fall = |top: usize, m: usize| if d >= top { falling(d - top, m) } else { BigUint::zero() };
    let ii_ii = if full || d < 1 {
        BigUint::zero()
    } else {
        binomial_signed(d as i64 - 1, k as i64 - 1) * &nm2
            / (factorial(rows - 2) * factorial(rows).pow((k - 1) as u32))
    };
    let ij_ij = if k < 2 || d < 2 {
        BigUint::zero()
    } else {
        binomial_signed(d as i64 - 2, k as i64 - 2) * &nm2
            / (factorial(rows - 1).pow(2) * factorial(rows).pow((k - 2) as u32))
    };
    let ii_jj = when(
        2 * k == n && d >= 2,
        binomial_signed(d as i64 - 2, (n / 2) as i64 - 1) * &nm2 / BigUint::from(2u32).pow((n / 2 - 1) as u32),
    );
    Ok(RectangularCounts {
        i_j: when(full, fall(2, n - 1)),
        ii_ii,
        ij_ij,
        ii_jj,
        ij_ik: when(full, fall(3, n - 2)),
        ij_kl: when(full, fall(4, n - 2)),
        ii_ij: BigUint::zero(),
        ii_jk: BigUint::zero(),
    })
}

/// `N` as a float through the exact ratio `N / √(𝒜_y 𝒜_z)`.
pub(crate) fn weighted(count: &BigUint, a_y: &BigUint, a_z: &BigUint) -> f64 {
    if count.is_zero() {
        return 0.0;
    }
    let num = count * count;
    let den = a_y * a_z;
    let g = num.gcd(&den);
    ratio(&(num / &g), &(den / g)).to_f64().unwrap_or(f64::NAN).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::young::enumerate_diagrams;

    fn y(s: &str) -> YoungDiagram {
        s.parse().unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(exhaustive_overlap_count(&y("1,1"), 4, 0, 1).unwrap(), big(2));
        assert_eq!(overlap_count(&y("1,1"), 4).unwrap(), big(2));
        assert_eq!(exhaustive_overlap_count(&y("2,1"), 3, 0, 1).unwrap(), big(3));
        assert_eq!(overlap_count(&y("2,1"), 3).unwrap(), big(3));
        assert_eq!(overlap_count_closed(&y("2,1"), 3).unwrap(), rat_int(&big(3)));
        assert_eq!(overlap_count_as_printed(&y("2,1"), 3).unwrap(), rat_int(&big(5)));
        assert_eq!(exhaustive_overlap_count(&y("2"), 2, 0, 1).unwrap(), big(0));
        assert_eq!(overlap_count(&y("2"), 2).unwrap(), big(0));
    }

    #[test]
    fn overlap_rules_agree_with_enumeration() {
        for n in 2..=6 {
            for d in 2..=5 {
                for dg in enumerate_diagrams(n, d).unwrap() {
                    let pairs = [(0, 1), (1, 0), (d - 1, 0)];
                    let oracle = exhaustive_overlap_count(&dg, d, pairs[0].0, pairs[0].1).unwrap();
                    for (i, j) in &pairs[1..] {
                        assert_eq!(exhaustive_overlap_count(&dg, d, *i, *j).unwrap(), oracle);
                    }
                    assert_eq!(overlap_count(&dg, d).unwrap(), oracle, "{dg} d={d}");
                    assert_eq!(overlap_count_closed(&dg, d).unwrap(), rat_int(&oracle), "{dg} d={d}");
                    assert_eq!(prefix_pair_count(&dg, &dg, &[0], &[1], d).unwrap(), oracle);
                }
            }
        }
    }

    #[test]
    fn prefix_counts_agree_with_enumeration() {
        let patterns: [(&[usize], &[usize]); 9] = [
            (&[0, 0], &[0, 0]),
            (&[0, 1], &[0, 1]),
            (&[0, 1], &[1, 0]),
            (&[0, 1], &[2, 3]),
            (&[0, 0], &[1, 2]),
            (&[0, 1], &[0, 2]),
            (&[0, 0], &[1, 1]),
            (&[0, 0], &[0, 1]),
            (&[1, 2], &[0, 0]),
        ];
        for n in 2..=5 {
            for d in 1..=4 {
                let ds = enumerate_diagrams(n, d).unwrap();
                for a in &ds {
                    for b in &ds {
                        for (ket, bra) in patterns {
                            if ket.iter().chain(bra).any(|&s| s >= d) {
                                continue;
                            }
                            assert_eq!(
                                prefix_pair_count(a, b, ket, bra, d).unwrap(),
                                exhaustive_pair_count(a, b, ket, bra, d).unwrap(),
                                "{a} {b} {ket:?} {bra:?} d={d}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cross_counts_agree_with_enumeration() {
        for n in 2..=6 {
            for d in 2..=4 {
                let ds = enumerate_diagrams(n, d).unwrap();
                for a in &ds {
                    for b in &ds {
                        if a == b {
                            continue;
                        }
                        let oracle = exhaustive_pair_count(a, b, &[0], &[1], d).unwrap();
                        assert_eq!(cross_overlap_count(a, b, d).unwrap(), oracle, "{a} {b} d={d}");
                        if !compatibility(a, b).unwrap().is_some() {
                            assert_eq!(oracle, BigUint::zero());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rectangular_counts_match_enumeration() {
        for n in 2..=6 {
            for k in (1..=n).filter(|k| n % k == 0) {
                for d in k..=5 {
                    let rect = YoungDiagram::rectangle(n, k).unwrap();
                    let c = rectangular_counts(n, k, d).unwrap();
                    let ex = |ket: &[usize], bra: &[usize]| {
                        if ket.iter().chain(bra).any(|&s| s >= d) {
                            None
                        } else {
                            Some(exhaustive_pair_count(&rect, &rect, ket, bra, d).unwrap())
                        }
                    };
                    let checks = [
                        (ex(&[0], &[1]), &c.i_j),
                        (ex(&[0, 0], &[0, 0]), &c.ii_ii),
                        (ex(&[0, 1], &[0, 1]), &c.ij_ij),
                        (ex(&[0, 0], &[1, 1]), &c.ii_jj),
                        (ex(&[0, 1], &[0, 2]), &c.ij_ik),
                        (ex(&[0, 1], &[2, 3]), &c.ij_kl),
                        (ex(&[0, 0], &[0, 1]), &c.ii_ij),
                        (ex(&[0, 0], &[1, 2]), &c.ii_jk),
                    ];
                    for (i, (oracle, formula)) in checks.iter().enumerate() {
                        if let Some(o) = oracle {
                            assert_eq!(o, *formula, "class {i}, n={n} k={k} d={d}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn block_move_examples() {
        assert_eq!(block_move_count(&y("2"), 0, 0, 3), big(1));
        assert_eq!(block_move_count(&y("1,1"), 1, 1, 3), big(2));
        // [2,1] and [3] share the child [2]: s = (k,k) with k the third site cannot work, s = (j,j) for i·s
        assert_eq!(cross_overlap_count(&y("2,1"), &y("3"), 3).unwrap(), big(1));
        assert_eq!(cross_overlap_count(&y("2,2"), &y("4"), 4).unwrap(), big(0));
    }
}
