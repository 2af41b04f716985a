//! Young diagrams: the labels of the party-site-symmetric basis.
//!
//! A diagram with rows `[3, 2, 1, 1]` describes every string in `{1..d}^7`
//! that uses four distinct sites, one of them three times, one twice and two
//! once. Diagrams are stored as weakly decreasing row lists.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exact::{binomial, factorial, falling};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct YoungDiagram {
    rows: Vec<usize>,
}

/// One cluster of equal-length rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Run {
    /// Row length `M_q`.
    pub length: usize,
    /// Number of rows with that length, `l_q`.
    pub count: usize,
}

/// Run-length encoding of a diagram, shortest rows first (`q = 1` is the
/// bottom cluster).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramRuns {
    pub entries: Vec<Run>,
}

impl DiagramRuns {
    /// Number of distinct row lengths.
    pub fn p(&self) -> usize {
        self.entries.len()
    }

    pub fn to_diagram(&self) -> YoungDiagram {
        let mut rows = Vec::new();
        for run in self.entries.iter().rev() {
            rows.extend(std::iter::repeat(run.length).take(run.count));
        }
        YoungDiagram { rows }
    }

    /// `Δ(q, r)`: whether cluster `q` (1-based) is exactly `r` longer than cluster `q - 1`.
    pub fn step(&self, q: usize, r: usize) -> bool {
        q >= 2 && q <= self.p() && self.entries[q - 1].length == self.entries[q - 2].length + r
    }

    /// 1-based index of the cluster with the given row length.
    pub fn cluster_of(&self, length: usize) -> Option<usize> {
        self.entries.iter().position(|r| r.length == length).map(|i| i + 1)
    }

    pub fn count_of(&self, length: usize) -> usize {
        self.entries
            .iter()
            .find(|r| r.length == length)
            .map_or(0, |r| r.count)
    }
}

impl YoungDiagram {
    pub fn new(rows: Vec<usize>) -> Result<Self> {
        if rows.is_empty() {
            return domain("a Young diagram needs at least one row");
        }
        for (i, &r) in rows.iter().enumerate() {
            if r == 0 {
                return domain(format!("row {} has length 0", i + 1));
            }
            if i > 0 && r > rows[i - 1] {
                return domain(format!(
                    "row {} (length {}) is longer than row {} (length {})",
                    i + 1,
                    r,
                    i,
                    rows[i - 1]
                ));
            }
        }
        Ok(Self { rows })
    }

    /// Build from arbitrary positive row lengths, sorting them.
    pub fn from_unsorted(mut rows: Vec<usize>) -> Result<Self> {
        rows.retain(|&r| r > 0);
        rows.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(rows)
    }

    /// The rectangular diagram `y(k)`: `k` rows of length `n / k`.
    pub fn rectangle(n: usize, k: usize) -> Result<Self> {
        if k == 0 || n == 0 || n % k != 0 {
            return domain(format!(
                "rectangular diagram requires divisibility: k = {k} does not divide n = {n}"
            ));
        }
        Ok(Self { rows: vec![n / k; k] })
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    /// Number of blocks.
    pub fn n(&self) -> usize {
        self.rows.iter().sum()
    }

    /// Number of rows.
    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn runs(&self) -> DiagramRuns {
        let mut entries: Vec<Run> = Vec::new();
        for &r in self.rows.iter().rev() {
            match entries.last_mut() {
                Some(run) if run.length == r => run.count += 1,
                _ => entries.push(Run { length: r, count: 1 }),
            }
        }
        DiagramRuns { entries }
    }

    /// Whether some site is occupied by exactly one particle.
    pub fn has_isolated_particles(&self) -> bool {
        *self.rows.last().expect("non-empty") == 1
    }

    /// `Some(k)` when all rows have the same length.
    pub fn rectangular_rows(&self) -> Option<usize> {
        (self.rows[0] == *self.rows.last().expect("non-empty")).then_some(self.k())
    }

    /// `Π_y = Π_q l_q! (M_q!)^{l_q}`.
    pub fn pi(&self) -> BigUint {
        self.runs().entries.iter().fold(BigUint::one(), |acc, run| {
            acc * factorial(run.count) * factorial(run.length).pow(run.count as u32)
        })
    }

    /// Number of computational basis strings in the orbit of this diagram,
    /// `d! n! / ((d - k)! Π_y)`.
    pub fn normalization_constant(&self, d: usize) -> Result<BigUint> {
        if self.k() > d {
            return domain(format!(
                "diagram {self} has {} rows but only {d} sites",
                self.k()
            ));
        }
        Ok(falling(d, self.k()) * factorial(self.n()) / self.pi())
    }

    /// Diagrams reached by deleting the last block of one row cluster.
    ///
    /// One child per distinct row length, returned in canonical order.
    pub fn remove_block_children(&self) -> Result<Vec<YoungDiagram>> {
        if self.n() < 2 {
            return domain("removing a block from a one-block diagram leaves the empty diagram");
        }
        let mut out = Vec::new();
        for (i, &r) in self.rows.iter().enumerate() {
            let last_of_cluster = i + 1 == self.rows.len() || self.rows[i + 1] != r;
            if last_of_cluster {
                let mut rows = self.rows.clone();
                if r == 1 {
                    rows.remove(i);
                } else {
                    rows[i] -= 1;
                }
                out.push(YoungDiagram { rows });
            }
        }
        out.sort_by(|a, b| b.cmp(a));
        Ok(out)
    }

    /// Diagrams reached by adding one block.
    pub fn add_block_parents(&self) -> Vec<YoungDiagram> {
        let mut out = Vec::new();
        for (i, &r) in self.rows.iter().enumerate() {
            let first_of_cluster = i == 0 || self.rows[i - 1] != r;
            if first_of_cluster {
                let mut rows = self.rows.clone();
                rows[i] += 1;
                out.push(YoungDiagram { rows });
            }
        }
        let mut rows = self.rows.clone();
        rows.push(1);
        out.push(YoungDiagram { rows });
        out.sort_by(|a, b| b.cmp(a));
        out
    }

    /// Row-length multiset as counts indexed by length.
    pub(crate) fn length_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.rows[0] + 1];
        for &r in &self.rows {
            counts[r] += 1;
        }
        counts
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rows.iter().map(|r| r.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for YoungDiagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty diagram".into()));
        }
        let mut rows = Vec::new();
        for (i, tok) in s.split(',').enumerate() {
            let tok = tok.trim();
            let r: usize = tok.parse().map_err(|_| {
                Error::Parse(format!("row {}: '{tok}' is not a positive integer", i + 1))
            })?;
            if r == 0 {
                return Err(Error::Parse(format!("row {}: length must be at least 1", i + 1)));
            }
            if let Some(&prev) = rows.last() {
                if r > prev {
                    return Err(Error::Parse(format!(
                        "row {} (length {r}) is longer than row {} (length {prev}); rows must be weakly decreasing",
                        i + 1,
                        i
                    )));
                }
            }
            rows.push(r);
        }
        Ok(Self { rows })
    }
}

impl TryFrom<String> for YoungDiagram {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<YoungDiagram> for String {
    fn from(y: YoungDiagram) -> String {
        y.to_string()
    }
}

/// All diagrams with `n` blocks and at most `d` rows, lexicographically decreasing.
pub fn enumerate_diagrams(n: usize, d: usize) -> Result<Vec<YoungDiagram>> {
    if n == 0 || d == 0 {
        return domain(format!("need n >= 1 and d >= 1 (got n = {n}, d = {d})"));
    }
    fn rec(remaining: usize, max_part: usize, rows_left: usize, cur: &mut Vec<usize>, out: &mut Vec<YoungDiagram>) {
        if remaining == 0 {
            out.push(YoungDiagram { rows: cur.clone() });
            return;
        }
        if rows_left == 0 {
            return;
        }
        for part in (1..=max_part.min(remaining)).rev() {
            // the remaining rows cannot hold more than part * rows_left blocks
            if part * rows_left < remaining {
                break;
            }
            cur.push(part);
            rec(remaining - part, part, rows_left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, d, &mut Vec::new(), &mut out);
    Ok(out)
}

/// `𝒜_k = C(d, k) n! / ((n/k)!)^k`, the orbit size of the rectangular diagram.
pub fn rectangular_constant(n: usize, k: usize, d: usize) -> Result<BigUint> {
    if k == 0 || n % k != 0 {
        return domain(format!(
            "rectangular diagram requires divisibility: k = {k} does not divide n = {n}"
        ));
    }
    if k > d {
        return domain(format!("k = {k} rows exceed d = {d} sites"));
    }
    Ok(binomial(d, k) * factorial(n) / factorial(n / k).pow(k as u32))
}

/// How two compatible diagrams differ by a single block move.
///
/// With common child `w`, `y` is `w` with a block added to a row of length
/// `len_in_child_y`, and `z` is `w` with a block added to a row of length
/// `len_in_child_z`. A length of 0 means the block starts a new row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMove {
    pub child: YoungDiagram,
    pub len_in_child_y: usize,
    pub len_in_child_z: usize,
}

impl BlockMove {
    /// Cluster labels `(m₁, m₂)` in `y`: the block leaves the cluster of rows of
    /// length `len_in_child_y + 1` and joins the cluster of length
    /// `len_in_child_z` (`None` when it starts a new row).
    pub fn clusters_in_y(&self, y: &YoungDiagram) -> (usize, Option<usize>) {
        let runs = y.runs();
        let m1 = runs
            .cluster_of(self.len_in_child_y + 1)
            .expect("source cluster present");
        let m2 = if self.len_in_child_z == 0 {
            None
        } else {
            runs.cluster_of(self.len_in_child_z)
        };
        (m1, m2)
    }

    /// The same move seen from `z`.
    pub fn reversed(&self) -> BlockMove {
        BlockMove {
            child: self.child.clone(),
            len_in_child_y: self.len_in_child_z,
            len_in_child_z: self.len_in_child_y,
        }
    }
}

/// `G(y, z)` with the move that relates the two diagrams when they are compatible.
pub fn compatibility(y: &YoungDiagram, z: &YoungDiagram) -> Result<Option<BlockMove>> {
    if y.n() != z.n() {
        return domain(format!(
            "compatibility needs equal block counts ({} has {}, {} has {})",
            y,
            y.n(),
            z,
            z.n()
        ));
    }
    if y == z {
        return domain("compatibility is defined for distinct diagrams");
    }
    if y.n() < 2 {
        return Ok(None);
    }
    let cy: BTreeSet<YoungDiagram> = y.remove_block_children()?.into_iter().collect();
    let cz: BTreeSet<YoungDiagram> = z.remove_block_children()?.into_iter().collect();
    let Some(child) = cy.intersection(&cz).next().cloned() else {
        return Ok(None);
    };
    let len_in_child_y = added_row_length(&child, y);
    let len_in_child_z = added_row_length(&child, z);
    Ok(Some(BlockMove {
        child,
        len_in_child_y,
        len_in_child_z,
    }))
}

pub fn compatible(y: &YoungDiagram, z: &YoungDiagram) -> Result<bool> {
    Ok(compatibility(y, z)?.is_some())
}

/// Length (in `child`) of the row that grows by one block to give `parent`.
fn added_row_length(child: &YoungDiagram, parent: &YoungDiagram) -> usize {
    for (i, &r) in parent.rows.iter().enumerate() {
        let c = child.rows.get(i).copied().unwrap_or(0);
        if r != c {
            return c;
        }
    }
    unreachable!("parent differs from child by one block")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y(s: &str) -> YoungDiagram {
        s.parse().unwrap()
    }

    /// Partition numbers from the standard recurrence on largest part.
    fn partition_count(n: usize, max: usize) -> usize {
        if n == 0 {
            return 1;
        }
        (1..=max.min(n)).map(|p| partition_count(n - p, p)).sum()
    }

    #[test]
    fn enumerate_small() {
        let e: Vec<String> = enumerate_diagrams(3, 3).unwrap().iter().map(|d| d.to_string()).collect();
        assert_eq!(e, ["3", "2,1", "1,1,1"]);
        let e: Vec<String> = enumerate_diagrams(4, 2).unwrap().iter().map(|d| d.to_string()).collect();
        assert_eq!(e, ["4", "3,1", "2,2"]);
        assert_eq!(enumerate_diagrams(10, 10).unwrap().len(), 42);
        assert!(enumerate_diagrams(0, 3).is_err());
        assert!(enumerate_diagrams(3, 0).is_err());
    }

    #[test]
    fn enumerate_matches_partition_numbers() {
        for n in 1..=12 {
            for d in [n, n + 3] {
                assert_eq!(enumerate_diagrams(n, d).unwrap().len(), partition_count(n, n));
            }
        }
    }

    #[test]
    fn enumeration_is_strictly_decreasing() {
        let e = enumerate_diagrams(9, 4).unwrap();
        for w in e.windows(2) {
            assert!(w[0] > w[1]);
        }
        assert!(e.iter().all(|d| d.k() <= 4 && d.n() == 9));
    }

    #[test]
    fn runs_examples() {
        let r = y("3,2,1,1").runs();
        assert_eq!(r.p(), 3);
        assert_eq!(
            r.entries,
            vec![
                Run { length: 1, count: 2 },
                Run { length: 2, count: 1 },
                Run { length: 3, count: 1 }
            ]
        );
        assert_eq!(y("2,2").runs().entries, vec![Run { length: 2, count: 2 }]);
        assert_eq!(y("5").runs().entries, vec![Run { length: 5, count: 1 }]);
        for d in enumerate_diagrams(8, 8).unwrap() {
            let runs = d.runs();
            assert_eq!(runs.to_diagram(), d);
            assert_eq!(runs.entries.iter().map(|r| r.count * r.length).sum::<usize>(), 8);
            assert_eq!(runs.entries.iter().map(|r| r.count).sum::<usize>(), d.k());
        }
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(y("1,1").normalization_constant(2).unwrap(), BigUint::from(2u32));
        assert_eq!(y("2").normalization_constant(2).unwrap(), BigUint::from(2u32));
        assert_eq!(y("2,1").normalization_constant(3).unwrap(), BigUint::from(18u32));
        assert!(y("1,1,1").normalization_constant(2).is_err());
    }

    #[test]
    fn orbit_sizes_partition_all_strings() {
        // Classify every string of {0..d}^n by its multiplicity shape.
        for n in 1..=5 {
            for d in 1..=4usize {
                let mut by_shape = std::collections::BTreeMap::<Vec<usize>, u64>::new();
                for idx in 0..d.pow(n as u32) {
                    let mut counts = vec![0usize; d];
                    let mut x = idx;
                    for _ in 0..n {
                        counts[x % d] += 1;
                        x /= d;
                    }
                    let mut shape: Vec<usize> = counts.into_iter().filter(|&c| c > 0).collect();
                    shape.sort_unstable_by(|a, b| b.cmp(a));
                    *by_shape.entry(shape).or_default() += 1;
                }
                let diagrams = enumerate_diagrams(n, d).unwrap();
                assert_eq!(diagrams.len(), by_shape.len());
                let mut total = BigUint::from(0u32);
                for dg in diagrams {
                    let a = dg.normalization_constant(d).unwrap();
                    assert_eq!(a, BigUint::from(by_shape[dg.rows()]));
                    total += a;
                }
                assert_eq!(total, BigUint::from(d).pow(n as u32));
            }
        }
    }

    #[test]
    fn rectangular_constant_examples() {
        assert_eq!(rectangular_constant(2, 2, 4).unwrap(), BigUint::from(12u32));
        assert_eq!(rectangular_constant(2, 1, 2).unwrap(), BigUint::from(2u32));
        assert_eq!(rectangular_constant(4, 2, 3).unwrap(), BigUint::from(18u32));
        let err = rectangular_constant(5, 2, 3).unwrap_err().to_string();
        assert!(err.contains("divisibility"));
    }

    #[test]
    fn rectangular_constant_matches_general() {
        for n in 1..=8 {
            for k in (1..=n).filter(|k| n % k == 0) {
                for d in k..=6 {
                    let rect = YoungDiagram::rectangle(n, k).unwrap();
                    assert_eq!(
                        rect.normalization_constant(d).unwrap(),
                        rectangular_constant(n, k, d).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn children_examples() {
        let c = |s: &str| -> Vec<String> {
            y(s).remove_block_children().unwrap().iter().map(|d| d.to_string()).collect()
        };
        assert_eq!(c("2,1"), ["2", "1,1"]);
        assert_eq!(c("4"), ["3"]);
        assert_eq!(c("2,2"), ["2,1"]);
        assert!(y("1").remove_block_children().is_err());
        for d in enumerate_diagrams(9, 9).unwrap() {
            assert_eq!(d.remove_block_children().unwrap().len(), d.runs().p());
            for parent in d.add_block_parents() {
                assert!(parent.remove_block_children().unwrap().contains(&d));
            }
        }
    }

    #[test]
    fn compatibility_examples() {
        assert!(compatible(&y("2,1"), &y("3")).unwrap());
        assert!(!compatible(&y("2,2"), &y("4")).unwrap());
        assert!(compatible(&y("3,1"), &y("2,2")).unwrap());
        assert!(compatible(&y("3"), &y("4")).is_err());

        let mv = compatibility(&y("2,1"), &y("3")).unwrap().unwrap();
        assert_eq!(mv.child, y("2"));
        assert_eq!(mv.len_in_child_y, 0);
        assert_eq!(mv.len_in_child_z, 2);
        assert_eq!(mv.clusters_in_y(&y("2,1")), (1, Some(2)));
    }

    #[test]
    fn compatibility_is_symmetric() {
        let ds = enumerate_diagrams(7, 7).unwrap();
        for a in &ds {
            for b in &ds {
                if a != b {
                    let ab = compatibility(a, b).unwrap();
                    let ba = compatibility(b, a).unwrap();
                    assert_eq!(ab.is_some(), ba.is_some());
                    if let (Some(ab), Some(ba)) = (ab, ba) {
                        assert_eq!(ab.reversed(), ba);
                    }
                }
            }
        }
    }

    #[test]
    fn isolated_particles() {
        assert!(y("3,1").has_isolated_particles());
        assert!(!y("2,2").has_isolated_particles());
        assert!(y("1").has_isolated_particles());
    }

    #[test]
    fn parser_messages() {
        assert_eq!(y("3,2,1,1").rows(), &[3, 2, 1, 1]);
        let e = "2,3".parse::<YoungDiagram>().unwrap_err().to_string();
        assert!(e.contains("row 2"), "{e}");
        let e = "2,x".parse::<YoungDiagram>().unwrap_err().to_string();
        assert!(e.contains("row 2"), "{e}");
        assert!("3,0".parse::<YoungDiagram>().is_err());
        assert!("".parse::<YoungDiagram>().is_err());
    }
}
