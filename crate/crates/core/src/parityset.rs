//! One-dimensional jump systems and their products.
//!
//! A [`GapFreeSet`] is a finite set of integers whose consecutive elements
//! differ by 1 or 2. Such a set splits uniquely into maximal parity
//! intervals; the number of interval boundaries crossed between two values is
//! the distance used by the local search. The boundaries are exactly the
//! pairs `(i, i + 1)` with both ends in the set, so every query here reduces
//! to a binary search over those pairs.

use std::fmt;
use std::ops::{Deref, DerefMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `Z^V`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntVector(Vec<i64>);

impl IntVector {
    pub fn zeros(n: usize) -> Self {
        IntVector(vec![0; n])
    }

    pub fn unit(n: usize, v: usize) -> Self {
        let mut x = Self::zeros(n);
        x.0[v] = 1;
        x
    }

    pub fn into_inner(self) -> Vec<i64> {
        self.0
    }

    pub fn l1_norm(&self) -> i64 {
        self.0.iter().map(|a| a.abs()).sum()
    }

    /// `‖self − other‖₁`.
    pub fn l1_distance(&self, other: &IntVector) -> i64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> IntVector {
        IntVector(self.0.iter().map(|a| -a).collect())
    }
}

impl From<Vec<i64>> for IntVector {
    fn from(v: Vec<i64>) -> Self {
        IntVector(v)
    }
}

impl Deref for IntVector {
    type Target = [i64];
    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl DerefMut for IntVector {
    fn deref_mut(&mut self) -> &mut [i64] {
        &mut self.0
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// `{lo, lo + 2, ..., hi}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ParityInterval {
    lo: i64,
    hi: i64,
}

impl ParityInterval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi || (hi - lo) % 2 != 0 {
            return Err(Error::BadParityInterval { lo, hi });
        }
        Ok(ParityInterval { lo, hi })
    }

    pub fn singleton(a: i64) -> Self {
        ParityInterval { lo: a, hi: a }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn contains(&self, a: i64) -> bool {
        self.lo <= a && a <= self.hi && (a - self.lo) % 2 == 0
    }

    pub fn len(&self) -> usize {
        ((self.hi - self.lo) / 2 + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn members(&self) -> impl Iterator<Item = i64> + '_ {
        (self.lo..=self.hi).step_by(2)
    }

    /// Restrict to `[min, max]`, keeping the parity class. `None` if nothing remains.
    pub fn restrict(&self, min: i64, max: i64) -> Option<ParityInterval> {
        let mut lo = self.lo.max(min);
        if (lo - self.lo) % 2 != 0 {
            lo += 1;
        }
        let mut hi = self.hi.min(max);
        if (self.hi - hi) % 2 != 0 {
            hi -= 1;
        }
        (lo <= hi).then_some(ParityInterval { lo, hi })
    }
}

impl fmt::Display for ParityInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

/// A finite one-dimensional jump system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct GapFreeSet {
    elements: Vec<i64>,
    /// Every `i` with `i` and `i + 1` both present, ascending.
    #[serde(skip)]
    boundaries: Vec<i64>,
}

impl GapFreeSet {
    pub fn new(elements: Vec<i64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut boundaries = Vec::new();
        for (i, w) in elements.windows(2).enumerate() {
            match w[1].checked_sub(w[0]) {
                Some(1) => boundaries.push(w[0]),
                Some(2) => {}
                _ => return Err(Error::GapTooLarge { index: i + 1 }),
            }
        }
        Ok(GapFreeSet {
            elements,
            boundaries,
        })
    }

    pub fn elements(&self) -> &[i64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> i64 {
        self.elements[0]
    }

    pub fn max(&self) -> i64 {
        *self.elements.last().unwrap()
    }

    pub fn contains(&self, a: i64) -> bool {
        self.elements.binary_search(&a).is_ok()
    }

    /// Maximal parity intervals in ascending order.
    pub fn maximal_parity_intervals(&self) -> Vec<ParityInterval> {
        let mut out = Vec::with_capacity(self.boundaries.len() + 1);
        let mut lo = self.min();
        for &b in &self.boundaries {
            out.push(ParityInterval { lo, hi: b });
            lo = b + 1;
        }
        out.push(ParityInterval { lo, hi: self.max() });
        out
    }

    pub fn interval_count(&self) -> usize {
        self.boundaries.len() + 1
    }

    /// The `j`-th maximal parity interval.
    pub fn interval(&self, j: usize) -> Option<ParityInterval> {
        if j > self.boundaries.len() {
            return None;
        }
        let lo = if j == 0 {
            self.min()
        } else {
            self.boundaries[j - 1] + 1
        };
        let hi = self
            .boundaries
            .get(j)
            .copied()
            .unwrap_or_else(|| self.max());
        Some(ParityInterval { lo, hi })
    }

    fn check_range(&self, a: i64) -> Result<()> {
        if a < self.min() || a > self.max() {
            return Err(Error::OutOfRange {
                vertex: 0,
                value: a,
                min: self.min(),
                max: self.max(),
            });
        }
        Ok(())
    }

    /// Number of consecutive pairs `(i, i + 1)` of the set inside `[min(a, b), max(a, b)]`.
    pub fn dist(&self, a: i64, b: i64) -> Result<u64> {
        self.check_range(a)?;
        self.check_range(b)?;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        // pairs with lo <= i and i + 1 <= hi
        let start = self.boundaries.partition_point(|&i| i < lo);
        let end = self.boundaries.partition_point(|&i| i < hi);
        Ok(end.saturating_sub(start) as u64)
    }

    /// Index of the maximal parity interval whose hull `[lo_j, hi_j]` holds `a`.
    /// The hulls tile `[min, max]`.
    pub fn interval_index(&self, a: i64) -> Result<usize> {
        self.check_range(a)?;
        Ok(self.boundaries.partition_point(|&i| i < a))
    }
}

impl<'de> Deserialize<'de> for GapFreeSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let elements = Vec::<i64>::deserialize(d)?;
        GapFreeSet::new(elements).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for GapFreeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// The box `B = Π_v B(v)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BProfile(Vec<GapFreeSet>);

impl BProfile {
    pub fn new(sets: Vec<GapFreeSet>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        Ok(BProfile(sets))
    }

    /// Convenience constructor from raw element lists.
    pub fn from_lists<I, L>(lists: I) -> Result<Self>
    where
        I: IntoIterator<Item = L>,
        L: Into<Vec<i64>>,
    {
        let sets = lists
            .into_iter()
            .map(|l| GapFreeSet::new(l.into()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sets)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn sets(&self) -> &[GapFreeSet] {
        &self.0
    }

    pub fn set(&self, v: usize) -> &GapFreeSet {
        &self.0[v]
    }

    /// `Σ_v |B(v)|`.
    pub fn size(&self) -> usize {
        self.0.iter().map(GapFreeSet::len).sum()
    }

    pub fn contains(&self, x: &IntVector) -> bool {
        x.len() == self.dim() && self.0.iter().zip(x.iter()).all(|(s, &a)| s.contains(a))
    }

    fn check_dim(&self, x: &IntVector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Checks `min B <= x <= max B`.
    pub fn check_in_box(&self, x: &IntVector) -> Result<()> {
        self.check_dim(x)?;
        for (v, (s, &a)) in self.0.iter().zip(x.iter()).enumerate() {
            if a < s.min() || a > s.max() {
                return Err(Error::OutOfRange {
                    vertex: v,
                    value: a,
                    min: s.min(),
                    max: s.max(),
                });
            }
        }
        Ok(())
    }

    pub fn check_member(&self, x: &IntVector) -> Result<()> {
        self.check_dim(x)?;
        for (v, (s, &a)) in self.0.iter().zip(x.iter()).enumerate() {
            if !s.contains(a) {
                return Err(Error::NotInProfile {
                    vertex: v,
                    value: a,
                });
            }
        }
        Ok(())
    }

    /// `dist_B(x, y)`, defined for points inside the box.
    pub fn dist(&self, x: &IntVector, y: &IntVector) -> Result<u64> {
        self.check_in_box(x)?;
        self.check_in_box(y)?;
        Ok(self
            .0
            .iter()
            .zip(x.iter().zip(y.iter()))
            .map(|(s, (&a, &b))| s.dist(a, b).expect("range checked"))
            .sum())
    }

    /// Number of coordinates with `x(v) ∉ B(v)`.
    pub fn q(&self, x: &IntVector) -> Result<usize> {
        self.check_dim(x)?;
        Ok(self
            .0
            .iter()
            .zip(x.iter())
            .filter(|(s, &a)| !s.contains(a))
            .count())
    }

    /// Partition of `{x' ∈ B : dist_B(x, x') <= 2}` into products of parity intervals.
    ///
    /// Each product is indexed by a shift `δ` with `Σ|δ_v| <= 2`: coordinate `v`
    /// takes the interval at `interval_index(x(v)) + δ_v`. Shifts that step off
    /// the interval list are skipped. Order: the zero shift, then single-vertex
    /// shifts `-1, +1, -2, +2` per vertex, then `(±1, ±1)` over vertex pairs.
    pub fn neighborhood_products(&self, x: &IntVector) -> Result<Vec<ParityProduct>> {
        self.check_member(x)?;
        let n = self.dim();
        let base: Vec<usize> = self
            .0
            .iter()
            .zip(x.iter())
            .map(|(s, &a)| s.interval_index(a).expect("member"))
            .collect();
        let pick = |v: usize, d: i64| -> Option<ParityInterval> {
            let j = base[v] as i64 + d;
            if j < 0 {
                return None;
            }
            self.0[v].interval(j as usize)
        };
        let home: Vec<ParityInterval> = (0..n).map(|v| pick(v, 0).unwrap()).collect();

        let mut out = vec![ParityProduct(home.clone())];
        for v in 0..n {
            for d in [-1, 1, -2, 2] {
                if let Some(iv) = pick(v, d) {
                    let mut p = home.clone();
                    p[v] = iv;
                    out.push(ParityProduct(p));
                }
            }
        }
        for u in 0..n {
            for v in u + 1..n {
                for (du, dv) in [(-1, -1), (-1, 1), (1, -1), (1, 1)] {
                    if let (Some(iu), Some(iv)) = (pick(u, du), pick(v, dv)) {
                        let mut p = home.clone();
                        p[u] = iu;
                        p[v] = iv;
                        out.push(ParityProduct(p));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// A direct product of parity intervals, one per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParityProduct(Vec<ParityInterval>);

impl ParityProduct {
    pub fn new(intervals: Vec<ParityInterval>) -> Self {
        ParityProduct(intervals)
    }

    /// `{x(v)}` for every `v`.
    pub fn singleton(x: &IntVector) -> Self {
        ParityProduct(x.iter().map(|&a| ParityInterval::singleton(a)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn intervals(&self) -> &[ParityInterval] {
        &self.0
    }

    pub fn contains(&self, x: &IntVector) -> bool {
        x.len() == self.dim() && self.0.iter().zip(x.iter()).all(|(iv, &a)| iv.contains(a))
    }

    /// Number of points, saturating.
    pub fn cardinality(&self) -> u128 {
        self.0
            .iter()
            .fold(1u128, |acc, iv| acc.saturating_mul(iv.len() as u128))
    }

    /// All member points in lexicographic order.
    pub fn points(&self) -> Vec<IntVector> {
        let mut out = vec![Vec::with_capacity(self.dim())];
        for iv in &self.0 {
            out = out
                .into_iter()
                .flat_map(|p| {
                    iv.members().map(move |a| {
                        let mut q = p.clone();
                        q.push(a);
                        q
                    })
                })
                .collect();
        }
        out.into_iter().map(IntVector).collect()
    }
}

impl fmt::Display for ParityProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, iv) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

/// Parses `lo:hi,lo:hi,...`; a bare `a` means `a:a`.
impl FromStr for ParityProduct {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Syntax(format!("expected an integer, found {t:?}")))
        };
        s.split(',')
            .map(|part| match part.split_once(':') {
                Some((lo, hi)) => ParityInterval::new(num(lo)?, num(hi)?),
                None => Ok(ParityInterval::singleton(num(part)?)),
            })
            .collect::<Result<Vec<_>>>()
            .map(ParityProduct)
    }
}
