//! Basic sectors of the ring, their dual description as subsets, and the
//! boolean-lattice counting around them.

use crate::error::{invalid, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

/// Largest ring length for which all 2^(L-1) sectors may be enumerated.
pub const MAX_ENUMERATION_L: usize = 30;

/// A basic sector: a composition `parts` of `l` with every part positive,
/// equivalently the subset of partial sums `{m1, m1+m2, ...}` of `{1..l-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sector {
    l: usize,
    parts: Vec<usize>,
    subset: Vec<usize>,
}

impl Sector {
    /// Build from a composition. Trailing zero parts are dropped (`2,2,0,0` is `2,2`).
    pub fn from_parts(parts: &[usize]) -> Result<Self> {
        let mut parts = parts.to_vec();
        while parts.len() > 1 && parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.is_empty() || parts.iter().any(|&m| m == 0) {
            return invalid(format!("parts {parts:?} must be positive"));
        }
        let l: usize = parts.iter().sum();
        let mut subset = Vec::with_capacity(parts.len() - 1);
        let mut acc = 0;
        for &m in &parts[..parts.len() - 1] {
            acc += m;
            subset.push(acc);
        }
        Ok(Self { l, parts, subset })
    }

    /// Build from a strictly increasing subset of `{1..l-1}`.
    pub fn from_subset(l: usize, subset: &[usize]) -> Result<Self> {
        if l == 0 {
            return invalid("ring length must be at least 1");
        }
        let mut prev = 0;
        for &s in subset {
            if s <= prev || s >= l {
                return invalid(format!("subset {subset:?} not strictly increasing inside 1..{}", l - 1));
            }
            prev = s;
        }
        let mut parts = Vec::with_capacity(subset.len() + 1);
        let mut last = 0;
        for &s in subset.iter().chain(std::iter::once(&l)) {
            parts.push(s - last);
            last = s;
        }
        Ok(Self { l, parts, subset: subset.to_vec() })
    }

    /// Build from a bitmask whose bit `i` marks `i` in the subset.
    pub fn from_mask(l: usize, mask: u64) -> Result<Self> {
        let subset: Vec<usize> = (1..l).filter(|&i| (mask >> i) & 1 == 1).collect();
        if (mask & 1) == 1 || (l < 64 && (mask >> l) != 0) {
            return invalid(format!("mask {mask:#b} outside 1..{}", l.saturating_sub(1)));
        }
        Self::from_subset(l, &subset)
    }

    /// Parse `2,1,3,1` (parts) or `s:2,3,6` (subset). `l` is required for the
    /// subset form and checked against the parts sum otherwise.
    pub fn parse(text: &str, l: impl Into<Option<usize>>) -> Result<Self> {
        let l = l.into();
        let t = text.trim();
        let nums = |body: &str| -> Result<Vec<usize>> {
            if body.trim().is_empty() {
                return Ok(Vec::new());
            }
            body.split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|_| crate::Error::InvalidArgument(format!("bad sector '{text}'"))))
                .collect()
        };
        if let Some(body) = t.strip_prefix("s:") {
            let Some(l) = l else {
                return invalid("subset form 's:...' needs the ring length L");
            };
            return Self::from_subset(l, &nums(body)?);
        }
        let s = Self::from_parts(&nums(t)?)?;
        if let Some(l) = l {
            if s.l != l {
                return invalid(format!("sector {t} sums to {} but L = {l}", s.l));
            }
        }
        Ok(s)
    }

    /// The one-species vacuum sector `(L)`.
    pub fn vacuum(l: usize) -> Result<Self> {
        Self::from_subset(l, &[])
    }

    /// The maximal sector `(1,...,1)`, subset Ω.
    pub fn maximal(l: usize) -> Result<Self> {
        Self::from_subset(l, &(1..l).collect::<Vec<_>>())
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    /// Number of species n.
    pub fn species(&self) -> usize {
        self.parts.len()
    }

    pub fn mask(&self) -> u64 {
        self.subset.iter().fold(0u64, |m, &s| m | 1 << s)
    }

    pub fn is_subset_of(&self, other: &Sector) -> bool {
        self.l == other.l && self.mask() & !other.mask() == 0
    }

    /// The complement sector with subset Ω \ s.
    pub fn complement(&self) -> Sector {
        let mask = self.mask();
        let sub: Vec<usize> = (1..self.l).filter(|&i| (mask >> i) & 1 == 0).collect();
        Self::from_subset(self.l, &sub).expect("complement of a valid subset is valid")
    }

    /// Parts in reverse order, the image under charge conjugation.
    pub fn reversed(&self) -> Sector {
        let mut p = self.parts.clone();
        p.reverse();
        Self::from_parts(&p).expect("reversal keeps parts positive")
    }

    /// The two-part sector `(m1+..+mj, m(j+1)+..+mn)` for `1 <= j < n`.
    pub fn collapse(&self, j: usize) -> Result<Sector> {
        if j == 0 || j >= self.parts.len() {
            return invalid(format!("split {j} outside 1..{}", self.parts.len() - 1));
        }
        Self::from_subset(self.l, &[self.subset[j - 1]])
    }

    /// Sectors directly below in the Hasse diagram: `s \ {r}` for each r in s.
    pub fn covers_below(&self) -> Vec<Sector> {
        self.subset
            .iter()
            .map(|&r| {
                let sub: Vec<usize> = self.subset.iter().copied().filter(|&x| x != r).collect();
                Self::from_subset(self.l, &sub).expect("removing an element keeps validity")
            })
            .collect()
    }

    /// All sectors `u` with `u ⊆ s`, in canonical order.
    pub fn lower_set(&self) -> Vec<Sector> {
        let k = self.subset.len();
        let mut out: Vec<Sector> = (0u64..1 << k)
            .map(|bits| {
                let sub: Vec<usize> = (0..k).filter(|i| (bits >> i) & 1 == 1).map(|i| self.subset[i]).collect();
                Self::from_subset(self.l, &sub).expect("sub-subset is valid")
            })
            .collect();
        out.sort_by(canonical_cmp);
        out
    }

    /// Multinomial dimension `L! / (m1! ... mn!)`.
    pub fn dimension(&self) -> BigUint {
        multinomial(self.l, &self.parts)
    }

    /// Dimension as `usize` when it fits.
    pub fn dimension_usize(&self) -> Option<usize> {
        self.dimension().to_usize()
    }

    /// Genuine dimension: the signed sum of multinomials over all adjacent-merge contractions.
    pub fn genuine_dimension(&self) -> BigInt {
        genuine_dimension(&self.parts)
    }

    /// The nondecreasing reference word `1^m1 2^m2 ...`.
    pub fn reference_word(&self) -> Vec<u8> {
        self.parts.iter().enumerate().flat_map(|(a, &m)| std::iter::repeat((a + 1) as u8).take(m)).collect()
    }

    /// Text form `2,1,3,1`.
    pub fn text(&self) -> String {
        self.parts.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")
    }

    /// Subset text form `s:2,3,6`.
    pub fn subset_text(&self) -> String {
        format!("s:{}", self.subset.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","))
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.text())
    }
}

/// Canonical order: subset cardinality, then lexicographic subset.
pub fn canonical_cmp(a: &Sector, b: &Sector) -> std::cmp::Ordering {
    (a.l, a.subset.len(), &a.subset).cmp(&(b.l, b.subset.len(), &b.subset))
}

pub fn multinomial(l: usize, parts: &[usize]) -> BigUint {
    // Product of binomials keeps intermediates small.
    let mut out = BigUint::one();
    let mut used = 0usize;
    for &m in parts {
        used += m;
        out *= binomial(used, m);
    }
    debug_assert_eq!(used, l);
    out
}

fn binomial(n: usize, k: usize) -> BigUint {
    let k = k.min(n - k);
    let mut r = BigUint::one();
    for i in 0..k {
        r = r * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    r
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |a, i| a * BigUint::from(i))
}

fn suffix_memo() -> &'static Mutex<HashMap<Vec<usize>, BigRational>> {
    static MEMO: OnceLock<Mutex<HashMap<Vec<usize>, BigRational>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

// Σ over contractions c of `parts` of (-1)^(len - len(c)) / ∏ c_i!.
fn contraction_sum(parts: &[usize]) -> BigRational {
    if parts.is_empty() {
        return BigRational::one();
    }
    if let Some(v) = suffix_memo().lock().expect("memo poisoned").get(parts) {
        return v.clone();
    }
    let mut total = BigRational::zero();
    let mut block = 0usize;
    for k in 1..=parts.len() {
        block += parts[k - 1];
        let term = contraction_sum(&parts[k..]) / BigRational::from_integer(factorial(block).into());
        if (k - 1) % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    suffix_memo().lock().expect("memo poisoned").insert(parts.to_vec(), total.clone());
    total
}

/// Genuine dimension of the composition `parts`.
pub fn genuine_dimension(parts: &[usize]) -> BigInt {
    let l: usize = parts.iter().sum();
    let v = contraction_sum(parts) * BigRational::from_integer(factorial(l).into());
    debug_assert!(v.is_integer());
    v.to_integer()
}

/// Möbius function of the boolean lattice: `(-1)^(|upper|-|lower|)` when nested, else 0.
pub fn mobius(lower: &Sector, upper: &Sector) -> i32 {
    if !lower.is_subset_of(upper) {
        return 0;
    }
    if (upper.subset.len() - lower.subset.len()) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All 2^(L-1) basic sectors in canonical order.
pub fn enumerate_basic_sectors(l: usize) -> Result<Vec<Sector>> {
    if l == 0 {
        return invalid("ring length must be at least 1");
    }
    if l > MAX_ENUMERATION_L {
        return invalid(format!("L = {l} exceeds enumeration limit {MAX_ENUMERATION_L}"));
    }
    let mut out: Vec<Sector> = (0u64..1 << (l - 1)).map(|bits| Sector::from_mask(l, bits << 1).expect("valid mask")).collect();
    out.sort_by(canonical_cmp);
    Ok(out)
}

/// A comparable pair in the poset of sectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetRelation {
    pub lower: Sector,
    pub upper: Sector,
    pub covers: bool,
}

impl PosetRelation {
    pub fn new(lower: Sector, upper: Sector) -> Result<Self> {
        if !lower.is_subset_of(&upper) {
            return invalid(format!("{lower} is not below {upper}"));
        }
        let covers = upper.subset.len() == lower.subset.len() + 1;
        Ok(Self { lower, upper, covers })
    }
}

/// All cover edges `(s, s ∪ {r})` of the Hasse diagram, (L-1)·2^(L-2) of them.
pub fn hasse_cover_edges(l: usize) -> Result<Vec<PosetRelation>> {
    let mut out = Vec::new();
    for s in enumerate_basic_sectors(l)? {
        let mask = s.mask();
        for r in 1..l {
            if (mask >> r) & 1 == 0 {
                let upper = Sector::from_mask(l, mask | 1 << r)?;
                out.push(PosetRelation { lower: s.clone(), upper, covers: true });
            }
        }
    }
    Ok(out)
}

/// Factorial helper shared with tests and oracles.
pub fn factorial_big(n: usize) -> BigUint {
    factorial(n)
}
