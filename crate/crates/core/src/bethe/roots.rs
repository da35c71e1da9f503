use crate::error::{invalid, Result};
use num_complex::Complex64 as C;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Permutation `(a1..aN)` of `1..N` fixing the nesting order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestingOrder(Vec<usize>);

impl NestingOrder {
    pub fn new(a: Vec<usize>) -> Result<Self> {
        let mut s = a.clone();
        s.sort_unstable();
        if s != (1..=a.len()).collect::<Vec<_>>() {
            return invalid(format!("nesting {a:?} is not a permutation of 1..{}", a.len()));
        }
        Ok(Self(a))
    }

    pub fn standard(n: usize) -> Self {
        Self((1..=n).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `θ_ij = θ(a_i − a_j)`, 1-based.
    pub fn theta(&self, i: usize, j: usize) -> bool {
        self.0[i - 1] > self.0[j - 1]
    }
}

/// Nested Bethe roots `λ^(l)_j` for `l = 1..N−1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BetheRootSet {
    pub l: usize,
    pub p: f64,
    pub q: f64,
    pub nesting: NestingOrder,
    /// `counts[α−1] = m_α`
    pub counts: Vec<usize>,
    pub levels: Vec<Vec<C>>,
}

/// Level sizes and exponent data derived from counts and nesting.
#[derive(Clone, Debug)]
pub struct NestingData {
    pub n_species: usize,
    /// `n[k] = Σ_{j>k} m_{a_j}` for `k = 0..N`
    pub n: Vec<usize>,
    /// `nbar[k] = Σ_{j>k} m_{a_j} θ_kj` for `k = 1..N`; index 0 unused
    pub nbar: Vec<i64>,
    pub order: NestingOrder,
}

impl NestingData {
    pub fn new(counts: &[usize], order: &NestingOrder) -> Result<Self> {
        let nn = counts.len();
        if order.len() != nn {
            return invalid(format!("nesting length {} differs from species count {nn}", order.len()));
        }
        let mm: Vec<usize> = order.as_slice().iter().map(|&a| counts[a - 1]).collect();
        let n: Vec<usize> = (0..=nn).map(|k| mm[k..].iter().sum()).collect();
        let mut nbar = vec![0i64; nn + 1];
        for (k, nb) in nbar.iter_mut().enumerate().skip(1) {
            *nb = (k + 1..=nn).filter(|&j| order.theta(k, j)).map(|j| mm[j - 1] as i64).sum();
        }
        Ok(Self { n_species: nn, n, nbar, order: order.clone() })
    }

    fn dn(&self, j: usize) -> i64 {
        self.n[j - 1] as i64 - self.n[j] as i64
    }

    /// `Σ_{j=1}^{k} (n_{j−1} − n_j) θ_{j,t}`
    fn s(&self, k: usize, t: usize) -> i64 {
        (1..=k).filter(|&j| self.order.theta(j, t)).map(|j| self.dn(j)).sum()
    }

    /// Exponent of `q/p` in the k-th term of the eigenvalue formula, `k = 0..N−1`.
    pub fn term_exponent(&self, k: usize) -> i64 {
        if k == 0 {
            -self.nbar[1]
        } else {
            self.s(k, k + 1) - self.nbar[k + 1]
        }
    }

    /// Exponents `(A_l, B_l)` of the cleared level-l equation.
    pub fn equation_exponents(&self, l: usize) -> (i64, i64) {
        let a = self.s(l, l + 1) - if l >= 2 { self.s(l - 1, l) } else { 0 };
        let b = -self.nbar[l] + self.nbar[l + 1];
        (a, b)
    }
}

impl BetheRootSet {
    pub fn new(l: usize, p: f64, q: f64, nesting: NestingOrder, counts: Vec<usize>, levels: Vec<Vec<C>>) -> Result<Self> {
        let rs = Self { l, p, q, nesting, counts, levels };
        rs.validate()?;
        Ok(rs)
    }

    pub fn validate(&self) -> Result<()> {
        if self.counts.iter().sum::<usize>() != self.l {
            return invalid(format!("counts {:?} do not sum to L = {}", self.counts, self.l));
        }
        let nd = NestingData::new(&self.counts, &self.nesting)?;
        if self.levels.len() + 1 != nd.n_species {
            return invalid(format!("{} levels given, {} expected", self.levels.len(), nd.n_species.saturating_sub(1)));
        }
        for (i, lev) in self.levels.iter().enumerate() {
            if lev.len() != nd.n[i + 1] {
                return invalid(format!("level {} has {} roots, expected {}", i + 1, lev.len(), nd.n[i + 1]));
            }
        }
        if !(self.p > 0.0) || !(self.q >= 0.0) {
            return invalid("Bethe formulas need p > 0 and q >= 0");
        }
        Ok(())
    }

    pub fn data(&self) -> NestingData {
        NestingData::new(&self.counts, &self.nesting).expect("validated root set")
    }

    /// Every root set to `1/p`, the stationary root set.
    pub fn stationary(l: usize, p: f64, q: f64, nesting: NestingOrder, counts: Vec<usize>) -> Result<Self> {
        let nd = NestingData::new(&counts, &nesting)?;
        let levels = (1..nd.n_species).map(|k| vec![C::new(1.0 / p, 0.0); nd.n[k]]).collect();
        Self::new(l, p, q, nesting, counts, levels)
    }

    /// Sort every level by (Re, Im).
    pub fn canonicalize(&mut self) {
        for lev in &mut self.levels {
            lev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        }
    }

    pub fn is_at_inverse_p(&self, z: C) -> bool {
        (z - 1.0 / self.p).norm() <= 1e-6 / self.p
    }
}

#[derive(Serialize, Deserialize)]
struct RawRootSet {
    #[serde(rename = "L")]
    l: usize,
    p: f64,
    q: f64,
    nesting: Vec<usize>,
    counts: Vec<usize>,
    levels: Vec<Vec<[f64; 2]>>,
}

impl Serialize for BetheRootSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawRootSet {
            l: self.l,
            p: self.p,
            q: self.q,
            nesting: self.nesting.0.clone(),
            counts: self.counts.clone(),
            levels: self.levels.iter().map(|lev| lev.iter().map(|z| [z.re, z.im]).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BetheRootSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawRootSet::deserialize(d)?;
        let nesting = NestingOrder::new(raw.nesting).map_err(serde::de::Error::custom)?;
        let levels = raw.levels.into_iter().map(|lev| lev.into_iter().map(|[a, b]| C::new(a, b)).collect()).collect();
        BetheRootSet::new(raw.l, raw.p, raw.q, nesting, raw.counts, levels).map_err(serde::de::Error::custom)
    }
}
