use super::matrix::Scalar;

/// Small dense row-major matrix over a generic scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T: Scalar> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.n + c] = v;
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs.data[k * n + j];
                    if !b.is_zero() {
                        out.data[i * n + j] = out.data[i * n + j].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.data.iter().zip(&rhs.data).map(|(a, b)| (a.clone() - b.clone()).magnitude()).fold(0.0, f64::max)
    }
}

/// Spectral-parameter combination under which the YBE closes.
pub fn xi<T: Scalar>(l1: &T, l2: &T, p: &T, q: &T) -> T {
    let den = T::one() - (p.clone() + q.clone()) * l2.clone() + p.clone() * q.clone() * l1.clone() * l2.clone();
    (l1.clone() - l2.clone()) / den
}

/// Action of `R(λ) = P(1 + λh)` on `|a, b>`: list of `(a', b', weight)`.
pub(crate) fn r_action<T: Scalar>(a: usize, b: usize, lam: &T, p: &T, q: &T) -> [(usize, usize, T); 2] {
    use std::cmp::Ordering::*;
    let rate = match a.cmp(&b) {
        Equal => return [(a, a, T::one()), (a, a, T::zero())],
        Less => q,
        Greater => p,
    };
    let keep = rate.clone() * lam.clone();
    [(a, b, keep.clone()), (b, a, T::one() - keep)]
}

/// R-matrix on `W ⊗ W` with `dim W = n`, basis index `a*n + b`.
pub fn build_r_matrix<T: Scalar>(lam: &T, p: &T, q: &T, n: usize) -> DenseMatrix<T> {
    let mut r: DenseMatrix<T> = DenseMatrix::zeros(n * n);
    for a in 0..n {
        for b in 0..n {
            for (a2, b2, w) in r_action(a, b, lam, p, q) {
                if !w.is_zero() {
                    let row = a2 * n + b2;
                    let cur = r.get(row, a * n + b).clone();
                    r.set(row, a * n + b, cur + w);
                }
            }
        }
    }
    r
}

// Embed a two-site operator on factors (i, j) of W^{⊗3}.
fn embed<T: Scalar>(r: &DenseMatrix<T>, n: usize, i: usize, j: usize) -> DenseMatrix<T> {
    let mut out = DenseMatrix::zeros(n * n * n);
    for col in 0..n * n * n {
        let idx = [col / (n * n), col / n % n, col % n];
        let rc = idx[i] * n + idx[j];
        for ri in 0..n {
            for rj in 0..n {
                let w = r.get(ri * n + rj, rc);
                if w.is_zero() {
                    continue;
                }
                let mut o = idx;
                o[i] = ri;
                o[j] = rj;
                out.set(o[0] * n * n + o[1] * n + o[2], col, w.clone());
            }
        }
    }
    out
}

/// `max |R23(λ2) R13(λ1) R12(ξ) − R12(ξ) R13(λ1) R23(λ2)|` with `ξ = ξ(λ1, λ2)`.
pub fn ybe_residual<T: Scalar>(l1: &T, l2: &T, p: &T, q: &T, n: usize) -> f64 {
    let x = xi(l1, l2, p, q);
    let r1 = build_r_matrix(l1, p, q, n);
    let r2 = build_r_matrix(l2, p, q, n);
    let rx = build_r_matrix(&x, p, q, n);
    let (r12, r13, r23) = (embed(&rx, n, 0, 1), embed(&r1, n, 0, 2), embed(&r2, n, 1, 2));
    let lhs = r23.matmul(&r13).matmul(&r12);
    let rhs = r12.matmul(&r13).matmul(&r23);
    lhs.max_abs_diff(&rhs)
}
