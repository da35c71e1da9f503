use super::roots::BetheRootSet;
use crate::error::{invalid, Result};
use crate::operators::DenseMatrix;
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

/// Rapidity parameterization with `q/p = e^{−2η}`, `Δ = cosh η`.
#[derive(Clone, Copy, Debug)]
pub struct Rapidity {
    pub p: f64,
    pub q: f64,
    pub eta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LambdaToU,
    UToLambda,
    LambdaToMomentum,
}

impl Rapidity {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && q > 0.0) {
            return invalid("rapidity form needs p > 0 and q > 0 (η is infinite otherwise)");
        }
        Ok(Self { p, q, eta: 0.5 * (p / q).ln() })
    }

    pub fn delta(&self) -> f64 {
        self.eta.cosh()
    }

    /// `λ̃(u) = (e^η/p) sh(ηu/2) / sh(η(u+2)/2)`.
    pub fn lambda_tilde(&self, u: C) -> C {
        let e = self.eta;
        e.exp() / self.p * (e * u / 2.0).sinh() / (e * (u + 2.0) / 2.0).sinh()
    }

    /// `p̃(u) = −i log[sh(ηu/2) / sh(η(u+2)/2)]`.
    pub fn p_tilde(&self, u: C) -> C {
        let e = self.eta;
        -C::i() * ((e * u / 2.0).sinh() / (e * (u + 2.0) / 2.0).sinh()).ln()
    }

    /// Root `λ = λ̃(iu − 1)` of a rapidity `u`.
    pub fn u_to_lambda(&self, u: C) -> C {
        self.lambda_tilde(C::i() * u - 1.0)
    }

    /// Inverse of [`Self::u_to_lambda`], principal branch of the logarithm.
    pub fn lambda_to_u(&self, lam: C) -> C {
        let e = self.eta;
        let w = self.p * lam * (-e).exp();
        let a2 = (1.0 - w * (-e).exp()) / (1.0 - w * e.exp());
        let v = a2.ln() / e;
        -C::i() * (v + 1.0)
    }

    /// Quasi-momentum `p_j` with `pλ = exp(i p_j + η)`.
    pub fn lambda_to_momentum(&self, lam: C) -> C {
        -C::i() * (self.p * lam * (-self.eta).exp()).ln()
    }

    /// `2√(pq) sh²η / (cos(ηu) − ch η)`, one root's energy under `λ = λ̃(iu − 1)`.
    ///
    /// The hyperbolic form `ch(ηu)` holds for the rotated variable `iu`.
    pub fn energy_term(&self, u: C) -> C {
        let e = self.eta;
        2.0 * (self.p * self.q).sqrt() * e.sinh().powi(2) / ((e * u).cos() - e.cosh())
    }

    pub fn energy(&self, us: &[C]) -> C {
        us.iter().map(|&u| self.energy_term(u)).sum()
    }

    /// First-level rapidities of a root set.
    pub fn rapidities(&self, rs: &BetheRootSet) -> Vec<C> {
        rs.levels.first().map(|l| l.iter().map(|&z| self.lambda_to_u(z)).collect()).unwrap_or_default()
    }

    /// `R̃(u)` on `W ⊗ W`, `dim W = n`, basis index `a*n + b`.
    pub fn r_tilde(&self, u: C, n: usize) -> DenseMatrix<C> {
        let e = self.eta;
        let den = (e * (u + 2.0) / 2.0).sinh();
        let sh = (e * u / 2.0).sinh();
        let mut r = DenseMatrix::zeros(n * n);
        for a in 0..n {
            for b in 0..n {
                let col = a * n + b;
                if a == b {
                    r.set(col, col, C::new(1.0, 0.0));
                    continue;
                }
                let (keep, swap) = if a < b {
                    ((-e).exp() * sh / den, (e * u / 2.0).exp() * e.sinh() / den)
                } else {
                    (e.exp() * sh / den, (-e * u / 2.0).exp() * e.sinh() / den)
                };
                r.set(col, col, keep);
                r.set(b * n + a, col, swap);
            }
        }
        r
    }
}

/// Apply one change of variables.
pub fn rapidity_transform(value: C, direction: Direction, p: f64, q: f64) -> Result<C> {
    let r = Rapidity::new(p, q)?;
    Ok(match direction {
        Direction::LambdaToU => r.lambda_to_u(value),
        Direction::UToLambda => r.u_to_lambda(value),
        Direction::LambdaToMomentum => r.lambda_to_momentum(value),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::build_r_matrix;

    fn embed(r: &DenseMatrix<C>, n: usize, i: usize, j: usize) -> DenseMatrix<C> {
        let mut out = DenseMatrix::zeros(n * n * n);
        for col in 0..n * n * n {
            let idx = [col / (n * n), col / n % n, col % n];
            for ri in 0..n {
                for rj in 0..n {
                    let w = *r.get(ri * n + rj, idx[i] * n + idx[j]);
                    if w != C::new(0.0, 0.0) {
                        let mut o = idx;
                        o[i] = ri;
                        o[j] = rj;
                        out.set(o[0] * n * n + o[1] * n + o[2], col, w);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn roundtrip_delta_and_momentum() {
        let r = Rapidity::new(0.7, 0.2).unwrap();
        assert!((r.delta() - r.eta.cosh()).abs() < 1e-15);
        assert!(((-2.0 * r.eta).exp() - 0.2 / 0.7).abs() < 1e-15);
        for u in [C::new(0.3, 0.1), C::new(-1.2, 0.4), C::new(2.0, -0.3)] {
            let lam = r.u_to_lambda(u);
            assert!((r.lambda_to_u(lam) - u).norm() < 1e-12);
            let pj = r.lambda_to_momentum(lam);
            assert!(((C::i() * pj + r.eta).exp() - r.p * lam).norm() < 1e-12);
        }
        assert!(Rapidity::new(1.0, 0.0).is_err());
    }

    #[test]
    fn energy_matches_root_form() {
        let (p, q) = (0.65, 0.35);
        let r = Rapidity::new(p, q).unwrap();
        for u in [C::new(0.37, 0.2), C::new(-0.9, -0.15), C::new(1.7, 0.0)] {
            let lam = r.u_to_lambda(u);
            let direct = (1.0 - p * lam) * (1.0 - q * lam) / lam;
            assert!((direct - r.energy_term(u)).norm() < 1e-12);
            let hyperbolic = 2.0 * (p * q).sqrt() * r.eta.sinh().powi(2) / ((r.eta * C::i() * u).cosh() - r.eta.cosh());
            assert!((direct - hyperbolic).norm() < 1e-12);
        }
    }

    #[test]
    fn r_tilde_matches_and_satisfies_difference_ybe() {
        let (p, q) = (0.6, 0.25);
        let r = Rapidity::new(p, q).unwrap();
        let n = 3;
        let u = C::new(0.4, 0.3);
        let direct = build_r_matrix(&r.lambda_tilde(u), &C::new(p, 0.0), &C::new(q, 0.0), n);
        assert!(direct.max_abs_diff(&r.r_tilde(u, n)) < 1e-13);
        let (u1, u2) = (C::new(0.7, -0.2), C::new(-0.3, 0.5));
        let r12 = embed(&r.r_tilde(u1 - u2, n), n, 0, 1);
        let r13 = embed(&r.r_tilde(u1, n), n, 0, 2);
        let r23 = embed(&r.r_tilde(u2, n), n, 1, 2);
        let lhs = r23.matmul(&r13).matmul(&r12);
        let rhs = r12.matmul(&r13).matmul(&r23);
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }
}
