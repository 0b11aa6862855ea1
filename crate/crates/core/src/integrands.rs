//! Factorized integrands of the six integral identities.
//!
//! Every integrand is a finite product of powers of affine expressions in the
//! integration variables. Keeping the factor list explicit serves two
//! purposes: evaluation can switch to log accumulation in high dimension, and
//! the sampler construction can read off singular centers and their strengths
//! without re-deriving them per identity.

use num_complex::Complex64;

use crate::closed_form::{DfaParams, DualParams, LemmaParams, TrapezoidParams, TriangularParams};
use crate::error::Result;
use crate::exponents::{complex_power, complex_power_log, FieldExponent};

/// Affine expression a factor is a power of. Coordinates are indexed into the
/// flat point vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Base {
    /// z_k
    Coord(usize),
    /// 1 - z_k
    OneMinusCoord(usize),
    /// z_k - z_l
    Diff(usize, usize),
    /// z_k - c
    CoordMinusConst(usize, Complex64),
    /// 1 - sum of the listed coordinates
    OneMinusSum(Vec<usize>),
}

impl Base {
    pub fn value(&self, point: &[Complex64]) -> Complex64 {
        match self {
            Base::Coord(k) => point[*k],
            Base::OneMinusCoord(k) => Complex64::new(1.0, 0.0) - point[*k],
            Base::Diff(k, l) => point[*k] - point[*l],
            Base::CoordMinusConst(k, c) => point[*k] - c,
            Base::OneMinusSum(ks) => {
                let mut v = Complex64::new(1.0, 0.0);
                for &k in ks {
                    v -= point[k];
                }
                v
            }
        }
    }

    /// Coordinates the expression depends on.
    pub fn coords(&self) -> Vec<usize> {
        match self {
            Base::Coord(k) | Base::OneMinusCoord(k) | Base::CoordMinusConst(k, _) => vec![*k],
            Base::Diff(k, l) => vec![*k, *l],
            Base::OneMinusSum(ks) => ks.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Factor {
    pub base: Base,
    pub exp: FieldExponent,
}

#[derive(Debug, Clone)]
pub struct Integrand {
    pub dim: usize,
    pub factors: Vec<Factor>,
}

impl Integrand {
    /// Direct product evaluation; fine up to a handful of factors.
    pub fn eval_direct(&self, point: &[Complex64]) -> Result<Complex64> {
        debug_assert_eq!(point.len(), self.dim);
        let mut acc = Complex64::new(1.0, 0.0);
        for f in &self.factors {
            acc *= complex_power(f.base.value(point), &f.exp)?;
        }
        Ok(acc)
    }

    /// Log-magnitude/phase accumulation; immune to intermediate overflow in
    /// long products.
    pub fn eval_log(&self, point: &[Complex64]) -> Result<Complex64> {
        debug_assert_eq!(point.len(), self.dim);
        let mut log_mag = 0.0;
        let mut phase = 0.0;
        for f in &self.factors {
            let b = f.base.value(point);
            if b == Complex64::new(0.0, 0.0) {
                // zero base: the factor itself decides (0 or an error)
                return complex_power(b, &f.exp);
            }
            let (lm, ph) = complex_power_log(b, &f.exp);
            log_mag += lm;
            phase += ph;
        }
        Ok(Complex64::from_polar(log_mag.exp(), phase))
    }

    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        if self.factors.len() <= 8 {
            self.eval_direct(point)
        } else {
            self.eval_log(point)
        }
    }
}

/// z^(a-1) (1-z)^(b-1) over C.
pub fn beta_integrand(a: &FieldExponent, b: &FieldExponent) -> Integrand {
    let one = FieldExponent::one();
    Integrand {
        dim: 1,
        factors: vec![
            Factor {
                base: Base::Coord(0),
                exp: a.sub(&one),
            },
            Factor {
                base: Base::OneMinusCoord(0),
                exp: b.sub(&one),
            },
        ],
    }
}

/// prod t_j^(a_j - 1) (1 - sum t_j)^(a_{n+1} - 1) over C^n.
pub fn dirichlet_integrand(a: &[FieldExponent]) -> Integrand {
    let one = FieldExponent::one();
    let n = a.len() - 1;
    let mut factors = Vec::new();
    for (k, e) in a[..n].iter().enumerate() {
        factors.push(Factor {
            base: Base::Coord(k),
            exp: e.sub(&one),
        });
    }
    factors.push(Factor {
        base: Base::OneMinusSum((0..n).collect()),
        exp: a[n].sub(&one),
    });
    Integrand { dim: n, factors }
}

/// The extended Dotsenko-Fateev-Aomoto integrand over C^n.
pub fn dfa_integrand(p: &DfaParams) -> Integrand {
    let one = FieldExponent::one();
    let mut factors = Vec::new();
    for k in 0..p.n {
        factors.push(Factor {
            base: Base::Coord(k),
            exp: p.sigma.sub(&one),
        });
        factors.push(Factor {
            base: Base::OneMinusCoord(k),
            exp: p.tau.sub(&one),
        });
    }
    for i in 0..p.n {
        for j in i + 1..p.n {
            factors.push(Factor {
                base: Base::Diff(i, j),
                exp: p.theta.scale_int(2),
            });
        }
    }
    Integrand { dim: p.n, factors }
}

/// The main-lemma integrand over C^n with fixed pivots z_alpha.
pub fn lemma_integrand(p: &LemmaParams) -> Integrand {
    let one = FieldExponent::one();
    let mut factors = Vec::new();
    for k in 0..p.n {
        factors.push(Factor {
            base: Base::Coord(k),
            exp: p.sigma.sub(&one),
        });
        factors.push(Factor {
            base: Base::OneMinusCoord(k),
            exp: p.tau.sub(&one),
        });
        for (alpha, &za) in p.z.iter().enumerate() {
            factors.push(Factor {
                base: Base::CoordMinusConst(k, za),
                exp: p.theta[alpha].sub(&one),
            });
        }
    }
    for k in 0..p.n {
        for l in k + 1..p.n {
            factors.push(Factor {
                base: Base::Diff(k, l),
                exp: one,
            });
        }
    }
    Integrand { dim: p.n, factors }
}

/// The dual-lemma integrand over C^n with fixed points u_p.
pub fn dual_integrand(p: &DualParams) -> Integrand {
    let one = FieldExponent::one();
    let mut factors = Vec::new();
    for alpha in 0..p.n {
        for &up in &p.u {
            factors.push(Factor {
                base: Base::CoordMinusConst(alpha, up),
                exp: p.theta.sub(&one),
            });
        }
    }
    for alpha in 0..p.n {
        for beta in alpha + 1..p.n {
            factors.push(Factor {
                base: Base::Diff(beta, alpha),
                exp: one,
            });
        }
    }
    Integrand { dim: p.n, factors }
}

/// Flat index of z_{j alpha} in the triangular configuration space,
/// j = 1..n, alpha = 1..j.
pub fn tri_index(j: usize, alpha: usize) -> usize {
    j * (j - 1) / 2 + (alpha - 1)
}

/// Flat index of z_{j alpha} for rows j = m..n.
pub fn trap_index(m: usize, j: usize, alpha: usize) -> usize {
    (j * (j - 1) - m * (m - 1)) / 2 + (alpha - 1)
}

/// Shared tail of the triangular and trapezoid integrands: rows `lo..=n` with
/// their coordinate factors, inter-row couplings, and the last-row product.
fn row_factors(
    factors: &mut Vec<Factor>,
    lo: usize,
    n: usize,
    sigma: &dyn Fn(usize) -> FieldExponent,
    tau: &dyn Fn(usize) -> FieldExponent,
    theta: &dyn Fn(usize, usize) -> FieldExponent,
    idx: &dyn Fn(usize, usize) -> usize,
) {
    let one = FieldExponent::one();
    for j in lo..n {
        for alpha in 1..=j {
            let th = theta(j, alpha);
            factors.push(Factor {
                base: Base::Coord(idx(j, alpha)),
                exp: sigma(j).sub(&sigma(j + 1)).sub(&th),
            });
            factors.push(Factor {
                base: Base::OneMinusCoord(idx(j, alpha)),
                exp: tau(j).sub(&tau(j + 1)).sub(&th),
            });
            for p in 1..=j + 1 {
                factors.push(Factor {
                    base: Base::Diff(idx(j, alpha), idx(j + 1, p)),
                    exp: th.sub(&one),
                });
            }
            for beta in 1..=j {
                if beta != alpha {
                    factors.push(Factor {
                        base: Base::Diff(idx(j, alpha), idx(j, beta)),
                        exp: one.sub(&th),
                    });
                }
            }
        }
    }
    for p in 1..=n {
        factors.push(Factor {
            base: Base::Coord(idx(n, p)),
            exp: sigma(n).sub(&one),
        });
        factors.push(Factor {
            base: Base::OneMinusCoord(idx(n, p)),
            exp: tau(n).sub(&one),
        });
    }
    for p in 1..=n {
        for q in p + 1..=n {
            factors.push(Factor {
                base: Base::Diff(idx(n, p), idx(n, q)),
                exp: one,
            });
        }
    }
}

/// The triangular integrand over the configuration space C^(n(n+1)/2).
pub fn triangular_integrand(p: &TriangularParams) -> Integrand {
    let n = p.n;
    let mut factors = Vec::new();
    row_factors(
        &mut factors,
        1,
        n,
        &|j| p.sigma[j - 1],
        &|j| p.tau[j - 1],
        &|j, alpha| *p.theta_at(j, alpha),
        &|j, alpha| tri_index(j, alpha),
    );
    Integrand {
        dim: n * (n + 1) / 2,
        factors,
    }
}

/// The trapezoid integrand over C^m x ... x C^n.
pub fn trapezoid_integrand(p: &TrapezoidParams) -> Integrand {
    let (m, n) = (p.m, p.n);
    let idx = |j: usize, alpha: usize| trap_index(m, j, alpha);
    let mut factors = Vec::new();
    let nu_half = p.nu.sub(&FieldExponent::half_one());
    for alpha in 1..=m {
        for beta in 1..=m {
            if alpha != beta {
                factors.push(Factor {
                    base: Base::Diff(idx(m, beta), idx(m, alpha)),
                    exp: nu_half,
                });
            }
        }
    }
    row_factors(
        &mut factors,
        m,
        n,
        &|j| *p.sigma_at(j),
        &|j| *p.tau_at(j),
        &|j, alpha| *p.theta_at(j, alpha),
        &idx,
    );
    Integrand {
        dim: (n * (n + 1) - m * (m - 1)) / 2,
        factors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::complex_power;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fe(x: f64) -> FieldExponent {
        FieldExponent::diagonal(x)
    }

    #[test]
    fn beta_integrand_matches_hand_formula() {
        let f = beta_integrand(&fe(0.3), &fe(0.4));
        let z = c(0.2, 0.6);
        let v = f.eval(&[z]).unwrap();
        let one = FieldExponent::one();
        let expect = complex_power(z, &fe(0.3).sub(&one)).unwrap()
            * complex_power(c(1.0, 0.0) - z, &fe(0.4).sub(&one)).unwrap();
        assert!((v - expect).norm() < 1e-14 * expect.norm());
    }

    #[test]
    fn dfa_n1_equals_beta_integrand() {
        let p = DfaParams {
            n: 1,
            sigma: fe(0.3),
            tau: fe(0.4),
            theta: fe(0.2),
        };
        let f = dfa_integrand(&p);
        let g = beta_integrand(&p.sigma, &p.tau);
        let z = c(-0.7, 0.3);
        let a = f.eval(&[z]).unwrap();
        let b = g.eval(&[z]).unwrap();
        assert!((a - b).norm() < 1e-14 * b.norm());
    }

    #[test]
    fn dfa_n2_hand_oracle() {
        let p = DfaParams {
            n: 2,
            sigma: FieldExponent::new(c(0.3, 0.1), 1),
            tau: fe(0.25),
            theta: FieldExponent::new(c(0.15, -0.05), -1),
        };
        let f = dfa_integrand(&p);
        let z1 = c(0.4, -0.2);
        let z2 = c(-0.1, 0.9);
        let one = FieldExponent::one();
        let mut expect = Complex64::new(1.0, 0.0);
        for z in [z1, z2] {
            expect *= complex_power(z, &p.sigma.sub(&one)).unwrap();
            expect *= complex_power(c(1.0, 0.0) - z, &p.tau.sub(&one)).unwrap();
        }
        expect *= complex_power(z1 - z2, &p.theta.scale_int(2)).unwrap();
        let v = f.eval(&[z1, z2]).unwrap();
        assert!((v - expect).norm() < 1e-13 * expect.norm());
    }

    #[test]
    fn dfa_permutation_symmetry() {
        let p = DfaParams {
            n: 3,
            sigma: fe(0.3),
            tau: fe(0.25),
            theta: FieldExponent::new(c(0.2, 0.05), 2),
        };
        let f = dfa_integrand(&p);
        let pt = [c(0.4, -0.2), c(-0.1, 0.9), c(1.3, 0.5)];
        let v = f.eval(&pt).unwrap();
        // swapping z_i picks up (-1)^(offset of 2 theta) per transposition = +1
        let swapped = [pt[1], pt[0], pt[2]];
        let w = f.eval(&swapped).unwrap();
        assert!((v - w).norm() < 1e-12 * v.norm());
        let rotated = [pt[2], pt[0], pt[1]];
        let w = f.eval(&rotated).unwrap();
        assert!((v - w).norm() < 1e-12 * v.norm());
    }

    #[test]
    fn dirichlet_one_minus_sum() {
        let a = [fe(0.3), fe(0.2), fe(0.4)];
        let f = dirichlet_integrand(&a);
        assert_eq!(f.dim, 2);
        let pt = [c(0.3, 0.1), c(0.4, -0.2)];
        let one = FieldExponent::one();
        let expect = complex_power(pt[0], &a[0].sub(&one)).unwrap()
            * complex_power(pt[1], &a[1].sub(&one)).unwrap()
            * complex_power(c(1.0, 0.0) - pt[0] - pt[1], &a[2].sub(&one)).unwrap();
        let v = f.eval(&pt).unwrap();
        assert!((v - expect).norm() < 1e-13 * expect.norm());
    }

    #[test]
    fn log_path_matches_direct_on_triangular() {
        let p = TriangularParams {
            n: 3,
            sigma: vec![fe(0.4), fe(0.35), fe(0.3)],
            tau: vec![fe(0.45), fe(0.4), fe(0.35)],
            theta: vec![
                vec![FieldExponent::new(c(0.5, 0.1), 1)],
                vec![fe(0.45), FieldExponent::new(c(0.4, -0.2), -2)],
            ],
        };
        let f = triangular_integrand(&p);
        assert_eq!(f.dim, 6);
        let pt = [
            c(0.3, 0.4),
            c(-0.5, 0.2),
            c(1.1, -0.3),
            c(0.2, -0.8),
            c(0.7, 0.6),
            c(-0.2, -0.1),
        ];
        let direct = f.eval_direct(&pt).unwrap();
        let logged = f.eval_log(&pt).unwrap();
        assert!(
            (direct - logged).norm() < 1e-11 * direct.norm(),
            "{direct} vs {logged}"
        );
    }

    #[test]
    fn triangular_n1_is_beta() {
        let p = TriangularParams {
            n: 1,
            sigma: vec![fe(0.3)],
            tau: vec![fe(0.4)],
            theta: vec![],
        };
        let f = triangular_integrand(&p);
        let g = beta_integrand(&fe(0.3), &fe(0.4));
        let z = c(0.6, -0.3);
        let a = f.eval(&[z]).unwrap();
        let b = g.eval(&[z]).unwrap();
        assert!((a - b).norm() < 1e-14 * b.norm());
    }

    #[test]
    fn trapezoid_m_equals_n_matches_dfa_up_to_sign() {
        let nu = FieldExponent::new(c(0.3, 0.05), 1);
        let p = TrapezoidParams {
            m: 3,
            n: 3,
            sigma: vec![fe(0.3)],
            tau: vec![fe(0.25)],
            nu,
            theta: vec![],
        };
        let f = trapezoid_integrand(&p);
        let d = dfa_integrand(&DfaParams {
            n: 3,
            sigma: fe(0.3),
            tau: fe(0.25),
            theta: nu,
        });
        let pt = [c(0.4, -0.2), c(-0.1, 0.9), c(1.3, 0.5)];
        let a = f.eval(&pt).unwrap();
        let b = d.eval(&pt).unwrap();
        let ratio = a / b;
        assert!((ratio.norm() - 1.0).abs() < 1e-11, "{ratio}");
        assert!(
            (ratio - c(1.0, 0.0)).norm() < 1e-11 || (ratio + c(1.0, 0.0)).norm() < 1e-11,
            "{ratio}"
        );
    }

    #[test]
    fn trapezoid_m1_matches_triangular() {
        let sigma = vec![fe(0.3), fe(0.25)];
        let tau = vec![fe(0.35), fe(0.3)];
        let theta = vec![vec![FieldExponent::new(c(0.4, 0.1), 1)]];
        let trap = trapezoid_integrand(&TrapezoidParams {
            m: 1,
            n: 2,
            sigma: sigma.clone(),
            tau: tau.clone(),
            nu: fe(0.2),
            theta: theta.clone(),
        });
        let tri = triangular_integrand(&TriangularParams {
            n: 2,
            sigma,
            tau,
            theta,
        });
        let pt = [c(0.3, 0.4), c(-0.5, 0.2), c(1.1, -0.3)];
        let a = trap.eval(&pt).unwrap();
        let b = tri.eval(&pt).unwrap();
        assert!((a - b).norm() < 1e-12 * b.norm());
    }

    #[test]
    fn lemma_integrand_zero_on_diagonal() {
        let p = LemmaParams {
            n: 2,
            sigma: fe(0.3),
            tau: fe(0.3),
            theta: vec![fe(0.4)],
            z: vec![c(0.5, 0.5)],
        };
        let f = lemma_integrand(&p);
        let u = c(0.2, -0.4);
        let v = f.eval(&[u, u]).unwrap();
        assert_eq!(v, c(0.0, 0.0));
    }

    #[test]
    fn dual_integrand_hand_oracle_n1() {
        let p = DualParams {
            n: 1,
            theta: fe(0.3),
            u: vec![c(0.0, 0.0), c(1.0, 0.0)],
        };
        let f = dual_integrand(&p);
        let z = c(0.4, 0.7);
        let one = FieldExponent::one();
        let expect = complex_power(z, &fe(0.3).sub(&one)).unwrap()
            * complex_power(z - c(1.0, 0.0), &fe(0.3).sub(&one)).unwrap();
        let v = f.eval(&[z]).unwrap();
        assert!((v - expect).norm() < 1e-13 * expect.norm());
    }

    #[test]
    fn tri_index_layout() {
        assert_eq!(tri_index(1, 1), 0);
        assert_eq!(tri_index(2, 1), 1);
        assert_eq!(tri_index(2, 2), 2);
        assert_eq!(tri_index(3, 3), 5);
        assert_eq!(trap_index(2, 2, 1), 0);
        assert_eq!(trap_index(2, 3, 2), 3);
    }
}
