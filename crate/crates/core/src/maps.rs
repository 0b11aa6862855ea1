//! Changes of variables behind the evaluations: the Anderson-type map, the
//! dual residue map, their closed-form complex Jacobians, and the residue
//! identities, all as executable checks against finite-difference oracles.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Image (x_1..x_{n-1}, y) of a point u under the Anderson-type map with
/// pivots z.
#[derive(Debug, Clone, PartialEq)]
pub struct AndersonImage {
    pub x: Vec<Complex64>,
    pub y: Complex64,
}

fn check_distinct(pts: &[Complex64], ctx: &'static str) -> Result<()> {
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i] == pts[j] {
                return Err(Error::CoincidentPoints(ctx));
            }
        }
    }
    Ok(())
}

/// x_alpha = -prod_p (u_p - z_alpha) / prod_{beta != alpha} (z_beta - z_alpha),
/// y = sum u_p - sum z_beta.
pub fn anderson_forward(u: &[Complex64], z: &[Complex64]) -> Result<AndersonImage> {
    check_distinct(z, "anderson_forward")?;
    let mut x = Vec::with_capacity(z.len());
    for (alpha, &za) in z.iter().enumerate() {
        let num: Complex64 = u.iter().map(|&up| up - za).product();
        let den: Complex64 = z
            .iter()
            .enumerate()
            .filter(|&(beta, _)| beta != alpha)
            .map(|(_, &zb)| zb - za)
            .product();
        x.push(-num / den);
    }
    let y = u.iter().sum::<Complex64>() - z.iter().sum::<Complex64>();
    Ok(AndersonImage { x, y })
}

/// Closed-form complex Jacobian of the Anderson map:
/// prod_{p<q} (u_p - u_q) / prod_{alpha<beta} (z_alpha - z_beta).
pub fn anderson_jacobian_closed(u: &[Complex64], z: &[Complex64]) -> Result<Complex64> {
    check_distinct(z, "anderson_jacobian_closed")?;
    let mut num = Complex64::new(1.0, 0.0);
    for p in 0..u.len() {
        for q in p + 1..u.len() {
            num *= u[p] - u[q];
        }
    }
    let mut den = Complex64::new(1.0, 0.0);
    for a in 0..z.len() {
        for b in a + 1..z.len() {
            den *= z[a] - z[b];
        }
    }
    Ok(num / den)
}

/// Q(u_p) residual of the partial-fraction identity
/// Q(t) = t - y - sum x_alpha / (t - z_alpha); zero at every u_p.
pub fn anderson_q(t: Complex64, img: &AndersonImage, z: &[Complex64]) -> Complex64 {
    let mut q = t - img.y;
    for (xa, &za) in img.x.iter().zip(z) {
        q -= xa / (t - za);
    }
    q
}

/// Relative residual of the sum-of-residues identity
/// prod (u_p + a) = (a + y - sum x_alpha/(z_alpha + a)) prod (z_alpha + a).
pub fn sum_res_identity_check(u: &[Complex64], z: &[Complex64], a: Complex64) -> Result<f64> {
    let img = anderson_forward(u, z)?;
    let lhs: Complex64 = u.iter().map(|&up| up + a).product();
    let mut bracket = a + img.y;
    for (xa, &za) in img.x.iter().zip(z) {
        bracket -= xa / (za + a);
    }
    let rhs = bracket * z.iter().map(|&za| za + a).product::<Complex64>();
    let scale = lhs.norm().max(rhs.norm()).max(1.0);
    Ok((lhs - rhs).norm() / scale)
}

/// Residue weights w_p (p = 1..n+1) of prod(t - z_alpha) / prod(t - u_p);
/// they sum to 1.
pub fn dual_w_map(z: &[Complex64], u: &[Complex64]) -> Result<Vec<Complex64>> {
    check_distinct(u, "dual_w_map")?;
    let mut w = Vec::with_capacity(u.len());
    for (p, &up) in u.iter().enumerate() {
        let num: Complex64 = z.iter().map(|&za| za - up).product();
        let den: Complex64 = u
            .iter()
            .enumerate()
            .filter(|&(q, _)| q != p)
            .map(|(_, &uq)| uq - up)
            .product();
        w.push(num / den);
    }
    Ok(w)
}

/// Closed-form complex Jacobian of (z_1..z_n) -> (w_1..w_n):
/// prod_{alpha<beta} (z_beta - z_alpha)
///   / [ prod_{p<q<=n} (u_q - u_p) * prod_{p<=n} (u_{n+1} - u_p) ].
pub fn dual_jacobian_closed(z: &[Complex64], u: &[Complex64]) -> Result<Complex64> {
    check_distinct(u, "dual_jacobian_closed")?;
    let n = z.len();
    if u.len() != n + 1 {
        return Err(Error::InvalidParameter("dual map needs n+1 points u".into()));
    }
    let mut num = Complex64::new(1.0, 0.0);
    for a in 0..n {
        for b in a + 1..n {
            num *= z[b] - z[a];
        }
    }
    let mut den = Complex64::new(1.0, 0.0);
    for p in 0..n {
        for q in p + 1..n {
            den *= u[q] - u[p];
        }
    }
    for p in 0..n {
        den *= u[n] - u[p];
    }
    Ok(num / den)
}

/// Cauchy determinant det{1/(z_alpha - u_p)} by its closed product formula.
pub fn cauchy_det_closed(z: &[Complex64], u: &[Complex64]) -> Result<Complex64> {
    let n = z.len();
    if u.len() != n {
        return Err(Error::InvalidParameter("cauchy_det needs equal lengths".into()));
    }
    let mut acc = Complex64::new(1.0, 0.0);
    for a in 0..n {
        for b in a + 1..n {
            acc *= (z[a] - z[b]) * (u[b] - u[a]);
        }
    }
    for &za in z {
        for &up in u {
            let d = za - up;
            if d == Complex64::new(0.0, 0.0) {
                return Err(Error::CoincidentPoints("cauchy_det_closed"));
            }
            acc /= d;
        }
    }
    Ok(acc)
}

/// Cauchy determinant evaluated as a literal determinant (LU).
pub fn cauchy_det_direct(z: &[Complex64], u: &[Complex64]) -> Result<Complex64> {
    let n = z.len();
    let m = DMatrix::from_fn(n, n, |a, p| {
        Complex64::new(1.0, 0.0) / (z[a] - u[p])
    });
    Ok(m.determinant())
}

/// Determinant of the matrix of central complex difference quotients of a
/// holomorphic map, Richardson-refined at h/2.
pub fn numeric_complex_jacobian<F>(map: F, point: &[Complex64], h: f64) -> Result<Complex64>
where
    F: Fn(&[Complex64]) -> Result<Vec<Complex64>>,
{
    let n = point.len();
    let diff_matrix = |step: f64| -> Result<DMatrix<Complex64>> {
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            let mut plus = point.to_vec();
            plus[k] += step;
            let mut minus = point.to_vec();
            minus[k] -= step;
            let fp = map(&plus)?;
            let fm = map(&minus)?;
            for row in 0..n {
                m[(row, k)] = (fp[row] - fm[row]) / (2.0 * step);
            }
        }
        Ok(m)
    };
    let coarse = diff_matrix(h)?;
    let fine = diff_matrix(h / 2.0)?;
    // central differences have O(h^2) error: eliminate the leading term
    let refined = (fine * Complex64::new(4.0, 0.0) - coarse) / Complex64::new(3.0, 0.0);
    Ok(refined.determinant())
}

/// Determinant of the real 2n x 2n finite-difference Jacobian of the same
/// map viewed as R^{2n} -> R^{2n}.
pub fn numeric_real_jacobian<F>(map: F, point: &[Complex64], h: f64) -> Result<f64>
where
    F: Fn(&[Complex64]) -> Result<Vec<Complex64>>,
{
    let n = point.len();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..2 * n {
        let bump = if k % 2 == 0 {
            Complex64::new(h, 0.0)
        } else {
            Complex64::new(0.0, h)
        };
        let mut plus = point.to_vec();
        plus[k / 2] += bump;
        let mut minus = point.to_vec();
        minus[k / 2] -= bump;
        let fp = map(&plus)?;
        let fm = map(&minus)?;
        for row in 0..n {
            let d = (fp[row] - fm[row]) / (2.0 * h);
            m[(2 * row, k)] = d.re;
            m[(2 * row + 1, k)] = d.im;
        }
    }
    Ok(m.determinant())
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Monic polynomial with the given roots, low-degree coefficients first.
fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut p = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        p = poly_mul(&p, &[-r, Complex64::new(1.0, 0.0)]);
    }
    p
}

fn poly_eval(p: &[Complex64], t: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

/// All roots of a monic polynomial by Durand-Kerner iteration.
/// Adequate for the small degrees arising here (distinct roots a.s.).
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs.iter().map(|&c| c / lead).collect();
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..deg {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if j != i {
                    den *= roots[i] - roots[j];
                }
            }
            let step = poly_eval(&monic, roots[i]) / den;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-14 {
            break;
        }
    }
    roots
}

/// Invert the Anderson map: recover {u_p} as the roots of
/// (t - y) prod (t - z_beta) - sum x_alpha prod_{beta != alpha} (t - z_beta).
pub fn anderson_recover(img: &AndersonImage, z: &[Complex64]) -> Result<Vec<Complex64>> {
    check_distinct(z, "anderson_recover")?;
    let mut p = poly_mul(&[-img.y, Complex64::new(1.0, 0.0)], &poly_from_roots(z));
    for (alpha, xa) in img.x.iter().enumerate() {
        let others: Vec<Complex64> = z
            .iter()
            .enumerate()
            .filter(|&(beta, _)| beta != alpha)
            .map(|(_, &zb)| zb)
            .collect();
        let q = poly_from_roots(&others);
        for (i, &qi) in q.iter().enumerate() {
            p[i] -= xa * qi;
        }
    }
    Ok(polynomial_roots(&p))
}

/// Max distance under greedy nearest pairing of two multisets of points.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut remaining: Vec<Complex64> = b.to_vec();
    let mut worst = 0.0f64;
    for &pa in a {
        if remaining.is_empty() {
            return f64::INFINITY;
        }
        let (idx, d) = remaining
            .iter()
            .enumerate()
            .map(|(i, &pb)| (i, (pa - pb).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        worst = worst.max(d);
        remaining.swap_remove(idx);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn anderson_n1_is_sum() {
        let img = anderson_forward(&[c(0.7, -0.2)], &[]).unwrap();
        assert!(img.x.is_empty());
        assert_eq!(img.y, c(0.7, -0.2));
    }

    #[test]
    fn anderson_permutation_invariant() {
        let u = [c(0.3, 0.1), c(-0.5, 0.7), c(1.2, -0.4)];
        let z = [c(0.2, 0.2), c(0.9, -0.1)];
        let a = anderson_forward(&u, &z).unwrap();
        let b = anderson_forward(&[u[2], u[0], u[1]], &z).unwrap();
        assert_eq!(a.y, b.y);
        for (xa, xb) in a.x.iter().zip(&b.x) {
            // identical up to product reassociation
            assert!((xa - xb).norm() < 1e-15);
        }
    }

    #[test]
    fn anderson_q_vanishes_at_u() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_points(&mut rng, 3);
        let z = random_points(&mut rng, 2);
        let img = anderson_forward(&u, &z).unwrap();
        for &up in &u {
            assert!(anderson_q(up, &img, &z).norm() < 1e-10);
        }
    }

    #[test]
    fn anderson_jacobian_trivia() {
        let j = anderson_jacobian_closed(&[c(0.0, 0.0), c(1.0, 0.0)], &[c(0.5, 0.0)]).unwrap();
        assert!((j - c(-1.0, 0.0)).norm() < 1e-15);
        let j = anderson_jacobian_closed(&[c(0.3, 0.2)], &[]).unwrap();
        assert!((j - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn numeric_jacobian_trivia() {
        let id = |p: &[Complex64]| Ok(p.to_vec());
        let j = numeric_complex_jacobian(id, &[c(0.3, 0.1), c(-0.4, 0.2)], 1e-5).unwrap();
        assert!((j - c(1.0, 0.0)).norm() < 1e-10);
        // linear map with matrix [[2, i], [0, 3]] -> det = 6
        let lin = |p: &[Complex64]| {
            Ok(vec![2.0 * p[0] + c(0.0, 1.0) * p[1], 3.0 * p[1]])
        };
        let j = numeric_complex_jacobian(lin, &[c(0.1, 0.7), c(0.5, -0.2)], 1e-5).unwrap();
        assert!((j - c(6.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn anderson_jacobian_matches_numeric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 3, 4] {
            let u = random_points(&mut rng, n);
            let z = random_points(&mut rng, n - 1);
            let closed = anderson_jacobian_closed(&u, &z).unwrap();
            let map = |p: &[Complex64]| {
                let img = anderson_forward(p, &z)?;
                let mut out = img.x;
                out.push(img.y);
                Ok(out)
            };
            let numeric = numeric_complex_jacobian(map, &u, 1e-5).unwrap();
            assert!(
                (closed - numeric).norm() < 1e-6 * closed.norm(),
                "n={n}: {closed} vs {numeric}"
            );
        }
    }

    #[test]
    fn real_jacobian_is_modulus_squared() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let u = random_points(&mut rng, 3);
        let z = random_points(&mut rng, 2);
        let closed = anderson_jacobian_closed(&u, &z).unwrap();
        let map = |p: &[Complex64]| {
            let img = anderson_forward(p, &z)?;
            let mut out = img.x;
            out.push(img.y);
            Ok(out)
        };
        let real = numeric_real_jacobian(map, &u, 1e-5).unwrap();
        let expect = closed.norm_sqr();
        assert!((real - expect).abs() < 1e-5 * expect.max(1.0), "{real} vs {expect}");
    }

    #[test]
    fn sum_res_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let u = random_points(&mut rng, 3);
        let z = random_points(&mut rng, 2);
        assert!(sum_res_identity_check(&u, &z, c(0.0, 0.0)).unwrap() < 1e-10);
        assert!(sum_res_identity_check(&u, &z, c(-1.0, 0.0)).unwrap() < 1e-10);
        for &za in &z {
            // a = -z_alpha makes both sides vanish; the residual stays tiny
            assert!(sum_res_identity_check(&u, &z, -za + c(1e-7, 0.0)).unwrap() < 1e-6);
        }
        assert_eq!(
            sum_res_identity_check(&[c(0.4, 0.2)], &[], c(0.3, 0.0)).unwrap(),
            0.0
        );
    }

    #[test]
    fn dual_weights_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for n in [1usize, 2, 3] {
            let z = random_points(&mut rng, n);
            let u = random_points(&mut rng, n + 1);
            let w = dual_w_map(&z, &u).unwrap();
            let s: Complex64 = w.iter().sum();
            assert!((s - c(1.0, 0.0)).norm() < 1e-10, "n={n}: {s}");
        }
    }

    #[test]
    fn dual_weights_n1_interpolation() {
        let z = [c(0.3, 0.5)];
        let u = [c(0.0, 0.0), c(1.0, 0.0)];
        let w = dual_w_map(&z, &u).unwrap();
        let expect = (z[0] - u[0]) / (u[1] - u[0]);
        // w_1 = (z - u_1)/(u_2 - u_1), w_2 = 1 - w_1
        assert!((w[0] - expect).norm() < 1e-14);
        assert!((w[0] + w[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn dual_jacobian_n1_explicit() {
        let z = [c(0.3, 0.5)];
        let u = [c(0.1, -0.2), c(0.8, 0.4)];
        let j = dual_jacobian_closed(&z, &u).unwrap();
        assert!((j - 1.0 / (u[1] - u[0])).norm() < 1e-14);
    }

    #[test]
    fn dual_jacobian_matches_numeric() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in [2usize, 3] {
            let z = random_points(&mut rng, n);
            let u = random_points(&mut rng, n + 1);
            let closed = dual_jacobian_closed(&z, &u).unwrap();
            let map = |p: &[Complex64]| {
                let w = dual_w_map(p, &u)?;
                Ok(w[..n].to_vec())
            };
            let numeric = numeric_complex_jacobian(map, &z, 1e-5).unwrap();
            assert!(
                (closed - numeric).norm() < 1e-6 * closed.norm(),
                "n={n}: {closed} vs {numeric}"
            );
        }
    }

    #[test]
    fn cauchy_det_closed_vs_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let z = random_points(&mut rng, 4);
        let u: Vec<Complex64> = random_points(&mut rng, 4)
            .iter()
            .map(|&p| p + c(2.5, 0.0))
            .collect();
        let a = cauchy_det_closed(&z, &u).unwrap();
        let b = cauchy_det_direct(&z, &u).unwrap();
        assert!((a - b).norm() < 1e-10 * a.norm(), "{a} vs {b}");
    }

    #[test]
    fn anderson_round_trip_recovers_u() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in [2usize, 3, 4] {
            let u = random_points(&mut rng, n);
            let z = random_points(&mut rng, n - 1);
            let img = anderson_forward(&u, &z).unwrap();
            let back = anderson_recover(&img, &z).unwrap();
            assert!(multiset_distance(&u, &back) < 1e-8, "n={n}");
        }
    }

    #[test]
    fn polynomial_roots_simple() {
        // t^2 - 3t + 2 = (t-1)(t-2)
        let roots = polynomial_roots(&[c(2.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]);
        let expect = [c(1.0, 0.0), c(2.0, 0.0)];
        assert!(multiset_distance(&expect, &roots) < 1e-12);
    }
}
