//! Importance-sampling Monte Carlo over C^N.
//!
//! Proposal densities are per-coordinate mixtures of power-law components
//! centered at the singular points of the integrand plus a heavy tail. The
//! mixture is constructed from the factor list: a component's shape matches
//! the local singularity exponent so the weight f/q stays bounded near each
//! center, and the tail exponent matches the integrand's decay at infinity.
//! Pairwise-difference singularities between integration variables are left
//! to raw MC; they are integrable, and their variance shows up in stderr.
//!
//! Estimates are bit-reproducible: each chunk draws from its own counter-
//! seeded stream and chunk accumulators merge in fixed chunk order, so the
//! result does not depend on how many workers ran.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::integrands::{Base, Integrand};

/// Center of a mixture component; `OneMinusSum` is resolved against the
/// coordinates drawn before the current one, keeping the sequential product
/// density well defined.
#[derive(Debug, Clone)]
pub enum CenterSpec {
    Fixed(Complex64),
    OneMinusSum(Vec<usize>),
}

impl CenterSpec {
    fn resolve(&self, prefix: &[Complex64]) -> Complex64 {
        match self {
            CenterSpec::Fixed(c) => *c,
            CenterSpec::OneMinusSum(ks) => {
                let mut c = Complex64::new(1.0, 0.0);
                for &k in ks {
                    c -= prefix[k];
                }
                c
            }
        }
    }
}

/// Power-law component: density (shape/pi) |z-center|^(2 shape - 2) on the
/// unit disk around the center.
#[derive(Debug, Clone)]
pub struct Component {
    pub weight: f64,
    pub center: CenterSpec,
    pub shape: f64,
}

/// Mixture proposal for one complex coordinate.
#[derive(Debug, Clone)]
pub struct CoordSampler {
    pub components: Vec<Component>,
    pub tail_weight: f64,
    pub tail_center: Complex64,
    pub tail_s: f64,
}

impl CoordSampler {
    /// Uniform-disk proposal; the safe default when nothing is known.
    pub fn uniform_disk() -> Self {
        CoordSampler {
            components: vec![Component {
                weight: 0.8,
                center: CenterSpec::Fixed(Complex64::new(0.5, 0.0)),
                shape: 1.0,
            }],
            tail_weight: 0.2,
            tail_center: Complex64::new(0.5, 0.0),
            tail_s: 2.0,
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng, prefix: &[Complex64]) -> (Complex64, f64) {
        let mut pick = rng.gen::<f64>() * (self.tail_weight
            + self.components.iter().map(|c| c.weight).sum::<f64>());
        let mut chosen = None;
        for comp in &self.components {
            pick -= comp.weight;
            if pick < 0.0 && chosen.is_none() {
                chosen = Some(comp);
            }
        }
        let center = match chosen {
            Some(comp) => comp.center.resolve(prefix),
            None => self.tail_center,
        };
        // For very flat shapes the radius can underflow so far that adding it
        // to the center rounds back onto the center, which sits on a zero of
        // the proposal-matched singular factor. Redraw in that case; the
        // rounded-off mass is many orders below the estimator's resolution.
        // If the center itself is so large that no in-support radius is
        // representable next to it, nudge by one part in 1e9 instead — the
        // integrand is vanishingly small out there anyway.
        for _ in 0..64 {
            let phi = 2.0 * PI * rng.gen::<f64>();
            let u = 1.0 - rng.gen::<f64>(); // in (0, 1]
            let r = match chosen {
                Some(comp) => u.powf(1.0 / (2.0 * comp.shape)),
                None => (u.powf(-1.0 / (self.tail_s - 1.0)) - 1.0).sqrt(),
            };
            let z = center + Complex64::from_polar(r, phi);
            if z != center && z.is_finite() {
                return (z, self.density(z, prefix));
            }
        }
        let nudge = center.norm().max(1.0) * 1e-9;
        let z = center + Complex64::new(nudge, nudge);
        (z, self.density(z, prefix))
    }

    pub fn density(&self, z: Complex64, prefix: &[Complex64]) -> f64 {
        let mut q = 0.0;
        for comp in &self.components {
            let r = (z - comp.center.resolve(prefix)).norm();
            if r < 1.0 {
                q += comp.weight * (comp.shape / PI) * r.powf(2.0 * comp.shape - 2.0);
            }
        }
        let t = (z - self.tail_center).norm_sqr();
        q += self.tail_weight * ((self.tail_s - 1.0) / PI) * (1.0 + t).powf(-self.tail_s);
        q
    }
}

/// Product-form proposal over C^N with sequential conditional centers.
#[derive(Debug, Clone)]
pub struct VectorSampler {
    pub coords: Vec<CoordSampler>,
}

impl VectorSampler {
    pub fn sample(&self, rng: &mut ChaCha8Rng, point: &mut Vec<Complex64>) -> f64 {
        point.clear();
        let mut q = 1.0;
        for cs in &self.coords {
            let (z, qz) = {
                let (z, qz) = cs.sample(rng, point);
                (z, qz)
            };
            point.push(z);
            q *= qz;
        }
        q
    }

    pub fn density(&self, point: &[Complex64]) -> f64 {
        let mut q = 1.0;
        for (k, cs) in self.coords.iter().enumerate() {
            q *= cs.density(point[k], &point[..k]);
        }
        q
    }
}

fn approx_eq(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < 1e-12
}

/// Build a proposal matched to the factorized integrand.
///
/// For each coordinate, every factor singular at a known center contributes
/// its exponent floor there; the component shape 1 + sum(floors), clamped to
/// (0, 1], reproduces the local |z - c| profile. The tail exponent is the
/// negative of the total floor over all factors touching the coordinate.
pub fn sampler_for(f: &Integrand) -> VectorSampler {
    let mut coords = Vec::with_capacity(f.dim);
    for k in 0..f.dim {
        // (center, sum of floors at that center)
        let mut fixed: Vec<(Complex64, f64)> = Vec::new();
        let mut conditional: Option<(Vec<usize>, f64)> = None;
        let mut total_floor = 0.0;
        for factor in &f.factors {
            if !factor.base.coords().contains(&k) {
                continue;
            }
            let fl = factor.exp.floor();
            total_floor += fl;
            let center = match &factor.base {
                Base::Coord(_) => Some(Complex64::new(0.0, 0.0)),
                Base::OneMinusCoord(_) => Some(Complex64::new(1.0, 0.0)),
                Base::CoordMinusConst(_, c) => Some(*c),
                Base::OneMinusSum(ks) => {
                    if ks.iter().all(|&j| j <= k) {
                        let others: Vec<usize> =
                            ks.iter().copied().filter(|&j| j != k).collect();
                        let entry = conditional.get_or_insert((others, 0.0));
                        entry.1 += fl;
                    }
                    None
                }
                Base::Diff(_, _) => None, // moving singularity: raw MC
            };
            if let Some(c) = center {
                match fixed.iter_mut().find(|(fc, _)| approx_eq(*fc, c)) {
                    Some(entry) => entry.1 += fl,
                    None => fixed.push((c, fl)),
                }
            }
        }
        let mut components = Vec::new();
        for (c, fl) in &fixed {
            components.push(Component {
                weight: 0.0,
                center: CenterSpec::Fixed(*c),
                shape: (1.0 + fl).clamp(0.05, 1.0),
            });
        }
        if let Some((ks, fl)) = conditional {
            components.push(Component {
                weight: 0.0,
                center: CenterSpec::OneMinusSum(ks),
                shape: (1.0 + fl).clamp(0.05, 1.0),
            });
        }
        let tail_weight = 0.2;
        if components.is_empty() {
            components.push(Component {
                weight: 0.0,
                center: CenterSpec::Fixed(Complex64::new(0.5, 0.0)),
                shape: 1.0,
            });
        }
        let w = (1.0 - tail_weight) / components.len() as f64;
        for comp in &mut components {
            comp.weight = w;
        }
        let tail_center = {
            let fixed_centers: Vec<Complex64> = components
                .iter()
                .filter_map(|c| match c.center {
                    CenterSpec::Fixed(fc) => Some(fc),
                    _ => None,
                })
                .collect();
            if fixed_centers.is_empty() {
                Complex64::new(0.5, 0.0)
            } else {
                fixed_centers.iter().sum::<Complex64>() / fixed_centers.len() as f64
            }
        };
        coords.push(CoordSampler {
            components,
            tail_weight,
            tail_center,
            tail_s: (-total_floor).clamp(1.05, 3.0),
        });
    }
    VectorSampler { coords }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean_re: f64,
    pub mean_im: f64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub n: u64,
    pub seed: u64,
    pub chunks: u64,
}

impl MonteCarloEstimate {
    pub fn mean(&self) -> Complex64 {
        Complex64::new(self.mean_re, self.mean_im)
    }
}

/// One-pass moment accumulator for a complex-valued stream, mergeable in
/// fixed order across chunks.
#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    n: f64,
    mean_re: f64,
    mean_im: f64,
    m2_re: f64,
    m2_im: f64,
}

impl Acc {
    fn push(&mut self, v: Complex64) {
        self.n += 1.0;
        let d_re = v.re - self.mean_re;
        let d_im = v.im - self.mean_im;
        self.mean_re += d_re / self.n;
        self.mean_im += d_im / self.n;
        self.m2_re += d_re * (v.re - self.mean_re);
        self.m2_im += d_im * (v.im - self.mean_im);
    }

    fn merge(a: Acc, b: Acc) -> Acc {
        if a.n == 0.0 {
            return b;
        }
        if b.n == 0.0 {
            return a;
        }
        let n = a.n + b.n;
        let d_re = b.mean_re - a.mean_re;
        let d_im = b.mean_im - a.mean_im;
        Acc {
            n,
            mean_re: a.mean_re + d_re * b.n / n,
            mean_im: a.mean_im + d_im * b.n / n,
            m2_re: a.m2_re + b.m2_re + d_re * d_re * a.n * b.n / n,
            m2_im: a.m2_im + b.m2_im + d_im * d_im * a.n * b.n / n,
        }
    }
}

/// Unbiased importance-sampling estimate of the integral of `f` over C^N.
pub fn integrate<F>(
    f: F,
    sampler: &VectorSampler,
    n_samples: u64,
    seed: u64,
    chunks: u64,
) -> Result<MonteCarloEstimate>
where
    F: Fn(&[Complex64]) -> Result<Complex64> + Sync,
{
    if chunks == 0 || n_samples % chunks != 0 {
        return Err(Error::BadChunking {
            n: n_samples,
            chunks,
        });
    }
    let chunk_size = n_samples / chunks;
    let accs: Vec<Result<Acc>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk + 1);
            let mut acc = Acc::default();
            let mut point = Vec::with_capacity(sampler.coords.len());
            for _ in 0..chunk_size {
                let q = sampler.sample(&mut rng, &mut point);
                let v = f(&point)? / q;
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFiniteSample);
                }
                acc.push(v);
            }
            Ok(acc)
        })
        .collect();
    let mut total = Acc::default();
    for acc in accs {
        total = Acc::merge(total, acc?);
    }
    let n = total.n;
    Ok(MonteCarloEstimate {
        mean_re: total.mean_re,
        mean_im: total.mean_im,
        stderr_re: (total.m2_re / (n * (n - 1.0))).sqrt(),
        stderr_im: (total.m2_im / (n * (n - 1.0))).sqrt(),
        n: n_samples,
        seed,
        chunks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::FieldExponent;
    use crate::integrands::beta_integrand;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn uniform_disk_component_density() {
        let cs = CoordSampler {
            components: vec![Component {
                weight: 1.0,
                center: CenterSpec::Fixed(c(0.0, 0.0)),
                shape: 1.0,
            }],
            tail_weight: 0.0,
            tail_center: c(0.0, 0.0),
            tail_s: 2.0,
        };
        // shape 1 is the uniform disk: density 1/pi inside, 0 outside
        assert!((cs.density(c(0.3, 0.4), &[]) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(cs.density(c(2.0, 0.0), &[]), 0.0);
    }

    #[test]
    fn tail_density_normalizes() {
        // radial quadrature of the s = 2 tail: integral over C of
        // ((s-1)/pi)(1+|z|^2)^(-s) dA = (s-1) * int_0^inf (1+t)^(-s) dt
        // substituting t = v/(1-v) turns the integrand into (s-1)(1-v)^(s-2)
        for s in [2.0, 2.5, 3.0] {
            let g = |v: f64| (s - 1.0) * (1.0 - v).powf(s - 2.0);
            let m = 20000;
            let h = 1.0 / m as f64;
            let mut sum = g(0.0) + g(1.0);
            for i in 1..m {
                let v = i as f64 * h;
                sum += if i % 2 == 1 { 4.0 } else { 2.0 } * g(v);
            }
            let total = sum * h / 3.0;
            assert!((total - 1.0).abs() < 1e-6, "s={s}: {total}");
        }
    }

    #[test]
    fn power_law_radius_distribution() {
        // r = u^(1/(2p)) has P(r < x) = x^(2p); check the median for p = 0.3
        let cs = CoordSampler {
            components: vec![Component {
                weight: 1.0,
                center: CenterSpec::Fixed(c(0.0, 0.0)),
                shape: 0.3,
            }],
            tail_weight: 0.0,
            tail_center: c(0.0, 0.0),
            tail_s: 2.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 200_000;
        let median = 0.5f64.powf(1.0 / 0.6);
        let below = (0..n)
            .filter(|_| cs.sample(&mut rng, &[]).0.norm() < median)
            .count();
        let frac = below as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.005, "{frac}");
    }

    #[test]
    fn density_itself_integrates_to_one() {
        let sampler = VectorSampler {
            coords: vec![CoordSampler::uniform_disk(), CoordSampler::uniform_disk()],
        };
        let q = sampler.clone();
        let est = integrate(
            |p| Ok(Complex64::new(q.density(p), 0.0)),
            &sampler,
            10_000,
            42,
            4,
        )
        .unwrap();
        assert!((est.mean_re - 1.0).abs() < 1e-12);
        assert!(est.stderr_re < 1e-12);
        assert_eq!(est.mean_im, 0.0);
    }

    #[test]
    fn area_estimation() {
        let sampler = VectorSampler {
            coords: vec![CoordSampler::uniform_disk()],
        };
        let r2 = 0.49;
        let est = integrate(
            |p| {
                Ok(if (p[0] - c(0.5, 0.0)).norm_sqr() < r2 {
                    c(1.0, 0.0)
                } else {
                    c(0.0, 0.0)
                })
            },
            &sampler,
            200_000,
            3,
            8,
        )
        .unwrap();
        let truth = PI * r2;
        assert!(
            (est.mean_re - truth).abs() < 4.0 * est.stderr_re,
            "{} vs {truth} +- {}",
            est.mean_re,
            est.stderr_re
        );
    }

    #[test]
    fn beta_integral_small_run() {
        let a = FieldExponent::diagonal(0.3);
        let b = FieldExponent::diagonal(0.3);
        let f = beta_integrand(&a, &b);
        let sampler = sampler_for(&f);
        let est = integrate(|p| f.eval(p), &sampler, 400_000, 11, 8).unwrap();
        let rhs = crate::gamma::beta_field(&a, &b).unwrap() * PI;
        let z_re = (est.mean_re - rhs.re) / est.stderr_re;
        assert!(z_re.abs() < 4.0, "z_re = {z_re}");
        // diagonal parameters make the integrand exactly real
        assert_eq!(est.mean_im, 0.0);
        assert_eq!(est.stderr_im, 0.0);
    }

    #[test]
    fn stderr_scaling() {
        let a = FieldExponent::diagonal(0.3);
        let b = FieldExponent::diagonal(0.3);
        let f = beta_integrand(&a, &b);
        let sampler = sampler_for(&f);
        let small = integrate(|p| f.eval(p), &sampler, 100_000, 21, 4).unwrap();
        let big = integrate(|p| f.eval(p), &sampler, 400_000, 22, 4).unwrap();
        let ratio = small.stderr_re / big.stderr_re;
        assert!((1.6..2.4).contains(&ratio), "{ratio}");
    }

    #[test]
    fn determinism_across_worker_counts() {
        let f = beta_integrand(&FieldExponent::diagonal(0.3), &FieldExponent::diagonal(0.4));
        let sampler = sampler_for(&f);
        let run = || integrate(|p| f.eval(p), &sampler, 100_000, 7, 10).unwrap();
        let a = run();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(run);
        assert_eq!(a.mean_re.to_bits(), b.mean_re.to_bits());
        assert_eq!(a.mean_im.to_bits(), b.mean_im.to_bits());
        assert_eq!(a.stderr_re.to_bits(), b.stderr_re.to_bits());
    }

    #[test]
    fn bad_chunking_reported() {
        let f = beta_integrand(&FieldExponent::diagonal(0.3), &FieldExponent::diagonal(0.4));
        let sampler = sampler_for(&f);
        assert!(matches!(
            integrate(|p| f.eval(p), &sampler, 100, 7, 3),
            Err(Error::BadChunking { .. })
        ));
    }

    #[test]
    fn sampler_for_beta_has_both_centers() {
        let f = beta_integrand(&FieldExponent::diagonal(0.3), &FieldExponent::diagonal(0.4));
        let s = sampler_for(&f);
        assert_eq!(s.coords.len(), 1);
        let cs = &s.coords[0];
        assert_eq!(cs.components.len(), 2);
        // shapes match the singularity floors: 1 + (0.3 - 1) and 1 + (0.4 - 1)
        let shapes: Vec<f64> = cs.components.iter().map(|c| c.shape).collect();
        assert!(shapes.iter().any(|&p| (p - 0.3).abs() < 1e-12));
        assert!(shapes.iter().any(|&p| (p - 0.4).abs() < 1e-12));
        // total floor is (0.3-1) + (0.4-1) = -1.3 -> tail s = 1.3
        assert!((cs.tail_s - 1.3).abs() < 1e-12);
    }

    #[test]
    fn conditional_center_tracks_prefix() {
        let center = CenterSpec::OneMinusSum(vec![0, 1]);
        let prefix = [c(0.2, 0.1), c(0.3, -0.4)];
        let resolved = center.resolve(&prefix);
        assert!((resolved - c(0.5, 0.3)).norm() < 1e-15);
    }
}
