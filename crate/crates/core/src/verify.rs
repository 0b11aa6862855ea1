//! End-to-end verification: pick an identity, run the Monte Carlo estimate of
//! its left-hand side, evaluate the closed-form right-hand side, and report
//! z-scores. Out-of-domain parameter sets short-circuit to a domain report.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::closed_form::{
    beta_domain, dfa_domain, dfa_rhs, dirichlet_domain, dirichlet_rhs, dual_domain, dual_rhs,
    lemma_domain, lemma_main_rhs, main_domain, main_rhs, trapezoid_domain, trapezoid_rhs,
    DfaParams, DomainCheck, DomainVerdict, DualParams, LemmaParams, TrapezoidParams,
    TriangularParams,
};
use crate::error::{Error, Result};
use crate::exponents::FieldExponent;
use crate::gamma::beta_field;
use crate::integrands::{
    beta_integrand, dfa_integrand, dirichlet_integrand, dual_integrand, lemma_integrand,
    trapezoid_integrand, triangular_integrand, Integrand,
};
use crate::mc::{integrate, sampler_for, MonteCarloEstimate, VectorSampler};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "identity", content = "params", rename_all = "lowercase")]
pub enum IdentitySpec {
    Beta {
        a: FieldExponent,
        b: FieldExponent,
    },
    Dirichlet {
        a: Vec<FieldExponent>,
    },
    #[serde(alias = "lemma_main")]
    Lemma(LemmaParams),
    Dual(DualParams),
    Dfa(DfaParams),
    #[serde(rename = "theorem1", alias = "main")]
    Theorem1(TriangularParams),
    #[serde(rename = "theorem2", alias = "trapezoid")]
    Theorem2(TrapezoidParams),
}

impl IdentitySpec {
    pub fn name(&self) -> &'static str {
        match self {
            IdentitySpec::Beta { .. } => "beta",
            IdentitySpec::Dirichlet { .. } => "dirichlet",
            IdentitySpec::Lemma(_) => "lemma",
            IdentitySpec::Dual(_) => "dual",
            IdentitySpec::Dfa(_) => "dfa",
            IdentitySpec::Theorem1(_) => "theorem1",
            IdentitySpec::Theorem2(_) => "theorem2",
        }
    }

    pub fn domain(&self) -> DomainVerdict {
        match self {
            IdentitySpec::Beta { a, b } => beta_domain(a, b),
            IdentitySpec::Dirichlet { a } => dirichlet_domain(a),
            IdentitySpec::Lemma(p) => lemma_domain(p),
            IdentitySpec::Dual(p) => dual_domain(p),
            IdentitySpec::Dfa(p) => dfa_domain(p),
            IdentitySpec::Theorem1(p) => main_domain(p),
            IdentitySpec::Theorem2(p) => trapezoid_domain(p),
        }
    }

    pub fn rhs(&self) -> Result<Complex64> {
        match self {
            IdentitySpec::Beta { a, b } => beta_field(a, b),
            IdentitySpec::Dirichlet { a } => dirichlet_rhs(a),
            IdentitySpec::Lemma(p) => lemma_main_rhs(p),
            IdentitySpec::Dual(p) => dual_rhs(p),
            IdentitySpec::Dfa(p) => dfa_rhs(p),
            IdentitySpec::Theorem1(p) => main_rhs(p),
            IdentitySpec::Theorem2(p) => trapezoid_rhs(p),
        }
    }

    pub fn integrand(&self) -> Result<Integrand> {
        Ok(match self {
            IdentitySpec::Beta { a, b } => beta_integrand(a, b),
            IdentitySpec::Dirichlet { a } => {
                if a.len() < 2 {
                    return Err(Error::InvalidParameter(
                        "dirichlet needs n+1 >= 2 exponents".into(),
                    ));
                }
                dirichlet_integrand(a)
            }
            IdentitySpec::Lemma(p) => lemma_integrand(p),
            IdentitySpec::Dual(p) => dual_integrand(p),
            IdentitySpec::Dfa(p) => dfa_integrand(p),
            IdentitySpec::Theorem1(p) => {
                p.validate()?;
                triangular_integrand(p)
            }
            IdentitySpec::Theorem2(p) => {
                p.validate()?;
                trapezoid_integrand(p)
            }
        })
    }

    /// Constant relating the raw integral to the identity's LHS
    /// (the beta integral carries a 1/pi in its definition).
    pub fn lhs_prefactor(&self) -> f64 {
        match self {
            IdentitySpec::Beta { .. } => 1.0 / PI,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RhsValue {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ZScores {
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: String,
    pub params: serde_json::Value,
    pub domain: Vec<DomainCheck>,
    pub domain_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<MonteCarloEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<RhsValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<ZScores>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_seconds: Option<f64>,
}

impl VerificationReport {
    pub fn passes(&self, gate: f64) -> bool {
        self.domain_pass && self.z.map(|z| z.abs < gate).unwrap_or(false)
    }
}

/// One z-score component. A zero stderr means the sampled values were
/// constant in that component (e.g. an exactly real integrand); the match
/// then has to hold up to closed-form rounding noise at the identity's scale.
fn z_component(diff: f64, stderr: f64, scale: f64) -> f64 {
    if stderr > 0.0 {
        diff / stderr
    } else if diff.abs() <= 1e-9 * scale.max(1.0) {
        0.0
    } else {
        f64::INFINITY
    }
}

fn params_value(spec: &IdentitySpec) -> serde_json::Value {
    serde_json::to_value(spec)
        .ok()
        .and_then(|mut v| v.get_mut("params").map(serde_json::Value::take))
        .unwrap_or(serde_json::Value::Null)
}

/// Run the full check. Domain failure yields a report with `mc` absent.
pub fn verify(
    spec: &IdentitySpec,
    n_samples: u64,
    seed: u64,
    chunks: u64,
    sampler: Option<&VectorSampler>,
) -> Result<VerificationReport> {
    let domain = spec.domain();
    let mut report = VerificationReport {
        identity: spec.name().to_string(),
        params: params_value(spec),
        domain: domain.checks,
        domain_pass: domain.all_pass,
        mc: None,
        rhs: None,
        z: None,
        wall_seconds: None,
    };
    if !domain.all_pass {
        return Ok(report);
    }
    let rhs = spec.rhs()?;
    let integrand = spec.integrand()?;
    let default_sampler;
    let sampler = match sampler {
        Some(s) => s,
        None => {
            default_sampler = sampler_for(&integrand);
            &default_sampler
        }
    };
    let pre = spec.lhs_prefactor();
    let est = integrate(
        |p| Ok(integrand.eval(p)? * pre),
        sampler,
        n_samples,
        seed,
        chunks,
    )?;
    let scale = rhs.norm();
    let z_re = z_component(est.mean_re - rhs.re, est.stderr_re, scale);
    let z_im = z_component(est.mean_im - rhs.im, est.stderr_im, scale);
    report.mc = Some(est);
    report.rhs = Some(RhsValue {
        re: rhs.re,
        im: rhs.im,
    });
    report.z = Some(ZScores {
        re: z_re,
        im: z_im,
        abs: (z_re * z_re + z_im * z_im).sqrt(),
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn fe(x: f64) -> FieldExponent {
        FieldExponent::diagonal(x)
    }

    #[test]
    fn beta_verify_in_domain() {
        let spec = IdentitySpec::Beta {
            a: fe(0.3),
            b: fe(0.4),
        };
        let report = verify(&spec, 400_000, 5, 8, None).unwrap();
        assert!(report.domain_pass);
        let z = report.z.unwrap();
        assert!(z.abs < 4.0, "z = {}", z.abs);
        assert!(report.mc.unwrap().n == 400_000);
    }

    #[test]
    fn out_of_domain_skips_mc() {
        let spec = IdentitySpec::Beta {
            a: fe(-0.1),
            b: fe(0.4),
        };
        let report = verify(&spec, 1000, 5, 1, None).unwrap();
        assert!(!report.domain_pass);
        assert!(report.mc.is_none());
        assert!(report.z.is_none());
        assert!(report.domain.iter().any(|c| !c.pass));
    }

    #[test]
    fn spec_json_round_trip() {
        let specs = vec![
            IdentitySpec::Beta {
                a: FieldExponent::new(Complex64::new(0.7, 0.0), 1),
                b: FieldExponent::new(Complex64::new(0.2, 0.0), -1),
            },
            IdentitySpec::Dirichlet {
                a: vec![fe(0.2), fe(0.3), fe(0.2)],
            },
            IdentitySpec::Dfa(DfaParams {
                n: 2,
                sigma: fe(0.3),
                tau: fe(0.3),
                theta: fe(0.15),
            }),
            IdentitySpec::Dual(DualParams {
                n: 1,
                theta: fe(0.3),
                u: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            }),
            IdentitySpec::Theorem1(TriangularParams {
                n: 2,
                sigma: vec![fe(0.3), fe(0.25)],
                tau: vec![fe(0.3), fe(0.25)],
                theta: vec![vec![fe(0.55)]],
            }),
        ];
        for spec in specs {
            let s = serde_json::to_string(&spec).unwrap();
            let back: IdentitySpec = serde_json::from_str(&s).unwrap();
            assert_eq!(
                serde_json::to_string(&back).unwrap(),
                s,
                "round trip failed for {s}"
            );
        }
    }

    #[test]
    fn spec_aliases_accepted() {
        let s = r#"{"identity":"lemma_main","params":{"n":1,"sigma":"0.3|0","tau":"0.4|0","theta":[],"z":[]}}"#;
        let spec: IdentitySpec = serde_json::from_str(s).unwrap();
        assert_eq!(spec.name(), "lemma");
        let s = r#"{"identity":"main","params":{"n":1,"sigma":["0.3|0"],"tau":["0.4|0"],"theta":[]}}"#;
        let spec: IdentitySpec = serde_json::from_str(s).unwrap();
        assert_eq!(spec.name(), "theorem1");
    }

    #[test]
    fn z_component_edge_cases() {
        assert_eq!(z_component(0.0, 0.0, 1.0), 0.0);
        assert_eq!(z_component(1.0, 0.0, 1.0), f64::INFINITY);
        // rounding noise in the closed form at large scale is not a failure
        assert_eq!(z_component(1e-10, 0.0, 1e5), 0.0);
        assert!((z_component(1.0, 0.5, 1.0) - 2.0).abs() < 1e-15);
    }
}
