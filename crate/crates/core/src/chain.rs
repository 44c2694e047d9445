//! Mirror-symmetric XX chain: coupling profiles and the single-excitation
//! Hamiltonian.
//!
//! Sites are labelled 1..=N as in the usual spin-chain convention; internal
//! storage is 0-based. Bonds (1,2) and (N-1,N) carry the boundary coupling
//! `alpha`, bonds (2,3) and (N-2,N-1) the near-boundary coupling `beta`, and
//! every bulk bond is fixed at gamma = 1. Optional relative deviations
//! `delta_alpha`, `delta_beta` model miswired couplings on Bob's side only
//! (bonds (N-1,N) and (N-2,N-1)); Alice's side always stays ideal.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Chain geometry and dimensionless couplings; defines one static Hamiltonian.
///
/// Immutable after construction, so instances can be shared freely across
/// worker threads.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainSpec {
    n: usize,
    alpha: f64,
    beta: f64,
    delta_alpha: f64,
    delta_beta: f64,
}

/// Serde helper carrying the raw JSON fields before validation.
#[derive(Deserialize)]
struct RawChainSpec {
    n: usize,
    alpha: f64,
    beta: f64,
    #[serde(default)]
    delta_alpha: f64,
    #[serde(default)]
    delta_beta: f64,
}

impl<'de> Deserialize<'de> for ChainSpec {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let raw = RawChainSpec::deserialize(deserializer)?;
        ChainSpec::with_deviations(raw.n, raw.alpha, raw.beta, raw.delta_alpha, raw.delta_beta)
            .map_err(serde::de::Error::custom)
    }
}

impl ChainSpec {
    /// Ideal chain with boundary coupling `alpha` and near-boundary `beta`.
    pub fn new(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        Self::with_deviations(n, alpha, beta, 0.0, 0.0)
    }

    /// Uniform reference chain (`alpha = beta = 1`).
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(n, 1.0, 1.0)
    }

    /// Chain with Bob-side relative deviations on the outer two bonds.
    pub fn with_deviations(
        n: usize,
        alpha: f64,
        beta: f64,
        delta_alpha: f64,
        delta_beta: f64,
    ) -> Result<Self> {
        if n < 6 {
            return Err(Error::ChainTooShort { n });
        }
        for (what, v) in [
            ("alpha", alpha),
            ("beta", beta),
            ("delta_alpha", delta_alpha),
            ("delta_beta", delta_beta),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite { what });
            }
        }
        if alpha <= 0.0 {
            return Err(Error::NonPositiveCoupling {
                bond: "(1,2)".into(),
                value: alpha,
            });
        }
        if beta <= 0.0 {
            return Err(Error::NonPositiveCoupling {
                bond: "(2,3)".into(),
                value: beta,
            });
        }
        if alpha * (1.0 + delta_alpha) <= 0.0 {
            return Err(Error::NonPositiveCoupling {
                bond: format!("({},{})", n - 1, n),
                value: alpha * (1.0 + delta_alpha),
            });
        }
        if beta * (1.0 + delta_beta) <= 0.0 {
            return Err(Error::NonPositiveCoupling {
                bond: format!("({},{})", n - 2, n - 1),
                value: beta * (1.0 + delta_beta),
            });
        }
        Ok(Self {
            n,
            alpha,
            beta,
            delta_alpha,
            delta_beta,
        })
    }

    /// Same couplings with the deviations replaced.
    pub fn replacing_deviations(&self, delta_alpha: f64, delta_beta: f64) -> Result<Self> {
        Self::with_deviations(self.n, self.alpha, self.beta, delta_alpha, delta_beta)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Bulk coupling; fixed to 1 (the overall energy scale J0 is factored out).
    pub fn gamma(&self) -> f64 {
        1.0
    }

    pub fn delta_alpha(&self) -> f64 {
        self.delta_alpha
    }

    pub fn delta_beta(&self) -> f64 {
        self.delta_beta
    }

    /// Parses the JSON object form `{"n", "alpha", "beta", "delta_alpha",
    /// "delta_beta"}`; omitted deltas default to 0.
    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("ChainSpec serialization cannot fail")
    }
}

/// The N-1 bond couplings J_{i,i+1}/J0 of a chain, entry i holding the bond
/// between sites i+1 and i+2 (1-based labels).
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingVector {
    values: Vec<f64>,
}

impl CouplingVector {
    /// Validates an explicit profile: at least one bond, all entries positive
    /// and finite. Mirror symmetry and the N >= 6 rule are [`ChainSpec`]
    /// concerns; raw profiles may be as small as two sites (useful for
    /// analytic cross-checks).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::ChainTooShort { n: 1 });
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { what: "coupling" });
            }
            if v <= 0.0 {
                return Err(Error::NonPositiveCoupling {
                    bond: format!("({},{})", i + 1, i + 2),
                    value: v,
                });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of sites N of the chain this profile belongs to.
    pub fn site_count(&self) -> usize {
        self.values.len() + 1
    }
}

/// Builds the bond profile of a chain: `values[0] = alpha`,
/// `values[1] = beta`, `values[N-3] = beta (1 + delta_beta)`,
/// `values[N-2] = alpha (1 + delta_alpha)`, bulk entries 1.
pub fn build_couplings(spec: &ChainSpec) -> CouplingVector {
    let n = spec.n();
    let mut values = vec![1.0; n - 1];
    values[0] = spec.alpha();
    values[1] = spec.beta();
    values[n - 3] = spec.beta() * (1.0 + spec.delta_beta());
    values[n - 2] = spec.alpha() * (1.0 + spec.delta_alpha());
    CouplingVector { values }
}

/// Single-excitation Hamiltonian: real symmetric tridiagonal with zero
/// diagonal, element (k, k+1) holding the bond coupling. The vacuum sector is
/// not represented here; the Hamiltonian annihilates it and the vacuum
/// amplitude is tracked separately by the propagator.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    offdiagonal: CouplingVector,
    matrix: DMatrix<f64>,
}

impl HamiltonianMatrix {
    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn offdiagonal(&self) -> &CouplingVector {
        &self.offdiagonal
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Convenience: couplings and matrix in one step.
    pub fn from_spec(spec: &ChainSpec) -> Self {
        build_hamiltonian(&build_couplings(spec))
    }
}

/// Assembles the dense N x N tridiagonal matrix from a bond profile.
pub fn build_hamiltonian(couplings: &CouplingVector) -> HamiltonianMatrix {
    let n = couplings.site_count();
    let mut matrix = DMatrix::zeros(n, n);
    for (k, &j) in couplings.values().iter().enumerate() {
        matrix[(k, k + 1)] = j;
        matrix[(k + 1, k)] = j;
    }
    HamiltonianMatrix {
        offdiagonal: couplings.clone(),
        matrix,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_profile_is_all_ones() {
        let spec = ChainSpec::new(6, 1.0, 1.0).unwrap();
        assert_eq!(build_couplings(&spec).values(), &[1.0; 5]);
    }

    #[test]
    fn boundary_couplings_mirrored() {
        let spec = ChainSpec::new(10, 0.5, 1.0).unwrap();
        let j = build_couplings(&spec);
        assert_eq!(j.values(), &[0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5]);
    }

    #[test]
    fn deviation_applies_to_bob_side_only() {
        let spec = ChainSpec::with_deviations(12, 0.47, 1.0, 0.1, 0.0).unwrap();
        let j = build_couplings(&spec);
        assert_eq!(j.values()[0], 0.47);
        assert!((j.values()[10] - 0.47 * 1.1).abs() < 1e-15);
        assert!((j.values()[10] - 0.517).abs() < 1e-12);
    }

    #[test]
    fn short_chain_rejected() {
        assert!(matches!(
            ChainSpec::new(5, 1.0, 1.0),
            Err(Error::ChainTooShort { n: 5 })
        ));
    }

    #[test]
    fn non_positive_and_non_finite_rejected() {
        assert!(ChainSpec::new(10, 0.0, 1.0).is_err());
        assert!(ChainSpec::new(10, -0.5, 1.0).is_err());
        assert!(ChainSpec::new(10, 1.0, f64::NAN).is_err());
        assert!(ChainSpec::with_deviations(10, 1.0, 1.0, -1.0, 0.0).is_err());
        assert!(ChainSpec::with_deviations(10, 1.0, 1.0, 0.0, -1.5).is_err());
        assert!(ChainSpec::with_deviations(10, 1.0, 1.0, f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn hamiltonian_is_symmetric_tridiagonal_zero_diagonal() {
        let spec = ChainSpec::new(10, 0.51, 1.0).unwrap();
        let h = HamiltonianMatrix::from_spec(&spec);
        let m = h.as_matrix();
        assert_eq!(
            h.offdiagonal().values(),
            &[0.51, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.51]
        );
        let asym = (m - m.transpose()).abs().max();
        assert_eq!(asym, 0.0);
        for i in 0..10 {
            assert_eq!(m[(i, i)], 0.0);
            for j in 0..10 {
                if i.abs_diff(j) > 1 {
                    assert_eq!(m[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn mirror_symmetry_commutes_with_reversal() {
        // P H P = H for delta = 0, to machine precision (exact equality here
        // since entries are mirrored by construction).
        let spec = ChainSpec::new(9, 0.7, 1.3).unwrap();
        let h = HamiltonianMatrix::from_spec(&spec);
        let n = h.dimension();
        let m = h.as_matrix();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(m[(i, j)], m[(n - 1 - i, n - 1 - j)]);
            }
        }
    }

    #[test]
    fn hamiltonian_affine_in_boundary_couplings() {
        // H(alpha, beta) = alpha B_a + beta B_b + C. Check affine consistency
        // at three coupling points: H(2,1) - H(1,1) must equal H(3,1) - H(2,1).
        let h = |a: f64, b: f64| {
            HamiltonianMatrix::from_spec(&ChainSpec::new(8, a, b).unwrap())
                .as_matrix()
                .clone()
        };
        let d1 = h(2.0, 1.0) - h(1.0, 1.0);
        let d2 = h(3.0, 1.0) - h(2.0, 1.0);
        assert!((d1 - d2).abs().max() == 0.0);
        let e1 = h(1.0, 2.0) - h(1.0, 1.0);
        let e2 = h(1.0, 3.0) - h(1.0, 2.0);
        assert!((e1 - e2).abs().max() == 0.0);
    }

    #[test]
    fn json_round_trip_and_default_deltas() {
        let spec = ChainSpec::with_deviations(10, 0.51, 1.0, 0.02, -0.01).unwrap();
        let back = ChainSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(spec, back);

        let parsed = ChainSpec::from_json(r#"{"n": 10, "alpha": 0.5, "beta": 1.0}"#).unwrap();
        assert_eq!(parsed.delta_alpha(), 0.0);
        assert_eq!(parsed.delta_beta(), 0.0);

        // invalid specs must not deserialize
        assert!(ChainSpec::from_json(r#"{"n": 4, "alpha": 1.0, "beta": 1.0}"#).is_err());
        assert!(ChainSpec::from_json(r#"{"n": 10, "alpha": -1.0, "beta": 1.0}"#).is_err());
    }

    #[test]
    fn coupling_vector_validation() {
        assert!(CouplingVector::new(vec![]).is_err());
        assert!(CouplingVector::new(vec![1.0, 0.0, 1.0]).is_err());
        assert!(CouplingVector::new(vec![1.0, f64::NAN]).is_err());
        let ok = CouplingVector::new(vec![0.5, 1.0, 0.5]).unwrap();
        assert_eq!(ok.site_count(), 4);
        assert_eq!(CouplingVector::new(vec![1.0]).unwrap().site_count(), 2);
    }
}
