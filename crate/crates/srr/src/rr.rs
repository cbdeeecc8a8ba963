//! k-ary randomized response: exact per-coordinate probabilities, keyed
//! sampling, sparse probability-ratio evaluation and KL diagnostics.
//!
//! The mechanism reports the true symbol with probability
//! `e^eps / (e^eps + k - 1)` and each other symbol with probability
//! `1 / (e^eps + k - 1)`. Everything here is a pure function.

use crate::error::{Error, Result};
use crate::prng::{uniform_f64_at, DiscreteDist, GeneratorKey};

/// Budgets above this are clamped inside samplers; `e^eps` would otherwise
/// lose all contrast against the 53-bit uniform resolution anyway.
pub const EPSILON_CLAMP: f64 = 50.0;

/// Privacy and shape parameters shared by every stage of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyConfig {
    /// Privacy budget; `0` is accepted and yields uniform reporting.
    pub epsilon: f64,
    /// Alphabet size, at least 2.
    pub k: u16,
    /// Index-privacy parameter of the compression layer, strictly above 1.
    pub alpha: f64,
    /// Chunking parameter, strictly positive; the chunk count is
    /// `ceil(beta * epsilon * d)`. Values below 1 trade wire size for
    /// encoder time.
    pub beta: f64,
}

impl PrivacyConfig {
    pub fn new(epsilon: f64, k: u16, alpha: f64, beta: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::BadConfig {
                reason: format!("epsilon must be finite and >= 0, got {epsilon}"),
            });
        }
        if k < 2 {
            return Err(Error::BadConfig {
                reason: format!("alphabet size k must be >= 2, got {k}"),
            });
        }
        if !alpha.is_finite() || alpha <= 1.0 {
            return Err(Error::BadConfig {
                reason: format!("alpha must be finite and > 1, got {alpha}"),
            });
        }
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::BadConfig {
                reason: format!("beta must be finite and > 0, got {beta}"),
            });
        }
        Ok(Self {
            epsilon,
            k,
            alpha,
            beta,
        })
    }

    fn check_symbol(&self, symbol: u16) -> Result<()> {
        if symbol >= self.k {
            return Err(Error::SymbolOutOfAlphabet {
                symbol,
                k: self.k,
            });
        }
        Ok(())
    }

    /// Probability of reporting the true symbol, `e^eps / (e^eps + k - 1)`,
    /// computed in the `e^-eps` form so large budgets stay exact.
    pub fn p_same(&self) -> f64 {
        1.0 / (1.0 + (self.k as f64 - 1.0) * (-self.epsilon).exp())
    }

    /// Probability of reporting any one fixed wrong symbol.
    pub fn p_other(&self) -> f64 {
        let e = (-self.epsilon).exp();
        e / (1.0 + (self.k as f64 - 1.0) * e)
    }
}

/// Probability that randomized response on `true_value` reports `report`.
pub fn rr_pmf(true_value: u16, report: u16, cfg: &PrivacyConfig) -> Result<f64> {
    cfg.check_symbol(true_value)?;
    cfg.check_symbol(report)?;
    Ok(if true_value == report {
        cfg.p_same()
    } else {
        cfg.p_other()
    })
}

/// The full reporting distribution of one coordinate with true symbol
/// `true_value`, as a validated discrete distribution.
pub fn rr_distribution(true_value: u16, cfg: &PrivacyConfig) -> Result<DiscreteDist> {
    cfg.check_symbol(true_value)?;
    let masses: Vec<f64> = (0..cfg.k)
        .map(|j| {
            if j == true_value {
                cfg.p_same()
            } else {
                cfg.p_other()
            }
        })
        .collect();
    DiscreteDist::new(masses)
}

/// Inverse CDF of the reporting distribution, evaluated without
/// materializing the alphabet. Used on both the encoding and decoding
/// side so derived symbols match bit for bit.
pub(crate) fn rr_quantile(u: f64, true_value: u16, cfg: &PrivacyConfig) -> u16 {
    let eps = cfg.epsilon.min(EPSILON_CLAMP);
    let e = (-eps).exp();
    let norm = 1.0 + (cfg.k as f64 - 1.0) * e;
    let p_same = 1.0 / norm;
    let p_other = e / norm;
    let t = true_value as f64;
    let below = t * p_other;
    if u < below {
        (u / p_other) as u16
    } else if u < below + p_same {
        true_value
    } else {
        let j = true_value as u64 + 1 + ((u - below - p_same) / p_other) as u64;
        j.min(cfg.k as u64 - 1) as u16
    }
}

/// One keyed randomized-response draw for a coordinate whose true symbol
/// is `true_value`. Deterministic in `(key, index)`; budgets above
/// [`EPSILON_CLAMP`] are clamped.
pub fn sample_rr(
    true_value: u16,
    cfg: &PrivacyConfig,
    key: GeneratorKey,
    index: u64,
) -> Result<u16> {
    cfg.check_symbol(true_value)?;
    Ok(rr_quantile(uniform_f64_at(key, index), true_value, cfg))
}

/// Density ratio dP/dQ of a chunk draw, evaluated on the non-trivial
/// coordinates only. `values`, `refs` and `draws` are the input values,
/// reference values and drawn symbols at those coordinates; each factor
/// is `e^eps` when the draw hits the input value, `e^-eps` when it hits
/// the reference value and 1 otherwise.
pub fn proba_ratio(values: &[u16], refs: &[u16], draws: &[u16], cfg: &PrivacyConfig) -> Result<f64> {
    if values.len() != refs.len() {
        return Err(Error::LengthMismatch {
            left: values.len(),
            right: refs.len(),
        });
    }
    if values.len() != draws.len() {
        return Err(Error::LengthMismatch {
            left: values.len(),
            right: draws.len(),
        });
    }
    let e_pos = cfg.epsilon.exp();
    let e_neg = (-cfg.epsilon).exp();
    let mut ratio = 1.0;
    for ((&v, &c), &z) in values.iter().zip(refs).zip(draws) {
        cfg.check_symbol(v)?;
        cfg.check_symbol(c)?;
        cfg.check_symbol(z)?;
        if v == c {
            return Err(Error::TrivialEntry { index: 0, value: v });
        }
        if z == v {
            ratio *= e_pos;
        } else if z == c {
            ratio *= e_neg;
        }
    }
    Ok(ratio)
}

/// KL divergence between the reporting distributions of two coordinates
/// whose true symbols differ: `eps * (e^eps - 1) / (e^eps + k - 1)`.
pub fn rr_kl_per_coord(cfg: &PrivacyConfig) -> f64 {
    let e = (-cfg.epsilon).exp();
    let k = cfg.k as f64;
    cfg.epsilon * (1.0 - e) / (1.0 + (k - 1.0) * e)
}

/// How a reference vector is stored: a single repeated symbol, or one
/// explicit symbol per coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
enum ReferenceRepr {
    Constant(u16),
    Dense(Vec<u16>),
}

/// The publicly shared vector against which sparsity is defined. Both
/// parties hold it verbatim; the candidate distribution is randomized
/// response applied to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceVector {
    n: u64,
    k: u16,
    repr: ReferenceRepr,
}

impl ReferenceVector {
    /// A reference with the same symbol at every coordinate (the all-zero
    /// adjacency vector, the all-unrated interaction vector, ...).
    pub fn constant(n: u64, k: u16, value: u16) -> Result<Self> {
        if k < 2 {
            return Err(Error::BadVector {
                reason: format!("alphabet size k must be >= 2, got {k}"),
            });
        }
        if value >= k {
            return Err(Error::SymbolOutOfAlphabet { symbol: value, k });
        }
        Ok(Self {
            n,
            k,
            repr: ReferenceRepr::Constant(value),
        })
    }

    pub fn dense(k: u16, values: Vec<u16>) -> Result<Self> {
        if k < 2 {
            return Err(Error::BadVector {
                reason: format!("alphabet size k must be >= 2, got {k}"),
            });
        }
        if let Some(&bad) = values.iter().find(|&&v| v >= k) {
            return Err(Error::SymbolOutOfAlphabet { symbol: bad, k });
        }
        Ok(Self {
            n: values.len() as u64,
            k,
            repr: ReferenceRepr::Dense(values),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u16 {
        self.k
    }

    pub fn value_at(&self, index: u64) -> Result<u16> {
        if index >= self.n {
            return Err(Error::IndexOutOfRange {
                index,
                n: self.n,
            });
        }
        Ok(match &self.repr {
            ReferenceRepr::Constant(v) => *v,
            ReferenceRepr::Dense(values) => values[index as usize],
        })
    }
}

/// A length-`n` vector over `{0..k-1}` stored as the coordinates where it
/// differs from a reference. Indices are strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseVector {
    n: u64,
    k: u16,
    entries: Vec<(u64, u16)>,
}

impl SparseVector {
    pub fn new(n: u64, k: u16, entries: Vec<(u64, u16)>) -> Result<Self> {
        if k < 2 {
            return Err(Error::BadVector {
                reason: format!("alphabet size k must be >= 2, got {k}"),
            });
        }
        let mut prev: Option<u64> = None;
        for &(index, value) in &entries {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, n });
            }
            if value >= k {
                return Err(Error::SymbolOutOfAlphabet { symbol: value, k });
            }
            if let Some(p) = prev {
                if index <= p {
                    return Err(Error::BadVector {
                        reason: format!("indices not strictly increasing at {index}"),
                    });
                }
            }
            prev = Some(index);
        }
        Ok(Self { n, k, entries })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u16 {
        self.k
    }

    /// Number of non-trivial entries.
    pub fn d(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(u64, u16)] {
        &self.entries
    }

    /// Checks that every stored value actually differs from the reference.
    pub fn validate_against(&self, reference: &ReferenceVector) -> Result<()> {
        if self.n != reference.n() {
            return Err(Error::DimensionMismatch {
                vector_n: self.n,
                context_n: reference.n(),
            });
        }
        if self.k != reference.k() {
            return Err(Error::BadVector {
                reason: format!(
                    "alphabet mismatch: vector k={}, reference k={}",
                    self.k,
                    reference.k()
                ),
            });
        }
        for &(index, value) in &self.entries {
            if reference.value_at(index)? == value {
                return Err(Error::TrivialEntry { index, value });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prng::gen_from;
    use proptest::prelude::*;

    fn cfg(epsilon: f64, k: u16) -> PrivacyConfig {
        PrivacyConfig::new(epsilon, k, 2.0, 2.0).unwrap()
    }

    #[test]
    fn pmf_uniform_at_zero_budget() {
        let c = cfg(0.0, 4);
        for t in 0..4 {
            for j in 0..4 {
                assert!((rr_pmf(t, j, &c).unwrap() - 0.25).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn pmf_ln2_binary() {
        let c = cfg(2f64.ln(), 2);
        assert!((rr_pmf(1, 1, &c).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((rr_pmf(1, 0, &c).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn pmf_rejects_bad_symbols() {
        let c = cfg(1.0, 3);
        assert!(rr_pmf(3, 0, &c).is_err());
        assert!(rr_pmf(0, 3, &c).is_err());
    }

    #[test]
    fn sample_rr_is_deterministic() {
        let c = cfg(1.0, 4);
        let key = GeneratorKey::new(99, 0);
        assert_eq!(
            sample_rr(2, &c, key, 17).unwrap(),
            sample_rr(2, &c, key, 17).unwrap()
        );
    }

    #[test]
    fn sample_rr_near_deterministic_at_large_budget() {
        let c = cfg(50.0, 2);
        let key = GeneratorKey::new(7, 0);
        for i in 0..10_000 {
            assert_eq!(sample_rr(1, &c, key, i).unwrap(), 1);
        }
    }

    #[test]
    fn quantile_agrees_with_generic_inverse_cdf() {
        for &(eps, k) in &[(0.0, 2u16), (0.3, 3), (1.0, 4), (2.5, 6)] {
            let c = cfg(eps, k);
            for t in 0..k {
                let dist = rr_distribution(t, &c).unwrap();
                let key = GeneratorKey::new(0x5eed, t as u32);
                for i in 0..20_000 {
                    let fast = sample_rr(t, &c, key, i).unwrap();
                    let generic = gen_from(&dist, key, i);
                    assert_eq!(fast, generic, "eps={eps} k={k} t={t} i={i}");
                }
            }
        }
    }

    #[test]
    fn ratio_empty_product_is_one() {
        let c = cfg(1.0, 2);
        assert_eq!(proba_ratio(&[], &[], &[], &c).unwrap(), 1.0);
    }

    #[test]
    fn ratio_all_hits_is_exp_3eps() {
        let c = cfg(1.0, 2);
        let r = proba_ratio(&[1, 1, 1], &[0, 0, 0], &[1, 1, 1], &c).unwrap();
        assert!((r - 3f64.exp()).abs() / 3f64.exp() < 1e-12);
    }

    #[test]
    fn ratio_mixed_draw_cancels() {
        // z hits the value once, the reference once, and a third symbol once.
        let c = cfg(1.0, 3);
        let r = proba_ratio(&[1, 1, 1], &[0, 0, 0], &[1, 0, 2], &c).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_rejects_bad_input() {
        let c = cfg(1.0, 2);
        assert!(proba_ratio(&[1], &[0, 1], &[0], &c).is_err());
        assert!(proba_ratio(&[1], &[1], &[0], &c).is_err());
    }

    #[test]
    fn kl_zero_at_zero_budget() {
        assert_eq!(rr_kl_per_coord(&cfg(0.0, 5)), 0.0);
    }

    #[test]
    fn kl_matches_direct_summation() {
        let c = cfg(1.0, 2);
        let p = rr_distribution(1, &c).unwrap();
        let q = rr_distribution(0, &c).unwrap();
        let direct: f64 = (0..2)
            .map(|j| {
                let pj = p.mass(j);
                pj * (pj / q.mass(j)).ln()
            })
            .sum();
        assert!((rr_kl_per_coord(&c) - direct).abs() < 1e-12);
    }

    #[test]
    fn kl_bounded_by_epsilon_on_grid() {
        for &eps in &[0.1, 0.5, 1.0, 2.0, 5.0] {
            for &k in &[2u16, 3, 8, 64] {
                assert!(rr_kl_per_coord(&cfg(eps, k)) <= eps);
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(PrivacyConfig::new(-1.0, 2, 2.0, 2.0).is_err());
        assert!(PrivacyConfig::new(1.0, 1, 2.0, 2.0).is_err());
        assert!(PrivacyConfig::new(1.0, 2, 1.0, 2.0).is_err());
        assert!(PrivacyConfig::new(1.0, 2, 2.0, 0.0).is_err());
        assert!(PrivacyConfig::new(1.0, 2, 2.0, 0.5).is_ok());
        assert!(PrivacyConfig::new(0.0, 2, 2.0, 1.0).is_ok());
    }

    #[test]
    fn sparse_vector_validation() {
        assert!(SparseVector::new(10, 2, vec![(1, 1), (5, 1)]).is_ok());
        assert!(SparseVector::new(10, 2, vec![(5, 1), (1, 1)]).is_err());
        assert!(SparseVector::new(10, 2, vec![(1, 1), (1, 1)]).is_err());
        assert!(SparseVector::new(10, 2, vec![(10, 1)]).is_err());
        assert!(SparseVector::new(10, 2, vec![(1, 2)]).is_err());
    }

    #[test]
    fn reference_vector_lookup() {
        let c = ReferenceVector::constant(4, 3, 2).unwrap();
        assert_eq!(c.value_at(3).unwrap(), 2);
        assert!(c.value_at(4).is_err());
        let d = ReferenceVector::dense(3, vec![0, 1, 2]).unwrap();
        assert_eq!(d.value_at(1).unwrap(), 1);
        assert!(ReferenceVector::dense(2, vec![0, 2]).is_err());
    }

    #[test]
    fn trivial_entry_detected() {
        let reference = ReferenceVector::dense(3, vec![0, 1, 2]).unwrap();
        let ok = SparseVector::new(3, 3, vec![(1, 2)]).unwrap();
        assert!(ok.validate_against(&reference).is_ok());
        let trivial = SparseVector::new(3, 3, vec![(1, 1)]).unwrap();
        assert!(trivial.validate_against(&reference).is_err());
    }

    proptest! {
        #[test]
        fn prop_pmf_normalizes(eps in 0.0f64..8.0, k in 2u16..12, t in 0u16..12) {
            let t = t % k;
            let c = cfg(eps, k);
            let total: f64 = (0..k).map(|j| rr_pmf(t, j, &c).unwrap()).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }

        #[test]
        fn prop_ratio_factors_two_point(
            eps in 0.0f64..4.0,
            k in 2u16..6,
            seed in any::<u64>(),
        ) {
            // Every factor of the ratio is e^eps, e^-eps or 1, so the whole
            // product stays within [e^-eps*d, e^eps*d] and matches the
            // brute-force per-coordinate pmf ratio.
            let c = cfg(eps, k);
            let key = GeneratorKey::new(seed as u128, 0);
            let d = 1 + (seed % 5) as usize;
            let mut values = Vec::new();
            let mut refs = Vec::new();
            let mut draws = Vec::new();
            for i in 0..d {
                let c_sym = (uniform_at_helper(key, 3 * i as u64) % k as u64) as u16;
                let mut v_sym = (uniform_at_helper(key, 3 * i as u64 + 1) % k as u64) as u16;
                if v_sym == c_sym {
                    v_sym = (v_sym + 1) % k;
                }
                let z_sym = (uniform_at_helper(key, 3 * i as u64 + 2) % k as u64) as u16;
                values.push(v_sym);
                refs.push(c_sym);
                draws.push(z_sym);
            }
            let got = proba_ratio(&values, &refs, &draws, &c).unwrap();
            let mut brute = 1.0;
            for i in 0..d {
                brute *= rr_pmf(values[i], draws[i], &c).unwrap()
                    / rr_pmf(refs[i], draws[i], &c).unwrap();
            }
            prop_assert!((got - brute).abs() <= brute * 1e-12);
            let bound = (eps * d as f64).exp();
            prop_assert!(got <= bound * (1.0 + 1e-9) && got >= (1.0 - 1e-9) / bound);
        }
    }

    fn uniform_at_helper(key: GeneratorKey, i: u64) -> u64 {
        crate::prng::uniform_at(key, i)
    }
}
