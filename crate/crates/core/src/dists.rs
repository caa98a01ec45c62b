//! Energy distributions on the nonnegative integer ladder, the generalized
//! Poisson and translated-Poisson families, i.i.d. powers, and the reduction
//! of finite-period spectra onto integer levels.

use crate::scalar::Rat;
use crate::seq::IntSeq;
use num_bigint::BigInt;
use thiserror::Error;

pub const NEG_TOL: f64 = 1e-10;
pub const MASS_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DistError {
    #[error("entries must be ≥ -{NEG_TOL}; found {0}")]
    NegativeMass(f64),
    #[error("total mass {0} deviates from 1 beyond {MASS_TOL}")]
    MassDeviation(f64),
    #[error("support must start at a nonnegative level; found {0}")]
    NegativeSupport(i64),
    #[error("state norm² {0} deviates from 1 beyond {MASS_TOL}")]
    NotNormalized(f64),
    #[error("λ must be ≥ 0 for a profile state; got {0}")]
    NegativeLambda(f64),
    #[error("energy gap {0} is not an integer multiple of 2π/τ = {1}")]
    IncommensurateGap(f64, f64),
    #[error("Barbour precondition mb > 1/2 fails: m={0}, b={1}")]
    BarbourPrecondition(usize, f64),
    #[error("distribution needs positive variance")]
    ZeroVariance,
    #[error("bad JSON: {0}")]
    BadJson(String),
}

/// Probability mass per integer energy level (levels ≥ 0).
///
/// Construction clamps tiny negative noise to zero and records the
/// truncation tail mass the producer knows it discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyDistribution {
    seq: IntSeq<f64>,
    tail_mass: f64,
}

impl EnergyDistribution {
    pub fn new(seq: IntSeq<f64>) -> Result<Self, DistError> {
        Self::with_tail(seq, 0.0)
    }

    pub fn with_tail(seq: IntSeq<f64>, tail_mass: f64) -> Result<Self, DistError> {
        if seq.min_index() < 0 {
            return Err(DistError::NegativeSupport(seq.min_index()));
        }
        let mut min = 0.0f64;
        for (_, &v) in seq.iter() {
            min = min.min(v);
        }
        if min < -NEG_TOL {
            return Err(DistError::NegativeMass(min));
        }
        let clamped = IntSeq::new(
            seq.min_index(),
            seq.values().iter().map(|&v| v.max(0.0)).collect(),
        );
        let mass = clamped.sum() + tail_mass;
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(DistError::MassDeviation(mass));
        }
        Ok(EnergyDistribution {
            seq: clamped,
            tail_mass,
        })
    }

    pub fn seq(&self) -> &IntSeq<f64> {
        &self.seq
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn mean(&self) -> f64 {
        self.seq.mean()
    }

    pub fn variance(&self) -> f64 {
        self.seq.variance()
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.seq.to_json()
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, DistError> {
        let seq =
            IntSeq::<f64>::from_json(v).map_err(|e| DistError::BadJson(e.to_string()))?;
        Self::new(seq)
    }
}

/// Pure state on the integer ladder, stored as (modulus, phase) pairs over
/// levels `[0, n_trunc)`.  The energy distribution is the squared moduli.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<(f64, f64)>,
}

impl PureState {
    pub fn new(amps: Vec<(f64, f64)>) -> Result<Self, DistError> {
        let norm2: f64 = amps.iter().map(|(m, _)| m * m).sum();
        if (norm2 - 1.0).abs() > MASS_TOL {
            return Err(DistError::NotNormalized(norm2));
        }
        Ok(PureState { amps })
    }

    /// Nonnegative-amplitude state with p(n) as squared moduli.
    pub fn from_distribution(p: &EnergyDistribution) -> Self {
        let n = p.seq().max_index() as usize + 1;
        let mut amps = vec![(0.0, 0.0); n];
        for (i, &v) in p.seq().iter() {
            amps[i as usize] = (v.max(0.0).sqrt(), 0.0);
        }
        PureState { amps }
    }

    pub fn n_trunc(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[(f64, f64)] {
        &self.amps
    }

    pub fn energy_distribution(&self) -> EnergyDistribution {
        let seq = IntSeq::new(0, self.amps.iter().map(|(m, _)| m * m).collect());
        EnergyDistribution::with_tail(seq, 0.0).expect("normalized state")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n_trunc": self.amps.len(),
            "amps": self.amps.iter().map(|(m, p)| vec![*m, *p]).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, DistError> {
        let arr = v
            .get("amps")
            .and_then(|a| a.as_array())
            .ok_or_else(|| DistError::BadJson("missing array \"amps\"".into()))?;
        let mut amps = Vec::with_capacity(arr.len());
        for e in arr {
            let pair = e
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| DistError::BadJson(format!("bad amplitude {e}")))?;
            let m = pair[0].as_f64().ok_or_else(|| DistError::BadJson("bad modulus".into()))?;
            let ph = pair[1].as_f64().ok_or_else(|| DistError::BadJson("bad phase".into()))?;
            amps.push((m, ph));
        }
        Self::new(amps)
    }
}

/// Spectrum with arbitrary real levels and a recurrence period τ.
#[derive(Debug, Clone)]
pub struct GeneralSpectrum {
    pub levels: Vec<(f64, f64)>,
    pub period: f64,
}

impl GeneralSpectrum {
    pub fn from_json(v: &serde_json::Value) -> Result<Self, DistError> {
        let period = v
            .get("period")
            .and_then(|p| p.as_f64())
            .ok_or_else(|| DistError::BadJson("missing \"period\"".into()))?;
        let arr = v
            .get("levels")
            .and_then(|a| a.as_array())
            .ok_or_else(|| DistError::BadJson("missing array \"levels\"".into()))?;
        let mut levels = Vec::with_capacity(arr.len());
        for e in arr {
            let pair = e
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| DistError::BadJson(format!("bad level {e}")))?;
            levels.push((
                pair[0].as_f64().ok_or_else(|| DistError::BadJson("bad energy".into()))?,
                pair[1].as_f64().ok_or_else(|| DistError::BadJson("bad weight".into()))?,
            ));
        }
        Ok(GeneralSpectrum { levels, period })
    }
}

/// Uniform bounds on the per-factor statistics entering the
/// translated-Poisson approximation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarbourParams {
    /// Variance lower bound: σᵢ² ≥ a > 0.
    pub a: f64,
    /// Smoothness lower bound: vᵢ = min{½, 1 − d_TV(L(Z), L(Z+1))} ≥ b > 0.
    pub b: f64,
    /// Third-moment upper bound: σᵢ⁻²ψᵢ ≤ c.
    pub c: f64,
}

/// Default truncation for a Poisson pmf: tail mass below 1e-12.
pub fn poisson_default_trunc(lambda: f64) -> usize {
    (lambda.abs() + 12.0 * lambda.abs().sqrt() + 30.0).ceil() as usize
}

/// Generalized Poisson pmf e^{−λ} λⁿ/n! on `0 ≤ n < n_trunc`.
/// Negative λ yields a sign-alternating (non-probability) sequence.
pub fn poisson(lambda: f64, n_trunc: usize) -> IntSeq<f64> {
    let mut vals = Vec::with_capacity(n_trunc);
    let mut term = (-lambda).exp();
    for n in 0..n_trunc {
        vals.push(term);
        term *= lambda / (n as f64 + 1.0);
    }
    IntSeq::new(0, vals)
}

/// Poisson as an `EnergyDistribution` with tracked truncation tail.
pub fn poisson_dist(lambda: f64, n_trunc: usize) -> Result<EnergyDistribution, DistError> {
    let seq = poisson(lambda, n_trunc);
    let tail = (1.0 - seq.sum()).max(0.0);
    EnergyDistribution::with_tail(seq, tail)
}

/// Exact rational core λⁿ/n! of the Poisson pmf (the e^{−λ} normalizer is
/// dropped; sign structure and support are preserved, which is all that
/// reciprocal/ordering checks need).
pub fn poisson_core_rational(lambda: &Rat, n_trunc: usize) -> IntSeq<Rat> {
    let mut vals = Vec::with_capacity(n_trunc);
    let mut term = Rat::from_integer(BigInt::from(1));
    for n in 0..n_trunc {
        vals.push(term.clone());
        term *= lambda / Rat::from_integer(BigInt::from(n as i64 + 1));
    }
    IntSeq::new(0, vals)
}

/// Log-scale Poisson core: entries λⁿ/n · e^{-C} with C chosen so the peak
/// entry is 1.  Usable for λ far beyond f64's exp range; only the (positive)
/// overall scale differs from the true pmf.
pub fn poisson_core_scaled(lambda: f64, n_trunc: usize) -> IntSeq<f64> {
    assert!(lambda >= 0.0);
    if lambda == 0.0 {
        return IntSeq::delta(0);
    }
    let ln_l = lambda.ln();
    let mut log_terms = Vec::with_capacity(n_trunc);
    let mut lt = 0.0f64;
    let mut peak = f64::NEG_INFINITY;
    for n in 0..n_trunc {
        log_terms.push(lt);
        peak = peak.max(lt);
        lt += ln_l - ((n + 1) as f64).ln();
    }
    IntSeq::new(0, log_terms.iter().map(|t| (t - peak).exp()).collect())
}

/// Translated Poisson TP_{μ,σ²}: mass P_{σ²+γ}(n−s) with s = ⌊μ−σ²⌋,
/// γ = μ−σ²−s.  Mean μ and variance σ²+γ.
pub fn translated_poisson(
    mu: f64,
    sigma2: f64,
    n_trunc: usize,
) -> Result<EnergyDistribution, DistError> {
    assert!(sigma2 >= 0.0);
    let s = (mu - sigma2).floor() as i64;
    let gamma = mu - sigma2 - s as f64;
    let seq = poisson(sigma2 + gamma, n_trunc).shift(s);
    let tail = (1.0 - seq.sum()).max(0.0);
    EnergyDistribution::with_tail(seq, tail)
}

/// m-fold convolution power of p.
pub fn iid_power(p: &EnergyDistribution, m: usize) -> EnergyDistribution {
    assert!(m >= 1);
    // Binary powering keeps the work near the output size.
    let mut acc: Option<IntSeq<f64>> = None;
    let mut base = p.seq().clone();
    let mut k = m;
    while k > 0 {
        if k & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => a.convolve(&base),
            });
        }
        k >>= 1;
        if k > 0 {
            base = base.convolve(&base);
        }
    }
    let seq = acc.unwrap();
    let tail = (1.0 - seq.sum()).max(0.0).min(p.tail_mass() * m as f64 + MASS_TOL);
    EnergyDistribution::with_tail(seq, tail).expect("convolution of distributions")
}

/// χ_λ: the pure state with Poisson energy profile and zero phases.
pub fn poisson_profile_state(lambda: f64, n_trunc: usize) -> Result<PureState, DistError> {
    if lambda < 0.0 {
        return Err(DistError::NegativeLambda(lambda));
    }
    let p = poisson_dist(lambda, n_trunc)?;
    // Absorb the truncation tail into the norm so the state is exactly unit.
    let seq = p.seq().normalized();
    PureState::new(
        (0..=seq.max_index())
            .map(|n| (seq.get(n).max(0.0).sqrt(), 0.0))
            .collect(),
    )
}

/// Rescales a finite-period spectrum onto integer levels: the lowest
/// occupied level moves to 0 and gaps are divided by 2π/τ.  Degenerate
/// levels merge by summing weights.  Incommensurate gaps are an error.
pub fn reduce_spectrum(g: &GeneralSpectrum) -> Result<EnergyDistribution, DistError> {
    let unit = 2.0 * std::f64::consts::PI / g.period;
    let occupied: Vec<_> = g.levels.iter().filter(|(_, w)| *w > 0.0).collect();
    let e0 = occupied
        .iter()
        .map(|(e, _)| *e)
        .fold(f64::INFINITY, f64::min);
    let mut acc: std::collections::BTreeMap<i64, f64> = std::collections::BTreeMap::new();
    for (e, w) in &occupied {
        let x = (e - e0) / unit;
        let n = x.round();
        if (x - n).abs() > MASS_TOL {
            return Err(DistError::IncommensurateGap(e - e0, unit));
        }
        *acc.entry(n as i64).or_insert(0.0) += w;
    }
    let lo = *acc.keys().next().unwrap_or(&0);
    let hi = *acc.keys().next_back().unwrap_or(&0);
    let vals = (lo..=hi).map(|n| *acc.get(&n).unwrap_or(&0.0)).collect();
    EnergyDistribution::new(IntSeq::new(lo, vals))
}

/// Upper bound c/√(mb − ½) + 2/(ma) on d_TV to the translated Poisson.
pub fn barbour_bound(params: &BarbourParams, m: usize) -> Result<f64, DistError> {
    let mb = m as f64 * params.b;
    if mb <= 0.5 {
        return Err(DistError::BarbourPrecondition(m, params.b));
    }
    Ok(params.c / (mb - 0.5).sqrt() + 2.0 / (m as f64 * params.a))
}

/// Derives (a, b, c) for an i.i.d. family with per-factor pmf p:
/// a = Var(Z), b = min{½, 1 − d_TV(L(Z), L(Z+1))},
/// c = σ⁻²·[σ²·E(Z(Z−1)) + |μ−σ²|·E((Z−1)(Z−2)) + E|Z(Z−1)(Z−2)|].
pub fn barbour_params_iid(p: &EnergyDistribution) -> Result<BarbourParams, DistError> {
    let seq = p.seq();
    let var = seq.variance();
    if var <= 0.0 {
        return Err(DistError::ZeroVariance);
    }
    let mu = seq.mean();
    let v = (1.0 - seq.tv_distance(&seq.shift(1))).min(0.5);
    let mut e_zz1 = 0.0; // E[Z(Z−1)]
    let mut e_z1z2 = 0.0; // E[(Z−1)(Z−2)]
    let mut e_abs3 = 0.0; // E|Z(Z−1)(Z−2)|
    for (n, &w) in seq.iter() {
        let z = n as f64;
        e_zz1 += z * (z - 1.0) * w;
        e_z1z2 += (z - 1.0) * (z - 2.0) * w;
        e_abs3 += (z * (z - 1.0) * (z - 2.0)).abs() * w;
    }
    let psi = var * e_zz1 + (mu - var).abs() * e_z1z2 + e_abs3;
    Ok(BarbourParams {
        a: var,
        b: v,
        c: psi / var,
    })
}

/// min{x, √(2/e)·(√(σ²+x) − σ)} with x = |σ² − σ′²|; dominates
/// d_TV(P_{σ²}, P_{σ′²}).
pub fn poisson_comparison_bound(sigma2: f64, sigma2p: f64) -> f64 {
    assert!(sigma2 >= 0.0 && sigma2p >= 0.0);
    let x = (sigma2 - sigma2p).abs();
    let sigma = sigma2.sqrt();
    x.min((2.0 / std::f64::consts::E).sqrt() * ((sigma2 + x).sqrt() - sigma))
}

/// The coherence-bit profile (½, ½) on levels {0, 1}.
pub fn coin() -> EnergyDistribution {
    EnergyDistribution::new(IntSeq::new(0, vec![0.5, 0.5])).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_bigint::BigInt;

    fn rat(p: i64, q: i64) -> Rat {
        Rat::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn poisson_at_zero_is_delta() {
        assert_eq!(poisson(0.0, 5), IntSeq::delta(0));
    }

    #[test]
    fn poisson_leading_entries_at_one() {
        let p = poisson(1.0, 3);
        let e = (-1.0f64).exp();
        assert_abs_diff_eq!(p.get(0), e, epsilon = 1e-15);
        assert_abs_diff_eq!(p.get(1), e, epsilon = 1e-15);
        assert_abs_diff_eq!(p.get(2), e / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn poisson_reciprocal_matches_negated_parameter() {
        // recip(P_λ) = P_{−λ}; exact for the rational core, float to roundoff.
        for lam in [0.5, 1.0, 2.0] {
            let p = poisson(lam, 40);
            let r = p.reciprocal(20).unwrap();
            let n = poisson(-lam, 20);
            for k in 0..20 {
                assert_abs_diff_eq!(r.get(k), n.get(k), epsilon = 1e-9 * n.get(k).abs().max(1.0));
            }
        }
        let lam = rat(1, 2);
        let core = poisson_core_rational(&lam, 30);
        let recip = core.reciprocal(30).unwrap();
        let neg = poisson_core_rational(&(-lam), 30);
        assert_eq!(recip, neg);
    }

    #[test]
    fn poisson_convolution_adds_parameters() {
        let p1 = poisson(1.0, 60);
        let p2 = poisson(2.0, 60);
        let p3 = poisson(3.0, 60);
        let conv = p1.convolve(&p2);
        for n in 0..60 {
            assert_abs_diff_eq!(conv.get(n), p3.get(n), epsilon = 1e-12);
        }
    }

    #[test]
    fn poisson_core_scaled_matches_pmf_shape() {
        let lam = 7.0;
        let exact = poisson(lam, 40);
        let scaled = poisson_core_scaled(lam, 40);
        let ratio = exact.get(7) / scaled.get(7);
        for n in 0..40 {
            assert_abs_diff_eq!(exact.get(n), scaled.get(n) * ratio, epsilon = 1e-12);
        }
    }

    #[test]
    fn translated_poisson_shift_and_moments() {
        // μ = 5, σ² = 2 → shift 3, parameter 2.
        let tp = translated_poisson(5.0, 2.0, 80).unwrap();
        let p2 = poisson(2.0, 77);
        for n in 0..77 {
            assert_abs_diff_eq!(tp.seq().get(n + 3), p2.get(n), epsilon = 1e-14);
        }
        assert_abs_diff_eq!(tp.mean(), 5.0, epsilon = 1e-9);
        assert_abs_diff_eq!(tp.variance(), 2.0, epsilon = 1e-9);
        // Integer-compatible case reduces to a plain Poisson.
        let tp = translated_poisson(3.0, 3.0, 80).unwrap();
        let p3 = poisson(3.0, 80);
        for n in 0..80 {
            assert_abs_diff_eq!(tp.seq().get(n), p3.get(n), epsilon = 1e-14);
        }
        // Fractional γ contributes to the variance.
        let tp = translated_poisson(5.5, 2.0, 80).unwrap();
        assert_abs_diff_eq!(tp.mean(), 5.5, epsilon = 1e-9);
        assert_abs_diff_eq!(tp.variance(), 2.5, epsilon = 1e-9);
    }

    #[test]
    fn iid_power_of_coin_is_binomial() {
        let p = coin();
        assert_eq!(iid_power(&p, 1).seq(), p.seq());
        let sq = iid_power(&p, 2);
        assert_eq!(sq.seq(), &IntSeq::new(0, vec![0.25, 0.5, 0.25]));
        let m = 10;
        let pow = iid_power(&p, m);
        assert_abs_diff_eq!(pow.mean(), m as f64 * 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(pow.variance(), m as f64 * 0.25, epsilon = 1e-9);
    }

    #[test]
    fn iid_power_of_poisson_adds() {
        let p = poisson_dist(0.5, 60).unwrap();
        let pow = iid_power(&p, 4);
        let p2 = poisson(2.0, 60);
        for n in 0..60 {
            assert_abs_diff_eq!(pow.seq().get(n), p2.get(n), epsilon = 1e-10);
        }
    }

    #[test]
    fn profile_state_energy_distribution() {
        let chi = poisson_profile_state(1.0, poisson_default_trunc(1.0)).unwrap();
        let p = chi.energy_distribution();
        let p1 = poisson(1.0, 50);
        for n in 0..40 {
            assert_abs_diff_eq!(p.seq().get(n), p1.get(n), epsilon = 1e-10);
        }
        let ground = poisson_profile_state(0.0, 5).unwrap();
        assert_eq!(ground.energy_distribution().seq(), &IntSeq::delta(0));
        assert!(poisson_profile_state(-1.0, 5).is_err());
    }

    #[test]
    fn reduce_spectrum_examples() {
        let tau = 4.0 * std::f64::consts::PI;
        // Gap 0.5 = 2π/τ; lowest level shifts to 0.
        let g = GeneralSpectrum {
            levels: vec![(1.0, 0.5), (1.5, 0.5)],
            period: tau,
        };
        let d = reduce_spectrum(&g).unwrap();
        assert_eq!(d.seq(), &IntSeq::new(0, vec![0.5, 0.5]));
        // Degenerate levels merge.
        let g = GeneralSpectrum {
            levels: vec![(1.0, 0.25), (1.0, 0.25), (1.5, 0.5)],
            period: tau,
        };
        assert_eq!(reduce_spectrum(&g).unwrap().seq(), &IntSeq::new(0, vec![0.5, 0.5]));
        // Incommensurate gap is rejected.
        let g = GeneralSpectrum {
            levels: vec![(0.0, 0.5), (0.7, 0.5)],
            period: tau,
        };
        assert!(reduce_spectrum(&g).is_err());
    }

    #[test]
    fn reduce_spectrum_shift_and_rescale_invariance() {
        let tau = 2.0 * std::f64::consts::PI; // unit gap
        let g = GeneralSpectrum {
            levels: vec![(2.0, 0.2), (3.0, 0.5), (5.0, 0.3)],
            period: tau,
        };
        let base = reduce_spectrum(&g).unwrap();
        let shifted = GeneralSpectrum {
            levels: g.levels.iter().map(|(e, w)| (e + 17.0, *w)).collect(),
            period: tau,
        };
        assert_eq!(reduce_spectrum(&shifted).unwrap().seq(), base.seq());
        let rescaled = GeneralSpectrum {
            levels: g.levels.iter().map(|(e, w)| (e * 3.0, *w)).collect(),
            period: tau / 3.0,
        };
        assert_eq!(reduce_spectrum(&rescaled).unwrap().seq(), base.seq());
    }

    #[test]
    fn barbour_coin_parameters_and_bound() {
        let params = barbour_params_iid(&coin()).unwrap();
        assert_abs_diff_eq!(params.a, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(params.b, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(params.c, 1.0, epsilon = 1e-15);
        let bound = barbour_bound(&params, 100).unwrap();
        // 1/√49.5 + 2/25
        assert_abs_diff_eq!(bound, 1.0 / 49.5f64.sqrt() + 0.08, epsilon = 1e-12);
        assert!((bound - 0.2221).abs() < 5e-4);
        assert!(barbour_bound(&params, 1).is_err());
        // Bound vanishes as m grows.
        assert!(barbour_bound(&params, 1_000_000).unwrap() < 1e-2);
    }

    #[test]
    fn coin_power_approaches_translated_poisson() {
        let params = barbour_params_iid(&coin()).unwrap();
        let mut last = f64::INFINITY;
        for m in [4usize, 16, 64, 256] {
            let pw = iid_power(&coin(), m);
            let tp = translated_poisson(m as f64 / 2.0, m as f64 / 4.0, 2 * m + 200).unwrap();
            let d = pw.seq().tv_distance(tp.seq());
            let bound = barbour_bound(&params, m).unwrap();
            assert!(d <= bound, "m={m}: d_TV {d} > bound {bound}");
            assert!(d <= last, "d_TV not nonincreasing at m={m}");
            last = d;
        }
    }

    #[test]
    fn poisson_comparison_bound_dominates_tv() {
        assert_eq!(poisson_comparison_bound(3.0, 3.0), 0.0);
        let b = poisson_comparison_bound(4.0, 4.5);
        assert_abs_diff_eq!(
            b,
            (2.0f64 / std::f64::consts::E).sqrt() * (4.5f64.sqrt() - 2.0),
            epsilon = 1e-12
        );
        for (s2, s2p) in [(1.0, 1.5), (2.0, 4.0), (0.25, 0.3), (5.0, 5.5)] {
            let d = poisson(s2, 100).tv_distance(&poisson(s2p, 100));
            assert!(d <= poisson_comparison_bound(s2, s2p) + 1e-12);
        }
    }

    #[test]
    fn default_truncation_tail_is_tiny() {
        for lam in [0.5, 1.0, 3.0, 10.0, 50.0] {
            let p = poisson(lam, poisson_default_trunc(lam));
            assert!(1.0 - p.sum() < 1e-12, "λ={lam}");
        }
    }

    #[test]
    fn state_json_roundtrip() {
        let chi = poisson_profile_state(1.0, 20).unwrap();
        let round = PureState::from_json(&chi.to_json()).unwrap();
        assert_eq!(round, chi);
    }
}
