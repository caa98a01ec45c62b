//! The shift-mixture preorder on energy distributions.
//!
//! `p ≻ₐ q` holds iff `p * recip(q) ≥ 0`, equivalently iff `p` is a mixture
//! of shifted copies of `q`: `p = Σₖ w(k)·Υₖq` for a probability
//! distribution `w`.  The witness `w = p * recip(q)` is unique.

use crate::dists::{EnergyDistribution, MASS_TOL, NEG_TOL};
use crate::scalar::Scalar;
use crate::seq::IntSeq;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AMajorError {
    #[error("distributions must be nonempty")]
    Empty,
    #[error("window {0} does not cover the witness support span {1}")]
    WindowTooSmall(usize, usize),
    #[error("brute-force decider requires support ≤ {0}; got {1}")]
    SupportTooLarge(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AMajorVerdict<T: Scalar> {
    pub holds: bool,
    /// The weight distribution w with p = Σₖ w(k)·Υₖq, when holds.
    pub witness: Option<IntSeq<T>>,
    /// Most negative entry of p * recip(q) encountered (0 when none).
    pub min_violation: f64,
    /// Index range of p * recip(q) that was checked.
    pub window: (i64, i64),
    /// Float backend only: the verdict sits within neg_tol of the boundary.
    pub marginal: bool,
}

fn entry_negative<T: Scalar>(v: &T, neg_tol: f64) -> bool {
    if T::EXACT {
        *v < T::zero()
    } else {
        v.to_f64() < -neg_tol
    }
}

/// Decides p ≻ₐ q by computing w = p * recip(q) over a window extending
/// `extend` indices past the provable witness support `[n⋆(p) − n⋆(q),
/// max supp(p) − n⋆(q)]`.  Entries past that support must vanish for finite
/// supports, so the extension is a consistency check, not a search.
pub fn a_majorizes_seq<T: Scalar>(
    p: &IntSeq<T>,
    q: &IntSeq<T>,
    extend: usize,
    neg_tol: f64,
) -> Result<AMajorVerdict<T>, AMajorError> {
    if p.is_empty() || q.is_empty() {
        return Err(AMajorError::Empty);
    }
    let span = (p.max_index() - p.min_index()) as usize;
    // recip(q) entry j is valid for j ≤ horizon − 1; w(n) needs recip
    // entries up to n − n⋆(p).
    let horizon = span + extend + 1;
    let q_recip = q.reciprocal(horizon).expect("nonempty q");
    let w_lo = p.min_index() - q.min_index();
    let w_hi = p.max_index() - q.min_index() + extend as i64;
    let w_full = p.convolve(&q_recip);
    // Reciprocal entries grow geometrically, so float cancellation noise in
    // w(n) scales with the magnitude of the summed terms; tolerate each
    // entry relative to |p| * |recip(q)| at that index (≥ 1 keeps the
    // absolute floor for well-conditioned inputs).
    let w_mag = if T::EXACT {
        IntSeq::zero()
    } else {
        p.abs().convolve(&q_recip.abs())
    };

    let mut min_violation = 0.0f64;
    let mut holds = true;
    let mut marginal = false;
    for n in w_lo..=w_hi {
        let v = w_full.get(n);
        min_violation = min_violation.min(v.to_f64());
        let tol_n = if T::EXACT {
            neg_tol
        } else {
            neg_tol * w_mag.get(n).to_f64().max(1.0)
        };
        if entry_negative(&v, tol_n) {
            holds = false;
        } else if !T::EXACT && v.to_f64() < -1e-4 * tol_n {
            // Negative but inside the tolerance band, and too large to be
            // accumulation dust: the verdict could flip under a tolerance
            // change, so flag it for the exact backend.
            marginal = true;
        }
    }
    let witness = holds.then(|| {
        let vals: Vec<T> = (w_lo..=w_hi)
            .map(|n| {
                let v = w_full.get(n);
                if !T::EXACT {
                    // Entries at the level of float cancellation noise
                    // (forward error ≲ len·ε·|p|*|recip q|, well under
                    // 1e−13·mag) are exact zeros of the underlying relation;
                    // keep them out of the witness.
                    let noise = 1e-13 * w_mag.get(n).to_f64().max(1.0);
                    if v.to_f64().abs() <= noise {
                        return T::zero();
                    }
                }
                v
            })
            .collect();
        let w = IntSeq::new(w_lo, vals);
        // Unit-mass inputs pin the witness mass; scaled inputs (e.g. the
        // rational Poisson cores) carry the scale ratio instead.
        debug_assert!(
            (p.sum().to_f64() - 1.0).abs() > MASS_TOL
                || (q.sum().to_f64() - 1.0).abs() > MASS_TOL
                || (w.sum().to_f64() - 1.0).abs()
                    <= MASS_TOL + neg_tol * (extend + span + 1) as f64
        );
        w
    });
    Ok(AMajorVerdict {
        holds,
        witness,
        min_violation,
        window: (w_lo, w_hi),
        marginal,
    })
}

/// Float-backend decision on energy distributions with the default window
/// extension of 64 and neg_tol = 1e−10.
pub fn a_majorizes(
    p: &EnergyDistribution,
    q: &EnergyDistribution,
    extend: usize,
) -> Result<AMajorVerdict<f64>, AMajorError> {
    a_majorizes_seq(p.seq(), q.seq(), extend, NEG_TOL)
}

pub const DEFAULT_EXTEND: usize = 64;

/// Independent decision path: solve the triangular system
/// `p(n) = Σₖ w(k) q(n−k)` for w on the only possible support
/// `[n⋆(p) − n⋆(q), max supp(p) − max supp(q)]` by forward substitution,
/// then verify nonnegativity, unit mass, and full reconstruction.
pub fn a_majorizes_bruteforce<T: Scalar>(
    p: &IntSeq<T>,
    q: &IntSeq<T>,
    neg_tol: f64,
) -> Result<bool, AMajorError> {
    const MAX_SUPPORT: usize = 16;
    if p.is_empty() || q.is_empty() {
        return Err(AMajorError::Empty);
    }
    for s in [p.len(), q.len()] {
        if s > MAX_SUPPORT {
            return Err(AMajorError::SupportTooLarge(MAX_SUPPORT, s));
        }
    }
    let k_lo = p.min_index() - q.min_index();
    let k_hi = p.max_index() - q.max_index();
    if k_hi < k_lo {
        // p is narrower than q: no mixture of shifted copies can be thinner
        // than a single copy.
        return Ok(false);
    }
    let q_lead = q.get(q.min_index());
    let mut w = IntSeq::<T>::zero();
    for k in k_lo..=k_hi {
        let partial = w.convolve(q).get(k + q.min_index());
        let wk = (p.get(k + q.min_index()) - partial) / q_lead.clone();
        if entry_negative(&wk, neg_tol) {
            return Ok(false);
        }
        w = w.add(&IntSeq::delta(k).scale(&wk));
    }
    // The triangular pass pins w; everything else is verification.
    let recon = w.convolve(q);
    let lo = p.min_index().min(recon.min_index());
    let hi = p.max_index().max(recon.max_index());
    for n in lo..=hi {
        let diff = (p.get(n) - recon.get(n)).to_f64().abs();
        if T::EXACT {
            if p.get(n) != recon.get(n) {
                return Ok(false);
            }
        } else if diff > neg_tol * 100.0 {
            return Ok(false);
        }
    }
    let mass = w.sum().to_f64();
    Ok((mass - 1.0).abs() <= MASS_TOL + neg_tol)
}

/// If p ≻ₐ q and q ≻ₐ p both hold, the two distributions agree up to a
/// translation; returns that shift k with p = Υₖq.
pub fn mutual_implies_shift<T: Scalar>(
    p: &IntSeq<T>,
    q: &IntSeq<T>,
    neg_tol: f64,
) -> Result<Option<i64>, AMajorError> {
    let fwd = a_majorizes_seq(p, q, DEFAULT_EXTEND, neg_tol)?;
    let bwd = a_majorizes_seq(q, p, DEFAULT_EXTEND, neg_tol)?;
    if !(fwd.holds && bwd.holds) {
        return Ok(None);
    }
    let k = p.min_index() - q.min_index();
    let shifted = q.shift(k);
    if T::EXACT {
        debug_assert_eq!(p, &shifted);
    } else {
        debug_assert!(p.sub(&shifted).abs().sum().to_f64() <= neg_tol * p.len() as f64 * 10.0);
    }
    Ok(Some(k))
}
