//! Entanglement-theory side of the correspondence: classical
//! majorization of Schmidt spectra, Nielsen's LOCC criterion, max/min/von
//! Neumann entropies and their smoothed versions, and the finite-m
//! entropy plateaus that mirror the spectral QFI rates.

use crate::qfi::DensityMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("probabilities must be nonnegative (got {0})")]
    Negative(f64),
    #[error("probabilities sum to {0}, not 1")]
    BadMass(f64),
    #[error("eps = {0} outside [0, 1)")]
    BadEps(f64),
}

const MASS_TOL: f64 = 1e-9;

/// Squared Schmidt coefficients, kept sorted nonincreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtVector {
    probs: Vec<f64>,
}

impl SchmidtVector {
    pub fn new(mut probs: Vec<f64>) -> Result<Self, BridgeError> {
        if let Some(&bad) = probs.iter().find(|&&x| x < 0.0) {
            return Err(BridgeError::Negative(bad));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(BridgeError::BadMass(total));
        }
        probs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(SchmidtVector { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Prefix-sum dominance Σ_{l≤k} p↓(l) ≥ Σ_{l≤k} q↓(l) for every k, with
/// zero-padding to the common length.
pub fn majorizes(p: &SchmidtVector, q: &SchmidtVector) -> bool {
    let n = p.probs.len().max(q.probs.len());
    let mut sp = 0.0;
    let mut sq = 0.0;
    for k in 0..n {
        sp += p.probs.get(k).copied().unwrap_or(0.0);
        sq += q.probs.get(k).copied().unwrap_or(0.0);
        if sp < sq - 1e-12 {
            return false;
        }
    }
    true
}

/// Independent majorization oracle: q ≺ p iff q lies in the convex hull
/// of the permutations of p (Birkhoff).  Decided by Carathéodory search:
/// some subset of ≤ n+1 permutation vertices must carry q with
/// nonnegative barycentric coordinates.  Exhaustive for dims ≤ 4.
pub fn majorizes_hull_oracle(p: &SchmidtVector, q: &SchmidtVector) -> bool {
    let n = p.probs.len().max(q.probs.len());
    assert!(n <= 4, "hull oracle is exhaustive only for dims <= 4");
    let mut base = p.probs.clone();
    base.resize(n, 0.0);
    let mut target = q.probs.clone();
    target.resize(n, 0.0);

    // Distinct permutation vertices of p.
    let mut verts: Vec<Vec<f64>> = Vec::new();
    permute_unique(&mut base.clone(), 0, &mut verts);
    let m = verts.len();

    // Subsets of size ≤ n+1; solve [V 1][θ] = [q 1] in least squares by
    // exact elimination on the square system of the affine span.
    let mut idx: Vec<usize> = Vec::new();
    subsets_up_to(m, n + 1, &mut idx, &mut |set: &[usize]| {
        in_affine_hull(&verts, set, &target)
    })
}

fn permute_unique(vals: &mut Vec<f64>, k: usize, out: &mut Vec<Vec<f64>>) {
    if k == vals.len() {
        if !out.iter().any(|v| v == vals) {
            out.push(vals.clone());
        }
        return;
    }
    for i in k..vals.len() {
        vals.swap(k, i);
        permute_unique(vals, k + 1, out);
        vals.swap(k, i);
    }
}

fn subsets_up_to(
    m: usize,
    max_size: usize,
    current: &mut Vec<usize>,
    test: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if !current.is_empty() && test(current) {
        return true;
    }
    if current.len() == max_size {
        return false;
    }
    let start = current.last().map_or(0, |&l| l + 1);
    for i in start..m {
        current.push(i);
        if subsets_up_to(m, max_size, current, test) {
            current.pop();
            return true;
        }
        current.pop();
    }
    false
}

/// Solves Σ θ_i v_i = q, Σ θ_i = 1 on the chosen vertex subset and checks
/// θ ≥ 0 within tolerance.
fn in_affine_hull(verts: &[Vec<f64>], set: &[usize], q: &[f64]) -> bool {
    let n = q.len();
    let k = set.len();
    // Rows: n coordinate equations + 1 affine constraint; columns: k.
    let rows = n + 1;
    let mut a = vec![vec![0.0f64; k + 1]; rows];
    for (c, &vi) in set.iter().enumerate() {
        for r in 0..n {
            a[r][c] = verts[vi][r];
        }
        a[n][c] = 1.0;
    }
    for r in 0..n {
        a[r][k] = q[r];
    }
    a[n][k] = 1.0;
    // Gaussian elimination with partial pivoting on the (rows × k) system.
    let mut row = 0;
    let mut pivots = Vec::new();
    for col in 0..k {
        let Some(best) = (row..rows).max_by(|&x, &y| {
            a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap()
        }) else {
            break;
        };
        if a[best][col].abs() < 1e-12 {
            continue;
        }
        a.swap(row, best);
        let piv = a[row][col];
        for c in col..=k {
            a[row][c] /= piv;
        }
        for r in 0..rows {
            if r != row && a[r][col].abs() > 0.0 {
                let f = a[r][col];
                for c in col..=k {
                    a[r][c] -= f * a[row][c];
                }
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == rows {
            break;
        }
    }
    // Residual rows must vanish for consistency.
    for r in row..rows {
        if a[r][k].abs() > 1e-9 {
            return false;
        }
    }
    let mut theta = vec![0.0f64; k];
    for &(r, c) in &pivots {
        theta[c] = a[r][k];
    }
    theta.iter().all(|&t| t >= -1e-9)
}

/// Nielsen's criterion: ψ → φ by LOCC iff λ_φ majorizes λ_ψ.
pub fn nielsen_convertible(lambda_psi: &SchmidtVector, lambda_phi: &SchmidtVector) -> bool {
    majorizes(lambda_phi, lambda_psi)
}

/// (von Neumann, max, min) entropies in bits.
pub fn entropies(rho: &DensityMatrix) -> (f64, f64, f64) {
    let (vals, _) = rho.eigen();
    spectrum_entropies(&vals.iter().map(|&v| (v, 1u64)).collect::<Vec<_>>())
}

/// Entropies of a spectrum given as (eigenvalue, multiplicity) pairs.
pub fn spectrum_entropies(spectrum: &[(f64, u64)]) -> (f64, f64, f64) {
    let mut s = 0.0f64;
    let mut rank = 0u64;
    let mut top = 0.0f64;
    for &(v, mult) in spectrum {
        if v > 1e-12 {
            s -= mult as f64 * v * v.log2();
            rank += mult;
            top = top.max(v);
        }
    }
    (s, (rank as f64).log2(), -top.log2())
}

/// Smooth entropies over commuting (same-eigenbasis) candidates:
/// S_max^ε cuts the largest tail with mass ≤ ε (an upper bound on the
/// true infimum), S_min^ε flattens the peak by redistributing ε of mass
/// (a lower bound on the true supremum).
pub fn smooth_entropies(rho: &DensityMatrix, eps: f64) -> Result<(f64, f64), BridgeError> {
    let (vals, _) = rho.eigen();
    smooth_spectrum_entropies(&vals.iter().map(|&v| (v, 1u64)).collect::<Vec<_>>(), eps)
}

/// Spectrum-space version of `smooth_entropies` for large product states.
pub fn smooth_spectrum_entropies(
    spectrum: &[(f64, u64)],
    eps: f64,
) -> Result<(f64, f64), BridgeError> {
    if !(0.0..1.0).contains(&eps) {
        return Err(BridgeError::BadEps(eps));
    }
    let mut eigs: Vec<(f64, u64)> = spectrum
        .iter()
        .filter(|&&(v, _)| v > 1e-15)
        .cloned()
        .collect();
    eigs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    // S_max^ε: discard eigenvalues from the bottom while the discarded
    // mass stays ≤ ε; the remaining rank is the smallest achievable.
    let mut budget = eps;
    let mut rank: u64 = eigs.iter().map(|&(_, m)| m).sum();
    for &(v, mult) in &eigs {
        let cut = (budget / v).floor().min(mult as f64) as u64;
        budget -= cut as f64 * v;
        rank -= cut;
        if cut < mult {
            break;
        }
    }
    let s_max = (rank.max(1) as f64).log2();

    // S_min^ε: cap the spectrum at level c where the shaved mass equals ε
    // (the shaved mass re-enters below the cap, leaving the max at c).
    eigs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut c = eigs.first().map_or(0.0, |&(v, _)| v);
    let mut count = 0u64;
    for i in 0..eigs.len() {
        let (v, mult) = eigs[i];
        count += mult;
        let next = eigs.get(i + 1).map_or(0.0, |&(w, _)| w);
        // Lowering the cap from v to next shaves (v − next)·count mass on
        // top of what cutting down to v already shaved.
        let already: f64 = eigs[..=i]
            .iter()
            .map(|&(w, m)| (w - v).max(0.0) * m as f64)
            .sum();
        let shave = (v - next) * count as f64;
        if already + shave >= eps {
            c = v - (eps - already) / count as f64;
            break;
        }
        c = next;
    }
    let s_min = if c > 0.0 { -c.log2() } else { f64::INFINITY };
    Ok((s_max, s_min))
}

/// Spectrum of diag(w)^{⊗m} as (eigenvalue, multiplicity) pairs for a
/// two-outcome diagonal state diag(w, 1−w).
pub fn iid_binary_spectrum(w: f64, m: usize) -> Vec<(f64, u64)> {
    let mut out = Vec::with_capacity(m + 1);
    let mut binom = 1.0f64; // C(m, k) tracked in logs to stay exact enough
    for k in 0..=m {
        let val = w.powi(k as i32) * (1.0 - w).powi((m - k) as i32);
        out.push((val, binom.round() as u64));
        binom = binom * (m - k) as f64 / (k + 1) as f64;
    }
    out
}
