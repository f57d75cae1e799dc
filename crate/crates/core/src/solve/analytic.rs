//! Closed-form two-body bound states on the infinite line and diagnostics
//! for their finite-chain counterparts.

use crate::error::{domain, Result};
use crate::fock::{BasisKind, StateVector};
use crate::model::{ChainKind, LinearOperator, SparseOperator};
use crate::C64;

/// Bound state of one of the relative-coordinate chains.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundStateSolution {
    pub kind: ChainKind,
    /// Contraction ratio between neighbouring amplitudes.
    pub r0: f64,
    /// Bound-state energy, or the continuum edge when unbound.
    pub energy: f64,
    pub bound: bool,
    /// Set for the `J = 0` limit, where the state sits on the contact site.
    pub limit_case: bool,
}

impl BoundStateSolution {
    /// Normalized amplitude on chain site `s`; `None` when unbound.
    ///
    /// Two fermions: `√((1−r0²)/(1+r0²)) r0^{|s|}` for `s ∈ ℤ`.
    /// Two pairs: `√(1−r0²) r0^{s−1}` for `s ≥ 1`.
    pub fn amplitude(&self, s: i64) -> Option<f64> {
        if !self.bound {
            return None;
        }
        let r2 = self.r0 * self.r0;
        Some(match self.kind {
            ChainKind::TwoFermion => {
                ((1.0 - r2) / (1.0 + r2)).sqrt() * self.r0.powi(s.unsigned_abs() as i32)
            }
            ChainKind::TwoPair if s >= 1 => (1.0 - r2).sqrt() * self.r0.powi((s - 1) as i32),
            ChainKind::TwoPair => 0.0,
        })
    }
}

/// One A and one B fermion: `ε = −√(U² + 16J²)`,
/// `r0 = (√(U² + 16J²) − U)/(4J)`.
pub fn analytic_two_fermion(hopping: f64, onsite: f64) -> Result<BoundStateSolution> {
    if !(hopping.is_finite() && onsite.is_finite()) || hopping < 0.0 || onsite < 0.0 {
        return domain(format!(
            "need finite J ≥ 0 and U ≥ 0, got J={hopping}, U={onsite}"
        ));
    }
    if hopping == 0.0 {
        return Ok(BoundStateSolution {
            kind: ChainKind::TwoFermion,
            r0: 0.0,
            energy: -onsite,
            bound: onsite > 0.0,
            limit_case: true,
        });
    }
    let root = onsite.hypot(4.0 * hopping);
    let r0 = (root - onsite) / (4.0 * hopping);
    Ok(BoundStateSolution {
        kind: ChainKind::TwoFermion,
        r0,
        energy: -root,
        bound: r0 < 1.0,
        limit_case: false,
    })
}

/// Two hard-core pairs: bound iff `γ > 2J̄`, with `r0 = J̄/(γ − J̄)` and
/// `ε̄ = (4γJ̄ − 4J̄² − 2γ²)/(γ − J̄)`. Unbound solutions report `r0 = 1`
/// and the continuum edge `−4J̄`.
pub fn analytic_two_pair(jbar: f64, gamma: f64) -> Result<BoundStateSolution> {
    if !(jbar.is_finite() && gamma.is_finite()) || jbar <= 0.0 || gamma < 0.0 {
        return domain(format!(
            "need finite J̄ > 0 and γ ≥ 0, got J̄={jbar}, γ={gamma}"
        ));
    }
    if gamma <= 2.0 * jbar {
        return Ok(BoundStateSolution {
            kind: ChainKind::TwoPair,
            r0: 1.0,
            energy: -4.0 * jbar,
            bound: false,
            limit_case: false,
        });
    }
    let g = gamma - jbar;
    Ok(BoundStateSolution {
        kind: ChainKind::TwoPair,
        r0: jbar / g,
        energy: (4.0 * gamma * jbar - 4.0 * jbar * jbar - 2.0 * gamma * gamma) / g,
        bound: true,
        limit_case: false,
    })
}

/// Weight-based bound-state diagnosis of a finite chain eigenvector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailReport {
    /// Fraction of the norm on the outermost quarter of the chain.
    pub tail_weight: f64,
    /// Geometric ratio fitted over the first sites beyond the contact.
    pub fitted_ratio: f64,
    pub bound: bool,
}

/// A state counts as bound when less than this fraction of its weight lives
/// on the outer quarter of the chain.
pub const TAIL_THRESHOLD: f64 = 1e-6;

/// Tail weight and decay fit for a state on a relative chain.
pub fn tail_report(psi: &StateVector, kind: ChainKind) -> Result<TailReport> {
    if !matches!(psi.basis().kind(), BasisKind::Chain { .. }) {
        return domain("tail report needs a chain state");
    }
    let amps = psi.amplitudes();
    let n = amps.len();
    let quarter = n / 4;
    let total = psi.norm_sqr();
    if total == 0.0 {
        return domain("zero state");
    }
    let w = |r: std::ops::Range<usize>| amps[r].iter().map(|a| a.norm_sqr()).sum::<f64>();
    let tail = match kind {
        ChainKind::TwoFermion => w(0..quarter) + w(n - quarter..n),
        ChainKind::TwoPair => w(n - quarter..n),
    } / total;

    let contact = match kind {
        ChainKind::TwoFermion => n / 2,
        ChainKind::TwoPair => 0,
    };
    let peak = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let start = (contact + 1).min(n - 1);
    let mut end = start;
    while end + 1 < n && end - start < 20 && amps[end + 1].norm() > 1e-8 * peak {
        end += 1;
    }
    let fitted_ratio = if end > start && amps[start].norm() > 0.0 {
        (amps[end].norm() / amps[start].norm()).powf(1.0 / (end - start) as f64)
    } else {
        0.0
    };
    Ok(TailReport {
        tail_weight: tail,
        fitted_ratio,
        bound: tail < TAIL_THRESHOLD,
    })
}

/// Ratios `v_{k+1}/v_k` of the eigenvector of a tridiagonal chain at
/// eigenvalue `energy`, from the backward recurrence that starts at the open
/// right end. Accurate on the stretch to the right of any potential well,
/// where forward iteration would amplify round-off.
pub fn chain_decay_ratios(h: &SparseOperator, energy: f64) -> Result<Vec<C64>> {
    let n = h.dim();
    if !matches!(h.basis().kind(), BasisKind::Chain { .. }) || n < 2 {
        return domain("decay ratios need a chain with at least two sites");
    }
    if h.entries().any(|(r, c, _)| r.abs_diff(c) > 1) {
        return domain("decay ratios need a tridiagonal operator");
    }
    let e = C64::new(energy, 0.0);
    let mut ratios = vec![C64::new(0.0, 0.0); n - 1];
    // rho = v_i / v_{i-1}, with v_n = 0 past the open end.
    let mut next = C64::new(0.0, 0.0);
    for i in (1..n).rev() {
        let upper = if i + 1 < n {
            h.get(i, i + 1)
        } else {
            C64::new(0.0, 0.0)
        };
        let rho = h.get(i, i - 1) / (e - h.get(i, i) - upper * next);
        ratios[i - 1] = rho;
        next = rho;
    }
    Ok(ratios)
}
