//! Normalization ratios `χ_N` of block cobosons on the ring, in exact
//! rational arithmetic.
//!
//! For the block operator `q†_{(M)} = (1/√d) Σ_k η†_k…η†_{k+M−1}`,
//! `χ_N = ⟨0|q^N q†^N|0⟩ / N!`. On a ring of `d` sites the closed form is
//!
//! * `Π_{i=1}^{N−1} (d − NM + i) / d^{N−1}` for `NM < d`,
//! * `M² N! / d^N` for `NM = d` (the blocks tile the ring),
//! * `0` for `NM > d`.
//!
//! For `M = 1` this is `d!/(d^N (d−N)!)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};
use crate::fock::{apply_pair_op, PairConfig, PairOp, MAX_PAIR_SITES};

fn int(n: usize) -> BigInt {
    BigInt::from(n)
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * int(k))
}

/// Closed form of `χ_N` for blocks of `M` pairs on `d` sites.
pub fn chi_closed(d: usize, n: usize, m: usize) -> Result<BigRational> {
    if d == 0 || m == 0 {
        return domain(format!("chi needs d, M ≥ 1, got d={d}, M={m}"));
    }
    if n == 0 {
        return Ok(BigRational::one());
    }
    let filled = n * m;
    Ok(if filled > d {
        BigRational::zero()
    } else if filled == d {
        ratio(int(m * m) * factorial(n), int(d).pow(n as u32))
    } else {
        let num = (1..n).fold(BigInt::one(), |acc, i| acc * int(d - filled + i));
        ratio(num, int(d).pow((n - 1) as u32))
    })
}

/// `χ_N` from an explicit expansion of `q†_{(M)}^N|0⟩` by pair-operator
/// application: `Σ_config count² / (N! d^N)`.
pub fn chi_oracle(d: usize, n: usize, m: usize) -> Result<BigRational> {
    if d == 0 || m == 0 {
        return domain(format!("chi needs d, M ≥ 1, got d={d}, M={m}"));
    }
    if d > MAX_PAIR_SITES {
        return Err(Error::Size(format!(
            "oracle supports up to {MAX_PAIR_SITES} sites, got {d}"
        )));
    }
    if m > d {
        // a block longer than the ring revisits a site: η†² = 0
        return Ok(if n == 0 {
            BigRational::one()
        } else {
            BigRational::zero()
        });
    }
    let mut state: Vec<(PairConfig, u64)> = vec![(PairConfig(0), 1)];
    for _ in 0..n {
        let mut next: std::collections::BTreeMap<PairConfig, u64> = Default::default();
        for &(c, count) in &state {
            'placement: for k in 0..d {
                let mut cur = c;
                for t in 0..m {
                    match apply_pair_op(PairOp::Create((k + t) % d), cur) {
                        Some((c2, _)) => cur = c2,
                        None => continue 'placement,
                    }
                }
                *next.entry(cur).or_default() += count;
            }
        }
        state = next.into_iter().collect();
    }
    let norm_sq = state.iter().fold(BigInt::zero(), |acc, &(_, count)| {
        acc + BigInt::from(count) * BigInt::from(count)
    });
    Ok(ratio(norm_sq, factorial(n) * int(d).pow(n as u32)))
}

/// `(1 − (N+1)(M−1)/d) (1 − M/(d+1−NM))^N`, a lower bound on
/// `χ_{N+1}/χ_N`.
pub fn chi_ratio_lower_bound(d: usize, n: usize, m: usize) -> f64 {
    let (d, n, m) = (d as f64, n as f64, m as f64);
    (1.0 - (n + 1.0) * (m - 1.0) / d) * (1.0 - m / (d + 1.0 - n * m)).powf(n)
}

/// `χ_{N+1}/χ_N` from the closed form; `None` when `χ_N = 0`.
pub fn chi_ratio(d: usize, n: usize, m: usize) -> Result<Option<BigRational>> {
    let lo = chi_closed(d, n, m)?;
    if lo.is_zero() {
        return Ok(None);
    }
    Ok(Some(chi_closed(d, n + 1, m)? / lo))
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Ladder coefficients of `q†_{(M)}`: `q†|N−1⟩ = α_N |N⟩ + |ε_N⟩`.
#[derive(Clone, Debug)]
pub struct LadderReport {
    pub d: usize,
    pub m: usize,
    /// `χ_1 … χ_{N_max+1}`.
    pub chis: Vec<BigRational>,
    /// `α_N² = χ_N/χ_{N−1}` for `N = 1 … N_max`.
    pub alpha_sq: Vec<BigRational>,
    /// `⟨ε_N|ε_N⟩ = 1 − N χ_N/χ_{N−1} + (N−1) χ_{N+1}/χ_N`.
    pub eps_norms: Vec<BigRational>,
}

impl LadderReport {
    pub fn alphas(&self) -> Vec<f64> {
        self.alpha_sq.iter().map(|a| to_f64(a).sqrt()).collect()
    }
}

/// Ladder report for `N = 1 … n_max`; needs `n_max · M ≤ d`.
pub fn ladder_report(d: usize, n_max: usize, m: usize) -> Result<LadderReport> {
    if n_max == 0 || n_max * m > d {
        return domain(format!(
            "ladder needs 1 ≤ N_max and N_max·M ≤ d, got N_max={n_max}, M={m}, d={d}"
        ));
    }
    let chis: Vec<BigRational> = (0..=n_max + 1)
        .map(|n| chi_closed(d, n, m))
        .collect::<Result<_>>()?;
    let mut alpha_sq = Vec::with_capacity(n_max);
    let mut eps_norms = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let a = &chis[n] / &chis[n - 1];
        let next = &chis[n + 1] / &chis[n];
        let eps = BigRational::one() - a.clone() * BigRational::from_integer(int(n))
            + next * BigRational::from_integer(int(n - 1));
        if m == 1 {
            debug_assert!(eps.is_zero(), "maximally entangled ladder must be exact");
        }
        alpha_sq.push(a);
        eps_norms.push(eps);
    }
    Ok(LadderReport {
        d,
        m,
        chis: chis[1..].to_vec(),
        alpha_sq,
        eps_norms,
    })
}
