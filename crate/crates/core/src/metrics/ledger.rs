//! Energy bookkeeping for partition states under the non-adjacency
//! assumption: blocks never touch, so a state with `k` blocks, `r` of them
//! single pairs, has average energy `−2rJ̄ − (N−k)γ̄`.

use crate::ansatz::{build_partition_state, Partition};
use crate::error::{domain, Result};
use crate::model::{build_pair_hamiltonian, EffectiveCouplings, LinearOperator};

/// Predicted `⟨H_eff⟩` of a partition state.
pub fn partition_energy(partition: &Partition, jbar: f64, gammabar: f64) -> f64 {
    let n = partition.total() as f64;
    let k = partition.len() as f64;
    let r = partition.singles_count() as f64;
    -2.0 * r * jbar - (n - k) * gammabar
}

/// `M + 1 + … + 1` with `N` pairs in total.
pub fn ledger_partition(n: usize, m: usize) -> Result<Partition> {
    if m == 0 || m > n {
        return domain(format!("block size {m} outside [1, {n}]"));
    }
    let mut parts = vec![m];
    parts.extend(std::iter::repeat_n(1, n - m));
    Partition::new(parts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerRow {
    pub m: usize,
    pub partition: Partition,
    pub energy: f64,
}

/// Ledger energies of `M+1+…+1` for `M = 1 … N`.
pub fn energy_ledger(n: usize, jbar: f64, gammabar: f64) -> Result<Vec<LedgerRow>> {
    if n < 2 {
        return domain(format!("the ledger needs N ≥ 2, got {n}"));
    }
    (1..=n)
        .map(|m| {
            let partition = ledger_partition(n, m)?;
            Ok(LedgerRow {
                m,
                energy: partition_energy(&partition, jbar, gammabar),
                partition,
            })
        })
        .collect()
}

/// Where the all-singles and single-block lines cross.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LedgerThreshold {
    /// `γ̄/J̄` at the crossing.
    pub gammabar_over_jbar: f64,
    /// The same point as `γU/J² = γ̄/J̄ + 2`.
    pub gamma_u_over_j2: f64,
}

/// Intersects the `M = 1` and `M = N` ledger lines, both linear in
/// `x = γ̄/J̄` (energies in units of `J̄`).
pub fn ledger_threshold(n: usize) -> Result<LedgerThreshold> {
    if n < 2 {
        return domain(format!("the ledger needs N ≥ 2, got {n}"));
    }
    // E(x) = a + b·x from two evaluations of the ledger rule
    let line = |p: &Partition| {
        let a = partition_energy(p, 1.0, 0.0);
        (a, partition_energy(p, 1.0, 1.0) - a)
    };
    let (a1, b1) = line(&ledger_partition(n, 1)?);
    let (an, bn) = line(&ledger_partition(n, n)?);
    let x = (an - a1) / (b1 - bn);
    Ok(LedgerThreshold {
        gammabar_over_jbar: x,
        gamma_u_over_j2: x + 2.0,
    })
}

/// Exact `⟨ψ|H_eff|ψ⟩` on a partition state against the ledger.
#[derive(Clone, Debug, PartialEq)]
pub struct LedgerCheck {
    pub exact: f64,
    pub predicted: f64,
    pub deviation: f64,
}

pub fn ledger_vs_exact(
    d: usize,
    partition: &Partition,
    jbar: f64,
    gammabar: f64,
) -> Result<LedgerCheck> {
    let (psi, _) = build_partition_state(d, partition)?;
    let h = build_pair_hamiltonian(
        d,
        partition.total(),
        EffectiveCouplings {
            pair_hopping: jbar,
            pair_binding: gammabar,
        },
    )?;
    let exact = h.expectation(&psi)?.re;
    let predicted = partition_energy(partition, jbar, gammabar);
    Ok(LedgerCheck {
        exact,
        predicted,
        deviation: (exact - predicted).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ledger_examples() {
        let (jbar, gbar) = (0.7, 1.3);
        let rows = energy_ledger(10, jbar, gbar).unwrap();
        assert_eq!(rows.len(), 10);
        assert!((rows[0].energy + 20.0 * jbar).abs() < 1e-14);
        assert!((rows[9].energy + 9.0 * gbar).abs() < 1e-14);
        for row in &rows {
            let m = row.m as f64;
            let delta = if row.m == 1 { 1.0 } else { 0.0 };
            let closed = -(m - 1.0) * gbar - 2.0 * (10.0 - m + delta) * jbar;
            assert!((row.energy - closed).abs() < 1e-13);
        }
        assert!(energy_ledger(1, 1.0, 1.0).is_err());
    }

    #[test]
    fn thresholds() {
        let t = ledger_threshold(10).unwrap();
        assert!((t.gammabar_over_jbar - 20.0 / 9.0).abs() < 1e-15);
        let t4 = ledger_threshold(4).unwrap();
        assert!((t4.gamma_u_over_j2 - 14.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn exact_energy_of_separated_singles() {
        // On a large ring the singles state is nearly free: ⟨H⟩ → −2NJ̄.
        let p = Partition::singles(3).unwrap();
        let small = ledger_vs_exact(12, &p, 1.0, 0.5).unwrap();
        let large = ledger_vs_exact(24, &p, 1.0, 0.5).unwrap();
        assert!(large.deviation < small.deviation);
        assert_eq!(large.predicted, -6.0);
    }

    #[test]
    fn single_block_is_exact_for_binding() {
        // A lone block has no neighbours to touch: ⟨H⟩ = −(N−1)γ̄ exactly
        // when J̄ = 0.
        let c = ledger_vs_exact(9, &"3".parse().unwrap(), 0.0, 2.0).unwrap();
        assert!(c.deviation < 1e-13);
    }
}
