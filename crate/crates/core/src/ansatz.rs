//! Composite-boson trial states as explicit vectors.
//!
//! Every constructor expands its creation operators symbolically over
//! ordered maps (so the result is independent of hashing), drops terms
//! killed by Pauli exclusion, normalizes numerically and applies the global
//! phase convention of [`StateVector::with_phase_convention`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::fock::{
    apply_fermion_string, lattice_phase, rotate_mask, Basis, FermionOp, FullConfig, StateVector,
};
use crate::C64;

/// Block sizes `M₁ ≥ … ≥ M_k ≥ 1` of a partition state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Sorts the parts into decreasing order; rejects empty input and zeros.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return domain(format!("partition parts must be positive, got {parts:?}"));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self(parts))
    }

    /// `[1, 1, …, 1]` with `n` parts.
    pub fn singles(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Total number of pairs `N = Σ M_i`.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of blocks `k`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of parts equal to one.
    pub fn singles_count(&self) -> usize {
        self.0.iter().filter(|&&m| m == 1).count()
    }

    /// All partitions of `n`, from `[n]` down to `[1, …, 1]`.
    pub fn all(n: usize) -> Vec<Partition> {
        fn rec(rest: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition(prefix.clone()));
                return;
            }
            for m in (1..=rest.min(max)).rev() {
                prefix.push(m);
                rec(rest - m, m, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            rec(n, n, &mut Vec::new(), &mut out);
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|m| m.to_string()).collect();
        f.write_str(&parts.join("+"))
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts `2+1`, `[2,1]`, `2,1` or a single size.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
        let parts = inner
            .split(['+', ','])
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("bad partition part {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

fn pair_state_from_map(
    basis: std::sync::Arc<Basis>,
    map: &BTreeMap<u64, C64>,
) -> Result<StateVector> {
    let mut amps = vec![C64::new(0.0, 0.0); basis.len()];
    for (&mask, &a) in map {
        let i = basis
            .index_of(mask)
            .expect("expanded configuration lies in the basis");
        amps[i] = a;
    }
    let raw = StateVector::new(basis, amps)?;
    if raw.norm() < 1e-14 {
        return domain("the creation operators annihilate the vacuum");
    }
    Ok(raw.normalized()?.with_phase_convention())
}

/// `c†_{s,r}^N |0⟩` normalized, with
/// `c†_{s,r} = (1/√d) Σ_k e^{i2πkr/d} a†_k b†_{k+s}`.
pub fn build_c_sr(d: usize, s: usize, r: usize, n: usize) -> Result<StateVector> {
    if s >= d || r >= d {
        return domain(format!("labels (s, r) = ({s}, {r}) must lie in [0, {d})"));
    }
    let basis = Basis::full(d, n, n)?;
    let weight = 1.0 / (d as f64).sqrt();
    let mut state: BTreeMap<FullConfig, C64> = BTreeMap::new();
    state.insert(FullConfig::new(0, 0), C64::new(1.0, 0.0));
    for _ in 0..n {
        let mut next: BTreeMap<FullConfig, C64> = BTreeMap::new();
        for (&c, &amp) in &state {
            for k in 0..d {
                let ops = [FermionOp::CreateA(k), FermionOp::CreateB((k + s) % d)];
                if let Some((c2, sign)) = apply_fermion_string(&ops, c) {
                    let phase = lattice_phase(k as i64, r as i64, d) * (weight * sign as f64);
                    *next.entry(c2).or_default() += amp * phase;
                }
            }
        }
        state = next;
    }
    let mut amps = vec![C64::new(0.0, 0.0); basis.len()];
    for (&c, &a) in &state {
        amps[basis.index_of_full(c).expect("configuration in full basis")] = a;
    }
    let raw = StateVector::new(basis, amps)?;
    if raw.norm() < 1e-14 {
        return domain(format!("c†^{n} vanishes on {d} modes"));
    }
    Ok(raw.normalized()?.with_phase_convention())
}

/// `q†_{s,r}|0⟩` normalized, with
/// `q†_{s,r} = (1/√d) Σ_k e^{i2πkr/d} η†_k η†_{k+s}`.
///
/// For `s = d/2` every configuration is visited twice; the result is
/// renormalized (and vanishes for odd `r`).
pub fn build_q_sr(d: usize, s: usize, r: usize) -> Result<StateVector> {
    if s == 0 {
        return domain("q†_{0,r} vanishes: η†_k² = 0");
    }
    if 2 * s > d || r >= d {
        return domain(format!(
            "need 1 ≤ s ≤ d/2 and r < d, got s={s}, r={r}, d={d}"
        ));
    }
    let basis = Basis::pair(d, 2)?;
    let mut map: BTreeMap<u64, C64> = BTreeMap::new();
    for k in 0..d {
        let mask = 1u64 << k | 1u64 << ((k + s) % d);
        *map.entry(mask).or_default() += lattice_phase(k as i64, r as i64, d);
    }
    pair_state_from_map(basis, &map)
}

/// Integer expansion of `q†_{(M_k)}…q†_{(M_1)}|0⟩` without the `1/√d`
/// factors: configuration → number of ordered block placements producing it.
pub fn partition_counts(d: usize, parts: &[usize]) -> BTreeMap<u64, u64> {
    let mut state: BTreeMap<u64, u64> = BTreeMap::new();
    state.insert(0, 1);
    for &m in parts {
        let mut next: BTreeMap<u64, u64> = BTreeMap::new();
        if m <= d {
            let block = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
            for (&mask, &count) in &state {
                for k in 0..d {
                    let b = rotate_mask(block, k, d);
                    if mask & b == 0 {
                        *next.entry(mask | b).or_default() += count;
                    }
                }
            }
        }
        state = next;
    }
    state
}

/// Normalized block state `q†_{(M)}|0⟩`,
/// `q†_{(M)} = (1/√d) Σ_k η†_k η†_{k+1}…η†_{k+M−1}`.
pub fn build_block(d: usize, m: usize) -> Result<StateVector> {
    if m == 0 || m > d {
        return domain(format!("block size must lie in [1, {d}], got {m}"));
    }
    Ok(build_partition_state(d, &Partition::new(vec![m])?)?.0)
}

/// `|M₁+…+M_k⟩ = 𝒩 q†_{(M₁)}…q†_{(M_k)}|0⟩`, returned with `𝒩²`.
pub fn build_partition_state(d: usize, partition: &Partition) -> Result<(StateVector, f64)> {
    let n = partition.total();
    if n > d {
        return domain(format!(
            "partition {partition} needs {n} sites, ring has {d}"
        ));
    }
    let basis = Basis::pair(d, n)?;
    let counts = partition_counts(d, partition.parts());
    if counts.is_empty() {
        return domain(format!("partition {partition} annihilates on {d} sites"));
    }
    let sum_sq: f64 = counts.values().map(|&c| (c as f64).powi(2)).sum();
    let raw_norm_sq = sum_sq / (d as f64).powi(partition.len() as i32);
    let map: BTreeMap<u64, C64> = counts
        .iter()
        .map(|(&mask, &c)| (mask, C64::new(c as f64, 0.0)))
        .collect();
    Ok((pair_state_from_map(basis, &map)?, 1.0 / raw_norm_sq))
}

/// Coefficients `x_s` in `|1+1⟩ = Σ_{s=1}^{⌊d/2⌋} x_s |q_{s,0}⟩`, each
/// `|q_{s,0}⟩` normalized: `√(2/(d−1))` for `s < d/2` and `√(1/(d−1))` for
/// `s = d/2`.
pub fn two_pair_expansion(d: usize) -> Vec<(usize, f64)> {
    let df = d as f64;
    (1..=d / 2)
        .map(|s| {
            let x = if 2 * s == d {
                (1.0 / (df - 1.0)).sqrt()
            } else {
                (2.0 / (df - 1.0)).sqrt()
            };
            (s, x)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::combinations;
    use proptest::prelude::*;

    fn close(a: &StateVector, b: &StateVector, tol: f64) -> bool {
        a.distance(b).unwrap() < tol
    }

    /// `|⟨a|b⟩|²`, insensitive to global phases.
    fn overlap(a: &StateVector, b: &StateVector) -> f64 {
        a.inner(b).unwrap().norm_sqr()
    }

    #[test]
    fn partition_parsing() {
        let p: Partition = "1+2".parse().unwrap();
        assert_eq!(p.parts(), &[2, 1]);
        assert_eq!(p.to_string(), "2+1");
        assert_eq!("[3,1]".parse::<Partition>().unwrap().parts(), &[3, 1]);
        assert_eq!("4".parse::<Partition>().unwrap().total(), 4);
        assert!("2+0".parse::<Partition>().is_err());
        assert!("x".parse::<Partition>().is_err());
        assert_eq!(Partition::all(4).len(), 5);
        assert_eq!(Partition::all(4)[0].parts(), &[4]);
        assert_eq!(Partition::all(4)[4].parts(), &[1, 1, 1, 1]);
    }

    #[test]
    fn single_c_states_are_orthonormal() {
        let d = 4;
        let states: Vec<StateVector> = (0..d)
            .flat_map(|s| (0..d).map(move |r| build_c_sr(d, s, r, 1).unwrap()))
            .collect();
        for (i, a) in states.iter().enumerate() {
            assert!(a.is_normalized());
            for (j, b) in states.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b).unwrap().norm() - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn maximally_entangled_state_is_uniform() {
        let d = 5;
        let psi = build_c_sr(d, 0, 0, 1).unwrap();
        let basis = psi.basis();
        for (i, a) in psi.amplitudes().iter().enumerate() {
            let c = basis.full_config(i);
            let expect = if c.a == c.b {
                1.0 / (d as f64).sqrt()
            } else {
                0.0
            };
            assert!((a.re - expect).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn filled_ring_forgets_labels() {
        let d = 4;
        let a = build_c_sr(d, 1, 2, d).unwrap();
        let b = build_c_sr(d, 3, 1, d).unwrap();
        assert!((overlap(&a, &b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn q_states() {
        let q = build_q_sr(8, 1, 0).unwrap();
        let nonzero: Vec<_> = q.amplitudes().iter().filter(|a| a.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 8);
        assert!(nonzero
            .iter()
            .all(|a| (a.re - 1.0 / 8f64.sqrt()).abs() < 1e-15));
        assert!(build_q_sr(8, 0, 0).is_err());
        assert!(build_q_sr(8, 5, 0).is_err());
        // s = d/2 renormalized: 4 distinct configurations
        let half = build_q_sr(8, 4, 0).unwrap();
        assert!(half.is_normalized());
        assert_eq!(
            half.amplitudes().iter().filter(|a| a.norm() > 0.0).count(),
            4
        );
        assert!(build_q_sr(8, 4, 1).is_err());
    }

    #[test]
    fn q_states_are_orthonormal_below_half_ring() {
        let d = 8;
        let states: Vec<StateVector> = (1..d / 2)
            .flat_map(|s| (0..d).map(move |r| build_q_sr(d, s, r).unwrap()))
            .collect();
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b).unwrap().norm() - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_pair_expansion_is_exact() {
        for d in [4usize, 6, 8, 10] {
            let target = build_partition_state(d, &Partition::singles(2).unwrap())
                .unwrap()
                .0;
            let mut sum = StateVector::zeros(target.basis().clone());
            for (s, x) in two_pair_expansion(d) {
                sum = sum
                    .add(&build_q_sr(d, s, 0).unwrap().scaled(C64::new(x, 0.0)))
                    .unwrap();
            }
            assert!(close(&sum, &target, 1e-12), "d = {d}");

            // the large-d form √(2/d) on every s is off by O(1/d)
            let mut naive = StateVector::zeros(target.basis().clone());
            for s in 1..=d / 2 {
                let x = (2.0 / d as f64).sqrt();
                naive = naive
                    .add(&build_q_sr(d, s, 0).unwrap().scaled(C64::new(x, 0.0)))
                    .unwrap();
            }
            assert!(naive.distance(&target).unwrap() > 1e-3);
        }
    }

    #[test]
    fn squared_pair_operator_is_the_singles_state() {
        for d in [4usize, 6] {
            let c2 = build_c_sr(d, 0, 0, 2)
                .unwrap()
                .project_to_pair_sector()
                .unwrap();
            assert!((c2.norm() - 1.0).abs() < 1e-12);
            let singles = build_partition_state(d, &Partition::singles(2).unwrap())
                .unwrap()
                .0;
            assert!((overlap(&c2, &singles) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn blocks() {
        let d = 7;
        let b1 = build_block(d, 1).unwrap();
        let c1 = build_c_sr(d, 0, 0, 1)
            .unwrap()
            .project_to_pair_sector()
            .unwrap();
        assert!((overlap(&b1, &c1) - 1.0).abs() < 1e-12);
        let b2 = build_block(d, 2).unwrap();
        assert!(close(&b2, &build_q_sr(d, 1, 0).unwrap(), 1e-12));
        let full = build_block(d, d).unwrap();
        assert_eq!(full.amplitudes(), &[C64::new(1.0, 0.0)]);
        assert!(build_block(d, d + 1).is_err());
    }

    #[test]
    fn three_plus_one_normalization_by_brute_force() {
        // Recount directly: place the 3-block at every k and the single at
        // every free site j, and tally the resulting configurations.
        for d in [6usize, 8, 10, 12] {
            let mut tally: BTreeMap<u64, u64> = BTreeMap::new();
            for k in 0..d {
                let block = (0..3).fold(0u64, |m, t| m | 1 << ((k + t) % d));
                for j in (0..d).filter(|j| block >> j & 1 == 0) {
                    *tally.entry(block | 1 << j).or_default() += 1;
                }
            }
            let sum_sq: u64 = tally.values().map(|c| c * c).sum();
            let oracle = (d * d) as f64 / sum_sq as f64;
            let (_, n2) = build_partition_state(d, &"3+1".parse().unwrap()).unwrap();
            assert!((n2 - oracle).abs() < 1e-14);
            assert!((n2 - d as f64 / (d as f64 - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn single_part_partition_is_block() {
        let (p, n2) = build_partition_state(9, &"4".parse().unwrap()).unwrap();
        assert!(close(&p, &build_block(9, 4).unwrap(), 1e-15));
        assert!((n2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn overfull_partition_rejected() {
        assert!(build_partition_state(5, &"3+3".parse().unwrap()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn partition_states_are_normalized_and_translation_invariant(d in 4usize..13, idx in 0usize..7, n in 1usize..5) {
            let parts = Partition::all(n);
            let p = &parts[idx % parts.len()];
            prop_assume!(p.total() <= d);
            let (psi, _) = build_partition_state(d, p).unwrap();
            prop_assert!(psi.is_normalized());
            prop_assert!(close(&psi.translate(1).unwrap(), &psi, 1e-12));
        }

        #[test]
        fn singles_state_is_uniform(d in 2usize..12, n in 1usize..5) {
            prop_assume!(n <= d);
            let (psi, _) = build_partition_state(d, &Partition::singles(n).unwrap()).unwrap();
            let expect = 1.0 / (combinations(d, n).len() as f64).sqrt();
            for a in psi.amplitudes() {
                prop_assert!((a.re - expect).abs() < 1e-12);
            }
        }

        #[test]
        fn c_states_are_translation_eigenstates(d in 2usize..7, s in 0usize..7, r in 0usize..7, n in 1usize..3) {
            // T c†_{s,r} T⁻¹ = e^{−i2πr/d} c†_{s,r}
            prop_assume!(s < d && r < d && n <= d);
            let psi = build_c_sr(d, s, r, n).unwrap();
            prop_assert!(psi.is_normalized());
            let phase = lattice_phase(-(n as i64), r as i64, d);
            prop_assert!(close(&psi.translate(1).unwrap(), &psi.scaled(phase), 1e-12));
        }
    }
}
