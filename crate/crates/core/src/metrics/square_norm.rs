//! Square-norm test for multipartite entanglement: for a normalized
//! creation operator `c†` built from an even number of fermions,
//! `‖c†²|0⟩‖²` vanishes for a single Slater string and approaches `2ˢ` for a
//! product of `s` highly entangled blocks.

use std::collections::BTreeMap;

use crate::error::{domain, Error, Result};

/// Modes are bits of a `u64`.
pub const MAX_MODES: usize = 64;

/// `Σ_t w_t · (product of a† over the modes of string t)`, with each string
/// stored as an ascending mode mask and the reordering sign folded into
/// `w_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct CreationOperator {
    terms: BTreeMap<u64, f64>,
}

/// Sign of reordering `modes` into ascending order (zero on repeats).
fn sort_sign(modes: &[usize]) -> i32 {
    let mut sign = 1;
    for i in 0..modes.len() {
        for j in i + 1..modes.len() {
            if modes[i] == modes[j] {
                return 0;
            }
            if modes[i] > modes[j] {
                sign = -sign;
            }
        }
    }
    sign
}

impl CreationOperator {
    /// Builds from `(weight, modes in operator order)` strings.
    pub fn new(strings: &[(f64, Vec<usize>)]) -> Result<Self> {
        let mut terms: BTreeMap<u64, f64> = BTreeMap::new();
        let mut parity = None;
        for (w, modes) in strings {
            if let Some(&m) = modes.iter().find(|&&m| m >= MAX_MODES) {
                return Err(Error::Size(format!("mode {m} beyond {MAX_MODES} modes")));
            }
            if modes.len() % 2 == 1 {
                return domain("creation strings must hold an even number of fermions");
            }
            if *parity.get_or_insert(modes.len()) != modes.len() {
                return domain("creation strings must all create the same number of fermions");
            }
            let sign = sort_sign(modes);
            if sign == 0 {
                continue;
            }
            let mask = modes.iter().fold(0u64, |m, &k| m | 1 << k);
            *terms.entry(mask).or_default() += w * sign as f64;
        }
        terms.retain(|_, w| *w != 0.0);
        if terms.is_empty() {
            return domain("creation operator vanishes");
        }
        Ok(Self { terms })
    }

    /// Two-fermion operator `Σ_k √λ_k a†_k b†_k`, with `a_k` on modes
    /// `offset + k` and `b_k` on modes `offset + len + k`.
    pub fn bipartite(lambdas: &[f64], offset: usize) -> Result<Self> {
        let n = lambdas.len();
        if lambdas.iter().any(|l| *l < 0.0 || !l.is_finite()) {
            return domain("Schmidt weights must be finite and non-negative");
        }
        let strings: Vec<(f64, Vec<usize>)> = lambdas
            .iter()
            .enumerate()
            .map(|(k, l)| (l.sqrt(), vec![offset + k, offset + n + k]))
            .collect();
        Self::new(&strings)
    }

    /// `‖c†|0⟩‖²`.
    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|w| w * w).sum()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self {
            terms: self.terms.iter().map(|(&m, &w)| (m, w / n)).collect(),
        }
    }

    pub fn support(&self) -> u64 {
        self.terms.keys().fold(0, |a, m| a | m)
    }

    pub fn strings(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.terms.iter().map(|(&m, &w)| (m, w))
    }

    /// Product `self · other` of operators on disjoint modes.
    pub fn times(&self, other: &CreationOperator) -> Result<Self> {
        if self.support() & other.support() != 0 {
            return domain("product factors must act on disjoint modes");
        }
        let mut terms = BTreeMap::new();
        for (&m1, &w1) in &self.terms {
            for (&m2, &w2) in &other.terms {
                *terms.entry(m1 | m2).or_insert(0.0) += w1 * w2 * merge_sign(m1, m2) as f64;
            }
        }
        Ok(Self { terms })
    }

    /// Applies the operator to a state given as `mask → amplitude`.
    fn apply(&self, state: &BTreeMap<u64, f64>) -> BTreeMap<u64, f64> {
        let mut out: BTreeMap<u64, f64> = BTreeMap::new();
        for (&ms, &a) in state {
            for (&mt, &w) in &self.terms {
                if ms & mt == 0 {
                    *out.entry(ms | mt).or_default() += a * w * merge_sign(mt, ms) as f64;
                }
            }
        }
        out.retain(|_, v| *v != 0.0);
        out
    }
}

/// Sign of `(ascending string of left)(ascending string of right)` relative
/// to the ascending string of their union: one swap for every pair
/// `p ∈ left, q ∈ right` with `p > q`.
fn merge_sign(left: u64, right: u64) -> i32 {
    let mut swaps = 0u32;
    let mut r = right;
    while r != 0 {
        let q = r.trailing_zeros();
        swaps += (left >> q >> 1).count_ones();
        r &= r - 1;
    }
    if swaps.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `‖c†²|0⟩‖²` by explicit construction with sign tracking.
pub fn square_norm(c: &CreationOperator) -> f64 {
    let vacuum = BTreeMap::from([(0u64, 1.0)]);
    c.apply(&c.apply(&vacuum)).values().map(|a| a * a).sum()
}

/// Result of the square-norm test on an `s`-fold product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquareNormReport {
    pub norm_sq: f64,
    /// Weight of ordered tuples whose `2s` strings are not pairwise disjoint.
    pub omega_star: f64,
    pub blocks: usize,
}

impl SquareNormReport {
    /// `2ˢ(1 − ω(*))`.
    pub fn predicted(&self) -> f64 {
        2f64.powi(self.blocks as i32) * (1.0 - self.omega_star)
    }
}

/// Runs the test on `c† = Π_i B_i` with the factors on disjoint modes.
/// Each factor is normalized first.
pub fn square_norm_test(blocks: &[CreationOperator]) -> Result<SquareNormReport> {
    if blocks.is_empty() {
        return domain("need at least one block");
    }
    let blocks: Vec<CreationOperator> = blocks.iter().map(|b| b.normalized()).collect();
    let mut product = blocks[0].clone();
    for b in &blocks[1..] {
        product = product.times(b)?;
    }
    let norm_sq = square_norm(&product);

    // ω(*): sum over (t_1, u_1, …, t_s, u_s) of Π w_t² w_u² where some block
    // pair (t_i, u_i) overlaps. Strings of different blocks never overlap.
    let weights: Vec<Vec<(u64, f64)>> = blocks
        .iter()
        .map(|b| b.strings().map(|(m, w)| (m, w * w)).collect())
        .collect();
    let mut disjoint_weight = 1.0;
    for w in &weights {
        let mut block_disjoint = 0.0;
        for &(mt, wt) in w {
            for &(mu, wu) in w {
                if mt & mu == 0 {
                    block_disjoint += wt * wu;
                }
            }
        }
        disjoint_weight *= block_disjoint;
    }
    Ok(SquareNormReport {
        norm_sq,
        omega_star: 1.0 - disjoint_weight,
        blocks: blocks.len(),
    })
}

/// Maximally entangled two-fermion block over `modes` modes (half A, half
/// B) starting at mode `offset`.
pub fn maximally_entangled_block(modes: usize, offset: usize) -> Result<CreationOperator> {
    if modes < 2 || modes % 2 == 1 {
        return domain(format!(
            "a two-species block needs an even number of modes, got {modes}"
        ));
    }
    let half = modes / 2;
    CreationOperator::bipartite(&vec![1.0 / half as f64; half], offset)
}
