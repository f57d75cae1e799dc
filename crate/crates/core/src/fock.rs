//! Bitmask Fock bases for two fermion species on a ring of `d` sites.
//!
//! Two spaces are used throughout:
//!
//! * the **pair** space, where site `k` is either empty or holds one bound
//!   A–B pair `η†_k = a†_k b†_k` (hard-core bosons; pair operators commute);
//! * the **full** space of independent A and B fermions.
//!
//! Fermionic signs follow one canonical operator order: every `a†` in
//! ascending mode order, followed by every `b†` in ascending mode order.
//! With this order a pair configuration `mask` embeds into the full space as
//! `(−1)^{N(N−1)/2} |A = mask, B = mask⟩`, a sign shared by the whole
//! `N`-pair sector.
//!
//! A third, non-lattice kind of basis ([`BasisKind::Chain`]) labels the sites
//! of the relative-coordinate chains used by the two-body solutions.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::C64;

/// Largest ring supported by the pair space (one bit per site).
pub const MAX_PAIR_SITES: usize = 30;
/// Largest ring supported by the full space (one 32-bit word per species).
pub const MAX_FULL_SITES: usize = 16;

/// Occupation of the pair space: bit `k` set ⇔ site `k` holds a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairConfig(pub u64);

impl PairConfig {
    pub fn occupied(self, site: usize) -> bool {
        self.0 >> site & 1 == 1
    }

    pub fn count(self) -> u32 {
        self.0.count_ones()
    }
}

/// Occupation of the full space. Ordering is `a` major, `b` minor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FullConfig {
    pub a: u32,
    pub b: u32,
}

impl FullConfig {
    pub fn new(a: u32, b: u32) -> Self {
        Self { a, b }
    }

    /// Integer encoding whose ascending order is the basis order.
    pub fn key(self) -> u64 {
        (self.a as u64) << 32 | self.b as u64
    }

    pub fn from_key(key: u64) -> Self {
        Self {
            a: (key >> 32) as u32,
            b: key as u32,
        }
    }

    /// Number of sites holding both an A and a B fermion.
    pub fn doubly_occupied(self) -> u32 {
        (self.a & self.b).count_ones()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairOp {
    Create(usize),
    Annihilate(usize),
    Number(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FermionOp {
    CreateA(usize),
    AnnihilateA(usize),
    CreateB(usize),
    AnnihilateB(usize),
}

/// Applies a pair operator. `None` means the result vanished.
///
/// Pair operators commute, so the phase is always `+1`.
pub fn apply_pair_op(op: PairOp, config: PairConfig) -> Option<(PairConfig, i32)> {
    match op {
        PairOp::Create(k) if !config.occupied(k) => Some((PairConfig(config.0 | 1 << k), 1)),
        PairOp::Annihilate(k) if config.occupied(k) => Some((PairConfig(config.0 & !(1 << k)), 1)),
        PairOp::Number(k) if config.occupied(k) => Some((config, 1)),
        _ => None,
    }
}

fn parity(bits: u32) -> i32 {
    if bits.count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Applies a single fermion operator with the canonical-order sign.
pub fn apply_fermion_op(op: FermionOp, config: FullConfig) -> Option<(FullConfig, i32)> {
    let below = |k: usize| (1u32 << k) - 1;
    match op {
        FermionOp::CreateA(k) => {
            if config.a >> k & 1 == 1 {
                return None;
            }
            let sign = parity(config.a & below(k));
            Some((FullConfig::new(config.a | 1 << k, config.b), sign))
        }
        FermionOp::AnnihilateA(k) => {
            if config.a >> k & 1 == 0 {
                return None;
            }
            let sign = parity(config.a & below(k));
            Some((FullConfig::new(config.a & !(1 << k), config.b), sign))
        }
        FermionOp::CreateB(k) => {
            if config.b >> k & 1 == 1 {
                return None;
            }
            let sign = parity(config.a) * parity(config.b & below(k));
            Some((FullConfig::new(config.a, config.b | 1 << k), sign))
        }
        FermionOp::AnnihilateB(k) => {
            if config.b >> k & 1 == 0 {
                return None;
            }
            let sign = parity(config.a) * parity(config.b & below(k));
            Some((FullConfig::new(config.a, config.b & !(1 << k)), sign))
        }
    }
}

/// Applies an operator string; the last operator acts first.
pub fn apply_fermion_string(ops: &[FermionOp], config: FullConfig) -> Option<(FullConfig, i32)> {
    ops.iter().rev().try_fold((config, 1), |(c, s), &op| {
        apply_fermion_op(op, c).map(|(c2, s2)| (c2, s * s2))
    })
}

/// Sign of `η†_{k1}…η†_{kN}|0⟩` in the canonical order of the full space.
pub fn pair_embedding_sign(pairs: usize) -> f64 {
    if (pairs * pairs.saturating_sub(1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `exp(i 2π k r / d)`, exact at multiples of a quarter turn.
pub fn lattice_phase(k: i64, r: i64, d: usize) -> C64 {
    let n = (k as i128 * r as i128).rem_euclid(d as i128) as usize;
    if (4 * n).is_multiple_of(d) {
        match 4 * n / d {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    } else {
        C64::from_polar(1.0, 2.0 * PI * n as f64 / d as f64)
    }
}

/// Rotates the lowest `sites` bits of `mask` by `shift` towards higher sites.
pub fn rotate_mask(mask: u64, shift: usize, sites: usize) -> u64 {
    let shift = shift % sites;
    if shift == 0 {
        return mask;
    }
    let full = if sites == 64 {
        u64::MAX
    } else {
        (1u64 << sites) - 1
    };
    ((mask << shift) | (mask >> (sites - shift))) & full
}

/// All `sites`-bit masks with `count` bits set, ascending.
pub fn combinations(sites: usize, count: usize) -> Vec<u64> {
    if count > sites {
        return Vec::new();
    }
    if count == 0 {
        return vec![0];
    }
    let limit = 1u64 << sites;
    let mut out = Vec::new();
    let mut v: u64 = (1u64 << count) - 1;
    while v < limit {
        out.push(v);
        // Gosper's hack: next integer with the same popcount.
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    Pair {
        pairs: usize,
    },
    Full {
        n_a: usize,
        n_b: usize,
    },
    /// Consecutive integer labels `first, first+1, …` of a chain.
    Chain {
        first: i64,
    },
}

/// Ordered enumeration of configurations, sorted strictly ascending by key.
#[derive(Debug)]
pub struct Basis {
    kind: BasisKind,
    sites: usize,
    states: Vec<u64>,
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.sites == other.sites
            && self.states.len() == other.states.len()
    }
}

impl Basis {
    pub fn pair(sites: usize, pairs: usize) -> Result<Arc<Basis>> {
        if sites == 0 || sites > MAX_PAIR_SITES {
            return Err(Error::Size(format!(
                "pair basis supports 1..={MAX_PAIR_SITES} sites, got {sites}"
            )));
        }
        if pairs > sites {
            return domain(format!("{pairs} pairs do not fit on {sites} sites"));
        }
        Ok(Arc::new(Basis {
            kind: BasisKind::Pair { pairs },
            sites,
            states: combinations(sites, pairs),
        }))
    }

    pub fn full(sites: usize, n_a: usize, n_b: usize) -> Result<Arc<Basis>> {
        if sites == 0 || sites > MAX_FULL_SITES {
            return Err(Error::Size(format!(
                "full basis supports 1..={MAX_FULL_SITES} sites, got {sites}"
            )));
        }
        if n_a > sites || n_b > sites {
            return domain(format!(
                "({n_a}, {n_b}) fermions do not fit on {sites} sites"
            ));
        }
        let a = combinations(sites, n_a);
        let b = combinations(sites, n_b);
        let states = a
            .iter()
            .flat_map(|&ma| {
                b.iter()
                    .map(move |&mb| FullConfig::new(ma as u32, mb as u32).key())
            })
            .collect();
        Ok(Arc::new(Basis {
            kind: BasisKind::Full { n_a, n_b },
            sites,
            states,
        }))
    }

    /// Chain sites labelled `first..=last`.
    pub fn chain(first: i64, last: i64) -> Result<Arc<Basis>> {
        if last < first {
            return domain(format!("empty chain [{first}, {last}]"));
        }
        let len = (last - first + 1) as u64;
        Ok(Arc::new(Basis {
            kind: BasisKind::Chain { first },
            sites: len as usize,
            states: (0..len).collect(),
        }))
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Ring size for lattice bases, chain length for chains.
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn keys(&self) -> &[u64] {
        &self.states
    }

    pub fn key(&self, index: usize) -> u64 {
        self.states[index]
    }

    pub fn index_of(&self, key: u64) -> Option<usize> {
        self.states.binary_search(&key).ok()
    }

    pub fn pair_config(&self, index: usize) -> PairConfig {
        debug_assert!(matches!(self.kind, BasisKind::Pair { .. }));
        PairConfig(self.states[index])
    }

    pub fn full_config(&self, index: usize) -> FullConfig {
        debug_assert!(matches!(self.kind, BasisKind::Full { .. }));
        FullConfig::from_key(self.states[index])
    }

    pub fn chain_label(&self, index: usize) -> i64 {
        match self.kind {
            BasisKind::Chain { first } => first + index as i64,
            _ => panic!("chain_label on a lattice basis"),
        }
    }

    pub fn index_of_pair(&self, config: PairConfig) -> Option<usize> {
        self.index_of(config.0)
    }

    pub fn index_of_full(&self, config: FullConfig) -> Option<usize> {
        self.index_of(config.key())
    }

    /// Number of pairs in a pair basis.
    pub fn pairs(&self) -> Option<usize> {
        match self.kind {
            BasisKind::Pair { pairs } => Some(pairs),
            _ => None,
        }
    }

    pub fn same_space(&self, other: &Basis) -> bool {
        self == other
    }
}

/// Complex amplitudes over a basis. Immutable once built.
#[derive(Clone, Debug)]
pub struct StateVector {
    basis: Arc<Basis>,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(basis: Arc<Basis>, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != basis.len() {
            return Err(Error::BasisMismatch(format!(
                "{} amplitudes for a basis of {} states",
                amps.len(),
                basis.len()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return domain("non-finite amplitude");
        }
        Ok(Self { basis, amps })
    }

    pub fn zeros(basis: Arc<Basis>) -> Self {
        let amps = vec![C64::new(0.0, 0.0); basis.len()];
        Self { basis, amps }
    }

    pub fn from_fn(basis: Arc<Basis>, f: impl FnMut(usize) -> C64) -> Result<Self> {
        let amps = (0..basis.len()).map(f).collect();
        Self::new(basis, amps)
    }

    /// Unit vector on basis state `index`.
    pub fn basis_state(basis: Arc<Basis>, index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); basis.len()];
        amps[index] = C64::new(1.0, 0.0);
        Self { basis, amps }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() < 1e-12
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return domain("cannot normalize the zero vector");
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            basis: self.basis.clone(),
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    fn check_same_basis(&self, other: &StateVector) -> Result<()> {
        if self.basis.same_space(&other.basis) {
            Ok(())
        } else {
            Err(Error::BasisMismatch(format!(
                "{:?} on {} sites vs {:?} on {} sites",
                self.basis.kind(),
                self.basis.sites(),
                other.basis.kind(),
                other.basis.sites()
            )))
        }
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_same_basis(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn add(&self, other: &StateVector) -> Result<StateVector> {
        self.check_same_basis(other)?;
        Ok(Self {
            basis: self.basis.clone(),
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.check_same_basis(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Multiplies by a global phase so the first nonzero amplitude is real
    /// and positive.
    pub fn with_phase_convention(&self) -> Self {
        let tiny = 1e-14 * self.norm().max(f64::MIN_POSITIVE);
        match self.amps.iter().find(|a| a.norm() > tiny) {
            Some(first) => {
                let phase = first.conj() / first.norm();
                let mut out = self.scaled(phase);
                let idx = self.amps.iter().position(|a| a.norm() > tiny).unwrap();
                out.amps[idx].im = 0.0;
                out
            }
            None => self.clone(),
        }
    }

    /// Cyclic translation `k → k + shift (mod d)` of every occupied site.
    pub fn translate(&self, shift: isize) -> Result<StateVector> {
        let d = self.basis.sites();
        let s = shift.rem_euclid(d as isize) as usize;
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        match self.basis.kind() {
            BasisKind::Pair { .. } => {
                for (i, &amp) in self.amps.iter().enumerate() {
                    let target = rotate_mask(self.basis.key(i), s, d);
                    let j = self
                        .basis
                        .index_of(target)
                        .expect("pair basis closed under shifts");
                    out[j] = amp;
                }
            }
            BasisKind::Full { .. } => {
                for (i, &amp) in self.amps.iter().enumerate() {
                    let c = self.basis.full_config(i);
                    let sign = wrap_sign(c.a as u64, s, d) * wrap_sign(c.b as u64, s, d);
                    let target = FullConfig::new(
                        rotate_mask(c.a as u64, s, d) as u32,
                        rotate_mask(c.b as u64, s, d) as u32,
                    );
                    let j = self
                        .basis
                        .index_of_full(target)
                        .expect("full basis closed under shifts");
                    out[j] = amp * sign as f64;
                }
            }
            BasisKind::Chain { .. } => return domain("chains are not translation invariant"),
        }
        Ok(Self {
            basis: self.basis.clone(),
            amps: out,
        })
    }

    /// Restricts a full-space state to `A = B` configurations and expresses
    /// it in the pair basis. Weight outside the pair sector is dropped.
    pub fn project_to_pair_sector(&self) -> Result<StateVector> {
        let (n_a, n_b) = match self.basis.kind() {
            BasisKind::Full { n_a, n_b } => (n_a, n_b),
            _ => return domain("pair-sector projection needs a full-space state"),
        };
        if n_a != n_b {
            return domain(format!(
                "unequal species ({n_a}, {n_b}) have no pair sector"
            ));
        }
        let pair_basis = Basis::pair(self.basis.sites(), n_a)?;
        let sign = pair_embedding_sign(n_a);
        let amps = pair_basis
            .keys()
            .iter()
            .map(|&m| {
                let idx = self
                    .basis
                    .index_of_full(FullConfig::new(m as u32, m as u32))
                    .expect("pair configuration present in full basis");
                self.amps[idx] * sign
            })
            .collect();
        StateVector::new(pair_basis, amps)
    }

    /// Expresses a pair-space state in the full basis.
    pub fn embed_in_full(&self) -> Result<StateVector> {
        let pairs = match self.basis.pairs() {
            Some(n) => n,
            None => return domain("embedding needs a pair-space state"),
        };
        let full = Basis::full(self.basis.sites(), pairs, pairs)?;
        let sign = pair_embedding_sign(pairs);
        let mut amps = vec![C64::new(0.0, 0.0); full.len()];
        for (i, &amp) in self.amps.iter().enumerate() {
            let m = self.basis.key(i) as u32;
            let j = full
                .index_of_full(FullConfig::new(m, m))
                .expect("pair config in full basis");
            amps[j] = amp * sign;
        }
        StateVector::new(full, amps)
    }
}

// Sign from moving the wrapped-around creators of one species back to the
// front of its ascending block.
fn wrap_sign(mask: u64, shift: usize, sites: usize) -> i32 {
    if shift == 0 {
        return 1;
    }
    let n = mask.count_ones();
    let wrapped = (mask >> (sites - shift)).count_ones();
    if (wrapped * (n - wrapped)).is_multiple_of(2) {
        1
    } else {
        -1
    }
}
