//! Hamiltonians: the periodic extended Hubbard model for two fermion
//! species, its strong-coupling effective model for hard-core pairs, and the
//! relative-coordinate chains that carry the two-body bound states.
//!
//! All operators are assembled from the same per-configuration connection
//! rules, so the stored sparse form and the matrix-free form agree exactly.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::fock::{
    apply_fermion_string, apply_pair_op, lattice_phase, Basis, BasisKind, FermionOp, FullConfig,
    PairConfig, PairOp, StateVector,
};
use crate::C64;

/// Rows above which matvecs run in parallel. Per-row sums are sequential,
/// so the result does not depend on the thread count.
const PARALLEL_ROWS: usize = 4096;

/// Form of the A–B nearest-neighbour attraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum NeighbourBond {
    /// `−Σ (n^A_k n^B_{k+1} + n^B_k n^A_{k+1})`. Projects onto the pair
    /// sector as `−2 Σ n_k n_{k+1}`, which is what the effective model uses.
    #[default]
    Symmetric,
    /// `−Σ n^A_k n^B_{k+1}` only.
    Directed,
}

/// Energies and particle content of a periodic ring.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Hopping `J`.
    pub hopping: f64,
    /// On-site attraction `U`.
    pub onsite: f64,
    /// Nearest-neighbour attraction `γ`.
    pub neighbour: f64,
    pub sites: usize,
    pub n_a: usize,
    pub n_b: usize,
    pub bond: NeighbourBond,
}

impl ModelParams {
    /// `n` fermions of each species (equivalently `n` pairs).
    pub fn pairs(sites: usize, n: usize, hopping: f64, onsite: f64, neighbour: f64) -> Self {
        Self {
            hopping,
            onsite,
            neighbour,
            sites,
            n_a: n,
            n_b: n,
            bond: NeighbourBond::Symmetric,
        }
    }

    pub fn with_bond(mut self, bond: NeighbourBond) -> Self {
        self.bond = bond;
        self
    }

    pub fn with_species(mut self, n_a: usize, n_b: usize) -> Self {
        self.n_a = n_a;
        self.n_b = n_b;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("J", self.hopping),
            ("U", self.onsite),
            ("gamma", self.neighbour),
        ] {
            if !v.is_finite() || v < 0.0 {
                return domain(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        if self.sites < 2 {
            return domain(format!("need at least 2 sites, got {}", self.sites));
        }
        Ok(())
    }

    /// Number of pairs; requires equal species counts.
    pub fn pair_count(&self) -> Result<usize> {
        if self.n_a != self.n_b {
            return domain(format!(
                "unequal species ({}, {}) do not form pairs",
                self.n_a, self.n_b
            ));
        }
        Ok(self.n_a)
    }

    /// Converts the dimensionless `γU/J²` into `γ`.
    pub fn gamma_from_scaled(scaled: f64, hopping: f64, onsite: f64) -> Result<f64> {
        if onsite <= 0.0 {
            return domain("γU/J² needs U > 0");
        }
        Ok(scaled * hopping * hopping / onsite)
    }

    pub fn effective(&self) -> Result<EffectiveCouplings> {
        EffectiveCouplings::from_params(self)
    }
}

/// Couplings of the effective pair model:
/// `H_eff = −J̄ Σ (η†_k η_{k+1} + h.c.) − γ̄ Σ n_k n_{k+1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveCouplings {
    /// `J̄ = 2J²/U`.
    pub pair_hopping: f64,
    /// `γ̄ = 2(γ − J̄)`.
    pub pair_binding: f64,
}

impl EffectiveCouplings {
    pub fn from_params(p: &ModelParams) -> Result<Self> {
        p.validate()?;
        if p.onsite == 0.0 {
            return domain("effective model needs U > 0");
        }
        let jbar = 2.0 * p.hopping * p.hopping / p.onsite;
        Ok(Self {
            pair_hopping: jbar,
            pair_binding: 2.0 * (p.neighbour - jbar),
        })
    }

    /// Energy dropped from `H_eff` for `n` pairs: `−n(U + 4J²/U)`.
    pub fn dropped_constant(p: &ModelParams, n: usize) -> f64 {
        -(n as f64) * (p.onsite + 4.0 * p.hopping * p.hopping / p.onsite)
    }
}

/// Anything that can act on amplitude vectors of a fixed basis.
pub trait LinearOperator: Sync {
    fn basis(&self) -> &Arc<Basis>;

    /// `y ← H x`. Both slices have the basis length.
    fn apply(&self, x: &[C64], y: &mut [C64]);

    fn dim(&self) -> usize {
        self.basis().len()
    }

    fn matvec(&self, psi: &StateVector) -> Result<StateVector> {
        if !psi.basis().same_space(self.basis()) {
            return Err(Error::BasisMismatch(
                "operator and state live in different bases".into(),
            ));
        }
        let mut y = vec![C64::new(0.0, 0.0); self.dim()];
        self.apply(psi.amplitudes(), &mut y);
        StateVector::new(self.basis().clone(), y)
    }

    /// `⟨ψ|H|ψ⟩`.
    fn expectation(&self, psi: &StateVector) -> Result<C64> {
        psi.inner(&self.matvec(psi)?)
    }
}

/// Compressed-row Hermitian-checked operator.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    basis: Arc<Basis>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
    hermitian: bool,
}

impl SparseOperator {
    /// Sorts `(row, col, value)` triplets, merges duplicates and drops exact
    /// zeros.
    pub fn from_triplets(
        basis: Arc<Basis>,
        mut triplets: Vec<(usize, usize, C64)>,
    ) -> Result<Self> {
        let n = basis.len();
        if let Some(&(r, c, _)) = triplets.iter().find(|t| t.0 >= n || t.1 >= n) {
            return Err(Error::BasisMismatch(format!(
                "entry ({r}, {c}) outside dimension {n}"
            )));
        }
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut merged: Vec<(usize, usize, C64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|t| t.2 != C64::new(0.0, 0.0));

        let mut row_ptr = vec![0usize; n + 1];
        for &(r, _, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let cols = merged.iter().map(|t| t.1).collect();
        let vals = merged.iter().map(|t| t.2).collect();
        let mut op = Self {
            basis,
            row_ptr,
            cols,
            vals,
            hermitian: false,
        };
        op.hermitian = op.hermiticity_defect() < 1e-14;
        Ok(op)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_real(&self) -> bool {
        self.vals.iter().all(|v| v.im == 0.0)
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Stored entry `(row, col)`, zero if absent.
    pub fn get(&self, row: usize, col: usize) -> C64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[range.clone()].binary_search(&col) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// Row-major iteration over stored entries.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.basis.len()).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    /// Largest `|H_rc − conj(H_cr)|` over stored entries.
    pub fn hermiticity_defect(&self) -> f64 {
        self.entries()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.basis.len())
            .map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<C64> {
        let n = self.basis.len();
        let mut m = nalgebra::DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// `Σ w_i H_i` over operators on one basis.
    pub fn scaled_sum(terms: &[(f64, &SparseOperator)]) -> Result<SparseOperator> {
        let basis = match terms.first() {
            Some((_, op)) => op.basis.clone(),
            None => return domain("empty operator sum"),
        };
        let mut triplets = Vec::new();
        for (w, op) in terms {
            if !op.basis.same_space(&basis) {
                return Err(Error::BasisMismatch(
                    "operator sum over different bases".into(),
                ));
            }
            triplets.extend(op.entries().map(|(r, c, v)| (r, c, v * *w)));
        }
        SparseOperator::from_triplets(basis, triplets)
    }

    /// `scale · I` on a basis.
    pub fn identity(basis: Arc<Basis>, scale: f64) -> Result<SparseOperator> {
        let triplets = (0..basis.len())
            .map(|i| (i, i, C64::new(scale, 0.0)))
            .collect();
        SparseOperator::from_triplets(basis, triplets)
    }
}

impl LinearOperator for SparseOperator {
    fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let row = |(r, out): (usize, &mut C64)| {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        };
        if y.len() >= PARALLEL_ROWS {
            y.par_iter_mut().enumerate().for_each(row);
        } else {
            y.iter_mut().enumerate().for_each(row);
        }
    }
}

/// Which lattice Hamiltonian a connection generator describes.
#[derive(Clone, Copy, Debug)]
enum Lattice {
    Full(ModelParams),
    Effective {
        couplings: EffectiveCouplings,
        sites: usize,
    },
}

/// Regenerates Hamiltonian entries from the bitmask rules on every
/// application instead of storing them.
#[derive(Clone, Debug)]
pub struct MatrixFreeHamiltonian {
    basis: Arc<Basis>,
    lattice: Lattice,
}

impl MatrixFreeHamiltonian {
    pub fn full(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            basis: Basis::full(params.sites, params.n_a, params.n_b)?,
            lattice: Lattice::Full(*params),
        })
    }

    pub fn effective(params: &ModelParams) -> Result<Self> {
        Self::pair_model(params.sites, params.pair_count()?, params.effective()?)
    }

    /// Effective model given directly by its couplings.
    pub fn pair_model(sites: usize, pairs: usize, couplings: EffectiveCouplings) -> Result<Self> {
        if !(couplings.pair_hopping.is_finite() && couplings.pair_binding.is_finite()) {
            return domain("effective couplings must be finite");
        }
        Ok(Self {
            basis: Basis::pair(sites, pairs)?,
            lattice: Lattice::Effective { couplings, sites },
        })
    }

    /// `H|i⟩ = Σ value·|target⟩`, duplicates not merged.
    fn connections(&self, index: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        match self.lattice {
            Lattice::Full(p) => full_connections(&self.basis, &p, index, out),
            Lattice::Effective { couplings, sites } => {
                effective_connections(&self.basis, couplings, sites, index, out)
            }
        }
    }

    pub fn to_sparse(&self) -> Result<SparseOperator> {
        let mut triplets = Vec::new();
        let mut conn = Vec::new();
        for i in 0..self.basis.len() {
            self.connections(i, &mut conn);
            triplets.extend(conn.iter().map(|&(j, v)| (j, i, C64::new(v, 0.0))));
        }
        SparseOperator::from_triplets(self.basis.clone(), triplets)
    }
}

impl LinearOperator for MatrixFreeHamiltonian {
    fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        // The lattice Hamiltonians are real symmetric, so the connections of
        // |i⟩ are also row i: (Hx)_i = Σ_j H_ji x_j.
        let row = |(i, out): (usize, &mut C64), conn: &mut Vec<(usize, f64)>| {
            self.connections(i, conn);
            *out = conn.iter().map(|&(j, v)| x[j] * v).sum();
        };
        if y.len() >= PARALLEL_ROWS {
            y.par_iter_mut()
                .enumerate()
                .for_each_init(Vec::new, |conn, item| row(item, conn));
        } else {
            let mut conn = Vec::new();
            y.iter_mut()
                .enumerate()
                .for_each(|item| row(item, &mut conn));
        }
    }
}

fn full_connections(basis: &Basis, p: &ModelParams, index: usize, out: &mut Vec<(usize, f64)>) {
    let d = p.sites;
    let c = basis.full_config(index);
    let mut diag = 0.0;
    let occ = |m: u32, k: usize| (m >> k & 1) as f64;
    for k in 0..d {
        let k1 = (k + 1) % d;
        if p.hopping != 0.0 {
            for (hop_in, hop_out) in [
                (FermionOp::CreateA(k), FermionOp::AnnihilateA(k1)),
                (FermionOp::CreateA(k1), FermionOp::AnnihilateA(k)),
                (FermionOp::CreateB(k), FermionOp::AnnihilateB(k1)),
                (FermionOp::CreateB(k1), FermionOp::AnnihilateB(k)),
            ] {
                if let Some((target, sign)) = apply_fermion_string(&[hop_in, hop_out], c) {
                    let j = basis
                        .index_of_full(target)
                        .expect("hopping conserves particle numbers");
                    out.push((j, -p.hopping * sign as f64));
                }
            }
        }
        diag -= p.onsite * occ(c.a, k) * occ(c.b, k);
        let nn = match p.bond {
            NeighbourBond::Symmetric => occ(c.a, k) * occ(c.b, k1) + occ(c.b, k) * occ(c.a, k1),
            NeighbourBond::Directed => occ(c.a, k) * occ(c.b, k1),
        };
        diag -= p.neighbour * nn;
    }
    if diag != 0.0 {
        out.push((index, diag));
    }
}

fn effective_connections(
    basis: &Basis,
    g: EffectiveCouplings,
    d: usize,
    index: usize,
    out: &mut Vec<(usize, f64)>,
) {
    let c = basis.pair_config(index);
    let mut diag = 0.0;
    for k in 0..d {
        let k1 = (k + 1) % d;
        if g.pair_hopping != 0.0 {
            for (to, from) in [(k, k1), (k1, k)] {
                let moved = apply_pair_op(PairOp::Annihilate(from), c)
                    .and_then(|(c1, _)| apply_pair_op(PairOp::Create(to), c1));
                if let Some((target, _)) = moved {
                    let j = basis
                        .index_of_pair(target)
                        .expect("hopping conserves pair number");
                    out.push((j, -g.pair_hopping));
                }
            }
        }
        if c.occupied(k) && c.occupied(k1) {
            diag -= g.pair_binding;
        }
    }
    if diag != 0.0 {
        out.push((index, diag));
    }
}

/// `H = J·H₀ + U·H_p + γ·H_nn` on the full two-species basis.
pub fn build_full_hamiltonian(params: &ModelParams) -> Result<SparseOperator> {
    MatrixFreeHamiltonian::full(params)?.to_sparse()
}

/// `H_eff` on the pair basis, without the constant `−N(U + 4J²/U)`.
pub fn build_effective_hamiltonian(params: &ModelParams) -> Result<SparseOperator> {
    MatrixFreeHamiltonian::effective(params)?.to_sparse()
}

/// `H_eff` for given `(J̄, γ̄)`; `γ̄` may be negative.
pub fn build_pair_hamiltonian(
    sites: usize,
    pairs: usize,
    couplings: EffectiveCouplings,
) -> Result<SparseOperator> {
    MatrixFreeHamiltonian::pair_model(sites, pairs, couplings)?.to_sparse()
}

/// Diagonal operator `Σ_k n^A_k n^B_k` on a full basis (counts doubly
/// occupied sites).
pub fn double_occupancy_operator(basis: Arc<Basis>) -> Result<SparseOperator> {
    if !matches!(basis.kind(), BasisKind::Full { .. }) {
        return domain("double occupancy needs a full basis");
    }
    let triplets = (0..basis.len())
        .map(|i| {
            (
                i,
                i,
                C64::new(basis.full_config(i).doubly_occupied() as f64, 0.0),
            )
        })
        .collect();
    SparseOperator::from_triplets(basis, triplets)
}

/// The two open relative-coordinate chains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainKind {
    /// One A and one B fermion; sites `s ∈ [−S, S]`, attraction at `s = 0`.
    TwoFermion,
    /// Two hard-core pairs; sites `s ∈ [1, S]`, attraction at `s = 1`.
    TwoPair,
}

/// Tridiagonal chain in the relative coordinate at centre-of-mass
/// momentum index `r`, with open ends at the cutoff.
pub fn build_relative_chain(
    kind: ChainKind,
    params: &ModelParams,
    r: i64,
    cutoff: usize,
) -> Result<SparseOperator> {
    params.validate()?;
    if cutoff < 3 {
        return domain(format!("chain cutoff must be at least 3, got {cutoff}"));
    }
    let s = cutoff as i64;
    let (basis, hop, well) = match kind {
        ChainKind::TwoFermion => (Basis::chain(-s, s)?, params.hopping, params.onsite),
        ChainKind::TwoPair => {
            let g = params.effective()?;
            (Basis::chain(1, s)?, g.pair_hopping, g.pair_binding)
        }
    };
    let amplitude = -(C64::new(1.0, 0.0) + lattice_phase(1, r, params.sites)) * hop;
    let mut triplets = Vec::new();
    for i in 0..basis.len() - 1 {
        triplets.push((i + 1, i, amplitude));
        triplets.push((i, i + 1, amplitude.conj()));
    }
    let well_site = match kind {
        ChainKind::TwoFermion => cutoff,
        ChainKind::TwoPair => 0,
    };
    triplets.push((well_site, well_site, C64::new(-well, 0.0)));
    SparseOperator::from_triplets(basis, triplets)
}

/// Pair-sector image of a full-basis configuration, if it has one.
pub fn as_pair_config(c: FullConfig) -> Option<PairConfig> {
    (c.a == c.b).then_some(PairConfig(c.a as u64))
}
