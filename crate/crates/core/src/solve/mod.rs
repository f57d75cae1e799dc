//! Ground states: dense and iterative eigensolvers, the closed-form
//! two-body bound states, and the full-vs-effective model comparison.

mod analytic;
mod lanczos;

pub use analytic::{
    analytic_two_fermion, analytic_two_pair, chain_decay_ratios, tail_report, BoundStateSolution,
    TailReport,
};
pub use lanczos::{lanczos_lowest, LanczosOptions, Want};

use nalgebra::DMatrix;

use crate::error::{domain, Error, Result};
use crate::fock::StateVector;
use crate::metrics::space_fidelity;
use crate::model::{
    build_effective_hamiltonian, build_full_hamiltonian, EffectiveCouplings, LinearOperator,
    ModelParams, SparseOperator,
};
use crate::C64;

/// Dimension at and above which [`Method::Auto`] switches to Lanczos.
pub const DENSE_LIMIT: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Auto,
    Dense,
    Lanczos,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Eigenvalues within `tol_deg · max(1, |E₀|)` of `E₀` belong to the
    /// ground space.
    pub tol_deg: f64,
    /// Residual bound, relative to `max(1, ‖H‖)`.
    pub tol_res: f64,
    pub method: Method,
    pub lanczos: LanczosOptions,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol_deg: 1e-9,
            tol_res: 1e-10,
            method: Method::Auto,
            lanczos: LanczosOptions::default(),
        }
    }
}

impl SolverOptions {
    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }
}

/// Orthonormal basis of the lowest eigenspace.
#[derive(Clone, Debug)]
pub struct GroundSpace {
    pub energy: f64,
    pub vectors: Vec<StateVector>,
    /// Eigenvalue of each vector (all within the degeneracy tolerance).
    pub energies: Vec<f64>,
    /// Largest `‖Hv − E_v v‖` over the returned vectors.
    pub max_residual: f64,
}

impl GroundSpace {
    pub fn degeneracy(&self) -> usize {
        self.vectors.len()
    }

    /// The single ground state; `None` if the level is degenerate.
    pub fn unique(&self) -> Option<&StateVector> {
        match self.vectors.as_slice() {
            [v] => Some(v),
            _ => None,
        }
    }
}

/// All eigenpairs of a Hermitian operator, ascending, via dense
/// diagonalization.
pub fn dense_eigenpairs(h: &SparseOperator) -> Result<Vec<(f64, StateVector)>> {
    if !h.is_hermitian() {
        return domain("eigensolver needs a Hermitian operator");
    }
    let n = h.dim();
    let basis = h.basis().clone();
    let mut pairs: Vec<(f64, Vec<C64>)> = if h.is_real() {
        let m = DMatrix::from_fn(n, n, |r, c| h.get(r, c).re);
        let eig = m.symmetric_eigen();
        (0..n)
            .map(|k| {
                let v = eig
                    .eigenvectors
                    .column(k)
                    .iter()
                    .map(|&x| C64::new(x, 0.0))
                    .collect();
                (eig.eigenvalues[k], v)
            })
            .collect()
    } else {
        let eig = h.to_dense().symmetric_eigen();
        (0..n)
            .map(|k| {
                (
                    eig.eigenvalues[k],
                    eig.eigenvectors.column(k).iter().copied().collect(),
                )
            })
            .collect()
    };
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
        .into_iter()
        .map(|(e, v)| {
            Ok((
                e,
                StateVector::new(basis.clone(), v)?.with_phase_convention(),
            ))
        })
        .collect()
}

fn check_residuals(h: &SparseOperator, pairs: &[(f64, StateVector)], tol_res: f64) -> Result<f64> {
    let scale = h.max_row_sum().max(1.0);
    let mut worst: f64 = 0.0;
    for (e, v) in pairs {
        let r = h.matvec(v)?.add(&v.scaled(C64::new(-e, 0.0)))?.norm();
        worst = worst.max(r);
    }
    if worst > tol_res * scale {
        return Err(Error::Convergence {
            iterations: 0,
            residual: worst,
        });
    }
    Ok(worst)
}

fn use_dense(h: &SparseOperator, method: Method) -> bool {
    match method {
        Method::Dense => true,
        Method::Lanczos => false,
        Method::Auto => h.dim() < DENSE_LIMIT,
    }
}

/// Lowest eigenspace of a Hermitian operator, degeneracies resolved.
pub fn ground_space(h: &SparseOperator, opts: &SolverOptions) -> Result<GroundSpace> {
    if !h.is_hermitian() {
        return domain("ground_space needs a Hermitian operator");
    }
    if h.dim() == 0 {
        return domain("empty basis");
    }
    let pairs: Vec<(f64, StateVector)> = if use_dense(h, opts.method) {
        let all = dense_eigenpairs(h)?;
        let e0 = all[0].0;
        let tol = opts.tol_deg * e0.abs().max(1.0);
        all.into_iter()
            .take_while(|(e, _)| *e - e0 <= tol)
            .collect()
    } else {
        let mut lopts = opts.lanczos;
        lopts.tol_res = opts.tol_res;
        let found = lanczos_lowest(
            h,
            Want::GroundSpace {
                tol_deg_rel: opts.tol_deg,
            },
            h.max_row_sum(),
            &lopts,
        )?;
        found
            .into_iter()
            .map(|(e, v)| {
                Ok((
                    e,
                    StateVector::new(h.basis().clone(), v)?.with_phase_convention(),
                ))
            })
            .collect::<Result<_>>()?
    };
    let max_residual = check_residuals(h, &pairs, opts.tol_res)?;
    Ok(GroundSpace {
        energy: pairs[0].0,
        energies: pairs.iter().map(|p| p.0).collect(),
        vectors: pairs.into_iter().map(|p| p.1).collect(),
        max_residual,
    })
}

/// The `k` lowest eigenvalues (with multiplicity), ascending.
pub fn lowest_eigenvalues(h: &SparseOperator, k: usize, opts: &SolverOptions) -> Result<Vec<f64>> {
    if use_dense(h, opts.method) {
        Ok(dense_eigenpairs(h)?
            .into_iter()
            .take(k)
            .map(|p| p.0)
            .collect())
    } else {
        let mut lopts = opts.lanczos;
        lopts.tol_res = opts.tol_res;
        Ok(lanczos_lowest(h, Want::Count(k), h.max_row_sum(), &lopts)?
            .into_iter()
            .map(|p| p.0)
            .collect())
    }
}

/// Comparison of the full model, restricted to low energies, with the
/// effective pair model.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    /// Lowest eigenvalues of `H_eff`.
    pub effective: Vec<f64>,
    /// Lowest eigenvalues of the full model minus the dropped constant.
    pub full_shifted: Vec<f64>,
    /// Largest `|effective − full_shifted|`.
    pub max_energy_deviation: f64,
    /// Squared projection of the full ground space, restricted to the pair
    /// sector, onto the effective ground space. `None` when `J = 0`.
    pub fidelity: Option<f64>,
    pub full_degeneracy: usize,
    pub effective_degeneracy: usize,
    /// Set when there is no hopping and the ground level is massively
    /// degenerate.
    pub degenerate: bool,
}

/// Diagonalizes both models and compares their `k` lowest levels and
/// ground spaces. Requires `U/J ≥ 100`.
pub fn spectral_equivalence_check(
    params: &ModelParams,
    k: usize,
    opts: &SolverOptions,
) -> Result<EquivalenceReport> {
    params.validate()?;
    let n = params.pair_count()?;
    if params.hopping > 0.0 && params.onsite < 100.0 * params.hopping {
        return domain("effective model comparison needs U/J ≥ 100");
    }
    let full = build_full_hamiltonian(params)?;
    let eff = build_effective_hamiltonian(params)?;
    let shift = EffectiveCouplings::dropped_constant(params, n);

    let effective = lowest_eigenvalues(&eff, k, opts)?;
    let full_shifted: Vec<f64> = lowest_eigenvalues(&full, k, opts)?
        .into_iter()
        .map(|e| e - shift)
        .collect();
    let max_energy_deviation = effective
        .iter()
        .zip(&full_shifted)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let gs_full = ground_space(&full, opts)?;
    let gs_eff = ground_space(&eff, opts)?;
    let degenerate = params.hopping == 0.0;
    let fidelity = if degenerate {
        None
    } else {
        let projected: Vec<StateVector> = gs_full
            .vectors
            .iter()
            .map(|v| v.project_to_pair_sector())
            .collect::<Result<_>>()?;
        Some(space_fidelity(&projected, &gs_eff.vectors)?)
    };
    Ok(EquivalenceReport {
        effective,
        full_shifted,
        max_energy_deviation,
        fidelity,
        full_degeneracy: gs_full.degeneracy(),
        effective_degeneracy: gs_eff.degeneracy(),
        degenerate,
    })
}
