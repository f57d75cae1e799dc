//! Subcommand implementations. Each one renders a [`Csv`] in memory so that
//! the bytes written depend only on the configuration.

use rayon::prelude::*;

use super::config::{IntRange, ModelKind, SweepConfig, Target};
use super::csv::{num, Csv};
use crate::ansatz::{build_block, build_c_sr, build_partition_state, build_q_sr, Partition};
use crate::error::{Error, Result};
use crate::fock::{BasisKind, StateVector};
use crate::metrics::{
    chi_closed, chi_oracle, chi_ratio, chi_ratio_lower_bound, energy_ledger, fidelity_with_space,
    g2_profile, ledger_threshold, single_pair_rdm, to_f64,
};
use crate::model::{
    build_effective_hamiltonian, build_full_hamiltonian, ModelParams, SparseOperator,
};
use crate::solve::{ground_space, GroundSpace, SolverOptions};

/// Largest ring on which `chi` also runs the enumeration oracle.
pub const CHI_ORACLE_MAX_SITES: usize = 16;

fn model_params(cfg: &SweepConfig, scaled: f64) -> Result<ModelParams> {
    let gamma = ModelParams::gamma_from_scaled(scaled, cfg.hopping, cfg.onsite)?;
    let p = ModelParams::pairs(cfg.d, cfg.n_a, cfg.hopping, cfg.onsite, gamma)
        .with_species(cfg.n_a, cfg.n_b);
    p.validate()?;
    Ok(p)
}

fn hamiltonian(cfg: &SweepConfig, scaled: f64) -> Result<SparseOperator> {
    let p = model_params(cfg, scaled)?;
    match cfg.model {
        ModelKind::Full => build_full_hamiltonian(&p),
        ModelKind::Effective => build_effective_hamiltonian(&p),
    }
}

fn solve_point(cfg: &SweepConfig, scaled: f64) -> Result<GroundSpace> {
    let opts = SolverOptions {
        tol_deg: cfg.tol_deg,
        tol_res: cfg.tol_res,
        ..SolverOptions::default()
    };
    let h = hamiltonian(cfg, scaled)?;
    let mut gs = ground_space(&h, &opts)?;
    gs.vectors = gs
        .vectors
        .iter()
        .map(StateVector::with_phase_convention)
        .collect();
    Ok(gs)
}

/// Evaluates `f` on every grid point with at most `jobs` threads; results
/// come back in grid order.
fn par_grid<T, F>(jobs: usize, xs: &[f64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} worker threads: {e}")))?;
    pool.install(|| xs.par_iter().map(|&x| f(x)).collect())
}

fn describe(cfg: &SweepConfig) -> String {
    format!(
        "model={} d={} n_a={} n_b={} J={} U={}",
        cfg.model,
        cfg.d,
        cfg.n_a,
        cfg.n_b,
        num(cfg.hopping),
        num(cfg.onsite)
    )
}

/// The target as a state in the basis of the configured model.
pub fn target_state(target: &Target, cfg: &SweepConfig) -> Result<StateVector> {
    let n = cfg.pairs()?;
    let d = cfg.d;
    let need = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "target {} {what} (N = {n})",
                target.column()
            )))
        }
    };
    let pair_state = match target {
        Target::CSquared { s, r } => {
            need(n == 2, "needs N = 2")?;
            let c = build_c_sr(d, *s, *r, 2)?;
            return match cfg.model {
                ModelKind::Full => Ok(c),
                ModelKind::Effective => c.project_to_pair_sector(),
            };
        }
        Target::Q { s, r } => {
            need(n == 2, "needs N = 2")?;
            build_q_sr(d, *s, *r)?
        }
        Target::Block(m) => {
            need(*m == n, "must hold all pairs")?;
            build_block(d, *m)?
        }
        Target::Partition(p) => {
            need(p.total() == n, "must hold all pairs")?;
            build_partition_state(d, p)?.0
        }
    };
    match cfg.model {
        ModelKind::Full => pair_state.embed_in_full(),
        ModelKind::Effective => Ok(pair_state),
    }
}

/// Ground-space vectors restricted to the pair sector and renormalized;
/// components with no pair-sector weight are dropped.
fn pair_sector_states(gs: &GroundSpace) -> Result<Vec<StateVector>> {
    let mut out = Vec::new();
    for v in &gs.vectors {
        let p = match v.basis().kind() {
            BasisKind::Full { .. } => v.project_to_pair_sector()?,
            _ => v.clone(),
        };
        if p.norm() > 1e-12 {
            out.push(p.normalized()?);
        }
    }
    if out.is_empty() {
        return Err(Error::Domain(
            "ground space has no pair-sector weight".into(),
        ));
    }
    Ok(out)
}

fn mask_label(basis_kind: BasisKind, key: u64) -> String {
    match basis_kind {
        BasisKind::Full { .. } => format!("0x{:x}:0x{:x}", key >> 32, key & 0xffff_ffff),
        _ => format!("0x{key:x}"),
    }
}

pub fn ground_state(cfg: &SweepConfig) -> Result<Csv> {
    let gs = solve_point(cfg, cfg.gamma_scaled)?;
    let mut csv = Csv::new(["vector", "mask", "re", "im"]);
    csv.comment(describe(cfg));
    csv.comment(format!("gammaU/J2={}", num(cfg.gamma_scaled)));
    csv.comment(format!("energy={}", num(gs.energy)));
    csv.comment(format!("degeneracy={}", gs.degeneracy()));
    if cfg.model == ModelKind::Effective {
        let n = cfg.pairs()?;
        let dropped = crate::model::EffectiveCouplings::dropped_constant(
            &model_params(cfg, cfg.gamma_scaled)?,
            n,
        );
        csv.comment(format!("dropped_constant={}", num(dropped)));
    }
    for (v, psi) in gs.vectors.iter().enumerate() {
        let kind = psi.basis().kind();
        for (i, a) in psi.amplitudes().iter().enumerate() {
            csv.row([
                v.to_string(),
                mask_label(kind, psi.basis().key(i)),
                num(a.re),
                num(a.im),
            ]);
        }
    }
    Ok(csv)
}

pub fn fidelity_scan(cfg: &SweepConfig) -> Result<Csv> {
    let targets = match &cfg.targets {
        Some(t) => t.clone(),
        None => Partition::all(cfg.pairs()?)
            .into_iter()
            .map(Target::Partition)
            .collect(),
    };
    if targets.is_empty() {
        return Err(Error::Config("no targets given".into()));
    }
    let states: Vec<StateVector> = targets
        .iter()
        .map(|t| target_state(t, cfg))
        .collect::<Result<_>>()?;
    let xs = cfg.grid.values();
    let rows = par_grid(cfg.jobs, &xs, |x| {
        let gs = solve_point(cfg, x)?;
        let fids: Vec<f64> = states
            .iter()
            .map(|s| fidelity_with_space(s, &gs.vectors))
            .collect::<Result<_>>()?;
        Ok((gs.degeneracy(), fids))
    })?;

    let mut header = vec!["gamma".to_string(), "gammaU/J2".to_string()];
    header.extend(targets.iter().map(Target::column));
    let mut csv = Csv::new(header);
    csv.comment(describe(cfg));
    let degenerate: Vec<String> = xs
        .iter()
        .zip(&rows)
        .filter(|(_, (deg, _))| *deg > 1)
        .map(|(x, (deg, _))| format!("{}:{deg}", num(*x)))
        .collect();
    if !degenerate.is_empty() {
        csv.comment(format!(
            "degenerate ground space at gammaU/J2 = {}",
            degenerate.join(" ")
        ));
    }
    for (&x, (_, fids)) in xs.iter().zip(&rows) {
        let gamma = ModelParams::gamma_from_scaled(x, cfg.hopping, cfg.onsite)?;
        let mut row = vec![num(gamma), num(x)];
        row.extend(fids.iter().map(|&f| num(f)));
        csv.row(row);
    }
    Ok(csv)
}

pub fn chi_table(d_range: IntRange, n_range: IntRange, m_range: IntRange) -> Result<Csv> {
    let mut csv = Csv::new([
        "d",
        "N",
        "M",
        "chi_closed",
        "chi_closed_exact",
        "chi_oracle_exact",
        "ratio",
        "lower_bound",
    ]);
    csv.comment(format!(
        "chi_oracle_exact is computed for d <= {CHI_ORACLE_MAX_SITES}"
    ));
    for d in d_range.iter().filter(|&d| d > 0) {
        for n in n_range.iter() {
            for m in m_range.iter().filter(|&m| m > 0) {
                let closed = chi_closed(d, n, m)?;
                let oracle = if d <= CHI_ORACLE_MAX_SITES {
                    chi_oracle(d, n, m)?.to_string()
                } else {
                    String::new()
                };
                let ratio = chi_ratio(d, n, m)?
                    .map(|q| num(to_f64(&q)))
                    .unwrap_or_default();
                let bound = if (n + 1) * m <= d {
                    num(chi_ratio_lower_bound(d, n, m))
                } else {
                    String::new()
                };
                csv.row([
                    d.to_string(),
                    n.to_string(),
                    m.to_string(),
                    num(to_f64(&closed)),
                    closed.to_string(),
                    oracle,
                    ratio,
                    bound,
                ]);
            }
        }
    }
    Ok(csv)
}

/// `1 − P₁` of the uniform state, the value reached at `γU/J² = 4`.
pub fn uniform_purity(d: usize, n: usize) -> f64 {
    let (d, n) = (d as f64, n as f64);
    1.0 / d + (d - n).powi(2) / (d * (d - 1.0))
}

pub fn purity_scan(cfg: &SweepConfig) -> Result<Csv> {
    let n = cfg.pairs()?;
    let block = single_pair_rdm(&[build_block(cfg.d, n)?])?.purity;
    let xs = cfg.grid.values();
    let purities = par_grid(cfg.jobs, &xs, |x| {
        let gs = solve_point(cfg, x)?;
        Ok(single_pair_rdm(&pair_sector_states(&gs)?)?.purity)
    })?;
    let mut csv = Csv::new([
        "gammaU/J2",
        "one_minus_p1",
        "one_minus_p1_uniform",
        "one_minus_p1_block",
    ]);
    csv.comment(describe(cfg));
    csv.comment("one_minus_p1_uniform: closed form for the uniform state reached at gammaU/J2 = 4");
    csv.comment("one_minus_p1_block: block state, the large-gamma plateau (direct computation)");
    let uniform = num(1.0 - uniform_purity(cfg.d, n));
    let plateau = num(1.0 - block);
    for (&x, p) in xs.iter().zip(&purities) {
        csv.row([num(x), num(1.0 - p), uniform.clone(), plateau.clone()]);
    }
    Ok(csv)
}

pub fn g2_scan(cfg: &SweepConfig) -> Result<Csv> {
    cfg.pairs()?;
    let xs = cfg.grid.values();
    let profiles = par_grid(cfg.jobs, &xs, |x| {
        let gs = solve_point(cfg, x)?;
        g2_profile(&pair_sector_states(&gs)?)
    })?;
    let mut csv = Csv::new(["gammaU/J2", "separation", "g2"]);
    csv.comment(describe(cfg));
    for (&x, profile) in xs.iter().zip(&profiles) {
        for (delta, g) in profile.iter().enumerate() {
            csv.row([num(x), delta.to_string(), num(*g)]);
        }
    }
    Ok(csv)
}

pub fn energy_ledger_table(cfg: &SweepConfig) -> Result<Csv> {
    let n = cfg.pairs()?;
    let jbar = 2.0 * cfg.hopping * cfg.hopping / cfg.onsite;
    let threshold = ledger_threshold(n)?;
    let mut csv = Csv::new(["gammaU/J2", "M", "energy"]);
    csv.comment(format!(
        "N={n} J={} U={} Jbar={}",
        num(cfg.hopping),
        num(cfg.onsite),
        num(jbar)
    ));
    csv.comment(format!(
        "threshold gammabar/Jbar={} gammaU/J2={}",
        num(threshold.gammabar_over_jbar),
        num(threshold.gamma_u_over_j2)
    ));
    for x in cfg.grid.values() {
        // γ̄ = 2(γ − J̄) = J̄(γU/J² − 2)
        for row in energy_ledger(n, jbar, jbar * (x - 2.0))? {
            csv.row([num(x), row.m.to_string(), num(row.energy)]);
        }
    }
    let crossing = energy_ledger(n, jbar, jbar * threshold.gammabar_over_jbar)?;
    csv.row([
        num(threshold.gamma_u_over_j2),
        "threshold".to_string(),
        num(crossing[0].energy),
    ]);
    Ok(csv)
}
