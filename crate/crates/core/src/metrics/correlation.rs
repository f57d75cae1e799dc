//! One- and two-point functions of pair states: the single-pair reduced
//! density matrix, its purity, mean occupations and `g²`.
//!
//! Every function accepts a set of states and treats it as the equal-weight
//! mixture `(1/g) Σ |ψ⟩⟨ψ|`, which is how degenerate ground spaces enter.

use nalgebra::DMatrix;

use crate::error::{domain, Result};
use crate::fock::{apply_pair_op, PairOp, StateVector};
use crate::C64;

fn pair_states(states: &[StateVector]) -> Result<(usize, usize)> {
    let first = match states.first() {
        Some(s) => s,
        None => return domain("no states given"),
    };
    let n = match first.basis().pairs() {
        Some(n) => n,
        None => return domain("correlations need pair-space states"),
    };
    if states.iter().any(|s| !s.basis().same_space(first.basis())) {
        return domain("states live in different bases");
    }
    Ok((first.basis().sites(), n))
}

/// Single-pair reduced density matrix and its purity.
#[derive(Clone, Debug)]
pub struct PairRdm {
    /// `ρ_ij = (1/N) ⟨η†_i η_j⟩`.
    pub rdm: DMatrix<C64>,
    /// `P₁ = Σ_ij |ρ_ij|²`.
    pub purity: f64,
}

/// `ρ_ij = (1/N)⟨η†_i η_j⟩` averaged over `states`.
pub fn single_pair_rdm(states: &[StateVector]) -> Result<PairRdm> {
    let (d, n) = pair_states(states)?;
    if n == 0 {
        return domain("the vacuum has no single-pair density matrix");
    }
    let mut rho = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    let weight = 1.0 / (n as f64 * states.len() as f64);
    for psi in states {
        let basis = psi.basis();
        let amps = psi.amplitudes();
        for (x, &ax) in amps.iter().enumerate() {
            if ax == C64::new(0.0, 0.0) {
                continue;
            }
            let cx = basis.pair_config(x);
            for j in (0..d).filter(|&j| cx.occupied(j)) {
                let (without, _) = apply_pair_op(PairOp::Annihilate(j), cx).expect("site occupied");
                for i in 0..d {
                    if let Some((cy, _)) = apply_pair_op(PairOp::Create(i), without) {
                        let y = basis.index_of_pair(cy).expect("pair number conserved");
                        rho[(i, j)] += amps[y].conj() * ax * weight;
                    }
                }
            }
        }
    }
    let purity = rho.iter().map(|z| z.norm_sqr()).sum();
    Ok(PairRdm { rdm: rho, purity })
}

/// `⟨n_i⟩` for every site, averaged over `states`.
pub fn mean_occupation(states: &[StateVector]) -> Result<Vec<f64>> {
    let (d, _) = pair_states(states)?;
    let mut occ = vec![0.0; d];
    for psi in states {
        for (x, a) in psi.amplitudes().iter().enumerate() {
            let c = psi.basis().pair_config(x);
            for (k, o) in occ.iter_mut().enumerate() {
                if c.occupied(k) {
                    *o += a.norm_sqr();
                }
            }
        }
    }
    occ.iter_mut().for_each(|o| *o /= states.len() as f64);
    Ok(occ)
}

/// `⟨ψ|η†_i η†_j η_i η_j|ψ⟩` by explicit operator application.
fn density_density(psi: &StateVector, i: usize, j: usize) -> C64 {
    let basis = psi.basis();
    let amps = psi.amplitudes();
    let mut acc = C64::new(0.0, 0.0);
    for (x, &ax) in amps.iter().enumerate() {
        let c = basis.pair_config(x);
        let out = apply_pair_op(PairOp::Annihilate(j), c)
            .and_then(|(c, _)| apply_pair_op(PairOp::Annihilate(i), c))
            .and_then(|(c, _)| apply_pair_op(PairOp::Create(j), c))
            .and_then(|(c, _)| apply_pair_op(PairOp::Create(i), c));
        if let Some((cy, phase)) = out {
            let y = basis.index_of_pair(cy).expect("pair number conserved");
            acc += amps[y].conj() * ax * phase as f64;
        }
    }
    acc
}

/// `g²(i, j) = ⟨η†_i η†_j η_i η_j⟩ / ⟨n_i⟩²`, averaged over `states`.
///
/// Warns when the occupations are not uniform, since the normalization then
/// depends on the choice of `i`.
pub fn g2(states: &[StateVector], i: usize, j: usize) -> Result<f64> {
    let (d, n) = pair_states(states)?;
    if i >= d || j >= d {
        return domain(format!("sites ({i}, {j}) outside a ring of {d}"));
    }
    let occ = mean_occupation(states)?;
    let uniform = n as f64 / d as f64;
    if occ.iter().any(|o| (o - uniform).abs() > 1e-10) {
        log::warn!("g2 of a state without uniform occupation N/d");
    }
    if occ[i] <= 0.0 {
        return domain(format!("site {i} is never occupied"));
    }
    let num: f64 = states
        .iter()
        .map(|s| density_density(s, i, j).re)
        .sum::<f64>()
        / states.len() as f64;
    Ok(num / (occ[i] * occ[i]))
}

/// `g²(0, δ)` for `δ = 0 … ⌊d/2⌋`.
pub fn g2_profile(states: &[StateVector]) -> Result<Vec<f64>> {
    let (d, _) = pair_states(states)?;
    (0..=d / 2).map(|delta| g2(states, 0, delta)).collect()
}
