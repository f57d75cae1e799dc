//! Composite-boson quality measures.

mod chi;
mod correlation;
mod ledger;
mod schmidt;
mod square_norm;

pub use chi::{
    chi_closed, chi_oracle, chi_ratio, chi_ratio_lower_bound, ladder_report, to_f64, LadderReport,
};
pub use correlation::{g2, g2_profile, mean_occupation, single_pair_rdm, PairRdm};
pub use ledger::{
    energy_ledger, ledger_partition, ledger_threshold, ledger_vs_exact, partition_energy,
    LedgerCheck, LedgerRow, LedgerThreshold,
};
pub use schmidt::{chi_from_schmidt, pair_amplitude_matrix, schmidt_spectrum, SchmidtSpectrum};
pub use square_norm::{
    maximally_entangled_block, square_norm, square_norm_test, CreationOperator, SquareNormReport,
    MAX_MODES,
};

use crate::error::{domain, Result};
use crate::fock::StateVector;

/// `|⟨target|ψ⟩|²`.
pub fn fidelity(psi: &StateVector, target: &StateVector) -> Result<f64> {
    Ok(target.inner(psi)?.norm_sqr())
}

/// Squared norm of the projection of `target` onto the span of the
/// orthonormal `space`.
pub fn fidelity_with_space(target: &StateVector, space: &[StateVector]) -> Result<f64> {
    if space.is_empty() {
        return domain("empty space");
    }
    space.iter().map(|v| fidelity(target, v)).sum()
}

/// Average over `states` of their squared projection onto `space`.
pub fn space_fidelity(states: &[StateVector], space: &[StateVector]) -> Result<f64> {
    if states.is_empty() {
        return domain("no states given");
    }
    let total: f64 = states
        .iter()
        .map(|s| fidelity_with_space(s, space))
        .sum::<Result<f64>>()?;
    Ok(total / states.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_c_sr, build_partition_state, build_q_sr, Partition};
    use crate::C64;

    #[test]
    fn fidelity_basics() {
        let q = build_q_sr(8, 1, 0).unwrap();
        assert!((fidelity(&q, &q).unwrap() - 1.0).abs() < 1e-15);
        let phased = q.scaled(C64::from_polar(1.0, 0.7));
        assert!((fidelity(&phased, &q).unwrap() - 1.0).abs() < 1e-15);
        assert!((fidelity(&q, &phased).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn adjacent_pairs_overlap_with_uniform_state() {
        // |⟨q_{1,0}|1+1⟩|² = d / C(d, 2)
        for d in [6usize, 8, 10] {
            let singles = build_partition_state(d, &Partition::singles(2).unwrap())
                .unwrap()
                .0;
            let q = build_q_sr(d, 1, 0).unwrap();
            let expect = d as f64 / (d * (d - 1) / 2) as f64;
            assert!((fidelity(&singles, &q).unwrap() - expect).abs() < 1e-14);
        }
        let c2 = build_c_sr(8, 0, 0, 2)
            .unwrap()
            .project_to_pair_sector()
            .unwrap();
        let q = build_q_sr(8, 1, 0).unwrap();
        assert!((fidelity(&c2, &q).unwrap() - 8.0 / 28.0).abs() < 1e-14);
    }

    #[test]
    fn space_fidelity_counts_whole_space() {
        let a = build_q_sr(8, 1, 0).unwrap();
        let b = build_q_sr(8, 2, 0).unwrap();
        let mix = a.add(&b).unwrap().normalized().unwrap();
        assert!((fidelity_with_space(&mix, &[a.clone(), b]).unwrap() - 1.0).abs() < 1e-14);
        assert!((fidelity_with_space(&mix, &[a]).unwrap() - 0.5).abs() < 1e-14);
    }
}
