//! Schmidt (Slater) decomposition of two-species pair wavefunctions.

use nalgebra::DMatrix;

use crate::error::{domain, Result};
use crate::fock::{BasisKind, StateVector};
use crate::C64;

/// Schmidt coefficients `λ_k` (non-increasing, summing to one) and the
/// purity `P = Σ λ_k²`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtSpectrum {
    pub lambdas: Vec<f64>,
    pub purity: f64,
}

impl SchmidtSpectrum {
    /// Spectrum from given weights, normalized to unit sum.
    pub fn from_weights(mut weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return domain("Schmidt weights must be finite and non-negative");
        }
        let total: f64 = weights.iter().sum();
        if total == 0.0 {
            return domain("all Schmidt weights vanish");
        }
        weights.iter_mut().for_each(|w| *w /= total);
        weights.sort_by(|a, b| b.total_cmp(a));
        let purity = weights.iter().map(|w| w * w).sum();
        Ok(Self {
            lambdas: weights,
            purity,
        })
    }

    /// `χ_N` implied by the spectrum.
    pub fn chi(&self, n: usize) -> f64 {
        chi_from_schmidt(&self.lambdas, n)
    }
}

/// Squared singular values of an amplitude matrix `ψ = Σ M_kl a†_k b†_l|0⟩`.
/// A matrix that is not Frobenius-normalized is normalized with a warning.
pub fn schmidt_spectrum(m: &DMatrix<C64>) -> Result<SchmidtSpectrum> {
    let frob = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if frob == 0.0 {
        return domain("zero amplitude matrix has no Schmidt decomposition");
    }
    if (frob - 1.0).abs() > 1e-12 {
        log::warn!("amplitude matrix has Frobenius norm {frob}; normalizing");
    }
    let scaled = m.map(|z| z / frob);
    let sv = scaled.singular_values();
    SchmidtSpectrum::from_weights(sv.iter().map(|s| s * s).collect())
}

/// Amplitude matrix `M_kl = ⟨a†_k b†_l 0|ψ⟩` of a one-A, one-B state.
pub fn pair_amplitude_matrix(psi: &StateVector) -> Result<DMatrix<C64>> {
    match psi.basis().kind() {
        BasisKind::Full { n_a: 1, n_b: 1 } => {}
        other => {
            return domain(format!(
                "amplitude matrix needs one A and one B fermion, got {other:?}"
            ))
        }
    }
    let d = psi.basis().sites();
    let mut m = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for (i, &a) in psi.amplitudes().iter().enumerate() {
        let c = psi.basis().full_config(i);
        // a†_k b†_l|0⟩ is already in canonical order: sign +1
        m[(c.a.trailing_zeros() as usize, c.b.trailing_zeros() as usize)] = a;
    }
    Ok(m)
}

/// `χ_N = N! e_N(λ)`, with the elementary symmetric polynomial evaluated by
/// the usual one-pass recursion.
pub fn chi_from_schmidt(lambdas: &[f64], n: usize) -> f64 {
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for &l in lambdas {
        for k in (1..=n).rev() {
            e[k] += l * e[k - 1];
        }
    }
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    factorial * e[n]
}
