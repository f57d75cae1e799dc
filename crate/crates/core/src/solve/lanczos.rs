//! Lanczos iteration with full re-orthogonalization, explicit restarts and
//! locking of converged vectors.
//!
//! Each converged eigenvector is locked and the next search runs in its
//! orthogonal complement, so degenerate levels are resolved one vector at a
//! time. Start vectors come from a fixed-seed generator: the run is
//! reproducible, yet the start has weight in every symmetry sector (a
//! uniform start would only see the translation-invariant, reflection-even
//! sector).

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::LinearOperator;
use crate::C64;

const SEED: u64 = 0x00c0_b050;

/// How many eigenpairs to extract.
#[derive(Clone, Copy, Debug)]
pub enum Want {
    /// The `k` lowest eigenpairs.
    Count(usize),
    /// Every eigenpair within `tol` of the lowest eigenvalue.
    GroundSpace { tol_deg_rel: f64 },
}

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    pub krylov_dim: usize,
    pub max_matvecs: usize,
    /// Residual target, relative to `max(1, scale)`.
    pub tol_res: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            krylov_dim: 120,
            max_matvecs: 200_000,
            tol_res: 1e-10,
        }
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Two passes of classical Gram–Schmidt against `basis`.
fn orthogonalize<'a>(w: &mut [C64], basis: impl Iterator<Item = &'a Vec<C64>> + Clone) {
    for _ in 0..2 {
        for u in basis.clone() {
            let c = dot(u, w);
            axpy(-c, u, w);
        }
    }
}

fn residual<O: LinearOperator + ?Sized>(op: &O, theta: f64, y: &[C64]) -> f64 {
    let mut hy = vec![C64::new(0.0, 0.0); y.len()];
    op.apply(y, &mut hy);
    axpy(C64::new(-theta, 0.0), y, &mut hy);
    norm(&hy)
}

/// Lowest eigenpair of `op` restricted to the complement of `locked`.
fn lowest_in_complement<O: LinearOperator + ?Sized>(
    op: &O,
    locked: &[Vec<C64>],
    scale: f64,
    opts: &LanczosOptions,
    matvecs: &mut usize,
) -> Result<(f64, Vec<C64>)> {
    let n = op.dim();
    let room = n - locked.len();
    let m = opts.krylov_dim.min(room).max(1);
    let target = opts.tol_res * scale.max(1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + locked.len() as u64);
    let mut start: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    orthogonalize(&mut start, locked.iter());
    let s = norm(&start);
    start.iter_mut().for_each(|x| *x /= s);

    let mut last_residual = f64::INFINITY;
    loop {
        let mut v: Vec<Vec<C64>> = vec![start];
        let mut alphas: Vec<f64> = Vec::with_capacity(m);
        let mut betas: Vec<f64> = Vec::with_capacity(m);
        let mut invariant = false;
        for j in 0..m {
            let mut w = vec![C64::new(0.0, 0.0); n];
            op.apply(&v[j], &mut w);
            *matvecs += 1;
            let alpha = dot(&v[j], &w).re;
            axpy(C64::new(-alpha, 0.0), &v[j], &mut w);
            if j > 0 {
                axpy(C64::new(-betas[j - 1], 0.0), &v[j - 1], &mut w);
            }
            orthogonalize(&mut w, locked.iter().chain(v.iter()));
            let beta = norm(&w);
            alphas.push(alpha);
            if beta <= 1e-13 * scale.max(1.0) {
                invariant = true;
                break;
            }
            if j + 1 == m {
                break;
            }
            betas.push(beta);
            w.iter_mut().for_each(|x| *x /= beta);
            v.push(w);
        }

        let k = alphas.len();
        let t = DMatrix::from_fn(k, k, |r, c| {
            if r == c {
                alphas[r]
            } else if r + 1 == c {
                betas[r]
            } else if c + 1 == r {
                betas[c]
            } else {
                0.0
            }
        });
        let eig = t.symmetric_eigen();
        let (idx, theta) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty tridiagonal");
        let mut y = vec![C64::new(0.0, 0.0); n];
        for (i, vi) in v.iter().take(k).enumerate() {
            axpy(C64::new(eig.eigenvectors[(i, idx)], 0.0), vi, &mut y);
        }
        orthogonalize(&mut y, locked.iter());
        let ny = norm(&y);
        y.iter_mut().for_each(|x| *x /= ny);

        let res = residual(op, theta, &y);
        *matvecs += 1;
        if res <= target {
            return Ok((theta, y));
        }
        if *matvecs >= opts.max_matvecs || (invariant && res >= last_residual) {
            return Err(Error::Convergence {
                iterations: *matvecs,
                residual: res,
            });
        }
        last_residual = res;
        start = y;
    }
}

/// Lowest eigenpairs of a Hermitian operator; `scale` bounds `‖H‖`.
/// Returned in ascending order of eigenvalue.
pub fn lanczos_lowest<O: LinearOperator + ?Sized>(
    op: &O,
    want: Want,
    scale: f64,
    opts: &LanczosOptions,
) -> Result<Vec<(f64, Vec<C64>)>> {
    let n = op.dim();
    let mut found: Vec<(f64, Vec<C64>)> = Vec::new();
    let mut locked: Vec<Vec<C64>> = Vec::new();
    let mut matvecs = 0;
    while locked.len() < n {
        if let Want::Count(k) = want {
            if found.len() >= k {
                break;
            }
        }
        let (theta, y) = lowest_in_complement(op, &locked, scale, opts, &mut matvecs)?;
        if let Want::GroundSpace { tol_deg_rel } = want {
            if let Some(e0) = found.iter().map(|f| f.0).reduce(f64::min) {
                if theta - e0 > tol_deg_rel * e0.abs().max(1.0) {
                    break;
                }
            }
        }
        log::debug!("lanczos: locked eigenvalue {theta:.15e} after {matvecs} matvecs");
        locked.push(y.clone());
        found.push((theta, y));
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(found)
}
