//! Symmetric eigensolvers: dense (nalgebra) and thick-restart Lanczos.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

#[derive(Debug, Clone)]
pub(crate) struct Eigenpairs<F> {
    pub values: Vec<F>,
    pub vectors: Vec<Vec<F>>,
    pub residuals: Vec<F>,
}

/// Lowest `k` eigenpairs of a dense symmetric matrix, ascending.
pub(crate) fn dense_lowest<F: Real>(matrix: DMatrix<F>, k: usize) -> Eigenpairs<F> {
    let dim = matrix.nrows();
    let eig = SymmetricEigen::new(matrix);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).expect("finite eigenvalues"));
    order.truncate(k.min(dim));
    Eigenpairs {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors: order.iter().map(|&i| eig.eigenvectors.column(i).iter().copied().collect()).collect(),
        residuals: vec![F::zero(); order.len()],
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LanczosConfig<F> {
    pub max_basis: usize,
    pub max_restarts: usize,
    /// Absolute residual tolerance `‖A y − θ y‖`.
    pub tol: F,
    pub seed: u64,
}

fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

fn axpy<F: Real>(alpha: F, x: &[F], y: &mut [F]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm<F: Real>(a: &[F]) -> F {
    dot(a, a).sqrt()
}

fn project_out<F: Real>(w: &mut [F], against: &[Vec<F>]) {
    for q in against {
        let c = dot(q, w);
        axpy(-c, q, w);
    }
}

fn random_unit<F: Real>(dim: usize, rng: &mut impl Rng, against: &[&[Vec<F>]]) -> Option<Vec<F>> {
    for _ in 0..8 {
        let mut v: Vec<F> = (0..dim).map(|_| lit(rng.random::<f64>() - 0.5)).collect();
        for _ in 0..2 {
            for set in against {
                project_out(&mut v, set);
            }
        }
        let nv = norm(&v);
        if nv > lit(1e-8) {
            v.iter_mut().for_each(|x| *x /= nv);
            return Some(v);
        }
    }
    None
}

/// Lowest `k` eigenpairs of the symmetric operator `matvec` restricted to
/// the orthogonal complement of `locked`.
///
/// Lanczos with full (twice-iterated Gram–Schmidt) reorthogonalization and
/// thick restarts: after `max_basis` steps the lowest Ritz vectors are kept
/// together with the residual direction and the recurrence continues from
/// there.
pub(crate) fn lanczos_lowest<F: Real>(
    dim: usize,
    k: usize,
    matvec: &(dyn Fn(&[F], &mut [F]) + Sync),
    start: Option<Vec<F>>,
    locked: &[Vec<F>],
    cfg: &LanczosConfig<F>,
) -> Result<Eigenpairs<F>> {
    let free_dim = dim.saturating_sub(locked.len());
    let k = k.min(free_dim);
    if k == 0 {
        return Ok(Eigenpairs { values: vec![], vectors: vec![], residuals: vec![] });
    }
    let m = cfg.max_basis.max(k + 2).min(free_dim);
    let mut rng = crate::rng_from_seed(cfg.seed);

    let mut v0 = start.unwrap_or_default();
    if v0.len() == dim {
        project_out(&mut v0, locked);
        project_out(&mut v0, locked);
    }
    let n0 = if v0.len() == dim { norm(&v0) } else { F::zero() };
    let v0 = if n0 > lit(1e-10) {
        v0.into_iter().map(|x| x / n0).collect()
    } else {
        random_unit(dim, &mut rng, &[locked])
            .ok_or_else(|| Error::NoConvergence { iterations: 0, residuals: vec![] })?
    };

    let mut basis: Vec<Vec<F>> = vec![v0];
    let mut t = DMatrix::<F>::zeros(m, m);
    let mut next = 0;
    let mut w = vec![F::zero(); dim];
    let breakdown: F = cfg.tol * lit(1e-3);
    let mut last_residuals = Vec::new();

    for restart in 0..=cfg.max_restarts {
        let mut beta_last = F::zero();
        let mut residual_dir: Option<Vec<F>> = None;
        while next < basis.len() && next < m {
            let j = next;
            matvec(&basis[j], &mut w);
            project_out(&mut w, locked);
            let mut coeffs = vec![F::zero(); basis.len()];
            for _ in 0..2 {
                for (i, b) in basis.iter().enumerate() {
                    let c = dot(b, &w);
                    coeffs[i] += c;
                    axpy(-c, b, &mut w);
                }
                project_out(&mut w, locked);
            }
            for (i, &c) in coeffs.iter().enumerate() {
                t[(i, j)] = c;
                t[(j, i)] = c;
            }
            let beta = norm(&w);
            next = j + 1;
            if next == m {
                beta_last = beta;
                if beta > breakdown {
                    residual_dir = Some(w.iter().map(|&x| x / beta).collect());
                }
                break;
            }
            if beta > breakdown {
                basis.push(w.iter().map(|&x| x / beta).collect());
            } else {
                // invariant subspace; continue in a fresh direction
                let others: Vec<&[Vec<F>]> = vec![&basis, locked];
                match random_unit(dim, &mut rng, &others) {
                    Some(v) => basis.push(v),
                    None => break,
                }
            }
        }
        let size = basis.len().min(next);
        let small = t.view((0, 0), (size, size)).into_owned();
        let eig = SymmetricEigen::new(small);
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).expect("finite Ritz values"));
        let kk = k.min(size);
        let residuals: Vec<F> =
            order[..kk].iter().map(|&i| (beta_last * eig.eigenvectors[(size - 1, i)]).abs()).collect();
        let exhausted = size >= free_dim || residual_dir.is_none();
        let converged = residuals.iter().all(|&r| r <= cfg.tol);
        if converged || exhausted || restart == cfg.max_restarts {
            if !(converged || exhausted) {
                last_residuals = residuals.iter().map(|&r| to_f64(r)).collect();
                break;
            }
            let vectors = order[..kk].iter().map(|&i| ritz_vector(&basis[..size], &eig.eigenvectors, i)).collect();
            return Ok(Eigenpairs {
                values: order[..kk].iter().map(|&i| eig.eigenvalues[i]).collect(),
                vectors,
                residuals,
            });
        }
        let keep = (k + (size - k) / 2).clamp(k, size - 1);
        let mut new_basis: Vec<Vec<F>> =
            order[..keep].iter().map(|&i| ritz_vector(&basis[..size], &eig.eigenvectors, i)).collect();
        t.fill(F::zero());
        for (a, &i) in order[..keep].iter().enumerate() {
            t[(a, a)] = eig.eigenvalues[i];
            let s = beta_last * eig.eigenvectors[(size - 1, i)];
            t[(a, keep)] = s;
            t[(keep, a)] = s;
        }
        new_basis.push(residual_dir.expect("checked above"));
        basis = new_basis;
        next = keep;
    }
    Err(Error::NoConvergence { iterations: cfg.max_restarts, residuals: last_residuals })
}

fn ritz_vector<F: Real>(basis: &[Vec<F>], coeffs: &DMatrix<F>, col: usize) -> Vec<F> {
    let dim = basis[0].len();
    let mut y = vec![F::zero(); dim];
    for (r, b) in basis.iter().enumerate() {
        axpy(coeffs[(r, col)], b, &mut y);
    }
    let ny = norm(&y);
    y.iter_mut().for_each(|x| *x /= ny);
    y
}

/// Lanczos followed by a deflated search in the complement of the found
/// vectors; any eigenvalue found there below the current `k`-th value was
/// missed (degenerate or starved in the Krylov space) and is merged in.
pub(crate) fn lanczos_lowest_verified<F: Real>(
    dim: usize,
    k: usize,
    matvec: &(dyn Fn(&[F], &mut [F]) + Sync),
    start: Option<Vec<F>>,
    cfg: &LanczosConfig<F>,
) -> Result<Eigenpairs<F>> {
    let mut found = lanczos_lowest(dim, k, matvec, start, &[], cfg)?;
    for round in 0..k {
        if found.vectors.len() >= dim {
            break;
        }
        let probe_cfg = LanczosConfig { seed: cfg.seed.wrapping_add(1 + round as u64), ..*cfg };
        let extra = lanczos_lowest(dim, 1, matvec, None, &found.vectors, &probe_cfg)?;
        let (Some(&mu), Some(&top)) = (extra.values.first(), found.values.last()) else { break };
        if found.values.len() == k && mu >= top - cfg.tol * lit(10.0) {
            break;
        }
        found.values.push(mu);
        found.vectors.push(extra.vectors[0].clone());
        found.residuals.push(extra.residuals[0]);
        let mut order: Vec<usize> = (0..found.values.len()).collect();
        order.sort_by(|&a, &b| found.values[a].partial_cmp(&found.values[b]).expect("finite"));
        order.truncate(k);
        found = Eigenpairs {
            values: order.iter().map(|&i| found.values[i]).collect(),
            vectors: order.iter().map(|&i| found.vectors[i].clone()).collect(),
            residuals: order.iter().map(|&i| found.residuals[i]).collect(),
        };
    }
    Ok(found)
}
