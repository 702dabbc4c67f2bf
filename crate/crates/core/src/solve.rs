//! Classical linear solves used as the reference for every quantum path.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::sparse::{inner, vec_inf_norm, vec_norm, SparseMatrix, C64, ZERO};

/// Systems at or below this dimension are factorized densely.
pub const DENSE_SOLVE_LIMIT: usize = 1 << 12;

/// Relative residual bound `‖LY − B‖∞ ≤ RESIDUAL_TOL · ‖B‖∞` enforced on every solve.
pub const RESIDUAL_TOL: f64 = 1e-10;

const GMRES_RESTART: usize = 200;
const GMRES_MAX_CYCLES: usize = 500;

/// Solves `L Y = B`. Dense LU below [`DENSE_SOLVE_LIMIT`], restarted GMRES above.
pub fn classical_solve(l: &SparseMatrix, b: &[C64]) -> Result<Vec<C64>> {
    if !l.is_square() {
        return Err(Error::DimensionMismatch {
            expected: l.nrows(),
            found: l.ncols(),
        });
    }
    if b.len() != l.nrows() {
        return Err(Error::DimensionMismatch {
            expected: l.nrows(),
            found: b.len(),
        });
    }
    let y = if l.nrows() <= DENSE_SOLVE_LIMIT {
        dense_solve(l, b)?
    } else {
        gmres(l, b)?
    };
    check_residual(l, b, &y)?;
    Ok(y)
}

fn dense_solve(l: &SparseMatrix, b: &[C64]) -> Result<Vec<C64>> {
    let lu = l.to_dense().lu();
    let rhs = DVector::from_column_slice(b);
    lu.solve(&rhs)
        .map(|v| v.as_slice().to_vec())
        .ok_or_else(|| Error::Solver("matrix is singular".into()))
}

fn check_residual(l: &SparseMatrix, b: &[C64], y: &[C64]) -> Result<()> {
    let ly = l.matvec(y)?;
    let res = ly.iter().zip(b).map(|(a, c)| (a - c).norm()).fold(0.0, f64::max);
    let scale = vec_inf_norm(b);
    if !res.is_finite() || res > RESIDUAL_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Solver(format!(
            "residual {res:.3e} exceeds {:.1e} relative to |B| = {scale:.3e}",
            RESIDUAL_TOL
        )));
    }
    Ok(())
}

/// Restarted GMRES with modified Gram-Schmidt and Givens rotations.
fn gmres(a: &SparseMatrix, b: &[C64]) -> Result<Vec<C64>> {
    let n = b.len();
    let bnorm = vec_norm(b);
    if bnorm == 0.0 {
        return Ok(vec![ZERO; n]);
    }
    // aim well below the inf-norm bound checked afterwards
    let target = 1e-3 * RESIDUAL_TOL * bnorm;
    let mut x = vec![ZERO; n];
    for _ in 0..GMRES_MAX_CYCLES {
        let ax = a.matvec(&x)?;
        let r: Vec<C64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = vec_norm(&r);
        if beta <= target {
            return Ok(x);
        }
        let k = GMRES_RESTART.min(n);
        let mut v: Vec<Vec<C64>> = Vec::with_capacity(k + 1);
        v.push(r.iter().map(|ri| ri / beta).collect());
        let mut h = vec![vec![ZERO; k]; k + 1];
        let mut cs = vec![ZERO; k];
        let mut sn = vec![ZERO; k];
        let mut g = vec![ZERO; k + 1];
        g[0] = C64::new(beta, 0.0);
        let mut used = 0;
        for j in 0..k {
            let mut w = a.matvec(&v[j])?;
            for (i, vi) in v.iter().enumerate() {
                let hij = inner(vi, &w);
                h[i][j] = hij;
                w.iter_mut().zip(vi).for_each(|(wk, vk)| *wk -= hij * vk);
            }
            let wn = vec_norm(&w);
            h[j + 1][j] = C64::new(wn, 0.0);
            for i in 0..j {
                let t = cs[i].conj() * h[i][j] + sn[i].conj() * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let denom = (h[j][j].norm_sqr() + h[j + 1][j].norm_sqr()).sqrt();
            if denom == 0.0 {
                return Err(Error::Solver("GMRES breakdown on a singular system".into()));
            }
            cs[j] = h[j][j] / denom;
            sn[j] = h[j + 1][j] / denom;
            h[j][j] = C64::new(denom, 0.0);
            h[j + 1][j] = ZERO;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j].conj() * g[j];
            used = j + 1;
            if g[j + 1].norm() <= target || wn == 0.0 {
                break;
            }
            v.push(w.iter().map(|wk| wk / wn).collect());
        }
        let mut yk = vec![ZERO; used];
        for i in (0..used).rev() {
            let mut acc = g[i];
            for c in i + 1..used {
                acc -= h[i][c] * yk[c];
            }
            yk[i] = acc / h[i][i];
        }
        for (i, yi) in yk.iter().enumerate() {
            x.iter_mut().zip(&v[i]).for_each(|(xk, vk)| *xk += yi * vk);
        }
    }
    Err(Error::Solver(format!(
        "GMRES did not converge within {GMRES_MAX_CYCLES} restarts"
    )))
}
