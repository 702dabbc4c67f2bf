//! Zero-padded embedding of the Carleman system into square `n_x^α` grade blocks.
//!
//! Every grade `j` of the Carleman vector is stored at the top of a block of
//! size `n_x^α`; the trailing pad slots (`z_j`) stay zero under the dynamics.

use crate::basis::{block_selector, FactorList};
use crate::burgers::{
    build_f2, carleman_diag_block, carleman_superdiag_block, grade_offset, time_stepping_operator,
    GridConfig,
};
use crate::error::{exact_log2, invalid, Error, Result};
use crate::sparse::{BlockAssembler, SparseMatrix, C64, ONE, ZERO};

/// Commutation matrix `K^(a,b)`: the `ab × ab` permutation with
/// `K^(a,b) (x ⊗ y) = y ⊗ x` for `x ∈ ℂ^b`, `y ∈ ℂ^a`.
///
/// With this orientation `A ⊗ B = K^(r,m) (B ⊗ A) K^(n,q)` for `A` of shape
/// `r × q` and `B` of shape `m × n`, which is the identity the factored
/// super-diagonal blocks rely on.
pub fn commutation_matrix(a: usize, b: usize) -> Result<SparseMatrix> {
    if exact_log2(a).is_none() || exact_log2(b).is_none() {
        return Err(invalid(format!("commutation sizes ({a}, {b}) must be powers of two")));
    }
    let map: Vec<usize> = (0..a * b)
        .map(|c| {
            let (ix, iy) = (c / a, c % a);
            iy * b + ix
        })
        .collect();
    Ok(SparseMatrix::from_column_map(&map))
}

/// `A_j^(e),j = ρ₀^{⊗ log n_x^{α−j}} ⊗ A_j^j`.
pub fn embed_diag_block(j: usize, grid: &GridConfig) -> Result<SparseMatrix> {
    let block = carleman_diag_block(grid, j)?;
    let mut pad = FactorList::default();
    pad.extend_basis(crate::basis::BasisFactor::Rho0, grid.s() * (grid.alpha - j));
    Ok(pad.realize_with_cap(usize::MAX)?.kron(&block))
}

/// `A_{j+1}^(e),j` by direct padding: `A_{j+1}^j` in the top-left corner.
pub fn embed_superdiag_block(j: usize, grid: &GridConfig) -> Result<SparseMatrix> {
    let block = carleman_superdiag_block(grid, j)?;
    let n = grid.padded_block();
    let mut asm = BlockAssembler::new(n, n);
    asm.add_block(0, 0, ONE, &block);
    Ok(asm.finish())
}

/// `A_{j+1}^(e),j` assembled from the commutation-matrix factorization
/// `ρ₀^{…} ⊗ Σ_l [(ρ₀^{⊗s} ⊗ K^(n_x^l, n_x)) (F̃₂ ⊗ I^{⊗l}) K^(n_x², n_x^l)] ⊗ I^{⊗(j−l−1)}`
/// where `F̃₂` is `F₂` padded with zero rows to a square `n_x² × n_x²` matrix.
pub fn embed_superdiag_block_factored(j: usize, grid: &GridConfig) -> Result<SparseMatrix> {
    if j == 0 || j >= grid.alpha {
        return Err(invalid(format!("block index {j} outside 1..{}", grid.alpha)));
    }
    let nx = grid.n_x;
    let mut f2_sq = BlockAssembler::new(nx * nx, nx * nx);
    f2_sq.add_block(0, 0, ONE, &build_f2(grid));
    let f2_sq = f2_sq.finish();

    let mut pad = FactorList::default();
    pad.extend_basis(crate::basis::BasisFactor::Rho0, grid.s() * (grid.alpha - j - 1));
    let pad = pad.realize_with_cap(usize::MAX)?;
    let rho0_s = {
        let mut f = FactorList::default();
        f.extend_basis(crate::basis::BasisFactor::Rho0, grid.s());
        f.realize()?
    };

    let dim = nx.pow(j as u32 + 1);
    let mut sum = SparseMatrix::zeros(dim, dim);
    for l in 0..j {
        let nl = nx.pow(l as u32);
        let left = rho0_s.kron(&commutation_matrix(nl, nx)?);
        let mid = f2_sq.kron(&SparseMatrix::identity(nl));
        let right = commutation_matrix(nx * nx, nl)?;
        let core = left.matmul(&mid)?.matmul(&right)?;
        let term = core.kron(&SparseMatrix::identity(nx.pow((j - l - 1) as u32)));
        sum = sum.add(&term)?;
    }
    Ok(pad.kron(&sum))
}

/// `A^(e) = Σ_j ρ_{f(j−1, j−1)} ⊗ A_j^(e),j + Σ_j ρ_{f(j−1, j)} ⊗ A_{j+1}^(e),j`.
pub fn build_embedded_a(grid: &GridConfig) -> Result<SparseMatrix> {
    grid.validate()?;
    let r = grid.r();
    let n = grid.embedded_state_dim();
    let mut acc = SparseMatrix::zeros(n, n);
    for j in 1..=grid.alpha {
        let sel = FactorList::from_basis(block_selector(j - 1, j - 1, r)).realize()?;
        acc = acc.add(&sel.kron(&embed_diag_block(j, grid)?))?;
        if j < grid.alpha {
            let sel = FactorList::from_basis(block_selector(j - 1, j, r)).realize()?;
            acc = acc.add(&sel.kron(&embed_superdiag_block(j, grid)?))?;
        }
    }
    Ok(acc)
}

/// Indices of the embedded state that carry Carleman entries, in Carleman order.
pub fn carleman_indices(grid: &GridConfig) -> Vec<usize> {
    let block = grid.padded_block();
    (1..=grid.alpha)
        .flat_map(|j| {
            let base = (j - 1) * block;
            (0..grid.n_x.pow(j as u32)).map(move |i| base + i)
        })
        .collect()
}

/// Embeds a Carleman vector `(y_1, …, y_α)` into `α n_x^α` slots with zero pads.
pub fn embed_vector(y: &[C64], grid: &GridConfig) -> Result<Vec<C64>> {
    if y.len() != grid.carleman_dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.carleman_dim(),
            found: y.len(),
        });
    }
    let mut out = vec![ZERO; grid.embedded_state_dim()];
    for (src, dst) in carleman_indices(grid).into_iter().enumerate() {
        out[dst] = y[src];
    }
    Ok(out)
}

/// The embedded system `L^(e) Y^(e) = B^(e)`.
#[derive(Debug, Clone)]
pub struct EmbeddedSystem {
    pub grid: GridConfig,
    pub a_e: SparseMatrix,
    pub l_e: SparseMatrix,
    pub b_e: Vec<C64>,
    pub y0_e: Vec<C64>,
    pub qubit_count: usize,
}

pub fn build_embedded_system(grid: &GridConfig, y0: &[C64]) -> Result<EmbeddedSystem> {
    let a_e = build_embedded_a(grid)?;
    let y0_e = embed_vector(y0, grid)?;
    let l_e = time_stepping_operator(&a_e, grid.dt, grid.n_t)?;
    let mut b_e = vec![ZERO; l_e.nrows()];
    b_e[..y0_e.len()].copy_from_slice(&y0_e);
    Ok(EmbeddedSystem {
        grid: *grid,
        qubit_count: exact_log2(l_e.nrows()).expect("power-of-two dimension"),
        a_e,
        l_e,
        b_e,
        y0_e,
    })
}

/// Velocity trajectories and pad diagnostics read back from an embedded solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTrajectory {
    /// `u[t][i]`: the first `n_x` entries of time block `t`.
    pub u: Vec<Vec<C64>>,
    /// Largest modulus over all pad (`z_j`) slots, per time block.
    pub z_max: Vec<f64>,
}

impl SolutionTrajectory {
    pub fn max_pad(&self) -> f64 {
        self.z_max.iter().copied().fold(0.0, f64::max)
    }

    pub fn real_u(&self) -> Vec<Vec<f64>> {
        self.u.iter().map(|row| row.iter().map(|v| v.re).collect()).collect()
    }
}

pub fn extract_solution(y_e: &[C64], grid: &GridConfig) -> Result<SolutionTrajectory> {
    let per_step = grid.embedded_state_dim();
    if y_e.len() != per_step * grid.n_t {
        return Err(Error::DimensionMismatch {
            expected: per_step * grid.n_t,
            found: y_e.len(),
        });
    }
    let mut live = vec![false; per_step];
    for i in carleman_indices(grid) {
        live[i] = true;
    }
    let mut u = Vec::with_capacity(grid.n_t);
    let mut z_max = Vec::with_capacity(grid.n_t);
    for block in y_e.chunks(per_step) {
        u.push(block[..grid.n_x].to_vec());
        let z = block
            .iter()
            .zip(&live)
            .filter(|(_, &l)| !l)
            .map(|(v, _)| v.norm())
            .fold(0.0, f64::max);
        z_max.push(z);
    }
    Ok(SolutionTrajectory { u, z_max })
}

/// Velocity trajectories from a solution of the un-embedded system.
pub fn extract_unembedded(y: &[C64], grid: &GridConfig) -> Result<Vec<Vec<C64>>> {
    let delta = grid.carleman_dim();
    if y.len() != delta * grid.n_t {
        return Err(Error::DimensionMismatch {
            expected: delta * grid.n_t,
            found: y.len(),
        });
    }
    debug_assert_eq!(grade_offset(grid, 1), 0);
    Ok(y.chunks(delta).map(|b| b[..grid.n_x].to_vec()).collect())
}
