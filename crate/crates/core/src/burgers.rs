//! Discretized 1D Burgers' operators, the truncated Carleman matrix and the
//! backward-Euler time system.

use serde::{Deserialize, Serialize};

use crate::error::{exact_log2, invalid, Error, Result};
use crate::sparse::{BlockAssembler, SparseMatrix, C64, ONE};

/// Spatial/temporal discretization and physics parameters.
///
/// `n_x`, `n_t` and `alpha` must be powers of two with `n_x ≥ 4`, `n_t ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n_x: usize,
    pub n_t: usize,
    pub alpha: usize,
    /// Grid spacing (m).
    pub dx: f64,
    /// Time step (s).
    pub dt: f64,
    /// Diffusion coefficient (m²/s).
    pub nu: f64,
    /// Domain length (m).
    pub l_x: f64,
}

/// Largest `log2(α n_t n_x^α)` whose indices still fit a `usize`.
pub const MAX_SYSTEM_QUBITS: usize = 60;

impl GridConfig {
    /// Builds a grid with `dx = l_x / (n_x - 1)`.
    pub fn new(n_x: usize, n_t: usize, alpha: usize, dt: f64, nu: f64, l_x: f64) -> Result<Self> {
        if n_x < 2 {
            return Err(Error::InvalidConfig(format!("n_x = {n_x} must be at least 4")));
        }
        let grid = Self {
            n_x,
            n_t,
            alpha,
            dx: l_x / (n_x as f64 - 1.0),
            dt,
            nu,
            l_x,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// The desk-scale experiment: `n_x = n_t = 4`, `α = 2`, `Δt = 0.25 s`,
    /// `ν = 1 m²/s` on a `2π` domain.
    pub fn desk_scale() -> Self {
        Self::new(4, 4, 2, 0.25, 1.0, 2.0 * std::f64::consts::PI).expect("valid defaults")
    }

    /// Same grid with a different time step.
    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let pow2 = |name: &str, v: usize, min: usize| -> Result<()> {
            if exact_log2(v).is_none() || v < min {
                Err(Error::InvalidConfig(format!(
                    "{name} = {v} must be a power of two and at least {min}"
                )))
            } else {
                Ok(())
            }
        };
        pow2("n_x", self.n_x, 4)?;
        pow2("n_t", self.n_t, 2)?;
        pow2("alpha", self.alpha, 1)?;
        let qubits = self.m() + self.r() + self.alpha * self.s();
        if qubits > MAX_SYSTEM_QUBITS {
            return Err(Error::InvalidConfig(format!(
                "log2(alpha n_t n_x^alpha) = {qubits} exceeds the {MAX_SYSTEM_QUBITS}-qubit index range"
            )));
        }
        if !(self.dx.is_finite() && self.dx > 0.0) {
            return Err(Error::InvalidConfig(format!("dx = {} must be positive", self.dx)));
        }
        if !(self.dt.is_finite() && self.dt >= 0.0) {
            return Err(Error::InvalidConfig(format!("dt = {} must be non-negative", self.dt)));
        }
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(Error::InvalidConfig(format!("nu = {} must be positive", self.nu)));
        }
        Ok(())
    }

    /// `s = log2 n_x`.
    pub fn s(&self) -> usize {
        exact_log2(self.n_x).expect("validated")
    }

    /// `m = log2 n_t`.
    pub fn m(&self) -> usize {
        exact_log2(self.n_t).expect("validated")
    }

    /// `r = log2 α`.
    pub fn r(&self) -> usize {
        exact_log2(self.alpha).expect("validated")
    }

    /// Carleman state dimension `Δ = Σ_{j=1}^{α} n_x^j`.
    pub fn carleman_dim(&self) -> usize {
        (1..=self.alpha).map(|j| self.n_x.pow(j as u32)).sum()
    }

    /// Embedded grade-block size `n_x^α`.
    pub fn padded_block(&self) -> usize {
        self.n_x.pow(self.alpha as u32)
    }

    /// `α n_x^α`.
    pub fn embedded_state_dim(&self) -> usize {
        self.alpha * self.padded_block()
    }

    /// Number of system qubits `log2(α n_t n_x^α)`.
    pub fn system_qubits(&self) -> usize {
        self.m() + self.r() + self.alpha * self.s()
    }

    /// Node coordinates `x_j = j Δx`.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_x).map(|j| j as f64 * self.dx).collect()
    }
}

/// `F₁`: periodic second difference scaled by `ν/Δx²`.
pub fn build_f1(grid: &GridConfig) -> SparseMatrix {
    let n = grid.n_x;
    let k = grid.nu / (grid.dx * grid.dx);
    let mut triplets = Vec::with_capacity(3 * n);
    for j in 0..n {
        triplets.push((j, j, C64::new(-2.0 * k, 0.0)));
        triplets.push((j, (j + 1) % n, C64::new(k, 0.0)));
        triplets.push((j, (j + n - 1) % n, C64::new(k, 0.0)));
    }
    SparseMatrix::from_triplets(n, n, triplets)
}

/// `F₂`: the advection term acting on `u ⊗ u`, with
/// `(F₂ (u⊗u))_j = −u_j (u_{j+1} − u_{j−1}) / (2Δx)` and periodic wrap.
///
/// The product `u_a u_b` is read from column `a·n_x + b` with `a = j`.
pub fn build_f2(grid: &GridConfig) -> SparseMatrix {
    let n = grid.n_x;
    let k = 1.0 / (2.0 * grid.dx);
    let mut triplets = Vec::with_capacity(2 * n);
    for j in 0..n {
        triplets.push((j, j * n + (j + 1) % n, C64::new(-k, 0.0)));
        triplets.push((j, j * n + (j + n - 1) % n, C64::new(k, 0.0)));
    }
    SparseMatrix::from_triplets(n, n * n, triplets)
}

/// `Σ_{l=0}^{j−1} I^{⊗l} ⊗ F ⊗ I^{⊗(j−l−1)}` with `n_x`-dimensional identities.
fn kron_sum(f: &SparseMatrix, n_x: usize, j: usize) -> SparseMatrix {
    let rows = f.nrows() * n_x.pow(j as u32 - 1);
    let cols = f.ncols() * n_x.pow(j as u32 - 1);
    let parts: Vec<SparseMatrix> = (0..j)
        .map(|l| {
            SparseMatrix::identity(n_x.pow(l as u32))
                .kron(f)
                .kron(&SparseMatrix::identity(n_x.pow((j - l - 1) as u32)))
        })
        .collect();
    SparseMatrix::linear_combination(rows, cols, parts.iter().map(|p| (ONE, p)))
        .expect("shapes agree by construction")
}

/// Diagonal Carleman block `A_j^j` (`n_x^j × n_x^j`).
pub fn carleman_diag_block(grid: &GridConfig, j: usize) -> Result<SparseMatrix> {
    if j == 0 || j > grid.alpha {
        return Err(invalid(format!("block index {j} outside 1..={}", grid.alpha)));
    }
    Ok(kron_sum(&build_f1(grid), grid.n_x, j))
}

/// Super-diagonal Carleman block `A_{j+1}^j` (`n_x^j × n_x^{j+1}`).
pub fn carleman_superdiag_block(grid: &GridConfig, j: usize) -> Result<SparseMatrix> {
    if j == 0 || j >= grid.alpha {
        return Err(invalid(format!("block index {j} outside 1..{}", grid.alpha)));
    }
    Ok(kron_sum(&build_f2(grid), grid.n_x, j))
}

/// Row/column offset of grade `j` (1-based) inside the Carleman vector.
pub fn grade_offset(grid: &GridConfig, j: usize) -> usize {
    (1..j).map(|i| grid.n_x.pow(i as u32)).sum()
}

/// Truncated Carleman matrix `A` (`Δ × Δ`), block upper-bidiagonal.
pub fn build_carleman_a(grid: &GridConfig) -> Result<SparseMatrix> {
    grid.validate()?;
    let dim = grid.carleman_dim();
    let mut asm = BlockAssembler::new(dim, dim);
    for j in 1..=grid.alpha {
        let off = grade_offset(grid, j);
        asm.add_block(off, off, ONE, &carleman_diag_block(grid, j)?);
        if j < grid.alpha {
            asm.add_block(off, grade_offset(grid, j + 1), ONE, &carleman_superdiag_block(grid, j)?);
        }
    }
    Ok(asm.finish())
}

/// `(u, u⊗u, …, u^{⊗α})` stacked.
pub fn carleman_initial_vector(u0: &[C64], alpha: usize) -> Vec<C64> {
    let mut out = Vec::new();
    let mut power = vec![ONE];
    for _ in 0..alpha {
        power = power
            .iter()
            .flat_map(|a| u0.iter().map(move |b| a * b))
            .collect();
        out.extend_from_slice(&power);
    }
    out
}

/// The backward-Euler system `L Y = B`.
#[derive(Debug, Clone)]
pub struct CarlemanSystem {
    pub a: SparseMatrix,
    pub l: SparseMatrix,
    pub b: Vec<C64>,
    pub y0: Vec<C64>,
}

/// Lower block-bidiagonal time-stepping operator with blocks `I` (first
/// diagonal block), `M = I − Δt A` (remaining diagonal) and `−I` below.
pub fn time_stepping_operator(a: &SparseMatrix, dt: f64, n_t: usize) -> Result<SparseMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let d = a.nrows();
    let id = SparseMatrix::identity(d);
    let m = id.axpy(C64::new(-dt, 0.0), a)?;
    let mut asm = BlockAssembler::new(n_t * d, n_t * d);
    asm.add_block(0, 0, ONE, &id);
    for t in 1..n_t {
        asm.add_block(t * d, t * d, ONE, &m);
        asm.add_block(t * d, (t - 1) * d, -ONE, &id);
    }
    Ok(asm.finish())
}

pub fn build_time_system(a: &SparseMatrix, grid: &GridConfig, y0: &[C64]) -> Result<CarlemanSystem> {
    if y0.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: y0.len(),
        });
    }
    let l = time_stepping_operator(a, grid.dt, grid.n_t)?;
    let mut b = vec![C64::new(0.0, 0.0); l.nrows()];
    b[..y0.len()].copy_from_slice(y0);
    Ok(CarlemanSystem {
        a: a.clone(),
        l,
        b,
        y0: y0.to_vec(),
    })
}

/// Gaussian initial condition `(√(2π) σ²)⁻¹ exp(−(x_j − μ)² / (2σ²))` at the nodes.
pub fn initial_state(grid: &GridConfig, sigma: f64, mu: f64) -> Result<Vec<f64>> {
    if !(sigma.is_finite() && sigma != 0.0) {
        return Err(invalid(format!("sigma = {sigma} must be finite and nonzero")));
    }
    let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * sigma * sigma);
    Ok(grid
        .nodes()
        .into_iter()
        .map(|x| norm * (-(x - mu).powi(2) / (2.0 * sigma * sigma)).exp())
        .collect())
}
