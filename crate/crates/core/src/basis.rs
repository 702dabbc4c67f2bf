//! Single-qubit operator sets (tau, sigma and the mixed set ℙ), the
//! quaternary block-addressing map, and tensor-product factor lists.
//!
//! Ordering convention: the leftmost factor of a list is the most
//! significant qubit of the realized operator.
//!
//! Note that the sigma set is indexed as `σ₀ = X`, `σ₁ = Y`, `σ₂ = Z`,
//! `σ₃ = I`, which differs from the usual `σ₀ = I` convention. Pauli
//! strings exported by [`crate::pauli`] use letters to avoid confusion.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decomposition::CompositeBlock;
use crate::error::{invalid, Error, Result};
use crate::sparse::{SparseMatrix, C64, DEFAULT_DIM_CAP, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisFactor {
    /// `|0⟩⟨0|`
    Rho0,
    /// `|0⟩⟨1|`
    Rho1,
    /// `|1⟩⟨0|`
    Rho2,
    /// `|1⟩⟨1|`
    Rho3,
    /// identity
    Rho4,
    /// Pauli X
    Sigma0,
    /// Pauli Y
    Sigma1,
    /// Pauli Z
    Sigma2,
    /// identity
    Sigma3,
    Tau0,
    Tau1,
    Tau2,
    Tau3,
}

impl BasisFactor {
    pub const RHO: [BasisFactor; 5] = [Self::Rho0, Self::Rho1, Self::Rho2, Self::Rho3, Self::Rho4];

    /// `ρ_k` for `k ∈ 0..5`.
    pub fn rho(k: u8) -> Result<Self> {
        Self::RHO
            .get(k as usize)
            .copied()
            .ok_or_else(|| invalid(format!("ρ index {k} outside 0..=4")))
    }

    pub fn is_rho(self) -> bool {
        matches!(self, Self::Rho0 | Self::Rho1 | Self::Rho2 | Self::Rho3 | Self::Rho4)
    }

    /// Row-major 2x2 matrix.
    pub fn matrix(self) -> [[C64; 2]; 2] {
        let i = C64::new(0.0, 1.0);
        match self {
            Self::Rho0 | Self::Tau0 => [[ONE, ZERO], [ZERO, ZERO]],
            Self::Rho1 | Self::Tau1 => [[ZERO, ONE], [ZERO, ZERO]],
            Self::Rho2 | Self::Tau2 => [[ZERO, ZERO], [ONE, ZERO]],
            Self::Rho3 | Self::Tau3 => [[ZERO, ZERO], [ZERO, ONE]],
            Self::Rho4 | Self::Sigma3 => [[ONE, ZERO], [ZERO, ONE]],
            Self::Sigma0 => [[ZERO, ONE], [ONE, ZERO]],
            Self::Sigma1 => [[ZERO, -i], [i, ZERO]],
            Self::Sigma2 => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    pub fn to_sparse(self) -> SparseMatrix {
        let m = self.matrix();
        let triplets = (0..2)
            .flat_map(|r| (0..2).map(move |c| (r, c)))
            .map(|(r, c)| (r, c, m[r][c]))
            .collect();
        SparseMatrix::from_triplets(2, 2, triplets)
    }

    /// `ρ ρᵀ` for elements of ℙ (and the tau set), always one of `ρ₀, ρ₃, ρ₄`.
    /// Unitary sigma factors give `ρ₄`.
    pub fn gram(self) -> BasisFactor {
        match self {
            Self::Rho0 | Self::Rho1 | Self::Tau0 | Self::Tau1 => Self::Rho0,
            Self::Rho2 | Self::Rho3 | Self::Tau2 | Self::Tau3 => Self::Rho3,
            _ => Self::Rho4,
        }
    }

    pub fn is_unitary(self) -> bool {
        matches!(
            self,
            Self::Rho4 | Self::Sigma0 | Self::Sigma1 | Self::Sigma2 | Self::Sigma3
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Rho0 => "rho0",
            Self::Rho1 => "rho1",
            Self::Rho2 => "rho2",
            Self::Rho3 => "rho3",
            Self::Rho4 => "rho4",
            Self::Sigma0 => "sigma0",
            Self::Sigma1 => "sigma1",
            Self::Sigma2 => "sigma2",
            Self::Sigma3 => "sigma3",
            Self::Tau0 => "tau0",
            Self::Tau1 => "tau1",
            Self::Tau2 => "tau2",
            Self::Tau3 => "tau3",
        }
    }
}

impl fmt::Display for BasisFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Unitary completion of a single ℙ element: `σ₀` for `ρ₁, ρ₂`, `σ₃` otherwise.
pub fn rho_bar(factor: BasisFactor) -> Result<BasisFactor> {
    match factor {
        BasisFactor::Rho1 | BasisFactor::Rho2 => Ok(BasisFactor::Sigma0),
        BasisFactor::Rho0 | BasisFactor::Rho3 | BasisFactor::Rho4 => Ok(BasisFactor::Sigma3),
        other => Err(invalid(format!("rho_bar is defined on ℙ only, got {other}"))),
    }
}

/// Digit-wise `f_k = 2 i_k + j_k` over equal-length bitstrings, most
/// significant digit first.
pub fn quaternary_index(i: &[u8], j: &[u8]) -> Result<Vec<u8>> {
    if i.len() != j.len() {
        return Err(invalid(format!(
            "bitstrings of unequal length {} and {}",
            i.len(),
            j.len()
        )));
    }
    i.iter()
        .zip(j)
        .map(|(&a, &b)| {
            if a > 1 || b > 1 {
                Err(invalid("bitstring digits must be 0 or 1"))
            } else {
                Ok(2 * a + b)
            }
        })
        .collect()
}

/// `b_β(k)`: `k` written with `digits` binary digits, most significant first.
pub fn to_bits(k: usize, digits: usize) -> Vec<u8> {
    (0..digits).rev().map(|d| ((k >> d) & 1) as u8).collect()
}

/// The ℙ tensor product selecting block `(row, col)` of a `2^digits`-block matrix.
pub fn block_selector(row: usize, col: usize, digits: usize) -> Vec<BasisFactor> {
    quaternary_index(&to_bits(row, digits), &to_bits(col, digits))
        .expect("equal length by construction")
        .into_iter()
        .map(|f| BasisFactor::RHO[f as usize])
        .collect()
}

/// One tensor-product slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Factor {
    Basis(BasisFactor),
    Block(CompositeBlock),
}

impl Factor {
    pub fn width(&self) -> usize {
        match self {
            Self::Basis(_) => 1,
            Self::Block(b) => b.width(),
        }
    }

    pub fn realize(&self, cap: usize) -> Result<SparseMatrix> {
        match self {
            Self::Basis(b) => Ok(b.to_sparse()),
            Self::Block(b) => b.realize(cap),
        }
    }
}

impl From<BasisFactor> for Factor {
    fn from(b: BasisFactor) -> Self {
        Self::Basis(b)
    }
}

impl From<CompositeBlock> for Factor {
    fn from(b: CompositeBlock) -> Self {
        Self::Block(b)
    }
}

/// Ordered tensor product of factors; the first factor is most significant.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FactorList {
    pub factors: Vec<Factor>,
}

impl FactorList {
    pub fn new(factors: Vec<Factor>) -> Self {
        Self { factors }
    }

    pub fn from_basis(factors: impl IntoIterator<Item = BasisFactor>) -> Self {
        Self::new(factors.into_iter().map(Factor::Basis).collect())
    }

    pub fn push(&mut self, f: impl Into<Factor>) {
        self.factors.push(f.into());
    }

    pub fn extend_basis(&mut self, f: BasisFactor, count: usize) {
        self.factors.extend(std::iter::repeat_n(Factor::Basis(f), count));
    }

    pub fn concat(mut self, other: FactorList) -> Self {
        self.factors.extend(other.factors);
        self
    }

    pub fn total_qubits(&self) -> usize {
        self.factors.iter().map(Factor::width).sum()
    }

    pub fn dim(&self) -> usize {
        1usize << self.total_qubits()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Only plain ℙ factors.
    pub fn is_pure_rho(&self) -> bool {
        self.factors
            .iter()
            .all(|f| matches!(f, Factor::Basis(b) if b.is_rho()))
    }

    pub fn realize(&self) -> Result<SparseMatrix> {
        self.realize_with_cap(DEFAULT_DIM_CAP)
    }

    /// Exact Kronecker product of the per-factor realizations.
    pub fn realize_with_cap(&self, cap: usize) -> Result<SparseMatrix> {
        let q = self.total_qubits();
        if q >= usize::BITS as usize - 1 || (1usize << q) > cap {
            return Err(Error::SizeCap {
                dim: 1usize.checked_shl(q as u32).unwrap_or(usize::MAX),
                cap,
            });
        }
        // Runs of plain basis factors are expanded with a direct bit-walk,
        // which is much cheaper than repeated sparse Kronecker products.
        let mut acc = SparseMatrix::identity(1);
        let mut run: Vec<BasisFactor> = Vec::new();
        for f in &self.factors {
            match f {
                Factor::Basis(b) => run.push(*b),
                Factor::Block(block) => {
                    if !run.is_empty() {
                        acc = acc.kron(&basis_run(&run));
                        run.clear();
                    }
                    acc = acc.kron(&block.realize(cap)?);
                }
            }
        }
        if !run.is_empty() {
            acc = acc.kron(&basis_run(&run));
        }
        Ok(acc)
    }
}

impl From<Vec<BasisFactor>> for FactorList {
    fn from(v: Vec<BasisFactor>) -> Self {
        Self::from_basis(v)
    }
}

/// Kronecker product of a run of single-qubit factors.
fn basis_run(run: &[BasisFactor]) -> SparseMatrix {
    let mut entries: Vec<(usize, usize, C64)> = vec![(0, 0, ONE)];
    for b in run {
        let m = b.matrix();
        let mut next = Vec::with_capacity(entries.len() * 2);
        for &(r, c, v) in &entries {
            for (br, row) in m.iter().enumerate() {
                for (bc, &x) in row.iter().enumerate() {
                    if x != ZERO {
                        next.push((2 * r + br, 2 * c + bc, v * x));
                    }
                }
            }
        }
        entries = next;
    }
    let n = 1usize << run.len();
    SparseMatrix::from_triplets(n, n, entries)
}
