//! Term-by-term decomposition `L^(e) = Σ_l c_l L_l`.
//!
//! `L1` terms build the time-stepping skeleton, `L2a` terms the Δt-scaled
//! block diagonal of `A^(e)`, and `L2b` terms its super-diagonal. All scalars
//! live in the coefficients; every factor list realizes a 0/1 matrix.

use serde::{Deserialize, Serialize};

use crate::basis::{block_selector, BasisFactor, Factor, FactorList};
use crate::circuits::{
    p1_circuit, p2_minus_circuit, p2_plus_circuit, p_minus_circuit, p_plus_circuit, Circuit,
};
use crate::burgers::GridConfig;
use crate::embedding::commutation_matrix;
use crate::error::{Error, Result};
use crate::sparse::{SparseMatrix, C64, DEFAULT_DIM_CAP};

use BasisFactor::{Rho0, Rho1, Rho2, Rho4};

/// Schema version written into term-list documents.
pub const TERM_SCHEMA_VERSION: u32 = 1;

/// Named multi-qubit blocks that appear inside `L2b` terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CompositeBlock {
    /// `ρ₀^{⊗s} ⊗ ρ₄^{⊗s}`: keeps the first `n_x` rows of an `n_x² × n_x²` matrix.
    D { s: usize },
    /// `P⁺ = P₂⁺ P₁`.
    PPlus { s: usize },
    /// `P⁻ = P₂⁻ P₁`.
    PMinus { s: usize },
    P1 { s: usize },
    P2Plus { s: usize },
    P2Minus { s: usize },
    /// `K^(2^m, 2^n)` on `m + n` qubits.
    Commutation { m: usize, n: usize },
    Identity { width: usize },
    /// Ordinary matrix product of equal-width factor lists, leftmost first.
    Product { factors: Vec<FactorList> },
}

impl CompositeBlock {
    pub fn width(&self) -> usize {
        match self {
            Self::D { s }
            | Self::PPlus { s }
            | Self::PMinus { s }
            | Self::P1 { s }
            | Self::P2Plus { s }
            | Self::P2Minus { s } => 2 * s,
            Self::Commutation { m, n } => m + n,
            Self::Identity { width } => *width,
            Self::Product { factors } => factors.first().map_or(0, FactorList::total_qubits),
        }
    }

    /// Gate-level circuit for the unitary blocks; `None` for `D` and products.
    pub fn circuit(&self) -> Option<Circuit> {
        match *self {
            Self::PPlus { s } => Some(p_plus_circuit(s)),
            Self::PMinus { s } => Some(p_minus_circuit(s)),
            Self::P1 { s } => Some(p1_circuit(s)),
            Self::P2Plus { s } => Some(p2_plus_circuit(s)),
            Self::P2Minus { s } => Some(p2_minus_circuit(s)),
            Self::Commutation { m, n } => Some(crate::circuits::commutation_circuit(m, n)),
            Self::Identity { width } => Some(Circuit::new(width)),
            Self::D { .. } | Self::Product { .. } => None,
        }
    }

    pub fn is_unitary(&self) -> bool {
        match self {
            Self::D { .. } => false,
            Self::Product { factors } => factors.iter().all(|f| {
                f.factors.iter().all(|x| match x {
                    Factor::Basis(b) => b.is_unitary(),
                    Factor::Block(b) => b.is_unitary(),
                })
            }),
            _ => true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Self::Product { factors } = self {
            let w = self.width();
            if factors.is_empty() {
                return Err(Error::MalformedTerm("empty product".into()));
            }
            if let Some(bad) = factors.iter().find(|f| f.total_qubits() != w) {
                return Err(Error::MalformedTerm(format!(
                    "product factor of width {} in a width-{w} product",
                    bad.total_qubits()
                )));
            }
        }
        Ok(())
    }

    pub fn realize(&self, cap: usize) -> Result<SparseMatrix> {
        let w = self.width();
        if w >= usize::BITS as usize - 1 || (1usize << w) > cap {
            return Err(Error::SizeCap { dim: 1usize.checked_shl(w as u32).unwrap_or(usize::MAX), cap });
        }
        match self {
            Self::D { s } => {
                let mut f = FactorList::default();
                f.extend_basis(Rho0, *s);
                f.extend_basis(Rho4, *s);
                f.realize_with_cap(cap)
            }
            Self::Commutation { m, n } => commutation_matrix(1 << m, 1 << n),
            Self::Identity { width } => Ok(SparseMatrix::identity(1 << width)),
            Self::Product { factors } => {
                self.validate()?;
                let mut acc = factors[0].realize_with_cap(cap)?;
                for f in &factors[1..] {
                    acc = acc.matmul(&f.realize_with_cap(cap)?)?;
                }
                Ok(acc)
            }
            _ => {
                let map = self
                    .circuit()
                    .and_then(|c| c.permutation_map())
                    .expect("permutation blocks have classical circuits");
                Ok(SparseMatrix::from_column_map(&map))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TermClass {
    L1,
    L2a,
    L2b,
}

impl std::fmt::Display for TermClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::L1 => "L1",
            Self::L2a => "L2a",
            Self::L2b => "L2b",
        })
    }
}

/// One `c_l L_l` of the decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTerm {
    /// Serialized as `[re, im]`.
    #[serde(rename = "coeff")]
    pub coefficient: C64,
    #[serde(rename = "class")]
    pub class: TermClass,
    /// Carleman grade (1-based); zero for `L1` terms.
    pub j: usize,
    /// Position of the `F₁`/`F₂` factor within the grade; zero for `L1`.
    pub l: usize,
    pub factors: FactorList,
}

impl DecompositionTerm {
    pub fn realize(&self) -> Result<SparseMatrix> {
        self.factors.realize()
    }

    pub fn realize_with_cap(&self, cap: usize) -> Result<SparseMatrix> {
        self.factors.realize_with_cap(cap)
    }
}

fn rho_run(f: BasisFactor, count: usize) -> FactorList {
    let mut list = FactorList::default();
    list.extend_basis(f, count);
    list
}

/// `n_t`-dimensional time factors: `(list, sign)` for the skeleton `I − S`.
fn time_shift_terms(m: usize) -> Vec<(FactorList, f64)> {
    let mut out = vec![(rho_run(Rho4, m), 1.0)];
    out.push((rho_run(Rho4, m - 1).concat(rho_run(Rho2, 1)), -1.0));
    for j in 2..=m {
        let f = rho_run(Rho4, j - 2)
            .concat(rho_run(Rho2, 1))
            .concat(rho_run(Rho1, m - j + 1));
        out.push((f, -1.0));
    }
    out
}

/// `I_{n_t} − |0⟩⟨0|` as the pair `ρ₄^{⊗m}` (+1), `ρ₀^{⊗m}` (−1).
fn time_projector_terms(m: usize) -> [(FactorList, f64); 2] {
    [(rho_run(Rho4, m), 1.0), (rho_run(Rho0, m), -1.0)]
}

/// The `log n_t + 1` terms of the time-stepping skeleton
/// `(I_{n_t} − S) ⊗ I_{α n_x^α}`, where `S` shifts time block `t` to `t + 1`.
pub fn decompose_l1(grid: &GridConfig) -> Result<Vec<DecompositionTerm>> {
    grid.validate()?;
    let tail = grid.r() + grid.alpha * grid.s();
    Ok(time_shift_terms(grid.m())
        .into_iter()
        .map(|(time, sign)| DecompositionTerm {
            coefficient: C64::new(sign, 0.0),
            class: TermClass::L1,
            j: 0,
            l: 0,
            factors: time.concat(rho_run(Rho4, tail)),
        })
        .collect())
}

/// `F₁ = (ν/Δx²) Σ_k f_k F₁^{(k)}` with `2s + 3` ℙ-strings; returns `(f_k, string)`.
pub fn f1_strings(s: usize) -> Vec<(f64, FactorList)> {
    let mut out = vec![
        (-2.0, rho_run(Rho4, s)),
        (1.0, rho_run(Rho4, s - 1).concat(rho_run(Rho1, 1))),
        (1.0, rho_run(Rho4, s - 1).concat(rho_run(Rho2, 1))),
    ];
    // carries across bit i−1 of the super/sub-diagonal
    for i in 2..=s {
        out.push((
            1.0,
            rho_run(Rho4, i - 2).concat(rho_run(Rho2, 1)).concat(rho_run(Rho1, s - i + 1)),
        ));
        out.push((
            1.0,
            rho_run(Rho4, i - 2).concat(rho_run(Rho1, 1)).concat(rho_run(Rho2, s - i + 1)),
        ));
    }
    // periodic corners (0, n_x − 1) and (n_x − 1, 0)
    out.push((1.0, rho_run(Rho1, s)));
    out.push((1.0, rho_run(Rho2, s)));
    out
}

/// `F₁` as `2s + 3` weighted ℙ-strings (`class = L2a`, `j = 1`, `l = 0`).
pub fn decompose_f1(grid: &GridConfig) -> Result<Vec<DecompositionTerm>> {
    grid.validate()?;
    let k = grid.nu / (grid.dx * grid.dx);
    Ok(f1_strings(grid.s())
        .into_iter()
        .map(|(f, factors)| DecompositionTerm {
            coefficient: C64::new(k * f, 0.0),
            class: TermClass::L2a,
            j: 1,
            l: 0,
            factors,
        })
        .collect())
}

/// Terms of `−Δt (I − |0⟩⟨0|) ⊗ Σ_j ρ_{f(j−1,j−1)} ⊗ A_j^(e),j`.
pub fn decompose_l2a(grid: &GridConfig) -> Result<Vec<DecompositionTerm>> {
    grid.validate()?;
    let (s, m, r, alpha) = (grid.s(), grid.m(), grid.r(), grid.alpha);
    let k = grid.nu / (grid.dx * grid.dx);
    let f1 = f1_strings(s);
    let mut out = Vec::with_capacity(alpha * (alpha + 1) * (2 * s + 3));
    for j in 1..=alpha {
        let prefix = FactorList::from_basis(block_selector(j - 1, j - 1, r))
            .concat(rho_run(Rho0, s * (alpha - j)));
        for l in 0..j {
            for (fk, string) in &f1 {
                for (time, sign) in time_projector_terms(m) {
                    let factors = time
                        .concat(prefix.clone())
                        .concat(rho_run(Rho4, s * l))
                        .concat(string.clone())
                        .concat(rho_run(Rho4, s * (j - l - 1)));
                    out.push(DecompositionTerm {
                        coefficient: C64::new(-grid.dt * sign * k * fk, 0.0),
                        class: TermClass::L2a,
                        j,
                        l,
                        factors,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// `F₂` padded to `n_x² × n_x²` equals `−(D P⁺ − D P⁻) / (2Δx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct F2Factorization {
    pub d: CompositeBlock,
    pub p_plus: CompositeBlock,
    pub p_minus: CompositeBlock,
    /// Scalar multiplying `D P⁺`; `D P⁻` carries its negative.
    pub scale: f64,
}

pub fn factor_f2(grid: &GridConfig) -> Result<F2Factorization> {
    grid.validate()?;
    let s = grid.s();
    Ok(F2Factorization {
        d: CompositeBlock::D { s },
        p_plus: CompositeBlock::PPlus { s },
        p_minus: CompositeBlock::PMinus { s },
        scale: -1.0 / (2.0 * grid.dx),
    })
}

impl F2Factorization {
    /// `D P⁺` and `D P⁻` realized.
    pub fn realize_products(&self) -> Result<(SparseMatrix, SparseMatrix)> {
        let d = self.d.realize(DEFAULT_DIM_CAP)?;
        Ok((
            d.matmul(&self.p_plus.realize(DEFAULT_DIM_CAP)?)?,
            d.matmul(&self.p_minus.realize(DEFAULT_DIM_CAP)?)?,
        ))
    }

    /// `scale · (D P⁺ − D P⁻)`.
    pub fn realize_padded_f2(&self) -> Result<SparseMatrix> {
        let (plus, minus) = self.realize_products()?;
        Ok(plus.sub(&minus)?.scale(C64::new(self.scale, 0.0)))
    }
}

/// `(ρ₀^{⊗s} ⊗ K^(n_x^l, n_x)) · (D P ⊗ I^{⊗l}) · K^(n_x², n_x^l)`.
pub fn l2b_core(s: usize, l: usize, p: CompositeBlock) -> CompositeBlock {
    let ls = l * s;
    let mut first = rho_run(Rho0, s);
    first.push(CompositeBlock::Commutation { m: ls, n: s });
    let dp = CompositeBlock::Product {
        factors: vec![
            FactorList::new(vec![CompositeBlock::D { s }.into()]),
            FactorList::new(vec![p.into()]),
        ],
    };
    let second = FactorList::new(vec![dp.into(), CompositeBlock::Identity { width: ls }.into()]);
    let third = FactorList::new(vec![CompositeBlock::Commutation { m: 2 * s, n: ls }.into()]);
    CompositeBlock::Product {
        factors: vec![first, second, third],
    }
}

/// Terms of `−Δt (I − |0⟩⟨0|) ⊗ Σ_j ρ_{f(j−1,j)} ⊗ A_{j+1}^(e),j`; empty for `α = 1`.
pub fn decompose_l2b(grid: &GridConfig) -> Result<Vec<DecompositionTerm>> {
    grid.validate()?;
    let (s, m, r, alpha) = (grid.s(), grid.m(), grid.r(), grid.alpha);
    let f2 = factor_f2(grid)?;
    let mut out = Vec::with_capacity(2 * alpha * (alpha - 1));
    for j in 1..alpha {
        let prefix = FactorList::from_basis(block_selector(j - 1, j, r))
            .concat(rho_run(Rho0, s * (alpha - j - 1)));
        for l in 0..j {
            for (p, p_sign) in [(f2.p_plus.clone(), 1.0), (f2.p_minus.clone(), -1.0)] {
                let mut body = prefix.clone();
                body.push(l2b_core(s, l, p));
                let body = body.concat(rho_run(Rho4, s * (j - l - 1)));
                for (time, sign) in time_projector_terms(m) {
                    out.push(DecompositionTerm {
                        coefficient: C64::new(-grid.dt * sign * f2.scale * p_sign, 0.0),
                        class: TermClass::L2b,
                        j,
                        l,
                        factors: time.clone().concat(body.clone()),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Every term of `L^(e) = L₁^(e) − Δt L₂^(e)`, ordered by
/// `(class, j, l, sub-term, time factor)`.
pub fn decompose_full(grid: &GridConfig) -> Result<Vec<DecompositionTerm>> {
    let mut terms = decompose_l1(grid)?;
    terms.extend(decompose_l2a(grid)?);
    terms.extend(decompose_l2b(grid)?);
    Ok(terms)
}

/// Per-class and total term counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCounts {
    pub l1: usize,
    pub l2a: usize,
    pub l2b: usize,
    pub total: usize,
}

impl TermCounts {
    /// Closed forms `log n_t + 1`, `α(α+1)(2 log n_x + 3)` and `2α(α−1)`.
    pub fn formula(grid: &GridConfig) -> Self {
        let (s, m, a) = (grid.s(), grid.m(), grid.alpha);
        let l1 = m + 1;
        let l2a = a * (a + 1) * (2 * s + 3);
        let l2b = 2 * a * (a - 1);
        Self { l1, l2a, l2b, total: term_count(grid) }
    }

    pub fn enumerate(terms: &[DecompositionTerm]) -> Self {
        let count = |c| terms.iter().filter(|t| t.class == c).count();
        Self {
            l1: count(TermClass::L1),
            l2a: count(TermClass::L2a),
            l2b: count(TermClass::L2b),
            total: terms.len(),
        }
    }
}

/// `log n_t + 2α(α+1) log n_x + α(5α+1) + 1`.
pub fn term_count(grid: &GridConfig) -> usize {
    let (s, m, a) = (grid.s(), grid.m(), grid.alpha);
    m + 2 * a * (a + 1) * s + a * (5 * a + 1) + 1
}

/// `Σ_l c_l realize(L_l)`.
pub fn reconstruct(terms: &[DecompositionTerm], cap: usize) -> Result<SparseMatrix> {
    let Some(first) = terms.first() else {
        return Err(Error::MalformedTerm("empty term list".into()));
    };
    let n = first.factors.dim();
    let realized: Vec<SparseMatrix> = terms
        .iter()
        .map(|t| t.realize_with_cap(cap))
        .collect::<Result<_>>()?;
    SparseMatrix::linear_combination(
        n,
        n,
        terms.iter().zip(&realized).map(|(t, m)| (t.coefficient, m)),
    )
}

/// Grid parameters echoed into a term-list document.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermConfig {
    pub nx: usize,
    pub nt: usize,
    pub alpha: usize,
    pub dx: f64,
    pub dt: f64,
    pub nu: f64,
}

/// `{schema_version, config, terms}` as written by `carleman decompose`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermDocument {
    pub schema_version: u32,
    pub config: TermConfig,
    pub terms: Vec<DecompositionTerm>,
}

impl TermDocument {
    pub fn new(grid: &GridConfig, terms: Vec<DecompositionTerm>) -> Self {
        Self {
            schema_version: TERM_SCHEMA_VERSION,
            config: TermConfig {
                nx: grid.n_x,
                nt: grid.n_t,
                alpha: grid.alpha,
                dx: grid.dx,
                dt: grid.dt,
                nu: grid.nu,
            },
            terms,
        }
    }
}
