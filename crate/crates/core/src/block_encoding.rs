//! Unitary completions and `U = U₁ U₂` block encodings of decomposition terms.
//!
//! For a term `L` with unitary completion `L̄`, `U₂ = I ⊗ L̄` and `U₁` flips
//! the ancilla exactly on the support of the projector `L Lᵀ`, which is a
//! tensor product of `ρ₀`, `ρ₃` and `ρ₄`. `U₁` is therefore a single `C^qX`
//! with one control per non-identity factor. The ancilla is qubit 0 and the
//! encoded term sits in the block with ancilla `|0⟩` rows and `|1⟩` columns.

use serde::{Deserialize, Serialize};

use crate::basis::{rho_bar, BasisFactor, Factor, FactorList};
use crate::circuits::{circuit_to_matrix, Circuit, Gate, MATRIX_WIDTH_CAP};
use crate::decomposition::{CompositeBlock, DecompositionTerm};
use crate::error::{Error, Result};
use crate::sparse::{SparseMatrix, C64, ONE};

/// Widest register (ancilla included) for which [`verify_encoding`] builds matrices.
pub const VERIFY_WIDTH_CAP: usize = 12;

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedTerm(msg.into())
}

fn complete_factor(f: &Factor) -> Result<Factor> {
    Ok(match f {
        Factor::Basis(b) if b.is_rho() => Factor::Basis(rho_bar(*b)?),
        Factor::Basis(b) if b.is_unitary() => Factor::Basis(*b),
        Factor::Basis(b) => return Err(malformed(format!("no completion rule for {b}"))),
        Factor::Block(block) => Factor::Block(match block {
            CompositeBlock::D { s } => CompositeBlock::Identity { width: 2 * s },
            CompositeBlock::Product { factors } => CompositeBlock::Product {
                factors: factors.iter().map(complete_list).collect::<Result<_>>()?,
            },
            other => other.clone(),
        }),
    })
}

fn complete_list(list: &FactorList) -> Result<FactorList> {
    Ok(FactorList::new(list.factors.iter().map(complete_factor).collect::<Result<_>>()?))
}

/// Unitary completion `L̄`: `ρ̄` on every ℙ factor, `D` replaced by the
/// identity, permutation and commutation blocks kept as they are.
pub fn completion(term: &DecompositionTerm) -> Result<FactorList> {
    complete_list(&term.factors)
}

/// `L^c = realize(L̄) − realize(L)`.
pub fn complement(term: &DecompositionTerm) -> Result<SparseMatrix> {
    completion(term)?.realize()?.sub(&term.realize()?)
}

/// `ρ g ρᵀ` for a diagonal projector factor `g ∈ {ρ₀, ρ₃, ρ₄}`; `None` when zero.
fn conj_basis(f: BasisFactor, g: BasisFactor) -> Result<Option<BasisFactor>> {
    let m = f.matrix();
    let gm = g.matrix();
    // (m g mᵀ)[a][b] = Σ_k m[a][k] g[k][k] m[b][k]
    let e = |a: usize, b: usize| (0..2).map(|k| m[a][k] * gm[k][k] * m[b][k]).sum::<C64>();
    let d = [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]];
    let one = |z: C64| (z - ONE).norm() < 1e-15;
    let zero = |z: C64| z.norm() < 1e-15;
    if !zero(d[0][1]) || !zero(d[1][0]) {
        return Err(malformed(format!("{f} does not map diagonal projectors to diagonal ones")));
    }
    Ok(match (one(d[0][0]), one(d[1][1]), zero(d[0][0]), zero(d[1][1])) {
        (true, true, _, _) => Some(BasisFactor::Rho4),
        (true, _, _, true) => Some(BasisFactor::Rho0),
        (_, true, true, _) => Some(BasisFactor::Rho3),
        (_, _, true, true) => None,
        _ => return Err(malformed(format!("{f} has non-binary gram entries"))),
    })
}

/// `L G Lᵀ` for a projector string `G`, computed factor by factor.
fn conj_list(list: &FactorList, g: &[BasisFactor]) -> Result<Option<Vec<BasisFactor>>> {
    if list.total_qubits() != g.len() {
        return Err(malformed("width mismatch in gram computation"));
    }
    let mut out = Vec::with_capacity(g.len());
    let mut at = 0;
    for f in &list.factors {
        let w = f.width();
        let slot = &g[at..at + w];
        match f {
            Factor::Basis(b) => match conj_basis(*b, slot[0])? {
                Some(r) => out.push(r),
                None => return Ok(None),
            },
            Factor::Block(CompositeBlock::D { s }) => {
                for (k, &gk) in slot.iter().enumerate() {
                    let d = if k < *s { BasisFactor::Rho0 } else { BasisFactor::Rho4 };
                    match conj_basis(d, gk)? {
                        Some(r) => out.push(r),
                        None => return Ok(None),
                    }
                }
            }
            Factor::Block(CompositeBlock::Product { factors }) => {
                let mut cur = slot.to_vec();
                for inner in factors.iter().rev() {
                    match conj_list(inner, &cur)? {
                        Some(next) => cur = next,
                        None => return Ok(None),
                    }
                }
                out.extend(cur);
            }
            Factor::Block(block) => {
                // permutations leave the identity invariant
                if slot.iter().any(|&x| x != BasisFactor::Rho4) {
                    return Err(malformed(format!(
                        "cannot conjugate a non-identity projector by {block:?}"
                    )));
                }
                out.extend_from_slice(slot);
            }
        }
        at += w;
    }
    Ok(Some(out))
}

/// Structural `L Lᵀ` as a string of `ρ₀ / ρ₃ / ρ₄` factors, one per qubit.
pub fn gram_projector(term: &DecompositionTerm) -> Result<Vec<BasisFactor>> {
    let q = term.factors.total_qubits();
    conj_list(&term.factors, &vec![BasisFactor::Rho4; q])?
        .ok_or_else(|| malformed("term realizes the zero matrix"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Control {
    pub qubit: usize,
    /// `true`: fire on `|1⟩`; `false`: fire on `|0⟩`.
    pub on_one: bool,
}

/// `U₁`: one multi-controlled X on the ancilla.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct U1Descriptor {
    pub controls: Vec<Control>,
    pub target: usize,
}

impl U1Descriptor {
    /// Number of controls `q` of the `C^qX`.
    pub fn q(&self) -> usize {
        self.controls.len()
    }

    /// `C^qX` with open controls conjugated by X gates.
    pub fn to_circuit(&self, width: usize) -> Circuit {
        let mut c = Circuit::new(width);
        let open: Vec<usize> = self.controls.iter().filter(|k| !k.on_one).map(|k| k.qubit).collect();
        open.iter().for_each(|&q| c.push(Gate::x(q)));
        let qubits: Vec<usize> = self.controls.iter().map(|k| k.qubit).collect();
        c.push(Gate::mcx(&qubits, self.target));
        open.iter().for_each(|&q| c.push(Gate::x(q)));
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockEncoding {
    pub u1: U1Descriptor,
    /// Circuit for `I ⊗ L̄` on the full register.
    pub u2: Circuit,
    pub width: usize,
}

impl BlockEncoding {
    /// `U = U₁ U₂` as one circuit: the `U₂` gates, then `U₁`.
    pub fn circuit(&self) -> Circuit {
        let mut c = self.u2.clone();
        c.gates.extend(self.u1.to_circuit(self.width).gates);
        c
    }
}

/// Appends the gates of a unitary factor list acting on qubits `offset..`.
fn emit_unitary(list: &FactorList, offset: usize, c: &mut Circuit) -> Result<()> {
    let mut at = offset;
    for f in &list.factors {
        match f {
            Factor::Basis(BasisFactor::Sigma0) => c.push(Gate::x(at)),
            Factor::Basis(BasisFactor::Sigma2) => c.push(Gate::z(at)),
            Factor::Basis(BasisFactor::Sigma1) => {
                // Y = i X Z; the global phase is irrelevant for X-only completions
                return Err(malformed("Y factors are not produced by ℙ completions"));
            }
            Factor::Basis(BasisFactor::Sigma3 | BasisFactor::Rho4) => {}
            Factor::Basis(b) => return Err(malformed(format!("non-unitary factor {b} in completion"))),
            Factor::Block(CompositeBlock::Product { factors }) => {
                // the rightmost matrix acts first
                for inner in factors.iter().rev() {
                    emit_unitary(inner, at, c)?;
                }
            }
            Factor::Block(block) => {
                let sub = block
                    .circuit()
                    .ok_or_else(|| malformed(format!("no circuit for {block:?}")))?;
                c.append_shifted(&sub, at);
            }
        }
        at += f.width();
    }
    Ok(())
}

/// Builds `U₁` from `L Lᵀ` and `U₂` from the completion.
pub fn block_encode(term: &DecompositionTerm) -> Result<BlockEncoding> {
    let width = term.factors.total_qubits() + 1;
    let gram = gram_projector(term)?;
    let controls = gram
        .iter()
        .enumerate()
        .filter_map(|(k, g)| match g {
            BasisFactor::Rho0 => Some(Control { qubit: k + 1, on_one: false }),
            BasisFactor::Rho3 => Some(Control { qubit: k + 1, on_one: true }),
            _ => None,
        })
        .collect();
    let mut u2 = Circuit::new(width);
    emit_unitary(&completion(term)?, 1, &mut u2)?;
    Ok(BlockEncoding {
        u1: U1Descriptor { controls, target: 0 },
        u2,
        width,
    })
}

/// Numerical check of one encoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingReport {
    pub width: usize,
    pub q: usize,
    pub u1_unitarity: f64,
    pub u2_unitarity: f64,
    pub u_unitarity: f64,
    /// Max-abs error of the top-right block against the term realization.
    pub block_error: f64,
    /// `‖(LLᵀ)² − LLᵀ‖_max`.
    pub idempotency_error: f64,
    /// Max-abs error between the structural and realized `LLᵀ`.
    pub gram_error: f64,
    pub tolerance: f64,
    /// Location of the largest block mismatch when the check fails.
    pub mismatch: Option<String>,
}

impl EncodingReport {
    pub fn passed(&self) -> bool {
        [
            self.u1_unitarity,
            self.u2_unitarity,
            self.u_unitarity,
            self.block_error,
            self.idempotency_error,
            self.gram_error,
        ]
        .iter()
        .all(|&e| e <= self.tolerance)
    }
}

fn top_right(u: &SparseMatrix, n: usize) -> SparseMatrix {
    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (n..2 * n).collect();
    u.select(&rows, &cols)
}

/// Realizes `U₁`, `U₂` and `U₁U₂` and checks unitarity, the encoded block and
/// the projector identities; requires `width ≤ 12`.
pub fn verify_encoding(enc: &BlockEncoding, term: &DecompositionTerm) -> Result<EncodingReport> {
    if enc.width > VERIFY_WIDTH_CAP || enc.width > MATRIX_WIDTH_CAP {
        return Err(Error::SizeCap { dim: 1 << enc.width.min(40), cap: 1 << VERIFY_WIDTH_CAP });
    }
    let tolerance = 1e-12;
    let u1 = circuit_to_matrix(&enc.u1.to_circuit(enc.width))?;
    let u2 = circuit_to_matrix(&enc.u2)?;
    let u = u1.matmul(&u2)?;
    let l = term.realize()?;
    let n = l.nrows();
    if 2 * n != u.nrows() {
        return Err(Error::DimensionMismatch { expected: 2 * n, found: u.nrows() });
    }
    let block = top_right(&u, n);
    let diff = block.sub(&l)?;
    let mut worst = (0.0, 0, 0);
    for (r, c, v) in diff.iter() {
        if v.norm() > worst.0 {
            worst = (v.norm(), r, c);
        }
    }
    let llt = l.matmul(&l.adjoint())?;
    let gram = FactorList::from_basis(gram_projector(term)?).realize()?;
    let report = EncodingReport {
        width: enc.width,
        q: enc.u1.q(),
        u1_unitarity: u1.unitarity_error()?,
        u2_unitarity: u2.unitarity_error()?,
        u_unitarity: u.unitarity_error()?,
        block_error: worst.0,
        idempotency_error: llt.matmul(&llt)?.max_abs_diff(&llt)?,
        gram_error: gram.max_abs_diff(&llt)?,
        tolerance,
        mismatch: (worst.0 > tolerance).then(|| {
            format!("top-right block differs by {:.3e} at row {}, column {}", worst.0, worst.1, worst.2)
        }),
    };
    Ok(report)
}

/// Residuals of the completion identities for one term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompletionIdentities {
    /// `‖L̄L̄ᵀ − I‖`
    pub completion_unitarity: f64,
    /// `‖L̄Lᵀ − LLᵀ‖`
    pub left_gram: f64,
    /// `‖LL̄ᵀ − LLᵀ‖`
    pub right_gram: f64,
    /// `‖(LLᵀ)² − LLᵀ‖`
    pub idempotency: f64,
    /// `‖L^c Lᵀ‖`
    pub complement_orthogonality: f64,
    /// `‖L^c L^cᵀ − (I − LLᵀ)‖`
    pub complement_gram: f64,
}

impl CompletionIdentities {
    pub fn max(&self) -> f64 {
        [
            self.completion_unitarity,
            self.left_gram,
            self.right_gram,
            self.idempotency,
            self.complement_orthogonality,
            self.complement_gram,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn completion_identities(term: &DecompositionTerm) -> Result<CompletionIdentities> {
    let l = term.realize()?;
    let bar = completion(term)?.realize()?;
    let lc = bar.sub(&l)?;
    let lt = l.adjoint();
    let llt = l.matmul(&lt)?;
    let id = SparseMatrix::identity(l.nrows());
    Ok(CompletionIdentities {
        completion_unitarity: bar.unitarity_error()?,
        left_gram: bar.matmul(&lt)?.max_abs_diff(&llt)?,
        right_gram: l.matmul(&bar.adjoint())?.max_abs_diff(&llt)?,
        idempotency: llt.matmul(&llt)?.max_abs_diff(&llt)?,
        complement_orthogonality: lc.matmul(&lt)?.max_abs(),
        complement_gram: lc.matmul(&lc.adjoint())?.max_abs_diff(&id.sub(&llt)?)?,
    })
}
