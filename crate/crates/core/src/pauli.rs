//! Pauli-basis expansion used as an independent count oracle.

use rayon::prelude::*;

use crate::error::{exact_log2, invalid, Result};
use crate::sparse::{SparseMatrix, C64, ZERO};

/// Largest register size accepted by [`pauli_decompose`].
pub const PAULI_MAX_QUBITS: usize = 10;

/// Coefficients with modulus at or below this are dropped.
pub const PAULI_PRUNE_TOL: f64 = 1e-12;

/// One Pauli string `c · P_0 ⊗ … ⊗ P_{Q−1}`, written with the letters
/// `I, X, Y, Z` (qubit 0 first).
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: C64,
    pub x_mask: usize,
    pub z_mask: usize,
    pub qubits: usize,
}

impl PauliTerm {
    pub fn label(&self) -> String {
        (0..self.qubits)
            .map(|k| {
                let b = 1 << (self.qubits - 1 - k);
                match (self.x_mask & b != 0, self.z_mask & b != 0) {
                    (false, false) => 'I',
                    (true, false) => 'X',
                    (true, true) => 'Y',
                    (false, true) => 'Z',
                }
            })
            .collect()
    }

    /// Sparse realization of the (unscaled) Pauli string.
    pub fn to_sparse(&self) -> SparseMatrix {
        let n = 1usize << self.qubits;
        let phase = i_power((self.x_mask & self.z_mask).count_ones());
        let triplets = (0..n)
            .map(|r| {
                let c = r ^ self.x_mask;
                (r, c, phase * sign((c & self.z_mask).count_ones()))
            })
            .collect();
        SparseMatrix::from_triplets(n, n, triplets)
    }
}

fn i_power(k: u32) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

fn sign(k: u32) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `c_P = Tr(P† M) / 2^Q` over all `4^Q` strings, keeping `|c_P| > 1e−12`.
///
/// Each entry `M[r, c]` only meets strings with `x = r ⊕ c`, so the scan is
/// grouped by X-mask and runs in parallel over groups.
pub fn pauli_decompose(m: &SparseMatrix) -> Result<Vec<PauliTerm>> {
    let n = m.nrows();
    let q = exact_log2(n)
        .filter(|_| m.is_square())
        .ok_or_else(|| invalid(format!("matrix of shape {:?} is not 2^Q square", m.shape())))?;
    if q > PAULI_MAX_QUBITS {
        return Err(invalid(format!("{q} qubits exceeds the Pauli oracle cap {PAULI_MAX_QUBITS}")));
    }
    let mut groups: Vec<Vec<(usize, C64)>> = vec![Vec::new(); n];
    for (r, c, v) in m.iter() {
        groups[r ^ c].push((c, v));
    }
    let norm = 1.0 / n as f64;
    let mut terms: Vec<PauliTerm> = groups
        .par_iter()
        .enumerate()
        .flat_map_iter(|(x, entries)| {
            (0..n).filter_map(move |z| {
                if entries.is_empty() {
                    return None;
                }
                let phase = i_power((x & z).count_ones()).conj();
                let sum: C64 = entries
                    .iter()
                    .map(|&(c, v)| v * sign((c & z).count_ones()))
                    .fold(ZERO, |a, b| a + b);
                let coefficient = sum * phase * norm;
                (coefficient.norm() > PAULI_PRUNE_TOL).then_some(PauliTerm {
                    coefficient,
                    x_mask: x,
                    z_mask: z,
                    qubits: q,
                })
            })
        })
        .collect();
    terms.sort_by_key(|t| (t.x_mask, t.z_mask));
    Ok(terms)
}

/// `Σ c_P P`.
pub fn pauli_reconstruct(terms: &[PauliTerm], qubits: usize) -> Result<SparseMatrix> {
    let n = 1usize << qubits;
    let mats: Vec<SparseMatrix> = terms.iter().map(PauliTerm::to_sparse).collect();
    SparseMatrix::linear_combination(n, n, terms.iter().zip(&mats).map(|(t, m)| (t.coefficient, m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{BasisFactor, FactorList};

    #[test]
    fn identity_is_single_term() {
        for q in 1..=5 {
            let t = pauli_decompose(&SparseMatrix::identity(1 << q)).unwrap();
            assert_eq!(t.len(), 1);
            assert_eq!(t[0].label(), "I".repeat(q));
            assert!((t[0].coefficient - C64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn letters_match_sigma_matrices() {
        use BasisFactor::*;
        let m = FactorList::from_basis([Sigma0, Sigma1, Sigma2, Sigma3]).realize().unwrap();
        let t = pauli_decompose(&m).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].label(), "XYZI");
        assert!((t[0].coefficient - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(t[0].to_sparse(), m);
    }

    #[test]
    fn rho1_splits_into_x_and_y() {
        let t = pauli_decompose(&BasisFactor::Rho1.to_sparse()).unwrap();
        let labels: Vec<String> = t.iter().map(PauliTerm::label).collect();
        assert_eq!(labels, vec!["X", "Y"]);
    }

    #[test]
    fn non_power_of_two_rejected() {
        assert!(pauli_decompose(&SparseMatrix::identity(3)).is_err());
    }
}
