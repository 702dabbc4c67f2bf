//! Gate-level circuit IR, the permutation circuits behind `F₂` and the
//! commutation matrices, and a statevector simulator.
//!
//! Conventions: qubit 0 is the most significant bit of a basis index, and the
//! gates of a [`Circuit`] act on the state in list order, so the realized
//! operator is the product of gate matrices in reverse list order.
//!
//! Gate products are conventionally written least-significant qubit first; the
//! constructors below map that index `p` to register qubit `w − 1 − p`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sparse::{SparseMatrix, C64, ONE, ZERO};

/// Largest register width that [`circuit_to_matrix`] will realize.
pub const MATRIX_WIDTH_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    X,
    Z,
    Ry,
    Rz,
    /// `qubits = [control, target]`.
    Cx,
    /// `qubits = [controls…, target]`, at least two controls.
    Mcx,
    Swap,
    Cz,
    /// Controlled `RY`, `qubits = [control, target]`.
    Cry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
}

impl Gate {
    fn plain(kind: GateKind, qubits: Vec<usize>) -> Self {
        Self { kind, qubits, param: None }
    }

    pub fn x(q: usize) -> Self {
        Self::plain(GateKind::X, vec![q])
    }

    pub fn z(q: usize) -> Self {
        Self::plain(GateKind::Z, vec![q])
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::plain(GateKind::Cx, vec![control, target])
    }

    /// `C^qX` with `q = controls.len()`; `q = 0` is `X` and `q = 1` is `CX`.
    pub fn mcx(controls: &[usize], target: usize) -> Self {
        match controls {
            [] => Self::x(target),
            [c] => Self::cx(*c, target),
            _ => {
                let mut qubits = controls.to_vec();
                qubits.push(target);
                Self::plain(GateKind::Mcx, qubits)
            }
        }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::plain(GateKind::Swap, vec![a, b])
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Self::plain(GateKind::Cz, vec![a, b])
    }

    pub fn ry(q: usize, theta: f64) -> Self {
        Self { kind: GateKind::Ry, qubits: vec![q], param: Some(theta) }
    }

    pub fn rz(q: usize, theta: f64) -> Self {
        Self { kind: GateKind::Rz, qubits: vec![q], param: Some(theta) }
    }

    pub fn cry(control: usize, target: usize, theta: f64) -> Self {
        Self { kind: GateKind::Cry, qubits: vec![control, target], param: Some(theta) }
    }

    /// Number of controls for X-type gates.
    pub fn control_count(&self) -> usize {
        match self.kind {
            GateKind::X => 0,
            GateKind::Cx => 1,
            GateKind::Mcx => self.qubits.len() - 1,
            _ => 0,
        }
    }

    /// Permutes basis states without phases.
    pub fn is_classical(&self) -> bool {
        matches!(self.kind, GateKind::X | GateKind::Cx | GateKind::Mcx | GateKind::Swap)
    }

    fn validate(&self, width: usize) -> Result<()> {
        let arity_ok = match self.kind {
            GateKind::X | GateKind::Z | GateKind::Ry | GateKind::Rz => self.qubits.len() == 1,
            GateKind::Cx | GateKind::Swap | GateKind::Cz | GateKind::Cry => self.qubits.len() == 2,
            GateKind::Mcx => self.qubits.len() >= 3,
        };
        let param_ok = matches!(self.kind, GateKind::Ry | GateKind::Rz | GateKind::Cry) == self.param.is_some();
        if !arity_ok || !param_ok {
            return Err(invalid(format!("malformed {:?} gate on {:?}", self.kind, self.qubits)));
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= width {
                return Err(invalid(format!("qubit {q} outside register of width {width}")));
            }
            if self.qubits[..i].contains(&q) {
                return Err(invalid(format!("repeated qubit {q} in {:?} gate", self.kind)));
            }
        }
        Ok(())
    }

    /// Inverse gate.
    pub fn inverse(&self) -> Self {
        let mut g = self.clone();
        if let Some(p) = g.param.as_mut() {
            *p = -*p;
        }
        g
    }
}

/// An ordered gate list over `width` qubits.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Circuit {
    pub width: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Self { width, gates: Vec::new() }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn validate(&self) -> Result<()> {
        self.gates.iter().try_for_each(|g| g.validate(self.width))
    }

    /// Appends `other`'s gates with every qubit shifted by `offset`.
    pub fn append_shifted(&mut self, other: &Circuit, offset: usize) {
        self.gates.extend(other.gates.iter().map(|g| Gate {
            qubits: g.qubits.iter().map(|q| q + offset).collect(),
            ..g.clone()
        }));
    }

    /// The inverse circuit (reversed order, negated angles).
    pub fn inverse(&self) -> Self {
        Self {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    pub fn is_classical(&self) -> bool {
        self.gates.iter().all(Gate::is_classical)
    }

    /// For circuits made only of X/CX/C^qX/SWAP: `map[c]` is the image of
    /// basis state `c`.
    pub fn permutation_map(&self) -> Option<Vec<usize>> {
        if !self.is_classical() || self.width >= usize::BITS as usize {
            return None;
        }
        let masks: Vec<(usize, usize, usize)> = self
            .gates
            .iter()
            .map(|g| classical_masks(g, self.width))
            .collect();
        Some(
            (0..1usize << self.width)
                .map(|mut c| {
                    for &(ctrl, flip, swap) in &masks {
                        c = apply_classical(c, ctrl, flip, swap);
                    }
                    c
                })
                .collect(),
        )
    }
}

#[inline]
fn bit(width: usize, q: usize) -> usize {
    1usize << (width - 1 - q)
}

/// `(control mask, flip mask, swap partner mask)`; for SWAP the two bits are
/// carried in `flip` and `swap` is nonzero.
fn classical_masks(g: &Gate, width: usize) -> (usize, usize, usize) {
    match g.kind {
        GateKind::Swap => (0, bit(width, g.qubits[0]), bit(width, g.qubits[1])),
        _ => {
            let (target, controls) = g.qubits.split_last().expect("non-empty gate");
            let ctrl = controls.iter().fold(0, |m, &q| m | bit(width, q));
            (ctrl, bit(width, *target), 0)
        }
    }
}

#[inline]
fn apply_classical(c: usize, ctrl: usize, flip: usize, swap: usize) -> usize {
    if swap != 0 {
        let (a, b) = (c & flip != 0, c & swap != 0);
        if a != b {
            c ^ flip ^ swap
        } else {
            c
        }
    } else if c & ctrl == ctrl {
        c ^ flip
    } else {
        c
    }
}

fn mirror(width: usize, p: usize) -> usize {
    width - 1 - p
}

/// `P₁ = ∏_{q=0}^{s−1} CX(s−q−1, 2s−q−1)` on `2s` qubits: XORs the low
/// register into the high one, sending `|0, j⟩ ↦ |j, j⟩ = |(n_x + 1) j⟩`.
pub fn p1_circuit(s: usize) -> Circuit {
    let w = 2 * s;
    let mut c = Circuit::new(w);
    for q in 0..s {
        c.push(Gate::cx(mirror(w, s - q - 1), mirror(w, 2 * s - q - 1)));
    }
    c
}

/// `P₂⁺ = X₀ CX(0,1) ∏_{q=0}^{s−3} C^{q+2}X(0,…,q+2)`: decrements the low
/// `s`-qubit register modulo `n_x`.
pub fn p2_plus_circuit(s: usize) -> Circuit {
    let w = 2 * s;
    let mut c = Circuit::new(w);
    c.push(Gate::x(mirror(w, 0)));
    c.push(Gate::cx(mirror(w, 0), mirror(w, 1)));
    for q in 0..s.saturating_sub(2) {
        let controls: Vec<usize> = (0..q + 2).map(|p| mirror(w, p)).collect();
        c.push(Gate::mcx(&controls, mirror(w, q + 2)));
    }
    c
}

/// `P₂⁻ = (∏_{q=0}^{s−3} C^{s−q−1}X(0,…,s−q−1)) CX(0,1) X₀`: increments the
/// low register modulo `n_x`, the inverse of [`p2_plus_circuit`].
pub fn p2_minus_circuit(s: usize) -> Circuit {
    let w = 2 * s;
    let mut c = Circuit::new(w);
    for q in 0..s.saturating_sub(2) {
        let top = s - q - 1;
        let controls: Vec<usize> = (0..top).map(|p| mirror(w, p)).collect();
        c.push(Gate::mcx(&controls, mirror(w, top)));
    }
    c.push(Gate::cx(mirror(w, 0), mirror(w, 1)));
    c.push(Gate::x(mirror(w, 0)));
    c
}

fn then(first: Circuit, second: &Circuit) -> Circuit {
    let mut c = first;
    c.gates.extend(second.gates.iter().cloned());
    c
}

/// `P⁺ = P₂⁺ P₁`: the `P₂⁺` gates followed by the `P₁` gates.
pub fn p_plus_circuit(s: usize) -> Circuit {
    then(p2_plus_circuit(s), &p1_circuit(s))
}

/// `P⁻ = P₂⁻ P₁`.
pub fn p_minus_circuit(s: usize) -> Circuit {
    then(p2_minus_circuit(s), &p1_circuit(s))
}

/// SWAP network `∏_{r=0}^{n−1} ∏_{q=0}^{m−1} S(r+m−q−1, r+m−q)` realizing
/// `K^(2^m, 2^n)` on `m + n` qubits.
pub fn commutation_circuit(m: usize, n: usize) -> Circuit {
    let w = m + n;
    let mut c = Circuit::new(w);
    for r in 0..n {
        for q in 0..m {
            c.push(Gate::swap(mirror(w, r + m - q - 1), mirror(w, r + m - q)));
        }
    }
    c
}

/// Realizes `c` as a sparse unitary by simulating every basis column.
pub fn circuit_to_matrix(c: &Circuit) -> Result<SparseMatrix> {
    c.validate()?;
    if c.width > MATRIX_WIDTH_CAP {
        return Err(Error::SizeCap { dim: 1 << c.width.min(40), cap: 1 << MATRIX_WIDTH_CAP });
    }
    if let Some(map) = c.permutation_map() {
        return Ok(SparseMatrix::from_column_map(&map));
    }
    let n = 1usize << c.width;
    let mut triplets = Vec::new();
    for col in 0..n {
        let mut state: Vec<(usize, C64)> = vec![(col, ONE)];
        for g in &c.gates {
            state = apply_sparse(g, c.width, state);
        }
        triplets.extend(state.into_iter().map(|(r, v)| (r, col, v)));
    }
    Ok(SparseMatrix::from_triplets(n, n, triplets))
}

fn ry_entries(theta: f64) -> (f64, f64) {
    ((theta / 2.0).cos(), (theta / 2.0).sin())
}

/// Applies one gate to a sparse state, merging coincident amplitudes.
fn apply_sparse(g: &Gate, width: usize, state: Vec<(usize, C64)>) -> Vec<(usize, C64)> {
    if g.is_classical() {
        let (ctrl, flip, swap) = classical_masks(g, width);
        return state
            .into_iter()
            .map(|(i, v)| (apply_classical(i, ctrl, flip, swap), v))
            .collect();
    }
    let mut out: Vec<(usize, C64)> = Vec::with_capacity(state.len() * 2);
    match g.kind {
        GateKind::Z | GateKind::Cz => {
            let mask = g.qubits.iter().fold(0, |m, &q| m | bit(width, q));
            out.extend(state.into_iter().map(|(i, v)| (i, if i & mask == mask { -v } else { v })));
        }
        GateKind::Rz => {
            let b = bit(width, g.qubits[0]);
            let half = g.param.unwrap_or(0.0) / 2.0;
            let (lo, hi) = (C64::from_polar(1.0, -half), C64::from_polar(1.0, half));
            out.extend(state.into_iter().map(|(i, v)| (i, v * if i & b != 0 { hi } else { lo })));
        }
        GateKind::Ry | GateKind::Cry => {
            let (ctrl, target) = if g.kind == GateKind::Cry {
                (bit(width, g.qubits[0]), bit(width, g.qubits[1]))
            } else {
                (0, bit(width, g.qubits[0]))
            };
            let (cs, sn) = ry_entries(g.param.unwrap_or(0.0));
            for (i, v) in state {
                if i & ctrl != ctrl {
                    out.push((i, v));
                } else if i & target == 0 {
                    out.push((i, v * cs));
                    out.push((i | target, v * sn));
                } else {
                    out.push((i ^ target, -v * sn));
                    out.push((i, v * cs));
                }
            }
            out.sort_unstable_by_key(|e| e.0);
            out.dedup_by(|b, a| {
                if a.0 == b.0 {
                    a.1 += b.1;
                    true
                } else {
                    false
                }
            });
            out.retain(|e| e.1 != ZERO);
        }
        _ => unreachable!("classical gates handled above"),
    }
    out
}

/// Applies `c` to `psi` in place, gate by gate.
pub fn apply_in_place(c: &Circuit, psi: &mut [C64]) -> Result<()> {
    if psi.len() != 1usize << c.width {
        return Err(Error::DimensionMismatch { expected: 1 << c.width, found: psi.len() });
    }
    c.validate()?;
    let w = c.width;
    for g in &c.gates {
        match g.kind {
            GateKind::X | GateKind::Cx | GateKind::Mcx => {
                let (ctrl, flip, _) = classical_masks(g, w);
                for i in 0..psi.len() {
                    if i & flip == 0 && i & ctrl == ctrl {
                        psi.swap(i, i | flip);
                    }
                }
            }
            GateKind::Swap => {
                let (a, b) = (bit(w, g.qubits[0]), bit(w, g.qubits[1]));
                for i in 0..psi.len() {
                    if i & a != 0 && i & b == 0 {
                        psi.swap(i, i ^ a ^ b);
                    }
                }
            }
            GateKind::Z | GateKind::Cz => {
                let mask = g.qubits.iter().fold(0, |m, &q| m | bit(w, q));
                psi.iter_mut()
                    .enumerate()
                    .filter(|(i, _)| i & mask == mask)
                    .for_each(|(_, v)| *v = -*v);
            }
            GateKind::Rz => {
                let b = bit(w, g.qubits[0]);
                let half = g.param.unwrap_or(0.0) / 2.0;
                let (lo, hi) = (C64::from_polar(1.0, -half), C64::from_polar(1.0, half));
                psi.iter_mut()
                    .enumerate()
                    .for_each(|(i, v)| *v *= if i & b != 0 { hi } else { lo });
            }
            GateKind::Ry | GateKind::Cry => {
                let (ctrl, target) = if g.kind == GateKind::Cry {
                    (bit(w, g.qubits[0]), bit(w, g.qubits[1]))
                } else {
                    (0, bit(w, g.qubits[0]))
                };
                let (cs, sn) = ry_entries(g.param.unwrap_or(0.0));
                for i in 0..psi.len() {
                    if i & target == 0 && i & ctrl == ctrl {
                        let (a, b) = (psi[i], psi[i | target]);
                        psi[i] = a * cs - b * sn;
                        psi[i | target] = a * sn + b * cs;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Returns `c |ψ⟩`.
pub fn apply(c: &Circuit, psi: &[C64]) -> Result<Vec<C64>> {
    let mut out = psi.to_vec();
    apply_in_place(c, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisFactor;
    use crate::embedding::commutation_matrix;

    fn basis(width: usize, i: usize) -> Vec<C64> {
        let mut v = vec![ZERO; 1 << width];
        v[i] = ONE;
        v
    }

    #[test]
    fn empty_circuit_is_identity() {
        assert_eq!(circuit_to_matrix(&Circuit::new(3)).unwrap(), SparseMatrix::identity(8));
    }

    #[test]
    fn x_on_qubit_zero_is_most_significant() {
        let mut c = Circuit::new(2);
        c.push(Gate::x(0));
        let expected = BasisFactor::Sigma0.to_sparse().kron(&SparseMatrix::identity(2));
        assert_eq!(circuit_to_matrix(&c).unwrap(), expected);
        assert_eq!(apply(&c, &basis(2, 0)).unwrap(), basis(2, 2));
    }

    #[test]
    fn swap_on_01() {
        let mut c = Circuit::new(2);
        c.push(Gate::swap(0, 1));
        assert_eq!(apply(&c, &basis(2, 1)).unwrap(), basis(2, 2));
    }

    #[test]
    fn p1_is_modular_multiplication() {
        for s in [2, 3] {
            let nx = 1 << s;
            let map = p1_circuit(s).permutation_map().unwrap();
            for j in 0..nx {
                assert_eq!(map[j], (nx + 1) * j % (nx * nx));
            }
        }
        assert_eq!(p1_circuit(2).permutation_map().unwrap()[1], 5);
    }

    #[test]
    fn p2_minus_inverts_p2_plus() {
        for s in 2..=5 {
            let mut both = p2_plus_circuit(s);
            both.gates.extend(p2_minus_circuit(s).gates);
            let map = both.permutation_map().unwrap();
            assert!(map.iter().enumerate().all(|(i, &m)| i == m));
            assert_eq!(p2_plus_circuit(s).gates.len(), s);
        }
    }

    #[test]
    fn commutation_circuits_match_definition() {
        for m in 0..=4 {
            for n in 0..=4 {
                let c = commutation_circuit(m, n);
                assert_eq!(c.gates.len(), m * n);
                let k = commutation_matrix(1 << m, 1 << n).unwrap();
                assert_eq!(circuit_to_matrix(&c).unwrap(), k, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn ry_rotation_matrix() {
        let mut c = Circuit::new(1);
        c.push(Gate::ry(0, 0.7));
        let m = circuit_to_matrix(&c).unwrap();
        let (cs, sn) = ((0.35f64).cos(), (0.35f64).sin());
        assert!((m.get(0, 0).re - cs).abs() < 1e-15);
        assert!((m.get(0, 1).re + sn).abs() < 1e-15);
        assert!((m.get(1, 0).re - sn).abs() < 1e-15);
    }

    #[test]
    fn invalid_gates_are_rejected() {
        let mut c = Circuit::new(2);
        c.push(Gate::cx(1, 1));
        assert!(c.validate().is_err());
        let mut c = Circuit::new(2);
        c.push(Gate::x(2));
        assert!(apply(&c, &basis(2, 0)).is_err());
        assert!(apply(&Circuit::new(2), &basis(3, 0)).is_err());
    }
}
