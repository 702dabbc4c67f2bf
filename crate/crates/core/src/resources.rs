//! Clifford and T counts of the block encodings.

use serde::{Deserialize, Serialize};

use crate::block_encoding::{block_encode, BlockEncoding};
use crate::burgers::GridConfig;
use crate::circuits::{Gate, GateKind};
use crate::decomposition::{decompose_full, DecompositionTerm, TermClass};
use crate::error::Result;

/// Per-gate costs. `C^qX` for `q ≥ 3` is charged linearly in `q`, the shape
/// of a dirty-ancilla construction built from roughly four Toffolis per
/// control; the constants below are that construction's leading terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostModel {
    /// X, Z and CX (or CZ) each count as one Clifford.
    pub single_clifford: u64,
    /// CX gates per SWAP.
    pub swap_cx: u64,
    pub toffoli_clifford: u64,
    pub toffoli_t: u64,
    /// Clifford gates per control of a `C^qX`, `q ≥ 3`.
    pub mcx_clifford_per_control: u64,
    /// T gates per control of a `C^qX`, `q ≥ 3`.
    pub mcx_t_per_control: u64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            single_clifford: 1,
            swap_cx: 3,
            toffoli_clifford: 9,
            toffoli_t: 7,
            mcx_clifford_per_control: 36,
            mcx_t_per_control: 28,
        }
    }
}

impl CostModel {
    /// `(clifford, t)` for one gate.
    pub fn gate_cost(&self, g: &Gate) -> (u64, u64) {
        match g.kind {
            GateKind::X | GateKind::Z | GateKind::Cx | GateKind::Cz => (self.single_clifford, 0),
            GateKind::Swap => (self.swap_cx * self.single_clifford, 0),
            GateKind::Mcx => {
                let q = g.control_count() as u64;
                if q == 2 {
                    (self.toffoli_clifford, self.toffoli_t)
                } else {
                    (self.mcx_clifford_per_control * q, self.mcx_t_per_control * q)
                }
            }
            // rotations are not Clifford+T primitives and never occur in encodings
            GateKind::Ry | GateKind::Rz | GateKind::Cry => (0, 0),
        }
    }
}

/// Gate counts for one encoded term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCount {
    pub clifford: u64,
    pub t: u64,
    /// Largest `q` of any `C^qX` in the encoding.
    pub cqx_largest: usize,
    pub term_class: TermClass,
}

pub fn resource_estimate_encoding(enc: &BlockEncoding, class: TermClass, model: &CostModel) -> ResourceCount {
    let circuit = enc.circuit();
    let (clifford, t) = circuit
        .gates
        .iter()
        .map(|g| model.gate_cost(g))
        .fold((0, 0), |(a, b), (c, d)| (a + c, b + d));
    let cqx_largest = circuit.gates.iter().map(Gate::control_count).max().unwrap_or(0);
    ResourceCount { clifford, t, cqx_largest, term_class: class }
}

pub fn resource_estimate(term: &DecompositionTerm, model: &CostModel) -> Result<ResourceCount> {
    Ok(resource_estimate_encoding(&block_encode(term)?, term.class, model))
}

/// One row of the per-term CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermResourceRow {
    pub term_id: usize,
    pub class: TermClass,
    pub j: usize,
    pub l: usize,
    pub q: usize,
    pub clifford: u64,
    pub t: u64,
}

pub const RESOURCE_CSV_HEADER: &str = "term_id,class,j,l,q,clifford,t";

impl TermResourceRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.term_id, self.class, self.j, self.l, self.q, self.clifford, self.t
        )
    }
}

/// Min/max counts over one class of terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class: TermClass,
    pub terms: usize,
    pub clifford_min: u64,
    pub clifford_max: u64,
    pub t_min: u64,
    pub t_max: u64,
    pub cqx_largest: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceTable {
    pub grid: GridConfig,
    /// `log₂(α n_t n_x^α) + 1`, the ancilla included.
    pub qubits: usize,
    pub classes: Vec<ClassSummary>,
    pub rows: Vec<TermResourceRow>,
}

impl ResourceTable {
    pub fn class(&self, c: TermClass) -> Option<&ClassSummary> {
        self.classes.iter().find(|s| s.class == c)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(RESOURCE_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv());
            out.push('\n');
        }
        out
    }
}

pub fn resource_table(grid: &GridConfig, model: &CostModel) -> Result<ResourceTable> {
    let terms = decompose_full(grid)?;
    let mut rows = Vec::with_capacity(terms.len());
    let mut qubits = grid.system_qubits() + 1;
    for (id, term) in terms.iter().enumerate() {
        let enc = block_encode(term)?;
        qubits = enc.width;
        let rc = resource_estimate_encoding(&enc, term.class, model);
        rows.push(TermResourceRow {
            term_id: id,
            class: term.class,
            j: term.j,
            l: term.l,
            q: enc.u1.q(),
            clifford: rc.clifford,
            t: rc.t,
        });
    }
    let classes = [TermClass::L1, TermClass::L2a, TermClass::L2b]
        .into_iter()
        .filter_map(|c| {
            let sel: Vec<&TermResourceRow> = rows.iter().filter(|r| r.class == c).collect();
            (!sel.is_empty()).then(|| ClassSummary {
                class: c,
                terms: sel.len(),
                clifford_min: sel.iter().map(|r| r.clifford).min().unwrap_or(0),
                clifford_max: sel.iter().map(|r| r.clifford).max().unwrap_or(0),
                t_min: sel.iter().map(|r| r.t).min().unwrap_or(0),
                t_max: sel.iter().map(|r| r.t).max().unwrap_or(0),
                cqx_largest: sel.iter().map(|r| r.q).max().unwrap_or(0),
            })
        })
        .collect();
    Ok(ResourceTable { grid: *grid, qubits, classes, rows })
}

/// Least-squares fit `y ≈ c f` through the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProportionalFit {
    pub c: f64,
    /// `‖y − c f‖₂ / ‖y‖₂`.
    pub relative_residual: f64,
}

pub fn fit_proportional(f: &[f64], y: &[f64]) -> ProportionalFit {
    let ff: f64 = f.iter().map(|v| v * v).sum();
    let fy: f64 = f.iter().zip(y).map(|(a, b)| a * b).sum();
    let c = if ff > 0.0 { fy / ff } else { 0.0 };
    let res: f64 = f.iter().zip(y).map(|(a, b)| (b - c * a).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    ProportionalFit {
        c,
        relative_residual: if norm > 0.0 { res / norm } else { 0.0 },
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

/// Worst (largest-Clifford) `L2b` term counts for one grid.
pub fn worst_l2b(grid: &GridConfig, model: &CostModel) -> Result<Option<ResourceCount>> {
    let terms = crate::decomposition::decompose_l2b(grid)?;
    let mut worst: Option<ResourceCount> = None;
    for t in &terms {
        let rc = resource_estimate(t, model)?;
        if worst.is_none_or(|w| (rc.clifford, rc.t) > (w.clifford, w.t)) {
            worst = Some(rc);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_costs() {
        let m = CostModel::default();
        assert_eq!(m.gate_cost(&Gate::swap(0, 1)), (3, 0));
        assert_eq!(m.gate_cost(&Gate::mcx(&[0, 1], 2)), (9, 7));
        assert_eq!(m.gate_cost(&Gate::mcx(&[0, 1, 2, 3], 4)), (144, 112));
        assert_eq!(m.gate_cost(&Gate::x(0)), (1, 0));
    }

    #[test]
    fn proportional_fit_exact() {
        let f = [1.0, 4.0, 9.0];
        let fit = fit_proportional(&f, &[2.0, 8.0, 18.0]);
        assert!((fit.c - 2.0).abs() < 1e-12 && fit.relative_residual < 1e-12);
        assert!((log_log_slope(&[1.0, 2.0, 4.0], &[3.0, 12.0, 48.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn desk_scale_table() {
        let g = GridConfig::desk_scale();
        let table = resource_table(&g, &CostModel::default()).unwrap();
        assert_eq!(table.qubits, 8);
        assert_eq!(table.class(TermClass::L1).unwrap().terms, 3);
        assert_eq!(table.class(TermClass::L2a).unwrap().terms, 42);
        assert_eq!(table.class(TermClass::L2b).unwrap().terms, 4);
        assert!(table.to_csv().starts_with(RESOURCE_CSV_HEADER));
    }
}
