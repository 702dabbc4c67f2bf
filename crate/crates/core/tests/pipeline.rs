use std::f64::consts::PI;

use carleman_core::burgers::{build_carleman_a, build_time_system, carleman_initial_vector, initial_state};
use carleman_core::decomposition::{decompose_full, reconstruct, TermDocument};
use carleman_core::embedding::{build_embedded_system, extract_solution, extract_unembedded};
use carleman_core::resources::resource_table;
use carleman_core::solve::DENSE_SOLVE_LIMIT;
use carleman_core::sparse::{real_vec, DEFAULT_DIM_CAP};
use carleman_core::circuits::{commutation_circuit, GateKind};
use carleman_core::vqls::{optimize, AnsatzConfig, HouseholderUb, OptimizerOptions, VqlsProblem};
use carleman_core::{classical_solve, CostModel, GridConfig, C64};

fn y0(g: &GridConfig) -> Vec<C64> {
    carleman_initial_vector(&real_vec(&initial_state(g, 0.5, PI).unwrap()), g.alpha)
}

#[test]
fn iterative_solver_keeps_embedding_equivalence() {
    let g = GridConfig::new(16, 16, 2, 0.05, 1.0, 2.0 * PI).unwrap();
    let sys = build_embedded_system(&g, &y0(&g)).unwrap();
    assert!(sys.l_e.nrows() > DENSE_SOLVE_LIMIT);
    let traj = extract_solution(&classical_solve(&sys.l_e, &sys.b_e).unwrap(), &g).unwrap();
    let plain = build_time_system(&build_carleman_a(&g).unwrap(), &g, &y0(&g)).unwrap();
    let u = extract_unembedded(&classical_solve(&plain.l, &plain.b).unwrap(), &g).unwrap();
    for (a, b) in traj.u.iter().flatten().zip(u.iter().flatten()) {
        assert!((a - b).norm() < 1e-8);
    }
    assert!(traj.max_pad() < 1e-10);
}

#[test]
fn heat_equation_decomposes_exactly() {
    let g = GridConfig::new(8, 4, 1, 0.1, 0.5, 1.0).unwrap();
    let sys = build_embedded_system(&g, &y0(&g)).unwrap();
    let terms = decompose_full(&g).unwrap();
    assert!(terms.iter().all(|t| t.class != carleman_core::TermClass::L2b));
    assert!(reconstruct(&terms, DEFAULT_DIM_CAP).unwrap().max_abs_diff(&sys.l_e).unwrap() < 1e-12);
}

#[test]
fn mixed_size_grid_reconstructs() {
    let g = GridConfig::new(8, 4, 2, 0.25, 1.0, 2.0 * PI).unwrap();
    let sys = build_embedded_system(&g, &y0(&g)).unwrap();
    let terms = decompose_full(&g).unwrap();
    assert!(reconstruct(&terms, DEFAULT_DIM_CAP).unwrap().max_abs_diff(&sys.l_e).unwrap() < 1e-12);
}

#[test]
fn commutation_circuits_use_m_times_n_swaps() {
    for m in 0..=4 {
        for n in 0..=4 {
            let c = commutation_circuit(m, n);
            assert_eq!(c.gates.len(), m * n);
            assert!(c.gates.iter().all(|g| g.kind == GateKind::Swap));
        }
    }
}

#[test]
fn term_document_survives_json() {
    let g = GridConfig::desk_scale();
    let doc = TermDocument::new(&g, decompose_full(&g).unwrap());
    let text = serde_json::to_string_pretty(&doc).unwrap();
    let back: TermDocument = serde_json::from_str(&text).unwrap();
    assert_eq!(back, doc);
    let l = reconstruct(&back.terms, DEFAULT_DIM_CAP).unwrap();
    assert_eq!(l, reconstruct(&doc.terms, DEFAULT_DIM_CAP).unwrap());
}

#[test]
fn resource_rows_cover_every_term() {
    let g = GridConfig::new(8, 4, 2, 0.25, 1.0, 2.0 * PI).unwrap();
    let table = resource_table(&g, &CostModel::default()).unwrap();
    assert_eq!(table.rows.len(), decompose_full(&g).unwrap().len());
    assert_eq!(table.qubits, 2 + 1 + 2 * 3 + 1);
    assert!(table.rows.iter().all(|r| r.t > 0 || r.q < 2));
}

mod vqls {
    use super::*;

    fn problem() -> VqlsProblem {
        let g = GridConfig::desk_scale();
        let sys = build_embedded_system(&g, &y0(&g)).unwrap();
        VqlsProblem::from_terms(&decompose_full(&g).unwrap(), &sys.b_e).unwrap()
    }

    #[test]
    fn seeded_runs_are_bit_reproducible() {
        let p = problem();
        let cfg = AnsatzConfig::new(3, 7, 11);
        let a = optimize(&p, &cfg, &OptimizerOptions::default()).unwrap();
        let b = optimize(&p, &cfg, &OptimizerOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cost_trace_is_non_increasing() {
        let res = optimize(&problem(), &AnsatzConfig::new(3, 7, 1), &OptimizerOptions::default()).unwrap();
        for w in res.cost_trace.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-12, "{:?}", w);
        }
        assert_eq!(res.theta_opt.len(), 21);
    }

    #[test]
    fn restart_from_optimum_is_a_fixed_point() {
        let p = problem();
        let opts = OptimizerOptions::default();
        let first = optimize(&p, &AnsatzConfig::new(3, 7, 1), &opts).unwrap();
        assert!(first.converged);
        let mut cfg = AnsatzConfig::new(3, 7, 1);
        cfg.params = first.theta_opt.clone();
        let again = optimize(&p, &cfg, &opts).unwrap();
        assert!(again.iterations <= 1);
        assert!((again.final_cost - first.final_cost).abs() <= opts.tolerance);
    }
}

/// The local cost depends on the whole of `U_b`, not only on `U_b|0⟩ = b`.
/// Completions that differ by phases on the other basis states give the same
/// cost everywhere, as do rotations among states of equal Hamming weight; a
/// completion that mixes weights changes the cost away from the solution, and
/// every completion gives zero at the solution.
mod ub_completion {
    use super::*;
    use carleman_core::sparse::vec_norm;

    fn cost(l: &carleman_core::SparseMatrix, ub: &HouseholderUb, w: &dyn Fn(&mut [C64]), x: &[C64]) -> f64 {
        let mut psi = l.matvec(x).unwrap();
        let norm: f64 = psi.iter().map(|v| v.norm_sqr()).sum();
        ub.apply_adjoint(&mut psi);
        w(&mut psi);
        let n = psi.len().ilog2() as usize;
        let z: f64 = psi
            .iter()
            .enumerate()
            .map(|(i, v)| v.norm_sqr() * (n as f64 - 2.0 * i.count_ones() as f64))
            .sum();
        0.5 * (1.0 - z / (n as f64 * norm))
    }

    #[test]
    fn phases_preserve_cost_and_mixing_does_not() {
        let g = GridConfig::desk_scale();
        let sys = build_embedded_system(&g, &y0(&g)).unwrap();
        let ub = HouseholderUb::new(&sys.b_e).unwrap();
        let identity = |_: &mut [C64]| {};
        let phases = |v: &mut [C64]| {
            for (i, x) in v.iter_mut().enumerate().skip(1) {
                *x *= C64::from_polar(1.0, 0.37 * i as f64);
            }
        };
        // W† for a rotation between |1⟩ and |3⟩, which differ in Hamming
        // weight; W fixes |0⟩
        let mix = |v: &mut [C64]| {
            let (c, s) = (0.6, 0.8);
            let (a, b) = (v[1], v[3]);
            v[1] = a * c + b * s;
            v[3] = -a * s + b * c;
        };
        let x: Vec<C64> = (0..sys.l_e.nrows()).map(|i| C64::new((i as f64 * 0.7).sin(), (i as f64 * 0.3).cos())).collect();
        let base = cost(&sys.l_e, &ub, &identity, &x);
        assert!((cost(&sys.l_e, &ub, &phases, &x) - base).abs() < 1e-12);
        assert!((cost(&sys.l_e, &ub, &mix, &x) - base).abs() > 1e-6);

        let y = classical_solve(&sys.l_e, &sys.b_e).unwrap();
        let y: Vec<C64> = y.iter().map(|v| v / vec_norm(&y)).collect();
        for w in [&identity as &dyn Fn(&mut [C64]), &phases, &mix] {
            assert!(cost(&sys.l_e, &ub, w, &y).abs() < 1e-12);
        }
    }
}
