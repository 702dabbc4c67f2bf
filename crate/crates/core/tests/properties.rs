use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use carleman_core::basis::{block_selector, quaternary_index, to_bits, BasisFactor, FactorList};
use carleman_core::burgers::{build_f1, build_f2, carleman_initial_vector, initial_state};
use carleman_core::circuits::{apply, circuit_to_matrix, Circuit, Gate};
use carleman_core::decomposition::decompose_full;
use carleman_core::embedding::{build_embedded_system, commutation_matrix};
use carleman_core::pauli::{pauli_decompose, pauli_reconstruct};
use carleman_core::sparse::{inner, real_vec, vec_norm};
use carleman_core::vqls::{ansatz_state, gradient, AnsatzConfig, TermCost, VqlsProblem};
use carleman_core::{GridConfig, SparseMatrix, C64};

fn basis_factor() -> impl Strategy<Value = BasisFactor> {
    prop::sample::select(vec![
        BasisFactor::Rho0,
        BasisFactor::Rho1,
        BasisFactor::Rho2,
        BasisFactor::Rho3,
        BasisFactor::Rho4,
        BasisFactor::Sigma0,
        BasisFactor::Sigma1,
        BasisFactor::Sigma2,
        BasisFactor::Sigma3,
    ])
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn state(dim: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(complex(), dim)
}

/// Random gate on a `width`-qubit register, rotations included.
fn gate(width: usize) -> impl Strategy<Value = Gate> {
    let q = 0..width;
    (0..9u8, q.clone(), q.clone(), q, -PI..PI).prop_map(move |(kind, a, b, c, theta)| {
        let b = if b == a { (a + 1) % width } else { b };
        let c = if c == a || c == b { (0..width).find(|k| *k != a && *k != b).unwrap() } else { c };
        match kind {
            0 => Gate::x(a),
            1 => Gate::z(a),
            2 => Gate::cx(a, b),
            3 => Gate::mcx(&[a, b], c),
            4 => Gate::swap(a, b),
            5 => Gate::cz(a, b),
            6 => Gate::ry(a, theta),
            7 => Gate::rz(a, theta),
            _ => Gate::cry(a, b, theta),
        }
    })
}

fn circuit(width: usize, max_gates: usize) -> impl Strategy<Value = Circuit> {
    prop::collection::vec(gate(width), 0..max_gates).prop_map(move |gates| Circuit { width, gates })
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn realize_distributes_over_concatenation(
        a in prop::collection::vec(basis_factor(), 1..4),
        b in prop::collection::vec(basis_factor(), 1..4),
    ) {
        let (la, lb) = (FactorList::from_basis(a), FactorList::from_basis(b));
        let joined = la.clone().concat(lb.clone()).realize().unwrap();
        let kron = la.realize().unwrap().kron(&lb.realize().unwrap());
        prop_assert_eq!(joined, kron);
    }

    #[test]
    fn f2_is_the_advection_stencil(u in prop::collection::vec(-2.0..2.0f64, 8)) {
        let g = GridConfig::new(8, 2, 2, 0.25, 1.0, 2.0 * PI).unwrap();
        let uu = carleman_initial_vector(&real_vec(&u), 2)[8..].to_vec();
        let out = build_f2(&g).matvec(&uu).unwrap();
        for j in 0..8 {
            let expected = -u[j] * (u[(j + 1) % 8] - u[(j + 7) % 8]) / (2.0 * g.dx);
            prop_assert!((out[j].re - expected).abs() < 1e-12 && out[j].im == 0.0);
        }
    }

    #[test]
    fn apply_is_linear(c in circuit(4, 12), x in state(16), y in state(16), a in complex(), b in complex()) {
        let mixed: Vec<C64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let lhs = apply(&c, &mixed).unwrap();
        let (ax, ay) = (apply(&c, &x).unwrap(), apply(&c, &y).unwrap());
        let rhs: Vec<C64> = ax.iter().zip(&ay).map(|(p, q)| a * p + b * q).collect();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn matrix_and_statevector_paths_agree(c in circuit(5, 16), x in state(32)) {
        let via_matrix = circuit_to_matrix(&c).unwrap().matvec(&x).unwrap();
        prop_assert!(max_diff(&via_matrix, &apply(&c, &x).unwrap()) < 1e-12);
        prop_assert!(circuit_to_matrix(&c).unwrap().unitarity_error().unwrap() < 1e-12);
    }

    #[test]
    fn inverse_undoes_circuit(c in circuit(4, 12), x in state(16)) {
        let back = apply(&c.inverse(), &apply(&c, &x).unwrap()).unwrap();
        prop_assert!(max_diff(&back, &x) < 1e-12);
    }

    #[test]
    fn pauli_expansion_reconstructs(
        q in 1usize..=6,
        entries in prop::collection::vec((0usize..64, 0usize..64, complex()), 1..24),
    ) {
        let n = 1 << q;
        let triplets = entries.into_iter().map(|(r, c, v)| (r % n, c % n, v)).collect();
        let m = SparseMatrix::from_triplets(n, n, triplets);
        let terms = pauli_decompose(&m).unwrap();
        prop_assert!(pauli_reconstruct(&terms, q).unwrap().max_abs_diff(&m).unwrap() < 1e-12);
    }

    #[test]
    fn ansatz_state_is_normalized(theta in prop::collection::vec(0.0..2.0 * PI, 21)) {
        let psi = ansatz_state(&AnsatzConfig::new(3, 7, 0), &theta).unwrap();
        prop_assert!((vec_norm(&psi) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn commutation_swaps_tensor_factors(x in state(4), y in state(8)) {
        // K^(a,b) (x ⊗ y) = y ⊗ x with x of dimension b
        let k = commutation_matrix(8, 4).unwrap();
        let xs = SparseMatrix::from_triplets(4, 1, x.iter().enumerate().map(|(i, v)| (i, 0, *v)).collect());
        let ys = SparseMatrix::from_triplets(8, 1, y.iter().enumerate().map(|(i, v)| (i, 0, *v)).collect());
        let lhs = k.matmul(&xs.kron(&ys)).unwrap();
        prop_assert!(lhs.max_abs_diff(&ys.kron(&xs)).unwrap() < 1e-15);
    }
}

mod desk_scale {
    use super::*;

    fn problem() -> (VqlsProblem, TermCost) {
        let g = GridConfig::desk_scale();
        let u0 = real_vec(&initial_state(&g, 0.5, PI).unwrap());
        let sys = build_embedded_system(&g, &carleman_initial_vector(&u0, 2)).unwrap();
        let terms = decompose_full(&g).unwrap();
        (
            VqlsProblem::from_terms(&terms, &sys.b_e).unwrap(),
            TermCost::new(&terms, &sys.b_e).unwrap(),
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn term_cost_matches_monolithic_cost(x in state(128)) {
            let (p, t) = problem();
            let (a, b) = (p.cost_of_state(&x).unwrap(), t.cost_of_state(&x).unwrap());
            prop_assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
            prop_assert!((0.0..=1.0).contains(&a));
        }
    }

    #[test]
    fn cost_vanishes_only_at_the_solution() {
        let (p, _) = problem();
        assert!(p.cost_of_state(&p.solution).unwrap() < 1e-12);
        let mut other = p.solution.clone();
        other.reverse();
        let overlap = inner(&other, &p.solution).norm();
        assert!(overlap < 0.99);
        assert!(p.cost_of_state(&other).unwrap() > 1e-6);
    }
}

#[test]
fn finite_difference_gradient_matches_analytic() {
    let f = |t: &[f64]| t[0].sin() * t[1].cos() + 0.5 * t[2] * t[2];
    let theta = [0.3, -1.1, 0.7];
    let g = gradient(&f, &theta, 1e-4);
    let exact = [
        theta[0].cos() * theta[1].cos(),
        -theta[0].sin() * theta[1].sin(),
        theta[2],
    ];
    for (a, b) in g.iter().zip(exact) {
        assert_abs_diff_eq!(*a, b, epsilon = 1e-7);
    }
}

#[test]
fn quaternary_selectors_are_exhaustively_single_entries() {
    for k in 1..=3 {
        let n = 1 << k;
        for i in 0..n {
            for j in 0..n {
                let digits = quaternary_index(&to_bits(i, k), &to_bits(j, k)).unwrap();
                assert!(digits.iter().all(|d| *d < 4));
                let m = FactorList::from_basis(block_selector(i, j, k)).realize().unwrap();
                assert_eq!(m.nnz(), 1);
                assert_eq!(m.get(i, j), C64::new(1.0, 0.0));
            }
        }
    }
}

#[test]
fn f1_annihilates_constants() {
    for n_x in [4, 8, 16, 32, 64] {
        let g = GridConfig::new(n_x, 2, 1, 0.1, 0.7, 3.0).unwrap();
        let ones = vec![C64::new(1.0, 0.0); n_x];
        assert!(vec_norm(&build_f1(&g).matvec(&ones).unwrap()) < 1e-9);
    }
}
