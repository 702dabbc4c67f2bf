//! Statevector VQLS with the local cost function.
//!
//! The ansatz `V(θ)` applies, per layer, one `RY` per qubit followed by a
//! fixed entangling ring. The right-hand side is loaded by a Householder
//! reflection `U_b` with `U_b|0⟩ = |b⟩`, and the cost
//!
//! `C(θ) = ½ (1 − (1/n) Σ_k ⟨ψ| U_b Z_k U_b† |ψ⟩ / ⟨ψ|ψ⟩)`,  `ψ = L V(θ)|0⟩`
//!
//! is evaluated exactly. Optimization uses Polak–Ribière conjugate gradients
//! with central-difference gradients.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::burgers::GridConfig;
use crate::circuits::{apply_in_place, Circuit, Gate};
use crate::decomposition::{reconstruct, DecompositionTerm};
use crate::embedding::extract_solution;
use crate::error::{exact_log2, invalid, Error, Result};
use crate::solve::classical_solve;
use crate::sparse::{inner, vec_norm, SparseMatrix, C64, DEFAULT_DIM_CAP, ONE, ZERO};

/// Default `θ` seed.
pub const DEFAULT_SEED: u64 = 7;

/// Entangling block applied after each rotation layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entangler {
    /// `CZ(q, q+1 mod n)` for every `q`.
    #[default]
    CzRing,
    /// `CX(q, q+1 mod n)` for every `q`.
    CxRing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzConfig {
    pub layers: usize,
    pub qubits: usize,
    /// `layers · qubits` angles (radians); empty means "draw from `seed`".
    pub params: Vec<f64>,
    pub seed: u64,
    #[serde(default)]
    pub entangler: Entangler,
}

impl AnsatzConfig {
    pub fn new(layers: usize, qubits: usize, seed: u64) -> Self {
        Self {
            layers,
            qubits,
            params: Vec::new(),
            seed,
            entangler: Entangler::default(),
        }
    }

    pub fn param_count(&self) -> usize {
        self.layers * self.qubits
    }

    /// Uniform draws from `[0, 2π)` with a ChaCha8 generator seeded by `seed`.
    pub fn seeded_params(&self) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.param_count()).map(|_| rng.random_range(0.0..TAU)).collect()
    }

    /// The configured parameters, or seeded draws when none are set.
    pub fn initial_params(&self) -> Result<Vec<f64>> {
        if self.params.is_empty() {
            Ok(self.seeded_params())
        } else if self.params.len() == self.param_count() {
            Ok(self.params.clone())
        } else {
            Err(invalid(format!(
                "{} parameters given, ansatz needs {}",
                self.params.len(),
                self.param_count()
            )))
        }
    }
}

pub fn ansatz_circuit(cfg: &AnsatzConfig, theta: &[f64]) -> Result<Circuit> {
    if theta.len() != cfg.param_count() {
        return Err(Error::DimensionMismatch {
            expected: cfg.param_count(),
            found: theta.len(),
        });
    }
    let n = cfg.qubits;
    let mut c = Circuit::new(n);
    for layer in theta.chunks(n.max(1)) {
        for (q, &t) in layer.iter().enumerate() {
            c.push(Gate::ry(q, t));
        }
        if n >= 2 {
            // a two-qubit ring would apply the same pair twice
            let pairs = if n == 2 { 1 } else { n };
            for q in 0..pairs {
                let (a, b) = (q, (q + 1) % n);
                c.push(match cfg.entangler {
                    Entangler::CzRing => Gate::cz(a, b),
                    Entangler::CxRing => Gate::cx(a, b),
                });
            }
        }
    }
    Ok(c)
}

/// `V(θ)|0…0⟩`.
pub fn ansatz_state(cfg: &AnsatzConfig, theta: &[f64]) -> Result<Vec<C64>> {
    let c = ansatz_circuit(cfg, theta)?;
    let mut psi = vec![ZERO; 1 << cfg.qubits];
    psi[0] = ONE;
    apply_in_place(&c, &mut psi)?;
    Ok(psi)
}

/// Normalized right-hand side.
pub fn prepare_b(b: &[C64]) -> Result<Vec<C64>> {
    let n = vec_norm(b);
    if n == 0.0 || !n.is_finite() {
        return Err(invalid("right-hand side has zero norm"));
    }
    Ok(b.iter().map(|v| v / n).collect())
}

/// `U_b = e^{iφ} H` with `H` the Householder reflection exchanging `|0⟩` and
/// `e^{−iφ}|b⟩`, `φ = arg b₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct HouseholderUb {
    w: Vec<C64>,
    w_norm_sqr: f64,
    phase: C64,
}

impl HouseholderUb {
    pub fn new(b: &[C64]) -> Result<Self> {
        let b = prepare_b(b)?;
        let phase = if b[0].norm() > 0.0 { b[0] / b[0].norm() } else { ONE };
        let mut w: Vec<C64> = b.iter().map(|v| -v * phase.conj()).collect();
        w[0] += ONE;
        let w_norm_sqr = w.iter().map(|v| v.norm_sqr()).sum();
        Ok(Self { w, w_norm_sqr, phase })
    }

    fn reflect(&self, v: &mut [C64]) {
        if self.w_norm_sqr < 1e-30 {
            return;
        }
        let k = inner(&self.w, v) * (2.0 / self.w_norm_sqr);
        v.iter_mut().zip(&self.w).for_each(|(x, w)| *x -= k * w);
    }

    /// `U_b v`.
    pub fn apply(&self, v: &mut [C64]) {
        self.reflect(v);
        v.iter_mut().for_each(|x| *x *= self.phase);
    }

    /// `U_b† v`.
    pub fn apply_adjoint(&self, v: &mut [C64]) {
        v.iter_mut().for_each(|x| *x *= self.phase.conj());
        self.reflect(v);
    }
}

/// `Σ_k ⟨φ|Z_k|φ⟩` for `n` qubits.
fn sum_z_expectation(phi: &[C64], n: usize) -> f64 {
    phi.iter()
        .enumerate()
        .map(|(i, v)| {
            let ones = (i as u32).count_ones() as f64;
            v.norm_sqr() * (n as f64 - 2.0 * ones)
        })
        .sum()
}

/// A VQLS instance: the monolithic operator, `U_b`, and the exact solution
/// for diagnostics.
#[derive(Debug, Clone)]
pub struct VqlsProblem {
    pub l: SparseMatrix,
    pub b: Vec<C64>,
    pub qubits: usize,
    ub: HouseholderUb,
    /// Normalized `L⁻¹ b`.
    pub solution: Vec<C64>,
}

impl VqlsProblem {
    pub fn new(l: SparseMatrix, b: &[C64]) -> Result<Self> {
        let qubits = exact_log2(l.nrows())
            .filter(|_| l.is_square())
            .ok_or_else(|| invalid("VQLS operator must be 2^n square"))?;
        let b = prepare_b(b)?;
        let x = classical_solve(&l, &b)?;
        let solution = prepare_b(&x)?;
        Ok(Self {
            ub: HouseholderUb::new(&b)?,
            l,
            b,
            qubits,
            solution,
        })
    }

    /// Builds `L = Σ c_l L_l` from the term list.
    pub fn from_terms(terms: &[DecompositionTerm], b: &[C64]) -> Result<Self> {
        Self::new(reconstruct(terms, DEFAULT_DIM_CAP)?, b)
    }

    /// Local cost of an arbitrary (unnormalized) trial vector `x`.
    pub fn cost_of_state(&self, x: &[C64]) -> Result<f64> {
        let mut psi = self.l.matvec(x)?;
        let norm = psi.iter().map(|v| v.norm_sqr()).sum::<f64>();
        if norm == 0.0 {
            return Err(invalid("L x vanishes"));
        }
        self.ub.apply_adjoint(&mut psi);
        let z = sum_z_expectation(&psi, self.qubits);
        Ok((0.5 * (1.0 - z / (self.qubits as f64 * norm))).clamp(0.0, 1.0))
    }

    pub fn cost(&self, cfg: &AnsatzConfig, theta: &[f64]) -> Result<f64> {
        self.cost_of_state(&ansatz_state(cfg, theta)?)
    }

    /// `|⟨x/‖x‖, L⁻¹b/‖L⁻¹b‖⟩|²`.
    pub fn fidelity(&self, x: &[C64]) -> f64 {
        let n = vec_norm(x);
        if n == 0.0 {
            return 0.0;
        }
        (inner(x, &self.solution).norm() / n).powi(2)
    }
}

/// The same cost assembled from `β_{ll'} = ⟨L_{l'}x, L_l x⟩` and
/// `δ^k_{ll'} = ⟨L_{l'}x, U_b Z_k U_b† L_l x⟩` over the individual terms.
pub struct TermCost {
    coefficients: Vec<C64>,
    matrices: Vec<SparseMatrix>,
    ub: HouseholderUb,
    qubits: usize,
}

impl TermCost {
    pub fn new(terms: &[DecompositionTerm], b: &[C64]) -> Result<Self> {
        let matrices: Vec<SparseMatrix> = terms.iter().map(|t| t.realize()).collect::<Result<_>>()?;
        let n = matrices.first().map(SparseMatrix::nrows).ok_or_else(|| invalid("no terms"))?;
        Ok(Self {
            coefficients: terms.iter().map(|t| t.coefficient).collect(),
            matrices,
            ub: HouseholderUb::new(b)?,
            qubits: exact_log2(n).ok_or_else(|| invalid("terms must be 2^n square"))?,
        })
    }

    pub fn cost_of_state(&self, x: &[C64]) -> Result<f64> {
        let n = self.qubits;
        let phis: Vec<Vec<C64>> = self
            .matrices
            .iter()
            .map(|m| {
                let mut v = m.matvec(x)?;
                self.ub.apply_adjoint(&mut v);
                Ok(v)
            })
            .collect::<Result<_>>()?;
        let mut beta = ZERO;
        let mut delta = ZERO;
        for (cl, pl) in self.coefficients.iter().zip(&phis) {
            for (clp, plp) in self.coefficients.iter().zip(&phis) {
                let w = clp.conj() * cl;
                // U_b is unitary, so β is invariant under U_b†
                beta += w * inner(plp, pl);
                let mut d = ZERO;
                for k in 0..n {
                    let bit = 1usize << (n - 1 - k);
                    d += plp
                        .iter()
                        .zip(pl)
                        .enumerate()
                        .map(|(i, (a, b))| a.conj() * b * if i & bit == 0 { 1.0 } else { -1.0 })
                        .sum::<C64>();
                }
                delta += w * d;
            }
        }
        if beta.re <= 0.0 {
            return Err(invalid("L x vanishes"));
        }
        Ok((0.5 * (1.0 - delta.re / (n as f64 * beta.re))).clamp(0.0, 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    /// Stop once `‖∇C‖∞` falls to this value.
    pub tolerance: f64,
    pub max_iter: usize,
    /// Central-difference step.
    pub fd_step: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-3,
            max_iter: 2000,
            fd_step: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqlsResult {
    pub theta_opt: Vec<f64>,
    /// `(iteration, cost)` after each accepted step, starting at iteration 0.
    pub cost_trace: Vec<(usize, f64)>,
    pub state: Vec<C64>,
    /// Overlap with the exact normalized solution.
    pub fidelity: f64,
    pub iterations: usize,
    pub final_cost: f64,
    pub converged: bool,
    pub seed: u64,
}

/// Central-difference gradient, evaluated in parallel over components.
pub fn gradient<F>(f: &F, theta: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    (0..theta.len())
        .into_par_iter()
        .map(|i| {
            let mut p = theta.to_vec();
            p[i] = theta[i] + h;
            let up = f(&p);
            p[i] = theta[i] - h;
            let down = f(&p);
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn step(theta: &[f64], d: &[f64], t: f64) -> Vec<f64> {
    theta.iter().zip(d).map(|(x, y)| x + t * y).collect()
}

/// Armijo backtracking that also grows the step while the cost keeps
/// falling, refined by one quadratic-interpolation trial.
fn line_search<F: Fn(&[f64]) -> f64>(f: &F, theta: &[f64], fx: f64, g: &[f64], d: &[f64], t0: f64) -> Option<(f64, f64)> {
    let slope = dot(g, d);
    let armijo = |t: f64, ft: f64| ft <= fx + 1e-4 * t * slope;
    let mut t = t0;
    let mut ft = f(&step(theta, d, t));
    if armijo(t, ft) {
        for _ in 0..20 {
            let t2 = 2.0 * t;
            let f2 = f(&step(theta, d, t2));
            if f2 < ft && armijo(t2, f2) {
                t = t2;
                ft = f2;
            } else {
                break;
            }
        }
    } else {
        let mut found = false;
        for _ in 0..60 {
            t *= 0.5;
            ft = f(&step(theta, d, t));
            if armijo(t, ft) {
                found = true;
                break;
            }
        }
        if !found {
            return None;
        }
    }
    // minimizer of the parabola through f(0), f'(0) and f(t)
    let curv = ft - fx - slope * t;
    if curv > 0.0 {
        let tq = -slope * t * t / (2.0 * curv);
        if tq.is_finite() && tq > 0.0 && (tq - t).abs() > 1e-12 * t {
            let fq = f(&step(theta, d, tq));
            if fq < ft && armijo(tq, fq) {
                return Some((tq, fq));
            }
        }
    }
    Some((t, ft))
}

/// Polak–Ribière (PR+) conjugate gradients on an arbitrary smooth objective.
pub fn minimize_cg<F>(f: &F, theta0: Vec<f64>, opts: &OptimizerOptions) -> (Vec<f64>, Vec<(usize, f64)>, usize, bool)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = theta0.len();
    let mut theta = theta0;
    let mut fx = f(&theta);
    let mut trace = vec![(0, fx)];
    let mut g = gradient(f, &theta, opts.fd_step);
    let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut t = 1.0;
    for iter in 1..=opts.max_iter {
        if inf_norm(&g) <= opts.tolerance {
            return (theta, trace, iter - 1, true);
        }
        if dot(&g, &d) >= 0.0 {
            d = g.iter().map(|v| -v).collect();
        }
        let Some((t_acc, f_new)) = line_search(f, &theta, fx, &g, &d, t) else {
            // no descent along -g either: treat as stationary within noise
            let gn = inf_norm(&g);
            return (theta, trace, iter - 1, gn <= opts.tolerance);
        };
        theta = step(&theta, &d, t_acc);
        fx = f_new;
        trace.push((iter, fx));
        let g_new = gradient(f, &theta, opts.fd_step);
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let beta = if iter % n.max(1) == 0 {
            0.0
        } else {
            (dot(&g_new, &y) / dot(&g, &g).max(f64::MIN_POSITIVE)).max(0.0)
        };
        d = g_new.iter().zip(&d).map(|(gi, di)| -gi + beta * di).collect();
        g = g_new;
        t = t_acc.max(1e-6);
    }
    let converged = inf_norm(&g) <= opts.tolerance;
    (theta, trace, opts.max_iter, converged)
}

/// Runs VQLS from the configured (or seeded) starting point.
pub fn optimize(problem: &VqlsProblem, cfg: &AnsatzConfig, opts: &OptimizerOptions) -> Result<VqlsResult> {
    if cfg.qubits != problem.qubits {
        return Err(Error::DimensionMismatch {
            expected: problem.qubits,
            found: cfg.qubits,
        });
    }
    let theta0 = cfg.initial_params()?;
    let objective = |t: &[f64]| problem.cost(cfg, t).unwrap_or(1.0);
    let (theta, trace, iterations, converged) = minimize_cg(&objective, theta0, opts);
    let state = ansatz_state(cfg, &theta)?;
    Ok(VqlsResult {
        fidelity: problem.fidelity(&state),
        final_cost: trace.last().map_or(1.0, |e| e.1),
        theta_opt: theta,
        cost_trace: trace,
        state,
        iterations,
        converged,
        seed: cfg.seed,
    })
}

/// Classical-versus-VQLS comparison of one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// `|⟨ψ/‖ψ‖, Y/‖Y‖⟩|²`.
    pub fidelity: f64,
    /// Complex factor `λ` minimizing `‖λψ − Y‖`.
    pub scale: C64,
    /// `‖u_vqls(t) − u(t)‖₂ / ‖u(t)‖₂` per time step.
    pub step_relative_l2: Vec<f64>,
    pub max_pointwise_deviation: f64,
    pub u_classical: Vec<Vec<f64>>,
    pub u_vqls: Vec<Vec<f64>>,
}

pub fn compare_solutions(vqls_state: &[C64], y_classical: &[C64], grid: &GridConfig) -> Result<ComparisonReport> {
    if vqls_state.len() != y_classical.len() {
        return Err(Error::DimensionMismatch {
            expected: y_classical.len(),
            found: vqls_state.len(),
        });
    }
    let (np, ny) = (vec_norm(vqls_state), vec_norm(y_classical));
    if np == 0.0 || ny == 0.0 {
        return Err(invalid("cannot compare against a zero vector"));
    }
    let overlap = inner(vqls_state, y_classical);
    let fidelity = (overlap.norm() / (np * ny)).powi(2);
    let scale = overlap / (np * np);
    let scaled: Vec<C64> = vqls_state.iter().map(|v| v * scale).collect();
    let uc = extract_solution(y_classical, grid)?.real_u();
    let uv = extract_solution(&scaled, grid)?.real_u();
    let mut step_relative_l2 = Vec::with_capacity(uc.len());
    let mut max_dev: f64 = 0.0;
    for (a, b) in uc.iter().zip(&uv) {
        let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let base: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        step_relative_l2.push(if base > 0.0 { diff / base } else { diff });
        max_dev = a.iter().zip(b).fold(max_dev, |m, (x, y)| m.max((x - y).abs()));
    }
    Ok(ComparisonReport {
        fidelity,
        scale,
        step_relative_l2,
        max_pointwise_deviation: max_dev,
        u_classical: uc,
        u_vqls: uv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::real_vec;

    #[test]
    fn zero_angles_give_entangler_on_zero_state() {
        let cfg = AnsatzConfig::new(1, 4, 0);
        let psi = ansatz_state(&cfg, &[0.0; 4]).unwrap();
        assert_eq!(psi[0], ONE);
        assert!(psi[1..].iter().all(|v| *v == ZERO));
    }

    #[test]
    fn parameter_count() {
        assert_eq!(AnsatzConfig::new(3, 7, 1).param_count(), 21);
        assert_eq!(AnsatzConfig::new(3, 7, 1).seeded_params().len(), 21);
        assert!(AnsatzConfig::new(3, 7, 1).seeded_params().iter().all(|t| (0.0..TAU).contains(t)));
    }

    #[test]
    fn householder_maps_zero_to_b() {
        let b = vec![C64::new(0.3, 0.4), C64::new(-1.0, 0.2), C64::new(0.0, 0.5), C64::new(2.0, 0.0)];
        let ub = HouseholderUb::new(&b).unwrap();
        let mut e0 = vec![ONE, ZERO, ZERO, ZERO];
        ub.apply(&mut e0);
        let bn = prepare_b(&b).unwrap();
        assert!(e0.iter().zip(&bn).all(|(a, c)| (a - c).norm() < 1e-14));
        let mut back = e0.clone();
        ub.apply_adjoint(&mut back);
        assert!((back[0] - ONE).norm() < 1e-14);
    }

    #[test]
    fn prepare_b_rejects_zero() {
        assert!(prepare_b(&[ZERO; 4]).is_err());
        let a = prepare_b(&real_vec(&[1.0, 0.0])).unwrap();
        let b = prepare_b(&real_vec(&[5.0, 0.0])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn identity_system_converges() {
        let problem = VqlsProblem::new(SparseMatrix::identity(2), &[ONE, ZERO]).unwrap();
        let cfg = AnsatzConfig::new(1, 1, 3);
        let res = optimize(&problem, &cfg, &OptimizerOptions::default()).unwrap();
        assert!(res.converged);
        assert!(res.fidelity >= 0.999, "{}", res.fidelity);
    }

    #[test]
    fn cost_vanishes_at_solution() {
        let l = SparseMatrix::from_real_rows(&[
            vec![2.0, 1.0, 0.0, 0.0],
            vec![0.0, 1.5, -0.5, 0.0],
            vec![0.0, 0.0, 1.0, 0.25],
            vec![0.3, 0.0, 0.0, 1.0],
        ]);
        let b = real_vec(&[1.0, -0.5, 0.25, 2.0]);
        let p = VqlsProblem::new(l, &b).unwrap();
        assert!(p.cost_of_state(&p.solution).unwrap() < 1e-14);
        let other = real_vec(&[1.0, 0.0, 0.0, 0.0]);
        assert!(p.cost_of_state(&other).unwrap() > 1e-3);
    }
}
