use std::fmt::Write as _;
use std::path::Path;

use carleman_core::block_encoding::{block_encode, verify_encoding, EncodingReport, VERIFY_WIDTH_CAP};
use carleman_core::burgers::{build_carleman_a, build_time_system, carleman_initial_vector, initial_state};
use carleman_core::decomposition::{decompose_full, reconstruct, TermConfig, TermCounts, TermDocument};
use carleman_core::embedding::{build_embedded_system, extract_solution};
use carleman_core::pauli::{pauli_decompose, PAULI_MAX_QUBITS};
use carleman_core::resources::{fit_proportional, log_log_slope, resource_table, worst_l2b, ClassSummary, ProportionalFit};
use carleman_core::sparse::{real_vec, vec_norm, DEFAULT_DIM_CAP};
use carleman_core::vqls::{compare_solutions, optimize, AnsatzConfig, ComparisonReport, OptimizerOptions, VqlsProblem};
use carleman_core::{
    classical_solve, Circuit, GridConfig, TermClass, U1Descriptor, C64,
};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::output::Artifacts;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Reconstruction tolerance for `decompose --verify`.
pub const RECONSTRUCTION_TOL: f64 = 1e-12;

/// Largest operator dimension written by `build --dump-matrix`.
pub const DUMP_DIM_CAP: usize = 1 << 12;

/// Term count reported for the desk-scale run in the literature; it differs
/// from the enumeration and is echoed for reference only.
pub const REPORTED_DESK_SCALE_TERMS: usize = 73;

fn initial_vector(cfg: &RunConfig, grid: &GridConfig) -> Result<Vec<C64>, CliError> {
    let u0 = initial_state(grid, cfg.initial.sigma, cfg.initial.mu)?;
    Ok(carleman_initial_vector(&real_vec(&u0), grid.alpha))
}

fn is_desk_scale(grid: &GridConfig) -> bool {
    (grid.n_x, grid.n_t, grid.alpha) == (4, 4, 2)
}

#[derive(Debug, Serialize)]
struct BuildSummary {
    schema_version: u32,
    carleman_dim: usize,
    l_dim: usize,
    l_nnz: usize,
    l_e_dim: usize,
    l_e_nnz: usize,
    qubits: usize,
    b_e_norm: f64,
}

pub fn build(cfg: &RunConfig, out: &Path, dump_matrix: bool) -> Result<(), CliError> {
    let grid = cfg.grid_config()?;
    let y0 = initial_vector(cfg, &grid)?;
    let plain = build_time_system(&build_carleman_a(&grid)?, &grid, &y0)?;
    let sys = build_embedded_system(&grid, &y0)?;
    let summary = BuildSummary {
        schema_version: SCHEMA_VERSION,
        carleman_dim: grid.carleman_dim(),
        l_dim: plain.l.nrows(),
        l_nnz: plain.l.nnz(),
        l_e_dim: sys.l_e.nrows(),
        l_e_nnz: sys.l_e.nnz(),
        qubits: sys.qubit_count,
        b_e_norm: vec_norm(&sys.b_e),
    };
    let mut art = Artifacts::new(out)?;
    art.write_json("system.json", &summary)?;
    art.write_json("b_e.json", &sys.b_e)?;
    if dump_matrix {
        if sys.l_e.nrows() <= DUMP_DIM_CAP {
            let mut csv = String::from("row,col,re,im\n");
            for (r, c, v) in sys.l_e.iter() {
                writeln!(csv, "{r},{c},{},{}", v.re, v.im).expect("write to string");
            }
            art.write("l_e.csv", csv.as_bytes())?;
        } else {
            eprintln!(
                "warning: L^(e) has dimension {} > {DUMP_DIM_CAP}; matrix dump skipped",
                sys.l_e.nrows()
            );
        }
    }
    println!(
        "dim={}, nnz(L^(e))={}, qubits={}, dim(L)={}, nnz(L)={}",
        summary.l_e_dim, summary.l_e_nnz, summary.qubits, summary.l_dim, summary.l_nnz
    );
    art.finish("build", cfg, &summary)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct DecomposeReport {
    schema_version: u32,
    enumerated: TermCounts,
    formula: TermCounts,
    pauli_terms: Option<usize>,
    reported_count: Option<usize>,
    max_abs_err: Option<f64>,
    tolerance: f64,
}

pub fn decompose(cfg: &RunConfig, out: &Path, verify: bool) -> Result<(), CliError> {
    let grid = cfg.grid_config()?;
    let terms = decompose_full(&grid)?;
    let enumerated = TermCounts::enumerate(&terms);
    let formula = TermCounts::formula(&grid);
    let needs_system = verify || grid.system_qubits() <= PAULI_MAX_QUBITS;
    let sys = if needs_system {
        Some(build_embedded_system(&grid, &initial_vector(cfg, &grid)?)?)
    } else {
        None
    };
    let pauli_terms = match &sys {
        Some(s) if s.qubit_count <= PAULI_MAX_QUBITS => Some(pauli_decompose(&s.l_e)?.len()),
        _ => None,
    };
    let max_abs_err = match (&sys, verify) {
        (Some(s), true) if s.l_e.nrows() <= DEFAULT_DIM_CAP => {
            Some(reconstruct(&terms, DEFAULT_DIM_CAP)?.max_abs_diff(&s.l_e)?)
        }
        (_, true) => {
            eprintln!("warning: L^(e) exceeds the realization cap; reconstruction check skipped");
            None
        }
        _ => None,
    };
    let report = DecomposeReport {
        schema_version: SCHEMA_VERSION,
        enumerated,
        formula,
        pauli_terms,
        reported_count: is_desk_scale(&grid).then_some(REPORTED_DESK_SCALE_TERMS),
        max_abs_err,
        tolerance: RECONSTRUCTION_TOL,
    };
    let mut art = Artifacts::new(out)?;
    art.write_json("terms.json", &TermDocument::new(&grid, terms))?;
    art.write_json("decompose_report.json", &report)?;

    let mut line = format!(
        "enumerated={} (L1={}, L2a={}, L2b={}), formula={}",
        enumerated.total, enumerated.l1, enumerated.l2a, enumerated.l2b, formula.total
    );
    if let Some(p) = pauli_terms {
        write!(line, ", pauli={p}").expect("write to string");
    }
    if let Some(r) = report.reported_count {
        write!(line, ", reported={r} (differs from the enumeration)").expect("write to string");
    }
    println!("{line}");
    art.finish("decompose", cfg, &report)?;

    if enumerated != formula {
        return Err(CliError::Verification(format!(
            "enumerated count {} differs from the closed form {}",
            enumerated.total, formula.total
        )));
    }
    if let Some(err) = max_abs_err {
        println!("max_abs_err={err:.3e} (tolerance {RECONSTRUCTION_TOL:e})");
        if err > RECONSTRUCTION_TOL {
            return Err(CliError::Verification(format!("reconstruction error {err:.3e}")));
        }
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EncodedTerm {
    pub term_id: usize,
    pub class: TermClass,
    pub j: usize,
    pub l: usize,
    pub coefficient: C64,
    pub width: usize,
    pub u1: U1Descriptor,
    pub u2: Circuit,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CircuitDocument {
    pub schema_version: u32,
    pub config: TermConfig,
    pub encodings: Vec<EncodedTerm>,
}

#[derive(Debug, Serialize)]
struct EncodeSummary {
    encoded: usize,
    verified: usize,
    skipped: usize,
    failed: Vec<usize>,
    worst_error: f64,
}

pub fn encode(cfg: &RunConfig, out: &Path, verify: bool, term: Option<usize>) -> Result<(), CliError> {
    let grid = cfg.grid_config()?;
    let terms = decompose_full(&grid)?;
    let selected: Vec<usize> = match term {
        Some(id) if id < terms.len() => vec![id],
        Some(id) => {
            return Err(CliError::Config(format!(
                "--term {id} is out of range; this grid has {} terms (0..{})",
                terms.len(),
                terms.len() - 1
            )))
        }
        None => (0..terms.len()).collect(),
    };
    let mut encodings = Vec::with_capacity(selected.len());
    let mut reports: Vec<(usize, EncodingReport)> = Vec::new();
    let mut skipped = 0;
    for &id in &selected {
        let t = &terms[id];
        let enc = block_encode(t)?;
        if verify {
            if enc.width <= VERIFY_WIDTH_CAP {
                reports.push((id, verify_encoding(&enc, t)?));
            } else {
                skipped += 1;
            }
        }
        encodings.push(EncodedTerm {
            term_id: id,
            class: t.class,
            j: t.j,
            l: t.l,
            coefficient: t.coefficient,
            width: enc.width,
            u1: enc.u1,
            u2: enc.u2,
        });
    }
    if skipped > 0 {
        eprintln!("warning: {skipped} encodings are wider than {VERIFY_WIDTH_CAP} qubits; dense verification skipped");
    }
    let failed: Vec<usize> = reports.iter().filter(|(_, r)| !r.passed()).map(|(id, _)| *id).collect();
    let worst_error = reports
        .iter()
        .map(|(_, r)| r.u1_unitarity.max(r.u2_unitarity).max(r.u_unitarity).max(r.block_error))
        .fold(0.0, f64::max);
    let summary = EncodeSummary {
        encoded: encodings.len(),
        verified: reports.len(),
        skipped,
        failed: failed.clone(),
        worst_error,
    };
    let mut art = Artifacts::new(out)?;
    art.write_json(
        "circuits.json",
        &CircuitDocument {
            schema_version: SCHEMA_VERSION,
            config: TermDocument::new(&grid, Vec::new()).config,
            encodings,
        },
    )?;
    if verify {
        #[derive(Serialize)]
        struct Row<'a> {
            term_id: usize,
            passed: bool,
            #[serde(flatten)]
            report: &'a EncodingReport,
        }
        let rows: Vec<Row> = reports
            .iter()
            .map(|(id, r)| Row { term_id: *id, passed: r.passed(), report: r })
            .collect();
        art.write_json("encode_report.json", &rows)?;
        println!(
            "verified {}/{} encodings, {} failed, worst error {worst_error:.3e}",
            reports.len() - failed.len(),
            reports.len(),
            failed.len()
        );
    } else {
        println!("encoded {} terms", summary.encoded);
    }
    art.finish("encode", cfg, &summary)?;
    if let Some(id) = failed.first() {
        let detail = reports
            .iter()
            .find(|(i, _)| i == id)
            .and_then(|(_, r)| r.mismatch.clone())
            .unwrap_or_else(|| "unitarity or projector identity violated".into());
        return Err(CliError::Verification(format!("term {id}: {detail}")));
    }
    Ok(())
}

/// Grid points of a `--sweep` specification such as `n_x=4..64;n_t=n_x;alpha=2`.
///
/// Each entry is `key=values` with `key` one of `n_x`, `n_t`, `alpha`; values
/// are a power-of-two range `a..b`, a list `a,b,c`, or (for `n_t`) the word
/// `n_x` to tie the time register to the spatial one. Unlisted keys keep
/// their configured value.
pub fn parse_sweep(text: &str, base: &GridConfig) -> Result<Vec<(usize, usize, usize)>, CliError> {
    let mut n_x = vec![base.n_x];
    let mut n_t = vec![base.n_t];
    let mut alpha = vec![base.alpha];
    let mut tie = false;
    for entry in text.split(';').map(str::trim).filter(|e| !e.is_empty()) {
        let (key, values) = entry
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("sweep entry `{entry}` is not key=values")))?;
        let (key, values) = (key.trim(), values.trim());
        if key == "n_t" && values == "n_x" {
            tie = true;
            continue;
        }
        let parsed = parse_values(values).map_err(|m| CliError::Config(format!("sweep `{entry}`: {m}")))?;
        match key {
            "n_x" => n_x = parsed,
            "n_t" => n_t = parsed,
            "alpha" => alpha = parsed,
            other => return Err(CliError::Config(format!("unknown sweep key `{other}` (use n_x, n_t or alpha)"))),
        }
    }
    let mut points = Vec::new();
    for &a in &alpha {
        for &x in &n_x {
            if tie {
                points.push((x, x, a));
            } else {
                points.extend(n_t.iter().map(|&t| (x, t, a)));
            }
        }
    }
    Ok(points)
}

fn parse_values(values: &str) -> Result<Vec<usize>, String> {
    let num = |s: &str| s.trim().parse::<usize>().map_err(|e| format!("`{s}`: {e}"));
    if let Some((lo, hi)) = values.split_once("..") {
        let (lo, hi) = (num(lo)?, num(hi)?);
        if !lo.is_power_of_two() || lo > hi {
            return Err(format!("range {lo}..{hi} must start at a power of two no larger than its end"));
        }
        let mut out = Vec::new();
        let mut v = lo;
        while v <= hi {
            out.push(v);
            v = v.checked_mul(2).ok_or("range overflows")?;
        }
        Ok(out)
    } else {
        values.split(',').map(num).collect()
    }
}

#[derive(Debug, Serialize)]
struct ResourcesSummary<'a> {
    schema_version: u32,
    qubits: usize,
    terms: usize,
    classes: &'a [ClassSummary],
}

#[derive(Debug, Serialize)]
struct SweepPoint {
    n_x: usize,
    n_t: usize,
    alpha: usize,
    qubits: usize,
    terms: usize,
    l2b_clifford: u64,
    l2b_t: u64,
    l2b_q: usize,
}

/// Fit of the worst `L2b` counts over one `α`.
#[derive(Debug, Serialize)]
struct SweepFit {
    alpha: usize,
    points: usize,
    /// `clifford ≈ c · α (log n_x)²`
    clifford: ProportionalFit,
    /// `t ≈ c' · (log n_x)²`
    t: ProportionalFit,
    /// Log-log slope against `log n_x`; tends to 2 at large `n_x`.
    clifford_exponent: f64,
    t_exponent: f64,
}

pub fn resources(cfg: &RunConfig, out: &Path, sweep: Option<&str>) -> Result<(), CliError> {
    let grid = cfg.grid_config()?;
    let model = cfg.cost;
    let mut art = Artifacts::new(out)?;
    let Some(sweep) = sweep else {
        let table = resource_table(&grid, &model)?;
        art.write("resources.csv", table.to_csv().as_bytes())?;
        let summary = ResourcesSummary {
            schema_version: SCHEMA_VERSION,
            qubits: table.qubits,
            terms: table.rows.len(),
            classes: &table.classes,
        };
        art.write_json("resources_summary.json", &summary)?;
        println!("qubits={} terms={}", table.qubits, table.rows.len());
        println!("class,terms,clifford_min,clifford_max,t_min,t_max,max_q");
        for c in &table.classes {
            println!(
                "{},{},{},{},{},{},{}",
                c.class, c.terms, c.clifford_min, c.clifford_max, c.t_min, c.t_max, c.cqx_largest
            );
        }
        art.finish("resources", cfg, &summary)?;
        return Ok(());
    };

    let mut points = Vec::new();
    for (n_x, n_t, alpha) in parse_sweep(sweep, &grid)? {
        let g = GridConfig::new(n_x, n_t, alpha, grid.dt, grid.nu, grid.l_x)
            .map_err(|e| CliError::Config(format!("sweep point ({n_x},{n_t},{alpha}): {e}")))?;
        let worst = worst_l2b(&g, &model)?;
        points.push(SweepPoint {
            n_x,
            n_t,
            alpha,
            qubits: g.system_qubits() + 1,
            terms: TermCounts::formula(&g).total,
            l2b_clifford: worst.map_or(0, |w| w.clifford),
            l2b_t: worst.map_or(0, |w| w.t),
            l2b_q: worst.map_or(0, |w| w.cqx_largest),
        });
    }
    let mut csv = String::from("n_x,n_t,alpha,qubits,terms,l2b_clifford,l2b_t,l2b_q\n");
    for p in &points {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            p.n_x, p.n_t, p.alpha, p.qubits, p.terms, p.l2b_clifford, p.l2b_t, p.l2b_q
        )
        .expect("write to string");
    }
    art.write("sweep.csv", csv.as_bytes())?;

    let mut alphas: Vec<usize> = points.iter().map(|p| p.alpha).collect();
    alphas.dedup();
    let mut fits = Vec::new();
    for a in alphas {
        let sel: Vec<&SweepPoint> = points.iter().filter(|p| p.alpha == a && p.l2b_clifford > 0).collect();
        let mut logs: Vec<f64> = sel.iter().map(|p| (p.n_x as f64).log2()).collect();
        logs.dedup();
        if a < 2 || logs.len() < 2 || logs.len() != sel.len() {
            continue;
        }
        let sq: Vec<f64> = logs.iter().map(|s| s * s).collect();
        let cliff: Vec<f64> = sel.iter().map(|p| p.l2b_clifford as f64).collect();
        let t: Vec<f64> = sel.iter().map(|p| p.l2b_t as f64).collect();
        let fit = SweepFit {
            alpha: a,
            points: sel.len(),
            clifford: fit_proportional(&sq.iter().map(|v| a as f64 * v).collect::<Vec<_>>(), &cliff),
            t: fit_proportional(&sq, &t),
            clifford_exponent: log_log_slope(&logs, &cliff),
            t_exponent: log_log_slope(&logs, &t),
        };
        println!(
            "alpha={a}: clifford ~ {:.3} a (log n_x)^2 (residual {:.3}, exponent {:.3}); t ~ {:.3} (log n_x)^2 (residual {:.3}, exponent {:.3})",
            fit.clifford.c,
            fit.clifford.relative_residual,
            fit.clifford_exponent,
            fit.t.c,
            fit.t.relative_residual,
            fit.t_exponent
        );
        fits.push(fit);
    }
    #[derive(Serialize)]
    struct SweepSummary<'a> {
        schema_version: u32,
        sweep: &'a str,
        points: &'a [SweepPoint],
        fits: &'a [SweepFit],
    }
    let summary = SweepSummary {
        schema_version: SCHEMA_VERSION,
        sweep,
        points: &points,
        fits: &fits,
    };
    art.write_json("sweep_summary.json", &summary)?;
    print!("{csv}");
    art.finish("resources", cfg, &summary)?;
    Ok(())
}

/// Solution vectors written by `solve` and read back by `compare`.
#[derive(Debug, Serialize, Deserialize)]
pub struct SolutionDocument {
    pub schema_version: u32,
    pub y_classical: Vec<C64>,
    pub vqls_state: Option<Vec<C64>>,
}

#[derive(Debug, Serialize)]
struct VqlsSummary {
    qubits: usize,
    layers: usize,
    parameters: usize,
    seed: u64,
    iterations: usize,
    converged: bool,
    final_cost: f64,
    fidelity: f64,
    step_relative_l2: Vec<f64>,
    max_pointwise_deviation: f64,
    theta_opt: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct SolveSummary {
    schema_version: u32,
    dimension: usize,
    max_pad: f64,
    vqls: Option<VqlsSummary>,
}

fn trajectory_csv(grid: &GridConfig, classical: &[Vec<f64>], vqls: Option<&[Vec<f64>]>) -> String {
    let mut csv = String::from("time,x_index,x,u_classical,u_vqls\n");
    let nodes = grid.nodes();
    for (t, row) in classical.iter().enumerate() {
        for (i, u) in row.iter().enumerate() {
            let v = vqls.map(|q| q[t][i].to_string()).unwrap_or_default();
            writeln!(csv, "{},{i},{},{u},{v}", t as f64 * grid.dt, nodes[i]).expect("write to string");
        }
    }
    csv
}

pub fn solve(cfg: &RunConfig, out: &Path, classical_only: bool) -> Result<(), CliError> {
    let grid = cfg.grid_config()?;
    let sys = build_embedded_system(&grid, &initial_vector(cfg, &grid)?)?;
    let y = classical_solve(&sys.l_e, &sys.b_e)?;
    let traj = extract_solution(&y, &grid)?;
    let u_classical = traj.real_u();
    let mut art = Artifacts::new(out)?;

    let (vqls, state, comparison): (Option<VqlsSummary>, Option<Vec<C64>>, Option<ComparisonReport>) = if classical_only {
        (None, None, None)
    } else {
        let problem = VqlsProblem::from_terms(&decompose_full(&grid)?, &sys.b_e)?;
        let ansatz = AnsatzConfig::new(cfg.vqls.layers, problem.qubits, cfg.vqls.seed);
        let opts = OptimizerOptions {
            tolerance: cfg.vqls.tolerance,
            max_iter: cfg.vqls.max_iter,
            fd_step: cfg.vqls.fd_step,
        };
        let res = optimize(&problem, &ansatz, &opts)?;
        let cmp = compare_solutions(&res.state, &y, &grid)?;
        let mut trace = String::from("iteration,cost\n");
        for (i, c) in &res.cost_trace {
            writeln!(trace, "{i},{c}").expect("write to string");
        }
        art.write("cost_trace.csv", trace.as_bytes())?;
        let summary = VqlsSummary {
            qubits: problem.qubits,
            layers: ansatz.layers,
            parameters: ansatz.param_count(),
            seed: res.seed,
            iterations: res.iterations,
            converged: res.converged,
            final_cost: res.final_cost,
            fidelity: cmp.fidelity,
            step_relative_l2: cmp.step_relative_l2.clone(),
            max_pointwise_deviation: cmp.max_pointwise_deviation,
            theta_opt: res.theta_opt.clone(),
        };
        (Some(summary), Some(res.state), Some(cmp))
    };

    art.write(
        "trajectory.csv",
        trajectory_csv(&grid, &u_classical, comparison.as_ref().map(|c| c.u_vqls.as_slice())).as_bytes(),
    )?;
    art.write_json(
        "solution.json",
        &SolutionDocument {
            schema_version: SCHEMA_VERSION,
            y_classical: y,
            vqls_state: state,
        },
    )?;
    let summary = SolveSummary {
        schema_version: SCHEMA_VERSION,
        dimension: sys.l_e.nrows(),
        max_pad: traj.max_pad(),
        vqls,
    };
    println!("classical solve: dim={}, max pad={:.2e}", summary.dimension, summary.max_pad);
    if let Some(v) = &summary.vqls {
        let worst = v.step_relative_l2.iter().copied().fold(0.0, f64::max);
        println!(
            "vqls: seed={} iterations={} converged={} cost={:.4e} fidelity={:.6} worst step error={:.4}",
            v.seed, v.iterations, v.converged, v.final_cost, v.fidelity, worst
        );
    }
    art.finish("solve", cfg, &summary)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct CompareSummary {
    schema_version: u32,
    fidelity: f64,
    fidelity_min: f64,
    step_relative_l2: Vec<f64>,
    step_error_max: f64,
    max_pointwise_deviation: f64,
    passed: bool,
}

pub fn compare(cfg: &RunConfig, out: &Path, input: Option<&Path>) -> Result<(), CliError> {
    let grid = cfg.grid_config()?;
    let path = input.map(Path::to_path_buf).unwrap_or_else(|| out.join("solution.json"));
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Io(format!("{}: {e} (run `carleman solve` first)", path.display())))?;
    let doc: SolutionDocument =
        serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let state = doc.vqls_state.ok_or_else(|| {
        CliError::Verification(format!("{} has no VQLS state (solved with --classical-only)", path.display()))
    })?;
    let cmp = compare_solutions(&state, &doc.y_classical, &grid)?;
    let worst = cmp.step_relative_l2.iter().copied().fold(0.0, f64::max);
    let passed = cmp.fidelity >= cfg.compare.fidelity_min && worst <= cfg.compare.step_error_max;
    let summary = CompareSummary {
        schema_version: SCHEMA_VERSION,
        fidelity: cmp.fidelity,
        fidelity_min: cfg.compare.fidelity_min,
        step_relative_l2: cmp.step_relative_l2.clone(),
        step_error_max: cfg.compare.step_error_max,
        max_pointwise_deviation: cmp.max_pointwise_deviation,
        passed,
    };
    let mut art = Artifacts::new(out)?;
    art.write(
        "comparison.csv",
        trajectory_csv(&grid, &cmp.u_classical, Some(&cmp.u_vqls)).as_bytes(),
    )?;
    art.write_json("comparison.json", &summary)?;
    println!(
        "{}: fidelity={:.6} (min {}), worst step error={:.4} (max {})",
        if passed { "PASS" } else { "FAIL" },
        cmp.fidelity,
        cfg.compare.fidelity_min,
        worst,
        cfg.compare.step_error_max
    );
    art.finish("compare", cfg, &summary)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Verification("VQLS solution outside the comparison thresholds".into()))
    }
}
