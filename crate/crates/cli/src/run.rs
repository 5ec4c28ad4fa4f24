//! Experiment executors. Each takes a validated plan, computes, and returns
//! a table plus a gate verdict; artifact writing is shared. Result files
//! (results.json, table.csv) are deterministic for a fixed seed; wall-clock
//! timings go only into the manifest.

use crate::config::{Kind, Plan, ShiftSpec};
use argshift_core::gaudin::{
    cyclic_span_dimension, inhomogeneous_hamiltonians, is_self_adjoint, principal_triple,
};
use argshift_core::mat::Mat;
use argshift_core::modules::{build_irreducible, principal_grading_character, TensorModule};
use argshift_core::monodromy::{rigidity_scan, MonodromyOptions};
use argshift_core::opers::build_oper_space;
use argshift_core::quantum::{is_regular_element, quantum_mf_family};
use argshift_core::roots::q_weyl_dimension;
use argshift_core::scalar::rat_to_str;
use argshift_core::spectra::{joint_spectrum, rescaling_limit_check, SpectrumOptions};
use argshift_core::{C64, GaussRat, Rat, RootSystemData, Scalar, Series, Weight};
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::path::Path;

pub struct RunOutput {
    pub gate_pass: bool,
    pub gate_detail: String,
    pub columns: Vec<String>,
    /// CSV cells, row-major, aligned with `columns`.
    pub rows: Vec<Vec<String>>,
    /// The same rows as JSON objects.
    pub row_objects: Vec<Value>,
    pub summary: Value,
}

fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        "inf".to_string()
    }
}

fn json_f64(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!("inf")
    }
}

/// Seeded regular diagonal traceless shift with sixteenths-scale entries:
/// small enough for the monodromy and eigensolver tolerances, generic enough
/// to be regular.
fn random_shift(rng: &mut ChaCha8Rng, n: usize) -> Mat<Rat> {
    loop {
        let mut entries: Vec<Rat> = Vec::new();
        while entries.len() < n - 1 {
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            let v = Rat::from_frac(sign * (2 * rng.gen_range(0..8) + 1), 16);
            if !entries.contains(&v) {
                entries.push(v);
            }
        }
        let sum: Rat = entries.iter().cloned().fold(Rat::zero(), |a, b| a + b);
        entries.push(-sum);
        let mut seen = entries.clone();
        seen.sort();
        seen.dedup();
        if seen.len() < n {
            continue;
        }
        let mut mu = Mat::<Rat>::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            mu[(i, i)] = e;
        }
        if is_regular_element(&mu) {
            return mu;
        }
    }
}

fn resolve_shift(plan: &Plan, rng: &mut ChaCha8Rng) -> Mat<Rat> {
    let n = plan.algebra.rank + 1;
    match &plan.shift {
        ShiftSpec::Random => random_shift(rng, n),
        ShiftSpec::Explicit(m) => m.clone(),
        ShiftSpec::Principal => principal_triple(n).2,
    }
}

fn build_module(plan: &Plan) -> Result<TensorModule, String> {
    let factors = plan
        .weights
        .iter()
        .map(|w| build_irreducible(plan.algebra, w).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    TensorModule::new(factors).map_err(|e| e.to_string())
}

fn weight_label(w: &Weight) -> String {
    let coords: Vec<String> = w.coords.iter().map(rat_to_str).collect();
    format!("V[{}]", coords.join(","))
}

pub fn execute(plan: &Plan) -> Result<RunOutput, String> {
    match plan.kind {
        Kind::Spectrum => run_spectrum(plan),
        Kind::Cyclicity => run_cyclicity(plan),
        Kind::Rigidity => run_rigidity(plan),
        Kind::Limit => run_limit(plan),
        Kind::IdentitySuite => run_identity_suite(plan),
    }
}

fn run_spectrum(plan: &Plan) -> Result<RunOutput, String> {
    let module = build_module(plan)?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mu = resolve_shift(plan, &mut rng);
    let fam =
        inhomogeneous_hamiltonians(&module, &plan.points, &mu).map_err(|e| e.to_string())?;
    let opts = SpectrumOptions { seed: plan.seed, ..SpectrumOptions::default() };
    let js = joint_spectrum(&fam, Some(&module.gram()), &opts).map_err(|e| e.to_string())?;

    let mut columns = vec!["tuple".to_string()];
    for k in 0..fam.len() {
        columns.push(format!("ev{k}_re"));
        columns.push(format!("ev{k}_im"));
    }
    columns.extend(["multiplicity", "min_gap", "tol", "pass"].map(String::from));

    let mut rows = Vec::new();
    let mut row_objects = Vec::new();
    for (i, tuple) in js.eigenvalue_tuples.iter().enumerate() {
        let mult = js.multiplicities[i];
        let pass = mult == 1 && js.min_gap > plan.tol;
        let mut row = vec![i.to_string()];
        for ev in tuple {
            row.push(fmt_f64(ev.re));
            row.push(fmt_f64(ev.im));
        }
        row.extend([
            mult.to_string(),
            fmt_f64(js.min_gap),
            fmt_f64(plan.tol),
            pass.to_string(),
        ]);
        rows.push(row);
        row_objects.push(json!({
            "tuple": i,
            "eigenvalues": tuple.iter().map(|e| json!([e.re, e.im])).collect::<Vec<_>>(),
            "multiplicity": mult,
            "min_gap": json_f64(js.min_gap),
            "tol": plan.tol,
            "pass": pass,
        }));
    }

    let simple = js.multiplicities.iter().all(|&m| m == 1);
    let gate_pass =
        js.distinct_count() == module.dimension && simple && js.min_gap > plan.tol;
    let gate_detail = format!(
        "{} distinct tuples on a dimension-{} module, min_gap {}",
        js.distinct_count(),
        module.dimension,
        fmt_f64(js.min_gap)
    );
    Ok(RunOutput {
        gate_pass,
        gate_detail,
        columns,
        rows,
        row_objects,
        summary: json!({
            "dimension": module.dimension,
            "distinct": js.distinct_count(),
            "min_gap": json_f64(js.min_gap),
            "max_residual": json_f64(js.max_residual),
            "basis": format!("{:?}", js.basis),
            "ambiguities": js.ambiguities,
        }),
    })
}

fn run_cyclicity(plan: &Plan) -> Result<RunOutput, String> {
    let module = build_module(plan)?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mu = resolve_shift(plan, &mut rng);
    let fam = quantum_mf_family(&module, &plan.points, &mu, true).map_err(|e| e.to_string())?;
    let dim = module.dimension;
    let mut top = vec![Rat::zero(); dim];
    top[0] = Rat::one();
    let span = cyclic_span_dimension(&top, &fam.operators);
    let pass = span == dim;

    let label: Vec<String> = plan.weights.iter().map(weight_label).collect();
    let label = label.join("*");
    let columns =
        ["module", "dimension", "cyclic_span", "tol", "pass"].map(String::from).to_vec();
    let rows = vec![vec![
        label.clone(),
        dim.to_string(),
        span.to_string(),
        "0".to_string(),
        pass.to_string(),
    ]];
    let row_objects = vec![json!({
        "module": label,
        "dimension": dim,
        "cyclic_span": span,
        "tol": 0,
        "pass": pass,
    })];
    Ok(RunOutput {
        gate_pass: pass,
        gate_detail: format!("cyclic span {span} of dimension {dim} (exact rank)"),
        columns,
        rows,
        row_objects,
        summary: json!({ "dimension": dim, "cyclic_span": span }),
    })
}

fn run_rigidity(plan: &Plan) -> Result<RunOutput, String> {
    let grid: Vec<C64> = plan.grid.iter().map(|&(re, im)| C64::new(re, im)).collect();
    let opts = MonodromyOptions { defect_tol: plan.tol, ..MonodromyOptions::default() };
    let rows_raw = rigidity_scan(&plan.spin, &grid, &opts).map_err(|e| e.to_string())?;

    let columns =
        ["u_re", "u_im", "defect", "error_estimate", "tol", "pass"].map(String::from).to_vec();
    let mut rows = Vec::new();
    let mut row_objects = Vec::new();
    for r in &rows_raw {
        rows.push(vec![
            fmt_f64(r.u.re),
            fmt_f64(r.u.im),
            fmt_f64(r.defect),
            fmt_f64(r.error_estimate),
            fmt_f64(plan.tol),
            r.pass.to_string(),
        ]);
        row_objects.push(json!({
            "u": [r.u.re, r.u.im],
            "defect": json_f64(r.defect),
            "error_estimate": json_f64(r.error_estimate),
            "tol": plan.tol,
            "pass": r.pass,
        }));
    }

    let passing: Vec<_> = rows_raw.iter().filter(|r| r.pass).collect();
    let at_origin = passing.len() == 1 && passing[0].u.norm() == 0.0;
    let margin = rows_raw
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.defect)
        .fold(f64::INFINITY, f64::min);
    let gate_pass = at_origin;
    let gate_detail = format!(
        "{} passing of {} grid points, failing margin {}",
        passing.len(),
        rows_raw.len(),
        fmt_f64(margin)
    );
    Ok(RunOutput {
        gate_pass,
        gate_detail,
        columns,
        rows,
        row_objects,
        summary: json!({
            "spin": rat_to_str(&plan.spin),
            "grid_points": rows_raw.len(),
            "passing": passing.len(),
            "failing_margin": json_f64(margin),
        }),
    })
}

fn run_limit(plan: &Plan) -> Result<RunOutput, String> {
    let module = build_module(plan)?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mu = resolve_shift(plan, &mut rng);
    let opts = SpectrumOptions { seed: plan.seed, ..SpectrumOptions::default() };
    let rep = rescaling_limit_check(&module, &plan.points, &mu, &plan.scales, &opts)
        .map_err(|e| e.to_string())?;

    let columns = ["scale", "max_angle", "tol", "pass"].map(String::from).to_vec();
    let mut rows = Vec::new();
    let mut row_objects = Vec::new();
    let last = rep.max_angles.len() - 1;
    for (i, angle) in rep.max_angles.iter().enumerate() {
        // A row passes when the angle kept shrinking and, at the final
        // scale, beat the angle tolerance.
        let shrunk = i == 0 || *angle < rep.max_angles[i - 1];
        let pass = shrunk && (i < last || *angle < plan.angle_tol);
        rows.push(vec![
            rat_to_str(&rep.s_values[i]),
            fmt_f64(*angle),
            fmt_f64(plan.angle_tol),
            pass.to_string(),
        ]);
        row_objects.push(json!({
            "scale": rat_to_str(&rep.s_values[i]),
            "max_angle": json_f64(*angle),
            "tol": plan.angle_tol,
            "pass": pass,
        }));
    }
    let gate_pass = rep.monotone_decreasing && rep.max_angles[last] < plan.angle_tol;
    let gate_detail = format!(
        "angles {:?}, final bound {}",
        rep.max_angles, plan.angle_tol
    );
    Ok(RunOutput {
        gate_pass,
        gate_detail,
        columns,
        rows,
        row_objects,
        summary: json!({
            "scales": rep.s_values.iter().map(rat_to_str).collect::<Vec<_>>(),
            "max_angles": rep.max_angles.iter().map(|&a| json_f64(a)).collect::<Vec<_>>(),
            "monotone_decreasing": rep.monotone_decreasing,
            "notes": rep.notes,
        }),
    })
}

/// Exact identity battery for one root datum: structural counts and
/// character identities always, module-level identities for the type-A
/// labels that carry the matrix machinery.
fn run_identity_suite(plan: &Plan) -> Result<RunOutput, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let rsd = RootSystemData::build(plan.algebra).map_err(|e| e.to_string())?;
    let mut checks: Vec<(String, String, bool)> = Vec::new();

    let expected = (rsd.dim_algebra() + rsd.rank()) / 2;
    checks.push((
        "generator_count".into(),
        format!(
            "(dim + rank)/2 = ({} + {})/2 = {expected}",
            rsd.dim_algebra(),
            rsd.rank()
        ),
        rsd.free_generator_count() == expected,
    ));

    let mut small_weights: Vec<Weight> = vec![Weight::zero(rsd.rank())];
    for i in 0..rsd.rank() {
        let mut w = vec![0i64; rsd.rank()];
        w[i] = 1;
        small_weights.push(Weight::from_ints(&w));
    }
    small_weights.push(Weight::from_ints(&vec![1i64; rsd.rank()]));
    let mut palindromic = true;
    for w in &small_weights {
        let chi = q_weyl_dimension(&rsd, w).map_err(|e| e.to_string())?;
        let deg = chi.degree().unwrap_or(0);
        for k in 0..=deg {
            if chi.coeff(k) != chi.coeff(deg - k) {
                palindromic = false;
            }
        }
        if !chi.coeff(0).is_one() {
            palindromic = false;
        }
    }
    checks.push((
        "palindromic_q_dimension".into(),
        format!("{} small dominant weights", small_weights.len()),
        palindromic,
    ));

    if plan.algebra.series == Series::A && plan.algebra.rank <= 2 {
        let n = plan.algebra.rank + 1;
        let pair = if n == 2 {
            vec![Weight::from_ints(&[1]), Weight::from_ints(&[1])]
        } else {
            vec![Weight::from_ints(&[1, 0]), Weight::from_ints(&[0, 1])]
        };
        let factors = pair
            .iter()
            .map(|w| build_irreducible(plan.algebra, w).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        let module = TensorModule::new(factors).map_err(|e| e.to_string())?;
        let z = [Rat::zero(), Rat::one()];
        let mu = random_shift(&mut rng, n);
        let fam =
            inhomogeneous_hamiltonians(&module, &z, &mu).map_err(|e| e.to_string())?;
        checks.push((
            "pairwise_commutators".into(),
            format!("{} Hamiltonians, exact entries", fam.len()),
            fam.check_commutativity().is_ok(),
        ));

        let zg: Vec<GaussRat> = z.iter().map(|x| GaussRat::new(x.clone(), Rat::zero())).collect();
        let mug = mu.map(|x| GaussRat::new(x.clone(), Rat::zero()));
        let famg =
            inhomogeneous_hamiltonians(&module, &zg, &mug).map_err(|e| e.to_string())?;
        let gram = module.gram().map(|x| GaussRat::new(x.clone(), Rat::zero()));
        checks.push((
            "self_adjointness".into(),
            "real points, shift in i times the compact Cartan".into(),
            famg.operators.iter().all(|op| is_self_adjoint(op, &gram)),
        ));

        let single = if n == 2 { Weight::from_ints(&[3]) } else { Weight::from_ints(&[1, 1]) };
        let sm = build_irreducible(plan.algebra, &single).map_err(|e| e.to_string())?;
        let chi = q_weyl_dimension(&rsd, &single).map_err(|e| e.to_string())?;
        checks.push((
            "character_identity".into(),
            format!("principal grading character of {}", weight_label(&single)),
            principal_grading_character(&sm) == chi,
        ));

        let smod = TensorModule::new(vec![sm]).map_err(|e| e.to_string())?;
        let f = principal_triple(n).2;
        let famf =
            quantum_mf_family(&smod, &[Rat::zero()], &f, true).map_err(|e| e.to_string())?;
        let mut top = vec![Rat::zero(); smod.dimension];
        top[0] = Rat::one();
        checks.push((
            "principal_cyclicity".into(),
            format!("highest vector of {}", weight_label(&single)),
            cyclic_span_dimension(&top, &famf.operators) == smod.dimension,
        ));

        let space = build_oper_space(plan.algebra, &z, &random_shift(&mut rng, n))
            .map_err(|e| e.to_string())?;
        checks.push((
            "oper_coordinate_count".into(),
            format!("two marked points, {} coordinates", space.coordinate_count()),
            space.coordinate_count() == expected * 2,
        ));
    }

    let columns = ["check", "detail", "tol", "pass"].map(String::from).to_vec();
    let mut rows = Vec::new();
    let mut row_objects = Vec::new();
    for (name, detail, ok) in &checks {
        rows.push(vec![name.clone(), detail.clone(), "0".to_string(), ok.to_string()]);
        row_objects.push(json!({
            "check": name,
            "detail": detail,
            "tol": 0,
            "pass": ok,
        }));
    }
    let passed = checks.iter().filter(|(_, _, ok)| *ok).count();
    Ok(RunOutput {
        gate_pass: passed == checks.len(),
        gate_detail: format!("{passed} of {} exact identities hold", checks.len()),
        columns,
        rows,
        row_objects,
        summary: json!({ "checks": checks.len(), "passed": passed }),
    })
}

/// Resolved inputs as they entered the computation; deterministic, so it is
/// safe for results.json as well as the manifest.
pub fn inputs_json(plan: &Plan) -> Value {
    let shift = match &plan.shift {
        ShiftSpec::Explicit(m) => {
            let rows: Vec<Vec<String>> = (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| rat_to_str(&m[(i, j)])).collect())
                .collect();
            json!({ "mode": "explicit", "entries": rows })
        }
        other => json!({ "mode": other.mode_name() }),
    };
    json!({
        "algebra": plan.algebra.to_string(),
        "weights": plan
            .weights
            .iter()
            .map(|w| w.coords.iter().map(rat_to_str).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "points": plan.points.iter().map(rat_to_str).collect::<Vec<_>>(),
        "shift": shift,
        "spin": rat_to_str(&plan.spin),
        "grid": plan.grid.iter().map(|&(re, im)| json!([re, im])).collect::<Vec<_>>(),
        "scales": plan.scales.iter().map(rat_to_str).collect::<Vec<_>>(),
        "angle_tol": plan.angle_tol,
    })
}

pub fn write_artifacts(
    plan: &Plan,
    out: &RunOutput,
    config_file: Option<&Path>,
    total_ms: u128,
) -> Result<(), String> {
    std::fs::create_dir_all(&plan.out)
        .map_err(|e| format!("cannot create output directory {}: {e}", plan.out.display()))?;

    let results = json!({
        "kind": plan.kind.name(),
        "seed": plan.seed,
        "tol": plan.tol,
        "inputs": inputs_json(plan),
        "gate": { "pass": out.gate_pass, "detail": out.gate_detail },
        "columns": out.columns,
        "rows": out.row_objects,
        "summary": out.summary,
    });
    let results_path = plan.out.join("results.json");
    std::fs::write(&results_path, format!("{:#}\n", results))
        .map_err(|e| format!("cannot write {}: {e}", results_path.display()))?;

    let mut csv = out.columns.join(",");
    csv.push('\n');
    for row in &out.rows {
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    let table_path = plan.out.join("table.csv");
    std::fs::write(&table_path, csv)
        .map_err(|e| format!("cannot write {}: {e}", table_path.display()))?;

    let manifest = json!({
        "kind": plan.kind.name(),
        "config_file": config_file.map(|p| p.display().to_string()),
        "seed": plan.seed,
        "tol": plan.tol,
        "out": plan.out.display().to_string(),
        "inputs": inputs_json(plan),
        "versions": {
            "argshift-cli": env!("CARGO_PKG_VERSION"),
            "argshift-core": argshift_core::VERSION,
        },
        "artifacts": { "results": "results.json", "table": "table.csv" },
        "timings": { "total_ms": total_ms },
    });
    let manifest_path = plan.out.join("manifest.json");
    std::fs::write(&manifest_path, format!("{:#}\n", manifest))
        .map_err(|e| format!("cannot write {}: {e}", manifest_path.display()))?;
    Ok(())
}
