use std::fmt::Write as _;

use drumkit::catalog::{find, load_catalog, ExampleSpec};
use drumkit::geometry::{check_embedding, congruent, default_pose, realize, render_svg, warped_triangle, BaseTriangle, Embedding};
use drumkit::spectral::{
    compare_point_measures, compare_spectra, point_measure, refine, solve_smallest, assemble, CLUSTER_GAP,
};
use drumkit::tiling::{build_tiling, derive_minimal, derive_transplant, BoundaryCondition, Seed, Tiling};
use drumkit::verify::verify_pair;
use drumkit::{Domain, Error};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::{Outcome, FAIL, PASS, USAGE};

fn lookup(id: &str) -> Result<&'static ExampleSpec, Outcome> {
    find(id).map_err(|e| Outcome::usage(e.to_string()))
}

fn tilings(spec: &ExampleSpec) -> (Tiling, Tiling) {
    (
        build_tiling(&spec.left).expect("catalog tilings are valid"),
        build_tiling(&spec.right).expect("catalog tilings are valid"),
    )
}

fn row_json(e: &ExampleSpec) -> Value {
    json!({
        "id": e.id,
        "generators": e.generator_label(),
        "degree": e.degree,
        "kernel": format!("×^{}", e.crosscap_count),
        "g0": e.signature_g0.to_string(),
        "a0": e.signature_a0.to_string(),
        "b0": e.signature_b0.to_string(),
        "group": e.group_name,
    })
}

/// The catalog, or one row of it.
pub fn list(id: Option<&str>) -> Outcome {
    let rows: Vec<&ExampleSpec> = match id {
        Some(id) => match lookup(id) {
            Ok(e) => vec![e],
            Err(o) => return o,
        },
        None => load_catalog().iter().collect(),
    };
    let mut text = format!("{:<6} {:<10} {:>3} {:<8} {:<6} {:<24} {}\n", "pair", "gens", "n", "kernel", "G0", "A0, B0", "group");
    for e in &rows {
        let _ = writeln!(
            text,
            "{:<6} {:<10} {:>3} {:<8} {:<6} {:<24} {}",
            e.id,
            e.generator_label(),
            e.degree,
            format!("×^{}", e.crosscap_count),
            e.signature_g0.to_string(),
            format!("{}, {}", e.signature_a0, e.signature_b0),
            e.group_name
        );
    }
    let report = match id {
        Some(_) => row_json(rows[0]),
        None => Value::Array(rows.iter().map(|e| row_json(e)).collect()),
    };
    Outcome { code: PASS, report, text: Some(text) }
}

/// Combinatorial verification of one pair or of all of them.
pub fn verify(target: &str) -> Outcome {
    let specs: Vec<&ExampleSpec> = if target == "all" {
        load_catalog().iter().collect()
    } else {
        match lookup(target) {
            Ok(e) => vec![e],
            Err(o) => return o,
        }
    };
    let reports: Vec<(bool, Value)> = specs
        .par_iter()
        .map(|spec| match verify_pair(spec) {
            Ok(r) => (r.passed, serde_json::to_value(&r).expect("serializable report")),
            Err(e) => (false, json!({ "id": spec.id, "passed": false, "failures": [e.to_string()] })),
        })
        .collect();
    let all_passed = reports.iter().all(|r| r.0);
    let mut text = String::new();
    for (passed, r) in &reports {
        let _ = writeln!(text, "{:<6} {}", r["id"].as_str().unwrap_or("?"), if *passed { "pass" } else { "FAIL" });
        if let Some(fails) = r["failures"].as_array() {
            for f in fails {
                let _ = writeln!(text, "       {}", f.as_str().unwrap_or(""));
            }
        }
    }
    let report = if target == "all" {
        Value::Array(reports.into_iter().map(|r| r.1).collect())
    } else {
        reports.into_iter().next().map(|r| r.1).unwrap_or(Value::Null)
    };
    Outcome { code: if all_passed { PASS } else { FAIL }, report, text: Some(text) }
}

/// A transplantation matrix, derived from an explicit seed or the minimal one.
pub fn transplant(id: &str, bc: BoundaryCondition, seed: Option<(usize, usize)>, complement: bool) -> Outcome {
    let spec = match lookup(id) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let (l, r) = tilings(spec);
    if let Some((tile, label)) = seed {
        if tile >= l.n() || label >= l.n() {
            return Outcome::usage(format!("seed out of range for {} tiles", l.n()));
        }
    }
    let derived = match seed {
        Some((right_tile, left_label)) => {
            let seed = Seed { right_tile, left_label };
            derive_transplant(&l, &r, seed, bc).map(|t| (seed, t))
        }
        None => derive_minimal(&l, &r, bc),
    };
    let (seed, mut t) = match derived {
        Ok(x) => x,
        Err(e) => return Outcome { code: FAIL, report: json!({ "pair": spec.id, "error": e.to_string() }), text: None },
    };
    if complement {
        t = match t.complement() {
            Ok(c) => c,
            Err(e) => return Outcome { code: FAIL, report: json!({ "pair": spec.id, "error": e.to_string() }), text: None },
        };
    }
    let mut text = format!(
        "{} {} map, seed right {} ← left {}, stencil {}, det {}\n",
        spec.id,
        bc,
        seed.right_tile,
        seed.left_label,
        t.stencil(),
        t.determinant()
    );
    for row in 0..t.n() {
        let _ = writeln!(text, "{row:>3}: {}", t.row_expression(row));
    }
    text.push('\n');
    text.push_str(&t.to_text());
    let mut report = t.to_json();
    report["pair"] = json!(spec.id);
    report["seed"] = json!({ "right_tile": seed.right_tile, "left_label": seed.left_label });
    report["intertwines"] = json!(t.intertwines(&l, &r));
    let code = if t.intertwines(&l, &r) && t.determinant() != 0 { PASS } else { FAIL };
    Outcome { code, report, text: Some(text) }
}

enum Realized {
    Pair(Domain, Domain),
    Refused(Outcome),
}

fn embedding_json(e: &Embedding) -> Value {
    match e {
        Embedding::Embedded => json!("embedded"),
        Embedding::Overlap(w) => json!({ "overlap": w }),
    }
}

fn realize_pair(spec: &ExampleSpec, tri: &BaseTriangle<f64>, allow_cone: bool) -> Realized {
    let (l, r) = tilings(spec);
    let mut domains = Vec::new();
    for (side, t) in [("left", &l), ("right", &r)] {
        match realize(t, tri, &default_pose()) {
            Ok(d) => domains.push(d),
            Err(Error::ConeManifold(defects)) => {
                let report = json!({
                    "pair": spec.id,
                    "status": "cone_manifold",
                    "side": side,
                    "defects": defects,
                });
                return Realized::Refused(Outcome { code: if allow_cone { PASS } else { FAIL }, report, text: None });
            }
            Err(e) => return Realized::Refused(Outcome { code: FAIL, report: json!({ "pair": spec.id, "error": e.to_string() }), text: None }),
        }
    }
    let right = domains.pop().expect("two domains");
    let left = domains.pop().expect("two domains");
    Realized::Pair(left, right)
}

fn triangle_json(t: &BaseTriangle<f64>) -> Value {
    json!({ "angles": t.angles(), "scale": t.scale() })
}

/// Lays out both domains, checks them, and renders them as SVG.
pub fn realize_cmd(id: &str, tri: Option<BaseTriangle<f64>>, allow_cone: bool) -> Outcome {
    let spec = match lookup(id) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let tri = tri.or_else(|| warped_triangle(&spec.id)).unwrap_or_else(|| BaseTriangle::equilateral(1.0));
    let (dl, dr) = match realize_pair(spec, &tri, allow_cone) {
        Realized::Pair(a, b) => (a, b),
        Realized::Refused(o) => return o,
    };
    let (el, er) = (check_embedding(&dl), check_embedding(&dr));
    let embedded = el.is_embedded() && er.is_embedded();
    let shift = dr.placements[0].motion.translation - dl.placements[0].motion.translation;
    let side = |d: &Domain, e: &Embedding| {
        json!({
            "embedding": embedding_json(e),
            "area": d.area(),
            "boundary": d.boundary_json(),
            "special_points": d.special_points.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>(),
        })
    };
    let report = json!({
        "pair": spec.id,
        "triangle": triangle_json(&tri),
        "left": side(&dl, &el),
        "right": side(&dr, &er),
        "congruent": embedded.then(|| congruent(&dl, &dr)),
        "tile0_translation": [shift.x, shift.y],
    });
    Outcome { code: if embedded { PASS } else { FAIL }, report, text: Some(render_svg(&[&dl, &dr])) }
}

/// Realizes, meshes and solves both domains, then compares their spectra
/// and, for homophonic runs, the point measures at the special points.
pub fn spectrum(cfg: &RunConfig) -> Outcome {
    let spec = match lookup(&cfg.pair) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let (tl, tr) = tilings(spec);
    let (dl, dr) = match realize_pair(spec, &cfg.triangle, cfg.allow_cone) {
        Realized::Pair(a, b) => (a, b),
        Realized::Refused(o) => return o,
    };
    for (side, d) in [("left", &dl), ("right", &dr)] {
        if let Embedding::Overlap(w) = check_embedding(d) {
            let report = json!({ "pair": spec.id, "status": "overlap", "side": side, "witness": w });
            return Outcome { code: FAIL, report, text: None };
        }
    }
    if cfg.homophonic && (cfg.bc != BoundaryCondition::Dirichlet || dl.special_points.len() != 1 || dr.special_points.len() != 1) {
        return Outcome {
            code: USAGE,
            report: json!({ "pair": spec.id, "error": "homophonic runs need Dirichlet conditions and one special point per domain" }),
            text: None,
        };
    }
    let solve = |d: &Domain, t: &Tiling| -> Result<_, Error> {
        let mesh = refine(d, t, cfg.level)?;
        let s = solve_smallest(&assemble(&mesh, cfg.bc)?, cfg.count, cfg.solver_tolerance)?;
        Ok((mesh, s))
    };
    let (left, right) = rayon::join(|| solve(&dl, &tl), || solve(&dr, &tr));
    let ((ml, sl), (mr, sr)) = match (left, right) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Outcome { code: FAIL, report: json!({ "pair": spec.id, "error": e.to_string() }), text: None },
    };
    let cmp = compare_spectra(&sl, &sr, cfg.count, cfg.tolerance).expect("same level and conditions");
    let eigenvalues: Vec<Value> = (0..cmp.count)
        .map(|k| json!({ "left": sl.eigenvalues[k], "right": sr.eigenvalues[k], "rel_gap": cmp.gaps[k] }))
        .collect();
    let residuals: Vec<Value> = (0..cmp.count).map(|k| json!({ "left": sl.residuals[k], "right": sr.residuals[k] })).collect();
    let mut report = json!({
        "pair": spec.id,
        "bc": cfg.bc,
        "level": cfg.level,
        "triangle": triangle_json(&cfg.triangle),
        "nodes": [ml.node_count(), mr.node_count()],
        "eigenvalues": eigenvalues,
        "max_rel_gap": cmp.max_rel_gap,
        "tolerance": cfg.tolerance,
        "residuals": residuals,
    });
    let mut passed = cmp.passed;
    if cfg.homophonic {
        let pl = point_measure(&sl, ml.special_nodes[0], CLUSTER_GAP).expect("special node is a mesh vertex");
        let pr = point_measure(&sr, mr.special_nodes[0], CLUSTER_GAP).expect("special node is a mesh vertex");
        let mc = compare_point_measures(&pl, &pr, cfg.clusters, cfg.measure_tolerance);
        passed &= mc.passed;
        report["point_measures"] = json!(pl
            .iter()
            .zip(&pr)
            .take(mc.clusters)
            .zip(&mc.rel_diffs)
            .map(|((a, b), d)| json!({ "eigenvalue": a.mean, "multiplicity": a.size, "left": a.measure, "right": b.measure, "rel_diff": d }))
            .collect::<Vec<_>>());
        report["max_measure_rel_diff"] = json!(mc.max_rel_diff);
        report["measure_tolerance"] = json!(cfg.measure_tolerance);
        report["clusters_compared"] = json!(mc.clusters);
    }
    report["passed"] = json!(passed);
    let text = cfg.svg.as_ref().map(|_| render_svg(&[&dl, &dr]));
    Outcome { code: if passed { PASS } else { FAIL }, report, text }
}
