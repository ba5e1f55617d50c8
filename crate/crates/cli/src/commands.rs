//! Subcommand implementations. Each returns its complete output.

use std::f64::consts::PI;

use hardcore::lattice::{enumerate_rows, orbit_decompose, Boundary, Group};
use hardcore::partition::charpoly::operator_charpoly_at;
use hardcore::partition::zpoly::ZPolyRecord;
use hardcore::partition::{
    cyclotomic_factorize, multiplicity_of_plus_one, partition_polynomial,
    partition_value_at_minus_one, sequence_at, sequence_operator_order, BoundaryCondition,
};
use hardcore::poly::ZPolynomial;
use hardcore::spectra::{
    default_z_d, detect_gaps_sampled, equimodular_endpoints, phase_profile_on, ray_angles_sampled,
    rightmost_crossing_near_minus_one, scan_equimodular, z_c_endpoint, z_d_endpoint, PhaseWindow,
};
use hardcore::transfer::{build_cyclic, build_free, build_sector, Model, Sector, TransferOperator};
use hardcore::zeros::{
    classify_roots, density_profile, edge_exponent_fit, find_roots, near_edge_slope,
    EndpointReport, DEFAULT_AXIS_TOL,
};
use hardcore::zminusone::{
    check_log_derivative_identity, check_odd_cylinder_rule, check_product_form,
    check_torus_coprimality, fit_sequence, minimal_recursion, torus_period_observation,
};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::cache::{JobSpec, Lookup};
use crate::{
    Artifact, CmdResult, Context, Failure, Lattice, Op, Operator, OrbitGroup, RowBoundary,
};

/// Version tag carried by every JSON document.
pub const SCHEMA: &str = "hardcore/1";

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CmdResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| Failure::Io(e.into_error()))
}

fn json_artifact(mut v: Value) -> Artifact {
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), SCHEMA.into());
    }
    let mut s = serde_json::to_string_pretty(&v).expect("json serializes");
    s.push('\n');
    Artifact::text(s)
}

fn lattice_spec(command: &str, l: &Lattice) -> JobSpec {
    JobSpec::new(command)
        .with("model", l.model.name())
        .with("bc", l.bc)
        .with("lv", l.lv)
        .with("lh", l.lh)
}

/// Runs `compute` unless a verified artifact is cached.
fn cached(
    ctx: &Context,
    spec: &JobSpec,
    verify: impl Fn(&[u8], Option<&str>) -> bool,
    compute: impl FnOnce() -> CmdResult<(Vec<u8>, Option<String>)>,
) -> CmdResult<Vec<u8>> {
    let key = spec.key();
    if let Some(cache) = &ctx.cache {
        match cache.lookup(spec, verify)? {
            Lookup::Hit(bytes) => {
                ctx.note(&format!("cache hit {key}"));
                return Ok(bytes);
            }
            Lookup::Corrupt(why) => eprintln!("warning: {why}; recomputing"),
            Lookup::Miss => ctx.note(&format!("cache miss {key}")),
        }
    }
    let (bytes, check) = compute()?;
    if let Some(cache) = &ctx.cache {
        cache.store(spec, &bytes, check)?;
        ctx.note(&format!("cache store {key}"));
    }
    Ok(bytes)
}

fn polynomial_bytes(ctx: &Context, l: Lattice) -> CmdResult<Vec<u8>> {
    let spec = lattice_spec("partition", &l);
    let verify = |bytes: &[u8], check: Option<&str>| {
        let Some(rec) = std::str::from_utf8(bytes)
            .ok()
            .and_then(|t| ZPolyRecord::parse(t).ok())
        else {
            return false;
        };
        (rec.model, rec.bc, rec.lv, rec.lh) == (l.model, l.bc, l.lv, l.lh)
            && check == Some(rec.poly.eval_i64(1).to_string().as_str())
    };
    cached(ctx, &spec, verify, || {
        let poly = partition_polynomial(l.model, l.lv, l.lh, l.bc)?;
        let check = poly.eval_i64(1).to_string();
        let rec = ZPolyRecord {
            model: l.model,
            bc: l.bc,
            lv: l.lv,
            lh: l.lh,
            poly,
        };
        Ok((rec.to_text().into_bytes(), Some(check)))
    })
}

fn polynomial(ctx: &Context, l: Lattice) -> CmdResult<ZPolynomial> {
    let bytes = polynomial_bytes(ctx, l)?;
    let text = String::from_utf8(bytes).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(ZPolyRecord::parse(&text)?.poly)
}

pub fn rows(lh: usize, boundary: RowBoundary, orbits: Option<OrbitGroup>) -> CmdResult<Artifact> {
    let boundary = match boundary {
        RowBoundary::Cyclic => Boundary::Cyclic,
        RowBoundary::Free => Boundary::Free,
    };
    let basis = enumerate_rows(lh, boundary)?;
    let bytes = match orbits {
        None => csv_bytes(
            &["index", "bits", "row", "occupied"],
            basis.states().iter().enumerate().map(|(i, s)| {
                vec![
                    i.to_string(),
                    s.bits.to_string(),
                    s.to_binary(lh),
                    s.weight_exponent().to_string(),
                ]
            }),
        )?,
        Some(g) => {
            let group = match g {
                OrbitGroup::Translation => Group::Translation,
                OrbitGroup::Reflection => Group::Reflection,
                OrbitGroup::Dihedral => Group::Dihedral,
            };
            let orbits = orbit_decompose(&basis, group)?;
            csv_bytes(
                &["representative", "size", "members"],
                orbits.iter().map(|o| {
                    let members: Vec<String> = o.members.iter().map(|m| m.to_binary(lh)).collect();
                    vec![
                        o.representative.to_binary(lh),
                        o.size().to_string(),
                        members.join(" "),
                    ]
                }),
            )?
        }
    };
    Ok(Artifact::new(bytes))
}

pub fn partition(ctx: &Context, l: Lattice) -> CmdResult<Artifact> {
    Ok(Artifact::new(polynomial_bytes(ctx, l)?))
}

pub fn value(l: Lattice, z: i64) -> CmdResult<Artifact> {
    let v = if z == -1 {
        partition_value_at_minus_one(l.model, l.lv, l.lh, l.bc)?
    } else {
        if l.lv == 0 {
            return Err(hardcore::Error::InvalidArgument(
                "lattice sides must be at least 1".into(),
            )
            .into());
        }
        sequence_at(l.model, l.lh, l.bc, z, l.lv)?
            .pop()
            .expect("nonempty sequence")
    };
    Ok(Artifact::text(format!("{v}\n")))
}

fn zeros_csv(ctx: &Context, l: Lattice, digits: u32) -> CmdResult<Vec<u8>> {
    let spec = lattice_spec("zeros", &l).with("digits", digits);
    cached(
        ctx,
        &spec,
        |_, _| true,
        || {
            let p = polynomial(ctx, l)?;
            let zs = find_roots(&p, digits)?;
            let rows = (0..zs.roots.len()).map(|i| {
                let (re, im) = zs.decimal(i, digits as usize);
                vec![re, im, zs.roots[i].1.to_string()]
            });
            Ok((csv_bytes(&["re", "im", "multiplicity"], rows)?, None))
        },
    )
}

fn parse_zeros(bytes: &[u8]) -> CmdResult<Vec<(Complex64, usize)>> {
    let mut r = csv::Reader::from_reader(bytes);
    let bad = |what: &str| Failure::Usage(format!("malformed zeros table: {what}"));
    r.records()
        .map(|rec| {
            let rec = rec?;
            let num = |i: usize| -> CmdResult<f64> {
                rec.get(i)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad("number"))
            };
            let m = rec
                .get(2)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("multiplicity"))?;
            Ok((Complex64::new(num(0)?, num(1)?), m))
        })
        .collect()
}

fn segment_report(ctx: &Context, l: Lattice, digits: u32) -> CmdResult<EndpointReport> {
    let roots = parse_zeros(&zeros_csv(ctx, l, digits)?)?;
    Ok(classify_roots(&roots, DEFAULT_AXIS_TOL))
}

fn complex_json(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

pub fn zeros(ctx: &Context, l: Lattice, digits: u32, report: bool) -> CmdResult<Artifact> {
    if !report {
        return Ok(Artifact::new(zeros_csv(ctx, l, digits)?));
    }
    let r = segment_report(ctx, l, digits)?;
    Ok(json_artifact(json!({
        "model": l.model.name(),
        "bc": l.bc.name(),
        "lv": l.lv,
        "lh": l.lh,
        "digits": digits,
        "z_c": r.z_c.map(complex_json),
        "z_d": r.z_d,
        "z_minus_one": r.z_minus_one,
        "segment_zeros": r.n_segment(),
        "left_of_minus_one": r.left_of_minus_one,
        "off_segment": r.off_segment.len(),
        "lv_mod_6": l.lv % 6,
    })))
}

pub fn density(
    ctx: &Context,
    l: Lattice,
    digits: u32,
    order: usize,
    fit: Option<(f64, f64)>,
    slope_count: usize,
) -> CmdResult<Artifact> {
    let r = segment_report(ctx, l, digits)?;
    let order = if fit.is_some() { order.max(1) } else { order };
    let profile = density_profile(&r.segment, l.lv, l.lh, order)?;
    if let Some(window) = fit {
        let f = edge_exponent_fit(&profile, window)?;
        let slope = near_edge_slope(&profile, slope_count)?;
        return Ok(json_artifact(json!({
            "lv": l.lv,
            "lh": l.lh,
            "window": [window.0, window.1],
            "alpha_f": f.alpha_f,
            "z_f": f.z_f,
            "used": f.used,
            "near_edge_slope": slope,
            "slope_count": slope_count,
            "ratios": f.ratios.iter().map(|&(z, q)| json!([z, q])).collect::<Vec<_>>(),
        })));
    }
    let mut header = vec!["z".to_string()];
    header.extend((0..=order).map(|n| format!("d{n}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = (0..profile.derivatives[0].len()).map(|j| {
        let mut row = vec![profile.zeros[j].to_string()];
        row.extend(
            profile
                .derivatives
                .iter()
                .map(|d| d.get(j).map_or(String::new(), |v| v.to_string())),
        );
        row
    });
    Ok(Artifact::new(csv_bytes(&header, rows)?))
}

pub fn build_operator(o: Operator) -> hardcore::Result<TransferOperator> {
    match o.op {
        Op::C0p => build_sector(o.model, o.lh, Sector::P0Plus),
        Op::Cyclic => build_cyclic(o.model, o.lh),
        Op::Free => build_free(o.model, o.lh),
        Op::FreeParity => build_sector(o.model, o.lh, Sector::ParityPlus),
    }
}

pub fn equimod(
    o: Operator,
    scan: Option<[f64; 4]>,
    grid: usize,
    crossing: bool,
) -> CmdResult<Artifact> {
    let op = build_operator(o)?;
    if let Some([r0, i0, r1, i1]) = scan {
        let pts = scan_equimodular(
            &op,
            Complex64::new(r0, i0),
            Complex64::new(r1, i1),
            grid,
            1e-10,
        )?;
        let rows = pts.iter().map(|p| {
            vec![
                p.z.re.to_string(),
                p.z.im.to_string(),
                p.modulus.to_string(),
                p.tie_residual.to_string(),
                p.theta.to_string(),
            ]
        });
        return Ok(Artifact::new(csv_bytes(
            &["re", "im", "modulus", "tie_residual", "theta"],
            rows,
        )?));
    }
    let ends = equimodular_endpoints(&op)?;
    let mut doc = json!({
        "model": o.model.name(),
        "lh": o.lh,
        "dim": op.dim(),
        "endpoints": ends.iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
        "z_c": z_c_endpoint(&ends).map(complex_json),
        "z_d": z_d_endpoint(&ends),
    });
    if crossing {
        doc["rightmost_crossing_near_minus_one"] = json!(rightmost_crossing_near_minus_one(&op)?);
    }
    Ok(json_artifact(doc))
}

pub fn gaps(o: Operator, z_d: Option<f64>, samples: usize, tol: f64) -> CmdResult<Artifact> {
    let op = build_operator(o)?;
    let gaps = detect_gaps_sampled(&op, z_d.unwrap_or(default_z_d(o.model)), tol, samples)?;
    let rows = gaps.iter().map(|g| {
        vec![
            g.z_left.to_string(),
            g.z_right.to_string(),
            g.width().to_string(),
            if g.dominant_sign > 0 { "+" } else { "-" }.to_string(),
        ]
    });
    Ok(Artifact::new(csv_bytes(
        &["z_left", "z_right", "width", "sign"],
        rows,
    )?))
}

pub fn phase(
    o: Operator,
    samples: usize,
    z_min: Option<f64>,
    z_max: Option<f64>,
) -> CmdResult<Artifact> {
    let op = build_operator(o)?;
    let mut window = PhaseWindow::for_model(o.model, samples);
    window.z_min = z_min.unwrap_or(window.z_min);
    window.z_max = z_max.unwrap_or(window.z_max);
    let p = phase_profile_on(&op, &window)?;
    let rows = (0..p.z.len()).map(|i| {
        vec![
            p.z[i].to_string(),
            p.theta[i].to_string(),
            p.phi[i].to_string(),
            p.neg_dphi_dz[i].to_string(),
            u8::from(p.in_gap[i]).to_string(),
        ]
    });
    Ok(Artifact::new(csv_bytes(
        &["z", "theta", "phi", "neg_dphi_dz", "in_gap"],
        rows,
    )?))
}

pub fn rays(o: Operator, radius: f64, samples: usize) -> CmdResult<Artifact> {
    let op = build_operator(o)?;
    let angles = ray_angles_sampled(&op, radius, samples)?;
    let rows = angles
        .iter()
        .map(|a| vec![a.to_string(), (a / PI).to_string()]);
    Ok(Artifact::new(csv_bytes(&["angle", "angle_over_pi"], rows)?))
}

fn coeff_strings(p: &ZPolynomial) -> Vec<String> {
    p.coeffs().iter().map(|c| c.to_string()).collect()
}

pub fn charpoly(o: Operator, z: i64) -> CmdResult<Artifact> {
    let op = build_operator(o)?;
    let p = operator_charpoly_at(&op, z)?;
    Ok(json_artifact(json!({
        "model": o.model.name(),
        "lh": o.lh,
        "z": z,
        "dim": op.dim(),
        "coefficients": coeff_strings(&p),
    })))
}

pub fn factorize(o: Operator, z: i64, as_json: bool) -> CmdResult<Artifact> {
    let op = build_operator(o)?;
    let f = cyclotomic_factorize(&operator_charpoly_at(&op, z)?)?;
    if !as_json {
        return Ok(Artifact::text(format!("{f}\n")));
    }
    Ok(json_artifact(json!({
        "model": o.model.name(),
        "lh": o.lh,
        "z": z,
        "text": f.to_string(),
        "factors": f.factors.iter().map(|&(n, e)| json!([n, e])).collect::<Vec<_>>(),
        "cyclotomic": f.cyclotomic.iter().map(|&(d, m)| json!([d, m])).collect::<Vec<_>>(),
        "multiplicity_of_plus_one": multiplicity_of_plus_one(&f),
    })))
}

pub fn sequence(
    model: Model,
    bc: BoundaryCondition,
    lh: usize,
    n: Option<usize>,
    z: i64,
    fit: bool,
) -> CmdResult<Artifact> {
    let n = match n {
        Some(n) => n,
        None => 2 * sequence_operator_order(model, lh, bc)? + 4,
    };
    let values = sequence_at(model, lh, bc, z, n)?;
    if !fit {
        let rows = values
            .iter()
            .enumerate()
            .map(|(k, v)| vec![(k + 1).to_string(), v.to_string()]);
        return Ok(Artifact::new(csv_bytes(&["lv", "value"], rows)?));
    }
    let f = minimal_recursion(&values)?;
    Ok(json_artifact(json!({
        "model": model.name(),
        "bc": bc.name(),
        "lh": lh,
        "z": z,
        "terms": n,
        "order": f.order(),
        "recurrence": f.recurrence.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "numerator": coeff_strings(&f.numerator),
        "denominator": coeff_strings(&f.denominator),
        "period": f.period,
        "transient": f.transient,
        "product_form": check_product_form(&f),
    })))
}

struct Check {
    name: &'static str,
    gating: bool,
    holds: bool,
    detail: Value,
}

pub fn conjectures(lh_max: usize, lv_max: usize) -> CmdResult<Artifact> {
    use BoundaryCondition::*;
    let mut checks = Vec::new();

    let violations = check_torus_coprimality(lh_max, lv_max)?;
    checks.push(Check {
        name: "torus value 1 at co-prime sizes",
        gating: true,
        holds: violations.is_empty(),
        detail: json!(violations
            .iter()
            .map(|(lv, lh, v)| json!({"lv": lv, "lh": lh, "value": v.to_string()}))
            .collect::<Vec<_>>()),
    });

    let mut aperiodic = Vec::new();
    let mut no_product = Vec::new();
    for bc in [CC, KC, CF, MF] {
        for lh in 1..=lh_max {
            let fit = fit_sequence(bc, lh, None)?;
            if fit.period.is_none() {
                aperiodic.push(json!({"bc": bc.name(), "lh": lh}));
            }
            if check_product_form(&fit).is_none() {
                no_product.push(json!({"bc": bc.name(), "lh": lh}));
            }
        }
    }
    checks.push(Check {
        name: "periodic direction sequences repeat",
        gating: true,
        holds: aperiodic.is_empty(),
        detail: json!(aperiodic),
    });
    checks.push(Check {
        name: "generating function is a log derivative of a product of (1 - x^p)^m",
        gating: true,
        holds: no_product.is_empty(),
        detail: json!(no_product),
    });

    let mut traced = Vec::new();
    let mut twisted = Vec::new();
    for bc in [CC, CF, KC, MF] {
        for lh in 1..=lh_max {
            let c = check_log_derivative_identity(bc, lh, 60)?;
            let out = if matches!(bc, CC | CF) {
                &mut traced
            } else {
                &mut twisted
            };
            if !c.holds {
                out.push(json!({"bc": bc.name(), "lh": lh, "first_mismatch": c.first_mismatch}));
            }
        }
    }
    checks.push(Check {
        name: "sum Z(-1) x^(Lv-1) = -P'(x)/P(x) for cc and cf",
        gating: true,
        holds: traced.is_empty(),
        detail: json!(traced),
    });
    checks.push(Check {
        name: "same identity for kc and mf (not expected)",
        gating: false,
        holds: twisted.is_empty(),
        detail: json!(twisted),
    });

    let mut table_bad = Vec::new();
    let mut literal_bad = Vec::new();
    for lh in (1..=lh_max.max(9)).step_by(2) {
        let r = check_odd_cylinder_rule(lh, lv_max)?;
        if !r.table_rule_holds() {
            table_bad.push(json!({"lh": lh, "lv": r.table_rule_mismatches}));
        }
        if !r.literal_rule_holds() {
            literal_bad.push(json!({"lh": lh, "lv": r.literal_rule_mismatches}));
        }
    }
    checks.push(Check {
        name: "odd cylinder: -2 iff 3 | gcd(Lh, Lv - 1), else 1",
        gating: true,
        holds: table_bad.is_empty(),
        detail: json!(table_bad),
    });
    checks.push(Check {
        name: "odd cylinder: -2 iff 3 | gcd(Lh - 1, Lv), else 1",
        gating: false,
        holds: literal_bad.is_empty(),
        detail: json!(literal_bad),
    });

    let mut periods = Vec::new();
    let mut all_match = true;
    for lh in (6..=lh_max.max(9)).step_by(3) {
        let (observed, guess) = torus_period_observation(lh)?;
        all_match &= observed.is_some() && observed == guess;
        periods.push(json!({"lh": lh, "observed": observed, "lcm_guess": guess}));
    }
    checks.push(Check {
        name: "torus period lcm(Lh, 2Lh, ..., (Lh/3 - 1)Lh) for 3 | Lh",
        gating: false,
        holds: all_match,
        detail: json!(periods),
    });

    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| c.gating && !c.holds)
        .map(|c| c.name)
        .collect();
    let doc = json!({
        "lh_max": lh_max,
        "lv_max": lv_max,
        "checks": checks.iter().map(|c| json!({
            "name": c.name,
            "gating": c.gating,
            "holds": c.holds,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
    });
    let mut artifact = json_artifact(doc);
    if !failed.is_empty() {
        artifact.validation = Some(format!("checks failed: {}", failed.join("; ")));
    }
    Ok(artifact)
}
