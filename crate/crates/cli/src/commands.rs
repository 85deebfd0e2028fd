use std::path::Path;

use glsx::fenchel::tail_bound_check;
use glsx::magic::{
    check_super_exact, make_doubly_even, make_siamese, make_uniform_magic, validate_magic, Convention, MagicSquare,
    SquareDoc, SuperExactReport,
};
use glsx::mri::{supp_ordering, verify_theorem2_with_constant, MRINorm, MriSpec};
use glsx::opnorm::extrapolation::{constant_for, thin, verify_theorem1_with_constant};
use glsx::opnorm::{op_norm_oracle, SigmaReport, TheoremReport};
use glsx::{
    check_sigma_condition, fundamental_function, gls_norm, minimal_constant, op_norm_lower, GenSpec,
    GeneratingFunction, GlsError, GridConfig, GridFunction, MatrixOperator, OperatorBoundCertificate, PGrid,
    TheoremOptions,
};
use serde_json::{json, Value};

use crate::args::{Cli, Command, Common, ConventionArg, OperatorArgs};
use crate::error::CliError;
use crate::report::{jnum, num, Report, Table};

/// Inline JSON when the argument starts with `{` or `[`, a file path otherwise.
fn load(arg: &str) -> Result<String, CliError> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(Path::new(arg)).map_err(|e| CliError::Read(arg.to_string(), e.to_string()))
    }
}

fn load_json(arg: &str) -> Result<Value, CliError> {
    Ok(serde_json::from_str(&load(arg)?).map_err(GlsError::from)?)
}

fn grid_config(c: &Common) -> GridConfig {
    GridConfig {
        points: c.grid_points,
        ..GridConfig::default()
    }
}

fn base_config(c: &Common) -> Value {
    json!({
        "seed": c.seed,
        "grid": grid_config(c),
        "samples": c.samples,
        "tolerance": c.tolerance,
    })
}

fn with(mut config: Value, extra: Value) -> Value {
    if let (Value::Object(m), Value::Object(e)) = (&mut config, extra) {
        m.extend(e);
    }
    config
}

fn psi_spec(arg: &str) -> Result<(GeneratingFunction, Value), CliError> {
    let spec: GenSpec = serde_json::from_value(load_json(arg)?).map_err(GlsError::from)?;
    Ok((spec.build()?, serde_json::to_value(&spec).map_err(CliError::output)?))
}

fn function(arg: &str) -> Result<GridFunction, CliError> {
    Ok(GridFunction::from_json(&load(arg)?)?)
}

fn function_doc(f: &GridFunction) -> Value {
    json!({"weights": f.space().weights(), "values": f.values()})
}

fn matrix(arg: &str) -> Result<MatrixOperator, CliError> {
    Ok(MatrixOperator::from_json(&load(arg)?)?)
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let c = &cli.common;
    let cfg = grid_config(c);
    let name = cli.command.name();
    match &cli.command {
        Command::GlsNorm { function: f, psi } => {
            let f = function(f)?;
            let (psi, spec) = psi_spec(psi)?;
            let grid = PGrid::for_function(&psi, &cfg)?;
            let r = gls_norm(&f, &psi, &grid)?;
            Ok(Report {
                command: name,
                config: with(base_config(c), json!({"function": function_doc(&f), "psi": spec})),
                passed: true,
                result: json!({
                    "norm": jnum(r.value),
                    "argmax_p": r.argmax_p,
                    "endpoint_flag": r.endpoint_flag,
                    "grid_len": grid.len(),
                }),
                table: None,
            })
        }
        Command::Fundamental { psi, delta } => {
            let (psi, spec) = psi_spec(psi)?;
            let grid = PGrid::for_function(&psi, &cfg)?;
            let mut rows = Vec::new();
            let mut table = Vec::new();
            for &d in delta {
                let r = fundamental_function(&psi, d, &grid)?;
                rows.push(json!({"delta": d, "phi": jnum(r.value), "argmax_p": r.argmax_p, "endpoint_flag": r.endpoint_flag}));
                table.push(vec![num(d), num(r.value), r.argmax_p.to_string(), r.endpoint_flag.to_string()]);
            }
            Ok(Report {
                command: name,
                config: with(base_config(c), json!({"psi": spec, "delta": delta})),
                passed: true,
                result: json!({ "rows": rows }),
                table: Some(Table {
                    header: vec!["delta", "phi", "argmax_p", "endpoint_flag"],
                    rows: table,
                }),
            })
        }
        Command::FenchelTail {
            function: f,
            psi,
            t,
            normalize,
        } => {
            let f = function(f)?;
            let (psi, spec) = psi_spec(psi)?;
            let grid = PGrid::for_function(&psi, &cfg)?;
            let f = if *normalize {
                let n = gls_norm(&f, &psi, &grid)?.value;
                if n > 0.0 {
                    f.scaled(1.0 / n)
                } else {
                    f
                }
            } else {
                f
            };
            let r = tail_bound_check(&f, &psi, t, &grid)?;
            let table = r
                .rows
                .iter()
                .map(|row| {
                    vec![
                        num(row.t),
                        num(row.tail),
                        num(row.bound),
                        num(row.hstar),
                        row.possibly_infinite.to_string(),
                        row.ok.to_string(),
                    ]
                })
                .collect();
            let rows: Vec<Value> = r
                .rows
                .iter()
                .map(|row| {
                    json!({
                        "t": row.t, "tail": row.tail, "bound": jnum(row.bound), "hstar": jnum(row.hstar),
                        "possibly_infinite": row.possibly_infinite, "ok": row.ok,
                    })
                })
                .collect();
            Ok(Report {
                command: name,
                config: with(
                    base_config(c),
                    json!({"function": function_doc(&f), "psi": spec, "t": t, "normalize": normalize}),
                ),
                passed: r.all_ok,
                result: json!({"gls_norm": jnum(r.gls_norm), "rows": rows}),
                table: Some(Table {
                    header: vec!["t", "tail", "bound", "hstar", "possibly_infinite", "ok"],
                    rows: table,
                }),
            })
        }
        Command::Opnorm {
            matrix: m,
            q,
            p,
            restarts,
            oracle,
            resolution,
        } => {
            let a = matrix(m)?;
            let est = op_norm_lower(&a, *q, *p, *restarts, c.seed)?;
            let mut result = json!({
                "lower": est.value,
                "witness": est.witness.values(),
                "zero_matrix": est.zero_matrix,
                "iterations": est.iterations,
            });
            let mut passed = true;
            if *oracle {
                let o = op_norm_oracle(&a, *q, *p, *resolution)?;
                let gap = (est.value - o.value).abs() / o.value.max(f64::MIN_POSITIVE);
                passed = est.value == o.value || gap <= c.tolerance;
                result = with(
                    result,
                    json!({"oracle": o.value, "oracle_argmax": o.argmax, "oracle_evaluations": o.evaluations, "rel_gap": gap}),
                );
            }
            Ok(Report {
                command: name,
                config: with(
                    base_config(c),
                    json!({"matrix": a.to_doc(), "q": q, "p": p, "restarts": restarts, "oracle": oracle, "resolution": resolution}),
                ),
                passed,
                result,
                table: None,
            })
        }
        Command::MinimalConstant {
            matrix: m,
            sigma,
            constant_grid_points,
            p_interval,
            q_interval,
        } => {
            let a = matrix(m)?;
            let pg = thin(&PGrid::log_spaced(*p_interval, &cfg)?, *constant_grid_points);
            let qg = thin(&PGrid::log_spaced(*q_interval, &cfg)?, *constant_grid_points);
            let mc = minimal_constant(&a, *sigma, &pg, &qg, c.samples, c.seed)?;
            Ok(Report {
                command: name,
                config: with(
                    base_config(c),
                    json!({"matrix": a.to_doc(), "sigma": sigma, "p_interval": p_interval, "q_interval": q_interval,
                           "p_grid": pg, "q_grid": qg}),
                ),
                passed: true,
                result: json!({"value": mc.value, "p": mc.p, "q": mc.q}),
                table: None,
            })
        }
        Command::VerifyTheorem1 { operator, psi, nu } => {
            let a = matrix(&operator.matrix)?;
            let (psi, psi_doc) = psi_spec(psi)?;
            let (nu, nu_doc) = psi_spec(nu)?;
            let pg = PGrid::for_function(&psi, &cfg)?;
            let qg = PGrid::for_function(&nu, &cfg)?;
            let opts = options(c, operator);
            let checked = certify(&a, operator, &pg, &qg, &opts)?;
            let theorem = match &checked.cert {
                Some(cert) => Some(verify_theorem1_with_constant(&a, cert, &psi, &nu, checked.c_min, &opts)?),
                None => None,
            };
            Ok(theorem_report(
                name,
                with(base_config(c), json!({"matrix": a.to_doc(), "sigma": operator.sigma, "psi": psi_doc, "nu": nu_doc})),
                operator,
                &checked,
                theorem,
                json!({}),
            ))
        }
        Command::VerifyTheorem2 { operator, w, r } => {
            let a = matrix(&operator.matrix)?;
            let w_spec: MriSpec = serde_json::from_value(load_json(w)?).map_err(GlsError::from)?;
            let r_spec: MriSpec = serde_json::from_value(load_json(r)?).map_err(GlsError::from)?;
            let wn: MRINorm = w_spec.build(&cfg)?;
            let rn: MRINorm = r_spec.build(&cfg)?;
            let ordered = supp_ordering(&wn, &rn);
            if !ordered {
                eprintln!(
                    "warning: support ordering fails: min of {} is below max of {}",
                    wn.interval(),
                    rn.interval()
                );
            }
            let opts = options(c, operator);
            let checked = certify(&a, operator, wn.grid(), rn.grid(), &opts)?;
            let theorem = match &checked.cert {
                Some(cert) => Some(verify_theorem2_with_constant(&a, cert, &wn, &rn, checked.c_min, &opts)?),
                None => None,
            };
            Ok(theorem_report(
                name,
                with(base_config(c), json!({"matrix": a.to_doc(), "sigma": operator.sigma, "w": w_spec, "r": r_spec})),
                operator,
                &checked,
                theorem,
                json!({ "supp_ordering": ordered }),
            ))
        }
        Command::Magic {
            order,
            validate,
            check_norms,
            convention,
            resolution,
        } => {
            if let Some(arg) = validate {
                return validate_square(name, c, arg);
            }
            let n = order.expect("clap requires --order without --validate");
            let square = build_square(n)?;
            let config = with(
                base_config(c),
                json!({"order": n, "check_norms": check_norms, "convention": format!("{convention:?}").to_lowercase(), "resolution": resolution}),
            );
            if check_norms.is_empty() {
                let table = square.entries().iter().map(|r| r.iter().map(|&x| num(x)).collect()).collect();
                return Ok(Report {
                    command: name,
                    config,
                    passed: true,
                    result: json!({"entries": square.entries(), "alpha": square.alpha()}),
                    table: Some(Table {
                        header: (0..n).map(|_| "").collect(),
                        rows: table,
                    }),
                });
            }
            let conventions: &[Convention] = match convention {
                ConventionArg::Counting => &[Convention::Counting],
                ConventionArg::Normalized => &[Convention::Normalized],
                ConventionArg::Both => &Convention::ALL,
            };
            let report = check_super_exact(&square, check_norms, conventions, *resolution, c.tolerance)?;
            Ok(super_exact_report(name, config, &square, report))
        }
        Command::CheckSuperExact {
            order,
            pairs,
            resolution,
        } => {
            let square = build_square(*order)?;
            let report = check_super_exact(&square, pairs, &Convention::ALL, *resolution, c.tolerance)?;
            let config = with(base_config(c), json!({"order": order, "pairs": pairs, "resolution": resolution}));
            Ok(super_exact_report(name, config, &square, report))
        }
    }
}

fn build_square(n: usize) -> Result<MagicSquare, CliError> {
    Ok(match n {
        1 => make_uniform_magic(1, 1.0)?,
        n if n % 2 == 1 => make_siamese(n)?,
        n if n % 4 == 0 => make_doubly_even(n)?,
        n => {
            return Err(GlsError::InvalidParameter {
                name: "order",
                reason: format!("no construction for n = {n} (n = 2 mod 4); supply the square as JSON"),
            }
            .into())
        }
    })
}

/// Accepts `{"entries":...}` or a report whose `result` holds the entries.
fn validate_square(name: &'static str, c: &Common, arg: &str) -> Result<Report, CliError> {
    let doc = load_json(arg)?;
    let entries = match doc.get("entries") {
        Some(_) => doc,
        None => doc
            .get("result")
            .cloned()
            .ok_or_else(|| GlsError::Malformed("expected an \"entries\" field".into()))?,
    };
    let entries = match entries {
        Value::Object(mut m) => m.remove("entries").unwrap_or(Value::Null),
        other => other,
    };
    let square: SquareDoc = serde_json::from_value(json!({ "entries": entries })).map_err(GlsError::from)?;
    let report = validate_magic(&square.entries)?;
    let table = report
        .lines
        .iter()
        .map(|l| vec![l.line.to_string(), num(l.sum), num(l.deviation), l.ok.to_string()])
        .collect();
    Ok(Report {
        command: name,
        config: with(base_config(c), json!({"entries": square.entries})),
        passed: report.pass,
        result: serde_json::to_value(&report).map_err(CliError::output)?,
        table: Some(Table {
            header: vec!["line", "sum", "deviation", "ok"],
            rows: table,
        }),
    })
}

fn super_exact_report(name: &'static str, config: Value, square: &MagicSquare, report: SuperExactReport) -> Report {
    let table = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.convention.to_string(),
                r.ordering.to_string(),
                r.q.to_string(),
                r.p.to_string(),
                num(r.oracle),
                num(r.formula),
                num(r.rel_gap),
                r.matches.to_string(),
            ]
        })
        .collect();
    let mut result = serde_json::to_value(&report).expect("report serializes");
    result["entries"] = json!(square.entries());
    Report {
        command: name,
        config,
        passed: true,
        result,
        table: Some(Table {
            header: vec!["convention", "ordering", "q", "p", "oracle", "formula", "rel_gap", "match"],
            rows: table,
        }),
    }
}

fn options(c: &Common, op: &OperatorArgs) -> TheoremOptions {
    TheoremOptions {
        samples: c.samples,
        seed: c.seed,
        grid: grid_config(c),
        constant_grid_points: op.constant_grid_points,
    }
}

struct Certified {
    c_min: f64,
    claimed: f64,
    sigma: SigmaReport,
    /// Present when the σ-check passed.
    cert: Option<OperatorBoundCertificate>,
}

/// Estimates `C̲` on the thinned grids and witnesses the claimed constant.
fn certify(
    a: &MatrixOperator,
    op: &OperatorArgs,
    p_grid: &PGrid,
    q_grid: &PGrid,
    opts: &TheoremOptions,
) -> Result<Certified, CliError> {
    let p_iv = *p_grid.interval();
    let q_iv = *q_grid.interval();
    let probe = OperatorBoundCertificate::new(op.sigma, 1.0, p_iv, q_iv)?;
    let c_min = constant_for(a, &probe, p_grid, q_grid, opts)?.value;
    let claimed = op.constant.unwrap_or(c_min);
    let mut cert = OperatorBoundCertificate::new(op.sigma, claimed.max(f64::MIN_POSITIVE), p_iv, q_iv)?;
    let p_pts = thin(p_grid, opts.constant_grid_points);
    let q_pts = thin(q_grid, opts.constant_grid_points);
    let sigma = check_sigma_condition(a, &mut cert, &p_pts, &q_pts, opts.samples, opts.seed)?;
    Ok(Certified {
        c_min,
        claimed,
        cert: sigma.holds.then_some(cert),
        sigma,
    })
}

fn theorem_report(
    name: &'static str,
    config: Value,
    op: &OperatorArgs,
    checked: &Certified,
    theorem: Option<TheoremReport>,
    extra: Value,
) -> Report {
    let config = with(config, json!({"constant": op.constant, "constant_grid_points": op.constant_grid_points}));
    let sigma = json!({
        "holds": checked.sigma.holds,
        "worst_ratio": jnum(checked.sigma.worst_ratio),
        "worst_p": checked.sigma.worst_p,
        "worst_q": checked.sigma.worst_q,
        "worst_g": checked.sigma.worst_g,
    });
    let mut result = json!({
        "minimal_constant": checked.c_min,
        "claimed_constant": checked.claimed,
        "sigma_condition": sigma,
    });
    let passed = match &theorem {
        Some(t) => {
            result["theorem"] = json!({
                "holds": t.holds,
                "violations": t.violations,
                "samples": t.samples,
                "max_ratio": jnum(t.max_ratio),
                "max_ratio_g": t.max_ratio_g,
                "phi_target": t.phi_target,
                "phi_source": t.phi_source,
            });
            t.holds
        }
        None => false,
    };
    Report {
        command: name,
        config,
        passed,
        result: with(result, extra),
        table: None,
    }
}
