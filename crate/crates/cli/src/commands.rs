use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use slag_core::calibration::{check_point, BasePartials};
use slag_core::embedding::sample_fields;
use slag_core::export::{fields_to_csv, fields_to_vtk, fmt_num, samples_to_csv, samples_to_vtk, Projection};
use slag_core::families::{affine_uv, hl_triple, joyce_check, AffineSolution, HlConfig};
use slag_core::pde::{residual_first_order, solve_dirichlet};
use slag_core::winding::{difference_trace, trace_rows, winding_number};
use slag_core::{Error, Field, Params, Solution};

use crate::config::{load_uv, ExampleSection, OutputFormat, OutputKind, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 4;

fn write(dir: &Path, name: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = dir.join(name);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
    }
    std::fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialise");
    s.push('\n');
    s
}

fn base_dir(config: &Path) -> PathBuf {
    config.parent().map(Path::to_path_buf).unwrap_or_default()
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SolveReport {
    n: usize,
    a: Vec<f64>,
    nx: usize,
    ny: usize,
    iterations: usize,
    picard_steps: usize,
    final_residual: f64,
    ellipticity_margin: f64,
    tolerance: f64,
}

pub fn solve(config: &Path, out: &Path, torus_res: usize, projection: Option<&str>) -> Result<u8> {
    let cfg = RunConfig::load(config)?;
    let params = cfg.params()?;
    let projection = parse_projection(projection, &params)?;
    let grid = cfg.grid()?;
    let phi = cfg.boundary(&grid, &base_dir(config))?;
    let sol = solve_dirichlet(&params, &grid, &phi, &cfg.solver)?;
    let report = SolveReport {
        n: params.n(),
        a: params.a().to_vec(),
        nx: grid.nx(),
        ny: grid.ny(),
        iterations: sol.iterations,
        picard_steps: sol.picard_steps,
        final_residual: sol.final_residual,
        ellipticity_margin: sol.ellipticity_margin,
        tolerance: sol.tolerance,
    };
    let fields = [&sol.f, &sol.u, &sol.v];
    let names = ["f", "u", "v"];
    if cfg.outputs.is_empty() {
        write(out, "fields.csv", &fields_to_csv(&names, &fields)?)?;
        write(out, "report.json", &to_json(&report))?;
    }
    for spec in &cfg.outputs {
        let text = match (spec.kind, spec.format) {
            (OutputKind::Field, OutputFormat::Csv) => fields_to_csv(&names, &fields)?,
            (OutputKind::Field, _) => fields_to_vtk("potential and pair", &names, &fields)?,
            (OutputKind::Report, _) => to_json(&report),
            (OutputKind::Embedding, format) => {
                write_embedding(&params, &sol, torus_res, &projection, format, out, &spec.path)?;
                continue;
            }
        };
        write(out, &spec.path, &text)?;
    }
    println!(
        "converged: {} sweeps, residual {}, ellipticity margin {}",
        sol.iterations,
        fmt_num(sol.final_residual),
        fmt_num(sol.ellipticity_margin)
    );
    Ok(EXIT_OK)
}

fn write_embedding(
    params: &Params,
    sol: &Solution,
    torus_res: usize,
    projection: &Projection,
    format: OutputFormat,
    out: &Path,
    path: &Path,
) -> Result<()> {
    let sampling = sample_fields(params, &sol.u, &sol.v, torus_res)?;
    let text = match format {
        OutputFormat::Vtk => samples_to_vtk("embedded samples", &sampling.samples, projection),
        _ => samples_to_csv(&sampling.samples, params.n()),
    };
    write(out, path, &text)
}

fn parse_projection(spec: Option<&str>, params: &Params) -> Result<Projection> {
    Ok(match spec {
        Some(s) => Projection::parse(s, params.n()).context("--project")?,
        None => Projection::default_for(params.n()),
    })
}

#[derive(Debug, Default, Serialize)]
#[serde(rename_all = "camelCase")]
struct VerifyReport {
    first_order_u: f64,
    first_order_v: f64,
    omega: f64,
    im_omega: f64,
    gamma_fit: f64,
    /// Largest `|γ P'(w) − 1|` over checked frames.
    gamma_law: f64,
    beta: f64,
    frames_checked: usize,
    frames_skipped: usize,
    passed: bool,
}

pub fn verify(config: &Path, fields: &Path, out: &Path) -> Result<u8> {
    let cfg = RunConfig::load(config)?;
    let params = cfg.params()?;
    let (u, v) = load_uv(fields)?;
    let report = verify_fields(&params, &u, &v, &cfg.verify)?;
    write(out, "verify.json", &to_json(&report))?;
    println!(
        "first-order {} / {}, omega {}, Im Omega {}, gamma fit {} over {} frames",
        fmt_num(report.first_order_u),
        fmt_num(report.first_order_v),
        fmt_num(report.omega),
        fmt_num(report.im_omega),
        fmt_num(report.gamma_fit),
        report.frames_checked
    );
    if report.passed {
        Ok(EXIT_OK)
    } else {
        eprintln!("verification failed: residuals exceed the configured budgets");
        Ok(EXIT_VERIFY_FAILED)
    }
}

fn verify_fields(
    params: &Params,
    u: &Field,
    v: &Field,
    budgets: &crate::config::VerifyBudgets,
) -> Result<VerifyReport> {
    let (r1, r2) = residual_first_order(params, u, v)?;
    let mut rep = VerifyReport {
        first_order_u: r1.interior_max_abs(),
        first_order_v: r2.interior_max_abs(),
        ..VerifyReport::default()
    };
    let d = *u.domain();
    for (i, j) in d.interior_nodes() {
        let partials = BasePartials::new(
            u.dx_central(i, j),
            u.dy_central(i, j),
            v.dx_central(i, j),
            v.dy_central(i, j),
        );
        match check_point(params, d.x(i), d.y(j), u.at(i, j), v.at(i, j), partials) {
            Ok(c) => {
                rep.frames_checked += 1;
                rep.omega = rep.omega.max(c.omega);
                rep.im_omega = rep.im_omega.max(c.im_omega);
                let dec = c.decomposition;
                rep.gamma_fit = rep.gamma_fit.max(dec.residual);
                rep.gamma_law = rep.gamma_law.max((dec.gamma * dec.p_prime - 1.0).abs());
                rep.beta = rep.beta.max(dec.beta.abs());
            }
            Err(Error::SingularPoint | Error::DegenerateBranch { .. } | Error::ZeroRadius { .. }) => {
                rep.frames_skipped += 1;
            }
            Err(e) => return Err(e.into()),
        }
    }
    rep.passed = rep.first_order_u.max(rep.first_order_v) <= budgets.first_order
        && rep.omega <= budgets.omega
        && rep.im_omega <= budgets.im_omega
        && rep.gamma_fit <= budgets.gamma_fit;
    Ok(rep)
}

pub fn example(config: &Path, out: &Path) -> Result<u8> {
    let cfg = RunConfig::load(config)?;
    let section = cfg.example.as_ref().context("missing [example] section")?;
    match section {
        ExampleSection::Joyce { a, s_max, points } => {
            if *points < 2 {
                bail!("[example] joyce needs at least 2 points");
            }
            let grid: Vec<f64> = (0..*points).map(|k| s_max * k as f64 / (*points - 1) as f64).collect();
            let dev = joyce_check(*a, &grid)?;
            #[derive(Serialize)]
            #[serde(rename_all = "camelCase")]
            struct JoyceReport {
                a: f64,
                s_max: f64,
                points: usize,
                max_deviation: f64,
            }
            let rep = JoyceReport {
                a: *a,
                s_max: *s_max,
                points: *points,
                max_deviation: dev,
            };
            write(out, "joyce.json", &to_json(&rep))?;
            println!("max deviation {}", fmt_num(dev));
            Ok(if dev <= 1e-10 { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        ExampleSection::Affine { coefficients: [al, be, ga] } => {
            let params = cfg.params()?;
            let grid = cfg.grid()?;
            let sol = AffineSolution::new(*al, *be, *ga);
            let mut csv = String::from("x,y,u,v,w,alpha,status\n");
            for j in 0..grid.ny() {
                for i in 0..grid.nx() {
                    let (x, y) = (grid.x(i), grid.y(j));
                    let (u, v) = affine_uv(&sol, x, y);
                    let w = params.solve_branch(v * v + y * y)?.w;
                    let row = [x, y, u, v, w, *al].map(fmt_num).join(",");
                    csv.push_str(&row);
                    csv.push_str(",ok\n");
                }
            }
            write(out, "affine.csv", &csv)?;
            println!("{} rows", grid.len());
            Ok(EXIT_OK)
        }
        ExampleSection::Hl { b } => {
            let params = cfg.params()?;
            let hl = HlConfig::new(params, *b)?;
            let grid = cfg.grid()?;
            let mut csv = String::from("x,y,u,v,w,alpha,status\n");
            let mut bad = 0usize;
            for j in 0..grid.ny() {
                for i in 0..grid.nx() {
                    let (x, y) = (grid.x(i), grid.y(j));
                    let row = match hl_triple(&hl, x, y) {
                        Ok(t) => {
                            let status = if t.invariants(&hl).hold() {
                                "ok"
                            } else {
                                bad += 1;
                                "invariant_failure"
                            };
                            format!("{},{status}", [t.x, t.y, t.u, t.v, t.w, t.alpha].map(fmt_num).join(","))
                        }
                        Err(e) => {
                            let status = match e {
                                Error::YZero => "y_zero",
                                Error::DegenerateRegion { .. } => "degenerate",
                                Error::NoPositiveRoot => "no_root",
                                other => return Err(other.into()),
                            };
                            format!("{},{},nan,nan,nan,nan,{status}", fmt_num(x), fmt_num(y))
                        }
                    };
                    csv.push_str(&row);
                    csv.push('\n');
                }
            }
            write(out, "hl.csv", &csv)?;
            println!("{} rows, {} failing invariants", grid.len(), bad);
            Ok(if bad == 0 { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
    }
}

pub fn embed(
    config: &Path,
    fields: Option<&Path>,
    out: &Path,
    torus_res: usize,
    projection: Option<&str>,
) -> Result<u8> {
    let cfg = RunConfig::load(config)?;
    let params = cfg.params()?;
    let projection = parse_projection(projection, &params)?;
    let (u, v) = match fields {
        Some(p) => load_uv(p)?,
        None => {
            let grid = cfg.grid()?;
            let phi = cfg.boundary(&grid, &base_dir(config))?;
            let sol = solve_dirichlet(&params, &grid, &phi, &cfg.solver)?;
            (sol.u, sol.v)
        }
    };
    let sampling = sample_fields(&params, &u, &v, torus_res)?;
    write(out, "embedding.csv", &samples_to_csv(&sampling.samples, params.n()))?;
    write(
        out,
        "embedding.vtk",
        &samples_to_vtk("embedded samples", &sampling.samples, &projection),
    )?;
    write(out, "skipped.json", &to_json(&sampling.skipped))?;
    println!(
        "{} points, {} nodes skipped, projection {}",
        sampling.samples.len(),
        sampling.skipped.len(),
        projection.0.map(|c| c.label()).join(",")
    );
    Ok(EXIT_OK)
}

pub fn wind(first: &Path, second: &Path, center: (f64, f64), radius: f64, samples: usize, out: &Path) -> Result<u8> {
    let (u1, v1) = load_uv(first)?;
    let (u2, v2) = load_uv(second)?;
    let trace = difference_trace(&u1, &v1, &u2, &v2, center, radius, samples)?;
    let mut csv = String::from("x,y,f1,f2,angle\n");
    for r in trace_rows(&trace)? {
        csv.push_str(&[r.x, r.y, r.f1, r.f2, r.angle].map(fmt_num).join(","));
        csv.push('\n');
    }
    write(out, "trace.csv", &csv)?;
    let w = winding_number(&trace)?;
    println!("winding number {w}");
    Ok(EXIT_OK)
}
