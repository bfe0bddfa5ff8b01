use std::fs;
use std::path::{Path, PathBuf};

use isoprofile::ball_placement::{fubini_average_check, find_witness, ScenarioConfig, WitnessOptions};
use isoprofile::exhaustion::{build_sqrt_exhaustion, verify_strict_convexity, ConvexityOptions};
use isoprofile::monotone_limits::{
    default_probe_scale, default_probes, left_continuity_check, pointwise_limit, remark_demo,
    right_continuity_check, MonotoneFamily,
};
use isoprofile::output::{fmt_num, json_document, profile_csv, table_csv};
use isoprofile::profile::{disk_profile_curve, inf_over_r_curve, linear_grid, sublevel_sweep};
use isoprofile::suite::{run_suite, SuiteConfig, CRITERIA};
use isoprofile::warped_surface::SurfaceConfig;
use isoprofile::{Catalog, Error, Result, SpaceForm, WarpedSurface};
use serde_json::json;

use crate::{
    Command, Demo, ExhaustionArgs, Format, LimitsArgs, OutputArgs, PlacementArgs, ProfileArgs, ProfileKindArg,
    SpaceformArgs, SurfaceArgs, SurfaceSelect, VerifyArgs, OUT_DIR_ENV,
};

pub enum Status {
    Ok,
    VerificationFailed,
}

impl Status {
    fn from_pass(pass: bool) -> Self {
        if pass { Status::Ok } else { Status::VerificationFailed }
    }
}

pub fn run(cmd: Command) -> Result<Status> {
    match cmd {
        Command::Spaceform(a) => spaceform(a),
        Command::Surface(a) => surface(a),
        Command::Exhaustion(a) => exhaustion(a),
        Command::Placement(a) => placement(a),
        Command::Profile(a) => profile(a),
        Command::Limits(a) => limits(a),
        Command::VerifyAll(a) => verify_all(a),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn format_of(out: &OutputArgs, default: Format) -> Format {
    out.format.unwrap_or_else(|| {
        match out.out.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            _ => default,
        }
    })
}

fn emit(out: &OutputArgs, text: &str) -> Result<()> {
    match &out.out {
        Some(p) => {
            let p = resolve(p);
            fs::write(&p, text).map_err(|e| Error::invalid(format!("cannot write {}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_only(out: &OutputArgs) -> Result<()> {
    match format_of(out, Format::Json) {
        Format::Json => Ok(()),
        Format::Csv => Err(Error::invalid("this command writes JSON reports only")),
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("--{name} must be positive, got {x}")))
    }
}

fn count(name: &str, n: usize, min: usize) -> Result<()> {
    if n >= min {
        Ok(())
    } else {
        Err(Error::invalid(format!("--{name} must be at least {min}, got {n}")))
    }
}

fn build_surface(sel: &SurfaceSelect) -> Result<WarpedSurface> {
    let w = match (&sel.surface, &sel.surface_config) {
        (Some(name), None) => WarpedSurface::catalog(Catalog::parse(name)?)?,
        (None, Some(path)) => SurfaceConfig::from_json(&read(path)?)?.build()?,
        _ => return Err(Error::invalid("give exactly one of --surface or --surface-config")),
    };
    match sel.t_num {
        Some(t) => w.with_t_num(t),
        None => Ok(w),
    }
}

fn surface_meta(w: &WarpedSurface) -> Result<serde_json::Value> {
    serde_json::to_value(w.to_config()).map_err(|e| Error::numerical(e.to_string()))
}

fn spaceform(a: SpaceformArgs) -> Result<Status> {
    count("points", a.points, 2)?;
    let sf = SpaceForm::new(a.delta, a.dim)?;
    let r_max = match a.rmax {
        Some(r) => {
            positive("rmax", r)?;
            r
        }
        None if a.delta > 0.0 => 0.99 * sf.max_radius(),
        None => 3.0,
    };
    let mut rows = Vec::with_capacity(a.points);
    for k in 1..=a.points {
        let r = r_max * k as f64 / a.points as f64;
        let v = sf.ball_volume(r)?;
        rows.push(vec![r, v, sf.ball_area(r)?, sf.profile(v)?]);
    }
    let columns = ["r", "V", "A", "I"];
    let text = match format_of(&a.output, Format::Csv) {
        Format::Csv => table_csv(
            &[("delta", fmt_num(a.delta)), ("dim", a.dim.to_string())],
            &columns,
            &rows,
        ),
        Format::Json => {
            let table: Vec<_> = rows.iter().map(|r| json!({ "r": r[0], "V": r[1], "A": r[2], "I": r[3] })).collect();
            json_document("spaceform", &[("delta", json!(a.delta)), ("dim", json!(a.dim))], &table)?
        }
    };
    emit(&a.output, &text)?;
    Ok(Status::Ok)
}

fn surface(a: SurfaceArgs) -> Result<Status> {
    count("points", a.points, 2)?;
    let w = build_surface(&a.select)?;
    let t_max = match a.tmax {
        Some(t) => {
            positive("tmax", t)?;
            t
        }
        None => w.t_num().min(5.0),
    };
    let mut rows = Vec::with_capacity(a.points);
    for k in 1..=a.points {
        let t = t_max * k as f64 / a.points as f64;
        rows.push(vec![
            t,
            w.phi(t),
            w.dphi(t),
            w.gauss_curvature(t)?,
            w.pole_ball_volume(t)?,
            w.pole_ball_area(t)?,
        ]);
    }
    let columns = ["t", "phi", "dphi", "K", "V", "A"];
    let text = match format_of(&a.output, Format::Csv) {
        Format::Csv => table_csv(&[("surface", w.name().to_string())], &columns, &rows),
        Format::Json => {
            let table: Vec<_> = rows
                .iter()
                .map(|r| json!({ "t": r[0], "phi": r[1], "dphi": r[2], "K": r[3], "V": r[4], "A": r[5] }))
                .collect();
            json_document("surface", &[("surface", surface_meta(&w)?)], &table)?
        }
    };
    emit(&a.output, &text)?;
    Ok(Status::Ok)
}

fn exhaustion(a: ExhaustionArgs) -> Result<Status> {
    json_only(&a.output)?;
    count("geodesics", a.geodesics, 1)?;
    positive("tol", a.tol)?;
    positive("step", a.step)?;
    let w = build_surface(&a.select)?;
    let spec = build_sqrt_exhaustion(&w)?;
    let opts = ConvexityOptions {
        geodesics: a.geodesics,
        seed: a.seed,
        tol: a.tol,
        step: a.step,
        ..ConvexityOptions::default()
    };
    let report = verify_strict_convexity(&spec, &opts)?;
    let text = json_document(
        "exhaustion",
        &[("surface", surface_meta(&w)?), ("seed", json!(a.seed))],
        &report,
    )?;
    emit(&a.output, &text)?;
    Ok(Status::from_pass(report.pass))
}

fn placement(a: PlacementArgs) -> Result<Status> {
    json_only(&a.output)?;
    count("samples", a.samples, 20)?;
    count("grid", a.grid, 2)?;
    positive("r", a.r)?;
    let sc = ScenarioConfig::from_json(&read(&a.config)?)?.build()?;
    let opts = WitnessOptions {
        grid_density: a.grid,
        mc_samples: a.samples,
        seed: a.seed,
        ..WitnessOptions::default()
    };
    let witness = find_witness(&sc, a.r, &opts)?;
    let fubini = fubini_average_check(&sc, a.r, a.grid, a.samples, a.seed)?;
    let pass = witness.pass && fubini.pass;
    let result = json!({
        "x_t": witness.x_t,
        "x_theta": witness.x_theta,
        "measured": witness.measured,
        "sigma": witness.sigma,
        "lambda": witness.lambda,
        "pass": pass,
        "grid_points": witness.grid_points,
        "fubini": fubini,
    });
    let text = json_document(
        "placement",
        &[
            ("scenario", serde_json::to_value(sc.to_config()).map_err(|e| Error::numerical(e.to_string()))?),
            ("r", json!(a.r)),
            ("samples", json!(a.samples)),
            ("seed", json!(a.seed)),
        ],
        &result,
    )?;
    emit(&a.output, &text)?;
    Ok(Status::from_pass(pass))
}

fn profile(a: ProfileArgs) -> Result<Status> {
    count("points", a.points, 2)?;
    positive("vmin", a.vmin)?;
    let w = build_surface(&a.select)?;
    let grid = linear_grid(a.vmin, a.vmax, a.points)?;
    let (curve, extra) = match a.kind {
        ProfileKindArg::Disk => (disk_profile_curve(&w, &grid)?, vec![]),
        ProfileKindArg::Sublevel => {
            let rho = a.rho.ok_or_else(|| Error::invalid("--kind sublevel needs --rho"))?;
            (sublevel_sweep(&w, rho, &grid)?, vec![("rho", fmt_num(rho))])
        }
        ProfileKindArg::Inf => {
            count("levels", a.levels, 2)?;
            let spec = build_sqrt_exhaustion(&w)?;
            (inf_over_r_curve(&spec, &grid, a.levels)?, vec![("levels", a.levels.to_string())])
        }
    };
    if curve.partial {
        eprintln!("isoprofile: warning: some boundary bite searches failed; values are upper bounds from the remaining candidates");
    }
    let text = match format_of(&a.output, Format::Csv) {
        Format::Csv => profile_csv(&curve, &extra),
        Format::Json => {
            let meta: Vec<(&str, serde_json::Value)> = extra.iter().map(|(k, v)| (*k, json!(v))).collect();
            json_document("profile", &meta, &curve)?
        }
    };
    emit(&a.output, &text)?;
    Ok(Status::Ok)
}

fn read_matrix(path: &Path) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let text = read(path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
        let row = rec
            .iter()
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| Error::invalid(format!("{}: line {}: not a number: {c:?}", path.display(), i + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(Error::invalid("matrix needs an x row and at least one family row"));
    }
    let x = rows.remove(0);
    Ok((x, rows))
}

fn limits(a: LimitsArgs) -> Result<Status> {
    json_only(&a.output)?;
    positive("tail-tol", a.tail_tol)?;
    let (text, status) = match (a.demo, &a.matrix) {
        (Some(Demo::Remark), None) => {
            let demo = remark_demo(1000)?;
            (json_document("limits", &[("demo", json!("remark"))], &demo)?, Status::Ok)
        }
        (None, Some(path)) => {
            let (x, rows) = read_matrix(path)?;
            let fam = MonotoneFamily::new(x, rows)?;
            let lim = pointwise_limit(&fam, a.tail_tol);
            let mut pass = lim.monotone;
            let mut checks = serde_json::Value::Null;
            if let Some(x0) = a.x0 {
                let h0 = a.h0.unwrap_or_else(|| default_probe_scale(x0));
                positive("h0", h0)?;
                let probes = default_probes(h0);
                let g = |x: f64| lim.limit.eval(x);
                let right = right_continuity_check(g, x0, &probes, None)?;
                let left = left_continuity_check(g, x0, &probes, None)?;
                pass &= right.pass;
                checks = json!({ "right": right, "left": left });
            }
            let result = json!({ "limit": lim, "continuity": checks, "pass": pass });
            (
                json_document("limits", &[("rows", json!(fam.rows().len()))], &result)?,
                Status::from_pass(pass),
            )
        }
        _ => return Err(Error::invalid("give exactly one of --demo or --matrix")),
    };
    emit(&a.output, &text)?;
    Ok(status)
}

fn verify_all(a: VerifyArgs) -> Result<Status> {
    count("samples", a.samples, 20)?;
    count("geodesics", a.geodesics, 1)?;
    let ids: Vec<u32> = match a.only {
        Some(ids) => {
            if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > CRITERIA) {
                return Err(Error::invalid(format!("no criterion {bad}; criteria are 1..={CRITERIA}")));
            }
            ids
        }
        None => (1..=CRITERIA).collect(),
    };
    let cfg = SuiteConfig {
        seed: a.seed,
        mc_samples: a.samples,
        geodesics: a.geodesics,
    };
    let report = run_suite(&cfg, &ids);
    for c in &report.criteria {
        eprintln!("{}", c.line());
    }
    let text = match format_of(&a.output, Format::Json) {
        Format::Json => json_document("verify-all", &[("seed", json!(a.seed))], &report)?,
        Format::Csv => table_csv(
            &[("seed", a.seed.to_string())],
            &["criterion", "pass"],
            &report
                .criteria
                .iter()
                .map(|c| vec![c.id as f64, if c.pass { 1.0 } else { 0.0 }])
                .collect::<Vec<_>>(),
        ),
    };
    emit(&a.output, &text)?;
    Ok(Status::from_pass(report.pass))
}
