#![allow(clippy::neg_cmp_op_on_partial_ord)]
use clap::{Parser, Subcommand, ValueEnum};
use hnr_core::barriers::{sweep_contact, DEFAULT_CONTACT_TOL};
use hnr_core::catenoid::{cat_intersection, cat_mesh, Catenoid, CatenoidParams, DEFAULT_SLOPE_CAP};
use hnr_core::hyperbolic::Geodesic;
use hnr_core::io::{self, fmt_sig};
use hnr_core::obstruction::{
    boundary_coordinates, check_asymptotic_theorem, check_slab_projection, check_strict_convexity, default_pole,
};
use hnr_core::quadrature::{QuadratureSpec, DEFAULT_TOL};
use hnr_core::translation::{md_H, md_S, md_mesh, TranslationParams};
use hnr_core::verify::{self, VerifyConfig};
use hnr_core::{Error, Result};
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hnr", version, about = "Minimal hypersurface barriers and obstructions in H^n x R")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Family {
    Catenoid,
    Md,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the height of a barrier family over a parameter range.
    #[command(allow_negative_numbers = true)]
    HeightTable {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: usize,
        /// LO:HI:STEP
        #[arg(long, allow_hyphen_values = true)]
        param_range: String,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Catenoid profile by quadrature inversion and by the ODE, up to 0.9 T.
    #[command(allow_negative_numbers = true)]
    Profile {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Crossing height of two catenoid profiles.
    #[command(allow_negative_numbers = true)]
    Intersect {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        n: usize,
    },
    /// Export a triangulated barrier as OBJ.
    #[command(allow_negative_numbers = true)]
    Mesh {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, required_if_eq("family", "catenoid"))]
        a: Option<f64>,
        #[arg(long, required_if_eq("family", "md"))]
        d: Option<f64>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        res: usize,
        /// Base geodesic "theta1,theta2" of the translation family.
        #[arg(long, default_value = "0,3.141592653589793", allow_hyphen_values = true)]
        geodesic: String,
        /// Distance range beyond the neck of the translation family.
        #[arg(long, default_value_t = 3.0)]
        extent: f64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the sampled asymptotic boundary (translation family).
        #[arg(long)]
        boundary_out: Option<PathBuf>,
    },
    /// Translate one mesh along a geodesic until it touches another.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[arg(long)]
        moving: PathBuf,
        #[arg(long)]
        fixed: PathBuf,
        /// Endpoint angles "theta1,theta2" of a geodesic of H^2.
        #[arg(long, allow_hyphen_values = true)]
        geodesic: String,
        /// LO:HI
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        #[arg(long)]
        step: f64,
        #[arg(long, default_value_t = DEFAULT_CONTACT_TOL)]
        contact_tol: f64,
    },
    /// Check boundary data against the non-existence rules.
    Obstruct {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Run the acceptance checks and print the report as JSON.
    Verify {
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Module(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Module(e)
    }
}

fn default_tol() -> std::result::Result<f64, Failure> {
    match std::env::var("HNR_TOL") {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| *t > 0.0 && t.is_finite())
            .ok_or_else(|| Failure::Usage(format!("HNR_TOL must be a positive number, got {v:?}"))),
        Err(_) => Ok(DEFAULT_TOL),
    }
}

fn parse_list(s: &str, sep: char, count: usize, what: &str) -> std::result::Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = s.split(sep).map(str::trim).collect();
    if parts.len() != count {
        return Err(Failure::Usage(format!("{what} expects {count} values separated by '{sep}', got {s:?}")));
    }
    parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|_| Failure::Usage(format!("{what}: {p:?} is not a number"))))
        .collect()
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn range_grid(lo: f64, hi: f64, step: f64) -> std::result::Result<Vec<f64>, Failure> {
    if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Failure::Usage(format!("invalid range {lo}:{hi}:{step}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| lo + k as f64 * step).collect())
}

fn height_table(family: Family, n: usize, range: &str, tol: f64, out: &Option<PathBuf>) -> std::result::Result<(), Failure> {
    let r = parse_list(range, ':', 3, "--param-range")?;
    let grid = range_grid(r[0], r[1], r[2])?;
    let spec = QuadratureSpec::with_tol(tol)?;
    let (header, rows): (Vec<&str>, Vec<Vec<f64>>) = match family {
        Family::Catenoid => {
            let rows = grid
                .par_iter()
                .map(|&a| {
                    let c = Catenoid::new(CatenoidParams::new(n, a)?, &spec)?;
                    let limit = c.params().height_limit();
                    Ok(vec![a, c.blow_up(), c.height(), limit - c.height()])
                })
                .collect::<Result<_>>()?;
            (vec!["a", "T", "h_R", "gap"], rows)
        }
        Family::Md if n == 2 => {
            let rows = grid
                .par_iter()
                .map(|&d| md_H(d, &spec).map(|h| vec![d, h, h - FRAC_PI_2]))
                .collect::<Result<_>>()?;
            (vec!["d", "H", "H_minus_half_pi"], rows)
        }
        Family::Md => {
            let limit = PI / (n as f64 - 1.0);
            let rows = grid
                .par_iter()
                .map(|&d| md_S(d, n, &spec).map(|s| vec![d, s, 2.0 * s, 2.0 * s - limit]))
                .collect::<Result<_>>()?;
            (vec!["d", "S", "two_S", "excess"], rows)
        }
    };
    emit(out, &io::csv_string(&header, &rows))?;
    Ok(())
}

fn profile(a: f64, n: usize, step: f64, out: &Option<PathBuf>) -> std::result::Result<(), Failure> {
    let spec = QuadratureSpec::with_tol(default_tol()?)?;
    let c = Catenoid::new(CatenoidParams::new(n, a)?, &spec)?;
    let t_end = 0.9 * c.blow_up();
    let quad = c.profile_quadrature(step, t_end)?;
    let ode = c.profile_ode(DEFAULT_SLOPE_CAP, step)?;
    let rows: Vec<Vec<f64>> = quad
        .samples
        .iter()
        .zip(&ode.samples)
        .map(|(q, o)| vec![q.0, q.1, o.1, (q.1 - o.1).abs()])
        .collect();
    emit(out, &io::csv_string(&["t", "f_quadrature", "f_ode", "abs_diff"], &rows))?;
    Ok(())
}

fn intersect(a: f64, b: f64, n: usize) -> std::result::Result<(), Failure> {
    let spec = QuadratureSpec::with_tol(default_tol()?)?;
    let t = cat_intersection(a, b, n, &spec)?;
    let f = Catenoid::new(CatenoidParams::new(n, a)?, &spec)?.f(t)?;
    println!("t_star = {}", fmt_sig(t));
    println!("f(a, t_star) = {}", fmt_sig(f));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn mesh(
    family: Family,
    a: Option<f64>,
    d: Option<f64>,
    n: usize,
    res: usize,
    geodesic: &str,
    extent: f64,
    out: &PathBuf,
    boundary_out: &Option<PathBuf>,
) -> std::result::Result<(), Failure> {
    let tol = default_tol()?;
    let spec = QuadratureSpec::with_tol(tol)?;
    match family {
        Family::Catenoid => {
            let a = a.ok_or_else(|| Failure::Usage("--a is required for the catenoid family".into()))?;
            if boundary_out.is_some() {
                return Err(Failure::Usage("--boundary-out applies to the md family only".into()));
            }
            let m = cat_mesh(CatenoidParams::new(n, a)?, res, res.max(8), &spec)?;
            let header = vec![
                "family catenoid".to_string(),
                format!("a {a} n {n} res {res} t_max 0.9T"),
                format!("quadrature tol {tol:e}"),
            ];
            io::write_obj(out, &m, &header)?;
        }
        Family::Md => {
            let d = d.ok_or_else(|| Failure::Usage("--d is required for the md family".into()))?;
            let th = parse_list(geodesic, ',', 2, "--geodesic")?;
            let g = Geodesic::from_angles(th[0], th[1])?;
            let (m, boundary) = md_mesh(&TranslationParams::new(n, d, g)?, extent, res, &spec)?;
            let header = vec![
                "family md".to_string(),
                format!("d {d} n {n} res {res} extent {extent} geodesic {geodesic}"),
                format!("quadrature tol {tol:e}"),
            ];
            io::write_obj(out, &m, &header)?;
            if let Some(p) = boundary_out {
                std::fs::write(p, io::boundary_json_string(&boundary)).map_err(Error::from)?;
            }
        }
    }
    Ok(())
}

fn sweep(moving: &PathBuf, fixed: &PathBuf, geodesic: &str, range: &str, step: f64, tol: f64) -> std::result::Result<(), Failure> {
    let th = parse_list(geodesic, ',', 2, "--geodesic")?;
    let r = parse_list(range, ':', 2, "--range")?;
    let g = Geodesic::from_angles(th[0], th[1])?;
    let moving = io::read_obj(moving)?;
    let fixed = io::read_obj(fixed)?;
    let res = sweep_contact(&moving, &fixed, &g, (r[0], r[1]), step, tol)?;
    println!("{}", serde_json::to_string_pretty(&res).map_err(|e| Error::Io(e.to_string()))?);
    Ok(())
}

fn obstruct(input: &PathBuf, n: usize) -> std::result::Result<(), Failure> {
    let file = io::read_boundary_json(input)?;
    if file.n != n {
        return Err(Error::Domain(format!("file declares n = {} but --n {n}", file.n)).into());
    }
    let curve = &file.curve;
    let mut verdicts = Vec::new();
    if curve.closed() {
        verdicts.push(("slab_and_projection", check_slab_projection(curve, n)?));
    }
    if curve.closed() || curve.boundary_flags().iter().any(|&b| b) {
        verdicts.push(("asymptotic_theorem", check_asymptotic_theorem(curve, n)?));
    }
    if curve.closed() {
        let coords = boundary_coordinates(curve, &default_pole(curve))?;
        verdicts.push(("strict_convexity", check_strict_convexity(&coords, n)?));
    }
    for (name, v) in &verdicts {
        println!("[{name}]");
        println!("{v}");
        println!();
    }
    let decided = verdicts.iter().find(|(_, v)| v.is_obstructed());
    match decided {
        Some((name, _)) => println!("overall: obstructed ({name})"),
        None => println!("overall: no_obstruction_detected"),
    }
    Ok(())
}

fn verify_cmd(quick: bool, out: &Option<PathBuf>) -> std::result::Result<bool, Failure> {
    let cfg = VerifyConfig {
        tol: default_tol()?,
        quick,
        ..VerifyConfig::default()
    };
    let report = verify::run(&cfg);
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    emit(out, &(text + "\n"))?;
    for e in report.entries.iter().filter(|e| !e.pass) {
        eprintln!("FAIL [{}] {}: expected {}, observed {} {}", e.criterion, e.name, e.expected, e.observed, e.details);
    }
    eprintln!("{}/{} checks passed", report.summary.passed, report.summary.total);
    Ok(report.all_pass())
}

fn dispatch(cli: Cli) -> std::result::Result<bool, Failure> {
    match cli.command {
        Command::HeightTable {
            family,
            n,
            param_range,
            tol,
            out,
        } => {
            let tol = match tol {
                Some(t) => t,
                None => default_tol()?,
            };
            height_table(family, n, &param_range, tol, &out)?;
        }
        Command::Profile { a, n, step, out } => profile(a, n, step, &out)?,
        Command::Intersect { a, b, n } => intersect(a, b, n)?,
        Command::Mesh {
            family,
            a,
            d,
            n,
            res,
            geodesic,
            extent,
            out,
            boundary_out,
        } => mesh(family, a, d, n, res, &geodesic, extent, &out, &boundary_out)?,
        Command::Sweep {
            moving,
            fixed,
            geodesic,
            range,
            step,
            contact_tol,
        } => sweep(&moving, &fixed, &geodesic, &range, step, contact_tol)?,
        Command::Obstruct { input, n } => obstruct(&input, n)?,
        Command::Verify { quick, out } => return verify_cmd(quick, &out),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Module(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
