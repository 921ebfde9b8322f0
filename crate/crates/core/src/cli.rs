//! Command-line front door: parse inputs, dispatch to one pipeline, emit a
//! single deterministic report.
//!
//! Exit codes: 0 success, 2 certified negative (a criterion evaluated to
//! false, or an integral certified divergent), 1 error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::body::ConvexBodyJson;
use crate::chebyshev::{
    azukawa_n, chebyshev_body, domain_chebyshev, ReinhardtDomain,
};
use crate::error::{Error, Result};
use crate::filtration::{
    cvec, extension_verify, jumping_spectrum, quotient_trace, GramFamily, GramFamilyJson,
};
use crate::grid::Grid1D;
use crate::okounkov::{
    accumulate_body, criterion_e, interior_certificate, jet_certificate, volume_identity_check,
    BodySource, OkounkovBody, SuccessiveMinima, ValuationSample,
};
use crate::report;
use crate::rwn::{
    check_transform, hat_transform, roundtrip_defect, SubgeodesicRayJson, TestCurveJson,
};
use crate::toric::{
    bergman_fixed_point_check, toric_integral_grid, toric_integral_model, RadialTestCurve,
    ToricModelJson,
};
use crate::valuations::WeightMatrix;

/// Parsed command specification.
#[derive(Debug, Parser)]
#[command(name = "okrwn", version, about = "Convex duality toolkit: test curves and rays, \
valuation bodies, toric kernels, rotation-invariant domains, norm filtrations")]
pub struct CommandSpec {
    /// JSON config file; explicit flags win over its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Report path ('-' for stdout).
    #[arg(short, long, global = true, default_value = "-")]
    pub output: String,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Default, Deserialize)]
pub struct Overrides {
    /// Grid as lo:hi:count.
    #[arg(long)]
    pub grid: Option<String>,
    /// Interior margin for certificates.
    #[arg(long)]
    pub margin: Option<f64>,
    /// Generic numeric tolerance override.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partial Legendre transform of a curve (hat) or a ray (check).
    Transform {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// check(hat(curve)) against the curve itself.
    Roundtrip {
        #[arg(short, long)]
        input: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Convex hull of rescaled valuation samples.
    Body {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k_max: u32,
        /// Optional top self-intersection number for the volume identity.
        #[arg(long)]
        top_intersection: Option<f64>,
    },
    /// Interior-point certificate for a body.
    Certify {
        #[arg(short, long)]
        input: PathBuf,
        /// Comma-separated coordinates.
        #[arg(long)]
        point: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Jet certificate on a body, or the reciprocal-sum criterion on minima.
    Jets {
        #[arg(short, long)]
        input: Option<PathBuf>,
        /// Comma-separated successive minima (criterion route).
        #[arg(long)]
        minima: Option<String>,
        #[arg(long, default_value_t = 0)]
        order: u32,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Chebyshev transform and body of a rotation-invariant domain.
    Chebyshev {
        /// Domain JSON.
        #[arg(short, long)]
        input: PathBuf,
        /// Weight matrix rows like "1,1;1,0".
        #[arg(long)]
        weight: Option<String>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Azukawa indicator value at a point.
    Azukawa {
        #[arg(short, long)]
        input: PathBuf,
        /// Comma-separated coordinate moduli.
        #[arg(long)]
        xi: String,
        #[arg(long)]
        weight: Option<String>,
    },
    /// Kernel fixed-point identity on a toric model.
    Bergman {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Toric integral of a model (or tabulated weight) with a shift.
    Integral {
        #[arg(short, long)]
        input: PathBuf,
        /// Comma-separated shift vector.
        #[arg(long)]
        shift: String,
        /// Treat the input as a tabulated weight instead of a model.
        #[arg(long, default_value_t = false)]
        grid_input: bool,
    },
    /// Norm-family asymptotics.
    Filtration {
        #[command(subcommand)]
        action: FiltrationAction,
    },
    /// End-to-end extension-estimate demo on the line model.
    DemoFmt {
        #[arg(long, default_value_t = 4)]
        degree: u32,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Comma-separated alpha values.
        #[arg(long, default_value = "0.25,0.5,0.75")]
        alphas: String,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Direction {
    Hat,
    Check,
}

#[derive(Debug, Subcommand)]
pub enum FiltrationAction {
    /// Jumping numbers and multiplicities.
    Spectrum {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Quotient-norm trace over sample times.
    Trace {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        alpha: f64,
        /// Comma-separated coefficients of F.
        #[arg(long)]
        section: String,
        /// Sample times as lo:hi:count.
        #[arg(long, default_value = "0:20:41")]
        t_samples: String,
    },
    /// Extension estimate: minimal class norm against the asymptotic bound.
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        section: String,
    },
}

/// Optional config file entries, merged under explicit flags.
#[derive(Debug, Default, Deserialize)]
struct ConfigFile {
    grid: Option<String>,
    margin: Option<f64>,
    tol: Option<f64>,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

/// Parses argv and dispatches; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let spec = match CommandSpec::try_parse_from(args) {
        Ok(s) => s,
        Err(e) => {
            // clap handles --help/--version through this path
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match dispatch(spec) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    if !path.exists() {
        return Err(Error::Io(format!("input file {} does not exist", path.display())));
    }
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_grid(text: &str) -> Result<Grid1D> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Io(format!("grid must be lo:hi:count, got {text:?}")));
    }
    let lo: f64 = parts[0].parse().map_err(|_| Error::Io("bad grid lo".into()))?;
    let hi: f64 = parts[1].parse().map_err(|_| Error::Io("bad grid hi".into()))?;
    let count: usize = parts[2].parse().map_err(|_| Error::Io("bad grid count".into()))?;
    Grid1D::new(lo, hi, count)
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Io(format!("bad number {s:?}")))
        })
        .collect()
}

fn parse_weight(text: &str) -> Result<WeightMatrix> {
    let rows: Vec<Vec<u64>> = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::Io(format!("bad weight entry {s:?}")))
                })
                .collect::<Result<Vec<u64>>>()
        })
        .collect::<Result<_>>()?;
    WeightMatrix::new(rows)
}

fn unweighted(n: usize) -> WeightMatrix {
    // total degree first, then leading coordinates: infinitesimal
    WeightMatrix::straightened_up(n.max(1))
}

fn merge_overrides(mut o: Overrides, config: &Option<PathBuf>) -> Result<Overrides> {
    if let Some(path) = config {
        let file: ConfigFile = read_json(path)?;
        o.grid = o.grid.or(file.grid);
        o.margin = o.margin.or(file.margin);
        o.tol = o.tol.or(file.tol);
    }
    Ok(o)
}

fn emit_json<T: Serialize>(output: &str, value: &T) -> Result<()> {
    report::emit(output, &report::to_json(value)?)
}

/// Runs exactly one pipeline and writes a single report.
pub fn dispatch(spec: CommandSpec) -> Result<i32> {
    let CommandSpec { config, output, format, command } = spec;
    match command {
        Command::Transform { input, direction, overrides } => {
            let o = merge_overrides(overrides, &config)?;
            match direction {
                Direction::Hat => {
                    let curve: TestCurveJson = read_json(&input)?;
                    let curve = curve.lift()?;
                    let t_grid = match &o.grid {
                        Some(g) => parse_grid(g)?,
                        None => Grid1D::new(1e-3, 30.0, 401)?,
                    };
                    let ray = hat_transform(&curve, t_grid)?;
                    emit_json(&output, &SubgeodesicRayJson::from(&ray))?;
                }
                Direction::Check => {
                    let ray: SubgeodesicRayJson = read_json(&input)?;
                    let ray = ray.lift()?;
                    let alpha_grid = match &o.grid {
                        Some(g) => parse_grid(g)?,
                        None => Grid1D::new(-1.0, 2.5, 351)?,
                    };
                    let curve = check_transform(&ray, alpha_grid)?;
                    emit_json(&output, &TestCurveJson::from(&curve))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Roundtrip { input, overrides } => {
            let o = merge_overrides(overrides, &config)?;
            let curve: TestCurveJson = read_json(&input)?;
            let curve = curve.lift()?;
            let t_grid = match &o.grid {
                Some(g) => parse_grid(g)?,
                None => Grid1D::new(1e-3, 30.0, 401)?,
            };
            let defect = roundtrip_defect(&curve, t_grid)?;
            let lambda = curve.critical_value();
            emit_json(
                &output,
                &json!({
                    "defect": defect,
                    "critical_value": lambda.value.to_f64(),
                    "critical_value_uncertainty": lambda.uncertainty,
                }),
            )?;
            Ok(EXIT_OK)
        }
        Command::Body { input, k_max, top_intersection } => {
            let samples: Vec<ValuationSample> = read_json(&input)?;
            let body = accumulate_body(&samples, k_max, BodySource::Unspecified)?;
            match format {
                Format::Csv => {
                    report::emit(&output, &report::body_vertices_csv(&body.body)?)?;
                }
                Format::Json => {
                    let volume = match top_intersection {
                        Some(t) => Some(volume_identity_check(&body, t)?),
                        None => None,
                    };
                    emit_json(
                        &output,
                        &json!({
                            "body": ConvexBodyJson::from(&body.body),
                            "k_max": body.k_max,
                            "degenerate": body.degenerate,
                            "volume_identity": volume,
                        }),
                    )?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Certify { input, point, overrides } => {
            let o = merge_overrides(overrides, &config)?;
            let raw: ConvexBodyJson = read_json(&input)?;
            let body = OkounkovBody {
                body: raw.lift()?,
                k_max: 0,
                source: BodySource::Unspecified,
                degenerate: false,
            };
            let p = parse_f64_list(&point)?;
            let margin = o.margin.unwrap_or_else(|| crate::okounkov::default_margin(&body));
            let interior = interior_certificate(&body, &p, margin)?;
            emit_json(&output, &json!({ "interior": interior, "margin": margin }))?;
            Ok(if interior { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Jets { input, minima, order, overrides } => {
            let o = merge_overrides(overrides, &config)?;
            match (input, minima) {
                (Some(path), None) => {
                    let raw: ConvexBodyJson = read_json(&path)?;
                    let body = OkounkovBody {
                        body: raw.lift()?,
                        k_max: 0,
                        source: BodySource::Unspecified,
                        degenerate: false,
                    };
                    let margin = o.margin.unwrap_or_else(|| crate::okounkov::default_margin(&body));
                    let ok = jet_certificate(&body, order, margin)?;
                    emit_json(&output, &json!({ "jets_generated": ok, "order": order }))?;
                    Ok(if ok { EXIT_OK } else { EXIT_NEGATIVE })
                }
                (None, Some(text)) => {
                    let eps = parse_f64_list(&text)?;
                    let minima = SuccessiveMinima::new(eps)?;
                    let outcome = criterion_e(&minima, order)?;
                    emit_json(
                        &output,
                        &json!({
                            "criterion": outcome.holds,
                            "reciprocal_sum": outcome.reciprocal_sum,
                            "simplex": ConvexBodyJson::from(&outcome.simplex),
                        }),
                    )?;
                    Ok(if outcome.holds { EXIT_OK } else { EXIT_NEGATIVE })
                }
                _ => Err(Error::Precondition(
                    "pass exactly one of --input (body) or --minima".into(),
                )),
            }
        }
        Command::Chebyshev { input, weight, overrides } => {
            let o = merge_overrides(overrides, &config)?;
            let domain: ReinhardtDomain = read_json(&input)?;
            domain.validate()?;
            let beta = match &weight {
                Some(w) => parse_weight(w)?,
                None => unweighted(domain.dimension()),
            };
            let body = chebyshev_body(&domain, &beta)?;
            if format == Format::Csv {
                // transform values over a default orthant grid
                let g = match &o.grid {
                    Some(g) => parse_grid(g)?,
                    None => Grid1D::new(0.0, 4.0, 41)?,
                };
                let v = domain_chebyshev(&domain, vec![g; domain.dimension()])?;
                let mut csv = String::from("alpha,value\n");
                for (_, coords, val) in v.iter_nodes() {
                    let cells: Vec<String> =
                        coords.iter().map(|&x| report::format_float(x)).collect();
                    csv.push_str(&format!("{},{}\n", cells.join(";"), val));
                }
                report::emit(&output, &csv)?;
            } else {
                emit_json(&output, &body)?;
            }
            Ok(EXIT_OK)
        }
        Command::Azukawa { input, xi, weight } => {
            let domain: ReinhardtDomain = read_json(&input)?;
            domain.validate()?;
            let beta = match &weight {
                Some(w) => parse_weight(w)?,
                None => unweighted(domain.dimension()),
            };
            let point = parse_f64_list(&xi)?;
            let value = azukawa_n(&domain, &beta, &point)?;
            emit_json(&output, &json!({ "value": value, "inside_body": value < 0.0 }))?;
            Ok(EXIT_OK)
        }
        Command::Bergman { input } => {
            let model: ToricModelJson = read_json(&input)?;
            let model = model.build()?;
            let report = bergman_fixed_point_check(&model)?;
            emit_json(&output, &report)?;
            Ok(EXIT_OK)
        }
        Command::Integral { input, shift, grid_input } => {
            let s = parse_f64_list(&shift)?;
            let result = if grid_input {
                let grid: crate::grid::GridFunctionND = read_json(&input)?;
                toric_integral_grid(&grid, &s)
            } else {
                let model: ToricModelJson = read_json(&input)?;
                toric_integral_model(&model.build()?, &s)
            };
            match result {
                Ok(rep) => {
                    emit_json(&output, &rep)?;
                    Ok(EXIT_OK)
                }
                Err(Error::Divergent(reason)) => {
                    emit_json(&output, &json!({ "divergent": true, "reason": reason }))?;
                    Ok(EXIT_NEGATIVE)
                }
                Err(e) => Err(e),
            }
        }
        Command::Filtration { action } => dispatch_filtration(action, &output, format),
        Command::DemoFmt { degree, lambda, alphas } => {
            demo_fmt(&output, degree, lambda, &parse_f64_list(&alphas)?)
        }
    }
}

fn dispatch_filtration(action: FiltrationAction, output: &str, format: Format) -> Result<i32> {
    match action {
        FiltrationAction::Spectrum { input } => {
            let fam: GramFamilyJson = read_json(&input)?;
            let fam = fam.lift()?;
            let spec = jumping_spectrum(&fam, crate::filtration::DEFAULT_HORIZON)?;
            emit_json(output, &json!({ "jumps": spec.jumps }))?;
            Ok(EXIT_OK)
        }
        FiltrationAction::Trace { input, alpha, section, t_samples } => {
            let fam: GramFamilyJson = read_json(&input)?;
            let fam = fam.lift()?;
            let f = cvec(&parse_f64_list(&section)?);
            let grid = parse_grid(&t_samples)?;
            let ts: Vec<f64> = grid.nodes().collect();
            let spec = jumping_spectrum(&fam, crate::filtration::DEFAULT_HORIZON)?;
            let trace = quotient_trace(&fam, &spec, &f, alpha, &ts)?;
            match format {
                Format::Csv => report::emit(output, &report::trace_csv(&trace)?)?,
                Format::Json => emit_json(output, &trace)?,
            }
            Ok(EXIT_OK)
        }
        FiltrationAction::Verify { input, alpha, section } => {
            let fam: GramFamilyJson = read_json(&input)?;
            let fam = fam.lift()?;
            let f = cvec(&parse_f64_list(&section)?);
            let spec = jumping_spectrum(&fam, crate::filtration::DEFAULT_HORIZON)?;
            let report = extension_verify(&fam, &spec, &f, alpha, crate::filtration::DEFAULT_HORIZON)?;
            emit_json(output, &report)?;
            Ok(if report.slack >= -1e-8 { EXIT_OK } else { EXIT_NEGATIVE })
        }
    }
}

/// The end-to-end extension check on the degree-`d` line model with the
/// linear radial curve: the minimal class norm never exceeds the
/// asymptotic bound, and the flat probe at the first jump is tight.
fn demo_fmt(output: &str, degree: u32, lambda: f64, alphas: &[f64]) -> Result<i32> {
    use crate::filtration::{diagonal_spectrum, DiagonalFamily};
    use crate::toric::ToricModel;

    let model = ToricModel::p1_fubini_study(degree)?;
    let t_probe: Vec<f64> = vec![1.0, 30.0, 60.0];
    let fam = crate::toric::radial_gram_family(
        &model,
        RadialTestCurve::LinearGreen { lambda },
        &t_probe,
    )?;
    let spectrum = jumping_spectrum(&fam, 30.0)?;
    let n = fam.dimension();
    let mut lines = Vec::new();
    let mut all_ok = true;
    for &alpha in alphas {
        for j in 0..n {
            let mut coeff = vec![0.0; n];
            coeff[j] = 1.0;
            let rep = extension_verify(&fam, &spectrum, &cvec(&coeff), alpha, 60.0)?;
            let ok = rep.slack >= -1e-8;
            all_ok &= ok;
            lines.push(json!({
                "check": "extension",
                "alpha": alpha,
                "section": j,
                "lhs": rep.lhs,
                "rhs": rep.rhs,
                "slack": rep.slack,
                "pass": ok,
            }));
        }
    }
    // sharpness probe: flat family, alpha at the first jump
    let flat = GramFamily::Diagonal(DiagonalFamily::rotated_2d(0.3, [1.0, 2.5]));
    let fspec = diagonal_spectrum(flat.as_diagonal()?);
    let b = flat.as_diagonal()?.basis().clone();
    let probe = crate::filtration::CVec::from_fn(2, |i, _| b[(i, 0)] + b[(i, 1)]);
    let rep = extension_verify(&flat, &fspec, &probe, fspec.jumps[0].alpha, 60.0)?;
    let tight = rep.slack.abs() < 1e-6;
    all_ok &= tight;
    lines.push(json!({
        "check": "flat_sharpness",
        "alpha": fspec.jumps[0].alpha,
        "slack": rep.slack,
        "pass": tight,
    }));
    emit_json(output, &json!({ "degree": degree, "lambda": lambda, "checks": lines }))?;
    Ok(if all_ok { EXIT_OK } else { EXIT_NEGATIVE })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(name: &str, content: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("okrwn-cli-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        std::fs::write(&path, content).unwrap();
        path
    }

    fn run_args(args: &[&str]) -> i32 {
        run(std::iter::once("okrwn").chain(args.iter().copied()))
    }

    #[test]
    fn certify_exit_codes_follow_the_certificate() {
        // degree-3 simplex body: (1,1) interior, (2,2) not
        let samples: Vec<ValuationSample> = {
            let mut out = Vec::new();
            for i in 0..=3u32 {
                for j in 0..=(3 - i) {
                    out.push(
                        ValuationSample::new(1, crate::valuations::Exponent(vec![i, j])).unwrap(),
                    );
                }
            }
            out
        };
        let body = accumulate_body(&samples, 1, BodySource::Unspecified).unwrap();
        let body_json = report::to_json(&ConvexBodyJson::from(&body.body)).unwrap();
        let path = write_tmp("p2o3.json", &body_json);
        let out = std::env::temp_dir().join("okrwn-cli-tests/cert.json");
        let code = run_args(&[
            "certify",
            "-i",
            path.to_str().unwrap(),
            "--point",
            "1,1",
            "--margin",
            "0.1",
            "-o",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(report["interior"], serde_json::Value::Bool(true));
        let code = run_args(&[
            "certify",
            "-i",
            path.to_str().unwrap(),
            "--point",
            "2,2",
            "--margin",
            "0.1",
            "-o",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_NEGATIVE);
    }

    #[test]
    fn integral_divergence_is_a_certified_negative() {
        let model = serde_json::json!({"phi": "fubini_study", "params": {"n": 2, "d": 2}});
        let path = write_tmp("p2o2.json", &model.to_string());
        let out = std::env::temp_dir().join("okrwn-cli-tests/int.json");
        let code = run_args(&[
            "integral",
            "-i",
            path.to_str().unwrap(),
            "--shift",
            "1,1",
            "-o",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_NEGATIVE);
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(report["divergent"], serde_json::Value::Bool(true));
    }

    #[test]
    fn reports_are_byte_identical_across_runs() {
        let fam = serde_json::json!({
            "kind": "diagonal", "N": 2, "data": { "lambda": [1.0, 3.0] }
        });
        let path = write_tmp("diag13.json", &fam.to_string());
        let out1 = std::env::temp_dir().join("okrwn-cli-tests/s1.json");
        let out2 = std::env::temp_dir().join("okrwn-cli-tests/s2.json");
        for out in [&out1, &out2] {
            let code = run_args(&[
                "filtration",
                "spectrum",
                "-i",
                path.to_str().unwrap(),
                "-o",
                out.to_str().unwrap(),
            ]);
            assert_eq!(code, EXIT_OK);
        }
        assert_eq!(
            std::fs::read(&out1).unwrap(),
            std::fs::read(&out2).unwrap()
        );
    }

    #[test]
    fn trace_csv_is_monotone_for_flat_families() {
        let fam = serde_json::json!({
            "kind": "diagonal", "N": 2, "data": { "lambda": [1.0, 3.0] }
        });
        let path = write_tmp("diag13b.json", &fam.to_string());
        let out = std::env::temp_dir().join("okrwn-cli-tests/trace.csv");
        let code = run_args(&[
            "--format",
            "csv",
            "filtration",
            "trace",
            "-i",
            path.to_str().unwrap(),
            "--alpha",
            "1",
            "--section",
            "1,0",
            "--t-samples",
            "0:10:21",
            "-o",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
        let text = std::fs::read_to_string(&out).unwrap();
        let values: Vec<f64> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert_eq!(values.len(), 21);
        for w in values.windows(2) {
            assert!(w[1] >= w[0] - 1e-9 * w[0].abs());
        }
    }

    #[test]
    fn missing_input_is_an_error() {
        assert_eq!(
            run_args(&["roundtrip", "-i", "/nonexistent/nope.json"]),
            EXIT_ERROR
        );
    }

    #[test]
    fn transformed_reports_reingest_cleanly() {
        // hat output fed back through check reproduces the curve data
        let curve = crate::toric::RadialTestCurve::LinearGreen { lambda: 1.0 }
            .as_test_curve(&[0.3, 0.6], Grid1D::new(-1.0, 1.5, 251).unwrap())
            .unwrap();
        let curve_path = write_tmp(
            "curve.json",
            &report::to_json(&TestCurveJson::from(&curve)).unwrap(),
        );
        let ray_path = std::env::temp_dir().join("okrwn-cli-tests/ray.json");
        assert_eq!(
            run_args(&[
                "transform",
                "-i",
                curve_path.to_str().unwrap(),
                "--direction",
                "hat",
                "-o",
                ray_path.to_str().unwrap(),
            ]),
            EXIT_OK
        );
        let back_path = std::env::temp_dir().join("okrwn-cli-tests/curve-back.json");
        assert_eq!(
            run_args(&[
                "transform",
                "-i",
                ray_path.to_str().unwrap(),
                "--direction",
                "check",
                "--grid=-1:1.5:251",
                "-o",
                back_path.to_str().unwrap(),
            ]),
            EXIT_OK
        );
        let back: TestCurveJson =
            serde_json::from_str(&std::fs::read_to_string(&back_path).unwrap()).unwrap();
        let back = back.lift().unwrap();
        for (ra, rb) in curve.values.iter().zip(&back.values) {
            for (a, b) in ra.iter().zip(rb) {
                match (a, b) {
                    (crate::ext_real::Finite(x), crate::ext_real::Finite(y)) => {
                        assert!((x - y).abs() < 2e-2)
                    }
                    (a, b) => assert_eq!(a, b),
                }
            }
        }
    }

    #[test]
    fn config_file_fills_missing_flags() {
        let cfg = write_tmp("cfg.json", r#"{"margin": 0.25}"#);
        // a body where (1,1) is interior at small margin but not at 0.25
        let samples: Vec<ValuationSample> = (0..=3u32)
            .flat_map(|i| {
                (0..=(3 - i)).map(move |j| {
                    ValuationSample::new(1, crate::valuations::Exponent(vec![i, j])).unwrap()
                })
            })
            .collect();
        let body = accumulate_body(&samples, 1, BodySource::Unspecified).unwrap();
        let body_path = write_tmp(
            "cfg-body.json",
            &report::to_json(&ConvexBodyJson::from(&body.body)).unwrap(),
        );
        let out = std::env::temp_dir().join("okrwn-cli-tests/cfg-out.json");
        // margin 0.25 from the config: (1,1) sits 1/sqrt(2) ~ 0.707 - ... inside,
        // so still interior; an explicit flag of 0.8 must override and fail
        let code = run_args(&[
            "certify",
            "-i",
            body_path.to_str().unwrap(),
            "--point",
            "1,1",
            "--config",
            cfg.to_str().unwrap(),
            "-o",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
        let code = run_args(&[
            "certify",
            "-i",
            body_path.to_str().unwrap(),
            "--point",
            "1,1",
            "--margin",
            "0.8",
            "--config",
            cfg.to_str().unwrap(),
            "-o",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_NEGATIVE);
    }

    #[test]
    fn demo_fmt_passes() {
        let out = std::env::temp_dir().join("okrwn-cli-tests/demo.json");
        let code = run_args(&["demo-fmt", "-o", out.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK);
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert!(report["checks"].as_array().unwrap().len() >= 10);
    }
}
