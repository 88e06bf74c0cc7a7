use assoc_core::boundary::{assemble_dl, check_trace_symmetry, chern_number, index_of, mean_curvature_field, read_mesh, spectrum, NormalDerivative};
use assoc_core::g2::G2Structure;
use assoc_gallery::acceptance::{criterion, summary_report, verify_all, CriterionResult};
use assoc_gallery::algebra::CrossTable;
use assoc_gallery::config::{ConfigFile, RunConfig};
use assoc_gallery::report::{write_report, Check, Format, Report};
use assoc_gallery::surfaces::{index_table, mu_of, nu_of, tangent, tangent_chern_numbers};
use assoc_gallery::{run_example, ExampleName, ExampleParams, ExampleSpec, GalleryError};
use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use rayon::prelude::*;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "assoc", version, about = "Deformation operators of associative submanifolds: checks and examples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(clap::Args, Debug, Default)]
struct Options {
    /// Grid nodes per period.
    #[arg(long = "resolution", visible_alias = "n", global = true)]
    resolution: Option<usize>,
    /// Relative kernel threshold.
    #[arg(long, global = true, allow_negative_numbers = true)]
    tol: Option<f64>,
    /// Sphere radius.
    #[arg(long, global = true, allow_negative_numbers = true)]
    rho: Option<f64>,
    /// Perturbation parameter of D^∨.
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Coefficient of the perturbation term.
    #[arg(long, global = true, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Constant normal vector, seven comma-separated entries.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    e: Option<Vec<f64>>,
    /// Ellipsoid semi-axes, three comma-separated entries.
    #[arg(long, global = true, value_delimiter = ',')]
    axes: Option<Vec<f64>>,
    /// Icosphere subdivision level.
    #[arg(long, global = true)]
    level: Option<usize>,
    /// Refinement levels, comma-separated.
    #[arg(long, global = true, value_delimiter = ',')]
    refine: Option<Vec<usize>>,
    /// Directory for reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Zero timings so reruns with one seed are byte-identical.
    #[arg(long, global = true)]
    bit_reproducible: bool,
    /// Run independent examples concurrently.
    #[arg(long, global = true)]
    parallel: bool,
    /// JSON file with any of the options above; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Corrupt one cross-product table entry (exercises the failure path).
    #[arg(long, global = true, hide = true)]
    inject_fault: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact algebra, Λ³ decomposition and reconstruction checks.
    VerifyAlgebra,
    /// Dirac operator on the closed torus and the strip.
    Dirac,
    /// Boundary operator on the sphere, ellipsoid and ball examples, or on a mesh file.
    Boundary {
        /// OFF or OBJ surface in ℝ³, read as the boundary of a region of an associative 3-space.
        #[arg(long)]
        mesh: Option<PathBuf>,
    },
    /// Index formula and Chern numbers on the gallery boundaries.
    Index,
    /// Run catalog examples by name, or all of them.
    Example {
        #[arg(required = true, value_name = "NAME|all")]
        names: Vec<String>,
    },
    /// The full acceptance suite, one row per criterion.
    VerifyAll,
    /// List the catalog.
    List,
}

fn catalog_help() -> String {
    let mut s = String::from("Examples:\n");
    for n in ExampleName::ALL {
        s.push_str(&format!("  {:<20} {}\n", n.as_str(), n.description()));
    }
    s.push_str("\nExit codes: 0 all checks pass, 1 a check fails, 2 configuration error.");
    s
}

fn vec_array<const N: usize>(v: &Option<Vec<f64>>, flag: &str) -> Result<Option<[f64; N]>, GalleryError> {
    match v {
        None => Ok(None),
        Some(v) if v.len() == N => Ok(Some(std::array::from_fn(|i| v[i]))),
        Some(v) => Err(GalleryError::Config(format!("--{flag} needs {N} comma-separated values, got {}", v.len()))),
    }
}

fn resolve(opts: &Options) -> Result<(RunConfig, ExampleParams), GalleryError> {
    let file = match &opts.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let base = file.params();
    let params = ExampleParams {
        resolution: opts.resolution.or(base.resolution),
        rho: opts.rho.or(base.rho),
        lambda: opts.lambda.or(base.lambda),
        a: opts.a.or(base.a),
        e: vec_array(&opts.e, "e")?.or(base.e),
        axes: vec_array(&opts.axes, "axes")?.or(base.axes),
        level: opts.level.or(base.level),
        tol: opts.tol.or(base.tol),
        refine: opts.refine.clone().or(base.refine),
    };
    let defaults = RunConfig::default();
    let config = RunConfig {
        out: opts.out.clone().or(file.out),
        format: opts.format.or(file.format).unwrap_or(defaults.format),
        seed: opts.seed.or(file.seed).unwrap_or(defaults.seed),
        bit_reproducible: opts.bit_reproducible || file.bit_reproducible.unwrap_or(false),
        parallel: opts.parallel || file.parallel.unwrap_or(false),
    };
    Ok((config, params))
}

fn print_report(r: &Report) {
    println!("== {} ==", r.example);
    for c in &r.checks {
        let v = c.value.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into());
        println!("  [{}] {:<36} {:>11}  {}", if c.pass { "PASS" } else { "FAIL" }, c.name, v, c.reference);
    }
}

fn run_examples(names: &[ExampleName], params: &ExampleParams, config: &RunConfig) -> Result<bool, GalleryError> {
    let specs: Vec<ExampleSpec> = names.iter().map(|&name| ExampleSpec { name, params: params.clone() }).collect();
    for s in &specs {
        s.validate()?;
    }
    let reports: Vec<Result<Report, GalleryError>> = if config.parallel {
        specs.par_iter().map(|s| run_example(s, config)).collect()
    } else {
        specs.iter().map(|s| run_example(s, config)).collect()
    };
    let mut pass = true;
    for r in reports {
        let r = r?;
        print_report(&r);
        pass &= r.pass;
    }
    Ok(pass)
}

fn finish(report: Report, config: &RunConfig) -> Result<bool, GalleryError> {
    let mut report = report;
    if config.bit_reproducible {
        report.strip_timings();
    }
    print_report(&report);
    if let Some(dir) = &config.out {
        write_report(&report, dir, config.format)?;
    }
    Ok(report.pass)
}

fn print_criteria(results: &[CriterionResult], show_time: bool) {
    for c in results {
        if show_time {
            println!("{}  ({} ms)", c.line(), c.wall_time_ms);
        } else {
            println!("{}", c.line());
        }
    }
}

fn mesh_report(path: &PathBuf, params: &ExampleParams, config: &RunConfig) -> Result<Report, GalleryError> {
    let st = G2Structure::standard();
    let mesh = read_mesh(path, &st)?;
    let spec = ExampleSpec { name: ExampleName::SphereRho, params: params.clone() };
    let e = spec.e();
    let mut r = Report::new("mesh", config.seed);
    r.parameter("mesh", path.display().to_string());
    r.parameter("e", e);
    let mu = mu_of(&mesh, e)?;
    let mats = assemble_dl(&mesh, &mu, NormalDerivative::MeshFit)?;
    let ts = check_trace_symmetry(&mats, &mean_curvature_field(&mesh)?);
    r.measure("trace-residual", ts.trace_residual);
    r.measure("asymmetry", ts.asymmetry);
    let eig: Vec<[f64; 2]> = mats.iter().map(spectrum).collect();
    r.measure("min-eigenvalue", eig.iter().map(|s| s[0]).fold(f64::INFINITY, f64::min));
    r.measure("max-eigenvalue", eig.iter().map(|s| s[1]).fold(f64::NEG_INFINITY, f64::max));
    r.measure("mean-eigenvalue", eig.iter().map(|s| s[0] + s[1]).sum::<f64>() / (2 * eig.len().max(1)) as f64);
    r.measure("mesh-size", mesh.mesh_size());
    let c_t = chern_number(&tangent(&mesh)?, &mesh)?;
    let nu = nu_of(&mesh, e)?;
    let c_nu = chern_number(&nu, &mesh)?;
    let c_mu = chern_number(&mu, &mesh)?;
    r.check(Check::equals("c1-tangent", "c₁(T∂Y) = χ(∂Y)", c_t as f64, mesh.euler_characteristic() as f64));
    r.check(Check::equals("tensor-relation", "−c₁(μ_X) = c₁(ν_X) + c₁(T∂Y)", (-c_mu) as f64, (c_nu + c_t) as f64));
    let d = index_of(&mesh, &nu)?;
    r.measure("index", d.index as f64);
    r.measure("euler-characteristic", d.euler_characteristic as f64);
    Ok(r)
}

fn run(cli: Cli) -> Result<bool, GalleryError> {
    let (config, params) = resolve(&cli.opts)?;
    let table = if cli.opts.inject_fault { CrossTable::corrupted() } else { CrossTable::standard() };
    match cli.command {
        Command::List => {
            print!("{}", catalog_help());
            println!();
            Ok(true)
        }
        Command::Example { names } => {
            let names = if names.iter().any(|n| n == "all") {
                ExampleName::ALL.to_vec()
            } else {
                names.iter().map(|n| ExampleName::parse(n)).collect::<Result<Vec<_>, _>>()?
            };
            run_examples(&names, &params, &config)
        }
        Command::Dirac => run_examples(&[ExampleName::Torus3Closed, ExampleName::StripCoassoc], &params, &config),
        Command::Boundary { mesh: Some(path) } => finish(mesh_report(&path, &params, &config)?, &config),
        Command::Boundary { mesh: None } => {
            run_examples(&[ExampleName::BallConstantE, ExampleName::SphereRho, ExampleName::Ellipsoid], &params, &config)
        }
        Command::Index => {
            let level = params.level.unwrap_or(3);
            let mut r = Report::new("index", config.seed);
            r.parameter("level", level);
            let [cs, ct, cg] = tangent_chern_numbers(level)?;
            r.check(Check::equals("c1-sphere", "c₁(TS²) = 2", cs as f64, 2.0));
            r.check(Check::equals("c1-torus", "c₁(TT²) = 0", ct as f64, 0.0));
            r.check(Check::equals("c1-genus-two", "c₁(TΣ₂) = −2", cg as f64, -2.0));
            for row in index_table(level)? {
                r.check(Check::equals(&format!("index-{}", row.label), "index = c₁(ν_X) + Σ(1 − gᵢ)", row.index as f64, row.expected_index as f64));
                r.check(Check::equals(&format!("tensor-{}", row.label), "−c₁(μ_X) = c₁(ν_X) + c₁(T∂Y)", row.tensor_residual as f64, 0.0));
                r.indices.push(row);
            }
            finish(r, &config)
        }
        Command::VerifyAlgebra => {
            let results: Vec<CriterionResult> = (1..=3).map(|id| criterion(id, &table, config.seed)).collect();
            print_criteria(&results, !config.bit_reproducible);
            let mut r = summary_report(&results, config.seed, config.bit_reproducible);
            r.example = "verify-algebra".into();
            if let Some(dir) = &config.out {
                write_report(&r, dir, config.format)?;
            }
            Ok(r.pass)
        }
        Command::VerifyAll => {
            let results = verify_all(&table, config.seed);
            print_criteria(&results, !config.bit_reproducible);
            let r = summary_report(&results, config.seed, config.bit_reproducible);
            let failed = results.iter().filter(|c| !c.pass).count();
            if config.bit_reproducible {
                println!("{} of 12 criteria pass", 12 - failed);
            } else {
                println!("{} of 12 criteria pass in {:.1} s", 12 - failed, r.wall_time_ms as f64 / 1000.0);
            }
            if let Some(dir) = &config.out {
                write_report(&r, dir, config.format)?;
            }
            Ok(r.pass)
        }
    }
}

fn main() -> ExitCode {
    let matches = Cli::command().after_help(catalog_help()).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
