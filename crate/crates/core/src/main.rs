use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use conevol::harness::{empirical_hull_gap, sample_cone_volumes, verify_suite, Distribution};
use conevol::io::{classification_to_input, polytope_to_input, read_gamma, read_normals, read_support};
use conevol::polytope::{irredundant_facets, ku_halfspaces, pscc_halfspaces, structure_predicates};
use conevol::solver::{decide_membership, solve};
use conevol::{classify, intersect_halfplanes, cone_volume_vector, Error, NormalSet, Result, SolveOptions};

/// Cone-volume sets of planar polygons.
///
/// Vectors and indices are read and written in the order of the normals in
/// the input file; `canonical_order[k]` names the input normal at angle rank k.
#[derive(Parser)]
#[command(name = "conevol", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct SolveArgs {
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolveArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.tol,
            max_iters: self.max_iters,
            restarts: self.restarts,
            seed: self.seed,
            ..SolveOptions::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Triangle-capable and trapezoid-only normals.
    Classify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Subspace concentration polytope in both forms.
    Pscc {
        #[arg(long)]
        input: PathBuf,
    },
    /// Closed convex hull of the cone-volume set in both forms.
    Hull {
        #[arg(long)]
        input: PathBuf,
        /// Keep only facet-defining inequalities.
        #[arg(long)]
        irredundant: bool,
    },
    /// Cone-volume vector of P(U, b).
    ConeVolume {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Membership of a target vector in the cone-volume set.
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        gamma: PathBuf,
        /// Decide membership in the closure.
        #[arg(long)]
        closure: bool,
        /// Residual tolerance of the numerical fallback.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Search for support numbers realizing a target vector.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        gamma: PathBuf,
        #[command(flatten)]
        opts: SolveArgs,
    },
    /// Random normalized cone-volume vectors.
    Sample {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// uniform01, exp or nearDegenerate.
        #[arg(long, default_value = "uniform01")]
        dist: String,
        /// Write rows to this CSV file instead of listing them on stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// 1-based coordinates to keep, e.g. 1,2,3.
        #[arg(long, value_delimiter = ',')]
        project: Option<Vec<usize>>,
    },
    /// Sample and run every structural check.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn with_order(u: &NormalSet, value: impl Serialize) -> Result<Value> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::InternalInvariantViolation(e.to_string()))?;
    if let Value::Object(map) = &mut v {
        map.insert("canonical_order".into(), json!(u.order()));
    }
    Ok(v)
}

fn projection(m: usize, project: Option<Vec<usize>>) -> Result<Vec<usize>> {
    let cols = match project {
        Some(p) => p,
        // four normals: the last coordinate is implied by the sum
        None if m == 4 => vec![1, 2, 3],
        None => (1..=m).collect(),
    };
    if let Some(&bad) = cols.iter().find(|&&c| c == 0 || c > m) {
        return Err(Error::InvalidOptions(format!("projection index {bad} is outside 1..={m}")));
    }
    Ok(cols.into_iter().map(|c| c - 1).collect())
}

fn write_csv(path: &Path, header: &[usize], rows: &[Vec<f64>]) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io_err)?);
    let names: Vec<String> = header.iter().map(|c| format!("gamma{}", c + 1)).collect();
    writeln!(f, "{}", names.join(",")).map_err(io_err)?;
    for r in rows {
        let cells: Vec<String> = r.iter().map(|x| format!("{x:.17e}")).collect();
        writeln!(f, "{}", cells.join(",")).map_err(io_err)?;
    }
    f.flush().map_err(io_err)
}

fn run(cli: Cli) -> Result<Value> {
    match cli.command {
        Command::Classify { input } => {
            let u = read_normals(&input)?;
            let c = classify(&u)?;
            c.check_laws(&u)?;
            with_order(&u, classification_to_input(&u, &c))
        }
        Command::Pscc { input } => {
            let u = read_normals(&input)?;
            with_order(&u, polytope_to_input(&u, &pscc_halfspaces(&u)))
        }
        Command::Hull { input, irredundant } => {
            let u = read_normals(&input)?;
            let c = classify(&u)?;
            let mut rep = ku_halfspaces(&u, &c);
            if irredundant {
                rep = irredundant_facets(&rep)?;
            }
            let mut v = with_order(&u, polytope_to_input(&u, &rep))?;
            v["structure"] = json!(structure_predicates(&c));
            Ok(v)
        }
        Command::ConeVolume { input, b } => {
            let u = read_normals(&input)?;
            let b = read_support(&b, &u)?;
            let cv = cone_volume_vector(&u, &b)?;
            let area = intersect_halfplanes(&u, &b)?.area;
            with_order(
                &u,
                json!({"gamma": u.to_input_order(&cv.gamma), "degenerate": cv.degenerate, "area": area}),
            )
        }
        Command::Check {
            input,
            gamma,
            closure,
            tol,
        } => {
            let u = read_normals(&input)?;
            let g = read_gamma(&gamma, &u)?;
            let opts = SolveOptions {
                tol,
                ..SolveOptions::default()
            };
            let v = decide_membership(&u, &g, &opts, closure)?;
            with_order(
                &u,
                json!({
                    "verdict": v.verdict,
                    "member": v.verdict.decided(),
                    "citation": v.citation,
                    "witness": v.witness.map(|b| u.to_input_order(b.as_slice())),
                    "residual": v.residual,
                }),
            )
        }
        Command::Solve { input, gamma, opts } => {
            let u = read_normals(&input)?;
            let g = read_gamma(&gamma, &u)?;
            let r = solve(&u, &g, &opts.options())?;
            with_order(
                &u,
                json!({
                    "status": r.status,
                    "b": u.to_input_order(r.b.as_slice()),
                    "residual": r.residual,
                    "iterations": r.iterations,
                }),
            )
        }
        Command::Sample {
            input,
            count,
            seed,
            dist,
            csv,
            project,
        } => {
            let u = read_normals(&input)?;
            let dist: Distribution = dist.parse()?;
            let batch = sample_cone_volumes(&u, count, seed, dist)?;
            let rows: Vec<Vec<f64>> = batch.gammas.iter().map(|g| u.to_input_order(&g.gamma)).collect();
            match csv {
                Some(path) => {
                    let cols = projection(u.len(), project)?;
                    let projected: Vec<Vec<f64>> =
                        rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
                    write_csv(&path, &cols, &projected)?;
                    with_order(
                        &u,
                        json!({"seed": seed, "dist": dist.to_string(), "count": count,
                               "csv": path.display().to_string(),
                               "columns": cols.iter().map(|c| c + 1).collect::<Vec<_>>()}),
                    )
                }
                None => with_order(
                    &u,
                    json!({"seed": seed, "dist": dist.to_string(), "count": count, "gammas": rows}),
                ),
            }
        }
        Command::Verify { input, count, seed } => {
            let u = read_normals(&input)?;
            let report = verify_suite(&u, count, seed)?;
            let batch = sample_cone_volumes(&u, count.max(u.len() + 1), seed, Distribution::NearDegenerate)?;
            let gap = empirical_hull_gap(&u, &batch)?;
            let mut v = with_order(&u, &report)?;
            v["all_passed"] = json!(report.all_passed());
            v["empirical_hull_gap"] = json!(gap);
            Ok(v)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("JSON values always serialize"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_internal() { 2 } else { 1 })
        }
    }
}
