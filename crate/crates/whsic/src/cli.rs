//! Command-line front end.
//!
//! Subcommands: `gen-basis`, `verify`, `project`, `lift`, `search`, `stff`.
//! Every command prints a JSON report to stdout (and optionally writes it
//! with `--report`). Exit status: 0 when all checks pass, 1 when a
//! verification fails or a search finds no solution, 2 on usage or parse
//! errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::files::{format_f64, CheckEntry, ParamsFile, ReportFile, VectorFile, VectorKind};
use crate::linalg::max_abs_diff;
use crate::sicframes::{
    lift_component_gram, lift_fiducial, naimark_residual, projected_frame_report,
    verify_sic_overlaps,
};
use crate::sicsearch::{search, SearchConfig};
use crate::stff::{geometric_stff, stff_projector, stff_verify, LatticeMatrix};
use crate::whbasis::{build_fiducial, is_wh_fiducial, SubspaceChart, WhBasisParams};

/// Tools for Weyl–Heisenberg covariant bases of a tensor square, SIC
/// fiducials, and symmetric tight fusion frames.
#[derive(Parser, Debug)]
#[command(name = "whsic", version, about)]
pub struct Cli {
    /// Verification tolerance threaded to every check.
    #[arg(long, global = true, default_value_t = crate::DEFAULT_TOL)]
    pub tol: f64,

    /// Also write the JSON report to this path.
    #[arg(long, global = true, value_name = "FILE")]
    pub report: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a basis fiducial of the doubled displacement orbit and write
    /// it as a basis_vector file.
    GenBasis(GenBasisArgs),
    /// Verify a vector file: SIC overlaps for fiducials, basis membership
    /// for basis vectors.
    Verify {
        /// Vector file to check.
        file: PathBuf,
    },
    /// Report on the frame obtained by projecting a basis orbit onto the
    /// symmetric subspace.
    Project {
        /// basis_vector file.
        file: PathBuf,
    },
    /// Lift a SIC fiducial to a basis fiducial of the tensor square.
    Lift(LiftArgs),
    /// Purity-ascent search for SIC fiducials.
    Search(SearchArgs),
    /// Build and verify the symmetric tight fusion frame of a SIC fiducial
    /// (odd dimensions).
    Stff(StffArgs),
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["canonical", "identity", "seed", "params"])))]
pub struct GenBasisArgs {
    /// Dimension d (the basis vectors live in dimension d²).
    #[arg(short = 'd', long = "dimension")]
    pub d: usize,

    /// Emit the canonical member |0⟩⊗F|0⟩.
    #[arg(long)]
    pub canonical: bool,

    /// Build from identity block parameters.
    #[arg(long)]
    pub identity: bool,

    /// Draw Haar-random block parameters from this seed.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Read block parameters from a params JSON file.
    #[arg(long, value_name = "FILE")]
    pub params: Option<PathBuf>,

    /// Output path for the basis_vector file.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct LiftArgs {
    /// fiducial file to lift.
    pub file: PathBuf,

    /// Output path for the lifted basis_vector file.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Dimension d.
    #[arg(short = 'd', long = "dimension")]
    pub d: usize,

    /// Number of independent restarts.
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,

    /// Base seed (restart k uses seed ^ k).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Iteration cap per restart.
    #[arg(long = "max-iter", default_value_t = 500)]
    pub max_iterations: usize,

    /// Purity level that counts as success and triggers extraction.
    #[arg(long, default_value_t = 1.0 - 1e-9)]
    pub threshold: f64,

    /// Tolerance for verifying the extracted fiducial (looser than --tol
    /// because the optimizer stops at the threshold).
    #[arg(long, default_value_t = 1e-4)]
    pub extraction_tol: f64,

    /// Warm-start restart 0 from this basis_vector file.
    #[arg(long, value_name = "FILE")]
    pub warm_start: Option<PathBuf>,

    /// Polish the extracted fiducial to --tol accuracy before writing it.
    #[arg(long)]
    pub refine: bool,

    /// Write the extracted fiducial here on success.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("variant").args(["matrix", "geometric"])))]
pub struct StffArgs {
    /// fiducial file (odd dimension).
    pub file: PathBuf,

    /// Lattice re-indexing matrix "x11,x12,x21,x22" with
    /// det ≡ (d+1)/2 (mod d); defaults to diag(1, (d+1)/2).
    #[arg(long, value_name = "X")]
    pub matrix: Option<String>,

    /// Also build the projector geometrically from the lift components and
    /// compare it with the phase formula at X = diag(1, (d+1)/2).
    #[arg(long)]
    pub geometric: bool,
}

/// Entry point used by the binary: parses `std::env::args_os()`.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

/// Parses the given arguments, executes the command, prints the report to
/// stdout, and returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let started = Instant::now();
    match dispatch(&cli) {
        Ok(mut report) => {
            report.elapsed_seconds = started.elapsed().as_secs_f64();
            match report.to_json() {
                Ok(json) => print!("{json}"),
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            }
            if let Some(path) = &cli.report {
                if let Err(e) = report.write(path) {
                    eprintln!("error: {e}");
                    return 2;
                }
            }
            if report.pass {
                0
            } else {
                1
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NotSicFiducial { .. }
        | Error::NotWhFiducial { .. }
        | Error::NotSymmetric { .. }
        | Error::NotUnitary { .. }
        | Error::LiftNotOrthogonal { .. }
        | Error::ExtractionFailed { .. } => 1,
        _ => 2,
    }
}

fn dispatch(cli: &Cli) -> Result<ReportFile> {
    match &cli.command {
        Command::GenBasis(args) => cmd_gen_basis(args, cli.tol),
        Command::Verify { file } => cmd_verify(file, cli.tol),
        Command::Project { file } => cmd_project(file, cli.tol),
        Command::Lift(args) => cmd_lift(args, cli.tol),
        Command::Search(args) => cmd_search(args, cli.tol),
        Command::Stff(args) => cmd_stff(args, cli.tol),
    }
}

fn base_metadata(source: &str, tol: f64) -> BTreeMap<String, String> {
    let mut metadata = BTreeMap::new();
    metadata.insert("source".to_string(), source.to_string());
    metadata.insert("tolerance".to_string(), format_f64(tol));
    metadata
}

fn read_kind(path: &Path, kind: VectorKind) -> Result<VectorFile> {
    let file = VectorFile::read(path)?;
    if file.kind != kind {
        return Err(Error::FileFormat(format!(
            "{} holds a {:?} vector, expected {:?}",
            path.display(),
            file.kind,
            kind
        )));
    }
    Ok(file)
}

fn cmd_gen_basis(args: &GenBasisArgs, tol: f64) -> Result<ReportFile> {
    let (fiducial, source) = if args.canonical {
        (
            crate::whbasis::canonical_fiducial(args.d)?,
            "canonical".to_string(),
        )
    } else {
        let chart = SubspaceChart::canonical(args.d)?;
        let (params, source) = if args.identity {
            (WhBasisParams::identity(args.d)?, "identity".to_string())
        } else if let Some(seed) = args.seed {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (
                WhBasisParams::random(args.d, &mut rng)?,
                format!("seed:{seed}"),
            )
        } else {
            let path = args
                .params
                .as_ref()
                .expect("clap enforces the source group");
            (
                ParamsFile::read(path)?.to_params(tol)?,
                format!("params:{}", path.display()),
            )
        };
        (build_fiducial(&params, &chart)?, source)
    };
    let membership = is_wh_fiducial(fiducial.vector(), tol)?;

    let file = VectorFile::basis_vector(fiducial.vector(), args.d, base_metadata(&source, tol));
    file.write(&args.out)?;

    let mut report = ReportFile::new("gen-basis");
    report.config_entry("d", args.d);
    report.config_entry("source", &source);
    report.config_entry("tol", format_f64(tol));
    report.config_entry("out", args.out.display());
    report.push_check(CheckEntry::less_than(
        "membership_max_overlap",
        membership.max_overlap,
        tol,
    ));
    report.push_check(CheckEntry::less_than(
        "norm_residual",
        membership.norm_residual,
        tol,
    ));
    Ok(report)
}

fn cmd_verify(path: &Path, tol: f64) -> Result<ReportFile> {
    let file = VectorFile::read(path)?;
    let v = file.to_vector()?;

    let mut report = ReportFile::new("verify");
    report.config_entry("file", path.display());
    report.config_entry("kind", format!("{:?}", file.kind));
    report.config_entry("d", file.d);
    report.config_entry("tol", format_f64(tol));

    match file.kind {
        VectorKind::Fiducial => {
            let overlaps = verify_sic_overlaps(&v, tol)?;
            report.push_check(CheckEntry::less_than(
                "overlap_deviation",
                overlaps.max_deviation,
                tol,
            ));
            report.push_check(CheckEntry::less_than(
                "norm_residual",
                overlaps.norm_residual,
                tol,
            ));
            report.result(
                "overlap_sq_range",
                serde_json::json!([
                    format_f64(overlaps.overlap_sq_min),
                    format_f64(overlaps.overlap_sq_max)
                ]),
            );
        }
        VectorKind::BasisVector => {
            let membership = is_wh_fiducial(&v, tol)?;
            report.push_check(CheckEntry::less_than(
                "membership_max_overlap",
                membership.max_overlap,
                tol,
            ));
            report.push_check(CheckEntry::less_than(
                "norm_residual",
                membership.norm_residual,
                tol,
            ));
        }
    }
    Ok(report)
}

fn cmd_project(path: &Path, tol: f64) -> Result<ReportFile> {
    let file = read_kind(path, VectorKind::BasisVector)?;
    let b = file.to_vector()?;
    let frame = projected_frame_report(&b, tol)?;

    let mut report = ReportFile::new("project");
    report.config_entry("file", path.display());
    report.config_entry("d", frame.d);
    report.config_entry("tol", format_f64(tol));
    report.push_check(CheckEntry::less_than(
        "membership_max_overlap",
        frame.gram_offdiag_max,
        tol,
    ));
    report.push_check(CheckEntry::less_than(
        "tightness_residual",
        frame.tightness_residual,
        tol,
    ));
    report.result(
        "equiangularity_range",
        serde_json::json!([
            format_f64(frame.equiangularity_min),
            format_f64(frame.equiangularity_max)
        ]),
    );
    report.result_floats("schmidt_spectrum", &frame.schmidt_spectrum);
    report.result("schmidt_rank", serde_json::json!(frame.schmidt_rank));
    Ok(report)
}

fn cmd_lift(args: &LiftArgs, tol: f64) -> Result<ReportFile> {
    let file = read_kind(&args.file, VectorKind::Fiducial)?;
    let f = file.to_vector()?;
    let chart = SubspaceChart::canonical(file.d)?;

    let mut report = ReportFile::new("lift");
    report.config_entry("file", args.file.display());
    report.config_entry("d", file.d);
    report.config_entry("tol", format_f64(tol));

    match lift_fiducial(&f, &chart, tol) {
        Ok(outcome) => {
            let gram_gate = (100.0 * tol).max(1e-10);
            report.push_check(CheckEntry::less_than(
                "component_gram_residual",
                outcome.gram_residual,
                gram_gate,
            ));
            report.push_check(CheckEntry::less_than(
                "projection_identity_residual",
                outcome.alignment_residual,
                tol,
            ));
            let membership = is_wh_fiducial(outcome.fiducial.vector(), tol)?;
            report.push_check(CheckEntry::less_than(
                "membership_max_overlap",
                membership.max_overlap,
                tol,
            ));
            let naimark = naimark_residual(&f, outcome.fiducial.vector())?;
            report.push_check(CheckEntry::less_than("naimark_residual", naimark, tol));
            if let Some(out) = &args.out {
                let mut metadata = base_metadata("lift", tol);
                metadata.insert("lifted_from".to_string(), args.file.display().to_string());
                VectorFile::basis_vector(outcome.fiducial.vector(), file.d, metadata).write(out)?;
                report.config_entry("out", out.display());
            }
        }
        Err(err @ (Error::NotSicFiducial { .. } | Error::LiftNotOrthogonal { .. })) => {
            report.pass = false;
            report.result("failure", serde_json::json!(err.to_string()));
            for (class, gram) in lift_component_gram(&f, &chart)?.iter().enumerate() {
                report.result_matrix(&format!("component_gram_class_{class}"), gram);
            }
        }
        Err(err) => return Err(err),
    }
    Ok(report)
}

fn cmd_search(args: &SearchArgs, tol: f64) -> Result<ReportFile> {
    let chart = SubspaceChart::canonical(args.d)?;
    let mut config = SearchConfig::new(args.d)?;
    config.restarts = args.restarts;
    config.seed = args.seed;
    config.max_iterations = args.max_iterations;
    config.threshold = args.threshold;
    config.extraction_tol = args.extraction_tol;
    if let Some(path) = &args.warm_start {
        let file = read_kind(path, VectorKind::BasisVector)?;
        config.warm_start = Some(crate::whbasis::decompose_fiducial(
            &file.to_vector()?,
            &chart,
            tol,
        )?);
    }

    let result = search(&config, &chart)?;

    let mut report = ReportFile::new("search");
    report.config_entry("d", args.d);
    report.config_entry("restarts", args.restarts);
    report.config_entry("seed", args.seed);
    report.config_entry("max_iterations", args.max_iterations);
    report.config_entry("threshold", format_f64(args.threshold));
    report.config_entry("extraction_tol", format_f64(args.extraction_tol));
    report.config_entry("tol", format_f64(tol));

    report.push_check(CheckEntry::at_least(
        "best_purity",
        result.best_purity,
        args.threshold,
    ));
    report.result_floats("restart_purities", &result.restart_purities);
    report.result_floats("purity_trace", &result.purity_trace);
    report.result(
        "converged_restart_count",
        serde_json::json!(result.converged_restart_count),
    );

    match &result.extracted {
        Some(extraction) => {
            report.push_check(CheckEntry::less_than(
                "extraction_subdominant",
                extraction.subdominant,
                args.extraction_tol,
            ));
            report.push_check(CheckEntry::less_than(
                "lambda_deviation",
                extraction.lambda_deviation,
                args.extraction_tol,
            ));
            let (fiducial, source) = if args.refine {
                let polished =
                    crate::sicframes::refine_fiducial(extraction.fiducial.vector(), 50, tol)?;
                let check = verify_sic_overlaps(&polished, tol)?;
                report.push_check(CheckEntry::less_than(
                    "refined_overlap_deviation",
                    check.max_deviation,
                    tol,
                ));
                (polished, "search+refine")
            } else {
                (extraction.fiducial.vector().clone(), "search")
            };
            if let Some(out) = &args.out {
                let mut metadata = base_metadata(source, tol);
                metadata.insert("seed".to_string(), args.seed.to_string());
                metadata.insert("best_purity".to_string(), format_f64(result.best_purity));
                VectorFile::fiducial(&fiducial, metadata).write(out)?;
                report.config_entry("out", out.display());
            }
        }
        None => {
            report.pass = false;
            report.result(
                "failure",
                serde_json::json!("no restart produced a verified fiducial"),
            );
        }
    }
    Ok(report)
}

fn parse_lattice_matrix(d: usize, text: &str) -> Result<LatticeMatrix> {
    let parts: Vec<i64> = text
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|e| Error::FileFormat(format!("invalid matrix entry {p:?}: {e}")))
        })
        .collect::<Result<_>>()?;
    if parts.len() != 4 {
        return Err(Error::FileFormat(format!(
            "--matrix needs 4 comma-separated integers, found {}",
            parts.len()
        )));
    }
    LatticeMatrix::new(d, [[parts[0], parts[1]], [parts[2], parts[3]]])
}

fn cmd_stff(args: &StffArgs, tol: f64) -> Result<ReportFile> {
    let file = read_kind(&args.file, VectorKind::Fiducial)?;
    let f = file.to_vector()?;
    let d = file.d;

    let x = match &args.matrix {
        Some(text) => parse_lattice_matrix(d, text)?,
        None => LatticeMatrix::diag_canonical(d)?,
    };
    let pi = stff_projector(&f, &x, tol)?;
    let verify = stff_verify(&pi, tol)?;

    let mut report = ReportFile::new("stff");
    report.config_entry("file", args.file.display());
    report.config_entry("d", d);
    report.config_entry("matrix", format!("{:?}", x.entries()));
    report.config_entry("tol", format_f64(tol));

    report.push_check(CheckEntry::less_than(
        "projector_residual",
        verify.projector_residual,
        tol,
    ));
    report.push_check(CheckEntry::less_than(
        "trace_deviation",
        verify.trace_deviation,
        tol,
    ));
    report.push_check(CheckEntry::less_than(
        "pairwise_trace_deviation",
        verify.pairwise_deviation,
        tol,
    ));
    report.push_check(CheckEntry::less_than(
        "resolution_deviation",
        verify.resolution_deviation,
        tol,
    ));
    report.result("rank", serde_json::json!(verify.rank));
    report.result_matrix("projector", &pi);

    if args.geometric {
        let chart = SubspaceChart::canonical(d)?;
        let geometric = geometric_stff(&f, &chart, tol)?;
        let canonical = stff_projector(&f, &LatticeMatrix::diag_canonical(d)?, tol)?;
        report.push_check(CheckEntry::less_than(
            "geometric_equality_residual",
            max_abs_diff(&geometric, &canonical),
            tol,
        ));
    }
    Ok(report)
}
