//! `formpipe`: check, clean, solve and generate structural exchange files.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use formpipe_core::analysis::{analyze, Analysis, AnalysisOptions};
use formpipe_core::casegen::{
    gen_cantilever, gen_leonardo, gen_random, gen_sphere_lattice, CantileverSpec, GenError, LatticeSpec, LeonardoSpec,
    LeonardoVariant, Occupancy, RandomSpec,
};
use formpipe_core::exchange::{parse_model, write_model, write_results_vtk};
use formpipe_core::model::StructuralModel;
use formpipe_core::repair::{check_support_reachability, repair_pipeline, RepairConfig, RepairError};
use formpipe_core::solver::{Solver, SolverError, DEFAULT_PCG_TOL};
use formpipe_core::validate::{validate_with_tol, Severity, DEFAULT_MERGE_TOL};

const REPORT_VERSION: u32 = 1;
const THREADS_VAR: &str = "FORMPIPE_THREADS";

const EXIT_WARNINGS: u8 = 1;
const EXIT_MODEL: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_USAGE: u8 = 64;

const AFTER_HELP: &str = "\
Units: lengths in mm, forces in N, moments in N·mm, stresses and moduli in MPa,
density in kg/mm³, gravity in mm/s².

Exit codes:
  0   success (check: no findings)
  1   check: warnings only
  2   blocking model defect, repair conflict or failed analysis
  3   input file cannot be parsed
  4   file could not be read or written
  64  invalid command line

Environment:
  FORMPIPE_THREADS  worker threads for assembly (default 1, reproducible)";

#[derive(Parser)]
#[command(name = "formpipe", version, about = "Structural model pipeline: check, clean, solve, generate", after_help = AFTER_HELP)]
struct Cli {
    /// Report layout on standard output.
    #[arg(long, value_enum, default_value_t = ReportFormat::Text, global = true)]
    format: ReportFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    /// One `key=value` record per line.
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverChoice {
    Direct,
    Pcg,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a model, including support reachability.
    Check {
        input: PathBuf,
        /// Coincidence tolerance for degenerate cells, mm.
        #[arg(long, default_value_t = DEFAULT_MERGE_TOL)]
        merge_tol: f64,
    },
    /// Merge duplicates, drop degenerate cells and detached pieces, prune dead arms.
    Clean {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        repair: RepairArgs,
    },
    /// Linear static analysis; writes legacy VTK results.
    Solve {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Write a generated model.
    Gen {
        #[command(subcommand)]
        case: GenCase,
    },
}

#[derive(Args)]
struct RepairArgs {
    /// Points closer than this are merged, mm.
    #[arg(long, default_value_t = DEFAULT_MERGE_TOL)]
    merge_tol: f64,
    /// Unprotected points with at most this many cells are peeled as dead arms.
    #[arg(long, default_value_t = 2)]
    prune_degree: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum, default_value_t = SolverChoice::Direct)]
    solver: SolverChoice,
    /// Relative preconditioned residual for PCG.
    #[arg(long, default_value_t = DEFAULT_PCG_TOL)]
    pcg_tol: f64,
    /// Default: 10 × number of equations.
    #[arg(long)]
    pcg_max_iter: Option<usize>,
    /// Scale applied to displacements in the results geometry.
    #[arg(long, default_value_t = 1.0)]
    deform_scale: f64,
    /// Override the model's self-weight flag.
    #[arg(long, value_enum)]
    self_weight: Option<OnOff>,
    /// Resistance ratio above which a cell counts as exceeded.
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
}

#[derive(Subcommand)]
enum GenCase {
    /// Clamped steel cantilever with a tip force.
    Cantilever {
        #[arg(short, long)]
        output: PathBuf,
        /// mm
        #[arg(long, default_value_t = 1000.0)]
        length: f64,
        /// mm
        #[arg(long, default_value_t = 20.0)]
        diameter: f64,
        /// Downward tip force, N.
        #[arg(long, default_value_t = 264.777)]
        force: f64,
        #[arg(long, default_value_t = 1)]
        elements: usize,
        #[arg(long, value_enum, default_value_t = OnOff::On)]
        self_weight: OnOff,
    },
    /// Planar interleaved timber arch.
    Leonardo {
        #[arg(short, long)]
        output: PathBuf,
        /// open, closed or closed_mobile
        #[arg(long, default_value = "closed")]
        variant: LeonardoVariant,
        /// mm
        #[arg(long, default_value_t = 35_000.0)]
        span: f64,
        /// mm
        #[arg(long, default_value_t = 13_000.0)]
        height: f64,
        #[arg(long, default_value_t = 8)]
        segments: usize,
    },
    /// Lattice of touching spheres: a block when any of --nx/--ny/--nz is
    /// given, otherwise the default arch with injected defects.
    Lattice {
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        ny: Option<usize>,
        #[arg(long)]
        nz: Option<usize>,
        /// Fraction of cells injected as dead arms and detached splashes.
        #[arg(long)]
        splash_fraction: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Random frame, optionally with defects for repair.
    Random {
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long)]
        messy: bool,
        #[arg(long)]
        rigid_links: bool,
    },
}

/// Failure carrying its exit code; the message goes to standard error.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code,
            error: error.into(),
        }
    }
}

type Outcome = Result<(Report, u8), Failure>;

/// Ordered records, rendered either as aligned text or `key=value` lines.
struct Report {
    command: &'static str,
    records: Vec<(String, String)>,
    /// Records from this index on are left out of the text layout, which
    /// shows `notes` instead.
    text_cutoff: Option<usize>,
    notes: Vec<String>,
}

impl Report {
    fn new(command: &'static str) -> Self {
        Report {
            command,
            records: Vec::new(),
            text_cutoff: None,
            notes: Vec::new(),
        }
    }

    fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.records.push((key.into(), value.to_string()));
    }

    fn detail_follows(&mut self) {
        self.text_cutoff = Some(self.records.len());
    }

    fn render(&self, format: ReportFormat) -> String {
        let mut out = String::new();
        match format {
            ReportFormat::Structured => {
                let _ = writeln!(out, "formpipe_report_version={REPORT_VERSION}");
                let _ = writeln!(out, "command={}", self.command);
                for (k, v) in &self.records {
                    let _ = writeln!(out, "{k}={v}");
                }
            }
            ReportFormat::Text => {
                let shown = &self.records[..self.text_cutoff.unwrap_or(self.records.len())];
                let width = shown.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                let _ = writeln!(out, "formpipe {}", self.command);
                for (k, v) in shown {
                    let _ = writeln!(out, "  {k:width$}  {v}");
                }
                for n in &self.notes {
                    let _ = writeln!(out, "{n}");
                }
            }
        }
        out
    }
}

fn read_model(path: &Path) -> Result<StructuralModel, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(|e| Failure::new(EXIT_IO, e))?;
    parse_model(&text)
        .with_context(|| format!("cannot parse {}", path.display()))
        .map_err(|e| Failure::new(EXIT_PARSE, e))
}

/// Write through a temporary file in the target directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let result = (|| -> anyhow::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(contents.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(path)?;
        Ok(())
    })();
    result
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(|e| Failure::new(EXIT_IO, e))
}

fn cmd_check(input: &Path, merge_tol: f64) -> Outcome {
    if !(merge_tol.is_finite() && merge_tol >= 0.0) {
        return Err(Failure::new(
            EXIT_USAGE,
            anyhow::anyhow!("--merge-tol must be finite and non-negative"),
        ));
    }
    let model = read_model(input)?;
    let findings = validate_with_tol(&model, merge_tol).findings;
    let unsupported = check_support_reachability(&model);

    let mut report = Report::new("check");
    report.push("points", model.points.len());
    report.push("cells", model.cells.len());
    let blocking = findings.iter().filter(|f| f.severity() == Severity::Blocking).count() + unsupported.len();
    let warnings = findings.len() + unsupported.len() - blocking;
    report.push("blocking", blocking);
    report.push("warnings", warnings);
    let (code, status) = if blocking > 0 {
        (EXIT_MODEL, "blocking")
    } else if warnings > 0 {
        (EXIT_WARNINGS, "warnings")
    } else {
        (0, "clean")
    };
    report.push("status", status);
    report.detail_follows();
    for (i, f) in findings.iter().enumerate() {
        let level = match f.severity() {
            Severity::Blocking => "error",
            Severity::Warning => "warning",
        };
        report.push(format!("finding.{i}"), format!("{level}: {f}"));
        report.notes.push(format!("{level}: {f}"));
    }
    for (i, c) in unsupported.iter().enumerate() {
        let msg = format!(
            "error: component of {} point(s) starting at point {} has {} fixed DOF(s) and is not supported",
            c.points.len(),
            c.points[0],
            c.fixed_dofs
        );
        report.push(format!("unsupported.{i}"), &msg[7..]);
        report.notes.push(msg);
    }
    Ok((report, code))
}

fn cmd_clean(input: &Path, output: &Path, args: &RepairArgs) -> Outcome {
    let mut model = read_model(input)?;
    let config = RepairConfig {
        merge_tol: args.merge_tol,
        prune_degree: args.prune_degree,
    };
    let repair = repair_pipeline(&mut model, &config).map_err(|e| {
        let code = match e {
            RepairError::BadTolerance(_) | RepairError::BadDegree => EXIT_USAGE,
            _ => EXIT_MODEL,
        };
        Failure::new(code, e)
    })?;
    write_atomic(output, &write_model(&model))?;

    let mut report = Report::new("clean");
    report.push("output", output.display());
    report.push("points", model.points.len());
    report.push("cells", model.cells.len());
    report.detail_follows();
    report.records.extend(repair.to_records());
    report.notes.push(repair.to_text().trim_end().to_string());
    Ok((report, 0))
}

fn solver_exit(e: &SolverError) -> u8 {
    match e {
        SolverError::BadTolerance(_) => EXIT_USAGE,
        _ => EXIT_MODEL,
    }
}

fn summary_records(report: &mut Report, a: &Analysis) {
    let s = &a.summary;
    report.push("equations", a.assembly.system.n_eq());
    report.push("cells", s.cell_count);
    report.push("max_u_el", format!("{:?}", s.max_u_el));
    report.push(
        "max_u_el_cell",
        s.max_u_el_cell.map(|c| c.to_string()).unwrap_or_else(|| "none".into()),
    );
    report.push("max_total_displacement", format!("{:?}", s.max_total_displacement));
    report.push("exceeded_count", s.exceeded_count);
    report.push("method", a.stats.method.as_str());
    report.push("iterations", a.stats.iterations);
    report.push("relative_residual", format!("{:e}", a.stats.relative_residual));
    report.push("equilibrium_error", format!("{:e}", a.equilibrium_error));
    for r in &a.reactions {
        let c: Vec<String> = r.components.iter().map(|v| format!("{v:?}")).collect();
        report.push(format!("reaction.{}", r.point), c.join(" "));
    }
    report.push("wall_time", format!("{:.6}", a.stats.wall_time));
}

fn cmd_solve(input: &Path, output: &Path, args: &SolveArgs) -> Outcome {
    if !(args.threshold.is_finite() && args.threshold >= 0.0) {
        return Err(Failure::new(
            EXIT_USAGE,
            anyhow::anyhow!("--threshold must be finite and non-negative"),
        ));
    }
    if !args.deform_scale.is_finite() {
        return Err(Failure::new(
            EXIT_USAGE,
            anyhow::anyhow!("--deform-scale must be finite"),
        ));
    }
    let model = read_model(input)?;
    let options = AnalysisOptions {
        solver: match args.solver {
            SolverChoice::Direct => Solver::Direct,
            SolverChoice::Pcg => Solver::Pcg {
                tol: args.pcg_tol,
                max_iter: args.pcg_max_iter,
            },
        },
        self_weight: args.self_weight.map(|s| s == OnOff::On),
        threshold: args.threshold,
    };
    let analysis = analyze(&model, &options).map_err(|e| {
        let code = solver_exit(&e);
        let detail = match &e {
            SolverError::Unsupported(parts) => parts
                .iter()
                .map(|c| {
                    format!(
                        "\n  component starting at point {} ({} points)",
                        c.points[0],
                        c.points.len()
                    )
                })
                .collect(),
            _ => String::new(),
        };
        Failure::new(code, anyhow::anyhow!("analysis failed: {e}{detail}"))
    })?;
    let vtk =
        write_results_vtk(&model, &analysis.results, args.deform_scale).map_err(|e| Failure::new(EXIT_MODEL, e))?;
    write_atomic(output, &vtk)?;

    let mut report = Report::new("solve");
    report.push("output", output.display());
    summary_records(&mut report, &analysis);
    Ok((report, 0))
}

fn gen_failure(e: GenError) -> Failure {
    Failure::new(EXIT_USAGE, e)
}

fn cmd_gen(case: &GenCase) -> Outcome {
    let mut report = Report::new("gen");
    let (model, output) = match case {
        GenCase::Cantilever {
            output,
            length,
            diameter,
            force,
            elements,
            self_weight,
        } => {
            report.push("case", "cantilever");
            let spec = CantileverSpec {
                length: *length,
                diameter: *diameter,
                tip_force: *force,
                n_elements: *elements,
                self_weight: *self_weight == OnOff::On,
                ..Default::default()
            };
            (gen_cantilever(&spec).map_err(gen_failure)?, output)
        }
        GenCase::Leonardo {
            output,
            variant,
            span,
            height,
            segments,
        } => {
            report.push("case", "leonardo");
            report.push("variant", variant.as_str());
            let spec = LeonardoSpec {
                variant: *variant,
                span: *span,
                height: *height,
                n_segments: *segments,
                ..Default::default()
            };
            (gen_leonardo(&spec).map_err(gen_failure)?, output)
        }
        GenCase::Lattice {
            output,
            nx,
            ny,
            nz,
            splash_fraction,
            seed,
        } => {
            report.push("case", "lattice");
            let mut spec = if nx.is_some() || ny.is_some() || nz.is_some() {
                LatticeSpec::block(nx.unwrap_or(1), ny.unwrap_or(1), nz.unwrap_or(1))
            } else {
                LatticeSpec::default()
            };
            if let Some(f) = splash_fraction {
                spec.splash_fraction = *f;
            }
            if let Some(s) = seed {
                spec.seed = *s;
            }
            if let Occupancy::Block { nx, ny, nz } = spec.occupancy {
                report.push("block", format!("{nx}x{ny}x{nz}"));
            }
            let lattice = gen_sphere_lattice(&spec).map_err(gen_failure)?;
            report.push("injected_cells", lattice.truth.injected_cells());
            report.push("injected_fraction", format!("{:?}", lattice.truth.injected_fraction()));
            (lattice.model, output)
        }
        GenCase::Random {
            output,
            seed,
            points,
            messy,
            rigid_links,
        } => {
            report.push("case", "random");
            let spec = RandomSpec {
                max_points: *points,
                messy: *messy,
                rigid_links: *rigid_links,
                ..Default::default()
            };
            (gen_random(*seed, &spec), output)
        }
    };
    write_atomic(output, &write_model(&model))?;
    report.push("output", output.display());
    report.push("points", model.points.len());
    report.push("cells", model.cells.len());
    Ok((report, 0))
}

fn configure_threads() -> anyhow::Result<()> {
    let threads = match std::env::var(THREADS_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .with_context(|| format!("{THREADS_VAR} must be a positive integer, got `{v}`"))?,
        Err(_) => 1,
    };
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("formpipe: {e:#}");
        return ExitCode::from(EXIT_USAGE);
    }
    let outcome = match &cli.command {
        Command::Check { input, merge_tol } => cmd_check(input, *merge_tol),
        Command::Clean { input, output, repair } => cmd_clean(input, output, repair),
        Command::Solve { input, output, solve } => cmd_solve(input, output, solve),
        Command::Gen { case } => cmd_gen(case),
    };
    match outcome {
        Ok((report, code)) => {
            print!("{}", report.render(cli.format));
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("formpipe: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
