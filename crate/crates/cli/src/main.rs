//! `biharm`: mesh generation, cascade solves, convergence studies and
//! diagnostics for the Neumann problem of the biharmonic operator.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure,
//! 3 compatibility violation under `--strict`.

mod expr;
mod vtk;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use biharm::biharmonic::{
    compatibility_residual, solve_neumann, CascadeOptions, NeumannProblem, DEFAULT_COMPAT_THRESHOLD,
    DEFAULT_HARMONIC_DEGREE,
};
use biharm::fem::{
    integrate_boundary, integrate_domain, quadrature::MAX_ORDER, segment_quadrature, triangle_quadrature, FeSpace,
    BOUNDARY_QUADRATURE_ORDER,
};
use biharm::manufactured::{case_by_name, l2_error, squared_bubble, ManufacturedCase, CASE_NAMES};
use biharm::mesh::{read_mesh, refine_uniform, unit_disk_mesh, unit_square_mesh, write_mesh, DomainTag, Mesh};
use biharm::poisson::{overdetermined_check, overdetermined_fourth, DirichletSolver, Source};
use biharm::sparse::{CgOptions, Preconditioner};
use biharm::symbolic::{
    complementing_check, format_complex, harmonic_basis, laplace_neumann_control, ComplementingReport,
};
use biharm::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

use expr::Expr;

#[derive(Parser)]
#[command(
    name = "biharm",
    version,
    about = "Neumann problem for the biharmonic operator via two Dirichlet Poisson solves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate (or read and refine) a mesh and write it in the native format
    Mesh(MeshCmd),
    /// Solve the Neumann problem by the cascade and report diagnostics
    Solve(SolveCmd),
    /// Refinement study for a manufactured case, as CSV
    Converge(ConvergeCmd),
    /// Compatibility residuals of the data against harmonic polynomials
    Compat(CompatCmd),
    /// Recovered Neumann flux of sigma_h compared with h
    Flux(FluxCmd),
    /// Overdetermined Poisson problem: solve with U = 0 and test dU/dn = 0
    Overdet(OverdetCmd),
    /// Exact complementing-condition computation for the Neumann conditions
    Complementing(ComplementingCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum Domain {
    Square,
    Disk,
}

#[derive(Args)]
struct MeshArgs {
    /// Domain to mesh
    #[arg(long, value_enum, default_value_t = Domain::Square)]
    domain: Domain,
    /// Subdivisions per side (square) or number of rings (disk)
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..=4096))]
    n: u32,
    /// Uniform refinements applied after generation or reading
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u32).range(0..=8))]
    refine: u32,
    /// Read the mesh from a file instead of generating it
    #[arg(long, value_name = "FILE", conflicts_with_all = ["domain", "n"])]
    mesh: Option<PathBuf>,
}

#[derive(Args)]
struct DegreeArg {
    /// Polynomial degree of the Lagrange elements
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
    degree: u32,
}

#[derive(Args)]
struct DataArgs {
    /// Manufactured case on the unit square
    #[arg(long, value_parser = CASE_NAMES, conflicts_with_all = ["f", "g", "h"])]
    case: Option<String>,
    /// Right-hand side f(x, y) of the fourth-order equation
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    f: Option<String>,
    /// Boundary value g(x, y) of the Laplacian [default: 0]
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    g: Option<String>,
    /// Boundary flux h(x, y, nx, ny) with outward normal (nx, ny) [default: 0]
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    h: Option<String>,
}

#[derive(Args)]
struct SolverArgs {
    /// Relative residual tolerance of conjugate gradients
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Iteration cap of conjugate gradients [default: 10 x unknowns]
    #[arg(long)]
    max_iter: Option<usize>,
    /// Disable the Jacobi preconditioner
    #[arg(long)]
    no_precond: bool,
}

#[derive(Args)]
struct CompatArgs {
    /// Highest degree of the harmonic test polynomials
    #[arg(long, default_value_t = DEFAULT_HARMONIC_DEGREE, value_parser = clap::value_parser!(u32).range(0..=12))]
    kmax: u32,
    /// Fail with exit code 3 when a compatibility residual exceeds the threshold
    #[arg(long)]
    strict: bool,
    /// Absolute residual threshold used by --strict
    #[arg(long, default_value_t = DEFAULT_COMPAT_THRESHOLD)]
    compat_threshold: f64,
}

#[derive(Args)]
struct MeshCmd {
    #[command(flatten)]
    mesh: MeshArgs,
    /// Output mesh file [default: stdout]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveCmd {
    #[command(flatten)]
    mesh: MeshArgs,
    #[command(flatten)]
    degree: DegreeArg,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    compat: CompatArgs,
    /// VTK file receiving the fields sigma and s at the mesh vertices
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergeCmd {
    /// Manufactured case on the unit square
    #[arg(long, value_parser = CASE_NAMES)]
    case: String,
    /// Number of refinement levels
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=8))]
    levels: u32,
    /// Subdivisions per side on the coarsest level (doubled per level)
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..=1024))]
    n0: u32,
    #[command(flatten)]
    degree: DegreeArg,
    #[command(flatten)]
    solver: SolverArgs,
    /// CSV output file [default: stdout]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompatCmd {
    #[command(flatten)]
    mesh: MeshArgs,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    compat: CompatArgs,
}

#[derive(Args)]
struct FluxCmd {
    #[command(flatten)]
    mesh: MeshArgs,
    #[command(flatten)]
    degree: DegreeArg,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// CSV file receiving the projected flux at each boundary dof
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OverdetCmd {
    #[command(flatten)]
    mesh: MeshArgs,
    #[command(flatten)]
    degree: DegreeArg,
    #[command(flatten)]
    solver: SolverArgs,
    /// Source p(x, y) [default: the Laplacian of (x(1-x)y(1-y))^2]
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    p: Option<String>,
    /// Also run the fourth-order variant: a second solve with zero trace
    #[arg(long)]
    fourth: bool,
}

#[derive(Args)]
struct ComplementingCmd {
    /// Also print the Neumann condition of the Laplacian, which satisfies the condition
    #[arg(long)]
    control: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Core(Error::Io(e))
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(Error::NonConvergence { .. } | Error::NotPositiveDefinite { .. }) => 2,
            CliError::Core(Error::Compatibility { .. }) => 3,
            CliError::Core(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::Mesh(c) => run_mesh(c, &mut out),
        Command::Solve(c) => run_solve(c, &mut out),
        Command::Converge(c) => run_converge(c, &mut out),
        Command::Compat(c) => run_compat(c, &mut out),
        Command::Flux(c) => run_flux(c, &mut out),
        Command::Overdet(c) => run_overdet(c, &mut out),
        Command::Complementing(c) => run_complementing(c, &mut out),
    };
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn build_mesh(args: &MeshArgs) -> CliResult<Mesh> {
    let mut mesh = match &args.mesh {
        Some(path) => read_mesh(BufReader::new(File::open(path)?))?,
        None => match args.domain {
            Domain::Square => unit_square_mesh(args.n as usize)?,
            Domain::Disk => unit_disk_mesh(args.n as usize)?,
        },
    };
    for _ in 0..args.refine {
        mesh = refine_uniform(&mesh)?;
    }
    Ok(mesh)
}

fn cg_options(args: &SolverArgs) -> CliResult<CgOptions> {
    if !(args.tol > 0.0 && args.tol < 1.0) {
        return Err(CliError::Usage(format!("--tol must lie in (0, 1), got {}", args.tol)));
    }
    Ok(CgOptions {
        rel_tol: args.tol,
        max_iter: args.max_iter,
        preconditioner: if args.no_precond { Preconditioner::None } else { Preconditioner::Jacobi },
    })
}

fn parse_expr(name: &str, src: &str, normal: bool) -> CliResult<Expr> {
    Expr::parse(src, normal).map_err(|e| CliError::Usage(format!("--{name} '{src}': {e}")))
}

/// The data and, for a named case, the case itself.
fn problem_data(args: &DataArgs, mesh: &Mesh) -> CliResult<(NeumannProblem, Option<ManufacturedCase>)> {
    if let Some(name) = &args.case {
        let case = case_by_name(name)?;
        if mesh.domain() != case.domain {
            return Err(CliError::Usage(format!("case '{name}' is defined on the unit square")));
        }
        return Ok((case.problem(), Some(case)));
    }
    let Some(f) = &args.f else {
        return Err(CliError::Usage("either --case or --f is required".into()));
    };
    let f = parse_expr("f", f, false)?;
    let g = parse_expr("g", args.g.as_deref().unwrap_or("0"), false)?;
    let h = parse_expr("h", args.h.as_deref().unwrap_or("0"), true)?;
    let problem = NeumannProblem::new(
        move |x, y| f.eval(x, y, [0.0; 2]),
        move |x, y| g.eval(x, y, [0.0; 2]),
        move |x, y, n| h.eval(x, y, n),
    );
    Ok((problem, None))
}

fn cascade_options(solver: &SolverArgs, compat: &CompatArgs) -> CliResult<CascadeOptions> {
    Ok(CascadeOptions {
        cg: cg_options(solver)?,
        harmonic_degree: compat.kmax,
        strict_threshold: compat.strict.then_some(compat.compat_threshold),
    })
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn describe_mesh(mesh: &Mesh) -> String {
    let domain = match mesh.domain() {
        DomainTag::UnitSquare => "unit square",
        DomainTag::UnitDiskPolygon => "polygonal unit disk",
    };
    format!(
        "mesh: {domain}, {} vertices, {} triangles, {} boundary edges, h = {:.6e}",
        mesh.vertices().len(),
        mesh.triangles().len(),
        mesh.boundary_edges().len(),
        mesh.h_max()
    )
}

fn run_mesh(cmd: MeshCmd, out: &mut impl Write) -> CliResult<()> {
    let mesh = build_mesh(&cmd.mesh)?;
    match &cmd.out {
        Some(path) => {
            let mut w = create(path)?;
            write_mesh(&mesh, &mut w)?;
            w.flush()?;
            writeln!(out, "{}", describe_mesh(&mesh))?;
            writeln!(out, "wrote {}", path.display())?;
        }
        None => write_mesh(&mesh, out)?,
    }
    Ok(())
}

fn run_solve(cmd: SolveCmd, out: &mut impl Write) -> CliResult<()> {
    let mesh = build_mesh(&cmd.mesh)?;
    let (problem, case) = problem_data(&cmd.data, &mesh)?;
    let opts = cascade_options(&cmd.solver, &cmd.compat)?;
    writeln!(out, "{}", describe_mesh(&mesh))?;
    let space = FeSpace::new(mesh, cmd.degree.degree as usize)?;
    let sol = solve_neumann(&space, &problem, &opts)?;
    let d = &sol.diagnostics;
    writeln!(out, "dofs: {} (P{})", space.dof_count(), cmd.degree.degree)?;
    writeln!(out, "cg iterations: {} (sigma), {} (s)", d.cg_iterations[0], d.cg_iterations[1])?;
    writeln!(out, "compat max |r|: {:.6e}", d.compat_max())?;
    writeln!(out, "flux mismatch: {:.6e}", d.flux_mismatch)?;
    if let Some(case) = &case {
        writeln!(out, "l2 error sigma: {:.6e}", l2_error(&sol.sigma_h, |x, y| (case.sigma)(x, y)))?;
        writeln!(out, "l2 error s: {:.6e}", l2_error(&sol.s_h, |x, y| (case.u)(x, y)))?;
    }
    if let Some(path) = &cmd.out {
        let mut w = create(path)?;
        let fields = [("sigma", sol.sigma_h.coefficients()), ("s", sol.s_h.coefficients())];
        vtk::write_vtk(&mut w, space.mesh(), "biharmonic cascade solution", &fields)?;
        w.flush()?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}

fn fmt_rate(r: Option<f64>) -> String {
    r.map(|r| format!("{r:.4}")).unwrap_or_default()
}

fn run_converge(cmd: ConvergeCmd, out: &mut impl Write) -> CliResult<()> {
    let case = case_by_name(&cmd.case)?;
    let opts = CascadeOptions { cg: cg_options(&cmd.solver)?, ..CascadeOptions::default() };
    let mut table = String::from("level,h,dofs,l2_sigma,l2_s,rate_sigma,rate_s,flux_mismatch,compat_max\n");
    let mut prev: Option<(f64, f64, f64)> = None;
    for level in 0..cmd.levels {
        let n = (cmd.n0 as usize) << level;
        let space = FeSpace::new(unit_square_mesh(n)?, cmd.degree.degree as usize)?;
        let sol = solve_neumann(&space, &case.problem(), &opts)?;
        let h = space.mesh().h_max();
        let es = l2_error(&sol.sigma_h, |x, y| (case.sigma)(x, y));
        let eu = l2_error(&sol.s_h, |x, y| (case.u)(x, y));
        let rate = |e0: f64, e1: f64, h0: f64| (e0 / e1).ln() / (h0 / h).ln();
        let (rs, ru) = match prev {
            Some((h0, es0, eu0)) => (Some(rate(es0, es, h0)), Some(rate(eu0, eu, h0))),
            None => (None, None),
        };
        table.push_str(&format!(
            "{level},{h:.6e},{},{es:.6e},{eu:.6e},{},{},{:.6e},{:.6e}\n",
            space.dof_count(),
            fmt_rate(rs),
            fmt_rate(ru),
            sol.diagnostics.flux_mismatch,
            sol.diagnostics.compat_max()
        ));
        prev = Some((h, es, eu));
    }
    match &cmd.out {
        Some(path) => {
            let mut w = create(path)?;
            w.write_all(table.as_bytes())?;
            w.flush()?;
            writeln!(out, "wrote {}", path.display())?;
        }
        None => out.write_all(table.as_bytes())?,
    }
    Ok(())
}

fn run_compat(cmd: CompatCmd, out: &mut impl Write) -> CliResult<()> {
    let mesh = build_mesh(&cmd.mesh)?;
    let (problem, _) = problem_data(&cmd.data, &mesh)?;
    let space = FeSpace::new(mesh, 1)?;
    let basis = harmonic_basis(cmd.compat.kmax);
    let residuals = compatibility_residual(&space, &problem, &basis)?;
    writeln!(out, "eta,polynomial,residual")?;
    for (eta, r) in basis.iter().zip(&residuals) {
        writeln!(out, "{},{},{r:.6e}", eta.label(), eta.polynomial())?;
    }
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if cmd.compat.strict && max_residual > cmd.compat.compat_threshold {
        return Err(Error::Compatibility { max_residual, threshold: cmd.compat.compat_threshold }.into());
    }
    Ok(())
}

fn run_flux(cmd: FluxCmd, out: &mut impl Write) -> CliResult<()> {
    let mesh = build_mesh(&cmd.mesh)?;
    let (problem, _) = problem_data(&cmd.data, &mesh)?;
    let space = FeSpace::new(mesh, cmd.degree.degree as usize)?;
    let solver = DirichletSolver::new(&space, cg_options(&cmd.solver)?);
    let f = problem.f.as_ref();
    let sigma = solver.solve(Source::Function(f), problem.g.as_ref())?;
    let flux = solver.normal_flux(&sigma.field, Source::Function(f))?;

    let vol = triangle_quadrature(MAX_ORDER)?;
    let seg = segment_quadrature(BOUNDARY_QUADRATURE_ORDER)?;
    let int_f = integrate_domain(space.mesh(), &vol, f);
    let int_h = integrate_boundary(space.mesh(), &seg, problem.h.as_ref());
    writeln!(out, "{}", describe_mesh(space.mesh()))?;
    writeln!(out, "flux mismatch ||dn sigma_h - h||: {:.6e}", flux.l2_distance(problem.h.as_ref()))?;
    writeln!(out, "flux norm ||dn sigma_h||: {:.6e}", flux.l2_norm())?;
    writeln!(out, "total flux of sigma_h: {:.6e}", flux.total())?;
    writeln!(out, "integral of f: {:.6e}", int_f)?;
    writeln!(out, "integral of h: {:.6e}", int_h)?;
    if let Some(path) = &cmd.out {
        let mut w = create(path)?;
        writeln!(w, "dof,x,y,flux")?;
        for (bd, theta) in space.boundary_dofs().iter().zip(flux.projected()) {
            let [x, y] = space.dof_coordinates()[bd.dof];
            writeln!(w, "{},{x:?},{y:?},{theta:.12e}", bd.dof)?;
        }
        w.flush()?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}

fn run_overdet(cmd: OverdetCmd, out: &mut impl Write) -> CliResult<()> {
    let mesh = build_mesh(&cmd.mesh)?;
    let p: Box<dyn Fn(f64, f64) -> f64> = match &cmd.p {
        Some(src) => {
            let e = parse_expr("p", src, false)?;
            Box::new(move |x, y| e.eval(x, y, [0.0; 2]))
        }
        None => {
            let e = squared_bubble().laplacian().evaluator();
            Box::new(move |x, y| e.eval(x, y))
        }
    };
    let opts = cg_options(&cmd.solver)?;
    let space = FeSpace::new(mesh, cmd.degree.degree as usize)?;
    let int_p = integrate_domain(space.mesh(), &triangle_quadrature(MAX_ORDER)?, &p);
    writeln!(out, "{}", describe_mesh(space.mesh()))?;
    if cmd.fourth {
        let r = overdetermined_fourth(&space, &p, &opts)?;
        writeln!(out, "flux l2 ||dn U_h||: {:.6e}", r.flux_l2)?;
        writeln!(out, "total flux: {:.12e}", r.total_flux)?;
        writeln!(out, "laplacian trace l2 ||U_h||: {:.6e}", r.laplacian_trace_l2)?;
    } else {
        let r = overdetermined_check(&space, &p, &opts)?;
        writeln!(out, "flux l2 ||dn U_h||: {:.6e}", r.flux_l2)?;
        writeln!(out, "total flux: {:.12e}", r.total_flux)?;
    }
    writeln!(out, "integral of p: {:.12e}", int_p)?;
    Ok(())
}

fn print_report(out: &mut impl Write, names: &[&str], report: &ComplementingReport) -> io::Result<()> {
    writeln!(out, "modulus: {}", report.modulus)?;
    for ((name, symbol), rem) in names.iter().zip(&report.symbols).zip(&report.remainders) {
        writeln!(out, "{name} = {symbol}  ->  remainder {rem}")?;
    }
    match &report.factor {
        Some(c) => writeln!(out, "dependent: {}, factor: {}", report.linearly_dependent, format_complex(c))?,
        None => writeln!(out, "dependent: {}", report.linearly_dependent)?,
    }
    writeln!(out, "complementing condition: {}", if report.condition_holds() { "holds" } else { "violated" })
}

fn run_complementing(cmd: ComplementingCmd, out: &mut impl Write) -> CliResult<()> {
    print_report(out, &["B1", "B2"], &complementing_check())?;
    if cmd.control {
        writeln!(out)?;
        writeln!(out, "control (Neumann condition of the Laplacian):")?;
        print_report(out, &["B"], &laplace_neumann_control())?;
    }
    Ok(())
}
