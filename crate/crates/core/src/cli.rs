//! The `sgev` command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when a solver
//! fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::json;

use crate::error::Error;
use crate::io::{
    covariance_from_data, fingerprint, load_matrix, parse_matrix, read_table, save_result,
    unix_timestamp, vocabulary_gram, DatasetSpec, Format, ResultRecord,
};
use crate::matcore::{Matrix, SymMatrix};
use crate::scca::{
    cca_components, centered_rows, column_means, cross_view_retrieval, CcaInput, DEFAULT_RIDGE,
};
use crate::sfda::{sfda_l1_constrained, sfda_lasso, sfda_solve, FdaInput};
use crate::sgev::{solve, SgevConfig, SgevProblem, MACHINE_EPSILON};
use crate::spca::{
    log_grid, principal_components, rho_ceiling, sweep, DeflationScheme, InitStrategy, PcaConfig,
    PevConvention, Sparsity, SweepConfig,
};

// stdout writes that tolerate a closed pipe
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Debug, Parser)]
#[command(
    name = "sgev",
    version,
    about = "Sparse generalized eigenvalue solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dense generalized eigenproblem (no sparsity penalty).
    Eig(EigArgs),
    /// Sparse principal components with deflation.
    Pca(PcaArgs),
    /// Sparse canonical correlation pairs.
    Cca(CcaArgs),
    /// Sparse Fisher discriminant direction.
    Fda(FdaArgs),
    /// Regularization path of the first sparse principal component.
    Sweep(SweepArgs),
    /// Fit sparse CCA on paired bag-of-words data and score retrieval.
    RetrieveEval(RetrieveArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InitArg {
    /// Leading eigenvector of the current (deflated) matrix.
    Eigen,
    Uniform,
    Random,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Sparsity regularizer ρ̃.
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    #[arg(long, default_value_t = MACHINE_EPSILON)]
    epsilon: f64,
    /// Shift τ (default: max(0, -λmin(A))).
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    /// Step-norm tolerance of the outer iteration.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Result file (JSON).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Record the wall-clock time in the result file.
    #[arg(long)]
    timestamp: bool,
}

impl SolverArgs {
    fn config(&self) -> SgevConfig {
        SgevConfig {
            rho_tilde: self.rho,
            epsilon: self.epsilon,
            tau: self.tau,
            max_iter: self.max_iter,
            tol_step: self.tol,
            ..SgevConfig::default()
        }
    }

    fn echo(&self) -> BTreeMap<String, serde_json::Value> {
        let mut m = BTreeMap::new();
        m.insert("rho_tilde".into(), json!(self.rho));
        m.insert("epsilon".into(), json!(self.epsilon));
        m.insert("tau".into(), json!(self.tau));
        m.insert("max_iter".into(), json!(self.max_iter));
        m.insert("tol_step".into(), json!(self.tol));
        m.insert("seed".into(), json!(self.seed));
        m
    }
}

#[derive(Debug, Args)]
struct MatrixInput {
    /// Symmetric matrix CSV.
    #[arg(long, conflicts_with = "data", required_unless_present = "data")]
    input: Option<PathBuf>,
    /// Data CSV (observations in rows); the matrix is CᵀC.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Divide CᵀC by (p - 1).
    #[arg(long, requires = "data")]
    scaled: bool,
    /// Do not center data columns.
    #[arg(long, requires = "data")]
    no_center: bool,
}

impl MatrixInput {
    fn load(&self) -> Result<SymMatrix, Failure> {
        if let Some(p) = &self.input {
            return load_matrix(&DatasetSpec::new(p, Format::MatrixCsv))
                .map_err(|e| Failure::input(p, e));
        }
        let p = self.data.as_ref().expect("clap enforces one input");
        let m =
            read_table(&DatasetSpec::new(p, Format::DataCsv)).map_err(|e| Failure::input(p, e))?;
        covariance_from_data(&m, !self.no_center, self.scaled).map_err(|e| Failure::input(p, e))
    }
}

#[derive(Debug, Args)]
struct EigArgs {
    #[command(flatten)]
    matrix: MatrixInput,
    /// Constraint matrix CSV (default identity).
    #[arg(long)]
    b: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = InitArg::Uniform)]
    init: InitArg,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DeflationArg {
    Hotelling,
    Projection,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PevArg {
    Subspace,
    Adjusted,
}

#[derive(Debug, Args)]
struct PcaArgs {
    #[command(flatten)]
    matrix: MatrixInput,
    #[arg(long, default_value_t = 1)]
    components: usize,
    /// Cardinality per component (comma separated); overrides --rho.
    #[arg(long, value_delimiter = ',')]
    target_cardinality: Vec<usize>,
    #[arg(long, value_enum, default_value_t = InitArg::Eigen)]
    init: InitArg,
    #[arg(long, value_enum, default_value_t = DeflationArg::Hotelling)]
    deflation: DeflationArg,
    #[arg(long, value_enum, default_value_t = PevArg::Subspace)]
    pev: PevArg,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct CcaArgs {
    #[arg(long, requires_all = ["syy", "sxy"], required_unless_present = "bow_x")]
    sxx: Option<PathBuf>,
    #[arg(long)]
    syy: Option<PathBuf>,
    /// Cross-covariance CSV (p rows, q columns).
    #[arg(long)]
    sxy: Option<PathBuf>,
    /// Binary bag-of-words for the first view (documents in rows).
    #[arg(long, requires = "bow_y", conflicts_with = "sxx")]
    bow_x: Option<PathBuf>,
    #[arg(long)]
    bow_y: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    components: usize,
    /// Ridge factor applied to a singular covariance block.
    #[arg(long, default_value_t = DEFAULT_RIDGE)]
    ridge: f64,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct FdaArgs {
    /// Class 1 mean (one CSV row).
    #[arg(long)]
    mean1: PathBuf,
    #[arg(long)]
    mean2: PathBuf,
    #[arg(long)]
    cov1: PathBuf,
    #[arg(long)]
    cov2: PathBuf,
    /// Sparsity regularizer ν.
    #[arg(long, default_value_t = 0.0)]
    nu: f64,
    /// Solve the convex ℓ1-penalized variant instead of the log penalty.
    #[arg(long)]
    lasso: bool,
    /// ℓ1 budget k for the constrained variant (implies --lasso).
    #[arg(long)]
    l1_budget: Option<f64>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    matrix: MatrixInput,
    /// Explicit grid (comma separated, strictly increasing).
    #[arg(long, value_delimiter = ',')]
    rho_grid: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    grid_points: usize,
    /// Lower grid end as a fraction of the all-zero threshold.
    #[arg(long, default_value_t = 1e-4)]
    grid_lo: f64,
    /// Curve CSV (rho,cardinality,pev).
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Solve grid points in parallel (disables warm starts).
    #[arg(long)]
    parallel: bool,
    #[arg(long)]
    no_warm_start: bool,
    #[arg(long, value_enum, default_value_t = InitArg::Uniform)]
    init: InitArg,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct RetrieveArgs {
    /// Training documents, first view.
    #[arg(long)]
    bow_x: PathBuf,
    #[arg(long)]
    bow_y: PathBuf,
    /// Held-out documents (default: the training documents).
    #[arg(long, requires = "test_y")]
    test_x: Option<PathBuf>,
    #[arg(long)]
    test_y: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    components: usize,
    #[arg(long, default_value_t = DEFAULT_RIDGE)]
    ridge: f64,
    #[command(flatten)]
    solver: SolverArgs,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    fn input(path: &Path, e: Error) -> Self {
        Self::usage(format!("{}: {e}", path.display()))
    }

    fn solver(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) => Self::usage(e.to_string()),
            e => Self {
                code: 2,
                message: format!("solver failed: {e}"),
            },
        }
    }
}

type Outcome = Result<(), Failure>;

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Eig(a) => run_eig(a),
        Command::Pca(a) => run_pca(a),
        Command::Cca(a) => run_cca(a),
        Command::Fda(a) => run_fda(a),
        Command::Sweep(a) => run_sweep(a),
        Command::RetrieveEval(a) => run_retrieve(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn random_unit(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / s).collect()
}

fn load_sym(path: &Path) -> Result<SymMatrix, Failure> {
    load_matrix(&DatasetSpec::new(path, Format::MatrixCsv)).map_err(|e| Failure::input(path, e))
}

fn load_table(path: &Path) -> Result<Matrix, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(path, e.into()))?;
    parse_matrix(&text, b',', false).map_err(|e| Failure::input(path, e))
}

fn load_vector(path: &Path) -> Result<Vec<f64>, Failure> {
    let m = load_table(path)?;
    if m.rows() != 1 && m.cols() != 1 {
        return Err(Failure::usage(format!(
            "{}: expected a single row or column",
            path.display()
        )));
    }
    Ok(m.as_slice().to_vec())
}

fn load_bow(path: &Path) -> Result<Matrix, Failure> {
    let m = load_table(path)?;
    vocabulary_gram(&m).map_err(|e| Failure::input(path, e))?;
    Ok(m)
}

fn finish(mut record: ResultRecord, args: &SolverArgs) -> Outcome {
    if let Some(path) = &args.output {
        if args.timestamp {
            record.timestamp = Some(unix_timestamp());
        }
        save_result(&record, path).map_err(|e| Failure::input(path, e))?;
    }
    Ok(())
}

fn sym_block<'a>(name: &'a str, s: &'a SymMatrix) -> (&'a str, usize, usize, &'a [f64]) {
    (name, s.n(), s.n(), s.as_slice())
}

fn run_eig(args: EigArgs) -> Outcome {
    let a = args.matrix.load()?;
    let b = match &args.b {
        Some(p) => load_sym(p)?,
        None => SymMatrix::identity(a.n()),
    };
    let problem = SgevProblem::new(a.clone(), b.clone()).map_err(Failure::solver)?;
    let mut cfg = args.solver.config();
    cfg.rho_tilde = 0.0;
    if let InitArg::Random = args.init {
        let v = random_unit(a.n(), args.solver.seed);
        let s = b.quad_form(&v).sqrt();
        cfg.init = Some(v.iter().map(|x| x / s).collect());
    }
    let (sol, trace) = solve(&problem, &cfg).map_err(Failure::solver)?;
    say!("lambda_max = {:.10}", sol.objective);
    say!(
        "iterations = {}, converged = {}",
        sol.iterations,
        sol.converged
    );
    let mut rec = ResultRecord::new(
        "eig",
        fingerprint(&[sym_block("A", &a), sym_block("B", &b)]),
    );
    rec.config = args.solver.echo();
    rec.x.push(sol.x.clone());
    rec.objective.push(sol.objective);
    rec.cardinality.push(sol.cardinality);
    rec.iterations.push(sol.iterations);
    rec.converged.push(sol.converged);
    rec.final_step_norm = trace.final_step_norm();
    finish(rec, &args.solver)
}

fn run_pca(args: PcaArgs) -> Outcome {
    let a = args.matrix.load()?;
    let n = a.n();
    let mut cfg = PcaConfig {
        solver: args.solver.config(),
        n_components: args.components,
        ..PcaConfig::default()
    };
    cfg.solver.tau = None;
    if !args.target_cardinality.is_empty() {
        let mut t = args.target_cardinality.clone();
        if t.len() == 1 && args.components > 1 {
            return Err(Failure::usage(
                "give one --target-cardinality per component",
            ));
        }
        if args.components == 1 && t.len() > 1 {
            cfg.n_components = t.len();
        }
        t.truncate(cfg.n_components);
        cfg.sparsity = Sparsity::Targets(t);
    }
    cfg.deflation = match args.deflation {
        DeflationArg::Hotelling => DeflationScheme::OrthogonalizedHotelling,
        DeflationArg::Projection => DeflationScheme::Projection,
    };
    cfg.pev = match args.pev {
        PevArg::Subspace => PevConvention::Subspace,
        PevArg::Adjusted => PevConvention::Adjusted,
    };
    match args.init {
        InitArg::Eigen => cfg.init = InitStrategy::LeadingEigenvector,
        InitArg::Uniform => cfg.init = InitStrategy::Uniform,
        InitArg::Random => {
            cfg.init = InitStrategy::Uniform;
            cfg.solver.init = Some(random_unit(n, args.solver.seed));
        }
    }
    cfg.validate(n).map_err(|e| Failure::usage(e.to_string()))?;
    let set = principal_components(&a, &cfg).map_err(Failure::solver)?;
    for (k, l) in set.loadings.iter().enumerate() {
        say!(
            "component {}: variance = {:.6}, cardinality = {}, rho = {:.6e}",
            k + 1,
            set.variances[k],
            set.cardinalities[k],
            set.rho_tildes[k]
        );
        let shown: Vec<String> = l.iter().map(|v| format!("{v:.4}")).collect();
        say!("  loadings = [{}]", shown.join(", "));
    }
    say!("cumulative pev = {:.4}", set.cumulative_pev);
    let mut rec = ResultRecord::new("pca", fingerprint(&[sym_block("A", &a)]));
    rec.config = args.solver.echo();
    rec.config
        .insert("components".into(), json!(cfg.n_components));
    rec.config
        .insert("target_cardinality".into(), json!(args.target_cardinality));
    rec.config
        .insert("deflation".into(), json!(format!("{:?}", cfg.deflation)));
    rec.config
        .insert("init".into(), json!(format!("{:?}", args.init)));
    rec.x = set.loadings.clone();
    rec.objective = set.variances.clone();
    rec.cardinality = set.cardinalities.clone();
    rec.iterations = set.iterations.clone();
    rec.converged = vec![true; set.loadings.len()];
    rec.extra.insert("rho_tilde".into(), json!(set.rho_tildes));
    rec.extra.insert("pev".into(), json!(set.pev));
    rec.extra
        .insert("cumulative_pev".into(), json!(set.cumulative_pev));
    rec.extra
        .insert("pev_convention".into(), json!(set.convention));
    finish(rec, &args.solver)
}

fn cca_input_from_bow(x: &Matrix, y: &Matrix, ridge: f64) -> Result<CcaInput, Failure> {
    CcaInput::from_views(x, y, true)
        .and_then(|c| c.regularized(ridge))
        .map_err(|e| Failure::usage(e.to_string()))
}

fn run_cca(args: CcaArgs) -> Outcome {
    let input = if let (Some(bx), Some(by)) = (&args.bow_x, &args.bow_y) {
        cca_input_from_bow(&load_bow(bx)?, &load_bow(by)?, args.ridge)?
    } else {
        let sxx = load_sym(args.sxx.as_ref().expect("clap"))?;
        let syy = load_sym(args.syy.as_ref().expect("clap"))?;
        let sxy = load_table(args.sxy.as_ref().expect("clap"))?;
        CcaInput::new(sxx, syy, sxy)
            .and_then(|c| c.regularized(args.ridge))
            .map_err(|e| Failure::usage(e.to_string()))?
    };
    let model =
        cca_components(&input, args.components, &args.solver.config()).map_err(Failure::solver)?;
    for k in 0..model.d() {
        let (kx, ky) = model.cardinalities[k];
        say!(
            "pair {}: correlation = {:.6}, cardinality = ({kx}, {ky})",
            k + 1,
            model.correlations[k]
        );
    }
    say!("zero loadings = {:.2}%", 100.0 * model.zero_fraction());
    let fp = fingerprint(&[
        sym_block("Sxx", &input.sxx),
        sym_block("Syy", &input.syy),
        (
            "Sxy",
            input.sxy.rows(),
            input.sxy.cols(),
            input.sxy.as_slice(),
        ),
    ]);
    let mut rec = ResultRecord::new("cca", fp);
    rec.config = args.solver.echo();
    rec.config
        .insert("components".into(), json!(args.components));
    rec.config.insert("ridge".into(), json!(args.ridge));
    rec.x = model
        .vx
        .iter()
        .zip(&model.vy)
        .map(|(x, y)| x.iter().chain(y).copied().collect())
        .collect();
    rec.objective = model.correlations.clone();
    rec.cardinality = model.cardinalities.iter().map(|(a, b)| a + b).collect();
    rec.iterations = vec![0; model.d()];
    rec.converged = vec![true; model.d()];
    rec.extra.insert("p".into(), json!(input.p()));
    finish(rec, &args.solver)
}

fn run_fda(args: FdaArgs) -> Outcome {
    let input = FdaInput::new(
        load_vector(&args.mean1)?,
        load_vector(&args.mean2)?,
        load_sym(&args.cov1)?,
        load_sym(&args.cov2)?,
    )
    .map_err(|e| Failure::usage(e.to_string()))?;
    let cfg = args.solver.config();
    let b = input.b();
    let a = input.a();
    let (x, iterations, converged, nu) = if let Some(k) = args.l1_budget {
        let (nu, x) = sfda_l1_constrained(&input, k, cfg.sub_tol).map_err(Failure::solver)?;
        (x, 0, true, nu)
    } else if args.lasso {
        (
            sfda_lasso(&input, args.nu, cfg.sub_tol).map_err(Failure::solver)?,
            0,
            true,
            args.nu,
        )
    } else {
        let (sol, _) = sfda_solve(&input, args.nu, &cfg).map_err(Failure::solver)?;
        (sol.x, sol.iterations, sol.converged, args.nu)
    };
    let fisher = crate::matcore::dot(&a, &x).powi(2) / b.quad_form(&x);
    let card = crate::sgev::cardinality(&x, cfg.zero_tol);
    say!("fisher ratio = {fisher:.6}, cardinality = {card}, nu = {nu:.6e}");
    let fp = fingerprint(&[
        ("mu1", 1, input.mu1.len(), &input.mu1),
        ("mu2", 1, input.mu2.len(), &input.mu2),
        sym_block("S1", &input.s1),
        sym_block("S2", &input.s2),
    ]);
    let mut rec = ResultRecord::new(
        if args.lasso || args.l1_budget.is_some() {
            "fda-lasso"
        } else {
            "fda"
        },
        fp,
    );
    rec.config = args.solver.echo();
    rec.config.insert("nu".into(), json!(nu));
    rec.config.insert("l1_budget".into(), json!(args.l1_budget));
    rec.x.push(x);
    rec.objective.push(fisher);
    rec.cardinality.push(card);
    rec.iterations.push(iterations);
    rec.converged.push(converged);
    finish(rec, &args.solver)
}

fn run_sweep(args: SweepArgs) -> Outcome {
    let a = args.matrix.load()?;
    let grid = if args.rho_grid.is_empty() {
        if args.grid_points == 0 || !(args.grid_lo > 0.0 && args.grid_lo < 1.0) {
            return Err(Failure::usage(
                "--grid-points must be positive and --grid-lo in (0, 1)",
            ));
        }
        let hi = rho_ceiling(&a, args.solver.epsilon);
        log_grid(hi * args.grid_lo, hi, args.grid_points)
    } else {
        args.rho_grid.clone()
    };
    let mut solver = args.solver.config();
    solver.tau = None;
    match args.init {
        InitArg::Random => solver.init = Some(random_unit(a.n(), args.solver.seed)),
        InitArg::Eigen => {
            let e = crate::matcore::full_eigen(&a).map_err(Failure::solver)?;
            solver.init = Some(e.vectors[0].clone());
        }
        InitArg::Uniform => {}
    }
    let cfg = SweepConfig {
        solver,
        warm_start: !args.no_warm_start && !args.parallel,
        parallel: args.parallel,
        instance: args
            .matrix
            .input
            .as_ref()
            .or(args.matrix.data.as_ref())
            .map(|p| p.display().to_string())
            .unwrap_or_default(),
    };
    let curve = match sweep(&a, &grid, &cfg) {
        Ok(c) => c,
        Err(e @ Error::InvalidConfig(_)) => return Err(Failure::usage(e.to_string())),
        Err(Error::Sweep { source, index }) if matches!(*source, Error::InvalidConfig(_)) => {
            return Err(Failure::usage(format!("grid index {index}: {source}")))
        }
        Err(e) => return Err(Failure::solver(e)),
    };
    let csv = curve.to_csv();
    match &args.curve {
        Some(p) => fs::write(p, &csv).map_err(|e| Failure::input(p, e.into()))?,
        None => say!("{}", csv.trim_end()),
    }
    let mut rec = ResultRecord::new("sweep", fingerprint(&[sym_block("A", &a)]));
    rec.config = args.solver.echo();
    rec.config.insert("grid".into(), json!(grid));
    rec.config
        .insert("warm_start".into(), json!(cfg.warm_start));
    rec.objective = curve.points.iter().map(|p| p.variance).collect();
    rec.cardinality = curve.points.iter().map(|p| p.cardinality).collect();
    rec.extra.insert(
        "pev".into(),
        json!(curve.points.iter().map(|p| p.pev).collect::<Vec<_>>()),
    );
    finish(rec, &args.solver)
}

fn run_retrieve(args: RetrieveArgs) -> Outcome {
    let (ex, ey) = (load_bow(&args.bow_x)?, load_bow(&args.bow_y)?);
    if ex.rows() != ey.rows() {
        return Err(Failure::usage(
            "the two views must have the same number of documents",
        ));
    }
    let input = cca_input_from_bow(&ex, &ey, args.ridge)?;
    let model =
        cca_components(&input, args.components, &args.solver.config()).map_err(Failure::solver)?;
    let (tx, ty) = match (&args.test_x, &args.test_y) {
        (Some(a), Some(b)) => (load_bow(a)?, load_bow(b)?),
        _ => (ex.clone(), ey.clone()),
    };
    if tx.rows() != ty.rows() || tx.rows() < 2 {
        return Err(Failure::usage("need at least two paired test documents"));
    }
    if tx.cols() != ex.cols() || ty.cols() != ey.cols() {
        return Err(Failure::usage(
            "test documents must share the training vocabularies",
        ));
    }
    let (qx, qy) = (
        centered_rows(&tx, &column_means(&ex)),
        centered_rows(&ty, &column_means(&ey)),
    );
    let report =
        cross_view_retrieval(&model, &qx, &qy).map_err(|e| Failure::usage(e.to_string()))?;
    say!("documents = {}, pairs = {}", tx.rows(), model.d());
    say!("zero loadings = {:.2}%", 100.0 * model.zero_fraction());
    say!("average aroc = {:.4}", report.average_aroc);
    let fp = fingerprint(&[
        ("Ex", ex.rows(), ex.cols(), ex.as_slice()),
        ("Ey", ey.rows(), ey.cols(), ey.as_slice()),
    ]);
    let mut rec = ResultRecord::new("retrieve-eval", fp);
    rec.config = args.solver.echo();
    rec.config
        .insert("components".into(), json!(args.components));
    rec.x = model
        .vx
        .iter()
        .zip(&model.vy)
        .map(|(x, y)| x.iter().chain(y).copied().collect())
        .collect();
    rec.objective = model.correlations.clone();
    rec.cardinality = model.cardinalities.iter().map(|(a, b)| a + b).collect();
    rec.iterations = vec![0; model.d()];
    rec.converged = vec![true; model.d()];
    rec.extra
        .insert("average_aroc".into(), json!(report.average_aroc));
    rec.extra.insert("ranks".into(), json!(report.ranks));
    rec.extra
        .insert("zero_fraction".into(), json!(model.zero_fraction()));
    finish(rec, &args.solver)
}
