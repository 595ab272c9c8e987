//! `empkl` — evaluate, invert, and certify finite-sample concentration
//! bounds for the empirical relative entropy of multinomial samples.
//!
//! Exit codes: 0 success, 1 a certified inequality was violated,
//! 2 usage or domain error. Reports go to stdout (JSON by default, CSV
//! with `--format csv`); human-readable diagnostics go to stderr.

mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use empkl::bounds::{self, BoundSide};
use empkl::inversion;
use empkl::montecarlo::{self, McSweepCell, McSweepConfig};
use empkl::verify::{self, CheckReport};
use empkl::{CountVector, ProbabilityVector};
use report::{fmt_f64, CsvShape, Report, Val};
use std::io::IsTerminal;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "empkl", version, about = "Concentration bounds for the empirical relative entropy of multinomial samples", max_term_width = 100)]
struct Cli {
    /// Report format on stdout
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for enumeration and sampling (default: machine
    /// parallelism). Results are bit-identical for any value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Upper,
    Lower,
    TwoSided,
}

impl SideArg {
    fn to_bound_side(self) -> BoundSide {
        match self {
            SideArg::Upper => BoundSide::Upper,
            SideArg::Lower => BoundSide::Lower,
            SideArg::TwoSided => BoundSide::TwoSided,
        }
    }

    fn as_str(self) -> &'static str {
        self.to_bound_side().as_str()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a closed-form bound
    Bound {
        #[command(subcommand)]
        which: BoundCmd,
    },
    /// Evaluate the subgamma envelope B(t) and its relaxations
    Envelope {
        /// MGF argument, t < 1
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Invert a bound into a confidence radius or a sample size
    Invert {
        #[command(subcommand)]
        which: InvertCmd,
    },
    /// Finite-sample valid hypothesis tests
    Test {
        #[command(subcommand)]
        which: TestCmd,
    },
    /// Certification engines (exit 1 on any violated inequality)
    Verify {
        #[command(subcommand)]
        which: VerifyCmd,
    },
    /// Sweep one parameter of a quantity and emit a plot-ready table
    Curve(CurveArgs),
}

#[derive(Subcommand)]
enum BoundCmd {
    /// Centered log-MGF bound at argument t < n/2
    Mgf {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Tail deviation bound at ε with its relaxation chain
    Tail {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum)]
        side: SideArg,
    },
    /// (2m)-th central moment bound, plus the variance and q-norm bounds
    Moment {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: u32,
        /// Norm order for the q-norm bound (default 2m)
        #[arg(long)]
        q: Option<f64>,
    },
    /// Mean upper bound ln(1 + (k−1)/n) and its linear relaxation
    Mean {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
    },
    /// Method-of-types tail bound C(n+k−1, k−1)·e^{−nε}
    Types {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
    },
    /// Certified two-sided bound 2·exp(−min{n²ε²/(k−1), nε}/48)
    Conjecture {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
    },
}

#[derive(Subcommand)]
enum InvertCmd {
    /// Smallest ε with the selected tail bound ≤ δ
    Radius {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum)]
        side: SideArg,
    },
    /// Smallest n with the selected tail bound at (n, k, ε) ≤ δ
    Samplesize {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum)]
        side: SideArg,
    },
}

#[derive(Subcommand)]
enum TestCmd {
    /// Goodness-of-fit test of observed counts against a hypothesized
    /// distribution; the p-value is finite-sample valid
    Gof(GofArgs),
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("counts_src").required(true).args(["counts", "counts_file"])))]
#[command(group(clap::ArgGroup::new("p_src").required(true).args(["p", "p_file"])))]
struct GofArgs {
    /// Observed counts, comma-separated (e.g. 8,2)
    #[arg(long)]
    counts: Option<String>,
    /// File with one count per line
    #[arg(long)]
    counts_file: Option<PathBuf>,
    /// Hypothesized probabilities, comma-separated (e.g. 0.5,0.5)
    #[arg(long)]
    p: Option<String>,
    /// File with one probability per line
    #[arg(long)]
    p_file: Option<PathBuf>,
    /// Rescale the probabilities to sum to 1
    #[arg(long)]
    renormalize: bool,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Exact-oracle certification: MGF, tails, moments/mean/variance, and
    /// the MGF integral representation, over an exhaustive small-case sweep
    Exact {
        #[arg(long, default_value_t = 12)]
        max_n: u64,
        /// Alphabet sizes, comma-separated
        #[arg(long, default_value = "2,3")]
        k: String,
        #[arg(long, default_value_t = 50)]
        t_points: usize,
        #[arg(long, default_value_t = 50)]
        eps_points: usize,
        #[arg(long, default_value_t = 3.0)]
        eps_max: f64,
        #[arg(long, default_value_t = 3)]
        m_max: u32,
    },
    /// Exponential stochastic-domination margins and the subgamma envelope
    Dominance {
        #[arg(long, default_value_t = 200)]
        max_n: u64,
        #[arg(long, default_value_t = 25)]
        t_points: usize,
    },
    /// Multinomial→binomial product reduction
    Reduction {
        #[arg(long, default_value_t = 8)]
        max_n: u64,
        #[arg(long, default_value = "2,3")]
        k: String,
        #[arg(long, default_value_t = 20)]
        t_points: usize,
        #[arg(long, default_value_t = 3)]
        dists: usize,
    },
    /// Monte Carlo check: Clopper–Pearson lower limits of tail estimates
    /// must not exceed the closed-form bounds
    Mc {
        #[arg(long, default_value_t = 1000)]
        n: u64,
        #[arg(long, default_value_t = 100)]
        k: usize,
        /// Probabilities, comma-separated (default: uniform on k cells)
        #[arg(long)]
        p: Option<String>,
        /// Rescale --p to sum to 1
        #[arg(long)]
        renormalize: bool,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        /// Master seed (required: runs are never implicitly nondeterministic)
        #[arg(long)]
        seed: u64,
        /// Deviations ε, comma-separated (default: 10 points over [0, 0.45])
        #[arg(long)]
        eps: Option<String>,
        #[arg(long, default_value_t = 0.999)]
        confidence: f64,
        /// Multiplies every bound before comparison (self-test hook)
        #[arg(long, default_value_t = 1.0)]
        bound_scale: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Quantity {
    TailUpper,
    TailLower,
    Mgf,
    Envelope,
    Types,
    Conjecture,
    Moment,
    Mean,
    Variance,
    Qnorm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ParamName {
    Eps,
    T,
    N,
    K,
    M,
    Q,
}

impl ParamName {
    fn is_integer(self) -> bool {
        matches!(self, ParamName::N | ParamName::K | ParamName::M)
    }

    fn as_str(self) -> &'static str {
        match self {
            ParamName::Eps => "eps",
            ParamName::T => "t",
            ParamName::N => "n",
            ParamName::K => "k",
            ParamName::M => "m",
            ParamName::Q => "q",
        }
    }
}

#[derive(Args)]
struct CurveArgs {
    /// Quantity to sweep
    #[arg(long, value_enum)]
    quantity: Quantity,
    /// Which parameter varies
    #[arg(long, value_enum)]
    param: ParamName,
    #[arg(long, allow_hyphen_values = true)]
    start: f64,
    #[arg(long, allow_hyphen_values = true)]
    stop: f64,
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    q: Option<f64>,
}

enum CliError {
    Usage(String),
    Core(empkl::Error),
    Io(String),
}

impl From<empkl::Error> for CliError {
    fn from(e: empkl::Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult = Result<(Report, i32), CliError>;

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    run_with_threads(cli.threads, || {
        match dispatch(&cli.command) {
            Ok((report, code)) => {
                let rendered = match cli.format {
                    Format::Json => report.to_json(),
                    Format::Csv => report.to_csv(),
                };
                print!("{rendered}");
                code
            }
            Err(CliError::Usage(msg)) => {
                eprintln!("error: {msg}");
                2
            }
            Err(CliError::Core(e)) => {
                eprintln!("error: {e}");
                2
            }
            Err(CliError::Io(msg)) => {
                eprintln!("error: {msg}");
                2
            }
        }
    })
}

#[cfg(feature = "parallel")]
fn run_with_threads(threads: Option<usize>, f: impl FnOnce() -> i32 + Send) -> i32 {
    match threads {
        None => f(),
        Some(0) => {
            eprintln!("error: --threads must be ≥ 1");
            2
        }
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(f),
            Err(e) => {
                eprintln!("error: failed to build thread pool: {e}");
                2
            }
        },
    }
}

#[cfg(not(feature = "parallel"))]
fn run_with_threads(threads: Option<usize>, f: impl FnOnce() -> i32) -> i32 {
    if matches!(threads, Some(w) if w > 1) {
        eprintln!("note: built without the parallel feature; running on one thread");
    }
    f()
}

fn dispatch(command: &Command) -> CliResult {
    match command {
        Command::Bound { which } => bound_cmd(which),
        Command::Envelope { t } => envelope_cmd(*t),
        Command::Invert { which } => invert_cmd(which),
        Command::Test { which } => match which {
            TestCmd::Gof(args) => gof_cmd(args),
        },
        Command::Verify { which } => verify_cmd(which),
        Command::Curve(args) => curve_cmd(args),
    }
}

fn bound_cmd(cmd: &BoundCmd) -> CliResult {
    match *cmd {
        BoundCmd::Mgf { n, k, t } => {
            let bound = bounds::mgf_bound(n, k, t)?;
            Ok((
                Report::flat(
                    "bound mgf",
                    vec![("n", Val::U(n)), ("k", Val::U(k as u64)), ("t", Val::F(t))],
                    vec![
                        ("bound", Val::F(bound)),
                        (
                            "quadratic_branch",
                            Val::F(bounds::mgf_bound_quadratic_branch(n, k, t)),
                        ),
                        (
                            "gamma_branch",
                            Val::F(bounds::mgf_bound_gamma_branch(n, k, t)),
                        ),
                    ],
                ),
                0,
            ))
        }
        BoundCmd::Tail { n, k, eps, side } => {
            let r = tail_report(n, k, eps, side)?;
            Ok((
                Report::flat(
                    "bound tail",
                    vec![
                        ("n", Val::U(n)),
                        ("k", Val::U(k as u64)),
                        ("eps", Val::F(eps)),
                        ("side", Val::S(side.as_str().to_string())),
                    ],
                    vec![
                        ("primary", Val::F(r.0)),
                        ("relaxed_quadratic", Val::F(r.1)),
                        ("relaxed_minform", Val::F(r.2)),
                    ],
                ),
                0,
            ))
        }
        BoundCmd::Moment { n, k, m, q } => {
            let q = q.unwrap_or(2.0 * m as f64);
            Ok((
                Report::flat(
                    "bound moment",
                    vec![
                        ("n", Val::U(n)),
                        ("k", Val::U(k as u64)),
                        ("m", Val::U(m as u64)),
                        ("q", Val::F(q)),
                    ],
                    vec![
                        ("central_moment_bound", Val::F(bounds::moment_bound(n, k, m)?)),
                        ("variance_bound", Val::F(bounds::variance_bound(n, k))),
                        ("qnorm_bound", Val::F(bounds::qnorm_bound(n, k, q)?)),
                    ],
                ),
                0,
            ))
        }
        BoundCmd::Mean { n, k } => Ok((
            Report::flat(
                "bound mean",
                vec![("n", Val::U(n)), ("k", Val::U(k as u64))],
                vec![
                    ("log_form", Val::F(bounds::mean_upper_bound(n, k))),
                    ("linear_form", Val::F(bounds::mean_upper_bound_linear(n, k))),
                ],
            ),
            0,
        )),
        BoundCmd::Types { n, k, eps } => Ok((
            Report::flat(
                "bound types",
                vec![
                    ("n", Val::U(n)),
                    ("k", Val::U(k as u64)),
                    ("eps", Val::F(eps)),
                ],
                vec![("value", Val::F(bounds::types_bound(n, k, eps)?))],
            ),
            0,
        )),
        BoundCmd::Conjecture { n, k, eps } => Ok((
            Report::flat(
                "bound conjecture",
                vec![
                    ("n", Val::U(n)),
                    ("k", Val::U(k as u64)),
                    ("eps", Val::F(eps)),
                ],
                vec![("value", Val::F(bounds::conjecture_form_bound(n, k, eps)?))],
            ),
            0,
        )),
    }
}

/// (primary, relaxed_quadratic, relaxed_minform) for a side; the two-sided
/// form sums the one-sided bounds and clamps at 1.
fn tail_report(n: u64, k: usize, eps: f64, side: SideArg) -> Result<(f64, f64, f64), CliError> {
    Ok(match side {
        SideArg::Upper => {
            let r = bounds::upper_tail_bound(n, k, eps)?;
            (r.primary, r.relaxed_quadratic, r.relaxed_minform)
        }
        SideArg::Lower => {
            let r = bounds::lower_tail_bound(n, k, eps)?;
            (r.primary, r.relaxed_quadratic, r.relaxed_minform)
        }
        SideArg::TwoSided => {
            let up = bounds::upper_tail_bound(n, k, eps)?;
            let lo = bounds::lower_tail_bound(n, k, eps)?;
            (
                (up.primary + lo.primary).min(1.0),
                (up.relaxed_quadratic + lo.relaxed_quadratic).min(1.0),
                (up.relaxed_minform + lo.relaxed_minform).min(1.0),
            )
        }
    })
}

fn envelope_cmd(t: f64) -> CliResult {
    Ok((
        Report::flat(
            "envelope",
            vec![("t", Val::F(t))],
            vec![
                ("envelope", Val::F(bounds::subgamma_envelope(t)?)),
                (
                    "relaxation_ratio",
                    Val::F(bounds::envelope_relaxation_ratio(t)?),
                ),
                (
                    "relaxation_gamma",
                    Val::F(bounds::envelope_relaxation_gamma(t)?),
                ),
            ],
        ),
        0,
    ))
}

fn invert_cmd(cmd: &InvertCmd) -> CliResult {
    match *cmd {
        InvertCmd::Radius { n, k, delta, side } => {
            let r = inversion::confidence_radius(n, k, delta, side.to_bound_side())?;
            Ok((
                Report::flat(
                    "invert radius",
                    vec![
                        ("n", Val::U(n)),
                        ("k", Val::U(k as u64)),
                        ("delta", Val::F(delta)),
                        ("side", Val::S(side.as_str().to_string())),
                    ],
                    vec![
                        ("radius", Val::F(r.radius)),
                        ("achieved_bound", Val::F(r.achieved_bound)),
                        ("iterations", Val::U(r.iterations as u64)),
                    ],
                ),
                0,
            ))
        }
        InvertCmd::Samplesize {
            k,
            eps,
            delta,
            side,
        } => {
            let n = inversion::sample_size(k, eps, delta, side.to_bound_side())?;
            Ok((
                Report::flat(
                    "invert samplesize",
                    vec![
                        ("k", Val::U(k as u64)),
                        ("eps", Val::F(eps)),
                        ("delta", Val::F(delta)),
                        ("side", Val::S(side.as_str().to_string())),
                    ],
                    vec![("n", Val::U(n))],
                ),
                0,
            ))
        }
    }
}

fn gof_cmd(args: &GofArgs) -> CliResult {
    let counts: Vec<u64> = match (&args.counts, &args.counts_file) {
        (Some(inline), None) => parse_list(inline, "counts")?,
        (None, Some(path)) => parse_lines(path, "counts")?,
        _ => unreachable!("clap group enforces exactly one source"),
    };
    let probs: Vec<f64> = match (&args.p, &args.p_file) {
        (Some(inline), None) => parse_list(inline, "p")?,
        (None, Some(path)) => parse_lines(path, "p")?,
        _ => unreachable!("clap group enforces exactly one source"),
    };
    let x = CountVector::new(counts.clone())?;
    let p0 = if args.renormalize {
        ProbabilityVector::new_renormalized(probs)?
    } else {
        ProbabilityVector::new(probs)?
    };
    let g = inversion::gof_pvalue(&x, &p0)?;
    Ok((
        Report::flat(
            "test gof",
            vec![
                ("n", Val::U(x.n())),
                ("k", Val::U(x.k() as u64)),
                (
                    "counts",
                    Val::Arr(counts.iter().map(|&c| Val::U(c)).collect()),
                ),
                (
                    "p",
                    Val::Arr(p0.probs().iter().map(|&p| Val::F(p)).collect()),
                ),
                ("renormalize", Val::B(args.renormalize)),
            ],
            vec![
                ("statistic", Val::F(g.statistic)),
                ("lr_statistic", Val::F(g.lr_statistic)),
                ("pvalue_types", Val::F(g.pvalue_types)),
                ("pvalue_centered", Val::F(g.pvalue_centered)),
                ("pvalue", Val::F(g.pvalue)),
            ],
        ),
        0,
    ))
}

fn verify_cmd(cmd: &VerifyCmd) -> CliResult {
    match cmd {
        VerifyCmd::Exact {
            max_n,
            k,
            t_points,
            eps_points,
            eps_max,
            m_max,
        } => {
            let ks = parse_list::<usize>(k, "k")?;
            let checks = vec![
                timed_check(|| verify::certify_mgf(*max_n, &ks, *t_points)),
                timed_check(|| verify::certify_tails(*max_n, &ks, *eps_points, *eps_max)),
                timed_check(|| verify::certify_moments(*max_n, &ks, *m_max)),
                timed_check(|| verify::certify_representation(*max_n, &ks)),
            ];
            let inputs = vec![
                ("max_n", Val::U(*max_n)),
                ("k", Val::Arr(ks.iter().map(|&k| Val::U(k as u64)).collect())),
                ("t_points", Val::U(*t_points as u64)),
                ("eps_points", Val::U(*eps_points as u64)),
                ("eps_max", Val::F(*eps_max)),
                ("m_max", Val::U(*m_max as u64)),
            ];
            Ok(check_suite_report("verify exact", inputs, checks, None))
        }
        VerifyCmd::Dominance { max_n, t_points } => {
            let grid = verify::default_p_grid();
            let checks = vec![
                timed_check(|| verify::certify_domination(*max_n, &grid)),
                timed_check(|| verify::certify_envelope(*max_n, &grid, *t_points)),
            ];
            let inputs = vec![
                ("max_n", Val::U(*max_n)),
                ("t_points", Val::U(*t_points as u64)),
                (
                    "p_grid",
                    Val::Arr(grid.iter().map(|&p| Val::F(p)).collect()),
                ),
            ];
            Ok(check_suite_report("verify dominance", inputs, checks, None))
        }
        VerifyCmd::Reduction {
            max_n,
            k,
            t_points,
            dists,
        } => {
            let ks = parse_list::<usize>(k, "k")?;
            let checks = vec![timed_check(|| {
                verify::certify_reduction(*max_n, &ks, *t_points, *dists)
            })];
            let inputs = vec![
                ("max_n", Val::U(*max_n)),
                ("k", Val::Arr(ks.iter().map(|&k| Val::U(k as u64)).collect())),
                ("t_points", Val::U(*t_points as u64)),
                ("dists", Val::U(*dists as u64)),
            ];
            Ok(check_suite_report("verify reduction", inputs, checks, None))
        }
        VerifyCmd::Mc {
            n,
            k,
            p,
            renormalize,
            trials,
            seed,
            eps,
            confidence,
            bound_scale,
        } => {
            let p = match p {
                Some(inline) => {
                    let entries = parse_list(inline, "p")?;
                    if *renormalize {
                        ProbabilityVector::new_renormalized(entries)?
                    } else {
                        ProbabilityVector::new(entries)?
                    }
                }
                None => ProbabilityVector::uniform(*k)?,
            };
            if p.k() != *k {
                return Err(CliError::Usage(format!(
                    "--p has {} entries but --k is {k}",
                    p.k()
                )));
            }
            let eps_grid: Vec<f64> = match eps {
                Some(inline) => parse_list(inline, "eps")?,
                None => verify::linspace(0.0, 0.45, 10),
            };
            let config = McSweepConfig {
                cells: vec![McSweepCell {
                    n: *n,
                    p: p.clone(),
                    eps_grid: eps_grid.clone(),
                }],
                trials: *trials,
                seed: *seed,
                confidence: *confidence,
                bound_scale: *bound_scale,
            };
            let start = Instant::now();
            let mc = montecarlo::verify_bounds_mc(&config)?;
            let elapsed = start.elapsed().as_secs_f64();
            let status = if mc.passed() { "PASS" } else { "FAIL" };
            eprintln!(
                "{} mc: cells={} violations={} ({elapsed:.2}s)",
                paint(status, mc.passed()),
                mc.results.len(),
                mc.violations,
            );

            let columns = [
                "n", "k", "eps", "threshold", "bound", "point", "ci_low", "ci_high", "margin",
                "violated",
            ];
            let rows: Vec<Vec<Val>> = mc
                .results
                .iter()
                .map(|r| {
                    vec![
                        Val::U(r.n),
                        Val::U(r.k as u64),
                        Val::F(r.eps),
                        Val::F(r.threshold),
                        Val::F(r.bound),
                        Val::F(r.estimate.point),
                        Val::F(r.estimate.ci_low),
                        Val::F(r.estimate.ci_high),
                        Val::F(r.margin),
                        Val::B(r.violated),
                    ]
                })
                .collect();
            let cells_json: Vec<Val> = rows
                .iter()
                .map(|row| {
                    Val::Obj(
                        columns
                            .iter()
                            .zip(row.iter().cloned())
                            .map(|(&name, v)| (name, v))
                            .collect(),
                    )
                })
                .collect();
            let report = Report {
                command: "verify mc".to_string(),
                inputs: vec![
                    ("n", Val::U(*n)),
                    ("k", Val::U(*k as u64)),
                    ("trials", Val::U(*trials)),
                    ("confidence", Val::F(*confidence)),
                    ("bound_scale", Val::F(*bound_scale)),
                    (
                        "eps",
                        Val::Arr(eps_grid.iter().map(|&e| Val::F(e)).collect()),
                    ),
                ],
                outputs: vec![
                    ("passed", Val::B(mc.passed())),
                    ("violations", Val::U(mc.violations as u64)),
                    ("cells", Val::Arr(cells_json)),
                ],
                seed: Some(*seed),
                csv: CsvShape::Table {
                    columns: columns.iter().map(|s| s.to_string()).collect(),
                    rows,
                },
            };
            Ok((report, if mc.passed() { 0 } else { 1 }))
        }
    }
}

fn timed_check(run: impl FnOnce() -> CheckReport) -> CheckReport {
    let start = Instant::now();
    let report = run();
    let elapsed = start.elapsed().as_secs_f64();
    let status = if report.passed() { "PASS" } else { "FAIL" };
    eprintln!(
        "{} {}: cells={} worst_margin={} violations={} ({elapsed:.2}s)",
        paint(status, report.passed()),
        report.name,
        report.cells,
        fmt_f64(report.worst_margin),
        report.violations.len(),
    );
    report
}

fn check_suite_report(
    command: &str,
    inputs: Vec<(&'static str, Val)>,
    checks: Vec<CheckReport>,
    seed: Option<u64>,
) -> (Report, i32) {
    let passed = checks.iter().all(CheckReport::passed);
    let columns = ["check", "cells", "worst_margin", "violations"];
    let rows: Vec<Vec<Val>> = checks
        .iter()
        .map(|c| {
            vec![
                Val::S(c.name.to_string()),
                Val::U(c.cells),
                Val::F(c.worst_margin),
                Val::U(c.violations.len() as u64),
            ]
        })
        .collect();
    let checks_json: Vec<Val> = checks
        .iter()
        .map(|c| {
            let detail: Vec<Val> = c
                .violations
                .iter()
                .take(10)
                .map(|v| {
                    Val::Obj(vec![
                        ("context", Val::S(v.context.clone())),
                        ("lhs", Val::F(v.lhs)),
                        ("rhs", Val::F(v.rhs)),
                    ])
                })
                .collect();
            Val::Obj(vec![
                ("name", Val::S(c.name.to_string())),
                ("cells", Val::U(c.cells)),
                ("worst_margin", Val::F(c.worst_margin)),
                ("violations", Val::U(c.violations.len() as u64)),
                ("detail", Val::Arr(detail)),
            ])
        })
        .collect();
    let report = Report {
        command: command.to_string(),
        inputs,
        outputs: vec![
            ("passed", Val::B(passed)),
            ("checks", Val::Arr(checks_json)),
        ],
        seed,
        csv: CsvShape::Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows,
        },
    };
    (report, if passed { 0 } else { 1 })
}

fn curve_cmd(args: &CurveArgs) -> CliResult {
    let needed: &[ParamName] = match args.quantity {
        Quantity::TailUpper | Quantity::TailLower | Quantity::Types | Quantity::Conjecture => {
            &[ParamName::N, ParamName::K, ParamName::Eps]
        }
        Quantity::Mgf => &[ParamName::N, ParamName::K, ParamName::T],
        Quantity::Envelope => &[ParamName::T],
        Quantity::Moment => &[ParamName::N, ParamName::K, ParamName::M],
        Quantity::Mean | Quantity::Variance => &[ParamName::N, ParamName::K],
        Quantity::Qnorm => &[ParamName::N, ParamName::K, ParamName::Q],
    };
    if !needed.contains(&args.param) {
        return Err(CliError::Usage(format!(
            "this quantity cannot be swept over --param {}",
            args.param.as_str()
        )));
    }
    // every non-swept parameter of the quantity must be fixed on the line
    let mut point = Point {
        n: args.n,
        k: args.k,
        eps: args.eps,
        t: args.t,
        m: args.m,
        q: args.q,
    };
    for &p in needed {
        if p != args.param && !point.is_set(p) {
            return Err(CliError::Usage(format!(
                "missing --{} (fixed parameter for this quantity)",
                p.as_str()
            )));
        }
    }
    if args.points == 0 {
        return Err(CliError::Usage("--points must be ≥ 1".to_string()));
    }

    let grid = sweep_grid(args.param, args.start, args.stop, args.points)?;
    let value_columns = curve_columns(args.quantity);
    let mut columns = vec![args.param.as_str().to_string()];
    columns.extend(value_columns.iter().map(|s| s.to_string()));

    let mut rows: Vec<Vec<Val>> = Vec::with_capacity(grid.len());
    for &x in &grid {
        point.set(args.param, x);
        let values = eval_quantity(args.quantity, &point)?;
        let mut row = vec![if args.param.is_integer() {
            Val::U(x as u64)
        } else {
            Val::F(x)
        }];
        row.extend(values.into_iter().map(Val::F));
        rows.push(row);
    }

    let rows_json: Vec<Val> = rows.iter().map(|r| Val::Arr(r.clone())).collect();
    let report = Report {
        command: "curve".to_string(),
        inputs: vec![
            (
                "quantity",
                Val::S(
                    args.quantity
                        .to_possible_value()
                        .expect("skipped variants do not reach here")
                        .get_name()
                        .to_string(),
                ),
            ),
            ("param", Val::S(args.param.as_str().to_string())),
            ("start", Val::F(args.start)),
            ("stop", Val::F(args.stop)),
            ("points", Val::U(args.points as u64)),
            ("n", opt_u64(args.n)),
            ("k", opt_u64(args.k.map(|k| k as u64))),
            ("eps", opt_f64(args.eps)),
            ("t", opt_f64(args.t)),
            ("m", opt_u64(args.m.map(|m| m as u64))),
            ("q", opt_f64(args.q)),
        ],
        outputs: vec![
            (
                "columns",
                Val::Arr(columns.iter().map(|c| Val::S(c.clone())).collect()),
            ),
            ("rows", Val::Arr(rows_json)),
        ],
        seed: None,
        csv: CsvShape::Table { columns, rows },
    };
    Ok((report, 0))
}

fn opt_u64(v: Option<u64>) -> Val {
    v.map_or(Val::Null, Val::U)
}

fn opt_f64(v: Option<f64>) -> Val {
    v.map_or(Val::Null, Val::F)
}

struct Point {
    n: Option<u64>,
    k: Option<usize>,
    eps: Option<f64>,
    t: Option<f64>,
    m: Option<u32>,
    q: Option<f64>,
}

impl Point {
    fn is_set(&self, p: ParamName) -> bool {
        match p {
            ParamName::N => self.n.is_some(),
            ParamName::K => self.k.is_some(),
            ParamName::Eps => self.eps.is_some(),
            ParamName::T => self.t.is_some(),
            ParamName::M => self.m.is_some(),
            ParamName::Q => self.q.is_some(),
        }
    }

    fn set(&mut self, p: ParamName, x: f64) {
        match p {
            ParamName::N => self.n = Some(x as u64),
            ParamName::K => self.k = Some(x as usize),
            ParamName::Eps => self.eps = Some(x),
            ParamName::T => self.t = Some(x),
            ParamName::M => self.m = Some(x as u32),
            ParamName::Q => self.q = Some(x),
        }
    }
}

fn sweep_grid(param: ParamName, start: f64, stop: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if param.is_integer() {
        if start < 1.0 || stop < start || start.fract() != 0.0 || stop.fract() != 0.0 {
            return Err(CliError::Usage(format!(
                "--param {} sweeps integers: --start/--stop must be integers ≥ 1",
                param.as_str()
            )));
        }
        let mut grid: Vec<f64> = verify::linspace(start, stop, points)
            .into_iter()
            .map(f64::round)
            .collect();
        grid.dedup();
        Ok(grid)
    } else {
        Ok(verify::linspace(start, stop, points))
    }
}

fn curve_columns(q: Quantity) -> &'static [&'static str] {
    match q {
        Quantity::TailUpper => &["primary", "relaxed_quadratic", "relaxed_minform"],
        Quantity::TailLower => &["primary", "relaxed_quadratic"],
        Quantity::Mgf => &["bound", "quadratic_branch", "gamma_branch"],
        Quantity::Envelope => &["envelope", "relaxation_ratio", "relaxation_gamma"],
        Quantity::Types | Quantity::Conjecture | Quantity::Variance | Quantity::Qnorm => &["value"],
        Quantity::Moment => &["value"],
        Quantity::Mean => &["log_form", "linear_form"],
    }
}

fn eval_quantity(q: Quantity, p: &Point) -> Result<Vec<f64>, CliError> {
    let n = p.n.unwrap_or(1);
    let k = p.k.unwrap_or(1);
    Ok(match q {
        Quantity::TailUpper => {
            let r = bounds::upper_tail_bound(n, k, p.eps.unwrap())?;
            vec![r.primary, r.relaxed_quadratic, r.relaxed_minform]
        }
        Quantity::TailLower => {
            let r = bounds::lower_tail_bound(n, k, p.eps.unwrap())?;
            vec![r.primary, r.relaxed_quadratic]
        }
        Quantity::Mgf => {
            let t = p.t.unwrap();
            vec![
                bounds::mgf_bound(n, k, t)?,
                bounds::mgf_bound_quadratic_branch(n, k, t),
                bounds::mgf_bound_gamma_branch(n, k, t),
            ]
        }
        Quantity::Envelope => {
            let t = p.t.unwrap();
            vec![
                bounds::subgamma_envelope(t)?,
                bounds::envelope_relaxation_ratio(t)?,
                bounds::envelope_relaxation_gamma(t)?,
            ]
        }
        Quantity::Types => vec![bounds::types_bound(n, k, p.eps.unwrap())?],
        Quantity::Conjecture => vec![bounds::conjecture_form_bound(n, k, p.eps.unwrap())?],
        Quantity::Moment => vec![bounds::moment_bound(n, k, p.m.unwrap())?],
        Quantity::Mean => vec![
            bounds::mean_upper_bound(n, k),
            bounds::mean_upper_bound_linear(n, k),
        ],
        Quantity::Variance => vec![bounds::variance_bound(n, k)],
        Quantity::Qnorm => vec![bounds::qnorm_bound(n, k, p.q.unwrap())?],
    })
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<T>()
                .map_err(|_| CliError::Usage(format!("cannot parse {what} entry '{t}'")))
        })
        .collect()
}

fn parse_lines<T: std::str::FromStr>(path: &PathBuf, what: &str) -> Result<Vec<T>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    text.lines()
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<T>()
                .map_err(|_| CliError::Usage(format!("cannot parse {what} entry '{t}'")))
        })
        .collect()
}

/// Colors PASS/FAIL on stderr when it is a terminal and NO_COLOR is unset.
fn paint(status: &str, ok: bool) -> String {
    let colored = std::env::var_os("NO_COLOR").is_none() && std::io::stderr().is_terminal();
    if !colored {
        status.to_string()
    } else if ok {
        format!("\x1b[32m{status}\x1b[0m")
    } else {
        format!("\x1b[31m{status}\x1b[0m")
    }
}
