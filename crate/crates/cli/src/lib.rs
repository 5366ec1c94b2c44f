//! Command-line front end for `unitary-core`.

pub mod render;
pub mod suites;

use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use unitary_core::algebra::{GroupAlgebra, GroupInvolution};
use unitary_core::catalog::{self, sweep_entries};
use unitary_core::unitary::{compute, has_commuting_t_c, DEFAULT_BASE_ORDER, DEFAULT_SEARCH_CAP};
use unitary_core::{parse_field, Char2Options, FieldSpec, Group, MethodChoice};

pub use render::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] unitary_core::Error),
    #[error("unknown suite {0:?}; expected one of thm1, thm2, lemma1, prop1, prop2, cor1, bounds, cayley")]
    UnknownSuite(String),
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(unitary_core::Error::InternalInconsistency(_)) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Formula,
    Recursive,
    Oracle,
}

impl From<MethodArg> for MethodChoice {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => MethodChoice::Auto,
            MethodArg::Formula => MethodChoice::Formula,
            MethodArg::Recursive => MethodChoice::Recursive,
            MethodArg::Oracle => MethodChoice::Oracle,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "unitary-lab", version, about = "Orders of unitary subgroups of modular group algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Browse the group catalog.
    Groups {
        #[command(subcommand)]
        action: GroupsAction,
    },
    /// Compute |V(FG)| for one group over one or more fields.
    Compute(ComputeArgs),
    /// Θ for every catalog 2-group up to --max-order, one column per field.
    ThetaTable(ThetaArgs),
    /// Run a named verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum GroupsAction {
    List(ListArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, default_value_t = DEFAULT_SEARCH_CAP, value_parser = clap::value_parser!(u64).range(1..))]
    pub search_cap: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ListArgs {
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_order: u64,
    /// Restrict to one prime; default lists 2, 3 and 5.
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// Catalog name such as dihedral:8.
    #[arg(long, required_unless_present = "group_file", conflicts_with = "group_file")]
    pub group: Option<String>,
    /// JSON file with {id, n, table}.
    #[arg(long)]
    pub group_file: Option<PathBuf>,
    /// Field as p^m; repeatable.
    #[arg(long, required = true)]
    pub field: Vec<String>,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
    /// "canonical" or a comma-separated permutation of element indices.
    #[arg(long, default_value = "canonical")]
    pub involution: String,
    #[arg(long, default_value_t = 0)]
    pub max_witnesses: usize,
    /// Largest group order handed to the oracle inside the recursion.
    #[arg(long, default_value_t = DEFAULT_BASE_ORDER, value_parser = positive_usize)]
    pub base_order: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ThetaArgs {
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_order: u64,
    #[arg(long, default_values_t = ["2^1".to_string(), "2^2".to_string(), "2^3".to_string()])]
    pub field: Vec<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// One of thm1, thm2, lemma1, prop1, prop2, cor1, bounds, cayley.
    #[arg(long)]
    pub suite: String,
    #[command(flatten)]
    pub common: Common,
}

/// Everything a command needs, resolved from the arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub format: Format,
    pub search_cap: u64,
    pub max_witnesses: usize,
    pub seed: u64,
    pub base_order: usize,
}

impl RunConfig {
    fn from_common(c: &Common) -> RunConfig {
        RunConfig { format: c.format, search_cap: c.search_cap, max_witnesses: 0, seed: c.seed, base_order: DEFAULT_BASE_ORDER }
    }

    pub fn char2(&self) -> Char2Options {
        Char2Options { base_order: self.base_order, search_cap: self.search_cap, central_choice: None }
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn fields(literals: &[String]) -> CliResult<Vec<Arc<FieldSpec>>> {
    literals
        .iter()
        .map(|l| parse_field(l).map(Arc::new).map_err(|e| CliError::Usage(format!("--field {l}: {e}"))))
        .collect()
}

fn load_group(args: &ComputeArgs) -> CliResult<Arc<Group>> {
    let group = match (&args.group, &args.group_file) {
        (Some(name), _) => catalog::build(name).map_err(|e| CliError::Usage(format!("--group {name}: {e}")))?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("--group-file {}: {e}", path.display())))?;
            Group::from_json(&text).map_err(|e| CliError::Usage(format!("--group-file {}: {e}", path.display())))?
        }
        (None, None) => return Err(CliError::Usage("one of --group or --group-file is required".into())),
    };
    Ok(Arc::new(group))
}

fn involution(group: &Arc<Group>, spec: &str) -> CliResult<GroupInvolution> {
    if spec == "canonical" {
        return Ok(GroupInvolution::canonical_star(group));
    }
    let sigma = spec
        .trim_matches(|c| c == '[' || c == ']')
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("--involution {spec}: {e}")))?;
    GroupInvolution::from_map(group, sigma).map_err(|e| CliError::Usage(format!("--involution {spec}: {e}")))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

pub fn cmd_groups_list(args: &ListArgs) -> CliResult<Vec<Value>> {
    let primes = match args.p {
        Some(p) if unitary_core::field::is_prime(p) => vec![p],
        Some(p) => return Err(CliError::Usage(format!("--p {p} is not prime"))),
        None => vec![2, 3, 5],
    };
    let mut out = Vec::new();
    for p in primes {
        for e in sweep_entries(args.max_order as usize, p) {
            let g = e.build()?;
            out.push(json!({
                "name": e.name,
                "order": g.order(),
                "p": p,
                "abelian": g.is_abelian(),
                "involution_solutions": g.involution_solutions().len(),
                "squares_of_exponent_two": g.squares_of_exponent_two().len(),
                "central_involutions": g.central_involutions().len(),
                "expected_theta": e.expected.theta,
            }));
        }
    }
    Ok(out)
}

pub fn cmd_compute(args: &ComputeArgs) -> CliResult<Vec<Value>> {
    let group = load_group(args)?;
    let inv = involution(&group, &args.involution)?;
    let config = RunConfig {
        max_witnesses: args.max_witnesses,
        base_order: args.base_order,
        ..RunConfig::from_common(&args.common)
    };
    let mut out = Vec::new();
    for field in fields(&args.field)? {
        let algebra = GroupAlgebra::new(field, Arc::clone(&group)).map_err(|e| CliError::Usage(e.to_string()))?;
        let result = compute(&algebra, &inv, args.method.into(), &config.char2())?;
        out.push(to_value(&result.with_witnesses(&algebra, config.max_witnesses)));
    }
    Ok(out)
}

pub fn cmd_theta_table(args: &ThetaArgs) -> CliResult<Vec<Value>> {
    let fields = fields(&args.field)?;
    if let Some(f) = fields.iter().find(|f| f.characteristic() != 2) {
        return Err(CliError::Usage(format!("theta-table needs characteristic 2, got {f}")));
    }
    let config = RunConfig::from_common(&args.common);
    let mut out = Vec::new();
    for e in sweep_entries(args.max_order as usize, 2) {
        let group = Arc::new(e.build()?);
        let star = GroupInvolution::canonical_star(&group);
        let mut row = serde_json::Map::new();
        row.insert("group".into(), json!(e.name));
        row.insert("order".into(), json!(group.order()));
        let mut values = Vec::new();
        let mut notes = Vec::new();
        for field in &fields {
            let algebra = GroupAlgebra::new(Arc::clone(field), Arc::clone(&group))?;
            let cell = match compute(&algebra, &star, MethodChoice::Auto, &config.char2()) {
                Ok(r) => {
                    let theta = r.theta.expect("characteristic 2").to_string();
                    values.push(theta.clone());
                    theta
                }
                Err(err @ unitary_core::Error::SearchSpaceTooLarge { .. }) => {
                    notes.push(format!("{}: {err}", field.literal()));
                    "—".to_string()
                }
                Err(err) => return Err(err.into()),
            };
            row.insert(format!("theta[{}]", field.literal()), json!(cell));
        }
        let commuting = has_commuting_t_c(&group);
        let agree = if values.len() < 2 {
            "n/a"
        } else if values.windows(2).all(|w| w[0] == w[1]) {
            "yes"
        } else {
            "no"
        };
        if commuting && agree == "no" {
            return Err(unitary_core::Error::InternalInconsistency(format!("Θ depends on the field for {}", e.name)).into());
        }
        row.insert("t_c_commuting".into(), json!(if commuting { "yes" } else { "no" }));
        row.insert("agree".into(), json!(agree));
        row.insert("notes".into(), json!(notes.join("; ")));
        out.push(Value::Object(row));
    }
    Ok(out)
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<(Vec<Value>, usize)> {
    let config = RunConfig::from_common(&args.common);
    let checks = suites::run_suite(&args.suite, &config)?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    Ok((checks.iter().map(to_value).collect(), failed))
}

/// Output text and exit status of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn threads_from_env() {
    if let Some(n) = std::env::var("UNITARY_LAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            };
        }
    };
    threads_from_env();
    let (result, format) = match &cli.command {
        Command::Groups { action: GroupsAction::List(a) } => (cmd_groups_list(a).map(|r| (r, 0)), a.format),
        Command::Compute(a) => (cmd_compute(a).map(|r| (r, 0)), a.common.format),
        Command::ThetaTable(a) => (cmd_theta_table(a).map(|r| (r, 0)), a.common.format),
        Command::Verify(a) => (cmd_verify(a), a.common.format),
    };
    match result {
        Ok((records, failed)) => {
            let stdout = render::render(&records, format);
            if failed > 0 {
                let err = CliError::ChecksFailed(failed);
                Outcome { stdout, stderr: format!("error: {err}\n"), code: err.exit_code() }
            } else {
                Outcome { stdout, stderr: String::new(), code: 0 }
            }
        }
        Err(err) => Outcome { stdout: String::new(), stderr: format!("error: {err}\n"), code: err.exit_code() },
    }
}
