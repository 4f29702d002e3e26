//! Command-line front end for the `mixmono` binary.
//!
//! Config files are INI-style:
//!
//! ```text
//! [system]
//! dim = 1
//! f1 = "x1^2"
//!
//! [domain]
//! x1 = [-1, 1]
//!
//! [options]
//! epsilon = 0
//! slack = 0
//! depth = 1
//! ```
//!
//! Exit codes: 0 success, 1 config or input error, 2 unbounded derivative
//! enclosure, 3 integration blow-up, 4 total variation did not converge.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use crate::decomp::{build_decomposition, refine_bounds, BoundOptions};
use crate::embed::{build_embedding, integrate_embedding};
use crate::error::{Error, Result};
use crate::interval::{BoxDomain, Interval};
use crate::jacbounds::{jacobian_bounds, VectorField};
use crate::jordan::{jordan_split, ScalarFunction, TvOptions};
use crate::numfmt::format_sig9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Text => "text",
            OutputFormat::Csv => "csv",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub epsilon: f64,
    pub slack: f64,
    pub depth: u32,
    pub step: f64,
    pub t_end: f64,
    pub tol: f64,
    pub format: OutputFormat,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { epsilon: 0.0, slack: 1e-9, depth: 0, step: 1e-3, t_end: 1.0, tol: 1e-8, format: OutputFormat::Text }
    }
}

/// Parsed config file. Component expressions are kept as written.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub components: Vec<String>,
    pub domain: Vec<Interval>,
    pub options: RunOptions,
}

fn config_err(line: usize, msg: impl fmt::Display) -> Error {
    Error::Config(format!("line {line}: {msg}"))
}

fn parse_number(s: &str, line: usize) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| config_err(line, format!("'{}' is not a number", s.trim())))
}

fn parse_interval(s: &str, line: usize) -> Result<Interval> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| config_err(line, format!("expected [lo, hi], got '{}'", s.trim())))?;
    let (lo, hi) = inner.split_once(',').ok_or_else(|| config_err(line, "interval needs two endpoints"))?;
    Interval::new(parse_number(lo, line)?, parse_number(hi, line)?).map_err(|e| config_err(line, e))
}

fn unquote(s: &str, line: usize) -> Result<String> {
    let s = s.trim();
    match s.strip_prefix('"').and_then(|r| r.strip_suffix('"')) {
        Some(inner) => Ok(inner.to_string()),
        None if !s.is_empty() && !s.contains('"') => Ok(s.to_string()),
        None => Err(config_err(line, format!("malformed quoted value {s}"))),
    }
}

fn put<T: Clone>(v: &mut Vec<Option<T>>, k: usize, val: T, line: usize) -> Result<()> {
    if v.len() < k {
        v.resize(k, None);
    }
    if v[k - 1].is_some() {
        return Err(config_err(line, "duplicate key"));
    }
    v[k - 1] = Some(val);
    Ok(())
}

/// Drops a trailing `#` or `;` comment outside of quotes.
fn strip_comment(value: &str) -> &str {
    let mut quoted = false;
    for (i, c) in value.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' | ';' if !quoted => return &value[..i],
            _ => {}
        }
    }
    value
}

/// 1-based index from keys like `f3` or `x12`.
fn indexed_key(key: &str, prefix: char) -> Option<usize> {
    key.strip_prefix(prefix)?.parse().ok().filter(|&k| k > 0)
}

impl RunConfig {
    /// Parses and validates config text.
    pub fn parse(text: &str) -> Result<Self> {
        let mut section = String::new();
        let mut dim: Option<usize> = None;
        let mut comps: Vec<Option<String>> = Vec::new();
        let mut domain: Vec<Option<Interval>> = Vec::new();
        let mut options = RunOptions::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') || l.starts_with(';') {
                continue;
            }
            if let Some(name) = l.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                section = name.trim().to_string();
                if !matches!(section.as_str(), "system" | "domain" | "options") {
                    return Err(config_err(line, format!("unknown section [{section}]")));
                }
                continue;
            }
            let (key, value) = l.split_once('=').ok_or_else(|| config_err(line, "expected key = value"))?;
            let key = key.trim();
            let value = strip_comment(value);
            match (section.as_str(), key) {
                ("system", "dim") => {
                    let d: usize = value.trim().parse().map_err(|_| config_err(line, "dim must be a positive integer"))?;
                    dim = Some(d);
                }
                ("system", k) if indexed_key(k, 'f').is_some() => {
                    put(&mut comps, indexed_key(k, 'f').unwrap(), unquote(value, line)?, line)?;
                }
                ("domain", k) if indexed_key(k, 'x').is_some() => {
                    put(&mut domain, indexed_key(k, 'x').unwrap(), parse_interval(value, line)?, line)?;
                }
                ("options", "epsilon") => options.epsilon = parse_number(value, line)?,
                ("options", "slack") => options.slack = parse_number(value, line)?,
                ("options", "depth") => {
                    options.depth = value.trim().parse().map_err(|_| config_err(line, "depth must be a nonnegative integer"))?
                }
                ("options", "step") => options.step = parse_number(value, line)?,
                ("options", "t_end") => options.t_end = parse_number(value, line)?,
                ("options", "tol") => options.tol = parse_number(value, line)?,
                ("options", "format") => options.format = unquote(value, line)?.parse()?,
                ("", _) => return Err(config_err(line, "key outside of any section")),
                (s, k) => return Err(config_err(line, format!("unknown key '{k}' in [{s}]"))),
            }
        }
        let dim = dim.ok_or_else(|| Error::Config("[system] needs dim".into()))?;
        let components = comps
            .into_iter()
            .enumerate()
            .map(|(k, c)| c.ok_or_else(|| Error::Config(format!("missing f{}", k + 1))))
            .collect::<Result<Vec<_>>>()?;
        let domain = domain
            .into_iter()
            .enumerate()
            .map(|(k, c)| c.ok_or_else(|| Error::Config(format!("missing x{}", k + 1))))
            .collect::<Result<Vec<_>>>()?;
        let cfg = RunConfig { dim, components, domain, options };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("dim must be positive".into()));
        }
        if self.components.is_empty() {
            return Err(Error::Config("[system] needs at least f1".into()));
        }
        if self.domain.len() != self.dim {
            return Err(Error::Config(format!("[domain] lists {} variables, dim is {}", self.domain.len(), self.dim)));
        }
        if let Some((k, d)) = self.domain.iter().enumerate().find(|(_, d)| !d.is_finite()) {
            return Err(Error::Config(format!("domain x{} = {} must be finite", k + 1, d)));
        }
        let o = &self.options;
        let checks = [
            (o.epsilon >= 0.0 && o.epsilon.is_finite(), "epsilon must be >= 0"),
            (o.slack >= 0.0 && o.slack.is_finite(), "slack must be >= 0"),
            (o.step > 0.0 && o.step.is_finite(), "step must be > 0"),
            (o.t_end >= 0.0 && o.t_end.is_finite(), "t_end must be >= 0"),
            (o.tol > 0.0 && o.tol.is_finite(), "tol must be > 0"),
        ];
        if let Some((_, msg)) = checks.iter().find(|(ok, _)| !ok) {
            return Err(Error::Config(msg.to_string()));
        }
        Ok(())
    }

    pub fn field(&self) -> Result<VectorField> {
        let comps: Vec<&str> = self.components.iter().map(String::as_str).collect();
        VectorField::parse(self.dim, &comps).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn domain_box(&self) -> Result<BoxDomain> {
        BoxDomain::new(self.domain.clone())
    }

    pub fn bound_options(&self) -> BoundOptions {
        BoundOptions { epsilon: self.options.epsilon, slack: self.options.slack }
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[system]")?;
        writeln!(f, "dim = {}", self.dim)?;
        for (k, c) in self.components.iter().enumerate() {
            writeln!(f, "f{} = \"{}\"", k + 1, c)?;
        }
        writeln!(f, "\n[domain]")?;
        for (k, d) in self.domain.iter().enumerate() {
            writeln!(f, "x{} = [{}, {}]", k + 1, d.lo(), d.hi())?;
        }
        let o = &self.options;
        writeln!(f, "\n[options]")?;
        writeln!(f, "epsilon = {}", o.epsilon)?;
        writeln!(f, "slack = {}", o.slack)?;
        writeln!(f, "depth = {}", o.depth)?;
        writeln!(f, "step = {}", o.step)?;
        writeln!(f, "t_end = {}", o.t_end)?;
        writeln!(f, "tol = {}", o.tol)?;
        writeln!(f, "format = {}", o.format)
    }
}

#[derive(Debug, Parser)]
#[command(name = "mixmono", about = "Decomposition functions, range bounds and reach tubes for mixed monotone systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print Jacobian bounds, sign cases and the decomposition g.
    Decompose {
        config: PathBuf,
        #[arg(long)]
        format: Option<OutputFormat>,
    },
    /// Bound the range of f over the domain box.
    Bound {
        config: PathBuf,
        #[arg(long)]
        depth: Option<u32>,
        /// Compare with min/max over a grid of about 10^4 points.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        format: Option<OutputFormat>,
    },
    /// Integrate the embedding system and write the reach tube as CSV.
    Reach {
        config: PathBuf,
        #[arg(long = "t-end")]
        t_end: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        /// Comma-separated lower corner of the initial box.
        #[arg(long = "x0-lo", value_delimiter = ',', allow_hyphen_values = true)]
        x0_lo: Option<Vec<f64>>,
        #[arg(long = "x0-hi", value_delimiter = ',', allow_hyphen_values = true)]
        x0_hi: Option<Vec<f64>>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Total variation and Jordan split of a univariate expression.
    Tv {
        #[arg(long, allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Rows in the table of f+, f- and the range bound over [a, x].
        #[arg(long, default_value_t = 11)]
        points: usize,
        #[arg(long, default_value = "text")]
        format: OutputFormat,
    },
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnboundedDerivative { .. } => 2,
        Error::Blowup { .. } => 3,
        Error::NonConvergence(_) => 4,
        _ => 1,
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let target: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn load(path: &PathBuf) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    RunConfig::parse(&text)
}

fn io(e: std::io::Error) -> Error {
    Error::Config(format!("write failed: {e}"))
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Decompose { config, format } => {
            let cfg = load(&config)?;
            cmd_decompose(&cfg, format.unwrap_or(cfg.options.format), out)
        }
        Command::Bound { config, depth, check, format } => {
            let cfg = load(&config)?;
            cmd_bound(&cfg, depth.unwrap_or(cfg.options.depth), check, format.unwrap_or(cfg.options.format), out)
        }
        Command::Reach { config, t_end, step, x0_lo, x0_hi, out: path } => {
            let cfg = load(&config)?;
            let csv = cmd_reach(&cfg, t_end, step, x0_lo, x0_hi)?;
            match path {
                Some(p) => std::fs::write(&p, csv).map_err(io),
                None => out.write_all(csv.as_bytes()).map_err(io),
            }
        }
        Command::Tv { expr, a, b, tol, points, format } => cmd_tv(&expr, a, b, tol, points, format, out),
    }
}

pub fn cmd_decompose(cfg: &RunConfig, format: OutputFormat, out: &mut dyn Write) -> Result<()> {
    let f = cfg.field()?;
    let jb = jacobian_bounds(&f, &cfg.domain_box()?, cfg.options.slack)?;
    let spec = build_decomposition(&jb, cfg.options.epsilon)?;
    if format == OutputFormat::Csv {
        writeln!(out, "output,variable,a,b,case,z,alpha,beta,g").map_err(io)?;
    }
    for i in 0..f.m() {
        let g = spec.closed_form(&f, i);
        for j in 0..f.n() {
            let e = jb.get(i, j);
            let row = [
                format_sig9(e.lo()),
                format_sig9(e.hi()),
                spec.case(i, j).to_string(),
                spec.selector(i, j).to_string(),
                format_sig9(spec.alpha(i, j)),
                format_sig9(spec.beta(i, j)),
            ];
            match format {
                OutputFormat::Text => writeln!(
                    out,
                    "df{}/dx{}: a={}, b={}, {}, z={}, alpha={}, beta={}",
                    i + 1,
                    j + 1,
                    row[0],
                    row[1],
                    row[2],
                    row[3],
                    row[4],
                    row[5]
                ),
                OutputFormat::Csv => writeln!(out, "{},{},{},\"{}\"", i + 1, j + 1, row.join(","), g),
            }
            .map_err(io)?;
        }
        if format == OutputFormat::Text {
            writeln!(out, "g{} = {}", i + 1, g).map_err(io)?;
        }
    }
    Ok(())
}

/// Min and max of each component over a grid of about `target` points.
pub fn grid_range(f: &VectorField, b: &BoxDomain, target: usize) -> Result<Vec<Interval>> {
    let n = b.dim();
    let per_axis = ((target as f64).powf(1.0 / n as f64).ceil() as usize).max(2);
    let total = per_axis.pow(n as u32);
    let mut lo = vec![f64::INFINITY; f.m()];
    let mut hi = vec![f64::NEG_INFINITY; f.m()];
    let mut p = vec![0.0; n];
    for mut idx in 0..total {
        for (k, s) in b.sides().iter().enumerate() {
            let t = (idx % per_axis) as f64 / (per_axis - 1) as f64;
            idx /= per_axis;
            p[k] = if t == 1.0 { s.hi() } else { s.lo() + t * s.width() };
        }
        for (i, v) in f.eval(&p)?.into_iter().enumerate() {
            lo[i] = lo[i].min(v);
            hi[i] = hi[i].max(v);
        }
    }
    lo.iter().zip(&hi).map(|(&a, &b)| Interval::new(a, b)).collect()
}

pub fn cmd_bound(cfg: &RunConfig, depth: u32, check: bool, format: OutputFormat, out: &mut dyn Write) -> Result<()> {
    let f = cfg.field()?;
    let b = cfg.domain_box()?;
    let bounds = refine_bounds(&f, &b, depth, &cfg.bound_options())?;
    let grid = if check { Some(grid_range(&f, &b, 10_000)?) } else { None };
    if format == OutputFormat::Csv {
        let extra = if check { ",grid_lo,grid_hi,contained" } else { "" };
        writeln!(out, "component,lo,hi{extra}").map_err(io)?;
    }
    for (i, r) in bounds.iter().enumerate() {
        match format {
            OutputFormat::Text => {
                write!(out, "f{} ∈ {}", i + 1, r).map_err(io)?;
                if let Some(g) = &grid {
                    let ok = r.widen(1e-9).encloses(&g[i]);
                    write!(out, "  grid {} {}", g[i], if ok { "contained" } else { "NOT CONTAINED" }).map_err(io)?;
                }
                writeln!(out).map_err(io)?;
            }
            OutputFormat::Csv => {
                write!(out, "{},{},{}", i + 1, format_sig9(r.lo()), format_sig9(r.hi())).map_err(io)?;
                if let Some(g) = &grid {
                    let ok = r.widen(1e-9).encloses(&g[i]);
                    write!(out, ",{},{},{}", format_sig9(g[i].lo()), format_sig9(g[i].hi()), ok).map_err(io)?;
                }
                writeln!(out).map_err(io)?;
            }
        }
    }
    Ok(())
}

/// Reach tube CSV. The decomposition is built on the config's domain box;
/// the initial box defaults to that same box.
pub fn cmd_reach(
    cfg: &RunConfig,
    t_end: Option<f64>,
    step: Option<f64>,
    x0_lo: Option<Vec<f64>>,
    x0_hi: Option<Vec<f64>>,
) -> Result<String> {
    let f = cfg.field()?;
    let b = cfg.domain_box()?;
    let jb = jacobian_bounds(&f, &b, cfg.options.slack)?;
    let spec = build_decomposition(&jb, cfg.options.epsilon)?;
    let sys = build_embedding(&f, &spec)?;
    let lo = x0_lo.unwrap_or_else(|| b.lower());
    let hi = x0_hi.unwrap_or_else(|| b.upper());
    let tube = integrate_embedding(&sys, &lo, &hi, t_end.unwrap_or(cfg.options.t_end), step.unwrap_or(cfg.options.step))?;
    Ok(tube.to_csv())
}

pub fn cmd_tv(expr: &str, a: f64, b: f64, tol: f64, points: usize, format: OutputFormat, out: &mut dyn Write) -> Result<()> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Config("tol must be > 0".into()));
    }
    let f = ScalarFunction::on(expr, a, b)?;
    let split = jordan_split(&f, &TvOptions { tol, ..TvOptions::default() })?;
    let bounds = split.bounds()?;
    let points = points.max(2);
    let rows = (0..points)
        .map(|k| {
            let x = if k + 1 == points { b } else { a + (b - a) * k as f64 / (points - 1) as f64 };
            Ok([x, split.plus(x)?, split.minus(x)?, split.decomposition(a, x)?, split.decomposition(x, a)?])
        })
        .collect::<Result<Vec<_>>>()?;
    match format {
        OutputFormat::Text => {
            writeln!(out, "TV = {}", format_sig9(split.total_variation())).map_err(io)?;
            writeln!(out, "bounds = {}", bounds).map_err(io)?;
            writeln!(out, "{:>16} {:>16} {:>16} {:>16} {:>16}", "x", "f_plus", "f_minus", "lower", "upper").map_err(io)?;
            for row in rows {
                let cells: Vec<String> = row.iter().map(|v| format!("{:>16}", format_sig9(*v))).collect();
                writeln!(out, "{}", cells.join(" ")).map_err(io)?;
            }
        }
        OutputFormat::Csv => {
            writeln!(out, "tv,lower,upper").map_err(io)?;
            writeln!(
                out,
                "{},{},{}",
                format_sig9(split.total_variation()),
                format_sig9(bounds.lo()),
                format_sig9(bounds.hi())
            )
            .map_err(io)?;
            writeln!(out, "x,f_plus,f_minus,lower,upper").map_err(io)?;
            for row in rows {
                let cells: Vec<String> = row.iter().map(|v| format_sig9(*v)).collect();
                writeln!(out, "{}", cells.join(",")).map_err(io)?;
            }
        }
    }
    Ok(())
}
