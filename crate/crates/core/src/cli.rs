//! File formats, verification reports, the value table and the `sailfree`
//! command dispatcher.
//!
//! Text format: optional `#` comment lines, then `n m`, then `m` lines
//! `a b c` with 0-based vertices. JSON format: `{"n": .., "edges": [[a,b,c], ..]}`.
//! Extra JSON fields are ignored.
//!
//! Exit codes: 0 success, 1 verification failed, 2 usage or input error,
//! 3 search limit exceeded.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::canon::{canonical_form, find_isomorphism};
use crate::constructions::{truncated_design, ConstructionSpec, Variant};
use crate::sail::{find_sail_fast, SailWitness};
use crate::search::{enumerate_extremal, max_sail_free, SearchError, SearchOptions, SearchReport};
use crate::system::{deficiency, make_system, shadow, LinearTripleSystem, SystemError, Triple};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error(transparent)]
    System(#[from] SystemError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

#[derive(Deserialize)]
struct JsonSystem {
    n: usize,
    edges: Vec<[usize; 3]>,
}

/// Reads either format into `(n, triples)` without validating the system.
pub fn parse_raw(text: &str) -> Result<(usize, Vec<[usize; 3]>), ParseError> {
    if text.trim_start().starts_with('{') {
        let j: JsonSystem =
            serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
        return Ok((j.n, j.edges));
    }
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or_else(|| syntax(1, "missing `n m` header"))?;
    let head = numbers(hl, header)?;
    let [n, m] = head[..] else {
        return Err(syntax(hl, "header must be `n m`"));
    };
    let mut edges = Vec::with_capacity(m);
    for (ln, l) in lines {
        if edges.len() == m {
            return Err(syntax(ln, format!("more than {m} edge lines")));
        }
        let row = numbers(ln, l)?;
        let [a, b, c] = row[..] else {
            return Err(syntax(ln, "edge line must have three vertices"));
        };
        edges.push([a, b, c]);
    }
    if edges.len() != m {
        return Err(syntax(
            text.lines().count().max(1),
            format!("expected {m} edges, found {}", edges.len()),
        ));
    }
    Ok((n, edges))
}

fn numbers(line: usize, s: &str) -> Result<Vec<usize>, ParseError> {
    s.split_whitespace()
        .map(|w| {
            w.parse()
                .map_err(|_| syntax(line, format!("`{w}` is not a non-negative integer")))
        })
        .collect()
}

pub fn parse_system(text: &str) -> Result<LinearTripleSystem, ParseError> {
    let (n, edges) = parse_raw(text)?;
    Ok(make_system(n, edges)?)
}

pub fn serialize_system(h: &LinearTripleSystem) -> String {
    let mut out = format!("{} {}\n", h.n(), h.edge_count());
    for e in h.edges() {
        let [a, b, c] = e.vertices();
        out.push_str(&format!("{a} {b} {c}\n"));
    }
    out
}

pub fn system_json(h: &LinearTripleSystem) -> Value {
    serde_json::to_value(h).expect("systems serialize")
}

/// Expected shape of a system under verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "extremal-3k+1")]
    Extremal3k1,
    #[serde(rename = "td")]
    Td,
    #[serde(rename = "truncated")]
    Truncated,
}

impl Role {
    /// `k` with `n = 3k + offset`, if any.
    fn infer_k(self, n: usize) -> Option<usize> {
        let offset = match self {
            Role::Td => 0,
            Role::Extremal3k1 => 1,
            Role::Truncated => 2,
        };
        (n >= offset && (n - offset) % 3 == 0).then(|| (n - offset) / 3)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Extremal3k1 => "extremal-3k+1",
            Role::Td => "td",
            Role::Truncated => "truncated",
        })
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "extremal-3k+1" | "extremal" => Ok(Role::Extremal3k1),
            "td" => Ok(Role::Td),
            "truncated" => Ok(Role::Truncated),
            _ => Err(format!(
                "unknown role `{s}` (expected extremal-3k+1, td or truncated)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("n = {n} does not fit role {role} with k = {k}")]
    RoleShapeMismatch { role: Role, n: usize, k: usize },
    #[error("n = {n} is not of the form required by role {role}")]
    RoleShapeUninferable { role: Role, n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoleCheck {
    pub role: Role,
    pub k: usize,
    pub passed: bool,
    /// Human-readable reasons, empty on pass.
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub m: usize,
    pub is_linear: bool,
    pub sail_witness: Option<SailWitness>,
    pub degree_sequence: Vec<usize>,
    pub max_degree: usize,
    pub k: usize,
    /// `sum over all vertices of (k - d(x))`.
    pub deficiency_total: i64,
    pub role_check: Option<RoleCheck>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.is_linear
            && self.sail_witness.is_none()
            && self.role_check.as_ref().is_none_or(|r| r.passed)
    }
}

/// Summary of `h` with an optional role conformance verdict. Without a role
/// or `k`, `k = floor(n / 3)`.
pub fn verify_report(
    h: &LinearTripleSystem,
    role: Option<Role>,
    k: Option<usize>,
) -> Result<VerificationReport, VerifyError> {
    let n = h.n();
    let k = match (role, k) {
        (Some(r), Some(k)) if r.infer_k(n) != Some(k) => {
            return Err(VerifyError::RoleShapeMismatch { role: r, n, k })
        }
        (_, Some(k)) => k,
        (Some(r), None) => r
            .infer_k(n)
            .ok_or(VerifyError::RoleShapeUninferable { role: r, n })?,
        (None, None) => n / 3,
    };
    let mut degree_sequence = h.degrees();
    degree_sequence.sort_unstable();
    let sail_witness = find_sail_fast(h);
    let deficiency_total =
        deficiency(h, h.vertex_set(), k as i64).expect("vertex set is in range");
    let mut report = VerificationReport {
        n,
        m: h.edge_count(),
        is_linear: true,
        sail_witness,
        degree_sequence,
        max_degree: h.max_degree(),
        k,
        deficiency_total,
        role_check: None,
    };
    report.role_check = role.map(|r| check_role(h, &report, r, k));
    Ok(report)
}

fn check_role(h: &LinearTripleSystem, rep: &VerificationReport, role: Role, k: usize) -> RoleCheck {
    let mut failures = Vec::new();
    if rep.sail_witness.is_some() {
        failures.push("contains a sail".to_string());
    }
    let want_m = match role {
        Role::Extremal3k1 => k * k + 1,
        Role::Td => k * k,
        Role::Truncated => k * k + k,
    };
    if rep.m != want_m {
        failures.push(format!("m = {}, expected {want_m}", rep.m));
    }
    match role {
        Role::Extremal3k1 => {
            if rep.max_degree != k {
                failures.push(format!("max degree {} != k = {k}", rep.max_degree));
            }
            let want = k as i64 - 3;
            if rep.deficiency_total != want {
                failures.push(format!(
                    "deficiency {} != k - 3 = {want}",
                    rep.deficiency_total
                ));
            }
        }
        Role::Td => {
            if rep.m == want_m && !is_transversal(h, k) {
                failures.push("uncovered pairs do not form three disjoint groups of size k".into());
            }
        }
        Role::Truncated => {
            if rep.m == want_m && !is_truncated(h, k) {
                failures.push("not a transversal design with one vertex removed".into());
            }
        }
    }
    RoleCheck {
        role,
        k,
        passed: failures.is_empty(),
        failures,
    }
}

/// Uncovered-pair adjacency as bit masks.
fn uncovered(h: &LinearTripleSystem) -> Vec<u64> {
    let s = shadow(h);
    let n = h.n();
    (0..n)
        .map(|u| {
            (0..n)
                .filter(|&v| v != u && !s.contains(u, v))
                .fold(0u64, |acc, v| acc | 1 << v)
        })
        .collect()
}

/// `k^2` edges on `3k` vertices whose uncovered pairs are three disjoint
/// `K_k`. Then every edge is transversal and every cross pair is covered.
fn is_transversal(h: &LinearTripleSystem, k: usize) -> bool {
    if h.n() != 3 * k || h.edge_count() != k * k {
        return false;
    }
    let un = uncovered(h);
    let mut groups = Vec::new();
    let mut seen = 0u64;
    for v in 0..h.n() {
        if seen >> v & 1 == 1 {
            continue;
        }
        let group = un[v] | 1 << v;
        if group.count_ones() as usize != k {
            return false;
        }
        // a clique: every member sees exactly the rest of the group
        if (0..h.n()).any(|u| group >> u & 1 == 1 && un[u] | 1 << u != group) {
            return false;
        }
        seen |= group;
        groups.push(group);
    }
    groups.len() == 3
}

/// Re-adds the missing vertex and tests for a transversal design of order
/// `k + 1`. The missing vertex closes the uncovered pairs that have no common
/// uncovered neighbor, between vertices of the two untouched groups (those
/// have `k + 1` uncovered partners, the shrunken group `k - 1`).
fn is_truncated(h: &LinearTripleSystem, k: usize) -> bool {
    if k == 1 {
        return crate::canon::is_isomorphic(h, &truncated_design(1).expect("k = 1 is valid"));
    }
    let n = h.n();
    if n != 3 * k + 2 || n + 1 > crate::system::MAX_VERTICES {
        return false;
    }
    let un = uncovered(h);
    let mut extra: Vec<[usize; 3]> = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let wide = |x: usize| un[x].count_ones() as usize == k + 1;
            if un[u] >> v & 1 == 1 && un[u] & un[v] == 0 && wide(u) && wide(v) {
                extra.push([u, v, n]);
            }
        }
    }
    if extra.len() != k + 1 {
        return false;
    }
    let all = h
        .edges()
        .iter()
        .map(Triple::vertices)
        .chain(extra);
    match make_system(n + 1, all) {
        Ok(full) => is_transversal(&full, k + 1),
        Err(_) => false,
    }
}

/// Closed-form value for `n` when one applies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Formula {
    pub expression: &'static str,
    pub k: usize,
    pub value: usize,
}

pub fn formula(n: usize) -> Option<Formula> {
    let k = n / 3;
    match n % 3 {
        0 => Some(Formula {
            expression: "k^2",
            k,
            value: k * k,
        }),
        2 => Some(Formula {
            expression: "k^2+k",
            k,
            value: k * k + k,
        }),
        _ if k >= 3 => Some(Formula {
            expression: "k^2+1",
            k,
            value: k * k + 1,
        }),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub max_edges: usize,
    pub exhausted: bool,
    pub nodes_explored: u64,
    pub formula: Option<Formula>,
    pub verdict: String,
}

impl TableRow {
    pub fn matches(&self) -> Option<bool> {
        match &self.formula {
            Some(f) if self.exhausted => Some(f.value == self.max_edges),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("table needs 4 <= from <= to, got {0}..{1}")]
    Range(usize, usize),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// One row per `n`: searched maximum and the applicable closed form. Rows
/// whose search hits a limit are reported as not exhausted.
pub fn table(
    n_min: usize,
    n_max: usize,
    opts: &SearchOptions,
) -> Result<Vec<TableRow>, TableError> {
    if n_min < 4 || n_max < n_min {
        return Err(TableError::Range(n_min, n_max));
    }
    let opts = SearchOptions {
        target_edges: None,
        ..opts.clone()
    };
    (n_min..=n_max)
        .map(|n| {
            let rep = match max_sail_free(n, &opts) {
                Ok(r) => r,
                Err(SearchError::LimitExceeded(r)) => *r,
                Err(e) => return Err(e.into()),
            };
            let f = formula(n);
            let verdict = match (&f, rep.exhausted) {
                (None, _) if n % 3 == 1 => "formula out of range (k<3)".to_string(),
                (None, _) => "no formula".to_string(),
                (Some(_), false) => "not exhausted".to_string(),
                (Some(f), true) if f.value == rep.max_edges => {
                    format!("{} = {} match", rep.max_edges, f.expression)
                }
                (Some(f), true) => {
                    format!("MISMATCH: {} != {} = {}", rep.max_edges, f.expression, f.value)
                }
            };
            Ok(TableRow {
                n,
                max_edges: rep.max_edges,
                exhausted: rep.exhausted,
                nodes_explored: rep.nodes_explored,
                formula: f,
                verdict,
            })
        })
        .collect()
}

/// `90`, `90s`, `500ms`, `5m`, `2h`.
pub fn parse_duration(s: &str) -> Result<Duration, String> {
    let s = s.trim();
    let split = s.find(|c: char| c.is_ascii_alphabetic()).unwrap_or(s.len());
    let (num, unit) = s.split_at(split);
    let x: f64 = num
        .parse()
        .map_err(|_| format!("invalid duration `{s}`"))?;
    let secs = match unit {
        "" | "s" => x,
        "ms" => x / 1000.0,
        "m" | "min" => x * 60.0,
        "h" => x * 3600.0,
        _ => return Err(format!("unknown duration unit `{unit}`")),
    };
    Duration::try_from_secs_f64(secs).map_err(|e| format!("invalid duration `{s}`: {e}"))
}

#[derive(Parser, Debug)]
#[command(
    name = "sailfree",
    version,
    about = "Sail-free linear triple systems: construct, check, search, classify"
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build one of the constructions and write it as a system file.
    Construct {
        #[arg(long = "type", value_name = "TYPE")]
        variant: Variant,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Spec field as `key=value`; the value is JSON, e.g. `special_edges=[0,3]`.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a system file, optionally against an expected role.
    Check {
        file: PathBuf,
        #[arg(long)]
        role: Option<Role>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Exact maximum on n vertices, optionally listing extremal classes.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        target: Option<usize>,
        #[arg(long)]
        enumerate: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Print the canonical form of a system.
    Canon { file: PathBuf },
    /// Decide whether two systems are isomorphic.
    Iso { first: PathBuf, second: PathBuf },
    /// Searched maxima next to the closed forms.
    Table {
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[command(flatten)]
        limits: Limits,
    },
}

#[derive(Args, Debug)]
struct Limits {
    #[arg(long, env = "SAILFREE_THREADS", default_value_t = 1)]
    threads: usize,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long, value_parser = parse_duration)]
    time_limit: Option<Duration>,
}

impl Limits {
    fn options(&self) -> SearchOptions {
        SearchOptions {
            node_limit: self.node_limit,
            time_limit: self.time_limit,
            ..SearchOptions::default().with_workers(self.threads)
        }
    }
}

const PARAM_KEYS: [&str; 8] = [
    "two_factor",
    "long_cycle",
    "special_edges",
    "cycle_colors",
    "triangle_colors",
    "mv_variant",
    "matchings",
    "latin",
];

/// Builds a spec from `--type/--k/--seed` and `key=value` overrides.
pub fn spec_from_params(
    variant: Variant,
    k: usize,
    seed: Option<u64>,
    params: &[String],
) -> Result<ConstructionSpec, String> {
    let mut obj = serde_json::Map::new();
    obj.insert("variant".into(), json!(variant));
    obj.insert("k".into(), json!(k));
    if let Some(s) = seed {
        obj.insert("seed".into(), json!(s));
    }
    for p in params {
        let (key, raw) = p
            .split_once('=')
            .ok_or_else(|| format!("--param `{p}` is not key=value"))?;
        let key = key.trim().replace('-', "_");
        if !PARAM_KEYS.contains(&key.as_str()) {
            return Err(format!(
                "unknown parameter `{key}` (known: {})",
                PARAM_KEYS.join(", ")
            ));
        }
        let value: Value = serde_json::from_str(raw)
            .map_err(|e| format!("--param {key}: value is not JSON: {e}"))?;
        obj.insert(key, value);
    }
    serde_json::from_value(Value::Object(obj)).map_err(|e| format!("invalid parameters: {e}"))
}

/// Runs the command line `args` (including the program name). Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let json = cli.json;
    let result = match cli.command {
        Command::Construct {
            variant,
            k,
            seed,
            params,
            out: path,
        } => construct(variant, k, seed, &params, path.as_deref(), json, out),
        Command::Check { file, role, k } => check(&file, role, k, json, out),
        Command::Search {
            n,
            target,
            enumerate,
            limits,
        } => search(n, target, enumerate, &limits, json, out),
        Command::Canon { file } => canon(&file, json, out),
        Command::Iso { first, second } => iso(&first, &second, json, out),
        Command::Table { from, to, limits } => run_table(from, to, &limits, json, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

struct Failure(i32, String);

fn usage(msg: impl fmt::Display) -> Failure {
    Failure(EXIT_USAGE, msg.to_string())
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        usage(e)
    }
}

type CmdResult = Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<LinearTripleSystem, Failure> {
    parse_system(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit_json(out: &mut dyn Write, v: &Value) -> std::io::Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("values serialize"))
}

fn construct(
    variant: Variant,
    k: usize,
    seed: Option<u64>,
    params: &[String],
    path: Option<&Path>,
    json: bool,
    out: &mut dyn Write,
) -> CmdResult {
    let spec = spec_from_params(variant, k, seed, params).map_err(usage)?;
    let resolved = spec.resolve().map_err(usage)?;
    let h = resolved.build().map_err(usage)?;
    let text = if json {
        let mut v = system_json(&h);
        v["spec"] = json!(resolved);
        if let Some(s) = seed {
            v["seed"] = json!(s);
        }
        serde_json::to_string_pretty(&v).expect("values serialize") + "\n"
    } else {
        let mut t = format!(
            "# construction: {}\n",
            serde_json::to_string(&resolved).expect("specs serialize")
        );
        if let Some(s) = seed {
            t.push_str(&format!("# seed: {s}\n"));
        }
        t + &serialize_system(&h)
    };
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display())))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}

fn check(path: &Path, role: Option<Role>, k: Option<usize>, json: bool, out: &mut dyn Write) -> CmdResult {
    let text = read(path)?;
    let (n, edges) = parse_raw(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let h = match make_system(n, edges) {
        Ok(h) => h,
        Err(e @ SystemError::LinearityViolation { .. }) => {
            if json {
                emit_json(out, &json!({"n": n, "is_linear": false, "error": e.to_string()}))?;
            } else {
                writeln!(out, "linear: no ({e})")?;
                writeln!(out, "result: FAIL")?;
            }
            return Ok(EXIT_FAIL);
        }
        Err(e) => return Err(usage(format!("{}: {e}", path.display()))),
    };
    let rep = verify_report(&h, role, k).map_err(usage)?;
    if json {
        let mut v = serde_json::to_value(&rep).expect("reports serialize");
        v["passed"] = json!(rep.passed());
        emit_json(out, &v)?;
    } else {
        writeln!(out, "n {}  m {}", rep.n, rep.m)?;
        writeln!(out, "linear: yes")?;
        match &rep.sail_witness {
            Some(w) => writeln!(out, "sail: {w}")?,
            None => writeln!(out, "sail: none")?,
        }
        writeln!(out, "degrees: {:?}", rep.degree_sequence)?;
        writeln!(out, "max degree: {}", rep.max_degree)?;
        writeln!(out, "deficiency (k = {}): {}", rep.k, rep.deficiency_total)?;
        if let Some(r) = &rep.role_check {
            if r.passed {
                writeln!(out, "role {} (k = {}): pass", r.role, r.k)?;
            } else {
                writeln!(out, "role {} (k = {}): FAIL ({})", r.role, r.k, r.failures.join("; "))?;
            }
        }
        writeln!(out, "result: {}", if rep.passed() { "pass" } else { "FAIL" })?;
    }
    Ok(if rep.passed() { EXIT_OK } else { EXIT_FAIL })
}

fn write_report(rep: &SearchReport, json: bool, out: &mut dyn Write) -> std::io::Result<()> {
    if json {
        emit_json(out, &serde_json::to_value(rep).expect("reports serialize"))
    } else {
        writeln!(out, "n {}", rep.n)?;
        writeln!(out, "max edges: {}", rep.max_edges)?;
        writeln!(out, "exhausted: {}", rep.exhausted)?;
        writeln!(out, "nodes: {}", rep.nodes_explored)?;
        writeln!(out, "elapsed: {:.3}s", rep.elapsed.as_secs_f64())?;
        writeln!(out, "# witness")?;
        write!(out, "{}", serialize_system(&rep.witness))
    }
}

fn search(
    n: usize,
    target: Option<usize>,
    enumerate: bool,
    limits: &Limits,
    json: bool,
    out: &mut dyn Write,
) -> CmdResult {
    let mut opts = limits.options();
    opts.target_edges = target;
    opts.enumerate = enumerate;
    let rep = match max_sail_free(n, &opts) {
        Ok(r) => r,
        Err(SearchError::LimitExceeded(r)) => {
            write_report(&r, json, out)?;
            return Err(Failure(EXIT_LIMIT, "search limit exceeded".into()));
        }
        Err(e) => return Err(usage(e)),
    };
    if target.is_some_and(|t| rep.max_edges < t) {
        write_report(&rep, json, out)?;
        return Ok(EXIT_FAIL);
    }
    if !enumerate {
        write_report(&rep, json, out)?;
        return Ok(EXIT_OK);
    }
    let m = target.unwrap_or(rep.max_edges);
    let classes = match enumerate_extremal(n, m, &opts) {
        Ok(c) => c,
        Err(e @ SearchError::EnumerationLimitExceeded { .. }) => {
            return Err(Failure(EXIT_LIMIT, e.to_string()))
        }
        Err(e) => return Err(usage(e)),
    };
    if json {
        let mut v = serde_json::to_value(&rep).expect("reports serialize");
        v["classes"] = json!(classes);
        emit_json(out, &v)?;
    } else {
        write_report(&rep, json, out)?;
        writeln!(out, "classes with {m} edges: {}", classes.len())?;
        for c in &classes {
            writeln!(out, "{c}")?;
        }
    }
    Ok(EXIT_OK)
}

fn canon(path: &Path, json: bool, out: &mut dyn Write) -> CmdResult {
    let h = load(path)?;
    let form = canonical_form(&h);
    if json {
        let mut v = system_json(&form.to_system());
        v["canonical"] = json!(form);
        emit_json(out, &v)?;
    } else {
        writeln!(out, "# canonical: {form}")?;
        write!(out, "{}", serialize_system(&form.to_system()))?;
    }
    Ok(EXIT_OK)
}

fn iso(first: &Path, second: &Path, json: bool, out: &mut dyn Write) -> CmdResult {
    let (h1, h2) = (load(first)?, load(second)?);
    let map = find_isomorphism(&h1, &h2);
    if json {
        emit_json(out, &json!({"isomorphic": map.is_some(), "map": map}))?;
    } else {
        match &map {
            Some(m) => {
                writeln!(out, "isomorphic")?;
                let pairs: Vec<String> = m.iter().enumerate().map(|(i, j)| format!("{i}->{j}")).collect();
                writeln!(out, "map: {}", pairs.join(" "))?;
            }
            None => writeln!(out, "not isomorphic")?,
        }
    }
    Ok(if map.is_some() { EXIT_OK } else { EXIT_FAIL })
}

fn run_table(from: usize, to: usize, limits: &Limits, json: bool, out: &mut dyn Write) -> CmdResult {
    let rows = table(from, to, &limits.options()).map_err(usage)?;
    if json {
        emit_json(out, &json!(rows))?;
    } else {
        writeln!(out, "{:>3} {:>5} {:>9} {:>12}  verdict", "n", "max", "exhausted", "nodes")?;
        for r in &rows {
            writeln!(
                out,
                "{:>3} {:>5} {:>9} {:>12}  {}",
                r.n, r.max_edges, r.exhausted, r.nodes_explored, r.verdict
            )?;
        }
    }
    Ok(if rows.iter().any(|r| !r.exhausted) {
        EXIT_LIMIT
    } else if rows.iter().any(|r| r.matches() == Some(false)) {
        EXIT_FAIL
    } else {
        EXIT_OK
    })
}
