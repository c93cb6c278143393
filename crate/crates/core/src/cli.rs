//! Command-line front end. `run` is the whole program minus process exit,
//! so it can be driven from tests.
//!
//! Exit codes: 0 success, 1 mathematical failure, 2 usage or input error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{BigRational, FromPrimitive};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::chsym::{self, Ch2System};
use crate::classify::{
    build_theorem34, build_theorem35, build_theorem36, build_theorem37, catalog, catalog_entry, ClassifyError,
    Thm34Input, Thm36Input,
};
use crate::forms::{check_lemma31, AssociatedForms};
use crate::jetcalc::{Delta, DerivationRules, PdeSystem};
use crate::kernel::{parse_with, Expr, ParseOptions};
use crate::laxzoo::{from_forms, to_strings, zero_curvature_report, MatrixForm, Packing};
use crate::numgrid::{ladder, residual_field, Chart, Grid, SolutionFields};
use crate::report::Report;

#[derive(Parser, Debug)]
#[command(name = "pseudosphere", version, about = "Verify PDE systems describing pseudospherical or spherical surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Curvature sign, 1 or -1.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta: Option<i8>,
    /// Spectral parameter
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    /// Seed constant of the exact solution
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub u0: Option<f64>,
    /// Group parameter of the finite transform
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// `xmin:xmax:h,tmin:tmax:h`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Write the data payload or CSV to this file
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check catalog entries or user forms.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Build a system from theorem data.
    Build {
        #[arg(value_enum)]
        theorem: Theorem,
        #[arg(long)]
        config: PathBuf,
    },
    /// Zero-curvature check of a user Lax pair.
    Lax {
        #[command(subcommand)]
        what: LaxCmd,
    },
    /// The cubic two-component CH pipeline.
    Ch2 {
        #[arg(value_enum)]
        task: Ch2Task,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    Example { name: String },
    Lemma31 {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum LaxCmd {
    Check {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    Thm34,
    Thm35,
    Thm36,
    Thm37,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Ch2Task {
    Symmetry,
    Prolong,
    Taylor,
    Solution,
    Residual,
}

/// A JSON document with an expression table and scalar parameters.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub expressions: BTreeMap<String, String>,
    #[serde(default)]
    pub params: Params,
}

#[derive(Deserialize, Debug, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub eta: Option<f64>,
    pub delta: Option<i8>,
    pub m: Option<u8>,
    pub n: Option<u8>,
    pub u0: Option<f64>,
    pub eps: Option<f64>,
}

#[derive(Debug, Default, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Everything a command produces before rendering.
struct Output {
    reports: Vec<Report>,
    data: Value,
    /// Replaces the rendered report on stdout (CSV payloads).
    raw: Option<String>,
}

impl Output {
    fn new(reports: Vec<Report>) -> Self {
        Output {
            reports,
            data: Value::Null,
            raw: None,
        }
    }

    fn with_data(mut self, data: Value) -> Self {
        self.data = data;
        self
    }

    fn passed(&self) -> bool {
        self.reports.iter().all(Report::passed)
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    config_hash: String,
    command: String,
    verdict: &'static str,
    reports: &'a [Report],
    #[serde(skip_serializing_if = "Value::is_null")]
    data: &'a Value,
}

enum Failure {
    /// Exit 1.
    Math(String),
    /// Exit 2.
    Usage(String),
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        Failure::Math(e.to_string())
    }
}

impl From<chsym::ChError> for Failure {
    fn from(e: chsym::ChError) -> Self {
        Failure::Math(e.to_string())
    }
}

impl From<crate::numgrid::NumError> for Failure {
    fn from(e: crate::numgrid::NumError) -> Self {
        match e {
            crate::numgrid::NumError::Grid(_) => Failure::Usage(e.to_string()),
            _ => Failure::Math(e.to_string()),
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, ..Default::default() }
            } else {
                Outcome { code, stderr: text, ..Default::default() }
            };
        }
    };
    let command_line: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let mut hash_input = command_line.join("\u{1f}").into_bytes();
    let result = dispatch(&cli, &mut hash_input);
    match result {
        Err(Failure::Usage(msg)) => Outcome {
            code: 2,
            stderr: format!("error: {msg}\n"),
            ..Default::default()
        },
        Err(Failure::Math(msg)) => Outcome {
            code: 1,
            stderr: format!("failure: {msg}\n"),
            ..Default::default()
        },
        Ok(out) => {
            let hash = hex(&Sha256::digest(&hash_input));
            let code = if out.passed() { 0 } else { 1 };
            match render(&cli.common, &out, &command_line.join(" "), hash) {
                Ok(stdout) => Outcome {
                    code,
                    stdout,
                    ..Default::default()
                },
                Err(msg) => Outcome {
                    code: 2,
                    stderr: format!("error: {msg}\n"),
                    ..Default::default()
                },
            }
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn render(common: &Common, out: &Output, command: &str, hash: String) -> Result<String, String> {
    if let Some(raw) = &out.raw {
        return Ok(raw.clone());
    }
    let text = match common.format {
        Format::Json => {
            let env = Envelope {
                tool: "pseudosphere",
                version: env!("CARGO_PKG_VERSION"),
                config_hash: hash,
                command: command.into(),
                verdict: if out.passed() { "pass" } else { "fail" },
                reports: &out.reports,
                data: &out.data,
            };
            serde_json::to_string_pretty(&env).map_err(|e| e.to_string())? + "\n"
        }
        Format::Table => {
            let mut s = format!("pseudosphere {} config {}\n", env!("CARGO_PKG_VERSION"), &hash[..16]);
            for r in &out.reports {
                s.push('\n');
                s.push_str(&r.to_table());
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("subject,condition,verdict,residual\n");
            for r in &out.reports {
                for c in &r.conditions {
                    let v = if c.verdict == crate::report::Verdict::Pass { "pass" } else { "fail" };
                    let _ = writeln!(s, "{},{},{},\"{}\"", r.subject, c.condition_id, v, c.residual_text.replace('"', "\"\""));
                }
            }
            s
        }
    };
    Ok(text)
}

fn read_config(path: &PathBuf, hash_input: &mut Vec<u8>) -> Result<RunConfig, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    hash_input.push(0);
    hash_input.extend_from_slice(&bytes);
    serde_json::from_slice(&bytes).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
}

struct Table<'a> {
    cfg: &'a RunConfig,
    opts: ParseOptions,
}

impl Table<'_> {
    fn get(&self, name: &str) -> Result<Expr, Failure> {
        let text = self
            .cfg
            .expressions
            .get(name)
            .ok_or_else(|| Failure::Usage(format!("config lacks expression `{name}`")))?;
        parse_with(text, &self.opts).map_err(|e| Failure::Usage(format!("expression `{name}`: {e}")))
    }

    fn get_or(&self, name: &str, default: Expr) -> Result<Expr, Failure> {
        if self.cfg.expressions.contains_key(name) {
            self.get(name)
        } else {
            Ok(default)
        }
    }
}

fn delta_of(common: &Common, params: &Params) -> Result<Option<Delta>, Failure> {
    match common.delta.or(params.delta) {
        None => Ok(None),
        Some(s) => Delta::from_sign(s)
            .map(Some)
            .ok_or_else(|| Failure::Usage(format!("delta must be 1 or -1, got {s}"))),
    }
}

fn sign_of(delta: Delta) -> Option<i8> {
    match delta {
        Delta::Pseudospherical => Some(1),
        Delta::Spherical => Some(-1),
        Delta::Symbolic => None,
    }
}

fn number(x: f64) -> Result<Expr, Failure> {
    BigRational::from_f64(x)
        .map(Expr::constant)
        .ok_or_else(|| Failure::Usage(format!("not a finite number: {x}")))
}

fn packing_for(delta: Delta) -> Packing {
    if delta == Delta::Spherical {
        Packing::Su2
    } else {
        Packing::Sl2
    }
}

fn system_json(sys: &PdeSystem) -> Value {
    json!({
        "F": sys.f.to_string(),
        "G": sys.g.to_string(),
        "orders": [sys.orders.0, sys.orders.1],
        "delta": sign_of(sys.delta),
    })
}

fn forms_json(forms: &AssociatedForms) -> Value {
    let rows: Vec<[String; 2]> = forms.f.iter().map(|r| [r[0].to_string(), r[1].to_string()]).collect();
    json!(rows)
}

fn lax_json(mf: &MatrixForm) -> Value {
    json!({ "X": to_strings(&mf.x), "T": to_strings(&mf.t), "packing": mf.packing })
}

fn dispatch(cli: &Cli, hash_input: &mut Vec<u8>) -> Result<Output, Failure> {
    let common = &cli.common;
    match &cli.command {
        Command::Verify { what: VerifyCmd::Example { name } } => verify_example(common, name),
        Command::Verify { what: VerifyCmd::Lemma31 { config } } => {
            let cfg = read_config(config, hash_input)?;
            verify_lemma31(common, &cfg)
        }
        Command::Build { theorem, config } => {
            let cfg = read_config(config, hash_input)?;
            let out = build(common, *theorem, &cfg)?;
            write_out(common, &out)?;
            Ok(out)
        }
        Command::Lax { what: LaxCmd::Check { config } } => {
            let cfg = read_config(config, hash_input)?;
            lax_check(common, &cfg)
        }
        Command::Ch2 { task } => ch2(common, *task),
    }
}

fn write_out(common: &Common, out: &Output) -> Result<(), Failure> {
    if let Some(path) = &common.out {
        let text = serde_json::to_string_pretty(&out.data).map_err(|e| Failure::Usage(e.to_string()))? + "\n";
        std::fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn verify_example(common: &Common, name: &str) -> Result<Output, Failure> {
    let Some(mut entry) = catalog_entry(name) else {
        let names: Vec<_> = catalog().iter().map(|e| e.name).collect();
        return Err(Failure::Usage(format!("unknown example `{name}`; known: {}", names.join(", "))));
    };
    if let Some(d) = delta_of(common, &Params::default())? {
        entry.forms.delta = d;
        entry.system.delta = d;
    }
    let rules = DerivationRules::default();
    let mut reports = vec![check_lemma31(&entry.forms, &entry.system, &rules)];
    if let Some(lax) = &entry.lax {
        reports.push(zero_curvature_report(lax, &entry.system, &rules));
    }
    let data = json!({
        "example": entry.name,
        "system": system_json(&entry.system),
        "forms": forms_json(&entry.forms),
        "lax": entry.lax.as_ref().map(lax_json),
    });
    Ok(Output::new(reports).with_data(data))
}

fn parse_options(common: &Common, cfg: &RunConfig) -> Result<(ParseOptions, Option<Delta>), Failure> {
    let delta = delta_of(common, &cfg.params)?;
    Ok((
        ParseOptions {
            delta: delta.and_then(sign_of),
            ..Default::default()
        },
        delta,
    ))
}

fn verify_lemma31(common: &Common, cfg: &RunConfig) -> Result<Output, Failure> {
    let (opts, delta) = parse_options(common, cfg)?;
    let delta = delta.ok_or_else(|| Failure::Usage("delta is required".into()))?;
    let t = Table { cfg, opts };
    let row = |i: usize| -> Result<[Expr; 2], Failure> { Ok([t.get(&format!("f{i}1"))?, t.get(&format!("f{i}2"))?]) };
    let forms = AssociatedForms::new([row(1)?, row(2)?, row(3)?], delta);
    let sys = PdeSystem::new(t.get("F")?, t.get("G")?, delta);
    let report = check_lemma31(&forms, &sys, &DerivationRules::default());
    Ok(Output::new(vec![report]).with_data(json!({ "system": system_json(&sys) })))
}

fn eta_expr(common: &Common, t: &Table) -> Result<Expr, Failure> {
    match common.eta.or(t.cfg.params.eta) {
        Some(x) => number(x),
        None => t.get_or("eta", Expr::coord(crate::kernel::Coord::ETA)),
    }
}

fn build(common: &Common, theorem: Theorem, cfg: &RunConfig) -> Result<Output, Failure> {
    let (opts, delta) = parse_options(common, cfg)?;
    let delta = delta.ok_or_else(|| Failure::Usage("delta is required".into()))?;
    let t = Table { cfg, opts };
    let eta = eta_expr(common, &t)?;
    let (sys, forms, lax) = match theorem {
        Theorem::Thm34 | Theorem::Thm35 => {
            let input = Thm34Input {
                g: t.get("g")?,
                h: t.get("h")?,
                l: t.get("L")?,
                m: t.get("M")?,
                eta,
                delta,
                orders: (cfg.params.m.unwrap_or(3), cfg.params.n.unwrap_or(3)),
            };
            let (sys, forms) = if theorem == Theorem::Thm34 {
                build_theorem34(&input)?
            } else {
                build_theorem35(&input)?
            };
            let lax = from_forms(&forms, packing_for(delta));
            (sys, forms, lax)
        }
        Theorem::Thm36 | Theorem::Thm37 => {
            let input = Thm36Input {
                g: t.get("g")?,
                h: t.get("h")?,
                a: t.get("A")?,
                l1: t.get("L1")?,
                n1: t.get("N1")?,
                m: t.get("M")?,
                eta,
                delta,
            };
            if theorem == Theorem::Thm36 {
                build_theorem36(&input)?
            } else {
                build_theorem37(&input)?
            }
        }
    };
    let rules = DerivationRules::default();
    let reports = vec![check_lemma31(&forms, &sys, &rules), zero_curvature_report(&lax, &sys, &rules)];
    let data = json!({
        "system": system_json(&sys),
        "forms": forms_json(&forms),
        "lax": lax_json(&lax),
    });
    Ok(Output::new(reports).with_data(data))
}

fn lax_check(common: &Common, cfg: &RunConfig) -> Result<Output, Failure> {
    let (opts, delta) = parse_options(common, cfg)?;
    let delta = delta.unwrap_or(Delta::Pseudospherical);
    let t = Table { cfg, opts };
    let mat = |p: &str| -> Result<[[Expr; 2]; 2], Failure> {
        Ok([
            [t.get(&format!("{p}11"))?, t.get(&format!("{p}12"))?],
            [t.get(&format!("{p}21"))?, t.get(&format!("{p}22"))?],
        ])
    };
    let mf = MatrixForm::new(mat("X")?, mat("T")?, packing_for(delta));
    let sys = PdeSystem::new(t.get("F")?, t.get("G")?, delta);
    Ok(Output::new(vec![zero_curvature_report(&mf, &sys, &DerivationRules::default())]))
}

fn ch2(common: &Common, task: Ch2Task) -> Result<Output, Failure> {
    let ch = Ch2System::new();
    let rules = chsym::full_rules();
    match task {
        Ch2Task::Symmetry => {
            let mut r = Report::new("nonlocal symmetry");
            for (label, reduced) in [("reduced", true), ("full", false)] {
                let s = chsym::nonlocal_symmetry(reduced);
                let (a, b) = chsym::check_symmetry_residual(&s, &ch, &rules)?;
                r.expect_zero(format!("{label}.m-equation"), &a);
                r.expect_zero(format!("{label}.n-equation"), &b);
                let (a, b) = s.momentum_mismatch(&rules)?;
                r.expect_zero(format!("{label}.m-from-u"), &a);
                r.expect_zero(format!("{label}.n-from-v"), &b);
            }
            let s = chsym::nonlocal_symmetry(true);
            let data = json!({ "u": s.u.to_string(), "v": s.v.to_string(), "m": s.m.to_string(), "n": s.n.to_string() });
            Ok(Output::new(vec![r]).with_data(data))
        }
        Ch2Task::Prolong => {
            let mut compat = Report::new("rule compatibility");
            for (c, res) in chsym::compatibility_residuals(&ch)? {
                compat.expect_zero(format!("{c}"), &res);
            }
            let pro = chsym::prolongation();
            let mut r = Report::new("prolongation");
            for (name, res) in chsym::prolongation_residuals(&pro, &chsym::nonlocal_symmetry(true), &ch)? {
                r.expect_zero(name, &res);
            }
            let data = json!({
                "omega1": pro.omega1.to_string(),
                "omega2": pro.omega2.to_string(),
                "omega_p": pro.omega_p.to_string(),
            });
            Ok(Output::new(vec![compat, r]).with_data(data))
        }
        Ch2Task::Taylor => Ok(Output::new(vec![chsym::vector_field_first_order_check()])),
        Ch2Task::Solution | Ch2Task::Residual => {
            let (u0, eta, eps) = (common.u0.unwrap_or(0.75), common.eta.unwrap_or(1.0), common.eps.unwrap_or(1.0));
            let sol = chsym::exact_solution(u0, eta, eps)?;
            let grid = Grid::parse(common.grid.as_deref().unwrap_or("-8:8:0.03125,-1:1:0.03125"))?;
            if task == Ch2Task::Solution {
                solution(common, sol, &grid)
            } else {
                residual(sol, &grid)
            }
        }
    }
}

fn solution(common: &Common, sol: chsym::ExactSolution, grid: &Grid) -> Result<Output, Failure> {
    let field = residual_field(&SolutionFields::new(sol, Chart::Tilde), grid)?;
    let header = format!(
        "u0={} eta={} eps={} k={} grid={}:{}:{},{}:{}:{} chart=tilde",
        sol.u0, sol.eta, sol.eps, sol.k, grid.x_min, grid.x_max, grid.h_x, grid.t_min, grid.t_max, grid.h_t
    );
    let mut csv = Vec::new();
    field
        .write_csv(&mut csv, &header)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let csv = String::from_utf8(csv).map_err(|e| Failure::Usage(e.to_string()))?;
    let report = field.report();
    let data = json!({ "k": sol.k, "residual": report });
    let mut out = Output::new(vec![]).with_data(data);
    match &common.out {
        Some(path) => {
            std::fs::write(path, csv).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?
        }
        None => out.raw = Some(csv),
    }
    Ok(out)
}

fn residual(sol: chsym::ExactSolution, grid: &Grid) -> Result<Output, Failure> {
    let tilde = ladder(&SolutionFields::new(sol, Chart::Tilde), grid, 3)?;
    let plain = ladder(&SolutionFields::new(sol, Chart::Plain), grid, 3)?;
    let mut r = Report::new("finite-difference residual");
    let order = tilde.order.unwrap_or(f64::NAN);
    r.push("order-transformed-chart", format!("{order:.3}"), (order - 2.0).abs() <= 0.3);
    let masked = tilde.rungs.iter().map(|x| x.masked_fraction()).fold(0.0, f64::max);
    r.push("masked-fraction", format!("{masked:.4}"), masked < 0.01);
    let data = json!({ "transformed": tilde, "printed_chart_diagnostic": plain });
    Ok(Output::new(vec![r]).with_data(data))
}
