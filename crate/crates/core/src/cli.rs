//! The `deltader` command line.
//!
//! Every subcommand prints a short human summary, on stderr when a report
//! goes to stdout. `--json <path>` writes the full report (`-` for stdout) and `--tsv <path>` writes the dimension table
//! of a `solve` sweep. Exit codes: 0 pass, 1 property failure, 2 usage or
//! configuration error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebras::{Algebra, Element};
use crate::dersolve::{
    check_delta_derivation, compare_families, default_interior_margin, expected_family,
    find_violation_witness, solve_delta_derivations, sweep_tsv, usable_pairs, SweepRow,
};
use crate::error::{Error, Result};
use crate::exactlin::{frac, Scalar};
use crate::locality::{
    certify_nonadditive, check_local, check_two_local, deterministic_sample, pair_grid, SampleSpec,
};
use crate::operators::{materialize, Evaluate, Operator, SolvDeltaBar, ThinLocalDelta, ThinNabla, Window};
use crate::text::{format_element, parse_element, parse_range, parse_scalar};
use crate::verify::{self, Profile};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Parser, Debug)]
#[command(name = "deltader", version, about = "Exact δ-derivation spaces on finite windows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for windowed ½-derivations (or δ-derivations) and compare with
    /// the closed-form family.
    Solve(Common),
    /// Check the δ-derivation identity for an operator on all window pairs.
    CheckMap(Common),
    /// Local feasibility of an operator against the windowed family.
    Local(Common),
    /// 2-local feasibility of an operator against the windowed family.
    TwoLocal(Common),
    /// Certify the thin or solvable counterexample maps.
    Counterexamples(Common),
    /// Run the acceptance suite.
    VerifyAll(Common),
}

#[derive(Args, Debug, Default, Clone)]
struct Common {
    /// wittz | wittpos | witt1 | wab | thin | solv
    #[arg(long)]
    algebra: Option<String>,
    /// W(a,b) parameter a.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// W(a,b) parameter b; `solve` also accepts `lo..hi` or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Input window `lo..hi`.
    #[arg(long = "in", allow_hyphen_values = true)]
    input: Option<String>,
    /// Output window `lo..hi`.
    #[arg(long = "out", allow_hyphen_values = true)]
    output: Option<String>,
    /// δ as `p/q` (default 1/2).
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    /// Operator literal, e.g. `thin-delta` or `shift:t=2`.
    #[arg(long)]
    map: Option<String>,
    /// Element literal; repeatable for `local`.
    #[arg(long, allow_hyphen_values = true)]
    x: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    /// Interior margin for the comparison.
    #[arg(long)]
    margin: Option<usize>,
    /// Write the JSON report here (`-` for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the dimension TSV here (`solve`).
    #[arg(long)]
    tsv: Option<PathBuf>,
    /// Flat `key = value` file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Reduced acceptance profile (`verify-all`).
    #[arg(long)]
    quick: bool,
    /// Add wall-clock time to the report (makes it nondeterministic).
    #[arg(long)]
    timing: bool,
}

impl Common {
    /// Fills unset options from the config file.
    fn merged(mut self) -> Result<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("{}:{}: expected `key = value`", path.display(), n + 1)))?;
            let value = value.trim().to_string();
            let set = |slot: &mut Option<String>| {
                if slot.is_none() {
                    *slot = Some(value.clone());
                }
            };
            match key.trim() {
                "algebra" => set(&mut self.algebra),
                "a" => set(&mut self.a),
                "b" => set(&mut self.b),
                "in" => set(&mut self.input),
                "out" => set(&mut self.output),
                "delta" => set(&mut self.delta),
                "map" => set(&mut self.map),
                "y" => set(&mut self.y),
                "x" => {
                    if self.x.is_empty() {
                        self.x.push(value.clone());
                    }
                }
                "margin" => {
                    if self.margin.is_none() {
                        self.margin = Some(value.parse().map_err(|_| {
                            Error::Config(format!("margin must be a nonnegative integer, got `{value}`"))
                        })?);
                    }
                }
                "json" => {
                    if self.json.is_none() {
                        self.json = Some(value.clone().into());
                    }
                }
                "tsv" => {
                    if self.tsv.is_none() {
                        self.tsv = Some(value.clone().into());
                    }
                }
                "quick" => self.quick |= value == "true",
                other => return Err(Error::Config(format!("unknown config key `{other}`"))),
            }
        }
        Ok(self)
    }

    fn scalar(&self, v: &Option<String>, name: &str) -> Result<Option<Scalar>> {
        v.as_deref()
            .map(|s| parse_scalar(s).map_err(|e| Error::Config(format!("--{name}: {e}"))))
            .transpose()
    }

    fn algebra_with_b(&self, b: Option<Scalar>) -> Result<Algebra> {
        let name = self
            .algebra
            .as_deref()
            .ok_or_else(|| Error::Config("--algebra is required".into()))?;
        Algebra::from_name(name, self.scalar(&self.a, "a")?, b)
    }

    fn algebra(&self) -> Result<Algebra> {
        self.algebra_with_b(self.scalar(&self.b, "b")?)
    }

    fn delta(&self) -> Result<Scalar> {
        Ok(self.scalar(&self.delta, "delta")?.unwrap_or_else(|| frac(1, 2)))
    }

    fn window(&self, alg: &Algebra) -> Result<Window> {
        let (di, dout) = default_window(alg);
        let i = match &self.input {
            Some(s) => parse_range(s)?,
            None => di,
        };
        let o = match (&self.output, &self.input) {
            (Some(s), _) => parse_range(s)?,
            (None, Some(_)) => i,
            (None, None) => dout,
        };
        Window::ranges(alg, i, o)
    }

    fn operator(&self, alg: &Algebra) -> Result<Operator> {
        let src = self
            .map
            .as_deref()
            .ok_or_else(|| Error::Config("--map is required".into()))?;
        let op: Operator = src.parse()?;
        op.validate(alg)?;
        Ok(op)
    }

    fn echo(&self) -> BTreeMap<&'static str, Value> {
        let mut m = BTreeMap::new();
        let mut put = |k: &'static str, v: &Option<String>| {
            if let Some(v) = v {
                m.insert(k, json!(v));
            }
        };
        put("algebra", &self.algebra);
        put("a", &self.a);
        put("b", &self.b);
        put("in", &self.input);
        put("out", &self.output);
        put("delta", &self.delta);
        put("map", &self.map);
        put("y", &self.y);
        if !self.x.is_empty() {
            m.insert("x", json!(self.x));
        }
        if let Some(margin) = self.margin {
            m.insert("margin", json!(margin));
        }
        if self.quick {
            m.insert("quick", json!(true));
        }
        m
    }
}

/// Windows used when `--in`/`--out` are omitted.
pub fn default_window(alg: &Algebra) -> ((i64, i64), (i64, i64)) {
    match alg {
        Algebra::WittZ => ((-4, 4), (-12, 12)),
        Algebra::WittPos => ((1, 8), (1, 16)),
        Algebra::WittOneSided => ((-1, 5), (-1, 12)),
        Algebra::Thin => ((1, 10), (1, 10)),
        Algebra::SolvAbelian => ((1, 8), (1, 8)),
        Algebra::Wab { .. } => ((-3, 3), (-6, 6)),
    }
}

/// `lo..hi` (integers), a comma list, or a single value.
pub fn parse_sweep(text: &str) -> Result<Vec<Scalar>> {
    if text.contains("..") {
        let (lo, hi) = parse_range(text)?;
        return Ok((lo..=hi).map(crate::exactlin::int).collect());
    }
    text.split(',').map(|s| parse_scalar(s.trim())).collect()
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Report {
    schema_version: &'static str,
    command: &'static str,
    inputs: BTreeMap<&'static str, Value>,
    results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<u128>,
}

struct Outcome {
    results: Value,
    summary: Vec<String>,
    passed: bool,
    tsv: Option<String>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    let (name, common) = match cli.command {
        Command::Solve(c) => ("solve", c),
        Command::CheckMap(c) => ("check-map", c),
        Command::Local(c) => ("local", c),
        Command::TwoLocal(c) => ("two-local", c),
        Command::Counterexamples(c) => ("counterexamples", c),
        Command::VerifyAll(c) => ("verify-all", c),
    };
    match execute(name, common, started, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn execute(name: &'static str, common: Common, started: Instant, out: &mut dyn Write) -> Result<bool> {
    let common = common.merged()?;
    let outcome = match name {
        "solve" => solve(&common)?,
        "check-map" => check_map(&common)?,
        "local" => local(&common)?,
        "two-local" => two_local(&common)?,
        "counterexamples" => counterexamples(&common)?,
        _ => verify_all(&common)?,
    };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: name,
        inputs: common.echo(),
        results: outcome.results,
        timing_ms: common.timing.then(|| started.elapsed().as_millis()),
    };
    let io = |e: std::io::Error| Error::Config(format!("write failed: {e}"));
    let to_stdout = |p: &Option<PathBuf>| p.as_deref().is_some_and(|p| p.as_os_str() == "-");
    if to_stdout(&common.json) || to_stdout(&common.tsv) {
        for line in &outcome.summary {
            eprintln!("{line}");
        }
    } else {
        for line in &outcome.summary {
            writeln!(out, "{line}").map_err(io)?;
        }
    }
    if let Some(path) = &common.json {
        let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        write_output(path, &text, out)?;
    }
    if let (Some(path), Some(tsv)) = (&common.tsv, &outcome.tsv) {
        write_output(path, tsv, out)?;
    }
    Ok(outcome.passed)
}

fn write_output(path: &Path, text: &str, out: &mut dyn Write) -> Result<()> {
    let res = if path.as_os_str() == "-" {
        out.write_all(text.as_bytes())
    } else {
        std::fs::write(path, text)
    };
    res.map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

fn solve(c: &Common) -> Result<Outcome> {
    let delta = c.delta()?;
    let bs: Vec<Option<Scalar>> = match &c.b {
        Some(text) => parse_sweep(text)?.into_iter().map(Some).collect(),
        None => vec![None],
    };
    let is_half = delta == frac(1, 2);
    let mut results = Vec::new();
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut passed = true;
    for b in bs {
        let alg = c.algebra_with_b(b)?;
        let w = c.window(&alg)?;
        let solved = solve_delta_derivations(&alg, &delta, &w)?;
        let basis: Vec<String> = solved.basis.iter().map(|m| m.to_table_string()).collect();
        let mut entry = json!({
            "algebra": alg.to_string(),
            "window": { "in": keys(w.keys()), "out": keys(w.out_keys()) },
            "delta": delta.to_string(),
            "dimSolved": solved.dim(),
        });
        if is_half {
            let margin = c.margin.unwrap_or_else(|| default_interior_margin(&alg));
            let expected = expected_family(&alg, &w)?;
            let r = compare_families(&solved, &expected, margin);
            passed &= r.certified();
            summary.push(format!(
                "{alg}: dimSolved {} dimExpected {} dimInterior {} (margin {margin}) expectedContained {} solvedInteriorContained {}",
                r.dim_solved, r.dim_expected, r.dim_solved_interior, r.expected_contained, r.solved_interior_contained
            ));
            rows.push(SweepRow::new(&solved, &r));
            let obj = entry.as_object_mut().expect("object");
            obj.insert("dimExpected".into(), json!(r.dim_expected));
            obj.insert("expectedContained".into(), json!(r.expected_contained));
            obj.insert("interiorMargin".into(), json!(r.interior_margin));
            obj.insert("solvedInteriorContained".into(), json!(r.solved_interior_contained));
            obj.insert("dimInterior".into(), json!(r.dim_solved_interior));
            obj.insert("offendingVectors".into(), json!(r.offending_vectors));
        } else {
            summary.push(format!("{alg}: δ = {delta}, dimSolved {}", solved.dim()));
        }
        entry
            .as_object_mut()
            .expect("object")
            .insert("basis".into(), json!(basis));
        results.push(entry);
    }
    let tsv = (!rows.is_empty()).then(|| sweep_tsv(&rows));
    let results = if results.len() == 1 {
        results.pop().expect("one result")
    } else {
        Value::Array(results)
    };
    Ok(Outcome {
        results,
        summary,
        passed,
        tsv,
    })
}

fn keys(k: &[crate::algebras::BasisKey]) -> Vec<String> {
    k.iter().map(|k| k.to_string()).collect()
}

fn check_map(c: &Common) -> Result<Outcome> {
    let alg = c.algebra()?;
    let w = c.window(&alg)?;
    let op = c.operator(&alg)?;
    let delta = c.delta()?;
    let pairs = usable_pairs(&alg, w.keys(), |k| w.contains(k))?;
    let violations = if op.is_linear() {
        check_delta_derivation(&alg, &materialize(&op, &w)?, &delta, &pairs)?
    } else {
        check_delta_derivation(&alg, &op, &delta, &pairs)?
    };
    let listed: Vec<Value> = violations
        .iter()
        .map(|v| json!({"pair": [v.pair.0.to_string(), v.pair.1.to_string()], "residual": format_element(&v.residual)}))
        .collect();
    let mut summary = vec![format!(
        "{op} on {alg}: {} pairs checked, {} violations",
        pairs.len(),
        violations.len()
    )];
    if let Some(v) = violations.first() {
        summary.push(format!("first violation {}", v.describe()));
    }
    Ok(Outcome {
        results: json!({
            "operator": op.to_string(),
            "delta": delta.to_string(),
            "pairsChecked": pairs.len(),
            "violations": listed,
        }),
        summary,
        passed: violations.is_empty(),
        tsv: None,
    })
}

fn parse_elements(v: &[String]) -> Result<Vec<Element>> {
    v.iter().map(|s| parse_element(s)).collect()
}

fn default_sample(alg: &Algebra, w: &Window) -> Vec<Element> {
    if *alg == Algebra::Thin {
        verify::thin_local_sample(w.keys())
    } else {
        deterministic_sample(w.keys(), &SampleSpec::default())
    }
}

fn local(c: &Common) -> Result<Outcome> {
    let alg = c.algebra()?;
    let w = c.window(&alg)?;
    let op = c.operator(&alg)?;
    let family = solve_delta_derivations(&alg, &c.delta()?, &w)?;
    let sample = if c.x.is_empty() {
        default_sample(&alg, &w)
    } else {
        parse_elements(&c.x)?
    };
    let reports = check_local(&op, &family, &sample)?;
    let bad = reports.iter().filter(|r| !r.feasible).count();
    let mut summary = vec![format!(
        "{op} on {alg}: {} elements, {} feasible, {bad} infeasible",
        reports.len(),
        reports.len() - bad
    )];
    summary.extend(
        reports
            .iter()
            .filter(|r| !r.feasible)
            .map(|r| format!("infeasible at {}", format_element(&r.element))),
    );
    Ok(Outcome {
        results: json!({"operator": op.to_string(), "familyDim": family.dim(), "reports": reports}),
        summary,
        passed: bad == 0,
        tsv: None,
    })
}

fn two_local(c: &Common) -> Result<Outcome> {
    let alg = c.algebra()?;
    let w = c.window(&alg)?;
    let op = c.operator(&alg)?;
    let family = solve_delta_derivations(&alg, &c.delta()?, &w)?;
    let pairs = match (c.x.as_slice(), &c.y) {
        ([x], Some(y)) => vec![(parse_element(x)?, parse_element(y)?)],
        ([], None) if alg == Algebra::Thin => verify::nabla_grid(),
        ([], None) => {
            let sample = default_sample(&alg, &w);
            pair_grid(&sample[..sample.len().min(10)])
        }
        _ => return Err(Error::Config("give both --x and --y, or neither".into())),
    };
    let reports = check_two_local(&op, &family, &pairs)?;
    let bad = reports.iter().filter(|r| !r.feasible).count();
    let mut summary = vec![format!(
        "{op} on {alg}: {} pairs, {} feasible, {bad} infeasible",
        reports.len(),
        reports.len() - bad
    )];
    summary.extend(
        reports
            .iter()
            .filter(|r| !r.feasible)
            .map(|r| format!("infeasible at ({}, {})", format_element(&r.x), format_element(&r.y))),
    );
    Ok(Outcome {
        results: json!({"operator": op.to_string(), "familyDim": family.dim(), "reports": reports}),
        summary,
        passed: bad == 0,
        tsv: None,
    })
}

fn counterexamples(c: &Common) -> Result<Outcome> {
    let alg = match &c.algebra {
        Some(_) => c.algebra()?,
        None => Algebra::Thin,
    };
    let half = frac(1, 2);
    let w = c.window(&alg)?;
    let e = crate::algebras::BasisKey::e;
    match alg {
        Algebra::Thin => {
            let m = materialize(&ThinLocalDelta, &w)?;
            let search: Vec<_> = w.keys().iter().copied().filter(|k| k.index != 2).collect();
            let witness = find_violation_witness(&alg, &m, &half, &search)?;
            let family = solve_delta_derivations(&alg, &half, &w)?;
            let sample = verify::thin_local_sample(w.keys());
            let local = check_local(&ThinLocalDelta, &family, &sample)?;
            let nonadd = certify_nonadditive(&ThinNabla, &parse_element("e1 + e2")?, &parse_element("-e1 + e2")?)?;
            let grid = check_two_local(&ThinNabla, &family, &verify::nabla_grid())?;
            let local_ok = local.iter().all(|r| r.feasible);
            let grid_ok = grid.iter().all(|r| r.feasible);
            let witness_ok = witness.as_ref().is_some_and(|v| v.pair == (e(1), e(3)));
            let summary = vec![
                format!(
                    "thin-delta violation witness: {}",
                    witness.as_ref().map_or("none".into(), |v| v.describe())
                ),
                format!("thin-delta local on {} sample elements: {local_ok}", local.len()),
                format!(
                    "thin-nabla non-additivity at (e1 + e2, -e1 + e2): {} (lhs {}, rhs {})",
                    nonadd.nonadditive,
                    format_element(&nonadd.lhs),
                    format_element(&nonadd.rhs)
                ),
                format!("thin-nabla 2-local on {} pairs: {grid_ok}", grid.len()),
            ];
            Ok(Outcome {
                results: json!({
                    "violationWitness": witness.as_ref().map(|v| json!({
                        "pair": [v.pair.0.to_string(), v.pair.1.to_string()],
                        "residual": format_element(&v.residual),
                    })),
                    "localSample": local.len(),
                    "localFeasible": local_ok,
                    "nonAdditivity": nonadd,
                    "twoLocalPairs": grid.len(),
                    "twoLocalFeasible": grid_ok,
                }),
                summary,
                passed: witness_ok && local_ok && nonadd.nonadditive && grid_ok,
                tsv: None,
            })
        }
        Algebra::SolvAbelian => {
            let m = materialize(&SolvDeltaBar, &w)?;
            let witness = find_violation_witness(&alg, &m, &half, w.keys())?;
            let family = solve_delta_derivations(&alg, &half, &w)?;
            let sample = deterministic_sample(w.keys(), &SampleSpec::default());
            let local = check_local(&SolvDeltaBar, &family, &sample)?;
            let local_ok = local.iter().all(|r| r.feasible);
            let witness_ok = witness.as_ref().is_some_and(|v| v.pair == (e(1), e(2)));
            Ok(Outcome {
                results: json!({
                    "violationWitness": witness.as_ref().map(|v| json!({
                        "pair": [v.pair.0.to_string(), v.pair.1.to_string()],
                        "residual": format_element(&v.residual),
                    })),
                    "localSample": local.len(),
                    "localFeasible": local_ok,
                }),
                summary: vec![
                    format!(
                        "solv-deltabar violation witness: {}",
                        witness.as_ref().map_or("none".into(), |v| v.describe())
                    ),
                    format!("solv-deltabar local on {} sample elements: {local_ok}", local.len()),
                ],
                passed: witness_ok && local_ok,
                tsv: None,
            })
        }
        other => Err(Error::Config(format!(
            "counterexamples are catalogued for thin and solv, not {other}"
        ))),
    }
}

fn verify_all(c: &Common) -> Result<Outcome> {
    let profile = if c.quick { Profile::Quick } else { Profile::Full };
    let report = verify::run_suite(profile);
    Ok(Outcome {
        summary: report.lines(),
        passed: report.passed,
        results: serde_json::to_value(&report).expect("report serializes"),
        tsv: None,
    })
}
