//! Window-scale acceptance suite.
//!
//! Each criterion is a list of named checks; a criterion passes when all of
//! its checks pass. Frozen values (interior margins, infeasible scan sets)
//! were produced by the solver and are re-derived here on every run.

use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebras::{Algebra, BasisKey, Element};
use crate::dersolve::{
    certify_window, check_delta_derivation, find_violation_witness,
    solve_half_derivations, sweep_tsv, window_pairs, FamilyBasis, SweepRow,
};
use crate::error::Result;
use crate::exactlin::{frac, in_span, int, Scalar};
use crate::locality::{
    certify_nonadditive, check_local, check_two_local, deterministic_sample, local_feasible_at,
    pair_grid, separating_kernel_dim, wab_f_scan, zero_propagation_scan, SampleSpec,
};
use crate::operators::{
    materialize, Evaluate, Operator, ShiftOp, SolvDeltaBar, ThinHalfDer, ThinLocalDelta,
    ThinNabla, Window, WindowedMap,
};
use crate::text::{format_element, parse_element};

/// Checks known to fail because the criterion pins a value that contradicts
/// the definitions it is computed from: ∇(e1+e2) + ∇(−e1+e2) = 2e2.
pub const KNOWN_UNATTAINABLE: &[(u8, &str)] = &[(6, "rhs equals stated e2")];

/// c-values in 1..=10 at which the WittZ scan (m = 0, value e1) is infeasible.
pub const WITTZ_SCAN_INFEASIBLE: [i64; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];
/// Same for WittPos (m = 1, value e2).
pub const WITTPOS_SCAN_INFEASIBLE: [i64; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Full,
    Quick,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl CriterionResult {
    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ok = self.checks.iter().filter(|c| c.passed).count();
        write!(
            f,
            "criterion {:>2} {} {} ({}/{} checks)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            ok,
            self.checks.len()
        )?;
        for c in self.failing() {
            write!(f, "\n    failed {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub profile: Profile,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn lines(&self) -> Vec<String> {
        self.criteria.iter().map(|c| c.to_string()).collect()
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn run(&mut self, name: &str, f: impl FnOnce(&mut Checks) -> Result<()>) {
        if let Err(e) = f(self) {
            self.push(name, false, format!("error: {e}"));
        }
    }
}

fn el(s: &str) -> Element {
    parse_element(s).expect("literal element")
}

fn e(i: i64) -> BasisKey {
    BasisKey::e(i)
}

fn window(alg: &Algebra, i: (i64, i64), o: (i64, i64)) -> Result<Window> {
    Window::ranges(alg, i, o)
}

type CriterionFn = fn(&mut Checks, Profile);

pub fn run_suite(profile: Profile) -> SuiteReport {
    let criteria: Vec<(u8, &'static str, CriterionFn)> = vec![
        (1, "bracket axioms", bracket_axioms),
        (2, "shift containment", shift_containment),
        (3, "interior completeness", interior_completeness),
        (4, "wab dichotomy", wab_dichotomy),
        (5, "thin local counterexample", thin_local),
        (6, "thin 2-local counterexample", thin_two_local),
        (7, "solvable algebra", solvable),
        (8, "zero-propagation scans", zero_propagation_scans),
        (9, "separating-point injectivity", separating_points),
        (10, "commutator property", commutators),
    ];
    let criteria: Vec<CriterionResult> = criteria
        .into_iter()
        .map(|(id, title, f)| {
            let mut checks = Checks::default();
            f(&mut checks, profile);
            let passed = !checks.0.is_empty() && checks.0.iter().all(|c| c.passed);
            CriterionResult {
                id,
                title,
                passed,
                checks: checks.0,
            }
        })
        .collect();
    SuiteReport {
        profile,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}

/// The algebras of the bracket-axiom criterion with their index ranges.
pub fn axiom_cases(profile: Profile) -> Vec<(Algebra, i64, i64)> {
    let span = if profile == Profile::Quick { 4 } else { 8 };
    let mut out = vec![
        (Algebra::WittZ, -span, span),
        (Algebra::WittPos, 1, 2 * span),
        (Algebra::WittOneSided, -1, 2 * span - 1),
        (Algebra::Thin, 1, 2 * span),
        (Algebra::SolvAbelian, 1, 2 * span),
    ];
    for (a, b) in [(int(0), int(0)), (int(1), int(-1)), (frac(1, 2), int(-1)), (int(0), int(2))] {
        out.push((Algebra::wab(a, b), -span, span));
    }
    out
}

/// First basis triple failing Jacobi, or pair failing antisymmetry.
pub fn bracket_axiom_violation(alg: &Algebra, lo: i64, hi: i64) -> Result<Option<String>> {
    let keys = alg.keys_in_range(lo, hi);
    for x in &keys {
        for y in &keys {
            let xy = alg.bracket(*x, *y)?;
            if !xy.plus(&alg.bracket(*y, *x)?).is_zero() {
                return Ok(Some(format!("antisymmetry fails at ({x}, {y})")));
            }
        }
    }
    for (p, x) in keys.iter().enumerate() {
        for (q, y) in keys.iter().enumerate().skip(p + 1) {
            for z in &keys[q + 1..] {
                let (ex, ey, ez) = (Element::unit(*x), Element::unit(*y), Element::unit(*z));
                let mut j = alg.bracket_vec(&ex, &alg.bracket(*y, *z)?)?;
                j.add_scaled(&alg.bracket_vec(&ey, &alg.bracket(*z, *x)?)?, &Scalar::one());
                j.add_scaled(&alg.bracket_vec(&ez, &alg.bracket(*x, *y)?)?, &Scalar::one());
                if !j.is_zero() {
                    return Ok(Some(format!(
                        "Jacobi fails at ({x}, {y}, {z}): {}",
                        format_element(&j)
                    )));
                }
            }
        }
    }
    Ok(None)
}

fn bracket_axioms(c: &mut Checks, profile: Profile) {
    for (alg, lo, hi) in axiom_cases(profile) {
        let name = format!("{alg} on [{lo},{hi}]");
        c.run(&name.clone(), |c| {
            let bad = bracket_axiom_violation(&alg, lo, hi)?;
            c.push(name, bad.is_none(), bad.unwrap_or_else(|| "ok".into()));
            Ok(())
        });
    }
}

/// Materializable shifts on a window, in increasing t.
pub fn materializable_shifts(alg: &Algebra, w: &Window, t_range: (i64, i64)) -> Result<Vec<(i64, WindowedMap)>> {
    let mut out = Vec::new();
    for t in t_range.0..=t_range.1 {
        let op = ShiftOp::new(alg, t, Scalar::one())?;
        if let Ok(m) = materialize(&op, w) {
            out.push((t, m));
        }
    }
    Ok(out)
}

fn shift_containment(c: &mut Checks, _: Profile) {
    let cases = [
        (Algebra::WittZ, (-4, 4), (-12, 12), (-20, 20), 17),
        (Algebra::WittPos, (1, 8), (1, 16), (0, 20), 9),
        (Algebra::WittOneSided, (-1, 5), (-1, 12), (0, 20), 8),
    ];
    for (alg, i, o, t_range, expected_count) in cases {
        let name = format!("{alg} I={i:?} O={o:?}");
        c.run(&name.clone(), |c| {
            let w = window(&alg, i, o)?;
            let solved = solve_half_derivations(&alg, &w)?;
            let spans: Vec<_> = solved.basis.iter().map(|m| m.coefficients()).collect();
            let shifts = materializable_shifts(&alg, &w, t_range)?;
            c.push(
                format!("{name}: shift count"),
                shifts.len() == expected_count,
                format!("{} materializable shifts, expected {expected_count}", shifts.len()),
            );
            let pairs = window_pairs(&alg, &WindowedMap::identity(w.clone()))?;
            let mut bad = Vec::new();
            for (t, m) in &shifts {
                let residual_ok = check_delta_derivation(&alg, m, &frac(1, 2), &pairs)?.is_empty();
                if !residual_ok || !in_span(&m.coefficients(), &spans) {
                    bad.push(*t);
                }
            }
            c.push(
                format!("{name}: checker and span"),
                bad.is_empty(),
                format!("{} pairs checked; failing t: {bad:?}", pairs.len()),
            );
            Ok(())
        });
    }
}

/// Inclusive index range `(lo, hi)`.
pub type Range = (i64, i64);

/// The windows on which interior completeness is certified.
pub fn certified_windows() -> Vec<(Algebra, Range, Range)> {
    let mut out = vec![
        (Algebra::WittZ, (-4, 4), (-12, 12)),
        (Algebra::WittPos, (1, 8), (1, 16)),
        (Algebra::WittOneSided, (-1, 5), (-1, 12)),
        (Algebra::Thin, (1, 6), (1, 10)),
        (Algebra::Thin, (1, 10), (1, 10)),
        (Algebra::SolvAbelian, (1, 8), (1, 8)),
    ];
    for b in -3..=3 {
        out.push((Algebra::wab(int(0), int(b)), (-3, 3), (-6, 6)));
    }
    out.push((Algebra::wab(int(1), int(-1)), (-3, 3), (-6, 6)));
    out.push((Algebra::wab(frac(1, 2), int(-1)), (-3, 3), (-6, 6)));
    out
}

fn interior_completeness(c: &mut Checks, profile: Profile) {
    let windows = certified_windows();
    let take = if profile == Profile::Quick { 8 } else { windows.len() };
    for (alg, i, o) in windows.into_iter().take(take) {
        let name = format!("{alg} I={i:?} O={o:?}");
        c.run(&name.clone(), |c| {
            let w = window(&alg, i, o)?;
            let (solved, _, r) = certify_window(&alg, &w)?;
            let full_rank = r.interior_keys > 0
                && r.dim_solved_interior == r.dim_expected_interior
                && r.dim_expected_interior == r.dim_expected;
            c.push(
                name.clone(),
                r.certified() && full_rank,
                format!(
                    "margin {} ({} interior keys): expectedContained={} solvedInteriorContained={} dims solved/expected/interior = {}/{}/{}",
                    r.interior_margin,
                    r.interior_keys,
                    r.expected_contained,
                    r.solved_interior_contained,
                    r.dim_solved,
                    r.dim_expected,
                    r.dim_solved_interior
                ),
            );
            let pairs = window_pairs(&alg, &WindowedMap::identity(w.clone()))?;
            let mut unsound = 0;
            for m in &solved.basis {
                if !check_delta_derivation(&alg, m, &frac(1, 2), &pairs)?.is_empty() {
                    unsound += 1;
                }
            }
            c.push(
                format!("{name}: soundness"),
                unsound == 0,
                format!("{unsound} solved maps fail the checker"),
            );
            Ok(())
        });
    }
}

/// Sweep over `W(0,b)`, b in -3..=3, on I=E∪F(-3..3), O=E∪F(-6..6).
pub fn wab_sweep() -> Result<Vec<SweepRow>> {
    (-3..=3)
        .map(|b| {
            let alg = Algebra::wab(int(0), int(b));
            let w = window(&alg, (-3, 3), (-6, 6))?;
            let (solved, _, r) = certify_window(&alg, &w)?;
            Ok(SweepRow::new(&solved, &r))
        })
        .collect()
}

fn wab_dichotomy(c: &mut Checks, _: Profile) {
    c.run("sweep", |c| {
        let rows = wab_sweep()?;
        let alg = Algebra::wab(int(0), int(-1));
        let w = window(&alg, (-3, 3), (-6, 6))?;
        let (_, expected, _) = certify_window(&alg, &w)?;
        for row in &rows {
            let b: i64 = row.b.as_deref().unwrap_or("0").parse().unwrap_or(0);
            let want = if b == -1 { expected.dim() } else { 1 };
            c.push(
                format!("b={b}"),
                row.dim_interior == want,
                format!("interior dimension {}, expected {want}", row.dim_interior),
            );
        }
        let jumps: Vec<String> = rows
            .iter()
            .filter(|r| r.dim_interior != 1)
            .map(|r| r.b.clone().unwrap_or_default())
            .collect();
        c.push(
            "jump location",
            jumps == ["-1"],
            format!("dimension differs from 1 at b in {jumps:?}\n{}", sweep_tsv(&rows)),
        );
        Ok(())
    });
}

/// Thin family on I = O = E(1..10), used for all thin locality checks.
pub fn thin_family() -> Result<FamilyBasis> {
    let alg = Algebra::Thin;
    solve_half_derivations(&alg, &window(&alg, (1, 10), (1, 10))?)
}

/// Solvable family on I = O = E(1..8).
pub fn solv_family() -> Result<FamilyBasis> {
    let alg = Algebra::SolvAbelian;
    solve_half_derivations(&alg, &window(&alg, (1, 8), (1, 8))?)
}

/// Deterministic thin sample: the generic sample of the window plus the
/// elements the constructions pivot on.
pub fn thin_local_sample(keys: &[BasisKey]) -> Vec<Element> {
    let mut out: Vec<Element> = ["e3 + e5", "e1 + e3", "e1", "e2", "e1 + e4", "e2 + 3*e7", "2*e1 - e3 + e6"]
        .iter()
        .map(|s| el(s))
        .collect();
    out.extend(deterministic_sample(keys, &SampleSpec::default()));
    let mut seen = std::collections::BTreeSet::new();
    out.retain(|x| seen.insert(format_element(x)));
    out
}

/// Closed-form thin parameters reproducing Δ(x): α = (1) when x₁ = 0,
/// otherwise α_j = (1 − 2^{2−j}) x_j / x₁ for j ≥ 3 and α₁ = α₂ = 0.
pub fn thin_delta_local_params(x: &Element) -> ThinHalfDer {
    let x1 = x.coeff(&e(1));
    if x1.is_zero() {
        return ThinHalfDer::new(vec![Scalar::one()], Vec::new());
    }
    let top = x.last_key().map_or(1, |k| k.index.max(1)) as usize;
    let mut alpha = vec![Scalar::zero(); top];
    for (k, v) in x.iter() {
        if k.index >= 3 {
            alpha[k.index as usize - 1] = (Scalar::one() - crate::exactlin::pow2(2 - k.index)) * v / &x1;
        }
    }
    ThinHalfDer::new(alpha, Vec::new())
}

fn thin_local(c: &mut Checks, _: Profile) {
    let alg = Algebra::Thin;
    let half = frac(1, 2);
    c.run("witness", |c| {
        let m = materialize(&ThinLocalDelta, &window(&alg, (1, 8), (1, 8))?)?;
        let direct = check_delta_derivation(&alg, &m, &half, &[(e(1), e(3))])?;
        let want = Element::term(e(4), frac(1, 2));
        c.push(
            "residual at (e1, e3)",
            direct.len() == 1 && direct[0].residual == want,
            direct.first().map_or("no violation".into(), |v| v.describe()),
        );
        let keys: Vec<BasisKey> = (1..=8).filter(|i| *i != 2).map(e).collect();
        let w = find_violation_witness(&alg, &m, &half, &keys)?;
        c.push(
            "witness over e1, e3..e8",
            w.as_ref().is_some_and(|v| v.pair == (e(1), e(3)) && v.residual == want),
            w.as_ref().map_or("none".into(), |v| v.describe()),
        );
        let all: Vec<BasisKey> = (1..=8).map(e).collect();
        let first = find_violation_witness(&alg, &m, &half, &all)?;
        c.push(
            "first witness over e1..e8",
            first
                .as_ref()
                .is_some_and(|v| v.pair == (e(1), e(2)) && v.residual == Element::term(e(3), frac(1, 2))),
            first.as_ref().map_or("none".into(), |v| v.describe()),
        );
        Ok(())
    });
    c.run("local", |c| {
        let family = thin_family()?;
        let sample = thin_local_sample(family.window.keys());
        let reports = check_local(&ThinLocalDelta, &family, &sample)?;
        let bad: Vec<String> = reports
            .iter()
            .filter(|r| !r.feasible)
            .map(|r| format_element(&r.element))
            .collect();
        c.push(
            "check_local",
            sample.len() >= 25 && bad.is_empty(),
            format!("{} elements, infeasible: {bad:?}", sample.len()),
        );
        let mut mismatched = Vec::new();
        for x in &sample {
            let d = thin_delta_local_params(x);
            if d.evaluate(x)? != ThinLocalDelta.evaluate(x)? {
                mismatched.push(format_element(x));
            }
        }
        c.push(
            "closed-form parameters",
            mismatched.is_empty(),
            format!("mismatched at {mismatched:?}"),
        );
        Ok(())
    });
}

/// Points for the thin 2-local grid: four with x₁ = 0, five with x₁ ≠ 0.
pub fn nabla_grid_points() -> Vec<Element> {
    [
        "e2 + e3",
        "5*e4",
        "e2 - 2*e5",
        "3*e3 + e7",
        "e1 + e2",
        "-e1 + e2 + e3",
        "2*e1 - e3 + e6",
        "e1",
        "-3*e1 + e4 + 1/2*e5",
    ]
    .iter()
    .map(|s| el(s))
    .collect()
}

/// All pairs of [`nabla_grid_points`] plus (x, λx) for λ ∈ {2, −1/3}.
pub fn nabla_grid() -> Vec<(Element, Element)> {
    let points = nabla_grid_points();
    let mut out = pair_grid(&points);
    for x in &points {
        for l in [int(2), frac(-1, 3)] {
            out.push((x.clone(), x.scaled(&l)));
        }
    }
    out
}

fn thin_two_local(c: &mut Checks, _: Profile) {
    c.run("nonadditivity", |c| {
        let r = certify_nonadditive(&ThinNabla, &el("e1 + e2"), &el("-e1 + e2"))?;
        c.push(
            "nonadditive",
            r.nonadditive && r.lhs.is_zero(),
            format!("lhs {}, rhs {}", format_element(&r.lhs), format_element(&r.rhs)),
        );
        c.push(
            "rhs equals stated e2",
            r.rhs == el("e2"),
            format!(
                "rhs is {}: both summands evaluate to e2 under the defining formula",
                format_element(&r.rhs)
            ),
        );
        Ok(())
    });
    c.run("grid", |c| {
        let family = thin_family()?;
        let grid = nabla_grid();
        let reports = check_two_local(&ThinNabla, &family, &grid)?;
        let mut cases = [0usize; 3];
        for (x, y) in &grid {
            let zeros = [x, y].iter().filter(|v| v.coeff(&e(1)).is_zero()).count();
            cases[2 - zeros] += 1;
        }
        let bad: Vec<String> = reports
            .iter()
            .filter(|r| !r.feasible)
            .map(|r| format!("({}, {})", format_element(&r.x), format_element(&r.y)))
            .collect();
        c.push(
            "two_local_feasible_at",
            grid.len() >= 20 && cases.iter().all(|n| *n > 0) && bad.is_empty(),
            format!(
                "{} pairs (both x1 = 0: {}, one: {}, neither: {}), infeasible: {bad:?}",
                grid.len(),
                cases[0],
                cases[1],
                cases[2]
            ),
        );
        let mut mismatch = 0;
        for r in reports.iter().filter(|r| r.feasible) {
            let m = family.combination(r.params.as_ref().expect("feasible"));
            let local_x = local_feasible_at(&ThinNabla, &r.x, &family)?.feasible;
            if m.evaluate(&r.x)? != ThinNabla.evaluate(&r.x)?
                || m.evaluate(&r.y)? != ThinNabla.evaluate(&r.y)?
                || !local_x
            {
                mismatch += 1;
            }
        }
        c.push("witness parameters", mismatch == 0, format!("{mismatch} witnesses fail"));
        Ok(())
    });
}

fn solvable(c: &mut Checks, _: Profile) {
    let alg = Algebra::SolvAbelian;
    c.run("solve", |c| {
        let w = window(&alg, (1, 8), (1, 8))?;
        let (_, expected, r) = certify_window(&alg, &w)?;
        c.push(
            "interior comparison with D_alpha",
            r.certified() && r.dim_expected == expected.dim(),
            format!(
                "solved {} expected {} interior {} certified {}",
                r.dim_solved,
                r.dim_expected,
                r.dim_solved_interior,
                r.certified()
            ),
        );
        let m = materialize(&SolvDeltaBar, &w)?;
        let v = check_delta_derivation(&alg, &m, &frac(1, 2), &[(e(1), e(2))])?;
        c.push(
            "deltabar residual at (e1, e2)",
            v.len() == 1 && v[0].residual == Element::term(e(2), frac(1, 2)),
            v.first().map_or("no violation".into(), |v| v.describe()),
        );
        Ok(())
    });
    c.run("local", |c| {
        let family = solv_family()?;
        let mut sample: Vec<Element> = ["e1", "e1 + e2 + e3", "e4", "e1 + e2"].iter().map(|s| el(s)).collect();
        sample.extend(deterministic_sample(family.window.keys(), &SampleSpec::default()));
        let reports = check_local(&SolvDeltaBar, &family, &sample)?;
        let bad = reports.iter().filter(|r| !r.feasible).count();
        c.push(
            "deltabar check_local",
            bad == 0,
            format!("{} elements, {bad} infeasible", sample.len()),
        );
        let cand: Operator = "table:e2=e3".parse()?;
        let r = local_feasible_at(&cand, &el("e2"), &family)?;
        c.push("e2 -> e3 is not local at e2", !r.feasible, format!("feasible={}", r.feasible));
        Ok(())
    });
}

fn scan_infeasible(alg: &Algebra, value: &str, m: i64, i: (i64, i64), o: (i64, i64)) -> Result<Vec<i64>> {
    let family = solve_half_derivations(alg, &window(alg, i, o)?)?;
    let cs: Vec<Scalar> = (1..=10).map(int).collect();
    let scan = zero_propagation_scan(alg, &el(value), m, &cs, &family)?;
    Ok(scan
        .iter()
        .filter(|p| !p.feasible)
        .map(|p| p.c.to_integer().try_into().unwrap_or(i64::MAX))
        .collect())
}

fn zero_propagation_scans(c: &mut Checks, _: Profile) {
    c.run("wittz scan", |c| {
        let got = scan_infeasible(&Algebra::WittZ, "e1", 0, (-6, 6), (-10, 10))?;
        c.push(
            "wittz m=0 value e1",
            !got.is_empty() && got == WITTZ_SCAN_INFEASIBLE,
            format!("infeasible c: {got:?}"),
        );
        Ok(())
    });
    c.run("wittpos scan", |c| {
        let got = scan_infeasible(&Algebra::WittPos, "e2", 1, (1, 8), (1, 16))?;
        c.push(
            "wittpos m=1 value e2",
            !got.is_empty() && got == WITTPOS_SCAN_INFEASIBLE,
            format!("infeasible c: {got:?}"),
        );
        Ok(())
    });
    c.run("wab f-scan", |c| {
        let alg = Algebra::wab(int(0), int(-1));
        let family = solve_half_derivations(&alg, &window(&alg, (-3, 3), (-6, 6))?)?;
        for (value, want) in [("0", true), ("f1", false), ("3*f0", false)] {
            let r = wab_f_scan(&alg, &el(value), 0, &family)?;
            c.push(
                format!("value {value}"),
                r.feasible == want,
                format!("probe {} feasible={}", format_element(&r.probe), r.feasible),
            );
        }
        Ok(())
    });
}

fn separating_points(c: &mut Checks, _: Profile) {
    for (alg, i, o) in certified_windows() {
        if alg == Algebra::Thin {
            continue;
        }
        let name = format!("{alg} at {}", alg.separating_key());
        c.run(&name.clone(), |c| {
            let (solved, _, r) = certify_window(&alg, &window(&alg, i, o)?)?;
            let kernel = separating_kernel_dim(&solved, alg.separating_key())?;
            c.push(
                name,
                r.certified() && kernel == 0,
                format!("family dimension {}, kernel dimension {kernel}", solved.dim()),
            );
            Ok(())
        });
    }
    c.run("thin control", |c| {
        // No separating point: the β directions vanish at e1.
        let family = thin_family()?;
        let kernel = separating_kernel_dim(&family, e(1))?;
        let betas = (2..=10)
            .filter(|i| materialize(&ThinHalfDer::beta_unit(*i), &family.window).is_ok())
            .count();
        c.push(
            "thin kernel equals beta directions",
            kernel == betas && kernel > 0,
            format!("kernel {kernel}, beta directions {betas}"),
        );
        Ok(())
    });
}

/// `count` seeded pairs of integer combinations of `family`.
pub fn seeded_pairs(family: &FamilyBasis, count: usize, seed: u64) -> Vec<(WindowedMap, WindowedMap)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let coeffs: Vec<Scalar> = (0..family.dim()).map(|_| int(rng.gen_range(-3..=3))).collect();
        family.combination(&coeffs)
    };
    (0..count).map(|_| (draw(&mut rng), draw(&mut rng))).collect()
}

/// Checks the commutator of each pair as a ¼-derivation on all pairs of its
/// tabulated keys. Returns (pairs checked, nonzero commutators, failures).
pub fn commutator_check(alg: &Algebra, pairs: &[(WindowedMap, WindowedMap)]) -> Result<(usize, usize, Vec<String>)> {
    let mut checked = 0;
    let mut nonzero = 0;
    let mut failures = Vec::new();
    for (n, (a, b)) in pairs.iter().enumerate() {
        let Some(comm) = WindowedMap::commutator(alg, a, b)? else {
            failures.push(format!("pair {n}: no common keys"));
            continue;
        };
        if !comm.is_zero() {
            nonzero += 1;
        }
        let key_pairs = window_pairs(alg, &comm)?;
        checked += key_pairs.len();
        if let Some(v) = check_delta_derivation(alg, &comm, &frac(1, 4), &key_pairs)?.first() {
            failures.push(format!("pair {n}: {}", v.describe()));
        }
    }
    Ok((checked, nonzero, failures))
}

fn commutators(c: &mut Checks, profile: Profile) {
    let count = if profile == Profile::Quick { 4 } else { 10 };
    c.run("wittz", |c| {
        let alg = Algebra::WittZ;
        let family = solve_half_derivations(&alg, &window(&alg, (-10, 10), (-12, 12))?)?;
        let pairs = seeded_pairs(&family, count, 11);
        let (checked, nonzero, failures) = commutator_check(&alg, &pairs)?;
        c.push(
            "wittz commutators",
            failures.is_empty() && checked > 0,
            format!("{} pairs, {checked} key pairs checked, {nonzero} nonzero; {failures:?}", pairs.len()),
        );
        Ok(())
    });
    c.run("thin", |c| {
        let alg = Algebra::Thin;
        let family = solve_half_derivations(&alg, &window(&alg, (1, 10), (1, 14))?)?;
        let pairs = seeded_pairs(&family, count, 12);
        let (checked, nonzero, failures) = commutator_check(&alg, &pairs)?;
        c.push(
            "thin commutators",
            failures.is_empty() && checked > 0 && nonzero > 0,
            format!("{} pairs, {checked} key pairs checked, {nonzero} nonzero; {failures:?}", pairs.len()),
        );
        Ok(())
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_thin_params_match_corrected_case_two() {
        let d = thin_delta_local_params(&el("e1 + e3"));
        assert_eq!(d.alpha_at(3), frac(1, 2));
        assert!(d.alpha_at(1).is_zero() && d.alpha_at(2).is_zero());
        assert_eq!(d.evaluate(&el("e1 + e3")).unwrap(), el("1/2*e3"));
    }

    #[test]
    fn grid_covers_all_cases() {
        let grid = nabla_grid();
        assert!(grid.len() >= 20);
        let both = grid.iter().filter(|(x, y)| x.coeff(&e(1)).is_zero() && y.coeff(&e(1)).is_zero()).count();
        let neither = grid.iter().filter(|(x, y)| !x.coeff(&e(1)).is_zero() && !y.coeff(&e(1)).is_zero()).count();
        assert!(both > 0 && neither > 0 && both + neither < grid.len());
    }

    #[test]
    fn wab_passes_axioms_on_small_box() {
        let alg = Algebra::wab(int(0), int(0));
        assert!(bracket_axiom_violation(&alg, -2, 2).unwrap().is_none());
    }
}
