//! Local and 2-local feasibility against finite δ-derivation families.
//!
//! A candidate Δ is local at x when some member of the family agrees with Δ
//! at x, and 2-local at (x, y) when one member agrees at both points. On a
//! window the family is finite-dimensional, so each question is an exact
//! linear feasibility problem in the family parameters.

use std::collections::BTreeMap;

use num_traits::One;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebras::{Algebra, BasisKey, Element, KeyKind};
use crate::dersolve::FamilyBasis;
use crate::error::{Error, Result};
use crate::exactlin::{int, rank_of, solve_feasible, ColVec, Feasibility, RatMatrix, Scalar};
use crate::operators::Evaluate;
use crate::text::{as_text, format_element};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalReport {
    #[serde(serialize_with = "as_text::element")]
    pub element: Element,
    pub feasible: bool,
    /// Coefficients over the family basis, when feasible.
    #[serde(serialize_with = "as_text::opt_scalars")]
    pub params: Option<Vec<Scalar>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoLocalReport {
    #[serde(serialize_with = "as_text::element")]
    pub x: Element,
    #[serde(serialize_with = "as_text::element")]
    pub y: Element,
    pub feasible: bool,
    #[serde(serialize_with = "as_text::opt_scalars")]
    pub params: Option<Vec<Scalar>>,
}

/// Solves Σ c_k B_k(x) = target jointly over all `(x, target)` points.
/// Returns one parameter vector, or `None` if the system is infeasible.
pub fn match_family(family: &FamilyBasis, points: &[(Element, Element)]) -> Result<Option<Vec<Scalar>>> {
    let dim = family.dim();
    let mut row_of: BTreeMap<(usize, BasisKey), usize> = BTreeMap::new();
    let mut rows: Vec<ColVec> = Vec::new();
    let mut rhs = ColVec::zero();
    let mut row = |p: usize, key: BasisKey, rows: &mut Vec<ColVec>| {
        *row_of.entry((p, key)).or_insert_with(|| {
            rows.push(ColVec::zero());
            rows.len() - 1
        })
    };
    for (p, (x, target)) in points.iter().enumerate() {
        require_support(family, x)?;
        for (k, image) in family.images_at(x)?.iter().enumerate() {
            for (key, c) in image.iter() {
                let r = row(p, *key, &mut rows);
                rows[r].add_term(k, c.clone());
            }
        }
        for (key, c) in target.iter() {
            let r = row(p, *key, &mut rows);
            rhs.add_term(r, c.clone());
        }
    }
    let a = RatMatrix::from_rows(dim, rows);
    Ok(match solve_feasible(&a, &rhs) {
        Feasibility::Feasible(sol) => Some((0..dim).map(|k| sol.coeff(&k)).collect()),
        Feasibility::Infeasible { .. } => None,
    })
}

fn require_support(family: &FamilyBasis, x: &Element) -> Result<()> {
    match x.keys().find(|k| !family.window.contains(k)) {
        Some(k) => Err(Error::WindowTooSmall(*k)),
        None => Ok(()),
    }
}

pub fn local_feasible_at(candidate: &dyn Evaluate, x: &Element, family: &FamilyBasis) -> Result<LocalReport> {
    require_support(family, x)?;
    let target = candidate.evaluate(x)?;
    let params = match_family(family, &[(x.clone(), target)])?;
    Ok(LocalReport {
        element: x.clone(),
        feasible: params.is_some(),
        params,
    })
}

pub fn check_local(
    candidate: &dyn Evaluate,
    family: &FamilyBasis,
    sample: &[Element],
) -> Result<Vec<LocalReport>> {
    sample
        .iter()
        .map(|x| local_feasible_at(candidate, x, family))
        .collect()
}

pub fn two_local_feasible_at(
    candidate: &dyn Evaluate,
    x: &Element,
    y: &Element,
    family: &FamilyBasis,
) -> Result<TwoLocalReport> {
    require_support(family, x)?;
    require_support(family, y)?;
    let points = [
        (x.clone(), candidate.evaluate(x)?),
        (y.clone(), candidate.evaluate(y)?),
    ];
    let params = match_family(family, &points)?;
    Ok(TwoLocalReport {
        x: x.clone(),
        y: y.clone(),
        feasible: params.is_some(),
        params,
    })
}

pub fn check_two_local(
    candidate: &dyn Evaluate,
    family: &FamilyBasis,
    pairs: &[(Element, Element)],
) -> Result<Vec<TwoLocalReport>> {
    pairs
        .iter()
        .map(|(x, y)| two_local_feasible_at(candidate, x, y, family))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanPoint {
    #[serde(serialize_with = "as_text::scalar")]
    pub c: Scalar,
    pub feasible: bool,
}

/// For each c, whether some family member sends e_{m+1} − c·e_m to `value`.
/// This is the value at that point of any linear Δ with Δ(e_m) = 0 and
/// Δ(e_{m+1}) = `value`.
pub fn zero_propagation_scan(
    alg: &Algebra,
    value: &Element,
    m: i64,
    c_values: &[Scalar],
    family: &FamilyBasis,
) -> Result<Vec<ScanPoint>> {
    for k in [BasisKey::e(m), BasisKey::e(m + 1)] {
        if !alg.in_domain(k) {
            return Err(Error::KeyOutOfDomain {
                key: k,
                algebra: alg.to_string(),
            });
        }
    }
    c_values
        .iter()
        .map(|c| {
            let mut x = Element::unit(BasisKey::e(m + 1));
            x.add_term(BasisKey::e(m), -c.clone());
            let feasible = match_family(family, &[(x, value.clone())])?.is_some();
            Ok(ScanPoint {
                c: c.clone(),
                feasible,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WabFScan {
    /// Index k of the probe f_m + e_m + e_k.
    pub k: i64,
    #[serde(serialize_with = "as_text::element")]
    pub probe: Element,
    pub feasible: bool,
}

/// Probes a linear Δ with Δ(e_m) = Δ(e_k) = 0 and Δ(f_m) = `value` at
/// x = f_m + e_m + e_k, where `value` is supported on f_{m+p}..f_{m+q} and
/// k = q − p + m + 1.
pub fn wab_f_scan(alg: &Algebra, value: &Element, m: i64, family: &FamilyBasis) -> Result<WabFScan> {
    if !alg.is_wab_critical() {
        return Err(Error::Config(format!("the f-scan needs W(a,-1), got {alg}")));
    }
    if let Some(k) = value.keys().find(|k| k.kind != KeyKind::F) {
        return Err(Error::Config(format!("f-scan value must be f-supported, found {k}")));
    }
    let (p, q) = match (value.first_key(), value.last_key()) {
        (Some(lo), Some(hi)) => (lo.index - m, hi.index - m),
        _ => (0, 0),
    };
    let k = q - p + m + 1;
    let probe: Element = [
        (BasisKey::f(m), Scalar::one()),
        (BasisKey::e(m), Scalar::one()),
        (BasisKey::e(k), Scalar::one()),
    ]
    .into_iter()
    .collect();
    let feasible = match_family(family, &[(probe.clone(), value.clone())])?.is_some();
    Ok(WabFScan { k, probe, feasible })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonAdditivity {
    pub nonadditive: bool,
    /// candidate(x + y)
    #[serde(serialize_with = "as_text::element")]
    pub lhs: Element,
    /// candidate(x) + candidate(y)
    #[serde(serialize_with = "as_text::element")]
    pub rhs: Element,
}

pub fn certify_nonadditive(candidate: &dyn Evaluate, x: &Element, y: &Element) -> Result<NonAdditivity> {
    let lhs = candidate.evaluate(&x.plus(y))?;
    let rhs = candidate.evaluate(x)?.plus(&candidate.evaluate(y)?);
    Ok(NonAdditivity {
        nonadditive: lhs != rhs,
        lhs,
        rhs,
    })
}

/// Dimension of the kernel of `params ↦ Σ c_k B_k(e_key)`. Zero means the
/// family is determined by its value at `key`.
pub fn separating_kernel_dim(family: &FamilyBasis, key: BasisKey) -> Result<usize> {
    let images = family.images_at(&Element::unit(key))?;
    Ok(family.dim() - rank_of(&images))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSpec {
    /// Pairwise sums are taken among the first `box_size` keys.
    pub box_size: usize,
    pub triples: usize,
    pub seed: u64,
    /// Triple coefficients are drawn from ±1..=max_coeff.
    pub max_coeff: i64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            box_size: 6,
            triples: 12,
            seed: 20,
            max_coeff: 3,
        }
    }
}

/// Every key, every e_i + e_j among the first `box_size` keys, then seeded
/// 3-term combinations. Duplicates are dropped, first occurrence kept.
pub fn deterministic_sample(keys: &[BasisKey], spec: &SampleSpec) -> Vec<Element> {
    let mut keys = keys.to_vec();
    keys.sort();
    keys.dedup();
    let mut out: Vec<Element> = keys.iter().map(|k| Element::unit(*k)).collect();
    let boxed = &keys[..spec.box_size.min(keys.len())];
    for (p, i) in boxed.iter().enumerate() {
        for j in &boxed[p + 1..] {
            out.push(Element::unit(*i).plus(&Element::unit(*j)));
        }
    }
    if keys.len() >= 3 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        for _ in 0..spec.triples {
            let x: Element = sample(&mut rng, keys.len(), 3)
                .into_iter()
                .map(|p| {
                    let mag = rng.gen_range(1..=spec.max_coeff.max(1));
                    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                    (keys[p], int(sign * mag))
                })
                .collect();
            out.push(x);
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    out.retain(|x| seen.insert(format_element(x)));
    out
}

/// All unordered pairs of distinct points, in order.
pub fn pair_grid(points: &[Element]) -> Vec<(Element, Element)> {
    let mut out = Vec::new();
    for (p, x) in points.iter().enumerate() {
        for y in &points[p + 1..] {
            out.push((x.clone(), y.clone()));
        }
    }
    out
}

/// Zero map as a candidate.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroMap;

impl Evaluate for ZeroMap {
    fn evaluate(&self, _v: &Element) -> Result<Element> {
        Ok(Element::zero())
    }

    fn label(&self) -> String {
        "zero".into()
    }
}
