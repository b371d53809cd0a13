use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::algebras::{Algebra, BasisKey, Element};
use crate::error::{Error, Result};
use crate::exactlin::{Scalar, SparseVec};
use crate::text::format_element;

use super::Evaluate;

/// Truncation window: input keys `I` on which a map is tabulated and output
/// keys `O ⊇ I` inside which its images must lie.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    keys: Vec<BasisKey>,
    out_keys: Vec<BasisKey>,
}

impl Window {
    pub fn new(alg: &Algebra, keys: Vec<BasisKey>, out_keys: Vec<BasisKey>) -> Result<Self> {
        let canon = |mut v: Vec<BasisKey>| {
            v.sort();
            v.dedup();
            v
        };
        let keys = canon(keys);
        let out_keys = canon(out_keys);
        if keys.is_empty() {
            return Err(Error::InvalidWindow("empty input window".into()));
        }
        for k in keys.iter().chain(out_keys.iter()) {
            if !alg.in_domain(*k) {
                return Err(Error::InvalidWindow(format!(
                    "{k} is not a basis key of {alg}"
                )));
            }
        }
        if let Some(k) = keys.iter().find(|k| out_keys.binary_search(k).is_err()) {
            return Err(Error::InvalidWindow(format!(
                "input key {k} is missing from the output window"
            )));
        }
        Ok(Window { keys, out_keys })
    }

    /// Window made of every in-domain key with index in `input` (resp.
    /// `output`), for every key kind of the algebra.
    pub fn ranges(alg: &Algebra, input: (i64, i64), output: (i64, i64)) -> Result<Self> {
        Self::new(
            alg,
            alg.keys_in_range(input.0, input.1),
            alg.keys_in_range(output.0, output.1),
        )
    }

    pub fn keys(&self) -> &[BasisKey] {
        &self.keys
    }

    pub fn out_keys(&self) -> &[BasisKey] {
        &self.out_keys
    }

    pub fn contains(&self, key: &BasisKey) -> bool {
        self.keys.binary_search(key).is_ok()
    }

    pub fn contains_out(&self, key: &BasisKey) -> bool {
        self.out_keys.binary_search(key).is_ok()
    }

    pub fn supports(&self, v: &Element) -> bool {
        v.keys().all(|k| self.contains(k))
    }

    pub fn out_position(&self, key: &BasisKey) -> Option<usize> {
        self.out_keys.binary_search(key).ok()
    }

    pub fn position(&self, key: &BasisKey) -> Option<usize> {
        self.keys.binary_search(key).ok()
    }

    /// Smallest and largest input index of the given kind.
    pub fn input_bounds(&self, kind: crate::algebras::KeyKind) -> Option<(i64, i64)> {
        let mut it = self.keys.iter().filter(|k| k.kind == kind).map(|k| k.index);
        let first = it.next()?;
        let last = it.next_back().unwrap_or(first);
        Some((first, last))
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let span = |keys: &[BasisKey]| -> String {
            match (keys.first(), keys.last()) {
                (Some(a), Some(b)) => format!("{a}..{b} ({} keys)", keys.len()),
                _ => "empty".into(),
            }
        };
        write!(f, "I={} O={}", span(&self.keys), span(&self.out_keys))
    }
}

/// A linear map tabulated on a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowedMap {
    window: Window,
    image: BTreeMap<BasisKey, Element>,
}

/// Coordinates of a windowed map: `(input key, output key) -> coefficient`.
pub type CoeffVec = SparseVec<(BasisKey, BasisKey)>;

impl WindowedMap {
    /// Builds a map from explicit images. Keys of the window missing from
    /// `image` map to zero.
    pub fn new(window: Window, image: BTreeMap<BasisKey, Element>) -> Result<Self> {
        let mut full = BTreeMap::new();
        for k in window.keys() {
            let v = image.get(k).cloned().unwrap_or_default();
            if let Some(target) = v.keys().find(|t| !window.contains_out(t)) {
                return Err(Error::SupportOverflow {
                    key: *k,
                    target: *target,
                });
            }
            full.insert(*k, v);
        }
        if let Some(extra) = image.keys().find(|k| !window.contains(k)) {
            return Err(Error::KeyOutsideWindow(*extra));
        }
        Ok(WindowedMap {
            window,
            image: full,
        })
    }

    pub fn zero(window: Window) -> Self {
        let image = window.keys().iter().map(|k| (*k, Element::zero())).collect();
        WindowedMap { window, image }
    }

    pub fn identity(window: Window) -> Self {
        let image = window
            .keys()
            .iter()
            .map(|k| (*k, Element::unit(*k)))
            .collect();
        WindowedMap { window, image }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn image(&self, key: &BasisKey) -> Result<&Element> {
        self.image.get(key).ok_or(Error::KeyOutsideWindow(*key))
    }

    pub fn images(&self) -> impl Iterator<Item = (&BasisKey, &Element)> {
        self.image.iter()
    }

    /// Flattened coefficient vector.
    pub fn coefficients(&self) -> CoeffVec {
        self.coefficients_where(|_| true)
    }

    /// Coefficient vector restricted to the input keys accepted by `keep`.
    pub fn coefficients_where(&self, mut keep: impl FnMut(&BasisKey) -> bool) -> CoeffVec {
        let mut out = CoeffVec::zero();
        for (k, v) in self.image.iter().filter(|(k, _)| keep(k)) {
            for (t, c) in v.iter() {
                out.add_term((*k, *t), c.clone());
            }
        }
        out
    }

    pub fn from_coefficients(window: Window, coeffs: &CoeffVec) -> Result<Self> {
        let mut image: BTreeMap<BasisKey, Element> = BTreeMap::new();
        for ((k, t), c) in coeffs.iter() {
            image.entry(*k).or_default().add_term(*t, c.clone());
        }
        Self::new(window, image)
    }

    /// `Σ coeffs[i] · maps[i]`; all maps must share `window`.
    pub fn combination(window: &Window, maps: &[&WindowedMap], coeffs: &[Scalar]) -> Self {
        let mut image: BTreeMap<BasisKey, Element> = window
            .keys()
            .iter()
            .map(|k| (*k, Element::zero()))
            .collect();
        for (m, c) in maps.iter().zip(coeffs) {
            assert_eq!(&m.window, window, "combination across different windows");
            if c.is_zero() {
                continue;
            }
            for (k, v) in m.image.iter() {
                image.get_mut(k).expect("same window").add_scaled(v, c);
            }
        }
        WindowedMap {
            window: window.clone(),
            image,
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        WindowedMap {
            window: self.window.clone(),
            image: self.image.iter().map(|(k, v)| (*k, v.scaled(c))).collect(),
        }
    }

    /// `outer ∘ inner` on the input keys of `inner` whose image lies inside
    /// the input window of `outer`.
    pub fn compose(outer: &WindowedMap, inner: &WindowedMap) -> BTreeMap<BasisKey, Element> {
        let mut out = BTreeMap::new();
        for (k, v) in inner.image.iter() {
            if v.keys().all(|t| outer.window.contains(t)) {
                let img = outer.evaluate(v).expect("support checked");
                out.insert(*k, img);
            }
        }
        out
    }

    /// Commutator `a∘b − b∘a`, tabulated on every key where both
    /// compositions are defined. Returns `None` if no such key exists.
    pub fn commutator(alg: &Algebra, a: &WindowedMap, b: &WindowedMap) -> Result<Option<Self>> {
        let ab = Self::compose(a, b);
        let ba = Self::compose(b, a);
        let mut image = BTreeMap::new();
        for (k, v) in ab.iter() {
            if let Some(w) = ba.get(k) {
                image.insert(*k, v.minus(w));
            }
        }
        if image.is_empty() {
            return Ok(None);
        }
        let keys: Vec<BasisKey> = image.keys().copied().collect();
        let mut out_keys = keys.clone();
        out_keys.extend(image.values().flat_map(|v| v.keys().copied()));
        let window = Window::new(alg, keys, out_keys)?;
        Self::new(window, image).map(Some)
    }

    pub fn is_zero(&self) -> bool {
        self.image.values().all(|v| v.is_zero())
    }

    /// Text table `e1 -> 2*e1 + e3; e2 -> ...` in canonical key order.
    pub fn to_table_string(&self) -> String {
        self.image
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, v)| format!("{k}={}", format_element(v)))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl Evaluate for WindowedMap {
    fn evaluate(&self, v: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (k, c) in v.iter() {
            out.add_scaled(self.image(k)?, c);
        }
        Ok(out)
    }

    fn label(&self) -> String {
        format!("table[{}]", self.window)
    }
}

/// Tabulates a linear operator on `window`.
///
/// Fails with `SupportOverflow` if some image leaves `window.out_keys`.
pub fn materialize(op: &dyn Evaluate, window: &Window) -> Result<WindowedMap> {
    if !op.is_linear() {
        return Err(Error::NonLinear(op.label()));
    }
    let mut image = BTreeMap::new();
    for k in window.keys() {
        let v = op.evaluate(&Element::unit(*k))?;
        if let Some(target) = v.keys().find(|t| !window.contains_out(t)) {
            return Err(Error::SupportOverflow {
                key: *k,
                target: *target,
            });
        }
        image.insert(*k, v);
    }
    Ok(WindowedMap {
        window: window.clone(),
        image,
    })
}
