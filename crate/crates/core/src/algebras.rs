//! The catalogued Lie algebras: index domains and structure constants.
//!
//! | algebra        | basis                 | bracket                                          |
//! |----------------|-----------------------|--------------------------------------------------|
//! | `WittZ`        | e_i, i ∈ ℤ            | [e_i, e_j] = (j − i) e_{i+j}                     |
//! | `WittPos`      | e_i, i ≥ 1            | same                                             |
//! | `WittOneSided` | e_i, i ≥ −1           | same                                             |
//! | `Wab { a, b }` | e_i, f_i, i ∈ ℤ       | [e_i, e_j] = (i − j) e_{i+j}, [e_i, f_j] = −(j + a + b i) f_{i+j} |
//! | `Thin`         | e_n, n ≥ 1            | [e_1, e_n] = e_{n+1} for n ≥ 2                   |
//! | `SolvAbelian`  | e_n, n ≥ 1            | [e_1, e_n] = e_n for n ≥ 2                       |
//!
//! Products not listed are zero; the table is extended by antisymmetry.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{int, Scalar, SparseVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum KeyKind {
    E,
    F,
}

/// Basis index `e_i` or `f_i`. Ordered by kind (E before F), then index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisKey {
    pub kind: KeyKind,
    pub index: i64,
}

impl BasisKey {
    pub const fn e(index: i64) -> Self {
        BasisKey {
            kind: KeyKind::E,
            index,
        }
    }

    pub const fn f(index: i64) -> Self {
        BasisKey {
            kind: KeyKind::F,
            index,
        }
    }

    pub fn shifted(self, by: i64) -> Self {
        BasisKey {
            kind: self.kind,
            index: self.index + by,
        }
    }
}

impl fmt::Display for BasisKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            KeyKind::E => write!(f, "e{}", self.index),
            KeyKind::F => write!(f, "f{}", self.index),
        }
    }
}

/// Algebra element.
pub type Element = SparseVec<BasisKey>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Algebra {
    WittZ,
    WittPos,
    WittOneSided,
    Wab { a: Scalar, b: Scalar },
    Thin,
    SolvAbelian,
}

impl Algebra {
    pub fn wab(a: Scalar, b: Scalar) -> Self {
        Algebra::Wab { a, b }
    }

    /// Short name as used on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Algebra::WittZ => "wittz",
            Algebra::WittPos => "wittpos",
            Algebra::WittOneSided => "witt1",
            Algebra::Wab { .. } => "wab",
            Algebra::Thin => "thin",
            Algebra::SolvAbelian => "solv",
        }
    }

    /// Builds an algebra from its command-line name; `a` and `b` are required
    /// for `wab` and rejected elsewhere.
    pub fn from_name(name: &str, a: Option<Scalar>, b: Option<Scalar>) -> Result<Self> {
        let alg = match name {
            "wittz" => Algebra::WittZ,
            "wittpos" => Algebra::WittPos,
            "witt1" => Algebra::WittOneSided,
            "thin" => Algebra::Thin,
            "solv" => Algebra::SolvAbelian,
            "wab" => {
                return match (a, b) {
                    (Some(a), Some(b)) => Ok(Algebra::Wab { a, b }),
                    _ => Err(Error::Config("algebra wab needs both --a and --b".into())),
                }
            }
            other => return Err(Error::Config(format!("unknown algebra `{other}`"))),
        };
        if a.is_some() || b.is_some() {
            return Err(Error::Config(format!(
                "--a/--b only apply to wab, not {name}"
            )));
        }
        Ok(alg)
    }

    pub fn is_witt_family(&self) -> bool {
        matches!(
            self,
            Algebra::WittZ | Algebra::WittPos | Algebra::WittOneSided
        )
    }

    /// The `b = -1` member of the `W(a,b)` family, where the half-derivation
    /// space is larger than the scalars.
    pub fn is_wab_critical(&self) -> bool {
        matches!(self, Algebra::Wab { b, .. } if *b == int(-1))
    }

    pub fn kinds(&self) -> &'static [KeyKind] {
        match self {
            Algebra::Wab { .. } => &[KeyKind::E, KeyKind::F],
            _ => &[KeyKind::E],
        }
    }

    /// Smallest admissible index, or `None` when unbounded below.
    pub fn lower_bound(&self) -> Option<i64> {
        match self {
            Algebra::WittZ | Algebra::Wab { .. } => None,
            Algebra::WittPos | Algebra::Thin | Algebra::SolvAbelian => Some(1),
            Algebra::WittOneSided => Some(-1),
        }
    }

    pub fn in_domain(&self, key: BasisKey) -> bool {
        if !self.kinds().contains(&key.kind) {
            return false;
        }
        self.lower_bound().is_none_or(|lo| key.index >= lo)
    }

    /// The basis key at which vanishing forces a half-derivation to vanish.
    pub fn separating_key(&self) -> BasisKey {
        match self {
            Algebra::WittZ | Algebra::Wab { .. } => BasisKey::e(0),
            _ => BasisKey::e(1),
        }
    }

    fn check(&self, key: BasisKey) -> Result<()> {
        if self.in_domain(key) {
            Ok(())
        } else {
            Err(Error::KeyOutOfDomain {
                key,
                algebra: self.to_string(),
            })
        }
    }

    /// Structure constants: `[k1, k2]` as a vector.
    pub fn bracket(&self, k1: BasisKey, k2: BasisKey) -> Result<Element> {
        self.check(k1)?;
        self.check(k2)?;
        let (i, j) = (k1.index, k2.index);
        let out = match self {
            Algebra::WittZ | Algebra::WittPos | Algebra::WittOneSided => {
                SparseVec::term(BasisKey::e(i + j), int(j - i))
            }
            Algebra::Wab { a, b } => match (k1.kind, k2.kind) {
                (KeyKind::E, KeyKind::E) => SparseVec::term(BasisKey::e(i + j), int(i - j)),
                (KeyKind::E, KeyKind::F) => {
                    SparseVec::term(BasisKey::f(i + j), -(int(j) + a + b * int(i)))
                }
                (KeyKind::F, KeyKind::E) => {
                    SparseVec::term(BasisKey::f(i + j), int(i) + a + b * int(j))
                }
                (KeyKind::F, KeyKind::F) => SparseVec::zero(),
            },
            Algebra::Thin => match (i, j) {
                (1, n) if n >= 2 => SparseVec::unit(BasisKey::e(n + 1)),
                (n, 1) if n >= 2 => SparseVec::term(BasisKey::e(n + 1), int(-1)),
                _ => SparseVec::zero(),
            },
            Algebra::SolvAbelian => match (i, j) {
                (1, n) if n >= 2 => SparseVec::unit(BasisKey::e(n)),
                (n, 1) if n >= 2 => SparseVec::term(BasisKey::e(n), int(-1)),
                _ => SparseVec::zero(),
            },
        };
        debug_assert!(out.keys().all(|k| self.in_domain(*k)));
        Ok(out)
    }

    /// Bilinear extension of [`Algebra::bracket`].
    pub fn bracket_vec(&self, v: &Element, w: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (k1, c1) in v.iter() {
            for (k2, c2) in w.iter() {
                let coeff = c1 * c2;
                if coeff.is_zero() {
                    continue;
                }
                out.add_scaled(&self.bracket(*k1, *k2)?, &coeff);
            }
        }
        Ok(out)
    }

    /// All in-domain keys with index in `lo..=hi`, in canonical order.
    pub fn keys_in_range(&self, lo: i64, hi: i64) -> Vec<BasisKey> {
        self.kinds()
            .iter()
            .flat_map(|&kind| (lo..=hi).map(move |index| BasisKey { kind, index }))
            .filter(|k| self.in_domain(*k))
            .collect()
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algebra::Wab { a, b } => write!(f, "wab(a={a},b={b})"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for KeyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" => Ok(KeyKind::E),
            "f" => Ok(KeyKind::F),
            _ => Err(Error::parse(0, format!("unknown key kind `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::frac;

    fn e(i: i64) -> BasisKey {
        BasisKey::e(i)
    }

    fn f(i: i64) -> BasisKey {
        BasisKey::f(i)
    }

    #[test]
    fn domains() {
        assert!(Algebra::WittOneSided.in_domain(e(-1)));
        assert!(!Algebra::WittOneSided.in_domain(e(-2)));
        assert!(!Algebra::WittPos.in_domain(e(0)));
        assert!(Algebra::WittPos.in_domain(e(1)));
        assert!(!Algebra::WittZ.in_domain(f(0)));
        assert!(Algebra::wab(int(0), int(0)).in_domain(f(-7)));
        assert!(!Algebra::Thin.in_domain(e(0)));
        assert!(Algebra::SolvAbelian.in_domain(e(1)));
    }

    #[test]
    fn witt_bracket() {
        assert_eq!(
            Algebra::WittZ.bracket(e(2), e(3)).unwrap(),
            SparseVec::unit(e(5))
        );
        assert_eq!(
            Algebra::WittZ.bracket(e(-1), e(2)).unwrap(),
            SparseVec::term(e(1), int(3))
        );
    }

    #[test]
    fn wab_bracket_uses_tensor_density_action() {
        let alg = Algebra::wab(int(0), int(0));
        // -(j + a + b i) with i = 1, j = 2.
        assert_eq!(
            alg.bracket(e(1), f(2)).unwrap(),
            SparseVec::term(f(3), int(-2))
        );
        assert_eq!(
            alg.bracket(f(2), e(1)).unwrap(),
            SparseVec::term(f(3), int(2))
        );
        assert_eq!(
            alg.bracket(e(2), e(3)).unwrap(),
            SparseVec::term(e(5), int(-1))
        );
        assert!(alg.bracket(f(1), f(2)).unwrap().is_zero());

        let alg = Algebra::wab(frac(1, 2), int(-1));
        // -(0 + 1/2 - 3) = 5/2
        assert_eq!(
            alg.bracket(e(3), f(0)).unwrap(),
            SparseVec::term(f(3), frac(5, 2))
        );
    }

    #[test]
    fn thin_and_solvable_brackets() {
        assert!(Algebra::Thin.bracket(e(2), e(3)).unwrap().is_zero());
        assert_eq!(
            Algebra::Thin.bracket(e(1), e(3)).unwrap(),
            SparseVec::unit(e(4))
        );
        assert!(Algebra::Thin.bracket(e(1), e(1)).unwrap().is_zero());
        assert_eq!(
            Algebra::SolvAbelian.bracket(e(1), e(7)).unwrap(),
            SparseVec::unit(e(7))
        );
        assert_eq!(
            Algebra::SolvAbelian.bracket(e(7), e(1)).unwrap(),
            SparseVec::term(e(7), int(-1))
        );
    }

    #[test]
    fn self_bracket_vanishes() {
        for alg in [
            Algebra::WittZ,
            Algebra::Thin,
            Algebra::SolvAbelian,
            Algebra::wab(int(1), int(-1)),
        ] {
            for k in alg.keys_in_range(-2, 4) {
                assert!(alg.bracket(k, k).unwrap().is_zero(), "{alg} {k}");
            }
        }
    }

    #[test]
    fn out_of_domain_is_an_error() {
        let err = Algebra::WittPos.bracket(e(0), e(1)).unwrap_err();
        assert!(matches!(err, Error::KeyOutOfDomain { .. }));
        assert!(Algebra::WittZ.bracket(f(0), e(1)).is_err());
    }

    #[test]
    fn bracket_vec_bilinear() {
        let alg = Algebra::WittZ;
        let v: Element = [(e(0), int(1)), (e(1), int(1))].into_iter().collect();
        let w = Element::unit(e(2));
        let expected: Element = [(e(2), int(2)), (e(3), int(1))].into_iter().collect();
        assert_eq!(alg.bracket_vec(&v, &w).unwrap(), expected);
        assert!(alg.bracket_vec(&v, &v).unwrap().is_zero());
        assert!(alg.bracket_vec(&Element::zero(), &w).unwrap().is_zero());
    }

    #[test]
    fn from_name() {
        assert_eq!(Algebra::from_name("witt1", None, None).unwrap(), Algebra::WittOneSided);
        assert!(Algebra::from_name("wab", Some(int(0)), None).is_err());
        assert!(Algebra::from_name("thin", Some(int(0)), None).is_err());
        assert!(Algebra::from_name("sl2", None, None).is_err());
    }
}
