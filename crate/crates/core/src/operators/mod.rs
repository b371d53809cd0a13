//! Maps on the catalogued algebras: windowed tables, the closed-form
//! half-derivation families, and the local / 2-local counterexample maps.

mod families;
mod literal;
mod special;
mod window;

use std::collections::BTreeMap;
use std::fmt;

use crate::algebras::{Algebra, BasisKey, Element};
use crate::error::{Error, Result};

pub use families::{ShiftOp, SolvHalfDer, ThinHalfDer, WabHalfDer};
pub use special::{Identity, SolvDeltaBar, ThinLocalDelta, ThinNabla};
pub use window::{materialize, CoeffVec, Window, WindowedMap};

/// Anything that can be applied to an algebra element.
pub trait Evaluate {
    fn evaluate(&self, v: &Element) -> Result<Element>;

    /// Linear operators are determined by their basis images and can be
    /// tabulated with [`materialize`].
    fn is_linear(&self) -> bool {
        true
    }

    fn label(&self) -> String;
}

/// Linear extension of a basis-image rule.
pub(crate) fn linear_extension(
    v: &Element,
    mut image: impl FnMut(BasisKey) -> Result<Element>,
) -> Result<Element> {
    let mut out = Element::zero();
    for (k, c) in v.iter() {
        out.add_scaled(&image(*k)?, c);
    }
    Ok(out)
}

/// Any operator expressible as a literal (see [`Operator::from_str`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Operator {
    Identity,
    Shift(ShiftOp),
    Thin(ThinHalfDer),
    Solv(SolvHalfDer),
    Wab(WabHalfDer),
    ThinDelta,
    SolvDeltaBar,
    ThinNabla,
    /// Finite table of basis images; unlisted keys map to zero.
    Table(BTreeMap<BasisKey, Element>),
}

impl Operator {
    fn inner(&self) -> &dyn Evaluate {
        match self {
            Operator::Identity => &Identity,
            Operator::Shift(op) => op,
            Operator::Thin(op) => op,
            Operator::Solv(op) => op,
            Operator::Wab(op) => op,
            Operator::ThinDelta => &ThinLocalDelta,
            Operator::SolvDeltaBar => &SolvDeltaBar,
            Operator::ThinNabla => &ThinNabla,
            Operator::Table(_) => self,
        }
    }

    /// Checks that the operator is meaningful on `alg`.
    pub fn validate(&self, alg: &Algebra) -> Result<()> {
        let wrong = |reason: &str| {
            Err(Error::IncompatibleOperator {
                operator: self.to_string(),
                algebra: alg.to_string(),
                reason: reason.to_string(),
            })
        };
        match self {
            Operator::Identity => Ok(()),
            Operator::Shift(op) => op.validate(alg),
            Operator::Thin(_) | Operator::ThinDelta | Operator::ThinNabla => {
                if *alg == Algebra::Thin {
                    Ok(())
                } else {
                    wrong("defined on the thin algebra only")
                }
            }
            Operator::Solv(_) | Operator::SolvDeltaBar => {
                if *alg == Algebra::SolvAbelian {
                    Ok(())
                } else {
                    wrong("defined on the solvable algebra only")
                }
            }
            Operator::Wab(_) => {
                if matches!(alg, Algebra::Wab { .. }) {
                    Ok(())
                } else {
                    wrong("defined on W(a,b) only")
                }
            }
            Operator::Table(t) => {
                for (k, v) in t {
                    if let Some(bad) = std::iter::once(k).chain(v.keys()).find(|k| !alg.in_domain(**k)) {
                        return Err(Error::KeyOutOfDomain {
                            key: *bad,
                            algebra: alg.to_string(),
                        });
                    }
                }
                Ok(())
            }
        }
    }
}

impl Evaluate for Operator {
    fn evaluate(&self, v: &Element) -> Result<Element> {
        match self {
            Operator::Table(t) => linear_extension(v, |k| Ok(t.get(&k).cloned().unwrap_or_default())),
            other => other.inner().evaluate(v),
        }
    }

    fn is_linear(&self) -> bool {
        match self {
            Operator::Table(_) => true,
            other => other.inner().is_linear(),
        }
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&literal::format_operator(self))
    }
}

impl std::str::FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        literal::parse_operator(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::int;
    use crate::text::parse_element;

    fn el(s: &str) -> Element {
        parse_element(s).unwrap()
    }

    fn window(alg: &Algebra, i: (i64, i64), o: (i64, i64)) -> Window {
        Window::ranges(alg, i, o).unwrap()
    }

    #[test]
    fn materialize_shift_table() {
        let w = window(&Algebra::WittZ, (-2, 2), (-4, 4));
        let m = materialize(&ShiftOp::new(&Algebra::WittZ, 1, int(1)).unwrap(), &w).unwrap();
        for i in -2..=2 {
            assert_eq!(
                m.image(&BasisKey::e(i)).unwrap(),
                &Element::unit(BasisKey::e(i + 1))
            );
        }
    }

    #[test]
    fn materialize_reports_overflow() {
        let w = window(&Algebra::WittZ, (-2, 2), (-4, 4));
        let err = materialize(&ShiftOp::new(&Algebra::WittZ, 5, int(1)).unwrap(), &w).unwrap_err();
        assert_eq!(
            err,
            Error::SupportOverflow {
                key: BasisKey::e(0),
                target: BasisKey::e(5)
            }
        );
    }

    #[test]
    fn materialize_solv_family() {
        let w = window(&Algebra::SolvAbelian, (1, 4), (1, 4));
        let d = SolvHalfDer::new(vec![int(2), int(0), int(3)]);
        let m = materialize(&d, &w).unwrap();
        assert_eq!(m.image(&BasisKey::e(1)).unwrap(), &el("2*e1 + 3*e3"));
        for k in 2..=4 {
            assert_eq!(
                m.image(&BasisKey::e(k)).unwrap(),
                &Element::term(BasisKey::e(k), int(2))
            );
        }
    }

    #[test]
    fn materialize_rejects_nonlinear() {
        let w = window(&Algebra::Thin, (1, 4), (1, 4));
        assert!(matches!(
            materialize(&ThinNabla, &w),
            Err(Error::NonLinear(_))
        ));
    }

    #[test]
    fn windowed_map_rejects_off_window_input() {
        let w = window(&Algebra::WittZ, (-1, 1), (-2, 2));
        let m = WindowedMap::identity(w);
        assert_eq!(
            m.evaluate(&el("e5")).unwrap_err(),
            Error::KeyOutsideWindow(BasisKey::e(5))
        );
    }

    #[test]
    fn validate_operators_against_algebras() {
        let thin: Operator = "thin-delta".parse().unwrap();
        assert!(thin.validate(&Algebra::Thin).is_ok());
        assert!(thin.validate(&Algebra::WittZ).is_err());
        let shift: Operator = "shift:t=-1".parse().unwrap();
        assert!(shift.validate(&Algebra::WittZ).is_ok());
        assert!(shift.validate(&Algebra::WittPos).is_err());
        let table: Operator = "table:e2=e3".parse().unwrap();
        assert!(table.validate(&Algebra::SolvAbelian).is_ok());
        assert!(table.validate(&Algebra::WittPos).is_ok());
        let table: Operator = "table:e0=e3".parse().unwrap();
        assert!(table.validate(&Algebra::SolvAbelian).is_err());
    }

    #[test]
    fn commutator_of_thin_family_members() {
        let alg = Algebra::Thin;
        let w = window(&alg, (1, 8), (1, 8));
        let a = materialize(&ThinHalfDer::new(vec![int(1), int(2)], vec![]), &w).unwrap();
        let b = materialize(&ThinHalfDer::new(vec![int(0), int(0), int(1)], vec![int(1)]), &w).unwrap();
        let c = WindowedMap::commutator(&alg, &a, &b).unwrap().unwrap();
        assert!(!c.is_zero());
        assert_eq!(c.window().keys().len(), 8);
    }
}
