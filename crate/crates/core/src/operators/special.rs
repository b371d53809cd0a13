//! Fixed operators that are local or 2-local but not half-derivations.

use num_traits::{One, Zero};

use crate::algebras::{BasisKey, Element, KeyKind};
use crate::error::{Error, Result};
use crate::exactlin::{pow2, Scalar};

use super::{linear_extension, Evaluate};

fn require_e_positive(key: BasisKey, algebra: &str) -> Result<()> {
    if key.kind == KeyKind::E && key.index >= 1 {
        Ok(())
    } else {
        Err(Error::KeyOutOfDomain {
            key,
            algebra: algebra.to_string(),
        })
    }
}

/// Thin algebra: Δ(e₁) = Δ(e₂) = 0, Δ(e_j) = (1 − 2^{2−j}) e_j for j ≥ 3.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ThinLocalDelta;

impl Evaluate for ThinLocalDelta {
    fn evaluate(&self, v: &Element) -> Result<Element> {
        linear_extension(v, |k| {
            require_e_positive(k, "thin")?;
            Ok(if k.index >= 3 {
                Element::term(k, Scalar::one() - pow2(2 - k.index))
            } else {
                Element::zero()
            })
        })
    }

    fn label(&self) -> String {
        "thin-delta".into()
    }
}

/// Solvable algebra: Δ̄(e₁) = 0, Δ̄(e_k) = e_k for k ≥ 2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolvDeltaBar;

impl Evaluate for SolvDeltaBar {
    fn evaluate(&self, v: &Element) -> Result<Element> {
        linear_extension(v, |k| {
            require_e_positive(k, "solv")?;
            Ok(if k.index >= 2 {
                Element::unit(k)
            } else {
                Element::zero()
            })
        })
    }

    fn label(&self) -> String {
        "solv-deltabar".into()
    }
}

/// Thin algebra, nonlinear: ∇(x) = 0 when x₁ = 0, otherwise
/// Σ_{i≥2} 2^{2−i} xᵢ eᵢ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ThinNabla;

impl Evaluate for ThinNabla {
    fn evaluate(&self, v: &Element) -> Result<Element> {
        for k in v.keys() {
            require_e_positive(*k, "thin")?;
        }
        if v.coeff(&BasisKey::e(1)).is_zero() {
            return Ok(Element::zero());
        }
        Ok(v
            .iter()
            .filter(|(k, _)| k.index >= 2)
            .map(|(k, c)| (*k, c * pow2(2 - k.index)))
            .collect())
    }

    fn is_linear(&self) -> bool {
        false
    }

    fn label(&self) -> String {
        "thin-nabla".into()
    }
}

/// The identity map on any algebra.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Identity;

impl Evaluate for Identity {
    fn evaluate(&self, v: &Element) -> Result<Element> {
        Ok(v.clone())
    }

    fn label(&self) -> String {
        "id".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{frac, int};
    use crate::operators::ThinHalfDer;
    use crate::text::parse_element;
    use proptest::prelude::*;

    fn el(s: &str) -> Element {
        parse_element(s).unwrap()
    }

    #[test]
    fn nabla_reference_values() {
        assert_eq!(ThinNabla.evaluate(&el("e1+e2")).unwrap(), el("e2"));
        assert_eq!(ThinNabla.evaluate(&el("2*e2")).unwrap(), Element::zero());
        assert_eq!(ThinNabla.evaluate(&el("-e1+e2")).unwrap(), el("e2"));
        assert_eq!(
            ThinNabla.evaluate(&el("3*e1 + e3")).unwrap(),
            Element::term(BasisKey::e(3), frac(1, 2))
        );
    }

    #[test]
    fn nabla_is_not_additive() {
        let x = el("e1+e2");
        let y = el("-e1+e2");
        let lhs = ThinNabla.evaluate(&x.plus(&y)).unwrap();
        let rhs = ThinNabla
            .evaluate(&x)
            .unwrap()
            .plus(&ThinNabla.evaluate(&y).unwrap());
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn delta_agrees_with_alpha_one_family_from_e3() {
        let d = ThinHalfDer::new(vec![int(1)], vec![]);
        for j in 3..20 {
            let x = Element::unit(BasisKey::e(j));
            assert_eq!(ThinLocalDelta.evaluate(&x).unwrap(), d.evaluate(&x).unwrap());
        }
        let e1 = Element::unit(BasisKey::e(1));
        assert_ne!(
            ThinLocalDelta.evaluate(&e1).unwrap(),
            d.evaluate(&e1).unwrap()
        );
    }

    #[test]
    fn deltabar_images() {
        assert!(SolvDeltaBar.evaluate(&el("e1")).unwrap().is_zero());
        assert_eq!(SolvDeltaBar.evaluate(&el("e1+3*e4")).unwrap(), el("3*e4"));
        assert!(SolvDeltaBar.evaluate(&el("e0")).is_err());
    }

    proptest! {
        #[test]
        fn nabla_is_homogeneous(
            coeffs in prop::collection::vec(-6i64..6, 1..6),
            num in -5i64..5,
            den in 1i64..4,
        ) {
            let x: Element = coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (BasisKey::e(i as i64 + 1), int(*c)))
                .collect();
            let lambda = frac(num, den);
            let lhs = ThinNabla.evaluate(&x.scaled(&lambda)).unwrap();
            let rhs = ThinNabla.evaluate(&x).unwrap().scaled(&lambda);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
