//! Closed-form half-derivation families.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebras::{Algebra, BasisKey, Element, KeyKind};
use crate::error::{Error, Result};
use crate::exactlin::{pow2, Scalar};

use super::{linear_extension, Evaluate};

fn out_of_domain(key: BasisKey, algebra: &str) -> Error {
    Error::KeyOutOfDomain {
        key,
        algebra: algebra.to_string(),
    }
}

/// `e_i ↦ weight · e_{i+t}` on the Witt family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftOp {
    pub t: i64,
    pub weight: Scalar,
}

impl ShiftOp {
    /// Shift checked against `alg`: the algebra must be a Witt algebra, and
    /// one-sided algebras only admit `t >= 0`.
    pub fn new(alg: &Algebra, t: i64, weight: Scalar) -> Result<Self> {
        let op = ShiftOp { t, weight };
        op.validate(alg)?;
        Ok(op)
    }

    pub fn validate(&self, alg: &Algebra) -> Result<()> {
        let reason = if !alg.is_witt_family() {
            Some("shifts are defined on the Witt algebras only".to_string())
        } else if alg.lower_bound().is_some() && self.t < 0 {
            Some(format!("negative shift t={} leaves the domain", self.t))
        } else {
            None
        };
        match reason {
            Some(reason) => Err(Error::IncompatibleOperator {
                operator: format!("shift:t={}", self.t),
                algebra: alg.to_string(),
                reason,
            }),
            None => Ok(()),
        }
    }
}

impl Evaluate for ShiftOp {
    fn evaluate(&self, v: &Element) -> Result<Element> {
        linear_extension(v, |k| match k.kind {
            KeyKind::E => Ok(Element::term(k.shifted(self.t), self.weight.clone())),
            KeyKind::F => Err(out_of_domain(k, "witt")),
        })
    }

    fn label(&self) -> String {
        format!("shift:t={},w={}", self.t, self.weight)
    }
}

/// `D_{α,β}` on the thin algebra.
///
/// `alpha[0]` is α₁ and `beta[0]` is β₂:
/// - e₁ ↦ Σ αᵢ eᵢ
/// - e₂ ↦ Σ_{i≥2} βᵢ eᵢ
/// - e_j ↦ ((1 − 2^{2−j}) α₁ + 2^{2−j} β₂) e_j + 2^{2−j} Σ_{i≥3} βᵢ e_{i+j−2}  (j ≥ 3)
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ThinHalfDer {
    pub alpha: Vec<Scalar>,
    pub beta: Vec<Scalar>,
}

impl ThinHalfDer {
    pub fn new(alpha: Vec<Scalar>, beta: Vec<Scalar>) -> Self {
        ThinHalfDer { alpha, beta }
    }

    /// α₁ (one-based).
    pub fn alpha_at(&self, i: usize) -> Scalar {
        i.checked_sub(1)
            .and_then(|p| self.alpha.get(p))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// βᵢ for i ≥ 2.
    pub fn beta_at(&self, i: usize) -> Scalar {
        i.checked_sub(2)
            .and_then(|p| self.beta.get(p))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// Generator with αᵢ = 1 and everything else zero.
    pub fn alpha_unit(i: usize) -> Self {
        assert!(i >= 1);
        let mut alpha = vec![Scalar::zero(); i];
        alpha[i - 1] = Scalar::one();
        ThinHalfDer::new(alpha, Vec::new())
    }

    /// Generator with βᵢ = 1 (i ≥ 2) and everything else zero.
    pub fn beta_unit(i: usize) -> Self {
        assert!(i >= 2);
        let mut beta = vec![Scalar::zero(); i - 1];
        beta[i - 2] = Scalar::one();
        ThinHalfDer::new(Vec::new(), beta)
    }

    fn basis_image(&self, key: BasisKey) -> Result<Element> {
        if key.kind != KeyKind::E || key.index < 1 {
            return Err(out_of_domain(key, "thin"));
        }
        let j = key.index;
        let mut out = Element::zero();
        match j {
            1 => {
                for (p, a) in self.alpha.iter().enumerate() {
                    out.add_term(BasisKey::e(p as i64 + 1), a.clone());
                }
            }
            2 => {
                for (p, b) in self.beta.iter().enumerate() {
                    out.add_term(BasisKey::e(p as i64 + 2), b.clone());
                }
            }
            _ => {
                let scale = pow2(2 - j);
                let diag = (Scalar::one() - &scale) * self.alpha_at(1) + &scale * self.beta_at(2);
                out.add_term(key, diag);
                for (p, b) in self.beta.iter().enumerate().skip(1) {
                    let i = p as i64 + 2;
                    out.add_term(BasisKey::e(i + j - 2), &scale * b);
                }
            }
        }
        Ok(out)
    }
}

impl Evaluate for ThinHalfDer {
    fn evaluate(&self, v: &Element) -> Result<Element> {
        linear_extension(v, |k| self.basis_image(k))
    }

    fn label(&self) -> String {
        "thin-halfder".into()
    }
}

/// The `W(a,-1)` family: e_i ↦ Σ α_t e_{i+t} + Σ β_t f_{i+t}, f_i ↦ Σ α_t f_{i+t}.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WabHalfDer {
    pub alpha: BTreeMap<i64, Scalar>,
    pub beta: BTreeMap<i64, Scalar>,
}

impl WabHalfDer {
    pub fn alpha_unit(t: i64) -> Self {
        WabHalfDer {
            alpha: [(t, Scalar::one())].into_iter().collect(),
            beta: BTreeMap::new(),
        }
    }

    pub fn beta_unit(t: i64) -> Self {
        WabHalfDer {
            alpha: BTreeMap::new(),
            beta: [(t, Scalar::one())].into_iter().collect(),
        }
    }

    fn basis_image(&self, key: BasisKey) -> Element {
        let mut out = Element::zero();
        for (t, a) in &self.alpha {
            out.add_term(key.shifted(*t), a.clone());
        }
        if key.kind == KeyKind::E {
            for (t, b) in &self.beta {
                out.add_term(BasisKey::f(key.index + t), b.clone());
            }
        }
        out
    }
}

impl Evaluate for WabHalfDer {
    fn evaluate(&self, v: &Element) -> Result<Element> {
        linear_extension(v, |k| Ok(self.basis_image(k)))
    }

    fn label(&self) -> String {
        "wab-halfder".into()
    }
}

/// `D_α` on the solvable algebra: e₁ ↦ Σ αᵢ eᵢ, e_k ↦ α₁ e_k (k ≥ 2).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SolvHalfDer {
    pub alpha: Vec<Scalar>,
}

impl SolvHalfDer {
    pub fn new(alpha: Vec<Scalar>) -> Self {
        SolvHalfDer { alpha }
    }

    pub fn alpha_unit(i: usize) -> Self {
        assert!(i >= 1);
        let mut alpha = vec![Scalar::zero(); i];
        alpha[i - 1] = Scalar::one();
        SolvHalfDer { alpha }
    }

    fn basis_image(&self, key: BasisKey) -> Result<Element> {
        if key.kind != KeyKind::E || key.index < 1 {
            return Err(out_of_domain(key, "solv"));
        }
        if key.index == 1 {
            Ok(self
                .alpha
                .iter()
                .enumerate()
                .map(|(p, a)| (BasisKey::e(p as i64 + 1), a.clone()))
                .collect())
        } else {
            let a1 = self.alpha.first().cloned().unwrap_or_else(Scalar::zero);
            Ok(Element::term(key, a1))
        }
    }
}

impl Evaluate for SolvHalfDer {
    fn evaluate(&self, v: &Element) -> Result<Element> {
        linear_extension(v, |k| self.basis_image(k))
    }

    fn label(&self) -> String {
        "solv-halfder".into()
    }
}
