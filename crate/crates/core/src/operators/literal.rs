//! Operator literals.
//!
//! ```text
//! id
//! shift:t=2,w=3/4          (w defaults to 1)
//! thin:a=[1,0,2];b=[0,5]   (a from index 1, b from index 2)
//! solv:a=[2,0,3]
//! wab:a={-1:2,0:1};b={0:1}
//! thin-delta | solv-deltabar | thin-nabla
//! table:e2=e3;e4=2*e1-e5
//! ```
//!
//! Formatting is canonical: lists drop trailing zeros, maps drop zero
//! entries and are sorted by index.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::Result;
use crate::exactlin::Scalar;
use crate::text::{format_element, Parser};

use super::{Operator, ShiftOp, SolvHalfDer, ThinHalfDer, WabHalfDer};

pub(super) fn parse_operator(src: &str) -> Result<Operator> {
    let mut p = Parser::new(src.trim());
    let op = if p.eat_str("thin-delta") {
        Operator::ThinDelta
    } else if p.eat_str("thin-nabla") {
        Operator::ThinNabla
    } else if p.eat_str("solv-deltabar") {
        Operator::SolvDeltaBar
    } else if p.eat_str("id") {
        Operator::Identity
    } else if p.eat_str("shift:") {
        parse_shift(&mut p)?
    } else if p.eat_str("thin:") {
        let (a, b) = parse_two_lists(&mut p, true)?;
        Operator::Thin(ThinHalfDer::new(a, b))
    } else if p.eat_str("solv:") {
        let (a, _) = parse_two_lists(&mut p, false)?;
        Operator::Solv(SolvHalfDer::new(a))
    } else if p.eat_str("wab:") {
        parse_wab(&mut p)?
    } else if p.eat_str("table:") {
        parse_table(&mut p)?
    } else {
        return Err(p.error("unknown operator literal"));
    };
    p.expect_end()?;
    Ok(op)
}

fn parse_shift(p: &mut Parser) -> Result<Operator> {
    let mut t = None;
    let mut w = Scalar::one();
    loop {
        p.skip_ws();
        if p.eat_str("t=") {
            t = Some(p.integer()?);
        } else if p.eat_str("w=") {
            w = p.signed_rational()?;
        } else {
            return Err(p.error("expected `t=` or `w=`"));
        }
        p.skip_ws();
        if !p.eat(',') {
            break;
        }
    }
    let t = t.ok_or_else(|| p.error("shift needs `t=<int>`"))?;
    Ok(Operator::Shift(ShiftOp { t, weight: w }))
}

fn parse_list(p: &mut Parser) -> Result<Vec<Scalar>> {
    p.expect('[')?;
    let mut out = Vec::new();
    p.skip_ws();
    if p.eat(']') {
        return Ok(out);
    }
    loop {
        p.skip_ws();
        out.push(p.signed_rational()?);
        p.skip_ws();
        if p.eat(']') {
            return Ok(out);
        }
        p.expect(',')?;
    }
}

fn parse_two_lists(p: &mut Parser, allow_b: bool) -> Result<(Vec<Scalar>, Vec<Scalar>)> {
    let (mut a, mut b) = (Vec::new(), Vec::new());
    loop {
        p.skip_ws();
        if p.eat_str("a=") {
            a = parse_list(p)?;
        } else if allow_b && p.eat_str("b=") {
            b = parse_list(p)?;
        } else {
            return Err(p.error(if allow_b {
                "expected `a=[...]` or `b=[...]`"
            } else {
                "expected `a=[...]`"
            }));
        }
        p.skip_ws();
        if !p.eat(';') {
            return Ok((a, b));
        }
    }
}

fn parse_map(p: &mut Parser) -> Result<BTreeMap<i64, Scalar>> {
    p.expect('{')?;
    let mut out: BTreeMap<i64, Scalar> = BTreeMap::new();
    p.skip_ws();
    if p.eat('}') {
        return Ok(out);
    }
    loop {
        p.skip_ws();
        let t = p.integer()?;
        p.skip_ws();
        p.expect(':')?;
        p.skip_ws();
        let v = p.signed_rational()?;
        *out.entry(t).or_insert_with(Scalar::zero) += v;
        p.skip_ws();
        if p.eat('}') {
            out.retain(|_, v| !v.is_zero());
            return Ok(out);
        }
        p.expect(',')?;
    }
}

fn parse_wab(p: &mut Parser) -> Result<Operator> {
    let mut op = WabHalfDer::default();
    loop {
        p.skip_ws();
        if p.eat_str("a=") {
            op.alpha = parse_map(p)?;
        } else if p.eat_str("b=") {
            op.beta = parse_map(p)?;
        } else {
            return Err(p.error("expected `a={...}` or `b={...}`"));
        }
        p.skip_ws();
        if !p.eat(';') {
            return Ok(Operator::Wab(op));
        }
    }
}

fn parse_table(p: &mut Parser) -> Result<Operator> {
    let mut table = BTreeMap::new();
    loop {
        p.skip_ws();
        let key_pos = p.pos();
        let key_elem = parse_bare_key(p)?;
        p.skip_ws();
        p.expect('=')?;
        let v = p.element()?;
        if table.insert(key_elem, v).is_some() {
            return Err(crate::error::Error::parse(key_pos, "duplicate table key"));
        }
        p.skip_ws();
        if !p.eat(';') {
            return Ok(Operator::Table(table));
        }
    }
}

fn parse_bare_key(p: &mut Parser) -> Result<crate::algebras::BasisKey> {
    use crate::algebras::{BasisKey, KeyKind};
    let kind = if p.eat('e') {
        KeyKind::E
    } else if p.eat('f') {
        KeyKind::F
    } else {
        return Err(p.error("expected basis key"));
    };
    let index = p.integer()?;
    Ok(BasisKey { kind, index })
}

fn trimmed(v: &[Scalar]) -> &[Scalar] {
    let end = v.iter().rposition(|x| !x.is_zero()).map_or(0, |p| p + 1);
    &v[..end]
}

fn list(v: &[Scalar]) -> String {
    let items: Vec<String> = trimmed(v).iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(","))
}

fn map(m: &BTreeMap<i64, Scalar>) -> String {
    let items: Vec<String> = m
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(t, v)| format!("{t}:{v}"))
        .collect();
    format!("{{{}}}", items.join(","))
}

pub(super) fn format_operator(op: &Operator) -> String {
    match op {
        Operator::Identity => "id".into(),
        Operator::Shift(s) => format!("shift:t={},w={}", s.t, s.weight),
        Operator::Thin(d) => format!("thin:a={};b={}", list(&d.alpha), list(&d.beta)),
        Operator::Solv(d) => format!("solv:a={}", list(&d.alpha)),
        Operator::Wab(d) => format!("wab:a={};b={}", map(&d.alpha), map(&d.beta)),
        Operator::ThinDelta => "thin-delta".into(),
        Operator::SolvDeltaBar => "solv-deltabar".into(),
        Operator::ThinNabla => "thin-nabla".into(),
        Operator::Table(t) => {
            let items: Vec<String> = t
                .iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(k, v)| format!("{k}={}", format_element(v)))
                .collect();
            format!("table:{}", items.join(";"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras::{BasisKey, Element};
    use crate::exactlin::{frac, int};
    use crate::operators::Evaluate;

    fn parse(s: &str) -> Operator {
        parse_operator(s).unwrap()
    }

    #[test]
    fn spec_literals() {
        assert_eq!(
            parse("shift:t=2,w=3/4"),
            Operator::Shift(ShiftOp {
                t: 2,
                weight: frac(3, 4)
            })
        );
        assert_eq!(
            parse("thin:a=[1,0,2];b=[0,5]"),
            Operator::Thin(ThinHalfDer::new(
                vec![int(1), int(0), int(2)],
                vec![int(0), int(5)]
            ))
        );
        let Operator::Wab(w) = parse("wab:a={-1:2,0:1};b={0:1}") else {
            panic!()
        };
        assert_eq!(w.alpha.get(&-1), Some(&int(2)));
        assert_eq!(w.beta.get(&0), Some(&int(1)));
        assert_eq!(parse("thin-delta"), Operator::ThinDelta);
        assert_eq!(parse("solv-deltabar"), Operator::SolvDeltaBar);
        assert_eq!(parse("thin-nabla"), Operator::ThinNabla);
        assert_eq!(parse("solv:a=[]"), Operator::Solv(SolvHalfDer::default()));
    }

    #[test]
    fn beta_list_starts_at_two() {
        let op = parse("thin:b=[0,5]");
        // β₃ = 5: e₂ ↦ 5 e₃
        assert_eq!(
            op.evaluate(&Element::unit(BasisKey::e(2))).unwrap(),
            Element::term(BasisKey::e(3), int(5))
        );
    }

    #[test]
    fn canonical_formatting() {
        assert_eq!(parse("thin:b=[0,5,0];a=[1,0]").to_string(), "thin:a=[1];b=[0,5]");
        assert_eq!(parse("shift:w=-1/2,t=3").to_string(), "shift:t=3,w=-1/2");
        assert_eq!(
            parse("wab:b={2:0,0:1};a={3:1,-1:2}").to_string(),
            "wab:a={-1:2,3:1};b={0:1}"
        );
        assert_eq!(parse("table:e4=e1 - e5;e2=e3").to_string(), "table:e2=e3;e4=e1 - e5");
    }

    #[test]
    fn literal_round_trip() {
        for s in [
            "id",
            "shift:t=-3,w=2/7",
            "thin:a=[1,-1/2];b=[]",
            "solv:a=[0,0,4]",
            "wab:a={};b={-2:3}",
            "thin-delta",
            "table:e2=e3;f1=-2*f4",
        ] {
            assert_eq!(parse(s).to_string(), s);
            assert_eq!(parse(&parse(s).to_string()), parse(s));
        }
    }

    #[test]
    fn errors() {
        assert!(parse_operator("shift:w=2").is_err());
        assert!(parse_operator("shift:t=x").is_err());
        assert!(parse_operator("thin:a=[1,").is_err());
        assert!(parse_operator("solv:b=[1]").is_err());
        assert!(parse_operator("frobnicate").is_err());
        assert!(parse_operator("table:e1=e2;e1=e3").is_err());
        assert!(parse_operator("idx").is_err());
    }
}
