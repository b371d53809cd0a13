//! Text forms for scalars, elements and index ranges.
//!
//! Elements use the grammar `term (('+' | '-') term)*` where a term is
//! `[coef '*'] ('e' | 'f') index`, `coef` is an integer or `p/q`, and the
//! index may carry a leading minus sign (`e-1`). The single token `0`
//! denotes the zero element.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebras::{BasisKey, Element, KeyKind};
use crate::error::{Error, Result};
use crate::exactlin::Scalar;

/// Parses `p/q`, `-p/q` or an integer literal.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let mut p = Parser::new(text.trim());
    let s = p.signed_rational()?;
    p.expect_end()?;
    Ok(s)
}

/// Parses an element literal such as `3/4*e-1 - f2`.
pub fn parse_element(text: &str) -> Result<Element> {
    let mut p = Parser::new(text);
    let v = p.element()?;
    p.expect_end()?;
    Ok(v)
}

/// Parses an inclusive integer range `lo..hi`.
pub fn parse_range(text: &str) -> Result<(i64, i64)> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| Error::parse(0, format!("expected `lo..hi`, got `{text}`")))?;
    let lo: i64 = lo
        .trim()
        .parse()
        .map_err(|_| Error::parse(0, format!("bad range start `{lo}`")))?;
    let hi: i64 = hi
        .trim()
        .parse()
        .map_err(|_| Error::parse(text.len() - hi.len(), format!("bad range end `{hi}`")))?;
    if lo > hi {
        return Err(Error::parse(0, format!("empty range `{text}`")));
    }
    Ok((lo, hi))
}

/// Canonical text of an element; inverse of [`parse_element`].
pub fn format_element(v: &Element) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (key, coeff)) in v.iter().enumerate() {
        let negative = coeff.is_negative();
        let mag = coeff.abs();
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        if !mag.is_one() {
            out.push_str(&mag.to_string());
            out.push('*');
        }
        out.push_str(&key.to_string());
    }
    out
}

/// `serialize_with` helpers that write scalars and elements as text.
pub mod as_text {
    use serde::Serializer;

    use super::format_element;
    use crate::algebras::Element;
    use crate::exactlin::Scalar;

    pub fn element<S: Serializer>(v: &Element, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_element(v))
    }

    pub fn scalar<S: Serializer>(v: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn scalars<S: Serializer>(v: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn opt_scalars<S: Serializer>(v: &Option<Vec<Scalar>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => scalars(v, s),
            None => s.serialize_none(),
        }
    }
}

pub(crate) struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub(crate) fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    pub(crate) fn eat_str(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect_end(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos == self.src.len() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    pub(crate) fn error(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.pos, msg)
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.src[start..self.pos])
    }

    pub(crate) fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        let neg = self.eat('-');
        let Some(d) = self.digits() else {
            self.pos = start;
            return Err(self.error("expected integer"));
        };
        let v: i64 = d
            .parse()
            .map_err(|_| Error::parse(start, "integer out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn unsigned_rational(&mut self) -> Result<Scalar> {
        let num = self
            .digits()
            .ok_or_else(|| self.error("expected coefficient"))?;
        let num: BigInt = num.parse().expect("digits");
        if self.eat('/') {
            let den_pos = self.pos;
            let den = self
                .digits()
                .ok_or_else(|| self.error("expected denominator"))?;
            let den: BigInt = den.parse().expect("digits");
            if den.is_zero() {
                return Err(Error::parse(den_pos, "zero denominator"));
            }
            Ok(Scalar::new(num, den))
        } else {
            Ok(Scalar::from_integer(num))
        }
    }

    pub(crate) fn signed_rational(&mut self) -> Result<Scalar> {
        let neg = self.eat('-');
        let v = self.unsigned_rational()?;
        Ok(if neg { -v } else { v })
    }

    fn key(&mut self) -> Result<BasisKey> {
        let kind = match self.peek() {
            Some('e') => KeyKind::E,
            Some('f') => KeyKind::F,
            _ => return Err(self.error("expected basis key `e<i>` or `f<i>`")),
        };
        self.pos += 1;
        let index = self.integer()?;
        Ok(BasisKey { kind, index })
    }

    fn term(&mut self) -> Result<(BasisKey, Scalar)> {
        self.skip_ws();
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            let coeff = self.unsigned_rational()?;
            self.skip_ws();
            self.expect('*')?;
            self.skip_ws();
            let key = self.key()?;
            Ok((key, coeff))
        } else {
            Ok((self.key()?, Scalar::one()))
        }
    }

    pub(crate) fn element(&mut self) -> Result<Element> {
        self.skip_ws();
        let mut v = Element::zero();
        if self.peek() == Some('0') {
            let save = self.pos;
            self.pos += 1;
            self.skip_ws();
            if matches!(self.peek(), None | Some(';') | Some(',')) {
                return Ok(v);
            }
            self.pos = save;
        }
        let mut sign = if self.eat('-') {
            -Scalar::one()
        } else {
            self.eat('+');
            Scalar::one()
        };
        loop {
            let (key, coeff) = self.term()?;
            v.add_term(key, coeff * &sign);
            self.skip_ws();
            if self.eat('+') {
                sign = Scalar::one();
            } else if self.eat('-') {
                sign = -Scalar::one();
            } else {
                break;
            }
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{frac, int};
    use proptest::prelude::*;

    fn e(i: i64) -> BasisKey {
        BasisKey::e(i)
    }

    #[test]
    fn parse_examples() {
        let v = parse_element("e1+e2").unwrap();
        assert_eq!(
            v,
            [(e(1), int(1)), (e(2), int(1))].into_iter().collect::<Element>()
        );

        let v = parse_element("3/4*e-1 - f2").unwrap();
        let expected: Element = [(e(-1), frac(3, 4)), (BasisKey::f(2), int(-1))]
            .into_iter()
            .collect();
        assert_eq!(v, expected);

        assert_eq!(parse_element("0").unwrap(), Element::zero());
        assert_eq!(
            parse_element("-e1 - 2*e-3").unwrap(),
            [(e(1), int(-1)), (e(-3), int(-2))].into_iter().collect::<Element>()
        );
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_element("e0+") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_element("").is_err());
        assert!(parse_element("3e1").is_err());
        assert!(parse_element("1/0*e1").is_err());
        assert!(parse_element("g2").is_err());
    }

    #[test]
    fn scalars_and_ranges() {
        assert_eq!(parse_scalar("-3/6").unwrap(), frac(-1, 2));
        assert_eq!(parse_scalar("7").unwrap(), int(7));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
        assert_eq!(parse_range("-3..3").unwrap(), (-3, 3));
        assert!(parse_range("3..-3").is_err());
        assert!(parse_range("3").is_err());
    }

    #[test]
    fn format_is_canonical() {
        let v = parse_element("f2 - 3/4*e-1 + e5").unwrap();
        assert_eq!(format_element(&v), "-3/4*e-1 + e5 + f2");
        assert_eq!(format_element(&Element::zero()), "0");
    }

    fn arb_element() -> impl Strategy<Value = Element> {
        prop::collection::vec(
            (any::<bool>(), -20i64..20, -9i64..9, 1i64..7),
            0..6,
        )
        .prop_map(|terms| {
            terms
                .into_iter()
                .map(|(is_f, idx, n, d)| {
                    let key = if is_f { BasisKey::f(idx) } else { BasisKey::e(idx) };
                    (key, frac(n, d))
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn element_text_round_trips(v in arb_element()) {
            prop_assert_eq!(parse_element(&format_element(&v)).unwrap(), v);
        }
    }
}
