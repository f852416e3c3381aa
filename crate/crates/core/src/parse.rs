//! Expression input: polynomials in `z0..z9`, `zb0..zb9` (and `w`, `wb`
//! on two-point spaces), the quadric `x` (alias `y`), the imaginary unit
//! `i`, and the deformation parameter `l`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' '-'? digits)?
//! atom   := digits | ident | '(' expr ')'
//! ```
//! Division and negative powers need an invertible divisor: a series whose
//! constant term is `c·x^k`.

use num_bigint::BigInt;
use thiserror::Error;

use crate::poly::{LaurentElem, Var, VarSpace};
use crate::scalar::{GaussianRational, Rational};
use crate::series::Series;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character '{ch}' at position {pos}")]
    UnexpectedChar { ch: char, pos: usize },
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown variable '{name}' at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("cannot invert a non-unit at position {pos}")]
    NonUnit { pos: usize },
    #[error("exponent out of range at position {pos}")]
    BadExponent { pos: usize },
}

type Value = Series<LaurentElem>;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    space: VarSpace,
    order: usize,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.src.get(self.pos).copied()
    }

    fn unexpected(&self) -> ParseError {
        match std::str::from_utf8(&self.src[self.pos..]).ok().and_then(|s| s.chars().next()) {
            Some(ch) => ParseError::UnexpectedChar { ch, pos: self.pos },
            None => ParseError::UnexpectedEnd,
        }
    }

    fn constant(&self, c: GaussianRational) -> Value {
        Series::constant(LaurentElem::constant(self.space, c), self.order)
    }

    fn elem(&self, e: LaurentElem) -> Value {
        Series::constant(e, self.order)
    }

    fn expr(&mut self) -> Result<Value, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Value, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    let inv = d.invert().map_err(|_| ParseError::NonUnit { pos: at })?;
                    acc = &acc * &inv;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Value, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Value, ParseError> {
        let start = self.pos;
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let at = self.pos;
        let digits = self.digits().ok_or_else(|| self.unexpected())?;
        let e: u32 = digits.parse().map_err(|_| ParseError::BadExponent { pos: at })?;
        let b = if neg {
            base.invert().map_err(|_| ParseError::NonUnit { pos: start })?
        } else {
            base
        };
        let mut acc = self.constant(GaussianRational::from_int(1));
        for _ in 0..e {
            acc = &acc * &b;
        }
        Ok(acc)
    }

    fn digits(&mut self) -> Option<String> {
        self.peek()?;
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn atom(&mut self) -> Result<Value, ParseError> {
        match self.peek() {
            None => Err(ParseError::UnexpectedEnd),
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.unexpected());
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits().expect("at least one digit");
                let n: BigInt = d.parse().expect("digits");
                Ok(self.constant(GaussianRational::real(Rational::from_integer(n))))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                self.ident(&name, start)
            }
            Some(_) => Err(self.unexpected()),
        }
    }

    fn ident(&self, name: &str, pos: usize) -> Result<Value, ParseError> {
        let unknown = || ParseError::UnknownVariable {
            name: name.to_string(),
            pos,
        };
        let sp = self.space;
        match name {
            "i" => return Ok(self.constant(GaussianRational::i())),
            "l" => {
                return Ok(Series::monomial(LaurentElem::one(sp), 1, self.order));
            }
            "x" | "y" => return Ok(self.elem(LaurentElem::x(sp))),
            "xw" | "yw" if sp.is_two_point() => return Ok(self.elem(LaurentElem::x_pow_block(sp, 1, 1))),
            _ => {}
        }
        let (prefix, digits) = name.split_at(name.find(|c: char| c.is_ascii_digit()).ok_or_else(unknown)?);
        let k: usize = digits.parse().map_err(|_| unknown())?;
        let var = match prefix {
            "z" => Var::Z(k),
            "zb" => Var::Zb(k),
            "w" => Var::W(k),
            "wb" => Var::Wb(k),
            _ => return Err(unknown()),
        };
        LaurentElem::var(sp, var).map(|e| self.elem(e)).map_err(|_| unknown())
    }
}

/// Parse an expression into a λ-series of order `order`.
pub fn parse_expr(text: &str, space: VarSpace, order: usize) -> Result<Series<LaurentElem>, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        space,
        order,
    };
    let v = p.expr()?;
    if p.peek().is_some() {
        return Err(p.unexpected());
    }
    Ok(v)
}

/// Parse an expression without `l`.
pub fn parse_elem(text: &str, space: VarSpace) -> Result<LaurentElem, ParseError> {
    Ok(parse_expr(text, space, 0)?.coeff(0).clone())
}

/// Text form of a series, `c0 + l*(c1) + l^2*(c2) + …`, omitting zeros.
pub fn format_series(s: &Series<LaurentElem>) -> String {
    let mut parts = Vec::new();
    for (k, c) in s.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        parts.push(match k {
            0 => format!("({c})"),
            1 => format!("l*({c})"),
            _ => format!("l^{k}*({c})"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Sampler;
    use proptest::prelude::*;

    fn sp() -> VarSpace {
        VarSpace::euclidean(1).unwrap()
    }

    #[test]
    fn documented_inputs() {
        let s = sp();
        let phi = parse_elem("z0*zb0/x", s).unwrap();
        assert!(phi.is_homogeneous());
        assert_eq!(phi.to_string(), "(z0*zb0)/x");
        let ser = parse_expr("x^2 - l*x", s, 2).unwrap();
        assert_eq!(ser.coeff(0), &LaurentElem::x(s).pow(2));
        assert_eq!(ser.coeff(1), &LaurentElem::x(s).neg());
        assert!(ser.coeff(2).is_zero());
        assert_eq!(
            parse_elem("z2", s),
            Err(ParseError::UnknownVariable { name: "z2".into(), pos: 0 })
        );
    }

    #[test]
    fn errors_carry_positions() {
        let s = sp();
        assert_eq!(parse_elem("z0 + ", s), Err(ParseError::UnexpectedEnd));
        assert_eq!(parse_elem("z0 $ 1", s), Err(ParseError::UnexpectedChar { ch: '$', pos: 3 }));
        assert_eq!(parse_elem("1/z0", s), Err(ParseError::NonUnit { pos: 2 }));
        assert_eq!(parse_elem("z0^-1", s), Err(ParseError::NonUnit { pos: 0 }));
        assert_eq!(parse_elem("(z0", s), Err(ParseError::UnexpectedEnd));
        assert!(parse_elem("q1", s).is_err());
    }

    #[test]
    fn arithmetic_forms() {
        let s = sp();
        let a = parse_elem("(3/4 - 1/2*i)*z1*zb0 + 2", s).unwrap();
        let b = parse_elem("2 + z1*zb0*3/4 - i*zb0*z1/2", s).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_elem("x^-2", s).unwrap(), LaurentElem::x_pow(s, -2));
        assert_eq!(parse_elem("(z0*zb0 + z1*zb1)/x", s).unwrap(), LaurentElem::one(s));
        let ser = parse_expr("1/(1 + l/x)", s, 2).unwrap();
        assert_eq!(ser.coeff(2), &LaurentElem::x_pow(s, -2));
        let ind = VarSpace::indefinite(1).unwrap();
        assert_eq!(parse_elem("y", ind).unwrap().to_string(), "(1)*y");
    }

    proptest! {
        #[test]
        fn print_then_parse(seed in 0u64..10_000, n in 1usize..3, indefinite in any::<bool>()) {
            let space = if indefinite { VarSpace::indefinite(n).unwrap() } else { VarSpace::euclidean(n).unwrap() };
            let mut s = Sampler::new(seed);
            let e = s.laurent(space, 2, 2);
            prop_assert_eq!(parse_elem(&e.to_string(), space).unwrap(), e.clone());
            let ser = Series::new(vec![e.clone(), e.conj(), LaurentElem::zero(space)]);
            prop_assert_eq!(parse_expr(&format_series(&ser), space, 2).unwrap(), ser);
        }
    }
}
