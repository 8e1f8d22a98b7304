//! Recursive-descent parser for operator expressions.
//!
//! Grammar:
//!   expr     := term (('+'|'-') term)*
//!   term     := factor ('*' factor)*
//!   factor   := '-' factor | base ('^' uint)?
//!   base     := rational | 'z' | 'T' | 'D' | '(' expr ')'
//!   rational := int ('/' uint)?
//!
//! Products are noncommutative and associate left to right; `T` is theta =
//! z d/dz and `D` is d/dz.

use crate::error::{CyError, Result};
use crate::operator::DOperator;
use crate::ratfunc::RatFunc;
use crate::{Int, Rat};
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Number(Int),
    Z,
    Theta,
    D,
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

struct Lexer {
    tokens: Vec<(usize, Token)>,
    len: usize,
}

fn lex(text: &str) -> Result<Lexer> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => { tokens.push((i, Token::Plus)); i += 1; }
            '-' => { tokens.push((i, Token::Minus)); i += 1; }
            '*' => { tokens.push((i, Token::Star)); i += 1; }
            '^' => { tokens.push((i, Token::Caret)); i += 1; }
            '/' => { tokens.push((i, Token::Slash)); i += 1; }
            '(' => { tokens.push((i, Token::LParen)); i += 1; }
            ')' => { tokens.push((i, Token::RParen)); i += 1; }
            'z' => { tokens.push((i, Token::Z)); i += 1; }
            'T' => { tokens.push((i, Token::Theta)); i += 1; }
            'D' => { tokens.push((i, Token::D)); i += 1; }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: Int = text[start..i].parse().expect("digits");
                tokens.push((start, Token::Number(n)));
            }
            _ => {
                return Err(CyError::Parse {
                    position: i,
                    expected: "one of + - * ^ / ( ) z T D or a digit".into(),
                })
            }
        }
    }
    Ok(Lexer { tokens, len: bytes.len() })
}

struct Parser {
    lexer: Lexer,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.lexer.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.lexer
            .tokens
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.lexer.len)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.lexer.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token, label: &str) -> Result<()> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(CyError::Parse { position: self.position(), expected: label.into() })
        }
    }

    fn expr(&mut self) -> Result<DOperator> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<DOperator> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            acc = acc.multiply(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<DOperator> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            let f = self.factor()?;
            return Ok(f.scale_left(&RatFunc::constant(-Rat::one())));
        }
        let base = self.base()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let pos = self.position();
            match self.bump() {
                Some(Token::Number(n)) => {
                    let e: u32 = n.try_into().map_err(|_| CyError::Parse {
                        position: pos,
                        expected: "a small nonnegative exponent".into(),
                    })?;
                    let mut acc = DOperator::constant(Rat::one());
                    for _ in 0..e {
                        acc = acc.multiply(&base);
                    }
                    return Ok(acc);
                }
                _ => {
                    return Err(CyError::Parse {
                        position: pos,
                        expected: "an unsigned integer exponent".into(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<DOperator> {
        let pos = self.position();
        match self.bump() {
            Some(Token::Number(n)) => {
                // optional '/ uint' for a rational literal
                if self.peek() == Some(&Token::Slash) {
                    self.pos += 1;
                    let dpos = self.position();
                    match self.bump() {
                        Some(Token::Number(d)) if !d.is_zero() => {
                            Ok(DOperator::constant(Rat::new(n, d)))
                        }
                        _ => Err(CyError::Parse {
                            position: dpos,
                            expected: "a nonzero unsigned denominator".into(),
                        }),
                    }
                } else {
                    Ok(DOperator::constant(Rat::from(n)))
                }
            }
            Some(Token::Z) => Ok(DOperator::function(RatFunc::var())),
            Some(Token::Theta) => Ok(DOperator::theta()),
            Some(Token::D) => Ok(DOperator::d()),
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect(Token::RParen, "a closing parenthesis")?;
                Ok(e)
            }
            _ => Err(CyError::Parse {
                position: pos,
                expected: "a rational literal, z, T, D or a parenthesized expression".into(),
            }),
        }
    }
}

/// Parse an operator expression into its d-form.
pub fn parse_operator(text: &str) -> Result<DOperator> {
    let lexer = lex(text)?;
    let mut parser = Parser { lexer, pos: 0 };
    let op = parser.expr()?;
    if parser.pos != parser.lexer.tokens.len() {
        return Err(CyError::Parse {
            position: parser.position(),
            expected: "end of input".into(),
        });
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::ThetaOperator;
    use crate::poly::Poly;
    use crate::rat;

    #[test]
    fn parses_the_quintic() {
        let op = parse_operator("T^4 - 5*z*(5*T+1)*(5*T+2)*(5*T+3)*(5*T+4)").unwrap();
        let mut p1 = Poly::one();
        for k in 1..=4 {
            p1 = &p1 * &Poly::from_i64(&[k, 5]);
        }
        let expect = ThetaOperator::new(vec![Poly::from_i64(&[0, 0, 0, 0, 1]), p1.scale(&rat(-5))]);
        assert_eq!(op.to_theta_form().slices(), expect.slices());
    }

    #[test]
    fn d_times_z_is_leibniz() {
        let op = parse_operator("D*z").unwrap();
        assert_eq!(op.coeff(0), RatFunc::one());
        assert_eq!(op.coeff(1), RatFunc::var());
    }

    #[test]
    fn theta_squared_minus_theta() {
        let op = parse_operator("T^2 - T").unwrap();
        let expect = DOperator::theta().multiply(&DOperator::theta()).sub(&DOperator::theta());
        assert_eq!(op.coeffs(), expect.coeffs());
    }

    #[test]
    fn rational_literals_and_unary_minus() {
        let op = parse_operator("-3/4*T + 1/2").unwrap();
        let expect = DOperator::theta()
            .scale_left(&RatFunc::constant(crate::rat_frac(-3, 4)))
            .add(&DOperator::constant(crate::rat_frac(1, 2)));
        assert_eq!(op.coeffs(), expect.coeffs());
    }

    #[test]
    fn error_carries_position_and_expectation() {
        let err = parse_operator("T^4 + !z").unwrap_err();
        match err {
            CyError::Parse { position, .. } => assert_eq!(position, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_operator("T^").is_err());
        assert!(parse_operator("(T").is_err());
        assert!(parse_operator("T T").is_err()); // juxtaposition is not allowed
    }

    #[test]
    fn render_round_trip() {
        let texts = [
            "T^4 - 5*z*(5*T+1)*(5*T+2)*(5*T+3)*(5*T+4)",
            "144*T^2 + z*(31 - 288*T^2) + 4*z^2*(6*T-1)*(6*T+1)",
        ];
        for t in texts {
            let theta = parse_operator(t).unwrap().to_theta_form();
            let again = parse_operator(&theta.render()).unwrap().to_theta_form();
            assert_eq!(theta.slices(), again.slices());
        }
    }
}
