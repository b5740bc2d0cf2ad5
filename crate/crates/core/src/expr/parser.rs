//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := ("-")? power
//! power  := atom ("^" factor)?
//! atom   := number | "x" | ident "(" expr ")" | "(" expr ")"
//! ```
//!
//! The exponent of `^` must fold to a finite constant.

use super::{Binary, Expression, Node, Unary};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {position}: {message}")]
pub struct ParseError {
    /// Character offset into the source, at most the input length.
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexed {
    tokens: Vec<(usize, Token)>,
    len: usize,
}

fn lex(source: &str) -> Result<Lexed, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Token::Plus,
            '-' => Token::Minus,
            '*' => Token::Star,
            '/' => Token::Slash,
            '^' => Token::Caret,
            '(' => Token::LParen,
            ')' => Token::RParen,
            _ if c.is_ascii_digit() || c == '.' => {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let value: f64 = text.parse().map_err(|_| ParseError {
                    position: start,
                    message: format!("malformed number '{text}'"),
                })?;
                if !value.is_finite() {
                    return Err(ParseError {
                        position: start,
                        message: format!("number '{text}' is out of range"),
                    });
                }
                tokens.push((start, Token::Number(value)));
                continue;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push((start, Token::Ident(chars[start..i].iter().collect())));
                continue;
            }
            other => {
                return Err(ParseError {
                    position: start,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        tokens.push((start, tok));
        i += 1;
    }
    Ok(Lexed { tokens, len: chars.len() })
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(o, _)| *o).unwrap_or(self.len)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { position: self.offset(), message: message.into() })
    }

    fn expect(&mut self, tok: Token, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => Binary::Add,
                Some(Token::Minus) => Binary::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(Token::Star) => Binary::Mul,
                Some(Token::Slash) => Binary::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            let operand = self.power()?;
            return Ok(match operand {
                Node::Const(c) => Node::Const(-c),
                other => Node::Unary(Unary::Neg, Box::new(other)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let exponent_at = self.offset();
        let exponent = self.factor()?;
        if exponent.contains_var() {
            return Err(ParseError {
                position: exponent_at,
                message: "exponent must be a constant".into(),
            });
        }
        match super::eval::evaluate(&exponent, 0.0) {
            Ok(p) if p.is_finite() => Ok(Node::Pow(Box::new(base), p)),
            _ => Err(ParseError {
                position: exponent_at,
                message: "exponent does not evaluate to a finite constant".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return self.error("unexpected end of input");
        };
        match tok {
            Token::Number(v) => {
                self.pos += 1;
                Ok(Node::Const(v))
            }
            Token::Ident(name) if name == "x" => {
                self.pos += 1;
                Ok(Node::Var)
            }
            Token::Ident(name) => {
                let Some(op) = Unary::from_ident(&name) else {
                    return self.error(format!("unknown identifier '{name}'"));
                };
                self.pos += 1;
                self.expect(Token::LParen, &format!("'(' after '{name}'"))?;
                let arg = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(Node::Unary(op, Box::new(arg)))
            }
            Token::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            _ => self.error("expected a number, 'x', a function call or '('"),
        }
    }
}

/// Parses `source` into an [`Expression`].
pub fn parse(source: &str) -> Result<Expression, ParseError> {
    let Lexed { tokens, len } = lex(source)?;
    let mut parser = Parser { tokens, pos: 0, len };
    let root = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return parser.error("unexpected trailing input");
    }
    Ok(Expression::new(root))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_by_constant() {
        let e = parse("x/2").unwrap();
        assert_eq!(
            *e.root(),
            Node::Binary(Binary::Div, Box::new(Node::Var), Box::new(Node::Const(2.0)))
        );
    }

    #[test]
    fn incomplete_expression_reports_end_offset() {
        let err = parse("x +").unwrap_err();
        assert_eq!(err.position, 3);
        let err = parse("x+").unwrap_err();
        assert_eq!(err.position, 2);
    }

    #[test]
    fn unknown_identifier() {
        let err = parse("2*foo(x)").unwrap_err();
        assert_eq!(err.position, 2);
        assert!(err.message.contains("foo"));
    }

    #[test]
    fn missing_paren_and_trailing_input() {
        assert_eq!(parse("sin(x").unwrap_err().position, 5);
        assert_eq!(parse("sin x").unwrap_err().position, 4);
        assert_eq!(parse("x x").unwrap_err().position, 2);
        assert_eq!(parse("").unwrap_err().position, 0);
        assert_eq!(parse("x^x").unwrap_err().position, 2);
        assert!(parse("1e999").is_err());
        assert!(parse("x $ 2").is_err());
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse("1 - x - 2").unwrap();
        assert_eq!(e.evaluate(0.0).unwrap(), -1.0);
        let e = parse("8 / x / 2").unwrap();
        assert_eq!(e.evaluate(2.0).unwrap(), 2.0);
        let e = parse("-x^2").unwrap();
        assert_eq!(e.evaluate(3.0).unwrap(), -9.0);
        let e = parse("2^3^2").unwrap();
        assert_eq!(e.evaluate(0.0).unwrap(), 512.0);
        let e = parse("2 * -x").unwrap();
        assert_eq!(e.evaluate(1.5).unwrap(), -3.0);
        let e = parse(" 1.5e1 + .5 + 2E-1 ").unwrap();
        assert_eq!(e.evaluate(0.0).unwrap(), 15.7);
    }

    #[test]
    fn involution_symbol_round_trips() {
        let e = parse("-3*x + sqrt(8*x^2 + 2)").unwrap();
        let again = parse(&e.to_string()).unwrap();
        assert_eq!(e, again);
    }
}
