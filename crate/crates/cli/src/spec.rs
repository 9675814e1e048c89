//! Parser for registry specs such as `chern:k=1,bundle=monopole:n=2` and the
//! small arithmetic accepted in numeric parameters (`pi/2`, `2pi/3`, `-1e-3`).

use std::f64::consts::PI;
use std::fmt;

/// Parse failure with a 1-based character column into the original input.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(column: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { column, message: message.into() })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Word(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub key: String,
    pub value: Value,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spec {
    pub kind: String,
    pub column: usize,
    pub params: Vec<Param>,
    pub bundle: Option<Box<Spec>>,
}

impl Spec {
    pub fn parse(input: &str) -> Result<Spec, ParseError> {
        let chars: Vec<char> = input.chars().collect();
        parse_spec(&chars, 0)
    }

    pub fn param(&self, key: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.key == key)
    }
}

impl fmt::Display for Spec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for (i, p) in self.params.iter().enumerate() {
            write!(f, "{}{}=", if i == 0 { ':' } else { ',' }, p.key)?;
            match &p.value {
                Value::Number(x) => write!(f, "{x}")?,
                Value::Word(w) => write!(f, "{w}")?,
            }
        }
        if let Some(b) = &self.bundle {
            write!(f, ",bundle={b}")?;
        }
        Ok(())
    }
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '-' || c == '_'
}

fn parse_spec(s: &[char], start: usize) -> Result<Spec, ParseError> {
    let mut i = start;
    while i < s.len() && is_name_char(s[i]) {
        i += 1;
    }
    if i == start {
        return err(start + 1, "expected a registry name");
    }
    let kind: String = s[start..i].iter().collect();
    let mut spec = Spec { kind, column: start + 1, params: Vec::new(), bundle: None };
    if i == s.len() {
        return Ok(spec);
    }
    if s[i] != ':' && s[i] != ',' {
        return err(i + 1, format!("unexpected '{}' after name", s[i]));
    }
    i += 1;
    loop {
        let key_start = i;
        while i < s.len() && is_name_char(s[i]) {
            i += 1;
        }
        if i == key_start {
            return err(i + 1, "expected a parameter name");
        }
        let key: String = s[key_start..i].iter().collect();
        if i == s.len() || s[i] != '=' {
            return err(i + 1, format!("expected '=' after '{key}'"));
        }
        i += 1;
        if key == "bundle" {
            spec.bundle = Some(Box::new(parse_spec(s, i)?));
            return Ok(spec);
        }
        if spec.param(&key).is_some() {
            return err(key_start + 1, format!("parameter '{key}' given twice"));
        }
        let val_start = i;
        while i < s.len() && s[i] != ',' {
            i += 1;
        }
        let value = parse_value(&s[val_start..i], val_start)?;
        spec.params.push(Param { key, value, column: key_start + 1 });
        if i == s.len() {
            return Ok(spec);
        }
        i += 1;
    }
}

fn parse_value(s: &[char], offset: usize) -> Result<Value, ParseError> {
    if s.is_empty() {
        return err(offset + 1, "empty value");
    }
    let word = s[0].is_ascii_alphabetic() && s.iter().all(|&c| is_name_char(c));
    match parse_number_at(s, offset) {
        Ok(v) => Ok(Value::Number(v)),
        Err(_) if word => Ok(Value::Word(s.iter().collect())),
        Err(e) => Err(e),
    }
}

/// Evaluate an arithmetic expression such as `2pi/3`.
pub fn parse_number(input: &str) -> Result<f64, ParseError> {
    let chars: Vec<char> = input.chars().collect();
    parse_number_at(&chars, 0)
}

fn parse_number_at(s: &[char], offset: usize) -> Result<f64, ParseError> {
    let mut p = Expr { s, pos: 0, offset };
    let v = p.sum()?;
    p.skip_ws();
    if p.pos < s.len() {
        return err(offset + p.pos + 1, format!("unexpected '{}'", s[p.pos]));
    }
    if !v.is_finite() {
        return err(offset + 1, "value is not finite");
    }
    Ok(v)
}

struct Expr<'a> {
    s: &'a [char],
    pos: usize,
    offset: usize,
}

impl Expr<'_> {
    fn peek(&self) -> Option<char> {
        self.s.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn column(&self) -> usize {
        self.offset + self.pos + 1
    }

    fn sum(&mut self) -> Result<f64, ParseError> {
        let mut v = self.product()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    v += self.product()?;
                }
                Some('-') => {
                    self.pos += 1;
                    v -= self.product()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn product(&mut self) -> Result<f64, ParseError> {
        let mut v = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    v *= self.unary()?;
                }
                Some('/') => {
                    self.pos += 1;
                    v /= self.unary()?;
                }
                Some(c) if c.is_ascii_alphabetic() || c == '(' => v *= self.atom()?,
                _ => return Ok(v),
            }
        }
    }

    fn unary(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => err(self.column(), "expected a number"),
            Some('(') => {
                self.pos += 1;
                let v = self.sum()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return err(self.column(), "expected ')'");
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                while self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
                    self.pos += 1;
                }
                let name: String = self.s[start..self.pos].iter().collect();
                match name.as_str() {
                    "pi" => Ok(PI),
                    _ => err(self.offset + start + 1, format!("unknown constant '{name}'")),
                }
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
                    self.pos += 1;
                }
                if matches!(self.peek(), Some('e' | 'E'))
                    && self.s.get(self.pos + 1).is_some_and(|c| c.is_ascii_digit() || *c == '-' || *c == '+')
                {
                    self.pos += 2;
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.pos += 1;
                    }
                }
                let text: String = self.s[start..self.pos].iter().collect();
                text.parse::<f64>().or_else(|_| err(self.offset + start + 1, format!("malformed number '{text}'")))
            }
            Some(c) => err(self.column(), format!("unexpected '{c}'")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        assert_eq!(parse_number("pi/2").unwrap(), PI / 2.0);
        assert!((parse_number("2pi/3").unwrap() - 2.0 * PI / 3.0).abs() < 1e-15);
        assert_eq!(parse_number("-1.5e-3").unwrap(), -1.5e-3);
        assert_eq!(parse_number("2*(1+3)").unwrap(), 8.0);
        assert_eq!(parse_number("1 - -2").unwrap(), 3.0);
    }

    #[test]
    fn nested_bundle() {
        let s = Spec::parse("chern:k=1,bundle=monopole:n=-2").unwrap();
        assert_eq!(s.kind, "chern");
        assert_eq!(s.params[0].value, Value::Number(1.0));
        let b = s.bundle.unwrap();
        assert_eq!(b.kind, "monopole");
        assert_eq!(b.params[0].value, Value::Number(-2.0));
        assert_eq!(b.column, 18);
    }

    #[test]
    fn bundle_without_params() {
        let s = Spec::parse("euler,bundle=ts2").unwrap();
        assert!(s.params.is_empty());
        assert_eq!(s.bundle.unwrap().kind, "ts2");
    }

    #[test]
    fn words_and_errors() {
        let s = Spec::parse("random-torus:group=so,seed=3").unwrap();
        assert_eq!(s.params[0].value, Value::Word("so".into()));
        let t = Spec::parse("trivial:base=t3,rank=2").unwrap();
        assert_eq!(t.params[0].value, Value::Word("t3".into()));
        assert_eq!(Spec::parse("x:a=pi-1").unwrap().params[0].value, Value::Number(std::f64::consts::PI - 1.0));
        assert_eq!(Spec::parse("latitude:theta0=pi/").unwrap_err().column, 20);
        assert_eq!(Spec::parse("latitude:theta0").unwrap_err().column, 16);
        assert_eq!(Spec::parse("chern:k=1,k=2").unwrap_err().column, 11);
        assert_eq!(Spec::parse("").unwrap_err().column, 1);
        assert_eq!(Spec::parse("latitude:theta0=2pq").unwrap_err().column, 18);
    }
}
