//! Parser for the state grammar
//!
//! ```text
//! spec  := term ("," term)*
//! term  := "p" uint "l" int ["*" coef]
//! coef  := float | float ("+" | "-") float "i" | float "i"
//! ```
//!
//! e.g. `p0l2,p0l0`, `p1l-1*0.6`, `p0l1*0.5+0.5i,p0l-1*0.5-0.5i`.

use std::fmt;

use axial_fisher::LGIndex;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub input: String,
    /// Byte offset of the offending character.
    pub position: usize,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "state spec error at position {}: {}",
            self.position, self.message
        )?;
        writeln!(f, "  {}", self.input)?;
        write!(
            f,
            "  {}^",
            " ".repeat(
                self.input[..self.position.min(self.input.len())]
                    .chars()
                    .count()
            )
        )
    }
}

impl std::error::Error for SpecError {}

struct Cursor<'a> {
    input: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn fail<T>(&self, at: usize, message: impl Into<String>) -> Result<T, SpecError> {
        Err(SpecError {
            input: self.input.to_string(),
            position: at,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.input[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<(), SpecError> {
        match self.peek() {
            Some(got) if got == c => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(got) => self.fail(self.pos, format!("expected '{c}', found '{got}'")),
            None => self.fail(self.pos, format!("expected '{c}', found end of input")),
        }
    }

    fn integer(&mut self, signed: bool) -> Result<i64, SpecError> {
        let start = self.pos;
        let bytes = self.input.as_bytes();
        let mut end = start;
        if signed && end < bytes.len() && (bytes[end] == b'-' || bytes[end] == b'+') {
            end += 1;
        }
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        match self.input[start..end].parse::<i64>() {
            Ok(v) => {
                self.pos = end;
                Ok(v)
            }
            Err(_) => self.fail(start, "expected an integer"),
        }
    }

    /// Longest prefix that parses as a float, not crossing ',' or 'i'.
    fn float(&mut self) -> Result<f64, SpecError> {
        let start = self.pos;
        let bytes = self.input.as_bytes();
        let mut end = start;
        if end < bytes.len() && (bytes[end] == b'-' || bytes[end] == b'+') {
            end += 1;
        }
        while end < bytes.len() {
            let b = bytes[end];
            let exp_sign = (b == b'-' || b == b'+') && matches!(bytes[end - 1], b'e' | b'E');
            if b.is_ascii_digit() || b == b'.' || b == b'e' || b == b'E' || exp_sign {
                end += 1;
            } else {
                break;
            }
        }
        match self.input[start..end].parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos = end;
                Ok(v)
            }
            _ => self.fail(start, "expected a finite number"),
        }
    }

    fn coefficient(&mut self) -> Result<Complex64, SpecError> {
        let first = self.float()?;
        match self.peek() {
            Some('i') => {
                self.pos += 1;
                Ok(Complex64::new(0.0, first))
            }
            Some(sign @ ('+' | '-')) => {
                self.pos += 1;
                let im = self.float()?;
                self.expect('i')?;
                let im = if sign == '-' { -im } else { im };
                Ok(Complex64::new(first, im))
            }
            _ => Ok(Complex64::new(first, 0.0)),
        }
    }

    fn term(&mut self) -> Result<(LGIndex, Complex64), SpecError> {
        self.expect('p')?;
        let p_at = self.pos;
        let p = self.integer(false)?;
        let p = u32::try_from(p).or_else(|_| self.fail(p_at, "radial index out of range"))?;
        self.expect('l')?;
        let l_at = self.pos;
        let l = self.integer(true)?;
        let l = i32::try_from(l).or_else(|_| self.fail(l_at, "azimuthal index out of range"))?;
        let c = if self.peek() == Some('*') {
            self.pos += 1;
            self.coefficient()?
        } else {
            Complex64::new(1.0, 0.0)
        };
        Ok((LGIndex::new(p, l), c))
    }
}

/// Parses the raw terms; coefficients are returned as written.
pub fn parse_terms(input: &str) -> Result<Vec<(LGIndex, Complex64)>, SpecError> {
    let mut cur = Cursor { input, pos: 0 };
    let mut terms: Vec<(LGIndex, Complex64)> = Vec::new();
    loop {
        let at = cur.pos;
        let (idx, c) = cur.term()?;
        if terms.iter().any(|(i, _)| *i == idx) {
            return cur.fail(at, format!("mode {idx} appears twice"));
        }
        terms.push((idx, c));
        match cur.peek() {
            None => return Ok(terms),
            Some(',') => cur.pos += 1,
            Some(other) => return cur.fail(cur.pos, format!("unexpected '{other}'")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_terms() {
        let t = parse_terms("p0l2,p0l0").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].0, LGIndex::new(0, 2));
        assert_eq!(t[1].1, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn coefficients() {
        let t = parse_terms("p1l-3*0.5+0.25i,p0l1*-2e-1,p2l0*1.5i,p0l4*1-2i").unwrap();
        assert_eq!(t[0], (LGIndex::new(1, -3), Complex64::new(0.5, 0.25)));
        assert_eq!(t[1].1, Complex64::new(-0.2, 0.0));
        assert_eq!(t[2].1, Complex64::new(0.0, 1.5));
        assert_eq!(t[3].1, Complex64::new(1.0, -2.0));
        assert_eq!(
            parse_terms("p0l0*1e+2").unwrap()[0].1,
            Complex64::new(100.0, 0.0)
        );
    }

    #[test]
    fn positions_point_at_the_problem() {
        let e = parse_terms("p0l2,q0l0").unwrap_err();
        assert_eq!(e.position, 5);
        let e = parse_terms("p0lx").unwrap_err();
        assert_eq!(e.position, 3);
        let e = parse_terms("p-1l0").unwrap_err();
        assert_eq!(e.position, 1);
        let e = parse_terms("p0l1*0.5+0.5").unwrap_err();
        assert_eq!(e.position, 12);
        let e = parse_terms("p0l1,p0l1").unwrap_err();
        assert!(e.message.contains("twice"));
        assert_eq!(e.position, 5);
        let e = parse_terms("p0l1;").unwrap_err();
        assert_eq!(e.position, 4);
        assert!(parse_terms("").is_err());
        assert!(parse_terms("p0l1,").is_err());
    }

    #[test]
    fn caret_rendering() {
        let e = parse_terms("p0l2,x").unwrap_err();
        let text = e.to_string();
        assert!(text.ends_with("       ^"), "{text:?}");
    }
}
