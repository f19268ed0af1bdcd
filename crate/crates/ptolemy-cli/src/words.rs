//! Word syntax for the command line: letters `a A b B`, whitespace, and
//! powers `x^n` or `(...)^n`.

use ptolemy::group::{Gen, GeneratorWord};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("syntax error at position {pos}: {msg}")]
pub struct SyntaxError {
    pub pos: usize,
    pub msg: String,
}

pub fn parse_word(s: &str) -> Result<GeneratorWord, SyntaxError> {
    let chars: Vec<char> = s.chars().collect();
    let mut p = Parser { chars, pos: 0 };
    let w = p.sequence()?;
    if p.pos < p.chars.len() {
        return Err(p.error("unmatched ')'"));
    }
    Ok(GeneratorWord(w))
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, msg: &str) -> SyntaxError {
        SyntaxError { pos: self.pos, msg: msg.to_string() }
    }

    fn peek(&mut self) -> Option<char> {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
        self.chars.get(self.pos).copied()
    }

    fn sequence(&mut self) -> Result<Vec<Gen>, SyntaxError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            let item = match c {
                'a' | 'A' | 'b' | 'B' => {
                    self.pos += 1;
                    vec![match c {
                        'a' => Gen::A,
                        'A' => Gen::AInv,
                        'b' => Gen::B,
                        _ => Gen::BInv,
                    }]
                }
                '(' => {
                    self.pos += 1;
                    let inner = self.sequence()?;
                    if self.peek() != Some(')') {
                        return Err(self.error("expected ')'"));
                    }
                    self.pos += 1;
                    inner
                }
                ')' => break,
                _ => return Err(self.error(&format!("invalid letter {c:?}"))),
            };
            let n = self.exponent()?;
            for _ in 0..n {
                out.extend_from_slice(&item);
            }
        }
        Ok(out)
    }

    fn exponent(&mut self) -> Result<usize, SyntaxError> {
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.pos += 1;
        self.peek();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number after '^'"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().map_err(|_| SyntaxError { pos: start, msg: "exponent too large".into() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_expand() {
        assert_eq!(parse_word("(ba)^5").unwrap().to_string(), "ba".repeat(5));
        assert_eq!(parse_word("a^4 B").unwrap().to_string(), "aaaaB");
        assert_eq!(parse_word("((ab)^2A)^2").unwrap().to_string(), "ababAababA");
        assert_eq!(parse_word("").unwrap().to_string(), "");
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse_word("abx").unwrap_err().pos, 2);
        assert_eq!(parse_word("(ab").unwrap_err().pos, 3);
        assert_eq!(parse_word("ab)").unwrap_err().pos, 2);
        assert_eq!(parse_word("a^").unwrap_err().pos, 2);
    }
}
