//! Text format for operators and operator systems.
//!
//! Expressions are sums of products over the atoms `z`, integer (or
//! `p/q` rational) literals, variable names, and `D1`, `D2`, ... for the
//! z-scaled log derivative in the first, second, ... variable. `^` takes
//! an integer exponent; negative exponents apply to plain monomials
//! only. Multiplication is explicit. System files list metadata lines
//! followed by one `operator <name> = <expression>` line each.

use super::{DiffOperator, OperatorSystem, PfError};
use crate::cohring::{rat, Rat};
use num_traits::{One, Signed, Zero};

const LOCAL_X: &str = include_str!("../../systems/local_x.ops");
const LOCAL_Y: &str = include_str!("../../systems/local_y.ops");
const GLOBAL_X: &str = include_str!("../../systems/global_x.ops");
const GLOBAL_Y: &str = include_str!("../../systems/global_y.ops");

/// Names of the operator systems shipped with the crate.
pub fn system_names() -> Vec<&'static str> {
    vec!["local_x", "local_y", "global_x", "global_y"]
}

/// Load one of the shipped operator systems by name.
pub fn load_system(name: &str) -> Result<OperatorSystem, PfError> {
    let text = match name {
        "local_x" => LOCAL_X,
        "local_y" => LOCAL_Y,
        "global_x" => GLOBAL_X,
        "global_y" => GLOBAL_Y,
        _ => {
            return Err(PfError::Shape(format!(
                "no shipped system named {name}; known: {}",
                system_names().join(", ")
            )))
        }
    };
    parse_system(text)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, PfError> {
    let mut toks = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                toks.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                toks.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                toks.push((i, Tok::Star));
                i += 1;
            }
            '/' => {
                toks.push((i, Tok::Slash));
                i += 1;
            }
            '^' => {
                toks.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: i64 = text[start..i].parse().map_err(|_| PfError::Parse {
                    pos: start,
                    msg: "integer literal out of range".to_string(),
                })?;
                toks.push((start, Tok::Num(n)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => {
                return Err(PfError::Parse {
                    pos: i,
                    msg: format!("unexpected character {c:?}"),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    vars: &'a [String],
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), PfError> {
        let pos = self.here();
        match self.bump() {
            Some(t) if t == tok => Ok(()),
            other => Err(PfError::Parse {
                pos,
                msg: format!("expected {tok:?}, found {other:?}"),
            }),
        }
    }

    fn expr(&mut self) -> Result<DiffOperator, PfError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<DiffOperator, PfError> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.bump();
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<DiffOperator, PfError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let f = self.factor()?;
            return Ok(-&f);
        }
        self.power()
    }

    fn power(&mut self) -> Result<DiffOperator, PfError> {
        let base = self.primary()?;
        if !matches!(self.peek(), Some(Tok::Caret)) {
            return Ok(base);
        }
        self.bump();
        let pos = self.here();
        let e = self.exponent()?;
        if e >= 0 {
            Ok(base.pow(e as u32))
        } else {
            let inv = base.monomial_inverse().map_err(|err| PfError::Parse {
                pos,
                msg: format!("negative exponent: {err}"),
            })?;
            Ok(inv.pow((-e) as u32))
        }
    }

    fn exponent(&mut self) -> Result<i64, PfError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Num(n)) => Ok(n),
            Some(Tok::Minus) => match self.bump() {
                Some(Tok::Num(n)) => Ok(-n),
                other => Err(PfError::Parse {
                    pos,
                    msg: format!("expected integer exponent, found {other:?}"),
                }),
            },
            Some(Tok::LParen) => {
                let mut sign = 1;
                if matches!(self.peek(), Some(Tok::Minus)) {
                    self.bump();
                    sign = -1;
                }
                let n = match self.bump() {
                    Some(Tok::Num(n)) => n,
                    other => {
                        return Err(PfError::Parse {
                            pos,
                            msg: format!("expected integer exponent, found {other:?}"),
                        })
                    }
                };
                self.expect(Tok::RParen)?;
                Ok(sign * n)
            }
            other => Err(PfError::Parse {
                pos,
                msg: format!("expected integer exponent, found {other:?}"),
            }),
        }
    }

    fn primary(&mut self) -> Result<DiffOperator, PfError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Num(n)) => {
                // Allow a rational literal p/q.
                if matches!(self.peek(), Some(Tok::Slash)) {
                    self.bump();
                    let dpos = self.here();
                    match self.bump() {
                        Some(Tok::Num(d)) if d != 0 => {
                            Ok(DiffOperator::scalar(self.vars, rat(n, d)))
                        }
                        other => Err(PfError::Parse {
                            pos: dpos,
                            msg: format!("expected nonzero denominator, found {other:?}"),
                        }),
                    }
                } else {
                    Ok(DiffOperator::scalar(self.vars, rat(n, 1)))
                }
            }
            Some(Tok::Ident(name)) => {
                if name == "z" {
                    return Ok(DiffOperator::z(self.vars));
                }
                if let Some(rest) = name.strip_prefix('D') {
                    if let Ok(k) = rest.parse::<usize>() {
                        if k >= 1 && k <= self.vars.len() {
                            return Ok(DiffOperator::delta(self.vars, &self.vars[k - 1]));
                        }
                        return Err(PfError::Parse {
                            pos,
                            msg: format!("derivative index {k} out of range"),
                        });
                    }
                }
                if self.vars.iter().any(|v| v == &name) {
                    return Ok(DiffOperator::var(self.vars, &name));
                }
                Err(PfError::Parse {
                    pos,
                    msg: format!("unknown symbol {name}"),
                })
            }
            other => Err(PfError::Parse {
                pos,
                msg: format!("expected an atom, found {other:?}"),
            }),
        }
    }
}

/// Parse an operator expression over the given variables.
pub fn parse_operator(text: &str, vars: &[String]) -> Result<DiffOperator, PfError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        vars,
        end: text.len(),
    };
    let op = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(PfError::Parse {
            pos: p.here(),
            msg: "trailing input after expression".to_string(),
        });
    }
    Ok(op)
}

/// Render an operator in the same format `parse_operator` accepts.
/// Terms appear in the normal-form order, so printing is deterministic
/// and parsing the output reproduces the operator exactly.
pub fn print_operator(op: &DiffOperator) -> String {
    if op.is_zero() {
        return "0".to_string();
    }
    let mut pieces: Vec<(bool, String)> = Vec::new();
    for ((shift, dpow), poly) in op.terms() {
        for (&zp, c) in poly {
            let mut factors: Vec<String> = Vec::new();
            let abs = c.abs();
            if !abs.is_one() {
                if abs.denom().is_one() {
                    factors.push(abs.numer().to_string());
                } else {
                    factors.push(format!("{}/{}", abs.numer(), abs.denom()));
                }
            }
            for (v, &k) in shift.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if k == 1 {
                    factors.push(op.vars()[v].clone());
                } else {
                    factors.push(format!("{}^{}", op.vars()[v], k));
                }
            }
            match zp {
                0 => {}
                1 => factors.push("z".to_string()),
                k => factors.push(format!("z^{k}")),
            }
            for (v, &a) in dpow.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                if a == 1 {
                    factors.push(format!("D{}", v + 1));
                } else {
                    factors.push(format!("D{}^{}", v + 1, a));
                }
            }
            if factors.is_empty() {
                factors.push("1".to_string());
            }
            pieces.push((c < &Rat::zero(), factors.join("*")));
        }
    }
    let mut out = String::new();
    for (i, (neg, body)) in pieces.iter().enumerate() {
        if i == 0 {
            if *neg {
                out.push('-');
            }
        } else if *neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(body);
    }
    out
}

/// Parse a system file: `system <name>`, `vars <v1> <v2> ...`,
/// `rank <n>`, then `operator <name> = <expression>` lines. `#` starts
/// a comment.
pub fn parse_system(text: &str) -> Result<OperatorSystem, PfError> {
    let mut name: Option<String> = None;
    let mut vars: Option<Vec<String>> = None;
    let mut rank: Option<usize> = None;
    let mut operators: Vec<(String, DiffOperator)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| PfError::Parse {
            pos: lineno + 1,
            msg,
        };
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match key {
            "system" => name = Some(rest.to_string()),
            "vars" => {
                vars = Some(rest.split_whitespace().map(|s| s.to_string()).collect());
            }
            "rank" => {
                rank = Some(
                    rest.parse()
                        .map_err(|_| err(format!("bad rank {rest:?}")))?,
                );
            }
            "operator" => {
                let vars = vars
                    .as_ref()
                    .ok_or_else(|| err("vars must come before operators".to_string()))?;
                let (op_name, expr) = rest
                    .split_once('=')
                    .ok_or_else(|| err("operator line needs <name> = <expression>".to_string()))?;
                let op =
                    parse_operator(expr.trim(), vars).map_err(|e| match e {
                        PfError::Parse { pos, msg } => PfError::Parse {
                            pos: lineno + 1,
                            msg: format!("column {pos}: {msg}"),
                        },
                        other => other,
                    })?;
                operators.push((op_name.trim().to_string(), op));
            }
            _ => return Err(err(format!("unknown directive {key:?}"))),
        }
    }

    let name = name.ok_or(PfError::Parse {
        pos: 0,
        msg: "missing system line".to_string(),
    })?;
    let vars = vars.ok_or(PfError::Parse {
        pos: 0,
        msg: "missing vars line".to_string(),
    })?;
    let rank = rank.ok_or(PfError::Parse {
        pos: 0,
        msg: "missing rank line".to_string(),
    })?;
    if operators.is_empty() {
        return Err(PfError::Parse {
            pos: 0,
            msg: "system has no operators".to_string(),
        });
    }
    Ok(OperatorSystem {
        name,
        vars,
        operators,
        expected_rank: rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohring::rat_i;

    fn qvars() -> Vec<String> {
        vec!["q1".to_string(), "q2".to_string()]
    }

    #[test]
    fn parse_simple_expressions() {
        let vars = qvars();
        let d1 = DiffOperator::delta(&vars, "q1");
        let z = DiffOperator::z(&vars);
        let got = parse_operator("(D1 + z)^2", &vars).unwrap();
        assert_eq!(got, (&d1 + &z).pow(2));

        let got = parse_operator("3*q1*D2 - 1/2", &vars).unwrap();
        let want = &(&(&DiffOperator::scalar(&vars, rat_i(3)) * &DiffOperator::var(&vars, "q1"))
            * &DiffOperator::delta(&vars, "q2"))
            - &DiffOperator::scalar(&vars, rat(1, 2));
        assert_eq!(got, want);

        let got = parse_operator("q1^-1*D1", &vars).unwrap();
        let want = &DiffOperator::var_pow(&vars, "q1", -1) * &DiffOperator::delta(&vars, "q1");
        assert_eq!(got, want);
        assert_eq!(parse_operator("q1^(-1)*D1", &vars).unwrap(), want);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let vars = qvars();
        assert!(matches!(
            parse_operator("q3 + 1", &vars),
            Err(PfError::Parse { .. })
        ));
        assert!(matches!(
            parse_operator("D5", &vars),
            Err(PfError::Parse { .. })
        ));
        assert!(matches!(
            parse_operator("(D1 + z", &vars),
            Err(PfError::Parse { .. })
        ));
        assert!(matches!(
            parse_operator("(D1 + z)^-1", &vars),
            Err(PfError::Parse { .. })
        ));
        assert!(matches!(
            parse_operator("D1 D2", &vars),
            Err(PfError::Parse { .. })
        ));
    }

    #[test]
    fn print_then_parse_is_identity() {
        let vars = qvars();
        let samples = [
            "D1^3 - 3*q1*(3*D1 + z)*(3*D1 + 2*z)*(D2 - D1)",
            "D2*(D2 - D1) - q2",
            "q1^-1*D1*(5*D2 - 3*D1 + z)",
            "1/3*z^2*D1 - q2^2",
        ];
        for text in samples {
            let op = parse_operator(text, &vars).unwrap();
            let printed = print_operator(&op);
            let reparsed = parse_operator(&printed, &vars).unwrap();
            assert_eq!(op, reparsed, "roundtrip failed for {text}");
        }
    }

    #[test]
    fn shipped_systems_load_and_roundtrip() {
        for name in system_names() {
            let sys = load_system(name).unwrap();
            assert_eq!(sys.expected_rank, 6, "{name}");
            assert!(sys.operators.len() >= 2, "{name}");
            for (op_name, op) in &sys.operators {
                let printed = print_operator(op);
                let reparsed = parse_operator(&printed, &sys.vars).unwrap();
                assert_eq!(&reparsed, op, "{name}.{op_name}");
            }
        }
        assert!(load_system("nonesuch").is_err());
    }

    #[test]
    fn system_parser_rejects_malformed_input() {
        assert!(parse_system("vars x y\nrank 6\noperator a = D1").is_err());
        assert!(parse_system("system s\nrank 6\noperator a = D1").is_err());
        assert!(parse_system("system s\nvars x y\nrank 6").is_err());
        assert!(parse_system("system s\nvars x y\nrank q\noperator a = D1").is_err());
        assert!(parse_system("system s\nvars x y\nrank 6\noperator a D1").is_err());
    }
}
