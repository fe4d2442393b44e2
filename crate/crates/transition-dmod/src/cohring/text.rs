//! Plain-text serialization for ring specifications.
//!
//! The format is line based and order insensitive apart from the header:
//!
//! ```text
//! ring cubic_ambient_x
//! top_degree 8
//! generator h 2
//! generator xi 2
//! relation xi^2 -> h*xi
//! relation h^4 -> 0
//! ```
//!
//! Relation right-hand sides are signed sums of rational multiples of
//! monomials, e.g. `h*xi - 1/2*h^2`. Blank lines and lines starting with
//! `#` are ignored.

use super::{Generator, Monomial, Rat, Relation, RingError, RingSpec};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::str::FromStr;
use std::sync::Arc;

pub fn parse_ring_spec(text: &str) -> Result<Arc<RingSpec>, RingError> {
    let mut name: Option<String> = None;
    let mut top_degree: Option<u32> = None;
    let mut generators: Vec<Generator> = Vec::new();
    let mut raw_relations: Vec<(usize, String, String)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut words = line.split_whitespace();
        let key = words.next().unwrap();
        match key {
            "ring" => {
                name = Some(
                    words
                        .next()
                        .ok_or_else(|| err(lineno, "missing ring name"))?
                        .to_string(),
                );
            }
            "top_degree" => {
                let v = words
                    .next()
                    .ok_or_else(|| err(lineno, "missing top_degree value"))?;
                top_degree = Some(
                    v.parse()
                        .map_err(|_| err(lineno, "top_degree is not an integer"))?,
                );
            }
            "generator" => {
                let gname = words
                    .next()
                    .ok_or_else(|| err(lineno, "missing generator name"))?;
                let gdeg: u32 = words
                    .next()
                    .ok_or_else(|| err(lineno, "missing generator degree"))?
                    .parse()
                    .map_err(|_| err(lineno, "generator degree is not an integer"))?;
                generators.push(Generator {
                    name: gname.to_string(),
                    degree: gdeg,
                });
            }
            "relation" => {
                let rest = line["relation".len()..].trim();
                let (lhs, rhs) = rest
                    .split_once("->")
                    .ok_or_else(|| err(lineno, "relation needs `lhs -> rhs`"))?;
                raw_relations.push((lineno, lhs.trim().to_string(), rhs.trim().to_string()));
            }
            other => {
                return Err(err(lineno, &format!("unknown directive `{other}`")));
            }
        }
    }

    let name = name.ok_or_else(|| err(0, "missing `ring` header"))?;
    let top_degree = top_degree.ok_or_else(|| err(0, "missing `top_degree`"))?;
    let mut relations = Vec::new();
    for (lineno, lhs, rhs) in raw_relations {
        let lhs_mono = parse_monomial(&lhs, &generators).map_err(|m| err(lineno, &m))?;
        let rhs_poly = parse_poly(&rhs, &generators).map_err(|m| err(lineno, &m))?;
        relations.push(Relation {
            lhs: lhs_mono,
            rhs: rhs_poly,
        });
    }
    RingSpec::new(&name, generators, relations, top_degree)
}

pub fn print_ring_spec(spec: &RingSpec) -> String {
    let mut out = String::new();
    out.push_str(&format!("ring {}\n", spec.name()));
    out.push_str(&format!("top_degree {}\n", spec.top_degree()));
    for g in spec.generators() {
        out.push_str(&format!("generator {} {}\n", g.name, g.degree));
    }
    for rel in spec.relations() {
        out.push_str(&format!(
            "relation {} -> {}\n",
            spec.mono_string(&rel.lhs),
            poly_string(spec, &rel.rhs)
        ));
    }
    out
}

fn poly_string(spec: &RingSpec, poly: &[(Monomial, Rat)]) -> String {
    if poly.is_empty() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (i, (m, c)) in poly.iter().enumerate() {
        let ms = spec.mono_string(m);
        let body = if c.is_one() && !m.is_unit() {
            ms
        } else if m.is_unit() {
            format!("{c}")
        } else {
            format!("{c}*{ms}")
        };
        if i == 0 {
            parts.push(body);
        } else {
            parts.push(format!("+ {body}"));
        }
    }
    parts.join(" ")
}

/// Parse a ring element from its display form, e.g. `3*h + 1/2*h*xi - xi^2`.
pub fn parse_element(spec: &Arc<RingSpec>, s: &str) -> Result<super::RingElement, RingError> {
    let s = s.trim();
    let terms = parse_poly(s, spec.generators()).map_err(|m| err(0, &m))?;
    Ok(spec.element_from_terms(terms))
}

fn err(line: usize, msg: &str) -> RingError {
    RingError::Parse {
        line,
        msg: msg.to_string(),
    }
}

fn gen_index(name: &str, gens: &[Generator]) -> Result<usize, String> {
    gens.iter()
        .position(|g| g.name == name)
        .ok_or_else(|| format!("unknown generator `{name}`"))
}

fn parse_monomial(s: &str, gens: &[Generator]) -> Result<Monomial, String> {
    let mut expo = vec![0u32; gens.len()];
    if s == "1" {
        return Ok(Monomial(expo));
    }
    for factor in s.split('*') {
        let factor = factor.trim();
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => {
                let e: u32 = e
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad exponent in `{factor}`"))?;
                (b.trim(), e)
            }
            None => (factor, 1),
        };
        let idx = gen_index(base, gens)?;
        expo[idx] += exp;
    }
    Ok(Monomial(expo))
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| format!("bad rational `{s}`"))?;
            let d = BigInt::from_str(d.trim()).map_err(|_| format!("bad rational `{s}`"))?;
            if d.is_zero() {
                return Err(format!("zero denominator in `{s}`"));
            }
            Ok(Rat::new(n, d))
        }
        None => {
            let n = BigInt::from_str(s.trim()).map_err(|_| format!("bad rational `{s}`"))?;
            Ok(Rat::from_integer(n))
        }
    }
}

fn parse_poly(s: &str, gens: &[Generator]) -> Result<Vec<(Monomial, Rat)>, String> {
    let s = s.trim();
    if s == "0" {
        return Ok(Vec::new());
    }
    let mut out: Vec<(Monomial, Rat)> = Vec::new();
    for (sign, term) in split_signed_terms(s)? {
        let term = term.trim();
        if term.is_empty() {
            return Err("empty term".to_string());
        }
        // A term is coeff, monomial, or coeff*monomial. The coefficient is
        // whatever leading *-separated factors parse as rationals.
        let mut coeff = Rat::one();
        let mut mono_parts: Vec<&str> = Vec::new();
        for factor in term.split('*') {
            let factor = factor.trim();
            if mono_parts.is_empty() {
                if let Ok(c) = parse_rat(factor) {
                    coeff *= c;
                    continue;
                }
            }
            mono_parts.push(factor);
        }
        let mono = if mono_parts.is_empty() {
            Monomial(vec![0; gens.len()])
        } else {
            parse_monomial(&mono_parts.join("*"), gens)?
        };
        if sign < 0 {
            coeff = -coeff;
        }
        if let Some(slot) = out.iter_mut().find(|(m, _)| *m == mono) {
            slot.1 += coeff;
        } else {
            out.push((mono, coeff));
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    Ok(out)
}

fn split_signed_terms(s: &str) -> Result<Vec<(i32, String)>, String> {
    let mut out = Vec::new();
    let mut sign = 1;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '+' | '-' => {
                if cur.trim().is_empty() && out.is_empty() && ch == '-' && sign == 1 {
                    sign = -1;
                } else if cur.trim().is_empty() {
                    return Err("dangling sign".to_string());
                } else {
                    out.push((sign, std::mem::take(&mut cur)));
                    sign = if ch == '-' { -1 } else { 1 };
                }
            }
            _ => cur.push(ch),
        }
    }
    if cur.trim().is_empty() {
        return Err("trailing sign".to_string());
    }
    out.push((sign, cur));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{ring_x, ring_y};
    use super::*;

    #[test]
    fn roundtrip_builtin_specs() {
        for spec in [ring_x(), ring_y()] {
            let text = print_ring_spec(&spec);
            let back = parse_ring_spec(&text).unwrap();
            assert_eq!(back.name(), spec.name());
            assert_eq!(back.dim(), spec.dim());
            assert_eq!(back.basis(), spec.basis());
            let text2 = print_ring_spec(&back);
            assert_eq!(text, text2);
        }
    }

    #[test]
    fn parse_with_comments_and_coefficients() {
        let text = "\
# a three step tower
ring toy
top_degree 6
generator a 2
generator b 2
relation b^2 -> 1/2*a*b + a^2
relation a^3 -> 0
relation a^2*b -> 0
";
        let spec = parse_ring_spec(text).unwrap();
        // Irreducible monomials of degree at most 6: 1, a, b, a^2, a*b.
        assert_eq!(spec.dim(), 5);
        let a = spec.gen_elem("a");
        let b = spec.gen_elem("b");
        let b2 = &b * &b;
        let expect = &(&a * &b).scale(&super::super::rat(1, 2)) + &(&a * &a);
        assert_eq!(b2, expect);
    }

    #[test]
    fn unknown_generator_rejected() {
        let text = "\
ring bad
top_degree 4
generator a 2
relation c^2 -> 0
";
        assert!(parse_ring_spec(text).is_err());
    }

    #[test]
    fn missing_header_rejected() {
        assert!(parse_ring_spec("top_degree 4\n").is_err());
    }
}
