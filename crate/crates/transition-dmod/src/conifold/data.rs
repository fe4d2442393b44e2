//! Integer transition data: the homology bookkeeping around a small
//! contraction together with the finite curve-count table that feeds the
//! series constructions.
//!
//! A data set records a rank split `r + m`, a unimodular basis matrix, the
//! exceptional classes spanning the `m` contracted directions, the integer
//! pushforward matrix onto the surviving `r` directions, and a finite table
//! of rational curve counts for classes with nonvanishing pushforward.
//! Construction validates the whole package once; the series builders
//! consume it read-only.

use super::ConifoldError;
use crate::cohring::{Generator, Rat, RingError, RingSpec};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

/// Formal coefficient ring for a geometry with `slots` independent curve
/// directions: one divisor slot of degree 2 and one curve slot of degree 4
/// per direction, a single point slot of degree 6, and every product of two
/// generators equal to zero.
pub fn cy_ring(slots: usize) -> Result<Arc<RingSpec>, RingError> {
    let mut gens = Vec::with_capacity(2 * slots + 1);
    for i in 1..=slots {
        gens.push(Generator {
            name: format!("d{i}"),
            degree: 2,
        });
    }
    for i in 1..=slots {
        gens.push(Generator {
            name: format!("c{i}"),
            degree: 4,
        });
    }
    gens.push(Generator {
        name: "pt".to_string(),
        degree: 6,
    });
    RingSpec::free_truncation(&format!("cy_formal_{slots}"), gens, 2)
}

/// Validated description of one small transition.
///
/// Curve classes are integer vectors in the adapted basis `b_1..b_{r+m}`:
/// the first `r` coordinates survive the contraction, the last `m` span the
/// exceptional cone. The curve table maps classes with nonvanishing
/// pushforward to rational counts; exceptional multiples are never stored
/// because their counts follow a closed form.
pub struct TransitionData {
    name: String,
    r: usize,
    m: usize,
    basis: Vec<Vec<i64>>,
    exceptional: Vec<Vec<i64>>,
    phi: Vec<Vec<i64>>,
    gw: BTreeMap<Vec<i64>, Rat>,
    gw_y: BTreeMap<Vec<i64>, Rat>,
    x_ring: Arc<RingSpec>,
    y_ring: Arc<RingSpec>,
}

impl std::fmt::Debug for TransitionData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransitionData")
            .field("name", &self.name)
            .field("r", &self.r)
            .field("m", &self.m)
            .field("k", &self.exceptional.len())
            .field("table_len", &self.gw.len())
            .finish()
    }
}

impl TransitionData {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &str,
        r: usize,
        m: usize,
        basis: Vec<Vec<i64>>,
        exceptional: Vec<Vec<i64>>,
        phi: Vec<Vec<i64>>,
        gw: Vec<(Vec<i64>, Rat)>,
        gw_y: Vec<(Vec<i64>, Rat)>,
    ) -> Result<Self, ConifoldError> {
        let bad = |msg: String| ConifoldError::Data(msg);
        if r == 0 {
            return Err(bad("at least one surviving curve direction is required".into()));
        }
        let n = r + m;
        if n > 12 {
            return Err(bad(format!("{n} curve directions exceed the supported 12")));
        }
        if basis.len() != n || basis.iter().any(|row| row.len() != n) {
            return Err(bad(format!("basis matrix must be {n} x {n}")));
        }
        let d = det(&basis);
        if d.abs() != Rat::one() {
            return Err(bad(format!("basis matrix must be unimodular, determinant is {d}")));
        }
        if m == 0 && !exceptional.is_empty() {
            return Err(bad("exceptional classes require m > 0".into()));
        }
        if m > 0 && exceptional.is_empty() {
            return Err(bad(format!("m = {m} but no exceptional classes given")));
        }
        for e in &exceptional {
            if e.len() != m {
                return Err(bad(format!("exceptional class {e:?} must have {m} coordinates")));
            }
            if e.iter().any(|&x| x < 0) {
                return Err(bad(format!("exceptional class {e:?} leaves the spanning cone")));
            }
            if e.iter().all(|&x| x == 0) {
                return Err(bad("exceptional classes must be nonzero".into()));
            }
        }
        if m > 0 && rank(&exceptional) != m {
            return Err(bad(format!(
                "exceptional classes span dimension {}, expected {m}",
                rank(&exceptional)
            )));
        }
        if phi.len() != r || phi.iter().any(|row| row.len() != n) {
            return Err(bad(format!("pushforward matrix must be {r} x {n}")));
        }
        let apply_phi = |beta: &[i64]| -> Vec<i64> {
            phi.iter()
                .map(|row| row.iter().zip(beta).map(|(a, b)| a * b).sum())
                .collect()
        };
        for e in &exceptional {
            let mut full = vec![0i64; n];
            full[r..].copy_from_slice(e);
            if apply_phi(&full).iter().any(|&x| x != 0) {
                return Err(bad(format!("exceptional class {e:?} does not push forward to zero")));
            }
        }
        if !surjective_over_z(&phi) {
            return Err(bad("pushforward is not surjective over the integers".into()));
        }
        let mut table = BTreeMap::new();
        for (beta, count) in gw {
            if beta.len() != n {
                return Err(bad(format!("table class {beta:?} must have {n} coordinates")));
            }
            if beta.iter().any(|&x| x < 0) {
                return Err(bad(format!("table class {beta:?} leaves the effective cone")));
            }
            if beta.iter().all(|&x| x == 0) {
                return Err(bad("table classes must be nonzero".into()));
            }
            if apply_phi(&beta).iter().all(|&x| x == 0) {
                return Err(bad(format!(
                    "table class {beta:?} pushes forward to zero and belongs to the multiple-cover side"
                )));
            }
            if table.insert(beta.clone(), count).is_some() {
                return Err(bad(format!("duplicate table class {beta:?}")));
            }
        }
        let mut table_y = BTreeMap::new();
        for (beta, count) in gw_y {
            if beta.len() != r {
                return Err(bad(format!("contracted-side class {beta:?} must have {r} coordinates")));
            }
            if beta.iter().any(|&x| x < 0) {
                return Err(bad(format!("contracted-side class {beta:?} leaves the effective cone")));
            }
            if beta.iter().all(|&x| x == 0) {
                return Err(bad("contracted-side classes must be nonzero".into()));
            }
            if table_y.insert(beta.clone(), count).is_some() {
                return Err(bad(format!("duplicate contracted-side class {beta:?}")));
            }
        }
        let x_ring = cy_ring(n)?;
        let y_ring = cy_ring(r)?;
        Ok(TransitionData {
            name: name.to_string(),
            r,
            m,
            basis,
            exceptional,
            phi,
            gw: table,
            gw_y: table_y,
            x_ring,
            y_ring,
        })
    }

    /// Parse the line-based text format. Keys: `transition` (name), `dims`
    /// (r and m), `basis` / `exceptional` / `phi` (one integer row each),
    /// `gw` / `gwy` (integer coordinates followed by a rational count).
    /// Blank lines and lines starting with `#` are ignored.
    pub fn from_text(text: &str) -> Result<Self, ConifoldError> {
        let mut name: Option<String> = None;
        let mut dims: Option<(usize, usize)> = None;
        let mut basis = Vec::new();
        let mut exceptional = Vec::new();
        let mut phi = Vec::new();
        let mut gw = Vec::new();
        let mut gw_y = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut words = line.split_whitespace();
            let key = words.next().unwrap();
            let rest: Vec<&str> = words.collect();
            match key {
                "transition" => {
                    let n = rest
                        .first()
                        .ok_or_else(|| err(lineno, "missing transition name"))?;
                    name = Some(n.to_string());
                }
                "dims" => {
                    if rest.len() != 2 {
                        return Err(err(lineno, "dims needs two integers"));
                    }
                    let r = rest[0]
                        .parse()
                        .map_err(|_| err(lineno, "dims r is not an integer"))?;
                    let m = rest[1]
                        .parse()
                        .map_err(|_| err(lineno, "dims m is not an integer"))?;
                    dims = Some((r, m));
                }
                "basis" => basis.push(int_row(lineno, &rest)?),
                "exceptional" => exceptional.push(int_row(lineno, &rest)?),
                "phi" => phi.push(int_row(lineno, &rest)?),
                "gw" | "gwy" => {
                    if rest.len() < 2 {
                        return Err(err(lineno, "table row needs coordinates and a count"));
                    }
                    let (value, coords) = rest.split_last().unwrap();
                    let beta = int_row(lineno, coords)?;
                    let count = parse_rat(value)
                        .ok_or_else(|| err(lineno, &format!("bad rational `{value}`")))?;
                    if key == "gw" {
                        gw.push((beta, count));
                    } else {
                        gw_y.push((beta, count));
                    }
                }
                other => {
                    return Err(err(lineno, &format!("unknown directive `{other}`")));
                }
            }
        }
        let name = name.ok_or_else(|| err(0, "missing `transition` header"))?;
        let (r, m) = dims.ok_or_else(|| err(0, "missing `dims` line"))?;
        Self::new(&name, r, m, basis, exceptional, phi, gw, gw_y)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConifoldError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("transition {}\n", self.name));
        out.push_str(&format!("dims {} {}\n", self.r, self.m));
        for row in &self.basis {
            out.push_str(&format!("basis {}\n", join(row)));
        }
        for row in &self.exceptional {
            out.push_str(&format!("exceptional {}\n", join(row)));
        }
        for row in &self.phi {
            out.push_str(&format!("phi {}\n", join(row)));
        }
        for (beta, count) in &self.gw {
            out.push_str(&format!("gw {} {}\n", join(beta), count));
        }
        for (beta, count) in &self.gw_y {
            out.push_str(&format!("gwy {} {}\n", join(beta), count));
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of exceptional classes.
    pub fn k(&self) -> usize {
        self.exceptional.len()
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn exceptional(&self) -> &[Vec<i64>] {
        &self.exceptional
    }

    pub fn phi(&self) -> &[Vec<i64>] {
        &self.phi
    }

    pub fn gw(&self) -> &BTreeMap<Vec<i64>, Rat> {
        &self.gw
    }

    pub fn gw_y(&self) -> &BTreeMap<Vec<i64>, Rat> {
        &self.gw_y
    }

    pub fn x_ring(&self) -> &Arc<RingSpec> {
        &self.x_ring
    }

    pub fn y_ring(&self) -> &Arc<RingSpec> {
        &self.y_ring
    }

    /// Image of a class under the pushforward matrix.
    pub fn pushforward(&self, beta: &[i64]) -> Vec<i64> {
        assert_eq!(beta.len(), self.r + self.m, "class arity mismatch");
        self.phi
            .iter()
            .map(|row| row.iter().zip(beta).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// The i-th exceptional class padded to full `r + m` coordinates.
    pub fn exceptional_full(&self, i: usize) -> Vec<i64> {
        let mut full = vec![0i64; self.r + self.m];
        full[self.r..].copy_from_slice(&self.exceptional[i]);
        full
    }
}

fn err(line: usize, msg: &str) -> ConifoldError {
    ConifoldError::Parse {
        line,
        msg: msg.to_string(),
    }
}

fn int_row(lineno: usize, words: &[&str]) -> Result<Vec<i64>, ConifoldError> {
    if words.is_empty() {
        return Err(err(lineno, "empty integer row"));
    }
    words
        .iter()
        .map(|w| {
            w.parse()
                .map_err(|_| err(lineno, &format!("bad integer `{w}`")))
        })
        .collect()
}

fn parse_rat(s: &str) -> Option<Rat> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n).ok()?;
            let d = BigInt::from_str(d).ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n, d))
        }
        None => Some(Rat::from_integer(BigInt::from_str(s).ok()?)),
    }
}

fn join(row: &[i64]) -> String {
    row.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Exact determinant of a square integer matrix via rational elimination.
fn det(mat: &[Vec<i64>]) -> Rat {
    let n = mat.len();
    let mut a: Vec<Vec<Rat>> = mat
        .iter()
        .map(|row| row.iter().map(|&x| Rat::from_integer(BigInt::from(x))).collect())
        .collect();
    let mut out = Rat::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&row| !a[row][col].is_zero()) else {
            return Rat::zero();
        };
        if pivot != col {
            a.swap(pivot, col);
            out = -out;
        }
        out *= a[col][col].clone();
        let inv = a[col][col].clone().recip();
        for row in col + 1..n {
            if a[row][col].is_zero() {
                continue;
            }
            let f = &a[row][col] * &inv;
            for j in col..n {
                let sub = &a[col][j] * &f;
                a[row][j] -= sub;
            }
        }
    }
    out
}

/// Rank of an integer matrix over the rationals.
fn rank(mat: &[Vec<i64>]) -> usize {
    let rows = mat.len();
    if rows == 0 {
        return 0;
    }
    let cols = mat[0].len();
    let mut a: Vec<Vec<Rat>> = mat
        .iter()
        .map(|row| row.iter().map(|&x| Rat::from_integer(BigInt::from(x))).collect())
        .collect();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&row| !a[row][col].is_zero()) else {
            continue;
        };
        a.swap(pivot, rank);
        let inv = a[rank][col].clone().recip();
        for row in rank + 1..rows {
            if a[row][col].is_zero() {
                continue;
            }
            let f = &a[row][col] * &inv;
            for j in col..cols {
                let sub = &a[rank][j] * &f;
                a[row][j] -= sub;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// An integer matrix with r rows is surjective as a map of integer lattices
/// exactly when its r x r minors have greatest common divisor 1.
fn surjective_over_z(phi: &[Vec<i64>]) -> bool {
    let r = phi.len();
    let cols = phi[0].len();
    if cols < r {
        return false;
    }
    let mut g = BigInt::zero();
    for combo in combinations(cols, r) {
        let sub: Vec<Vec<i64>> = phi
            .iter()
            .map(|row| combo.iter().map(|&j| row[j]).collect())
            .collect();
        let d = det(&sub);
        g = g.gcd(&d.to_integer().abs());
        if g.is_one() {
            return true;
        }
    }
    g.is_one()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}
