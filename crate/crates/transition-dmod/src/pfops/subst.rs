//! Monomial changes of variables on operators.

use super::{DiffOperator, PfError, ZPoly};
use crate::cohring::rat_i;

/// An invertible monomial substitution: each source variable is sent to
/// a Laurent monomial in the target variables, with unimodular exponent
/// matrix.
#[derive(Clone, Debug)]
pub struct VarMap {
    from: Vec<String>,
    to: Vec<String>,
    /// Row per source variable: exponents over the target variables.
    images: Vec<Vec<i64>>,
    /// Target log derivatives expressed in source ones, transposed:
    /// inverse[o][j] is the coefficient of (z d_{to_j}) in (z d_{from_o}).
    inverse: Vec<Vec<i64>>,
}

fn det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    let mut acc = 0i64;
    for (j, head) in m[0].iter().enumerate() {
        if *head == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, v)| *v)
                    .collect()
            })
            .collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        acc += sign * head * det(&minor);
    }
    acc
}

fn adjugate(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = m.len();
    let mut adj = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i64>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c]).collect())
                .collect();
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[j][i] = sign * det(&minor);
        }
    }
    adj
}

impl VarMap {
    /// Build the substitution sending `from[i]` to the monomial in the
    /// target variables with exponents `images[i]`. The exponent matrix
    /// must be square with determinant +-1, so the map is invertible on
    /// monomials and on log derivatives.
    pub fn new(
        from: Vec<String>,
        to: Vec<String>,
        images: Vec<Vec<i64>>,
    ) -> Result<Self, PfError> {
        let n = from.len();
        if to.len() != n || images.len() != n || images.iter().any(|row| row.len() != n) {
            return Err(PfError::MapError(
                "exponent matrix is not square over the variable lists".to_string(),
            ));
        }
        // Target deltas in source ones: (z d_{to_j}) = sum_o images[o][j] (z d_{from_o}).
        // Invert the transpose to express source deltas in target ones.
        let t: Vec<Vec<i64>> = (0..n)
            .map(|j| (0..n).map(|o| images[o][j]).collect())
            .collect();
        let d = det(&t);
        if d != 1 && d != -1 {
            return Err(PfError::MapError(format!(
                "exponent matrix has determinant {d}, not a unit"
            )));
        }
        let mut inverse = adjugate(&t);
        if d == -1 {
            for row in &mut inverse {
                for v in row.iter_mut() {
                    *v = -*v;
                }
            }
        }
        Ok(VarMap {
            from,
            to,
            images,
            inverse,
        })
    }

    pub fn from_vars(&self) -> &[String] {
        &self.from
    }

    pub fn to_vars(&self) -> &[String] {
        &self.to
    }
}

/// Rewrite an operator through a monomial change of variables. Variable
/// monomials map to monomials, and each source log derivative becomes
/// the integer combination of target log derivatives dictated by the
/// inverse exponent matrix, so the result is again in normal form
/// term by term.
pub fn substitute_variables(op: &DiffOperator, map: &VarMap) -> Result<DiffOperator, PfError> {
    if op.vars() != map.from {
        return Err(PfError::MapError(format!(
            "operator variables {:?} do not match the map source {:?}",
            op.vars(),
            map.from
        )));
    }
    let n = map.from.len();
    let delta_combo: Vec<DiffOperator> = (0..n)
        .map(|o| {
            let mut acc = DiffOperator::zero(&map.to);
            for (j, name) in map.to.iter().enumerate() {
                let b = map.inverse[o][j];
                if b != 0 {
                    let d = DiffOperator::delta(&map.to, name);
                    acc = &acc + &(&d * &DiffOperator::scalar(&map.to, rat_i(b)));
                }
            }
            acc
        })
        .collect();

    let mut out = DiffOperator::zero(&map.to);
    for ((shift, dpow), poly) in op.terms() {
        let new_shift: Vec<i64> = (0..n)
            .map(|j| (0..n).map(|o| shift[o] * map.images[o][j]).sum())
            .collect();
        let mut head = DiffOperator::zero(&map.to);
        head.insert_term((new_shift, vec![0; n]), poly.clone() as ZPoly);
        let mut term = head;
        for (o, &p) in dpow.iter().enumerate() {
            for _ in 0..p {
                term = &term * &delta_combo[o];
            }
        }
        out = &out + &term;
    }
    Ok(out)
}
