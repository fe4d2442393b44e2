//! Monodromy rank accounting for the continued solution space: six
//! independent components split into a four-dimensional subspace with
//! trivial monodromy around x = 0 and a two-dimensional complement, and
//! the three-dimensional trivial-y subspace modulo the part trivial
//! around both divisors leaves the same two dimensions. That quotient has
//! the rank of the narrow sector.

use super::FjrwError;
use crate::logseries::{build_series, expand_components, model, Component, Family, ModelName};
use crate::pfops::{classify_monodromy, independence_rank, monodromy_filtration, MonodromyKind};

/// Dimensions read off the monodromy filtration: total rank, the
/// subspaces with trivial monodromy around x = 0 and around y = 0, and
/// the trivial-y subspace modulo its intersection with the trivial-x one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankAccounting {
    pub total: usize,
    pub trivial_x: usize,
    pub trivial_y: usize,
    pub quotient: usize,
}

fn family_models(family: Family) -> [ModelName; 3] {
    match family {
        Family::Local => [
            ModelName::LocalYbar,
            ModelName::LocalI5,
            ModelName::LocalI6,
        ],
        Family::Global => [
            ModelName::GlobalYbar,
            ModelName::GlobalI5,
            ModelName::GlobalI6,
        ],
    }
}

/// Basis components of the continued solution space of a family: the
/// continued series plus the two fractional-exponent solutions, expanded
/// over the ring basis at the given truncation order.
pub fn solution_components(family: Family, order: u32) -> Result<Vec<Component>, FjrwError> {
    let mut basis = Vec::new();
    for name in family_models(family) {
        basis.extend(expand_components(&build_series(&model(name), order)?));
    }
    Ok(basis)
}

fn is_trivial(c: &Component, v: &str) -> bool {
    classify_monodromy(c, v)
        .map(|cl| cl.kind == MonodromyKind::Trivial)
        .unwrap_or(false)
}

/// Run the rank bookkeeping for one family at one truncation order and
/// check it against the expected profile: total rank 6, trivial-x
/// dimension 4, trivial-y dimension 3, quotient dimension 2. The quotient
/// is computed from the trivial-y subspace modulo the part trivial around
/// both divisors and cross-checked against the complement of the
/// trivial-x subspace; any disagreement or any other profile is an
/// accounting error.
pub fn rank_accounting(family: Family, order: u32) -> Result<RankAccounting, FjrwError> {
    let basis = solution_components(family, order)?;
    let total = independence_rank(&basis);
    if total != 6 {
        return Err(FjrwError::Accounting(format!(
            "{family} solution space has rank {total}, expected 6"
        )));
    }
    let (trivial_x, rest_x) = monodromy_filtration(&basis, "x", 6)?;
    let (trivial_y, _) = monodromy_filtration(&basis, "y", 6)?;

    let both: Vec<Component> = basis
        .iter()
        .filter(|c| is_trivial(c, "x") && is_trivial(c, "y"))
        .cloned()
        .collect();
    let quotient = trivial_y - independence_rank(&both);
    if quotient != rest_x {
        return Err(FjrwError::Accounting(format!(
            "{family} quotient {quotient} disagrees with the trivial-x complement {rest_x}"
        )));
    }

    let got = RankAccounting {
        total,
        trivial_x,
        trivial_y,
        quotient,
    };
    let want = RankAccounting {
        total: 6,
        trivial_x: 4,
        trivial_y: 3,
        quotient: 2,
    };
    if got != want {
        return Err(FjrwError::Accounting(format!(
            "{family} filtration came out as {got:?}, expected {want:?}"
        )));
    }
    Ok(got)
}
