use std::collections::BTreeMap;

use super::DGAlgebra;

/// Structural flags of a Sullivan-type differential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureReport {
    pub d_squared_zero: bool,
    /// Each differential uses only base generators and generators earlier
    /// in the table.
    pub lowering: bool,
    /// Degrees of the non-base generators never decrease along the table.
    pub minimal: bool,
    /// Differentials of non-base generators avoid base generators.
    pub split: bool,
}

impl StructureReport {
    pub fn all(&self) -> bool {
        self.d_squared_zero && self.lowering && self.minimal && self.split
    }
}

pub fn check_structure(a: &DGAlgebra) -> StructureReport {
    let mut d_squared_zero = true;
    for g in a.gens() {
        let dg = a.diff_of(g.id);
        match a.d(&dg) {
            Ok(ddg) if ddg.is_zero() => {}
            _ => d_squared_zero = false,
        }
    }

    let position: BTreeMap<_, _> = a.gens().iter().enumerate().map(|(i, g)| (g.id, i)).collect();
    let mut lowering = true;
    let mut split = true;
    let mut minimal = true;
    let mut last_deg = None;
    for (i, g) in a.gens().iter().enumerate() {
        if a.is_base(g.id) {
            continue;
        }
        if let Some(prev) = last_deg {
            if g.hdeg < prev {
                minimal = false;
            }
        }
        last_deg = Some(g.hdeg);
        for used in a.diff_of(g.id).gen_ids() {
            if a.is_base(used) {
                split = false;
            } else if position.get(&used).is_none_or(|&p| p >= i) {
                lowering = false;
            }
        }
    }
    StructureReport {
        d_squared_zero,
        lowering,
        minimal,
        split,
    }
}
