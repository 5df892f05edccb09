use std::collections::BTreeSet;
use std::sync::Arc;

use crate::dga::{DGAlgebra, ExtendMode};
use crate::error::{Error, Result};
use crate::gca::{Gen, GenKind, GenSpec, Poly, Registry};

/// `Q[x1..xr] <phi1..phir>` with `d phi_a = x_a`. With no coordinates the
/// result is the ground field.
pub fn koszul_resolution(reg: &Arc<Registry>, coords: &[Gen]) -> Result<DGAlgebra> {
    let mut seen = BTreeSet::new();
    for g in coords {
        if g.hdeg != 0 {
            return Err(Error::DegreeMismatch {
                context: format!("Koszul coordinate `{}`", reg.name(g.id)),
                expected: 0,
                found: g.hdeg as i64,
            });
        }
        if !seen.insert(g.id) {
            return Err(Error::InvalidInput(format!("coordinate `{}` repeated", reg.name(g.id))));
        }
    }
    let ring = Arc::new(DGAlgebra::free(reg.clone(), coords)?);
    let specs: Vec<GenSpec> = coords
        .iter()
        .map(|g| GenSpec::new(format!("phi_{}", reg.name(g.id)), 1, GenKind::Antifield))
        .collect();
    let images: Vec<Poly> = coords.iter().map(|g| Poly::gen(*g)).collect();
    Ok(ring.extend_differential(&specs, &images, ExtendMode::Relative)?.0)
}
