use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gca::{Gen, GenKind, GenSpec, Poly};

use super::{DGAlgebra, DGMorphism, ExtendMode};

/// `T ⊠ S<a>` with `d a = kappa`, glued along a sphere of degree `n - 1`.
#[derive(Debug, Clone)]
pub struct Pushout {
    pub algebra: Arc<DGAlgebra>,
    pub inclusion: DGMorphism,
    pub top: Gen,
    pub kappa: Poly,
    pub degree: u32,
}

/// Adjoin one generator of degree `n` whose differential is the cycle
/// `kappa`. For `n = 0` the attaching sphere is empty and `kappa` must be 0.
pub fn adjoin_pushout(t: &Arc<DGAlgebra>, n: u32, kappa: Poly, name: &str) -> Result<Pushout> {
    if n == 0 && !kappa.is_zero() {
        return Err(Error::InvalidInput(
            "a degree-0 cell has no boundary; kappa must be 0".into(),
        ));
    }
    let kind = if kappa.is_zero() {
        GenKind::CycleGen
    } else {
        GenKind::TateGen
    };
    let (alg, gens) = t.extend_differential(
        &[GenSpec::new(name, n, kind)],
        std::slice::from_ref(&kappa),
        ExtendMode::Relative,
    )?;
    let algebra = Arc::new(alg);
    let inclusion = DGMorphism::inclusion(t.clone(), algebra.clone())?;
    Ok(Pushout {
        algebra,
        inclusion,
        top: gens[0],
        kappa,
        degree: n,
    })
}

/// The map out of the pushout determined by `i_prime` on `T` and the image
/// of the new generator; requires `d(top_image) = i_prime(kappa)`.
pub fn pushout_mediator(po: &Pushout, i_prime: &DGMorphism, top_image: Poly) -> Result<DGMorphism> {
    let t = po.inclusion.source();
    if i_prime.source().gens() != t.gens() {
        return Err(Error::InvalidInput(
            "the cocone map must be defined on the algebra the cell was attached to".into(),
        ));
    }
    let target = i_prime.target().clone();
    let reg = t.registry().clone();
    let lhs = target.reduce(&target.d(&top_image)?)?;
    let rhs = i_prime.apply(&po.kappa)?;
    let residual = &lhs - &rhs;
    if !residual.is_zero() {
        return Err(Error::ChainCondition {
            generator: reg.name(po.top.id),
            residual: residual.display(&reg),
        });
    }
    let mut rule: BTreeMap<_, _> = i_prime.rule().clone();
    rule.insert(po.top.id, top_image);
    let chi = DGMorphism::new(po.algebra.clone(), target, rule)?;
    let back = chi.compose(&po.inclusion)?;
    if !back.same_rule(i_prime) {
        return Err(Error::Invariant("mediator does not restrict to the cocone map".into()));
    }
    Ok(chi)
}
