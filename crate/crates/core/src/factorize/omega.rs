use std::collections::BTreeMap;

use crate::dga::{evaluate, DGMorphism};
use crate::error::{Error, Result};
use crate::gca::{Gen, GenId, Poly};

use super::{Factorization, FactorizationStage, LazyKey};

/// `omega_k: R_k -> R'_k` induced by a commuting square
/// `v . phi = phi' . u`.
#[derive(Debug, Clone)]
pub struct OmegaMap {
    pub morphism: DGMorphism,
    pub source: FactorizationStage,
    pub target: FactorizationStage,
    /// Lazy generator of `R_k` to its partner in `R'_k`.
    pub partners: BTreeMap<GenId, Gen>,
}

impl OmegaMap {
    pub fn apply(&self, p: &Poly) -> Result<Poly> {
        self.morphism.apply(p)
    }
}

fn check_square(u: &DGMorphism, v: &DGMorphism, phi: &DGMorphism, phi2: &DGMorphism) -> Result<()> {
    let reg = phi.source().registry();
    for g in phi.source().gens() {
        let lhs = v.apply(phi.image_of(g.id).expect("morphism covers its source"))?;
        let rhs = phi2.apply(u.image_of(g.id).expect("morphism covers its source"))?;
        let residual = &lhs - &rhs;
        if !residual.is_zero() {
            return Err(Error::SquareNotCommuting {
                generator: reg.name(g.id),
                residual: residual.display(reg),
            });
        }
    }
    Ok(())
}

/// Build `omega_k` generator by generator in creation order, materializing
/// the partner generators of `f2` as needed, then verify
/// `omega_k . j_k = j'_k . u` and `v . q_k = q'_k . omega_k`.
pub fn omega(u: &DGMorphism, v: &DGMorphism, f: &Factorization, f2: &Factorization, k: u32) -> Result<OmegaMap> {
    let phi = f.phi();
    let phi2 = f2.phi();
    if u.source().gens() != phi.source().gens() || u.target().gens() != phi2.source().gens() {
        return Err(Error::InvalidInput(
            "u must map the source of phi to the source of phi'".into(),
        ));
    }
    if v.source().gens() != phi.target().gens() || v.target().gens() != phi2.target().gens() {
        return Err(Error::InvalidInput(
            "v must map the target of phi to the target of phi'".into(),
        ));
    }
    check_square(u, v, phi, phi2)?;

    let reg = f.registry();
    let mut rule: BTreeMap<GenId, Poly> = u.rule().clone();
    let mut partners = BTreeMap::new();
    for r in f.records().into_iter().filter(|r| r.stage <= k) {
        let image = match &r.key {
            LazyKey::DiscTop { deg, b } => f2.disc_top(*deg, &v.apply(b)?)?,
            LazyKey::DiscBottom { deg, b } => f2.disc_bottom(*deg, &v.apply(b)?)?,
            LazyKey::Cycle { deg, beta } => f2.cycle(*deg, &v.apply(beta)?)?,
            LazyKey::Tate { stage, deg, sigma, b } => {
                let ws = evaluate(sigma, |g| {
                    rule.get(&g.id)
                        .cloned()
                        .ok_or_else(|| Error::ForeignGenerator(reg.name(g.id)))
                })?;
                f2.tate(*stage, *deg, &ws, &v.apply(b)?)?
            }
            LazyKey::Seed { .. } => {
                return Err(Error::InvalidInput(format!(
                    "seeded generator `{}` has no functorial partner",
                    reg.name(r.gen.id)
                )))
            }
        };
        rule.insert(r.gen.id, Poly::gen(image));
        partners.insert(r.gen.id, image);
    }

    let source = f.stage(k)?;
    let target = f2.stage(k)?;
    let morphism = DGMorphism::new(source.algebra.clone(), target.algebra.clone(), rule)?;

    // omega . j = j' . u
    let left = morphism.compose(&source.j)?;
    let right = target.j.compose(u)?;
    for g in u.source().gens() {
        let residual =
            left.image_of(g.id).cloned().unwrap_or_default() - right.image_of(g.id).cloned().unwrap_or_default();
        if !residual.is_zero() {
            return Err(Error::SquareNotCommuting {
                generator: reg.name(g.id),
                residual: residual.display(reg),
            });
        }
    }
    // v . q = q' . omega
    let left = v.compose(&source.q)?;
    let right = target.q.compose(&morphism)?;
    for g in source.algebra.gens() {
        let residual =
            left.image_of(g.id).cloned().unwrap_or_default() - right.image_of(g.id).cloned().unwrap_or_default();
        if !residual.is_zero() {
            return Err(Error::SquareNotCommuting {
                generator: reg.name(g.id),
                residual: residual.display(reg),
            });
        }
    }
    Ok(OmegaMap {
        morphism,
        source,
        target,
        partners,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::{DGAlgebra, ExtendMode};
    use crate::gca::{GenKind, GenSpec, Registry};
    use std::sync::Arc;

    #[test]
    fn identity_square_fixes_generators() {
        let reg = Registry::new();
        let y = reg.register(GenSpec::new("y", 0, GenKind::BaseCoord)).unwrap();
        let ring = Arc::new(DGAlgebra::free(reg.clone(), &[y]).unwrap());
        let (b, g) = ring
            .extend_differential(
                &[GenSpec::new("e", 1, GenKind::TateGen)],
                &[Poly::gen(y)],
                ExtendMode::Relative,
            )
            .unwrap();
        let b = Arc::new(b);
        let a = Arc::new(DGAlgebra::ground(reg.clone()));
        let phi = DGMorphism::new(a.clone(), b.clone(), BTreeMap::new()).unwrap();
        let f = Factorization::new(phi);
        f.disc_top(1, &Poly::gen(g[0])).unwrap();
        f.cycle(0, &Poly::gen(y)).unwrap();
        let s0 = f.stage(0).unwrap();
        let c = s0.algebra.gens().iter().copied().find(|h| h.hdeg == 0).unwrap();
        // q(c^2) = y^2 = d(y e)
        let sigma = Poly::gen(c).pow(2);
        f.tate(1, 0, &sigma, &Poly::gen(y).mul(&Poly::gen(g[0]))).unwrap();
        let u = DGMorphism::identity(a);
        let v = DGMorphism::identity(b);
        let om = omega(&u, &v, &f, &f, 1).unwrap();
        for (id, partner) in &om.partners {
            assert_eq!(*id, partner.id);
        }
        assert_eq!(om.partners.len(), 4);
    }

    #[test]
    fn non_commuting_square_is_rejected() {
        let reg = Registry::new();
        let x = reg.register(GenSpec::new("x", 0, GenKind::BaseCoord)).unwrap();
        let a = Arc::new(DGAlgebra::free(reg.clone(), &[x]).unwrap());
        let phi = DGMorphism::identity(a.clone());
        let f = Factorization::new(phi.clone());
        let u = DGMorphism::identity(a.clone());
        let v = DGMorphism::new(a.clone(), a, [(x.id, Poly::gen(x).pow(2))].into()).unwrap();
        match omega(&u, &v, &f, &f, 0).unwrap_err() {
            Error::SquareNotCommuting { residual, .. } => assert_eq!(residual, "-x + x^2"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
