use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;

use crate::error::{Error, Result};
use crate::gca::{Gen, GenId, Poly, Rational};

use super::DGAlgebra;

/// A morphism of differential graded algebras, given on generators and
/// extended multiplicatively.
#[derive(Debug, Clone)]
pub struct DGMorphism {
    source: Arc<DGAlgebra>,
    target: Arc<DGAlgebra>,
    rule: BTreeMap<GenId, Poly>,
}

impl DGMorphism {
    /// Build and verify: every source generator needs a degree-preserving
    /// image in the target, and `d(f(g)) = f(d g)` must hold on generators.
    pub fn new(source: Arc<DGAlgebra>, target: Arc<DGAlgebra>, rule: BTreeMap<GenId, Poly>) -> Result<Self> {
        let reg = source.registry().clone();
        let mut clean = BTreeMap::new();
        for g in source.gens() {
            let image = rule.get(&g.id).cloned().unwrap_or_default();
            if !image.is_zero() && image.hdeg() != Some(g.hdeg) {
                return Err(match image.hdeg() {
                    Some(d) => Error::DegreeMismatch {
                        context: format!("morphism image of `{}`", reg.name(g.id)),
                        expected: g.hdeg as i64,
                        found: d as i64,
                    },
                    None => Error::NotHomogeneous(image.display(&reg)),
                });
            }
            let image = target.reduce(&image)?;
            clean.insert(g.id, image);
        }
        if let Some(extra) = rule.keys().find(|id| !source.contains_gen(**id)) {
            return Err(Error::ForeignGenerator(reg.name(*extra)));
        }
        let f = DGMorphism {
            source,
            target,
            rule: clean,
        };
        for g in f.source.gens() {
            f.check_chain_on(g.id)?;
        }
        Ok(f)
    }

    fn check_chain_on(&self, id: GenId) -> Result<()> {
        let reg = self.source.registry();
        let lhs = self.target.reduce(&self.target.d(&self.rule[&id])?)?;
        let rhs = self.apply(&self.source.diff_of(id))?;
        let residual = &lhs - &rhs;
        if residual.is_zero() {
            Ok(())
        } else {
            Err(Error::ChainCondition {
                generator: reg.name(id),
                residual: residual.display(reg),
            })
        }
    }

    pub fn identity(a: Arc<DGAlgebra>) -> Self {
        let rule = a.gens().iter().map(|g| (g.id, Poly::gen(*g))).collect();
        DGMorphism {
            source: a.clone(),
            target: a,
            rule,
        }
    }

    /// The inclusion of `a` into `b`, identity on generators.
    pub fn inclusion(a: Arc<DGAlgebra>, b: Arc<DGAlgebra>) -> Result<Self> {
        let rule = a.gens().iter().map(|g| (g.id, Poly::gen(*g))).collect();
        DGMorphism::new(a, b, rule)
    }

    pub fn source(&self) -> &Arc<DGAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<DGAlgebra> {
        &self.target
    }

    pub fn rule(&self) -> &BTreeMap<GenId, Poly> {
        &self.rule
    }

    pub fn image_of(&self, id: GenId) -> Option<&Poly> {
        self.rule.get(&id)
    }

    /// Evaluate on a polynomial of the source.
    pub fn apply(&self, p: &Poly) -> Result<Poly> {
        let reg = self.source.registry();
        let out = evaluate(p, |g| {
            self.rule
                .get(&g.id)
                .cloned()
                .ok_or_else(|| Error::ForeignGenerator(reg.name(g.id)))
        })?;
        self.target.reduce(&out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &DGMorphism) -> Result<DGMorphism> {
        let mut rule = BTreeMap::new();
        for g in other.source.gens() {
            rule.insert(g.id, self.apply(&other.rule[&g.id])?);
        }
        Ok(DGMorphism {
            source: other.source.clone(),
            target: self.target.clone(),
            rule,
        })
    }

    /// Structural equality of the generator rules.
    pub fn same_rule(&self, other: &DGMorphism) -> bool {
        self.rule == other.rule
    }
}

/// Multiplicative extension of `image_of`: each monomial `g1^e1 ... gk^ek`
/// goes to the product of the images in the same order, which carries the
/// correct Koszul sign because images keep the degrees of their generators.
pub fn evaluate<F>(p: &Poly, mut image_of: F) -> Result<Poly>
where
    F: FnMut(Gen) -> Result<Poly>,
{
    let mut out = Poly::zero();
    let mut powers: BTreeMap<(GenId, u32), Poly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let mut acc = Poly::constant(Rational::one());
        for &(g, e) in m.factors() {
            let pw = match powers.get(&(g.id, e)) {
                Some(pw) => pw.clone(),
                None => {
                    let pw = image_of(g)?.pow(e);
                    powers.insert((g.id, e), pw.clone());
                    pw
                }
            };
            acc = acc.mul(&pw);
            if acc.is_zero() {
                break;
            }
        }
        out.add_scaled(&acc, c);
    }
    Ok(out)
}

/// Extend `p: T -> B` to `ext = T ⊠ S<V> -> B` by prescribing images of the
/// new generators.
pub fn extend_morphism(ext: Arc<DGAlgebra>, p: &DGMorphism, gen_images: BTreeMap<GenId, Poly>) -> Result<DGMorphism> {
    let reg = ext.registry().clone();
    for g in p.source().gens() {
        if !ext.contains_gen(g.id) {
            return Err(Error::ForeignGenerator(reg.name(g.id)));
        }
    }
    let mut rule = p.rule().clone();
    for (id, image) in gen_images {
        if p.source().contains_gen(id) {
            return Err(Error::InvalidInput(format!(
                "`{}` already belongs to the source of the morphism being extended",
                reg.name(id)
            )));
        }
        rule.insert(id, image);
    }
    DGMorphism::new(ext, p.target().clone(), rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::ExtendMode;
    use crate::gca::{GenKind, GenSpec, Registry};

    #[test]
    fn extension_by_zero() {
        let reg = Registry::new();
        let x = reg.register(GenSpec::new("x", 0, GenKind::BaseCoord)).unwrap();
        let t = Arc::new(DGAlgebra::free(reg.clone(), &[x]).unwrap());
        let (ext, g) = t
            .extend_differential(
                &[GenSpec::new("a", 1, GenKind::CycleGen)],
                &[Poly::zero()],
                ExtendMode::Relative,
            )
            .unwrap();
        let ext = Arc::new(ext);
        let id = DGMorphism::identity(t.clone());
        let f = extend_morphism(ext, &id, [(g[0].id, Poly::zero())].into()).unwrap();
        assert!(f.apply(&Poly::gen(g[0])).unwrap().is_zero());
        assert_eq!(f.apply(&Poly::gen(x)).unwrap(), Poly::gen(x));
    }

    #[test]
    fn chain_violation_reports_residual() {
        let reg = Registry::new();
        let x = reg.register(GenSpec::new("x", 0, GenKind::BaseCoord)).unwrap();
        let t = Arc::new(DGAlgebra::free(reg.clone(), &[x]).unwrap());
        let (ext, g) = t
            .extend_differential(
                &[GenSpec::new("e", 1, GenKind::TateGen)],
                &[Poly::gen(x)],
                ExtendMode::Relative,
            )
            .unwrap();
        let id = DGMorphism::identity(t.clone());
        let err = extend_morphism(Arc::new(ext), &id, [(g[0].id, Poly::zero())].into()).unwrap_err();
        match err {
            Error::ChainCondition { residual, .. } => assert_eq!(residual, "-x"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
