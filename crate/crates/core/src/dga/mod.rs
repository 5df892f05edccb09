//! Differential graded algebras on a shared generator registry.

mod morphism;
mod pushout;
mod relations;
mod structure;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gca::{apply_derivation_with, check_rule_degree, Gen, GenId, GenSpec, Poly, Registry};

pub use morphism::{evaluate, extend_morphism, DGMorphism};
pub use pushout::{adjoin_pushout, pushout_mediator, Pushout};
pub use relations::Relations;
pub use structure::{check_structure, StructureReport};

/// Where the images handed to [`DGAlgebra::extend_differential`] may live.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtendMode {
    /// Images lie in the algebra being extended, which becomes the base of
    /// the result.
    Relative,
    /// Images may also use new generators listed earlier; the base is kept.
    Staged,
}

/// A free graded-commutative algebra on an ordered generator table with a
/// differential given on generators.
///
/// The table includes the generators of the base algebra, if any. An
/// optional [`Relations`] object turns a degree-0 algebra with zero
/// differential into a windowed quotient.
#[derive(Debug, Clone)]
pub struct DGAlgebra {
    registry: Arc<Registry>,
    order: Vec<Gen>,
    members: BTreeSet<GenId>,
    diff: BTreeMap<GenId, Poly>,
    base: Option<Arc<DGAlgebra>>,
    relations: Option<Arc<Relations>>,
}

impl PartialEq for DGAlgebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.registry, &other.registry)
            && self.order == other.order
            && self.diff == other.diff
            && self.base_ids() == other.base_ids()
            && self.relations == other.relations
    }
}

impl Eq for DGAlgebra {}

impl DGAlgebra {
    /// The ground field: no generators.
    pub fn ground(registry: Arc<Registry>) -> Self {
        DGAlgebra {
            registry,
            order: Vec::new(),
            members: BTreeSet::new(),
            diff: BTreeMap::new(),
            base: None,
            relations: None,
        }
    }

    /// Free algebra on `gens` with zero differential.
    pub fn free(registry: Arc<Registry>, gens: &[Gen]) -> Result<Self> {
        DGAlgebra::from_parts(registry, gens.to_vec(), BTreeMap::new(), None)
    }

    /// Assemble an algebra from an explicit generator order and differential.
    ///
    /// Checks degrees, membership of every generator used, `d^2 = 0` on
    /// generators and agreement with the base. Lowering and minimality are
    /// not required; see [`check_structure`].
    pub fn from_parts(
        registry: Arc<Registry>,
        order: Vec<Gen>,
        diff: BTreeMap<GenId, Poly>,
        base: Option<Arc<DGAlgebra>>,
    ) -> Result<Self> {
        let mut members = BTreeSet::new();
        for g in &order {
            let info = registry.info(g.id)?;
            if info.hdeg != g.hdeg {
                return Err(Error::Invariant(format!("stale degree for generator `{}`", info.name)));
            }
            if !members.insert(g.id) {
                return Err(Error::InvalidInput(format!("generator `{}` listed twice", info.name)));
            }
        }
        let mut clean = BTreeMap::new();
        for (id, image) in diff {
            if !members.contains(&id) {
                return Err(Error::ForeignGenerator(registry.name(id)));
            }
            let g = registry.gen(id)?;
            check_rule_degree(&registry, g, &image, -1)?;
            for used in image.gen_ids() {
                if !members.contains(&used) {
                    return Err(Error::ForeignGenerator(registry.name(used)));
                }
            }
            if !image.is_zero() {
                clean.insert(id, image);
            }
        }
        if let Some(b) = &base {
            for g in b.gens() {
                if !members.contains(&g.id) {
                    return Err(Error::ForeignGenerator(registry.name(g.id)));
                }
                if b.diff_of(g.id) != clean.get(&g.id).cloned().unwrap_or_default() {
                    return Err(Error::Invariant(format!(
                        "differential of base generator `{}` changed",
                        registry.name(g.id)
                    )));
                }
            }
        }
        let alg = DGAlgebra {
            registry,
            order,
            members,
            diff: clean,
            base,
            relations: None,
        };
        for g in &alg.order {
            let dg = alg.diff_of(g.id);
            let ddg = alg.d(&dg)?;
            if !ddg.is_zero() {
                return Err(Error::NotACycle {
                    generator: alg.registry.name(g.id),
                    residual: ddg.display(&alg.registry),
                });
            }
        }
        Ok(alg)
    }

    /// Attach windowed relations. Only allowed on an algebra concentrated in
    /// degree 0 with zero differential.
    pub fn with_relations(mut self, relations: Arc<Relations>) -> Result<Self> {
        if self.order.iter().any(|g| g.hdeg != 0) || !self.diff.is_empty() {
            return Err(Error::InvalidInput(
                "relations need a degree-0 algebra with zero differential".into(),
            ));
        }
        for id in relations.gen_ids() {
            if !self.members.contains(&id) {
                return Err(Error::ForeignGenerator(self.registry.name(id)));
            }
        }
        self.relations = Some(relations);
        Ok(self)
    }

    /// Adjoin generators with prescribed differentials.
    ///
    /// Every image must have degree one less than its generator and be a
    /// cycle. Returns the new algebra and the handles of the new generators.
    pub fn extend_differential(
        self: &Arc<Self>,
        specs: &[GenSpec],
        images: &[Poly],
        mode: ExtendMode,
    ) -> Result<(DGAlgebra, Vec<Gen>)> {
        if specs.len() != images.len() {
            return Err(Error::InvalidInput(format!(
                "{} generators but {} images",
                specs.len(),
                images.len()
            )));
        }
        if self.relations.is_some() {
            return Err(Error::InvalidInput(
                "cannot adjoin generators to a quotient presentation".into(),
            ));
        }
        let reg = self.registry.clone();
        let mut current = (**self).clone();
        current.base = match mode {
            ExtendMode::Relative => Some(self.clone()),
            ExtendMode::Staged => self.base.clone(),
        };
        let frozen_members = self.members.clone();
        let mut new_gens = Vec::with_capacity(specs.len());
        for (spec, image) in specs.iter().zip(images) {
            for used in image.gen_ids() {
                let allowed = match mode {
                    ExtendMode::Relative => frozen_members.contains(&used),
                    ExtendMode::Staged => current.members.contains(&used),
                };
                if !allowed {
                    return Err(Error::ForeignGenerator(reg.name(used)));
                }
            }
            let expected = spec.hdeg as i64 - 1;
            if !image.is_zero() {
                match image.hdeg() {
                    Some(d) if d as i64 == expected => {}
                    Some(d) => {
                        return Err(Error::DegreeMismatch {
                            context: format!("image of `{}`", spec.name),
                            expected,
                            found: d as i64,
                        })
                    }
                    None => return Err(Error::NotHomogeneous(image.display(&reg))),
                }
            }
            let residual = current.d(image)?;
            if !residual.is_zero() {
                return Err(Error::NotACycle {
                    generator: spec.name.clone(),
                    residual: residual.display(&reg),
                });
            }
            // weights and jet orders grow with the differential so that
            // truncation windows stay closed
            let spec = spec
                .clone()
                .weight(spec.weight.max(image.weighted_degree(&reg)))
                .jet_order(spec.jet_order.max(image.jet_order(&reg)));
            let g = reg.register(spec)?;
            current.order.push(g);
            current.members.insert(g.id);
            if !image.is_zero() {
                current.diff.insert(g.id, image.clone());
            }
            new_gens.push(g);
        }
        Ok((current, new_gens))
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.registry
    }

    /// Generators in table order, base generators included.
    pub fn gens(&self) -> &[Gen] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn contains_gen(&self, id: GenId) -> bool {
        self.members.contains(&id)
    }

    pub fn contains_poly(&self, p: &Poly) -> bool {
        p.gen_ids().iter().all(|id| self.members.contains(id))
    }

    pub fn base(&self) -> Option<&Arc<DGAlgebra>> {
        self.base.as_ref()
    }

    pub fn base_ids(&self) -> BTreeSet<GenId> {
        self.base.as_ref().map(|b| b.members.clone()).unwrap_or_default()
    }

    pub fn is_base(&self, id: GenId) -> bool {
        self.base.as_ref().is_some_and(|b| b.members.contains(&id))
    }

    /// Generators outside the base, in table order.
    pub fn fiber_gens(&self) -> Vec<Gen> {
        self.order.iter().copied().filter(|g| !self.is_base(g.id)).collect()
    }

    pub fn relations(&self) -> Option<&Arc<Relations>> {
        self.relations.as_ref()
    }

    pub fn diff_of(&self, id: GenId) -> Poly {
        self.diff.get(&id).cloned().unwrap_or_default()
    }

    pub fn diff_rules(&self) -> &BTreeMap<GenId, Poly> {
        &self.diff
    }

    /// The differential, extended by the graded Leibniz rule.
    pub fn d(&self, p: &Poly) -> Result<Poly> {
        apply_derivation_with(p, -1, |g| {
            if let Some(r) = self.diff.get(&g.id) {
                Ok(r.clone())
            } else if self.members.contains(&g.id) {
                Ok(Poly::zero())
            } else {
                Err(Error::ForeignGenerator(self.registry.name(g.id)))
            }
        })
    }

    /// Canonical form in this algebra: normal form modulo the relations when
    /// present, the polynomial itself otherwise.
    pub fn reduce(&self, p: &Poly) -> Result<Poly> {
        if let Some(id) = p.gen_ids().into_iter().find(|id| !self.members.contains(id)) {
            return Err(Error::ForeignGenerator(self.registry.name(id)));
        }
        match &self.relations {
            Some(r) => r.normal_form(p),
            None => Ok(p.clone()),
        }
    }

    pub fn display_gen(&self, id: GenId) -> String {
        self.registry.name(id)
    }
}
