use std::collections::BTreeMap;
use std::sync::Arc;

use crate::dga::{DGAlgebra, DGMorphism, Relations};
use crate::error::{Error, Result};
use crate::factorize::{resolve_engine, Factorization, Resolution};
use crate::gca::Poly;
use crate::homology::{window_monomials, Window};
use crate::jet::prolong;

use super::{KTComplex, PDESystem};

/// The jet algebra `A`, the windowed quotient `B = A / (F)` and the
/// projection `A -> B`.
#[derive(Debug, Clone)]
pub struct OnShell {
    pub jet: Arc<DGAlgebra>,
    pub quotient: Arc<DGAlgebra>,
    pub projection: DGMorphism,
}

/// Build the windowed on-shell algebra: the ideal is spanned by every
/// `m * D^alpha F_i` whose terms all lie in the window.
pub fn onshell_algebra(sys: &PDESystem, w: &Window) -> Result<OnShell> {
    if sys.is_empty() {
        return Err(Error::InvalidInput(
            "the on-shell algebra needs at least one equation".into(),
        ));
    }
    let ctx = sys.ctx();
    let reg = ctx.registry().clone();
    let jet = Arc::new(ctx.jet_algebra()?);
    let monomials = window_monomials(&reg, jet.gens(), 0, w);
    let mut span = Vec::new();
    for f in sys.equations() {
        let ord = f.jet_order(&reg);
        if ord > w.jet_cap {
            continue;
        }
        let reach = w.jet_cap.min(ctx.jet_cap()) - ord;
        for (_, p) in prolong(ctx, f, reach)? {
            for m in &monomials {
                let q = p.mul_monomial_left(m);
                if !q.is_zero() && q.terms().all(|(mm, _)| w.admits(&reg, mm)) {
                    span.push(q);
                }
            }
        }
    }
    let relations = Relations::from_span(&reg, monomials, &span)?;
    let quotient = Arc::new(DGAlgebra::free(reg.clone(), jet.gens())?.with_relations(Arc::new(relations))?);
    let rule: BTreeMap<_, _> = jet.gens().iter().map(|g| (g.id, Poly::gen(*g))).collect();
    let projection = DGMorphism::new(jet.clone(), quotient.clone(), rule)?;
    Ok(OnShell {
        jet,
        quotient,
        projection,
    })
}

/// Resolve the on-shell algebra relative to the jet algebra. A Koszul-Tate
/// complex passed as `seed` enters as stage-0 material.
pub fn resolve_onshell(sys: &PDESystem, w: &Window, max_stages: u32, seed: Option<&KTComplex>) -> Result<Resolution> {
    let shell = onshell_algebra(sys, w)?;
    let engine = Factorization::new(shell.projection.clone());
    if let Some(kt) = seed {
        if kt.base.gens() != shell.jet.gens() {
            return Err(Error::InvalidInput(
                "seed complex lives over a different jet algebra".into(),
            ));
        }
        // antifields sit in positive degree, where the quotient is zero
        engine.add_seed(&kt.algebra, &BTreeMap::new())?;
    }
    resolve_engine(engine, w, max_stages)
}

/// Standard monomials of the quotient counted directly: window monomials
/// free of every variable `u_alpha` reached by a prolongation, valid for
/// equations that are single jet variables.
pub fn leading_term_count(sys: &PDESystem, w: &Window) -> Result<Option<usize>> {
    let ctx = sys.ctx();
    let reg = ctx.registry().clone();
    let jet = ctx.jet_algebra()?;
    let mut killed = Vec::new();
    for f in sys.equations() {
        let mut terms = f.terms();
        let Some((m, _)) = terms.next() else {
            return Ok(None);
        };
        if terms.next().is_some() || m.degree() != 1 {
            return Ok(None);
        }
        let g = m.gens().next().expect("degree one");
        let ord = ctx.jet_order(f);
        for (_, p) in prolong(ctx, &Poly::gen(g), w.jet_cap.saturating_sub(ord))? {
            killed.extend(p.gen_ids());
        }
    }
    Ok(Some(
        window_monomials(&reg, jet.gens(), 0, w)
            .iter()
            .filter(|m| m.gens().all(|g| !killed.contains(&g.id)))
            .count(),
    ))
}
