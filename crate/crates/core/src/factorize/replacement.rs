use std::collections::BTreeMap;
use std::sync::Arc;

use crate::dga::{check_structure, DGAlgebra, DGMorphism};
use crate::error::{Error, Result};
use crate::homology::{critical_classes, homology, is_quasi_iso_in_window, uncovered_classes, Window};
use crate::trace::{Adjoined, ResolutionTrace, StageTrace, Status};

use super::{check_stage_restriction, Factorization, FactorizationStage, LazyKey, LazyRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageMode {
    /// Generators appear only when requested through [`Factorization::tate`].
    FunctorialLazy,
    /// Adjoin one generator per critical class found in the window.
    NonfunctorialWindow(Window),
}

/// Outcome of a windowed run: the trace plus the engine and final stage for
/// further inspection.
#[derive(Debug, Clone)]
pub struct Resolution {
    pub trace: ResolutionTrace,
    pub engine: Arc<Factorization>,
    pub stage: FactorizationStage,
}

/// Cover every class of `H(B)` missed by `q_0` with a cycle generator,
/// lightest classes first.
fn fill_stage0(f: &Factorization, w: &Window) -> Result<()> {
    loop {
        let s0 = f.stage(0)?;
        let mut found = Vec::new();
        for n in 0..=w.hdeg_max {
            for (beta, weight) in uncovered_classes(&s0.q, n, w)? {
                found.push((weight, n, beta));
            }
        }
        let Some(lightest) = found.iter().map(|(wt, _, _)| *wt).min() else {
            return Ok(());
        };
        for (_, n, beta) in found.into_iter().filter(|(wt, _, _)| *wt == lightest) {
            f.cycle(n, &beta)?;
        }
    }
}

/// Adjoin stage-`k` generators for critical classes of `R_{k-1}` that are
/// not yet boundaries in `R_k`, lightest first.
fn fill_tate_stage(f: &Factorization, k: u32, w: &Window) -> Result<()> {
    let lower = f.stage(k - 1)?;
    loop {
        let current = f.stage(k)?;
        let mut found = Vec::new();
        for n in 0..=w.hdeg_max {
            for pair in critical_classes(&lower.algebra, &current.algebra, &current.q, n, w)? {
                found.push((n, pair));
            }
        }
        let Some(lightest) = found.iter().map(|(_, p)| p.weight).min() else {
            return Ok(());
        };
        for (n, pair) in found.into_iter().filter(|(_, p)| p.weight == lightest) {
            f.tate(k, n, &pair.sigma, &pair.b)?;
        }
    }
}

/// Produce stage `k` from stage `k - 1`.
pub fn tate_stage(f: &Factorization, k: u32, mode: StageMode) -> Result<FactorizationStage> {
    if k == 0 {
        return Err(Error::InvalidInput("Tate stages start at 1".into()));
    }
    if let StageMode::NonfunctorialWindow(w) = mode {
        fill_tate_stage(f, k, &w)?;
    }
    check_stage_restriction(f, k)?;
    f.stage(k)
}

fn adjoined(f: &Factorization, r: &LazyRecord) -> Adjoined {
    let reg = f.registry();
    let info = reg.info(r.gen.id).ok();
    Adjoined {
        name: reg.name(r.gen.id),
        hdeg: r.gen.hdeg,
        kind: info.map(|i| i.kind.as_str()).unwrap_or("?").to_string(),
        sigma: match r.key {
            LazyKey::Tate { .. } | LazyKey::Seed { .. } => Some(r.diff.display(reg)),
            _ => None,
        },
        image: r.q_image.display(reg),
    }
}

fn stage_trace(f: &Factorization, s: &FactorizationStage, w: &Window) -> Result<StageTrace> {
    let mut generators = BTreeMap::new();
    for g in s.algebra.gens() {
        if !s.algebra.is_base(g.id) {
            *generators.entry(g.hdeg).or_insert(0) += 1;
        }
    }
    let adjoined = f.stage_records(s.k).iter().map(|r| adjoined(f, r)).collect();
    Ok(StageTrace {
        k: s.k,
        generators,
        homology: homology(&s.algebra, w)?.ranks(),
        adjoined,
    })
}

/// Windows are only respected by morphisms that never raise weight.
fn check_weights(phi: &DGMorphism) -> Result<()> {
    let reg = phi.source().registry();
    for g in phi.source().gens() {
        let image = phi.image_of(g.id).map(|p| p.weighted_degree(reg)).unwrap_or(0);
        if image > reg.weight(g.id) {
            return Err(Error::InvalidInput(format!(
                "`{}` has weight {} but its image has weight {image}",
                reg.name(g.id),
                reg.weight(g.id)
            )));
        }
    }
    Ok(())
}

/// Run the windowed staged factorization of an engine until `H(q_k)` is an
/// isomorphism in the window or `max_stages` Tate stages have been built.
pub fn resolve_engine(f: Arc<Factorization>, w: &Window, max_stages: u32) -> Result<Resolution> {
    check_weights(f.phi())?;
    let target_homology = homology(f.target(), w)?.ranks();
    fill_stage0(&f, w)?;
    let mut stage = f.stage(0)?;
    let mut stages = vec![stage_trace(&f, &stage, w)?];
    let mut resolved = is_quasi_iso_in_window(&stage.q, w)?;
    let mut k = 0;
    while !resolved && k < max_stages {
        k += 1;
        stage = tate_stage(&f, k, StageMode::NonfunctorialWindow(*w))?;
        stages.push(stage_trace(&f, &stage, w)?);
        resolved = is_quasi_iso_in_window(&stage.q, w)?;
    }
    let trace = ResolutionTrace {
        status: if resolved { Status::Resolved } else { Status::Unresolved },
        window: *w,
        max_stages,
        target_homology,
        stages,
        structure: check_structure(&stage.algebra),
    };
    Ok(Resolution {
        trace,
        engine: f,
        stage,
    })
}

/// Windowed resolution of `phi: A -> B` relative to `A`.
pub fn resolve_relative(phi: DGMorphism, w: &Window, max_stages: u32) -> Result<Resolution> {
    resolve_engine(Factorization::new(phi), w, max_stages)
}

/// Every algebra is fibrant: factoring `A -> 0` adds discs indexed by the
/// positive-degree elements of the zero algebra, of which there are none,
/// so the replacement is `A` itself with the identity.
pub fn fibrant_replacement(a: Arc<DGAlgebra>) -> (Arc<DGAlgebra>, DGMorphism) {
    let id = DGMorphism::identity(a.clone());
    (a, id)
}

/// The fibrant replacement functor on morphisms.
pub fn fibrant_replacement_of_morphism(u: &DGMorphism) -> DGMorphism {
    u.clone()
}

/// Windowed cofibrant replacement `O -> Q(B) -> B` built over the ground
/// field.
pub fn cofibrant_replacement(b: Arc<DGAlgebra>, w: &Window, max_stages: u32) -> Result<Resolution> {
    let ground = Arc::new(DGAlgebra::ground(b.registry().clone()));
    let phi = DGMorphism::new(ground, b, BTreeMap::new())?;
    resolve_relative(phi, w, max_stages)
}
