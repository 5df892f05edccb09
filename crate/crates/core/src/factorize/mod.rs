//! The two factorizations of a morphism `phi: A -> B` into a cofibration
//! followed by a fibration, with generators indexed by elements of `B`
//! (and of earlier stages) and materialized on demand.
//!
//! * `A -> A ⊗ S<U> -> B` with disc pairs `I_b`, `sI_b` for every `b` of
//!   positive degree ([`TrivCofFib`]).
//! * `A -> R_0 -> R_1 -> ... -> B` where `R_0` adds the discs and one
//!   cycle generator `Ic_beta` per cycle `beta` of `B`, and stage `k` adds a
//!   generator `I^k_{sigma,b}` with `d = sigma`, `q = b` for every cycle
//!   `sigma` of `R_{k-1}` and every `b` with `d_B b = q_{k-1}(sigma)`
//!   ([`Factorization`]).

mod omega;
mod replacement;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, RwLock};

use sha2::{Digest, Sha256};

use crate::dga::{evaluate, DGAlgebra, DGMorphism};
use crate::error::{Error, Result};
use crate::gca::{Gen, GenId, GenKind, GenSpec, Poly, Registry};

pub use omega::{omega, OmegaMap};
pub use replacement::{
    cofibrant_replacement, fibrant_replacement, fibrant_replacement_of_morphism, resolve_engine, resolve_relative,
    tate_stage, Resolution, StageMode,
};

/// Index of a lazily materialized generator. Degrees are part of the key
/// so that zero payloads still name a generator of a definite degree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LazyKey {
    /// `I_b`, degree `deg = |b| > 0`.
    DiscTop { deg: u32, b: Poly },
    /// `sI_b`, degree `deg - 1`.
    DiscBottom { deg: u32, b: Poly },
    /// `Ic_beta` for a cycle `beta` of degree `deg`.
    Cycle { deg: u32, beta: Poly },
    /// `I^stage_{sigma,b}` for a cycle `sigma` of degree `deg`.
    Tate { stage: u32, deg: u32, sigma: Poly, b: Poly },
    /// A generator supplied up front by a seed algebra.
    Seed { id: GenId },
}

impl LazyKey {
    pub fn kind(&self) -> GenKind {
        match self {
            LazyKey::DiscTop { .. } => GenKind::DiscTop,
            LazyKey::DiscBottom { .. } => GenKind::DiscBottom,
            LazyKey::Cycle { .. } => GenKind::CycleGen,
            LazyKey::Tate { .. } => GenKind::TateGen,
            LazyKey::Seed { .. } => GenKind::Antifield,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LazyRecord {
    pub key: LazyKey,
    pub gen: Gen,
    pub stage: u32,
    pub diff: Poly,
    pub q_image: Poly,
}

#[derive(Debug, Default)]
struct Memo {
    by_key: BTreeMap<LazyKey, usize>,
    by_gen: BTreeMap<GenId, usize>,
    records: Vec<LazyRecord>,
}

/// One materialized stage `R_k` with `q_k: R_k -> B` and `j_k: A -> R_k`.
#[derive(Debug, Clone)]
pub struct FactorizationStage {
    pub k: u32,
    pub algebra: Arc<DGAlgebra>,
    pub q: DGMorphism,
    pub j: DGMorphism,
}

/// Memo table of lazily indexed generators over a fixed `phi: A -> B`.
#[derive(Debug)]
pub struct Factorization {
    phi: DGMorphism,
    discs_only: bool,
    memo: RwLock<Memo>,
    frozen: AtomicBool,
}

fn short_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(4).map(|b| format!("{b:02x}")).collect()
}

impl Factorization {
    /// The staged factorization `A -> R_k -> B`.
    pub fn new(phi: DGMorphism) -> Arc<Self> {
        Arc::new(Factorization {
            phi,
            discs_only: false,
            memo: RwLock::new(Memo::default()),
            frozen: AtomicBool::new(false),
        })
    }

    fn new_discs_only(phi: DGMorphism) -> Arc<Self> {
        Arc::new(Factorization {
            phi,
            discs_only: true,
            memo: RwLock::new(Memo::default()),
            frozen: AtomicBool::new(false),
        })
    }

    pub fn phi(&self) -> &DGMorphism {
        &self.phi
    }

    pub fn source(&self) -> &Arc<DGAlgebra> {
        self.phi.source()
    }

    pub fn target(&self) -> &Arc<DGAlgebra> {
        self.phi.target()
    }

    pub fn registry(&self) -> &Arc<Registry> {
        self.phi.source().registry()
    }

    /// Forbid further materialization.
    pub fn freeze(&self) {
        self.frozen.store(true, Ordering::Release);
    }

    pub fn records(&self) -> Vec<LazyRecord> {
        self.memo.read().expect("memo poisoned").records.clone()
    }

    pub fn record_of(&self, id: GenId) -> Option<LazyRecord> {
        let memo = self.memo.read().expect("memo poisoned");
        memo.by_gen.get(&id).map(|&i| memo.records[i].clone())
    }

    pub fn lookup(&self, key: &LazyKey) -> Option<Gen> {
        let memo = self.memo.read().expect("memo poisoned");
        memo.by_key.get(key).map(|&i| memo.records[i].gen)
    }

    fn insert(&self, key: LazyKey, spec: GenSpec, diff: Poly, q_image: Poly) -> Result<Gen> {
        let mut memo = self.memo.write().expect("memo poisoned");
        if let Some(&i) = memo.by_key.get(&key) {
            return Ok(memo.records[i].gen);
        }
        if self.frozen.load(Ordering::Acquire) {
            return Err(Error::RegistryFrozen(spec.name));
        }
        let stage = spec.stage;
        let gen = self.registry().register(spec)?;
        let idx = memo.records.len();
        memo.records.push(LazyRecord {
            key: key.clone(),
            gen,
            stage,
            diff,
            q_image,
        });
        memo.by_key.insert(key, idx);
        memo.by_gen.insert(gen.id, idx);
        Ok(gen)
    }

    fn payload_spec(&self, prefix: &str, hdeg: u32, kind: GenKind, stage: u32, payload: &[&Poly], deg: u32) -> GenSpec {
        let reg = self.registry();
        let text: Vec<String> = payload.iter().map(|p| p.display(reg)).collect();
        let hash = short_hash(&format!("{deg}|{}", text.join("|")));
        let weight = payload.iter().map(|p| p.weighted_degree(reg)).max().unwrap_or(0).max(1);
        let jet = payload.iter().map(|p| p.jet_order(reg)).max().unwrap_or(0);
        GenSpec::new(format!("{prefix}[{hash}]"), hdeg, kind)
            .stage(stage)
            .weight(weight)
            .jet_order(jet)
    }

    fn canonical_in_target(&self, n: u32, b: &Poly) -> Result<Poly> {
        let target = self.target();
        let b = target.reduce(b)?;
        if !b.is_zero() && b.hdeg() != Some(n) {
            return Err(Error::DegreeMismatch {
                context: "payload in the target".into(),
                expected: n as i64,
                found: b.hdeg().map(|d| d as i64).unwrap_or(-1),
            });
        }
        Ok(b)
    }

    /// `sI_b` for `b` of degree `n > 0`.
    pub fn disc_bottom(&self, n: u32, b: &Poly) -> Result<Gen> {
        if n == 0 {
            return Err(Error::Invariant(
                "disc generators exist only for elements of positive degree".into(),
            ));
        }
        let b = self.canonical_in_target(n, b)?;
        let key = LazyKey::DiscBottom { deg: n, b: b.clone() };
        if let Some(g) = self.lookup(&key) {
            return Ok(g);
        }
        let target = self.target();
        let db = target.reduce(&target.d(&b)?)?;
        let spec = self.payload_spec("sI", n - 1, GenKind::DiscBottom, 0, &[&b], n);
        self.insert(key, spec, Poly::zero(), db)
    }

    /// `I_b` for `b` of degree `n > 0`; materializes `sI_b` as well.
    pub fn disc_top(&self, n: u32, b: &Poly) -> Result<Gen> {
        let bottom = self.disc_bottom(n, b)?;
        let b = self.canonical_in_target(n, b)?;
        let key = LazyKey::DiscTop { deg: n, b: b.clone() };
        if let Some(g) = self.lookup(&key) {
            return Ok(g);
        }
        let spec = self.payload_spec("I", n, GenKind::DiscTop, 0, &[&b], n);
        self.insert(key, spec, Poly::gen(bottom), b)
    }

    /// `Ic_beta` for a cycle `beta` of degree `n`.
    pub fn cycle(&self, n: u32, beta: &Poly) -> Result<Gen> {
        if self.discs_only {
            return Err(Error::InvalidInput(
                "cycle generators belong to the staged factorization".into(),
            ));
        }
        let beta = self.canonical_in_target(n, beta)?;
        let key = LazyKey::Cycle {
            deg: n,
            beta: beta.clone(),
        };
        if let Some(g) = self.lookup(&key) {
            return Ok(g);
        }
        let target = self.target();
        let dbeta = target.reduce(&target.d(&beta)?)?;
        if !dbeta.is_zero() {
            return Err(Error::Invariant(format!(
                "cycle generator requested for a non-cycle: d(beta) = {}",
                dbeta.display(self.registry())
            )));
        }
        let spec = self.payload_spec("Ic", n, GenKind::CycleGen, 0, &[&beta], n);
        self.insert(key, spec, Poly::zero(), beta)
    }

    /// `I^k_{sigma,b}`: requires `sigma` to be a degree-`n` cycle of
    /// `R_{k-1}` and `d_B b = q_{k-1}(sigma)`.
    pub fn tate(&self, k: u32, n: u32, sigma: &Poly, b: &Poly) -> Result<Gen> {
        if self.discs_only {
            return Err(Error::InvalidInput(
                "Tate generators belong to the staged factorization".into(),
            ));
        }
        if k == 0 {
            return Err(Error::InvalidInput("Tate stages start at 1".into()));
        }
        let reg = self.registry().clone();
        if !sigma.is_zero() && sigma.hdeg() != Some(n) {
            return Err(Error::DegreeMismatch {
                context: "sigma".into(),
                expected: n as i64,
                found: sigma.hdeg().map(|d| d as i64).unwrap_or(-1),
            });
        }
        for id in sigma.gen_ids() {
            let ok = self.source().contains_gen(id) || self.record_of(id).is_some_and(|r| r.stage < k);
            if !ok {
                return Err(Error::Invariant(format!(
                    "sigma uses `{}`, which is not in stage {}",
                    reg.name(id),
                    k - 1
                )));
            }
        }
        let b = self.canonical_in_target(n + 1, b)?;
        let key = LazyKey::Tate {
            stage: k,
            deg: n,
            sigma: sigma.clone(),
            b: b.clone(),
        };
        if let Some(g) = self.lookup(&key) {
            return Ok(g);
        }
        let dsigma = self.delta(sigma)?;
        if !dsigma.is_zero() {
            return Err(Error::Invariant(format!(
                "sigma is not a cycle: delta(sigma) = {}",
                dsigma.display(&reg)
            )));
        }
        let target = self.target();
        let db = target.reduce(&target.d(&b)?)?;
        let qs = self.q_eval(sigma)?;
        let residual = &db - &qs;
        if !residual.is_zero() {
            return Err(Error::Invariant(format!(
                "d_B(b) differs from q(sigma) by {}",
                residual.display(&reg)
            )));
        }
        let spec = self.payload_spec(&format!("I{k}"), n + 1, GenKind::TateGen, k, &[sigma, &b], n);
        self.insert(key, spec, sigma.clone(), b)
    }

    /// Register generators of a seed algebra over `A` (such as a Koszul-Tate
    /// complex) as stage-0 material, with the given images in `B`.
    pub fn add_seed(&self, seed: &DGAlgebra, q_images: &BTreeMap<GenId, Poly>) -> Result<()> {
        let reg = self.registry().clone();
        for g in seed.gens() {
            if self.source().contains_gen(g.id) {
                continue;
            }
            let image = q_images.get(&g.id).cloned().unwrap_or_default();
            let key = LazyKey::Seed { id: g.id };
            let mut memo = self.memo.write().expect("memo poisoned");
            if memo.by_key.contains_key(&key) {
                continue;
            }
            for used in seed.diff_of(g.id).gen_ids() {
                let known = self.source().contains_gen(used) || memo.by_gen.contains_key(&used);
                if !known {
                    return Err(Error::ForeignGenerator(reg.name(used)));
                }
            }
            let idx = memo.records.len();
            memo.records.push(LazyRecord {
                key: key.clone(),
                gen: *g,
                stage: 0,
                diff: seed.diff_of(g.id),
                q_image: image,
            });
            memo.by_key.insert(key, idx);
            memo.by_gen.insert(g.id, idx);
        }
        // verify the chain condition of the seeded part right away
        self.stage(0).map(|_| ())
    }

    /// The differential on `A` together with every materialized generator.
    pub fn delta(&self, p: &Poly) -> Result<Poly> {
        let memo = self.memo.read().expect("memo poisoned");
        let a = self.source();
        crate::gca::apply_derivation_with(p, -1, |g| {
            if a.contains_gen(g.id) {
                Ok(a.diff_of(g.id))
            } else if let Some(&i) = memo.by_gen.get(&g.id) {
                Ok(memo.records[i].diff.clone())
            } else {
                Err(Error::ForeignGenerator(self.registry().name(g.id)))
            }
        })
    }

    /// `q` on `A` together with every materialized generator.
    pub fn q_eval(&self, p: &Poly) -> Result<Poly> {
        let memo = self.memo.read().expect("memo poisoned");
        let out = evaluate(p, |g| {
            if let Some(img) = self.phi.image_of(g.id) {
                Ok(img.clone())
            } else if let Some(&i) = memo.by_gen.get(&g.id) {
                Ok(memo.records[i].q_image.clone())
            } else {
                Err(Error::ForeignGenerator(self.registry().name(g.id)))
            }
        })?;
        self.target().reduce(&out)
    }

    /// Snapshot of `R_k`: `A` plus every materialized generator of stage at
    /// most `k`, in the well-order (degree, stage, family, creation).
    pub fn stage(&self, k: u32) -> Result<FactorizationStage> {
        let reg = self.registry().clone();
        let a = self.source().clone();
        let mut lazy: Vec<LazyRecord> = self.records().into_iter().filter(|r| r.stage <= k).collect();
        let mut keyed = Vec::with_capacity(lazy.len());
        for r in lazy.drain(..) {
            keyed.push((reg.info(r.gen.id)?.order_key(), r));
        }
        keyed.sort_by_key(|x| x.0);
        let mut order: Vec<Gen> = a.gens().to_vec();
        let mut diff: BTreeMap<GenId, Poly> = a.diff_rules().clone();
        let mut rule: BTreeMap<GenId, Poly> = self.phi.rule().clone();
        for (_, r) in &keyed {
            order.push(r.gen);
            diff.insert(r.gen.id, r.diff.clone());
            rule.insert(r.gen.id, r.q_image.clone());
        }
        let algebra = Arc::new(DGAlgebra::from_parts(reg, order, diff, Some(a.clone()))?);
        let q = DGMorphism::new(algebra.clone(), self.target().clone(), rule)?;
        let j = DGMorphism::inclusion(a, algebra.clone())?;
        Ok(FactorizationStage { k, algebra, q, j })
    }

    /// Materialized generators of exactly stage `k`.
    pub fn stage_records(&self, k: u32) -> Vec<LazyRecord> {
        self.records().into_iter().filter(|r| r.stage == k).collect()
    }

    /// Largest stage index with a materialized generator.
    pub fn top_stage(&self) -> u32 {
        self.records().iter().map(|r| r.stage).max().unwrap_or(0)
    }
}

/// `A -> A ⊗ S<U> -> B` with disc generators only: `i` is a split minimal
/// relative Sullivan algebra, `p` a fibration.
#[derive(Debug, Clone)]
pub struct TrivCofFib {
    engine: Arc<Factorization>,
}

impl TrivCofFib {
    pub fn engine(&self) -> &Arc<Factorization> {
        &self.engine
    }

    /// `I_b` and its witness property `p(I_b) = b`.
    pub fn disc(&self, n: u32, b: &Poly) -> Result<Gen> {
        self.engine.disc_top(n, b)
    }

    pub fn disc_bottom(&self, n: u32, b: &Poly) -> Result<Gen> {
        self.engine.disc_bottom(n, b)
    }

    /// `(i, A ⊗ S<U>, p)` on the generators materialized so far.
    pub fn snapshot(&self) -> Result<(DGMorphism, Arc<DGAlgebra>, DGMorphism)> {
        let s = self.engine.stage(0)?;
        Ok((s.j, s.algebra, s.q))
    }
}

pub fn build_trivcof_fib(phi: DGMorphism) -> TrivCofFib {
    TrivCofFib {
        engine: Factorization::new_discs_only(phi),
    }
}

/// Start the staged factorization; `R_0` grows as discs and cycle
/// generators are requested.
pub fn build_stage0(phi: DGMorphism) -> Arc<Factorization> {
    Factorization::new(phi)
}

/// Check that `R_{k-1} ⊂ R_k` carries the same differential and the same
/// `q` on every generator of `R_{k-1}`.
pub fn check_stage_restriction(f: &Factorization, k: u32) -> Result<()> {
    if k == 0 {
        return Ok(());
    }
    let lower = f.stage(k - 1)?;
    let upper = f.stage(k)?;
    let reg = f.registry();
    for g in lower.algebra.gens() {
        if !upper.algebra.contains_gen(g.id) {
            return Err(Error::Invariant(format!("`{}` missing from stage {k}", reg.name(g.id))));
        }
        if lower.algebra.diff_of(g.id) != upper.algebra.diff_of(g.id) {
            return Err(Error::Invariant(format!(
                "differential of `{}` changed between stages",
                reg.name(g.id)
            )));
        }
        if lower.q.image_of(g.id) != upper.q.image_of(g.id) {
            return Err(Error::Invariant(format!(
                "q of `{}` changed between stages",
                reg.name(g.id)
            )));
        }
    }
    Ok(())
}
