//! Jet coordinates and total derivatives.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::dga::DGAlgebra;
use crate::error::{Error, Result};
use crate::gca::{apply_derivation_with, Gen, GenId, GenKind, GenSpec, Poly, Registry};

/// A multi-index `alpha` over the base directions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn plus_unit(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v[i] += 1;
        MultiIndex(v)
    }

    pub fn add(&self, other: &MultiIndex) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// First direction with a positive entry and the index with that entry
    /// lowered by one.
    pub fn split_first(&self) -> Option<(usize, MultiIndex)> {
        let i = self.0.iter().position(|&a| a > 0)?;
        let mut v = self.0.clone();
        v[i] -= 1;
        Some((i, MultiIndex(v)))
    }

    /// All multi-indices of order at most `max` in dimension `dim`, sorted by
    /// order and then lexicographically descending (so `x` before `y`).
    pub fn all_up_to(dim: usize, max: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for ord in 0..=max {
            let mut level = Vec::new();
            compositions(dim, ord, &mut Vec::new(), &mut level);
            level.sort_by(|a, b| b.cmp(a));
            out.extend(level.into_iter().map(MultiIndex));
        }
        out
    }

    /// Suffix used in names: direction letters `x`, `y`, `z` repeated, or a
    /// bracketed list beyond three directions.
    pub fn suffix(&self) -> String {
        if self.0.len() <= 3 {
            const LETTERS: [char; 3] = ['x', 'y', 'z'];
            let mut s = String::new();
            for (i, &a) in self.0.iter().enumerate() {
                for _ in 0..a {
                    s.push(LETTERS[i]);
                }
            }
            s
        } else {
            let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
            format!("[{}]", parts.join(","))
        }
    }
}

fn compositions(dim: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == dim {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    if dim == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for a in 0..=total {
        prefix.push(a);
        compositions(dim, total - a, prefix, out);
        prefix.pop();
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// What a generator means inside a jet context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JetRole {
    Coord(usize),
    Var { field: usize, alpha: MultiIndex },
    Tower { tower: usize, alpha: MultiIndex },
}

#[derive(Debug, Clone)]
struct Tower {
    name: String,
    hdeg: u32,
    weight: u32,
    base_order: u32,
    kind: GenKind,
}

#[derive(Debug, Default)]
struct JetTables {
    vars: BTreeMap<(usize, MultiIndex), Gen>,
    towers: Vec<Tower>,
    tower_gens: BTreeMap<(usize, MultiIndex), Gen>,
    roles: BTreeMap<GenId, JetRole>,
}

/// Base coordinates `x1..xp`, dependent variables `u1..um` and their jets up
/// to order `jet_cap`, materialized on first use.
///
/// In extended mode the context also carries towers `D^alpha g` of further
/// generators (antifields), on which total derivatives act by shifting the
/// multi-index.
#[derive(Debug)]
pub struct JetContext {
    registry: Arc<Registry>,
    base_dim: usize,
    fiber_rank: usize,
    jet_cap: u32,
    extended: bool,
    coords: Vec<Gen>,
    tables: RwLock<JetTables>,
}

impl JetContext {
    pub fn new(
        registry: Arc<Registry>,
        base_dim: usize,
        fiber_rank: usize,
        jet_cap: u32,
        extended: bool,
    ) -> Result<Arc<Self>> {
        if base_dim == 0 || fiber_rank == 0 {
            return Err(Error::InvalidInput(
                "a jet context needs at least one base and one fiber coordinate".into(),
            ));
        }
        let mut coords = Vec::with_capacity(base_dim);
        let mut tables = JetTables::default();
        for i in 0..base_dim {
            let g = registry.register(GenSpec::new(format!("x{}", i + 1), 0, GenKind::BaseCoord))?;
            tables.roles.insert(g.id, JetRole::Coord(i));
            coords.push(g);
        }
        let ctx = JetContext {
            registry,
            base_dim,
            fiber_rank,
            jet_cap,
            extended,
            coords,
            tables: RwLock::new(tables),
        };
        for j in 0..fiber_rank {
            ctx.var(j, &MultiIndex::zero(base_dim))?;
        }
        Ok(Arc::new(ctx))
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.registry
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn fiber_rank(&self) -> usize {
        self.fiber_rank
    }

    pub fn jet_cap(&self) -> u32 {
        self.jet_cap
    }

    pub fn is_extended(&self) -> bool {
        self.extended
    }

    pub fn coord(&self, i: usize) -> Gen {
        self.coords[i]
    }

    pub fn coords(&self) -> &[Gen] {
        &self.coords
    }

    pub fn role(&self, id: GenId) -> Option<JetRole> {
        self.tables.read().expect("jet tables poisoned").roles.get(&id).cloned()
    }

    /// The jet variable `u^field_alpha` (fields are 0-based).
    pub fn var(&self, field: usize, alpha: &MultiIndex) -> Result<Gen> {
        if field >= self.fiber_rank || alpha.dim() != self.base_dim {
            return Err(Error::InvalidInput(format!("no jet variable u{}{}", field + 1, alpha)));
        }
        if alpha.order() > self.jet_cap {
            return Err(Error::CapOverflow {
                what: format!("u{}_{}", field + 1, alpha.suffix()),
                cap: self.jet_cap,
            });
        }
        let key = (field, alpha.clone());
        if let Some(g) = self.tables.read().expect("jet tables poisoned").vars.get(&key) {
            return Ok(*g);
        }
        let mut t = self.tables.write().expect("jet tables poisoned");
        if let Some(g) = t.vars.get(&key) {
            return Ok(*g);
        }
        let name = if alpha.is_zero() {
            format!("u{}", field + 1)
        } else {
            format!("u{}_{}", field + 1, alpha.suffix())
        };
        let g = self
            .registry
            .register(GenSpec::new(name, 0, GenKind::JetVar).jet_order(alpha.order()))?;
        t.vars.insert(key, g);
        t.roles.insert(
            g.id,
            JetRole::Var {
                field,
                alpha: alpha.clone(),
            },
        );
        Ok(g)
    }

    /// Register a tower family `D^alpha g` whose base member has jet order
    /// `base_order`. Only available in extended mode.
    pub fn add_tower(&self, name: &str, hdeg: u32, weight: u32, base_order: u32, kind: GenKind) -> Result<usize> {
        if !self.extended {
            return Err(Error::InvalidInput("towers need a jet context in extended mode".into()));
        }
        let mut t = self.tables.write().expect("jet tables poisoned");
        t.towers.push(Tower {
            name: name.to_string(),
            hdeg,
            weight,
            base_order,
            kind,
        });
        Ok(t.towers.len() - 1)
    }

    /// Largest multi-index order admitted in a tower.
    pub fn tower_cap(&self, tower: usize) -> Option<u32> {
        let t = self.tables.read().expect("jet tables poisoned");
        let base = t.towers.get(tower)?.base_order;
        self.jet_cap.checked_sub(base)
    }

    pub fn tower_gen(&self, tower: usize, alpha: &MultiIndex) -> Result<Gen> {
        let key = (tower, alpha.clone());
        if let Some(g) = self.tables.read().expect("jet tables poisoned").tower_gens.get(&key) {
            return Ok(*g);
        }
        let mut t = self.tables.write().expect("jet tables poisoned");
        if let Some(g) = t.tower_gens.get(&key) {
            return Ok(*g);
        }
        let fam = t
            .towers
            .get(tower)
            .cloned()
            .ok_or_else(|| Error::InvalidInput(format!("unknown tower {tower}")))?;
        let name = if alpha.is_zero() {
            fam.name.clone()
        } else {
            format!("{}_{}", fam.name, alpha.suffix())
        };
        let order = fam.base_order + alpha.order();
        if order > self.jet_cap {
            return Err(Error::CapOverflow {
                what: name,
                cap: self.jet_cap,
            });
        }
        let g = self.registry.register(
            GenSpec::new(name, fam.hdeg, fam.kind)
                .weight(fam.weight)
                .jet_order(order),
        )?;
        t.tower_gens.insert(key, g);
        t.roles.insert(
            g.id,
            JetRole::Tower {
                tower,
                alpha: alpha.clone(),
            },
        );
        Ok(g)
    }

    /// Materialize every jet variable up to the cap, in order of jet order,
    /// then field, then multi-index.
    pub fn all_vars(&self) -> Result<Vec<Gen>> {
        let mut out = Vec::new();
        let indices = MultiIndex::all_up_to(self.base_dim, self.jet_cap);
        for ord in 0..=self.jet_cap {
            for j in 0..self.fiber_rank {
                for a in indices.iter().filter(|a| a.order() == ord) {
                    out.push(self.var(j, a)?);
                }
            }
        }
        Ok(out)
    }

    /// The jet algebra up to the cap: coordinates and all jet variables, zero
    /// differential.
    pub fn jet_algebra(&self) -> Result<DGAlgebra> {
        let mut gens = self.coords.clone();
        gens.extend(self.all_vars()?);
        DGAlgebra::free(self.registry.clone(), &gens)
    }

    /// The total derivative `D_i` (0-based direction).
    pub fn total_derivative(&self, p: &Poly, i: usize) -> Result<Poly> {
        if i >= self.base_dim {
            return Err(Error::InvalidInput(format!(
                "direction {} out of range for base dimension {}",
                i + 1,
                self.base_dim
            )));
        }
        apply_derivation_with(p, 0, |g| match self.role(g.id) {
            Some(JetRole::Coord(k)) => Ok(if k == i { Poly::one() } else { Poly::zero() }),
            Some(JetRole::Var { field, alpha }) => {
                let next = alpha.plus_unit(i);
                if next.order() > self.jet_cap {
                    return Err(Error::CapOverflow {
                        what: format!("D_{} u{}_{}", i + 1, field + 1, alpha.suffix()),
                        cap: self.jet_cap,
                    });
                }
                Ok(Poly::gen(self.var(field, &next)?))
            }
            Some(JetRole::Tower { tower, alpha }) => Ok(Poly::gen(self.tower_gen(tower, &alpha.plus_unit(i))?)),
            None => Err(Error::InvalidInput(format!(
                "`{}` is not a jet generator",
                self.registry.name(g.id)
            ))),
        })
    }

    /// `D^alpha p`.
    pub fn total_derivative_multi(&self, p: &Poly, alpha: &MultiIndex) -> Result<Poly> {
        let mut out = p.clone();
        for (i, &a) in alpha.entries().iter().enumerate() {
            for _ in 0..a {
                out = self.total_derivative(&out, i)?;
            }
        }
        Ok(out)
    }

    pub fn jet_order(&self, p: &Poly) -> u32 {
        p.jet_order(&self.registry)
    }
}

/// All prolongations `D^alpha p` with `|alpha| <= max_order`, in the order
/// of [`MultiIndex::all_up_to`].
pub fn prolong(ctx: &JetContext, p: &Poly, max_order: u32) -> Result<Vec<(MultiIndex, Poly)>> {
    let ord = ctx.jet_order(p);
    if ord + max_order > ctx.jet_cap() {
        return Err(Error::CapOverflow {
            what: format!("prolongation of order {max_order} of an order-{ord} polynomial"),
            cap: ctx.jet_cap(),
        });
    }
    let mut done: BTreeMap<MultiIndex, Poly> = BTreeMap::new();
    let mut out = Vec::new();
    for alpha in MultiIndex::all_up_to(ctx.base_dim(), max_order) {
        let value = match alpha.split_first() {
            None => p.clone(),
            Some((i, lower)) => ctx.total_derivative(&done[&lower], i)?,
        };
        done.insert(alpha.clone(), value.clone());
        out.push((alpha, value));
    }
    Ok(out)
}
