use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};

use super::monomial::Monomial;

/// Creation-ordered generator identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenId(pub u32);

impl fmt::Display for GenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A generator handle: its id together with its homological degree, so that
/// sign computations never need a registry lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gen {
    pub id: GenId,
    pub hdeg: u32,
}

impl Gen {
    pub fn is_odd(&self) -> bool {
        self.hdeg % 2 == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenKind {
    BaseCoord,
    JetVar,
    Antifield,
    TateGen,
    DiscTop,
    DiscBottom,
    CycleGen,
}

impl GenKind {
    /// Rank inside one degree and stage, following the ordering of generator
    /// families used for the well-order of a Sullivan basis: disc bottoms,
    /// disc tops, cycle generators, then adjoined killers.
    pub fn rank(self) -> u8 {
        match self {
            GenKind::BaseCoord | GenKind::JetVar => 0,
            GenKind::DiscBottom => 1,
            GenKind::DiscTop => 2,
            GenKind::Antifield => 3,
            GenKind::CycleGen => 4,
            GenKind::TateGen => 5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GenKind::BaseCoord => "base_coord",
            GenKind::JetVar => "jet_var",
            GenKind::Antifield => "antifield",
            GenKind::TateGen => "tate_gen",
            GenKind::DiscTop => "disc_top",
            GenKind::DiscBottom => "disc_bottom",
            GenKind::CycleGen => "cycle_gen",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorInfo {
    pub id: GenId,
    pub name: String,
    pub hdeg: u32,
    pub kind: GenKind,
    pub stage: u32,
    /// Contribution of one factor of this generator to the polynomial degree
    /// used for truncation windows.
    pub weight: u32,
    /// Effective jet order (for jet variables `|alpha|`, for adjoined
    /// generators the largest order reached by their boundary).
    pub jet_order: u32,
}

impl GeneratorInfo {
    pub fn gen(&self) -> Gen {
        Gen {
            id: self.id,
            hdeg: self.hdeg,
        }
    }

    /// Key of the well-order on generators: degree first, then stage, then
    /// family, then creation order.
    pub fn order_key(&self) -> (u32, u32, u8, GenId) {
        (self.hdeg, self.stage, self.kind.rank(), self.id)
    }
}

/// Description of a generator to register.
#[derive(Debug, Clone)]
pub struct GenSpec {
    pub name: String,
    pub hdeg: u32,
    pub kind: GenKind,
    pub stage: u32,
    pub weight: u32,
    pub jet_order: u32,
}

impl GenSpec {
    pub fn new(name: impl Into<String>, hdeg: u32, kind: GenKind) -> Self {
        GenSpec {
            name: name.into(),
            hdeg,
            kind,
            stage: 0,
            weight: 1,
            jet_order: 0,
        }
    }

    pub fn stage(mut self, stage: u32) -> Self {
        self.stage = stage;
        self
    }

    pub fn weight(mut self, weight: u32) -> Self {
        self.weight = weight.max(1);
        self
    }

    pub fn jet_order(mut self, order: u32) -> Self {
        self.jet_order = order;
        self
    }
}

/// Append-only table of generators shared by every algebra of a computation.
///
/// Ids are handed out in creation order. After [`Registry::freeze`] no more
/// generators can be added and the table may be read from any thread.
#[derive(Debug, Default)]
pub struct Registry {
    gens: RwLock<Vec<GeneratorInfo>>,
    frozen: AtomicBool,
}

impl Registry {
    pub fn new() -> Arc<Registry> {
        Arc::new(Registry::default())
    }

    pub fn register(&self, spec: GenSpec) -> Result<Gen> {
        if self.frozen.load(Ordering::Acquire) {
            return Err(Error::RegistryFrozen(spec.name));
        }
        let mut gens = self.gens.write().expect("registry lock poisoned");
        let id = GenId(gens.len() as u32);
        let info = GeneratorInfo {
            id,
            name: spec.name,
            hdeg: spec.hdeg,
            kind: spec.kind,
            stage: spec.stage,
            weight: spec.weight.max(1),
            jet_order: spec.jet_order,
        };
        let gen = info.gen();
        gens.push(info);
        Ok(gen)
    }

    pub fn freeze(&self) {
        self.frozen.store(true, Ordering::Release);
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen.load(Ordering::Acquire)
    }

    pub fn len(&self) -> usize {
        self.gens.read().expect("registry lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn info(&self, id: GenId) -> Result<GeneratorInfo> {
        self.gens
            .read()
            .expect("registry lock poisoned")
            .get(id.0 as usize)
            .cloned()
            .ok_or(Error::UnknownGenerator(id))
    }

    pub fn gen(&self, id: GenId) -> Result<Gen> {
        self.info(id).map(|i| i.gen())
    }

    pub fn name(&self, id: GenId) -> String {
        self.info(id).map(|i| i.name).unwrap_or_else(|_| format!("?{}", id.0))
    }

    pub fn weight(&self, id: GenId) -> u32 {
        self.info(id).map(|i| i.weight).unwrap_or(1)
    }

    pub fn jet_order(&self, id: GenId) -> u32 {
        self.info(id).map(|i| i.jet_order).unwrap_or(0)
    }

    /// Sort a word of generators into canonical order.
    ///
    /// Returns the sorted monomial and the Koszul sign of the sorting
    /// permutation restricted to odd generators; the sign is 0 when an odd
    /// generator repeats.
    pub fn normalize_monomial(&self, word: &[GenId]) -> Result<(Monomial, i8)> {
        let gens = word.iter().map(|&id| self.gen(id)).collect::<Result<Vec<_>>>()?;
        Ok(normalize_word(&gens))
    }
}

/// Sorting sign for a word of generator handles; see
/// [`Registry::normalize_monomial`].
pub fn normalize_word(word: &[Gen]) -> (Monomial, i8) {
    let odd: Vec<GenId> = word.iter().filter(|g| g.is_odd()).map(|g| g.id).collect();
    let mut inversions = 0usize;
    for i in 0..odd.len() {
        for j in (i + 1)..odd.len() {
            if odd[i] == odd[j] {
                return (Monomial::one(), 0);
            }
            if odd[i] > odd[j] {
                inversions += 1;
            }
        }
    }
    let mut sorted = word.to_vec();
    sorted.sort();
    let mut factors: Vec<(Gen, u32)> = Vec::new();
    for g in sorted {
        match factors.last_mut() {
            Some((last, e)) if *last == g => *e += 1,
            _ => factors.push((g, 1)),
        }
    }
    let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
    (Monomial::from_sorted(factors), sign)
}
