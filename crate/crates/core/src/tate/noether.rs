use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gca::{Monomial, Poly, Rational};
use crate::homology::{window_monomials, Window};
use crate::jet::{JetContext, MultiIndex};
use crate::linalg::{kernel, IncrementalSpan, Matrix, SparseVec};

use super::PDESystem;

/// A relation `sum_i sum_alpha g^i_alpha D^alpha F_i = 0`, stored per
/// equation as a map from multi-indices to coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoetherOperator {
    pub coefficients: Vec<BTreeMap<MultiIndex, Poly>>,
}

impl NoetherOperator {
    pub fn new(coefficients: Vec<BTreeMap<MultiIndex, Poly>>) -> Self {
        let coefficients = coefficients
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, g)| !g.is_zero()).collect())
            .collect();
        NoetherOperator { coefficients }
    }

    /// Largest `|alpha|` with a nonzero coefficient.
    pub fn order(&self) -> u32 {
        self.coefficients
            .iter()
            .flat_map(|m| m.keys().map(|a| a.order()))
            .max()
            .unwrap_or(0)
    }

    /// `sum g^i_alpha D^alpha F_i`, zero exactly when the relation holds.
    pub fn apply(&self, sys: &PDESystem) -> Result<Poly> {
        if self.coefficients.len() != sys.len() {
            return Err(Error::InvalidInput(format!(
                "operator has {} components for {} equations",
                self.coefficients.len(),
                sys.len()
            )));
        }
        let mut out = Poly::zero();
        for (coeffs, f) in self.coefficients.iter().zip(sys.equations()) {
            for (alpha, g) in coeffs {
                out = &out + &g.mul(&sys.ctx().total_derivative_multi(f, alpha)?);
            }
        }
        Ok(out)
    }

    pub fn display(&self, sys: &PDESystem) -> String {
        let reg = sys.ctx().registry();
        let mut s = String::new();
        for (i, coeffs) in self.coefficients.iter().enumerate() {
            for (alpha, g) in coeffs {
                if !s.is_empty() {
                    s.push_str(" + ");
                }
                let d = if alpha.is_zero() {
                    String::new()
                } else {
                    format!("D_{} ", alpha.suffix())
                };
                write!(s, "({}) {}{}", g.display(reg), d, sys.labels()[i]).unwrap();
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

/// Columns of the relation system: (equation, multi-index, coefficient
/// monomial), with the product `m * D^alpha F_i` already expanded.
struct Unknowns {
    keys: Vec<(usize, MultiIndex, Monomial)>,
    index: BTreeMap<(usize, MultiIndex, Monomial), usize>,
}

impl Unknowns {
    fn vector_of(&self, parts: &[(usize, MultiIndex, Poly)]) -> Option<SparseVec> {
        let mut v = SparseVec::new();
        for (i, alpha, g) in parts {
            for (m, c) in g.terms() {
                let col = *self.index.get(&(*i, alpha.clone(), m.clone()))?;
                let e = v.entry(col).or_insert_with(Rational::zero);
                *e += c;
            }
        }
        v.retain(|_, c| !c.is_zero());
        Some(v)
    }

    fn operator(&self, eqs: usize, v: &SparseVec) -> NoetherOperator {
        let mut coefficients = vec![BTreeMap::<MultiIndex, Poly>::new(); eqs];
        for (&col, c) in v {
            let (i, alpha, m) = &self.keys[col];
            coefficients[*i]
                .entry(alpha.clone())
                .or_default()
                .add_term(m.clone(), c.clone());
        }
        NoetherOperator::new(coefficients)
    }
}

/// Relations `sum g^i_alpha D^alpha F_i = 0` with `|alpha| <= order_cap`
/// and coefficient degree at most `coeff_deg_cap`, listed as a basis modulo
/// the Koszul relations `D^b F_j * D^a F_i - D^a F_i * D^b F_j`, polynomial
/// multiples and total derivatives of earlier relations.
///
/// Blocks are searched by increasing order, then coefficient degree.
pub fn noether_identities(sys: &PDESystem, order_cap: u32, coeff_deg_cap: u32) -> Result<Vec<NoetherOperator>> {
    let ctx = sys.ctx();
    let reg = ctx.registry().clone();
    let eqs = sys.len();
    if eqs == 0 {
        return Ok(Vec::new());
    }
    let mut prolonged: BTreeMap<(usize, MultiIndex), Poly> = BTreeMap::new();
    for (i, f) in sys.equations().iter().enumerate() {
        for (alpha, p) in crate::jet::prolong(ctx, f, order_cap)? {
            prolonged.insert((i, alpha), p);
        }
    }

    let mut gens = ctx.coords().to_vec();
    gens.extend(ctx.all_vars()?);
    let w = Window::new(0, coeff_deg_cap, ctx.jet_cap());
    let monomials = window_monomials(&reg, &gens, 0, &w);
    let indices = MultiIndex::all_up_to(ctx.base_dim(), order_cap);
    let mut keys = Vec::new();
    for i in 0..eqs {
        for alpha in &indices {
            for m in &monomials {
                keys.push((i, alpha.clone(), m.clone()));
            }
        }
    }
    let index = keys.iter().cloned().enumerate().map(|(c, k)| (k, c)).collect();
    let unknowns = Unknowns { keys, index };

    // columns of the expanded system: coefficients of m * D^alpha F_i
    let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
    let mut columns = Vec::with_capacity(unknowns.keys.len());
    for (i, alpha, m) in &unknowns.keys {
        let p = prolonged[&(*i, alpha.clone())].mul_monomial_left(m);
        let mut col = SparseVec::new();
        for (mono, c) in p.terms() {
            let next = rows.len();
            let r = *rows.entry(mono.clone()).or_insert(next);
            col.insert(r, c.clone());
        }
        columns.push(col);
    }
    let system = Matrix::from_columns(rows.len(), &columns);

    let mut known = IncrementalSpan::new();
    let keys: Vec<(usize, MultiIndex)> = prolonged.keys().cloned().collect();
    for (x, (i, a)) in keys.iter().enumerate() {
        for (j, b) in &keys[x + 1..] {
            let fa = &prolonged[&(*i, a.clone())];
            let fb = &prolonged[&(*j, b.clone())];
            for m in &monomials {
                let rel = [
                    (*i, a.clone(), fb.mul_monomial_left(m)),
                    (*j, b.clone(), -&fa.mul_monomial_left(m)),
                ];
                if let Some(v) = unknowns.vector_of(&rel) {
                    known.insert(&v);
                }
            }
        }
    }

    let mut out = Vec::new();
    for o in 0..=order_cap {
        for e in 0..=coeff_deg_cap {
            let block: Vec<usize> = (0..unknowns.keys.len())
                .filter(|&c| {
                    let (_, alpha, m) = &unknowns.keys[c];
                    alpha.order() <= o && m.weighted_degree(&reg) <= e
                })
                .collect();
            let sub = Matrix::from_columns(
                system.nrows(),
                &block.iter().map(|&c| system.column(c)).collect::<Vec<_>>(),
            );
            for kv in kernel(&sub) {
                let v: SparseVec = kv.iter().map(|(&k, c)| (block[k], c.clone())).collect();
                if !known.insert(&v) {
                    continue;
                }
                let op = unknowns.operator(eqs, &normalized(&v));
                absorb(ctx, &unknowns, &monomials, &op, order_cap, &mut known)?;
                out.push(op);
            }
        }
    }
    for op in &out {
        if !op.apply(sys)?.is_zero() {
            return Err(Error::Invariant("Noether relation failed to verify".into()));
        }
    }
    Ok(out)
}

fn normalized(v: &SparseVec) -> SparseVec {
    let lead = v.values().next().cloned().unwrap_or_else(Rational::one);
    v.iter().map(|(&k, c)| (k, c / &lead)).collect()
}

/// Add polynomial multiples and total derivatives of `op` (as far as they
/// fit the caps) to the span of known relations.
fn absorb(
    ctx: &JetContext,
    unknowns: &Unknowns,
    monomials: &[Monomial],
    op: &NoetherOperator,
    order_cap: u32,
    known: &mut IncrementalSpan,
) -> Result<()> {
    let mut frontier = vec![op.clone()];
    let mut seen = vec![op.clone()];
    while let Some(cur) = frontier.pop() {
        for m in monomials {
            if let Some(v) = unknowns.vector_of(&parts(&cur, Some(m))) {
                known.insert(&v);
            }
        }
        for k in 0..ctx.base_dim() {
            let Some(next) = derive(ctx, &cur, k, order_cap)? else {
                continue;
            };
            if let Some(v) = unknowns.vector_of(&parts(&next, None)) {
                if known.insert(&v) && !seen.contains(&next) {
                    seen.push(next.clone());
                    frontier.push(next);
                }
            }
        }
    }
    Ok(())
}

fn parts(op: &NoetherOperator, m: Option<&Monomial>) -> Vec<(usize, MultiIndex, Poly)> {
    let mut out = Vec::new();
    for (i, coeffs) in op.coefficients.iter().enumerate() {
        for (alpha, g) in coeffs {
            let g = match m {
                Some(m) => g.mul_monomial_left(m),
                None => g.clone(),
            };
            out.push((i, alpha.clone(), g));
        }
    }
    out
}

/// `D_k` of a relation: `sum (D_k g) D^alpha F + g D^{alpha + e_k} F`.
fn derive(ctx: &JetContext, op: &NoetherOperator, k: usize, order_cap: u32) -> Result<Option<NoetherOperator>> {
    let mut coefficients = vec![BTreeMap::<MultiIndex, Poly>::new(); op.coefficients.len()];
    for (i, coeffs) in op.coefficients.iter().enumerate() {
        for (alpha, g) in coeffs {
            let dg = match ctx.total_derivative(g, k) {
                Ok(p) => p,
                Err(Error::CapOverflow { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            let up = alpha.plus_unit(k);
            if up.order() > order_cap {
                return Ok(None);
            }
            let slot = coefficients[i].entry(alpha.clone()).or_default();
            *slot = &*slot + &dg;
            let slot = coefficients[i].entry(up).or_default();
            *slot = &*slot + g;
        }
    }
    Ok(Some(NoetherOperator::new(coefficients)))
}
