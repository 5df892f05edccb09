use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gca::{GenId, Monomial, Poly, Rational, Registry};
use crate::linalg::{rref, SparseVec};

/// A windowed quotient: the span of finitely many relations inside a finite
/// set of admissible monomials.
///
/// The span is put in reduced echelon form with heavy monomials (by weighted
/// degree, then jet order) pivoting first, so normal forms trade each
/// leading monomial for lighter ones. The monomials that are never pivots
/// form the basis of the quotient window.
#[derive(Debug, Clone)]
pub struct Relations {
    registry: Arc<Registry>,
    monomials: Vec<Monomial>,
    index: BTreeMap<Monomial, usize>,
    rewrite: BTreeMap<Monomial, Poly>,
    standard: Vec<Monomial>,
    ideal_dim: usize,
}

impl Relations {
    /// `monomials` lists the admissible monomials; every relation must be
    /// supported on them.
    pub fn from_span(reg: &Arc<Registry>, monomials: Vec<Monomial>, span: &[Poly]) -> Result<Self> {
        let mut monomials = monomials;
        monomials.sort_by_cached_key(|m| (m.weighted_degree(reg), m.clone()));
        monomials.dedup();
        let index: BTreeMap<Monomial, usize> = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let mut rows = Vec::with_capacity(span.len());
        for p in span {
            let mut v = SparseVec::new();
            for (m, c) in p.terms() {
                let i = *index.get(m).ok_or_else(|| Error::OutsideWindow(m.display(reg)))?;
                v.insert(i, c.clone());
            }
            rows.push(v);
        }
        let mut order: Vec<usize> = (0..monomials.len()).collect();
        order.sort_by_key(|&i| {
            let m = &monomials[i];
            (
                Reverse(m.weighted_degree(reg)),
                Reverse(m.jet_order(reg)),
                Reverse(m.clone()),
            )
        });
        let reduced = rref(monomials.len(), &rows, Some(&order));
        let mut rewrite = BTreeMap::new();
        for (pivot, row) in &reduced {
            let mut nf = Poly::zero();
            for (&j, c) in row {
                if j != *pivot {
                    nf.add_term(monomials[j].clone(), -c.clone());
                }
            }
            rewrite.insert(monomials[*pivot].clone(), nf);
        }
        let standard = monomials
            .iter()
            .filter(|m| !rewrite.contains_key(*m))
            .cloned()
            .collect();
        Ok(Relations {
            registry: reg.clone(),
            ideal_dim: reduced.len(),
            monomials,
            index,
            rewrite,
            standard,
        })
    }

    /// Admissible monomials, by weighted degree and then canonically.
    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// Basis of the quotient window, in the order of [`Relations::monomials`].
    pub fn standard_monomials(&self) -> &[Monomial] {
        &self.standard
    }

    /// Dimension of the windowed ideal.
    pub fn ideal_dim(&self) -> usize {
        self.ideal_dim
    }

    pub fn quotient_dim(&self) -> usize {
        self.standard.len()
    }

    pub fn contains_monomial(&self, m: &Monomial) -> bool {
        self.index.contains_key(m)
    }

    pub fn gen_ids(&self) -> BTreeSet<GenId> {
        self.monomials.iter().flat_map(|m| m.gens().map(|g| g.id)).collect()
    }

    pub fn normal_form(&self, p: &Poly) -> Result<Poly> {
        let mut out = Poly::zero();
        for (m, c) in p.terms() {
            if !self.index.contains_key(m) {
                return Err(Error::OutsideWindow(m.display(&self.registry)));
            }
            match self.rewrite.get(m) {
                Some(nf) => out.add_scaled(nf, c),
                None => out.add_term(m.clone(), c.clone()),
            }
        }
        Ok(out)
    }

    pub fn is_zero_mod(&self, p: &Poly) -> Result<bool> {
        Ok(self.normal_form(p)?.is_zero())
    }

    /// Coordinates of the normal form in the standard basis.
    pub fn coordinates(&self, p: &Poly) -> Result<Vec<Rational>> {
        let nf = self.normal_form(p)?;
        Ok(self.standard.iter().map(|m| nf.coeff(m)).collect())
    }
}

impl PartialEq for Relations {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.registry, &other.registry)
            && self.monomials == other.monomials
            && self.rewrite == other.rewrite
    }
}

impl Eq for Relations {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gca::{GenKind, GenSpec};

    #[test]
    fn quotient_by_a_variable() {
        let reg = Registry::new();
        let x = reg.register(GenSpec::new("x", 0, GenKind::BaseCoord)).unwrap();
        let y = reg.register(GenSpec::new("y", 0, GenKind::BaseCoord)).unwrap();
        let mons = vec![Monomial::one(), Monomial::gen(x), Monomial::gen(y)];
        let rel = Relations::from_span(&reg, mons, &[&Poly::gen(y) - &Poly::gen(x)]).unwrap();
        assert_eq!(rel.quotient_dim(), 2);
        assert_eq!(rel.normal_form(&Poly::gen(y)).unwrap(), Poly::gen(x));
        assert!(rel.normal_form(&Poly::gen(x).pow(2)).is_err());
    }
}
