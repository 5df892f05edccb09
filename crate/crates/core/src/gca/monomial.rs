use std::cmp::Ordering;

use super::registry::{Gen, GenId, Registry};

/// A sign-normalized graded-commutative monomial.
///
/// Factors are sorted strictly ascending by generator id and odd generators
/// never carry an exponent above one.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    factors: Vec<(Gen, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn gen(g: Gen) -> Self {
        Monomial { factors: vec![(g, 1)] }
    }

    /// `g^e`; `None` when `g` is odd and `e > 1`.
    pub fn power(g: Gen, e: u32) -> Option<Self> {
        if e == 0 {
            return Some(Monomial::one());
        }
        if g.is_odd() && e > 1 {
            return None;
        }
        Some(Monomial { factors: vec![(g, e)] })
    }

    /// Trusts the caller that `factors` is sorted, duplicate free and
    /// respects the odd-exponent rule.
    pub(crate) fn from_sorted(factors: Vec<(Gen, u32)>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0.id < w[1].0.id));
        debug_assert!(factors.iter().all(|(g, e)| *e >= 1 && (!g.is_odd() || *e == 1)));
        Monomial { factors }
    }

    pub fn factors(&self) -> &[(Gen, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn hdeg(&self) -> u32 {
        self.factors.iter().map(|(g, e)| g.hdeg * e).sum()
    }

    /// Total exponent count.
    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(_, e)| e).sum()
    }

    pub fn weighted_degree(&self, reg: &Registry) -> u32 {
        self.factors.iter().map(|(g, e)| reg.weight(g.id) * e).sum()
    }

    pub fn jet_order(&self, reg: &Registry) -> u32 {
        self.factors.iter().map(|(g, _)| reg.jet_order(g.id)).max().unwrap_or(0)
    }

    pub fn exponent(&self, id: GenId) -> u32 {
        self.factors
            .iter()
            .find(|(g, _)| g.id == id)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn contains(&self, id: GenId) -> bool {
        self.exponent(id) > 0
    }

    pub fn gens(&self) -> impl Iterator<Item = Gen> + '_ {
        self.factors.iter().map(|(g, _)| *g)
    }

    /// Product with Koszul sign; `None` when the product vanishes because an
    /// odd generator would be squared.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, i8)> {
        // Moving every odd factor of `other` left past the larger odd factors
        // of `self` costs one sign each.
        let mut swaps = 0usize;
        let mut odd_left_above = self.factors.iter().filter(|(g, _)| g.is_odd()).count();
        let mut i = 0;
        let mut j = 0;
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        while i < self.factors.len() || j < other.factors.len() {
            let take_left = match (self.factors.get(i), other.factors.get(j)) {
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (Some((a, _)), Some((b, _))) => a.id.cmp(&b.id),
                (None, None) => unreachable!(),
            };
            match take_left {
                Ordering::Less => {
                    let (g, e) = self.factors[i];
                    if g.is_odd() {
                        odd_left_above -= 1;
                    }
                    out.push((g, e));
                    i += 1;
                }
                Ordering::Greater => {
                    let (g, e) = other.factors[j];
                    if g.is_odd() {
                        swaps += odd_left_above;
                    }
                    out.push((g, e));
                    j += 1;
                }
                Ordering::Equal => {
                    let (g, e1) = self.factors[i];
                    let (_, e2) = other.factors[j];
                    if g.is_odd() {
                        return None;
                    }
                    out.push((g, e1 + e2));
                    i += 1;
                    j += 1;
                }
            }
        }
        let sign = if swaps.is_multiple_of(2) { 1 } else { -1 };
        Some((Monomial { factors: out }, sign))
    }

    /// Split off one copy of the factor at `pos`: returns
    /// `(prefix, rest)` with `self = prefix * g * rest` as an ordered word.
    pub(crate) fn split_at_factor(&self, pos: usize) -> (Monomial, Gen, Monomial) {
        let prefix = Monomial {
            factors: self.factors[..pos].to_vec(),
        };
        let (g, e) = self.factors[pos];
        let mut rest = Vec::with_capacity(self.factors.len() - pos);
        if e > 1 {
            rest.push((g, e - 1));
        }
        rest.extend_from_slice(&self.factors[pos + 1..]);
        (prefix, g, Monomial { factors: rest })
    }

    pub fn display(&self, reg: &Registry) -> String {
        if self.factors.is_empty() {
            return "1".to_string();
        }
        self.factors
            .iter()
            .map(|(g, e)| {
                let name = reg.name(g.id);
                if *e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gca::{GenKind, GenSpec};

    #[test]
    fn odd_product_sign_and_vanishing() {
        let reg = Registry::new();
        let a = reg.register(GenSpec::new("a", 1, GenKind::TateGen)).unwrap();
        let b = reg.register(GenSpec::new("b", 1, GenKind::TateGen)).unwrap();
        let (m, s) = Monomial::gen(b).mul(&Monomial::gen(a)).unwrap();
        assert_eq!(s, -1);
        assert_eq!(m.factors(), &[(a, 1), (b, 1)]);
        assert!(Monomial::gen(a).mul(&Monomial::gen(a)).is_none());
    }

    #[test]
    fn even_factors_merge() {
        let reg = Registry::new();
        let x = reg.register(GenSpec::new("x", 0, GenKind::BaseCoord)).unwrap();
        let a = reg.register(GenSpec::new("a", 1, GenKind::TateGen)).unwrap();
        let (m, s) = Monomial::gen(a).mul(&Monomial::power(x, 2).unwrap()).unwrap();
        assert_eq!(s, 1);
        assert_eq!(m.display(&reg), "x^2*a");
        assert_eq!(m.hdeg(), 1);
        assert_eq!(m.degree(), 3);
    }
}
