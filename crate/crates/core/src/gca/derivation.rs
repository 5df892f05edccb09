use std::collections::BTreeMap;

use num_traits::One;

use crate::error::{Error, Result};

use super::poly::{rat, Poly, Rational};
use super::registry::{Gen, GenId, Registry};

/// What to do with a generator that has no rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Missing {
    /// Treat the generator as killed: its image is 0.
    Kill,
    /// Refuse to apply the derivation.
    Reject,
}

/// A graded derivation given by its values on generators.
///
/// `parity` is the degree shift: -1 for differentials, 0 for total
/// derivatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    parity: i32,
    mode: Missing,
    rules: BTreeMap<GenId, Poly>,
}

impl Derivation {
    pub fn new(parity: i32, mode: Missing) -> Self {
        Derivation {
            parity,
            mode,
            rules: BTreeMap::new(),
        }
    }

    pub fn parity(&self) -> i32 {
        self.parity
    }

    pub fn mode(&self) -> Missing {
        self.mode
    }

    /// Register `g -> image`, checking the degree of the image.
    pub fn set(&mut self, reg: &Registry, g: Gen, image: Poly) -> Result<()> {
        check_rule_degree(reg, g, &image, self.parity)?;
        if image.is_zero() {
            self.rules.insert(g.id, Poly::zero());
        } else {
            self.rules.insert(g.id, image);
        }
        Ok(())
    }

    pub fn rule(&self, id: GenId) -> Option<&Poly> {
        self.rules.get(&id)
    }

    pub fn rules(&self) -> &BTreeMap<GenId, Poly> {
        &self.rules
    }

    pub fn apply(&self, p: &Poly) -> Result<Poly> {
        apply_derivation_with(p, self.parity, |g| match self.rules.get(&g.id) {
            Some(r) => Ok(r.clone()),
            None => match self.mode {
                Missing::Kill => Ok(Poly::zero()),
                Missing::Reject => Err(Error::ForeignGenerator(format!("{}", g.id))),
            },
        })
    }
}

pub(crate) fn check_rule_degree(reg: &Registry, g: Gen, image: &Poly, parity: i32) -> Result<()> {
    if image.is_zero() {
        return Ok(());
    }
    let expected = g.hdeg as i64 + parity as i64;
    match image.hdeg() {
        Some(d) if d as i64 == expected => Ok(()),
        Some(d) => Err(Error::DegreeMismatch {
            context: format!("image of `{}`", reg.name(g.id)),
            expected,
            found: d as i64,
        }),
        None => Err(Error::NotHomogeneous(image.display(reg))),
    }
}

/// Apply the derivation determined by `image_of` on generators.
///
/// On a monomial `g1^e1 ... gk^ek` the result is the graded Leibniz
/// expansion: the derivation passes the prefix with sign
/// `(-1)^(parity * hdeg(prefix))`.
pub fn apply_derivation_with<F>(p: &Poly, parity: i32, mut image_of: F) -> Result<Poly>
where
    F: FnMut(Gen) -> Result<Poly>,
{
    let mut cache: BTreeMap<GenId, Poly> = BTreeMap::new();
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        for pos in 0..m.factors().len() {
            let (prefix, g, rest) = m.split_at_factor(pos);
            let e = m.factors()[pos].1;
            let dg = match cache.get(&g.id) {
                Some(r) => r.clone(),
                None => {
                    let r = image_of(g)?;
                    cache.insert(g.id, r.clone());
                    r
                }
            };
            if dg.is_zero() {
                continue;
            }
            let odd_pass = (parity.rem_euclid(2) == 1) && prefix.hdeg() % 2 == 1;
            let mut coeff = c * rat(e as i64);
            if odd_pass {
                coeff = -coeff;
            }
            let left = dg.mul_monomial_left(&prefix);
            out.add_scaled(&left.mul_monomial(&rest, &Rational::one()), &coeff);
        }
    }
    Ok(out)
}
