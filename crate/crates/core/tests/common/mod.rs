#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use ktforge::dga::{DGAlgebra, DGMorphism, ExtendMode};
use ktforge::gca::{Gen, GenId, GenKind, GenSpec, Poly, Rational, Registry};
use ktforge::homology::{basis, boundary_matrix, BasisOrder, Window};
use ktforge::linalg::kernel;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn small_window() -> Window {
    Window::new(3, 2, 0)
}

fn coeff(rng: &mut ChaCha8Rng) -> Rational {
    let mut c = 0;
    while c == 0 {
        c = rng.random_range(-3i64..=3);
    }
    Rational::from_integer(c.into())
}

/// A random element of degree `n` spanned by window monomials.
pub fn random_element(rng: &mut ChaCha8Rng, a: &DGAlgebra, n: u32, w: &Window, terms: usize) -> Poly {
    let b = basis(a, n, w, BasisOrder::Canonical).expect("window closed");
    let mut p = Poly::zero();
    if b.is_empty() {
        return p;
    }
    for _ in 0..terms {
        let m = b.monomials()[rng.random_range(0..b.len())].clone();
        p.add_term(m, coeff(rng));
    }
    p
}

/// A random cycle of degree `n`: a combination of window cycles.
pub fn random_cycle(rng: &mut ChaCha8Rng, a: &DGAlgebra, n: u32, w: &Window) -> Poly {
    let b = basis(a, n, w, BasisOrder::Canonical).expect("window closed");
    let cycles = kernel(&boundary_matrix(a, n, w).expect("window closed"));
    let mut p = Poly::zero();
    if cycles.is_empty() {
        return p;
    }
    for _ in 0..rng.random_range(1..=2) {
        let v = &cycles[rng.random_range(0..cycles.len())];
        p.add_scaled(&b.poly(v), &coeff(rng));
    }
    p
}

/// Random finite algebra: one or two even generators in degree 0, then up
/// to two generators per degree up to `top` whose differentials are random
/// cycles.
pub fn random_algebra(rng: &mut ChaCha8Rng, reg: &Arc<Registry>, prefix: &str, top: u32) -> Arc<DGAlgebra> {
    let w = Window::new(top, 2, 0);
    let n0 = rng.random_range(1..=2);
    let gens: Vec<Gen> = (0..n0)
        .map(|i| {
            reg.register(GenSpec::new(format!("{prefix}{i}"), 0, GenKind::BaseCoord))
                .unwrap()
        })
        .collect();
    let mut alg = Arc::new(DGAlgebra::free(reg.clone(), &gens).unwrap());
    for deg in 1..=top {
        for j in 0..rng.random_range(0..=2) {
            let image = if rng.random_bool(0.25) {
                Poly::zero()
            } else {
                random_cycle(rng, &alg, deg - 1, &w)
            };
            let spec = GenSpec::new(
                format!("{prefix}{deg}{}", (b'a' + j as u8) as char),
                deg,
                GenKind::TateGen,
            );
            let (next, _) = alg.extend_differential(&[spec], &[image], ExtendMode::Staged).unwrap();
            alg = Arc::new(next);
        }
    }
    alg
}

pub struct Setup {
    pub reg: Arc<Registry>,
    pub a: Arc<DGAlgebra>,
    pub b: Arc<DGAlgebra>,
    pub phi: DGMorphism,
}

/// `phi: A -> B` with `B` random and `A` a polynomial ring on one or two
/// generators, sometimes with an odd generator `h`, `d h = a0`.
pub fn random_setup(rng: &mut ChaCha8Rng) -> Setup {
    let reg = Registry::new();
    let b = random_algebra(rng, &reg, "y", 2);
    let w = Window::new(2, 2, 0);
    let n0 = rng.random_range(1..=2);
    let mut images: Vec<Poly> = (0..n0).map(|_| random_element(rng, &b, 0, &w, 2)).collect();
    let pre = rng.random_bool(0.5).then(|| random_element(rng, &b, 1, &w, 1));
    if let Some(pre) = &pre {
        images[0] = b.d(pre).unwrap();
    }
    // source generators carry the weight of their images
    let weight = |p: &Poly| p.weighted_degree(&reg).max(1);
    let a_gens: Vec<Gen> = images
        .iter()
        .enumerate()
        .map(|(i, p)| {
            reg.register(GenSpec::new(format!("a{i}"), 0, GenKind::BaseCoord).weight(weight(p)))
                .unwrap()
        })
        .collect();
    let mut rule: BTreeMap<GenId, Poly> = a_gens.iter().map(|g| g.id).zip(images).collect();
    let mut a = Arc::new(DGAlgebra::free(reg.clone(), &a_gens).unwrap());
    if let Some(pre) = pre {
        let (next, h) = a
            .extend_differential(
                &[GenSpec::new("h", 1, GenKind::TateGen).weight(weight(&pre))],
                &[Poly::gen(a_gens[0])],
                ExtendMode::Staged,
            )
            .unwrap();
        a = Arc::new(next);
        rule.insert(h[0].id, pre);
    }
    let phi = DGMorphism::new(a.clone(), b.clone(), rule).unwrap();
    Setup { reg, a, b, phi }
}

/// Rank over the rationals by dense Gaussian elimination, independent of
/// the library's sparse elimination.
pub fn dense_rank(rows: usize, cols: usize, entries: &[(usize, usize, Rational)]) -> usize {
    let mut m = vec![vec![Rational::zero(); cols]; rows];
    for (r, c, v) in entries {
        m[*r][*c] += v;
    }
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = Rational::one() / &m[rank][col];
        for x in m[rank].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x -= &f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Number of exponent vectors in `nvars` variables of total degree at most
/// `cap` whose entries vanish on the `killed` positions.
pub fn count_monomials(nvars: usize, cap: u32, killed: &[usize]) -> usize {
    fn go(i: usize, nvars: usize, left: u32, killed: &[usize]) -> usize {
        if i == nvars {
            return 1;
        }
        if killed.contains(&i) {
            return go(i + 1, nvars, left, killed);
        }
        (0..=left).map(|e| go(i + 1, nvars, left - e, killed)).sum()
    }
    go(0, nvars, cap, killed)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub mod factor;
pub mod props;
