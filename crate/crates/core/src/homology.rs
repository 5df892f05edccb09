//! Exact homology in finite truncation windows.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use crate::dga::{DGAlgebra, DGMorphism};
use crate::error::{Error, Result};
use crate::gca::{Gen, Monomial, Poly, Registry};
use crate::linalg::{kernel, rank, rref, solve, IncrementalSpan, Matrix, SparseVec};

/// A finite truncation region: homological degrees `0..=hdeg_max`,
/// weighted polynomial degree at most `poly_deg_cap`, and only generators of
/// jet order at most `jet_cap`.
///
/// Every generator carries a weight (1 unless its differential forces
/// more); the polynomial degree of a monomial is the weighted exponent sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub hdeg_max: u32,
    pub poly_deg_cap: u32,
    pub jet_cap: u32,
}

impl Window {
    pub fn new(hdeg_max: u32, poly_deg_cap: u32, jet_cap: u32) -> Self {
        Window {
            hdeg_max,
            poly_deg_cap,
            jet_cap,
        }
    }

    fn admits_gen(&self, reg: &Registry, g: Gen) -> bool {
        reg.jet_order(g.id) <= self.jet_cap && reg.weight(g.id) <= self.poly_deg_cap
    }

    pub fn admits(&self, reg: &Registry, m: &Monomial) -> bool {
        m.weighted_degree(reg) <= self.poly_deg_cap && m.gens().all(|g| self.admits_gen(reg, g))
    }
}

/// Enumeration order of a window basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisOrder {
    Canonical,
    Reversed,
}

/// Ordered monomial basis of one graded piece, with a reverse index.
#[derive(Debug, Clone)]
pub struct Basis {
    monomials: Vec<Monomial>,
    index: BTreeMap<Monomial, usize>,
}

impl Basis {
    fn new(monomials: Vec<Monomial>) -> Self {
        let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        Basis { monomials, index }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Coordinates of an already reduced polynomial.
    pub fn coords(&self, reg: &Registry, p: &Poly) -> Result<SparseVec> {
        let mut v = SparseVec::new();
        for (m, c) in p.terms() {
            let i = self.position(m).ok_or_else(|| Error::OutsideWindow(m.display(reg)))?;
            v.insert(i, c.clone());
        }
        Ok(v)
    }

    pub fn poly(&self, v: &SparseVec) -> Poly {
        Poly::from_terms(v.iter().map(|(&i, c)| (self.monomials[i].clone(), c.clone())))
    }

    /// Column order placing heavy monomials first; used to select
    /// representatives of lowest weight.
    fn heavy_first(&self, reg: &Registry) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| {
            let m = &self.monomials[i];
            (Reverse(m.weighted_degree(reg)), Reverse(m.clone()))
        });
        order
    }
}

fn enumerate(
    gens: &[Gen],
    reg: &Registry,
    idx: usize,
    hdeg_left: u32,
    wdeg_left: u32,
    current: &mut Vec<(Gen, u32)>,
    out: &mut Vec<Monomial>,
) {
    if idx == gens.len() {
        if hdeg_left == 0 {
            out.push(Monomial::from_sorted(current.clone()));
        }
        return;
    }
    let g = gens[idx];
    let w = reg.weight(g.id);
    enumerate(gens, reg, idx + 1, hdeg_left, wdeg_left, current, out);
    let max_e = if g.is_odd() { 1 } else { u32::MAX };
    let mut e = 1;
    while e <= max_e && w * e <= wdeg_left && g.hdeg * e <= hdeg_left {
        current.push((g, e));
        enumerate(
            gens,
            reg,
            idx + 1,
            hdeg_left - g.hdeg * e,
            wdeg_left - w * e,
            current,
            out,
        );
        current.pop();
        e += 1;
    }
}

/// Monomials of homological degree `n` in the window over an arbitrary
/// generator set, in canonical order: by weighted degree, then by monomial.
pub fn window_monomials(reg: &Registry, gens: &[Gen], n: u32, w: &Window) -> Vec<Monomial> {
    let mut eligible: Vec<Gen> = gens
        .iter()
        .copied()
        .filter(|g| w.admits_gen(reg, *g) && g.hdeg <= n)
        .collect();
    eligible.sort();
    eligible.dedup();
    let mut out = Vec::new();
    enumerate(&eligible, reg, 0, n, w.poly_deg_cap, &mut Vec::new(), &mut out);
    out.sort_by_cached_key(|m| (m.weighted_degree(reg), m.clone()));
    out
}

/// A generator whose differential leaves the window, if any.
pub fn closure_witness(a: &DGAlgebra, w: &Window) -> Option<String> {
    let reg = a.registry();
    for g in a.gens() {
        if g.hdeg > w.hdeg_max + 1 || !w.admits_gen(reg, *g) {
            continue;
        }
        let wg = reg.weight(g.id);
        for (m, _) in a.diff_of(g.id).terms() {
            if m.weighted_degree(reg) > wg || m.gens().any(|h| !w.admits_gen(reg, h)) {
                return Some(reg.name(g.id));
            }
        }
    }
    None
}

pub fn monomial_basis(a: &DGAlgebra, n: u32, w: &Window) -> Result<Vec<Monomial>> {
    Ok(basis(a, n, w, BasisOrder::Canonical)?.monomials)
}

pub fn basis(a: &DGAlgebra, n: u32, w: &Window, order: BasisOrder) -> Result<Basis> {
    if let Some(witness) = closure_witness(a, w) {
        return Err(Error::WindowNotClosed { witness });
    }
    let reg = a.registry();
    let mut mons = match a.relations() {
        Some(rel) => {
            if n == 0 {
                rel.standard_monomials()
                    .iter()
                    .filter(|m| w.admits(reg, m))
                    .cloned()
                    .collect()
            } else {
                Vec::new()
            }
        }
        None => window_monomials(reg, a.gens(), n, w),
    };
    if order == BasisOrder::Reversed {
        mons.reverse();
    }
    Ok(Basis::new(mons))
}

/// Expand a polynomial of `a` in the window basis, reducing first.
pub fn coordinates(a: &DGAlgebra, b: &Basis, p: &Poly) -> Result<SparseVec> {
    let r = a.reduce(p)?;
    b.coords(a.registry(), &r)
}

fn matrix_between(a: &DGAlgebra, src: &Basis, dst: &Basis) -> Result<Matrix> {
    let reg = a.registry();
    let mut cols = Vec::with_capacity(src.len());
    for m in src.monomials() {
        let dm = a.reduce(&a.d(&Poly::term(m.clone(), num_traits::One::one()))?)?;
        let col = dst.coords(reg, &dm).map_err(|_| Error::WindowNotClosed {
            witness: m.display(reg),
        })?;
        cols.push(col);
    }
    Ok(Matrix::from_columns(dst.len(), &cols))
}

/// Matrix of `d: C_n -> C_{n-1}` in the window bases (rows `n-1`, columns
/// `n`).
pub fn boundary_matrix(a: &DGAlgebra, n: u32, w: &Window) -> Result<Matrix> {
    boundary_matrix_ordered(a, n, w, BasisOrder::Canonical)
}

pub fn boundary_matrix_ordered(a: &DGAlgebra, n: u32, w: &Window, order: BasisOrder) -> Result<Matrix> {
    let src = basis(a, n, w, order)?;
    if n == 0 {
        return Ok(Matrix::zeros(0, src.len()));
    }
    let dst = basis(a, n - 1, w, order)?;
    matrix_between(a, &src, &dst)
}

/// Homology of one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeHomology {
    pub degree: u32,
    pub chain_dim: usize,
    pub cycle_dim: usize,
    pub boundary_dim: usize,
    pub rank: usize,
    pub representatives: Vec<Poly>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyReport {
    pub window: Window,
    pub degrees: Vec<DegreeHomology>,
}

impl HomologyReport {
    pub fn ranks(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.rank).collect()
    }

    pub fn rank(&self, n: u32) -> Option<usize> {
        self.degrees.iter().find(|d| d.degree == n).map(|d| d.rank)
    }
}

/// Rows of the reduced echelon form of `vectors` with heavy monomials
/// pivoting first, sorted by weight ascending.
fn light_first(reg: &Registry, b: &Basis, vectors: &[SparseVec]) -> Vec<(u32, SparseVec)> {
    let order = b.heavy_first(reg);
    let pos: BTreeMap<usize, usize> = order.iter().enumerate().map(|(p, &c)| (c, p)).collect();
    let mut rows: Vec<(u32, usize, SparseVec)> = rref(b.len(), vectors, Some(&order))
        .into_iter()
        .map(|(pivot, row)| {
            let weight = b.monomials()[pivot].weighted_degree(reg);
            (weight, pos[&pivot], row)
        })
        .collect();
    rows.sort_by_key(|(w, p, _)| (*w, Reverse(*p)));
    rows.into_iter().map(|(w, _, r)| (w, r)).collect()
}

pub fn degree_homology(a: &DGAlgebra, n: u32, w: &Window) -> Result<DegreeHomology> {
    let reg = a.registry();
    let bn = basis(a, n, w, BasisOrder::Canonical)?;
    let dn = boundary_matrix(a, n, w)?;
    let dn1 = boundary_matrix(a, n + 1, w)?;
    let cycles = kernel(&dn);
    let mut span = IncrementalSpan::new();
    for col in dn1.columns() {
        span.insert(&col);
    }
    let boundary_dim = span.dim();
    let mut representatives = Vec::new();
    for (_, v) in light_first(reg, &bn, &cycles) {
        if span.insert(&v) {
            representatives.push(bn.poly(&v));
        }
    }
    Ok(DegreeHomology {
        degree: n,
        chain_dim: bn.len(),
        cycle_dim: cycles.len(),
        boundary_dim,
        rank: cycles.len() - boundary_dim,
        representatives,
    })
}

pub fn homology(a: &DGAlgebra, w: &Window) -> Result<HomologyReport> {
    let degrees = (0..=w.hdeg_max)
        .map(|n| degree_homology(a, n, w))
        .collect::<Result<Vec<_>>>()?;
    Ok(HomologyReport { window: *w, degrees })
}

pub fn homology_rank(a: &DGAlgebra, n: u32, w: &Window) -> Result<usize> {
    homology_rank_ordered(a, n, w, BasisOrder::Canonical)
}

/// `dim ker d_n - rank d_{n+1}` with the chosen basis enumeration.
pub fn homology_rank_ordered(a: &DGAlgebra, n: u32, w: &Window, order: BasisOrder) -> Result<usize> {
    let dn = boundary_matrix_ordered(a, n, w, order)?;
    let dn1 = boundary_matrix_ordered(a, n + 1, w, order)?;
    let cycles = dn.ncols() - rank(&dn);
    Ok(cycles - rank(&dn1))
}

pub fn homology_representatives(a: &DGAlgebra, n: u32, w: &Window) -> Result<Vec<Poly>> {
    Ok(degree_homology(a, n, w)?.representatives)
}

/// A preimage of the cycle `z` inside the window, or `None` when `z` is not
/// a boundary of anything in the window.
pub fn is_boundary(a: &DGAlgebra, z: &Poly, w: &Window) -> Result<Option<Poly>> {
    let reg = a.registry();
    let z = a.reduce(z)?;
    let dz = a.d(&z)?;
    if !dz.is_zero() {
        return Err(Error::NotACycle {
            generator: z.display(reg),
            residual: dz.display(reg),
        });
    }
    if z.is_zero() {
        return Ok(Some(Poly::zero()));
    }
    let n = z.hdeg().ok_or_else(|| Error::NotHomogeneous(z.display(reg)))?;
    let bn = basis(a, n, w, BasisOrder::Canonical)?;
    let bn1 = basis(a, n + 1, w, BasisOrder::Canonical)?;
    let target = bn.coords(reg, &z)?;
    let d = matrix_between(a, &bn1, &bn)?;
    Ok(solve(&d, &target).map(|y| bn1.poly(&y)))
}

/// Matrix of a morphism between window bases.
pub fn morphism_matrix(q: &DGMorphism, src: &Basis, dst: &Basis) -> Result<Matrix> {
    let reg = q.source().registry();
    let mut cols = Vec::with_capacity(src.len());
    for m in src.monomials() {
        let image = q.apply(&Poly::term(m.clone(), num_traits::One::one()))?;
        cols.push(dst.coords(reg, &image)?);
    }
    Ok(Matrix::from_columns(dst.len(), &cols))
}

/// A critical pair: a cycle whose image is a boundary, with a chosen
/// preimage of that image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalPair {
    pub sigma: Poly,
    pub b: Poly,
    pub weight: u32,
}

/// Critical cycles of `sub` in degree `n`, up to boundaries of `ext`.
///
/// `sub` must be a subalgebra of `ext` (same differential on its
/// generators) and `q` is defined on `ext`. Returned lightest first.
pub fn critical_classes(
    sub: &DGAlgebra,
    ext: &DGAlgebra,
    q: &DGMorphism,
    n: u32,
    w: &Window,
) -> Result<Vec<CriticalPair>> {
    let reg = sub.registry();
    let b_alg = q.target();
    let src = basis(sub, n, w, BasisOrder::Canonical)?;
    let ext_n = basis(ext, n, w, BasisOrder::Canonical)?;
    let ext_n1 = basis(ext, n + 1, w, BasisOrder::Canonical)?;
    let tgt_n = basis(b_alg, n, w, BasisOrder::Canonical)?;
    let tgt_n1 = basis(b_alg, n + 1, w, BasisOrder::Canonical)?;

    let d_sub = if n == 0 {
        Matrix::zeros(0, src.len())
    } else {
        let below = basis(sub, n - 1, w, BasisOrder::Canonical)?;
        matrix_between(sub, &src, &below)?
    };
    let q_mat = morphism_matrix(q, &src, &tgt_n)?;
    let d_b = matrix_between(b_alg, &tgt_n1, &tgt_n)?;
    // rows annihilating the image of d_B: q(sigma) is a boundary iff these
    // vanish on it
    let annihilator = kernel(&d_b.transpose());
    let ann = Matrix::from_rows(tgt_n.len(), annihilator);
    let stacked = d_sub.vstack(&ann.mul(&q_mat));
    let critical = kernel(&stacked);

    let mut span = IncrementalSpan::new();
    for col in matrix_between(ext, &ext_n1, &ext_n)?.columns() {
        span.insert(&col);
    }
    let mut out = Vec::new();
    for (weight, v) in light_first(reg, &src, &critical) {
        let sigma = src.poly(&v);
        let in_ext = ext_n.coords(reg, &sigma)?;
        if !span.insert(&in_ext) {
            continue;
        }
        let image = q_mat.apply(&v);
        let b = solve(&d_b, &image).ok_or_else(|| Error::Invariant("critical cycle image is not a boundary".into()))?;
        out.push(CriticalPair {
            sigma,
            b: tgt_n1.poly(&b),
            weight,
        });
    }
    Ok(out)
}

/// Critical pairs of `q: A -> B` in degree `n`: classes `[sigma]` of `A`
/// with `q(sigma)` a boundary, each with one preimage `b`.
pub fn relative_critical_cycles(a: &DGAlgebra, q: &DGMorphism, n: u32, w: &Window) -> Result<Vec<(Poly, Poly)>> {
    Ok(critical_classes(a, a, q, n, w)?
        .into_iter()
        .map(|c| (c.sigma, c.b))
        .collect())
}

/// Classes of `H_n(B)` not hit by `H_n(q)`, lightest first, as cycle
/// representatives with their weights.
pub fn uncovered_classes(q: &DGMorphism, n: u32, w: &Window) -> Result<Vec<(Poly, u32)>> {
    let src_alg = q.source();
    let b_alg = q.target();
    let reg = b_alg.registry();
    let src = basis(src_alg, n, w, BasisOrder::Canonical)?;
    let tgt_n = basis(b_alg, n, w, BasisOrder::Canonical)?;
    let d_b_n = boundary_matrix(b_alg, n, w)?;
    let d_b_n1 = boundary_matrix(b_alg, n + 1, w)?;
    let d_src = boundary_matrix(src_alg, n, w)?;
    let q_mat = morphism_matrix(q, &src, &tgt_n)?;

    let mut span = IncrementalSpan::new();
    for col in d_b_n1.columns() {
        span.insert(&col);
    }
    for z in kernel(&d_src) {
        span.insert(&q_mat.apply(&z));
    }
    let mut out = Vec::new();
    for (weight, v) in light_first(reg, &tgt_n, &kernel(&d_b_n)) {
        if span.insert(&v) {
            out.push((tgt_n.poly(&v), weight));
        }
    }
    Ok(out)
}

/// Whether `H(q)` is an isomorphism in every degree of the window.
pub fn is_quasi_iso_in_window(q: &DGMorphism, w: &Window) -> Result<bool> {
    for n in 0..=w.hdeg_max {
        if !uncovered_classes(q, n, w)?.is_empty() {
            return Ok(false);
        }
        let a = q.source();
        if !critical_classes(a, a, q, n, w)?.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}
