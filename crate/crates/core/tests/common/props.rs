//! Kernel invariants checked on one random instance each. Every check takes
//! a seed so that proptest and the acceptance runner share them.

use std::sync::Arc;

use ktforge::dga::DGAlgebra;
use ktforge::gca::{normalize_word, Gen, GenKind, GenSpec, Poly, Registry};
use ktforge::homology::{boundary_matrix_ordered, homology_rank_ordered, BasisOrder, Window};
use ktforge::jet::{JetContext, MultiIndex};
use ktforge::linalg::{rank, Matrix, SparseVec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dense_rank, int, random_algebra, random_element};

pub type Check = Result<(), String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sample(seed: u64) -> (ChaCha8Rng, Arc<DGAlgebra>, Window) {
    let mut r = rng(seed);
    let reg = Registry::new();
    let a = random_algebra(&mut r, &reg, "g", 3);
    (r, a, Window::new(3, 2, 0))
}

fn show(a: &DGAlgebra, p: &Poly) -> String {
    p.display(a.registry())
}

fn sign(n: u32) -> Poly {
    if n.is_multiple_of(2) {
        Poly::one()
    } else {
        Poly::int(-1)
    }
}

pub fn d_squared_zero(seed: u64) -> Check {
    let (mut r, a, w) = sample(seed);
    let n = r.random_range(0..=3);
    let p = random_element(&mut r, &a, n, &w, 3);
    let dd = a.d(&a.d(&p).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    if dd.is_zero() {
        Ok(())
    } else {
        Err(format!("d^2({}) = {}", show(&a, &p), show(&a, &dd)))
    }
}

pub fn leibniz(seed: u64) -> Check {
    let (mut r, a, w) = sample(seed);
    let (n, m) = (r.random_range(0..=2), r.random_range(0..=2));
    let p = random_element(&mut r, &a, n, &w, 2);
    let q = random_element(&mut r, &a, m, &w, 2);
    let d = |x: &Poly| a.d(x).map_err(|e| e.to_string());
    let lhs = d(&p.mul(&q))?;
    let rhs = &d(&p)?.mul(&q) + &sign(n).mul(&p.mul(&d(&q)?));
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!(
            "d({} * {}) = {} but rule gives {}",
            show(&a, &p),
            show(&a, &q),
            show(&a, &lhs),
            show(&a, &rhs)
        ))
    }
}

pub fn graded_commutative_associative(seed: u64) -> Check {
    let (mut r, a, w) = sample(seed);
    let degs: Vec<u32> = (0..3).map(|_| r.random_range(0..=2)).collect();
    let x: Vec<Poly> = degs.iter().map(|&n| random_element(&mut r, &a, n, &w, 2)).collect();
    let pq = x[0].mul(&x[1]);
    let qp = sign(degs[0] * degs[1]).mul(&x[1].mul(&x[0]));
    if pq != qp {
        return Err(format!(
            "{} * {} is not graded commutative",
            show(&a, &x[0]),
            show(&a, &x[1])
        ));
    }
    if pq.mul(&x[2]) != x[0].mul(&x[1].mul(&x[2])) {
        return Err("product is not associative".into());
    }
    Ok(())
}

/// Sign of sorting a word by adjacent transpositions, computed by bubble
/// sort; 0 when an odd generator repeats.
fn bubble_sign(word: &[Gen]) -> i8 {
    let mut w = word.to_vec();
    let mut s = 1i8;
    for i in 0..w.len() {
        for j in 0..w.len() - 1 - i {
            if w[j] == w[j + 1] && w[j].is_odd() {
                return 0;
            }
            if w[j].id > w[j + 1].id {
                if w[j].is_odd() && w[j + 1].is_odd() {
                    s = -s;
                }
                w.swap(j, j + 1);
            }
        }
    }
    if w.windows(2).any(|p| p[0] == p[1] && p[0].is_odd()) {
        return 0;
    }
    s
}

pub fn koszul_sign(seed: u64) -> Check {
    let mut r = rng(seed);
    let reg = Registry::new();
    let gens: Vec<Gen> = (0..5)
        .map(|i| {
            reg.register(GenSpec::new(format!("e{i}"), r.random_range(0..=3), GenKind::TateGen))
                .unwrap()
        })
        .collect();
    let len = r.random_range(0..=6);
    let word: Vec<Gen> = (0..len).map(|_| gens[r.random_range(0..gens.len())]).collect();
    let (mono, s) = normalize_word(&word);
    let oracle = bubble_sign(&word);
    if s != oracle {
        return Err(format!(
            "word {:?}: sign {s}, oracle {oracle}",
            word.iter().map(|g| reg.name(g.id)).collect::<Vec<_>>()
        ));
    }
    // the same word multiplied out one letter at a time
    let mut acc = Poly::one();
    for g in &word {
        acc = acc.mul(&Poly::gen(*g));
    }
    let expected = if s == 0 {
        Poly::zero()
    } else {
        Poly::term(mono, int(s as i64))
    };
    if acc != expected {
        return Err("letter-by-letter product disagrees with the sorted word".into());
    }
    // splitting the word anywhere and multiplying the halves
    if len > 0 {
        let cut = r.random_range(0..len);
        let (l, ls) = normalize_word(&word[..cut]);
        let (rr, rs) = normalize_word(&word[cut..]);
        let got = match l.mul(&rr) {
            Some((_, ms)) if ls != 0 && rs != 0 => ls * rs * ms,
            _ => 0,
        };
        if got != s {
            return Err(format!("split product sign {got}, whole-word sign {s}"));
        }
    }
    Ok(())
}

fn random_jet_poly(r: &mut ChaCha8Rng, ctx: &JetContext, max_order: u32) -> Poly {
    let mut vars = ctx.coords().to_vec();
    for j in 0..ctx.fiber_rank() {
        for a in MultiIndex::all_up_to(ctx.base_dim(), max_order) {
            vars.push(ctx.var(j, &a).unwrap());
        }
    }
    let mut p = Poly::zero();
    for _ in 0..r.random_range(1..=4) {
        let mut t = Poly::int(r.random_range(1..=5) * if r.random_bool(0.5) { 1 } else { -1 });
        for _ in 0..r.random_range(0..=3) {
            t = t.mul(&Poly::gen(vars[r.random_range(0..vars.len())]));
        }
        p = &p + &t;
    }
    p
}

pub fn total_derivatives_commute(seed: u64) -> Check {
    let mut r = rng(seed);
    let base_dim = r.random_range(1..=3);
    let ctx = JetContext::new(Registry::new(), base_dim, r.random_range(1..=2), 4, false).map_err(|e| e.to_string())?;
    let p = random_jet_poly(&mut r, &ctx, 2);
    let q = random_jet_poly(&mut r, &ctx, 2);
    let (i, j) = (r.random_range(0..base_dim), r.random_range(0..base_dim));
    let d = |x: &Poly, k| ctx.total_derivative(x, k).map_err(|e| e.to_string());
    let ij = d(&d(&p, j)?, i)?;
    let ji = d(&d(&p, i)?, j)?;
    if ij != ji {
        return Err(format!(
            "D{}D{} != D{}D{} on {}",
            i + 1,
            j + 1,
            j + 1,
            i + 1,
            p.display(ctx.registry())
        ));
    }
    let lhs = d(&p.mul(&q), i)?;
    let rhs = &d(&p, i)?.mul(&q) + &p.mul(&d(&q, i)?);
    if lhs != rhs {
        return Err("total derivative is not a derivation".into());
    }
    Ok(())
}

pub fn rank_matches_dense(seed: u64) -> Check {
    let mut r = rng(seed);
    let (rows, cols) = (r.random_range(1..=7), r.random_range(1..=7));
    let mut triplets = Vec::new();
    let mut sparse: Vec<SparseVec> = vec![SparseVec::new(); rows];
    for (i, row) in sparse.iter_mut().enumerate() {
        for j in 0..cols {
            if r.random_bool(0.4) {
                let v = int(r.random_range(-3..=3));
                if v != int(0) {
                    row.insert(j, v.clone());
                    triplets.push((i, j, v));
                }
            }
        }
    }
    // make dependencies likely
    if rows > 1 && r.random_bool(0.5) {
        let (a, b) = (r.random_range(0..rows), r.random_range(0..rows));
        let c = int(r.random_range(1..=3));
        let src = sparse[a].clone();
        for (j, v) in src {
            let e = sparse[b].entry(j).or_insert_with(|| int(0));
            *e += &c * &v;
        }
        sparse[b].retain(|_, v| *v != int(0));
        triplets = sparse
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(j, v)| (i, *j, v.clone())))
            .collect();
    }
    let m = Matrix::from_rows(cols, sparse);
    let got = rank(&m);
    let oracle = dense_rank(rows, cols, &triplets);
    if got != oracle {
        return Err(format!("rank {got}, dense oracle {oracle}"));
    }
    Ok(())
}

pub fn homology_independent_of_basis_order(seed: u64) -> Check {
    let (mut r, a, w) = sample(seed);
    let n = r.random_range(0..=2);
    let fwd = homology_rank_ordered(&a, n, &w, BasisOrder::Canonical).map_err(|e| e.to_string())?;
    let rev = homology_rank_ordered(&a, n, &w, BasisOrder::Reversed).map_err(|e| e.to_string())?;
    let dense = |k: u32| -> Result<(usize, usize), String> {
        let m = boundary_matrix_ordered(&a, k, &w, BasisOrder::Canonical).map_err(|e| e.to_string())?;
        let t: Vec<_> = (0..m.nrows())
            .flat_map(|i| m.row(i).iter().map(move |(j, v)| (i, *j, v.clone())))
            .collect();
        Ok((m.ncols(), dense_rank(m.nrows(), m.ncols(), &t)))
    };
    let (chains, rk_n) = dense(n)?;
    let (_, rk_up) = dense(n + 1)?;
    let oracle = chains - rk_n - rk_up;
    if fwd != rev || fwd != oracle {
        return Err(format!("H{n}: canonical {fwd}, reversed {rev}, dense oracle {oracle}"));
    }
    Ok(())
}
