//! One random instance each of the factorization, functoriality and
//! fibrant-replacement checks.

use std::collections::BTreeMap;
use std::sync::Arc;

use ktforge::dga::{check_structure, DGAlgebra, DGMorphism, ExtendMode};
use ktforge::factorize::{
    build_stage0, build_trivcof_fib, check_stage_restriction, fibrant_replacement, fibrant_replacement_of_morphism,
    omega, resolve_engine, Factorization,
};
use ktforge::gca::{GenKind, GenSpec, Poly};
use ktforge::homology::Window;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::props::Check;
use super::{random_algebra, random_cycle, random_element, random_setup, Setup};

pub const WINDOW: Window = Window {
    hdeg_max: 2,
    poly_deg_cap: 2,
    jet_cap: 0,
};

fn e(err: ktforge::Error) -> String {
    err.to_string()
}

/// Surjectivity witnesses, `q . j = phi`, `p . i = phi`, stage restriction
/// and the structural flags of `i` and `j` on one random `phi: A -> B`.
pub fn factorization_case(seed: u64) -> Check {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let Setup { reg, b, phi, .. } = random_setup(&mut r);
    let w = WINDOW;

    let tcf = build_trivcof_fib(phi.clone());
    let staged = build_stage0(phi.clone());
    let mut samples = Vec::new();
    for n in 1..=w.hdeg_max {
        for _ in 0..3 {
            let x = random_element(&mut r, &b, n, &w, 2);
            tcf.disc(n, &x).map_err(e)?;
            staged.disc_top(n, &x).map_err(e)?;
            samples.push((n, x));
        }
    }
    let (i, mid, p) = tcf.snapshot().map_err(e)?;
    let resolution = resolve_engine(staged.clone(), &w, 2).map_err(e)?;
    let top = resolution.stage.k;

    // (a) every sampled element is hit by its disc generator
    for (n, x) in &samples {
        let via_p = p.apply(&Poly::gen(tcf.disc(*n, x).map_err(e)?)).map_err(e)?;
        let s = staged.stage(top).map_err(e)?;
        let via_q = s.q.apply(&Poly::gen(staged.disc_top(*n, x).map_err(e)?)).map_err(e)?;
        if &via_p != x || &via_q != x {
            return Err(format!(
                "disc of {} maps to {} / {}",
                x.display(&reg),
                via_p.display(&reg),
                via_q.display(&reg)
            ));
        }
    }

    // (b) both factorizations compose to phi
    if !p.compose(&i).map_err(e)?.same_rule(&phi) {
        return Err("p . i differs from phi".into());
    }
    for k in 0..=top {
        let s = staged.stage(k).map_err(e)?;
        if !s.q.compose(&s.j).map_err(e)?.same_rule(&phi) {
            return Err(format!("q_{k} . j_{k} differs from phi"));
        }
        // (c) R_{k-1} sits inside R_k unchanged
        check_stage_restriction(&staged, k).map_err(e)?;
        // (d) j_k is minimal and lowering
        let st = check_structure(&s.algebra);
        if !(st.d_squared_zero && st.minimal && st.lowering) {
            return Err(format!("stage {k} structure {st:?}"));
        }
    }
    let st = check_structure(&mid);
    if !st.all() {
        return Err(format!("disc extension structure {st:?}"));
    }
    Ok(())
}

pub struct Square {
    pub u: DGMorphism,
    pub v: DGMorphism,
    pub phi2: DGMorphism,
}

/// `A -> A + g`, `B -> B + h` with `d g = c`, `d h = phi(c)`, `phi'(g) = h`
/// for a random degree-0 element `c` of `A`.
pub fn extend_square(r: &mut ChaCha8Rng, phi: &DGMorphism, tag: &str) -> Square {
    let a = phi.source().clone();
    let b = phi.target().clone();
    let c = if r.random_bool(0.2) {
        Poly::zero()
    } else {
        random_cycle(r, &a, 0, &WINDOW)
    };
    let (a2, g) = a
        .extend_differential(
            &[GenSpec::new(format!("g{tag}"), 1, GenKind::TateGen)
                .weight(phi.apply(&c).unwrap().weighted_degree(a.registry()))],
            std::slice::from_ref(&c),
            ExtendMode::Staged,
        )
        .unwrap();
    let (b2, h) = b
        .extend_differential(
            &[GenSpec::new(format!("h{tag}"), 1, GenKind::TateGen)],
            &[phi.apply(&c).unwrap()],
            ExtendMode::Staged,
        )
        .unwrap();
    let (a2, b2) = (Arc::new(a2), Arc::new(b2));
    let mut rule = phi.rule().clone();
    rule.insert(g[0].id, Poly::gen(h[0]));
    let phi2 = DGMorphism::new(a2.clone(), b2.clone(), rule).unwrap();
    Square {
        u: DGMorphism::inclusion(a, a2).unwrap(),
        v: DGMorphism::inclusion(b, b2).unwrap(),
        phi2,
    }
}

fn same_on(om1: &DGMorphism, om2: &DGMorphism, src: &DGAlgebra) -> Result<bool, String> {
    for g in src.gens() {
        let x = Poly::gen(*g);
        if om1.apply(&x).map_err(e)? != om2.apply(&x).map_err(e)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Both squares for `omega_2` on a random square, `omega(id) = id`, and
/// `omega(u2 u1) = omega(u2) omega(u1)`.
pub fn square_case(seed: u64) -> Check {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let Setup { phi, .. } = random_setup(&mut r);
    let s1 = extend_square(&mut r, &phi, "1");
    let s2 = extend_square(&mut r, &s1.phi2, "2");
    let k = 2;

    let f = Factorization::new(phi.clone());
    resolve_engine(f.clone(), &WINDOW, k).map_err(e)?;
    for n in 1..=2 {
        let x = random_element(&mut r, phi.target(), n, &WINDOW, 2);
        f.disc_top(n, &x).map_err(e)?;
    }
    let f2 = Factorization::new(s1.phi2.clone());
    let f3 = Factorization::new(s2.phi2.clone());

    let w21 = omega(&s1.u, &s1.v, &f, &f2, k).map_err(e)?;
    // squares, independently of the checks inside omega
    let (src, dst) = (&w21.source, &w21.target);
    for g in phi.source().gens() {
        let x = Poly::gen(*g);
        let lhs = w21.apply(&src.j.apply(&x).map_err(e)?).map_err(e)?;
        let rhs = dst.j.apply(&s1.u.apply(&x).map_err(e)?).map_err(e)?;
        if lhs != rhs {
            return Err("omega . j != j' . u".into());
        }
    }
    for g in src.algebra.gens() {
        let x = Poly::gen(*g);
        let lhs = s1.v.apply(&src.q.apply(&x).map_err(e)?).map_err(e)?;
        let rhs = dst.q.apply(&w21.apply(&x).map_err(e)?).map_err(e)?;
        if lhs != rhs {
            return Err("v . q != q' . omega".into());
        }
    }

    // identities
    let id = omega(
        &DGMorphism::identity(phi.source().clone()),
        &DGMorphism::identity(phi.target().clone()),
        &f,
        &f,
        k,
    )
    .map_err(e)?;
    if !same_on(
        &id.morphism,
        &DGMorphism::identity(id.source.algebra.clone()),
        &id.source.algebra,
    )? {
        return Err("omega(id) is not the identity".into());
    }

    // composition
    let w32 = omega(&s2.u, &s2.v, &f2, &f3, k).map_err(e)?;
    let u31 = s2.u.compose(&s1.u).map_err(e)?;
    let v31 = s2.v.compose(&s1.v).map_err(e)?;
    let w31 = omega(&u31, &v31, &f, &f3, k).map_err(e)?;
    for g in w21.source.algebra.gens() {
        let x = Poly::gen(*g);
        let via = w32.apply(&w21.apply(&x).map_err(e)?).map_err(e)?;
        if via != w31.apply(&x).map_err(e)? {
            return Err(format!("composition fails on {}", f.registry().name(g.id)));
        }
    }
    Ok(())
}

/// The fibrant replacement of a random algebra and of a random morphism is
/// the identity construction.
pub fn fibrant_case(seed: u64) -> Check {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let reg = ktforge::gca::Registry::new();
    let a = random_algebra(&mut r, &reg, "z", 3);
    let (ra, unit) = fibrant_replacement(a.clone());
    if !Arc::ptr_eq(&ra, &a) || *ra != *a {
        return Err("replacement object differs from the algebra".into());
    }
    let id: BTreeMap<_, _> = a.gens().iter().map(|g| (g.id, Poly::gen(*g))).collect();
    if unit.rule() != &id {
        return Err("replacement map is not the identity".into());
    }
    let Setup { phi, .. } = random_setup(&mut r);
    if !fibrant_replacement_of_morphism(&phi).same_rule(&phi) {
        return Err("replacement of a morphism changed it".into());
    }
    Ok(())
}
