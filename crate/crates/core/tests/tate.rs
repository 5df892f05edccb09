mod common;

use common::count_monomials;
use ktforge::dga::check_structure;
use ktforge::gca::{Poly, Registry};
use ktforge::homology::{homology, homology_rank, Window};
use ktforge::jet::{JetContext, MultiIndex};
use ktforge::tate::{
    koszul_resolution, kt_complex, leading_term_count, noether_identities, onshell_algebra, resolve_onshell, PDESystem,
};
use ktforge::trace::Status;

fn u(ctx: &JetContext, field: usize, alpha: &[u32]) -> Poly {
    Poly::gen(ctx.var(field, &MultiIndex::new(alpha.to_vec())).unwrap())
}

#[test]
fn koszul_complex_resolves_the_origin() {
    for r in 1..=3 {
        let ctx = JetContext::new(Registry::new(), r, 1, 0, false).unwrap();
        let k = koszul_resolution(ctx.registry(), ctx.coords()).unwrap();
        let ranks = homology(&k, &Window::new(3, 4, 0)).unwrap().ranks();
        // Q[x1..xr] / (x1..xr) keeps only the constants
        let all: Vec<usize> = (0..r).collect();
        assert_eq!(ranks[0], count_monomials(r, 4, &all), "r = {r}");
        assert_eq!(&ranks[1..], &[0, 0, 0], "r = {r}");
    }
}

#[test]
fn koszul_complex_lives_over_the_given_coordinates() {
    let ctx = JetContext::new(Registry::new(), 2, 1, 0, false).unwrap();
    let k = koszul_resolution(ctx.registry(), &ctx.coords()[..1]).unwrap();
    assert!(!k.contains_gen(ctx.coord(1).id));
    assert_eq!(k.len(), 2);
    assert!(koszul_resolution(ctx.registry(), &[ctx.coord(0), ctx.coord(0)]).is_err());
}

#[test]
fn noether_identities_of_a_two_dimensional_gradient_system() {
    // u_x = 0 and u_y = 0 satisfy D_y F1 - D_x F2 = 0
    let ctx = JetContext::new(Registry::new(), 2, 1, 3, true).unwrap();
    let sys = PDESystem::new(ctx.clone(), vec![u(&ctx, 0, &[1, 0]), u(&ctx, 0, &[0, 1])]).unwrap();
    assert!(noether_identities(&sys, 0, 1).unwrap().is_empty());
    let ids = noether_identities(&sys, 1, 1).unwrap();
    assert_eq!(ids.len(), 1);
    assert!(ids[0].apply(&sys).unwrap().is_zero());
    assert_eq!(ids[0].order(), 1);

    let kt = kt_complex(&sys, &ids).unwrap();
    assert!(check_structure(&kt.algebra).d_squared_zero);
    let w = Window::new(2, 2, 2);
    assert!(homology_rank(&kt.without_noether().unwrap(), 1, &w).unwrap() > 0);
    assert_eq!(homology_rank(&kt.algebra, 1, &w).unwrap(), 0);
}

#[test]
fn identities_vanish_identically_on_random_combinations() {
    // F1 = u_x, F2 = x * u_xx, F3 = u_x + u_xx
    let ctx = JetContext::new(Registry::new(), 1, 1, 4, true).unwrap();
    let x = Poly::gen(ctx.coord(0));
    let f1 = u(&ctx, 0, &[1]);
    let f2 = x.mul(&u(&ctx, 0, &[2]));
    let f3 = &u(&ctx, 0, &[1]) + &u(&ctx, 0, &[2]);
    let sys = PDESystem::new(ctx.clone(), vec![f1, f2, f3]).unwrap();
    let ids = noether_identities(&sys, 1, 1).unwrap();
    assert!(!ids.is_empty());
    for op in &ids {
        assert!(op.apply(&sys).unwrap().is_zero(), "{}", op.display(&sys));
    }
}

#[test]
fn onshell_quotients_match_surviving_variables() {
    // (system, jet cap, window, positions of killed variables among x, u, u_x, ...)
    let ctx = JetContext::new(Registry::new(), 1, 1, 3, true).unwrap();
    let sys = PDESystem::new(ctx.clone(), vec![u(&ctx, 0, &[2])]).unwrap();
    let w = Window::new(0, 2, 3);
    let on = onshell_algebra(&sys, &w).unwrap();
    let dims = homology(&on.quotient, &w).unwrap().ranks();
    // x, u, u_x survive; u_xx, u_xxx die
    assert_eq!(dims[0], count_monomials(5, 2, &[3, 4]));
    assert_eq!(leading_term_count(&sys, &w).unwrap(), Some(dims[0]));
}

#[test]
fn transport_equation_resolves_with_or_without_seed() {
    let ctx = JetContext::new(Registry::new(), 1, 1, 3, true).unwrap();
    let sys = PDESystem::new(ctx.clone(), vec![u(&ctx, 0, &[1])]).unwrap();
    let w = Window::new(2, 2, 3);
    let oracle = count_monomials(5, 2, &[2, 3, 4]);
    let plain = resolve_onshell(&sys, &w, 4, None).unwrap();
    assert_eq!(plain.trace.status, Status::Resolved);
    assert_eq!(plain.trace.final_homology(), &[oracle, 0, 0]);
    let kt = kt_complex(&sys, &noether_identities(&sys, 1, 1).unwrap()).unwrap();
    let seeded = resolve_onshell(&sys, &w, 4, Some(&kt)).unwrap();
    assert_eq!(seeded.trace.final_homology(), &[oracle, 0, 0]);
    assert_eq!(seeded.trace.tate_stage_count(), 0);
    // byte-stable trace
    let again = resolve_onshell(&sys, &w, 4, None).unwrap();
    assert_eq!(plain.trace.to_machine().len(), again.trace.to_machine().len());
}

#[test]
fn gradient_system_resolves_in_two_dimensions() {
    let ctx = JetContext::new(Registry::new(), 2, 1, 2, true).unwrap();
    let sys = PDESystem::new(ctx.clone(), vec![u(&ctx, 0, &[1, 0]), u(&ctx, 0, &[0, 1])]).unwrap();
    let w = Window::new(2, 2, 2);
    let r = resolve_onshell(&sys, &w, 4, None).unwrap();
    assert_eq!(r.trace.status, Status::Resolved);
    // x, y, u survive among x, y, u, u_x, u_y, u_xx, u_xy, u_yy
    assert_eq!(r.trace.final_homology()[0], count_monomials(8, 2, &[3, 4, 5, 6, 7]));
}

#[test]
fn too_short_a_run_reports_unresolved() {
    let ctx = JetContext::new(Registry::new(), 1, 1, 3, true).unwrap();
    let sys = PDESystem::new(ctx.clone(), vec![u(&ctx, 0, &[1])]).unwrap();
    let r = resolve_onshell(&sys, &Window::new(2, 2, 3), 0, None).unwrap();
    assert_eq!(r.trace.status, Status::Unresolved);
    assert!(r.trace.to_machine().contains("status unresolved\n"));
}
