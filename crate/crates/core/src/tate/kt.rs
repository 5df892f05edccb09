use std::collections::BTreeMap;
use std::sync::Arc;

use crate::dga::DGAlgebra;
use crate::error::{Error, Result};
use crate::gca::{Gen, GenId, GenKind, Poly};
use crate::jet::MultiIndex;

use super::{NoetherOperator, PDESystem};

/// The Koszul-Tate algebra over the jet algebra: antifield towers
/// `D^alpha phi*_i` in degree 1 and `D^beta C*_j` in degree 2.
#[derive(Debug, Clone)]
pub struct KTComplex {
    pub algebra: DGAlgebra,
    pub base: Arc<DGAlgebra>,
    pub antifields: Vec<Vec<(MultiIndex, Gen)>>,
    pub noether_gens: Vec<Vec<(MultiIndex, Gen)>>,
}

impl KTComplex {
    /// The same complex with the degree-2 towers removed.
    pub fn without_noether(&self) -> Result<DGAlgebra> {
        let drop: Vec<GenId> = self
            .noether_gens
            .iter()
            .flat_map(|t| t.iter().map(|(_, g)| g.id))
            .collect();
        let order: Vec<Gen> = self
            .algebra
            .gens()
            .iter()
            .copied()
            .filter(|g| !drop.contains(&g.id))
            .collect();
        let diff = self
            .algebra
            .diff_rules()
            .iter()
            .filter(|(id, _)| !drop.contains(id))
            .map(|(id, p)| (*id, p.clone()))
            .collect();
        DGAlgebra::from_parts(self.algebra.registry().clone(), order, diff, Some(self.base.clone()))
    }
}

/// Build the Koszul-Tate algebra of `sys` with one degree-2 tower per
/// Noether operator. Fails with the `d^2` residual when an operator is not
/// an identity.
pub fn kt_complex(sys: &PDESystem, noether: &[NoetherOperator]) -> Result<KTComplex> {
    let ctx = sys.ctx();
    let reg = ctx.registry().clone();
    let base = Arc::new(ctx.jet_algebra()?);
    if sys.is_empty() {
        if !noether.is_empty() {
            return Err(Error::InvalidInput("Noether operators without equations".into()));
        }
        return Ok(KTComplex {
            algebra: (*base).clone(),
            base,
            antifields: Vec::new(),
            noether_gens: Vec::new(),
        });
    }
    if !ctx.is_extended() {
        return Err(Error::InvalidInput(
            "the Koszul-Tate complex needs antifield towers (extended jet context)".into(),
        ));
    }
    let cap = ctx.jet_cap();
    let dim = ctx.base_dim();
    let mut order: Vec<Gen> = base.gens().to_vec();
    let mut diff: BTreeMap<GenId, Poly> = BTreeMap::new();

    let mut towers = Vec::with_capacity(sys.len());
    let mut antifields = Vec::with_capacity(sys.len());
    for (f, label) in sys.equations().iter().zip(sys.labels()) {
        let base_order = f.jet_order(&reg);
        let weight = f.weighted_degree(&reg).max(1);
        let t = ctx.add_tower(&format!("{label}*"), 1, weight, base_order, GenKind::Antifield)?;
        towers.push(t);
        let mut members = Vec::new();
        for alpha in MultiIndex::all_up_to(dim, cap.saturating_sub(base_order)) {
            let g = ctx.tower_gen(t, &alpha)?;
            diff.insert(g.id, ctx.total_derivative_multi(f, &alpha)?);
            order.push(g);
            members.push((alpha, g));
        }
        antifields.push(members);
    }

    let mut noether_gens = Vec::with_capacity(noether.len());
    for (j, op) in noether.iter().enumerate() {
        if op.coefficients.len() != sys.len() {
            return Err(Error::InvalidInput(format!(
                "Noether operator {} has {} components for {} equations",
                j + 1,
                op.coefficients.len(),
                sys.len()
            )));
        }
        let mut image = Poly::zero();
        for (i, coeffs) in op.coefficients.iter().enumerate() {
            for (alpha, g) in coeffs {
                let phi = ctx.tower_gen(towers[i], alpha)?;
                image = &image + &g.mul(&Poly::gen(phi));
            }
        }
        let base_order = image.jet_order(&reg);
        let weight = image.weighted_degree(&reg).max(1);
        let t = ctx.add_tower(&format!("C{}*", j + 1), 2, weight, base_order, GenKind::Antifield)?;
        let mut members = Vec::new();
        for beta in MultiIndex::all_up_to(dim, cap.saturating_sub(base_order)) {
            let g = ctx.tower_gen(t, &beta)?;
            diff.insert(g.id, ctx.total_derivative_multi(&image, &beta)?);
            order.push(g);
            members.push((beta, g));
        }
        noether_gens.push(members);
    }

    let algebra = DGAlgebra::from_parts(reg, order, diff, Some(base.clone()))?;
    Ok(KTComplex {
        algebra,
        base,
        antifields,
        noether_gens,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::check_structure;
    use crate::gca::Registry;
    use crate::homology::{homology_rank, Window};
    use crate::jet::JetContext;
    use crate::tate::noether_identities;

    fn u(ctx: &crate::jet::JetContext, k: u32) -> Poly {
        Poly::gen(ctx.var(0, &MultiIndex::new(vec![k])).unwrap())
    }

    #[test]
    fn free_field() {
        let ctx = JetContext::new(Registry::new(), 1, 1, 4, true).unwrap();
        let sys = PDESystem::new(ctx.clone(), vec![u(&ctx, 2)]).unwrap();
        let kt = kt_complex(&sys, &[]).unwrap();
        let phi = kt.antifields[0][0].1;
        let phi_x = kt.antifields[0][1].1;
        assert_eq!(kt.algebra.diff_of(phi.id), u(&ctx, 2));
        assert_eq!(kt.algebra.diff_of(phi_x.id), u(&ctx, 3));
        assert_eq!(kt.antifields[0].len(), 3);
        assert!(check_structure(&kt.algebra).d_squared_zero);
    }

    #[test]
    fn duplicated_system_needs_its_noether_tower() {
        let ctx = JetContext::new(Registry::new(), 1, 1, 4, true).unwrap();
        let sys = PDESystem::new(ctx.clone(), vec![u(&ctx, 1), u(&ctx, 1)]).unwrap();
        let ids = noether_identities(&sys, 1, 1).unwrap();
        let kt = kt_complex(&sys, &ids).unwrap();
        let c = kt.noether_gens[0][0].1;
        let p1 = kt.antifields[0][0].1;
        let p2 = kt.antifields[1][0].1;
        assert_eq!(kt.algebra.diff_of(c.id), &Poly::gen(p1) - &Poly::gen(p2));
        let w = Window::new(2, 2, 4);
        assert_eq!(homology_rank(&kt.algebra, 1, &w).unwrap(), 0);
        assert!(homology_rank(&kt.without_noether().unwrap(), 1, &w).unwrap() > 0);
    }

    #[test]
    fn bad_operator_reports_residual() {
        let ctx = JetContext::new(Registry::new(), 1, 1, 3, true).unwrap();
        let sys = PDESystem::new(ctx.clone(), vec![u(&ctx, 1), u(&ctx, 2)]).unwrap();
        let zero = MultiIndex::zero(1);
        let op = NoetherOperator::new(vec![
            [(zero.clone(), Poly::int(1))].into(),
            [(zero, Poly::int(-1))].into(),
        ]);
        match kt_complex(&sys, &[op]).unwrap_err() {
            Error::NotACycle { residual, .. } => assert_eq!(residual, "u1_x - u1_xx"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn no_equations() {
        let ctx = JetContext::new(Registry::new(), 1, 1, 2, false).unwrap();
        let sys = PDESystem::new(ctx, vec![]).unwrap();
        let kt = kt_complex(&sys, &[]).unwrap();
        assert_eq!(kt.algebra, *kt.base);
    }
}
