use std::fmt::Write as _;
use std::sync::Arc;

use ktforge::dga::{check_structure, DGAlgebra, DGMorphism};
use ktforge::factorize::{build_trivcof_fib, resolve_relative};
use ktforge::gca::Poly;
use ktforge::homology::{basis, homology, BasisOrder, HomologyReport, Window};
use ktforge::tate::{
    koszul_resolution, kt_complex, noether_identities, resolve_onshell, KTComplex, NoetherOperator, PDESystem,
};
use ktforge::trace::{homology_to_human, homology_to_machine, ResolutionTrace, Status};

use crate::config::{Format, Pipeline, RunConfig};
use crate::expr::{parse_operator, parse_poly};

/// Exit statuses of the command-line tool.
pub mod exit {
    pub const RESOLVED: i32 = 0;
    pub const UNRESOLVED: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const INTERNAL: i32 = 4;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub status: Status,
    pub text: String,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Resolved => exit::RESOLVED,
            Status::Unresolved => exit::UNRESOLVED,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("{pipeline} pipeline: {source}")]
pub struct RunError {
    pub pipeline: Pipeline,
    #[source]
    pub source: ktforge::Error,
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        use ktforge::Error::*;
        match self.source {
            CapOverflow { .. }
            | InvalidInput(_)
            | OutsideWindow(_)
            | WindowNotClosed { .. }
            | DegreeMismatch { .. }
            | NotHomogeneous(_)
            | ForeignGenerator(_) => exit::CONFIG,
            _ => exit::INTERNAL,
        }
    }
}

pub fn window(cfg: &RunConfig) -> Window {
    Window::new(cfg.hdeg_max, cfg.poly_deg_cap, cfg.jet_cap)
}

/// Execute the configured pipeline.
pub fn run(cfg: &RunConfig) -> Result<Report, RunError> {
    let wrap = |source| RunError {
        pipeline: cfg.pipeline,
        source,
    };
    match cfg.pipeline {
        Pipeline::Koszul => koszul(cfg),
        Pipeline::Noether => noether(cfg),
        Pipeline::Kt => kt(cfg),
        Pipeline::Resolve => resolve(cfg),
        Pipeline::FactorizeDemo => factorize_demo(cfg),
        Pipeline::Homology => homology_pipeline(cfg),
    }
    .map_err(wrap)
}

fn invalid(msg: String) -> ktforge::Error {
    ktforge::Error::InvalidInput(msg)
}

fn system(cfg: &RunConfig) -> ktforge::Result<PDESystem> {
    let ctx = cfg.jet_context(true)?;
    let mut eqs = Vec::new();
    for (i, src) in cfg.equations.iter().enumerate() {
        let p = parse_poly(src, &ctx).map_err(|e| invalid(format!("equation {}: {}", i + 1, e.message)))?;
        eqs.push(p);
    }
    PDESystem::new(ctx, eqs)
}

fn operators(cfg: &RunConfig, sys: &PDESystem) -> ktforge::Result<Vec<NoetherOperator>> {
    match &cfg.noether {
        Some(srcs) => srcs
            .iter()
            .enumerate()
            .map(|(j, src)| {
                parse_operator(src, sys.ctx(), sys.len())
                    .map(NoetherOperator::new)
                    .map_err(|e| invalid(format!("noether operator {}: {}", j + 1, e.message)))
            })
            .collect(),
        None => noether_identities(sys, cfg.order_cap, cfg.coeff_deg_cap),
    }
}

fn positive_homology_vanishes(r: &HomologyReport) -> bool {
    r.degrees.iter().skip(1).all(|d| d.rank == 0)
}

fn homology_report(cfg: &RunConfig, a: &DGAlgebra, title: &str) -> ktforge::Result<Report> {
    let report = homology(a, &window(cfg))?;
    let reg = a.registry().clone();
    let names = move |p: &Poly| p.display(&reg);
    let status = if positive_homology_vanishes(&report) {
        Status::Resolved
    } else {
        Status::Unresolved
    };
    let text = match cfg.output.format {
        Format::Machine => homology_to_machine(&report, &names),
        Format::Human => format!(
            "{title}\n{}status: {}\n",
            homology_to_human(&report, &names),
            status.as_str()
        ),
    };
    Ok(Report { status, text })
}

fn koszul(cfg: &RunConfig) -> ktforge::Result<Report> {
    let ctx = cfg.jet_context(false)?;
    let k = koszul_resolution(ctx.registry(), ctx.coords())?;
    homology_report(cfg, &k, &format!("Koszul complex on x1..x{}", cfg.base_dim))
}

fn noether(cfg: &RunConfig) -> ktforge::Result<Report> {
    let sys = system(cfg)?;
    let ops = operators(cfg, &sys)?;
    let mut text = String::new();
    match cfg.output.format {
        Format::Machine => {
            writeln!(text, "ktforge-noether v1").unwrap();
            writeln!(text, "order_cap {} coeff_deg_cap {}", cfg.order_cap, cfg.coeff_deg_cap).unwrap();
            for (j, op) in ops.iter().enumerate() {
                writeln!(text, "identity {} order={} \"{}\"", j + 1, op.order(), op.display(&sys)).unwrap();
            }
            writeln!(text, "end").unwrap();
        }
        Format::Human => {
            writeln!(
                text,
                "Noether identities with |alpha| <= {} and coefficient degree <= {}:",
                cfg.order_cap, cfg.coeff_deg_cap
            )
            .unwrap();
            if ops.is_empty() {
                writeln!(text, "  none within caps").unwrap();
            }
            for (j, op) in ops.iter().enumerate() {
                writeln!(text, "  C{}: {} = 0", j + 1, op.display(&sys)).unwrap();
            }
        }
    }
    Ok(Report {
        status: Status::Resolved,
        text,
    })
}

fn build_kt(cfg: &RunConfig) -> ktforge::Result<(PDESystem, KTComplex)> {
    let sys = system(cfg)?;
    let ops = operators(cfg, &sys)?;
    let kt = kt_complex(&sys, &ops)?;
    Ok((sys, kt))
}

fn generator_table(a: &DGAlgebra, machine: bool) -> String {
    let reg = a.registry();
    let mut out = String::new();
    for g in a.gens() {
        if a.is_base(g.id) {
            continue;
        }
        let d = a.diff_of(g.id).display(reg);
        if machine {
            writeln!(out, "gen {} hdeg={} d=\"{}\"", reg.name(g.id), g.hdeg, d).unwrap();
        } else {
            writeln!(out, "  {:<10} deg {}  d = {}", reg.name(g.id), g.hdeg, d).unwrap();
        }
    }
    out
}

fn kt(cfg: &RunConfig) -> ktforge::Result<Report> {
    let (_, kt) = build_kt(cfg)?;
    let machine = cfg.output.format == Format::Machine;
    let gens = generator_table(&kt.algebra, machine);
    let st = check_structure(&kt.algebra);
    let hom = homology_report(cfg, &kt.algebra, "")?;
    let text = if machine {
        format!(
            "ktforge-kt v1\n{gens}structure d2={} lowering={} minimal={} split={}\n{}",
            st.d_squared_zero, st.lowering, st.minimal, st.split, hom.text
        )
    } else {
        format!(
            "Koszul-Tate complex\n{gens}d^2 = 0 on all generators: {}\n{}",
            st.d_squared_zero,
            hom.text.trim_start()
        )
    };
    Ok(Report {
        status: hom.status,
        text,
    })
}

fn trace_report(cfg: &RunConfig, trace: &ResolutionTrace, header: &str) -> Report {
    let text = match cfg.output.format {
        Format::Machine => format!("{header}{}", trace.to_machine()),
        Format::Human => format!("{header}{}", trace.to_human()),
    };
    Report {
        status: trace.status,
        text,
    }
}

fn resolve(cfg: &RunConfig) -> ktforge::Result<Report> {
    let w = window(cfg);
    let sys = system(cfg)?;
    let resolution = if cfg.seed_kt {
        let ops = operators(cfg, &sys)?;
        let kt = kt_complex(&sys, &ops)?;
        resolve_onshell(&sys, &w, cfg.max_stages, Some(&kt))?
    } else {
        resolve_onshell(&sys, &w, cfg.max_stages, None)?
    };
    Ok(trace_report(cfg, &resolution.trace, ""))
}

/// Factor the inclusion of the jet algebra into the Koszul-Tate complex
/// both ways: discs over every window basis element of positive degree,
/// and the windowed staged resolution.
fn factorize_demo(cfg: &RunConfig) -> ktforge::Result<Report> {
    let w = window(cfg);
    let (_, kt) = build_kt(cfg)?;
    let target = Arc::new(kt.algebra.clone());
    let phi = DGMorphism::inclusion(kt.base.clone(), target.clone())?;

    let tcf = build_trivcof_fib(phi.clone());
    let mut discs = 0usize;
    for n in 1..=w.hdeg_max {
        for m in basis(&target, n, &w, BasisOrder::Canonical)?.monomials() {
            tcf.disc(n, &Poly::term(m.clone(), num_traits::One::one()))?;
            discs += 1;
        }
    }
    let (i, mid, p) = tcf.snapshot()?;
    let mut witnesses_ok = true;
    for r in tcf.engine().records() {
        let image = p.apply(&Poly::gen(r.gen))?;
        witnesses_ok &= image == r.q_image;
    }
    let composite_ok = p.compose(&i)?.same_rule(&phi);
    let st = check_structure(&mid);

    let resolution = resolve_relative(phi, &w, cfg.max_stages)?;
    let mut header = String::new();
    match cfg.output.format {
        Format::Machine => {
            writeln!(header, "ktforge-factorize v1").unwrap();
            writeln!(
                header,
                "trivcof discs={discs} generators={} witnesses={witnesses_ok} composite={composite_ok} \
                 split={} minimal={} lowering={}",
                mid.len() - kt.base.len(),
                st.split,
                st.minimal,
                st.lowering
            )
            .unwrap();
        }
        Format::Human => {
            writeln!(header, "Factorization of the jet algebra into its Koszul-Tate complex").unwrap();
            writeln!(
                header,
                "discs: {discs} elements of positive degree, {} generators",
                mid.len() - kt.base.len()
            )
            .unwrap();
            writeln!(header, "p(I_b) = b on every disc: {witnesses_ok}").unwrap();
            writeln!(header, "p . i = phi: {composite_ok}").unwrap();
            writeln!(
                header,
                "i split: {}, minimal: {}, lowering: {}\n",
                st.split, st.minimal, st.lowering
            )
            .unwrap();
        }
    }
    if !(witnesses_ok && composite_ok) {
        return Err(ktforge::Error::Invariant("disc factorization failed its checks".into()));
    }
    Ok(trace_report(cfg, &resolution.trace, &header))
}

fn homology_pipeline(cfg: &RunConfig) -> ktforge::Result<Report> {
    if cfg.equations.is_empty() {
        let ctx = cfg.jet_context(false)?;
        let jet = ctx.jet_algebra()?;
        let mut r = homology_report(cfg, &jet, "Jet algebra")?;
        r.status = Status::Resolved;
        return Ok(r);
    }
    let (_, kt) = build_kt(cfg)?;
    let mut r = homology_report(cfg, &kt.algebra, "Koszul-Tate complex")?;
    r.status = Status::Resolved;
    Ok(r)
}
