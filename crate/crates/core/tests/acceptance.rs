//! Runs every acceptance criterion and prints one line per criterion.
//! All comparisons are exact (rational arithmetic); the only tolerance is
//! the wall-clock budget of each criterion.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{count_monomials, factor, props};
use ktforge::dga::check_structure;
use ktforge::gca::{Poly, Registry};
use ktforge::homology::{homology, homology_rank, Window};
use ktforge::jet::{JetContext, MultiIndex};
use ktforge::tate::{koszul_resolution, kt_complex, noether_identities, resolve_onshell, PDESystem};
use ktforge::trace::Status;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

type Outcome = Result<String, String>;
type Suite = (&'static str, fn(u64) -> props::Check);

fn u(ctx: &JetContext, k: u32) -> Poly {
    Poly::gen(ctx.var(0, &MultiIndex::new(vec![k])).unwrap())
}

fn err(e: ktforge::Error) -> String {
    e.to_string()
}

fn koszul() -> Outcome {
    let w = Window::new(3, 4, 0);
    let mut seen = Vec::new();
    for r in 1..=3 {
        let start = Instant::now();
        let ctx = JetContext::new(Registry::new(), r, 1, 0, false).map_err(err)?;
        let k = koszul_resolution(ctx.registry(), ctx.coords()).map_err(err)?;
        let ranks = homology(&k, &w).map_err(err)?.ranks();
        let all: Vec<usize> = (0..r).collect();
        let oracle = count_monomials(r, w.poly_deg_cap, &all);
        if ranks != [oracle, 0, 0, 0] {
            return Err(format!("r={r}: H = {ranks:?}, expected [{oracle}, 0, 0, 0]"));
        }
        if start.elapsed() > Duration::from_secs(10) {
            return Err(format!("r={r} took {:?}", start.elapsed()));
        }
        seen.push(format!("r={r} H={ranks:?}"));
    }
    Ok(seen.join(", "))
}

fn noether_nilpotency() -> Outcome {
    let w = Window::new(2, 2, 4);
    let mut seen = Vec::new();
    for (label, orders) in [("F1=F2=u_x", [1, 1]), ("(u_x, u_xx)", [1, 2])] {
        let ctx = JetContext::new(Registry::new(), 1, 1, 4, true).map_err(err)?;
        let sys = PDESystem::new(ctx.clone(), orders.iter().map(|&k| u(&ctx, k)).collect()).map_err(err)?;
        let ids = noether_identities(&sys, 1, 1).map_err(err)?;
        if ids.is_empty() {
            return Err(format!("{label}: no Noether identity found"));
        }
        let kt = kt_complex(&sys, &ids).map_err(err)?;
        if !check_structure(&kt.algebra).d_squared_zero {
            return Err(format!("{label}: d^2 != 0"));
        }
        let bare = kt.without_noether().map_err(err)?;
        if !check_structure(&bare).d_squared_zero {
            return Err(format!("{label}: d^2 != 0 without C*"));
        }
        let without = homology_rank(&bare, 1, &w).map_err(err)?;
        let with = homology_rank(&kt.algebra, 1, &w).map_err(err)?;
        if without == 0 || with != 0 {
            return Err(format!("{label}: H1 without C* = {without}, with C* = {with}"));
        }
        seen.push(format!("{label}: H1 {without} -> {with}"));
    }
    Ok(seen.join(", "))
}

fn onshell() -> Outcome {
    let ctx = JetContext::new(Registry::new(), 1, 1, 3, true).map_err(err)?;
    let sys = PDESystem::new(ctx.clone(), vec![u(&ctx, 1)]).map_err(err)?;
    let w = Window::new(2, 2, 3);
    let r = resolve_onshell(&sys, &w, 8, None).map_err(err)?;
    // x, u, u_x, u_xx, u_xxx with every derivative of u killed
    let oracle = count_monomials(5, w.poly_deg_cap, &[2, 3, 4]);
    let h = r.trace.final_homology().to_vec();
    if r.trace.status != Status::Resolved {
        return Err(format!("status {}", r.trace.status.as_str()));
    }
    if h != [oracle, 0, 0] {
        return Err(format!("H = {h:?}, expected [{oracle}, 0, 0]"));
    }
    Ok(format!("resolved after {} stage(s), H={h:?}", r.trace.stages.len() - 1))
}

fn seeds(n: u64, check: fn(u64) -> props::Check) -> Outcome {
    for seed in 0..n {
        check(seed).map_err(|m| format!("seed {seed}: {m}"))?;
    }
    Ok(format!("{n} cases"))
}

fn kernel_suites() -> Outcome {
    let suites: [Suite; 4] = [
        ("d^2=0", props::d_squared_zero),
        ("Leibniz", props::leibniz),
        ("Koszul signs", props::koszul_sign),
        ("D_iD_j=D_jD_i", props::total_derivatives_commute),
    ];
    let mut seen = Vec::new();
    for (name, check) in suites {
        let config = Config {
            cases: 1000,
            failure_persistence: None,
            ..Config::default()
        };
        let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
        runner
            .run(&any::<u64>(), |seed| check(seed).map_err(TestCaseError::fail))
            .map_err(|e| format!("{name}: {e}"))?;
        seen.push(format!("{name} 1000"));
    }
    Ok(seen.join(", "))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "Koszul acyclicity",
            budget: Duration::from_secs(30),
            run: koszul,
        },
        Criterion {
            id: 2,
            name: "Noether-driven nilpotency",
            budget: Duration::from_secs(10),
            run: noether_nilpotency,
        },
        Criterion {
            id: 3,
            name: "on-shell resolution of u_x",
            budget: Duration::from_secs(30),
            run: onshell,
        },
        Criterion {
            id: 4,
            name: "factorization properties",
            budget: Duration::from_secs(60),
            run: || seeds(100, factor::factorization_case),
        },
        Criterion {
            id: 5,
            name: "functoriality of omega",
            budget: Duration::from_secs(60),
            run: || seeds(50, factor::square_case),
        },
        Criterion {
            id: 6,
            name: "fibrant replacement is the identity",
            budget: Duration::from_secs(1),
            run: || seeds(20, factor::fibrant_case),
        },
        Criterion {
            id: 7,
            name: "kernel properties",
            budget: Duration::from_secs(30),
            run: kernel_suites,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.budget => Err(format!("{detail}; over budget {:?}", c.budget)),
            other => other,
        };
        match outcome {
            Ok(detail) => println!(
                "[PASS] criterion {} {}: {detail} ({:.2?}, exact)",
                c.id, c.name, elapsed
            ),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {} {}: {detail} ({:.2?})", c.id, c.name, elapsed);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
