//! Koszul and Koszul-Tate constructions for polynomial PDE systems.

mod koszul;
mod kt;
mod noether;
mod onshell;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gca::Poly;
use crate::jet::JetContext;

pub use koszul::koszul_resolution;
pub use kt::{kt_complex, KTComplex};
pub use noether::{noether_identities, NoetherOperator};
pub use onshell::{leading_term_count, onshell_algebra, resolve_onshell, OnShell};

/// Equations `F_i = 0` in a jet context, with labels for their antifields.
#[derive(Debug, Clone)]
pub struct PDESystem {
    ctx: Arc<JetContext>,
    equations: Vec<Poly>,
    labels: Vec<String>,
}

impl PDESystem {
    /// Labels default to `p1, p2, ...`.
    pub fn new(ctx: Arc<JetContext>, equations: Vec<Poly>) -> Result<Self> {
        let labels = (1..=equations.len()).map(|i| format!("p{i}")).collect();
        Self::with_labels(ctx, equations, labels)
    }

    pub fn with_labels(ctx: Arc<JetContext>, equations: Vec<Poly>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != equations.len() {
            return Err(Error::InvalidInput(format!(
                "{} equations but {} labels",
                equations.len(),
                labels.len()
            )));
        }
        let reg = ctx.registry().clone();
        for (f, label) in equations.iter().zip(&labels) {
            if f.is_zero() {
                return Err(Error::InvalidInput(format!("equation `{label}` is zero")));
            }
            if f.hdeg() != Some(0) {
                return Err(Error::DegreeMismatch {
                    context: format!("equation `{label}`"),
                    expected: 0,
                    found: f.hdeg().map(|d| d as i64).unwrap_or(-1),
                });
            }
            for id in f.gen_ids() {
                if ctx.role(id).is_none() {
                    return Err(Error::ForeignGenerator(reg.name(id)));
                }
            }
        }
        Ok(PDESystem { ctx, equations, labels })
    }

    pub fn ctx(&self) -> &Arc<JetContext> {
        &self.ctx
    }

    pub fn equations(&self) -> &[Poly] {
        &self.equations
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }
}
