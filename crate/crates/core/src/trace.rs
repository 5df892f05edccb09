//! Run records for windowed resolutions and their text serializations.
//!
//! The machine format is line based and byte-stable; see `docs/FORMATS.md`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::dga::StructureReport;
use crate::homology::{HomologyReport, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Resolved,
    Unresolved,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Resolved => "resolved",
            Status::Unresolved => "unresolved in window",
        }
    }

    fn token(self) -> &'static str {
        match self {
            Status::Resolved => "resolved",
            Status::Unresolved => "unresolved",
        }
    }
}

/// One generator adjoined during a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjoined {
    pub name: String,
    pub hdeg: u32,
    pub kind: String,
    /// Cycle of the previous stage killed by the generator (Tate generators).
    pub sigma: Option<String>,
    /// Image in the target algebra.
    pub image: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageTrace {
    pub k: u32,
    /// Number of generators of the stage algebra outside the base, by degree.
    pub generators: BTreeMap<u32, usize>,
    pub homology: Vec<usize>,
    pub adjoined: Vec<Adjoined>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionTrace {
    pub status: Status,
    pub window: Window,
    pub max_stages: u32,
    pub target_homology: Vec<usize>,
    pub stages: Vec<StageTrace>,
    pub structure: StructureReport,
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn join(v: &[usize]) -> String {
    v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ")
}

impl ResolutionTrace {
    pub fn final_homology(&self) -> &[usize] {
        self.stages.last().map(|s| s.homology.as_slice()).unwrap_or(&[])
    }

    pub fn tate_stage_count(&self) -> usize {
        self.stages.iter().filter(|s| s.k > 0 && !s.adjoined.is_empty()).count()
    }

    pub fn generator_count(&self) -> usize {
        self.stages.last().map(|s| s.generators.values().sum()).unwrap_or(0)
    }

    pub fn to_machine(&self) -> String {
        let mut out = String::new();
        let w = &self.window;
        writeln!(out, "ktforge-trace v1").unwrap();
        writeln!(out, "status {}", self.status.token()).unwrap();
        writeln!(
            out,
            "window hdeg_max={} poly_deg_cap={} jet_cap={}",
            w.hdeg_max, w.poly_deg_cap, w.jet_cap
        )
        .unwrap();
        writeln!(out, "max_stages {}", self.max_stages).unwrap();
        writeln!(out, "target_homology {}", join(&self.target_homology)).unwrap();
        for s in &self.stages {
            writeln!(out, "stage {}", s.k).unwrap();
            write!(out, "  generators").unwrap();
            for (d, c) in &s.generators {
                write!(out, " {d}:{c}").unwrap();
            }
            writeln!(out).unwrap();
            writeln!(out, "  homology {}", join(&s.homology)).unwrap();
            for a in &s.adjoined {
                write!(out, "  adjoin {} hdeg={} kind={}", a.name, a.hdeg, a.kind).unwrap();
                if let Some(sigma) = &a.sigma {
                    write!(out, " sigma={}", quote(sigma)).unwrap();
                }
                writeln!(out, " image={}", quote(&a.image)).unwrap();
            }
        }
        let st = &self.structure;
        writeln!(
            out,
            "structure d2={} lowering={} minimal={} split={}",
            st.d_squared_zero, st.lowering, st.minimal, st.split
        )
        .unwrap();
        writeln!(out, "end").unwrap();
        out
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let w = &self.window;
        writeln!(
            out,
            "Resolution in window (hdeg <= {}, poly degree <= {}, jet order <= {})",
            w.hdeg_max, w.poly_deg_cap, w.jet_cap
        )
        .unwrap();
        writeln!(out, "target homology: {}", ranks_line(&self.target_homology)).unwrap();
        writeln!(out).unwrap();
        writeln!(out, "{:>5}  {:>8}  {:<24}  homology", "stage", "adjoined", "generators").unwrap();
        for s in &self.stages {
            let gens: Vec<String> = s.generators.iter().map(|(d, c)| format!("{c}@{d}")).collect();
            writeln!(
                out,
                "{:>5}  {:>8}  {:<24}  {}",
                s.k,
                s.adjoined.len(),
                if gens.is_empty() {
                    "-".to_string()
                } else {
                    gens.join(" ")
                },
                ranks_line(&s.homology)
            )
            .unwrap();
        }
        for s in &self.stages {
            for a in &s.adjoined {
                match &a.sigma {
                    Some(sigma) => writeln!(
                        out,
                        "  stage {}: {} (deg {}) d = {}, q = {}",
                        s.k, a.name, a.hdeg, sigma, a.image
                    ),
                    None => writeln!(out, "  stage {}: {} (deg {}) q = {}", s.k, a.name, a.hdeg, a.image),
                }
                .unwrap();
            }
        }
        let st = &self.structure;
        writeln!(
            out,
            "\nstructure: d^2 = 0: {}, lowering: {}, minimal: {}, split: {}",
            st.d_squared_zero, st.lowering, st.minimal, st.split
        )
        .unwrap();
        writeln!(out, "status: {}", self.status.as_str()).unwrap();
        out
    }
}

fn ranks_line(r: &[usize]) -> String {
    r.iter()
        .enumerate()
        .map(|(n, v)| format!("H{n}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn homology_to_machine(report: &HomologyReport, names: &dyn Fn(&crate::gca::Poly) -> String) -> String {
    let mut out = String::new();
    let w = &report.window;
    writeln!(out, "ktforge-homology v1").unwrap();
    writeln!(
        out,
        "window hdeg_max={} poly_deg_cap={} jet_cap={}",
        w.hdeg_max, w.poly_deg_cap, w.jet_cap
    )
    .unwrap();
    for d in &report.degrees {
        writeln!(
            out,
            "degree {} chains={} cycles={} boundaries={} rank={}",
            d.degree, d.chain_dim, d.cycle_dim, d.boundary_dim, d.rank
        )
        .unwrap();
        for r in &d.representatives {
            writeln!(out, "  class {}", quote(&names(r))).unwrap();
        }
    }
    writeln!(out, "end").unwrap();
    out
}

pub fn homology_to_human(report: &HomologyReport, names: &dyn Fn(&crate::gca::Poly) -> String) -> String {
    let mut out = String::new();
    let w = &report.window;
    writeln!(
        out,
        "Homology in window (hdeg <= {}, poly degree <= {}, jet order <= {})",
        w.hdeg_max, w.poly_deg_cap, w.jet_cap
    )
    .unwrap();
    writeln!(
        out,
        "{:>6}  {:>6}  {:>6}  {:>10}  {:>4}",
        "degree", "chains", "cycles", "boundaries", "rank"
    )
    .unwrap();
    for d in &report.degrees {
        writeln!(
            out,
            "{:>6}  {:>6}  {:>6}  {:>10}  {:>4}",
            d.degree, d.chain_dim, d.cycle_dim, d.boundary_dim, d.rank
        )
        .unwrap();
    }
    for d in &report.degrees {
        for r in &d.representatives {
            writeln!(out, "  H{}: [{}]", d.degree, names(r)).unwrap();
        }
    }
    out
}
