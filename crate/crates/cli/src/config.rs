//! Run configuration: a small TOML document.
//!
//! ```toml
//! pipeline = "resolve"
//! base_dim = 1
//! jet_cap = 3
//! poly_deg_cap = 2
//! hdeg_max = 2
//! equations = ["u1_x"]
//!
//! [output]
//! format = "machine"
//! ```

use std::fmt;
use std::ops::Range;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use ktforge::gca::Registry;
use ktforge::jet::JetContext;
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::expr::{parse_operator, parse_poly, ExprError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    Koszul,
    Noether,
    Kt,
    Resolve,
    FactorizeDemo,
    Homology,
}

impl Pipeline {
    pub const ALL: [Pipeline; 6] = [
        Pipeline::Koszul,
        Pipeline::Noether,
        Pipeline::Kt,
        Pipeline::Resolve,
        Pipeline::FactorizeDemo,
        Pipeline::Homology,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Pipeline::Koszul => "koszul",
            Pipeline::Noether => "noether",
            Pipeline::Kt => "kt",
            Pipeline::Resolve => "resolve",
            Pipeline::FactorizeDemo => "factorize-demo",
            Pipeline::Homology => "homology",
        }
    }
}

impl FromStr for Pipeline {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Pipeline::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown pipeline `{s}`"))
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Human,
    Machine,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "human" => Ok(Format::Human),
            "machine" => Ok(Format::Machine),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub pipeline: Pipeline,
    pub base_dim: u32,
    pub fiber_rank: u32,
    pub jet_cap: u32,
    pub poly_deg_cap: u32,
    pub hdeg_max: u32,
    pub max_stages: u32,
    pub order_cap: u32,
    pub coeff_deg_cap: u32,
    pub seed_kt: bool,
    pub equations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noether: Option<Vec<String>>,
    pub output: Output,
}

impl RunConfig {
    pub fn new(pipeline: Pipeline) -> Self {
        RunConfig {
            pipeline,
            base_dim: 1,
            fiber_rank: 1,
            jet_cap: 3,
            poly_deg_cap: 2,
            hdeg_max: 2,
            max_stages: 4,
            order_cap: 1,
            coeff_deg_cap: 1,
            seed_kt: false,
            equations: Vec::new(),
            noether: None,
            output: Output::default(),
        }
    }

    /// A jet context for the configuration with every jet variable
    /// registered up front, so generator order does not depend on parsing.
    pub fn jet_context(&self, extended: bool) -> Result<Arc<JetContext>, ktforge::Error> {
        let ctx = JetContext::new(
            Registry::new(),
            self.base_dim as usize,
            self.fiber_rank as usize,
            self.jet_cap,
            extended,
        )?;
        ctx.all_vars()?;
        Ok(ctx)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// 1-based; 0 when the problem has no location.
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "error: {}", self.message)
        } else {
            write!(f, "{}:{}: error: {}", self.line, self.column, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ConfigError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.diagnostics.iter().map(|d| d.to_string()).collect();
        f.write_str(&lines.join("\n"))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    pipeline: Option<Spanned<String>>,
    base_dim: Option<Spanned<i64>>,
    fiber_rank: Option<Spanned<i64>>,
    jet_cap: Option<Spanned<i64>>,
    poly_deg_cap: Option<Spanned<i64>>,
    hdeg_max: Option<Spanned<i64>>,
    max_stages: Option<Spanned<i64>>,
    order_cap: Option<Spanned<i64>>,
    coeff_deg_cap: Option<Spanned<i64>>,
    seed_kt: Option<bool>,
    equation: Option<Spanned<String>>,
    equations: Option<Vec<Spanned<String>>>,
    noether: Option<Vec<Spanned<String>>>,
    output: Option<Output>,
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
    (line, column)
}

/// Where an expression came from, for mapping its errors back to the file.
#[derive(Debug, Clone)]
struct Origin {
    span: Option<Range<usize>>,
    what: String,
}

struct Collector<'a> {
    text: &'a str,
    out: Vec<Diagnostic>,
}

impl Collector<'_> {
    fn at(&mut self, span: Option<&Range<usize>>, message: String) {
        let (line, column) = match span {
            Some(s) => position(self.text, s.start),
            None => (0, 0),
        };
        self.out.push(Diagnostic { line, column, message });
    }

    fn expr(&mut self, origin: &Origin, e: ExprError) {
        match &origin.span {
            // skip the opening quote of the string literal
            Some(s) => {
                let (line, column) = position(self.text, s.start + 1);
                self.out.push(Diagnostic {
                    line,
                    column: column + e.offset,
                    message: format!("in {}: {}", origin.what, e.message),
                });
            }
            None => self.at(None, format!("in {}: {}", origin.what, e.message)),
        }
    }
}

fn read_cap(c: &mut Collector, v: Option<Spanned<i64>>, name: &str, default: u32, min: i64) -> u32 {
    let Some(v) = v else {
        return default;
    };
    let span = v.span();
    let n = *v.get_ref();
    if n < min || n > u32::MAX as i64 {
        c.at(Some(&span), format!("`{name}` must be at least {min}, found {n}"));
        return default;
    }
    n as u32
}

/// Parse and validate a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with(text, None)
}

/// As [`parse_config`], with the pipeline supplied from outside (it then
/// need not appear in the text, and wins over it).
pub fn parse_config_with(text: &str, pipeline: Option<Pipeline>) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map(|s| position(text, s.start)).unwrap_or((0, 0));
        ConfigError {
            diagnostics: vec![Diagnostic {
                line,
                column,
                message: e.message().trim().to_string(),
            }],
        }
    })?;
    let mut c = Collector { text, out: Vec::new() };
    let chosen = match (pipeline, &raw.pipeline) {
        (Some(p), _) => Some(p),
        (None, Some(s)) => match s.get_ref().parse::<Pipeline>() {
            Ok(p) => Some(p),
            Err(msg) => {
                c.at(Some(&s.span()), msg);
                None
            }
        },
        (None, None) => {
            c.at(None, "missing `pipeline`".into());
            None
        }
    };
    let mut cfg = RunConfig::new(chosen.unwrap_or(Pipeline::Homology));
    cfg.base_dim = read_cap(&mut c, raw.base_dim, "base_dim", cfg.base_dim, 1);
    cfg.fiber_rank = read_cap(&mut c, raw.fiber_rank, "fiber_rank", cfg.fiber_rank, 1);
    cfg.jet_cap = read_cap(&mut c, raw.jet_cap, "jet_cap", cfg.jet_cap, 1);
    cfg.poly_deg_cap = read_cap(&mut c, raw.poly_deg_cap, "poly_deg_cap", cfg.poly_deg_cap, 1);
    cfg.hdeg_max = read_cap(&mut c, raw.hdeg_max, "hdeg_max", cfg.hdeg_max, 1);
    cfg.max_stages = read_cap(&mut c, raw.max_stages, "max_stages", cfg.max_stages, 0);
    cfg.order_cap = read_cap(&mut c, raw.order_cap, "order_cap", cfg.order_cap, 0);
    cfg.coeff_deg_cap = read_cap(&mut c, raw.coeff_deg_cap, "coeff_deg_cap", cfg.coeff_deg_cap, 0);
    cfg.seed_kt = raw.seed_kt.unwrap_or(false);
    cfg.output = raw.output.unwrap_or_default();

    let mut origins = Vec::new();
    match (raw.equation, raw.equations) {
        (Some(e), Some(es)) => {
            c.at(
                Some(&e.span()),
                "give either `equation` or `equations`, not both".into(),
            );
            drop(es);
        }
        (Some(e), None) => {
            origins.push(Origin {
                span: Some(e.span()),
                what: "equation 1".into(),
            });
            cfg.equations.push(e.into_inner());
        }
        (None, Some(es)) => {
            for (i, e) in es.into_iter().enumerate() {
                origins.push(Origin {
                    span: Some(e.span()),
                    what: format!("equation {}", i + 1),
                });
                cfg.equations.push(e.into_inner());
            }
        }
        (None, None) => {}
    }
    let mut op_origins = Vec::new();
    if let Some(ops) = raw.noether {
        let mut list = Vec::new();
        for (j, e) in ops.into_iter().enumerate() {
            op_origins.push(Origin {
                span: Some(e.span()),
                what: format!("noether operator {}", j + 1),
            });
            list.push(e.into_inner());
        }
        cfg.noether = Some(list);
    }
    if !c.out.is_empty() {
        return Err(ConfigError { diagnostics: c.out });
    }
    semantic_check(&cfg, &mut c, &origins, &op_origins);
    if c.out.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError { diagnostics: c.out })
    }
}

/// Re-validate a configuration after command-line overrides.
pub fn validate(cfg: &RunConfig) -> Result<(), ConfigError> {
    let mut c = Collector {
        text: "",
        out: Vec::new(),
    };
    if [
        cfg.base_dim,
        cfg.fiber_rank,
        cfg.jet_cap,
        cfg.poly_deg_cap,
        cfg.hdeg_max,
    ]
    .contains(&0)
    {
        c.at(None, "caps must be positive".into());
    }
    if c.out.is_empty() {
        let origins: Vec<Origin> = (0..cfg.equations.len())
            .map(|i| Origin {
                span: None,
                what: format!("equation {}", i + 1),
            })
            .collect();
        let op_origins: Vec<Origin> = (0..cfg.noether.as_ref().map_or(0, |v| v.len()))
            .map(|j| Origin {
                span: None,
                what: format!("noether operator {}", j + 1),
            })
            .collect();
        semantic_check(cfg, &mut c, &origins, &op_origins);
    }
    if c.out.is_empty() {
        Ok(())
    } else {
        Err(ConfigError { diagnostics: c.out })
    }
}

fn semantic_check(cfg: &RunConfig, c: &mut Collector, origins: &[Origin], op_origins: &[Origin]) {
    let ctx = match cfg.jet_context(false) {
        Ok(ctx) => ctx,
        Err(e) => {
            c.at(None, e.to_string());
            return;
        }
    };
    let reg = ctx.registry().clone();
    let mut max_order = 0;
    for (src, origin) in cfg.equations.iter().zip(origins) {
        match parse_poly(src, &ctx) {
            Ok(p) if p.is_zero() => c.at(origin.span.as_ref(), format!("{} is zero", origin.what)),
            Ok(p) => max_order = max_order.max(p.jet_order(&reg)),
            Err(e) => c.expr(origin, e),
        }
    }
    let needs_equations = matches!(
        cfg.pipeline,
        Pipeline::Noether | Pipeline::Kt | Pipeline::Resolve | Pipeline::FactorizeDemo
    );
    if needs_equations && cfg.equations.is_empty() {
        c.at(None, format!("pipeline `{}` needs at least one equation", cfg.pipeline));
    }
    if cfg.pipeline == Pipeline::Noether && cfg.noether.is_none() && max_order + cfg.order_cap > cfg.jet_cap {
        c.at(
            None,
            format!(
                "order_cap {} on equations of jet order {max_order} exceeds jet_cap {}",
                cfg.order_cap, cfg.jet_cap
            ),
        );
    }
    if let Some(ops) = &cfg.noether {
        for (src, origin) in ops.iter().zip(op_origins) {
            if let Err(e) = parse_operator(src, &ctx, cfg.equations.len()) {
                c.expr(origin, e);
            }
        }
    }
}

/// Render a configuration in the accepted syntax.
pub fn print_config(cfg: &RunConfig) -> String {
    toml::to_string(cfg).expect("configuration serializes")
}
