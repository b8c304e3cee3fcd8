//! Scenario/sweep documents (TOML) and their validation.
//!
//! ```toml
//! name = "swap-r"               # output file prefix
//! description = "…"             # optional free text
//! combine = "product"           # or "zip" (swept lists advance together)
//!
//! [scenario]
//! protocol = "swap"             # transfer | swap | entangle | cz
//! model = "full"                # full | reduced (default: full for transfer
//!                               # and swap, reduced for entangle and cz)
//! dissipative = false
//! # target = "e1"               # entangle only: e1 | e2
//! # alpha = 0.7071              # transfer only; a number or [re, im]
//! # beta = [0.7071, 0.0]
//! # quadrature = 32             # swap only: angle samples per qubit
//!
//! [system]                      # rates and couplings in units of g1
//! n = 100                       # or n1 / n2
//! g1 = 1.0
//! delta = 0.0                   # or g2
//! r = 1.2                       # or nu, or k (transfer); full model only
//! kappa = 0.1                   # needs dissipative = true
//! gamma = 0.1
//! beta = 0.1                    # full model only
//! blockade = true
//!
//! [grid]                        # dimensionless time tau = sqrt(N1) g1 t
//! stop = 12.566
//! step = 0.01
//!
//! [[sweep]]                     # at most two
//! param = "r"                   # r | delta | n | kappa | gamma | beta | k
//! values = [1.1, 1.2, 1.3]
//! ```
//!
//! Unknown keys are errors.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::{Model, SystemConfig};
use crate::error::{Error, Result};
use crate::hamiltonian::transfer_condition;
use crate::operator::C64;
use crate::protocols::{BellTarget, Protocol, Scenario, TimeGrid, SWAP_QUADRATURE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolName {
    Transfer,
    Swap,
    Entangle,
    Cz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    E1,
    E2,
}

/// A real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Amplitude {
    Real(f64),
    Complex([f64; 2]),
}

impl Amplitude {
    fn value(self) -> C64 {
        match self {
            Amplitude::Real(x) => C64::new(x, 0.0),
            Amplitude::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combine {
    /// Every combination of the swept values.
    #[default]
    Product,
    /// The swept lists advance together (equal lengths required).
    Zip,
}

/// Parameters that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    R,
    Delta,
    N,
    Kappa,
    Gamma,
    Beta,
    K,
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Param::R => "r",
            Param::Delta => "delta",
            Param::N => "n",
            Param::Kappa => "kappa",
            Param::Gamma => "gamma",
            Param::Beta => "beta",
            Param::K => "k",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub protocol: ProtocolName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Model>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dissipative: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Amplitude>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Amplitude>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n1: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n2: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blockade: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub param: Param,
    pub values: Vec<f64>,
}

/// The document as written (or, after [`parse_config`], with every default
/// filled in).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub combine: Option<Combine>,
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepSection>,
}

/// One point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    pub assignments: Vec<(Param, f64)>,
    pub scenario: Scenario,
}

impl Combination {
    /// `r=1.2_n=100`, or `base` for an unswept run.
    pub fn label(&self) -> String {
        if self.assignments.is_empty() {
            return "base".into();
        }
        self.assignments
            .iter()
            .map(|(p, v)| format!("{p}={v}"))
            .collect::<Vec<_>>()
            .join("_")
    }
}

/// A validated document with defaults applied and its expanded combinations.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    /// The resolved document, echoed into every artifact.
    pub config: ConfigFile,
    pub combinations: Vec<Combination>,
}

impl SweepSpec {
    /// Replaces the grid step of the document and every combination.
    pub fn with_grid_step(mut self, step: f64) -> Result<Self> {
        self.config.grid.step = Some(step);
        for c in &mut self.combinations {
            c.scenario.grid.step = step;
            c.scenario.grid.validate()?;
        }
        Ok(self)
    }
}

const MAX_SWEPT: usize = 2;

fn positive_integer(field: &str, v: f64) -> Result<u32> {
    if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as u32)
    } else {
        Err(Error::invalid(
            field,
            format!("must be a positive integer, got {v}"),
        ))
    }
}

fn apply(system: &mut SystemSection, param: Param, v: f64) -> Result<()> {
    match param {
        Param::R => {
            system.r = Some(v);
            system.nu = None;
            system.k = None;
        }
        Param::K => {
            system.k = Some(positive_integer("sweep.k", v)?);
            system.r = None;
            system.nu = None;
        }
        Param::Delta => {
            system.delta = Some(v);
            system.g2 = None;
        }
        Param::N => {
            system.n = Some(positive_integer("sweep.n", v)?);
            system.n1 = None;
            system.n2 = None;
        }
        Param::Kappa => system.kappa = Some(v),
        Param::Gamma => system.gamma = Some(v),
        Param::Beta => system.beta = Some(v),
    }
    Ok(())
}

fn default_model(protocol: ProtocolName) -> Model {
    match protocol {
        ProtocolName::Transfer | ProtocolName::Swap => Model::Full,
        ProtocolName::Entangle | ProtocolName::Cz => Model::Reduced,
    }
}

fn protocol_label(p: ProtocolName) -> &'static str {
    match p {
        ProtocolName::Transfer => "transfer",
        ProtocolName::Swap => "swap",
        ProtocolName::Entangle => "entangle",
        ProtocolName::Cz => "cz",
    }
}

/// Fills in every default of the document (without touching sweeps).
fn with_defaults(doc: &ConfigFile) -> ConfigFile {
    let mut out = doc.clone();
    let p = out.scenario.protocol;
    out.name
        .get_or_insert_with(|| protocol_label(p).to_string());
    out.combine.get_or_insert(Combine::Product);
    let sc = &mut out.scenario;
    sc.model.get_or_insert(default_model(p));
    sc.dissipative.get_or_insert(false);
    match p {
        ProtocolName::Transfer => {
            sc.alpha
                .get_or_insert(Amplitude::Real(std::f64::consts::FRAC_1_SQRT_2));
            sc.beta
                .get_or_insert(Amplitude::Real(std::f64::consts::FRAC_1_SQRT_2));
        }
        ProtocolName::Swap => {
            sc.quadrature.get_or_insert(SWAP_QUADRATURE);
        }
        ProtocolName::Entangle => {
            sc.target.get_or_insert(Target::E1);
        }
        ProtocolName::Cz => {}
    }
    let sys = &mut out.system;
    if sys.n1.is_none() && sys.n2.is_none() {
        sys.n.get_or_insert(1);
    }
    sys.g1.get_or_insert(1.0);
    if sys.g2.is_none() {
        sys.delta.get_or_insert(0.0);
    }
    sys.kappa.get_or_insert(0.0);
    sys.gamma.get_or_insert(0.0);
    if out.scenario.model == Some(Model::Full) {
        sys.beta.get_or_insert(0.0);
    }
    sys.blockade.get_or_insert(true);
    let grid = protocol_of(&out.scenario).default_grid();
    out.grid.stop.get_or_insert(grid.stop);
    out.grid.step.get_or_insert(grid.step);
    out
}

fn protocol_of(sc: &ScenarioSection) -> Protocol {
    match sc.protocol {
        ProtocolName::Transfer => Protocol::Transfer {
            alpha: sc.alpha.map_or(
                C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                Amplitude::value,
            ),
            beta: sc.beta.map_or(
                C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                Amplitude::value,
            ),
        },
        ProtocolName::Swap => Protocol::Swap {
            quadrature: sc.quadrature.unwrap_or(SWAP_QUADRATURE),
        },
        ProtocolName::Entangle => Protocol::Entangle {
            target: match sc.target.unwrap_or(Target::E1) {
                Target::E1 => BellTarget::E1,
                Target::E2 => BellTarget::E2,
            },
        },
        ProtocolName::Cz => Protocol::ControlledZ,
    }
}

/// Checks keys that only make sense for some protocols or models.
fn check_combinations(doc: &ConfigFile) -> Result<()> {
    let sc = &doc.scenario;
    let name = protocol_label(sc.protocol);
    if sc.protocol != ProtocolName::Transfer && (sc.alpha.is_some() || sc.beta.is_some()) {
        return Err(Error::invalid(
            "scenario.alpha",
            format!("input amplitudes only apply to transfer, not {name}"),
        ));
    }
    if sc.protocol != ProtocolName::Entangle && sc.target.is_some() {
        return Err(Error::invalid(
            "scenario.target",
            format!("a Bell target only applies to entangle, not {name}"),
        ));
    }
    if sc.protocol != ProtocolName::Swap && sc.quadrature.is_some() {
        return Err(Error::invalid(
            "scenario.quadrature",
            format!("quadrature only applies to swap, not {name}"),
        ));
    }
    let sys = &doc.system;
    if sys.n.is_some() && (sys.n1.is_some() || sys.n2.is_some()) {
        return Err(Error::invalid(
            "system.n",
            "give either n or n1/n2, not both",
        ));
    }
    if sys.g2.is_some() && sys.delta.is_some() {
        return Err(Error::invalid(
            "system.delta",
            "give either delta or g2, not both",
        ));
    }
    let couplings = [sys.r.is_some(), sys.nu.is_some(), sys.k.is_some()];
    if couplings.iter().filter(|&&x| x).count() > 1 {
        return Err(Error::invalid("system.r", "give only one of r, nu and k"));
    }
    if sys.k.is_some() && sc.protocol != ProtocolName::Transfer {
        return Err(Error::invalid(
            "system.k",
            format!("the transfer index k only applies to transfer, not {name}"),
        ));
    }
    let model = sc.model.unwrap_or(default_model(sc.protocol));
    match model {
        Model::Full => {
            let swept = doc
                .sweep
                .iter()
                .any(|s| matches!(s.param, Param::R | Param::K));
            if !couplings.iter().any(|&x| x) && !swept {
                return Err(Error::invalid(
                    "system.r",
                    "the full model needs the fiber coupling: one of r, nu or k",
                ));
            }
        }
        Model::Reduced => {
            if couplings.iter().any(|&x| x) {
                return Err(Error::invalid(
                    "system.r",
                    "the reduced model has no fiber coupling; drop r, nu and k",
                ));
            }
            if sys.beta.is_some_and(|b| b != 0.0) {
                return Err(Error::invalid(
                    "system.beta",
                    "the reduced model has no fiber mode to lose photons from",
                ));
            }
        }
    }
    if !sc.dissipative.unwrap_or(false) {
        for (field, v) in [
            ("system.kappa", sys.kappa),
            ("system.gamma", sys.gamma),
            ("system.beta", sys.beta),
        ] {
            if v.is_some_and(|v| v != 0.0) {
                return Err(Error::invalid(
                    field,
                    "loss rates need scenario.dissipative = true",
                ));
            }
        }
    }
    if matches!(sc.protocol, ProtocolName::Swap | ProtocolName::Cz) && sys.blockade == Some(false) {
        return Err(Error::invalid(
            "system.blockade",
            format!("{name} requires the dipole blockade"),
        ));
    }
    Ok(())
}

fn check_sweeps(doc: &ConfigFile) -> Result<()> {
    if doc.sweep.len() > MAX_SWEPT {
        return Err(Error::invalid(
            "sweep",
            format!("at most {MAX_SWEPT} parameters can be swept"),
        ));
    }
    let model = doc
        .scenario
        .model
        .unwrap_or(default_model(doc.scenario.protocol));
    let dissipative = doc.scenario.dissipative.unwrap_or(false);
    for (i, s) in doc.sweep.iter().enumerate() {
        let field = format!("sweep.{}", s.param);
        if s.values.is_empty() {
            return Err(Error::invalid(field, "value list is empty"));
        }
        if doc.sweep[..i].iter().any(|o| o.param == s.param) {
            return Err(Error::invalid(field, "parameter is swept twice"));
        }
        match s.param {
            Param::R | Param::K if model == Model::Reduced => {
                return Err(Error::invalid(
                    field,
                    "the reduced model has no fiber coupling to sweep",
                ));
            }
            Param::K if doc.scenario.protocol != ProtocolName::Transfer => {
                return Err(Error::invalid(field, "k only applies to transfer"));
            }
            Param::Beta if model == Model::Reduced => {
                return Err(Error::invalid(field, "the reduced model has no fiber loss"));
            }
            Param::Kappa | Param::Gamma | Param::Beta if !dissipative => {
                return Err(Error::invalid(
                    field,
                    "loss rates need scenario.dissipative = true",
                ));
            }
            _ => {}
        }
        if matches!(s.param, Param::N) && (doc.system.n1.is_some() || doc.system.n2.is_some()) {
            return Err(Error::invalid(
                field,
                "sweeping n replaces n1/n2; give n instead",
            ));
        }
    }
    if doc.combine == Some(Combine::Zip)
        && doc
            .sweep
            .windows(2)
            .any(|w| w[0].values.len() != w[1].values.len())
    {
        return Err(Error::invalid(
            "combine",
            "zip needs value lists of equal length",
        ));
    }
    Ok(())
}

/// Builds the scenario a fully specified document describes.
fn build_scenario(doc: &ConfigFile) -> Result<Scenario> {
    let sc = &doc.scenario;
    let sys = &doc.system;
    let model = sc.model.unwrap_or(default_model(sc.protocol));
    let n1 = sys.n1.or(sys.n).unwrap_or(1);
    let n2 = sys.n2.or(sys.n).unwrap_or(n1);
    let g1 = sys.g1.unwrap_or(1.0);
    let g2 = sys.g2.unwrap_or(g1 + sys.delta.unwrap_or(0.0));
    let scale = (n1 as f64).sqrt() * g1;
    let nu = match (sys.r, sys.nu, sys.k) {
        (Some(r), _, _) => r * scale,
        (_, Some(nu), _) => nu,
        (_, _, Some(k)) => transfer_condition(k)? * scale,
        _ => 0.0,
    };
    let system = SystemConfig {
        n1,
        n2,
        g1,
        g2,
        nu,
        kappa: sys.kappa.unwrap_or(0.0),
        gamma: sys.gamma.unwrap_or(0.0),
        beta: sys.beta.unwrap_or(0.0),
        blockade: sys.blockade.unwrap_or(true),
        model,
    };
    system.validate().map_err(|e| match e {
        Error::InvalidConfig { field, reason } => Error::invalid(format!("system.{field}"), reason),
        other => other,
    })?;
    if let Some(r) = sys.r {
        if !(r >= 0.0) {
            return Err(Error::invalid("system.r", "must be non-negative"));
        }
    }
    let protocol = protocol_of(sc);
    let mut scenario = Scenario::new(protocol, system);
    scenario.dissipative = sc.dissipative.unwrap_or(false);
    let default = protocol.default_grid();
    scenario.grid = TimeGrid {
        stop: doc.grid.stop.unwrap_or(default.stop),
        step: doc.grid.step.unwrap_or(default.step),
    };
    scenario.validate()?;
    Ok(scenario)
}

fn expand(doc: &ConfigFile) -> Result<Vec<Combination>> {
    let points: Vec<Vec<(Param, f64)>> = match doc.sweep.as_slice() {
        [] => vec![Vec::new()],
        [a] => a.values.iter().map(|&v| vec![(a.param, v)]).collect(),
        [a, b] => match doc.combine.unwrap_or_default() {
            Combine::Product => a
                .values
                .iter()
                .flat_map(|&x| {
                    b.values
                        .iter()
                        .map(move |&y| vec![(a.param, x), (b.param, y)])
                })
                .collect(),
            Combine::Zip => a
                .values
                .iter()
                .zip(&b.values)
                .map(|(&x, &y)| vec![(a.param, x), (b.param, y)])
                .collect(),
        },
        _ => {
            return Err(Error::invalid(
                "sweep",
                format!("at most {MAX_SWEPT} parameters can be swept"),
            ))
        }
    };
    points
        .into_iter()
        .map(|assignments| {
            let mut point = doc.clone();
            for &(p, v) in &assignments {
                apply(&mut point.system, p, v)?;
            }
            let scenario = build_scenario(&point)?;
            Ok(Combination {
                assignments,
                scenario,
            })
        })
        .collect()
}

/// Validates a parsed document and expands it into runnable combinations.
pub fn resolve(doc: ConfigFile) -> Result<SweepSpec> {
    check_combinations(&doc)?;
    check_sweeps(&doc)?;
    let config = with_defaults(&doc);
    let name = config.name.clone().unwrap_or_default();
    if name.is_empty()
        || !name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
    {
        return Err(Error::invalid(
            "name",
            "use letters, digits, '-' and '_' only",
        ));
    }
    let combinations = expand(&config)?;
    Ok(SweepSpec {
        name,
        config,
        combinations,
    })
}

pub fn parse_document(text: &str) -> Result<ConfigFile> {
    toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses, validates and expands a TOML scenario/sweep document.
pub fn parse_config(text: &str) -> Result<SweepSpec> {
    resolve(parse_document(text)?)
}

/// Applies `dotted.key=value` overrides to a document. Values are read as
/// TOML (`20`, `true`, `[1, 2]`, `"full"`); anything else is taken as a string.
pub fn apply_overrides(text: &str, overrides: &[String]) -> Result<String> {
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
    for item in overrides {
        let (key, raw) = item.split_once('=').ok_or_else(|| {
            Error::invalid(item.as_str(), "overrides look like section.key=value")
        })?;
        let key = key.trim();
        let value = match format!("v = {}", raw.trim()).parse::<toml::Table>() {
            Ok(mut t) => t.remove("v").expect("key just parsed"),
            Err(_) => toml::Value::String(raw.trim().to_string()),
        };
        let mut parts: Vec<&str> = key.split('.').collect();
        let leaf = parts
            .pop()
            .filter(|s| !s.is_empty())
            .ok_or_else(|| Error::invalid(key, "empty key"))?;
        let mut cursor = &mut table;
        for part in parts {
            cursor = cursor
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()))
                .as_table_mut()
                .ok_or_else(|| Error::invalid(key, format!("`{part}` is not a section")))?;
        }
        cursor.insert(leaf.to_string(), value);
    }
    toml::to_string(&table).map_err(|e| Error::Parse(e.to_string()))
}
