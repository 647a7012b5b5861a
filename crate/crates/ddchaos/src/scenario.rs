//! Scenario configs: a JSON schema naming a space, operator families,
//! vectors, an optional detection run, and a list of checks; compilation
//! into runtime types with field-path errors; and a runner that writes a
//! deterministic report plus profile CSVs. Re-running a scenario reproduces
//! every output byte for byte; the wall-clock timestamp is isolated in its
//! own metadata file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::{density_profile, intersect_traces, MembershipTrace, TraceOp};
use crate::detect::{
    build_block_vector, build_sample_times, classify_vector, default_event_offsets,
    hypothesis_check_cvddc, orbit_metric_trace, orbit_norm_trace, scrambled_pair_test,
    sector_condition_check, AmplitudeRule, BlockPlan, DetectParams, HypothesisReport,
    RegionKind, RegionPredicate, SamplePlan, SectorVariant, Verdict,
};
use crate::element::{Element, GridFunction, SpectralVector};
use crate::error::{Error, Result};
use crate::frechet::{SeminormFamily, SpaceKind, Weight};
use crate::models::{
    check_block_identity, check_integrated_identity, check_resolvent_identity, matrix_eigenvector,
    pair_orbit, product_family, FamilySpec, Symbol,
};
use crate::textio::{parse_complex, rows_to_csv};

pub const SCHEMA: &str = "ddchaos-scenario/1";
pub const REPORT_SCHEMA: &str = "ddchaos-report/1";

fn config_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config { path: path.into(), message: message.into() }
}

/// A complex number in config files: a bare real, an `[re, im]` pair, or a
/// literal string such as `"0.08+0.03i"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ComplexLit {
    Real(f64),
    Pair([f64; 2]),
    Text(String),
}

impl ComplexLit {
    pub fn to_complex(&self, path: &str) -> Result<Complex64> {
        let z = match self {
            ComplexLit::Real(re) => Complex64::new(*re, 0.0),
            ComplexLit::Pair([re, im]) => Complex64::new(*re, *im),
            ComplexLit::Text(s) => {
                parse_complex(s).map_err(|e| config_err(path, e.to_string()))?
            }
        };
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(config_err(path, "complex value must be finite"));
        }
        Ok(z)
    }
}

fn complex_list(lits: &[ComplexLit], path: &str) -> Result<Vec<Complex64>> {
    lits.iter()
        .enumerate()
        .map(|(i, l)| l.to_complex(&format!("{path}[{i}]")))
        .collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: String,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub space: SpaceConfig,
    pub families: Vec<FamilyConfig>,
    /// Combines the listed families into one product family per member.
    #[serde(default)]
    pub combine: Option<CombineConfig>,
    #[serde(default)]
    pub vectors: BTreeMap<String, VectorConfig>,
    #[serde(default)]
    pub detection: Option<DetectionConfig>,
    #[serde(default)]
    pub checks: Vec<CheckConfig>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineConfig {
    Product,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub kind: SpaceKind,
    pub family: SpaceFamilyConfig,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
}

fn default_n_max() -> u32 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SpaceFamilyConfig {
    WeightedLp { weight: Weight, p: f64 },
    SpectralL1,
    ExpModeL2 { a: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub label: String,
    pub kind: FamilyKindConfig,
    #[serde(default)]
    pub regularizer: Option<RegularizerConfig>,
    #[serde(default)]
    pub t_j: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FamilyKindConfig {
    SpectralFirstOrder { poly: Vec<ComplexLit> },
    SpectralFractional { zeta: f64, theta: f64, poly: Vec<ComplexLit> },
    Translation { speed: f64, weight: Weight, p: f64 },
    Cosine,
    IntegratedBlock,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RegularizerConfig {
    Identity,
    ExpPoly { l: u32 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "make", rename_all = "snake_case")]
pub enum VectorConfig {
    /// A fully spelled-out element.
    Literal { element: Element },
    /// Spectral vector from eigenvalue/coefficient pairs.
    Modes { modes: Vec<ModeConfig> },
    /// Truncated Gaussian (optionally odd) sampled on a symmetric grid.
    GaussianGrid {
        h: f64,
        x_max: f64,
        cut: f64,
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        amp: f64,
        #[serde(default)]
        odd: bool,
    },
    /// Block function from the recursive layout plan.
    BlockPlan {
        a1: f64,
        ratio_in: f64,
        ratio_gap: f64,
        k_count: u32,
        amplitude: AmplitudeConfig,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub mu: ComplexLit,
    pub c: ComplexLit,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum AmplitudeConfig {
    Linear,
    Geometric { base: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionConfig {
    pub mode: DetectionModeConfig,
    #[serde(default)]
    pub params: Option<DetectParamsConfig>,
    pub sample_plan: SamplePlanConfig,
    #[serde(default)]
    pub expect: Option<DetectionExpect>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DetectionModeConfig {
    Classify { vector: String },
    ScrambledPair { x: String, y: String },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectParamsConfig {
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub m: Option<u32>,
    #[serde(default)]
    pub m_levels: Option<Vec<f64>>,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub tail_window: Option<f64>,
}

impl DetectParamsConfig {
    fn build(&self, threads: usize) -> DetectParams {
        let base = DetectParams::default();
        DetectParams {
            eps: self.eps.unwrap_or(base.eps),
            sigma: self.sigma.unwrap_or(base.sigma),
            m: self.m.unwrap_or(base.m),
            m_levels: self.m_levels.clone().unwrap_or(base.m_levels),
            threshold: self.threshold.unwrap_or(base.threshold),
            tail_window: self.tail_window.unwrap_or(base.tail_window),
            threads,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplePlanConfig {
    pub t_min: f64,
    pub horizon: f64,
    #[serde(default)]
    pub events: Vec<f64>,
    /// Adds block edges of a named block vector, divided by each speed, to
    /// the event list.
    #[serde(default)]
    pub block_events: Option<BlockEventsConfig>,
    #[serde(default)]
    pub offsets: Option<Vec<f64>>,
    pub per_decade: u32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockEventsConfig {
    pub vector: String,
    pub speeds: Vec<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionExpect {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scrambled_pair: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub near_zero: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_unbounded: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irregular: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_separation_density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_proximity_density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_near_zero_density: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CheckConfig {
    /// Decay/growth sector conditions for a list of polynomial symbols over
    /// an eigenvalue region.
    Sector {
        name: String,
        variant: SectorVariantConfig,
        polys: Vec<Vec<ComplexLit>>,
        region: RegionConfig,
    },
    /// Residual of the convolution resolvent identity for one fractional
    /// family and spectral vector.
    Resolvent {
        name: String,
        family: String,
        vector: String,
        t: f64,
        step: f64,
        max_residual: f64,
    },
    /// Residual of the integrated-orbit identity of order alpha.
    Integrated {
        name: String,
        family: String,
        vector: String,
        alpha: f64,
        t: f64,
        step: f64,
        max_residual: f64,
    },
    /// Residual of the once-integrated block-family identity on a grid pair.
    BlockIdentity {
        name: String,
        v1: String,
        v2: String,
        t: f64,
        quad_step: f64,
        max_residual: f64,
    },
    /// The companion-block eigenvector orbit stays on the eigenline.
    MatrixEigen {
        name: String,
        lambda: ComplexLit,
        a: f64,
        t: f64,
        max_residual: f64,
    },
    /// Orbit distance to zero sampled at increasing times must end below a
    /// bound, optionally decreasing at every step.
    Decay {
        name: String,
        family: String,
        vector: String,
        times: Vec<f64>,
        #[serde(default)]
        strictly_decreasing: bool,
        final_below: f64,
    },
    /// Orbit seminorm sampled at increasing times must end above a bound,
    /// optionally increasing at every step.
    Growth {
        name: String,
        family: String,
        vector: String,
        times: Vec<f64>,
        #[serde(default)]
        strictly_increasing: bool,
        final_above: f64,
    },
    /// The decay/growth hypothesis pair over a dedicated sample plan.
    Hypotheses {
        name: String,
        x0: Vec<String>,
        candidate: String,
        decay_tol: f64,
        plan: SamplePlanConfig,
        #[serde(default)]
        params: Option<DetectParamsConfig>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SectorVariantConfig {
    Ab,
    AbPrime { zeta: f64, theta: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub kind: RegionKindConfig,
    #[serde(default)]
    pub negate: bool,
    pub samples: Vec<ComplexLit>,
    pub cluster: ComplexLit,
    #[serde(default)]
    pub growth_candidates: Vec<ComplexLit>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RegionKindConfig {
    HalfPlaneNeg,
    HalfPlanePos,
    Sector { alpha: f64 },
    ClosedSectorComplement { alpha: f64 },
    Disk { center: ComplexLit, radius: f64 },
    LambdaRegion { a: f64, b: f64, c: f64 },
}

/// Parses a config from JSON text, reporting the field path of the first
/// schema violation.
pub fn load_config(text: &str) -> Result<ScenarioConfig> {
    let mut de = serde_json::Deserializer::from_str(text);
    let cfg: ScenarioConfig = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| config_err(e.path().to_string(), e.inner().to_string()))?;
    if cfg.schema != SCHEMA {
        return Err(config_err(
            "schema",
            format!("expected {SCHEMA:?}, got {:?}", cfg.schema),
        ));
    }
    if cfg.name.is_empty() {
        return Err(config_err("name", "scenario name must not be empty"));
    }
    Ok(cfg)
}

pub struct CompiledScenario {
    pub name: String,
    pub description: String,
    pub space: SeminormFamily,
    pub families: Vec<FamilySpec>,
    pub vectors: BTreeMap<String, Element>,
    detection: Option<CompiledDetection>,
    checks: Vec<CompiledCheck>,
}

struct CompiledDetection {
    mode: DetectionModeConfig,
    params: DetectParamsConfig,
    plan: SamplePlan,
    expect: Option<DetectionExpect>,
}

enum CompiledCheck {
    Sector {
        name: String,
        polys: Vec<Symbol>,
        region: RegionPredicate,
        variant: SectorVariant,
    },
    Resolvent { name: String, family: usize, vector: String, t: f64, step: f64, max_residual: f64 },
    Integrated {
        name: String,
        family: usize,
        vector: String,
        alpha: f64,
        t: f64,
        step: f64,
        max_residual: f64,
    },
    BlockIdentity { name: String, v1: String, v2: String, t: f64, quad_step: f64, max_residual: f64 },
    MatrixEigen { name: String, lambda: Complex64, a: f64, t: f64, max_residual: f64 },
    Decay {
        name: String,
        family: usize,
        vector: String,
        times: Vec<f64>,
        strictly_decreasing: bool,
        final_below: f64,
    },
    Growth {
        name: String,
        family: usize,
        vector: String,
        times: Vec<f64>,
        strictly_increasing: bool,
        final_above: f64,
    },
    Hypotheses {
        name: String,
        x0: Vec<String>,
        candidate: String,
        decay_tol: f64,
        plan: SamplePlan,
        params: DetectParamsConfig,
    },
}

impl CompiledCheck {
    fn name(&self) -> &str {
        match self {
            CompiledCheck::Sector { name, .. }
            | CompiledCheck::Resolvent { name, .. }
            | CompiledCheck::Integrated { name, .. }
            | CompiledCheck::BlockIdentity { name, .. }
            | CompiledCheck::MatrixEigen { name, .. }
            | CompiledCheck::Decay { name, .. }
            | CompiledCheck::Growth { name, .. }
            | CompiledCheck::Hypotheses { name, .. } => name,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CompiledCheck::Sector { .. } => "sector",
            CompiledCheck::Resolvent { .. } => "resolvent",
            CompiledCheck::Integrated { .. } => "integrated",
            CompiledCheck::BlockIdentity { .. } => "block_identity",
            CompiledCheck::MatrixEigen { .. } => "matrix_eigen",
            CompiledCheck::Decay { .. } => "decay",
            CompiledCheck::Growth { .. } => "growth",
            CompiledCheck::Hypotheses { .. } => "hypotheses",
        }
    }
}

fn check_file_name(name: &str, path: &str) -> Result<()> {
    if name.is_empty()
        || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    {
        return Err(config_err(
            path,
            format!("name {name:?} must be nonempty ASCII alphanumeric with - or _"),
        ));
    }
    Ok(())
}

fn compile_space(cfg: &SpaceConfig) -> Result<SeminormFamily> {
    let built = match &cfg.family {
        SpaceFamilyConfig::WeightedLp { weight, p } => {
            SeminormFamily::weighted_lp(cfg.kind, *weight, *p, cfg.n_max)
        }
        SpaceFamilyConfig::SpectralL1 => SeminormFamily::spectral_l1(cfg.kind, cfg.n_max),
        SpaceFamilyConfig::ExpModeL2 { a } => SeminormFamily::exp_mode_l2(cfg.kind, *a, cfg.n_max),
    };
    built.map_err(|e| config_err("space", e.to_string()))
}

fn compile_family(cfg: &FamilyConfig, idx: usize) -> Result<FamilySpec> {
    let path = format!("families[{idx}]");
    check_file_name(&cfg.label, &format!("{path}.label"))?;
    let mut spec = match &cfg.kind {
        FamilyKindConfig::SpectralFirstOrder { poly } => {
            FamilySpec::first_order(&cfg.label, complex_list(poly, &format!("{path}.kind.poly"))?)
        }
        FamilyKindConfig::SpectralFractional { zeta, theta, poly } => FamilySpec::fractional(
            &cfg.label,
            *zeta,
            *theta,
            complex_list(poly, &format!("{path}.kind.poly"))?,
        ),
        FamilyKindConfig::Translation { speed, weight, p } => {
            FamilySpec::translation(&cfg.label, *speed, *weight, *p)
        }
        FamilyKindConfig::Cosine => FamilySpec::cosine(&cfg.label),
        FamilyKindConfig::IntegratedBlock => FamilySpec::integrated_block(&cfg.label),
    };
    if let Some(reg) = &cfg.regularizer {
        spec.regularizer = match reg {
            RegularizerConfig::Identity => crate::models::Regularizer::Identity,
            RegularizerConfig::ExpPoly { l } => crate::models::Regularizer::ExpPoly { l: *l },
        };
    }
    if let Some(t_j) = cfg.t_j {
        spec.t_j = t_j;
    }
    spec.validate().map_err(|e| config_err(path, e.to_string()))?;
    Ok(spec)
}

fn compile_vector(name: &str, cfg: &VectorConfig) -> Result<Element> {
    let path = format!("vectors.{name}");
    match cfg {
        VectorConfig::Literal { element } => Ok(element.clone()),
        VectorConfig::Modes { modes } => {
            let mut pairs = Vec::with_capacity(modes.len());
            for (i, m) in modes.iter().enumerate() {
                let mu = m.mu.to_complex(&format!("{path}.modes[{i}].mu"))?;
                let c = m.c.to_complex(&format!("{path}.modes[{i}].c"))?;
                pairs.push((mu, c));
            }
            Ok(Element::Spectral(SpectralVector::from_modes(pairs)))
        }
        VectorConfig::GaussianGrid { h, x_max, cut, center, amp, odd } => {
            if !(cut.is_finite() && *cut > 0.0) {
                return Err(config_err(format!("{path}.cut"), "cut radius must be positive"));
            }
            let (c0, a0, parity) = (*center, *amp, *odd);
            let f = move |x: f64| {
                let u = x - c0;
                if u.abs() > *cut {
                    0.0
                } else {
                    let g = a0 * (-u * u).exp();
                    if parity { u * g } else { g }
                }
            };
            let grid = GridFunction::from_fn(*h, *x_max, f)
                .map_err(|e| config_err(path, e.to_string()))?;
            Ok(Element::Grid(grid))
        }
        VectorConfig::BlockPlan { a1, ratio_in, ratio_gap, k_count, amplitude } => {
            let plan = BlockPlan {
                a1: *a1,
                ratio_in: *ratio_in,
                ratio_gap: *ratio_gap,
                k_count: *k_count,
                amplitude: match amplitude {
                    AmplitudeConfig::Linear => AmplitudeRule::Linear,
                    AmplitudeConfig::Geometric { base } => AmplitudeRule::Geometric { base: *base },
                },
            };
            let blocks = build_block_vector(&plan).map_err(|e| config_err(path, e.to_string()))?;
            Ok(Element::Block(blocks))
        }
    }
}

fn compile_plan(
    cfg: &SamplePlanConfig,
    vectors: &BTreeMap<String, Element>,
    path: &str,
) -> Result<SamplePlan> {
    let mut events = cfg.events.clone();
    if let Some(be) = &cfg.block_events {
        let elem = vectors.get(&be.vector).ok_or_else(|| {
            config_err(
                format!("{path}.block_events.vector"),
                format!("unknown vector {:?}", be.vector),
            )
        })?;
        let Element::Block(bf) = elem else {
            return Err(config_err(
                format!("{path}.block_events.vector"),
                format!("vector {:?} is not a block function", be.vector),
            ));
        };
        for &v in &be.speeds {
            if !(v.is_finite() && v > 0.0) {
                return Err(config_err(
                    format!("{path}.block_events.speeds"),
                    "speeds must be positive",
                ));
            }
            for blk in bf.blocks() {
                events.push(blk.a / v);
                events.push(blk.b / v);
            }
        }
    }
    Ok(SamplePlan {
        t_min: cfg.t_min,
        horizon: cfg.horizon,
        events,
        offsets: cfg.offsets.clone().unwrap_or_else(default_event_offsets),
        per_decade: cfg.per_decade,
    })
}

fn compile_region(cfg: &RegionConfig, path: &str) -> Result<RegionPredicate> {
    let kind = match &cfg.kind {
        RegionKindConfig::HalfPlaneNeg => RegionKind::HalfPlaneNeg,
        RegionKindConfig::HalfPlanePos => RegionKind::HalfPlanePos,
        RegionKindConfig::Sector { alpha } => RegionKind::Sector { alpha: *alpha },
        RegionKindConfig::ClosedSectorComplement { alpha } => {
            RegionKind::ClosedSectorComplement { alpha: *alpha }
        }
        RegionKindConfig::Disk { center, radius } => RegionKind::Disk {
            center: center.to_complex(&format!("{path}.kind.center"))?,
            radius: *radius,
        },
        RegionKindConfig::LambdaRegion { a, b, c } => {
            RegionKind::LambdaRegion { a: *a, b: *b, c: *c }
        }
    };
    let region = RegionPredicate {
        kind,
        negate: cfg.negate,
        samples: complex_list(&cfg.samples, &format!("{path}.samples"))?,
        cluster: cfg.cluster.to_complex(&format!("{path}.cluster"))?,
        growth_candidates: complex_list(
            &cfg.growth_candidates,
            &format!("{path}.growth_candidates"),
        )?,
    };
    region.validate().map_err(|e| config_err(path.to_string(), e.to_string()))?;
    Ok(region)
}

fn find_family(families: &[FamilySpec], label: &str, path: &str) -> Result<usize> {
    families
        .iter()
        .position(|f| f.label == label)
        .ok_or_else(|| config_err(path, format!("unknown family {label:?}")))
}

fn require_vector<'v>(
    vectors: &'v BTreeMap<String, Element>,
    name: &str,
    path: &str,
) -> Result<&'v Element> {
    vectors
        .get(name)
        .ok_or_else(|| config_err(path, format!("unknown vector {name:?}")))
}

/// Resolves a parsed config into runtime types, validating every
/// cross-reference. Numeric work is deferred to `run`.
pub fn compile(cfg: &ScenarioConfig) -> Result<CompiledScenario> {
    let space = compile_space(&cfg.space)?;
    if cfg.families.is_empty() {
        return Err(config_err("families", "need at least one family"));
    }
    let mut families = Vec::with_capacity(cfg.families.len());
    for (i, fam) in cfg.families.iter().enumerate() {
        families.push(compile_family(fam, i)?);
    }
    for (i, fam) in families.iter().enumerate() {
        if families[..i].iter().any(|f| f.label == fam.label) {
            return Err(config_err(
                format!("families[{i}].label"),
                format!("duplicate label {:?}", fam.label),
            ));
        }
    }
    if let Some(CombineConfig::Product) = cfg.combine {
        families = product_family(&families).map_err(|e| config_err("combine", e.to_string()))?;
    }

    let mut vectors = BTreeMap::new();
    for (name, vcfg) in &cfg.vectors {
        check_file_name(name, &format!("vectors.{name}"))?;
        vectors.insert(name.clone(), compile_vector(name, vcfg)?);
    }

    let detection = match &cfg.detection {
        None => None,
        Some(d) => {
            match &d.mode {
                DetectionModeConfig::Classify { vector } => {
                    require_vector(&vectors, vector, "detection.mode.vector")?;
                }
                DetectionModeConfig::ScrambledPair { x, y } => {
                    require_vector(&vectors, x, "detection.mode.x")?;
                    require_vector(&vectors, y, "detection.mode.y")?;
                }
            }
            Some(CompiledDetection {
                mode: d.mode.clone(),
                params: d.params.clone().unwrap_or_default(),
                plan: compile_plan(&d.sample_plan, &vectors, "detection.sample_plan")?,
                expect: d.expect.clone(),
            })
        }
    };

    let mut checks = Vec::with_capacity(cfg.checks.len());
    let mut seen_names = std::collections::BTreeSet::new();
    for (i, ccfg) in cfg.checks.iter().enumerate() {
        let path = format!("checks[{i}]");
        let compiled = compile_check(ccfg, &families, &vectors, &path)?;
        if !seen_names.insert(compiled.name().to_string()) {
            return Err(config_err(
                format!("{path}.name"),
                format!("duplicate check name {:?}", compiled.name()),
            ));
        }
        checks.push(compiled);
    }

    Ok(CompiledScenario {
        name: cfg.name.clone(),
        description: cfg.description.clone(),
        space,
        families,
        vectors,
        detection,
        checks,
    })
}

fn compile_check(
    cfg: &CheckConfig,
    families: &[FamilySpec],
    vectors: &BTreeMap<String, Element>,
    path: &str,
) -> Result<CompiledCheck> {
    Ok(match cfg {
        CheckConfig::Sector { name, variant, polys, region } => {
            check_file_name(name, &format!("{path}.name"))?;
            let mut symbols = Vec::with_capacity(polys.len());
            for (i, coeffs) in polys.iter().enumerate() {
                symbols.push(Symbol::poly(complex_list(
                    coeffs,
                    &format!("{path}.polys[{i}]"),
                )?));
            }
            CompiledCheck::Sector {
                name: name.clone(),
                polys: symbols,
                region: compile_region(region, &format!("{path}.region"))?,
                variant: match variant {
                    SectorVariantConfig::Ab => SectorVariant::AB,
                    SectorVariantConfig::AbPrime { zeta, theta } => {
                        SectorVariant::ABprime { zeta: *zeta, theta: *theta }
                    }
                },
            }
        }
        CheckConfig::Resolvent { name, family, vector, t, step, max_residual } => {
            check_file_name(name, &format!("{path}.name"))?;
            let fam = find_family(families, family, &format!("{path}.family"))?;
            let elem = require_vector(vectors, vector, &format!("{path}.vector"))?;
            if !matches!(elem, Element::Spectral(_)) {
                return Err(config_err(
                    format!("{path}.vector"),
                    format!("vector {vector:?} is not spectral"),
                ));
            }
            CompiledCheck::Resolvent {
                name: name.clone(),
                family: fam,
                vector: vector.clone(),
                t: *t,
                step: *step,
                max_residual: *max_residual,
            }
        }
        CheckConfig::Integrated { name, family, vector, alpha, t, step, max_residual } => {
            check_file_name(name, &format!("{path}.name"))?;
            CompiledCheck::Integrated {
                name: name.clone(),
                family: find_family(families, family, &format!("{path}.family"))?,
                vector: require_named(vectors, vector, path)?,
                alpha: *alpha,
                t: *t,
                step: *step,
                max_residual: *max_residual,
            }
        }
        CheckConfig::BlockIdentity { name, v1, v2, t, quad_step, max_residual } => {
            check_file_name(name, &format!("{path}.name"))?;
            for v in [v1, v2] {
                let elem = require_vector(vectors, v, &format!("{path}.v1/v2"))?;
                if !matches!(elem, Element::Grid(_)) {
                    return Err(config_err(
                        format!("{path}.v1/v2"),
                        format!("vector {v:?} is not a grid function"),
                    ));
                }
            }
            CompiledCheck::BlockIdentity {
                name: name.clone(),
                v1: v1.clone(),
                v2: v2.clone(),
                t: *t,
                quad_step: *quad_step,
                max_residual: *max_residual,
            }
        }
        CheckConfig::MatrixEigen { name, lambda, a, t, max_residual } => {
            check_file_name(name, &format!("{path}.name"))?;
            CompiledCheck::MatrixEigen {
                name: name.clone(),
                lambda: lambda.to_complex(&format!("{path}.lambda"))?,
                a: *a,
                t: *t,
                max_residual: *max_residual,
            }
        }
        CheckConfig::Decay { name, family, vector, times, strictly_decreasing, final_below } => {
            check_file_name(name, &format!("{path}.name"))?;
            require_increasing_times(times, path)?;
            CompiledCheck::Decay {
                name: name.clone(),
                family: find_family(families, family, &format!("{path}.family"))?,
                vector: require_named(vectors, vector, path)?,
                times: times.clone(),
                strictly_decreasing: *strictly_decreasing,
                final_below: *final_below,
            }
        }
        CheckConfig::Growth { name, family, vector, times, strictly_increasing, final_above } => {
            check_file_name(name, &format!("{path}.name"))?;
            require_increasing_times(times, path)?;
            CompiledCheck::Growth {
                name: name.clone(),
                family: find_family(families, family, &format!("{path}.family"))?,
                vector: require_named(vectors, vector, path)?,
                times: times.clone(),
                strictly_increasing: *strictly_increasing,
                final_above: *final_above,
            }
        }
        CheckConfig::Hypotheses { name, x0, candidate, decay_tol, plan, params } => {
            check_file_name(name, &format!("{path}.name"))?;
            if x0.is_empty() {
                return Err(config_err(format!("{path}.x0"), "need at least one sample vector"));
            }
            for v in x0 {
                require_vector(vectors, v, &format!("{path}.x0"))?;
            }
            require_vector(vectors, candidate, &format!("{path}.candidate"))?;
            CompiledCheck::Hypotheses {
                name: name.clone(),
                x0: x0.clone(),
                candidate: candidate.clone(),
                decay_tol: *decay_tol,
                plan: compile_plan(plan, vectors, &format!("{path}.plan"))?,
                params: params.clone().unwrap_or_default(),
            }
        }
    })
}

fn require_named(
    vectors: &BTreeMap<String, Element>,
    name: &str,
    path: &str,
) -> Result<String> {
    require_vector(vectors, name, &format!("{path}.vector"))?;
    Ok(name.to_string())
}

fn require_increasing_times(times: &[f64], path: &str) -> Result<()> {
    if times.is_empty() {
        return Err(config_err(format!("{path}.times"), "need at least one time"));
    }
    let mut prev = 0.0;
    for &t in times {
        if !(t.is_finite() && t > prev) {
            return Err(config_err(
                format!("{path}.times"),
                "times must be finite, positive, strictly increasing",
            ));
        }
        prev = t;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Caps every sample plan's horizon when set.
    pub horizon: Option<f64>,
    pub seed: u64,
    pub threads: usize,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        RunOptions { out_dir: out_dir.into(), horizon: None, seed: 0, threads: 1 }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub kind: &'static str,
    pub ok: bool,
    /// Measured residuals or sampled values, check-dependent.
    pub measured: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypotheses: Option<HypothesisReport>,
}

#[derive(Debug, Serialize)]
pub struct ExpectationOutcome {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub ok: bool,
}

#[derive(Debug, Serialize)]
pub struct ScenarioReport {
    pub schema: &'static str,
    pub scenario: String,
    pub description: String,
    pub seed: u64,
    pub space: String,
    pub families: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    pub checks: Vec<CheckOutcome>,
    pub expectations: Vec<ExpectationOutcome>,
    pub all_ok: bool,
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn capped(plan: &SamplePlan, cap: Option<f64>) -> SamplePlan {
    let mut plan = plan.clone();
    if let Some(h) = cap {
        plan.horizon = plan.horizon.min(h);
    }
    plan
}

/// Intersects one membership trace per column of `rows` (one column per
/// family) under the predicate and returns the And-combined trace.
fn intersected_trace(
    times: &[f64],
    rows: &[Vec<f64>],
    pred: impl Fn(f64) -> bool,
) -> Result<MembershipTrace> {
    let n_fam = rows.first().map_or(0, Vec::len);
    let mut acc: Option<MembershipTrace> = None;
    for j in 0..n_fam {
        let tr = MembershipTrace::new(
            times.iter().zip(rows).map(|(&t, row)| (t, pred(row[j]))).collect(),
        )?;
        acc = Some(match acc {
            None => tr,
            Some(prev) => intersect_traces(&prev, &tr, TraceOp::And)?,
        });
    }
    acc.ok_or_else(|| Error::parameter("rows", "no families to intersect"))
}

fn family_value_rows(
    families: &[FamilySpec],
    space: &SeminormFamily,
    x: &Element,
    times: &[f64],
    metric: bool,
    m: u32,
) -> Result<Vec<Vec<f64>>> {
    let mut per_family = Vec::with_capacity(families.len());
    for spec in families {
        let tr = if metric {
            orbit_metric_trace(spec, space, x, times)?
        } else {
            orbit_norm_trace(spec, space, x, m, times)?
        };
        per_family.push(tr.values);
    }
    Ok((0..times.len()).map(|i| per_family.iter().map(|v| v[i]).collect()).collect())
}

fn flag_expectation(name: &str, expected: Option<bool>, actual: bool) -> Option<ExpectationOutcome> {
    expected.map(|e| ExpectationOutcome {
        name: name.to_string(),
        expected: e.to_string(),
        actual: actual.to_string(),
        ok: e == actual,
    })
}

fn density_expectation(
    name: &str,
    min: Option<f64>,
    actual: Option<f64>,
) -> Option<ExpectationOutcome> {
    min.map(|m| ExpectationOutcome {
        name: name.to_string(),
        expected: format!(">= {m}"),
        actual: actual.map_or_else(|| "absent".to_string(), |a| a.to_string()),
        ok: actual.is_some_and(|a| a >= m),
    })
}

fn eval_expectations(verdict: &Verdict, expect: &DetectionExpect) -> Vec<ExpectationOutcome> {
    [
        flag_expectation("scrambled_pair", expect.scrambled_pair, verdict.scrambled_pair),
        flag_expectation("near_zero", expect.near_zero, verdict.near_zero),
        flag_expectation("m_unbounded", expect.m_unbounded, verdict.m_unbounded),
        flag_expectation("irregular", expect.irregular, verdict.irregular),
        density_expectation(
            "min_separation_density",
            expect.min_separation_density,
            verdict.separation_density,
        ),
        density_expectation(
            "min_proximity_density",
            expect.min_proximity_density,
            verdict.proximity_density,
        ),
        density_expectation(
            "min_near_zero_density",
            expect.min_near_zero_density,
            verdict.near_zero_density,
        ),
    ]
    .into_iter()
    .flatten()
    .collect()
}

impl CompiledScenario {
    fn vector(&self, name: &str) -> &Element {
        self.vectors.get(name).expect("vector names are resolved at compile time")
    }

    fn run_detection(
        &self,
        det: &CompiledDetection,
        opts: &RunOptions,
        csv_out: &mut Vec<(String, String)>,
    ) -> Result<(Verdict, Vec<ExpectationOutcome>, f64)> {
        let plan = capped(&det.plan, opts.horizon);
        let times = build_sample_times(&plan)?;
        let params = det.params.build(opts.threads);
        let verdict = match &det.mode {
            DetectionModeConfig::Classify { vector } => classify_vector(
                &self.families,
                &self.space,
                self.vector(vector),
                &params,
                &times,
            )?,
            DetectionModeConfig::ScrambledPair { x, y } => scrambled_pair_test(
                &self.families,
                &self.space,
                self.vector(x),
                self.vector(y),
                &params,
                &times,
            )?,
        };

        if verdict.inconclusive.is_none() {
            match &det.mode {
                DetectionModeConfig::Classify { vector } => {
                    let x = self.vector(vector);
                    let d_rows =
                        family_value_rows(&self.families, &self.space, x, &times, true, params.m)?;
                    let p_rows =
                        family_value_rows(&self.families, &self.space, x, &times, false, params.m)?;
                    let near = intersected_trace(&times, &d_rows, |d| d < params.eps)?;
                    csv_out.push((
                        "near_zero_profile.csv".to_string(),
                        rows_to_csv("t", "ratio", &density_profile(&near)),
                    ));
                    for &level in &params.m_levels {
                        let tr = intersected_trace(&times, &p_rows, |p| p > level)?;
                        csv_out.push((
                            format!("unbounded_{level}_profile.csv"),
                            rows_to_csv("t", "ratio", &density_profile(&tr)),
                        ));
                    }
                }
                DetectionModeConfig::ScrambledPair { x, y } => {
                    let diff = self.vector(x).sub(self.vector(y))?;
                    let d_rows = family_value_rows(
                        &self.families,
                        &self.space,
                        &diff,
                        &times,
                        true,
                        params.m,
                    )?;
                    let sep = intersected_trace(&times, &d_rows, |d| d >= params.sigma)?;
                    let prox = intersected_trace(&times, &d_rows, |d| d < params.eps)?;
                    csv_out.push((
                        "separation_profile.csv".to_string(),
                        rows_to_csv("t", "ratio", &density_profile(&sep)),
                    ));
                    csv_out.push((
                        "proximity_profile.csv".to_string(),
                        rows_to_csv("t", "ratio", &density_profile(&prox)),
                    ));
                }
            }
        }

        let mut expectations = Vec::new();
        if let Some(expect) = &det.expect {
            expectations = eval_expectations(&verdict, expect);
        }
        Ok((verdict, expectations, plan.horizon))
    }

    fn run_check(
        &self,
        check: &CompiledCheck,
        opts: &RunOptions,
        csv_out: &mut Vec<(String, String)>,
    ) -> Result<CheckOutcome> {
        let name = check.name().to_string();
        let kind = check.kind();
        Ok(match check {
            CompiledCheck::Sector { polys, region, variant, .. } => {
                let report = sector_condition_check(polys, region, variant)?;
                let detail = report
                    .checks
                    .iter()
                    .map(|c| format!("{} {:?}", c.name, c.status))
                    .collect::<Vec<_>>()
                    .join("; ");
                CheckOutcome {
                    name,
                    kind,
                    ok: report.all_passed(),
                    measured: Vec::new(),
                    bound: None,
                    detail,
                    hypotheses: Some(report),
                }
            }
            CompiledCheck::Resolvent { family, vector, t, step, max_residual, .. } => {
                let Element::Spectral(sv) = self.vector(vector) else {
                    unreachable!("checked at compile time")
                };
                let r = check_resolvent_identity(&self.families[*family], sv, *t, *step)?;
                residual_outcome(name, kind, r, *max_residual)
            }
            CompiledCheck::Integrated { family, vector, alpha, t, step, max_residual, .. } => {
                let r = check_integrated_identity(
                    &self.families[*family],
                    self.vector(vector),
                    *alpha,
                    *t,
                    *step,
                )?;
                residual_outcome(name, kind, r, *max_residual)
            }
            CompiledCheck::BlockIdentity { v1, v2, t, quad_step, max_residual, .. } => {
                let (Element::Grid(g1), Element::Grid(g2)) = (self.vector(v1), self.vector(v2))
                else {
                    unreachable!("checked at compile time")
                };
                let r = check_block_identity((g1, g2), *t, *quad_step)?;
                residual_outcome(name, kind, r, *max_residual)
            }
            CompiledCheck::MatrixEigen { lambda, a, t, max_residual, .. } => {
                let pair = matrix_eigenvector(*lambda, *a)?;
                let moved = pair_orbit(&pair, *t)?;
                let w = (lambda * t).exp();
                let r1 = (moved.first.coeff(*lambda) - w).norm();
                let r2 = (moved.second.coeff(*lambda) - w * lambda).norm();
                residual_outcome(name, kind, r1.max(r2), *max_residual)
            }
            CompiledCheck::Decay {
                family, vector, times, strictly_decreasing, final_below, ..
            } => {
                let tr = orbit_metric_trace(
                    &self.families[*family],
                    &self.space,
                    self.vector(vector),
                    times,
                )?;
                let last = *tr.values.last().expect("times validated nonempty");
                let mut ok = last < *final_below;
                let mut detail = format!("final {last} vs bound {final_below}");
                if *strictly_decreasing {
                    if let Some(k) = tr.values.windows(2).position(|w| w[1] >= w[0]) {
                        ok = false;
                        detail = format!("{detail}; not decreasing at step {k}");
                    }
                }
                csv_out.push((format!("{name}.csv"), rows_to_csv("t", "value", &pair_rows(times, &tr.values))));
                CheckOutcome {
                    name,
                    kind,
                    ok,
                    measured: tr.values,
                    bound: Some(*final_below),
                    detail,
                    hypotheses: None,
                }
            }
            CompiledCheck::Growth {
                family, vector, times, strictly_increasing, final_above, ..
            } => {
                let tr = orbit_norm_trace(
                    &self.families[*family],
                    &self.space,
                    self.vector(vector),
                    1,
                    times,
                )?;
                let last = *tr.values.last().expect("times validated nonempty");
                let mut ok = last > *final_above;
                let mut detail = format!("final {last} vs bound {final_above}");
                if *strictly_increasing {
                    if let Some(k) = tr.values.windows(2).position(|w| w[1] <= w[0]) {
                        ok = false;
                        detail = format!("{detail}; not increasing at step {k}");
                    }
                }
                csv_out.push((format!("{name}.csv"), rows_to_csv("t", "value", &pair_rows(times, &tr.values))));
                CheckOutcome {
                    name,
                    kind,
                    ok,
                    measured: tr.values,
                    bound: Some(*final_above),
                    detail,
                    hypotheses: None,
                }
            }
            CompiledCheck::Hypotheses { x0, candidate, decay_tol, plan, params, .. } => {
                let plan = capped(plan, opts.horizon);
                let times = build_sample_times(&plan)?;
                let samples: Vec<Element> = x0.iter().map(|n| self.vector(n).clone()).collect();
                let report = hypothesis_check_cvddc(
                    &self.families,
                    &self.space,
                    &samples,
                    self.vector(candidate),
                    &params.build(opts.threads),
                    &times,
                    *decay_tol,
                )?;
                let detail = report
                    .checks
                    .iter()
                    .map(|c| format!("{} {:?}", c.name, c.status))
                    .collect::<Vec<_>>()
                    .join("; ");
                CheckOutcome {
                    name,
                    kind,
                    ok: report.all_passed(),
                    measured: Vec::new(),
                    bound: None,
                    detail,
                    hypotheses: Some(report),
                }
            }
        })
    }
}

fn pair_rows(times: &[f64], values: &[f64]) -> Vec<(f64, f64)> {
    times.iter().copied().zip(values.iter().copied()).collect()
}

fn residual_outcome(name: String, kind: &'static str, r: f64, bound: f64) -> CheckOutcome {
    CheckOutcome {
        name,
        kind,
        ok: r.is_finite() && r <= bound,
        measured: vec![r],
        bound: Some(bound),
        detail: format!("residual {r} vs bound {bound}"),
        hypotheses: None,
    }
}

fn summary_text(report: &ScenarioReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("scenario {}\n", report.scenario));
    if !report.description.is_empty() {
        out.push_str(&format!("{}\n", report.description));
    }
    if let Some(v) = &report.verdict {
        out.push_str(&format!("verdict kind={}", v.kind));
        if let Some(s) = &v.inconclusive {
            out.push_str(&format!(" inconclusive: {s}\n"));
        } else {
            if let Some(d) = v.near_zero_density {
                out.push_str(&format!(" near_zero={} (density {})", v.near_zero, d));
            }
            if !v.unbounded.is_empty() {
                let levels = v
                    .unbounded
                    .iter()
                    .map(|l| format!("{}:{}", l.level, l.density))
                    .collect::<Vec<_>>()
                    .join(" ");
                out.push_str(&format!(" m_unbounded={} ({levels})", v.m_unbounded));
            }
            if v.irregular {
                out.push_str(" irregular=true");
            }
            if let (Some(s), Some(p)) = (v.separation_density, v.proximity_density) {
                out.push_str(&format!(
                    " scrambled_pair={} (separation {s}, proximity {p})",
                    v.scrambled_pair
                ));
            }
            out.push('\n');
        }
    }
    for c in &report.checks {
        let status = if c.ok { "PASS" } else { "FAIL" };
        out.push_str(&format!("check {} [{}] {status}: {}\n", c.name, c.kind, c.detail));
    }
    for e in &report.expectations {
        let status = if e.ok { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "expectation {} {status}: expected {}, actual {}\n",
            e.name, e.expected, e.actual
        ));
    }
    out.push_str(if report.all_ok { "status ok\n" } else { "status failed\n" });
    out
}

/// Runs a compiled scenario and writes `report.json`, `summary.txt`, profile
/// CSVs, and `run_meta.json` (the only file carrying a timestamp) into the
/// output directory. Returns the report; the caller maps `all_ok` to an
/// exit status.
pub fn run(scenario: &CompiledScenario, opts: &RunOptions) -> Result<ScenarioReport> {
    fs::create_dir_all(&opts.out_dir).map_err(|e| Error::Io {
        path: opts.out_dir.display().to_string(),
        message: e.to_string(),
    })?;

    let mut csv_out: Vec<(String, String)> = Vec::new();
    let mut verdict = None;
    let mut expectations = Vec::new();
    let mut horizon = None;
    if let Some(det) = &scenario.detection {
        let (v, e, h) = scenario.run_detection(det, opts, &mut csv_out)?;
        verdict = Some(v);
        expectations = e;
        horizon = Some(h);
    }

    let mut checks = Vec::with_capacity(scenario.checks.len());
    for check in &scenario.checks {
        checks.push(scenario.run_check(check, opts, &mut csv_out)?);
    }

    let detection_ok = verdict
        .as_ref()
        .is_none_or(|v| v.inconclusive.is_none());
    let all_ok = detection_ok && checks.iter().all(|c| c.ok) && expectations.iter().all(|e| e.ok);

    let report = ScenarioReport {
        schema: REPORT_SCHEMA,
        scenario: scenario.name.clone(),
        description: scenario.description.clone(),
        seed: opts.seed,
        space: scenario.space.descriptor().to_string(),
        families: scenario.families.iter().map(|f| f.label.clone()).collect(),
        horizon,
        verdict,
        checks,
        expectations,
        all_ok,
    };

    let mut json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Unsupported(format!("report serialization: {e}")))?;
    json.push('\n');
    write_text(&opts.out_dir, "report.json", &json)?;
    write_text(&opts.out_dir, "summary.txt", &summary_text(&report))?;
    for (file, text) in &csv_out {
        write_text(&opts.out_dir, file, text)?;
    }
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    write_text(
        &opts.out_dir,
        "run_meta.json",
        &format!("{{\n  \"generated_at_unix_seconds\": {now}\n}}\n"),
    )?;
    Ok(report)
}

/// Parses, compiles, and runs a config in one call.
pub fn run_config_text(text: &str, opts: &RunOptions) -> Result<ScenarioReport> {
    let cfg = load_config(text)?;
    let compiled = compile(&cfg)?;
    run(&compiled, opts)
}

/// The scenarios shipped with the crate, as (name, JSON text).
pub fn bundled_scenarios() -> &'static [(&'static str, &'static str)] {
    &[
        ("polinomi-AB", include_str!("../scenarios/polinomi-AB.json")),
        ("cosine-matrix-block", include_str!("../scenarios/cosine-matrix-block.json")),
        ("un-fractional", include_str!("../scenarios/un-fractional.json")),
        ("blocks-single", include_str!("../scenarios/blocks-single.json")),
        ("blocks-disjoint-2speed", include_str!("../scenarios/blocks-disjoint-2speed.json")),
        ("sjajno-product", include_str!("../scenarios/sjajno-product.json")),
        ("enenminusjedan-weight", include_str!("../scenarios/enenminusjedan-weight.json")),
    ]
}

pub fn bundled(name: &str) -> Option<&'static str> {
    bundled_scenarios().iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
