//! Orbit classification: density-based nearness/unboundedness verdicts,
//! scrambled-pair testing, sector-condition reports for eigenvalue regions,
//! and the block-vector construction used by the translation experiments.

use num_complex::Complex64;
use serde::Serialize;

use crate::density::{
    intersect_traces, upper_density_estimate, MembershipTrace, TraceOp,
};
use crate::element::{Block, BlockFunction, Element};
use crate::error::{Error, Result};
use crate::frechet::{frechet_metric, SeminormFamily};
use crate::models::{orbit_element, FamilySpec, Symbol};

/// Knobs for the density verdicts. `m` picks the seminorm used by the
/// unboundedness test; `m_levels` are the increasing thresholds the orbit
/// must clear; `threshold` is the density at which a flag certifies.
#[derive(Debug, Clone, Serialize)]
pub struct DetectParams {
    pub eps: f64,
    pub sigma: f64,
    pub m: u32,
    pub m_levels: Vec<f64>,
    pub threshold: f64,
    pub tail_window: f64,
    #[serde(skip)]
    pub threads: usize,
}

impl Default for DetectParams {
    fn default() -> Self {
        DetectParams {
            eps: 1e-3,
            sigma: 1.0,
            m: 1,
            m_levels: vec![10.0, 100.0, 1000.0],
            threshold: 0.85,
            tail_window: 0.5,
            threads: 1,
        }
    }
}

impl DetectParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::parameter("eps", "proximity threshold must be positive"));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::parameter("sigma", "separation threshold must be positive"));
        }
        if self.m == 0 {
            return Err(Error::parameter("m", "seminorm indices start at 1"));
        }
        if self.m_levels.is_empty() {
            return Err(Error::parameter("m_levels", "need at least one level"));
        }
        let mut prev = 0.0;
        for (i, level) in self.m_levels.iter().enumerate() {
            if !(level.is_finite() && *level > prev) {
                return Err(Error::parameter(
                    "m_levels",
                    format!("levels must be positive and strictly increasing (level {i})"),
                ));
            }
            prev = *level;
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::parameter("threshold", "certification threshold must lie in (0, 1]"));
        }
        if !(self.tail_window > 0.0 && self.tail_window <= 1.0) {
            return Err(Error::parameter("tail_window", "tail window must lie in (0, 1]"));
        }
        if self.threads == 0 {
            return Err(Error::parameter("threads", "need at least one worker"));
        }
        Ok(())
    }
}

/// Density attached to one unboundedness level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelDensity {
    pub level: f64,
    pub density: f64,
}

/// Outcome of a classification or pair test: the intersected-density
/// estimates plus the flags they certify. An orbit that could not be
/// evaluated at some sample time yields `inconclusive` with the cause
/// instead of flags.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub kind: &'static str,
    pub horizon: f64,
    pub eps: f64,
    pub sigma: Option<f64>,
    pub seminorm_index: u32,
    pub threshold: f64,
    pub tail_window: f64,
    pub near_zero_density: Option<f64>,
    pub unbounded: Vec<LevelDensity>,
    pub separation_density: Option<f64>,
    pub proximity_density: Option<f64>,
    pub near_zero: bool,
    pub m_unbounded: bool,
    pub irregular: bool,
    pub scrambled_pair: bool,
    pub inconclusive: Option<String>,
}

impl Verdict {
    fn blank(kind: &'static str, params: &DetectParams, horizon: f64) -> Self {
        Verdict {
            kind,
            horizon,
            eps: params.eps,
            sigma: None,
            seminorm_index: params.m,
            threshold: params.threshold,
            tail_window: params.tail_window,
            near_zero_density: None,
            unbounded: Vec::new(),
            separation_density: None,
            proximity_density: None,
            near_zero: false,
            m_unbounded: false,
            irregular: false,
            scrambled_pair: false,
            inconclusive: None,
        }
    }
}

/// Errors that mean "the orbit is undefined or has left the representable
/// range at this sample time" rather than a misconfigured experiment.
fn inconclusive_cause(e: &Error) -> Option<String> {
    match e {
        Error::Window { .. }
        | Error::SectorBoundary
        | Error::Overflow(_)
        | Error::SeriesLoss { .. } => Some(e.to_string()),
        _ => None,
    }
}

fn element_is_zero(x: &Element) -> bool {
    match x {
        Element::Spectral(v) => v.is_empty(),
        Element::Block(f) => f.is_zero(),
        Element::Grid(g) => g.values.iter().all(|v| *v == 0.0),
        Element::Pair(p) => p.first.is_empty() && p.second.is_empty(),
    }
}

/// Maps `f` over the sample times, optionally fanned out over worker
/// threads in contiguous chunks; results are reassembled in time order, so
/// the output is identical for every thread count.
fn par_map_times<T, F>(times: &[f64], threads: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    if threads <= 1 || times.len() <= 1 {
        return times.iter().map(|&t| f(t)).collect();
    }
    let chunk = times.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(threads);
        for part in times.chunks(chunk) {
            let f_ref = &f;
            handles.push(scope.spawn(move || {
                part.iter().map(|&t| f_ref(t)).collect::<Result<Vec<T>>>()
            }));
        }
        let mut out = Vec::with_capacity(times.len());
        for handle in handles {
            match handle.join() {
                Ok(rows) => out.extend(rows?),
                Err(panic) => std::panic::resume_unwind(panic),
            }
        }
        Ok(out)
    })
}

/// Upper density of the per-family membership traces intersected over all
/// families: rows[i][j] is family j's data at times[i].
fn intersected_density<R>(
    times: &[f64],
    rows: &[Vec<R>],
    tail_window: f64,
    pred: impl Fn(&R) -> bool,
) -> Result<f64> {
    let n_fam = rows[0].len();
    let mut acc: Option<MembershipTrace> = None;
    for j in 0..n_fam {
        let samples = times
            .iter()
            .zip(rows)
            .map(|(&t, row)| (t, pred(&row[j])))
            .collect();
        let trace = MembershipTrace::new(samples)?;
        acc = Some(match acc {
            None => trace,
            Some(prev) => intersect_traces(&prev, &trace, TraceOp::And)?,
        });
    }
    upper_density_estimate(&acc.expect("at least one family"), tail_window)
}

fn validate_experiment(specs: &[FamilySpec], times: &[f64]) -> Result<()> {
    if specs.is_empty() {
        return Err(Error::parameter("specs", "need at least one family"));
    }
    for spec in specs {
        spec.validate()?;
    }
    if times.is_empty() {
        return Err(Error::parameter("times", "empty sample plan"));
    }
    Ok(())
}

/// Classifies a vector against all families at once: the near-zero density
/// is the upper density of the times where every family's orbit is within
/// `eps` of zero, and each unboundedness level's density is the upper
/// density of the times where every family's orbit seminorm exceeds it.
/// `irregular` certifies when both flags do.
pub fn classify_vector(
    specs: &[FamilySpec],
    space: &SeminormFamily,
    x: &Element,
    params: &DetectParams,
    times: &[f64],
) -> Result<Verdict> {
    params.validate()?;
    validate_experiment(specs, times)?;
    let horizon = *times.last().expect("nonempty");
    let zero = x.zero_like();
    let rows = match par_map_times(times, params.threads, |t| {
        specs
            .iter()
            .map(|spec| {
                let u = orbit_element(spec, x, t)?;
                let d = frechet_metric(space, &u, &zero)?;
                let p = space.seminorm(params.m, &u)?;
                Ok((d, p))
            })
            .collect::<Result<Vec<(f64, f64)>>>()
    }) {
        Ok(rows) => rows,
        Err(e) => {
            let mut verdict = Verdict::blank("classify", params, horizon);
            match inconclusive_cause(&e) {
                Some(cause) => verdict.inconclusive = Some(cause),
                None => return Err(e),
            }
            return Ok(verdict);
        }
    };

    let near = intersected_density(times, &rows, params.tail_window, |r| r.0 < params.eps)?;
    let mut unbounded = Vec::with_capacity(params.m_levels.len());
    let mut all_levels = true;
    for &level in &params.m_levels {
        let density = intersected_density(times, &rows, params.tail_window, |r| r.1 > level)?;
        all_levels &= density >= params.threshold;
        unbounded.push(LevelDensity { level, density });
    }

    let mut verdict = Verdict::blank("classify", params, horizon);
    verdict.near_zero_density = Some(near);
    verdict.unbounded = unbounded;
    verdict.near_zero = near >= params.threshold;
    verdict.m_unbounded = all_levels;
    verdict.irregular = verdict.near_zero && verdict.m_unbounded;
    Ok(verdict)
}

/// Tests a candidate scrambled pair: separation density is the upper density
/// of times where every family keeps the two orbits at distance >= sigma,
/// proximity density of times where every family brings them within eps.
/// Both orbits are linear in the initial vector, so the distance trace is
/// computed from the single orbit of x - y.
pub fn scrambled_pair_test(
    specs: &[FamilySpec],
    space: &SeminormFamily,
    x: &Element,
    y: &Element,
    params: &DetectParams,
    times: &[f64],
) -> Result<Verdict> {
    params.validate()?;
    validate_experiment(specs, times)?;
    let diff = x.sub(y)?;
    if element_is_zero(&diff) {
        return Err(Error::parameter("y", "a scrambled pair needs two distinct vectors"));
    }
    let horizon = *times.last().expect("nonempty");
    let zero = diff.zero_like();
    let rows = match par_map_times(times, params.threads, |t| {
        specs
            .iter()
            .map(|spec| {
                let u = orbit_element(spec, &diff, t)?;
                frechet_metric(space, &u, &zero)
            })
            .collect::<Result<Vec<f64>>>()
    }) {
        Ok(rows) => rows,
        Err(e) => {
            let mut verdict = Verdict::blank("scrambled_pair", params, horizon);
            match inconclusive_cause(&e) {
                Some(cause) => verdict.inconclusive = Some(cause),
                None => return Err(e),
            }
            return Ok(verdict);
        }
    };

    let separation = intersected_density(times, &rows, params.tail_window, |d| *d >= params.sigma)?;
    let proximity = intersected_density(times, &rows, params.tail_window, |d| *d < params.eps)?;

    let mut verdict = Verdict::blank("scrambled_pair", params, horizon);
    verdict.sigma = Some(params.sigma);
    verdict.separation_density = Some(separation);
    verdict.proximity_density = Some(proximity);
    verdict.scrambled_pair = separation >= params.threshold && proximity >= params.threshold;
    Ok(verdict)
}

/// One family's orbit sampled along a time plan.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace {
    pub label: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// Seminorm p_m along the orbit at the given times.
pub fn orbit_norm_trace(
    spec: &FamilySpec,
    space: &SeminormFamily,
    x: &Element,
    m: u32,
    times: &[f64],
) -> Result<OrbitTrace> {
    spec.validate()?;
    let values = times
        .iter()
        .map(|&t| space.seminorm(m, &orbit_element(spec, x, t)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(OrbitTrace {
        label: spec.label.clone(),
        times: times.to_vec(),
        values,
    })
}

/// Metric distance to zero along the orbit at the given times.
pub fn orbit_metric_trace(
    spec: &FamilySpec,
    space: &SeminormFamily,
    x: &Element,
    times: &[f64],
) -> Result<OrbitTrace> {
    spec.validate()?;
    let zero = x.zero_like();
    let values = times
        .iter()
        .map(|&t| frechet_metric(space, &orbit_element(spec, x, t)?, &zero))
        .collect::<Result<Vec<f64>>>()?;
    Ok(OrbitTrace {
        label: spec.label.clone(),
        times: times.to_vec(),
        values,
    })
}

/// Discrete-power trace: the orbit seminorm sampled at k * t_j for
/// k = 1..=k_max, using the family's own period. Identical to the continuous
/// trace restricted to those times because it runs the same orbit engine.
pub fn discrete_power_trace(
    spec: &FamilySpec,
    space: &SeminormFamily,
    x: &Element,
    m: u32,
    k_max: u32,
) -> Result<OrbitTrace> {
    if k_max == 0 {
        return Err(Error::parameter("k_max", "need at least one power"));
    }
    let times: Vec<f64> = (1..=k_max).map(|k| f64::from(k) * spec.t_j).collect();
    orbit_norm_trace(spec, space, x, m, &times)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

/// One named check inside a hypothesis report, with whatever witness data
/// certified it: a complex point, an index, sample times, residual margins.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub status: CheckStatus,
    pub witness_point: Option<[f64; 2]>,
    pub witness_index: Option<usize>,
    pub witness_times: Vec<f64>,
    pub residuals: Vec<f64>,
    pub detail: String,
}

impl HypothesisCheck {
    fn new(name: &str, status: CheckStatus, detail: impl Into<String>) -> Self {
        HypothesisCheck {
            name: name.into(),
            status,
            witness_point: None,
            witness_index: None,
            witness_times: Vec::new(),
            residuals: Vec::new(),
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub checks: Vec<HypothesisCheck>,
}

impl HypothesisReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }
}

/// Geometric predicate for eigenvalue regions. `Sector` and its complement
/// are argument-only; `LambdaRegion` is the disk
/// |z - (c - b^2/(4a))| <= b^2/(4a) minus its real points left of the
/// center, the admissible eigenvalue set of the quadratic pencil
/// a z^2 + b z + c with c < b^2/(2a) < 1.
#[derive(Debug, Clone, PartialEq)]
pub enum RegionKind {
    HalfPlaneNeg,
    HalfPlanePos,
    /// |arg z| < alpha, z != 0.
    Sector { alpha: f64 },
    /// |arg z| > alpha, z != 0: strictly outside the closed sector.
    ClosedSectorComplement { alpha: f64 },
    Disk { center: Complex64, radius: f64 },
    LambdaRegion { a: f64, b: f64, c: f64 },
}

impl RegionKind {
    fn validate(&self) -> Result<()> {
        match self {
            RegionKind::HalfPlaneNeg | RegionKind::HalfPlanePos => Ok(()),
            RegionKind::Sector { alpha } | RegionKind::ClosedSectorComplement { alpha } => {
                if !(alpha.is_finite() && *alpha > 0.0 && *alpha < std::f64::consts::PI) {
                    return Err(Error::parameter("alpha", "sector half-angle must lie in (0, pi)"));
                }
                Ok(())
            }
            RegionKind::Disk { center, radius } => {
                if !center.is_finite() {
                    return Err(Error::parameter("center", "disk center must be finite"));
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::parameter("radius", "disk radius must be positive"));
                }
                Ok(())
            }
            RegionKind::LambdaRegion { a, b, c } => {
                if !(a.is_finite() && *a > 0.0 && b.is_finite() && *b > 0.0 && c.is_finite()) {
                    return Err(Error::parameter("a", "pencil coefficients must be finite with a, b > 0"));
                }
                let half = b * b / (2.0 * a);
                if !(*c < half && half < 1.0) {
                    return Err(Error::parameter("c", "pencil requires c < b^2/(2a) < 1"));
                }
                Ok(())
            }
        }
    }

    fn contains(&self, z: Complex64) -> bool {
        match self {
            RegionKind::HalfPlaneNeg => z.re < 0.0,
            RegionKind::HalfPlanePos => z.re > 0.0,
            RegionKind::Sector { alpha } => z != Complex64::ZERO && z.arg().abs() < *alpha,
            RegionKind::ClosedSectorComplement { alpha } => {
                z != Complex64::ZERO && z.arg().abs() > *alpha
            }
            RegionKind::Disk { center, radius } => (z - center).norm() <= *radius,
            RegionKind::LambdaRegion { a, b, c } => {
                let r = b * b / (4.0 * a);
                let center = c - r;
                (z - Complex64::new(center, 0.0)).norm() <= r
                    && !(z.im == 0.0 && z.re <= center)
            }
        }
    }
}

/// A region together with its designated decay sample set, cluster point,
/// and independently supplied growth candidates. With `negate` set the
/// membership test applies to -z (the mirrored region), which is how the
/// admissible set -Lambda is expressed.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionPredicate {
    pub kind: RegionKind,
    pub negate: bool,
    pub samples: Vec<Complex64>,
    pub cluster: Complex64,
    pub growth_candidates: Vec<Complex64>,
}

impl RegionPredicate {
    pub fn contains(&self, z: Complex64) -> bool {
        self.kind.contains(if self.negate { -z } else { z })
    }

    /// Samples and the cluster point must satisfy the predicate; growth
    /// candidates are exempt, being spectral points supplied on their own
    /// terms rather than members of the decay set.
    pub fn validate(&self) -> Result<()> {
        self.kind.validate()?;
        if self.samples.is_empty() {
            return Err(Error::parameter("samples", "empty sample set"));
        }
        for (i, z) in self.samples.iter().enumerate() {
            if !z.is_finite() {
                return Err(Error::parameter("samples", format!("sample {i} is not finite")));
            }
            if !self.contains(*z) {
                return Err(Error::parameter(
                    "samples",
                    format!("sample {i} = {z} lies outside the region"),
                ));
            }
        }
        if !self.cluster.is_finite() || !self.contains(self.cluster) {
            return Err(Error::parameter("cluster", "cluster point must lie in the region"));
        }
        for (i, z) in self.growth_candidates.iter().enumerate() {
            if !z.is_finite() {
                return Err(Error::parameter(
                    "growth_candidates",
                    format!("candidate {i} is not finite"),
                ));
            }
        }
        Ok(())
    }
}

/// Which pair of sector conditions to check: half-plane sign conditions on
/// the symbols directly, or rotated-sector conditions on -e^{i theta} P_j(z)
/// against the sector of half-angle zeta*pi/2.
#[derive(Debug, Clone, PartialEq)]
pub enum SectorVariant {
    AB,
    ABprime { zeta: f64, theta: f64 },
}

/// Points on the sector boundary are resolved as inside the closure (so they
/// fail the exterior condition) only beyond this angular tolerance.
const ARG_TOL: f64 = 1e-12;

fn decay_points(region: &RegionPredicate) -> Vec<Complex64> {
    let mut pts = region.samples.clone();
    if !pts.contains(&region.cluster) {
        pts.push(region.cluster);
    }
    pts
}

/// Checks the decay condition over every sample point (including the
/// cluster) and the growth condition over the candidates, reporting
/// witnesses and margins. The decay check requires every family's value in
/// the open left half-plane (`AB`) or strictly outside the closed sector of
/// half-angle zeta*pi/2 after rotation by -e^{i theta} (`ABprime`); the
/// growth check wants one candidate inside the opposite set for every
/// family at once.
pub fn sector_condition_check(
    polys: &[Symbol],
    region: &RegionPredicate,
    variant: &SectorVariant,
) -> Result<HypothesisReport> {
    if polys.is_empty() {
        return Err(Error::parameter("polys", "need at least one symbol"));
    }
    for p in polys {
        p.validate()?;
    }
    region.validate()?;
    match variant {
        SectorVariant::AB => Ok(HypothesisReport {
            checks: vec![check_half_plane_decay(polys, region), check_half_plane_growth(polys, region)],
        }),
        SectorVariant::ABprime { zeta, theta } => {
            if !(zeta.is_finite() && *zeta > 1.0 && *zeta < 2.0) {
                return Err(Error::parameter("zeta", "rotated-sector variant needs zeta in (1, 2)"));
            }
            let theta_max = std::f64::consts::PI * (1.0 - zeta / 2.0);
            if !(theta.is_finite() && theta.abs() < theta_max) {
                return Err(Error::parameter(
                    "theta",
                    format!("rotation angle must satisfy |theta| < pi - zeta*pi/2 = {theta_max}"),
                ));
            }
            for (j, p) in polys.iter().enumerate() {
                if p.factor != Complex64::new(1.0, 0.0) {
                    return Err(Error::parameter(
                        "polys",
                        format!("symbol {j} must be a plain polynomial; the rotation is applied by the check"),
                    ));
                }
                if p.coeffs.iter().any(|c| c.im != 0.0) {
                    return Err(Error::parameter(
                        "polys",
                        format!("symbol {j} must have real coefficients"),
                    ));
                }
                match p.leading() {
                    Some((_, lead)) if lead.re > 0.0 => {}
                    _ => {
                        return Err(Error::parameter(
                            "polys",
                            format!("symbol {j} must have a positive leading coefficient"),
                        ));
                    }
                }
            }
            let rot = -Complex64::new(0.0, *theta).exp();
            let half = zeta * std::f64::consts::FRAC_PI_2;
            Ok(HypothesisReport {
                checks: vec![
                    check_sector_decay(polys, region, rot, half),
                    check_sector_growth(polys, region, rot, half),
                ],
            })
        }
    }
}

fn check_half_plane_decay(polys: &[Symbol], region: &RegionPredicate) -> HypothesisCheck {
    let mut worst = f64::INFINITY;
    let mut witness = (Complex64::ZERO, 0usize);
    for z in decay_points(region) {
        for (j, p) in polys.iter().enumerate() {
            let v = p.eval(z);
            let margin = -v.re;
            if margin <= 0.0 {
                let mut check = HypothesisCheck::new(
                    "A",
                    CheckStatus::Fail,
                    format!("family {j} has Re value {} >= 0 at the decay sample {z}", v.re),
                );
                check.witness_point = Some([z.re, z.im]);
                check.witness_index = Some(j);
                check.residuals = vec![v.re];
                return check;
            }
            if margin < worst {
                worst = margin;
                witness = (z, j);
            }
        }
    }
    let mut check = HypothesisCheck::new(
        "A",
        CheckStatus::Pass,
        format!(
            "every decay sample keeps all families in the open left half-plane; smallest margin {worst} at family {}",
            witness.1
        ),
    );
    check.witness_point = Some([witness.0.re, witness.0.im]);
    check.witness_index = Some(witness.1);
    check.residuals = vec![worst];
    check
}

fn check_half_plane_growth(polys: &[Symbol], region: &RegionPredicate) -> HypothesisCheck {
    if region.growth_candidates.is_empty() {
        return HypothesisCheck::new("B", CheckStatus::Inconclusive, "no growth candidates supplied");
    }
    for (i, z) in region.growth_candidates.iter().enumerate() {
        let margins: Vec<f64> = polys.iter().map(|p| p.eval(*z).re).collect();
        if margins.iter().all(|m| *m > 0.0) {
            let mut check = HypothesisCheck::new(
                "B",
                CheckStatus::Pass,
                format!("candidate {z} puts every family in the open right half-plane"),
            );
            check.witness_point = Some([z.re, z.im]);
            check.witness_index = Some(i);
            check.residuals = margins;
            return check;
        }
    }
    HypothesisCheck::new(
        "B",
        CheckStatus::Fail,
        "no supplied candidate keeps every family in the open right half-plane",
    )
}

fn check_sector_decay(
    polys: &[Symbol],
    region: &RegionPredicate,
    rot: Complex64,
    half: f64,
) -> HypothesisCheck {
    let mut worst = f64::INFINITY;
    let mut witness = (Complex64::ZERO, 0usize);
    for z in decay_points(region) {
        for (j, p) in polys.iter().enumerate() {
            let w = rot * p.eval(z);
            if w == Complex64::ZERO {
                let mut check = HypothesisCheck::new(
                    "A_prime",
                    CheckStatus::Fail,
                    format!("family {j} vanishes at the decay sample {z}; zero lies in the closed sector"),
                );
                check.witness_point = Some([z.re, z.im]);
                check.witness_index = Some(j);
                return check;
            }
            let gap = w.arg().abs() - half;
            if gap.abs() <= ARG_TOL {
                let mut check = HypothesisCheck::new(
                    "A_prime",
                    CheckStatus::Fail,
                    format!(
                        "family {j} lands on the sector boundary at the decay sample {z}; \
                         the boundary belongs to the closure, not the exterior"
                    ),
                );
                check.witness_point = Some([z.re, z.im]);
                check.witness_index = Some(j);
                check.residuals = vec![gap];
                return check;
            }
            if gap < 0.0 {
                let mut check = HypothesisCheck::new(
                    "A_prime",
                    CheckStatus::Fail,
                    format!("family {j} maps the decay sample {z} inside the sector (arg gap {gap})"),
                );
                check.witness_point = Some([z.re, z.im]);
                check.witness_index = Some(j);
                check.residuals = vec![gap];
                return check;
            }
            if gap < worst {
                worst = gap;
                witness = (z, j);
            }
        }
    }
    let mut check = HypothesisCheck::new(
        "A_prime",
        CheckStatus::Pass,
        format!(
            "every decay sample maps outside the closed sector; smallest angular margin {worst} at family {}",
            witness.1
        ),
    );
    check.witness_point = Some([witness.0.re, witness.0.im]);
    check.witness_index = Some(witness.1);
    check.residuals = vec![worst];
    check
}

fn check_sector_growth(
    polys: &[Symbol],
    region: &RegionPredicate,
    rot: Complex64,
    half: f64,
) -> HypothesisCheck {
    if region.growth_candidates.is_empty() {
        return HypothesisCheck::new("B_prime", CheckStatus::Inconclusive, "no growth candidates supplied");
    }
    for (i, z) in region.growth_candidates.iter().enumerate() {
        let mut margins = Vec::with_capacity(polys.len());
        let ok = polys.iter().all(|p| {
            let w = rot * p.eval(*z);
            if w == Complex64::ZERO {
                return false;
            }
            let margin = half - w.arg().abs();
            margins.push(margin);
            margin > ARG_TOL
        });
        if ok {
            let mut check = HypothesisCheck::new(
                "B_prime",
                CheckStatus::Pass,
                format!("candidate {z} maps every family into the open sector"),
            );
            check.witness_point = Some([z.re, z.im]);
            check.witness_index = Some(i);
            check.residuals = margins;
            return check;
        }
    }
    HypothesisCheck::new(
        "B_prime",
        CheckStatus::Fail,
        "no supplied candidate maps every family into the open sector",
    )
}

/// Numerical evidence for the decay/growth hypothesis pair: (a) every
/// sampled dense-set vector's orbit distance to zero ends below `decay_tol`
/// at the horizon, for every family, with a nonincreasing tail; (b) the
/// candidate's orbit seminorm exceeds every configured level on an
/// intersected time set of density >= threshold. When both hold, the
/// concluding check is asserted as an implied consequence of hypotheses (a)
/// and (b); it is not verified directly.
pub fn hypothesis_check_cvddc(
    specs: &[FamilySpec],
    space: &SeminormFamily,
    x0_samples: &[Element],
    candidate: &Element,
    params: &DetectParams,
    times: &[f64],
    decay_tol: f64,
) -> Result<HypothesisReport> {
    params.validate()?;
    validate_experiment(specs, times)?;
    if x0_samples.is_empty() {
        return Err(Error::parameter("x0_samples", "need at least one dense-set sample"));
    }
    if !(decay_tol.is_finite() && decay_tol > 0.0) {
        return Err(Error::parameter("decay_tol", "decay tolerance must be positive"));
    }

    // (a): final value below tolerance and a nonincreasing decay envelope,
    // per sample and family. Oscillatory orbits are monotone only in
    // envelope, so the tail is split into three consecutive segments and the
    // segment maxima must not rise.
    let tail_len = (times.len() / 2).max(3).min(times.len());
    let mut a_check = HypothesisCheck::new(
        "a_dense_set_decay",
        CheckStatus::Pass,
        String::new(),
    );
    let mut worst_final = 0.0_f64;
    let mut worst_at = (0usize, 0usize);
    'outer: for (i, x0) in x0_samples.iter().enumerate() {
        for (j, spec) in specs.iter().enumerate() {
            let trace = orbit_metric_trace(spec, space, x0, times)?;
            let last = *trace.values.last().expect("nonempty");
            if !(last < decay_tol) {
                a_check.status = CheckStatus::Fail;
                a_check.detail = format!(
                    "sample {i} under family {j} ends at {last}, not below {decay_tol}"
                );
                a_check.witness_index = Some(i);
                a_check.residuals = vec![last];
                break 'outer;
            }
            let tail = &trace.values[trace.values.len() - tail_len..];
            let third = tail.len().div_ceil(3);
            let seg_max = |seg: &[f64]| seg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mid_end = (2 * third).min(tail.len());
            let m1 = seg_max(&tail[..third]);
            let m2 = seg_max(&tail[third..mid_end]);
            let m3 = if mid_end < tail.len() { seg_max(&tail[mid_end..]) } else { m2 };
            if m2 > m1 * (1.0 + 1e-9) || m3 > m2 * (1.0 + 1e-9) {
                a_check.status = CheckStatus::Fail;
                a_check.detail = format!(
                    "sample {i} under family {j} has a rising decay envelope over the tail \
                     (segment maxima {m1}, {m2}, {m3})"
                );
                a_check.witness_index = Some(i);
                a_check.witness_times = vec![times[times.len() - tail_len]];
                a_check.residuals = vec![m1, m2, m3];
                break 'outer;
            }
            if last > worst_final {
                worst_final = last;
                worst_at = (i, j);
            }
        }
    }
    if a_check.status == CheckStatus::Pass {
        a_check.detail = format!(
            "all samples decay below {decay_tol}; largest final value {worst_final} \
             (sample {}, family {})",
            worst_at.0, worst_at.1
        );
        a_check.witness_index = Some(worst_at.0);
        a_check.witness_times = vec![*times.last().expect("nonempty")];
        a_check.residuals = vec![worst_final];
    }

    // (b): per level, intersected density of {p_m > level} over all families.
    let traces: Vec<OrbitTrace> = specs
        .iter()
        .map(|spec| orbit_norm_trace(spec, space, candidate, params.m, times))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<f64>> = (0..times.len())
        .map(|i| traces.iter().map(|tr| tr.values[i]).collect())
        .collect();
    let mut b_check = HypothesisCheck::new("b_unbounded_candidate", CheckStatus::Pass, String::new());
    let mut densities = Vec::with_capacity(params.m_levels.len());
    for &level in &params.m_levels {
        let density = intersected_density(times, &rows, params.tail_window, |p| *p > level)?;
        densities.push(density);
        if density < params.threshold {
            b_check.status = CheckStatus::Fail;
            b_check.detail = format!(
                "level {level} is exceeded only on density {density} < threshold {}",
                params.threshold
            );
        }
    }
    if b_check.status == CheckStatus::Pass {
        b_check.detail = format!(
            "candidate exceeds every level {:?} on intersected sets of density >= {}",
            params.m_levels, params.threshold
        );
        let top = *params.m_levels.last().expect("nonempty");
        b_check.witness_times = times
            .iter()
            .zip(&rows)
            .filter(|(_, row)| row.iter().all(|p| *p > top))
            .map(|(&t, _)| t)
            .take(8)
            .collect();
    }
    b_check.residuals = densities;

    let both = a_check.status == CheckStatus::Pass && b_check.status == CheckStatus::Pass;
    let conclusion = HypothesisCheck::new(
        "conclusion_dense_scrambled_subspace",
        if both { CheckStatus::Pass } else { CheckStatus::Inconclusive },
        "asserted as an implied consequence of hypotheses (a) and (b); not verified directly",
    );

    Ok(HypothesisReport {
        checks: vec![a_check, b_check, conclusion],
    })
}

/// Amplitude rule for block plans: c_k = k or c_k = base^k.
#[derive(Debug, Clone, PartialEq)]
pub enum AmplitudeRule {
    Linear,
    Geometric { base: f64 },
}

/// Recursive block layout: the k-th block is [a_k, b_k] with
/// b_k = ratio_in * a_k and a_{k+1} = ratio_gap * b_k.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPlan {
    pub a1: f64,
    pub ratio_in: f64,
    pub ratio_gap: f64,
    pub k_count: u32,
    pub amplitude: AmplitudeRule,
}

impl Default for BlockPlan {
    fn default() -> Self {
        BlockPlan {
            a1: 1.0,
            ratio_in: 2.0,
            ratio_gap: 2.0,
            k_count: 2,
            amplitude: AmplitudeRule::Linear,
        }
    }
}

impl BlockPlan {
    pub fn validate(&self) -> Result<()> {
        if !(self.a1.is_finite() && self.a1 > 0.0) {
            return Err(Error::parameter("a1", "first block must start at a positive position"));
        }
        if !(self.ratio_in.is_finite() && self.ratio_in > 1.0) {
            return Err(Error::parameter("ratio_in", "in-block ratio must exceed 1"));
        }
        if !(self.ratio_gap.is_finite() && self.ratio_gap > 1.0) {
            return Err(Error::parameter("ratio_gap", "gap ratio must exceed 1"));
        }
        if self.k_count < 2 {
            return Err(Error::parameter("k_count", "need at least two blocks"));
        }
        if self.k_count > 10_000 {
            return Err(Error::parameter("k_count", "more than 10000 blocks is a layout error"));
        }
        if let AmplitudeRule::Geometric { base } = self.amplitude {
            if !(base.is_finite() && base > 0.0) {
                return Err(Error::parameter("base", "geometric amplitude base must be positive"));
            }
        }
        Ok(())
    }

    fn amplitude_at(&self, k: u32) -> f64 {
        match self.amplitude {
            AmplitudeRule::Linear => f64::from(k),
            AmplitudeRule::Geometric { base } => base.powi(k as i32),
        }
    }
}

/// Builds the block vector of a plan. Plans whose positions or amplitudes
/// leave the f64 range are rejected as overflow (the weighted norm itself is
/// finite for any exponentially decaying weight once the layout is finite).
pub fn build_block_vector(plan: &BlockPlan) -> Result<BlockFunction> {
    plan.validate()?;
    let mut blocks = Vec::with_capacity(plan.k_count as usize);
    let mut a = plan.a1;
    for k in 1..=plan.k_count {
        let b = plan.ratio_in * a;
        let c = plan.amplitude_at(k);
        if !(b.is_finite() && c.is_finite() && c > 0.0) {
            return Err(Error::Overflow(format!(
                "block {k} overflows (end {b}, amplitude {c})"
            )));
        }
        blocks.push(Block { a, b, c });
        a = plan.ratio_gap * b;
    }
    BlockFunction::new(blocks)
}

/// Event-aware sample plan: log-spaced fill plus clusters of offsets around
/// each event time, all clamped to (0, horizon], sorted, deduplicated.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    pub t_min: f64,
    pub horizon: f64,
    pub events: Vec<f64>,
    pub offsets: Vec<f64>,
    pub per_decade: u32,
}

/// Offsets that bracket an event at several absolute distances.
pub fn default_event_offsets() -> Vec<f64> {
    let mut out = vec![0.0];
    for d in [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0] {
        out.push(d);
        out.push(-d);
    }
    out
}

pub fn build_sample_times(plan: &SamplePlan) -> Result<Vec<f64>> {
    if !(plan.horizon.is_finite() && plan.horizon > 0.0) {
        return Err(Error::parameter("horizon", "horizon must be positive"));
    }
    if !(plan.t_min.is_finite() && plan.t_min > 0.0 && plan.t_min < plan.horizon) {
        return Err(Error::parameter("t_min", "t_min must lie in (0, horizon)"));
    }
    if plan.per_decade == 0 {
        return Err(Error::parameter("per_decade", "need at least one sample per decade"));
    }
    for (i, e) in plan.events.iter().enumerate() {
        if !e.is_finite() {
            return Err(Error::parameter("events", format!("event {i} is not finite")));
        }
    }
    for (i, d) in plan.offsets.iter().enumerate() {
        if !d.is_finite() {
            return Err(Error::parameter("offsets", format!("offset {i} is not finite")));
        }
    }

    let mut raw = Vec::new();
    let decades = (plan.horizon / plan.t_min).log10();
    let fill = (decades * f64::from(plan.per_decade)).ceil() as usize;
    for i in 0..=fill {
        let t = plan.t_min * 10f64.powf(i as f64 / f64::from(plan.per_decade));
        raw.push(t.min(plan.horizon));
    }
    raw.push(plan.horizon);
    for &e in &plan.events {
        for &d in &plan.offsets {
            raw.push(e + d);
        }
        if plan.offsets.is_empty() {
            raw.push(e);
        }
    }

    raw.retain(|t| *t > 0.0 && *t <= plan.horizon);
    raw.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(raw.len());
    for t in raw {
        // near-coincident samples would violate the strictly-increasing
        // trace requirement without adding information
        match out.last() {
            Some(&last) if t <= last * (1.0 + 1e-12) => {}
            _ => out.push(t),
        }
    }
    if out.is_empty() {
        return Err(Error::parameter("horizon", "sample plan produced no times"));
    }
    Ok(out)
}
