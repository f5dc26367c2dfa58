//! Parameter sweeps over `(r2, alpha, k)` and inverse design of iterated
//! catalysis: choose per-stage reflectivities (and optionally `alpha`) so the
//! heralded state overlaps a target as well as possible.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{self, wigner, GridSpec};
use crate::catalysis::{iterated_pcoc, pcoc_state, CatalysisConfig, IteratedConfig, Stage};
use crate::detector::{heralded_signal_distribution, TmdConfig};
use crate::error::{Error, Result};
use crate::fock::{default_dim, CoherentAmplitude, FockState};
use crate::optimize::scan_then_refine;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    R2,
    Alpha,
    /// Mean photon number `|alpha|^2`.
    Alpha2,
    K,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            Self::R2 => "r2",
            Self::Alpha => "alpha",
            Self::Alpha2 => "alpha2",
            Self::K => "k",
        }
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r2" => Ok(Self::R2),
            "alpha" => Ok(Self::Alpha),
            "alpha2" => Ok(Self::Alpha2),
            "k" => Ok(Self::K),
            other => Err(Error::UnknownParameter(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    VarXDb,
    VarPDb,
    SuccessProb,
    G2,
    FidelityToTarget,
    WignerMin,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Self::VarXDb => "var_x_db",
            Self::VarPDb => "var_p_db",
            Self::SuccessProb => "success_prob",
            Self::G2 => "g2",
            Self::FidelityToTarget => "fidelity_to_target",
            Self::WignerMin => "wigner_min",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "var_x_db" => Ok(Self::VarXDb),
            "var_p_db" => Ok(Self::VarPDb),
            "success_prob" => Ok(Self::SuccessProb),
            "g2" => Ok(Self::G2),
            "fidelity_to_target" => Ok(Self::FidelityToTarget),
            "wigner_min" => Ok(Self::WignerMin),
            other => Err(Error::UnknownMetric(other.to_string())),
        }
    }
}

/// One swept parameter: `steps` evenly spaced values from `min` to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub parameter: SweepParameter,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(parameter: SweepParameter, min: f64, max: f64, steps: usize) -> Result<Self> {
        let axis = Self {
            parameter,
            min,
            max,
            steps,
        };
        axis.validate()?;
        Ok(axis)
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            return self.max;
        }
        self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
    }

    fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::InvalidSpec(format!(
                "axis {} needs at least 2 steps",
                self.parameter.name()
            )));
        }
        if !self.min.is_finite() || !self.max.is_finite() || self.min > self.max {
            return Err(Error::InvalidSpec(format!(
                "axis {} needs finite bounds with min <= max",
                self.parameter.name()
            )));
        }
        match self.parameter {
            SweepParameter::R2 if self.min < 0.0 || self.max > 1.0 => Err(Error::InvalidSpec(
                "r2 axis must stay within [0, 1]".into(),
            )),
            SweepParameter::Alpha2 | SweepParameter::K if self.min < 0.0 => Err(Error::InvalidSpec(
                format!("axis {} must be non-negative", self.parameter.name()),
            )),
            SweepParameter::K => {
                if (0..self.steps).any(|i| self.value(i).fract() != 0.0) {
                    return Err(Error::InvalidSpec("k axis must land on integers".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// `name:min:max:steps`, e.g. `r2:0.05:0.95:91`.
impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [name, min, max, steps] = parts[..] else {
            return Err(Error::InvalidSpec(format!("axis '{s}' is not name:min:max:steps")));
        };
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::InvalidSpec(format!("axis '{s}': '{v}' is not a number")))
        };
        let steps = steps
            .parse::<usize>()
            .map_err(|_| Error::InvalidSpec(format!("axis '{s}': '{steps}' is not a step count")))?;
        Axis::new(name.parse()?, num(min)?, num(max)?, steps)
    }
}

/// Parameter values used for anything not swept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasePoint {
    pub alpha: f64,
    pub r2: f64,
    pub k: usize,
}

impl Default for BasePoint {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            r2: 0.5,
            k: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    pub metric: Metric,
    pub base: BasePoint,
    /// Needed by [`Metric::FidelityToTarget`].
    pub target: Option<FockState>,
    /// When set, `g2` and `success_prob` refer to the signal conditioned on
    /// `k` clicks of this detector instead of an ideal photon-number herald.
    pub herald: Option<TmdConfig>,
    /// Grid used by [`Metric::WignerMin`].
    pub wigner_grid: GridSpec,
}

impl SweepSpec {
    pub fn new(axes: Vec<Axis>, metric: Metric) -> Self {
        Self {
            axes,
            metric,
            base: BasePoint::default(),
            target: None,
            herald: None,
            wigner_grid: GridSpec::symmetric(5.0, 101),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::InvalidSpec("a sweep needs at least one axis".into()));
        }
        for (i, a) in self.axes.iter().enumerate() {
            a.validate()?;
            if self.axes[..i].iter().any(|b| b.parameter == a.parameter) {
                return Err(Error::InvalidSpec(format!("axis {} given twice", a.parameter.name())));
            }
        }
        let has = |p| self.axes.iter().any(|a| a.parameter == p);
        if has(SweepParameter::Alpha) && has(SweepParameter::Alpha2) {
            return Err(Error::InvalidSpec("alpha and alpha2 cannot both be swept".into()));
        }
        if self.metric == Metric::FidelityToTarget && self.target.is_none() {
            return Err(Error::InvalidSpec("fidelity_to_target needs a target state".into()));
        }
        self.wigner_grid.validate()?;
        BasePoint::validate(&self.base)
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.steps).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Parameter values of grid point `index`; the first axis varies slowest.
    pub fn point(&self, index: usize) -> Vec<f64> {
        let mut rem = index;
        let mut values = vec![0.0; self.axes.len()];
        for (v, a) in values.iter_mut().zip(&self.axes).rev() {
            *v = a.value(rem % a.steps);
            rem /= a.steps;
        }
        values
    }

    fn resolve(&self, values: &[f64]) -> BasePoint {
        let mut p = self.base;
        for (a, v) in self.axes.iter().zip(values) {
            match a.parameter {
                SweepParameter::R2 => p.r2 = *v,
                SweepParameter::Alpha => p.alpha = *v,
                SweepParameter::Alpha2 => p.alpha = v.sqrt(),
                SweepParameter::K => p.k = *v as usize,
            }
        }
        p
    }
}

impl BasePoint {
    fn validate(&self) -> Result<()> {
        CatalysisConfig::real(self.alpha, self.r2, self.k).map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub parameters: Vec<f64>,
    /// `NaN` where the metric is undefined (e.g. `g2` of the vacuum).
    pub metric: f64,
    pub success_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub axes: Vec<SweepParameter>,
    pub metric: Metric,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Column headers: axis names, then the metric, then `success_prob`.
    pub fn header(&self) -> Vec<&'static str> {
        let mut h: Vec<&'static str> = self.axes.iter().map(|a| a.name()).collect();
        h.push(self.metric.name());
        h.push("success_prob");
        h
    }

    /// Row with the smallest finite metric value.
    pub fn argmin(&self) -> Option<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.metric.is_finite())
            .min_by(|a, b| a.metric.total_cmp(&b.metric))
    }

    pub fn argmax(&self) -> Option<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.metric.is_finite())
            .max_by(|a, b| a.metric.total_cmp(&b.metric))
    }
}

/// Evaluates the metric at every grid point. Points are computed in
/// parallel; rows come back in row-major order over the declared axes.
pub fn sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let rows = (0..spec.len())
        .into_par_iter()
        .map(|i| {
            let parameters = spec.point(i);
            let (metric, success_prob) = evaluate(spec, &spec.resolve(&parameters))?;
            Ok(SweepRow {
                parameters,
                metric,
                success_prob,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        axes: spec.axes.iter().map(|a| a.parameter).collect(),
        metric: spec.metric,
        rows,
    })
}

/// Numerical failures at a single point become `NaN`; anything else aborts.
fn or_nan(r: Result<f64>) -> Result<f64> {
    match r {
        Ok(v) => Ok(v),
        Err(e) if e.is_numerical() => Ok(f64::NAN),
        Err(e) => Err(e),
    }
}

fn evaluate(spec: &SweepSpec, p: &BasePoint) -> Result<(f64, f64)> {
    let cfg = CatalysisConfig::real(p.alpha, p.r2, p.k)?;
    if let (Metric::G2 | Metric::SuccessProb, Some(herald)) = (spec.metric, &spec.herald) {
        return match heralded_signal_distribution(&cfg, herald, p.k) {
            Ok((d, prob)) => {
                let m = if spec.metric == Metric::G2 { or_nan(analysis::g2(&d))? } else { prob };
                Ok((m, prob))
            }
            Err(e) if e.is_numerical() => Ok((f64::NAN, 0.0)),
            Err(e) => Err(e),
        };
    }
    let h = match pcoc_state(&cfg) {
        Ok(h) => h,
        Err(e) if e.is_numerical() => return Ok((f64::NAN, f64::NAN)),
        Err(e) => return Err(e),
    };
    if h.probability <= 0.0 {
        return Ok((f64::NAN, 0.0));
    }
    let metric = match spec.metric {
        Metric::VarXDb => or_nan(analysis::quadrature_variances(&h.state).map(|q| q.squeeze_db_x))?,
        Metric::VarPDb => or_nan(analysis::quadrature_variances(&h.state).map(|q| q.squeeze_db_p))?,
        Metric::SuccessProb => h.probability,
        Metric::G2 => or_nan(analysis::g2(&h.state.number_distribution()))?,
        Metric::FidelityToTarget => {
            let target = spec.target.as_ref().ok_or_else(|| {
                Error::InvalidSpec("fidelity_to_target needs a target state".into())
            })?;
            h.state.fidelity(target)
        }
        Metric::WignerMin => wigner(&h.state, &spec.wigner_grid)?.min(),
    };
    Ok((metric, h.probability))
}

/// How the coherent amplitude is treated by the optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AlphaSpec {
    Fixed(f64),
    Free { min: f64, max: f64 },
}

/// Catalyst photon number and reflectivity bounds of one stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageBounds {
    pub k: usize,
    pub r2_min: f64,
    pub r2_max: f64,
}

impl StageBounds {
    pub fn full(k: usize) -> Self {
        Self {
            k,
            r2_min: 0.0,
            r2_max: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DesignProblem {
    pub target: FockState,
    pub alpha: AlphaSpec,
    pub stages: Vec<StageBounds>,
    /// Coordinate moves smaller than this are not pursued.
    pub tolerance: f64,
}

/// Starts per free coordinate.
pub const STARTS_PER_DIMENSION: usize = 8;
const COARSE_POINTS: usize = 41;
const MAX_SWEEPS: usize = 100;

impl DesignProblem {
    pub fn new(target: FockState, alpha: AlphaSpec, stages: Vec<StageBounds>) -> Result<Self> {
        let p = Self {
            target,
            alpha,
            stages,
            tolerance: 1e-9,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(Error::InvalidSpec("design needs at least one stage".into()));
        }
        for s in &self.stages {
            if !(0.0..=1.0).contains(&s.r2_min) || !(0.0..=1.0).contains(&s.r2_max) || s.r2_min > s.r2_max {
                return Err(Error::InvalidSpec("stage r2 bounds must be ordered within [0, 1]".into()));
            }
        }
        match self.alpha {
            AlphaSpec::Fixed(a) => {
                CoherentAmplitude::real(a)?;
            }
            AlphaSpec::Free { min, max } => {
                if !(min.is_finite() && max.is_finite() && min <= max) {
                    return Err(Error::InvalidSpec("alpha bounds must be finite with min <= max".into()));
                }
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidSpec("tolerance must be positive".into()));
        }
        let norm = self.target.norm_sqr();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidSpec(format!("target must be normalized (norm {norm})")));
        }
        Ok(())
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        let mut b: Vec<(f64, f64)> = self.stages.iter().map(|s| (s.r2_min, s.r2_max)).collect();
        if let AlphaSpec::Free { min, max } = self.alpha {
            b.push((min, max));
        }
        b
    }

    fn split<'a>(&self, x: &'a [f64]) -> (&'a [f64], f64) {
        match self.alpha {
            AlphaSpec::Fixed(a) => (x, a),
            AlphaSpec::Free { .. } => (&x[..self.stages.len()], x[self.stages.len()]),
        }
    }

    /// Heralded state for the point `x` (stage reflectivities, then `alpha`
    /// when free).
    fn heralded(&self, x: &[f64]) -> Result<(f64, f64)> {
        let (r2s, alpha) = self.split(x);
        let stages = r2s
            .iter()
            .zip(&self.stages)
            .map(|(r2, s)| Stage::new(*r2, s.k))
            .collect::<Result<Vec<_>>>()?;
        let amp = CoherentAmplitude::real(alpha)?;
        let kmax = self.stages.iter().map(|s| s.k).max().unwrap_or(0);
        let dim = default_dim(amp.mean_photons(), kmax).max(self.target.dim());
        let h = iterated_pcoc(&IteratedConfig::with_dim(amp, stages, dim)?)?;
        if h.probability <= 0.0 {
            return Ok((0.0, 0.0));
        }
        Ok((h.state.fidelity(&self.target), h.probability))
    }

    fn fidelity(&self, x: &[f64]) -> f64 {
        match self.heralded(x) {
            Ok((f, _)) if f.is_finite() => f,
            _ => 0.0,
        }
    }
}

/// `n` points of the additive recurrence with the generalized golden ratio
/// for dimension `d` (a low-discrepancy sequence), offset by 1/2.
pub fn stratified_starts(n: usize, d: usize) -> Vec<Vec<f64>> {
    // phi_d is the positive root of x^{d+1} = x + 1
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    let g: Vec<f64> = (1..=d).map(|j| phi.powi(-(j as i32))).collect();
    (1..=n)
        .map(|i| g.iter().map(|gj| (0.5 + gj * i as f64).fract()).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalOptimum {
    pub stages: Vec<f64>,
    pub alpha: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignResult {
    /// Optimal `r2` per stage.
    pub stages: Vec<f64>,
    pub fidelity: f64,
    pub success_prob: f64,
    pub evaluations: usize,
    /// No start improved on the best starting point.
    pub stagnated: bool,
    pub alpha: f64,
    /// Distinct end points of the descents, best first.
    pub local_optima: Vec<LocalOptimum>,
}

struct Descent {
    x: Vec<f64>,
    fidelity: f64,
    start_fidelity: f64,
    evaluations: usize,
}

fn coordinate_descent(p: &DesignProblem, bounds: &[(f64, f64)], start: Vec<f64>) -> Descent {
    let mut x = start;
    let mut evaluations = 1;
    let start_fidelity = p.fidelity(&x);
    let mut best = start_fidelity;
    for _ in 0..MAX_SWEEPS {
        let mut moved = false;
        for c in 0..x.len() {
            let (lo, hi) = bounds[c];
            if hi - lo <= p.tolerance {
                continue;
            }
            let mut trial = x.clone();
            let (xc, neg_f, n) = scan_then_refine(
                |v| {
                    trial[c] = v;
                    -p.fidelity(&trial)
                },
                lo,
                hi,
                COARSE_POINTS,
                p.tolerance,
            );
            evaluations += n;
            if -neg_f > best && (xc - x[c]).abs() > p.tolerance {
                moved = true;
            }
            if -neg_f > best {
                best = -neg_f;
                x[c] = xc;
            }
        }
        if !moved {
            break;
        }
    }
    Descent {
        x,
        fidelity: best,
        start_fidelity,
        evaluations,
    }
}

/// Maximizes the fidelity of the iterated catalysis output with the target
/// by multi-start coordinate descent. Each coordinate update is a coarse
/// scan of its full range followed by a golden-section refinement.
///
/// Starts are [`STARTS_PER_DIMENSION`] points per free coordinate from
/// [`stratified_starts`], so runs are reproducible.
pub fn optimize_reflectivities(p: &DesignProblem) -> Result<DesignResult> {
    p.validate()?;
    let bounds = p.bounds();
    let d = bounds.len();
    let starts: Vec<Vec<f64>> = stratified_starts(STARTS_PER_DIMENSION * d, d)
        .into_iter()
        .map(|u| {
            u.iter()
                .zip(&bounds)
                .map(|(ui, (lo, hi))| lo + ui * (hi - lo))
                .collect()
        })
        .collect();

    let runs: Vec<Descent> = starts
        .into_par_iter()
        .map(|s| coordinate_descent(p, &bounds, s))
        .collect();

    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    let best_start = runs.iter().map(|r| r.start_fidelity).fold(f64::NEG_INFINITY, f64::max);
    let best = runs
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.fidelity.total_cmp(&b.fidelity).then(j.cmp(i)))
        .map(|(_, r)| r)
        .ok_or_else(|| Error::InvalidSpec("no optimizer starts".into()))?;

    let mut local_optima: Vec<LocalOptimum> = Vec::new();
    let mut sorted: Vec<&Descent> = runs.iter().collect();
    sorted.sort_by(|a, b| b.fidelity.total_cmp(&a.fidelity));
    for r in sorted {
        let duplicate = local_optima.iter().any(|o| {
            let (stages, alpha) = p.split(&r.x);
            (o.alpha - alpha).abs() <= 1e-3
                && o.stages.iter().zip(stages).all(|(a, b)| (a - b).abs() <= 1e-3)
        });
        if !duplicate {
            let (stages, alpha) = p.split(&r.x);
            local_optima.push(LocalOptimum {
                stages: stages.to_vec(),
                alpha,
                fidelity: r.fidelity,
            });
        }
    }

    let (stages, alpha) = p.split(&best.x);
    let (fidelity, success_prob) = p.heralded(&best.x)?;
    Ok(DesignResult {
        stages: stages.to_vec(),
        fidelity,
        success_prob,
        evaluations,
        stagnated: !(best.fidelity > best_start),
        alpha,
        local_optima,
    })
}
