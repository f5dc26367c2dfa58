use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use catalysis_core::export::{
    state_from_json, state_to_json, to_json, write_joint_scan_csv, write_sweep_csv,
    write_wigner_csv, write_wigner_pgm,
};
use catalysis_core::{
    analysis, compare_with_oracle, g2, joint_output_distribution, optimize_reflectivities,
    pcoc_state, quadrature_variances, sweep as run_sweep, wigner as sample_wigner, AlphaSpec,
    Axis, CatalysisConfig, CoherentAmplitude, CssConstruction, DesignProblem, Error, FockState,
    GridSpec, Metric, StageBounds, SweepSpec, TmdConfig,
};
use thiserror::Error as ThisError;

use crate::{
    Construction, CssArgs, GridFormat, JointArgs, OptimizeArgs, PointArgs, StateArgs, SweepArgs,
    WignerArgs,
};

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes to `path`, or to stdout when no path is given.
fn emit<F>(path: Option<&Path>, write: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(io_err(p))?);
            write(&mut w).and_then(|()| w.flush()).map_err(io_err(p))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w).and_then(|()| w.flush()).map_err(io_err(Path::new("<stdout>")))
        }
    }
}

fn read_state(path: &Path) -> Result<FockState> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(state_from_json(&text)?)
}

fn config(p: &PointArgs) -> Result<CatalysisConfig> {
    let alpha = CoherentAmplitude::real(p.alpha)?;
    Ok(match p.dim {
        Some(dim) => CatalysisConfig::with_dim(alpha, p.r2, p.k, dim)?,
        None => CatalysisConfig::new(alpha, p.r2, p.k)?,
    })
}

fn parse_f64(field: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{field}: '{v}' is not a number")))
}

fn parse_usize(field: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{field}: '{v}' is not a count")))
}

fn show(v: std::result::Result<f64, Error>) -> String {
    match v {
        Ok(x) => format!("{x:.6}"),
        Err(e) if e.is_numerical() => "undefined".to_string(),
        Err(e) => format!("error ({e})"),
    }
}

pub fn state(a: StateArgs) -> Result<()> {
    let cfg = config(&a.point)?;
    let h = pcoc_state(&cfg)?;
    let q = quadrature_variances(&h.state)?;
    let w = sample_wigner(&h.state, &GridSpec::default())?;
    println!("alpha         {}", a.point.alpha);
    println!("r2            {}", a.point.r2);
    println!("k             {}", a.point.k);
    println!("dim           {}", h.state.dim());
    println!("tail_mass     {:.3e}", h.state.tail_mass());
    println!("success_prob  {:.6}", h.probability);
    println!("var_x         {:.6}", q.var_x);
    println!("var_x_db      {:.4}", q.squeeze_db_x);
    println!("var_p         {:.6}", q.var_p);
    println!("var_p_db      {:.4}", q.squeeze_db_p);
    println!("g2            {}", show(g2(&h.state.number_distribution())));
    println!("wigner_min    {:.6}", w.min());
    for warning in &w.warnings {
        eprintln!("warning: {warning}");
    }
    if let Some(out) = &a.out {
        let json = state_to_json(&h.state)?;
        emit(Some(out), |w| w.write_all(json.as_bytes()))?;
    }
    Ok(())
}

pub fn sweep(a: SweepArgs) -> Result<()> {
    let metric: Metric = a.metric.parse()?;
    let axes = a
        .axes
        .iter()
        .map(|s| s.parse::<Axis>())
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut spec = SweepSpec::new(axes, metric);
    spec.base.alpha = a.alpha;
    spec.base.r2 = a.r2;
    spec.base.k = a.k;
    if let Some(t) = &a.target {
        spec.target = Some(read_state(t)?);
    }
    if let Some(eta) = a.herald_eta {
        spec.herald = Some(TmdConfig::new(a.herald_bins, eta)?);
    }
    let table = run_sweep(&spec)?;
    emit(a.out.as_deref(), |w| write_sweep_csv(w, &table))
}

fn parse_grid(s: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts[..] {
        [half, points] => GridSpec::symmetric(parse_f64("grid", half)?, parse_usize("grid", points)?),
        [x_min, x_max, p_min, p_max, nx, np] => GridSpec {
            x_min: parse_f64("grid", x_min)?,
            x_max: parse_f64("grid", x_max)?,
            p_min: parse_f64("grid", p_min)?,
            p_max: parse_f64("grid", p_max)?,
            nx: parse_usize("grid", nx)?,
            np: parse_usize("grid", np)?,
        },
        _ => {
            return Err(CliError::Usage(format!(
                "grid '{s}' is neither half_width:points nor x_min:x_max:p_min:p_max:nx:np"
            )))
        }
    };
    grid.validate()?;
    Ok(grid)
}

pub fn wigner(a: WignerArgs) -> Result<()> {
    let grid = parse_grid(&a.grid)?;
    let h = pcoc_state(&config(&a.point)?)?;
    let w = sample_wigner(&h.state, &grid)?;
    let neg = analysis::wigner_negativity(&w);
    eprintln!(
        "integral {:.9}  min {:.6e}  negative volume {:.6e}",
        w.integral(),
        neg.min_value,
        neg.negative_volume
    );
    for warning in &w.warnings {
        eprintln!("warning: {warning}");
    }
    emit(Some(&a.out), |out| match a.format {
        GridFormat::Csv => write_wigner_csv(out, &w),
        GridFormat::Pgm => write_wigner_pgm(out, &w),
    })
}

fn parse_scan(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts[..] {
        [v] => Ok(vec![parse_f64("r2", v)?]),
        [lo, hi, steps] => {
            let axis = Axis::new(
                catalysis_core::SweepParameter::R2,
                parse_f64("r2", lo)?,
                parse_f64("r2", hi)?,
                parse_usize("r2", steps)?,
            )?;
            Ok((0..axis.steps).map(|i| axis.value(i)).collect())
        }
        _ => Err(CliError::Usage(format!("r2 '{s}' is neither a value nor min:max:steps"))),
    }
}

pub fn joint(a: JointArgs) -> Result<()> {
    if a.alpha2.is_nan() || a.alpha2 < 0.0 {
        return Err(CliError::Usage(format!("alpha2 must be non-negative, got {}", a.alpha2)));
    }
    let alpha = CoherentAmplitude::real(a.alpha2.sqrt())?;
    let herald = TmdConfig::new(a.bins, a.eta1)?;
    let signal = TmdConfig::new(a.bins, a.eta2)?;
    let scan = parse_scan(&a.r2)?
        .into_iter()
        .map(|r2| {
            let cfg = CatalysisConfig::new(alpha, r2, a.k)?;
            Ok((r2, joint_output_distribution(&cfg, &herald, &signal)?))
        })
        .collect::<Result<Vec<_>>>()?;
    emit(a.out.as_deref(), |w| write_joint_scan_csv(w, &scan))
}

pub fn optimize(a: OptimizeArgs) -> Result<()> {
    if a.stages == 0 {
        return Err(CliError::Usage("--stages must be at least 1".into()));
    }
    let ks = match a.k.len() {
        1 => vec![a.k[0]; a.stages],
        n if n == a.stages => a.k.clone(),
        n => {
            return Err(CliError::Usage(format!(
                "--k lists {n} values for {} stages",
                a.stages
            )))
        }
    };
    let alpha = match (a.alpha, &a.alpha_range) {
        (_, Some(range)) => {
            let (lo, hi) = range
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("alpha range '{range}' is not min:max")))?;
            AlphaSpec::Free {
                min: parse_f64("alpha-range", lo)?,
                max: parse_f64("alpha-range", hi)?,
            }
        }
        (Some(v), None) => AlphaSpec::Fixed(v),
        (None, None) => return Err(CliError::Usage("give --alpha or --alpha-range".into())),
    };
    let target = read_state(&a.target)?;
    let mut problem = DesignProblem::new(target, alpha, ks.into_iter().map(StageBounds::full).collect())?;
    problem.tolerance = a.tolerance;
    let result = optimize_reflectivities(&problem)?;
    let json = to_json(&result)?;
    emit(a.out.as_deref(), |w| w.write_all(json.as_bytes()))
}

pub fn css(a: CssArgs) -> Result<()> {
    let construction = match a.construction {
        Construction::Literal => CssConstruction::Literal,
        Construction::DisplacedEvenCat => CssConstruction::DisplacedEvenCat,
    };
    let s = FockState::css(a.alpha, a.beta, a.dim, construction)?;
    let json = state_to_json(&s)?;
    emit(a.out.as_deref(), |w| w.write_all(json.as_bytes()))
}

pub fn oracle(a: PointArgs) -> Result<()> {
    let report = compare_with_oracle(&config(&a)?)?;
    let json = to_json(&report)?;
    emit(None, |w| w.write_all(json.as_bytes()))
}
