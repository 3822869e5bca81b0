use heislab::checks::run_structural_suite;
use heislab::chung::{
    band_check, default_checkpoints, geometric_checkpoints, lil_study, LilMode, AREA_BAND, GROUP_BAND,
};
use heislab::error::{HeisError, Result};
use heislab::estimate::{
    calibrate, estimate_exit_rate, estimate_small_ball_with, fit_small_ball_rate, fresh_norm_samples,
    increment_samples, ks_two_sample, scaling_identity_check, timechange_samples, ExitRateConfig, KSResult, RateFit,
    SmallBallConfig, SmallBallEstimate,
};
use heislab::fmt::{fmt_sig, ROUND_TRIP_DIGITS};
use heislab::sim::{scaled_path_samples, simulate_path};
use heislab::spectra::chung_bounds;
use heislab::stats::Moments;
use heislab::{ProcessKind, Side, SimConfig};
use serde::Serialize;

use crate::args::{Command, Common, Format};
use crate::json::{pair, to_line, Num, Sig};

/// Bytes to emit and whether the command's own checks passed.
pub struct Output {
    pub bytes: Vec<u8>,
    pub ok: bool,
}

impl Output {
    fn json<T: Serialize>(value: &T) -> Output {
        Output {
            bytes: to_line(value),
            ok: true,
        }
    }
}

fn usage(msg: impl Into<String>) -> HeisError {
    HeisError::InvalidArgument(msg.into())
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(usage(format!("--{name} must be positive, got {x}")))
    }
}

fn at_least(name: &str, x: u64, min: u64) -> Result<u64> {
    if x >= min {
        Ok(x)
    } else {
        Err(usage(format!("--{name} must be at least {min}, got {x}")))
    }
}

fn json_only(c: &Common, command: &str) -> Result<()> {
    match c.format {
        Some(Format::Csv) => Err(usage(format!("`{command}` only emits JSON"))),
        _ => Ok(()),
    }
}

fn default_t_max(kind: ProcessKind) -> f64 {
    match kind {
        ProcessKind::Bm1 => 4.0,
        ProcessKind::Bm2 | ProcessKind::Heis => 2.0,
        ProcessKind::Area => 8.0,
    }
}

pub fn run(command: &Command, c: &Common) -> Result<Output> {
    match command {
        Command::Bounds => bounds(c),
        Command::Simulate { stride } => simulate(c, *stride),
        Command::Smallball { process, no_bridge } => smallball(c, (*process).into(), *no_bridge),
        Command::Exitrate { process } => exitrate(c, (*process).into()),
        Command::Scalingcheck { ks_samples } => scalingcheck(c, *ks_samples),
        Command::Timechange => timechange(c),
        Command::Increments { u, s } => increments(c, *u, *s),
        Command::Chung { n_seeds, mode, band } => chung(c, *n_seeds, mode.modes(), band.as_deref()),
        Command::Calibrate { process } => calibration(c, (*process).into()),
        Command::Check { cases } => check(c, *cases),
    }
}

#[derive(Serialize)]
struct BoundsRecord {
    lambda1_1: Sig<15>,
    lambda1_2: Sig<15>,
    x_star: Sig<15>,
    f_at_xstar: Sig<15>,
    c_lower: Sig<15>,
    c_upper: Sig<15>,
}

fn bounds(c: &Common) -> Result<Output> {
    json_only(c, "bounds")?;
    let b = chung_bounds();
    Ok(Output::json(&BoundsRecord {
        lambda1_1: Sig(b.lambda1_1),
        lambda1_2: Sig(b.lambda1_2),
        x_star: Sig(b.x_star),
        f_at_xstar: Sig(b.f_at_xstar),
        c_lower: Sig(b.c_lower),
        c_upper: Sig(b.c_upper),
    }))
}

#[derive(Serialize)]
struct PathSummary {
    seed: u64,
    horizon: Num,
    steps: u64,
    terminal: [Num; 3],
    sup_norm: Num,
    horizontality_defect: Num,
}

fn simulate(c: &Common, stride: u64) -> Result<Output> {
    let horizon = positive("horizon", c.horizon.unwrap_or(1.0))?;
    let spu = at_least("steps-per-unit", c.steps_per_unit.unwrap_or(1000), 1)?;
    at_least("stride", stride, 1)?;
    let steps = (horizon * spu as f64).round().max(1.0) as u64;
    let path = simulate_path(&SimConfig::new(c.seed, horizon, steps))?;
    if c.format.unwrap_or(Format::Csv) == Format::Csv {
        let mut bytes = Vec::new();
        path.write_csv(stride, &mut bytes).expect("writing to memory");
        return Ok(Output { bytes, ok: true });
    }
    let g = path.terminal();
    Ok(Output::json(&PathSummary {
        seed: c.seed,
        horizon: Sig(horizon),
        steps,
        terminal: [Sig(g.x), Sig(g.y), Sig(g.z)],
        sup_norm: Sig(*path.sup_norm.last().expect("nonempty path")),
        horizontality_defect: Sig(path.horizontality_defect()),
    }))
}

#[derive(Serialize)]
struct SmallBallRecord {
    kind: ProcessKind,
    epsilon: Num,
    p_hat: Num,
    ci_low: Num,
    ci_high: Num,
    n_paths: u64,
    steps: u64,
    seed: u64,
}

impl From<&SmallBallEstimate> for SmallBallRecord {
    fn from(e: &SmallBallEstimate) -> Self {
        SmallBallRecord {
            kind: e.kind,
            epsilon: Sig(e.epsilon),
            p_hat: Sig(e.p_hat),
            ci_low: Sig(e.ci_low),
            ci_high: Sig(e.ci_high),
            n_paths: e.n_paths,
            steps: e.steps,
            seed: e.seed,
        }
    }
}

#[derive(Serialize)]
struct RateRecord {
    kind: ProcessKind,
    rate: Num,
    stderr: Num,
    intercept: Num,
    window: [Num; 2],
    n_points: usize,
    seed: u64,
}

impl RateRecord {
    fn new(kind: ProcessKind, fit: &RateFit, seed: u64) -> Self {
        RateRecord {
            kind,
            rate: Sig(fit.rate),
            stderr: Sig(fit.stderr),
            intercept: Sig(fit.intercept),
            window: pair(fit.window),
            n_points: fit.n_points,
            seed,
        }
    }
}

#[derive(Serialize)]
struct SmallBallFit {
    estimates: Vec<SmallBallRecord>,
    fit: RateRecord,
}

fn smallball(c: &Common, kind: ProcessKind, no_bridge: bool) -> Result<Output> {
    json_only(c, "smallball")?;
    let n = at_least("n-paths", c.n_paths.unwrap_or(100_000), 1)?;
    let steps = at_least("steps-per-unit", c.steps_per_unit.unwrap_or(1000), 1)?;
    let estimate = |eps: f64| -> Result<SmallBallEstimate> {
        let mut cfg = SmallBallConfig::new(kind, positive("epsilon", eps)?, n, steps, c.seed);
        if no_bridge {
            cfg.bridge_correction = false;
        }
        estimate_small_ball_with(&cfg)
    };
    match (&c.epsilon, &c.epsilon_grid) {
        (Some(_), Some(_)) => Err(usage("give either --epsilon or --epsilon-grid, not both")),
        (_, Some(grid)) => {
            let estimates = grid.iter().map(|&e| estimate(e)).collect::<Result<Vec<_>>>()?;
            let fit = fit_small_ball_rate(&estimates)?;
            Ok(Output::json(&SmallBallFit {
                estimates: estimates.iter().map(SmallBallRecord::from).collect(),
                fit: RateRecord::new(kind, &fit, c.seed),
            }))
        }
        (eps, None) => Ok(Output::json(&SmallBallRecord::from(&estimate(eps.unwrap_or(1.0))?))),
    }
}

fn exit_config(c: &Common, kind: ProcessKind, default_paths: u64) -> Result<ExitRateConfig> {
    let t_max = positive("t-max", c.t_max.unwrap_or_else(|| default_t_max(kind)))?;
    let n = at_least("n-paths", c.n_paths.unwrap_or(default_paths), 1)?;
    let spu = at_least("steps-per-unit", c.steps_per_unit.unwrap_or(1000), 1)?;
    Ok(ExitRateConfig::new(kind, t_max, n, spu, c.seed))
}

fn exitrate(c: &Common, kind: ProcessKind) -> Result<Output> {
    json_only(c, "exitrate")?;
    let r = estimate_exit_rate(&exit_config(c, kind, 100_000)?)?;
    Ok(Output::json(&RateRecord::new(kind, &r.fit, c.seed)))
}

#[derive(Serialize)]
struct CalibrationRecord {
    kind: ProcessKind,
    exact: Num,
    rate: Num,
    stderr: Num,
    rel_error: Num,
    refined_rate: Num,
    refined_stderr: Num,
    refinement_shift: Num,
    exits: u64,
    n_paths: u64,
    steps_per_unit: u64,
    seed: u64,
}

fn calibration(c: &Common, kind: ProcessKind) -> Result<Output> {
    json_only(c, "calibrate")?;
    let cfg = exit_config(c, kind, 20_000)?;
    let cal = calibrate(&cfg)?;
    Ok(Output::json(&CalibrationRecord {
        kind,
        exact: Sig(cal.exact),
        rate: Sig(cal.base.fit.rate),
        stderr: Sig(cal.base.fit.stderr),
        rel_error: Sig(cal.rel_error),
        refined_rate: Sig(cal.refined.fit.rate),
        refined_stderr: Sig(cal.refined.fit.stderr),
        refinement_shift: Sig(cal.refinement_shift),
        exits: cal.base.exits,
        n_paths: cfg.n_paths,
        steps_per_unit: cfg.steps_per_unit,
        seed: c.seed,
    }))
}

#[derive(Serialize)]
struct KsRecord {
    statistic: Num,
    p_value: Num,
    n1: usize,
    n2: usize,
}

impl From<KSResult> for KsRecord {
    fn from(k: KSResult) -> Self {
        KsRecord {
            statistic: Sig(k.statistic),
            p_value: Sig(k.p_value),
            n1: k.n1,
            n2: k.n2,
        }
    }
}

#[derive(Serialize)]
struct ScalingRecord {
    epsilon: Num,
    direct_p: Num,
    direct_ci: [Num; 2],
    exit_p: Num,
    exit_ci: [Num; 2],
    z: Num,
    n_paths: u64,
    steps: u64,
    ks: KsRecord,
}

#[derive(Serialize)]
struct ScalingReport {
    seed: u64,
    checks: Vec<ScalingRecord>,
}

fn scalingcheck(c: &Common, ks_samples: u64) -> Result<Output> {
    json_only(c, "scalingcheck")?;
    let n = at_least("n-paths", c.n_paths.unwrap_or(100_000), 1)?;
    let steps = at_least("steps-per-unit", c.steps_per_unit.unwrap_or(1000), 1)?;
    at_least("ks-samples", ks_samples, 1)?;
    let grid = match (&c.epsilon, &c.epsilon_grid) {
        (Some(_), Some(_)) => return Err(usage("give either --epsilon or --epsilon-grid, not both")),
        (Some(e), None) => vec![*e],
        (None, Some(g)) => g.clone(),
        (None, None) => vec![0.7, 0.8, 0.9, 1.0],
    };
    let mut checks = Vec::with_capacity(grid.len());
    for eps in grid {
        let s = scaling_identity_check(positive("epsilon", eps)?, n, steps, c.seed)?;
        let (direct, scaled) = scaled_path_samples(&SimConfig::new(c.seed, 1.0, steps), eps, ks_samples)?;
        checks.push(ScalingRecord {
            epsilon: Sig(eps),
            direct_p: Sig(s.direct_p),
            direct_ci: pair(s.direct_ci),
            exit_p: Sig(s.exit_p),
            exit_ci: pair(s.exit_ci),
            z: Sig(s.z),
            n_paths: n,
            steps,
            ks: ks_two_sample(&direct, &scaled)?.into(),
        });
    }
    Ok(Output::json(&ScalingReport { seed: c.seed, checks }))
}

#[derive(Serialize)]
struct MomentRecord {
    mean: Num,
    variance: Num,
    variance_se: Num,
}

impl From<Moments> for MomentRecord {
    fn from(m: Moments) -> Self {
        MomentRecord {
            mean: Sig(m.mean),
            variance: Sig(m.variance),
            variance_se: Sig(m.se_variance),
        }
    }
}

#[derive(Serialize)]
struct TimeChangeRecord {
    n_samples: u64,
    steps: u64,
    seed: u64,
    area: MomentRecord,
    subordinated: MomentRecord,
    clock_mean: Num,
    ks: KsRecord,
}

fn timechange(c: &Common) -> Result<Output> {
    json_only(c, "timechange")?;
    let n = at_least("n-paths", c.n_paths.unwrap_or(10_000), 2)?;
    let steps = at_least("steps-per-unit", c.steps_per_unit.unwrap_or(1000), 1)?;
    let t = timechange_samples(n, steps, c.seed)?;
    Ok(Output::json(&TimeChangeRecord {
        n_samples: n,
        steps,
        seed: c.seed,
        area: Moments::of(&t.area).into(),
        subordinated: Moments::of(&t.subordinated).into(),
        clock_mean: Sig(Moments::of(&t.clock).mean),
        ks: ks_two_sample(&t.area, &t.subordinated)?.into(),
    }))
}

#[derive(Serialize)]
struct LeftRecord {
    area: MomentRecord,
    ks_vs_fresh: KsRecord,
}

#[derive(Serialize)]
struct IncrementRecord {
    u: Num,
    s: Num,
    n_samples: u64,
    steps_per_unit: u64,
    seed: u64,
    left: LeftRecord,
    right: MomentRecord,
    variance_ratio: Num,
}

fn increments(c: &Common, u: f64, s: f64) -> Result<Output> {
    json_only(c, "increments")?;
    let n = at_least("n-paths", c.n_paths.unwrap_or(10_000), 2)?;
    let spu = at_least("steps-per-unit", c.steps_per_unit.unwrap_or(1000), 1)?;
    let left = increment_samples(u, s, Side::Left, n, spu, c.seed)?;
    let right = increment_samples(u, s, Side::Right, n, spu, c.seed)?;
    let fresh = fresh_norm_samples(s, n, spu, c.seed)?;
    let left_norms: Vec<f64> = left.iter().map(|x| x.norm).collect();
    let lm = Moments::of(&left.iter().map(|x| x.area).collect::<Vec<_>>());
    let rm = Moments::of(&right.iter().map(|x| x.area).collect::<Vec<_>>());
    Ok(Output::json(&IncrementRecord {
        u: Sig(u),
        s: Sig(s),
        n_samples: n,
        steps_per_unit: spu,
        seed: c.seed,
        left: LeftRecord {
            area: lm.into(),
            ks_vs_fresh: ks_two_sample(&left_norms, &fresh)?.into(),
        },
        right: rm.into(),
        variance_ratio: Sig(rm.variance / lm.variance),
    }))
}

#[derive(Serialize)]
struct BandRecord {
    mode: LilMode,
    band: [Num; 2],
    fraction: Num,
    ci: [Num; 2],
    n_seeds: usize,
}

fn chung(c: &Common, n_seeds: u64, modes: Vec<LilMode>, band: Option<&[f64]>) -> Result<Output> {
    at_least("n-seeds", n_seeds, 1)?;
    let horizon = positive("horizon", c.horizon.or(c.t_max).unwrap_or(1e6))?;
    let spu = at_least("steps-per-unit", c.steps_per_unit.unwrap_or(10), 1)?;
    if let Some(b) = band {
        if modes.len() != 1 {
            return Err(usage("--band needs a single --mode"));
        }
        if b.len() != 2 || b[0].is_nan() || b[0] >= b[1] {
            return Err(usage("--band takes two values lo,hi with lo < hi"));
        }
    }
    let checkpoints = if horizon == 1e6 {
        default_checkpoints()
    } else {
        geometric_checkpoints(100.0, horizon, 1.2)?
    };
    let study = lil_study(c.seed, n_seeds, horizon, spu, &checkpoints)?;
    let traces = |m: LilMode| match m {
        LilMode::Group => &study.group,
        LilMode::Area => &study.area,
    };

    if c.format == Some(Format::Csv) {
        let mut bytes = Vec::new();
        if n_seeds == 1 && modes.len() == 1 {
            traces(modes[0])[0].write_csv(&mut bytes).expect("writing to memory");
        } else {
            bytes.extend_from_slice(b"seed,mode,t,phi,stat,running_min\n");
            for m in &modes {
                for (seed, tr) in study.seeds.iter().zip(traces(*m)) {
                    for i in 0..tr.checkpoints.len() {
                        let row = [
                            tr.checkpoints[i],
                            tr.phi_values[i],
                            tr.stat_values[i],
                            tr.running_min[i],
                        ]
                        .map(|x| fmt_sig(x, ROUND_TRIP_DIGITS))
                        .join(",");
                        bytes.extend_from_slice(format!("{seed},{m},{row}\n").as_bytes());
                    }
                }
            }
        }
        return Ok(Output { bytes, ok: true });
    }

    let mut records = Vec::new();
    for m in modes {
        let b = match (band, m) {
            (Some(b), _) => (b[0], b[1]),
            (None, LilMode::Group) => GROUP_BAND,
            (None, LilMode::Area) => AREA_BAND,
        };
        let s = band_check(traces(m), b)?;
        records.push(BandRecord {
            mode: s.mode,
            band: pair(s.band),
            fraction: Sig(s.fraction),
            ci: pair(s.ci),
            n_seeds: s.n_seeds,
        });
    }
    if records.len() == 1 {
        Ok(Output::json(&records[0]))
    } else {
        Ok(Output::json(&records))
    }
}

#[derive(Serialize)]
struct PropertyRecord {
    property: &'static str,
    cases: u64,
    failures: u64,
    worst_ratio: Num,
}

#[derive(Serialize)]
struct CheckRecord {
    seed: u64,
    passed: bool,
    properties: Vec<PropertyRecord>,
}

fn check(c: &Common, cases: u64) -> Result<Output> {
    json_only(c, "check")?;
    let report = run_structural_suite(at_least("cases", cases, 1)?, c.seed)?;
    let properties = report
        .outcomes
        .iter()
        .map(|o| PropertyRecord {
            property: o.property.name(),
            cases: o.cases,
            failures: o.failures,
            worst_ratio: Sig(o.worst_ratio),
        })
        .collect();
    let record = CheckRecord {
        seed: c.seed,
        passed: report.passed(),
        properties,
    };
    Ok(Output {
        bytes: to_line(&record),
        ok: record.passed,
    })
}
