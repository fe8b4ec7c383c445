use std::io::Write;

use serde::{Deserialize, Serialize};

use super::generate::generate_problem;
use super::spec::ExperimentSpec;
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::simplex::SimplexPoint;
use crate::solver::{solve, CertificateReport, PSchedule};

/// Horizons `2^7 ..= 2^13`.
pub const DEFAULT_HORIZONS: [usize; 7] = [128, 256, 512, 1024, 2048, 4096, 8192];

/// A weight schedule to study; `lambda3 > 0` selects the regularized path
/// with a uniform prior.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub schedule: PSchedule,
    #[serde(default)]
    pub lambda3: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub horizon: usize,
    pub certificates: CertificateReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSeries {
    pub schedule: ScheduleSpec,
    pub points: Vec<ConvergencePoint>,
    /// Least-squares slope of `ln step_energy` against `ln T`.
    pub step_energy_slope: f64,
    /// Slope of `ln mw_regret`; NaN if some regret is not positive.
    pub mw_regret_slope: f64,
}

/// Least-squares slope of `ln y` on `ln x`; NaN unless every coordinate is
/// positive and at least two points are given.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    if points.len() < 2 || points.iter().any(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return f64::NAN;
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Solves the trial-0 instance at the first grid `M` once per
/// `(schedule, horizon)` pair and fits log-log slopes per schedule.
pub fn convergence_study(
    spec: &ExperimentSpec,
    schedules: &[ScheduleSpec],
    horizons: &[usize],
    exec: Execution,
) -> Result<Vec<ConvergenceSeries>> {
    if schedules.is_empty() || horizons.is_empty() {
        return Err(Error::invalid("convergence study needs schedules and horizons"));
    }
    let generated = generate_problem(spec, 0, spec.m_grid[0])?;
    let problem = &generated.problem;
    let jobs = schedules.len() * horizons.len();
    let runs = exec.map(jobs, |j| {
        let s = schedules[j / horizons.len()];
        let mut cfg = spec.solver.clone();
        cfg.horizon = horizons[j % horizons.len()];
        cfg.p_schedule = s.schedule;
        cfg.lambda3 = s.lambda3;
        cfg.prior_q = if s.lambda3 > 0.0 {
            Some(SimplexPoint::uniform(problem.num_sets())?)
        } else {
            None
        };
        let result = solve(problem, &cfg)?;
        Ok(ConvergencePoint {
            horizon: cfg.horizon,
            certificates: result.certificates.expect("solve computes certificates"),
        })
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(schedules
        .iter()
        .zip(runs.chunks(horizons.len()))
        .map(|(s, pts)| {
            let energy: Vec<(f64, f64)> =
                pts.iter().map(|p| (p.horizon as f64, p.certificates.step_energy)).collect();
            let regret: Vec<(f64, f64)> =
                pts.iter().map(|p| (p.horizon as f64, p.certificates.mw_regret)).collect();
            ConvergenceSeries {
                schedule: *s,
                points: pts.to_vec(),
                step_energy_slope: loglog_slope(&energy),
                mw_regret_slope: loglog_slope(&regret),
            }
        })
        .collect())
}

fn schedule_name(s: PSchedule) -> &'static str {
    match s {
        PSchedule::FixedHorizon => "fixed-horizon",
        PSchedule::Doubling => "doubling",
        PSchedule::InverseT => "inverse-t",
        PSchedule::InverseTSquared => "inverse-t-squared",
    }
}

pub fn write_convergence_csv<W: Write>(series: &[ConvergenceSeries], mut w: W) -> std::io::Result<()> {
    writeln!(w, "schedule,lambda3,T,step_energy,step_energy_bound,mw_regret,mw_regret_bound")?;
    for s in series {
        for p in &s.points {
            let c = &p.certificates;
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                schedule_name(s.schedule.schedule),
                s.schedule.lambda3,
                p.horizon,
                c.step_energy,
                c.step_energy_bound,
                c.mw_regret,
                c.mw_regret_bound.map(|b| b.to_string()).unwrap_or_default()
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..6).map(|k| (2f64.powi(k), 3.0 * 2f64.powi(-k))).collect();
        assert!((loglog_slope(&pts) + 1.0).abs() < 1e-12);
        assert!(loglog_slope(&[(1.0, 1.0), (2.0, 0.0)]).is_nan());
    }
}
