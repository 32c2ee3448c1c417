use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use hyperwave::bispectral::{difference_residual, path_agreement};
use hyperwave::confluence::{coefficient_confluence, log_linear_fit, scan};
use hyperwave::export::write_table;
use hyperwave::hcseries::{asymptotics_gap, build_table, series_eval};
use hyperwave::operators::eigen_residual;
use hyperwave::special::c_function;
use hyperwave::wavefn::{wavefunction, wavefunction_regular, Orbit, DEFAULT_OFFSETS};
use hyperwave::{rho, ConfluenceKind, Error, Family, Settings, SignedPermutation};

use crate::config::RunConfig;
use crate::report::{Check, Report};

pub const EIGEN_TOL: f64 = 1e-8;
/// Residuals below this count as round-off when checking monotone decrease.
pub const EIGEN_FLOOR: f64 = 1e-14;
pub const DIFFERENCE_TOL: f64 = 1e-6;
pub const DIFFERENCE_TOL_HIGH: f64 = 1e-5;
pub const PATH_TOL: f64 = 1e-12;
pub const ASYMPTOTIC_FINAL: f64 = 1e-6;
pub const LOG_LINEAR_R2: f64 = 0.95;
pub const COEFF_TOL: f64 = 1e-6;
pub const COEFF_C: f64 = 20.0;
pub const COEFF_LEVEL: usize = 8;
pub const W_INVARIANCE_TOL: f64 = 1e-10;
pub const POLE_BOUND_FACTOR: f64 = 2.0;
pub const DEFAULT_GRID: [f64; 4] = [4.0, 6.0, 8.0, 10.0];

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Config(String),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<String> for CliError {
    fn from(e: String) -> Self {
        CliError::Config(e)
    }
}

impl CliError {
    pub fn kind(&self) -> &str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Config(_) => "Config",
            CliError::Io(_) => "Io",
        }
    }

    pub fn module(&self) -> &str {
        match self {
            CliError::Core(e) => e.module(),
            _ => "cli",
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Config(m) | CliError::Io(m) => m.clone(),
        }
    }
}

type Outcome = Result<Report, CliError>;

fn element_label(w: &SignedPermutation) -> String {
    format!("C{w}")
}

pub fn eval(cfg: &RunConfig) -> Outcome {
    let x = cfg.position()?;
    let (family, xi, g, s) = (cfg.family, &cfg.xi, &cfg.g, &cfg.settings);
    let mut r = Report::default();
    let near = xi.nearest_hyperplane(false).filter(|h| h.distance < s.tol.pole_guard);

    match build_table(family, xi, g, s, false).and_then(|t| series_eval(&t, x)) {
        Ok(v) => {
            r.value("phi", v.value);
            r.real("phi.tail_bound", v.tail_bound);
        }
        Err(e @ Error::SpectralPlaneSingularity { .. }) if near.is_some() => r.note(format!("phi unavailable: {e}")),
        Err(e) => return Err(e.into()),
    }

    if let Some(hit) = near {
        let reg = wavefunction_regular(family, xi, x, g, s, &DEFAULT_OFFSETS)?;
        r.value("Phi", reg.value);
        r.real("Phi.extrapolation_error", reg.error_estimate);
        r.note(format!(
            "xi lies {:.3e} from {}; Phi extrapolated from offsets {:?}",
            hit.distance, hit.plane, reg.offsets
        ));
    } else {
        r.value("Phi", wavefunction(family, xi, x, g, s)?);
    }

    for w in SignedPermutation::all(xi.dim()) {
        let label = element_label(&w);
        match c_function(family, &w.act(xi)?, g) {
            Ok(c) => r.value(label, c.to_complex()),
            Err(e) if near.is_some() => r.note(format!("{label} unavailable: {e}")),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(r)
}

pub fn table(cfg: &RunConfig, out: &Path, regularize: bool) -> Outcome {
    let t = build_table(cfg.family, &cfg.xi, &cfg.g, &cfg.settings, regularize)?;
    let file = File::create(out).map_err(|e| CliError::Io(format!("cannot create {}: {e}", out.display())))?;
    write_table(&t, BufWriter::new(file))?;
    let mut r = Report::default();
    r.real("entries", t.len() as f64);
    if let Some(delta) = t.regularizer() {
        r.value("regularizer", delta);
    }
    r.note(format!("wrote {}", out.display()));
    Ok(r)
}

pub fn parse_kinds(s: Option<&str>) -> Result<Vec<ConfluenceKind>, String> {
    match s.map(|v| v.trim().to_ascii_lowercase()).as_deref() {
        None | Some("both") => Ok(vec![ConfluenceKind::M, ConfluenceKind::L]),
        Some("m") | Some("t") => Ok(vec![ConfluenceKind::M]),
        Some("l") | Some("cs") => Ok(vec![ConfluenceKind::L]),
        Some(other) => Err(format!("unknown confluence kind '{other}' (expected m, l or both)")),
    }
}

fn kind_tag(k: ConfluenceKind) -> &'static str {
    match k {
        ConfluenceKind::M => "m",
        ConfluenceKind::L => "l",
    }
}

fn require_bc(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.family != Family::Bc {
        return Err(CliError::Config(format!(
            "confluences start from family bc, config has '{}'",
            cfg.family
        )));
    }
    Ok(())
}

fn grid(cfg: &RunConfig) -> Vec<f64> {
    cfg.raw.grid.clone().unwrap_or_else(|| DEFAULT_GRID.to_vec())
}

pub fn scan_cmd(cfg: &RunConfig) -> Outcome {
    require_bc(cfg)?;
    let x = cfg.position()?;
    let grid = grid(cfg);
    let mut r = Report::default();
    for kind in parse_kinds(cfg.raw.kind.as_deref())? {
        let tag = kind_tag(kind);
        let rows = scan(kind, &cfg.xi, x, &cfg.g, &grid, &cfg.settings)?;
        for p in &rows {
            r.real(format!("{tag}.series[c={}]", p.c), p.series);
            r.real(format!("{tag}.wavefunction[c={}]", p.c), p.wavefunction);
            r.real(format!("{tag}.c_function[c={}]", p.c), p.c_function);
        }
        if rows.len() >= 2 {
            let series: Vec<f64> = rows.iter().map(|p| p.series).collect();
            let (slope, r2) = log_linear_fit(&grid, &series);
            r.real(format!("{tag}.series.log_slope"), slope);
            r.real(format!("{tag}.series.log_r2"), r2);
        }
    }
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Eigen,
    Difference,
    Asymptotics,
    Confluence,
    Analyticity,
}

impl Suite {
    pub fn parse(s: &str) -> Result<Suite, String> {
        <Suite as clap::ValueEnum>::from_str(s, true).map_err(|_| format!("unknown suite '{s}'"))
    }
}

pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Non-increasing, where two consecutive values both below `floor` count as equal.
pub fn decreasing_to_floor(v: &[f64], floor: f64) -> bool {
    v.windows(2).all(|w| w[1] < w[0] || (w[0] <= floor && w[1] <= floor))
}

pub fn verify(cfg: &RunConfig, suite: Suite) -> Outcome {
    let mut r = Report::default();
    match suite {
        Suite::Eigen => verify_eigen(cfg, &mut r)?,
        Suite::Difference => verify_difference(cfg, &mut r)?,
        Suite::Asymptotics => verify_asymptotics(cfg, &mut r)?,
        Suite::Confluence => verify_confluence(cfg, &mut r)?,
        Suite::Analyticity => verify_analyticity(cfg, &mut r)?,
    }
    Ok(r)
}

fn verify_eigen(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    let x = cfg.position()?;
    let top = cfg.settings.max_level;
    let mut levels = vec![top / 3, 2 * top / 3, top];
    levels.dedup();
    let mut series = Vec::new();
    for &n in &levels {
        let s = cfg.settings.clone().with_level(n);
        let v = eigen_residual(cfg.family, &cfg.xi, x, &cfg.g, &s, false)?;
        r.real(format!("eigen.phi[N={n}]"), v);
        series.push(v);
    }
    r.check(Check::at_most(format!("eigen.phi[N={top}]"), series[series.len() - 1], EIGEN_TOL));
    r.check(Check::flag("eigen.phi.monotone", decreasing_to_floor(&series, EIGEN_FLOOR)));
    match eigen_residual(cfg.family, &cfg.xi, x, &cfg.g, &cfg.settings, true) {
        Ok(v) => r.check(Check::at_most(format!("eigen.Phi[N={top}]"), v, EIGEN_TOL)),
        Err(e @ Error::NearSingularSpectral { .. }) => r.note(format!("Phi residual skipped: {e}")),
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn verify_difference(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    let x = cfg.position()?;
    let n = cfg.xi.dim();
    let ells = cfg.raw.ell.clone().unwrap_or_else(|| (1..=n.min(2)).collect());
    for ell in ells {
        let d = difference_residual(cfg.family, ell, &cfg.xi, x, &cfg.g, &cfg.settings)?;
        if d.perturbed {
            r.note(format!("l={ell}: xi moved to {:?} to keep shifted points regular", d.xi));
        }
        let tol = if ell <= 2 { DIFFERENCE_TOL } else { DIFFERENCE_TOL_HIGH };
        r.check(Check::at_most(format!("difference[l={ell}]"), d.residual, tol));
        if ell <= 2 {
            let a = path_agreement(cfg.family, ell, &cfg.xi, x, &cfg.g, &cfg.settings)?;
            r.check(Check::at_most(format!("difference.paths[l={ell}]"), a, PATH_TOL));
        }
    }
    Ok(())
}

fn verify_asymptotics(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    let table = build_table(cfg.family, &cfg.xi, &cfg.g, &cfg.settings, false)?;
    let rho: Vec<f64> = rho(cfg.xi.dim()).iter().map(|&v| v as f64).collect();
    let mut gaps = Vec::new();
    for t in 2..=8 {
        let x: Vec<f64> = rho.iter().map(|v| t as f64 * v).collect();
        let gap = asymptotics_gap(&table, &x, cfg.settings.tol.int)?;
        r.real(format!("asymptotics[t={t}]"), gap);
        gaps.push(gap);
    }
    r.check(Check::flag("asymptotics.strictly_decreasing", strictly_decreasing(&gaps)));
    r.check(Check::at_most("asymptotics[t=8]", gaps[gaps.len() - 1], ASYMPTOTIC_FINAL));
    Ok(())
}

fn verify_confluence(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    require_bc(cfg)?;
    let x = cfg.position()?;
    let grid = grid(cfg);
    for kind in parse_kinds(cfg.raw.kind.as_deref())? {
        let tag = kind_tag(kind);
        let rows = scan(kind, &cfg.xi, x, &cfg.g, &grid, &cfg.settings)?;
        let columns: [(&str, Vec<f64>); 3] = [
            ("series", rows.iter().map(|p| p.series).collect()),
            ("wavefunction", rows.iter().map(|p| p.wavefunction).collect()),
            ("c_function", rows.iter().map(|p| p.c_function).collect()),
        ];
        for (name, values) in &columns {
            for (c, v) in grid.iter().zip(values) {
                r.real(format!("{tag}.{name}[c={c}]"), *v);
            }
            r.check(Check::flag(format!("{tag}.{name}.strictly_decreasing"), strictly_decreasing(values)));
            let (_, r2) = log_linear_fit(&grid, values);
            r.check(Check::at_least(format!("{tag}.{name}.log_linear_r2"), r2, LOG_LINEAR_R2));
        }
        let s = cfg.settings.clone().with_level(COEFF_LEVEL);
        let coeff = coefficient_confluence(kind, &cfg.xi, &cfg.g, COEFF_C, COEFF_LEVEL, &s)?;
        r.check(Check::at_most(format!("{tag}.coefficients[c={COEFF_C}]"), coeff, COEFF_TOL));
    }
    Ok(())
}

fn verify_analyticity(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    let x = cfg.position()?;
    let (family, xi, g, s) = (cfg.family, &cfg.xi, &cfg.g, &cfg.settings);
    let near = xi.nearest_hyperplane(false).filter(|h| h.distance < s.tol.pole_guard);
    match near {
        None => {
            let inner = Settings {
                exec: hyperwave::Execution::Sequential,
                ..s.clone()
            };
            let base = wavefunction(family, xi, x, g, s)?;
            let group = SignedPermutation::all(xi.dim());
            let diffs = s.exec.try_map(&group, |w| -> hyperwave::Result<f64> {
                let v = Orbit::build(family, &w.act(xi)?, g, &inner)?.evaluate(x, &inner)?;
                Ok((v - base).norm() / base.norm())
            })?;
            let worst = diffs.into_iter().fold(0.0, f64::max);
            r.value("Phi", base);
            r.check(Check::at_most("w_invariance", worst, W_INVARIANCE_TOL));
        }
        Some(hit) => {
            let reg = wavefunction_regular(family, xi, x, g, s, &DEFAULT_OFFSETS)?;
            let mags: Vec<f64> = reg.samples.iter().map(|v| v.norm()).collect();
            let spread = mags.iter().cloned().fold(0.0, f64::max) / mags.iter().cloned().fold(f64::INFINITY, f64::min);
            r.value("Phi", reg.value);
            r.real("Phi.extrapolation_error", reg.error_estimate);
            r.check(Check::flag("pole_removal.finite", reg.value.is_finite()));
            r.check(Check::at_most("pole_removal.sample_spread", spread, POLE_BOUND_FACTOR));
            r.note(format!("xi lies {:.3e} from {}", hit.distance, hit.plane));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_rules() {
        assert!(strictly_decreasing(&[3.0, 2.0, 1.0]));
        assert!(!strictly_decreasing(&[3.0, 3.0]));
        assert!(decreasing_to_floor(&[1e-9, 7e-16, 8e-16], EIGEN_FLOOR));
        assert!(!decreasing_to_floor(&[1e-9, 1e-10, 1e-9], EIGEN_FLOOR));
    }

    #[test]
    fn kinds() {
        assert_eq!(parse_kinds(None).unwrap().len(), 2);
        assert_eq!(parse_kinds(Some("cs")).unwrap(), vec![ConfluenceKind::L]);
        assert!(parse_kinds(Some("x")).is_err());
    }
}
