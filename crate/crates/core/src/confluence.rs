//! The confluent limits `bc -> t` and `bc -> cs`: positions are translated by
//! `c rho_M` (resp. `c rho_L`) while the couplings follow `g -> g^(c)`.
//!
//! Large `c` makes the bc recurrence input enormous, so the series side is
//! evaluated with the prescaled input `e^{-c l <alpha, rho_K>} a_{alpha,l}(g^(c))`
//! at the untranslated point, which is the same series term by term.

use serde::{Deserialize, Serialize};

use crate::bispectral::{e_eigenvalue, u_coeff, v_coeff, SignedIndexSet};
use crate::domain::{rho_l, rho_m, Couplings, Family, Root, SignedPermutation, SpectralPoint, C64};
use crate::error::{Error, Result};
use crate::hcseries::{build_table, build_table_with_input, series_eval, CoeffTable, RecurrenceInput};
use crate::operators::potential;
use crate::special::{log_c_function, log_confluence_prefactor, ConfluenceKind};
use crate::sum::ComplexSum;
use crate::Settings;

pub const DEFAULT_GRID: [f64; 5] = [2.0, 4.0, 6.0, 8.0, 10.0];

/// `rho_M` or `rho_L`.
pub fn direction(kind: ConfluenceKind, n: usize) -> Vec<i32> {
    match kind {
        ConfluenceKind::M => rho_m(n),
        ConfluenceKind::L => rho_l(n),
    }
}

/// `g^(c)`: kind `M` replaces `g_M` by the positive root of
/// `g(g - 1) = e^c`; kind `L` doubles `g_S` and replaces `g_L` by the
/// positive root of `g(g - 1) = e^{2c}/16`.
pub fn coupling_path(kind: ConfluenceKind, g: &Couplings, c: f64) -> Couplings {
    let mut out = g.clone();
    match kind {
        ConfluenceKind::M => {
            out.gm = C64::new(0.5 * (1.0 + (1.0 + 4.0 * c.exp()).sqrt()), 0.0);
        }
        ConfluenceKind::L => {
            out.gs = 2.0 * g.gs;
            out.gl = C64::new(0.5 * (1.0 + (1.0 + 0.25 * (2.0 * c).exp()).sqrt()), 0.0);
        }
    }
    out
}

/// bc recurrence input at `g^(c)` multiplied by `e^{-c l <alpha, rho_K>}`.
pub fn prescaled_input(kind: ConfluenceKind, g: &Couplings, c: f64, max_level: usize) -> RecurrenceInput {
    let n = g.n();
    let dir = direction(kind, n);
    let gc = coupling_path(kind, g, c);
    RecurrenceInput::new(Family::Bc, &gc, max_level).scaled(n, |root: Root, l| {
        C64::new((-c * l as f64 * root.pair(&dir) as f64).exp(), 0.0)
    })
}

fn check_bc_point(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    if !Family::Bc.contains(x) {
        return Err(Error::ChamberViolation {
            module: "confluence",
            family: "bc",
            x: x.to_vec(),
            reason: "confluence scans start from a point of the bc chamber".into(),
        });
    }
    Ok(())
}

/// The bc table along the path, regularized, in its prescaled form.
pub fn prescaled_table(
    kind: ConfluenceKind,
    xi: &SpectralPoint,
    g: &Couplings,
    c: f64,
    settings: &Settings,
) -> Result<CoeffTable> {
    let input = prescaled_input(kind, g, c, settings.max_level);
    build_table_with_input(Family::Bc, xi, &coupling_path(kind, g, c), &input, settings, true)
}

/// `|e^{-c<xi,rho_K>} Delta phi^bc(x + c rho_K; g^(c)) - Delta phi^target(x; g)|`.
pub fn series_confluence_error(
    kind: ConfluenceKind,
    xi: &SpectralPoint,
    x: &[f64],
    g: &Couplings,
    c: f64,
    settings: &Settings,
) -> Result<f64> {
    check_bc_point(x, xi.dim())?;
    let source = prescaled_table(kind, xi, g, c, settings)?;
    let target = build_table(kind.target(), xi, g, settings, true)?;
    let a = series_eval(&source, x)?.value;
    let b = series_eval(&target, x)?.value;
    Ok((a - b).norm())
}

/// The translated series computed directly, `e^{-c<xi,rho_K>} Delta phi^bc(x + c rho_K; g^(c))`,
/// next to the prescaled evaluation of the same quantity.
pub fn translated_pair(
    kind: ConfluenceKind,
    xi: &SpectralPoint,
    x: &[f64],
    g: &Couplings,
    c: f64,
    settings: &Settings,
) -> Result<(C64, C64)> {
    check_bc_point(x, xi.dim())?;
    let dir = direction(kind, xi.dim());
    let gc = coupling_path(kind, g, c);
    let direct = build_table(Family::Bc, xi, &gc, settings, true)?;
    let shifted: Vec<f64> = x.iter().zip(&dir).map(|(a, &d)| a + c * d as f64).collect();
    let lhs = (-c * xi.pair_int(&dir)).exp() * series_eval(&direct, &shifted)?.value;
    let rhs = series_eval(&prescaled_table(kind, xi, g, c, settings)?, x)?.value;
    Ok((lhs, rhs))
}

/// Largest relative gap between the prescaled bc coefficients at `c` and the
/// regularized target coefficients, over all levels up to `max_level`.
pub fn coefficient_confluence(
    kind: ConfluenceKind,
    xi: &SpectralPoint,
    g: &Couplings,
    c: f64,
    max_level: usize,
    settings: &Settings,
) -> Result<f64> {
    let settings = Settings {
        max_level,
        ..settings.clone()
    };
    let source = prescaled_table(kind, xi, g, c, &settings)?;
    let target = build_table(kind.target(), xi, g, &settings, true)?;
    let scale = target.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    Ok(source
        .iter()
        .zip(target.iter())
        .map(|((_, a), (_, b))| (a - b).norm() / b.norm().max(1e-3 * scale))
        .fold(0.0, f64::max))
}

/// `|gamma_K(g^(c)) e^{c<xi,rho_K>} C^bc(xi; g^(c)) - C^target(xi; g)| / |C^target|`.
pub fn c_function_confluence_error(kind: ConfluenceKind, xi: &SpectralPoint, g: &Couplings, c: f64) -> Result<f64> {
    let n = xi.dim();
    let gc = coupling_path(kind, g, c);
    let dir = direction(kind, n);
    let target = log_c_function(kind.target(), xi, g)?
        .ok_or_else(|| Error::invalid("confluence", "target c-function vanishes"))?;
    let source = log_c_function(Family::Bc, xi, &gc)?
        .ok_or_else(|| Error::invalid("confluence", "bc c-function vanishes"))?;
    let log = log_confluence_prefactor(kind, &gc, n)? + c * xi.pair_int(&dir) + source;
    Ok(((log - target).exp() - 1.0).norm())
}

/// `|gamma_K(g^(c)) Phi^bc(x + c rho_K; g^(c)) - Phi^target(x; g)| / |Phi^target(x; g)|`.
pub fn wavefunction_confluence_error(
    kind: ConfluenceKind,
    xi: &SpectralPoint,
    x: &[f64],
    g: &Couplings,
    c: f64,
    settings: &Settings,
) -> Result<f64> {
    let n = xi.dim();
    check_bc_point(x, n)?;
    xi.check_dim(g.n())?;
    if let Some(hit) = xi.nearest_hyperplane(false) {
        if hit.distance < settings.tol.pole_guard {
            return Err(Error::NearSingularSpectral {
                hyperplane: hit.plane.to_string(),
                distance: hit.distance,
            });
        }
    }
    let gc = coupling_path(kind, g, c);
    let dir = direction(kind, n);
    let gamma = log_confluence_prefactor(kind, &gc, n)?;
    let elements = SignedPermutation::all(n);
    let inner = Settings {
        exec: crate::Execution::Sequential,
        ..settings.clone()
    };
    // Each orbit term: ln weight and the series with its plane wave factored out.
    let terms = settings.exec.try_map(&elements, |w| -> Result<Option<[(C64, C64); 2]>> {
        let point = w.act(xi)?;
        let lc_bc = log_c_function(Family::Bc, &point, &gc)?;
        let lc_t = log_c_function(kind.target(), &point, g)?;
        let (Some(lc_bc), Some(lc_t)) = (lc_bc, lc_t) else {
            return Ok(None);
        };
        let input = prescaled_input(kind, g, c, settings.max_level);
        let src = build_table_with_input(Family::Bc, &point, &gc, &input, &inner, false)?;
        let tgt = build_table(kind.target(), &point, g, &inner, false)?;
        let plane = point.pair(x);
        let src_sum = src.scaled(x).sum;
        let tgt_sum = tgt.scaled(x).sum;
        Ok(Some([
            (gamma + lc_bc + c * point.pair_int(&dir) + plane, src_sum),
            (lc_t + plane, tgt_sum),
        ]))
    })?;
    let present: Vec<_> = terms.into_iter().flatten().collect();
    let scale = present
        .iter()
        .flat_map(|t| t.iter().map(|(l, _)| l.re))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut src = ComplexSum::new();
    let mut tgt = ComplexSum::new();
    for [(ls, s), (lt, t)] in &present {
        src.add((ls - scale).exp() * s);
        tgt.add((lt - scale).exp() * t);
    }
    Ok((src.value() - tgt.value()).norm() / tgt.value().norm())
}

/// `|V^bc(x + c rho_K; g^(c)) - V^target(x; g)|`.
pub fn potential_confluence_error(
    kind: ConfluenceKind,
    x: &[f64],
    g: &Couplings,
    c: f64,
    settings: &Settings,
) -> Result<f64> {
    check_bc_point(x, g.n())?;
    let dir = direction(kind, g.n());
    let shifted: Vec<f64> = x.iter().zip(&dir).map(|(a, &d)| a + c * d as f64).collect();
    let source = potential(Family::Bc, &shifted, &coupling_path(kind, g, c), &settings.tol)?;
    let target = potential(kind.target(), x, g, &settings.tol)?;
    Ok((source - target).norm())
}

/// Largest relative error of the rescaled recurrence coefficients
/// `e^{-c l <alpha, rho_K>} a^bc_{alpha,l}(g^(c))` against the target ones.
pub fn recurrence_confluence_error(kind: ConfluenceKind, g: &Couplings, c: f64, max_level: usize) -> f64 {
    let source = prescaled_input(kind, g, c, max_level);
    let target = RecurrenceInput::new(kind.target(), g, max_level);
    source
        .coeffs
        .iter()
        .flatten()
        .zip(target.coeffs.iter().flatten())
        .map(|(a, b)| (a - b).norm() / b.norm().max(1.0))
        .fold(0.0, f64::max)
}

/// Largest relative error among the rescaled bc coefficients `V`, `U` and
/// `E_l` of the `l`-th difference equation against the target ones.
pub fn difference_data_confluence_error(
    kind: ConfluenceKind,
    ell: usize,
    xi: &SpectralPoint,
    x: &[f64],
    g: &Couplings,
    c: f64,
) -> Result<f64> {
    let n = xi.dim();
    check_bc_point(x, n)?;
    let gc = coupling_path(kind, g, c);
    let target = kind.target();
    let rate = |size: usize, k: usize| -> f64 {
        match kind {
            ConfluenceKind::M => 0.5 * c * size as f64 * (2.0 * k as f64 - 1.0 - size as f64),
            ConfluenceKind::L => c * size as f64,
        }
    };
    let rel = |a: C64, b: C64| (a - b).norm() / b.norm().max(1e-300);
    let full = (1u32 << n) - 1;
    let mut worst: f64 = 0.0;
    for size in 0..=ell {
        for set in SignedIndexSet::all_of(full, size) {
            let v = v_coeff(Family::Bc, &set, xi, &gc)? * (-rate(size, n)).exp();
            worst = worst.max(rel(v, v_coeff(target, &set, xi, g)?));
            let k_mask = full & !set.mask();
            let p = ell - size;
            let u = u_coeff(Family::Bc, k_mask, p, xi, &gc)? * (-rate(p, n - size)).exp();
            worst = worst.max(rel(u, u_coeff(target, k_mask, p, xi, g)?));
        }
    }
    let dir = direction(kind, n);
    let shifted: Vec<f64> = x.iter().zip(&dir).map(|(a, &d)| a + c * d as f64).collect();
    let e = e_eigenvalue(Family::Bc, ell, &shifted)? * (-rate(ell, n)).exp();
    let e_target = e_eigenvalue(target, ell, x)?;
    worst = worst.max((e - e_target).abs() / e_target.abs());
    Ok(worst)
}

/// One row of a confluence scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub c: f64,
    pub series: f64,
    pub wavefunction: f64,
    pub c_function: f64,
}

/// Series, wave-function and c-function errors over a grid of `c`, in
/// parallel over the grid.
pub fn scan(
    kind: ConfluenceKind,
    xi: &SpectralPoint,
    x: &[f64],
    g: &Couplings,
    grid: &[f64],
    settings: &Settings,
) -> Result<Vec<ScanPoint>> {
    let inner = Settings {
        exec: crate::Execution::Sequential,
        ..settings.clone()
    };
    settings.exec.try_map(grid, |&c| {
        Ok(ScanPoint {
            c,
            series: series_confluence_error(kind, xi, x, g, c, &inner)?,
            wavefunction: wavefunction_confluence_error(kind, xi, x, g, c, &inner)?,
            c_function: c_function_confluence_error(kind, xi, g, c)?,
        })
    })
}

/// Least-squares slope and coefficient of determination of `ln y` against `c`.
pub fn log_linear_fit(c: &[f64], y: &[f64]) -> (f64, f64) {
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = c.len() as f64;
    let mc = c.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = c.iter().zip(&ly).map(|(a, b)| (a - mc) * (b - my)).sum();
    let sxx: f64 = c.iter().map(|a| (a - mc).powi(2)).sum();
    let syy: f64 = ly.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn path_examples() {
        let g = Couplings::real(0.3, 0.7, 0.2, 2);
        let m = coupling_path(ConfluenceKind::M, &g, 0.0);
        assert!((m.gm.re - 0.5 * (1.0 + 5f64.sqrt())).abs() < 1e-15);
        assert_eq!((m.gs, m.gl), (g.gs, g.gl));
        for cc in [0.0, 3.0, 9.0] {
            let l = coupling_path(ConfluenceKind::L, &g, cc);
            assert_eq!(l.gs, 2.0 * g.gs);
            assert!((l.gl * (l.gl - 1.0) - c((2.0 * cc).exp() / 16.0, 0.0)).norm() < 1e-12 * (2.0 * cc).exp());
        }
        let l = coupling_path(ConfluenceKind::L, &g, 0.0);
        assert!((l.gl.re - 0.5 * (1.0 + 1.25f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn recurrence_input_converges() {
        let g = Couplings::new(c(0.3, 0.1), c(0.7, 0.0), c(0.4, 0.2), 3);
        for kind in [ConfluenceKind::M, ConfluenceKind::L] {
            let errs: Vec<f64> = [10.0, 20.0, 30.0].iter().map(|&cc| recurrence_confluence_error(kind, &g, cc, 12)).collect();
            assert!(errs[0] > errs[1] && errs[1] > errs[2], "{kind:?} {errs:?}");
            assert!(errs[2] < 1e-11);
        }
    }

    #[test]
    fn potentials_converge() {
        let g = Couplings::new(c(0.3, 0.1), c(0.7, 0.0), c(0.4, 0.2), 2);
        let s = Settings::default();
        for kind in [ConfluenceKind::M, ConfluenceKind::L] {
            let errs: Vec<f64> = [10.0, 20.0, 30.0]
                .iter()
                .map(|&cc| potential_confluence_error(kind, &[2.5, 1.0], &g, cc, &s).unwrap())
                .collect();
            assert!(errs[0] > errs[1] && errs[1] > errs[2], "{kind:?} {errs:?}");
        }
    }

    #[test]
    fn rank_one_toda_limit_is_a_parameter_limit() {
        let g = Couplings::new(c(0.3, 0.1), c(0.7, 0.0), c(0.4, 0.2), 1);
        let xi = SpectralPoint(vec![c(0.2, 0.9)]);
        let s = Settings::default().with_level(20);
        let e = wavefunction_confluence_error(ConfluenceKind::M, &xi, &[1.5], &g, 6.0, &s).unwrap();
        assert!(e < 1e-12, "{e}");
    }

    #[test]
    fn fit_of_exact_exponential() {
        let cs = [2.0, 4.0, 6.0];
        let ys: Vec<f64> = cs.iter().map(|v: &f64| (-0.5 * v).exp()).collect();
        let (slope, r2) = log_linear_fit(&cs, &ys);
        assert!((slope + 0.5).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }
}
