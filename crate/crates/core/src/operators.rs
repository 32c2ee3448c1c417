//! Potentials of the three Schrödinger operators `L = sum d^2/dx_j^2 + V(x)`,
//! their action on truncated series and wave functions, and a
//! finite-difference oracle.

use serde::{Deserialize, Serialize};

use crate::domain::{Couplings, Family, SpectralPoint, Tolerances, C64};
use crate::error::{Error, Result};
use crate::hcseries::{build_table, CoeffTable};
use crate::wavefn::Orbit;
use crate::Settings;

fn inv_sinh2(t: f64, tol: &Tolerances, x: &[f64], family: Family) -> Result<f64> {
    if t.abs() < tol.x {
        return Err(Error::ChamberViolation {
            module: "operators",
            family: family.as_str(),
            x: x.to_vec(),
            reason: format!("sinh argument {t:.3e} is within {:.0e} of a wall", tol.x),
        });
    }
    Ok(1.0 / t.sinh().powi(2))
}

/// The potential `V(x)` (everything in `L` except the Laplacian).
pub fn potential(family: Family, x: &[f64], g: &Couplings, tol: &Tolerances) -> Result<C64> {
    let n = x.len();
    if g.n() != n {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: n,
        });
    }
    if !family.contains(x) {
        return Err(Error::ChamberViolation {
            module: "operators",
            family: family.as_str(),
            x: x.to_vec(),
            reason: format!("chamber margin {:.3e} is not positive", family.chamber_margin(x)),
        });
    }
    let one = C64::new(1.0, 0.0);
    let short = 0.25 * g.gs * (g.gs + 2.0 * g.gl - one);
    let long = g.gl * (g.gl - one);
    let middle = 0.5 * g.gm * (g.gm - one);
    let s2 = |t: f64| inv_sinh2(t, tol, x, family);
    let mut v = C64::new(0.0, 0.0);
    match family {
        Family::Bc => {
            for j in 0..n {
                v -= short * s2(0.5 * x[j])? + long * s2(x[j])?;
                for k in j + 1..n {
                    v -= middle * (s2(0.5 * (x[j] + x[k]))? + s2(0.5 * (x[j] - x[k]))?);
                }
            }
        }
        Family::T => {
            for j in 0..n.saturating_sub(1) {
                v -= g.a[j] * (x[j + 1] - x[j]).exp();
            }
            if n >= 2 {
                v -= g.a[n - 2] * (-x[n - 2] - x[n - 1]).exp();
            }
            v -= short * s2(0.5 * x[n - 1])? + long * s2(x[n - 1])?;
        }
        Family::Cs => {
            for j in 0..n {
                v -= g.gs * (-x[j]).exp() + g.a[n - 1] * (-2.0 * x[j]).exp();
                for k in j + 1..n {
                    v -= middle * s2(0.5 * (x[j] - x[k]))?;
                }
            }
        }
    }
    Ok(v)
}

/// `L` applied termwise to the truncated series of `table`.
pub fn apply_l_to_series(table: &CoeffTable, x: &[f64], tol: &Tolerances) -> Result<C64> {
    table.check_chamber(x, "operators")?;
    let v = potential(table.family(), x, table.couplings(), tol)?;
    let s = table.scaled(x);
    Ok(s.exponent.exp() * (s.laplacian + v * s.sum))
}

/// `|L f - <xi, xi> f| / |f|` for `f = phi_xi` or, with
/// `use_wavefunction`, `f = Phi_xi`.
pub fn eigen_residual(
    family: Family,
    xi: &SpectralPoint,
    x: &[f64],
    g: &Couplings,
    settings: &Settings,
    use_wavefunction: bool,
) -> Result<f64> {
    let ev = xi.square();
    if use_wavefunction {
        if let Some(hit) = xi.nearest_hyperplane(false) {
            if hit.distance < settings.tol.pole_guard {
                return Err(Error::NearSingularSpectral {
                    hyperplane: hit.plane.to_string(),
                    distance: hit.distance,
                });
            }
        }
        let s = Orbit::build(family, xi, g, settings)?.evaluate_scaled(x, settings)?;
        Ok((s.applied - ev * s.value).norm() / s.value.norm())
    } else {
        let table = build_table(family, xi, g, settings, false)?;
        table.check_chamber(x, "operators")?;
        let v = potential(family, x, g, &settings.tol)?;
        let s = table.scaled(x);
        Ok((s.laplacian + v * s.sum - ev * s.sum).norm() / s.sum.norm())
    }
}

/// Central second-difference stencils.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stencil {
    /// `(f(x+h) - 2f(x) + f(x-h)) / h^2`, error `O(h^2)`.
    ThreePoint,
    /// `(-f(x+2h) + 16f(x+h) - 30f(x) + 16f(x-h) - f(x-2h)) / (12 h^2)`, error `O(h^4)`.
    #[default]
    FivePoint,
}

/// `L f` with the Laplacian replaced by central differences of step `h`.
pub fn apply_operator_fd(
    family: Family,
    g: &Couplings,
    x: &[f64],
    h: f64,
    stencil: Stencil,
    tol: &Tolerances,
    f: &dyn Fn(&[f64]) -> Result<C64>,
) -> Result<C64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("operators", format!("step must be positive, got {h}")));
    }
    let center = f(x)?;
    let at = |j: usize, offset: f64| -> Result<C64> {
        let mut y = x.to_vec();
        y[j] += offset;
        f(&y)
    };
    let mut lap = C64::new(0.0, 0.0);
    for j in 0..x.len() {
        lap += match stencil {
            Stencil::ThreePoint => (at(j, h)? - 2.0 * center + at(j, -h)?) / (h * h),
            Stencil::FivePoint => {
                (-at(j, 2.0 * h)? + 16.0 * at(j, h)? - 30.0 * center + 16.0 * at(j, -h)? - at(j, -2.0 * h)?)
                    / (12.0 * h * h)
            }
        };
    }
    Ok(lap + potential(family, x, g, tol)? * center)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hcseries::series_eval;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn morse_rank_one() {
        let g = Couplings::real(0.7, 0.0, 0.0, 1);
        let x = 1.3f64;
        let v = potential(Family::Cs, &[x], &g, &Tolerances::default()).unwrap();
        let expected = -0.7 * (-x).exp() - 0.25 * (-2.0 * x).exp();
        assert!((v - c(expected, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn free_potentials_vanish() {
        let tol = Tolerances::default();
        for family in Family::ALL {
            let v = potential(family, &[3.0, 2.0, 1.0], &Couplings::zero(3), &tol).unwrap();
            assert_eq!(v, c(0.0, 0.0));
        }
    }

    #[test]
    fn bc_rank_two_transcription() {
        // Six terms written out separately.
        let (gs, gm, gl) = (1.0, 2.0, 1.0);
        let (x1, x2) = (3.0f64, 1.0f64);
        let cs2 = |t: f64| 1.0 / t.sinh().powi(2);
        let expected = -0.25 * gs * (gs + 2.0 * gl - 1.0) * (cs2(x1 / 2.0) + cs2(x2 / 2.0))
            - gl * (gl - 1.0) * (cs2(x1) + cs2(x2))
            - 0.5 * gm * (gm - 1.0) * (cs2((x1 + x2) / 2.0) + cs2((x1 - x2) / 2.0));
        let v = potential(Family::Bc, &[x1, x2], &Couplings::real(gs, gm, gl, 2), &Tolerances::default()).unwrap();
        assert!((v.re - expected).abs() < 1e-14 && v.im == 0.0);
    }

    #[test]
    fn walls_are_rejected() {
        let g = Couplings::real(1.0, 2.0, 1.0, 2);
        let tol = Tolerances::default();
        assert!(potential(Family::Bc, &[1.0, 1.0], &g, &tol).is_err());
        assert!(potential(Family::T, &[1.0, -1.0], &g, &tol).is_err());
        assert!(potential(Family::Cs, &[1.0, -1.0], &g, &tol).is_ok());
    }

    #[test]
    fn plane_wave_laplacian() {
        let g = Couplings::zero(2);
        let xi = SpectralPoint(vec![c(0.3, 0.2), c(-0.4, 0.9)]);
        let s = Settings::default().with_level(0);
        let t = build_table(Family::Cs, &xi, &g, &s, false).unwrap();
        let x = [0.4, -0.3];
        let lf = apply_l_to_series(&t, &x, &s.tol).unwrap();
        assert!((lf - xi.square() * xi.pair(&x).exp()).norm() < 1e-14);
        assert!(eigen_residual(Family::Cs, &xi, &x, &g, &s, false).unwrap() < 1e-15);
    }

    #[test]
    fn finite_differences_converge_to_analytic() {
        let g = Couplings::real(0.4, 0.7, 0.3, 2);
        let xi = SpectralPoint(vec![c(0.1, 1.1), c(-0.2, 0.4)]);
        let s = Settings::default().with_level(20);
        let t = build_table(Family::Bc, &xi, &g, &s, false).unwrap();
        let x = [4.0, 2.0];
        let exact = apply_l_to_series(&t, &x, &s.tol).unwrap();
        let f = |y: &[f64]| Ok(series_eval(&t, y)?.value);
        let err = |h: f64| {
            (apply_operator_fd(Family::Bc, &g, &x, h, Stencil::ThreePoint, &s.tol, &f).unwrap() - exact).norm()
        };
        let ratio = err(1e-2) / err(5e-3);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        let five = apply_operator_fd(Family::Bc, &g, &x, 1e-2, Stencil::FivePoint, &s.tol, &f).unwrap();
        assert!((five - exact).norm() < 1e-6 * exact.norm());
    }
}
