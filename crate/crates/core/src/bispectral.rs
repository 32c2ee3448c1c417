//! Difference equations in the spectral variable:
//!
//! ```text
//! sum_{J, eps} U_{J^c, l - |J|}(xi) V_{eps J}(xi) Phi_{xi + e_{eps J}}(x) = E_l(x) Phi_xi(x)
//! ```
//!
//! with the rational coefficients built from `v` and `w`, and the residual
//! check of this identity on the wave function.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{Couplings, Family, SpectralPoint, C64};
use crate::error::{Error, Result};
use crate::sum::ComplexSum;
use crate::wavefn::{Orbit, ScaledValue};
use crate::Settings;

const INT_TOL: f64 = 1e-9;
const PERTURBATION: f64 = 1e-3;
const MAX_PERTURBATIONS: u32 = 16;

fn pole(factor: &str, arg: C64) -> Error {
    Error::RationalPole {
        factor: factor.to_string(),
        arg,
    }
}

/// `v(z)`: `1 + g_M / z` for bc and cs, `1 / z` for t.
pub fn v_factor(family: Family, z: C64, g: &Couplings) -> Result<C64> {
    if z.norm() < INT_TOL {
        return Err(pole("v", z));
    }
    Ok(match family {
        Family::Bc | Family::Cs => 1.0 + g.gm / z,
        Family::T => 1.0 / z,
    })
}

/// `w(z)`: `(1 + (g_S/2 + g_L)/z)(1 + g_S/(1 + 2z))` for bc and t,
/// `(1/2) z^{-1} (1/2 + g_S/(1 + 2z))` for cs.
pub fn w_factor(family: Family, z: C64, g: &Couplings) -> Result<C64> {
    let one = C64::new(1.0, 0.0);
    if z.norm() < INT_TOL {
        return Err(pole("w", z));
    }
    if (one + 2.0 * z).norm() < INT_TOL {
        return Err(pole("w", z));
    }
    Ok(match family {
        Family::Bc | Family::T => (one + (0.5 * g.gs + g.gl) / z) * (one + g.gs / (one + 2.0 * z)),
        Family::Cs => 0.5 / z * (0.5 + g.gs / (one + 2.0 * z)),
    })
}

/// A signed subset `eps J`: sorted zero-based indices with a sign each.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedIndexSet {
    members: Vec<(usize, i8)>,
}

impl SignedIndexSet {
    pub fn new(mut members: Vec<(usize, i8)>) -> Result<Self> {
        members.sort_unstable();
        if members.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid("bispectral", format!("repeated index in {members:?}")));
        }
        if members.iter().any(|&(_, e)| e != 1 && e != -1) {
            return Err(Error::invalid("bispectral", format!("signs must be +-1: {members:?}")));
        }
        Ok(SignedIndexSet { members })
    }

    pub fn empty() -> Self {
        SignedIndexSet { members: Vec::new() }
    }

    pub fn members(&self) -> &[(usize, i8)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn mask(&self) -> u32 {
        self.members.iter().fold(0, |m, &(j, _)| m | 1 << j)
    }

    /// `e_{eps J}`.
    pub fn shift(&self, n: usize) -> Vec<i32> {
        let mut e = vec![0; n];
        for &(j, s) in &self.members {
            e[j] = s as i32;
        }
        e
    }

    /// Every signed subset of the index set `mask` with `size` elements.
    pub fn all_of(mask: u32, size: usize) -> Vec<SignedIndexSet> {
        let mut out = Vec::new();
        for sub in submasks_of_size(mask, size) {
            let idx: Vec<usize> = (0..32).filter(|j| sub >> j & 1 == 1).collect();
            for signs in 0..(1u32 << size) {
                let members = idx
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| (j, if signs >> i & 1 == 1 { -1 } else { 1 }))
                    .collect();
                out.push(SignedIndexSet { members });
            }
        }
        out
    }
}

fn submasks_of_size(mask: u32, size: usize) -> Vec<u32> {
    let mut out = Vec::new();
    let mut sub = mask;
    loop {
        if sub.count_ones() as usize == size {
            out.push(sub);
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & mask;
    }
    out.reverse();
    out
}

fn full_mask(n: usize) -> u32 {
    (1u32 << n) - 1
}

/// Product of the `w` factors, the cross factors with `others` and the pair
/// factors of a signed subset; `pair_sign` selects `v(z + 1)` (`+1`) or
/// `v(-z - 1)` (`-1`) as the second pair factor.
fn signed_product(
    family: Family,
    set: &SignedIndexSet,
    others: u32,
    xi: &[C64],
    g: &Couplings,
    pair_sign: f64,
) -> Result<C64> {
    let mut p = C64::new(1.0, 0.0);
    let m = set.members();
    for (a, &(j, e)) in m.iter().enumerate() {
        let zj = e as f64 * xi[j];
        p *= w_factor(family, zj, g).map_err(|err| rename(err, &format!("w({}xi_{})", sign(e), j + 1)))?;
        for k in (0..xi.len()).filter(|k| others >> k & 1 == 1) {
            p *= v_factor(family, zj + xi[k], g)
                .map_err(|err| rename(err, &format!("v({}xi_{} + xi_{})", sign(e), j + 1, k + 1)))?;
            p *= v_factor(family, zj - xi[k], g)
                .map_err(|err| rename(err, &format!("v({}xi_{} - xi_{})", sign(e), j + 1, k + 1)))?;
        }
        for &(jp, ep) in &m[a + 1..] {
            let z = zj + ep as f64 * xi[jp];
            let label = format!("{}xi_{} {}xi_{}", sign(e), j + 1, sign(ep), jp + 1);
            p *= v_factor(family, z, g).map_err(|err| rename(err, &format!("v({label})")))?;
            let second = if pair_sign > 0.0 { z + 1.0 } else { -z - 1.0 };
            p *= v_factor(family, second, g).map_err(|err| rename(err, &format!("v(+-({label}) + 1)")))?;
        }
    }
    Ok(p)
}

fn sign(e: i8) -> &'static str {
    if e < 0 {
        "-"
    } else {
        "+"
    }
}

fn rename(err: Error, factor: &str) -> Error {
    match err {
        Error::RationalPole { arg, .. } => pole(factor, arg),
        other => other,
    }
}

/// `V_{eps J}(xi; g)`.
pub fn v_coeff(family: Family, set: &SignedIndexSet, xi: &[C64], g: &Couplings) -> Result<C64> {
    let others = full_mask(xi.len()) & !set.mask();
    signed_product(family, set, others, xi, g, 1.0)
}

/// `U_{K,p}(xi; g)` with `K` given as a bit mask of zero-based indices.
pub fn u_coeff(family: Family, k_mask: u32, p: usize, xi: &[C64], g: &Couplings) -> Result<C64> {
    if p > k_mask.count_ones() as usize {
        return Err(Error::invalid("bispectral", format!("p = {p} exceeds |K|")));
    }
    let mut acc = ComplexSum::new();
    for set in SignedIndexSet::all_of(k_mask, p) {
        let others = k_mask & !set.mask();
        acc.add(signed_product(family, &set, others, xi, g, -1.0)?);
    }
    let s = if p % 2 == 1 { -1.0 } else { 1.0 };
    Ok(s * acc.value())
}

/// `E_l(x)`.
pub fn e_eigenvalue(family: Family, ell: usize, x: &[f64]) -> Result<f64> {
    let n = x.len();
    if ell == 0 || ell > n {
        return Err(Error::invalid("bispectral", format!("l = {ell} must lie in 1..={n}")));
    }
    let elementary = |f: &dyn Fn(f64) -> f64| -> f64 {
        submasks_of_size(full_mask(n), ell)
            .into_iter()
            .map(|m| (0..n).filter(|j| m >> j & 1 == 1).map(|j| f(x[j])).product::<f64>())
            .sum()
    };
    Ok(match family {
        Family::Bc => 4f64.powi(ell as i32) * elementary(&|t| (0.5 * t).sinh().powi(2)),
        Family::Cs => elementary(&|t| t.exp()),
        Family::T => {
            let mut e = x[..ell].iter().sum::<f64>().exp();
            if ell == n {
                e += x[..n - 1].iter().sum::<f64>().exp() * ((-x[n - 1]).exp() - 2.0);
            }
            e
        }
    })
}

/// Which arrangement of the left-hand side to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DifferencePath {
    /// The full sum over `(J, eps)` with the `U` coefficients.
    General,
    /// The `l = 1, 2` arrangement with differences `Phi_{shift} - Phi`.
    Specialized,
}

/// Coefficients of the left-hand side keyed by the shift `e_{eps J}`.
fn lhs_coefficients(
    family: Family,
    ell: usize,
    xi: &[C64],
    g: &Couplings,
    path: DifferencePath,
) -> Result<Vec<(Vec<i32>, C64)>> {
    let n = xi.len();
    let full = full_mask(n);
    let mut out = Vec::new();
    match path {
        DifferencePath::General => {
            for size in 0..=ell {
                for set in SignedIndexSet::all_of(full, size) {
                    let u = u_coeff(family, full & !set.mask(), ell - size, xi, g)?;
                    let v = v_coeff(family, &set, xi, g)?;
                    out.push((set.shift(n), u * v));
                }
            }
        }
        DifferencePath::Specialized => {
            let zero = vec![0; n];
            let mut center = C64::new(0.0, 0.0);
            let mut push = |shift: Vec<i32>, coef: C64| {
                center -= coef;
                out.push((shift, coef));
            };
            match ell {
                1 => {
                    for set in SignedIndexSet::all_of(full, 1) {
                        push(set.shift(n), v_coeff(family, &set, xi, g)?);
                    }
                }
                2 => {
                    for set in SignedIndexSet::all_of(full, 2) {
                        push(set.shift(n), v_coeff(family, &set, xi, g)?);
                    }
                    for set in SignedIndexSet::all_of(full, 1) {
                        let u = u_coeff(family, full & !set.mask(), 1, xi, g)?;
                        push(set.shift(n), u * v_coeff(family, &set, xi, g)?);
                    }
                }
                _ => {
                    return Err(Error::invalid(
                        "bispectral",
                        format!("the specialized arrangement exists for l = 1, 2 only (got {ell})"),
                    ))
                }
            }
            out.push((zero, center));
        }
    }
    Ok(out)
}

/// `|sum_{J, eps} U_{J^c, l-|J|} V_{eps J}| / sum |U V|`: the left-hand
/// operator kills constants, so this vanishes identically in `xi`.
pub fn constant_defect(family: Family, ell: usize, xi: &[C64], g: &Couplings) -> Result<f64> {
    let coefs = lhs_coefficients(family, ell, xi, g, DifferencePath::General)?;
    let total: ComplexSum = coefs.iter().map(|(_, c)| *c).collect();
    let scale: f64 = coefs.iter().map(|(_, c)| c.norm()).sum();
    Ok(total.value().norm() / scale)
}

/// Result of one difference-equation check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifferenceResidual {
    /// `|LHS - E Phi| / |E Phi|`.
    pub residual: f64,
    /// Spectral point actually used (moved when a shifted target was singular).
    pub xi: Vec<C64>,
    pub perturbed: bool,
    pub lhs: C64,
    pub rhs: C64,
}

fn all_shifts(n: usize) -> Vec<Vec<i32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                [-1, 0, 1].into_iter().map(move |s| {
                    let mut w = v.clone();
                    w.push(s);
                    w
                })
            })
            .collect();
    }
    out
}

/// Moves `xi` by a seeded displacement of size `1e-3` until every shift
/// target `xi + e`, `e in {-1, 0, 1}^n`, keeps the pole guard.
pub fn screen_shifts(xi: &SpectralPoint, settings: &Settings) -> Result<(SpectralPoint, bool)> {
    let n = xi.dim();
    let shifts = all_shifts(n);
    let ok = |p: &SpectralPoint| {
        shifts
            .iter()
            .all(|e| p.shifted(e).is_regular(settings.tol.pole_guard))
    };
    if ok(xi) {
        return Ok((xi.clone(), false));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    for _ in 0..MAX_PERTURBATIONS {
        let moved = SpectralPoint(
            xi.iter()
                .map(|z| {
                    z + C64::new(
                        PERTURBATION * rng.random_range(-1.0..1.0),
                        PERTURBATION * rng.random_range(-1.0..1.0),
                    )
                })
                .collect(),
        );
        if ok(&moved) {
            return Ok((moved, true));
        }
    }
    let hit = xi.nearest_hyperplane(false).expect("n >= 1");
    Err(Error::NearSingularSpectral {
        hyperplane: hit.plane.to_string(),
        distance: hit.distance,
    })
}

/// The left-hand side of the `l`-th equation and `E_l Phi_xi`, both relative
/// to the scale of `Phi_xi`.
fn evaluate_sides(
    family: Family,
    ell: usize,
    xi: &SpectralPoint,
    x: &[f64],
    g: &Couplings,
    settings: &Settings,
    path: DifferencePath,
) -> Result<(C64, C64, f64)> {
    let n = xi.dim();
    let coefs = lhs_coefficients(family, ell, xi, g, path)?;
    let mut shifts: Vec<Vec<i32>> = coefs.iter().map(|(s, _)| s.clone()).collect();
    shifts.push(vec![0; n]);
    shifts.sort();
    shifts.dedup();
    let values: Vec<ScaledValue> = settings.exec.try_map(&shifts, |e| {
        let point = xi.shifted(e);
        Orbit::build(family, &point, g, &Settings { exec: crate::Execution::Sequential, ..settings.clone() })?
            .evaluate_scaled(x, settings)
    })?;
    let phi: HashMap<&Vec<i32>, ScaledValue> = shifts.iter().zip(values).collect();
    let center = phi[&vec![0; n]];
    let mut lhs = ComplexSum::new();
    for (shift, coef) in &coefs {
        let p = phi[shift];
        lhs.add(coef * p.value * (p.scale - center.scale).exp());
    }
    let rhs = e_eigenvalue(family, ell, x)? * center.value;
    Ok((lhs.value(), rhs, center.scale))
}

/// Checks the `l`-th difference equation at `(xi, x)`.
pub fn difference_residual(
    family: Family,
    ell: usize,
    xi: &SpectralPoint,
    x: &[f64],
    g: &Couplings,
    settings: &Settings,
) -> Result<DifferenceResidual> {
    difference_residual_with(family, ell, xi, x, g, settings, DifferencePath::General)
}

pub fn difference_residual_with(
    family: Family,
    ell: usize,
    xi: &SpectralPoint,
    x: &[f64],
    g: &Couplings,
    settings: &Settings,
    path: DifferencePath,
) -> Result<DifferenceResidual> {
    xi.check_dim(g.n())?;
    e_eigenvalue(family, ell, x)?;
    let (point, perturbed) = screen_shifts(xi, settings)?;
    let (lhs, rhs, scale) = evaluate_sides(family, ell, &point, x, g, settings, path)?;
    let to_abs = scale.exp();
    Ok(DifferenceResidual {
        residual: (lhs - rhs).norm() / rhs.norm(),
        xi: point.0,
        perturbed,
        lhs: lhs * to_abs,
        rhs: rhs * to_abs,
    })
}

/// Relative difference between the general and the specialized left-hand
/// sides (`l = 1, 2`).
pub fn path_agreement(
    family: Family,
    ell: usize,
    xi: &SpectralPoint,
    x: &[f64],
    g: &Couplings,
    settings: &Settings,
) -> Result<f64> {
    let (point, _) = screen_shifts(xi, settings)?;
    let (a, _, _) = evaluate_sides(family, ell, &point, x, g, settings, DifferencePath::General)?;
    let (b, _, _) = evaluate_sides(family, ell, &point, x, g, settings, DifferencePath::Specialized)?;
    Ok((a - b).norm() / a.norm().max(b.norm()))
}
