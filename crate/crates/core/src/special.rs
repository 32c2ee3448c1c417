//! Complex log-gamma and the gamma-built objects: the one-variable factors
//! `c_v`, `c_w`, the full c-function, the confluence prefactors and the
//! weight `delta(x; g)` with its shift vector `rho_g`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::domain::{Couplings, Family, C64};
use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
// Published coefficients, kept verbatim.
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

fn nonpositive_integer(z: C64, tol: f64) -> Option<i64> {
    let k = z.re.round();
    if k <= 0.0 && (z - C64::new(k, 0.0)).norm() < tol {
        Some(-k as i64)
    } else {
        None
    }
}

fn lanczos(z: C64) -> C64 {
    let z = z - 1.0;
    let mut series = C64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// A logarithm of `sin(pi z)` that is continuous on the closed upper half
/// plane and vanishes at `z = 1/2`.
fn ln_sin_pi_upper(z: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    let u = (2.0 * PI * i * z).exp();
    -i * PI * z + C64::new(-std::f64::consts::LN_2, PI / 2.0) + (C64::new(1.0, 0.0) - u).ln()
}

/// Principal branch of `ln Gamma(z)`: analytic off the nonpositive real
/// axis and real on the positive axis. Lanczos kernel for `Re z >= 1/2`,
/// reflection below.
pub fn log_gamma(z: C64) -> Result<C64> {
    log_gamma_tol(z, 1e-9)
}

pub fn log_gamma_tol(z: C64, tol: f64) -> Result<C64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::invalid("special", format!("non-finite gamma argument {z}")));
    }
    if nonpositive_integer(z, tol).is_some() {
        return Err(Error::PoleOfGamma {
            factor: "Gamma(z)".into(),
            arg: z,
        });
    }
    Ok(log_gamma_unchecked(z))
}

fn log_gamma_unchecked(z: C64) -> C64 {
    if z.re >= 0.5 {
        return lanczos(z);
    }
    if z.im < 0.0 {
        return log_gamma_unchecked(z.conj()).conj();
    }
    C64::new(PI.ln(), 0.0) - ln_sin_pi_upper(z) - lanczos(C64::new(1.0, 0.0) - z)
}

/// One gamma factor `Gamma(offset + slope * z)` of a ratio.
#[derive(Clone, Copy, Debug)]
struct GammaTerm {
    offset: C64,
    slope: f64,
}

fn term(offset: C64, slope: f64) -> GammaTerm {
    GammaTerm { offset, slope }
}

/// `ln` of `prod Gamma(num) / prod Gamma(den)` as a function of `z`.
///
/// When arguments sit on gamma poles, the ratio is the limit along `z`:
/// a surplus of numerator poles is an error, a surplus of denominator poles
/// gives an exact zero (`None`), and balanced poles contribute the ratio of
/// their residues.
fn log_gamma_ratio(
    z: C64,
    num: &[GammaTerm],
    den: &[GammaTerm],
    label: &str,
    tol: f64,
) -> Result<Option<C64>> {
    let mut log = C64::new(0.0, 0.0);
    let mut balance = 0i32;
    let mut first_pole = None;
    for (terms, sign) in [(num, 1.0), (den, -1.0)] {
        for t in terms {
            let arg = t.offset + t.slope * z;
            if !(arg.re.is_finite() && arg.im.is_finite()) {
                return Err(Error::invalid("special", format!("non-finite argument in {label}")));
            }
            match nonpositive_integer(arg, tol) {
                Some(k) => {
                    // Gamma(-k + s*eps) ~ (-1)^k / (k! * s * eps)
                    let ln_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
                    let mut residue = C64::new(-ln_fact - t.slope.abs().ln(), 0.0);
                    if (k % 2 == 1) ^ (t.slope < 0.0) {
                        residue += C64::new(0.0, PI);
                    }
                    log += sign * residue;
                    balance += sign as i32;
                    first_pole.get_or_insert(arg);
                }
                None => log += sign * log_gamma_unchecked(arg),
            }
        }
    }
    match balance {
        0 => Ok(Some(log)),
        b if b > 0 => Err(Error::PoleOfGamma {
            factor: label.to_string(),
            arg: first_pole.unwrap_or(z),
        }),
        _ => Ok(None),
    }
}

/// The two one-variable c-factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CKind {
    V,
    W,
}

/// `ln c_kind(z)`, `None` for an exact zero.
pub fn log_c_factor(family: Family, kind: CKind, z: C64, g: &Couplings) -> Result<Option<C64>> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    match (kind, family) {
        (CKind::V, Family::Bc | Family::Cs) => {
            log_gamma_ratio(z, &[term(zero, 1.0)], &[term(g.gm, 1.0)], "c_v", 1e-9)
        }
        (CKind::V, Family::T) => log_gamma_ratio(z, &[term(zero, 1.0)], &[], "c_v", 1e-9),
        (CKind::W, Family::Bc | Family::T) => log_gamma_ratio(
            z,
            &[term(zero, 2.0), term(0.5 * g.gs, 1.0)],
            &[term(g.gs, 2.0), term(0.5 * g.gs + g.gl, 1.0)],
            "c_w",
            1e-9,
        ),
        (CKind::W, Family::Cs) => {
            log_gamma_ratio(z, &[term(zero, 2.0)], &[term(0.5 * one + g.gs, 1.0)], "c_w", 1e-9)
        }
    }
}

/// `c_v(z)` or `c_w(z)` for the given family.
pub fn c_factor(family: Family, kind: CKind, z: C64, g: &Couplings) -> Result<C64> {
    Ok(log_c_factor(family, kind, z, g)?.map_or(C64::new(0.0, 0.0), |l| l.exp()))
}

/// A c-function value kept as `value * exp(log_scale)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CFunctionValue {
    pub value: C64,
    pub log_scale: f64,
}

impl CFunctionValue {
    pub fn from_log(log: Option<C64>) -> Self {
        match log {
            Some(l) => CFunctionValue {
                value: C64::from_polar(1.0, l.im),
                log_scale: l.re,
            },
            None => CFunctionValue {
                value: C64::new(0.0, 0.0),
                log_scale: 0.0,
            },
        }
    }

    pub fn to_complex(&self) -> C64 {
        self.value * self.log_scale.exp()
    }

    /// Logarithm of the value, `None` for zero.
    pub fn ln(&self) -> Option<C64> {
        if self.value == C64::new(0.0, 0.0) {
            None
        } else {
            Some(self.value.ln() + self.log_scale)
        }
    }
}

/// `ln C^r(xi; g)`, `None` for an exact zero.
pub fn log_c_function(family: Family, xi: &[C64], g: &Couplings) -> Result<Option<C64>> {
    let n = xi.len();
    let mut total = C64::new(0.0, 0.0);
    let mut zero = false;
    let mut push = |l: Option<C64>| match l {
        Some(v) => total += v,
        None => zero = true,
    };
    for j in 0..n {
        push(log_c_factor(family, CKind::W, xi[j], g).map_err(|e| label_factor(e, &format!("c_w(xi_{})", j + 1)))?);
        for k in j + 1..n {
            push(
                log_c_factor(family, CKind::V, xi[j] + xi[k], g)
                    .map_err(|e| label_factor(e, &format!("c_v(xi_{} + xi_{})", j + 1, k + 1)))?,
            );
            push(
                log_c_factor(family, CKind::V, xi[j] - xi[k], g)
                    .map_err(|e| label_factor(e, &format!("c_v(xi_{} - xi_{})", j + 1, k + 1)))?,
            );
        }
    }
    Ok(if zero { None } else { Some(total) })
}

fn label_factor(e: Error, factor: &str) -> Error {
    match e {
        Error::PoleOfGamma { arg, .. } => Error::PoleOfGamma {
            factor: factor.to_string(),
            arg,
        },
        other => other,
    }
}

/// `C^r(xi; g)` accumulated in log scale.
pub fn c_function(family: Family, xi: &[C64], g: &Couplings) -> Result<CFunctionValue> {
    Ok(CFunctionValue::from_log(log_c_function(family, xi, g)?))
}

/// The two confluence directions: `M` (bc to Toda) and `L` (bc to Morse).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConfluenceKind {
    M,
    L,
}

impl ConfluenceKind {
    pub fn target(self) -> Family {
        match self {
            ConfluenceKind::M => Family::T,
            ConfluenceKind::L => Family::Cs,
        }
    }
}

/// `ln gamma_M(g) = n(n-1) ln Gamma(g_M)` or
/// `ln gamma_L(g) = n ln [Gamma(g_S) Gamma(g_S/2 + g_L) / (Gamma(g_S/2) Gamma(1/2 + g_S/2))]`.
pub fn log_confluence_prefactor(kind: ConfluenceKind, g: &Couplings, n: usize) -> Result<C64> {
    match kind {
        ConfluenceKind::M => {
            let l = log_gamma_ratio(g.gm, &[term(C64::new(0.0, 0.0), 1.0)], &[], "gamma_M", 1e-9)?
                .expect("numerator-only ratio is never zero");
            Ok(l * (n * n.saturating_sub(1)) as f64)
        }
        ConfluenceKind::L => {
            let zero = C64::new(0.0, 0.0);
            let l = log_gamma_ratio(
                g.gs,
                &[term(zero, 1.0), term(g.gl, 0.5)],
                &[term(zero, 0.5), term(C64::new(0.5, 0.0), 0.5)],
                "gamma_L",
                1e-9,
            )?;
            match l {
                Some(l) => Ok(l * n as f64),
                None => Ok(C64::new(f64::NEG_INFINITY, 0.0)),
            }
        }
    }
}

pub fn confluence_prefactor(kind: ConfluenceKind, g: &Couplings, n: usize) -> Result<C64> {
    Ok(log_confluence_prefactor(kind, g, n)?.exp())
}

/// The weight `delta(x; g)` and the vector `rho_g` linking the bc wave
/// function to the `BC_n` hypergeometric function.
pub fn weight_and_rho(x: &[f64], g: &Couplings) -> Result<(C64, Vec<C64>)> {
    let n = x.len();
    if !Family::Bc.contains(x) {
        return Err(Error::ChamberViolation {
            module: "special",
            family: "bc",
            x: x.to_vec(),
            reason: "delta(x; g) needs x_1 > ... > x_n > 0".into(),
        });
    }
    let two_sinh = |t: f64| 2.0 * t.sinh();
    let mut log = C64::new(0.0, 0.0);
    for j in 0..n {
        log += g.gs * two_sinh(0.5 * x[j]).ln() + g.gl * two_sinh(x[j]).ln();
        for k in j + 1..n {
            log += g.gm * (two_sinh(0.5 * (x[j] + x[k])).ln() + two_sinh(0.5 * (x[j] - x[k])).ln());
        }
    }
    let rho_g = (0..n)
        .map(|j| (n - 1 - j) as f64 * g.gm + 0.5 * g.gs + g.gl)
        .collect();
    Ok((log.exp(), rho_g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn log_gamma_classical_values() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-14);
        assert!(close(log_gamma(c(5.0, 0.0)).unwrap(), c(24f64.ln(), 0.0), 1e-14));
        assert!(close(log_gamma(c(0.5, 0.0)).unwrap(), c(0.5 * PI.ln(), 0.0), 1e-14));
        // Gamma(-1/2) = -2 sqrt(pi): principal branch takes the upper limit.
        let v = log_gamma(c(-0.5, 0.0)).unwrap();
        assert!(close(v.exp(), c(-2.0 * PI.sqrt(), 0.0), 1e-13));
    }

    #[test]
    fn log_gamma_poles() {
        for z in [0.0, -1.0, -7.0] {
            assert!(matches!(log_gamma(c(z, 0.0)), Err(Error::PoleOfGamma { .. })));
        }
    }

    #[test]
    fn principal_branch_is_continuous_across_half_line() {
        // Crossing Re z = 1/2 must not jump by 2 pi i.
        for im in [0.3, 2.0, 15.0, -4.0] {
            let a = log_gamma(c(0.5 - 1e-9, im)).unwrap();
            let b = log_gamma(c(0.5 + 1e-9, im)).unwrap();
            assert!((a - b).norm() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn c_factor_examples() {
        let g = Couplings::real(0.7, 1.3, 0.4, 2);
        let z = c(0.3, 0.8);
        let t_v = c_factor(Family::T, CKind::V, z, &g).unwrap();
        assert!(close(t_v, log_gamma(z).unwrap().exp(), 1e-14));

        let free_m = Couplings::real(0.7, 0.0, 0.4, 2);
        assert!(close(c_factor(Family::Bc, CKind::V, z, &free_m).unwrap(), c(1.0, 0.0), 1e-14));

        let g0 = Couplings::real(0.0, 1.0, 0.0, 1);
        let w = c_factor(Family::Cs, CKind::W, c(1.0, 0.0), &g0).unwrap();
        assert!(close(w, c(2.0 / PI.sqrt(), 0.0), 1e-14));
    }

    #[test]
    fn compensated_poles_take_the_limit() {
        // g_M = 0 cancels numerator and denominator poles exactly.
        let g = Couplings::real(0.7, 0.0, 0.4, 2);
        let v = c_factor(Family::Bc, CKind::V, c(-2.0, 0.0), &g).unwrap();
        assert!(close(v, c(1.0, 0.0), 1e-14));
        // Only the denominator is singular: exact zero.
        let g = Couplings::real(0.7, -1.5, 0.4, 2);
        let v = c_factor(Family::Bc, CKind::V, c(0.5, 0.0), &g).unwrap();
        assert_eq!(v, c(0.0, 0.0));
        // Only the numerator is singular: error.
        assert!(matches!(
            c_factor(Family::T, CKind::V, c(-3.0, 0.0), &g),
            Err(Error::PoleOfGamma { .. })
        ));
    }

    #[test]
    fn c_function_examples() {
        let g = Couplings::real(0.7, 1.3, 0.4, 1);
        let xi = [c(0.3, 0.4)];
        let full = c_function(Family::Bc, &xi, &g).unwrap().to_complex();
        let w = c_factor(Family::Bc, CKind::W, xi[0], &g).unwrap();
        assert!(close(full, w, 1e-14));

        let free = Couplings::real(0.0, 0.0, 0.0, 3);
        let xi = [c(0.3, 0.4), c(-0.7, 0.1), c(1.1, -0.2)];
        let v = c_function(Family::Bc, &xi, &free).unwrap().to_complex();
        assert!(close(v, c(1.0, 0.0), 1e-13));
    }

    #[test]
    fn c_function_pole_names_factor() {
        let g = Couplings::real(0.7, 1.3, 0.4, 2);
        let xi = [c(0.3, 0.0), c(1.3, 0.0)];
        match c_function(Family::T, &xi, &g) {
            Err(Error::PoleOfGamma { factor, .. }) => assert_eq!(factor, "c_v(xi_1 - xi_2)"),
            other => panic!("expected pole, got {other:?}"),
        }
    }

    #[test]
    fn prefactor_examples() {
        let g = Couplings::real(0.4, 1.0, 0.3, 3);
        assert!(close(confluence_prefactor(ConfluenceKind::M, &g, 3).unwrap(), c(1.0, 0.0), 1e-14));
        let g = Couplings::real(0.4, 3.0, 0.3, 2);
        assert!(close(confluence_prefactor(ConfluenceKind::M, &g, 2).unwrap(), c(4.0, 0.0), 1e-13));
        let g = Couplings::real(1.0, 0.3, 0.0, 1);
        assert!(close(confluence_prefactor(ConfluenceKind::L, &g, 1).unwrap(), c(1.0, 0.0), 1e-14));
        // g_S -> 0: Gamma(g_S)/Gamma(g_S/2) -> 1/2.
        let g = Couplings::real(0.0, 0.3, 0.8, 1);
        let expected = (log_gamma(c(0.8, 0.0)).unwrap() - log_gamma(c(0.5, 0.0)).unwrap()).exp() * 0.5;
        assert!(close(confluence_prefactor(ConfluenceKind::L, &g, 1).unwrap(), expected, 1e-13));
    }

    #[test]
    fn weight_examples() {
        let (delta, _) = weight_and_rho(&[3.0, 1.0], &Couplings::real(0.0, 0.0, 0.0, 2)).unwrap();
        assert!(close(delta, c(1.0, 0.0), 1e-15));
        let (_, rho_g) = weight_and_rho(&[3.0, 1.0], &Couplings::real(1.0, 1.0, 1.0, 2)).unwrap();
        assert!(close(rho_g[0], c(2.5, 0.0), 1e-15) && close(rho_g[1], c(1.5, 0.0), 1e-15));
        let (delta, _) = weight_and_rho(&[2.0], &Couplings::real(2.0, 0.0, 0.0, 1)).unwrap();
        let e = 1f64.exp();
        assert!(close(delta, c((e - 1.0 / e).powi(2), 0.0), 1e-14));
        assert!(weight_and_rho(&[1.0, 2.0], &Couplings::real(1.0, 1.0, 1.0, 2)).is_err());
    }
}
