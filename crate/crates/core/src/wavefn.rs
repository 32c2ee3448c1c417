//! The hyperoctahedral wave function
//!
//! ```text
//! Phi_xi(x; g) = sum_{w in W} C(w xi; g) phi_{w xi}(x; g)
//! ```
//!
//! and its evaluation at spectral points close to the hyperplanes where the
//! individual orbit terms have poles but the sum stays analytic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{Couplings, Family, SignedPermutation, SpectralPoint, C64};
use crate::error::{Error, Result};
use crate::hcseries::{build_table, CoeffTable};
use crate::operators::potential;
use crate::special::log_c_function;
use crate::sum::ComplexSum;
use crate::Settings;

pub const DEFAULT_OFFSETS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// One orbit element with its shifted spectral point, `ln C(w xi)` and
/// coefficient table.
#[derive(Clone, Debug)]
pub struct OrbitTerm {
    pub element: SignedPermutation,
    pub point: SpectralPoint,
    pub log_c: Option<C64>,
    pub table: CoeffTable,
}

/// All `2^n n!` terms of the wave function at one spectral point.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub family: Family,
    pub terms: Vec<OrbitTerm>,
}

/// `value * e^{scale}` together with the operator image and the tail, all
/// in the same scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledValue {
    pub value: C64,
    pub applied: C64,
    pub tail: f64,
    pub scale: f64,
}

impl ScaledValue {
    pub fn to_complex(&self) -> C64 {
        self.value * self.scale.exp()
    }

    /// `ln |value|`, `-inf` for zero.
    pub fn log_abs(&self) -> f64 {
        self.value.norm().ln() + self.scale
    }
}

impl Orbit {
    /// Builds the orbit tables in parallel; terms keep the fixed group order.
    pub fn build(family: Family, xi: &SpectralPoint, g: &Couplings, settings: &Settings) -> Result<Orbit> {
        xi.check_dim(g.n())?;
        let elements = SignedPermutation::all(xi.dim());
        let terms = settings.exec.try_map(&elements, |w| {
            let point = w.act(xi)?;
            let log_c = log_c_function(family, &point, g)?;
            let table = build_table(family, &point, g, settings, false)?;
            Ok(OrbitTerm {
                element: w.clone(),
                point,
                log_c,
                table,
            })
        })?;
        Ok(Orbit { family, terms })
    }

    /// Evaluates the orbit sum and `L Phi` at `x` after factoring out the
    /// largest exponent `max_w Re(ln C(w xi) + <w xi, x>)`.
    pub fn evaluate_scaled(&self, x: &[f64], settings: &Settings) -> Result<ScaledValue> {
        let first = self.terms.first().ok_or_else(|| Error::invalid("wavefn", "empty orbit"))?;
        first.table.check_chamber(x, "wavefn")?;
        let v = potential(self.family, x, first.table.couplings(), &settings.tol)?;
        let parts: Vec<_> = self
            .terms
            .iter()
            .filter_map(|t| t.log_c.map(|lc| (lc, t.table.scaled(x))))
            .map(|(lc, s)| (lc + s.exponent, s))
            .collect();
        let scale = parts.iter().map(|(e, _)| e.re).fold(f64::NEG_INFINITY, f64::max);
        if !scale.is_finite() {
            return Ok(ScaledValue {
                value: C64::new(0.0, 0.0),
                applied: C64::new(0.0, 0.0),
                tail: 0.0,
                scale: 0.0,
            });
        }
        let mut value = ComplexSum::new();
        let mut applied = ComplexSum::new();
        let mut tail = 0.0;
        for (e, s) in &parts {
            let weight = (e - scale).exp();
            value.add(weight * s.sum);
            applied.add(weight * (s.laplacian + v * s.sum));
            tail += weight.norm() * s.tail;
        }
        Ok(ScaledValue {
            value: value.value(),
            applied: applied.value(),
            tail,
            scale,
        })
    }

    pub fn evaluate(&self, x: &[f64], settings: &Settings) -> Result<C64> {
        Ok(self.evaluate_scaled(x, settings)?.to_complex())
    }

    /// The individual terms `C(w xi) phi_{w xi}(x)`.
    pub fn term_values(&self, x: &[f64]) -> Result<Vec<C64>> {
        let mut out = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            t.table.check_chamber(x, "wavefn")?;
            out.push(match t.log_c {
                Some(lc) => {
                    let s = t.table.scaled(x);
                    (lc + s.exponent).exp() * s.sum
                }
                None => C64::new(0.0, 0.0),
            });
        }
        Ok(out)
    }
}

fn guard(xi: &SpectralPoint, pole_guard: f64) -> Result<()> {
    if let Some(hit) = xi.nearest_hyperplane(false) {
        if hit.distance < pole_guard {
            return Err(Error::NearSingularSpectral {
                hyperplane: hit.plane.to_string(),
                distance: hit.distance,
            });
        }
    }
    Ok(())
}

fn check_point(family: Family, xi: &SpectralPoint, x: &[f64], g: &Couplings) -> Result<()> {
    xi.check_dim(g.n())?;
    if x.len() != xi.dim() {
        return Err(Error::DimensionMismatch {
            expected: xi.dim(),
            found: x.len(),
        });
    }
    if !family.contains(x) {
        return Err(Error::ChamberViolation {
            module: "wavefn",
            family: family.as_str(),
            x: x.to_vec(),
            reason: format!("chamber margin {:.3e} is not positive", family.chamber_margin(x)),
        });
    }
    Ok(())
}

/// `Phi_xi(x; g)` in log-scaled form, for regular `xi`.
pub fn wavefunction_scaled(
    family: Family,
    xi: &SpectralPoint,
    x: &[f64],
    g: &Couplings,
    settings: &Settings,
) -> Result<ScaledValue> {
    check_point(family, xi, x, g)?;
    guard(xi, settings.tol.pole_guard)?;
    Orbit::build(family, xi, g, settings)?.evaluate_scaled(x, settings)
}

/// `Phi_xi(x; g)` for regular `xi`.
pub fn wavefunction(
    family: Family,
    xi: &SpectralPoint,
    x: &[f64],
    g: &Couplings,
    settings: &Settings,
) -> Result<C64> {
    Ok(wavefunction_scaled(family, xi, x, g, settings)?.to_complex())
}

/// Extrapolated value of `Phi` at a spectral point on or near a singular
/// hyperplane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularValue {
    pub value: C64,
    pub error_estimate: f64,
    pub samples: Vec<C64>,
    pub offsets: Vec<f64>,
    pub direction: Vec<f64>,
}

/// Unit direction drawn from the seeded generator.
pub fn random_direction(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 0.25 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

/// Neville interpolation of `(t_i, y_i)` evaluated at `t = 0`.
fn neville_at_zero(t: &[f64], y: &[C64]) -> C64 {
    let mut p = y.to_vec();
    let k = t.len();
    for level in 1..k {
        for i in 0..k - level {
            let (ti, tj) = (t[i], t[i + level]);
            p[i] = (tj * p[i] - ti * p[i + 1]) / (tj - ti);
        }
    }
    p[0]
}

/// `Phi` at `xi0` obtained by sampling `xi0 + delta u` for each offset and
/// extrapolating to `delta = 0` with a polynomial through the last three
/// samples.
pub fn wavefunction_regular(
    family: Family,
    xi0: &SpectralPoint,
    x: &[f64],
    g: &Couplings,
    settings: &Settings,
    offsets: &[f64],
) -> Result<RegularValue> {
    check_point(family, xi0, x, g)?;
    if offsets.len() < 2
        || offsets.iter().any(|d| !(*d > 0.0 && d.is_finite()))
        || offsets.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::invalid(
            "wavefn",
            format!("offsets must be at least two positive, strictly decreasing values: {offsets:?}"),
        ));
    }
    let u = random_direction(xi0.dim(), settings.seed);
    let samples = offsets
        .iter()
        .map(|&d| {
            let point = SpectralPoint(xi0.iter().zip(&u).map(|(z, ui)| z + d * ui).collect());
            Orbit::build(family, &point, g, settings)?.evaluate(x, settings)
        })
        .collect::<Result<Vec<_>>>()?;

    let first = samples[0].norm();
    let last = samples[samples.len() - 1].norm();
    let pole_growth = offsets[0] / offsets[offsets.len() - 1];
    if last > 10.0 * first && last >= pole_growth.sqrt() * first {
        let hit = xi0.nearest_hyperplane(false).map(|h| h.plane.to_string()).unwrap_or_default();
        return Err(Error::ExtrapolationDivergence {
            hyperplane: hit,
            samples: samples.iter().map(|s| s.norm()).collect(),
        });
    }

    let k = samples.len().min(3);
    let tail_t = &offsets[offsets.len() - k..];
    let tail_y = &samples[samples.len() - k..];
    let value = neville_at_zero(tail_t, tail_y);
    let lower = neville_at_zero(&tail_t[1..], &tail_y[1..]);
    Ok(RegularValue {
        value,
        error_estimate: (value - lower).norm(),
        samples,
        offsets: offsets.to_vec(),
        direction: u,
    })
}
