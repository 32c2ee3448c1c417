//! Harish-Chandra coefficients `a_nu(xi; g)` from the graded recurrence
//!
//! ```text
//! <nu - 2 xi, nu> a_nu = sum_{alpha, l} a_{alpha,l}(g) a_{nu - l alpha},   a_0 = 1,
//! ```
//!
//! the local regularizer `Delta_U(xi)`, and the truncated series
//! `phi_xi(x) = sum_nu a_nu e^{<xi - nu, x>}` with an empirical tail estimate.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{rho, Composition, Couplings, Family, Root, SpectralPoint, C64};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lattice::Lattice;
use crate::sum::ComplexSum;
use crate::Settings;

/// Levels narrower than this are filled sequentially even in parallel mode.
const PARALLEL_LEVEL_WIDTH: usize = 256;
/// Shift of the bc chamber inside which the geometric tail is certified.
const CERTIFY_SHIFT: f64 = 0.1;
const MAX_TAIL_RATIO: f64 = 0.9;

/// `a_{alpha,l}(g)` for the given family; zero for pairs the family does not use.
pub fn recurrence_coeff(family: Family, alpha: Root, l: usize, g: &Couplings) -> C64 {
    let n = g.n();
    let lf = l as f64;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let first = l == 1;
    let short = g.gs * (g.gs + 2.0 * g.gl - one) * lf;
    let middle = 2.0 * g.gm * (g.gm - one) * lf;
    let long = 4.0 * g.gl * (g.gl - one) * lf;
    match family {
        Family::Bc => match alpha {
            Root::Short(_) => short,
            Root::Plus(..) | Root::Minus(..) => middle,
            Root::Long(_) => long,
        },
        Family::T => match alpha {
            Root::Short(j) if j + 1 == n => short,
            Root::Minus(j, k) if k == j + 1 && first => g.a[j],
            Root::Plus(j, k) if j + 2 == n && k + 1 == n && first => g.a[n - 2],
            Root::Long(j) if j + 1 == n => long,
            _ => zero,
        },
        Family::Cs => match alpha {
            Root::Short(_) if first => g.gs,
            Root::Minus(..) => middle,
            Root::Long(_) if first => g.a[n - 1],
            _ => zero,
        },
    }
}

/// The recurrence input `a_{alpha,l}` for every root (in [`Root::all`]
/// order) and every multiplicity that fits below the truncation level.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceInput {
    pub coeffs: Vec<Vec<C64>>,
}

impl RecurrenceInput {
    pub fn new(family: Family, g: &Couplings, max_level: usize) -> Self {
        let n = g.n();
        let coeffs = Root::all(n)
            .into_iter()
            .map(|root| {
                let lmax = max_level as i64 / root.height(n);
                (1..=lmax as usize)
                    .map(|l| recurrence_coeff(family, root, l, g))
                    .collect()
            })
            .collect();
        RecurrenceInput { coeffs }
    }

    /// Multiplies every coefficient by `f(root, l)`.
    pub fn scaled(mut self, n: usize, f: impl Fn(Root, usize) -> C64) -> Self {
        for (root, row) in Root::all(n).into_iter().zip(self.coeffs.iter_mut()) {
            for (i, v) in row.iter_mut().enumerate() {
                *v *= f(root, i + 1);
            }
        }
        self
    }
}

/// Memoized coefficients of one `(family, xi, g, N)`.
#[derive(Clone, Debug)]
pub struct CoeffTable {
    family: Family,
    xi: SpectralPoint,
    g: Couplings,
    lattice: Arc<Lattice>,
    values: Vec<C64>,
    regularizer: Option<C64>,
    flagged: Vec<Composition>,
}

/// A truncated series value with its tail estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: C64,
    pub tail_bound: f64,
    pub levels_used: usize,
    /// True when `x - 0.1 rho` lies in the bc chamber, where the geometric
    /// tail model rests on an exponential comparison series.
    pub certified: bool,
}

/// Series pieces with the plane wave `e^{<xi, x>}` factored out.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ScaledSeries {
    pub exponent: C64,
    /// `sum_nu a_nu e^{-<nu, x>}`.
    pub sum: C64,
    /// Same sum without the `nu = 0` term.
    pub higher: C64,
    /// `sum_nu a_nu e^{-<nu, x>} <xi - nu, xi - nu>`.
    pub laplacian: C64,
    pub tail: f64,
}

fn check_inputs(xi: &SpectralPoint, g: &Couplings) -> Result<()> {
    xi.check_dim(g.n())?;
    if xi.dim() == 0 {
        return Err(Error::invalid("hcseries", "dimension n must be at least 1"));
    }
    if xi.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::invalid("hcseries", "spectral point must be finite"));
    }
    Ok(())
}

/// Builds the table of `a_nu` (or `Delta_U a_nu` when `regularize` is set)
/// for every `nu >= 0` of level at most `settings.max_level`.
pub fn build_table(
    family: Family,
    xi: &SpectralPoint,
    g: &Couplings,
    settings: &Settings,
    regularize: bool,
) -> Result<CoeffTable> {
    check_inputs(xi, g)?;
    let input = RecurrenceInput::new(family, g, settings.max_level);
    build_table_with_input(family, xi, g, &input, settings, regularize)
}

/// Same as [`build_table`] with an explicit recurrence input.
pub fn build_table_with_input(
    family: Family,
    xi: &SpectralPoint,
    g: &Couplings,
    input: &RecurrenceInput,
    settings: &Settings,
    regularize: bool,
) -> Result<CoeffTable> {
    check_inputs(xi, g)?;
    settings.tol.validate()?;
    let n = xi.dim();
    let big_n = settings.max_level;
    let lat = Lattice::shared(n, big_n);
    if input.coeffs.len() != lat.roots.len()
        || input
            .coeffs
            .iter()
            .enumerate()
            .any(|(r, row)| row.len() < lat.max_multiplicity(r))
    {
        return Err(Error::invalid("hcseries", "recurrence input does not cover the lattice"));
    }

    let den: Vec<C64> = lat
        .nodes
        .iter()
        .map(|nu| C64::new(nu.norm_sq() as f64, 0.0) - 2.0 * xi.pair_int(nu))
        .collect();
    let scale = |i: usize| 1.0 + lat.nodes[i].norm_sq() as f64;
    let flagged: Vec<bool> = (0..lat.nodes.len())
        .map(|i| regularize && i > 0 && den[i].norm() < settings.tol.pole_radius * scale(i))
        .collect();
    if !regularize {
        if let Some(i) = (1..lat.nodes.len()).find(|&i| den[i].norm() < settings.tol.den * scale(i)) {
            return Err(Error::SpectralPlaneSingularity {
                nu: lat.nodes[i].0.clone(),
                magnitude: den[i].norm(),
            });
        }
    }

    // Per-level product of flagged denominators and the window products
    // span[a][b] = prod_{a < k <= b} level_product[k].
    let mut level_product = vec![C64::new(1.0, 0.0); big_n + 1];
    for (m, p) in level_product.iter_mut().enumerate().skip(1) {
        for i in lat.level_range(m).filter(|&i| flagged[i]) {
            *p *= den[i];
        }
    }
    let mut span = vec![vec![C64::new(1.0, 0.0); big_n + 1]; big_n + 1];
    for (a, row) in span.iter_mut().enumerate() {
        for b in a + 1..=big_n {
            row[b] = row[b - 1] * level_product[b];
        }
    }
    let level_of: Vec<usize> = lat.nodes.iter().map(|nu| nu.level() as usize).collect();

    // c_nu = P_{level(nu)} a_nu with P_m the product of flagged denominators
    // up to level m; flagged nodes never divide by their own denominator.
    let mut values = vec![C64::new(0.0, 0.0); lat.nodes.len()];
    values[0] = C64::new(1.0, 0.0);
    for m in 1..=big_n {
        let range = lat.level_range(m);
        let exec = if range.len() >= PARALLEL_LEVEL_WIDTH {
            settings.exec
        } else {
            Execution::Sequential
        };
        let done = &values;
        let level = exec.map_range(range.clone(), |i| {
            let mut acc = ComplexSum::new();
            for s in &lat.steps[i] {
                let coef = input.coeffs[s.root][s.l - 1];
                if coef == C64::new(0.0, 0.0) {
                    continue;
                }
                let lp = level_of[s.pred];
                let window = if flagged[i] { span[lp][m - 1] } else { span[lp][m] };
                acc.add(coef * done[s.pred] * window);
            }
            if flagged[i] {
                let others: C64 = lat
                    .level_range(m)
                    .filter(|&k| k != i && flagged[k])
                    .map(|k| den[k])
                    .product();
                acc.value() * others
            } else {
                acc.value() / den[i]
            }
        });
        values[range].copy_from_slice(&level);
    }

    let regularizer = if regularize {
        for (i, v) in values.iter_mut().enumerate() {
            *v *= span[level_of[i]][big_n];
        }
        Some(span[0][big_n])
    } else {
        None
    };
    let flagged = (0..lat.nodes.len())
        .filter(|&i| flagged[i])
        .map(|i| lat.nodes[i].clone())
        .collect();
    Ok(CoeffTable {
        family,
        xi: xi.clone(),
        g: g.clone(),
        lattice: lat,
        values,
        regularizer,
        flagged,
    })
}

impl CoeffTable {
    /// Rebuilds a table from stored entries (used by the import path).
    pub fn from_entries(
        family: Family,
        xi: SpectralPoint,
        g: Couplings,
        max_level: usize,
        regularizer: Option<C64>,
        entries: impl IntoIterator<Item = (Composition, C64)>,
    ) -> Result<CoeffTable> {
        check_inputs(&xi, &g)?;
        let lat = Lattice::shared(xi.dim(), max_level);
        let mut values = vec![None; lat.nodes.len()];
        for (nu, v) in entries {
            let i = *lat.index.get(&nu).ok_or_else(|| {
                Error::Format(format!("entry {:?} is not a dominant composition of level <= {max_level}", nu.0))
            })?;
            values[i] = Some(v);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::Format(format!("missing entry {:?}", lat.nodes[i].0))))
            .collect::<Result<Vec<_>>>()?;
        Ok(CoeffTable {
            family,
            xi,
            g,
            lattice: lat,
            values,
            regularizer,
            flagged: Vec::new(),
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn xi(&self) -> &SpectralPoint {
        &self.xi
    }

    pub fn couplings(&self) -> &Couplings {
        &self.g
    }

    pub fn n(&self) -> usize {
        self.xi.dim()
    }

    pub fn max_level(&self) -> usize {
        self.lattice.max_level
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `Delta_U(xi)` when the table is regularized.
    pub fn regularizer(&self) -> Option<C64> {
        self.regularizer
    }

    /// The compositions whose denominators were absorbed into `Delta_U`.
    pub fn flagged(&self) -> &[Composition] {
        &self.flagged
    }

    pub fn get(&self, nu: &[i32]) -> Option<C64> {
        self.lattice
            .index
            .get(&Composition(nu.to_vec()))
            .map(|&i| self.values[i])
    }

    /// Entries in ascending level order.
    pub fn iter(&self) -> impl Iterator<Item = (&Composition, C64)> + '_ {
        self.lattice.nodes.iter().zip(self.values.iter().copied())
    }

    /// `sup_{level(nu) = m} |entry|` for `m = 0..=N`.
    pub fn level_sup(&self) -> Vec<f64> {
        (0..=self.max_level())
            .map(|m| {
                self.lattice
                    .level_range(m)
                    .map(|i| self.values[i].norm())
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    pub(crate) fn check_chamber(&self, x: &[f64], module: &'static str) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: x.len(),
            });
        }
        if !self.family.contains(x) {
            return Err(Error::ChamberViolation {
                module,
                family: self.family.as_str(),
                x: x.to_vec(),
                reason: format!("chamber margin {:.3e} is not positive", self.family.chamber_margin(x)),
            });
        }
        Ok(())
    }

    /// One pass over the table at `x`, level by level with compensated sums.
    pub(crate) fn scaled(&self, x: &[f64]) -> ScaledSeries {
        let lat = &self.lattice;
        let big_n = lat.max_level;
        let mut total = ComplexSum::new();
        let mut higher = ComplexSum::new();
        let mut lap = ComplexSum::new();
        let mut level_abs = Vec::with_capacity(big_n + 1);
        for m in 0..=big_n {
            let mut s = ComplexSum::new();
            let mut q = ComplexSum::new();
            let mut abs = 0.0;
            for i in lat.level_range(m) {
                let nu = &lat.nodes[i];
                let decay = (-nu.iter().zip(x).map(|(&v, &xj)| v as f64 * xj).sum::<f64>()).exp();
                let t = self.values[i] * decay;
                let shifted: C64 = self.xi.iter().zip(nu.iter()).map(|(z, &v)| (z - v as f64).powi(2)).sum();
                s.add(t);
                q.add(t * shifted);
                abs += t.norm();
            }
            total.add(s.value());
            if m > 0 {
                higher.add(s.value());
            }
            lap.add(q.value());
            level_abs.push(abs);
        }
        ScaledSeries {
            exponent: self.xi.pair(x),
            sum: total.value(),
            higher: higher.value(),
            laplacian: lap.value(),
            tail: tail_estimate(&level_abs),
        }
    }
}

/// Geometric tail model `(T_{N-1} + T_N) / (1 - q)` with `q = T_N / T_{N-1}`
/// clamped to 0.9; a single level uses `q = 0.9`.
fn tail_estimate(level_abs: &[f64]) -> f64 {
    let last = *level_abs.last().unwrap_or(&0.0);
    let prev = if level_abs.len() >= 2 {
        level_abs[level_abs.len() - 2]
    } else {
        0.0
    };
    if last == 0.0 && prev == 0.0 {
        return 0.0;
    }
    let q = if level_abs.len() < 2 || prev == 0.0 {
        MAX_TAIL_RATIO
    } else {
        (last / prev).min(MAX_TAIL_RATIO)
    };
    (prev + last) / (1.0 - q)
}

/// Whether `x - 0.1 rho` lies in the bc chamber.
pub fn tail_certified(x: &[f64]) -> bool {
    let r = rho(x.len());
    let shifted: Vec<f64> = x.iter().zip(&r).map(|(a, &b)| a - CERTIFY_SHIFT * b as f64).collect();
    Family::Bc.contains(&shifted)
}

/// The truncated series `sum_{level(nu) <= N} a_nu e^{<xi - nu, x>}`.
pub fn series_eval(table: &CoeffTable, x: &[f64]) -> Result<SeriesValue> {
    table.check_chamber(x, "hcseries")?;
    let s = table.scaled(x);
    let plane = s.exponent.exp();
    Ok(SeriesValue {
        value: plane * s.sum,
        tail_bound: plane.norm() * s.tail,
        levels_used: table.max_level(),
        certified: tail_certified(x),
    })
}

/// `|phi_xi(x) - e^{<xi, x>}|` for purely imaginary `xi`.
pub fn asymptotics_gap(table: &CoeffTable, x: &[f64], tol_int: f64) -> Result<f64> {
    if table.xi.iter().any(|z| z.re.abs() > tol_int) {
        return Err(Error::invalid(
            "hcseries",
            format!("plane-wave asymptotics needs Re xi = 0, got {:?}", table.xi.0),
        ));
    }
    table.check_chamber(x, "hcseries")?;
    let s = table.scaled(x);
    let lead = table.values[0] - 1.0;
    Ok(s.exponent.exp().norm() * (s.higher + lead).norm())
}
