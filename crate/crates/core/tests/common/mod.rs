//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library except to fetch the values being checked.

#![allow(dead_code, clippy::too_many_arguments)]

use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};

use hyperwave::{Couplings, Family, SpectralPoint, C64};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn generic_couplings(n: usize) -> Couplings {
    Couplings::new(c(0.35, 0.05), c(0.6, -0.04), c(0.25, 0.03), n)
}

pub fn generic_xi(n: usize) -> SpectralPoint {
    SpectralPoint([c(0.13, 1.37), c(-0.11, 0.71), c(0.07, 0.29)][..n].to_vec())
}

/// `x_n = 2.5`, consecutive gaps 2.
pub fn gapped_x(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.5 + 2.0 * (n - 1 - j) as f64).collect()
}

// ---------------------------------------------------------------------------
// Roots and recurrence coefficients, written out from the operator data.

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RootKind {
    Short,
    Plus,
    Minus,
    Long,
}

#[derive(Clone, Debug)]
pub struct OracleRoot {
    pub kind: RootKind,
    pub j: usize,
    pub k: usize,
    pub v: Vec<i32>,
}

pub fn oracle_roots(n: usize) -> Vec<OracleRoot> {
    let unit = |j: usize| {
        let mut v = vec![0; n];
        v[j] = 1;
        v
    };
    let mut out = Vec::new();
    for j in 0..n {
        out.push(OracleRoot { kind: RootKind::Short, j, k: j, v: unit(j) });
        out.push(OracleRoot { kind: RootKind::Long, j, k: j, v: unit(j).iter().map(|a| 2 * a).collect() });
        for k in j + 1..n {
            let (a, b) = (unit(j), unit(k));
            out.push(OracleRoot { kind: RootKind::Plus, j, k, v: a.iter().zip(&b).map(|(x, y)| x + y).collect() });
            out.push(OracleRoot { kind: RootKind::Minus, j, k, v: a.iter().zip(&b).map(|(x, y)| x - y).collect() });
        }
    }
    out
}

/// Generic in the scalar type so the same table feeds the float and the exact oracle.
pub fn oracle_coeff<T>(family: Family, r: &OracleRoot, l: usize, gs: &T, gm: &T, gl: &T, a: &[T], int: impl Fn(i64) -> T) -> T
where
    T: Clone + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    let n = a.len();
    let lt = int(l as i64);
    let one = int(1);
    let short = gs.clone() * (gs.clone() + int(2) * gl.clone() - one.clone()) * lt.clone();
    let middle = int(2) * gm.clone() * (gm.clone() - one.clone()) * lt.clone();
    let long = int(4) * gl.clone() * (gl.clone() - one) * lt;
    let first = l == 1;
    match (family, r.kind) {
        (Family::Bc, RootKind::Short) => short,
        (Family::Bc, RootKind::Plus | RootKind::Minus) => middle,
        (Family::Bc, RootKind::Long) => long,
        (Family::T, RootKind::Short) if r.j == n - 1 => short,
        (Family::T, RootKind::Minus) if r.k == r.j + 1 && first => a[r.j].clone(),
        (Family::T, RootKind::Plus) if n >= 2 && r.j == n - 2 && r.k == n - 1 && first => a[n - 2].clone(),
        (Family::T, RootKind::Long) if r.j == n - 1 => long,
        (Family::Cs, RootKind::Short) if first => gs.clone(),
        (Family::Cs, RootKind::Minus) => middle,
        (Family::Cs, RootKind::Long) if first => a[n - 1].clone(),
        _ => int(0),
    }
}

pub fn dominant(v: &[i32]) -> bool {
    let mut s = 0;
    v.iter().all(|&a| {
        s += a;
        s >= 0
    })
}

pub fn level(v: &[i32]) -> i64 {
    let n = v.len();
    v.iter().enumerate().map(|(j, &a)| (n - j) as i64 * a as i64).sum()
}

/// Every `nu >= 0` of level at most `max`, found by scanning a box.
pub fn brute_force_lattice(n: usize, max: i64) -> Vec<Vec<i32>> {
    let b = max as i32;
    let mut out = Vec::new();
    let mut v = vec![-b; n];
    loop {
        if dominant(&v) && level(&v) <= max {
            out.push(v.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                out.sort_by_key(|v| (level(v), v.clone()));
                return out;
            }
            v[i] += 1;
            if v[i] <= b {
                break;
            }
            v[i] = -b;
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Exact Gaussian rationals.

#[derive(Clone, Debug, PartialEq)]
pub struct Q {
    pub re: BigRational,
    pub im: BigRational,
}

impl Q {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Q { re, im }
    }

    pub fn ratio(pr: i64, qr: i64, pi: i64, qi: i64) -> Self {
        Q::new(
            BigRational::new(BigInt::from(pr), BigInt::from(qr)),
            BigRational::new(BigInt::from(pi), BigInt::from(qi)),
        )
    }

    pub fn int(v: i64) -> Self {
        Q::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn div(&self, d: &Q) -> Q {
        let den = d.re.clone() * d.re.clone() + d.im.clone() * d.im.clone();
        let re = (self.re.clone() * d.re.clone() + self.im.clone() * d.im.clone()) / den.clone();
        let im = (self.im.clone() * d.re.clone() - self.re.clone() * d.im.clone()) / den;
        Q::new(re, im)
    }

    pub fn to_c64(&self) -> C64 {
        C64::new(self.re.to_f64().unwrap(), self.im.to_f64().unwrap())
    }

    pub fn abs_bound(&self) -> f64 {
        self.re.abs().to_f64().unwrap() + self.im.abs().to_f64().unwrap()
    }
}

impl Add for Q {
    type Output = Q;
    fn add(self, o: Q) -> Q {
        Q::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Q {
    type Output = Q;
    fn sub(self, o: Q) -> Q {
        Q::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Q {
    type Output = Q;
    fn mul(self, o: Q) -> Q {
        Q::new(
            self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone(),
            self.re * o.im + self.im * o.re,
        )
    }
}

/// Exact coefficients by solving the triangular recurrence level by level.
pub fn exact_table(family: Family, xi: &[Q], g: [&Q; 3], a: &[Q], max: i64) -> HashMap<Vec<i32>, Q> {
    let n = xi.len();
    let roots = oracle_roots(n);
    let mut table: HashMap<Vec<i32>, Q> = HashMap::new();
    for nu in brute_force_lattice(n, max) {
        if nu.iter().all(|&v| v == 0) {
            table.insert(nu, Q::new(BigRational::one(), BigRational::zero()));
            continue;
        }
        let mut rhs = Q::int(0);
        for r in &roots {
            for l in 1.. {
                let prev: Vec<i32> = nu.iter().zip(&r.v).map(|(a, b)| a - l * b).collect();
                if !dominant(&prev) {
                    break;
                }
                let coeff = oracle_coeff(family, r, l as usize, g[0], g[1], g[2], a, Q::int);
                if let Some(p) = table.get(&prev) {
                    rhs = rhs + coeff * p.clone();
                }
            }
        }
        // <nu - 2 xi, nu>
        let mut d = Q::int(0);
        for j in 0..n {
            let nj = Q::int(nu[j] as i64);
            d = d + (nj.clone() - Q::int(2) * xi[j].clone()) * nj;
        }
        assert!(!d.is_zero(), "exact oracle hit a hyperplane at {nu:?}");
        table.insert(nu, rhs.div(&d));
    }
    table
}

// ---------------------------------------------------------------------------
// Rank-one ODE oracle.

/// Rank-one potential of `L = d^2/dx^2 + V`, written from the operator data.
pub fn rank_one_potential(family: Family, x: f64, gs: C64, gl: C64, a1: C64) -> C64 {
    let csch2 = |t: f64| 1.0 / t.sinh().powi(2);
    match family {
        Family::Bc | Family::T => -(0.25 * gs * (gs + 2.0 * gl - 1.0) * csch2(0.5 * x) + gl * (gl - 1.0) * csch2(x)),
        Family::Cs => -(gs * (-x).exp() + a1 * (-2.0 * x).exp()),
    }
}

/// Integrates `u'' + 2 xi u' + V u = 0` (so that `e^{xi x} u` solves the
/// eigenvalue equation) with classical RK4 from `start` down to each of
/// `targets` (descending), starting from the plane wave `u = 1, u' = 0`.
pub fn rank_one_ode(family: Family, xi: C64, gs: C64, gl: C64, a1: C64, start: f64, targets: &[f64], h: f64) -> Vec<C64> {
    let f = |x: f64, u: C64, p: C64| -> (C64, C64) { (p, -2.0 * xi * p - rank_one_potential(family, x, gs, gl, a1) * u) };
    let mut x = start;
    let (mut u, mut p) = (c(1.0, 0.0), c(0.0, 0.0));
    let mut out = Vec::new();
    for &target in targets {
        let steps = ((x - target) / h).round() as usize;
        let step = -(x - target) / steps as f64;
        for _ in 0..steps {
            let (k1u, k1p) = f(x, u, p);
            let (k2u, k2p) = f(x + 0.5 * step, u + 0.5 * step * k1u, p + 0.5 * step * k1p);
            let (k3u, k3p) = f(x + 0.5 * step, u + 0.5 * step * k2u, p + 0.5 * step * k2p);
            let (k4u, k4p) = f(x + step, u + step * k3u, p + step * k3p);
            u += step / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            p += step / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            x += step;
        }
        x = target;
        out.push((xi * target).exp() * u);
    }
    out
}

// ---------------------------------------------------------------------------
// Log-gamma by upward recursion and the Stirling series.

pub fn stirling_log_gamma(z: C64) -> C64 {
    // Bernoulli numbers B_{2k} / (2k (2k-1)).
    const COEFFS: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    ];
    let mut shift = c(0.0, 0.0);
    let mut w = z;
    while w.norm() < 20.0 || w.re < 10.0 {
        shift += w.ln();
        w += 1.0;
    }
    let mut series = c(0.0, 0.0);
    let inv2 = 1.0 / (w * w);
    let mut pow = 1.0 / w;
    for k in COEFFS {
        series += k * pow;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

/// Distance of `a - b` to the lattice `2 pi i Z`.
pub fn mod_2pi_i(a: C64, b: C64) -> f64 {
    let d = a - b;
    let tau = 2.0 * std::f64::consts::PI;
    let im = d.im - tau * (d.im / tau).round();
    c(d.re, im).norm()
}

// ---------------------------------------------------------------------------
// Bookkeeping for the acceptance report.

pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Non-increasing once both neighbours sit at or below `floor`.
pub fn decreasing_to_floor(v: &[f64], floor: f64) -> bool {
    v.windows(2).all(|w| w[1] < w[0] || (w[0] <= floor && w[1] <= floor))
}
