//! Value types shared by every module: families, couplings, spectral and
//! position points, the dominance-ordered integer lattice, the root sets and
//! the hyperoctahedral group of signed permutations.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// The three Hamiltonians: hyperoctahedral Calogero-Sutherland (`bc`),
/// Toda with Pöschl-Teller boundary terms (`t`) and Calogero-Sutherland in a
/// Morse potential (`cs`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Bc,
    T,
    Cs,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Bc, Family::T, Family::Cs];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Bc => "bc",
            Family::T => "t",
            Family::Cs => "cs",
        }
    }

    /// Open chamber membership: bc needs `x_1 > ... > x_n > 0`, t only
    /// `x_n > 0`, cs only `x_1 > ... > x_n`.
    pub fn contains(self, x: &[f64]) -> bool {
        self.chamber_margin(x) > 0.0
    }

    /// Smallest of the gaps defining the chamber (negative when outside).
    pub fn chamber_margin(self, x: &[f64]) -> f64 {
        let n = x.len();
        if n == 0 {
            return f64::NEG_INFINITY;
        }
        let ordered = x.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
        match self {
            Family::Bc => ordered.min(x[n - 1]),
            Family::T => x[n - 1],
            Family::Cs => ordered,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bc" => Ok(Family::Bc),
            "t" => Ok(Family::T),
            "cs" => Ok(Family::Cs),
            other => Err(Error::invalid("domain", format!("unknown family '{other}'"))),
        }
    }
}

/// Numerical thresholds used across the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Integer-proximity tolerance for hyperplane classification.
    pub int: f64,
    /// Relative threshold below which a recurrence denominator is singular.
    pub den: f64,
    /// Minimal distance of every sinh argument from zero.
    pub x: f64,
    /// Distance to a non-regular hyperplane that triggers extrapolation.
    pub pole_guard: f64,
    /// Radius that flags a hyperplane for the local regularizer.
    pub pole_radius: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            int: 1e-9,
            den: 1e-8,
            x: 1e-6,
            pole_guard: 1e-4,
            pole_radius: 0.5,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [self.int, self.den, self.x, self.pole_guard, self.pole_radius];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(Error::invalid("domain", format!("tolerances must be positive: {self:?}")))
        }
    }
}

/// Coupling constants `(g_S, g_M, g_L)` and the auxiliary vector `a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub gs: C64,
    pub gm: C64,
    pub gl: C64,
    pub a: Vec<C64>,
}

impl Couplings {
    /// Couplings with the normalized auxiliary constants `a_j = 2`, `a_n = 1/4`.
    pub fn new(gs: C64, gm: C64, gl: C64, n: usize) -> Self {
        Couplings {
            gs,
            gm,
            gl,
            a: Self::normalized_aux(n),
        }
    }

    pub fn real(gs: f64, gm: f64, gl: f64, n: usize) -> Self {
        Self::new(gs.into(), gm.into(), gl.into(), n)
    }

    /// Every coupling, auxiliary ones included, set to zero (free particles).
    pub fn zero(n: usize) -> Self {
        Couplings {
            gs: C64::new(0.0, 0.0),
            gm: C64::new(0.0, 0.0),
            gl: C64::new(0.0, 0.0),
            a: vec![C64::new(0.0, 0.0); n],
        }
    }

    pub fn normalized_aux(n: usize) -> Vec<C64> {
        (0..n)
            .map(|j| if j + 1 < n { C64::new(2.0, 0.0) } else { C64::new(0.25, 0.0) })
            .collect()
    }

    pub fn with_aux(mut self, a: Vec<C64>) -> Self {
        self.a = a;
        self
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }
}

/// A point `xi` of the spectral variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint(pub Vec<C64>);

/// A point `x` of the position variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositionPoint(pub Vec<f64>);

impl Deref for SpectralPoint {
    type Target = [C64];
    fn deref(&self) -> &[C64] {
        &self.0
    }
}

impl Deref for PositionPoint {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<C64>> for SpectralPoint {
    fn from(v: Vec<C64>) -> Self {
        SpectralPoint(v)
    }
}

impl From<Vec<f64>> for PositionPoint {
    fn from(v: Vec<f64>) -> Self {
        PositionPoint(v)
    }
}

/// One of the hyperplanes `2 xi_j = m`, `xi_j + xi_k = m`, `xi_j - xi_k = m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hyperplane {
    Short { j: usize, m: i64 },
    Sum { j: usize, k: usize, m: i64 },
    Diff { j: usize, k: usize, m: i64 },
}

impl Hyperplane {
    pub fn level(&self) -> i64 {
        match *self {
            Hyperplane::Short { m, .. } | Hyperplane::Sum { m, .. } | Hyperplane::Diff { m, .. } => m,
        }
    }

    /// Value of the linear form at `xi`.
    pub fn form(&self, xi: &[C64]) -> C64 {
        match *self {
            Hyperplane::Short { j, .. } => 2.0 * xi[j],
            Hyperplane::Sum { j, k, .. } => xi[j] + xi[k],
            Hyperplane::Diff { j, k, .. } => xi[j] - xi[k],
        }
    }

    /// Gradient of the linear form.
    pub fn normal(&self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        match *self {
            Hyperplane::Short { j, .. } => v[j] = 2.0,
            Hyperplane::Sum { j, k, .. } => {
                v[j] = 1.0;
                v[k] = 1.0;
            }
            Hyperplane::Diff { j, k, .. } => {
                v[j] = 1.0;
                v[k] = -1.0;
            }
        }
        v
    }
}

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Hyperplane::Short { j, m } => write!(f, "2*xi_{} = {m}", j + 1),
            Hyperplane::Sum { j, k, m } => write!(f, "xi_{} + xi_{} = {m}", j + 1, k + 1),
            Hyperplane::Diff { j, k, m } => write!(f, "xi_{} - xi_{} = {m}", j + 1, k + 1),
        }
    }
}

/// Nearest integer hyperplane and the distance of the linear form to it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperplaneHit {
    pub plane: Hyperplane,
    pub distance: f64,
}

impl SpectralPoint {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `<xi, x>`.
    pub fn pair(&self, x: &[f64]) -> C64 {
        self.0.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `<xi, v>` for an integer vector.
    pub fn pair_int(&self, v: &[i32]) -> C64 {
        self.0.iter().zip(v).map(|(a, &b)| a * b as f64).sum()
    }

    /// Bilinear square `<xi, xi>` (no complex conjugation).
    pub fn square(&self) -> C64 {
        self.0.iter().map(|a| a * a).sum()
    }

    pub fn shifted(&self, e: &[i32]) -> SpectralPoint {
        SpectralPoint(self.0.iter().zip(e).map(|(a, &b)| a + b as f64).collect())
    }

    /// Nearest hyperplane among all forms, restricted to positive integers
    /// when `positive_only` is set.
    pub fn nearest_hyperplane(&self, positive_only: bool) -> Option<HyperplaneHit> {
        let n = self.dim();
        let mut best: Option<HyperplaneHit> = None;
        let mut consider = |plane_of: &dyn Fn(i64) -> Hyperplane, value: C64| {
            let mut m = value.re.round();
            if positive_only && m < 1.0 {
                m = 1.0;
            }
            let distance = (value - C64::new(m, 0.0)).norm();
            if best.is_none_or(|b| distance < b.distance) {
                best = Some(HyperplaneHit {
                    plane: plane_of(m as i64),
                    distance,
                });
            }
        };
        for j in 0..n {
            consider(&|m| Hyperplane::Short { j, m }, 2.0 * self.0[j]);
            for k in j + 1..n {
                consider(&|m| Hyperplane::Sum { j, k, m }, self.0[j] + self.0[k]);
                consider(&|m| Hyperplane::Diff { j, k, m }, self.0[j] - self.0[k]);
            }
        }
        best
    }

    /// Membership of `C^n_reg`: no `2 xi_j` and no `xi_j +- xi_k` within
    /// `tol` of an integer.
    pub fn is_regular(&self, tol: f64) -> bool {
        self.nearest_hyperplane(false).is_none_or(|h| h.distance >= tol)
    }

    /// Membership of `C^n_{reg,+}`: only positive integers are excluded.
    pub fn is_regular_plus(&self, tol: f64) -> bool {
        self.nearest_hyperplane(true).is_none_or(|h| h.distance >= tol)
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: n,
                found: self.dim(),
            })
        }
    }
}

impl PositionPoint {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn translated(&self, direction: &[i32], c: f64) -> PositionPoint {
        PositionPoint(self.0.iter().zip(direction).map(|(x, &d)| x + c * d as f64).collect())
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: n,
                found: self.dim(),
            })
        }
    }
}

/// Integer vector of the lattice the Harish-Chandra series runs over.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Composition(pub Vec<i32>);

impl Composition {
    pub fn zero(n: usize) -> Self {
        Composition(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }

    /// Partial-sum dominance `nu >= 0`.
    pub fn dominates_zero(&self) -> bool {
        dominance_geq(&self.0)
    }

    /// `<nu, rho>` with `rho = sum_j (n + 1 - j) e_j`.
    pub fn level(&self) -> i64 {
        let n = self.dim();
        self.0
            .iter()
            .enumerate()
            .map(|(j, &v)| (n - j) as i64 * v as i64)
            .sum()
    }

    pub fn norm_sq(&self) -> i64 {
        self.0.iter().map(|&v| v as i64 * v as i64).sum()
    }

    pub fn minus(&self, other: &[i32], times: i32) -> Composition {
        Composition(self.0.iter().zip(other).map(|(a, b)| a - times * b).collect())
    }
}

impl Deref for Composition {
    type Target = [i32];
    fn deref(&self) -> &[i32] {
        &self.0
    }
}

/// True iff every prefix sum of `nu` is nonnegative.
pub fn dominance_geq(nu: &[i32]) -> bool {
    let mut acc = 0i64;
    nu.iter().all(|&v| {
        acc += v as i64;
        acc >= 0
    })
}

/// All `nu >= 0` with `<nu, rho> = m`, built coordinate by coordinate: the
/// partial sums `s_k` are nonnegative and add up to the level, so each step
/// only chooses a prefix sum below the remaining budget.
pub fn enumerate_level(n: usize, m: usize) -> Vec<Composition> {
    fn recurse(
        k: usize,
        n: usize,
        prev_sum: i64,
        remaining: i64,
        current: &mut Vec<i32>,
        out: &mut Vec<Composition>,
    ) {
        if k + 1 == n {
            current.push((remaining - prev_sum) as i32);
            out.push(Composition(current.clone()));
            current.pop();
            return;
        }
        for s in 0..=remaining {
            current.push((s - prev_sum) as i32);
            recurse(k + 1, n, s, remaining - s, current, out);
            current.pop();
        }
    }
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    recurse(0, n, 0, m as i64, &mut Vec::with_capacity(n), &mut out);
    out
}

/// `rho_M = sum (n - j) e_j`.
pub fn rho_m(n: usize) -> Vec<i32> {
    (1..=n).map(|j| (n - j) as i32).collect()
}

/// `rho_L = sum e_j`.
pub fn rho_l(n: usize) -> Vec<i32> {
    vec![1; n]
}

/// `rho = rho_M + rho_L = sum (n + 1 - j) e_j`.
pub fn rho(n: usize) -> Vec<i32> {
    rho_m(n).iter().zip(rho_l(n)).map(|(a, b)| a + b).collect()
}

/// Roots of the `BC_n`-adapted sets `R_S`, `R_M^+`, `R_M^-`, `R_L`
/// (zero-based indices, `j < k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Root {
    Short(usize),
    Plus(usize, usize),
    Minus(usize, usize),
    Long(usize),
}

impl Root {
    /// All roots in a fixed order: short, plus, minus, long.
    pub fn all(n: usize) -> Vec<Root> {
        let mut roots: Vec<Root> = (0..n).map(Root::Short).collect();
        for j in 0..n {
            for k in j + 1..n {
                roots.push(Root::Plus(j, k));
            }
        }
        for j in 0..n {
            for k in j + 1..n {
                roots.push(Root::Minus(j, k));
            }
        }
        roots.extend((0..n).map(Root::Long));
        roots
    }

    pub fn vector(&self, n: usize) -> Vec<i32> {
        let mut v = vec![0; n];
        match *self {
            Root::Short(j) => v[j] = 1,
            Root::Plus(j, k) => {
                v[j] = 1;
                v[k] = 1;
            }
            Root::Minus(j, k) => {
                v[j] = 1;
                v[k] = -1;
            }
            Root::Long(j) => v[j] = 2,
        }
        v
    }

    /// `<alpha, w>` for an integer vector `w`.
    pub fn pair(&self, w: &[i32]) -> i64 {
        match *self {
            Root::Short(j) => w[j] as i64,
            Root::Plus(j, k) => w[j] as i64 + w[k] as i64,
            Root::Minus(j, k) => w[j] as i64 - w[k] as i64,
            Root::Long(j) => 2 * w[j] as i64,
        }
    }

    /// `<alpha, rho>`, always positive.
    pub fn height(&self, n: usize) -> i64 {
        self.pair(&rho(n))
    }
}

/// Element `(eps, sigma)` of the hyperoctahedral group acting by
/// `(w xi)_j = eps_j xi_{sigma^{-1}(j)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    eps: Vec<i8>,
    /// `sigma[i]` is the zero-based image of `i`.
    sigma: Vec<usize>,
}

impl SignedPermutation {
    pub fn new(eps: Vec<i8>, sigma: Vec<usize>) -> Result<Self> {
        let n = eps.len();
        if sigma.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: sigma.len(),
            });
        }
        if eps.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::invalid("domain", format!("signs must be +-1: {eps:?}")));
        }
        let mut seen = vec![false; n];
        for &s in &sigma {
            if s >= n || std::mem::replace(&mut seen[s], true) {
                return Err(Error::invalid("domain", format!("not a permutation: {sigma:?}")));
            }
        }
        Ok(SignedPermutation { eps, sigma })
    }

    pub fn identity(n: usize) -> Self {
        SignedPermutation {
            eps: vec![1; n],
            sigma: (0..n).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.eps.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.eps
    }

    pub fn permutation(&self) -> &[usize] {
        &self.sigma
    }

    fn sigma_inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.sigma.len()];
        for (i, &s) in self.sigma.iter().enumerate() {
            inv[s] = i;
        }
        inv
    }

    pub fn act(&self, xi: &SpectralPoint) -> Result<SpectralPoint> {
        xi.check_dim(self.dim())?;
        Ok(SpectralPoint(self.act_slice(xi)))
    }

    pub(crate) fn act_slice<T>(&self, v: &[T]) -> Vec<T>
    where
        T: Copy + std::ops::Neg<Output = T>,
    {
        let inv = self.sigma_inverse();
        (0..self.dim())
            .map(|j| {
                let value = v[inv[j]];
                if self.eps[j] < 0 {
                    -value
                } else {
                    value
                }
            })
            .collect()
    }

    /// The product `self * other`, acting as `self(other(xi))`.
    pub fn compose(&self, other: &SignedPermutation) -> SignedPermutation {
        let inv_self = self.sigma_inverse();
        let n = self.dim();
        let sigma = (0..n).map(|i| self.sigma[other.sigma[i]]).collect();
        let eps = (0..n).map(|j| self.eps[j] * other.eps[inv_self[j]]).collect();
        SignedPermutation { eps, sigma }
    }

    pub fn inverse(&self) -> SignedPermutation {
        let inv = self.sigma_inverse();
        let n = self.dim();
        // (w^{-1} xi)_i = eps_{sigma(i)} xi_{sigma(i)}
        let eps = (0..n).map(|i| self.eps[self.sigma[i]]).collect();
        SignedPermutation { eps, sigma: inv }
    }

    /// `2^n n!`.
    pub fn group_order(n: usize) -> usize {
        (1..=n).product::<usize>() << n
    }

    /// Every group element in a fixed order (identity first): permutations
    /// in lexicographic order, each followed by its sign patterns.
    pub fn all(n: usize) -> Vec<SignedPermutation> {
        let mut perms = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            perms.push(current.clone());
            if !next_permutation(&mut current) {
                break;
            }
        }
        let mut out = Vec::with_capacity(Self::group_order(n));
        for sigma in perms {
            for mask in 0..(1u32 << n) {
                let eps = (0..n).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect();
                out.push(SignedPermutation {
                    eps,
                    sigma: sigma.clone(),
                });
            }
        }
        out
    }
}

/// Written as the signed source indices of `w xi`, e.g. `[-2,+1]` for
/// `w xi = (-xi_2, xi_1)`.
impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (j, &i) in self.sigma_inverse().iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            let sign = if self.eps[j] < 0 { '-' } else { '+' };
            write!(f, "{sign}{}", i + 1)?;
        }
        f.write_str("]")
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn dominance_examples() {
        assert!(dominance_geq(&[0, 0]));
        assert!(dominance_geq(&[1, -1]));
        assert!(!dominance_geq(&[-1, 2]));
    }

    #[test]
    fn level_enumeration_examples() {
        assert_eq!(enumerate_level(2, 0), vec![Composition(vec![0, 0])]);
        let mut lvl1 = enumerate_level(2, 1);
        lvl1.sort();
        assert_eq!(lvl1, vec![Composition(vec![0, 1]), Composition(vec![1, -1])]);
        assert_eq!(enumerate_level(1, 3), vec![Composition(vec![3])]);
    }

    #[test]
    fn levels_are_positive_off_zero() {
        for m in 0..6 {
            for nu in enumerate_level(3, m) {
                assert!(nu.dominates_zero());
                assert_eq!(nu.level(), m as i64);
                assert_eq!(nu.is_zero(), m == 0);
            }
        }
    }

    #[test]
    fn roots_have_positive_height() {
        for n in 1..5 {
            let roots = Root::all(n);
            assert_eq!(roots.len(), n * (n + 1));
            assert!(roots.iter().all(|r| r.height(n) > 0));
        }
    }

    #[test]
    fn special_vectors() {
        assert_eq!(rho(3), vec![3, 2, 1]);
        assert_eq!(rho_m(3), vec![2, 1, 0]);
        assert_eq!(rho_l(3), vec![1, 1, 1]);
    }

    #[test]
    fn action_examples() {
        let xi = SpectralPoint(vec![c(0.3, 1.0), c(-2.0, 0.0)]);
        assert_eq!(SignedPermutation::identity(2).act(&xi).unwrap(), xi);

        let (a, b) = (c(0.7, 0.2), c(-1.1, 0.5));
        let xi = SpectralPoint(vec![a, b]);
        let flip = SignedPermutation::new(vec![-1, 1], vec![0, 1]).unwrap();
        assert_eq!(flip.act(&xi).unwrap().0, vec![-a, b]);
        let swap = SignedPermutation::new(vec![1, -1], vec![1, 0]).unwrap();
        assert_eq!(swap.act(&xi).unwrap().0, vec![b, -a]);
    }

    #[test]
    fn action_rejects_dimension_mismatch() {
        let w = SignedPermutation::identity(3);
        let xi = SpectralPoint(vec![c(1.0, 0.0)]);
        assert!(matches!(w.act(&xi), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn group_is_complete_and_closed() {
        for n in 1..4 {
            let all = SignedPermutation::all(n);
            assert_eq!(all.len(), SignedPermutation::group_order(n));
            assert_eq!(all[0], SignedPermutation::identity(n));
            let set: std::collections::HashSet<_> = all.iter().cloned().collect();
            assert_eq!(set.len(), all.len());
            for w in &all {
                assert_eq!(w.compose(&w.inverse()), SignedPermutation::identity(n));
            }
        }
    }

    #[test]
    fn regularity_classification() {
        let xi = SpectralPoint(vec![c(0.5, 0.0), c(0.13, 0.2)]);
        assert!(!xi.is_regular(1e-9));
        assert!(!xi.is_regular_plus(1e-9));
        let xi = SpectralPoint(vec![c(-0.5, 0.0), c(0.13, 0.2)]);
        assert!(!xi.is_regular(1e-9));
        assert!(xi.is_regular_plus(1e-9));
        let xi = SpectralPoint(vec![c(0.31, 0.1), c(0.13, 0.2)]);
        assert!(xi.is_regular(1e-9));
        let hit = SpectralPoint(vec![c(0.8, 0.3), c(-0.2, 0.3)]).nearest_hyperplane(false).unwrap();
        assert_eq!(hit.plane, Hyperplane::Diff { j: 0, k: 1, m: 1 });
        assert!(hit.distance < 1e-12);
    }

    #[test]
    fn chambers() {
        assert!(Family::Bc.contains(&[3.0, 1.0]));
        assert!(!Family::Bc.contains(&[1.0, 3.0]));
        assert!(Family::T.contains(&[1.0, 3.0]));
        assert!(!Family::T.contains(&[1.0, -3.0]));
        assert!(Family::Cs.contains(&[1.0, -3.0]));
    }

    #[test]
    fn family_parsing() {
        for f in Family::ALL {
            assert_eq!(f.as_str().parse::<Family>().unwrap(), f);
        }
        assert!("xx".parse::<Family>().is_err());
    }
}
