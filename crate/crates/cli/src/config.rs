//! Run configuration: a flat TOML file, overridden key by key by flags.

use std::path::Path;

use hyperwave::{Couplings, Execution, Family, PositionPoint, Settings, SpectralPoint, Tolerances, C64};
use serde::Deserialize;

use crate::complex::parse_complex;

/// A complex entry written as a number, a `[re, im]` pair or a string like `"0.1+2i"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ComplexEntry {
    Real(f64),
    Pair([f64; 2]),
    Text(String),
}

impl ComplexEntry {
    fn value(&self) -> Result<C64, String> {
        match self {
            ComplexEntry::Real(v) => Ok(C64::new(*v, 0.0)),
            ComplexEntry::Pair([re, im]) => Ok(C64::new(*re, *im)),
            ComplexEntry::Text(s) => parse_complex(s),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub family: Option<Family>,
    pub n: Option<usize>,
    pub g: Option<Vec<ComplexEntry>>,
    pub a: Option<Vec<ComplexEntry>>,
    pub xi: Option<Vec<ComplexEntry>>,
    pub x: Option<Vec<f64>>,
    #[serde(rename = "N", alias = "max_level")]
    pub max_level: Option<usize>,
    pub tol_int: Option<f64>,
    pub tol_den: Option<f64>,
    pub tol_x: Option<f64>,
    pub pole_guard: Option<f64>,
    pub pole_radius: Option<f64>,
    pub seed: Option<u64>,
    pub exec: Option<Execution>,
    pub threads: Option<usize>,
    pub suite: Option<String>,
    pub ell: Option<Vec<usize>>,
    pub kind: Option<String>,
    pub grid: Option<Vec<f64>>,
    pub regularize: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Keys set in `other` replace those in `self`.
    pub fn overlay(self, other: FileConfig) -> FileConfig {
        macro_rules! pick {
            ($($f:ident),*) => { FileConfig { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            family, n, g, a, xi, x, max_level, tol_int, tol_den, tol_x, pole_guard, pole_radius, seed, exec, threads,
            suite, ell, kind, grid, regularize
        )
    }
}

/// Fully validated configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub family: Family,
    pub g: Couplings,
    pub xi: SpectralPoint,
    pub x: Option<PositionPoint>,
    pub settings: Settings,
    pub threads: Option<usize>,
    pub raw: FileConfig,
}

impl RunConfig {
    pub fn resolve(raw: FileConfig) -> Result<Self, String> {
        let family = raw.family.ok_or("missing key 'family'")?;
        let xi: Vec<C64> = raw
            .xi
            .as_ref()
            .ok_or("missing key 'xi'")?
            .iter()
            .map(ComplexEntry::value)
            .collect::<Result<_, _>>()?;
        let n = raw.n.unwrap_or(xi.len());
        if n == 0 || xi.len() != n {
            return Err(format!("n = {n} but xi has {} entries", xi.len()));
        }
        let g: Vec<C64> = raw
            .g
            .as_ref()
            .ok_or("missing key 'g'")?
            .iter()
            .map(ComplexEntry::value)
            .collect::<Result<_, _>>()?;
        let [gs, gm, gl]: [C64; 3] = g.try_into().map_err(|g: Vec<C64>| format!("g needs 3 entries, got {}", g.len()))?;
        let mut couplings = Couplings::new(gs, gm, gl, n);
        if let Some(a) = &raw.a {
            let a: Vec<C64> = a.iter().map(ComplexEntry::value).collect::<Result<_, _>>()?;
            if a.len() != n {
                return Err(format!("a has {} entries, expected {n}", a.len()));
            }
            couplings = couplings.with_aux(a);
        }
        let x = match &raw.x {
            Some(x) if x.len() != n => return Err(format!("x has {} entries, expected {n}", x.len())),
            Some(x) => Some(PositionPoint(x.clone())),
            None => None,
        };
        let d = Tolerances::default();
        let tol = Tolerances {
            int: raw.tol_int.unwrap_or(d.int),
            den: raw.tol_den.unwrap_or(d.den),
            x: raw.tol_x.unwrap_or(d.x),
            pole_guard: raw.pole_guard.unwrap_or(d.pole_guard),
            pole_radius: raw.pole_radius.unwrap_or(d.pole_radius),
        };
        tol.validate().map_err(|e| e.to_string())?;
        let defaults = Settings::default();
        let settings = Settings {
            max_level: raw.max_level.unwrap_or(defaults.max_level),
            tol,
            exec: raw.exec.unwrap_or(defaults.exec),
            seed: raw.seed.unwrap_or(defaults.seed),
        };
        if raw.threads == Some(0) {
            return Err("threads must be positive".into());
        }
        Ok(RunConfig {
            family,
            g: couplings,
            xi: SpectralPoint(xi),
            x,
            settings,
            threads: raw.threads,
            raw,
        })
    }

    pub fn position(&self) -> Result<&[f64], String> {
        self.x.as_deref().ok_or_else(|| "missing key 'x'".to_string())
    }
}
