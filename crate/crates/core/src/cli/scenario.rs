//! Scenario files: flat TOML sections mirroring the computation inputs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evans::{EvansOptions, WindingOptions};
use crate::profile::ShootOptions;
use crate::shock_states::{end_states_from_densities, EndStates, ShockParams};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub gamma: Option<f64>,
    pub mu: Option<f64>,
    pub k: Option<f64>,
    pub s: Option<f64>,
    #[serde(rename = "A")]
    pub a: Option<f64>,
    #[serde(rename = "B")]
    pub b: Option<f64>,
    pub p_minus: Option<f64>,
    pub p_plus: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EssentialSection {
    /// `None` picks a range from the end-state coefficients.
    pub xi_max: Option<f64>,
    pub xi_steps: usize,
    /// Analyse this `(ρ, J)` state instead of the shock end states.
    pub rho: Option<f64>,
    pub j: Option<f64>,
}

impl Default for EssentialSection {
    fn default() -> Self {
        Self {
            xi_max: None,
            xi_steps: 2001,
            rho: None,
            j: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvansSection {
    pub radius: f64,
    pub margin: f64,
    pub max_refine: usize,
    pub samples_per_piece: usize,
    pub with_bounds: bool,
    pub constant_fixture: bool,
    #[serde(flatten)]
    pub options: EvansOptions,
}

impl Default for EvansSection {
    fn default() -> Self {
        let w = WindingOptions::default();
        Self {
            radius: 50.0,
            margin: 1e-3,
            max_refine: w.max_depth,
            samples_per_piece: w.samples_per_piece,
            with_bounds: false,
            constant_fixture: false,
            options: EvansOptions::default(),
        }
    }
}

impl EvansSection {
    pub fn winding(&self) -> WindingOptions {
        WindingOptions {
            samples_per_piece: self.samples_per_piece,
            max_depth: self.max_refine,
            ..WindingOptions::default()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsSection {
    /// Fixed Young parameters; optimised when absent.
    pub eps: Option<[f64; 3]>,
    /// Number of directions in the optional per-direction radius sweep.
    pub sweep: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub params: ParamsSection,
    pub profile: ShootOptions,
    pub essential: EssentialSection,
    pub evans: EvansSection,
    pub bounds: BoundsSection,
    pub output: OutputSection,
}

/// Viscosity and dispersion used when a scenario leaves them out.
pub const DEFAULT_MU: f64 = 1.0;
pub const DEFAULT_K: f64 = std::f64::consts::SQRT_2;

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Shock parameters and classified end states.
    pub fn resolve(&self) -> Result<(ShockParams, EndStates)> {
        let p = &self.params;
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::Config(format!("missing parameter `{name}`")));
        let gamma = need(p.gamma, "gamma")?;
        let s = need(p.s, "s")?;
        let mu = p.mu.unwrap_or(DEFAULT_MU);
        let k = p.k.unwrap_or(DEFAULT_K);
        let by_flux = p.a.is_some() || p.b.is_some();
        let by_density = p.p_minus.is_some() || p.p_plus.is_some();
        match (by_flux, by_density) {
            (true, true) => Err(Error::Config(
                "give either (A, B) or (p_minus, p_plus), not both".into(),
            )),
            (false, false) => Err(Error::Config(
                "missing shock data: give (A, B) or (p_minus, p_plus)".into(),
            )),
            (true, false) => {
                let params = ShockParams::new(gamma, mu, k, s, need(p.a, "A")?, need(p.b, "B")?)?;
                let states = EndStates::from_params(&params)?;
                Ok((params, states))
            }
            (false, true) => {
                let br = end_states_from_densities(need(p.p_minus, "p_minus")?, need(p.p_plus, "p_plus")?, s, gamma)?;
                let states = br.lax_branch().map(|(_, b)| *b).unwrap_or(br.branch2);
                let params = ShockParams::from_end_states(&states, mu, k)?;
                Ok((params, states))
            }
        }
    }

    pub fn validate_contour(&self) -> Result<()> {
        let e = &self.evans;
        if !(e.margin > 0.0) || !(e.radius > e.margin) {
            return Err(Error::Config(format!(
                "contour needs radius > margin > 0, got radius {} and margin {}",
                e.radius, e.margin
            )));
        }
        Ok(())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.output.dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_scenario() {
        let sc = Scenario::from_toml("[params]\ngamma = 1.5\ns = 1.0\nA = 1.0\nB = 1.1\n").unwrap();
        let (p, st) = sc.resolve().unwrap();
        assert_eq!(p.mu, 1.0);
        assert_eq!(p.k, 2f64.sqrt());
        assert!(st.p_minus > st.p_plus);
    }

    #[test]
    fn densities_round_trip() {
        let sc = Scenario::from_toml("[params]\ngamma = 1.5\ns = 1.0\nA = 1.0\nB = 1.1\n").unwrap();
        let (p, st) = sc.resolve().unwrap();
        let text = format!(
            "[params]\ngamma = 1.5\ns = 1.0\np_minus = {:e}\np_plus = {:e}\n",
            st.p_minus, st.p_plus
        );
        let (q, _) = Scenario::from_toml(&text).unwrap().resolve().unwrap();
        assert!((q.a - p.a).abs() < 1e-10);
        assert!((q.b - p.b).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        let both = "[params]\ngamma = 1.5\ns = 1.0\nA = 1.0\nB = 1.1\np_minus = 2.0\n";
        assert!(matches!(Scenario::from_toml(both).unwrap().resolve(), Err(Error::Config(_))));
        let none = "[params]\ngamma = 1.5\ns = 1.0\n";
        assert!(matches!(Scenario::from_toml(none).unwrap().resolve(), Err(Error::Config(_))));
        assert!(Scenario::from_toml("[params]\nbogus = 1\n").is_err());
        let mut sc = Scenario::default();
        sc.evans.radius = 1e-4;
        assert!(sc.validate_contour().is_err());
    }

    #[test]
    fn sections_parse() {
        let text = "[params]\ngamma = 1.0\ns = 1.0\nA = 1.0\nB = 7.3\nmu = 0.25\n\
                    [evans]\nradius = 10.0\nmethod = \"compound\"\nrtol = 1e-9\n\
                    [profile]\nend_tol = 1e-7\n[bounds]\neps = [0.5, 1.0, 0.5]\n[output]\ndir = \"out\"\n";
        let sc = Scenario::from_toml(text).unwrap();
        assert_eq!(sc.evans.radius, 10.0);
        assert_eq!(sc.evans.options.method, crate::evans::EvansMethod::Compound);
        assert_eq!(sc.evans.options.rtol, 1e-9);
        assert_eq!(sc.profile.end_tol, 1e-7);
        assert_eq!(sc.bounds.eps, Some([0.5, 1.0, 0.5]));
        assert_eq!(sc.out_dir(), PathBuf::from("out"));
    }
}
