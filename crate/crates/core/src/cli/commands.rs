//! One function per subcommand; each returns the files it produces.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::format::{csv, json};
use super::scenario::Scenario;
use crate::bounds::{
    combined_exclusion, energy_bound, highfreq_radius, highfreq_sweep, EnergyBoundReport, HighFreqBoundReport,
    SearchRegion, SectorRadius,
};
use crate::error::Result;
use crate::essential_spectrum::{
    default_xi_max, spectral_curve, stability_test, xi_grid, StabilityVerdict, StateCoefficients,
};
use crate::evans::{winding_number, Contour, EvansMethod, LinearizedSystem};
use crate::profile::{existence_certificate, shoot_heteroclinic, ExistenceCertificate, ProfileCurve, Tail};
use crate::shock_states::{end_states_from_densities, EndStates, ShockParams};

/// Files to write plus a short human-readable summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
    pub summary: String,
}

#[derive(Serialize)]
struct StatesReport {
    params: ShockParams,
    end_states: EndStates,
    rankine_hugoniot_residuals: (f64, f64),
    small_shock_hypothesis: bool,
    a_branches: BranchReport,
}

#[derive(Serialize)]
struct BranchReport {
    a1: f64,
    a2: f64,
    branch1: EndStates,
    branch2: EndStates,
}

pub fn states(sc: &Scenario) -> Result<Artifacts> {
    let (params, end_states) = sc.resolve()?;
    let br = end_states_from_densities(end_states.p_minus, end_states.p_plus, end_states.s, end_states.gamma)?;
    let report = StatesReport {
        params,
        end_states,
        rankine_hugoniot_residuals: end_states.rankine_hugoniot_residuals(),
        small_shock_hypothesis: end_states.small_shock_hypothesis(),
        a_branches: BranchReport {
            a1: br.a1,
            a2: br.a2,
            branch1: br.branch1,
            branch2: br.branch2,
        },
    };
    let summary = format!(
        "P- = {:.12} P+ = {:.12} family {:?} left {:?} right {:?}\n",
        end_states.p_minus,
        end_states.p_plus,
        end_states.family,
        end_states.sonic_class_left,
        end_states.sonic_class_right
    );
    Ok(Artifacts {
        files: vec![("states.json".into(), json(&report)?)],
        summary,
    })
}

#[derive(Serialize)]
struct ProfileReport {
    params: ShockParams,
    p_minus: f64,
    p_plus: f64,
    monotone: bool,
    oscillation_count: usize,
    endpoint_residuals: [f64; 2],
    confinement_defect: f64,
    certificate: ExistenceCertificate,
    samples: usize,
    y_range: (f64, f64),
    left_tail: Tail,
    right_tail: Tail,
}

fn profile_rows(curve: &ProfileCurve) -> String {
    let p = curve.params;
    csv(
        &["y", "P", "Q", "J"],
        curve.samples.iter().map(|s| vec![s.y, s.p, s.q, p.s * s.p - p.a]),
    )
}

pub fn profile(sc: &Scenario) -> Result<Artifacts> {
    let (params, _) = sc.resolve()?;
    let certificate = existence_certificate(&params)?;
    let curve = shoot_heteroclinic(&params, &sc.profile)?;
    let report = ProfileReport {
        params,
        p_minus: curve.p_minus,
        p_plus: curve.p_plus,
        monotone: curve.monotone,
        oscillation_count: curve.oscillation_count,
        endpoint_residuals: curve.endpoint_residuals,
        confinement_defect: curve.confinement_defect(),
        certificate,
        samples: curve.samples.len(),
        y_range: curve.y_range(),
        left_tail: curve.left_tail,
        right_tail: curve.right_tail,
    };
    let summary = format!(
        "{} samples, {} oscillations, residuals {:.3e} {:.3e}\n",
        report.samples, report.oscillation_count, report.endpoint_residuals[0], report.endpoint_residuals[1]
    );
    Ok(Artifacts {
        files: vec![
            ("profile.csv".into(), profile_rows(&curve)),
            ("profile.json".into(), json(&report)?),
        ],
        summary,
    })
}

#[derive(Serialize)]
struct EssentialState {
    label: String,
    p: f64,
    j: f64,
    coefficients: StateCoefficients,
    xi_max: f64,
    curve_stable: bool,
    verdict: StabilityVerdict,
}

#[derive(Serialize)]
struct EssentialReport {
    params: ShockParams,
    states: Vec<EssentialState>,
}

pub fn essential(sc: &Scenario) -> Result<Artifacts> {
    let (params, end_states) = sc.resolve()?;
    let e = &sc.essential;
    let targets: Vec<(String, f64, f64)> = match (e.rho, e.j) {
        (Some(rho), Some(j)) => vec![("state".into(), rho, j)],
        (None, None) => vec![
            ("minus".into(), end_states.p_minus, end_states.j_minus),
            ("plus".into(), end_states.p_plus, end_states.j_plus),
        ],
        _ => {
            return Err(crate::Error::Config("essential: give both rho and j, or neither".into()));
        }
    };
    let mut files = Vec::new();
    let mut states = Vec::new();
    let mut summary = String::new();
    for (label, p, j) in targets {
        let co = StateCoefficients::new(p, j, params.s, params.gamma)?;
        let xi_max = e.xi_max.unwrap_or_else(|| default_xi_max(&co, &params));
        let grid = xi_grid(xi_max, e.xi_steps);
        let curve = spectral_curve(&co, &params, &grid);
        let verdict = stability_test(&co, &params, &grid);
        let rows = (0..grid.len()).map(|i| {
            let (a, b) = (curve.lambda1[i], curve.lambda2[i]);
            vec![grid[i], a.re, a.im, b.re, b.im]
        });
        files.push((
            format!("essential_{label}.csv"),
            csv(&["xi", "re_lambda1", "im_lambda1", "re_lambda2", "im_lambda2"], rows),
        ));
        summary.push_str(&format!(
            "{label}: {} (worst xi {:.6e}, value {:.6e})\n",
            if verdict.stable { "stable" } else { "unstable" },
            verdict.worst_xi,
            verdict.worst_value
        ));
        states.push(EssentialState {
            label,
            p,
            j,
            coefficients: co,
            xi_max,
            curve_stable: curve.stable,
            verdict,
        });
    }
    files.push(("essential.json".into(), json(&EssentialReport { params, states })?));
    Ok(Artifacts { files, summary })
}

#[derive(Serialize)]
struct BoundsReport {
    energy: EnergyBoundReport,
    high_frequency: HighFreqBoundReport,
    region: SearchRegion,
    sweep: Vec<SectorRadius>,
}

fn bounds_report(sc: &Scenario, curve: &ProfileCurve) -> Result<BoundsReport> {
    let energy = energy_bound(curve, sc.bounds.eps)?;
    let high_frequency = highfreq_radius(curve)?;
    let region = combined_exclusion(&energy, &high_frequency, sc.evans.margin)?;
    let n = sc.bounds.sweep;
    let thetas: Vec<f64> = (0..n)
        .map(|i| if n == 1 { 0.0 } else { -FRAC_PI_2 + std::f64::consts::PI * i as f64 / (n - 1) as f64 })
        .collect();
    let sweep = highfreq_sweep(curve, &thetas)?;
    Ok(BoundsReport {
        energy,
        high_frequency,
        region,
        sweep,
    })
}

pub fn bounds(sc: &Scenario) -> Result<Artifacts> {
    let (params, _) = sc.resolve()?;
    let curve = shoot_heteroclinic(&params, &sc.profile)?;
    let report = bounds_report(sc, &curve)?;
    let summary = format!(
        "Re(lambda) <= {:.6e}; no eigenvalues for |lambda| >= {:.6e}\n",
        report.energy.bound, report.high_frequency.c
    );
    Ok(Artifacts {
        files: vec![("bounds.json".into(), json(&report)?)],
        summary,
    })
}

#[derive(Serialize)]
struct EvansReport {
    params: ShockParams,
    constant_fixture: bool,
    method: EvansMethod,
    contour: Contour,
    winding: i64,
    turns: f64,
    samples: usize,
    max_depth_used: usize,
    bounds: Option<BoundsReport>,
}

pub fn evans(sc: &Scenario) -> Result<Artifacts> {
    sc.validate_contour()?;
    let (params, end_states) = sc.resolve()?;
    let e = &sc.evans;
    let (sys, curve) = if e.constant_fixture {
        (LinearizedSystem::constant(params, end_states.p_minus)?, None)
    } else {
        let curve = shoot_heteroclinic(&params, &sc.profile)?;
        (LinearizedSystem::new(curve.clone())?, Some(curve))
    };
    let contour = Contour::half_disk(e.radius, e.margin)?;
    let result = winding_number(&sys, &contour, &e.options, &e.winding())?;
    let bounds = match (&curve, e.with_bounds) {
        (Some(c), true) => Some(bounds_report(sc, c)?),
        _ => None,
    };
    let rows = result.samples.iter().map(|s| {
        let v = &s.value;
        vec![v.lambda.re, v.lambda.im, v.mantissa.re, v.mantissa.im, v.log_scale]
    });
    let table = csv(&["re_lambda", "im_lambda", "re_E", "im_E", "log_scale"], rows);
    let report = EvansReport {
        params,
        constant_fixture: e.constant_fixture,
        method: e.options.method,
        contour,
        winding: result.winding,
        turns: result.turns,
        samples: result.samples.len(),
        max_depth_used: result.max_depth_used,
        bounds,
    };
    let summary = format!(
        "winding number {} ({} samples, refinement depth {})\n",
        report.winding, report.samples, report.max_depth_used
    );
    Ok(Artifacts {
        files: vec![("evans.csv".into(), table), ("evans.json".into(), json(&report)?)],
        summary,
    })
}
