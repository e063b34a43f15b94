//! Energies and norms over parameter disks, and the ε-regularity experiments.
//!
//! Chart densities used throughout (`dvol_g = e^{2λ} dxdy`):
//!
//! | quantity      | density                         |
//! |---------------|---------------------------------|
//! | `W`           | `H² e^{2λ}`                     |
//! | `E_tf`        | `|Åe^{−λ}|² = |Å|_g² e^{2λ}`     |
//! | `∫|∇n|²`      | `|A|_g² e^{2λ}`                 |
//!
//! Sums are pairwise over the quadrature node order, so every report is
//! reproducible bit for bit.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::geom::{fundamental_forms, tracefree_density, FundamentalForms, Jet2};
use crate::quadrature::{pairwise_sum, DiskQuadrature, QuadratureError};
use crate::zoo::{SurfaceError, SurfaceSpec};

/// `l2_tf` at or below this is treated as an umbilic patch.
pub const UMBILIC_TOL: f64 = 1e-12;

/// Number of geometric levels in [`weak_l2_quasinorm`].
pub const WEAK_L2_LEVELS: usize = 64;

/// Minimum sample count for [`weak_l2_quasinorm`].
pub const WEAK_L2_MIN_SAMPLES: usize = 100;

#[derive(Debug, Error)]
pub enum EnergyError {
    #[error("weak-L² estimate needs at least {WEAK_L2_MIN_SAMPLES} weighted samples, got {0}")]
    EmptyField(usize),
    #[error("oscillation estimate requires a Willmore surface; `{0}` is not known to be one")]
    NotWillmore(String),
    #[error("closed-surface check supports round spheres and their Möbius images, not `{0}`")]
    UnsupportedClosedSurface(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// Experiment thresholds gating a scan row. They flag rows; nothing asserts them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanThresholds {
    /// Bound on `∫|∇n|²`, default `4π/3`.
    pub dirichlet_max: f64,
    /// `C₀`, bound on the weak-L² quasinorm of `∇λ`.
    pub c0: f64,
    /// `ε₀`, bound on `l2_tf`.
    pub eps0: f64,
}

impl Default for ScanThresholds {
    fn default() -> Self {
        Self {
            dirichlet_max: 4.0 * PI / 3.0,
            c0: 10.0,
            eps0: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub center: [f64; 2],
    pub radius: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub w: f64,
    pub e_tf: f64,
    pub dirichlet_n: f64,
    /// `‖Åe^{−λ}‖_{L²(D_ρ)}`.
    pub l2_tf: f64,
    /// Sampled sup of the tracefree density over `D_{ρ/2}` (a lower estimate).
    pub linf_tf_half: f64,
    pub weak_l2_gradlambda: f64,
    /// `ρ · linf_tf_half / l2_tf`, or 0 on umbilic patches.
    pub ratio: f64,
    pub umbilic: bool,
    /// Euclidean average of `H` over `D_{ρ/2}`.
    pub hbar: f64,
    /// `‖(H − H̄)e^λ‖_{L²(D_{ρ/2})}`.
    pub h_osc: f64,
}

struct Sample {
    f: FundamentalForms,
    jet: Jet2,
}

fn sample(spec: &SurfaceSpec, p: [f64; 2]) -> Result<Sample, SurfaceError> {
    let jet = spec.jet(p)?;
    let f = fundamental_forms(&jet)?;
    Ok(Sample { f, jet })
}

fn samples(spec: &SurfaceSpec, nodes: &[[f64; 2]]) -> Result<Vec<Sample>, SurfaceError> {
    nodes.iter().map(|&p| sample(spec, p)).collect()
}

/// `|∇λ|` with `∂_kλ = (⟨Φ_x,Φ_xk⟩ + ⟨Φ_y,Φ_yk⟩)/|∇Φ|²`.
pub fn grad_lambda_norm(jet: &Jet2) -> f64 {
    let [px, py] = jet.d1;
    let [pxx, pxy, pyy] = jet.d2;
    let g2 = px.norm_squared() + py.norm_squared();
    let lx = (px.dot(&pxx) + py.dot(&pxy)) / g2;
    let ly = (px.dot(&pxy) + py.dot(&pyy)) / g2;
    lx.hypot(ly)
}

/// `sup_α α²·μ{|f| ≥ α}` over [`WEAK_L2_LEVELS`] geometric levels spanning the
/// nonzero sample range; `μ` is the weighted sample measure.
pub fn weak_l2_quasinorm(values: &[f64], weights: &[f64]) -> Result<f64, EnergyError> {
    let n = values.len().min(weights.len());
    if n < WEAK_L2_MIN_SAMPLES {
        return Err(EnergyError::EmptyField(n));
    }
    let mut pairs: Vec<(f64, f64)> = values[..n]
        .iter()
        .map(|v| v.abs())
        .zip(weights[..n].iter().copied())
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let nonzero: Vec<f64> = pairs.iter().map(|p| p.0).filter(|&v| v > 0.0).collect();
    let (Some(&hi), Some(&lo)) = (nonzero.first(), nonzero.last()) else {
        return Ok(0.0);
    };
    // measure of {|f| ≥ α} by prefix sums over the descending order
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for p in &pairs {
        prefix.push(prefix[prefix.len() - 1] + p.1);
    }
    let measure = |alpha: f64| {
        let count = pairs.partition_point(|p| p.0 >= alpha);
        prefix[count]
    };
    let mut best = 0.0f64;
    for k in 0..WEAK_L2_LEVELS {
        let t = k as f64 / (WEAK_L2_LEVELS - 1) as f64;
        let alpha = if k == WEAK_L2_LEVELS - 1 {
            hi
        } else if k == 0 {
            lo
        } else {
            lo * (hi / lo).powf(t)
        };
        best = best.max(alpha * alpha * measure(alpha));
    }
    Ok(best)
}

pub fn energy_report(spec: &SurfaceSpec, q: &DiskQuadrature) -> Result<EnergyReport, EnergyError> {
    let s = samples(spec, &q.nodes)?;
    let w = q.sum_values(
        &s.iter()
            .map(|s| s.f.h * s.f.h * s.f.metric)
            .collect::<Vec<_>>(),
    );
    let e_tf = q.sum_values(
        &s.iter()
            .map(|s| tracefree_density(&s.f).powi(2))
            .collect::<Vec<_>>(),
    );
    let dirichlet_n = q.sum_values(
        &s.iter()
            .map(|s| s.f.a_norm_sq() * s.f.metric)
            .collect::<Vec<_>>(),
    );
    let grad: Vec<f64> = s.iter().map(|s| grad_lambda_norm(&s.jet)).collect();
    let weak_l2_gradlambda = weak_l2_quasinorm(&grad, &q.weights)?;
    let l2_tf = e_tf.max(0.0).sqrt();

    let dense = q.scaled(0.5, 2 * q.n_r, 2 * q.n_theta)?;
    let mut linf_tf_half = tracefree_density(&sample(spec, q.center)?.f);
    for p in &dense.nodes {
        linf_tf_half = linf_tf_half.max(tracefree_density(&sample(spec, *p)?.f));
    }
    let umbilic = l2_tf <= UMBILIC_TOL;
    let ratio = if umbilic {
        0.0
    } else {
        q.radius * linf_tf_half / l2_tf
    };

    let half = q.scaled(0.5, q.n_r, q.n_theta)?;
    let osc = oscillation_data(spec, &half)?;
    Ok(EnergyReport {
        center: q.center,
        radius: q.radius,
        n_r: q.n_r,
        n_theta: q.n_theta,
        w,
        e_tf,
        dirichlet_n,
        l2_tf,
        linf_tf_half,
        weak_l2_gradlambda,
        ratio,
        umbilic,
        hbar: osc.hbar,
        h_osc: osc.h_osc,
    })
}

struct OscData {
    hbar: f64,
    h_osc: f64,
    l2_tf: f64,
}

fn oscillation_data(spec: &SurfaceSpec, q: &DiskQuadrature) -> Result<OscData, SurfaceError> {
    let s = samples(spec, &q.nodes)?;
    let hs: Vec<f64> = s.iter().map(|s| s.f.h).collect();
    let hbar = q.sum_values(&hs) / q.area();
    let osc: Vec<f64> = s
        .iter()
        .map(|s| (s.f.h - hbar).powi(2) * s.f.metric)
        .collect();
    let tf: Vec<f64> = s.iter().map(|s| tracefree_density(&s.f).powi(2)).collect();
    Ok(OscData {
        hbar,
        h_osc: q.sum_values(&osc).max(0.0).sqrt(),
        l2_tf: q.sum_values(&tf).max(0.0).sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationReport {
    pub center: [f64; 2],
    /// Radius of the half disk the norms are taken over.
    pub radius: f64,
    pub hbar: f64,
    pub h_osc: f64,
    pub l2_tf: f64,
    /// `h_osc / l2_tf`, 0 when degenerate.
    pub quotient: f64,
    pub degenerate: bool,
}

/// `‖(H − H̄)e^λ‖` against `‖Åe^{−λ}‖`, both over the half disk `D_{ρ/2}`.
pub fn oscillation_check(
    spec: &SurfaceSpec,
    q: &DiskQuadrature,
) -> Result<OscillationReport, EnergyError> {
    if !spec.is_willmore() {
        return Err(EnergyError::NotWillmore(spec.to_string()));
    }
    let half = q.scaled(0.5, q.n_r, q.n_theta)?;
    let d = oscillation_data(spec, &half)?;
    let degenerate = d.l2_tf <= UMBILIC_TOL;
    Ok(OscillationReport {
        center: q.center,
        radius: half.radius,
        hbar: d.hbar,
        h_osc: d.h_osc,
        l2_tf: d.l2_tf,
        quotient: if degenerate { 0.0 } else { d.h_osc / d.l2_tf },
        degenerate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub report: EnergyReport,
    pub dirichlet_gate: bool,
    pub weak_gate: bool,
    pub small_energy_gate: bool,
}

impl ScanRow {
    pub fn all_gates(&self) -> bool {
        self.dirichlet_gate && self.weak_gate && self.small_energy_gate
    }
}

/// One report per `(center, radius)`, centers outermost, with hypothesis flags.
pub fn epsreg_scan(
    spec: &SurfaceSpec,
    centers: &[[f64; 2]],
    radii: &[f64],
    n_r: usize,
    n_theta: usize,
    thresholds: &ScanThresholds,
) -> Result<Vec<ScanRow>, EnergyError> {
    let mut rows = Vec::with_capacity(centers.len() * radii.len());
    for &c in centers {
        for &r in radii {
            let q = DiskQuadrature::new(c, r, n_r, n_theta)?;
            let report = energy_report(spec, &q)?;
            rows.push(ScanRow {
                dirichlet_gate: report.dirichlet_n <= thresholds.dirichlet_max,
                weak_gate: report.weak_l2_gradlambda <= thresholds.c0,
                small_energy_gate: report.l2_tf <= thresholds.eps0,
                report,
            });
        }
    }
    Ok(rows)
}

/// Column order of [`write_scan_csv`].
pub const SCAN_CSV_COLUMNS: [&str; 18] = [
    "center_x",
    "center_y",
    "radius",
    "n_r",
    "n_theta",
    "w",
    "e_tf",
    "dirichlet_n",
    "l2_tf",
    "linf_tf_half",
    "weak_l2_gradlambda",
    "ratio",
    "umbilic",
    "hbar",
    "h_osc",
    "dirichlet_gate",
    "weak_gate",
    "small_energy_gate",
];

pub fn write_scan_csv<W: std::io::Write>(rows: &[ScanRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{}", SCAN_CSV_COLUMNS.join(","))?;
    for row in rows {
        let r = &row.report;
        writeln!(
            out,
            "{},{},{},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{:e},{:e},{},{},{}",
            r.center[0],
            r.center[1],
            r.radius,
            r.n_r,
            r.n_theta,
            r.w,
            r.e_tf,
            r.dirichlet_n,
            r.l2_tf,
            r.linf_tf_half,
            r.weak_l2_gradlambda,
            r.ratio,
            r.umbilic,
            r.hbar,
            r.h_osc,
            row.dirichlet_gate,
            row.weak_gate,
            row.small_energy_gate
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussBonnetReport {
    pub chart_radius: f64,
    /// Angular resolution at which successive totals agreed.
    pub n_theta: usize,
    pub w_total: f64,
    pub e_tf_total: f64,
    pub euler_characteristic: i32,
    /// `2W − 4πχ`.
    pub two_w_minus_4pi_chi: f64,
    pub defect: f64,
    /// Tail estimate added to `W` beyond the chart disk.
    pub w_tail: f64,
}

/// Chart radius for closed-surface integrals.
pub const CLOSED_CHART_RADIUS: f64 = 1e3;

fn is_round_sphere(spec: &SurfaceSpec) -> bool {
    match spec {
        SurfaceSpec::RoundSphere { .. } => true,
        SurfaceSpec::Transformed { inner, .. } => is_round_sphere(inner),
        _ => false,
    }
}

/// Angular resolutions tried in turn by [`gauss_bonnet_check`].
pub const CLOSED_CHART_THETA: [usize; 5] = [64, 128, 256, 512, 1024];

/// Relative agreement of successive totals that stops the angular refinement.
pub const CLOSED_CHART_AGREEMENT: f64 = 1e-9;

/// Graded polar rule for the stereographic chart of a closed surface.
pub fn closed_chart_quadrature(radius: f64) -> Result<DiskQuadrature, QuadratureError> {
    closed_chart_quadrature_with(radius, CLOSED_CHART_THETA[0])
}

pub fn closed_chart_quadrature_with(
    radius: f64,
    n_theta: usize,
) -> Result<DiskQuadrature, QuadratureError> {
    DiskQuadrature::graded([0.0, 0.0], radius, 40, 1.45, 10, n_theta)
}

/// Chart integral of `f` over `D_R` plus the `r⁻⁴` tail `πR²·avg_θ f(R, θ)`.
fn closed_integral<F>(
    q: &DiskQuadrature,
    values: &[f64],
    mut at: F,
) -> Result<(f64, f64), SurfaceError>
where
    F: FnMut([f64; 2]) -> Result<f64, SurfaceError>,
{
    let r = q.radius;
    let mut rim = Vec::with_capacity(q.n_theta);
    for k in 0..q.n_theta {
        let t = 2.0 * PI * k as f64 / q.n_theta as f64;
        rim.push(at([r * t.cos(), r * t.sin()])?);
    }
    let tail = PI * r * r * pairwise_sum(&rim) / q.n_theta as f64;
    Ok((q.sum_values(values), tail))
}

/// `(W, E_tf, W tail)` on the closed chart at angular resolution `n_theta`.
fn closed_totals(spec: &SurfaceSpec, n_theta: usize) -> Result<(f64, f64, f64), EnergyError> {
    let q = closed_chart_quadrature_with(CLOSED_CHART_RADIUS, n_theta)?;
    let s = samples(spec, &q.nodes)?;
    let wv: Vec<f64> = s.iter().map(|s| s.f.h * s.f.h * s.f.metric).collect();
    let tv: Vec<f64> = s.iter().map(|s| tracefree_density(&s.f).powi(2)).collect();
    let (w_chart, w_tail) = closed_integral(&q, &wv, |p| {
        let s = sample(spec, p)?;
        Ok(s.f.h * s.f.h * s.f.metric)
    })?;
    let (e_chart, e_tail) = closed_integral(&q, &tv, |p| {
        Ok(tracefree_density(&sample(spec, p)?.f).powi(2))
    })?;
    Ok((w_chart + w_tail, e_chart + e_tail, w_tail))
}

/// `E_tf` against `2W − 4πχ` for round spheres and their Möbius images (`χ = 2`).
pub fn gauss_bonnet_check(spec: &SurfaceSpec) -> Result<GaussBonnetReport, EnergyError> {
    if !is_round_sphere(spec) {
        return Err(EnergyError::UnsupportedClosedSurface(spec.to_string()));
    }
    let mut previous: Option<(f64, f64)> = None;
    let mut totals = (0.0, 0.0, 0.0, 0);
    for n_theta in CLOSED_CHART_THETA {
        let (w, e, tail) = closed_totals(spec, n_theta)?;
        totals = (w, e, tail, n_theta);
        if let Some((pw, pe)) = previous {
            if (w - pw).abs().max((e - pe).abs()) <= CLOSED_CHART_AGREEMENT * w.abs().max(1.0) {
                break;
            }
        }
        previous = Some((w, e));
    }
    let (w_total, e_tf_total, w_tail, n_theta) = totals;
    let chi = 2;
    let rhs = 2.0 * w_total - 4.0 * PI * chi as f64;
    Ok(GaussBonnetReport {
        chart_radius: CLOSED_CHART_RADIUS,
        n_theta,
        w_total,
        e_tf_total,
        euler_characteristic: chi,
        two_w_minus_4pi_chi: rhs,
        defect: (e_tf_total - rhs).abs(),
        w_tail,
    })
}

/// Willmore energy of the stereographic chart over `D_R` without the tail.
pub fn chart_willmore_energy(spec: &SurfaceSpec, radius: f64) -> Result<f64, EnergyError> {
    let q = closed_chart_quadrature(radius)?;
    let s = samples(spec, &q.nodes)?;
    Ok(q.sum_values(
        &s.iter()
            .map(|s| s.f.h * s.f.h * s.f.metric)
            .collect::<Vec<_>>(),
    ))
}
