//! Squeezed-frame (Bogoliubov) view of the self-Kerr terms and the cavity
//! detunings it predicts for optimal entanglement transfer.

use crate::error::{Error, Result};
use crate::model::EffectiveConfig;

/// Per-mode squeezing data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeSqueeze {
    /// `(Δ̃ − K̃)/(Δ̃ + K̃)`.
    pub ratio: f64,
    /// `¼ ln ratio`.
    pub theta: f64,
    /// `√(Δ̃² − K̃²)`, rad/s.
    pub delta_beta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BogoliubovParams {
    pub theta_b: f64,
    pub theta_c: f64,
    pub c_b: f64,
    pub c_c: f64,
    /// Computed from the mode-averaged `Δ̃`, `K̃`.
    pub theta: f64,
    pub c: f64,
    pub delta_beta: f64,
    pub g_script: f64,
    pub g_cos: f64,
    pub g_sin: f64,
    pub per_mode: [ModeSqueeze; 2],
}

pub fn mode_squeeze(delta: f64, kerr: f64) -> Result<ModeSqueeze> {
    let ratio = (delta - kerr) / (delta + kerr);
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::Domain(format!(
            "Bogoliubov frame undefined; |Δ̃| ≤ K̃ (Δ̃ = {delta:e}, K̃ = {kerr:e} rad/s)"
        )));
    }
    Ok(ModeSqueeze {
        ratio,
        theta: 0.25 * ratio.ln(),
        delta_beta: (delta * delta - kerr * kerr).sqrt(),
    })
}

pub fn squeeze_params(cfg: &EffectiveConfig) -> Result<BogoliubovParams> {
    let b = mode_squeeze(cfg.delta_b, cfg.kerr_b)?;
    let c = mode_squeeze(cfg.delta_c, cfg.kerr_c)?;
    let sym = mode_squeeze(
        0.5 * (cfg.delta_b + cfg.delta_c),
        0.5 * (cfg.kerr_b + cfg.kerr_c),
    )?;
    Ok(BogoliubovParams {
        theta_b: b.theta,
        theta_c: c.theta,
        c_b: b.ratio,
        c_c: c.ratio,
        theta: sym.theta,
        c: sym.ratio,
        delta_beta: sym.delta_beta,
        g_script: cfg.cross_kerr * sym.ratio.sqrt(),
        g_cos: cfg.g_ab * sym.theta.cosh(),
        g_sin: cfg.g_ab * sym.theta.sinh(),
        per_mode: [b, c],
    })
}

/// Cavity detunings predicted to maximize entanglement transfer, rad/s.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchingReport {
    /// `−Δ̃_c`.
    pub match_bc: f64,
    /// `−Δ̃_b`.
    pub match_b: f64,
    /// `sign(−Δ̃) Δ_β`, absent when the squeezed frame is undefined.
    pub bogoliubov: Option<f64>,
    pub note: Option<String>,
}

impl MatchingReport {
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        let mut v = vec![("Delta_a_match_bc", self.match_bc), ("Delta_a_match_b", self.match_b)];
        if let Some(x) = self.bogoliubov {
            v.push(("Delta_a_bogoliubov", x));
        }
        v
    }
}

pub fn matching_report(cfg: &EffectiveConfig) -> MatchingReport {
    let mean = 0.5 * (cfg.delta_b + cfg.delta_c);
    let (bogoliubov, note) = match squeeze_params(cfg) {
        Ok(p) => {
            let sign = if mean < 0.0 { 1.0 } else { -1.0 };
            (Some(sign * p.delta_beta), None)
        }
        Err(e) => (None, Some(e.to_string())),
    };
    MatchingReport {
        match_bc: -cfg.delta_c,
        match_b: -cfg.delta_b,
        bogoliubov,
        note,
    }
}
