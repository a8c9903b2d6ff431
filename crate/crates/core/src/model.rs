//! System parameters for the three-mode cavity-magnon model.
//!
//! Mode `a` is the microwave cavity, `b` the Kittel mode and `c` the
//! higher-order magnetostatic mode. Every rate and frequency is an angular
//! frequency in rad/s; the helpers [`mhz`], [`ghz`] and [`nhz`] convert from
//! the "2π × unit" convention used by config files.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (CODATA 2018, exact).
pub const K_B: f64 = 1.380_649e-23;

/// 2π × `x` MHz in rad/s.
pub fn mhz(x: f64) -> f64 {
    2.0 * PI * 1e6 * x
}

/// 2π × `x` GHz in rad/s.
pub fn ghz(x: f64) -> f64 {
    2.0 * PI * 1e9 * x
}

/// 2π × `x` nHz in rad/s.
pub fn nhz(x: f64) -> f64 {
    2.0 * PI * 1e-9 * x
}

/// rad/s expressed as 2π × MHz.
pub fn to_mhz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e6)
}

/// Undriven model: detunings from the drive, bare Kerr coefficients and
/// Rabi drive amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct BareConfig {
    /// Lab-frame mode frequencies, used for bath occupancies.
    pub omega_a: Option<f64>,
    pub omega_b: Option<f64>,
    pub omega_c: Option<f64>,
    /// Drive frequency. Only used to cross-check the detunings.
    pub omega_d: Option<f64>,
    pub delta_a: f64,
    pub delta_b: f64,
    pub delta_c: f64,
    /// Self-Kerr coefficients, rad/s per excitation.
    pub kerr_b: f64,
    pub kerr_c: f64,
    /// Cross-Kerr coefficient, rad/s per excitation.
    pub cross_kerr: f64,
    pub g_ab: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub gamma_c: f64,
    /// Rabi drive amplitudes on the two magnon modes.
    pub drive_b: f64,
    pub drive_c: f64,
    /// Bath temperature in Kelvin.
    pub temperature: f64,
}

/// Coefficients of the linearized fluctuation dynamics.
///
/// `delta_b`, `delta_c` are the Kerr-shifted magnon detunings, `kerr_*` the
/// effective single-mode squeezing rates and `cross_kerr` the effective
/// magnon-magnon coupling produced by the cross-Kerr term.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveConfig {
    pub delta_a: f64,
    pub delta_b: f64,
    pub delta_c: f64,
    pub kerr_b: f64,
    pub kerr_c: f64,
    pub cross_kerr: f64,
    pub g_ab: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub gamma_c: f64,
    /// Bath occupancies.
    pub n_a: f64,
    pub n_b: f64,
    pub n_c: f64,
}

/// A single broken invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.field, self.rule)
    }
}

pub trait Validate {
    /// Every violated invariant; empty when the value is usable.
    fn validate(&self) -> Vec<Violation>;

    fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            let msg: Vec<String> = v.iter().map(ToString::to_string).collect();
            Err(Error::InvalidArgument(msg.join("; ")))
        }
    }
}

fn positive(out: &mut Vec<Violation>, field: &'static str, x: f64) {
    if !(x > 0.0 && x.is_finite()) {
        out.push(Violation {
            field,
            rule: "must be positive".into(),
        });
    }
}

fn non_negative(out: &mut Vec<Violation>, field: &'static str, x: f64) {
    if !(x >= 0.0 && x.is_finite()) {
        out.push(Violation {
            field,
            rule: "must be non-negative".into(),
        });
    }
}

fn finite(out: &mut Vec<Violation>, field: &'static str, x: f64) {
    if !x.is_finite() {
        out.push(Violation {
            field,
            rule: "must be finite".into(),
        });
    }
}

impl Validate for BareConfig {
    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        positive(&mut out, "gamma_a", self.gamma_a);
        positive(&mut out, "gamma_b", self.gamma_b);
        positive(&mut out, "gamma_c", self.gamma_c);
        non_negative(&mut out, "T_e", self.temperature);
        for (field, x) in [
            ("Delta_a", self.delta_a),
            ("Delta_b", self.delta_b),
            ("Delta_c", self.delta_c),
            ("K_b", self.kerr_b),
            ("K_c", self.kerr_c),
            ("G", self.cross_kerr),
            ("g_ab", self.g_ab),
            ("Omega_b", self.drive_b),
            ("Omega_c", self.drive_c),
        ] {
            finite(&mut out, field, x);
        }
        for (field, w) in [
            ("omega_a", self.omega_a),
            ("omega_b", self.omega_b),
            ("omega_c", self.omega_c),
            ("omega_d", self.omega_d),
        ] {
            if let Some(w) = w {
                positive(&mut out, field, w);
            }
        }
        if self.temperature > 0.0 {
            for (field, w) in [
                ("omega_a", self.omega_a),
                ("omega_b", self.omega_b),
                ("omega_c", self.omega_c),
            ] {
                if w.is_none() {
                    out.push(Violation {
                        field,
                        rule: "is required when T_e > 0".into(),
                    });
                }
            }
        }
        if let Some(wd) = self.omega_d {
            for (field, w, d) in [
                ("Delta_a", self.omega_a, self.delta_a),
                ("Delta_b", self.omega_b, self.delta_b),
                ("Delta_c", self.omega_c, self.delta_c),
            ] {
                if let Some(w) = w {
                    // Frequencies are ~1e10 rad/s, detunings ~1e8: compare on
                    // the scale of the drive frequency.
                    if ((w - wd) - d).abs() > 1e-9 * wd.abs().max(1.0) {
                        out.push(Violation {
                            field,
                            rule: format!(
                                "must equal omega - omega_d ({} MHz given, {} MHz implied)",
                                to_mhz(d),
                                to_mhz(w - wd)
                            ),
                        });
                    }
                }
            }
        }
        out
    }
}

impl Validate for EffectiveConfig {
    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        positive(&mut out, "gamma_a", self.gamma_a);
        positive(&mut out, "gamma_b", self.gamma_b);
        positive(&mut out, "gamma_c", self.gamma_c);
        non_negative(&mut out, "n_a", self.n_a);
        non_negative(&mut out, "n_b", self.n_b);
        non_negative(&mut out, "n_c", self.n_c);
        for (field, x) in [
            ("Delta_a", self.delta_a),
            ("Delta_b_tilde", self.delta_b),
            ("Delta_c_tilde", self.delta_c),
            ("K_b_tilde", self.kerr_b),
            ("K_c_tilde", self.kerr_c),
            ("G_tilde", self.cross_kerr),
            ("g_ab", self.g_ab),
        ] {
            finite(&mut out, field, x);
        }
        out
    }
}

/// Bose-Einstein occupancy of a bath mode at angular frequency `omega`.
pub fn thermal_occupancy(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "mode frequency must be positive, got {omega}"
        )));
    }
    if !(temperature >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "temperature must be non-negative, got {temperature}"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (HBAR * omega / (K_B * temperature)).exp_m1())
}

/// Occupancies of the three baths. Zero temperature needs no frequencies.
pub fn bath_occupancies(
    omegas: [Option<f64>; 3],
    temperature: f64,
) -> Result<[f64; 3]> {
    if temperature == 0.0 {
        return Ok([0.0; 3]);
    }
    let mut n = [0.0; 3];
    for (slot, (w, label)) in n.iter_mut().zip(omegas.iter().zip(["omega_a", "omega_b", "omega_c"])) {
        let w = w.ok_or_else(|| {
            Error::InvalidArgument(format!("{label} is required when T_e > 0"))
        })?;
        *slot = thermal_occupancy(w, temperature)?;
    }
    Ok(n)
}

/// Linearizes the bare model around mean magnon occupations `nb2 = |<b>|²`
/// and `nc2 = |<c>|²`, taking the amplitudes to be real.
pub fn derive_effective(bare: &BareConfig, nb2: f64, nc2: f64) -> Result<EffectiveConfig> {
    if !(nb2 >= 0.0) || !(nc2 >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "mean occupations must be non-negative (|<b>|² = {nb2}, |<c>|² = {nc2})"
        )));
    }
    bare.check()?;
    let [n_a, n_b, n_c] = bath_occupancies([bare.omega_a, bare.omega_b, bare.omega_c], bare.temperature)?;
    Ok(EffectiveConfig {
        delta_a: bare.delta_a,
        delta_b: bare.delta_b + 4.0 * bare.kerr_b * nb2 + bare.cross_kerr * nc2,
        delta_c: bare.delta_c + 4.0 * bare.kerr_c * nc2 + bare.cross_kerr * nb2,
        kerr_b: 2.0 * bare.kerr_b * nb2,
        kerr_c: 2.0 * bare.kerr_c * nc2,
        cross_kerr: bare.cross_kerr * (nb2 * nc2).sqrt(),
        g_ab: bare.g_ab,
        gamma_a: bare.gamma_a,
        gamma_b: bare.gamma_b,
        gamma_c: bare.gamma_c,
        n_a,
        n_b,
        n_c,
    })
}

/// Reference bare parameters (self-Kerr preset damping rates, no drive).
pub fn reference_bare() -> BareConfig {
    BareConfig {
        omega_a: Some(ghz(10.07)),
        omega_b: Some(ghz(9.86)),
        omega_c: Some(ghz(9.7845)),
        omega_d: Some(ghz(9.97)),
        delta_a: mhz(100.0),
        delta_b: mhz(-110.0),
        delta_c: mhz(-185.5),
        kerr_b: nhz(0.1),
        kerr_c: nhz(0.6),
        cross_kerr: nhz(0.5),
        g_ab: mhz(30.0),
        gamma_a: mhz(18.6),
        gamma_b: mhz(6.7),
        gamma_c: mhz(6.7),
        drive_b: 0.0,
        drive_c: 0.0,
        temperature: 0.0,
    }
}
