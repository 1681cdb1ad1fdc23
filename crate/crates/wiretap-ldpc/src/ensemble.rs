//! Ensemble parameters, design-rate formulas, rate-equivocation region
//! geometry and degree selection.
//!
//! Degree selection follows the two regimes of the construction: a
//! perfect-secrecy branch for rates up to the secrecy capacity and a
//! high-rate branch above it. Design rates come from node counting on the
//! coupled ensembles; for the smoothed variant the boundary term accounts
//! for the expected number of check nodes that end up with no attached
//! variable.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EnsembleError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("rate {rate} outside ({lo}, {hi}]")]
    RateOutOfRange { rate: f64, lo: f64, hi: f64 },
    #[error("type-1 degree {l1} below 3; iterative-decoding guarantees need l1 >= 3")]
    DegreeTooSmall { l1: u32 },
}

/// Coupling structure of an ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// No coupling: a plain two-edge-type ensemble.
    Uncoupled,
    /// Protograph chain: one edge per neighboring position, span = degree.
    Chain,
    /// Randomized coupling with smoothing width `w`.
    Smoothed,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Uncoupled => "uncoupled",
            Variant::Chain => "chain",
            Variant::Smoothed => "smoothed",
        }
    }
}

/// Full specification of a code family: per-type variable degrees `l1`, `l2`,
/// check degrees `r1`, `r2`, coupling half-length `L`, smoothing width `w`
/// (smoothed variant only) and variables per position `M` (finite-length
/// sampling only).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnsembleParams {
    pub l1: u32,
    pub l2: u32,
    pub r1: u32,
    pub r2: u32,
    pub variant: Variant,
    pub big_l: Option<u32>,
    pub w: Option<u32>,
    pub m: Option<u32>,
}

impl EnsembleParams {
    pub fn uncoupled(l1: u32, l2: u32, r1: u32, r2: u32) -> Self {
        Self {
            l1,
            l2,
            r1,
            r2,
            variant: Variant::Uncoupled,
            big_l: None,
            w: None,
            m: None,
        }
    }

    pub fn chain(l1: u32, l2: u32, r1: u32, r2: u32, big_l: u32) -> Self {
        Self {
            l1,
            l2,
            r1,
            r2,
            variant: Variant::Chain,
            big_l: Some(big_l),
            w: None,
            m: None,
        }
    }

    pub fn smoothed(l1: u32, l2: u32, r1: u32, r2: u32, big_l: u32, w: u32) -> Self {
        Self {
            l1,
            l2,
            r1,
            r2,
            variant: Variant::Smoothed,
            big_l: Some(big_l),
            w: Some(w),
            m: None,
        }
    }

    pub fn with_m(mut self, m: u32) -> Self {
        self.m = Some(m);
        self
    }

    /// Validates degree positivity, coupling-field presence and `w <= 2L`.
    pub fn validate(&self) -> Result<(), EnsembleError> {
        if self.l1 == 0 || self.r1 == 0 || self.r2 == 0 {
            return Err(EnsembleError::InvalidParams(
                "degrees l1, r1, r2 must be positive".into(),
            ));
        }
        match self.variant {
            Variant::Uncoupled => {
                if self.big_l.is_some() || self.w.is_some() {
                    return Err(EnsembleError::InvalidParams(
                        "uncoupled ensembles take no L or w".into(),
                    ));
                }
            }
            Variant::Chain => {
                if self.big_l.is_none() {
                    return Err(EnsembleError::InvalidParams("chain requires L".into()));
                }
                if self.w.is_some() {
                    return Err(EnsembleError::InvalidParams(
                        "chain variant has no smoothing width".into(),
                    ));
                }
                for (l, r) in [(self.l1, self.r1), (self.l2, self.r2)] {
                    if l > 0 && (l % 2 == 0 || r % l != 0) {
                        return Err(EnsembleError::InvalidParams(format!(
                            "chain variant needs odd per-position spans and l | r; got l={l}, r={r}"
                        )));
                    }
                }
            }
            Variant::Smoothed => {
                let (Some(big_l), Some(w)) = (self.big_l, self.w) else {
                    return Err(EnsembleError::InvalidParams(
                        "smoothed requires L and w".into(),
                    ));
                };
                if w == 0 {
                    return Err(EnsembleError::InvalidParams("w must be positive".into()));
                }
                // w = 1 couples nothing and is valid at any L (including 0);
                // actual smoothing needs w <= 2L.
                if w > 1 && w > 2 * big_l {
                    return Err(EnsembleError::InvalidParams(format!(
                        "smoothing width w={w} exceeds 2L={}",
                        2 * big_l
                    )));
                }
            }
        }
        Ok(())
    }

    /// Blocklength of a sampled instance, `M * (2L + 1)`.
    pub fn blocklength(&self) -> Option<u64> {
        let m = self.m? as u64;
        let positions = match self.variant {
            Variant::Uncoupled => 1,
            _ => 2 * self.big_l? as u64 + 1,
        };
        Some(m * positions)
    }
}

/// Erasure wiretap channel: main channel `eps_m`, wiretapper `eps_w`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WiretapChannelSpec {
    pub eps_m: f64,
    pub eps_w: f64,
}

impl WiretapChannelSpec {
    /// Requires `0 <= eps_m <= eps_w <= 1` (degraded wiretapper).
    pub fn new(eps_m: f64, eps_w: f64) -> Result<Self, EnsembleError> {
        if !(0.0..=1.0).contains(&eps_m) || !(0.0..=1.0).contains(&eps_w) || eps_w < eps_m {
            return Err(EnsembleError::InvalidParams(format!(
                "need 0 <= eps_m <= eps_w <= 1, got ({eps_m}, {eps_w})"
            )));
        }
        Ok(Self { eps_m, eps_w })
    }

    pub fn capacity_main(&self) -> f64 {
        1.0 - self.eps_m
    }

    pub fn capacity_wiretap(&self) -> f64 {
        1.0 - self.eps_w
    }

    /// Secrecy capacity `C_m - C_w`.
    pub fn secrecy_capacity(&self) -> f64 {
        self.capacity_main() - self.capacity_wiretap()
    }
}

/// A point of the rate-equivocation plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionPoint {
    pub rate: f64,
    pub equivocation: f64,
}

impl RegionPoint {
    /// Feasibility: `Re <= R <= C_m` and `0 <= Re <= C_m - C_w`.
    pub fn is_feasible(&self, ch: &WiretapChannelSpec) -> bool {
        let tol = 1e-12;
        self.equivocation >= -tol
            && self.equivocation <= self.rate + tol
            && self.rate <= ch.capacity_main() + tol
            && self.equivocation <= ch.secrecy_capacity() + tol
    }
}

/// Boundary polyline of the achievable region, corner points included:
/// equivocation equals rate up to the secrecy capacity, then stays flat
/// until the main-channel capacity.
pub fn region_boundary(ch: &WiretapChannelSpec, samples: usize) -> Vec<RegionPoint> {
    assert!(samples >= 2, "need at least two samples");
    let cm = ch.capacity_main();
    let cs = ch.secrecy_capacity();
    (0..samples)
        .map(|i| {
            let rate = cm * i as f64 / (samples - 1) as f64;
            RegionPoint {
                rate,
                equivocation: rate.min(cs),
            }
        })
        .collect()
}

/// Per-type boundary deficit `(w + 1 - 2 * sum_{i=0}^{w} (i/w)^r) / (2L + 1)`:
/// the expected check-count correction at the coupling boundary, relative to
/// one check group per position.
pub fn boundary_deficit(big_l: u32, w: u32, r: u32) -> f64 {
    let w_f = w as f64;
    let sum: f64 = (0..=w).map(|i| (i as f64 / w_f).powi(r as i32)).sum();
    (w_f + 1.0 - 2.0 * sum) / (2.0 * big_l as f64 + 1.0)
}

fn smoothed_deficits(p: &EnsembleParams) -> Result<(f64, f64), EnsembleError> {
    if p.variant != Variant::Smoothed {
        return Err(EnsembleError::InvalidParams(
            "design-rate formulas apply to the smoothed variant".into(),
        ));
    }
    p.validate()?;
    let (big_l, w) = (p.big_l.unwrap(), p.w.unwrap());
    Ok((
        boundary_deficit(big_l, w, p.r1),
        boundary_deficit(big_l, w, p.r2),
    ))
}

/// Design rate of the full smoothed ensemble by node counting:
/// `1 - (l1/r1)(1 + d1) - (l2/r2)(1 + d2)` with the per-type boundary
/// deficits `d_j`. Coupling adds boundary checks, so the rate is below the
/// uncoupled value `1 - l1/r1 - l2/r2` and increases back to it with `L`.
pub fn design_rate_total(p: &EnsembleParams) -> Result<f64, EnsembleError> {
    let (d1, d2) = smoothed_deficits(p)?;
    let f1 = p.l1 as f64 / p.r1 as f64;
    let f2 = p.l2 as f64 / p.r2 as f64;
    Ok(1.0 - f1 * (1.0 + d1) - f2 * (1.0 + d2))
}

/// Design rate of the coset scheme: the number of type-2 check nodes
/// connected to at least one variable, per variable node. Equals
/// `(l2/r2)(1 + d2)`; the boundary spread adds type-2 checks, so the value
/// lies above `l2/r2` and decreases to it as `L` grows.
pub fn design_rate_wiretap(p: &EnsembleParams) -> Result<f64, EnsembleError> {
    let (_, d2) = smoothed_deficits(p)?;
    Ok((p.l2 as f64 / p.r2 as f64) * (1.0 + d2))
}

/// Nominal rate of the chain variant: type-2 checks occupy `2L + l2`
/// positions (span `l2`, odd), each holding `M * l2 / r2` of them, giving
/// `(l2/r2) * (2L + l2) / (2L + 1)`.
pub fn nominal_rate_chain(p: &EnsembleParams) -> Result<f64, EnsembleError> {
    if p.variant != Variant::Chain {
        return Err(EnsembleError::InvalidParams(
            "nominal_rate_chain applies to the chain variant".into(),
        ));
    }
    p.validate()?;
    let big_l = p.big_l.unwrap() as f64;
    Ok((p.l2 as f64 / p.r2 as f64) * (2.0 * big_l + p.l2 as f64) / (2.0 * big_l + 1.0))
}

/// Ceiling with a relative guard against floating-point residue: values
/// within 1e-9 of an integer are treated as that integer.
fn ceil_tol(x: f64) -> u32 {
    if (x - x.round()).abs() < 1e-9 {
        x.round() as u32
    } else {
        x.ceil() as u32
    }
}

/// Structured warning from degree selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionWarning {
    /// Ceiling collision left no type-2 checks: the code carries no secret
    /// bits. Callers may retry with a larger check degree.
    NoSecretBits,
}

#[derive(Clone, Debug)]
pub struct DegreeSelection {
    pub params: EnsembleParams,
    pub warning: Option<SelectionWarning>,
}

/// Perfect-secrecy regime, `0 < R <= C_m - C_w`:
/// `l1 = ceil((1 - C_w - R) r)`, `l2 = ceil((1 - C_w) r) - l1`, `r1 = r2 = r`.
pub fn select_degrees_secrecy(
    ch: &WiretapChannelSpec,
    rate: f64,
    r: u32,
) -> Result<DegreeSelection, EnsembleError> {
    let cs = ch.secrecy_capacity();
    if !(rate > 0.0 && rate <= cs) {
        return Err(EnsembleError::RateOutOfRange {
            rate,
            lo: 0.0,
            hi: cs,
        });
    }
    let cw = ch.capacity_wiretap();
    let l1 = ceil_tol((1.0 - cw - rate) * r as f64);
    let l2 = ceil_tol((1.0 - cw) * r as f64) - l1;
    if l1 < 3 {
        return Err(EnsembleError::DegreeTooSmall { l1 });
    }
    Ok(DegreeSelection {
        params: EnsembleParams::uncoupled(l1, l2, r, r),
        warning: (l2 == 0).then_some(SelectionWarning::NoSecretBits),
    })
}

/// High-rate regime, `C_m - C_w < R <= C_m`:
/// `l1 = ceil((1 - C_m) r)`, `l2 = ceil(R r)`, targetting equivocation
/// `C_m - C_w`.
pub fn select_degrees_high_rate(
    ch: &WiretapChannelSpec,
    rate: f64,
    r: u32,
) -> Result<DegreeSelection, EnsembleError> {
    let cs = ch.secrecy_capacity();
    let cm = ch.capacity_main();
    if !(rate > cs && rate <= cm) {
        return Err(EnsembleError::RateOutOfRange {
            rate,
            lo: cs,
            hi: cm,
        });
    }
    let l1 = ceil_tol((1.0 - cm) * r as f64);
    let l2 = ceil_tol(rate * r as f64);
    Ok(DegreeSelection {
        params: EnsembleParams::uncoupled(l1, l2, r, r),
        warning: (l2 == 0).then_some(SelectionWarning::NoSecretBits),
    })
}

/// Parameter bundle serialized by the flat key-value config format.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CodeConfig {
    pub params: EnsembleParams,
    pub channel: Option<WiretapChannelSpec>,
}

impl CodeConfig {
    /// Serializes with fixed key order
    /// `l1,l2,r1,r2,L,w,M,variant,eps_m,eps_w`; absent optional fields are
    /// omitted.
    pub fn to_config_string(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        out.push_str(&format!("l1={}\n", p.l1));
        out.push_str(&format!("l2={}\n", p.l2));
        out.push_str(&format!("r1={}\n", p.r1));
        out.push_str(&format!("r2={}\n", p.r2));
        if let Some(l) = p.big_l {
            out.push_str(&format!("L={l}\n"));
        }
        if let Some(w) = p.w {
            out.push_str(&format!("w={w}\n"));
        }
        if let Some(m) = p.m {
            out.push_str(&format!("M={m}\n"));
        }
        out.push_str(&format!("variant={}\n", p.variant.as_str()));
        if let Some(ch) = &self.channel {
            out.push_str(&format!("eps_m={}\n", ch.eps_m));
            out.push_str(&format!("eps_w={}\n", ch.eps_w));
        }
        out
    }

    pub fn from_config_string(text: &str) -> Result<Self, EnsembleError> {
        let mut seen = std::collections::HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                EnsembleError::InvalidParams(format!("line {}: expected key=value", lineno + 1))
            })?;
            if seen.insert(key.to_string(), value.to_string()).is_some() {
                return Err(EnsembleError::InvalidParams(format!("duplicate key {key}")));
            }
        }
        let get_u32 = |k: &str| -> Result<Option<u32>, EnsembleError> {
            seen.get(k)
                .map(|v| {
                    v.parse::<u32>().map_err(|_| {
                        EnsembleError::InvalidParams(format!("bad value for {k}: {v}"))
                    })
                })
                .transpose()
        };
        let get_f64 = |k: &str| -> Result<Option<f64>, EnsembleError> {
            seen.get(k)
                .map(|v| {
                    v.parse::<f64>().map_err(|_| {
                        EnsembleError::InvalidParams(format!("bad value for {k}: {v}"))
                    })
                })
                .transpose()
        };
        let known = [
            "l1", "l2", "r1", "r2", "L", "w", "M", "variant", "eps_m", "eps_w",
        ];
        for k in seen.keys() {
            if !known.contains(&k.as_str()) {
                return Err(EnsembleError::InvalidParams(format!("unknown key {k}")));
            }
        }
        let req = |k: &str| -> Result<u32, EnsembleError> {
            get_u32(k)?.ok_or_else(|| EnsembleError::InvalidParams(format!("missing key {k}")))
        };
        let variant = match seen.get("variant").map(String::as_str) {
            Some("uncoupled") => Variant::Uncoupled,
            Some("chain") => Variant::Chain,
            Some("smoothed") => Variant::Smoothed,
            Some(v) => {
                return Err(EnsembleError::InvalidParams(format!("unknown variant {v}")));
            }
            None => return Err(EnsembleError::InvalidParams("missing key variant".into())),
        };
        let params = EnsembleParams {
            l1: req("l1")?,
            l2: req("l2")?,
            r1: req("r1")?,
            r2: req("r2")?,
            variant,
            big_l: get_u32("L")?,
            w: get_u32("w")?,
            m: get_u32("M")?,
        };
        params.validate()?;
        let channel = match (get_f64("eps_m")?, get_f64("eps_w")?) {
            (Some(m), Some(w)) => Some(WiretapChannelSpec::new(m, w)?),
            (None, None) => None,
            _ => {
                return Err(EnsembleError::InvalidParams(
                    "eps_m and eps_w must appear together".into(),
                ))
            }
        };
        Ok(Self { params, channel })
    }
}
