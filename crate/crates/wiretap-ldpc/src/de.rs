//! Coupled two-edge-type density evolution over the BEC, the single-system
//! reduction, fixed-point iteration and BP-threshold bisection.
//!
//! States hold one erasure probability per spatial position and edge type.
//! Positions outside `[-L, L]` are pinned to zero at every iteration. The
//! check-side factor profile is computed by one shared routine
//! ([`smoothed_check_factors`]) and variable-side powers are accumulated as
//! ordered products, so the two-edge system with `r1 == r2` and equal-type
//! inputs reproduces the single system with `l = l1 + l2` bit for bit.

use crate::ensemble::{EnsembleParams, Variant};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DeError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Per-position erasure probabilities for both edge types.
#[derive(Clone, Debug, PartialEq)]
pub struct DeState {
    /// Coupling half-length; positions run over `[-L, L]`.
    pub big_l: u32,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub iteration: u64,
}

impl DeState {
    /// All-`eps` initialization on `[-L, L]`.
    pub fn uniform(big_l: u32, eps: f64) -> Self {
        let n = 2 * big_l as usize + 1;
        Self {
            big_l,
            x1: vec![eps; n],
            x2: vec![eps; n],
            iteration: 0,
        }
    }

    /// Value at spatial position `pos` (zero outside `[-L, L]`).
    pub fn at(&self, edge_type: u8, pos: i64) -> f64 {
        let l = self.big_l as i64;
        if pos < -l || pos > l {
            return 0.0;
        }
        let idx = (pos + l) as usize;
        match edge_type {
            1 => self.x1[idx],
            2 => self.x2[idx],
            _ => panic!("edge type must be 1 or 2"),
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.x1
            .iter()
            .chain(self.x2.iter())
            .fold(0.0f64, |a, &b| a.max(b))
    }

    pub fn max_change(&self, other: &DeState) -> f64 {
        self.x1
            .iter()
            .zip(&other.x1)
            .chain(self.x2.iter().zip(&other.x2))
            .fold(0.0f64, |a, (&x, &y)| a.max((x - y).abs()))
    }
}

/// Iteration controls. `tol` is the L-infinity stopping tolerance between
/// successive states and `target_bit_er` the residual below which the run
/// counts as converged to zero.
#[derive(Clone, Copy, Debug)]
pub struct DeConfig {
    pub eps: f64,
    pub max_iters: u64,
    pub tol: f64,
    pub target_bit_er: f64,
}

impl DeConfig {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            max_iters: 100_000,
            tol: 1e-12,
            target_bit_er: 1e-10,
        }
    }
}

/// `base^exp` as a left-to-right product of `exp` factors. Keeping the
/// multiplication order fixed is what makes the two-edge/single-system
/// equality exact in floating point, not just analytically.
#[inline]
fn ordered_pow(base: f64, exp: u32, acc: f64) -> f64 {
    let mut out = acc;
    for _ in 0..exp {
        out *= base;
    }
    out
}

/// Check-factor profile of the smoothed system for one edge type:
/// `F_i = 1 - (1/w) * sum_p (1 - ybar_{i+p})^(r-1)` where
/// `ybar_q = (1/w) * sum_k x_{q-k}` averages the incoming window.
/// `x` covers positions `[-L, L]`; the result does too.
fn smoothed_check_factors(x: &[f64], big_l: u32, w: u32, r: u32) -> Vec<f64> {
    let l = big_l as i64;
    let w_i = w as i64;
    let n = x.len() as i64;
    debug_assert_eq!(n, 2 * l + 1);
    let at = |pos: i64| -> f64 {
        if pos < -l || pos > l {
            0.0
        } else {
            x[(pos + l) as usize]
        }
    };
    let inv_w = 1.0 / w as f64;
    // ybar over check positions [-L, L + w - 1].
    let ybar: Vec<f64> = (-l..=l + w_i - 1)
        .map(|q| {
            let mut s = 0.0;
            for k in 0..w_i {
                s += at(q - k);
            }
            s * inv_w
        })
        .collect();
    let pow_r1: Vec<f64> = ybar.iter().map(|&y| (1.0 - y).powi(r as i32 - 1)).collect();
    (-l..=l)
        .map(|i| {
            let mut s = 0.0;
            for p in 0..w_i {
                s += pow_r1[(i + p + l) as usize];
            }
            1.0 - s * inv_w
        })
        .collect()
}

/// One smoothed-system update of the single-type state with degree `l`.
pub fn de_step_single(x: &[f64], l: u32, r: u32, big_l: u32, w: u32, eps: f64) -> Vec<f64> {
    let f = smoothed_check_factors(x, big_l, w, r);
    f.iter()
        .map(|&fi| eps * ordered_pow(fi, l - 1, 1.0))
        .collect()
}

/// One update of the two-edge smoothed system. The type-j output takes the
/// type-1 factor to the power `l1 - [j == 1]` and the type-2 factor to the
/// power `l2 - [j == 2]`, with per-type check exponents `r_j - 1`.
pub fn de_step_smoothed(state: &DeState, p: &EnsembleParams, eps: f64) -> Result<DeState, DeError> {
    if p.variant != Variant::Smoothed {
        return Err(DeError::InvalidParams("expected smoothed variant".into()));
    }
    if p.l2 == 0 {
        return Err(DeError::InvalidParams(
            "two-edge density evolution needs l2 >= 1; use the single system".into(),
        ));
    }
    p.validate()
        .map_err(|e| DeError::InvalidParams(e.to_string()))?;
    let (big_l, w) = (p.big_l.unwrap(), p.w.unwrap());
    if big_l != state.big_l {
        return Err(DeError::InvalidParams("state length mismatch".into()));
    }
    let f1 = smoothed_check_factors(&state.x1, big_l, w, p.r1);
    let f2 = smoothed_check_factors(&state.x2, big_l, w, p.r2);
    let n = state.x1.len();
    let mut x1 = vec![0.0; n];
    let mut x2 = vec![0.0; n];
    for i in 0..n {
        // Ordered products: type-1 factors first, then type-2, so that with
        // f1 == f2 the sequences coincide with the single system's.
        x1[i] = eps * ordered_pow(f2[i], p.l2, ordered_pow(f1[i], p.l1 - 1, 1.0));
        x2[i] = eps * ordered_pow(f2[i], p.l2 - 1, ordered_pow(f1[i], p.l1, 1.0));
    }
    Ok(DeState {
        big_l,
        x1,
        x2,
        iteration: state.iteration + 1,
    })
}

/// Protograph density evolution state for the chain variant: one message per
/// (variable position, span offset, edge type).
#[derive(Clone, Debug)]
pub struct ChainDeState {
    pub big_l: u32,
    span1: i64,
    span2: i64,
    /// v2c[j][position][offset]; offsets run over [-span_j, span_j].
    v2c1: Vec<Vec<f64>>,
    v2c2: Vec<Vec<f64>>,
    pub iteration: u64,
}

impl ChainDeState {
    pub fn uniform(p: &EnsembleParams, eps: f64) -> Result<Self, DeError> {
        if p.variant != Variant::Chain {
            return Err(DeError::InvalidParams("expected chain variant".into()));
        }
        if p.l1 == 0 || p.l2 == 0 {
            return Err(DeError::InvalidParams(
                "chain density evolution needs both edge types".into(),
            ));
        }
        p.validate()
            .map_err(|e| DeError::InvalidParams(e.to_string()))?;
        let big_l = p.big_l.unwrap();
        let n = 2 * big_l as usize + 1;
        let span1 = (p.l1 as i64 - 1) / 2;
        let span2 = (p.l2 as i64 - 1) / 2;
        Ok(Self {
            big_l,
            span1,
            span2,
            v2c1: vec![vec![eps; 2 * span1 as usize + 1]; n],
            v2c2: vec![vec![eps; 2 * span2 as usize + 1]; n],
            iteration: 0,
        })
    }

    /// Per-position mean outgoing message for each type.
    pub fn to_state(&self) -> DeState {
        let mean = |rows: &Vec<Vec<f64>>| -> Vec<f64> {
            rows.iter()
                .map(|r| r.iter().sum::<f64>() / r.len() as f64)
                .collect()
        };
        DeState {
            big_l: self.big_l,
            x1: mean(&self.v2c1),
            x2: mean(&self.v2c2),
            iteration: self.iteration,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.v2c1
            .iter()
            .chain(self.v2c2.iter())
            .flat_map(|r| r.iter())
            .fold(0.0f64, |a, &b| a.max(b))
    }

    pub fn max_change(&self, other: &ChainDeState) -> f64 {
        let diff = |a: &[Vec<f64>], b: &[Vec<f64>]| -> f64 {
            a.iter()
                .zip(b)
                .flat_map(|(x, y)| x.iter().zip(y))
                .fold(0.0f64, |m, (&u, &v)| m.max((u - v).abs()))
        };
        diff(&self.v2c1, &other.v2c1).max(diff(&self.v2c2, &other.v2c2))
    }
}

/// Check-to-variable erasure messages for one type of the chain system.
///
/// A check at position q has `r/l` sockets reserved for each variable
/// position in `[q - s, q + s]`; boundary checks simply lack the
/// out-of-range groups. The erasure message toward a socket of origin
/// `q + o` is `1 - prod (1 - incoming)` over the check's other sockets,
/// computed as an explicit leave-one-out product (spans are tiny).
fn chain_check_messages(
    v2c: &[Vec<f64>],
    big_l: i64,
    span: i64,
    sockets_per_origin: u32,
) -> Vec<Vec<f64>> {
    // c2v[position][origin offset]: message from check at q to origin q + o.
    // Check positions occupy [-L - span, L + span].
    let ncheck = (2 * (big_l + span) + 1) as usize;
    let mut c2v = vec![vec![0.0f64; 2 * span as usize + 1]; ncheck];
    for (qi, out_row) in c2v.iter_mut().enumerate() {
        let q = qi as i64 - (big_l + span);
        for o in -span..=span {
            let u = q + o;
            if u < -big_l || u > big_l {
                continue;
            }
            let mut known = 1.0f64;
            for v in (q - span).max(-big_l)..=(q + span).min(big_l) {
                let xv = v2c[(v + big_l) as usize][(q - v + span) as usize];
                let e = if v == u {
                    sockets_per_origin - 1
                } else {
                    sockets_per_origin
                };
                known = ordered_pow(1.0 - xv, e, known);
            }
            out_row[(o + span) as usize] = 1.0 - known;
        }
    }
    c2v
}

/// One protograph update of the chain system.
pub fn de_step_chain(
    state: &ChainDeState,
    p: &EnsembleParams,
    eps: f64,
) -> Result<ChainDeState, DeError> {
    if p.variant != Variant::Chain {
        return Err(DeError::InvalidParams("expected chain variant".into()));
    }
    if p.l1 == 0 || p.l2 == 0 {
        return Err(DeError::InvalidParams(
            "chain density evolution needs both edge types".into(),
        ));
    }
    let big_l = state.big_l as i64;
    let (s1, s2) = (state.span1, state.span2);
    let c2v1 = chain_check_messages(&state.v2c1, big_l, s1, p.r1 / p.l1);
    let c2v2 = chain_check_messages(&state.v2c2, big_l, s2, p.r2 / p.l2);
    let n = state.v2c1.len();
    let mut next = state.clone();
    next.iteration += 1;
    let incoming = |c2v: &[Vec<f64>], span: i64, i: i64, o: i64| -> f64 {
        // Erasure message from the check at i + o back to variable i.
        let q = i + o;
        c2v[(q + big_l + span) as usize][(-o + span) as usize]
    };
    // Outgoing erasure on an edge is eps times the product of the erasure
    // messages on the variable's other edges (both types).
    for idx in 0..n {
        let i = idx as i64 - big_l;
        for o in -s1..=s1 {
            let mut prod = eps;
            for o2 in -s1..=s1 {
                if o2 != o {
                    prod *= incoming(&c2v1, s1, i, o2);
                }
            }
            for o2 in -s2..=s2 {
                prod *= incoming(&c2v2, s2, i, o2);
            }
            next.v2c1[idx][(o + s1) as usize] = prod;
        }
        for o in -s2..=s2 {
            let mut prod = eps;
            for o2 in -s1..=s1 {
                prod *= incoming(&c2v1, s1, i, o2);
            }
            for o2 in -s2..=s2 {
                if o2 != o {
                    prod *= incoming(&c2v2, s2, i, o2);
                }
            }
            next.v2c2[idx][(o + s2) as usize] = prod;
        }
    }
    Ok(next)
}

/// Outcome of a fixed-point iteration.
#[derive(Clone, Debug)]
pub struct DeRun {
    pub converged_to_zero: bool,
    /// Per-position residual (max over both types) at the final state.
    pub residual: Vec<f64>,
    pub iters: u64,
    /// Set when the iteration stopped at `max_iters` without meeting `tol`.
    pub hit_iteration_limit: bool,
    /// Residual-profile history (iteration, state) when tracing is on.
    pub trace: Vec<DeState>,
}

fn run_states<S, F, G, H>(
    initial: S,
    cfg: &DeConfig,
    step: F,
    residual: G,
    change: H,
    to_state: impl Fn(&S) -> DeState,
    trace: bool,
) -> DeRun
where
    S: Clone,
    F: Fn(&S) -> S,
    G: Fn(&S) -> f64,
    H: Fn(&S, &S) -> f64,
{
    let mut cur = initial;
    let mut iters = 0;
    let mut hit_limit = false;
    let mut history = Vec::new();
    if trace {
        history.push(to_state(&cur));
    }
    loop {
        if iters >= cfg.max_iters {
            hit_limit = true;
            break;
        }
        let next = step(&cur);
        iters += 1;
        let delta = change(&next, &cur);
        cur = next;
        if trace {
            history.push(to_state(&cur));
        }
        if delta < cfg.tol || residual(&cur) < cfg.target_bit_er {
            break;
        }
    }
    let final_state = to_state(&cur);
    let residual_profile: Vec<f64> = final_state
        .x1
        .iter()
        .zip(&final_state.x2)
        .map(|(&a, &b)| a.max(b))
        .collect();
    DeRun {
        converged_to_zero: residual(&cur) < cfg.target_bit_er,
        residual: residual_profile,
        iters,
        hit_iteration_limit: hit_limit,
        trace: history,
    }
}

/// Fixed-point iteration of the ensemble's density evolution from the
/// all-`eps` state. Non-convergence within `max_iters` is reported in the
/// result, not as an error.
pub fn run_de(p: &EnsembleParams, cfg: &DeConfig) -> Result<DeRun, DeError> {
    run_de_inner(p, cfg, false)
}

/// As [`run_de`], also recording the per-iteration state profiles.
pub fn run_de_traced(p: &EnsembleParams, cfg: &DeConfig) -> Result<DeRun, DeError> {
    run_de_inner(p, cfg, true)
}

fn run_de_inner(p: &EnsembleParams, cfg: &DeConfig, trace: bool) -> Result<DeRun, DeError> {
    if !(0.0..=1.0).contains(&cfg.eps) {
        return Err(DeError::InvalidParams(format!(
            "eps {} not in [0,1]",
            cfg.eps
        )));
    }
    match p.variant {
        Variant::Smoothed => {
            let state = DeState::uniform(p.big_l.unwrap(), cfg.eps);
            // Probe one step so parameter errors surface before the loop.
            de_step_smoothed(&state, p, cfg.eps)?;
            Ok(run_states(
                state,
                cfg,
                |s| de_step_smoothed(s, p, cfg.eps).expect("validated"),
                DeState::max_residual,
                DeState::max_change,
                Clone::clone,
                trace,
            ))
        }
        Variant::Chain => {
            let state = ChainDeState::uniform(p, cfg.eps)?;
            Ok(run_states(
                state,
                cfg,
                |s| de_step_chain(s, p, cfg.eps).expect("validated"),
                ChainDeState::max_residual,
                ChainDeState::max_change,
                ChainDeState::to_state,
                trace,
            ))
        }
        Variant::Uncoupled => {
            // Single position, width-1 smoothing: the uncoupled recursion.
            let q = EnsembleParams::smoothed(p.l1, p.l2, p.r1, p.r2, 0, 1);
            let state = DeState::uniform(0, cfg.eps);
            de_step_smoothed(&state, &q, cfg.eps)?;
            Ok(run_states(
                state,
                cfg,
                |s| de_step_smoothed(s, &q, cfg.eps).expect("validated"),
                DeState::max_residual,
                DeState::max_change,
                Clone::clone,
                trace,
            ))
        }
    }
}

/// Single-system run with degree `l`, used for the merged-recursion
/// equivalence checks.
pub fn run_de_single(l: u32, r: u32, big_l: u32, w: u32, cfg: &DeConfig) -> DeRun {
    let n = 2 * big_l as usize + 1;
    let initial = vec![cfg.eps; n];
    run_states(
        initial,
        cfg,
        |s| de_step_single(s, l, r, big_l, w, cfg.eps),
        |s| s.iter().fold(0.0f64, |a, &b| a.max(b)),
        |a, b| {
            a.iter()
                .zip(b)
                .fold(0.0f64, |m, (&x, &y)| m.max((x - y).abs()))
        },
        |s| DeState {
            big_l,
            x1: s.clone(),
            x2: s.clone(),
            iteration: 0,
        },
        false,
    )
}

/// BP threshold by bisection over the channel erasure probability.
///
/// Density evolution is monotone in `eps`, so the bracket `[0, 1]` stays
/// valid throughout; the returned value is the midpoint of the final
/// bracket.
pub fn bp_threshold(p: &EnsembleParams, cfg: &DeConfig, precision: f64) -> Result<f64, DeError> {
    assert!(precision > 0.0);
    let converges = |eps: f64| -> Result<bool, DeError> {
        let mut c = *cfg;
        c.eps = eps;
        Ok(run_de(p, &c)?.converged_to_zero)
    };
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    if converges(hi)? {
        return Ok(hi);
    }
    while hi - lo > precision {
        let mid = 0.5 * (lo + hi);
        if converges(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Single-system BP threshold, same bracket logic as [`bp_threshold`].
pub fn bp_threshold_single(
    l: u32,
    r: u32,
    big_l: u32,
    w: u32,
    cfg: &DeConfig,
    precision: f64,
) -> f64 {
    assert!(precision > 0.0);
    let converges = |eps: f64| -> bool {
        let mut c = *cfg;
        c.eps = eps;
        run_de_single(l, r, big_l, w, &c).converged_to_zero
    };
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    if converges(hi) {
        return hi;
    }
    while hi - lo > precision {
        let mid = 0.5 * (lo + hi);
        if converges(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// CSV lines `iter,position,x1,x2` for a traced run, prefixed by a schema
/// header comment. Values carry 12 significant digits.
pub fn profile_csv(run: &DeRun, stride: u64) -> String {
    let mut out = String::from("# wtldpc de-profile schema v1\niter,position,x1,x2\n");
    let stride = stride.max(1);
    for state in &run.trace {
        if state.iteration % stride != 0 && state.iteration != run.iters {
            continue;
        }
        let l = state.big_l as i64;
        for (idx, (&a, &b)) in state.x1.iter().zip(&state.x2).enumerate() {
            out.push_str(&format!(
                "{},{},{:.11e},{:.11e}\n",
                state.iteration,
                idx as i64 - l,
                a,
                b
            ));
        }
    }
    out
}
