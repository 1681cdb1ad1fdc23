//! End-to-end finite-length wiretap experiments: coset encoding, BEC
//! transmission, peeling decoding for the legitimate receiver and exact
//! rank-based equivocation for the wiretapper, plus Monte Carlo aggregation.
//!
//! Equivocation is measured exactly. For a linear coset code observed
//! through erasures, conditional entropies are subspace dimensions:
//! with `E` the erased set,
//! `H(X|Z) = |E| - rank(H1_E)`, `H(X|S,Z) = |E| - rank(H_E)` and
//! `H(S|Z) = rank(H_E) - rank(H1_E)` bits, where `H = [H1; H2]` and `M_E`
//! selects the erased columns.

use crate::ensemble::{self, EnsembleParams, Variant, WiretapChannelSpec};
use crate::gf2::{BitMatrix, BitVec, Gf2Error};
use crate::sampler;
use crate::seeding;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WiretapError {
    #[error("shape mismatch: {0}")]
    ShapeError(String),
    #[error("known bits violate a parity check")]
    Inconsistent,
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error("sampling failed: {0}")]
    Sampler(#[from] sampler::SamplerError),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Indices a receiver did not observe.
#[derive(Clone, Debug)]
pub struct ErasurePattern {
    mask: BitVec,
}

impl ErasurePattern {
    pub fn from_indices(n: usize, indices: &[usize]) -> Self {
        let mut mask = BitVec::zeros(n);
        for &i in indices {
            mask.set(i, true);
        }
        Self { mask }
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn count(&self) -> usize {
        self.mask.count_ones()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask.get(i)
    }

    pub fn indices(&self) -> Vec<usize> {
        self.mask.iter_ones().collect()
    }
}

/// A partially erased word: `values` holds the known bits, zeros elsewhere.
#[derive(Clone, Debug)]
pub struct ChannelOutput {
    pub values: BitVec,
    pub pattern: ErasurePattern,
}

/// Independent erasures with probability `eps`.
pub fn transmit_bec<R: Rng + ?Sized>(x: &BitVec, eps: f64, rng: &mut R) -> ChannelOutput {
    let n = x.len();
    let mut mask = BitVec::zeros(n);
    let mut values = BitVec::zeros(n);
    for i in 0..n {
        if rng.random::<f64>() < eps {
            mask.set(i, true);
        } else if x.get(i) {
            values.set(i, true);
        }
    }
    ChannelOutput {
        values,
        pattern: ErasurePattern { mask },
    }
}

/// A coset code built from the two parity-check blocks.
///
/// Messages live in the quotient of the type-1 code by the full code; the
/// message map fixes `secret_dim` syndrome coordinates of `H2` (the pivot
/// columns of the reduced basis of the reachable syndrome space), so it is
/// well defined even when rows are dependent and the coset count is below
/// its nominal value.
pub struct CosetCode {
    h1: BitMatrix,
    h2: BitMatrix,
    h: BitMatrix,
    rank_h1: usize,
    rank_h: usize,
    secret_dim: usize,
    /// Basis of the type-1 code (nullspace of `H1`), one vector per row.
    code1_basis: BitMatrix,
    /// Reduced basis of the reachable `H2`-syndrome space.
    syndrome_basis: BitMatrix,
    /// Pivot columns of `syndrome_basis`: the secret coordinates.
    secret_coords: Vec<usize>,
    /// Rows expressing each syndrome-basis row in `code1_basis` coordinates.
    encode_rows: BitMatrix,
    /// Coordinates of the full code inside `code1_basis`: the encoder's
    /// randomization space.
    kernel_rows: BitMatrix,
}

impl CosetCode {
    pub fn new(h1: BitMatrix, h2: BitMatrix) -> Result<Self, WiretapError> {
        if h1.cols() != h2.cols() {
            return Err(WiretapError::ShapeError(format!(
                "H1 has {} columns, H2 has {}",
                h1.cols(),
                h2.cols()
            )));
        }
        let n = h1.cols();
        let h = h1.stack(&h2)?;
        let code1_basis = h1.nullspace_basis();
        let nullity = code1_basis.rows();
        let rank_h1 = n - nullity;
        // W[i][j] = <basis_i, H2 row j>, assembled row-sparse through the
        // transpose of the basis.
        let basis_t = code1_basis.transpose();
        let m2 = h2.rows();
        let mut w_t = BitMatrix::zeros(m2, nullity);
        for j in 0..m2 {
            let row = h2.row_as_bitvec(j);
            for c in row.iter_ones() {
                for k in basis_t.row_as_bitvec(c).iter_ones() {
                    w_t.flip(j, k);
                }
            }
        }
        let w = w_t.transpose();
        // RREF of [W | I] splits into the syndrome basis, its expression in
        // basis coordinates, and the kernel (the full code's coordinates).
        let mut aug = BitMatrix::zeros(nullity, m2 + nullity);
        for i in 0..nullity {
            for c in w.row_as_bitvec(i).iter_ones() {
                aug.set(i, c, true);
            }
            aug.set(i, m2 + i, true);
        }
        let rref = aug.reduced_row_echelon();
        let secret_dim = rref.pivot_cols.iter().filter(|&&c| c < m2).count();
        let rank_h = rank_h1 + secret_dim;
        debug_assert_eq!(rank_h, h.rank());
        let mut syndrome_basis = BitMatrix::zeros(secret_dim, m2);
        let mut encode_rows = BitMatrix::zeros(secret_dim, nullity);
        let mut secret_coords = Vec::with_capacity(secret_dim);
        for i in 0..secret_dim {
            secret_coords.push(rref.pivot_cols[i]);
            let row = rref.transformed.row_as_bitvec(i);
            for c in row.iter_ones() {
                if c < m2 {
                    syndrome_basis.set(i, c, true);
                } else {
                    encode_rows.set(i, c - m2, true);
                }
            }
        }
        let kernel_dim = nullity - secret_dim;
        let mut kernel_rows = BitMatrix::zeros(kernel_dim, nullity);
        for i in 0..kernel_dim {
            let row = rref.transformed.row_as_bitvec(secret_dim + i);
            for c in row.iter_ones() {
                debug_assert!(c >= m2, "kernel row with syndrome support");
                kernel_rows.set(i, c - m2, true);
            }
        }
        Ok(Self {
            h1,
            h2,
            h,
            rank_h1,
            rank_h,
            secret_dim,
            code1_basis,
            syndrome_basis,
            secret_coords,
            encode_rows,
            kernel_rows,
        })
    }

    pub fn from_graph(g: &sampler::TannerGraph) -> Result<Self, WiretapError> {
        let (h1, h2) = g.to_parity_matrices();
        Self::new(h1, h2)
    }

    pub fn n(&self) -> usize {
        self.h1.cols()
    }

    pub fn h1(&self) -> &BitMatrix {
        &self.h1
    }

    pub fn h2(&self) -> &BitMatrix {
        &self.h2
    }

    /// The stacked matrix `[H1; H2]`.
    pub fn h_full(&self) -> &BitMatrix {
        &self.h
    }

    pub fn rank_h1(&self) -> usize {
        self.rank_h1
    }

    pub fn rank_h(&self) -> usize {
        self.rank_h
    }

    /// Message length in bits: `rank([H1;H2]) - rank(H1)`.
    pub fn secret_dim(&self) -> usize {
        self.secret_dim
    }

    /// Actual rate `secret_dim / n`.
    pub fn actual_rate(&self) -> f64 {
        self.secret_dim as f64 / self.n() as f64
    }

    /// The fixed syndrome coordinates carrying the message.
    pub fn secret_coords(&self) -> &[usize] {
        &self.secret_coords
    }

    /// Encodes `s` as a uniformly random solution of
    /// `H1 x = 0, H2 x = sigma(s)`.
    pub fn encode<R: Rng + ?Sized>(&self, s: &BitVec, rng: &mut R) -> Result<BitVec, WiretapError> {
        if s.len() != self.secret_dim {
            return Err(WiretapError::ShapeError(format!(
                "message length {} != secret_dim {}",
                s.len(),
                self.secret_dim
            )));
        }
        let nullity = self.code1_basis.rows();
        let mut y = BitVec::zeros(nullity);
        for i in 0..self.secret_dim {
            if s.get(i) {
                y.xor_assign(&self.encode_rows.row_as_bitvec(i));
            }
        }
        for k in 0..self.kernel_rows.rows() {
            if rng.random::<bool>() {
                y.xor_assign(&self.kernel_rows.row_as_bitvec(k));
            }
        }
        let mut x = BitVec::zeros(self.n());
        for i in y.iter_ones() {
            x.xor_assign(&self.code1_basis.row_as_bitvec(i));
        }
        debug_assert!(self.h1.mul_vec(&x)?.is_zero());
        debug_assert_eq!(self.decode_secret(&x)?, *s);
        Ok(x)
    }

    /// Message carried by a full codeword: the secret coordinates of `H2 x`.
    pub fn decode_secret(&self, x: &BitVec) -> Result<BitVec, WiretapError> {
        let syndrome = self.h2.mul_vec(x)?;
        let mut s = BitVec::zeros(self.secret_dim);
        for (i, &c) in self.secret_coords.iter().enumerate() {
            if syndrome.get(c) {
                s.set(i, true);
            }
        }
        Ok(s)
    }

    /// The `H2`-syndrome corresponding to a message.
    pub fn syndrome_of(&self, s: &BitVec) -> BitVec {
        let mut sigma = BitVec::zeros(self.h2.rows());
        for i in 0..self.secret_dim {
            if s.get(i) {
                sigma.xor_assign(&self.syndrome_basis.row_as_bitvec(i));
            }
        }
        sigma
    }
}

/// Result of peeling: full resolution or the residual erased set, which is
/// a stopping set of the matrix.
#[derive(Clone, Debug)]
pub enum PeelOutcome {
    Resolved(BitVec),
    Stuck(Vec<usize>),
}

/// Iterative erasure decoding on one parity system: repeatedly resolves the
/// unique erased participant of any check, flagging `Inconsistent` when a
/// fully known check has odd parity.
pub fn peel_decode(h: &BitMatrix, y: &ChannelOutput) -> Result<PeelOutcome, WiretapError> {
    let n = h.cols();
    if y.values.len() != n {
        return Err(WiretapError::ShapeError(format!(
            "word length {} != {} columns",
            y.values.len(),
            n
        )));
    }
    let rows = h.rows();
    let mut check_vars: Vec<Vec<u32>> = Vec::with_capacity(rows);
    let mut var_checks: Vec<Vec<u32>> = vec![Vec::new(); n];
    for r in 0..rows {
        let vars: Vec<u32> = h.row_as_bitvec(r).iter_ones().map(|v| v as u32).collect();
        for &v in &vars {
            var_checks[v as usize].push(r as u32);
        }
        check_vars.push(vars);
    }
    let mut erased: Vec<bool> = (0..n).map(|i| y.pattern.contains(i)).collect();
    let mut value: Vec<bool> = (0..n).map(|i| y.values.get(i)).collect();
    let mut unresolved: Vec<u32> = vec![0; rows];
    let mut acc: Vec<bool> = vec![false; rows];
    for r in 0..rows {
        for &v in &check_vars[r] {
            if erased[v as usize] {
                unresolved[r] += 1;
            } else {
                acc[r] ^= value[v as usize];
            }
        }
    }
    let mut queue: Vec<u32> = Vec::new();
    for r in 0..rows {
        match unresolved[r] {
            0 if acc[r] => return Err(WiretapError::Inconsistent),
            1 => queue.push(r as u32),
            _ => {}
        }
    }
    let mut remaining = erased.iter().filter(|&&e| e).count();
    while let Some(r) = queue.pop() {
        let r = r as usize;
        if unresolved[r] != 1 {
            continue;
        }
        let v = *check_vars[r]
            .iter()
            .find(|&&v| erased[v as usize])
            .expect("one unresolved variable") as usize;
        let bit = acc[r];
        erased[v] = false;
        value[v] = bit;
        remaining -= 1;
        for &c in &var_checks[v] {
            let c = c as usize;
            unresolved[c] -= 1;
            if bit {
                acc[c] = !acc[c];
            }
            match unresolved[c] {
                0 => {
                    if acc[c] {
                        return Err(WiretapError::Inconsistent);
                    }
                }
                1 => queue.push(c as u32),
                _ => {}
            }
        }
    }
    if remaining == 0 {
        let mut x = BitVec::zeros(n);
        for (i, &b) in value.iter().enumerate() {
            if b {
                x.set(i, true);
            }
        }
        Ok(PeelOutcome::Resolved(x))
    } else {
        Ok(PeelOutcome::Stuck(
            erased
                .iter()
                .enumerate()
                .filter_map(|(i, &e)| e.then_some(i))
                .collect(),
        ))
    }
}

/// Audits that `set` is a stopping set of the matrix: every row meets it in
/// zero or at least two columns.
pub fn is_stopping_set(h: &BitMatrix, set: &[usize]) -> bool {
    let mut mask = BitVec::zeros(h.cols());
    for &v in set {
        mask.set(v, true);
    }
    (0..h.rows()).all(|r| {
        let row = h.row_as_bitvec(r);
        let hits = row.iter_ones().filter(|&c| mask.get(c)).count();
        hits != 1
    })
}

/// Peeling on `H1` alone; on success the recovered word yields the message.
pub fn bob_decode(code: &CosetCode, y: &ChannelOutput) -> Result<Option<BitVec>, WiretapError> {
    match peel_decode(code.h1(), y)? {
        PeelOutcome::Resolved(x) => Ok(Some(code.decode_secret(&x)?)),
        PeelOutcome::Stuck(_) => Ok(None),
    }
}

/// Maximum-likelihood reference decoder for validation at small blocklength:
/// the erased coordinates are recoverable exactly when the erased columns of
/// `H1` are independent.
pub fn bob_decode_ml(code: &CosetCode, y: &ChannelOutput) -> Result<Option<BitVec>, WiretapError> {
    let n = code.n();
    if n > 64 {
        return Err(WiretapError::InvalidParams(
            "reference decoder limited to n <= 64".into(),
        ));
    }
    let erased = y.pattern.indices();
    let h1 = code.h1();
    if h1.rank_of_columns(&erased)? < erased.len() {
        return Ok(None);
    }
    // Solve H1_E x_E = H1 y_known (y has zeros at erasures).
    let rhs = h1.mul_vec(&y.values)?;
    let sub = h1.select_columns(&erased)?;
    let Some(xe) = sub.solve_affine(&rhs)? else {
        return Err(WiretapError::Inconsistent);
    };
    let mut x = y.values.clone();
    for (k, &i) in erased.iter().enumerate() {
        if xe.get(k) {
            x.set(i, true);
        }
    }
    debug_assert!(h1.mul_vec(&x)?.is_zero());
    Ok(Some(code.decode_secret(&x)?))
}

/// Exact per-pattern conditional entropies, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EquivocationTrial {
    pub h_s_given_z: u64,
    pub h_x_given_z: u64,
    pub h_x_given_sz: u64,
}

/// Rank-based exact equivocation for one erasure pattern.
pub fn exact_equivocation(
    code: &CosetCode,
    pattern: &ErasurePattern,
) -> Result<EquivocationTrial, WiretapError> {
    let erased = pattern.indices();
    let a = code.h1().rank_of_columns(&erased)?;
    let b = code.h_full().rank_of_columns(&erased)?;
    let e = erased.len() as u64;
    let trial = EquivocationTrial {
        h_s_given_z: (b - a) as u64,
        h_x_given_z: e - a as u64,
        h_x_given_sz: e - b as u64,
    };
    // Chain rule holds by construction; bounds are real checks.
    debug_assert_eq!(trial.h_s_given_z + trial.h_x_given_sz, trial.h_x_given_z);
    debug_assert!(trial.h_s_given_z as usize <= code.secret_dim());
    Ok(trial)
}

/// Mean and standard error of one aggregated quantity.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MeanStderr {
    pub mean: f64,
    pub stderr: f64,
}

fn mean_stderr(values: impl Iterator<Item = f64> + Clone) -> MeanStderr {
    let n = values.clone().count();
    if n == 0 {
        return MeanStderr {
            mean: f64::NAN,
            stderr: f64::NAN,
        };
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return MeanStderr { mean, stderr: 0.0 };
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    MeanStderr {
        mean,
        stderr: (var / n as f64).sqrt(),
    }
}

/// Aggregate equivocation statistics (all quantities normalized per use
/// where noted).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EquivocationReport {
    pub n: usize,
    pub trials: usize,
    /// H(S|Z) in bits.
    pub h_s_given_z: MeanStderr,
    pub h_x_given_z: MeanStderr,
    pub h_x_given_sz: MeanStderr,
}

impl EquivocationReport {
    pub fn from_trials(n: usize, trials: &[EquivocationTrial]) -> Self {
        Self {
            n,
            trials: trials.len(),
            h_s_given_z: mean_stderr(trials.iter().map(|t| t.h_s_given_z as f64)),
            h_x_given_z: mean_stderr(trials.iter().map(|t| t.h_x_given_z as f64)),
            h_x_given_sz: mean_stderr(trials.iter().map(|t| t.h_x_given_sz as f64)),
        }
    }
}

/// Per-trial record of a Monte Carlo campaign.
#[derive(Clone, Debug)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub secret_dim: usize,
    pub erased_count_bob: usize,
    pub erased_count_eve: usize,
    pub bob_ok: bool,
    pub equivocation: EquivocationTrial,
}

#[derive(Clone, Copy, Debug)]
pub struct CampaignConfig {
    pub trials: usize,
    pub seed: u64,
    /// Sample one code and reuse it for every trial instead of drawing a
    /// fresh instance per trial.
    pub fixed_code: bool,
}

impl CampaignConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            fixed_code: false,
        }
    }
}

/// Campaign summary; rates are per channel use.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CampaignSummary {
    pub trials: usize,
    pub completed: usize,
    pub pe_bob: f64,
    pub re_mean: f64,
    pub re_stderr: f64,
    pub r_actual_mean: f64,
}

#[derive(Debug)]
pub struct CampaignResult {
    pub records: Vec<TrialRecord>,
    /// Non-fatal per-trial failures (trial index, description).
    pub errors: Vec<(usize, String)>,
    pub summary: CampaignSummary,
}

fn run_trial(
    p: &EnsembleParams,
    ch: &WiretapChannelSpec,
    shared_code: Option<&CosetCode>,
    trial: usize,
    seed: u64,
) -> Result<TrialRecord, WiretapError> {
    let mut rng = seeding::root_rng(seed);
    let fresh;
    let code = match shared_code {
        Some(c) => c,
        None => {
            let g = sampler::sample(p, &mut rng)?;
            fresh = CosetCode::from_graph(&g)?;
            &fresh
        }
    };
    let s = BitVec::random(code.secret_dim(), &mut rng);
    let x = code.encode(&s, &mut rng)?;
    let to_bob = transmit_bec(&x, ch.eps_m, &mut rng);
    let to_eve = transmit_bec(&x, ch.eps_w, &mut rng);
    let bob = bob_decode(code, &to_bob)?;
    let bob_ok = bob.as_ref() == Some(&s);
    let equivocation = exact_equivocation(code, &to_eve.pattern)?;
    if equivocation.h_s_given_z + equivocation.h_x_given_sz != equivocation.h_x_given_z {
        return Err(WiretapError::InvalidParams(
            "entropy chain rule violated".into(),
        ));
    }
    Ok(TrialRecord {
        trial,
        seed,
        n: code.n(),
        secret_dim: code.secret_dim(),
        erased_count_bob: to_bob.pattern.count(),
        erased_count_eve: to_eve.pattern.count(),
        bob_ok,
        equivocation,
    })
}

/// Runs `trials` independent wiretap transmissions.
///
/// Trial `i` derives its seed as `derive_seed(seed, i + 1)`; a fixed-code
/// campaign reserves index 0 for the shared instance. Trials run in a
/// parallel pool; records are collected by trial index, so the output is
/// identical for any worker count.
pub fn run_campaign(
    p: &EnsembleParams,
    ch: &WiretapChannelSpec,
    cfg: &CampaignConfig,
) -> Result<CampaignResult, WiretapError> {
    p.validate()
        .map_err(|e| WiretapError::InvalidParams(e.to_string()))?;
    let shared = if cfg.fixed_code {
        let mut rng = seeding::task_rng(cfg.seed, 0);
        let g = sampler::sample(p, &mut rng)?;
        Some(CosetCode::from_graph(&g)?)
    } else {
        None
    };
    let outcomes: Vec<Result<TrialRecord, WiretapError>> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            run_trial(
                p,
                ch,
                shared.as_ref(),
                i,
                seeding::derive_seed(cfg.seed, i as u64 + 1),
            )
        })
        .collect();
    let mut records = Vec::with_capacity(cfg.trials);
    let mut errors = Vec::new();
    for (i, out) in outcomes.into_iter().enumerate() {
        match out {
            Ok(rec) => records.push(rec),
            Err(e) => errors.push((i, e.to_string())),
        }
    }
    let summary = summarize(cfg.trials, &records);
    Ok(CampaignResult {
        records,
        errors,
        summary,
    })
}

fn summarize(trials: usize, records: &[TrialRecord]) -> CampaignSummary {
    let completed = records.len();
    let failures = records.iter().filter(|r| !r.bob_ok).count();
    let re = mean_stderr(
        records
            .iter()
            .map(|r| r.equivocation.h_s_given_z as f64 / r.n as f64),
    );
    let r_actual = mean_stderr(records.iter().map(|r| r.secret_dim as f64 / r.n as f64));
    CampaignSummary {
        trials,
        completed,
        pe_bob: if completed == 0 {
            f64::NAN
        } else {
            failures as f64 / completed as f64
        },
        re_mean: re.mean,
        re_stderr: re.stderr,
        r_actual_mean: r_actual.mean,
    }
}

#[derive(Serialize)]
struct TrialJson {
    seed: u64,
    n: usize,
    secret_dim: usize,
    erased_count_bob: usize,
    erased_count_eve: usize,
    bob_ok: bool,
    #[serde(rename = "H_S_given_Z")]
    h_s_given_z: u64,
}

/// JSON-lines dump of a campaign, one object per trial.
pub fn records_jsonl(records: &[TrialRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let row = TrialJson {
            seed: r.seed,
            n: r.n,
            secret_dim: r.secret_dim,
            erased_count_bob: r.erased_count_bob,
            erased_count_eve: r.erased_count_eve,
            bob_ok: r.bob_ok,
            h_s_given_z: r.equivocation.h_s_given_z,
        };
        out.push_str(&serde_json::to_string(&row).expect("serializable"));
        out.push('\n');
    }
    out
}

/// Summary CSV row with the fixed column set
/// `L,M,trials,R_nominal,R_actual_mean,Pe_bob,Re_mean,Re_stderr`.
pub fn summary_csv_row(p: &EnsembleParams, summary: &CampaignSummary) -> String {
    let r_nominal = nominal_rate(p);
    format!(
        "{},{},{},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}\n",
        p.big_l.map_or(0, |l| l),
        p.m.map_or(0, |m| m),
        summary.trials,
        r_nominal,
        summary.r_actual_mean,
        summary.pe_bob,
        summary.re_mean,
        summary.re_stderr
    )
}

pub const SUMMARY_CSV_HEADER: &str =
    "# wtldpc simulate schema v1\nL,M,trials,R_nominal,R_actual_mean,Pe_bob,Re_mean,Re_stderr\n";

/// Nominal coset rate of an ensemble: node-count formula for coupled
/// variants, `l2/r2` uncoupled.
pub fn nominal_rate(p: &EnsembleParams) -> f64 {
    match p.variant {
        Variant::Chain => ensemble::nominal_rate_chain(p).unwrap_or(f64::NAN),
        Variant::Smoothed => ensemble::design_rate_wiretap(p).unwrap_or(f64::NAN),
        Variant::Uncoupled => p.l2 as f64 / p.r2 as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding;

    fn tiny_code() -> CosetCode {
        // H1 = [1111], H2 = [1100]: even-weight code, one secret bit.
        let h1 = BitMatrix::from_rows(&[&[1, 1, 1, 1]]);
        let h2 = BitMatrix::from_rows(&[&[1, 1, 0, 0]]);
        CosetCode::new(h1, h2).unwrap()
    }

    #[test]
    fn tiny_code_dimensions() {
        let code = tiny_code();
        assert_eq!(code.rank_h1(), 1);
        assert_eq!(code.rank_h(), 2);
        assert_eq!(code.secret_dim(), 1);
        assert_eq!(code.actual_rate(), 0.25);
    }

    #[test]
    fn encode_satisfies_both_systems() {
        let code = tiny_code();
        let mut rng = seeding::root_rng(5);
        for bit in [0u8, 1] {
            let s = BitVec::from_bits(&[bit]);
            for _ in 0..20 {
                let x = code.encode(&s, &mut rng).unwrap();
                assert!(code.h1().mul_vec(&x).unwrap().is_zero());
                // Even parity and x0 + x1 = s.
                assert_eq!(x.count_ones() % 2, 0);
                assert_eq!(u8::from(x.get(0)) ^ u8::from(x.get(1)), bit);
                assert_eq!(code.decode_secret(&x).unwrap(), s);
                // H2 x equals the syndrome mapped from s.
                assert_eq!(code.h2().mul_vec(&x).unwrap(), code.syndrome_of(&s));
            }
        }
    }

    #[test]
    fn encode_uniform_over_coset() {
        // The even-weight words with x0 + x1 = 1 are
        // {1010, 1001, 0110, 0101}; each should appear ~ 1/4.
        let code = tiny_code();
        let mut rng = seeding::root_rng(6);
        let s = BitVec::from_bits(&[1]);
        let mut counts = std::collections::HashMap::new();
        let draws = 8000;
        for _ in 0..draws {
            let x = code.encode(&s, &mut rng).unwrap();
            *counts.entry(format!("{x:?}")).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 4, "{counts:?}");
        let expect = draws as f64 / 4.0;
        let chi2: f64 = counts
            .values()
            .map(|&c| {
                let d = c as f64 - expect;
                d * d / expect
            })
            .sum();
        assert!(chi2 < 11.345, "chi2 {chi2}"); // df 3, alpha 0.01
    }

    #[test]
    fn encode_zero_message_lands_in_full_code() {
        let code = tiny_code();
        let mut rng = seeding::root_rng(7);
        let s = BitVec::zeros(1);
        for _ in 0..20 {
            let x = code.encode(&s, &mut rng).unwrap();
            assert!(code.h_full().mul_vec(&x).unwrap().is_zero());
        }
    }

    #[test]
    fn encode_shape_error() {
        let code = tiny_code();
        let mut rng = seeding::root_rng(8);
        let s = BitVec::zeros(3);
        assert!(matches!(
            code.encode(&s, &mut rng),
            Err(WiretapError::ShapeError(_))
        ));
    }

    #[test]
    fn transmit_extremes() {
        let mut rng = seeding::root_rng(9);
        let x = BitVec::from_bits(&[1, 0, 1, 1, 0]);
        let out = transmit_bec(&x, 0.0, &mut rng);
        assert_eq!(out.values, x);
        assert_eq!(out.pattern.count(), 0);
        let out = transmit_bec(&x, 1.0, &mut rng);
        assert_eq!(out.pattern.count(), 5);
    }

    #[test]
    fn transmit_fraction_matches_eps() {
        let mut rng = seeding::root_rng(10);
        let x = BitVec::zeros(100_000);
        let out = transmit_bec(&x, 0.3, &mut rng);
        let frac = out.pattern.count() as f64 / 100_000.0;
        // 3 sigma of a Bernoulli(0.3) mean over 1e5 draws.
        assert!((frac - 0.3).abs() < 3.0 * (0.3f64 * 0.7 / 100_000.0).sqrt());
    }

    #[test]
    fn peel_hand_traceable() {
        // H = [110; 011], y = (?, 1, ?): x0 then x2 resolve to 1.
        let h = BitMatrix::from_rows(&[&[1, 1, 0], &[0, 1, 1]]);
        let mut values = BitVec::zeros(3);
        values.set(1, true);
        let y = ChannelOutput {
            values,
            pattern: ErasurePattern::from_indices(3, &[0, 2]),
        };
        match peel_decode(&h, &y).unwrap() {
            PeelOutcome::Resolved(x) => {
                assert_eq!(x, BitVec::from_bits(&[1, 1, 1]));
            }
            PeelOutcome::Stuck(_) => panic!("expected resolution"),
        }
    }

    #[test]
    fn peel_no_erasures_checks_consistency() {
        let h = BitMatrix::from_rows(&[&[1, 1]]);
        let y = ChannelOutput {
            values: BitVec::from_bits(&[1, 1]),
            pattern: ErasurePattern::from_indices(2, &[]),
        };
        assert!(matches!(
            peel_decode(&h, &y).unwrap(),
            PeelOutcome::Resolved(_)
        ));
        let bad = ChannelOutput {
            values: BitVec::from_bits(&[1, 0]),
            pattern: ErasurePattern::from_indices(2, &[]),
        };
        assert!(matches!(
            peel_decode(&h, &bad),
            Err(WiretapError::Inconsistent)
        ));
    }

    #[test]
    fn peel_stuck_residual_is_stopping_set() {
        // Erase a 4-cycle: {0,1} with checks hitting both twice.
        let h = BitMatrix::from_rows(&[&[1, 1, 0], &[1, 1, 1]]);
        let y = ChannelOutput {
            values: BitVec::from_bits(&[0, 0, 1]),
            pattern: ErasurePattern::from_indices(3, &[0, 1]),
        };
        match peel_decode(&h, &y).unwrap() {
            PeelOutcome::Stuck(residual) => {
                assert_eq!(residual, vec![0, 1]);
                assert!(is_stopping_set(&h, &residual));
            }
            PeelOutcome::Resolved(_) => panic!("expected stuck"),
        }
    }

    #[test]
    fn equivocation_extremes() {
        let code = tiny_code();
        let empty = ErasurePattern::from_indices(4, &[]);
        let t = exact_equivocation(&code, &empty).unwrap();
        assert_eq!(t.h_s_given_z, 0);
        let all = ErasurePattern::from_indices(4, &[0, 1, 2, 3]);
        let t = exact_equivocation(&code, &all).unwrap();
        assert_eq!(t.h_s_given_z as usize, code.secret_dim());
    }

    #[test]
    fn equivocation_hand_cases() {
        let code = tiny_code();
        // Erasing {0,1}: the observed parity x2+x3 pins s = x0+x1.
        let t = exact_equivocation(&code, &ErasurePattern::from_indices(4, &[0, 1])).unwrap();
        assert_eq!(t.h_s_given_z, 0);
        assert_eq!(t.h_x_given_z, 1);
        // Erasing {0,2} leaves the secret bit free.
        let t = exact_equivocation(&code, &ErasurePattern::from_indices(4, &[0, 2])).unwrap();
        assert_eq!(t.h_s_given_z, 1);
        assert_eq!(t.h_x_given_z, 1);
        assert_eq!(t.h_x_given_sz, 0);
    }

    /// Brute-force posterior oracle: enumerate the type-1 code, bucket by
    /// the observation and count distinct messages among consistent words.
    fn brute_force_entropies(code: &CosetCode, pattern: &ErasurePattern) -> (u64, u64, u64) {
        let n = code.n();
        let basis = code.h1().nullspace_basis();
        let dim = basis.rows();
        // Words of the type-1 code with zeros on the observed part.
        let mut t0 = Vec::new();
        for combo in 0u64..(1 << dim) {
            let mut x = BitVec::zeros(n);
            for b in 0..dim {
                if combo >> b & 1 == 1 {
                    x.xor_assign(&basis.row_as_bitvec(b));
                }
            }
            let observed_zero = (0..n).all(|i| pattern.contains(i) || !x.get(i));
            if observed_zero {
                t0.push(x);
            }
        }
        let h_x_given_z = (t0.len() as f64).log2().round() as u64;
        let mut secrets = std::collections::HashSet::new();
        let mut kernel = 0u64;
        for x in &t0 {
            let s = code.decode_secret(x).unwrap();
            if s.is_zero() {
                kernel += 1;
            }
            secrets.insert(format!("{s:?}"));
        }
        let h_s_given_z = (secrets.len() as f64).log2().round() as u64;
        let h_x_given_sz = (kernel as f64).log2().round() as u64;
        (h_s_given_z, h_x_given_z, h_x_given_sz)
    }

    #[test]
    fn rank_formula_matches_brute_force_posterior() {
        let mut rng = seeding::root_rng(11);
        for trial in 0..300 {
            let n = rng.random_range(4..=10);
            let m1 = rng.random_range(1..=n - 2);
            let m2 = rng.random_range(1..=4);
            let h1 = BitMatrix::random(m1, n, &mut rng);
            let h2 = BitMatrix::random(m2, n, &mut rng);
            let code = CosetCode::new(h1, h2).unwrap();
            let mut erased = Vec::new();
            for i in 0..n {
                if rng.random::<f64>() < 0.5 {
                    erased.push(i);
                }
            }
            let pattern = ErasurePattern::from_indices(n, &erased);
            let t = exact_equivocation(&code, &pattern).unwrap();
            let (s_bf, x_bf, xs_bf) = brute_force_entropies(&code, &pattern);
            assert_eq!(t.h_s_given_z, s_bf, "trial {trial}");
            assert_eq!(t.h_x_given_z, x_bf, "trial {trial}");
            assert_eq!(t.h_x_given_sz, xs_bf, "trial {trial}");
        }
    }

    #[test]
    fn equivocation_monotone_in_pattern() {
        let mut rng = seeding::root_rng(12);
        let h1 = BitMatrix::random(3, 8, &mut rng);
        let h2 = BitMatrix::random(2, 8, &mut rng);
        let code = CosetCode::new(h1, h2).unwrap();
        let mut erased = Vec::new();
        let mut prev =
            exact_equivocation(&code, &ErasurePattern::from_indices(8, &erased)).unwrap();
        for i in 0..8 {
            erased.push(i);
            let cur = exact_equivocation(&code, &ErasurePattern::from_indices(8, &erased)).unwrap();
            assert!(cur.h_s_given_z >= prev.h_s_given_z);
            assert!(cur.h_x_given_z >= prev.h_x_given_z);
            assert!(cur.h_x_given_sz >= prev.h_x_given_sz);
            assert!(cur.h_s_given_z <= code.secret_dim() as u64);
            assert!(cur.h_s_given_z <= erased.len() as u64);
            prev = cur;
        }
    }

    #[test]
    fn ml_fallback_matches_rank_criterion() {
        let mut rng = seeding::root_rng(13);
        let p = EnsembleParams::uncoupled(3, 3, 6, 12);
        let mut stuck_seen = 0;
        for _ in 0..200 {
            let g = sampler::sample_uncoupled(&p, 12, &mut rng).unwrap();
            let code = CosetCode::from_graph(&g).unwrap();
            let s = BitVec::random(code.secret_dim(), &mut rng);
            let x = code.encode(&s, &mut rng).unwrap();
            let y = transmit_bec(&x, 0.35, &mut rng);
            let unique =
                code.h1().rank_of_columns(&y.pattern.indices()).unwrap() == y.pattern.count();
            let ml = bob_decode_ml(&code, &y).unwrap();
            assert_eq!(ml.is_some(), unique);
            if let Some(s_hat) = ml {
                assert_eq!(s_hat, s, "erasure decoding never errs");
            }
            // Peeling success implies ML success, never the reverse.
            if let Some(s_peel) = bob_decode(&code, &y).unwrap() {
                assert_eq!(s_peel, s);
                assert!(unique);
            } else {
                stuck_seen += 1;
            }
        }
        assert!(stuck_seen > 0, "want some stuck instances at eps 0.35");
    }

    #[test]
    fn campaign_extreme_channels() {
        let p = EnsembleParams::uncoupled(3, 3, 6, 12).with_m(24);
        // eps_w = 1: equivocation equals the full message entropy.
        let ch = WiretapChannelSpec::new(0.0, 1.0).unwrap();
        let out = run_campaign(&p, &ch, &CampaignConfig::new(20, 99)).unwrap();
        assert!(out.errors.is_empty());
        assert_eq!(out.summary.pe_bob, 0.0);
        assert!((out.summary.re_mean - out.summary.r_actual_mean).abs() < 1e-12);
        // Noiseless everywhere: Bob perfect, no secrecy.
        let ch = WiretapChannelSpec::new(0.0, 0.0).unwrap();
        let out = run_campaign(&p, &ch, &CampaignConfig::new(10, 100)).unwrap();
        assert_eq!(out.summary.pe_bob, 0.0);
        assert_eq!(out.summary.re_mean, 0.0);
    }

    #[test]
    fn campaign_deterministic_across_pool_sizes() {
        let p = EnsembleParams::chain(3, 3, 6, 12, 2).with_m(8);
        let ch = WiretapChannelSpec::new(0.4, 0.6).unwrap();
        let cfg = CampaignConfig::new(16, 7);
        let a = run_campaign(&p, &ch, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| run_campaign(&p, &ch, &cfg)).unwrap();
        assert_eq!(records_jsonl(&a.records), records_jsonl(&b.records));
    }

    #[test]
    fn campaign_fixed_code_shares_instance() {
        let p = EnsembleParams::chain(3, 3, 6, 12, 2).with_m(8);
        let ch = WiretapChannelSpec::new(0.4, 0.6).unwrap();
        let mut cfg = CampaignConfig::new(8, 21);
        cfg.fixed_code = true;
        let out = run_campaign(&p, &ch, &cfg).unwrap();
        let dims: std::collections::HashSet<usize> =
            out.records.iter().map(|r| r.secret_dim).collect();
        assert_eq!(dims.len(), 1);
    }

    #[test]
    fn jsonl_schema() {
        let p = EnsembleParams::uncoupled(2, 1, 4, 4).with_m(8);
        let ch = WiretapChannelSpec::new(0.2, 0.5).unwrap();
        let out = run_campaign(&p, &ch, &CampaignConfig::new(2, 3)).unwrap();
        let text = records_jsonl(&out.records);
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        for key in [
            "seed",
            "n",
            "secret_dim",
            "erased_count_bob",
            "erased_count_eve",
            "bob_ok",
            "H_S_given_Z",
        ] {
            assert!(first.get(key).is_some(), "missing {key}");
        }
    }
}
