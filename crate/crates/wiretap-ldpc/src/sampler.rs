//! Finite Tanner-graph instances of the two-edge-type ensembles.
//!
//! Three samplers cover the uncoupled ensemble (configuration model per
//! type), the smoothed coupled ensemble (random edge offsets over a window
//! of width `w`) and the protograph chain (one edge bundle per neighboring
//! position). Sampled graphs keep the check partition into types and the
//! spatial position of every node; multi-edges are allowed and reduce mod 2
//! only when a parity-check matrix is extracted.

use crate::ensemble::{EnsembleParams, Variant};
use crate::gf2::BitMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SamplerError {
    #[error("socket counts not divisible: {0}")]
    Indivisible(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// How the smoothed sampler assigns edge offsets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SmoothedMode {
    /// Per position, exactly `M * l / w` edges per offset (rounded by
    /// largest remainder when `w` does not divide `M * l`). Keeps every
    /// check position at its nominal check count.
    #[default]
    Balanced,
    /// Every edge offset drawn i.i.d. uniform on `{0, .., w-1}`; check
    /// counts per position follow the arrivals.
    Iid,
    /// Per position, variable constellation profiles drawn with
    /// largest-remainder counts of the profile-pair distribution.
    StrictProfiles,
}

/// A sampled two-edge-type Tanner graph.
///
/// `type1[c]` / `type2[c]` list the variables of check `c` sorted ascending,
/// with multiplicity for multi-edges.
#[derive(Clone, Debug)]
pub struct TannerGraph {
    n: usize,
    type1: Vec<Vec<u32>>,
    type2: Vec<Vec<u32>>,
    var_pos: Vec<i32>,
    check1_pos: Vec<i32>,
    check2_pos: Vec<i32>,
}

impl TannerGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn type1_checks(&self) -> usize {
        self.type1.len()
    }

    pub fn type2_checks(&self) -> usize {
        self.type2.len()
    }

    pub fn type1_adjacency(&self) -> &[Vec<u32>] {
        &self.type1
    }

    pub fn type2_adjacency(&self) -> &[Vec<u32>] {
        &self.type2
    }

    pub fn var_position(&self, v: usize) -> i32 {
        self.var_pos[v]
    }

    pub fn check_position(&self, edge_type: u8, c: usize) -> i32 {
        match edge_type {
            1 => self.check1_pos[c],
            2 => self.check2_pos[c],
            _ => panic!("edge type must be 1 or 2"),
        }
    }

    /// Per-variable edge counts (with multiplicity) for one type.
    pub fn variable_degrees(&self, edge_type: u8) -> Vec<usize> {
        let adj = match edge_type {
            1 => &self.type1,
            2 => &self.type2,
            _ => panic!("edge type must be 1 or 2"),
        };
        let mut deg = vec![0usize; self.n];
        for check in adj {
            for &v in check {
                deg[v as usize] += 1;
            }
        }
        deg
    }

    /// Parity-check matrices `(H1, H2)`; double edges cancel mod 2.
    pub fn to_parity_matrices(&self) -> (BitMatrix, BitMatrix) {
        let build = |adj: &[Vec<u32>]| {
            let mut m = BitMatrix::zeros(adj.len(), self.n);
            for (r, check) in adj.iter().enumerate() {
                for &v in check {
                    m.flip(r, v as usize);
                }
            }
            m
        };
        (build(&self.type1), build(&self.type2))
    }

    /// Textual sparse export: header `n m1 m2`, then one line per check:
    /// `type row_index degree v_1 .. v_d` (0-based, sorted).
    pub fn export_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n, self.type1.len(), self.type2.len());
        for (t, adj) in [(1, &self.type1), (2, &self.type2)] {
            for (idx, check) in adj.iter().enumerate() {
                out.push_str(&format!("{t} {idx} {}", check.len()));
                for v in check {
                    out.push_str(&format!(" {v}"));
                }
                out.push('\n');
            }
        }
        out
    }
}

fn build_checks(
    edges_per_check_pos: Vec<(i32, Vec<u32>)>,
    degree: u32,
    fixed_checks_per_pos: Option<usize>,
    rng: &mut impl Rng,
) -> (Vec<Vec<u32>>, Vec<i32>) {
    let mut checks = Vec::new();
    let mut positions = Vec::new();
    for (pos, mut arrivals) in edges_per_check_pos {
        if arrivals.is_empty() {
            continue;
        }
        let n_checks = match fixed_checks_per_pos {
            Some(k) => k,
            None => arrivals.len().div_ceil(degree as usize),
        };
        let capacity = n_checks * degree as usize;
        assert!(
            arrivals.len() <= capacity,
            "arrivals exceed sockets at position {pos}"
        );
        // Uniform injection of arrivals into socket slots.
        let mut slots: Vec<usize> = (0..capacity).collect();
        slots.shuffle(rng);
        let mut local: Vec<Vec<u32>> = vec![Vec::new(); n_checks];
        arrivals.shuffle(rng);
        for (edge, var) in arrivals.into_iter().enumerate() {
            local[slots[edge] / degree as usize].push(var);
        }
        for mut check in local {
            if check.is_empty() {
                continue; // dropped: not connected to any variable
            }
            check.sort_unstable();
            checks.push(check);
            positions.push(pos);
        }
    }
    (checks, positions)
}

/// Uniform configuration-model sample of the uncoupled ensemble: per type, a
/// uniform random matching of the `n * l_j` variable sockets onto check
/// sockets.
pub fn sample_uncoupled(
    p: &EnsembleParams,
    n: usize,
    rng: &mut impl Rng,
) -> Result<TannerGraph, SamplerError> {
    if p.variant != Variant::Uncoupled {
        return Err(SamplerError::InvalidParams(
            "sample_uncoupled needs the uncoupled variant".into(),
        ));
    }
    p.validate()
        .map_err(|e| SamplerError::InvalidParams(e.to_string()))?;
    let mut adj = Vec::new();
    for (l, r) in [(p.l1, p.r1), (p.l2, p.r2)] {
        if l > 0 && !(n * l as usize).is_multiple_of(r as usize) {
            return Err(SamplerError::Indivisible(format!(
                "n*l = {} not divisible by r = {r}",
                n * l as usize
            )));
        }
        let mut sockets: Vec<u32> = (0..n as u32)
            .flat_map(|v| std::iter::repeat_n(v, l as usize))
            .collect();
        sockets.shuffle(rng);
        let checks: Vec<Vec<u32>> = sockets
            .chunks(r as usize)
            .map(|c| {
                let mut c = c.to_vec();
                c.sort_unstable();
                c
            })
            .collect();
        adj.push(checks);
    }
    let type2 = adj.pop().unwrap();
    let type1 = adj.pop().unwrap();
    let m1 = type1.len();
    let m2 = type2.len();
    Ok(TannerGraph {
        n,
        type1,
        type2,
        var_pos: vec![0; n],
        check1_pos: vec![0; m1],
        check2_pos: vec![0; m2],
    })
}

/// Largest-remainder rounding of `total * weights[i]` to integers summing to
/// `total`.
fn largest_remainder(weights: &[f64], total: usize) -> Vec<usize> {
    let raw: Vec<f64> = weights.iter().map(|w| w * total as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|&x| x.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = raw[a] - raw[a].floor();
        let fb = raw[b] - raw[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().take(total - assigned) {
        counts[i] += 1;
    }
    counts
}

/// All `w`-tuples of nonnegative integers summing to `l`, with their
/// probabilities under uniform constellations: `p(t) = #{c : tau(c) = t} / w^l`.
pub fn type_profiles(l: u32, w: u32) -> Vec<(Vec<u32>, f64)> {
    fn rec(remaining: u32, cells: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cells == 1 {
            acc.push(remaining);
            out.push(acc.clone());
            acc.pop();
            return;
        }
        for k in 0..=remaining {
            acc.push(k);
            rec(remaining - k, cells - 1, acc, out);
            acc.pop();
        }
    }
    let mut tuples = Vec::new();
    rec(l, w, &mut Vec::new(), &mut tuples);
    let log_wl = (w as f64).ln() * l as f64;
    tuples
        .into_iter()
        .map(|t| {
            // multinomial(l; t) / w^l via log-factorials
            let mut logp = lgamma_usize(l as usize) - log_wl;
            for &k in &t {
                logp -= lgamma_usize(k as usize);
            }
            (t, logp.exp())
        })
        .collect()
}

fn lgamma_usize(k: usize) -> f64 {
    // ln(k!)
    (2..=k).map(|i| (i as f64).ln()).sum()
}

struct OffsetPlan {
    /// offsets[v][e] = window offset of edge e of the planned type.
    offsets: Vec<Vec<u32>>,
    rounding: bool,
}

fn plan_offsets(
    mode: SmoothedMode,
    positions: usize,
    m: usize,
    l1: u32,
    l2: u32,
    w: u32,
    rng: &mut impl Rng,
) -> (OffsetPlan, OffsetPlan) {
    let n = positions * m;
    let mut plan1 = OffsetPlan {
        offsets: vec![Vec::with_capacity(l1 as usize); n],
        rounding: false,
    };
    let mut plan2 = OffsetPlan {
        offsets: vec![Vec::with_capacity(l2 as usize); n],
        rounding: false,
    };
    match mode {
        SmoothedMode::Iid => {
            for v in 0..n {
                for _ in 0..l1 {
                    plan1.offsets[v].push(rng.random_range(0..w));
                }
                for _ in 0..l2 {
                    plan2.offsets[v].push(rng.random_range(0..w));
                }
            }
        }
        SmoothedMode::Balanced => {
            for (l, plan) in [(l1, &mut plan1), (l2, &mut plan2)] {
                if l == 0 {
                    continue;
                }
                let total = m * l as usize;
                plan.rounding = !total.is_multiple_of(w as usize);
                let weights = vec![1.0 / w as f64; w as usize];
                let counts = largest_remainder(&weights, total);
                for pos in 0..positions {
                    let mut pool: Vec<u32> = counts
                        .iter()
                        .enumerate()
                        .flat_map(|(k, &c)| std::iter::repeat_n(k as u32, c))
                        .collect();
                    pool.shuffle(rng);
                    for v in 0..m {
                        let base = pos * m + v;
                        plan.offsets[base].extend(&pool[v * l as usize..(v + 1) * l as usize]);
                    }
                }
            }
        }
        SmoothedMode::StrictProfiles => {
            let prof1 = type_profiles(l1.max(1), w);
            let prof2 = type_profiles(l2.max(1), w);
            // Joint profile-pair weights; a variable's two types are coupled
            // through the pair counts.
            let mut weights = Vec::with_capacity(prof1.len() * prof2.len());
            for (_, pa) in &prof1 {
                for (_, pb) in &prof2 {
                    weights.push(pa * pb);
                }
            }
            let counts = largest_remainder(&weights, m);
            let exact = weights.iter().all(|&q| {
                let x = q * m as f64;
                (x - x.round()).abs() < 1e-9
            });
            plan1.rounding = !exact;
            plan2.rounding = !exact;
            for pos in 0..positions {
                let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(m);
                for (idx, &c) in counts.iter().enumerate() {
                    let (a, b) = (idx / prof2.len(), idx % prof2.len());
                    for _ in 0..c {
                        pairs.push((a, b));
                    }
                }
                pairs.shuffle(rng);
                for (v, (a, b)) in pairs.into_iter().enumerate() {
                    let base = pos * m + v;
                    if l1 > 0 {
                        for (k, &cnt) in prof1[a].0.iter().enumerate() {
                            for _ in 0..cnt {
                                plan1.offsets[base].push(k as u32);
                            }
                        }
                    }
                    if l2 > 0 {
                        for (k, &cnt) in prof2[b].0.iter().enumerate() {
                            for _ in 0..cnt {
                                plan2.offsets[base].push(k as u32);
                            }
                        }
                    }
                }
            }
        }
    }
    (plan1, plan2)
}

/// Outcome of smoothed sampling; `rounding` flags a relaxed divisibility
/// (profile or offset counts rounded by largest remainder).
pub struct SampledGraph {
    pub graph: TannerGraph,
    pub rounding: bool,
}

/// Samples the `{l1, l2, r1, r2, L, w}` smoothed coupled ensemble with `M`
/// variables per position.
///
/// Variables sit at positions `[-L, L]`; an edge of a variable at `i` with
/// offset `c` attaches to a check at position `i + c`, so check positions
/// span `[-L, L + w - 1]`. Per position and type there are `M * l / r`
/// checks; boundary checks may be left with fewer than `r` sockets filled
/// and checks with no socket at all are dropped.
pub fn sample_smoothed(
    p: &EnsembleParams,
    mode: SmoothedMode,
    rng: &mut impl Rng,
) -> Result<SampledGraph, SamplerError> {
    if p.variant != Variant::Smoothed {
        return Err(SamplerError::InvalidParams(
            "sample_smoothed needs the smoothed variant".into(),
        ));
    }
    p.validate()
        .map_err(|e| SamplerError::InvalidParams(e.to_string()))?;
    let Some(m) = p.m else {
        return Err(SamplerError::InvalidParams(
            "M required for sampling".into(),
        ));
    };
    let m = m as usize;
    let (big_l, w) = (p.big_l.unwrap() as i64, p.w.unwrap());
    let positions = (2 * big_l + 1) as usize;
    let n = positions * m;
    let (plan1, plan2) = plan_offsets(mode, positions, m, p.l1, p.l2, w, rng);
    // Indivisible M*l/r is relaxed to one extra (deficient) check group per
    // position and reported through the rounding flag.
    let mut check_rounding = false;

    let mut graph_parts = Vec::new();
    for (l, r, plan) in [(p.l1, p.r1, &plan1), (p.l2, p.r2, &plan2)] {
        if l == 0 {
            graph_parts.push((Vec::new(), Vec::new()));
            continue;
        }
        // Arrivals per check position [-L, L + w - 1].
        let ncheckpos = positions + w as usize - 1;
        let mut arrivals: Vec<(i32, Vec<u32>)> = (0..ncheckpos)
            .map(|q| ((q as i64 - big_l) as i32, Vec::new()))
            .collect();
        for v in 0..n {
            let pos = (v / m) as i64 - big_l;
            for &c in &plan.offsets[v] {
                let q = pos + c as i64;
                arrivals[(q + big_l) as usize].1.push(v as u32);
            }
        }
        if !(m * l as usize).is_multiple_of(r as usize) {
            check_rounding = true;
        }
        let fixed = match mode {
            SmoothedMode::Iid => None,
            _ => Some((m * l as usize).div_ceil(r as usize)),
        };
        graph_parts.push(build_checks(arrivals, r, fixed, rng));
    }
    let (type2, check2_pos) = graph_parts.pop().unwrap();
    let (type1, check1_pos) = graph_parts.pop().unwrap();
    let var_pos: Vec<i32> = (0..n).map(|v| ((v / m) as i64 - big_l) as i32).collect();
    Ok(SampledGraph {
        graph: TannerGraph {
            n,
            type1,
            type2,
            var_pos,
            check1_pos,
            check2_pos,
        },
        rounding: plan1.rounding || plan2.rounding || check_rounding,
    })
}

/// Samples the protograph chain: a variable at position `i` sends one type-j
/// edge to each check position `i - s .. i + s` with `s = (l_j - 1) / 2`,
/// `M`-fold lifted by an independent uniform permutation per
/// (position pair, type).
///
/// Type-j checks occupy `[-L - s, L + s]`, `M * l_j / r_j` per position,
/// each reserving `r_j / l_j` sockets per originating position; boundary
/// checks keep their in-range sockets only.
pub fn sample_chain(p: &EnsembleParams, rng: &mut impl Rng) -> Result<TannerGraph, SamplerError> {
    if p.variant != Variant::Chain {
        return Err(SamplerError::InvalidParams(
            "sample_chain needs the chain variant".into(),
        ));
    }
    p.validate()
        .map_err(|e| SamplerError::InvalidParams(e.to_string()))?;
    let Some(m) = p.m else {
        return Err(SamplerError::InvalidParams(
            "M required for sampling".into(),
        ));
    };
    let m = m as usize;
    let big_l = p.big_l.unwrap() as i64;
    for (l, r) in [(p.l1, p.r1), (p.l2, p.r2)] {
        if l > 0 && !(m * l as usize).is_multiple_of(r as usize) {
            return Err(SamplerError::Indivisible(format!(
                "M*l = {} not divisible by r = {r}",
                m * l as usize
            )));
        }
    }
    let positions = (2 * big_l + 1) as usize;
    let n = positions * m;
    let mut parts = Vec::new();
    for (l, r) in [(p.l1, p.r1), (p.l2, p.r2)] {
        if l == 0 {
            parts.push((Vec::new(), Vec::new()));
            continue;
        }
        let span = (l as i64 - 1) / 2;
        let checks_per_pos = m * l as usize / r as usize;
        let group = (r / l) as usize; // sockets per check per origin
        let ncheckpos = (2 * (big_l + span) + 1) as usize;
        let mut adj: Vec<Vec<u32>> =
            vec![Vec::with_capacity(r as usize); ncheckpos * checks_per_pos];
        let mut perm: Vec<usize> = (0..m).collect();
        for i in -big_l..=big_l {
            for o in -span..=span {
                let q = i + o;
                // One uniform permutation per (variable position, check
                // position) pair: socket k of the origin-i group.
                perm.shuffle(rng);
                let qbase = ((q + big_l + span) as usize) * checks_per_pos;
                for (v, &socket) in perm.iter().enumerate() {
                    let check = qbase + socket / group;
                    let var = ((i + big_l) as usize * m + v) as u32;
                    adj[check].push(var);
                }
            }
        }
        let mut checks = Vec::with_capacity(adj.len());
        let mut pos = Vec::with_capacity(adj.len());
        for (idx, mut check) in adj.into_iter().enumerate() {
            if check.is_empty() {
                continue;
            }
            check.sort_unstable();
            checks.push(check);
            pos.push(((idx / checks_per_pos) as i64 - big_l - span) as i32);
        }
        parts.push((checks, pos));
    }
    let (type2, check2_pos) = parts.pop().unwrap();
    let (type1, check1_pos) = parts.pop().unwrap();
    let var_pos: Vec<i32> = (0..n).map(|v| ((v / m) as i64 - big_l) as i32).collect();
    Ok(TannerGraph {
        n,
        type1,
        type2,
        var_pos,
        check1_pos,
        check2_pos,
    })
}

/// Convenience dispatch on the ensemble variant. Uncoupled sampling uses
/// `n = M` variables.
pub fn sample(p: &EnsembleParams, rng: &mut impl Rng) -> Result<TannerGraph, SamplerError> {
    match p.variant {
        Variant::Uncoupled => {
            let m =
                p.m.ok_or_else(|| SamplerError::InvalidParams("M required for sampling".into()))?;
            sample_uncoupled(p, m as usize, rng)
        }
        Variant::Smoothed => Ok(sample_smoothed(p, SmoothedMode::default(), rng)?.graph),
        Variant::Chain => sample_chain(p, rng),
    }
}
