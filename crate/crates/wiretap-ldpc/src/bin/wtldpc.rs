//! Batch front-end: every library capability as a subcommand with explicit
//! seeds and machine-readable output. Exit codes: 0 ok, 2 invalid
//! parameters/usage, 3 runtime failure.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use wiretap_ldpc::de::{self, DeConfig};
use wiretap_ldpc::ensemble::{
    self, design_rate_total, design_rate_wiretap, nominal_rate_chain, CodeConfig, EnsembleParams,
    Variant, WiretapChannelSpec,
};
use wiretap_ldpc::gf2::BitVec;
use wiretap_ldpc::sampler::{self, SmoothedMode};
use wiretap_ldpc::seeding;
use wiretap_ldpc::stopping;
use wiretap_ldpc::wiretap::{
    self, exact_equivocation, run_campaign, transmit_bec, CampaignConfig, CosetCode,
    EquivocationReport,
};

#[derive(Parser)]
#[command(
    name = "wtldpc",
    version,
    about = "coset-coded wiretap experiments with coupled two-edge-type LDPC ensembles"
)]
struct Cli {
    /// Worker pool size for parallel subcommands (results do not depend on
    /// this).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DegreeArgs {
    #[arg(long)]
    l1: u32,
    #[arg(long)]
    l2: u32,
    /// Shared check degree (sets r1 = r2 = r).
    #[arg(long, conflicts_with_all = ["r1", "r2"])]
    r: Option<u32>,
    #[arg(long, required_unless_present = "r")]
    r1: Option<u32>,
    #[arg(long, required_unless_present = "r")]
    r2: Option<u32>,
}

impl DegreeArgs {
    fn degrees(&self) -> (u32, u32, u32, u32) {
        let r1 = self.r.or(self.r1).expect("clap enforces presence");
        let r2 = self.r.or(self.r2).expect("clap enforces presence");
        (self.l1, self.l2, r1, r2)
    }
}

#[derive(Args, Clone)]
struct CouplingArgs {
    /// Ensemble variant.
    #[arg(long, value_parser = ["uncoupled", "chain", "smoothed"], default_value = "smoothed")]
    variant: String,
    /// Coupling half-length.
    #[arg(long = "L")]
    big_l: Option<u32>,
    /// Smoothing width (smoothed variant).
    #[arg(long)]
    w: Option<u32>,
}

fn assemble(d: &DegreeArgs, c: &CouplingArgs, m: Option<u32>) -> Result<EnsembleParams, CliError> {
    let (l1, l2, r1, r2) = d.degrees();
    let mut p = EnsembleParams {
        l1,
        l2,
        r1,
        r2,
        variant: match c.variant.as_str() {
            "uncoupled" => Variant::Uncoupled,
            "chain" => Variant::Chain,
            "smoothed" => Variant::Smoothed,
            other => return Err(CliError::Usage(format!("unknown variant {other}"))),
        },
        big_l: c.big_l,
        w: c.w,
        m: None,
    };
    if let Some(m) = m {
        p = p.with_m(m);
    }
    p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(p)
}

#[derive(Subcommand)]
enum Command {
    /// BP threshold of a coupled ensemble by density-evolution bisection.
    Threshold {
        #[command(flatten)]
        degrees: DegreeArgs,
        #[command(flatten)]
        coupling: CouplingArgs,
        #[arg(long, default_value_t = 1e-4)]
        precision: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iters: u64,
        /// Sanity mode: run density evolution at this erasure probability
        /// and report convergence instead of bisecting.
        #[arg(long)]
        eps_check: Option<f64>,
        /// Also run the merged single system (needs r1 == r2) and print the
        /// maximum per-iteration deviation.
        #[arg(long)]
        compare_single: bool,
    },
    /// Per-iteration residual profiles as CSV.
    DeProfile {
        #[command(flatten)]
        degrees: DegreeArgs,
        #[command(flatten)]
        coupling: CouplingArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1_000)]
        max_iters: u64,
        /// Keep every k-th iteration.
        #[arg(long, default_value_t = 1)]
        stride: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Design rates of the smoothed ensemble and of its coset scheme.
    Designrate {
        #[command(flatten)]
        degrees: DegreeArgs,
        #[arg(long = "L")]
        big_l: u32,
        #[arg(long)]
        w: u32,
    },
    /// Achievable rate-equivocation region boundary.
    Region {
        #[arg(long)]
        eps_m: f64,
        #[arg(long)]
        eps_w: f64,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a finite instance and export its sparse form.
    Sample {
        #[command(flatten)]
        degrees: DegreeArgs,
        #[command(flatten)]
        coupling: CouplingArgs,
        #[arg(long = "M")]
        m: u32,
        #[arg(long)]
        seed: u64,
        /// Offset assignment for the smoothed variant.
        #[arg(long, value_parser = ["balanced", "iid", "strict"], default_value = "balanced")]
        mode: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo wiretap campaign: encode, transmit, decode, measure.
    Simulate {
        #[command(flatten)]
        degrees: DegreeArgs,
        #[command(flatten)]
        coupling: CouplingArgs,
        #[arg(long = "M")]
        m: u32,
        #[arg(long)]
        eps_m: f64,
        #[arg(long)]
        eps_w: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Reuse one sampled code for all trials.
        #[arg(long)]
        fixed_code: bool,
        /// Per-trial JSON-lines output path.
        #[arg(long)]
        jsonl: Option<PathBuf>,
        /// Summary CSV output path.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Exact equivocation of one sampled code over random erasure patterns.
    Equivocation {
        #[command(flatten)]
        degrees: DegreeArgs,
        #[command(flatten)]
        coupling: CouplingArgs,
        #[arg(long = "M")]
        m: u32,
        #[arg(long)]
        eps_w: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Stopping-set growth rate curve and its first positive zero.
    Growth {
        #[arg(long)]
        l1: u32,
        #[arg(long)]
        l2: u32,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reference experiment: the {3,3,6,12,L} chain family over
    /// BEC-WT(0.5,0.75), rates and equivocation by L.
    Table1 {
        /// Values of L to evaluate.
        #[arg(long, value_delimiter = ',', default_values_t = vec![20u32, 30, 40, 50, 60, 70])]
        l_values: Vec<u32>,
        #[arg(long = "M", default_value_t = 100)]
        m: u32,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<wiretap::WiretapError> for CliError {
    fn from(e: wiretap::WiretapError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn sig12(v: f64) -> String {
    format!("{v:.11e}")
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, content)?;
            println!("# wrote {}", p.display());
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn print_config(p: &EnsembleParams, channel: Option<WiretapChannelSpec>, seed: Option<u64>) {
    let cfg = CodeConfig {
        params: *p,
        channel,
    };
    for line in cfg.to_config_string().lines() {
        println!("# {line}");
    }
    if let Some(seed) = seed {
        println!("# seed={seed}");
    }
}

/// Reference values for the {3,3,6,12,L} chain family over
/// BEC-WT(0.5,0.75) at M = 1000: published transmission rate and
/// equivocation, by L.
const TABLE1_REFERENCE: [(u32, f64, f64); 6] = [
    (20, 0.2622, 0.2276),
    (30, 0.2582, 0.2350),
    (40, 0.2562, 0.2387),
    (50, 0.2550, 0.2410),
    (60, 0.2541, 0.2425),
    (70, 0.2535, 0.2436),
];

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Threshold {
            degrees,
            coupling,
            precision,
            max_iters,
            eps_check,
            compare_single,
        } => {
            let p = assemble(&degrees, &coupling, None)?;
            if precision <= 0.0 {
                return Err(CliError::Usage("precision must be positive".into()));
            }
            print_config(&p, None, None);
            let mut cfg = DeConfig::new(0.0);
            cfg.max_iters = max_iters;
            if compare_single {
                if p.r1 != p.r2 || p.variant != Variant::Smoothed {
                    return Err(CliError::Usage(
                        "--compare-single needs the smoothed variant with r1 == r2".into(),
                    ));
                }
                let eps = eps_check.unwrap_or(0.45);
                let iters = 1_000;
                let (big_l, w) = (p.big_l.unwrap(), p.w.unwrap());
                let mut two = de::DeState::uniform(big_l, eps);
                let mut single = vec![eps; 2 * big_l as usize + 1];
                let mut worst = 0.0f64;
                for _ in 0..iters {
                    two = de::de_step_smoothed(&two, &p, eps)
                        .map_err(|e| CliError::Usage(e.to_string()))?;
                    single = de::de_step_single(&single, p.l1 + p.l2, p.r1, big_l, w, eps);
                    for (a, b) in two
                        .x1
                        .iter()
                        .chain(two.x2.iter())
                        .zip(single.iter().chain(single.iter()))
                    {
                        worst = worst.max((a - b).abs());
                    }
                }
                println!(
                    "compare_single eps={eps} iters={iters} max_deviation={}",
                    sig12(worst)
                );
            }
            if let Some(eps) = eps_check {
                let mut c = cfg;
                c.eps = eps;
                let run = de::run_de(&p, &c).map_err(|e| CliError::Usage(e.to_string()))?;
                println!(
                    "eps_check eps={eps} converged_to_zero={} iters={} max_residual={}",
                    run.converged_to_zero,
                    run.iters,
                    sig12(run.residual.iter().fold(0.0f64, |a, &b| a.max(b)))
                );
                return Ok(());
            }
            let t = de::bp_threshold(&p, &cfg, precision)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            println!("bracket_halfwidth={}", sig12(precision / 2.0));
            println!("threshold={}", sig12(t));
            Ok(())
        }
        Command::DeProfile {
            degrees,
            coupling,
            eps,
            max_iters,
            stride,
            out,
        } => {
            let p = assemble(&degrees, &coupling, None)?;
            print_config(&p, None, None);
            let mut cfg = DeConfig::new(eps);
            cfg.max_iters = max_iters;
            let run = de::run_de_traced(&p, &cfg).map_err(|e| CliError::Usage(e.to_string()))?;
            write_or_print(&out, &de::profile_csv(&run, stride))?;
            Ok(())
        }
        Command::Designrate { degrees, big_l, w } => {
            let (l1, l2, r1, r2) = degrees.degrees();
            let p = EnsembleParams::smoothed(l1, l2, r1, r2, big_l, w);
            p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            print_config(&p, None, None);
            let total = design_rate_total(&p).map_err(|e| CliError::Usage(e.to_string()))?;
            let coset = design_rate_wiretap(&p).map_err(|e| CliError::Usage(e.to_string()))?;
            println!("design_rate_total={}", sig12(total));
            println!("design_rate_wiretap={}", sig12(coset));
            Ok(())
        }
        Command::Region {
            eps_m,
            eps_w,
            samples,
            out,
        } => {
            let ch = WiretapChannelSpec::new(eps_m, eps_w)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            if samples < 2 {
                return Err(CliError::Usage("need at least 2 samples".into()));
            }
            println!("# eps_m={eps_m}");
            println!("# eps_w={eps_w}");
            let mut csv = String::from("# wtldpc region schema v1\nR,Re\n");
            for pt in ensemble::region_boundary(&ch, samples) {
                csv.push_str(&format!("{},{}\n", sig12(pt.rate), sig12(pt.equivocation)));
            }
            write_or_print(&out, &csv)?;
            println!(
                "# B=({},{}) C=({},{})",
                sig12(ch.secrecy_capacity()),
                sig12(ch.secrecy_capacity()),
                sig12(ch.capacity_main()),
                sig12(ch.secrecy_capacity())
            );
            Ok(())
        }
        Command::Sample {
            degrees,
            coupling,
            m,
            seed,
            mode,
            out,
        } => {
            let p = assemble(&degrees, &coupling, Some(m))?;
            print_config(&p, None, Some(seed));
            let mut rng = seeding::root_rng(seed);
            let graph = match p.variant {
                Variant::Uncoupled => sampler::sample_uncoupled(&p, m as usize, &mut rng)
                    .map_err(|e| CliError::Usage(e.to_string()))?,
                Variant::Chain => sampler::sample_chain(&p, &mut rng)
                    .map_err(|e| CliError::Usage(e.to_string()))?,
                Variant::Smoothed => {
                    let mode = match mode.as_str() {
                        "balanced" => SmoothedMode::Balanced,
                        "iid" => SmoothedMode::Iid,
                        "strict" => SmoothedMode::StrictProfiles,
                        other => return Err(CliError::Usage(format!("unknown mode {other}"))),
                    };
                    let s = sampler::sample_smoothed(&p, mode, &mut rng)
                        .map_err(|e| CliError::Usage(e.to_string()))?;
                    if s.rounding {
                        eprintln!("warning: profile counts rounded (divisibility relaxed)");
                    }
                    s.graph
                }
            };
            println!(
                "# n={} type1_checks={} type2_checks={}",
                graph.n(),
                graph.type1_checks(),
                graph.type2_checks()
            );
            write_or_print(&out, &graph.export_text())?;
            Ok(())
        }
        Command::Simulate {
            degrees,
            coupling,
            m,
            eps_m,
            eps_w,
            trials,
            seed,
            fixed_code,
            jsonl,
            summary,
        } => {
            let p = assemble(&degrees, &coupling, Some(m))?;
            let ch = WiretapChannelSpec::new(eps_m, eps_w)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            if trials == 0 {
                return Err(CliError::Usage("need at least one trial".into()));
            }
            print_config(&p, Some(ch), Some(seed));
            let mut cfg = CampaignConfig::new(trials, seed);
            cfg.fixed_code = fixed_code;
            let out = run_campaign(&p, &ch, &cfg)?;
            for (trial, err) in &out.errors {
                eprintln!("trial {trial}: {err}");
            }
            if let Some(path) = &jsonl {
                std::fs::write(path, wiretap::records_jsonl(&out.records))?;
                println!("# wrote {}", path.display());
            }
            let row = wiretap::summary_csv_row(&p, &out.summary);
            if let Some(path) = &summary {
                std::fs::write(path, format!("{}{}", wiretap::SUMMARY_CSV_HEADER, row))?;
                println!("# wrote {}", path.display());
            }
            println!(
                "trials={} completed={}",
                out.summary.trials, out.summary.completed
            );
            println!("Pe_bob={}", sig12(out.summary.pe_bob));
            println!("R_actual_mean={}", sig12(out.summary.r_actual_mean));
            println!("Re_mean={}", sig12(out.summary.re_mean));
            println!("Re_stderr={}", sig12(out.summary.re_stderr));
            Ok(())
        }
        Command::Equivocation {
            degrees,
            coupling,
            m,
            eps_w,
            trials,
            seed,
        } => {
            let p = assemble(&degrees, &coupling, Some(m))?;
            if !(0.0..=1.0).contains(&eps_w) {
                return Err(CliError::Usage(format!("eps_w {eps_w} not in [0,1]")));
            }
            if trials == 0 {
                return Err(CliError::Usage("need at least one trial".into()));
            }
            print_config(&p, None, Some(seed));
            let mut rng = seeding::task_rng(seed, 0);
            let g = sampler::sample(&p, &mut rng).map_err(|e| CliError::Usage(e.to_string()))?;
            let code = CosetCode::from_graph(&g)?;
            println!(
                "# n={} secret_dim={} rank_h1={} rank_h={}",
                code.n(),
                code.secret_dim(),
                code.rank_h1(),
                code.rank_h()
            );
            let x = BitVec::zeros(code.n());
            let mut trials_out = Vec::with_capacity(trials);
            for i in 0..trials {
                let mut rng = seeding::task_rng(seed, i as u64 + 1);
                let y = transmit_bec(&x, eps_w, &mut rng);
                trials_out.push(exact_equivocation(&code, &y.pattern)?);
            }
            let report = EquivocationReport::from_trials(code.n(), &trials_out);
            let n = code.n() as f64;
            println!("trials={}", report.trials);
            println!("Re_mean={}", sig12(report.h_s_given_z.mean / n));
            println!("Re_stderr={}", sig12(report.h_s_given_z.stderr / n));
            println!("Hx_given_z_mean_bits={}", sig12(report.h_x_given_z.mean));
            println!("Hx_given_sz_mean_bits={}", sig12(report.h_x_given_sz.mean));
            Ok(())
        }
        Command::Growth {
            l1,
            l2,
            r,
            points,
            out,
        } => {
            if points == 0 {
                return Err(CliError::Usage("need at least one point".into()));
            }
            println!("# l1={l1}");
            println!("# l2={l2}");
            println!("# r={r}");
            let csv = stopping::growth_csv(l1, l2, r, points)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            write_or_print(&out, &csv)?;
            let star =
                stopping::omega_star(l1, l2, r).map_err(|e| CliError::Runtime(e.to_string()))?;
            println!("omega_star={}", sig12(star));
            Ok(())
        }
        Command::Table1 {
            l_values,
            m,
            trials,
            seed,
            out,
        } => {
            let ch = WiretapChannelSpec::new(0.5, 0.75).expect("fixed channel");
            if trials == 0 {
                return Err(CliError::Usage("need at least one trial".into()));
            }
            println!("# table1: {{3,3,6,12,L}} chain over BEC-WT(0.5,0.75)");
            println!("# M={m} trials={trials} seed={seed}");
            let mut csv = String::from(
                "# wtldpc table1 schema v1\nL,M,trials,R_nominal,R_actual_mean,Re_mean,Re_stderr,R_ref,Re_ref,delta_R,delta_Re\n",
            );
            for &big_l in &l_values {
                let p = EnsembleParams::chain(3, 3, 6, 12, big_l).with_m(m);
                p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
                let r_nom = nominal_rate_chain(&p).map_err(|e| CliError::Usage(e.to_string()))?;
                let cfg = CampaignConfig::new(trials, seeding::derive_seed(seed, big_l as u64));
                let res = run_campaign(&p, &ch, &cfg)?;
                let reference = TABLE1_REFERENCE.iter().find(|(l, _, _)| *l == big_l);
                let (r_ref, re_ref) = reference.map_or((f64::NAN, f64::NAN), |(_, a, b)| (*a, *b));
                csv.push_str(&format!(
                    "{big_l},{m},{trials},{},{},{},{},{r_ref},{re_ref},{},{}\n",
                    sig12(r_nom),
                    sig12(res.summary.r_actual_mean),
                    sig12(res.summary.re_mean),
                    sig12(res.summary.re_stderr),
                    sig12(r_nom - r_ref),
                    sig12(res.summary.re_mean - re_ref),
                ));
                println!(
                    "L={big_l}: R_nominal={:.4} Re_mean={:.4} (ref R={r_ref:.4} Re={re_ref:.4})",
                    r_nom, res.summary.re_mean
                );
            }
            write_or_print(&out, &csv)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
