//! Reproduction of the reference results for the {3,3,6,12,L} chain family
//! over BEC-WT(0.5, 0.75): transmission rate R and equivocation Re by L.
//!
//! The published numbers used M = 1000; this demo runs M = 100 with fewer
//! trials and still lands within a few thousandths. The full-size run is
//! `wtldpc table1 --M 1000 --trials 200 --seed 1`.
//!
//! Run: cargo run --release --example reference_table

use wiretap_ldpc::ensemble::{nominal_rate_chain, EnsembleParams, WiretapChannelSpec};
use wiretap_ldpc::seeding;
use wiretap_ldpc::wiretap::{run_campaign, CampaignConfig};

const REFERENCE: [(u32, f64, f64); 3] = [
    (20, 0.2622, 0.2276),
    (30, 0.2582, 0.235),
    (40, 0.2562, 0.2387),
];

fn main() {
    let ch = WiretapChannelSpec::new(0.5, 0.75).unwrap();
    let trials = 60;
    println!(
        "{:>4} {:>10} {:>10} {:>10} {:>10} {:>9}",
        "L", "R_nominal", "R_ref", "Re_mean", "Re_ref", "delta_Re"
    );
    for (big_l, r_ref, re_ref) in REFERENCE {
        let p = EnsembleParams::chain(3, 3, 6, 12, big_l).with_m(100);
        let r_nom = nominal_rate_chain(&p).unwrap();
        let cfg = CampaignConfig::new(trials, seeding::derive_seed(9, big_l as u64));
        let out = run_campaign(&p, &ch, &cfg).unwrap();
        println!(
            "{big_l:>4} {r_nom:>10.4} {r_ref:>10.4} {:>10.4} {re_ref:>10.4} {:>+9.4}",
            out.summary.re_mean,
            out.summary.re_mean - re_ref
        );
    }
    println!("\nthe equivocation climbs toward the rate as L grows: the gap");
    println!("between what Alice sends and what Eve misses closes.");
}
