//! Design-rate formulas of the smoothed coupled ensemble, cross-checked by
//! counting check nodes on sampled instances.
//!
//! Run: cargo run --example design_rates

use wiretap_ldpc::ensemble::{design_rate_total, design_rate_wiretap, EnsembleParams};
use wiretap_ldpc::sampler::{sample_smoothed, SmoothedMode};
use wiretap_ldpc::seeding;

fn main() {
    let cases = [
        (3u32, 3u32, 6u32, 6u32, 10u32, 1u32, 120u32),
        (3, 3, 6, 12, 12, 2, 144),
        (2, 1, 6, 6, 8, 3, 90),
        (4, 3, 8, 12, 10, 2, 96),
    ];
    println!(
        "{:>22}  {:>10} {:>10}  {:>10} {:>10}",
        "ensemble", "total", "counted", "coset", "counted"
    );
    for (l1, l2, r1, r2, big_l, w, m) in cases {
        let p = EnsembleParams::smoothed(l1, l2, r1, r2, big_l, w).with_m(m);
        let total = design_rate_total(&p).unwrap();
        let coset = design_rate_wiretap(&p).unwrap();
        // Node counting, averaged over a few instances.
        let instances = 8;
        let mut c1 = 0usize;
        let mut c2 = 0usize;
        let mut n = 0usize;
        for i in 0..instances {
            let mut rng = seeding::task_rng(42, i);
            let g = sample_smoothed(&p, SmoothedMode::Balanced, &mut rng)
                .unwrap()
                .graph;
            c1 += g.type1_checks();
            c2 += g.type2_checks();
            n += g.n();
        }
        let total_counted = 1.0 - (c1 + c2) as f64 / n as f64;
        let coset_counted = c2 as f64 / n as f64;
        println!(
            "{{{l1},{l2},{r1},{r2},L={big_l},w={w}}}  {total:>10.6} {total_counted:>10.6}  {coset:>10.6} {coset_counted:>10.6}"
        );
    }
    println!("\nThe coset rate sits above l2/r2 and decreases toward it as L grows;");
    println!("the total rate sits below 1 - l1/r1 - l2/r2 and increases toward it.");
}
