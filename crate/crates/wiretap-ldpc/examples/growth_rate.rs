//! Stopping-set weight enumerators: the asymptotic growth rate, its first
//! positive zero, and the exact finite-length expectation against counts on
//! sampled graphs.
//!
//! Run: cargo run --example growth_rate

use wiretap_ldpc::ensemble::EnsembleParams;
use wiretap_ldpc::sampler::sample_uncoupled;
use wiretap_ldpc::seeding;
use wiretap_ldpc::stopping::{
    enumerate_stopping_sets, growth_rate, growth_rate_standard, mean_enumerator_exact, omega_star,
    ratio_to_f64, GrowthRateQuery,
};

fn main() {
    // Two-edge growth rate equals the merged ensemble's for equal check
    // degrees, for every split of the variable degree.
    println!("growth rate (nats/symbol) of {{l1,l2,r}} vs merged (l1+l2, r):");
    for omega in [0.02, 0.1, 0.3] {
        let two = growth_rate(&GrowthRateQuery::new(1, 2, 6, omega).unwrap()).unwrap();
        let merged = growth_rate_standard(3, 6, omega).unwrap();
        println!("  omega={omega}: {{1,2,6}} {two:+.9}  (3,6) {merged:+.9}");
    }

    // Negative growth at small omega means no sublinear stopping sets: the
    // first positive zero bounds the relative minimum stopping distance.
    for (l1, l2, r) in [(1, 2, 6), (3, 3, 12)] {
        let star = omega_star(l1, l2, r).unwrap();
        println!("omega* for {{{l1},{l2},{r}}} = {star:.6}");
    }

    // Exact expected counts at finite length vs exhaustive enumeration.
    let (l1, l2, r, n) = (1u32, 2u32, 3u32, 6usize);
    println!("\n{{1,2,3}} at n={n}: E[N(n,a)] exact vs sampled average (2000 graphs):");
    let p = EnsembleParams::uncoupled(l1, l2, r, r);
    let trials = 2000;
    let mut sums = [0u64; 4];
    for i in 0..trials {
        let mut rng = seeding::task_rng(3, i);
        let g = sample_uncoupled(&p, n, &mut rng).unwrap();
        let counts = enumerate_stopping_sets(&g, 3).unwrap();
        for (a, &c) in counts.iter().enumerate() {
            sums[a] += c;
        }
    }
    for a in 1..=3u64 {
        let exact = ratio_to_f64(&mean_enumerator_exact(l1, l2, r, n as u64, a).unwrap());
        let sampled = sums[a as usize] as f64 / trials as f64;
        println!("  a={a}: exact {exact:.4}  sampled {sampled:.4}");
    }
}
