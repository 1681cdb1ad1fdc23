//! Sampling finite Tanner-graph instances: structure, export format, and a
//! peeling-decoder round trip on the sampled code.
//!
//! Run: cargo run --example sample_graph

use wiretap_ldpc::ensemble::EnsembleParams;
use wiretap_ldpc::gf2::BitVec;
use wiretap_ldpc::sampler::sample_chain;
use wiretap_ldpc::seeding;
use wiretap_ldpc::wiretap::{peel_decode, transmit_bec, PeelOutcome};

fn main() {
    // A tiny chain instance, small enough to print whole.
    let p = EnsembleParams::chain(3, 3, 6, 12, 1).with_m(4);
    let mut rng = seeding::root_rng(7);
    let g = sample_chain(&p, &mut rng).unwrap();
    println!(
        "chain {{3,3,6,12,L=1}}, M=4: n={}, type-1 checks={}, type-2 checks={}",
        g.n(),
        g.type1_checks(),
        g.type2_checks()
    );
    println!(
        "\nsparse export (`type row degree vars...`):\n{}",
        g.export_text()
    );

    // A bigger instance decoded by peeling well below threshold.
    let p = EnsembleParams::chain(3, 3, 6, 12, 8).with_m(64);
    let g = sample_chain(&p, &mut rng).unwrap();
    let (h1, h2) = g.to_parity_matrices();
    let h = h1.stack(&h2).unwrap();
    let x = BitVec::zeros(g.n()); // the all-zero codeword
    let y = transmit_bec(&x, 0.60, &mut rng);
    println!(
        "peeling the full code of a {{3,3,6,12,L=8}}, M=64 instance at eps=0.60 ({} erasures):",
        y.pattern.count()
    );
    match peel_decode(&h, &y).unwrap() {
        PeelOutcome::Resolved(recovered) => {
            assert_eq!(recovered, x);
            println!("  fully resolved, recovered word matches");
        }
        PeelOutcome::Stuck(residual) => {
            println!("  stuck on a stopping set of {} variables", residual.len());
        }
    }
    // Above the full system's threshold (0.7409) peeling stalls.
    let y = transmit_bec(&x, 0.78, &mut rng);
    match peel_decode(&h, &y).unwrap() {
        PeelOutcome::Resolved(_) => println!("peeling at eps=0.78: resolved (unlikely)"),
        PeelOutcome::Stuck(residual) => println!(
            "peeling at eps=0.78: stuck, residual stopping set of {} variables",
            residual.len()
        ),
    }
}
