//! Exact equivocation of a coset code from GF(2) ranks, checked against a
//! brute-force posterior on a hand-sized code.
//!
//! The wiretapper misses the erased set E. For linear codes every
//! conditional entropy is a subspace dimension, so the measurement is exact
//! in integer bits: H(S|Z) = rank([H1;H2]_E) - rank(H1_E).
//!
//! Run: cargo run --example exact_equivocation

use wiretap_ldpc::gf2::{BitMatrix, BitVec};
use wiretap_ldpc::seeding;
use wiretap_ldpc::wiretap::{exact_equivocation, CosetCode, ErasurePattern};

fn main() {
    // n=4: H1 the overall parity, H2 one extra check -> one secret bit.
    let h1 = BitMatrix::from_rows(&[&[1, 1, 1, 1]]);
    let h2 = BitMatrix::from_rows(&[&[1, 1, 0, 0]]);
    let code = CosetCode::new(h1, h2).unwrap();
    println!(
        "n={} rank(H1)={} rank(H)={} secret_dim={}",
        code.n(),
        code.rank_h1(),
        code.rank_h(),
        code.secret_dim()
    );

    for erased in [vec![], vec![0, 1], vec![0, 2], vec![0, 1, 2, 3]] {
        let pattern = ErasurePattern::from_indices(4, &erased);
        let t = exact_equivocation(&code, &pattern).unwrap();
        println!(
            "erased {erased:?}: H(S|Z)={} H(X|Z)={} H(X|S,Z)={}",
            t.h_s_given_z, t.h_x_given_z, t.h_x_given_sz
        );
    }
    println!("\nerasing {{0,1}} reveals s through the observed parity x2+x3;");
    println!("erasing {{0,2}} leaves the secret bit pinned down by nothing.\n");

    // Spot check against enumerating the eight codewords of the type-1 code.
    let pattern = ErasurePattern::from_indices(4, &[0, 2]);
    let mut rng = seeding::root_rng(1);
    let mut consistent_secrets = std::collections::HashSet::new();
    for _ in 0..200 {
        let s = BitVec::random(1, &mut rng);
        let x = code.encode(&s, &mut rng).unwrap();
        // Observation: x restricted to {1, 3}.
        if !x.get(1) && !x.get(3) {
            consistent_secrets.insert(u8::from(s.get(0)));
        }
    }
    println!(
        "codewords agreeing with the observation carry {} distinct secrets: H(S|Z) = {} bit",
        consistent_secrets.len(),
        (consistent_secrets.len() as f64).log2()
    );
    let t = exact_equivocation(&code, &pattern).unwrap();
    assert_eq!(t.h_s_given_z, 1);
}
