//! Rate-equivocation region of an erasure wiretap channel, and the degree
//! selections targeting each branch of its boundary.
//!
//! Run: cargo run --example region

use wiretap_ldpc::ensemble::{
    region_boundary, select_degrees_high_rate, select_degrees_secrecy, WiretapChannelSpec,
};

fn main() {
    let ch = WiretapChannelSpec::new(0.5, 0.75).unwrap();
    println!(
        "BEC-WT(0.5, 0.75): C_m = {}, C_w = {}, secrecy capacity = {}",
        ch.capacity_main(),
        ch.capacity_wiretap(),
        ch.secrecy_capacity()
    );

    println!("\nboundary polyline (R, Re):");
    for pt in region_boundary(&ch, 11) {
        println!("  ({:.3}, {:.3})", pt.rate, pt.equivocation);
    }

    // Perfect-secrecy branch: pick degrees for a rate below the secrecy
    // capacity.
    for rate in [0.1, 0.2, 0.25] {
        let sel = select_degrees_secrecy(&ch, rate, 12).unwrap();
        println!(
            "\nperfect secrecy at R = {rate}: degrees {{l1={}, l2={}, r={}}}{}",
            sel.params.l1,
            sel.params.l2,
            sel.params.r1,
            match sel.warning {
                Some(w) => format!("  (warning: {w:?})"),
                None => String::new(),
            }
        );
    }

    // High-rate branch: rates above the secrecy capacity leak, the target
    // equivocation stays at C_m - C_w.
    for rate in [0.3, 0.5] {
        let sel = select_degrees_high_rate(&ch, rate, 12).unwrap();
        println!(
            "high rate at R = {rate}: degrees {{l1={}, l2={}, r={}}}, target Re = {}",
            sel.params.l1,
            sel.params.l2,
            sel.params.r1,
            ch.secrecy_capacity()
        );
    }

    // Out-of-range requests are rejected.
    let err = select_degrees_secrecy(&ch, 0.3, 12).unwrap_err();
    println!("\nR = 0.3 on the secrecy branch: {err}");
}
