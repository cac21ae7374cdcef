//! Optimal explicit third-order coefficients level off as `k` grows, and the
//! optimal methods use only three nonzero `β_j` next to each other plus `β_1`.

use std::time::Instant;

use ssp_lmm::optimizer::{optimal_ssp, support_analysis, SspQuery};

fn main() {
    println!("{:>3} {:>14} {:>8} {:>22} {:>22}", "k", "C (midpoint)", "probes", "witness support", "limiting support");
    for k in 6..=20 {
        let t = Instant::now();
        let b = optimal_ssp(&SspQuery::explicit(k, 3)).expect("valid query");
        let s = support_analysis(&b).expect("positive optimum");
        let fmt = |d: &[usize], b: &[usize]| format!("d{d:?} b{b:?}");
        println!(
            "{k:>3} {:>14.10} {:>8} {:>22} {:>22}  ({:.2?})",
            b.midpoint_f64(),
            b.probes,
            fmt(&s.witness_support.delta, &s.witness_support.beta),
            s.limiting_support
                .as_ref()
                .map_or("undetermined".into(), |l| fmt(&l.delta, &l.beta)),
            t.elapsed()
        );
    }
}
