//! Closed-form upper bounds against computed optima, and the step count
//! beyond which positive SSP coefficients are guaranteed.

use ssp_lmm::bounds::{existence_step_threshold, upper_bound_explicit, upper_bound_implicit};
use ssp_lmm::optimizer::{optimal_ssp, SspQuery};

fn main() {
    println!("{:>3} {:>3} {:>10} {:>16} {:>10} {:>16}", "k", "p", "exp bound", "C_exp", "imp bound", "C_imp");
    for k in 2..=6 {
        for p in 2..=4 {
            let be = upper_bound_explicit(k, p).expect("k, p >= 1");
            let bi = upper_bound_implicit(k, p).expect("p >= 2");
            let ce = optimal_ssp(&SspQuery::explicit(k, p)).expect("valid query");
            let ci = optimal_ssp(&SspQuery::implicit(k, p)).expect("valid query");
            println!(
                "{k:>3} {p:>3} {:>10} {:>16.10} {:>10} {:>16.10}",
                be.bound_value.to_string(),
                ce.midpoint_f64(),
                bi.bound_value.to_string(),
                ci.midpoint_f64()
            );
        }
    }

    println!("\nexistence thresholds:");
    for p in 1..=8 {
        println!("  p = {p}: k >= {}", existence_step_threshold(p));
    }
    for p in 2..=4 {
        let k = existence_step_threshold(p);
        let b = optimal_ssp(&SspQuery::explicit(k, p)).expect("valid query");
        println!("  C_exp({k}, {p}) in [{:.8}, {:.8}]", ssp_lmm::rational::to_f64(&b.r_lo), ssp_lmm::rational::to_f64(&b.r_hi));
    }
}
