//! Implicit order-2p optima never exceed twice the explicit order-p optima,
//! and squaring an explicit certificate proves it.

use ssp_lmm::bounds::check_impexp_relation;
use ssp_lmm::optimizer::{optimal_ssp, SspQuery};
use ssp_lmm::rational::to_f64;

fn main() {
    println!("{:>3} {:>3} {:>14} {:>14} {:>8} {:>8}", "k", "p", "2 C_exp(k,p)", "C_imp(k,2p)", "holds", "squared");
    for k in 1..=6 {
        for p in 1..=3 {
            let exp = optimal_ssp(&SspQuery::explicit(k, p)).expect("valid query");
            let imp = optimal_ssp(&SspQuery::implicit(k, 2 * p)).expect("valid query");
            let rep = check_impexp_relation(k, p, &exp, &imp).expect("matching queries");
            println!(
                "{k:>3} {p:>3} {:>14.10} {:>14.10} {:>8} {:>8}",
                2.0 * to_f64(&exp.r_hi),
                to_f64(&imp.r_lo),
                rep.holds,
                rep.squared_certificate_verified
            );
        }
    }
}
