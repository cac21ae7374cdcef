//! Optimal SSP coefficients over a small grid, and one optimal method.

use ssp_lmm::optimizer::{extract_optimal_method, optimal_ssp, SspQuery};
use ssp_lmm::order::{order_residuals, threshold_factor, Variant};

fn main() {
    for variant in [Variant::Explicit, Variant::Implicit] {
        println!("{variant}:");
        print!("{:>4}", "k\\p");
        for p in 1..=4 {
            print!("{p:>14}");
        }
        println!();
        for k in 1..=7 {
            print!("{k:>4}");
            for p in 1..=4 {
                let cell = match optimal_ssp(&SspQuery::new(k, p, variant)) {
                    Ok(b) if b.primal_at_lo.is_none() => "none".into(),
                    Ok(b) if b.exact => b.r_lo.to_string(),
                    Ok(b) => format!("~{:.8}", b.midpoint_f64()),
                    Err(_) => "unbounded".into(),
                };
                print!("{cell:>14}");
            }
            println!();
        }
    }
    println!("(none: no method of that order exists at all)");

    let bracket = optimal_ssp(&SspQuery::explicit(4, 2)).expect("valid query");
    let method = extract_optimal_method(&bracket).expect("positive optimum");
    let join = |v: &[ssp_lmm::rational::Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    println!("\noptimal explicit 4-step, order 2 (C = {}):", bracket.r_lo);
    println!("  alpha = [{}]", join(&method.alpha));
    println!("  beta  = [{}]", join(&method.beta));
    println!("  order residuals: [{}]", join(&order_residuals(&method, 2)));
    println!("  threshold factor: {}", threshold_factor(&method));
    println!("  method JSON: {}", serde_json::to_string(&method).expect("serializable"));
}
