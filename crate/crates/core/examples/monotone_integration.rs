//! The optimal three-step second-order method on upwind advection: total
//! variation never grows while h <= C * dx.

use ssp_lmm::integrator::{lmm_integrate, monotonicity_sweep, TestProblem};
use ssp_lmm::optimizer::{extract_optimal_method, optimal_ssp, SspQuery};
use ssp_lmm::order::MethodCoefficients;

fn main() {
    let bracket = optimal_ssp(&SspQuery::explicit(3, 2)).expect("valid query");
    let method = extract_optimal_method(&bracket).expect("positive optimum");
    let problem = TestProblem::advection(100);
    let dx = problem.h_fe;
    println!("C = {}, dx = {dx}", bracket.r_lo);

    let hs: Vec<f64> = [0.25, 0.49, 0.5, 0.75, 1.0, 2.0].iter().map(|f| f * dx).collect();
    let sweep = monotonicity_sweep(&method, &problem, &hs, 200).expect("explicit method");
    for e in &sweep.entries {
        println!(
            "h = {:.2} dx  within C*h_FE: {:<5}  max violation {:+.3e}  {}",
            e.h / dx,
            e.within_threshold,
            e.max_violation,
            match e.passed {
                Some(true) => "ok",
                Some(false) => "FAIL",
                None => "(observational)",
            }
        );
    }

    let fe = MethodCoefficients::forward_euler();
    let decay = monotonicity_sweep(&fe, &TestProblem::decay(), &[0.5, 1.0, 2.0, 3.0], 200).expect("explicit method");
    println!("\nforward Euler on u' = -u: all guaranteed runs pass: {}", decay.all_passed);

    let run = lmm_integrate(&method, &problem, 0.49 * dx, 20).expect("explicit method");
    let mut csv = Vec::new();
    run.write_csv(&mut csv).expect("in-memory write");
    println!("\nfirst rows of the norm history CSV:");
    for line in String::from_utf8_lossy(&csv).lines().take(6) {
        println!("  {line}");
    }
}
