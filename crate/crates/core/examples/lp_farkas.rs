//! Exact feasibility: either a nonnegative solution or a Farkas vector.

use ssp_lmm::lp::{solve_feasibility, FeasibilityOutcome, FeasibilityProblem};
use ssp_lmm::rational::RationalMatrix;

fn show(name: &str, rows: &[&[i64]], rhs: &[i64]) {
    let a = RationalMatrix::from_i64_rows(rows).expect("rectangular");
    let b = rhs.iter().map(|&v| ssp_lmm::rational::int(v)).collect();
    let lp = FeasibilityProblem::new(a, b).expect("shapes agree");
    let outcome = solve_feasibility(&lp);
    match &outcome {
        FeasibilityOutcome::Feasible { x } => {
            let x: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            println!("{name}: feasible, x = [{}]", x.join(", "));
        }
        FeasibilityOutcome::Infeasible { y } => {
            let y: Vec<String> = y.iter().map(|v| v.to_string()).collect();
            println!("{name}: infeasible, y = [{}]", y.join(", "));
        }
    }
    println!("  certificate re-verifies: {}", outcome.verify(&lp));
}

fn main() {
    show("x1 + x2 = 1", &[&[1, 1]], &[1]);
    show("x1 - x2 = -1, x1 + x2 = 3", &[&[1, -1], &[1, 1]], &[-1, 3]);
    // x1 + x2 = 1 and x1 + x2 = 2 cannot both hold.
    show("contradictory rows", &[&[1, 1], &[1, 1]], &[1, 2]);
    show("x >= 0 with x = -3", &[&[1]], &[-3]);
}
