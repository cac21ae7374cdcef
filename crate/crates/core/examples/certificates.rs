//! Dual certificates: verification, root structure, audit, squaring and
//! the text format.

use ssp_lmm::certificate::{
    analyze_roots, canonical_explicit_bound_certificate, check_root_conditions, close_certificate,
    parse_certificate, square_certificate, structural_audit, verify_certificate, write_certificate,
};
use ssp_lmm::optimizer::{optimal_ssp, SspQuery};
use ssp_lmm::order::Variant;

fn main() {
    let q = canonical_explicit_bound_certificate(4, 2).expect("k, p >= 1");
    println!("{q}\n{}\n", verify_certificate(&q));

    let roots = analyze_roots(&q);
    println!("integer roots (root, multiplicity): {:?}", roots.integer_roots);
    println!("s(j) for j = 0..=k: {:?}", roots.s_table);
    for j in 0..=q.k() {
        let rep = check_root_conditions(&q, &roots, j);
        println!("  j = {j}: value and root forms agree: {}", rep.all_agree());
    }
    println!("\n{}\n", structural_audit(&q, Variant::Explicit));

    let sq = square_certificate(&q).expect("verified closed explicit");
    println!("squared: {sq}");
    println!("squared verifies: {}\n", verify_certificate(&sq).verdict);

    // The Farkas polynomial just above an optimum, closed and written out.
    let bracket = optimal_ssp(&SspQuery::explicit(5, 3)).expect("valid query");
    println!("open certificate from the optimizer: {}", bracket.dual_at_hi);
    let closed = close_certificate(&bracket.dual_at_hi).expect("verified open explicit");
    let text = write_certificate(&closed);
    print!("{text}");
    let back = parse_certificate(&text).expect("round trip");
    println!("parsed back identical: {}", back == closed);
}
