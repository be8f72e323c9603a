//! Extent of the tensored magic state and the single-qubit target factor.
//!
//! cargo run --example extent

use corrsparse::magic_states::{self, h_magic_relation_check, tilde_coeffs, Phi};

fn main() -> corrsparse::Result<()> {
    let pi4 = Phi::pi_over_4();
    let c = tilde_coeffs(pi4);
    println!(
        "tilde coefficients at pi/4: c0 = {:.9}, c1 = {:.9}",
        c.zero, c.plus
    );

    let q = magic_states::target_qubit(pi4);
    println!("target qubit: ({:.9}, {:.9})", q[0], q[1]);

    println!("{:>4} {:>14} {:>14}", "t", "extent", "log2");
    for t in [1, 2, 4, 8, 16, 30, 50] {
        let xi = magic_states::extent(pi4, t)?;
        println!("{t:>4} {xi:>14.6} {:>14.6}", xi.log2());
    }

    let report = h_magic_relation_check();
    println!(
        "phased S H |T> equals target factor: {} (max dev {:.2e})",
        report.versus_target.holds, report.versus_target.max_deviation
    );
    println!(
        "phased S H |T> equals (|0> + sqrt(i)|1>)/sqrt 2: {} (max dev {:.2e})",
        report.versus_sqrt_i_form.holds, report.versus_sqrt_i_form.max_deviation
    );

    for phi in [0.3, 0.6, 1.0, 1.4] {
        let phi = Phi::new(phi)?;
        println!(
            "phi = {:.2}: extent(t=10) = {:.6}",
            phi.value(),
            magic_states::extent(phi, 10)?
        );
    }
    Ok(())
}
