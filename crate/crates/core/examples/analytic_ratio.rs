//! The coherent/incoherent ratio in closed form, B/(gamma_p + gamma_f) *
//! (n^2 + n/2pi)/n^2, and what it says: with a broadband source and narrow
//! lines the coherent term dominates by orders of magnitude at any flux,
//! and at low photon number per mode (n << 1) the quantum term 1/2pi*n
//! takes over, giving the linear (rather than quadratic) intensity
//! dependence.
//!
//! Run with: cargo run --example analytic_ratio

use dctpa::analytic::{coherent_incoherent_ratio, dominance_threshold, RatioInputs};
use dctpa::units::bandwidth_from_nm;

fn main() -> dctpa::Result<()> {
    let b = bandwidth_from_nm(1033.3, 100.0);
    let gamma_p = bandwidth_from_nm(516.65, 0.04);
    let gamma_f = bandwidth_from_nm(516.65, 0.08);

    println!(
        "B = {:.3e} rad/s, gamma_p = {:.3e} rad/s, gamma_f = {:.3e} rad/s",
        b, gamma_p, gamma_f
    );
    println!(
        "bandwidth ratio B/(gamma_p+gamma_f) = {:.3e}",
        b / (gamma_p + gamma_f)
    );
    println!();
    println!("n (photons/mode)   coherent/incoherent   coherent dominant?");
    for n in [1e-6, 1e-3, 1.0 / (2.0 * std::f64::consts::PI), 1.0, 1e3] {
        let inputs = RatioInputs::new(b, gamma_p, gamma_f, n)?;
        println!(
            "{:<18.3e} {:<21.4e} {}",
            n,
            coherent_incoherent_ratio(&inputs)?,
            dominance_threshold(&inputs)
        );
    }
    println!();

    // how narrow would the source have to be for the background to win?
    let n = 1.0e3;
    let b_critical = (gamma_p + gamma_f) * n * n / (n * n + n / (2.0 * std::f64::consts::PI));
    println!(
        "at n = {n}: incoherent would dominate only below B = {:.3e} rad/s (~{:.4} nm)",
        b_critical,
        100.0 * b_critical / b
    );
    Ok(())
}
