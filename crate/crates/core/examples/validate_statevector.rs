//! Checks the label-level simulation against full statevectors.

use hshift::cli::validate_suite;
use hshift::group_arith::Modulus;
use hshift::recover::{iqft_distribution, iqft_distribution_direct, odd_qubits};

fn main() -> hshift::Result<()> {
    let rep = validate_suite(8, 8, 0)?;
    println!("{rep:#?}");
    for n in [3u64, 11, 101, 1001] {
        let nq = odd_qubits(&Modulus::new(n)?, 2);
        let direct = iqft_distribution_direct(5 % n, n, nq)?;
        let closed = iqft_distribution(5 % n, n, nq)?;
        let dev = direct.iter().zip(&closed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("N = {n:>4}: IQFT law, direct vs closed form, max deviation {dev:.2e}");
    }
    Ok(())
}
