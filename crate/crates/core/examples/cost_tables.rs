//! Prints both reference cost tables and a sweep of the solver exponent.

use hshift::cost_model::{exponents, render_table, table_report, Strategy};

fn main() {
    print!("{}", render_table(&table_report()));
    println!();
    println!("{:>5}  {:>9} {:>9}  {:>9} {:>9}", "c", "q(quad)", "t(quad)", "q(min)", "t(min)");
    for i in 1..=10 {
        let c = i as f64 / 10.0;
        let quad = exponents(c, Strategy::QuadGap).unwrap();
        let min = exponents(c, Strategy::MinClassical).unwrap();
        println!(
            "{c:>5.1}  {:>9.3} {:>9.3}  {:>9.3} {:>9.3}",
            quad.query_exp.unwrap(),
            quad.time_exp,
            min.query_exp.unwrap(),
            min.time_exp
        );
    }
}
