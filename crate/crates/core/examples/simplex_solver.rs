//! Uses the general-purpose LP solver on a small production-planning model
//! and prints the optimal plan with its shadow prices.
//!
//! Usage: `cargo run --example simplex_solver`

use aev_dispatch::lp::{solve, SolverOptions};
use aev_dispatch::lp::{LpProblem, Sense};

fn main() -> aev_dispatch::Result<()> {
    // maximize 5 chairs + 4 tables + 3 desks
    // subject to wood:   2c + 3t + 1d <= 5
    //            labour: 4c + 1t + 2d <= 11
    //            paint:  3c + 4t + 2d <= 8
    //            desks at most 1.5
    let mut p = LpProblem::new(3);
    p.objective = vec![5.0, 4.0, 3.0];
    p.set_bounds(2, 0.0, 1.5);
    let names = ["wood", "labour", "paint"];
    p.add_row([(0, 2.0), (1, 3.0), (2, 1.0)], Sense::Le, 5.0);
    p.add_row([(0, 4.0), (1, 1.0), (2, 2.0)], Sense::Le, 11.0);
    p.add_row([(0, 3.0), (1, 4.0), (2, 2.0)], Sense::Le, 8.0);

    let sol = solve(&p, &SolverOptions::default())?;
    println!("status {} in {} iterations", sol.status, sol.iterations);
    println!("objective {:.4}", sol.objective);
    for (name, x) in ["chairs", "tables", "desks"].iter().zip(&sol.x) {
        println!("  {name:<7} {x:.4}");
    }
    if let Some(duals) = &sol.duals {
        for (name, y) in names.iter().zip(duals) {
            let y = if y.abs() < 1e-12 { 0.0 } else { *y };
            println!("  shadow price of {name:<6} {y:.4}");
        }
    }
    if let Some(bound) = sol.dual_objective(&p) {
        println!("dual bound {bound:.4} (gap {:.2e})", bound - sol.objective);
    }
    Ok(())
}
