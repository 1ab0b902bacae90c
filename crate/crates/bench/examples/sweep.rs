//! Prints a λ sweep for one of the presets.
//!
//!     cargo run --release -p sfa-bench --example sweep -- example1 0.1 10 9

use sfa_bench::{example3_comparison, lam_sweep, log_space};
use sfa_core::synth::{example1_preset, example3_preset, gen_example1, gen_example3};
use sfa_core::{FrequencyGrid, ProblemKind};

fn main() -> sfa_core::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let which = args.first().map_or("example1", String::as_str);
    let num = |i: usize, default: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(default);
    let lams = log_space(num(1, 0.1), num(2, 10.0), num(3, 9.0) as usize);

    let (x, grid, base, problem, support) = match which {
        "example3" => {
            let p = example3_preset();
            let m = p.pair_index;
            let y = gen_example3(p.default_seed)?.y;
            (y, FrequencyGrid::half(p.grid_size)?, p.solver, ProblemKind::P1, vec![m, m + 1])
        }
        _ => {
            let p = example1_preset();
            let support = p.bands.concat();
            (gen_example1()?.signal, FrequencyGrid::half(p.grid_size)?, p.solver, ProblemKind::P0, support)
        }
    };
    println!("lam,iterations,converged,objective,support_fraction,top");
    for pt in lam_sweep(&x, &grid, &base, problem, &lams, &support)? {
        println!(
            "{:.4},{},{},{:.6},{:.4},{:?}",
            pt.lam, pt.iterations, pt.converged, pt.objective, pt.support_fraction, pt.top
        );
    }
    if which == "example3" {
        let c = example3_comparison(example3_preset().default_seed)?;
        println!("sfa step {:?}", c.sfa);
        println!("lti step {:?}", c.lti);
    }
    Ok(())
}
