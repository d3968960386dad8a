use hckit_core::catalog::{self, Params, VerifyOpts};

fn main() {
    for ex in ["ex1", "ex2", "cyl", "d_domain", "ex3"] {
        let t0 = std::time::Instant::now();
        let params = Params::default_for(ex);
        match catalog::verify(ex, &params, &VerifyOpts::default()) {
            Ok(rep) => {
                println!("== {ex} ({:?}) all_pass={}", t0.elapsed(), rep.all_pass);
                for c in &rep.checks {
                    if !c.pass {
                        println!("  FAIL {}: value={:.3e} expected={:.3e} tol={:.1e}", c.name, c.value, c.expected, c.tolerance);
                    }
                }
            }
            Err(e) => println!("== {ex} ERROR: {e}"),
        }
    }
}
