use procwass::linalg::Mat;
use procwass::ot::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_cloud(n: usize, d: usize, seed: u64, spread: f64) -> DiscreteMeasure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = Mat::from_fn(n, d, |_, _| rng.random_range(-spread..spread));
    DiscreteMeasure::uniform(points).unwrap()
}

fn main() {
    // Separated clouds: exact cost comparable to mean(C).
    let x = random_cloud(30, 2, 31, 2.0);
    let y = random_cloud(30, 2, 32, 2.0).translated(&[4.0, 1.0]).unwrap();
    let c = cost_matrix(&x, &y).unwrap();
    println!("mean C = {}, max C = {}", c.mean(), c.mat().max_abs());
    let exact = plan_cost(&solve_exact(&x, &y, &c).unwrap(), &c).unwrap();
    println!("exact = {exact}");

    for (eps_frac, max_iter) in [(1.0, 100_000), (0.1, 100_000), (0.05, 100_000), (0.01, 400_000)]
    {
        let eps = eps_frac * c.mean();
        match solve_sinkhorn_traced(&x, &y, &c, eps, max_iter, 1e-9, true) {
            Ok((plan, trace)) => {
                let cost = plan_cost(&plan, &c).unwrap();
                let mut violations = 0;
                let mut first_violation = None;
                for (k, w) in trace.windows(2).enumerate() {
                    if w[1] > w[0] + 1e-12 {
                        violations += 1;
                        if first_violation.is_none() {
                            first_violation = Some((k, w[0], w[1]));
                        }
                    }
                }
                println!(
                    "eps={eps:.4} iters={} cost={cost:.6} rel_gap={:.4e} trace_violations={violations} first={:?}",
                    trace.len(),
                    (cost - exact) / exact,
                    first_violation
                );
            }
            Err(e) => println!("eps={eps:.4} FAILED: {e}"),
        }
    }
}
