//! A small node-count sweep: mean query counts per cell and the fitted
//! log-log slope of membership queries against n.
//!
//! Set `OMTBDD_THREADS` to limit the worker count.

use omtbdd::sweep::{cell_means, run_sweep, write_csv, Axis, SweepSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec =
        SweepSpec { trials: 5, seed: 1, ..SweepSpec::new(Axis::Nodes, vec![25, 50, 100, 200], 0, 256, 8) };
    let rows = run_sweep(&spec)?;
    write_csv(&rows[..3], std::io::stdout().lock())?;
    println!("...");

    let means = cell_means(&rows);
    for (n, mq, eq) in &means {
        println!("n={n:4}  mean MQ {mq:9.1}  mean EQ {eq:6.1}");
    }
    let pts: Vec<(f64, f64)> = means.iter().map(|(n, mq, _)| ((*n as f64).ln(), mq.ln())).collect();
    let k = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / k, sy / k);
    let slope = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / pts.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
    println!("log-log slope of mean MQ: {slope:.2}");
    println!("bound violations: {}", rows.iter().filter(|r| r.bound_violation).count());
    Ok(())
}
