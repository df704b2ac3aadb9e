//! Runs the spectrum-matching experiment and prints per-scale RMSE.
//!
//! `cargo run --release --example spectrum_matching [fast]`

use qspec::experiments::{spectrum_matching_experiment, TrainConfig};

fn main() -> qspec::Result<()> {
    let cfg = match std::env::args().nth(1).as_deref() {
        Some("fast") => TrainConfig::fast(),
        _ => TrainConfig::published(),
    };
    let start = std::time::Instant::now();
    let report = spectrum_matching_experiment(&cfg)?;
    for s in &report.summary {
        println!("b = {:>5}: mean RMSE {:.4} ± {:.4}  {:?}", s.b, s.mean, s.std, s.rmse);
    }
    if let Some(w) = &report.wilcoxon_b1_vs_b10 {
        println!("Wilcoxon (b = 1 vs b = 10): p = {:.4}, W+ = {}", w.p_two_sided, w.w_plus);
    }
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
