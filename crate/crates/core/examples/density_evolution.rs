//! Density-evolution threshold of a (2, d_c) ensemble.
//!
//! `cargo run --example density_evolution -- <p> <m> <d_c> <uniform|R_dm> <smd|bmd> [population]`

use nbpas::airs::MetricKind;
use nbpas::analysis::{de_threshold, DeConfig, DeEnsemble, Shaping};
use nbpas::galois::Field;
use nbpas::mapping::Constellation;
use std::sync::Arc;
use std::time::Instant;

fn main() -> nbpas::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let get = |i: usize, d: &str| args.get(i).cloned().unwrap_or_else(|| d.to_string());
    let p: u32 = get(0, "6").parse().unwrap();
    let m: u32 = get(1, "3").parse().unwrap();
    let dc: usize = get(2, "4").parse().unwrap();
    let shaping = match get(3, "uniform").as_str() {
        "uniform" => Shaping::Uniform,
        r => Shaping::Pas {
            matcher_rate: r.parse().unwrap(),
        },
    };
    let metric: MetricKind = get(4, "bmd").parse()?;
    let mut cfg = DeConfig::default();
    if let Some(n) = args.get(5) {
        cfg.population = n.parse().unwrap();
    }
    let ens = DeEnsemble {
        field: Arc::new(Field::new(p, None)?),
        check_degree: dc,
        constellation: Constellation::ask(m)?,
        shaping,
        metric,
    };
    let start = Instant::now();
    let limit = ens.rate_limit_db()?;
    let t = de_threshold(&ens, &cfg, 1)?;
    println!("GF(2^{p}), {}-ASK, d_c = {dc}, {shaping:?}, {metric}", 1 << m);
    println!("rate limit {limit:.3} dB, DE threshold {:.3} dB", t.snr_db);
    for r in &t.runs {
        println!(
            "  {:7.3} dB  {}  {:3} iterations  error {:.2e}",
            r.snr_db,
            if r.converged { "converged" } else { "failed   " },
            r.iterations,
            r.error
        );
    }
    println!("elapsed {:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}
