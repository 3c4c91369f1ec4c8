//! Bit-metric decoding lifts the field/constellation coupling: GF(256) with
//! shaped 16-ASK has no symbol-metric demapper, but runs under BMD.

use nbpas::airs::MetricKind;
use nbpas::analysis::{run_fer, FerConfig, StopRule};
use nbpas::code::NbLdpcCode;
use nbpas::demap::{compatibility, DemapMode};
use nbpas::galois::Field;
use nbpas::mapping::Constellation;
use nbpas::pas::{CodedModulation, PasConfig, RateTarget};
use std::sync::Arc;

fn main() -> nbpas::Result<()> {
    println!("p  m  uniform-SMD  PAS-SMD  BMD");
    for (p, m) in [(6, 3), (6, 2), (8, 4), (8, 3), (5, 3)] {
        let show = |mode| match compatibility(p, m, mode) {
            Some(c) => format!("ℓ={}", c.ell.unwrap_or(1)),
            None => "-".to_string(),
        };
        println!(
            "{p}  {m}  {:11}  {:7}  {}",
            show(DemapMode::UniformSmd),
            show(DemapMode::PasSmd),
            show(DemapMode::Bmd)
        );
    }

    let code = Arc::new(NbLdpcCode::construct(Arc::new(Field::new(8, None)?), 144, 12, 1)?);
    let cfg = PasConfig::build(Constellation::ask(4)?, code, RateTarget::Eta(3.0))?;
    println!("GF(256) + 16-ASK PAS: SMD {:?}", cfg.supports(MetricKind::Smd).err());
    let fc = FerConfig {
        metric: MetricKind::Bmd,
        stop: StopRule {
            min_errors: 10,
            max_frames: 200,
        },
        max_iter: 50,
        seed: 1,
    };
    for p in run_fer(&cfg, &[19.0, 20.0], &fc)? {
        println!("BMD {:4} dB: {} errors in {} frames", p.snr_db, p.errors, p.frames);
    }
    Ok(())
}
