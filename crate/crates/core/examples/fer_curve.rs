//! FER of the 1.5 bpcu GF(64) PAS system under BMD and SMD.

use nbpas::airs::MetricKind;
use nbpas::analysis::{run_fer, FerConfig, StopRule};
use nbpas::code::NbLdpcCode;
use nbpas::galois::Field;
use nbpas::mapping::Constellation;
use nbpas::pas::{PasConfig, RateTarget};
use std::sync::Arc;

fn main() -> nbpas::Result<()> {
    let code = Arc::new(NbLdpcCode::construct(Arc::new(Field::new(6, None)?), 96, 8, 1)?);
    let cfg = PasConfig::build(Constellation::ask(3)?, code, RateTarget::Eta(1.5))?;
    let grid = [9.0, 9.5, 10.0, 10.5];
    println!("metric,snr_db,frames,errors,fer,ci_low,ci_high");
    for metric in [MetricKind::Bmd, MetricKind::Smd] {
        let fc = FerConfig {
            metric,
            stop: StopRule {
                min_errors: 30,
                max_frames: 20_000,
            },
            max_iter: 100,
            seed: 1,
        };
        for p in run_fer(&cfg, &grid, &fc)? {
            println!(
                "{metric},{},{},{},{:.3e},{:.3e},{:.3e}",
                p.snr_db, p.frames, p.errors, p.fer, p.ci_low, p.ci_high
            );
        }
    }
    Ok(())
}
