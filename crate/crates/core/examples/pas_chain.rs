//! The shaped chain at 1.5 bits per channel use: matcher, systematic
//! GF(64) code, sign bits from parity, and the receiver back to bits.

use nbpas::airs::MetricKind;
use nbpas::analysis::AwgnChannel;
use nbpas::code::NbLdpcCode;
use nbpas::decoder::decode;
use nbpas::galois::Field;
use nbpas::mapping::Constellation;
use nbpas::pas::{CodedModulation, PasConfig, RateTarget};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn main() -> nbpas::Result<()> {
    let code = Arc::new(NbLdpcCode::construct(Arc::new(Field::new(6, None)?), 96, 8, 1)?);
    let cfg = PasConfig::build(Constellation::ask(3)?, code, RateTarget::Eta(1.5))?;
    let lay = cfg.layout();
    println!("channel uses n = {}, extra sign bits = {}", lay.channel_uses(), lay.extra_signs());
    println!(
        "matcher: target rate {:.4} ({:.0} bits), realized k = {} ({:.4})",
        cfg.target_matcher_rate(),
        cfg.ideal_matcher_bits(),
        cfg.matcher_bits(),
        cfg.matcher_rate()
    );
    println!("eta: target {:.4}, realized {:.4}", cfg.ideal_eta(), cfg.eta());
    println!("composition {:?}", cfg.composition().counts());

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let bits: Vec<u8> = (0..cfg.info_bits_per_frame()).map(|_| rng.gen_range(0..2)).collect();
    let frame = cfg.transmit(&bits)?;
    let power = frame.symbols.iter().map(|x| x * x).sum::<f64>() / frame.symbols.len() as f64;
    println!("average symbol energy {power:.4}");

    let ch = AwgnChannel::from_snr_db(10.0);
    let y = ch.transmit(&frame.symbols, &mut rng);
    for metric in [MetricKind::Bmd, MetricKind::Smd] {
        let soft = cfg.soft_input(&y, ch.sigma(), metric)?;
        let out = decode(cfg.code(), &soft, 100)?;
        let rx = cfg.receive(&out.hard);
        println!(
            "{metric}: converged {} in {} iterations, bits recovered {}",
            out.converged,
            out.iterations,
            rx.map(|r| r == bits).unwrap_or(false)
        );
    }
    Ok(())
}
