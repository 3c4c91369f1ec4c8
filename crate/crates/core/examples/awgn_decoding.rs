//! Uniform 8-ASK with a rate-1/2 GF(64) code: one frame over AWGN, decoded
//! with bit-metric and symbol-metric soft input.

use nbpas::airs::MetricKind;
use nbpas::analysis::AwgnChannel;
use nbpas::code::NbLdpcCode;
use nbpas::decoder::Decoder;
use nbpas::galois::Field;
use nbpas::mapping::Constellation;
use nbpas::pas::{CodedModulation, UniformSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn main() -> nbpas::Result<()> {
    let code = Arc::new(NbLdpcCode::construct(Arc::new(Field::new(6, None)?), 96, 4, 1)?);
    let sys = UniformSystem::new(Constellation::ask(3)?, code)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bits: Vec<u8> = (0..sys.info_bits_per_frame()).map(|_| rng.gen_range(0..2)).collect();
    let frame = sys.transmit(&bits)?;
    let mut decoder = Decoder::new(sys.code());
    for snr in [9.0, 10.5, 12.0] {
        let ch = AwgnChannel::from_snr_db(snr);
        let y = ch.transmit(&frame.symbols, &mut rng);
        for metric in [MetricKind::Bmd, MetricKind::Smd] {
            let soft = sys.soft_input(&y, ch.sigma(), metric)?;
            let raw = soft
                .hard_decision()
                .iter()
                .zip(&frame.codeword)
                .filter(|(a, b)| a != b)
                .count();
            let out = decoder.decode(&soft, 100)?;
            let ok = sys.receive(&out.hard).map(|r| r == bits).unwrap_or(false);
            println!(
                "{snr:4} dB {metric}: {raw:2} channel symbol errors, converged {} after {:3} iterations, frame ok {ok}",
                out.converged, out.iterations
            );
        }
    }
    Ok(())
}
