//! Constant-composition matching of uniform bits onto shaped amplitudes.

use nbpas::mapping::{mb_fit, Constellation};
use nbpas::matcher::Composition;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> nbpas::Result<()> {
    let c = Constellation::ask(3)?;
    let d = mb_fit(&c, 1.25)?;
    let comp = Composition::for_distribution(&d.p_amp, 192)?;
    println!("composition {:?} over {} amplitudes", comp.counts(), comp.len());
    println!(
        "k = {} input bits, rate {:.4} (target H(A) = 1.25, empirical {:.4})",
        comp.input_bits(),
        comp.rate(),
        comp.empirical_entropy()
    );

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let bits: Vec<u8> = (0..comp.input_bits()).map(|_| rng.gen_range(0..2)).collect();
    let amps = comp.encode(&bits)?;
    let levels: Vec<String> = amps[..24].iter().map(|&a| (2 * a + 1).to_string()).collect();
    println!("first amplitudes: {} ...", levels.join(" "));
    assert_eq!(comp.decode(&amps)?, bits);
    println!("inverse matcher recovers all {} bits", bits.len());
    Ok(())
}
