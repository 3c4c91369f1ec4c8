//! Builds ultra-sparse codes, encodes systematically and saves one as a file.

use nbpas::code::NbLdpcCode;
use nbpas::galois::{Field, FieldElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn main() -> nbpas::Result<()> {
    for (p, n, dc) in [(6, 96, 4), (6, 96, 6), (6, 96, 8), (8, 144, 12)] {
        let code = NbLdpcCode::construct(Arc::new(Field::new(p, None)?), n, dc, 1)?;
        println!(
            "GF({:3}) n_c = {n:3} d_c = {dc:2}: {} checks, rate {:.4}, girth {}, rank {}",
            1 << p,
            code.checks(),
            code.rate(),
            code.girth(),
            code.rank()
        );
    }

    let field = Arc::new(Field::new(6, None)?);
    let code = NbLdpcCode::construct(field.clone(), 96, 8, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let info: Vec<FieldElement> = (0..code.dimension())
        .map(|_| FieldElement(rng.gen_range(0..field.order()) as u16))
        .collect();
    let word = code.encode(&info)?;
    println!("syndrome of an encoded word is zero: {}", code.is_codeword(&word));

    let path = std::env::temp_dir().join("nbpas_f64_n96_dc8.alist");
    std::fs::write(&path, code.to_alist())?;
    let back = NbLdpcCode::from_alist(&std::fs::read_to_string(&path)?)?;
    println!("saved to {} and reloaded: identical = {}", path.display(), back.to_alist() == code.to_alist());
    Ok(())
}
