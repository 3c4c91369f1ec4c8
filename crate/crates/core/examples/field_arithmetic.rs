//! GF(64) arithmetic and the bit mapping used to carry field symbols.

use nbpas::galois::Field;

fn main() -> nbpas::Result<()> {
    let f = Field::new(6, None)?;
    println!("GF({}) with primitive polynomial {:#x}", f.order(), f.poly());
    let a = f.alpha_pow(5);
    let b = f.alpha_pow(40);
    println!("a = α^5 = {a}, b = α^40 = {b}");
    println!("a + b = {}", f.add(a, b));
    println!("a · b = {} = α^{}", f.mul(a, b), f.log(f.mul(a, b))?);
    println!("a / b = {}", f.div(a, b)?);
    println!("a⁻¹ = {}", f.inv(a)?);

    for bits in [[1u8, 0, 0, 0, 0, 0], [0, 0, 0, 0, 0, 1], [1, 0, 1, 1, 0, 0]] {
        let c = f.beta(&bits)?;
        println!("β({bits:?}) = {c}, back: {:?}", f.beta_inv(c));
    }
    Ok(())
}
