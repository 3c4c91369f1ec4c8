//! Gray-labeled 8-ASK and Maxwell–Boltzmann distributions fitted to
//! several amplitude entropies.

use nbpas::mapping::{mb_fit, Constellation};

fn main() -> nbpas::Result<()> {
    let c = Constellation::ask(3)?;
    println!("point  label");
    for (i, x) in c.points().iter().enumerate() {
        println!("{x:5}  {:03b}", c.labels()[i]);
    }
    println!();
    println!("H(A)   nu       scale    P_A");
    for h in [0.5, 1.0, 1.25, 1.5, 1.75, 2.0] {
        let d = mb_fit(&c, h)?;
        let p: Vec<String> = d.p_amp.iter().map(|p| format!("{p:.4}")).collect();
        println!("{h:<5}  {:.5}  {:.5}  [{}]", d.nu, d.scale, p.join(", "));
    }
    Ok(())
}
