//! Required SNR for the SMD and BMD rates at the operating points of the
//! 8-ASK and 16-ASK modes, uniform and shaped.

use nbpas::airs::{required_snr, DistPolicy, MetricKind};
use nbpas::mapping::Constellation;

fn main() -> nbpas::Result<()> {
    let modes = [
        ("8-ASK uniform SE=1.5", 3, 1.5, None),
        ("8-ASK PAS SE=1.5 Rc=3/4", 3, 1.5, Some(0.75)),
        ("8-ASK uniform SE=2.0", 3, 2.0, None),
        ("8-ASK PAS SE=2.0 Rc=3/4", 3, 2.0, Some(0.75)),
        ("16-ASK uniform SE=3.0", 4, 3.0, None),
        ("16-ASK PAS SE=3.0 Rc=5/6", 4, 3.0, Some(5.0 / 6.0)),
    ];
    println!("mode,policy,bmd_db,smd_db");
    for (name, m, eta, rc) in modes {
        let c = Constellation::ask(m)?;
        let policies: Vec<(&str, DistPolicy)> = match rc {
            None => vec![("uniform", DistPolicy::Uniform)],
            Some(rc) => vec![
                ("fixed H(A)", DistPolicy::pas(eta, rc, m)),
                ("optimized nu", DistPolicy::OptimizedNu),
            ],
        };
        for (pname, policy) in policies {
            let bmd = required_snr(MetricKind::Bmd, eta, &c, policy)?;
            let smd = required_snr(MetricKind::Smd, eta, &c, policy)?;
            println!("{name},{pname},{bmd:.3},{smd:.3}");
        }
    }
    Ok(())
}
