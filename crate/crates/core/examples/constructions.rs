// Builds every construction at k = 3 plus a few larger seeded instances
// and checks each against its expected role.

use sailfree::cli::{verify_report, Role};
use sailfree::constructions::{ConstructionSpec, TwoFactorSpec, Variant};
use sailfree::{transversal_design, truncated_design};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for variant in [Variant::C1, Variant::C2, Variant::C3, Variant::C4] {
        let spec = ConstructionSpec::new(variant, 3).resolve()?;
        let h = spec.build()?;
        let rep = verify_report(&h, Some(Role::Extremal3k1), None)?;
        println!("{variant} k=3: {h}  role check passed: {}", rep.passed());
    }

    // seeded free choices: two-factor, special edges, matchings
    for seed in 0..3 {
        let h = ConstructionSpec::new(Variant::C1, 5).with_seed(seed).build()?;
        let rep = verify_report(&h, Some(Role::Extremal3k1), None)?;
        println!("c1 k=5 seed {seed}: m={} max degree {} passed {}", rep.m, rep.max_degree, rep.passed());
    }

    // a 2-factor made of a 6-cycle and a 4-cycle; the special edges sit on the 6-cycle
    let tf = TwoFactorSpec::from_cycle_halves(&[3, 2]);
    let h = ConstructionSpec::new(Variant::C1, 5).with_two_factor(tf).build()?;
    println!("c1 k=5 on cycles 6+4: {h}");

    let h = ConstructionSpec::new(Variant::C2, 6).with_seed(7).build()?;
    println!("c2 k=6 seed 7: n={} m={}", h.n(), h.edge_count());

    for k in [3, 4] {
        let td = transversal_design(k, None)?;
        let tr = truncated_design(k)?;
        let a = verify_report(&td, Some(Role::Td), None)?.passed();
        let b = verify_report(&tr, Some(Role::Truncated), None)?.passed();
        println!("k={k}: td m={} ({a}), truncated m={} ({b})", td.edge_count(), tr.edge_count());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
