// Degree, deficiency and neighborhood structure of extremal instances.

use sailfree::constructions::{ConstructionSpec, Layout, Variant};
use sailfree::system::{cycle_lengths, deficiency, neighborhood_partition};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for (variant, k) in [(Variant::C1, 3), (Variant::C1, 7), (Variant::C2, 6), (Variant::C4, 3)] {
        let h = ConstructionSpec::new(variant, k).with_seed(3).build()?;
        let def = deficiency(&h, h.vertex_set(), k as i64)?;
        println!("{variant} k={k}: max degree {} (k = {k}), Def(V) = {def} (k-3 = {})", h.max_degree(), k as i64 - 3);
    }

    // in the second construction, z_0 sees exactly X and Y, so its
    // complement holds only abc and the matchings M_a, M_b, M_c are the
    // colored cycle edges
    let k = 6;
    let h = ConstructionSpec::new(Variant::C2, k).with_seed(11).build()?;
    let lay = Layout { k };
    let part = neighborhood_partition(&h, lay.z(0), k as i64)?;
    println!("E0 {} E1 {} E2 {} E3 {:?}", part.e0.len(), part.e1.len(), part.e2.len(), part.e3);
    let union = part.matching_union(&[lay.a(), lay.b(), lay.c()]);
    println!("M_a u M_b u M_c: {} pairs, cycle lengths {:?}", union.len(), cycle_lengths(&union));
    for (x, d) in &part.d_table {
        println!("  x={x}: d1={} d2={} d3={}", d.d1, d.d2, d.d3);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
