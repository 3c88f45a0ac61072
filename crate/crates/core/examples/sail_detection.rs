// The two sail detectors and the incremental guard on a small fixture.

use sailfree::sail::{count_sails_bruteforce, Rejection};
use sailfree::{find_sail_bruteforce, find_sail_fast, make_system, SailGuard, Triple};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // three edges through 0 and a crossbar through one vertex of each
    let sail = make_system(7, [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5]])?;
    println!("fixture: {sail}");
    println!("brute force: {}", find_sail_bruteforce(&sail).unwrap());
    println!("fast:        {}", find_sail_fast(&sail).unwrap());
    println!("sails: {}", count_sails_bruteforce(&sail));

    // the same edges pushed one at a time; the last one is refused
    let mut guard = SailGuard::new(7);
    for [a, b, c] in [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5]] {
        match guard.push(Triple::new(a, b, c).unwrap()) {
            Ok(()) => println!("push {a}{b}{c}: ok, N(0) = {}", guard.neighborhood(0)),
            Err(Rejection::SailCreated(w)) => println!("push {a}{b}{c}: refused, {w}"),
            Err(e) => println!("push {a}{b}{c}: refused, {e}"),
        }
    }
    let refused = guard.push(Triple::new(1, 2, 3).unwrap());
    println!("push 123: {refused:?}");

    // a sail-free system: the transversal design on 6 vertices
    let td = sailfree::transversal_design(2, None)?;
    println!("{td}: brute {:?}, fast {:?}", find_sail_bruteforce(&td), find_sail_fast(&td));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
