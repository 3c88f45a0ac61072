// Exact maxima for n = 4..=10 next to the closed forms, plus a search that
// hits its node limit.

use sailfree::cli::table;
use sailfree::search::SearchError;
use sailfree::{max_sail_free, upper_bound, SearchOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let threads = std::env::var("SAILFREE_THREADS")
        .ok()
        .and_then(|t| t.parse().ok())
        .unwrap_or(1);
    let opts = SearchOptions::default().with_workers(threads);
    println!("{:>3} {:>4} {:>6} {:>10}  verdict", "n", "max", "bound", "nodes");
    for row in table(4, 10, &opts)? {
        println!(
            "{:>3} {:>4} {:>6} {:>10}  {}",
            row.n,
            row.max_edges,
            upper_bound(row.n),
            row.nodes_explored,
            row.verdict
        );
    }

    let r = max_sail_free(10, &opts)?;
    println!("n=10 witness: {}", r.witness);

    match max_sail_free(10, &opts.clone().with_node_limit(1000)) {
        Err(SearchError::LimitExceeded(r)) => {
            println!("limited run: best {} after {} nodes, exhausted {}", r.max_edges, r.nodes_explored, r.exhausted)
        }
        other => println!("limited run finished: {other:?}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
