//! Prints exact optimal lengths next to the counting bound for tiny spaces.

use dbcover::search::{optimal_length, SearchOptions};
use dbcover::spaces::Space;

fn main() -> dbcover::Result<()> {
    let mut spaces = Vec::new();
    for n in 2..=5 {
        for r in 0..n.min(3) {
            spaces.push(Space::hamming(2, n, r)?);
        }
    }
    for n in 3..=5 {
        for r in 1..n {
            spaces.push(Space::permutation(n, r)?);
        }
    }
    for space in spaces {
        let result = optimal_length(&space, &SearchOptions::for_space(&space))?;
        println!(
            "{space}: lower {} M_opt {:?} witness {} ({} nodes)",
            result.lower_bound,
            result.optimal_length,
            result.witness.map_or("-".to_string(), |w| w.to_string()),
            result.nodes_explored
        );
    }
    Ok(())
}
