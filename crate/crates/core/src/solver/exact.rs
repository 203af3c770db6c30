use super::search::local_search_upper;
use super::{DiscReport, Evaluation, Method};
use crate::error::{Error, Result};
use crate::hypergraph::canonical::{enumerate_canonical_edges, imbalance, mask_elements};
use crate::hypergraph::Coloring;

/// Largest `n` for [`exact_discrepancy`].
pub const EXACT_CAP: u64 = 24;

/// Whether some coloring with `chi(1) = +1` keeps every edge within `d`.
/// Points are colored in increasing order; each edge is checked once its
/// largest point is colored.
fn feasible(by_top: &[Vec<u64>], d: u64) -> Option<u64> {
    fn go(v: usize, neg: u64, by_top: &[Vec<u64>], d: u64) -> Option<u64> {
        if v == by_top.len() {
            return Some(neg);
        }
        let choices: &[u64] = if v == 0 { &[0] } else { &[0, 1] };
        for &c in choices {
            let neg2 = neg | (c << v);
            if by_top[v].iter().all(|&m| imbalance(&[m], &[neg2]) <= d) {
                if let Some(found) = go(v + 1, neg2, by_top, d) {
                    return Some(found);
                }
            }
        }
        None
    }
    go(0, 0, by_top, d)
}

/// `min over colorings of max over canonical edges |chi(S)|`, by branch and bound
/// below a local-search upper bound.
pub fn exact_discrepancy(n: u64) -> Result<DiscReport> {
    if n > EXACT_CAP {
        return Err(Error::CapExceeded { n, cap: EXACT_CAP, what: "exact discrepancy" });
    }
    let edges = enumerate_canonical_edges(n, EXACT_CAP)?;
    let mut by_top = vec![Vec::new(); n as usize];
    for s in edges.iter() {
        by_top[63 - s[0].leading_zeros() as usize].push(s[0]);
    }
    let upper = local_search_upper(n, 4, 0, EXACT_CAP)?;
    let mut witness = upper.witness_coloring.clone();
    for d in 1..upper.disc_value {
        if let Some(neg) = feasible(&by_top, d) {
            let values = (0..n).map(|i| if neg >> i & 1 == 1 { -1 } else { 1 }).collect();
            witness = Coloring::new(values)?;
            break;
        }
    }
    let (value, idx) = edges.max_imbalance(&witness);
    Ok(DiscReport {
        n,
        method: Method::Exact,
        disc_value: value,
        witness_coloring: witness,
        witness_edge: mask_elements(edges.mask(idx)),
        evaluation: Evaluation::Enumerated { edge_count: edges.len() as u64 },
        trials: None,
        restarts: None,
        seed: None,
    })
}
