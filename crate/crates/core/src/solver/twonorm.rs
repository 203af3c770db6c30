use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::FamilyE0;
use crate::fourier::translate_values;
use crate::hypergraph::{Coloring, TranslatedEdgeValue};

/// The total must reach `n^3 / TWO_NORM_DENOMINATOR`.
pub const TWO_NORM_DENOMINATOR: u128 = 90_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoNormReport {
    pub n: u64,
    /// `sum over E in E0, a in Z of |chi(a + E)|^2`
    pub total: u128,
    /// `n^3 / 90000`
    pub bound: f64,
    pub family_size: usize,
    pub max_abs: TranslatedEdgeValue,
    /// `sqrt(total / (2 n |E0|))`; at most `2n` offsets per edge contribute, so
    /// some translate is at least this large.
    pub derived_disc_lb: f64,
    pub total_ok: bool,
    /// `max |chi(a + E)| > sqrt(n) / 1200`
    pub max_ok: bool,
}

impl TwoNormReport {
    pub fn ok(&self) -> bool {
        self.total_ok && self.max_ok
    }
}

pub fn two_norm(chi: &Coloring, fam: &FamilyE0) -> Result<TwoNormReport> {
    let n = chi.n() as u64;
    if fam.n != n {
        return Err(Error::FamilyMismatch(format!("family for n = {} used with n = {n}", fam.n)));
    }
    let (total, best) = fam
        .edges
        .par_iter()
        .map(|fe| {
            let vals = translate_values(chi, &fe.edge);
            let base = 1 - fe.edge.span() as i64;
            let sum: u128 = vals.iter().map(|v| (v * v) as u128).sum();
            let (i, v) = vals
                .iter()
                .enumerate()
                .max_by_key(|(i, v)| (v.unsigned_abs(), std::cmp::Reverse(*i)))
                .map(|(i, &v)| (i, v))
                .unwrap_or((0, 0));
            let tv = TranslatedEdgeValue { edge: fe.edge, offset: base + i as i64, value: v };
            (sum, tv)
        })
        .reduce(
            || (0, TranslatedEdgeValue { edge: fam.edges[0].edge, offset: 1, value: 0 }),
            |a, b| {
                let best = if b.1.value.unsigned_abs() > a.1.value.unsigned_abs() { b.1 } else { a.1 };
                (a.0 + b.0, best)
            },
        );
    let nn = n as u128;
    let m = best.value.unsigned_abs() as u128;
    Ok(TwoNormReport {
        n,
        total,
        bound: (n as f64).powi(3) / TWO_NORM_DENOMINATOR as f64,
        family_size: fam.len(),
        max_abs: best,
        derived_disc_lb: (total as f64 / (2.0 * n as f64 * fam.len() as f64)).sqrt(),
        total_ok: total * TWO_NORM_DENOMINATOR >= nn * nn * nn,
        max_ok: m * m * 1200 * 1200 > nn,
    })
}
