use crate::error::{Error, Result};
use crate::eval::{evaluate, quality, QualityReport};
use crate::model::{Gene, Instance, Solution};

pub const BRUTE_FORCE_MAX_GENES: usize = 10;

#[derive(Debug, Clone)]
pub struct BruteForce {
    pub best: Solution,
    pub report: QualityReport,
    /// Sequences evaluated.
    pub candidates: u64,
}

/// Minimum-cost schedule by enumeration. Decoding is rotation invariant, so
/// the first vehicle is pinned to the front and every order of the other
/// genes is tried.
pub fn brute_force(instance: &Instance) -> Result<BruteForce> {
    let n = instance.n_genes();
    if n > BRUTE_FORCE_MAX_GENES {
        return Err(Error::Refused(format!(
            "{n} genes exceeds the exhaustive search limit of {BRUTE_FORCE_MAX_GENES}"
        )));
    }
    let mut genes: Vec<Gene> = (0..n).map(Gene::from_index).collect();
    let mut best = genes.clone();
    let mut best_cost = quality(instance, &genes).cost;
    let mut candidates = 1u64;

    // Heap's algorithm over genes[1..]
    let tail = n - 1;
    let mut c = vec![0usize; tail];
    let mut i = 0;
    while i < tail {
        if c[i] < i {
            let j = if i % 2 == 0 { 0 } else { c[i] };
            genes.swap(1 + j, 1 + i);
            let cost = quality(instance, &genes).cost;
            candidates += 1;
            if cost < best_cost {
                best_cost = cost;
                best.copy_from_slice(&genes);
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }

    let best = Solution::new(best);
    let report = evaluate(instance, &best)?;
    Ok(BruteForce {
        best,
        report,
        candidates,
    })
}
