//! Permutation crossovers and mutations on gene sequences.
//!
//! Segments are inclusive index ranges `[lo, hi]`. Random variants draw the
//! segment uniformly and delegate to the `_at` forms.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::Gene;

fn check_parents(a: &[Gene], b: &[Gene]) -> Result<()> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::Domain(format!("parents differ in length: {} vs {}", n, b.len())));
    }
    let mut seen = vec![0u8; n];
    for (g, bit) in a.iter().map(|g| (g, 1)).chain(b.iter().map(|g| (g, 2))) {
        let i = g.index();
        if i >= n || seen[i] & bit != 0 {
            return Err(Error::Domain(format!("parents are not permutations of one gene set ({i})")));
        }
        seen[i] |= bit;
    }
    Ok(())
}

fn segment<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let x = rng.random_range(0..n);
    let y = rng.random_range(0..n);
    (x.min(y), x.max(y))
}

fn check_segment(n: usize, lo: usize, hi: usize) -> Result<()> {
    if lo > hi || hi >= n {
        return Err(Error::Domain(format!("segment [{lo}, {hi}] outside 0..{n}")));
    }
    Ok(())
}

/// Cycle crossover: cycles alternate between taking genes from `a` and `b`,
/// starting with `a`.
pub fn crossover_cx(a: &[Gene], b: &[Gene]) -> Result<Vec<Gene>> {
    check_parents(a, b)?;
    let n = a.len();
    let mut pos_a = vec![0usize; n];
    for (i, g) in a.iter().enumerate() {
        pos_a[g.index()] = i;
    }
    let mut child: Vec<Option<Gene>> = vec![None; n];
    let mut from_a = true;
    for start in 0..n {
        if child[start].is_some() {
            continue;
        }
        let mut i = start;
        loop {
            child[i] = Some(if from_a { a[i] } else { b[i] });
            i = pos_a[b[i].index()];
            if i == start {
                break;
            }
        }
        from_a = !from_a;
    }
    Ok(child.into_iter().map(|g| g.expect("every position is on a cycle")).collect())
}

/// Order crossover: keeps `a[lo..=hi]` in place and fills the other
/// positions, from `hi + 1` wrapping around, with the missing genes in the
/// order they appear in `b` starting after `hi`.
pub fn crossover_ox_at(a: &[Gene], b: &[Gene], lo: usize, hi: usize) -> Result<Vec<Gene>> {
    check_parents(a, b)?;
    let n = a.len();
    check_segment(n, lo, hi)?;
    let mut kept = vec![false; n];
    for g in &a[lo..=hi] {
        kept[g.index()] = true;
    }
    let mut child = a.to_vec();
    let mut write = (hi + 1) % n;
    for k in 0..n {
        let g = b[(hi + 1 + k) % n];
        if !kept[g.index()] {
            child[write] = g;
            write = (write + 1) % n;
        }
    }
    Ok(child)
}

pub fn crossover_ox<R: Rng + ?Sized>(a: &[Gene], b: &[Gene], rng: &mut R) -> Result<Vec<Gene>> {
    check_parents(a, b)?;
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let (lo, hi) = segment(a.len(), rng);
    crossover_ox_at(a, b, lo, hi)
}

/// Partially mapped crossover: keeps `a[lo..=hi]`; other positions take the
/// gene of `b`, followed through the segment mapping until it is free.
pub fn crossover_pmx_at(a: &[Gene], b: &[Gene], lo: usize, hi: usize) -> Result<Vec<Gene>> {
    check_parents(a, b)?;
    let n = a.len();
    check_segment(n, lo, hi)?;
    let mut pos_a = vec![0usize; n];
    for (i, g) in a.iter().enumerate() {
        pos_a[g.index()] = i;
    }
    let in_segment = |g: Gene| (lo..=hi).contains(&pos_a[g.index()]);
    let mut child = a.to_vec();
    for i in (0..lo).chain(hi + 1..n) {
        let mut g = b[i];
        while in_segment(g) {
            g = b[pos_a[g.index()]];
        }
        child[i] = g;
    }
    Ok(child)
}

pub fn crossover_pmx<R: Rng + ?Sized>(a: &[Gene], b: &[Gene], rng: &mut R) -> Result<Vec<Gene>> {
    check_parents(a, b)?;
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let (lo, hi) = segment(a.len(), rng);
    crossover_pmx_at(a, b, lo, hi)
}

pub fn mutate_swap_at(genes: &mut [Gene], i: usize, j: usize) {
    genes.swap(i, j);
}

/// Reverses `genes[lo..=hi]`.
pub fn mutate_reverse_at(genes: &mut [Gene], lo: usize, hi: usize) {
    genes[lo..=hi].reverse();
}

/// Moves the gene at `from` so that it ends up at index `to`.
pub fn mutate_insert_at(genes: &mut [Gene], from: usize, to: usize) {
    if from < to {
        genes[from..=to].rotate_left(1);
    } else {
        genes[to..=from].rotate_right(1);
    }
}

pub fn mutate_swap<R: Rng + ?Sized>(genes: &mut [Gene], rng: &mut R) {
    if genes.len() >= 2 {
        let (i, j) = segment(genes.len(), rng);
        mutate_swap_at(genes, i, j);
    }
}

pub fn mutate_reverse<R: Rng + ?Sized>(genes: &mut [Gene], rng: &mut R) {
    if genes.len() >= 2 {
        let (lo, hi) = segment(genes.len(), rng);
        mutate_reverse_at(genes, lo, hi);
    }
}

pub fn mutate_insert<R: Rng + ?Sized>(genes: &mut [Gene], rng: &mut R) {
    if genes.len() >= 2 {
        let from = rng.random_range(0..genes.len());
        let to = rng.random_range(0..genes.len());
        mutate_insert_at(genes, from, to);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn genes(v: &[usize]) -> Vec<Gene> {
        v.iter().map(|&i| Gene::from_index(i)).collect()
    }

    fn ints(g: &[Gene]) -> Vec<usize> {
        g.iter().map(|g| g.index()).collect()
    }

    #[test]
    fn ox_reference() {
        let a = genes(&[0, 1, 2, 3, 4, 5]);
        let b = genes(&[5, 4, 3, 2, 1, 0]);
        // values shifted down by one from 1..6
        assert_eq!(ints(&crossover_ox_at(&a, &b, 1, 3).unwrap()), vec![4, 1, 2, 3, 0, 5]);
    }

    #[test]
    fn cx_reference() {
        let a = genes(&[0, 1, 2, 3]);
        let b = genes(&[1, 0, 3, 2]);
        assert_eq!(ints(&crossover_cx(&a, &b).unwrap()), vec![0, 1, 3, 2]);
    }

    #[test]
    fn pmx_reference() {
        let a = genes(&[0, 1, 2, 3, 4, 5, 6, 7]);
        let b = genes(&[2, 6, 4, 0, 7, 5, 1, 3]);
        // segment keeps 3,4,5; b's 4 maps through a to b[4] = 7
        assert_eq!(
            ints(&crossover_pmx_at(&a, &b, 3, 5).unwrap()),
            vec![2, 6, 7, 3, 4, 5, 1, 0]
        );
    }

    #[test]
    fn mismatched_parents_are_rejected() {
        let a = genes(&[0, 1, 2]);
        assert!(matches!(crossover_cx(&a, &genes(&[0, 1])), Err(Error::Domain(_))));
        assert!(matches!(crossover_ox_at(&a, &genes(&[0, 1, 1]), 0, 1), Err(Error::Domain(_))));
        assert!(matches!(crossover_pmx_at(&a, &genes(&[0, 1, 3]), 0, 1), Err(Error::Domain(_))));
        assert!(matches!(crossover_ox_at(&a, &a, 2, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn mutation_references() {
        let mut g = genes(&[0, 1, 2, 3, 4]);
        mutate_swap_at(&mut g, 0, 4);
        assert_eq!(ints(&g), vec![4, 1, 2, 3, 0]);
        mutate_reverse_at(&mut g, 1, 3);
        assert_eq!(ints(&g), vec![4, 3, 2, 1, 0]);
        mutate_insert_at(&mut g, 0, 2);
        assert_eq!(ints(&g), vec![3, 2, 4, 1, 0]);
        mutate_insert_at(&mut g, 4, 1);
        assert_eq!(ints(&g), vec![3, 0, 2, 4, 1]);
    }

    #[test]
    fn mutation_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let original = genes(&[3, 0, 4, 1, 2, 5]);
        let mut g = original.clone();
        mutate_swap_at(&mut g, 2, 2);
        assert_eq!(g, original);
        mutate_reverse_at(&mut g, 0, 5);
        mutate_reverse_at(&mut g, 0, 5);
        assert_eq!(g, original);
        for _ in 0..10_000 {
            match rng.random_range(0..3) {
                0 => mutate_swap(&mut g, &mut rng),
                1 => mutate_reverse(&mut g, &mut rng),
                _ => mutate_insert(&mut g, &mut rng),
            }
        }
        assert!(is_perm(&g, 6));
    }

    fn is_perm(g: &[Gene], n: usize) -> bool {
        let mut v = ints(g);
        v.sort_unstable();
        v == (0..n).collect::<Vec<_>>()
    }

    proptest! {
        #[test]
        fn operators_preserve_permutations(n in 1usize..40, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut a: Vec<Gene> = (0..n).map(Gene::from_index).collect();
            let mut b = a.clone();
            a.shuffle(&mut rng);
            b.shuffle(&mut rng);
            prop_assert!(is_perm(&crossover_cx(&a, &b).unwrap(), n));
            prop_assert!(is_perm(&crossover_ox(&a, &b, &mut rng).unwrap(), n));
            prop_assert!(is_perm(&crossover_pmx(&a, &b, &mut rng).unwrap(), n));
            let mut m = a.clone();
            mutate_swap(&mut m, &mut rng);
            mutate_reverse(&mut m, &mut rng);
            mutate_insert(&mut m, &mut rng);
            prop_assert!(is_perm(&m, n));
        }

        #[test]
        fn crossover_of_identical_parents_is_identity(n in 1usize..30, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut a: Vec<Gene> = (0..n).map(Gene::from_index).collect();
            a.shuffle(&mut rng);
            prop_assert_eq!(&crossover_cx(&a, &a).unwrap(), &a);
            prop_assert_eq!(&crossover_ox(&a, &a, &mut rng).unwrap(), &a);
            prop_assert_eq!(&crossover_pmx(&a, &a, &mut rng).unwrap(), &a);
        }
    }
}
