//! Pheromone bookkeeping: a dense edge matrix for MMAS and Partial-ACO with
//! a matrix, and on-demand reconstruction from the ant population for the
//! matrix-free Partial-ACO.

use crate::error::{Error, Result};
use crate::model::{Gene, Solution};

/// Relative deposit `(g_best / l_best)^alpha` of an ant whose best solution
/// has quality `l_best` while the colony best is `g_best`.
pub fn deposit_amount(l_best: f64, g_best: f64, alpha: f64) -> Result<f64> {
    if !(l_best.is_finite() && g_best.is_finite() && l_best > 0.0 && g_best > 0.0) {
        return Err(Error::Domain(format!(
            "qualities must be positive and finite (l_best = {l_best}, g_best = {g_best})"
        )));
    }
    if g_best > l_best {
        return Err(Error::Domain(format!(
            "g_best {g_best} is worse than l_best {l_best}"
        )));
    }
    Ok(pow(g_best / l_best, alpha))
}

/// Like [`deposit_amount`] but total over degenerate zero qualities, which
/// a solver can legitimately reach (an empty fleet tour has `C = 0`).
pub(crate) fn relative_deposit(l_best: f64, g_best: f64, alpha: f64) -> f64 {
    if l_best <= g_best {
        1.0
    } else if g_best <= 0.0 {
        0.0
    } else {
        pow(g_best / l_best, alpha)
    }
}

/// `x^e` with the common small integer exponents unrolled.
#[inline]
pub(crate) fn pow(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else if e == 2.0 {
        x * x
    } else if e == 3.0 {
        x * x * x
    } else if e == 0.0 {
        1.0
    } else {
        x.powf(e)
    }
}

/// Dense `n x n` pheromone levels with optional `[tau_min, tau_max]` bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMatrix {
    n: usize,
    tau: Vec<f64>,
    bounds: Option<(f64, f64)>,
}

impl EdgeMatrix {
    pub fn new(n: usize, initial: f64) -> Self {
        EdgeMatrix {
            n,
            tau: vec![initial; n * n],
            bounds: None,
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, from: Gene, to: Gene) -> f64 {
        self.tau[from.index() * self.n + to.index()]
    }

    #[inline]
    pub(crate) fn get_idx(&self, from: usize, to: usize) -> f64 {
        self.tau[from * self.n + to]
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }

    pub fn set_bounds(&mut self, tau_min: f64, tau_max: f64) -> Result<()> {
        if !(tau_min >= 0.0 && tau_min <= tau_max && tau_max.is_finite()) {
            return Err(Error::Domain(format!(
                "bounds [{tau_min}, {tau_max}] are not ordered and finite"
            )));
        }
        self.bounds = Some((tau_min, tau_max));
        self.clamp();
        Ok(())
    }

    pub fn fill(&mut self, value: f64) {
        self.tau.fill(value);
        self.clamp();
    }

    fn clamp(&mut self) {
        if let Some((lo, hi)) = self.bounds {
            for t in &mut self.tau {
                *t = t.clamp(lo, hi);
            }
        }
    }

    /// `tau <- (1 - rho) * tau` on every edge, then clamp.
    pub fn evaporate(&mut self, rho: f64) -> Result<()> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::Domain(format!("evaporation rate {rho} outside (0, 1)")));
        }
        let keep = 1.0 - rho;
        for t in &mut self.tau {
            *t *= keep;
        }
        self.clamp();
        Ok(())
    }

    /// Adds `amount` to every consecutive edge of `tour`, including the wrap
    /// edge from the last gene back to the first.
    pub fn deposit_tour(&mut self, tour: &[Gene], amount: f64) -> Result<()> {
        if !(amount > 0.0 && amount.is_finite()) {
            return Err(Error::Domain(format!("deposit amount {amount} must be positive")));
        }
        let len = tour.len();
        for k in 0..len {
            let i = tour[k].index();
            let j = tour[(k + 1) % len].index();
            let t = &mut self.tau[i * self.n + j];
            *t += amount;
            if let Some((lo, hi)) = self.bounds {
                *t = t.clamp(lo, hi);
            }
        }
        Ok(())
    }

    /// Pheromone on the undirected edge `{a, b}`: `tau[a][b] + tau[b][a]`.
    #[inline]
    pub fn undirected(&self, a: Gene, b: Gene) -> f64 {
        self.get(a, b) + self.get(b, a)
    }

    pub fn entries(&self) -> &[f64] {
        &self.tau
    }
}

#[derive(Debug, Clone)]
struct Member {
    genes: Vec<Gene>,
    /// `position[g]` is where gene `g` sits in `genes`.
    position: Vec<u32>,
    quality: f64,
}

impl Member {
    fn new(solution: &Solution, quality: f64) -> Self {
        let mut position = vec![0u32; solution.len()];
        for (i, g) in solution.genes.iter().enumerate() {
            position[g.index()] = i as u32;
        }
        Member {
            genes: solution.genes.clone(),
            position,
            quality,
        }
    }

    #[inline]
    fn neighbours(&self, gene: usize) -> (usize, usize) {
        let n = self.genes.len();
        let p = self.position[gene] as usize;
        let next = self.genes[if p + 1 == n { 0 } else { p + 1 }].index();
        let prev = self.genes[if p == 0 { n - 1 } else { p - 1 }].index();
        (next, prev)
    }
}

/// Read-only snapshot of every ant's best solution, indexed for constant
/// time successor and predecessor lookups. Memory is `O(ants * genes)`.
#[derive(Debug, Clone)]
pub struct PopulationView {
    members: Vec<Member>,
    alpha: f64,
    g_best: f64,
    amounts: Vec<f64>,
}

impl PopulationView {
    /// `alpha` is the exponent of the relative deposit.
    pub fn new<'a>(
        members: impl IntoIterator<Item = (&'a Solution, f64)>,
        alpha: f64,
    ) -> Self {
        let members: Vec<Member> = members
            .into_iter()
            .map(|(s, q)| Member::new(s, q))
            .collect();
        let mut view = PopulationView {
            members,
            alpha,
            g_best: f64::INFINITY,
            amounts: Vec::new(),
        };
        view.refresh();
        view
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn g_best(&self) -> f64 {
        self.g_best
    }

    pub fn quality(&self, member: usize) -> f64 {
        self.members[member].quality
    }

    pub fn genes(&self, member: usize) -> &[Gene] {
        &self.members[member].genes
    }

    /// Per-member deposit `(g_best / l_best)^alpha`.
    pub fn amounts(&self) -> &[f64] {
        &self.amounts
    }

    /// Replaces one member's solution. Call [`PopulationView::refresh`] once
    /// all replacements of a barrier are applied.
    pub fn replace(&mut self, member: usize, solution: &Solution, quality: f64) {
        let m = &mut self.members[member];
        m.genes.clear();
        m.genes.extend_from_slice(&solution.genes);
        for (i, g) in solution.genes.iter().enumerate() {
            m.position[g.index()] = i as u32;
        }
        m.quality = quality;
    }

    pub fn refresh(&mut self) {
        self.g_best = self
            .members
            .iter()
            .map(|m| m.quality)
            .fold(f64::INFINITY, f64::min);
        let (g, alpha) = (self.g_best, self.alpha);
        self.amounts = self
            .members
            .iter()
            .map(|m| relative_deposit(m.quality, g, alpha))
            .collect();
    }

    /// Number of `f64`/`u32`/gene slots held, for memory accounting.
    pub fn footprint(&self) -> usize {
        self.members
            .iter()
            .map(|m| m.genes.len() + m.position.len())
            .sum::<usize>()
            + self.amounts.len()
    }

    /// Adds each member's deposit to `tau[g]` for the gene after and the
    /// gene before `current` in that member's sequence, when `open(g)`.
    /// Touched genes are appended to `touched` the first time they gain
    /// pheromone.
    #[inline]
    pub(crate) fn scatter(
        &self,
        current: usize,
        open: impl Fn(usize) -> bool,
        tau: &mut [f64],
        touched: &mut Vec<u32>,
    ) {
        for (m, &amount) in self.members.iter().zip(&self.amounts) {
            if amount <= 0.0 {
                continue;
            }
            let (next, prev) = m.neighbours(current);
            for g in [next, prev] {
                if open(g) {
                    if tau[g] == 0.0 {
                        touched.push(g as u32);
                    }
                    tau[g] += amount;
                }
            }
        }
    }
}

/// Pheromone reconstructed from the population on the edges between
/// `current` and each gene of `unvisited`, counting both the edge leaving
/// `current` and the edge arriving at it. Returns one weight per entry of
/// `unvisited`; genes no ant connects to `current` get 0.
pub fn reconstruct_weights(
    population: &PopulationView,
    current: Gene,
    unvisited: &[Gene],
    alpha: f64,
) -> Vec<f64> {
    let g_best = population.g_best();
    // each direction is summed on its own, as in the two matrix cells
    let mut leaving = vec![0.0; unvisited.len()];
    let mut arriving = vec![0.0; unvisited.len()];
    for m in &population.members {
        let amount = relative_deposit(m.quality, g_best, alpha);
        let (next, prev) = m.neighbours(current.index());
        for (k, g) in unvisited.iter().enumerate() {
            if g.index() == next {
                leaving[k] += amount;
            }
            if g.index() == prev {
                arriving[k] += amount;
            }
        }
    }
    leaving.iter().zip(&arriving).map(|(a, b)| a + b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn genes(ix: &[usize]) -> Vec<Gene> {
        ix.iter().map(|&i| Gene::from_index(i)).collect()
    }

    #[test]
    fn deposit_amount_examples() {
        assert_eq!(deposit_amount(100.0, 100.0, 3.0).unwrap(), 1.0);
        assert_eq!(deposit_amount(200.0, 100.0, 1.0).unwrap(), 0.5);
        assert_eq!(deposit_amount(200.0, 100.0, 3.0).unwrap(), 0.125);
        assert!(deposit_amount(0.0, 0.0, 1.0).is_err());
        assert!(deposit_amount(100.0, -1.0, 1.0).is_err());
        assert!(deposit_amount(100.0, 200.0, 1.0).is_err());
    }

    #[test]
    fn single_ant_forward_and_reverse_edges() {
        let sol = Solution::new(genes(&[0, 3, 1, 2, 4]));
        let pop = PopulationView::new([(&sol, 10.0)], 3.0);
        let unvisited = genes(&[1, 2, 4]);
        // 3 -> 1 is in the tour
        let w = reconstruct_weights(&pop, Gene::from_index(3), &unvisited, 3.0);
        assert_eq!(w, vec![1.0, 0.0, 0.0]);
        // only 4 -> 0 (wrap) touches 0 among these
        let w = reconstruct_weights(&pop, Gene::from_index(0), &genes(&[1, 2, 4]), 3.0);
        assert_eq!(w, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn identical_ants_add_up() {
        let sol = Solution::new(genes(&[0, 1, 2, 3]));
        let pop = PopulationView::new([(&sol, 200.0), (&sol, 200.0)], 1.0);
        // colony best is the same 200, so both deposit 1.0
        assert_eq!(pop.amounts(), &[1.0, 1.0]);
        let better = Solution::new(genes(&[3, 2, 0, 1]));
        let pop = PopulationView::new([(&sol, 200.0), (&sol, 200.0), (&better, 100.0)], 1.0);
        let w = reconstruct_weights(&pop, Gene::from_index(1), &genes(&[2]), 1.0);
        // 1 -> 2 from each weaker ant at 0.5; the better ant has 2 two steps away
        assert_eq!(w, vec![1.0]);
    }

    #[test]
    fn evaporation() {
        let mut m = EdgeMatrix::new(2, 1.0);
        m.evaporate(0.02).unwrap();
        assert_eq!(m.get(Gene::from_index(0), Gene::from_index(1)), 0.98);

        let mut z = EdgeMatrix::new(2, 0.0);
        z.evaporate(0.5).unwrap();
        assert!(z.entries().iter().all(|&t| t == 0.0));

        let mut b = EdgeMatrix::new(2, 0.1005);
        b.set_bounds(0.1, 1.0).unwrap();
        b.evaporate(0.02).unwrap();
        assert!(b.entries().iter().all(|&t| t == 0.1));

        assert!(b.evaporate(0.0).is_err());
        assert!(b.evaporate(1.0).is_err());
    }

    #[test]
    fn deposit_includes_wrap_edge() {
        let mut m = EdgeMatrix::new(3, 0.0);
        let tour = genes(&[0, 1, 2]);
        m.deposit_tour(&tour, 1.0).unwrap();
        let set: Vec<(usize, usize)> = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .filter(|&(i, j)| m.get_idx(i, j) == 1.0)
            .collect();
        assert_eq!(set, vec![(0, 1), (1, 2), (2, 0)]);
        assert_eq!(m.entries().iter().filter(|&&t| t != 0.0).count(), 3);

        let mut half = EdgeMatrix::new(3, 0.0);
        half.deposit_tour(&tour, 0.5).unwrap();
        half.deposit_tour(&tour, 0.5).unwrap();
        assert_eq!(half.get_idx(1, 2), 1.0);

        let mut capped = EdgeMatrix::new(3, 0.0);
        capped.set_bounds(0.0, 2.0).unwrap();
        for _ in 0..3 {
            capped.deposit_tour(&tour, 1.0).unwrap();
        }
        assert_eq!(capped.get_idx(2, 0), 2.0);

        assert!(capped.deposit_tour(&tour, 0.0).is_err());
    }
}
