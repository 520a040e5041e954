//! Solution construction with the random proportional rule: the next gene
//! `j` is drawn with probability proportional to `tau_ij^alpha * eta_ij^beta`,
//! `eta_ij = 1 / d_ij`, over all unplaced genes.

use rand::Rng;

use crate::model::{Gene, Instance};
use crate::pheromone::{pow, EdgeMatrix, PopulationView};

/// Driving times below this many minutes are treated as this distance when
/// computing `eta`, so co-located genes keep a finite heuristic.
pub const ETA_FLOOR_MINUTES: f64 = 0.01;

const UNSET: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    pub alpha: f64,
    pub beta: f64,
}

#[inline]
fn eta(instance: &Instance, from: usize, to: usize, beta: f64) -> f64 {
    pow(1.0 / instance.travel_idx(from, to).max(ETA_FLOOR_MINUTES), beta)
}

/// `(tau_ij + tau_ji)^alpha * eta_ij^beta` for every gene pair, rebuilt from
/// an [`EdgeMatrix`] at each pheromone update.
#[derive(Debug, Clone)]
pub struct ChoiceTable {
    n: usize,
    weight: Vec<f64>,
}

impl ChoiceTable {
    pub fn new(instance: &Instance, matrix: &EdgeMatrix, exps: Exponents) -> Self {
        let n = instance.n_genes();
        assert_eq!(matrix.size(), n, "matrix does not match instance");
        let mut weight = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let tau = matrix.get_idx(i, j) + matrix.get_idx(j, i);
                    weight[i * n + j] = pow(tau, exps.alpha) * eta(instance, i, j, exps.beta);
                }
            }
        }
        ChoiceTable { n, weight }
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.weight[i * self.n..(i + 1) * self.n]
    }
}

/// Where the `tau` of the random proportional rule comes from.
#[derive(Debug, Clone, Copy)]
pub enum PheromoneSource<'a> {
    /// No pheromone yet: every edge counts equally, leaving `eta` alone.
    Uniform,
    /// Matrix-free: reconstructed from the ants' best solutions.
    Population(&'a PopulationView),
    Matrix(&'a ChoiceTable),
}

/// Work counters of a construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    /// Probabilistic choices made.
    pub decisions: u64,
    /// Size of the candidate set each choice ranges over, summed.
    pub comparisons: u64,
    /// Weights actually computed; below `comparisons` when the population
    /// source only scores genes some ant connects to the current one.
    pub scored: u64,
}

impl std::ops::AddAssign for Counters {
    fn add_assign(&mut self, rhs: Self) {
        self.decisions += rhs.decisions;
        self.comparisons += rhs.comparisons;
        self.scored += rhs.scored;
    }
}

/// Reusable per-ant scratch space, `O(genes)`.
#[derive(Debug, Clone)]
pub struct Builder {
    unvisited: Vec<u32>,
    slot: Vec<u32>,
    tau: Vec<f64>,
    touched: Vec<u32>,
    weights: Vec<f64>,
}

impl Builder {
    pub fn new(n_genes: usize) -> Self {
        Builder {
            unvisited: Vec::with_capacity(n_genes),
            slot: vec![UNSET; n_genes],
            tau: vec![0.0; n_genes],
            touched: Vec::new(),
            weights: Vec::with_capacity(n_genes),
        }
    }

    pub fn footprint(&self) -> usize {
        self.unvisited.capacity()
            + self.slot.len()
            + self.tau.len()
            + self.touched.capacity()
            + self.weights.capacity()
    }

    fn reset(&mut self, n: usize) {
        self.unvisited.clear();
        self.unvisited.extend(0..n as u32);
        self.slot.clear();
        self.slot.extend(0..n as u32);
    }

    #[inline]
    fn take(&mut self, gene: usize) {
        let s = self.slot[gene];
        debug_assert_ne!(s, UNSET, "gene {gene} placed twice");
        let s = s as usize;
        self.unvisited.swap_remove(s);
        if let Some(&moved) = self.unvisited.get(s) {
            self.slot[moved as usize] = s as u32;
        }
        self.slot[gene] = UNSET;
    }

    /// Writes `prefix` followed by the remaining genes, each chosen with the
    /// random proportional rule from the previous gene. With an empty prefix
    /// the sequence opens with a uniformly random vehicle.
    #[allow(clippy::too_many_arguments)]
    pub fn build<R: Rng + ?Sized>(
        &mut self,
        instance: &Instance,
        source: PheromoneSource<'_>,
        exps: Exponents,
        prefix: &[Gene],
        rng: &mut R,
        out: &mut Vec<Gene>,
        counters: &mut Counters,
    ) {
        let n = instance.n_genes();
        self.reset(n);
        out.clear();
        for &g in prefix {
            self.take(g.index());
            out.push(g);
        }
        let mut current = match out.last() {
            Some(g) => g.index(),
            None => {
                let v = rng.random_range(0..instance.n_vehicles());
                self.take(v);
                out.push(Gene::from_index(v));
                counters.decisions += 1;
                v
            }
        };
        while !self.unvisited.is_empty() {
            let next = self.choose(instance, source, exps, current, rng, counters);
            self.take(next);
            out.push(Gene::from_index(next));
            current = next;
        }
    }

    fn choose<R: Rng + ?Sized>(
        &mut self,
        instance: &Instance,
        source: PheromoneSource<'_>,
        exps: Exponents,
        current: usize,
        rng: &mut R,
        counters: &mut Counters,
    ) -> usize {
        counters.decisions += 1;
        counters.comparisons += self.unvisited.len() as u64;
        if self.unvisited.len() == 1 {
            counters.scored += 1;
            return self.unvisited[0] as usize;
        }
        match source {
            PheromoneSource::Uniform => self.choose_by_distance(instance, exps, current, rng, counters),
            PheromoneSource::Matrix(table) => {
                let row = table.row(current);
                self.weights.clear();
                let mut total = 0.0;
                for &g in &self.unvisited {
                    let w = row[g as usize];
                    total += w;
                    self.weights.push(w);
                }
                counters.scored += self.unvisited.len() as u64;
                match roulette(&self.weights, total, rng) {
                    Some(i) => self.unvisited[i] as usize,
                    None => self.choose_by_distance(instance, exps, current, rng, counters),
                }
            }
            PheromoneSource::Population(view) => {
                let slot = &self.slot;
                view.scatter(
                    current,
                    |g| slot[g] != UNSET,
                    &mut self.tau,
                    &mut self.touched,
                );
                self.weights.clear();
                let mut total = 0.0;
                for &g in &self.touched {
                    let g = g as usize;
                    let w = pow(self.tau[g], exps.alpha) * eta(instance, current, g, exps.beta);
                    total += w;
                    self.weights.push(w);
                }
                counters.scored += self.touched.len() as u64;
                let picked = roulette(&self.weights, total, rng).map(|i| self.touched[i] as usize);
                for &g in &self.touched {
                    self.tau[g as usize] = 0.0;
                }
                self.touched.clear();
                match picked {
                    Some(g) => g,
                    None => self.choose_by_distance(instance, exps, current, rng, counters),
                }
            }
        }
    }

    /// Rule with equal pheromone everywhere: weights `eta^beta` only.
    fn choose_by_distance<R: Rng + ?Sized>(
        &mut self,
        instance: &Instance,
        exps: Exponents,
        current: usize,
        rng: &mut R,
        counters: &mut Counters,
    ) -> usize {
        self.weights.clear();
        let mut total = 0.0;
        for &g in &self.unvisited {
            let w = eta(instance, current, g as usize, exps.beta);
            total += w;
            self.weights.push(w);
        }
        counters.scored += self.unvisited.len() as u64;
        let i = roulette(&self.weights, total, rng).unwrap_or(0);
        self.unvisited[i] as usize
    }
}

/// Index drawn with probability `weights[i] / total`; `None` when nothing
/// has positive weight.
#[inline]
pub fn roulette<R: Rng + ?Sized>(weights: &[f64], total: f64, rng: &mut R) -> Option<usize> {
    if total.is_nan() || total <= 0.0 || !total.is_finite() {
        return None;
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = None;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = Some(i);
            if acc > target {
                return Some(i);
            }
        }
    }
    // rounding left the target just past the accumulated sum
    last_positive
}
