use std::fmt;

use serde::{Deserialize, Serialize};

use super::instance::Instance;

/// Flat gene index: vehicles first, then jobs. Only meaningful together
/// with the [`Instance`] it was created for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Gene(u32);

impl Gene {
    #[inline]
    pub fn from_index(index: usize) -> Self {
        Gene(u32::try_from(index).expect("gene index fits in u32"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneKind {
    Vehicle(usize),
    Job(usize),
}

/// A full schedule: a permutation of every vehicle and job gene.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Solution {
    pub genes: Vec<Gene>,
}

impl Solution {
    pub fn new(genes: Vec<Gene>) -> Self {
        Solution { genes }
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    /// `["V:<id>", "J:<id>", ...]`
    pub fn labels(&self, instance: &Instance) -> Vec<String> {
        self.genes.iter().map(|&g| instance.label(g)).collect()
    }

    /// Parses gene labels; unknown labels are reported as foreign genes and
    /// the result is then checked with [`validate_solution`].
    pub fn from_labels<S: AsRef<str>>(
        instance: &Instance,
        labels: &[S],
    ) -> Result<Solution, Vec<Violation>> {
        let mut genes = Vec::with_capacity(labels.len());
        let mut foreign = Vec::new();
        for label in labels {
            match instance.gene_by_label(label.as_ref()) {
                Some(g) => genes.push(g),
                None => foreign.push(Violation::Foreign(label.as_ref().to_string())),
            }
        }
        let solution = Solution::new(genes);
        let mut violations = foreign;
        if let Err(mut v) = validate_solution(instance, &solution) {
            violations.append(&mut v);
        }
        if violations.is_empty() {
            Ok(solution)
        } else {
            Err(violations)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Missing(String),
    Duplicate(String),
    Foreign(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Missing(g) => write!(f, "missing gene {g}"),
            Violation::Duplicate(g) => write!(f, "duplicate gene {g}"),
            Violation::Foreign(g) => write!(f, "foreign gene {g}"),
        }
    }
}

/// Checks the permutation invariant. Every violation is reported, not just
/// the first.
pub fn validate_solution(instance: &Instance, solution: &Solution) -> Result<(), Vec<Violation>> {
    let n = instance.n_genes();
    let mut count = vec![0u32; n];
    let mut violations = Vec::new();
    for &g in &solution.genes {
        if g.index() >= n {
            violations.push(Violation::Foreign(format!("#{}", g.index())));
            continue;
        }
        count[g.index()] += 1;
        if count[g.index()] == 2 {
            violations.push(Violation::Duplicate(instance.label(g)));
        }
    }
    for (i, &c) in count.iter().enumerate() {
        if c == 0 {
            violations.push(Violation::Missing(instance.label(Gene::from_index(i))));
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}
