//! Genetic patch search. Genomes are mutation lists over the plain program;
//! fitness is lexicographic (tests passed, then total capped steps), and all
//! randomness flows from one seeded generator drawn before any parallel
//! fitness evaluation, so results are identical across worker counts.

use super::{apply_patch, Anchor, Mutation};
use crate::exec::{run as interp_run, ProgramInput, RunClass};
use crate::lang::{Program, StmtId};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// One fast/slow test: concrete input, expected outputs, step threshold.
#[derive(Debug, Clone)]
pub struct TestCase {
    pub id: String,
    pub input: ProgramInput,
    pub expected: BTreeMap<String, i64>,
    pub threshold: u64,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub population: usize,
    pub generations: usize,
    /// Probability of appending a fresh mutation to a crossover child.
    pub mutation_rate: f64,
    pub workers: usize,
    pub seed: u64,
    /// Maximum genome length.
    pub max_patch_len: usize,
    /// Stop once this many distinct full-pass candidates are collected;
    /// until then the search keeps evolving so validation has alternatives
    /// when a plausible-but-overfit candidate is rejected.
    pub candidate_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            population: 40,
            generations: 20,
            mutation_rate: 0.5,
            workers: 1,
            seed: 1,
            max_patch_len: 3,
            candidate_cap: 8,
        }
    }
}

/// Lexicographic fitness: more passing tests beats fewer; ties break on
/// fewer total steps (each test capped at threshold + 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fitness {
    pub tests_failed: usize,
    pub total_steps: u64,
}

const WORST: Fitness = Fitness { tests_failed: usize::MAX, total_steps: u64::MAX };

#[derive(Debug, Clone)]
pub struct Candidate {
    pub patch: Vec<Mutation>,
    pub program: Program,
    pub fitness: Fitness,
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    /// Candidates passing every test, best fitness first.
    Found(Vec<Candidate>),
    /// No full pass within the generation budget; the best seen is reported.
    Exhausted { best_fitness: Fitness, generations: usize },
}

/// Evaluates one program against the whole suite.
fn fitness_of(p: &Program, tests: &[TestCase]) -> Fitness {
    let mut failed = 0;
    let mut steps = 0u64;
    for t in tests {
        // threshold + 1 steps decide fast/slow; running longer is wasted work.
        let r = match interp_run(p, &t.input, t.threshold + 1) {
            Ok(r) => r,
            Err(_) => return WORST,
        };
        let class = crate::exec::classify(&r, &t.expected, t.threshold);
        if !matches!(class, RunClass::Fast) {
            failed += 1;
        }
        steps += r.steps;
    }
    Fitness { tests_failed: failed, total_steps: steps }
}

/// Draws one mutation that applies cleanly to `base`, or gives up.
fn random_mutation(
    base: &Program,
    weights: &[(StmtId, f64)],
    rng: &mut ChaCha8Rng,
) -> Option<Mutation> {
    let ids: Vec<StmtId> = {
        let mut v = Vec::new();
        base.for_each_stmt(&mut |s| v.push(s.id));
        v
    };
    if ids.len() < 2 {
        return None;
    }
    let floor = weights.iter().map(|(_, w)| *w).fold(f64::INFINITY, f64::min).max(1e-6);
    let weight_of = |id: StmtId| {
        weights.iter().find(|(s, _)| *s == id).map(|(_, w)| *w).unwrap_or(floor)
    };
    for _ in 0..12 {
        let subject = *ids
            .choose_weighted(rng, |id| weight_of(*id))
            .expect("non-empty id list with positive weights");
        let other = loop {
            let cand = *ids.choose(rng).unwrap();
            if cand != subject {
                break cand;
            }
        };
        let dest = if rng.gen_bool(0.5) { Anchor::Before(other) } else { Anchor::After(other) };
        let m = match rng.gen_range(0..10) {
            0..=3 => Mutation::Move { stmt: subject, dest },
            4..=6 => Mutation::Insert { source: subject, dest },
            7..=8 => Mutation::Swap { a: subject, b: other },
            _ => Mutation::Delete { stmt: subject },
        };
        if apply_patch(base, &[m.clone()]).is_ok() {
            return Some(m);
        }
    }
    None
}

fn offspring(
    parents: (&[Mutation], &[Mutation]),
    original: &Program,
    weights: &[(StmtId, f64)],
    cfg: &SearchConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<Mutation> {
    let (a, b) = parents;
    let cut_a = if a.is_empty() { 0 } else { rng.gen_range(0..=a.len()) };
    let cut_b = if b.is_empty() { 0 } else { rng.gen_range(0..=b.len()) };
    let mut child: Vec<Mutation> = a[..cut_a].iter().chain(&b[cut_b..]).cloned().collect();
    child.truncate(cfg.max_patch_len);
    if rng.gen_bool(cfg.mutation_rate) || child.is_empty() {
        if let Ok(prog) = apply_patch(original, &child) {
            if child.len() < cfg.max_patch_len {
                if let Some(m) = random_mutation(&prog, weights, rng) {
                    child.push(m);
                }
            }
        }
    }
    child
}

/// Runs the genetic search. If the original program already passes every
/// test, the empty patch is returned immediately.
pub fn search(
    p: &Program,
    tests: &[TestCase],
    weights: &[(StmtId, f64)],
    cfg: &SearchConfig,
) -> SearchOutcome {
    let original_fitness = fitness_of(p, tests);
    if original_fitness.tests_failed == 0 {
        return SearchOutcome::Found(vec![Candidate {
            patch: Vec::new(),
            program: p.clone(),
            fitness: original_fitness,
        }]);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .expect("thread pool");

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut population: Vec<Vec<Mutation>> = Vec::with_capacity(cfg.population);
    while population.len() < cfg.population {
        match random_mutation(p, weights, &mut rng) {
            Some(m) => population.push(vec![m]),
            None => population.push(Vec::new()),
        }
    }

    let mut best = original_fitness;
    let mut found: Vec<Candidate> = Vec::new();
    let mut generations_run = 0;

    for _gen in 0..cfg.generations {
        generations_run += 1;
        let scored: Vec<(usize, Option<Program>, Fitness)> = pool.install(|| {
            population
                .par_iter()
                .enumerate()
                .map(|(i, genome)| match apply_patch(p, genome) {
                    Ok(prog) => {
                        let f = fitness_of(&prog, tests);
                        (i, Some(prog), f)
                    }
                    Err(_) => (i, None, WORST),
                })
                .collect()
        });

        let mut ranked: Vec<&(usize, Option<Program>, Fitness)> = scored.iter().collect();
        ranked.sort_by_key(|(i, _, f)| (*f, *i));

        for (i, prog, f) in &scored {
            if f.tests_failed == 0 {
                let prog = prog.clone().unwrap();
                let dup = found.iter().any(|c| c.program.same_shape(&prog));
                if !dup {
                    found.push(Candidate {
                        patch: population[*i].clone(),
                        program: prog,
                        fitness: *f,
                    });
                }
            }
        }
        best = best.min(ranked[0].2);
        if found.len() >= cfg.candidate_cap {
            break;
        }

        // Elites survive; the rest are crossover children of the top half.
        let elite_n = (cfg.population / 4).max(1);
        let top_half = (cfg.population / 2).max(2).min(ranked.len());
        let mut next: Vec<Vec<Mutation>> =
            ranked.iter().take(elite_n).map(|(i, _, _)| population[*i].clone()).collect();
        while next.len() < cfg.population {
            let pa = ranked[rng.gen_range(0..top_half)].0;
            let pb = ranked[rng.gen_range(0..top_half)].0;
            next.push(offspring((&population[pa], &population[pb]), p, weights, cfg, &mut rng));
        }
        population = next;
    }

    if found.is_empty() {
        return SearchOutcome::Exhausted { best_fitness: best, generations: generations_run };
    }
    // Stable order: shortest patches first, then fitness, then discovery
    // order. Minimal patches are validated before fast-but-baroque variants.
    let mut indexed: Vec<(usize, Candidate)> = found.into_iter().enumerate().collect();
    indexed.sort_by(|(i, a), (j, b)| {
        a.patch.len().cmp(&b.patch.len()).then(a.fitness.cmp(&b.fitness)).then(i.cmp(j))
    });
    SearchOutcome::Found(indexed.into_iter().map(|(_, c)| c).collect())
}
