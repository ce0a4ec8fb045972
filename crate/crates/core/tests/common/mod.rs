#![allow(dead_code)]

pub mod peaks;
pub mod reference;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spikegnn::graphnet::CitationGraph;

/// Topic sizes of the public Cora release.
pub const CORA_TOPICS: [(&str, usize); 7] = [
    ("Case_Based", 298),
    ("Genetic_Algorithms", 418),
    ("Neural_Networks", 818),
    ("Probabilistic_Methods", 426),
    ("Reinforcement_Learning", 217),
    ("Rule_Learning", 180),
    ("Theory", 351),
];

/// Content and cites text of a planted-partition graph with Cora's node
/// count and topic sizes. Each citation stays within the citing paper's
/// topic with probability `homophily`.
pub fn synthetic_cora_files(seed: u64, edges: usize, homophily: f64) -> (String, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut content = String::new();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); CORA_TOPICS.len()];
    let mut topic_of = Vec::new();
    let mut id = 0usize;
    for (t, (name, size)) in CORA_TOPICS.iter().enumerate() {
        for _ in 0..*size {
            content.push_str(&format!("{}\t0\t1\t{name}\n", 1000 + id * 7));
            members[t].push(id);
            topic_of.push(t);
            id += 1;
        }
    }
    let n = id;
    let mut cites = String::new();
    let mut written = 0;
    while written < edges {
        let citing = rng.random_range(0..n);
        let cited = if rng.random_bool(homophily) {
            let group = &members[topic_of[citing]];
            group[rng.random_range(0..group.len())]
        } else {
            rng.random_range(0..n)
        };
        if cited == citing {
            continue;
        }
        cites.push_str(&format!("{}\t{}\n", 1000 + cited * 7, 1000 + citing * 7));
        written += 1;
    }
    (content, cites)
}

pub fn synthetic_cora(seed: u64) -> CitationGraph {
    let (content, cites) = synthetic_cora_files(seed, 5429, 0.8);
    CitationGraph::from_bytes(content.as_bytes(), cites.as_bytes()).unwrap()
}

/// Three papers: `p` (topic Beta) cites training paper `a` (Beta); `b`
/// (Alpha) is the other training paper.
pub fn three_paper_files() -> (&'static str, &'static str) {
    ("p\t1\t0\tBeta\na\t0\t1\tBeta\nb\t1\t1\tAlpha\n", "a\tp\n")
}
