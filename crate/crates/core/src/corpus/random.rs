//! Seeded random graph1 models.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::model::canonical_json;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomConfig {
    pub graphs: usize,
    pub max_nodes: usize,
    pub max_edges: usize,
    /// Probability of planting each special structure: a dangling edge, a
    /// looping edge, a parallel edge and a triangle.
    pub plant_probability: f64,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            graphs: 2,
            max_nodes: 8,
            max_edges: 14,
            plant_probability: 0.5,
        }
    }
}

/// What was planted in a generated model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Planted {
    pub dangling: bool,
    pub looping: bool,
    pub parallel: bool,
    pub triangle: bool,
}

#[derive(Debug, Clone)]
pub struct RandomModel {
    pub seed: u64,
    pub document: String,
    pub planted: Planted,
}

type Edge = (Option<usize>, Option<usize>);

/// Splits `total` into `parts` random non-negative shares.
fn split(rng: &mut ChaCha8Rng, total: usize, parts: usize) -> Vec<usize> {
    let mut cuts: Vec<usize> = (0..parts.saturating_sub(1))
        .map(|_| rng.gen_range(0..=total))
        .collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts {
        out.push(c - prev);
        prev = c;
    }
    out.push(total - prev);
    out
}

pub fn generate(seed: u64, config: &RandomConfig) -> RandomModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total_nodes = rng.gen_range(config.graphs.min(config.max_nodes)..=config.max_nodes);
    let total_edges = rng.gen_range(0..=config.max_edges);
    let node_counts = split(&mut rng, total_nodes, config.graphs);
    let edge_budget = split(&mut rng, total_edges, config.graphs);

    let mut graphs: Vec<(usize, Vec<Edge>)> =
        node_counts.iter().map(|&n| (n, Vec::new())).collect();
    let mut planted = Planted::default();
    let want = |rng: &mut ChaCha8Rng| rng.gen_bool(config.plant_probability);
    let plant_dangling = want(&mut rng);
    let plant_looping = want(&mut rng);
    let plant_parallel = want(&mut rng);
    let plant_triangle = want(&mut rng);

    let pick = |rng: &mut ChaCha8Rng, graphs: &[(usize, Vec<Edge>)], min_nodes: usize| {
        let fits: Vec<usize> = (0..graphs.len())
            .filter(|&g| graphs[g].0 >= min_nodes)
            .collect();
        fits.choose(rng).copied()
    };
    let mut edges_left = total_edges;
    let take = |n: usize, left: &mut usize| {
        if *left >= n {
            *left -= n;
            true
        } else {
            false
        }
    };
    if plant_triangle {
        if let Some(g) = pick(&mut rng, &graphs, 3) {
            if take(3, &mut edges_left) {
                let mut nodes: Vec<usize> = (0..graphs[g].0).collect();
                nodes.shuffle(&mut rng);
                let (a, b, c) = (nodes[0], nodes[1], nodes[2]);
                graphs[g]
                    .1
                    .extend([(Some(a), Some(b)), (Some(b), Some(c)), (Some(c), Some(a))]);
                planted.triangle = true;
            }
        }
    }
    if plant_looping {
        if let Some(g) = pick(&mut rng, &graphs, 1) {
            if take(1, &mut edges_left) {
                let n = rng.gen_range(0..graphs[g].0);
                graphs[g].1.push((Some(n), Some(n)));
                planted.looping = true;
            }
        }
    }
    if plant_parallel {
        if let Some(g) = pick(&mut rng, &graphs, 1) {
            if take(2, &mut edges_left) {
                let a = rng.gen_range(0..graphs[g].0);
                let b = rng.gen_range(0..graphs[g].0);
                graphs[g].1.extend([(Some(a), Some(b)), (Some(a), Some(b))]);
                planted.parallel = true;
            }
        }
    }
    if plant_dangling {
        let g = rng.gen_range(0..graphs.len());
        if take(1, &mut edges_left) {
            let n = graphs[g].0;
            let end =
                |rng: &mut ChaCha8Rng| (n > 0 && rng.gen_bool(0.5)).then(|| rng.gen_range(0..n));
            let edge = match rng.gen_range(0..3) {
                0 => (None, end(&mut rng)),
                1 => (end(&mut rng), None),
                _ => (None, None),
            };
            graphs[g].1.push(edge);
            planted.dangling = true;
        }
    }
    // Spend the remaining budget on random edges.
    for (g, budget) in edge_budget.iter().enumerate() {
        let n = graphs[g].0;
        while graphs[g].1.len() < *budget && edges_left > 0 {
            edges_left -= 1;
            let end =
                |rng: &mut ChaCha8Rng| (n > 0 && !rng.gen_bool(0.1)).then(|| rng.gen_range(0..n));
            let edge = (end(&mut rng), end(&mut rng));
            graphs[g].1.push(edge);
        }
    }
    for (_, edges) in &mut graphs {
        edges.shuffle(&mut rng);
    }

    let mut objects: Vec<Value> = Vec::new();
    let mut links: Vec<Value> = Vec::new();
    let link =
        |assoc: &str, src: &str, trg: &str| json!({ "assoc": assoc, "src": src, "trg": trg });
    for (gi, (nodes, edges)) in graphs.iter().enumerate() {
        let gid = format!("g{gi}");
        objects.push(json!({ "id": gid, "class": "Graph", "attrs": {} }));
        let mut names: Vec<String> = (1..=6).map(|i| format!("n{i}")).collect();
        names.shuffle(&mut rng);
        while names.len() < *nodes {
            names.push(format!("n{}", names.len() + 1));
        }
        let node_id = |i: usize| format!("g{gi}n{}", i + 1);
        for (i, name) in names.iter().take(*nodes).enumerate() {
            objects.push(json!({ "id": node_id(i), "class": "Node", "attrs": { "name": name } }));
            links.push(link("Graph.nodes", &gid, &node_id(i)));
        }
        for (i, (s, t)) in edges.iter().enumerate() {
            let eid = format!("g{gi}e{}", i + 1);
            objects.push(json!({ "id": eid, "class": "Edge", "attrs": {} }));
            links.push(link("Graph.edges", &gid, &eid));
            if let Some(s) = s {
                links.push(link("Edge.src", &eid, &node_id(*s)));
            }
            if let Some(t) = t {
                links.push(link("Edge.trg", &eid, &node_id(*t)));
            }
        }
    }
    let document =
        canonical_json(&json!({ "conformsTo": "graph1", "objects": objects, "links": links }));
    RandomModel {
        seed,
        document,
        planted,
    }
}

/// `count` models with seeds `base_seed, base_seed + 1, ...`.
pub fn generate_many(base_seed: u64, count: usize, config: &RandomConfig) -> Vec<RandomModel> {
    (0..count as u64)
        .map(|i| generate(base_seed.wrapping_add(i), config))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::summary::{raw_graphs, Doc, GRAPH1};

    #[test]
    fn respects_bounds_and_is_reproducible() {
        let cfg = RandomConfig::default();
        for seed in 0..300 {
            let m = generate(seed, &cfg);
            assert_eq!(m.document, generate(seed, &cfg).document);
            let doc = Doc::parse(&m.document).unwrap();
            let graphs = raw_graphs(&doc, &GRAPH1);
            assert_eq!(graphs.len(), 2);
            let nodes: usize = graphs.iter().map(|g| g.nodes.len()).sum();
            let edges: usize = graphs.iter().map(|g| g.edges.len()).sum();
            assert!(
                nodes <= 8 && edges <= 14,
                "seed {seed}: {nodes} nodes, {edges} edges"
            );
            for g in &graphs {
                let mut names: Vec<_> = g.nodes.iter().map(|(_, n)| n.clone()).collect();
                names.sort();
                names.dedup();
                assert_eq!(names.len(), g.nodes.len());
            }
        }
    }

    #[test]
    fn special_structures_are_frequent() {
        let models = generate_many(7, 400, &RandomConfig::default());
        let rate = |f: fn(&Planted) -> bool| {
            models.iter().filter(|m| f(&m.planted)).count() as f64 / 400.0
        };
        for (what, r) in [
            ("dangling", rate(|p| p.dangling)),
            ("looping", rate(|p| p.looping)),
            ("parallel", rate(|p| p.parallel)),
        ] {
            assert!(r >= 0.3, "{what}: {r}");
        }
    }
}
