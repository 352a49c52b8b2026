//! Direct implementations of every task, used to check the engine.
//!
//! Each oracle reads the input document, computes the task's expected effect
//! with plain loops over the graph data and returns the [`Summary`] the
//! engine's output must have. Nothing here uses patterns, the interpreter or
//! the model repository.

use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::summary::{
    edge_ids, int_results, object_facts, raw_graphs, string_results, Doc, EdgeShape, GraphShape,
    LinkFact, ObjectFact, RawGraph, Summary, GRAPH1,
};
use crate::corpus::TaskId;

/// Predicts the summary of running `task` on `document`.
pub fn oracle_run(task: TaskId, document: &str) -> Result<Summary, String> {
    let doc = Doc::parse(document)?;
    let graphs = raw_graphs(&doc, &GRAPH1);
    let counts = |f: fn(&Doc, &RawGraph) -> i64| {
        let mut values = int_results(&doc);
        values.extend(graphs.iter().map(|g| f(&doc, g)));
        Summary::Counts { values }
    };
    Ok(match task {
        TaskId::P1_1 => greeting(&doc, false),
        TaskId::P1_2 => greeting(&doc, true),
        TaskId::P1_3 => composed_greeting(&doc)?,
        TaskId::P2_1 => counts(|_, g| g.nodes.len() as i64),
        TaskId::P2_2 => counts(|_, g| {
            g.edges
                .iter()
                .filter(|(_, s, t)| s.is_some() && s == t)
                .count() as i64
        }),
        TaskId::P2_3 => counts(isolated_nodes),
        TaskId::P2_5O => counts(|_, g| {
            let no_src = g.edges.iter().filter(|(_, s, _)| s.is_none()).count();
            let src_no_trg = g
                .edges
                .iter()
                .filter(|(_, s, t)| s.is_some() && t.is_none())
                .count();
            (no_src + src_no_trg) as i64
        }),
        TaskId::P2_4 | TaskId::P2_4A => counts(|_, g| ordered_circles(g)),
        TaskId::P3A => Summary::Graphs {
            graphs: graphs
                .iter()
                .map(|g| {
                    shape(g, |(_, s, t)| match (s, t) {
                        (Some(_), Some(_)) => (t.clone(), s.clone()),
                        _ => (s.clone(), t.clone()),
                    })
                })
                .collect(),
        },
        TaskId::P4_1 | TaskId::P4_2O => Summary::Graphs {
            graphs: graphs.iter().map(migrated).collect(),
        },
        TaskId::P5_1 => deletion(&doc, &graphs, false),
        TaskId::P5_2O => deletion(&doc, &graphs, true),
        TaskId::P6O => Summary::Graphs {
            graphs: graphs
                .iter()
                .map(|g| with_pairs(g, transitive_closure))
                .collect(),
        },
        TaskId::P6OR2 => Summary::Graphs {
            graphs: graphs
                .iter()
                .map(|g| with_pairs(g, relation_and_square))
                .collect(),
        },
    })
}

fn shape(
    g: &RawGraph,
    map: impl Fn(&(String, Option<String>, Option<String>)) -> (Option<String>, Option<String>),
) -> GraphShape {
    let label = |id: Option<String>| id.map(|n| g.label(&n).unwrap_or_default().to_string());
    let edges = g
        .edges
        .iter()
        .map(|e| {
            let (s, t) = map(e);
            EdgeShape {
                src: label(s),
                trg: label(t),
            }
        })
        .collect();
    GraphShape::new(g.nodes.iter().map(|(_, l)| l.clone()).collect(), edges)
}

fn greeting(doc: &Doc, with_structure: bool) -> Summary {
    let (mut objects, mut links) = object_facts(doc);
    let fact = |class: &str, attr: Option<(&str, &str)>| ObjectFact {
        class: class.to_string(),
        attrs: attr
            .map(|(k, v)| (k.to_string(), serde_json::Value::from(v).to_string()))
            .into_iter()
            .collect(),
    };
    let base = objects.len();
    if with_structure {
        objects.push(fact("Greeting", None));
        objects.push(fact("GreetingMessage", Some(("text", "Hello"))));
        objects.push(fact("Person", Some(("name", "World"))));
        links.push(LinkFact {
            assoc: "Greeting.greetingMessage".into(),
            src: base,
            trg: base + 1,
        });
        links.push(LinkFact {
            assoc: "Greeting.person".into(),
            src: base,
            trg: base + 2,
        });
    } else {
        objects.push(fact("Greeting", Some(("text", "Hello World"))));
    }
    Summary::Objects { objects, links }
}

fn composed_greeting(doc: &Doc) -> Result<Summary, String> {
    let mut values = string_results(doc);
    let first_target = |src: &str, assoc: &str| {
        doc.targets(src, assoc)
            .into_iter()
            .min_by_key(|t| doc.position(t))
            .map(str::to_string)
    };
    for g in doc.of_class("Greeting") {
        let message = first_target(&g.id, "Greeting.greetingMessage");
        let person = first_target(&g.id, "Greeting.person");
        if let (Some(m), Some(p)) = (message, person) {
            let text = doc.string_attr(&m, "text").ok_or("message without text")?;
            let name = doc.string_attr(&p, "name").ok_or("person without name")?;
            values.push(format!("{text} {name}!"));
            break;
        }
    }
    Ok(Summary::Strings { values })
}

fn isolated_nodes(doc: &Doc, g: &RawGraph) -> i64 {
    let touched: BTreeSet<&str> = doc
        .links
        .iter()
        .filter(|l| l.assoc == "Edge.src" || l.assoc == "Edge.trg")
        .map(|l| l.trg.as_str())
        .collect();
    g.nodes
        .iter()
        .filter(|(n, _)| !touched.contains(n.as_str()))
        .count() as i64
}

/// Ordered triples of edges forming a directed circle through three distinct
/// nodes, by exhaustive enumeration.
fn ordered_circles(g: &RawGraph) -> i64 {
    let wf: Vec<(&str, &str)> = g
        .edges
        .iter()
        .filter_map(|(_, s, t)| Some((s.as_deref()?, t.as_deref()?)))
        .collect();
    let mut count = 0;
    for (i, a) in wf.iter().enumerate() {
        for (j, b) in wf.iter().enumerate() {
            for (k, c) in wf.iter().enumerate() {
                let distinct_edges = i != j && j != k && i != k;
                let closed = a.1 == b.0 && b.1 == c.0 && c.1 == a.0;
                let distinct_nodes = a.0 != b.0 && b.0 != c.0 && a.0 != c.0;
                if distinct_edges && closed && distinct_nodes {
                    count += 1;
                }
            }
        }
    }
    count
}

fn migrated(g: &RawGraph) -> GraphShape {
    let edges = g
        .edges
        .iter()
        .filter(|(_, s, t)| s.is_some() && t.is_some())
        .map(|(_, s, t)| EdgeShape {
            src: s.as_deref().and_then(|n| g.label(n)).map(str::to_string),
            trg: t.as_deref().and_then(|n| g.label(n)).map(str::to_string),
        })
        .collect();
    GraphShape::new(g.nodes.iter().map(|(_, l)| l.clone()).collect(), edges)
}

fn deletion(doc: &Doc, graphs: &[RawGraph], with_edges: bool) -> Summary {
    let victims: BTreeSet<&str> = graphs
        .iter()
        .filter_map(|g| {
            g.nodes
                .iter()
                .find(|(_, l)| l == "n1")
                .map(|(id, _)| id.as_str())
        })
        .collect();
    let hits = |end: &Option<String>| end.as_deref().is_some_and(|n| victims.contains(n));
    let mut removed_edges = BTreeSet::new();
    if with_edges {
        for g in graphs {
            for (e, s, t) in &g.edges {
                if hits(s) || hits(t) {
                    removed_edges.insert(e.clone());
                }
            }
        }
        // Edges outside any graph can also touch the node.
        for l in &doc.links {
            if (l.assoc == "Edge.src" || l.assoc == "Edge.trg") && victims.contains(l.trg.as_str())
            {
                removed_edges.insert(l.src.clone());
            }
        }
    }
    let shapes = graphs
        .iter()
        .map(|g| {
            let label = |id: &Option<String>| {
                id.as_deref()
                    .filter(|n| !victims.contains(n))
                    .map(|n| g.label(n).unwrap_or_default().to_string())
            };
            let nodes = g
                .nodes
                .iter()
                .filter(|(id, _)| !victims.contains(id.as_str()))
                .map(|(_, l)| l.clone())
                .collect();
            let edges = g
                .edges
                .iter()
                .filter(|(e, _, _)| !removed_edges.contains(e))
                .map(|(_, s, t)| EdgeShape {
                    src: label(s),
                    trg: label(t),
                })
                .collect();
            GraphShape::new(nodes, edges)
        })
        .collect();
    let remaining_edges = edge_ids(doc, "Edge")
        .into_iter()
        .filter(|e| !removed_edges.contains(e))
        .collect();
    Summary::Deletion {
        graphs: shapes,
        remaining_edges,
    }
}

type Relation = Vec<Vec<bool>>;

/// The graph's edges plus one new edge for every pair that `extend` adds to
/// the relation of its well-formed edges.
fn with_pairs(g: &RawGraph, extend: fn(&Relation) -> Relation) -> GraphShape {
    let index: BTreeMap<&str, usize> = g
        .nodes
        .iter()
        .enumerate()
        .map(|(i, (id, _))| (id.as_str(), i))
        .collect();
    let n = g.nodes.len();
    let mut r = vec![vec![false; n]; n];
    for (_, s, t) in &g.edges {
        if let (Some(s), Some(t)) = (s, t) {
            if let (Some(&i), Some(&j)) = (index.get(s.as_str()), index.get(t.as_str())) {
                r[i][j] = true;
            }
        }
    }
    let extended = extend(&r);
    let mut base = shape(g, |(_, s, t)| (s.clone(), t.clone()));
    for i in 0..n {
        for j in 0..n {
            if extended[i][j] && !r[i][j] {
                base.edges.push(EdgeShape {
                    src: Some(g.nodes[i].1.clone()),
                    trg: Some(g.nodes[j].1.clone()),
                });
            }
        }
    }
    GraphShape::new(base.nodes, base.edges)
}

/// Warshall's algorithm.
#[allow(clippy::needless_range_loop)]
pub fn transitive_closure(r: &Relation) -> Relation {
    let n = r.len();
    let mut c = r.clone();
    for k in 0..n {
        for i in 0..n {
            if c[i][k] {
                for j in 0..n {
                    if c[k][j] {
                        c[i][j] = true;
                    }
                }
            }
        }
    }
    c
}

/// `R ∪ R·R`.
#[allow(clippy::needless_range_loop)]
pub fn relation_and_square(r: &Relation) -> Relation {
    let n = r.len();
    let mut out = r.clone();
    for i in 0..n {
        for k in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        out[i][j] = true;
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixture_source;

    fn run(task: TaskId, fixture: &str) -> Summary {
        oracle_run(task, fixture_source(fixture).unwrap()).unwrap()
    }

    fn pairs(s: &Summary) -> BTreeSet<(String, String)> {
        let Summary::Graphs { graphs } = s else {
            panic!()
        };
        graphs[0]
            .edges
            .iter()
            .filter_map(|e| Some((e.src.clone()?, e.trg.clone()?)))
            .collect()
    }

    #[test]
    fn counting_on_g_a() {
        let counts = |t| match run(t, "g_a") {
            Summary::Counts { values } => values,
            other => panic!("{other:?}"),
        };
        assert_eq!(counts(TaskId::P2_1), vec![5]);
        assert_eq!(counts(TaskId::P2_2), vec![1]);
        assert_eq!(counts(TaskId::P2_3), vec![1]);
        assert_eq!(counts(TaskId::P2_5O), vec![1]);
        assert_eq!(counts(TaskId::P2_4), vec![6]);
        assert_eq!(counts(TaskId::P2_4A), vec![6]);
    }

    #[test]
    fn circles_on_small_graphs() {
        assert_eq!(
            run(TaskId::P2_4, "triangle"),
            Summary::Counts { values: vec![3] }
        );
        assert_eq!(
            run(TaskId::P2_4, "chain"),
            Summary::Counts { values: vec![0] }
        );
        assert_eq!(
            run(TaskId::P2_1, "empty_graph"),
            Summary::Counts { values: vec![0] }
        );
    }

    #[test]
    fn closure_and_square_on_g_a() {
        let full: BTreeSet<_> = ["n1", "n2", "n3"]
            .iter()
            .flat_map(|a| {
                ["n1", "n2", "n3"]
                    .iter()
                    .map(move |b| (a.to_string(), b.to_string()))
            })
            .collect();
        assert_eq!(pairs(&run(TaskId::P6O, "g_a")), full);
        let square = pairs(&run(TaskId::P6OR2, "g_a"));
        assert_eq!(square.len(), 7);
        assert!(!square.contains(&("n2".to_string(), "n2".to_string())));
        assert!(!square.contains(&("n3".to_string(), "n3".to_string())));
        let chain = pairs(&run(TaskId::P6O, "chain"));
        assert_eq!(chain, pairs(&run(TaskId::P6OR2, "chain")));
        assert_eq!(chain.len(), 3);
    }

    #[test]
    fn reversal_and_migration_on_g_a() {
        let Summary::Graphs { graphs } = run(TaskId::P3A, "g_a") else {
            panic!()
        };
        let e = |s: &str, t: Option<&str>| EdgeShape {
            src: Some(s.to_string()),
            trg: t.map(str::to_string),
        };
        let mut expected = vec![
            e("n2", Some("n1")),
            e("n3", Some("n2")),
            e("n1", Some("n3")),
            e("n1", Some("n1")),
            e("n3", Some("n2")),
            e("n4", None),
        ];
        expected.sort();
        assert_eq!(graphs[0].edges, expected);
        let Summary::Graphs { graphs } = run(TaskId::P4_1, "g_a") else {
            panic!()
        };
        assert_eq!((graphs[0].nodes.len(), graphs[0].edges.len()), (5, 5));
    }

    #[test]
    fn deletion_on_g_a() {
        let Summary::Deletion {
            remaining_edges,
            graphs,
        } = run(TaskId::P5_2O, "g_a")
        else {
            panic!()
        };
        assert_eq!(remaining_edges, vec!["e2", "e5", "e6"]);
        assert_eq!(graphs[0].nodes, vec!["n2", "n3", "n4", "n5"]);
        let Summary::Deletion {
            remaining_edges,
            graphs,
        } = run(TaskId::P5_1, "g_a")
        else {
            panic!()
        };
        assert_eq!(remaining_edges.len(), 6);
        let dangling = graphs[0]
            .edges
            .iter()
            .filter(|e| e.src.is_none() || e.trg.is_none())
            .count();
        assert_eq!(dangling, 4);
    }

    #[test]
    fn greetings() {
        assert_eq!(
            run(TaskId::P1_3, "greeting"),
            Summary::Strings {
                values: vec!["Hello World!".into()]
            }
        );
        assert_eq!(
            run(TaskId::P1_3, "greeting_hi"),
            Summary::Strings {
                values: vec!["Hi X!".into()]
            }
        );
        assert_eq!(
            run(TaskId::P1_3, "empty_result"),
            Summary::Strings { values: vec![] }
        );
        let Summary::Objects { objects, links } = run(TaskId::P1_2, "empty_result") else {
            panic!()
        };
        assert_eq!((objects.len(), links.len()), (3, 2));
    }

    #[test]
    fn oracle_is_deterministic() {
        for t in TaskId::ALL.into_iter().filter(|t| t.is_graph_task()) {
            assert_eq!(run(t, "two_graphs"), run(t, "two_graphs"));
        }
    }
}
