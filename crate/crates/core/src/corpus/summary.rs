//! Reading model documents and reducing them to comparable summaries.
//!
//! Both the engine's exported output and the oracles' predictions are
//! expressed as a [`Summary`]. The reader here works on the JSON document
//! alone and does not use the model repository.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Deserialize)]
pub struct Doc {
    #[serde(rename = "conformsTo")]
    pub conforms_to: String,
    #[serde(default)]
    pub objects: Vec<DocObject>,
    #[serde(default)]
    pub links: Vec<DocLink>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct DocObject {
    pub id: String,
    pub class: String,
    #[serde(default)]
    pub attrs: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct DocLink {
    pub assoc: String,
    pub src: String,
    pub trg: String,
}

impl Doc {
    pub fn parse(text: &str) -> Result<Doc, String> {
        serde_json::from_str(text).map_err(|e| format!("malformed model document: {e}"))
    }

    pub fn of_class<'d>(&'d self, class: &'d str) -> impl Iterator<Item = &'d DocObject> + 'd {
        self.objects.iter().filter(move |o| o.class == class)
    }

    pub fn object(&self, id: &str) -> Option<&DocObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    /// Position of `id` in the object list, which is creation order.
    pub fn position(&self, id: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.id == id)
    }

    /// Targets of `assoc` links leaving `src`, in link order.
    pub fn targets(&self, src: &str, assoc: &str) -> Vec<&str> {
        self.links
            .iter()
            .filter(|l| l.assoc == assoc && l.src == src)
            .map(|l| l.trg.as_str())
            .collect()
    }

    pub fn string_attr(&self, id: &str, attr: &str) -> Option<&str> {
        self.object(id)?.attrs.get(attr)?.as_str()
    }
}

/// Class and association names of one graph encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Encoding {
    pub graph: &'static str,
    pub node: &'static str,
    pub label_attr: &'static str,
    pub nodes: &'static str,
    pub edge: EdgeEncoding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeEncoding {
    /// Edge objects contained in the graph, with source and target links.
    Objects {
        class: &'static str,
        edges: &'static str,
        src: &'static str,
        trg: &'static str,
    },
    /// Direct node-to-node links.
    Links { assoc: &'static str },
}

pub const GRAPH1: Encoding = Encoding {
    graph: "Graph",
    node: "Node",
    label_attr: "name",
    nodes: "Graph.nodes",
    edge: EdgeEncoding::Objects {
        class: "Edge",
        edges: "Graph.edges",
        src: "Edge.src",
        trg: "Edge.trg",
    },
};

pub const GRAPH2: Encoding = Encoding {
    graph: "Graph2",
    node: "Node2",
    label_attr: "text",
    nodes: "Graph2.nodes",
    edge: EdgeEncoding::Objects {
        class: "Edge2",
        edges: "Graph2.edges",
        src: "Edge2.src",
        trg: "Edge2.trg",
    },
};

pub const GRAPH3: Encoding = Encoding {
    graph: "Graph3",
    node: "Node3",
    label_attr: "text",
    nodes: "Graph3.nodes",
    edge: EdgeEncoding::Links {
        assoc: "Node3.linksTo",
    },
};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeShape {
    pub src: Option<String>,
    pub trg: Option<String>,
}

/// A graph up to object identity: node labels and the edge multiset, both
/// sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphShape {
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeShape>,
}

impl GraphShape {
    pub fn new(mut nodes: Vec<String>, mut edges: Vec<EdgeShape>) -> GraphShape {
        nodes.sort();
        edges.sort();
        GraphShape { nodes, edges }
    }
}

/// One graph read from a graph1 document, with object ids.
#[derive(Debug, Clone)]
pub struct RawGraph {
    pub id: String,
    /// `(id, label)` in creation order.
    pub nodes: Vec<(String, String)>,
    /// `(id, source id, target id)` in creation order.
    pub edges: Vec<(String, Option<String>, Option<String>)>,
}

impl RawGraph {
    pub fn label(&self, node: &str) -> Option<&str> {
        self.nodes
            .iter()
            .find(|(id, _)| id == node)
            .map(|(_, l)| l.as_str())
    }
}

fn by_position<'a>(doc: &Doc, mut ids: Vec<&'a str>) -> Vec<&'a str> {
    ids.sort_by_key(|id| doc.position(id));
    ids
}

/// Reads the graphs of an object-edge encoded document.
pub fn raw_graphs(doc: &Doc, enc: &Encoding) -> Vec<RawGraph> {
    doc.of_class(enc.graph)
        .map(|g| {
            let nodes = by_position(doc, doc.targets(&g.id, enc.nodes))
                .into_iter()
                .map(|n| {
                    let label = doc.string_attr(n, enc.label_attr).unwrap_or_default();
                    (n.to_string(), label.to_string())
                })
                .collect();
            let edges = match enc.edge {
                EdgeEncoding::Objects {
                    edges, src, trg, ..
                } => by_position(doc, doc.targets(&g.id, edges))
                    .into_iter()
                    .map(|e| {
                        let first = |assoc| {
                            by_position(doc, doc.targets(e, assoc))
                                .first()
                                .map(|s| s.to_string())
                        };
                        (e.to_string(), first(src), first(trg))
                    })
                    .collect(),
                EdgeEncoding::Links { .. } => Vec::new(),
            };
            RawGraph {
                id: g.id.clone(),
                nodes,
                edges,
            }
        })
        .collect()
}

/// Shapes of all graphs of encoding `enc`, in creation order.
pub fn graph_shapes(doc: &Doc, enc: &Encoding) -> Vec<GraphShape> {
    let graphs = raw_graphs(doc, enc);
    graphs
        .iter()
        .map(|g| {
            let label = |id: &Option<String>| {
                id.as_deref().map(|n| {
                    doc.string_attr(n, enc.label_attr)
                        .unwrap_or_default()
                        .to_string()
                })
            };
            let edges = match enc.edge {
                EdgeEncoding::Objects { .. } => g
                    .edges
                    .iter()
                    .map(|(_, s, t)| EdgeShape {
                        src: label(s),
                        trg: label(t),
                    })
                    .collect(),
                EdgeEncoding::Links { assoc } => g
                    .nodes
                    .iter()
                    .flat_map(|(n, l)| {
                        doc.targets(n, assoc).into_iter().map(move |t| EdgeShape {
                            src: Some(l.clone()),
                            trg: Some(
                                doc.string_attr(t, enc.label_attr)
                                    .unwrap_or_default()
                                    .to_string(),
                            ),
                        })
                    })
                    .collect(),
            };
            GraphShape::new(g.nodes.iter().map(|(_, l)| l.clone()).collect(), edges)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectFact {
    pub class: String,
    /// Attribute values as JSON text.
    pub attrs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkFact {
    pub assoc: String,
    /// Indices into the object list.
    pub src: usize,
    pub trg: usize,
}

/// What a task's output is judged by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummaryKind {
    Objects,
    Strings,
    Counts,
    Graphs(Encoding),
    Deletion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Summary {
    /// Every object and link, in creation order.
    Objects {
        objects: Vec<ObjectFact>,
        links: Vec<LinkFact>,
    },
    /// `StringResult.result` values in creation order.
    Strings {
        values: Vec<String>,
    },
    /// `IntResult.result` values in creation order.
    Counts {
        values: Vec<i64>,
    },
    Graphs {
        graphs: Vec<GraphShape>,
    },
    /// Graph shapes plus the ids of all surviving edge objects, sorted.
    Deletion {
        graphs: Vec<GraphShape>,
        remaining_edges: Vec<String>,
    },
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serde_json::to_string(self).map_err(|_| fmt::Error)?)
    }
}

pub fn object_facts(doc: &Doc) -> (Vec<ObjectFact>, Vec<LinkFact>) {
    let objects = doc
        .objects
        .iter()
        .map(|o| ObjectFact {
            class: o.class.clone(),
            attrs: o
                .attrs
                .iter()
                .map(|(k, v)| (k.clone(), v.to_string()))
                .collect(),
        })
        .collect();
    let links = doc
        .links
        .iter()
        .filter_map(|l| {
            Some(LinkFact {
                assoc: l.assoc.clone(),
                src: doc.position(&l.src)?,
                trg: doc.position(&l.trg)?,
            })
        })
        .collect();
    (objects, links)
}

pub fn string_results(doc: &Doc) -> Vec<String> {
    doc.of_class("StringResult")
        .filter_map(|o| {
            o.attrs
                .get("result")
                .and_then(|v| v.as_str())
                .map(str::to_string)
        })
        .collect()
}

pub fn int_results(doc: &Doc) -> Vec<i64> {
    doc.of_class("IntResult")
        .filter_map(|o| o.attrs.get("result").and_then(|v| v.as_i64()))
        .collect()
}

pub fn edge_ids(doc: &Doc, class: &str) -> Vec<String> {
    let mut ids: Vec<String> = doc.of_class(class).map(|o| o.id.clone()).collect();
    ids.sort();
    ids
}

/// Summarizes the document produced by running a task.
pub fn summarize(kind: SummaryKind, document: &str) -> Result<Summary, String> {
    let doc = Doc::parse(document)?;
    Ok(match kind {
        SummaryKind::Objects => {
            let (objects, links) = object_facts(&doc);
            Summary::Objects { objects, links }
        }
        SummaryKind::Strings => Summary::Strings {
            values: string_results(&doc),
        },
        SummaryKind::Counts => Summary::Counts {
            values: int_results(&doc),
        },
        SummaryKind::Graphs(enc) => Summary::Graphs {
            graphs: graph_shapes(&doc, &enc),
        },
        SummaryKind::Deletion => Summary::Deletion {
            graphs: graph_shapes(&doc, &GRAPH1),
            remaining_edges: edge_ids(&doc, "Edge"),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{"conformsTo": "graph1", "objects": [
        {"id": "g", "class": "Graph", "attrs": {}},
        {"id": "b", "class": "Node", "attrs": {"name": "b"}},
        {"id": "a", "class": "Node", "attrs": {"name": "a"}},
        {"id": "e", "class": "Edge", "attrs": {}},
        {"id": "d", "class": "Edge", "attrs": {}}],
      "links": [
        {"assoc": "Graph.nodes", "src": "g", "trg": "a"},
        {"assoc": "Graph.nodes", "src": "g", "trg": "b"},
        {"assoc": "Graph.edges", "src": "g", "trg": "e"},
        {"assoc": "Graph.edges", "src": "g", "trg": "d"},
        {"assoc": "Edge.src", "src": "e", "trg": "a"},
        {"assoc": "Edge.trg", "src": "e", "trg": "b"},
        {"assoc": "Edge.trg", "src": "d", "trg": "a"}]}"#;

    #[test]
    fn raw_graph_is_in_creation_order() {
        let doc = Doc::parse(DOC).unwrap();
        let g = &raw_graphs(&doc, &GRAPH1)[0];
        assert_eq!(g.nodes[0].0, "b");
        assert_eq!(g.edges[1], ("d".to_string(), None, Some("a".to_string())));
    }

    #[test]
    fn shapes_are_sorted() {
        let doc = Doc::parse(DOC).unwrap();
        let shapes = graph_shapes(&doc, &GRAPH1);
        assert_eq!(shapes[0].nodes, vec!["a", "b"]);
        assert_eq!(
            shapes[0].edges,
            vec![
                EdgeShape {
                    src: None,
                    trg: Some("a".into())
                },
                EdgeShape {
                    src: Some("a".into()),
                    trg: Some("b".into())
                },
            ]
        );
    }

    #[test]
    fn summary_serializes_with_kind_tag() {
        let s = Summary::Counts { values: vec![5] };
        assert_eq!(s.to_string(), r#"{"kind":"counts","values":[5]}"#);
        let back: Summary = serde_json::from_str(&s.to_string()).unwrap();
        assert_eq!(back, s);
    }
}
