//! Random (pattern, model) pairs and an exhaustive matcher to compare the
//! backtracking search against.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::metamodel_source;
use super::random::{generate, RandomConfig};
use crate::expr::{eval, BinOp, Bindings, Datum, Expr};
use crate::metamodel::{ClassId, Metamodel};
use crate::model::{import_model, Model, ObjectId, Value};
use crate::pattern::{match_rule, ClassElement, Pattern, PatternLink};

#[derive(Debug, Clone)]
pub struct PatternCase {
    pub seed: u64,
    pub model: Model,
    pub pattern: Pattern,
}

fn graph1() -> Arc<Metamodel> {
    let mm = Metamodel::from_json(metamodel_source("graph1").expect("bundled"))
        .expect("valid metamodel");
    Arc::new(mm.augment_navigability())
}

fn random_element(rng: &mut ChaCha8Rng, mm: &Metamodel, name: String) -> ClassElement {
    let classes = ["Graph", "Node", "Node", "Edge", "Edge"];
    let class = mm
        .class_id(classes.choose(rng).expect("non-empty"))
        .expect("graph1 class");
    let mut element = ClassElement::matched(&name, class);
    if mm.class(class).name == "Node" && rng.gen_bool(0.3) {
        let op = if rng.gen_bool(0.5) {
            BinOp::Eq
        } else {
            BinOp::Ne
        };
        let value = format!("n{}", rng.gen_range(1..=4));
        element = element.with_constraint(Expr::binary(
            op,
            Expr::attr(&name, "name"),
            Expr::string(&value),
        ));
    }
    element
}

/// Adds up to `count` links between elements of `pool`, at least one end of
/// each drawn from `must_touch` when it is non-empty.
fn random_links(
    rng: &mut ChaCha8Rng,
    mm: &Metamodel,
    pool: &[(String, ClassId)],
    must_touch: &[(String, ClassId)],
    count: usize,
) -> Vec<PatternLink> {
    let mut out = Vec::new();
    for _ in 0..count {
        let a = must_touch
            .choose(rng)
            .or_else(|| pool.choose(rng))
            .expect("non-empty pool");
        let b = pool.choose(rng).expect("non-empty pool");
        let (from, to) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
        let assocs: Vec<_> = (0..mm.associations().len())
            .map(crate::metamodel::AssocId)
            .filter(|&id| {
                let assoc = mm.association(id);
                mm.is_subclass(from.1, assoc.source) && mm.is_subclass(to.1, assoc.target)
            })
            .collect();
        if let Some(&assoc) = assocs.choose(rng) {
            out.push(PatternLink::new(&from.0, assoc, &to.0));
        }
    }
    out
}

/// A random graph1 model and a pattern of at most four elements and at most
/// one NOT condition.
pub fn random_case(seed: u64) -> PatternCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mm = graph1();
    let config = RandomConfig {
        max_nodes: 6,
        max_edges: 8,
        ..RandomConfig::default()
    };
    let document = generate(seed, &config).document;
    let model = import_model(&document, Arc::clone(&mm)).expect("generated models conform");

    let mut pattern = Pattern::default();
    for i in 0..rng.gen_range(1..=4) {
        pattern
            .elements
            .push(random_element(&mut rng, &mm, format!("x{i}")));
    }
    let outer: Vec<(String, ClassId)> = pattern
        .elements
        .iter()
        .map(|e| (e.name.clone(), e.class))
        .collect();
    let count = rng.gen_range(0..=outer.len() + 1);
    pattern.links = random_links(&mut rng, &mm, &outer, &[], count);
    if rng.gen_bool(0.6) {
        let mut nac = Pattern::default();
        for i in 0..rng.gen_range(0..=2) {
            nac.elements
                .push(random_element(&mut rng, &mm, format!("y{i}")));
        }
        let own: Vec<(String, ClassId)> = nac
            .elements
            .iter()
            .map(|e| (e.name.clone(), e.class))
            .collect();
        let pool: Vec<(String, ClassId)> = outer.iter().chain(&own).cloned().collect();
        let count = rng.gen_range(1..=2);
        nac.links = random_links(&mut rng, &mm, &pool, &own, count);
        pattern.nots.push(nac);
    }
    PatternCase {
        seed,
        model,
        pattern,
    }
}

fn truthy(e: &Expr, b: &Bindings, m: &Model) -> bool {
    matches!(eval(e, b, m), Ok(Datum::Value(Value::Boolean(true))))
}

fn satisfied(p: &Pattern, b: &Bindings, m: &Model) -> bool {
    p.links
        .iter()
        .all(|l| match (b.object(&l.from), b.object(&l.to)) {
            (Some(s), Some(t)) => m.has_link(l.assoc, s, t),
            _ => false,
        })
        && p.elements
            .iter()
            .filter_map(|e| e.constraint.as_ref())
            .all(|c| truthy(c, b, m))
}

/// Every assignment of `elements` to instances of their classes, in
/// lexicographic order with the first element most significant.
fn tuples(elements: &[ClassElement], m: &Model) -> Vec<Vec<ObjectId>> {
    let mut out = vec![Vec::new()];
    for e in elements {
        let candidates = m.objects_of_class(e.class);
        out = out
            .into_iter()
            .flat_map(|t| {
                candidates.iter().map(move |&c| {
                    let mut t = t.clone();
                    t.push(c);
                    t
                })
            })
            .collect();
    }
    out
}

fn bind(base: &Bindings, elements: &[ClassElement], tuple: &[ObjectId]) -> Bindings {
    let mut b = base.clone();
    for (e, &o) in elements.iter().zip(tuple) {
        b.set(e.name.clone(), Datum::Object(o));
    }
    b
}

/// The first match by brute force: outer tuples in canonical order, each NOT
/// condition checked over every extension.
pub fn exhaustive_first(pattern: &Pattern, model: &Model) -> Option<Bindings> {
    tuples(&pattern.elements, model).into_iter().find_map(|t| {
        let b = bind(&Bindings::new(), &pattern.elements, &t);
        let blocked = |nac: &Pattern| {
            tuples(&nac.elements, model)
                .iter()
                .any(|ext| satisfied(nac, &bind(&b, &nac.elements, ext), model))
        };
        (satisfied(pattern, &b, model) && !pattern.nots.iter().any(blocked)).then_some(b)
    })
}

/// Compares the matcher with [`exhaustive_first`] on one case.
pub fn check_case(case: &PatternCase) -> Result<(), String> {
    let engine = match_rule(&case.pattern, &Bindings::new(), &case.model)
        .map_err(|e| format!("seed {}: matcher error: {e}", case.seed))?;
    let brute = exhaustive_first(&case.pattern, &case.model);
    if engine == brute {
        Ok(())
    } else {
        Err(format!(
            "seed {}: matcher found {:?}, enumeration found {:?} for {:?}",
            case.seed, engine, brute, case.pattern
        ))
    }
}

/// Checks `count` cases from `base_seed` on; returns the disagreements and
/// how many cases had a match at all.
pub fn check_many(base_seed: u64, count: usize) -> (Vec<String>, usize) {
    let mut failures = Vec::new();
    let mut matched = 0;
    for i in 0..count as u64 {
        let case = random_case(base_seed.wrapping_add(i));
        if exhaustive_first(&case.pattern, &case.model).is_some() {
            matched += 1;
        }
        if let Err(e) = check_case(&case) {
            failures.push(e);
        }
    }
    (failures, matched)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cases_are_bounded_and_reproducible() {
        for seed in 0..50 {
            let case = random_case(seed);
            assert!((1..=4).contains(&case.pattern.elements.len()));
            assert!(case.pattern.nots.len() <= 1);
            assert_eq!(case.pattern, random_case(seed).pattern);
        }
    }

    #[test]
    fn nac_blocks_in_enumeration() {
        let mut case = random_case(3);
        let mm = Arc::clone(case.model.metamodel_arc());
        let node = mm.class_id("Node").unwrap();
        case.pattern = Pattern {
            elements: vec![ClassElement::matched("x0", node)],
            links: Vec::new(),
            nots: vec![Pattern {
                elements: vec![ClassElement::matched("y0", node)],
                ..Pattern::default()
            }],
        };
        assert_eq!(exhaustive_first(&case.pattern, &case.model), None);
    }
}
