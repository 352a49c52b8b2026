//! In-memory model repository.
//!
//! Objects and links carry integer ids allocated in creation order, and every
//! iteration over the repository follows that order. Links are stored once and
//! indexed from both endpoints, which is all that backward navigability needs.
//! Parallel links (same association, same endpoints) are allowed.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Deserialize;
use serde_json::{json, Map};

use crate::metamodel::{AssocId, ClassId, Metamodel, Origin, PrimType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkId(pub u64);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A primitive attribute value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Integer(i64),
    String(String),
    Boolean(bool),
}

impl Value {
    pub fn prim_type(&self) -> PrimType {
        match self {
            Value::Integer(_) => PrimType::Integer,
            Value::String(_) => PrimType::String,
            Value::Boolean(_) => PrimType::Boolean,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Integer(i) => json!(i),
            Value::String(s) => json!(s),
            Value::Boolean(b) => json!(b),
        }
    }

    fn from_json(value: &serde_json::Value) -> Option<Value> {
        match value {
            serde_json::Value::Bool(b) => Some(Value::Boolean(*b)),
            serde_json::Value::String(s) => Some(Value::String(s.clone())),
            serde_json::Value::Number(n) => n.as_i64().map(Value::Integer),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Integer(i) => write!(f, "{i}"),
            Value::String(s) => write!(f, "{s:?}"),
            Value::Boolean(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("malformed model document: {0}")]
    Syntax(String),
    #[error("document conforms to `{found}`, expected one of `{expected}`")]
    WrongMetamodel { found: String, expected: String },
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("class `{0}` is abstract")]
    AbstractClass(String),
    #[error("class `{0}` is temporary and cannot appear in an imported model")]
    TemporaryClass(String),
    #[error("unknown association `{0}`")]
    UnknownAssociation(String),
    #[error("association `{0}` is temporary and cannot appear in an imported model")]
    TemporaryAssociation(String),
    #[error("class `{class}` has no attribute `{attr}`")]
    UnknownAttribute { class: String, attr: String },
    #[error("attribute `{class}.{attr}` expects {expected}, got {found}")]
    TypeMismatch {
        class: String,
        attr: String,
        expected: PrimType,
        found: String,
    },
    #[error("duplicate object id `{0}`")]
    DuplicateId(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("link `{assoc}` cannot connect `{src}` to `{trg}`: endpoint class mismatch")]
    EndpointMismatch {
        assoc: String,
        src: String,
        trg: String,
    },
    #[error("no `{assoc}` link from `{src}` to `{trg}`")]
    NoSuchLink {
        assoc: String,
        src: String,
        trg: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MObject {
    pub id: ObjectId,
    /// Interchange identifier, preserved from the imported document.
    pub label: String,
    pub class: ClassId,
    pub slots: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MLink {
    pub id: LinkId,
    pub assoc: AssocId,
    pub source: ObjectId,
    pub target: ObjectId,
}

/// A conformance problem found by [`Model::check_conformance`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation(pub String);

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone)]
pub struct Model {
    metamodel: Arc<Metamodel>,
    objects: BTreeMap<ObjectId, MObject>,
    links: BTreeMap<LinkId, MLink>,
    labels: HashMap<String, ObjectId>,
    by_class: HashMap<ClassId, BTreeSet<ObjectId>>,
    outgoing: HashMap<ObjectId, BTreeSet<LinkId>>,
    incoming: HashMap<ObjectId, BTreeSet<LinkId>>,
    next_object: u64,
    next_link: u64,
}

impl Model {
    pub fn new(metamodel: Arc<Metamodel>) -> Model {
        Model {
            metamodel,
            objects: BTreeMap::new(),
            links: BTreeMap::new(),
            labels: HashMap::new(),
            by_class: HashMap::new(),
            outgoing: HashMap::new(),
            incoming: HashMap::new(),
            next_object: 0,
            next_link: 0,
        }
    }

    pub fn metamodel(&self) -> &Metamodel {
        &self.metamodel
    }

    pub fn metamodel_arc(&self) -> &Arc<Metamodel> {
        &self.metamodel
    }

    /// Creates an object with a generated interchange label.
    pub fn create_object(&mut self, class: ClassId) -> Result<ObjectId, ModelError> {
        let mut label = format!("_{}", self.next_object);
        while self.labels.contains_key(&label) {
            label.push('\'');
        }
        self.create_labelled(class, label)
    }

    fn create_labelled(&mut self, class: ClassId, label: String) -> Result<ObjectId, ModelError> {
        let meta = self.metamodel.class(class);
        if meta.is_abstract {
            return Err(ModelError::AbstractClass(meta.name.clone()));
        }
        if self.labels.contains_key(&label) {
            return Err(ModelError::DuplicateId(label));
        }
        let id = ObjectId(self.next_object);
        self.next_object += 1;
        self.labels.insert(label.clone(), id);
        self.by_class.entry(class).or_default().insert(id);
        self.objects.insert(
            id,
            MObject {
                id,
                label,
                class,
                slots: BTreeMap::new(),
            },
        );
        Ok(id)
    }

    /// Removes an object together with every link incident to it. Returns the
    /// number of links removed. Contained objects are not deleted.
    pub fn delete_object(&mut self, id: ObjectId) -> Result<usize, ModelError> {
        let object = self
            .objects
            .remove(&id)
            .ok_or_else(|| ModelError::UnknownObject(id.to_string()))?;
        self.labels.remove(&object.label);
        if let Some(set) = self.by_class.get_mut(&object.class) {
            set.remove(&id);
        }
        let mut incident: BTreeSet<LinkId> = self.outgoing.remove(&id).unwrap_or_default();
        incident.extend(self.incoming.remove(&id).unwrap_or_default());
        for link_id in &incident {
            let link = self.links.remove(link_id).expect("indexed link exists");
            if let Some(out) = self.outgoing.get_mut(&link.source) {
                out.remove(link_id);
            }
            if let Some(inc) = self.incoming.get_mut(&link.target) {
                inc.remove(link_id);
            }
        }
        Ok(incident.len())
    }

    pub fn create_link(
        &mut self,
        assoc: AssocId,
        source: ObjectId,
        target: ObjectId,
    ) -> Result<LinkId, ModelError> {
        let meta = self.metamodel.association(assoc);
        let src = self
            .objects
            .get(&source)
            .ok_or_else(|| ModelError::UnknownObject(source.to_string()))?;
        let trg = self
            .objects
            .get(&target)
            .ok_or_else(|| ModelError::UnknownObject(target.to_string()))?;
        if !self.metamodel.is_subclass(src.class, meta.source)
            || !self.metamodel.is_subclass(trg.class, meta.target)
        {
            return Err(ModelError::EndpointMismatch {
                assoc: self.metamodel.assoc_ref(assoc),
                src: src.label.clone(),
                trg: trg.label.clone(),
            });
        }
        let id = LinkId(self.next_link);
        self.next_link += 1;
        self.links.insert(
            id,
            MLink {
                id,
                assoc,
                source,
                target,
            },
        );
        self.outgoing.entry(source).or_default().insert(id);
        self.incoming.entry(target).or_default().insert(id);
        Ok(id)
    }

    /// Removes the earliest link of `assoc` from `source` to `target`.
    pub fn delete_link(
        &mut self,
        assoc: AssocId,
        source: ObjectId,
        target: ObjectId,
    ) -> Result<(), ModelError> {
        let found =
            self.find_link(assoc, source, target)
                .ok_or_else(|| ModelError::NoSuchLink {
                    assoc: self.metamodel.assoc_ref(assoc),
                    src: self.label_or_id(source),
                    trg: self.label_or_id(target),
                })?;
        self.links.remove(&found);
        if let Some(out) = self.outgoing.get_mut(&source) {
            out.remove(&found);
        }
        if let Some(inc) = self.incoming.get_mut(&target) {
            inc.remove(&found);
        }
        Ok(())
    }

    fn label_or_id(&self, id: ObjectId) -> String {
        self.objects
            .get(&id)
            .map(|o| o.label.clone())
            .unwrap_or_else(|| id.to_string())
    }

    pub fn find_link(&self, assoc: AssocId, source: ObjectId, target: ObjectId) -> Option<LinkId> {
        self.outgoing.get(&source)?.iter().copied().find(|l| {
            let link = &self.links[l];
            link.assoc == assoc && link.target == target
        })
    }

    pub fn has_link(&self, assoc: AssocId, source: ObjectId, target: ObjectId) -> bool {
        self.find_link(assoc, source, target).is_some()
    }

    /// Objects reachable from `id` over `assoc`, forward (as source) or
    /// backward (as target). Sorted by creation order, without duplicates.
    pub fn neighbors(&self, id: ObjectId, assoc: AssocId, forward: bool) -> Vec<ObjectId> {
        let index = if forward {
            &self.outgoing
        } else {
            &self.incoming
        };
        let mut out: Vec<ObjectId> = index
            .get(&id)
            .into_iter()
            .flatten()
            .map(|l| &self.links[l])
            .filter(|l| l.assoc == assoc)
            .map(|l| if forward { l.target } else { l.source })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn set_slot(&mut self, id: ObjectId, attr: &str, value: Value) -> Result<(), ModelError> {
        let metamodel = Arc::clone(&self.metamodel);
        let object = self
            .objects
            .get_mut(&id)
            .ok_or_else(|| ModelError::UnknownObject(id.to_string()))?;
        let class = metamodel.class(object.class);
        let declared = metamodel.attribute(object.class, attr).ok_or_else(|| {
            ModelError::UnknownAttribute {
                class: class.name.clone(),
                attr: attr.to_string(),
            }
        })?;
        if declared.ty != value.prim_type() {
            return Err(ModelError::TypeMismatch {
                class: class.name.clone(),
                attr: attr.to_string(),
                expected: declared.ty,
                found: value.prim_type().to_string(),
            });
        }
        object.slots.insert(attr.to_string(), value);
        Ok(())
    }

    pub fn slot(&self, id: ObjectId, attr: &str) -> Option<&Value> {
        self.objects.get(&id)?.slots.get(attr)
    }

    pub fn object(&self, id: ObjectId) -> Option<&MObject> {
        self.objects.get(&id)
    }

    pub fn contains(&self, id: ObjectId) -> bool {
        self.objects.contains_key(&id)
    }

    pub fn by_label(&self, label: &str) -> Option<ObjectId> {
        self.labels.get(label).copied()
    }

    /// All objects in creation order.
    pub fn objects(&self) -> impl Iterator<Item = &MObject> {
        self.objects.values()
    }

    /// All links in creation order.
    pub fn links(&self) -> impl Iterator<Item = &MLink> {
        self.links.values()
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Links touching `id` in either role.
    pub fn incident_links(&self, id: ObjectId) -> usize {
        self.links
            .values()
            .filter(|l| l.source == id || l.target == id)
            .count()
    }

    pub fn is_instance(&self, id: ObjectId, class: ClassId) -> bool {
        self.objects
            .get(&id)
            .is_some_and(|o| self.metamodel.is_subclass(o.class, class))
    }

    /// Instances of `class` or any subclass, in creation order.
    pub fn objects_of_class(&self, class: ClassId) -> Vec<ObjectId> {
        let mut out: Vec<ObjectId> = self
            .metamodel
            .descendants(class)
            .into_iter()
            .filter_map(|c| self.by_class.get(&c))
            .flatten()
            .copied()
            .collect();
        out.sort();
        out
    }

    /// Sweeps every object and link against the metamodel.
    pub fn check_conformance(&self) -> Vec<Violation> {
        let mm = &self.metamodel;
        let mut out = Vec::new();
        for object in self.objects.values() {
            let class = mm.class(object.class);
            if class.is_abstract {
                out.push(Violation(format!(
                    "object `{}` instantiates abstract class `{}`",
                    object.label, class.name
                )));
            }
            for (name, value) in &object.slots {
                match mm.attribute(object.class, name) {
                    None => out.push(Violation(format!(
                        "object `{}` has slot `{name}` not declared on `{}`",
                        object.label, class.name
                    ))),
                    Some(attr) if attr.ty != value.prim_type() => out.push(Violation(format!(
                        "slot `{}.{name}` holds {} but `{}` is declared",
                        object.label,
                        value.prim_type(),
                        attr.ty
                    ))),
                    Some(_) => {}
                }
            }
        }
        for link in self.links.values() {
            let assoc = mm.association(link.assoc);
            let label = mm.assoc_ref(link.assoc);
            match (
                self.objects.get(&link.source),
                self.objects.get(&link.target),
            ) {
                (Some(src), Some(trg)) => {
                    if !mm.is_subclass(src.class, assoc.source)
                        || !mm.is_subclass(trg.class, assoc.target)
                    {
                        out.push(Violation(format!(
                            "link `{label}` from `{}` to `{}` has mistyped endpoints",
                            src.label, trg.label
                        )));
                    }
                }
                _ => out.push(Violation(format!("link `{label}` has a dangling endpoint"))),
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Interchange

#[derive(Deserialize)]
struct ModelDoc {
    #[serde(rename = "conformsTo")]
    conforms_to: String,
    #[serde(default)]
    objects: Vec<ObjectDoc>,
    #[serde(default)]
    links: Vec<LinkDoc>,
}

#[derive(Deserialize)]
struct ObjectDoc {
    id: String,
    class: String,
    #[serde(default)]
    attrs: BTreeMap<String, serde_json::Value>,
}

#[derive(Deserialize)]
struct LinkDoc {
    assoc: String,
    src: String,
    trg: String,
}

/// Loads a model document into a repository typed by the (augmented,
/// possibly extended) working metamodel. Only original-origin elements may
/// appear in the document.
pub fn import_model(document: &str, metamodel: Arc<Metamodel>) -> Result<Model, ModelError> {
    let doc: ModelDoc =
        serde_json::from_str(document).map_err(|e| ModelError::Syntax(e.to_string()))?;
    let known = doc.conforms_to == metamodel.name
        || doc
            .conforms_to
            .split('+')
            .all(|part| metamodel.part_names().any(|p| p == part));
    if !known {
        return Err(ModelError::WrongMetamodel {
            found: doc.conforms_to,
            expected: metamodel.name.clone(),
        });
    }
    let mut model = Model::new(Arc::clone(&metamodel));
    for obj in doc.objects {
        let class = metamodel
            .class_id(&obj.class)
            .ok_or_else(|| ModelError::UnknownClass(obj.class.clone()))?;
        if metamodel.class(class).origin == Origin::Temporary {
            return Err(ModelError::TemporaryClass(obj.class));
        }
        let id = model.create_labelled(class, obj.id.clone())?;
        for (name, raw) in obj.attrs {
            let value = Value::from_json(&raw).ok_or_else(|| ModelError::TypeMismatch {
                class: obj.class.clone(),
                attr: name.clone(),
                expected: metamodel
                    .attribute(class, &name)
                    .map(|a| a.ty)
                    .unwrap_or(PrimType::String),
                found: raw.to_string(),
            })?;
            model.set_slot(id, &name, value)?;
        }
    }
    for link in doc.links {
        let assoc = metamodel
            .resolve_assoc_ref(&link.assoc)
            .ok_or_else(|| ModelError::UnknownAssociation(link.assoc.clone()))?;
        if metamodel.association(assoc).origin == Origin::Temporary {
            return Err(ModelError::TemporaryAssociation(link.assoc));
        }
        let src = model
            .by_label(&link.src)
            .ok_or_else(|| ModelError::UnknownObject(link.src.clone()))?;
        let trg = model
            .by_label(&link.trg)
            .ok_or_else(|| ModelError::UnknownObject(link.trg.clone()))?;
        model.create_link(assoc, src, trg)?;
    }
    Ok(model)
}

/// Writes the part of `model` that belongs to `target` (an original,
/// unaugmented metamodel): objects of classes it declares, their declared
/// slots, and links of its associations between exported objects.
pub fn export_model(model: &Model, target: &Metamodel) -> String {
    let mm = model.metamodel();
    let keep_class = |class: ClassId| {
        let meta = mm.class(class);
        meta.origin != Origin::Temporary && target.class_id(&meta.name).is_some()
    };
    let mut objects = Vec::new();
    let mut kept = BTreeSet::new();
    for object in model.objects() {
        if !keep_class(object.class) {
            continue;
        }
        let target_class = target
            .class_id(&mm.class(object.class).name)
            .expect("checked above");
        let declared = target.attributes_of(target_class);
        let attrs: Map<String, serde_json::Value> = object
            .slots
            .iter()
            .filter(|(name, _)| declared.contains_key(name.as_str()))
            .map(|(name, value)| (name.clone(), value.to_json()))
            .collect();
        kept.insert(object.id);
        objects.push(object_json(object, &mm.class(object.class).name, attrs));
    }
    let mut links = Vec::new();
    for link in model.links() {
        let assoc = mm.association(link.assoc);
        if assoc.origin == Origin::Temporary {
            continue;
        }
        let reference = mm.assoc_ref(link.assoc);
        if target.resolve_assoc_ref(&reference).is_none() {
            continue;
        }
        if kept.contains(&link.source) && kept.contains(&link.target) {
            links.push(link_json(model, &reference, link));
        }
    }
    render(&target.name, objects, links)
}

/// Writes the whole working model, temporaries included.
pub fn export_unstripped(model: &Model) -> String {
    let mm = model.metamodel();
    let objects = model
        .objects()
        .map(|o| {
            let attrs = o
                .slots
                .iter()
                .map(|(k, v)| (k.clone(), v.to_json()))
                .collect();
            object_json(o, &mm.class(o.class).name, attrs)
        })
        .collect();
    let links = model
        .links()
        .map(|l| link_json(model, &mm.assoc_ref(l.assoc), l))
        .collect();
    render(&mm.name, objects, links)
}

fn object_json(
    object: &MObject,
    class: &str,
    attrs: Map<String, serde_json::Value>,
) -> serde_json::Value {
    json!({ "id": object.label, "class": class, "attrs": attrs })
}

fn link_json(model: &Model, reference: &str, link: &MLink) -> serde_json::Value {
    json!({
        "assoc": reference,
        "src": model.objects[&link.source].label,
        "trg": model.objects[&link.target].label,
    })
}

fn render(
    conforms_to: &str,
    objects: Vec<serde_json::Value>,
    links: Vec<serde_json::Value>,
) -> String {
    let doc = json!({ "conformsTo": conforms_to, "objects": objects, "links": links });
    canonical_json(&doc)
}

/// Pretty-printed JSON with sorted keys and a trailing newline.
pub fn canonical_json(value: &serde_json::Value) -> String {
    // serde_json's default map is a BTreeMap, so keys come out sorted.
    let mut out = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    out.push('\n');
    out
}
