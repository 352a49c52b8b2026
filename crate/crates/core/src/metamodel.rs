//! Metamodels: classes, attributes and associations.
//!
//! A [`Metamodel`] is parsed from the JSON interchange format, validated, and
//! then prepared for transformation in two steps:
//!
//! 1. [`Metamodel::augment_navigability`] makes every association navigable in
//!    both directions. Opposite ends that had to be added are tagged
//!    [`Origin::Augmented`]; an unnamed opposite end is called `~<trgEnd>`.
//! 2. [`Metamodel::extend`] adds bookkeeping classes and associations (trace
//!    links, markers). Everything added this way is [`Origin::Temporary`].
//!
//! [`Metamodel::strip`] undoes both steps. Multiplicities are accepted in the
//! input format but never enforced.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Deserialize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetamodelError {
    #[error("malformed metamodel document: {0}")]
    Syntax(String),
    #[error("duplicate class `{0}`")]
    DuplicateClass(String),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("cyclic inheritance through class `{0}`")]
    CyclicInheritance(String),
    #[error("duplicate attribute `{attr}` in the inheritance closure of `{class}`")]
    DuplicateAttribute { class: String, attr: String },
    #[error("unsupported primitive type `{ty}` on `{class}.{attr}`")]
    UnsupportedType {
        class: String,
        attr: String,
        ty: String,
    },
    #[error("duplicate association end `{0}`")]
    DuplicateAssociation(String),
    #[error("association `{0}` must be navigable forward")]
    NotForwardNavigable(String),
    #[error("unknown navigability direction `{dir}` on association `{assoc}`")]
    UnknownDirection { assoc: String, dir: String },
    #[error("extension element `{0}` collides with an existing element")]
    Collision(String),
}

/// Where a metamodel element came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    Original,
    /// Backward navigability added during import.
    Augmented,
    /// Added by an extension document; never exported.
    Temporary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrimType {
    String,
    Integer,
    Boolean,
}

impl PrimType {
    pub fn from_name(name: &str) -> Option<PrimType> {
        match name {
            "String" => Some(PrimType::String),
            "Integer" => Some(PrimType::Integer),
            "Boolean" => Some(PrimType::Boolean),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PrimType::String => "String",
            PrimType::Integer => "Integer",
            PrimType::Boolean => "Boolean",
        }
    }
}

impl fmt::Display for PrimType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AssocId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub ty: PrimType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaClass {
    pub name: String,
    pub is_abstract: bool,
    pub attributes: Vec<Attribute>,
    pub superclasses: Vec<ClassId>,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaAssociation {
    pub name: String,
    pub source: ClassId,
    pub target: ClassId,
    /// Name of the end at the source class; `None` for one-way references.
    pub source_end: Option<String>,
    pub target_end: String,
    pub navigable_forward: bool,
    pub navigable_backward: bool,
    /// `Augmented` when the backward direction was added by
    /// [`Metamodel::augment_navigability`].
    pub backward_origin: Origin,
    pub containment: bool,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metamodel {
    pub name: String,
    classes: Vec<MetaClass>,
    associations: Vec<MetaAssociation>,
    class_index: HashMap<String, ClassId>,
    assoc_index: HashMap<(ClassId, String), AssocId>,
}

// ---------------------------------------------------------------------------
// JSON interchange

#[derive(Deserialize)]
struct MetamodelDoc {
    name: String,
    #[serde(default)]
    classes: Vec<ClassDoc>,
    #[serde(default)]
    associations: Vec<AssocDoc>,
}

#[derive(Deserialize)]
struct ClassDoc {
    name: String,
    #[serde(default, rename = "abstract")]
    is_abstract: bool,
    #[serde(default, rename = "super")]
    superclasses: Vec<String>,
    #[serde(default)]
    attrs: Vec<AttrDoc>,
}

#[derive(Deserialize)]
struct AttrDoc {
    name: String,
    #[serde(rename = "type")]
    ty: String,
}

// Unknown keys (e.g. multiplicities) are accepted and ignored.
#[derive(Deserialize)]
struct AssocDoc {
    name: String,
    src: String,
    trg: String,
    #[serde(default, rename = "srcEnd")]
    src_end: Option<String>,
    #[serde(rename = "trgEnd")]
    trg_end: String,
    #[serde(default = "default_navigable")]
    navigable: Vec<String>,
    #[serde(default)]
    containment: bool,
}

fn default_navigable() -> Vec<String> {
    vec!["fwd".to_string()]
}

impl Metamodel {
    /// An empty metamodel.
    pub fn empty(name: impl Into<String>) -> Metamodel {
        Metamodel {
            name: name.into(),
            classes: Vec::new(),
            associations: Vec::new(),
            class_index: HashMap::new(),
            assoc_index: HashMap::new(),
        }
    }

    /// Parses and validates a metamodel document. All elements get
    /// [`Origin::Original`].
    pub fn from_json(document: &str) -> Result<Metamodel, MetamodelError> {
        let doc: MetamodelDoc =
            serde_json::from_str(document).map_err(|e| MetamodelError::Syntax(e.to_string()))?;
        let mut mm = Metamodel::empty(doc.name.clone());
        mm.add_document(doc, Origin::Original, false)?;
        Ok(mm)
    }

    /// Adds the classes and associations of an extension document as
    /// temporary elements. Associations may connect extension classes with
    /// existing ones.
    pub fn extend(&self, extension: &str) -> Result<Metamodel, MetamodelError> {
        let doc: MetamodelDoc =
            serde_json::from_str(extension).map_err(|e| MetamodelError::Syntax(e.to_string()))?;
        let mut mm = self.clone();
        mm.add_document(doc, Origin::Temporary, true)?;
        Ok(mm)
    }

    /// Combines independently defined metamodels (e.g. a source and a target
    /// metamodel) into one working metamodel. Class names must not overlap.
    pub fn merge(parts: &[Metamodel]) -> Result<Metamodel, MetamodelError> {
        let name = parts
            .iter()
            .map(|p| p.name.as_str())
            .collect::<Vec<_>>()
            .join("+");
        let mut mm = Metamodel::empty(name);
        for part in parts {
            let offset = mm.classes.len();
            for class in &part.classes {
                if mm.class_index.contains_key(&class.name) {
                    return Err(MetamodelError::DuplicateClass(class.name.clone()));
                }
                let mut class = class.clone();
                for sup in &mut class.superclasses {
                    sup.0 += offset;
                }
                mm.class_index
                    .insert(class.name.clone(), ClassId(mm.classes.len()));
                mm.classes.push(class);
            }
            for assoc in &part.associations {
                let mut assoc = assoc.clone();
                assoc.source.0 += offset;
                assoc.target.0 += offset;
                mm.assoc_index.insert(
                    (assoc.source, assoc.target_end.clone()),
                    AssocId(mm.associations.len()),
                );
                mm.associations.push(assoc);
            }
        }
        Ok(mm)
    }

    fn add_document(
        &mut self,
        doc: MetamodelDoc,
        origin: Origin,
        extension: bool,
    ) -> Result<(), MetamodelError> {
        let first_new = self.classes.len();
        for class in &doc.classes {
            if self.class_index.contains_key(&class.name) {
                return Err(if extension {
                    MetamodelError::Collision(class.name.clone())
                } else {
                    MetamodelError::DuplicateClass(class.name.clone())
                });
            }
            let mut attributes = Vec::with_capacity(class.attrs.len());
            for attr in &class.attrs {
                let ty = PrimType::from_name(&attr.ty).ok_or_else(|| {
                    MetamodelError::UnsupportedType {
                        class: class.name.clone(),
                        attr: attr.name.clone(),
                        ty: attr.ty.clone(),
                    }
                })?;
                attributes.push(Attribute {
                    name: attr.name.clone(),
                    ty,
                });
            }
            self.class_index
                .insert(class.name.clone(), ClassId(self.classes.len()));
            self.classes.push(MetaClass {
                name: class.name.clone(),
                is_abstract: class.is_abstract,
                attributes,
                superclasses: Vec::new(),
                origin,
            });
        }
        for (offset, class) in doc.classes.iter().enumerate() {
            let mut supers = Vec::with_capacity(class.superclasses.len());
            for sup in &class.superclasses {
                supers.push(self.require_class(sup)?);
            }
            self.classes[first_new + offset].superclasses = supers;
        }
        self.check_inheritance()?;

        for assoc in doc.associations {
            let source = self.require_class(&assoc.src)?;
            let target = self.require_class(&assoc.trg)?;
            let key = (source, assoc.trg_end.clone());
            if self.assoc_index.contains_key(&key) {
                let label = format!("{}.{}", assoc.src, assoc.trg_end);
                return Err(if extension {
                    MetamodelError::Collision(label)
                } else {
                    MetamodelError::DuplicateAssociation(label)
                });
            }
            let mut forward = false;
            let mut backward = false;
            for dir in &assoc.navigable {
                match dir.as_str() {
                    "fwd" => forward = true,
                    "bwd" => backward = true,
                    other => {
                        return Err(MetamodelError::UnknownDirection {
                            assoc: assoc.name.clone(),
                            dir: other.to_string(),
                        })
                    }
                }
            }
            if !forward {
                return Err(MetamodelError::NotForwardNavigable(assoc.name.clone()));
            }
            self.assoc_index
                .insert(key, AssocId(self.associations.len()));
            self.associations.push(MetaAssociation {
                name: assoc.name,
                source,
                target,
                source_end: assoc.src_end,
                target_end: assoc.trg_end,
                navigable_forward: forward,
                navigable_backward: backward,
                backward_origin: origin,
                containment: assoc.containment,
                origin,
            });
        }
        Ok(())
    }

    fn require_class(&self, name: &str) -> Result<ClassId, MetamodelError> {
        self.class_id(name)
            .ok_or_else(|| MetamodelError::UnknownClass(name.to_string()))
    }

    /// Rejects inheritance cycles and attribute names that repeat within an
    /// inheritance closure.
    fn check_inheritance(&self) -> Result<(), MetamodelError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        fn visit(mm: &Metamodel, id: ClassId, marks: &mut [Mark]) -> Result<(), MetamodelError> {
            match marks[id.0] {
                Mark::Done => return Ok(()),
                Mark::Active => {
                    return Err(MetamodelError::CyclicInheritance(
                        mm.classes[id.0].name.clone(),
                    ))
                }
                Mark::New => {}
            }
            marks[id.0] = Mark::Active;
            for &sup in &mm.classes[id.0].superclasses {
                visit(mm, sup, marks)?;
            }
            marks[id.0] = Mark::Done;
            Ok(())
        }
        let mut marks = vec![Mark::New; self.classes.len()];
        for id in 0..self.classes.len() {
            visit(self, ClassId(id), &mut marks)?;
        }
        for id in 0..self.classes.len() {
            // ancestors() is deduplicated, so diamonds see each declaration once.
            let mut names: HashMap<&str, ClassId> = HashMap::new();
            for class in self.ancestors(ClassId(id)) {
                for attr in &self.classes[class.0].attributes {
                    if names.insert(attr.name.as_str(), class).is_some() {
                        return Err(MetamodelError::DuplicateAttribute {
                            class: self.classes[id].name.clone(),
                            attr: attr.name.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Makes every association navigable in both directions.
    pub fn augment_navigability(&self) -> Metamodel {
        let mut mm = self.clone();
        for assoc in &mut mm.associations {
            if !assoc.navigable_backward {
                assoc.navigable_backward = true;
                assoc.backward_origin = Origin::Augmented;
                if assoc.source_end.is_none() {
                    assoc.source_end = Some(format!("~{}", assoc.target_end));
                }
            }
        }
        mm
    }

    /// Removes temporary elements and reverts augmented navigability.
    pub fn strip(&self) -> Metamodel {
        let mut mm = Metamodel::empty(self.name.clone());
        let mut remap = HashMap::new();
        for (idx, class) in self.classes.iter().enumerate() {
            if class.origin == Origin::Temporary {
                continue;
            }
            remap.insert(ClassId(idx), ClassId(mm.classes.len()));
            mm.class_index
                .insert(class.name.clone(), ClassId(mm.classes.len()));
            mm.classes.push(class.clone());
        }
        for class in &mut mm.classes {
            class.superclasses = class
                .superclasses
                .iter()
                .filter_map(|s| remap.get(s).copied())
                .collect();
        }
        for assoc in &self.associations {
            if assoc.origin == Origin::Temporary {
                continue;
            }
            let mut assoc = assoc.clone();
            assoc.source = remap[&assoc.source];
            assoc.target = remap[&assoc.target];
            if assoc.backward_origin == Origin::Augmented {
                assoc.navigable_backward = false;
                assoc.backward_origin = Origin::Original;
                if assoc.source_end.as_deref() == Some(&format!("~{}", assoc.target_end)) {
                    assoc.source_end = None;
                }
            }
            mm.assoc_index.insert(
                (assoc.source, assoc.target_end.clone()),
                AssocId(mm.associations.len()),
            );
            mm.associations.push(assoc);
        }
        mm
    }

    pub fn classes(&self) -> &[MetaClass] {
        &self.classes
    }

    pub fn associations(&self) -> &[MetaAssociation] {
        &self.associations
    }

    pub fn class(&self, id: ClassId) -> &MetaClass {
        &self.classes[id.0]
    }

    pub fn association(&self, id: AssocId) -> &MetaAssociation {
        &self.associations[id.0]
    }

    pub fn class_id(&self, name: &str) -> Option<ClassId> {
        self.class_index.get(name).copied()
    }

    /// `class` and all of its (transitive) superclasses, `class` first.
    pub fn ancestors(&self, class: ClassId) -> Vec<ClassId> {
        let mut out = vec![class];
        let mut i = 0;
        while i < out.len() {
            for &sup in &self.classes[out[i].0].superclasses {
                if !out.contains(&sup) {
                    out.push(sup);
                }
            }
            i += 1;
        }
        out
    }

    /// True when `class` is `ancestor` or one of its subclasses.
    pub fn is_subclass(&self, class: ClassId, ancestor: ClassId) -> bool {
        class == ancestor || self.ancestors(class).contains(&ancestor)
    }

    /// `class` and all classes that inherit from it.
    pub fn descendants(&self, class: ClassId) -> Vec<ClassId> {
        (0..self.classes.len())
            .map(ClassId)
            .filter(|&c| self.is_subclass(c, class))
            .collect()
    }

    /// Looks up an attribute in the inheritance closure of `class`.
    pub fn attribute(&self, class: ClassId, name: &str) -> Option<&Attribute> {
        self.ancestors(class)
            .into_iter()
            .flat_map(|c| self.classes[c.0].attributes.iter())
            .find(|a| a.name == name)
    }

    /// All attributes visible on `class`, keyed by name.
    pub fn attributes_of(&self, class: ClassId) -> BTreeMap<&str, PrimType> {
        self.ancestors(class)
            .into_iter()
            .flat_map(|c| self.classes[c.0].attributes.iter())
            .map(|a| (a.name.as_str(), a.ty))
            .collect()
    }

    /// Exact lookup of the association with identity `(source, target_end)`.
    pub fn association_id(&self, source: ClassId, target_end: &str) -> Option<AssocId> {
        self.assoc_index
            .get(&(source, target_end.to_string()))
            .copied()
    }

    /// Looks up the association end `target_end` declared on `class` or one of
    /// its superclasses.
    pub fn find_association(&self, class: ClassId, target_end: &str) -> Option<AssocId> {
        self.ancestors(class)
            .into_iter()
            .find_map(|c| self.association_id(c, target_end))
    }

    /// Resolves an interchange reference of the form `<Class>.<trgEnd>`.
    pub fn resolve_assoc_ref(&self, reference: &str) -> Option<AssocId> {
        let (class, end) = reference.split_once('.')?;
        self.association_id(self.class_id(class)?, end)
    }

    /// The interchange reference `<Class>.<trgEnd>` of an association.
    pub fn assoc_ref(&self, id: AssocId) -> String {
        let assoc = &self.associations[id.0];
        format!("{}.{}", self.classes[assoc.source.0].name, assoc.target_end)
    }

    /// Names of the independently defined metamodels this one was merged
    /// from.
    pub fn part_names(&self) -> impl Iterator<Item = &str> {
        self.name.split('+')
    }

    pub fn augmented_count(&self) -> usize {
        self.associations
            .iter()
            .filter(|a| a.backward_origin == Origin::Augmented)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRAPH3: &str = r#"{
        "name": "graph3",
        "classes": [
            {"name": "Graph3", "attrs": []},
            {"name": "Node3", "attrs": [{"name": "text", "type": "String"}]}
        ],
        "associations": [
            {"name": "nodes", "src": "Graph3", "trg": "Node3", "srcEnd": "graph", "trgEnd": "nodes",
             "navigable": ["fwd", "bwd"], "containment": true},
            {"name": "linksTo", "src": "Node3", "trg": "Node3", "trgEnd": "linksTo",
             "navigable": ["fwd"], "containment": false, "upper": -1}
        ]
    }"#;

    #[test]
    fn empty_class_list_is_valid() {
        let mm =
            Metamodel::from_json(r#"{"name": "m", "classes": [], "associations": []}"#).unwrap();
        assert!(mm.classes().is_empty());
    }

    #[test]
    fn unknown_association_target_is_named() {
        let doc = r#"{"name": "m", "classes": [{"name": "Node"}],
            "associations": [{"name": "a", "src": "Node", "trg": "Nod", "trgEnd": "x"}]}"#;
        let err = Metamodel::from_json(doc).unwrap_err();
        assert_eq!(err, MetamodelError::UnknownClass("Nod".into()));
        assert!(err.to_string().contains("Nod"));
    }

    #[test]
    fn duplicate_class_rejected() {
        let doc = r#"{"name": "m", "classes": [{"name": "A"}, {"name": "A"}]}"#;
        assert_eq!(
            Metamodel::from_json(doc).unwrap_err(),
            MetamodelError::DuplicateClass("A".into())
        );
    }

    #[test]
    fn cyclic_inheritance_rejected() {
        let doc = r#"{"name": "m", "classes": [{"name": "A", "super": ["B"]}, {"name": "B", "super": ["A"]}]}"#;
        assert!(matches!(
            Metamodel::from_json(doc).unwrap_err(),
            MetamodelError::CyclicInheritance(_)
        ));
    }

    #[test]
    fn unsupported_primitive_rejected() {
        let doc = r#"{"name": "m", "classes": [{"name": "A", "attrs": [{"name": "x", "type": "Real"}]}]}"#;
        assert!(matches!(
            Metamodel::from_json(doc).unwrap_err(),
            MetamodelError::UnsupportedType { .. }
        ));
    }

    #[test]
    fn inherited_attribute_redeclaration_rejected() {
        let doc = r#"{"name": "m", "classes": [
            {"name": "A", "attrs": [{"name": "x", "type": "String"}]},
            {"name": "B", "super": ["A"], "attrs": [{"name": "x", "type": "Integer"}]}]}"#;
        assert!(matches!(
            Metamodel::from_json(doc).unwrap_err(),
            MetamodelError::DuplicateAttribute { .. }
        ));
    }

    #[test]
    fn diamond_inheritance_is_not_a_duplicate() {
        let doc = r#"{"name": "m", "classes": [
            {"name": "A", "attrs": [{"name": "x", "type": "String"}]},
            {"name": "B", "super": ["A"]}, {"name": "C", "super": ["A"]},
            {"name": "D", "super": ["B", "C"]}]}"#;
        let mm = Metamodel::from_json(doc).unwrap();
        let d = mm.class_id("D").unwrap();
        assert_eq!(mm.attribute(d, "x").unwrap().ty, PrimType::String);
        assert!(mm.is_subclass(d, mm.class_id("A").unwrap()));
    }

    #[test]
    fn same_end_name_on_different_sources() {
        let doc = r#"{"name": "m", "classes": [{"name": "A"}, {"name": "B"}],
            "associations": [
                {"name": "x", "src": "A", "trg": "B", "trgEnd": "to"},
                {"name": "y", "src": "B", "trg": "A", "trgEnd": "to"}]}"#;
        let mm = Metamodel::from_json(doc).unwrap();
        assert_eq!(mm.associations().len(), 2);
        let dup = r#"{"name": "m", "classes": [{"name": "A"}, {"name": "B"}],
            "associations": [
                {"name": "x", "src": "A", "trg": "B", "trgEnd": "to"},
                {"name": "y", "src": "A", "trg": "A", "trgEnd": "to"}]}"#;
        assert!(matches!(
            Metamodel::from_json(dup).unwrap_err(),
            MetamodelError::DuplicateAssociation(_)
        ));
    }

    #[test]
    fn augmentation_marks_backward_end() {
        let mm = Metamodel::from_json(GRAPH3).unwrap();
        let aug = mm.augment_navigability();
        let links = aug.resolve_assoc_ref("Node3.linksTo").unwrap();
        let assoc = aug.association(links);
        assert!(assoc.navigable_forward && assoc.navigable_backward);
        assert_eq!(assoc.backward_origin, Origin::Augmented);
        assert_eq!(assoc.source_end.as_deref(), Some("~linksTo"));
        assert_eq!(aug.augmented_count(), 1);
        let nodes = aug.association(aug.resolve_assoc_ref("Graph3.nodes").unwrap());
        assert_eq!(nodes.backward_origin, Origin::Original);
    }

    #[test]
    fn augmentation_is_idempotent_and_strippable() {
        let mm = Metamodel::from_json(GRAPH3).unwrap();
        let once = mm.augment_navigability();
        assert_eq!(once.augment_navigability(), once);
        assert_eq!(once.strip(), mm);
    }

    #[test]
    fn fully_navigable_metamodel_unchanged() {
        let doc = r#"{"name": "m", "classes": [{"name": "A"}],
            "associations": [{"name": "x", "src": "A", "trg": "A", "srcEnd": "from", "trgEnd": "to",
                              "navigable": ["fwd", "bwd"]}]}"#;
        let mm = Metamodel::from_json(doc).unwrap();
        let aug = mm.augment_navigability();
        assert_eq!(aug, mm);
        assert_eq!(aug.augmented_count(), 0);
    }

    #[test]
    fn extension_elements_are_temporary() {
        let mm = Metamodel::from_json(GRAPH3).unwrap().augment_navigability();
        let ext = r#"{"name": "mark", "classes": [{"name": "Mark"}],
            "associations": [{"name": "marks", "src": "Mark", "trg": "Node3", "trgEnd": "node",
                              "navigable": ["fwd", "bwd"]}]}"#;
        let extended = mm.extend(ext).unwrap();
        let mark = extended.class_id("Mark").unwrap();
        assert_eq!(extended.class(mark).origin, Origin::Temporary);
        let assoc = extended.resolve_assoc_ref("Mark.node").unwrap();
        assert_eq!(extended.association(assoc).origin, Origin::Temporary);
        assert_eq!(extended.strip(), mm.strip());
    }

    #[test]
    fn extension_collision_rejected() {
        let mm = Metamodel::from_json(GRAPH3).unwrap();
        let ext = r#"{"name": "bad", "classes": [{"name": "Node3"}]}"#;
        assert_eq!(
            mm.extend(ext).unwrap_err(),
            MetamodelError::Collision("Node3".into())
        );
    }

    #[test]
    fn merge_keeps_references_consistent() {
        let a = Metamodel::from_json(GRAPH3).unwrap();
        let b = Metamodel::from_json(
            r#"{"name": "r", "classes": [{"name": "Base"}, {"name": "Leaf", "super": ["Base"]}]}"#,
        )
        .unwrap();
        let merged = Metamodel::merge(&[a, b]).unwrap();
        assert_eq!(merged.name, "graph3+r");
        let leaf = merged.class_id("Leaf").unwrap();
        assert!(merged.is_subclass(leaf, merged.class_id("Base").unwrap()));
        let links = merged.association(merged.resolve_assoc_ref("Node3.linksTo").unwrap());
        assert_eq!(merged.class(links.target).name, "Node3");
    }
}
