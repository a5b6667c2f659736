//! Domain types shared by every stage: the class-facts universe, metric
//! vectors and the four tentative architecture layers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fully-qualified class identifier, e.g. `net.sf.jabref.BibEntry`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ClassId(String);

impl ClassId {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        let valid = !name.is_empty()
            && !name.chars().any(char::is_whitespace)
            && name.split('.').all(|segment| !segment.is_empty());
        if valid {
            Ok(ClassId(name))
        } else {
            Err(Error::InvalidClassId(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ClassId {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        ClassId::new(value)
    }
}

impl From<ClassId> for String {
    fn from(id: ClassId) -> String {
        id.0
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::borrow::Borrow<str> for ClassId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Public,
    Protected,
    Package,
    Private,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    #[default]
    Class,
    Interface,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldFacts {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub visibility: Visibility,
}

/// A call site: receiver type plus the invoked method signature, e.g. `("a.C", "m(int)")`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodRef {
    pub owner: String,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldRef {
    pub owner: String,
    pub field: String,
}

/// Method name under which constructors are recorded.
pub const CONSTRUCTOR: &str = "<init>";
/// Method name under which static initializers are recorded.
pub const STATIC_INITIALIZER: &str = "<clinit>";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodFacts {
    pub name: String,
    #[serde(default)]
    pub params: Vec<String>,
    #[serde(default = "void")]
    pub returns: String,
    pub visibility: Visibility,
    #[serde(default)]
    pub invokes: BTreeSet<MethodRef>,
    #[serde(default)]
    pub accesses: BTreeSet<FieldRef>,
    #[serde(default)]
    pub references: BTreeSet<String>,
}

fn void() -> String {
    "void".to_string()
}

impl MethodFacts {
    pub fn new(name: impl Into<String>, visibility: Visibility) -> Self {
        MethodFacts {
            name: name.into(),
            params: Vec::new(),
            returns: void(),
            visibility,
            invokes: BTreeSet::new(),
            accesses: BTreeSet::new(),
            references: BTreeSet::new(),
        }
    }

    /// `name(T1,T2)`; unique within the declaring class.
    pub fn signature(&self) -> String {
        format!("{}({})", self.name, self.params.join(","))
    }

    pub fn is_constructor(&self) -> bool {
        self.name == CONSTRUCTOR
    }

    pub fn is_static_initializer(&self) -> bool {
        self.name == STATIC_INITIALIZER
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassFacts {
    pub id: ClassId,
    #[serde(default)]
    pub kind: ClassKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub superclass: Option<String>,
    #[serde(default)]
    pub interfaces: BTreeSet<String>,
    #[serde(default)]
    pub fields: Vec<FieldFacts>,
    #[serde(default)]
    pub methods: Vec<MethodFacts>,
}

const PRIMITIVES: [&str; 9] = [
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
];

/// Strips array and generic decorations; `None` for primitives and `void`.
pub fn normalize_type(raw: &str) -> Option<&str> {
    let mut name = raw.trim();
    if let Some(pos) = name.find('<') {
        name = &name[..pos];
    }
    while let Some(stripped) = name.strip_suffix("[]") {
        name = stripped.trim_end();
    }
    if name.is_empty() || PRIMITIVES.contains(&name) {
        None
    } else {
        Some(name)
    }
}

impl ClassFacts {
    pub fn new(id: ClassId) -> Self {
        ClassFacts {
            id,
            kind: ClassKind::Class,
            superclass: None,
            interfaces: BTreeSet::new(),
            fields: Vec::new(),
            methods: Vec::new(),
        }
    }

    /// Every non-primitive type this class couples to, excluding itself:
    /// superclass, interfaces, field types, parameter and return types,
    /// invoked receivers, accessed-field owners and explicit references.
    pub fn type_references(&self) -> BTreeSet<String> {
        let mut raw: Vec<&str> = Vec::new();
        raw.extend(self.superclass.as_deref());
        raw.extend(self.interfaces.iter().map(String::as_str));
        raw.extend(self.fields.iter().map(|f| f.ty.as_str()));
        for m in &self.methods {
            raw.extend(m.params.iter().map(String::as_str));
            raw.push(&m.returns);
            raw.extend(m.invokes.iter().map(|r| r.owner.as_str()));
            raw.extend(m.accesses.iter().map(|r| r.owner.as_str()));
            raw.extend(m.references.iter().map(String::as_str));
        }
        raw.into_iter()
            .filter_map(normalize_type)
            .filter(|name| *name != self.id.as_str())
            .map(str::to_string)
            .collect()
    }
}

/// The analyzed class set. Types not present here are external.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassModel {
    classes: BTreeMap<ClassId, ClassFacts>,
}

impl ClassModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_classes(classes: impl IntoIterator<Item = ClassFacts>) -> Result<Self> {
        let mut model = ClassModel::new();
        for class in classes {
            model.insert(class)?;
        }
        Ok(model)
    }

    pub fn insert(&mut self, class: ClassFacts) -> Result<()> {
        if self.classes.contains_key(&class.id) {
            return Err(Error::DuplicateClass(class.id.to_string()));
        }
        self.classes.insert(class.id.clone(), class);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&ClassFacts> {
        self.classes.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.classes.contains_key(name)
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassFacts> {
        self.classes.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &ClassId> {
        self.classes.keys()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationKind {
    SelfSuperclass,
    InheritanceCycle(Vec<ClassId>),
    DuplicateField(String),
    DuplicateMethod(String),
}

/// One broken invariant, attributed to the offending class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub class: ClassId,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::SelfSuperclass => write!(f, "self-superclass {}", self.class),
            ViolationKind::InheritanceCycle(members) => {
                let names: Vec<&str> = members.iter().map(ClassId::as_str).collect();
                write!(f, "inheritance cycle {{{}}}", names.join(","))
            }
            ViolationKind::DuplicateField(name) => {
                write!(f, "duplicate field {} in {}", name, self.class)
            }
            ViolationKind::DuplicateMethod(sig) => {
                write!(f, "duplicate method {} in {}", sig, self.class)
            }
        }
    }
}

/// Checks every class-model invariant; an empty report means the model is
/// accepted by all downstream stages.
pub fn validate_model(model: &ClassModel) -> Vec<Violation> {
    let mut report = Vec::new();

    for class in model.classes() {
        let mut seen = BTreeSet::new();
        for field in &class.fields {
            if !seen.insert(field.name.as_str()) {
                report.push(Violation {
                    class: class.id.clone(),
                    kind: ViolationKind::DuplicateField(field.name.clone()),
                });
            }
        }
        let mut sigs = BTreeSet::new();
        for method in &class.methods {
            let sig = method.signature();
            if !sigs.insert(sig.clone()) {
                report.push(Violation {
                    class: class.id.clone(),
                    kind: ViolationKind::DuplicateMethod(sig),
                });
            }
        }
        if class.superclass.as_deref() == Some(class.id.as_str()) {
            report.push(Violation {
                class: class.id.clone(),
                kind: ViolationKind::SelfSuperclass,
            });
        }
    }

    // The in-model superclass relation is a functional graph, so each
    // cycle is found once by walking chains with a three-colour marking.
    let mut state: BTreeMap<&str, u8> = BTreeMap::new();
    for start in model.ids() {
        if state.contains_key(start.as_str()) {
            continue;
        }
        let mut path: Vec<&str> = Vec::new();
        let mut cur = Some(start.as_str());
        while let Some(name) = cur {
            match state.get(name) {
                Some(1) => {
                    let pos = path.iter().position(|n| *n == name).unwrap_or(0);
                    let mut members: Vec<ClassId> = path[pos..]
                        .iter()
                        .filter_map(|n| model.get(n).map(|c| c.id.clone()))
                        .collect();
                    if members.len() > 1 {
                        members.sort();
                        report.push(Violation {
                            class: members[0].clone(),
                            kind: ViolationKind::InheritanceCycle(members),
                        });
                    }
                    break;
                }
                Some(_) => break,
                None => {}
            }
            state.insert(name, 1);
            path.push(name);
            cur = model
                .get(name)
                .and_then(|c| c.superclass.as_deref())
                .and_then(|s| model.get(s))
                .map(|c| c.id.as_str());
        }
        for name in path {
            state.insert(name, 2);
        }
    }

    report.sort();
    report
}

/// The eight design metrics, in their canonical listing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Metric {
    Wmc,
    Dit,
    Noc,
    Cbo,
    Rfc,
    Lcom,
    Ca,
    Npm,
}

impl Metric {
    pub const ALL: [Metric; 8] = [
        Metric::Wmc,
        Metric::Dit,
        Metric::Noc,
        Metric::Cbo,
        Metric::Rfc,
        Metric::Lcom,
        Metric::Ca,
        Metric::Npm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Wmc => "WMC",
            Metric::Dit => "DIT",
            Metric::Noc => "NOC",
            Metric::Cbo => "CBO",
            Metric::Rfc => "RFC",
            Metric::Lcom => "LCOM",
            Metric::Ca => "Ca",
            Metric::Npm => "NPM",
        }
    }

    pub fn from_name(name: &str) -> Option<Metric> {
        Metric::ALL.into_iter().find(|m| m.name() == name)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MetricVector {
    pub wmc: u64,
    pub dit: u64,
    pub noc: u64,
    pub cbo: u64,
    pub rfc: u64,
    pub lcom: u64,
    pub ca: u64,
    pub npm: u64,
}

impl MetricVector {
    pub fn get(&self, metric: Metric) -> u64 {
        match metric {
            Metric::Wmc => self.wmc,
            Metric::Dit => self.dit,
            Metric::Noc => self.noc,
            Metric::Cbo => self.cbo,
            Metric::Rfc => self.rfc,
            Metric::Lcom => self.lcom,
            Metric::Ca => self.ca,
            Metric::Npm => self.npm,
        }
    }

    pub fn set(&mut self, metric: Metric, value: u64) {
        let slot = match metric {
            Metric::Wmc => &mut self.wmc,
            Metric::Dit => &mut self.dit,
            Metric::Noc => &mut self.noc,
            Metric::Cbo => &mut self.cbo,
            Metric::Rfc => &mut self.rfc,
            Metric::Lcom => &mut self.lcom,
            Metric::Ca => &mut self.ca,
            Metric::Npm => &mut self.npm,
        };
        *slot = value;
    }

    pub fn from_array(values: [u64; 8]) -> Self {
        let mut v = MetricVector::default();
        for (metric, value) in Metric::ALL.into_iter().zip(values) {
            v.set(metric, value);
        }
        v
    }

    pub fn to_array(&self) -> [u64; 8] {
        Metric::ALL.map(|m| self.get(m))
    }

    /// `dit >= 1` and `npm <= wmc`.
    pub fn is_consistent(&self) -> bool {
        self.dit >= 1 && self.npm <= self.wmc
    }
}

pub type MetricsTable = BTreeMap<ClassId, MetricVector>;

/// The four tentative architecture layers, bottom (1) to top (4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum TentativeLayer {
    Infrastructure = 1,
    BusinessLogic = 2,
    Controllers = 3,
    UserInterface = 4,
}

impl TentativeLayer {
    pub const ALL: [TentativeLayer; 4] = [
        TentativeLayer::Infrastructure,
        TentativeLayer::BusinessLogic,
        TentativeLayer::Controllers,
        TentativeLayer::UserInterface,
    ];

    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_index(index: u8) -> Option<Self> {
        match index {
            1 => Some(TentativeLayer::Infrastructure),
            2 => Some(TentativeLayer::BusinessLogic),
            3 => Some(TentativeLayer::Controllers),
            4 => Some(TentativeLayer::UserInterface),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TentativeLayer::Infrastructure => "Infrastructure",
            TentativeLayer::BusinessLogic => "BusinessLogic",
            TentativeLayer::Controllers => "Controllers",
            TentativeLayer::UserInterface => "UserInterface",
        }
    }

    /// Zero-based position, handy for fixed-size per-layer arrays.
    pub(crate) fn slot(self) -> usize {
        self.index() as usize - 1
    }
}

impl TryFrom<u8> for TentativeLayer {
    type Error = String;

    fn try_from(value: u8) -> std::result::Result<Self, String> {
        TentativeLayer::from_index(value).ok_or_else(|| format!("layer index {value} not in 1..=4"))
    }
}

impl From<TentativeLayer> for u8 {
    fn from(layer: TentativeLayer) -> u8 {
        layer.index()
    }
}

impl fmt::Display for TentativeLayer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}
