//! Validation projects: the class-diagram signature, informal requirement
//! fragments with their formal constraints, and per-class object bounds.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ProjectError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed project file: {0}")]
    Malformed(String),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("dangling link {0}")]
    DanglingLink(String),
    #[error("missing bound {0}")]
    MissingBound(String),
    #[error("bound for {0} must be at least 1")]
    ZeroBound(String),
    #[error("bound given for undeclared class {0}")]
    UnknownBoundClass(String),
    #[error("definition {0} carries constraints; definitions are glossary-only")]
    ConstrainedDefinition(String),
    #[error("invalid signature: {}", join_diagnostics(.0))]
    InvalidSignature(Vec<Diagnostic>),
    #[error("unknown id {0}")]
    UnknownId(String),
}

fn join_diagnostics(d: &[Diagnostic]) -> String {
    d.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RealKind {
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttrType {
    Boolean,
    Enumeration(Vec<String>),
    Integer {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lo: Option<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hi: Option<i64>,
    },
    Real,
    Reference {
        target: String,
        #[serde(default)]
        nullable: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: AttrType,
    /// Only meaningful for reals; absent means discrete.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<RealKind>,
}

impl Attribute {
    pub fn is_continuous(&self) -> bool {
        matches!(self.ty, AttrType::Real) && self.kind == Some(RealKind::Continuous)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDef {
    pub name: String,
    #[serde(default)]
    pub attributes: Vec<Attribute>,
}

impl ClassDef {
    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub classes: Vec<ClassDef>,
}

impl Signature {
    pub fn class(&self, name: &str) -> Option<&ClassDef> {
        self.classes.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Definition,
    Requirement,
    Scenario,
    Property,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Definition => "definition",
            Category::Requirement => "requirement",
            Category::Scenario => "scenario",
            Category::Property => "property",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requirement {
    pub id: String,
    pub text: String,
    pub category: Category,
    #[serde(default)]
    pub constraints: Vec<String>,
    #[serde(default)]
    pub links: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Project {
    pub signature: Signature,
    pub requirements: Vec<Requirement>,
    pub bounds: BTreeMap<String, u32>,
}

impl Project {
    pub fn requirement(&self, id: &str) -> Option<&Requirement> {
        self.requirements.iter().find(|r| r.id == id)
    }

    pub fn by_category(&self, category: Category) -> impl Iterator<Item = &Requirement> {
        self.requirements.iter().filter(move |r| r.category == category)
    }

    /// Checks every project invariant.
    pub fn validate(&self) -> Result<(), ProjectError> {
        let diags = validate_signature(&self.signature);
        if !diags.is_empty() {
            return Err(ProjectError::InvalidSignature(diags));
        }
        let mut ids = HashSet::new();
        for r in &self.requirements {
            if !ids.insert(r.id.as_str()) {
                return Err(ProjectError::DuplicateId(r.id.clone()));
            }
        }
        for r in &self.requirements {
            if let Some(l) = r.links.iter().find(|l| !ids.contains(l.as_str())) {
                return Err(ProjectError::DanglingLink(l.clone()));
            }
            if r.category == Category::Definition && !r.constraints.is_empty() {
                return Err(ProjectError::ConstrainedDefinition(r.id.clone()));
            }
        }
        for (class, n) in &self.bounds {
            if self.signature.class(class).is_none() {
                return Err(ProjectError::UnknownBoundClass(class.clone()));
            }
            if *n == 0 {
                return Err(ProjectError::ZeroBound(class.clone()));
            }
        }
        if let Some(c) = self.signature.classes.iter().find(|c| !self.bounds.contains_key(&c.name)) {
            return Err(ProjectError::MissingBound(c.name.clone()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("project serializes")
    }

    pub fn from_json(src: &str) -> Result<Project, ProjectError> {
        let project: Project =
            serde_json::from_str(src).map_err(|e| ProjectError::Malformed(e.to_string()))?;
        project.validate()?;
        Ok(project)
    }
}

pub fn load_project(path: impl AsRef<Path>) -> Result<Project, ProjectError> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path)
        .map_err(|source| ProjectError::Io { path: path.display().to_string(), source })?;
    Project::from_json(&src)
}

pub fn write_project(path: impl AsRef<Path>, project: &Project) -> Result<(), ProjectError> {
    let path = path.as_ref();
    std::fs::write(path, project.to_json())
        .map_err(|source| ProjectError::Io { path: path.display().to_string(), source })
}

/// One diagnostic per violated signature invariant.
pub fn validate_signature(sig: &Signature) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let declared: BTreeSet<&str> = sig.classes.iter().map(|c| c.name.as_str()).collect();
    let mut seen_classes = HashSet::new();
    for class in &sig.classes {
        if !seen_classes.insert(class.name.as_str()) {
            out.push(Diagnostic {
                location: class.name.clone(),
                message: format!("duplicate class {}", class.name),
            });
        }
        let mut seen_attrs = HashSet::new();
        for attr in &class.attributes {
            let loc = format!("{}.{}", class.name, attr.name);
            if !seen_attrs.insert(attr.name.as_str()) {
                out.push(Diagnostic { location: loc.clone(), message: "duplicate attribute".into() });
            }
            if attr.kind == Some(RealKind::Continuous) && attr.ty != AttrType::Real {
                out.push(Diagnostic {
                    location: loc.clone(),
                    message: "continuous kind is only allowed on real attributes".into(),
                });
            }
            match &attr.ty {
                AttrType::Enumeration(symbols) => {
                    if symbols.is_empty() {
                        out.push(Diagnostic { location: loc.clone(), message: "empty enumeration".into() });
                    }
                    let distinct: HashSet<&String> = symbols.iter().collect();
                    if distinct.len() != symbols.len() {
                        out.push(Diagnostic {
                            location: loc.clone(),
                            message: "duplicate enumeration symbol".into(),
                        });
                    }
                }
                AttrType::Integer { lo, hi } => match (lo, hi) {
                    (Some(lo), Some(hi)) if lo <= hi => {}
                    (Some(_), Some(_)) => out.push(Diagnostic {
                        location: loc.clone(),
                        message: "empty integer range".into(),
                    }),
                    _ => out.push(Diagnostic {
                        location: loc.clone(),
                        message: "integer attributes need an inclusive range lo..hi".into(),
                    }),
                },
                AttrType::Reference { target, .. } => {
                    if !declared.contains(target.as_str()) {
                        out.push(Diagnostic {
                            location: loc.clone(),
                            message: format!("reference to undeclared class {target}"),
                        });
                    }
                }
                AttrType::Boolean | AttrType::Real => {}
            }
        }
    }
    out
}

/// Requirements with the given ids, in declaration order.
pub fn requirements_for<'p>(
    project: &'p Project,
    ids: &BTreeSet<String>,
) -> Result<Vec<&'p Requirement>, ProjectError> {
    if let Some(unknown) = ids.iter().find(|id| project.requirement(id).is_none()) {
        return Err(ProjectError::UnknownId(unknown.clone()));
    }
    Ok(project.requirements.iter().filter(|r| ids.contains(&r.id)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> &'static str {
        r#"{
          "signature": {"classes": [{"name": "Train", "attributes": [
              {"name": "speed", "type": "real", "kind": "continuous"}]}]},
          "requirements": [{"id": "R1", "text": "speed is never negative",
              "category": "requirement", "constraints": ["always (forall t in Train . t.speed >= 0)"]}],
          "bounds": {"Train": 1}
        }"#
    }

    #[test]
    fn loads_minimal_project() {
        let p = Project::from_json(minimal()).unwrap();
        assert_eq!(p.signature.classes.len(), 1);
        assert_eq!(p.requirements.len(), 1);
        assert!(p.signature.classes[0].attributes[0].is_continuous());
    }

    #[test]
    fn rejects_duplicate_and_dangling_ids() {
        let mut p = Project::from_json(minimal()).unwrap();
        let mut dup = p.requirements[0].clone();
        p.requirements.push(dup.clone());
        assert_eq!(p.validate().unwrap_err().to_string(), "duplicate id R1");
        dup.id = "R2".into();
        dup.links = vec!["R9".into()];
        p.requirements[1] = dup;
        assert_eq!(p.validate().unwrap_err().to_string(), "dangling link R9");
    }

    #[test]
    fn rejects_missing_bound_and_unbounded_integer() {
        let mut p = Project::from_json(minimal()).unwrap();
        p.bounds.clear();
        assert_eq!(p.validate().unwrap_err().to_string(), "missing bound Train");
        let mut p = Project::from_json(minimal()).unwrap();
        p.signature.classes[0].attributes.push(Attribute {
            name: "n".into(),
            ty: AttrType::Integer { lo: None, hi: None },
            kind: None,
        });
        assert!(matches!(p.validate(), Err(ProjectError::InvalidSignature(d)) if d.len() == 1));
    }

    #[test]
    fn malformed_file_is_an_error() {
        assert!(matches!(Project::from_json("{"), Err(ProjectError::Malformed(_))));
    }

    #[test]
    fn signature_diagnostics() {
        let bad_kind = Signature {
            classes: vec![ClassDef {
                name: "Train".into(),
                attributes: vec![Attribute {
                    name: "doorsOpen".into(),
                    ty: AttrType::Boolean,
                    kind: Some(RealKind::Continuous),
                }],
            }],
        };
        assert_eq!(validate_signature(&bad_kind).len(), 1);

        let dangling = Signature {
            classes: vec![ClassDef {
                name: "Train".into(),
                attributes: vec![Attribute {
                    name: "at".into(),
                    ty: AttrType::Reference { target: "Station".into(), nullable: true },
                    kind: None,
                }],
            }],
        };
        assert_eq!(validate_signature(&dangling).len(), 1);

        let good = Signature {
            classes: vec![
                ClassDef {
                    name: "Train".into(),
                    attributes: vec![
                        Attribute { name: "speed".into(), ty: AttrType::Real, kind: Some(RealKind::Continuous) },
                        Attribute {
                            name: "at".into(),
                            ty: AttrType::Reference { target: "Station".into(), nullable: true },
                            kind: None,
                        },
                    ],
                },
                ClassDef { name: "Station".into(), attributes: vec![] },
            ],
        };
        assert!(validate_signature(&good).is_empty());
    }

    #[test]
    fn independent_violations_are_all_reported() {
        let sig = Signature {
            classes: vec![ClassDef {
                name: "A".into(),
                attributes: vec![
                    Attribute { name: "b".into(), ty: AttrType::Boolean, kind: Some(RealKind::Continuous) },
                    Attribute { name: "e".into(), ty: AttrType::Enumeration(vec![]), kind: None },
                    Attribute {
                        name: "r".into(),
                        ty: AttrType::Reference { target: "Nope".into(), nullable: false },
                        kind: None,
                    },
                ],
            }],
        };
        assert!(validate_signature(&sig).len() >= 3);
    }

    #[test]
    fn requirements_in_declaration_order() {
        let mut p = Project::from_json(minimal()).unwrap();
        let mut r2 = p.requirements[0].clone();
        r2.id = "R2".into();
        p.requirements.push(r2);
        let ids: BTreeSet<String> = ["R2".to_string(), "R1".to_string()].into();
        let got: Vec<_> = requirements_for(&p, &ids).unwrap().iter().map(|r| r.id.clone()).collect();
        assert_eq!(got, vec!["R1", "R2"]);
        assert!(requirements_for(&p, &BTreeSet::new()).unwrap().is_empty());
        let unknown: BTreeSet<String> = ["R7".to_string()].into();
        assert!(requirements_for(&p, &unknown).is_err());
    }
}
