use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::io::{body_from_json, body_to_json};
use super::{DrawingError, Element, ElementBody, ElementKind};

const PROTO_SCHEMA: &str = "specforge-proto/1";

/// The parametric part of an element, without id and position.
#[derive(Debug, Clone, PartialEq)]
pub struct Prototype {
    pub layer: String,
    pub body: ElementBody,
}

impl Prototype {
    pub fn from_element(e: &Element) -> Self {
        Prototype { layer: e.layer.clone(), body: e.body.clone() }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPrototype {
    schema: String,
    layer: String,
    kind: ElementKind,
    payload: Value,
}

pub trait PrototypeStore {
    fn put(&mut self, name: &str, proto: Prototype) -> Result<(), DrawingError>;
    fn get(&self, name: &str) -> Result<Prototype, DrawingError>;
    fn names(&self) -> Result<Vec<String>, DrawingError>;
}

#[derive(Debug, Default, Clone)]
pub struct MemoryLibrary {
    items: BTreeMap<String, Prototype>,
}

impl PrototypeStore for MemoryLibrary {
    fn put(&mut self, name: &str, proto: Prototype) -> Result<(), DrawingError> {
        check_name(name)?;
        self.items.insert(name.to_string(), proto);
        Ok(())
    }

    fn get(&self, name: &str) -> Result<Prototype, DrawingError> {
        self.items.get(name).cloned().ok_or_else(|| DrawingError::UnknownPrototype(name.to_string()))
    }

    fn names(&self) -> Result<Vec<String>, DrawingError> {
        Ok(self.items.keys().cloned().collect())
    }
}

/// A directory holding one `<name>.json` file per prototype.
#[derive(Debug, Clone)]
pub struct DirLibrary {
    dir: PathBuf,
}

impl DirLibrary {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        DirLibrary { dir: dir.into() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(format!("{name}.json"))
    }
}

fn check_name(name: &str) -> Result<(), DrawingError> {
    let bad = name.is_empty() || name.starts_with('.') || name.contains(['/', '\\', '\0']);
    if bad {
        Err(DrawingError::BadPrototypeName(name.to_string()))
    } else {
        Ok(())
    }
}

impl PrototypeStore for DirLibrary {
    fn put(&mut self, name: &str, proto: Prototype) -> Result<(), DrawingError> {
        check_name(name)?;
        let io_err = |source| DrawingError::Io { path: self.dir.display().to_string(), source };
        fs::create_dir_all(&self.dir).map_err(io_err)?;
        let raw = RawPrototype {
            schema: PROTO_SCHEMA.into(),
            layer: proto.layer,
            kind: proto.body.kind(),
            payload: body_to_json(&proto.body),
        };
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(&raw).expect("prototypes serialize");
        text.push('\n');
        fs::write(&path, text).map_err(|source| DrawingError::Io { path: path.display().to_string(), source })
    }

    fn get(&self, name: &str) -> Result<Prototype, DrawingError> {
        check_name(name)?;
        let path = self.path(name);
        let shown = path.display().to_string();
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(DrawingError::UnknownPrototype(name.to_string())),
            Err(source) => return Err(DrawingError::Io { path: shown, source }),
        };
        let parse = |message: String| DrawingError::Parse { path: shown.clone(), message };
        let raw: RawPrototype = serde_json::from_str(&text).map_err(|e| parse(e.to_string()))?;
        if raw.schema != PROTO_SCHEMA {
            return Err(DrawingError::Schema { path: shown, found: raw.schema, expected: PROTO_SCHEMA });
        }
        let body = body_from_json(raw.kind, raw.payload).map_err(|e| parse(e.to_string()))?;
        Ok(Prototype { layer: raw.layer, body })
    }

    fn names(&self) -> Result<Vec<String>, DrawingError> {
        let rd = match fs::read_dir(&self.dir) {
            Ok(rd) => rd,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(source) => return Err(DrawingError::Io { path: self.dir.display().to_string(), source }),
        };
        let mut names: Vec<String> = rd
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().to_str().and_then(|n| n.strip_suffix(".json")).map(str::to_string))
            .collect();
        names.sort();
        Ok(names)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drawing::StubData;

    #[test]
    fn dir_library_round_trip() {
        let tmp = tempfile::tempdir().unwrap();
        let mut lib = DirLibrary::new(tmp.path().join("lib"));
        let p =
            Prototype { layer: "ВК".into(), body: ElementBody::VkProfileStub(StubData { designations: vec!["К1-1".into()] }) };
        lib.put("колодец", p.clone()).unwrap();
        assert_eq!(lib.get("колодец").unwrap(), p);
        assert_eq!(lib.names().unwrap(), ["колодец"]);
        assert!(matches!(lib.get("x"), Err(DrawingError::UnknownPrototype(_))));
        assert!(matches!(lib.put("../x", p), Err(DrawingError::BadPrototypeName(_))));
    }
}
