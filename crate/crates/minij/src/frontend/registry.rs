use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub qualified: String,
    pub stdlib: bool,
}

impl RegistryEntry {
    pub fn package(&self) -> &str {
        self.qualified.rsplit_once('.').map_or("", |(p, _)| p)
    }
}

/// Simple type name to candidate packages. For each simple name the standard
/// library entries come first, in insertion order, then third-party ones.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TypeRegistry {
    entries: BTreeMap<String, Vec<RegistryEntry>>,
}

/// Types visible without an import.
const IMPLICIT: &[&str] = &[
    "String",
    "Integer",
    "Long",
    "Double",
    "Float",
    "Boolean",
    "Character",
    "Math",
    "System",
    "StringBuilder",
    "Object",
];

impl TypeRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The registry used by every stage unless configured otherwise.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        for name in IMPLICIT {
            r.insert(name, &format!("java.lang.{name}"), true);
        }
        r.insert("List", "java.util.List", true);
        r.insert("List", "com.sun.tools.javac.util.List", false);
        r.insert("ArrayList", "java.util.ArrayList", true);
        r.insert("Optional", "java.util.Optional", true);
        r.insert("Optional", "com.google.common.base.Optional", false);
        r.insert("Arrays", "java.util.Arrays", true);
        r.insert("Scanner", "java.util.Scanner", true);
        r.insert("Ints", "com.google.common.primitives.Ints", false);
        r.insert("StringUtils", "org.apache.commons.lang3.StringUtils", false);
        r
    }

    /// Adds an entry, keeping stdlib entries ahead of third-party ones.
    pub fn insert(&mut self, simple: &str, qualified: &str, stdlib: bool) {
        let list = self.entries.entry(simple.to_string()).or_default();
        if list.iter().any(|e| e.qualified == qualified) {
            return;
        }
        let entry = RegistryEntry {
            qualified: qualified.to_string(),
            stdlib,
        };
        if stdlib {
            let at = list.iter().position(|e| !e.stdlib).unwrap_or(list.len());
            list.insert(at, entry);
        } else {
            list.push(entry);
        }
    }

    pub fn lookup(&self, simple: &str) -> &[RegistryEntry] {
        self.entries.get(simple).map_or(&[], Vec::as_slice)
    }

    pub fn contains_simple(&self, simple: &str) -> bool {
        self.entries.contains_key(simple)
    }

    /// Finds the entry for a fully qualified name, returning its simple name.
    pub fn resolve_qualified(&self, qualified: &str) -> Option<(&str, &RegistryEntry)> {
        let simple = qualified.rsplit('.').next()?;
        let (key, list) = self.entries.get_key_value(simple)?;
        list.iter().find(|e| e.qualified == qualified).map(|e| (key.as_str(), e))
    }

    /// Simple names exported by a package, for wildcard imports.
    pub fn package_members(&self, package: &str) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(_, list)| list.iter().any(|e| e.package() == package))
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn is_implicit(&self, simple: &str) -> bool {
        IMPLICIT.contains(&simple) && self.contains_simple(simple)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[RegistryEntry])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}
