//! External menus and builtin decision-tree menus.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::RuleError;

const DEFAULT_BUILTINS: &str = include_str!("builtins.txt");

/// Named option lists. Options keep file order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MenuSet {
    menus: BTreeMap<String, Vec<String>>,
}

/// Splits a sectioned file into `(kind, name, header line, body lines)`.
/// Lines starting with `#` and blank lines are dropped.
fn sections<'a>(text: &'a str, file: &str) -> Result<Vec<(&'a str, &'a str, usize, Vec<(usize, &'a str)>)>, RuleError> {
    let mut out: Vec<(&str, &str, usize, Vec<(usize, &str)>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        if let Some(h) = l.strip_prefix('[').and_then(|h| h.strip_suffix(']')) {
            let (kind, name) = h.trim().split_once(char::is_whitespace).ok_or_else(|| RuleError::Menu {
                file: file.to_string(),
                line,
                message: format!("header [{h}] has no name"),
            })?;
            out.push((kind, name.trim(), line, Vec::new()));
        } else {
            match out.last_mut() {
                Some(s) => s.3.push((line, l)),
                None => return Err(RuleError::Menu { file: file.to_string(), line, message: "option before any header".into() }),
            }
        }
    }
    Ok(out)
}

impl MenuSet {
    pub fn parse(text: &str) -> Result<Self, RuleError> {
        let file = "menus.txt";
        let mut menus = BTreeMap::new();
        for (kind, name, line, body) in sections(text, file)? {
            if kind != "MENU" {
                return Err(RuleError::Menu {
                    file: file.into(),
                    line,
                    message: format!("expected [MENU name], got [{kind} ...]"),
                });
            }
            if body.is_empty() {
                return Err(RuleError::Menu { file: file.into(), line, message: format!("menu {name} has no options") });
            }
            let opts = body.into_iter().map(|(_, o)| o.to_string()).collect();
            if menus.insert(name.to_string(), opts).is_some() {
                return Err(RuleError::Menu { file: file.into(), line, message: format!("menu {name} defined twice") });
            }
        }
        Ok(MenuSet { menus })
    }

    pub fn get(&self, name: &str) -> Option<&[String]> {
        self.menus.get(name).map(Vec::as_slice)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.menus.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.menus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.menus.is_empty()
    }

    /// Only the named menus.
    pub fn subset<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> MenuSet {
        let menus = names.into_iter().filter_map(|n| self.menus.get_key_value(n)).map(|(k, v)| (k.clone(), v.clone())).collect();
        MenuSet { menus }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Next {
    Child(String),
    Value(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeOption {
    pub label: String,
    pub next: Next,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub prompt: String,
    pub options: Vec<TreeOption>,
}

/// Dependent menus: each answer either yields the value or opens a child menu.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuiltinSet {
    roots: BTreeSet<String>,
    nodes: BTreeMap<String, TreeNode>,
}

impl Default for BuiltinSet {
    fn default() -> Self {
        BuiltinSet::parse(DEFAULT_BUILTINS).expect("shipped builtin menus are valid")
    }
}

impl BuiltinSet {
    /// `[BUILTIN name]` opens a root, `[NODE id]` a child menu. The first body
    /// line is `? prompt`; options are `label -> child`, `label = value` or a
    /// bare label that is its own value.
    pub fn parse(text: &str) -> Result<Self, RuleError> {
        let file = "builtins.txt";
        let err = |line, message: String| RuleError::Menu { file: file.into(), line, message };
        let mut roots = BTreeSet::new();
        let mut nodes = BTreeMap::new();
        let mut refs = Vec::new();
        for (kind, name, line, body) in sections(text, file)? {
            match kind {
                "BUILTIN" => {
                    roots.insert(name.to_string());
                }
                "NODE" => {}
                other => return Err(err(line, format!("expected [BUILTIN name] or [NODE id], got [{other} ...]"))),
            }
            let mut body = body.into_iter();
            let prompt = match body.next() {
                Some((_, p)) if p.starts_with('?') => p[1..].trim().to_string(),
                _ => return Err(err(line, format!("{name}: first line must be `? prompt`"))),
            };
            let mut options = Vec::new();
            for (l, o) in body {
                let opt = if let Some((label, child)) = o.split_once("->") {
                    refs.push((l, child.trim().to_string()));
                    TreeOption { label: label.trim().to_string(), next: Next::Child(child.trim().to_string()) }
                } else if let Some((label, value)) = o.split_once('=') {
                    TreeOption { label: label.trim().to_string(), next: Next::Value(value.trim().to_string()) }
                } else {
                    TreeOption { label: o.to_string(), next: Next::Value(o.to_string()) }
                };
                options.push(opt);
            }
            if options.is_empty() {
                return Err(err(line, format!("{name} has no options")));
            }
            if nodes.insert(name.to_string(), TreeNode { prompt, options }).is_some() {
                return Err(err(line, format!("{name} defined twice")));
            }
        }
        if let Some((l, c)) = refs.iter().find(|(_, c)| !nodes.contains_key(c)) {
            return Err(err(*l, format!("unknown child menu {c}")));
        }
        let set = BuiltinSet { roots, nodes };
        for r in &set.roots {
            set.check_acyclic(r, &mut Vec::new())?;
        }
        Ok(set)
    }

    fn check_acyclic<'a>(&'a self, id: &'a str, path: &mut Vec<&'a str>) -> Result<(), RuleError> {
        if path.contains(&id) {
            return Err(RuleError::Menu { file: "builtins.txt".into(), line: 0, message: format!("menu cycle through {id}") });
        }
        path.push(id);
        for o in &self.nodes[id].options {
            if let Next::Child(c) = &o.next {
                self.check_acyclic(c, path)?;
            }
        }
        path.pop();
        Ok(())
    }

    pub fn has(&self, name: &str) -> bool {
        self.roots.contains(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.roots.iter().map(String::as_str)
    }

    pub fn node(&self, id: &str) -> Option<&TreeNode> {
        self.nodes.get(id)
    }

    /// The named roots and everything reachable from them.
    pub fn subset<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> BuiltinSet {
        let mut out = BuiltinSet { roots: BTreeSet::new(), nodes: BTreeMap::new() };
        let mut stack = Vec::new();
        for n in names.into_iter().filter(|n| self.has(n)) {
            out.roots.insert(n.to_string());
            stack.push(n.to_string());
        }
        while let Some(id) = stack.pop() {
            if out.nodes.contains_key(&id) {
                continue;
            }
            let node = self.nodes[&id].clone();
            stack.extend(node.options.iter().filter_map(|o| match &o.next {
                Next::Child(c) => Some(c.clone()),
                Next::Value(_) => None,
            }));
            out.nodes.insert(id, node);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn menus_keep_order() {
        let m = MenuSet::parse("# c\n[MENU MATERIALS]\nСталь 20\n12Х18Н10Т\nЧугун\n\n[MENU X]\na\n").unwrap();
        assert_eq!(m.get("MATERIALS").unwrap(), ["Сталь 20", "12Х18Н10Т", "Чугун"]);
        assert_eq!(m.len(), 2);
        assert!(MenuSet::parse("a\n").is_err());
        assert!(MenuSet::parse("[MENU A]\n[MENU B]\nx").is_err());
        assert!(MenuSet::parse("[MENU A]\nx\n[MENU A]\ny").is_err());
    }

    #[test]
    fn shipped_builtins() {
        let b = BuiltinSet::default();
        let names: Vec<_> = b.names().collect();
        assert_eq!(names, ["range-DISK-250", "sleeve-THA-THK", "sleeve-TSP-TSM"]);
        let root = b.node("sleeve-TSP-TSM").unwrap();
        assert!(root.options.iter().all(|o| matches!(o.next, Next::Child(_))));
        let sub = b.subset(["sleeve-TSP-TSM"]);
        assert!(sub.has("sleeve-TSP-TSM") && !sub.has("range-DISK-250"));
        for o in &root.options {
            let Next::Child(c) = &o.next else { unreachable!() };
            assert!(sub.node(c).is_some());
        }
    }

    #[test]
    fn tree_errors() {
        assert!(BuiltinSet::parse("[BUILTIN a]\n? p\nx -> missing\n").is_err());
        assert!(BuiltinSet::parse("[BUILTIN a]\n? p\nx -> b\n[NODE b]\n? q\ny -> a\n").is_err());
        assert!(BuiltinSet::parse("[BUILTIN a]\nx\n").is_err());
        assert!(BuiltinSet::parse("[BUILTIN a]\n? p\n").is_err());
    }
}
