//! Configurations of disjoint smooth ovals on the sphere.
//!
//! A configuration is stored as its nesting forest: children of an oval are
//! the ovals immediately inside it. The derived region tree (one vertex per
//! complementary region, one edge per oval) always has `n + 1` vertices for
//! `n` ovals. Topological equivalence on the sphere forgets which region is
//! "outer", so equivalence is isomorphism of unrooted region trees.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OvalError {
    #[error("unknown oval label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate oval label `{0}`")]
    DuplicateLabel(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn flipped(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Node {
    label: String,
    parent: Option<usize>,
    children: Vec<usize>,
}

/// A nesting forest of labeled ovals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OvalConfig {
    nodes: Vec<Node>,
    roots: Vec<usize>,
}

impl OvalConfig {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a configuration from `(label, parent label)` pairs. Parents must
    /// be listed before their children.
    pub fn from_parents<S: AsRef<str>>(items: &[(S, Option<S>)]) -> Result<Self, OvalError> {
        let mut cfg = OvalConfig::empty();
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        for (label, parent) in items {
            let label = label.as_ref().to_owned();
            if index.contains_key(&label) {
                return Err(OvalError::DuplicateLabel(label));
            }
            let parent_idx = match parent {
                None => None,
                Some(p) => Some(
                    *index
                        .get(p.as_ref())
                        .ok_or_else(|| OvalError::UnknownLabel(p.as_ref().to_owned()))?,
                ),
            };
            let idx = cfg.nodes.len();
            cfg.nodes.push(Node {
                label: label.clone(),
                parent: parent_idx,
                children: Vec::new(),
            });
            match parent_idx {
                Some(p) => cfg.nodes[p].children.push(idx),
                None => cfg.roots.push(idx),
            }
            index.insert(label, idx);
        }
        Ok(cfg)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.label.as_str())
    }

    fn index_of(&self, label: &str) -> Result<usize, OvalError> {
        self.nodes
            .iter()
            .position(|n| n.label == label)
            .ok_or_else(|| OvalError::UnknownLabel(label.to_owned()))
    }

    /// Number of ovals strictly containing `label`.
    pub fn depth(&self, label: &str) -> Result<usize, OvalError> {
        let mut idx = self.index_of(label)?;
        let mut d = 0;
        while let Some(p) = self.nodes[idx].parent {
            d += 1;
            idx = p;
        }
        Ok(d)
    }

    /// The sub-configuration on `keep`: all other ovals are deleted and their
    /// children reattached to the nearest surviving ancestor.
    pub fn restrict(&self, keep: &BTreeSet<String>) -> Result<OvalConfig, OvalError> {
        for l in keep {
            self.index_of(l)?;
        }
        let mut items: Vec<(String, Option<String>)> = Vec::new();
        // Nodes are in parents-before-children order by construction.
        for (i, n) in self.nodes.iter().enumerate() {
            if !keep.contains(&n.label) {
                continue;
            }
            let mut anc = self.nodes[i].parent;
            while let Some(a) = anc {
                if keep.contains(&self.nodes[a].label) {
                    break;
                }
                anc = self.nodes[a].parent;
            }
            items.push((n.label.clone(), anc.map(|a| self.nodes[a].label.clone())));
        }
        OvalConfig::from_parents(&items)
    }

    /// Parses the nested-parentheses text format, e.g. `A(B C(D)) E`.
    /// Whitespace is insignificant; labels are runs of characters other than
    /// parentheses and whitespace.
    pub fn parse(text: &str) -> Result<Self, OvalError> {
        let bytes = text.as_bytes();
        let mut pos = 0usize;
        let mut items: Vec<(String, Option<String>)> = Vec::new();
        // Stack of enclosing labels.
        let mut stack: Vec<String> = Vec::new();
        let mut last_label: Option<String> = None;
        let mut seen: BTreeSet<String> = BTreeSet::new();
        while pos < bytes.len() {
            let c = bytes[pos] as char;
            if c.is_whitespace() {
                pos += 1;
            } else if c == '(' {
                match last_label.take() {
                    Some(l) => stack.push(l),
                    None => {
                        return Err(OvalError::Parse {
                            pos,
                            msg: "`(` must follow a label".into(),
                        })
                    }
                }
                pos += 1;
            } else if c == ')' {
                if stack.pop().is_none() {
                    return Err(OvalError::Parse {
                        pos,
                        msg: "unmatched `)`".into(),
                    });
                }
                last_label = None;
                pos += 1;
            } else {
                let start = pos;
                while pos < bytes.len() {
                    let c = bytes[pos] as char;
                    if c.is_whitespace() || c == '(' || c == ')' {
                        break;
                    }
                    pos += 1;
                }
                let label = text[start..pos].to_owned();
                if !seen.insert(label.clone()) {
                    return Err(OvalError::DuplicateLabel(label));
                }
                items.push((label.clone(), stack.last().cloned()));
                last_label = Some(label);
            }
        }
        if !stack.is_empty() {
            return Err(OvalError::Parse {
                pos,
                msg: "unmatched `(`".into(),
            });
        }
        OvalConfig::from_parents(&items)
    }

    /// Canonical encoding of the unrooted region tree; equal strings iff the
    /// configurations are topologically equivalent on the sphere.
    pub fn canonical_key(&self) -> String {
        // Region tree: vertex 0 = outer region, vertex i+1 = region just
        // inside oval i. The oval's edge joins it to its parent's region.
        let n = self.nodes.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for (i, node) in self.nodes.iter().enumerate() {
            let up = node.parent.map_or(0, |p| p + 1);
            adj[i + 1].push(up);
            adj[up].push(i + 1);
        }
        let centroids = tree_centroids(&adj);
        centroids
            .into_iter()
            .map(|c| ahu_encode(&adj, c, usize::MAX))
            .min()
            .unwrap()
    }
}

fn tree_centroids(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n == 1 {
        return vec![0];
    }
    // Iteratively strip leaves; the last one or two vertices are centroids.
    let mut deg: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    let mut removed = vec![false; n];
    let mut remaining = n;
    while remaining > 2 {
        let mut next = Vec::new();
        for &v in &layer {
            removed[v] = true;
            remaining -= 1;
            for &w in &adj[v] {
                if !removed[w] {
                    deg[w] -= 1;
                    if deg[w] == 1 {
                        next.push(w);
                    }
                }
            }
        }
        layer = next;
    }
    (0..n).filter(|&v| !removed[v]).collect()
}

fn ahu_encode(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut subs: Vec<String> = adj[v]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| ahu_encode(adj, w, v))
        .collect();
    subs.sort();
    format!("({})", subs.concat())
}

impl fmt::Display for OvalConfig {
    /// Serializes back to the nested-parentheses format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_node(cfg: &OvalConfig, idx: usize, out: &mut String) {
            out.push_str(&cfg.nodes[idx].label);
            if !cfg.nodes[idx].children.is_empty() {
                out.push('(');
                for (k, &c) in cfg.nodes[idx].children.iter().enumerate() {
                    if k > 0 {
                        out.push(' ');
                    }
                    write_node(cfg, c, out);
                }
                out.push(')');
            }
        }
        let mut out = String::new();
        for (k, &r) in self.roots.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            write_node(self, r, &mut out);
        }
        f.write_str(&out)
    }
}

/// Proper two-coloring of the complementary regions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoColoring {
    pub outer: Color,
    /// Color of the region just inside each oval, keyed by label.
    pub inner: BTreeMap<String, Color>,
}

impl TwoColoring {
    /// Color of the region immediately inside the given oval.
    pub fn inside(&self, label: &str) -> Option<Color> {
        self.inner.get(label).copied()
    }
}

/// The canonical two-coloring: regions at even nesting depth get
/// `outer_color`, odd depths the flipped color.
pub fn canonical_two_coloring(config: &OvalConfig, outer_color: Color) -> TwoColoring {
    let mut inner = BTreeMap::new();
    for (i, node) in config.nodes.iter().enumerate() {
        let mut depth = 1usize;
        let mut p = node.parent;
        while let Some(q) = p {
            depth += 1;
            p = config.nodes[q].parent;
        }
        let _ = i;
        let color = if depth % 2 == 0 {
            outer_color
        } else {
            outer_color.flipped()
        };
        inner.insert(node.label.clone(), color);
    }
    TwoColoring {
        outer: outer_color,
        inner,
    }
}

/// True iff the unrooted region trees of `a` and `b` are isomorphic.
pub fn is_equivalent(a: &OvalConfig, b: &OvalConfig) -> bool {
    a.canonical_key() == b.canonical_key()
}

/// True iff, after deleting the ovals of `y_subset`, every deleted oval lies
/// in a region of a single color of the canonical two-coloring of what
/// remains. Equivalently: the counts of surviving ovals containing each
/// member of `y_subset` all have the same parity.
pub fn nicely_contains(x: &OvalConfig, y_subset: &BTreeSet<String>) -> Result<bool, OvalError> {
    let mut parity: Option<usize> = None;
    for label in y_subset {
        let idx = x.index_of(label)?;
        let mut surviving = 0usize;
        let mut p = x.nodes[idx].parent;
        while let Some(q) = p {
            if !y_subset.contains(&x.nodes[q].label) {
                surviving += 1;
            }
            p = x.nodes[q].parent;
        }
        let par = surviving % 2;
        match parity {
            None => parity = Some(par),
            Some(prev) if prev != par => return Ok(false),
            Some(_) => {}
        }
    }
    Ok(true)
}

/// All configurations with exactly `n` ovals, one representative per
/// sphere-equivalence class (i.e. per unrooted region tree on `n + 1`
/// vertices). Intended for exhaustive small-case verification.
pub fn enumerate_distinct_configs(n: usize) -> Vec<OvalConfig> {
    // Enumerate rooted-forest shapes as canonical parenthesis strings, then
    // dedupe up to sphere equivalence.
    fn trees(n: usize, memo: &mut Vec<Option<BTreeSet<String>>>) -> BTreeSet<String> {
        if let Some(t) = &memo[n] {
            return t.clone();
        }
        let result: BTreeSet<String> = forests(n - 1, memo)
            .into_iter()
            .map(|f| format!("({f})"))
            .collect();
        memo[n] = Some(result.clone());
        result
    }
    fn forests(n: usize, memo: &mut Vec<Option<BTreeSet<String>>>) -> BTreeSet<String> {
        if n == 0 {
            return [String::new()].into();
        }
        let mut out = BTreeSet::new();
        for k in 1..=n {
            for t in trees(k, memo) {
                for rest in forests(n - k, memo) {
                    let mut parts: Vec<String> = split_shapes(&rest);
                    parts.push(t.clone());
                    parts.sort();
                    out.insert(parts.concat());
                }
            }
        }
        out
    }
    fn split_shapes(s: &str) -> Vec<String> {
        let mut parts = Vec::new();
        let mut depth = 0usize;
        let mut start = 0usize;
        for (i, c) in s.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        parts.push(s[start..=i].to_owned());
                        start = i + 1;
                    }
                }
                _ => {}
            }
        }
        parts
    }
    fn shape_to_config(shape: &str) -> OvalConfig {
        let mut items: Vec<(String, Option<String>)> = Vec::new();
        let mut stack: Vec<String> = Vec::new();
        for c in shape.chars() {
            match c {
                '(' => {
                    let label = format!("o{}", items.len());
                    items.push((label.clone(), stack.last().cloned()));
                    stack.push(label);
                }
                ')' => {
                    stack.pop();
                }
                _ => unreachable!(),
            }
        }
        OvalConfig::from_parents(&items).unwrap()
    }

    let mut memo = vec![None; n + 1];
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for shape in forests(n, &mut memo) {
        let cfg = shape_to_config(&shape);
        if seen.insert(cfg.canonical_key()) {
            out.push(cfg);
        }
    }
    out
}

/// Random nesting forest with `n` ovals labeled `o0..`, for property tests
/// and verification suites.
pub fn random_config<R: rand::Rng>(rng: &mut R, n: usize) -> OvalConfig {
    let mut items: Vec<(String, Option<String>)> = Vec::new();
    for i in 0..n {
        let parent = if i == 0 || rng.gen_bool(0.4) {
            None
        } else {
            Some(format!("o{}", rng.gen_range(0..i)))
        };
        items.push((format!("o{i}"), parent));
    }
    OvalConfig::from_parents(&items).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> OvalConfig {
        OvalConfig::parse(text).unwrap()
    }

    #[test]
    fn parse_roundtrip() {
        for text in ["", "A", "A(B C(D))", "A(B C) D E"] {
            let c = cfg(text);
            assert_eq!(cfg(&c.to_string()), c);
        }
        assert_eq!(cfg(" A ( B  C ( D ) ) "), cfg("A(B C(D))"));
        assert!(OvalConfig::parse("A(").is_err());
        assert!(OvalConfig::parse(")").is_err());
        assert!(OvalConfig::parse("A A").is_err());
        assert!(OvalConfig::parse("(B)").is_err());
    }

    #[test]
    fn coloring_empty_and_single() {
        let c = cfg("");
        let col = canonical_two_coloring(&c, Color::White);
        assert_eq!(col.outer, Color::White);
        assert!(col.inner.is_empty());

        let c = cfg("A");
        let col = canonical_two_coloring(&c, Color::White);
        assert_eq!(col.inside("A"), Some(Color::Black));
    }

    #[test]
    fn coloring_figure_one_config() {
        // Five ovals: one containing two siblings, plus two more outside.
        let c = cfg("A(B C) D E");
        assert_eq!(c.len(), 5);
        let col = canonical_two_coloring(&c, Color::White);
        assert_eq!(col.inside("A"), Some(Color::Black));
        assert_eq!(col.inside("B"), Some(Color::White));
        assert_eq!(col.inside("C"), Some(Color::White));
        assert_eq!(col.inside("D"), Some(Color::Black));
        assert_eq!(col.inside("E"), Some(Color::Black));
    }

    #[test]
    fn coloring_global_swap() {
        let mut rng = seeded();
        for _ in 0..50 {
            let c = random_config(&mut rng, 6);
            let black = canonical_two_coloring(&c, Color::Black);
            let white = canonical_two_coloring(&c, Color::White);
            assert_eq!(black.outer, white.outer.flipped());
            for l in c.labels() {
                assert_eq!(black.inside(l).unwrap(), white.inside(l).unwrap().flipped());
            }
        }
    }

    #[test]
    fn equivalence_examples() {
        assert!(is_equivalent(&cfg("A(B)"), &cfg("X(Y)")));
        // Two siblings vs a nested pair: both region trees are 3-vertex paths.
        assert!(is_equivalent(&cfg("A B"), &cfg("A(B)")));
        // Three siblings (star) vs a chain of three (path): not isomorphic.
        assert!(!is_equivalent(&cfg("A B C"), &cfg("A(B(C))")));
    }

    #[test]
    fn equivalence_matches_brute_force_on_small_trees() {
        // All forests on <= 3 ovals, pairwise compared against a brute-force
        // unrooted-isomorphism oracle on their region trees.
        let all = [
            cfg(""),
            cfg("A"),
            cfg("A B"),
            cfg("A(B)"),
            cfg("A B C"),
            cfg("A(B) C"),
            cfg("A(B C)"),
            cfg("A(B(C))"),
        ];
        for x in &all {
            for y in &all {
                assert_eq!(
                    is_equivalent(x, y),
                    brute_force_equivalent(x, y),
                    "{} vs {}",
                    x,
                    y
                );
            }
        }
    }

    fn region_tree_edges(c: &OvalConfig) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for (i, l) in c.labels().enumerate() {
            let d = c.depth(l).unwrap();
            // Find parent's index by walking labels; depth-0 ovals attach to
            // region 0.
            let mut up = 0;
            if d > 0 {
                let node = &c.nodes[i];
                up = node.parent.unwrap() + 1;
            }
            edges.push((i + 1, up));
        }
        edges
    }

    fn brute_force_equivalent(a: &OvalConfig, b: &OvalConfig) -> bool {
        let (ea, eb) = (region_tree_edges(a), region_tree_edges(b));
        let n = a.len() + 1;
        if b.len() + 1 != n {
            return false;
        }
        // Try all vertex bijections.
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            let ok = ea.iter().all(|&(u, v)| {
                eb.contains(&(perm[u], perm[v])) || eb.contains(&(perm[v], perm[u]))
            });
            if ok {
                return true;
            }
            if !next_permutation(&mut perm) {
                return false;
            }
        }
    }

    fn next_permutation(p: &mut [usize]) -> bool {
        let n = p.len();
        if n < 2 {
            return false;
        }
        let mut i = n - 1;
        while i > 0 && p[i - 1] >= p[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = n - 1;
        while p[j] <= p[i - 1] {
            j -= 1;
        }
        p.swap(i - 1, j);
        p[i..].reverse();
        true
    }

    fn seeded() -> rand_chacha::ChaCha8Rng {
        use rand::SeedableRng;
        rand_chacha::ChaCha8Rng::seed_from_u64(0x07a1)
    }

    #[test]
    fn equivalence_is_an_equivalence_relation() {
        let mut rng = seeded();
        let samples: Vec<OvalConfig> = (0..30).map(|_| random_config(&mut rng, 5)).collect();
        for _ in 0..1000 {
            use rand::Rng;
            let a = &samples[rng.gen_range(0..samples.len())];
            let b = &samples[rng.gen_range(0..samples.len())];
            let c = &samples[rng.gen_range(0..samples.len())];
            assert!(is_equivalent(a, a));
            assert_eq!(is_equivalent(a, b), is_equivalent(b, a));
            if is_equivalent(a, b) && is_equivalent(b, c) {
                assert!(is_equivalent(a, c));
            }
        }
    }

    #[test]
    fn nicely_contains_examples() {
        let set = |labels: &[&str]| -> BTreeSet<String> {
            labels.iter().map(|s| s.to_string()).collect()
        };
        let x = cfg("A(B)");
        assert!(nicely_contains(&x, &set(&["A", "B"])).unwrap());
        assert!(nicely_contains(&x, &set(&["B"])).unwrap());
        assert!(nicely_contains(&x, &set(&[])).unwrap());

        let chain = cfg("A(B(C))");
        assert!(!nicely_contains(&chain, &set(&["A", "C"])).unwrap());
        assert!(nicely_contains(&chain, &set(&["A", "B", "C"])).unwrap());
        assert!(nicely_contains(&chain, &set(&["B"])).unwrap());

        assert_eq!(
            nicely_contains(&chain, &set(&["Z"])),
            Err(OvalError::UnknownLabel("Z".into()))
        );
    }

    #[test]
    fn nicely_contains_trivial_cases_hold_generally() {
        let mut rng = seeded();
        for _ in 0..100 {
            let c = random_config(&mut rng, 7);
            let all: BTreeSet<String> = c.labels().map(str::to_owned).collect();
            assert!(nicely_contains(&c, &all).unwrap());
            assert!(nicely_contains(&c, &BTreeSet::new()).unwrap());
            for l in c.labels() {
                let single: BTreeSet<String> = [l.to_owned()].into();
                assert!(nicely_contains(&c, &single).unwrap());
            }
        }
    }

    #[test]
    fn enumerate_counts_match_free_trees() {
        // Number of unrooted trees on n + 1 vertices: 1, 1, 1, 2, 3, 6, 11.
        let expect = [1usize, 1, 1, 2, 3, 6, 11];
        for n in 0..=6 {
            assert_eq!(enumerate_distinct_configs(n).len(), expect[n], "n={n}");
        }
    }

    #[test]
    fn restrict_reattaches_children() {
        let c = cfg("A(B(C) D)");
        let keep: BTreeSet<String> = ["A".to_string(), "C".to_string()].into();
        let r = c.restrict(&keep).unwrap();
        assert_eq!(r.to_string(), "A(C)");
        let keep: BTreeSet<String> = ["C".to_string(), "D".to_string()].into();
        let r = c.restrict(&keep).unwrap();
        assert_eq!(r.to_string(), "C D");
    }
}
