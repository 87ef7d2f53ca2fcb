//! Semantic network construction from a machine-readable dictionary.
//!
//! Every headword becomes a node. Scanning a headword's definition, each
//! content token that is itself a headword contributes a directed edge from
//! the headword to that token, weighted by how often the token occurs in the
//! definition and normalized so each node's outgoing weights sum to one.
//! Tokens that are not headwords are dropped (and counted), as are stopword
//! tokens and self-references, so the network is closed over its own
//! vocabulary by construction.
//!
//! Networks can be serialized to a plain-text format and reloaded exactly:
//! the writer prints weights with enough digits that a round trip reproduces
//! every bit, and the reader re-validates all structural invariants (dense
//! node indices, no self-loops, weights in `(0, 1]`, per-node weight sums
//! within [`WEIGHT_SUM_TOLERANCE`] of one).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::textnorm;

/// Maximum allowed deviation of a node's outgoing weight sum from 1.0,
/// checked when loading a serialized network.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

const FORMAT_HEADER: &str = "lexnet v1";

#[derive(Debug, Error)]
pub enum LexnetError {
    /// The dictionary had no entries at all; an empty network is never valid.
    #[error("dictionary contains no entries")]
    EmptyDictionary,
    #[error("duplicate headword `{0}`")]
    DuplicateHeadword(String),
    #[error("headword is empty after normalization")]
    EmptyHeadword,
    #[error("definition token `{0}` is empty or punctuation-only")]
    InvalidToken(String),
    /// A malformed line in a dictionary or network file; `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    /// A structurally invalid serialized network (bad index, self-loop,
    /// out-of-range weight, weight sum off by more than the tolerance).
    #[error("network integrity violation: {0}")]
    Integrity(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Index of a node inside one [`SemanticNetwork`]. Ids are only meaningful
/// for the network that issued them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(usize);

impl NodeId {
    /// Position of the node in the network's dense `0..node_count` range.
    pub fn index(self) -> usize {
        self.0
    }

    /// Wraps a raw index the caller has already bounds-checked.
    pub(crate) fn from_index(index: usize) -> Self {
        Self(index)
    }
}

/// One dictionary entry: a headword plus the content tokens of its
/// definition, all lowercase and free of whitespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DictionaryEntry {
    headword: String,
    definition: Vec<String>,
}

impl DictionaryEntry {
    /// Builds an entry from pre-tokenized input, case-folding both the
    /// headword and the definition tokens. Fails on an empty or
    /// punctuation-only headword and on definition tokens that normalize to
    /// nothing; an empty definition is allowed and yields a node with no
    /// outgoing edges.
    pub fn new<S: AsRef<str>, I: IntoIterator<Item = S>>(
        headword: &str,
        definition: I,
    ) -> Result<Self, LexnetError> {
        let headword = textnorm::normalize(headword).ok_or(LexnetError::EmptyHeadword)?;
        let definition = definition
            .into_iter()
            .map(|raw| {
                textnorm::normalize(raw.as_ref())
                    .ok_or_else(|| LexnetError::InvalidToken(raw.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { headword, definition })
    }

    pub fn headword(&self) -> &str {
        &self.headword
    }

    pub fn definition(&self) -> &[String] {
        &self.definition
    }
}

/// Directed semantic network with normalized outgoing edge weights.
///
/// Node ids are dense in `0..node_count()` and map bijectively to words.
/// Each adjacency list is sorted by target id, never contains a self-loop,
/// and its weights sum to 1 (nodes whose definitions contributed no usable
/// token simply have no outgoing edges).
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticNetwork {
    words: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Vec<(usize, f64)>>,
}

impl SemanticNetwork {
    pub fn node_count(&self) -> usize {
        self.words.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// Resolves a word (must already be normalized) to its node.
    pub fn lookup(&self, word: &str) -> Option<NodeId> {
        self.index.get(word).copied().map(NodeId)
    }

    /// The word at `node`. Panics if the id came from a different network
    /// with more nodes.
    pub fn word(&self, node: NodeId) -> &str {
        &self.words[node.0]
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    /// Outgoing edges of `node` in ascending target order.
    pub fn out_edges(&self, node: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.edges[node.0].iter().map(|&(t, w)| (NodeId(t), w))
    }

    pub fn out_degree(&self, node: NodeId) -> usize {
        self.edges[node.0].len()
    }

    /// Raw adjacency list for the activation hot path.
    pub(crate) fn out_edges_raw(&self, node: usize) -> &[(usize, f64)] {
        &self.edges[node]
    }
}

/// Dropped-material counters accumulated while building a network. These are
/// diagnostics, not errors: a high `dropped_tokens` count signals that the
/// dictionary's definition vocabulary is poorly covered by its headwords.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    /// Definition tokens skipped because no entry defines them.
    pub dropped_tokens: usize,
    /// Definition tokens skipped because they appear in the stopword list.
    pub stopword_tokens: usize,
    /// Definition tokens skipped because they name their own headword.
    pub self_references: usize,
}

/// A built network together with its construction diagnostics.
#[derive(Debug, Clone)]
pub struct NetworkBuild {
    pub network: SemanticNetwork,
    pub stats: BuildStats,
}

/// Builds the semantic network for a dictionary.
///
/// Entries are assigned node ids in input order. For each entry, definition
/// tokens are filtered (stopwords, self-references, tokens no entry defines)
/// and the survivors' occurrence counts become edge weights proportional to
/// count over the entry's surviving total, so every emitted adjacency list
/// sums to exactly the count ratios of its definition.
///
/// The same dictionary always produces the identical network: iteration
/// follows entry order and adjacency lists are sorted by target id.
pub fn build_network(
    entries: &[DictionaryEntry],
    stopwords: &HashSet<String>,
) -> Result<NetworkBuild, LexnetError> {
    if entries.is_empty() {
        return Err(LexnetError::EmptyDictionary);
    }

    let mut words = Vec::with_capacity(entries.len());
    let mut index = HashMap::with_capacity(entries.len());
    for entry in entries {
        if index.insert(entry.headword.clone(), words.len()).is_some() {
            return Err(LexnetError::DuplicateHeadword(entry.headword.clone()));
        }
        words.push(entry.headword.clone());
    }

    let mut stats = BuildStats::default();
    let mut edges = Vec::with_capacity(entries.len());
    for (source, entry) in entries.iter().enumerate() {
        // BTreeMap keeps targets in ascending id order, which fixes both the
        // adjacency order and the floating-point normalization order.
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for token in &entry.definition {
            if stopwords.contains(token) {
                stats.stopword_tokens += 1;
                continue;
            }
            match index.get(token) {
                Some(&target) if target == source => stats.self_references += 1,
                Some(&target) => *counts.entry(target).or_insert(0) += 1,
                None => stats.dropped_tokens += 1,
            }
        }
        let total: usize = counts.values().sum();
        let list: Vec<(usize, f64)> = counts
            .into_iter()
            .map(|(target, count)| (target, count as f64 / total as f64))
            .collect();
        edges.push(list);
    }

    Ok(NetworkBuild {
        network: SemanticNetwork { words, index, edges },
        stats,
    })
}

/// Parses the tab-separated dictionary format: one entry per line,
/// `headword<TAB>definition tokens...`. Headword and tokens are normalized
/// exactly like running text; definition tokens that normalize to nothing
/// are dropped silently. Errors carry the 1-based line number.
pub fn parse_dictionary<R: BufRead>(reader: R) -> Result<Vec<DictionaryEntry>, LexnetError> {
    let mut entries = Vec::new();
    for (number, line) in reader.lines().enumerate() {
        let line = line?;
        let number = number + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (raw_head, raw_definition) = line.split_once('\t').ok_or(LexnetError::Parse {
            line: number,
            message: "expected `headword<TAB>definition`".to_string(),
        })?;
        let headword = textnorm::normalize(raw_head).ok_or(LexnetError::Parse {
            line: number,
            message: format!("headword `{raw_head}` is empty after normalization"),
        })?;
        let definition: Vec<String> = raw_definition
            .split_whitespace()
            .filter_map(textnorm::normalize)
            .collect();
        entries.push(DictionaryEntry { headword, definition });
    }
    Ok(entries)
}

/// Serializes a network to the plain-text `lexnet v1` format.
///
/// Layout: a header line `lexnet v1 <node-count>`, one `N <id> <word>` line
/// per node in id order, then one `E <source> <target> <weight>` line per
/// edge, grouped by source and sorted by target. Weights are printed with 17
/// significant digits so that [`load_network`] reproduces them bit for bit.
pub fn save_network<W: Write>(network: &SemanticNetwork, writer: &mut W) -> io::Result<()> {
    writeln!(writer, "{FORMAT_HEADER} {}", network.node_count())?;
    for (id, word) in network.words.iter().enumerate() {
        writeln!(writer, "N {id} {word}")?;
    }
    for (source, list) in network.edges.iter().enumerate() {
        for &(target, weight) in list {
            writeln!(writer, "E {source} {target} {weight:.16e}")?;
        }
    }
    Ok(())
}

/// Reads a network saved by [`save_network`], re-validating every structural
/// invariant. Node lines must precede edge lines and appear in dense id
/// order; edges may arrive in any order but duplicates, self-loops, unknown
/// endpoints, weights outside `(0, 1]`, and per-node sums off by more than
/// [`WEIGHT_SUM_TOLERANCE`] are all rejected.
pub fn load_network<R: BufRead>(reader: R) -> Result<SemanticNetwork, LexnetError> {
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines.next().ok_or(LexnetError::Parse {
        line: 1,
        message: "missing header".to_string(),
    })?;
    let header = header?;
    let declared: usize = header
        .strip_prefix(FORMAT_HEADER)
        .map(str::trim)
        .and_then(|count| count.parse().ok())
        .ok_or(LexnetError::Parse {
            line: 1,
            message: format!("expected `{FORMAT_HEADER} <node-count>`, got `{header}`"),
        })?;
    if declared == 0 {
        return Err(LexnetError::Parse {
            line: 1,
            message: "network declares zero nodes".to_string(),
        });
    }

    let mut words: Vec<String> = Vec::with_capacity(declared);
    let mut index: HashMap<String, usize> = HashMap::with_capacity(declared);
    let mut edges: Vec<Vec<(usize, f64)>> = vec![Vec::new(); declared];
    let mut in_edge_section = false;

    for (number, line) in lines {
        let line = line?;
        let number = number + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| LexnetError::Parse { line: number, message };
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("N") => {
                if in_edge_section {
                    return Err(parse_err("node line after edge section".to_string()));
                }
                let id: usize = fields
                    .next()
                    .and_then(|f| f.parse().ok())
                    .ok_or_else(|| parse_err("malformed node id".to_string()))?;
                let word = fields
                    .next()
                    .ok_or_else(|| parse_err("missing node word".to_string()))?;
                if fields.next().is_some() {
                    return Err(parse_err("trailing fields on node line".to_string()));
                }
                if id != words.len() {
                    return Err(parse_err(format!(
                        "node id {id} out of order, expected {}",
                        words.len()
                    )));
                }
                if id >= declared {
                    return Err(parse_err(format!(
                        "node id {id} exceeds declared count {declared}"
                    )));
                }
                if index.insert(word.to_string(), id).is_some() {
                    return Err(LexnetError::Integrity(format!(
                        "word `{word}` maps to more than one node"
                    )));
                }
                words.push(word.to_string());
            }
            Some("E") => {
                in_edge_section = true;
                let mut field = |name: &str| {
                    fields
                        .next()
                        .ok_or_else(|| parse_err(format!("missing edge {name}")))
                };
                let source: usize = field("source")?
                    .parse()
                    .map_err(|_| parse_err("malformed edge source".to_string()))?;
                let target: usize = field("target")?
                    .parse()
                    .map_err(|_| parse_err("malformed edge target".to_string()))?;
                let weight: f64 = field("weight")?
                    .parse()
                    .map_err(|_| parse_err("malformed edge weight".to_string()))?;
                if fields.next().is_some() {
                    return Err(parse_err("trailing fields on edge line".to_string()));
                }
                if source >= declared || target >= declared {
                    return Err(LexnetError::Integrity(format!(
                        "edge {source} -> {target} references an unknown node"
                    )));
                }
                if source == target {
                    return Err(LexnetError::Integrity(format!(
                        "self-loop on node {source}"
                    )));
                }
                if !weight.is_finite() || weight <= 0.0 || weight > 1.0 {
                    return Err(LexnetError::Integrity(format!(
                        "edge {source} -> {target} has weight {weight} outside (0, 1]"
                    )));
                }
                edges[source].push((target, weight));
            }
            Some(tag) => {
                return Err(parse_err(format!("unknown line tag `{tag}`")));
            }
            None => unreachable!("blank lines are skipped above"),
        }
    }

    if words.len() != declared {
        return Err(LexnetError::Parse {
            line: 1,
            message: format!("header declares {declared} nodes, file has {}", words.len()),
        });
    }

    for (source, list) in edges.iter_mut().enumerate() {
        list.sort_unstable_by_key(|&(target, _)| target);
        if list.windows(2).any(|pair| pair[0].0 == pair[1].0) {
            return Err(LexnetError::Integrity(format!(
                "duplicate edge out of node {source}"
            )));
        }
        if !list.is_empty() {
            let sum: f64 = list.iter().map(|&(_, w)| w).sum();
            if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                return Err(LexnetError::Integrity(format!(
                    "outgoing weights of node {source} sum to {sum}, expected 1"
                )));
            }
        }
    }

    Ok(SemanticNetwork { words, index, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn entry(headword: &str, definition: &[&str]) -> DictionaryEntry {
        DictionaryEntry::new(headword, definition.iter().copied()).unwrap()
    }

    fn small_network() -> SemanticNetwork {
        // `cat` defined by one in-vocabulary token each of `pet` and
        // `animal` plus two out-of-vocabulary tokens; `pet` and `animal`
        // defined mutually.
        let entries = vec![
            entry("cat", &["small", "pet", "animal", "fur"]),
            entry("pet", &["animal", "kept", "company"]),
            entry("animal", &["living", "creature", "pet"]),
        ];
        build_network(&entries, &HashSet::new()).unwrap().network
    }

    #[test]
    fn weights_are_count_proportional_and_normalized() {
        let net = small_network();
        let cat = net.lookup("cat").unwrap();
        let pet = net.lookup("pet").unwrap();
        let animal = net.lookup("animal").unwrap();

        let cat_edges: Vec<_> = net.out_edges(cat).collect();
        assert_eq!(cat_edges, vec![(pet, 0.5), (animal, 0.5)]);
        let pet_edges: Vec<_> = net.out_edges(pet).collect();
        assert_eq!(pet_edges, vec![(animal, 1.0)]);
        let animal_edges: Vec<_> = net.out_edges(animal).collect();
        assert_eq!(animal_edges, vec![(pet, 1.0)]);
    }

    #[test]
    fn repeated_tokens_accumulate_weight() {
        let entries = vec![
            entry("storm", &["wind", "wind", "rain"]),
            entry("wind", &["air"]),
            entry("rain", &["water"]),
            entry("air", &[]),
            entry("water", &[]),
        ];
        let net = build_network(&entries, &HashSet::new()).unwrap().network;
        let storm = net.lookup("storm").unwrap();
        let weights: Vec<f64> = net.out_edges(storm).map(|(_, w)| w).collect();
        assert_eq!(weights, vec![2.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn dropped_material_is_counted() {
        let entries = vec![
            entry("cat", &["small", "pet", "animal", "fur"]),
            entry("pet", &["a", "pet", "animal"]),
            entry("animal", &["living", "creature"]),
        ];
        let stopwords: HashSet<String> = ["a"].iter().map(|s| s.to_string()).collect();
        let build = build_network(&entries, &stopwords).unwrap();
        // cat: small+fur dropped; pet: self-reference skipped, `a` stopped;
        // animal: both tokens dropped (no outgoing edges is legal).
        assert_eq!(build.stats.dropped_tokens, 4);
        assert_eq!(build.stats.stopword_tokens, 1);
        assert_eq!(build.stats.self_references, 1);
        let animal = build.network.lookup("animal").unwrap();
        assert_eq!(build.network.out_degree(animal), 0);
    }

    #[test]
    fn duplicate_headwords_are_rejected() {
        let entries = vec![entry("cat", &["pet"]), entry("cat", &["animal"])];
        assert!(matches!(
            build_network(&entries, &HashSet::new()),
            Err(LexnetError::DuplicateHeadword(word)) if word == "cat"
        ));
    }

    #[test]
    fn empty_dictionary_is_rejected() {
        assert!(matches!(
            build_network(&[], &HashSet::new()),
            Err(LexnetError::EmptyDictionary)
        ));
    }

    #[test]
    fn entry_normalizes_case_and_rejects_empty_tokens() {
        let e = DictionaryEntry::new("Cat", ["Small", "PET"]).unwrap();
        assert_eq!(e.headword(), "cat");
        assert_eq!(e.definition(), ["small", "pet"]);
        assert!(matches!(
            DictionaryEntry::new("...", ["pet"]),
            Err(LexnetError::EmptyHeadword)
        ));
        assert!(matches!(
            DictionaryEntry::new("cat", ["--"]),
            Err(LexnetError::InvalidToken(_))
        ));
    }

    #[test]
    fn parse_dictionary_normalizes_and_numbers_errors() {
        let input = "Cat\tA small PET animal.\npet\tanimal, kept -- for company\n";
        let entries = parse_dictionary(Cursor::new(input)).unwrap();
        assert_eq!(entries[0].headword(), "cat");
        assert_eq!(entries[0].definition(), ["a", "small", "pet", "animal"]);
        assert_eq!(entries[1].definition(), ["animal", "kept", "for", "company"]);

        let err = parse_dictionary(Cursor::new("cat definition without tab\n")).unwrap_err();
        assert!(matches!(err, LexnetError::Parse { line: 1, .. }));
        let err = parse_dictionary(Cursor::new("cat\tpet\n...\tanimal\n")).unwrap_err();
        assert!(matches!(err, LexnetError::Parse { line: 2, .. }));
    }

    #[test]
    fn save_load_round_trip_is_exact() {
        let net = small_network();
        let mut buffer = Vec::new();
        save_network(&net, &mut buffer).unwrap();
        let reloaded = load_network(Cursor::new(&buffer)).unwrap();
        assert_eq!(net, reloaded);

        let mut again = Vec::new();
        save_network(&reloaded, &mut again).unwrap();
        assert_eq!(buffer, again);
    }

    #[test]
    fn load_rejects_corrupt_files() {
        let mut buffer = Vec::new();
        save_network(&small_network(), &mut buffer).unwrap();
        let text = String::from_utf8(buffer).unwrap();

        let zero_nodes = "lexnet v1 0\n";
        assert!(matches!(
            load_network(Cursor::new(zero_nodes)),
            Err(LexnetError::Parse { line: 1, .. })
        ));

        let unknown_target = text.replace("E 0 1", "E 0 9");
        assert!(matches!(
            load_network(Cursor::new(unknown_target)),
            Err(LexnetError::Integrity(_))
        ));

        let self_loop = text.replace("E 0 1", "E 0 0");
        assert!(matches!(
            load_network(Cursor::new(self_loop)),
            Err(LexnetError::Integrity(_))
        ));

        let bad_sum = text.replace("5.0000000000000000e-1", "4.0000000000000000e-1");
        assert!(matches!(
            load_network(Cursor::new(bad_sum)),
            Err(LexnetError::Integrity(_))
        ));

        let bad_tag = format!("{text}X stray\n");
        assert!(matches!(
            load_network(Cursor::new(bad_tag)),
            Err(LexnetError::Parse { .. })
        ));
    }

    #[test]
    fn load_rejects_out_of_range_weight() {
        let file = "lexnet v1 2\nN 0 cat\nN 1 pet\nE 0 1 1.5e0\n";
        assert!(matches!(
            load_network(Cursor::new(file)),
            Err(LexnetError::Integrity(_))
        ));
    }

    #[test]
    fn header_count_must_match_node_lines() {
        let file = "lexnet v1 3\nN 0 cat\nN 1 pet\n";
        assert!(matches!(
            load_network(Cursor::new(file)),
            Err(LexnetError::Parse { .. })
        ));
    }
}
