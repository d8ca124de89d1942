//! Patterns, forbidden lists, local admissibility and the SFT data model.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{parse_site, Shape, Site};

/// An ordered finite alphabet of distinct string tokens.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Alphabet {
    tokens: Vec<String>,
}

impl Alphabet {
    pub fn new(tokens: Vec<String>) -> Result<Alphabet> {
        if tokens.is_empty() {
            return Err(Error::Invalid("alphabet must be nonempty".to_string()));
        }
        let mut seen = tokens.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != tokens.len() {
            return Err(Error::Invalid("alphabet tokens must be distinct".to_string()));
        }
        Ok(Alphabet { tokens })
    }

    /// Alphabet {0, 1, ..., n-1} with decimal tokens.
    pub fn numeric(n: u32) -> Alphabet {
        Alphabet {
            tokens: (0..n).map(|i| i.to_string()).collect(),
        }
    }

    pub fn from_tokens(tokens: &[&str]) -> Result<Alphabet> {
        Alphabet::new(tokens.iter().map(|t| t.to_string()).collect())
    }

    pub fn len(&self) -> u32 {
        self.tokens.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token(&self, index: u32) -> &str {
        &self.tokens[index as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn index_of(&self, token: &str) -> Option<u32> {
        self.tokens.iter().position(|t| t == token).map(|i| i as u32)
    }
}

/// A finite pattern: a total assignment of symbol indices to the sites of a
/// shape. `symbols[i]` is the symbol at `domain.sites()[i]`, so equal
/// patterns are structurally equal and hashable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    domain: Shape,
    symbols: Vec<u32>,
}

impl Pattern {
    pub fn new(domain: Shape, symbols: Vec<u32>) -> Result<Pattern> {
        if domain.len() != symbols.len() {
            return Err(Error::Invalid(format!(
                "pattern needs {} symbols for its domain, got {}",
                domain.len(),
                symbols.len()
            )));
        }
        Ok(Pattern { domain, symbols })
    }

    /// 1D convenience: the word `symbols` on sites {offset, offset+1, ...}.
    pub fn word(symbols: &[u32], offset: i64) -> Pattern {
        let sites = (0..symbols.len() as i64)
            .map(|i| Site(vec![offset + i]))
            .collect();
        Pattern {
            domain: Shape::new(1, sites).expect("1d sites"),
            symbols: symbols.to_vec(),
        }
    }

    pub fn domain(&self) -> &Shape {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn get(&self, site: &Site) -> Option<u32> {
        self.domain.index_of(site).map(|i| self.symbols[i])
    }

    pub fn translate(&self, by: &Site) -> Result<Pattern> {
        Ok(Pattern {
            domain: self.domain.translate(by)?,
            symbols: self.symbols.clone(),
        })
    }

    /// Restriction to a subset of the domain.
    pub fn restrict(&self, shape: &Shape) -> Result<Pattern> {
        let symbols = shape
            .iter()
            .map(|s| {
                self.get(s).ok_or_else(|| {
                    Error::Invalid(format!("restriction target site {s} outside domain"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Pattern {
            domain: shape.clone(),
            symbols,
        })
    }

    /// Render with alphabet tokens in the file-format syntax.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        self.domain
            .iter()
            .zip(&self.symbols)
            .map(|(site, sym)| format!("{site}:{}", alphabet.token(*sym)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern[")?;
        for (i, (site, sym)) in self.domain.iter().zip(&self.symbols).enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{site}={sym}")?;
        }
        write!(f, "]")
    }
}

/// An SFT given by an alphabet, a finite forbidden pattern list, and an
/// optional asserted strong-irreducibility gap radius. The gap is an
/// unverified user assertion; every certificate that relies on it says so.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SftSpec {
    pub alphabet: Alphabet,
    pub dim: usize,
    pub forbidden: Vec<Pattern>,
    pub si_gap: Option<u32>,
}

impl SftSpec {
    pub fn new(
        alphabet: Alphabet,
        dim: usize,
        forbidden: Vec<Pattern>,
        si_gap: Option<u32>,
    ) -> Result<SftSpec> {
        if dim == 0 {
            return Err(Error::Invalid("dimension must be positive".to_string()));
        }
        for p in &forbidden {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
            if p.domain().is_empty() {
                return Err(Error::Invalid("forbidden pattern with empty domain".to_string()));
            }
            if p.symbols().iter().any(|s| *s >= alphabet.len()) {
                return Err(Error::Invalid(
                    "forbidden pattern uses a symbol outside the alphabet".to_string(),
                ));
            }
        }
        Ok(SftSpec {
            alphabet,
            dim,
            forbidden,
            si_gap,
        })
    }

    pub fn full_shift(alphabet: Alphabet, dim: usize) -> SftSpec {
        SftSpec {
            alphabet,
            dim,
            forbidden: Vec::new(),
            si_gap: Some(0),
        }
    }

    pub fn is_full_shift(&self) -> bool {
        self.forbidden.is_empty()
    }

    /// Smallest `r` such that every forbidden domain fits in a translate of
    /// the centered box of radius `r`.
    pub fn forbidden_radius(&self) -> u32 {
        self.forbidden
            .iter()
            .filter_map(|p| p.domain().bounding_box())
            .map(|bb| {
                (0..bb.dim())
                    .map(|axis| (bb.side(axis) - 1).div_ceil(2) as u32)
                    .max()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    /// Radius of the window that carries both the SFT rules and the asserted
    /// SI gap: the `E` every box construction in this crate is based on.
    pub fn interaction_radius(&self) -> u32 {
        self.forbidden_radius().max(self.si_gap.unwrap_or(0))
    }
}

/// A demand-driven enumeration of forbidden words. Prefixes induce a
/// decreasing family of subshifts whose intersection is the target; only a
/// finite prefix is ever materialized.
#[derive(Clone, Debug)]
pub struct ForbiddenEnumeration {
    alphabet: Alphabet,
    dim: usize,
    words: Vec<Pattern>,
}

impl ForbiddenEnumeration {
    pub fn new(alphabet: Alphabet, dim: usize, words: Vec<Pattern>) -> Result<ForbiddenEnumeration> {
        // Reuse the SFT validation.
        let spec = SftSpec::new(alphabet, dim, words, None)?;
        Ok(ForbiddenEnumeration {
            alphabet: spec.alphabet,
            dim: spec.dim,
            words: spec.forbidden,
        })
    }

    pub fn from_spec(spec: &SftSpec) -> ForbiddenEnumeration {
        ForbiddenEnumeration {
            alphabet: spec.alphabet.clone(),
            dim: spec.dim,
            words: spec.forbidden.clone(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The first `n` forbidden words (all of them if fewer are known).
    pub fn prefix(&self, n: usize) -> &[Pattern] {
        &self.words[..n.min(self.words.len())]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Does `w` occur inside `v` at offset `g`: is domain(w)+g inside domain(v)
/// with matching symbols?
pub fn is_subword_at(w: &Pattern, v: &Pattern, g: &Site) -> Result<bool> {
    if w.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            got: w.dim(),
        });
    }
    if g.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            got: g.dim(),
        });
    }
    for (site, sym) in w.domain().iter().zip(w.symbols()) {
        let target = match site.translate(g) {
            Ok(t) => t,
            Err(_) => return Ok(false),
        };
        match v.get(&target) {
            Some(found) if found == *sym => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// True iff no forbidden pattern occurs at any position inside `v`.
pub fn is_locally_admissible(v: &Pattern, forbidden: &[Pattern]) -> bool {
    for w in forbidden {
        let anchor = &w.domain().sites()[0];
        for target in v.domain().iter() {
            let g = Site(
                target
                    .0
                    .iter()
                    .zip(&anchor.0)
                    .map(|(t, a)| t - a)
                    .collect(),
            );
            if matches!(is_subword_at(w, v, &g), Ok(true)) {
                return false;
            }
        }
    }
    true
}

/// A forbidden window instantiated inside a target shape: the indices of the
/// translated sites in the shape's canonical order, and the symbols to
/// reject. `last` is the largest index, so the window is checkable as soon
/// as the depth-first assignment reaches it.
struct PlacedWindow {
    site_indices: Vec<u32>,
    symbols: Vec<u32>,
}

/// Depth-first enumerator of locally admissible patterns on a shape, with
/// incremental forbidden-window checking: only windows that fit entirely in
/// the assigned prefix are tested, each exactly once.
pub(crate) struct Enumerator<'a> {
    shape: &'a Shape,
    alphabet_size: u32,
    /// Windows grouped by the assignment depth at which they complete.
    windows_at: Vec<Vec<PlacedWindow>>,
}

impl<'a> Enumerator<'a> {
    pub fn new(shape: &'a Shape, alphabet_size: u32, forbidden: &[Pattern]) -> Enumerator<'a> {
        let mut windows_at: Vec<Vec<PlacedWindow>> = (0..shape.len()).map(|_| Vec::new()).collect();
        for w in forbidden {
            let anchor = &w.domain().sites()[0];
            'placement: for target in shape.iter() {
                let offset: Vec<i64> = target
                    .0
                    .iter()
                    .zip(&anchor.0)
                    .map(|(t, a)| t - a)
                    .collect();
                let mut site_indices = Vec::with_capacity(w.domain().len());
                for site in w.domain().iter() {
                    let translated = Site(
                        site.0.iter().zip(&offset).map(|(s, o)| s + o).collect(),
                    );
                    match shape.index_of(&translated) {
                        Some(idx) => site_indices.push(idx as u32),
                        None => continue 'placement,
                    }
                }
                let last = *site_indices.iter().max().expect("nonempty window") as usize;
                windows_at[last].push(PlacedWindow {
                    site_indices,
                    symbols: w.symbols().to_vec(),
                });
            }
        }
        Enumerator {
            shape,
            alphabet_size,
            windows_at,
        }
    }

    fn window_rejects(&self, window: &PlacedWindow, assignment: &[u32]) -> bool {
        window
            .site_indices
            .iter()
            .zip(&window.symbols)
            .all(|(idx, sym)| assignment[*idx as usize] == *sym)
    }

    /// Does a complete assignment avoid every forbidden window?
    pub fn accepts(&self, assignment: &[u32]) -> bool {
        self.windows_at
            .iter()
            .flatten()
            .all(|w| !self.window_rejects(w, assignment))
    }

    /// Walk all admissible completions of the pinned sites in canonical
    /// order. `on_leaf` may return `false` to stop the walk early. The node
    /// budget bounds the total number of assignments tried.
    pub fn walk(
        &self,
        pins: &[(usize, u32)],
        node_budget: u64,
        on_leaf: &mut dyn FnMut(&[u32]) -> bool,
    ) -> Result<()> {
        let n = self.shape.len();
        let mut pinned: Vec<Option<u32>> = vec![None; n];
        for (idx, sym) in pins {
            if *idx >= n || *sym >= self.alphabet_size {
                return Err(Error::Invalid("pin outside shape or alphabet".to_string()));
            }
            if let Some(existing) = pinned[*idx] {
                if existing != *sym {
                    // Contradictory pins cannot be completed.
                    return Ok(());
                }
            }
            pinned[*idx] = Some(*sym);
        }
        let mut state = WalkState {
            assignment: vec![0; n],
            pinned,
            nodes: 0,
            node_budget,
            stopped: false,
        };
        if n == 0 {
            // The empty shape carries exactly the empty pattern.
            on_leaf(&[]);
            return Ok(());
        }
        self.descend(0, &mut state, on_leaf)?;
        Ok(())
    }

    fn descend(
        &self,
        depth: usize,
        state: &mut WalkState,
        on_leaf: &mut dyn FnMut(&[u32]) -> bool,
    ) -> Result<()> {
        let symbols: Vec<u32> = match state.pinned[depth] {
            Some(s) => vec![s],
            None => (0..self.alphabet_size).collect(),
        };
        for sym in symbols {
            if state.stopped {
                break;
            }
            state.nodes += 1;
            if state.nodes > state.node_budget {
                return Err(Error::ResourceLimit {
                    what: "pattern enumeration nodes",
                    needed: format!("> {}", state.node_budget),
                    budget: state.node_budget.to_string(),
                });
            }
            state.assignment[depth] = sym;
            if self.windows_at[depth]
                .iter()
                .any(|w| self.window_rejects(w, &state.assignment))
            {
                continue;
            }
            if depth + 1 == self.shape.len() {
                if !on_leaf(&state.assignment) {
                    state.stopped = true;
                    break;
                }
            } else {
                self.descend(depth + 1, state, on_leaf)?;
            }
        }
        Ok(())
    }
}

struct WalkState {
    assignment: Vec<u32>,
    pinned: Vec<Option<u32>>,
    nodes: u64,
    node_budget: u64,
    stopped: bool,
}

pub const DEFAULT_NODE_BUDGET: u64 = 200_000_000;

/// All locally admissible patterns on `shape`, in canonical order.
///
/// `cap` bounds the number of emitted patterns; exceeding it signals the
/// caller to shrink the shape rather than thrash.
pub fn enumerate_locally_admissible(
    shape: &Shape,
    spec: &SftSpec,
    cap: u64,
) -> Result<Vec<Pattern>> {
    if shape.is_empty() {
        return Err(Error::Invalid("enumeration needs a nonempty shape".to_string()));
    }
    if shape.dim() != spec.dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim,
            got: shape.dim(),
        });
    }
    let enumerator = Enumerator::new(shape, spec.alphabet.len(), &spec.forbidden);
    let mut out: Vec<Pattern> = Vec::new();
    let mut overflow = false;
    enumerator.walk(&[], DEFAULT_NODE_BUDGET, &mut |assignment| {
        if out.len() as u64 >= cap {
            overflow = true;
            return false;
        }
        out.push(Pattern {
            domain: shape.clone(),
            symbols: assignment.to_vec(),
        });
        true
    })?;
    if overflow {
        return Err(Error::ResourceLimit {
            what: "locally admissible patterns",
            needed: format!("> {cap}"),
            budget: cap.to_string(),
        });
    }
    Ok(out)
}

/// Is there a locally admissible pattern on `shape` extending the pins?
pub(crate) fn exists_admissible_completion(
    shape: &Shape,
    pins: &[(usize, u32)],
    spec: &SftSpec,
    node_budget: u64,
) -> Result<bool> {
    let enumerator = Enumerator::new(shape, spec.alphabet.len(), &spec.forbidden);
    let mut found = false;
    enumerator.walk(pins, node_budget, &mut |_| {
        found = true;
        false
    })?;
    Ok(found)
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

/// Parse the line-oriented SFT spec format:
///
/// ```text
/// dim 2
/// alphabet 0 1
/// forbidden
/// (0,0):1 (1,0):1
/// end
/// si_gap 1
/// ```
pub fn parse_sft(text: &str) -> Result<SftSpec> {
    let mut dim: Option<usize> = None;
    let mut alphabet: Option<Alphabet> = None;
    let mut forbidden: Vec<Pattern> = Vec::new();
    let mut si_gap: Option<u32> = None;
    let mut in_forbidden = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: String| Error::Parse { line: lineno + 1, msg };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if in_forbidden {
            if line == "end" {
                in_forbidden = false;
                continue;
            }
            let alphabet = alphabet
                .as_ref()
                .ok_or_else(|| err("forbidden block before alphabet".to_string()))?;
            let d = dim.ok_or_else(|| err("forbidden block before dim".to_string()))?;
            forbidden.push(parse_pattern_entries(line, alphabet, d, lineno + 1)?);
            continue;
        }
        let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
        match key {
            "dim" => {
                dim = Some(
                    rest.trim()
                        .parse::<usize>()
                        .map_err(|_| err(format!("bad dimension `{rest}`")))?,
                );
            }
            "alphabet" => {
                alphabet = Some(Alphabet::new(
                    rest.split_whitespace().map(|t| t.to_string()).collect(),
                )?);
            }
            "forbidden" => {
                in_forbidden = true;
            }
            "si_gap" => {
                si_gap = Some(
                    rest.trim()
                        .parse::<u32>()
                        .map_err(|_| err(format!("bad si_gap `{rest}`")))?,
                );
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    if in_forbidden {
        return Err(Error::Parse {
            line: 0,
            msg: "forbidden block not closed with `end`".to_string(),
        });
    }
    let dim = dim.ok_or(Error::Parse { line: 0, msg: "missing dim".to_string() })?;
    let alphabet = alphabet.ok_or(Error::Parse { line: 0, msg: "missing alphabet".to_string() })?;
    SftSpec::new(alphabet, dim, forbidden, si_gap)
}

/// Canonical rendering; `parse_sft(print_sft(s)) == s`.
pub fn print_sft(spec: &SftSpec) -> String {
    let mut out = String::new();
    out.push_str(&format!("dim {}\n", spec.dim));
    out.push_str(&format!("alphabet {}\n", spec.alphabet.tokens().join(" ")));
    out.push_str("forbidden\n");
    for p in &spec.forbidden {
        out.push_str(&p.render(&spec.alphabet));
        out.push('\n');
    }
    out.push_str("end\n");
    if let Some(r) = spec.si_gap {
        out.push_str(&format!("si_gap {r}\n"));
    }
    out
}

/// Parse `(site):tok (site):tok ...` into a pattern.
pub fn parse_pattern_entries(
    line: &str,
    alphabet: &Alphabet,
    dim: usize,
    lineno: usize,
) -> Result<Pattern> {
    let mut assignments: HashMap<Site, u32> = HashMap::new();
    for entry in line.split_whitespace() {
        let (site_text, tok) = entry.rsplit_once(':').ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("entry `{entry}` must look like (site):token"),
        })?;
        let site = parse_site(site_text)?;
        if site.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: site.dim() });
        }
        let sym = alphabet.index_of(tok).ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("token `{tok}` not in alphabet"),
        })?;
        if assignments.insert(site, sym).is_some() {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("duplicate site in `{line}`"),
            });
        }
    }
    if assignments.is_empty() {
        return Err(Error::Parse {
            line: lineno,
            msg: "empty pattern line".to_string(),
        });
    }
    let shape = Shape::new(dim, assignments.keys().cloned().collect())?;
    let symbols = shape.iter().map(|s| assignments[s]).collect();
    Pattern::new(shape, symbols)
}

/// Parse a pattern file: a `pattern ...` line resolved against an alphabet,
/// with an optional `dim` header.
pub fn parse_pattern_file(text: &str, alphabet: &Alphabet, dim: usize) -> Result<Pattern> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("dim ") {
            continue;
        }
        let body = line.strip_prefix("pattern ").unwrap_or(line);
        return parse_pattern_entries(body, alphabet, dim, lineno + 1);
    }
    Err(Error::Parse {
        line: 0,
        msg: "no pattern line found".to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::centered_box;
    use crate::samples;

    /// Brute-force oracle: generate every pattern on the shape and filter by
    /// the definition. Only usable while |A|^|shape| stays small.
    fn filter_all_patterns(shape: &Shape, spec: &SftSpec) -> Vec<Pattern> {
        let n = shape.len();
        let a = spec.alphabet.len();
        let total = (a as u64).pow(n as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut symbols = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                symbols.push((c % a as u64) as u32);
                c /= a as u64;
            }
            symbols.reverse();
            let p = Pattern::new(shape.clone(), symbols).unwrap();
            if is_locally_admissible(&p, &spec.forbidden) {
                out.push(p);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn subword_positions_in_words() {
        let w = Pattern::word(&[1, 1], 0);
        let v = Pattern::word(&[0, 1, 1, 0], 0);
        assert!(is_subword_at(&w, &v, &Site(vec![1])).unwrap());
        assert!(!is_subword_at(&w, &v, &Site(vec![0])).unwrap());
        assert!(!is_subword_at(&w, &v, &Site(vec![3])).unwrap());
        assert!(is_subword_at(&v, &v, &Site(vec![0])).unwrap());
    }

    #[test]
    fn subword_dimension_mismatch_is_an_error() {
        let w = Pattern::word(&[1], 0);
        let v = Pattern::new(centered_box(1, 2), vec![0; 9]).unwrap();
        assert!(is_subword_at(&w, &v, &Site(vec![0, 0])).is_err());
    }

    #[test]
    fn local_admissibility_of_golden_mean_words() {
        let spec = samples::golden_mean();
        assert!(is_locally_admissible(
            &Pattern::word(&[0, 1, 0, 1], 0),
            &spec.forbidden
        ));
        assert!(!is_locally_admissible(
            &Pattern::word(&[0, 1, 1, 0], 0),
            &spec.forbidden
        ));
        assert!(is_locally_admissible(&Pattern::word(&[0, 1, 0, 1], 0), &[]));
    }

    #[test]
    fn golden_mean_words_of_length_three() {
        let spec = samples::golden_mean();
        let shape = Shape::new(1, (0..3).map(|i| Site(vec![i])).collect()).unwrap();
        let words = enumerate_locally_admissible(&shape, &spec, 1 << 20).unwrap();
        // Oracle: 8 binary words of length 3, minus the 3 containing "11".
        assert_eq!(words.len(), 5);
        assert_eq!(words, filter_all_patterns(&shape, &spec));
    }

    #[test]
    fn full_shift_enumeration_counts_everything() {
        let spec = samples::full_shift(2, 1);
        let shape = Shape::new(1, (0..4).map(|i| Site(vec![i])).collect()).unwrap();
        let words = enumerate_locally_admissible(&shape, &spec, 1 << 20).unwrap();
        assert_eq!(words.len(), 16);
    }

    #[test]
    fn hard_squares_on_the_unit_square() {
        let spec = samples::hard_squares();
        let shape = Shape::new(
            2,
            vec![
                Site(vec![0, 0]),
                Site(vec![1, 0]),
                Site(vec![0, 1]),
                Site(vec![1, 1]),
            ],
        )
        .unwrap();
        let words = enumerate_locally_admissible(&shape, &spec, 1 << 20).unwrap();
        // Oracle: 16 patterns minus the 9 with an adjacent 1-1 pair.
        assert_eq!(words.len(), 7);
        assert_eq!(words, filter_all_patterns(&shape, &spec));
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let spec = samples::full_shift(2, 1);
        let shape = Shape::new(1, (0..10).map(|i| Site(vec![i])).collect()).unwrap();
        let err = enumerate_locally_admissible(&shape, &spec, 100).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));
    }

    #[test]
    fn enumeration_is_antitone_in_the_forbidden_list() {
        let shape = Shape::new(1, (0..5).map(|i| Site(vec![i])).collect()).unwrap();
        let mut spec = samples::full_shift(2, 1);
        let mut last = enumerate_locally_admissible(&shape, &spec, 1 << 20)
            .unwrap()
            .len();
        for extra in [
            Pattern::word(&[1, 1], 0),
            Pattern::word(&[0, 0, 0], 0),
            Pattern::word(&[1, 0, 1], 0),
        ] {
            spec.forbidden.push(extra);
            let now = enumerate_locally_admissible(&shape, &spec, 1 << 20)
                .unwrap()
                .len();
            assert!(now <= last);
            last = now;
        }
    }

    #[test]
    fn backtracking_matches_filter_oracle_on_mixed_instances() {
        // 2D instance with an asymmetric forbidden pattern.
        let diag = Pattern::new(
            Shape::new(2, vec![Site(vec![0, 0]), Site(vec![1, 1])]).unwrap(),
            vec![1, 0],
        )
        .unwrap();
        let spec = SftSpec::new(Alphabet::numeric(2), 2, vec![diag], None).unwrap();
        let shape = centered_box(1, 2);
        let fast = enumerate_locally_admissible(&shape, &spec, 1 << 20).unwrap();
        assert_eq!(fast, filter_all_patterns(&shape, &spec));

        let spec3 = samples::dead_successor();
        let shape3 = Shape::new(1, (0..6).map(|i| Site(vec![i])).collect()).unwrap();
        let fast3 = enumerate_locally_admissible(&shape3, &spec3, 1 << 20).unwrap();
        assert_eq!(fast3, filter_all_patterns(&shape3, &spec3));
    }

    #[test]
    fn pinned_completion_queries() {
        let spec = samples::dead_successor();
        let shape = Shape::new(1, (0..2).map(|i| Site(vec![i])).collect()).unwrap();
        // "b" at position 0 admits no successor.
        assert!(!exists_admissible_completion(&shape, &[(0, 1)], &spec, 10_000).unwrap());
        // "a" does.
        assert!(exists_admissible_completion(&shape, &[(0, 0)], &spec, 10_000).unwrap());
        // Contradictory pins are unsatisfiable.
        assert!(!exists_admissible_completion(&shape, &[(0, 0), (0, 2)], &spec, 10_000).unwrap());
    }

    #[test]
    fn sft_file_round_trip() {
        for spec in [
            samples::golden_mean(),
            samples::hard_squares(),
            samples::dead_successor(),
            samples::full_shift(3, 2),
        ] {
            let text = print_sft(&spec);
            let parsed = parse_sft(&text).unwrap();
            assert_eq!(parsed, spec);
            // Printing the parse reproduces the text bit for bit.
            assert_eq!(print_sft(&parsed), text);
        }
    }

    #[test]
    fn sft_parse_rejects_malformed_input() {
        assert!(parse_sft("alphabet 0 1\n").is_err());
        assert!(parse_sft("dim 1\n").is_err());
        assert!(parse_sft("dim 1\nalphabet 0 1\nforbidden\n(0):1\n").is_err());
        assert!(parse_sft("dim 1\nalphabet 0 0\nforbidden\nend\n").is_err());
        assert!(parse_sft("dim 1\nalphabet 0 1\nbogus 3\n").is_err());
        assert!(parse_sft("dim 1\nalphabet 0 1\nforbidden\n(0):7\nend\n").is_err());
    }

    #[test]
    fn pattern_file_parsing() {
        let spec = samples::golden_mean();
        let p = parse_pattern_file("dim 1\npattern (0):1 (1):1\n", &spec.alphabet, 1).unwrap();
        assert_eq!(p, Pattern::word(&[1, 1], 0));
        let bare = parse_pattern_file("(0):1 (1):0\n", &spec.alphabet, 1).unwrap();
        assert_eq!(bare, Pattern::word(&[1, 0], 0));
        assert!(parse_pattern_file("\n", &spec.alphabet, 1).is_err());
    }

    #[test]
    fn forbidden_radius_and_interaction_radius() {
        assert_eq!(samples::golden_mean().forbidden_radius(), 1);
        assert_eq!(samples::golden_mean().interaction_radius(), 1);
        assert_eq!(samples::hard_squares().interaction_radius(), 1);
        assert_eq!(samples::full_shift(2, 2).interaction_radius(), 0);
        let wide = SftSpec::new(
            Alphabet::numeric(2),
            1,
            vec![Pattern::word(&[1, 1, 1, 1, 1], 0)],
            None,
        )
        .unwrap();
        assert_eq!(wide.forbidden_radius(), 2);
    }
}

#[cfg(test)]
mod prop_tests {
    use super::*;
    use crate::samples;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn round_trip_random_1d_specs(
            words in proptest::collection::vec(
                proptest::collection::vec(0u32..2, 1..4), 0..4),
            gap in proptest::option::of(0u32..3),
        ) {
            let forbidden = words.iter().map(|w| Pattern::word(w, 0)).collect();
            let spec = SftSpec::new(Alphabet::numeric(2), 1, forbidden, gap).unwrap();
            let parsed = parse_sft(&print_sft(&spec)).unwrap();
            prop_assert_eq!(parsed, spec);
        }

        #[test]
        fn enumeration_matches_oracle_on_random_segments(len in 1usize..8) {
            let spec = samples::golden_mean();
            let shape = Shape::new(1, (0..len as i64).map(|i| Site(vec![i])).collect()).unwrap();
            let fast = enumerate_locally_admissible(&shape, &spec, 1 << 20).unwrap();
            // Fibonacci count: F(len+2).
            let mut fib = (1u64, 2u64);
            for _ in 1..len {
                fib = (fib.1, fib.0 + fib.1);
            }
            prop_assert_eq!(fast.len() as u64, fib.1);
        }
    }
}
