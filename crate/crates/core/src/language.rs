//! Global admissibility for SI SFTs and the extendability sets behind the
//! anytime upper bounds, plus the pluggable language provider the pressure
//! estimators consume.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{centered_box, growth_sites, Shape};
use crate::subshift::{
    enumerate_locally_admissible, exists_admissible_completion, is_locally_admissible, Enumerator,
    ForbiddenEnumeration, Pattern, SftSpec,
};

/// Caps on enumeration work. Every estimator checks these before or while
/// running and refuses with a diagnostic instead of thrashing.
#[derive(Clone, Debug)]
pub struct ResourceBudget {
    /// Largest pattern set any single enumeration may produce.
    pub max_patterns: u64,
    /// Largest number of assignments a depth-first search may try.
    pub max_nodes: u64,
    /// Largest number of column states a transfer recurrence may use.
    pub max_states: u64,
}

impl Default for ResourceBudget {
    fn default() -> Self {
        ResourceBudget {
            max_patterns: 4_000_000,
            max_nodes: 400_000_000,
            max_states: 2_000_000,
        }
    }
}

impl ResourceBudget {
    pub fn tiny() -> Self {
        ResourceBudget {
            max_patterns: 10_000,
            max_nodes: 1_000_000,
            max_states: 10_000,
        }
    }
}

/// An unverified assertion a certificate is conditional on.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Assumption {
    /// The spec's si_gap really witnesses strong irreducibility.
    SiGap,
    /// The user-supplied membership oracle answers exactly.
    UserOracleExact,
    /// Locally admissible patterns on the shapes used are globally
    /// admissible. Holds for full shifts and safe-symbol systems; in general
    /// it is a genuine extra assumption for lower bounds.
    LocalLanguageExact,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Assumption::SiGap => "si_gap",
            Assumption::UserOracleExact => "user_oracle",
            Assumption::LocalLanguageExact => "local_language",
        };
        write!(f, "{name}")
    }
}

/// The canonical nested box sequence for a spec: level m is the centered box
/// of radius m*(r+1), where r is the interaction radius. Consecutive levels
/// then satisfy F_m + [-r,r]^d inside F_(m+1), which the decision procedure
/// needs.
#[derive(Clone, Debug)]
pub struct BoxSequence {
    dim: usize,
    step: u32,
}

impl BoxSequence {
    pub fn for_spec(spec: &SftSpec) -> BoxSequence {
        BoxSequence {
            dim: spec.dim,
            step: spec.interaction_radius() + 1,
        }
    }

    pub fn new(dim: usize, gap_radius: u32) -> BoxSequence {
        BoxSequence { dim, step: gap_radius + 1 }
    }

    pub fn shape(&self, level: u32) -> Shape {
        centered_box(level * self.step, self.dim)
    }

    /// Smallest level whose box contains the shape (level >= 1).
    pub fn level_containing(&self, shape: &Shape) -> Result<u32> {
        let bb = shape.bounding_box().ok_or_else(|| {
            Error::Invalid("cannot place an empty shape in the box sequence".to_string())
        })?;
        let max_abs = (0..bb.dim())
            .flat_map(|i| [bb.lo().0[i].abs(), bb.hi().0[i].abs()])
            .max()
            .unwrap_or(0) as u64;
        let level = max_abs.div_ceil(u64::from(self.step)).max(1);
        Ok(level as u32)
    }

    /// The level whose box is exactly this shape, if any.
    pub fn level_of_exact(&self, shape: &Shape) -> Option<u32> {
        let level = self.level_containing(shape).ok()?;
        if &self.shape(level) == shape {
            Some(level)
        } else {
            None
        }
    }
}

/// Growth-set index and forbidden-prefix length for extendability sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtendabilityParams {
    /// Number of sites of the canonical Z^d enumeration in the growth set.
    pub t: u32,
    /// Number of forbidden words materialized from the enumeration.
    pub n: u32,
}

impl ExtendabilityParams {
    pub fn new(t: u32, n: u32) -> Result<ExtendabilityParams> {
        if t < 1 || n < 1 {
            return Err(Error::Invalid("extendability params must be >= 1".to_string()));
        }
        Ok(ExtendabilityParams { t, n })
    }
}

/// Three-valued answer of the decision procedure. `Undecided` means the
/// level budget ran out; callers must treat it as "do not certify".
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Decision {
    InLanguage,
    NotInLanguage,
    Undecided { level: u32 },
}

/// Is there a locally admissible pattern on b's box agreeing with `a` on its
/// inner box and with `b` on the outermost annulus?
///
/// `a` must live exactly on a lower level of the box sequence than `b`; both
/// must be locally admissible.
pub fn compatible(
    a: &Pattern,
    b: &Pattern,
    spec: &SftSpec,
    boxes: &BoxSequence,
    budget: &ResourceBudget,
) -> Result<bool> {
    let n = boxes.level_of_exact(a.domain()).ok_or_else(|| {
        Error::Invalid("pattern `a` must live on a box-sequence level".to_string())
    })?;
    let cap = boxes.level_of_exact(b.domain()).ok_or_else(|| {
        Error::Invalid("pattern `b` must live on a box-sequence level".to_string())
    })?;
    if cap <= n {
        return Err(Error::Invalid(
            "pattern `b` must live on a strictly larger level than `a`".to_string(),
        ));
    }
    if !is_locally_admissible(a, &spec.forbidden) || !is_locally_admissible(b, &spec.forbidden) {
        return Err(Error::Invalid(
            "compatibility is defined for locally admissible patterns".to_string(),
        ));
    }
    let outer = b.domain();
    let annulus = outer.set_difference(&boxes.shape(cap - 1));
    let mut pins: Vec<(usize, u32)> = Vec::new();
    for (site, sym) in a.domain().iter().zip(a.symbols()) {
        pins.push((outer.index_of(site).expect("inner box inside outer"), *sym));
    }
    for site in annulus.iter() {
        let sym = b.get(site).expect("annulus site inside b's domain");
        pins.push((outer.index_of(site).expect("annulus inside outer"), sym));
    }
    exists_admissible_completion(outer, &pins, spec, budget.max_nodes)
}

/// Decide whether `v` extends to a point of the subshift, assuming the
/// asserted SI gap. Sweeps levels N = n+1, n+2, ... until one of the paper's
/// two stopping conditions fires for every candidate extension of `v`, or
/// the level budget runs out.
pub fn decide_globally_admissible(
    v: &Pattern,
    spec: &SftSpec,
    max_level: u32,
    budget: &ResourceBudget,
) -> Result<Decision> {
    if spec.si_gap.is_none() {
        return Err(Error::MissingSiGap);
    }
    if v.dim() != spec.dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim,
            got: v.dim(),
        });
    }
    if !is_locally_admissible(v, &spec.forbidden) {
        return Ok(Decision::NotInLanguage);
    }
    let boxes = BoxSequence::for_spec(spec);
    let n = boxes.level_containing(v.domain())?;
    let inner = boxes.shape(n);

    // Candidate extensions of v to the inner box.
    let pins: Vec<(usize, u32)> = v
        .domain()
        .iter()
        .zip(v.symbols())
        .map(|(site, sym)| (inner.index_of(site).expect("v inside inner box"), *sym))
        .collect();
    let enumerator = Enumerator::new(&inner, spec.alphabet.len(), &spec.forbidden);
    let mut alive: Vec<Vec<u32>> = Vec::new();
    let mut overflow = false;
    enumerator.walk(&pins, budget.max_nodes, &mut |assignment| {
        if alive.len() as u64 >= budget.max_patterns {
            overflow = true;
            return false;
        }
        alive.push(assignment.to_vec());
        true
    })?;
    if overflow {
        return Err(Error::ResourceLimit {
            what: "candidate extensions",
            needed: format!("> {}", budget.max_patterns),
            budget: budget.max_patterns.to_string(),
        });
    }
    if alive.is_empty() {
        return Ok(Decision::NotInLanguage);
    }

    for level in n + 1..=max_level {
        let outer = boxes.shape(level);
        let prev = boxes.shape(level - 1);
        let inner_indices: Vec<usize> = inner
            .iter()
            .map(|s| outer.index_of(s).expect("nested boxes"))
            .collect();
        let annulus_indices: Vec<usize> = outer
            .set_difference(&prev)
            .iter()
            .map(|s| outer.index_of(s).expect("annulus inside outer"))
            .collect();

        // One sweep over all locally admissible patterns on the outer box
        // serves both stopping conditions: a candidate `a` dies if nothing
        // restricts to it, and is accepted once it pairs with every boundary
        // trace (the witness search collapses to set membership, since the
        // witnesses range over the same enumeration).
        let sweep = Enumerator::new(&outer, spec.alphabet.len(), &spec.forbidden);
        let mut traces: HashSet<Vec<u32>> = HashSet::new();
        let mut by_restriction: HashMap<Vec<u32>, HashSet<Vec<u32>>> = HashMap::new();
        let mut count: u64 = 0;
        let mut overflow = false;
        sweep.walk(&[], budget.max_nodes, &mut |assignment| {
            count += 1;
            if count > budget.max_patterns {
                overflow = true;
                return false;
            }
            let restriction: Vec<u32> =
                inner_indices.iter().map(|i| assignment[*i]).collect();
            let trace: Vec<u32> = annulus_indices.iter().map(|i| assignment[*i]).collect();
            traces.insert(trace.clone());
            by_restriction.entry(restriction).or_default().insert(trace);
            true
        })?;
        if overflow {
            return Err(Error::ResourceLimit {
                what: "level sweep patterns",
                needed: format!("> {}", budget.max_patterns),
                budget: budget.max_patterns.to_string(),
            });
        }

        // Condition (i) first: it also covers the vacuous case where the
        // outer box admits nothing at all (the subshift is empty).
        alive.retain(|a| by_restriction.contains_key(a));
        if alive.is_empty() {
            return Ok(Decision::NotInLanguage);
        }
        let total = traces.len();
        if alive
            .iter()
            .any(|a| by_restriction.get(a).map_or(false, |set| set.len() == total))
        {
            return Ok(Decision::InLanguage);
        }
    }
    Ok(Decision::Undecided { level: max_level })
}

/// The extendability set on `shape`: patterns locally admissible for the
/// first `params.n` forbidden words that extend admissibly to the shape
/// thickened by the growth set G_t. Supersets of the language, antitone in
/// both parameters.
pub fn extendable_set(
    shape: &Shape,
    params: ExtendabilityParams,
    enumeration: &ForbiddenEnumeration,
    budget: &ResourceBudget,
) -> Result<Vec<Pattern>> {
    if shape.is_empty() {
        return Err(Error::Invalid("extendable_set needs a nonempty shape".to_string()));
    }
    let spec_n = SftSpec::new(
        enumeration.alphabet().clone(),
        enumeration.dim(),
        enumeration.prefix(params.n as usize).to_vec(),
        None,
    )?;
    let growth = growth_sites(enumeration.dim(), params.t as usize);
    let thickened = shape.minkowski_sum(&growth)?;
    let shape_indices: Vec<usize> = shape
        .iter()
        .map(|s| thickened.index_of(s).expect("g_1 = origin keeps shape inside"))
        .collect();

    let candidates = enumerate_locally_admissible(shape, &spec_n, budget.max_patterns)?;
    let mut out = Vec::new();
    for w in candidates {
        let pins: Vec<(usize, u32)> = shape_indices
            .iter()
            .zip(w.symbols())
            .map(|(i, s)| (*i, *s))
            .collect();
        if exists_admissible_completion(&thickened, &pins, &spec_n, budget.max_nodes)? {
            out.push(w);
        }
    }
    Ok(out)
}

/// Where language membership answers come from, and what trusting them
/// costs. The provider kind is recorded in every certificate it feeds.
#[derive(Clone)]
pub enum LanguageProvider {
    /// No constraints; every pattern over the alphabet is a member.
    FullShift,
    /// Local admissibility only: true on a superset of the language.
    LocalOverapprox,
    /// The decision procedure, exact conditional on the si_gap assertion.
    ExactSi { max_level: u32 },
    /// An external membership oracle asserted to be exact.
    UserOracle(Arc<dyn Fn(&Pattern) -> Result<bool> + Send + Sync>),
}

impl fmt::Debug for LanguageProvider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LanguageProvider::FullShift => write!(f, "FullShift"),
            LanguageProvider::LocalOverapprox => write!(f, "LocalOverapprox"),
            LanguageProvider::ExactSi { max_level } => {
                write!(f, "ExactSi {{ max_level: {max_level} }}")
            }
            LanguageProvider::UserOracle(_) => write!(f, "UserOracle(..)"),
        }
    }
}

impl LanguageProvider {
    pub fn kind_name(&self) -> &'static str {
        match self {
            LanguageProvider::FullShift => "full_shift",
            LanguageProvider::LocalOverapprox => "local_overapprox",
            LanguageProvider::ExactSi { .. } => "exact_si",
            LanguageProvider::UserOracle(_) => "user_oracle",
        }
    }

    /// True when membership answers may include non-language patterns.
    pub fn over_approximates(&self) -> bool {
        matches!(self, LanguageProvider::LocalOverapprox)
    }

    /// Assumptions a certificate inherits from trusting this provider for
    /// exact membership (upper bounds need none of these).
    pub fn exactness_assumptions(&self, spec: &SftSpec) -> BTreeSet<Assumption> {
        let mut set = BTreeSet::new();
        match self {
            LanguageProvider::FullShift => {}
            LanguageProvider::LocalOverapprox => {
                if !spec.is_full_shift() {
                    set.insert(Assumption::SiGap);
                    set.insert(Assumption::LocalLanguageExact);
                }
            }
            LanguageProvider::ExactSi { .. } => {
                set.insert(Assumption::SiGap);
            }
            LanguageProvider::UserOracle(_) => {
                set.insert(Assumption::UserOracleExact);
            }
        }
        set
    }

    /// Membership of `v` in the language this provider answers for.
    pub fn is_member(
        &self,
        v: &Pattern,
        spec: &SftSpec,
        budget: &ResourceBudget,
    ) -> Result<bool> {
        match self {
            LanguageProvider::FullShift => Ok(true),
            LanguageProvider::LocalOverapprox => {
                Ok(is_locally_admissible(v, &spec.forbidden))
            }
            LanguageProvider::ExactSi { max_level } => {
                match decide_globally_admissible(v, spec, *max_level, budget)? {
                    Decision::InLanguage => Ok(true),
                    Decision::NotInLanguage => Ok(false),
                    Decision::Undecided { level } => Err(Error::Undecided { level }),
                }
            }
            LanguageProvider::UserOracle(oracle) => oracle(v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use crate::subshift::Alphabet;

    fn budget() -> ResourceBudget {
        ResourceBudget::default()
    }

    /// Brute-force compatibility: enumerate every locally admissible pattern
    /// on b's box and look for a witness by the definition.
    fn compatible_oracle(a: &Pattern, b: &Pattern, spec: &SftSpec, boxes: &BoxSequence) -> bool {
        let cap = boxes.level_of_exact(b.domain()).unwrap();
        let outer = b.domain().clone();
        let annulus = outer.set_difference(&boxes.shape(cap - 1));
        let all = enumerate_locally_admissible(&outer, spec, 1 << 22).unwrap();
        all.iter().any(|c| {
            a.domain()
                .iter()
                .all(|s| c.get(s) == a.get(s))
                && annulus.iter().all(|s| c.get(s) == b.get(s))
        })
    }

    #[test]
    fn box_sequence_levels() {
        let spec = samples::golden_mean();
        let boxes = BoxSequence::for_spec(&spec);
        assert_eq!(boxes.shape(1), centered_box(2, 1));
        assert_eq!(boxes.shape(2), centered_box(4, 1));
        let word = Pattern::word(&[1, 0, 1], 0);
        assert_eq!(boxes.level_containing(word.domain()).unwrap(), 1);
        let wide = Pattern::word(&[0; 7], -3);
        assert_eq!(boxes.level_containing(wide.domain()).unwrap(), 2);
        assert_eq!(boxes.level_of_exact(&centered_box(2, 1)), Some(1));
        assert_eq!(boxes.level_of_exact(&centered_box(3, 1)), None);
    }

    #[test]
    fn compatibility_matches_brute_force_on_golden_mean() {
        let spec = samples::golden_mean();
        let boxes = BoxSequence::for_spec(&spec);
        let inner = boxes.shape(1);
        let outer = boxes.shape(2);
        let inner_patterns = enumerate_locally_admissible(&inner, &spec, 1 << 20).unwrap();
        let outer_patterns = enumerate_locally_admissible(&outer, &spec, 1 << 20).unwrap();
        // Spot-check the full a x b grid on a subsample to keep this quick.
        for a in inner_patterns.iter().step_by(3) {
            for b in outer_patterns.iter().step_by(17) {
                let fast = compatible(a, b, &spec, &boxes, &budget()).unwrap();
                let slow = compatible_oracle(a, b, &spec, &boxes);
                assert_eq!(fast, slow, "a={a:?} b={b:?}");
            }
        }
    }

    #[test]
    fn pattern_is_compatible_with_itself_via_identity_witness() {
        let spec = samples::golden_mean();
        let boxes = BoxSequence::for_spec(&spec);
        let outer = boxes.shape(2);
        let b = enumerate_locally_admissible(&outer, &spec, 1 << 20)
            .unwrap()
            .into_iter()
            .next()
            .unwrap();
        let a = b.restrict(&boxes.shape(1)).unwrap();
        assert!(compatible(&a, &b, &spec, &boxes, &budget()).unwrap());
    }

    #[test]
    fn dead_successor_blocks_compatibility() {
        // A pattern with b at the right edge of the inner box can never be
        // completed: the site after b admits no symbol.
        let spec = samples::dead_successor();
        let boxes = BoxSequence::for_spec(&spec);
        let inner = boxes.shape(1); // [-2, 2]
        let a = Pattern::new(inner.clone(), vec![0, 0, 0, 0, 1]).unwrap();
        assert!(is_locally_admissible(&a, &spec.forbidden));
        let outer_patterns =
            enumerate_locally_admissible(&boxes.shape(2), &spec, 1 << 20).unwrap();
        assert!(!outer_patterns.is_empty());
        for b in &outer_patterns {
            assert!(!compatible(&a, b, &spec, &boxes, &budget()).unwrap());
        }
    }

    #[test]
    fn decide_golden_mean_examples() {
        let spec = samples::golden_mean();
        assert_eq!(
            decide_globally_admissible(&Pattern::word(&[1, 0, 1], 0), &spec, 6, &budget())
                .unwrap(),
            Decision::InLanguage
        );
        assert_eq!(
            decide_globally_admissible(&Pattern::word(&[1, 1], 0), &spec, 6, &budget()).unwrap(),
            Decision::NotInLanguage
        );
        assert_eq!(
            decide_globally_admissible(&Pattern::word(&[0, 1, 0, 1, 0], -2), &spec, 6, &budget())
                .unwrap(),
            Decision::InLanguage
        );
    }

    #[test]
    fn decide_dead_successor_rejects_b() {
        let spec = samples::dead_successor();
        let b_word = Pattern::word(&[1], 0);
        assert_eq!(
            decide_globally_admissible(&b_word, &spec, 6, &budget()).unwrap(),
            Decision::NotInLanguage
        );
        let a_word = Pattern::word(&[0], 0);
        assert_eq!(
            decide_globally_admissible(&a_word, &spec, 6, &budget()).unwrap(),
            Decision::InLanguage
        );
        let ac = Pattern::word(&[0, 2, 0, 2], 0);
        assert_eq!(
            decide_globally_admissible(&ac, &spec, 6, &budget()).unwrap(),
            Decision::InLanguage
        );
    }

    #[test]
    fn decide_requires_si_gap() {
        let mut spec = samples::golden_mean();
        spec.si_gap = None;
        assert!(matches!(
            decide_globally_admissible(&Pattern::word(&[0], 0), &spec, 4, &budget()),
            Err(Error::MissingSiGap)
        ));
    }

    #[test]
    fn decide_empty_sft_says_not_in_language() {
        // Forbid both symbols at a single site: no configuration exists.
        let forbidden = vec![Pattern::word(&[0], 0), Pattern::word(&[1], 0)];
        let spec = SftSpec::new(Alphabet::numeric(2), 1, forbidden, Some(1)).unwrap();
        // Any single-site pattern is already locally inadmissible.
        assert_eq!(
            decide_globally_admissible(&Pattern::word(&[0], 0), &spec, 4, &budget()).unwrap(),
            Decision::NotInLanguage
        );
        // Forbid 00,01,10,11: single symbols are locally admissible but no
        // pair is, so the first level sweep kills every candidate.
        let forbidden2 = (0..2u32)
            .flat_map(|x| (0..2u32).map(move |y| Pattern::word(&[x, y], 0)))
            .collect();
        let spec2 = SftSpec::new(Alphabet::numeric(2), 1, forbidden2, Some(1)).unwrap();
        assert_eq!(
            decide_globally_admissible(&Pattern::word(&[0], 0), &spec2, 4, &budget()).unwrap(),
            Decision::NotInLanguage
        );
    }

    #[test]
    fn undecided_when_level_budget_is_too_small() {
        // max_level equal to the starting level leaves no sweep to run.
        let spec = samples::golden_mean();
        let v = Pattern::word(&[1, 0, 1], 0);
        assert_eq!(
            decide_globally_admissible(&v, &spec, 1, &budget()).unwrap(),
            Decision::Undecided { level: 1 }
        );
    }

    #[test]
    fn extendable_set_golden_mean_single_site() {
        let spec = samples::golden_mean();
        let enumeration = ForbiddenEnumeration::from_spec(&spec);
        let f = Shape::origin(1);
        // t = 2, n = 1: both symbols extend ("1" extends as "10").
        let set = extendable_set(
            &f,
            ExtendabilityParams::new(2, 1).unwrap(),
            &enumeration,
            &budget(),
        )
        .unwrap();
        assert_eq!(set.len(), 2);
        // t = 1: growth set is the origin, so the extendable set is all of
        // LA_f.
        let set1 = extendable_set(
            &f,
            ExtendabilityParams::new(1, 1).unwrap(),
            &enumeration,
            &budget(),
        )
        .unwrap();
        let la = enumerate_locally_admissible(&f, &spec, 1 << 20).unwrap();
        assert_eq!(set1, la);
    }

    #[test]
    fn extendable_set_sees_dead_successor() {
        let spec = samples::dead_successor();
        let enumeration = ForbiddenEnumeration::from_spec(&spec);
        let f = Shape::origin(1);
        // Big enough growth set to include site +1 (spiral order: 0, -1, 1).
        let set = extendable_set(
            &f,
            ExtendabilityParams::new(3, 3).unwrap(),
            &enumeration,
            &budget(),
        )
        .unwrap();
        let symbols: Vec<u32> = set.iter().map(|p| p.symbols()[0]).collect();
        assert_eq!(symbols, vec![0, 2]); // a and c survive, b does not
    }

    #[test]
    fn extendable_set_is_antitone_in_t_and_n() {
        let spec = samples::dead_successor();
        let enumeration = ForbiddenEnumeration::from_spec(&spec);
        let f = Shape::new(1, (0..2).map(|i| crate::lattice::Site(vec![i])).collect()).unwrap();
        let mut sizes = Vec::new();
        for t in 1..=4u32 {
            for n in 1..=3u32 {
                let set = extendable_set(
                    &f,
                    ExtendabilityParams::new(t, n).unwrap(),
                    &enumeration,
                    &budget(),
                )
                .unwrap();
                sizes.push(((t, n), set));
            }
        }
        for ((t1, n1), s1) in &sizes {
            for ((t2, n2), s2) in &sizes {
                if t2 >= t1 && n2 >= n1 {
                    // Larger parameters give a subset.
                    assert!(
                        s2.iter().all(|p| s1.contains(p)),
                        "E(t={t2},n={n2}) not inside E(t={t1},n={n1})"
                    );
                }
            }
        }
    }

    #[test]
    fn language_is_inside_every_extendable_set() {
        let spec = samples::golden_mean();
        let enumeration = ForbiddenEnumeration::from_spec(&spec);
        let f = Shape::new(1, (0..3).map(|i| crate::lattice::Site(vec![i])).collect()).unwrap();
        let provider = LanguageProvider::ExactSi { max_level: 8 };
        let la = enumerate_locally_admissible(&f, &spec, 1 << 20).unwrap();
        let members: Vec<Pattern> = la
            .into_iter()
            .filter(|p| provider.is_member(p, &spec, &budget()).unwrap())
            .collect();
        for t in 1..=3u32 {
            for n in 1..=2u32 {
                let set = extendable_set(
                    &f,
                    ExtendabilityParams::new(t, n).unwrap(),
                    &enumeration,
                    &budget(),
                )
                .unwrap();
                for m in &members {
                    assert!(set.contains(m));
                }
            }
        }
    }

    #[test]
    fn providers_answer_and_declare_assumptions() {
        let spec = samples::golden_mean();
        let v_in = Pattern::word(&[1, 0, 1], 0);
        let v_out = Pattern::word(&[1, 1], 0);

        let full = LanguageProvider::FullShift;
        assert!(full.is_member(&v_out, &samples::full_shift(2, 1), &budget()).unwrap());
        assert!(full
            .exactness_assumptions(&samples::full_shift(2, 1))
            .is_empty());

        let local = LanguageProvider::LocalOverapprox;
        assert!(local.is_member(&v_in, &spec, &budget()).unwrap());
        assert!(!local.is_member(&v_out, &spec, &budget()).unwrap());
        assert!(local.over_approximates());
        let assumptions = local.exactness_assumptions(&spec);
        assert!(assumptions.contains(&Assumption::SiGap));
        assert!(assumptions.contains(&Assumption::LocalLanguageExact));

        let exact = LanguageProvider::ExactSi { max_level: 6 };
        assert!(exact.is_member(&v_in, &spec, &budget()).unwrap());
        assert!(!exact.is_member(&v_out, &spec, &budget()).unwrap());
        assert_eq!(
            exact.exactness_assumptions(&spec).into_iter().collect::<Vec<_>>(),
            vec![Assumption::SiGap]
        );

        let oracle = LanguageProvider::UserOracle(Arc::new(|_p: &Pattern| Ok(true)));
        assert!(oracle.is_member(&v_out, &spec, &budget()).unwrap());
        assert!(oracle
            .exactness_assumptions(&spec)
            .contains(&Assumption::UserOracleExact));
    }

    #[test]
    fn exact_si_surfaces_undecided_as_an_error() {
        let spec = samples::golden_mean();
        let provider = LanguageProvider::ExactSi { max_level: 1 };
        let v = Pattern::word(&[1, 0, 1], 0);
        assert!(matches!(
            provider.is_member(&v, &spec, &budget()),
            Err(Error::Undecided { level: 1 })
        ));
    }
}
