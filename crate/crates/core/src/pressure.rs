//! Partition functions, the infimum-rule upper bound, the certified
//! two-sided pressure estimator, and the anytime upper sequence.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::language::{
    extendable_set, Assumption, ExtendabilityParams, LanguageProvider, ResourceBudget,
};
use crate::lattice::{LatticeBox, Shape, Site};
use crate::potential::{LocallyConstantPotential, PotentialOracle};
use crate::rigor::{exp_rational, ln_integer, ln_interval, Dyadic, DyadicInterval, RoundDir};
use crate::subshift::{enumerate_locally_admissible, ForbiddenEnumeration, Pattern, SftSpec};
use crate::transfer::{higher_block_recode, ColumnTransferMatrix, RecodedSystem};

/// How an estimate was produced.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Method {
    BoxSandwich,
    TransferMatrix,
    PerronRoot1d,
    UpperOnly,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Method::BoxSandwich => "sandwich",
            Method::TransferMatrix => "transfer",
            Method::PerronRoot1d => "perron1d",
            Method::UpperOnly => "upper_only",
        };
        write!(f, "{name}")
    }
}

/// Parameters an estimate was run with, for reporting and reproduction.
#[derive(Clone, Debug, Default)]
pub struct MethodParams {
    pub eta: Option<BigRational>,
    pub m_param: Option<u64>,
    pub gap_radius: Option<u32>,
    pub precision_bits: Option<u32>,
    pub precision_k: Option<u32>,
    pub power: Option<u64>,
    pub beta: Option<BigRational>,
}

impl MethodParams {
    /// `key=value` pairs for the report header.
    pub fn report_lines(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        if let Some(eta) = &self.eta {
            out.push(("eta".to_string(), format!("{}/{}", eta.numer(), eta.denom())));
        }
        if let Some(m) = self.m_param {
            out.push(("m_param".to_string(), m.to_string()));
        }
        if let Some(g) = self.gap_radius {
            out.push(("gap_radius".to_string(), g.to_string()));
        }
        if let Some(p) = self.precision_bits {
            out.push(("precision_bits".to_string(), p.to_string()));
        }
        if let Some(k) = self.precision_k {
            out.push(("precision_k".to_string(), k.to_string()));
        }
        if let Some(p) = self.power {
            out.push(("power".to_string(), p.to_string()));
        }
        if let Some(b) = &self.beta {
            out.push(("beta".to_string(), format!("{}/{}", b.numer(), b.denom())));
        }
        out
    }
}

/// The value part of a certified estimate.
#[derive(Clone, Debug)]
pub enum PressureValue {
    /// Two-sided enclosure of the target real.
    Enclosure(DyadicInterval),
    /// Only the upper endpoint is certified.
    UpperOnly(Dyadic),
    /// No admissible pattern on the shapes used: the pressure is -infinity.
    EmptySubshift,
}

impl PressureValue {
    pub fn upper(&self) -> Option<&Dyadic> {
        match self {
            PressureValue::Enclosure(iv) => Some(iv.hi()),
            PressureValue::UpperOnly(hi) => Some(hi),
            PressureValue::EmptySubshift => None,
        }
    }

    pub fn enclosure(&self) -> Option<&DyadicInterval> {
        match self {
            PressureValue::Enclosure(iv) => Some(iv),
            _ => None,
        }
    }
}

impl fmt::Display for PressureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PressureValue::Enclosure(iv) => write!(f, "{iv}"),
            PressureValue::UpperOnly(hi) => {
                write!(f, "-inf < x <= {}", hi.to_decimal(15, RoundDir::Up))
            }
            PressureValue::EmptySubshift => write!(f, "empty subshift (pressure -inf)"),
        }
    }
}

/// An interval answer together with how it was obtained and which
/// unverified assertions it is conditional on. An empty assumption set
/// means the enclosure is unconditional.
#[derive(Clone, Debug)]
pub struct CertifiedEstimate {
    pub value: PressureValue,
    pub method: Method,
    pub params: MethodParams,
    pub conditional_on: BTreeSet<Assumption>,
}

impl CertifiedEstimate {
    pub fn assumptions_string(&self) -> String {
        if self.conditional_on.is_empty() {
            "none".to_string()
        } else {
            self.conditional_on
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }
}

/// Partition value plus its trust level.
#[derive(Clone, Debug)]
pub struct PartitionValue {
    pub value: DyadicInterval,
    /// True when the provider over-approximates the language, making the
    /// value an upper bound of the true partition function.
    pub upper_bound_only: bool,
    pub member_count: u64,
}

/// The partition function over a shape: the sum over language members of
/// the exponential of the largest ergodic sum among their admissible
/// extensions to the potential-thickened shape. Single-site potentials need
/// no extension step.
pub fn partition_function(
    shape: &Shape,
    spec: &SftSpec,
    pot: &LocallyConstantPotential,
    lang: &LanguageProvider,
    prec: u32,
    budget: &ResourceBudget,
) -> Result<PartitionValue> {
    if shape.is_empty() {
        return Err(Error::Invalid("partition function needs a nonempty shape".to_string()));
    }
    let members: Vec<Pattern> = enumerate_locally_admissible(shape, spec, budget.max_patterns)?
        .into_iter()
        .filter_map(|p| match lang.is_member(&p, spec, budget) {
            Ok(true) => Some(Ok(p)),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<Vec<_>>>()?;

    let mut total = DyadicInterval::zero(prec);
    let mut count = 0u64;
    if pot.is_single_site() {
        let values = pot.single_site_values()?;
        for w in &members {
            let sum: BigRational = w.symbols().iter().map(|s| values[*s as usize].clone()).sum();
            total = total.add(&exp_rational(&sum, prec));
            count += 1;
        }
    } else {
        let thickened = pot.window().minkowski_sum(shape)?;
        for w in &members {
            let pins: Vec<(usize, u32)> = w
                .domain()
                .iter()
                .zip(w.symbols())
                .map(|(site, sym)| {
                    (thickened.index_of(site).expect("shape inside thickening"), *sym)
                })
                .collect();
            let extensions = enumerate_with_pins(&thickened, &pins, spec, budget)?
                .into_iter()
                .filter_map(|v| match lang.is_member(&v, spec, budget) {
                    Ok(true) => Some(Ok(v)),
                    Ok(false) => None,
                    Err(e) => Some(Err(e)),
                })
                .collect::<Result<Vec<_>>>()?;
            let mut best: Option<BigRational> = None;
            for v in &extensions {
                let s = pot.ergodic_sum(v, shape)?;
                best = Some(match best {
                    Some(cur) => cur.max(s),
                    None => s,
                });
            }
            // A member with no admissible extension cannot be a language
            // pattern; dropping it keeps the upper-bound reading sound.
            if let Some(s) = best {
                total = total.add(&exp_rational(&s, prec));
                count += 1;
            }
        }
    }
    Ok(PartitionValue {
        value: total,
        upper_bound_only: lang.over_approximates(),
        member_count: count,
    })
}

fn enumerate_with_pins(
    shape: &Shape,
    pins: &[(usize, u32)],
    spec: &SftSpec,
    budget: &ResourceBudget,
) -> Result<Vec<Pattern>> {
    let enumerator =
        crate::subshift::Enumerator::new(shape, spec.alphabet.len(), &spec.forbidden);
    let mut out = Vec::new();
    let mut overflow = false;
    enumerator.walk(pins, budget.max_nodes, &mut |assignment| {
        if out.len() as u64 >= budget.max_patterns {
            overflow = true;
            return false;
        }
        out.push(Pattern::new(shape.clone(), assignment.to_vec()).expect("lengths match"));
        true
    })?;
    if overflow {
        return Err(Error::ResourceLimit {
            what: "pattern extensions",
            needed: format!("> {}", budget.max_patterns),
            budget: budget.max_patterns.to_string(),
        });
    }
    Ok(out)
}

/// The (t, n)-modified partition function: extendability sets stand in for
/// the language, so the value dominates the true partition function and is
/// antitone in both parameters.
pub fn modified_partition_function(
    shape: &Shape,
    params: ExtendabilityParams,
    enumeration: &ForbiddenEnumeration,
    pot: &LocallyConstantPotential,
    prec: u32,
    budget: &ResourceBudget,
) -> Result<DyadicInterval> {
    if shape.is_empty() {
        return Err(Error::Invalid("modified partition needs a nonempty shape".to_string()));
    }
    let mut total = DyadicInterval::zero(prec);
    if pot.is_single_site() {
        let values = pot.single_site_values()?;
        for w in extendable_set(shape, params, enumeration, budget)? {
            let sum: BigRational = w.symbols().iter().map(|s| values[*s as usize].clone()).sum();
            total = total.add(&exp_rational(&sum, prec));
        }
        return Ok(total);
    }
    let members = extendable_set(shape, params, enumeration, budget)?;
    let member_set: BTreeSet<&Pattern> = members.iter().collect();
    let thickened = pot.window().minkowski_sum(shape)?;
    let extended = extendable_set(&thickened, params, enumeration, budget)?;
    // Group the extended patterns by their restriction and take the largest
    // ergodic sum within each group.
    let mut best: BTreeMap<Pattern, BigRational> = BTreeMap::new();
    for v in &extended {
        let w = v.restrict(shape)?;
        if !member_set.contains(&w) {
            continue;
        }
        let s = pot.ergodic_sum(v, shape)?;
        best.entry(w)
            .and_modify(|cur| {
                if s > *cur {
                    *cur = s.clone();
                }
            })
            .or_insert(s);
    }
    for sum in best.values() {
        total = total.add(&exp_rational(sum, prec));
    }
    Ok(total)
}

/// The infimum rule: (1/|shape|) log Z is an upper bound on the pressure
/// for every nonempty shape. Over-approximating providers only push the
/// bound up, so this is sound unconditionally.
pub fn upper_bound_from_shape(
    shape: &Shape,
    spec: &SftSpec,
    pot: &LocallyConstantPotential,
    lang: &LanguageProvider,
    prec: u32,
    budget: &ResourceBudget,
) -> Result<CertifiedEstimate> {
    let z = partition_function(shape, spec, pot, lang, prec, budget)?;
    if z.member_count == 0 {
        return Ok(CertifiedEstimate {
            value: PressureValue::EmptySubshift,
            method: Method::UpperOnly,
            params: MethodParams {
                precision_bits: Some(prec),
                ..MethodParams::default()
            },
            conditional_on: BTreeSet::new(),
        });
    }
    let log = ln_interval(&z.value, prec)?;
    let hi = log
        .hi()
        .div_dir(&Dyadic::from_integer(shape.len() as u64), prec, RoundDir::Up);
    Ok(CertifiedEstimate {
        value: PressureValue::UpperOnly(hi),
        method: Method::UpperOnly,
        params: MethodParams {
            precision_bits: Some(prec),
            ..MethodParams::default()
        },
        conditional_on: BTreeSet::new(),
    })
}

/// Largest dyadic eta in (0, 1) meeting the precision inequalities for a
/// target width of 2^-k:
///
/// - the tiling-loss form 1/(1 - eta/2) - (1 - eta) < T, which keeps the
///   general quasitiling accounting valid, and
/// - the exact-box form 2 eta - eta^2 < T, which bounds the realized
///   sandwich width for the interior ratio the chosen box actually has,
///
/// where T = 2^-k / (log(symbols) + sup_norm). The closed form
/// eta = 2^-(k+1) / (3 log(symbols) + 3 sup + 2^-k) satisfies both but is
/// far smaller, and the box radius grows like 1/eta.
pub(crate) fn choose_eta(
    k: u32,
    symbol_count: u64,
    sup_norm: &BigRational,
    prec: u32,
) -> Result<BigRational> {
    let log_a_hi = ln_integer(symbol_count.max(2), prec)?.hi().to_rational();
    let target = BigRational::new(BigInt::one(), BigInt::from(2u8).pow(k)) / (log_a_hi + sup_norm);
    let two = BigRational::from_integer(BigInt::from(2));
    let one = BigRational::one();
    let satisfies = |eta: &BigRational| -> bool {
        let tiling = &one / (&one - eta / &two) - (&one - eta);
        let boxed = &two * eta - eta * eta;
        tiling < target && boxed < target
    };
    let mut lo = BigRational::zero();
    let mut hi = BigRational::one();
    for _ in 0..40 {
        let mid = (&lo + &hi) / &two;
        if satisfies(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo.is_zero() {
        return Err(Error::Invalid("no admissible eta found".to_string()));
    }
    debug_assert!(satisfies(&lo));
    Ok(lo)
}

fn ceil_rational(q: &BigRational) -> BigInt {
    q.ceil().to_integer()
}

/// Log of a partition value over a box, with the trust metadata the
/// certified estimators need.
pub(crate) struct BoxLog {
    pub log_z: DyadicInterval,
    pub assumptions: BTreeSet<Assumption>,
}

/// A system prepared for box evaluation: single-site values over either the
/// original symbols (nearest-neighbor specs) or recoded blocks.
pub(crate) struct WorkingSystem {
    spec: SftSpec,
    engine: Engine,
    /// Gap radius of the working system's SI box.
    pub gap: u32,
    /// Symbol count entering the eta accounting.
    pub symbol_count: u64,
}

enum Engine {
    /// Original symbols; forbidden boxes span at most two columns.
    Direct { values: Vec<BigRational> },
    /// Block symbols of a recoded system.
    Recoded(RecodedSystem),
}

impl WorkingSystem {
    /// `pot` must already be normalized (nonnegative values).
    pub fn prepare(
        spec: &SftSpec,
        pot: &LocallyConstantPotential,
        budget: &ResourceBudget,
    ) -> Result<WorkingSystem> {
        let dim = spec.dim;
        let nn_1d = dim == 1
            && spec.forbidden.iter().all(|f| {
                f.domain().bounding_box().expect("nonempty").side(0) <= 2
            });
        let nn_2d = dim == 2
            && spec.forbidden.iter().all(|f| {
                f.domain().bounding_box().expect("nonempty").side(0) <= 2
            });
        let direct_ok = pot.is_single_site() && (nn_1d || nn_2d || dim == 3);
        if direct_ok {
            let values = pot.single_site_values()?;
            Ok(WorkingSystem {
                spec: spec.clone(),
                engine: Engine::Direct { values },
                gap: spec.interaction_radius(),
                symbol_count: u64::from(spec.alphabet.len()),
            })
        } else {
            let rs = higher_block_recode(spec, pot, budget)?;
            let gap = rs.gap_radius();
            let symbol_count = rs.block_count() as u64;
            Ok(WorkingSystem {
                spec: spec.clone(),
                engine: Engine::Recoded(rs),
                gap,
                symbol_count,
            })
        }
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    /// Rough cost of evaluating a box of the given side: the column state
    /// space for two dimensions, the enumeration leaf count for three.
    pub fn projected_cost(&self, side: u64) -> f64 {
        let cells = match &self.engine {
            Engine::Direct { .. } => u64::from(self.spec.alphabet.len()),
            Engine::Recoded(rs) => rs.block_count() as u64,
        };
        match self.dim() {
            1 => cells as f64,
            2 => (cells as f64).powf(side as f64),
            _ => (cells as f64).powf((side * side * side) as f64),
        }
    }

    /// log Z over a box with `side` sites per axis, where Z counts locally
    /// admissible patterns of the working system weighted by the potential.
    /// The assumptions record what trusting the value as the language
    /// partition function costs.
    pub fn box_log_z(
        &self,
        side: u64,
        lang: &LanguageProvider,
        prec: u32,
        budget: &ResourceBudget,
    ) -> Result<BoxLog> {
        match lang {
            LanguageProvider::FullShift | LanguageProvider::LocalOverapprox => {}
            _ => {
                return Err(Error::Invalid(
                    "box contraction runs on the full-shift or local providers; use \
                     partition_function for oracle-filtered sums"
                        .to_string(),
                ))
            }
        }
        let z = match (&self.engine, self.dim()) {
            (Engine::Direct { values }, 1) => {
                let ctm =
                    ColumnTransferMatrix::from_nn_spec_1d(&self.spec, values, budget)?;
                ctm.grid_partition(side, prec)
            }
            (Engine::Recoded(rs), 1) => {
                let ctm = ColumnTransferMatrix::from_recoded_1d(rs, budget)?;
                ctm.grid_partition(side, prec)
            }
            (Engine::Recoded(rs), 2) => {
                let ctm = ColumnTransferMatrix::from_recoded(rs, side as u32, budget)?;
                ctm.grid_partition(side, prec)
            }
            (Engine::Direct { values }, 2) => {
                let ctm = ColumnTransferMatrix::from_nn_spec(
                    &self.spec,
                    values,
                    side as u32,
                    budget,
                )?;
                ctm.grid_partition(side, prec)
            }
            (Engine::Direct { values }, 3) => {
                direct_box_sum(&self.spec, values, side, prec, budget)?
            }
            (Engine::Recoded(_), 3) => {
                return Err(Error::Invalid(
                    "three-dimensional boxes need a single-site potential".to_string(),
                ))
            }
            (Engine::Recoded(_), d) | (Engine::Direct { .. }, d) => {
                return Err(Error::Invalid(format!(
                    "box method supports dimensions 1..3, got {d}"
                )))
            }
        };
        if !z.hi().is_positive() {
            return Err(Error::EmptySubshift);
        }
        if !z.lo().is_positive() {
            return Err(Error::ResourceLimit {
                what: "partition enclosure precision",
                needed: "a positive lower bound".to_string(),
                budget: prec.to_string(),
            });
        }
        let mut assumptions = lang.exactness_assumptions(&self.spec);
        if self.spec.is_full_shift() {
            assumptions.clear();
        }
        Ok(BoxLog {
            log_z: ln_interval(&z, prec)?,
            assumptions,
        })
    }
}

/// Weighted enumeration of locally admissible patterns on a d-dimensional
/// box (d = 3 path; also the brute-force oracle for the contractions).
fn direct_box_sum(
    spec: &SftSpec,
    values: &[BigRational],
    side: u64,
    prec: u32,
    budget: &ResourceBudget,
) -> Result<DyadicInterval> {
    let dim = spec.dim;
    let shape = LatticeBox::new(
        Site(vec![0; dim]),
        Site(vec![side as i64 - 1; dim]),
    )?
    .to_shape();
    let enumerator =
        crate::subshift::Enumerator::new(&shape, spec.alphabet.len(), &spec.forbidden);
    let mut sums: BTreeMap<BigRational, u64> = BTreeMap::new();
    enumerator.walk(&[], budget.max_nodes, &mut |assignment| {
        let total: BigRational = assignment
            .iter()
            .map(|s| values[*s as usize].clone())
            .sum();
        *sums.entry(total).or_insert(0) += 1;
        true
    })?;
    let mut z = DyadicInterval::zero(prec);
    for (sum, count) in &sums {
        let term = exp_rational(sum, prec)
            .mul_rational(&BigRational::from_integer(BigInt::from(*count)));
        z = z.add(&term);
    }
    Ok(z)
}

/// Two-sided pressure bounds from one box. For a potential normalized to be
/// nonnegative and recoded to single-site, exact box tilings of Z^d give
///
///   (1/|S|) log Z(interior)  <=  P  <=  (1/|interior|) log Z(interior),
///
/// where S is the box of `box_side` sites per axis and the interior shrinks
/// by the gap radius on every face. The upper bound is the infimum rule and
/// is unconditional; the returned assumptions belong to the lower bound.
pub fn sandwich_bounds(
    spec: &SftSpec,
    pot: &LocallyConstantPotential,
    box_side: u32,
    lang: &LanguageProvider,
    prec: u32,
    budget: &ResourceBudget,
) -> Result<(DyadicInterval, DyadicInterval, BTreeSet<Assumption>)> {
    if spec.si_gap.is_none() && !spec.is_full_shift() {
        return Err(Error::MissingSiGap);
    }
    let norm = pot.sup_norm();
    let shifted = pot.add_constant(&norm);
    let ws = WorkingSystem::prepare(spec, &shifted, budget)?;
    let gap = ws.gap;
    let interior_side = i64::from(box_side) - 2 * i64::from(gap);
    if interior_side < 1 {
        return Err(Error::Invalid(format!(
            "box side {box_side} leaves no interior at gap radius {gap}"
        )));
    }
    let interior_side = interior_side as u64;
    let dim = spec.dim as u32;
    let box_log = ws.box_log_z(interior_side, lang, prec, budget)?;
    let interior_volume = interior_side.pow(dim);
    let outer_volume = u64::from(box_side).pow(dim);

    let norm_iv = DyadicInterval::from_rational(&norm, prec);
    let upper = box_log.log_z.div_uint(interior_volume).sub(&norm_iv);
    let lower = box_log.log_z.div_uint(outer_volume).sub(&norm_iv);
    let mut assumptions = box_log.assumptions;
    if !spec.is_full_shift() {
        assumptions.insert(Assumption::SiGap);
    }
    Ok((lower, upper, assumptions))
}

/// The certified pressure pipeline: normalize the potential, pass to a
/// single-site working system, pick the largest eta meeting the precision
/// inequalities, evaluate log Z over the derived box, and certify the
/// sandwich with the quasitiling loss factor (1 - eta) on the lower bound.
/// The final interval has width at most 2^-k plus rounding slack.
pub fn certified_pressure(
    spec: &SftSpec,
    pot: &LocallyConstantPotential,
    k: u32,
    lang: &LanguageProvider,
    budget: &ResourceBudget,
) -> Result<CertifiedEstimate> {
    if spec.si_gap.is_none() && !spec.is_full_shift() {
        return Err(Error::MissingSiGap);
    }
    let norm = pot.sup_norm();
    let shifted = pot.add_constant(&norm);
    let ws = WorkingSystem::prepare(spec, &shifted, budget)?;
    let gap = ws.gap;
    let dim = spec.dim as u32;

    // After normalization the values lie in [0, 2 sup_norm].
    let shifted_sup = BigRational::from_integer(BigInt::from(2)) * &norm;
    let mut prec = 64.max(k + 32);
    let eta = choose_eta(k, ws.symbol_count, &shifted_sup, prec)?;
    let m_param: u64 = if gap == 0 {
        0
    } else {
        let dn = BigRational::from_integer(BigInt::from(u64::from(dim) * u64::from(gap)));
        let m = ceil_rational(&(dn / &eta)) - BigInt::from(gap);
        m.to_u64().ok_or(Error::ResourceLimit {
            what: "box radius",
            needed: m.to_string(),
            budget: u64::MAX.to_string(),
        })?
    };

    // Cost projection: refuse before building an infeasible state space.
    let interior_side = 2 * m_param + 1;
    let projected = ws.projected_cost(interior_side);
    let ceiling = match spec.dim {
        2 => budget.max_states as f64 * 64.0,
        _ => budget.max_nodes as f64,
    };
    if projected > ceiling {
        return Err(Error::ResourceLimit {
            what: "projected box evaluation cost",
            needed: format!("~{projected:.1e}"),
            budget: format!("{ceiling:.1e}"),
        });
    }

    let interior_volume = interior_side.pow(dim);
    let outer_volume = (interior_side + 2 * u64::from(gap)).pow(dim);
    let one_minus_eta = BigRational::one() - &eta;

    let mut result: Option<DyadicInterval> = None;
    for _attempt in 0..3 {
        let box_log = ws.box_log_z(interior_side, lang, prec, budget)?;
        let upper = box_log.log_z.div_uint(interior_volume);
        let lower = box_log
            .log_z
            .div_uint(outer_volume)
            .mul_rational(&one_minus_eta);
        let norm_iv = DyadicInterval::from_rational(&norm, prec);
        let enclosure =
            DyadicInterval::new(lower.lo().clone(), upper.hi().clone(), prec)?.sub(&norm_iv);

        let slack_target =
            Dyadic::pow2(-i64::from(k)).mul_exact(&Dyadic::new(BigInt::from(5), -2));
        let done = enclosure.width_upper() <= slack_target;
        result = Some(enclosure);
        if done {
            break;
        }
        prec *= 2;
    }
    let enclosure = result.expect("at least one attempt ran");

    let mut conditional_on = lang.exactness_assumptions(spec);
    if spec.is_full_shift() {
        conditional_on.clear();
    } else {
        conditional_on.insert(Assumption::SiGap);
    }
    Ok(CertifiedEstimate {
        value: PressureValue::Enclosure(enclosure),
        method: Method::BoxSandwich,
        params: MethodParams {
            eta: Some(eta),
            m_param: Some(m_param),
            gap_radius: Some(gap),
            precision_bits: Some(prec),
            precision_k: Some(k),
            ..MethodParams::default()
        },
        conditional_on,
    })
}

/// One emitted step of an anytime upper sequence.
#[derive(Clone, Debug)]
pub struct UpperStep {
    pub step: u64,
    /// Step coordinates: diagonal (n, k, t, s) or a beta value.
    pub coords: Vec<(String, String)>,
    /// Certified upper bound at this step, after the running minimum.
    pub bound: Dyadic,
}

/// A materialized prefix of a nonincreasing sequence of certified upper
/// bounds.
#[derive(Clone, Debug, Default)]
pub struct UpperSequence {
    pub steps: Vec<UpperStep>,
}

impl UpperSequence {
    pub fn last_bound(&self) -> Option<&Dyadic> {
        self.steps.last().map(|s| &s.bound)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.steps.windows(2).all(|w| w[1].bound <= w[0].bound)
    }
}

/// Fair diagonal over (n, k, t, s), all coordinates >= 1: enumerate by
/// total, lexicographically within a total.
fn diagonal(total: u32) -> Vec<(u32, u32, u32, u32)> {
    let mut out = Vec::new();
    for n in 1..total {
        for k in 1..total {
            for t in 1..total {
                let rest = i64::from(total) - i64::from(n) - i64::from(k) - i64::from(t);
                if rest >= 1 {
                    out.push((n, k, t, rest as u32));
                }
            }
        }
    }
    out
}

/// The anytime upper sequence for the pressure of the subshift induced by a
/// forbidden enumeration: running minimum of
/// (1/|F_n|) log Zhat^(t,s)_{F_n}(psi_k) over the fair diagonal. Every term
/// is a certified upper bound; no convergence rate is claimed. Steps whose
/// evaluation exceeds the budget are skipped, never unsound.
pub fn pressure_upper_sequence(
    enumeration: &ForbiddenEnumeration,
    oracle: &dyn PotentialOracle,
    steps: u64,
    prec: u32,
    budget: &ResourceBudget,
) -> Result<UpperSequence> {
    let dim = enumeration.dim();
    let mut seq = UpperSequence::default();
    let mut best: Option<Dyadic> = None;
    let mut emitted: u64 = 0;
    let mut total = 4u32;
    'outer: while total <= 64 {
        for (n, k, t, s) in diagonal(total) {
            if emitted == steps {
                break 'outer;
            }
            let shape = crate::lattice::centered_box(n, dim);
            let psi = crate::potential::upper_regularization(oracle, k)?;
            let params = ExtendabilityParams::new(t, s)?;
            let z = match modified_partition_function(
                &shape,
                params,
                enumeration,
                &psi,
                prec,
                budget,
            ) {
                Ok(z) => z,
                Err(Error::ResourceLimit { .. }) => continue,
                Err(e) => return Err(e),
            };
            if !z.lo().is_positive() {
                // Empty extendability set: the induced subshift is empty and
                // every upper bound holds vacuously; skip the step.
                continue;
            }
            let log = ln_interval(&z, prec)?;
            let bound_here = log
                .hi()
                .div_dir(&Dyadic::from_integer(shape.len() as u64), prec, RoundDir::Up);
            let bound = match &best {
                Some(b) if *b <= bound_here => b.clone(),
                _ => bound_here,
            };
            best = Some(bound.clone());
            emitted += 1;
            seq.steps.push(UpperStep {
                step: emitted,
                coords: vec![
                    ("n".to_string(), n.to_string()),
                    ("k".to_string(), k.to_string()),
                    ("t".to_string(), t.to_string()),
                    ("s".to_string(), s.to_string()),
                ],
                bound,
            });
        }
        total += 1;
    }
    Ok(seq)
}
