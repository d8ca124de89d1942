//! Locally constant rational-valued potentials, the oracle interface that
//! stands in for arbitrary continuous potentials, ergodic sums, and the
//! forbidden-window witness potential.
//!
//! All values are exact rationals end to end; transcendental operations
//! happen only inside the rigor module.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{parse_site, Shape, Site};
use crate::subshift::{Alphabet, Pattern, SftSpec};

/// A potential that reads a finite window around the origin and returns an
/// exact rational. Window patterns absent from the table take the default
/// value, so sparse tables (and the zero potential) stay O(1).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LocallyConstantPotential {
    alphabet: Alphabet,
    dim: usize,
    window: Shape,
    /// Keyed by the symbol tuple in the window's canonical site order.
    table: BTreeMap<Vec<u32>, BigRational>,
    default: BigRational,
}

impl LocallyConstantPotential {
    pub fn new(
        alphabet: Alphabet,
        window: Shape,
        table: BTreeMap<Vec<u32>, BigRational>,
        default: BigRational,
    ) -> Result<LocallyConstantPotential> {
        if !window.contains(&Site::origin(window.dim())) {
            return Err(Error::Invalid(
                "potential window must contain the origin".to_string(),
            ));
        }
        for key in table.keys() {
            if key.len() != window.len() {
                return Err(Error::Invalid(format!(
                    "table key of length {} does not fill the {}-site window",
                    key.len(),
                    window.len()
                )));
            }
            if key.iter().any(|s| *s >= alphabet.len()) {
                return Err(Error::Invalid(
                    "table key uses a symbol outside the alphabet".to_string(),
                ));
            }
        }
        let dim = window.dim();
        Ok(LocallyConstantPotential {
            alphabet,
            dim,
            window,
            table,
            default,
        })
    }

    /// The zero potential with a single-site window.
    pub fn zero(alphabet: Alphabet, dim: usize) -> LocallyConstantPotential {
        LocallyConstantPotential {
            alphabet,
            dim,
            window: Shape::origin(dim),
            table: BTreeMap::new(),
            default: BigRational::zero(),
        }
    }

    /// A single-site potential from per-symbol values.
    pub fn single_site(
        alphabet: Alphabet,
        dim: usize,
        values: &[BigRational],
    ) -> Result<LocallyConstantPotential> {
        if values.len() != alphabet.len() as usize {
            return Err(Error::Invalid(format!(
                "need {} per-symbol values, got {}",
                alphabet.len(),
                values.len()
            )));
        }
        let table = values
            .iter()
            .enumerate()
            .map(|(i, v)| (vec![i as u32], v.clone()))
            .collect();
        Ok(LocallyConstantPotential {
            alphabet,
            dim,
            window: Shape::origin(dim),
            table,
            default: BigRational::zero(),
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn window(&self) -> &Shape {
        &self.window
    }

    pub fn is_single_site(&self) -> bool {
        self.window.len() == 1
    }

    pub fn table(&self) -> &BTreeMap<Vec<u32>, BigRational> {
        &self.table
    }

    pub fn default_value(&self) -> &BigRational {
        &self.default
    }

    /// Value on a window symbol tuple (canonical site order).
    pub fn value_of_key(&self, key: &[u32]) -> &BigRational {
        self.table.get(key).unwrap_or(&self.default)
    }

    /// Value of the window read of `v` at offset `g`.
    pub fn value_at(&self, v: &Pattern, g: &Site) -> Result<BigRational> {
        let mut key = Vec::with_capacity(self.window.len());
        for w in self.window.iter() {
            let site = w.translate(g)?;
            let sym = v.get(&site).ok_or(Error::InsufficientDomain)?;
            key.push(sym);
        }
        Ok(self.value_of_key(&key).clone())
    }

    /// Per-symbol values of a single-site potential, indexed by symbol.
    pub fn single_site_values(&self) -> Result<Vec<BigRational>> {
        if !self.is_single_site() {
            return Err(Error::Invalid(
                "potential window is larger than a single site".to_string(),
            ));
        }
        Ok((0..self.alphabet.len())
            .map(|a| self.value_of_key(&[a]).clone())
            .collect())
    }

    /// Max of |value| over all window patterns, default included.
    pub fn sup_norm(&self) -> BigRational {
        let mut best = if (self.table.len() as u64) < self.pattern_count() {
            // Some window pattern takes the default value.
            self.default.abs()
        } else {
            BigRational::zero()
        };
        for v in self.table.values() {
            best = best.max(v.abs());
        }
        best
    }

    fn pattern_count(&self) -> u64 {
        (self.alphabet.len() as u64)
            .checked_pow(self.window.len() as u32)
            .unwrap_or(u64::MAX)
    }

    /// Shift every value by `c`; P_X(phi + c) = P_X(phi) + c.
    pub fn add_constant(&self, c: &BigRational) -> LocallyConstantPotential {
        LocallyConstantPotential {
            alphabet: self.alphabet.clone(),
            dim: self.dim,
            window: self.window.clone(),
            table: self
                .table
                .iter()
                .map(|(k, v)| (k.clone(), v + c))
                .collect(),
            default: &self.default + c,
        }
    }

    /// Multiply every value by `beta` exactly.
    pub fn scale(&self, beta: &BigRational) -> LocallyConstantPotential {
        LocallyConstantPotential {
            alphabet: self.alphabet.clone(),
            dim: self.dim,
            window: self.window.clone(),
            table: self
                .table
                .iter()
                .map(|(k, v)| (k.clone(), v * beta))
                .collect(),
            default: &self.default * beta,
        }
    }

    /// Sum of the potential over the shape: sum over g in `shape` of the
    /// window read of `v` at g. The pattern must cover window + shape.
    pub fn ergodic_sum(&self, v: &Pattern, shape: &Shape) -> Result<BigRational> {
        let mut total = BigRational::zero();
        for g in shape.iter() {
            total += self.value_at(v, g)?;
        }
        Ok(total)
    }
}

/// A demand-driven sequence of locally constant approximations gamma(k) with
/// asserted sup-norm error below 2^-k. The assertion is the caller's.
pub trait PotentialOracle {
    fn approximation(&self, k: u32) -> Result<LocallyConstantPotential>;
}

/// The oracle of an exactly known locally constant potential: every
/// approximation is the potential itself.
pub struct ExactOracle(pub LocallyConstantPotential);

impl PotentialOracle for ExactOracle {
    fn approximation(&self, _k: u32) -> Result<LocallyConstantPotential> {
        Ok(self.0.clone())
    }
}

/// gamma(k) + 2^-k: dominates the represented potential pointwise and
/// converges to it uniformly from above.
pub fn upper_regularization(
    oracle: &dyn PotentialOracle,
    k: u32,
) -> Result<LocallyConstantPotential> {
    let gamma = oracle.approximation(k)?;
    let bump = BigRational::new(BigInt::from(1), BigInt::from(2u8).pow(k));
    Ok(gamma.add_constant(&bump))
}

/// The witness potential of an SFT inside its full shift: -1 where some
/// forbidden pattern occurs anchored at the origin of the window, 0
/// elsewhere. Its ground-state energy on the full shift is 0 and its
/// maximizing measures live on the SFT.
pub fn sft_embedding_potential(spec: &SftSpec) -> Result<LocallyConstantPotential> {
    if spec.forbidden.is_empty() {
        return Err(Error::EmptyForbiddenList);
    }
    let mut window = Shape::empty(spec.dim);
    for p in &spec.forbidden {
        let bb = p.domain().bounding_box().expect("nonempty forbidden domain");
        window = window.set_union(&bb.to_shape())?;
    }
    let window = window
        .bounding_box()
        .expect("nonempty window")
        .to_shape();
    if !window.contains(&Site::origin(spec.dim)) {
        let shifted = window.set_union(&Shape::origin(spec.dim))?;
        return build_embedding(spec, &shifted.bounding_box().unwrap().to_shape());
    }
    build_embedding(spec, &window)
}

fn build_embedding(spec: &SftSpec, window: &Shape) -> Result<LocallyConstantPotential> {
    // Enumerate, for each forbidden pattern, all of its extensions to the
    // window; those window patterns are the -1 entries.
    let minus_one = BigRational::from_integer(BigInt::from(-1));
    let mut table: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
    let a = spec.alphabet.len();
    for w in &spec.forbidden {
        let pinned: Vec<(usize, u32)> = w
            .domain()
            .iter()
            .zip(w.symbols())
            .map(|(site, sym)| {
                window
                    .index_of(site)
                    .map(|i| (i, *sym))
                    .ok_or_else(|| Error::Invalid("window misses a forbidden site".to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let free: Vec<usize> = (0..window.len())
            .filter(|i| !pinned.iter().any(|(p, _)| p == i))
            .collect();
        let combos = (a as u64)
            .checked_pow(free.len() as u32)
            .ok_or(Error::ResourceLimit {
                what: "embedding window patterns",
                needed: "overflowing".to_string(),
                budget: u64::MAX.to_string(),
            })?;
        for code in 0..combos {
            let mut key = vec![0u32; window.len()];
            for (idx, sym) in &pinned {
                key[*idx] = *sym;
            }
            let mut c = code;
            for idx in &free {
                key[*idx] = (c % a as u64) as u32;
                c /= a as u64;
            }
            table.insert(key, minus_one.clone());
        }
    }
    LocallyConstantPotential::new(
        spec.alphabet.clone(),
        window.clone(),
        table,
        BigRational::zero(),
    )
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

fn render_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn parse_rational(text: &str, lineno: usize) -> Result<BigRational> {
    let err = || Error::Parse {
        line: lineno,
        msg: format!("bad rational `{text}`; expected p/q"),
    };
    let (p, q) = text.trim().split_once('/').ok_or_else(err)?;
    let numer: BigInt = p.trim().parse().map_err(|_| err())?;
    let denom: BigInt = q.trim().parse().map_err(|_| err())?;
    if denom.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(numer, denom))
}

/// Parse the potential file format:
///
/// ```text
/// dim 1
/// alphabet 0 1
/// window (0) (1)
/// entry 1 1 : -1/1
/// default 0/1
/// ```
pub fn parse_potential(text: &str) -> Result<LocallyConstantPotential> {
    let mut dim: Option<usize> = None;
    let mut alphabet: Option<Alphabet> = None;
    let mut window: Option<Shape> = None;
    let mut table: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
    let mut default = BigRational::zero();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        let err = |msg: String| Error::Parse { line: lineno, msg };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
        match key {
            "dim" => {
                dim = Some(
                    rest.trim()
                        .parse::<usize>()
                        .map_err(|_| err(format!("bad dimension `{rest}`")))?,
                )
            }
            "alphabet" => {
                alphabet = Some(Alphabet::new(
                    rest.split_whitespace().map(|t| t.to_string()).collect(),
                )?)
            }
            "window" => {
                let sites = rest
                    .split_whitespace()
                    .map(parse_site)
                    .collect::<Result<Vec<_>>>()?;
                let d = dim.ok_or_else(|| err("window before dim".to_string()))?;
                window = Some(Shape::new(d, sites)?);
            }
            "entry" => {
                let alphabet = alphabet
                    .as_ref()
                    .ok_or_else(|| err("entry before alphabet".to_string()))?;
                let w = window
                    .as_ref()
                    .ok_or_else(|| err("entry before window".to_string()))?;
                let (toks, value) = rest
                    .rsplit_once(':')
                    .ok_or_else(|| err("entry needs `tokens : p/q`".to_string()))?;
                let key = toks
                    .split_whitespace()
                    .map(|t| {
                        alphabet
                            .index_of(t)
                            .ok_or_else(|| err(format!("token `{t}` not in alphabet")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if key.len() != w.len() {
                    return Err(err(format!(
                        "entry has {} tokens for a {}-site window",
                        key.len(),
                        w.len()
                    )));
                }
                table.insert(key, parse_rational(value, lineno)?);
            }
            "default" => default = parse_rational(rest, lineno)?,
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    let alphabet = alphabet.ok_or(Error::Parse { line: 0, msg: "missing alphabet".to_string() })?;
    let dim = dim.ok_or(Error::Parse { line: 0, msg: "missing dim".to_string() })?;
    let window = window.unwrap_or_else(|| Shape::origin(dim));
    LocallyConstantPotential::new(alphabet, window, table, default)
}

/// Canonical rendering; `parse_potential(print_potential(p)) == p`.
pub fn print_potential(pot: &LocallyConstantPotential) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dim {}", pot.dim);
    let _ = writeln!(out, "alphabet {}", pot.alphabet.tokens().join(" "));
    let _ = writeln!(out, "window {}", pot.window);
    for (key, value) in &pot.table {
        let toks: Vec<&str> = key.iter().map(|s| pot.alphabet.token(*s)).collect();
        let _ = writeln!(out, "entry {} : {}", toks.join(" "), render_rational(value));
    }
    let _ = writeln!(out, "default {}", render_rational(&pot.default));
    out
}
