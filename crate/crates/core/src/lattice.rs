//! Finite subsets of Z^d: sites, shapes, boxes and the window-interior
//! operation the pressure estimators rely on.
//!
//! Shapes are stored as sorted, deduplicated coordinate lists so that shape
//! equality, pattern keys, and enumeration order are canonical.

use std::fmt;

use crate::error::{Error, Result};

/// A lattice site in Z^d.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site(pub Vec<i64>);

impl Site {
    pub fn origin(dim: usize) -> Self {
        Site(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Componentwise sum with overflow checks. Desk-scale shapes stay far
    /// below the i64 range, so an overflow always indicates a caller bug.
    pub fn translate(&self, by: &Site) -> Result<Site> {
        if self.dim() != by.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: by.dim(),
            });
        }
        let coords = self
            .0
            .iter()
            .zip(&by.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::CoordinateOverflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(Site(coords))
    }

    pub fn negate(&self) -> Site {
        Site(self.0.iter().map(|c| -c).collect())
    }

    pub fn norm_inf(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A finite set of sites sharing one dimension, kept sorted lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape {
    dim: usize,
    sites: Vec<Site>,
}

impl Shape {
    pub fn new(dim: usize, mut sites: Vec<Site>) -> Result<Shape> {
        assert!(dim >= 1, "dimension must be positive");
        for s in &sites {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.dim(),
                });
            }
        }
        sites.sort();
        sites.dedup();
        Ok(Shape { dim, sites })
    }

    pub fn empty(dim: usize) -> Shape {
        Shape { dim, sites: Vec::new() }
    }

    pub fn singleton(site: Site) -> Shape {
        let dim = site.dim();
        Shape { dim, sites: vec![site] }
    }

    pub fn origin(dim: usize) -> Shape {
        Shape::singleton(Site::origin(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Site> {
        self.sites.iter()
    }

    pub fn contains(&self, site: &Site) -> bool {
        self.sites.binary_search(site).is_ok()
    }

    /// Position of `site` in the canonical order.
    pub fn index_of(&self, site: &Site) -> Option<usize> {
        self.sites.binary_search(site).ok()
    }

    pub fn is_subset_of(&self, other: &Shape) -> bool {
        self.sites.iter().all(|s| other.contains(s))
    }

    pub fn translate(&self, by: &Site) -> Result<Shape> {
        let sites = self
            .sites
            .iter()
            .map(|s| s.translate(by))
            .collect::<Result<Vec<_>>>()?;
        // Translation preserves lexicographic order.
        Ok(Shape { dim: self.dim, sites })
    }

    /// {x + y : x in self, y in other}, deduplicated.
    pub fn minkowski_sum(&self, other: &Shape) -> Result<Shape> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut sites = Vec::with_capacity(self.len() * other.len());
        for a in &self.sites {
            for b in &other.sites {
                sites.push(a.translate(b)?);
            }
        }
        Shape::new(self.dim, sites)
    }

    /// {g in self : g + w in self for every w in window}.
    ///
    /// For boxes this is the box shrunk by the window's extent; it is the
    /// set of positions whose whole window read stays inside the shape.
    pub fn interior(&self, window: &Shape) -> Result<Shape> {
        if self.is_empty() || window.is_empty() {
            return Err(Error::Invalid(
                "interior requires nonempty shape and window".to_string(),
            ));
        }
        if self.dim != window.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: window.dim,
            });
        }
        let sites = self
            .sites
            .iter()
            .filter(|g| {
                window
                    .iter()
                    .all(|w| matches!(g.translate(w), Ok(t) if self.contains(&t)))
            })
            .cloned()
            .collect();
        Ok(Shape { dim: self.dim, sites })
    }

    pub fn set_union(&self, other: &Shape) -> Result<Shape> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut sites = self.sites.clone();
        sites.extend(other.sites.iter().cloned());
        Shape::new(self.dim, sites)
    }

    pub fn set_difference(&self, other: &Shape) -> Shape {
        let sites = self
            .sites
            .iter()
            .filter(|s| !other.contains(s))
            .cloned()
            .collect();
        Shape { dim: self.dim, sites }
    }

    /// Smallest box containing the shape, or None for the empty shape.
    pub fn bounding_box(&self) -> Option<LatticeBox> {
        if self.is_empty() {
            return None;
        }
        let mut lo = self.sites[0].0.clone();
        let mut hi = lo.clone();
        for s in &self.sites {
            for (i, c) in s.0.iter().enumerate() {
                lo[i] = lo[i].min(*c);
                hi[i] = hi[i].max(*c);
            }
        }
        Some(LatticeBox {
            lo: Site(lo),
            hi: Site(hi),
        })
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.sites.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// An axis-aligned box [lo_1, hi_1] x ... x [lo_d, hi_d], bounds inclusive.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LatticeBox {
    lo: Site,
    hi: Site,
}

impl LatticeBox {
    pub fn new(lo: Site, hi: Site) -> Result<LatticeBox> {
        if lo.dim() != hi.dim() {
            return Err(Error::DimensionMismatch {
                expected: lo.dim(),
                got: hi.dim(),
            });
        }
        if lo.0.iter().zip(&hi.0).any(|(a, b)| a > b) {
            return Err(Error::Invalid(format!(
                "box bounds out of order: {lo} !<= {hi}"
            )));
        }
        Ok(LatticeBox { lo, hi })
    }

    /// [-radius, radius]^dim.
    pub fn centered(radius: u32, dim: usize) -> LatticeBox {
        let r = i64::from(radius);
        LatticeBox {
            lo: Site(vec![-r; dim]),
            hi: Site(vec![r; dim]),
        }
    }

    pub fn lo(&self) -> &Site {
        &self.lo
    }

    pub fn hi(&self) -> &Site {
        &self.hi
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    /// Side length along each axis, in sites.
    pub fn side(&self, axis: usize) -> u64 {
        (self.hi.0[axis] - self.lo.0[axis] + 1) as u64
    }

    pub fn volume(&self) -> u64 {
        (0..self.dim()).map(|i| self.side(i)).product()
    }

    pub fn contains(&self, s: &Site) -> bool {
        s.0.iter()
            .enumerate()
            .all(|(i, c)| self.lo.0[i] <= *c && *c <= self.hi.0[i])
    }

    /// Materialize the box as a shape, sites in canonical order.
    pub fn to_shape(&self) -> Shape {
        let dim = self.dim();
        let mut sites = Vec::with_capacity(self.volume() as usize);
        let mut cursor = self.lo.0.clone();
        'emit: loop {
            sites.push(Site(cursor.clone()));
            // Odometer increment in lexicographic order, last axis fastest.
            for axis in (0..dim).rev() {
                if cursor[axis] < self.hi.0[axis] {
                    cursor[axis] += 1;
                    for later in axis + 1..dim {
                        cursor[later] = self.lo.0[later];
                    }
                    continue 'emit;
                }
            }
            return Shape { dim, sites };
        }
    }
}

/// [-radius, radius]^dim materialized as a shape.
pub fn centered_box(radius: u32, dim: usize) -> Shape {
    LatticeBox::centered(radius, dim).to_shape()
}

/// The canonical enumeration of Z^d: sites ordered by increasing sup-norm,
/// lexicographically within each shell, starting at the origin. The first
/// `count` sites form the growth sets used by the extendability machinery.
pub fn growth_sites(dim: usize, count: usize) -> Shape {
    let mut sites = Vec::with_capacity(count);
    let mut radius: u32 = 0;
    while sites.len() < count {
        let shell: Vec<Site> = if radius == 0 {
            vec![Site::origin(dim)]
        } else {
            centered_box(radius, dim)
                .sites()
                .iter()
                .filter(|s| s.norm_inf() == i64::from(radius))
                .cloned()
                .collect()
        };
        for s in shell {
            if sites.len() == count {
                break;
            }
            sites.push(s);
        }
        radius += 1;
    }
    Shape {
        dim,
        sites: {
            let mut v = sites;
            v.sort();
            v.dedup();
            v
        },
    }
}

/// Parse the shape literal syntax: whitespace-separated `(c1,...,cd)` sites,
/// with `box(a..b, c..d)` as an abbreviation for a full box.
pub fn parse_shape_literal(text: &str, dim: Option<usize>) -> Result<Shape> {
    let mut sites: Vec<Site> = Vec::new();
    let mut inferred = dim;
    for tok in tokenize_parenthesized(text)? {
        if let Some(rest) = tok.strip_prefix("box(") {
            let inner = rest.strip_suffix(')').ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("unterminated box literal `{tok}`"),
            })?;
            let mut lo = Vec::new();
            let mut hi = Vec::new();
            for range in inner.split(',') {
                let (a, b) = range.split_once("..").ok_or_else(|| Error::Parse {
                    line: 0,
                    msg: format!("box range `{range}` must look like lo..hi"),
                })?;
                lo.push(parse_coord(a)?);
                hi.push(parse_coord(b)?);
            }
            let b = LatticeBox::new(Site(lo), Site(hi))?;
            check_dim(&mut inferred, b.dim())?;
            sites.extend(b.to_shape().sites.into_iter());
        } else {
            let site = parse_site(&tok)?;
            check_dim(&mut inferred, site.dim())?;
            sites.push(site);
        }
    }
    let d = inferred.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "empty shape literal with no dimension to infer".to_string(),
    })?;
    Shape::new(d, sites)
}

/// Split a shape literal on whitespace, keeping parenthesized groups (which
/// may contain spaces after commas) together.
fn tokenize_parenthesized(text: &str) -> Result<Vec<String>> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut depth = 0u32;
    for c in text.chars() {
        match c {
            '(' => {
                depth += 1;
                current.push(c);
            }
            ')' => {
                if depth == 0 {
                    return Err(Error::Parse {
                        line: 0,
                        msg: "unbalanced `)` in shape literal".to_string(),
                    });
                }
                depth -= 1;
                current.push(c);
            }
            c if c.is_whitespace() && depth == 0 => {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
            }
            c if c.is_whitespace() => {}
            _ => current.push(c),
        }
    }
    if depth != 0 {
        return Err(Error::Parse {
            line: 0,
            msg: "unbalanced `(` in shape literal".to_string(),
        });
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    Ok(tokens)
}

pub fn parse_site(tok: &str) -> Result<Site> {
    let inner = tok
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("site `{tok}` must look like (c1,...,cd)"),
        })?;
    let coords = inner
        .split(',')
        .map(parse_coord)
        .collect::<Result<Vec<_>>>()?;
    Ok(Site(coords))
}

fn parse_coord(text: &str) -> Result<i64> {
    text.trim().parse::<i64>().map_err(|_| Error::Parse {
        line: 0,
        msg: format!("bad coordinate `{text}`"),
    })
}

fn check_dim(inferred: &mut Option<usize>, got: usize) -> Result<()> {
    match inferred {
        Some(d) if *d != got => Err(Error::DimensionMismatch {
            expected: *d,
            got,
        }),
        Some(_) => Ok(()),
        None => {
            *inferred = Some(got);
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(coords: &[i64]) -> Site {
        Site(coords.to_vec())
    }

    #[test]
    fn centered_boxes_have_expected_sizes() {
        assert_eq!(centered_box(1, 2).len(), 9);
        assert_eq!(centered_box(0, 3).len(), 1);
        assert_eq!(centered_box(0, 3).sites()[0], Site::origin(3));
        assert_eq!(centered_box(2, 1).len(), 5);
        assert_eq!(
            centered_box(2, 1).sites().to_vec(),
            vec![s(&[-2]), s(&[-1]), s(&[0]), s(&[1]), s(&[2])]
        );
    }

    #[test]
    fn interior_of_boxes() {
        let big = centered_box(2, 2);
        let win = centered_box(1, 2);
        let inner = big.interior(&win).unwrap();
        assert_eq!(inner, centered_box(1, 2));
        assert_eq!(inner.len(), 9);

        let bigger = centered_box(3, 2);
        assert_eq!(bigger.interior(&win).unwrap(), centered_box(2, 2));
    }

    #[test]
    fn interior_with_origin_window_is_identity() {
        let shape = Shape::new(2, vec![s(&[0, 0]), s(&[5, -3]), s(&[1, 1])]).unwrap();
        assert_eq!(shape.interior(&Shape::origin(2)).unwrap(), shape);
    }

    #[test]
    fn interior_counts_match_volume_formula() {
        for dim in 1..=3usize {
            for r in 0..=3u32 {
                for m in 0..=3u32 {
                    let outer = centered_box(r + m, dim);
                    let window = centered_box(r, dim);
                    let inner = outer.interior(&window).unwrap();
                    assert_eq!(inner.len() as u64, (2 * u64::from(m) + 1).pow(dim as u32));
                }
            }
        }
    }

    #[test]
    fn minkowski_sum_examples() {
        let a = centered_box(1, 1);
        assert_eq!(a.minkowski_sum(&a).unwrap(), centered_box(2, 1));
        assert_eq!(a.minkowski_sum(&Shape::origin(1)).unwrap(), a);

        let h = Shape::new(2, vec![s(&[0, 0]), s(&[1, 0])]).unwrap();
        let v = Shape::new(2, vec![s(&[0, 0]), s(&[0, 1])]).unwrap();
        let square = Shape::new(2, vec![s(&[0, 0]), s(&[1, 0]), s(&[0, 1]), s(&[1, 1])]).unwrap();
        assert_eq!(h.minkowski_sum(&v).unwrap(), square);
    }

    #[test]
    fn minkowski_dimension_mismatch() {
        let a = centered_box(1, 1);
        let b = centered_box(1, 2);
        assert!(matches!(
            a.minkowski_sum(&b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn growth_sites_start_at_origin_and_grow_by_shells() {
        let g = growth_sites(2, 1);
        assert_eq!(g.sites(), &[Site::origin(2)]);
        let g9 = growth_sites(2, 9);
        assert_eq!(g9, centered_box(1, 2));
        let g3 = growth_sites(1, 3);
        assert_eq!(g3, centered_box(1, 1));
    }

    #[test]
    fn shape_literal_round_trip() {
        let parsed = parse_shape_literal("(0,0) (1,0) (0,1)", None).unwrap();
        assert_eq!(parsed.len(), 3);
        assert_eq!(parsed.dim(), 2);

        let boxed = parse_shape_literal("box(-1..1, -1..1)", None).unwrap();
        assert_eq!(boxed, centered_box(1, 2));

        let mixed = parse_shape_literal("box(0..1) (5)", None).unwrap();
        assert_eq!(mixed.len(), 3);

        assert!(parse_shape_literal("(0,0) (1)", None).is_err());
        assert!(parse_shape_literal("", None).is_err());
    }

    #[test]
    fn display_round_trips_through_parse() {
        let shape = Shape::new(2, vec![s(&[2, -1]), s(&[0, 0]), s(&[-3, 4])]).unwrap();
        let text = shape.to_string();
        assert_eq!(parse_shape_literal(&text, None).unwrap(), shape);
    }

    #[test]
    fn bounding_box() {
        let shape = Shape::new(2, vec![s(&[2, -1]), s(&[0, 3])]).unwrap();
        let bb = shape.bounding_box().unwrap();
        assert_eq!(bb.lo(), &s(&[0, -1]));
        assert_eq!(bb.hi(), &s(&[2, 3]));
        assert_eq!(bb.volume(), 15);
        assert!(Shape::empty(2).bounding_box().is_none());
    }
}
