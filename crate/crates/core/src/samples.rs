//! Standard example systems used across the test suites and documentation.

use crate::lattice::{Shape, Site};
use crate::subshift::{Alphabet, Pattern, SftSpec};

/// The golden mean shift: binary, one dimension, no two adjacent ones.
pub fn golden_mean() -> SftSpec {
    let forbidden = vec![Pattern::word(&[1, 1], 0)];
    SftSpec::new(Alphabet::numeric(2), 1, forbidden, Some(1)).expect("valid spec")
}

/// Hard squares: binary, two dimensions, no two adjacent ones horizontally
/// or vertically.
pub fn hard_squares() -> SftSpec {
    let horizontal = Pattern::new(
        Shape::new(2, vec![Site(vec![0, 0]), Site(vec![1, 0])]).unwrap(),
        vec![1, 1],
    )
    .unwrap();
    let vertical = Pattern::new(
        Shape::new(2, vec![Site(vec![0, 0]), Site(vec![0, 1])]).unwrap(),
        vec![1, 1],
    )
    .unwrap();
    SftSpec::new(Alphabet::numeric(2), 2, vec![horizontal, vertical], Some(1)).expect("valid spec")
}

/// Over {a, b, c}, forbid ba, bb, bc: the letter b has no successor, so no
/// bi-infinite sequence contains it, yet "b" alone is locally admissible.
/// The induced subshift is the full shift on {a, c}.
pub fn dead_successor() -> SftSpec {
    let alphabet = Alphabet::from_tokens(&["a", "b", "c"]).unwrap();
    let b = 1u32;
    let forbidden = (0..3u32).map(|x| Pattern::word(&[b, x], 0)).collect();
    SftSpec::new(alphabet, 1, forbidden, Some(1)).expect("valid spec")
}

/// The full shift on `n` symbols in dimension `dim`.
pub fn full_shift(n: u32, dim: usize) -> SftSpec {
    SftSpec::full_shift(Alphabet::numeric(n), dim)
}
