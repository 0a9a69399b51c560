//! Small instances with known rotation structure, used by the tests, the
//! examples in the README and the CLI golden files.

use crate::instance::{parse_instance, Instance};

/// 3x3: the rejection chain of w1 from the man-optimal matching is a
/// 3-cycle that is not a cover.
pub const CHAIN3: &str = include_str!("../fixtures/chain3.txt");

/// 6x6 with rotations `[(w1,m1),(w2,m2)]`, `[(w3,m3),(w4,m4),(w5,m5)]` and
/// `[(w1,m2),(w6,m6)]`; the third has a type-1 and a type-2 predecessor.
pub const POSET6: &str = include_str!("../fixtures/poset6.txt");

/// 5x5 where list-order labeling without end markers orders two
/// independent rotations.
pub const TRICKY5: &str = include_str!("../fixtures/tricky5.txt");

fn load(text: &str) -> Instance {
    parse_instance(text).expect("fixture parses").instance
}

pub fn chain3() -> Instance {
    load(CHAIN3)
}

pub fn poset6() -> Instance {
    load(POSET6)
}

pub fn tricky5() -> Instance {
    load(TRICKY5)
}
