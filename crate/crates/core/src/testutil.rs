use crate::matching::Matching;

/// Matching from a string of 1-based wife indices per man, e.g. "264531";
/// `-` marks a single man. Square instances only.
pub fn men(s: &str) -> Matching {
    let partners: Vec<Option<usize>> = s
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as usize - 1))
        .collect();
    Matching::from_man_partners(partners.len(), &partners).expect("valid matching literal")
}
