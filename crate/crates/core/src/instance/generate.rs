use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::Instance;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("instance size must be at least 1")]
    EmptySize,
    #[error("density must lie in (0, 1], got {0}")]
    Density(f64),
}

/// An `n` x `n` instance in which each pair is mutually acceptable with
/// probability `density`; each agent ranks its acceptable partners in a
/// uniformly random order. Deterministic in `seed`.
pub fn gen_random(n: usize, density: f64, seed: u64) -> Result<Instance, GenerateError> {
    if n == 0 {
        return Err(GenerateError::EmptySize);
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(GenerateError::Density(density));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut men: Vec<Vec<usize>> = vec![Vec::with_capacity(n); n];
    let mut women: Vec<Vec<usize>> = vec![Vec::with_capacity(n); n];
    for (m, list) in men.iter_mut().enumerate() {
        for (w, back) in women.iter_mut().enumerate() {
            if density >= 1.0 || rng.gen_bool(density) {
                list.push(w);
                back.push(m);
            }
        }
    }
    for list in men.iter_mut().chain(women.iter_mut()) {
        list.shuffle(&mut rng);
    }
    Ok(Instance::from_lists(men, women).expect("generated lists are in range"))
}

/// `k` disjoint 2x2 blocks, each with exactly two stable matchings, for
/// `2^k` stable matchings in total.
///
/// In block `b` the men `2b`, `2b+1` and women `2b`, `2b+1` only list each
/// other; each man ranks "his" woman first and each woman ranks the other
/// man first, so the man-optimal and woman-optimal matchings differ.
pub fn gen_exponential(k: usize) -> Result<Instance, GenerateError> {
    if k == 0 {
        return Err(GenerateError::EmptySize);
    }
    let n = 2 * k;
    let mut men = Vec::with_capacity(n);
    let mut women = Vec::with_capacity(n);
    for b in 0..k {
        let (a, c) = (2 * b, 2 * b + 1);
        men.push(vec![a, c]);
        men.push(vec![c, a]);
        women.push(vec![c, a]);
        women.push(vec![a, c]);
    }
    Ok(Instance::from_lists(men, women).expect("generated lists are in range"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_is_deterministic() {
        assert_eq!(
            gen_random(5, 1.0, 7).unwrap(),
            gen_random(5, 1.0, 7).unwrap()
        );
        assert_ne!(
            gen_random(5, 1.0, 7).unwrap(),
            gen_random(5, 1.0, 8).unwrap()
        );
    }

    #[test]
    fn full_density_gives_full_lists() {
        for seed in 0..5 {
            let inst = gen_random(5, 1.0, seed).unwrap();
            assert!(inst.men_prefs().iter().all(|l| l.len() == 5));
            assert!(inst.women_prefs().iter().all(|l| l.len() == 5));
        }
    }

    #[test]
    fn sparse_instances_are_mutual() {
        let inst = gen_random(6, 0.5, 1).unwrap();
        assert!(inst.is_mutual());
    }

    #[test]
    fn bad_parameters() {
        assert_eq!(gen_random(0, 0.5, 1), Err(GenerateError::EmptySize));
        assert_eq!(gen_random(3, 0.0, 1), Err(GenerateError::Density(0.0)));
        assert!(gen_random(3, 1.5, 1).is_err());
        assert!(gen_random(3, f64::NAN, 1).is_err());
        assert_eq!(gen_exponential(0), Err(GenerateError::EmptySize));
    }

    #[test]
    fn exponential_blocks() {
        let inst = gen_exponential(2).unwrap();
        assert_eq!(inst.num_men(), 4);
        assert_eq!(inst.man_list(2), &[2, 3]);
        assert_eq!(inst.woman_list(2), &[3, 2]);
        assert!(inst.is_mutual());
    }
}
