//! The built-in corpus: every valid structure with a small number of points.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::abd::AbdStructure;
use crate::perm::Permutation;

/// A corpus structure with a printable label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub label: String,
    pub abd: AbdStructure,
}

/// All valid structures with `n ≤ max_n`: pairs of n-cycles and proper
/// subsets of the fixed points of their commutator.
pub fn exhaustive(max_n: usize) -> Vec<AbdStructure> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let cycles = Permutation::all_n_cycles(n);
        for c1 in &cycles {
            for c2 in &cycles {
                let fixed = c1.commutator(c2).expect("same size").fixed_points();
                for mask in 0u32..1 << fixed.len() {
                    let a: Vec<usize> = fixed
                        .iter()
                        .enumerate()
                        .filter(|(b, _)| mask >> b & 1 == 1)
                        .map(|(_, &x)| x)
                        .collect();
                    if a.len() == n {
                        continue;
                    }
                    out.push(
                        AbdStructure::new_valid(c1.clone(), c2.clone(), a)
                            .expect("enumerated structures are valid"),
                    );
                }
            }
        }
    }
    out
}

fn cycles(c1: &str, c2: &str, a: &[usize]) -> AbdStructure {
    let p = |s| Permutation::parse_cycles(s, 4).expect("pinned cycle");
    AbdStructure::new_valid(p(c1), p(c2), a.iter().copied()).expect("pinned structure is valid")
}

/// The `n = 4` example with `C₁ = (1 4 2 3)`, `C₂ = (1 2 3 4)`; `a` is 0-based.
pub fn example(a: &[usize]) -> AbdStructure {
    cycles("(1 4 2 3)", "(1 2 3 4)", a)
}

/// The pair `C₁ = (1 2 3 4)`, `C₂ = (1 3 2 4)` with `A = ∅`.
pub fn crossed_pair() -> AbdStructure {
    cycles("(1 2 3 4)", "(1 3 2 4)", &[])
}

/// The pinned entries followed by the exhaustive list for `n ≤ max_n`.
pub fn corpus(max_n: usize) -> Vec<CatalogEntry> {
    let pinned = [
        ("example", example(&[])),
        ("example A={3}", example(&[2])),
        ("crossed pair", crossed_pair()),
    ];
    let mut out: Vec<CatalogEntry> = pinned
        .into_iter()
        .map(|(l, abd)| CatalogEntry {
            label: format!("{l}: {abd}"),
            abd,
        })
        .collect();
    out.extend(exhaustive(max_n).into_iter().map(|abd| CatalogEntry {
        label: abd.to_string(),
        abd,
    }));
    out
}

/// Structures of the corpus with `C₂ ∈ ⟨C₁⟩`.
pub fn commuting(entries: &[CatalogEntry]) -> Vec<&CatalogEntry> {
    entries
        .iter()
        .filter(|e| {
            let (c1, c2) = (e.abd.c1(), e.abd.c2());
            (0..e.abd.n() as i64).any(|k| &c1.pow(k) == c2)
        })
        .collect()
}

/// A uniformly random n-cycle.
pub fn random_cycle<G: Rng + ?Sized>(rng: &mut G, n: usize) -> Permutation {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut images = vec![0; n];
    for i in 0..n {
        images[order[i]] = order[(i + 1) % n];
    }
    Permutation::new(images).expect("a cyclic order is a bijection")
}

/// A random valid structure on `n` points: two random n-cycles and a random
/// proper subset of the fixed points of their commutator.
pub fn random_structure<G: Rng + ?Sized>(rng: &mut G, n: usize) -> AbdStructure {
    let (c1, c2) = (random_cycle(rng, n), random_cycle(rng, n));
    let fixed = c1.commutator(&c2).expect("same size").fixed_points();
    let mut a: Vec<usize> = fixed.into_iter().filter(|_| rng.gen_bool(0.5)).collect();
    if a.len() == n {
        a.pop();
    }
    AbdStructure::new_valid(c1, c2, a).expect("random structures are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(exhaustive(1), vec![AbdStructure::trivial()]);
        // n = 2: one pair of transpositions, A ∈ {∅, {0}, {1}}
        assert_eq!(exhaustive(2).len(), 4);
        // n = 3: the four pairs with c2 ∈ {c1, c1⁻¹} commute, 7 proper subsets each
        let three: Vec<_> = exhaustive(3).into_iter().filter(|s| s.n() == 3).collect();
        assert_eq!(three.len(), 4 * 7);
    }

    #[test]
    fn pinned_entries_are_in_the_exhaustive_list() {
        let all = exhaustive(4);
        for s in [example(&[]), example(&[2]), crossed_pair()] {
            assert!(all.contains(&s));
        }
        assert_eq!(example(&[]).commutator().fixed_points(), vec![2]);
    }

    #[test]
    fn random_structures_are_valid() {
        let mut rng = crate::sample::rng_for(5, 0);
        for n in 1..=6 {
            for _ in 0..20 {
                let s = random_structure(&mut rng, n);
                assert_eq!(s.n(), n);
                assert!(s.validate().is_valid());
            }
        }
    }

    #[test]
    fn commuting_filter() {
        let c = corpus(3);
        assert!(commuting(&c)
            .iter()
            .all(|e| e.abd.c1().compose(e.abd.c2()) == e.abd.c2().compose(e.abd.c1())));
        assert_eq!(commuting(&c).len(), c.len() - 3);
    }
}
