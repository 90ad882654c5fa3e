//! Small reference systems and a seeded random-system generator, shared by
//! tests, benches and the CLI.

use rand::Rng;

use crate::dist::{JointSystem, Outcome, Symbol};

/// Two cameras watching the two entrances of a building. Symbol 1 means no
/// activity, 2 and 3 an invited or uninvited guest; the target is which
/// guest entered. Each camera sees the guest half of the time.
pub fn entrance_cameras() -> JointSystem {
    JointSystem::new(
        vec![2, 3],
        vec![vec![1, 2, 3], vec![1, 2, 3]],
        vec![
            Outcome::new(vec![1, 2], 2, 0.25),
            Outcome::new(vec![1, 3], 3, 0.25),
            Outcome::new(vec![2, 1], 2, 0.25),
            Outcome::new(vec![3, 1], 3, 0.25),
        ],
    )
    .expect("fixture is valid")
}

/// The garbled copy of [`entrance_cameras`] in which each camera crashes
/// exactly when it would have seen the guest: `(x̃, t, p)` rows.
pub fn entrance_cameras_garbled_rows() -> Vec<(Vec<Symbol>, Symbol, f64)> {
    vec![
        (vec![0, 1], 2, 0.25),
        (vec![0, 1], 3, 0.25),
        (vec![1, 0], 2, 0.25),
        (vec![1, 0], 3, 0.25),
    ]
}

/// `X1 = X2 = T`, uniform on `{1, 2}`.
pub fn copy() -> JointSystem {
    JointSystem::new(
        vec![1, 2],
        vec![vec![1, 2], vec![1, 2]],
        vec![
            Outcome::new(vec![1, 1], 1, 0.5),
            Outcome::new(vec![2, 2], 2, 0.5),
        ],
    )
    .expect("fixture is valid")
}

/// `T = X1 xor X2` on the alphabet `{1, 2}`, uniform sources.
pub fn xor() -> JointSystem {
    let mut rows = Vec::new();
    for a in 1..=2u32 {
        for b in 1..=2u32 {
            let t = 1 + ((a - 1) ^ (b - 1));
            rows.push(Outcome::new(vec![a, b], t, 0.25));
        }
    }
    JointSystem::new(vec![1, 2], vec![vec![1, 2], vec![1, 2]], rows).expect("fixture is valid")
}

/// A single source independent of a uniform binary target.
pub fn independent() -> JointSystem {
    let mut rows = Vec::new();
    for (x, px) in [(1u32, 0.3), (2, 0.7)] {
        for t in 1..=2u32 {
            rows.push(Outcome::new(vec![x], t, px * 0.5));
        }
    }
    JointSystem::new(vec![1, 2], vec![vec![1, 2]], rows).expect("fixture is valid")
}

/// Shape of a randomly generated system.
#[derive(Clone, Copy, Debug)]
pub struct RandomSystemSpec {
    pub n: usize,
    /// Each alphabet size is drawn uniformly from `1..=max_alphabet`
    /// (the target from `2..=max_alphabet` when that is possible).
    pub max_alphabet: usize,
    /// Probability that a cell of the alphabet product is in the support.
    pub density: f64,
    /// Upper bound on the support size; `None` for no bound.
    pub max_support: Option<usize>,
}

impl RandomSystemSpec {
    pub fn new(n: usize, max_alphabet: usize) -> Self {
        Self {
            n,
            max_alphabet,
            density: 0.5,
            max_support: None,
        }
    }
}

/// Draws a random sparse system. The support is never empty.
pub fn random_system<R: Rng + ?Sized>(rng: &mut R, spec: &RandomSystemSpec) -> JointSystem {
    let size = |rng: &mut R, lo: usize| rng.random_range(lo.min(spec.max_alphabet)..=spec.max_alphabet);
    let target_size = size(rng, 2);
    let sizes: Vec<usize> = (0..spec.n).map(|_| size(rng, 1)).collect();
    let target_alphabet: Vec<Symbol> = (1..=target_size as Symbol).collect();
    let source_alphabets: Vec<Vec<Symbol>> =
        sizes.iter().map(|&k| (1..=k as Symbol).collect()).collect();

    let mut cells: Vec<(Vec<Symbol>, Symbol)> = Vec::new();
    let mut x = vec![1 as Symbol; spec.n];
    loop {
        for t in 1..=target_size as Symbol {
            cells.push((x.clone(), t));
        }
        // odometer over the source alphabets
        let mut i = 0;
        while i < spec.n {
            if (x[i] as usize) < sizes[i] {
                x[i] += 1;
                break;
            }
            x[i] = 1;
            i += 1;
        }
        if i == spec.n {
            break;
        }
    }

    let mut chosen: Vec<(Vec<Symbol>, Symbol)> = cells
        .iter()
        .filter(|_| rng.random::<f64>() < spec.density)
        .cloned()
        .collect();
    if chosen.is_empty() {
        let k = rng.random_range(0..cells.len());
        chosen.push(cells[k].clone());
    }
    if let Some(max) = spec.max_support {
        while chosen.len() > max.max(1) {
            let k = rng.random_range(0..chosen.len());
            chosen.swap_remove(k);
        }
    }
    let weights: Vec<f64> = chosen.iter().map(|_| 0.05 + rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    let outcomes = chosen
        .into_iter()
        .zip(weights)
        .map(|((x, t), w)| Outcome::new(x, t, w / total))
        .collect();
    JointSystem::new(target_alphabet, source_alphabets, outcomes).expect("generated system is valid")
}
