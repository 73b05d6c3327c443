//! Deterministic pseudo-random identity instances.

use std::str::FromStr;

use divcorr_core::local::{Block, IdentityInstance};
use divcorr_core::{Rational, ShiftSet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ConfigError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// at most 2 blocks, sets of size at most 2, denominators at most 6
    Small,
    /// at most 3 blocks, sets of size at most 2, denominators at most 12
    Medium,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Small => "small",
            Profile::Medium => "medium",
        }
    }

    fn max_blocks(self) -> usize {
        match self {
            Profile::Small => 2,
            Profile::Medium => 3,
        }
    }

    fn max_denom(self) -> i64 {
        match self {
            Profile::Small => 6,
            Profile::Medium => 12,
        }
    }
}

impl FromStr for Profile {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "small" => Ok(Profile::Small),
            "medium" => Ok(Profile::Medium),
            _ => Err(ConfigError(format!("unknown profile '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityKind {
    Theorem2,
    Theorem4,
    Lemma1,
    Lemma2,
    Lemma3,
}

impl IdentityKind {
    pub const ALL: [IdentityKind; 5] = [
        IdentityKind::Theorem2,
        IdentityKind::Theorem4,
        IdentityKind::Lemma1,
        IdentityKind::Lemma2,
        IdentityKind::Lemma3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityKind::Theorem2 => "theorem2",
            IdentityKind::Theorem4 => "theorem4",
            IdentityKind::Lemma1 => "lemma1",
            IdentityKind::Lemma2 => "lemma2",
            IdentityKind::Lemma3 => "lemma3",
        }
    }

    /// Instance count used when the config leaves `count` unset.
    pub fn default_count(self) -> usize {
        match self {
            IdentityKind::Theorem2 => 25,
            IdentityKind::Theorem4 => 15,
            IdentityKind::Lemma1 => 20,
            IdentityKind::Lemma2 | IdentityKind::Lemma3 => 15,
        }
    }

    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

impl FromStr for IdentityKind {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        IdentityKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ConfigError(format!("unknown identity '{s}'")))
    }
}

/// Largest `M` (and `N`) for the single-block sums.
pub const LEMMA1_MAX_MN: usize = 6;

/// Draws without replacement from the grid `c/D`, `|c/D| < 1/2`.
struct Pool(Vec<Rational>);

impl Pool {
    fn new(d: i64, rng: &mut ChaCha8Rng) -> Self {
        let half = (d - 1) / 2;
        let mut v: Vec<Rational> = (-half..=half).map(|c| Rational::new(c, d).unwrap()).collect();
        v.shuffle(rng);
        Pool(v)
    }

    fn set(&mut self, n: usize) -> ShiftSet {
        let v = self.0.split_off(self.0.len() - n);
        ShiftSet::new(v, "").expect("pool entries are distinct and in range")
    }

    fn one(&mut self) -> Rational {
        self.0.pop().expect("pool sized in advance")
    }
}

fn pool_size(d: i64) -> usize {
    (2 * ((d - 1) / 2) + 1) as usize
}

/// Block counts and set sizes; `sizes[j] = (|A_j|, |B_j|)`.
struct Shape {
    sigma: Vec<(usize, usize)>,
    kappa: Vec<(usize, usize)>,
}

impl Shape {
    /// Entries each side needs: the sets plus one negated partner per sigma block.
    fn need(&self) -> usize {
        let a: usize = self.sigma.iter().chain(&self.kappa).map(|s| s.0).sum::<usize>() + self.sigma.len();
        let b: usize = self.sigma.iter().chain(&self.kappa).map(|s| s.1).sum::<usize>() + self.sigma.len();
        a.max(b)
    }
}

fn draw_shape(kind: IdentityKind, profile: Profile, rng: &mut ChaCha8Rng) -> Shape {
    let size = |rng: &mut ChaCha8Rng| (rng.gen_range(1..=2), rng.gen_range(1..=2));
    let lmax = profile.max_blocks();
    match kind {
        IdentityKind::Lemma1 => Shape { sigma: vec![size(rng)], kappa: vec![] },
        IdentityKind::Theorem4 => {
            let l = rng.gen_range(2..=lmax.max(2));
            let lp = rng.gen_range(1..l);
            Shape {
                sigma: (0..lp).map(|_| size(rng)).collect(),
                kappa: (lp..l).map(|_| size(rng)).collect(),
            }
        }
        IdentityKind::Lemma2 => {
            let l = rng.gen_range(1..=lmax);
            Shape { sigma: vec![], kappa: (0..l).map(|_| size(rng)).collect() }
        }
        IdentityKind::Theorem2 | IdentityKind::Lemma3 => {
            let l = rng.gen_range(1..=lmax);
            Shape { sigma: (0..l).map(|_| size(rng)).collect(), kappa: vec![] }
        }
    }
}

fn one_instance(kind: IdentityKind, profile: Profile, rng: &mut ChaCha8Rng) -> IdentityInstance {
    let (shape, d) = loop {
        let shape = draw_shape(kind, profile, rng);
        let d = rng.gen_range(2..=profile.max_denom());
        if pool_size(d) >= shape.need() {
            break (shape, d);
        }
    };
    // the A side holds A_j and -beta_j, the B side holds B_j and -alpha_j
    let mut pa = Pool::new(d, rng);
    let mut pb = Pool::new(d, rng);
    let blocks: Vec<Block> = shape
        .sigma
        .iter()
        .map(|&(na, nb)| {
            let a = pa.set(na);
            let b = pb.set(nb);
            let beta = -pa.one();
            let alpha = -pb.one();
            Block::new(a, b, alpha, beta)
        })
        .collect();
    let kappa: Vec<(ShiftSet, ShiftSet)> = shape.kappa.iter().map(|&(na, nb)| (pa.set(na), pb.set(nb))).collect();
    match kind {
        IdentityKind::Lemma1 => IdentityInstance::Lemma1 {
            block: blocks.into_iter().next().unwrap(),
            max_mn: LEMMA1_MAX_MN,
        },
        IdentityKind::Lemma2 => {
            let (a, b) = kappa.into_iter().unzip();
            IdentityInstance::Lemma2 { a, b }
        }
        IdentityKind::Lemma3 => IdentityInstance::Lemma3 { blocks },
        IdentityKind::Theorem2 => IdentityInstance::Theorem2 { blocks },
        IdentityKind::Theorem4 => IdentityInstance::Theorem4 { blocks, kappa },
    }
}

/// `count` instances of one identity. Each kind draws from its own stream,
/// so adding kinds or changing another kind's count leaves these unchanged.
pub fn seed_instances_of(kind: IdentityKind, seed: u64, count: usize, profile: Profile) -> Vec<IdentityInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(kind.stream());
    (0..count).map(|_| one_instance(kind, profile, &mut rng)).collect()
}

/// `count` instances of every identity kind, grouped by kind.
pub fn seed_instances(seed: u64, count: usize, profile: Profile) -> Vec<IdentityInstance> {
    IdentityKind::ALL
        .into_iter()
        .flat_map(|k| seed_instances_of(k, seed, count, profile))
        .collect()
}
