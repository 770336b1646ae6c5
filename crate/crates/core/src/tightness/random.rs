//! Seeded Dirichlet pmfs. Everything here is a pure function of the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::pmf::Pmf;
use crate::summation;

pub const CORPUS_CONCENTRATIONS: [f64; 3] = [0.1, 1.0, 10.0];
pub const CORPUS_MAX_SUPPORT: usize = 64;

/// SplitMix64 finalizer over `(seed, index)`; gives independent streams for
/// parallel work without sharing an RNG.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Dirichlet(concentration, …) pmf on `{0, …, support−1}` with zero tail.
pub fn random_pmf(seed: u64, support: usize, concentration: f64) -> Result<Pmf> {
    if support == 0 {
        return Err(Error::InvalidParameter("support must be at least 1".into()));
    }
    if !(concentration > 0.0 && concentration.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "concentration must be positive, got {concentration}"
        )));
    }
    if support == 1 {
        return Ok(Pmf::delta());
    }
    let gamma =
        Gamma::new(concentration, 1.0).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut values: Vec<f64> = (0..support).map(|_| gamma.sample(&mut rng)).collect();
        let total = summation::sum(values.iter().copied());
        // every draw underflowed; astronomically rare at small concentration
        if !(total > 0.0 && total.is_finite()) {
            continue;
        }
        values.iter_mut().for_each(|v| *v /= total);
        return Pmf::new(values, 0.0);
    }
}

#[derive(Debug, Clone)]
pub struct CorpusItem {
    pub index: u64,
    pub support: usize,
    pub concentration: f64,
    pub pmf: Pmf,
}

/// Item `index` of the seeded corpus: support uniform on `1..=64`,
/// concentration drawn from [`CORPUS_CONCENTRATIONS`]. Fixing `support` or
/// `concentration` overrides the draw.
pub fn corpus_pmf(
    seed: u64,
    index: u64,
    support: Option<usize>,
    concentration: Option<f64>,
) -> Result<CorpusItem> {
    let item_seed = derive_seed(seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(item_seed);
    let drawn_support = rng.gen_range(1..=CORPUS_MAX_SUPPORT);
    let drawn_conc = CORPUS_CONCENTRATIONS[rng.gen_range(0..CORPUS_CONCENTRATIONS.len())];
    let support = support.unwrap_or(drawn_support);
    let concentration = concentration.unwrap_or(drawn_conc);
    let pmf = random_pmf(derive_seed(item_seed, 0), support, concentration)?;
    Ok(CorpusItem {
        index,
        support,
        concentration,
        pmf,
    })
}
