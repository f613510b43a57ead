//! Variation operators: binary tournament, self-adaptive uniform crossover,
//! and self-adaptive single-bit-flip mutation.
//!
//! Crossover and mutation rates live on the individual: children inherit a
//! parent's rates perturbed by a Gaussian step (σ = 0.1) and clamped to
//! [0,1], so operator pressure adapts along with the search.

use rand::Rng;
use rand_distr::StandardNormal;

use super::rank::better;
use super::Individual;
use crate::mask::FeatureMask;

const RATE_SIGMA: f64 = 0.1;

/// Draws two distinct members uniformly and returns the `better` one; ties
/// are broken by a fair coin from the same stream. A singleton population
/// returns its only member.
pub fn binary_tournament<'a, R: Rng>(pop: &'a [Individual], rng: &mut R) -> &'a Individual {
    assert!(!pop.is_empty(), "tournament over an empty population");
    if pop.len() == 1 {
        return &pop[0];
    }
    let a = rng.gen_range(0..pop.len());
    let mut b = rng.gen_range(0..pop.len() - 1);
    if b >= a {
        b += 1;
    }
    if better(&pop[a], &pop[b]) {
        &pop[a]
    } else if better(&pop[b], &pop[a]) {
        &pop[b]
    } else if rng.gen_bool(0.5) {
        &pop[a]
    } else {
        &pop[b]
    }
}

/// Self-adaptive uniform crossover.
///
/// With probability `(p1.pc + p2.pc) / 2` every bit position is swapped
/// between the children with probability one half; otherwise the children
/// are clones. Child 1 inherits its rates from parent 1 and child 2 from
/// parent 2, each perturbed and clamped. Empty child masks are repaired by
/// setting one uniformly random bit.
pub fn crossover_self_adaptive<R: Rng>(
    p1: &Individual,
    p2: &Individual,
    rng: &mut R,
) -> (Individual, Individual) {
    assert_eq!(p1.mask.len(), p2.mask.len(), "parents must share mask length");
    let n = p1.mask.len();

    let mut bits1: Vec<bool> = p1.mask.bits().to_vec();
    let mut bits2: Vec<bool> = p2.mask.bits().to_vec();
    let pair_rate = ((p1.pc + p2.pc) / 2.0).clamp(0.0, 1.0);
    if rng.gen_bool(pair_rate) {
        for k in 0..n {
            if rng.gen_bool(0.5) {
                std::mem::swap(&mut bits1[k], &mut bits2[k]);
            }
        }
    }

    let c1 = child(bits1, p1, rng);
    let c2 = child(bits2, p2, rng);
    (c1, c2)
}

fn child<R: Rng>(bits: Vec<bool>, parent: &Individual, rng: &mut R) -> Individual {
    let pc = perturb(parent.pc, rng);
    let pm = perturb(parent.pm, rng);
    let mask = repair(bits, rng);
    Individual::new(mask, pc, pm)
}

fn perturb<R: Rng>(rate: f64, rng: &mut R) -> f64 {
    let step: f64 = rng.sample(StandardNormal);
    (rate + RATE_SIGMA * step).clamp(0.0, 1.0)
}

fn repair<R: Rng>(mut bits: Vec<bool>, rng: &mut R) -> FeatureMask {
    if bits.iter().all(|b| !b) {
        let k = rng.gen_range(0..bits.len());
        bits[k] = true;
    }
    FeatureMask::from_bits(bits).expect("repaired mask is non-empty")
}

/// Self-adaptive single-bit-flip mutation: with probability `ind.pm` exactly
/// one uniformly chosen bit flips. An emptied mask is repaired by setting
/// one random bit. Objectives are reset only if the mask actually changed.
pub fn mutate_self_adaptive<R: Rng>(ind: &Individual, rng: &mut R) -> Individual {
    let mut out = ind.clone();
    if rng.gen_bool(ind.pm.clamp(0.0, 1.0)) {
        let mut bits = out.mask.bits().to_vec();
        let k = rng.gen_range(0..bits.len());
        bits[k] = !bits[k];
        out.mask = repair(bits, rng);
        if out.mask != ind.mask {
            out.clear_objectives();
        }
    }
    out
}
