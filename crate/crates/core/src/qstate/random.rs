use super::{MultipartiteState, PureState, QuantumState};
use crate::error::Result;
use crate::linalg;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent deterministic stream `stream` of the generator seeded by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Haar-random ket (normalized complex Gaussian vector).
pub fn random_pure<S: AsRef<str>, R: Rng + ?Sized>(
    dims: &[usize],
    labels: &[S],
    rng: &mut R,
) -> Result<PureState> {
    let d: usize = dims.iter().product();
    let v = linalg::ginibre(d, 1, rng).column(0).into_owned();
    PureState::from_unnormalized(dims.to_vec(), labels, v)
}

/// Random mixed state of rank at most `env_dim`: marginal of a random pure
/// state on the system and an environment of dimension `env_dim`.
pub fn random_mixed<S: AsRef<str>, R: Rng + ?Sized>(
    dims: &[usize],
    labels: &[S],
    env_dim: usize,
    rng: &mut R,
) -> Result<MultipartiteState> {
    let mut all_dims = dims.to_vec();
    all_dims.push(env_dim.max(1));
    let mut all_labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
    let env = super::unused_label(&all_labels, "env");
    all_labels.push(env);
    let psi = random_pure(&all_dims, &all_labels, rng)?;
    let mask: Vec<bool> = (0..all_dims.len()).map(|i| i < dims.len()).collect();
    let matrix = psi.reduced_by_mask(&mask);
    Ok(MultipartiteState::from_raw(
        dims.to_vec(),
        all_labels[..dims.len()].to_vec(),
        matrix,
    ))
}
