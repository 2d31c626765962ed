//! Seeded generators. Every random draw in the crate comes from a ChaCha8
//! stream keyed by `(seed, purpose)`, so independent consumers never share
//! or perturb each other's sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 42;

/// Independent sub-streams of one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    ModelInit,
    Shuffle { epoch: u64 },
    Split { label: u8 },
    SyntheticMeans,
    SyntheticNoise,
    Projection,
    GradCheck,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::ModelInit => 1,
            Stream::SyntheticMeans => 2,
            Stream::SyntheticNoise => 3,
            Stream::Projection => 4,
            Stream::GradCheck => 5,
            Stream::Split { label } => 0x10 + label as u64,
            Stream::Shuffle { epoch } => 0x1_0000_0000 + epoch,
        }
    }
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.id());
    rng
}
