//! Deterministic seed derivation.
//!
//! All randomness in the crate flows from explicit `u64` master seeds. A
//! component that needs its own stream derives a sub-seed with [`derive_seed`]
//! using a fixed rule:
//!
//! ```text
//! sub_seed = first 8 bytes (little-endian) of SHA-256( master_le8 || label || index_le8 )
//! ```
//!
//! where `master_le8` and `index_le8` are the little-endian byte encodings of
//! the master seed and the stream index, and `label` is an ASCII component
//! name such as `"trial"` or `"graph"`. The same rule, spelled out here once,
//! is what makes replays exact: any (master seed, label, index) triple names
//! one stream, everywhere, forever.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

/// Derives the sub-seed for stream `(label, index)` under `master`.
pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(label.as_bytes());
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

/// A deterministic generator for the stream named by `(master, label, index)`.
///
/// The full 32-byte ChaCha key is the SHA-256 digest from the derivation rule,
/// so distinct streams are independent to the full key width, not just 64 bits.
pub fn stream_rng(master: u64, label: &str, index: u64) -> ChaCha12Rng {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(label.as_bytes());
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha12Rng::from_seed(key)
}

/// A generator keyed by raw bytes (used where the seed is itself a bit string,
/// e.g. permutation-family seeds).
pub fn bytes_rng(label: &str, bytes: &[u8]) -> ChaCha12Rng {
    let mut hasher = Sha256::new();
    hasher.update(label.as_bytes());
    hasher.update((bytes.len() as u64).to_le_bytes());
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha12Rng::from_seed(key)
}

/// Hex SHA-256 digest of arbitrary bytes; used for config hashes and
/// transcript witness hashes in reports.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
