//! Negative-database storage.
//!
//! A secret is turned into decimal ASCII codes, keyed with the insert
//! timestamp, encrypted with deterministic RSA, hashed with MD5 and cut to
//! eight hex characters. Those characters are stored one per row, each
//! tagged `fragment*timestamp`, so a bulk read of the table yields only
//! fragments and keys. A caller holding the candidate secret verifies by
//! recomputing the encoding for each stored key.

pub mod bench;
pub mod cache;
pub mod codec;
pub mod crypto;
pub mod store;

pub use cache::{CacheEntry, CacheStats, LruCache, RecordCache};
pub use codec::{
    ascii_encode, ascii_encode_mul10, make_timestamp, virtual_encrypt, AsciiEncoding, Clock,
    CodecError, CodecVariant, FixedClock, SystemClock, TimestampKey,
};
pub use crypto::{
    digest_truncate, encode_secret, generate_keypair, hex_from_bytes, rsa_encrypt, CryptoError,
    DigestWindow, EncodedSecret, Encoder, KeyFile, RsaPrivateKey, RsaPublicKey,
};
pub use store::{negative_convert, NegativeTuple, StoreError, StoreOptions, TableStore};
