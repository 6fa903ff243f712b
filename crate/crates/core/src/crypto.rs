//! Deterministic RSA, hex rendering and the truncated MD5 window.
//!
//! RSA here is textbook RSA: no padding, no randomness. Verification works by
//! re-running the whole pipeline on a candidate and comparing the result with
//! what was stored, so every stage must be a pure function of its inputs.
//! That is weaker than padded RSA and is accepted as the cost of
//! recompute-and-compare.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use md5::{Digest, Md5};
use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::codec::{virtual_encrypt_with, CodecError, CodecVariant, TimestampKey};

pub const DEFAULT_EXPONENT: u32 = 65_537;
pub const MIN_KEY_BITS: u64 = 16;

const HEX_CHARS: &[u8; 16] = b"0123456789abcdef";
const MD5_HEX_LEN: usize = 32;
const KEYGEN_ATTEMPTS: usize = 64;
const MILLER_RABIN_ROUNDS: usize = 32;

#[derive(Debug, Error)]
pub enum CryptoError {
    #[error("input is empty")]
    EmptyInput,
    #[error("key size {bits} is below the {MIN_KEY_BITS}-bit minimum")]
    InvalidKeySize { bits: u64 },
    #[error("invalid RSA key: {0}")]
    InvalidKey(&'static str),
    #[error("a {bits}-bit modulus cannot hold a framed plaintext block (need at least 17 bits)")]
    KeyTooSmall { bits: u64 },
    #[error("message representative is not below the modulus")]
    MessageOutOfRange,
    #[error("ciphertext is malformed: {0}")]
    MalformedCiphertext(&'static str),
    #[error("failed to find an admissible keypair after {0} attempts")]
    KeyGenFailure(usize),
    #[error("digest window [{start}, {start}+{width}) does not fit a 32-character digest")]
    InvalidWindow { start: usize, width: usize },
    #[error("key file line {line}: {reason}")]
    MalformedKeyFile { line: usize, reason: String },
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("key file I/O: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsaPublicKey {
    n: BigUint,
    e: BigUint,
}

impl RsaPublicKey {
    pub fn new(n: BigUint, e: BigUint) -> Result<Self, CryptoError> {
        if n < BigUint::from(4u8) {
            return Err(CryptoError::InvalidKey("modulus must be at least 4"));
        }
        if e <= BigUint::one() || e >= n {
            return Err(CryptoError::InvalidKey("exponent must satisfy 1 < e < n"));
        }
        Ok(Self { n, e })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.n
    }

    pub fn exponent(&self) -> &BigUint {
        &self.e
    }

    pub fn bits(&self) -> u64 {
        self.n.bits()
    }

    /// `m^e mod n` for a single block integer.
    pub fn encrypt_int(&self, m: &BigUint) -> Result<BigUint, CryptoError> {
        if m >= &self.n {
            return Err(CryptoError::MessageOutOfRange);
        }
        Ok(m.modpow(&self.e, &self.n))
    }

    /// Bytes per plaintext block, including the length byte.
    fn plain_block_len(&self) -> usize {
        ((self.n.bits() - 1) / 8) as usize
    }

    fn cipher_block_len(&self) -> usize {
        self.n.bits().div_ceil(8) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsaPrivateKey {
    n: BigUint,
    d: BigUint,
}

impl RsaPrivateKey {
    pub fn new(n: BigUint, d: BigUint) -> Result<Self, CryptoError> {
        if n < BigUint::from(4u8) {
            return Err(CryptoError::InvalidKey("modulus must be at least 4"));
        }
        if d.is_zero() || d >= n {
            return Err(CryptoError::InvalidKey("private exponent must satisfy 0 < d < n"));
        }
        Ok(Self { n, d })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.n
    }

    pub fn exponent(&self) -> &BigUint {
        &self.d
    }

    pub fn decrypt_int(&self, c: &BigUint) -> Result<BigUint, CryptoError> {
        if c >= &self.n {
            return Err(CryptoError::MessageOutOfRange);
        }
        Ok(c.modpow(&self.d, &self.n))
    }
}

/// Generates a keypair whose modulus has exactly `bits` bits.
///
/// With a seed the result is fully deterministic. `e` is 65537 when it is
/// below `n` and coprime to λ(n); otherwise the search walks odd values
/// upward (from 3 when 65537 does not fit under `n`).
pub fn generate_keypair(
    bits: u64,
    seed: Option<u64>,
) -> Result<(RsaPublicKey, RsaPrivateKey), CryptoError> {
    if bits < MIN_KEY_BITS {
        return Err(CryptoError::InvalidKeySize { bits });
    }
    let mut rng = match seed {
        Some(seed) => ChaCha20Rng::seed_from_u64(seed),
        None => ChaCha20Rng::from_entropy(),
    };
    let p_bits = bits / 2;
    let q_bits = bits - p_bits;
    for _ in 0..KEYGEN_ATTEMPTS {
        let p = random_prime(&mut rng, p_bits);
        let q = random_prime(&mut rng, q_bits);
        if p == q {
            continue;
        }
        if let Some(pair) = keypair_from_primes(&p, &q) {
            debug_assert_eq!(pair.0.bits(), bits);
            return Ok(pair);
        }
    }
    Err(CryptoError::KeyGenFailure(KEYGEN_ATTEMPTS))
}

/// Builds a keypair from two distinct primes, choosing `e` as in
/// [`generate_keypair`]. `None` when no admissible exponent exists.
pub fn keypair_from_primes(p: &BigUint, q: &BigUint) -> Option<(RsaPublicKey, RsaPrivateKey)> {
    let one = BigUint::one();
    let n = p * q;
    let lambda = (p - &one).lcm(&(q - &one));
    let preferred = BigUint::from(DEFAULT_EXPONENT);
    let mut e = if preferred < n { preferred } else { BigUint::from(3u8) };
    while e < n {
        if e.gcd(&lambda).is_one() {
            let d = e.modinv(&lambda)?;
            let public = RsaPublicKey::new(n.clone(), e).ok()?;
            let private = RsaPrivateKey::new(n, d).ok()?;
            return Some((public, private));
        }
        e += 2u8;
    }
    None
}

fn random_prime(rng: &mut ChaCha20Rng, bits: u64) -> BigUint {
    // top two bits set so the product of two such primes has full length
    let high = (BigUint::one() << (bits - 1)) | (BigUint::one() << (bits - 2));
    loop {
        let candidate = rng.gen_biguint(bits) | &high | BigUint::one();
        if is_probable_prime(&candidate, rng) {
            return candidate;
        }
    }
}

const SMALL_PRIMES: [u32; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

/// Miller-Rabin with trial division by small primes first.
pub(crate) fn is_probable_prime(n: &BigUint, rng: &mut impl RngCore) -> bool {
    let two = BigUint::from(2u8);
    if n < &two {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = BigUint::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let shift = n_minus_one.trailing_zeros().unwrap_or(0);
    let odd = &n_minus_one >> shift;
    'witness: for _ in 0..MILLER_RABIN_ROUNDS {
        let a = rng.gen_biguint_range(&two, &n_minus_one);
        let mut x = a.modpow(&odd, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..shift {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Blockwise textbook RSA.
///
/// Each plaintext block is `[len][payload][zero fill]`, sized so its integer
/// value stays below `n`; each ciphertext block is the big-endian residue
/// padded to the byte length of `n`.
pub fn rsa_encrypt(plain: &[u8], key: &RsaPublicKey) -> Result<Vec<u8>, CryptoError> {
    if plain.is_empty() {
        return Err(CryptoError::EmptyInput);
    }
    let block_len = key.plain_block_len();
    if block_len < 2 {
        return Err(CryptoError::KeyTooSmall { bits: key.bits() });
    }
    let payload_len = (block_len - 1).min(u8::MAX as usize);
    let out_len = key.cipher_block_len();
    let mut out = Vec::with_capacity(plain.len().div_ceil(payload_len) * out_len);
    let mut block = vec![0u8; block_len];
    for chunk in plain.chunks(payload_len) {
        block.fill(0);
        block[0] = chunk.len() as u8;
        block[1..=chunk.len()].copy_from_slice(chunk);
        let c = key.encrypt_int(&BigUint::from_bytes_be(&block))?;
        push_padded(&mut out, &c, out_len);
    }
    Ok(out)
}

/// Inverse of [`rsa_encrypt`]; needs the private key.
pub fn rsa_decrypt(cipher: &[u8], key: &RsaPrivateKey) -> Result<Vec<u8>, CryptoError> {
    if cipher.is_empty() {
        return Err(CryptoError::EmptyInput);
    }
    let bits = key.n.bits();
    let block_len = ((bits - 1) / 8) as usize;
    let in_len = bits.div_ceil(8) as usize;
    if block_len < 2 {
        return Err(CryptoError::KeyTooSmall { bits });
    }
    if !cipher.len().is_multiple_of(in_len) {
        return Err(CryptoError::MalformedCiphertext("length is not a whole number of blocks"));
    }
    let mut out = Vec::new();
    for chunk in cipher.chunks(in_len) {
        let m = key.decrypt_int(&BigUint::from_bytes_be(chunk))?;
        let bytes = m.to_bytes_be();
        if bytes.len() > block_len {
            return Err(CryptoError::MalformedCiphertext("block exceeds plaintext width"));
        }
        let mut block = vec![0u8; block_len];
        block[block_len - bytes.len()..].copy_from_slice(&bytes);
        let len = block[0] as usize;
        if len == 0 || len > block_len - 1 {
            return Err(CryptoError::MalformedCiphertext("bad block length byte"));
        }
        out.extend_from_slice(&block[1..=len]);
    }
    Ok(out)
}

fn push_padded(out: &mut Vec<u8>, value: &BigUint, width: usize) {
    let bytes = if value.is_zero() { Vec::new() } else { value.to_bytes_be() };
    out.resize(out.len() + width - bytes.len(), 0);
    out.extend_from_slice(&bytes);
}

/// Two lowercase hex characters per byte, high nibble first.
pub fn hex_from_bytes(data: &[u8]) -> Result<String, CryptoError> {
    if data.is_empty() {
        return Err(CryptoError::EmptyInput);
    }
    let mut hex = String::with_capacity(data.len() * 2);
    for &b in data {
        hex.push(HEX_CHARS[(b / 16) as usize] as char);
        hex.push(HEX_CHARS[(b % 16) as usize] as char);
    }
    Ok(hex)
}

/// Full MD5 digest of `data` as 32 lowercase hex characters.
pub fn md5_hex(data: &[u8]) -> String {
    let digest = Md5::digest(data);
    let mut hex = String::with_capacity(MD5_HEX_LEN);
    for &b in digest.iter() {
        hex.push(HEX_CHARS[(b >> 4) as usize] as char);
        hex.push(HEX_CHARS[(b & 0xf) as usize] as char);
    }
    hex
}

/// Character range of the MD5 hex digest that is kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigestWindow {
    start: usize,
    width: usize,
}

impl DigestWindow {
    pub const DEFAULT_START: usize = 13;
    pub const DEFAULT_WIDTH: usize = 8;

    pub fn new(start: usize, width: usize) -> Result<Self, CryptoError> {
        if width == 0 || start.checked_add(width).is_none_or(|end| end > MD5_HEX_LEN) {
            return Err(CryptoError::InvalidWindow { start, width });
        }
        Ok(Self { start, width })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn width(&self) -> usize {
        self.width
    }
}

impl Default for DigestWindow {
    fn default() -> Self {
        Self {
            start: Self::DEFAULT_START,
            width: Self::DEFAULT_WIDTH,
        }
    }
}

/// Truncated digest: lowercase hex, `width` characters (8 by default).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EncodedSecret(String);

impl EncodedSecret {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromStr for EncodedSecret {
    type Err = CryptoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(CryptoError::EmptyInput);
        }
        if s.len() > MD5_HEX_LEN || !s.bytes().all(|b| HEX_CHARS.contains(&b)) {
            return Err(CryptoError::InvalidKey("encoded secret must be lowercase hex"));
        }
        Ok(Self(s.to_owned()))
    }
}

impl fmt::Display for EncodedSecret {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// MD5 of the text's bytes, cut to the default `[13, 21)` window.
pub fn digest_truncate(hex: &str) -> Result<EncodedSecret, CryptoError> {
    digest_truncate_with(hex, DigestWindow::default())
}

pub fn digest_truncate_with(hex: &str, window: DigestWindow) -> Result<EncodedSecret, CryptoError> {
    if hex.is_empty() {
        return Err(CryptoError::EmptyInput);
    }
    Ok(window_of_digest(hex.as_bytes(), window))
}

fn window_of_digest(data: &[u8], window: DigestWindow) -> EncodedSecret {
    let full = md5_hex(data);
    EncodedSecret(full[window.start..window.start + window.width].to_owned())
}

/// Configuration of the secret-encoding pipeline.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Encoder {
    pub variant: CodecVariant,
    pub window: DigestWindow,
}

impl Encoder {
    /// codec → RSA → hex → truncated MD5. Pure in `(text, key, public)`.
    pub fn encode(
        &self,
        text: &str,
        key: &TimestampKey,
        public: &RsaPublicKey,
    ) -> Result<EncodedSecret, CryptoError> {
        let keyed = virtual_encrypt_with(self.variant, text, key)?;
        let cipher = rsa_encrypt(keyed.as_bytes(), public)?;
        let hex = hex_from_bytes(&cipher)?;
        digest_truncate_with(&hex, self.window)
    }

    /// Number of fragments each secret is split into.
    pub fn fragments(&self) -> usize {
        self.window.width
    }
}

/// [`Encoder::encode`] with the default configuration.
pub fn encode_secret(
    text: &str,
    key: &TimestampKey,
    public: &RsaPublicKey,
) -> Result<EncodedSecret, CryptoError> {
    Encoder::default().encode(text, key, public)
}

/// Key file contents: decimal `n`, `e` and optionally `d`, one per line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyFile {
    pub public: RsaPublicKey,
    pub private: Option<RsaPrivateKey>,
}

impl KeyFile {
    pub fn parse(text: &str) -> Result<Self, CryptoError> {
        let lines: Vec<&str> = text.lines().collect();
        if lines.len() < 2 || lines.len() > 3 {
            return Err(CryptoError::MalformedKeyFile {
                line: lines.len().min(3) + 1,
                reason: format!("expected 2 or 3 lines, found {}", lines.len()),
            });
        }
        let number = |idx: usize| -> Result<BigUint, CryptoError> {
            let raw = lines[idx];
            if raw.is_empty() || !raw.bytes().all(|b| b.is_ascii_digit()) {
                return Err(CryptoError::MalformedKeyFile {
                    line: idx + 1,
                    reason: format!("not a decimal integer: {raw:?}"),
                });
            }
            Ok(raw.parse().expect("digits only"))
        };
        let n = number(0)?;
        let e = number(1)?;
        let public = RsaPublicKey::new(n.clone(), e).map_err(|err| CryptoError::MalformedKeyFile {
            line: 2,
            reason: err.to_string(),
        })?;
        let private = if lines.len() == 3 {
            let d = number(2)?;
            Some(RsaPrivateKey::new(n, d).map_err(|err| CryptoError::MalformedKeyFile {
                line: 3,
                reason: err.to_string(),
            })?)
        } else {
            None
        };
        Ok(Self { public, private })
    }

    pub fn render(&self) -> String {
        let mut out = format!("{}\n{}\n", self.public.n, self.public.e);
        if let Some(private) = &self.private {
            out.push_str(&format!("{}\n", private.d));
        }
        out
    }

    pub fn load(path: &Path) -> Result<Self, CryptoError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), CryptoError> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    // Square-and-multiply over u128, independent of BigUint::modpow.
    fn modpow_u128(base: u128, exp: u128, modulus: u128) -> u128 {
        let mut result = 1 % modulus;
        let mut b = base % modulus;
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result * b % modulus;
            }
            b = b * b % modulus;
            e >>= 1;
        }
        result
    }

    fn bytes_from_hex(hex: &str) -> Vec<u8> {
        (0..hex.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&hex[i..i + 2], 16).unwrap())
            .collect()
    }

    fn toy_keys() -> (RsaPublicKey, RsaPrivateKey) {
        let n = BigUint::from(3233u32);
        (
            RsaPublicKey::new(n.clone(), BigUint::from(17u32)).unwrap(),
            RsaPrivateKey::new(n, BigUint::from(2753u32)).unwrap(),
        )
    }

    fn test_keys() -> (RsaPublicKey, RsaPrivateKey) {
        generate_keypair(128, Some(7)).unwrap()
    }

    #[test]
    fn toy_key_block_vectors() {
        assert_eq!(modpow_u128(65, 17, 3233), 2790);
        assert_eq!(modpow_u128(2790, 2753, 3233), 65);
        let (public, private) = toy_keys();
        let c = public.encrypt_int(&BigUint::from(65u32)).unwrap();
        assert_eq!(c, BigUint::from(2790u32));
        assert_eq!(private.decrypt_int(&c).unwrap(), BigUint::from(65u32));
        assert_eq!(public.encrypt_int(&BigUint::zero()).unwrap(), BigUint::zero());
        assert_eq!(public.encrypt_int(&BigUint::one()).unwrap(), BigUint::one());
        assert!(matches!(
            public.encrypt_int(&BigUint::from(3233u32)),
            Err(CryptoError::MessageOutOfRange)
        ));
    }

    #[test]
    fn toy_primes_select_e_17_when_65537_does_not_fit() {
        // lcm(60, 52) = 780; 3 divides 780, 5 divides it, 7 does not
        let (public, private) =
            keypair_from_primes(&BigUint::from(61u32), &BigUint::from(53u32)).unwrap();
        assert_eq!(public.modulus(), &BigUint::from(3233u32));
        assert_eq!(public.exponent(), &BigUint::from(7u32));
        let m = BigUint::from(65u32);
        assert_eq!(private.decrypt_int(&public.encrypt_int(&m).unwrap()).unwrap(), m);
        assert_eq!(BigUint::from(17u32).gcd(&BigUint::from(780u32)), BigUint::one());
    }

    #[test]
    fn keygen_contract() {
        assert!(matches!(generate_keypair(15, Some(1)), Err(CryptoError::InvalidKeySize { bits: 15 })));
        let a = generate_keypair(64, Some(42)).unwrap();
        let b = generate_keypair(64, Some(42)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_keypair(64, Some(43)).unwrap());
        for bits in [16, 17, 33, 128, 256] {
            let (public, _) = generate_keypair(bits, Some(bits)).unwrap();
            assert_eq!(public.bits(), bits);
        }
        let (public, _) = generate_keypair(256, Some(3)).unwrap();
        assert_eq!(public.exponent(), &BigUint::from(DEFAULT_EXPONENT));
    }

    #[test]
    fn primality_agrees_with_trial_division() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for n in 0u32..5000 {
            let trial = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_probable_prime(&BigUint::from(n), &mut rng), trial, "{n}");
        }
        // Carmichael numbers
        for n in [561u32, 1105, 1729, 2465, 2821, 6601, 8911] {
            assert!(!is_probable_prime(&BigUint::from(n), &mut rng));
        }
    }

    #[test]
    fn framed_encryption_matches_blockwise_oracle() {
        let (public, _) = generate_keypair(64, Some(5)).unwrap();
        let n = public.modulus().to_u64().unwrap() as u128;
        let e = public.exponent().to_u64().unwrap() as u128;
        // 64-bit modulus: 7-byte plain blocks carrying 6 payload bytes
        let plain = b"hello, world";
        let cipher = rsa_encrypt(plain, &public).unwrap();
        assert_eq!(cipher.len(), 2 * 8);
        for (i, chunk) in plain.chunks(6).enumerate() {
            let mut block = [0u8; 7];
            block[0] = chunk.len() as u8;
            block[1..=chunk.len()].copy_from_slice(chunk);
            let m = block.iter().fold(0u128, |acc, &b| acc << 8 | b as u128);
            let expected = modpow_u128(m, e, n);
            let got = cipher[i * 8..(i + 1) * 8]
                .iter()
                .fold(0u128, |acc, &b| acc << 8 | b as u128);
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn encryption_errors() {
        let (public, _) = test_keys();
        assert!(matches!(rsa_encrypt(b"", &public), Err(CryptoError::EmptyInput)));
        let (toy, _) = toy_keys();
        assert!(matches!(rsa_encrypt(b"A", &toy), Err(CryptoError::KeyTooSmall { bits: 12 })));
        let (small, _) = generate_keypair(16, Some(1)).unwrap();
        assert!(matches!(rsa_encrypt(b"A", &small), Err(CryptoError::KeyTooSmall { .. })));
        let (tiny_ok, tiny_priv) = generate_keypair(17, Some(1)).unwrap();
        let c = rsa_encrypt(b"xyz", &tiny_ok).unwrap();
        assert_eq!(rsa_decrypt(&c, &tiny_priv).unwrap(), b"xyz");
    }

    #[test]
    fn hex_vectors() {
        assert_eq!(hex_from_bytes(&[0x00]).unwrap(), "00");
        assert_eq!(hex_from_bytes(&[0xab]).unwrap(), "ab");
        assert_eq!(hex_from_bytes(&[0x12, 0xff]).unwrap(), "12ff");
        assert!(matches!(hex_from_bytes(&[]), Err(CryptoError::EmptyInput)));
    }

    #[test]
    fn md5_reference_vectors() {
        assert_eq!(md5_hex(b""), "d41d8cd98f00b204e9800998ecf8427e");
        assert_eq!(md5_hex(b"a"), "0cc175b9c0f1b6a831c399e269772661");
        assert_eq!(md5_hex(b"abc"), "900150983cd24fb0d6963f7d28e17f72");
        assert_eq!(md5_hex(b"message digest"), "f96b697d7cb7938d525a2f31aaf161d0");
        assert_eq!(
            md5_hex(b"12345678901234567890123456789012345678901234567890123456789012345678901234567890"),
            "57edf4a22be3c955ac49da2e2107b67a"
        );
    }

    #[test]
    fn digest_window() {
        assert_eq!(digest_truncate("abc").unwrap().as_str(), "fb0d6963");
        assert!(matches!(digest_truncate(""), Err(CryptoError::EmptyInput)));
        assert_eq!(window_of_digest(b"", DigestWindow::default()).as_str(), "204e9800");
        assert_eq!(
            digest_truncate_with("abc", DigestWindow::new(13, 2).unwrap()).unwrap().as_str(),
            "fb"
        );
        assert!(DigestWindow::new(25, 8).is_err());
        assert!(DigestWindow::new(0, 0).is_err());
        assert!(DigestWindow::new(usize::MAX, 2).is_err());
        assert!(DigestWindow::new(0, 32).is_ok());
    }

    #[test]
    fn encode_secret_is_fixed_width_and_deterministic() {
        let (public, _) = test_keys();
        let key: TimestampKey = "200805291430051".parse().unwrap();
        for len in [1, 16, 64] {
            let text = "x".repeat(len);
            let a = encode_secret(&text, &key, &public).unwrap();
            assert_eq!(a.len(), 8);
            assert_eq!(a, encode_secret(&text, &key, &public).unwrap());
        }
        assert!(matches!(
            encode_secret("", &key, &public),
            Err(CryptoError::Codec(CodecError::EmptyInput))
        ));
    }

    #[test]
    fn key_file_round_trip_and_errors() {
        let (public, private) = toy_keys();
        let full = KeyFile { public: public.clone(), private: Some(private) };
        assert_eq!(full.render(), "3233\n17\n2753\n");
        assert_eq!(KeyFile::parse(&full.render()).unwrap(), full);
        let public_only = KeyFile::parse("3233\n17\n").unwrap();
        assert_eq!(public_only.public, public);
        assert!(public_only.private.is_none());
        assert!(matches!(KeyFile::parse("3233\n"), Err(CryptoError::MalformedKeyFile { .. })));
        assert!(matches!(
            KeyFile::parse("3233\nx17\n"),
            Err(CryptoError::MalformedKeyFile { line: 2, .. })
        ));
        assert!(matches!(
            KeyFile::parse("3233\n5000\n"),
            Err(CryptoError::MalformedKeyFile { line: 2, .. })
        ));
    }

    proptest! {
        #[test]
        fn block_round_trip(m in 0u32..3233) {
            let (public, private) = toy_keys();
            let m = BigUint::from(m);
            prop_assert_eq!(private.decrypt_int(&public.encrypt_int(&m).unwrap()).unwrap(), m);
        }

        #[test]
        fn framed_round_trip(plain in proptest::collection::vec(any::<u8>(), 1..200)) {
            let (public, private) = test_keys();
            let cipher = rsa_encrypt(&plain, &public).unwrap();
            prop_assert_eq!(rsa_decrypt(&cipher, &private).unwrap(), plain);
        }

        #[test]
        fn hex_inverts(data in proptest::collection::vec(any::<u8>(), 1..64)) {
            let hex = hex_from_bytes(&data).unwrap();
            prop_assert_eq!(hex.len(), data.len() * 2);
            prop_assert_eq!(bytes_from_hex(&hex), data);
        }

        #[test]
        fn truncated_digest_shape(text in "[0-9a-f]{1,300}") {
            let out = digest_truncate(&text).unwrap();
            prop_assert_eq!(out.len(), 8);
            prop_assert!(out.as_str().bytes().all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase()));
        }
    }
}
