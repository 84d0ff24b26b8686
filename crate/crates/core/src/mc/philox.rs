//! Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//!
//! Output is a pure function of `(key, counter)`, so any trial's random
//! numbers can be produced independently of every other trial.

const M0: u32 = 0xD251_1F53;
const M1: u32 = 0xCD9E_8D57;
const W0: u32 = 0x9E37_79B9;
const W1: u32 = 0xBB67_AE85;

#[inline(always)]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = u64::from(a) * u64::from(b);
    ((p >> 32) as u32, p as u32)
}

#[inline(always)]
fn round(ctr: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let (hi0, lo0) = mulhilo(M0, ctr[0]);
    let (hi1, lo1) = mulhilo(M1, ctr[2]);
    [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0]
}

/// Ten rounds of Philox4x32.
#[inline]
pub fn philox4x32(mut ctr: [u32; 4], mut key: [u32; 2]) -> [u32; 4] {
    ctr = round(ctr, key);
    for _ in 1..10 {
        key[0] = key[0].wrapping_add(W0);
        key[1] = key[1].wrapping_add(W1);
        ctr = round(ctr, key);
    }
    ctr
}

/// Two uniforms strictly inside `(0, 1)` for the given seed, stream index and
/// block.
#[inline]
pub fn uniform_pair(seed: u64, index: u64, block: u32) -> (f64, f64) {
    let out = philox4x32(
        [index as u32, (index >> 32) as u32, block, 0],
        [seed as u32, (seed >> 32) as u32],
    );
    let a = (u64::from(out[0]) << 32) | u64::from(out[1]);
    let b = (u64::from(out[2]) << 32) | u64::from(out[3]);
    (open_unit(a), open_unit(b))
}

/// Top 52 bits mapped to bin centres, so 0 and 1 never occur.
#[inline]
fn open_unit(bits: u64) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 52) as f64;
    ((bits >> 12) as f64 + 0.5) * SCALE
}
