//! Exhaustive counting of valid codewords.
//!
//! The fast counter fixes `x_0 = +1` (validity is invariant under `x → −x`),
//! walks the remaining bits in reflected Gray-code order and keeps the
//! matched-filter outputs `h` and the number of violated users up to date
//! after every single-bit flip. Flipping bit `j` moves every `h_k` by
//! `−2·x_j·W_kj`, so one step costs `O(K)` and checking validity is `O(1)`.

use alloc::vec::Vec;
use core::ops::{Add, BitXor, Sub};

use super::instance::{is_valid, Codeword, CorrelationMatrix};
use super::TiePolicy;
use crate::{Error, Result};

/// `count_valid_naive` refuses larger instances.
pub const NAIVE_USER_LIMIT: usize = 20;
/// `count_valid_fast` refuses larger instances.
pub const FAST_USER_LIMIT: usize = 30;

/// Instances with `K·N` at most this run the kernel on 16-bit lanes.
const NARROW_LANE_BOUND: i64 = 16_000;

/// Reference counter: checks every one of the `2^K` codewords directly.
pub fn count_valid_naive(w: &CorrelationMatrix, policy: TiePolicy) -> Result<u64> {
    let users = w.users();
    if users > NAIVE_USER_LIMIT {
        return Err(Error::Resource {
            users,
            limit: NAIVE_USER_LIMIT,
        });
    }
    let mut count = 0;
    for index in 0..1_u64 << users {
        if is_valid(w, &Codeword::from_index(users, index), policy)? {
            count += 1;
        }
    }
    Ok(count)
}

/// Number of valid codewords, by Gray-code enumeration.
pub fn count_valid_fast(w: &CorrelationMatrix, policy: TiePolicy) -> Result<u64> {
    count_valid_partitioned(w, policy, 0)
}

/// As [`count_valid_fast`], with the highest `width` free bits split into
/// `2^width` independent sub-enumerations whose counts are summed. The
/// width is clamped to the `K − 1` free bits; the total never depends on it.
pub fn count_valid_partitioned(w: &CorrelationMatrix, policy: TiePolicy, width: u32) -> Result<u64> {
    check_fast_limit(w)?;
    let width = clamp_width(w.users(), width);
    let mut half = 0;
    for index in 0..1_u64 << width {
        half += count_partition(w, policy, width, index)?;
    }
    Ok(2 * half)
}

/// Valid codewords with `x_0 = +1` whose top `width` free bits are fixed by
/// `index` (bit `b` of `index` set means user `K − width + b` sends `−1`).
///
/// Summing over every `index` and doubling gives the full count. Partitions
/// are independent and may be evaluated in any order or concurrently.
pub fn count_partition(w: &CorrelationMatrix, policy: TiePolicy, width: u32, index: u64) -> Result<u64> {
    check_fast_limit(w)?;
    let users = w.users();
    if width as usize > users - 1 {
        return Err(Error::Domain("partition width exceeds the number of free bits"));
    }
    if index >> width != 0 {
        return Err(Error::Domain("partition index out of range"));
    }
    let narrow = users as i64 * w.chips() as i64 <= NARROW_LANE_BOUND;
    Ok(match (users, narrow) {
        (0..=8, true) => enumerate::<i16, 8>(w, policy, width, index),
        (0..=16, true) => enumerate::<i16, 16>(w, policy, width, index),
        (_, true) => enumerate::<i16, 32>(w, policy, width, index),
        (0..=8, false) => enumerate::<i32, 8>(w, policy, width, index),
        (0..=16, false) => enumerate::<i32, 16>(w, policy, width, index),
        (_, false) => enumerate::<i32, 32>(w, policy, width, index),
    })
}

fn check_fast_limit(w: &CorrelationMatrix) -> Result<()> {
    let users = w.users();
    if users > FAST_USER_LIMIT {
        return Err(Error::Resource {
            users,
            limit: FAST_USER_LIMIT,
        });
    }
    Ok(())
}

fn clamp_width(users: usize, width: u32) -> u32 {
    width.min(users as u32 - 1)
}

trait Lane:
    Copy + Default + PartialOrd + Add<Output = Self> + Sub<Output = Self> + BitXor<Output = Self>
{
    const ZERO: Self;
    const ONE: Self;
    const ALL: Self;
    fn narrow(v: i64) -> Self;
    fn widen(self) -> i64;
}

macro_rules! impl_lane {
    ($t:ty) => {
        impl Lane for $t {
            const ZERO: Self = 0;
            const ONE: Self = 1;
            const ALL: Self = -1;
            #[inline(always)]
            fn narrow(v: i64) -> Self {
                v as $t
            }
            #[inline(always)]
            fn widen(self) -> i64 {
                i64::from(self)
            }
        }
    };
}

impl_lane!(i16);
impl_lane!(i32);

/// `v` if `mask == 0`, `−v` if `mask == −1`.
#[inline(always)]
fn signed<T: Lane>(v: T, mask: T) -> T {
    (v ^ mask) - mask
}

#[inline(always)]
fn flag<T: Lane>(violated: bool) -> T {
    if violated {
        T::ONE
    } else {
        T::ZERO
    }
}

/// Gray-code walk of one partition on `L` padded lanes. Padding lanes hold
/// `h = 1`, a `+1` bit and zero couplings, so they are never violated.
fn enumerate<T: Lane, const L: usize>(
    w: &CorrelationMatrix,
    policy: TiePolicy,
    width: u32,
    index: u64,
) -> u64 {
    let users = w.users();
    debug_assert!(users <= L);
    // A user is violated while its margin x_k·h_k is below this.
    let threshold = match policy {
        TiePolicy::Strict => T::ONE,
        TiePolicy::Inclusive => T::ZERO,
    };

    // Sign masks: 0 for x_k = +1, all ones for x_k = −1.
    let mut neg = [T::ZERO; L];
    for b in 0..width as usize {
        if (index >> b) & 1 == 1 {
            neg[users - width as usize + b] = T::ALL;
        }
    }

    let mut h = [T::ONE; L];
    let mut bad = [T::ZERO; L];
    let mut violated: i64 = 0;
    for k in 0..users {
        let hk: i64 = (0..users)
            .map(|i| {
                let x = if neg[i] == T::ALL { -1 } else { 1 };
                i64::from(w.get(k, i)) * x
            })
            .sum();
        h[k] = T::narrow(hk);
        let v = signed(h[k], neg[k]) < threshold;
        bad[k] = flag(v);
        violated += i64::from(v);
    }

    // Per bit j: the update 2·W_kj for every k, and a mask selecting lane j.
    let steps: Vec<([T; L], [T; L])> = (0..users)
        .map(|j| {
            let mut delta = [T::ZERO; L];
            for (k, slot) in delta.iter_mut().enumerate().take(users) {
                *slot = T::narrow(2 * i64::from(w.get(k, j)));
            }
            let mut select = [T::ZERO; L];
            select[j] = T::ALL;
            (delta, select)
        })
        .collect();

    let gray_bits = users - 1 - width as usize;
    let mut count = u64::from(violated == 0);
    for step in 1..1_u64 << gray_bits {
        let j = step.trailing_zeros() as usize + 1;
        // Gray bits start at +1, so x_j before the flip is bit j−1 of the
        // previous Gray word. Reading it here rather than from `neg` keeps
        // `neg` out of memory.
        let prev = step - 1;
        let mask = if ((prev ^ (prev >> 1)) >> (j - 1)) & 1 == 1 {
            T::ALL
        } else {
            T::ZERO
        };
        let (delta, select) = &steps[j];
        let mut change = T::ZERO;
        for k in 0..L {
            h[k] = h[k] - signed(delta[k], mask);
            neg[k] = neg[k] ^ select[k];
            let now = flag::<T>(signed(h[k], neg[k]) < threshold);
            change = change + (now - bad[k]);
            bad[k] = now;
        }
        violated += change.widen();
        count += u64::from(violated == 0);
    }
    count
}
