use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::TiePolicy;
use crate::{Error, Result};

/// `K × N` matrix of ±1 chips, one signature per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpreadingMatrix {
    users: usize,
    chips: usize,
    entries: Vec<i8>,
}

impl SpreadingMatrix {
    pub fn from_rows(rows: &[&[i8]]) -> Result<Self> {
        let users = rows.len();
        let chips = rows.first().map_or(0, |r| r.len());
        if users == 0 || chips == 0 {
            return Err(Error::Domain("spreading matrix needs at least one user and one chip"));
        }
        let mut entries = Vec::with_capacity(users * chips);
        for row in rows {
            if row.len() != chips {
                return Err(Error::DimensionMismatch {
                    expected: chips,
                    found: row.len(),
                });
            }
            if row.iter().any(|&c| c != 1 && c != -1) {
                return Err(Error::Malformed("chips must be +1 or -1"));
            }
            entries.extend_from_slice(row);
        }
        Ok(Self {
            users,
            chips,
            entries,
        })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn chips(&self) -> usize {
        self.chips
    }

    pub fn row(&self, k: usize) -> &[i8] {
        &self.entries[k * self.chips..(k + 1) * self.chips]
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }
}

/// Draws i.i.d. equiprobable ±1 chips.
///
/// The stream is ChaCha8 seeded through `seed_from_u64(seed)`. Chips fill the
/// matrix row-major; each `next_u64` supplies 64 chips, least significant bit
/// first, with a set bit mapping to `−1`.
pub fn generate_spreading(users: usize, chips: usize, seed: u64) -> Result<SpreadingMatrix> {
    if users == 0 || chips == 0 {
        return Err(Error::Domain("spreading matrix needs at least one user and one chip"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = users * chips;
    let mut entries = Vec::with_capacity(total);
    while entries.len() < total {
        let word = rng.next_u64();
        let take = (total - entries.len()).min(64);
        entries.extend((0..take).map(|b| if (word >> b) & 1 == 1 { -1 } else { 1 }));
    }
    Ok(SpreadingMatrix {
        users,
        chips,
        entries,
    })
}

/// Unnormalised cross-correlations `W_ki = Σ_μ s_k^μ s_i^μ = N·ρ_ki`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationMatrix {
    users: usize,
    chips: usize,
    entries: Vec<i32>,
}

impl CorrelationMatrix {
    /// Builds a matrix from raw row-major entries, checking symmetry, the
    /// diagonal `W_kk = N`, `|W_ki| ≤ N` and `W_ki ≡ N (mod 2)`.
    pub fn from_entries(users: usize, chips: usize, entries: Vec<i32>) -> Result<Self> {
        if users == 0 || chips == 0 {
            return Err(Error::Domain("correlation matrix needs at least one user and one chip"));
        }
        if entries.len() != users * users {
            return Err(Error::DimensionMismatch {
                expected: users * users,
                found: entries.len(),
            });
        }
        let n = i32::try_from(chips).map_err(|_| Error::Domain("chip count too large"))?;
        for k in 0..users {
            if entries[k * users + k] != n {
                return Err(Error::Malformed("diagonal must equal the chip count"));
            }
            for i in 0..users {
                let w = entries[k * users + i];
                if w != entries[i * users + k] {
                    return Err(Error::Malformed("correlation matrix must be symmetric"));
                }
                if w.abs() > n || (w - n) % 2 != 0 {
                    return Err(Error::Malformed("correlation bound or parity violated"));
                }
            }
        }
        Ok(Self {
            users,
            chips,
            entries,
        })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn chips(&self) -> usize {
        self.chips
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize) -> i32 {
        self.entries[k * self.users + i]
    }

    pub fn row(&self, k: usize) -> &[i32] {
        &self.entries[k * self.users..(k + 1) * self.users]
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.users).all(|k| (0..self.users).all(|i| k == i || self.get(k, i) == 0))
    }
}

pub fn correlate(s: &SpreadingMatrix) -> CorrelationMatrix {
    let users = s.users;
    let mut entries = vec![0_i32; users * users];
    for k in 0..users {
        let rk = s.row(k);
        for i in k..users {
            let w: i32 = rk
                .iter()
                .zip(s.row(i))
                .map(|(&a, &b)| i32::from(a) * i32::from(b))
                .sum();
            entries[k * users + i] = w;
            entries[i * users + k] = w;
        }
    }
    CorrelationMatrix {
        users,
        chips: s.chips,
        entries,
    }
}

/// A ±1 assignment of one bit per user.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Codeword(Vec<i8>);

impl Codeword {
    pub fn new(bits: Vec<i8>) -> Result<Self> {
        if bits.iter().any(|&b| b != 1 && b != -1) {
            return Err(Error::Malformed("codeword bits must be +1 or -1"));
        }
        Ok(Self(bits))
    }

    /// Codeword whose bit `k` is `−1` exactly when bit `k` of `index` is set.
    pub fn from_index(users: usize, index: u64) -> Self {
        Self(
            (0..users)
                .map(|k| if (index >> k) & 1 == 1 { -1 } else { 1 })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[i8] {
        &self.0
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|&b| -b).collect())
    }
}

/// `h_k = Σ_i W_ki x_i`, the matched-filter output scaled by `N`.
pub fn matched_filter(w: &CorrelationMatrix, x: &Codeword) -> Result<Vec<i64>> {
    if x.len() != w.users {
        return Err(Error::DimensionMismatch {
            expected: w.users,
            found: x.len(),
        });
    }
    Ok((0..w.users)
        .map(|k| {
            w.row(k)
                .iter()
                .zip(x.bits())
                .map(|(&wk, &xi)| i64::from(wk) * i64::from(xi))
                .sum()
        })
        .collect())
}

/// Whether hard-slicing every matched-filter output returns `x`.
pub fn is_valid(w: &CorrelationMatrix, x: &Codeword, policy: TiePolicy) -> Result<bool> {
    let h = matched_filter(w, x)?;
    Ok(h
        .iter()
        .zip(x.bits())
        .all(|(&hk, &xk)| policy.accepts(hk * i64::from(xk))))
}
