use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Factor dimensions `(m, n)` of `M_m ⊗ M_n` together with the range index `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawShape", into = "RawShape")]
pub struct BipartiteShape {
    m: usize,
    n: usize,
    k: usize,
}

impl BipartiteShape {
    /// Requires `m, n ≥ 2` and `1 ≤ k ≤ mn − 1`.
    pub fn new(m: usize, n: usize, k: usize) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(Error::Domain(format!("factor dimensions must be at least 2, got ({m}, {n})")));
        }
        if k < 1 || k >= m * n {
            return Err(Error::Domain(format!(
                "k must lie in 1..={} for (m, n) = ({m}, {n}), got {k}",
                m * n - 1
            )));
        }
        Ok(Self { m, n, k })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `mn`, the dimension of the product space.
    pub fn dim(&self) -> usize {
        self.m * self.n
    }

    /// `mn = 2k`, the case that admits the affine preservers.
    pub fn is_half(&self) -> bool {
        self.m * self.n == 2 * self.k
    }

    pub fn with_k(&self, k: usize) -> Result<Self> {
        Self::new(self.m, self.n, k)
    }

    /// Every valid `k` for these factor dimensions.
    pub fn all_k(m: usize, n: usize) -> Result<Vec<Self>> {
        Self::new(m, n, 1)?;
        Ok((1..m * n).map(|k| Self { m, n, k }).collect())
    }
}

#[derive(Serialize, Deserialize)]
struct RawShape {
    m: usize,
    n: usize,
    k: usize,
}

impl TryFrom<RawShape> for BipartiteShape {
    type Error = Error;

    fn try_from(raw: RawShape) -> Result<Self> {
        Self::new(raw.m, raw.n, raw.k)
    }
}

impl From<BipartiteShape> for RawShape {
    fn from(s: BipartiteShape) -> Self {
        Self { m: s.m, n: s.n, k: s.k }
    }
}
