//! Half-size subset-sum counting instances and their strengthened form.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::limits::Limits;

/// `B` (nondecreasing, entries in `0..=2^n`), a half-size index set `W`
/// (0-based here, 1-based in files) and a threshold `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompInstance {
    b: Vec<BigInt>,
    w_set: Vec<usize>,
    t: BigInt,
}

impl CompInstance {
    pub fn new(b: Vec<BigInt>, mut w_set: Vec<usize>, t: BigInt) -> Result<Self> {
        let n = b.len();
        if n < 2 || n % 2 == 1 {
            return Err(Error::invalid(format!("B must have a positive even size, got {n}")));
        }
        let cap = BigInt::one() << n;
        if let Some(x) = b.iter().find(|x| x.is_negative() || **x > cap) {
            return Err(Error::invalid(format!("entry {x} of B is outside [0, 2^{n}]")));
        }
        if b.windows(2).any(|p| p[0] > p[1]) {
            return Err(Error::invalid("B must be nondecreasing"));
        }
        w_set.sort_unstable();
        w_set.dedup();
        if w_set.len() != n / 2 || w_set.iter().any(|&i| i >= n) {
            return Err(Error::invalid(format!("W must hold {} distinct indices of B", n / 2)));
        }
        Ok(CompInstance { b, w_set, t })
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn b(&self) -> &[BigInt] {
        &self.b
    }

    /// 0-based indices of `W`, increasing.
    pub fn w_set(&self) -> &[usize] {
        &self.w_set
    }

    pub fn t(&self) -> &BigInt {
        &self.t
    }

    /// `w = Σ_{i∈W} b_i`.
    pub fn target(&self) -> BigInt {
        self.w_set.iter().map(|&i| &self.b[i]).sum()
    }

    pub fn with_t(&self, t: BigInt) -> CompInstance {
        CompInstance { t, ..self.clone() }
    }

    /// Whether the two structural conditions hold:
    /// `b_1+…+b_{n/2-1}+b_n ≥ w` and `b_2+b_{n/2+1}+…+b_{n-1} < w` (1-based).
    pub fn conditions(&self) -> (bool, bool) {
        let n = self.n();
        let h = n / 2;
        let w = self.target();
        let first: BigInt = self.b[..h - 1].iter().sum::<BigInt>() + &self.b[n - 1];
        let second: BigInt = self.b[1].clone() + self.b[h..n - 1].iter().sum::<BigInt>();
        (first >= w, second < w)
    }
}

/// A [`CompInstance`] known to satisfy both structural conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompStarInstance(CompInstance);

impl CompStarInstance {
    pub fn new(inst: CompInstance) -> Result<Self> {
        match inst.conditions() {
            (true, true) => Ok(CompStarInstance(inst)),
            (c1, c2) => Err(Error::invalid(format!(
                "instance violates the structural conditions (first holds: {c1}, second holds: {c2})"
            ))),
        }
    }

    pub fn inner(&self) -> &CompInstance {
        &self.0
    }
}

/// Number of `n/2`-subsets whose sum reaches `w`.
pub fn count_tstar(inst: &CompInstance, limits: &Limits) -> Result<u128> {
    count_with(inst, limits, |_| ()).map(|(c, _)| c)
}

/// Enumerates every `n/2`-subset, counting those reaching `w` and folding
/// `on_short` over the bitmasks of those falling short.
pub(crate) fn count_with<T: Send>(
    inst: &CompInstance,
    limits: &Limits,
    on_short: impl Fn(u64) -> T + Sync,
) -> Result<(u128, Vec<T>)> {
    let n = inst.n();
    if n > 63 {
        return Err(Error::budget("half-size subsets", format!("C({n},{})", n / 2), limits.max_subsets));
    }
    let total = binomial(n as u128, (n / 2) as u128);
    if total > limits.max_subsets {
        return Err(Error::budget("half-size subsets", total, limits.max_subsets));
    }
    let w = inst.target();
    let k = n / 2;
    // Split on the smallest member of each subset.
    let parts: Vec<(u128, Vec<T>)> = (0..=n - k)
        .into_par_iter()
        .map(|first| {
            let mut count = 0u128;
            let mut short = Vec::new();
            let mut idx: Vec<usize> = (first..first + k).collect();
            loop {
                let sum: BigInt = idx.iter().map(|&i| &inst.b[i]).sum();
                if sum >= w {
                    count += 1;
                } else {
                    short.push(on_short(idx.iter().fold(0u64, |m, &i| m | 1 << i)));
                }
                if !advance_tail(&mut idx, n) {
                    break;
                }
            }
            (count, short)
        })
        .collect();
    let mut count = 0;
    let mut short = Vec::new();
    for (c, s) in parts {
        count += c;
        short.extend(s);
    }
    Ok((count, short))
}

/// Next combination keeping `idx[0]` fixed.
fn advance_tail(idx: &mut [usize], n: usize) -> bool {
    let r = idx.len();
    let mut i = r;
    while i > 1 {
        i -= 1;
        if idx[i] < n - r + i {
            idx[i] += 1;
            for j in i + 1..r {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Builds the strengthened instance and its threshold `t'` from a plain one.
///
/// `B'` holds `2^{2n} + b_i` for each `i`, one `2^{4n}`, `3n/2` copies of
/// `2^{3n}` and `3n/2 - 1` zeros; `W'` selects every `2^{3n}` copy and the
/// shifted members of `W`. `t' = C(4n-1, 2n-1) + t`.
pub fn comp_to_compstar(inst: &CompInstance) -> Result<(CompStarInstance, BigInt)> {
    let n = inst.n();
    let shift = BigInt::one() << (2 * n);
    let mut tagged: Vec<(BigInt, bool)> = Vec::with_capacity(4 * n);
    for (i, b) in inst.b.iter().enumerate() {
        tagged.push((&shift + b, inst.w_set.binary_search(&i).is_ok()));
    }
    tagged.push((BigInt::one() << (4 * n), false));
    for _ in 0..3 * n / 2 {
        tagged.push((BigInt::one() << (3 * n), true));
    }
    for _ in 0..3 * n / 2 - 1 {
        tagged.push((BigInt::zero(), false));
    }
    tagged.sort_by(|a, b| a.0.cmp(&b.0));
    let w_set: Vec<usize> = tagged.iter().enumerate().filter(|(_, (_, in_w))| *in_w).map(|(i, _)| i).collect();
    let t_prime = BigInt::from(binomial(4 * n as u128 - 1, 2 * n as u128 - 1)) + &inst.t;
    let reduced = CompInstance::new(tagged.into_iter().map(|(v, _)| v).collect(), w_set, t_prime.clone())?;
    let star = CompStarInstance::new(reduced)
        .map_err(|e| Error::Consistency(format!("reduced instance: {e}")))?;
    Ok((star, t_prime))
}
