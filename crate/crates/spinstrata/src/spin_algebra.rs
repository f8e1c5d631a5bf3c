//! r-spin structures stored by their values on a framed geometric basis
//! (â_1…â_g, b̂_1…b̂_g). The value on the fibre class is always 1 and is
//! never stored.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Even,
    Odd,
}

impl Spin {
    pub fn from_bit(b: u8) -> Spin {
        if b % 2 == 0 {
            Spin::Even
        } else {
            Spin::Odd
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Spin::Even => 0,
            Spin::Odd => 1,
        }
    }
}

impl std::str::FromStr for Spin {
    type Err = Error;
    fn from_str(s: &str) -> Result<Spin> {
        match s {
            "even" => Ok(Spin::Even),
            "odd" => Ok(Spin::Odd),
            _ => Err(Error::InvalidInput(format!("spin must be even or odd, got {s}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpinStructure {
    pub r: u64,
    /// φ(â_1), …, φ(â_g), φ(b̂_1), …, φ(b̂_g), each in 0..r.
    pub values: Vec<u64>,
}

impl SpinStructure {
    pub fn new(r: u64, values: Vec<u64>) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidInput("r must be positive".into()));
        }
        if values.len() % 2 != 0 || values.is_empty() {
            return Err(Error::InvalidInput("need 2g basis values".into()));
        }
        Ok(SpinStructure { r, values: values.into_iter().map(|x| x % r).collect() })
    }

    pub fn g(&self) -> usize {
        self.values.len() / 2
    }

    /// Value on a framed class (2g homology coordinates, then the fibre
    /// coefficient).
    pub fn eval(&self, framed: &[u64]) -> u64 {
        let r = self.r;
        let mut s = framed[2 * self.g()] % r;
        for (x, v) in framed.iter().zip(&self.values) {
            s = (s + x % r * v) % r;
        }
        s
    }
}

/// A Z/2 quadratic refinement of the intersection form, stored by its
/// values on a symplectic basis (v_1…v_g, w_1…w_g).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub values: Vec<u8>,
}

impl QuadraticForm {
    pub fn new(values: Vec<u8>) -> Self {
        QuadraticForm { values: values.into_iter().map(|x| x & 1).collect() }
    }

    pub fn g(&self) -> usize {
        self.values.len() / 2
    }

    /// q(Σ x_k e_k) = Σ x_k q(e_k) + Σ_i x_i x_{g+i}.
    pub fn eval(&self, x: &[u8]) -> u8 {
        let g = self.g();
        let mut s = 0u8;
        for k in 0..2 * g {
            s ^= x[k] & self.values[k];
        }
        for i in 0..g {
            s ^= x[i] & x[g + i];
        }
        s & 1
    }

    /// q(x) = φ(x) + 1 mod 2 on simple closed curves.
    pub fn from_spin(phi: &SpinStructure) -> Result<Self> {
        if phi.r % 2 != 0 {
            return Err(Error::Unsupported(format!("parity is undefined for odd r = {}", phi.r)));
        }
        Ok(QuadraticForm::new(phi.values.iter().map(|&v| ((v + 1) % 2) as u8).collect()))
    }
}

pub fn arf_of_form(q: &QuadraticForm) -> u8 {
    let g = q.g();
    (0..g).map(|i| q.values[i] & q.values[g + i]).fold(0, |a, b| a ^ b)
}

pub fn arf_of_spin(phi: &SpinStructure) -> Result<u8> {
    if phi.r % 2 != 0 {
        return Err(Error::Unsupported(format!("parity is undefined for odd r = {}", phi.r)));
    }
    let g = phi.g();
    Ok((0..g).map(|i| ((phi.values[i] + 1) * (phi.values[g + i] + 1) % 2) as u8).fold(0, |a, b| a ^ b))
}

pub fn reduce_spin(phi: &SpinStructure, s: u64) -> Result<SpinStructure> {
    if s == 0 || phi.r % s != 0 {
        return Err(Error::InvalidInput(format!("{s} does not divide {}", phi.r)));
    }
    SpinStructure::new(s, phi.values.clone())
}

/// Lift of a mod-2 class to framed homology: the sum of the basis lifts
/// taken in order, plus ⟨a,b⟩α at every partial sum.
pub fn johnson_lift(x: &[u8]) -> Vec<u8> {
    johnson_lift_ordered(x, &(0..x.len()).collect::<Vec<_>>())
}

/// Same as [`johnson_lift`] with the basis summands added in `order`.
pub fn johnson_lift_ordered(x: &[u8], order: &[usize]) -> Vec<u8> {
    let n = x.len();
    let g = n / 2;
    let mut acc = vec![0u8; n + 1];
    for &k in order {
        if x[k] & 1 == 0 {
            continue;
        }
        let mut e = vec![0u8; n];
        e[k] = 1;
        let pairing = mod2_form(&acc[..n], &e, g);
        for t in 0..n {
            acc[t] ^= e[t];
        }
        acc[n] ^= pairing;
    }
    acc
}

pub fn mod2_form(x: &[u8], y: &[u8], g: usize) -> u8 {
    let mut s = 0;
    for i in 0..g {
        s ^= (x[i] & y[g + i]) ^ (x[g + i] & y[i]);
    }
    s & 1
}

pub const DEFAULT_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub r: u64,
    pub g: usize,
    pub total: u64,
    pub even: Option<u64>,
    pub odd: Option<u64>,
    pub formula_even: Option<u64>,
    pub formula_odd: Option<u64>,
}

fn checked_pow(base: u64, exp: usize) -> Option<u64> {
    base.checked_pow(exp as u32)
}

pub fn formula_counts(r: u64, g: usize) -> Option<(u64, u64)> {
    if r % 2 != 0 {
        return None;
    }
    let half = checked_pow(r / 2, 2 * g)?;
    let base = 1u64 << (g - 1);
    let two_g = 1u64 << g;
    Some((half * base * (two_g + 1), half * base * (two_g - 1)))
}

pub fn census(r: u64, g: usize, cap: u64) -> Result<Census> {
    census_threaded(r, g, cap, 1)
}

/// Exhaustive census over Z_r^{2g}, split across `threads` workers.
pub fn census_threaded(r: u64, g: usize, cap: u64, threads: usize) -> Result<Census> {
    if r == 0 || g == 0 {
        return Err(Error::InvalidInput("need r ≥ 1 and g ≥ 1".into()));
    }
    let total = checked_pow(r, 2 * g).ok_or(Error::CapExceeded { cap, needed: u64::MAX })?;
    if total > cap {
        return Err(Error::CapExceeded { cap, needed: total });
    }
    let (formula_even, formula_odd) = match formula_counts(r, g) {
        Some((e, o)) => (Some(e), Some(o)),
        None => (None, None),
    };
    if r % 2 != 0 {
        return Ok(Census { r, g, total, even: None, odd: None, formula_even, formula_odd });
    }
    let threads = threads.max(1) as u64;
    let chunk = total.div_ceil(threads);
    let even: u64 = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let lo = t * chunk;
                let hi = ((t + 1) * chunk).min(total);
                s.spawn(move || count_even(r, g, lo, hi))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).sum()
    });
    Ok(Census { r, g, total, even: Some(even), odd: Some(total - even), formula_even, formula_odd })
}

fn count_even(r: u64, g: usize, lo: u64, hi: u64) -> u64 {
    let mut count = 0;
    let mut digits = vec![0u64; 2 * g];
    for idx in lo..hi {
        let mut x = idx;
        for d in digits.iter_mut() {
            *d = x % r;
            x /= r;
        }
        let arf = (0..g).map(|i| (digits[i] + 1) * (digits[g + i] + 1) % 2).sum::<u64>() % 2;
        if arf == 0 {
            count += 1;
        }
    }
    count
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Checks that κ is a partition of 2g − 2 into positive parts and returns g.
pub fn genus_of_partition(kappa: &[usize]) -> Result<usize> {
    if kappa.is_empty() || kappa.contains(&0) {
        return Err(Error::InvalidInput(format!("{kappa:?} is not a partition into positive parts")));
    }
    let s: usize = kappa.iter().sum();
    if s % 2 != 0 {
        return Err(Error::InvalidInput(format!("{kappa:?} has odd sum")));
    }
    Ok(s / 2 + 1)
}

pub fn gcd_of(kappa: &[usize]) -> u64 {
    kappa.iter().fold(0, |a, &k| gcd(a, k as u64))
}

/// Smallest genus at which the component theorems apply.
pub fn genus_threshold(r: u64) -> usize {
    match r {
        4 => 13,
        8 => 21,
        _ => 5,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCensus {
    pub kappa: Vec<usize>,
    pub g: usize,
    pub r: u64,
    /// g ≥ g(r): the counts are theorems rather than predictions.
    pub hypothesis_met: bool,
    /// Odd r gives an exact count; even r gives lower bounds.
    pub exact: bool,
    pub components: u64,
    pub even: Option<u64>,
    pub odd: Option<u64>,
    /// Indices of the spin stabilizers, one per orbit of Mod(S) on spin structures.
    pub stabilizer_indices: Vec<u64>,
    pub census: Census,
    pub agrees_with_census: bool,
}

pub fn component_census(kappa: &[usize], g: usize, cap: u64) -> Result<ComponentCensus> {
    let g0 = genus_of_partition(kappa)?;
    if g0 != g {
        return Err(Error::InvalidInput(format!("{kappa:?} is not a partition of 2g−2 = {}", 2 * g - 2)));
    }
    let r = gcd_of(kappa);
    let gg = g as u64;
    if r == 2 * gg - 2 || r == gg - 1 {
        return Err(Error::Unsupported(format!(
            "r = {r} ∈ {{2g−2, g−1}}: the stratum has infinitely many hyperelliptic components, so no finite count exists"
        )));
    }
    let census = census(r, g, cap)?;
    let components = checked_pow(r, 2 * g).ok_or(Error::Overflow("component count"))?;
    let (even, odd) = match formula_counts(r, g) {
        Some((e, o)) => (Some(e), Some(o)),
        None => (None, None),
    };
    let stabilizer_indices = match (even, odd) {
        (Some(e), Some(o)) => vec![e, o],
        _ => vec![components],
    };
    let agrees = census.total == components && census.even == even && census.odd == odd;
    Ok(ComponentCensus {
        kappa: kappa.to_vec(),
        g,
        r,
        hypothesis_met: g >= genus_threshold(r),
        exact: r % 2 == 1,
        components,
        even,
        odd,
        stabilizer_indices,
        census,
        agrees_with_census: agrees,
    })
}

/// Partitions of `n` into positive parts, parts in non-increasing order.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=n.min(max)).rev() {
            cur.push(p);
            go(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}
