//! Clebsch-Gordan coefficients in the Condon-Shortley convention.
//!
//! [`cg_coefficient`] evaluates the Racah formula with the alternating sum
//! carried out in exact integer arithmetic, so it stays accurate for large
//! angular momenta where the floating-point sum cancels catastrophically.
//! [`CouplingTable`] produces every coefficient `<S m1; S m2 | K Q>` for two
//! equal spins at once, from the eigenvectors of `J^2` in each fixed-`Q`
//! block.

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::spin::ln_factorials;

/// `<j1 m1; j2 m2 | j m>`. Arguments are integers or half-integers;
/// anything violating the selection rules returns 0.
pub fn cg_coefficient(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> f64 {
    let doubled = |x: f64| {
        let d = 2.0 * x;
        if (d - d.round()).abs() > 1e-9 {
            None
        } else {
            Some(d.round() as i64)
        }
    };
    match (
        doubled(j1),
        doubled(m1),
        doubled(j2),
        doubled(m2),
        doubled(j),
        doubled(m),
    ) {
        (Some(a), Some(b), Some(c), Some(d), Some(e), Some(f)) => cg_doubled(a, b, c, d, e, f),
        _ => 0.0,
    }
}

fn valid_pair(tj: i64, tm: i64) -> bool {
    tj >= 0 && tm.abs() <= tj && (tj + tm) % 2 == 0
}

/// Same as [`cg_coefficient`] with every argument doubled (`2j`, `2m`).
pub fn cg_doubled(tj1: i64, tm1: i64, tj2: i64, tm2: i64, tj: i64, tm: i64) -> f64 {
    if !(valid_pair(tj1, tm1) && valid_pair(tj2, tm2) && valid_pair(tj, tm)) {
        return 0.0;
    }
    if tm1 + tm2 != tm || tj < (tj1 - tj2).abs() || tj > tj1 + tj2 || (tj1 + tj2 + tj) % 2 != 0 {
        return 0.0;
    }
    // all of these are non-negative integers once the rules above hold
    let a = (tj1 + tj2 - tj) / 2;
    let b = (tj1 - tm1) / 2;
    let c = (tj2 + tm2) / 2;
    let d = (tj - tj2 + tm1) / 2;
    let e = (tj - tj1 - tm2) / 2;
    let p = (tj + tj1 - tj2) / 2;
    let q = (tj - tj1 + tj2) / 2;

    let k_lo = 0.max(-d).max(-e);
    let k_hi = a.min(b).min(c);
    let mut sum = BigInt::zero();
    for k in k_lo..=k_hi {
        let term = BigInt::from(binomial(a, k) * binomial(p, b - k) * binomial(q, c - k));
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }

    let top = ((tj1 + tj2 + tj) / 2 + 1) as usize;
    let lf = ln_factorials(top);
    let f = |x: i64| lf[x as usize];
    let ln_pref = 0.5
        * ((tj as f64 + 1.0).ln()
            + f((tj + tm) / 2)
            + f((tj - tm) / 2)
            + f((tj1 - tm1) / 2)
            + f((tj1 + tm1) / 2)
            + f((tj2 - tm2) / 2)
            + f((tj2 + tm2) / 2)
            - f((tj1 + tj2 + tj) / 2 + 1)
            - f(a)
            - f(p)
            - f(q));
    let sign = if sum.is_negative() { -1.0 } else { 1.0 };
    sign * (ln_pref + ln_abs(&sum)).exp()
}

fn binomial(n: i64, r: i64) -> BigUint {
    if r < 0 || r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= BigUint::from((n - i) as u64);
        acc /= BigUint::from((i + 1) as u64);
    }
    acc
}

fn ln_abs(x: &BigInt) -> f64 {
    let mag = x.magnitude();
    let bits = mag.bits();
    if bits <= 1000 {
        return mag.to_f64().expect("finite below 2^1000").ln();
    }
    let shift = bits - 64;
    let top = (mag >> shift).to_f64().expect("64-bit mantissa");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// All coefficients `<S m1; S m2 | K Q>` for two spin-`S` systems, `S = N/2`.
///
/// Entries are addressed by Fock-style indices `k = m + S` in `0..=N`.
#[derive(Debug, Clone)]
pub struct CouplingTable {
    n: usize,
    /// `blocks[Q]` for `Q >= 0`: row `K - Q`, column `N - k1`.
    blocks: Vec<DMatrix<f64>>,
}

/// Coefficients `<S m1; S m2 | K Q>` for one `Q >= 0`, `S = N/2`: row
/// `K - Q`, column `i` with `m1 = S - i`, `m2 = Q - S + i`.
pub fn coupling_block(n: usize, q: usize) -> DMatrix<f64> {
    let s = n as f64 / 2.0;
    let ladder = |m: f64, up: bool| {
        let v = s * (s + 1.0) - if up { m * (m + 1.0) } else { m * (m - 1.0) };
        v.max(0.0).sqrt()
    };
    let size = n + 1 - q;
    let m1 = |i: usize| s - i as f64;
    let m2 = |i: usize| q as f64 - s + i as f64;
    let mut j2 = DMatrix::<f64>::zeros(size, size);
    for i in 0..size {
        j2[(i, i)] = 2.0 * s * (s + 1.0) + 2.0 * m1(i) * m2(i);
        if i + 1 < size {
            // J1+ J2- takes basis i+1 to basis i
            let v = ladder(m1(i + 1), true) * ladder(m2(i + 1), false);
            j2[(i, i + 1)] = v;
            j2[(i + 1, i)] = v;
        }
    }
    let eig = SymmetricEigen::new(j2);
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    DMatrix::from_fn(size, size, |row, col| {
        let v = eig.eigenvectors.column(order[row]);
        // Condon-Shortley: <S S; S Q-S | K Q> > 0
        let sign = if v[0] < 0.0 { -1.0 } else { 1.0 };
        sign * v[col]
    })
}

impl CouplingTable {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            blocks: (0..=n).map(|q| coupling_block(n, q)).collect(),
        }
    }

    pub fn particle_number(&self) -> usize {
        self.n
    }

    /// `<S, k1-S; S, k2-S | K, k1+k2-N>`.
    pub fn get(&self, k: usize, k1: usize, k2: usize) -> f64 {
        let n = self.n;
        let q = k1 as i64 + k2 as i64 - n as i64;
        if k > n || q.unsigned_abs() as usize > k {
            return 0.0;
        }
        if q >= 0 {
            let q = q as usize;
            self.blocks[q][(k - q, n - k1)]
        } else {
            // <S -m1; S -m2 | K -Q> = (-1)^(2S-K) <S m1; S m2 | K Q>
            let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
            sign * self.get(k, n - k1, n - k2)
        }
    }
}
