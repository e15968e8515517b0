//! Palette arithmetic: the step `k`, the modulus `K`, the edge palette `L`
//! and the residue-disjointness check on `L`.
//!
//! All quantities are exact 128-bit integers; overflow is reported, never
//! wrapped.

use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode};

use crate::error::ParamsError;

pub type Colour = i128;

/// Non-negative remainder of `x` modulo `modulus`.
pub fn residue(x: i128, modulus: i128) -> i128 {
    x.rem_euclid(modulus)
}

/// Closed integer interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub lo: i128,
    pub hi: i128,
}

impl Interval {
    pub fn len(&self) -> i128 {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }
}

/// Sorted union of disjoint intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalList {
    intervals: Vec<Interval>,
}

impl IntervalList {
    pub fn new(mut intervals: Vec<Interval>) -> Self {
        intervals.retain(|i| !i.is_empty());
        intervals.sort_by_key(|i| i.lo);
        IntervalList { intervals }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> i128 {
        self.intervals.iter().map(Interval::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn min(&self) -> Option<i128> {
        self.intervals.first().map(|i| i.lo)
    }

    pub fn max(&self) -> Option<i128> {
        self.intervals.last().map(|i| i.hi)
    }

    /// The `index`-th smallest element (0-based).
    pub fn nth(&self, index: i128) -> Option<i128> {
        let mut rest = index;
        for iv in &self.intervals {
            if rest < iv.len() {
                return Some(iv.lo + rest);
            }
            rest -= iv.len();
        }
        None
    }

    pub fn contains(&self, x: i128) -> bool {
        self.intervals.iter().any(|i| i.lo <= x && x <= i.hi)
    }

    pub fn iter(&self) -> impl Iterator<Item = i128> + '_ {
        self.intervals.iter().flat_map(|i| i.lo..=i.hi)
    }
}

impl fmt::Display for IntervalList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|i| format!("[{}..{}]", i.lo, i.hi))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaletteParams {
    pub delta: i128,
    pub r: u32,
    /// Step `k = ceil(Δ^{r-4/3} ln²Δ)`.
    pub k: i128,
    /// Modulus: least multiple of `k` that is at least `Δ^{r-1} + 6Δ + k`.
    pub modulus: i128,
    /// Edge palette, `Δ + 1` integers inside `[K+1, K+4Δ+1]`.
    pub edge_palette: IntervalList,
    /// `2K + k + 4Δ + 1`.
    pub palette_max: i128,
}

impl PaletteParams {
    /// Residues modulo `K` of the colours an edge with base colour `base`
    /// may ever take: `{base-k, base, base+k, base+2k}`.
    pub fn edge_residue_window(&self, base: i128) -> [i128; 4] {
        [-1, 0, 1, 2].map(|j| residue(base + j * self.k, self.modulus))
    }
}

fn overflow(delta: u64, r: u32) -> ParamsError {
    ParamsError::Overflow { delta, r }
}

pub fn compute_params(delta: u64, r: u32) -> Result<PaletteParams, ParamsError> {
    if delta < 2 {
        return Err(ParamsError::DegreeTooSmall(delta));
    }
    if r < 2 {
        return Err(ParamsError::RadiusTooSmall(r));
    }
    let ov = || overflow(delta, r);
    let d = delta as i128;
    let k = ceil_step(delta, r)?;
    let power = d.checked_pow(r - 1).ok_or_else(ov)?;
    let floor_k = power
        .checked_add(d.checked_mul(6).ok_or_else(ov)?)
        .and_then(|x| x.checked_add(k))
        .ok_or_else(ov)?;
    let modulus = ceil_div(floor_k, k).checked_mul(k).ok_or_else(ov)?;

    // Intervals of length k every 4k from K+1; the last one is truncated so
    // that exactly Δ+1 integers are covered.
    let pieces = ceil_div(d + 1, k);
    let stride = k.checked_mul(4).ok_or_else(ov)?;
    let mut intervals = Vec::new();
    for l in 1..pieces {
        let start = modulus + (l - 1) * stride + 1;
        intervals.push(Interval {
            lo: start,
            hi: start + k - 1,
        });
    }
    let start = modulus + (pieces - 1) * stride + 1;
    let last_len = (d + 1) - (pieces - 1) * k;
    intervals.push(Interval {
        lo: start,
        hi: start + last_len - 1,
    });

    let palette_max = modulus
        .checked_mul(2)
        .and_then(|x| x.checked_add(k))
        .and_then(|x| x.checked_add(4 * d + 1))
        .ok_or_else(ov)?;
    Ok(PaletteParams {
        delta: d,
        r,
        k,
        modulus,
        edge_palette: IntervalList::new(intervals),
        palette_max,
    })
}

fn ceil_div(a: i128, b: i128) -> i128 {
    (a + b - 1).div_euclid(b)
}

/// Upper bound `2Δ^{r-1} + 5Δ^{r-4/3} ln²Δ + 16Δ + 6` on the palette size,
/// evaluated in double precision.
pub fn asymptotic_bound(delta: u64, r: u32) -> f64 {
    let d = delta as f64;
    let ln = d.ln();
    let r = r as f64;
    2.0 * d.powf(r - 1.0) + 5.0 * d.powf(r - 4.0 / 3.0) * ln * ln + 16.0 * d + 6.0
}

/// `ceil(Δ^{r-4/3} ln²Δ)` decided with enclosing intervals at increasing
/// binary precision. The real value is transcendental, so it is never an
/// integer and some precision always separates it from its ceiling.
fn ceil_step(delta: u64, r: u32) -> Result<i128, ParamsError> {
    let df = delta as f64;
    let estimate = df.powf(r as f64 - 4.0 / 3.0) * df.ln().powi(2);
    if !estimate.is_finite() || estimate > 1e36 {
        return Err(overflow(delta, r));
    }
    let rm = RoundingMode::ToEven;
    for prec in [192usize, 384, 768, 1536, 3072] {
        let mut consts = Consts::new().map_err(|_| overflow(delta, r))?;
        let d = BigFloat::from_u64(delta, prec);
        let ln = d.ln(prec, rm, &mut consts);
        let mut value = d.mul(&d, prec, rm).cbrt(prec, rm);
        for _ in 2..r {
            value = value.mul(&d, prec, rm);
        }
        value = value.mul(&ln, prec, rm).mul(&ln, prec, rm);
        // Fewer than 2r + 8 correctly rounded operations; a relative slack of
        // 2^-(prec-64) encloses their accumulated error with a wide margin.
        let slack = value.mul(&pow2_neg(prec - 64, prec), prec, rm);
        let lo = value.sub(&slack, prec, rm);
        let hi = value.add(&slack, prec, rm);

        let c = smallest_integer_at_least(&hi, estimate, prec);
        let below = BigFloat::from_i128(c - 1, prec);
        if below < lo {
            return Ok(c);
        }
    }
    Err(overflow(delta, r))
}

fn pow2_neg(exp: usize, prec: usize) -> BigFloat {
    let mut x = BigFloat::from_u64(1, prec);
    x.set_exponent(1 - exp as i32);
    x
}

/// Least integer `c` with `c >= x`, searched around an f64 estimate of `x`.
fn smallest_integer_at_least(x: &BigFloat, estimate: f64, prec: usize) -> i128 {
    let centre = estimate.ceil() as i128;
    let mut radius = (estimate * 1e-9) as i128 + 4;
    loop {
        let (mut lo, mut hi) = (centre - radius, centre + radius);
        if BigFloat::from_i128(lo, prec) < *x && BigFloat::from_i128(hi, prec) >= *x {
            // Invariant: lo < x <= hi.
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if BigFloat::from_i128(mid, prec) >= *x {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return hi;
        }
        radius = radius.saturating_mul(16);
    }
}

/// Outcome of the residue-disjointness check on `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LPropertyCheck {
    pub holds: bool,
    /// Two distinct elements of `L` whose residue windows meet modulo `K`.
    pub witness: Option<(i128, i128)>,
}

pub fn check_l_property(params: &PaletteParams) -> LPropertyCheck {
    check_windows_disjoint(params.k, params.modulus, &params.edge_palette)
}

/// For distinct `i1, i2` in `palette`, the windows `{i - k, i, i + k, i + 2k}`
/// must not share a residue modulo `modulus`. Equivalently `i1 - i2` is never
/// congruent to `j k` for `j` in `-3..=3`. Differences between two intervals
/// form an interval, so each interval pair is settled arithmetically.
pub fn check_windows_disjoint(k: i128, modulus: i128, palette: &IntervalList) -> LPropertyCheck {
    let ivs = palette.intervals();
    for (ai, a) in ivs.iter().enumerate() {
        for (bi, b) in ivs.iter().enumerate() {
            let lo = a.lo - b.hi;
            let hi = a.hi - b.lo;
            for j in 0..=3 {
                let target = residue(j * k, modulus);
                let mut d = lo + residue(target - lo, modulus);
                if ai == bi && d == 0 {
                    d += modulus;
                }
                if d <= hi {
                    let i2 = b.lo.max(a.lo - d);
                    return LPropertyCheck {
                        holds: false,
                        witness: Some((i2 + d, i2)),
                    };
                }
            }
        }
    }
    LPropertyCheck {
        holds: true,
        witness: None,
    }
}
