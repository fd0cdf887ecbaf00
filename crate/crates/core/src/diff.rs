//! Uniform-grid sampled fields and Richardson-extrapolated central differences.
//!
//! A [`Sampled`] value lives on a sub-range of a master grid `s_k = s0 + k h`.
//! Every derivative shrinks the valid range by the stencil half-width, so
//! nested derivatives carry their own offset into the master grid.

use std::ops::{Add, Mul, Range};

use crate::error::{Error, Result};

/// Default grid spacing for curve analysis on unit-scale data.
pub const DEFAULT_SPACING: f64 = 0.02;

/// Number of Richardson levels applied on top of the plain central difference.
///
/// Level 0 is the 3-point stencil, level 1 the 5-point 4th-order stencil and
/// level 2 a 9-point 6th-order combination.
pub const DEFAULT_RICHARDSON_LEVELS: usize = 2;

/// A field sampled on `offset..offset + values.len()` of a master grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled<T> {
    pub offset: usize,
    pub values: Vec<T>,
}

impl<T> Sampled<T> {
    pub fn new(offset: usize, values: Vec<T>) -> Self {
        Self { offset, values }
    }

    pub fn range(&self) -> Range<usize> {
        self.offset..self.offset + self.values.len()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.range().contains(&k)
    }

    /// Value at master-grid index `k`.
    ///
    /// Panics when `k` is outside the valid range.
    pub fn at(&self, k: usize) -> &T {
        assert!(
            self.contains(k),
            "index {k} outside valid range {:?}",
            self.range()
        );
        &self.values[k - self.offset]
    }

    pub fn get(&self, k: usize) -> Option<&T> {
        if self.contains(k) {
            Some(&self.values[k - self.offset])
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pointwise map keeping the grid placement.
    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Sampled<U> {
        Sampled::new(self.offset, self.values.iter().map(f).collect())
    }

    /// Pointwise map with access to the master-grid index.
    pub fn map_indexed<U>(&self, mut f: impl FnMut(usize, &T) -> U) -> Sampled<U> {
        Sampled::new(
            self.offset,
            self.values
                .iter()
                .enumerate()
                .map(|(i, v)| f(self.offset + i, v))
                .collect(),
        )
    }

    /// Restrict to `range` (which must lie inside the valid range).
    pub fn restrict(&self, range: Range<usize>) -> Sampled<T>
    where
        T: Clone,
    {
        assert!(range.start >= self.offset && range.end <= self.range().end);
        let lo = range.start - self.offset;
        let hi = range.end - self.offset;
        Sampled::new(range.start, self.values[lo..hi].to_vec())
    }
}

/// Intersection of valid ranges.
pub fn common_range(ranges: impl IntoIterator<Item = Range<usize>>) -> Range<usize> {
    let mut lo = 0usize;
    let mut hi = usize::MAX;
    for r in ranges {
        lo = lo.max(r.start);
        hi = hi.min(r.end);
    }
    if hi < lo {
        lo..lo
    } else {
        lo..hi
    }
}

/// Half-width of the first-derivative stencil at the given Richardson level.
pub fn half_width(levels: usize) -> usize {
    1 << levels
}

/// Weights `(offset, weight)` of the Richardson-extrapolated first derivative
/// for unit spacing. The stencil is antisymmetric; only positive offsets are
/// listed, the weight at `-j` is the negative of the weight at `+j`.
fn first_derivative_weights(levels: usize) -> Vec<(usize, f64)> {
    // Level-0 differences D(2^m h) as weight tables, then Richardson combine.
    let mut tables: Vec<Vec<(usize, f64)>> = (0..=levels)
        .map(|m| {
            let j = 1usize << m;
            vec![(j, 1.0 / (2.0 * j as f64))]
        })
        .collect();
    for level in 1..=levels {
        let factor = 4f64.powi(level as i32);
        let mut next = Vec::with_capacity(tables.len() - 1);
        for m in 0..tables.len() - 1 {
            let mut combined: Vec<(usize, f64)> = Vec::new();
            for &(j, w) in &tables[m] {
                push_weight(&mut combined, j, factor * w / (factor - 1.0));
            }
            for &(j, w) in &tables[m + 1] {
                push_weight(&mut combined, j, -w / (factor - 1.0));
            }
            next.push(combined);
        }
        tables = next;
    }
    tables.into_iter().next().unwrap_or_default()
}

fn push_weight(table: &mut Vec<(usize, f64)>, j: usize, w: f64) {
    if let Some(entry) = table.iter_mut().find(|(k, _)| *k == j) {
        entry.1 += w;
    } else {
        table.push((j, w));
    }
}

/// Richardson-extrapolated central first derivative of a sampled field.
pub fn derivative<T>(field: &Sampled<T>, h: f64, levels: usize) -> Result<Sampled<T>>
where
    T: Clone + Add<Output = T> + Mul<f64, Output = T>,
{
    let hw = half_width(levels);
    if field.len() < 2 * hw + 1 {
        return Err(Error::Stencil {
            needed: 2 * hw + 1,
            available: field.len(),
        });
    }
    let weights = first_derivative_weights(levels);
    let n = field.len();
    let mut out = Vec::with_capacity(n - 2 * hw);
    for i in hw..n - hw {
        let mut acc: Option<T> = None;
        for &(j, w) in &weights {
            let term = field.values[i + j].clone() * (w / h)
                + field.values[i - j].clone() * (-w / h);
            acc = Some(match acc {
                None => term,
                Some(a) => a + term,
            });
        }
        out.push(acc.expect("non-empty stencil"));
    }
    Ok(Sampled::new(field.offset + hw, out))
}

/// Fourth-order central second derivative `(-f2 + 16 f1 - 30 f0 + 16 f-1 - f-2) / 12h²`.
pub fn second_derivative_at<T>(f: impl Fn(isize) -> T, h: f64) -> T
where
    T: Add<Output = T> + Mul<f64, Output = T>,
{
    let s = 1.0 / (12.0 * h * h);
    f(2) * (-s) + f(1) * (16.0 * s) + f(0) * (-30.0 * s) + f(-1) * (16.0 * s) + f(-2) * (-s)
}

/// Fourth-order central first derivative `(-f2 + 8 f1 - 8 f-1 + f-2) / 12h`.
pub fn first_derivative_at<T>(f: impl Fn(isize) -> T, h: f64) -> T
where
    T: Add<Output = T> + Mul<f64, Output = T>,
{
    let s = 1.0 / (12.0 * h);
    f(2) * (-s) + f(1) * (8.0 * s) + f(-1) * (-8.0 * s) + f(-2) * s
}

/// Richardson-extrapolated central derivative of a scalar function.
pub fn derivative_fn(f: impl Fn(f64) -> f64, x: f64, h: f64, levels: usize) -> f64 {
    first_derivative_weights(levels)
        .iter()
        .map(|&(j, w)| w * (f(x + j as f64 * h) - f(x - j as f64 * h)))
        .sum::<f64>()
        / h
}

/// Vector-valued variant of [`derivative_fn`].
pub fn derivative_vec_fn<T>(f: impl Fn(f64) -> T, x: f64, h: f64, levels: usize) -> T
where
    T: Add<Output = T> + Mul<f64, Output = T>,
{
    let mut acc: Option<T> = None;
    for (j, w) in first_derivative_weights(levels) {
        let term = f(x + j as f64 * h) * (w / h) + f(x - j as f64 * h) * (-w / h);
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
    }
    acc.expect("non-empty stencil")
}

/// Mean and population standard deviation.
pub fn mean_std(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_reproduce_known_stencils() {
        let w1 = first_derivative_weights(1);
        // 5-point: (8 f1 - f2) / 12
        let get = |t: &[(usize, f64)], j| t.iter().find(|(k, _)| *k == j).map(|x| x.1).unwrap();
        assert!((get(&w1, 1) - 8.0 / 12.0).abs() < 1e-15);
        assert!((get(&w1, 2) + 1.0 / 12.0).abs() < 1e-15);
        let w2 = first_derivative_weights(2);
        assert!((get(&w2, 1) - 64.0 / 90.0).abs() < 1e-15);
        assert!((get(&w2, 2) + 20.0 / 180.0).abs() < 1e-15);
        assert!((get(&w2, 4) - 1.0 / 360.0).abs() < 1e-15);
    }

    #[test]
    fn derivative_is_exact_on_polynomials() {
        let h = 0.1;
        let f = Sampled::new(3, (0..40).map(|k| (k as f64 * h).powi(5)).collect::<Vec<_>>());
        let d = derivative(&f, h, 2).unwrap();
        assert_eq!(d.offset, 7);
        for k in d.range() {
            let x = (k - 3) as f64 * h;
            assert!((d.at(k) - 5.0 * x.powi(4)).abs() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn sine_derivative_sixth_order() {
        let h = 0.02;
        let f = Sampled::new(0, (0..200).map(|k| (k as f64 * h).sin()).collect::<Vec<_>>());
        let d = derivative(&f, h, 2).unwrap();
        let err = d
            .range()
            .map(|k| (d.at(k) - (k as f64 * h).cos()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "err={err}");
    }

    #[test]
    fn short_field_is_a_stencil_error() {
        let f = Sampled::new(0, vec![0.0; 5]);
        assert!(matches!(derivative(&f, 0.1, 2), Err(Error::Stencil { .. })));
    }

    #[test]
    fn common_range_intersects() {
        assert_eq!(common_range([0..10, 3..12, 2..8]), 3..8);
        assert!(common_range([0..2, 5..8]).is_empty());
    }
}
