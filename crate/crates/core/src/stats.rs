//! Sample statistics, rank correlations and quadrature.

use std::cmp::Ordering;

use crate::scalar::Scalar;

fn cmp<T: Scalar>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Streaming mean and variance (Welford). A constant stream yields a
/// variance of exactly zero.
#[derive(Clone, Copy, Debug, Default)]
pub struct Moments<T> {
    n: usize,
    mean: T,
    m2: T,
}

impl<T: Scalar> Moments<T> {
    pub fn new() -> Self {
        Moments {
            n: 0,
            mean: T::zero(),
            m2: T::zero(),
        }
    }

    pub fn push(&mut self, x: T) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean = self.mean + delta / T::of_count(self.n);
        self.m2 = self.m2 + delta * (x - self.mean);
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    /// Sample variance with `n - 1` in the denominator; zero below two points.
    pub fn variance(&self) -> T {
        if self.n < 2 {
            T::zero()
        } else {
            (self.m2 / T::of_count(self.n - 1)).max(T::zero())
        }
    }

    pub fn sd(&self) -> T {
        self.variance().sqrt()
    }
}

impl<T: Scalar> FromIterator<T> for Moments<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut m = Moments::new();
        for x in iter {
            m.push(x);
        }
        m
    }
}

pub fn mean<T: Scalar>(xs: &[T]) -> T {
    xs.iter().copied().collect::<Moments<T>>().mean()
}

pub fn sample_variance<T: Scalar>(xs: &[T]) -> T {
    xs.iter().copied().collect::<Moments<T>>().variance()
}

/// Pearson correlation: covariance over the product of standard deviations.
/// `None` when either series is constant or shorter than two.
pub fn pearson<T: Scalar>(xs: &[T], ys: &[T]) -> Option<T> {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return None;
    }
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx <= T::zero() || syy <= T::zero() {
        return None;
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    Some(r.max(-T::one()).min(T::one()))
}

/// 1-based ranks; tied values share the average of their positions.
pub fn average_ranks<T: Scalar>(xs: &[T]) -> Vec<T> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| cmp(&xs[a], &xs[b]));
    let mut ranks = vec![T::zero(); xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && xs[idx[j]] == xs[idx[i]] {
            j += 1;
        }
        // positions i+1 ..= j share rank (i + 1 + j) / 2
        let r = T::of_count(i + 1 + j) / T::lit(2.0);
        for &k in &idx[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

fn is_constant<T: Scalar>(xs: &[T]) -> bool {
    xs.windows(2).all(|w| w[0] == w[1])
}

/// Spearman coefficient `1 - 6 sum(d^2) / (n (n^2 - 1))` over average ranks.
/// `None` when either series is constant or shorter than two.
pub fn spearman<T: Scalar>(xs: &[T], ys: &[T]) -> Option<T> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 || is_constant(xs) || is_constant(ys) {
        return None;
    }
    let (rx, ry) = (average_ranks(xs), average_ranks(ys));
    let d2: T = rx.iter().zip(&ry).map(|(&a, &b)| (a - b) * (a - b)).sum();
    let nf = T::of_count(n);
    Some(T::one() - T::lit(6.0) * d2 / (nf * (nf * nf - T::one())))
}

/// Concordant and discordant pair counts; pairs tied in either series
/// count as neither.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PairCounts {
    pub concordant: u64,
    pub discordant: u64,
}

/// [`PairCounts`] by direct enumeration of all pairs.
pub fn pair_counts_naive<T: Scalar>(xs: &[T], ys: &[T]) -> PairCounts {
    assert_eq!(xs.len(), ys.len());
    let mut counts = PairCounts::default();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let sign = (xs[i] - xs[j]) * (ys[i] - ys[j]);
            if sign > T::zero() {
                counts.concordant += 1;
            } else if sign < T::zero() {
                counts.discordant += 1;
            }
        }
    }
    counts
}

fn tied_pairs(sorted_run_lengths: impl Iterator<Item = u64>) -> u64 {
    sorted_run_lengths.map(|t| t * (t - 1) / 2).sum()
}

fn run_lengths<T: PartialEq>(sorted: &[T]) -> impl Iterator<Item = u64> + '_ {
    let mut i = 0;
    std::iter::from_fn(move || {
        if i >= sorted.len() {
            return None;
        }
        let start = i;
        while i < sorted.len() && sorted[i] == sorted[start] {
            i += 1;
        }
        Some((i - start) as u64)
    })
}

/// Merge sort that counts strict inversions.
fn sort_counting_inversions<T: Scalar>(v: &mut [T], buf: &mut Vec<T>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps =
        sort_counting_inversions(&mut v[..mid], buf) + sort_counting_inversions(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf.push(v[j]);
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf.push(v[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..n]);
    v.copy_from_slice(buf);
    swaps
}

/// [`PairCounts`] in `O(n log n)`: sort by `(x, y)`, count discordant pairs
/// as inversions of `y`, and recover concordant pairs from the tie counts.
pub fn pair_counts<T: Scalar>(xs: &[T], ys: &[T]) -> PairCounts {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as u64;
    let mut pairs: Vec<(T, T)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    pairs.sort_by(|a, b| cmp(&a.0, &b.0).then_with(|| cmp(&a.1, &b.1)));
    let xs_sorted: Vec<T> = pairs.iter().map(|p| p.0).collect();
    let tied_x = tied_pairs(run_lengths(&xs_sorted));
    let tied_xy = tied_pairs(run_lengths(&pairs));
    let mut y: Vec<T> = pairs.iter().map(|p| p.1).collect();
    let mut buf = Vec::with_capacity(y.len());
    let discordant = sort_counting_inversions(&mut y, &mut buf);
    let tied_y = tied_pairs(run_lengths(&y));
    PairCounts {
        concordant: n * n.saturating_sub(1) / 2 + tied_xy - tied_x - tied_y - discordant,
        discordant,
    }
}

/// Kendall tau-a, `(C - D) / (n (n - 1) / 2)`; tied pairs add nothing to the
/// numerator. `None` when either series is constant or shorter than two.
pub fn kendall_tau_a<T: Scalar>(xs: &[T], ys: &[T]) -> Option<T> {
    let n = xs.len();
    if n < 2 || is_constant(xs) || is_constant(ys) {
        return None;
    }
    let c = pair_counts(xs, ys);
    let all = T::of_count(n) * T::of_count(n - 1) / T::lit(2.0);
    Some((T::lit(c.concordant as f64) - T::lit(c.discordant as f64)) / all)
}

/// Trapezoidal integral of `ys` sampled at ascending `xs`.
pub fn trapezoid<T: Scalar>(xs: &[T], ys: &[T]) -> T {
    assert_eq!(xs.len(), ys.len());
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / T::lit(2.0))
        .sum()
}

/// Trapezoid weights: `trapezoid(xs, ys) == sum(w_i * y_i)`.
pub fn trapezoid_weights<T: Scalar>(xs: &[T]) -> Vec<T> {
    let mut w = vec![T::zero(); xs.len()];
    for (i, x) in xs.windows(2).enumerate() {
        let h = (x[1] - x[0]) / T::lit(2.0);
        w[i] = w[i] + h;
        w[i + 1] = w[i + 1] + h;
    }
    w
}
