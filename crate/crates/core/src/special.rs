//! Combinatorial helpers shared by the catalysis and detector models.

/// Largest `n` for which binomials are built from exact integer arithmetic.
const EXACT_BINOMIAL_MAX: u64 = 64;

/// ln(n!) by direct summation; exact enough for the photon numbers used here.
pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Binomial coefficient as `f64`.
///
/// Exact integer arithmetic up to `n = 64`, log-factorials beyond.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= EXACT_BINOMIAL_MAX {
        let mut acc: u128 = 1;
        for i in 0..k {
            // acc * (n - i) is divisible by (i + 1) at every step
            acc = acc * u128::from(n - i) / u128::from(i + 1);
        }
        acc as f64
    } else {
        (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k))
            .exp()
            .round()
    }
}

/// Binomial pmf `C(n,m) p^m (1-p)^(n-m)` with `0^0 = 1`.
pub fn binomial_pmf(n: usize, m: usize, p: f64) -> f64 {
    if m > n {
        return 0.0;
    }
    let q = 1.0 - p;
    binomial(n as u64, m as u64) * p.powi(m as i32) * q.powi((n - m) as i32)
}

/// Sums `|term|^2` of an amplitude series: the first `keep` terms are
/// returned, and the remainder is summed into a tail mass until it is
/// negligible. `envelope_mean` is the mean photon number of the Poisson-like
/// envelope bounding the series; the tail scan never stops before it.
pub(crate) fn split_series<I>(terms: I, keep: usize, envelope_mean: f64) -> (Vec<num_complex::Complex64>, f64)
where
    I: IntoIterator<Item = num_complex::Complex64>,
{
    const MAX_EXTRA: usize = 20_000;
    let mut iter = terms.into_iter();
    let head: Vec<_> = iter.by_ref().take(keep).collect();
    let head_mass: f64 = head.iter().map(|c| c.norm_sqr()).sum();

    let min_index = (2.0 * envelope_mean + 20.0).ceil() as usize;
    let mut tail = 0.0;
    let mut quiet = 0;
    for (offset, term) in iter.take(MAX_EXTRA).enumerate() {
        let w = term.norm_sqr();
        tail += w;
        let n = keep + offset;
        if w <= 1e-40 * (head_mass + tail) {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if n > min_index && quiet >= 4 {
            break;
        }
    }
    (head, tail)
}
