//! Bracket scanning and bisection shared by the shooting solvers.

use rayon::prelude::*;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

/// Sign changes of `f` on `n` equally spaced points of [lo, hi], ascending.
pub(crate) fn scan_brackets<F>(f: &F, lo: f64, hi: f64, n: usize) -> Result<Vec<Bracket>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let n = n.max(2);
    let xs: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let fs: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 0..n - 1 {
        let (a, b) = (fs[i], fs[i + 1]);
        if a == 0.0 {
            out.push(Bracket {
                lo: xs[i],
                hi: xs[i],
                f_lo: a,
                f_hi: a,
            });
        } else if a * b < 0.0 {
            out.push(Bracket {
                lo: xs[i],
                hi: xs[i + 1],
                f_lo: a,
                f_hi: b,
            });
        }
    }
    if fs[n - 1] == 0.0 {
        out.push(Bracket {
            lo: xs[n - 1],
            hi: xs[n - 1],
            f_lo: 0.0,
            f_hi: 0.0,
        });
    }
    Ok(out)
}

/// Bisects until the bracket is narrower than `tol`; returns the midpoint.
pub(crate) fn bisect<F>(f: &F, bracket: Bracket, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let Bracket {
        mut lo,
        mut hi,
        mut f_lo,
        ..
    } = bracket;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Number of strict sign changes in a sample sequence, ignoring exact zeros.
pub(crate) fn sign_changes(samples: impl IntoIterator<Item = f64>) -> usize {
    let mut last = 0.0_f64;
    let mut count = 0;
    for v in samples {
        if v != 0.0 {
            if last != 0.0 && (v < 0.0) != (last < 0.0) {
                count += 1;
            }
            last = v;
        }
    }
    count
}
