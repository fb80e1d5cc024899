//! Graph diffusion steps. Each step function receives the zero-initialized
//! matrix, applies its operator `hops` times and resets available rows from
//! the placeholder after every application.

use super::dense::DenseLu;
use crate::error::{Error, Result};
use crate::graph::PropagationOperator;
use crate::ingest::FeatureMatrix;
use crate::scalar::Scalar;

/// One application of the row-stochastic operator: neighbourhood mean.
pub fn step_neigh_mean<T: Scalar>(
    f: &FeatureMatrix<T>,
    p_row: &PropagationOperator<T>,
) -> Result<FeatureMatrix<T>> {
    crate::graph::apply_operator(p_row, f)
}

/// Repeated propagation with reset of the available rows.
pub fn step_multihop<T: Scalar>(
    f: FeatureMatrix<T>,
    p_sym: &PropagationOperator<T>,
    placeholder: &FeatureMatrix<T>,
    available: &[bool],
    hops: usize,
    tolerance: f64,
) -> Result<(FeatureMatrix<T>, usize)> {
    iterate(
        "multi-hop",
        f,
        placeholder,
        available,
        hops,
        tolerance,
        |x, out| p_sym.apply_into(x, out),
    )
}

/// Repeated personalized PageRank diffusion `a (I - (1 - a) S)^-1` with reset.
///
/// Catalogs up to `dense_solve_threshold` items are solved exactly through a
/// dense LU factorization; larger ones use the first `series_order` terms of
/// the Neumann series, whose operator-norm error is at most `(1 - a)^K / a`.
#[allow(clippy::too_many_arguments)]
pub fn step_pers_pagerank<T: Scalar>(
    f: FeatureMatrix<T>,
    p_sym: &PropagationOperator<T>,
    placeholder: &FeatureMatrix<T>,
    available: &[bool],
    alpha: f64,
    hops: usize,
    series_order: usize,
    dense_solve_threshold: usize,
    tolerance: f64,
) -> Result<(FeatureMatrix<T>, usize)> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidConfig(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    if alpha == 1.0 {
        // a (I - 0 S)^-1 = I
        return iterate(
            "pers-page-rank",
            f,
            placeholder,
            available,
            hops,
            tolerance,
            |x, out| {
                out.as_mut_slice().copy_from_slice(x.as_slice());
                Ok(())
            },
        );
    }
    let n = p_sym.num_items();
    if n <= dense_solve_threshold {
        let lu = ppr_system(p_sym, alpha)?;
        let a = T::of(alpha);
        iterate(
            "pers-page-rank",
            f,
            placeholder,
            available,
            hops,
            tolerance,
            |x, out| {
                let mut y = lu.solve(x);
                y.as_mut_slice().iter_mut().for_each(|v| *v *= a);
                *out = y;
                Ok(())
            },
        )
    } else {
        let mut scratch = FeatureMatrix::zeros(f.rows(), f.cols());
        iterate(
            "pers-page-rank",
            f,
            placeholder,
            available,
            hops,
            tolerance,
            |x, out| ppr_neumann_into(p_sym, alpha, series_order, x, out, &mut scratch),
        )
    }
}

/// Factorizes `I - (1 - a) S`.
fn ppr_system<T: Scalar>(p_sym: &PropagationOperator<T>, alpha: f64) -> Result<DenseLu<T>> {
    let n = p_sym.num_items();
    let damp = T::of(1.0 - alpha);
    let mut m: Vec<T> = p_sym.to_dense().into_iter().map(|w| -(damp * w)).collect();
    for i in 0..n {
        m[i * n + i] += T::one();
    }
    DenseLu::factor(n, m).map_err(|e| match e {
        Error::Singular(k) => Error::NumericalInstability {
            method: "pers-page-rank",
            iteration: 0,
            hint: format!("I - (1 - alpha) S is singular at pivot {k}; use alpha > 0"),
        },
        other => other,
    })
}

/// Truncated Neumann action `a * sum_{k<K} (1 - a)^k S^k X`.
pub fn ppr_neumann<T: Scalar>(
    p_sym: &PropagationOperator<T>,
    alpha: f64,
    series_order: usize,
    x: &FeatureMatrix<T>,
) -> Result<FeatureMatrix<T>> {
    let mut out = FeatureMatrix::zeros(x.rows(), x.cols());
    let mut scratch = FeatureMatrix::zeros(x.rows(), x.cols());
    ppr_neumann_into(p_sym, alpha, series_order, x, &mut out, &mut scratch)?;
    Ok(out)
}

fn ppr_neumann_into<T: Scalar>(
    p_sym: &PropagationOperator<T>,
    alpha: f64,
    series_order: usize,
    x: &FeatureMatrix<T>,
    out: &mut FeatureMatrix<T>,
    scratch: &mut FeatureMatrix<T>,
) -> Result<()> {
    if alpha <= 0.0 {
        return Err(Error::Divergent(
            "the Neumann series of (I - S)^-1 needs alpha > 0".into(),
        ));
    }
    if series_order == 0 {
        return Err(Error::InvalidConfig("series order must be >= 1".into()));
    }
    let a = T::of(alpha);
    let damp = T::of(1.0 - alpha);
    let mut term = x.clone();
    for (o, &t) in out.as_mut_slice().iter_mut().zip(term.as_slice()) {
        *o = a * t;
    }
    for _ in 1..series_order {
        p_sym.apply_into(&term, scratch)?;
        for (t, &s) in term.as_mut_slice().iter_mut().zip(scratch.as_slice()) {
            *t = damp * s;
        }
        for (o, &t) in out.as_mut_slice().iter_mut().zip(term.as_slice()) {
            *o += a * t;
        }
    }
    Ok(())
}

/// Repeated heat diffusion `exp(-b (I - S))` with reset, each application a
/// `series_order`-term Taylor expansion of the operator action.
#[allow(clippy::too_many_arguments)]
pub fn step_heat<T: Scalar>(
    f: FeatureMatrix<T>,
    p_sym: &PropagationOperator<T>,
    placeholder: &FeatureMatrix<T>,
    available: &[bool],
    diffusion_time: f64,
    hops: usize,
    series_order: usize,
    tolerance: f64,
) -> Result<(FeatureMatrix<T>, usize)> {
    if !(diffusion_time >= 0.0 && diffusion_time.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "b must be finite and nonnegative, got {diffusion_time}"
        )));
    }
    let mut term = FeatureMatrix::zeros(f.rows(), f.cols());
    let mut scratch = FeatureMatrix::zeros(f.rows(), f.cols());
    iterate(
        "heat",
        f,
        placeholder,
        available,
        hops,
        tolerance,
        |x, out| {
            heat_into(
                p_sym,
                diffusion_time,
                series_order,
                x,
                out,
                &mut term,
                &mut scratch,
            )
        },
    )
    .map_err(|e| match e {
        Error::NumericalInstability {
            method, iteration, ..
        } => Error::NumericalInstability {
            method,
            iteration,
            hint: format!(
                "non-finite values with b = {diffusion_time} and K = {series_order}; \
                 increase the series order or reduce b"
            ),
        },
        other => other,
    })
}

/// Taylor action `sum_{k<K} (-b)^k / k! L^k X`, `L = I - S`.
pub fn heat_kernel<T: Scalar>(
    p_sym: &PropagationOperator<T>,
    diffusion_time: f64,
    series_order: usize,
    x: &FeatureMatrix<T>,
) -> Result<FeatureMatrix<T>> {
    let mut out = FeatureMatrix::zeros(x.rows(), x.cols());
    let mut term = FeatureMatrix::zeros(x.rows(), x.cols());
    let mut scratch = FeatureMatrix::zeros(x.rows(), x.cols());
    heat_into(
        p_sym,
        diffusion_time,
        series_order,
        x,
        &mut out,
        &mut term,
        &mut scratch,
    )?;
    Ok(out)
}

fn heat_into<T: Scalar>(
    p_sym: &PropagationOperator<T>,
    diffusion_time: f64,
    series_order: usize,
    x: &FeatureMatrix<T>,
    out: &mut FeatureMatrix<T>,
    term: &mut FeatureMatrix<T>,
    scratch: &mut FeatureMatrix<T>,
) -> Result<()> {
    if series_order == 0 {
        return Err(Error::InvalidConfig("series order must be >= 1".into()));
    }
    out.as_mut_slice().copy_from_slice(x.as_slice());
    if diffusion_time == 0.0 {
        return Ok(());
    }
    term.as_mut_slice().copy_from_slice(x.as_slice());
    for k in 1..series_order {
        p_sym.apply_into(term, scratch)?;
        let coef = T::of(-diffusion_time / k as f64);
        // term <- (-b / k) (term - S term)
        for (t, &s) in term.as_mut_slice().iter_mut().zip(scratch.as_slice()) {
            *t = coef * (*t - s);
        }
        for (o, &t) in out.as_mut_slice().iter_mut().zip(term.as_slice()) {
            *o += t;
        }
    }
    Ok(())
}

/// Shared outer loop: apply, check finiteness, reset, test convergence.
fn iterate<T: Scalar>(
    method: &'static str,
    mut x: FeatureMatrix<T>,
    placeholder: &FeatureMatrix<T>,
    available: &[bool],
    hops: usize,
    tolerance: f64,
    mut apply: impl FnMut(&FeatureMatrix<T>, &mut FeatureMatrix<T>) -> Result<()>,
) -> Result<(FeatureMatrix<T>, usize)> {
    if hops == 0 {
        return Err(Error::InvalidConfig("hops must be >= 1".into()));
    }
    if placeholder.rows() != x.rows()
        || placeholder.cols() != x.cols()
        || available.len() != x.rows()
    {
        return Err(Error::ShapeMismatch(format!(
            "features {}x{}, placeholder {}x{}, mask {}",
            x.rows(),
            x.cols(),
            placeholder.rows(),
            placeholder.cols(),
            available.len()
        )));
    }
    let mut next = FeatureMatrix::zeros(x.rows(), x.cols());
    for t in 1..=hops {
        apply(&x, &mut next)?;
        if !next.is_finite() {
            return Err(Error::NumericalInstability {
                method,
                iteration: t,
                hint: "diffusion produced non-finite values".into(),
            });
        }
        for (i, _) in available.iter().enumerate().filter(|(_, &a)| a) {
            next.row_mut(i).copy_from_slice(placeholder.row(i));
        }
        let change = missing_change(&x, &next, available);
        std::mem::swap(&mut x, &mut next);
        if tolerance > 0.0 && change < tolerance {
            return Ok((x, t));
        }
    }
    Ok((x, hops))
}

/// `||new - old||_F / ||new||_F` restricted to missing rows.
fn missing_change<T: Scalar>(
    old: &FeatureMatrix<T>,
    new: &FeatureMatrix<T>,
    available: &[bool],
) -> f64 {
    let mut diff = 0.0f64;
    let mut norm = 0.0f64;
    for (i, _) in available.iter().enumerate().filter(|(_, &a)| !a) {
        for (&o, &n) in old.row(i).iter().zip(new.row(i)) {
            let (o, n) = (o.as_f64(), n.as_f64());
            diff += (n - o) * (n - o);
            norm += n * n;
        }
    }
    if diff == 0.0 {
        0.0
    } else if norm == 0.0 {
        f64::INFINITY
    } else {
        (diff / norm).sqrt()
    }
}
