//! The bias-correction kernel shared by every debiasing pass.

use ndarray::{Array1, Array2};

use super::nodewise::NodewiseResiduals;
use crate::error::{Error, Result};

/// Corrects each coordinate of a penalized fit with the nodewise projection:
///
/// `out_l = fit_l + z_l'(response - X fit) / (z_l'x_l)`
///
/// `response` is the vector whose linear model `X * fit` approximates; pass
/// an intercept-adjusted response when the fit had one.
pub fn debias_coefficients(
    fit_beta: &Array1<f64>,
    x: &Array2<f64>,
    response: &Array1<f64>,
    z: &NodewiseResiduals,
) -> Result<Array1<f64>> {
    let n = x.nrows();
    let p = x.ncols();
    if fit_beta.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "fit has {} coefficients but X has {p} columns",
            fit_beta.len()
        )));
    }
    if response.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "response has length {} but X has {n} rows",
            response.len()
        )));
    }
    if z.p() != p || z.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "nodewise residuals are {}x{} but X is {n}x{p}",
            z.n(),
            z.p()
        )));
    }

    let residual = response - &x.dot(fit_beta);
    let mut out = Array1::<f64>::zeros(p);
    for l in 0..p {
        let zl = z.residuals.column(l);
        let denom = zl.dot(&x.column(l));
        if denom.abs() <= f64::MIN_POSITIVE {
            return Err(Error::DegenerateColumn {
                index: l,
                reason: "projection direction orthogonal to its own column".into(),
            });
        }
        out[l] = fit_beta[l] + zl.dot(&residual) / denom;
    }
    Ok(out)
}
