//! Data transforms: centered log-ratio for compositional covariates and the
//! elementwise log for outcome tables.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Centered log-ratio transform, row by row:
/// `x_ik = log(v_ik + c) - mean_k log(v_ik + c)`. Every output row sums to
/// zero. Negative entries are rejected; zeros require a positive pseudocount.
pub fn clr_transform(values: &Array2<f64>, pseudocount: f64) -> Result<Array2<f64>> {
    let (n, p) = values.dim();
    if p == 0 {
        return Err(Error::InvalidParam("cannot CLR-transform an empty table".into()));
    }
    if pseudocount < 0.0 || !pseudocount.is_finite() {
        return Err(Error::InvalidParam(format!(
            "pseudocount must be nonnegative and finite, got {pseudocount}"
        )));
    }
    for ((i, j), &v) in values.indexed_iter() {
        if v.is_nan() {
            return Err(Error::NonFinite(format!("abundance table at row {i}, column {j}")));
        }
        if v < 0.0 {
            return Err(Error::NegativeInput { row: i, column: j, value: v });
        }
        if v + pseudocount <= 0.0 {
            return Err(Error::InvalidParam(
                "pseudocount must be positive when the table contains zeros".into(),
            ));
        }
    }
    let mut out = Array2::<f64>::zeros((n, p));
    for i in 0..n {
        let mut mean_log = 0.0;
        for j in 0..p {
            let l = (values[(i, j)] + pseudocount).ln();
            out[(i, j)] = l;
            mean_log += l;
        }
        mean_log /= p as f64;
        for j in 0..p {
            out[(i, j)] -= mean_log;
        }
    }
    Ok(out)
}

/// Natural log, elementwise, after adding `offset`. Errors on the first
/// non-positive shifted value.
pub fn log_transform(values: &Array2<f64>, offset: f64) -> Result<Array2<f64>> {
    for ((i, j), &v) in values.indexed_iter() {
        if v.is_nan() {
            continue; // missing values stay missing
        }
        if v + offset <= 0.0 {
            return Err(Error::NonPositive { row: i, column: j, value: v + offset });
        }
    }
    Ok(values.mapv(|v| if v.is_nan() { v } else { (v + offset).ln() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn uniform_composition_maps_to_zero() {
        let v = array![[1.0, 1.0, 1.0, 1.0]];
        let out = clr_transform(&v, 0.0).unwrap();
        for x in out.iter() {
            assert_eq!(*x, 0.0);
        }
    }

    #[test]
    fn rows_sum_to_zero() {
        let v = array![[1.0, 2.0, 4.0], [10.0, 0.5, 3.0], [7.0, 7.0, 0.1]];
        let out = clr_transform(&v, 0.5).unwrap();
        for i in 0..3 {
            let s: f64 = out.row(i).sum();
            assert!(s.abs() < 1e-12, "row {i} sums to {s}");
        }
    }

    #[test]
    fn hand_checked_row() {
        // log(v) - mean(log v) for (1, 2, 4): logs are (0, log2, 2 log2),
        // mean log2, so the row is (-log2, 0, log2)
        let v = array![[1.0, 2.0, 4.0]];
        let out = clr_transform(&v, 0.0).unwrap();
        let l2 = 2f64.ln();
        assert!((out[(0, 0)] + l2).abs() < 1e-15);
        assert!(out[(0, 1)].abs() < 1e-15);
        assert!((out[(0, 2)] - l2).abs() < 1e-15);
    }

    #[test]
    fn negative_entry_rejected() {
        let v = array![[1.0, -0.5]];
        match clr_transform(&v, 0.5).unwrap_err() {
            Error::NegativeInput { row: 0, column: 1, value } => assert_eq!(value, -0.5),
            other => panic!("expected NegativeInput, got {other:?}"),
        }
    }

    #[test]
    fn zero_needs_pseudocount() {
        let v = array![[1.0, 0.0]];
        assert!(clr_transform(&v, 0.0).is_err());
        assert!(clr_transform(&v, 0.5).is_ok());
    }

    #[test]
    fn log_transform_basics_and_round_trip() {
        let v = array![[1.0, std::f64::consts::E], [4.0, 9.0]];
        let out = log_transform(&v, 0.0).unwrap();
        assert_eq!(out[(0, 0)], 0.0);
        assert!((out[(0, 1)] - 1.0).abs() < 1e-15);
        // monotone
        assert!(out[(1, 1)] > out[(1, 0)]);
        // exp recovers the input
        for (a, b) in v.iter().zip(out.iter()) {
            assert!((a - b.exp()).abs() < 1e-12 * a.abs());
        }

        match log_transform(&array![[0.0]], 0.0).unwrap_err() {
            Error::NonPositive { row: 0, column: 0, .. } => {}
            other => panic!("expected NonPositive, got {other:?}"),
        }
    }
}
