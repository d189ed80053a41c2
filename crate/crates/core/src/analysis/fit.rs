use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; zero for two points or an exact fit.
    pub stderr: f64,
}

/// Ordinary least squares `y ≈ slope · x + intercept`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::dim(format!("{} abscissae but {} ordinates", xs.len(), ys.len())));
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("a line fit needs 2 points, got {n}")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if n > 2 {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| {
                let r = y - (slope * x + intercept);
                r * r
            })
            .sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LineFit {
        slope,
        intercept,
        stderr,
    })
}

/// Log-log fit of `err` against `n`; the slope is the negated empirical
/// rate.
pub fn fit_rate(rows: &[(usize, f64)]) -> Result<LineFit> {
    if rows.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "rate fit needs at least 3 rows, got {}",
            rows.len()
        )));
    }
    if let Some(&(n, e)) = rows.iter().find(|&&(_, e)| !(e > 0.0)) {
        return Err(Error::LogDomain(format!("error {e} at n = {n} has no logarithm")));
    }
    let xs: Vec<f64> = rows.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|&(_, e)| e.ln()).collect();
    least_squares(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_power_laws() {
        let f = fit_rate(&[(100, 0.01), (200, 0.005), (400, 0.0025)]).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12);
        assert!(f.stderr < 1e-12);
        let rows: Vec<_> = [64usize, 128, 256, 512].iter().map(|&n| (n, 3.0 / (n as f64).sqrt())).collect();
        let f = fit_rate(&rows).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        let f = fit_rate(&[(10, 0.2), (20, 0.2), (40, 0.2)]).unwrap();
        assert!(f.slope.abs() < 1e-15);
    }

    #[test]
    fn refusals() {
        assert!(matches!(fit_rate(&[(1, 1.0), (2, 0.5)]), Err(Error::InsufficientData(_))));
        assert!(matches!(
            fit_rate(&[(1, 1.0), (2, 0.0), (4, 0.5)]),
            Err(Error::LogDomain(_))
        ));
        assert!(least_squares(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }
}
