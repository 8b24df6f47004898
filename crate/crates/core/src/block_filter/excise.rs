use super::stft::StftGrid;
use crate::{Complex64, Error, Result};

/// Zeroes, per column, every bin whose squared magnitude exceeds
/// `threshold_factor` times the column median of squared magnitudes.
pub fn excise(grid: &StftGrid, threshold_factor: f64) -> Result<StftGrid> {
    if !(threshold_factor > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "excision threshold factor must be positive, got {threshold_factor}"
        )));
    }
    let mut out = grid.clone();
    for col in &mut out.columns {
        let limit = threshold_factor * median_power(col);
        for v in col.iter_mut() {
            if v.norm_sqr() > limit {
                *v = Complex64::default();
            }
        }
    }
    Ok(out)
}

fn median_power(col: &[Complex64]) -> f64 {
    let mut p: Vec<f64> = col.iter().map(|v| v.norm_sqr()).collect();
    if p.is_empty() {
        return 0.0;
    }
    let mid = p.len() / 2;
    let (lo, upper, _) = p.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if col.len() % 2 == 1 {
        upper
    } else {
        let lower = lo.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::WindowKind;

    fn grid(col: Vec<Complex64>) -> StftGrid {
        let m = col.len();
        StftGrid { m, r: m, l: 1, columns: vec![col], window: WindowKind::Rectangular }
    }

    #[test]
    fn strong_bin_removed() {
        let mut col = vec![Complex64::new(1.0, 0.0); 8];
        col[3] = Complex64::new(10.0, 0.0);
        let out = excise(&grid(col.clone()), 10.0).unwrap();
        for (i, v) in out.columns[0].iter().enumerate() {
            if i == 3 {
                assert_eq!(*v, Complex64::default());
            } else {
                assert_eq!(*v, col[i]);
            }
        }
    }

    #[test]
    fn flat_column_untouched() {
        let col = vec![Complex64::new(0.0, 2.0); 8];
        let g = grid(col);
        assert_eq!(excise(&g, 10.0).unwrap(), g);
    }

    #[test]
    fn even_and_odd_medians() {
        let c = |v: &[f64]| v.iter().map(|&x| Complex64::new(x.sqrt(), 0.0)).collect::<Vec<_>>();
        assert!((median_power(&c(&[1.0, 5.0, 3.0])) - 3.0).abs() < 1e-12);
        assert!((median_power(&c(&[4.0, 1.0, 2.0, 8.0])) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn non_positive_factor_rejected() {
        let g = grid(vec![Complex64::new(1.0, 0.0); 4]);
        assert!(excise(&g, 0.0).is_err());
        assert!(excise(&g, f64::NAN).is_err());
    }
}
