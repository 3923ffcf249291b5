use crate::error::{Error, Result};
use crate::lp::model::INTEGRALITY_TOL;

/// Rounds a vertex to its 0/1 code, refusing entries that are not near 0 or 1.
pub fn round_code(x: &[f64]) -> Result<Vec<u8>> {
    x.iter()
        .enumerate()
        .map(|(j, &v)| {
            if (v - 0.0).abs() <= INTEGRALITY_TOL {
                Ok(0)
            } else if (v - 1.0).abs() <= INTEGRALITY_TOL {
                Ok(1)
            } else {
                Err(Error::DegenerateSolution(format!("entry {j} = {v} is not a 0/1 value")))
            }
        })
        .collect()
}

/// Structural Hamming distance between two 0/1 solution codes.
pub fn shd(x1: &[f64], x2: &[f64]) -> Result<usize> {
    if x1.len() != x2.len() {
        return Err(Error::config(format!("codes differ in length: {} vs {}", x1.len(), x2.len())));
    }
    let a = round_code(x1)?;
    let b = round_code(x2)?;
    Ok(a.iter().zip(&b).filter(|(p, q)| p != q).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let x = [1.0, 0.0, 0.0, 1.0];
        assert_eq!(shd(&x, &x).unwrap(), 0);
        assert_eq!(shd(&x, &[0.0, 1.0, 1.0, 0.0]).unwrap(), 4);
        assert_eq!(shd(&[1.0 - 1e-9], &[0.0]).unwrap(), 1);
    }

    #[test]
    fn fractional_entries_are_rejected() {
        assert!(matches!(shd(&[0.5], &[0.0]), Err(Error::DegenerateSolution(_))));
        assert!(shd(&[0.0], &[0.0, 1.0]).is_err());
    }
}
