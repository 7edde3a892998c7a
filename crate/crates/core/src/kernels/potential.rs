//! Pointwise 2D Coulomb and Biot-Savart kernels.

use std::f64::consts::PI;

use super::Vec2;
use crate::error::{Error, Result};

const INV_2PI: f64 = 1.0 / (2.0 * PI);

/// Repulsive 2D Coulomb potential, `-(1/2pi) log|r|`.
pub fn coulomb_potential(r: Vec2) -> Result<f64> {
    let r2 = r.norm_sq();
    if r2 == 0.0 {
        return Err(Error::Singular {
            what: "coulomb potential",
        });
    }
    Ok(coulomb_potential_unchecked(r2))
}

/// `-(1/4pi) log|r|^2`; callers guarantee `r2 > 0`.
#[inline]
pub(crate) fn coulomb_potential_unchecked(r2: f64) -> f64 {
    -0.5 * INV_2PI * r2.ln()
}

/// Gradient of the Coulomb potential, `-r / (2pi |r|^2)`.
pub fn coulomb_gradient(r: Vec2) -> Result<Vec2> {
    let r2 = r.norm_sq();
    if r2 == 0.0 {
        return Err(Error::Singular {
            what: "coulomb gradient",
        });
    }
    Ok(coulomb_gradient_unchecked(r, r2))
}

#[inline]
pub(crate) fn coulomb_gradient_unchecked(r: Vec2, r2: f64) -> Vec2 {
    r * (-INV_2PI / r2)
}

/// Biot-Savart kernel `r^perp / (2pi |r|^2)`, equal to `-(grad V)^perp`.
pub fn biot_savart_kernel(r: Vec2) -> Result<Vec2> {
    let r2 = r.norm_sq();
    if r2 == 0.0 {
        return Err(Error::Singular {
            what: "biot-savart kernel",
        });
    }
    Ok(r.perp() * (INV_2PI / r2))
}

/// Mean of `log|x|` over the square `[-a, a]^2` is `log a + LOG_SQUARE_MEAN`.
pub const LOG_SQUARE_MEAN: f64 =
    0.5 * std::f64::consts::LN_2 - 1.5 + std::f64::consts::FRAC_PI_4;

/// Exact average of the Coulomb potential over a centred square cell of
/// side `h`.
pub fn coulomb_cell_average(h: f64) -> f64 {
    -INV_2PI * ((0.5 * h).ln() + LOG_SQUARE_MEAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn potential_values() {
        assert_eq!(coulomb_potential(Vec2::new(1.0, 0.0)).unwrap(), 0.0);
        let e = std::f64::consts::E;
        let v = coulomb_potential(Vec2::new(0.0, e)).unwrap();
        assert!((v + INV_2PI).abs() < 1e-15);
        let r = (-2.0 * PI).exp();
        let v = coulomb_potential(Vec2::new(r, 0.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        assert!(coulomb_potential(Vec2::ZERO).is_err());
    }

    #[test]
    fn gradient_values() {
        let g = coulomb_gradient(Vec2::new(1.0, 0.0)).unwrap();
        assert!((g.x + INV_2PI).abs() < 1e-16 && g.y == 0.0);
        let g = coulomb_gradient(Vec2::new(0.0, 2.0)).unwrap();
        assert!(g.x == 0.0 && (g.y + 1.0 / (4.0 * PI)).abs() < 1e-16);
        assert!(coulomb_gradient(Vec2::ZERO).is_err());
    }

    #[test]
    fn biot_savart_values() {
        let k = biot_savart_kernel(Vec2::new(1.0, 0.0)).unwrap();
        assert!(k.x == 0.0 && (k.y - INV_2PI).abs() < 1e-16);
        let k = biot_savart_kernel(Vec2::new(0.0, 1.0)).unwrap();
        assert!((k.x + INV_2PI).abs() < 1e-16 && k.y == 0.0);
        assert!(biot_savart_kernel(Vec2::ZERO).is_err());
    }

    #[test]
    fn cell_average_matches_quadrature() {
        // Midpoint quadrature on a fine sub-grid with an odd count, so the
        // pole falls between samples.
        let h = 0.05;
        let m = 2000;
        let d = h / m as f64;
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                let x = -0.5 * h + (i as f64 + 0.5) * d;
                let y = -0.5 * h + (j as f64 + 0.5) * d;
                acc += coulomb_potential(Vec2::new(x, y)).unwrap();
            }
        }
        acc /= (m * m) as f64;
        assert!((acc - coulomb_cell_average(h)).abs() < 1e-5, "{acc}");
    }

    fn annulus_point() -> impl Strategy<Value = Vec2> {
        (0.1f64..10.0, 0.0f64..(2.0 * PI)).prop_map(|(r, t)| Vec2::new(r * t.cos(), r * t.sin()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn gradient_matches_central_differences(r in annulus_point()) {
            let step = 1e-5;
            let dx = Vec2::new(step, 0.0);
            let dy = Vec2::new(0.0, step);
            let fd = Vec2::new(
                (coulomb_potential(r + dx).unwrap() - coulomb_potential(r - dx).unwrap()) / (2.0 * step),
                (coulomb_potential(r + dy).unwrap() - coulomb_potential(r - dy).unwrap()) / (2.0 * step),
            );
            let g = coulomb_gradient(r).unwrap();
            prop_assert!((fd - g).norm() <= 1e-6 * g.norm());
        }

        #[test]
        fn biot_savart_is_minus_perp_gradient(r in annulus_point()) {
            let k = biot_savart_kernel(r).unwrap();
            let g = coulomb_gradient(r).unwrap();
            prop_assert!((k + g.perp()).norm() <= 1e-14 * k.norm().max(1e-300));
            prop_assert!(k.dot(r).abs() <= 1e-15 * r.norm() * k.norm());
        }

        #[test]
        fn symmetry_under_reflection(r in annulus_point()) {
            prop_assert_eq!(coulomb_potential(r).unwrap(), coulomb_potential(-r).unwrap());
            prop_assert_eq!(coulomb_gradient(-r).unwrap(), -coulomb_gradient(r).unwrap());
        }
    }
}
