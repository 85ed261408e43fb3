//! Anisotropic three-dimensional Franke function and its cylinder version.

use crate::scalar::Real;

use super::DataError;

/// Height of the reference cylinder the test field is defined on.
pub const FRANKE_HEIGHT: f64 = 20.0;

const AX: f64 = 0.4;
const AY: f64 = 0.4;
const AZ: f64 = 1.0;

/// Franke function on `[0, 1]³` with anisotropy coefficients `(0.4, 0.4, 1)`.
pub fn franke<T: Real>(x: T, y: T, z: T) -> T {
    let c = T::lit;
    let (ax, ay, az) = (c(AX), c(AY), c(AZ));
    let sq = |v: T| v * v;
    let nine = c(9.0);
    let t1 = c(0.75)
        * (-(sq(ax * (nine * x - c(2.0))) + sq(ay * (nine * y - c(2.0))) + sq(az * (nine * z - c(2.0)))) / c(4.0))
            .exp();
    let t2 = c(0.75)
        * (-(sq(ax * (nine * x + c(1.0))) / c(49.0)
            + sq(ay * (nine * y + c(1.0))) / c(10.0)
            + sq(az * (nine * z + c(1.0))) / c(10.0)))
            .exp();
    let t3 = c(0.5)
        * (-(sq(ax * (nine * x - c(7.0))) + sq(ay * (nine * y - c(3.0))) + sq(az * (nine * z - c(5.0)))) / c(4.0))
            .exp();
    let t4 = c(0.2)
        * (-(sq(ax * (nine * x - c(4.0))) + sq(ay * (nine * y - c(7.0))) + sq(az * (nine * z - c(5.0))))).exp();
    t1 + t2 + t3 - t4
}

/// `g̃(cos θ, sin θ, z) = g((x+1)/2, (y+1)/2, z/20)` on the unit-radius cylinder.
pub fn franke_cylinder<T: Real>(theta: T, z: T) -> Result<T, DataError> {
    if !(z >= T::zero() && z <= T::lit(FRANKE_HEIGHT)) {
        return Err(DataError::OutOfRange { value: z.as_f64(), what: "z must lie in [0, 20]" });
    }
    let half = T::lit(0.5);
    Ok(franke((theta.cos() + T::one()) * half, (theta.sin() + T::one()) * half, z / T::lit(FRANKE_HEIGHT)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_in_theta() {
        for k in 0..20 {
            let th = k as f64 * 0.37;
            let a = franke_cylinder(th, 7.5).unwrap();
            let b = franke_cylinder(th + 2.0 * std::f64::consts::PI, 7.5).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn pinned_value_at_theta_zero() {
        // g(1, 0.5, 0.5), term by term.
        let t1 = 0.75 * (-((0.4f64 * 7.0).powi(2) + (0.4f64 * 2.5).powi(2) + 2.5f64.powi(2)) / 4.0).exp();
        let t2 = 0.75 * (-((0.4f64 * 10.0).powi(2) / 49.0 + (0.4f64 * 5.5).powi(2) / 10.0 + 5.5f64.powi(2) / 10.0)).exp();
        let t3 = 0.5 * (-((0.4f64 * 2.0).powi(2) + (0.4f64 * 1.5).powi(2) + 0.5f64.powi(2)) / 4.0).exp();
        let t4 = 0.2 * (-((0.4f64 * 5.0).powi(2) + (0.4f64 * 2.5).powi(2) + 0.5f64.powi(2))).exp();
        let v = franke_cylinder(0.0, 10.0).unwrap();
        assert!((v - (t1 + t2 + t3 - t4)).abs() < 1e-15);
    }

    #[test]
    fn rejects_z_out_of_range() {
        assert!(franke_cylinder(0.0, 20.5).is_err());
        assert!(franke_cylinder(0.0, -0.1).is_err());
    }
}
