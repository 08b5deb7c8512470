use num_complex::Complex64;

use crate::geometry::SpherePoint;

/// A complex-valued function on the unit sphere.
pub trait SphericalFunction: Sync {
    fn eval(&self, xi: SpherePoint) -> Complex64;
}

impl<F> SphericalFunction for F
where
    F: Fn(SpherePoint) -> Complex64 + Sync,
{
    fn eval(&self, xi: SpherePoint) -> Complex64 {
        self(xi)
    }
}
