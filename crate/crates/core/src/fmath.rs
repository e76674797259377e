//! Float math shim. Everything numeric goes through libm so that results
//! are identical with and without `std` (and across platforms), which keeps
//! seeded verification reports byte-stable.

pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}
pub fn atan(x: f64) -> f64 {
    libm::atan(x)
}
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}
pub fn powi(x: f64, n: i32) -> f64 {
    let mut r = 1.0;
    let mut base = if n < 0 { 1.0 / x } else { x };
    let mut k = n.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            r *= base;
        }
        base *= base;
        k >>= 1;
    }
    r
}
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}
pub fn cosh(x: f64) -> f64 {
    libm::cosh(x)
}
pub fn sinh(x: f64) -> f64 {
    libm::sinh(x)
}
