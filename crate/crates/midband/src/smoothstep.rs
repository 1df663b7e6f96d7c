//! Quintic C² smoothstep used for bump plateaus and cutoff flanks.
//!
//! The descending branch is `s(u) = 1 - u³(10 - 15u + 6u²)`, which runs from
//! 1 at `u = 0` to 0 at `u = 1` with vanishing first and second derivatives
//! at both ends, so piecewise definitions glue to C² functions.

/// Exact supremum of `|s'|` on [0, 1], attained at `u = 1/2`.
pub const SUP_ABS_D1: f64 = 15.0 / 8.0;

/// Exact supremum of `|s''|` on [0, 1], `10/sqrt(3)`, attained at
/// `u = (3 ± sqrt(3))/6`.
pub const SUP_ABS_D2: f64 = 5.773502691896258;

/// Descending smoothstep, clamped: 1 for `u <= 0`, 0 for `u >= 1`.
pub fn descend(u: f64) -> f64 {
    if u <= 0.0 {
        1.0
    } else if u >= 1.0 {
        0.0
    } else {
        1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
    }
}

/// First derivative of [`descend`]; `-30u²(1-u)²` inside, 0 outside.
pub fn descend_d1(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        -30.0 * u * u * (1.0 - u) * (1.0 - u)
    }
}

/// Second derivative of [`descend`]; `-60u(1-u)(1-2u)` inside, 0 outside.
pub fn descend_d2(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        -60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)
    }
}
