//! Circular-arc marching and the stable series kernels behind it.
//!
//! Arcs are parametrized by start point, unit tangent, signed curvature and
//! arc length. Signed curvature is positive for counter-clockwise turning.
//! Everything stays regular as the curvature crosses zero, which is what lets
//! straight walls (equal-pressure interfaces) be ordinary points of the
//! cluster solver.

use crate::vec2::V2;

/// sin(x)/x.
pub fn sinc(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-1 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))
    } else {
        x.sin() / x
    }
}

/// (1 - cos(x))/x.
pub fn cosc(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-1 {
        let x2 = x * x;
        x / 2.0 * (1.0 - x2 / 12.0 * (1.0 - x2 / 30.0 * (1.0 - x2 / 56.0 * (1.0 - x2 / 90.0))))
    } else {
        (1.0 - x.cos()) / x
    }
}

/// (x - sin(x))/x^3, the circular-segment kernel.
pub fn sin_rem(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-1 {
        let x2 = x * x;
        (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0)))) / 6.0
    } else {
        (x - x.sin()) / (x * x * x)
    }
}

/// Walk an arc of signed curvature `k` and length `len` from `start` with
/// unit tangent `tangent`. Returns the end point and end tangent.
pub fn march(start: V2, tangent: V2, k: f64, len: f64) -> (V2, V2) {
    let phi = k * len;
    let normal = tangent.perp();
    let end = start + len * (sinc(phi) * tangent + cosc(phi) * normal);
    (end, tangent.rotate(phi))
}

/// Green's-theorem contribution of one boundary leg to the enclosed area.
///
/// The leg runs from `a` to `b` with signed curvature `k` over length `len`;
/// the boundary is traversed so the enclosed region lies on the left. The
/// contribution is the chord term plus the signed circular segment:
/// `cross(a, b)/2 + (phi - sin phi) / (2 k^2)` with `phi = k * len`.
pub fn green_leg(a: V2, b: V2, k: f64, len: f64) -> f64 {
    let phi = k * len;
    0.5 * a.cross(b) + 0.5 * k * len * len * len * sin_rem(phi)
}

/// Area of the circular segment cut by the chord of an arc with half-angle
/// `w` and unit half-chord (radius `1/sin w`).
pub fn unit_segment(w: f64) -> f64 {
    let s = w.sin();
    if w == 0.0 {
        return 0.0;
    }
    4.0 * w * w * w * sin_rem(2.0 * w) / (s * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec2::v2;
    use std::f64::consts::PI;

    #[test]
    fn march_straight_and_circle() {
        let (end, tan) = march(v2(0.0, 0.0), v2(0.0, 1.0), 0.0, 2.5);
        assert!((end.x).abs() < 1e-15 && (end.y - 2.5).abs() < 1e-15);
        assert!((tan.x).abs() < 1e-15 && (tan.y - 1.0).abs() < 1e-15);

        // Half turn of a unit circle starting at the origin heading +x.
        let (end, tan) = march(v2(0.0, 0.0), v2(1.0, 0.0), 1.0, PI);
        assert!((end.x).abs() < 1e-12 && (end.y - 2.0).abs() < 1e-12);
        assert!((tan.x + 1.0).abs() < 1e-12);
    }

    #[test]
    fn series_match_direct_eval() {
        for &x in &[1e-3, 5e-2, 0.099, 0.1001, 0.3] {
            assert!((sinc(x) - x.sin() / x).abs() < 1e-15);
            // The direct forms lose ~ulp(1)/x to cancellation; the series is
            // the accurate one, so compare at the direct form's precision.
            let slack = 1e-15 + 3e-16 / x;
            assert!((cosc(x) - (1.0 - x.cos()) / x).abs() < slack);
            let direct = (x - x.sin()) / (x * x * x);
            assert!((sin_rem(x) - direct).abs() / direct < 1e-15 / (x * x) + 1e-12);
        }
    }

    #[test]
    fn green_leg_full_circle() {
        // A closed unit circle traversed counter-clockwise encloses pi.
        let a = v2(1.0, 0.0);
        let area = green_leg(a, a, 1.0, 2.0 * PI);
        assert!((area - PI).abs() < 1e-12);
    }

    #[test]
    fn unit_segment_values() {
        // Half-angle pi/2: half disk of radius 1.
        assert!((unit_segment(PI / 2.0) - PI / 2.0).abs() < 1e-12);
        // Small angle: ~ 2w/3.
        let w = 1e-6;
        assert!((unit_segment(w) - 2.0 * w / 3.0).abs() < 1e-12 * w);
    }
}
