//! Overlap measures: image-plane rectangles, rotated bird's-eye-view
//! footprints and full 3D boxes.

use crate::geometry::{Box2D, Box3D};

/// Shoelace signed area; positive for counter-clockwise vertex order.
pub fn signed_area(poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let twice: f64 = (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a.0 * b.1 - a.1 * b.0
        })
        .sum();
    0.5 * twice
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn line_intersection(p: (f64, f64), q: (f64, f64), a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let dp = cross(a, b, p);
    let dq = cross(a, b, q);
    let t = dp / (dp - dq);
    (p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1))
}

/// Clips `subject` against the convex counter-clockwise polygon `clip`.
pub fn clip_convex(subject: &[(f64, f64)], clip: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = subject.to_vec();
    for i in 0..clip.len() {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clip[i], clip[(i + 1) % clip.len()]);
        let input = std::mem::take(&mut out);
        for j in 0..input.len() {
            let p = input[j];
            let q = input[(j + 1) % input.len()];
            let (p_in, q_in) = (cross(a, b, p) >= 0.0, cross(a, b, q) >= 0.0);
            if p_in {
                out.push(p);
                if !q_in {
                    out.push(line_intersection(p, q, a, b));
                }
            } else if q_in {
                out.push(line_intersection(p, q, a, b));
            }
        }
    }
    out
}

/// IoU of two `(left, top, right, bottom)` rectangles.
pub fn iou_ltrb(a: [f64; 4], b: [f64; 4]) -> f64 {
    let iw = (a[2].min(b[2]) - a[0].max(b[0])).max(0.0);
    let ih = (a[3].min(b[3]) - a[1].max(b[1])).max(0.0);
    let inter = iw * ih;
    let area = |r: [f64; 4]| (r[2] - r[0]).max(0.0) * (r[3] - r[1]).max(0.0);
    let union = area(a) + area(b) - inter;
    if union <= 0.0 || inter <= 0.0 {
        0.0
    } else {
        (inter / union).min(1.0)
    }
}

/// Intersection area of `a` divided by the area of `a`.
pub fn coverage_ltrb(a: [f64; 4], b: [f64; 4]) -> f64 {
    let iw = (a[2].min(b[2]) - a[0].max(b[0])).max(0.0);
    let ih = (a[3].min(b[3]) - a[1].max(b[1])).max(0.0);
    let area = (a[2] - a[0]).max(0.0) * (a[3] - a[1]).max(0.0);
    if area <= 0.0 {
        0.0
    } else {
        iw * ih / area
    }
}

pub fn iou_2d(a: &Box2D, b: &Box2D) -> f64 {
    iou_ltrb(a.ltrb(), b.ltrb())
}

/// Footprint intersection area in the x–z plane.
pub fn bev_intersection(a: &Box3D, b: &Box3D) -> f64 {
    if let (Some(ea), Some(eb)) = (a.axis_aligned_extent(), b.axis_aligned_extent()) {
        let ox = (ea[2].min(eb[2]) - ea[0].max(eb[0])).max(0.0);
        let oz = (ea[3].min(eb[3]) - ea[1].max(eb[1])).max(0.0);
        return ox * oz;
    }
    let (pa, pb) = (a.footprint(), b.footprint());
    signed_area(&clip_convex(&pa, &pb)).max(0.0)
}

fn ratio(inter: f64, union: f64) -> f64 {
    if inter <= 0.0 || union <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}

/// Rotated-rectangle IoU of the two footprints.
pub fn iou_bev(a: &Box3D, b: &Box3D) -> f64 {
    let (area_a, area_b) = (a.width * a.length, b.width * b.length);
    if area_a <= 0.0 || area_b <= 0.0 {
        return 0.0;
    }
    let inter = bev_intersection(a, b);
    ratio(inter, area_a + area_b - inter)
}

/// Volumetric IoU: footprint intersection times vertical overlap.
pub fn iou_3d(a: &Box3D, b: &Box3D) -> f64 {
    let ((a0, a1), (b0, b1)) = (a.y_extent(), b.y_extent());
    let dy = (a1.min(b1) - a0.max(b0)).max(0.0);
    if dy <= 0.0 {
        return 0.0;
    }
    let inter = bev_intersection(a, b) * dy;
    ratio(inter, a.volume() + b.volume() - inter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camera::Point3;
    use crate::geometry::BoxKind;
    use std::f64::consts::PI;

    fn b3(w: f64, h: f64, l: f64, x: f64, y: f64, z: f64, ry: f64) -> Box3D {
        Box3D::new(w, h, l, Point3::new(x, y, z), ry).unwrap()
    }

    #[test]
    fn rect_cases() {
        let a = Box2D::from_ltrb(0.0, 0.0, 1.0, 1.0, BoxKind::Annotated);
        assert_eq!(iou_2d(&a, &a), 1.0);
        let far = Box2D::from_ltrb(5.0, 5.0, 6.0, 6.0, BoxKind::Annotated);
        assert_eq!(iou_2d(&a, &far), 0.0);
        let half = Box2D::from_ltrb(0.5, 0.0, 1.5, 1.0, BoxKind::Annotated);
        assert!((iou_2d(&a, &half) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(iou_ltrb([0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 0.0, 1.0]), 0.0);
    }

    #[test]
    fn bev_identity_and_flip() {
        let a = b3(1.6, 1.5, 3.9, 2.0, 1.7, 20.0, 0.4);
        assert!((iou_bev(&a, &a) - 1.0).abs() < 1e-12);
        let flipped = b3(1.6, 1.5, 3.9, 2.0, 1.7, 20.0, 0.4 + PI);
        assert!((iou_bev(&a, &flipped) - 1.0).abs() < 1e-12);
        assert!((iou_3d(&a, &a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bev_rotated_square() {
        // unit square vs the same square rotated by 45°: intersection is a
        // regular octagon of area 2(√2 - 1)
        let a = b3(1.0, 1.0, 1.0, 0.0, 0.0, 10.0, 0.0);
        let r = b3(1.0, 1.0, 1.0, 0.0, 0.0, 10.0, PI / 4.0);
        let inter = 2.0 * (2f64.sqrt() - 1.0);
        assert!((bev_intersection(&a, &r) - inter).abs() < 1e-12);
        assert!((iou_bev(&a, &r) - inter / (2.0 - inter)).abs() < 1e-12);
    }

    #[test]
    fn vertical_separation() {
        let a = b3(1.6, 1.5, 3.9, 0.0, 1.7, 20.0, 0.0);
        let above = b3(1.6, 1.5, 3.9, 0.0, 0.1, 20.0, 0.0);
        assert_eq!(iou_3d(&a, &above), 0.0);
        assert!((iou_bev(&a, &above) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_and_symmetric() {
        let a = b3(1.6, 1.5, 3.9, 0.0, 1.7, 20.0, 0.3);
        let b = b3(1.8, 1.4, 4.2, 10.0, 1.7, 20.0, -1.0);
        assert_eq!(iou_bev(&a, &b), 0.0);
        let c = b3(1.8, 1.4, 4.2, 0.7, 1.6, 21.0, -1.0);
        assert!((iou_bev(&a, &c) - iou_bev(&c, &a)).abs() < 1e-12);
        assert!(iou_3d(&a, &c) < iou_bev(&a, &c));
    }
}
