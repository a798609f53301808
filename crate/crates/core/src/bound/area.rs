//! Exact area of a disc intersected with an axis-aligned rectangle.

fn chord_primitive(x: f64, r: f64) -> f64 {
    let x = x.clamp(-r, r);
    0.5 * (x * (r * r - x * x).max(0.0).sqrt() + r * r * (x / r).asin())
}

/// Area of `{|p - c| <= r} ∩ [x0, x1] × [y0, y1]`.
pub fn disc_rect_area(c: [f64; 2], r: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let (x0, x1) = ((x0 - c[0]).max(-r), (x1 - c[0]).min(r));
    let (y0, y1) = (y0 - c[1], y1 - c[1]);
    if x0 >= x1 || y0 >= y1 || y0 >= r || y1 <= -r {
        return 0.0;
    }
    let mut cuts = vec![x0, x1];
    for y in [y0, y1] {
        if y.abs() < r {
            let s = (r * r - y * y).sqrt();
            cuts.extend([-s, s].into_iter().filter(|v| *v > x0 && *v < x1));
        }
    }
    cuts.sort_by(f64::total_cmp);
    let mut area = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let s = (r * r - mid * mid).max(0.0).sqrt();
        // on [a, b] each side is either the chord or the rectangle edge
        let (top_is_chord, bottom_is_chord) = (s < y1, -s > y0);
        let top = if top_is_chord { s } else { y1 };
        let bottom = if bottom_is_chord { -s } else { y0 };
        if top <= bottom {
            continue;
        }
        let chord = chord_primitive(b, r) - chord_primitive(a, r);
        let len = b - a;
        area += if top_is_chord { chord } else { y1 * len };
        area -= if bottom_is_chord { -chord } else { y0 * len };
    }
    area.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn whole_disc_and_quadrants() {
        let c = [0.3, -0.2];
        assert!((disc_rect_area(c, 0.5, -2.0, 2.0, -2.0, 2.0) - PI * 0.25).abs() < 1e-15);
        let q = disc_rect_area(c, 0.5, 0.3, 5.0, -0.2, 5.0);
        assert!((q - PI * 0.25 / 4.0).abs() < 1e-15);
        assert_eq!(disc_rect_area(c, 0.5, 1.0, 2.0, 0.0, 1.0), 0.0);
    }

    #[test]
    fn cells_tile_the_disc() {
        let (c, r) = ([0.5, 0.5], 0.37);
        let n = 23;
        let h = 1.0 / n as f64;
        let mut total = 0.0;
        for j in 0..n {
            for i in 0..n {
                let (x, y) = (i as f64 * h, j as f64 * h);
                total += disc_rect_area(c, r, x, x + h, y, y + h);
            }
        }
        assert!((total - PI * r * r).abs() < 1e-14);
    }

    #[test]
    fn matches_fine_midpoint_count() {
        let (c, r) = ([0.1, 0.2], 0.6);
        let (x0, x1, y0, y1) = (-0.2, 0.55, 0.35, 0.9);
        let m = 2000;
        let (dx, dy) = ((x1 - x0) / m as f64, (y1 - y0) / m as f64);
        let mut hits = 0usize;
        for j in 0..m {
            for i in 0..m {
                let x = x0 + (i as f64 + 0.5) * dx;
                let y = y0 + (j as f64 + 0.5) * dy;
                if (x - c[0]).hypot(y - c[1]) <= r {
                    hits += 1;
                }
            }
        }
        let count = hits as f64 * dx * dy;
        assert!((disc_rect_area(c, r, x0, x1, y0, y1) - count).abs() < 1e-4);
    }
}
