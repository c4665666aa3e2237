//! SVG figures: plain paths and markers in a fixed per-family view box, so
//! two figures of the same family differ only where the data differ.

use std::fmt::Write;

use scurve_core::family::Family;
use scurve_core::C64;

pub struct Figure {
    /// `(x_min, y_min, width, height)` in the complex plane.
    view: (f64, f64, f64, f64),
    body: String,
}

/// Coordinates are printed with this many decimals.
const DECIMALS: usize = 5;

impl Figure {
    pub fn for_family(family: &Family) -> Self {
        let view = match family {
            Family::Cubic { .. } => (-3.0, -3.0, 6.0, 6.0),
            Family::Quintic(_) => (-2.5, -2.5, 5.0, 5.0),
        };
        let mut f = Self { view, body: String::new() };
        f.axes();
        f
    }

    fn inside(&self, z: C64, margin: f64) -> bool {
        let (x, y, w, h) = self.view;
        z.re >= x - margin && z.re <= x + w + margin && z.im >= y - margin && z.im <= y + h + margin
    }

    fn axes(&mut self) {
        let (x, y, w, h) = self.view;
        let _ = writeln!(
            self.body,
            r##"<path d="M{:.1} 0 H{:.1} M0 {:.1} V{:.1}" stroke="#bbbbbb" stroke-width="0.01" fill="none"/>"##,
            x,
            x + w,
            -y,
            -(y + h)
        );
    }

    /// Polyline, decimated to steps of at least `0.005` and clipped just
    /// outside the view box.
    pub fn path(&mut self, points: &[C64], stroke: &str, dashed: bool) {
        let mut d = String::new();
        let mut last: Option<C64> = None;
        let mut pen_down = false;
        for (i, &z) in points.iter().enumerate() {
            if !self.inside(z, 0.5) {
                pen_down = false;
                last = None;
                continue;
            }
            let is_last = i + 1 == points.len();
            if let Some(l) = last {
                if (z - l).norm() < 0.005 && !is_last {
                    continue;
                }
            }
            let cmd = if pen_down { 'L' } else { 'M' };
            let _ = write!(d, "{cmd}{:.p$} {:.p$} ", z.re, -z.im, p = DECIMALS);
            pen_down = true;
            last = Some(z);
        }
        if d.is_empty() {
            return;
        }
        let dash = if dashed { r#" stroke-dasharray="0.06 0.04""# } else { "" };
        let _ = writeln!(
            self.body,
            r#"<path d="{}" stroke="{stroke}" stroke-width="0.02" fill="none"{dash}/>"#,
            d.trim_end()
        );
    }

    pub fn markers(&mut self, points: &[C64], radius: f64, fill: &str) {
        for &z in points {
            if self.inside(z, 0.0) {
                let _ = writeln!(
                    self.body,
                    r#"<circle cx="{:.p$}" cy="{:.p$}" r="{radius}" fill="{fill}"/>"#,
                    z.re,
                    -z.im,
                    p = DECIMALS
                );
            }
        }
    }

    /// Closed polygon outline.
    pub fn outline(&mut self, corners: &[C64], stroke: &str) {
        let mut pts = corners.to_vec();
        pts.push(corners[0]);
        let mut d = String::new();
        for (i, z) in pts.iter().enumerate() {
            let _ = write!(d, "{}{:.p$} {:.p$} ", if i == 0 { 'M' } else { 'L' }, z.re, -z.im, p = DECIMALS);
        }
        let _ = writeln!(
            self.body,
            r#"<path d="{}" stroke="{stroke}" stroke-width="0.012" fill="none" stroke-dasharray="0.02 0.03"/>"#,
            d.trim_end()
        );
    }

    /// `sources` names the data files the figure was drawn from.
    pub fn render(&self, title: &str, sources: &[String]) -> String {
        let (x, y, w, h) = self.view;
        // SVG y grows downwards: the view box spans -(y + h) .. -y
        format!(
            concat!(
                r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="600" height="600">"#,
                "\n<title>{}</title>\n<desc>data: {}</desc>\n",
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="white"/>"#,
                "\n{}</svg>\n"
            ),
            x,
            -(y + h),
            w,
            h,
            title,
            sources.join(" "),
            x,
            -(y + h),
            w,
            h,
            self.body
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn view_box_is_fixed_per_family() {
        let a = Figure::for_family(&Family::Cubic { k: 0.0 }).render("a", &[]);
        let b = Figure::for_family(&Family::Cubic { k: 2.0 }).render("a", &[]);
        assert_eq!(a, b);
        assert!(a.contains(r#"viewBox="-3 -3 6 6""#));
    }

    #[test]
    fn paths_are_clipped_and_flipped() {
        let mut f = Figure::for_family(&Family::Cubic { k: 0.0 });
        f.path(&[C64::new(0.0, 1.0), C64::new(1.0, 1.0), C64::new(50.0, 0.0)], "black", false);
        let s = f.render("t", &[]);
        assert!(s.contains("M0.00000 -1.00000 L1.00000 -1.00000\""));
        assert!(!s.contains("50.0"));
    }
}
