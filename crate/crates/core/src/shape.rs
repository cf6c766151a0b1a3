//! Target shapes as finite point sets with a uniform-grid nearest-point index.
//!
//! The squared distance to the shape, `mu(x) = min_p |x - p|^2`, is the
//! per-robot attraction potential. It is only piecewise smooth: on the medial
//! axis (points equidistant from two or more shape points) it has a concave
//! kink. Queries there resolve ties to the lowest point index, so
//! [`Shape::grad_mu`] returns the gradient of one active quadratic piece, which
//! is a deterministic one-sided choice rather than a true derivative.

use std::path::Path;

use crate::error::{Error, Result};
use crate::Vec2;

#[derive(Debug, Clone)]
pub struct Shape {
    points: Vec<Vec2>,
    min: Vec2,
    max: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    // CSR layout: points of cell c are items[start[c]..start[c + 1]], ascending index.
    start: Vec<usize>,
    items: Vec<usize>,
    resolution: f64,
}

impl Shape {
    pub fn new(points: Vec<Vec2>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyShape);
        }
        if let Some(i) = points.iter().position(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(Error::NonFinitePosition { index: i });
        }
        let mut min = points[0];
        let mut max = points[0];
        for p in &points {
            min = min.inf(p);
            max = max.sup(p);
        }
        let diag = (max - min).norm();
        let cell = if diag > 0.0 {
            diag / (points.len() as f64).sqrt()
        } else {
            1.0
        };
        let nx = ((max.x - min.x) / cell).floor() as usize + 1;
        let ny = ((max.y - min.y) / cell).floor() as usize + 1;

        let cell_of = |p: &Vec2| -> usize {
            let cx = (((p.x - min.x) / cell).floor() as usize).min(nx - 1);
            let cy = (((p.y - min.y) / cell).floor() as usize).min(ny - 1);
            cy * nx + cx
        };
        let mut counts = vec![0usize; nx * ny + 1];
        for p in &points {
            counts[cell_of(p) + 1] += 1;
        }
        for c in 1..counts.len() {
            counts[c] += counts[c - 1];
        }
        let start = counts.clone();
        let mut fill = counts;
        let mut items = vec![0usize; points.len()];
        for (i, p) in points.iter().enumerate() {
            let c = cell_of(p);
            items[fill[c]] = i;
            fill[c] += 1;
        }

        let mut shape = Shape {
            points,
            min,
            max,
            cell,
            nx,
            ny,
            start,
            items,
            resolution: 0.0,
        };
        shape.resolution = shape.median_spacing();
        Ok(shape)
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Axis-aligned bounding box as `(min, max)` corners.
    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        (self.min, self.max)
    }

    /// Median distance from a shape point to its nearest other shape point.
    /// Zero for single-point shapes.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// Nearest shape point to `x` as `(index, squared distance)`. Ties go to
    /// the lowest index.
    pub fn nearest(&self, x: Vec2) -> (usize, f64) {
        self.nearest_filtered(x, usize::MAX)
    }

    pub fn nearest_point(&self, x: Vec2) -> (Vec2, f64) {
        let (i, d) = self.nearest(x);
        (self.points[i], d)
    }

    pub fn mu(&self, x: Vec2) -> f64 {
        self.nearest(x).1
    }

    /// `2 (x - p*)` with `p*` the tie-broken nearest point.
    pub fn grad_mu(&self, x: Vec2) -> Vec2 {
        let (i, _) = self.nearest(x);
        2.0 * (x - self.points[i])
    }

    fn nearest_filtered(&self, x: Vec2, skip: usize) -> (usize, f64) {
        let fx = ((x.x - self.min.x) / self.cell).floor();
        let fy = ((x.y - self.min.y) / self.cell).floor();
        // Clamp far-away queries so ring indices stay well inside i64.
        let lim = (self.nx.max(self.ny) as f64) * 4.0 + 4.0;
        let cx = fx.clamp(-lim, lim) as i64;
        let cy = fy.clamp(-lim, lim) as i64;
        let (nx, ny) = (self.nx as i64, self.ny as i64);

        let axis_gap = |c: i64, n: i64| -> i64 {
            if c < 0 {
                -c
            } else if c >= n {
                c - (n - 1)
            } else {
                0
            }
        };
        let k0 = axis_gap(cx, nx).max(axis_gap(cy, ny));
        let kmax = cx.max(nx - 1 - cx).max(cy).max(ny - 1 - cy).max(k0);

        let mut best = (usize::MAX, f64::INFINITY);
        let visit = |gx: i64, gy: i64, best: &mut (usize, f64)| {
            let c = (gy * nx + gx) as usize;
            for &i in &self.items[self.start[c]..self.start[c + 1]] {
                if i == skip {
                    continue;
                }
                let d = (x - self.points[i]).norm_squared();
                if d < best.1 || (d == best.1 && i < best.0) {
                    *best = (i, d);
                }
            }
        };

        for k in k0..=kmax {
            let x_lo = (cx - k).max(0);
            let x_hi = (cx + k).min(nx - 1);
            let y_lo = (cy - k).max(0);
            let y_hi = (cy + k).min(ny - 1);
            if k == 0 {
                visit(cx, cy, &mut best);
            } else {
                for gy in [cy - k, cy + k] {
                    if (0..ny).contains(&gy) {
                        for gx in x_lo..=x_hi {
                            visit(gx, gy, &mut best);
                        }
                    }
                }
                for gx in [cx - k, cx + k] {
                    if (0..nx).contains(&gx) {
                        for gy in y_lo.max(cy - k + 1)..=y_hi.min(cy + k - 1) {
                            visit(gx, gy, &mut best);
                        }
                    }
                }
            }
            // Every cell in ring k + 1 or beyond is more than k cells away.
            let bound = (k as f64) * self.cell * (1.0 - 1e-9);
            if best.1 < bound * bound {
                break;
            }
        }
        best
    }

    fn median_spacing(&self) -> f64 {
        if self.points.len() < 2 {
            return 0.0;
        }
        let mut d: Vec<f64> = (0..self.points.len())
            .map(|i| self.nearest_filtered(self.points[i], i).1.sqrt())
            .collect();
        d.sort_by(f64::total_cmp);
        d[d.len() / 2]
    }

    /// Same point set moved by `v`.
    pub fn translated(&self, v: Vec2) -> Shape {
        Shape::new(self.points.iter().map(|p| p + v).collect()).expect("non-empty")
    }

    // ---- generators ----

    /// `n` points evenly spaced on a circle, starting at angle zero.
    pub fn circle(center: Vec2, radius: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyShape);
        }
        let pts = (0..n)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / n as f64;
                center + radius * Vec2::new(a.cos(), a.sin())
            })
            .collect();
        Shape::new(pts)
    }

    /// Points along a chain of segments, spaced at most `spacing` apart.
    pub fn segment_chain(vertices: &[Vec2], spacing: f64, closed: bool) -> Result<Self> {
        if spacing <= 0.0 || !spacing.is_finite() {
            return Err(crate::error::invalid("spacing", "must be positive"));
        }
        if vertices.is_empty() {
            return Err(Error::EmptyShape);
        }
        let mut pts = Vec::new();
        let mut segs: Vec<(Vec2, Vec2)> = vertices.windows(2).map(|w| (w[0], w[1])).collect();
        if closed && vertices.len() > 2 {
            segs.push((vertices[vertices.len() - 1], vertices[0]));
        }
        if segs.is_empty() {
            pts.push(vertices[0]);
        }
        for (a, b) in &segs {
            let n = ((b - a).norm() / spacing).ceil().max(1.0) as usize;
            for k in 0..n {
                pts.push(a + (b - a) * (k as f64 / n as f64));
            }
        }
        if !closed {
            if let Some(last) = vertices.last() {
                if !segs.is_empty() {
                    pts.push(*last);
                }
            }
        }
        Shape::new(pts)
    }

    /// Grid samples (pitch `spacing`) of the region where `inside` holds,
    /// within the box `[lo, hi]`. Rows are emitted bottom to top.
    pub fn from_region(
        lo: Vec2,
        hi: Vec2,
        spacing: f64,
        inside: impl Fn(Vec2) -> bool,
    ) -> Result<Self> {
        if spacing <= 0.0 || !spacing.is_finite() {
            return Err(crate::error::invalid("spacing", "must be positive"));
        }
        let nx = ((hi.x - lo.x) / spacing).floor() as usize + 1;
        let ny = ((hi.y - lo.y) / spacing).floor() as usize + 1;
        let mut pts = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let p = Vec2::new(lo.x + i as f64 * spacing, lo.y + j as f64 * spacing);
                if inside(p) {
                    pts.push(p);
                }
            }
        }
        Shape::new(pts)
    }

    /// Grid-sampled interior of a simple polygon (even-odd rule).
    pub fn polygon(vertices: &[Vec2], spacing: f64) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(crate::error::invalid("polygon", "needs at least 3 vertices"));
        }
        let mut lo = vertices[0];
        let mut hi = vertices[0];
        for v in vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        Shape::from_region(lo, hi, spacing, |p| point_in_polygon(p, vertices))
    }

    /// A thick closed loop with a diagonal tail stroke, shaped like a
    /// handwritten 'Q' and sized to sit inside `[-6, 6]^2` when `scale = 1`.
    pub fn q_like(scale: f64, spacing: f64) -> Result<Self> {
        let center = Vec2::new(-0.3, 0.4) * scale;
        let (inner, outer) = (2.9 * scale, 4.4 * scale);
        let tail_a = Vec2::new(1.9, -1.7) * scale;
        let tail_b = Vec2::new(5.2, -5.2) * scale;
        let tail_half = 0.4 * scale;
        let ext = 6.0 * scale;
        Shape::from_region(
            Vec2::new(-ext, -ext),
            Vec2::new(ext, ext),
            spacing,
            |p| {
                let r = (p - center).norm();
                (inner..=outer).contains(&r) || segment_distance(p, tail_a, tail_b) <= tail_half
            },
        )
    }

    // ---- file formats ----

    /// One point per line, two numbers separated by whitespace or a comma.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut pts = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if fields.len() != 2 {
                return Err(Error::ShapeParse {
                    line: ln + 1,
                    msg: format!("expected 2 numbers, found {}", fields.len()),
                });
            }
            let mut xy = [0.0; 2];
            for (k, f) in fields.iter().enumerate() {
                xy[k] = f.parse().map_err(|_| Error::ShapeParse {
                    line: ln + 1,
                    msg: format!("not a number: {f:?}"),
                })?;
            }
            pts.push(Vec2::new(xy[0], xy[1]));
        }
        Shape::new(pts)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.points.len() * 24);
        for p in &self.points {
            s.push_str(&format!("{} {}\n", p.x, p.y));
        }
        s
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        if bytes.starts_with(b"P5") {
            return Err(Error::Bitmap(
                "binary graymap given where a point list was expected; use from_pgm".into(),
            ));
        }
        let text = String::from_utf8(bytes).map_err(|_| Error::ShapeParse {
            line: 0,
            msg: "file is not UTF-8".into(),
        })?;
        Shape::parse_text(&text)
    }

    /// Binary graymap (`P5`) ingestion: pixels darker than `threshold` become
    /// points at their pixel centers, scaled (aspect preserved) into
    /// `[-half_width, half_width]^2` with image row 0 at the top.
    pub fn from_pgm(bytes: &[u8], threshold: u16, half_width: f64) -> Result<Self> {
        let (w, h, maxval, data) = parse_pgm(bytes)?;
        let pitch = 2.0 * half_width / w.max(h) as f64;
        let x0 = -pitch * w as f64 / 2.0;
        let y0 = pitch * h as f64 / 2.0;
        let wide = maxval > 255;
        let mut pts = Vec::new();
        for row in 0..h {
            for col in 0..w {
                let k = row * w + col;
                let v = if wide {
                    u16::from_be_bytes([data[2 * k], data[2 * k + 1]])
                } else {
                    data[k] as u16
                };
                if v < threshold {
                    pts.push(Vec2::new(
                        x0 + (col as f64 + 0.5) * pitch,
                        y0 - (row as f64 + 0.5) * pitch,
                    ));
                }
            }
        }
        if pts.is_empty() {
            return Err(Error::Bitmap("no pixel below threshold".into()));
        }
        Shape::new(pts)
    }
}

fn parse_pgm(bytes: &[u8]) -> Result<(usize, usize, u16, &[u8])> {
    if !bytes.starts_with(b"P5") {
        return Err(Error::Bitmap("missing P5 magic".into()));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for f in fields.iter_mut() {
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                Some(_) => break,
                None => return Err(Error::Bitmap("truncated header".into())),
            }
        }
        let s = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        *f = std::str::from_utf8(&bytes[s..pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Bitmap("bad header number".into()))?;
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let [w, h, maxval] = fields;
    if w == 0 || h == 0 || maxval == 0 || maxval > 65535 {
        return Err(Error::Bitmap(format!("bad dimensions {w}x{h} maxval {maxval}")));
    }
    let bpp = if maxval > 255 { 2 } else { 1 };
    let need = w * h * bpp;
    let data = bytes
        .get(pos..pos + need)
        .ok_or_else(|| Error::Bitmap(format!("raster truncated: need {need} bytes")))?;
    Ok((w, h, maxval as u16, data))
}

pub fn point_in_polygon(p: Vec2, poly: &[Vec2]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (p - (a + t * ab)).norm()
}
