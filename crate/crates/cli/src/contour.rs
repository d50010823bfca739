//! Marching squares on a rectangular grid and the area of the region around
//! a point.
//!
//! Points below the level are "inside". The grid is padded with a ring of
//! outside values sitting on the boundary coordinates, so every contour is a
//! closed loop and regions touching the border are clipped to it.

use std::collections::HashMap;

/// Values on `xs × ys`, row-major with `x` as the row index.
#[derive(Debug, Clone)]
pub struct Grid<'a> {
    pub xs: &'a [f64],
    pub ys: &'a [f64],
    pub values: &'a [f64],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Edge {
    /// Between padded nodes `(i, j)` and `(i, j + 1)`.
    Row(usize, usize),
    /// Between padded nodes `(i, j)` and `(i + 1, j)`.
    Col(usize, usize),
}

struct Padded<'a> {
    grid: &'a Grid<'a>,
    outside: f64,
}

impl Padded<'_> {
    fn rows(&self) -> usize {
        self.grid.xs.len() + 2
    }

    fn cols(&self) -> usize {
        self.grid.ys.len() + 2
    }

    fn value(&self, i: usize, j: usize) -> f64 {
        let (nx, ny) = (self.grid.xs.len(), self.grid.ys.len());
        if i == 0 || j == 0 || i > nx || j > ny {
            self.outside
        } else {
            self.grid.values[(i - 1) * ny + (j - 1)]
        }
    }

    fn coord(&self, i: usize, j: usize) -> (f64, f64) {
        let (nx, ny) = (self.grid.xs.len(), self.grid.ys.len());
        let x = self.grid.xs[i.clamp(1, nx) - 1];
        let y = self.grid.ys[j.clamp(1, ny) - 1];
        (x, y)
    }

    fn crossing(&self, e: Edge, level: f64) -> (f64, f64) {
        let (a, b) = match e {
            Edge::Row(i, j) => ((i, j), (i, j + 1)),
            Edge::Col(i, j) => ((i, j), (i + 1, j)),
        };
        let (va, vb) = (self.value(a.0, a.1), self.value(b.0, b.1));
        let t = (level - va) / (vb - va);
        let (pa, pb) = (self.coord(a.0, a.1), self.coord(b.0, b.1));
        (pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1))
    }
}

/// All closed contour loops at `level`, each an ordered list of vertices
/// without the closing repeat.
pub fn contour_loops(grid: &Grid, level: f64) -> Vec<Vec<(f64, f64)>> {
    assert_eq!(grid.values.len(), grid.xs.len() * grid.ys.len(), "grid shape");
    let p = Padded {
        grid,
        outside: level + 1.0,
    };
    let inside = |i: usize, j: usize| p.value(i, j) < level;

    let mut segments: Vec<[Edge; 2]> = Vec::new();
    for i in 0..p.rows() - 1 {
        for j in 0..p.cols() - 1 {
            let (a, b, c, d) = (inside(i, j), inside(i, j + 1), inside(i + 1, j + 1), inside(i + 1, j));
            let top = Edge::Row(i, j);
            let right = Edge::Col(i, j + 1);
            let bottom = Edge::Row(i + 1, j);
            let left = Edge::Col(i, j);
            let crossed: Vec<Edge> = [(top, a != b), (right, b != c), (bottom, c != d), (left, d != a)]
                .into_iter()
                .filter_map(|(e, x)| x.then_some(e))
                .collect();
            match crossed.len() {
                0 => {}
                2 => segments.push([crossed[0], crossed[1]]),
                _ => {
                    // Saddle: the cell centre decides which diagonal connects.
                    let centre = (p.value(i, j) + p.value(i, j + 1) + p.value(i + 1, j + 1) + p.value(i + 1, j)) / 4.0;
                    if (centre < level) == a {
                        segments.push([top, right]);
                        segments.push([bottom, left]);
                    } else {
                        segments.push([left, top]);
                        segments.push([right, bottom]);
                    }
                }
            }
        }
    }

    let mut at_edge: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, s) in segments.iter().enumerate() {
        for e in s {
            at_edge.entry(*e).or_default().push(k);
        }
    }
    let mut used = vec![false; segments.len()];
    let mut loops = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        let first_edge = segments[start][0];
        let mut pts = vec![p.crossing(first_edge, level)];
        let (mut seg, mut edge) = (start, segments[start][1]);
        loop {
            used[seg] = true;
            if edge == first_edge {
                break;
            }
            pts.push(p.crossing(edge, level));
            let next = at_edge[&edge].iter().copied().find(|&k| k != seg && !used[k]);
            match next {
                Some(k) => {
                    let s = segments[k];
                    edge = if s[0] == edge { s[1] } else { s[0] };
                    seg = k;
                }
                None => break,
            }
        }
        loops.push(pts);
    }
    loops
}

/// Absolute shoelace area.
pub fn polygon_area(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len();
    let twice: f64 = (0..n)
        .map(|k| {
            let (a, b) = (pts[k], pts[(k + 1) % n]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum();
    twice.abs() / 2.0
}

/// Even-odd ray casting.
pub fn contains(pts: &[(f64, f64)], q: (f64, f64)) -> bool {
    let n = pts.len();
    let mut inside = false;
    for k in 0..n {
        let (a, b) = (pts[k], pts[(k + 1) % n]);
        if (a.1 > q.1) != (b.1 > q.1) {
            let x = a.0 + (q.1 - a.1) / (b.1 - a.1) * (b.0 - a.0);
            if q.0 < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// The innermost contour loop around `q`, which bounds the connected
/// inside region containing `q`, with its area. `None` when no loop
/// encloses `q`.
pub fn region_around(grid: &Grid, level: f64, q: (f64, f64)) -> Option<(Vec<(f64, f64)>, f64)> {
    contour_loops(grid, level)
        .into_iter()
        .filter(|l| l.len() >= 3 && contains(l, q))
        .map(|l| {
            let a = polygon_area(&l);
            (l, a)
        })
        .min_by(|x, y| x.1.total_cmp(&y.1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
    }

    fn sample(xs: &[f64], ys: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).map(|(x, y)| f(x, y)).collect()
    }

    #[test]
    fn disc_area_converges() {
        let xs = axis(201, -1.0, 1.0);
        let v = sample(&xs, &xs, |x, y| x * x + y * y);
        let g = Grid {
            xs: &xs,
            ys: &xs,
            values: &v,
        };
        let (l, a) = region_around(&g, 0.25, (0.0, 0.0)).unwrap();
        let exact = std::f64::consts::PI * 0.25;
        assert!((a - exact).abs() / exact < 1e-3, "{a}");
        for (x, y) in l {
            assert!(((x * x + y * y).sqrt() - 0.5).abs() < 1e-3);
        }
    }

    #[test]
    fn ellipse_and_square_oracles() {
        // Level sets of x²/4 + y² are ellipses of area π·2·1·c.
        let xs = axis(301, -3.0, 3.0);
        let ys = axis(151, -1.5, 1.5);
        let v = sample(&xs, &ys, |x, y| x * x / 4.0 + y * y);
        let g = Grid {
            xs: &xs,
            ys: &ys,
            values: &v,
        };
        let (_, a) = region_around(&g, 1.0, (0.0, 0.0)).unwrap();
        assert!((a - 2.0 * std::f64::consts::PI).abs() < 5e-3, "{a}");
        // Max-norm level sets are squares. Halfway between nodes, each
        // corner cell cuts off a right triangle with legs h/2.
        let w = sample(&xs, &ys, |x, y| x.abs().max(y.abs()));
        let g = Grid {
            xs: &xs,
            ys: &ys,
            values: &w,
        };
        let (_, a) = region_around(&g, 0.51, (0.0, 0.0)).unwrap();
        let expect = 1.02 * 1.02 - 4.0 * 0.5 * 0.01 * 0.01;
        assert!((a - expect).abs() < 1e-9, "{a}");
    }

    #[test]
    fn region_touching_border_is_clipped() {
        let xs = axis(11, -1.0, 1.0);
        let v = vec![0.0; 121];
        let g = Grid {
            xs: &xs,
            ys: &xs,
            values: &v,
        };
        let (_, a) = region_around(&g, 0.5, (0.0, 0.0)).unwrap();
        assert!((a - 4.0).abs() < 1e-12);
    }

    #[test]
    fn picks_the_component_of_the_point() {
        // Two separate wells; the one around the origin is the smaller.
        let xs = axis(201, -2.0, 2.0);
        let ys = axis(101, -1.0, 1.0);
        let v = sample(&xs, &ys, |x, y| {
            let a = (x * x + y * y) / 0.09;
            let b = ((x - 1.2).powi(2) + y * y) / 0.36;
            a.min(b)
        });
        let g = Grid {
            xs: &xs,
            ys: &ys,
            values: &v,
        };
        let (_, a) = region_around(&g, 1.0, (0.0, 0.0)).unwrap();
        assert!((a - std::f64::consts::PI * 0.09).abs() < 2e-3, "{a}");
        assert_eq!(contour_loops(&g, 1.0).len(), 2);
        assert!(region_around(&g, 1.0, (-1.8, 0.9)).is_none());
    }

    #[test]
    fn ring_region_picks_inner_boundary() {
        // Inside near the origin, outside on a ring, inside again beyond it.
        let xs = axis(201, -2.0, 2.0);
        let v = sample(&xs, &xs, |x, y| {
            let r = (x * x + y * y).sqrt();
            if (0.5..1.0).contains(&r) {
                1.0
            } else {
                0.0
            }
        });
        let g = Grid {
            xs: &xs,
            ys: &xs,
            values: &v,
        };
        let (_, a) = region_around(&g, 0.5, (0.0, 0.0)).unwrap();
        assert!((a - std::f64::consts::PI * 0.25).abs() < 0.03, "{a}");
    }

    #[test]
    fn saddle_cells_give_closed_loops() {
        // Checkerboard of inside/outside nodes.
        let xs = axis(6, 0.0, 5.0);
        let v: Vec<f64> = (0..36).map(|k| ((k / 6 + k % 6) % 2) as f64).collect();
        let g = Grid {
            xs: &xs,
            ys: &xs,
            values: &v,
        };
        let loops = contour_loops(&g, 0.5);
        assert!(!loops.is_empty());
        let total: usize = loops.iter().map(|l| l.len()).sum();
        // Every crossed edge appears in exactly one loop: all 60 interior
        // edges, plus two border edges per inside border node (corners
        // count twice: one per side).
        let border_inside = (0..6)
            .flat_map(|i| (0..6).map(move |j| (i, j)))
            .filter(|&(i, j)| (i == 0 || i == 5 || j == 0 || j == 5) && (i + j) % 2 == 0)
            .map(|(i, j)| usize::from(i == 0 || i == 5) + usize::from(j == 0 || j == 5))
            .sum::<usize>();
        assert_eq!(total, 60 + border_inside);
    }

    proptest::proptest! {
        #[test]
        fn disc_areas(r in 0.2..0.9f64, cx in -0.1..0.1f64, cy in -0.1..0.1f64) {
            let xs = axis(121, -1.2, 1.2);
            let v = sample(&xs, &xs, |x, y| ((x - cx).powi(2) + (y - cy).powi(2)).sqrt());
            let g = Grid { xs: &xs, ys: &xs, values: &v };
            let (l, a) = region_around(&g, r, (0.0, 0.0)).unwrap();
            let exact = std::f64::consts::PI * r * r;
            // Interpolation and chord errors both shrink with (h/r)².
            let h = xs[1] - xs[0];
            proptest::prop_assert!((a - exact).abs() / exact < 0.5 * (h / r).powi(2), "{} vs {}", a, exact);
            proptest::prop_assert!(contains(&l, (cx, cy)));
        }
    }

    #[test]
    fn shoelace_and_containment() {
        let sq = [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)];
        assert_eq!(polygon_area(&sq), 2.0);
        assert!(contains(&sq, (1.0, 0.5)));
        assert!(!contains(&sq, (3.0, 0.5)));
    }
}
