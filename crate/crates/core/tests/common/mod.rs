//! Oracles shared by the integration tests. Nothing here calls into the
//! library's geometry kernel.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dot(&sub(a, b), &sub(a, b)).sqrt()
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    d
}

/// Gram determinant of the edge vectors from the first point; equals
/// `(j! vol_j)²`.
pub fn gram(pts: &[&[f64]]) -> f64 {
    if pts.len() <= 1 {
        return 1.0;
    }
    let e: Vec<Vec<f64>> = pts[1..].iter().map(|p| sub(p, pts[0])).collect();
    let g: Vec<Vec<f64>> = e.iter().map(|a| e.iter().map(|b| dot(a, b)).collect()).collect();
    det(g).max(0.0)
}

/// Distance from `x` to the affine hull of `base`, by classical
/// Gram–Schmidt applied twice.
pub fn distance_to_hull(x: &[f64], base: &[&[f64]]) -> f64 {
    let o = base[0];
    let mut q: Vec<Vec<f64>> = Vec::new();
    for b in &base[1..] {
        let mut v = sub(b, o);
        for _ in 0..2 {
            for e in &q {
                let d = dot(e, &v);
                v.iter_mut().zip(e).for_each(|(a, b)| *a -= d * b);
            }
        }
        let n = dot(&v, &v).sqrt();
        if n > 0.0 {
            q.push(v.into_iter().map(|a| a / n).collect());
        }
    }
    let mut r = sub(x, o);
    for _ in 0..2 {
        for e in &q {
            let d = dot(e, &r);
            r.iter_mut().zip(e).for_each(|(a, b)| *a -= d * b);
        }
    }
    dot(&r, &r).sqrt()
}

/// Altitude of vertex `i`: its distance to the hull of the other vertices.
pub fn altitude(pts: &[Vec<f64>], i: usize) -> f64 {
    let rest: Vec<&[f64]> = pts
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, p)| p.as_slice())
        .collect();
    distance_to_hull(&pts[i], &rest)
}

pub fn diameter(pts: &[Vec<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d = d.max(dist(&pts[i], &pts[j]));
        }
    }
    d
}

pub fn shortest(pts: &[Vec<f64>]) -> f64 {
    let mut d = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d = d.min(dist(&pts[i], &pts[j]));
        }
    }
    d
}

pub fn thickness(pts: &[Vec<f64>]) -> f64 {
    let j = pts.len().saturating_sub(1);
    if j <= 1 {
        return 1.0;
    }
    let min_alt = (0..pts.len()).map(|i| altitude(pts, i)).fold(f64::INFINITY, f64::min);
    min_alt / (j as f64 * diameter(pts))
}

pub fn subset(pts: &[Vec<f64>], mask: u32) -> Vec<Vec<f64>> {
    (0..pts.len())
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| pts[i].clone())
        .collect()
}

/// Margin of face `mask` against its goodness threshold; negative means bad.
pub fn face_margin(pts: &[Vec<f64>], mask: u32, gamma0: f64) -> f64 {
    let f = subset(pts, mask);
    thickness(&f) - gamma0.powi(f.len() as i32 - 1)
}

/// Exhaustive classification: `(good, all face margins)`.
pub fn is_good(pts: &[Vec<f64>], gamma0: f64) -> bool {
    (1u32..(1 << pts.len())).all(|mask| mask.count_ones() < 3 || face_margin(pts, mask, gamma0) >= 0.0)
}

/// Whether the face `mask` is a flake: bad, with every proper face good.
pub fn is_flake(pts: &[Vec<f64>], mask: u32, gamma0: f64) -> bool {
    if face_margin(pts, mask, gamma0) >= 0.0 {
        return false;
    }
    (1u32..mask)
        .filter(|s| s & mask == *s && *s != mask)
        .all(|s| s.count_ones() < 3 || face_margin(pts, s, gamma0) >= 0.0)
}

/// Smallest `|margin| / threshold` over all faces of size ≥ 3.
pub fn closest_to_threshold(pts: &[Vec<f64>], gamma0: f64) -> f64 {
    (1u32..(1 << pts.len()))
        .filter(|m| m.count_ones() >= 3)
        .map(|m| face_margin(pts, m, gamma0).abs() / gamma0.powi(m.count_ones() as i32 - 1))
        .fold(f64::INFINITY, f64::min)
}

/// Circumradius of a triangle as `abc / (4 area)`.
pub fn triangle_circumradius(p: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let area = gram(&[p, u, v]).sqrt() / 2.0;
    dist(p, u) * dist(u, v) * dist(v, p) / (4.0 * area)
}

fn orient(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Positive when `d` is inside the circle through the counter-clockwise
/// triangle `a, b, c`.
fn incircle(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> f64 {
    let row = |p: &[f64]| {
        let (x, y) = (p[0] - d[0], p[1] - d[1]);
        vec![x, y, x * x + y * y]
    };
    det(vec![row(a), row(b), row(c)])
}

fn hull(pts: &[Vec<f64>], ids: &[usize]) -> Vec<usize> {
    let mut v = ids.to_vec();
    v.sort_by(|&i, &j| pts[i][0].total_cmp(&pts[j][0]).then(pts[i][1].total_cmp(&pts[j][1])));
    let mut lower: Vec<usize> = Vec::new();
    for &i in &v {
        while lower.len() >= 2 && orient(&pts[lower[lower.len() - 2]], &pts[lower[lower.len() - 1]], &pts[i]) <= 0.0 {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in v.iter().rev() {
        while upper.len() >= 2 && orient(&pts[upper[upper.len() - 2]], &pts[upper[upper.len() - 1]], &pts[i]) <= 0.0 {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Planar Delaunay triangulation: x-sorted sweep triangulation followed by
/// Lawson edge flips until every interior edge is locally Delaunay.
pub fn flip_delaunay(pts: &[Vec<f64>]) -> BTreeSet<[usize; 3]> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&i, &j| pts[i][0].total_cmp(&pts[j][0]).then(pts[i][1].total_cmp(&pts[j][1])));
    let ccw = |t: [usize; 3]| -> [usize; 3] {
        if orient(&pts[t[0]], &pts[t[1]], &pts[t[2]]) > 0.0 {
            t
        } else {
            [t[0], t[2], t[1]]
        }
    };
    let mut tris: Vec<[usize; 3]> = vec![ccw([order[0], order[1], order[2]])];
    for k in 3..order.len() {
        let p = order[k];
        let h = hull(pts, &order[..k]);
        for i in 0..h.len() {
            let (a, b) = (h[i], h[(i + 1) % h.len()]);
            // hull is counter-clockwise, so p sees edges it lies to the right of
            if orient(&pts[a], &pts[b], &pts[p]) < 0.0 {
                tris.push(ccw([a, b, p]));
            }
        }
    }
    loop {
        let mut edges: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (t, tri) in tris.iter().enumerate() {
            for e in 0..3 {
                let (a, b) = (tri[e], tri[(e + 1) % 3]);
                edges.entry((a.min(b), a.max(b))).or_default().push(t);
            }
        }
        let mut flipped = false;
        let mut keys: Vec<_> = edges.keys().copied().collect();
        keys.sort_unstable();
        for key in keys {
            let ts = &edges[&key];
            if ts.len() != 2 {
                continue;
            }
            let (t1, t2) = (tris[ts[0]], tris[ts[1]]);
            let w1 = *t1.iter().find(|&&v| v != key.0 && v != key.1).unwrap();
            let w2 = *t2.iter().find(|&&v| v != key.0 && v != key.1).unwrap();
            if incircle(&pts[t1[0]], &pts[t1[1]], &pts[t1[2]], &pts[w2]) > 0.0 {
                tris[ts[0]] = ccw([w1, w2, key.0]);
                tris[ts[1]] = ccw([w1, w2, key.1]);
                flipped = true;
                break;
            }
        }
        if !flipped {
            break;
        }
    }
    tris.into_iter()
        .map(|mut t| {
            t.sort_unstable();
            t
        })
        .collect()
}
