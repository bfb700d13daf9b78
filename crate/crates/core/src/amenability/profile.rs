use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::Serialize;

use super::vertex_boundary;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRow {
    pub subset_id: usize,
    pub size: usize,
    pub boundary_size: usize,
    /// `#dF / #F`
    pub ratio: f64,
}

/// Hop balls `B(center, k)` for `k = 0, 1, ...` while they stay proper subsets.
pub fn hop_ball_subsets(adj: &[Vec<usize>], center: usize) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut dist = vec![usize::MAX; n];
    dist[center] = 0;
    let mut queue = VecDeque::from([center]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut out = Vec::new();
    for k in 0.. {
        let ball: Vec<usize> = (0..n).filter(|&v| dist[v] <= k).collect();
        if ball.len() == n || out.last().is_some_and(|b: &Vec<usize>| b.len() == ball.len()) {
            break;
        }
        out.push(ball);
    }
    out
}

pub fn isoperimetric_profile(adj: &[Vec<usize>], subsets: &[Vec<usize>]) -> Vec<ProfileRow> {
    subsets
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(id, s)| {
            let mut in_f = vec![false; adj.len()];
            for &x in s {
                in_f[x] = true;
            }
            let size = in_f.iter().filter(|&&b| b).count();
            let b = vertex_boundary(adj, &in_f).len();
            ProfileRow { subset_id: id, size, boundary_size: b, ratio: b as f64 / size as f64 }
        })
        .collect()
}

pub fn profile_csv(rows: &[ProfileRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

/// Scatter plot of boundary ratio against subset size.
pub fn profile_svg(rows: &[ProfileRow], title: &str) -> String {
    let (w, h, pad) = (480.0, 320.0, 40.0);
    let max_x = rows.iter().map(|r| r.size).max().unwrap_or(1).max(1) as f64;
    let max_y = rows.iter().map(|r| r.ratio).fold(0.0, f64::max).max(1e-9);
    let sx = |x: f64| pad + x / max_x * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - y / max_y * (h - 2.0 * pad);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{pad}" y="20" font-family="sans-serif" font-size="13">{}</text>"#, escape(title));
    let _ = writeln!(
        s,
        r#"<path d="M{pad} {} V{} H{}" stroke="black" fill="none"/>"#,
        pad,
        h - pad,
        w - pad
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">#F (max {max_x})</text>"#, w / 2.0 - 30.0, h - 10.0);
    let _ = writeln!(s, r#"<text x="4" y="{}" font-family="sans-serif" font-size="11">#dF/#F (max {max_y:.3})</text>"#, pad - 8.0);
    for r in rows {
        let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#1f5fa0"/>"##, sx(r.size as f64), sy(r.ratio));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
