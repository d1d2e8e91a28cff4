//! Pictographs: the rhombus slacks of a hive drawn on the internal edges of
//! the triangle.  Three renderings carry the same numbers: BZ triangles,
//! O-blades (the star graph around each vertex) and honeycombs (the dual
//! hexagons, with side lengths taken from the edges they cross).

use super::hive::{enumerate_hives, rhombi, HivePattern};
use crate::error::{HornError, Result};
use crate::spectra::DynkinWeight;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

type Vertex = (usize, usize);

/// Neighbour directions in cyclic order: E, NE, NW, W, SW, SE.
const DIRS: [(i64, i64); 6] = [(0, 1), (-1, 0), (-1, -1), (0, -1), (1, 0), (1, 1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PictographKind {
    BzTriangle,
    OBlade,
    Honeycomb,
}

impl PictographKind {
    pub const ALL: [PictographKind; 3] = [
        PictographKind::BzTriangle,
        PictographKind::OBlade,
        PictographKind::Honeycomb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PictographKind::BzTriangle => "bz-triangle",
            PictographKind::OBlade => "o-blade",
            PictographKind::Honeycomb => "honeycomb",
        }
    }
}

impl FromStr for PictographKind {
    type Err = HornError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bz" | "bz-triangle" | "bzt" => Ok(PictographKind::BzTriangle),
            "o-blade" | "oblade" | "blade" => Ok(PictographKind::OBlade),
            "honeycomb" | "hc" => Ok(PictographKind::Honeycomb),
            other => Err(HornError::InvalidArgument(format!(
                "unknown pictograph kind {other:?}"
            ))),
        }
    }
}

/// Internal edges of the size-n triangle, in (row, column) order of their
/// doubled midpoints.
#[derive(Clone, Debug)]
pub struct EdgeLayout {
    n: usize,
    edges: Vec<[Vertex; 2]>,
    /// Position in `edges` of each rhombus' short diagonal.
    rhombus_edge: Vec<usize>,
    lookup: HashMap<[Vertex; 2], usize>,
}

fn key(a: Vertex, b: Vertex) -> [Vertex; 2] {
    if a <= b {
        [a, b]
    } else {
        [b, a]
    }
}

fn midpoint(e: &[Vertex; 2]) -> (usize, usize) {
    (e[0].0 + e[1].0, e[0].1 + e[1].1)
}

impl EdgeLayout {
    pub fn new(n: usize) -> Self {
        let rh = rhombi(n);
        let mut edges: Vec<[Vertex; 2]> =
            rh.iter().map(|r| key(r.obtuse[0], r.obtuse[1])).collect();
        edges.sort_by_key(midpoint);
        let lookup: HashMap<_, _> = edges.iter().enumerate().map(|(k, e)| (*e, k)).collect();
        let rhombus_edge = rh
            .iter()
            .map(|r| lookup[&key(r.obtuse[0], r.obtuse[1])])
            .collect();
        EdgeLayout {
            n,
            edges,
            rhombus_edge,
            lookup,
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[[Vertex; 2]] {
        &self.edges
    }

    fn neighbour(&self, v: Vertex, d: usize) -> Option<Vertex> {
        let (i, j) = (v.0 as i64 + DIRS[d].0, v.1 as i64 + DIRS[d].1);
        (i >= 0 && j >= 0 && j <= i && i <= self.n as i64).then_some((i as usize, j as usize))
    }

    /// Internal edge from v in direction d.
    pub fn edge(&self, v: Vertex, d: usize) -> Option<usize> {
        self.neighbour(v, d)
            .and_then(|w| self.lookup.get(&key(v, w)).copied())
    }

    /// Distinct doubled-midpoint rows, top to bottom.
    pub fn rows(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.edges.iter().map(|e| midpoint(e).0).collect();
        r.dedup();
        r
    }

    pub fn interior(&self) -> Vec<Vertex> {
        super::hive::interior_vertices(self.n)
    }

    /// Non-corner boundary vertices with the weight (0 = lambda, 1 = mu,
    /// 2 = nu) and label index they carry.
    pub fn boundary(&self) -> Vec<(Vertex, usize, usize)> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 1..n {
            out.push(((i, 0), 0, i - 1));
        }
        for j in 1..n {
            out.push(((n, j), 1, j - 1));
        }
        for i in 1..n {
            out.push(((i, i), 2, i - 1));
        }
        out
    }

    /// The two internal edges at a boundary vertex, in direction order.
    pub fn boundary_edges(&self, v: Vertex) -> Vec<usize> {
        (0..6).filter_map(|d| self.edge(v, d)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pictograph {
    pub kind: PictographKind,
    pub lambda: DynkinWeight,
    pub mu: DynkinWeight,
    pub nu: DynkinWeight,
    /// One non-negative label per internal edge, in [`EdgeLayout`] order.
    pub labels: Vec<u64>,
}

impl Pictograph {
    pub fn n(&self) -> usize {
        self.lambda.n()
    }

    pub fn from_hive(
        kind: PictographKind,
        hive: &HivePattern,
        lambda: &DynkinWeight,
        mu: &DynkinWeight,
        nu: &DynkinWeight,
    ) -> Self {
        let layout = EdgeLayout::new(hive.n);
        let mut labels = vec![0; layout.len()];
        for (r, s) in hive.slacks().into_iter().enumerate() {
            labels[layout.rhombus_edge[r]] = s.max(0) as u64;
        }
        Pictograph {
            kind,
            lambda: lambda.clone(),
            mu: mu.clone(),
            nu: nu.clone(),
            labels,
        }
    }

    /// Same labels viewed as another kind.
    pub fn as_kind(&self, kind: PictographKind) -> Self {
        Pictograph {
            kind,
            ..self.clone()
        }
    }

    fn external(&self, which: usize, k: usize) -> u64 {
        [&self.lambda, &self.mu, &self.nu][which].labels()[k] as u64
    }

    /// Star labels around an interior vertex, E..SE.
    fn star(&self, layout: &EdgeLayout, v: Vertex) -> [u64; 6] {
        std::array::from_fn(|d| {
            self.labels[layout.edge(v, d).expect("interior vertex has six edges")]
        })
    }

    /// Empty when every defining relation of the kind holds.
    pub fn violations(&self) -> Vec<String> {
        let n = self.n();
        let layout = EdgeLayout::new(n);
        let mut out = Vec::new();
        if self.mu.n() != n || self.nu.n() != n {
            out.push("weights have different ranks".to_string());
            return out;
        }
        if self.labels.len() != layout.len() {
            out.push(format!(
                "expected {} edge labels, found {}",
                layout.len(),
                self.labels.len()
            ));
            return out;
        }
        for (v, which, k) in layout.boundary() {
            let sum: u64 = layout
                .boundary_edges(v)
                .iter()
                .map(|&e| self.labels[e])
                .sum();
            let want = self.external(which, k);
            if sum != want {
                out.push(format!(
                    "boundary vertex {v:?}: edges sum to {sum}, label is {want}"
                ));
            }
        }
        for v in layout.interior() {
            let e = self.star(&layout, v);
            match self.kind {
                PictographKind::BzTriangle => {
                    for k in 0..3 {
                        if e[k] + e[(k + 1) % 6] != e[k + 3] + e[(k + 4) % 6] {
                            out.push(format!("hexagon at {v:?} fails for direction {k}"));
                        }
                    }
                }
                PictographKind::OBlade => {
                    let angle = |k: usize| e[k] + e[(k + 1) % 6];
                    for k in 0..3 {
                        if angle(k) != angle(k + 3) {
                            out.push(format!(
                                "blade at {v:?}: opposite angles {k} and {} differ",
                                k + 3
                            ));
                        }
                    }
                }
                PictographKind::Honeycomb => {
                    // Side k of the dual hexagon runs along the unit vector
                    // omega^k (omega = exp(i pi/3)); closure is two real
                    // equations in the Eisenstein basis.
                    if e[0] + e[5] != e[2] + e[3] || e[1] + e[2] != e[4] + e[5] {
                        out.push(format!("hexagon around {v:?} does not close"));
                    }
                }
            }
        }
        out
    }

    pub fn check(&self) -> bool {
        self.violations().is_empty()
    }

    /// Text form understood by [`Pictograph::parse`].
    pub fn render(&self) -> String {
        let n = self.n();
        let layout = EdgeLayout::new(n);
        let mut s = String::new();
        let _ = writeln!(s, "{} su({n})", self.kind.name());
        let _ = writeln!(s, "lambda {}", self.lambda);
        let _ = writeln!(s, "mu {}", self.mu);
        let _ = writeln!(s, "nu {}", self.nu);
        match self.kind {
            PictographKind::BzTriangle => {
                let width = self
                    .labels
                    .iter()
                    .map(|l| l.to_string().len())
                    .max()
                    .unwrap_or(1);
                for r in layout.rows() {
                    let mut cells: Vec<(usize, u64)> = Vec::new();
                    for (k, e) in layout.edges.iter().enumerate() {
                        let (rr, c) = midpoint(e);
                        if rr == r {
                            cells.push((2 * c + 2 * n - r, self.labels[k]));
                        }
                    }
                    let mut line = String::new();
                    for (x, v) in cells {
                        let col = x * (width + 1) / 2;
                        while line.len() < col {
                            line.push(' ');
                        }
                        let _ = write!(line, "{v:>width$}");
                    }
                    let _ = writeln!(s, "{}", line.trim_end());
                }
            }
            PictographKind::OBlade | PictographKind::Honeycomb => {
                let (inner, outer) = if self.kind == PictographKind::OBlade {
                    ("star", "blade")
                } else {
                    ("hex", "leg")
                };
                for v in layout.interior() {
                    let e = self.star(&layout, v);
                    let _ = writeln!(
                        s,
                        "{inner} {},{}: {} {} {} {} {} {}",
                        v.0, v.1, e[0], e[1], e[2], e[3], e[4], e[5]
                    );
                }
                for (v, _, _) in layout.boundary() {
                    let e: Vec<String> = layout
                        .boundary_edges(v)
                        .iter()
                        .map(|&k| self.labels[k].to_string())
                        .collect();
                    let _ = writeln!(s, "{outer} {},{}: {}", v.0, v.1, e.join(" "));
                }
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: String| HornError::InvalidArgument(m);
        let mut lines = text
            .lines()
            .map(str::trim_end)
            .filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty pictograph".into()))?;
        let (kind, group) = header
            .trim()
            .split_once(' ')
            .ok_or_else(|| bad(format!("bad header {header:?}")))?;
        let kind: PictographKind = kind.parse()?;
        let n: usize = group
            .trim()
            .strip_prefix("su(")
            .and_then(|g| g.strip_suffix(')'))
            .and_then(|g| g.parse().ok())
            .filter(|&n| n >= 2)
            .ok_or_else(|| bad(format!("bad group {group:?}")))?;
        let mut weight = |name: &str| -> Result<DynkinWeight> {
            let line = lines.next().ok_or_else(|| bad(format!("missing {name}")))?;
            let rest = line
                .trim()
                .strip_prefix(name)
                .ok_or_else(|| bad(format!("expected {name}, found {line:?}")))?;
            let inner = rest.trim().trim_start_matches('(').trim_end_matches(')');
            let labels = inner
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<u32>()
                        .map_err(|e| bad(format!("{name}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if labels.len() != n - 1 {
                return Err(bad(format!("{name} needs {} labels", n - 1)));
            }
            Ok(DynkinWeight::new(labels))
        };
        let (lambda, mu, nu) = (weight("lambda")?, weight("mu")?, weight("nu")?);
        let layout = EdgeLayout::new(n);
        let mut labels: Vec<Option<u64>> = vec![None; layout.len()];
        let mut assign = |k: usize, v: u64| -> Result<()> {
            match labels[k] {
                Some(old) if old != v => Err(bad(format!(
                    "edge {:?} given two labels {old} and {v}",
                    layout.edges[k]
                ))),
                _ => {
                    labels[k] = Some(v);
                    Ok(())
                }
            }
        };
        let rest: Vec<&str> = lines.collect();
        match kind {
            PictographKind::BzTriangle => {
                let rows = layout.rows();
                if rest.len() != rows.len() {
                    return Err(bad(format!(
                        "expected {} rows, found {}",
                        rows.len(),
                        rest.len()
                    )));
                }
                for (&r, line) in rows.iter().zip(&rest) {
                    let vals = line
                        .split_whitespace()
                        .map(|x| x.parse::<u64>().map_err(|e| bad(format!("row {r}: {e}"))))
                        .collect::<Result<Vec<_>>>()?;
                    let row: Vec<usize> = (0..layout.len())
                        .filter(|&k| midpoint(&layout.edges[k]).0 == r)
                        .collect();
                    if vals.len() != row.len() {
                        return Err(bad(format!("row {r} needs {} labels", row.len())));
                    }
                    for (k, v) in row.into_iter().zip(vals) {
                        assign(k, v)?;
                    }
                }
            }
            PictographKind::OBlade | PictographKind::Honeycomb => {
                for line in rest {
                    let (head, vals) = line
                        .split_once(':')
                        .ok_or_else(|| bad(format!("bad line {line:?}")))?;
                    let (tag, at) = head
                        .trim()
                        .split_once(' ')
                        .ok_or_else(|| bad(format!("bad line {line:?}")))?;
                    let (i, j) = at
                        .trim()
                        .split_once(',')
                        .and_then(|(i, j)| {
                            Some((
                                i.trim().parse::<usize>().ok()?,
                                j.trim().parse::<usize>().ok()?,
                            ))
                        })
                        .ok_or_else(|| bad(format!("bad vertex in {line:?}")))?;
                    let vals = vals
                        .split_whitespace()
                        .map(|x| x.parse::<u64>().map_err(|e| bad(format!("{line:?}: {e}"))))
                        .collect::<Result<Vec<_>>>()?;
                    let v = (i, j);
                    let edges: Vec<usize> = match tag {
                        "star" | "hex" if layout.interior().contains(&v) => (0..6)
                            .map(|d| layout.edge(v, d).expect("interior"))
                            .collect(),
                        "blade" | "leg" if layout.boundary().iter().any(|b| b.0 == v) => {
                            layout.boundary_edges(v)
                        }
                        _ => return Err(bad(format!("unexpected line {line:?}"))),
                    };
                    if edges.len() != vals.len() {
                        return Err(bad(format!("{line:?} needs {} labels", edges.len())));
                    }
                    for (k, x) in edges.into_iter().zip(vals) {
                        assign(k, x)?;
                    }
                }
            }
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(k, l)| l.ok_or_else(|| bad(format!("edge {:?} has no label", layout.edges[k]))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Pictograph {
            kind,
            lambda,
            mu,
            nu,
            labels,
        })
    }
}

/// Every pictograph of the given kind for the triple, one per hive.
pub fn enumerate_pictographs(
    lambda: &DynkinWeight,
    mu: &DynkinWeight,
    nu: &DynkinWeight,
    kind: PictographKind,
) -> Vec<Pictograph> {
    enumerate_hives(lambda, mu, nu)
        .iter()
        .map(|h| Pictograph::from_hive(kind, h, lambda, mu, nu))
        .collect()
}

/// Counts labelings satisfying the relations of `kind` by exhaustive search
/// over all edge labels bounded by the largest Dynkin label.  Only sensible
/// for su(3).
pub fn brute_force_count(
    lambda: &DynkinWeight,
    mu: &DynkinWeight,
    nu: &DynkinWeight,
    kind: PictographKind,
) -> u64 {
    let n = lambda.n();
    let layout = EdgeLayout::new(n);
    let bound = [lambda, mu, nu]
        .iter()
        .flat_map(|w| w.labels())
        .copied()
        .max()
        .unwrap_or(0) as u64;
    let mut p = Pictograph {
        kind,
        lambda: lambda.clone(),
        mu: mu.clone(),
        nu: nu.clone(),
        labels: vec![0; layout.len()],
    };
    let mut count = 0;
    fn rec(p: &mut Pictograph, k: usize, bound: u64, count: &mut u64) {
        if k == p.labels.len() {
            if p.check() {
                *count += 1;
            }
            return;
        }
        for v in 0..=bound {
            p.labels[k] = v;
            rec(p, k + 1, bound, count);
        }
    }
    rec(&mut p, 0, bound, &mut count);
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lr::lr_coefficient;

    fn w(v: &[u32]) -> DynkinWeight {
        DynkinWeight::new(v.to_vec())
    }

    #[test]
    fn edge_layout_sizes() {
        for n in 2..6 {
            let l = EdgeLayout::new(n);
            assert_eq!(l.len(), 3 * n * (n - 1) / 2);
            for (v, _, _) in l.boundary() {
                assert_eq!(l.boundary_edges(v).len(), 2);
            }
        }
    }

    #[test]
    fn hive_pictographs_check_and_round_trip() {
        let (l, m, v) = (w(&[2, 1, 1]), w(&[1, 1, 2]), w(&[1, 2, 1]));
        for kind in PictographKind::ALL {
            let ps = enumerate_pictographs(&l, &m, &v, kind);
            assert_eq!(ps.len() as u64, lr_coefficient(&l, &m, &v));
            for p in &ps {
                assert!(p.check(), "{:?}", p.violations());
                assert_eq!(&Pictograph::parse(&p.render()).unwrap(), p);
            }
        }
    }

    #[test]
    fn su3_brute_force_matches() {
        let a = w(&[1, 1]);
        let b = w(&[2, 1]);
        for kind in PictographKind::ALL {
            assert_eq!(brute_force_count(&a, &a, &a, kind), 2);
            assert_eq!(
                brute_force_count(&b, &a, &b, kind),
                lr_coefficient(&b, &a, &b)
            );
        }
    }

    #[test]
    fn corrupted_label_is_caught() {
        let a = w(&[1, 1]);
        let mut p = enumerate_pictographs(&a, &a, &a, PictographKind::BzTriangle).remove(0);
        p.labels[0] += 1;
        assert!(!p.check());
    }
}
