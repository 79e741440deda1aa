//! 0-dimensional persistent homology of planar point sets.
//!
//! Components of the union of radius-r balls merge exactly when two points
//! come within distance 2r, so the death radii are the half-weights of a
//! Euclidean minimum spanning tree. A Kruskal sweep with a union-find records
//! the merge events in order.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::Point;

/// One component merge: at `death_radius` the balls of two components first
/// touch and the components become one.
#[derive(Clone, Debug, PartialEq)]
pub struct MergeEvent {
    pub death_radius: f64,
    /// Point indices of the two components being merged (disjoint).
    pub component_a: Vec<usize>,
    pub component_b: Vec<usize>,
    /// Union-find root of the merged component.
    pub survivor: usize,
}

/// Ordered merge events of a point set; every 0-dim class is born at radius 0
/// and all but one die, so there are `point_count - 1` events.
#[derive(Clone, Debug, PartialEq)]
pub struct PersistenceDiagram {
    pub events: Vec<MergeEvent>,
    pub point_count: usize,
}

impl PersistenceDiagram {
    /// Death radii in ascending order (with multiplicity).
    pub fn deaths(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.death_radius).collect()
    }
}

/// Disjoint blocks of point indices covering 0..n-1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Index of the block containing `i`, if any.
    pub fn block_of(&self, i: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&i))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomologyError {
    EmptyInput,
}

impl core::fmt::Display for HomologyError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            HomologyError::EmptyInput => write!(f, "point set is empty"),
        }
    }
}

/// Union-find with path compression and union by size.
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merge the sets of `a` and `b`; returns the surviving root, or `None`
    /// if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        Some(big)
    }
}

/// All pairs (i, j), i < j, sorted by half-distance then index order.
fn sorted_half_edges(points: &[Point]) -> Vec<(f64, usize, usize)> {
    let n = points.len();
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            edges.push((points[i].distance(points[j]) / 2.0, i, j));
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    edges
}

/// Single-linkage merge events of `points`: Kruskal over the complete graph
/// with edge weight distance/2, recording each tree edge as a [`MergeEvent`].
pub fn persistence_diagram(points: &[Point]) -> Result<PersistenceDiagram, HomologyError> {
    let n = points.len();
    if n == 0 {
        return Err(HomologyError::EmptyInput);
    }
    let mut uf = UnionFind::new(n);
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut events = Vec::with_capacity(n - 1);
    for (w, i, j) in sorted_half_edges(points) {
        let (ra, rb) = (uf.find(i), uf.find(j));
        if ra == rb {
            continue;
        }
        let survivor = uf.union(ra, rb).expect("distinct roots");
        let absorbed = if survivor == ra { rb } else { ra };
        let mut merged = members[survivor].clone();
        merged.extend_from_slice(&members[absorbed]);
        merged.sort_unstable();
        let mut a = members[ra].clone();
        let mut b = members[rb].clone();
        a.sort_unstable();
        b.sort_unstable();
        events.push(MergeEvent { death_radius: w, component_a: a, component_b: b, survivor });
        members[survivor] = merged;
        if events.len() == n - 1 {
            break;
        }
    }
    Ok(PersistenceDiagram { events, point_count: n })
}

/// Connected components of `points` under the closed rule: i and j join when
/// their distance is at most 2r. Blocks are sorted internally and ordered by
/// their smallest member.
pub fn components_at(points: &[Point], r: f64) -> Partition {
    let n = points.len();
    let mut uf = UnionFind::new(n);
    let threshold = 2.0 * r;
    for i in 0..n {
        for j in i + 1..n {
            if points[i].distance(points[j]) <= threshold {
                uf.union(i, j);
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut root_block: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = uf.find(i);
        match root_block[r] {
            Some(b) => blocks[b].push(i),
            None => {
                root_block[r] = Some(blocks.len());
                blocks.push(vec![i]);
            }
        }
    }
    Partition { blocks }
}

/// Persistent radii of the diagram for the gap parameter `nu`, filtered to
/// radii of at least `h`.
///
/// A death radius d is persistent when no other death lies in (d, d + nu];
/// the largest death is always persistent. Radii below h are dropped, and if
/// nothing survives the filter the single radius {h} is returned so callers
/// always have at least one actionable scale.
pub fn persistent_radii(diag: &PersistenceDiagram, nu: f64, h: f64) -> Vec<f64> {
    let mut deaths = diag.deaths();
    deaths.sort_by(|a, b| a.total_cmp(b));
    deaths.dedup();
    let mut out = Vec::new();
    for (k, &d) in deaths.iter().enumerate() {
        let killed = deaths[k + 1..].iter().any(|&e| e > d && e <= d + nu);
        if !killed && d >= h {
            out.push(d);
        }
    }
    if out.is_empty() {
        out.push(h);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(coords: &[(f64, f64)]) -> Vec<Point> {
        coords.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn collinear_deaths_are_half_gaps() {
        let d = persistence_diagram(&pts(&[(0.0, 0.0), (0.1, 0.0), (0.3, 0.0)])).unwrap();
        let deaths = d.deaths();
        assert_eq!(deaths.len(), 2);
        assert!((deaths[0] - 0.05).abs() < 1e-12);
        assert!((deaths[1] - 0.10).abs() < 1e-12);
    }

    #[test]
    fn single_point_has_no_events() {
        let d = persistence_diagram(&pts(&[(0.4, 0.2)])).unwrap();
        assert!(d.events.is_empty());
        assert_eq!(d.point_count, 1);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(persistence_diagram(&[]), Err(HomologyError::EmptyInput));
    }

    #[test]
    fn merge_events_have_disjoint_components() {
        let d = persistence_diagram(&pts(&[(0.0, 0.0), (0.05, 0.0), (0.2, 0.1), (0.4, 0.4)]))
            .unwrap();
        assert_eq!(d.events.len(), 3);
        for e in &d.events {
            for i in &e.component_a {
                assert!(!e.component_b.contains(i));
            }
        }
    }

    #[test]
    fn components_two_points_below_threshold() {
        let p = pts(&[(0.0, 0.0), (0.1, 0.0)]);
        assert_eq!(components_at(&p, 0.04).block_count(), 2);
    }

    #[test]
    fn components_boundary_is_closed() {
        // distance 0.1 == 2 * 0.05, touching balls merge
        let p = pts(&[(0.0, 0.0), (0.1, 0.0)]);
        assert_eq!(components_at(&p, 0.05).block_count(), 1);
    }

    /// Collinear points with gaps chosen so the MST half-weights are
    /// {0.062, 0.09, 0.1, 0.116, 0.116, 0.144}; the component counts then
    /// step through 6/4/2/1 at the four persistent radii and the radius 0.09
    /// is shadowed by 0.1 within the 0.015 window.
    fn figure_like_points() -> Vec<Point> {
        let gaps = [0.124, 0.18, 0.2, 0.232, 0.232, 0.288];
        let mut x = 0.0;
        let mut coords = vec![(0.0, 0.0)];
        for g in gaps {
            x += g;
            coords.push((x, 0.0));
        }
        pts(&coords)
    }

    #[test]
    fn component_counts_at_reported_radii() {
        // tiny margin absorbs accumulated rounding in the constructed gaps
        let p = figure_like_points();
        assert_eq!(components_at(&p, 0.062 + 1e-12).block_count(), 6);
        assert_eq!(components_at(&p, 0.1 + 1e-12).block_count(), 4);
        assert_eq!(components_at(&p, 0.116 + 1e-12).block_count(), 2);
        assert_eq!(components_at(&p, 0.144 + 1e-12).block_count(), 1);
    }

    #[test]
    fn persistent_radii_reported_set() {
        let p = figure_like_points();
        let d = persistence_diagram(&p).unwrap();
        let radii = persistent_radii(&d, 0.015, 0.05);
        let expect = [0.062, 0.1, 0.116, 0.144];
        assert_eq!(radii.len(), expect.len());
        for (a, b) in radii.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn persistent_radii_interval_rule_kills_shadowed_death() {
        let diag = PersistenceDiagram {
            events: [0.06, 0.07, 0.2]
                .iter()
                .map(|&r| MergeEvent {
                    death_radius: r,
                    component_a: vec![0],
                    component_b: vec![1],
                    survivor: 0,
                })
                .collect(),
            point_count: 4,
        };
        let radii = persistent_radii(&diag, 0.015, 0.05);
        assert_eq!(radii.len(), 2);
        assert!((radii[0] - 0.07).abs() < 1e-12);
        assert!((radii[1] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn persistent_radii_fallback_to_h() {
        let diag = PersistenceDiagram { events: Vec::new(), point_count: 1 };
        assert_eq!(persistent_radii(&diag, 0.015, 0.05), vec![0.05]);
    }
}
