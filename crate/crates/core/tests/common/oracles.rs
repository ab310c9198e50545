//! Slow, obviously-correct reimplementations of the repair steps.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use formpipe_core::casegen::{gen_random, RandomSpec};
use formpipe_core::model::{CellId, PointId, StructuralModel};

pub const MODELS: u64 = 200;

pub fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

pub fn messy(seed: u64) -> StructuralModel {
    gen_random(
        seed,
        &RandomSpec {
            max_points: 10 + (seed as usize * 397) % 1990,
            messy: true,
            sparse_ids: seed.is_multiple_of(2),
            rigid_links: seed.is_multiple_of(3),
        },
    )
}

pub fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        i = parent[i];
    }
    i
}

/// Every pair within `tol`, transitively, lowest id surviving.
pub fn merge_oracle(m: &StructuralModel, tol: f64) -> BTreeSet<(PointId, PointId)> {
    let n = m.points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if distance(&m.points[i].coords, &m.points[j].coords) <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut classes: HashMap<usize, Vec<PointId>> = HashMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        classes.entry(r).or_default().push(m.points[i].id);
    }
    let mut pairs = BTreeSet::new();
    for ids in classes.values() {
        let low = *ids.iter().min().unwrap();
        for &id in ids {
            if id != low {
                pairs.insert((low, id));
            }
        }
    }
    pairs
}

/// `(degenerate, duplicate)` by exhaustive comparison with every lower id.
pub fn degenerate_oracle(m: &StructuralModel, tol: f64) -> (BTreeSet<CellId>, BTreeSet<CellId>) {
    let coords: HashMap<PointId, [f64; 3]> = m.points.iter().map(|p| (p.id, p.coords)).collect();
    let degenerate: BTreeSet<CellId> = m
        .cells
        .iter()
        .filter(|c| c.nodes[0] == c.nodes[1] || distance(&coords[&c.nodes[0]], &coords[&c.nodes[1]]) <= tol)
        .map(|c| c.id)
        .collect();
    let same = |a: [PointId; 2], b: [PointId; 2]| a == b || a == [b[1], b[0]];
    let duplicate = m
        .cells
        .iter()
        .filter(|c| !degenerate.contains(&c.id))
        .filter(|c| {
            m.cells
                .iter()
                .any(|d| d.id < c.id && !degenerate.contains(&d.id) && same(c.nodes, d.nodes))
        })
        .map(|c| c.id)
        .collect();
    (degenerate, duplicate)
}

/// Point ids of the component kept, found by breadth-first search.
pub fn main_body_oracle(m: &StructuralModel) -> BTreeSet<PointId> {
    let mut adj: BTreeMap<PointId, Vec<PointId>> = m.points.iter().map(|p| (p.id, Vec::new())).collect();
    let edges = m
        .cells
        .iter()
        .map(|c| (c.nodes[0], c.nodes[1]))
        .chain(m.rigid_links.iter().map(|l| (l.master, l.slave)));
    for (a, b) in edges {
        adj.get_mut(&a).unwrap().push(b);
        adj.get_mut(&b).unwrap().push(a);
    }
    let mut seen = HashSet::new();
    let mut best: Option<(usize, PointId, BTreeSet<PointId>)> = None;
    for &start in adj.keys() {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = BTreeSet::from([start]);
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            for &q in &adj[&p] {
                if seen.insert(q) {
                    comp.insert(q);
                    queue.push_back(q);
                }
            }
        }
        let cells = m.cells.iter().filter(|c| comp.contains(&c.nodes[0])).count();
        // keys are visited in id order, so `start` is the lowest id of its component
        let better = match &best {
            None => true,
            Some((bc, _, _)) => cells > *bc,
        };
        if better {
            best = Some((cells, start, comp));
        }
    }
    best.map(|b| b.2).unwrap_or_default()
}

/// Delete one qualifying point at a time, recounting every degree from
/// scratch, then put back peeled clusters touching two retained points.
pub fn prune_oracle(m: &StructuralModel, max_degree: usize) -> (BTreeSet<PointId>, BTreeSet<CellId>) {
    let mut protected: HashSet<PointId> = m.protected_points().into_iter().collect();
    for l in &m.rigid_links {
        protected.insert(l.master);
        protected.insert(l.slave);
    }
    let mut points: BTreeSet<PointId> = m.points.iter().map(|p| p.id).collect();
    let mut cells: BTreeSet<CellId> = m.cells.iter().map(|c| c.id).collect();
    let by_id: HashMap<CellId, [PointId; 2]> = m.cells.iter().map(|c| (c.id, c.nodes)).collect();
    loop {
        let mut degree: HashMap<PointId, usize> = HashMap::new();
        for c in &cells {
            let [a, b] = by_id[c];
            *degree.entry(a).or_default() += 1;
            if b != a {
                *degree.entry(b).or_default() += 1;
            }
        }
        let victim = points
            .iter()
            .copied()
            .find(|p| !protected.contains(p) && degree.get(p).copied().unwrap_or(0) <= max_degree);
        let Some(p) = victim else { break };
        points.remove(&p);
        cells.retain(|c| !by_id[c].contains(&p));
    }

    let peeled: BTreeSet<PointId> = m.points.iter().map(|p| p.id).filter(|p| !points.contains(p)).collect();
    let mut done = HashSet::new();
    for &start in &peeled {
        if done.contains(&start) {
            continue;
        }
        let mut cluster = BTreeSet::from([start]);
        let mut anchors = BTreeSet::new();
        let mut stack = vec![start];
        while let Some(p) = stack.pop() {
            for c in m.cells.iter().filter(|c| c.nodes.contains(&p)) {
                for q in c.nodes {
                    if !peeled.contains(&q) {
                        anchors.insert(q);
                    } else if cluster.insert(q) {
                        stack.push(q);
                    }
                }
            }
        }
        done.extend(cluster.iter().copied());
        if anchors.len() >= 2 {
            points.extend(cluster.iter().copied());
            for c in &m.cells {
                if c.nodes.iter().any(|n| cluster.contains(n)) {
                    cells.insert(c.id);
                }
            }
        }
    }
    (points, cells)
}

pub fn point_ids(m: &StructuralModel) -> BTreeSet<PointId> {
    m.points.iter().map(|p| p.id).collect()
}

pub fn cell_ids(m: &StructuralModel) -> BTreeSet<CellId> {
    m.cells.iter().map(|c| c.id).collect()
}
