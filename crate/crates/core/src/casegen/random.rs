use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{BoundaryCondition, Cell, CellId, Material, Point, PointId, RigidLink, StructuralModel};
use crate::section::{CrossSection, LocalAxis, RefNode, SectionProperties, SectionShape};

/// Knobs for [`gen_random`]. The defaults give a clean, fully valid frame;
/// switch on `messy` for the kind of defects repair is meant to remove.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSpec {
    /// Rough upper bound on the number of points.
    pub max_points: usize,
    /// Detached pieces, hanging chains, near-duplicate points, zero-length
    /// and repeated cells.
    pub messy: bool,
    /// Shuffle entity order and leave gaps in the ids.
    pub sparse_ids: bool,
    pub rigid_links: bool,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            max_points: 200,
            messy: false,
            sparse_ids: false,
            rigid_links: false,
        }
    }
}

const COMMENT_CHARS: &[u8] = b"abcdefghijklmnopqrstuvwxyz ABCXYZ0123456789-_.,;:()[]{}<>&'\"#%/=";

fn comment(rng: &mut impl Rng) -> String {
    let lines = rng.gen_range(0..=2);
    let mut out = Vec::new();
    for _ in 0..lines {
        let len = rng.gen_range(1..40);
        let s: String = (0..len)
            .map(|_| COMMENT_CHARS[rng.gen_range(0..COMMENT_CHARS.len())] as char)
            .collect();
        let s = s.trim().to_string();
        if !s.is_empty() {
            out.push(s);
        }
    }
    out.join("\n")
}

fn sections(rng: &mut impl Rng, m: &mut StructuralModel) {
    m.cross_sections
        .insert(1, CrossSection::circle(rng.gen_range(8.0..60.0)));
    let ref_node = match rng.gen_range(0..3) {
        0 => None,
        _ => Some(RefNode {
            axis: if rng.gen_bool(0.5) { LocalAxis::Y } else { LocalAxis::Z },
            code: -rng.gen_range(1..=3),
        }),
    };
    m.cross_sections.insert(
        2,
        CrossSection {
            shape: SectionShape::Rectangle {
                width: rng.gen_range(10.0..120.0),
                height: rng.gen_range(10.0..200.0),
                ref_node,
            },
            extra: Vec::new(),
        },
    );
    let area = rng.gen_range(50.0..2000.0);
    let i = area * area / rng.gen_range(8.0..16.0);
    let r = (area / std::f64::consts::PI).sqrt();
    m.cross_sections.insert(
        3,
        CrossSection::generic(SectionProperties {
            area,
            iy: i,
            iz: i * rng.gen_range(0.5..2.0),
            torsion: 2.0 * i,
            wy: i / r,
            wz: i / r,
            wt: 2.0 * i / r,
        }),
    );
}

fn materials(rng: &mut impl Rng, m: &mut StructuralModel) {
    m.materials.insert(1, Material::steel());
    let mut extra = Vec::new();
    if rng.gen_bool(0.3) {
        extra.push(("grade".to_string(), format!("G{}", rng.gen_range(1..99))));
    }
    m.materials.insert(
        2,
        Material {
            e: rng.gen_range(1_000.0..210_000.0),
            nu: rng.gen_range(0.0..0.45),
            t_alpha: rng.gen_range(0.0..2e-5),
            density: rng.gen_range(100e-9..8000e-9),
            yield_stress: rng.gen_range(10.0..500.0),
            extra,
        },
    );
}

fn load(rng: &mut impl Rng) -> BoundaryCondition {
    let mut c = [0.0; 6];
    for (k, v) in c.iter_mut().enumerate() {
        if rng.gen_bool(0.4) {
            let scale = if k < 3 { 1e3 } else { 1e5 };
            *v = rng.gen_range(-scale..scale);
        }
    }
    BoundaryCondition::nodal_load(c)
}

/// Jittered grid block with `n` points at most; returns the new point indices.
fn block(rng: &mut impl Rng, m: &mut StructuralModel, origin: [f64; 3], n: usize) -> Vec<usize> {
    let n = n.max(2);
    let target = rng.gen_range(n / 2..=n).max(2);
    let side = (target as f64).cbrt();
    let nx = ((side * rng.gen_range(0.7..1.4)).round() as usize).clamp(2, target);
    let ny = ((side * rng.gen_range(0.5..1.2)).round() as usize).clamp(1, (target / nx).max(1));
    let nz = (target / (nx * ny)).max(1);
    let s = rng.gen_range(50.0..200.0);
    let first = m.points.len();
    let at = |i: usize, j: usize, k: usize| first + (k * ny + j) * nx + i;
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let jitter = |rng: &mut dyn rand::RngCore| rng.gen_range(-0.2..0.2) * s;
                let c = [
                    origin[0] + i as f64 * s + jitter(rng),
                    origin[1] + j as f64 * s + jitter(rng),
                    origin[2] + k as f64 * s + jitter(rng),
                ];
                let id = m.points.len() as u32;
                m.points.push(Point::new(id, c));
            }
        }
    }
    let mut edges = Vec::new();
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let p = at(i, j, k);
                // x rows, the i = 0 column and the (0, 0) pillar form a spanning tree
                if i + 1 < nx {
                    edges.push((p, at(i + 1, j, k)));
                }
                if j + 1 < ny && (i == 0 || rng.gen_bool(0.85)) {
                    edges.push((p, at(i, j + 1, k)));
                }
                if k + 1 < nz && ((i == 0 && j == 0) || rng.gen_bool(0.85)) {
                    edges.push((p, at(i, j, k + 1)));
                }
                if i + 1 < nx && k + 1 < nz && rng.gen_bool(0.2) {
                    edges.push((p, at(i + 1, j, k + 1)));
                }
            }
        }
    }
    for (a, b) in edges {
        push_cell(rng, m, a, b);
    }
    // bottom layer carries the supports
    for j in 0..ny {
        for i in 0..nx {
            let p = &mut m.points[at(i, j, 0)];
            if rng.gen_bool(0.7) {
                p.fixed = [true; 6];
            } else {
                p.fixed = [true, true, true, false, false, false];
            }
        }
    }
    (first..m.points.len()).collect()
}

fn push_cell(rng: &mut impl Rng, m: &mut StructuralModel, a: usize, b: usize) {
    let id = m.cells.len() as u32;
    let cs = rng.gen_range(1..=3);
    let mat = rng.gen_range(1..=2);
    let (pa, pb) = (m.points[a].id.0, m.points[b].id.0);
    m.cells.push(if rng.gen_bool(0.85) {
        Cell::beam(id, pa, pb, cs, mat)
    } else {
        Cell::truss(id, pa, pb, cs, mat)
    });
}

/// Reproducible random frame model.
///
/// The result always passes validation (degenerate cells and orphan points
/// are only warnings). Loads never sit on points that have a coincident
/// twin, so merging never meets conflicting loads; rigid links are placed
/// on points without twins.
pub fn gen_random(seed: u64, spec: &RandomSpec) -> StructuralModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = StructuralModel::new();
    m.comment = comment(&mut rng);
    m.self_weight = rng.gen_bool(0.5);
    if rng.gen_bool(0.2) {
        m.gravity = [0.0, 0.0, -rng.gen_range(1000.0..10_000.0)];
    }
    sections(&mut rng, &mut m);
    materials(&mut rng, &mut m);
    let n_bcs = rng.gen_range(1..=3u32);
    for id in 1..=n_bcs {
        m.bcs.insert(id, load(&mut rng));
    }

    let budget = spec.max_points.max(4);
    let pieces = if spec.messy { rng.gen_range(1..=3) } else { 1 };
    let main_share = if pieces == 1 { budget } else { budget * 3 / 4 };
    let main = block(&mut rng, &mut m, [0.0; 3], main_share);
    for k in 1..pieces {
        let left = budget.saturating_sub(m.points.len()) / (pieces - k);
        if left < 2 {
            break;
        }
        let origin = [20_000.0 * k as f64, rng.gen_range(-1000.0..1000.0), 0.0];
        block(&mut rng, &mut m, origin, left.min(12));
    }

    if spec.messy {
        // hanging chains
        for _ in 0..rng.gen_range(0..=4) {
            let mut at = *main.choose(&mut rng).unwrap();
            let dir = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.2..1.0),
            ];
            for _ in 0..rng.gen_range(1..=4) {
                let c = m.points[at].coords;
                let id = m.points.len() as u32;
                m.points.push(Point::new(
                    id,
                    [c[0] + 60.0 * dir[0], c[1] + 60.0 * dir[1], c[2] + 60.0 * dir[2]],
                ));
                push_cell(&mut rng, &mut m, at, id as usize);
                at = id as usize;
            }
        }
    }

    let mut twinned = vec![false; m.points.len()];
    if spec.messy {
        let originals = m.points.len();
        for i in 0..originals {
            if !rng.gen_bool(0.06) {
                continue;
            }
            let gap = [0.0, 1e-7, 4e-7, 5e-6][rng.gen_range(0..4)];
            let c = m.points[i].coords;
            let id = m.points.len() as u32;
            let mut twin = Point::new(id, [c[0] + gap, c[1], c[2] - gap]);
            twin.fixed = m.points[i].fixed;
            m.points.push(twin);
            twinned[i] = true;
            twinned.push(true);
            let pid = m.points[i].id;
            for cell in m.cells.iter_mut() {
                for node in cell.nodes.iter_mut() {
                    if *node == pid && rng.gen_bool(0.5) {
                        *node = PointId(id);
                    }
                }
            }
        }
        // zero-length and repeated cells
        for _ in 0..rng.gen_range(0..=3) {
            let p = m.points[rng.gen_range(0..m.points.len())].id;
            let id = m.cells.len() as u32;
            m.cells.push(Cell::beam(id, p.0, p.0, 1, 1));
        }
        for _ in 0..rng.gen_range(0..=3) {
            if m.cells.is_empty() {
                break;
            }
            let mut c = m.cells[rng.gen_range(0..m.cells.len())].clone();
            c.id = CellId(m.cells.len() as u32);
            if rng.gen_bool(0.5) {
                c.nodes.swap(0, 1);
            }
            m.cells.push(c);
        }
    }

    let n = m.points.len();
    for i in 0..n {
        if !twinned[i] && rng.gen_bool(0.1) {
            m.points[i].bc_id = rng.gen_range(1..=n_bcs);
        }
    }
    // every bc referenced at least once where possible
    for id in 1..=n_bcs {
        if !m.points.iter().any(|p| p.bc_id == id) {
            if let Some(i) = (0..n).rev().find(|&i| !twinned[i] && m.points[i].bc_id == 0) {
                m.points[i].bc_id = id;
            }
        }
    }

    if spec.rigid_links {
        let mut used = vec![false; n];
        for _ in 0..rng.gen_range(1..=3) {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            // supported slaves are not allowed
            if a == b || used[a] || used[b] || twinned[a] || twinned[b] || m.points[b].is_constrained() {
                continue;
            }
            used[a] = true;
            used[b] = true;
            let offset = if rng.gen_bool(0.5) {
                None
            } else {
                let (pa, pb) = (m.points[a].coords, m.points[b].coords);
                Some([pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]])
            };
            m.rigid_links.push(RigidLink {
                master: m.points[a].id,
                slave: m.points[b].id,
                offset,
            });
        }
    }

    if spec.sparse_ids {
        sparsify(&mut rng, &mut m);
    }
    m
}

fn sparsify(rng: &mut impl Rng, m: &mut StructuralModel) {
    let mut next = rng.gen_range(0..50u32);
    let mut point_map = std::collections::HashMap::new();
    for p in m.points.iter_mut() {
        point_map.insert(p.id, PointId(next));
        p.id = PointId(next);
        next += rng.gen_range(1..20);
    }
    let map = |id: PointId| point_map[&id];
    let mut next = rng.gen_range(0..50u32);
    for c in m.cells.iter_mut() {
        c.nodes = c.nodes.map(map);
        c.id = CellId(next);
        next += rng.gen_range(1..20);
    }
    for l in m.rigid_links.iter_mut() {
        l.master = map(l.master);
        l.slave = map(l.slave);
    }
    m.points.shuffle(rng);
    m.cells.shuffle(rng);
}
