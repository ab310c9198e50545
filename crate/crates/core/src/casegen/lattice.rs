use std::collections::{HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{positive, GenError};
use crate::model::{Cell, CellId, Material, Point, PointId, StructuralModel};
use crate::section::{CrossSection, SectionProperties};

/// Semi-elliptic ring in the x–z plane, extruded `depth` voxels along y,
/// standing on the base plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArchShape {
    /// Voxels along x.
    pub span: usize,
    /// Voxels along z above the base plane.
    pub rise: usize,
    pub thickness: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Occupancy {
    Block {
        nx: usize,
        ny: usize,
        nz: usize,
    },
    /// `cells[i + nx·(j + ny·k)]`
    Grid {
        nx: usize,
        ny: usize,
        nz: usize,
        cells: Vec<bool>,
    },
    Arch(ArchShape),
}

impl Occupancy {
    fn voxels(&self) -> Vec<[i64; 3]> {
        let mut out = Vec::new();
        match self {
            Occupancy::Block { nx, ny, nz } => {
                for k in 0..*nz {
                    for j in 0..*ny {
                        for i in 0..*nx {
                            out.push([i as i64, j as i64, k as i64]);
                        }
                    }
                }
            }
            Occupancy::Grid { nx, ny, nz, cells } => {
                for k in 0..*nz {
                    for j in 0..*ny {
                        for i in 0..*nx {
                            if cells.get(i + nx * (j + ny * k)).copied().unwrap_or(false) {
                                out.push([i as i64, j as i64, k as i64]);
                            }
                        }
                    }
                }
            }
            Occupancy::Arch(a) => {
                let cx = (a.span as f64 - 1.0) / 2.0;
                let (ao, co) = (a.span as f64 / 2.0, a.rise as f64);
                let (ai, ci) = (ao - a.thickness as f64, co - a.thickness as f64);
                for k in 0..=a.rise {
                    for j in 0..a.depth {
                        for i in 0..a.span {
                            let dx = i as f64 - cx;
                            let z = k as f64;
                            let outer = (dx / ao).powi(2) + (z / co).powi(2) <= 1.0;
                            let inner = ai <= 0.0 || ci <= 0.0 || (dx / ai).powi(2) + (z / ci).powi(2) >= 1.0;
                            if outer && inner {
                                out.push([i as i64, j as i64, k as i64]);
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Regular cubic lattice of touching spheres: one node per occupied voxel,
/// one beam per face-adjacent pair, base plane fully fixed, self-weight on.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    pub occupancy: Occupancy,
    /// Sphere diameter and grid spacing, mm.
    pub diameter: f64,
    /// Homogenised properties of one sphere-to-sphere joint.
    pub section: SectionProperties,
    pub material: Material,
    /// Peel the occupancy to the part where every voxel off the base plane
    /// has at least three neighbours, then keep its largest piece, so that
    /// the body itself has no dead arms.
    pub trim_to_core: bool,
    /// Fraction of all cells injected as dead arms and detached splashes.
    pub splash_fraction: f64,
    pub seed: u64,
}

impl LatticeSpec {
    pub fn block(nx: usize, ny: usize, nz: usize) -> Self {
        LatticeSpec {
            occupancy: Occupancy::Block { nx, ny, nz },
            trim_to_core: false,
            splash_fraction: 0.0,
            ..Default::default()
        }
    }
}

impl Default for LatticeSpec {
    /// Thick arch of about 1,800 spheres with 1 % injected defects.
    fn default() -> Self {
        LatticeSpec {
            occupancy: Occupancy::Arch(ArchShape {
                span: 55,
                rise: 32,
                thickness: 4,
                depth: 5,
            }),
            diameter: 47.0,
            // solid round bar of 20 mm as the default joint
            section: SectionProperties {
                area: 314.159_265_358_979_3,
                iy: 7_853.981_633_974_483,
                iz: 7_853.981_633_974_483,
                torsion: 15_707.963_267_948_966,
                wy: 785.398_163_397_448_3,
                wz: 785.398_163_397_448_3,
                wt: 1_570.796_326_794_896_6,
            },
            material: Material {
                e: 2_000.0,
                nu: 0.35,
                t_alpha: 9e-5,
                density: 150e-9,
                yield_stress: 40.0,
                extra: Vec::new(),
            },
            trim_to_core: true,
            splash_fraction: 0.01,
            seed: 141,
        }
    }
}

/// What was injected, by id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LatticeTruth {
    pub main_points: usize,
    pub main_cells: usize,
    pub arm_points: Vec<PointId>,
    pub arm_cells: Vec<CellId>,
    pub splash_points: Vec<PointId>,
    pub splash_cells: Vec<CellId>,
}

impl LatticeTruth {
    pub fn injected_cells(&self) -> usize {
        self.arm_cells.len() + self.splash_cells.len()
    }

    /// Injected cells over all cells.
    pub fn injected_fraction(&self) -> f64 {
        let total = self.main_cells + self.injected_cells();
        if total == 0 {
            0.0
        } else {
            self.injected_cells() as f64 / total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeModel {
    pub model: StructuralModel,
    pub truth: LatticeTruth,
}

const NEIGHBOURS: [[i64; 3]; 6] = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]];

fn add(a: [i64; 3], d: [i64; 3]) -> [i64; 3] {
    [a[0] + d[0], a[1] + d[1], a[2] + d[2]]
}

/// Peel voxels off the base plane with fewer than three neighbours, then keep
/// the largest face-connected piece.
fn trim(voxels: Vec<[i64; 3]>) -> Vec<[i64; 3]> {
    let Some(base) = voxels.iter().map(|v| v[2]).min() else {
        return voxels;
    };
    let mut alive: HashSet<[i64; 3]> = voxels.iter().copied().collect();
    let degree =
        |v: [i64; 3], alive: &HashSet<[i64; 3]>| NEIGHBOURS.iter().filter(|&&d| alive.contains(&add(v, d))).count();
    let mut queue: VecDeque<[i64; 3]> = voxels
        .iter()
        .copied()
        .filter(|&v| v[2] > base && degree(v, &alive) < 3)
        .collect();
    while let Some(v) = queue.pop_front() {
        if !alive.remove(&v) {
            continue;
        }
        for d in NEIGHBOURS {
            let w = add(v, d);
            if w[2] > base && alive.contains(&w) && degree(w, &alive) < 3 {
                queue.push_back(w);
            }
        }
    }

    let mut seen: HashSet<[i64; 3]> = HashSet::new();
    let mut best: Vec<[i64; 3]> = Vec::new();
    let mut best_cells = 0;
    for &v in &voxels {
        if !alive.contains(&v) || seen.contains(&v) {
            continue;
        }
        let mut piece = vec![v];
        seen.insert(v);
        let mut k = 0;
        let mut cells = 0;
        while k < piece.len() {
            let u = piece[k];
            k += 1;
            for d in NEIGHBOURS {
                let w = add(u, d);
                if alive.contains(&w) {
                    cells += 1;
                    if seen.insert(w) {
                        piece.push(w);
                    }
                }
            }
        }
        if cells / 2 > best_cells {
            best_cells = cells / 2;
            best = piece;
        }
    }
    let keep: HashSet<[i64; 3]> = best.into_iter().collect();
    voxels.into_iter().filter(|v| keep.contains(v)).collect()
}

pub fn gen_sphere_lattice(spec: &LatticeSpec) -> Result<LatticeModel, GenError> {
    positive("diameter", spec.diameter)?;
    if !(0.0..=0.1).contains(&spec.splash_fraction) {
        return Err(GenError::Parameter {
            name: "splash_fraction",
            requirement: "within [0, 0.1]",
            value: spec.splash_fraction,
        });
    }
    let mut voxels = spec.occupancy.voxels();
    if spec.trim_to_core {
        voxels = trim(voxels);
    }
    if voxels.is_empty() {
        return Err(GenError::EmptyLattice);
    }
    let base = voxels.iter().map(|v| v[2]).min().unwrap();

    let mut model = StructuralModel::new();
    model.comment = "sphere lattice".into();
    model.cross_sections.insert(1, CrossSection::generic(spec.section));
    model.materials.insert(1, spec.material.clone());

    let push_point = |model: &mut StructuralModel, v: [i64; 3]| {
        let id = model.points.len() as u32;
        let d = spec.diameter;
        let mut p = Point::new(id, [v[0] as f64 * d, v[1] as f64 * d, v[2] as f64 * d]);
        if v[2] == base {
            p.fixed = [true; 6];
        }
        model.points.push(p);
        id
    };
    let mut id_of: HashMap<[i64; 3], u32> = HashMap::with_capacity(voxels.len());
    for &v in &voxels {
        id_of.insert(v, push_point(&mut model, v));
    }
    for &v in &voxels {
        for d in [[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
            if let Some(&b) = id_of.get(&add(v, d)) {
                let id = model.cells.len() as u32;
                model.cells.push(Cell::beam(id, id_of[&v], b, 1, 1));
            }
        }
    }

    let mut truth = LatticeTruth {
        main_points: model.points.len(),
        main_cells: model.cells.len(),
        ..Default::default()
    };
    let f = spec.splash_fraction;
    let target = (f * truth.main_cells as f64 / (1.0 - f)).round() as usize;
    if target == 0 {
        return Ok(LatticeModel { model, truth });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut occupied: HashSet<[i64; 3]> = voxels.iter().copied().collect();
    let anchors: Vec<[i64; 3]> = voxels.iter().copied().filter(|v| v[2] > base).collect();
    let lo = [0, 1, 2].map(|a| voxels.iter().map(|v| v[a]).min().unwrap() - 3);
    let hi = [0, 1, 2].map(|a| voxels.iter().map(|v| v[a]).max().unwrap() + 3);

    // a new voxel may touch nothing but its predecessor, and never the base
    let free = |v: [i64; 3], prev: Option<[i64; 3]>, occupied: &HashSet<[i64; 3]>| {
        v[2] > base
            && !occupied.contains(&v)
            && NEIGHBOURS
                .iter()
                .map(|&d| add(v, d))
                .all(|w| Some(w) == prev || !occupied.contains(&w))
    };

    let mut injected = 0;
    let mut attempts = 0;
    while injected < target && attempts < 1000 * target + 1000 {
        attempts += 1;
        let remaining = target - injected;
        let arm = truth.arm_cells.len() <= truth.splash_cells.len() && !anchors.is_empty();
        let mut chain: Vec<[i64; 3]> = Vec::new();
        let anchor = arm.then(|| anchors[rng.gen_range(0..anchors.len())]);
        let mut prev = anchor;
        let wanted = if arm {
            rng.gen_range(1..=2usize).min(remaining)
        } else {
            rng.gen_range(2..=3usize).min(remaining + 1)
        };
        let mut start = if arm {
            add(prev.unwrap(), NEIGHBOURS[rng.gen_range(0..6)])
        } else {
            [0, 1, 2].map(|a| rng.gen_range(lo[a]..=hi[a]))
        };
        let mut scratch = occupied.clone();
        while chain.len() < wanted {
            if !free(start, prev, &scratch) {
                break;
            }
            scratch.insert(start);
            chain.push(start);
            prev = Some(start);
            start = add(start, NEIGHBOURS[rng.gen_range(0..6)]);
        }
        if chain.len() < wanted {
            continue;
        }
        let mut last: Option<u32> = anchor.map(|a| id_of[&a]);
        for &v in &chain {
            let id = push_point(&mut model, v);
            occupied.insert(v);
            if arm {
                truth.arm_points.push(PointId(id));
            } else {
                truth.splash_points.push(PointId(id));
            }
            if let Some(a) = last {
                let cid = model.cells.len() as u32;
                model.cells.push(Cell::beam(cid, a, id, 1, 1));
                injected += 1;
                if arm {
                    truth.arm_cells.push(CellId(cid));
                } else {
                    truth.splash_cells.push(CellId(cid));
                }
            }
            last = Some(id);
        }
    }
    Ok(LatticeModel { model, truth })
}
