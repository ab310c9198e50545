use super::RepairError;
use crate::model::{PointId, RigidLink, StructuralModel};

/// Register `u_slave = u_master + θ_master × r`, `θ_slave = θ_master`.
///
/// Links are single-level: a slave may not be a master and vice versa.
/// Without an explicit `offset`, `r` follows the current point positions.
pub fn make_rigid_link(
    model: &mut StructuralModel,
    master: PointId,
    slave: PointId,
    offset: Option<[f64; 3]>,
) -> Result<(), RepairError> {
    if master == slave {
        return Err(RepairError::SelfLink(master));
    }
    for p in [master, slave] {
        if model.point(p).is_none() {
            return Err(RepairError::UnknownPoint(p));
        }
    }
    if let Some(r) = offset {
        if !r.iter().all(|v| v.is_finite()) {
            return Err(RepairError::NonFiniteOffset);
        }
    }
    if model.rigid_links.iter().any(|l| l.slave == slave) {
        return Err(RepairError::DuplicateSlave(slave));
    }
    let chained = model.rigid_links.iter().any(|l| l.master == slave || l.slave == master);
    if chained {
        return Err(RepairError::CyclicLink { master, slave });
    }
    model.rigid_links.push(RigidLink { master, slave, offset });
    Ok(())
}

/// Arm vector `r` of a link, resolving automatic offsets from positions.
pub fn link_arm(model: &StructuralModel, link: &RigidLink) -> Option<[f64; 3]> {
    if let Some(r) = link.offset {
        return Some(r);
    }
    let m = model.point(link.master)?.coords;
    let s = model.point(link.slave)?.coords;
    Some([s[0] - m[0], s[1] - m[1], s[2] - m[2]])
}
