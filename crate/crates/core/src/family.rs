//! Family-level pipeline: parameters, `Q`, the connecting arc (or the chain
//! through the double zero at `K*`), the vertical tails, and the
//! equilibrium checks built on them.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cubic::{self, Phase};
use crate::equilibrium::{
    density_from_q, energy, s_property_residual, variational_check, ArcMeasure, EnergyReport, VariationalReport,
};
use crate::error::{Error, Result};
use crate::poly::C64;
use crate::potential::Potential;
use crate::quaddiff::{
    connection_search, emanation_angles, trace_from_zero_at, Connection, QuadraticDifferential, TraceOptions,
    Trajectory, TrajectoryKind, TrajectoryStart,
};
use crate::quintic::{self, Branch};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Family {
    Cubic { k: f64 },
    Quintic(Branch),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Cubic { k } => write!(f, "cubic K={k}"),
            Family::Quintic(b) => write!(f, "quintic p={} ({})", b.index(), b.contour_class()),
        }
    }
}

impl Family {
    pub fn potential(&self) -> Potential {
        match self {
            Family::Cubic { k } => Potential::cubic(*k),
            Family::Quintic(b) => Potential::quintic(b.contour_class()),
        }
    }

    pub fn quadratic_differential(&self) -> Result<QuadraticDifferential> {
        match self {
            Family::Cubic { k } => cubic::build_q(&cubic::params_from_k(*k)?),
            Family::Quintic(b) => quintic::build_q(&quintic::closed_form_params(*b)),
        }
    }

    /// Indices of the two simple zeros the support connects.
    pub fn arc_zeros(&self) -> (usize, usize) {
        match self {
            Family::Cubic { .. } => (cubic::LEFT_ZERO, cubic::RIGHT_ZERO),
            Family::Quintic(_) => (quintic::LEFT_ZERO, quintic::RIGHT_ZERO),
        }
    }

    /// Short file-name-safe tag.
    pub fn tag(&self) -> String {
        match self {
            Family::Cubic { k } => format!("cubic_k{k}"),
            Family::Quintic(b) => format!("quintic_p{}", b.index()),
        }
    }
}

/// The S-curve pieces of one family member.
#[derive(Debug, Clone)]
pub struct Support {
    pub family: Family,
    pub potential: Potential,
    pub qd: QuadraticDifferential,
    /// Horizontal pieces from the left simple zero to the right one, in order.
    pub arcs: Vec<Trajectory>,
    /// Vertical continuations from the left and the right endpoint.
    pub tails: [Trajectory; 2],
}

impl Support {
    /// The whole arc as one polyline.
    pub fn arc_polyline(&self) -> Vec<C64> {
        let mut out: Vec<C64> = Vec::new();
        for a in &self.arcs {
            let skip = usize::from(!out.is_empty());
            out.extend(a.points.iter().skip(skip));
        }
        out
    }
}

/// Direction in which `traj` arrives at its final point.
fn arrival_direction(traj: &Trajectory) -> f64 {
    let n = traj.points.len();
    (traj.points[n - 2] - traj.points[n - 1]).arg()
}

fn departure_direction(traj: &Trajectory) -> f64 {
    match traj.start {
        TrajectoryStart::Zero { angle, .. } => angle,
        TrajectoryStart::Point(_) => (traj.points[1] - traj.points[0]).arg(),
    }
}

/// Horizontal chain `z1 -> z0 -> z2` through the double zero at `K*`.
fn critical_chain(qd: &QuadraticDifferential, opts: &TraceOptions) -> Result<Vec<Trajectory>> {
    let find = |from: usize, to: usize| -> Result<Trajectory> {
        for a in emanation_angles(qd, from, TrajectoryKind::Horizontal)? {
            let t = trace_from_zero_at(qd, from, a, TrajectoryKind::Horizontal, opts)?;
            if t.end.zero_index() == Some(to) {
                return Ok(t);
            }
        }
        Err(Error::Invalid(format!("no horizontal trajectory from zero {from} to zero {to}")))
    };
    let first = find(cubic::LEFT_ZERO, cubic::DOUBLE_ZERO)?;
    // leave the double zero opposite to the arrival, which is pi/2 away from
    // the two vertical-axis directions
    let arrive = arrival_direction(&first);
    let mut best: Option<Trajectory> = None;
    for a in emanation_angles(qd, cubic::DOUBLE_ZERO, TrajectoryKind::Horizontal)? {
        if crate::quaddiff::wrap_angle(a - arrive - PI).abs() > 0.1 {
            continue;
        }
        let t = trace_from_zero_at(qd, cubic::DOUBLE_ZERO, a, TrajectoryKind::Horizontal, opts)?;
        if t.end.zero_index() == Some(cubic::RIGHT_ZERO) {
            best = Some(t);
        }
    }
    let second = match best {
        Some(t) => t,
        None => find(cubic::DOUBLE_ZERO, cubic::RIGHT_ZERO)?,
    };
    Ok(vec![first, second])
}

/// Connecting arc and tails. Fails with [`Error::Invalid`] when no arc
/// connects the simple zeros (the two-cut regime).
pub fn support(family: Family, opts: &TraceOptions) -> Result<Support> {
    let qd = family.quadratic_differential()?;
    let (za, zb) = family.arc_zeros();
    let arcs = match connection_search(&qd, za, zb, opts)? {
        Connection::Found(arc) => vec![arc],
        Connection::NotFound(ends) => {
            let critical = matches!(family, Family::Cubic { k } if cubic::params_from_k(k)?.phase == Phase::Critical);
            if !critical {
                return Err(Error::Invalid(format!(
                    "{family}: no horizontal trajectory connects zeros {za} and {zb} (ends: {ends:?})"
                )));
            }
            critical_chain(&qd, opts)?
        }
    };
    let psi_a = departure_direction(&arcs[0]);
    let psi_b = arrival_direction(arcs.last().expect("nonempty"));
    let tail_a = trace_from_zero_at(&qd, za, psi_a + PI, TrajectoryKind::Vertical, opts)?;
    let tail_b = trace_from_zero_at(&qd, zb, psi_b + PI, TrajectoryKind::Vertical, opts)?;
    Ok(Support {
        family,
        potential: family.potential(),
        qd,
        arcs,
        tails: [tail_a, tail_b],
    })
}

/// Everything the equilibrium checks measure for one support.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumSummary {
    pub mass: f64,
    pub variational: VariationalReport,
    pub s_property: f64,
    pub energy: EnergyReport,
}

pub fn equilibrium(support: &Support) -> Result<(ArcMeasure, EquilibriumSummary)> {
    let measure = density_from_q(&support.qd, &support.arcs)?;
    let variational = variational_check(&measure, &support.potential, &support.tails);
    let s_property = s_property_residual(&support.qd, &measure);
    let energy = energy(&measure, &support.potential, variational.ell);
    let summary = EquilibriumSummary {
        mass: measure.mass(),
        variational,
        s_property,
        energy,
    };
    Ok((measure, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k0_support_has_tails_to_the_sector_centres() {
        let s = support(Family::Cubic { k: 0.0 }, &TraceOptions::default()).unwrap();
        assert_eq!(s.arcs.len(), 1);
        let a = s.tails[0].end.infinity_angle().unwrap();
        let b = s.tails[1].end.infinity_angle().unwrap();
        assert!((a - 5.0 * PI / 6.0).abs() < 0.02, "{a}");
        assert!((b - PI / 6.0).abs() < 0.02, "{b}");
    }

    #[test]
    fn two_cut_has_no_support() {
        assert!(support(Family::Cubic { k: 2.0 }, &TraceOptions::default()).is_err());
    }
}
